//! Complex length spectra shipped with the crate, and the runs made on them.

use crate::error::Result;
use crate::geodesic::ScrewConfig;
use crate::io::parse_clspectrum;
use crate::spaceform::SpaceForm;
use crate::spectrum::{CLSpectrum, EnumerationBudget};

pub const FLAT: &str = include_str!("../data/flat-sample.json");
pub const HYPERBOLIC: &str = include_str!("../data/hyperbolic-sample.json");
/// The hyperbolic sample reordered and with repeated entries.
pub const HYPERBOLIC_PERMUTED: &str = include_str!("../data/hyperbolic-sample-permuted.json");

/// A bundled spectrum with the screw structure and budget it is run with.
#[derive(Debug, Clone, Copy)]
pub struct SampleRun {
    pub name: &'static str,
    pub text: &'static str,
    pub k: SpaceForm,
    pub lambda: f64,
    pub cutoff: f64,
    pub m_max: u64,
}

impl SampleRun {
    pub fn clspectrum(&self) -> Result<CLSpectrum> {
        parse_clspectrum(self.text)
    }

    pub fn config(&self) -> Result<ScrewConfig> {
        ScrewConfig::new(self.k, self.lambda)
    }

    pub fn budget(&self) -> Result<EnumerationBudget> {
        EnumerationBudget::new(self.cutoff)?.with_m_max(self.m_max)
    }
}

pub const RUNS: [SampleRun; 3] = [
    SampleRun { name: "flat", text: FLAT, k: SpaceForm::Flat, lambda: 1.0, cutoff: 20.0, m_max: 64 },
    SampleRun { name: "hyperbolic", text: HYPERBOLIC, k: SpaceForm::Hyperbolic, lambda: 1.0, cutoff: 15.0, m_max: 64 },
    SampleRun {
        name: "hyperbolic-permuted",
        text: HYPERBOLIC_PERMUTED,
        k: SpaceForm::Hyperbolic,
        lambda: 1.0,
        cutoff: 15.0,
        m_max: 64,
    },
];
