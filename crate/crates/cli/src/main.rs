mod args;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;

use screwspec::geodesic::{horizontality_check, GeodesicSpec, ScrewConfig, HORIZONTAL_TOL};
use screwspec::io::{
    parse_clspectrum, parse_spectrum_auto, write_spectrum_csv, write_spectrum_json, write_trajectory_csv,
    write_trajectory_json, SpectrumFile, SpectrumMetadata,
};
use screwspec::spaceform::{Mat3, SpaceForm, Vec3};
use screwspec::spectrum::{compare_lengths, full_spectrum, model_spectrum, verify_entry, EnumerationBudget};
use screwspec::suites::{run_suites, Suite, Tolerances};
use screwspec::Error;

use args::{Budget, Cli, Command, Format, Output, Screw, SuiteArg};

/// A failed command, carrying its exit status.
enum Failure {
    /// Bad flags, unreadable or malformed input: exit 2.
    Usage(String),
    /// A check or comparison did not hold: exit 1.
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InconsistentWitness(_) => Failure::Check(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::ModelSpectrum(a) => cmd_model_spectrum(&a.screw, &a.budget, &a.output),
        Command::Spectrum(a) => cmd_spectrum(&a.screw, &a.budget, &a.output, &a.clspec),
        Command::Geodesic(a) => cmd_geodesic(&a),
        Command::Verify(a) => cmd_verify(a.suite, a.seed),
        Command::Compare(a) => cmd_compare(&a.a, &a.b, a.tol),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            eprintln!("screwspec: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("screwspec: {msg}");
            ExitCode::from(2)
        }
    }
}

fn screw_config(s: &Screw) -> Result<ScrewConfig, Failure> {
    let k = SpaceForm::try_from(s.k)?;
    Ok(ScrewConfig::new(k, s.lambda)?)
}

fn budget(b: &Budget) -> Result<EnumerationBudget, Failure> {
    Ok(EnumerationBudget {
        cutoff: b.cutoff,
        m_max: b.m_max,
        rational_tol: b.rational_tol,
        max_denominator: b.max_denominator,
    }
    .validated()?)
}

fn emit(out: &Output, text: &str) -> CmdResult {
    match &out.out {
        Some(path) => fs::write(path, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Usage(format!("cannot write output: {e}")))
        }
    }
}

fn emit_spectrum(out: &Output, file: &SpectrumFile) -> CmdResult {
    let text = match out.format {
        Format::Csv => write_spectrum_csv(file),
        Format::Json => write_spectrum_json(file),
    };
    emit(out, &text)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))
}

fn cmd_model_spectrum(screw: &Screw, b: &Budget, out: &Output) -> CmdResult {
    let cfg = screw_config(screw)?;
    let budget = budget(b)?;
    let entries = model_spectrum(&cfg, &budget)?;
    let meta = SpectrumMetadata::new(cfg.space_form(), cfg.lambda(), &budget);
    emit_spectrum(out, &SpectrumFile::new(meta, &entries))
}

fn cmd_spectrum(screw: &Screw, b: &Budget, out: &Output, clspec: &Path) -> CmdResult {
    let cfg = screw_config(screw)?;
    let budget = budget(b)?;
    let cls = parse_clspectrum(&read(clspec)?).map_err(|e| Failure::Usage(format!("{}: {e}", clspec.display())))?;
    let entries = full_spectrum(&cls, &cfg, &budget)?;
    let tol = Tolerances::from_env()?.verify;
    let mut failed = 0;
    for e in &entries {
        let report = verify_entry(e, &cfg, &tol);
        if !report.passed() {
            failed += 1;
            for c in report.failures() {
                eprintln!("length {:.16e}: {} = {:.3e} (limit {:.1e})", e.length, c.name, c.value, c.limit);
            }
        }
    }
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} entries failed verification", entries.len())));
    }
    let meta = SpectrumMetadata::new(cfg.space_form(), cfg.lambda(), &budget);
    emit_spectrum(out, &SpectrumFile::new(meta, &entries))
}

fn parse_vec3(s: &str, name: &str) -> Result<Vec3, Failure> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || Failure::Usage(format!("--{name} must be three comma-separated reals, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut v = Vec3::zeros();
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(bad)?;
    }
    Ok(v)
}

fn time_grid(t0: f64, t1: f64, dt: f64) -> Result<Vec<f64>, Failure> {
    if !(t0.is_finite() && t1.is_finite() && t1 >= t0) {
        return Err(Failure::Usage(format!("invalid time range [{t0}, {t1}]")));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Failure::Usage(format!("--dt must be positive, got {dt}")));
    }
    let steps = ((t1 - t0) / dt * (1.0 + 1e-12)).floor();
    if steps > 1e7 {
        return Err(Failure::Usage("time grid exceeds 10^7 samples".into()));
    }
    Ok((0..=steps as u64).map(|i| t0 + i as f64 * dt).collect())
}

fn cmd_geodesic(a: &args::GeodesicArgs) -> CmdResult {
    let cfg = screw_config(&a.screw)?;
    let spec = if a.lie {
        let x = parse_vec3(a.x.as_deref().unwrap_or_default(), "x")?;
        let y = parse_vec3(a.y.as_deref().unwrap_or_default(), "y")?;
        GeodesicSpec::lie(x, y, cfg)
    } else {
        let kappa = a.kappa.ok_or_else(|| Failure::Usage("--kappa is required without --lie".into()))?;
        let tau = a.tau.unwrap_or(0.0);
        if !(kappa >= 0.0 && kappa.is_finite() && tau.is_finite()) {
            return Err(Failure::Usage(format!("--kappa must be a non-negative real, got {kappa}")));
        }
        GeodesicSpec::geometric(kappa, tau, Mat3::identity(), cfg)?
    };
    let times = time_grid(a.t0, a.t1, a.dt)?;
    let samples = spec.sample(&times);
    let text = match a.output.format {
        Format::Csv => write_trajectory_csv(&samples),
        Format::Json => write_trajectory_json(&samples),
    };
    emit(&a.output, &text)?;
    if a.verify {
        let report = horizontality_check(&spec, &times);
        let speed = screwspec::geodesic::speed(&spec);
        let dev = report.max_speed_deviation(speed);
        eprintln!("horizontality residual {:.3e} (limit {HORIZONTAL_TOL:.0e})", report.max_residual);
        eprintln!("speed {speed:.16e}, max deviation {dev:.3e}");
        if !(report.is_horizontal(HORIZONTAL_TOL) && dev < HORIZONTAL_TOL) {
            return Err(Failure::Check("trajectory failed the horizontality check".into()));
        }
    }
    Ok(())
}

fn cmd_verify(suite: SuiteArg, seed: u64) -> CmdResult {
    let suites: Vec<Suite> = match suite {
        SuiteArg::Horizontality => vec![Suite::Horizontality],
        SuiteArg::Frenet => vec![Suite::Frenet],
        SuiteArg::Equivalence => vec![Suite::Equivalence],
        SuiteArg::Closing => vec![Suite::Closing],
        SuiteArg::All => Suite::ALL.to_vec(),
    };
    let tol = Tolerances::from_env()?;
    let report = run_suites(&suites, seed, &tol)?;
    for p in &report.properties {
        println!("{p}");
    }
    let failed = report.properties.iter().filter(|p| !p.passed).count();
    if failed > 0 {
        return Err(Failure::Check(format!("{failed} of {} properties failed", report.properties.len())));
    }
    println!("all {} properties passed (seed {seed})", report.properties.len());
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, tol: f64) -> CmdResult {
    if !(tol >= 0.0 && tol.is_finite()) {
        return Err(Failure::Usage(format!("--tol must be non-negative, got {tol}")));
    }
    let load = |p: &Path| -> Result<SpectrumFile, Failure> {
        parse_spectrum_auto(&read(p)?).map_err(|e| Failure::Usage(format!("{}: {e}", p.display())))
    };
    let (fa, fb) = (load(a)?, load(b)?);
    let report = compare_lengths(fa.lengths(), fb.lengths(), tol);
    match report.first_mismatch {
        None => {
            println!("match: {} distinct lengths", report.len_a);
            Ok(())
        }
        Some(m) => {
            let show = |x: Option<f64>| x.map_or_else(|| "(none)".to_string(), |v| format!("{v:.16e}"));
            println!("mismatch at index {}: {} vs {}", m.index, show(m.a), show(m.b));
            Err(Failure::Check(format!(
                "length sets differ ({} vs {} distinct lengths)",
                report.len_a, report.len_b
            )))
        }
    }
}
