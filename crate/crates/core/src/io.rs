//! Text formats: complex length spectra in, spectra and trajectories out.
//!
//! Spectrum CSV starts with `# key=value` metadata lines followed by the
//! header `length,source,ell,theta,q,p,n,m,r,c,mu,kappa,tau`; fields that do
//! not apply to a row's source are left empty. Reals are written with 17
//! significant digits so that a parse/write cycle is exact.

use std::f64::consts::PI;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::helix::ComplexLength;
use crate::spaceform::{phi, GroupElement, SpaceForm};
use crate::spectrum::{
    merge_witnesses, EnumerationBudget, HelixWitness, SpectrumEntry, Source, Witness, WitnessDetail, CLSpectrum,
};

pub const SPECTRUM_COLUMNS: [&str; 13] =
    ["length", "source", "ell", "theta", "q", "p", "n", "m", "r", "c", "mu", "kappa", "tau"];

fn parse_err(msg: impl Into<String>) -> Error {
    Error::Parse(msg.into())
}

// ---------------------------------------------------------------------------
// Complex length spectra

fn complex_length_at(i: usize, v: &Value) -> Result<ComplexLength> {
    let obj = v.as_object().ok_or_else(|| parse_err(format!("entry {i}: expected an object")))?;
    let field = |name: &str| -> Result<f64> {
        obj.get(name)
            .ok_or_else(|| parse_err(format!("entry {i}: missing \"{name}\"")))?
            .as_f64()
            .ok_or_else(|| parse_err(format!("entry {i}: \"{name}\" must be a number")))
    };
    let (ell, theta) = (field("ell")?, field("theta")?);
    if let Some(extra) = obj.keys().find(|k| *k != "ell" && *k != "theta") {
        return Err(parse_err(format!("entry {i}: unknown field \"{extra}\"")));
    }
    if !(0.0..2.0 * PI).contains(&theta) {
        return Err(parse_err(format!("entry {i}: theta = {theta} is not in [0, 2pi)")));
    }
    ComplexLength::new(ell, theta).map_err(|e| parse_err(format!("entry {i}: {e}")))
}

/// Reads a complex length spectrum: either a bare array of
/// `{"ell": .., "theta": ..}` objects, or an object with that array under
/// `"entries"` and an optional `"name"`.
pub fn parse_clspectrum(text: &str) -> Result<CLSpectrum> {
    let v: Value = serde_json::from_str(text).map_err(|e| parse_err(format!("invalid JSON: {e}")))?;
    let (list, name) = match &v {
        Value::Array(a) => (a, None),
        Value::Object(o) => {
            let list = o
                .get("entries")
                .and_then(Value::as_array)
                .ok_or_else(|| parse_err("expected an \"entries\" array"))?;
            let name = match o.get("name") {
                None | Some(Value::Null) => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(_) => return Err(parse_err("\"name\" must be a string")),
            };
            if let Some(extra) = o.keys().find(|k| *k != "entries" && *k != "name") {
                return Err(parse_err(format!("unknown top-level field \"{extra}\"")));
            }
            (list, name)
        }
        _ => return Err(parse_err("expected an array or an object")),
    };
    let entries = list.iter().enumerate().map(|(i, e)| complex_length_at(i, e)).collect::<Result<_>>()?;
    Ok(CLSpectrum { entries, name })
}

#[derive(Serialize)]
struct ClsOut<'a> {
    #[serde(skip_serializing_if = "Option::is_none")]
    name: Option<&'a str>,
    entries: &'a [ComplexLength],
}

pub fn write_clspectrum(cls: &CLSpectrum) -> String {
    let out = ClsOut { name: cls.name.as_deref(), entries: &cls.entries };
    serde_json::to_string_pretty(&out).expect("complex lengths serialize") + "\n"
}

// ---------------------------------------------------------------------------
// Spectra

/// Parameters echoed at the top of every spectrum file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectrumMetadata {
    pub k: i8,
    pub lambda: f64,
    pub cutoff: f64,
    pub m_max: u64,
    pub rational_tol: f64,
    pub max_denominator: u64,
}

impl SpectrumMetadata {
    pub fn new(k: SpaceForm, lambda: f64, budget: &EnumerationBudget) -> Self {
        SpectrumMetadata {
            k: k.label(),
            lambda,
            cutoff: budget.cutoff,
            m_max: budget.m_max,
            rational_tol: budget.rational_tol,
            max_denominator: budget.max_denominator,
        }
    }
}

/// One output row: a witness flattened to the column schema.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumRow {
    pub length: f64,
    pub source: Source,
    pub ell: Option<f64>,
    pub theta: Option<f64>,
    pub q: Option<u64>,
    pub p: Option<i64>,
    pub n: Option<u64>,
    pub m: Option<i64>,
    pub r: Option<f64>,
    pub c: Option<f64>,
    pub mu: Option<f64>,
    pub kappa: Option<f64>,
    pub tau: Option<f64>,
}

impl From<&Witness> for SpectrumRow {
    fn from(w: &Witness) -> Self {
        let mut row = SpectrumRow {
            length: w.length,
            source: w.source(),
            ell: None,
            theta: None,
            q: None,
            p: None,
            n: None,
            m: None,
            r: None,
            c: None,
            mu: None,
            kappa: None,
            tau: None,
        };
        match w.detail {
            WitnessDetail::Circle { m, n, r } => {
                row.m = Some(m as i64);
                row.n = Some(n);
                row.r = Some(r);
            }
            WitnessDetail::GeodesicFiber { cl, n, m } => {
                row.ell = Some(cl.ell);
                row.theta = Some(cl.theta);
                row.n = Some(n);
                row.m = Some(m);
            }
            WitnessDetail::HelixType(h) => {
                row.ell = Some(h.cl.ell);
                row.theta = Some(h.cl.theta);
                row.q = Some(h.q);
                row.p = Some(h.p);
                row.n = Some(h.n);
                row.m = Some(h.m as i64);
                row.r = Some(h.r);
                row.c = Some(h.c);
                row.mu = Some(h.mu);
                row.kappa = Some(h.kappa);
                row.tau = Some(h.tau);
            }
        }
        row
    }
}

impl SpectrumRow {
    /// Rebuilds the witness, checking that exactly the fields of its source
    /// are present.
    pub fn to_witness(&self) -> std::result::Result<Witness, String> {
        fn need<T: Copy>(v: Option<T>, name: &str) -> std::result::Result<T, String> {
            v.ok_or_else(|| format!("missing {name}"))
        }
        fn finite(v: f64, name: &str) -> std::result::Result<f64, String> {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("{name} is not finite"))
            }
        }
        let present = [
            ("ell", self.ell.is_some()),
            ("theta", self.theta.is_some()),
            ("q", self.q.is_some()),
            ("p", self.p.is_some()),
            ("n", self.n.is_some()),
            ("m", self.m.is_some()),
            ("r", self.r.is_some()),
            ("c", self.c.is_some()),
            ("mu", self.mu.is_some()),
            ("kappa", self.kappa.is_some()),
            ("tau", self.tau.is_some()),
        ];
        let allowed: &[&str] = match self.source {
            Source::Circle => &["n", "m", "r"],
            Source::GeodesicFiber => &["ell", "theta", "n", "m"],
            Source::HelixType => &["ell", "theta", "q", "p", "n", "m", "r", "c", "mu", "kappa", "tau"],
        };
        if let Some((name, _)) = present.iter().find(|(name, on)| *on && !allowed.contains(name)) {
            return Err(format!("field {name} does not apply to source {}", self.source.as_str()));
        }
        let length = finite(self.length, "length")?;
        if !(length > 0.0) {
            return Err(format!("length {length} must be positive"));
        }
        let n = need(self.n, "n")?;
        if n == 0 {
            return Err("n must be positive".into());
        }
        let m = need(self.m, "m")?;
        let cl = || -> std::result::Result<ComplexLength, String> {
            let ell = finite(need(self.ell, "ell")?, "ell")?;
            let theta = finite(need(self.theta, "theta")?, "theta")?;
            ComplexLength::new(ell, theta).map_err(|e| e.to_string())
        };
        let positive_m = || u64::try_from(m).ok().filter(|&m| m > 0).ok_or_else(|| format!("m = {m} must be positive"));
        let detail = match self.source {
            Source::Circle => {
                WitnessDetail::Circle { m: positive_m()?, n, r: finite(need(self.r, "r")?, "r")? }
            }
            Source::GeodesicFiber => WitnessDetail::GeodesicFiber { cl: cl()?, n, m },
            Source::HelixType => {
                let cl = cl()?;
                let q = need(self.q, "q")?;
                if q == 0 {
                    return Err("q must be positive".into());
                }
                let c = finite(need(self.c, "c")?, "c")?;
                if !(c > 0.0) {
                    return Err(format!("c = {c} must be positive"));
                }
                WitnessDetail::HelixType(HelixWitness {
                    cl,
                    q,
                    p: need(self.p, "p")?,
                    n,
                    m: positive_m()?,
                    r: finite(need(self.r, "r")?, "r")?,
                    c,
                    mu: finite(need(self.mu, "mu")?, "mu")?,
                    kappa: finite(need(self.kappa, "kappa")?, "kappa")?,
                    tau: finite(need(self.tau, "tau")?, "tau")?,
                    big_l: q as f64 * cl.ell / c,
                })
            }
        };
        Ok(Witness { length, detail })
    }
}

/// A spectrum as read back from a file.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumFile {
    pub metadata: Option<SpectrumMetadata>,
    pub rows: Vec<SpectrumRow>,
}

impl SpectrumFile {
    pub fn new(metadata: SpectrumMetadata, entries: &[SpectrumEntry]) -> Self {
        let rows = entries.iter().flat_map(|e| e.witnesses.iter().map(SpectrumRow::from)).collect();
        SpectrumFile { metadata: Some(metadata), rows }
    }

    pub fn entries(&self) -> Result<Vec<SpectrumEntry>> {
        let ws = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| r.to_witness().map_err(|e| parse_err(format!("row {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(merge_witnesses(ws))
    }

    pub fn lengths(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.length).collect()
    }
}

fn real(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

pub fn write_spectrum_csv(file: &SpectrumFile) -> String {
    let mut out = String::new();
    if let Some(md) = &file.metadata {
        let _ = writeln!(out, "# k={}", md.k);
        let _ = writeln!(out, "# lambda={:?}", md.lambda);
        let _ = writeln!(out, "# cutoff={:?}", md.cutoff);
        let _ = writeln!(out, "# m_max={}", md.m_max);
        let _ = writeln!(out, "# rational_tol={:?}", md.rational_tol);
        let _ = writeln!(out, "# max_denominator={}", md.max_denominator);
    }
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(SPECTRUM_COLUMNS).expect("in-memory write");
    for r in &file.rows {
        let rec = [
            real(r.length),
            r.source.as_str().to_string(),
            opt(r.ell, real),
            opt(r.theta, real),
            opt(r.q, |x| x.to_string()),
            opt(r.p, |x| x.to_string()),
            opt(r.n, |x| x.to_string()),
            opt(r.m, |x| x.to_string()),
            opt(r.r, real),
            opt(r.c, real),
            opt(r.mu, real),
            opt(r.kappa, real),
            opt(r.tau, real),
        ];
        w.write_record(&rec).expect("in-memory write");
    }
    out.push_str(std::str::from_utf8(&w.into_inner().expect("in-memory flush")).expect("ASCII output"));
    out
}

fn parse_metadata(lines: &[(usize, &str)]) -> Result<Option<SpectrumMetadata>> {
    if lines.is_empty() {
        return Ok(None);
    }
    let mut map = std::collections::BTreeMap::new();
    for &(lineno, l) in lines {
        let (key, value) = l
            .split_once('=')
            .ok_or_else(|| parse_err(format!("line {lineno}: metadata must be key=value")))?;
        if map.insert(key.trim(), value.trim()).is_some() {
            return Err(parse_err(format!("line {lineno}: duplicate metadata key {}", key.trim())));
        }
    }
    fn get<T: std::str::FromStr>(map: &std::collections::BTreeMap<&str, &str>, key: &str) -> Result<T> {
        map.get(key)
            .ok_or_else(|| parse_err(format!("metadata is missing {key}")))?
            .parse()
            .map_err(|_| parse_err(format!("metadata {key} is not a valid number")))
    }
    let md = SpectrumMetadata {
        k: get(&map, "k")?,
        lambda: get(&map, "lambda")?,
        cutoff: get(&map, "cutoff")?,
        m_max: get(&map, "m_max")?,
        rational_tol: get(&map, "rational_tol")?,
        max_denominator: get(&map, "max_denominator")?,
    };
    if let Some(extra) = map.keys().find(|k| {
        !["k", "lambda", "cutoff", "m_max", "rational_tol", "max_denominator"].contains(k)
    }) {
        return Err(parse_err(format!("unknown metadata key {extra}")));
    }
    Ok(Some(md))
}

fn field<T: std::str::FromStr>(rec: &csv::StringRecord, col: usize, row: usize) -> Result<Option<T>> {
    let s = rec.get(col).unwrap_or("");
    if s.is_empty() {
        return Ok(None);
    }
    s.parse()
        .map(Some)
        .map_err(|_| parse_err(format!("row {row}, column {}: cannot parse {s:?}", SPECTRUM_COLUMNS[col])))
}

pub fn parse_spectrum_csv(text: &str) -> Result<SpectrumFile> {
    let mut meta = Vec::new();
    let mut body_start = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        match line.strip_prefix('#') {
            Some(rest) => {
                meta.push((i + 1, rest.trim()));
                body_start += line.len();
            }
            None => break,
        }
    }
    let metadata = parse_metadata(&meta)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(&text.as_bytes()[body_start..]);
    let headers = reader.headers().map_err(|e| parse_err(format!("header: {e}")))?.clone();
    if headers.iter().ne(SPECTRUM_COLUMNS) {
        return Err(parse_err(format!("header must be {}", SPECTRUM_COLUMNS.join(","))));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| parse_err(format!("row {i}: {e}")))?;
        let source_text = rec.get(1).unwrap_or("");
        let source =
            Source::parse(source_text).ok_or_else(|| parse_err(format!("row {i}: unknown source {source_text:?}")))?;
        let length = field::<f64>(&rec, 0, i)?.ok_or_else(|| parse_err(format!("row {i}: missing length")))?;
        let row = SpectrumRow {
            length,
            source,
            ell: field(&rec, 2, i)?,
            theta: field(&rec, 3, i)?,
            q: field(&rec, 4, i)?,
            p: field(&rec, 5, i)?,
            n: field(&rec, 6, i)?,
            m: field(&rec, 7, i)?,
            r: field(&rec, 8, i)?,
            c: field(&rec, 9, i)?,
            mu: field(&rec, 10, i)?,
            kappa: field(&rec, 11, i)?,
            tau: field(&rec, 12, i)?,
        };
        row.to_witness().map_err(|e| parse_err(format!("row {i}: {e}")))?;
        rows.push(row);
    }
    Ok(SpectrumFile { metadata, rows })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectrumJson {
    metadata: Option<SpectrumMetadata>,
    rows: Vec<SpectrumRow>,
}

pub fn write_spectrum_json(file: &SpectrumFile) -> String {
    let doc = SpectrumJson { metadata: file.metadata, rows: file.rows.clone() };
    serde_json::to_string_pretty(&doc).expect("spectrum rows serialize") + "\n"
}

pub fn parse_spectrum_json(text: &str) -> Result<SpectrumFile> {
    let doc: SpectrumJson = serde_json::from_str(text).map_err(|e| parse_err(format!("invalid spectrum JSON: {e}")))?;
    for (i, row) in doc.rows.iter().enumerate() {
        row.to_witness().map_err(|e| parse_err(format!("row {i}: {e}")))?;
    }
    Ok(SpectrumFile { metadata: doc.metadata, rows: doc.rows })
}

/// Reads either spectrum format, choosing by the first non-blank character.
pub fn parse_spectrum_auto(text: &str) -> Result<SpectrumFile> {
    match text.trim_start().chars().next() {
        Some('{') => parse_spectrum_json(text),
        _ => parse_spectrum_csv(text),
    }
}

// ---------------------------------------------------------------------------
// Trajectories

pub const TRAJECTORY_COLUMNS: [&str; 17] = [
    "t", "p0", "p1", "p2", "p3", "b1_0", "b1_1", "b1_2", "b1_3", "b2_0", "b2_1", "b2_2", "b2_3", "b3_0", "b3_1",
    "b3_2", "b3_3",
];

/// One line per sample: time, basepoint and the three frame vectors, all in
/// ambient coordinates of `ℝ⁴`.
pub fn write_trajectory_csv(samples: &[(f64, GroupElement)]) -> String {
    let mut out = TRAJECTORY_COLUMNS.join(",");
    out.push('\n');
    for (t, g) in samples {
        let f = phi(g);
        let mut vals = vec![*t];
        vals.extend(f.p.iter());
        for b in &f.b {
            vals.extend(b.iter());
        }
        let line: Vec<String> = vals.into_iter().map(real).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

#[derive(Serialize)]
struct TrajectorySample {
    t: f64,
    matrix: [f64; 16],
}

/// Samples as `{"t": .., "matrix": [16 reals, row-major]}` objects.
pub fn write_trajectory_json(samples: &[(f64, GroupElement)]) -> String {
    let rows: Vec<TrajectorySample> = samples
        .iter()
        .map(|(t, g)| {
            let m = g.matrix();
            let mut a = [0.0; 16];
            for i in 0..4 {
                for j in 0..4 {
                    a[4 * i + j] = m[(i, j)];
                }
            }
            TrajectorySample { t: *t, matrix: a }
        })
        .collect();
    serde_json::to_string_pretty(&rows).expect("trajectory serializes") + "\n"
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geodesic::ScrewConfig;
    use crate::spectrum::{full_spectrum, model_spectrum};

    #[test]
    fn clspectrum_forms() {
        let a = parse_clspectrum(r#"[{"ell": 1.5, "theta": 0.25}]"#).unwrap();
        assert_eq!(a.entries, vec![ComplexLength::new(1.5, 0.25).unwrap()]);
        assert_eq!(a.name, None);
        let b = parse_clspectrum(r#"{"name": "torus", "entries": []}"#).unwrap();
        assert_eq!(b.name.as_deref(), Some("torus"));
        assert!(b.entries.is_empty());
        let round = parse_clspectrum(&write_clspectrum(&a)).unwrap();
        assert_eq!(round, a);
    }

    #[test]
    fn clspectrum_errors_name_the_index() {
        let err = parse_clspectrum(r#"[{"ell": 1, "theta": 0}, {"ell": -1, "theta": 0}]"#).unwrap_err();
        assert!(err.to_string().contains("entry 1"), "{err}");
        let err = parse_clspectrum(r#"[{"ell": 1, "theta": 7}]"#).unwrap_err();
        assert!(err.to_string().contains("entry 0"), "{err}");
        let err = parse_clspectrum(r#"[{"ell": 1}]"#).unwrap_err();
        assert!(err.to_string().contains("theta"), "{err}");
        assert!(parse_clspectrum("[1, 2").is_err());
        assert!(parse_clspectrum(r#"{"entries": [], "extra": 1}"#).is_err());
    }

    fn sample_file() -> SpectrumFile {
        let cfg = ScrewConfig::new(SpaceForm::Flat, 1.0).unwrap();
        let budget = EnumerationBudget::new(14.0).unwrap().with_m_max(4).unwrap();
        let cls = CLSpectrum { entries: vec![ComplexLength::new(2.0 * PI, 0.0).unwrap()], name: None };
        let es = full_spectrum(&cls, &cfg, &budget).unwrap();
        SpectrumFile::new(SpectrumMetadata::new(SpaceForm::Flat, 1.0, &budget), &es)
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let f = sample_file();
        assert!(f.rows.iter().any(|r| r.source == Source::HelixType));
        let text = write_spectrum_csv(&f);
        assert!(text.starts_with("# k=0\n# lambda=1.0\n# cutoff=14.0\n# m_max=4\n# rational_tol=1e-9\n"));
        assert!(text.contains("\nlength,source,ell,theta,q,p,n,m,r,c,mu,kappa,tau\n"));
        let back = parse_spectrum_csv(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(write_spectrum_csv(&back), text);
        assert_eq!(parse_spectrum_auto(&text).unwrap(), f);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let f = sample_file();
        let text = write_spectrum_json(&f);
        let back = parse_spectrum_json(&text).unwrap();
        assert_eq!(back, f);
        assert_eq!(write_spectrum_json(&back), text);
        assert_eq!(parse_spectrum_auto(&text).unwrap(), f);
        assert_eq!(back.entries().unwrap(), f.entries().unwrap());
    }

    #[test]
    fn csv_rejects_malformed_rows() {
        let header = "length,source,ell,theta,q,p,n,m,r,c,mu,kappa,tau\n";
        assert!(parse_spectrum_csv("a,b\n").is_err());
        let bad_source = format!("{header}1.0,square,,,,,1,2,1.0,,,,\n");
        assert!(parse_spectrum_csv(&bad_source).unwrap_err().to_string().contains("row 0"));
        let missing = format!("{header}1.0,circle,,,,,1,,1.0,,,,\n");
        assert!(parse_spectrum_csv(&missing).is_err());
        let extra = format!("{header}1.0,circle,1.0,,,,1,2,1.0,,,,\n");
        assert!(parse_spectrum_csv(&extra).is_err());
        let ok = format!("{header}1.0,circle,,,,,1,2,1.0,,,,\n");
        assert_eq!(parse_spectrum_csv(&ok).unwrap().rows.len(), 1);
        assert!(parse_spectrum_csv(&format!("# k=zero\n{header}")).is_err());
    }

    #[test]
    fn model_spectrum_csv_has_one_row_per_length() {
        let cfg = ScrewConfig::new(SpaceForm::Flat, 1.0).unwrap();
        let budget = EnumerationBudget::new(20.0).unwrap();
        let es = model_spectrum(&cfg, &budget).unwrap();
        let text = write_spectrum_csv(&SpectrumFile::new(SpectrumMetadata::new(SpaceForm::Flat, 1.0, &budget), &es));
        let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        assert_eq!(body.len(), 5);
        assert!(body[0].starts_with("1.0882796185405306e1,circle,,,,,1,2,"));
    }

    #[test]
    fn trajectory_csv_layout() {
        let g = GroupElement::identity(SpaceForm::Flat);
        let text = write_trajectory_csv(&[(0.0, g), (0.5, g)]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(lines[0].split(',').count(), 17);
        assert_eq!(lines[1].split(',').count(), 17);
        let json: Value = serde_json::from_str(&write_trajectory_json(&[(0.0, g)])).unwrap();
        assert_eq!(json[0]["matrix"].as_array().unwrap().len(), 16);
    }
}
