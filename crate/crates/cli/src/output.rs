//! File formats written by the CLI and readers for them.
//!
//! CSV numbers are written in scientific notation with 17 significant
//! digits and a `.` decimal separator; lines end in `\n`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use qubit_track::trajectory::EnsembleStats;
use qubit_track::{EntropyRow, Family, JumpingScheme, PureState, TrajectoryRecord};

pub const ENTROPY_HEADER: [&str; 8] = [
    "omega_over_gamma",
    "family",
    "mu_re",
    "mu_im",
    "p1",
    "p2",
    "entropy_bits",
    "pr_residual",
];

pub const TRAJECTORY_HEADER: [&str; 12] = [
    "trajectory_id",
    "t",
    "re_ce",
    "im_ce",
    "re_cg",
    "im_cg",
    "bloch_x",
    "bloch_y",
    "bloch_z",
    "active_mu_re",
    "active_mu_im",
    "jumps_so_far",
];

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("header mismatch in column {column}: expected {expected:?}, found {found:?}")]
    Header {
        column: usize,
        expected: &'static str,
        found: String,
    },
    #[error("unknown family {0:?}")]
    Family(String),
    #[error("non-finite value in row {0}")]
    NonFinite(usize),
}

/// 17 significant digits, locale-independent.
pub fn fmt_num(x: f64) -> String {
    // Adding +0.0 folds −0.0 into 0.0.
    format!("{:.16e}", x + 0.0)
}

fn writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(w: csv::Writer<Vec<u8>>) -> String {
    let bytes = w.into_inner().expect("in-memory csv writer cannot fail");
    String::from_utf8(bytes).expect("csv fields are ASCII")
}

pub fn entropy_csv(rows: &[EntropyRow]) -> String {
    let mut w = writer();
    w.write_record(ENTROPY_HEADER).expect("in-memory write");
    for r in rows {
        w.write_record([
            fmt_num(r.omega_over_gamma),
            r.family.name().to_string(),
            fmt_num(r.mu.re),
            fmt_num(r.mu.im),
            fmt_num(r.p1),
            fmt_num(r.p2),
            fmt_num(r.entropy_bits),
            fmt_num(r.pr_residual),
        ])
        .expect("in-memory write");
    }
    finish(w)
}

pub fn trajectory_csv(records: &[TrajectoryRecord]) -> String {
    let mut w = writer();
    w.write_record(TRAJECTORY_HEADER).expect("in-memory write");
    for (id, rec) in records.iter().enumerate() {
        for s in &rec.samples {
            w.write_record([
                id.to_string(),
                fmt_num(s.t),
                fmt_num(s.state.c_e.re),
                fmt_num(s.state.c_e.im),
                fmt_num(s.state.c_g.re),
                fmt_num(s.state.c_g.im),
                fmt_num(s.bloch.x),
                fmt_num(s.bloch.y),
                fmt_num(s.bloch.z),
                fmt_num(s.active_mu.re),
                fmt_num(s.active_mu.im),
                s.jumps_so_far.to_string(),
            ])
            .expect("in-memory write");
        }
    }
    finish(w)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct EntropyCsvRow {
    pub omega_over_gamma: f64,
    pub family: String,
    pub mu_re: f64,
    pub mu_im: f64,
    pub p1: f64,
    pub p2: f64,
    pub entropy_bits: f64,
    pub pr_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct TrajectoryCsvRow {
    pub trajectory_id: u64,
    pub t: f64,
    pub re_ce: f64,
    pub im_ce: f64,
    pub re_cg: f64,
    pub im_cg: f64,
    pub bloch_x: f64,
    pub bloch_y: f64,
    pub bloch_z: f64,
    pub active_mu_re: f64,
    pub active_mu_im: f64,
    pub jumps_so_far: u64,
}

fn check_header(found: &csv::StringRecord, expected: &[&'static str]) -> Result<(), FormatError> {
    for (column, exp) in expected.iter().enumerate() {
        let got = found.get(column).unwrap_or("");
        if got != *exp {
            return Err(FormatError::Header {
                column,
                expected: exp,
                found: got.to_string(),
            });
        }
    }
    if found.len() > expected.len() {
        return Err(FormatError::Header {
            column: expected.len(),
            expected: "<end of header>",
            found: found[expected.len()].to_string(),
        });
    }
    Ok(())
}

fn read_rows<T: serde::de::DeserializeOwned>(
    text: &[u8],
    header: &[&'static str],
) -> Result<Vec<T>, FormatError> {
    let mut rdr = csv::ReaderBuilder::new().from_reader(text);
    check_header(rdr.headers()?, header)?;
    rdr.deserialize()
        .map(|r| r.map_err(FormatError::from))
        .collect()
}

/// Reads an `entropy-curve` CSV, validating header, family names, and
/// finiteness.
pub fn read_entropy_csv(text: &[u8]) -> Result<Vec<EntropyCsvRow>, FormatError> {
    let rows: Vec<EntropyCsvRow> = read_rows(text, &ENTROPY_HEADER)?;
    for (i, r) in rows.iter().enumerate() {
        if Family::from_name(&r.family).is_none() {
            return Err(FormatError::Family(r.family.clone()));
        }
        let nums = [
            r.omega_over_gamma,
            r.mu_re,
            r.mu_im,
            r.p1,
            r.p2,
            r.entropy_bits,
            r.pr_residual,
        ];
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(FormatError::NonFinite(i));
        }
    }
    Ok(rows)
}

/// Reads a `simulate` trajectory CSV, validating header and finiteness.
pub fn read_trajectory_csv(text: &[u8]) -> Result<Vec<TrajectoryCsvRow>, FormatError> {
    let rows: Vec<TrajectoryCsvRow> = read_rows(text, &TRAJECTORY_HEADER)?;
    for (i, r) in rows.iter().enumerate() {
        let nums = [
            r.t,
            r.re_ce,
            r.im_ce,
            r.re_cg,
            r.im_cg,
            r.bloch_x,
            r.bloch_y,
            r.bloch_z,
            r.active_mu_re,
            r.active_mu_im,
        ];
        if nums.iter().any(|x| !x.is_finite()) {
            return Err(FormatError::NonFinite(i));
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateJson {
    pub re_ce: f64,
    pub im_ce: f64,
    pub re_cg: f64,
    pub im_cg: f64,
}

impl From<&PureState> for StateJson {
    fn from(s: &PureState) -> Self {
        Self {
            re_ce: s.c_e.re,
            im_ce: s.c_e.im,
            re_cg: s.c_g.re,
            im_cg: s.c_g.im,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeJson {
    pub family: String,
    pub mu_re: f64,
    pub mu_im: f64,
    /// Eigenstate labels `(s1, s2)` of `ψ₁` under `+μ` and `ψ₂` under `−μ`.
    pub pair: String,
    pub psi1: StateJson,
    pub psi2: StateJson,
    pub p1: f64,
    pub p2: f64,
    pub entropy_bits: f64,
    pub pr_residual: f64,
}

impl From<&JumpingScheme> for SchemeJson {
    fn from(s: &JumpingScheme) -> Self {
        Self {
            family: s.family().name().to_string(),
            mu_re: s.mu.mu.re,
            mu_im: s.mu.mu.im,
            pair: format!("{}{}", s.pair.s1.symbol(), s.pair.s2.symbol()),
            psi1: (&s.pair.psi1).into(),
            psi2: (&s.pair.psi2).into(),
            p1: s.p1,
            p2: s.p2,
            entropy_bits: s.entropy_bits,
            pr_residual: s.pr_residual,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveJson {
    pub gamma: f64,
    pub omega: f64,
    pub schemes: Vec<SchemeJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub times: Vec<f64>,
    /// Row-major `[[re, im]; 4]` per time.
    pub mean_rho: Vec<[[f64; 2]; 4]>,
    pub occupancy: Option<[f64; 2]>,
    pub jump_count_mean: f64,
    pub n_trajectories: usize,
    pub dark_terminations: usize,
}

impl From<&EnsembleStats> for EnsembleJson {
    fn from(s: &EnsembleStats) -> Self {
        Self {
            times: s.times.clone(),
            mean_rho: s
                .mean_rho
                .iter()
                .map(|r| {
                    let m = r.operator().m;
                    [m[0][0], m[0][1], m[1][0], m[1][1]].map(|z| [z.re, z.im])
                })
                .collect(),
            occupancy: s.occupancy,
            jump_count_mean: s.jump_count_mean,
            n_trajectories: s.n_trajectories,
            dark_terminations: s.dark_terminations,
        }
    }
}

pub fn scheme_table(schemes: &[JumpingScheme]) -> String {
    let mut out = format!(
        "{:<16} {:>24} {:>5} {:>14} {:>14} {:>14} {:>10}\n",
        "family", "mu", "pair", "p1", "p2", "entropy_bits", "residual"
    );
    for s in schemes {
        let mu = format!("{:+.10}{:+.10}i", s.mu.mu.re, s.mu.mu.im);
        out.push_str(&format!(
            "{:<16} {:>24} {:>5} {:>14.10} {:>14.10} {:>14.10} {:>10.2e}\n",
            s.family().name(),
            mu,
            format!("{}{}", s.pair.s1.symbol(), s.pair.s2.symbol()),
            s.p1,
            s.p2,
            s.entropy_bits,
            s.pr_residual
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use qubit_track::{entropy_curve, find_schemes, SystemParams};

    #[test]
    fn number_format_has_17_digits() {
        assert_eq!(fmt_num(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_num(-0.25), "-2.5000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn entropy_csv_round_trips() {
        let grid = [0.1, 0.2, 0.3];
        let rows = entropy_curve(1.0, &grid, None).unwrap();
        let text = entropy_csv(&rows);
        assert!(text.starts_with(&(ENTROPY_HEADER.join(",") + "\n")));
        assert!(!text.contains('\r'));
        let back = read_entropy_csv(text.as_bytes()).unwrap();
        assert_eq!(back.len(), rows.len());
        for (a, b) in rows.iter().zip(&back) {
            assert_eq!(a.family.name(), b.family);
            assert_eq!(a.entropy_bits, b.entropy_bits);
            assert_eq!(a.mu.im, b.mu_im);
        }
    }

    #[test]
    fn header_mismatch_names_column() {
        let bad = "omega_over_gamma,fam,mu_re,mu_im,p1,p2,entropy_bits,pr_residual\n";
        match read_entropy_csv(bad.as_bytes()) {
            Err(FormatError::Header { column, .. }) => assert_eq!(column, 1),
            other => panic!("{other:?}"),
        }
        let empty = TRAJECTORY_HEADER.join(",") + "\n";
        assert!(read_trajectory_csv(empty.as_bytes()).unwrap().is_empty());
        assert!(read_trajectory_csv(b"").is_err());
    }

    #[test]
    fn unknown_family_rejected() {
        let text = ENTROPY_HEADER.join(",") + "\n0.1,bogus,0,0,0.5,0.5,1,0\n";
        assert!(matches!(
            read_entropy_csv(text.as_bytes()),
            Err(FormatError::Family(_))
        ));
    }

    #[test]
    fn scheme_json_fields() {
        let s = find_schemes(&SystemParams::new(1.0, 1.0).unwrap()).unwrap();
        let j = serde_json::to_value(SchemeJson::from(&s[0])).unwrap();
        for key in [
            "family",
            "mu_re",
            "mu_im",
            "psi1",
            "psi2",
            "p1",
            "p2",
            "entropy_bits",
            "pr_residual",
        ] {
            assert!(j.get(key).is_some(), "{key}");
        }
        assert_eq!(j["pair"], "-+");
        let table = scheme_table(&s);
        assert!(table.lines().nth(1).unwrap().starts_with("real"));
    }
}
