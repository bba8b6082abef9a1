//! Serializable result records and their CSV / JSON encodings.
//!
//! Schemas are fixed here. CSV headers are stable byte-for-byte, floats are
//! written in their shortest round-trip form, lines end with LF, and every
//! report round-trips through JSON without loss (undefined audit values are
//! `null` in JSON and `NaN` in CSV).

use serde::{Deserialize, Serialize};

use crate::model::SpectralLevel;
use crate::param_map::{AuditReport, LevelMapRow};
use crate::spectrum::CompareRow;

pub const SPECTRUM_HEADER: &str = "n,k,E";
pub const PARAMS_HEADER: &str = "n,k,m1,phi,m0,m3";
pub const FIGURE1_HEADER: &str = "sweep_value,E1,E2,E3";
pub const COMPARE_HEADER: &str = "n,k_eq62,k_dirichlet,diff";
pub const AUDIT_HEADER: &str = "eq,lhs,rhs,residual";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub levels: Vec<SpectralLevel>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamsReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub rows: Vec<LevelMapRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub rows: Vec<CompareRow>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub e1: f64,
    pub e2: f64,
    pub e3: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Which coupling is swept: "a" or "b".
    pub variable: String,
    /// Held-fixed base values (the swept one is overridden per row).
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub mass: f64,
    pub start: f64,
    pub stop: f64,
    pub steps: u32,
    pub rows: Vec<SweepRow>,
}

fn fmt(x: f64) -> String {
    format!("{x}")
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt(v),
        None => "NaN".to_string(),
    }
}

pub fn spectrum_csv(r: &SpectrumReport) -> String {
    let mut out = String::from(SPECTRUM_HEADER);
    for lv in &r.levels {
        out.push('\n');
        out.push_str(&format!("{},{},{}", lv.n, fmt(lv.k), fmt(lv.energy)));
    }
    out.push('\n');
    out
}

pub fn params_csv(r: &ParamsReport) -> String {
    let mut out = String::from(PARAMS_HEADER);
    for row in &r.rows {
        out.push('\n');
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            row.n,
            fmt(row.k),
            fmt(row.m1),
            fmt(row.phi),
            fmt(row.m0),
            fmt(row.m3)
        ));
    }
    out.push('\n');
    out
}

pub fn compare_csv(r: &CompareReport) -> String {
    let mut out = String::from(COMPARE_HEADER);
    for row in &r.rows {
        out.push('\n');
        out.push_str(&format!(
            "{},{},{},{}",
            row.n,
            fmt(row.k_quantization),
            fmt(row.k_dirichlet),
            fmt(row.diff)
        ));
    }
    out.push('\n');
    out
}

pub fn sweep_csv(r: &SweepReport) -> String {
    let mut out = String::from(FIGURE1_HEADER);
    for row in &r.rows {
        out.push('\n');
        out.push_str(&format!(
            "{},{},{},{}",
            fmt(row.value),
            fmt(row.e1),
            fmt(row.e2),
            fmt(row.e3)
        ));
    }
    out.push('\n');
    out
}

pub fn audit_csv(r: &AuditReport) -> String {
    let mut out = String::from(AUDIT_HEADER);
    for rec in &r.records {
        out.push('\n');
        out.push_str(&format!(
            "{},{},{},{}",
            rec.eq,
            fmt_opt(rec.lhs),
            fmt_opt(rec.rhs),
            fmt_opt(rec.residual)
        ));
    }
    out.push('\n');
    out
}

pub fn to_json<T: Serialize>(report: &T) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports serialize without error");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_floats_round_trip_in_shortest_form() {
        let r = SpectrumReport {
            a: 0.0,
            b: 0.0,
            c: 1.0,
            mass: 0.5,
            levels: vec![SpectralLevel {
                n: 1,
                k: std::f64::consts::FRAC_PI_2,
                energy: std::f64::consts::FRAC_PI_2 * std::f64::consts::FRAC_PI_2,
            }],
        };
        let csv = spectrum_csv(&r);
        assert_eq!(csv, "n,k,E\n1,1.5707963267948966,2.4674011002723395\n");
    }

    #[test]
    fn json_round_trips() {
        let r = SpectrumReport {
            a: 1.0,
            b: -0.5,
            c: 2.5,
            mass: 0.5,
            levels: vec![SpectralLevel {
                n: 1,
                k: 0.3882215651495762,
                energy: 0.15071598364718664,
            }],
        };
        let back: SpectrumReport = serde_json::from_str(&to_json(&r)).unwrap();
        assert_eq!(back, r);
    }
}
