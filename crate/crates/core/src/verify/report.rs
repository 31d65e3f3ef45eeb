//! Measurement records: one report per estimate instance, serializable to
//! JSON and CSV with a stable field order.

use serde::Serialize;

use crate::fields::domain::Grid;

#[derive(Clone, Debug, Serialize)]
pub struct Term {
    pub name: String,
    pub value: f64,
}

impl Term {
    pub fn new(name: impl Into<String>, value: f64) -> Self {
        Self {
            name: name.into(),
            value,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridMeta {
    pub n: usize,
    pub m: usize,
    pub h: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nt: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl GridMeta {
    pub fn of<G: Grid>(grid: &G) -> Self {
        Self {
            n: grid.space().n(),
            m: grid.space().m(),
            h: grid.space().h(),
            nt: grid.time_step().map(|_| grid.time_slices()),
            tau: grid.time_step(),
        }
    }

    pub fn describe(&self) -> String {
        match self.nt {
            Some(nt) => format!("{}^{}x{}", self.m, self.n, nt),
            None => format!("{}^{}", self.m, self.n),
        }
    }
}

/// Measured left/right sides and ratio for one estimate instance. A ratio of
/// zero with `degenerate = true` marks a 0/0 instance (never NaN).
#[derive(Clone, Debug, Serialize)]
pub struct EstimateReport {
    pub experiment: String,
    pub label: String,
    pub grid: GridMeta,
    pub refinement_level: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub points: usize,
    pub lhs: f64,
    pub rhs_terms: Vec<Term>,
    pub rhs: f64,
    pub ratio: f64,
    pub degenerate: bool,
    pub extra: Vec<Term>,
    pub inputs_hash: String,
}

impl EstimateReport {
    pub fn extra_value(&self, name: &str) -> Option<f64> {
        self.extra.iter().find(|t| t.name == name).map(|t| t.value)
    }

    /// CSV header matching `csv_row`.
    pub fn csv_header() -> &'static str {
        "experiment,label,grid,level,p,seed,points,lhs,rhs,ratio,degenerate,terms"
    }

    pub fn csv_row(&self) -> String {
        let mut terms: Vec<String> = self
            .rhs_terms
            .iter()
            .map(|t| format!("{}={}", t.name, t.value))
            .collect();
        terms.extend(self.extra.iter().map(|t| format!("{}={}", t.name, t.value)));
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            self.experiment,
            self.label,
            self.grid.describe(),
            self.refinement_level,
            self.p.map_or(String::from("-"), |p| p.to_string()),
            self.seed.map_or(String::from("-"), |s| s.to_string()),
            self.points,
            self.lhs,
            self.rhs,
            self.ratio,
            self.degenerate,
            terms.join(";")
        )
    }
}

/// `lhs / rhs` with the 0/0 (and exactly-zero denominator) case flagged
/// instead of propagating NaN or infinity.
pub fn ratio_or_flag(lhs: f64, rhs: f64) -> (f64, bool) {
    if rhs == 0.0 {
        (0.0, true)
    } else {
        (lhs / rhs, false)
    }
}

/// FNV-1a digest of the experiment inputs, stable across runs and platforms.
pub fn inputs_hash(parts: &[&str]) -> String {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in part.as_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
        h ^= 0x1f;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    format!("{h:016x}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_over_zero_is_flagged() {
        assert_eq!(ratio_or_flag(0.0, 0.0), (0.0, true));
        assert_eq!(ratio_or_flag(1.0, 2.0), (0.5, false));
    }

    #[test]
    fn hash_is_stable_and_injective_enough() {
        let a = inputs_hash(&["cz", "64", "1.5"]);
        let b = inputs_hash(&["cz", "64", "1.5"]);
        let c = inputs_hash(&["cz", "641", ".5"]);
        assert_eq!(a, b);
        assert_ne!(a, c, "separator keeps concatenations apart");
    }
}
