//! Classification reports.
//!
//! A report carries the chosen subset and its periodicity certificate, so
//! that a reader can re-check the verdict without repeating the search.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lcl::{LclProblem, VertexConfig};
use crate::path::{find_ell_full_set, is_ell_full, minimal_ell, PeriodicityCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "IN LOCAL(O(log n)) = BAIRE")]
    In,
    #[serde(rename = "NOT in LOCAL(O(log n))")]
    Not,
    #[serde(rename = "INCONCLUSIVE")]
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::In => "IN LOCAL(O(log n)) = BAIRE",
            Verdict::Not => "NOT in LOCAL(O(log n))",
            Verdict::Inconclusive => "INCONCLUSIVE (search budget exhausted)",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub delta: usize,
    pub labels: Vec<String>,
    pub verdict: Verdict,
    /// The ℓ-full subset, one label-name list per configuration.
    pub subset: Option<Vec<Vec<String>>>,
    pub minimal_ell: Option<usize>,
    /// Certificate of the found subset, or of the full configuration set
    /// when none was found.
    pub certificate: Option<PeriodicityCertificate>,
    pub exhaustive: bool,
    pub subsets_examined: u64,
    pub budget: u64,
}

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("report syntax: {0}")]
    Syntax(#[from] serde_json::Error),
    #[error("report does not match the problem: {0}")]
    Mismatch(String),
}

pub fn classify(problem: &LclProblem, budget: u64) -> ClassificationReport {
    let outcome = find_ell_full_set(problem, budget);
    let verdict = if outcome.found.is_some() {
        Verdict::In
    } else if outcome.exhaustive {
        Verdict::Not
    } else {
        Verdict::Inconclusive
    };
    let certificate = outcome
        .found
        .as_ref()
        .map(|f| f.certificate)
        .or(outcome.full_certificate);
    ClassificationReport {
        delta: problem.delta(),
        labels: problem.label_names().to_vec(),
        verdict,
        subset: outcome
            .found
            .as_ref()
            .map(|f| f.subset.iter().map(|c| problem.config_to_names(c)).collect()),
        minimal_ell: outcome.found.as_ref().map(|f| f.ell),
        certificate,
        exhaustive: outcome.exhaustive,
        subsets_examined: outcome.subsets_examined,
        budget,
    }
}

impl ClassificationReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        Ok(serde_json::from_str(text)?)
    }

    /// The subset as configurations of `problem`.
    pub fn subset_configs(&self, problem: &LclProblem) -> Result<Option<Vec<VertexConfig>>, ReportError> {
        self.subset
            .as_ref()
            .map(|s| {
                s.iter()
                    .map(|names| {
                        problem
                            .config_from_names(names)
                            .map_err(|e| ReportError::Mismatch(e.to_string()))
                    })
                    .collect()
            })
            .transpose()
    }

    /// Re-checks a positive verdict: the subset is ℓ-full for the reported
    /// ℓ and not for ℓ − 1.
    pub fn recheck(&self, problem: &LclProblem) -> Result<bool, ReportError> {
        let (Some(subset), Some(ell)) = (self.subset_configs(problem)?, self.minimal_ell) else {
            return Ok(self.verdict != Verdict::In);
        };
        let full = is_ell_full(problem, &subset, ell).map_err(|e| ReportError::Mismatch(e.to_string()))?;
        let min = minimal_ell(problem, &subset).map_err(|e| ReportError::Mismatch(e.to_string()))?;
        Ok(full && min == Some(ell))
    }

    pub fn render_human(&self) -> String {
        let mut out = format!("verdict: {}\n", self.verdict);
        if let Some(subset) = &self.subset {
            let configs: Vec<String> = subset.iter().map(|c| c.join(" ")).collect();
            out += &format!("subset: {{{}}}\n", configs.join(", "));
        }
        if let Some(ell) = self.minimal_ell {
            out += &format!("minimal ell: {ell}\n");
        }
        if let Some(c) = self.certificate {
            out += &format!("periodicity: K = {}, P = {}\n", c.index, c.period);
        }
        out += &format!(
            "exhaustive: {} ({} of budget {} subsets examined)\n",
            self.exhaustive, self.subsets_examined, self.budget
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn fixture_verdicts() {
        let r = classify(&fixtures::three_coloring(), 1000);
        assert_eq!(r.verdict, Verdict::In);
        assert_eq!(r.minimal_ell, Some(3));
        assert_eq!(r.subset.as_ref().unwrap().len(), 3);

        let r = classify(&fixtures::two_coloring(), 1000);
        assert_eq!(r.verdict, Verdict::Not);
        assert!(r.exhaustive);
        assert_eq!(r.certificate.unwrap().period, 2);

        let r = classify(&fixtures::perfect_matching(), 1000);
        assert_eq!(r.verdict, Verdict::In);
        assert_eq!(r.minimal_ell, Some(4));
    }

    #[test]
    fn round_trip_and_recheck() {
        let p = fixtures::perfect_matching();
        let r = classify(&p, 1000);
        let back = ClassificationReport::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(back.recheck(&p).unwrap());
        let mut forged = back;
        forged.minimal_ell = Some(3);
        assert!(!forged.recheck(&p).unwrap());
    }

    #[test]
    fn verdict_strings() {
        let json = serde_json::to_string(&Verdict::In).unwrap();
        assert_eq!(json, "\"IN LOCAL(O(log n)) = BAIRE\"");
        assert_eq!(Verdict::Not.to_string(), "NOT in LOCAL(O(log n))");
    }

    #[test]
    fn budget_exhaustion_is_inconclusive() {
        let r = classify(&fixtures::two_coloring(), 1);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!(!r.exhaustive);
    }
}
