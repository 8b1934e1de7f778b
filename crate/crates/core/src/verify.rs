//! The consistency suites run by `qcurve verify`.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::config::Tolerances;
use crate::corpus::{builtin_curves, builtin_scenarios};
use crate::curve::{Curve, CurveDocument};
use crate::error::Result;
use crate::homotopy::{measure_jump, Scenario};
use crate::invariants::{analyze, standard_iq, standard_j_plus, InvariantReport, MATCH_TOLERANCE};

/// Curves and scenarios to verify.
#[derive(Clone, Debug, Default)]
pub struct Corpus {
    pub curves: Vec<CurveDocument>,
    pub scenarios: Vec<Scenario>,
}

impl Corpus {
    pub fn builtin() -> Self {
        Corpus {
            curves: builtin_curves(),
            scenarios: builtin_scenarios(),
        }
    }

    /// Reads `dir/curves/*.json` and `dir/scenarios/*.json`. Without those
    /// subdirectories, every `*.json` in `dir` is read, as a scenario if it
    /// has a `family` field and as a curve otherwise.
    pub fn load(dir: &Path) -> Result<Self> {
        let mut corpus = Corpus::default();
        let curves = dir.join("curves");
        let scenarios = dir.join("scenarios");
        if curves.is_dir() || scenarios.is_dir() {
            for path in json_files(&curves)? {
                corpus.curves.push(read_document(&path)?);
            }
            for path in json_files(&scenarios)? {
                corpus.scenarios.push(Scenario::from_json(&fs::read_to_string(path)?)?);
            }
        } else {
            for path in json_files(dir)? {
                let text = fs::read_to_string(&path)?;
                let value: serde_json::Value = serde_json::from_str(&text)?;
                if value.get("family").is_some() {
                    corpus.scenarios.push(serde_json::from_value(value)?);
                } else {
                    corpus.curves.push(named(serde_json::from_value(value)?, &path));
                }
            }
        }
        Ok(corpus)
    }
}

fn json_files(dir: &Path) -> Result<Vec<PathBuf>> {
    if !dir.is_dir() {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.extension().is_some_and(|e| e == "json") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn named(mut doc: CurveDocument, path: &Path) -> CurveDocument {
    if doc.name.is_none() {
        doc.name = path.file_stem().map(|s| s.to_string_lossy().into_owned());
    }
    doc
}

/// Parses a curve file, keeping its metadata and validating the geometry.
pub fn read_document(path: &Path) -> Result<CurveDocument> {
    let doc: CurveDocument = serde_json::from_str(&fs::read_to_string(path)?)?;
    Curve::try_from(doc.clone())?;
    Ok(named(doc, path))
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub suite: String,
    pub passed: bool,
    pub cases: usize,
    pub failures: Vec<String>,
    pub max_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifySummary {
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.passed)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.suite == name)
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<14} {:<6} {:>6} {:>12}", "suite", "status", "cases", "max error")?;
        for s in &self.suites {
            writeln!(
                f,
                "{:<14} {:<6} {:>6} {:>12.3e}",
                s.suite,
                if s.passed { "pass" } else { "FAIL" },
                s.cases,
                s.max_error
            )?;
            for failure in &s.failures {
                writeln!(f, "    {failure}")?;
            }
        }
        Ok(())
    }
}

#[derive(Default)]
struct Tally {
    cases: usize,
    failures: Vec<String>,
    max_error: f64,
}

impl Tally {
    fn record(&mut self, name: &str, ok: bool, error: f64, detail: impl FnOnce() -> String) {
        self.cases += 1;
        if error.is_finite() {
            self.max_error = self.max_error.max(error);
        }
        if !ok {
            self.failures.push(format!("{name}: {}", detail()));
        }
    }

    fn finish(self, suite: &str) -> SuiteResult {
        SuiteResult {
            suite: suite.into(),
            passed: self.failures.is_empty(),
            cases: self.cases,
            failures: self.failures,
            max_error: self.max_error,
        }
    }
}

/// Runs the Umlaufsatz, oracle, orientation, `J⁺`, Viro, standard-curve, and
/// scenario suites over the corpus.
pub fn verify(corpus: &Corpus, tol: &Tolerances) -> VerifySummary {
    let reports: Vec<(String, Option<i64>, Result<InvariantReport>)> = corpus
        .curves
        .par_iter()
        .map(|doc| {
            let name = doc.name.clone().unwrap_or_else(|| "unnamed".into());
            let report = Curve::try_from(doc.clone()).and_then(|c| analyze(&c, tol, &[]));
            (name, doc.standard_index, report)
        })
        .collect();

    let mut umlaufsatz = Tally::default();
    let mut oracle = Tally::default();
    let mut orientation = Tally::default();
    let mut j_plus = Tally::default();
    let mut viro = Tally::default();
    let mut golden = Tally::default();
    for (name, standard, report) in &reports {
        let r = match report {
            Ok(r) => r,
            Err(e) => {
                for t in [&mut umlaufsatz, &mut oracle, &mut orientation, &mut j_plus, &mut viro] {
                    t.record(name, false, f64::NAN, || e.to_string());
                }
                continue;
            }
        };
        let d = &r.discrepancies;
        umlaufsatz.record(name, r.checks.umlaufsatz, d.umlaufsatz, || {
            format!("|I_1 - rot| = {:.3e}", d.umlaufsatz)
        });
        oracle.record(name, r.checks.oracle_match, d.oracle, || {
            format!("numeric vs combinatorial gap {:.3e}", d.oracle)
        });
        orientation.record(name, r.checks.orientation, d.orientation, || {
            format!("reversal rule violated (numeric gap {:.3e})", d.orientation)
        });
        let j_gap = (d.j_plus_integral_raw - r.j_plus as f64).abs();
        j_plus.record(name, r.checks.j_plus_routes, j_gap, || {
            format!("integral {} vs combinatorial {}", d.j_plus_integral_raw, r.j_plus)
        });
        viro.record(name, r.checks.viro_integral, 0.0, || format!("P = {}", r.p_gamma));
        if let Some(i) = *standard {
            let expected = standard_iq(i);
            let exact = r.iq_combinatorial == expected && r.j_plus == standard_j_plus(i);
            let gap = r.iq_numeric.max_coefficient_distance(&expected);
            golden.record(name, exact && gap < MATCH_TOLERANCE, gap, || {
                format!(
                    "K_{i}: I_q = {} (expected {expected}), J+ = {} (expected {})",
                    r.iq_combinatorial,
                    r.j_plus,
                    standard_j_plus(i)
                )
            });
        }
    }

    let jumps: Vec<_> = corpus
        .scenarios
        .par_iter()
        .map(|s| (s.name.clone(), measure_jump(s, tol)))
        .collect();
    let mut scenarios = Tally::default();
    for (name, jump) in &jumps {
        match jump {
            Ok(j) => scenarios.record(name, j.passed(), j.numeric_error.max(j.max_error), || {
                format!(
                    "measured {} vs predicted {}, numeric gap {:.3e}, J+ jump {} (expected {})",
                    j.measured, j.predicted, j.numeric_error, j.delta_j_plus, j.expected_delta_j_plus
                )
            }),
            Err(e) => scenarios.record(name, false, f64::NAN, || e.to_string()),
        }
    }

    VerifySummary {
        suites: vec![
            umlaufsatz.finish("umlaufsatz"),
            oracle.finish("oracle"),
            orientation.finish("orientation"),
            j_plus.finish("j_plus"),
            viro.finish("viro"),
            golden.finish("standard"),
            scenarios.finish("scenarios"),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_corpus_passes() {
        let summary = verify(&Corpus::builtin(), &Tolerances::default());
        assert!(summary.passed(), "{summary}");
        assert_eq!(summary.suite("standard").unwrap().cases, 7);
        assert!(summary.to_string().contains("scenarios"));
    }

    #[test]
    fn corrupted_golden_value_is_caught() {
        let mut corpus = Corpus::builtin();
        corpus.scenarios.clear();
        let k2 = corpus
            .curves
            .iter_mut()
            .find(|d| d.standard_index == Some(2))
            .unwrap();
        // claim the curve realizes K_3
        k2.standard_index = Some(3);
        let summary = verify(&corpus, &Tolerances::default());
        let golden = summary.suite("standard").unwrap();
        assert!(!golden.passed);
        assert_eq!(golden.failures.len(), 1);
        assert!(summary.suite("oracle").unwrap().passed);
    }

    #[test]
    fn loads_flat_and_structured_directories() {
        let dir = tempfile::tempdir().unwrap();
        crate::corpus::export(dir.path()).unwrap();
        let structured = Corpus::load(dir.path()).unwrap();
        assert_eq!(structured.curves.len(), builtin_curves().len());
        assert_eq!(structured.scenarios.len(), builtin_scenarios().len());

        let flat = tempfile::tempdir().unwrap();
        for sub in ["curves", "scenarios"] {
            for e in fs::read_dir(dir.path().join(sub)).unwrap() {
                let p = e.unwrap().path();
                fs::copy(&p, flat.path().join(p.file_name().unwrap())).unwrap();
            }
        }
        let loaded = Corpus::load(flat.path()).unwrap();
        assert_eq!(loaded.curves.len(), structured.curves.len());
        assert_eq!(loaded.scenarios.len(), structured.scenarios.len());
    }
}
