use serde::Serialize;

use crate::config::Format;
use crate::{CliError, CliResult};

/// How a check's measured value is compared with its target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rule {
    /// `|measured - target| <= tolerance`
    Within,
    /// `measured < target`
    Below,
    /// `measured > target`
    Above,
    /// Reported only.
    Info,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub measured: Option<f64>,
    pub target: Option<f64>,
    pub tolerance: Option<f64>,
    pub rule: Rule,
    pub status: Status,
}

impl Check {
    pub fn within(name: impl Into<String>, measured: f64, target: f64, tolerance: f64) -> Self {
        let ok = (measured - target).abs() <= tolerance;
        Self::build(name, Some(measured), Some(target), Some(tolerance), Rule::Within, ok)
    }

    pub fn below(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::build(name, Some(measured), Some(bound), None, Rule::Below, measured < bound)
    }

    pub fn above(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self::build(name, Some(measured), Some(bound), None, Rule::Above, measured > bound)
    }

    pub fn info(name: impl Into<String>, measured: f64, target: Option<f64>) -> Self {
        Self {
            check: name.into(),
            measured: Some(measured),
            target,
            tolerance: None,
            rule: Rule::Info,
            status: Status::Info,
        }
    }

    /// A check that could not be evaluated.
    pub fn failed(name: impl Into<String>, reason: &str) -> Self {
        Self::build(format!("{} ({reason})", name.into()), None, None, None, Rule::Within, false)
    }

    fn build(
        name: impl Into<String>,
        measured: Option<f64>,
        target: Option<f64>,
        tolerance: Option<f64>,
        rule: Rule,
        ok: bool,
    ) -> Self {
        Self {
            check: name.into(),
            measured,
            target,
            tolerance,
            rule,
            status: if ok { Status::Pass } else { Status::Fail },
        }
    }

    /// Re-evaluate an absolute-deviation check with another tolerance.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        if let (Rule::Within, Some(m), Some(t)) = (self.rule, self.measured, self.target) {
            self.tolerance = Some(tol);
            self.status = if (m - t).abs() <= tol { Status::Pass } else { Status::Fail };
        }
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub command: &'static str,
    pub suite: &'static str,
    pub seed: u64,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn new(suite: &'static str, seed: u64, checks: Vec<Check>) -> Self {
        let pass = checks.iter().all(|c| c.status != Status::Fail);
        Self { command: "verify", suite, seed, pass, checks }
    }

    pub fn failed_names(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| c.status == Status::Fail).map(|c| c.check.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmplitudeRow {
    pub n: i64,
    pub re: f64,
    pub im: f64,
    pub abs2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossCheck {
    pub max_abs_diff: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropagateDoc {
    pub command: &'static str,
    pub engine: &'static str,
    pub z: f64,
    pub theta: f64,
    pub n_window: usize,
    pub norm: f64,
    pub edge_warning: bool,
    pub cross_check: Option<CrossCheck>,
    pub rows: Vec<AmplitudeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoherentDoc {
    pub command: &'static str,
    pub r: f64,
    pub theta: f64,
    pub n_window: usize,
    pub norm: f64,
    pub rows: Vec<AmplitudeRow>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Label {
    pub r: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OverlapDoc {
    pub command: &'static str,
    pub alpha: Label,
    pub alpha_prime: Label,
    pub n_window: usize,
    pub closed: f64,
    pub series_re: f64,
    pub series_im: f64,
    pub diff: f64,
}

pub enum Document {
    Propagate(PropagateDoc),
    Coherent(CoherentDoc),
    Overlap(OverlapDoc),
    Verify(VerifyReport),
}

pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

fn lower<T: Serialize>(v: &T) -> String {
    serde_json::to_value(v).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default()
}

impl Document {
    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match format {
            Format::Json => {
                let mut out = match self {
                    Document::Propagate(d) => serde_json::to_vec_pretty(d),
                    Document::Coherent(d) => serde_json::to_vec_pretty(d),
                    Document::Overlap(d) => serde_json::to_vec_pretty(d),
                    Document::Verify(d) => serde_json::to_vec_pretty(d),
                }
                .map_err(|e| CliError::Usage(format!("json encoding failed: {e}")))?;
                out.push(b'\n');
                Ok(out)
            }
            Format::Csv => self.csv().map_err(|e| CliError::Usage(format!("csv encoding failed: {e}"))),
        }
    }

    fn csv(&self) -> Result<Vec<u8>, Box<dyn std::error::Error>> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
        match self {
            Document::Propagate(d) => {
                w.write_record(["engine", "z", "theta", "n", "re", "im", "abs2", "norm"])?;
                for r in &d.rows {
                    w.write_record([
                        d.engine.to_string(),
                        fmt_f64(d.z),
                        fmt_f64(d.theta),
                        r.n.to_string(),
                        fmt_f64(r.re),
                        fmt_f64(r.im),
                        fmt_f64(r.abs2),
                        fmt_f64(d.norm),
                    ])?;
                }
            }
            Document::Coherent(d) => {
                w.write_record(["r", "theta", "n", "re", "im", "abs2", "norm"])?;
                for r in &d.rows {
                    w.write_record([
                        fmt_f64(d.r),
                        fmt_f64(d.theta),
                        r.n.to_string(),
                        fmt_f64(r.re),
                        fmt_f64(r.im),
                        fmt_f64(r.abs2),
                        fmt_f64(d.norm),
                    ])?;
                }
            }
            Document::Overlap(d) => {
                w.write_record([
                    "r",
                    "theta",
                    "r_prime",
                    "theta_prime",
                    "n_window",
                    "closed",
                    "series_re",
                    "series_im",
                    "diff",
                ])?;
                w.write_record([
                    fmt_f64(d.alpha.r),
                    fmt_f64(d.alpha.theta),
                    fmt_f64(d.alpha_prime.r),
                    fmt_f64(d.alpha_prime.theta),
                    d.n_window.to_string(),
                    fmt_f64(d.closed),
                    fmt_f64(d.series_re),
                    fmt_f64(d.series_im),
                    fmt_f64(d.diff),
                ])?;
            }
            Document::Verify(d) => {
                w.write_record(["suite", "check", "measured", "target", "tolerance", "rule", "status"])?;
                for c in &d.checks {
                    w.write_record([
                        d.suite.to_string(),
                        c.check.clone(),
                        fmt_opt(c.measured),
                        fmt_opt(c.target),
                        fmt_opt(c.tolerance),
                        lower(&c.rule),
                        lower(&c.status),
                    ])?;
                }
            }
        }
        Ok(w.into_inner()?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_f64(1.0), "1.0000000000000000e0");
        assert_eq!(fmt_f64(-0.125), "-1.2500000000000000e-1");
    }

    #[test]
    fn checks() {
        assert_eq!(Check::within("a", 1.0, 1.0 + 1e-9, 1e-8).status, Status::Pass);
        assert_eq!(Check::within("a", 1.0, 2.0, 0.5).status, Status::Fail);
        assert_eq!(Check::below("b", 1.0, 2.0).status, Status::Pass);
        assert_eq!(Check::above("c", 1.0, 2.0).status, Status::Fail);
        assert_eq!(Check::within("a", 1.0, 1.1, 0.5).with_tolerance(0.01).status, Status::Fail);
        let r = VerifyReport::new("x", 0, vec![Check::info("i", 1.0, None), Check::failed("d", "divergent")]);
        assert!(!r.pass);
        assert_eq!(r.failed_names(), vec!["d (divergent)"]);
    }

    #[test]
    fn csv_quotes_fields() {
        let r = VerifyReport::new("graf", 1, vec![Check::within("pair, 1", 0.0, 0.0, 1e-10)]);
        let out = String::from_utf8(Document::Verify(r).render(Format::Csv).unwrap()).unwrap();
        assert!(out.contains("\"pair, 1\""));
        assert!(out.starts_with("suite,check,measured,target,tolerance,rule,status\r\n"));
    }
}
