use std::collections::BTreeMap;

use wga_core::coherent::{coherent_coeffs, overlap_closed, overlap_sum, CoherentLabel};
use wga_core::lattice::{propagate_analytic, propagate_ode, AmplitudeVector, Propagated, TruncationWindow};
use wga_core::specfun::truncation_rule;
use wga_core::Complex64;

use crate::config::{parse_angle, parse_f64, Engine, RunConfig};
use crate::output::{AmplitudeRow, CoherentDoc, CrossCheck, Document, Label, OverlapDoc, PropagateDoc};
use crate::{CliError, CliResult};

const DEFAULT_WINDOW: usize = 64;
const DEFAULT_CROSS_TOL: f64 = 1e-8;

/// Sparse initial amplitudes keyed by site index.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct InitialState(BTreeMap<i64, Complex64>);

impl InitialState {
    fn reach(&self) -> usize {
        self.0.keys().map(|n| n.unsigned_abs() as usize).max().unwrap_or(0)
    }

    fn on(&self, window: TruncationWindow) -> CliResult<AmplitudeVector> {
        let mut v = vec![Complex64::new(0.0, 0.0); window.dim()];
        for (&n, &a) in &self.0 {
            let p = window.position(n).ok_or_else(|| CliError::Insufficient(format!("site {n} outside window")))?;
            v[p] = a;
        }
        Ok(AmplitudeVector::new(window, v)?)
    }
}

/// `delta@n`, or a path to a file of `n, re, im` lines (comma or
/// whitespace separated, `#` comments, optional `n,re,im` header).
pub(crate) fn parse_input(spec: &str) -> CliResult<InitialState> {
    if let Some(rest) = spec.strip_prefix("delta@") {
        let n: i64 = rest.trim().parse().map_err(|_| CliError::Usage(format!("invalid site in '{spec}'")))?;
        return Ok(InitialState(BTreeMap::from([(n, Complex64::new(1.0, 0.0))])));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| CliError::Usage(format!("cannot read input {spec}: {e}")))?;
    parse_amplitudes(&text).map_err(|m| CliError::Usage(format!("{spec}: {m}")))
}

fn parse_amplitudes(text: &str) -> Result<InitialState, String> {
    let mut map = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|f| !f.is_empty()).collect();
        if map.is_empty() && fields.first() == Some(&"n") {
            continue;
        }
        if fields.len() != 3 {
            return Err(format!("line {}: expected 'n, re, im'", i + 1));
        }
        let n: i64 = fields[0].parse().map_err(|_| format!("line {}: bad index '{}'", i + 1, fields[0]))?;
        let re: f64 = fields[1].parse().map_err(|_| format!("line {}: bad number '{}'", i + 1, fields[1]))?;
        let im: f64 = fields[2].parse().map_err(|_| format!("line {}: bad number '{}'", i + 1, fields[2]))?;
        if !re.is_finite() || !im.is_finite() {
            return Err(format!("line {}: amplitudes must be finite", i + 1));
        }
        if map.insert(n, Complex64::new(re, im)).is_some() {
            return Err(format!("line {}: site {n} given twice", i + 1));
        }
    }
    if map.is_empty() {
        return Err("no amplitudes".into());
    }
    Ok(InitialState(map))
}

fn rows(state: &AmplitudeVector) -> Vec<AmplitudeRow> {
    let w = state.window();
    w.indices().zip(state.coeffs()).map(|(n, a)| AmplitudeRow { n, re: a.re, im: a.im, abs2: a.norm_sqr() }).collect()
}

fn run_engine(engine: Engine, state: &AmplitudeVector, cfg: &RunConfig) -> CliResult<Propagated> {
    Ok(match engine {
        Engine::Analytic => propagate_analytic(state, cfg.z, cfg.theta)?,
        Engine::Ode => propagate_ode(state, cfg.z, cfg.theta, cfg.dz)?,
    })
}

pub(crate) fn propagate(
    cfg: &RunConfig,
    input: Option<&str>,
    cross_check: bool,
) -> CliResult<(Document, CliResult<()>)> {
    let init = parse_input(input.unwrap_or("delta@0"))?;
    let required = init.reach() + truncation_rule(2.0 * cfg.z.abs());
    let n = match cfg.n_window {
        Some(n) if n < required => {
            return Err(CliError::Insufficient(format!(
                "window half-width {n} too small: N >= {required} needed (input reach {} + truncation {})",
                init.reach(),
                required - init.reach()
            )))
        }
        Some(n) => n,
        None => required.max(DEFAULT_WINDOW),
    };
    let state = init.on(TruncationWindow::new(n)?)?;
    let out = run_engine(cfg.engine, &state, cfg)?;
    let mut verdict = Ok(());
    let cross = if cross_check {
        let other = if cfg.engine == Engine::Analytic { Engine::Ode } else { Engine::Analytic };
        let alt = run_engine(other, &state, cfg)?;
        let diff = out.state.max_abs_diff(&alt.state);
        let tol = cfg.tol.unwrap_or(DEFAULT_CROSS_TOL);
        let pass = diff <= tol;
        if !pass {
            verdict = Err(CliError::Verification(format!("engines differ by {diff:e} > {tol:e}")));
        }
        Some(CrossCheck { max_abs_diff: diff, tolerance: tol, pass })
    } else {
        None
    };
    let doc = PropagateDoc {
        command: "propagate",
        engine: cfg.engine.name(),
        z: cfg.z,
        theta: cfg.theta,
        n_window: n,
        norm: out.state.norm(),
        edge_warning: out.edge_warning,
        cross_check: cross,
        rows: rows(&out.state),
    };
    Ok((Document::Propagate(doc), verdict))
}

/// `r,theta` with `r >= 0`.
pub(crate) fn parse_label(s: &str) -> CliResult<CoherentLabel> {
    let (r, t) = s.split_once(',').ok_or_else(|| CliError::Usage(format!("label '{s}' is not 'r,theta'")))?;
    let r = parse_f64(r, "radius")?;
    if r < 0.0 {
        return Err(CliError::Usage(format!("label '{s}': radius must be non-negative")));
    }
    Ok(CoherentLabel::new(r, parse_angle(t)?)?)
}

fn label_window(cfg: &RunConfig, r: f64) -> CliResult<TruncationWindow> {
    let required = truncation_rule(2.0 * r);
    match cfg.n_window {
        Some(n) if n < required => {
            Err(CliError::Insufficient(format!("window half-width {n} too small: N >= {required} needed")))
        }
        Some(n) => Ok(TruncationWindow::new(n)?),
        None => Ok(TruncationWindow::new(required)?),
    }
}

pub(crate) fn coherent(cfg: &RunConfig, alpha: &str) -> CliResult<Document> {
    let a = parse_label(alpha)?;
    let w = label_window(cfg, a.r())?;
    let v = coherent_coeffs(a, w)?;
    Ok(Document::Coherent(CoherentDoc {
        command: "coherent",
        r: a.r(),
        theta: a.theta(),
        n_window: w.half_width(),
        norm: v.norm(),
        rows: rows(&v),
    }))
}

pub(crate) fn overlap(cfg: &RunConfig, alpha: &str, alpha_prime: &str) -> CliResult<Document> {
    let a = parse_label(alpha)?;
    let b = parse_label(alpha_prime)?;
    let w = label_window(cfg, a.r().max(b.r()))?;
    let closed = overlap_closed(a, b);
    let series = overlap_sum(a, b, w)?;
    Ok(Document::Overlap(OverlapDoc {
        command: "overlap",
        alpha: Label { r: a.r(), theta: a.theta() },
        alpha_prime: Label { r: b.r(), theta: b.theta() },
        n_window: w.half_width(),
        closed,
        series_re: series.re,
        series_im: series.im,
        diff: (series - closed).norm(),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn amplitude_files() {
        let s = parse_amplitudes("n,re,im\n0, 1.0, 0\n# comment\n-2 0.5 -0.5\n").unwrap();
        assert_eq!(s.0.len(), 2);
        assert_eq!(s.reach(), 2);
        assert!(parse_amplitudes("0,1\n").is_err());
        assert!(parse_amplitudes("0,1,0\n0,1,0\n").is_err());
        assert!(parse_amplitudes("x,1,0\n").is_err());
        assert!(parse_amplitudes("# nothing\n").is_err());
        assert!(parse_input("delta@-3").unwrap().0.contains_key(&-3));
        assert!(parse_input("delta@x").is_err());
    }

    #[test]
    fn labels() {
        let a = parse_label("1,pi").unwrap();
        assert_eq!(a.r(), 1.0);
        assert!(parse_label("-1,0").is_err());
        assert!(parse_label("1").is_err());
    }
}
