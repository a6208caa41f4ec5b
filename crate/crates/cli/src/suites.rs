use std::f64::consts::{PI, TAU};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wga_core::coherent::{
    coherent_coeffs, coherent_field, differential_realization_check, overlap_closed, overlap_sum, CoherentLabel,
};
use wga_core::helmholtz::{
    cauchy_reconstruct, circle_reconstruct, helmholtz_residual, CauchyLineData, CircleData, WAVE_NUMBER,
};
use wga_core::lattice::{propagate_analytic, propagate_ode, AmplitudeVector, TruncationWindow};
use wga_core::quadrature::{QuadratureRule, QuadratureSpec};
use wga_core::resolution::{
    cartesian_normalization, cartesian_roi_cross_overlap, cartesian_roi_element, cartesian_roi_matrix,
    convolution_identity_check, naive_diag_closed, naive_diag_normalized, naive_diag_quadrature, polar_kernel,
    polar_roi_grid_matrix, polar_roi_matrix, polar_roi_overlap, CartesianWeights, KernelPair, RoiMethod,
};
use wga_core::specfun::{bessel_j, truncation_rule, KernelOrder};
use wga_core::{Complex64, Error};

use crate::config::{RunConfig, Weights};
use crate::output::{Check, VerifyReport};
use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Unitarity,
    Graf,
    CartesianRoi,
    PolarRoi,
    Naive,
    HelmholtzCauchy,
    HelmholtzPolar,
    ConvIdentity,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Unitarity,
        Suite::Graf,
        Suite::CartesianRoi,
        Suite::PolarRoi,
        Suite::Naive,
        Suite::HelmholtzCauchy,
        Suite::HelmholtzPolar,
        Suite::ConvIdentity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Unitarity => "unitarity",
            Suite::Graf => "graf",
            Suite::CartesianRoi => "cartesian-roi",
            Suite::PolarRoi => "polar-roi",
            Suite::Naive => "naive",
            Suite::HelmholtzCauchy => "helmholtz-cauchy",
            Suite::HelmholtzPolar => "helmholtz-polar",
            Suite::ConvIdentity => "conv-identity",
        }
    }

    pub fn parse(s: &str) -> CliResult<Self> {
        Self::ALL.into_iter().find(|x| x.name() == s).ok_or_else(|| {
            let names: Vec<_> = Self::ALL.iter().map(|x| x.name()).collect();
            CliError::Usage(format!("unknown suite '{s}' (expected one of {})", names.join(", ")))
        })
    }
}

pub fn run_suite(suite: Suite, cfg: &RunConfig, weights: Weights) -> CliResult<VerifyReport> {
    let checks = match suite {
        Suite::Unitarity => unitarity(cfg)?,
        Suite::Graf => graf(cfg)?,
        Suite::CartesianRoi => cartesian(cfg, weights)?,
        Suite::PolarRoi => polar(cfg)?,
        Suite::Naive => naive(cfg)?,
        Suite::HelmholtzCauchy => helmholtz_cauchy(cfg)?,
        Suite::HelmholtzPolar => helmholtz_polar(cfg)?,
        Suite::ConvIdentity => conv_identity(cfg)?,
    };
    let checks = match cfg.tol {
        Some(t) => checks.into_iter().map(|c| c.with_tolerance(t)).collect(),
        None => checks,
    };
    Ok(VerifyReport::new(suite.name(), cfg.seed, checks))
}

fn window(n: usize) -> CliResult<TruncationWindow> {
    Ok(TruncationWindow::new(n)?)
}

fn unitarity(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let w = window(cfg.n_window.unwrap_or(256))?;
    let e0 = AmplitudeVector::basis(w, 0)?;
    for z in [0.5, 1.0, 5.0] {
        w.require(truncation_rule(2.0 * z))?;
        let a = propagate_analytic(&e0, z, cfg.theta)?;
        out.push(Check::within(format!("analytic norm z={z}"), a.state.norm(), 1.0, 1e-12));
        let o = propagate_ode(&e0, z, cfg.theta, cfg.dz)?;
        out.push(Check::within(format!("ode norm drift z={z}"), o.state.norm(), 1.0, 1e-9));
    }
    // engine oracle on the N = 64 window
    let w = window(64)?;
    w.require(truncation_rule(2.0 * cfg.z.abs()))?;
    let e0 = AmplitudeVector::basis(w, 0)?;
    let exact = propagate_analytic(&e0, cfg.z, cfg.theta)?.state;
    let d1 = propagate_ode(&e0, cfg.z, cfg.theta, cfg.dz)?.state.max_abs_diff(&exact);
    let d2 = propagate_ode(&e0, cfg.z, cfg.theta, cfg.dz / 2.0)?.state.max_abs_diff(&exact);
    out.push(Check::within(format!("max |ode - analytic| z={} dz={}", cfg.z, cfg.dz), d1, 0.0, 1e-8));
    out.push(Check::info(format!("max |ode - analytic| z={} dz={}", cfg.z, cfg.dz / 2.0), d2, None));
    out.push(Check::above("dz halving error ratio (fourth order: 16)", d1 / d2, 12.0));
    out.push(Check::below("dz halving error ratio (fourth order: 16)", d1 / d2, 20.0));
    Ok(out)
}

fn graf(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let w = window(cfg.n_window.unwrap_or(0).max(truncation_rule(10.0)))?;
    let mut max_im = 0.0f64;
    for i in 0..100 {
        let a = CoherentLabel::new(rng.random_range(0.0..=5.0), rng.random_range(0.0..TAU))?;
        let b = CoherentLabel::new(rng.random_range(0.0..=5.0), rng.random_range(0.0..TAU))?;
        let s = overlap_sum(a, b, w)?;
        max_im = max_im.max(s.im.abs());
        out.push(Check::within(format!("series vs closed form pair {i:03}"), s.re, overlap_closed(a, b), 1e-10));
    }
    out.push(Check::within("max |Im series|", max_im, 0.0, 1e-12));

    let (r, rp, t): (f64, f64, f64) = (1.3, 0.7, 0.4);
    let j0 = |x: f64| bessel_j(0, x).expect("finite");
    let q = (r * r + rp * rp).sqrt();
    let rows = [
        ("same angle", (r, t), (rp, t), j0(2.0 * (rp - r).abs())),
        ("quarter turn", (r, t), (rp, t + PI / 2.0), j0(2.0 * q)),
        ("antipodal", (r, t), (rp, t + PI), j0(2.0 * (r + rp))),
        ("three-quarter turn", (r, t), (rp, t + 1.5 * PI), j0(2.0 * q)),
        ("equal radius", (r, t), (r, t + 1.1), j0(4.0 * r * (1.1f64 / 2.0).sin())),
        ("identical labels", (r, t), (r, t), 1.0),
    ];
    for (name, (r1, t1), (r2, t2), expect) in rows {
        let (a, b) = (CoherentLabel::new(r1, t1)?, CoherentLabel::new(r2, t2)?);
        out.push(Check::within(format!("closed form, {name}"), overlap_closed(a, b), expect, 1e-14));
        out.push(Check::within(format!("series, {name}"), overlap_sum(a, b, w)?.re, expect, 1e-10));
    }

    for r in [0.1, 1.0, 5.0, 10.0] {
        let v = coherent_coeffs(CoherentLabel::new(r, 0.3)?, TruncationWindow::for_argument(2.0 * r))?;
        out.push(Check::within(format!("sum J_n(2r)^2 r={r}"), v.norm_sqr(), 1.0, 1e-12));
    }

    let alpha = CoherentLabel::new(1.7, 0.6)?;
    for n in [-2, 0, 3] {
        let coarse = differential_realization_check(alpha, n, 2e-4)?;
        let fine = differential_realization_check(alpha, n, 1e-4)?;
        out.push(Check::within(format!("differential realization n={n} h=1e-4"), fine.max(), 0.0, 1e-6));
        out.push(Check::above(
            format!("differential realization n={n} refinement ratio"),
            coarse.max() / fine.max(),
            3.5,
        ));
        out.push(Check::below(
            format!("differential realization n={n} refinement ratio"),
            coarse.max() / fine.max(),
            4.5,
        ));
    }
    Ok(out)
}

fn cartesian(cfg: &RunConfig, weights: Weights) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let w = match weights {
        Weights::Reference => CartesianWeights::reference(),
        Weights::Unit => CartesianWeights::unit(),
    };
    let q = QuadratureSpec::new(QuadratureRule::GaussLegendre, cfg.quad_nodes, 1, None)?;
    let norm = cartesian_normalization(&w, &q);
    let c = norm.c;
    out.push(Check::info("normalization c = <0|A|0>", c, Some(norm.reference_prefactor)));
    out.push(Check::info("even-sector constant", norm.even, None));
    out.push(Check::info("odd-sector constant", norm.odd, None));
    out.push(Check::within("odd/even sector ratio (single constant needs 1)", norm.odd / norm.even, 1.0, 1e-5));

    let a = cartesian_roi_matrix(window(6)?, &w, &q);
    let mut dev = 0.0f64;
    for n in -6..=6i64 {
        for m in -6..=6i64 {
            let d = if n == m { 1.0 } else { 0.0 };
            dev = dev.max((a.get(n, m) / c - d).norm());
        }
    }
    out.push(Check::within("max |<n|A|m>/c - delta_nm|, |n|,|m| <= 6", dev, 0.0, 1e-5));

    let spectral = cartesian_roi_element(3, 3, RoiMethod::Spectral, &q, &w)?.value;
    let ls = match cfg.quad_l {
        Some(l) => [l / 4.0, l / 2.0, l],
        None => [25.0, 50.0, 100.0],
    };
    let mut errs = Vec::new();
    for l in ls {
        let dq = QuadratureSpec::new(QuadratureRule::Trapezoid, 8, 1, Some(l))?;
        let v = cartesian_roi_element(3, 3, RoiMethod::Direct, &dq, &w)?.value;
        let e = (v - spectral).norm();
        out.push(Check::info(format!("direct <3|A|3> error L={l}"), e, None));
        errs.push(e);
    }
    for i in 1..errs.len() {
        out.push(Check::below(format!("direct error decreases L={} -> {}", ls[i - 1], ls[i]), errs[i], errs[i - 1]));
    }

    for (x, xp) in [(0.3, 0.3), (0.2, 1.1), (-0.7, 0.9)] {
        let o = cartesian_roi_cross_overlap(x, xp, &w, &q)?;
        out.push(Check::within(format!("<pos x={x}|A|pos x'={xp}>/c vs k0"), o.position / c, o.targets[0], 1e-5));
        out.push(Check::within(format!("<der x={x}|A|der x'={xp}>/c vs 2k1"), o.derivative / c, o.targets[1], 1e-5));
        out.push(Check::within(format!("<pos x={x}|A|der x'={xp}>/c"), o.mixed / c, 0.0, 1e-5));
    }
    Ok(out)
}

fn polar(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let r0 = cfg.r0.unwrap_or(0.5);
    let nk = cfg.nk.unwrap_or(12);
    let k = polar_kernel(r0, nk)?;
    out.push(Check::info("max kernel coefficient 1/J_n(2r0)^2", k.max_coefficient(), None));
    let fourier = polar_roi_matrix(&k)?;
    let eye = wga_core::lattice::OperatorMatrix::identity(fourier.window());
    out.push(Check::within("fourier path max |<n|A|m> - delta_nm|", fourier.max_abs_diff_within(&eye, nk), 0.0, 1e-9));
    let m = 64.max(4 * nk + 1);
    let grid = polar_roi_grid_matrix(&k, m)?;
    out.push(Check::within(
        format!("grid path (M={m}) vs fourier path"),
        grid.max_abs_diff_within(&fourier, nk),
        0.0,
        1e-9,
    ));
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    for i in 0..5 {
        let (t, tp) = (rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
        let o = polar_roi_overlap(t, tp, &k)?;
        out.push(Check::within(
            format!("overlap {i} vs J0(4 r0 sin(dtheta/2))"),
            o.value.re,
            o.target,
            o.tail + o.rounding,
        ));
        if i == 0 {
            out.push(Check::below("truncation tail", o.tail, 1e-12));
        }
    }
    Ok(out)
}

fn naive(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let l = cfg.quad_l.unwrap_or(200.0);
    for n in 0..=5 {
        let q = naive_diag_quadrature(n, 0.5, l)?;
        out.push(Check::within(
            format!("quadrature vs closed form n={n} lambda=0.5 L={l}"),
            q,
            naive_diag_closed(n, 0.5)?,
            1e-4,
        ));
    }
    for lambda in [0.25, 0.5, 0.75] {
        let (a, b) = (naive_diag_closed(0, lambda)?, naive_diag_closed(1, lambda)?);
        out.push(Check::above(format!("n-dependence gap |A_0 - A_1|/A_0 lambda={lambda}"), (a - b).abs() / a, 0.01));
    }
    for (lambda, measure) in [(-1.0, "r dr"), (0.0, "dr")] {
        let v: Vec<f64> =
            [10.0, 100.0, 1000.0].iter().map(|&l| naive_diag_quadrature(0, lambda, l)).collect::<Result<_, _>>()?;
        out.push(Check::above(format!("growth, measure {measure}, L=100 over L=10"), v[1], v[0]));
        out.push(Check::above(format!("growth, measure {measure}, L=1000 over L=100"), v[2], v[1]));
    }
    for n in 0..=3 {
        let d: Vec<f64> = [1e-2, 1e-3, 1e-4]
            .iter()
            .map(|&x| naive_diag_normalized(n, x).map(|v| (v - 1.0).abs()))
            .collect::<Result<_, _>>()?;
        out.push(Check::info(format!("|normalized - 1| n={n} lambda=1e-4"), d[2], None));
        out.push(Check::below(format!("lambda->0 limit n={n}: 1e-3 closer than 1e-2"), d[1], d[0]));
        out.push(Check::below(format!("lambda->0 limit n={n}: 1e-4 closer than 1e-3"), d[2], d[1]));
    }
    Ok(out)
}

fn helmholtz_cauchy(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let l = cfg.quad_l.unwrap_or(60.0);
    let target = coherent_field(3, 0.7, 0.9);
    let ls = [l / 4.0, l / 2.0, l];
    let data = CauchyLineData::coherent_mode(3, ls[0])?;
    let mut errs = Vec::new();
    for (i, &li) in ls.iter().enumerate() {
        let q = QuadratureSpec::gauss(16, 1).with_half_width(li);
        let e = (cauchy_reconstruct(&data, 0.7, 0.9, &q)? - target).norm();
        if i + 1 == ls.len() {
            out.push(Check::within(format!("c_3(0.7, 0.9) from y=0 data, L={li}"), e, 0.0, 1e-4));
        } else {
            out.push(Check::info(format!("c_3(0.7, 0.9) from y=0 data, L={li}"), e, None));
        }
        errs.push(e);
    }
    for i in 1..errs.len() {
        out.push(Check::below(format!("error decreases L={} -> {}", ls[i - 1], ls[i]), errs[i], errs[i - 1]));
    }

    let k = WAVE_NUMBER;
    let points = [(0.3, 0.2), (1.1, -0.7), (-2.0, 1.5), (0.05, 3.1)];
    for n in 0..=6 {
        let res = points
            .iter()
            .map(|&(x, y)| helmholtz_residual(|a, b| coherent_field(n, a, b), x, y, 1e-3, k))
            .fold(0.0, f64::max);
        out.push(Check::within(format!("|Lap c_{n} + 4 c_{n}| h=1e-3"), res, 0.0, 1e-5));
    }
    let field = |a: f64, b: f64| coherent_field(2, a, b);
    let ratio = helmholtz_residual(field, 1.1, -0.7, 2e-3, k) / helmholtz_residual(field, 1.1, -0.7, 1e-3, k);
    out.push(Check::above("residual refinement ratio h=2e-3 -> 1e-3 (second order: 4)", ratio, 3.5));
    out.push(Check::below("residual refinement ratio h=2e-3 -> 1e-3 (second order: 4)", ratio, 4.5));
    let plane = |_: f64, y: f64| Complex64::from_polar(1.0, 2.0 * y);
    out.push(Check::within(
        "plane wave e^{2iy} residual h=1e-3",
        helmholtz_residual(plane, 0.3, 0.2, 1e-3, k),
        0.0,
        1e-6,
    ));
    let poly = |x: f64, _: f64| Complex64::new(x * x, 0.0);
    let (x, y) = (0.5, 0.2);
    let r = helmholtz_residual(poly, x, y, 1e-3, k);
    out.push(Check::within("x^2 residual vs |2 + 4x^2|", r, 2.0 + 4.0 * x * x, 1e-6));
    out.push(Check::above("x^2 residual exceeds the solution tolerance", r, 1e-5));
    Ok(out)
}

fn helmholtz_polar(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let r0 = cfg.r0.unwrap_or(1.0);
    let data = CircleData::new(r0, Arc::new(move |t: f64| coherent_field(2, r0 * t.cos(), r0 * t.sin())), 32)?;
    for (name, r, t, tol) in [("interior", 0.5, 0.4, 1e-10), ("exterior", 2.0, 0.4, 1e-8)] {
        let rec = circle_reconstruct(&data, r, t, WAVE_NUMBER)?;
        let e = (rec.value - coherent_field(2, r * t.cos(), r * t.sin())).norm();
        out.push(Check::within(format!("c_2 at {name} point (r={r}, theta={t}) from r0={r0}"), e, 0.0, tol));
        out.push(Check::info(format!("adaptive cutoff at {name} point"), rec.n_cut as f64, None));
    }
    Ok(out)
}

fn conv_identity(cfg: &RunConfig) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seps: Vec<(f64, f64)> = (0..10).map(|_| (rng.random_range(-2.5..2.5), rng.random_range(-2.5..2.5))).collect();
    let orders = [KernelOrder::ZERO, KernelOrder::HALF, KernelOrder::ONE];
    for a in orders {
        for b in orders {
            let name = format!("max |lhs - rhs| alpha={} beta={}", a.alpha(), b.alpha());
            let pair = KernelPair::new(a, b, 1.0)?;
            let mut worst = 0.0f64;
            let mut divergent = None;
            for &(x, xp) in &seps {
                match convolution_identity_check(&pair, x, xp) {
                    Ok(r) => worst = worst.max(r.abs_diff),
                    Err(Error::Divergent(m)) => {
                        divergent = Some(m);
                        break;
                    }
                    Err(e) => return Err(e.into()),
                }
            }
            out.push(match divergent {
                Some(m) => Check::failed(name, &format!("divergent: {m}")),
                None => Check::within(name, worst, 0.0, 1e-8),
            });
        }
    }
    Ok(out)
}
