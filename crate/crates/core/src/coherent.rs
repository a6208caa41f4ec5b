//! E(2) coherent states `c_n(α) = e^{inθ} J_n(2r)`, their overlaps, the
//! Cauchy line families, circle states, and a finite-difference check of
//! the differential realization of the generators.

use std::f64::consts::{FRAC_1_SQRT_2, PI, TAU};

use num_complex::Complex64;

use crate::error::{domain, finite, Result};
use crate::lattice::{AmplitudeVector, TruncationWindow};
use crate::specfun::{bessel_j, bessel_j_symmetric, bessel_zero, bochner_riesz, truncation_rule, KernelOrder};

/// `α = r e^{iθ}` with `r >= 0` and `θ` reduced to `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherentLabel {
    r: f64,
    theta: f64,
}

pub(crate) fn reduce_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

impl CoherentLabel {
    pub fn new(r: f64, theta: f64) -> Result<Self> {
        finite(r)?;
        finite(theta)?;
        if r < 0.0 {
            return Err(domain("label modulus must be non-negative"));
        }
        Ok(Self { r, theta: reduce_angle(theta) })
    }

    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        finite(x)?;
        finite(y)?;
        Ok(Self { r: x.hypot(y), theta: reduce_angle(y.atan2(x)) })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn x(&self) -> f64 {
        self.r * self.theta.cos()
    }

    pub fn y(&self) -> f64 {
        self.r * self.theta.sin()
    }

    pub fn as_complex(&self) -> Complex64 {
        Complex64::from_polar(self.r, self.theta)
    }
}

/// Single coefficient `e^{inθ} J_n(2r)`.
pub fn coherent_coefficient(alpha: CoherentLabel, n: i32) -> Complex64 {
    Complex64::from_polar(1.0, n as f64 * alpha.theta) * bessel_j(n, 2.0 * alpha.r).expect("finite label")
}

/// The coefficient field `(x, y) ↦ c_n(x + iy)` on the label plane.
pub fn coherent_field(n: i32, x: f64, y: f64) -> Complex64 {
    let r = x.hypot(y);
    Complex64::from_polar(1.0, n as f64 * y.atan2(x)) * bessel_j(n, 2.0 * r).expect("finite point")
}

/// The same coefficient written as `α^n 2^n k_n(2|α|)`; negative `n` uses
/// `(-ᾱ)^{|n|}`.
pub fn coherent_coefficient_power_form(alpha: CoherentLabel, n: i32) -> Complex64 {
    let m = n.unsigned_abs() as i32;
    let base = if n >= 0 { alpha.as_complex() } else { -alpha.as_complex().conj() };
    let k = bochner_riesz(KernelOrder::from_twice(2 * m).expect("m >= 0"), 2.0 * alpha.r).expect("finite label");
    base.powi(m) * 2f64.powi(m) * k
}

/// Coefficients of `|α⟩` over a window at least as wide as the truncation
/// rule for `2r`.
pub fn coherent_coeffs(alpha: CoherentLabel, window: TruncationWindow) -> Result<AmplitudeVector> {
    window.require(truncation_rule(2.0 * alpha.r))?;
    let n = window.half_width();
    let j = bessel_j_symmetric(n, 2.0 * alpha.r)?;
    Ok(AmplitudeVector::from_fn(window, |i| {
        Complex64::from_polar(1.0, i as f64 * alpha.theta) * j[(i + n as i64) as usize]
    }))
}

/// `⟨α|α'⟩ = J_0(2R)` by Graf's addition theorem.
pub fn overlap_closed(a: CoherentLabel, b: CoherentLabel) -> f64 {
    let r2 = a.r * a.r + b.r * b.r - 2.0 * a.r * b.r * (b.theta - a.theta).cos();
    bessel_j(0, 2.0 * r2.max(0.0).sqrt()).expect("finite labels")
}

/// `Σ_n J_n(2r) J_n(2r') e^{in(θ'-θ)}` summed over the window.
pub fn overlap_sum(a: CoherentLabel, b: CoherentLabel, window: TruncationWindow) -> Result<Complex64> {
    window.require(truncation_rule(2.0 * a.r.max(b.r)))?;
    let n = window.half_width();
    let ja = bessel_j_symmetric(n, 2.0 * a.r)?;
    let jb = bessel_j_symmetric(n, 2.0 * b.r)?;
    let d = b.theta - a.theta;
    // pair ±n so the imaginary parts cancel term by term
    let mut re = ja[n] * jb[n];
    let mut im = 0.0;
    for k in 1..=n {
        let (s, c) = (k as f64 * d).sin_cos();
        let p = ja[n + k] * jb[n + k];
        let m = ja[n - k] * jb[n - k];
        re += (p + m) * c;
        im += (p - m) * s;
    }
    Ok(Complex64::new(re, im))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CauchyKind {
    Position,
    Derivative,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LineSign {
    Forward,
    Backward,
}

impl LineSign {
    fn value(self) -> f64 {
        match self {
            LineSign::Forward => 1.0,
            LineSign::Backward => -1.0,
        }
    }
}

/// One of the Cauchy-data families on a line through the origin at angle
/// `θ₀ ∈ [0, π)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CauchyFamily {
    kind: CauchyKind,
    offset_angle: f64,
    sign: LineSign,
}

impl CauchyFamily {
    pub fn new(kind: CauchyKind, offset_angle: f64, sign: LineSign) -> Result<Self> {
        finite(offset_angle)?;
        if !(0.0..PI).contains(&offset_angle) {
            return Err(domain(format!("line angle {offset_angle} outside [0, pi)")));
        }
        Ok(Self { kind, offset_angle, sign })
    }

    pub fn kind(&self) -> CauchyKind {
        self.kind
    }

    pub fn offset_angle(&self) -> f64 {
        self.offset_angle
    }

    pub fn sign(&self) -> LineSign {
        self.sign
    }

    pub fn state(&self, r: f64, window: TruncationWindow) -> Result<AmplitudeVector> {
        let (p, d) = rotated_cauchy_states(r, self.offset_angle, self.sign, window)?;
        Ok(match self.kind {
            CauchyKind::Position => p,
            CauchyKind::Derivative => d,
        })
    }
}

/// Line states `(x̊, ẋ)`: coefficients `J_n(2x)` and
/// `n J_n(2x)/(√2 x) = (J_{n-1} + J_{n+1})(2x)/√2`, the latter form being
/// regular at `x = 0`.
pub fn cauchy_line_states(x: f64, window: TruncationWindow) -> Result<(AmplitudeVector, AmplitudeVector)> {
    finite(x)?;
    window.require(truncation_rule(2.0 * x) + 1)?;
    let n = window.half_width();
    let j = bessel_j_symmetric(n + 1, 2.0 * x)?;
    let at = |i: i64| j[(i + n as i64 + 1) as usize];
    let pos = AmplitudeVector::from_fn(window, |i| at(i).into());
    let der = AmplitudeVector::from_fn(window, |i| (FRAC_1_SQRT_2 * (at(i - 1) + at(i + 1))).into());
    Ok((pos, der))
}

/// Rotated line states: `e^{inθ₀} J_n(±2r)` and `n e^{inθ₀} J_n(±2r)/(√2 r)`.
pub fn rotated_cauchy_states(
    r: f64,
    theta0: f64,
    sign: LineSign,
    window: TruncationWindow,
) -> Result<(AmplitudeVector, AmplitudeVector)> {
    finite(r)?;
    if r < 0.0 {
        return Err(domain("line parameter must be non-negative"));
    }
    CauchyFamily::new(CauchyKind::Position, theta0, sign)?;
    let s = sign.value();
    let (pos, der) = cauchy_line_states(s * r, window)?;
    let rot = |v: AmplitudeVector, extra: f64| {
        AmplitudeVector::from_fn(window, |i| extra * Complex64::from_polar(1.0, i as f64 * theta0) * v.get(i))
    };
    Ok((rot(pos, 1.0), rot(der, s)))
}

/// Largest admissible circle radius, `z_{0,1}/2`.
pub fn circle_radius_bound() -> f64 {
    0.5 * bessel_zero(0, 1).expect("first zero of J_0")
}

pub(crate) fn check_circle_radius(r0: f64) -> Result<f64> {
    finite(r0)?;
    let bound = circle_radius_bound();
    if !(r0 > 0.0 && r0 < bound) {
        return Err(domain(format!(
            "circle radius {r0} outside (0, z01/2) = (0, {bound:.10}); J_0(2r0) must not vanish"
        )));
    }
    Ok(r0)
}

/// `|θ̊⟩ = |r₀e^{iθ}⟩` for admissible `r₀`.
pub fn circle_state(theta: f64, r0: f64, window: TruncationWindow) -> Result<AmplitudeVector> {
    check_circle_radius(r0)?;
    coherent_coeffs(CoherentLabel::new(r0, theta)?, window)
}

/// `⟨θ̊|θ̊'⟩ = J_0(4r₀ sin((θ'-θ)/2))`.
pub fn circle_overlap_closed(theta: f64, theta_p: f64, r0: f64) -> f64 {
    bessel_j(0, 4.0 * r0 * (0.5 * (theta_p - theta)).sin()).expect("finite angles")
}

/// Absolute residuals of `n̂_d c_n = n c_n`, `V̂_d c_n = c_{n+1}` and
/// `V̂†_d c_n = c_{n-1}` with central differences of step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DifferentialResidual {
    pub number: f64,
    pub lowering: f64,
    pub raising: f64,
}

impl DifferentialResidual {
    pub fn max(&self) -> f64 {
        self.number.max(self.lowering).max(self.raising)
    }
}

pub fn differential_realization_check(alpha: CoherentLabel, n: i32, h: f64) -> Result<DifferentialResidual> {
    finite(h)?;
    if !(h > 0.0 && h <= 1e-3) {
        return Err(domain("step h must lie in (0, 1e-3]"));
    }
    let (r, t) = (alpha.r, alpha.theta);
    if r <= h {
        return Err(domain(format!("r = {r} too small for step {h}; need r > h")));
    }
    let c =
        |rr: f64, tt: f64, k: i32| Complex64::from_polar(1.0, k as f64 * tt) * bessel_j(k, 2.0 * rr).expect("finite");
    let d_r = (c(r + h, t, n) - c(r - h, t, n)) / (2.0 * h);
    let d_t = (c(r, t + h, n) - c(r, t - h, n)) / (2.0 * h);
    let i = Complex64::i();
    let number = -i * d_t;
    let lowering = -0.5 * Complex64::from_polar(1.0, t) * (d_r + i / r * d_t);
    let raising = 0.5 * Complex64::from_polar(1.0, -t) * (d_r - i / r * d_t);
    Ok(DifferentialResidual {
        number: (number - n as f64 * c(r, t, n)).norm(),
        lowering: (lowering - c(r, t, n + 1)).norm(),
        raising: (raising - c(r, t, n - 1)).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::propagate_analytic;

    fn win(n: usize) -> TruncationWindow {
        TruncationWindow::new(n).unwrap()
    }

    #[test]
    fn label_normalization() {
        let a = CoherentLabel::new(1.0, -PI / 2.0).unwrap();
        assert!((a.theta() - 1.5 * PI).abs() < 1e-15);
        assert!(CoherentLabel::new(-1.0, 0.0).is_err());
        let b = CoherentLabel::from_xy(0.3, -0.4).unwrap();
        assert!((b.r() - 0.5).abs() < 1e-16);
        assert!((b.x() - 0.3).abs() < 1e-15 && (b.y() + 0.4).abs() < 1e-15);
        assert!((b.as_complex() - Complex64::new(0.3, -0.4)).norm() < 1e-15);
    }

    #[test]
    fn vacuum_and_norm() {
        let w = win(40);
        let v = coherent_coeffs(CoherentLabel::new(0.0, 1.0).unwrap(), w).unwrap();
        assert_eq!(v, AmplitudeVector::basis(w, 0).unwrap());
        for &r in &[0.1, 1.0, 4.0, 10.0] {
            let a = CoherentLabel::new(r, 0.7).unwrap();
            let v = coherent_coeffs(a, TruncationWindow::for_argument(2.0 * r)).unwrap();
            assert!((v.norm_sqr() - 1.0).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn undersized_window_names_requirement() {
        let a = CoherentLabel::new(5.0, 0.0).unwrap();
        let err = coherent_coeffs(a, win(10)).unwrap_err();
        assert_eq!(err, crate::Error::WindowTooSmall { required: truncation_rule(10.0), actual: 10 });
    }

    #[test]
    fn power_form_matches() {
        for &r in &[0.3, 2.5] {
            let a = CoherentLabel::new(r, 1.1).unwrap();
            for n in -20..=20 {
                let d = (coherent_coefficient(a, n) - coherent_coefficient_power_form(a, n)).norm();
                assert!(d < 1e-13, "r={r} n={n} d={d}");
            }
        }
    }

    #[test]
    fn overlap_special_cases() {
        let a = CoherentLabel::new(0.8, 0.3).unwrap();
        assert!((overlap_closed(a, a) - 1.0).abs() < 1e-15);
        let b = CoherentLabel::new(1.1, 0.3 + PI).unwrap();
        assert!((overlap_closed(a, b) - bessel_j(0, 2.0 * 1.9).unwrap()).abs() < 1e-14);
        let c = CoherentLabel::new(1.1, 0.3 + PI / 2.0).unwrap();
        let q = bessel_j(0, 2.0 * (0.64f64 + 1.21).sqrt()).unwrap();
        assert!((overlap_closed(a, c) - q).abs() < 1e-14);
        assert_eq!(overlap_closed(a, b), overlap_closed(b, a));
    }

    #[test]
    fn overlap_sum_matches_closed() {
        let w = win(60);
        let a = CoherentLabel::new(1.0, 0.0).unwrap();
        assert!((overlap_sum(a, a, w).unwrap() - 1.0).norm() < 1e-12);
        let b = CoherentLabel::new(1.0, PI).unwrap();
        let s = overlap_sum(a, b, w).unwrap();
        assert!((s.re - bessel_j(0, 4.0).unwrap()).abs() < 1e-10);
        assert!(s.im.abs() < 1e-12);
    }

    #[test]
    fn line_states() {
        let w = win(50);
        let (p, d) = cauchy_line_states(0.0, w).unwrap();
        assert_eq!(p, AmplitudeVector::basis(w, 0).unwrap());
        let expect = AmplitudeVector::basis(w, 1).unwrap().add(&AmplitudeVector::basis(w, -1).unwrap()).unwrap();
        assert!(d.max_abs_diff(&expect.scale(FRAC_1_SQRT_2.into())) < 1e-16);

        let (_, d1) = cauchy_line_states(0.4, w).unwrap();
        let (p2, d2) = cauchy_line_states(1.1, w).unwrap();
        let target = bessel_j(1, 1.4).unwrap() / 0.7;
        assert!((d1.inner(&d2).unwrap().re - target).abs() < 1e-10);
        assert!(p2.inner(&d1).unwrap().norm() < 1e-12);
        for &x in &[-2.0, 0.25, 3.0] {
            let (p, d) = cauchy_line_states(x, w).unwrap();
            assert!((p.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((d.norm_sqr() - 1.0).abs() < 1e-12);
            // n J_n(2x)/x form away from zero
            for n in -5..=5i64 {
                let direct = n as f64 * bessel_j(n as i32, 2.0 * x).unwrap() / (2f64.sqrt() * x);
                assert!((d.get(n).re - direct).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rotated_states() {
        let w = win(50);
        let (p0, d0) = cauchy_line_states(1.3, w).unwrap();
        let (p, d) = rotated_cauchy_states(1.3, 0.0, LineSign::Forward, w).unwrap();
        assert_eq!(p, p0);
        assert_eq!(d, d0);
        let z = 1.3;
        let (p, _) = rotated_cauchy_states(z, PI / 2.0, LineSign::Forward, w).unwrap();
        let prop = propagate_analytic(&AmplitudeVector::basis(w, 0).unwrap(), z, PI / 2.0).unwrap();
        assert!(p.max_abs_diff(&prop.state) < 1e-10);
        let (pb, _) = rotated_cauchy_states(z, PI / 2.0, LineSign::Backward, w).unwrap();
        let back = propagate_analytic(&AmplitudeVector::basis(w, 0).unwrap(), -z, PI / 2.0).unwrap();
        assert!(pb.max_abs_diff(&back.state) < 1e-10);
        assert!(rotated_cauchy_states(1.0, PI, LineSign::Forward, w).is_err());
        // derivative family keeps the n J_n(±2r)/r form
        let (_, db) = rotated_cauchy_states(0.9, 0.4, LineSign::Backward, w).unwrap();
        for n in -4..=4i64 {
            let direct = Complex64::from_polar(1.0, 0.4 * n as f64) * n as f64 * bessel_j(n as i32, -1.8).unwrap()
                / (2f64.sqrt() * 0.9);
            assert!((db.get(n) - direct).norm() < 1e-14);
        }
        let fam = CauchyFamily::new(CauchyKind::Derivative, 0.4, LineSign::Backward).unwrap();
        assert_eq!(fam.state(0.9, w).unwrap(), db);
    }

    #[test]
    fn circle_states() {
        let w = win(40);
        assert!(circle_state(0.0, 0.0, w).is_err());
        assert!(circle_state(0.0, 1.3, w).is_err());
        let a = circle_state(0.3, 0.5, w).unwrap();
        let b = circle_state(0.3 + PI, 0.5, w).unwrap();
        assert!((a.inner(&a).unwrap().re - 1.0).abs() < 1e-12);
        assert!((a.inner(&b).unwrap().re - circle_overlap_closed(0.3, 0.3 + PI, 0.5)).abs() < 1e-10);
        assert!((circle_overlap_closed(0.0, PI, 0.5) - 0.2238907791).abs() < 1e-10);
    }

    #[test]
    fn differential_realization() {
        let a = CoherentLabel::new(1.3, 0.7).unwrap();
        let r1 = differential_realization_check(a, 2, 1e-4).unwrap();
        assert!(r1.number <= 1e-7);
        assert!(r1.lowering <= 1e-6);
        assert!(r1.raising <= 1e-6);
        let big = differential_realization_check(a, 2, 1e-3).unwrap();
        let half = differential_realization_check(a, 2, 5e-4).unwrap();
        for (x, y) in [(big.number, half.number), (big.lowering, half.lowering), (big.raising, half.raising)] {
            let ratio = y / x;
            assert!((ratio - 0.25).abs() < 0.05, "ratio {ratio}");
        }
        assert!(differential_realization_check(CoherentLabel::new(1e-5, 0.0).unwrap(), 0, 1e-4).is_err());
        assert!(differential_realization_check(a, 0, 1e-2).is_err());
    }
}
