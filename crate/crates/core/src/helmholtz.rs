//! Helmholtz machinery on the label plane: the Cartesian Cauchy propagator
//! and reconstruction, the polar propagator and Fourier-space circle
//! reconstruction, and a five-point residual.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{domain, finite, Error, Result};
use crate::quadrature::{GaussLegendre, QuadratureSpec};
use crate::specfun::{bessel_j, bessel_j_band, bessel_zero, bochner_riesz, KernelOrder};

/// Default wave number.
pub const WAVE_NUMBER: f64 = 2.0;

fn inv_sqrt_2pi() -> f64 {
    1.0 / TAU.sqrt()
}

/// `Δ(x, y) = (1/√2π) ∫_{-k}^{k} e^{iεx} sin(√(k²-ε²) y)/√(k²-ε²) dε`,
/// integrated after `ε = k sin φ`.
pub fn delta_cartesian(x: f64, y: f64, k: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_wave_number(k)?;
    finite(x)?;
    finite(y)?;
    let panels = (k * (x.abs() + y.abs()) / 2.0).ceil() as usize + 1;
    let v = quad.integrate(0.0, FRAC_PI_2, panels, |p| (k * x * p.sin()).cos() * (k * y * p.cos()).sin());
    Ok(2.0 * inv_sqrt_2pi() * v)
}

/// `∂Δ/∂y`, differentiated under the integral sign.
pub fn delta_cartesian_dy(x: f64, y: f64, k: f64, quad: &QuadratureSpec) -> Result<f64> {
    check_wave_number(k)?;
    finite(x)?;
    finite(y)?;
    let panels = (k * (x.abs() + y.abs()) / 2.0).ceil() as usize + 1;
    let v = quad.integrate(0.0, FRAC_PI_2, panels, |p| {
        let c = p.cos();
        (k * x * p.sin()).cos() * (k * y * c).cos() * k * c
    });
    Ok(2.0 * inv_sqrt_2pi() * v)
}

/// Spherical-Bessel series for `Δ`, read with the scale `R = k`:
/// `√(2/π) k y Σ (-1)^n n!/(2n+1)! (2k y²/x)^n j_n(kx)`.
pub fn delta_cartesian_series(x: f64, y: f64, k: f64, terms: usize) -> Result<f64> {
    check_wave_number(k)?;
    finite(x)?;
    finite(y)?;
    // (2ky²/x)^n j_n(kx) = (2k²y²)^n j_n(kx)/(kx)^n
    let q = 2.0 * k * k * y * y;
    let u = k * x.abs();
    let mut coef = 1.0;
    let mut sum = 0.0;
    for n in 0..terms {
        if n > 0 {
            coef *= -q * n as f64 / ((2 * n) as f64 * (2 * n + 1) as f64);
        }
        let scaled = bochner_riesz(KernelOrder::from_twice(2 * n as i32 + 1)?, u)? / (2.0 / PI).sqrt();
        let t = coef * scaled;
        sum += t;
        if n > 4 && t.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    Ok((2.0 / PI).sqrt() * k * y * sum)
}

fn check_wave_number(k: f64) -> Result<f64> {
    finite(k)?;
    if !(k > 0.0) {
        return Err(domain("wave number must be positive"));
    }
    Ok(k)
}

pub type LineFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Values `ψ(x, 0)` and raw normal derivatives `∂ψ/∂y(x, 0)` on the line.
#[derive(Clone)]
pub struct CauchyLineData {
    pub value_fn: LineFn,
    pub deriv_fn: LineFn,
    pub support_hint: f64,
}

impl std::fmt::Debug for CauchyLineData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CauchyLineData").field("support_hint", &self.support_hint).finish_non_exhaustive()
    }
}

impl CauchyLineData {
    pub fn new(value_fn: LineFn, deriv_fn: LineFn, support_hint: f64) -> Result<Self> {
        finite(support_hint)?;
        if !(support_hint > 0.0) {
            return Err(domain("support hint must be positive"));
        }
        Ok(Self { value_fn, deriv_fn, support_hint })
    }

    /// Line data of the coefficient field `c_n`: `J_n(2x)` and
    /// `i n J_n(2x)/x = i (J_{n-1} + J_{n+1})(2x)`.
    pub fn coherent_mode(n: i32, support_hint: f64) -> Result<Self> {
        Self::new(
            Arc::new(move |x| bessel_j(n, 2.0 * x).unwrap_or(f64::NAN).into()),
            Arc::new(move |x| {
                let s = bessel_j(n - 1, 2.0 * x).unwrap_or(f64::NAN) + bessel_j(n + 1, 2.0 * x).unwrap_or(f64::NAN);
                Complex64::new(0.0, s)
            }),
            support_hint,
        )
    }

    /// `a·self + b·other`, with the larger support hint.
    pub fn combine(&self, a: Complex64, other: &Self, b: Complex64) -> Self {
        let (v1, v2) = (self.value_fn.clone(), other.value_fn.clone());
        let (d1, d2) = (self.deriv_fn.clone(), other.deriv_fn.clone());
        Self {
            value_fn: Arc::new(move |x| a * v1(x) + b * v2(x)),
            deriv_fn: Arc::new(move |x| a * d1(x) + b * d2(x)),
            support_hint: self.support_hint.max(other.support_hint),
        }
    }
}

/// Spectral treatment of the propagator in the reconstruction integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelTaper {
    /// Spectrum cut at `|ε| = k`, exactly the band-limited propagator.
    Sharp,
    /// Spectrum continued past `±k` (evanescent branch) and rolled off to
    /// zero over `[k, k + width]` with a C^∞ step.
    Smooth { width: f64 },
}

// C^∞ step: 0 at t <= 0, 1 at t >= 1
fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = (-1.0 / t).exp();
    let g = (-1.0 / (1.0 - t)).exp();
    f / (f + g)
}

// Propagator spectra sampled on a fixed ε grid: K_s(X) = Σ w sin-part cos(Xε),
// K_c(X) = Σ w cos-part cos(Xε).
struct CauchyKernel {
    eps: Vec<f64>,
    ws: Vec<f64>,
    wc: Vec<f64>,
}

impl CauchyKernel {
    fn new(k: f64, y: f64, taper: KernelTaper, max_offset: f64) -> Self {
        let gl = GaussLegendre::new(32);
        let mut eps = Vec::new();
        let mut wts = Vec::new();
        let mut push = |a: f64, b: f64| {
            let panels = ((max_offset * (b - a) / 4.0).ceil() as usize).max(4);
            let (e, w) = gl.composite_points(a, b, panels);
            eps.extend(e);
            wts.extend(w);
        };
        push(0.0, k);
        let width = match taper {
            KernelTaper::Sharp => 0.0,
            KernelTaper::Smooth { width } => width,
        };
        if width > 0.0 {
            push(k, k + width);
        }
        let pre = 2.0 * inv_sqrt_2pi();
        let mut ws = Vec::with_capacity(eps.len());
        let mut wc = Vec::with_capacity(eps.len());
        for (&e, &w) in eps.iter().zip(&wts) {
            let s2 = k * k - e * e;
            let (sv, cv) = if s2 >= 0.0 {
                let s = s2.sqrt();
                let sv = if s > 0.0 { (s * y).sin() / s } else { y };
                (sv, (s * y).cos())
            } else {
                let s = (-s2).sqrt();
                ((s * y).sinh() / s, (s * y).cosh())
            };
            let win = if e <= k { 1.0 } else { smooth_step((k + width - e) / width) };
            ws.push(pre * w * win * sv);
            wc.push(pre * w * win * cv);
        }
        Self { eps, ws, wc }
    }

    fn eval(&self, x: f64) -> (f64, f64) {
        let mut s = 0.0;
        let mut c = 0.0;
        for ((&e, &a), &b) in self.eps.iter().zip(&self.ws).zip(&self.wc) {
            let cs = (x * e).cos();
            s += a * cs;
            c += b * cs;
        }
        (s, c)
    }
}

/// Reconstruct `ψ(x, y)` from Cauchy data on `y = 0`:
/// `ψ = ∫ [Δ(x-x', y) ψ̇(x') + ∂_yΔ(x-x', y) ψ̊(x')] dx'/√(2π)`, with the
/// smoothly tapered propagator of width `k`.
pub fn cauchy_reconstruct(data: &CauchyLineData, x: f64, y: f64, quad: &QuadratureSpec) -> Result<Complex64> {
    cauchy_reconstruct_with(data, x, y, WAVE_NUMBER, quad, KernelTaper::Smooth { width: WAVE_NUMBER })
}

/// [`cauchy_reconstruct`] with explicit wave number and taper. The line
/// integral runs over `[-L, L]` (`quad.half_width`, default the support
/// hint) on panels of width at most 1/2.
pub fn cauchy_reconstruct_with(
    data: &CauchyLineData,
    x: f64,
    y: f64,
    k: f64,
    quad: &QuadratureSpec,
    taper: KernelTaper,
) -> Result<Complex64> {
    check_wave_number(k)?;
    finite(x)?;
    finite(y)?;
    if y < 0.0 {
        return Err(domain("reconstruction needs y >= 0"));
    }
    if let KernelTaper::Smooth { width } = taper {
        if !(width > 0.0) || !width.is_finite() {
            return Err(domain("taper width must be positive"));
        }
    }
    let l = quad.half_width.unwrap_or(data.support_hint);
    if l < data.support_hint {
        return Err(domain(format!("half-width {l} is below the support hint {}", data.support_hint)));
    }
    let panels = quad.panel_count.max((4.0 * l).ceil() as usize);
    let gl = GaussLegendre::new(quad.nodes_per_panel);
    let (xs, ws) = gl.composite_points(-l, l, panels);
    let kernel = CauchyKernel::new(k, y, taper, x.abs() + l);
    let terms: Vec<Complex64> = xs
        .par_iter()
        .zip(ws.par_iter())
        .map(|(&xp, &w)| {
            let (ks, kc) = kernel.eval(x - xp);
            w * (ks * (data.deriv_fn)(xp) + kc * (data.value_fn)(xp))
        })
        .collect();
    let total: Complex64 = terms.iter().sum();
    Ok(total * inv_sqrt_2pi())
}

fn check_polar_radius(r0: f64, k: f64) -> Result<f64> {
    finite(r0)?;
    let z01 = bessel_zero(0, 1)?;
    if !(r0 > 0.0 && k * r0 < z01) {
        return Err(domain(format!(
            "data radius {r0} outside (0, z01/k) = (0, {:.10}); some J_n(k r0) would vanish",
            z01 / k
        )));
    }
    Ok(r0)
}

/// One Fourier coefficient of the polar propagator, `J_n(kr)/J_n(kr₀)`.
pub fn delta_polar_term(n: i32, r: f64, r0: f64, k: f64) -> Result<f64> {
    check_wave_number(k)?;
    check_polar_radius(r0, k)?;
    let v = bessel_j(n, k * r)? / bessel_j(n, k * r0)?;
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    Ok(v)
}

/// `Δ_{r₀}(θ, r) = Σ_{|n|<=n_cut} J_n(kr)/J_n(kr₀) e^{inθ}`.
///
/// Without `n_cut` the sum is only taken inside the data circle, where it
/// converges absolutely; for `r >= r₀` the caller must choose the cutoff.
pub fn delta_polar(theta: f64, r: f64, r0: f64, k: f64, n_cut: Option<usize>) -> Result<Complex64> {
    check_wave_number(k)?;
    check_polar_radius(r0, k)?;
    finite(theta)?;
    finite(r)?;
    if r < 0.0 {
        return Err(domain("radius must be non-negative"));
    }
    let cut =
        match n_cut {
            Some(c) => c,
            None if r < r0 => {
                let rate = if r > 0.0 { (r0 / r).ln() } else { f64::INFINITY };
                ((40.0 / rate).ceil() as usize + 10).min(2000)
            }
            None => return Err(domain(
                "the polar propagator does not converge for r >= r0; pass an explicit cutoff or use circle_reconstruct",
            )),
        };
    let num = bessel_j_band(cut, k * r)?;
    let den = bessel_j_band(cut, k * r0)?;
    let mut re = num[0] / den[0];
    for n in 1..=cut {
        if den[n] == 0.0 {
            if n_cut.is_some() {
                return Err(Error::NonFinite);
            }
            break;
        }
        let t = num[n] / den[n];
        if !t.is_finite() {
            return Err(Error::NonFinite);
        }
        re += 2.0 * t * (n as f64 * theta).cos();
    }
    Ok(Complex64::new(re, 0.0))
}

pub type BoundaryFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// Boundary values `ψ(r₀, θ)` on the data circle.
#[derive(Clone)]
pub struct CircleData {
    pub r0: f64,
    pub boundary_fn: BoundaryFn,
    pub fourier_cutoff: usize,
}

impl std::fmt::Debug for CircleData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CircleData")
            .field("r0", &self.r0)
            .field("fourier_cutoff", &self.fourier_cutoff)
            .finish_non_exhaustive()
    }
}

impl CircleData {
    pub fn new(r0: f64, boundary_fn: BoundaryFn, fourier_cutoff: usize) -> Result<Self> {
        check_polar_radius(r0, WAVE_NUMBER)?;
        if fourier_cutoff == 0 {
            return Err(domain("fourier cutoff must be at least 1"));
        }
        Ok(Self { r0, boundary_fn, fourier_cutoff })
    }

    /// Trapezoid-rule Fourier coefficients `a_n`, `|n| <= fourier_cutoff`,
    /// index `n + fourier_cutoff`, from `4·cutoff + 1` boundary samples.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let c = self.fourier_cutoff as i64;
        let m = 4 * self.fourier_cutoff + 1;
        let samples: Vec<Complex64> = (0..m).map(|l| (self.boundary_fn)(TAU * l as f64 / m as f64)).collect();
        (-c..=c)
            .map(|n| {
                let s: Complex64 = samples
                    .iter()
                    .enumerate()
                    .map(|(l, f)| {
                        f * Complex64::from_polar(1.0, -TAU * ((n * l as i64).rem_euclid(m as i64)) as f64 / m as f64)
                    })
                    .sum();
                s / m as f64
            })
            .collect()
    }
}

/// Result of a Fourier-space circle reconstruction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleReconstruction {
    pub value: Complex64,
    /// Highest mode above the coefficient noise floor.
    pub n_cut: usize,
}

/// `ψ(r, θ)` from boundary data on the circle `r₀`: each Fourier mode is
/// multiplied by `J_n(kr)/J_n(kr₀)` and resummed. Modes below the rounding
/// floor of the coefficient transform are dropped so their growth for
/// `r > r₀` cannot amplify noise.
pub fn circle_reconstruct(data: &CircleData, r: f64, theta: f64, k: f64) -> Result<CircleReconstruction> {
    check_wave_number(k)?;
    check_polar_radius(data.r0, k)?;
    finite(r)?;
    finite(theta)?;
    if r < 0.0 {
        return Err(domain("radius must be non-negative"));
    }
    let a = data.fourier_coefficients();
    let c = data.fourier_cutoff;
    let peak = a.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = 64.0 * f64::EPSILON * peak;
    let n_cut = (0..=c).rev().find(|&n| a[c + n].norm() > floor || a[c - n].norm() > floor).unwrap_or(0);
    if n_cut == c && c > 1 {
        return Err(Error::SlowDecay { exponent: tail_exponent(&a, c) });
    }
    let num = bessel_j_band(n_cut, k * r)?;
    let den = bessel_j_band(n_cut, k * data.r0)?;
    let mut value = Complex64::new(0.0, 0.0);
    for n in -(n_cut as i64)..=n_cut as i64 {
        let m = n.unsigned_abs() as usize;
        // J_{-n} = (-1)^n J_n in both numerator and denominator
        let ratio = num[m] / den[m];
        if !ratio.is_finite() {
            return Err(Error::NonFinite);
        }
        value += a[(n + c as i64) as usize] * ratio * Complex64::from_polar(1.0, n as f64 * theta);
    }
    Ok(CircleReconstruction { value, n_cut })
}

// Least-squares slope of the log upper envelope of |a_n| against log n over
// the upper half of the band.
fn tail_exponent(a: &[Complex64], c: usize) -> f64 {
    let mut env = vec![0.0f64; c + 1];
    let mut run = 0.0f64;
    for n in (0..=c).rev() {
        run = run.max(a[c + n].norm()).max(a[c - n].norm());
        env[n] = run;
    }
    let pts: Vec<(f64, f64)> =
        ((c / 2).max(1)..=c).filter(|&n| env[n] > 0.0).map(|n| ((n as f64).ln(), env[n].ln())).collect();
    if pts.len() < 2 {
        return 0.0;
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
    let (mx, my) = (sx / m, sy / m);
    let num: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let den: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    -num / den
}

/// `|Δ_h ψ + k² ψ|` with the five-point Laplacian at `(x, y)`.
pub fn helmholtz_residual<F>(field: F, x: f64, y: f64, h: f64, k: f64) -> f64
where
    F: Fn(f64, f64) -> Complex64,
{
    let c = field(x, y);
    let lap = (field(x + h, y) + field(x - h, y) + field(x, y + h) + field(x, y - h) - 4.0 * c) / (h * h);
    (lap + k * k * c).norm()
}
