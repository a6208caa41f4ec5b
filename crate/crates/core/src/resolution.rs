//! Resolutions of the identity built from E(2) coherent states: the
//! Bochner–Riesz convolution identity, the Cartesian (Cauchy-data)
//! resolution, the polar resolution with the convolution-inverse kernel,
//! and the naive `r^{-λ}`-weighted construction.

use std::f64::consts::{PI, TAU};

use astro_float::{BigFloat, Consts, RoundingMode};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::coherent::{cauchy_line_states, check_circle_radius, circle_overlap_closed};
use crate::error::{domain, finite, Error, Result};
use crate::lattice::{OperatorMatrix, TruncationWindow};
use crate::quadrature::{GaussLegendre, QuadratureRule, QuadratureSpec};
use crate::specfun::{
    bessel_j, bessel_j_band, bochner_riesz, gamma_fn, gamma_ratio, norm_const, truncation_rule, KernelOrder,
};

/// Two kernel orders and the argument scale `s` in `k_α(s|x|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelPair {
    pub alpha: KernelOrder,
    pub beta: KernelOrder,
    pub scale: f64,
}

impl KernelPair {
    pub fn new(alpha: KernelOrder, beta: KernelOrder, scale: f64) -> Result<Self> {
        finite(scale)?;
        if !(scale > 0.0) {
            return Err(domain("kernel scale must be positive"));
        }
        Ok(Self { alpha, beta, scale })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionReport {
    /// `∫ k_α(s|x-x''|) k_β(s|x''-x'|) dx''/√(2π)`.
    pub lhs: f64,
    /// `(N_{α-1/2} N_{β-1/2}/N_{α+β-1}) k_{α+β-1/2}(s|x-x'|)/s`.
    pub rhs: f64,
    pub abs_diff: f64,
    /// The same convolution with the plain measure `dx''`; equals `√(2π)·lhs`.
    pub raw_lhs: f64,
}

/// Check the Bochner–Riesz convolution identity at one separation.
///
/// The left side is evaluated in the frequency domain: `k_α(s|x|)` is the
/// transform of `N_{α-1/2}(1-t²)^{α-1/2}/√(2π)` on `[-1, 1]`, so the
/// convolution collapses to `∫ cos^{2α+2β-1}φ cos(s d sin φ) dφ` over
/// `[-π/2, π/2]`.
pub fn convolution_identity_check(pair: &KernelPair, x: f64, xp: f64) -> Result<ConvolutionReport> {
    finite(x)?;
    finite(xp)?;
    for o in [pair.alpha, pair.beta] {
        if !(0..=3).contains(&o.twice()) {
            return Err(Error::UnsupportedOrder(o.alpha()));
        }
    }
    let p = pair.alpha.twice() + pair.beta.twice() - 1;
    if p < 0 {
        return Err(Error::Divergent(format!(
            "orders ({}, {}): the product spectrum (1-t²)^{} is not integrable at t = ±1",
            pair.alpha.alpha(),
            pair.beta.alpha(),
            (p as f64) / 2.0 - 0.5
        )));
    }
    let s = pair.scale;
    let d = (x - xp).abs();
    let na = norm_const(KernelOrder::from_twice(pair.alpha.twice() - 1)?);
    let nb = norm_const(KernelOrder::from_twice(pair.beta.twice() - 1)?);
    let gl = GaussLegendre::new(32);
    let panels = (s * d / 2.0).ceil() as usize + 2;
    let integral = gl.composite(-PI / 2.0, PI / 2.0, panels, |phi| phi.cos().powi(p) * (s * d * phi.sin()).cos());
    let lhs = na * nb * integral / (s * TAU.sqrt());
    let gamma = KernelOrder::from_twice(p)?;
    let nab = norm_const(KernelOrder::from_twice(p - 1)?);
    let rhs = na * nb / nab * bochner_riesz(gamma, s * d)? / s;
    Ok(ConvolutionReport { lhs, rhs, abs_diff: (lhs - rhs).abs(), raw_lhs: lhs * TAU.sqrt() })
}

/// Prefactor and weights of the two projector families in the Cartesian
/// resolution `P ∬ [a k_1(2|x-x'|) |x̊⟩⟨x̊'| + b k_0(2|x-x'|) |ẋ⟩⟨ẋ'|] dx dx'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianWeights {
    pub prefactor: f64,
    pub position: f64,
    pub derivative: f64,
}

impl CartesianWeights {
    /// `P = π^{3/2}/(2√2)`, `a = 4`, `b = 1`.
    pub fn reference() -> Self {
        Self { prefactor: PI.powf(1.5) / (2.0 * 2f64.sqrt()), position: 4.0, derivative: 1.0 }
    }

    /// `P = 1`, `a = 1`, `b = 1/2`: the weights for which the assembled
    /// operator is the identity.
    pub fn unit() -> Self {
        Self { prefactor: 1.0, position: 1.0, derivative: 0.5 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoiMethod {
    Spectral,
    Direct,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoiValue {
    pub value: Complex64,
    /// Domain half-width of the direct path.
    pub half_width: Option<f64>,
}

// Spectra of J_n(2x) and of the derivative coefficients after ω = 2 sin φ,
// with the common 1/(4π cos φ) and 1/(2π√2) factors pulled out.
fn parity(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn position_spectrum(n: i64, phi: f64) -> Complex64 {
    let sign = parity(n);
    Complex64::from_polar(1.0, -(n as f64) * phi) + sign * Complex64::from_polar(1.0, n as f64 * phi)
}

fn derivative_spectrum(n: i64, phi: f64) -> Complex64 {
    let sign = parity(n);
    Complex64::from_polar(1.0, -(n as f64) * phi) - sign * Complex64::from_polar(1.0, n as f64 * phi)
}

fn spectral_element(n: i64, m: i64, w: &CartesianWeights, quad: &QuadratureSpec) -> Complex64 {
    if (n - m) % 2 != 0 {
        // odd integrand on the symmetric interval
        return Complex64::new(0.0, 0.0);
    }
    let panels = quad.panel_count.max(((n.abs() + m.abs()) as usize) / 16 + 1);
    let (pos, der) = match quad.rule {
        QuadratureRule::GaussLegendre => {
            let (ps, ws) = GaussLegendre::new(quad.nodes_per_panel).composite_points(-PI / 2.0, PI / 2.0, panels);
            let mut pos = Complex64::new(0.0, 0.0);
            let mut der = Complex64::new(0.0, 0.0);
            for (&p, &w) in ps.iter().zip(&ws) {
                let (a, b) = (Complex64::from_polar(1.0, -(n as f64) * p), Complex64::from_polar(1.0, m as f64 * p));
                let (sn, sm) = (parity(n), parity(m));
                // e^{-inφ} ± (-1)^n e^{inφ} without re-evaluating the exponentials
                let (pn, dn) = (a + sn * a.conj(), a - sn * a.conj());
                let (pm, dm) = (b.conj() + sm * b, b.conj() - sm * b);
                pos += w * pn.conj() * pm;
                der += w * dn.conj() * dm;
            }
            (pos, der)
        }
        QuadratureRule::Trapezoid => {
            let part = |f: &dyn Fn(f64) -> Complex64| {
                let re = quad.integrate(-PI / 2.0, PI / 2.0, panels, |p| f(p).re);
                let im = quad.integrate(-PI / 2.0, PI / 2.0, panels, |p| f(p).im);
                Complex64::new(re, im)
            };
            (
                part(&|p| position_spectrum(n, p).conj() * position_spectrum(m, p)),
                part(&|p| derivative_spectrum(n, p).conj() * derivative_spectrum(m, p)),
            )
        }
    };
    w.prefactor * (w.position * pos / (4.0 * PI) + w.derivative * der / (2.0 * PI))
}

fn kernel_k0(x: f64) -> f64 {
    bessel_j(0, x).expect("finite")
}

fn kernel_k1(x: f64) -> f64 {
    bochner_riesz(KernelOrder::ONE, x).expect("finite")
}

fn direct_element(n: i64, m: i64, w: &CartesianWeights, quad: &QuadratureSpec) -> Result<Complex64> {
    let l = quad.half_width.ok_or_else(|| domain("the direct method needs a domain half-width L"))?;
    let (xs, ws, uniform) = match quad.rule {
        QuadratureRule::Trapezoid => {
            let per_unit = quad.nodes_per_panel as f64;
            let cells = (2.0 * l * per_unit).ceil() as usize;
            let h = 2.0 * l / cells as f64;
            let xs: Vec<f64> = (0..=cells).map(|i| -l + i as f64 * h).collect();
            let mut ws = vec![h; cells + 1];
            ws[0] = 0.5 * h;
            ws[cells] = 0.5 * h;
            (xs, ws, Some(h))
        }
        QuadratureRule::GaussLegendre => {
            let panels = quad.panel_count.max((2.0 * l).ceil() as usize);
            let (xs, ws) = GaussLegendre::new(quad.nodes_per_panel).composite_points(-l, l, panels);
            (xs, ws, None)
        }
    };
    let jn = |k: i64, x: f64| bessel_j(k as i32, 2.0 * x).expect("finite");
    let dn = |k: i64, x: f64| std::f64::consts::FRAC_1_SQRT_2 * (jn(k - 1, x) + jn(k + 1, x));
    let pn: Vec<f64> = xs.iter().map(|&x| jn(n, x)).collect();
    let pm: Vec<f64> = xs.iter().map(|&x| jn(m, x)).collect();
    let qn: Vec<f64> = xs.iter().map(|&x| dn(n, x)).collect();
    let qm: Vec<f64> = xs.iter().map(|&x| dn(m, x)).collect();
    let table = uniform.map(|h| {
        (0..xs.len()).map(|i| (kernel_k1(2.0 * i as f64 * h), kernel_k0(2.0 * i as f64 * h))).collect::<Vec<_>>()
    });
    let rows: Vec<f64> = (0..xs.len())
        .into_par_iter()
        .map(|i| {
            let mut a = 0.0;
            let mut b = 0.0;
            for j in 0..xs.len() {
                let (k1, k0) = match &table {
                    Some(t) => t[i.abs_diff(j)],
                    None => {
                        let d = 2.0 * (xs[i] - xs[j]).abs();
                        (kernel_k1(d), kernel_k0(d))
                    }
                };
                a += ws[j] * k1 * pm[j];
                b += ws[j] * k0 * qm[j];
            }
            ws[i] * (w.position * pn[i] * a + w.derivative * qn[i] * b)
        })
        .collect();
    Ok(Complex64::new(w.prefactor * rows.iter().sum::<f64>(), 0.0))
}

/// `⟨n|Â|m⟩` of the Cartesian resolution with the given weights.
pub fn cartesian_roi_element(
    n: i64,
    m: i64,
    method: RoiMethod,
    quad: &QuadratureSpec,
    weights: &CartesianWeights,
) -> Result<RoiValue> {
    match method {
        RoiMethod::Spectral => Ok(RoiValue { value: spectral_element(n, m, weights, quad), half_width: None }),
        RoiMethod::Direct => {
            let value = direct_element(n, m, weights, quad)?;
            Ok(RoiValue { value, half_width: quad.half_width })
        }
    }
}

/// Spectral `Â` over a whole window.
pub fn cartesian_roi_matrix(
    window: TruncationWindow,
    weights: &CartesianWeights,
    quad: &QuadratureSpec,
) -> OperatorMatrix {
    let idx: Vec<i64> = window.indices().collect();
    // upper triangle only; Â is Hermitian
    let rows: Vec<Vec<Complex64>> = idx
        .par_iter()
        .map(|&n| idx.iter().filter(|&&m| m >= n).map(|&m| spectral_element(n, m, weights, quad)).collect())
        .collect();
    let h = window.half_width() as i64;
    OperatorMatrix::from_fn(window, |n, m| {
        if m >= n {
            rows[(n + h) as usize][(m - n) as usize]
        } else {
            rows[(m + h) as usize][(n - m) as usize].conj()
        }
    })
}

/// Block constants of the spectral `Â`.
///
/// With `P_E`, `P_O` the projectors onto the even and odd parts under
/// `|n⟩ → (-1)^n|-n⟩`, the assembled operator is `λ_E P_E + λ_O P_O`; it is
/// a multiple of the identity only when the two agree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CartesianNormalization {
    /// `⟨0|Â|0⟩`, used as the single normalization constant `c`.
    pub c: f64,
    pub even: f64,
    pub odd: f64,
    pub reference_prefactor: f64,
}

pub fn cartesian_normalization(weights: &CartesianWeights, quad: &QuadratureSpec) -> CartesianNormalization {
    let e = spectral_element(0, 0, weights, quad).re;
    let one = spectral_element(1, 1, weights, quad).re;
    CartesianNormalization {
        c: e,
        even: e,
        odd: 2.0 * one - e,
        reference_prefactor: CartesianWeights::reference().prefactor,
    }
}

/// The three sandwiched matrix elements of the spectral `Â` between line
/// states, with the closed-form targets `k_0(2d)`, `2k_1(2d)` and `0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossOverlap {
    pub position: f64,
    pub derivative: f64,
    pub mixed: f64,
    pub targets: [f64; 3],
    pub deviations: [f64; 3],
}

pub fn cartesian_roi_cross_overlap(
    x: f64,
    xp: f64,
    weights: &CartesianWeights,
    quad: &QuadratureSpec,
) -> Result<CrossOverlap> {
    finite(x)?;
    finite(xp)?;
    let window = TruncationWindow::new(truncation_rule(2.0 * x.abs().max(xp.abs())) + 2)?;
    let a = cartesian_roi_matrix(window, weights, quad);
    let (p1, d1) = cauchy_line_states(x, window)?;
    let (p2, d2) = cauchy_line_states(xp, window)?;
    let sandwich = |u: &crate::lattice::AmplitudeVector, v: &crate::lattice::AmplitudeVector| -> Result<Complex64> {
        u.inner(&a.apply(v)?)
    };
    let pp = sandwich(&p1, &p2)?;
    let dd = sandwich(&d1, &d2)?;
    let pd = sandwich(&p1, &d2)?;
    let sep = 2.0 * (x - xp).abs();
    let targets = [kernel_k0(sep), 2.0 * kernel_k1(sep), 0.0];
    Ok(CrossOverlap {
        position: pp.re,
        derivative: dd.re,
        mixed: pd.re,
        targets,
        deviations: [(pp - targets[0]).norm(), (dd - targets[1]).norm(), pd.norm()],
    })
}

/// Convolution-inverse kernel `K(θ) = Σ e^{inθ}/J_n(2r₀)²` stored by its
/// Fourier coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarKernel {
    r0: f64,
    cutoff: usize,
    // J_n(2r0) for n = 0..=cutoff
    bessel: Vec<f64>,
    coefficients: Vec<f64>,
}

const OVERFLOW_GUARD: f64 = 1e300;
const POINTWISE_LIMIT: f64 = 1e12;

/// Largest `N_K` with `1/J_{N_K}(2r₀)² < 1e300`.
pub fn max_admissible_cutoff(r0: f64) -> Result<usize> {
    check_circle_radius(r0)?;
    let band = bessel_j_band(400, 2.0 * r0)?;
    let mut last = 0;
    for (n, j) in band.iter().enumerate() {
        let c = 1.0 / (j * j);
        if c.is_finite() && c < OVERFLOW_GUARD {
            last = n;
        } else {
            break;
        }
    }
    Ok(last)
}

pub fn polar_kernel(r0: f64, n_k: usize) -> Result<PolarKernel> {
    check_circle_radius(r0)?;
    if n_k == 0 {
        return Err(domain("kernel cutoff must be positive"));
    }
    let max = max_admissible_cutoff(r0)?;
    if n_k > max {
        return Err(Error::KernelOverflow { max_admissible: max, requested: n_k });
    }
    let bessel = bessel_j_band(n_k, 2.0 * r0)?;
    let coefficients = bessel.iter().map(|j| 1.0 / (j * j)).collect();
    Ok(PolarKernel { r0, cutoff: n_k, bessel, coefficients })
}

impl PolarKernel {
    pub fn r0(&self) -> f64 {
        self.r0
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    /// `1/J_n(2r₀)²`.
    pub fn coefficient(&self, n: i64) -> Result<f64> {
        self.check(n)?;
        Ok(self.coefficients[n.unsigned_abs() as usize])
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().cloned().fold(0.0, f64::max)
    }

    fn check(&self, n: i64) -> Result<()> {
        if n.unsigned_abs() as usize > self.cutoff {
            return Err(Error::IndexOutOfRange { index: n, limit: self.cutoff });
        }
        Ok(())
    }

    fn bessel(&self, n: i64) -> f64 {
        let j = self.bessel[n.unsigned_abs() as usize];
        if n < 0 && n % 2 != 0 {
            -j
        } else {
            j
        }
    }

    /// Pointwise `K(θ)`; refused once the coefficients are so large that
    /// the resummed value is dominated by cancellation error.
    pub fn evaluate(&self, theta: f64) -> Result<f64> {
        finite(theta)?;
        if self.max_coefficient() > POINTWISE_LIMIT {
            return Err(domain(format!(
                "kernel coefficients reach {:.3e}; pointwise resummation is only done below {POINTWISE_LIMIT:e}",
                self.max_coefficient()
            )));
        }
        let mut v = self.coefficients[0];
        for n in 1..=self.cutoff {
            v += 2.0 * self.coefficients[n] * (n as f64 * theta).cos();
        }
        Ok(v)
    }
}

/// `⟨n|Â_p|m⟩` in the Fourier index domain, where `1/J_n(2r₀)²` meets
/// `J_n(2r₀)²`.
pub fn polar_roi_element(n: i64, m: i64, kernel: &PolarKernel) -> Result<Complex64> {
    kernel.check(n)?;
    kernel.check(m)?;
    if n != m {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let j = kernel.bessel(n);
    Ok(Complex64::new(kernel.coefficient(n)? * j * j, 0.0))
}

fn big_to_f64(x: &BigFloat) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    x.to_string().parse().unwrap_or(f64::NAN)
}

// Trapezoid tables for the θ-grid path, held in extended precision and
// reduced to f64 only after the cancelling sums.
struct PolarGrid {
    nodes: usize,
    // S_n/M for n = -N_K..=N_K
    spectrum: Vec<Complex64>,
    // T_d/M for d = -2N_K..=2N_K
    aliasing: Vec<Complex64>,
}

impl PolarGrid {
    fn new(kernel: &PolarKernel, nodes: usize) -> Result<Self> {
        if nodes < 4 * kernel.cutoff + 1 {
            return Err(domain(format!("grid needs at least {} nodes", 4 * kernel.cutoff + 1)));
        }
        let bits = 128 + kernel.max_coefficient().log2().max(0.0).ceil() as usize;
        let p = bits.div_ceil(64) * 64;
        let rm = RoundingMode::ToEven;
        let mut cc = Consts::new().map_err(|e| domain(format!("extended precision unavailable: {e:?}")))?;
        let two_pi = cc.pi(p, rm).mul(&BigFloat::from_f64(2.0, p), p, rm);
        let mm = BigFloat::from_u64(nodes as u64, p);
        let mut cos_t = Vec::with_capacity(nodes);
        let mut sin_t = Vec::with_capacity(nodes);
        for l in 0..nodes {
            let t = two_pi.mul(&BigFloat::from_u64(l as u64, p), p, rm).div(&mm, p, rm);
            cos_t.push(t.cos(p, rm, &mut cc));
            sin_t.push(t.sin(p, rm, &mut cc));
        }
        let at = |k: i64, d: usize| ((k * d as i64).rem_euclid(nodes as i64)) as usize;
        let coef: Vec<BigFloat> = kernel.coefficients.iter().map(|&c| BigFloat::from_f64(c, p)).collect();
        let two = BigFloat::from_f64(2.0, p);
        // K(θ_d) on the grid
        let kd: Vec<BigFloat> = (0..nodes)
            .map(|d| {
                let mut s = coef[0].clone();
                for (k, c) in coef.iter().enumerate().skip(1) {
                    s = s.add(&c.mul(&cos_t[at(k as i64, d)], p, rm).mul(&two, p, rm), p, rm);
                }
                s
            })
            .collect();
        let reduce = |re: BigFloat, im: BigFloat| {
            Complex64::new(big_to_f64(&re.div(&mm, p, rm)), big_to_f64(&im.div(&mm, p, rm)))
        };
        let nk = kernel.cutoff as i64;
        let spectrum = (-nk..=nk)
            .map(|n| {
                let mut re = BigFloat::from_f64(0.0, p);
                let mut im = BigFloat::from_f64(0.0, p);
                for (d, k) in kd.iter().enumerate() {
                    re = re.add(&k.mul(&cos_t[at(n, d)], p, rm), p, rm);
                    im = im.add(&k.mul(&sin_t[at(n, d)], p, rm), p, rm);
                }
                reduce(re, im)
            })
            .collect();
        let aliasing = (-2 * nk..=2 * nk)
            .map(|dn| {
                let mut re = BigFloat::from_f64(0.0, p);
                let mut im = BigFloat::from_f64(0.0, p);
                for l in 0..nodes {
                    re = re.add(&cos_t[at(dn, l)], p, rm);
                    im = im.add(&sin_t[at(dn, l)], p, rm);
                }
                reduce(re, im)
            })
            .collect();
        Ok(Self { nodes, spectrum, aliasing })
    }

    // Σ_l Σ_l' K(θ_l - θ_l') e^{inθ_l} e^{-imθ_l'} / M² = (S_n/M)(T_{n-m}/M)
    fn element(&self, n: i64, m: i64, kernel: &PolarKernel) -> Complex64 {
        let nk = kernel.cutoff as i64;
        self.spectrum[(n + nk) as usize]
            * self.aliasing[(n - m + 2 * nk) as usize]
            * kernel.bessel(n)
            * kernel.bessel(m)
    }
}

/// `⟨n|Â_p|m⟩` from the double θ-integral with the `M`-point trapezoid
/// rule, `K` resummed pointwise on the grid. The cancellation inside that
/// sum loses about `log2 max|K_n|` bits, so the grid sums run in binary
/// floating point of `128 + log2 max|K_n|` bits.
pub fn polar_roi_element_grid(n: i64, m: i64, kernel: &PolarKernel, nodes: usize) -> Result<Complex64> {
    kernel.check(n)?;
    kernel.check(m)?;
    Ok(PolarGrid::new(kernel, nodes)?.element(n, m, kernel))
}

/// All `⟨n|Â_p|m⟩`, `|n|, |m| <= N_K`, by the θ-grid path.
pub fn polar_roi_grid_matrix(kernel: &PolarKernel, nodes: usize) -> Result<OperatorMatrix> {
    let grid = PolarGrid::new(kernel, nodes)?;
    let window = TruncationWindow::new(kernel.cutoff)?;
    debug_assert!(grid.nodes > 4 * kernel.cutoff);
    Ok(OperatorMatrix::from_fn(window, |n, m| grid.element(n, m, kernel)))
}

/// All `⟨n|Â_p|m⟩`, `|n|, |m| <= N_K`, by the Fourier path.
pub fn polar_roi_matrix(kernel: &PolarKernel) -> Result<OperatorMatrix> {
    let window = TruncationWindow::new(kernel.cutoff)?;
    Ok(OperatorMatrix::from_fn(window, |n, m| polar_roi_element(n, m, kernel).expect("inside the cutoff")))
}

/// `⟨θ̊|Â_p|θ̊'⟩` against `J_0(4r₀ sin((θ'-θ)/2))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarOverlap {
    pub value: Complex64,
    pub target: f64,
    pub deviation: f64,
    /// `Σ_{|n|>N_K} J_n(2r₀)²`, the part of the target the truncated
    /// operator cannot see.
    pub tail: f64,
    /// Rounding allowance of the summed value and the closed form.
    pub rounding: f64,
}

impl PolarOverlap {
    pub fn within_bound(&self) -> bool {
        self.deviation <= self.tail + self.rounding
    }
}

pub fn polar_roi_overlap(theta: f64, theta_p: f64, kernel: &PolarKernel) -> Result<PolarOverlap> {
    finite(theta)?;
    finite(theta_p)?;
    let d = theta_p - theta;
    let nk = kernel.cutoff as i64;
    let mut value = Complex64::new(0.0, 0.0);
    let mut abs_sum = 0.0;
    for n in -nk..=nk {
        let j = kernel.bessel(n);
        let a = polar_roi_element(n, n, kernel)?.re;
        let term = j * a * j;
        abs_sum += term.abs();
        value += term * Complex64::from_polar(1.0, n as f64 * d);
    }
    let far = kernel.cutoff + truncation_rule(2.0 * kernel.r0);
    let band = bessel_j_band(far, 2.0 * kernel.r0)?;
    let tail = 2.0 * band[kernel.cutoff + 1..].iter().map(|j| j * j).sum::<f64>();
    let target = circle_overlap_closed(theta, theta_p, kernel.r0);
    Ok(PolarOverlap {
        value,
        target,
        deviation: (value - target).norm(),
        tail,
        rounding: 16.0 * f64::EPSILON * (abs_sum + 1.0),
    })
}

fn check_lambda_open(lambda: f64) -> Result<f64> {
    finite(lambda)?;
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(domain(format!("lambda {lambda} outside (0, 1)")));
    }
    Ok(lambda)
}

/// `∫_0^∞ J_n(2r)² r^{-λ} dr
///   = Γ(λ)Γ(|n|+(1-λ)/2) / (2Γ((λ+1)/2)² Γ(|n|+(1+λ)/2))`.
pub fn naive_diag_closed(n: i64, lambda: f64) -> Result<f64> {
    check_lambda_open(lambda)?;
    let g = gamma_fn((lambda + 1.0) / 2.0)?;
    Ok(gamma_fn(lambda)? / (2.0 * g * g) * naive_diag_normalized(n, lambda)?)
}

/// The closed form with the `n`-independent factor `Γ(λ)/(2Γ((λ+1)/2)²)`
/// removed: `Γ(|n|+(1-λ)/2)/Γ(|n|+(1+λ)/2)`, which tends to 1 as `λ → 0`.
pub fn naive_diag_normalized(n: i64, lambda: f64) -> Result<f64> {
    check_lambda_open(lambda)?;
    let a = n.unsigned_abs() as f64;
    gamma_ratio(a + (1.0 - lambda) / 2.0, a + (1.0 + lambda) / 2.0)
}

/// `∫_0^L J_n(2r)² r^{-λ} dr` for `λ ∈ [-1, 1)`; for `λ ∈ (0, 1)` the
/// neglected tail is added back with the averaged integrand `1/(2πr)`.
pub fn naive_diag_quadrature(n: i64, lambda: f64, l: f64) -> Result<f64> {
    finite(lambda)?;
    finite(l)?;
    if !(-1.0..1.0).contains(&lambda) {
        return Err(domain(format!("lambda {lambda} outside [-1, 1)")));
    }
    if !(l > 0.0) {
        return Err(domain("upper limit must be positive"));
    }
    let m = n.unsigned_abs() as usize;
    let head_end = l.min(1.0);
    // J_n(2r)² = Σ c_k r^{2n+2k}
    let mut c = 1.0;
    for k in 1..=m {
        c /= (k * k) as f64;
    }
    let mut head = 0.0;
    for k in 0..200usize {
        if k > 0 {
            let (nn, kk) = (m as f64, k as f64);
            c *= -(2.0 * nn + 2.0 * kk) * (2.0 * nn + 2.0 * kk - 1.0) / (kk * (2.0 * nn + kk) * (nn + kk).powi(2));
        }
        let e = (2 * m + 2 * k) as f64 - lambda + 1.0;
        let t = c * head_end.powf(e) / e;
        head += t;
        if k > 4 && t.abs() < 1e-18 * head.abs() {
            break;
        }
    }
    let mut body = 0.0;
    if l > 1.0 {
        let gl = GaussLegendre::new(16);
        let panels = (l - 1.0).ceil() as usize;
        body = gl.composite(1.0, l, panels, |r| {
            let j = bessel_j(m as i32, 2.0 * r).expect("finite");
            j * j * r.powf(-lambda)
        });
    }
    let tail = if lambda > 0.0 { l.powf(-lambda) / (TAU * lambda) } else { 0.0 };
    Ok(head + body + tail)
}
