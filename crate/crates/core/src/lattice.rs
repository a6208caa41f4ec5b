//! Truncated extended Fock space: step and number operators, plain and
//! twisted Hamiltonians, Bessel propagators, an RK4 oracle, and the
//! displacement operator.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;

use crate::error::{domain, finite, Error, Result};
use crate::specfun::{bessel_j_symmetric, truncation_rule};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Index range `[-N, N]` standing in for ℤ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct TruncationWindow {
    half_width: usize,
}

impl TruncationWindow {
    pub fn new(half_width: usize) -> Result<Self> {
        if half_width == 0 {
            return Err(domain("window half-width must be at least 1"));
        }
        Ok(Self { half_width })
    }

    /// Smallest window whose truncation tail for argument `x` is negligible.
    pub fn for_argument(x: f64) -> Self {
        Self { half_width: truncation_rule(x) }
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    pub fn dim(&self) -> usize {
        2 * self.half_width + 1
    }

    pub fn contains(&self, n: i64) -> bool {
        n.unsigned_abs() as usize <= self.half_width
    }

    /// Storage position of basis index `n`.
    pub fn position(&self, n: i64) -> Option<usize> {
        self.contains(n).then(|| (n + self.half_width as i64) as usize)
    }

    pub fn index_at(&self, pos: usize) -> i64 {
        pos as i64 - self.half_width as i64
    }

    pub fn indices(&self) -> impl Iterator<Item = i64> {
        let n = self.half_width as i64;
        -n..=n
    }

    /// Error unless this window is at least `required` wide.
    pub fn require(&self, required: usize) -> Result<()> {
        if self.half_width < required {
            return Err(Error::WindowTooSmall { required, actual: self.half_width });
        }
        Ok(())
    }

    pub(crate) fn checked_position(&self, n: i64) -> Result<usize> {
        self.position(n).ok_or(Error::IndexOutOfRange { index: n, limit: self.half_width })
    }
}

/// Complex amplitudes `A_n` over a window.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector {
    window: TruncationWindow,
    coeffs: Vec<Complex64>,
}

impl AmplitudeVector {
    pub fn new(window: TruncationWindow, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != window.dim() {
            return Err(domain(format!("expected {} coefficients, got {}", window.dim(), coeffs.len())));
        }
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { window, coeffs })
    }

    pub fn zeros(window: TruncationWindow) -> Self {
        Self { window, coeffs: vec![ZERO; window.dim()] }
    }

    /// The basis vector `e_n`.
    pub fn basis(window: TruncationWindow, n: i64) -> Result<Self> {
        let mut v = Self::zeros(window);
        let p = window.checked_position(n)?;
        v.coeffs[p] = ONE;
        Ok(v)
    }

    pub(crate) fn from_fn(window: TruncationWindow, mut f: impl FnMut(i64) -> Complex64) -> Self {
        Self { window, coeffs: window.indices().map(&mut f).collect() }
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at basis index `n` (zero outside the window).
    pub fn get(&self, n: i64) -> Complex64 {
        self.window.position(n).map_or(ZERO, |p| self.coeffs[p])
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// `⟨self|other⟩`, antilinear in `self`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        if self.window != other.window {
            return Err(domain("vectors live on different windows"));
        }
        Ok(self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let n = self.window.half_width().max(other.window.half_width()) as i64;
        (-n..=n).map(|i| (self.get(i) - other.get(i)).norm()).fold(0.0, f64::max)
    }

    /// Distance between the outermost nonzero coefficient and the window edge.
    pub fn edge_margin(&self) -> usize {
        let n = self.window.half_width();
        let support = self.window.indices().filter(|&i| self.get(i) != ZERO).map(|i| i.unsigned_abs() as usize).max();
        support.map_or(n, |s| n - s)
    }

    pub fn scale(&self, a: Complex64) -> Self {
        Self { window: self.window, coeffs: self.coeffs.iter().map(|c| a * c).collect() }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(domain("vectors live on different windows"));
        }
        let coeffs = self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect();
        Ok(Self { window: self.window, coeffs })
    }
}

/// Dense `(2N+1)×(2N+1)` complex matrix addressed by basis indices.
#[derive(Clone, PartialEq)]
pub struct OperatorMatrix {
    window: TruncationWindow,
    entries: Vec<Complex64>,
}

impl fmt::Debug for OperatorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorMatrix").field("half_width", &self.window.half_width()).finish_non_exhaustive()
    }
}

impl OperatorMatrix {
    pub fn zeros(window: TruncationWindow) -> Self {
        let d = window.dim();
        Self { window, entries: vec![ZERO; d * d] }
    }

    pub fn identity(window: TruncationWindow) -> Self {
        let mut m = Self::zeros(window);
        for p in 0..window.dim() {
            m.entries[p * window.dim() + p] = ONE;
        }
        m
    }

    pub fn from_fn(window: TruncationWindow, f: impl Fn(i64, i64) -> Complex64) -> Self {
        let d = window.dim();
        let mut entries = Vec::with_capacity(d * d);
        for r in 0..d {
            for c in 0..d {
                entries.push(f(window.index_at(r), window.index_at(c)));
            }
        }
        Self { window, entries }
    }

    pub fn window(&self) -> TruncationWindow {
        self.window
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Entry `⟨n|M|m⟩`; zero outside the window.
    pub fn get(&self, n: i64, m: i64) -> Complex64 {
        match (self.window.position(n), self.window.position(m)) {
            (Some(r), Some(c)) => self.entries[r * self.window.dim() + c],
            _ => ZERO,
        }
    }

    pub fn set(&mut self, n: i64, m: i64, v: Complex64) -> Result<()> {
        let r = self.window.checked_position(n)?;
        let c = self.window.checked_position(m)?;
        let d = self.window.dim();
        self.entries[r * d + c] = v;
        Ok(())
    }

    pub fn adjoint(&self) -> Self {
        let d = self.window.dim();
        let mut out = Self::zeros(self.window);
        for r in 0..d {
            for c in 0..d {
                out.entries[c * d + r] = self.entries[r * d + c].conj();
            }
        }
        out
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(domain("matrices live on different windows"));
        }
        let d = self.window.dim();
        let mut out = Self::zeros(self.window);
        for r in 0..d {
            for k in 0..d {
                let a = self.entries[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.entries[r * d + c] += a * other.entries[k * d + c];
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, v: &AmplitudeVector) -> Result<AmplitudeVector> {
        if self.window != v.window {
            return Err(domain("matrix and vector live on different windows"));
        }
        let d = self.window.dim();
        let coeffs = (0..d).map(|r| (0..d).map(|c| self.entries[r * d + c] * v.coeffs[c]).sum()).collect();
        Ok(AmplitudeVector { window: self.window, coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.window != other.window {
            return Err(domain("matrices live on different windows"));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect();
        Ok(Self { window: self.window, entries })
    }

    /// Largest `|M_nm - O_nm|` over `|n|, |m| <= limit`.
    pub fn max_abs_diff_within(&self, other: &Self, limit: usize) -> f64 {
        let l = limit as i64;
        let mut worst = 0.0f64;
        for n in -l..=l {
            for m in -l..=l {
                worst = worst.max((self.get(n, m) - other.get(n, m)).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        let d = self.window.dim();
        (0..d).all(|r| (0..d).all(|c| (self.entries[r * d + c] - self.entries[c * d + r].conj()).norm() <= tol))
    }
}

/// `V̂†`: `|n⟩ → |n+1⟩`, dropping whatever leaves the window.
pub fn step_up_matrix(window: TruncationWindow) -> OperatorMatrix {
    OperatorMatrix::from_fn(window, |n, m| if n == m + 1 { ONE } else { ZERO })
}

/// `V̂`: `|n⟩ → |n-1⟩`.
pub fn step_down_matrix(window: TruncationWindow) -> OperatorMatrix {
    OperatorMatrix::from_fn(window, |n, m| if n + 1 == m { ONE } else { ZERO })
}

/// `n̂`, diagonal with entries `n`.
pub fn number_matrix(window: TruncationWindow) -> OperatorMatrix {
    OperatorMatrix::from_fn(window, |n, m| if n == m { Complex64::new(n as f64, 0.0) } else { ZERO })
}

fn check_twist(theta: f64) -> Result<f64> {
    finite(theta)?;
    if !(0.0..PI).contains(&theta) {
        return Err(domain(format!("twist angle {theta} outside [0, pi)")));
    }
    Ok(theta)
}

/// `Ĥ^θ = -i(e^{iθ}V̂† - e^{-iθ}V̂)`; `θ = π/2` gives `V̂† + V̂`.
pub fn hamiltonian_matrix(window: TruncationWindow, theta: f64) -> Result<OperatorMatrix> {
    check_twist(theta)?;
    let up = -Complex64::i() * Complex64::from_polar(1.0, theta);
    let down = Complex64::i() * Complex64::from_polar(1.0, -theta);
    Ok(OperatorMatrix::from_fn(window, |n, m| {
        if n == m + 1 {
            up
        } else if n + 1 == m {
            down
        } else {
            ZERO
        }
    }))
}

/// `Û^θ(z) = e^{izĤ^θ}` with entries `e^{i(n-m)θ} J_{n-m}(2z)`.
pub fn propagator_matrix(window: TruncationWindow, z: f64, theta: f64) -> Result<OperatorMatrix> {
    finite(z)?;
    finite(theta)?;
    let n = window.half_width();
    let j = bessel_j_symmetric(2 * n, 2.0 * z)?;
    let phase: Vec<Complex64> =
        (-(2 * n as i64)..=2 * n as i64).map(|k| Complex64::from_polar(1.0, k as f64 * theta)).collect();
    let off = 2 * n as i64;
    Ok(OperatorMatrix::from_fn(window, |a, b| {
        let k = (a - b + off) as usize;
        phase[k] * j[k]
    }))
}

/// `D̂(α) = Û^θ(r)` for `α = r e^{iθ}`.
pub fn displacement_matrix(alpha: crate::coherent::CoherentLabel, window: TruncationWindow) -> Result<OperatorMatrix> {
    propagator_matrix(window, alpha.r(), alpha.theta())
}

/// A propagated state plus a flag raised when its support came within one
/// propagation bandwidth of the window edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagated {
    pub state: AmplitudeVector,
    pub edge_warning: bool,
}

fn edge_warning(state: &AmplitudeVector, z: f64) -> bool {
    state.edge_margin() < truncation_rule(2.0 * z)
}

/// `|A(z)⟩ = Û^θ(z)|A(0)⟩` through the Bessel propagator.
pub fn propagate_analytic(state: &AmplitudeVector, z: f64, theta: f64) -> Result<Propagated> {
    let u = propagator_matrix(state.window(), z, theta)?;
    Ok(Propagated { state: u.apply(state)?, edge_warning: edge_warning(state, z) })
}

// y = i Ĥ^θ x on the tridiagonal structure
fn apply_ih(x: &[Complex64], up: Complex64, down: Complex64, y: &mut [Complex64]) {
    let d = x.len();
    for p in 0..d {
        let mut s = ZERO;
        if p > 0 {
            s += up * x[p - 1];
        }
        if p + 1 < d {
            s += down * x[p + 1];
        }
        y[p] = s;
    }
}

/// Classical RK4 integration of `dA/dz = iĤ^θ A`, the sign that reproduces
/// `e^{izĤ^θ}`. Negative `z` integrates backwards.
pub fn propagate_ode(state: &AmplitudeVector, z: f64, theta: f64, dz: f64) -> Result<Propagated> {
    finite(z)?;
    finite(dz)?;
    if !(dz > 0.0) {
        return Err(domain("dz must be positive"));
    }
    finite(theta)?;
    let i = Complex64::i();
    let up = i * (-i * Complex64::from_polar(1.0, theta));
    let down = i * (i * Complex64::from_polar(1.0, -theta));
    let steps = (z.abs() / dz).ceil() as usize;
    let warn = edge_warning(state, z);
    if steps == 0 {
        return Ok(Propagated { state: state.clone(), edge_warning: warn });
    }
    let h = z / steps as f64;
    let d = state.window().dim();
    let mut a = state.coeffs.clone();
    // compensation terms for the running sum a += increment
    let mut comp = vec![ZERO; d];
    let (mut k1, mut k2, mut k3, mut k4) = (vec![ZERO; d], vec![ZERO; d], vec![ZERO; d], vec![ZERO; d]);
    let mut tmp = vec![ZERO; d];
    for _ in 0..steps {
        apply_ih(&a, up, down, &mut k1);
        for p in 0..d {
            tmp[p] = a[p] + 0.5 * h * k1[p];
        }
        apply_ih(&tmp, up, down, &mut k2);
        for p in 0..d {
            tmp[p] = a[p] + 0.5 * h * k2[p];
        }
        apply_ih(&tmp, up, down, &mut k3);
        for p in 0..d {
            tmp[p] = a[p] + h * k3[p];
        }
        apply_ih(&tmp, up, down, &mut k4);
        for p in 0..d {
            let inc = (h / 6.0) * (k1[p] + 2.0 * k2[p] + 2.0 * k3[p] + k4[p]) - comp[p];
            let t = a[p] + inc;
            comp[p] = (t - a[p]) - inc;
            a[p] = t;
        }
    }
    Ok(Propagated { state: AmplitudeVector { window: state.window(), coeffs: a }, edge_warning: warn })
}
