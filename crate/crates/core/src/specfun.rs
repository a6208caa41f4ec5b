//! Scalar special functions: integer and half-integer Bessel functions,
//! spherical Bessel functions, Bessel zeros, Gamma, and the Bochner–Riesz
//! kernels `k_α(x) = J_α(x)/x^α`.

use std::f64::consts::{FRAC_2_PI, PI};

use crate::error::{domain, finite, Error, Result};

/// Cutoffs for the power series used at small arguments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPolicy {
    pub max_terms: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
}

impl Default for EvaluationPolicy {
    fn default() -> Self {
        Self { max_terms: 500, abs_tol: 1e-300, rel_tol: 1e-17 }
    }
}

impl EvaluationPolicy {
    pub fn new(max_terms: usize, abs_tol: f64, rel_tol: f64) -> Result<Self> {
        if max_terms == 0 || !(abs_tol > 0.0) || !(rel_tol > 0.0) {
            return Err(domain("policy needs max_terms >= 1 and positive tolerances"));
        }
        Ok(Self { max_terms, abs_tol, rel_tol })
    }
}

/// Half-width needed so that `Σ_{|n|>N} J_n(x)²` is below roughly 1e-15.
pub fn truncation_rule(x: f64) -> usize {
    let a = x.abs();
    (a + 12.0 * (a + 1.0).cbrt() + 15.0).ceil() as usize
}

const SERIES_LIMIT: f64 = 8.0;
const HANKEL_LIMIT: f64 = 25.0;

fn parity(n: i64) -> f64 {
    if n % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Power series for `J_n(x)`, `n >= 0`.
pub fn bessel_j_series(n: u32, x: f64, policy: &EvaluationPolicy) -> f64 {
    let h = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= h / k as f64;
    }
    if term == 0.0 {
        return 0.0;
    }
    let q = -h * h;
    let mut sum = term;
    for m in 1..policy.max_terms {
        term *= q / (m as f64 * (m + n as usize) as f64);
        sum += term;
        if term.abs() <= policy.rel_tol * sum.abs() || term.abs() < policy.abs_tol {
            break;
        }
    }
    sum
}

// Hankel asymptotic expansion for J_0 and J_1 at large x.
fn hankel_j01(x: f64) -> (f64, f64) {
    let eval = |nu: f64| {
        let mu = 4.0 * nu * nu;
        let mut p = 1.0;
        let mut q = 0.0;
        let mut a = 1.0;
        let mut last = f64::INFINITY;
        for k in 1..60 {
            let odd = (2 * k - 1) as f64;
            a *= (mu - odd * odd) / (k as f64 * 8.0 * x);
            if a.abs() >= last || a == 0.0 {
                break;
            }
            last = a.abs();
            match k % 4 {
                1 => q += a,
                2 => p -= a,
                3 => q -= a,
                _ => p += a,
            }
            if a.abs() < 1e-17 {
                break;
            }
        }
        (p, q)
    };
    let (s, c) = x.sin_cos();
    let r = (FRAC_2_PI / x).sqrt() * std::f64::consts::FRAC_1_SQRT_2;
    let (p0, q0) = eval(0.0);
    let (p1, q1) = eval(1.0);
    // chi_0 = x - pi/4, chi_1 = x - 3pi/4, expanded to keep full precision
    let j0 = r * (p0 * (c + s) - q0 * (s - c));
    let j1 = r * (p1 * (s - c) + q1 * (s + c));
    (j0, j1)
}

// Miller backward recurrence for J_0..J_{n_max}(x), x > 0, normalized by
// J_0 + 2 Σ J_{2k} = 1.
fn miller_band(n_max: usize, x: f64) -> Vec<f64> {
    let m0 = n_max.max(x.ceil() as usize).max(truncation_rule(x));
    let mut start = m0 + (160.0 * m0 as f64).sqrt().ceil() as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut out = vec![0.0; n_max + 1];
    let mut fp1 = 0.0;
    let mut f = 1e-300;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        if k <= n_max {
            out[k] = f;
        }
        if k % 2 == 0 {
            sum += 2.0 * f;
        }
        let fm1 = (2.0 * k as f64 / x) * f - fp1;
        fp1 = f;
        f = fm1;
        if f.abs() > 1e250 {
            const S: f64 = 1e-250;
            for v in out.iter_mut().skip(k) {
                *v *= S;
            }
            fp1 *= S;
            f *= S;
            sum *= S;
        }
    }
    out[0] = f;
    sum += f;
    for v in &mut out {
        *v /= sum;
    }
    out
}

fn bessel_j_nonneg(n: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_LIMIT {
        return bessel_j_series(n as u32, x, &EvaluationPolicy::default());
    }
    if x >= HANKEL_LIMIT && (n as f64) < x {
        let (j0, j1) = hankel_j01(x);
        if n == 0 {
            return j0;
        }
        let (mut prev, mut cur) = (j0, j1);
        for k in 1..n {
            let next = (2.0 * k as f64 / x) * cur - prev;
            prev = cur;
            cur = next;
        }
        return cur;
    }
    miller_band(n, x)[n]
}

/// `J_n(x)` for integer order.
pub fn bessel_j(n: i32, x: f64) -> Result<f64> {
    finite(x)?;
    let mut sign = 1.0;
    let m = n.unsigned_abs() as usize;
    if n < 0 {
        sign *= parity(m as i64);
    }
    if x < 0.0 {
        sign *= parity(m as i64);
    }
    Ok(sign * bessel_j_nonneg(m, x.abs()))
}

/// `J_0(x), ..., J_{n_max}(x)` in one backward sweep.
pub fn bessel_j_band(n_max: usize, x: f64) -> Result<Vec<f64>> {
    finite(x)?;
    let a = x.abs();
    let mut out = if a == 0.0 {
        let mut v = vec![0.0; n_max + 1];
        v[0] = 1.0;
        v
    } else if a < 1e-4 {
        let p = EvaluationPolicy::default();
        (0..=n_max).map(|n| bessel_j_series(n as u32, a, &p)).collect()
    } else {
        miller_band(n_max, a)
    };
    if x < 0.0 {
        for v in out.iter_mut().skip(1).step_by(2) {
            *v = -*v;
        }
    }
    Ok(out)
}

/// `J_n(x)` for `n = -n_max..=n_max`, index `n + n_max`.
pub fn bessel_j_symmetric(n_max: usize, x: f64) -> Result<Vec<f64>> {
    let band = bessel_j_band(n_max, x)?;
    let mut out = Vec::with_capacity(2 * n_max + 1);
    for n in (1..=n_max).rev() {
        out.push(parity(n as i64) * band[n]);
    }
    out.extend_from_slice(&band);
    Ok(out)
}

/// Spherical Bessel function `j_n(x)`.
pub fn spherical_j(n: u32, x: f64) -> Result<f64> {
    finite(x)?;
    if x < 0.0 {
        return Ok(parity(n as i64) * spherical_j(n, -x)?);
    }
    if x < 2.0 {
        return Ok(x.powi(n as i32) * spherical_scaled_series(n, x));
    }
    let j0 = x.sin() / x;
    let j1 = x.sin() / (x * x) - x.cos() / x;
    if n == 0 {
        return Ok(j0);
    }
    if n == 1 {
        return Ok(j1);
    }
    if x >= n as f64 {
        let (mut prev, mut cur) = (j0, j1);
        for k in 1..n {
            let next = ((2 * k + 1) as f64 / x) * cur - prev;
            prev = cur;
            cur = next;
        }
        return Ok(cur);
    }
    let start = n as usize + 20 + (160.0 * n as f64).sqrt().ceil() as usize;
    let mut fp1 = 0.0;
    let mut f = 1e-300;
    let mut fn_ = 0.0;
    let mut f1 = 0.0;
    for k in (1..=start).rev() {
        if k == n as usize {
            fn_ = f;
        }
        if k == 1 {
            f1 = f;
        }
        let fm1 = ((2 * k + 1) as f64 / x) * f - fp1;
        fp1 = f;
        f = fm1;
        if f.abs() > 1e250 {
            fp1 *= 1e-250;
            f *= 1e-250;
            fn_ *= 1e-250;
            f1 *= 1e-250;
        }
    }
    let scale = if j0.abs() >= j1.abs() { j0 / f } else { j1 / f1 };
    Ok(fn_ * scale)
}

// j_n(x)/x^n from its power series; good for small x.
fn spherical_scaled_series(n: u32, x: f64) -> f64 {
    let mut lead = 1.0;
    for k in 0..n {
        lead /= (2 * k + 3) as f64;
    }
    let q = -0.5 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200u32 {
        term *= q / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    lead * sum
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn lanczos_sum(z: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    a
}

/// Gamma function; poles at non-positive integers are domain errors.
pub fn gamma_fn(x: f64) -> Result<f64> {
    finite(x)?;
    if x <= 0.0 && x.fract() == 0.0 {
        return Err(domain(format!("gamma has a pole at {x}")));
    }
    if x < 0.5 {
        return Ok(PI / ((PI * x).sin() * gamma_fn(1.0 - x)?));
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    let half = t.powf(0.5 * (z + 0.5));
    Ok((2.0 * PI).sqrt() * half * (-t).exp() * half * lanczos_sum(z))
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    finite(x)?;
    if x <= 0.0 {
        return Err(domain("ln_gamma needs x > 0"));
    }
    if x < 0.5 {
        return Ok((PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let t = z + LANCZOS_G + 0.5;
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + lanczos_sum(z).ln())
}

/// `Γ(a)/Γ(b)` for positive arguments, through logarithms when large.
pub fn gamma_ratio(a: f64, b: f64) -> Result<f64> {
    if a.max(b) < 100.0 {
        Ok(gamma_fn(a)? / gamma_fn(b)?)
    } else {
        Ok((ln_gamma(a)? - ln_gamma(b)?).exp())
    }
}

/// Order of a Bochner–Riesz kernel: an integer or half-integer `α >= -1/2`,
/// stored as `2α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KernelOrder(i32);

impl KernelOrder {
    pub const MINUS_HALF: Self = Self(-1);
    pub const ZERO: Self = Self(0);
    pub const HALF: Self = Self(1);
    pub const ONE: Self = Self(2);
    pub const THREE_HALVES: Self = Self(3);

    pub fn from_twice(twice: i32) -> Result<Self> {
        if twice < -1 {
            return Err(domain(format!("kernel order {} is below -1/2", twice as f64 / 2.0)));
        }
        Ok(Self(twice))
    }

    pub fn new(alpha: f64) -> Result<Self> {
        finite(alpha)?;
        let t = 2.0 * alpha;
        if t.fract() != 0.0 {
            return Err(Error::UnsupportedOrder(alpha));
        }
        Self::from_twice(t as i32)
    }

    pub fn alpha(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn twice(self) -> i32 {
        self.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }
}

/// `N_α = 1/(2^α Γ(α+1))`, the value of `k_α` at the origin.
pub fn norm_const(order: KernelOrder) -> f64 {
    let a = order.alpha();
    // alpha >= -1/2 keeps alpha + 1 away from the poles
    1.0 / (2f64.powf(a) * gamma_fn(a + 1.0).expect("alpha + 1 > 0"))
}

/// Bochner–Riesz kernel `k_α(x) = J_α(x)/x^α` with the removable
/// singularity at 0 filled in.
pub fn bochner_riesz(order: KernelOrder, x: f64) -> Result<f64> {
    finite(x)?;
    if x < 0.0 {
        return Err(domain("bochner_riesz needs x >= 0"));
    }
    let t = order.twice();
    let root = FRAC_2_PI.sqrt();
    if t == -1 {
        return Ok(root * x.cos());
    }
    if t % 2 == 1 {
        let m = ((t - 1) / 2) as u32;
        if x < 2.0 {
            return Ok(root * spherical_scaled_series(m, x));
        }
        return Ok(root * spherical_j(m, x)? / x.powi(m as i32));
    }
    let n = t / 2;
    if x <= SERIES_LIMIT {
        let h = 0.5 * x;
        let mut term = 0.5f64.powi(n);
        for k in 1..=n {
            term /= k as f64;
        }
        let mut sum = term;
        for k in 1..200 {
            term *= -h * h / (k as f64 * (k + n) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        return Ok(sum);
    }
    Ok(bessel_j(n, x)? / x.powi(n))
}

/// The `j`-th positive zero of `J_n`.
pub fn bessel_zero(n: i32, j: u32) -> Result<f64> {
    if n < 0 || j == 0 {
        return Err(domain("bessel_zero needs n >= 0 and j >= 1"));
    }
    let f = |x: f64| bessel_j_nonneg(n as usize, x);
    let step = 0.25;
    let mut a = n as f64;
    let mut fa = f(a);
    let mut found = 0;
    loop {
        let b = a + step;
        let fb = f(b);
        if fa == 0.0 && a > 0.0 {
            found += 1;
            if found == j {
                return Ok(a);
            }
        } else if fa * fb < 0.0 {
            found += 1;
            if found == j {
                return Ok(refine_zero(n, a, b));
            }
        }
        a = b;
        fa = fb;
    }
}

fn refine_zero(n: i32, mut a: f64, mut b: f64) -> f64 {
    let f = |x: f64| bessel_j_nonneg(n as usize, x);
    let mut fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let fm = f(m);
        if fa * fm <= 0.0 {
            b = m;
        } else {
            a = m;
            fa = fm;
        }
    }
    let mut z = 0.5 * (a + b);
    for _ in 0..2 {
        let d = 0.5 * (bessel_j(n - 1, z).unwrap() - bessel_j(n + 1, z).unwrap());
        if d != 0.0 {
            z -= f(z) / d;
        }
    }
    z
}
