//! Gauss–Legendre and periodic trapezoid rules.

use std::f64::consts::PI;

use crate::error::{domain, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadratureRule {
    GaussLegendre,
    Trapezoid,
}

/// Rule family and layout for a numeric integral.
///
/// `panel_count` is a floor: routines with oscillatory integrands add
/// panels as the oscillation frequency grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub rule: QuadratureRule,
    pub nodes_per_panel: usize,
    pub panel_count: usize,
    pub half_width: Option<f64>,
}

impl QuadratureSpec {
    pub fn new(
        rule: QuadratureRule,
        nodes_per_panel: usize,
        panel_count: usize,
        half_width: Option<f64>,
    ) -> Result<Self> {
        if nodes_per_panel == 0 || panel_count == 0 {
            return Err(domain("quadrature counts must be positive"));
        }
        if let Some(l) = half_width {
            if !(l > 0.0) || !l.is_finite() {
                return Err(domain("quadrature half-width must be positive"));
            }
        }
        Ok(Self { rule, nodes_per_panel, panel_count, half_width })
    }

    pub fn gauss(nodes_per_panel: usize, panel_count: usize) -> Self {
        Self::new(QuadratureRule::GaussLegendre, nodes_per_panel, panel_count, None).expect("positive counts")
    }

    pub fn with_half_width(mut self, l: f64) -> Self {
        self.half_width = Some(l);
        self
    }

    /// Integrate over `[a, b]` with at least `min_panels` panels.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, min_panels: usize, mut f: F) -> f64 {
        let panels = self.panel_count.max(min_panels);
        match self.rule {
            QuadratureRule::GaussLegendre => GaussLegendre::new(self.nodes_per_panel).composite(a, b, panels, f),
            QuadratureRule::Trapezoid => {
                let m = panels * self.nodes_per_panel;
                let h = (b - a) / m as f64;
                let mut s = 0.5 * (f(a) + f(b));
                for i in 1..m {
                    s += f(a + i as f64 * h);
                }
                s * h
            }
        }
    }
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self::gauss(32, 4)
    }
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]` split into `panels` equal panels.
    pub fn composite_points(&self, a: f64, b: f64, panels: usize) -> (Vec<f64>, Vec<f64>) {
        let h = (b - a) / panels as f64;
        let mut xs = Vec::with_capacity(panels * self.len());
        let mut ws = Vec::with_capacity(panels * self.len());
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                xs.push(lo + 0.5 * h * (t + 1.0));
                ws.push(0.5 * h * w);
            }
        }
        (xs, ws)
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        self.composite(a, b, 1, f)
    }

    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let lo = a + p as f64 * h;
            let mut s = 0.0;
            for (t, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(lo + 0.5 * h * (t + 1.0));
            }
            total += 0.5 * h * s;
        }
        total
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Equally spaced nodes `2πl/M`, `l = 0..M`.
pub fn periodic_nodes(m: usize) -> Vec<f64> {
    (0..m).map(|l| 2.0 * PI * l as f64 / m as f64).collect()
}
