//! Associated Laguerre polynomials, factorial ratios and Gaussian quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest order accepted by [`quad_nodes`].
pub const MAX_ORDER: usize = 512;

/// L_n^α(x) by the three-term recurrence in n.
pub fn laguerre_assoc(n: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..n {
        let k = k as f64;
        let next = ((2.0 * k + 1.0 + a - x) * cur - (k + a) * prev) / (k + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// ln(n!/(n+α)!), accumulated in log space so that large α does not overflow.
pub fn log_norm_factor(n: u32, alpha: u32) -> f64 {
    -(n + 1..=n + alpha).map(|k| (k as f64).ln()).sum::<f64>()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuadratureKind {
    /// ∫ f(x) e^{−x²} dx over the real line.
    Hermite,
    /// ∫ f(x) dx over [−1, 1].
    Legendre,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: QuadratureKind,
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    /// Σ wᵢ f(xᵢ).
    pub fn sum<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    /// Nodes with weights divided by the weight function, so that
    /// Σ w̃ f(x) ≈ ∫ f(x) dx for integrands that already carry their own decay.
    pub fn iter_unweighted(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let hermite = self.kind == QuadratureKind::Hermite;
        self.iter().map(move |(x, w)| (x, if hermite { w * (x * x).exp() } else { w }))
    }
}

pub fn quad_nodes(kind: QuadratureKind, order: usize) -> Result<QuadratureRule> {
    if !(2..=MAX_ORDER).contains(&order) {
        return Err(Error::UnsupportedOrder(order));
    }
    let (nodes, weights) = match kind {
        QuadratureKind::Hermite => hermite_nodes(order),
        QuadratureKind::Legendre => legendre_nodes(order),
    };
    Ok(QuadratureRule { kind, order, nodes, weights })
}

/// Shared, lazily built rules. Rules are immutable once constructed.
pub fn cached_rule(kind: QuadratureKind, order: usize) -> Result<Arc<QuadratureRule>> {
    static CACHE: OnceLock<Mutex<HashMap<(QuadratureKind, usize), Arc<QuadratureRule>>>> =
        OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(rule) = cache.lock().unwrap().get(&(kind, order)) {
        return Ok(rule.clone());
    }
    let rule = Arc::new(quad_nodes(kind, order)?);
    cache.lock().unwrap().insert((kind, order), rule.clone());
    Ok(rule)
}

// Orthonormal Hermite functions φ_{n−1}(x), φ_n(x), including e^{−x²/2}.
fn hermite_functions(n: usize, x: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = x * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p2, p1)
}

// Positive roots by a sign-change scan, each polished by bracketed Newton;
// weights e^{−x²}/(n φ_{n−1}²) in log form.
fn hermite_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let upper = (2.0 * nf + 1.0).sqrt() + 1.0;
    let want = n / 2;
    let mut steps = 40 * n;
    let roots = loop {
        let h = upper / steps as f64;
        let mut roots = Vec::with_capacity(want);
        // the odd-order root at 0 is handled separately
        let mut a = if n % 2 == 1 { 0.5 * h } else { 0.0 };
        let mut fa = hermite_functions(n, a).1;
        while a < upper && roots.len() < want {
            let b = a + h;
            let fb = hermite_functions(n, b).1;
            if fa == 0.0 || fa.signum() != fb.signum() {
                roots.push(polish_root(n, a, b));
            }
            a = b;
            fa = fb;
        }
        if roots.len() == want || steps > 4000 * n {
            break roots;
        }
        steps *= 4;
    };
    let mut x = Vec::with_capacity(n);
    let mut w = Vec::with_capacity(n);
    let weight = |z: f64| {
        let (prev, _) = hermite_functions(n, z);
        (-z * z - nf.ln() - 2.0 * prev.abs().ln()).exp()
    };
    for &z in roots.iter().rev() {
        x.push(-z);
        w.push(weight(z));
    }
    if n % 2 == 1 {
        x.push(0.0);
        w.push(weight(0.0));
    }
    for &z in &roots {
        x.push(z);
        w.push(weight(z));
    }
    (x, w)
}

fn polish_root(n: usize, mut lo: f64, mut hi: f64) -> f64 {
    let nf = n as f64;
    let f_lo = hermite_functions(n, lo).1;
    let mut z = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (prev, cur) = hermite_functions(n, z);
        if cur == 0.0 {
            return z;
        }
        if cur.signum() == f_lo.signum() {
            lo = z;
        } else {
            hi = z;
        }
        let d = (2.0 * nf).sqrt() * prev - z * cur;
        let mut next = z - cur / d;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - z).abs() <= 1e-15 * z.abs().max(1.0) {
            return next;
        }
        z = next;
    }
    z
}

fn legendre_nodes(n: usize) -> (Vec<f64>, Vec<f64>) {
    let nf = n as f64;
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 1..=n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf - 1.0) * z * p2 - (jf - 1.0) * p3) / jf;
            }
            pp = nf * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() <= 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
    (x, w)
}

/// ∫_a^b f over `panels` equal sub-intervals, each with a Gauss–Legendre rule.
pub fn integrate_panels<F: FnMut(f64) -> f64>(
    rule: &QuadratureRule,
    a: f64,
    b: f64,
    panels: usize,
    mut f: F,
) -> f64 {
    debug_assert_eq!(rule.kind, QuadratureKind::Legendre);
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for k in 0..panels {
        let lo = a + k as f64 * h;
        let mid = lo + 0.5 * h;
        total += 0.5 * h * rule.sum(|x| f(mid + 0.5 * h * x));
    }
    total
}
