//! Positive-energy Dirac bispinors in the standard representation.
//!
//! Spin is quantised along z in the rest frame. Normalisation follows
//! ū u = 2m and u†u = 2ε(p).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::kinematics::{energy, Vec3};

pub type Matrix4 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Up,
    Down,
}

impl Spin {
    pub const BOTH: [Spin; 2] = [Spin::Up, Spin::Down];

    fn chi(self) -> [Complex64; 2] {
        match self {
            Spin::Up => [ONE, ZERO],
            Spin::Down => [ZERO, ONE],
        }
    }
}

impl std::str::FromStr for Spin {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "up" => Ok(Spin::Up),
            "down" => Ok(Spin::Down),
            other => Err(crate::Error::InvalidParameter(format!("unknown spin `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bispinor {
    pub components: [Complex64; 4],
    pub momentum: Vec3,
    pub spin: Spin,
}

impl Bispinor {
    /// ū₁ u₂ = u₁† γ⁰ u₂.
    pub fn bar_dot(&self, other: &Bispinor) -> Complex64 {
        let a = &self.components;
        let b = &other.components;
        a[0].conj() * b[0] + a[1].conj() * b[1] - a[2].conj() * b[2] - a[3].conj() * b[3]
    }

    /// u₁† u₂.
    pub fn dagger_dot(&self, other: &Bispinor) -> Complex64 {
        self.components.iter().zip(&other.components).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.dagger_dot(self).re.sqrt()
    }
}

// σ·p acting on a two-component spinor
fn sigma_dot(p: Vec3, chi: [Complex64; 2]) -> [Complex64; 2] {
    let pz = Complex64::new(p.z, 0.0);
    let pminus = Complex64::new(p.x, -p.y);
    let pplus = Complex64::new(p.x, p.y);
    [pz * chi[0] + pminus * chi[1], pplus * chi[0] - pz * chi[1]]
}

/// u(p, s) with upper components sqrt(ε+m) χ_s and lower (σ·p) χ_s / sqrt(ε+m).
pub fn dirac_u(mass: f64, p: Vec3, spin: Spin) -> Bispinor {
    let e = energy(mass, p);
    let root = (e + mass).sqrt();
    let chi = spin.chi();
    let lower = sigma_dot(p, chi);
    Bispinor {
        components: [chi[0] * root, chi[1] * root, lower[0] / root, lower[1] / root],
        momentum: p,
        spin,
    }
}

/// γ^μ in the standard (Dirac) representation.
pub fn gamma(mu: usize) -> Matrix4 {
    let mut g = [[ZERO; 4]; 4];
    // Pauli blocks
    let pauli: [[Complex64; 2]; 2] = match mu {
        0 => {
            for (i, row) in g.iter_mut().enumerate() {
                row[i] = if i < 2 { ONE } else { -ONE };
            }
            return g;
        }
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("gamma index {mu} out of range"),
    };
    for i in 0..2 {
        for j in 0..2 {
            g[i][j + 2] = pauli[i][j];
            g[i + 2][j] = -pauli[i][j];
        }
    }
    g
}

/// ‖(γ^μ p_μ − m) u‖, the free Dirac equation residual.
pub fn dirac_residual(mass: f64, u: &Bispinor) -> f64 {
    let p = u.momentum;
    let e = energy(mass, p);
    let coeffs = [e, -p.x, -p.y, -p.z];
    let mut out = [ZERO; 4];
    for (mu, c) in coeffs.iter().enumerate() {
        let g = gamma(mu);
        for i in 0..4 {
            for j in 0..4 {
                out[i] += g[i][j] * u.components[j] * *c;
            }
        }
    }
    for i in 0..4 {
        out[i] -= u.components[i] * mass;
    }
    out.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// (1/2m) ū_s(p − k/2) u_s'(p + k/2) / sqrt(2ε(p − k/2) 2ε(p + k/2)).
pub fn pairing_ratio(mass: f64, p: Vec3, k: Vec3, s: Spin, s_prime: Spin) -> Complex64 {
    let (lo, hi) = shifted(p, k);
    let a = dirac_u(mass, lo, s);
    let b = dirac_u(mass, hi, s_prime);
    let norm = (2.0 * energy(mass, lo) * 2.0 * energy(mass, hi)).sqrt();
    a.bar_dot(&b) / (2.0 * mass * norm)
}

/// The Hermitian-conjugate variant, u_s†(p − k/2) u_s'(p + k/2) / (2ε(p − k/2) 2ε(p + k/2)).
///
/// Both ratios equal 1/2ε(p) at k = 0.
pub fn dagger_pairing_ratio(mass: f64, p: Vec3, k: Vec3, s: Spin, s_prime: Spin) -> Complex64 {
    let (lo, hi) = shifted(p, k);
    let a = dirac_u(mass, lo, s);
    let b = dirac_u(mass, hi, s_prime);
    a.dagger_dot(&b) / (2.0 * energy(mass, lo) * 2.0 * energy(mass, hi))
}

fn shifted(p: Vec3, k: Vec3) -> (Vec3, Vec3) {
    let half = k.scale(0.5);
    (p - half, p + half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rest_frame_spinor() {
        let u = dirac_u(1.0, Vec3::ZERO, Spin::Up);
        assert_eq!(u.components[0], Complex64::new(2f64.sqrt(), 0.0));
        for c in &u.components[1..] {
            assert_eq!(*c, ZERO);
        }
    }

    #[test]
    fn normalisation_and_dirac_equation() {
        let m = 1.0;
        for p in [Vec3::new(0.3, 0.1, 5.0), Vec3::new(-0.02, 0.01, 0.0), Vec3::new(1e-3, 0.0, 1.0)] {
            for s in Spin::BOTH {
                let u = dirac_u(m, p, s);
                let ubu = u.bar_dot(&u);
                let udu = u.dagger_dot(&u);
                assert!((ubu.re - 2.0 * m).abs() < 1e-12 && ubu.im.abs() < 1e-12);
                assert!((udu.re - 2.0 * energy(m, p)).abs() < 1e-12 && udu.im.abs() < 1e-12);
                assert!(dirac_residual(m, &u) <= 1e-10 * u.norm());
            }
        }
    }

    #[test]
    fn gamma_anticommutators() {
        let metric = [1.0, -1.0, -1.0, -1.0];
        for mu in 0..4 {
            for nu in 0..4 {
                let (a, b) = (gamma(mu), gamma(nu));
                for i in 0..4 {
                    for j in 0..4 {
                        let mut acc = ZERO;
                        for k in 0..4 {
                            acc += a[i][k] * b[k][j] + b[i][k] * a[k][j];
                        }
                        let expected = if mu == nu && i == j { 2.0 * metric[mu] } else { 0.0 };
                        assert!((acc - Complex64::new(expected, 0.0)).norm() < 1e-15);
                    }
                }
            }
        }
    }

    #[test]
    fn pairing_at_zero_offset() {
        let p = Vec3::new(0.3, 0.1, 5.0);
        let e = energy(1.0, p);
        for s in Spin::BOTH {
            let r = pairing_ratio(1.0, p, Vec3::ZERO, s, s);
            assert!((r - Complex64::new(1.0 / (2.0 * e), 0.0)).norm() < 1e-15);
            let d = dagger_pairing_ratio(1.0, p, Vec3::ZERO, s, s);
            assert!((d - Complex64::new(1.0 / (2.0 * e), 0.0)).norm() < 1e-15);
        }
        let off = pairing_ratio(1.0, p, Vec3::ZERO, Spin::Up, Spin::Down);
        assert!(off.norm() < 1e-15);
    }

    #[test]
    fn pairing_conjugation_symmetry() {
        let p = Vec3::new(0.02, -0.01, 1.0);
        let k = Vec3::new(0.013, 0.004, -0.02);
        let neg = k.scale(-1.0);
        for s in Spin::BOTH {
            for t in Spin::BOTH {
                let a = pairing_ratio(1.0, p, neg, t, s);
                let b = pairing_ratio(1.0, p, k, s, t).conj();
                assert!((a - b).norm() < 1e-15);
            }
        }
    }

    fn diag_deviation(p: Vec3, k: Vec3) -> f64 {
        let e = energy(1.0, p);
        (pairing_ratio(1.0, p, k, Spin::Up, Spin::Up) - Complex64::new(1.0 / (2.0 * e), 0.0)).norm()
    }

    #[test]
    fn diagonal_deviation_is_quadratic_in_k() {
        let p = Vec3::new(0.3, 0.1, 5.0);
        let e = energy(1.0, p);
        let dir = p.scale(1.0 / p.norm());
        let ks: Vec<f64> = (0..3).map(|i| e * 1e-3 / 2f64.powi(i)).collect();
        let devs: Vec<f64> = ks.iter().map(|&k| diag_deviation(p, dir.scale(k))).collect();
        for w in devs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((slope - 2.0).abs() < 0.1, "slope {slope}");
        }
    }

    #[test]
    fn transverse_offset_has_a_linear_piece() {
        // i(p × k)_z enters at first order in k when p has a transverse part
        let p = Vec3::new(0.3, 0.1, 5.0);
        let k = Vec3::new(-0.1, 0.3, 0.0).scale(1e-3);
        let slope = (diag_deviation(p, k) / diag_deviation(p, k.scale(0.5))).log2();
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    fn off_diagonal(pbar: f64, sigma: f64, k_dir: Vec3) -> f64 {
        let p = Vec3::new(sigma, 0.0, pbar);
        pairing_ratio(1.0, p, k_dir.scale(sigma), Spin::Up, Spin::Down).norm()
    }

    #[test]
    fn off_diagonal_scales_with_sigma_squared() {
        let slope = |pbar: f64, k: Vec3| (off_diagonal(pbar, 0.01, k) / off_diagonal(pbar, 0.005, k)).log2();
        // packet at rest: every term is second order
        let s = slope(0.0, Vec3::new(0.3, 1.0, 0.5));
        assert!((s - 2.0).abs() < 0.1, "slope {s}");
        // moving packet, longitudinal offset only
        let s = slope(1.0, Vec3::new(0.0, 0.0, 1.0));
        assert!((s - 2.0).abs() < 0.1, "slope {s}");
        // moving packet, transverse offset: p̄ ẑ × k⊥ is first order
        let s = slope(1.0, Vec3::new(0.0, 1.0, 0.5));
        assert!((s - 1.0).abs() < 0.1, "slope {s}");
    }
}
