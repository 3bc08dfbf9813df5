//! Closed-form paraxial Wigner functions of a vortex packet.
//!
//! All representations share the Gaussian factor
//! exp{−σ² X − P/σ²}, with X and P the position and momentum quadratic forms
//! from [`crate::kinematics`]. They differ only in the Laguerre-bearing
//! prefactor, which is evaluated in log space so that large |ℓ| and points
//! far outside the packet neither overflow nor lose precision.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::kinematics::{
    covariant_p_form, invariant_p_form, invariant_x_form, local_velocity_x_form, PacketSpec,
    PhasePoint, Vec3,
};
use crate::specfun::{laguerre_assoc, log_norm_factor};
use crate::wavepacket::{amp_momentum, amp_position};

/// Choice of the Laguerre-bearing prefactor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WignerForm {
    /// (p⊥/σ)^{2|ℓ|} [L_n^{|ℓ|}(p⊥²/σ²)]²: reproduces the momentum density.
    Momentum,
    /// (σρ)^{2|ℓ|} [L_n^{|ℓ|}(σ²ρ²)]²: reproduces the position density at t = 0.
    Position,
    /// (ρp⊥)^{|ℓ|} [L_n^{|ℓ|}((σ²ρ² + p⊥²/σ²)/2)]².
    Symmetric,
}

impl WignerForm {
    pub const ALL: [WignerForm; 3] = [WignerForm::Momentum, WignerForm::Position, WignerForm::Symmetric];

    pub fn name(&self) -> &'static str {
        match self {
            WignerForm::Momentum => "momentum",
            WignerForm::Position => "position",
            WignerForm::Symmetric => "symmetric",
        }
    }
}

impl std::str::FromStr for WignerForm {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "momentum" => Ok(WignerForm::Momentum),
            "position" => Ok(WignerForm::Position),
            "symmetric" => Ok(WignerForm::Symmetric),
            other => Err(crate::Error::InvalidParameter(format!("unknown Wigner form `{other}`"))),
        }
    }
}

/// Which quadratic forms make up the Gaussian exponent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exponent {
    /// ρ² + (ε̄z − p̄t)²/m² and p⊥² + m²(p_z − p̄)²/ε̄².
    #[default]
    Paraxial,
    /// ρ² + (ε̄z − p̄t)²/m² and p⊥² + (ε̄p_z − p̄ε)²/m²; exactly boost invariant.
    Covariant,
    /// Paraxial, but with z − u_z t using the local velocity u_z = p_z/ε(p).
    LocalVelocity,
}

/// ln of the σ-free prefactor as a function of a = σρ and b = p⊥/σ, or `None`
/// where the prefactor vanishes.
pub fn ln_prefactor_scaled(form: WignerForm, n_r: u32, l: u32, a: f64, b: f64) -> Option<f64> {
    let (power_base, power, arg) = match form {
        WignerForm::Momentum => (b, 2 * l, b * b),
        WignerForm::Position => (a, 2 * l, a * a),
        WignerForm::Symmetric => (a * b, l, 0.5 * (a * a + b * b)),
    };
    let lag = laguerre_assoc(n_r, l, arg);
    if lag == 0.0 || (power > 0 && power_base == 0.0) {
        return None;
    }
    let pow_term = if power > 0 { power as f64 * power_base.ln() } else { 0.0 };
    Some(pow_term + 2.0 * lag.abs().ln())
}

/// (ρp⊥)^{|ℓ|} [L_n^{|ℓ|}(ρp⊥)]², the intermediate expression of the
/// symmetric prefactor chain. Kept for cross-checks against [`WignerForm::Symmetric`].
pub fn symmetric_product_prefactor(n_r: u32, l: u32, rho: f64, p_perp: f64) -> f64 {
    let x = rho * p_perp;
    x.powi(l as i32) * laguerre_assoc(n_r, l, x).powi(2)
}

/// Default closed-form Wigner function (paraxial exponent).
pub fn wigner_closed(spec: &PacketSpec, pt: &PhasePoint, form: WignerForm) -> f64 {
    wigner_closed_with(spec, pt, form, Exponent::Paraxial)
}

pub fn wigner_closed_with(spec: &PacketSpec, pt: &PhasePoint, form: WignerForm, exponent: Exponent) -> f64 {
    let sigma = spec.sigma();
    let Some(pre) = ln_prefactor_scaled(form, spec.n_r(), spec.abs_ell(), sigma * pt.rho, pt.p_perp / sigma)
    else {
        return 0.0;
    };
    let (x_form, p_form) = match exponent {
        Exponent::Paraxial => (invariant_x_form(spec, pt), invariant_p_form(spec, pt)),
        Exponent::Covariant => (invariant_x_form(spec, pt), covariant_p_form(spec, pt)),
        Exponent::LocalVelocity => (local_velocity_x_form(spec, pt), invariant_p_form(spec, pt)),
    };
    let ln_v = log_norm_factor(spec.n_r(), spec.abs_ell()) + pre - sigma * sigma * x_form - p_form / (sigma * sigma);
    8.0 * ln_v.exp()
}

/// The paraxial fermionic Wigner function. Spin does not enter at this order,
/// so this is the scalar function.
pub fn wigner_fermion_paraxial(spec: &PacketSpec, pt: &PhasePoint, form: WignerForm) -> f64 {
    wigner_closed(spec, pt, form)
}

/// ∫d³x n = |Ψ(p)|²/(2ε̄) for the momentum form.
pub fn marginal_x_closed(spec: &PacketSpec, p: Vec3) -> f64 {
    amp_momentum(spec, p).norm_sqr() / (2.0 * spec.eps_bar())
}

/// ∫d³p/(2π)³ n at t = 0 for the momentum form: a Gaussian independent of ℓ and n_r.
pub fn marginal_p_closed(spec: &PacketSpec, r: Vec3) -> f64 {
    let m = spec.mass();
    let s = spec.sigma();
    let eb = spec.eps_bar();
    let q = r.x * r.x + r.y * r.y + eb * eb * r.z * r.z / (m * m);
    (eb / m) * (s / PI.sqrt()).powi(3) * (-s * s * q).exp()
}

/// ∫d³p/(2π)³ n at t = 0 for the position form: 2ε̄|Ψ(r, 0)|².
pub fn marginal_p_alt(spec: &PacketSpec, r: Vec3) -> f64 {
    2.0 * spec.eps_bar() * amp_position(spec, r, 0.0).norm_sqr()
}

/// Largest value of the closed form over phase space.
pub fn peak_value(spec: &PacketSpec, form: WignerForm) -> f64 {
    let (n, l) = (spec.n_r(), spec.abs_ell());
    let profile = |a: f64, b: f64| -> f64 {
        ln_prefactor_scaled(form, n, l, a, b).map_or(f64::NEG_INFINITY, |v| v - a * a - b * b)
    };
    let amax = (4.0 * n as f64 + 2.0 * l as f64 + 8.0).sqrt();
    let steps = 400;
    let grid = |i: usize| amax * i as f64 / steps as f64;
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    match form {
        WignerForm::Momentum | WignerForm::Position => {
            for i in 0..=steps {
                let b = grid(i);
                let v = if form == WignerForm::Momentum { profile(0.0, b) } else { profile(b, 0.0) };
                if v > best.0 {
                    best = (v, b, 0.0);
                }
            }
        }
        WignerForm::Symmetric => {
            for i in 0..=steps {
                for j in 0..=steps {
                    let v = profile(grid(i), grid(j));
                    if v > best.0 {
                        best = (v, grid(i), grid(j));
                    }
                }
            }
        }
    }
    // refine in one variable around the coarse maximum
    let h = amax / steps as f64;
    let refine = |f: &dyn Fn(f64) -> f64, c: f64| -> f64 { f(argmax(f, c, h)) };
    let ln_peak = match form {
        WignerForm::Momentum => refine(&|b| profile(0.0, b), best.1),
        WignerForm::Position => refine(&|a| profile(a, 0.0), best.1),
        WignerForm::Symmetric => {
            // alternate between the two variables
            let (mut a0, mut b0) = (best.1, best.2);
            for _ in 0..6 {
                a0 = argmax(&|a| profile(a, b0), a0, h);
                b0 = argmax(&|b| profile(a0, b), b0, h);
            }
            profile(a0, b0)
        }
    };
    (8f64.ln() + log_norm_factor(n, l) + ln_peak).exp()
}

// ternary search for the maximum of a unimodal function on [c − h, c + h]
fn argmax(f: &dyn Fn(f64) -> f64, c: f64, h: f64) -> f64 {
    let (mut lo, mut hi) = ((c - h).max(0.0), c + h);
    for _ in 0..80 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if f(m1) < f(m2) {
            lo = m1;
        } else {
            hi = m2;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::Boost;
    use crate::specfun::{quad_nodes, QuadratureKind};
    use proptest::prelude::*;

    fn spec(ell: i32, n: u32) -> PacketSpec {
        PacketSpec::paraxial(0.01, 1.0, ell, n).unwrap()
    }

    #[test]
    fn axis_value_is_eight() {
        let s = spec(0, 0);
        let pt = PhasePoint::new(0.0, 0.0, 0.0, 0.0, 0.0, s.pbar(), 0.0);
        for form in WignerForm::ALL {
            assert!((wigner_closed(&s, &pt, form) - 8.0).abs() < 1e-14);
            assert!((wigner_fermion_paraxial(&s, &pt, form) - 8.0).abs() < 1e-14);
        }
    }

    #[test]
    fn vortex_nodes() {
        let s = spec(1, 0);
        let on_rho = PhasePoint::new(0.0, 0.0, 0.0, 0.01, 0.0, 1.0, 0.0);
        assert_eq!(wigner_closed(&s, &on_rho, WignerForm::Position), 0.0);
        assert!(wigner_closed(&s, &on_rho, WignerForm::Momentum) > 0.0);
        let on_p = PhasePoint::new(100.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0);
        assert_eq!(wigner_closed(&s, &on_p, WignerForm::Momentum), 0.0);
        assert_eq!(wigner_closed(&s, &on_p, WignerForm::Symmetric), 0.0);
        assert_eq!(marginal_x_closed(&s, Vec3::new(0.0, 0.0, 1.0)), 0.0);
        assert_eq!(marginal_p_alt(&s, Vec3::new(0.0, 0.0, 5.0)), 0.0);
    }

    #[test]
    fn marginal_p_closed_is_mode_independent() {
        let r = Vec3::new(30.0, -50.0, 20.0);
        let a = marginal_p_closed(&spec(0, 0), r);
        let b = marginal_p_closed(&spec(3, 2), r);
        assert_eq!(a, b);
        let s = spec(0, 0);
        let axis = marginal_p_closed(&s, Vec3::ZERO);
        let expected = s.eps_bar() * (0.01 / PI.sqrt()).powi(3);
        assert!((axis / expected - 1.0).abs() < 1e-14);
    }

    #[test]
    fn forms_agree_on_the_paraxial_shell() {
        let s = spec(3, 2);
        for a in [0.3, 1.0, 2.2] {
            // p⊥/σ = σρ
            let rho = a / s.sigma();
            let pp = a * s.sigma();
            let pt = PhasePoint::new(rho, 0.3, 5.0, pp, 1.0, 1.0, 0.0);
            let m = wigner_closed(&s, &pt, WignerForm::Momentum);
            let p = wigner_closed(&s, &pt, WignerForm::Position);
            assert!((m / p - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn symmetric_prefactor_is_sigma_free() {
        // σ enters only through a = σρ and b = p⊥/σ, whose product is ρp⊥
        let (rho, pp) = (120.0, 0.013);
        let v1 = symmetric_product_prefactor(1, 2, rho, pp);
        let s1 = ln_prefactor_scaled(WignerForm::Symmetric, 1, 2, 0.01 * rho, pp / 0.01);
        let s2 = ln_prefactor_scaled(WignerForm::Symmetric, 1, 2, 0.02 * rho, pp / 0.02);
        assert!(v1 > 0.0);
        // the power part (ρp⊥)^ℓ is identical; only the Laguerre argument moves
        let pow1 = 2.0 * (0.01 * rho * pp / 0.01).ln();
        let pow2 = 2.0 * (0.02 * rho * pp / 0.02).ln();
        assert_eq!(pow1, pow2);
        assert!(s1.is_some() && s2.is_some());
    }

    #[test]
    fn closed_form_is_covariant_under_boosts() {
        let s = spec(2, 1);
        let pt = PhasePoint::new(150.0, 0.7, 40.0, 0.015, 2.0, 1.012, 300.0);
        let v = wigner_closed_with(&s, &pt, WignerForm::Momentum, Exponent::Covariant);
        for eta in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            let (s2, p2) = Boost::new(eta).apply(&s, &pt).unwrap();
            let w = wigner_closed_with(&s2, &p2, WignerForm::Momentum, Exponent::Covariant);
            assert!((w / v - 1.0).abs() < 1e-12, "eta {eta}: {}", w / v - 1.0);
        }
    }

    #[test]
    fn exponent_variants_agree_at_rest() {
        let s = spec(1, 0);
        let pt = PhasePoint::new(90.0, 0.1, 10.0, 0.01, 0.4, 1.0, 0.0);
        let a = wigner_closed_with(&s, &pt, WignerForm::Momentum, Exponent::Paraxial);
        let b = wigner_closed_with(&s, &pt, WignerForm::Momentum, Exponent::LocalVelocity);
        assert!((a / b - 1.0).abs() < 1e-14);
    }

    #[test]
    fn peak_values() {
        let s = spec(0, 0);
        for form in WignerForm::ALL {
            assert!((peak_value(&s, form) - 8.0).abs() < 1e-12);
        }
        // ℓ = 1, n = 0: max of b² e^{−b²} is 1/e
        let s = spec(1, 0);
        let expected = 8.0 / std::f64::consts::E;
        assert!((peak_value(&s, WignerForm::Momentum) / expected - 1.0).abs() < 1e-10);
        // symmetric ℓ = 1: max of ab e^{−a²−b²} = 1/(2e)
        assert!((peak_value(&s, WignerForm::Symmetric) / (4.0 / std::f64::consts::E) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn momentum_form_norm_by_separable_quadrature() {
        // x part and p_z part are Gaussians; integrate the transverse p plane
        let r = quad_nodes(QuadratureKind::Hermite, 40).unwrap();
        for (l, n) in [(0, 0), (2, 1), (3, 2)] {
            let s = spec(l, n);
            let sig = s.sigma();
            let x_int = PI.powf(1.5) * s.mass() / (sig.powi(3) * s.eps_bar());
            let pz_int = PI.sqrt() * sig * s.eps_bar() / s.mass();
            let mut perp = 0.0;
            for (x, wx) in r.iter() {
                for (y, wy) in r.iter() {
                    let pt = PhasePoint::from_cartesian(Vec3::ZERO, Vec3::new(sig * x, sig * y, s.pbar()), 0.0);
                    perp += wx * wy * wigner_closed(&s, &pt, WignerForm::Momentum) / (-(x * x + y * y)).exp();
                }
            }
            let norm = x_int * pz_int * perp * sig * sig / (8.0 * PI.powi(3));
            assert!((norm - 1.0).abs() < 1e-10, "({l},{n}) {norm}");
        }
    }

    proptest! {
        #[test]
        fn positivity(l in -6i32..6, n in 0u32..4, rho in 0.0f64..800.0, z in -900.0f64..900.0,
                      pp in 0.0f64..0.08, pz in 0.9f64..1.1, t in -1e5f64..1e5, form in 0usize..3) {
            let s = PacketSpec::paraxial(0.01, 1.0, l, n).unwrap();
            let pt = PhasePoint::new(rho, 0.0, z, pp, 0.0, pz, t);
            let v = wigner_closed(&s, &pt, WignerForm::ALL[form]);
            prop_assert!(v >= 0.0 && v.is_finite());
        }

        #[test]
        fn large_ell_does_not_overflow(l in 20i32..60, a in 0.0f64..12.0, b in 0.0f64..12.0) {
            let s = PacketSpec::paraxial(0.01, 0.0, l, 0).unwrap();
            let pt = PhasePoint::new(a / 0.01, 0.0, 0.0, b * 0.01, 0.0, 0.0, 0.0);
            for form in WignerForm::ALL {
                let v = wigner_closed(&s, &pt, form);
                prop_assert!(v.is_finite() && v >= 0.0);
            }
        }
    }
}
