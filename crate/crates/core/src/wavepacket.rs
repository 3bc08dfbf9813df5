//! Paraxial Laguerre-Gaussian amplitudes in momentum and position space.
//!
//! Two normalisation conventions coexist: the relativistic Ψ, normalised with
//! the invariant measure d³p/(2π)³/2ε, and ψ = Ψ/sqrt(2ε). In the pre-exponential
//! factors ε is replaced by the mean energy ε̄.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{PacketSpec, Vec3};
use crate::specfun::{laguerre_assoc, log_norm_factor};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Convention {
    /// Ψ, normalised with d³p/(2π)³ 1/2ε.
    Relativistic,
    /// ψ = Ψ/sqrt(2ε).
    NonRelativistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexAmplitude {
    pub value: Complex64,
    pub convention: Convention,
}

impl ComplexAmplitude {
    pub fn relativistic(value: Complex64) -> Self {
        Self { value, convention: Convention::Relativistic }
    }

    pub fn nonrelativistic(value: Complex64) -> Self {
        Self { value, convention: Convention::NonRelativistic }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.value.norm_sqr()
    }

    /// Re-expresses the amplitude in `target` convention using energy `eps`.
    pub fn to_convention(&self, target: Convention, eps: f64) -> Self {
        let value = match (self.convention, target) {
            (Convention::Relativistic, Convention::NonRelativistic) => self.value / (2.0 * eps).sqrt(),
            (Convention::NonRelativistic, Convention::Relativistic) => self.value * (2.0 * eps).sqrt(),
            _ => self.value,
        };
        Self { value, convention: target }
    }
}

/// Transverse width σ⊥(t) = σ⁻¹ sqrt(1 + (t/t_d)²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SigmaPerp {
    pub t: f64,
    pub value: f64,
}

impl SigmaPerp {
    pub fn at(spec: &PacketSpec, t: f64) -> Self {
        let tau = t / spec.t_d();
        Self { t, value: (1.0 + tau * tau).sqrt() / spec.sigma() }
    }
}

/// Gouy phase −(2n_r + |ℓ| + 3/2) arctan(t/t_d).
pub fn gouy_phase(spec: &PacketSpec, t: f64) -> f64 {
    -gouy_index(spec) * (t / spec.t_d()).atan()
}

fn gouy_index(spec: &PacketSpec) -> f64 {
    2.0 * spec.n_r() as f64 + spec.abs_ell() as f64 + 1.5
}

/// Ψ^par(p) in the relativistic convention.
///
/// On the axis (p⊥ = 0) the azimuth is taken as 0; the amplitude vanishes
/// there for ℓ ≠ 0.
pub fn amp_momentum(spec: &PacketSpec, p: Vec3) -> ComplexAmplitude {
    let l = spec.abs_ell();
    let sigma = spec.sigma();
    let m = spec.mass();
    let pp = p.perp();
    if l > 0 && pp == 0.0 {
        return ComplexAmplitude::relativistic(Complex64::new(0.0, 0.0));
    }
    let b = pp / sigma;
    let lag = laguerre_assoc(spec.n_r(), l, b * b);
    if lag == 0.0 {
        return ComplexAmplitude::relativistic(Complex64::new(0.0, 0.0));
    }
    let dz = m * (p.z - spec.pbar()) / spec.eps_bar();
    let ln_mod = 0.5 * log_norm_factor(spec.n_r(), l)
        + 1.5 * (2.0 * PI.sqrt() / sigma).ln()
        + 0.5 * (2.0 * m).ln()
        + if l > 0 { l as f64 * b.ln() } else { 0.0 }
        + lag.abs().ln()
        - 0.5 * (b * b + dz * dz / (sigma * sigma));
    let phase = spec.ell() as f64 * p.azimuth() + if lag < 0.0 { PI } else { 0.0 };
    ComplexAmplitude::relativistic(Complex64::from_polar(ln_mod.exp(), phase))
}

/// Ψ^par(r, t) in the relativistic convention.
pub fn amp_position(spec: &PacketSpec, r: Vec3, t: f64) -> ComplexAmplitude {
    let (modulus, phase) = position_polar(spec, r, t);
    let rest = spec.eps_bar() * t - spec.pbar() * r.z;
    ComplexAmplitude::relativistic(Complex64::from_polar(modulus, phase - rest))
}

/// ψ(r, t) = sqrt(2m) Ψ^par(r, t) e^{imt} for a packet at rest (p̄ = 0).
///
/// The rest-energy phase is removed analytically rather than multiplied back.
pub fn amp_nonrel(spec: &PacketSpec, r: Vec3, t: f64) -> Result<ComplexAmplitude> {
    if spec.pbar() != 0.0 {
        return Err(Error::MovingPacket(spec.pbar()));
    }
    let (modulus, phase) = position_polar(spec, r, t);
    let value = Complex64::from_polar(modulus * (2.0 * spec.mass()).sqrt(), phase);
    Ok(ComplexAmplitude::nonrelativistic(value))
}

// Modulus and phase of Ψ^par(r, t), without the −i p̄_μ x^μ term.
fn position_polar(spec: &PacketSpec, r: Vec3, t: f64) -> (f64, f64) {
    let l = spec.abs_ell();
    let m = spec.mass();
    let rho = r.perp();
    if l > 0 && rho == 0.0 {
        return (0.0, 0.0);
    }
    let tau = t / spec.t_d();
    let sp = SigmaPerp::at(spec, t).value;
    let a = rho / sp;
    let lag = laguerre_assoc(spec.n_r(), l, a * a);
    if lag == 0.0 {
        return (0.0, 0.0);
    }
    let lz = spec.eps_bar() * (r.z - spec.u_bar() * t) / m;
    let q = (rho * rho + lz * lz) / (2.0 * sp * sp);
    let ln_mod = 0.5 * log_norm_factor(spec.n_r(), l) - 0.75 * PI.ln() - 0.5 * (2.0 * m).ln()
        + if l > 0 { l as f64 * a.ln() } else { 0.0 }
        - 1.5 * sp.ln()
        + lag.abs().ln()
        - q;
    // i^{2n+|ℓ|}: the |ℓ| is what the Fourier transform of e^{iℓφ_p} produces for either sign of ℓ
    let phase = FRAC_PI_2 * (2 * spec.n_r() + l) as f64
        + spec.ell() as f64 * r.azimuth()
        - gouy_index(spec) * tau.atan()
        + tau * q
        + if lag < 0.0 { PI } else { 0.0 };
    (ln_mod.exp(), phase)
}

/// Signed real radial profile of Ψ^par(r, 0): the amplitude with its constant
/// and azimuthal phases divided out.
pub fn radial_profile(spec: &PacketSpec, rho: f64) -> f64 {
    let l = spec.abs_ell();
    let a = rho * spec.sigma();
    let norm = (0.5 * log_norm_factor(spec.n_r(), l)).exp() * spec.sigma().powf(1.5)
        / (PI.powf(0.75) * (2.0 * spec.mass()).sqrt());
    norm * a.powi(l as i32) * laguerre_assoc(spec.n_r(), l, a * a) * (-0.5 * a * a).exp()
}

/// Number of sign changes of the radial profile on ρ ∈ (0, ∞).
pub fn radial_zero_count(spec: &PacketSpec) -> usize {
    let l = spec.abs_ell() as f64;
    let n = spec.n_r() as f64;
    // all Laguerre zeros lie below 4n + 2l + 2 in σ²ρ²
    let amax = (4.0 * n + 2.0 * l + 10.0).sqrt();
    let steps = 20_000;
    let mut count = 0;
    let mut prev = 0.0f64;
    for i in 1..=steps {
        let rho = amax * i as f64 / steps as f64 / spec.sigma();
        let v = radial_profile(spec, rho);
        if prev != 0.0 && v != 0.0 && (v > 0.0) != (prev > 0.0) {
            count += 1;
        }
        if v != 0.0 {
            prev = v;
        }
    }
    count
}
