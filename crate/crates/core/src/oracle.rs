//! Brute-force quadrature of the defining integrals.
//!
//! The Wigner oracle evaluates
//!
//! ```text
//! n(r, p, t) = ∫ d³k/(2π)³ e^{ik·r} ψ*(p − k/2, t) ψ(p + k/2, t)
//! ```
//!
//! with ψ(p, t) = Ψ(p) e^{−itε(p)}/sqrt(2ε(p)) and the exact dispersion
//! relation everywhere, so nothing here relies on the paraxial expansion that
//! the closed forms are built on. The product of the two Gaussian envelopes
//! is a Gaussian in k alone, which fixes the Gauss–Hermite scaling per axis:
//! k⊥ = 2σ x and k_z = 2σ(ε̄/m) w. What remains is a polynomial times smooth
//! phases and energy factors.
//!
//! Every value is computed at order N and 2N; the difference is reported as
//! the error estimate.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kinematics::{energy, PacketSpec, PhasePoint, Vec3};
use crate::specfun::{cached_rule, laguerre_assoc, log_norm_factor, QuadratureKind, QuadratureRule};
use crate::spinors::{dirac_u, Spin};
use crate::wavepacket::amp_momentum;
use crate::wigner::{ln_prefactor_scaled, wigner_closed_with, Exponent, WignerForm};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    /// Base Gauss–Hermite order per axis; the error estimate uses twice this.
    pub order: usize,
    /// Effective k-support in units of σ, used by the oscillation safeguard.
    pub k_span: f64,
    /// Largest base order the safeguard may escalate to.
    pub max_order: usize,
    /// Relative error target for convergence.
    pub target: f64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self { order: 48, k_span: 10.0, max_order: 160, target: 1e-6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: f64,
    /// Imaginary part of the integral; zero up to rounding for a Hermitian pair.
    pub imag: f64,
    /// |value_N − value_2N|.
    pub error_estimate: f64,
    /// Base order actually used after the oscillation safeguard.
    pub order: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Conjugation {
    /// (1/2m) Ψ̄_f Ψ_f with the Dirac adjoint.
    DiracConjugate,
    /// Ψ_f† Ψ_f / sqrt(2ε 2ε).
    HermitianConjugate,
}

#[derive(Debug, Clone, Copy)]
enum Pairing {
    Scalar,
    Fermion(Spin, Conjugation),
}

/// Scalar Wigner function from its defining integral.
pub fn wigner_oracle_scalar(spec: &PacketSpec, pt: &PhasePoint, settings: &OracleSettings) -> Result<OracleValue> {
    run(spec, pt, Pairing::Scalar, settings)
}

/// Fermionic Wigner function of Ψ_f = u_s(p) Ψ(p)/sqrt(2ε) for a fixed spin.
pub fn wigner_oracle_fermion(
    spec: &PacketSpec,
    pt: &PhasePoint,
    spin: Spin,
    conjugation: Conjugation,
    settings: &OracleSettings,
) -> Result<OracleValue> {
    run(spec, pt, Pairing::Fermion(spin, conjugation), settings)
}

/// Evaluates the scalar oracle over many points in parallel, preserving order.
pub fn wigner_oracle_batch(
    spec: &PacketSpec,
    points: &[PhasePoint],
    settings: &OracleSettings,
) -> Vec<Result<OracleValue>> {
    points.par_iter().map(|pt| wigner_oracle_scalar(spec, pt, settings)).collect()
}

fn run(spec: &PacketSpec, pt: &PhasePoint, pairing: Pairing, settings: &OracleSettings) -> Result<OracleValue> {
    let order = safeguarded_order(spec, pt, settings)?;
    let coarse = integrate(spec, pt, pairing, &*cached_rule(QuadratureKind::Hermite, order)?);
    let fine = integrate(spec, pt, pairing, &*cached_rule(QuadratureKind::Hermite, 2 * order)?);
    let error_estimate = (fine.re - coarse.re).abs().max((fine.im - coarse.im).abs());
    let scale = fine.re.abs().max(f64::MIN_POSITIVE);
    Ok(OracleValue {
        value: fine.re,
        imag: fine.im,
        error_estimate,
        order,
        converged: error_estimate <= settings.target * scale,
    })
}

// The phase e^{ik·(r − vt)} swings by k_span·σ·|r − vt| (per axis, in the
// scaled variable) across the effective support; the rule must resolve it.
fn safeguarded_order(spec: &PacketSpec, pt: &PhasePoint, settings: &OracleSettings) -> Result<usize> {
    let p = pt.momentum();
    let e = spec.energy(p);
    let r = pt.position() - p.scale(pt.t / e);
    let sigma = spec.sigma();
    let perp = settings.k_span * sigma * r.perp();
    let long = settings.k_span * sigma * spec.eps_bar() / spec.mass() * r.z.abs();
    let excursion = perp.max(long);
    let mut order = settings.order;
    if excursion > order as f64 / 2.0 {
        order = (2.0 * excursion).ceil() as usize;
        order += order % 2;
    }
    if order > settings.max_order {
        return Err(Error::Oscillatory { excursion, needed: order, max: settings.max_order });
    }
    Ok(order)
}

// ((p_x ± i p_y)/σ)^{|ℓ|} L_n^{|ℓ|}(p⊥²/σ²), the non-Gaussian part of Ψ(p).
fn polynomial_part(spec: &PacketSpec, px: f64, py: f64) -> Complex64 {
    let sigma = spec.sigma();
    let l = spec.abs_ell();
    let sign = if spec.ell() < 0 { -1.0 } else { 1.0 };
    let w = Complex64::new(px / sigma, sign * py / sigma);
    let b2 = (px * px + py * py) / (sigma * sigma);
    w.powu(l) * laguerre_assoc(spec.n_r(), l, b2)
}

fn integrate(spec: &PacketSpec, pt: &PhasePoint, pairing: Pairing, rule: &QuadratureRule) -> Complex64 {
    let m = spec.mass();
    let sigma = spec.sigma();
    let eb = spec.eps_bar();
    let kz_scale = 2.0 * sigma * eb / m;
    let p = pt.momentum();
    let r = pt.position();
    let t = pt.t;

    // |normalisation|² of Ψ and the Gaussian envelope at p
    let dz = m * (p.z - spec.pbar()) / eb;
    let ln_const = log_norm_factor(spec.n_r(), spec.abs_ell()) + 3.0 * (2.0 * PI.sqrt() / sigma).ln()
        + (2.0 * m).ln()
        - (p.x * p.x + p.y * p.y + dz * dz) / (sigma * sigma)
        + (8.0 * sigma.powi(3) * eb / m).ln()
        - 3.0 * (2.0 * PI).ln();
    let prefactor = ln_const.exp();

    // longitudinal nodes: k_z, weight and the e^{ik_z z} phase
    let long: Vec<(f64, f64, Complex64)> = rule
        .iter()
        .map(|(w, ww)| {
            let kz = kz_scale * w;
            (kz, ww, Complex64::from_polar(1.0, kz * r.z))
        })
        .collect();

    let nodes: Vec<(f64, f64)> = rule.iter().collect();
    let total: Complex64 = nodes
        .par_iter()
        .map(|&(x, wx)| {
            let mut acc = Complex64::new(0.0, 0.0);
            let kx = 2.0 * sigma * x;
            for &(y, wy) in &nodes {
                let ky = 2.0 * sigma * y;
                let lo = polynomial_part(spec, p.x - 0.5 * kx, p.y - 0.5 * ky);
                let hi = polynomial_part(spec, p.x + 0.5 * kx, p.y + 0.5 * ky);
                let transverse = lo.conj() * hi * Complex64::from_polar(wx * wy, kx * r.x + ky * r.y);
                if transverse == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let mut inner = Complex64::new(0.0, 0.0);
                for &(kz, wz, phase_z) in &long {
                    let k = Vec3::new(kx, ky, kz);
                    let p_lo = p - k.scale(0.5);
                    let p_hi = p + k.scale(0.5);
                    let e_lo = energy(m, p_lo);
                    let e_hi = energy(m, p_hi);
                    let mut f = phase_z * (wz / (2.0 * (e_lo * e_hi).sqrt()));
                    if t != 0.0 {
                        // ε₊ − ε₋ = 2p·k/(ε₊ + ε₋), free of cancellation
                        let de = 2.0 * p.dot(k) / (e_hi + e_lo);
                        f *= Complex64::from_polar(1.0, -t * de);
                    }
                    match pairing {
                        Pairing::Scalar => {}
                        Pairing::Fermion(s, conj) => {
                            let a = dirac_u(m, p_lo, s);
                            let b = dirac_u(m, p_hi, s);
                            f *= match conj {
                                Conjugation::DiracConjugate => a.bar_dot(&b) / (2.0 * m),
                                Conjugation::HermitianConjugate => a.dagger_dot(&b) / (2.0 * (e_lo * e_hi).sqrt()),
                            };
                        }
                    }
                    inner += f;
                }
                acc += transverse * inner;
            }
            acc
        })
        .sum();
    total * prefactor
}

/// Which half of phase space a numeric marginal integrates over.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Marginal {
    /// ∫d³x at fixed momentum.
    OverX(Vec3),
    /// ∫d³p/(2π)³ at fixed position.
    OverP(Vec3),
}

/// 3D Gauss–Hermite quadrature of a closed form over positions or momenta,
/// at order N and 2N.
pub fn marginal_numeric(
    spec: &PacketSpec,
    which: Marginal,
    t: f64,
    form: WignerForm,
    exponent: Exponent,
    settings: &OracleSettings,
) -> Result<OracleValue> {
    let order = settings.order;
    let coarse = marginal_at(spec, which, t, form, exponent, &*cached_rule(QuadratureKind::Hermite, order)?);
    let fine = marginal_at(spec, which, t, form, exponent, &*cached_rule(QuadratureKind::Hermite, 2 * order)?);
    let error_estimate = (fine - coarse).abs();
    Ok(OracleValue {
        value: fine,
        imag: 0.0,
        error_estimate,
        order,
        converged: error_estimate <= settings.target * fine.abs().max(f64::MIN_POSITIVE),
    })
}

fn marginal_at(
    spec: &PacketSpec,
    which: Marginal,
    t: f64,
    form: WignerForm,
    exponent: Exponent,
    rule: &QuadratureRule,
) -> f64 {
    let m = spec.mass();
    let sigma = spec.sigma();
    let eb = spec.eps_bar();
    let mut total = 0.0;
    match which {
        Marginal::OverX(p) => {
            // Gaussian in x: widths 1/σ and m/(σε̄) around the moving centre
            let (sx, sz) = (1.0 / sigma, m / (sigma * eb));
            let u = match exponent {
                Exponent::LocalVelocity => p.z / spec.energy(p),
                _ => spec.u_bar(),
            };
            for (x, wx) in rule.iter_unweighted() {
                for (y, wy) in rule.iter_unweighted() {
                    for (z, wz) in rule.iter_unweighted() {
                        let r = Vec3::new(sx * x, sx * y, u * t + sz * z);
                        let pt = PhasePoint::from_cartesian(r, p, t);
                        total += wx * wy * wz * wigner_closed_with(spec, &pt, form, exponent);
                    }
                }
            }
            total * sx * sx * sz
        }
        Marginal::OverP(r) => {
            let (sx, sz) = (sigma, sigma * eb / m);
            for (x, wx) in rule.iter_unweighted() {
                for (y, wy) in rule.iter_unweighted() {
                    for (z, wz) in rule.iter_unweighted() {
                        let p = Vec3::new(sx * x, sx * y, spec.pbar() + sz * z);
                        let pt = PhasePoint::from_cartesian(r, p, t);
                        total += wx * wy * wz * wigner_closed_with(spec, &pt, form, exponent);
                    }
                }
            }
            total * sx * sx * sz / (8.0 * PI.powi(3))
        }
    }
}

/// Source of a full phase-space norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormSource {
    Form(WignerForm),
    /// The defining integral. Integrating it over x collapses k to zero, which
    /// leaves ∫d³p/(2π)³ |Ψ(p)|²/2ε(p) with the exact energy.
    Oracle,
}

/// ∫d³x d³p/(2π)³ n with the paraxial exponent.
///
/// For the closed forms the z and p_z Gaussians integrate to π and the angles
/// to (2π)², so only a 2D radial integral in a = σρ, b = p⊥/σ is left to
/// quadrature; it is computed with composite Gauss–Legendre panels.
pub fn full_norm_numeric(spec: &PacketSpec, source: NormSource) -> Result<OracleValue> {
    match source {
        NormSource::Form(form) => {
            let coarse = radial_norm(spec, form, 8)?;
            let fine = radial_norm(spec, form, 16)?;
            let err = (fine - coarse).abs();
            Ok(OracleValue { value: fine, imag: 0.0, error_estimate: err, order: 24, converged: err < 1e-10 })
        }
        NormSource::Oracle => {
            let coarse = exact_momentum_norm(spec, &*cached_rule(QuadratureKind::Hermite, 48)?);
            let fine = exact_momentum_norm(spec, &*cached_rule(QuadratureKind::Hermite, 96)?);
            let err = (fine - coarse).abs();
            Ok(OracleValue { value: fine, imag: 0.0, error_estimate: err, order: 48, converged: err < 1e-10 })
        }
    }
}

fn radial_norm(spec: &PacketSpec, form: WignerForm, panels: usize) -> Result<f64> {
    let (n, l) = (spec.n_r(), spec.abs_ell());
    let rule = cached_rule(QuadratureKind::Legendre, 24)?;
    let upper = (4.0 * n as f64 + 2.0 * l as f64 + 2.0).sqrt() + 8.0;
    let h = upper / panels as f64;
    let pts: Vec<(f64, f64)> = (0..panels)
        .flat_map(|k| {
            let mid = (k as f64 + 0.5) * h;
            rule.iter().map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w))
        })
        .collect();
    let mut total = 0.0;
    for &(a, wa) in &pts {
        for &(b, wb) in &pts {
            if let Some(ln_p) = ln_prefactor_scaled(form, n, l, a, b) {
                total += wa * wb * a * b * (ln_p - a * a - b * b).exp();
            }
        }
    }
    Ok(4.0 * log_norm_factor(n, l).exp() * total)
}

fn exact_momentum_norm(spec: &PacketSpec, rule: &QuadratureRule) -> f64 {
    let sig = spec.sigma();
    let sz = sig * spec.eps_bar() / spec.mass();
    let mut total = 0.0;
    for (x, wx) in rule.iter_unweighted() {
        for (y, wy) in rule.iter_unweighted() {
            for (z, wz) in rule.iter_unweighted() {
                let p = Vec3::new(sig * x, sig * y, spec.pbar() + sz * z);
                total += wx * wy * wz * amp_momentum(spec, p).norm_sqr() / (2.0 * spec.energy(p));
            }
        }
    }
    total * sig * sig * sz / (8.0 * PI.powi(3))
}

/// Dispersion relation used in the Fourier oracle for Ψ(r, t).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dispersion {
    /// ε̄ + ū Δp_z + p⊥²/2ε̄ + m²Δp_z²/2ε̄³, the expansion the closed form solves exactly.
    Paraxial,
    /// sqrt(p² + m²).
    Exact,
}

/// Ψ(r, t) = ∫d³p/(2π)³ (1/2ε̄) Ψ(p) e^{−iε(p)t + ip·r} by Gauss–Hermite
/// quadrature around the momentum-space envelope.
pub fn amp_position_fourier(
    spec: &PacketSpec,
    r: Vec3,
    t: f64,
    dispersion: Dispersion,
    order: usize,
) -> Result<Complex64> {
    let rule = cached_rule(QuadratureKind::Hermite, order)?;
    let m = spec.mass();
    let eb = spec.eps_bar();
    // |Ψ(p)| ∝ exp(−x²) with p⊥ = √2σ x, Δp_z = √2σ(ε̄/m) w
    let sp = 2f64.sqrt() * spec.sigma();
    let sz = sp * eb / m;
    let measure = sp * sp * sz / (8.0 * PI.powi(3) * 2.0 * eb);
    let rest = Complex64::from_polar(1.0, -(eb * t - spec.pbar() * r.z));
    match dispersion {
        Dispersion::Paraxial => {
            // separable: transverse plane times longitudinal line
            let mut perp = Complex64::new(0.0, 0.0);
            for (x, wx) in rule.iter_unweighted() {
                for (y, wy) in rule.iter_unweighted() {
                    let p = Vec3::new(sp * x, sp * y, spec.pbar());
                    let amp = amp_momentum(spec, p).value;
                    let phase = p.x * r.x + p.y * r.y - t * (p.x * p.x + p.y * p.y) / (2.0 * eb);
                    perp += amp * Complex64::from_polar(wx * wy, phase);
                }
            }
            let mut long = Complex64::new(0.0, 0.0);
            for (w, ww) in rule.iter() {
                let d = sz * w;
                let phase = d * (r.z - spec.u_bar() * t) - t * m * m * d * d / (2.0 * eb.powi(3));
                long += Complex64::from_polar(ww, phase);
            }
            Ok(perp * long * rest * measure)
        }
        Dispersion::Exact => {
            let mut total = Complex64::new(0.0, 0.0);
            for (x, wx) in rule.iter_unweighted() {
                for (y, wy) in rule.iter_unweighted() {
                    for (w, ww) in rule.iter_unweighted() {
                        let p = Vec3::new(sp * x, sp * y, spec.pbar() + sz * w);
                        let amp = amp_momentum(spec, p).value;
                        let e = spec.energy(p);
                        // (ε − ε̄) t − Δp·r relative to the rest phase
                        let de = (p.x * p.x + p.y * p.y + (p.z - spec.pbar()) * (p.z + spec.pbar())) / (e + eb);
                        let phase = p.x * r.x + p.y * r.y + (p.z - spec.pbar()) * r.z - de * t;
                        total += amp * Complex64::from_polar(wx * wy * ww, phase);
                    }
                }
            }
            Ok(total * rest * measure)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::amp_position;
    use crate::wigner::{marginal_p_alt, marginal_p_closed, marginal_x_closed, wigner_closed};

    fn spec(l: i32, n: u32, pbar: f64) -> PacketSpec {
        PacketSpec::paraxial(0.01, pbar, l, n).unwrap()
    }

    #[test]
    fn gaussian_axis_value() {
        let s = spec(0, 0, 1.0);
        let pt = PhasePoint::new(0.0, 0.0, 0.0, 0.0, 0.0, s.pbar(), 0.0);
        let v = wigner_oracle_scalar(&s, &pt, &OracleSettings::default()).unwrap();
        assert!(v.converged);
        assert!((v.value / 8.0 - 1.0).abs() < 10.0 * 0.01f64.powi(2), "{}", v.value);
        assert!(v.imag.abs() <= 1e-10 * v.value);
    }

    #[test]
    fn imaginary_part_vanishes() {
        let s = spec(2, 1, 0.5);
        let t = 2000.0;
        let pt = PhasePoint::new(130.0, 0.9, s.u_bar() * t + 40.0, 0.014, 2.6, 0.5 + 0.001, t);
        let v = wigner_oracle_scalar(&s, &pt, &OracleSettings::default()).unwrap();
        assert!(v.imag.abs() <= 1e-10 * v.value.abs(), "{} vs {}", v.imag, v.value);
    }

    #[test]
    fn safeguard_escalates_then_refuses() {
        let s = spec(0, 0, 0.0);
        let settings = OracleSettings::default();
        let near = PhasePoint::new(100.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(safeguarded_order(&s, &near, &settings).unwrap(), 48);
        let mid = PhasePoint::new(400.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert_eq!(safeguarded_order(&s, &mid, &settings).unwrap(), 80);
        let far = PhasePoint::new(2000.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(wigner_oracle_scalar(&s, &far, &settings), Err(Error::Oscillatory { .. })));
    }

    #[test]
    fn gaussian_packet_matches_closed_form() {
        let s = spec(0, 0, 0.0);
        let settings = OracleSettings::default();
        for (a, b, z) in [(0.5, 0.7, 0.3), (1.2, 0.2, -0.8), (0.0, 1.5, 1.0)] {
            let pt = PhasePoint::new(a / s.sigma(), 0.4, z / s.sigma(), b * s.sigma(), 1.3, 0.3 * s.sigma(), 0.0);
            let o = wigner_oracle_scalar(&s, &pt, &settings).unwrap();
            let c = wigner_closed(&s, &pt, WignerForm::Momentum);
            assert!((o.value / c - 1.0).abs() < 1e-3, "{} vs {c}", o.value);
        }
    }

    #[test]
    fn vortex_oracle_takes_negative_values() {
        // the exact Wigner function of an ℓ = 1 mode is negative at the phase-space origin
        let s = spec(1, 0, 0.0);
        let pt = PhasePoint::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        let o = wigner_oracle_scalar(&s, &pt, &OracleSettings::default()).unwrap();
        assert!(o.value < 0.0, "{}", o.value);
        assert_eq!(wigner_closed(&s, &pt, WignerForm::Momentum), 0.0);
    }

    #[test]
    fn fermion_spin_decoupling() {
        let s = spec(1, 0, 1.0);
        let pt = PhasePoint::new(80.0, 0.2, 10.0, 0.012, 1.0, 1.005, 0.0);
        let settings = OracleSettings::default();
        let up = wigner_oracle_fermion(&s, &pt, Spin::Up, Conjugation::DiracConjugate, &settings).unwrap();
        let down = wigner_oracle_fermion(&s, &pt, Spin::Down, Conjugation::DiracConjugate, &settings).unwrap();
        let scalar = wigner_oracle_scalar(&s, &pt, &settings).unwrap();
        assert!((up.value / scalar.value - 1.0).abs() < 1e-3);
        assert!((down.value / scalar.value - 1.0).abs() < 1e-3);
    }

    #[test]
    fn numeric_marginals_match_closed_forms() {
        let s = spec(2, 1, 1.0);
        let settings = OracleSettings::default();
        let p = Vec3::new(0.012, -0.004, 1.006);
        let v = marginal_numeric(&s, Marginal::OverX(p), 0.0, WignerForm::Momentum, Exponent::Paraxial, &settings).unwrap();
        assert!((v.value / marginal_x_closed(&s, p) - 1.0).abs() < 1e-8);
        let r = Vec3::new(120.0, 60.0, -30.0);
        let v = marginal_numeric(&s, Marginal::OverP(r), 0.0, WignerForm::Momentum, Exponent::Paraxial, &settings).unwrap();
        assert!((v.value / marginal_p_closed(&s, r) - 1.0).abs() < 1e-8);
        let v = marginal_numeric(&s, Marginal::OverP(r), 0.0, WignerForm::Position, Exponent::Paraxial, &settings).unwrap();
        assert!((v.value / marginal_p_alt(&s, r) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn position_form_x_marginal_differs_from_momentum_density() {
        let s = spec(1, 0, 0.0);
        let settings = OracleSettings::default();
        let p = Vec3::new(0.015, 0.0, 0.0);
        let v = marginal_numeric(&s, Marginal::OverX(p), 0.0, WignerForm::Position, Exponent::Paraxial, &settings).unwrap();
        let exact = marginal_x_closed(&s, p);
        assert!((v.value / exact - 1.0).abs() > 0.1);
    }

    #[test]
    fn full_norms() {
        for (l, n) in [(0, 0), (1, 0), (2, 1), (3, 2)] {
            let s = spec(l, n, 1.0);
            for form in [WignerForm::Momentum, WignerForm::Position] {
                let v = full_norm_numeric(&s, NormSource::Form(form)).unwrap();
                assert!((v.value - 1.0).abs() < 1e-7, "({l},{n}) {form:?}: {}", v.value);
            }
        }
        let s = spec(0, 0, 1.0);
        let v = full_norm_numeric(&s, NormSource::Oracle).unwrap();
        assert!((v.value - 1.0).abs() < 10.0 * 0.01f64.powi(2));
        assert!((v.value - 1.0).abs() > 1e-9);
    }

    #[test]
    fn symmetric_form_norm_is_not_one() {
        // ℓ = 1, n = 0: 4 Γ(3/2)² = π/... measured, not assumed
        let s = spec(1, 0, 0.0);
        let v = full_norm_numeric(&s, NormSource::Form(WignerForm::Symmetric)).unwrap();
        // ∫∫ a²b² e^{−a²−b²} da db = (√π/4)², times 4·(0!/1!)
        let expected = 4.0 * (PI.sqrt() / 4.0).powi(2);
        assert!((v.value - expected).abs() < 1e-9, "{}", v.value);
    }

    #[test]
    fn fourier_oracle_at_t_zero() {
        let s = spec(-2, 1, 1.0);
        for r in [Vec3::new(120.0, -40.0, 15.0), Vec3::new(-30.0, 90.0, -50.0)] {
            let f = amp_position_fourier(&s, r, 0.0, Dispersion::Paraxial, 64).unwrap();
            let c = amp_position(&s, r, 0.0).value;
            assert!((f - c).norm() <= 1e-10 * c.norm(), "{f} vs {c}");
        }
    }
}
