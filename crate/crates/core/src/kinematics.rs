//! Packet parameters, phase-space points and longitudinal Lorentz boosts.
//!
//! Every quantity here lives in natural units. The packet propagates along
//! `z`; boosts act on the `(t, z)` and `(ε, p_z)` pairs only.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// σ/m above which a packet is flagged as only marginally paraxial.
pub const PARAXIAL_WARN: f64 = 0.05;
/// σ/m above which a packet is rejected.
pub const PARAXIAL_HARD: f64 = 0.2;

/// Physical parameters of a Laguerre-Gaussian packet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PacketSpec {
    mass: f64,
    sigma: f64,
    pbar: f64,
    ell: i32,
    n_r: u32,
}

impl PacketSpec {
    pub fn new(mass: f64, sigma: f64, pbar: f64, ell: i32, n_r: u32) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidParameter(format!("mass must be positive, got {mass}")));
        }
        if !(sigma.is_finite() && sigma > 0.0) {
            return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
        }
        if !pbar.is_finite() {
            return Err(Error::InvalidParameter(format!("pbar must be finite, got {pbar}")));
        }
        let ratio = sigma / mass;
        if ratio > PARAXIAL_HARD {
            return Err(Error::NotParaxial { ratio, bound: PARAXIAL_HARD });
        }
        Ok(Self { mass, sigma, pbar, ell, n_r })
    }

    /// Packet with unit mass, so that `sigma` and `pbar` are given in units of m.
    pub fn paraxial(sigma_over_m: f64, pbar_over_m: f64, ell: i32, n_r: u32) -> Result<Self> {
        Self::new(1.0, sigma_over_m, pbar_over_m, ell, n_r)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn pbar(&self) -> f64 {
        self.pbar
    }

    pub fn ell(&self) -> i32 {
        self.ell
    }

    pub fn abs_ell(&self) -> u32 {
        self.ell.unsigned_abs()
    }

    pub fn n_r(&self) -> u32 {
        self.n_r
    }

    /// Mean energy ε̄ = sqrt(p̄² + m²).
    pub fn eps_bar(&self) -> f64 {
        self.pbar.hypot(self.mass)
    }

    /// Group velocity ū = p̄/ε̄.
    pub fn u_bar(&self) -> f64 {
        self.pbar / self.eps_bar()
    }

    /// Diffraction time t_d = ε̄/σ².
    pub fn t_d(&self) -> f64 {
        self.eps_bar() / (self.sigma * self.sigma)
    }

    pub fn compton_wavelength(&self) -> f64 {
        1.0 / self.mass
    }

    pub fn sigma_over_m(&self) -> f64 {
        self.sigma / self.mass
    }

    /// True when σ/m exceeds the soft paraxiality threshold.
    pub fn is_marginally_paraxial(&self) -> bool {
        self.sigma_over_m() > PARAXIAL_WARN
    }

    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        Self::new(self.mass, sigma, self.pbar, self.ell, self.n_r)
    }

    pub fn with_pbar(&self, pbar: f64) -> Result<Self> {
        Self::new(self.mass, self.sigma, pbar, self.ell, self.n_r)
    }

    pub fn with_mode(&self, ell: i32, n_r: u32) -> Self {
        Self { ell, n_r, ..*self }
    }

    /// Relativistic energy of a particle of this mass.
    pub fn energy(&self, p: Vec3) -> f64 {
        energy(self.mass, p)
    }
}

/// ε(p) = sqrt(p² + m²).
pub fn energy(mass: f64, p: Vec3) -> f64 {
    (p.x * p.x + p.y * p.y + p.z * p.z + mass * mass).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn from_cylindrical(radius: f64, phi: f64, z: f64) -> Self {
        let (s, c) = phi.sin_cos();
        Self { x: radius * c, y: radius * s, z }
    }

    pub fn perp(&self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Azimuth in [0, 2π); zero on the axis.
    pub fn azimuth(&self) -> f64 {
        principal_angle(self.y.atan2(self.x))
    }

    pub fn dot(&self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> f64 {
        self.dot(*self).sqrt()
    }

    pub fn scale(&self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl std::ops::Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl std::ops::Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

/// Maps an angle into [0, 2π).
pub fn principal_angle(phi: f64) -> f64 {
    let a = phi.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if a >= TAU {
        0.0
    } else {
        a
    }
}

/// A point (r, p, t) of phase space in cylindrical components.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PhasePoint {
    pub rho: f64,
    pub phi_r: f64,
    pub z: f64,
    pub p_perp: f64,
    pub phi_p: f64,
    pub p_z: f64,
    pub t: f64,
}

impl PhasePoint {
    /// Builds a point, normalising azimuths to [0, 2π) and setting them to
    /// zero on the axis.
    pub fn new(rho: f64, phi_r: f64, z: f64, p_perp: f64, phi_p: f64, p_z: f64, t: f64) -> Self {
        let phi_r = if rho == 0.0 { 0.0 } else { principal_angle(phi_r) };
        let phi_p = if p_perp == 0.0 { 0.0 } else { principal_angle(phi_p) };
        Self { rho, phi_r, z, p_perp, phi_p, p_z, t }
    }

    pub fn from_cartesian(r: Vec3, p: Vec3, t: f64) -> Self {
        Self {
            rho: r.perp(),
            phi_r: r.azimuth(),
            z: r.z,
            p_perp: p.perp(),
            phi_p: p.azimuth(),
            p_z: p.z,
            t,
        }
    }

    pub fn position(&self) -> Vec3 {
        Vec3::from_cylindrical(self.rho, self.phi_r, self.z)
    }

    pub fn momentum(&self) -> Vec3 {
        Vec3::from_cylindrical(self.p_perp, self.phi_p, self.p_z)
    }
}

/// Longitudinal Lorentz boost along the propagation axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Boost {
    pub rapidity: f64,
}

impl Boost {
    pub fn new(rapidity: f64) -> Self {
        Self { rapidity }
    }

    pub fn inverse(&self) -> Self {
        Self { rapidity: -self.rapidity }
    }

    /// (t, z) → (t cosh η − z sinh η, z cosh η − t sinh η).
    pub fn event(&self, t: f64, z: f64) -> (f64, f64) {
        let (c, s) = (self.rapidity.cosh(), self.rapidity.sinh());
        (t * c - z * s, z * c - t * s)
    }

    /// (ε, p_z) → (ε cosh η − p_z sinh η, p_z cosh η − ε sinh η).
    pub fn four_momentum(&self, e: f64, pz: f64) -> (f64, f64) {
        self.event(e, pz)
    }

    /// Boosts the packet and the phase-space point together.
    ///
    /// The packet's mean momentum transforms like any other on-shell momentum;
    /// ε̄, ū and t_d of the returned spec are recomputed from the new p̄.
    pub fn apply(&self, spec: &PacketSpec, pt: &PhasePoint) -> Result<(PacketSpec, PhasePoint)> {
        let (_, pbar) = self.four_momentum(spec.eps_bar(), spec.pbar());
        let boosted = PacketSpec::new(spec.mass(), spec.sigma(), pbar, spec.ell(), spec.n_r())?;
        let e = spec.energy(pt.momentum());
        let (_, p_z) = self.four_momentum(e, pt.p_z);
        let (t, z) = self.event(pt.t, pt.z);
        Ok((boosted, PhasePoint { z, p_z, t, ..*pt }))
    }
}

/// Convenience wrapper around [`Boost::apply`].
pub fn boost_all(spec: &PacketSpec, pt: &PhasePoint, boost: Boost) -> Result<(PacketSpec, PhasePoint)> {
    boost.apply(spec, pt)
}

/// ρ² + (ε̄z − p̄t)²/m², the position-space quadratic form (z − ut with u → ū).
pub fn invariant_x_form(spec: &PacketSpec, pt: &PhasePoint) -> f64 {
    let l = (spec.eps_bar() * pt.z - spec.pbar() * pt.t) / spec.mass();
    pt.rho * pt.rho + l * l
}

/// ρ² + ε̄²(z − u_z t)²/m² with the local velocity u_z = p_z/ε(p).
pub fn local_velocity_x_form(spec: &PacketSpec, pt: &PhasePoint) -> f64 {
    let u = pt.p_z / spec.energy(pt.momentum());
    let l = spec.eps_bar() * (pt.z - u * pt.t) / spec.mass();
    pt.rho * pt.rho + l * l
}

/// p⊥² + m²(p_z − p̄)²/ε̄², the momentum-space quadratic form.
///
/// Boost-invariant only to leading paraxial order.
pub fn invariant_p_form(spec: &PacketSpec, pt: &PhasePoint) -> f64 {
    let l = spec.mass() * (pt.p_z - spec.pbar()) / spec.eps_bar();
    pt.p_perp * pt.p_perp + l * l
}

/// p⊥² + (ε̄p_z − p̄ε(p))²/m², the exactly boost-invariant completion of
/// [`invariant_p_form`]. The two agree up to O(σ³) terms.
pub fn covariant_p_form(spec: &PacketSpec, pt: &PhasePoint) -> f64 {
    let e = spec.energy(pt.momentum());
    let eb = spec.eps_bar();
    // ε − ε̄ written without cancellation
    let de = (pt.p_perp * pt.p_perp + (pt.p_z - spec.pbar()) * (pt.p_z + spec.pbar())) / (e + eb);
    let l = (eb * (pt.p_z - spec.pbar()) - spec.pbar() * de) / spec.mass();
    pt.p_perp * pt.p_perp + l * l
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }

    #[test]
    fn energy_examples() {
        assert_eq!(energy(1.0, Vec3::ZERO), 1.0);
        assert_eq!(energy(1.0, Vec3::new(0.0, 0.0, 1.0)), 2f64.sqrt());
        assert!(close(energy(1.0, Vec3::new(0.3, 0.0, 0.4)), 1.25f64.sqrt(), 1e-15));
        assert!((energy(1.0, Vec3::new(0.3, 0.0, 0.4)) - 1.118033988).abs() < 1e-9);
    }

    #[test]
    fn paraxiality_bounds() {
        assert!(PacketSpec::paraxial(0.01, 0.0, 0, 0).is_ok());
        let marginal = PacketSpec::paraxial(0.1, 0.0, 0, 0).unwrap();
        assert!(marginal.is_marginally_paraxial());
        assert!(matches!(PacketSpec::paraxial(0.25, 0.0, 0, 0), Err(Error::NotParaxial { .. })));
        assert!(PacketSpec::paraxial(-0.01, 0.0, 0, 0).is_err());
        assert!(PacketSpec::new(0.0, 0.01, 0.0, 0, 0).is_err());
    }

    #[test]
    fn derived_quantities() {
        let s = PacketSpec::paraxial(0.01, 1.0, 2, 1).unwrap();
        assert!(close(s.eps_bar(), 2f64.sqrt(), 1e-15));
        assert!(close(s.u_bar(), 1.0 / 2f64.sqrt(), 1e-15));
        assert!(close(s.t_d(), 2f64.sqrt() * 1e4, 1e-12));
        assert_eq!(s.compton_wavelength(), 1.0);
    }

    #[test]
    fn cylindrical_round_trip() {
        let pt = PhasePoint::new(2.5, 1.2, -0.3, 0.7, 5.9, 1.1, 3.0);
        let back = PhasePoint::from_cartesian(pt.position(), pt.momentum(), pt.t);
        assert!(close(back.rho, pt.rho, 1e-15));
        assert!(close(back.phi_r, pt.phi_r, 1e-15));
        assert!(close(back.phi_p, pt.phi_p, 1e-15));
        assert_eq!(back.z, pt.z);
        assert_eq!(back.p_z, pt.p_z);
    }

    #[test]
    fn azimuth_conventions() {
        assert_eq!(PhasePoint::new(0.0, 3.0, 0.0, 0.0, 2.0, 0.0, 0.0).phi_r, 0.0);
        assert_eq!(Vec3::new(0.0, 0.0, 1.0).azimuth(), 0.0);
        let a = Vec3::new(1.0, -1e-300, 0.0).azimuth();
        assert!((0.0..TAU).contains(&a));
        assert!(close(principal_angle(-std::f64::consts::FRAC_PI_2), 1.5 * std::f64::consts::PI, 1e-15));
    }

    #[test]
    fn zero_boost_is_identity() {
        let s = PacketSpec::paraxial(0.01, 0.7, 1, 0).unwrap();
        let pt = PhasePoint::new(30.0, 0.4, 12.0, 0.01, 2.0, 0.71, 5.0);
        let (s2, pt2) = Boost::new(0.0).apply(&s, &pt).unwrap();
        assert_eq!(s2, s);
        assert_eq!(pt2, pt);
    }

    #[test]
    fn boost_then_inverse() {
        let s = PacketSpec::paraxial(0.01, 0.7, 1, 0).unwrap();
        let pt = PhasePoint::new(30.0, 0.4, 12.0, 0.01, 2.0, 0.71, 5.0);
        let b = Boost::new(0.5);
        let (s1, p1) = b.apply(&s, &pt).unwrap();
        let (s2, p2) = b.inverse().apply(&s1, &p1).unwrap();
        assert!(close(s2.pbar(), s.pbar(), 1e-12));
        for (a, b) in [(p2.t, pt.t), (p2.z, pt.z), (p2.p_z, pt.p_z)] {
            assert!(close(a, b, 1e-12), "{a} vs {b}");
        }
        assert_eq!((p2.rho, p2.phi_r, p2.p_perp, p2.phi_p), (pt.rho, pt.phi_r, pt.p_perp, pt.phi_p));
    }

    #[test]
    fn x_form_examples() {
        let s = PacketSpec::paraxial(0.01, 0.5, 0, 0).unwrap();
        let t = 1234.0;
        let on_axis = PhasePoint::new(0.0, 0.0, s.u_bar() * t, 0.0, 0.0, 0.0, t);
        assert!(invariant_x_form(&s, &on_axis).abs() < 1e-18);

        let s0 = PacketSpec::paraxial(0.01, 0.0, 0, 0).unwrap();
        let pt = PhasePoint::new(1.0 / 0.01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(close(invariant_x_form(&s0, &pt), 1e4, 1e-14));
    }

    #[test]
    fn p_form_examples() {
        let s = PacketSpec::paraxial(0.01, 0.8, 0, 0).unwrap();
        let on = PhasePoint::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.8, 0.0);
        assert_eq!(invariant_p_form(&s, &on), 0.0);
        let pt = PhasePoint::new(0.0, 0.0, 0.0, 0.01, 0.0, 0.8, 0.0);
        assert!(close(invariant_p_form(&s, &pt), 1e-4, 1e-14));
        assert!(covariant_p_form(&s, &on).abs() < 1e-30);
    }

    #[test]
    fn x_form_boost_exact() {
        let s = PacketSpec::paraxial(0.01, 0.3, 0, 0).unwrap();
        let pt = PhasePoint::new(40.0, 0.0, 85.0, 0.01, 0.0, 0.31, 120.0);
        let before = invariant_x_form(&s, &pt);
        for eta in [-2.0, -1.0, -0.5, 0.5, 1.0, 2.0] {
            let (s2, p2) = Boost::new(eta).apply(&s, &pt).unwrap();
            assert!(close(invariant_x_form(&s2, &p2), before, 1e-12), "eta {eta}");
            // ε̄z − p̄t itself
            let a = s.eps_bar() * pt.z - s.pbar() * pt.t;
            let b = s2.eps_bar() * p2.z - s2.pbar() * p2.t;
            assert!(close(a, b, 1e-12));
        }
    }

    #[test]
    fn covariant_p_form_boost_exact() {
        let s = PacketSpec::paraxial(0.01, 1.0, 0, 0).unwrap();
        let pt = PhasePoint::new(0.0, 0.0, 0.0, 0.013, 0.3, 1.0 + 0.02, 0.0);
        let before = covariant_p_form(&s, &pt);
        for eta in [-2.0, -1.0, 1.0, 2.0] {
            let (s2, p2) = Boost::new(eta).apply(&s, &pt).unwrap();
            assert!(close(covariant_p_form(&s2, &p2), before, 1e-11), "eta {eta}");
        }
        // agrees with the printed form to paraxial accuracy
        assert!(close(covariant_p_form(&s, &pt), invariant_p_form(&s, &pt), 0.05));
    }

    fn p_form_residual(sigma: f64, transverse: bool) -> f64 {
        let s = PacketSpec::paraxial(sigma, 0.0, 0, 0).unwrap();
        let d = 2.0 * sigma;
        let pt = if transverse {
            PhasePoint::new(0.0, 0.0, 0.0, d, 0.0, 0.0, 0.0)
        } else {
            PhasePoint::new(0.0, 0.0, 0.0, 0.0, 0.0, d, 0.0)
        };
        let before = invariant_p_form(&s, &pt);
        let (s2, p2) = Boost::new(1.0).apply(&s, &pt).unwrap();
        (invariant_p_form(&s2, &p2) - before).abs() / before
    }

    #[test]
    fn p_form_boost_residual_scaling() {
        // transverse offset: residual quarters when σ halves
        let r1 = p_form_residual(0.01, true);
        let r2 = p_form_residual(0.005, true);
        assert!(r1 <= 1e-3, "{r1}");
        assert!((r1 / r2 - 4.0).abs() < 0.05, "{}", r1 / r2);
        // longitudinal offset: the O(σ³) cross term makes it only halve
        let l1 = p_form_residual(0.01, false);
        let l2 = p_form_residual(0.005, false);
        assert!((l1 / l2 - 2.0).abs() < 0.05, "{}", l1 / l2);
    }

    #[test]
    fn energy_paraxial_expansion() {
        let s = PacketSpec::paraxial(0.01, 1.0, 0, 0).unwrap();
        let dev = |sig: f64| {
            let p = Vec3::new(sig, 0.0, s.pbar() + sig);
            (s.energy(p) - s.eps_bar() - s.u_bar() * (p.z - s.pbar())).abs()
        };
        let ratio = dev(0.01) / dev(0.005);
        assert!((ratio - 4.0).abs() < 0.05, "{ratio}");
    }
}
