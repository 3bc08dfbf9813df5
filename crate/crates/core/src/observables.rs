//! Beam moments ⟨ρ⟩, ⟨p⊥⟩ and their product.
//!
//! All radial integrals run in the scaled variables s = σρ and b = p⊥/σ,
//! with composite Gauss–Legendre panels and log-space weights so that
//! large |ℓ| neither overflows nor underflows. Because ⟨ρ⟩ = ⟨s⟩/σ and
//! ⟨p⊥⟩ = σ⟨b⟩, the product is σ-independent by construction.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::kinematics::{PacketSpec, Vec3};
use crate::specfun::{cached_rule, QuadratureKind};
use crate::wavepacket::{amp_momentum, radial_profile};
use crate::wigner::{ln_prefactor_scaled, WignerForm};

const PANELS: usize = 16;
const PANEL_ORDER: usize = 24;

/// Where a moment's density comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentSource {
    /// 2ε̄|Ψ(r,0)|² for positions and |Ψ(p)|²/2ε̄ for momenta.
    Densities,
    /// The marginals of a closed-form Wigner function.
    Wigner(WignerForm),
}

impl MomentSource {
    pub fn name(&self) -> String {
        match self {
            MomentSource::Densities => "densities".into(),
            MomentSource::Wigner(f) => format!("wigner_{}", f.name()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub ell: i32,
    pub n_r: u32,
    pub source: MomentSource,
    pub mean_rho: f64,
    pub mean_pperp: f64,
    pub product: f64,
    pub rms_rho: f64,
    pub rms_pperp: f64,
}

// ∫ s^k w(s) ds for k = 0, 1, 2 on panels over [0, upper], with w = exp(ln_w − shift).
#[derive(Debug, Clone, Copy)]
struct Moments {
    m0: f64,
    m1: f64,
    m2: f64,
}

impl Moments {
    fn mean(&self) -> f64 {
        self.m1 / self.m0
    }

    fn rms(&self) -> f64 {
        (self.m2 / self.m0).sqrt()
    }
}

fn upper_limit(spec: &PacketSpec) -> f64 {
    (4.0 * spec.n_r() as f64 + 2.0 * spec.abs_ell() as f64 + 2.0).sqrt() + 7.0
}

fn nodes(upper: f64) -> Result<Vec<(f64, f64)>> {
    let rule = cached_rule(QuadratureKind::Legendre, PANEL_ORDER)?;
    let h = upper / PANELS as f64;
    Ok((0..PANELS)
        .flat_map(|k| {
            let mid = (k as f64 + 0.5) * h;
            rule.iter().map(move |(x, w)| (mid + 0.5 * h * x, 0.5 * h * w)).collect::<Vec<_>>()
        })
        .collect())
}

// ln_w(s) returns None where the density vanishes.
fn radial_moments(upper: f64, ln_w: impl Fn(f64) -> Option<f64>) -> Result<Moments> {
    let pts = nodes(upper)?;
    let logs: Vec<Option<f64>> = pts.iter().map(|&(s, _)| ln_w(s)).collect();
    let shift = logs.iter().flatten().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    let mut m = Moments { m0: 0.0, m1: 0.0, m2: 0.0 };
    for (&(s, w), l) in pts.iter().zip(&logs) {
        if let Some(l) = l {
            let v = w * (l - shift).exp();
            m.m0 += v;
            m.m1 += v * s;
            m.m2 += v * s * s;
        }
    }
    Ok(m)
}

fn ln_abs_sq(v: f64) -> Option<f64> {
    (v != 0.0).then(|| 2.0 * v.abs().ln())
}

// Moments of a and b under ∫∫ a b exp(ln_prefactor − a² − b²) da db.
fn wigner_moments(spec: &PacketSpec, form: WignerForm) -> Result<(Moments, Moments)> {
    let pts = nodes(upper_limit(spec))?;
    let (n, l) = (spec.n_r(), spec.abs_ell());
    let mut logs = Vec::with_capacity(pts.len() * pts.len());
    for &(a, _) in &pts {
        for &(b, _) in &pts {
            logs.push(ln_prefactor_scaled(form, n, l, a, b).map(|p| p + a.ln() + b.ln() - a * a - b * b));
        }
    }
    let shift = logs.iter().flatten().fold(f64::NEG_INFINITY, |x, &y| x.max(y));
    let mut ma = Moments { m0: 0.0, m1: 0.0, m2: 0.0 };
    let mut mb = ma;
    for (i, &(a, wa)) in pts.iter().enumerate() {
        for (j, &(b, wb)) in pts.iter().enumerate() {
            if let Some(lv) = logs[i * pts.len() + j] {
                let v = wa * wb * (lv - shift).exp();
                ma.m0 += v;
                ma.m1 += v * a;
                ma.m2 += v * a * a;
                mb.m0 += v;
                mb.m1 += v * b;
                mb.m2 += v * b * b;
            }
        }
    }
    Ok((ma, mb))
}

fn position_moments(spec: &PacketSpec) -> Result<Moments> {
    // the t = 0 density factorises into ρ and z parts; the ρ measure is ρ dρ
    let sigma = spec.sigma();
    radial_moments(upper_limit(spec), |s| {
        ln_abs_sq(radial_profile(spec, s / sigma)).map(|l| l + s.ln())
    })
}

fn momentum_moments(spec: &PacketSpec) -> Result<Moments> {
    let sigma = spec.sigma();
    radial_moments(upper_limit(spec), |b| {
        let p = Vec3::new(b * sigma, 0.0, spec.pbar());
        ln_abs_sq(amp_momentum(spec, p).value.norm()).map(|l| l + b.ln())
    })
}

/// ⟨ρ⟩ in units of 1/m.
pub fn mean_radius(spec: &PacketSpec, source: MomentSource) -> Result<f64> {
    let s = match source {
        MomentSource::Densities => position_moments(spec)?,
        MomentSource::Wigner(form) => wigner_moments(spec, form)?.0,
    };
    Ok(s.mean() / spec.sigma())
}

/// ⟨p⊥⟩ in units of m.
pub fn mean_pperp(spec: &PacketSpec, source: MomentSource) -> Result<f64> {
    let b = match source {
        MomentSource::Densities => momentum_moments(spec)?,
        MomentSource::Wigner(form) => wigner_moments(spec, form)?.1,
    };
    Ok(b.mean() * spec.sigma())
}

/// ⟨ρ⟩⟨p⊥⟩ from the wave-function densities.
pub fn oam_product(spec: &PacketSpec) -> Result<f64> {
    Ok(moment_report(spec, MomentSource::Densities)?.product)
}

pub fn moment_report(spec: &PacketSpec, source: MomentSource) -> Result<MomentReport> {
    let (a, b) = match source {
        MomentSource::Densities => (position_moments(spec)?, momentum_moments(spec)?),
        MomentSource::Wigner(form) => wigner_moments(spec, form)?,
    };
    let sigma = spec.sigma();
    Ok(MomentReport {
        ell: spec.ell(),
        n_r: spec.n_r(),
        source,
        mean_rho: a.mean() / sigma,
        mean_pperp: b.mean() * sigma,
        // taken in scaled variables so σ cancels exactly
        product: a.mean() * b.mean(),
        rms_rho: a.rms() / sigma,
        rms_pperp: b.rms() * sigma,
    })
}

/// Reports for ℓ in `ells` at the spec's n_r, computed in parallel and returned in order.
pub fn moment_sweep(spec: &PacketSpec, ells: &[i32], source: MomentSource) -> Result<Vec<MomentReport>> {
    ells.par_iter().map(|&l| moment_report(&spec.with_mode(l, spec.n_r()), source)).collect()
}
