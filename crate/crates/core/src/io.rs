//! Evaluation grids and CSV/JSON export.
//!
//! A grid is written as comma-separated `name=min:max:count` axes and
//! `name=value` fixed coordinates, for example `rho=0:3:4,p_perp=0:3:4,t=0`.
//! Coordinates are in packet units: ρ and z in 1/σ (the waist σ⊥(0)),
//! p⊥ in σ, p_z as the offset from p̄ in σ, t in t_d, and angles in radians.
//! Unlisted coordinates are zero. Angles can only be fixed.
//!
//! Rows are emitted with the first axis varying slowest, whatever the
//! thread count.

use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Error, Result};
use crate::kinematics::{PacketSpec, PhasePoint};
use crate::wigner::{wigner_closed, WignerForm};

pub const THREADS_ENV: &str = "VORTEX_WIGNER_THREADS";
pub const CSV_HEADER: &str = "rho,phi_r,z,p_perp,phi_p,p_z,t,value";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coord {
    Rho,
    PhiR,
    Z,
    PPerp,
    PhiP,
    PZ,
    T,
}

impl Coord {
    pub const ALL: [Coord; 7] = [Coord::Rho, Coord::PhiR, Coord::Z, Coord::PPerp, Coord::PhiP, Coord::PZ, Coord::T];

    pub fn name(&self) -> &'static str {
        match self {
            Coord::Rho => "rho",
            Coord::PhiR => "phi_r",
            Coord::Z => "z",
            Coord::PPerp => "p_perp",
            Coord::PhiP => "phi_p",
            Coord::PZ => "p_z",
            Coord::T => "t",
        }
    }

    fn can_vary(&self) -> bool {
        !matches!(self, Coord::PhiR | Coord::PhiP)
    }
}

impl FromStr for Coord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Coord::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidGrid(format!("unknown coordinate `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub coord: Coord,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl Axis {
    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.count {
            return self.max;
        }
        self.min + (self.max - self.min) * i as f64 / (self.count - 1) as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub fixed: Vec<(Coord, f64)>,
}

impl GridSpec {
    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.count).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        if self.axes.is_empty() || self.axes.len() > 3 {
            return Err(Error::InvalidGrid(format!("need 1 to 3 axes, got {}", self.axes.len())));
        }
        let mut seen = Vec::new();
        for c in self.axes.iter().map(|a| a.coord).chain(self.fixed.iter().map(|f| f.0)) {
            if seen.contains(&c) {
                return Err(Error::InvalidGrid(format!("`{}` given twice", c.name())));
            }
            seen.push(c);
        }
        for a in &self.axes {
            if !a.coord.can_vary() {
                return Err(Error::InvalidGrid(format!("`{}` can only be fixed", a.coord.name())));
            }
            if a.count < 2 {
                return Err(Error::InvalidGrid(format!("`{}` needs at least 2 points", a.coord.name())));
            }
            if !(a.min < a.max) {
                return Err(Error::InvalidGrid(format!("`{}` needs min < max", a.coord.name())));
            }
        }
        Ok(())
    }

    /// Grid coordinates in units of the packet, one array per point.
    pub fn scaled_points(&self) -> Vec<[f64; 7]> {
        let mut base = [0.0; 7];
        for &(c, v) in &self.fixed {
            base[c as usize] = v;
        }
        let mut out = Vec::with_capacity(self.len());
        let mut idx = vec![0usize; self.axes.len()];
        loop {
            let mut row = base;
            for (a, &i) in self.axes.iter().zip(&idx) {
                row[a.coord as usize] = a.value(i);
            }
            out.push(row);
            // odometer, last axis fastest
            let mut k = self.axes.len();
            loop {
                if k == 0 {
                    return out;
                }
                k -= 1;
                idx[k] += 1;
                if idx[k] < self.axes[k].count {
                    break;
                }
                idx[k] = 0;
            }
        }
    }

    /// Physical phase-space points for a packet.
    pub fn points(&self, spec: &PacketSpec) -> Vec<PhasePoint> {
        let s = spec.sigma();
        self.scaled_points()
            .into_iter()
            .map(|v| PhasePoint::new(v[0] / s, v[1], v[2] / s, v[3] * s, v[4], spec.pbar() + v[5] * s, v[6] * spec.t_d()))
            .collect()
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut grid = GridSpec { axes: Vec::new(), fixed: Vec::new() };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidGrid(format!("expected `name=...`, got `{part}`")))?;
            let coord: Coord = name.trim().parse()?;
            let num = |x: &str| -> Result<f64> {
                x.trim().parse().map_err(|_| Error::InvalidGrid(format!("bad number `{x}` in `{part}`")))
            };
            let fields: Vec<&str> = value.split(':').collect();
            match fields.as_slice() {
                [v] => grid.fixed.push((coord, num(v)?)),
                [lo, hi, n] => {
                    let count = n
                        .trim()
                        .parse()
                        .map_err(|_| Error::InvalidGrid(format!("bad count `{n}` in `{part}`")))?;
                    grid.axes.push(Axis { coord, min: num(lo)?, max: num(hi)?, count });
                }
                _ => return Err(Error::InvalidGrid(format!("expected `min:max:count` or a value in `{part}`"))),
            }
        }
        grid.validate()?;
        Ok(grid)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> =
            self.axes.iter().map(|a| format!("{}={}:{}:{}", a.coord.name(), a.min, a.max, a.count)).collect();
        parts.extend(self.fixed.iter().map(|(c, v)| format!("{}={v}", c.name())));
        f.write_str(&parts.join(","))
    }
}

/// Thread cap from `VORTEX_WIGNER_THREADS`, if set to a positive integer.
pub fn thread_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `f` over `items` on a pool of `threads` workers (or the global pool),
/// returning results in input order.
pub fn ordered_map<T, R, F>(items: &[T], threads: Option<usize>, f: F) -> Result<Vec<R>>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    match threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            Ok(pool.install(|| items.par_iter().map(&f).collect()))
        }
        None => Ok(items.par_iter().map(&f).collect()),
    }
}

pub fn eval_grid(
    spec: &PacketSpec,
    grid: &GridSpec,
    form: WignerForm,
    threads: Option<usize>,
) -> Result<Vec<(PhasePoint, f64)>> {
    let points = grid.points(spec);
    ordered_map(&points, threads, |pt| (*pt, wigner_closed(spec, pt, form)))
}

/// Shortest decimal that parses back to the same `f64`.
pub fn format_value(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_csv<W: Write>(mut w: W, rows: &[(PhasePoint, f64)]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for (p, v) in rows {
        let cols = [p.rho, p.phi_r, p.z, p.p_perp, p.phi_p, p.p_z, p.t, *v];
        let line: Vec<String> = cols.iter().map(|&c| format_value(c)).collect();
        writeln!(w, "{}", line.join(","))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalMetadata {
    pub spec: PacketSpec,
    pub form: WignerForm,
    pub grid: String,
    pub axes: GridSpec,
    pub rows: usize,
    pub version: String,
}

/// Sidecar path for a CSV output: `out.csv` → `out.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    out.with_extension("json")
}

/// Evaluates a grid and writes the CSV and its JSON sidecar.
pub fn export_grid(
    config: &Config,
    grid: &GridSpec,
    form: WignerForm,
    out: &Path,
    threads: Option<usize>,
) -> Result<EvalMetadata> {
    let spec = config.spec()?;
    let rows = eval_grid(&spec, grid, form, threads)?;
    let mut buf = Vec::with_capacity(rows.len() * 96);
    write_csv(&mut buf, &rows)?;
    std::fs::write(out, buf)?;
    let meta = EvalMetadata {
        spec,
        form,
        grid: grid.to_string(),
        axes: grid.clone(),
        rows: rows.len(),
        version: crate::VERSION.to_string(),
    };
    std::fs::write(sidecar_path(out), serde_json::to_string_pretty(&meta)? + "\n")?;
    Ok(meta)
}
