//! Bi-radial functions f(|v|, |z|): the analytic trait and the sampled profile.

use super::{GroupParams, GroupShape};
use crate::error::{domain, MathError, Result};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

/// A function on N depending only on (|v|, |z|).
pub trait BiRadial: Sync {
    fn value(&self, r: f64, zeta: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64 + Sync> BiRadial for F {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        self(r, zeta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayKind {
    /// f ~ x^{−rate} beyond the grid
    Algebraic,
    /// f ~ e^{−rate·x} beyond the grid
    Exponential,
}

/// Tail behaviour used to extend a profile beyond its largest grid radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Decay {
    pub kind: DecayKind,
    pub r_rate: f64,
    pub zeta_rate: f64,
}

impl Decay {
    pub fn algebraic(r_rate: f64, zeta_rate: f64) -> Self {
        Self { kind: DecayKind::Algebraic, r_rate, zeta_rate }
    }

    pub fn exponential(r_rate: f64, zeta_rate: f64) -> Self {
        Self { kind: DecayKind::Exponential, r_rate, zeta_rate }
    }

    fn factor(&self, x: f64, edge: f64, rate: f64) -> f64 {
        if x <= edge {
            return 1.0;
        }
        match self.kind {
            DecayKind::Algebraic => (x / edge).powf(-rate),
            DecayKind::Exponential => (-rate * (x - edge)).exp(),
        }
    }
}

/// f(|v|, |z|) sampled on a positive log-spaced grid and interpolated by
/// 4-point Lagrange cubics in (ln r, ln ζ).
#[derive(Clone, Debug, PartialEq)]
pub struct BiRadialProfile {
    shape: GroupShape,
    r_grid: Vec<f64>,
    zeta_grid: Vec<f64>,
    ln_r: Vec<f64>,
    ln_zeta: Vec<f64>,
    /// row-major, values[i * zeta_grid.len() + j] = f(r_i, ζ_j)
    values: Vec<f64>,
    decay: Decay,
}

#[derive(Serialize, Deserialize)]
struct Header {
    n: usize,
    m: usize,
    r_grid: Vec<f64>,
    zeta_grid: Vec<f64>,
    decay: Decay,
}

#[derive(Serialize, Deserialize)]
struct Row {
    r: f64,
    zeta: f64,
    value: f64,
}

/// `count` log-spaced points from `lo` to `hi` inclusive.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && count >= 2);
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

fn check_grid(name: &str, g: &[f64]) -> Result<()> {
    if g.len() < 4 {
        return domain(format!("{name} needs at least 4 points"));
    }
    if g[0] <= 0.0 || g.windows(2).any(|w| !(w[1] > w[0])) {
        return domain(format!("{name} must be positive and strictly increasing"));
    }
    Ok(())
}

fn lagrange4(xs: &[f64], x: f64) -> (usize, [f64; 4]) {
    let len = xs.len();
    let pos = xs.partition_point(|&g| g <= x);
    let start = pos.saturating_sub(2).min(len - 4);
    let p = &xs[start..start + 4];
    let mut w = [1.0; 4];
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                w[a] *= (x - p[b]) / (p[a] - p[b]);
            }
        }
    }
    (start, w)
}

impl BiRadialProfile {
    pub fn new(group: &GroupParams, r_grid: Vec<f64>, zeta_grid: Vec<f64>, values: Vec<f64>, decay: Decay) -> Result<Self> {
        check_grid("r_grid", &r_grid)?;
        check_grid("zeta_grid", &zeta_grid)?;
        if values.len() != r_grid.len() * zeta_grid.len() {
            return domain("values must have r_grid.len() * zeta_grid.len() entries");
        }
        if values.iter().any(|v| !v.is_finite()) {
            return domain("profile values must be finite");
        }
        Ok(Self {
            shape: group.shape(),
            ln_r: r_grid.iter().map(|x| x.ln()).collect(),
            ln_zeta: zeta_grid.iter().map(|x| x.ln()).collect(),
            r_grid,
            zeta_grid,
            values,
            decay,
        })
    }

    /// Samples `f` on the tensor grid.
    pub fn from_fn<F: BiRadial + ?Sized>(group: &GroupParams, r_grid: Vec<f64>, zeta_grid: Vec<f64>, f: &F, decay: Decay) -> Result<Self> {
        let nz = zeta_grid.len();
        let values = crate::par::map_range(r_grid.len() * nz, |idx| f.value(r_grid[idx / nz], zeta_grid[idx % nz]));
        Self::new(group, r_grid, zeta_grid, values, decay)
    }

    pub fn shape(&self) -> GroupShape {
        self.shape
    }

    pub fn r_grid(&self) -> &[f64] {
        &self.r_grid
    }

    pub fn zeta_grid(&self) -> &[f64] {
        &self.zeta_grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn decay(&self) -> Decay {
        self.decay
    }

    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.zeta_grid.len() + j]
    }

    /// Interpolated value; constant below the first radius, decay-extended
    /// beyond the last.
    pub fn eval(&self, r: f64, zeta: f64) -> f64 {
        let (r0, r1) = (self.r_grid[0], *self.r_grid.last().unwrap());
        let (z0, z1) = (self.zeta_grid[0], *self.zeta_grid.last().unwrap());
        let rc = r.clamp(r0, r1);
        let zc = zeta.clamp(z0, z1);
        let (i0, wr) = lagrange4(&self.ln_r, rc.ln());
        let (j0, wz) = lagrange4(&self.ln_zeta, zc.ln());
        let nz = self.zeta_grid.len();
        let mut acc = 0.0;
        for a in 0..4 {
            let row = &self.values[(i0 + a) * nz + j0..(i0 + a) * nz + j0 + 4];
            let inner: f64 = row.iter().zip(&wz).map(|(v, w)| v * w).sum();
            acc += wr[a] * inner;
        }
        acc * self.decay.factor(r, r1, self.decay.r_rate) * self.decay.factor(zeta, z1, self.decay.zeta_rate)
    }

    fn header(&self) -> Header {
        Header {
            n: self.shape.n,
            m: self.shape.m,
            r_grid: self.r_grid.clone(),
            zeta_grid: self.zeta_grid.clone(),
            decay: self.decay,
        }
    }

    pub fn header_json(&self) -> String {
        serde_json::to_string_pretty(&self.header()).expect("header serializes")
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for (i, &r) in self.r_grid.iter().enumerate() {
            for (j, &zeta) in self.zeta_grid.iter().enumerate() {
                w.serialize(Row { r, zeta, value: self.at(i, j) }).map_err(fmt_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| MathError::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(fmt_err)
    }

    /// Writes `path` (CSV rows r, zeta, value) and the JSON header next to it
    /// with extension `.json`.
    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?).map_err(fmt_err)?;
        fs::write(path.with_extension("json"), self.header_json()).map_err(fmt_err)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let header: Header =
            serde_json::from_str(&fs::read_to_string(path.with_extension("json")).map_err(fmt_err)?).map_err(fmt_err)?;
        let data = fs::read_to_string(path).map_err(fmt_err)?;
        Self::from_parts(header, &data)
    }

    pub fn from_strings(header_json: &str, csv_data: &str) -> Result<Self> {
        let header: Header = serde_json::from_str(header_json).map_err(fmt_err)?;
        Self::from_parts(header, csv_data)
    }

    fn from_parts(header: Header, csv_data: &str) -> Result<Self> {
        let group = GroupParams::from_shape(header.n, header.m)
            .or_else(|_| GroupParams::heisenberg(header.n))
            .map_err(fmt_err)?;
        let nz = header.zeta_grid.len();
        let mut values = vec![f64::NAN; header.r_grid.len() * nz];
        let mut rdr = csv::Reader::from_reader(csv_data.as_bytes());
        for row in rdr.deserialize::<Row>() {
            let row = row.map_err(fmt_err)?;
            let i = locate(&header.r_grid, row.r).ok_or_else(|| MathError::Format(format!("r = {} not on grid", row.r)))?;
            let j = locate(&header.zeta_grid, row.zeta)
                .ok_or_else(|| MathError::Format(format!("zeta = {} not on grid", row.zeta)))?;
            values[i * nz + j] = row.value;
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(MathError::Format("profile CSV does not cover the whole grid".into()));
        }
        let mut p = Self::new(&group, header.r_grid, header.zeta_grid, values, header.decay)
            .map_err(|e| MathError::Format(e.to_string()))?;
        p.shape = GroupShape { n: header.n, m: header.m };
        Ok(p)
    }
}

fn locate(grid: &[f64], x: f64) -> Option<usize> {
    grid.iter().position(|&g| (g - x).abs() <= 1e-12 * g.abs().max(1e-300))
}

fn fmt_err(e: impl std::fmt::Display) -> MathError {
    MathError::Format(e.to_string())
}

impl BiRadial for BiRadialProfile {
    fn value(&self, r: f64, zeta: f64) -> f64 {
        self.eval(r, zeta)
    }
}
