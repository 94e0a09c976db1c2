//! Weighted finite-dimensional Hilbert spaces standing in for `L²(Ω)`.
//!
//! A [`GridFunction`] stores nodal values on a uniform grid of the unit
//! interval or the unit square. The inner product is the trapezoidal
//! quadrature `Σ wᵢ uᵢ vᵢ` carried by an [`InnerProductSpec`]; with these
//! weights the space is a genuine Hilbert space and integrals of
//! piecewise-linear functions are exact.
//!
//! A one-node [`Grid::Point`] with weight 1 is also provided so scalar
//! calibration problems can use the same machinery.

use std::fmt;
use std::io::{BufRead, Write};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Uniform grid on `(0,1)` or `(0,1)²`, or a single calibration node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Grid {
    /// A single node of weight 1.
    Point,
    /// `n` nodes on `[0,1]`.
    Line(usize),
    /// `n × n` nodes on `[0,1]²`, stored row-major (`iy * n + ix`).
    Square(usize),
}

impl Grid {
    pub fn line(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2 nodes, got {n}")));
        }
        Ok(Grid::Line(n))
    }

    pub fn square(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidGrid(format!("need n >= 2 nodes per side, got {n}")));
        }
        Ok(Grid::Square(n))
    }

    /// Nodes per side (1 for [`Grid::Point`]).
    pub fn n(&self) -> usize {
        match *self {
            Grid::Point => 1,
            Grid::Line(n) | Grid::Square(n) => n,
        }
    }

    /// Total node count.
    pub fn len(&self) -> usize {
        match *self {
            Grid::Point => 1,
            Grid::Line(n) => n,
            Grid::Square(n) => n * n,
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Spatial dimension; 0 for the calibration point.
    pub fn dim(&self) -> u8 {
        match self {
            Grid::Point => 0,
            Grid::Line(_) => 1,
            Grid::Square(_) => 2,
        }
    }

    /// Mesh width `1/(n-1)`; the point grid reports 1.
    pub fn h(&self) -> f64 {
        match *self {
            Grid::Point => 1.0,
            Grid::Line(n) | Grid::Square(n) => 1.0 / (n - 1) as f64,
        }
    }

    /// Coordinate of node `i` along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        match *self {
            Grid::Point => 0.0,
            Grid::Line(n) | Grid::Square(n) => {
                if i + 1 == n {
                    1.0
                } else {
                    i as f64 * self.h()
                }
            }
        }
    }

    fn weight_1d(&self, i: usize) -> f64 {
        let n = self.n();
        let h = self.h();
        if i == 0 || i + 1 == n {
            0.5 * h
        } else {
            h
        }
    }

    /// Trapezoidal quadrature weight of node `idx`.
    pub fn weight(&self, idx: usize) -> f64 {
        match *self {
            Grid::Point => 1.0,
            Grid::Line(_) => self.weight_1d(idx),
            Grid::Square(n) => self.weight_1d(idx / n) * self.weight_1d(idx % n),
        }
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Point => write!(f, "point"),
            Grid::Line(n) => write!(f, "line({n})"),
            Grid::Square(n) => write!(f, "square({n}x{n})"),
        }
    }
}

/// Nodal values of an element of the discretized space.
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                found: values.len(),
            });
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { grid, values })
    }

    /// Constructor for values already known to be finite and sized.
    pub(crate) fn from_parts(grid: Grid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self::from_parts(grid, vec![c; grid.len()])
    }

    /// Samples `f` at the nodes of `grid`. 2-D grids call `f(x, y)`.
    pub fn sample(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let values = match grid {
            Grid::Point => vec![f(0.0, 0.0)],
            Grid::Line(n) => (0..n).map(|i| f(grid.coord(i), 0.0)).collect(),
            Grid::Square(n) => (0..n * n)
                .map(|idx| f(grid.coord(idx % n), grid.coord(idx / n)))
                .collect(),
        };
        Self::new(grid, values)
    }

    pub fn sample_1d(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::sample(Grid::line(n)?, |x, _| f(x))
    }

    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(Grid::Point, vec![value])
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn h(&self) -> f64 {
        self.grid.h()
    }

    pub fn same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        Ok(())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> GridFunction {
        Self::from_parts(self.grid, self.values.iter().map(|&v| f(v)).collect())
    }

    pub fn zip_map(&self, other: &GridFunction, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        Self::from_parts(
            self.grid,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    /// `self + alpha * x`
    pub fn axpy(&self, alpha: f64, x: &GridFunction) -> GridFunction {
        self.zip_map(x, |a, b| a + alpha * b)
    }

    pub fn scale(&self, alpha: f64) -> GridFunction {
        self.map(|v| alpha * v)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_diff(&self, other: &GridFunction) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }
}

impl Add for &GridFunction {
    type Output = GridFunction;
    fn add(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a + b)
    }
}

impl Sub for &GridFunction {
    type Output = GridFunction;
    fn sub(self, rhs: &GridFunction) -> GridFunction {
        self.zip_map(rhs, |a, b| a - b)
    }
}

impl Mul<&GridFunction> for f64 {
    type Output = GridFunction;
    fn mul(self, rhs: &GridFunction) -> GridFunction {
        rhs.scale(self)
    }
}

impl Neg for &GridFunction {
    type Output = GridFunction;
    fn neg(self) -> GridFunction {
        self.scale(-1.0)
    }
}

/// Quadrature weights defining `⟨·,·⟩_H` on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerProductSpec {
    grid: Grid,
    weights: Arc<[f64]>,
}

impl InnerProductSpec {
    /// Tensor-product trapezoidal weights; they sum to `|Ω| = 1`.
    pub fn trapezoidal(grid: Grid) -> Self {
        let weights: Vec<f64> = (0..grid.len()).map(|i| grid.weight(i)).collect();
        Self {
            grid,
            weights: weights.into(),
        }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    fn check(&self, u: &GridFunction) -> Result<()> {
        if u.grid != self.grid {
            return Err(Error::DimensionMismatch {
                expected: self.grid.len(),
                found: u.len(),
            });
        }
        Ok(())
    }

    pub fn inner(&self, u: &GridFunction, v: &GridFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        Ok(self.dot(u, v))
    }

    pub fn norm(&self, u: &GridFunction) -> Result<f64> {
        self.check(u)?;
        Ok(self.dot(u, u).sqrt())
    }

    /// Unchecked inner product; panics on a grid mismatch.
    pub fn dot(&self, u: &GridFunction, v: &GridFunction) -> f64 {
        assert!(u.grid == self.grid && v.grid == self.grid, "grid mismatch");
        self.weights
            .iter()
            .zip(u.values.iter().zip(&v.values))
            .map(|(w, (a, b))| w * a * b)
            .sum()
    }

    /// Unchecked norm; panics on a grid mismatch.
    pub fn norm_of(&self, u: &GridFunction) -> f64 {
        self.dot(u, u).sqrt()
    }

    pub fn distance(&self, u: &GridFunction, v: &GridFunction) -> f64 {
        assert!(u.grid == self.grid && v.grid == self.grid, "grid mismatch");
        self.weights
            .iter()
            .zip(u.values.iter().zip(&v.values))
            .map(|(w, (a, b))| w * (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Quadrature mean `Σ wᵢ uᵢ` (equal to the integral since `|Ω| = 1`).
    pub fn mean(&self, u: &GridFunction) -> f64 {
        self.weights.iter().zip(&u.values).map(|(w, a)| w * a).sum()
    }
}

pub fn inner(u: &GridFunction, v: &GridFunction, spec: &InnerProductSpec) -> Result<f64> {
    spec.inner(u, v)
}

pub fn norm(u: &GridFunction, spec: &InnerProductSpec) -> Result<f64> {
    spec.norm(u)
}

/// Discrete Dirichlet form `½ Σ (u_{i+1} − u_i)² / h` over adjacent node
/// pairs. On 2-D grids each row and column term carries the transverse
/// trapezoidal weight, so the sum approximates `½∫|∇u|²` and is exact for
/// piecewise-linear data in 1-D. The calibration point has no neighbours.
pub fn forward_difference_energy_quadratic_form(u: &GridFunction) -> f64 {
    let grid = u.grid();
    let v = u.values();
    match grid {
        Grid::Point => 0.0,
        Grid::Line(_) => {
            let h = grid.h();
            0.5 * v.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / h
        }
        Grid::Square(n) => {
            let h = grid.h();
            let mut total = 0.0;
            for a in 0..n {
                let wa = grid.weight_1d(a);
                let mut along_x = 0.0;
                let mut along_y = 0.0;
                for b in 0..n - 1 {
                    along_x += (v[a * n + b + 1] - v[a * n + b]).powi(2);
                    along_y += (v[(b + 1) * n + a] - v[b * n + a]).powi(2);
                }
                total += wa * (along_x + along_y);
            }
            0.5 * total / h
        }
    }
}

#[derive(Serialize, Deserialize)]
struct GridFunctionJson {
    n: usize,
    h: f64,
    dim: u8,
    values: Vec<f64>,
}

fn grid_from_header(n: usize, h: f64, dim: u8) -> Result<Grid> {
    let grid = match dim {
        0 if n == 1 => Grid::Point,
        1 => Grid::line(n)?,
        2 => Grid::square(n)?,
        _ => return Err(Error::Parse(format!("unsupported dim={dim} with n={n}"))),
    };
    if (grid.h() - h).abs() > 1e-12 {
        return Err(Error::InvalidGrid(format!(
            "h={h} does not match a uniform grid with n={n} (expected {})",
            grid.h()
        )));
    }
    Ok(grid)
}

impl GridFunction {
    /// Writes the flat CSV form: a `# n=<n> h=<h> dim=<d>` header, then
    /// one value per line with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(
            out,
            "# n={} h={} dim={}",
            self.grid.n(),
            self.grid.h(),
            self.grid.dim()
        )?;
        for v in &self.values {
            writeln!(out, "{v:.16e}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty grid function file".into()))??;
        let header = header
            .strip_prefix('#')
            .ok_or_else(|| Error::Parse(format!("missing `#` header: {header:?}")))?;
        let (mut n, mut h, mut dim) = (None, None, None);
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad header field {field:?}")))?;
            let bad = |_| Error::Parse(format!("bad header value {field:?}"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "h" => h = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "dim" => dim = Some(value.parse::<u8>().map_err(|e| bad(e.to_string()))?),
                _ => return Err(Error::Parse(format!("unknown header key {key:?}"))),
            }
        }
        let (n, h, dim) = match (n, h, dim) {
            (Some(n), Some(h), Some(dim)) => (n, h, dim),
            _ => return Err(Error::Parse("header must define n, h and dim".into())),
        };
        let grid = grid_from_header(n, h, dim)?;
        let mut values = Vec::with_capacity(grid.len());
        for (lineno, line) in lines.enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let v = line
                .parse::<f64>()
                .map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 2)))?;
            values.push(v);
        }
        Self::new(grid, values)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&GridFunctionJson {
            n: self.grid.n(),
            h: self.grid.h(),
            dim: self.grid.dim(),
            values: self.values.clone(),
        })?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: GridFunctionJson = serde_json::from_str(text)?;
        let grid = grid_from_header(raw.n, raw.h, raw.dim)?;
        Self::new(grid, raw.values)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_one_has_unit_inner_product() {
        for n in [2, 3, 17, 100] {
            let g = Grid::line(n).unwrap();
            let spec = InnerProductSpec::trapezoidal(g);
            let one = GridFunction::constant(g, 1.0);
            assert!((spec.inner(&one, &one).unwrap() - 1.0).abs() < 1e-14);
            assert!((spec.norm(&one).unwrap() - 1.0).abs() < 1e-14);
        }
        let sq = Grid::square(9).unwrap();
        let spec = InnerProductSpec::trapezoidal(sq);
        assert!((spec.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn antisymmetric_pair_is_orthogonal() {
        let n = 11;
        let u = GridFunction::sample_1d(n, |x| if x < 0.5 { 1.0 } else if x > 0.5 { -1.0 } else { 0.0 })
            .unwrap();
        let v = GridFunction::constant(u.grid(), 1.0);
        let spec = InnerProductSpec::trapezoidal(u.grid());
        assert!(spec.inner(&u, &v).unwrap().abs() < 1e-15);
    }

    #[test]
    fn ramp_integrates_to_one_half() {
        let u = GridFunction::sample_1d(101, |x| x).unwrap();
        let one = GridFunction::constant(u.grid(), 1.0);
        let spec = InnerProductSpec::trapezoidal(u.grid());
        assert!((spec.inner(&u, &one).unwrap() - 0.5).abs() < 1e-4);
    }

    #[test]
    fn sine_norm_matches_integral() {
        let u = GridFunction::sample_1d(201, |x| (PI * x).sin()).unwrap();
        let spec = InnerProductSpec::trapezoidal(u.grid());
        assert_eq!(spec.norm(&GridFunction::zeros(u.grid())).unwrap(), 0.0);
        assert!((spec.norm(&u).unwrap() - 0.5f64.sqrt()).abs() < 1e-4);
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let a = GridFunction::constant(Grid::line(5).unwrap(), 1.0);
        let b = GridFunction::constant(Grid::line(6).unwrap(), 1.0);
        let spec = InnerProductSpec::trapezoidal(a.grid());
        assert!(matches!(spec.inner(&a, &b), Err(Error::DimensionMismatch { .. })));
        assert!(spec.norm(&b).is_err());
    }

    #[test]
    fn construction_rejects_bad_data() {
        assert!(Grid::line(1).is_err());
        assert!(GridFunction::new(Grid::Line(3), vec![0.0, f64::NAN, 1.0]).is_err());
        assert!(GridFunction::new(Grid::Line(3), vec![0.0, 1.0]).is_err());
    }

    #[test]
    fn dirichlet_form_examples() {
        let c = GridFunction::constant(Grid::Line(33), 2.5);
        assert_eq!(forward_difference_energy_quadratic_form(&c), 0.0);
        let ramp = GridFunction::sample_1d(57, |x| x).unwrap();
        assert!((forward_difference_energy_quadratic_form(&ramp) - 0.5).abs() < 1e-12);
        let s = GridFunction::sample_1d(201, |x| (PI * x).sin()).unwrap();
        assert!((forward_difference_energy_quadratic_form(&s) - PI * PI / 4.0).abs() < 1e-2);
    }

    #[test]
    fn dirichlet_form_in_two_dimensions() {
        let g = Grid::square(21).unwrap();
        let ramp = GridFunction::sample(g, |x, _| x).unwrap();
        assert!((forward_difference_energy_quadratic_form(&ramp) - 0.5).abs() < 1e-12);
        let both = GridFunction::sample(g, |x, y| x + y).unwrap();
        assert!((forward_difference_energy_quadratic_form(&both) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn csv_and_json_round_trip_bit_exact() {
        let u = GridFunction::sample_1d(13, |x| (7.3 * x).exp().sin() / 3.0).unwrap();
        let back = GridFunction::read_csv(u.to_csv_string().as_bytes()).unwrap();
        assert_eq!(u, back);
        let back = GridFunction::from_json(&u.to_json().unwrap()).unwrap();
        assert_eq!(u, back);

        let g = Grid::square(4).unwrap();
        let u = GridFunction::sample(g, |x, y| x * 1e-300 + y / 3.0).unwrap();
        assert_eq!(u, GridFunction::read_csv(u.to_csv_string().as_bytes()).unwrap());
        let p = GridFunction::scalar(-0.1).unwrap();
        assert_eq!(p, GridFunction::read_csv(p.to_csv_string().as_bytes()).unwrap());
    }

    #[test]
    fn csv_header_is_validated() {
        assert!(GridFunction::read_csv("# n=3 h=0.4 dim=1\n0\n0\n0\n".as_bytes()).is_err());
        assert!(GridFunction::read_csv("n=3 h=0.5 dim=1\n".as_bytes()).is_err());
        assert!(GridFunction::read_csv("# n=3 h=0.5 dim=1\n0\n0\n".as_bytes()).is_err());
        assert!(GridFunction::read_csv("# n=3 h=0.5 dim=1\n0\n1\n2\n".as_bytes()).is_ok());
    }
}
