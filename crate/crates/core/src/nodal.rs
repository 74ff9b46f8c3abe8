//! Nodal-domain counting on a sampled sign grid.
//!
//! The fundamental rectangle is split into `nx * ny` cells sampled at their
//! centres. Cells with `|f| <= zero_tol` are dropped; the rest are joined to
//! same-sign 4-neighbours, including neighbours across glued edges:
//!
//! * Klein bottle: `(i, 0) ~ (i, ny-1)` and `(0, j) ~ (nx-1, ny-1-j)`;
//! * cylinder: `(i, 0) ~ (i, ny-1)` only, the ends carry Dirichlet data.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::Serialize;

use crate::eigenfunctions::{eigenspace_basis, BasisMode, Eigenfunction};
use crate::error::{Error, Result};
use crate::spectrum::enumerate_spectrum;
use crate::surfaces::{SurfaceDescriptor, SurfaceKind};

/// Cells per length `pi` used when no resolution is given.
pub const DEFAULT_BASE_N: usize = 256;
/// Largest fraction of zero cells accepted by [`count_nodal_domains`].
pub const MAX_ZERO_FRACTION: f64 = 0.01;
const MIN_CELLS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct SignGrid {
    pub nx: usize,
    pub ny: usize,
    /// Row-major, `values[j * nx + i]` is the sign at cell `(i, j)`.
    pub values: Vec<i8>,
    pub surface: SurfaceDescriptor,
}

impl SignGrid {
    pub fn sign(&self, i: usize, j: usize) -> i8 {
        self.values[j * self.nx + i]
    }

    pub fn zero_cells(&self) -> usize {
        self.values.iter().filter(|&&s| s == 0).count()
    }

    pub fn zero_fraction(&self) -> f64 {
        self.zero_cells() as f64 / self.values.len() as f64
    }

    /// Cell centre of `(i, j)`.
    pub fn center(&self, i: usize, j: usize) -> (f64, f64) {
        let (lx, ly) = self.surface.fundamental_domain();
        (
            (i as f64 + 0.5) * lx / self.nx as f64,
            (j as f64 + 0.5) * ly / self.ny as f64,
        )
    }

    /// Writes a binary PPM, `x` to the right and `y` upwards.
    pub fn write_ppm<W: Write>(&self, mut out: W) -> io::Result<()> {
        const POSITIVE: [u8; 3] = [214, 69, 65];
        const NEGATIVE: [u8; 3] = [52, 101, 164];
        const ZERO: [u8; 3] = [0, 0, 0];
        write!(out, "P6\n{} {}\n255\n", self.nx, self.ny)?;
        let mut row = Vec::with_capacity(3 * self.nx);
        for j in (0..self.ny).rev() {
            row.clear();
            for i in 0..self.nx {
                row.extend_from_slice(match self.sign(i, j) {
                    1 => &POSITIVE,
                    -1 => &NEGATIVE,
                    _ => &ZERO,
                });
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NodalResult {
    pub count: usize,
    pub positive: usize,
    pub negative: usize,
    pub nx: usize,
    pub ny: usize,
    /// Count unchanged after doubling the resolution.
    pub stable: bool,
    pub zero_fraction: f64,
}

/// Zero band used when none is given: `1e-9` times the l1 norm of the coefficients.
pub fn default_zero_tol(f: &Eigenfunction) -> f64 {
    1e-9 * f.coefficient_l1()
}

pub fn sample(f: &Eigenfunction, nx: usize, ny: usize, zero_tol: f64) -> Result<SignGrid> {
    if nx < MIN_CELLS || ny < MIN_CELLS {
        return Err(Error::InvalidParameter(format!(
            "grid {nx}x{ny} is too coarse (minimum {MIN_CELLS} per side)"
        )));
    }
    if zero_tol.is_nan() || zero_tol <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "zero tolerance must be positive, got {zero_tol}"
        )));
    }
    let surface = f.surface;
    if surface.is_klein() && !ny.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "Klein bottle grids need an even number of rows, got {ny}"
        )));
    }
    let (lx, ly) = surface.fundamental_domain();
    let (hx, hy) = (lx / nx as f64, ly / ny as f64);

    // f(x_i, y_j) = sum_t (c_t X_t(x_i)) Y_t(y_j)
    let factors: Vec<(Vec<f64>, Vec<f64>)> = f
        .terms
        .iter()
        .map(|(mode, c)| {
            let xs = (0..nx)
                .map(|i| c * mode.x_factor(&surface, (i as f64 + 0.5) * hx))
                .collect();
            let ys = (0..ny)
                .map(|j| mode.y_factor(&surface, (j as f64 + 0.5) * hy))
                .collect();
            (xs, ys)
        })
        .collect();

    let mut values = vec![0i8; nx * ny];
    let mut row = vec![0.0; nx];
    for (j, out) in values.chunks_exact_mut(nx).enumerate() {
        row.fill(0.0);
        for (xs, ys) in &factors {
            let y = ys[j];
            for (acc, x) in row.iter_mut().zip(xs) {
                *acc += x * y;
            }
        }
        for (s, v) in out.iter_mut().zip(&row) {
            *s = if v.abs() <= zero_tol {
                0
            } else if *v > 0.0 {
                1
            } else {
                -1
            };
        }
    }
    Ok(SignGrid {
        nx,
        ny,
        values,
        surface,
    })
}

struct DisjointSets {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSets {
    fn new(len: usize) -> Self {
        DisjointSets {
            parent: (0..len as u32).collect(),
            rank: vec![0; len],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
    }
}

pub fn count_nodal_domains(grid: &SignGrid) -> Result<NodalResult> {
    let zero_fraction = grid.zero_fraction();
    if zero_fraction >= MAX_ZERO_FRACTION {
        return Err(Error::TooManyZeroCells { zero_fraction });
    }
    let (nx, ny) = (grid.nx, grid.ny);
    let klein = grid.surface.kind() == SurfaceKind::KleinBottle;
    let index = |i: usize, j: usize| (j * nx + i) as u32;
    let mut sets = DisjointSets::new(nx * ny);
    let join = |sets: &mut DisjointSets, a: (usize, usize), b: (usize, usize)| {
        let s = grid.sign(a.0, a.1);
        if s != 0 && s == grid.sign(b.0, b.1) {
            sets.union(index(a.0, a.1), index(b.0, b.1));
        }
    };

    for j in 0..ny {
        for i in 0..nx {
            if i + 1 < nx {
                join(&mut sets, (i, j), (i + 1, j));
            }
            join(&mut sets, (i, j), (i, (j + 1) % ny));
        }
        if klein {
            join(&mut sets, (0, j), (nx - 1, ny - 1 - j));
        }
    }

    let (mut positive, mut negative) = (0, 0);
    for j in 0..ny {
        for i in 0..nx {
            let id = index(i, j);
            if grid.sign(i, j) != 0 && sets.find(id) == id {
                if grid.sign(i, j) > 0 {
                    positive += 1;
                } else {
                    negative += 1;
                }
            }
        }
    }
    Ok(NodalResult {
        count: positive + negative,
        positive,
        negative,
        nx,
        ny,
        stable: false,
        zero_fraction,
    })
}

/// Grid shape with `cells_per_pi` cells per length `pi` along both axes.
pub fn grid_shape(surface: &SurfaceDescriptor, cells_per_pi: usize) -> (usize, usize) {
    let (lx, ly) = surface.fundamental_domain();
    let nx = ((cells_per_pi as f64 * lx / PI).round() as usize).max(MIN_CELLS);
    let mut ny = ((cells_per_pi as f64 * ly / PI).round() as usize).max(MIN_CELLS);
    if surface.is_klein() && ny % 2 == 1 {
        ny += 1;
    }
    (nx, ny)
}

/// Counts at `base_n`, `2 base_n` and if needed `4 base_n` cells per `pi`;
/// the count is accepted once two consecutive resolutions agree.
pub fn stable_count(f: &Eigenfunction, base_n: usize) -> Result<NodalResult> {
    if base_n < 64 {
        return Err(Error::InvalidParameter(format!(
            "base resolution must be at least 64, got {base_n}"
        )));
    }
    let tol = default_zero_tol(f);
    let count_at = |n: usize| -> Result<NodalResult> {
        let (nx, ny) = grid_shape(&f.surface, n);
        count_nodal_domains(&sample(f, nx, ny, tol)?)
    };
    let mut widths = vec![base_n, 2 * base_n];
    let mut results = vec![count_at(base_n)?, count_at(2 * base_n)?];
    if results[0].count != results[1].count {
        widths.push(4 * base_n);
        results.push(count_at(4 * base_n)?);
    }
    let [.., previous, last] = results.as_slice() else {
        unreachable!("at least two resolutions are sampled")
    };
    if previous.count == last.count {
        Ok(NodalResult {
            stable: true,
            ..*last
        })
    } else {
        Err(Error::UnstableCount {
            counts: results.iter().map(|r| r.count).collect(),
            widths,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnstableSample {
    pub coefficients: Vec<f64>,
    pub counts: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub eigenvalue: f64,
    pub basis: Vec<BasisMode>,
    pub samples: usize,
    /// Largest stable count, `None` if no sample was stable.
    pub max_count: Option<usize>,
    /// Coefficients of a function attaining `max_count`.
    pub argmax: Vec<f64>,
    /// Stable count -> number of samples.
    pub histogram: BTreeMap<usize, usize>,
    pub unstable: Vec<UnstableSample>,
}

impl SweepResult {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }
}

/// Unit vectors in `R^d` on a grid of hyperspherical angles.
///
/// The `d - 2` polar angles take `samples` midpoints of `(0, pi)` and the last
/// angle takes `samples` points of `[0, pi)`, which keeps one vector from each
/// pair `{v, -v}` (nodal counts are invariant under sign).
pub fn sphere_quotient_grid(dimension: usize, samples: usize) -> Vec<Vec<f64>> {
    if dimension == 0 {
        return Vec::new();
    }
    if dimension == 1 {
        return vec![vec![1.0]];
    }
    let polar: Vec<f64> = (0..samples)
        .map(|k| (k as f64 + 0.5) * PI / samples as f64)
        .collect();
    let azimuth: Vec<f64> = (0..samples)
        .map(|k| k as f64 * PI / samples as f64)
        .collect();

    let mut angle_sets: Vec<Vec<f64>> = vec![Vec::new()];
    for level in 0..dimension - 1 {
        let choices = if level + 1 == dimension - 1 {
            &azimuth
        } else {
            &polar
        };
        angle_sets = angle_sets
            .into_iter()
            .flat_map(|prefix| {
                choices.iter().map(move |&a| {
                    let mut next = prefix.clone();
                    next.push(a);
                    next
                })
            })
            .collect();
    }
    angle_sets
        .into_iter()
        .map(|angles| {
            let mut v = Vec::with_capacity(dimension);
            let mut radius = 1.0;
            for a in &angles {
                v.push(radius * a.cos());
                radius *= a.sin();
            }
            v.push(radius);
            v
        })
        .collect()
}

pub fn eigenspace_sweep(
    surface: &SurfaceDescriptor,
    eigenvalue: f64,
    samples_per_dim: usize,
) -> Result<SweepResult> {
    eigenspace_sweep_with(surface, eigenvalue, samples_per_dim, DEFAULT_BASE_N)
}

/// Samples the unit sphere of the eigenspace of `eigenvalue` and records the
/// stable nodal count of each sample. Samples run in parallel; the result
/// does not depend on scheduling.
pub fn eigenspace_sweep_with(
    surface: &SurfaceDescriptor,
    eigenvalue: f64,
    samples_per_dim: usize,
    base_n: usize,
) -> Result<SweepResult> {
    if samples_per_dim == 0 {
        return Err(Error::InvalidParameter(
            "samples_per_dim must be positive".into(),
        ));
    }
    let spectrum = enumerate_spectrum(surface, eigenvalue.max(0.0) + 1.0)?;
    let entry = spectrum
        .find(eigenvalue)
        .ok_or_else(|| Error::NotAnEigenvalue {
            value: eigenvalue,
            surface: surface.name(),
        })?;
    let basis = eigenspace_basis(surface, entry);
    if basis.len() > 5 {
        return Err(Error::DimensionTooLarge(basis.len()));
    }

    let points = sphere_quotient_grid(basis.len(), samples_per_dim);
    let outcomes = points
        .par_iter()
        .map(|coefficients| {
            let terms = basis
                .iter()
                .copied()
                .zip(coefficients.iter().copied())
                .collect();
            let f = Eigenfunction::new(surface, terms)?;
            match stable_count(&f, base_n) {
                Ok(r) => Ok(Ok(r.count)),
                Err(Error::UnstableCount { counts, .. }) => Ok(Err(counts)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut result = SweepResult {
        eigenvalue: entry.value,
        basis,
        samples: points.len(),
        max_count: None,
        argmax: Vec::new(),
        histogram: BTreeMap::new(),
        unstable: Vec::new(),
    };
    for (coefficients, outcome) in points.into_iter().zip(outcomes) {
        match outcome {
            Ok(count) => {
                *result.histogram.entry(count).or_default() += 1;
                if result.max_count.is_none_or(|m| count > m) {
                    result.max_count = Some(count);
                    result.argmax = coefficients;
                }
            }
            Err(counts) => result.unstable.push(UnstableSample {
                coefficients,
                counts,
            }),
        }
    }
    Ok(result)
}

/// Angular samples per coordinate used by default for a given eigenspace dimension.
pub fn default_samples_per_dim(dimension: usize) -> usize {
    match dimension {
        0 | 1 => 1,
        2 => 64,
        3 => 32,
        4 => 16,
        _ => 8,
    }
}
