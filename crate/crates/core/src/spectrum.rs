//! Laplace spectrum with multiplicities, label ranges and Weyl counting.
//!
//! Eigenvalues come from lattice points `(m, n)` of the form `p m^2 + q n^2`
//! (see [`SurfaceDescriptor::quadratic_form`]). Each point contributes 0, 1 or
//! 2 real eigenfunctions depending on the surface.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::surfaces::{Preset, SurfaceDescriptor, SurfaceKind};

/// A lattice point producing an eigenvalue, with the number of independent
/// real eigenfunctions it accounts for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Representation {
    pub m: u32,
    pub n: u32,
    pub contribution: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
    pub k_min: usize,
    pub k_max: usize,
    pub reps: Vec<Representation>,
}

impl SpectrumEntry {
    /// `value / k_min`, the quantity compared against the Faber-Krahn ratio.
    pub fn ratio(&self) -> f64 {
        self.value / self.k_min as f64
    }
}

/// Distinct eigenvalues strictly below `lambda_max`, in increasing order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Spectrum {
    pub surface: SurfaceDescriptor,
    pub lambda_max: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    /// Number of eigenvalues (with multiplicity) strictly below `lambda`.
    /// Only meaningful for `lambda <= lambda_max`.
    pub fn count_below(&self, lambda: f64) -> usize {
        self.entries
            .iter()
            .take_while(|e| e.value < lambda)
            .map(|e| e.multiplicity)
            .sum()
    }

    /// Entry whose value matches `value` to relative precision 1e-9.
    pub fn find(&self, value: f64) -> Option<&SpectrumEntry> {
        self.entries
            .iter()
            .find(|e| (e.value - value).abs() <= 1e-9 * value.abs().max(1.0))
    }

    /// Entry carrying label `k`.
    pub fn by_label(&self, k: usize) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| e.k_min <= k && k <= e.k_max)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylValue {
    pub lambda: f64,
    pub count_exact: usize,
    pub count_lower_bound: f64,
}

/// Constants of a lower bound `W(l) >= leading*l - sqrt_coeff*sqrt(l) - constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeylBound {
    pub leading: f64,
    pub sqrt_coeff: f64,
    pub constant: f64,
}

impl WeylBound {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.leading * lambda - self.sqrt_coeff * lambda.sqrt() - self.constant
    }
}

/// Number of real eigenfunctions carried by the lattice point `(m, n)`.
pub fn contribution(kind: SurfaceKind, m: u32, n: u32) -> u8 {
    match kind {
        SurfaceKind::KleinBottle => {
            if m >= 1 && n >= 1 {
                2
            } else if m == 0 {
                1
            } else if m.is_multiple_of(2) {
                2
            } else {
                0
            }
        }
        SurfaceKind::CylinderDirichlet => match (m, n) {
            (0, _) => 0,
            (_, 0) => 1,
            _ => 2,
        },
    }
}

pub fn enumerate_spectrum(surface: &SurfaceDescriptor, lambda_max: f64) -> Result<Spectrum> {
    if !(lambda_max.is_finite() && lambda_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda_max must be positive and finite, got {lambda_max}"
        )));
    }
    let points = lattice_points_below(surface, lambda_max)
        .filter_map(|(m, n, value)| {
            let contribution = contribution(surface.kind(), m, n);
            (contribution > 0).then_some((value, Representation { m, n, contribution }))
        })
        .collect::<Vec<_>>();

    let groups = match integral_form(surface) {
        Some((p, q)) => group_exact(points, p, q),
        None => group_by_tolerance(points),
    };

    let mut next_label = 1;
    let entries = groups
        .into_iter()
        .map(|(value, mut reps)| {
            reps.sort_by_key(|r| (r.m, r.n));
            let multiplicity: usize = reps.iter().map(|r| usize::from(r.contribution)).sum();
            let k_min = next_label;
            next_label += multiplicity;
            SpectrumEntry {
                value,
                multiplicity,
                k_min,
                k_max: next_label - 1,
                reps,
            }
        })
        .collect();

    Ok(Spectrum {
        surface: *surface,
        lambda_max,
        entries,
    })
}

/// Lattice points `(m, n)` in the first quadrant with eigenvalue `< lambda_max`.
fn lattice_points_below(
    surface: &SurfaceDescriptor,
    lambda_max: f64,
) -> impl Iterator<Item = (u32, u32, f64)> + '_ {
    let (p, q) = surface.quadratic_form();
    let m_max = (lambda_max / p).sqrt().ceil() as u32;
    let n_max = (lambda_max / q).sqrt().ceil() as u32;
    (0..=m_max).flat_map(move |m| {
        (0..=n_max).filter_map(move |n| {
            let value = surface.lattice_eigenvalue(m, n);
            (value < lambda_max).then_some((m, n, value))
        })
    })
}

/// Integer coefficients of the quadratic form, when it has them.
fn integral_form(surface: &SurfaceDescriptor) -> Option<(u64, u64)> {
    let (p, q) = surface.quadratic_form();
    let as_int = |v: f64| {
        let r = v.round();
        ((v - r).abs() <= 1e-12 * r.max(1.0) && r >= 1.0).then_some(r as u64)
    };
    Some((as_int(p)?, as_int(q)?))
}

fn group_exact(
    points: Vec<(f64, Representation)>,
    p: u64,
    q: u64,
) -> Vec<(f64, Vec<Representation>)> {
    let mut map: BTreeMap<u64, Vec<Representation>> = BTreeMap::new();
    for (_, rep) in points {
        let key = p * u64::from(rep.m).pow(2) + q * u64::from(rep.n).pow(2);
        map.entry(key).or_default().push(rep);
    }
    map.into_iter().map(|(k, reps)| (k as f64, reps)).collect()
}

fn group_by_tolerance(mut points: Vec<(f64, Representation)>) -> Vec<(f64, Vec<Representation>)> {
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut groups: Vec<(f64, Vec<Representation>)> = Vec::new();
    for (value, rep) in points {
        match groups.last_mut() {
            Some((v, reps)) if (value - *v).abs() <= 1e-10 * v.max(1.0) => reps.push(rep),
            _ => groups.push((value, vec![rep])),
        }
    }
    groups
}

/// Number of lattice points `(m, n)`, both non-negative, with
/// `p m^2 + q n^2 < lambda`. Klein bottles only.
pub fn lattice_count(surface: &SurfaceDescriptor, lambda: f64) -> Result<u64> {
    require_klein(surface, "lattice_count")?;
    if lambda <= 0.0 {
        return Ok(0);
    }
    let (p, q) = surface.quadratic_form();
    let count = (0..=strict_square_count(lambda, p))
        .map(|m| 1 + strict_square_count(lambda - p * (m as f64).powi(2), q))
        .sum();
    Ok(count)
}

/// Weyl counting function: eigenvalues strictly below `lambda`, with multiplicity.
pub fn weyl_exact(surface: &SurfaceDescriptor, lambda: f64) -> Result<usize> {
    if lambda.is_nan() {
        return Err(Error::InvalidParameter("lambda is NaN".into()));
    }
    if lambda <= 0.0 {
        return Ok(0);
    }
    Ok(enumerate_spectrum(surface, lambda)?.count_below(lambda))
}

/// Weyl counting function of a Klein bottle through the lattice count:
/// `W = 2 L - 2 #{m >= 1} - #{m = 0} + 2 #{m >= 2 even}` where the three
/// counts are taken over the axes of the lattice region.
pub fn weyl_closed_form(surface: &SurfaceDescriptor, lambda: f64) -> Result<u64> {
    require_klein(surface, "weyl_closed_form")?;
    if lambda <= 0.0 {
        return Ok(0);
    }
    let (p, q) = surface.quadratic_form();
    let lattice = lattice_count(surface, lambda)?;
    let horizontal = strict_square_count(lambda, p);
    let vertical = strict_square_count(lambda, q) + 1;
    let horizontal_even = strict_square_count(lambda, 4.0 * p);
    Ok(2 * lattice + 2 * horizontal_even - 2 * horizontal - vertical)
}

/// Constants of the explicit Weyl lower bound known for the presets.
pub fn weyl_bound_constants(surface: &SurfaceDescriptor) -> Result<WeylBound> {
    let leading = surface.area / (4.0 * std::f64::consts::PI);
    let (sqrt_coeff, constant) = match surface.preset {
        Some(Preset::K1) => (2.0, 3.0),
        Some(Preset::K2) => (1.5, 2.0),
        Some(Preset::CHalf) => (2.0, 2.0),
        Some(Preset::C1) => (3.0, 2.0),
        None => {
            return Err(Error::Unsupported {
                operation: "weyl_lower_bound",
                surface: surface.name(),
            })
        }
    };
    Ok(WeylBound {
        leading,
        sqrt_coeff,
        constant,
    })
}

pub fn weyl_lower_bound(surface: &SurfaceDescriptor, lambda: f64) -> Result<f64> {
    Ok(weyl_bound_constants(surface)?.eval(lambda.max(0.0)))
}

pub fn weyl_value(surface: &SurfaceDescriptor, lambda: f64) -> Result<WeylValue> {
    Ok(WeylValue {
        lambda,
        count_exact: weyl_exact(surface, lambda)?,
        count_lower_bound: weyl_lower_bound(surface, lambda)?,
    })
}

fn require_klein(surface: &SurfaceDescriptor, operation: &'static str) -> Result<()> {
    if surface.is_klein() {
        Ok(())
    } else {
        Err(Error::Unsupported {
            operation,
            surface: surface.name(),
        })
    }
}

/// `#{j >= 1 : coef * j^2 < lambda}`.
fn strict_square_count(lambda: f64, coef: f64) -> u64 {
    if lambda <= 0.0 {
        return 0;
    }
    let below = |j: u64| coef * (j as f64).powi(2) < lambda;
    let mut j = ((lambda / coef).sqrt().ceil() as u64).saturating_sub(1);
    while below(j + 1) {
        j += 1;
    }
    while j > 0 && !below(j) {
        j -= 1;
    }
    j
}
