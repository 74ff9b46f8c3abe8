//! Pleijel's reduction to a finite list of Courant-sharp candidates.
//!
//! A Courant-sharp eigenvalue `l_k` with `k` at least the label threshold has a
//! nodal domain of area at most `|M|/k` small enough for Faber-Krahn, so
//! `l_k / k >= (1-eps)^2 pi j01^2 / |M|`. Combined with a Weyl lower bound
//! this confines `l_k` below the largest root of
//!
//! ```text
//! F(l) = |M|/(4 pi) (1 - 4/((1-eps)^2 j01^2)) l - A sqrt(l) - B + 1
//! ```

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{weyl_bound_constants, Spectrum, SpectrumEntry};
use crate::surfaces::{Preset, SurfaceDescriptor};

/// Slack on the ratio comparison so float noise cannot exclude an eigenvalue
/// sitting exactly on the threshold.
pub const RATIO_SLACK: f64 = 1e-12;

/// `J_0(x)` from its power series `sum (-1)^k (x^2/4)^k / (k!)^2`.
///
/// Cancellation limits the absolute error to about `1e-16 * max_k (x^2/4)^k / (k!)^2`,
/// which is tiny on `[0, 5]`.
pub fn bessel_j0(x: f64) -> f64 {
    let q = x * x / 4.0;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..200 {
        let kf = k as f64;
        term *= -q / (kf * kf);
        sum += term;
        if term.abs() < 1e-18 {
            break;
        }
    }
    sum
}

/// First positive zero of `J_0`, by bisection on `[2, 3]`.
pub fn bessel_j0_first_zero() -> f64 {
    let (mut lo, mut hi) = (2.0_f64, 3.0_f64);
    // J0(2) > 0 > J0(3)
    while hi - lo > 4.0 * f64::EPSILON * hi {
        let mid = 0.5 * (lo + hi);
        if bessel_j0(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PleijelConstants {
    pub j01: f64,
    /// `(2 / j01)^2`, the asymptotic bound on `nodal count / label`.
    pub gamma2: f64,
    pub epsilon: f64,
}

impl PleijelConstants {
    pub fn new(epsilon: f64) -> Result<Self> {
        let j01 = bessel_j0_first_zero();
        if !(0.0..1.0 - 2.0 / j01).contains(&epsilon) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in [0, {}), got {epsilon}",
                1.0 - 2.0 / j01
            )));
        }
        Ok(PleijelConstants {
            j01,
            gamma2: (2.0 / j01).powi(2),
            epsilon,
        })
    }

    /// Constants with `eps = 0`, valid for the flat Klein bottles and cylinders.
    pub fn flat() -> Self {
        Self::new(0.0).expect("zero epsilon is always admissible")
    }

    fn shrink(&self) -> f64 {
        (1.0 - self.epsilon).powi(2)
    }
}

/// `F(l) = linear * l - sqrt_coeff * sqrt(l) - constant`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundPolynomial {
    pub linear: f64,
    pub sqrt_coeff: f64,
    pub constant: f64,
}

impl BoundPolynomial {
    pub fn eval(&self, lambda: f64) -> f64 {
        self.linear * lambda - self.sqrt_coeff * lambda.sqrt() - self.constant
    }

    /// Square of the largest positive root in `t = sqrt(l)` of
    /// `linear t^2 - sqrt_coeff t - constant`.
    pub fn largest_root(&self) -> Result<f64> {
        let (a, b, c) = (self.linear, self.sqrt_coeff, self.constant);
        if a <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "leading coefficient {a} is not positive"
            )));
        }
        let disc = b * b + 4.0 * a * c;
        if disc < 0.0 {
            return Err(Error::InvalidParameter(
                "bound polynomial has no real root".into(),
            ));
        }
        let t = (b + disc.sqrt()) / (2.0 * a);
        if t <= 0.0 {
            return Err(Error::InvalidParameter(
                "bound polynomial has no positive root".into(),
            ));
        }
        Ok(t * t)
    }
}

pub fn ratio_threshold(surface: &SurfaceDescriptor) -> f64 {
    ratio_threshold_with(surface, &PleijelConstants::flat())
}

pub fn ratio_threshold_with(surface: &SurfaceDescriptor, constants: &PleijelConstants) -> f64 {
    constants.shrink() * PI * constants.j01.powi(2) / surface.area
}

/// `F_{M,eps}` for area `area` and Weyl constants `A`, `B`.
pub fn general_bound_polynomial(
    area: f64,
    weyl_sqrt_coeff: f64,
    weyl_constant: f64,
    constants: &PleijelConstants,
) -> BoundPolynomial {
    BoundPolynomial {
        linear: area / (4.0 * PI) * (1.0 - 4.0 / (constants.shrink() * constants.j01.powi(2))),
        sqrt_coeff: weyl_sqrt_coeff,
        constant: weyl_constant - 1.0,
    }
}

pub fn bound_polynomial(surface: &SurfaceDescriptor) -> Result<BoundPolynomial> {
    let weyl = weyl_bound_constants(surface)?;
    Ok(general_bound_polynomial(
        surface.area,
        weyl.sqrt_coeff,
        weyl.constant,
        &PleijelConstants::flat(),
    ))
}

pub fn lambda_bound(surface: &SurfaceDescriptor) -> Result<f64> {
    bound_polynomial(surface)?.largest_root()
}

/// Candidate window as printed with the reference tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StatedWindow {
    pub value: f64,
    /// Whether the endpoint itself is allowed.
    pub inclusive: bool,
}

impl StatedWindow {
    pub fn contains(&self, lambda: f64) -> bool {
        if self.inclusive {
            lambda <= self.value
        } else {
            lambda < self.value
        }
    }
}

pub fn stated_window(preset: Preset) -> StatedWindow {
    match preset {
        Preset::K1 => StatedWindow {
            value: 25.0,
            inclusive: false,
        },
        Preset::K2 => StatedWindow {
            value: 47.0,
            inclusive: true,
        },
        Preset::CHalf => StatedWindow {
            value: 76.25,
            inclusive: true,
        },
        Preset::C1 => StatedWindow {
            value: 42.40,
            inclusive: true,
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateStatus {
    /// Label below the Faber-Krahn threshold; the ratio test does not apply.
    LowIndex,
    /// Passed both the ratio and the window test.
    PassedTests,
    RatioExcluded,
    BoundExcluded,
}

impl CandidateStatus {
    pub fn survives(self) -> bool {
        matches!(
            self,
            CandidateStatus::LowIndex | CandidateStatus::PassedTests
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub entry: SpectrumEntry,
    pub ratio: f64,
    pub status: CandidateStatus,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PleijelReport {
    pub surface: SurfaceDescriptor,
    pub constants: PleijelConstants,
    pub ratio_threshold: f64,
    pub polynomial: BoundPolynomial,
    pub lambda_bound: f64,
    pub k_threshold: f64,
    pub candidates: Vec<Candidate>,
}

impl PleijelReport {
    pub fn survivors(&self) -> impl Iterator<Item = &SpectrumEntry> {
        self.candidates
            .iter()
            .filter(|c| c.status.survives())
            .map(|c| &c.entry)
    }

    /// First labels `k_min` of the surviving eigenvalues.
    pub fn survivor_labels(&self) -> Vec<usize> {
        self.survivors().map(|e| e.k_min).collect()
    }
}

/// Classifies every eigenvalue of `spectrum`.
///
/// Each entry is a distinct eigenvalue, so `k_min` is always a label with
/// `l_{k-1} < l_k`; only that label can be Courant-sharp.
pub fn candidate_filter(surface: &SurfaceDescriptor, spectrum: &Spectrum) -> Result<PleijelReport> {
    let polynomial = bound_polynomial(surface)?;
    let bound = polynomial.largest_root()?;
    if spectrum.lambda_max <= bound {
        return Err(Error::SpectrumTooShort {
            covered: spectrum.lambda_max,
            required: bound,
        });
    }
    let threshold = ratio_threshold(surface);
    let k_threshold = surface.label_threshold();

    let candidates = spectrum
        .entries
        .iter()
        .map(|entry| {
            let ratio = entry.ratio();
            let status = if (entry.k_min as f64) < k_threshold {
                CandidateStatus::LowIndex
            } else if entry.value > bound {
                CandidateStatus::BoundExcluded
            } else if ratio < threshold - RATIO_SLACK {
                CandidateStatus::RatioExcluded
            } else {
                CandidateStatus::PassedTests
            };
            Candidate {
                entry: entry.clone(),
                ratio,
                status,
            }
        })
        .collect();

    Ok(PleijelReport {
        surface: *surface,
        constants: PleijelConstants::flat(),
        ratio_threshold: threshold,
        polynomial,
        lambda_bound: bound,
        k_threshold,
        candidates,
    })
}

/// Enumerates just past the window and filters.
pub fn candidates_for(surface: &SurfaceDescriptor) -> Result<PleijelReport> {
    let bound = lambda_bound(surface)?;
    let spectrum = crate::spectrum::enumerate_spectrum(surface, bound.floor() + 2.0)?;
    candidate_filter(surface, &spectrum)
}
