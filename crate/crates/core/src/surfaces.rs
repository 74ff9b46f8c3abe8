//! Flat surfaces and their geometric constants.
//!
//! A Klein bottle `K(a, b)` is the quotient of the plane by the group generated
//! by `(x, y) -> (x, y + b)` and the glide reflection `(x, y) -> (x + a/2, b - y)`.
//! Its fundamental domain is `(0, a/2) x (0, b)`. A cylinder `C_r` is
//! `(0, pi) x S^1_r` with Dirichlet conditions on both ends, parametrised here
//! by `(0, pi) x (0, 2 pi r)` with the vertical sides glued.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// The four surfaces for which reference data exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Preset {
    /// Klein bottle of the square torus, `a = b = 2 pi`.
    K1,
    /// Klein bottle with square fundamental domain, `a = 2 pi`, `b = pi`.
    K2,
    /// Dirichlet cylinder of radius 1/2.
    CHalf,
    /// Dirichlet cylinder of radius 1.
    C1,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::K1, Preset::K2, Preset::CHalf, Preset::C1];

    /// Name used on the command line.
    pub fn cli_name(self) -> &'static str {
        match self {
            Preset::K1 => "k1",
            Preset::K2 => "k2",
            Preset::CHalf => "c-half",
            Preset::C1 => "c1",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.cli_name())
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "k1" => Ok(Preset::K1),
            "k2" => Ok(Preset::K2),
            "c-half" | "c_half" | "chalf" => Ok(Preset::CHalf),
            "c1" => Ok(Preset::C1),
            other => Err(Error::InvalidParameter(format!(
                "unknown surface `{other}` (expected k1, k2, c-half or c1)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SurfaceKind {
    KleinBottle,
    CylinderDirichlet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Geometry {
    /// `a` is the horizontal period of the covering torus, `b` the vertical one.
    KleinBottle { a: f64, b: f64 },
    /// Length is fixed at pi.
    CylinderDirichlet { radius: f64 },
}

/// A flat surface together with the constants used by the Pleijel argument.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceDescriptor {
    pub geometry: Geometry,
    pub area: f64,
    /// Length of the shortest non-contractible closed geodesic.
    pub systole: f64,
    /// Largest area for which the Euclidean Faber-Krahn inequality holds.
    pub fk_area_threshold: f64,
    pub preset: Option<Preset>,
}

impl SurfaceDescriptor {
    pub fn preset(name: Preset) -> Self {
        let mut surface = match name {
            Preset::K1 => klein(2.0 * PI, 2.0 * PI),
            Preset::K2 => klein(2.0 * PI, PI),
            Preset::CHalf => cylinder(0.5),
            Preset::C1 => cylinder(1.0),
        };
        surface.preset = Some(name);
        surface
    }

    /// Klein bottle with arbitrary periods.
    ///
    /// The Faber-Krahn area threshold is extrapolated as `systole^2 / pi`, which
    /// reproduces the value `pi` known for systole `pi`. It is not a proven
    /// constant for other periods.
    pub fn custom_klein(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && a > 0.0 && b.is_finite() && b > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "Klein bottle periods must be positive and finite, got a={a}, b={b}"
            )));
        }
        let mut surface = klein(a, b);
        surface.preset = matching_preset(&surface);
        Ok(surface)
    }

    pub fn kind(&self) -> SurfaceKind {
        match self.geometry {
            Geometry::KleinBottle { .. } => SurfaceKind::KleinBottle,
            Geometry::CylinderDirichlet { .. } => SurfaceKind::CylinderDirichlet,
        }
    }

    pub fn is_klein(&self) -> bool {
        self.kind() == SurfaceKind::KleinBottle
    }

    /// Width and height of the fundamental rectangle.
    pub fn fundamental_domain(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::KleinBottle { a, b } => (a / 2.0, b),
            Geometry::CylinderDirichlet { radius } => (PI, 2.0 * PI * radius),
        }
    }

    /// Angular wavenumbers `(kx, ky)`: mode `(m, n)` oscillates like
    /// `(kx m x, ky n y)` and has eigenvalue `(kx m)^2 + (ky n)^2`.
    pub fn wavenumbers(&self) -> (f64, f64) {
        match self.geometry {
            Geometry::KleinBottle { a, b } => (2.0 * PI / a, 2.0 * PI / b),
            Geometry::CylinderDirichlet { radius } => (1.0, 1.0 / radius),
        }
    }

    /// Eigenvalue attached to the lattice point `(m, n)`.
    pub fn lattice_eigenvalue(&self, m: u32, n: u32) -> f64 {
        let (px, qy) = self.quadratic_form();
        px * f64::from(m).powi(2) + qy * f64::from(n).powi(2)
    }

    /// Coefficients `(p, q)` of the form `p m^2 + q n^2`.
    pub fn quadratic_form(&self) -> (f64, f64) {
        let (kx, ky) = self.wavenumbers();
        (kx * kx, ky * ky)
    }

    /// Label from which a Courant-sharp eigenfunction must own a nodal
    /// domain small enough for the Faber-Krahn inequality.
    pub fn label_threshold(&self) -> f64 {
        self.area / self.fk_area_threshold
    }

    pub fn name(&self) -> String {
        match (self.preset, self.geometry) {
            (Some(p), _) => p.cli_name().to_string(),
            (None, Geometry::KleinBottle { a, b }) => format!("klein(a={a}, b={b})"),
            (None, Geometry::CylinderDirichlet { radius }) => format!("cylinder(r={radius})"),
        }
    }
}

impl fmt::Display for SurfaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

fn klein(a: f64, b: f64) -> SurfaceDescriptor {
    let systole = (a / 2.0).min(b);
    SurfaceDescriptor {
        geometry: Geometry::KleinBottle { a, b },
        area: a * b / 2.0,
        systole,
        fk_area_threshold: systole * systole / PI,
        preset: None,
    }
}

fn cylinder(radius: f64) -> SurfaceDescriptor {
    SurfaceDescriptor {
        geometry: Geometry::CylinderDirichlet { radius },
        area: 2.0 * PI * PI * radius,
        systole: 2.0 * PI * radius,
        fk_area_threshold: 4.0 * PI * radius * radius,
        preset: None,
    }
}

fn matching_preset(surface: &SurfaceDescriptor) -> Option<Preset> {
    [Preset::K1, Preset::K2]
        .into_iter()
        .find(|p| SurfaceDescriptor::preset(*p).geometry == surface.geometry)
}
