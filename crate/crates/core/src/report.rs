//! Eigenvalue tables and regression against the reference tables.
//!
//! Reference tables omit the constant eigenfunction of the Klein bottles and
//! leave the ratio blank for labels below the Faber-Krahn label threshold.
//! The Klein bottle `K1` table truncates its ratios to 4 decimals, `K2` rounds
//! to 4, and the cylinder tables round to 5.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectrum::{enumerate_spectrum, Spectrum};
use crate::surfaces::{Preset, SurfaceDescriptor};

/// Largest accepted gap between a printed ratio and ours at printed precision.
pub const RATIO_TOLERANCE: f64 = 5e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
    Md,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "md" | "markdown" => Ok(Format::Md),
            other => Err(Error::InvalidParameter(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Rounding {
    Truncate,
    Nearest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RatioStyle {
    pub decimals: usize,
    pub rounding: Rounding,
}

impl RatioStyle {
    pub fn for_surface(surface: &SurfaceDescriptor) -> Self {
        match surface.preset {
            Some(Preset::K1) => RatioStyle {
                decimals: 4,
                rounding: Rounding::Truncate,
            },
            Some(Preset::K2) => RatioStyle {
                decimals: 4,
                rounding: Rounding::Nearest,
            },
            _ if surface.is_klein() => RatioStyle {
                decimals: 4,
                rounding: Rounding::Nearest,
            },
            _ => RatioStyle {
                decimals: 5,
                rounding: Rounding::Nearest,
            },
        }
    }

    pub fn apply(&self, ratio: f64) -> f64 {
        let scale = 10f64.powi(self.decimals as i32);
        let scaled = ratio * scale;
        let digits = match self.rounding {
            // guard against 0.625 * 1e4 landing at 6249.999...
            Rounding::Truncate => (scaled + 1e-9).floor(),
            Rounding::Nearest => scaled.round(),
        };
        digits / scale
    }

    pub fn format(&self, ratio: f64) -> String {
        format!("{:.*}", self.decimals, self.apply(ratio))
    }
}

/// One line of an eigenvalue table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub eigenvalue: f64,
    pub k_min: usize,
    pub k_max: usize,
    /// `eigenvalue / k_min` at printed precision, absent below the label threshold.
    pub ratio: Option<f64>,
    pub ratio_text: Option<String>,
}

/// Rows for the positive eigenvalues below `lambda_max`.
pub fn table_rows(surface: &SurfaceDescriptor, lambda_max: f64) -> Result<Vec<TableRow>> {
    let spectrum = enumerate_spectrum(surface, lambda_max)?;
    Ok(rows_from_spectrum(&spectrum))
}

pub fn rows_from_spectrum(spectrum: &Spectrum) -> Vec<TableRow> {
    let style = RatioStyle::for_surface(&spectrum.surface);
    let k_threshold = spectrum.surface.label_threshold();
    spectrum
        .entries
        .iter()
        .filter(|e| e.value > 0.0)
        .map(|e| {
            let shown = (e.k_min as f64) >= k_threshold;
            TableRow {
                eigenvalue: e.value,
                k_min: e.k_min,
                k_max: e.k_max,
                ratio: shown.then(|| style.apply(e.ratio())),
                ratio_text: shown.then(|| style.format(e.ratio())),
            }
        })
        .collect()
}

pub fn emit_table(surface: &SurfaceDescriptor, lambda_max: f64, format: Format) -> Result<String> {
    let rows = table_rows(surface, lambda_max)?;
    Ok(render_rows(surface, &rows, format))
}

pub fn render_rows(surface: &SurfaceDescriptor, rows: &[TableRow], format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("eigenvalue,k_min,k_max,ratio\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{}",
                    r.eigenvalue,
                    r.k_min,
                    r.k_max,
                    r.ratio_text.as_deref().unwrap_or("")
                );
            }
        }
        Format::Json => {
            out = serde_json::to_string_pretty(rows).expect("table rows serialize");
            out.push('\n');
        }
        Format::Md => {
            let label = |k: usize| {
                if surface.is_klein() {
                    format!("λ{}", subscript(k))
                } else {
                    k.to_string()
                }
            };
            let _ = writeln!(out, "| {} | k_min | k_max | λ/k_min |", surface.name());
            out.push_str("|---|---|---|---|\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} |",
                    r.eigenvalue,
                    label(r.k_min),
                    label(r.k_max),
                    r.ratio_text.as_deref().unwrap_or("—")
                );
            }
        }
    }
    out
}

/// Full spectrum listing: value, multiplicity, label range and raw ratio.
pub fn emit_spectrum(spectrum: &Spectrum, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str("value,multiplicity,k_min,k_max,ratio\n");
            for e in &spectrum.entries {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{:.6}",
                    e.value,
                    e.multiplicity,
                    e.k_min,
                    e.k_max,
                    e.ratio()
                );
            }
        }
        Format::Json => {
            out = serde_json::to_string_pretty(spectrum).expect("spectrum serializes");
            out.push('\n');
        }
        Format::Md => {
            out.push_str("| value | multiplicity | k_min | k_max | value/k_min |\n");
            out.push_str("|---|---|---|---|---|\n");
            for e in &spectrum.entries {
                let _ = writeln!(
                    out,
                    "| {} | {} | {} | {} | {:.6} |",
                    e.value,
                    e.multiplicity,
                    e.k_min,
                    e.k_max,
                    e.ratio()
                );
            }
        }
    }
    out
}

fn subscript(k: usize) -> String {
    const DIGITS: [char; 10] = ['₀', '₁', '₂', '₃', '₄', '₅', '₆', '₇', '₈', '₉'];
    k.to_string()
        .chars()
        .map(|c| DIGITS[c.to_digit(10).expect("decimal digit") as usize])
        .collect()
}

/// A reference table row; `ratio` is the printed text with a period separator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixtureRow {
    pub value: u64,
    pub k_min: usize,
    pub k_max: usize,
    pub ratio: Option<&'static str>,
}

const fn row(value: u64, k_min: usize, k_max: usize, ratio: Option<&'static str>) -> FixtureRow {
    FixtureRow {
        value,
        k_min,
        k_max,
        ratio,
    }
}

const K1_TABLE: &[FixtureRow] = &[
    row(1, 2, 2, None),
    row(2, 3, 4, None),
    row(4, 5, 7, None),
    row(5, 8, 11, Some("0.625")),
    row(8, 12, 13, Some("0.6666")),
    row(9, 14, 14, Some("0.6428")),
    row(10, 15, 18, Some("0.6666")),
    row(13, 19, 22, Some("0.6842")),
    row(16, 23, 25, Some("0.6956")),
    row(17, 26, 29, Some("0.6538")),
    row(18, 30, 31, Some("0.6")),
    row(20, 32, 35, Some("0.625")),
    row(25, 36, 40, Some("0.6944")),
];

const K2_TABLE: &[FixtureRow] = &[
    row(4, 2, 4, None),
    row(5, 5, 6, Some("1")),
    row(8, 7, 8, Some("1.1429")),
    row(13, 9, 10, Some("1.4444")),
    row(16, 11, 13, Some("1.4545")),
    row(17, 14, 15, Some("1.2143")),
    row(20, 16, 19, Some("1.2500")),
    row(25, 20, 21, Some("1.2500")),
    row(29, 22, 23, Some("1.3182")),
    row(32, 24, 25, Some("1.3333")),
    row(36, 26, 28, Some("1.3846")),
    row(37, 29, 30, Some("1.2759")),
    row(40, 31, 34, Some("1.2903")),
    row(41, 35, 36, Some("1.1714")),
    row(45, 37, 38, Some("1.2162")),
    row(52, 39, 42, Some("1.3333")),
];

const C_HALF_TABLE: &[FixtureRow] = &[
    row(1, 1, 1, None),
    row(4, 2, 2, None),
    row(5, 3, 4, None),
    row(8, 5, 6, Some("1.60000")),
    row(9, 7, 7, Some("1.28571")),
    row(13, 8, 9, Some("1.62500")),
    row(16, 10, 10, Some("1.60000")),
    row(17, 11, 12, Some("1.54545")),
    row(20, 13, 16, Some("1.53846")),
    row(25, 17, 19, Some("1.47059")),
    row(29, 20, 21, Some("1.45000")),
    row(32, 22, 23, Some("1.45455")),
    row(36, 24, 24, Some("1.50000")),
    row(37, 25, 26, Some("1.48000")),
    row(40, 27, 30, Some("1.48148")),
    row(41, 31, 32, Some("1.32258")),
    row(45, 33, 34, Some("1.36364")),
    row(49, 35, 35, Some("1.40000")),
    row(52, 36, 39, Some("1.44444")),
    row(53, 40, 41, Some("1.32500")),
    row(61, 42, 43, Some("1.45238")),
    row(64, 44, 44, Some("1.45455")),
    row(65, 45, 48, Some("1.44444")),
    row(68, 49, 52, Some("1.38776")),
    row(72, 53, 54, Some("1.35849")),
    row(73, 55, 56, Some("1.32727")),
    row(80, 57, 60, Some("1.40351")),
];

const C1_TABLE: &[FixtureRow] = &[
    row(1, 1, 1, None),
    row(2, 2, 3, Some("1.00000")),
    row(4, 4, 4, Some("1.00000")),
    row(5, 5, 8, Some("1.00000")),
    row(8, 9, 10, Some("0.88889")),
    row(9, 11, 11, Some("0.81818")),
    row(10, 12, 15, Some("0.83333")),
    row(13, 16, 19, Some("0.81250")),
    row(16, 20, 20, Some("0.80000")),
    row(17, 21, 24, Some("0.80952")),
    row(18, 25, 26, Some("0.72000")),
    row(20, 27, 30, Some("0.74074")),
    row(25, 31, 35, Some("0.80645")),
    row(26, 36, 39, Some("0.72222")),
    row(29, 40, 43, Some("0.72500")),
    row(32, 44, 45, Some("0.72727")),
    row(34, 46, 49, Some("0.73913")),
    row(36, 50, 50, Some("0.72000")),
    row(37, 51, 54, Some("0.72549")),
    row(40, 55, 58, Some("0.72727")),
    row(41, 59, 62, Some("0.69492")),
    row(45, 63, 66, Some("0.71429")),
    row(49, 67, 67, Some("0.73134")),
    row(50, 68, 73, Some("0.73529")),
];

pub fn fixture(preset: Preset) -> &'static [FixtureRow] {
    match preset {
        Preset::K1 => K1_TABLE,
        Preset::K2 => K2_TABLE,
        Preset::CHalf => C_HALF_TABLE,
        Preset::C1 => C1_TABLE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Discrepancy {
    pub value: f64,
    pub field: &'static str,
    pub expected: String,
    pub actual: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableCheck {
    pub preset: Preset,
    pub rows_checked: usize,
    /// Largest `|ratio - printed|` at printed precision.
    pub max_ratio_gap: f64,
    pub discrepancies: Vec<Discrepancy>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegressionReport {
    pub tables: Vec<TableCheck>,
}

impl RegressionReport {
    pub fn discrepancy_count(&self) -> usize {
        self.tables.iter().map(|t| t.discrepancies.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.discrepancy_count() == 0
    }
}

/// Compares generated rows against reference rows, matching by eigenvalue.
pub fn compare_rows(generated: &[TableRow], reference: &[FixtureRow]) -> (Vec<Discrepancy>, f64) {
    let mut out = Vec::new();
    let mut max_gap = 0.0_f64;
    let mut mismatch = |value: f64, field, expected: String, actual: String| {
        out.push(Discrepancy {
            value,
            field,
            expected,
            actual,
        });
    };

    for fx in reference {
        let value = fx.value as f64;
        let Some(row) = generated.iter().find(|r| r.eigenvalue == value) else {
            mismatch(value, "row", "present".into(), "missing".into());
            continue;
        };
        if row.k_min != fx.k_min {
            mismatch(value, "k_min", fx.k_min.to_string(), row.k_min.to_string());
        }
        if row.k_max != fx.k_max {
            mismatch(value, "k_max", fx.k_max.to_string(), row.k_max.to_string());
        }
        match (fx.ratio, row.ratio) {
            (None, None) => {}
            (Some(text), Some(ours)) => {
                let printed: f64 = text.parse().expect("fixture ratios are numeric");
                let gap = (printed - ours).abs();
                max_gap = max_gap.max(gap);
                if gap > RATIO_TOLERANCE {
                    mismatch(value, "ratio", text.to_string(), format!("{ours}"));
                }
            }
            (expected, actual) => mismatch(
                value,
                "ratio",
                expected.unwrap_or("—").to_string(),
                actual.map_or("—".to_string(), |v| v.to_string()),
            ),
        }
    }
    for row in generated {
        if !reference.iter().any(|fx| fx.value as f64 == row.eigenvalue) {
            mismatch(row.eigenvalue, "row", "absent".into(), "present".into());
        }
    }
    (out, max_gap)
}

pub fn check_table(preset: Preset, reference: &[FixtureRow]) -> Result<TableCheck> {
    let surface = SurfaceDescriptor::preset(preset);
    let generated = match reference.last() {
        Some(last) => table_rows(&surface, last.value as f64 + 0.5)?,
        None => Vec::new(),
    };
    let (discrepancies, max_ratio_gap) = compare_rows(&generated, reference);
    Ok(TableCheck {
        preset,
        rows_checked: reference.len(),
        max_ratio_gap,
        discrepancies,
    })
}

pub fn regression_check() -> Result<RegressionReport> {
    let tables = Preset::ALL
        .into_iter()
        .map(|p| check_table(p, fixture(p)))
        .collect::<Result<_>>()?;
    Ok(RegressionReport { tables })
}
