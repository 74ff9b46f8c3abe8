use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use courant_core::eigenfunctions::{lambda3_family, lambda5_family};
use courant_core::nodal::{
    default_samples_per_dim, default_zero_tol, eigenspace_sweep_with, grid_shape, sample,
    stable_count, DEFAULT_BASE_N,
};
use courant_core::pleijel::{candidates_for, CandidateStatus};
use courant_core::report::{emit_spectrum, emit_table, fixture, regression_check};
use courant_core::spectrum::{enumerate_spectrum, weyl_value};
use courant_core::verdict::{decide_with, DecideOptions};
use courant_core::{Eigenfunction, Error, Preset, SurfaceDescriptor};

#[derive(Debug, Parser)]
#[command(
    name = "courant",
    version,
    about = "Courant-sharp eigenvalues of flat Klein bottles and Dirichlet cylinders"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
    Md,
}

impl From<OutputFormat> for courant_core::report::Format {
    fn from(f: OutputFormat) -> Self {
        use courant_core::report::Format;
        match f {
            OutputFormat::Csv => Format::Csv,
            OutputFormat::Json => Format::Json,
            OutputFormat::Md => Format::Md,
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Eigenvalues below a cutoff with multiplicities and label ranges.
    Spectrum {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceDescriptor,
        #[arg(long)]
        lambda_max: f64,
        #[arg(long, value_enum, default_value = "csv")]
        format: OutputFormat,
    },
    /// Eigenvalue table in the layout of the reference tables.
    Table {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceDescriptor,
        /// Defaults to the range of the reference table for presets.
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long, value_enum, default_value = "md")]
        format: OutputFormat,
    },
    /// Exact Weyl count and its lower bound at one value.
    Weyl {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceDescriptor,
        #[arg(long)]
        lambda: f64,
    },
    /// Pleijel candidate filter with a SURVIVOR column.
    Candidates {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceDescriptor,
        #[arg(long, value_enum, default_value = "md")]
        format: OutputFormat,
    },
    /// Nodal-domain count of one eigenfunction.
    Nodal {
        #[arg(long, value_parser = parse_surface, default_value = "k1")]
        surface: SurfaceDescriptor,
        /// `lambda3:<alpha>` or `lambda5:<theta>` (Klein bottle K1 only).
        #[arg(long, conflicts_with = "terms", required_unless_present = "terms")]
        family: Option<String>,
        /// Comma-separated `kind:m:n:coeff` terms, kind in {cc, sc, cs, ss}.
        #[arg(long)]
        terms: Option<String>,
        /// Grid cells per length pi.
        #[arg(long, default_value_t = DEFAULT_BASE_N)]
        n: usize,
        /// Writes the sign pattern at resolution `n` as a binary PPM.
        #[arg(long)]
        emit_ppm: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Samples the unit sphere of an eigenspace and reports nodal counts.
    Sweep {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceDescriptor,
        #[arg(long)]
        eigenvalue: f64,
        /// Angular samples per coordinate; chosen from the dimension if absent.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_BASE_N)]
        n: usize,
        #[arg(long)]
        json: bool,
    },
    /// Full Courant-sharp determination with its evidence trail.
    Decide {
        #[arg(long, value_parser = parse_surface)]
        surface: SurfaceDescriptor,
        #[arg(long, value_enum, default_value = "md")]
        format: OutputFormat,
        #[arg(long, default_value_t = DEFAULT_BASE_N)]
        n: usize,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Compares generated tables with the reference tables; exit status 1 on any discrepancy.
    Regress {
        #[arg(long, value_enum, default_value = "md")]
        format: OutputFormat,
    },
}

/// Accepts a preset name or `klein:<a>:<b>` for a Klein bottle with periods `a`, `b`.
fn parse_surface(s: &str) -> std::result::Result<SurfaceDescriptor, String> {
    if let Some(rest) = s.strip_prefix("klein:") {
        let (a, b) = rest
            .split_once(':')
            .ok_or_else(|| format!("expected klein:<a>:<b>, got `{s}`"))?;
        let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"));
        return SurfaceDescriptor::custom_klein(parse(a)?, parse(b)?).map_err(|e| e.to_string());
    }
    s.parse::<Preset>()
        .map(SurfaceDescriptor::preset)
        .map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode> {
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match command {
        Command::Spectrum {
            surface,
            lambda_max,
            format,
        } => {
            let spectrum = enumerate_spectrum(&surface, lambda_max)?;
            out.write_all(emit_spectrum(&spectrum, format.into()).as_bytes())?;
        }
        Command::Table {
            surface,
            lambda_max,
            format,
        } => {
            let lambda_max = match (lambda_max, surface.preset) {
                (Some(l), _) => l,
                (None, Some(p)) => fixture(p).last().map_or(0.0, |r| r.value as f64) + 0.5,
                (None, None) => bail!("--lambda-max is required for non-preset surfaces"),
            };
            out.write_all(emit_table(&surface, lambda_max, format.into())?.as_bytes())?;
        }
        Command::Weyl { surface, lambda } => {
            let w = weyl_value(&surface, lambda)?;
            writeln!(out, "{}", serde_json::to_string_pretty(&w)?)?;
        }
        Command::Candidates { surface, format } => {
            let report = candidates_for(&surface)?;
            out.write_all(render_candidates(&report, format).as_bytes())?;
        }
        Command::Nodal {
            surface,
            family,
            terms,
            n,
            emit_ppm,
            json,
        } => {
            let f = match (family, terms) {
                (Some(family), _) => family_function(&surface, &family)?,
                (None, Some(terms)) => Eigenfunction::parse_terms(&surface, &terms)?,
                (None, None) => unreachable!("clap requires one of --family and --terms"),
            };
            if let Some(path) = emit_ppm {
                let (nx, ny) = grid_shape(&f.surface, n);
                let grid = sample(&f, nx, ny, default_zero_tol(&f))?;
                let file =
                    File::create(&path).with_context(|| format!("creating {}", path.display()))?;
                let mut w = BufWriter::new(file);
                grid.write_ppm(&mut w)?;
                w.flush()?;
            }
            match stable_count(&f, n) {
                Ok(result) if json => writeln!(out, "{}", serde_json::to_string_pretty(&result)?)?,
                Ok(result) => writeln!(
                    out,
                    "eigenvalue {}: {} nodal domains ({} positive, {} negative) on {}x{} cells, zero fraction {:.2e}",
                    f.eigenvalue, result.count, result.positive, result.negative, result.nx, result.ny, result.zero_fraction
                )?,
                Err(Error::UnstableCount { counts, widths }) => {
                    writeln!(out, "unstable count: {counts:?} at {widths:?} cells per pi")?;
                    return Ok(ExitCode::from(1));
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Sweep {
            surface,
            eigenvalue,
            samples,
            n,
            json,
        } => {
            let spectrum = enumerate_spectrum(&surface, eigenvalue.max(0.0) + 1.0)?;
            let entry = spectrum.find(eigenvalue).ok_or(Error::NotAnEigenvalue {
                value: eigenvalue,
                surface: surface.name(),
            })?;
            let samples = samples.unwrap_or_else(|| default_samples_per_dim(entry.multiplicity));
            let sweep = eigenspace_sweep_with(&surface, eigenvalue, samples, n)?;
            if json {
                writeln!(out, "{}", serde_json::to_string_pretty(&sweep)?)?;
            } else {
                writeln!(
                    out,
                    "eigenvalue {} (labels {}..={}, dimension {}): {} samples",
                    sweep.eigenvalue,
                    entry.k_min,
                    entry.k_max,
                    sweep.dimension(),
                    sweep.samples
                )?;
                match sweep.max_count {
                    Some(m) => writeln!(
                        out,
                        "max nodal count {m} at coefficients {:?}",
                        sweep.argmax
                    )?,
                    None => writeln!(out, "no stable sample")?,
                }
                for (count, hits) in &sweep.histogram {
                    writeln!(out, "  {count} domains: {hits} samples")?;
                }
                if !sweep.unstable.is_empty() {
                    writeln!(out, "  unstable: {} samples", sweep.unstable.len())?;
                }
            }
        }
        Command::Decide {
            surface,
            format,
            n,
            samples,
        } => {
            let options = DecideOptions {
                base_n: n,
                samples_per_dim: samples,
            };
            let verdict = decide_with(&surface, options)?;
            match format {
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&verdict)?)?,
                _ => out.write_all(render_verdict(&verdict, format).as_bytes())?,
            }
            if !verdict.is_conclusive() {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Regress { format } => {
            let report = regression_check()?;
            match format {
                OutputFormat::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
                _ => {
                    for table in &report.tables {
                        writeln!(
                            out,
                            "{}: {} rows, {} discrepancies, max ratio gap {:.1e}",
                            table.preset.cli_name(),
                            table.rows_checked,
                            table.discrepancies.len(),
                            table.max_ratio_gap
                        )?;
                        for d in &table.discrepancies {
                            writeln!(
                                out,
                                "  {} {}: expected {}, got {}",
                                d.value, d.field, d.expected, d.actual
                            )?;
                        }
                    }
                }
            }
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn family_function(surface: &SurfaceDescriptor, family: &str) -> Result<Eigenfunction> {
    if surface.preset != Some(Preset::K1) {
        bail!("--family is defined on k1 only, got {}", surface.name());
    }
    let (name, param) = family
        .split_once(':')
        .with_context(|| format!("expected <family>:<angle>, got `{family}`"))?;
    let angle: f64 = param
        .trim()
        .parse()
        .with_context(|| format!("invalid angle `{param}`"))?;
    match name {
        "lambda3" => Ok(lambda3_family(angle)),
        "lambda5" => Ok(lambda5_family(angle)),
        other => bail!("unknown family `{other}` (expected lambda3 or lambda5)"),
    }
}

fn status_name(status: CandidateStatus) -> &'static str {
    match status {
        CandidateStatus::LowIndex => "low-index",
        CandidateStatus::PassedTests => "passed",
        CandidateStatus::RatioExcluded => "ratio-excluded",
        CandidateStatus::BoundExcluded => "bound-excluded",
    }
}

fn render_candidates(report: &courant_core::PleijelReport, format: OutputFormat) -> String {
    let mut s = String::new();
    match format {
        OutputFormat::Json => {
            s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
        }
        OutputFormat::Csv => {
            s.push_str("value,k_min,k_max,ratio,status,SURVIVOR\n");
            for c in &report.candidates {
                let _ = writeln!(
                    s,
                    "{},{},{},{:.6},{},{}",
                    c.entry.value,
                    c.entry.k_min,
                    c.entry.k_max,
                    c.ratio,
                    status_name(c.status),
                    if c.status.survives() { "yes" } else { "no" }
                );
            }
        }
        OutputFormat::Md => {
            let _ = writeln!(
                s,
                "{}: ratio threshold {:.6}, label threshold {:.4}, lambda bound {:.4}\n",
                report.surface.name(),
                report.ratio_threshold,
                report.k_threshold,
                report.lambda_bound
            );
            s.push_str("| value | k_min | k_max | ratio | status | SURVIVOR |\n");
            s.push_str("|---|---|---|---|---|---|\n");
            for c in &report.candidates {
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {:.6} | {} | {} |",
                    c.entry.value,
                    c.entry.k_min,
                    c.entry.k_max,
                    c.ratio,
                    status_name(c.status),
                    if c.status.survives() { "yes" } else { "no" }
                );
            }
        }
    }
    s
}

fn render_verdict(verdict: &courant_core::CourantSharpVerdict, format: OutputFormat) -> String {
    let opt = |v: Option<usize>| v.map_or_else(|| "-".to_string(), |c| c.to_string());
    let mut s = String::new();
    let sep = if matches!(format, OutputFormat::Csv) {
        ","
    } else {
        " | "
    };
    if matches!(format, OutputFormat::Md) {
        let _ = writeln!(
            s,
            "{}: Courant-sharp labels {:?} (lambda bound {:.4})\n",
            verdict.surface.name(),
            verdict.courant_sharp_labels,
            verdict.lambda_bound
        );
    }
    let header = [
        "value",
        "k_min",
        "k_max",
        "multiplicity",
        "max_count",
        "ceiling",
        "samples",
        "unstable",
        "decision",
        "reason",
    ];
    let wrap = |cells: Vec<String>| match format {
        OutputFormat::Md => format!("| {} |\n", cells.join(sep)),
        _ => format!("{}\n", cells.join(sep)),
    };
    s.push_str(&wrap(header.iter().map(|h| h.to_string()).collect()));
    if matches!(format, OutputFormat::Md) {
        s.push_str(&format!("|{}\n", "---|".repeat(header.len())));
    }
    for e in &verdict.evidence {
        s.push_str(&wrap(vec![
            e.eigenvalue.to_string(),
            e.k_min.to_string(),
            e.k_max.to_string(),
            e.multiplicity.to_string(),
            opt(e.max_nodal_count),
            opt(e.analytic_ceiling),
            e.sweep_samples.to_string(),
            e.unstable_samples.to_string(),
            variant_name(&e.decision),
            variant_name(&e.reason),
        ]));
    }
    s
}

/// Kebab-case name of a unit enum variant, taken from its serde form.
fn variant_name<T: serde::Serialize>(value: &T) -> String {
    match serde_json::to_value(value) {
        Ok(serde_json::Value::String(s)) => s,
        other => format!("{other:?}"),
    }
}
