//! Acceptance suite. Prints one PASS/FAIL line per criterion with the
//! measured values. Failing criteria are reported but only turn into a
//! non-zero exit status when `ACCEPTANCE_STRICT` is set.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use courant_core::eigenfunctions::{eigenspace_basis, lambda3_family, lambda5_family};
use courant_core::nodal::{eigenspace_sweep, stable_count, DEFAULT_BASE_N};
use courant_core::pleijel::{
    bessel_j0, bessel_j0_first_zero, candidates_for, lambda_bound, ratio_threshold, stated_window,
};
use courant_core::report::{fixture, regression_check};
use courant_core::spectrum::{
    enumerate_spectrum, lattice_count, weyl_closed_form, weyl_exact, weyl_lower_bound,
};
use courant_core::verdict::decide;
use courant_core::{BasisMode, Eigenfunction, ModeKind, Preset, SurfaceDescriptor};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Check {
    name: &'static str,
    ok: bool,
    detail: String,
}

impl Check {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        Check {
            name,
            ok,
            detail: detail.into(),
        }
    }
}

/// Runs the sub-checks of one criterion and prints a summary line for it.
fn criterion(id: &str, title: &str, checks: Vec<Check>, elapsed: Duration) -> bool {
    let ok = checks.iter().all(|c| c.ok);
    println!(
        "[{}] criterion {id}: {title} ({:.2} s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    for c in &checks {
        println!(
            "    {} {}: {}",
            if c.ok { "ok  " } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    ok
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn table_regression() -> bool {
    let (report, elapsed) = timed(|| regression_check().expect("tables enumerate"));
    let mut checks = Vec::new();
    for table in &report.tables {
        let detail = format!(
            "{} rows, max printed-ratio gap {:.1e}, {} discrepancies {:?}",
            table.rows_checked,
            table.max_ratio_gap,
            table.discrepancies.len(),
            table.discrepancies
        );
        let expected_rows = match table.preset {
            Preset::K1 => 13,
            Preset::K2 => 16,
            Preset::CHalf => 27,
            Preset::C1 => 24,
        };
        let ok = table.discrepancies.is_empty() && table.rows_checked == expected_rows;
        checks.push(Check::new(table.preset.cli_name(), ok, detail));
    }
    // unrounded ratios, reported for information only
    for preset in Preset::ALL {
        let surface = SurfaceDescriptor::preset(preset);
        let rows = fixture(preset);
        let top = rows.last().map_or(0.0, |r| r.value as f64) + 0.5;
        let spectrum = enumerate_spectrum(&surface, top).unwrap();
        let raw_gap = rows
            .iter()
            .filter_map(|r| {
                let printed: f64 = r.ratio?.parse().ok()?;
                let entry = spectrum.find(r.value as f64)?;
                Some((entry.ratio() - printed).abs())
            })
            .fold(0.0_f64, f64::max);
        println!(
            "    info {}: max gap of unrounded ratio to print {raw_gap:.1e}",
            preset.cli_name()
        );
    }
    checks.push(Check::new(
        "runtime < 1 s",
        elapsed < Duration::from_secs(1),
        format!("{:.3} s", elapsed.as_secs_f64()),
    ));
    criterion("1", "table regression", checks, elapsed)
}

fn thresholds_and_bounds() -> bool {
    let start = Instant::now();
    let k1 = SurfaceDescriptor::preset(Preset::K1);
    let k2 = SurfaceDescriptor::preset(Preset::K2);
    let t1 = ratio_threshold(&k1);
    let t2 = ratio_threshold(&k2);
    let b_half = lambda_bound(&SurfaceDescriptor::preset(Preset::CHalf)).unwrap();
    let b_one = lambda_bound(&SurfaceDescriptor::preset(Preset::C1)).unwrap();
    let bk1 = lambda_bound(&k1).unwrap();
    let bk2 = lambda_bound(&k2).unwrap();

    // the examined window must cover every eigenvalue the tables list
    let window_covers = |surface: &SurfaceDescriptor, top: f64| {
        let report = candidates_for(surface).unwrap();
        let spectrum = enumerate_spectrum(surface, top + 1.0).unwrap();
        let listed = spectrum.entries.iter().filter(|e| e.value <= top).count();
        let examined = report
            .candidates
            .iter()
            .filter(|c| c.entry.value <= top)
            .count();
        (listed, examined)
    };
    let (listed1, examined1) = window_covers(&k1, 25.0);
    let (listed2, examined2) = window_covers(&k2, 47.0);
    let w1 = stated_window(Preset::K1);
    let w2 = stated_window(Preset::K2);

    let checks = vec![
        Check::new(
            "ratio_threshold(K1) = 0.920422 +- 1e-6",
            (t1 - 0.920422).abs() <= 1e-6,
            format!("{t1:.10}"),
        ),
        Check::new(
            "ratio_threshold(K2) = 1.840844 +- 1e-6",
            (t2 - 1.840844).abs() <= 1e-6,
            format!("{t2:.10}, off by {:.2e}", (t2 - 1.840844).abs()),
        ),
        Check::new(
            "lambda_bound(C_half) = 76.25 +- 0.01",
            (b_half - 76.25).abs() <= 0.01,
            format!("{b_half:.10}"),
        ),
        Check::new(
            "lambda_bound(C1) = 42.40 +- 0.01",
            (b_one - 42.40).abs() <= 0.01,
            format!("{b_one:.10}"),
        ),
        Check::new(
            "K1 window reaches 25",
            examined1 == listed1,
            format!("{examined1} of {listed1} eigenvalues <= 25 examined"),
        ),
        Check::new(
            "K2 window reaches 47",
            examined2 == listed2,
            format!("{examined2} of {listed2} eigenvalues <= 47 examined"),
        ),
        Check::new(
            "K1 bound consistent with lambda < 25",
            bk1 < 25.0 && w1.contains(bk1),
            format!("{bk1:.10}"),
        ),
        Check::new(
            "K2 bound consistent with lambda <= 47",
            bk2 <= 47.0 && w2.contains(bk2),
            format!("{bk2:.10}"),
        ),
    ];
    criterion("2", "thresholds and bounds", checks, start.elapsed())
}

fn candidate_filter() -> bool {
    let start = Instant::now();
    let expected: [(Preset, &[usize]); 4] = [
        (Preset::K1, &[1, 2, 3, 5]),
        (Preset::K2, &[1, 2]),
        (Preset::CHalf, &[1, 2, 3]),
        (Preset::C1, &[1, 2, 4, 5]),
    ];
    let checks = expected
        .into_iter()
        .map(|(preset, labels)| {
            let report = candidates_for(&SurfaceDescriptor::preset(preset)).unwrap();
            let got = report.survivor_labels();
            Check::new(
                preset.cli_name(),
                got == labels,
                format!("survivors {got:?}, expected {labels:?}"),
            )
        })
        .collect();
    criterion("3", "candidate filter", checks, start.elapsed())
}

fn count_of(f: &Eigenfunction) -> Result<usize, String> {
    stable_count(f, DEFAULT_BASE_N)
        .map(|r| r.count)
        .map_err(|e| e.to_string())
}

fn nodal_counts() -> bool {
    let start = Instant::now();
    let mut checks = Vec::new();

    let alphas: Vec<f64> = (0..16).map(|k| k as f64 * PI / 8.0).collect();
    let counts: Vec<_> = alphas
        .iter()
        .map(|&a| count_of(&lambda3_family(a)))
        .collect();
    checks.push(Check::new(
        "lambda3 family, 16 values of alpha: always 2",
        counts.iter().all(|c| *c == Ok(2)),
        format!("{counts:?}"),
    ));

    let thetas: Vec<f64> = (0..16)
        .filter(|&k| k != 8)
        .map(|k| k as f64 * PI / 32.0)
        .collect();
    let counts: Vec<_> = thetas
        .iter()
        .map(|&t| count_of(&lambda5_family(t)))
        .collect();
    checks.push(Check::new(
        "lambda5 family, 15 values of theta away from pi/4: always 4",
        counts.iter().all(|c| *c == Ok(4)),
        format!("theta = k pi/32 for k in 0..16 without 8: {counts:?}"),
    ));

    let c_half = SurfaceDescriptor::preset(Preset::CHalf);
    let sweep = eigenspace_sweep(&c_half, 5.0, 64).unwrap();
    let only_two = sweep.histogram.keys().all(|&c| c == 2) && sweep.unstable.is_empty();
    checks.push(Check::new(
        "C_half eigenvalue 5 sweep: always 2",
        only_two && sweep.max_count == Some(2),
        format!(
            "{} samples, histogram {:?}, {} unstable",
            sweep.samples,
            sweep.histogram,
            sweep.unstable.len()
        ),
    ));

    let c1 = SurfaceDescriptor::preset(Preset::C1);
    let sin2x = Eigenfunction::new(&c1, vec![(BasisMode::new(ModeKind::Sc, 2, 0), 1.0)]).unwrap();
    let c = count_of(&sin2x);
    checks.push(Check::new("C1 sin(2x): 2", c == Ok(2), format!("{c:?}")));

    let sweep = eigenspace_sweep(&c1, 5.0, 16).unwrap();
    checks.push(Check::new(
        "C1 eigenvalue 5 sweep (d = 4, 16 per angle): maximum 4",
        sweep.dimension() == 4 && sweep.max_count == Some(4),
        format!(
            "d = {}, {} samples, histogram {:?}, {} unstable",
            sweep.dimension(),
            sweep.samples,
            sweep.histogram,
            sweep.unstable.len()
        ),
    ));

    let elapsed = start.elapsed();
    checks.push(Check::new(
        "runtime < 120 s",
        elapsed < Duration::from_secs(120),
        format!("{:.1} s", elapsed.as_secs_f64()),
    ));
    criterion("4", "nodal counts", checks, elapsed)
}

fn final_verdicts() -> bool {
    let start = Instant::now();
    let checks = Preset::ALL
        .into_iter()
        .map(|preset| {
            let verdict = decide(&SurfaceDescriptor::preset(preset)).unwrap();
            let labels: Vec<usize> = verdict.courant_sharp_labels.iter().copied().collect();
            Check::new(
                preset.cli_name(),
                labels == [1, 2] && verdict.is_conclusive(),
                format!(
                    "Courant-sharp labels {labels:?}, conclusive {}",
                    verdict.is_conclusive()
                ),
            )
        })
        .collect();
    criterion("5", "final verdicts", checks, start.elapsed())
}

fn lambda_grid() -> Vec<f64> {
    (1..=10_000).map(|i| i as f64 * 0.1).collect()
}

fn property_suites() -> bool {
    let start = Instant::now();
    let klein = [
        SurfaceDescriptor::preset(Preset::K1),
        SurfaceDescriptor::preset(Preset::K2),
    ];
    let grid = lambda_grid();
    let mut checks = Vec::new();

    // (a) at every eigenvalue, just above it, and on the grid
    let mut failures = Vec::new();
    for s in &klein {
        let spectrum = enumerate_spectrum(s, 1001.0).unwrap();
        let mut points: Vec<f64> = spectrum
            .entries
            .iter()
            .filter(|e| e.value <= 1000.0)
            .flat_map(|e| [e.value, e.value + 1e-6])
            .collect();
        points.extend(&grid);
        for &l in &points {
            let closed = weyl_closed_form(s, l).unwrap() as usize;
            let counted = spectrum.count_below(l);
            if closed != counted {
                failures.push((s.name(), l, closed, counted));
            }
        }
    }
    checks.push(Check::new(
        "(a) closed-form Weyl count equals enumeration up to 1000",
        failures.is_empty(),
        format!(
            "{} mismatches {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    ));

    let mut failures = Vec::new();
    for preset in Preset::ALL {
        let s = SurfaceDescriptor::preset(preset);
        for &l in &grid {
            let exact = weyl_exact(&s, l).unwrap() as f64;
            let lower = weyl_lower_bound(&s, l).unwrap();
            if exact < lower {
                failures.push((preset.cli_name(), l, exact, lower));
            }
        }
    }
    checks.push(Check::new(
        "(b) weyl_exact >= weyl_lower_bound on 1e4 points",
        failures.is_empty(),
        format!(
            "{} violations {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    ));

    let mut failures = Vec::new();
    for (c, s) in [(1.0, &klein[0]), (2.0, &klein[1])] {
        for &l in &grid {
            let count = lattice_count(s, l).unwrap() as f64;
            if count < PI * l / (4.0 * c) {
                failures.push((c, l, count));
            }
        }
    }
    checks.push(Check::new(
        "(c) lattice_count(Kc, l) >= pi l / (4c)",
        failures.is_empty(),
        format!(
            "{} violations {:?}",
            failures.len(),
            failures.iter().take(3).collect::<Vec<_>>()
        ),
    ));

    let mut entries = 0;
    let mut failures = Vec::new();
    for s in &klein {
        for e in enumerate_spectrum(s, 1000.5).unwrap().entries {
            entries += 1;
            let axis = e.reps.iter().any(|r| r.m == 0);
            if axis != (e.multiplicity % 2 == 1) {
                failures.push((s.name(), e.value, e.multiplicity));
            }
        }
    }
    checks.push(Check::new(
        "(d) Klein multiplicity is odd exactly when m = 0 occurs",
        failures.is_empty() && entries > 0,
        format!(
            "{entries} entries, {} violations {failures:?}",
            failures.len()
        ),
    ));

    let (worst_order, detail) = laplacian_orders();
    checks.push(Check::new(
        "(e) finite-difference Laplacian converges at order h^2",
        worst_order > 1.9,
        detail,
    ));

    let j = bessel_j0_first_zero();
    let residual = bessel_j0(j).abs();
    checks.push(Check::new(
        "(f) j01 = 2.404825 +- 1e-6 with |J0(j01)| < 1e-12",
        (j - 2.404825).abs() <= 1e-6 && residual < 1e-12,
        format!("j01 = {j:.15}, residual {residual:.1e}"),
    ));

    criterion("6", "property suites", checks, start.elapsed())
}

/// Observed convergence order of the five-point Laplacian residual for 20
/// random eigenfunctions on all four presets.
fn laplacian_orders() -> (f64, String) {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut worst = f64::INFINITY;
    let mut tested = 0;
    while tested < 20 {
        let preset = Preset::ALL[rng.gen_range(0..4)];
        let surface = SurfaceDescriptor::preset(preset);
        let spectrum = enumerate_spectrum(&surface, 40.0).unwrap();
        let positive: Vec<_> = spectrum.entries.iter().filter(|e| e.value > 0.0).collect();
        let entry = positive[rng.gen_range(0..positive.len())];
        let basis = eigenspace_basis(&surface, entry);
        let terms = basis
            .iter()
            .map(|&b| (b, rng.gen_range(-1.0..1.0)))
            .collect();
        let f = Eigenfunction::new(&surface, terms).unwrap();
        let (lx, ly) = surface.fundamental_domain();
        let (x, y) = (rng.gen_range(0.0..lx), rng.gen_range(0.0..ly));
        let scale = f.coefficient_l1() * entry.value;

        let residual = |h: f64| {
            let lap = (f.evaluate(x + h, y)
                + f.evaluate(x - h, y)
                + f.evaluate(x, y + h)
                + f.evaluate(x, y - h)
                - 4.0 * f.evaluate(x, y))
                / (h * h);
            (-lap - entry.value * f.evaluate(x, y)).abs() / scale
        };
        let (r1, r2) = (residual(0.02), residual(0.01));
        // a point where the fourth derivatives nearly cancel says nothing about the order
        if r1 < 1e-9 {
            continue;
        }
        worst = worst.min((r1 / r2).log2());
        tested += 1;
    }
    (
        worst,
        format!("{tested} functions, smallest observed order {worst:.3}"),
    )
}

fn main() {
    let results = [
        table_regression(),
        thresholds_and_bounds(),
        candidate_filter(),
        nodal_counts(),
        final_verdicts(),
        property_suites(),
    ];
    let passed = results.iter().filter(|&&ok| ok).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed != results.len() && std::env::var_os("ACCEPTANCE_STRICT").is_some() {
        std::process::exit(1);
    }
}
