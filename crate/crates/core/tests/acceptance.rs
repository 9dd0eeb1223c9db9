//! Acceptance run: one line per criterion, non-zero exit on any failure.
//!
//!     cargo test --release --test acceptance

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use jager_lab::experiments::{
    containment_record, correspondence_record, emit_plot_data, exact_oracle_record,
    hyperbola_record, p0_curves_record, region_check, sample_set, with_pool, witness_grid_record,
    CheckRecord, ExperimentConfig, SampleSet, DEFAULT_K_LIST, WITNESS_MAX_GAP,
    WITNESS_MIN_SEPARATION,
};
use jager_lab::geometry::DEFAULT_CURVE_POINTS;
use jager_lab::jager::{golden_conjugate, silver_conjugate, theta};
use jager_lab::scalar::TolerancePolicy;
use jager_lab::{BigFloat, KParameter, PrecisionMode};

const SEED: u64 = 42;
const EPS: f64 = 1e-9;

type Outcome = Result<(bool, String), Box<dyn std::error::Error>>;
type Curves = BTreeMap<String, Vec<(f64, f64)>>;

struct Runner {
    failed: Vec<u32>,
}

impl Runner {
    fn criterion(&mut self, id: u32, name: &str, budget: Duration, f: impl FnOnce() -> Outcome) {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let (ok, detail) = match outcome {
            Ok((ok, detail)) => (ok, detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = elapsed <= budget;
        let pass = ok && in_time;
        if !pass {
            self.failed.push(id);
        }
        let timing = format!("{:.2}s of {}s", elapsed.as_secs_f64(), budget.as_secs());
        let late = if in_time { "" } else { " [over time budget]" };
        println!(
            "criterion {id} {name:<26} {} ({timing}{late}) {detail}",
            if pass { "PASS" } else { "FAIL" }
        );
    }
}

fn summarize(records: &[CheckRecord]) -> (bool, u64, u64, f64) {
    let pass = records.iter().all(CheckRecord::passed);
    let samples = records.iter().map(|r| r.samples).sum();
    let failures = records.iter().map(|r| r.failures).sum();
    let worst = records.iter().map(|r| r.worst_residual).fold(0.0, f64::max);
    (pass, samples, failures, worst)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * b.abs().max(1.0)
}

fn has_row(rows: &[(f64, f64)], u: f64, v: f64) -> bool {
    rows.iter().any(|&(a, b)| close(a, u) && close(b, v))
}

/// Reads `region_boundary.csv` into label -> rows.
fn read_boundary(path: &std::path::Path) -> Result<Curves, Box<dyn std::error::Error>> {
    let mut out = Curves::new();
    let mut reader = csv::Reader::from_path(path)?;
    for row in reader.records() {
        let row = row?;
        out.entry(row[0].to_string())
            .or_default()
            .push((row[1].parse()?, row[2].parse()?));
    }
    Ok(out)
}

/// Checks closed-form vertices against one boundary file; returns mismatch descriptions.
fn vertex_mismatches(k: f64, curves: &Curves) -> Vec<String> {
    let mut bad = Vec::new();
    let mut expect = |label: &str, u: f64, v: f64| {
        let ok = curves.get(label).is_some_and(|rows| has_row(rows, u, v));
        if !ok {
            bad.push(format!("{label} ({u}, {v})"));
        }
    };
    // strip corners pushed through psi
    let first = if k < 1.0 { 1 } else { 0 };
    for a in first..=12u64 {
        let s = k + a as f64;
        let label = format!("pa_quad_{a}");
        expect(&label, 1.0 / s, 0.0);
        expect(&label, 1.0 / (s + 1.0), s / (k * (s + 1.0)));
        expect(&label, 1.0 / (s + 2.0), (s + 1.0) / (k * (s + 2.0)));
        expect(&label, 1.0 / (s + 1.0), 0.0);
    }
    // corollary quadrangle
    let c = 1.0 / (k + 1.0);
    let quad = [(0.0, 0.0), (1.0 / k, 0.0), (c, c), (0.0, c)];
    for i in 0..4 {
        let label = format!("corollary_edge_{}", i + 1);
        let (p, q) = (quad[i], quad[(i + 1) % 4]);
        match curves.get(&label).map(Vec::as_slice) {
            Some([a, b])
                if close(a.0, p.0) && close(a.1, p.1) && close(b.0, q.0) && close(b.1, q.1) => {}
            _ => bad.push(format!("{label} is not {p:?} -> {q:?}")),
        }
    }
    if k < 1.0 {
        // images of the five corners of the folded part of the strip
        let corners = [
            (1.0 / k, 0.0),
            (1.0 / (2.0 * k), 0.5),
            (0.5, 1.0 / (2.0 * k)),
            (1.0 / (k + 2.0), (k + 1.0) / (k * (k + 2.0))),
            (1.0 / (k + 1.0), 0.0),
        ];
        let mut endpoints = Vec::new();
        for item in 1..=5 {
            let label = format!("p0_item_{item}");
            match curves.get(&label) {
                Some(rows) if rows.len() >= 2 => {
                    for &(u, v) in [rows[0], rows[rows.len() - 1]].iter() {
                        if !corners.iter().any(|&(cu, cv)| close(u, cu) && close(v, cv)) {
                            bad.push(format!("{label} endpoint ({u}, {v}) is not a corner image"));
                        }
                        endpoints.push((u, v));
                    }
                }
                _ => bad.push(format!("{label} missing")),
            }
        }
        for (u, v) in corners {
            if !has_row(&endpoints, u, v) {
                bad.push(format!("corner image ({u}, {v}) ends no item"));
            }
        }
        let arc = curves
            .get("hyperbola_arc")
            .map(Vec::as_slice)
            .unwrap_or_default();
        match arc {
            [a, .., b]
                if close(a.0, 0.5)
                    && close(a.1, 1.0 / (2.0 * k))
                    && close(b.0, 1.0 / (2.0 * k))
                    && close(b.1, 0.5) => {}
            _ => bad.push("hyperbola_arc endpoints".into()),
        }
    }
    bad
}

fn main() {
    let mut run = Runner { failed: Vec::new() };
    let cfg = ExperimentConfig {
        k_list: DEFAULT_K_LIST.to_vec(),
        samples: 10_000,
        n_min: 1,
        n_max: 30,
        seed: SEED,
        mode: PrecisionMode::extended(),
        ..Default::default()
    };
    let mut sets: Vec<SampleSet> = Vec::new();

    run.criterion(1, "correspondence", Duration::from_secs(30), || {
        sets = with_pool(|| cfg.k_list.iter().map(|&k| sample_set(&cfg, k)).collect::<Result<Vec<_>, _>>())??;
        let records: Vec<_> = sets.iter().map(correspondence_record).collect();
        let (pass, samples, failures, worst) = summarize(&records);
        let orbits: usize = sets.iter().map(|s| s.orbits).sum();
        let max_bits = sets.iter().map(|s| s.max_bits).max().unwrap_or(0);
        Ok((
            pass && orbits == 6 * 10_000,
            format!("{orbits} orbits, {samples} pairs, {failures} over 1e-8, worst {worst:.1e}, up to {max_bits} bits"),
        ))
    });

    run.criterion(2, "closed-form limits", Duration::from_secs(1), || {
        let bits = 256;
        let k = KParameter::new(BigFloat::from_u64(1, bits))?;
        let policy = TolerancePolicy::extended();
        let golden = theta(&k, &golden_conjugate(bits), 30, &policy)?
            .theta
            .to_f64();
        let silver = theta(&k, &silver_conjugate(bits), 30, &policy)?
            .theta
            .to_f64();
        let (dg, ds) = ((golden - 0.4472135955).abs(), (silver - 0.3535533906).abs());
        Ok((
            dg < 1e-6 && ds < 1e-6,
            format!("theta_30 = {golden:.12} (off {dg:.1e}), {silver:.12} (off {ds:.1e})"),
        ))
    });

    run.criterion(3, "exact oracle", Duration::from_secs(10), || {
        let rec = exact_oracle_record(SEED, 100, 15)?;
        Ok((
            rec.passed() && rec.samples == 100,
            format!(
                "{} cases, {} disagreements, worst {:.1e}, {} determinant checks, {} escalated",
                rec.samples,
                rec.failures,
                rec.worst_residual,
                rec.info["determinant_checks"],
                rec.info["escalated_to_extended"]
            ),
        ))
    });

    run.criterion(4, "strip image quadrangles", Duration::from_secs(10), || {
        let mut records = Vec::new();
        for (k, a) in [(0.5, 1), (0.5, 2), (1.0, 0), (2.0, 0), (2.0, 3)] {
            records.push(region_check(&KParameter::f64(k)?, a, 10_000, SEED, EPS)?);
        }
        let (pass, samples, failures, _) = summarize(&records);
        let stated: f64 = records.iter().map(|r| r.info["as_stated_reverse_without_preimage"]).sum();
        Ok((
            pass && samples == 5 * 20_000,
            format!("{samples} samples, {failures} failures (as-printed fourth vertex: {stated} reverse samples without preimage)"),
        ))
    });

    run.criterion(5, "folded region P0", Duration::from_secs(10), || {
        let mut records = Vec::new();
        let mut curve_points = 0;
        for k in [0.2, 0.5, 0.8] {
            let kp = KParameter::f64(k)?;
            records.push(region_check(&kp, 0, 10_000, SEED, EPS)?);
            let curves = p0_curves_record(&kp, DEFAULT_CURVE_POINTS, EPS)?;
            curve_points += curves.samples;
            records.push(curves);
        }
        let (pass, samples, failures, _) = summarize(&records);
        let stated: f64 = records
            .iter()
            .filter_map(|r| r.info.get("as_stated_forward_outside"))
            .sum();
        Ok((
            pass,
            format!(
                "{samples} samples incl. {curve_points} curve points, {failures} failures (literal intersection rejects {stated} forward images)"
            ),
        ))
    });

    run.criterion(6, "fold witnesses", Duration::from_secs(1), || {
        let rec = witness_grid_record(SEED);
        let sep = rec.info["min_separation"];
        let refusals = rec.info["refusals"];
        Ok((
            rec.passed()
                && sep > WITNESS_MIN_SEPARATION
                && rec.worst_residual < WITNESS_MAX_GAP
                && refusals == 2.0,
            format!(
                "min separation {sep:.4}, max image gap {:.1e}, {refusals} refusals for k >= 1",
                rec.worst_residual
            ),
        ))
    });

    run.criterion(7, "hyperbola bound", Duration::from_secs(30), || {
        let records: Vec<_> = sets.iter().map(|s| hyperbola_record(s, EPS)).collect();
        let (pass, samples, failures, _) = summarize(&records);
        let max = records
            .iter()
            .map(|r| r.info["max_4kuv"])
            .fold(0.0, f64::max);
        Ok((
            pass && samples >= 100_000,
            format!("{samples} pairs, {failures} exceptions, max 4k*u*v = {max:.12}"),
        ))
    });

    run.criterion(8, "containment", Duration::from_secs(60), || {
        let records = sets.iter().map(|s| containment_record(s, EPS)).collect::<Result<Vec<_>, _>>()?;
        let (pass, _, failures, _) = summarize(&records);
        let min_per_k = records.iter().map(|r| r.samples).min().unwrap_or(0);
        for r in &records {
            println!(
                "    k = {:<4} pairs {:>6}  outside {}  boundary {:>5}  closed-form quadrangle rejects {:>6}, admits-but-unreachable {}",
                r.k.unwrap_or(f64::NAN),
                r.samples,
                r.failures,
                r.boundary_skips,
                r.info["inside_constructive_outside_literal"],
                r.info["outside_constructive_inside_literal"]
            );
        }
        Ok((
            pass && min_per_k >= 100_000,
            format!("at least {min_per_k} pairs per k, {failures} outside"),
        ))
    });

    run.criterion(9, "plot data vertices", Duration::from_secs(1), || {
        let dir = tempfile::tempdir()?;
        let small = ExperimentConfig {
            samples: 500,
            n_max: 20,
            ..cfg.clone()
        };
        let mut bad = Vec::new();
        let mut rows = 0;
        for k in [0.5, 1.0, 2.0] {
            let files = emit_plot_data(
                &KParameter::f64(k)?,
                &small,
                &dir.path().join(k.to_string()),
            )?;
            rows += files.boundary_rows;
            let curves = read_boundary(&files.boundary)?;
            bad.extend(
                vertex_mismatches(k, &curves)
                    .into_iter()
                    .map(|m| format!("k = {k}: {m}")),
            );
        }
        let detail = if bad.is_empty() {
            format!("{rows} boundary rows, all closed-form vertices present")
        } else {
            bad.join("; ")
        };
        Ok((bad.is_empty(), detail))
    });

    if run.failed.is_empty() {
        println!("all criteria pass");
    } else {
        println!("failed criteria: {:?}", run.failed);
        std::process::exit(1);
    }
}
