use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use tsplab::distsim::{
    boltzmann_exact, enumerate_lengths, h_function, sigma_ratio, tv_distance, LengthModel,
};
use tsplab::geometry::io::{from_json_str, from_tsplib_str};
use tsplab::geometry::{generate, EuclideanInstance, NormalizedInstance};
use tsplab::oracle::{oracle_experiment, write_report_csv, Vote};
use tsplab::permcode::{InsertionCode, Permutation};
use tsplab::solver::{
    brute_force, held_karp, pilot, solve_gaussian, solve_oracle, GaussianParams, OracleMode,
    SolveResult, HELD_KARP_LIMIT,
};
use tsplab::wavesim::{prepare_uniform, prepare_weighted, render_registers, Alpha, WaveState};
use tsplab::{seeded_rng, LabRng};

use crate::args::*;
use crate::report::{csv_text, Failure, Report};

pub fn run(cli: &Cli) -> Result<Report, Failure> {
    let mut rng = seeded_rng(cli.seed);
    let csv = cli.format == Format::Csv;
    match &cli.command {
        Command::Gen(a) => gen(a, csv, &mut rng),
        Command::Encode(a) => encode(a, csv),
        Command::Decode(a) => decode(a, csv),
        Command::Wave(a) => wave(a, csv),
        Command::Sample(a) => sample(a, csv, &mut rng),
        Command::Dist(a) => dist(a, csv),
        Command::Fit(a) => fit(a, csv, &mut rng),
        Command::Oracle(a) => oracle(a, csv, &mut rng),
        Command::SolveGaussian(a) => solve_gaussian_cmd(a, cli.seed, csv, &mut rng),
        Command::SolveOracle(a) => solve_oracle_cmd(a, cli.seed, csv, &mut rng),
        Command::Exact(a) => exact(a, csv),
    }
}

/// Reads a JSON or TSPLIB instance. `.json` and `.tsp` extensions decide the
/// format; otherwise a leading `{` means JSON.
pub fn load_instance(path: &Path) -> Result<EuclideanInstance, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::bad_input(path, e))?;
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(str::to_ascii_lowercase);
    let json = match ext.as_deref() {
        Some("json") => true,
        Some("tsp") => false,
        _ => text.trim_start().starts_with('{'),
    };
    let parsed = if json {
        from_json_str(&text)
    } else {
        from_tsplib_str(&text)
    };
    parsed.map_err(|e| Failure::bad_input(path, e))
}

fn load_normalized(path: &Path) -> Result<NormalizedInstance, Failure> {
    load_instance(path)?
        .normalize()
        .map_err(|e| Failure::bad_input(path, e))
}

fn alpha_arg(value: f64) -> Result<Alpha, Failure> {
    Alpha::new(value).map_err(|e| Failure::usage(format!("--alpha: {e}")))
}

fn gen(a: &GenArgs, csv: bool, rng: &mut LabRng) -> Result<Report, Failure> {
    let mut inst = generate(a.kind, a.n, rng).map_err(|e| Failure::usage(e.to_string()))?;
    if let Some(name) = &a.name {
        inst = inst.with_name(name.clone());
    }
    if csv {
        #[derive(Serialize)]
        struct Row {
            x: f64,
            y: f64,
        }
        let rows: Vec<Row> = inst
            .points()
            .iter()
            .map(|p| Row { x: p.x, y: p.y })
            .collect();
        return Ok(Report::Csv(csv_text(&rows)?));
    }
    Ok(Report::json(
        serde_json::to_value(&inst).expect("instances serialize"),
    ))
}

fn code_fields(code: &InsertionCode) -> Value {
    json!({
        "code": code.to_string(),
        "rank": code.rank().ok(),
        "permutation": code.decode().to_string(),
    })
}

fn code_report(code: &InsertionCode, csv: bool) -> Result<Report, Failure> {
    if csv {
        #[derive(Serialize)]
        struct Row {
            code: String,
            rank: Option<u64>,
            permutation: String,
        }
        let row = Row {
            code: code.to_string(),
            rank: code.rank().ok(),
            permutation: code.decode().to_string(),
        };
        return Ok(Report::Csv(csv_text(&[row])?));
    }
    Ok(Report::json(code_fields(code)))
}

fn encode(a: &EncodeArgs, csv: bool) -> Result<Report, Failure> {
    let perm: Permutation = a
        .perm
        .parse()
        .map_err(|e: tsplab::Error| Failure::usage(e.to_string()))?;
    code_report(&perm.encode(), csv)
}

fn decode(a: &DecodeArgs, csv: bool) -> Result<Report, Failure> {
    let code = match (&a.code, a.rank, a.n) {
        (Some(c), _, _) => c
            .parse()
            .map_err(|e: tsplab::Error| Failure::usage(e.to_string()))?,
        (None, Some(r), Some(n)) => {
            InsertionCode::unrank(r, n).map_err(|e| Failure::usage(e.to_string()))?
        }
        _ => return Err(Failure::usage("decode needs --code or --rank with --n")),
    };
    code_report(&code, csv)
}

struct PreparedWave {
    state: WaveState,
    alpha: Option<Alpha>,
}

fn prepare(src: &WaveSource) -> Result<PreparedWave, Failure> {
    match (&src.instance, src.alpha) {
        (Some(path), alpha) => {
            let inst = load_normalized(path)?;
            if let Some(n) = src.n.filter(|&n| n != inst.len()) {
                return Err(Failure::usage(format!(
                    "--n {n} disagrees with the instance size {}",
                    inst.len()
                )));
            }
            let state = match alpha {
                Some(a) => prepare_weighted(&inst, alpha_arg(a)?)?,
                None => prepare_uniform(inst.len())?,
            };
            Ok(PreparedWave {
                state,
                alpha: alpha.map(alpha_arg).transpose()?,
            })
        }
        (None, _) => {
            let n = src
                .n
                .ok_or_else(|| Failure::usage("wave needs --instance or --n"))?;
            Ok(PreparedWave {
                state: prepare_uniform(n)?,
                alpha: None,
            })
        }
    }
}

fn wave(a: &WaveArgs, csv: bool) -> Result<Report, Failure> {
    let PreparedWave { state, alpha } = prepare(&a.source)?;
    if csv {
        let mut buf = Vec::new();
        state.write_csv(&mut buf)?;
        return Ok(Report::Csv(
            String::from_utf8(buf).expect("csv output is utf-8"),
        ));
    }
    let entries: Vec<Value> = state
        .iter()
        .map(|(code, amp)| {
            json!({
                "rank": code.rank().ok(),
                "code": code.to_string(),
                "registers": render_registers(&code).to_string(),
                "probability": amp.norm_sqr(),
            })
        })
        .collect();
    Ok(Report::json(json!({
        "n": state.registers(),
        "kind": if alpha.is_some() { "weighted" } else { "uniform" },
        "alpha": alpha,
        "norm": state.norm_sqr(),
        "entries": entries,
    })))
}

fn sample(a: &SampleArgs, csv: bool, rng: &mut LabRng) -> Result<Report, Failure> {
    let PreparedWave { state, alpha } = prepare(&a.source)?;
    let mut counts: BTreeMap<u64, usize> = BTreeMap::new();
    for _ in 0..a.shots {
        let code = state.measure(rng)?;
        *counts.entry(code.rank()?).or_default() += 1;
    }

    #[derive(Serialize)]
    struct Row {
        rank: u64,
        code: String,
        count: usize,
        frequency: f64,
        probability: f64,
    }
    let mut rows = Vec::with_capacity(counts.len());
    for (&rank, &count) in &counts {
        let code = InsertionCode::unrank(rank, state.depth())?;
        rows.push(Row {
            rank,
            probability: state.probability_of(&code),
            code: code.to_string(),
            count,
            frequency: count as f64 / a.shots as f64,
        });
    }
    if csv {
        return Ok(Report::Csv(csv_text(&rows)?));
    }
    Ok(Report::json(json!({
        "n": state.registers(),
        "alpha": alpha,
        "shots": a.shots,
        "distinct": rows.len(),
        "counts": rows,
    })))
}

fn dist(a: &DistArgs, csv: bool) -> Result<Report, Failure> {
    let inst = load_normalized(&a.instance)?;
    let d = enumerate_lengths(&inst)?;
    let alpha = a.alpha.map(alpha_arg).transpose()?;
    let table = alpha.map(|al| boltzmann_exact(&d, al));

    if csv && a.table {
        #[derive(Serialize)]
        struct Row {
            rank: usize,
            code: String,
            probability: f64,
        }
        let uniform = 1.0 / d.len() as f64;
        let mut rows = Vec::with_capacity(d.len());
        for r in 0..d.len() {
            rows.push(Row {
                rank: r,
                code: InsertionCode::unrank(r as u64, d.n())?.to_string(),
                probability: table.as_ref().map_or(uniform, |t| t[r]),
            });
        }
        return Ok(Report::Csv(csv_text(&rows)?));
    }
    let hist = d.histogram(a.bins);
    if csv {
        return Ok(Report::Csv(csv_text(&hist)?));
    }

    let best = InsertionCode::unrank(d.argmin() as u64, d.n())?;
    let boltzmann = match (alpha, &table) {
        (Some(al), Some(t)) => {
            let circuit = prepare_weighted(&inst, al)?.probabilities();
            json!({
                "alpha": al,
                "expected_length": d.expected_length(t),
                "circuit_expected_length": d.expected_length(&circuit),
                "tv_circuit_vs_boltzmann": tv_distance(&circuit, t)?,
            })
        }
        _ => Value::Null,
    };
    Ok(Report::json(json!({
        "n": d.n(),
        "tours": d.len(),
        "min": d.min(),
        "max": d.max(),
        "mean": d.mean(),
        "argmin": {
            "rank": d.argmin(),
            "code": best.to_string(),
            "tour": best.decode(),
        },
        "scale": inst.scale(),
        "histogram": hist,
        "boltzmann": boltzmann,
    })))
}

fn fit(a: &FitArgs, csv: bool, rng: &mut LabRng) -> Result<Report, Failure> {
    if a.epsilon.is_nan() || a.epsilon <= 0.0 {
        return Err(Failure::usage("--epsilon must be positive"));
    }
    let inst = load_normalized(&a.instance)?;
    let p = pilot(&inst, a.pilot, rng)?;
    let fit = p.fit;
    let alpha = match a.alpha {
        Some(v) => alpha_arg(v)?,
        None => Alpha::from_ln(fit.centering_ln_alpha(p.x_min))
            .map_err(|e| Failure::bad_input(&a.instance, format!("cannot center the tilt: {e}")))?,
    };
    let ratio_gauss = if p.x_min < p.x_max {
        Some(sigma_ratio(
            LengthModel::Gaussian {
                fit,
                x_min: p.x_min,
                x_max: p.x_max,
            },
            alpha,
            a.epsilon,
        )?)
    } else {
        None
    };
    let ratio_exact = if inst.len() <= tsplab::DEFAULT_ENUMERATION_LIMIT {
        let d = enumerate_lengths(&inst)?;
        Some(sigma_ratio(LengthModel::Discrete(&d), alpha, a.epsilon)?)
    } else {
        None
    };
    // analysis frame: center at the fitted mean, unit = sqrt(2) sigma
    let x_unit = fit.to_unit_frame(p.x_min, fit.mu);
    let unit = std::f64::consts::SQRT_2 * fit.sigma;
    let eps_xmin = a.epsilon * p.x_min / unit;
    let width = ((p.x_max - p.x_min) / unit).max(eps_xmin);
    let h_at_min = h_function(x_unit, eps_xmin, width)?;
    let h_at_zero = h_function(0.0, eps_xmin, width)?;
    let (p_scale, q_scale) = fit.scale_polynomials(p.x_min, p.x_max);

    #[derive(Serialize)]
    struct Row {
        mu: f64,
        sigma: f64,
        sample_count: usize,
        x_min: f64,
        x_max: f64,
        ln_alpha: f64,
        epsilon: f64,
        sigma_ratio_gaussian: Option<f64>,
        sigma_ratio_exact: Option<f64>,
        h_at_x_min: f64,
        h_at_zero: f64,
        p: f64,
        q: f64,
    }
    let row = Row {
        mu: fit.mu,
        sigma: fit.sigma,
        sample_count: fit.sample_count,
        x_min: p.x_min,
        x_max: p.x_max,
        ln_alpha: alpha.ln(),
        epsilon: a.epsilon,
        sigma_ratio_gaussian: ratio_gauss,
        sigma_ratio_exact: ratio_exact,
        h_at_x_min: h_at_min,
        h_at_zero,
        p: p_scale,
        q: q_scale,
    };
    if csv {
        return Ok(Report::Csv(csv_text(&[row])?));
    }
    Ok(Report::json(json!({
        "fit": fit,
        "x_min_estimate": p.x_min,
        "x_max_estimate": p.x_max,
        "alpha": alpha,
        "ln_alpha": alpha.ln(),
        "epsilon": a.epsilon,
        "sigma_ratio_gaussian": ratio_gauss,
        "sigma_ratio_exact": ratio_exact,
        "unit_frame": {
            "center": fit.mu,
            "x_min": x_unit,
            "eps_xmin": eps_xmin,
            "range_width": width,
        },
        "h_at_x_min": h_at_min,
        "h_at_zero": h_at_zero,
        "p": p_scale,
        "q": q_scale,
    })))
}

fn oracle(a: &OracleArgs, csv: bool, rng: &mut LabRng) -> Result<Report, Failure> {
    let row = oracle_experiment(a.m, a.n_total, a.trials, rng)?;
    if csv {
        let mut buf = Vec::new();
        write_report_csv(&[row], &mut buf)?;
        return Ok(Report::Csv(
            String::from_utf8(buf).expect("csv output is utf-8"),
        ));
    }
    let sd = (row.formula_p * (1.0 - row.formula_p) / a.trials.max(1) as f64).sqrt();
    let mut v = serde_json::to_value(row).expect("row serializes");
    v["gap_from_half"] = json!(0.5 - row.formula_p);
    v["binomial_sd"] = json!(sd);
    Ok(Report::json(v))
}

/// Fills `opt` from Held–Karp when the instance is small enough.
fn with_optimum(result: SolveResult, inst: &NormalizedInstance) -> Result<SolveResult, Failure> {
    if inst.len() > HELD_KARP_LIMIT {
        return Ok(result);
    }
    let (opt, _) = held_karp(inst)?;
    Ok(result.with_opt(opt))
}

#[derive(Serialize)]
struct SolveRow {
    tour: String,
    length: f64,
    opt: Option<f64>,
    opt_gap: Option<f64>,
    samples_used: usize,
    oracle_calls: usize,
    seed: u64,
}

fn solve_value(result: &SolveResult, seed: u64, scale: f64) -> Value {
    let mut v = serde_json::to_value(result).expect("result serializes");
    v["seed"] = json!(seed);
    v["raw_length"] = json!(result.length / scale);
    v
}

fn solve_csv(result: &SolveResult, seed: u64) -> Result<Report, Failure> {
    let row = SolveRow {
        tour: result.tour.to_string(),
        length: result.length,
        opt: result.opt,
        opt_gap: result.opt_gap,
        samples_used: result.samples_used,
        oracle_calls: result.oracle_calls,
        seed,
    };
    Ok(Report::Csv(csv_text(&[row])?))
}

fn solve_gaussian_cmd(
    a: &SolveGaussianArgs,
    seed: u64,
    csv: bool,
    rng: &mut LabRng,
) -> Result<Report, Failure> {
    let inst = load_normalized(&a.instance)?;
    let params = GaussianParams {
        alpha: a.alpha.map(alpha_arg).transpose()?,
        repetitions: a.repetitions,
        pilot: a.pilot,
        c: a.c,
        fail: a.fail,
        enumeration_limit: a.enumeration_limit,
    };
    let out = solve_gaussian(&inst, a.epsilon, &params, rng)?;
    let result = with_optimum(out.result.clone(), &inst)?;
    if csv {
        return solve_csv(&result, seed);
    }
    let mut v = solve_value(&result, seed, inst.scale());
    v["alpha"] = json!(out.alpha);
    v["repetitions"] = json!(out.repetitions);
    v["fit"] = json!(out.fit);
    v["x_min_estimate"] = json!(out.x_min_estimate);
    v["p_scale"] = json!(out.p_scale);
    v["sampler"] = json!(out.sampler);
    Ok(Report::json(v))
}

fn solve_oracle_cmd(
    a: &SolveOracleArgs,
    seed: u64,
    csv: bool,
    rng: &mut LabRng,
) -> Result<Report, Failure> {
    let inst = load_normalized(&a.instance)?;
    let mode = match a.mode {
        ModeArg::Exact => OracleMode::Exact,
        ModeArg::Sampled => OracleMode::Sampled {
            trials: a.trials,
            vote: match a.vote {
                VoteArg::Majority => Vote::Majority,
                VoteArg::Margin => Vote::Margin { z: a.z },
            },
        },
    };
    let out = solve_oracle(&inst, a.epsilon, mode, a.policy.into(), rng)?;
    let result = with_optimum(out.result.clone(), &inst)?;
    if csv {
        return solve_csv(&result, seed);
    }
    let mut v = solve_value(&result, seed, inst.scale());
    v["i_0"] = json!(out.i_0);
    v["bins"] = json!(out.bins);
    v["projected_count"] = json!(out.projected_count);
    v["mode"] = json!(mode);
    Ok(Report::json(v))
}

fn exact(a: &ExactArgs, csv: bool) -> Result<Report, Failure> {
    let inst = load_normalized(&a.instance)?;
    let (length, tour) = match a.method {
        Method::HeldKarp => held_karp(&inst)?,
        Method::BruteForce => brute_force(&inst)?,
    };
    if csv {
        #[derive(Serialize)]
        struct Row {
            tour: String,
            length: f64,
            raw_length: f64,
        }
        let row = Row {
            tour: tour.to_string(),
            length,
            raw_length: length / inst.scale(),
        };
        return Ok(Report::Csv(csv_text(&[row])?));
    }
    Ok(Report::json(json!({
        "tour": tour,
        "length": length,
        "raw_length": length / inst.scale(),
        "method": a.method,
    })))
}
