use serde::Serialize;
use spinamp::{
    branch_fidelity, contrast, meyer_wallach, run_random_map, run_scheme, run_sweep, Scheme,
    TargetState, TraceResult,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{self, Artifacts, FitReport};

#[derive(Serialize)]
struct RunSummary {
    n: usize,
    contrast: f64,
    mz_target_branch: f64,
    q_target_branch: f64,
    r_star: Option<usize>,
    contrast_sat: Option<f64>,
    q_sat: Option<f64>,
    fidelity_sat: Option<f64>,
}

/// Both branches of a non-iterated scheme as a one-row trace.
fn scheme_trace(config: &RunConfig) -> Result<TraceResult, CliError> {
    let spec = config.specs()[0];
    let n = spec.n_amplifier;
    let b0 = run_scheme(&spec.with_target(TargetState::Zero), &config.exp)
        .map_err(|e| CliError::core("branch 0", e))?;
    let b1 = run_scheme(&spec.with_target(TargetState::One), &config.exp)
        .map_err(|e| CliError::core("branch 1", e))?;
    let c = contrast(b0.mz, b1.mz, n as f64).map_err(|e| CliError::core("contrast", e))?;
    Ok(TraceResult {
        n_amplifier: n,
        threshold: config.threshold,
        mz0: vec![b0.mz],
        mz1: vec![b1.mz],
        contrast: vec![c],
        q0: vec![meyer_wallach(&b0.amplifier)],
        q1: vec![meyer_wallach(&b1.amplifier)],
        fidelity: vec![branch_fidelity(&b0.amplifier, &b1.amplifier)
            .map_err(|e| CliError::core("fidelity", e))?],
        r_star: (c >= config.threshold).then_some(1),
    })
}

pub fn cmd_run(mut config: RunConfig) -> Result<(), CliError> {
    config.validate(false)?;
    config.resolve_output_dir();
    let n = config.n[0];
    let trace = if config.scheme == Scheme::RandomMap {
        let params = config.map_params(n)?;
        run_random_map(&config.specs()[0], &params, config.threshold, &config.exp)
            .map_err(|e| CliError::core("random map", e))?
    } else {
        scheme_trace(&config)?
    };

    let last = trace.len() - 1;
    let (mz_t, q_t) = match config.target {
        TargetState::Zero => (trace.mz0[last], trace.q0[last]),
        TargetState::One => (trace.mz1[last], trace.q1[last]),
    };
    let iterated = config.scheme == Scheme::RandomMap;
    let sat = iterated.then(|| trace.saturation());
    let summary = RunSummary {
        n,
        contrast: trace.contrast[last],
        mz_target_branch: mz_t,
        q_target_branch: q_t,
        r_star: trace.r_star,
        contrast_sat: sat.map(|s| s.contrast_mean),
        q_sat: sat.map(|s| s.q1_mean),
        fidelity_sat: sat.map(|s| s.fidelity_mean),
    };

    let stem = config.stem(false);
    let mut art = Artifacts::default();
    let trace_name = format!("{stem}.trace.csv");
    art.add(trace_name.clone(), output::trace_csv(&trace));
    if config.plot {
        art.add(
            format!("{stem}.plot.py"),
            output::run_plot_script(&trace_name),
        );
    }
    let meta_name = format!("{stem}.meta.json");
    let mut files = art.names();
    files.push(meta_name.clone());
    art.add(
        meta_name,
        output::metadata_json("run", &config, files, &summary),
    );
    let dir = config.output_dir.clone().expect("resolved above");
    art.commit(&dir)?;

    let target = if config.target.bit() { 1 } else { 0 };
    if iterated {
        let s = sat.expect("iterated");
        let rs = trace
            .r_star
            .map_or("not reached".to_string(), |r| r.to_string());
        println!(
            "{} n={n}: r_star = {rs} (threshold {}), saturated C = {:.6}, Q1 = {:.6}, fidelity = {:.6e}",
            config.scheme.name(),
            config.threshold,
            s.contrast_mean,
            s.q1_mean,
            s.fidelity_mean
        );
    } else {
        println!(
            "{} n={n} target={target}: C = {:.12}, Mz = {:.12}, Q = {:.12}",
            config.scheme.name(),
            summary.contrast,
            mz_t,
            q_t
        );
    }
    println!("wrote {}/{stem}.*", dir.display());
    Ok(())
}

pub fn cmd_sweep(mut config: RunConfig) -> Result<(), CliError> {
    config.validate(true)?;
    config.resolve_output_dir();
    let base = config.map_params(config.n[0])?;
    let table = run_sweep(
        &config.n,
        &base,
        config.first_spin,
        config.threshold,
        &config.exp,
    )
    .map_err(|e| CliError::core("sweep", e))?;

    let stem = config.stem(true);
    let mut art = Artifacts::default();
    let mut trace_names = Vec::new();
    for t in &table.traces {
        let name = format!("{stem}.n{}.trace.csv", t.n_amplifier);
        art.add(name.clone(), output::trace_csv(t));
        trace_names.push(name);
    }
    let table_name = format!("{stem}.csv");
    art.add(table_name.clone(), output::sweep_csv(&table.rows));
    let report = FitReport {
        fit: table.fit,
        sizes_reaching_threshold: table.rows.iter().filter(|r| r.r_star.is_some()).count(),
    };
    art.add(format!("{stem}.fit.json"), output::fit_json(&report));
    if config.plot {
        art.add(
            format!("{stem}.plot.py"),
            output::sweep_plot_script(&table_name, &trace_names),
        );
    }
    let meta_name = format!("{stem}.meta.json");
    let mut files = art.names();
    files.push(meta_name.clone());
    art.add(
        meta_name,
        output::metadata_json("sweep", &config, files, &report),
    );
    let dir = config.output_dir.clone().expect("resolved above");
    art.commit(&dir)?;

    println!(
        "{:>4} {:>8} {:>8} {:>14} {:>10} {:>14}",
        "n", "N", "r_star", "contrast_sat", "Q_sat", "fidelity_sat"
    );
    for r in &table.rows {
        let rs = r.r_star.map_or("-".to_string(), |x| x.to_string());
        println!(
            "{:>4} {:>8} {:>8} {:>14.6} {:>10.6} {:>14.6e}",
            r.n, r.dim, rs, r.contrast_sat, r.q_sat, r.fidelity_sat
        );
    }
    match table.fit {
        Some(f) => println!(
            "fit r_star = {:.4} log2 N + {:.4} (rms residual {:.4}, {} points)",
            f.slope, f.intercept, f.residual, f.points
        ),
        None => println!("fit: fewer than two sizes reached the threshold"),
    }
    println!("wrote {}/{stem}.*", dir.display());
    Ok(())
}
