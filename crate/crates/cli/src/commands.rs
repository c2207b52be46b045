//! Subcommand implementations.

use std::collections::BTreeMap;
use std::path::Path;

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use qtraj_core::bloch::{Component, Trajectory};
use qtraj_core::cascade::{cascade_trajectory_with_stream, BASIS_LABELS, PAIRS};
use qtraj_core::ensemble::{
    post_select, reconstruct, run_ensemble, EnsembleHistogram, PostSelectionWindow,
};
use qtraj_core::generator::generate_record_with_stream;
use qtraj_core::matrix::projective_z_effects;
use qtraj_core::record::MeasurementRecord;
use qtraj_core::smoothing::{predict_hidden, smooth_record};
use qtraj_core::tomography::{
    conditional_tomography, projective_sample, TomoAxis, TomoCondition, TomographyShot,
};

use crate::config_file::{ResolvedCascade, ResolvedRun};
use crate::error::{CliError, CliErrorKind};
use crate::output::{CsvField, CsvFile, RunMeta, read_csv};

fn ensure_dir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path)?;
    Ok(())
}

fn trajectory_rows(
    csv: &mut CsvFile,
    traj_id: u64,
    traj: &Trajectory,
) -> Result<(), CliError> {
    for (k, q) in traj.states().iter().enumerate() {
        csv.row(&[
            CsvField::Int(traj_id),
            CsvField::Int(k as u64),
            CsvField::Float(k as f64 * traj.dt()),
            CsvField::Float(q.x),
            CsvField::Float(q.y),
            CsvField::Float(q.z),
        ])?;
    }
    Ok(())
}

pub fn generate(run: &ResolvedRun, n: usize, seed: u64, out: &Path) -> Result<(), CliError> {
    let settings = run.settings(seed)?;
    let pairs: Result<Vec<_>, _> = (0..n as u64)
        .into_par_iter()
        .map(|stream| generate_record_with_stream(&settings, stream))
        .collect();
    let pairs = pairs?;

    ensure_dir(out)?;
    let meta = RunMeta::new("generate", seed, json!({ "settings": settings, "n_traj": n }))?;
    let mut records = CsvFile::create(out, "records.csv", &meta, "traj,step,t,r")?;
    let mut truth = CsvFile::create(out, "truth.csv", &meta, "traj,step,t,x,y,z")?;
    for (i, (record, traj)) in pairs.iter().enumerate() {
        for (k, &r) in record.samples().iter().enumerate() {
            records.row(&[
                CsvField::Int(i as u64),
                CsvField::Int(k as u64),
                CsvField::Float(k as f64 * record.dt()),
                CsvField::Float(r),
            ])?;
        }
        trajectory_rows(&mut truth, i as u64, traj)?;
    }
    records.finish()?;
    truth.finish()?;
    meta.write_meta_json(out)?;
    Ok(())
}

pub fn reconstruct_cmd(
    run: &ResolvedRun,
    records_path: &Path,
    out: &Path,
) -> Result<(), CliError> {
    let rows = read_csv(records_path, "traj,step,t,r")?;
    let mut grouped: BTreeMap<u64, Vec<(u64, f64)>> = BTreeMap::new();
    for row in rows {
        if row.len() != 4 {
            return Err(CliError::new(
                CliErrorKind::Io,
                format!("records row has {} fields, expected 4", row.len()),
            ));
        }
        grouped.entry(row[0] as u64).or_default().push((row[1] as u64, row[3]));
    }
    if grouped.is_empty() {
        return Err(CliError::new(CliErrorKind::Statistics, "records file holds no samples"));
    }

    ensure_dir(out)?;
    let meta = RunMeta::new(
        "reconstruct",
        0,
        json!({ "config": run.config, "records": records_path.display().to_string() }),
    )?;
    let mut csv = CsvFile::create(out, "trajectories.csv", &meta, "traj,step,t,x,y,z")?;
    for (traj_id, mut samples) in grouped {
        samples.sort_by_key(|&(step, _)| step);
        let values: Vec<f64> = samples.iter().map(|&(_, r)| r).collect();
        let record =
            MeasurementRecord::new(values, run.config.dt, 0, run.config.axis)?;
        let traj = reconstruct(&record, run.initial_state, &run.config)?;
        trajectory_rows(&mut csv, traj_id, &traj)?;
    }
    csv.finish()?;
    meta.write_meta_json(out)?;
    Ok(())
}

/// Final-state window parsed from `--window x,z,eps`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct WindowSpec {
    pub x: f64,
    pub z: f64,
    pub eps: f64,
}

impl std::str::FromStr for WindowSpec {
    type Err = String;

    fn from_str(raw: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = raw.split(',').collect();
        if parts.len() != 3 {
            return Err(format!("expected x,z,eps — got {raw:?}"));
        }
        let parse = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("{s:?}: {e}"));
        Ok(WindowSpec { x: parse(parts[0])?, z: parse(parts[1])?, eps: parse(parts[2])? })
    }
}

fn write_histogram(
    out: &Path,
    name: &str,
    meta: &RunMeta,
    trajs: &[Trajectory],
    component: Component,
    bins: usize,
) -> Result<(), CliError> {
    let mut hist = EnsembleHistogram::from_trajectories(trajs, component, bins)?;
    hist.normalize();
    let weights = hist.normalized.as_ref().expect("just normalized");
    let mut csv = CsvFile::create(out, name, meta, "step,t,bin_center,count,weight")?;
    for (k, col) in hist.counts.iter().enumerate() {
        for (b, &count) in col.iter().enumerate() {
            csv.row(&[
                CsvField::Int(k as u64),
                CsvField::Float(k as f64 * hist.dt),
                CsvField::Float(hist.bin_center(b)),
                CsvField::Int(count as u64),
                CsvField::Float(weights[k][b]),
            ])?;
        }
    }
    csv.finish()?;
    Ok(())
}

pub fn ensemble(
    run: &ResolvedRun,
    n: usize,
    seed: u64,
    bins: usize,
    window: Option<WindowSpec>,
    out: &Path,
) -> Result<(), CliError> {
    let settings = run.settings(seed)?;
    let pairs = run_ensemble(n, &settings)?;
    let trajs: Vec<Trajectory> = pairs.into_iter().map(|(_, t)| t).collect();

    ensure_dir(out)?;
    let meta = RunMeta::new(
        "ensemble",
        seed,
        json!({ "settings": settings, "n_traj": n, "bins": bins, "window": window }),
    )?;

    // per-step means and standard errors, accumulated in trajectory order
    let steps = trajs[0].len();
    let mut csv = CsvFile::create(
        out,
        "means.csv",
        &meta,
        "step,t,mean_x,se_x,mean_y,se_y,mean_z,se_z",
    )?;
    for k in 0..steps {
        let mut fields = vec![
            CsvField::Int(k as u64),
            CsvField::Float(k as f64 * trajs[0].dt()),
        ];
        for component in [Component::X, Component::Y, Component::Z] {
            let mut sum = 0.0;
            let mut sum_sq = 0.0;
            for traj in &trajs {
                let v = traj.state(k).component(component);
                sum += v;
                sum_sq += v * v;
            }
            let mean = sum / n as f64;
            let var = if n > 1 { ((sum_sq - n as f64 * mean * mean) / (n as f64 - 1.0)).max(0.0) } else { 0.0 };
            fields.push(CsvField::Float(mean));
            fields.push(CsvField::Float((var / n as f64).sqrt()));
        }
        csv.row(&fields)?;
    }
    csv.finish()?;

    write_histogram(out, "hist_x.csv", &meta, &trajs, Component::X, bins)?;
    write_histogram(out, "hist_z.csv", &meta, &trajs, Component::Z, bins)?;

    if let Some(spec) = window {
        let t_final = (trajs[0].len() - 1) as f64 * trajs[0].dt();
        let selection =
            PostSelectionWindow::new(spec.x, spec.eps, spec.z, spec.eps, t_final)?;
        let selected = post_select(&trajs, &selection)?;
        if selected.is_empty() {
            return Err(CliError::new(
                CliErrorKind::Statistics,
                format!("post-selection window {spec:?} matched no trajectories"),
            ));
        }
        write_histogram(out, "hist_x_selected.csv", &meta, &selected, Component::X, bins)?;
        write_histogram(out, "hist_z_selected.csv", &meta, &selected, Component::Z, bins)?;
    }

    meta.write_meta_json(out)?;
    Ok(())
}

pub enum TomoMode {
    Scalar,
    Matching,
}

#[allow(clippy::too_many_arguments)]
pub fn tomo(
    run: &ResolvedRun,
    n_shots: usize,
    seed: u64,
    mode: TomoMode,
    r_center: f64,
    eps: f64,
    k: Option<usize>,
    out: &Path,
) -> Result<(), CliError> {
    let k = k.unwrap_or(run.n_steps);
    if k == 0 || k > run.n_steps {
        return Err(CliError::new(
            CliErrorKind::Config,
            format!("tomography step {k} must lie in 1..={}", run.n_steps),
        ));
    }
    let mut shot_run = run.clone();
    shot_run.n_steps = k;
    let settings = shot_run.settings(seed)?;

    let shots: Result<Vec<TomographyShot>, CliError> = (0..n_shots as u64)
        .into_par_iter()
        .map(|i| {
            let axis = TomoAxis::ALL[(i % 3) as usize];
            let (record, truth) = generate_record_with_stream(&settings, i)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(n_shots as u64 + i);
            let outcome = projective_sample(truth.final_state(), axis, &mut rng);
            Ok(TomographyShot::new(record, axis, outcome)?)
        })
        .collect();
    let shots = shots?;

    let (condition, prediction, mode_label) = match mode {
        TomoMode::Scalar => {
            // Bayesian prediction for a record averaging to the window center
            let constant =
                MeasurementRecord::new(vec![r_center; k], run.config.dt, seed, run.config.axis)?;
            let predicted =
                reconstruct(&constant, run.initial_state, &run.config)?.state(k);
            (
                TomoCondition::ScalarWindow { center: r_center, half_width: eps },
                predicted,
                "scalar",
            )
        }
        TomoMode::Matching => {
            let target_settings = {
                let mut t = shot_run.clone();
                t.n_steps = k;
                t.settings(seed.wrapping_add(0x9e3779b9))?
            };
            let (target_record, _) = generate_record_with_stream(&target_settings, 0)?;
            let target = reconstruct(&target_record, run.initial_state, &run.config)?.state(k);
            (
                TomoCondition::MatchingWindow { x: target.x, z: target.z, half_width: eps },
                target,
                "matching",
            )
        }
    };

    let estimate = conditional_tomography(&shots, condition, k, run.initial_state, &run.config)?;

    ensure_dir(out)?;
    let meta = RunMeta::new(
        "tomo",
        seed,
        json!({
            "settings": settings,
            "n_shots": n_shots,
            "mode": mode_label,
            "r_center": r_center,
            "eps": eps,
            "k": k,
        }),
    )?;
    let value = json!({
        "command": "tomo",
        "seed": seed,
        "config_hash": meta.config_hash,
        "mode": mode_label,
        "k": k,
        "t": k as f64 * run.config.dt,
        "estimate": estimate,
        "prediction": { "x": prediction.x, "y": prediction.y, "z": prediction.z },
    });
    let path = out.join("tomography.json");
    std::fs::write(&path, format!("{}\n", serde_json::to_string_pretty(&value)?))?;
    meta.write_meta_json(out)?;
    Ok(())
}

pub fn smooth(
    run: &ResolvedRun,
    seed: u64,
    hidden_at: f64,
    out: &Path,
) -> Result<(), CliError> {
    if !(0.0 < hidden_at && hidden_at < 1.0) {
        return Err(CliError::new(
            CliErrorKind::Config,
            format!("--hidden-at must lie strictly inside (0, 1), got {hidden_at}"),
        ));
    }
    let settings = run.settings(seed)?;
    let (record, _) = generate_record_with_stream(&settings, 0)?;
    let rho0 = qtraj_core::matrix::HermitianMatrix2::from_bloch(run.initial_state);
    let smoothed = smooth_record(&record, &rho0, &run.config)?;
    let povm = projective_z_effects();

    ensure_dir(out)?;
    let meta = RunMeta::new(
        "smooth",
        seed,
        json!({ "settings": settings, "hidden_at": hidden_at }),
    )?;
    let mut csv = CsvFile::create(
        out,
        "smoothed.csv",
        &meta,
        "step,t,x,y,z,p_plus_forward,p_plus_past",
    )?;
    let mut tables = Vec::with_capacity(smoothed.len());
    for (kk, s) in smoothed.iter().enumerate() {
        let (x, y, z) = s.rho.to_bloch();
        let probs = predict_hidden(&s.rho, &s.effect, &povm)?;
        tables.push(probs[0]);
        csv.row(&[
            CsvField::Int(kk as u64),
            CsvField::Float(s.t),
            CsvField::Float(x),
            CsvField::Float(y),
            CsvField::Float(z),
            CsvField::Float(0.5 * (1.0 + z)),
            CsvField::Float(probs[0]),
        ])?;
    }
    csv.finish()?;

    let hidden_step =
        ((hidden_at * run.n_steps as f64).round() as usize).clamp(1, run.n_steps - 1);
    let s = &smoothed[hidden_step];
    let (_, _, z) = s.rho.to_bloch();
    let forward_plus = 0.5 * (1.0 + z);
    let past = predict_hidden(&s.rho, &s.effect, &povm)?;
    let value = json!({
        "command": "smooth",
        "seed": seed,
        "config_hash": meta.config_hash,
        "hidden_step": hidden_step,
        "t": s.t,
        "forward": { "plus": forward_plus, "minus": 1.0 - forward_plus },
        "past": { "plus": past[0], "minus": past[1] },
    });
    std::fs::write(
        out.join("hidden.json"),
        format!("{}\n", serde_json::to_string_pretty(&value)?),
    )?;
    meta.write_meta_json(out)?;
    Ok(())
}

pub fn cascade(
    run: &ResolvedCascade,
    n: usize,
    seed: u64,
    out: &Path,
) -> Result<(), CliError> {
    let paths: Result<Vec<_>, _> = (0..n as u64)
        .into_par_iter()
        .map(|stream| {
            cascade_trajectory_with_stream(&run.initial, run.n_steps, &run.config, seed, stream)
        })
        .collect();
    let paths = paths?;

    ensure_dir(out)?;
    let meta = RunMeta::new(
        "cascade",
        seed,
        json!({
            "config": run.config,
            "n_steps": run.n_steps,
            "n_traj": n,
            "initial": run.initial_label,
        }),
    )?;
    let coherence_columns: Vec<String> = PAIRS
        .iter()
        .map(|&(i, j)| format!("m_{}_{}", BASIS_LABELS[i], BASIS_LABELS[j]))
        .collect();
    let columns = format!(
        "traj,step,t,p00,p01,p10,p11,{},concurrence",
        coherence_columns.join(",")
    );
    let mut csv = CsvFile::create(out, "cascade.csv", &meta, &columns)?;
    for (i, path) in paths.iter().enumerate() {
        for (k, (state, c)) in path.iter().enumerate() {
            let mut fields = vec![
                CsvField::Int(i as u64),
                CsvField::Int(k as u64),
                CsvField::Float(k as f64 * run.config.dt),
            ];
            fields.extend(state.populations.iter().map(|&p| CsvField::Float(p)));
            fields.extend(state.coherences.iter().map(|&m| CsvField::Float(m)));
            fields.push(CsvField::Float(*c));
            csv.row(&fields)?;
        }
    }
    csv.finish()?;
    meta.write_meta_json(out)?;
    Ok(())
}
