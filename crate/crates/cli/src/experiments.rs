//! Experiment runners. Each produces its files in memory so that writing,
//! checksumming and comparison happen in one place.

use std::collections::BTreeMap;

use fluxshot_core::analysis::{
    analyze_single_shot, blob_mean_trajectory, efficiency_fit, fit_ckp, fit_exponential_decay, moment_snr,
    histogram_csv, optimal_threshold, qnd_fidelity, ridge_points,
    time_to_threshold, FidelityReport, TimeToThreshold,
};
use fluxshot_core::dynamics::{
    backaction_experiment, effective_temperature, reset_simulate, reset_trace, thermal_population,
};
use fluxshot_core::model::diagonalize;
use fluxshot_core::shots::{
    ckp_map, encode_batch, synthesize_batch, synthesize_records, NoiseConfig, ReadoutConfig, ShotBatch,
    ShotSynthesizer,
};
use fluxshot_core::LevelLabel;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::cells;
use crate::config::{Amplifier, Experiment, ScenarioConfig};
use crate::error::CliError;
use crate::svg::{plot, Series, Style};
use crate::table::Table;

/// Key numbers of one run, written as `result.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub experiment: String,
    pub config_hash: String,
    pub seed: u64,
    pub metrics: BTreeMap<String, f64>,
    pub details: serde_json::Value,
}

pub struct Outputs {
    pub files: Vec<(String, Vec<u8>)>,
    pub summary: RunSummary,
    pub warnings: usize,
}

impl Outputs {
    fn new(cfg: &ScenarioConfig) -> Self {
        Outputs {
            files: Vec::new(),
            summary: RunSummary {
                experiment: cfg.experiment.name().to_string(),
                config_hash: cfg.hash(),
                seed: cfg.seed,
                metrics: BTreeMap::new(),
                details: serde_json::Value::Null,
            },
            warnings: 0,
        }
    }

    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("serializable");
        bytes.push(b'\n');
        self.add(name, bytes);
    }

    fn metric(&mut self, name: &str, value: f64) {
        self.summary.metrics.insert(name.to_string(), value);
    }

    fn finish(mut self) -> Self {
        let summary = self.summary.clone();
        self.add_json("result.json", &summary);
        self
    }
}

const GE: [LevelLabel; 2] = [LevelLabel::G, LevelLabel::E];

pub fn run_experiment(cfg: &ScenarioConfig, svg: bool) -> Result<Outputs, CliError> {
    cfg.validate()?;
    let mut out = Outputs::new(cfg);
    let canonical = ScenarioConfig {
        output_dir: Default::default(),
        ..cfg.clone()
    };
    out.add_json("config.json", &canonical);
    match &cfg.experiment {
        Experiment::SingleShot { amplifier, bins } => single_shot(cfg, *amplifier, *bins, svg, &mut out)?,
        Experiment::Qnd { amplifier, gap, bins } => qnd(cfg, *amplifier, *gap, *bins, svg, &mut out)?,
        Experiment::PowerSweep {
            amplifier,
            n_bar,
            tau_int,
            targets,
        } => power_sweep(cfg, *amplifier, n_bar, tau_int, targets, svg, &mut out)?,
        Experiment::TimeSweep { amplifier, tau_int } => time_sweep(cfg, *amplifier, tau_int, svg, &mut out)?,
        Experiment::Backaction {
            prepared,
            a_r,
            tau_leak,
            n_traj,
        } => backaction(cfg, *prepared, a_r, tau_leak, *n_traj, svg, &mut out)?,
        Experiment::Ckp {
            qubit_freq,
            n_bar_peak,
            grid,
        } => ckp(cfg, *qubit_freq, *n_bar_peak, grid, svg, &mut out)?,
        Experiment::Reset {
            reset,
            p_e_initial,
            points,
        } => reset_run(cfg, reset, *p_e_initial, *points, svg, &mut out)?,
        Experiment::Efficiency { amplifier, n_bar } => efficiency(cfg, *amplifier, n_bar, svg, &mut out)?,
    }
    Ok(out.finish())
}

/// g/e batch at one readout setting.
pub fn ge_batch(cfg: &ScenarioConfig, readout: &ReadoutConfig, noise: &NoiseConfig) -> Result<ShotBatch, CliError> {
    Ok(synthesize_batch(&GE, &cfg.device.cavity, readout, noise, &cfg.rates, cfg.n_shots, cfg.seed)?)
}

fn histogram_svg(csv: &str, title: &str, names: [&str; 2]) -> String {
    let mut a = Vec::new();
    let mut b = Vec::new();
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect();
        a.push((v[0], v[1]));
        b.push((v[0], v[2]));
    }
    plot(title, "I", "counts", &[Series::new(names[0], a), Series::new(names[1], b)], Style::Steps, false)
}

fn single_shot(cfg: &ScenarioConfig, amp: Amplifier, bins: usize, svg: bool, out: &mut Outputs) -> Result<(), CliError> {
    let noise = cfg.noise_for(amp);
    let batch = ge_batch(cfg, &cfg.readout, &noise)?;
    let report = analyze_single_shot(&batch)?;
    let (csv_bytes, sidecar) = encode_batch(&batch)?;
    out.add("shots.csv", csv_bytes);
    out.add("shots.json", sidecar);
    let hist = histogram_csv(&batch.i_for(LevelLabel::G), &batch.i_for(LevelLabel::E), bins)?;
    if svg {
        out.add("histogram.svg", histogram_svg(&hist, "Single-shot histograms", ["g", "e"]).into_bytes());
        let iq = |l| batch.iq_for(l).iter().map(|z| (z.re, z.im)).collect::<Vec<_>>();
        out.add(
            "iq_blobs.svg",
            plot("IQ blobs", "I", "Q", &[Series::new("g", iq(LevelLabel::G)), Series::new("e", iq(LevelLabel::E))], Style::Scatter, false)
                .into_bytes(),
        );
    }
    out.add("histogram.csv", hist.into_bytes());
    out.add_json("report.json", &report);
    fidelity_metrics(out, &report);
    out.summary.details = json!({
        "amplifier": amp,
        "n_bar": cfg.readout.n_bar,
        "tau_int": cfg.readout.tau_int,
        "n_n": noise.n_n,
    });
    Ok(())
}

fn fidelity_metrics(out: &mut Outputs, r: &FidelityReport) {
    out.metric("F", r.fidelity);
    out.metric("eps_snr", r.eps_snr);
    out.metric("eps_prep_mix", r.eps_prep_mix);
    out.metric("snr", r.snr);
    out.metric("threshold", r.threshold);
    if let Some(fq) = r.f_q {
        out.metric("F_Q", fq);
    }
    if let (Some(a), Some(b)) = (r.p00, r.p11) {
        out.metric("P00", a);
        out.metric("P11", b);
    }
}

/// M1/M2 records of the two-pulse protocol.
pub struct QndRecords {
    pub prepared: Vec<LevelLabel>,
    pub m1: Vec<Complex64>,
    pub m2: Vec<Complex64>,
    pub report: FidelityReport,
    pub outcomes: (Vec<u8>, Vec<u8>),
}

pub fn simulate_qnd(cfg: &ScenarioConfig, noise: &NoiseConfig, gap: f64) -> Result<QndRecords, CliError> {
    let second = cfg.readout.pulse_len + gap;
    let synth = ShotSynthesizer::with_pulses(&cfg.device.cavity, &cfg.readout, noise, &[0.0, second])?;
    let (prepared, records) = synthesize_records(&synth, &GE, &cfg.rates, cfg.n_shots, cfg.seed)?;
    let m1: Vec<Complex64> = records.iter().map(|r| r[0]).collect();
    let m2: Vec<Complex64> = records.iter().map(|r| r[1]).collect();
    let m1_batch = ShotBatch {
        i_vals: m1.iter().map(|z| z.re).collect(),
        q_vals: m1.iter().map(|z| z.im).collect(),
        prepared: prepared.clone(),
        config: cfg.readout.clone(),
        noise: *noise,
        seed: cfg.seed,
    };
    let report = analyze_single_shot(&m1_batch)?;
    let threshold = optimal_threshold(&m1_batch.i_for(LevelLabel::G), &m1_batch.i_for(LevelLabel::E))?;
    let o1: Vec<u8> = m1.iter().map(|z| threshold.classify(z.re)).collect();
    let o2: Vec<u8> = m2.iter().map(|z| threshold.classify(z.re)).collect();
    let qnd = qnd_fidelity(&o1, &o2)?;
    Ok(QndRecords {
        prepared,
        m1,
        m2,
        report: report.with_qnd(&qnd),
        outcomes: (o1, o2),
    })
}

fn qnd(cfg: &ScenarioConfig, amp: Amplifier, gap: f64, bins: usize, svg: bool, out: &mut Outputs) -> Result<(), CliError> {
    let noise = cfg.noise_for(amp);
    let rec = simulate_qnd(cfg, &noise, gap)?;
    let mut shots = Table::new(&["prepared", "m1_I", "m1_Q", "m2_I", "m2_Q", "m1", "m2"]);
    for k in 0..rec.m1.len() {
        shots.row(cells![
            rec.prepared[k].to_string(),
            rec.m1[k].re,
            rec.m1[k].im,
            rec.m2[k].re,
            rec.m2[k].im,
            rec.outcomes.0[k],
            rec.outcomes.1[k],
        ]);
    }
    out.add("qnd_shots.csv", shots.into_bytes());
    let split = |class: u8| -> Vec<f64> {
        rec.m2
            .iter()
            .zip(&rec.outcomes.0)
            .filter(|(_, &o)| o == class)
            .map(|(z, _)| z.re)
            .collect()
    };
    let hist = histogram_csv(&split(0), &split(1), bins)?.replacen("count_g,count_e", "count_m1_0,count_m1_1", 1);
    if svg {
        out.add("m2_histograms.svg", histogram_svg(&hist, "M2 conditioned on M1", ["M1 = 0", "M1 = 1"]).into_bytes());
    }
    out.add("m2_histograms.csv", hist.into_bytes());
    out.add_json("report.json", &rec.report);
    fidelity_metrics(out, &rec.report);
    out.summary.details = json!({
        "amplifier": amp,
        "pulse_len": cfg.readout.pulse_len,
        "gap": gap,
        "tau_int": cfg.readout.tau_int,
    });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn power_sweep(
    cfg: &ScenarioConfig,
    amp: Amplifier,
    n_grid: &[f64],
    tau_grid: &[f64],
    targets: &[f64],
    svg: bool,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let noise = cfg.noise_for(amp);
    let points: Vec<(f64, f64)> = n_grid.iter().flat_map(|&n| tau_grid.iter().map(move |&t| (n, t))).collect();
    let results: Vec<Result<(FidelityReport, ShotBatch), CliError>> = points
        .par_iter()
        .map(|&(n, t)| {
            let readout = cfg.readout.with_n_bar(n).with_tau_int(t);
            let batch = ge_batch(cfg, &readout, &noise)?;
            Ok((analyze_single_shot(&batch)?, batch))
        })
        .collect();

    let mut grid = Table::new(&["n_bar", "tau_int", "F", "total_error", "eps_snr", "eps_prep_mix", "snr"]);
    let mut best: BTreeMap<usize, (f64, usize)> = BTreeMap::new();
    for (k, ((n, t), res)) in points.iter().zip(&results).enumerate() {
        match res {
            Ok((r, _)) => {
                grid.row(cells![*n, *t, r.fidelity, 1.0 - r.fidelity, r.eps_snr, r.eps_prep_mix, r.snr]);
                let row = k / tau_grid.len();
                if best.get(&row).is_none_or(|b| r.fidelity > b.0) {
                    best.insert(row, (r.fidelity, k));
                }
            }
            Err(e) => {
                eprintln!("warning: n_bar {n}, tau_int {t}: {e}");
                out.warnings += 1;
                grid.row(cells![*n, *t, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
            }
        }
    }
    out.add("power_sweep.csv", grid.into_bytes());

    let mut ttt = Table::new(&["n_bar", "target", "status", "tau_int"]);
    for (row, &n) in n_grid.iter().enumerate() {
        let eps: Vec<(f64, f64)> = tau_grid
            .iter()
            .enumerate()
            .filter_map(|(j, &t)| results[row * tau_grid.len() + j].as_ref().ok().map(|(r, _)| (t, r.eps_snr)))
            .collect();
        for &target in targets {
            match time_to_threshold(&eps, target)? {
                TimeToThreshold::Reached(t) => ttt.row(cells![n, target, "reached", t]),
                TimeToThreshold::Unreachable => ttt.row(cells![n, target, "unreachable", f64::NAN]),
            }
        }
    }
    out.add("time_to_threshold.csv", ttt.into_bytes());

    // Blob means at the grid integration time closest to the configured one,
    // so separations compare across amplitudes.
    let col = tau_grid
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - cfg.readout.tau_int).abs().total_cmp(&(b.1 - cfg.readout.tau_int).abs()))
        .map(|(j, _)| j)
        .expect("nonempty grid");
    let n0 = cfg.readout.n_bar;
    let rows: Vec<usize> = (0..n_grid.len()).filter(|&row| results[row * tau_grid.len() + col].is_ok()).collect();
    let chosen: Vec<(f64, ShotBatch)> = rows
        .iter()
        .filter_map(|&row| results[row * tau_grid.len() + col].as_ref().ok().map(|(_, b)| ((n_grid[row] / n0).sqrt(), b.clone())))
        .collect();
    let blobs = blob_mean_trajectory(&chosen)?;
    let mut bt = Table::new(&["n_bar", "amplitude", "tau_int", "mean_g_i", "mean_g_q", "mean_e_i", "mean_e_q", "sigma", "separation"]);
    for (&row, b) in rows.iter().zip(&blobs) {
        bt.row(cells![
            n_grid[row],
            b.amplitude,
            tau_grid[col],
            b.mean_g.re,
            b.mean_g.im,
            b.mean_e.re,
            b.mean_e.im,
            b.sigma,
            b.separation()
        ]);
    }
    out.add("blob_means.csv", bt.into_bytes());

    // Optimal photon number, each allowed its best integration time.
    let (mut best_n, mut best_err) = (f64::NAN, f64::INFINITY);
    for (&row, &(f, _)) in &best {
        if 1.0 - f < best_err {
            best_err = 1.0 - f;
            best_n = n_grid[row];
        }
    }
    out.metric("optimal_n_bar", best_n);
    out.metric("min_total_error", best_err);
    out.metric("warnings", out.warnings as f64);
    if svg {
        let mut err_series = Vec::new();
        for (j, &t) in tau_grid.iter().enumerate() {
            let pts: Vec<(f64, f64)> = n_grid
                .iter()
                .enumerate()
                .filter_map(|(row, &n)| results[row * tau_grid.len() + j].as_ref().ok().map(|(r, _)| (n, 1.0 - r.fidelity)))
                .collect();
            err_series.push(Series::new(format!("1-F, tau {t:.3e} s"), pts));
        }
        out.add("error_vs_nbar.svg", plot("Readout error vs photon number", "n_bar", "1 - F", &err_series, Style::Line, true).into_bytes());
        let g: Vec<(f64, f64)> = blobs.iter().map(|b| (b.mean_g.re, b.mean_g.im)).collect();
        let e: Vec<(f64, f64)> = blobs.iter().map(|b| (b.mean_e.re, b.mean_e.im)).collect();
        out.add(
            "blob_means.svg",
            plot("Blob means vs amplitude", "I", "Q", &[Series::new("g", g), Series::new("e", e)], Style::Line, false).into_bytes(),
        );
    }
    out.summary.details = json!({ "amplifier": amp, "n_bar": n_grid, "tau_int": tau_grid, "targets": targets });
    Ok(())
}

fn time_sweep(cfg: &ScenarioConfig, amp: Amplifier, tau_grid: &[f64], svg: bool, out: &mut Outputs) -> Result<(), CliError> {
    let noise = cfg.noise_for(amp);
    let results: Vec<Result<FidelityReport, CliError>> = tau_grid
        .par_iter()
        .map(|&t| Ok(analyze_single_shot(&ge_batch(cfg, &cfg.readout.with_tau_int(t), &noise)?)?))
        .collect();
    let mut table = Table::new(&["tau_int", "F", "eps_snr", "eps_prep_mix", "snr"]);
    let mut pts = Vec::new();
    for (&t, r) in tau_grid.iter().zip(&results) {
        match r {
            Ok(r) => {
                table.row(cells![t, r.fidelity, r.eps_snr, r.eps_prep_mix, r.snr]);
                pts.push((t, r.eps_snr));
            }
            Err(e) => {
                eprintln!("warning: tau_int {t}: {e}");
                out.warnings += 1;
                table.row(cells![t, f64::NAN, f64::NAN, f64::NAN, f64::NAN]);
            }
        }
    }
    out.add("time_sweep.csv", table.into_bytes());
    if svg {
        out.add(
            "eps_vs_tau.svg",
            plot("Overlap error vs integration time", "tau_int (s)", "eps_snr", &[Series::new("eps_snr", pts.clone())], Style::Line, true)
                .into_bytes(),
        );
    }
    for (name, target) in [("tau_eps_0.5pct", 0.005), ("tau_eps_0.1pct", 0.001)] {
        out.metric(name, time_to_threshold(&pts, target)?.tau().unwrap_or(f64::NAN));
    }
    out.metric("warnings", out.warnings as f64);
    out.summary.details = json!({ "amplifier": amp, "n_bar": cfg.readout.n_bar });
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn backaction(
    cfg: &ScenarioConfig,
    prepared: LevelLabel,
    a_grid: &[f64],
    tau_grid: &[f64],
    n_traj: usize,
    svg: bool,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let cavity = &cfg.device.cavity;
    let mut long = Table::new(&["a_r", "n_bar_leak", "tau_leak", "signal"]);
    let mut fits = Table::new(&["a_r", "n_bar_leak", "decay_rate", "asymptote", "final_signal"]);
    let mut series = Vec::new();
    for &a in a_grid {
        let curve = backaction_experiment(prepared, a, tau_grid, &cfg.rates, cavity, &cfg.readout, n_traj, cfg.seed)?;
        for (t, s) in curve.tau_leak.iter().zip(&curve.signal) {
            long.row(cells![a, curve.n_bar_leak, *t, *s]);
        }
        let last = *curve.signal.last().expect("nonempty grid");
        let (rate, asym) = match fit_exponential_decay(&curve.tau_leak, &curve.signal) {
            Ok(f) => (f.params[1], f.params[2]),
            Err(e) => {
                eprintln!("warning: a_r {a}: {e}");
                out.warnings += 1;
                (f64::NAN, f64::NAN)
            }
        };
        fits.row(cells![a, curve.n_bar_leak, rate, asym, last]);
        out.metric(&format!("decay_rate_a{a}"), rate);
        out.metric(&format!("final_signal_a{a}"), last);
        series.push(Series::new(format!("a_r = {a}"), curve.tau_leak.iter().copied().zip(curve.signal.iter().copied()).collect()));
    }
    out.add("backaction.csv", long.into_bytes());
    out.add("backaction_fits.csv", fits.into_bytes());
    if svg {
        out.add("backaction.svg", plot("Relaxation under resonator photons", "tau_leak (s)", "signal", &series, Style::Line, false).into_bytes());
    }
    out.summary.details = json!({ "prepared": prepared, "n_traj": n_traj, "readout_n_bar": cfg.readout.n_bar });
    Ok(())
}

fn ckp(
    cfg: &ScenarioConfig,
    qubit_freq: f64,
    n_bar_peak: f64,
    grid: &fluxshot_core::shots::CkpGrid,
    svg: bool,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let cavity = &cfg.device.cavity;
    let resonance = cavity.omega_r + cavity.chi_of(LevelLabel::G)? * 1e-3;
    let eps = cavity.drive_for_photons(n_bar_peak, resonance, LevelLabel::G)?;
    let map_g = ckp_map(cavity, qubit_freq, eps, grid, LevelLabel::G)?;
    let map_e = ckp_map(cavity, qubit_freq, eps, grid, LevelLabel::E)?;
    let fit = fit_ckp(&map_g, &map_e)?;
    let mut long = Table::new(&["prepared", "resonator_freq", "qubit_freq", "signal"]);
    let mut ridge = Table::new(&["prepared", "resonator_freq", "qubit_freq"]);
    let mut series = Vec::new();
    for map in [&map_g, &map_e] {
        for (fr, col) in map.resonator_freqs.iter().zip(&map.values) {
            for (fq, v) in map.qubit_freqs.iter().zip(col) {
                long.row(cells![map.prepared.to_string(), *fr, *fq, *v]);
            }
        }
        let pts = ridge_points(map)?;
        for &(fr, fq) in &pts {
            ridge.row(cells![map.prepared.to_string(), fr, fq]);
        }
        series.push(Series::new(format!("prepared {}", map.prepared), pts));
    }
    out.add("ckp_map.csv", long.into_bytes());
    out.add("ckp_ridge.csv", ridge.into_bytes());
    out.add_json("ckp_fit.json", &fit);
    if svg {
        out.add("ckp_ridge.svg", plot("Stark-shifted qubit frequency", "resonator drive (GHz)", "qubit (GHz)", &series, Style::Scatter, false).into_bytes());
    }
    out.metric("chi_ge_mhz", fit.chi_ge);
    out.metric("n_bar_peak", fit.n_bar_peak);
    out.summary.details = json!({ "drive_amp": eps, "n_bar_peak_true": n_bar_peak, "qubit_freq": qubit_freq });
    Ok(())
}

fn qubit_frequency(cfg: &ScenarioConfig) -> Result<f64, CliError> {
    match cfg.rates.thermal {
        Some(anchor) => Ok(anchor.qubit_freq),
        None => Ok(diagonalize(&cfg.device.fluxonium, 40)?.transition(0, 1)),
    }
}

fn reset_run(
    cfg: &ScenarioConfig,
    reset: &fluxshot_core::dynamics::ResetConfig,
    p_e_initial: Option<f64>,
    points: usize,
    svg: bool,
    out: &mut Outputs,
) -> Result<(), CliError> {
    let f_q = qubit_frequency(cfg)?;
    let p0 = match (p_e_initial, cfg.rates.thermal) {
        (Some(p), _) => p,
        (None, Some(anchor)) => thermal_population(anchor.qubit_freq, anchor.temperature)?,
        (None, None) => unreachable!("checked by validation"),
    };
    let residual = reset_simulate(p0, reset)?;
    let trace = reset_trace(p0, reset, points)?;
    let mut table = Table::new(&["time", "p_e0", "p_g1", "p_g0"]);
    for (t, p) in &trace {
        table.row(cells![*t, p[0], p[1], p[2]]);
    }
    out.add("reset_trace.csv", table.into_bytes());
    if svg {
        let s = |k: usize, name: &str| Series::new(name, trace.iter().map(|(t, p)| (*t, p[k])).collect());
        out.add("reset.svg", plot("Sideband reset", "time (s)", "population", &[s(0, "|e,0>"), s(1, "|g,1>"), s(2, "|g,0>")], Style::Line, false).into_bytes());
    }
    let t_eff = |p: f64| effective_temperature(p, f_q).map(|t| t * 1e3).unwrap_or(f64::NAN);
    out.metric("p_e_initial", p0);
    out.metric("p_e_residual", residual);
    out.metric("t_eff_initial_mk", t_eff(p0));
    out.metric("t_eff_residual_mk", t_eff(residual));
    out.metric("steady_residual", reset.steady_residual());
    out.summary.details = json!({ "qubit_freq": f_q, "reset": reset });
    Ok(())
}

fn efficiency(cfg: &ScenarioConfig, amp: Amplifier, n_grid: &[f64], svg: bool, out: &mut Outputs) -> Result<(), CliError> {
    let noise = cfg.noise_for(amp);
    let cavity = &cfg.device.cavity;
    let snrs: Vec<Result<f64, CliError>> = n_grid
        .par_iter()
        .map(|&n| {
            // Heralded preparation: swaps would shrink the mean separation.
            let readout = ReadoutConfig { prep_error: 0.0, ..cfg.readout.with_n_bar(n) };
            Ok(moment_snr(&ge_batch(cfg, &readout, &noise)?)?)
        })
        .collect();
    let mut table = Table::new(&["n_bar", "sqrt_n_bar", "snr", "snr_model"]);
    let mut pts = Vec::new();
    for (&n, s) in n_grid.iter().zip(snrs) {
        let s = s?;
        let model = fluxshot_core::shots::expected_snr(n, cavity, &cfg.readout, &noise)?;
        table.row(cells![n, n.sqrt(), s, model]);
        pts.push((n.sqrt(), s));
    }
    let fit = efficiency_fit(&pts, cavity, &cfg.readout)?;
    out.add("efficiency_points.csv", table.into_bytes());
    out.add_json("efficiency_fit.json", &fit);
    if svg {
        out.add("snr_vs_sqrt_nbar.svg", plot("SNR vs sqrt(n_bar)", "sqrt(n_bar)", "SNR", &[Series::new("simulated", pts)], Style::Line, false).into_bytes());
    }
    out.metric("n_n", fit.n_n);
    out.metric("eta", fit.eta);
    out.metric("t_n_eff_k", fit.t_n_eff);
    out.metric("r_squared", fit.r_squared);
    out.summary.details = json!({ "amplifier": amp, "n_n_injected": noise.n_n, "tau_int": cfg.readout.tau_int });
    Ok(())
}

/// Same pipeline as `single_shot`/`qnd` at one grid point, for sweeps.
pub fn point_report(cfg: &ScenarioConfig) -> Result<FidelityReport, CliError> {
    match &cfg.experiment {
        Experiment::SingleShot { amplifier, .. } => {
            let batch = ge_batch(cfg, &cfg.readout, &cfg.noise_for(*amplifier))?;
            Ok(analyze_single_shot(&batch)?)
        }
        Experiment::Qnd { amplifier, gap, .. } => Ok(simulate_qnd(cfg, &cfg.noise_for(*amplifier), *gap)?.report),
        other => Err(CliError::Validation(format!(
            "sweeps need a single_shot or qnd experiment, found {}",
            other.name()
        ))),
    }
}
