use std::path::PathBuf;
use std::time::Instant;

use rayon::prelude::*;
use serde_json::{json, Value};

use super::config::{BoundaryKind, Command, KernelKind, RunConfig};
use super::output::{write_metadata, write_series, Cell, Schema, SchemaContext};
use crate::dynamics::{
    collapse_curves, landau_zener_probability, locate_sign_change, propagate_ramp,
    run_extended_chain, scaling_fit, tau_star, ExtendedSetup, ObservableSet, RampResult,
    RampSchedule,
};
use crate::model::{Boundary, ChainSpec, IsingHamiltonian};
use crate::statics::{
    breaking_alpha, bubble_crossing_fields, default_h_interval, g0_breaking_field, g0_energy_gap,
    g0_potentials, gap_length_scaling, locate_avoided_crossing, lr_phase_boundaries,
    scan_spectrum, static_potential_curve, CrossingFit, ScanAxis, SpectrumOptions,
};
use crate::{Error, Result};

pub const SPECTRUM: Schema = Schema { file: "spectrum.csv", pattern: "control,E_{0..k-1},m_{0..k-1}" };
pub const CROSSING: Schema = Schema { file: "crossing.csv", pattern: "control,gap" };
pub const GAPSCALING: Schema = Schema { file: "gapscaling.csv", pattern: "ell,h_c,h_c0,gap" };
pub const RAMP: Schema = Schema {
    file: "ramp.csv",
    pattern: "t,control,m_z,mz_site_{1..n},P_{0..k-1}?levels,P_beyond?levels2,C,E,V?potential,P_m",
};
pub const RAMP_BUBBLES: Schema = Schema { file: "ramp_bubbles.csv", pattern: "t,control,r,P_d" };
pub const LZSWEEP: Schema = Schema { file: "lzsweep.csv", pattern: "tau,P_1,P_LZ,P_m,max_beyond" };
pub const BUBBLES: Schema = Schema { file: "bubbles.csv", pattern: "t,control,r,P_d" };
pub const BUBBLE_CROSSINGS: Schema = Schema { file: "bubble_crossings.csv", pattern: "r,h_c" };
pub const SCALING: Schema = Schema { file: "scaling.csv", pattern: "tau,h_sb,crossings" };
pub const COLLAPSE: Schema = Schema { file: "collapse.csv", pattern: "tau,x,m_z" };
pub const LRPHASE: Schema = Schema { file: "lrphase.csv", pattern: "alpha,ell_c" };
pub const BREAKING_ALPHA: Schema = Schema { file: "breaking_alpha.csv", pattern: "ell,alpha" };
pub const LRPOTENTIAL: Schema = Schema { file: "lrpotential.csv", pattern: "ell,V_0,V_1,m_0,m_1" };
pub const G0: Schema = Schema { file: "g0.csv", pattern: "ell,dE,h_c?exp,V_s?exp,V_bs?exp" };
pub const EXTENDED_STATIC: Schema = Schema { file: "extended_static.csv", pattern: "t,control,m_z,mz_site_{1..n}" };
pub const EXTENDED_DYNAMICAL: Schema = Schema {
    file: "extended_dynamical.csv",
    pattern: "t,control,m_z,mz_site_{1..n}",
};

/// CSV files written by `command`. In the patterns `n` is the number of
/// dynamical spins and `k` the number of levels.
pub fn schemas(command: Command) -> &'static [Schema] {
    match command {
        Command::Spectrum => &[SPECTRUM],
        Command::Crossing => &[CROSSING],
        Command::GapScaling => &[GAPSCALING],
        Command::Ramp => &[RAMP, RAMP_BUBBLES],
        Command::LzSweep => &[LZSWEEP],
        Command::Bubbles => &[BUBBLES, BUBBLE_CROSSINGS],
        Command::Scaling => &[SCALING, COLLAPSE],
        Command::LrPhase => &[LRPHASE, BREAKING_ALPHA],
        Command::LrPotential => &[LRPOTENTIAL],
        Command::G0 => &[G0],
        Command::Extended => &[EXTENDED_STATIC, EXTENDED_DYNAMICAL],
    }
}

/// Files written and the results block of the metadata.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub files: Vec<PathBuf>,
    pub results: Value,
}

/// Thread count from the config, else `STRINGBREAK_THREADS`, else 0 (all cores).
pub fn resolve_threads(cfg: &RunConfig) -> Result<usize> {
    if cfg.threads > 0 {
        return Ok(cfg.threads);
    }
    match std::env::var("STRINGBREAK_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::config("STRINGBREAK_THREADS", format!("cannot parse `{v}` as a thread count"))),
        Err(_) => Ok(0),
    }
}

/// Runs one experiment in a dedicated thread pool and writes its artifacts.
pub fn run_command(cfg: &RunConfig) -> Result<RunReport> {
    cfg.validate()?;
    let threads = resolve_threads(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Resource(e.to_string()))?;
    let start = Instant::now();
    let mut report = pool.install(|| dispatch(cfg))?;
    let meta = write_metadata(&cfg.output, cfg, start.elapsed().as_secs_f64(), report.results.clone())?;
    report.files.insert(0, meta);
    Ok(report)
}

fn dispatch(cfg: &RunConfig) -> Result<RunReport> {
    match cfg.command {
        Command::Spectrum => spectrum(cfg),
        Command::Crossing => crossing(cfg),
        Command::GapScaling => gapscaling(cfg),
        Command::Ramp => ramp(cfg),
        Command::LzSweep => lzsweep(cfg),
        Command::Bubbles => bubbles(cfg),
        Command::Scaling => scaling(cfg),
        Command::LrPhase => lrphase(cfg),
        Command::LrPotential => lrpotential(cfg),
        Command::G0 => g0(cfg),
        Command::Extended => extended(cfg),
    }
}

fn scan_interval(cfg: &RunConfig, chain: &ChainSpec) -> Result<(f64, f64)> {
    let default = match cfg.scan {
        ScanAxis::H => match (cfg.kernel, &chain.boundary) {
            (KernelKind::Exponential, Boundary::StaticExternal) => {
                let h0 = g0_breaking_field(chain)?;
                (0.0, 2.0 * h0)
            }
            _ => (0.0, 1.0),
        },
        ScanAxis::G => (0.0, 2.0),
    };
    Ok((cfg.scan_min.unwrap_or(default.0), cfg.scan_max.unwrap_or(default.1)))
}

fn crossing_interval(cfg: &RunConfig, chain: &ChainSpec) -> Result<(f64, f64)> {
    let default = match cfg.scan {
        ScanAxis::H => default_h_interval(&chain.with_static_boundary())?,
        ScanAxis::G => (0.05, 2.0),
    };
    Ok((cfg.scan_min.unwrap_or(default.0), cfg.scan_max.unwrap_or(default.1)))
}

fn fit_json(fit: &CrossingFit) -> Value {
    json!({
        "control_c": fit.control_c,
        "gap_c": fit.gap_c,
        "slope": fit.slope,
        "residual": fit.residual,
        "min_control": fit.min_control,
        "min_gap": fit.min_gap,
        "window": [fit.window.0, fit.window.1],
        "tau_star": tau_star(fit.gap_c, fit.slope).ok(),
    })
}

fn spectrum(cfg: &RunConfig) -> Result<RunReport> {
    let chain = cfg.chain()?;
    let op = IsingHamiltonian::for_chain(&chain, cfg.h, cfg.g)?;
    let k = cfg.levels.min(op.dim());
    if k == 0 {
        return Err(Error::config("levels", "spectrum needs at least one level"));
    }
    let (lo, hi) = scan_interval(cfg, &chain)?;
    let controls: Vec<f64> = (0..cfg.points)
        .map(|i| lo + (hi - lo) * i as f64 / (cfg.points - 1) as f64)
        .collect();
    let opts = SpectrumOptions {
        lanczos: cfg.lanczos(),
        ..SpectrumOptions::default()
    };
    let slices = scan_spectrum(&op, cfg.scan, &controls, k, false, &opts)?;
    let rows: Vec<Vec<Cell>> = slices
        .iter()
        .map(|s| {
            let mut r = vec![Cell::F(s.control)];
            r.extend(s.energies.iter().map(|&e| Cell::F(e)));
            r.extend(s.magnetizations.iter().map(|&m| Cell::F(m)));
            r
        })
        .collect();
    let worst = slices.iter().flat_map(|s| s.residuals.iter().copied()).fold(0.0, f64::max);
    let file = write_series(&cfg.output, &SPECTRUM, &SchemaContext::new(op.n_spins(), k), &rows)?;
    Ok(RunReport {
        files: vec![file],
        results: json!({ "levels": k, "interval": [lo, hi], "max_residual": worst }),
    })
}

fn crossing(cfg: &RunConfig) -> Result<RunReport> {
    let chain = cfg.chain()?;
    let op = IsingHamiltonian::for_chain(&chain, cfg.h, cfg.g)?;
    let interval = crossing_interval(cfg, &chain)?;
    let fit = locate_avoided_crossing(&op, cfg.scan, interval, &cfg.crossing_options())?;
    let rows: Vec<Vec<Cell>> = fit.samples.iter().map(|&(x, g)| vec![x.into(), g.into()]).collect();
    let file = write_series(&cfg.output, &CROSSING, &SchemaContext::default(), &rows)?;
    let mut results = fit_json(&fit);
    results["interval"] = json!([interval.0, interval.1]);
    Ok(RunReport { files: vec![file], results })
}

fn gapscaling(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.kernel != KernelKind::Exponential || cfg.boundary != BoundaryKind::Static {
        return Err(Error::config("kernel", "gapscaling needs kernel=exp with static boundaries"));
    }
    let kernel = cfg.kernel_spec()?;
    let scaling = gap_length_scaling(kernel, cfg.g, &cfg.ells, &cfg.crossing_options())?;
    let rows = scaling
        .points
        .iter()
        .map(|&(ell, hc, gap)| {
            let h0 = g0_breaking_field(&ChainSpec::static_chain(ell, kernel)?)?;
            Ok(vec![ell.into(), hc.into(), h0.into(), gap.into()])
        })
        .collect::<Result<Vec<_>>>()?;
    let file = write_series(&cfg.output, &GAPSCALING, &SchemaContext::default(), &rows)?;
    Ok(RunReport {
        files: vec![file],
        results: json!({
            "base": scaling.base,
            "prefactor": scaling.prefactor,
            "rms": scaling.rms,
            "excluded": scaling.excluded,
        }),
    })
}

fn schedule(cfg: &RunConfig, tau: f64, default_final: f64) -> Result<RampSchedule> {
    RampSchedule::new(cfg.scan, tau, cfg.final_control.unwrap_or(default_final), cfg.samples)
}

fn ramp_rows(r: &RampResult) -> Vec<Vec<Cell>> {
    r.samples
        .iter()
        .map(|s| {
            let mut row = vec![Cell::F(s.t), Cell::F(s.control), Cell::F(s.m_z)];
            row.extend(s.profile.iter().map(|&x| Cell::F(x)));
            row.extend(s.populations.iter().map(|&x| Cell::F(x)));
            if let Some(b) = s.beyond_two {
                row.push(b.into());
            }
            row.push(s.correlator.into());
            row.push(s.energy.into());
            if let Some(v) = s.potential {
                row.push(v.into());
            }
            row.push(Cell::F(s.p_m.unwrap_or(f64::NAN)));
            row
        })
        .collect()
}

fn bubble_rows(r: &RampResult) -> Vec<Vec<Cell>> {
    r.samples
        .iter()
        .flat_map(|s| {
            s.bubbles
                .iter()
                .enumerate()
                .map(|(size, &p)| vec![Cell::F(s.t), Cell::F(s.control), size.into(), p.into()])
                .collect::<Vec<_>>()
        })
        .collect()
}

fn sign_change_json(r: &RampResult) -> Value {
    match locate_sign_change(r) {
        Ok(s) => json!({ "h_sb": s.first, "all": s.all }),
        Err(_) => Value::Null,
    }
}

fn ramp(cfg: &RunConfig) -> Result<RunReport> {
    let chain = cfg.chain()?;
    let op = IsingHamiltonian::for_chain(&chain, cfg.h, cfg.g)?;
    let obs = cfg.observables();
    let result = propagate_ramp(&op, &schedule(cfg, cfg.tau, 1.0)?, &cfg.propagator(), &obs, None)?;
    let k = obs.levels.min(op.dim());
    let ctx = SchemaContext::new(op.n_spins(), k)
        .flag("levels", k > 0)
        .flag("levels2", k >= 2)
        .flag("potential", obs.potential);
    let mut files = vec![write_series(&cfg.output, &RAMP, &ctx, &ramp_rows(&result))?];
    if obs.bubbles {
        files.push(write_series(&cfg.output, &RAMP_BUBBLES, &ctx, &bubble_rows(&result))?);
    }
    let last = result.samples.last().expect("at least two samples");
    let max_beyond = result.samples.iter().filter_map(|s| s.beyond_two).fold(0.0, f64::max);
    Ok(RunReport {
        files,
        results: json!({
            "sign_change": sign_change_json(&result),
            "final_m_z": last.m_z,
            "final_populations": last.populations,
            "max_beyond_two": max_beyond,
            "max_norm_drift": result.samples.iter().map(|s| s.norm_drift).fold(0.0, f64::max),
        }),
    })
}

/// Final `P_1`, `P_m` and the largest `1 - P_0 - P_1` of one ramp.
fn lz_point(op: &IsingHamiltonian, cfg: &RunConfig, tau: f64, h_f: f64) -> Result<(f64, f64, f64)> {
    let obs = ObservableSet {
        levels: cfg.levels.max(2),
        ..ObservableSet::minimal()
    };
    let s = RampSchedule::new(ScanAxis::H, tau, h_f, cfg.samples)?;
    let r = propagate_ramp(op, &s, &cfg.propagator(), &obs, None)?;
    let last = r.samples.last().expect("at least two samples");
    let max_beyond = r.samples.iter().filter_map(|s| s.beyond_two).fold(0.0, f64::max);
    Ok((last.populations[1], last.p_m.unwrap_or(f64::NAN), max_beyond))
}

fn lzsweep(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.scan != ScanAxis::H {
        return Err(Error::config("scan", "lzsweep ramps h"));
    }
    let chain = cfg.chain()?;
    let op = IsingHamiltonian::for_chain(&chain, 0.0, cfg.g)?;
    let fit = locate_avoided_crossing(&op, ScanAxis::H, crossing_interval(cfg, &chain)?, &cfg.crossing_options())?;
    let h_f = cfg.final_control.unwrap_or(2.0 * fit.control_c);
    let points = cfg
        .taus
        .par_iter()
        .map(|&tau| {
            let (p1, pm, beyond) = lz_point(&op, cfg, tau, h_f)?;
            Ok((tau, p1, landau_zener_probability(fit.gap_c, fit.slope, tau)?, pm, beyond))
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<Vec<Cell>> = points
        .iter()
        .map(|&(t, p1, plz, pm, b)| vec![t.into(), p1.into(), plz.into(), pm.into(), b.into()])
        .collect();
    let file = write_series(&cfg.output, &LZSWEEP, &SchemaContext::default(), &rows)?;
    let max_dev = points.iter().map(|p| (p.1 - p.2).abs()).fold(0.0, f64::max);
    let max_beyond = points.iter().map(|p| p.4).fold(0.0, f64::max);
    Ok(RunReport {
        files: vec![file],
        results: json!({
            "crossing": fit_json(&fit),
            "final_control": h_f,
            "max_abs_p1_minus_plz": max_dev,
            "max_beyond_two": max_beyond,
        }),
    })
}

fn bubbles(cfg: &RunConfig) -> Result<RunReport> {
    let chain = cfg.chain()?;
    let op = IsingHamiltonian::for_chain(&chain, cfg.h, cfg.g)?;
    let obs = ObservableSet {
        bubbles: true,
        ..cfg.observables()
    };
    let result = propagate_ramp(&op, &schedule(cfg, cfg.tau, 1.0)?, &cfg.propagator(), &obs, None)?;
    let mut files = vec![write_series(&cfg.output, &BUBBLES, &SchemaContext::default(), &bubble_rows(&result))?];
    let mut crossings = Value::Null;
    if cfg.kernel == KernelKind::Exponential && cfg.boundary == BoundaryKind::Static {
        let table = bubble_crossing_fields(&chain)?;
        let rows: Vec<Vec<Cell>> = table.iter().map(|b| vec![b.r.into(), b.h_c.into()]).collect();
        files.push(write_series(&cfg.output, &BUBBLE_CROSSINGS, &SchemaContext::default(), &rows)?);
        crossings = json!(table);
    }
    let last = result.samples.last().expect("at least two samples");
    let mode = last
        .bubbles
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .map(|(r, _)| r);
    Ok(RunReport {
        files,
        results: json!({
            "sign_change": sign_change_json(&result),
            "final_mode": mode,
            "final_distribution": last.bubbles,
            "bubble_crossings": crossings,
        }),
    })
}

fn scaling(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.scan != ScanAxis::H {
        return Err(Error::config("scan", "scaling ramps h"));
    }
    let chain = cfg.chain()?;
    let op = IsingHamiltonian::for_chain(&chain, 0.0, cfg.g)?;
    let fit = locate_avoided_crossing(&op, ScanAxis::H, crossing_interval(cfg, &chain)?, &cfg.crossing_options())?;
    let h_c = fit.control_c;
    let runs = cfg
        .taus
        .par_iter()
        .map(|&tau| {
            let s = schedule(cfg, tau, 1.0)?;
            propagate_ramp(&op, &s, &cfg.propagator(), &ObservableSet::minimal(), None).map(|r| (tau, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut pairs = Vec::new();
    let mut missing = Vec::new();
    let mut rows = Vec::new();
    for (tau, r) in &runs {
        match locate_sign_change(r) {
            Ok(s) => {
                pairs.push((*tau, s.first));
                rows.push(vec![Cell::F(*tau), Cell::F(s.first), s.all.len().into()]);
            }
            Err(_) => {
                missing.push(*tau);
                rows.push(vec![Cell::F(*tau), Cell::F(f64::NAN), 0usize.into()]);
            }
        }
    }
    let mut files = vec![write_series(&cfg.output, &SCALING, &SchemaContext::default(), &rows)?];
    let fit_result = scaling_fit(&pairs, h_c);
    let fit_value = match &fit_result {
        Ok(f) => {
            let refs: Vec<(f64, &RampResult)> = runs.iter().map(|(t, r)| (*t, r)).collect();
            let curves = collapse_curves(&refs, h_c, f.exponent);
            let rows: Vec<Vec<Cell>> = curves
                .iter()
                .flat_map(|c| c.points.iter().map(|&(x, m)| vec![c.tau.into(), x.into(), m.into()]).collect::<Vec<_>>())
                .collect();
            files.push(write_series(&cfg.output, &COLLAPSE, &SchemaContext::default(), &rows)?);
            json!(f)
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(RunReport {
        files,
        results: json!({
            "h_c": h_c,
            "crossing": fit_json(&fit),
            "fit": fit_value,
            "no_sign_change": missing,
        }),
    })
}

fn lrphase(cfg: &RunConfig) -> Result<RunReport> {
    let phase = lr_phase_boundaries(&cfg.alphas, cfg.ell_max)?;
    let rows: Vec<Vec<Cell>> = phase
        .lc_table
        .iter()
        .map(|(a, lc)| vec![Cell::F(*a), Cell::S(lc.to_string())])
        .collect();
    let mut files = vec![write_series(&cfg.output, &LRPHASE, &SchemaContext::default(), &rows)?];
    let rows = cfg
        .ells
        .iter()
        .map(|&ell| Ok(vec![ell.into(), breaking_alpha(ell)?.into()]))
        .collect::<Result<Vec<_>>>()?;
    files.push(write_series(&cfg.output, &BREAKING_ALPHA, &SchemaContext::default(), &rows)?);
    Ok(RunReport {
        files,
        results: json!({ "alpha_min": phase.alpha_min, "alpha_max": phase.alpha_max, "lc_table": phase.lc_table }),
    })
}

fn lrpotential(cfg: &RunConfig) -> Result<RunReport> {
    let curve = static_potential_curve(cfg.kernel_spec()?, cfg.g, cfg.h, &cfg.ells)?;
    let rows: Vec<Vec<Cell>> = curve
        .points
        .iter()
        .map(|p| vec![p.ell.into(), p.v_ground.into(), p.v_first.into(), p.m_ground.into(), p.m_first.into()])
        .collect();
    let file = write_series(&cfg.output, &LRPOTENTIAL, &SchemaContext::default(), &rows)?;
    Ok(RunReport {
        files: vec![file],
        results: json!({ "ell_c": curve.ell_c }),
    })
}

fn g0(cfg: &RunConfig) -> Result<RunReport> {
    let exp = cfg.kernel == KernelKind::Exponential;
    let kernel = cfg.kernel_spec()?;
    let rows = cfg
        .ells
        .iter()
        .map(|&ell| {
            let chain = ChainSpec::static_chain(ell, kernel)?;
            let mut row = vec![ell.into(), g0_energy_gap(&chain, cfg.h)?.into()];
            if exp {
                let h_c = g0_breaking_field(&chain).unwrap_or(f64::NAN);
                let (vs, vbs) = g0_potentials(&chain, cfg.h)?;
                row.extend([h_c.into(), vs.into(), vbs.into()]);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let ctx = SchemaContext::default().flag("exp", exp);
    let file = write_series(&cfg.output, &G0, &ctx, &rows)?;
    Ok(RunReport {
        files: vec![file],
        results: json!({ "lengths": cfg.ells.len() }),
    })
}

fn profile_rows(r: &RampResult) -> Vec<Vec<Cell>> {
    r.samples
        .iter()
        .map(|s| {
            let mut row = vec![Cell::F(s.t), Cell::F(s.control), Cell::F(s.m_z)];
            row.extend(s.profile.iter().map(|&x| Cell::F(x)));
            row
        })
        .collect()
}

fn extended(cfg: &RunConfig) -> Result<RunReport> {
    if cfg.kernel != KernelKind::Exponential {
        return Err(Error::config("kernel", "the boundary comparison uses kernel=exp"));
    }
    let setup = ExtendedSetup {
        ell: cfg.ell,
        n_ext: cfg.n_ext,
        xi: cfg.xi,
    };
    let s = RampSchedule::new(ScanAxis::H, cfg.tau, cfg.final_control.unwrap_or(1.0), cfg.samples)?;
    let cmp = run_extended_chain(&setup, cfg.g, &s, &cfg.propagator(), &cfg.observables())?;
    let a = write_series(
        &cfg.output,
        &EXTENDED_STATIC,
        &SchemaContext::new(cmp.static_run.chain.n_spins(), 0),
        &profile_rows(&cmp.static_run),
    )?;
    let b = write_series(
        &cfg.output,
        &EXTENDED_DYNAMICAL,
        &SchemaContext::new(cmp.dynamical_run.chain.n_spins(), 0),
        &profile_rows(&cmp.dynamical_run),
    )?;
    Ok(RunReport {
        files: vec![a, b],
        results: json!({
            "max_difference": cmp.max_difference,
            "inner_sites": [cmp.dynamical_run.chain.inner_spins().start + 1, cmp.dynamical_run.chain.inner_spins().end],
        }),
    })
}
