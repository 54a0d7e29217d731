use std::fmt::Write as _;

use anyhow::Result;
use hamrep::code::{self, ErrorFamily};
use hamrep::fock::MatrixDump;
use hamrep::rate::{self, RegionOptions, SeparationPolicy, RATE_FLOOR};
use hamrep::{loss, repeater, FockBasis, RateContext, SegmentModel, VERSION};
use serde::Serialize;

use crate::args::{
    ChainSimulate, ChannelCompare, CodesValidate, GlobalArgs, Kind, RateCurve, RepeaterBuild,
    ScanRegion, Task,
};
use crate::config::load_code;

pub const DEFAULT_SEED: u64 = 20_190_101;
const STINESPRING_TOL: f64 = 1e-10;
const LINDBLAD_TOL: f64 = 1e-6;
const KL_TOL: f64 = 1e-10;
const REPEATER_TOL: f64 = 1e-12;

/// Rendered output and whether its numeric checks passed.
pub struct Output {
    pub body: String,
    pub pass: bool,
}

#[derive(Serialize)]
struct Envelope<'a, R: Serialize> {
    tool: &'static str,
    version: &'static str,
    params: &'a Task,
    seed: Option<u64>,
    tolerance: Option<f64>,
    pass: bool,
    report: R,
}

fn json<R: Serialize>(
    task: &Task,
    seed: Option<u64>,
    tolerance: Option<f64>,
    pass: bool,
    report: R,
) -> Result<Output> {
    let env = Envelope {
        tool: "hamrep",
        version: VERSION,
        params: task,
        seed,
        tolerance,
        pass,
        report,
    };
    let mut body = serde_json::to_string_pretty(&env)?;
    body.push('\n');
    Ok(Output { body, pass })
}

fn csv_preamble(task: &Task) -> Result<String> {
    Ok(format!(
        "# hamrep {VERSION} {}\n",
        serde_json::to_string(task)?
    ))
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| "none".to_string(), |x| x.to_string())
}

pub fn run(task: &Task, global: &GlobalArgs) -> Result<Output> {
    match task {
        Task::ChannelCompare(a) => channel_compare(task, a, global),
        Task::CodesValidate(a) => codes_validate(task, a, global),
        Task::RepeaterBuild(a) => repeater_build(task, a, global),
        Task::ScanRegion(a) => scan_region(task, a, global),
        Task::RateCurve(a) => rate_curve(task, a),
        Task::ChainSimulate(a) => chain_simulate(task, a),
    }
}

#[derive(Serialize)]
struct ChannelReport {
    #[serde(flatten)]
    residuals: loss::EquivalenceReport,
    lindblad_tolerance: f64,
}

fn channel_compare(task: &Task, a: &ChannelCompare, global: &GlobalArgs) -> Result<Output> {
    let seed = global.seed.unwrap_or(DEFAULT_SEED);
    let tol = global.tol.unwrap_or(STINESPRING_TOL);
    let basis = FockBasis::new(a.modes, a.cutoff)?;
    let report = loss::representation_equivalence_report(basis, a.eta, a.states, seed)?;
    let pass = report.kraus_vs_stinespring <= tol && report.kraus_vs_lindblad <= LINDBLAD_TOL;
    let report = ChannelReport {
        residuals: report,
        lindblad_tolerance: LINDBLAD_TOL,
    };
    json(task, Some(seed), Some(tol), pass, report)
}

fn codes_validate(task: &Task, a: &CodesValidate, global: &GlobalArgs) -> Result<Output> {
    let tol = global.tol.unwrap_or(KL_TOL);
    let code = load_code(&a.code)?;
    let errors = ErrorFamily::new(code.basis(), a.eta)?;
    let report = code::kl_check(&code, &errors, a.include_no_loss, tol)?;
    json(task, None, Some(tol), report.pass, report)
}

#[derive(Serialize)]
struct RepeaterOutput {
    #[serde(flatten)]
    report: repeater::RepeaterReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    hamiltonian: Option<MatrixDump>,
    #[serde(skip_serializing_if = "Option::is_none")]
    unitary: Option<MatrixDump>,
}

fn repeater_build(task: &Task, a: &RepeaterBuild, global: &GlobalArgs) -> Result<Output> {
    let seed = global.seed.unwrap_or(DEFAULT_SEED);
    let tol = global.tol.unwrap_or(REPEATER_TOL);
    let code = load_code(&a.code)?;
    let spec = match a.kind {
        Kind::Direct => repeater::build_direct(&code, a.ancilla_k)?,
        Kind::Swap => repeater::build_swap(&code)?,
    };
    let report = spec.report(a.trials, seed, tol)?;
    let pass = report.pass;
    let dump =
        |m| MatrixDump::from_matrix(spec.system_basis(), Some(spec.ancilla().dimension()), m);
    let out = RepeaterOutput {
        report,
        hamiltonian: a.dump.then(|| dump(spec.hamiltonian())),
        unitary: a.dump.then(|| dump(spec.unitary())),
    };
    json(task, Some(seed), Some(tol), pass, out)
}

fn scan_region(task: &Task, a: &ScanRegion, global: &GlobalArgs) -> Result<Output> {
    let code = load_code(&a.code)?;
    let options = RegionOptions {
        jobs: global.jobs,
        max_segments: a.max_segments,
        rate_floor: RATE_FLOOR,
    };
    let r = rate::region_scan(&code, a.eta_c, a.sep, a.alpha, &options)?;
    let mut body = csv_preamble(task)?;
    body.push_str("eta_c,L_km,beats,boundary\n");
    let etas = r.eta_values();
    for (li, l) in r.separation_values().into_iter().enumerate() {
        for (ei, e) in etas.iter().enumerate() {
            writeln!(
                body,
                "{e},{l},{},{}",
                u8::from(r.beats_at(ei, li)),
                u8::from(r.is_boundary(ei, li))
            )?;
        }
    }
    let criterion = if r.asymptotic {
        "asymptotic"
    } else {
        "finite-distance"
    };
    writeln!(body, "# criterion={criterion}")?;
    writeln!(body, "# monotone={}", r.monotone)?;
    writeln!(
        body,
        "# max_tolerable_coupling_loss={}",
        opt(r.max_tolerable_coupling_loss)
    )?;
    writeln!(
        body,
        "# optimal_separation_km={}",
        opt(r.optimal_separation_km)
    )?;
    Ok(Output {
        body,
        pass: r.monotone,
    })
}

fn rate_curve(task: &Task, a: &RateCurve) -> Result<Output> {
    let code = load_code(&a.code)?;
    let policy = match a.sep {
        Some(km) if !a.optimize_sep => SeparationPolicy::Fixed { km },
        _ => SeparationPolicy::Optimized,
    };
    let curve = rate::rate_vs_distance(&code, a.eta_c, a.alpha, a.max_km, policy, !a.total_rate)?;
    let mut body = csv_preamble(task)?;
    body.push_str("x_km,n,L_km,rate_per_mode,plob_bound\n");
    for p in &curve.points {
        writeln!(
            body,
            "{},{},{},{:e},{:e}",
            p.distance_km, p.segments, p.separation_km, p.rate_per_mode, p.bound
        )?;
    }
    writeln!(body, "# separation_km={}", curve.separation_km)?;
    writeln!(
        body,
        "# separation_optimized={}",
        curve.separation_optimized
    )?;
    writeln!(body, "# per_mode={}", curve.per_mode)?;
    writeln!(body, "# crossover_km={}", opt(curve.crossover_km))?;
    Ok(Output { body, pass: true })
}

fn chain_simulate(task: &Task, a: &ChainSimulate) -> Result<Output> {
    let code = load_code(&a.code)?;
    let ctx = RateContext::new(code)?;
    let model = SegmentModel::new(a.eta_c, a.sep, a.alpha)?;
    let samples = ctx.chain_samples(&model, a.segments, !a.total_rate)?;
    let mut body = csv_preamble(task)?;
    body.push_str("n,in_code_weight,six_state_rate,rate_per_mode\n");
    for s in &samples {
        writeln!(
            body,
            "{},{:e},{:e},{:e}",
            s.segments, s.in_code_weight, s.six_state_rate, s.rate_per_mode
        )?;
    }
    writeln!(body, "# per_mode={}", !a.total_rate)?;
    Ok(Output { body, pass: true })
}
