use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{BundleSource, Model, RunConfig, StateParams, StateSource};
use super::output::{sha256_hex, to_json, to_json_compact, write_atomic, Header};
use crate::algebra::bundle::SPIN1_LABELS;
use crate::algebra::{spin1_bundle, verify_bundle, CheckResult, RepresentationBundle, VerifyOptions, VerifyReport};
use crate::error::{Error, Result};
use crate::mbqc::engine::MC_CHUNKS;
use crate::mbqc::teleport::{predicted_post_state, teleport_input};
use crate::mbqc::{enumerate_paths, monte_carlo, teleport_step, BellOutcome, MeasurementPlan, PathSums};
use crate::observables::{self, nu, single_rotation_readout, standard_string_orders, StringOrderResult, StringOrderRow};
use crate::qcore::linalg::{fidelity, C64};
use crate::qcore::spin::Axis;
use crate::qcore::{CVector, StateVector};
use crate::states::{
    build_aklt_prime, build_hamiltonian, ground_state, load_state, save_state, symmetry_residuals, AxisSymmetry, DenseSource,
    HamiltonianParams,
};

/// Seed for the random gate sequences of `verify` when none is configured.
const VERIFY_DEFAULT_SEED: u64 = 2024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    BuildState,
    Run,
    Verify,
    Sweep,
    TeleportDemo,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::BuildState => "build-state",
            Command::Run => "run",
            Command::Verify => "verify",
            Command::Sweep => "sweep",
            Command::TeleportDemo => "teleport-demo",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutcome {
    pub files: Vec<PathBuf>,
    /// Every check the command performed passed.
    pub passed: bool,
    pub summary: String,
}

/// Runs `command`, on a dedicated pool of `config.jobs` workers when set.
pub fn execute(command: Command, config: &RunConfig) -> Result<CommandOutcome> {
    let go = || match command {
        Command::BuildState => cmd_build_state(config),
        Command::Run => cmd_run(config),
        Command::Verify => cmd_verify(config),
        Command::Sweep => cmd_sweep(config),
        Command::TeleportDemo => cmd_teleport_demo(config),
    };
    match config.jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::InvalidParameter(format!("worker pool: {e}")))?
            .install(go),
        None => go(),
    }
}

fn spin1_order() -> Vec<String> {
    SPIN1_LABELS.iter().map(|s| s.to_string()).collect()
}

fn header(config: &RunConfig, seed: Option<u64>, element_order: Vec<String>) -> Header {
    Header::new(seed, config.hash(), element_order)
}

fn key16<T: Serialize>(value: &T) -> Result<String> {
    Ok(sha256_hex(&to_json_compact(&(crate::VERSION, value))?)[..16].to_string())
}

pub fn state_cache_path(out: &Path, params: &StateParams) -> Result<PathBuf> {
    Ok(out.join(format!("state-{}.bin", key16(params)?)))
}

fn middle_site(n_bulk: usize) -> usize {
    n_bulk.div_ceil(2).max(1)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StateMetadata {
    pub params: StateParams,
    pub energy: f64,
    /// `None` when the state was constructed rather than diagonalized.
    pub gap: Option<f64>,
    pub degenerate: bool,
    pub solver: String,
    /// `‖Hψ − Eψ‖`.
    pub eigen_residual: f64,
    pub symmetry: Vec<AxisSymmetry>,
    pub string_orders: Vec<StringOrderResult>,
    pub warnings: Vec<String>,
}

pub fn build_state(params: &StateParams) -> Result<(StateVector, StateMetadata)> {
    let ham = build_hamiltonian(&params.hamiltonian())?;
    let mut warnings = Vec::new();
    if !params.hamiltonian().has_unique_ground_state_couplings() {
        warnings.push("a boundary coupling is zero: the free edge spin makes the ground state degenerate".to_string());
    }
    let (state, energy, gap, residual, solver) = match params.model {
        Model::AkltPrime => {
            let state = build_aklt_prime(params.n_bulk)?;
            let energy = ham.energy(&state)?;
            let h_psi = ham.apply(&state)?;
            let residual = h_psi
                .amplitudes()
                .iter()
                .zip(state.amplitudes())
                .map(|(h, s)| (h - C64::from(energy) * s).norm_sqr())
                .sum::<f64>()
                .sqrt();
            (state, energy, None, residual, "construction".to_string())
        }
        Model::Aklt | Model::Bilinear => {
            let gs = ground_state(&ham)?;
            let solver = serde_json::to_value(gs.solver)?.as_str().unwrap_or("unknown").to_string();
            (gs.state, gs.energy, Some(gs.gap), gs.residual, solver)
        }
    };
    let degenerate = gap.is_some_and(|g| g < crate::tolerances::DEGENERACY_GAP);
    if degenerate {
        warnings.push(format!("ground state is degenerate (gap {:.3e})", gap.unwrap_or(0.0)));
    }
    let src = DenseSource::new(&state)?;
    let string_orders = standard_string_orders(&src, middle_site(params.n_bulk))?;
    let meta = StateMetadata {
        params: params.clone(),
        energy,
        gap,
        degenerate,
        solver,
        eigen_residual: residual,
        symmetry: symmetry_residuals(&state)?,
        string_orders,
        warnings,
    };
    Ok((state, meta))
}

/// Where a command's state came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateOrigin {
    File,
    Cache,
    Built,
}

/// The configured state file, else a `build-state` cache entry in the output directory,
/// else a fresh build.
pub fn obtain_state(config: &RunConfig) -> Result<(StateVector, StateOrigin)> {
    match &config.state {
        StateSource::File { path } => Ok((load_state(path)?, StateOrigin::File)),
        StateSource::Build(params) => {
            let cached = state_cache_path(&config.out, params)?;
            if cached.exists() {
                Ok((load_state(&cached)?, StateOrigin::Cache))
            } else {
                Ok((build_state(params)?.0, StateOrigin::Built))
            }
        }
    }
}

#[derive(Serialize)]
struct BuildRecord<'a> {
    header: Header,
    state_file: String,
    metadata: &'a StateMetadata,
}

fn cmd_build_state(config: &RunConfig) -> Result<CommandOutcome> {
    let StateSource::Build(params) = &config.state else {
        return Err(Error::Precondition("build-state needs builder parameters, not 'state_file'".into()));
    };
    let (state, meta) = build_state(params)?;
    let bin = state_cache_path(&config.out, params)?;
    std::fs::create_dir_all(&config.out)?;
    save_state(&bin, &state)?;
    let json_path = bin.with_extension("json");
    let record = BuildRecord {
        header: header(config, config.seed, spin1_order()),
        state_file: bin.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
        metadata: &meta,
    };
    write_atomic(&json_path, to_json(&record)?.as_bytes())?;
    let gap = meta.gap.map_or("n/a".to_string(), |g| format!("{g:.6e}"));
    let mut summary = format!("state N={} energy {:.12} gap {gap} -> {}", params.n_bulk, meta.energy, bin.display());
    for w in &meta.warnings {
        summary.push_str(&format!("\nwarning: {w}"));
    }
    Ok(CommandOutcome { files: vec![bin, json_path], passed: true, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub header: Header,
    pub state_origin: StateOrigin,
    pub plan: MeasurementPlan,
    pub seed: Option<u64>,
    pub rounds: u64,
    /// Monte Carlo means of `⟨⟨σ^x⟩⟩, ⟨⟨σ^y⟩⟩, ⟨⟨σ^z⟩⟩`.
    pub estimates: Option<[f64; 3]>,
    pub stderr: Option<[f64; 3]>,
    pub exact: Option<PathSums>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_omitted: Option<String>,
    pub closed_form: Option<[f64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closed_form_omitted: Option<String>,
    pub checks: Vec<CheckResult>,
}

fn check(condition: &str, residual: f64, tolerance: f64) -> CheckResult {
    CheckResult { condition: condition.into(), residual: Some(residual), tolerance, pass: residual <= tolerance, error: None }
}

fn max_abs_diff(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The single adaptive z-rotation with an x-measured boundary qubit, if that is the plan.
fn single_z_rotation(plan: &MeasurementPlan) -> Option<(usize, f64)> {
    match plan.rotation_sites().as_slice() {
        &[k] => {
            let site = plan.site(k);
            (site.axis == Axis::Z && site.adaptive && plan.site0_axis == Axis::X).then_some((k, site.angle))
        }
        [] if plan.site0_axis == Axis::X => Some((1, 0.0)),
        _ => None,
    }
}

pub fn run_protocol(config: &RunConfig, state: &StateVector, origin: StateOrigin) -> Result<RunRecord> {
    let plan = config.plan.clone().ok_or_else(|| Error::Precondition("run needs a plan ('plan' or 'plan.*' keys)".into()))?;
    let n = state.chain_spec()?.n_bulk();
    if plan.n_bulk() != n {
        return Err(Error::DimensionMismatch(format!("plan has {} bulk sites, state has {n}", plan.n_bulk())));
    }
    let tol = config.tolerances;
    let mut checks = Vec::new();

    let (exact, exact_omitted) = match enumerate_paths(state, &plan) {
        Ok(sums) => (Some(sums), None),
        Err(e @ Error::BudgetExceeded { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e),
    };
    if let Some(sums) = &exact {
        checks.push(check("path_probabilities_sum_to_one", (sums.total_probability - 1.0).abs(), tol.exact));
    }

    let (closed_form, closed_form_omitted) = match single_z_rotation(&plan) {
        Some((k, phi)) => (Some(single_rotation_readout(&DenseSource::new(state)?, k, phi)?), None),
        None => (None, Some("closed form covers a single adaptive z-rotation with site0 = x".to_string())),
    };
    if let (Some(sums), Some(cf)) = (&exact, &closed_form) {
        checks.push(check("exact_matches_closed_form", max_abs_diff(&sums.expectations, cf), tol.exact));
    }

    let (mut estimates, mut stderr) = (None, None);
    if config.rounds > 0 {
        let seed = config.require_seed("run")?;
        let mut means = [0.0; 3];
        let mut errs = [0.0; 3];
        for axis in Axis::ALL {
            let readout_plan = plan.clone().with_readout(axis);
            let est = monte_carlo(state, &readout_plan, config.rounds, seed, axis.index() as u64 * MC_CHUNKS)?;
            means[axis.index()] = est.mean;
            errs[axis.index()] = est.stderr;
        }
        if let Some(reference) = exact.as_ref().map(|s| s.expectations).or(closed_form) {
            for axis in Axis::ALL {
                let i = axis.index();
                let diff = (means[i] - reference[i]).abs();
                // With zero spread the estimate is deterministic and must agree exactly.
                let allowed = if errs[i] > 0.0 { tol.sigmas * errs[i] } else { tol.exact };
                checks.push(check(&format!("monte_carlo_{axis}_within_bound"), diff, allowed));
            }
        }
        estimates = Some(means);
        stderr = Some(errs);
    }

    Ok(RunRecord {
        header: header(config, config.seed, spin1_order()),
        state_origin: origin,
        plan,
        seed: config.seed,
        rounds: config.rounds,
        estimates,
        stderr,
        exact,
        exact_omitted,
        closed_form,
        closed_form_omitted,
        checks,
    })
}

fn cmd_run(config: &RunConfig) -> Result<CommandOutcome> {
    let (state, origin) = obtain_state(config)?;
    let record = run_protocol(config, &state, origin)?;
    let path = config.out.join("run.json");
    write_atomic(&path, to_json(&record)?.as_bytes())?;
    let passed = record.checks.iter().all(|c| c.pass);
    let fmt3 = |v: &[f64; 3]| format!("({:+.10}, {:+.10}, {:+.10})", v[0], v[1], v[2]);
    let mut summary = String::new();
    if let Some(e) = &record.exact {
        summary.push_str(&format!("exact        {}\n", fmt3(&e.expectations)));
    }
    if let Some(c) = &record.closed_form {
        summary.push_str(&format!("closed form  {}\n", fmt3(c)));
    }
    if let (Some(m), Some(s)) = (&record.estimates, &record.stderr) {
        summary.push_str(&format!("monte carlo  {} +- {}\n", fmt3(m), fmt3(s)));
    }
    summary.push_str(&format!("{} checks, {}", record.checks.len(), if passed { "all pass" } else { "FAILURES" }));
    Ok(CommandOutcome { files: vec![path], passed, summary })
}

#[derive(Serialize)]
struct VerifyRecord<'a> {
    header: Header,
    all_pass: bool,
    report: &'a VerifyReport,
}

pub fn load_bundle(config: &RunConfig, n_bulk: usize) -> Result<RepresentationBundle> {
    match &config.bundle {
        BundleSource::Spin1 => spin1_bundle(n_bulk),
        BundleSource::File { path } => RepresentationBundle::load(path),
    }
}

fn cmd_verify(config: &RunConfig) -> Result<CommandOutcome> {
    let (state, _) = obtain_state(config)?;
    let bundle = load_bundle(config, state.chain_spec()?.n_bulk())?;
    let seed = config.seed.unwrap_or(VERIFY_DEFAULT_SEED);
    let options = VerifyOptions { gates: None, random_sequences: config.verify_sequences, seed };
    let report = verify_bundle(&bundle, &state, &options)?;
    let record = VerifyRecord { header: header(config, Some(seed), report.element_order.clone()), all_pass: report.all_pass(), report: &report };
    let path = config.out.join("verify.json");
    write_atomic(&path, to_json(&record)?.as_bytes())?;
    let mut summary = String::new();
    for c in &report.checks {
        let residual = c.residual.map_or_else(|| c.error.clone().unwrap_or_default(), |r| format!("{r:.3e}"));
        summary.push_str(&format!("{} {:42} {residual}\n", if c.pass { "pass" } else { "FAIL" }, c.condition));
    }
    for s in &report.skipped {
        summary.push_str(&format!("skip {s}\n"));
    }
    summary.push_str(&format!("{} of {} checks pass", report.checks.len() - report.failures().len(), report.checks.len()));
    Ok(CommandOutcome { files: vec![path], passed: report.all_pass(), summary })
}

/// One computed grid point, cached as JSON so reruns reproduce identical CSV text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub theta: f64,
    pub d_x: f64,
    pub d_z: f64,
    pub energy: f64,
    pub gap: f64,
    pub degenerate: bool,
    /// CSV rows without header.
    pub rows: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepFailure {
    pub theta: f64,
    pub d_x: f64,
    pub d_z: f64,
    pub error: String,
}

#[derive(Serialize)]
struct SweepRecord<'a> {
    header: Header,
    n_bulk: usize,
    k: usize,
    phi: f64,
    points: Vec<&'a SweepPoint>,
    failures: Vec<SweepFailure>,
}

/// Row text of the renormalized angle `ν_z φ` in the string-order CSV layout.
fn angle_row(theta: f64, d_x: f64, d_z: f64, n: usize, k: usize, value: f64) -> String {
    let f = observables::format_f64;
    format!("{},{},{},{n},{k},{},z,angle,{}", f(theta), f(d_x), f(d_z), n + 1, f(value))
}

pub fn sweep_point(params: &HamiltonianParams, k: usize, phi: f64) -> Result<SweepPoint> {
    let (theta, n) = (params.theta(), params.n_bulk);
    let gs = ground_state(&build_hamiltonian(params)?)?;
    let src = DenseSource::new(&gs.state)?;
    let mut rows = String::new();
    for result in standard_string_orders(&src, k)? {
        let row = StringOrderRow { theta, d_x: params.d_x, d_z: params.d_z, n_bulk: n, result };
        rows.push_str(&row.to_csv());
        rows.push('\n');
    }
    rows.push_str(&angle_row(theta, params.d_x, params.d_z, n, k, nu(&src, k, Axis::Z)? * phi));
    rows.push('\n');
    Ok(SweepPoint {
        theta,
        d_x: params.d_x,
        d_z: params.d_z,
        energy: gs.energy,
        gap: gs.gap,
        degenerate: gs.is_degenerate(),
        rows,
    })
}

fn cmd_sweep(config: &RunConfig) -> Result<CommandOutcome> {
    let StateSource::Build(base) = &config.state else {
        return Err(Error::Precondition("sweep builds its own states; remove 'state_file'".into()));
    };
    let grid = &config.sweep;
    let n = base.n_bulk;
    let k = grid.k.unwrap_or_else(|| middle_site(n));
    if k == 0 || k > n {
        return Err(Error::InvalidParameter(format!("sweep.k = {k} outside 1..={n}")));
    }
    let cache = grid.cache.clone().unwrap_or_else(|| config.out.join("sweep-cache"));
    std::fs::create_dir_all(&cache)?;

    let mut points = Vec::new();
    for &theta in &grid.theta {
        for &d_x in &grid.d_x {
            for &d_z in &grid.d_z {
                points.push(HamiltonianParams::bilinear(n, theta).with_anisotropy(d_x, d_z).with_boundary(base.j_left, base.j_right));
            }
        }
    }
    let results: Vec<(HamiltonianParams, Result<(SweepPoint, bool)>)> = points
        .into_par_iter()
        .map(|p| {
            let outcome = (|| {
                let file = cache.join(format!("{}.json", key16(&(p, k, grid.phi))?));
                if let Ok(text) = std::fs::read_to_string(&file) {
                    if let Ok(point) = serde_json::from_str::<SweepPoint>(&text) {
                        return Ok((point, true));
                    }
                }
                let point = sweep_point(&p, k, grid.phi)?;
                write_atomic(&file, to_json(&point)?.as_bytes())?;
                Ok((point, false))
            })();
            (p, outcome)
        })
        .collect();

    let header = header(config, config.seed, spin1_order());
    let mut csv = header.csv_preamble();
    csv.push_str(observables::CSV_HEADER);
    csv.push('\n');
    let (mut ok, mut failures, mut reused) = (Vec::new(), Vec::new(), 0usize);
    for (p, r) in &results {
        match r {
            Ok((point, from_cache)) => {
                csv.push_str(&point.rows);
                reused += usize::from(*from_cache);
                ok.push(point);
            }
            Err(e) => failures.push(SweepFailure { theta: p.theta(), d_x: p.d_x, d_z: p.d_z, error: e.to_string() }),
        }
    }
    let csv_path = config.out.join("sweep.csv");
    write_atomic(&csv_path, csv.as_bytes())?;
    let json_path = config.out.join("sweep.json");
    let summary = format!("{} points ({} from cache), {} failed -> {}", ok.len(), reused, failures.len(), csv_path.display());
    let passed = failures.is_empty();
    let record = SweepRecord { header, n_bulk: n, k, phi: grid.phi, points: ok, failures };
    write_atomic(&json_path, to_json(&record)?.as_bytes())?;
    Ok(CommandOutcome { files: vec![csv_path, json_path], passed, summary })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TeleportRow {
    pub theta: f64,
    /// Smallest `Σ_outcomes p · F(predicted, simulated)` over the inputs.
    pub min_weighted_fidelity: f64,
    /// Largest `|Σ_outcomes p − 1|` over the inputs.
    pub max_probability_error: f64,
    /// Outcome probabilities for the first input.
    pub first_input_probabilities: Vec<(BellOutcome, f64)>,
}

#[derive(Serialize)]
struct TeleportRecord<'a> {
    header: Header,
    axis: Axis,
    inputs: usize,
    rows: &'a [TeleportRow],
    checks: Vec<CheckResult>,
}

fn random_qubit<R: Rng>(rng: &mut R) -> CVector {
    let mut c = || C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
    CVector::from_column_slice(&[c(), c()]).normalize()
}

pub fn teleport_table(axis: Axis, thetas: &[f64], inputs: usize, seed: u64) -> Result<Vec<TeleportRow>> {
    let mut rng = crate::rng::stream(seed, 0);
    let psis: Vec<CVector> = (0..inputs.max(1)).map(|_| random_qubit(&mut rng)).collect();
    thetas
        .iter()
        .map(|&theta| {
            let mut row = TeleportRow {
                theta,
                min_weighted_fidelity: f64::INFINITY,
                max_probability_error: 0.0,
                first_input_probabilities: Vec::new(),
            };
            for (i, psi) in psis.iter().enumerate() {
                let branches = teleport_step(&teleport_input(psi), axis, theta)?;
                let total: f64 = branches.iter().map(|b| b.probability).sum();
                let weighted: f64 = branches
                    .iter()
                    .filter(|b| b.probability > 0.0)
                    .map(|b| b.probability * fidelity(&b.post_state, &predicted_post_state(psi, b.outcome, axis, theta)))
                    .sum();
                row.min_weighted_fidelity = row.min_weighted_fidelity.min(weighted);
                row.max_probability_error = row.max_probability_error.max((total - 1.0).abs());
                if i == 0 {
                    row.first_input_probabilities = branches.iter().map(|b| (b.outcome, b.probability)).collect();
                }
            }
            Ok(row)
        })
        .collect()
}

fn cmd_teleport_demo(config: &RunConfig) -> Result<CommandOutcome> {
    let seed = config.require_seed("teleport-demo")?;
    let spec = &config.teleport;
    let rows = teleport_table(spec.axis, &spec.theta, spec.inputs, seed)?;
    let worst_fidelity = rows.iter().map(|r| 1.0 - r.min_weighted_fidelity).fold(0.0, f64::max);
    let worst_probability = rows.iter().map(|r| r.max_probability_error).fold(0.0, f64::max);
    let checks = vec![
        check("weighted_fidelity_is_one", worst_fidelity, config.tolerances.exact),
        check("outcome_probabilities_sum_to_one", worst_probability, config.tolerances.exact),
    ];
    let passed = checks.iter().all(|c| c.pass);
    let record = TeleportRecord { header: header(config, Some(seed), spin1_order()), axis: spec.axis, inputs: spec.inputs, rows: &rows, checks };
    let path = config.out.join("teleport.json");
    write_atomic(&path, to_json(&record)?.as_bytes())?;
    let summary = format!(
        "{} angles x {} inputs about {}: worst 1 - weighted fidelity {worst_fidelity:.3e}",
        rows.len(),
        spec.inputs,
        spec.axis
    );
    Ok(CommandOutcome { files: vec![path], passed, summary })
}
