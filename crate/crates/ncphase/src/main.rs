//! Command-line front end: loads a scenario JSON, runs one of the phase
//! space analyses, and emits a deterministic CSV report.
//!
//! Exit codes: 0 success (or a confirmed `--verify` pass), 1 I/O or parse
//! failure, 2 validation failure or verify mismatch, 3 physics-negative
//! verdict (not quantum, or entangled).

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use ncphase::algebra::{build_omega, OmegaLayout, PhaseSpaceForm};
use ncphase::bell::{
    bell_chsh, bell_optimize, compare_bell_trajectories, AmplitudePolicy, WignerEvaluator,
};
use ncphase::criteria::{
    kinematic_entanglement_scan, ppt_separability_check, rsup_check, SeparabilityLabel,
};
use ncphase::darboux::build_general_s;
use ncphase::error::NcError;
use ncphase::gaussian::{to_nc_picture, GaussianState, Picture};
use ncphase::ordering::ModePartition;
use ncphase::scenario::{Assembled, Scenario};

#[derive(Parser)]
#[command(
    name = "ncphase",
    version,
    about = "Gaussian-state analyses on noncommutative phase space"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Robertson-Schrodinger quantumness verdict for the scenario state
    CheckQuantum(Common),
    /// Positive-partial-transpose separability verdict across the partition
    CheckSeparable(Common),
    /// Sweep (theta, eta) and report the separability margin at each point
    KinematicScan(Scan),
    /// CHSH value from displaced-parity Wigner samples
    Bell(Common),
    /// Commutative vs noncommutative Bell trajectories under one Hamiltonian
    EvolveCompare(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario JSON file
    #[arg(long)]
    scenario: PathBuf,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Recompute and confirm an existing --out report instead of writing it
    #[arg(long)]
    verify: bool,
}

#[derive(Args)]
struct Scan {
    #[command(flatten)]
    common: Common,
    /// Theta axis as A:B:N (N evenly spaced points from A to B)
    #[arg(long, value_name = "A:B:N")]
    theta_range: Option<String>,
    /// Eta axis as A:B:N
    #[arg(long, value_name = "A:B:N")]
    eta_range: Option<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn io(message: String) -> Self {
        Failure { code: 1, message }
    }
    fn validation(message: String) -> Self {
        Failure { code: 2, message }
    }
}

impl From<NcError> for Failure {
    fn from(e: NcError) -> Self {
        Failure::validation(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("ncphase: {}", f.message);
            f.code
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> Result<i32, Failure> {
    match thread_pool()? {
        Some(pool) => pool.install(|| dispatch(cli)),
        None => dispatch(cli),
    }
}

/// NCPHASE_MAX_THREADS caps the worker count for grid scans and trajectory
/// rows. Unset means the default pool; anything that is not a positive
/// integer is a validation failure.
fn thread_pool() -> Result<Option<rayon::ThreadPool>, Failure> {
    let raw = match std::env::var("NCPHASE_MAX_THREADS") {
        Err(std::env::VarError::NotPresent) => return Ok(None),
        Err(e) => {
            return Err(Failure::validation(format!("NCPHASE_MAX_THREADS: {e}")));
        }
        Ok(raw) => raw,
    };
    let n: usize = raw.trim().parse().map_err(|_| {
        Failure::validation(format!(
            "NCPHASE_MAX_THREADS: expected a positive integer, got {raw:?}"
        ))
    })?;
    if n == 0 {
        return Err(Failure::validation(
            "NCPHASE_MAX_THREADS: must be at least 1".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| Failure::validation(format!("NCPHASE_MAX_THREADS: {e}")))?;
    Ok(Some(pool))
}

fn dispatch(cli: &Cli) -> Result<i32, Failure> {
    match &cli.command {
        Cmd::CheckQuantum(c) => finish(c, "check-quantum", Vec::new(), gen_check_quantum),
        Cmd::CheckSeparable(c) => finish(c, "check-separable", Vec::new(), gen_check_separable),
        Cmd::KinematicScan(s) => {
            let theta_spec = s.theta_range.as_deref().unwrap_or("0:0.5:11");
            let eta_spec = s.eta_range.as_deref().unwrap_or("0:0.5:11");
            let theta_grid = parse_range(theta_spec, "--theta-range")?;
            let eta_grid = parse_range(eta_spec, "--eta-range")?;
            let extra = vec![
                format!("# theta-range: {theta_spec}"),
                format!("# eta-range: {eta_spec}"),
            ];
            finish(&s.common, "kinematic-scan", extra, |asm| {
                gen_scan(asm, &theta_grid, &eta_grid)
            })
        }
        Cmd::Bell(c) => finish(c, "bell", Vec::new(), gen_bell),
        Cmd::EvolveCompare(c) => finish(c, "evolve-compare", Vec::new(), gen_evolve_compare),
    }
}

fn finish<F>(common: &Common, name: &str, extra: Vec<String>, gen: F) -> Result<i32, Failure>
where
    F: FnOnce(&Assembled) -> Result<(Vec<String>, bool), Failure>,
{
    let asm = load_scenario(&common.scenario)?;
    let (body, negative) = gen(&asm)?;
    let mut lines = metadata(name, &common.scenario, &extra);
    lines.extend(body);
    if common.verify {
        verify_against(&lines, common.out.as_deref())
    } else {
        emit(&lines, common.out.as_deref())?;
        Ok(if negative { 3 } else { 0 })
    }
}

fn load_scenario(path: &Path) -> Result<Assembled, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let scenario = Scenario::from_json_str(&text)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let violations = scenario.validate();
    if !violations.is_empty() {
        let mut msg = String::from("scenario validation failed");
        for v in &violations {
            msg.push_str("\n  ");
            msg.push_str(v);
        }
        return Err(Failure::validation(msg));
    }
    Ok(scenario.assemble()?)
}

fn metadata(command: &str, scenario: &Path, extra: &[String]) -> Vec<String> {
    let name = scenario
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| scenario.display().to_string());
    let mut lines = vec![
        format!("# ncphase {}", env!("CARGO_PKG_VERSION")),
        format!("# command: {command}"),
        format!("# scenario: {name}"),
    ];
    lines.extend(extra.iter().cloned());
    lines
}

fn ff(x: f64) -> String {
    format!("{x:.16e}")
}

/// State/form pair for the whole-system tests: the full-layout deformed
/// form, with commutative constructor data transported to the
/// noncommutative picture whenever the scenario carries deformation.
fn quantum_context(asm: &Assembled) -> Result<(GaussianState, PhaseSpaceForm), Failure> {
    let full = ModePartition::new(asm.params.n_modes, 0)?;
    let omega = build_omega(&asm.params, &full, OmegaLayout::Full)?;
    let state = asm.state.convert_ordering(omega.ordering)?;
    let state = if asm.deformed && state.picture == Picture::Commutative {
        let map = build_general_s(&omega, asm.hbar)?;
        to_nc_picture(&state, &map)?
    } else {
        state
    };
    Ok((state, omega))
}

fn gen_check_quantum(asm: &Assembled) -> Result<(Vec<String>, bool), Failure> {
    let (state, form) = quantum_context(asm)?;
    let verdict = rsup_check(&state, &form)?;
    let lines = vec![
        "picture,form,passes,min_eigenvalue".into(),
        format!(
            "{},{},{},{}",
            state.picture.as_str(),
            form.role.as_str(),
            verdict.passes,
            ff(verdict.min_eigenvalue)
        ),
    ];
    Ok((lines, !verdict.passes))
}

fn require_bipartite(asm: &Assembled, what: &str) -> Result<(), Failure> {
    if asm.partition.n_b == 0 {
        return Err(Failure::validation(format!(
            "partition: {what} needs two nonempty parties, got [{}, {}]",
            asm.partition.n_a, asm.partition.n_b
        )));
    }
    Ok(())
}

fn gen_check_separable(asm: &Assembled) -> Result<(Vec<String>, bool), Failure> {
    require_bipartite(asm, "check-separable")?;
    let omega = build_omega(&asm.params, &asm.partition, OmegaLayout::Bipartite)?;
    let state = asm.state.convert_ordering(omega.ordering)?;
    let state = if asm.deformed && state.picture == Picture::Commutative {
        let map = build_general_s(&omega, asm.hbar)?;
        to_nc_picture(&state, &map)?
    } else {
        state
    };
    let verdict = ppt_separability_check(&state, &omega, &asm.partition)?;
    let lines = vec![
        "picture,form,passes,min_eigenvalue,label".into(),
        format!(
            "{},{},{},{},{}",
            state.picture.as_str(),
            omega.role.as_str(),
            verdict.psd.passes,
            ff(verdict.psd.min_eigenvalue),
            verdict.label.as_str()
        ),
    ];
    Ok((lines, verdict.label == SeparabilityLabel::Entangled))
}

fn gen_scan(
    asm: &Assembled,
    theta_grid: &[f64],
    eta_grid: &[f64],
) -> Result<(Vec<String>, bool), Failure> {
    require_bipartite(asm, "kinematic-scan")?;
    if asm.deformed {
        return Err(Failure::validation(
            "theta/eta: kinematic-scan takes the deformation grid from \
             --theta-range and --eta-range; set scenario theta and eta to 0"
                .into(),
        ));
    }
    let records = kinematic_entanglement_scan(&asm.state, theta_grid, eta_grid, &asm.partition)?;
    let mut lines = vec!["theta,eta,margin,entangled".into()];
    for r in &records {
        lines.push(format!(
            "{},{},{},{}",
            ff(r.theta),
            ff(r.eta),
            ff(r.margin),
            r.entangled
        ));
    }
    Ok((lines, false))
}

fn gen_bell(asm: &Assembled) -> Result<(Vec<String>, bool), Failure> {
    if asm.params.n_modes != 2 {
        return Err(Failure::validation(format!(
            "modes: bell needs exactly 2 modes, got {}",
            asm.params.n_modes
        )));
    }
    let (state, form) = quantum_context(asm)?;
    let (eval, budget_exhausted) = match asm.amplitudes {
        Some((a1, a2)) => {
            let evaluator = WignerEvaluator::new(&state)?;
            (bell_chsh(&evaluator, a1, a2)?, false)
        }
        None => {
            let opt = bell_optimize(&state, &form, &asm.search)?;
            (opt.eval, opt.budget_exhausted)
        }
    };
    let lines = vec![
        "alpha1_re,alpha1_im,alpha2_re,alpha2_im,w_00,w_a1_0,w_0_a2,w_a1_a2,bell_value,nonlocal,budget_exhausted"
            .into(),
        format!(
            "{},{},{},{},{},{},{},{},{},{},{}",
            ff(eval.alpha1.re),
            ff(eval.alpha1.im),
            ff(eval.alpha2.re),
            ff(eval.alpha2.im),
            ff(eval.w_samples[0]),
            ff(eval.w_samples[1]),
            ff(eval.w_samples[2]),
            ff(eval.w_samples[3]),
            ff(eval.bell_value),
            eval.nonlocal,
            budget_exhausted
        ),
    ];
    Ok((lines, false))
}

fn gen_evolve_compare(asm: &Assembled) -> Result<(Vec<String>, bool), Failure> {
    if asm.params.n_modes != 2 {
        return Err(Failure::validation(format!(
            "modes: evolve-compare needs exactly 2 modes, got {}",
            asm.params.n_modes
        )));
    }
    let Some(h) = &asm.hamiltonian else {
        return Err(Failure::validation(
            "hamiltonian: required by evolve-compare".into(),
        ));
    };
    if asm.times.is_empty() {
        return Err(Failure::validation(
            "times: evolve-compare needs a nonempty list of times".into(),
        ));
    }
    if asm.reoptimize && asm.amplitudes.is_some() {
        return Err(Failure::validation(
            "amplitude_policy: \"reoptimize\" conflicts with fixed bell.amplitudes".into(),
        ));
    }
    let full = ModePartition::new(asm.params.n_modes, 0)?;
    let omega = build_omega(&asm.params, &full, OmegaLayout::Full)?;
    let policy = if asm.reoptimize {
        AmplitudePolicy::ReoptimizePerStep
    } else {
        AmplitudePolicy::Fixed(asm.amplitudes)
    };
    let rows = compare_bell_trajectories(&asm.state, h, &omega, &asm.times, policy, &asm.search)?;
    let mut lines = vec!["t,bell_c,bell_nc,delta,nonlocal_c,nonlocal_nc".into()];
    for r in &rows {
        lines.push(format!(
            "{},{},{},{},{},{}",
            ff(r.t),
            ff(r.bell_c),
            ff(r.bell_nc),
            ff(r.delta),
            r.nonlocal_c,
            r.nonlocal_nc
        ));
    }
    Ok((lines, false))
}

fn parse_range(spec: &str, flag: &str) -> Result<Vec<f64>, Failure> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 {
        return Err(Failure::validation(format!(
            "{flag}: expected A:B:N, got {spec:?}"
        )));
    }
    let a: f64 = parts[0]
        .parse()
        .map_err(|_| Failure::validation(format!("{flag}: bad start value {:?}", parts[0])))?;
    let b: f64 = parts[1]
        .parse()
        .map_err(|_| Failure::validation(format!("{flag}: bad end value {:?}", parts[1])))?;
    let n: usize = parts[2]
        .parse()
        .map_err(|_| Failure::validation(format!("{flag}: bad point count {:?}", parts[2])))?;
    if !a.is_finite() || !b.is_finite() {
        return Err(Failure::validation(format!(
            "{flag}: endpoints must be finite"
        )));
    }
    if n == 0 {
        return Err(Failure::validation(format!("{flag}: empty grid (N = 0)")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect())
}

fn emit(lines: &[String], out: Option<&Path>) -> Result<(), Failure> {
    let mut text = lines.join("\n");
    text.push('\n');
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| Failure::io(format!("{}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Confirm a previously written report against a fresh recomputation.
/// Numeric fields are compared to a 1e-12 relative tolerance so that a
/// report produced by a formatting-compatible build still verifies; any
/// other difference is a mismatch (exit 2).
fn verify_against(lines: &[String], out: Option<&Path>) -> Result<i32, Failure> {
    let Some(path) = out else {
        return Err(Failure::validation(
            "--verify needs --out pointing at a previously written report".into(),
        ));
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
    let existing: Vec<&str> = text.lines().collect();
    if existing.len() != lines.len() {
        return Err(Failure::validation(format!(
            "verify: {} has {} lines, recomputation has {}",
            path.display(),
            existing.len(),
            lines.len()
        )));
    }
    for (i, (have, want)) in existing.iter().zip(lines.iter()).enumerate() {
        if let Err(why) = compare_line(have, want) {
            return Err(Failure::validation(format!(
                "verify: {} line {} does not match the recomputation: {why}",
                path.display(),
                i + 1
            )));
        }
    }
    println!(
        "verified: {} lines of {} confirmed against recomputation",
        lines.len(),
        path.display()
    );
    Ok(0)
}

fn compare_line(have: &str, want: &str) -> Result<(), String> {
    if have == want {
        return Ok(());
    }
    let hf: Vec<&str> = have.split(',').collect();
    let wf: Vec<&str> = want.split(',').collect();
    if hf.len() != wf.len() {
        return Err(format!(
            "field count {} vs recomputed {}",
            hf.len(),
            wf.len()
        ));
    }
    for (h, w) in hf.iter().zip(wf.iter()) {
        if h == w {
            continue;
        }
        match (h.parse::<f64>(), w.parse::<f64>()) {
            (Ok(a), Ok(b)) if (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0) => {}
            _ => return Err(format!("{h:?} vs recomputed {w:?}")),
        }
    }
    Ok(())
}
