//! Scenario files: the JSON surface consumed by the command-line tool.
//!
//! Validation is two-stage: `validate` walks the raw fields and reports
//! every violation at once with a field path, then `assemble` builds the
//! typed objects (which re-enforce their own invariants).

use nalgebra::{Complex, DMatrix, DVector};
use serde::Deserialize;

use crate::algebra::{max_abs, planar_stack_skew, NCParameters};
use crate::bell::SearchSpec;
use crate::dynamics::QuadraticHamiltonian;
use crate::error::{NcError, Result};
use crate::gaussian::{make_thermal, make_two_mode_squeezed, make_vacuum, GaussianState, Picture};
use crate::ordering::{CoordOrdering, ModePartition};

fn default_hbar() -> f64 {
    1.0
}

/// Sector deformation given either as the planar shorthand scalar or as a
/// full skew matrix over the configuration indices.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Deformation {
    Scalar(f64),
    Matrix(Vec<Vec<f64>>),
}

impl Default for Deformation {
    fn default() -> Self {
        Deformation::Scalar(0.0)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StateSpec {
    Vacuum,
    Thermal {
        occupations: Vec<f64>,
    },
    TwoModeSqueezed {
        r: f64,
    },
    Explicit {
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
        picture: String,
        ordering: String,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HamiltonianSpec {
    pub g: Vec<Vec<f64>>,
    #[serde(default)]
    pub linear: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchInput {
    #[serde(default = "default_grid_points")]
    pub grid_points: usize,
    #[serde(default = "default_bound")]
    pub bound: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    #[serde(default = "default_step_tolerance")]
    pub step_tolerance: f64,
}

fn default_grid_points() -> usize {
    SearchSpec::default().grid_points
}
fn default_bound() -> f64 {
    SearchSpec::default().bound
}
fn default_max_iterations() -> usize {
    SearchSpec::default().max_iterations
}
fn default_step_tolerance() -> f64 {
    SearchSpec::default().step_tolerance
}

impl Default for SearchInput {
    fn default() -> Self {
        SearchInput {
            grid_points: default_grid_points(),
            bound: default_bound(),
            max_iterations: default_max_iterations(),
            step_tolerance: default_step_tolerance(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BellSpec {
    #[serde(default)]
    pub amplitudes: Option<[[f64; 2]; 2]>,
    #[serde(default)]
    pub search: Option<SearchInput>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    pub modes: usize,
    pub partition: [usize; 2],
    #[serde(default)]
    pub theta: Deformation,
    #[serde(default)]
    pub eta: Deformation,
    pub state: StateSpec,
    #[serde(default)]
    pub hamiltonian: Option<HamiltonianSpec>,
    #[serde(default)]
    pub bell: Option<BellSpec>,
    #[serde(default)]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub amplitude_policy: Option<String>,
}

impl Scenario {
    pub fn from_json_str(text: &str) -> std::result::Result<Scenario, serde_json::Error> {
        serde_json::from_str(text)
    }

    /// Collect every validation violation with its field path. Empty means
    /// the scenario is internally consistent and `assemble` may run.
    pub fn validate(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !(self.hbar.is_finite() && self.hbar > 0.0) {
            v.push(format!(
                "hbar: must be a positive finite real, got {}",
                self.hbar
            ));
        }
        if self.modes == 0 {
            v.push("modes: must be at least 1".into());
        }
        if self.partition[0] == 0 {
            v.push("partition: n_A must be at least 1".into());
        }
        if self.partition[0] + self.partition[1] != self.modes {
            v.push(format!(
                "partition: n_A + n_B = {} does not match modes = {}",
                self.partition[0] + self.partition[1],
                self.modes
            ));
        }
        check_deformation(&mut v, "theta", &self.theta, self.modes);
        check_deformation(&mut v, "eta", &self.eta, self.modes);
        self.validate_state(&mut v);
        if let Some(h) = &self.hamiltonian {
            check_matrix(&mut v, "hamiltonian.g", &h.g, 2 * self.modes);
            if let Some(m) = to_matrix(&h.g) {
                let dev = max_abs(&(&m - m.transpose()));
                if dev > 1e-12 {
                    v.push(format!(
                        "hamiltonian.g: must be symmetric, deviation {dev:.3e}"
                    ));
                }
            }
            if let Some(lin) = &h.linear {
                if lin.len() != 2 * self.modes {
                    v.push(format!(
                        "hamiltonian.linear: expected length {}, got {}",
                        2 * self.modes,
                        lin.len()
                    ));
                }
                if lin.iter().any(|x| !x.is_finite()) {
                    v.push("hamiltonian.linear: entries must be finite".into());
                }
            }
        }
        if let Some(b) = &self.bell {
            if let Some(a) = &b.amplitudes {
                if a.iter().flatten().any(|x| !x.is_finite()) {
                    v.push("bell.amplitudes: entries must be finite".into());
                }
            }
            if let Some(s) = &b.search {
                if s.grid_points < 2 {
                    v.push("bell.search.grid_points: need at least 2 points per axis".into());
                }
                if !(s.bound.is_finite() && s.bound > 0.0) {
                    v.push("bell.search.bound: must be a positive finite real".into());
                }
                if s.max_iterations == 0 {
                    v.push("bell.search.max_iterations: must be at least 1".into());
                }
                if !(s.step_tolerance.is_finite() && s.step_tolerance > 0.0) {
                    v.push("bell.search.step_tolerance: must be a positive finite real".into());
                }
            }
        }
        if let Some(times) = &self.times {
            if times.iter().any(|t| !t.is_finite()) {
                v.push("times: entries must be finite".into());
            }
        }
        if let Some(p) = &self.amplitude_policy {
            if p != "fixed" && p != "reoptimize" {
                v.push(format!(
                    "amplitude_policy: expected \"fixed\" or \"reoptimize\", got \"{p}\""
                ));
            }
        }
        v
    }

    fn validate_state(&self, v: &mut Vec<String>) {
        match &self.state {
            StateSpec::Vacuum => {}
            StateSpec::Thermal { occupations } => {
                if occupations.len() != self.modes {
                    v.push(format!(
                        "state.occupations: expected {} entries, got {}",
                        self.modes,
                        occupations.len()
                    ));
                }
                for (i, &o) in occupations.iter().enumerate() {
                    if !(o.is_finite() && o >= 0.0) {
                        v.push(format!(
                            "state.occupations[{i}]: must be a nonnegative finite real, got {o}"
                        ));
                    }
                }
            }
            StateSpec::TwoModeSqueezed { r } => {
                if self.modes != 2 {
                    v.push(format!(
                        "state: two_mode_squeezed needs modes = 2, got {}",
                        self.modes
                    ));
                }
                if !r.is_finite() {
                    v.push("state.r: must be finite".into());
                }
            }
            StateSpec::Explicit {
                mean,
                cov,
                picture,
                ordering,
            } => {
                let dim = 2 * self.modes;
                if mean.len() != dim {
                    v.push(format!(
                        "state.mean: expected length {dim}, got {}",
                        mean.len()
                    ));
                }
                if mean.iter().any(|x| !x.is_finite()) {
                    v.push("state.mean: entries must be finite".into());
                }
                check_matrix(v, "state.cov", cov, dim);
                if picture != "commutative" && picture != "noncommutative" {
                    v.push(format!(
                        "state.picture: expected \"commutative\" or \"noncommutative\", got \"{picture}\""
                    ));
                }
                if ordering != "global" && ordering != "party" {
                    v.push(format!(
                        "state.ordering: expected \"global\" or \"party\", got \"{ordering}\""
                    ));
                }
            }
        }
    }

    /// Build the typed objects. Assumes `validate` returned no violations;
    /// construction-level invariants (positive covariance, skew sectors,
    /// symmetric Hessian) are still enforced and surface as errors.
    pub fn assemble(&self) -> Result<Assembled> {
        let n = self.modes;
        let theta = expand_deformation(&self.theta, n);
        let eta = expand_deformation(&self.eta, n);
        let deformed = max_abs(&theta) > 0.0 || max_abs(&eta) > 0.0;
        let params = NCParameters::new(n, self.hbar, theta, eta)?;
        let partition = ModePartition::new(self.partition[0], self.partition[1])?;
        let state = self.build_state(&partition)?;
        let hamiltonian = match &self.hamiltonian {
            Some(h) => {
                let g = to_matrix(&h.g)
                    .ok_or_else(|| NcError::ShapeMismatch("hamiltonian.g: ragged matrix".into()))?;
                let linear = h.linear.as_ref().map(|l| DVector::from_vec(l.clone()));
                Some(QuadraticHamiltonian::new(g, linear, state.ordering)?)
            }
            None => None,
        };
        let (amplitudes, search) = match &self.bell {
            Some(b) => {
                let amps = b.amplitudes.map(|a| {
                    (
                        Complex::new(a[0][0], a[0][1]),
                        Complex::new(a[1][0], a[1][1]),
                    )
                });
                let si = b.search.unwrap_or_default();
                let spec = SearchSpec {
                    grid_points: si.grid_points,
                    bound: si.bound,
                    max_iterations: si.max_iterations,
                    step_tolerance: si.step_tolerance,
                };
                (amps, spec)
            }
            None => (None, SearchSpec::default()),
        };
        Ok(Assembled {
            hbar: self.hbar,
            params,
            partition,
            state,
            deformed,
            hamiltonian,
            amplitudes,
            search,
            reoptimize: self.amplitude_policy.as_deref() == Some("reoptimize"),
            times: self.times.clone().unwrap_or_default(),
        })
    }

    fn build_state(&self, partition: &ModePartition) -> Result<GaussianState> {
        match &self.state {
            StateSpec::Vacuum => make_vacuum(self.modes, self.hbar),
            StateSpec::Thermal { occupations } => make_thermal(self.modes, occupations, self.hbar),
            StateSpec::TwoModeSqueezed { r } => make_two_mode_squeezed(*r, self.hbar),
            StateSpec::Explicit {
                mean,
                cov,
                picture,
                ordering,
            } => {
                let m = to_matrix(cov)
                    .ok_or_else(|| NcError::ShapeMismatch("state.cov: ragged matrix".into()))?;
                let picture = match picture.as_str() {
                    "commutative" => Picture::Commutative,
                    _ => Picture::Noncommutative,
                };
                let ordering = match ordering.as_str() {
                    "party" => CoordOrdering::party(partition),
                    _ => CoordOrdering::global(self.modes),
                };
                GaussianState::new(
                    DVector::from_vec(mean.clone()),
                    m,
                    picture,
                    ordering,
                    self.hbar,
                )
            }
        }
    }
}

/// Everything a command needs, built from one scenario.
#[derive(Debug, Clone)]
pub struct Assembled {
    pub hbar: f64,
    pub params: NCParameters,
    pub partition: ModePartition,
    pub state: GaussianState,
    pub deformed: bool,
    pub hamiltonian: Option<QuadraticHamiltonian>,
    pub amplitudes: Option<(Complex<f64>, Complex<f64>)>,
    pub search: SearchSpec,
    pub reoptimize: bool,
    pub times: Vec<f64>,
}

fn expand_deformation(d: &Deformation, n: usize) -> DMatrix<f64> {
    match d {
        Deformation::Scalar(s) => planar_stack_skew(n, *s),
        Deformation::Matrix(rows) => to_matrix(rows).unwrap_or_else(|| DMatrix::zeros(n, n)),
    }
}

fn to_matrix(rows: &[Vec<f64>]) -> Option<DMatrix<f64>> {
    let nr = rows.len();
    let nc = rows.first()?.len();
    if rows.iter().any(|r| r.len() != nc) {
        return None;
    }
    let mut m = DMatrix::zeros(nr, nc);
    for (i, row) in rows.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Some(m)
}

fn check_matrix(v: &mut Vec<String>, path: &str, rows: &[Vec<f64>], expected: usize) {
    if rows.len() != expected {
        v.push(format!(
            "{path}: expected {expected} rows, got {}",
            rows.len()
        ));
    }
    for (i, row) in rows.iter().enumerate() {
        if row.len() != expected {
            v.push(format!(
                "{path}[{i}]: expected {expected} columns, got {}",
                row.len()
            ));
        }
        if row.iter().any(|x| !x.is_finite()) {
            v.push(format!("{path}[{i}]: entries must be finite"));
        }
    }
}

fn check_deformation(v: &mut Vec<String>, path: &str, d: &Deformation, n: usize) {
    match d {
        Deformation::Scalar(s) => {
            if !s.is_finite() {
                v.push(format!("{path}: must be finite, got {s}"));
            }
        }
        Deformation::Matrix(rows) => {
            check_matrix(v, path, rows, n);
            if let Some(m) = to_matrix(rows) {
                if m.nrows() == n && m.ncols() == n {
                    let dev = max_abs(&(&m + m.transpose()));
                    if dev > 1e-12 {
                        v.push(format!(
                            "{path}: must be skew-symmetric, deviation {dev:.3e}"
                        ));
                    }
                }
            }
        }
    }
}
