//! Python bindings for the ncphase core crate. Matrices cross the
//! boundary as nested lists of floats, vectors as flat lists, complex
//! amplitudes as (re, im) pairs. Every fallible core operation surfaces
//! as ValueError carrying the core error message.

use nalgebra::{Complex, DMatrix, DVector};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ncphase::{
    bell_chsh as core_bell_chsh, bell_optimize as core_bell_optimize,
    build_general_s as core_build_general_s, build_omega as core_build_omega,
    build_planar_s as core_build_planar_s,
    compare_bell_trajectories as core_compare_bell_trajectories, evolve as core_evolve,
    hamiltonian_in_commutative_variables as core_h_commutative,
    kinematic_entanglement_scan as core_kinematic_scan, make_thermal, make_two_mode_squeezed,
    make_vacuum, pencil_margin as core_pencil_margin, planar_sw_constants as core_sw_constants,
    ppt_separability_check as core_ppt_check, rsup_check as core_rsup_check,
    to_commutative_picture, to_nc_picture, wigner_eval, AmplitudePolicy, CoordOrdering,
    DarbouxMethod, ModePartition, NcError, OmegaLayout, Picture, SearchSpec,
};

fn perr(e: NcError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dmatrix(rows: &[Vec<f64>], name: &str) -> PyResult<DMatrix<f64>> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(format!("{name} has ragged rows")));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}

fn mat_out(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn parse_picture(s: &str) -> PyResult<Picture> {
    match s {
        "commutative" => Ok(Picture::Commutative),
        "noncommutative" => Ok(Picture::Noncommutative),
        other => Err(PyValueError::new_err(format!(
            "picture must be \"commutative\" or \"noncommutative\", got {other:?}"
        ))),
    }
}

fn ordering_from(
    ordering: &str,
    n_modes: usize,
    partition: Option<(usize, usize)>,
) -> PyResult<CoordOrdering> {
    match ordering {
        "global" => Ok(CoordOrdering::global(n_modes)),
        "party" => {
            let (n_a, n_b) = partition.ok_or_else(|| {
                PyValueError::new_err("party ordering needs partition=(n_a, n_b)")
            })?;
            if n_a + n_b != n_modes {
                return Err(PyValueError::new_err(format!(
                    "partition ({n_a}, {n_b}) does not cover {n_modes} modes"
                )));
            }
            let part = ModePartition::new(n_a, n_b).map_err(perr)?;
            Ok(CoordOrdering::party(&part))
        }
        other => Err(PyValueError::new_err(format!(
            "ordering must be \"global\" or \"party\", got {other:?}"
        ))),
    }
}

fn partition_of(n_a: usize, n_b: usize) -> PyResult<ModePartition> {
    ModePartition::new(n_a, n_b).map_err(perr)
}

fn search_spec(
    grid_points: usize,
    bound: f64,
    max_iterations: usize,
    step_tolerance: f64,
) -> SearchSpec {
    SearchSpec {
        grid_points,
        bound,
        max_iterations,
        step_tolerance,
    }
}

/// Deformation data: mode count, hbar, and the two skew sector matrices.
#[pyclass(name = "NCParameters", skip_from_py_object)]
#[derive(Clone)]
struct PyNCParameters {
    inner: ncphase::NCParameters,
}

#[pymethods]
impl PyNCParameters {
    #[new]
    fn new(n_modes: usize, hbar: f64, theta: Vec<Vec<f64>>, eta: Vec<Vec<f64>>) -> PyResult<Self> {
        let theta = to_dmatrix(&theta, "theta")?;
        let eta = to_dmatrix(&eta, "eta")?;
        Ok(Self {
            inner: ncphase::NCParameters::new(n_modes, hbar, theta, eta).map_err(perr)?,
        })
    }

    /// Two planar modes with scalar deformation in each sector.
    #[staticmethod]
    #[pyo3(signature = (theta, eta, hbar = 1.0))]
    fn planar(theta: f64, eta: f64, hbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ncphase::NCParameters::planar(theta, eta, hbar).map_err(perr)?,
        })
    }

    /// Scalar deformation stacked over consecutive mode pairs.
    #[staticmethod]
    #[pyo3(signature = (n_modes, theta, eta, hbar = 1.0))]
    fn planar_stacked(n_modes: usize, theta: f64, eta: f64, hbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ncphase::NCParameters::new(
                n_modes,
                hbar,
                ncphase::planar_stack_skew(n_modes, theta),
                ncphase::planar_stack_skew(n_modes, eta),
            )
            .map_err(perr)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (n_modes, hbar = 1.0))]
    fn commutative(n_modes: usize, hbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: ncphase::NCParameters::commutative(n_modes, hbar).map_err(perr)?,
        })
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar
    }

    #[getter]
    fn theta(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.theta)
    }

    #[getter]
    fn eta(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.eta)
    }

    fn is_commutative(&self) -> bool {
        self.inner.is_commutative()
    }

    fn __repr__(&self) -> String {
        format!(
            "NCParameters(n_modes={}, hbar={}, commutative={})",
            self.inner.n_modes,
            self.inner.hbar,
            self.inner.is_commutative()
        )
    }
}

/// A tagged skew form over phase space.
#[pyclass(name = "PhaseSpaceForm", skip_from_py_object)]
#[derive(Clone)]
struct PyPhaseSpaceForm {
    inner: ncphase::PhaseSpaceForm,
}

#[pymethods]
impl PyPhaseSpaceForm {
    #[getter]
    fn matrix(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.matrix)
    }

    #[getter]
    fn role(&self) -> &'static str {
        self.inner.role.as_str()
    }

    #[getter]
    fn ordering(&self) -> String {
        self.inner.ordering.describe()
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    fn is_commutative_form(&self, hbar: f64) -> bool {
        self.inner.is_commutative_form(hbar)
    }

    fn __repr__(&self) -> String {
        format!(
            "PhaseSpaceForm(role={}, {})",
            self.inner.role.as_str(),
            self.inner.ordering.describe()
        )
    }
}

/// A Gaussian state: mean vector, covariance of full second moments,
/// picture tag, layout tag, hbar.
#[pyclass(name = "GaussianState", skip_from_py_object)]
#[derive(Clone)]
struct PyGaussianState {
    inner: ncphase::GaussianState,
}

#[pymethods]
impl PyGaussianState {
    #[new]
    #[pyo3(signature = (mean, cov, picture = "commutative", hbar = 1.0, ordering = "global", partition = None))]
    fn new(
        mean: Vec<f64>,
        cov: Vec<Vec<f64>>,
        picture: &str,
        hbar: f64,
        ordering: &str,
        partition: Option<(usize, usize)>,
    ) -> PyResult<Self> {
        if !mean.len().is_multiple_of(2) {
            return Err(PyValueError::new_err(format!(
                "mean must have even length, got {}",
                mean.len()
            )));
        }
        let tag = ordering_from(ordering, mean.len() / 2, partition)?;
        let state = ncphase::GaussianState::new(
            DVector::from_vec(mean),
            to_dmatrix(&cov, "cov")?,
            parse_picture(picture)?,
            tag,
            hbar,
        )
        .map_err(perr)?;
        Ok(Self { inner: state })
    }

    #[staticmethod]
    #[pyo3(signature = (n_modes, hbar = 1.0))]
    fn vacuum(n_modes: usize, hbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: make_vacuum(n_modes, hbar).map_err(perr)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (occupations, hbar = 1.0))]
    fn thermal(occupations: Vec<f64>, hbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: make_thermal(occupations.len(), &occupations, hbar).map_err(perr)?,
        })
    }

    #[staticmethod]
    #[pyo3(signature = (r, hbar = 1.0))]
    fn two_mode_squeezed(r: f64, hbar: f64) -> PyResult<Self> {
        Ok(Self {
            inner: make_two_mode_squeezed(r, hbar).map_err(perr)?,
        })
    }

    #[getter]
    fn mean(&self) -> Vec<f64> {
        self.inner.mean.iter().cloned().collect()
    }

    #[getter]
    fn cov(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.cov)
    }

    #[getter]
    fn picture(&self) -> &'static str {
        self.inner.picture.as_str()
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar
    }

    #[getter]
    fn n_modes(&self) -> usize {
        self.inner.n_modes()
    }

    #[getter]
    fn ordering(&self) -> String {
        self.inner.ordering.describe()
    }

    fn to_party(&self, n_a: usize, n_b: usize) -> PyResult<Self> {
        let part = partition_of(n_a, n_b)?;
        Ok(Self {
            inner: self
                .inner
                .convert_ordering(CoordOrdering::party(&part))
                .map_err(perr)?,
        })
    }

    fn to_global(&self) -> PyResult<Self> {
        Ok(Self {
            inner: self
                .inner
                .convert_ordering(CoordOrdering::global(self.inner.n_modes()))
                .map_err(perr)?,
        })
    }

    /// Relabel the picture without transporting the data.
    fn reinterpret_picture(&self, picture: &str) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.reinterpret_picture(parse_picture(picture)?),
        })
    }

    /// Wigner value at a phase-space point in this state's layout.
    fn wigner(&self, point: Vec<f64>) -> PyResult<f64> {
        wigner_eval(&self.inner, &DVector::from_vec(point)).map_err(perr)
    }

    fn __repr__(&self) -> String {
        format!(
            "GaussianState({} modes, picture={}, {})",
            self.inner.n_modes(),
            self.inner.picture.as_str(),
            self.inner.ordering.describe()
        )
    }
}

/// An invertible linear map with certified symplectic correspondence.
#[pyclass(name = "DarbouxMap", skip_from_py_object)]
#[derive(Clone)]
struct PyDarbouxMap {
    inner: ncphase::DarbouxMap,
}

#[pymethods]
impl PyDarbouxMap {
    #[getter]
    fn s(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.s)
    }

    #[getter]
    fn s_inv(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.s_inv)
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.inner.hbar
    }

    #[getter]
    fn method(&self) -> &'static str {
        match self.inner.method {
            DarbouxMethod::PlanarClosedForm => "planar_closed_form",
            DarbouxMethod::SymplecticGramSchmidt => "symplectic_gram_schmidt",
        }
    }

    fn correspondence_residual(&self) -> f64 {
        self.inner.correspondence_residual()
    }

    /// Transport a commutative-picture state to the noncommutative picture.
    fn to_nc(&self, state: &PyGaussianState) -> PyResult<PyGaussianState> {
        Ok(PyGaussianState {
            inner: to_nc_picture(&state.inner, &self.inner).map_err(perr)?,
        })
    }

    /// Transport a noncommutative-picture state back.
    fn to_commutative(&self, state: &PyGaussianState) -> PyResult<PyGaussianState> {
        Ok(PyGaussianState {
            inner: to_commutative_picture(&state.inner, &self.inner).map_err(perr)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "DarbouxMap(method={}, residual={:.3e})",
            self.method(),
            self.inner.correspondence_residual()
        )
    }
}

/// Positive-semidefiniteness verdict with its margin.
#[pyclass(name = "PSDVerdict", skip_from_py_object)]
#[derive(Clone)]
struct PyPSDVerdict {
    #[pyo3(get)]
    passes: bool,
    #[pyo3(get)]
    min_eigenvalue: f64,
    #[pyo3(get)]
    matrix_dim: usize,
}

#[pymethods]
impl PyPSDVerdict {
    fn __repr__(&self) -> String {
        format!(
            "PSDVerdict(passes={}, min_eigenvalue={:.6e})",
            self.passes, self.min_eigenvalue
        )
    }
}

/// Separability verdict: PPT margin plus the three-way label.
#[pyclass(name = "SeparabilityVerdict", skip_from_py_object)]
#[derive(Clone)]
struct PySeparabilityVerdict {
    #[pyo3(get)]
    passes: bool,
    #[pyo3(get)]
    min_eigenvalue: f64,
    #[pyo3(get)]
    label: String,
}

#[pymethods]
impl PySeparabilityVerdict {
    fn __repr__(&self) -> String {
        format!(
            "SeparabilityVerdict(label={}, min_eigenvalue={:.6e})",
            self.label, self.min_eigenvalue
        )
    }
}

/// One CHSH evaluation: amplitudes, the four Wigner samples, the Bell
/// value, the locality verdict.
#[pyclass(name = "CHSHEvaluation", skip_from_py_object)]
#[derive(Clone)]
struct PyCHSHEvaluation {
    #[pyo3(get)]
    alpha1: (f64, f64),
    #[pyo3(get)]
    alpha2: (f64, f64),
    #[pyo3(get)]
    w_samples: Vec<f64>,
    #[pyo3(get)]
    bell_value: f64,
    #[pyo3(get, name = "is_nonlocal")]
    nonlocal: bool,
}

impl PyCHSHEvaluation {
    fn from_core(e: &ncphase::CHSHEvaluation) -> Self {
        Self {
            alpha1: (e.alpha1.re, e.alpha1.im),
            alpha2: (e.alpha2.re, e.alpha2.im),
            w_samples: e.w_samples.to_vec(),
            bell_value: e.bell_value,
            nonlocal: e.nonlocal,
        }
    }
}

#[pymethods]
impl PyCHSHEvaluation {
    fn __repr__(&self) -> String {
        format!(
            "CHSHEvaluation(bell_value={:.12}, nonlocal={})",
            self.bell_value, self.nonlocal
        )
    }
}

/// Amplitude optimizer output.
#[pyclass(name = "BellOptimum", skip_from_py_object)]
#[derive(Clone)]
struct PyBellOptimum {
    #[pyo3(get)]
    eval: PyCHSHEvaluation,
    #[pyo3(get)]
    grid_value: f64,
    #[pyo3(get)]
    budget_exhausted: bool,
}

#[pymethods]
impl PyBellOptimum {
    fn __repr__(&self) -> String {
        format!(
            "BellOptimum(bell_value={:.12}, budget_exhausted={})",
            self.eval.bell_value, self.budget_exhausted
        )
    }
}

/// H(z) = (1/2) z^T G z + linear . z.
#[pyclass(name = "QuadraticHamiltonian", skip_from_py_object)]
#[derive(Clone)]
struct PyQuadraticHamiltonian {
    inner: ncphase::QuadraticHamiltonian,
}

#[pymethods]
impl PyQuadraticHamiltonian {
    #[new]
    #[pyo3(signature = (g, linear = None, ordering = "global", partition = None))]
    fn new(
        g: Vec<Vec<f64>>,
        linear: Option<Vec<f64>>,
        ordering: &str,
        partition: Option<(usize, usize)>,
    ) -> PyResult<Self> {
        let g = to_dmatrix(&g, "g")?;
        if !g.nrows().is_multiple_of(2) {
            return Err(PyValueError::new_err(format!(
                "Hessian must have even dimension, got {}",
                g.nrows()
            )));
        }
        let tag = ordering_from(ordering, g.nrows() / 2, partition)?;
        Ok(Self {
            inner: ncphase::QuadraticHamiltonian::new(g, linear.map(DVector::from_vec), tag)
                .map_err(perr)?,
        })
    }

    #[getter]
    fn g(&self) -> Vec<Vec<f64>> {
        mat_out(&self.inner.g)
    }

    #[getter]
    fn linear(&self) -> Option<Vec<f64>> {
        self.inner
            .linear
            .as_ref()
            .map(|v| v.iter().cloned().collect())
    }

    #[getter]
    fn ordering(&self) -> String {
        self.inner.ordering.describe()
    }

    fn __repr__(&self) -> String {
        format!(
            "QuadraticHamiltonian(dim={}, {})",
            self.inner.dim(),
            self.inner.ordering.describe()
        )
    }
}

/// Planar closed-form constants (nu, mu) and the constraint residual
/// nu mu + theta eta / (4 nu mu hbar^2) - 1.
#[pyfunction]
#[pyo3(signature = (theta, eta, hbar = 1.0))]
fn planar_sw_constants(theta: f64, eta: f64, hbar: f64) -> PyResult<(f64, f64, f64)> {
    let c = core_sw_constants(theta, eta, hbar).map_err(perr)?;
    Ok((c.nu, c.mu, c.constraint_residual()))
}

/// Closed-form planar Darboux map for two modes.
#[pyfunction]
#[pyo3(signature = (theta, eta, hbar = 1.0))]
fn build_planar_s(theta: f64, eta: f64, hbar: f64) -> PyResult<PyDarbouxMap> {
    let c = core_sw_constants(theta, eta, hbar).map_err(perr)?;
    Ok(PyDarbouxMap {
        inner: core_build_planar_s(&c).map_err(perr)?,
    })
}

/// Symplectic Gram-Schmidt Darboux map for any admissible form.
#[pyfunction]
fn build_general_s(form: &PyPhaseSpaceForm, hbar: f64) -> PyResult<PyDarbouxMap> {
    Ok(PyDarbouxMap {
        inner: core_build_general_s(&form.inner, hbar).map_err(perr)?,
    })
}

/// Assemble the deformed form Omega. Layout "full" gives the global
/// sector-block matrix, "bipartite" the party-blocked one.
#[pyfunction]
#[pyo3(signature = (params, n_a, n_b = 0, layout = "full"))]
fn build_omega(
    params: &PyNCParameters,
    n_a: usize,
    n_b: usize,
    layout: &str,
) -> PyResult<PyPhaseSpaceForm> {
    let part = partition_of(n_a, n_b)?;
    let layout = match layout {
        "full" => OmegaLayout::Full,
        "bipartite" => OmegaLayout::Bipartite,
        other => {
            return Err(PyValueError::new_err(format!(
                "layout must be \"full\" or \"bipartite\", got {other:?}"
            )))
        }
    };
    Ok(PyPhaseSpaceForm {
        inner: core_build_omega(&params.inner, &part, layout).map_err(perr)?,
    })
}

/// Robertson-Schrodinger test Sigma + (i/2) F >= 0 for the given form.
#[pyfunction]
fn rsup_check(state: &PyGaussianState, form: &PyPhaseSpaceForm) -> PyResult<PyPSDVerdict> {
    let v = core_rsup_check(&state.inner, &form.inner).map_err(perr)?;
    Ok(PyPSDVerdict {
        passes: v.passes,
        min_eigenvalue: v.min_eigenvalue,
        matrix_dim: v.matrix_dim,
    })
}

/// Positive-partial-transpose separability test across the bipartition.
#[pyfunction]
fn ppt_separability_check(
    state: &PyGaussianState,
    form: &PyPhaseSpaceForm,
    n_a: usize,
    n_b: usize,
) -> PyResult<PySeparabilityVerdict> {
    let part = ModePartition::bipartite(n_a, n_b).map_err(perr)?;
    let v = core_ppt_check(&state.inner, &form.inner, &part).map_err(perr)?;
    Ok(PySeparabilityVerdict {
        passes: v.psd.passes,
        min_eigenvalue: v.psd.min_eigenvalue,
        label: v.label.as_str().to_owned(),
    })
}

/// Smallest symplectic-pencil modulus of (sigma, form) minus 1/2.
#[pyfunction]
fn pencil_margin(sigma: Vec<Vec<f64>>, form: Vec<Vec<f64>>) -> PyResult<f64> {
    core_pencil_margin(&to_dmatrix(&sigma, "sigma")?, &to_dmatrix(&form, "form")?).map_err(perr)
}

/// Reinterpret one commutative-PPT-passing state across a (theta, eta)
/// grid. Returns (theta, eta, margin, entangled) tuples in grid order.
#[pyfunction]
fn kinematic_entanglement_scan(
    state: &PyGaussianState,
    theta_grid: Vec<f64>,
    eta_grid: Vec<f64>,
    n_a: usize,
    n_b: usize,
) -> PyResult<Vec<(f64, f64, f64, bool)>> {
    let part = ModePartition::bipartite(n_a, n_b).map_err(perr)?;
    let records = core_kinematic_scan(&state.inner, &theta_grid, &eta_grid, &part).map_err(perr)?;
    Ok(records
        .into_iter()
        .map(|r| (r.theta, r.eta, r.margin, r.entangled))
        .collect())
}

/// CHSH combination at fixed displacement amplitudes (re, im) pairs.
#[pyfunction]
fn bell_chsh(
    state: &PyGaussianState,
    alpha1: (f64, f64),
    alpha2: (f64, f64),
) -> PyResult<PyCHSHEvaluation> {
    let w = ncphase::WignerEvaluator::new(&state.inner).map_err(perr)?;
    let e = core_bell_chsh(
        &w,
        Complex::new(alpha1.0, alpha1.1),
        Complex::new(alpha2.0, alpha2.1),
    )
    .map_err(perr)?;
    Ok(PyCHSHEvaluation::from_core(&e))
}

/// Deterministic coarse grid plus simplex refinement of |B|.
#[pyfunction]
#[pyo3(signature = (state, form, grid_points = 21, bound = 2.0, max_iterations = 500, step_tolerance = 1e-6))]
fn bell_optimize(
    state: &PyGaussianState,
    form: &PyPhaseSpaceForm,
    grid_points: usize,
    bound: f64,
    max_iterations: usize,
    step_tolerance: f64,
) -> PyResult<PyBellOptimum> {
    let spec = search_spec(grid_points, bound, max_iterations, step_tolerance);
    let o = core_bell_optimize(&state.inner, &form.inner, &spec).map_err(perr)?;
    Ok(PyBellOptimum {
        eval: PyCHSHEvaluation::from_core(&o.eval),
        grid_value: o.grid_value,
        budget_exhausted: o.budget_exhausted,
    })
}

/// The Hamiltonian rewritten in commutative Darboux variables.
#[pyfunction]
fn hamiltonian_in_commutative_variables(
    h: &PyQuadraticHamiltonian,
    map: &PyDarbouxMap,
) -> PyResult<PyQuadraticHamiltonian> {
    Ok(PyQuadraticHamiltonian {
        inner: core_h_commutative(&h.inner, &map.inner).map_err(perr)?,
    })
}

/// Flow the state for time t under the bracket of the given form.
#[pyfunction]
fn evolve(
    state: &PyGaussianState,
    h: &PyQuadraticHamiltonian,
    form: &PyPhaseSpaceForm,
    t: f64,
) -> PyResult<PyGaussianState> {
    Ok(PyGaussianState {
        inner: core_evolve(&state.inner, &h.inner, &form.inner, t).map_err(perr)?,
    })
}

type TrajectoryTuple = (f64, f64, f64, f64, bool, bool);

/// Bell values along the commutative and deformed flows of one shared
/// initial state. Returns (t, bell_c, bell_nc, delta, nonlocal_c,
/// nonlocal_nc) tuples.
#[pyfunction]
#[pyo3(signature = (state, h, form, times, amplitudes = None, reoptimize = false,
                    grid_points = 21, bound = 2.0, max_iterations = 500, step_tolerance = 1e-6))]
#[allow(clippy::too_many_arguments)]
fn compare_bell_trajectories(
    state: &PyGaussianState,
    h: &PyQuadraticHamiltonian,
    form: &PyPhaseSpaceForm,
    times: Vec<f64>,
    amplitudes: Option<((f64, f64), (f64, f64))>,
    reoptimize: bool,
    grid_points: usize,
    bound: f64,
    max_iterations: usize,
    step_tolerance: f64,
) -> PyResult<Vec<TrajectoryTuple>> {
    if reoptimize && amplitudes.is_some() {
        return Err(PyValueError::new_err(
            "fixed amplitudes and reoptimize=True are mutually exclusive",
        ));
    }
    let policy = if reoptimize {
        AmplitudePolicy::ReoptimizePerStep
    } else {
        AmplitudePolicy::Fixed(
            amplitudes.map(|(a1, a2)| (Complex::new(a1.0, a1.1), Complex::new(a2.0, a2.1))),
        )
    };
    let spec = search_spec(grid_points, bound, max_iterations, step_tolerance);
    let rows =
        core_compare_bell_trajectories(&state.inner, &h.inner, &form.inner, &times, policy, &spec)
            .map_err(perr)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            (
                r.t,
                r.bell_c,
                r.bell_nc,
                r.delta,
                r.nonlocal_c,
                r.nonlocal_nc,
            )
        })
        .collect())
}

#[pymodule]
fn ncphase_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyNCParameters>()?;
    m.add_class::<PyPhaseSpaceForm>()?;
    m.add_class::<PyGaussianState>()?;
    m.add_class::<PyDarbouxMap>()?;
    m.add_class::<PyPSDVerdict>()?;
    m.add_class::<PySeparabilityVerdict>()?;
    m.add_class::<PyCHSHEvaluation>()?;
    m.add_class::<PyBellOptimum>()?;
    m.add_class::<PyQuadraticHamiltonian>()?;
    m.add_function(wrap_pyfunction!(planar_sw_constants, m)?)?;
    m.add_function(wrap_pyfunction!(build_planar_s, m)?)?;
    m.add_function(wrap_pyfunction!(build_general_s, m)?)?;
    m.add_function(wrap_pyfunction!(build_omega, m)?)?;
    m.add_function(wrap_pyfunction!(rsup_check, m)?)?;
    m.add_function(wrap_pyfunction!(ppt_separability_check, m)?)?;
    m.add_function(wrap_pyfunction!(pencil_margin, m)?)?;
    m.add_function(wrap_pyfunction!(kinematic_entanglement_scan, m)?)?;
    m.add_function(wrap_pyfunction!(bell_chsh, m)?)?;
    m.add_function(wrap_pyfunction!(bell_optimize, m)?)?;
    m.add_function(wrap_pyfunction!(hamiltonian_in_commutative_variables, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(compare_bell_trajectories, m)?)?;
    Ok(())
}
