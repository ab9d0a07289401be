//! Quantumness and separability verdicts for Gaussian states.
//!
//! Both tests reduce to positivity of a Hermitian matrix Sigma + (i/2) F
//! with F a real skew form. The eigenvalues are computed through the real
//! symmetric embedding [[A, -B], [B, A]], whose spectrum is the Hermitian
//! spectrum with doubled multiplicity, keeping the numerical kernel in
//! real arithmetic.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::algebra::{
    build_omega, build_omega_prime, check_skew, check_symmetric, max_abs, planar_stack_skew,
    FormRole, NCParameters, OmegaLayout, PhaseSpaceForm,
};
use crate::error::{NcError, Result};
use crate::gaussian::{GaussianState, Picture};
use crate::ordering::{CoordOrdering, ModePartition};

/// Verdict band: passes means min_eigenvalue >= -VERDICT_TOL, so saturated
/// pure states at exactly zero margin do not flip from rounding.
pub const VERDICT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy)]
pub struct PSDVerdict {
    pub passes: bool,
    pub min_eigenvalue: f64,
    pub matrix_dim: usize,
}

impl PSDVerdict {
    fn from_margin(margin: f64, dim: usize) -> Self {
        PSDVerdict {
            passes: margin >= -VERDICT_TOL,
            min_eigenvalue: margin,
            matrix_dim: dim,
        }
    }
}

fn check_same_dim(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<usize> {
    if a.nrows() != a.ncols() || b.nrows() != b.ncols() || a.nrows() != b.nrows() {
        return Err(NcError::ShapeMismatch(format!(
            "need square matrices of equal size, got {}x{} and {}x{}",
            a.nrows(),
            a.ncols(),
            b.nrows(),
            b.ncols()
        )));
    }
    Ok(a.nrows())
}

/// All eigenvalues of the Hermitian matrix A + iB, ascending. A must be
/// symmetric and B skew. Uses the real embedding, so each eigenvalue of
/// the returned doubled spectrum appears twice; the full doubled list is
/// returned and callers index into it.
pub fn hermitian_eigenvalues(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<Vec<f64>> {
    let dim = check_same_dim(a, b)?;
    check_symmetric(a)?;
    check_skew(b).map_err(|_| NcError::SymmetryViolation {
        max_dev: max_abs(&(b + b.transpose())),
    })?;
    let mut emb = DMatrix::zeros(2 * dim, 2 * dim);
    emb.view_mut((0, 0), (dim, dim)).copy_from(a);
    emb.view_mut((dim, dim), (dim, dim)).copy_from(a);
    emb.view_mut((0, dim), (dim, dim)).copy_from(&(-b));
    emb.view_mut((dim, 0), (dim, dim)).copy_from(b);
    let mut eig: Vec<f64> = emb.symmetric_eigen().eigenvalues.iter().cloned().collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eig)
}

/// Minimum eigenvalue of the Hermitian matrix A + iB.
pub fn hermitian_psd_min_eig(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    Ok(hermitian_eigenvalues(a, b)?[0])
}

pub(crate) fn form_matches_picture(
    form: &PhaseSpaceForm,
    picture: Picture,
    hbar: f64,
) -> Result<()> {
    match picture {
        Picture::Commutative => {
            if !form.is_commutative_form(hbar) {
                return Err(NcError::PictureFormMismatch(format!(
                    "commutative-picture state must be paired with hbar*J, got role {}",
                    form.role.as_str()
                )));
            }
        }
        Picture::Noncommutative => {
            if form.role == FormRole::StandardJ && (hbar - 1.0).abs() > 1e-12 {
                return Err(NcError::PictureFormMismatch(
                    "noncommutative-picture state paired with the unscaled standard form".into(),
                ));
            }
            if form.role == FormRole::OmegaPrime {
                return Err(NcError::PictureFormMismatch(
                    "the uncertainty test takes Omega, not Omega'".into(),
                ));
            }
        }
    }
    Ok(())
}

/// Robertson-Schroedinger uncertainty test: Sigma + (i/2) F >= 0.
/// For Gaussian states a pass is necessary and sufficient for quantum
/// admissibility.
pub fn rsup_check(state: &GaussianState, form: &PhaseSpaceForm) -> Result<PSDVerdict> {
    if state.dim() != form.dim() {
        return Err(NcError::ShapeMismatch(format!(
            "state dimension {} does not match form dimension {}",
            state.dim(),
            form.dim()
        )));
    }
    if state.ordering != form.ordering {
        return Err(NcError::OrderingMismatch(format!(
            "state layout {} does not match form layout {}",
            state.ordering.describe(),
            form.ordering.describe()
        )));
    }
    form_matches_picture(form, state.picture, state.hbar)?;
    let b = &form.matrix * 0.5;
    let margin = hermitian_psd_min_eig(&state.cov, &b)?;
    Ok(PSDVerdict::from_margin(margin, state.dim()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparabilityLabel {
    /// Certified separable: single mode per party under the commutative
    /// form, where the positivity test is also sufficient.
    Separable,
    /// Positive partial transpose, separability undetermined.
    PptPassUndetermined,
    Entangled,
}

impl SeparabilityLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            SeparabilityLabel::Separable => "separable",
            SeparabilityLabel::PptPassUndetermined => "ppt_pass_undetermined",
            SeparabilityLabel::Entangled => "entangled",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SeparabilityVerdict {
    pub psd: PSDVerdict,
    pub label: SeparabilityLabel,
}

/// Positive-partial-transpose test: Sigma + (i/2) Omega' >= 0 with
/// Omega' = Diag[Omega_A, -Omega_B]. Failure certifies entanglement. The
/// state and form are converted to party-blocked layout internally; the
/// form must be block-diagonal with respect to the partition.
pub fn ppt_separability_check(
    state: &GaussianState,
    omega: &PhaseSpaceForm,
    partition: &ModePartition,
) -> Result<SeparabilityVerdict> {
    if state.dim() != omega.dim() {
        return Err(NcError::ShapeMismatch(format!(
            "state dimension {} does not match form dimension {}",
            state.dim(),
            omega.dim()
        )));
    }
    if partition.n_modes() != state.n_modes() {
        return Err(NcError::PartitionMismatch(format!(
            "partition covers {} modes but the state has {}",
            partition.n_modes(),
            state.n_modes()
        )));
    }
    if omega.role == FormRole::Custom {
        return Err(NcError::PartitionMismatch(
            "the separability criterion needs a party-block-diagonal form".into(),
        ));
    }
    form_matches_picture(omega, state.picture, state.hbar)?;
    let pb = CoordOrdering::party(partition);
    let state_pb = state.convert_ordering(pb)?;
    let omega_pb = omega.convert_ordering(pb)?;
    let prime = build_omega_prime(&omega_pb, partition)?;
    let b = &prime.matrix * 0.5;
    let margin = hermitian_psd_min_eig(&state_pb.cov, &b)?;
    let psd = PSDVerdict::from_margin(margin, state.dim());
    let label = if !psd.passes {
        SeparabilityLabel::Entangled
    } else if partition.n_a == 1 && partition.n_b == 1 && omega.is_commutative_form(state.hbar) {
        SeparabilityLabel::Separable
    } else {
        SeparabilityLabel::PptPassUndetermined
    };
    Ok(SeparabilityVerdict { psd, label })
}

/// Reflect a state through an involutive matrix M: mean -> M mean,
/// cov -> M cov M^T.
pub fn mirror_covariance(state: &GaussianState, m: &DMatrix<f64>) -> Result<GaussianState> {
    let dim = state.dim();
    if m.nrows() != dim || m.ncols() != dim {
        return Err(NcError::ShapeMismatch(format!(
            "mirror matrix must be {dim}x{dim}, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let dev = max_abs(&(m * m - DMatrix::identity(dim, dim)));
    if dev > 1e-10 {
        return Err(NcError::NotInvolutive { max_dev: dev });
    }
    let mean = m * &state.mean;
    let cov = m * &state.cov * m.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(mean, cov, state.picture, state.ordering, state.hbar)
}

/// Admissibility margin of the pencil (Sigma, F): the eigenvalues of
/// i F^{-1} Sigma come in pairs +-nu_k, and Sigma + (i/2) F >= 0 holds
/// exactly when min_k nu_k >= 1/2 (for positive-definite Sigma). Returns
/// min_k nu_k - 1/2. Unlike the Hermitian minimum eigenvalue, this margin
/// is invariant under any congruence of the pair, which is what makes the
/// two mirror-transformed separability conditions quantitatively equal.
pub fn pencil_margin(sigma: &DMatrix<f64>, form: &DMatrix<f64>) -> Result<f64> {
    let dim = check_same_dim(sigma, form)?;
    check_symmetric(sigma)?;
    check_skew(form)?;
    // Whiten with a Cholesky factor: Sigma = L L^T makes L^T F^{-1} L
    // similar to F^{-1} Sigma without forming a matrix square root.
    let chol = match sigma.clone().cholesky() {
        Some(c) => c,
        None => {
            let eig = sigma.clone().symmetric_eigen();
            let max_eig = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
            let min_eig = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
            return Err(NcError::IllConditioned {
                cond: max_eig / min_eig,
            });
        }
    };
    let l = chol.l();
    let f_inv = form
        .clone()
        .lu()
        .try_inverse()
        .ok_or(NcError::SingularForm { scaled_det: 0.0 })?;
    let k = l.transpose() * f_inv * &l;
    let k = (&k - k.transpose()) * 0.5;
    let zero = DMatrix::zeros(dim, dim);
    let eigs = hermitian_eigenvalues(&zero, &k)?;
    let nu_min = eigs.iter().map(|l| l.abs()).fold(f64::MAX, f64::min);
    Ok(nu_min - 0.5)
}

#[derive(Debug, Clone, Copy)]
pub struct ScanRecord {
    pub theta: f64,
    pub eta: f64,
    pub margin: f64,
    pub entangled: bool,
}

/// Reinterpret one fixed commutative-PPT-passing covariance under the
/// deformed algebra across a (theta, eta) grid and report the
/// noncommutative separability verdict at every point. The state data
/// never changes, isolating the kinematic effect. Deformation profile per
/// point: Theta_P = theta * stacked eps blocks, Pi_P = eta * stacked eps
/// blocks within each party. Grid points are independent and evaluated in
/// parallel; records come back in grid order (theta outer, eta inner).
pub fn kinematic_entanglement_scan(
    state: &GaussianState,
    theta_grid: &[f64],
    eta_grid: &[f64],
    partition: &ModePartition,
) -> Result<Vec<ScanRecord>> {
    if state.picture != Picture::Commutative {
        return Err(NcError::PictureFormMismatch(
            "the kinematic scan starts from a commutative-picture state".into(),
        ));
    }
    let hbar = state.hbar;
    let n = state.n_modes();
    let part = *partition;
    let commutative = build_omega(
        &NCParameters::commutative(n, hbar)?,
        &part,
        OmegaLayout::Bipartite,
    )?;
    let baseline = ppt_separability_check(state, &commutative, &part)?;
    if !baseline.psd.passes {
        return Err(NcError::PictureFormMismatch(format!(
            "the kinematic scan needs a commutative-PPT-passing state, margin {:.3e}",
            baseline.psd.min_eigenvalue
        )));
    }
    let pb = CoordOrdering::party(&part);
    let nc_state = state
        .convert_ordering(pb)?
        .reinterpret_picture(Picture::Noncommutative);

    let points: Vec<(f64, f64)> = theta_grid
        .iter()
        .flat_map(|&t| eta_grid.iter().map(move |&e| (t, e)))
        .collect();
    points
        .par_iter()
        .map(|&(theta, eta)| {
            let params = NCParameters::new(
                n,
                hbar,
                planar_stack_skew(n, theta),
                planar_stack_skew(n, eta),
            )?;
            let omega = build_omega(&params, &part, OmegaLayout::Bipartite)?;
            let verdict = ppt_separability_check(&nc_state, &omega, &part)?;
            Ok(ScanRecord {
                theta,
                eta,
                margin: verdict.psd.min_eigenvalue,
                entangled: !verdict.psd.passes,
            })
        })
        .collect()
}
