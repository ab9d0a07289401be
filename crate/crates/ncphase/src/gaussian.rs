//! Gaussian states as (mean, covariance) pairs with pointwise Wigner
//! evaluation and transport between the commutative and noncommutative
//! pictures.
//!
//! Covariance convention: Sigma_ij is the symmetrized second moment
//! <(1/2){dz_i, dz_j}>, so the vacuum is (hbar/2) I and uncertainty
//! saturation shows up as a zero margin in the criteria module.

use nalgebra::{DMatrix, DVector};

use crate::algebra::check_symmetric;
use crate::darboux::DarbouxMap;
use crate::error::{NcError, Result};
use crate::ordering::{layout_permutation, permute_matrix, permute_vector, CoordOrdering};

pub const COND_LIMIT: f64 = 1e12;
const PSD_RATIO: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Picture {
    Commutative,
    Noncommutative,
}

impl Picture {
    pub fn as_str(&self) -> &'static str {
        match self {
            Picture::Commutative => "commutative",
            Picture::Noncommutative => "noncommutative",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GaussianState {
    pub mean: DVector<f64>,
    pub cov: DMatrix<f64>,
    pub picture: Picture,
    pub ordering: CoordOrdering,
    pub hbar: f64,
}

impl GaussianState {
    pub fn new(
        mean: DVector<f64>,
        cov: DMatrix<f64>,
        picture: Picture,
        ordering: CoordOrdering,
        hbar: f64,
    ) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(NcError::DimensionMismatch(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        let dim = ordering.dim();
        if mean.len() != dim {
            return Err(NcError::DimensionMismatch(format!(
                "mean has length {} but layout {} needs {dim}",
                mean.len(),
                ordering.describe()
            )));
        }
        if cov.nrows() != dim || cov.ncols() != dim {
            return Err(NcError::DimensionMismatch(format!(
                "covariance is {}x{} but layout {} needs {dim}x{dim}",
                cov.nrows(),
                cov.ncols(),
                ordering.describe()
            )));
        }
        check_symmetric(&cov)?;
        let eig = cov.clone().symmetric_eigen();
        let max_eig = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        if !(min_eig > PSD_RATIO * max_eig.max(0.0)) {
            return Err(NcError::DimensionMismatch(format!(
                "covariance is not positive-definite: eigenvalue range [{min_eig:.3e}, {max_eig:.3e}]"
            )));
        }
        Ok(Self {
            mean,
            cov,
            picture,
            ordering,
            hbar,
        })
    }

    pub fn n_modes(&self) -> usize {
        self.ordering.n_modes()
    }

    pub fn dim(&self) -> usize {
        self.ordering.dim()
    }

    pub fn convert_ordering(&self, to: CoordOrdering) -> Result<GaussianState> {
        if to == self.ordering {
            return Ok(self.clone());
        }
        let perm = layout_permutation(self.ordering, to)?;
        Ok(GaussianState {
            mean: permute_vector(&self.mean, &perm),
            cov: permute_matrix(&self.cov, &perm),
            picture: self.picture,
            ordering: to,
            hbar: self.hbar,
        })
    }

    /// Relabel the picture without transporting the data. Used by the
    /// kinematic scan, which deliberately reads one covariance matrix in
    /// both pictures.
    pub fn reinterpret_picture(&self, picture: Picture) -> GaussianState {
        GaussianState {
            picture,
            ..self.clone()
        }
    }
}

/// Cached factorization of one state for repeated pointwise evaluation.
pub struct WignerKernel {
    mean: DVector<f64>,
    basis: DMatrix<f64>,
    eigenvalues: DVector<f64>,
    norm: f64,
    dim: usize,
}

impl WignerKernel {
    pub fn new(state: &GaussianState) -> Result<Self> {
        let eig = state.cov.clone().symmetric_eigen();
        let max_eig = eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
        let min_eig = eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
        let cond = max_eig / min_eig;
        if !(cond <= COND_LIMIT) || min_eig <= 0.0 {
            return Err(NcError::IllConditioned { cond });
        }
        let n = state.n_modes();
        let det: f64 = eig.eigenvalues.iter().product();
        let norm = 1.0 / ((2.0 * std::f64::consts::PI).powi(n as i32) * det.sqrt());
        Ok(Self {
            mean: state.mean.clone(),
            basis: eig.eigenvectors,
            eigenvalues: eig.eigenvalues,
            norm,
            dim: state.dim(),
        })
    }

    pub fn eval(&self, point: &DVector<f64>) -> Result<f64> {
        if point.len() != self.dim {
            return Err(NcError::OrderingMismatch(format!(
                "point has length {} but the state needs {}",
                point.len(),
                self.dim
            )));
        }
        let d = point - &self.mean;
        let y = self.basis.transpose() * d;
        let quad: f64 = y
            .iter()
            .zip(self.eigenvalues.iter())
            .map(|(yi, li)| yi * yi / li)
            .sum();
        Ok(self.norm * (-0.5 * quad).exp())
    }

    pub fn peak(&self) -> f64 {
        self.norm
    }
}

/// Normalized Gaussian Wigner value at one phase-space point.
pub fn wigner_eval(state: &GaussianState, point: &DVector<f64>) -> Result<f64> {
    WignerKernel::new(state)?.eval(point)
}

/// Transport a commutative state through the map: mean -> S mean,
/// cov -> S cov S^T.
pub fn to_nc_picture(state: &GaussianState, map: &DarbouxMap) -> Result<GaussianState> {
    if state.picture != Picture::Commutative {
        return Err(NcError::PictureFormMismatch(
            "to_nc_picture needs a commutative-picture state".into(),
        ));
    }
    transport(state, map, true)
}

/// Inverse transport: mean -> S^{-1} mean, cov -> S^{-1} cov S^{-T}.
pub fn to_commutative_picture(state: &GaussianState, map: &DarbouxMap) -> Result<GaussianState> {
    if state.picture != Picture::Noncommutative {
        return Err(NcError::PictureFormMismatch(
            "to_commutative_picture needs a noncommutative-picture state".into(),
        ));
    }
    transport(state, map, false)
}

fn transport(state: &GaussianState, map: &DarbouxMap, forward: bool) -> Result<GaussianState> {
    if state.dim() != map.dim() {
        return Err(NcError::DimensionMismatch(format!(
            "state dimension {} does not match map dimension {}",
            state.dim(),
            map.dim()
        )));
    }
    if state.ordering != map.ordering() {
        return Err(NcError::OrderingMismatch(format!(
            "state layout {} does not match map layout {}",
            state.ordering.describe(),
            map.ordering().describe()
        )));
    }
    if (state.hbar - map.hbar).abs() > 1e-12 {
        return Err(NcError::DimensionMismatch(format!(
            "state hbar {} does not match map hbar {}",
            state.hbar, map.hbar
        )));
    }
    let (m, picture) = if forward {
        (&map.s, Picture::Noncommutative)
    } else {
        (&map.s_inv, Picture::Commutative)
    };
    let mean = m * &state.mean;
    let cov = m * &state.cov * m.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(mean, cov, picture, state.ordering, state.hbar)
}

/// Noncommutative Wigner value at z: prefactor * W(S^{-1} z) with
/// prefactor hbar^n / sqrt(det Omega), which equals the normalization
/// change of the transported Gaussian (and 1/sqrt(det Omega) at hbar = 1).
pub fn wigner_nc_eval(
    state: &GaussianState,
    map: &DarbouxMap,
    point_z: &DVector<f64>,
) -> Result<f64> {
    if state.picture != Picture::Commutative {
        return Err(NcError::PictureFormMismatch(
            "wigner_nc_eval needs a commutative-picture state".into(),
        ));
    }
    if point_z.len() != map.dim() {
        return Err(NcError::OrderingMismatch(format!(
            "point has length {} but the map needs {}",
            point_z.len(),
            map.dim()
        )));
    }
    let det_omega = map.source_form.matrix.clone().lu().determinant();
    let n = map.dim() / 2;
    let prefactor = map.hbar.powi(n as i32) / det_omega.sqrt();
    let zeta = &map.s_inv * point_z;
    Ok(prefactor * wigner_eval(state, &zeta)?)
}

/// Vacuum: Sigma = (hbar/2) I, zero mean, global-blocked.
pub fn make_vacuum(n_modes: usize, hbar: f64) -> Result<GaussianState> {
    let ordering = CoordOrdering::global(n_modes);
    GaussianState::new(
        DVector::zeros(2 * n_modes),
        DMatrix::identity(2 * n_modes, 2 * n_modes) * (hbar / 2.0),
        Picture::Commutative,
        ordering,
        hbar,
    )
}

/// Thermal product state: Sigma = Diag over modes of hbar (nbar_k + 1/2) I2.
pub fn make_thermal(n_modes: usize, occupations: &[f64], hbar: f64) -> Result<GaussianState> {
    if occupations.len() != n_modes {
        return Err(NcError::DimensionMismatch(format!(
            "{} occupations for {n_modes} modes",
            occupations.len()
        )));
    }
    if let Some(&bad) = occupations.iter().find(|&&o| o < 0.0) {
        return Err(NcError::NegativeOccupation(bad));
    }
    let ordering = CoordOrdering::global(n_modes);
    let mut cov = DMatrix::zeros(2 * n_modes, 2 * n_modes);
    for (k, &nbar) in occupations.iter().enumerate() {
        let v = hbar * (nbar + 0.5);
        cov[(ordering.x_slot(k), ordering.x_slot(k))] = v;
        cov[(ordering.p_slot(k), ordering.p_slot(k))] = v;
    }
    GaussianState::new(
        DVector::zeros(2 * n_modes),
        cov,
        Picture::Commutative,
        ordering,
        hbar,
    )
}

/// Two-mode squeezed state, global-blocked (x1, x2, p1, p2):
/// Sigma = (hbar/2) [[cosh 2r, sinh 2r, 0, 0], [sinh 2r, cosh 2r, 0, 0],
/// [0, 0, cosh 2r, -sinh 2r], [0, 0, -sinh 2r, cosh 2r]].
pub fn make_two_mode_squeezed(r: f64, hbar: f64) -> Result<GaussianState> {
    let ch = (2.0 * r).cosh();
    let sh = (2.0 * r).sinh();
    let s = hbar / 2.0;
    let cov = DMatrix::from_row_slice(
        4,
        4,
        &[
            s * ch,
            s * sh,
            0.0,
            0.0,
            s * sh,
            s * ch,
            0.0,
            0.0,
            0.0,
            0.0,
            s * ch,
            -s * sh,
            0.0,
            0.0,
            -s * sh,
            s * ch,
        ],
    );
    GaussianState::new(
        DVector::zeros(4),
        cov,
        Picture::Commutative,
        CoordOrdering::global(2),
        hbar,
    )
}
