//! Algebraic skeleton of the deformed phase space: the forms Omega, J,
//! the mirror reflection Lambda, its conjugate D, and Omega'.
//!
//! The deformed commutators are encoded by a skew form Omega built from
//! three blocks: a position-sector skew matrix Theta, a momentum-sector
//! skew matrix Pi (called `eta` in the scalar planar case), and hbar times
//! the identity coupling positions to momenta. At Theta = Pi = 0 the form
//! reduces to hbar J with J the standard symplectic matrix.

use nalgebra::DMatrix;

use crate::darboux::DarbouxMap;
use crate::error::{NcError, Result};
use crate::ordering::{
    layout_permutation, permute_matrix, standard_j_matrix, CoordOrdering, ModePartition,
};

pub const SKEW_TOL: f64 = 1e-12;
pub const SINGULAR_TOL: f64 = 1e-14;
pub const CROSS_PARTY_TOL: f64 = 1e-14;
pub const IDENTITY_TOL: f64 = 1e-10;

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, &x| a.max(x.abs()))
}

pub fn check_skew(m: &DMatrix<f64>) -> Result<()> {
    let dev = max_abs(&(m + m.transpose()));
    if dev > SKEW_TOL {
        return Err(NcError::NotSkewSymmetric { max_dev: dev });
    }
    Ok(())
}

pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    let dev = max_abs(&(m - m.transpose()));
    if dev > SKEW_TOL {
        return Err(NcError::SymmetryViolation { max_dev: dev });
    }
    Ok(())
}

/// Deformation data: mode count, hbar, and the two skew sector matrices.
#[derive(Debug, Clone)]
pub struct NCParameters {
    pub n_modes: usize,
    pub hbar: f64,
    pub theta: DMatrix<f64>,
    pub eta: DMatrix<f64>,
}

impl NCParameters {
    pub fn new(n_modes: usize, hbar: f64, theta: DMatrix<f64>, eta: DMatrix<f64>) -> Result<Self> {
        if n_modes == 0 {
            return Err(NcError::DimensionMismatch(
                "n_modes must be positive".into(),
            ));
        }
        if !(hbar > 0.0) {
            return Err(NcError::DimensionMismatch(format!(
                "hbar must be positive, got {hbar}"
            )));
        }
        for (name, m) in [("theta", &theta), ("eta", &eta)] {
            if m.nrows() != n_modes || m.ncols() != n_modes {
                return Err(NcError::DimensionMismatch(format!(
                    "{name} must be {n_modes}x{n_modes}, got {}x{}",
                    m.nrows(),
                    m.ncols()
                )));
            }
            check_skew(m)?;
        }
        Ok(Self {
            n_modes,
            hbar,
            theta,
            eta,
        })
    }

    /// Planar two-mode parameters with scalar deformations:
    /// Theta = theta * eps, Pi = eta * eps, eps = [[0,1],[-1,0]].
    pub fn planar(theta: f64, eta: f64, hbar: f64) -> Result<Self> {
        Self::new(
            2,
            hbar,
            planar_stack_skew(2, theta),
            planar_stack_skew(2, eta),
        )
    }

    /// Zero deformation for n modes.
    pub fn commutative(n_modes: usize, hbar: f64) -> Result<Self> {
        Self::new(
            n_modes,
            hbar,
            DMatrix::zeros(n_modes, n_modes),
            DMatrix::zeros(n_modes, n_modes),
        )
    }

    pub fn is_commutative(&self) -> bool {
        max_abs(&self.theta) <= CROSS_PARTY_TOL && max_abs(&self.eta) <= CROSS_PARTY_TOL
    }
}

/// n x n skew matrix with coefficient c on stacked 2x2 eps blocks:
/// M[2k, 2k+1] = c, M[2k+1, 2k] = -c, trailing odd mode left zero.
pub fn planar_stack_skew(n: usize, c: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    let mut k = 0;
    while k + 1 < n {
        m[(k, k + 1)] = c;
        m[(k + 1, k)] = -c;
        k += 2;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FormRole {
    Omega,
    StandardJ,
    OmegaPrime,
    Custom,
}

impl FormRole {
    pub fn as_str(&self) -> &'static str {
        match self {
            FormRole::Omega => "omega",
            FormRole::StandardJ => "standard_j",
            FormRole::OmegaPrime => "omega_prime",
            FormRole::Custom => "custom",
        }
    }
}

/// A 2n x 2n real skew nonsingular matrix with a layout tag and a role.
#[derive(Debug, Clone)]
pub struct PhaseSpaceForm {
    pub matrix: DMatrix<f64>,
    pub ordering: CoordOrdering,
    pub role: FormRole,
}

impl PhaseSpaceForm {
    pub fn new(matrix: DMatrix<f64>, ordering: CoordOrdering, role: FormRole) -> Result<Self> {
        let dim = ordering.dim();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(NcError::ShapeMismatch(format!(
                "form must be {dim}x{dim} for {}, got {}x{}",
                ordering.describe(),
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        check_skew(&matrix)?;
        let scaled = scaled_det(&matrix);
        if scaled.abs() <= SINGULAR_TOL {
            return Err(NcError::SingularForm {
                scaled_det: scaled.abs(),
            });
        }
        if role == FormRole::StandardJ {
            let j = standard_j_matrix(ordering);
            if matrix != j {
                return Err(NcError::ShapeMismatch(
                    "role standard_j requires the exact standard symplectic matrix".into(),
                ));
            }
        }
        Ok(Self {
            matrix,
            ordering,
            role,
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn n_modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn convert_ordering(&self, to: CoordOrdering) -> Result<PhaseSpaceForm> {
        if to == self.ordering {
            return Ok(self.clone());
        }
        let perm = layout_permutation(self.ordering, to)?;
        Ok(PhaseSpaceForm {
            matrix: permute_matrix(&self.matrix, &perm),
            ordering: to,
            role: self.role,
        })
    }

    /// True when the matrix equals hbar * J for this layout, entrywise to
    /// the construction tolerance. This is the pairing test for states in
    /// the commutative picture.
    pub fn is_commutative_form(&self, hbar: f64) -> bool {
        let j = standard_j_matrix(self.ordering);
        max_abs(&(&self.matrix - j * hbar)) <= SKEW_TOL
    }
}

/// |det M| / max_entry^(2n), the scale-free singularity measure.
fn scaled_det(m: &DMatrix<f64>) -> f64 {
    let scale = max_abs(m);
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let det = m.clone().lu().determinant();
    det / scale.powi(n as i32)
}

/// Standard symplectic form [[0, I], [-I, 0]] in global-blocked layout.
pub fn build_j(n_modes: usize) -> PhaseSpaceForm {
    let ordering = CoordOrdering::global(n_modes);
    PhaseSpaceForm {
        matrix: standard_j_matrix(ordering),
        ordering,
        role: FormRole::StandardJ,
    }
}

/// Layout requested from `build_omega`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OmegaLayout {
    /// Party-blocked Diag[Omega_A, Omega_B]; cross-party deformation is an
    /// error. This is the layout the separability criterion requires.
    Bipartite,
    /// Global-blocked [[Theta, hbar I], [-hbar I, Pi]] with the full sector
    /// matrices; cross-party deformation is accepted and tags the result
    /// role = custom.
    Full,
}

/// Assemble the deformed form Omega from the sector matrices.
pub fn build_omega(
    params: &NCParameters,
    partition: &ModePartition,
    layout: OmegaLayout,
) -> Result<PhaseSpaceForm> {
    if partition.n_modes() != params.n_modes {
        return Err(NcError::PartitionMismatch(format!(
            "partition covers {} modes but parameters have {}",
            partition.n_modes(),
            params.n_modes
        )));
    }
    let n = params.n_modes;
    let cross = cross_party_magnitude(params, partition);
    match layout {
        OmegaLayout::Bipartite => {
            if cross > CROSS_PARTY_TOL {
                return Err(NcError::PartitionMismatch(format!(
                    "bipartite form requested but cross-party noncommutativity {cross:.3e} present"
                )));
            }
            let ordering = CoordOrdering::party(partition);
            let mut m = DMatrix::zeros(2 * n, 2 * n);
            for i in 0..n {
                for j in 0..n {
                    m[(ordering.x_slot(i), ordering.x_slot(j))] = params.theta[(i, j)];
                    m[(ordering.p_slot(i), ordering.p_slot(j))] = params.eta[(i, j)];
                }
                m[(ordering.x_slot(i), ordering.p_slot(i))] = params.hbar;
                m[(ordering.p_slot(i), ordering.x_slot(i))] = -params.hbar;
            }
            PhaseSpaceForm::new(m, ordering, FormRole::Omega)
        }
        OmegaLayout::Full => {
            let ordering = CoordOrdering::global(n);
            let mut m = DMatrix::zeros(2 * n, 2 * n);
            m.view_mut((0, 0), (n, n)).copy_from(&params.theta);
            m.view_mut((n, n), (n, n)).copy_from(&params.eta);
            for i in 0..n {
                m[(i, n + i)] = params.hbar;
                m[(n + i, i)] = -params.hbar;
            }
            let role = if cross > CROSS_PARTY_TOL {
                FormRole::Custom
            } else {
                FormRole::Omega
            };
            PhaseSpaceForm::new(m, ordering, role)
        }
    }
}

fn cross_party_magnitude(params: &NCParameters, partition: &ModePartition) -> f64 {
    if !partition.is_bipartite() {
        return 0.0;
    }
    let n_a = partition.n_a;
    let mut worst = 0.0f64;
    for m in [&params.theta, &params.eta] {
        for i in 0..n_a {
            for j in n_a..params.n_modes {
                worst = worst.max(m[(i, j)].abs()).max(m[(j, i)].abs());
            }
        }
    }
    worst
}

/// Mirror reflection of party B momenta: Diag[I_A, I, -I] in party-blocked
/// layout. Involutive and anti-symplectic on the B block by construction.
pub fn build_lambda(partition: &ModePartition) -> Result<DMatrix<f64>> {
    if !partition.is_bipartite() {
        return Err(NcError::PartitionMismatch(
            "mirror reflection needs a bipartition with n_B >= 1".into(),
        ));
    }
    let ordering = CoordOrdering::party(partition);
    let dim = ordering.dim();
    let mut lam = DMatrix::identity(dim, dim);
    for mode in partition.n_a..partition.n_modes() {
        let p = ordering.p_slot(mode);
        lam[(p, p)] = -1.0;
    }
    Ok(lam)
}

/// Diag[Omega_A, -Omega_B]: party B block sign-flipped.
pub fn build_omega_prime(
    omega: &PhaseSpaceForm,
    partition: &ModePartition,
) -> Result<PhaseSpaceForm> {
    let pb = CoordOrdering::party(partition);
    if omega.ordering != pb {
        return Err(NcError::OrderingMismatch(format!(
            "omega must be party-blocked for {}, got {}",
            pb.describe(),
            omega.ordering.describe()
        )));
    }
    require_block_diagonal(&omega.matrix, partition)?;
    let da = 2 * partition.n_a;
    let db = 2 * partition.n_b;
    let mut m = omega.matrix.clone();
    m.view_mut((da, da), (db, db)).neg_mut();
    Ok(PhaseSpaceForm {
        matrix: m,
        ordering: pb,
        role: FormRole::OmegaPrime,
    })
}

pub fn require_block_diagonal(m: &DMatrix<f64>, partition: &ModePartition) -> Result<()> {
    if !partition.is_bipartite() {
        return Err(NcError::PartitionMismatch(
            "operation needs a bipartition with n_B >= 1".into(),
        ));
    }
    let da = 2 * partition.n_a;
    let db = 2 * partition.n_b;
    if m.nrows() != da + db || m.ncols() != da + db {
        return Err(NcError::ShapeMismatch(format!(
            "matrix is {}x{} but partition needs {}x{}",
            m.nrows(),
            m.ncols(),
            da + db,
            da + db
        )));
    }
    let upper = max_abs(&m.view((0, da), (da, db)).into_owned());
    let lower = max_abs(&m.view((da, 0), (db, da)).into_owned());
    let worst = upper.max(lower);
    if worst > CROSS_PARTY_TOL {
        return Err(NcError::PartitionMismatch(format!(
            "cross-party coupling {worst:.3e} exceeds {CROSS_PARTY_TOL:.0e}"
        )));
    }
    Ok(())
}

/// Conjugated mirror D = S Lambda S^{-1}. With S = Diag[S_A, S_B] this is
/// Diag[I_A, S_B Lambda_B S_B^{-1}]; involutive, generally not orthogonal.
pub fn build_d(
    map: &DarbouxMap,
    lambda: &DMatrix<f64>,
    partition: &ModePartition,
) -> Result<DMatrix<f64>> {
    let dim = 2 * partition.n_modes();
    if map.s.nrows() != dim {
        return Err(NcError::ShapeMismatch(format!(
            "map dimension {} does not match partition dimension {dim}",
            map.s.nrows()
        )));
    }
    if lambda.nrows() != dim || lambda.ncols() != dim {
        return Err(NcError::ShapeMismatch(format!(
            "lambda must be {dim}x{dim}, got {}x{}",
            lambda.nrows(),
            lambda.ncols()
        )));
    }
    require_block_diagonal(&map.s, partition).map_err(|_| {
        NcError::PartitionMismatch(
            "Darboux map must be block-diagonal with respect to the partition".into(),
        )
    })?;
    let d = &map.s * lambda * &map.s_inv;
    let dev = max_abs(&(&d * &d - DMatrix::identity(dim, dim)));
    if dev > IDENTITY_TOL {
        return Err(NcError::NotInvolutive { max_dev: dev });
    }
    Ok(d)
}
