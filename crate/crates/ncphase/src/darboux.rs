//! Darboux maps: invertible linear maps S realizing Omega = S (hbar J) S^T.
//!
//! The planar two-mode case has a closed form built from two constants nu
//! and mu; the general even-dimensional case is solved numerically by
//! symplectic Gram-Schmidt. S is not unique, only the correspondence is;
//! both paths are deterministic so repeated runs agree bitwise.

use nalgebra::DMatrix;

use crate::algebra::{check_skew, max_abs, PhaseSpaceForm};
use crate::error::{NcError, Result};
use crate::ordering::{standard_j_matrix, CoordOrdering};

pub const MAP_TOL: f64 = 1e-10;
const PIVOT_TOL: f64 = 1e-10;

/// Constants of the planar map
/// x_i = nu q_i - (theta / 2 nu hbar) eps_ij k_j,
/// p_i = mu k_i + (eta / 2 mu hbar) eps_ij q_j.
/// Consistency of the mixed commutator forces
/// nu mu + theta eta / (4 nu mu hbar^2) = 1.
#[derive(Debug, Clone, Copy)]
pub struct PlanarSWConstants {
    pub nu: f64,
    pub mu: f64,
    pub theta: f64,
    pub eta: f64,
    pub hbar: f64,
}

impl PlanarSWConstants {
    /// Residual of the consistency constraint; zero for valid constants.
    pub fn constraint_residual(&self) -> f64 {
        self.nu * self.mu + self.theta * self.eta / (4.0 * self.nu * self.mu * self.hbar.powi(2))
            - 1.0
    }
}

/// Solve for the symmetric choice nu = mu = sqrt(lambda) with
/// lambda = (1 + sqrt(1 - theta*eta/hbar^2)) / 2 (the root continuous with
/// the commutative limit). Requires theta*eta < hbar^2 strictly.
pub fn planar_sw_constants(theta: f64, eta: f64, hbar: f64) -> Result<PlanarSWConstants> {
    if !(hbar > 0.0) {
        return Err(NcError::DimensionMismatch(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    let product = theta * eta;
    let hbar_sq = hbar * hbar;
    if product >= hbar_sq {
        return Err(NcError::DeformationTooLarge { product, hbar_sq });
    }
    let lambda = 0.5 * (1.0 + (1.0 - product / hbar_sq).sqrt());
    let nu = lambda.sqrt();
    let c = PlanarSWConstants {
        nu,
        mu: nu,
        theta,
        eta,
        hbar,
    };
    debug_assert!(c.constraint_residual().abs() <= 1e-12);
    Ok(c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DarbouxMethod {
    PlanarClosedForm,
    SymplecticGramSchmidt,
}

/// An invertible map with certified correspondence
/// ||S (hbar J) S^T - Omega||_max <= 1e-10, J taken in the layout of the
/// source form. Domain and codomain share that layout.
#[derive(Debug, Clone)]
pub struct DarbouxMap {
    pub s: DMatrix<f64>,
    pub s_inv: DMatrix<f64>,
    pub source_form: PhaseSpaceForm,
    pub method: DarbouxMethod,
    pub hbar: f64,
}

impl DarbouxMap {
    fn certify(self) -> Result<Self> {
        let dim = self.s.nrows();
        let inv_dev = max_abs(&(&self.s * &self.s_inv - DMatrix::identity(dim, dim)));
        if inv_dev > MAP_TOL {
            return Err(NcError::NonInvertible);
        }
        let resid = self.correspondence_residual();
        if resid > MAP_TOL {
            return Err(NcError::SingularForm { scaled_det: resid });
        }
        Ok(self)
    }

    /// ||S (hbar J) S^T - Omega||_max.
    pub fn correspondence_residual(&self) -> f64 {
        let j = standard_j_matrix(self.source_form.ordering) * self.hbar;
        max_abs(&(&self.s * j * self.s.transpose() - &self.source_form.matrix))
    }

    pub fn ordering(&self) -> CoordOrdering {
        self.source_form.ordering
    }

    pub fn dim(&self) -> usize {
        self.s.nrows()
    }
}

/// Closed-form planar map on (q1, q2, k1, k2) -> (x1, x2, p1, p2),
/// global-blocked on both sides.
pub fn build_planar_s(constants: &PlanarSWConstants) -> Result<DarbouxMap> {
    let PlanarSWConstants {
        nu,
        mu,
        theta,
        eta,
        hbar,
    } = *constants;
    let b = -theta / (2.0 * nu * hbar);
    let c = eta / (2.0 * mu * hbar);
    let s = DMatrix::from_row_slice(
        4,
        4,
        &[
            nu, 0.0, 0.0, b, 0.0, nu, -b, 0.0, 0.0, c, mu, 0.0, -c, 0.0, 0.0, mu,
        ],
    );
    let s_inv = s.clone().lu().try_inverse().ok_or(NcError::NonInvertible)?;
    let ordering = CoordOrdering::global(2);
    let omega = &s * (standard_j_matrix(ordering) * hbar) * s.transpose();
    let source_form = PhaseSpaceForm::new(omega, ordering, crate::algebra::FormRole::Omega)?;
    DarbouxMap {
        s,
        s_inv,
        source_form,
        method: DarbouxMethod::PlanarClosedForm,
        hbar,
    }
    .certify()
}

/// Symplectic Gram-Schmidt for arbitrary even dimension.
///
/// Builds a basis T with T^T Omega T = hbar J. Primary vectors are the
/// standard basis vectors in index order, projected against the pairs
/// found so far; the partner is the projected candidate whose pairing
/// with the primary is largest in magnitude (complete pivoting, ties to
/// the lowest index). Pivoting on the largest pairing keeps the map well
/// conditioned when some sector entries are tiny, since dividing by a
/// near-threshold pairing would blow up the partner column. Columns are
/// arranged so that pair k occupies the x/p slots of mode k in the
/// layout of the input form, and S = T^{-T}. For a block-diagonal Omega
/// the pivot order never mixes parties, so S comes out block-diagonal.
pub fn build_general_s(omega: &PhaseSpaceForm, hbar: f64) -> Result<DarbouxMap> {
    if !(hbar > 0.0) {
        return Err(NcError::DimensionMismatch(format!(
            "hbar must be positive, got {hbar}"
        )));
    }
    check_skew(&omega.matrix)?;
    let dim = omega.dim();
    let n = dim / 2;
    let m = &omega.matrix;

    let pairing = |u: &DMatrix<f64>, v: &DMatrix<f64>| -> f64 { (u.transpose() * m * v)[(0, 0)] };

    let basis: Vec<DMatrix<f64>> = (0..dim)
        .map(|i| {
            let mut e = DMatrix::zeros(dim, 1);
            e[(i, 0)] = 1.0;
            e
        })
        .collect();

    // project v against the found pairs so its pairing with each vanishes
    let project = |v: &DMatrix<f64>, pairs: &[(DMatrix<f64>, DMatrix<f64>)]| -> DMatrix<f64> {
        let mut u = v.clone();
        for (e, f) in pairs {
            let a = pairing(f, &u) / hbar;
            let b = pairing(e, &u) / hbar;
            u += e * a - f * b;
        }
        u
    };

    let mut pairs: Vec<(DMatrix<f64>, DMatrix<f64>)> = Vec::with_capacity(n);
    let mut primary_cursor = 0usize;
    while pairs.len() < n {
        let mut found = None;
        while primary_cursor < dim {
            let u = project(&basis[primary_cursor], &pairs);
            primary_cursor += 1;
            if u.amax() > PIVOT_TOL {
                found = Some(u);
                break;
            }
        }
        let u = found.ok_or(NcError::SingularForm { scaled_det: 0.0 })?;

        let mut partner: Option<(f64, DMatrix<f64>)> = None;
        for cand in &basis {
            let w = project(cand, &pairs);
            let pivot = pairing(&u, &w);
            if pivot.abs() > PIVOT_TOL
                && partner.as_ref().is_none_or(|(best, _)| pivot.abs() > *best)
            {
                partner = Some((pivot.abs(), w * (hbar / pivot)));
            }
        }
        let f = partner
            .map(|(_, f)| f)
            .ok_or(NcError::SingularForm { scaled_det: 0.0 })?;
        pairs.push((u, f));
    }

    let mut t = DMatrix::zeros(dim, dim);
    for (mode, (e, f)) in pairs.iter().enumerate() {
        t.set_column(omega.ordering.x_slot(mode), &e.column(0));
        t.set_column(omega.ordering.p_slot(mode), &f.column(0));
    }
    let t_inv = t
        .clone()
        .lu()
        .try_inverse()
        .ok_or(NcError::SingularForm { scaled_det: 0.0 })?;
    let s = t_inv.transpose();
    let s_inv = t.transpose();
    DarbouxMap {
        s,
        s_inv,
        source_form: omega.clone(),
        method: DarbouxMethod::SymplecticGramSchmidt,
        hbar,
    }
    .certify()
}
