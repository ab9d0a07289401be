//! Linear Gaussian dynamics generated by quadratic Hamiltonians.
//!
//! For H(z) = (1/2) z^T G z + c^T z the bracket of H against any Gaussian
//! Wigner function reduces exactly to the Poisson bracket of the governing
//! form F, so the flow is the affine map z -> exp(t F G) z + drift and
//! Gaussian states stay Gaussian. No integrator is involved: the propagator
//! is a single matrix exponential, which keeps the composition law and the
//! volume invariant at working precision.

use nalgebra::{DMatrix, DVector};

use crate::algebra::{check_symmetric, PhaseSpaceForm};
use crate::criteria::form_matches_picture;
use crate::darboux::DarbouxMap;
use crate::error::{NcError, Result};
use crate::gaussian::GaussianState;
use crate::ordering::{layout_permutation, permute_matrix, permute_vector, CoordOrdering};

/// H(z) = (1/2) z^T G z + linear . z over the tagged coordinate layout.
#[derive(Debug, Clone)]
pub struct QuadraticHamiltonian {
    pub g: DMatrix<f64>,
    pub linear: Option<DVector<f64>>,
    pub ordering: CoordOrdering,
}

impl QuadraticHamiltonian {
    pub fn new(
        g: DMatrix<f64>,
        linear: Option<DVector<f64>>,
        ordering: CoordOrdering,
    ) -> Result<Self> {
        let dim = ordering.dim();
        if g.nrows() != dim || g.ncols() != dim {
            return Err(NcError::ShapeMismatch(format!(
                "Hessian must be {dim}x{dim} for {}, got {}x{}",
                ordering.describe(),
                g.nrows(),
                g.ncols()
            )));
        }
        check_symmetric(&g)?;
        if let Some(v) = &linear {
            if v.len() != dim {
                return Err(NcError::ShapeMismatch(format!(
                    "linear term must have length {dim}, got {}",
                    v.len()
                )));
            }
        }
        Ok(QuadraticHamiltonian {
            g,
            linear,
            ordering,
        })
    }

    pub fn dim(&self) -> usize {
        self.g.nrows()
    }

    pub fn convert_ordering(&self, to: CoordOrdering) -> Result<QuadraticHamiltonian> {
        let perm = layout_permutation(self.ordering, to)?;
        QuadraticHamiltonian::new(
            permute_matrix(&self.g, &perm),
            self.linear.as_ref().map(|v| permute_vector(v, &perm)),
            to,
        )
    }
}

/// The same Hamiltonian expressed in the commutative Darboux variables:
/// H(z) = H(S zeta) has Hessian S^T G S and linear part S^T linear.
pub fn hamiltonian_in_commutative_variables(
    h: &QuadraticHamiltonian,
    map: &DarbouxMap,
) -> Result<QuadraticHamiltonian> {
    if h.dim() != map.dim() {
        return Err(NcError::DimensionMismatch(format!(
            "Hamiltonian dimension {} does not match map dimension {}",
            h.dim(),
            map.dim()
        )));
    }
    if h.ordering != map.ordering() {
        return Err(NcError::OrderingMismatch(format!(
            "Hamiltonian layout {} does not match map layout {}",
            h.ordering.describe(),
            map.ordering().describe()
        )));
    }
    let g = map.s.transpose() * &h.g * &map.s;
    let g = (&g + g.transpose()) * 0.5;
    let linear = h.linear.as_ref().map(|v| map.s.transpose() * v);
    QuadraticHamiltonian::new(g, linear, h.ordering)
}

/// Flow the state for time t under the bracket of the given form:
/// mean -> P mean + drift, cov -> P cov P^T with P = exp(t form G). The
/// drift comes from the linear term through the variation-of-constants
/// integral, evaluated as one augmented exponential so no quadrature
/// error enters.
pub fn evolve(
    state: &GaussianState,
    h: &QuadraticHamiltonian,
    form: &PhaseSpaceForm,
    t: f64,
) -> Result<GaussianState> {
    let dim = state.dim();
    if h.dim() != dim || form.dim() != dim {
        return Err(NcError::ShapeMismatch(format!(
            "state dimension {dim} needs a matching Hamiltonian ({}) and form ({})",
            h.dim(),
            form.dim()
        )));
    }
    if state.ordering != h.ordering || state.ordering != form.ordering {
        return Err(NcError::OrderingMismatch(format!(
            "state layout {} vs Hamiltonian {} vs form {}",
            state.ordering.describe(),
            h.ordering.describe(),
            form.ordering.describe()
        )));
    }
    form_matches_picture(form, state.picture, state.hbar)?;

    let a = &form.matrix * &h.g;
    let drive = h
        .linear
        .as_ref()
        .map(|v| &form.matrix * v)
        .filter(|b| b.amax() > 0.0);
    let (propagator, drift) = match drive {
        Some(b) => {
            let mut aug = DMatrix::zeros(dim + 1, dim + 1);
            aug.view_mut((0, 0), (dim, dim)).copy_from(&a);
            aug.view_mut((0, dim), (dim, 1)).copy_from(&b);
            let e = (aug * t).exp();
            (
                e.view((0, 0), (dim, dim)).into_owned(),
                DVector::from_fn(dim, |i, _| e[(i, dim)]),
            )
        }
        None => ((a * t).exp(), DVector::zeros(dim)),
    };
    let mean = &propagator * &state.mean + drift;
    let cov = &propagator * &state.cov * propagator.transpose();
    let cov = (&cov + cov.transpose()) * 0.5;
    GaussianState::new(mean, cov, state.picture, state.ordering, state.hbar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_omega, max_abs, FormRole, NCParameters, OmegaLayout};
    use crate::criteria::rsup_check;
    use crate::darboux::{build_planar_s, planar_sw_constants};
    use crate::gaussian::{make_two_mode_squeezed, make_vacuum, Picture};
    use crate::ordering::{standard_j_matrix, ModePartition};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn j_form(n: usize, hbar: f64) -> PhaseSpaceForm {
        let part = ModePartition::new(n, 0).unwrap();
        build_omega(
            &NCParameters::commutative(n, hbar).unwrap(),
            &part,
            OmegaLayout::Full,
        )
        .unwrap()
    }

    fn seeded_symmetric(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        (&raw + raw.transpose()) * 0.5
    }

    #[test]
    fn zero_time_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let state = make_two_mode_squeezed(0.3, 1.0).unwrap();
        let g = seeded_symmetric(4, &mut rng);
        let h = QuadraticHamiltonian::new(g, None, state.ordering).unwrap();
        let out = evolve(&state, &h, &j_form(2, 1.0), 0.0).unwrap();
        assert!(max_abs(&(&out.cov - &state.cov)) <= 1e-14);
        assert!((&out.mean - &state.mean).amax() <= 1e-14);
    }

    #[test]
    fn free_oscillator_returns_after_full_period() {
        let mut state = make_vacuum(1, 1.0).unwrap();
        state.mean = DVector::from_vec(vec![1.0, 0.5]);
        let h = QuadraticHamiltonian::new(DMatrix::identity(2, 2), None, state.ordering).unwrap();
        let out = evolve(&state, &h, &j_form(1, 1.0), 2.0 * std::f64::consts::PI).unwrap();
        assert!((&out.mean - &state.mean).amax() <= 1e-9);
        assert!(max_abs(&(&out.cov - &state.cov)) <= 1e-9);
    }

    fn seeded_positive_definite(dim: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
        // stable oscillator Hessians: positive definite G keeps the flow
        // bounded, so the conserved determinant is testable in f64
        let raw = DMatrix::from_fn(dim, dim, |_, _| rng.gen_range(-1.0..1.0));
        &raw * raw.transpose() * 0.4 + DMatrix::identity(dim, dim) * 0.2
    }

    #[test]
    fn determinant_invariant_under_both_flows() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let c_state = make_two_mode_squeezed(0.4, 1.0).unwrap();
        let nc_state = c_state.reinterpret_picture(Picture::Noncommutative);
        let params = NCParameters::planar(0.2, 0.1, 1.0).unwrap();
        let part = ModePartition::new(2, 0).unwrap();
        let omega = build_omega(&params, &part, OmegaLayout::Full).unwrap();
        let d0 = c_state.cov.clone().lu().determinant();
        for _ in 0..5 {
            let g = seeded_positive_definite(4, &mut rng);
            let h = QuadraticHamiltonian::new(g, None, c_state.ordering).unwrap();
            let t = rng.gen_range(0.1..4.0 * std::f64::consts::PI);
            let dc = evolve(&c_state, &h, &j_form(2, 1.0), t)
                .unwrap()
                .cov
                .lu()
                .determinant();
            let dnc = evolve(&nc_state, &h, &omega, t)
                .unwrap()
                .cov
                .lu()
                .determinant();
            assert!((dc - d0).abs() / d0 <= 1e-8);
            assert!((dnc - d0).abs() / d0 <= 1e-8);
        }
    }

    #[test]
    fn composition_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let state = make_two_mode_squeezed(0.25, 1.0).unwrap();
        let g = seeded_symmetric(4, &mut rng);
        let linear = DVector::from_fn(4, |_, _| rng.gen_range(-0.5..0.5));
        let h = QuadraticHamiltonian::new(g, Some(linear), state.ordering).unwrap();
        let form = j_form(2, 1.0);
        let (t1, t2) = (0.7, 1.9);
        let direct = evolve(&state, &h, &form, t1 + t2).unwrap();
        let staged = evolve(&evolve(&state, &h, &form, t1).unwrap(), &h, &form, t2).unwrap();
        assert!(max_abs(&(&direct.cov - &staged.cov)) <= 1e-9);
        assert!((&direct.mean - &staged.mean).amax() <= 1e-9);
    }

    #[test]
    fn drift_matches_closed_form_for_zero_hessian() {
        let state = make_vacuum(1, 1.0).unwrap();
        let c = DVector::from_vec(vec![0.3, -0.8]);
        let h = QuadraticHamiltonian::new(DMatrix::zeros(2, 2), Some(c.clone()), state.ordering)
            .unwrap();
        let form = j_form(1, 1.0);
        let t = 1.7;
        let out = evolve(&state, &h, &form, t).unwrap();
        let expected = &state.mean + &form.matrix * c * t;
        assert!((&out.mean - expected).amax() <= 1e-12);
        assert!(max_abs(&(&out.cov - &state.cov)) <= 1e-12);
    }

    #[test]
    fn driven_oscillator_drift_closed_form() {
        let state = make_vacuum(1, 1.0).unwrap();
        let c = DVector::from_vec(vec![0.4, 0.9]);
        let h = QuadraticHamiltonian::new(DMatrix::identity(2, 2), Some(c.clone()), state.ordering)
            .unwrap();
        let form = j_form(1, 1.0);
        let t = 0.9_f64;
        let out = evolve(&state, &h, &form, t).unwrap();
        // A = J, b = J c, drift = A^{-1} (exp(tA) - I) b = (exp(tJ) - I) c
        let rot = DMatrix::from_row_slice(2, 2, &[t.cos(), t.sin(), -t.sin(), t.cos()]);
        let expected = (rot - DMatrix::identity(2, 2)) * c;
        assert!((&out.mean - expected).amax() <= 1e-12);
    }

    #[test]
    fn quantumness_verdict_invariant_along_flow() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let form = j_form(2, 1.0);
        for _ in 0..5 {
            let g = seeded_symmetric(4, &mut rng);
            let h = QuadraticHamiltonian::new(g, None, CoordOrdering::global(2)).unwrap();
            let state = make_two_mode_squeezed(rng.gen_range(0.0..0.8), 1.0).unwrap();
            let before = rsup_check(&state, &form).unwrap().passes;
            for k in 1..=10 {
                let t = 0.4 * k as f64;
                let evolved = evolve(&state, &h, &form, t).unwrap();
                assert_eq!(rsup_check(&evolved, &form).unwrap().passes, before);
            }
        }
    }

    #[test]
    fn commutative_variable_hamiltonian_recomposes() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let map = build_planar_s(&planar_sw_constants(0.2, 0.1, 1.0).unwrap()).unwrap();
        let g = seeded_symmetric(4, &mut rng);
        let h = QuadraticHamiltonian::new(g.clone(), None, map.ordering()).unwrap();
        let tilde = hamiltonian_in_commutative_variables(&h, &map).unwrap();
        let recomposed = map.s_inv.transpose() * &tilde.g * &map.s_inv;
        assert!(max_abs(&(recomposed - g)) <= 1e-12);
    }

    #[test]
    fn pairing_and_ordering_are_enforced() {
        let state = make_two_mode_squeezed(0.2, 1.0).unwrap();
        let h = QuadraticHamiltonian::new(DMatrix::identity(4, 4), None, state.ordering).unwrap();
        let params = NCParameters::planar(0.3, 0.2, 1.0).unwrap();
        let part = ModePartition::new(2, 0).unwrap();
        let omega = build_omega(&params, &part, OmegaLayout::Full).unwrap();
        assert!(matches!(
            evolve(&state, &h, &omega, 1.0),
            Err(NcError::PictureFormMismatch(_))
        ));
        let part11 = ModePartition::bipartite(1, 1).unwrap();
        let pb = CoordOrdering::party(&part11);
        let j_pb = PhaseSpaceForm::new(standard_j_matrix(pb), pb, FormRole::StandardJ).unwrap();
        assert!(matches!(
            evolve(&state, &h, &j_pb, 1.0),
            Err(NcError::OrderingMismatch(_))
        ));
    }

    #[test]
    fn hamiltonian_rejects_asymmetric_hessian() {
        let g = DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.2, 1.0]);
        assert!(matches!(
            QuadraticHamiltonian::new(g, None, CoordOrdering::global(1)),
            Err(NcError::SymmetryViolation { .. })
        ));
    }

    #[test]
    fn hamiltonian_ordering_conversion_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let g = seeded_symmetric(8, &mut rng);
        let part = ModePartition::bipartite(2, 2).unwrap();
        let h = QuadraticHamiltonian::new(g.clone(), None, CoordOrdering::global(4)).unwrap();
        let pb = h.convert_ordering(CoordOrdering::party(&part)).unwrap();
        let back = pb.convert_ordering(CoordOrdering::global(4)).unwrap();
        assert_eq!(back.g, g);
    }
}
