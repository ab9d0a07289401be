//! Coordinate layouts for 2n-dimensional phase-space vectors and the
//! permutations between them.
//!
//! Two layouts are supported. `GlobalBlocked` lists all positions then all
//! momenta, (x_1..x_n, p_1..p_n). `PartyBlocked` groups coordinates by
//! party, (x_1..x_{n_A}, p_1..p_{n_A} | x_1..x_{n_B}, p_1..p_{n_B}).
//! Every matrix and vector type in the crate carries its layout tag;
//! combining objects with different tags is a hard error, and conversion
//! is always an explicit permutation.

use nalgebra::{DMatrix, DVector};

use crate::error::{NcError, Result};

/// Bipartition of the mode set. `n_b = 0` marks a single-party layout.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModePartition {
    pub n_a: usize,
    pub n_b: usize,
}

impl ModePartition {
    pub fn new(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 {
            return Err(NcError::PartitionMismatch(
                "party A must contain at least one mode".into(),
            ));
        }
        Ok(Self { n_a, n_b })
    }

    pub fn bipartite(n_a: usize, n_b: usize) -> Result<Self> {
        if n_a == 0 || n_b == 0 {
            return Err(NcError::PartitionMismatch(format!(
                "bipartite operations need n_A >= 1 and n_B >= 1, got ({n_a}, {n_b})"
            )));
        }
        Ok(Self { n_a, n_b })
    }

    pub fn n_modes(&self) -> usize {
        self.n_a + self.n_b
    }

    pub fn is_bipartite(&self) -> bool {
        self.n_b > 0
    }
}

/// Coordinate layout tag. Carries the mode split so that permutations and
/// standard forms are derivable from the tag alone.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoordOrdering {
    GlobalBlocked { n_modes: usize },
    PartyBlocked { n_a: usize, n_b: usize },
}

impl CoordOrdering {
    pub fn global(n_modes: usize) -> Self {
        CoordOrdering::GlobalBlocked { n_modes }
    }

    pub fn party(partition: &ModePartition) -> Self {
        CoordOrdering::PartyBlocked {
            n_a: partition.n_a,
            n_b: partition.n_b,
        }
    }

    pub fn n_modes(&self) -> usize {
        match *self {
            CoordOrdering::GlobalBlocked { n_modes } => n_modes,
            CoordOrdering::PartyBlocked { n_a, n_b } => n_a + n_b,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.n_modes()
    }

    /// Slot of x_mode in this layout (modes indexed 0..n over both parties).
    pub fn x_slot(&self, mode: usize) -> usize {
        match *self {
            CoordOrdering::GlobalBlocked { .. } => mode,
            CoordOrdering::PartyBlocked { n_a, .. } => {
                if mode < n_a {
                    mode
                } else {
                    2 * n_a + (mode - n_a)
                }
            }
        }
    }

    /// Slot of p_mode in this layout.
    pub fn p_slot(&self, mode: usize) -> usize {
        match *self {
            CoordOrdering::GlobalBlocked { n_modes } => n_modes + mode,
            CoordOrdering::PartyBlocked { n_a, n_b } => {
                if mode < n_a {
                    n_a + mode
                } else {
                    2 * n_a + n_b + (mode - n_a)
                }
            }
        }
    }

    pub fn describe(&self) -> String {
        match *self {
            CoordOrdering::GlobalBlocked { n_modes } => {
                format!("global_blocked({n_modes} modes)")
            }
            CoordOrdering::PartyBlocked { n_a, n_b } => {
                format!("party_blocked({n_a}+{n_b} modes)")
            }
        }
    }
}

/// Permutation taking a vector laid out as `from` to layout `to`:
/// `out[j] = v[perm[j]]`. Errors unless both tags describe the same modes.
pub fn layout_permutation(from: CoordOrdering, to: CoordOrdering) -> Result<Vec<usize>> {
    if from.n_modes() != to.n_modes() {
        return Err(NcError::OrderingMismatch(format!(
            "cannot convert {} to {}: different mode counts",
            from.describe(),
            to.describe()
        )));
    }
    let compatible = match (from, to) {
        (
            CoordOrdering::PartyBlocked { n_a: a1, n_b: b1 },
            CoordOrdering::PartyBlocked { n_a: a2, n_b: b2 },
        ) => a1 == a2 && b1 == b2,
        _ => true,
    };
    if !compatible {
        return Err(NcError::OrderingMismatch(format!(
            "cannot convert {} to {}: incompatible partitions",
            from.describe(),
            to.describe()
        )));
    }
    let n = from.n_modes();
    let mut perm = vec![0usize; 2 * n];
    for mode in 0..n {
        perm[to.x_slot(mode)] = from.x_slot(mode);
        perm[to.p_slot(mode)] = from.p_slot(mode);
    }
    Ok(perm)
}

pub fn permute_vector(v: &DVector<f64>, perm: &[usize]) -> DVector<f64> {
    DVector::from_fn(v.len(), |i, _| v[perm[i]])
}

pub fn permute_matrix(m: &DMatrix<f64>, perm: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], perm[j])])
}

/// Standard symplectic matrix in the given layout, unscaled.
/// Global-blocked: [[0, I],[-I, 0]]. Party-blocked: the same block per party.
pub fn standard_j_matrix(ordering: CoordOrdering) -> DMatrix<f64> {
    let n = ordering.n_modes();
    let mut j = DMatrix::zeros(2 * n, 2 * n);
    for mode in 0..n {
        let x = ordering.x_slot(mode);
        let p = ordering.p_slot(mode);
        j[(x, p)] = 1.0;
        j[(p, x)] = -1.0;
    }
    j
}
