//! Hilbert bases of Δ(1,q) cones by reduction of parallelepiped points, and
//! the two exact IDP tests.

use crate::binning::bin_of;
use crate::simplex::{build_generators, coords_in_cone, fpp_points, ConeBasis, FppPoint, QVector};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertBasis {
    pub generators: ConeBasis,
    /// Additively minimal non-zero parallelepiped points, sorted by
    /// `(height, b)`.
    pub extras: Vec<FppPoint>,
}

impl HilbertBasis {
    /// Total number of basis elements, generators included.
    pub fn size(&self) -> usize {
        self.generators.generators().len() + self.extras.len()
    }

    pub fn max_height(&self) -> i64 {
        self.extras.iter().map(FppPoint::height).max().unwrap_or(1).max(1)
    }
}

/// True if `z - c` lies in `cone ∩ ℤ^{d+1}` for some generator or some
/// non-zero candidate `c` other than `z` itself.
pub fn is_reducible(z: &FppPoint, candidates: &[FppPoint], generators: &ConeBasis, q: &QVector) -> bool {
    let mut diff = vec![0i64; z.coords.len()];
    let mut reduces = |c: &[i64]| {
        for ((d, a), b) in diff.iter_mut().zip(&z.coords).zip(c) {
            *d = a - b;
        }
        coords_in_cone(&diff, q).is_some()
    };
    generators.generators().iter().any(|g| reduces(g))
        || candidates
            .iter()
            .filter(|c| c.b != z.b && !c.weights.is_zero() && c.height() < z.height())
            .any(|c| reduces(&c.coords))
}

/// Reduces a candidate set of parallelepiped points to its additively minimal
/// non-zero members, sorted by `(height, b)`.
///
/// Candidates of height at least `z`'s are skipped when testing `z`: a
/// non-zero difference in the cone has positive height.
pub fn reduce(q: &QVector, candidates: &[FppPoint]) -> HilbertBasis {
    let generators = build_generators(q);
    let mut extras: Vec<FppPoint> = candidates
        .iter()
        .filter(|z| !z.weights.is_zero())
        .filter(|z| !is_reducible(z, candidates, &generators, q))
        .cloned()
        .collect();
    extras.sort_by_key(|p| (p.height(), p.b));
    extras.dedup_by_key(|p| p.b);
    HilbertBasis { generators, extras }
}

pub fn hilbert_basis(q: &QVector) -> HilbertBasis {
    reduce(q, &fpp_points(q))
}

/// IDP by definition: every Hilbert basis element has height 1.
pub fn is_idp(q: &QVector) -> bool {
    hilbert_basis(q).extras.iter().all(|z| z.height() == 1)
}

/// IDP via bins: every extra lies in a bin whose index sums to at most `d+1`.
pub fn is_idp_bins(q: &QVector) -> bool {
    let d = q.dim();
    hilbert_basis(q).extras.iter().all(|z| bin_of(&z.weights, d).sum() <= d + 1)
}
