//! Bins of the fundamental parallelepiped, the relevant-index set, and the
//! sparse Hilbert-basis-in-bin labels.

use std::fmt;

use crate::error::{Error, Result};
use crate::hilbert::hilbert_basis;
use crate::simplex::{QVector, RationalWeights};

/// Largest dimension whose full bin cube `(d+1)^{d+1}` gets a dense rank table.
pub const MAX_BIN_DIM: usize = 6;

/// A multi-index `α ∈ {0, …, d}^{d+1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinIndex(Vec<usize>);

impl BinIndex {
    pub fn new(alpha: Vec<usize>) -> Result<Self> {
        let d = alpha.len().checked_sub(1).filter(|&d| d >= 1).ok_or_else(|| {
            Error::InvalidArgument(format!("bin index needs at least 2 entries, got {}", alpha.len()))
        })?;
        if let Some(a) = alpha.iter().find(|&&a| a > d) {
            return Err(Error::InvalidArgument(format!("bin entry {a} exceeds d={d}")));
        }
        Ok(BinIndex(alpha))
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    pub fn sum(&self) -> usize {
        self.0.iter().sum()
    }

    /// Rank in the lexicographic order of the full cube, first coordinate
    /// most significant.
    pub fn lex_rank(&self) -> usize {
        let base = self.dim() + 1;
        self.0.iter().fold(0, |acc, &a| acc * base + a)
    }

    pub fn unrank(rank: usize, d: usize) -> Result<Self> {
        let base = d + 1;
        let size = cube_size(d).ok_or(Error::DimensionTooLarge(d))?;
        if rank >= size {
            return Err(Error::RankOutOfRange { rank, d });
        }
        let mut alpha = vec![0; base];
        let mut r = rank;
        for slot in alpha.iter_mut().rev() {
            *slot = r % base;
            r /= base;
        }
        Ok(BinIndex(alpha))
    }
}

impl fmt::Display for BinIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

fn cube_size(d: usize) -> Option<usize> {
    (d + 1).checked_pow(u32::try_from(d + 1).ok()?)
}

/// `α_i = ⌊(d+1)·n_i / N⌋`.
pub fn bin_of(w: &RationalWeights, d: usize) -> BinIndex {
    let n = w.denominator() as i128;
    let scale = d as i128 + 1;
    BinIndex(w.numerators().iter().map(|&ni| (scale * ni as i128).div_euclid(n) as usize).collect())
}

/// Height of any parallelepiped point in bin `α`: `⌈Σα / (d+1)⌉`.
pub fn height_from_bin(alpha: &BinIndex) -> usize {
    alpha.sum().div_ceil(alpha.dim() + 1)
}

/// All bin indices with `Σ α_i > d+1`, lexicographically ordered.
#[derive(Clone, Debug)]
pub struct RelevantSet {
    d: usize,
    indices: Vec<BinIndex>,
    // full-cube rank -> position in `indices`, u32::MAX when not relevant
    position: Vec<u32>,
}

impl RelevantSet {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidArgument("d must be at least 1".into()));
        }
        if d > MAX_BIN_DIM {
            return Err(Error::DimensionTooLarge(d));
        }
        let size = cube_size(d).expect("cube size fits for small d");
        let mut indices = Vec::new();
        let mut position = vec![u32::MAX; size];
        for (rank, slot) in position.iter_mut().enumerate() {
            let alpha = BinIndex::unrank(rank, d)?;
            if alpha.sum() > d + 1 {
                *slot = indices.len() as u32;
                indices.push(alpha);
            }
        }
        Ok(RelevantSet { d, indices, position })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[BinIndex] {
        &self.indices
    }

    pub fn get(&self, position: usize) -> Option<&BinIndex> {
        self.indices.get(position)
    }

    /// Position of `alpha` within the relevant set, if it is relevant.
    pub fn position(&self, alpha: &BinIndex) -> Option<usize> {
        if alpha.dim() != self.d {
            return None;
        }
        match self.position[alpha.lex_rank()] {
            u32::MAX => None,
            p => Some(p as usize),
        }
    }
}

pub fn relevant_set(d: usize) -> Result<RelevantSet> {
    RelevantSet::new(d)
}

/// Sparse labels over a relevant set: ascending positions of bins holding a
/// Hilbert basis element.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HibVector {
    pub positives: Vec<usize>,
    pub len: usize,
}

impl HibVector {
    pub fn count(&self) -> usize {
        self.positives.len()
    }

    pub fn to_dense(&self) -> Vec<bool> {
        let mut v = vec![false; self.len];
        for &p in &self.positives {
            v[p] = true;
        }
        v
    }

    /// Comma-joined ascending ranks; empty string for no positives.
    pub fn to_sparse_string(&self) -> String {
        join_ranks(&self.positives)
    }
}

pub fn join_ranks(ranks: &[usize]) -> String {
    ranks.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Parses comma-joined ascending ranks, each `< len`.
pub fn parse_ranks(s: &str, len: usize) -> std::result::Result<Vec<usize>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let ranks = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("bad rank {t:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if let Some(r) = ranks.iter().find(|&&r| r >= len) {
        return Err(format!("rank {r} out of range (relevant set has {len} entries)"));
    }
    if ranks.windows(2).any(|w| w[0] >= w[1]) {
        return Err("ranks must be strictly ascending".into());
    }
    Ok(ranks)
}

pub fn hib(q: &QVector, relevant: &RelevantSet) -> Result<HibVector> {
    if q.dim() != relevant.dim() {
        return Err(Error::DimensionMismatch { expected: relevant.dim(), actual: q.dim() });
    }
    let mut positives: Vec<usize> =
        hilbert_basis(q).extras.iter().filter_map(|z| relevant.position(&bin_of(&z.weights, q.dim()))).collect();
    positives.sort_unstable();
    positives.dedup();
    Ok(HibVector { positives, len: relevant.len() })
}

/// 1 iff at most `tau` relevant bins are positive.
pub fn supp_tolerant(positives_count: usize, tau: usize) -> u8 {
    u8::from(positives_count <= tau)
}
