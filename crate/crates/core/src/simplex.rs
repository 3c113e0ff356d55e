//! Δ(1,q) simplices, their cones and the lattice points of the fundamental
//! parallelepiped.
//!
//! Points of the cone live in ℤ^{d+1} with the height coordinate stored
//! *first*: `(h; x_1, …, x_d)`. A vector printed height-last such as
//! `(-1, 0, 1)` corresponds to `[1, -1, 0]` here.
//!
//! Everything in this module is exact integer arithmetic. Rational weights
//! are stored as numerators over the normalized volume `N`.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The integer tuple `q` defining the simplex `conv(e_1, …, e_d, -Σ q_i e_i)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QVector {
    q: Vec<i64>,
    volume: i64,
}

impl QVector {
    /// Builds a q-vector, rejecting empty input, negative entries, and
    /// entries whose normalized volume `N` has an `N²` overflowing `i64`.
    pub fn new(q: Vec<i64>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidQVector("dimension must be at least 1".into()));
        }
        if let Some(v) = q.iter().find(|&&v| v < 0) {
            return Err(Error::InvalidQVector(format!("negative entry {v}")));
        }
        let volume = q
            .iter()
            .try_fold(1i64, |acc, &v| acc.checked_add(v))
            .filter(|n| n.checked_mul(*n).is_some())
            .ok_or_else(|| Error::Overflow(q.clone()))?;
        Ok(QVector { q, volume })
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    pub fn entries(&self) -> &[i64] {
        &self.q
    }

    /// Normalized volume `N = 1 + Σ q_i`.
    pub fn volume(&self) -> i64 {
        self.volume
    }
}

impl FromStr for QVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let q = s
            .trim()
            .split(',')
            .map(|t| t.trim().parse::<i64>().map_err(|e| Error::InvalidQVector(format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        QVector::new(q)
    }
}

impl fmt::Display for QVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.q.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// The `d+1` lifted vertices `(1, e_1), …, (1, e_d), (1, -q)` spanning the cone.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeBasis {
    generators: Vec<Vec<i64>>,
}

impl ConeBasis {
    pub fn generators(&self) -> &[Vec<i64>] {
        &self.generators
    }

    pub fn dim(&self) -> usize {
        self.generators.len() - 1
    }

    /// Determinant of the matrix whose rows are the generators (fraction-free
    /// Bareiss elimination).
    pub fn determinant(&self) -> i64 {
        let n = self.generators.len();
        let mut m: Vec<Vec<i128>> = self.generators.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n {
            if m[k][k] == 0 {
                match (k + 1..n).find(|&r| m[r][k] != 0) {
                    Some(r) => {
                        m.swap(k, r);
                        sign = -sign;
                    }
                    None => return 0,
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
                }
            }
            prev = m[k][k];
        }
        (sign * m[n - 1][n - 1]) as i64
    }
}

pub fn build_generators(q: &QVector) -> ConeBasis {
    let d = q.dim();
    let mut generators = Vec::with_capacity(d + 1);
    for i in 0..d {
        let mut g = vec![0i64; d + 1];
        g[0] = 1;
        g[i + 1] = 1;
        generators.push(g);
    }
    let mut last = Vec::with_capacity(d + 1);
    last.push(1);
    last.extend(q.entries().iter().map(|&v| -v));
    generators.push(last);
    ConeBasis { generators }
}

/// Exact coefficients `γ_i = n_i / N` of a point with respect to the cone
/// generators.
///
/// Weights of parallelepiped points satisfy `0 <= n_i < N`; weights returned
/// by [`coords_in_cone`] are only known to be non-negative.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalWeights {
    numerators: Vec<i64>,
    denominator: i64,
}

impl RationalWeights {
    pub fn new(numerators: Vec<i64>, denominator: i64) -> Self {
        assert!(denominator > 0, "weight denominator must be positive");
        RationalWeights { numerators, denominator }
    }

    pub fn numerators(&self) -> &[i64] {
        &self.numerators
    }

    pub fn denominator(&self) -> i64 {
        self.denominator
    }

    /// True when every weight lies in `[0, 1)`.
    pub fn in_parallelepiped(&self) -> bool {
        self.numerators.iter().all(|&n| (0..self.denominator).contains(&n))
    }

    pub fn is_zero(&self) -> bool {
        self.numerators.iter().all(|&n| n == 0)
    }

    /// Weights as floating point values, for display only.
    pub fn to_f64(&self) -> Vec<f64> {
        self.numerators.iter().map(|&n| n as f64 / self.denominator as f64).collect()
    }
}

impl fmt::Display for RationalWeights {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, &n) in self.numerators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            if n == 0 {
                f.write_str("0")?;
            } else {
                let g = gcd(n, self.denominator);
                if self.denominator / g == 1 {
                    write!(f, "{}", n / g)?;
                } else {
                    write!(f, "{}/{}", n / g, self.denominator / g)?;
                }
            }
        }
        f.write_str(")")
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.max(1)
}

/// A lattice point of the fundamental parallelepiped, parameterized by `b`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FppPoint {
    pub coords: Vec<i64>,
    pub weights: RationalWeights,
    pub b: i64,
}

impl FppPoint {
    pub fn height(&self) -> i64 {
        self.coords[0]
    }

    /// Spatial part `(x_1, …, x_d)` of the point.
    pub fn spatial(&self) -> &[i64] {
        &self.coords[1..]
    }
}

/// All `N` lattice points of the half-open fundamental parallelepiped, in
/// increasing `b`.
///
/// The point with index `b` has weight numerators `n_j = b·q_j mod N` for
/// `j <= d` and `n_{d+1} = b`. Integrality follows from `n_j ≡ b·q_j` and
/// `Σ_j n_j + b ≡ b·N ≡ 0 (mod N)`.
pub fn fpp_points(q: &QVector) -> Vec<FppPoint> {
    let n = q.volume();
    let d = q.dim();
    (0..n)
        .map(|b| {
            let mut nums = Vec::with_capacity(d + 1);
            let mut coords = Vec::with_capacity(d + 1);
            coords.push(0);
            for &qj in q.entries() {
                let nj = (b * qj) % n;
                nums.push(nj);
                coords.push((nj - b * qj) / n);
            }
            nums.push(b);
            coords[0] = nums.iter().sum::<i64>() / n;
            FppPoint { coords, weights: RationalWeights::new(nums, n), b }
        })
        .collect()
}

/// Solves `w = Σ γ_i g_i` exactly and returns the weights when they are all
/// non-negative, `None` when `w` lies outside the cone.
///
/// `w` is height-first. With `w = (h; x)`, `γ_{d+1} = (h - Σ x_j)/N` and
/// `γ_j = x_j + q_j γ_{d+1}`.
pub fn coords_in_cone(w: &[i64], q: &QVector) -> Option<RationalWeights> {
    let weights = solve_weights(w, q);
    weights.numerators.iter().all(|&n| n >= 0).then_some(weights)
}

/// Like [`coords_in_cone`] but also returns weights of points outside the
/// cone. Panics if a weight numerator does not fit in `i64`.
pub fn solve_weights(w: &[i64], q: &QVector) -> RationalWeights {
    assert_eq!(w.len(), q.dim() + 1, "point has wrong dimension");
    let n = q.volume() as i128;
    let h = w[0] as i128;
    let spatial_sum: i128 = w[1..].iter().map(|&x| x as i128).sum();
    let last = h - spatial_sum;
    let mut nums: Vec<i64> = w[1..]
        .iter()
        .zip(q.entries())
        .map(|(&x, &qj)| {
            let v = n * x as i128 + qj as i128 * last;
            i64::try_from(v).expect("weight numerator overflows i64")
        })
        .collect();
    nums.push(i64::try_from(last).expect("weight numerator overflows i64"));
    RationalWeights::new(nums, q.volume())
}

/// Height coordinate of a height-first cone point.
pub fn height(z: &[i64]) -> i64 {
    z[0]
}

/// Ehrhart h*-vector: number of parallelepiped points at each height `0..=d`.
pub fn hstar(q: &QVector) -> Vec<u64> {
    let mut h = vec![0u64; q.dim() + 1];
    for p in fpp_points(q) {
        h[p.height() as usize] += 1;
    }
    h
}

/// True iff `v` rises weakly and then falls weakly.
pub fn is_unimodal(v: &[u64]) -> bool {
    let mut i = 1;
    while i < v.len() && v[i - 1] <= v[i] {
        i += 1;
    }
    while i < v.len() && v[i - 1] >= v[i] {
        i += 1;
    }
    i >= v.len()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qv(s: &str) -> QVector {
        s.parse().unwrap()
    }

    #[test]
    fn generators_of_2_1() {
        let g = build_generators(&qv("2,1"));
        assert_eq!(g.generators(), &[vec![1, 1, 0], vec![1, 0, 1], vec![1, -2, -1]]);
        assert_eq!(g.determinant().abs(), 4);
    }

    #[test]
    fn unimodular_and_larger_determinants() {
        assert_eq!(build_generators(&qv("0")).determinant().abs(), 1);
        assert_eq!(build_generators(&qv("0")).generators(), &[vec![1, 1], vec![1, 0]]);
        assert_eq!(build_generators(&qv("4,10,14,14")).determinant().abs(), 43);
    }

    #[test]
    fn fpp_points_of_2_1() {
        let pts = fpp_points(&qv("2,1"));
        assert_eq!(pts.len(), 4);
        assert_eq!(pts[1].weights.numerators(), &[2, 1, 1]);
        assert_eq!(pts[1].coords, vec![1, 0, 0]);
        assert_eq!(pts[2].weights.numerators(), &[0, 2, 2]);
        assert_eq!(pts[2].coords, vec![1, -1, 0]);
        assert_eq!(pts[3].weights.numerators(), &[2, 3, 3]);
        assert_eq!(pts[3].coords, vec![2, -1, 0]);
        assert_eq!(pts[1].weights.to_string(), "(1/2, 1/4, 1/4)");
        assert_eq!(pts[2].weights.to_string(), "(0, 1/2, 1/2)");
    }

    #[test]
    fn cone_coordinates() {
        let q = qv("2,1");
        let w = coords_in_cone(&[1, -1, 0], &q).unwrap();
        assert_eq!(w.numerators(), &[0, 2, 2]);
        let g1 = coords_in_cone(&[1, 1, 0], &q).unwrap();
        assert_eq!(g1.numerators(), &[4, 0, 0]);
        assert!(coords_in_cone(&[1, 5, 5], &q).is_none());
        assert_eq!(solve_weights(&[1, 5, 5], &q).numerators()[2], -9);
    }

    #[test]
    fn heights_and_hstar() {
        assert_eq!(height(&[0, 0, 0]), 0);
        let pts = fpp_points(&qv("2,1"));
        assert_eq!(pts[2].height(), 1);
        assert_eq!(pts[3].height(), 2);
        assert_eq!(hstar(&qv("2,1")), vec![1, 2, 1]);
        assert_eq!(hstar(&qv("0,0,0")), vec![1, 0, 0, 0]);
        assert_eq!(hstar(&qv("1,1,1,1")).iter().sum::<u64>(), 5);
    }

    #[test]
    fn unimodality() {
        assert!(is_unimodal(&[1, 2, 1]));
        assert!(!is_unimodal(&[1, 0, 2]));
        assert!(is_unimodal(&[1, 1, 1]));
        assert!(is_unimodal(&[]));
        assert!(is_unimodal(&[3, 2, 2, 1]));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(QVector::new(vec![]).is_err());
        assert!(QVector::new(vec![1, -1]).is_err());
        assert!(matches!(QVector::new(vec![i64::MAX / 2, 5]), Err(Error::Overflow(_))));
        assert!(matches!(QVector::new(vec![4_000_000_000]), Err(Error::Overflow(_))));
        assert!(QVector::new(vec![1_000_000; 8]).is_ok());
        assert!("1,x".parse::<QVector>().is_err());
        assert_eq!(qv(" 4, 10,14,14").to_string(), "4,10,14,14");
    }
}
