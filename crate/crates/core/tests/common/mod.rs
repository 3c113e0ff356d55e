//! Test-only oracles, independent of the library's closed forms.
#![allow(dead_code)]

use std::collections::BTreeSet;

use idp_core::nn::{backward, forward, init_params, Loss, NetSpec, Params};
use idp_core::rng::SplitMix64;

/// Exact rational `num/den` with `den > 0`, reduced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

fn gcd(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Frac {
        assert!(den != 0);
        let s = if den < 0 { -1 } else { 1 };
        let g = gcd(num, den).max(1);
        Frac { num: s * num / g, den: s * den / g }
    }
    pub fn int(v: i128) -> Frac {
        Frac { num: v, den: 1 }
    }
    pub fn zero() -> Frac {
        Frac::int(0)
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    pub fn sub(self, o: Frac) -> Frac {
        self.add(Frac { num: -o.num, den: o.den })
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }
    pub fn div(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den, self.den * o.num)
    }
    pub fn is_zero(self) -> bool {
        self.num == 0
    }
}

/// Gauss-Jordan inverse of a square integer matrix over the rationals.
pub fn invert(m: &[Vec<i64>]) -> Vec<Vec<Frac>> {
    let n = m.len();
    let mut a: Vec<Vec<Frac>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<Frac> = row.iter().map(|&v| Frac::int(v as i128)).collect();
            r.extend((0..n).map(|j| Frac::int((i == j) as i128)));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("singular matrix");
        a.swap(col, piv);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v = v.div(p);
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col];
                let pivot = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot) {
                    *x = x.sub(y.mul(f));
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Cone generators built directly from the q-vector, height first.
pub fn oracle_generators(q: &[i64]) -> Vec<Vec<i64>> {
    let d = q.len();
    let mut gens: Vec<Vec<i64>> = (0..d)
        .map(|i| {
            let mut g = vec![0; d + 1];
            g[0] = 1;
            g[i + 1] = 1;
            g
        })
        .collect();
    gens.push(std::iter::once(1).chain(q.iter().map(|v| -v)).collect());
    gens
}

/// Lattice points of the half-open parallelepiped by scanning the integer box
/// spanned by all generator subset sums and solving for weights exactly.
pub fn oracle_fpp(q: &[i64]) -> BTreeSet<Vec<i64>> {
    let gens = oracle_generators(q);
    let n = gens.len();
    // columns of the matrix are generators: w = G γ
    let g_cols: Vec<Vec<i64>> = (0..n).map(|r| (0..n).map(|c| gens[c][r]).collect()).collect();
    let inv = invert(&g_cols);

    let mut lo = vec![i64::MAX; n];
    let mut hi = vec![i64::MIN; n];
    for mask in 0u32..(1 << n) {
        let mut s = vec![0i64; n];
        for (i, g) in gens.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for (a, b) in s.iter_mut().zip(g) {
                    *a += b;
                }
            }
        }
        for k in 0..n {
            lo[k] = lo[k].min(s[k]);
            hi[k] = hi[k].max(s[k]);
        }
    }

    let mut out = BTreeSet::new();
    let mut w = lo.clone();
    loop {
        let inside = inv.iter().all(|row| {
            let g = row.iter().zip(&w).fold(Frac::zero(), |acc, (c, &x)| acc.add(c.mul(Frac::int(x as i128))));
            g.num >= 0 && g.num < g.den
        });
        if inside {
            out.insert(w.clone());
        }
        let mut k = 0;
        loop {
            if k == n {
                return out;
            }
            if w[k] < hi[k] {
                w[k] += 1;
                break;
            }
            w[k] = lo[k];
            k += 1;
        }
    }
}

/// All q-vectors in `{lo..=hi}^d`.
pub fn all_q(d: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![vec![]];
    for _ in 0..d {
        out = out
            .into_iter()
            .flat_map(|p| {
                (lo..=hi).map(move |v| {
                    let mut p = p.clone();
                    p.push(v);
                    p
                })
            })
            .collect();
    }
    out
}

/// The 112 IDP q-vectors of the published validation sample.
pub const KNOWN_IDP: &str = "1,1,1,1 1,1,3,9 1,1,21,24 1,2,14,10 1,2,14,10 1,3,16,3 1,3,24,1 1,4,2,16 \
1,4,20,20 1,8,1,1 1,10,10,8 1,10,24,24 1,12,4,12 1,15,3,1 1,18,1,6 1,21,1,4 1,24,1,9 1,24,14,2 \
1,24,17,1 1,24,18,1 1,24,18,4 1,24,24,20 2,2,2,7 2,3,12,18 2,8,8,4 2,10,1,16 2,20,10,5 3,1,1,9 \
3,6,12,1 3,12,2,24 3,14,21,3 3,19,3,1 3,23,15,3 4,1,1,4 4,8,2,16 4,20,1,14 4,20,10,20 4,23,4,12 \
4,24,1,16 6,1,2,12 6,2,6,3 6,2,18,9 6,6,6,3 6,14,6,15 6,17,9,18 7,3,21,7 7,7,1,7 7,7,16,16 \
8,1,8,2 8,2,12,24 8,16,4,2 9,1,1,9 9,6,18,2 9,9,4,4 9,18,4,4 9,18,18,6 9,22,1,11 10,1,5,22 \
10,5,10,9 10,24,4,1 11,22,5,5 12,1,2,6 12,1,24,19 12,2,3,12 12,2,18,3 12,3,2,6 12,3,11,6 12,6,1,1 \
12,6,1,3 12,12,4,12 12,16,1,16 12,24,2,24 12,24,6,1 13,2,2,20 14,6,14,7 14,7,2,24 14,7,12,1 \
15,1,13,15 15,15,1,1 16,1,6,6 16,4,2,16 16,7,16,16 16,8,4,2 16,16,12,3 16,24,1,22 17,1,7,1 \
17,17,8,4 17,17,17,1 18,1,1,15 18,2,6,6 18,2,22,1 18,10,1,15 19,19,1,16 20,2,1,12 20,8,19,8 \
20,14,24,1 20,20,1,20 20,20,4,1 20,20,4,20 20,22,1,22 21,21,16,4 22,2,2,22 22,16,4,1 22,16,22,1 \
22,22,20,1 23,2,2,6 23,18,3,24 23,24,24,12 24,2,1,16 24,4,2,4 24,24,6,24 24,24,23,12";

/// Predicted-IDP q-vectors that are not in the IDP list.
pub const KNOWN_NON_IDP: [&str; 4] = ["1,2,10,2", "2,3,4,7", "4,3,2,5", "11,6,9,6"];

pub fn known_idp() -> Vec<&'static str> {
    KNOWN_IDP.split_whitespace().collect()
}

/// Random net with widths in 1..=8 and inputs away from ReLU kinks.
pub fn random_case(rng: &mut SplitMix64) -> (Params, Vec<f64>) {
    loop {
        let depth = 2 + (rng.next() % 3) as usize;
        let widths: Vec<usize> = (0..depth).map(|_| 1 + (rng.next() % 8) as usize).collect();
        let mut spec = NetSpec::new(widths.clone());
        spec.seed = rng.next();
        let mut p = init_params(&spec).unwrap();
        for l in p.layers_mut() {
            for b in l.bias.iter_mut() {
                *b = rng.next_f64() - 0.5;
            }
        }
        let x: Vec<f64> = (0..widths[0]).map(|_| 2.0 * rng.next_f64() - 1.0).collect();
        let fwd = forward(&p, &x).unwrap();
        let hidden = &fwd.pre[..fwd.pre.len() - 1];
        if hidden.iter().flatten().all(|z| z.abs() > 1e-3) {
            return (p, x);
        }
    }
}

fn perturbed(p: &Params, index: usize, delta: f64) -> Params {
    let mut q = p.clone();
    let mut i = index;
    for l in q.layers_mut() {
        let n = l.weights.len();
        if i < n {
            l.weights[i] += delta;
            return q;
        }
        i -= n;
        if i < l.bias.len() {
            l.bias[i] += delta;
            return q;
        }
        i -= l.bias.len();
    }
    unreachable!()
}

pub fn max_relative_error(p: &Params, x: &[f64], y: &[f64], loss: Loss) -> f64 {
    let h = 1e-5;
    let g = backward(p, x, y, loss).unwrap().flatten();
    let eval = |q: &Params| loss.value(&q.logits(x).unwrap(), y);
    g.iter()
        .enumerate()
        .map(|(i, &a)| {
            let fd = (eval(&perturbed(p, i, h)) - eval(&perturbed(p, i, -h))) / (2.0 * h);
            (a - fd).abs() / a.abs().max(fd.abs()).max(1e-6)
        })
        .fold(0.0, f64::max)
}
