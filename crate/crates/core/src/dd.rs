//! Double description method for pointed cones `{y : A y >= 0}`.
//!
//! Runs on `i128` first and restarts on `BigInt` if any intermediate product
//! overflows, so results are always exact.

use num_bigint::BigInt;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, Signed, ToPrimitive, Zero};

use crate::exactnum::{rank_int, Integer, RationalMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DdError {
    #[error("constraint system does not define a pointed cone (rank {rank} < {dim})")]
    NotPointed { rank: usize, dim: usize },
    #[error("constraint rows must all have length {0}")]
    DimensionMismatch(usize),
}

/// Extreme rays of a pointed cone plus, for each ray, the indices of the
/// constraint rows it makes tight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConeRays {
    pub rays: Vec<Vec<Integer>>,
    pub incidence: Vec<Vec<usize>>,
}

trait DdNum:
    Clone + Ord + Signed + num_integer::Integer + CheckedMul + CheckedAdd + CheckedSub
{
    fn from_big(v: &BigInt) -> Option<Self>;
    fn to_big(&self) -> BigInt;
}

impl DdNum for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        // headroom so that a single product of two inputs cannot wrap
        v.to_i128().filter(|x| x.unsigned_abs() < (1u128 << 62))
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl DdNum for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

#[derive(Clone)]
struct BitSet(Vec<u64>);

impl BitSet {
    fn new(bits: usize) -> Self {
        BitSet(vec![0; bits.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] >> (i % 64) & 1 == 1
    }
    fn and(&self, other: &Self) -> Self {
        BitSet(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }
    fn count(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }
    fn is_subset(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
}

struct Ray<T> {
    v: Vec<T>,
    zero: BitSet,
}

fn dot<T: DdNum>(a: &[T], b: &[T]) -> Option<T> {
    let mut acc = T::zero();
    for (x, y) in a.iter().zip(b) {
        acc = acc.checked_add(&x.checked_mul(y)?)?;
    }
    Some(acc)
}

fn normalize<T: DdNum>(v: &mut [T]) {
    let g = v.iter().fold(T::zero(), |g, x| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x = x.clone() / g.clone();
        }
    }
}

/// Greedy choice of `dim` linearly independent rows, in input order.
fn independent_rows(rows: &[Vec<Integer>], dim: usize) -> Vec<usize> {
    let mut chosen = Vec::new();
    let mut picked: Vec<Vec<Integer>> = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if r.iter().all(Zero::is_zero) {
            continue;
        }
        picked.push(r.clone());
        if rank_int(&picked) == picked.len() {
            chosen.push(i);
            if chosen.len() == dim {
                break;
            }
        } else {
            picked.pop();
        }
    }
    chosen
}

/// Computes the extreme rays of `{y ∈ R^dim : row·y >= 0 for every row}`.
/// The rows must have full rank `dim`.
pub fn extreme_rays(rows: &[Vec<Integer>], dim: usize) -> Result<ConeRays, DdError> {
    if rows.iter().any(|r| r.len() != dim) {
        return Err(DdError::DimensionMismatch(dim));
    }
    let basis = independent_rows(rows, dim);
    if basis.len() < dim {
        return Err(DdError::NotPointed {
            rank: basis.len(),
            dim,
        });
    }
    let initial = initial_rays(rows, &basis);
    let mut out = match run::<i128>(rows, &basis, &initial) {
        Some(r) => r,
        None => run::<BigInt>(rows, &basis, &initial).expect("bigint arithmetic cannot overflow"),
    };
    let mut order: Vec<usize> = (0..out.rays.len()).collect();
    order.sort_by(|&a, &b| out.rays[a].cmp(&out.rays[b]));
    out.rays = order.iter().map(|&i| out.rays[i].clone()).collect();
    out.incidence = order.iter().map(|&i| out.incidence[i].clone()).collect();
    Ok(out)
}

/// Rays of the simplicial cone cut out by the basis rows: positive integer
/// multiples of the columns of the inverse.
fn initial_rays(rows: &[Vec<Integer>], basis: &[usize]) -> Vec<Vec<Integer>> {
    let sub: Vec<Vec<Integer>> = basis.iter().map(|&i| rows[i].clone()).collect();
    let inv = crate::exactnum::IntMatrix::from_rows(&sub)
        .expect("rectangular")
        .to_rational()
        .inverse()
        .expect("basis rows are independent");
    let t: RationalMatrix = inv.transpose();
    (0..t.rows())
        .map(|k| {
            let col = crate::exactnum::scale_to_integers(t.row(k));
            crate::exactnum::primitive_vector(&col).expect("inverse column is nonzero")
        })
        .collect()
}

fn run<T: DdNum>(rows: &[Vec<Integer>], basis: &[usize], initial: &[Vec<Integer>]) -> Option<ConeRays> {
    let m = rows.len();
    let a: Vec<Vec<T>> = rows
        .iter()
        .map(|r| r.iter().map(T::from_big).collect::<Option<Vec<T>>>())
        .collect::<Option<_>>()?;
    let mut rays: Vec<Ray<T>> = Vec::with_capacity(initial.len());
    for (k, v) in initial.iter().enumerate() {
        let v: Vec<T> = v.iter().map(T::from_big).collect::<Option<_>>()?;
        let mut zero = BitSet::new(m);
        for (j, &b) in basis.iter().enumerate() {
            if j != k {
                zero.insert(b);
            }
        }
        rays.push(Ray { v, zero });
    }
    let dim = basis.len();
    let mut processed = vec![false; m];
    for &b in basis {
        processed[b] = true;
    }
    for i in 0..m {
        if processed[i] {
            continue;
        }
        processed[i] = true;
        let row = &a[i];
        let mut signs = Vec::with_capacity(rays.len());
        for r in &rays {
            signs.push(dot(row, &r.v)?);
        }
        if signs.iter().all(|s| !s.is_negative()) {
            for (r, s) in rays.iter_mut().zip(&signs) {
                if s.is_zero() {
                    r.zero.insert(i);
                }
            }
            continue;
        }
        let pos: Vec<usize> = (0..rays.len()).filter(|&k| signs[k].is_positive()).collect();
        let neg: Vec<usize> = (0..rays.len()).filter(|&k| signs[k].is_negative()).collect();
        let mut fresh: Vec<Ray<T>> = Vec::new();
        for &p in &pos {
            for &n in &neg {
                let common = rays[p].zero.and(&rays[n].zero);
                if common.count() + 2 < dim {
                    continue;
                }
                let adjacent = (0..rays.len())
                    .all(|q| q == p || q == n || !common.is_subset(&rays[q].zero));
                if !adjacent {
                    continue;
                }
                let sp = signs[p].clone();
                let sn = -signs[n].clone();
                let mut v = Vec::with_capacity(dim);
                for (x, y) in rays[n].v.iter().zip(&rays[p].v) {
                    v.push(sp.checked_mul(x)?.checked_add(&sn.checked_mul(y)?)?);
                }
                normalize(&mut v);
                let mut zero = common;
                zero.insert(i);
                fresh.push(Ray { v, zero });
            }
        }
        let mut next: Vec<Ray<T>> = Vec::with_capacity(rays.len() + fresh.len());
        for (k, mut r) in rays.into_iter().enumerate() {
            if signs[k].is_negative() {
                continue;
            }
            if signs[k].is_zero() {
                r.zero.insert(i);
            }
            next.push(r);
        }
        next.extend(fresh);
        rays = next;
    }
    let incidence = rays
        .iter()
        .map(|r| (0..m).filter(|&i| r.zero.contains(i)).collect())
        .collect();
    let rays = rays
        .into_iter()
        .map(|r| r.v.iter().map(T::to_big).collect())
        .collect();
    Some(ConeRays { rays, incidence })
}
