//! Exact integer/rational arithmetic and the lattice linear algebra used by
//! every other module.
//!
//! Integers are [`num_bigint::BigInt`] and rationals are
//! [`num_rational::BigRational`], which is always kept in lowest terms with a
//! positive denominator. Determinants use fraction-free (Bareiss) elimination.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub type Integer = BigInt;
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumError {
    #[error("ZeroVector: the vector has no nonzero entry")]
    ZeroVector,
    #[error("malformed matrix: {0}")]
    Malformed(String),
    #[error("cannot parse {0:?} as a rational number")]
    Parse(String),
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not unimodular")]
    NotUnimodular,
}

pub fn int(v: i64) -> Integer {
    Integer::from(v)
}

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(Integer::from(num), Integer::from(den))
}

pub fn rat_from_int(v: &Integer) -> Rational {
    Rational::from_integer(v.clone())
}

pub fn int_vec(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

pub fn rat_vec(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| rat(x, 1)).collect()
}

/// Parses `"p/q"`, `"-p/q"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<Rational, NumError> {
    let t = s.trim();
    let err = || NumError::Parse(s.to_string());
    match t.split_once('/') {
        Some((n, d)) => {
            let n: Integer = n.trim().parse().map_err(|_| err())?;
            let d: Integer = d.trim().parse().map_err(|_| err())?;
            if d.is_zero() {
                return Err(err());
            }
            Ok(Rational::new(n, d))
        }
        None => {
            let n: Integer = t.parse().map_err(|_| err())?;
            Ok(Rational::from_integer(n))
        }
    }
}

pub fn parse_integer(s: &str) -> Result<Integer, NumError> {
    s.trim().parse().map_err(|_| NumError::Parse(s.to_string()))
}

/// Canonical string form: `"p/q"` in lowest terms, or `"p"` for integers.
pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn gcd_all(v: &[Integer]) -> Integer {
    v.iter().fold(Integer::zero(), |g, x| g.gcd(x))
}

/// Divides `v` by the gcd of its entries.
pub fn primitive_vector(v: &[Integer]) -> Result<Vec<Integer>, NumError> {
    let g = gcd_all(v);
    if g.is_zero() {
        return Err(NumError::ZeroVector);
    }
    Ok(v.iter().map(|x| x / &g).collect())
}

/// Largest positive rational `g` such that every entry is an integer multiple
/// of `g`. Zero for an all-zero input.
pub fn rational_gcd(v: &[Rational]) -> Rational {
    let mut num = Integer::zero();
    let mut den = Integer::one();
    for q in v {
        num = num.gcd(q.numer());
        den = den.lcm(q.denom());
    }
    Rational::new(num, den)
}

/// Least common multiple of the denominators.
pub fn common_denominator(v: &[Rational]) -> Integer {
    v.iter().fold(Integer::one(), |l, q| l.lcm(q.denom()))
}

pub fn dot_int(a: &[Integer], b: &[Integer]) -> Integer {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int_rat(a: &[Integer], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .fold(Rational::zero(), |acc, (x, y)| acc + y * x)
}

pub fn dot_rat(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    entries: Vec<T>,
}

pub type IntMatrix = Matrix<Integer>;
pub type RationalMatrix = Matrix<Rational>;

impl<T: Clone + Zero> Matrix<T> {
    pub fn new(rows: usize, cols: usize, entries: Vec<T>) -> Result<Self, NumError> {
        if entries.len() != rows * cols {
            return Err(NumError::Malformed(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, NumError> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(NumError::Malformed("ragged rows".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            entries: rows.iter().flatten().cloned().collect(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> &T {
        &self.entries[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: T) {
        self.entries[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[T] {
        &self.entries[r * self.cols..(r + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|r| self.row(r).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out.set(c, r, self.get(r, c).clone());
            }
        }
        out
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for c in 0..self.cols {
            self.entries.swap(a * self.cols + c, b * self.cols + c);
        }
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }
}

impl<T> Matrix<T>
where
    T: Clone + Zero + for<'a> std::ops::Mul<&'a T, Output = T>,
{
    pub fn mul(&self, other: &Self) -> Result<Self, NumError> {
        if self.cols != other.rows {
            return Err(NumError::Malformed(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for c in 0..other.cols {
                let mut acc = T::zero();
                for k in 0..self.cols {
                    acc = acc + self.get(r, k).clone() * other.get(k, c);
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for r in 0..self.rows {
            if r > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for c in 0..self.cols {
                if c > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entries[r * self.cols + c])?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl IntMatrix {
    pub fn to_rational(&self) -> RationalMatrix {
        RationalMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(rat_from_int).collect(),
        }
    }

    /// Bareiss fraction-free determinant.
    pub fn determinant(&self) -> Result<Integer, NumError> {
        if self.rows != self.cols {
            return Err(NumError::Malformed("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(Integer::one());
        }
        let mut a = self.to_rows();
        let mut sign = Integer::one();
        let mut prev = Integer::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Ok(Integer::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = v / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(sign * &a[n - 1][n - 1])
    }

    /// Inverse of a unimodular matrix, as an integer matrix.
    pub fn unimodular_inverse(&self) -> Result<IntMatrix, NumError> {
        let inv = self.to_rational().inverse()?;
        let entries = inv
            .entries
            .iter()
            .map(|q| {
                if q.is_integer() {
                    Ok(q.to_integer())
                } else {
                    Err(NumError::NotUnimodular)
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntMatrix {
            rows: inv.rows,
            cols: inv.cols,
            entries,
        })
    }
}

impl RationalMatrix {
    /// Gauss-Jordan inverse.
    pub fn inverse(&self) -> Result<RationalMatrix, NumError> {
        if self.rows != self.cols {
            return Err(NumError::Malformed("inverse of a non-square matrix".into()));
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = RationalMatrix::identity(n);
        for col in 0..n {
            let p = (col..n)
                .find(|&r| !a.get(r, col).is_zero())
                .ok_or(NumError::Singular)?;
            a.swap_rows(col, p);
            inv.swap_rows(col, p);
            let piv = a.get(col, col).clone();
            for c in 0..n {
                let v = a.get(col, c) / &piv;
                a.set(col, c, v);
                let w = inv.get(col, c) / &piv;
                inv.set(col, c, w);
            }
            for r in 0..n {
                if r == col || a.get(r, col).is_zero() {
                    continue;
                }
                let f = a.get(r, col).clone();
                for c in 0..n {
                    let v = a.get(r, c) - &f * a.get(col, c);
                    a.set(r, c, v);
                    let w = inv.get(r, c) - &f * inv.get(col, c);
                    inv.set(r, c, w);
                }
            }
        }
        Ok(inv)
    }
}

/// Rank of a list of integer vectors (fraction-free elimination).
pub fn rank_int(rows: &[Vec<Integer>]) -> usize {
    let mut a: Vec<Vec<Integer>> = rows.to_vec();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, p);
        for r in rank + 1..a.len() {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            let piv = a[rank][col].clone();
            let (head, tail) = a.split_at_mut(r);
            for (x, p) in tail[0][col..].iter_mut().zip(&head[rank][col..]) {
                *x = &*x * &piv - p * &f;
            }
            let g = gcd_all(&a[r]);
            if !g.is_zero() && !g.is_one() {
                for x in a[r].iter_mut() {
                    *x /= &g;
                }
            }
        }
        rank += 1;
        if rank == a.len() {
            break;
        }
    }
    rank
}

pub fn rank_rat(rows: &[Vec<Rational>]) -> usize {
    let scaled: Vec<Vec<Integer>> = rows.iter().map(|r| scale_to_integers(r)).collect();
    rank_int(&scaled)
}

/// Multiplies by the common denominator; the result is a positive multiple.
pub fn scale_to_integers(v: &[Rational]) -> Vec<Integer> {
    let l = common_denominator(v);
    v.iter().map(|q| (q * &l).to_integer()).collect()
}

/// Row-style Hermite normal form `H = U * A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HermiteForm {
    pub h: IntMatrix,
    pub u: IntMatrix,
}

/// Upper echelon form with positive pivots and entries above each pivot
/// reduced into `[0, pivot)`. `U` is unimodular.
pub fn hermite_normal_form(a: &IntMatrix) -> Result<HermiteForm, NumError> {
    if a.rows() == 0 || a.cols() == 0 {
        return Err(NumError::Malformed("empty matrix".into()));
    }
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = IntMatrix::identity(m);
    let sub_row = |mat: &mut IntMatrix, target: usize, src: usize, q: &Integer| {
        for c in 0..mat.cols() {
            let v = mat.get(target, c) - q * mat.get(src, c);
            mat.set(target, c, v);
        }
    };
    let mut p = 0;
    for col in 0..n {
        if p == m {
            break;
        }
        loop {
            let best = (p..m)
                .filter(|&r| !h.get(r, col).is_zero())
                .min_by(|&x, &y| h.get(x, col).abs().cmp(&h.get(y, col).abs()));
            let Some(best) = best else { break };
            h.swap_rows(p, best);
            u.swap_rows(p, best);
            let mut clean = true;
            for r in p + 1..m {
                if h.get(r, col).is_zero() {
                    continue;
                }
                let q = h.get(r, col).div_floor(h.get(p, col));
                sub_row(&mut h, r, p, &q);
                sub_row(&mut u, r, p, &q);
                if !h.get(r, col).is_zero() {
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        if h.get(p, col).is_zero() {
            continue;
        }
        if h.get(p, col).is_negative() {
            for c in 0..n {
                let v = -h.get(p, c);
                h.set(p, c, v);
            }
            for c in 0..m {
                let v = -u.get(p, c);
                u.set(p, c, v);
            }
        }
        for r in 0..p {
            let q = h.get(r, col).div_floor(h.get(p, col));
            if !q.is_zero() {
                sub_row(&mut h, r, p, &q);
                sub_row(&mut u, r, p, &q);
            }
        }
        p += 1;
    }
    Ok(HermiteForm { h, u })
}

/// Unimodular `U` whose first row `p` satisfies `f·p = gcd(f)` and whose
/// remaining rows are a saturated basis of `{m : f·m = 0}`.
pub fn kernel_completion(f: &[Integer]) -> Result<IntMatrix, NumError> {
    if f.iter().all(Zero::is_zero) {
        return Err(NumError::ZeroVector);
    }
    let column = IntMatrix::new(f.len(), 1, f.to_vec())?;
    Ok(hermite_normal_form(&column)?.u)
}

/// Lattice basis of `{m ∈ Z^n : f·m = 0}` (n−1 vectors).
pub fn lattice_kernel_basis(f: &[Integer]) -> Result<Vec<Vec<Integer>>, NumError> {
    let u = kernel_completion(f)?;
    Ok((1..u.rows()).map(|r| u.row(r).to_vec()).collect())
}

/// `true` iff the vectors form a basis of the full lattice `Z^n`.
pub fn is_lattice_basis(vs: &[Vec<Integer>]) -> bool {
    let Some(n) = vs.first().map(Vec::len) else {
        return false;
    };
    if vs.len() != n || vs.iter().any(|v| v.len() != n) {
        return false;
    }
    IntMatrix::from_rows(vs)
        .and_then(|m| m.determinant())
        .map(|d| d.abs().is_one())
        .unwrap_or(false)
}

/// `true` iff the vectors are linearly independent and generate a saturated
/// sublattice, i.e. they extend to a lattice basis. Checked as
/// gcd of maximal minors = 1.
pub fn extends_to_lattice_basis(vs: &[Vec<Integer>]) -> bool {
    let Some(n) = vs.first().map(Vec::len) else {
        return true;
    };
    let k = vs.len();
    if k > n || vs.iter().any(|v| v.len() != n) {
        return false;
    }
    let mut g = Integer::zero();
    for cols in combinations(n, k) {
        let sub: Vec<Vec<Integer>> = vs
            .iter()
            .map(|v| cols.iter().map(|&c| v[c].clone()).collect())
            .collect();
        let d = IntMatrix::from_rows(&sub)
            .and_then(|s| s.determinant())
            .unwrap_or_default();
        g = g.gcd(&d);
        if g.is_one() {
            return true;
        }
    }
    false
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn im(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| int_vec(r)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn primitive_vector_examples() {
        assert_eq!(primitive_vector(&int_vec(&[2, 4, 6])).unwrap(), int_vec(&[1, 2, 3]));
        assert_eq!(primitive_vector(&int_vec(&[3, -5])).unwrap(), int_vec(&[3, -5]));
        assert_eq!(primitive_vector(&int_vec(&[0, 0, 8])).unwrap(), int_vec(&[0, 0, 1]));
        assert_eq!(primitive_vector(&int_vec(&[0, 0])), Err(NumError::ZeroVector));
    }

    #[test]
    fn hnf_examples() {
        let id = im(&[&[1, 0], &[0, 1]]);
        let f = hermite_normal_form(&id).unwrap();
        assert_eq!(f.h, id);
        assert_eq!(f.u, id);

        let f = hermite_normal_form(&im(&[&[2, 4], &[1, 3]])).unwrap();
        assert_eq!(f.h, im(&[&[1, 1], &[0, 2]]));
        assert_eq!(f.u.mul(&im(&[&[2, 4], &[1, 3]])).unwrap(), f.h);

        let swap = im(&[&[0, 1], &[1, 0]]);
        let f = hermite_normal_form(&swap).unwrap();
        assert_eq!(f.h, id);
        assert_eq!(f.u, swap);
    }

    #[test]
    fn hnf_rank_deficient() {
        let a = im(&[&[2, 4, 6], &[1, 2, 3], &[0, 0, 5]]);
        let f = hermite_normal_form(&a).unwrap();
        assert_eq!(f.u.mul(&a).unwrap(), f.h);
        assert_eq!(f.h, im(&[&[1, 2, 3], &[0, 0, 5], &[0, 0, 0]]));
        assert!(f.u.determinant().unwrap().abs().is_one());
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(lattice_kernel_basis(&int_vec(&[2, 3])).unwrap(), vec![int_vec(&[3, -2])]);
        let k = lattice_kernel_basis(&int_vec(&[1, 1])).unwrap();
        assert_eq!(k.len(), 1);
        assert!(k[0] == int_vec(&[1, -1]) || k[0] == int_vec(&[-1, 1]));
        let k = lattice_kernel_basis(&int_vec(&[1, 1, 1])).unwrap();
        assert_eq!(k.len(), 2);
        // same lattice as the root basis {(1,-1,0),(0,1,-1)}: both bases plus
        // e1 are unimodular
        let mut rows = k.clone();
        rows.push(int_vec(&[1, 0, 0]));
        assert!(is_lattice_basis(&rows));
        assert_eq!(lattice_kernel_basis(&int_vec(&[0, 0])), Err(NumError::ZeroVector));
    }

    #[test]
    fn lattice_basis_examples() {
        assert!(is_lattice_basis(&[int_vec(&[1, 0]), int_vec(&[0, 1])]));
        assert!(!is_lattice_basis(&[int_vec(&[1, 0]), int_vec(&[1, 2])]));
        assert!(is_lattice_basis(&[int_vec(&[1, 1, 0]), int_vec(&[0, 1, 1]), int_vec(&[0, 0, 1])]));
        assert!(!is_lattice_basis(&[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])]));
    }

    #[test]
    fn cofactor_oracle_agrees_with_bareiss() {
        fn cofactor(m: &[Vec<i64>]) -> i64 {
            if m.len() == 1 {
                return m[0][0];
            }
            (0..m.len())
                .map(|c| {
                    let minor: Vec<Vec<i64>> = m[1..]
                        .iter()
                        .map(|r| r.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, &x)| x).collect())
                        .collect();
                    let s = if c % 2 == 0 { 1 } else { -1 };
                    s * m[0][c] * cofactor(&minor)
                })
                .sum()
        }
        let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![0, 0, 1]];
        assert_eq!(cofactor(&m), 1);
        let m4 = vec![vec![3, -1, 2, 0], vec![1, 4, -2, 5], vec![0, 2, 7, -3], vec![6, 0, 1, 1]];
        let b = im(&m4.iter().map(|r| r.as_slice()).collect::<Vec<_>>());
        assert_eq!(b.determinant().unwrap(), int(cofactor(&m4)));
    }

    #[test]
    fn saturation() {
        assert!(extends_to_lattice_basis(&[int_vec(&[1, 1, 0])]));
        assert!(!extends_to_lattice_basis(&[int_vec(&[2, 2, 0])]));
        assert!(extends_to_lattice_basis(&[int_vec(&[1, 0, 0]), int_vec(&[0, 1, 0])]));
        assert!(!extends_to_lattice_basis(&[int_vec(&[1, 0, 0]), int_vec(&[1, 2, 0])]));
        assert!(extends_to_lattice_basis(&[int_vec(&[2, 3])]));
    }

    #[test]
    fn rationals() {
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational(" -7 ").unwrap(), rat(-7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&rat(8, 4)), "2");
        assert_eq!(rational_gcd(&[rat(1, 2), rat(3, 4)]), rat(1, 4));
        assert_eq!(rank_int(&[int_vec(&[1, 2]), int_vec(&[2, 4])]), 1);
    }
}
