//! Built-in inputs: unit cubes with the diagonal action, the unit square and
//! segment, and a smooth 4-dimensional polytope with a bordism action whose
//! Chow quotient is singular.

use crate::exactnum::{int_vec, Integer, Rational};

/// A named polytope (as a vertex list) together with its covector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Example {
    pub name: String,
    pub vertices: Vec<Vec<Rational>>,
    pub nu: Vec<Integer>,
}

pub const NAMES: [&str; 4] = ["cube", "brus", "segment", "square"];

/// Columns are vertices; the last row is the covector's value.
pub const BRUS_MATRIX: [[i64; 26]; 4] = [
    [0, 0, 0, 0, 0, -1, -2, -2, -2, -2, -2, -2, -3, -5, 0, 0, 0, 0, 0, -1, -3, -5, -6, -6, -6, -6],
    [0, 0, -1, -4, -4, 0, 0, 0, -1, -3, -4, -4, -4, -4, 0, 0, -1, -4, -4, 0, -4, -4, 0, 0, -4, -4],
    [0, -6, 0, -3, -6, 0, -1, -6, 0, 0, -1, -6, 0, 0, 0, -6, 0, -3, -6, 0, 0, 0, -5, -6, -1, -6],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 3, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4, 4],
];

fn from_ints(rows: Vec<Vec<i64>>) -> Vec<Vec<Rational>> {
    rows.into_iter()
        .map(|r| r.into_iter().map(|x| Rational::from_integer(x.into())).collect())
        .collect()
}

/// `[0,1]^n` with `nu = (1, …, 1)`.
pub fn cube(n: usize) -> Option<Example> {
    if n == 0 || n > 20 {
        return None;
    }
    let rows = (0..1u64 << n)
        .map(|m| (0..n).map(|i| ((m >> i) & 1) as i64).collect())
        .collect();
    Some(Example {
        name: format!("cube_{n}"),
        vertices: from_ints(rows),
        nu: int_vec(&vec![1; n]),
    })
}

pub fn brus() -> Example {
    let rows = (0..26).map(|c| (0..4).map(|r| BRUS_MATRIX[r][c]).collect()).collect();
    Example {
        name: "brus".into(),
        vertices: from_ints(rows),
        nu: int_vec(&[0, 0, 0, 1]),
    }
}

pub fn segment() -> Example {
    Example {
        name: "segment".into(),
        vertices: from_ints(vec![vec![0], vec![1]]),
        nu: int_vec(&[1]),
    }
}

/// The unit square with the diagonal action.
pub fn square() -> Example {
    Example {
        name: "square".into(),
        vertices: from_ints(vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![1, 1]]),
        nu: int_vec(&[1, 1]),
    }
}

/// Looks up a built-in by name; `n` is the cube dimension.
pub fn by_name(name: &str, n: usize) -> Option<Example> {
    match name {
        "cube" => cube(n),
        "brus" => Some(brus()),
        "segment" => Some(segment()),
        "square" => Some(square()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brus_columns() {
        let b = brus();
        assert_eq!(b.vertices.len(), 26);
        // row sums, recomputed outside the crate from the displayed matrix
        let sums: Vec<i64> = (0..4).map(|r| BRUS_MATRIX[r].iter().sum()).collect();
        assert_eq!(sums, vec![-54, -54, -62, 52]);
        assert_eq!(b.vertices[13], from_ints(vec![vec![-5, -4, 0, 3]])[0]);
        assert_eq!(b.vertices[14], from_ints(vec![vec![0, 0, 0, 4]])[0]);
    }

    #[test]
    fn cube_sizes() {
        assert_eq!(cube(2).unwrap().vertices.len(), 4);
        assert!(cube(0).is_none());
        assert!(by_name("nope", 1).is_none());
    }
}
