//! Incidence matrices of point-pushing maps in distinguished-branch
//! coordinates.
//!
//! Weights are ordered `(d, l, r, a_1, b_1, c_1, ..., a_n, b_n, c_n)`: the
//! three eye branches followed by one triple per crossing. Pushing the marked
//! point through crossing `i` acts by a pass matrix which is the identity
//! except on the eye block and the block of crossing `i`.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curve::{surface_and_filling, CurveDiagram, GaussCode, Handedness, Passage};
use crate::matrix::Matrix;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IncidenceError {
    #[error("crossing index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("curve does not fill its surface")]
    NotFilling,
    #[error("weight vector invalid: {0}")]
    BadWeights(String),
}

type Block = [[u8; 3]; 3];

/// The four active blocks of a pass matrix: (eye, eye), (eye, i), (i, eye), (i, i).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PassBlocks {
    pub eye_eye: Block,
    pub eye_cross: Block,
    pub cross_eye: Block,
    pub cross_cross: Block,
}

pub const RIGHT_PASS: PassBlocks = PassBlocks {
    eye_eye: [[1, 0, 1], [0, 0, 0], [0, 0, 0]],
    eye_cross: [[1, 0, 0], [0, 1, 0], [0, 0, 1]],
    cross_eye: [[2, 0, 1], [0, 0, 1], [0, 1, 0]],
    cross_cross: [[0, 0, 0], [1, 1, 0], [0, 0, 0]],
};

pub const LEFT_PASS: PassBlocks = PassBlocks {
    eye_eye: [[1, 1, 0], [0, 0, 0], [0, 0, 0]],
    eye_cross: [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
    cross_eye: [[2, 1, 0], [0, 1, 0], [0, 0, 1]],
    cross_cross: [[0, 0, 0], [1, 1, 0], [0, 0, 0]],
};

pub fn pass_blocks(orientation: Handedness) -> &'static PassBlocks {
    match orientation {
        Handedness::Right => &RIGHT_PASS,
        Handedness::Left => &LEFT_PASS,
    }
}

/// Exact nonnegative weights on the distinguished branches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedWeightVector(Vec<BigRational>);

impl ReducedWeightVector {
    pub fn new(entries: Vec<BigRational>) -> Result<Self, IncidenceError> {
        if entries.is_empty() || !entries.len().is_multiple_of(3) {
            return Err(IncidenceError::BadWeights(format!(
                "length {} is not a positive multiple of 3",
                entries.len()
            )));
        }
        if entries.iter().any(Signed::is_negative) {
            return Err(IncidenceError::BadWeights("negative entry".into()));
        }
        Ok(ReducedWeightVector(entries))
    }

    pub fn from_integers(entries: &[u64]) -> Result<Self, IncidenceError> {
        Self::new(
            entries
                .iter()
                .map(|&x| BigRational::from_integer(x.into()))
                .collect(),
        )
    }

    pub fn zeros(crossings: usize) -> Self {
        ReducedWeightVector(vec![BigRational::zero(); 3 * (crossings + 1)])
    }

    /// Number of crossing triples.
    pub fn crossings(&self) -> usize {
        self.0.len() / 3 - 1
    }

    pub fn entries(&self) -> &[BigRational] {
        &self.0
    }

    pub fn eye(&self) -> &[BigRational] {
        &self.0[0..3]
    }

    pub fn at_crossing(&self, i: usize) -> &[BigRational] {
        &self.0[3 * i..3 * i + 3]
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    /// Numerators of an integral vector.
    pub fn to_integers(&self) -> Option<Vec<BigUint>> {
        self.0
            .iter()
            .map(|x| x.is_integer().then(|| x.numer().to_biguint()).flatten())
            .collect()
    }
}

/// Square incidence matrix with a note on where it came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IncidenceMatrix {
    pub provenance: String,
    pub matrix: Matrix,
}

impl IncidenceMatrix {
    pub fn new(provenance: impl Into<String>, matrix: Matrix) -> Self {
        assert!(matrix.is_square(), "incidence matrices are square");
        IncidenceMatrix {
            provenance: provenance.into(),
            matrix,
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn apply(&self, w: &[BigUint]) -> Vec<BigUint> {
        self.matrix.mul_vec(w)
    }
}

fn block_matrix(b: &Block) -> [[BigUint; 3]; 3] {
    b.map(|row| row.map(BigUint::from))
}

/// Replace `m` by `A_i^o * m` in place. Only the eye rows and the rows of
/// crossing `i` change.
pub(crate) fn left_apply_pass(m: &mut Matrix, i: usize, orientation: Handedness) {
    let blocks = pass_blocks(orientation);
    let ee = block_matrix(&blocks.eye_eye);
    let ei = block_matrix(&blocks.eye_cross);
    let ie = block_matrix(&blocks.cross_eye);
    let ii = block_matrix(&blocks.cross_cross);
    let cols = m.cols();
    let old_eye: Vec<Vec<BigUint>> = (0..3).map(|r| m.row(r).to_vec()).collect();
    let old_cross: Vec<Vec<BigUint>> = (0..3).map(|r| m.row(3 * i + r).to_vec()).collect();
    let combine = |top: &[[BigUint; 3]; 3], bottom: &[[BigUint; 3]; 3], r: usize| {
        (0..cols)
            .map(|c| {
                let mut acc = BigUint::zero();
                for k in 0..3 {
                    if !top[r][k].is_zero() {
                        acc += &top[r][k] * &old_eye[k][c];
                    }
                    if !bottom[r][k].is_zero() {
                        acc += &bottom[r][k] * &old_cross[k][c];
                    }
                }
                acc
            })
            .collect::<Vec<_>>()
    };
    for r in 0..3 {
        let new_eye = combine(&ee, &ei, r);
        let new_cross = combine(&ie, &ii, r);
        m.row_mut(r).clone_from_slice(&new_eye);
        m.row_mut(3 * i + r).clone_from_slice(&new_cross);
    }
}

/// The pass matrix for pushing through crossing `i` of `n`.
pub fn pass_matrix(
    n: usize,
    i: usize,
    orientation: Handedness,
) -> Result<IncidenceMatrix, IncidenceError> {
    if i == 0 || i > n {
        return Err(IncidenceError::IndexOutOfRange { index: i, n });
    }
    let mut m = Matrix::identity(3 * (n + 1));
    left_apply_pass(&mut m, i, orientation);
    Ok(IncidenceMatrix::new(
        format!("pass(n={n}, i={i}, {orientation})"),
        m,
    ))
}

/// Ordered product of pass matrices along a word, first passage applied first.
pub fn incidence_from_code(code: &GaussCode, signs: &[Handedness]) -> Matrix {
    let n = code.crossing_count();
    let mut m = Matrix::identity(3 * (n + 1));
    for tok in code.tokens() {
        let sign = signs[tok.crossing - 1];
        let o = match tok.passage {
            Passage::First => sign,
            Passage::Second => sign.opposite(),
        };
        left_apply_pass(&mut m, tok.crossing, o);
    }
    m
}

/// The incidence matrix of the point-pushing map along a filling curve.
pub fn incidence_matrix(diagram: &CurveDiagram) -> Result<IncidenceMatrix, IncidenceError> {
    if !surface_and_filling(diagram).filling {
        return Err(IncidenceError::NotFilling);
    }
    Ok(IncidenceMatrix::new(
        format!("curve {}", diagram.name()),
        incidence_from_code(diagram.code(), diagram.signs()),
    ))
}
