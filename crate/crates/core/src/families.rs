//! The two explicit families: lifts of the genus-two curve to cyclic covers,
//! and the winding family obtained by spiralling around one handle.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::{Pow, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curve::{CurveDiagram, GaussCode, Handedness, Passage, Token};
use crate::incidence::IncidenceMatrix;
use crate::matrix::Matrix;
use crate::spectral::{is_primitive, row_sum_bound};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("genus {0} is below the family's range")]
    BadGenus(usize),
    #[error("bad family parameters: {0}")]
    BadParameters(String),
}

/// The genus-two word: crossings visited 1, 2, 1, 3, 2, 3.
pub const GAMMA0_WORD: [(usize, u8); 6] = [(1, 1), (2, 1), (1, 2), (3, 1), (2, 2), (3, 2)];
pub const GAMMA0_SIGNS: [Handedness; 3] = [Handedness::Left, Handedness::Left, Handedness::Right];

/// The genus-two incidence matrix, row by row.
pub const GAMMA0_MATRIX: [[u32; 12]; 12] = [
    [11, 8, 2, 5, 0, 5, 4, 4, 0, 1, 0, 1],
    [0, 1, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1, 0, 0, 0, 0, 0, 0, 1, 1, 0],
    [2, 2, 0, 2, 0, 2, 2, 1, 0, 0, 0, 0],
    [2, 2, 0, 1, 1, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0],
    [6, 4, 2, 2, 0, 2, 2, 2, 0, 2, 0, 1],
    [2, 2, 0, 2, 0, 2, 1, 1, 0, 0, 0, 1],
    [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0],
    [10, 8, 2, 6, 0, 5, 3, 3, 0, 2, 0, 2],
    [6, 4, 2, 2, 0, 3, 3, 3, 0, 1, 1, 0],
    [0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0],
];

fn word_tokens(pairs: &[(usize, u8)]) -> Vec<Token> {
    pairs
        .iter()
        .map(|&(c, p)| Token::new(c, Passage::from_index(p).expect("passage 1 or 2")))
        .collect()
}

/// Blocks of the genus-two matrix: eye rows and columns first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FixedFamilyBlocks {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

pub fn gamma0_matrix() -> Matrix {
    Matrix::from_rows(&GAMMA0_MATRIX.map(Vec::from))
}

pub fn fixed_blocks() -> FixedFamilyBlocks {
    let m = gamma0_matrix();
    FixedFamilyBlocks {
        a: m.block(0, 0, 3, 3),
        b: m.block(0, 3, 3, 9),
        c: m.block(3, 0, 9, 3),
        d: m.block(3, 3, 9, 9),
    }
}

/// `q(n) = 1 + 11 + ... + 11^(n-1)`.
pub fn q(n: u32) -> BigUint {
    (BigUint::from(11u32).pow(n) - 1u32) / 10u32
}

/// `A^n` in closed form, with `q(n)`.
pub fn closed_form_power(n: u32) -> (Matrix, BigUint) {
    let qn = q(n);
    let mut a = Matrix::identity(3);
    a.set(0, 0, BigUint::from(11u32).pow(n));
    a.set(0, 1, &qn * 8u32);
    a.set(0, 2, &qn * 2u32);
    (a, qn)
}

pub fn gamma0_diagram() -> CurveDiagram {
    CurveDiagram::new(
        "gamma0",
        GaussCode::new(word_tokens(&GAMMA0_WORD)).expect("valid word"),
        GAMMA0_SIGNS.to_vec(),
        &BTreeMap::new(),
    )
    .expect("valid diagram")
}

/// The lift of the genus-two curve to the `(g-1)`-fold cyclic cover: one
/// copy of its word per sheet, crossings renumbered sheet by sheet.
pub fn fixed_family_curve(g: usize) -> Result<CurveDiagram, FamilyError> {
    if g < 2 {
        return Err(FamilyError::BadGenus(g));
    }
    let mut pairs = Vec::with_capacity(6 * (g - 1));
    let mut signs = Vec::with_capacity(3 * (g - 1));
    for k in 0..g - 1 {
        pairs.extend(GAMMA0_WORD.iter().map(|&(c, p)| (c + 3 * k, p)));
        signs.extend(GAMMA0_SIGNS);
    }
    let code = GaussCode::new(word_tokens(&pairs)).expect("valid word");
    Ok(
        CurveDiagram::new(format!("fixed-g{g}"), code, signs, &BTreeMap::new())
            .expect("valid diagram"),
    )
}

/// The incidence matrix of the lifted curve, assembled from the blocks.
pub fn fixed_family_matrix(g: usize) -> Result<Matrix, FamilyError> {
    if g < 2 {
        return Err(FamilyError::BadGenus(g));
    }
    let FixedFamilyBlocks { b, c, d, .. } = fixed_blocks();
    let k = g - 1;
    let pow = |n: usize| closed_form_power(n as u32).0;
    let mut m = Matrix::zeros(3 + 9 * k, 3 + 9 * k);
    let col = |j: usize| 3 + 9 * (j - 1);
    m.set_block(0, 0, &pow(k));
    for j in 1..=k {
        m.set_block(0, col(j), &pow(k - j).mul(&b));
    }
    for i in 1..=k {
        m.set_block(col(i), 0, &c.mul(&pow(i - 1)));
        for j in 1..i {
            m.set_block(col(i), col(j), &c.mul(&pow(i - 1 - j)).mul(&b));
        }
        m.set_block(col(i), col(i), &d);
    }
    Ok(m)
}

/// The same matrix as an ordered product of one factor per sheet.
pub fn fixed_family_product(g: usize) -> Result<Matrix, FamilyError> {
    if g < 2 {
        return Err(FamilyError::BadGenus(g));
    }
    let FixedFamilyBlocks { a, b, c, d } = fixed_blocks();
    let dim = 3 + 9 * (g - 1);
    let mut m = Matrix::identity(dim);
    for sheet in 1..g {
        let mut f = Matrix::identity(dim);
        let s = 3 + 9 * (sheet - 1);
        f.set_block(0, 0, &a);
        f.set_block(0, s, &b);
        f.set_block(s, 0, &c);
        f.set_block(s, s, &d);
        m = f.mul(&m);
    }
    Ok(m)
}

/// Matrix and curve for genus `g`.
pub fn fixed_family(g: usize) -> Result<(IncidenceMatrix, CurveDiagram), FamilyError> {
    let m = fixed_family_matrix(g)?;
    let curve = fixed_family_curve(g)?;
    Ok((
        IncidenceMatrix::new(format!("fixed family, genus {g}"), m),
        curve,
    ))
}

/// `11^(g-1) + 10 q(g-1) + sum_{j=1}^{g-1} 20 q(j)`.
pub fn fixed_first_row_formula(g: usize) -> BigUint {
    let k = (g - 1) as u32;
    let tail: BigUint = (1..=k).map(|j| q(j) * 20u32).sum();
    BigUint::from(11u32).pow(k) + q(k) * 10u32 + tail
}

/// Blocks of the winding piece, linear in the winding number.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WindingFamilyBlocks {
    pub winding: u64,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub d: Matrix,
}

fn eval_rows<const C: usize>(rows: &[[i64; C]]) -> Matrix {
    let vals: Vec<Vec<u64>> = rows
        .iter()
        .map(|r| {
            r.iter()
                .map(|&v| u64::try_from(v).expect("nonnegative entry"))
                .collect()
        })
        .collect();
    Matrix::from_rows(&vals)
}

pub fn winding_blocks(n: u64) -> Result<WindingFamilyBlocks, FamilyError> {
    if n < 2 {
        return Err(FamilyError::BadParameters(format!(
            "winding number {n} < 2"
        )));
    }
    let (a, b, c, d) = winding_tables(n as i64);
    Ok(WindingFamilyBlocks {
        winding: n,
        a: eval_rows(&a),
        b: eval_rows(&b),
        c: eval_rows(&c),
        d: eval_rows(&d),
    })
}

type WindingTables = (
    [[i64; 3]; 3],
    [[i64; 14]; 3],
    [[i64; 3]; 14],
    [[i64; 14]; 14],
);

#[rustfmt::skip]
fn winding_tables(n: i64) -> WindingTables {
    let a = [
        [6 * n + 11, 6 * n + 11, 0],
        [0, 0, 0],
        [0, 0, 0],
    ];
    let b = [
        [6 * n + 8, 3, 6 * n + 5, 6 * n + 4, 6 * n + 3, 0, 1, 0, 1, 3, 9 * n - 4, 6 * n + 4, 9 * n - 1, 9 * n - 7],
        [0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 1, 0, 1, 1, 0, 0, 1, 2, 1, 1],
    ];
    let c = [
        [2, 2, 0],
        [2, 2, 0],
        [0, 0, 0],
        [4 * n + 6, 4 * n + 6, 0],
        [2, 2, 0],
        [0, 0, 0],
        [4 * n + 10, 4 * n + 10, 0],
        [4 * n + 6, 4 * n + 6, 0],
        [0, 0, 0],
        [0, 0, 1],
        [6, 5, 0],
        [2 * n - 2, 2 * n - 2, 0],
        [0, 0, 0],
        [2, 3, 0],
    ];
    let d = [
        [2, 0, 2, 2, 2, 0, 0, 0, 0, 1, 2 * n, 2, 2 * n, 2 * n - 2],
        [1, 1, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1],
        [4 * n + 4, 2, 4 * n + 2, 4 * n + 2, 4 * n + 2, 0, 2, 0, 1, 2, 6 * n - 2, 4 * n + 4, 6 * n, 6 * n - 4],
        [2, 0, 2, 1, 1, 0, 0, 0, 1, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 0, 0],
        [4 * n + 8, 2, 4 * n + 5, 4 * n + 3, 4 * n + 3, 0, 2, 0, 2, 2, 6 * n - 2, 4 * n + 4, 6 * n, 6 * n - 4],
        [4 * n + 4, 2, 4 * n + 3, 4 * n + 3, 4 * n + 3, 0, 1, 1, 0, 2, 6 * n - 2, 4 * n + 4, 6 * n, 6 * n - 4],
        [0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
        [3, 1, 2, 2, 2, 0, 0, 0, 0, 2, 2 * n, 2, 2 * n, 2 * n - 2],
        [2 * n - 2, 0, 2 * n - 2, 2 * n - 2, 2 * n - 2, 0, 0, 0, 0, 0, n - 1, 2 * n - 1, n - 1, n - 1],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 0, n - 1, 0, n, n - 1],
        [3, 1, 2, 2, 2, 0, 0, 0, 0, 0, n, 2, n + 1, n],
    ];
    (a, b, c, d)
}

fn check_winding_params(g: usize, n: u64) -> Result<(), FamilyError> {
    if g < 3 {
        return Err(FamilyError::BadParameters(format!("genus {g} < 3")));
    }
    if n < 2 {
        return Err(FamilyError::BadParameters(format!(
            "winding number {n} < 2"
        )));
    }
    Ok(())
}

/// Incidence matrix of the winding family: `g - 2` sheets of the genus-two
/// piece followed by one winding piece, applied in that order.
pub fn winding_family(g: usize, n: u64) -> Result<IncidenceMatrix, FamilyError> {
    check_winding_params(g, n)?;
    let w = winding_blocks(n)?;
    let fixed_dim = 3 + 9 * (g - 2);
    let dim = fixed_dim + 14;
    let mut first = Matrix::identity(dim);
    first.set_block(0, 0, &fixed_family_matrix(g - 1)?);
    let mut last = Matrix::identity(dim);
    last.set_block(0, 0, &w.a);
    last.set_block(0, fixed_dim, &w.b);
    last.set_block(fixed_dim, 0, &w.c);
    last.set_block(fixed_dim, fixed_dim, &w.d);
    Ok(IncidenceMatrix::new(
        format!("winding family, genus {g}, winding {n}"),
        last.mul(&first),
    ))
}

/// `(6n+11)(11^(g-2) + 10 q(g-2) + 1) + (57n+20) + sum_{j=1}^{g-2} (6n+11)(20 q(j) + 2)`.
pub fn winding_first_row_formula(g: usize, n: u64) -> BigUint {
    let k = (g - 2) as u32;
    let s = BigUint::from(6 * n + 11);
    let head = &s * (BigUint::from(11u32).pow(k) + q(k) * 10u32 + 1u32);
    let tail: BigUint = (1..=k).map(|j| &s * (q(j) * 20u32 + 2u32)).sum();
    head + BigUint::from(57 * n + 20) + tail
}

/// The genus-two curve with `n` extra crossings: the curve spirals `n` times
/// around one handle after its second passage point and crosses the spiral
/// again on its way back.
pub fn winding_curve(n: usize) -> Result<CurveDiagram, FamilyError> {
    if n < 1 {
        return Err(FamilyError::BadParameters(
            "winding curve needs n >= 1".into(),
        ));
    }
    // tokens tagged by (is_new, id); new crossings go in after positions 1 and 4
    let mut raw: Vec<(bool, usize)> = Vec::with_capacity(6 + 2 * n);
    for (k, &(c, _)) in GAMMA0_WORD.iter().enumerate() {
        raw.push((false, c));
        if k == 1 {
            raw.extend((1..=n).map(|m| (true, m)));
        }
        if k == 4 {
            raw.extend((1..=n).rev().map(|m| (true, m)));
        }
    }
    let mut ids: BTreeMap<(bool, usize), usize> = BTreeMap::new();
    let mut signs = Vec::new();
    let mut pairs = Vec::with_capacity(raw.len());
    for key in raw {
        let next = ids.len() + 1;
        let (id, passage) = match ids.get(&key) {
            Some(&id) => (id, 2),
            None => {
                ids.insert(key, next);
                signs.push(if key.0 {
                    Handedness::Left
                } else {
                    GAMMA0_SIGNS[key.1 - 1]
                });
                (next, 1)
            }
        };
        pairs.push((id, passage));
    }
    let code = GaussCode::new(word_tokens(&pairs)).expect("valid word");
    Ok(
        CurveDiagram::new(format!("winding-{n}"), code, signs, &BTreeMap::new())
            .expect("valid diagram"),
    )
}

/// First-row sum compared with the family's largest row sum and a bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowSumReport {
    pub first_row_sum: String,
    pub formula_value: String,
    pub formula_matches: bool,
    pub max_row_sum: String,
    pub first_row_is_max: bool,
    /// The bound as text, e.g. `2/5 * 11^g`.
    pub bound: String,
    pub below_bound: bool,
    pub primitive: bool,
}

/// Rows and columns of `M^3` are positive on the first row and first column.
pub fn cube_first_row_and_column_positive(m: &Matrix) -> bool {
    let m3 = m.pow(3);
    (0..m3.cols()).all(|j| !m3.get(0, j).is_zero())
        && (0..m3.rows()).all(|i| !m3.get(i, 0).is_zero())
}

pub fn fixed_row_sum_report(g: usize) -> Result<RowSumReport, FamilyError> {
    let m = fixed_family_matrix(g)?;
    let first = m.row_sums()[0].clone();
    let formula = fixed_first_row_formula(g);
    let max = row_sum_bound(&m);
    // first < 2/5 * 11^g  <=>  5 first < 2 * 11^g
    let below = &first * 5u32 < BigUint::from(11u32).pow(g as u32) * 2u32;
    Ok(RowSumReport {
        formula_matches: first == formula,
        first_row_is_max: first == max,
        first_row_sum: first.to_string(),
        formula_value: formula.to_string(),
        max_row_sum: max.to_string(),
        bound: format!("2/5 * 11^{g}"),
        below_bound: below,
        primitive: is_primitive(&m),
    })
}

pub fn winding_row_sum_report(g: usize, n: u64) -> Result<RowSumReport, FamilyError> {
    let m = winding_family(g, n)?.matrix;
    let first = m.row_sums()[0].clone();
    let formula = winding_first_row_formula(g, n);
    let max = row_sum_bound(&m);
    let below = first < BigUint::from(n) * BigUint::from(11u32).pow(g as u32);
    Ok(RowSumReport {
        formula_matches: first == formula,
        first_row_is_max: first == max,
        first_row_sum: first.to_string(),
        formula_value: formula.to_string(),
        max_row_sum: max.to_string(),
        bound: format!("{n} * 11^{g}"),
        below_bound: below,
        primitive: is_primitive(&m),
    })
}
