//! Primitivity tests and certified Perron-Frobenius enclosures.

use std::collections::VecDeque;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::matrix::Matrix;
use crate::render::{rational_to_f64, serialize_float, serialize_rational};

pub const DEFAULT_ITERATION_CAP: usize = 10_000;
pub const ITER_CAP_ENV: &str = "PUSHTRACK_ITER_CAP";

/// Iterates are rescaled once their entries pass this many bits.
const RESCALE_BITS: u64 = 4096;
const RESCALE_KEEP_BITS: u64 = 256;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("seed must be a strictly positive vector of length {0}")]
    BadSeed(usize),
    #[error("no convergence after {} iterations; best enclosure [{}, {}]", .0.iterations, .0.lo, .0.hi)]
    NonconvergenceBudget(Box<SpectralEnclosure>),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEnclosure {
    #[serde(serialize_with = "serialize_rational")]
    pub lo: BigRational,
    #[serde(serialize_with = "serialize_rational")]
    pub hi: BigRational,
    #[serde(serialize_with = "serialize_float")]
    pub lo_float: f64,
    #[serde(serialize_with = "serialize_float")]
    pub hi_float: f64,
    pub iterations: usize,
    pub primitive: bool,
    pub converged: bool,
}

impl SpectralEnclosure {
    fn new(lo: BigRational, hi: BigRational, iterations: usize, converged: bool) -> Self {
        SpectralEnclosure {
            lo_float: rational_to_f64(&lo),
            hi_float: rational_to_f64(&hi),
            lo,
            hi,
            iterations,
            primitive: true,
            converged,
        }
    }

    pub fn width(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }
}

/// Breadth-first distances from `start` along edges `i -> j` with `m[i][j] > 0`
/// (or the reverse edges).
fn bfs(m: &Matrix, start: usize, reverse: bool) -> Vec<Option<usize>> {
    let n = m.rows();
    let mut dist = vec![None; n];
    dist[start] = Some(0);
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let dv = dist[v].expect("queued vertices are reached");
        for w in 0..n {
            let edge = if reverse { m.get(w, v) } else { m.get(v, w) };
            if !edge.is_zero() && dist[w].is_none() {
                dist[w] = Some(dv + 1);
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Strong connectivity of the support digraph.
pub fn is_irreducible(m: &Matrix) -> bool {
    assert!(m.is_square());
    if m.rows() == 0 {
        return false;
    }
    if m.rows() == 1 {
        return !m.get(0, 0).is_zero();
    }
    bfs(m, 0, false).iter().all(Option::is_some) && bfs(m, 0, true).iter().all(Option::is_some)
}

/// Gcd of the cycle lengths of an irreducible support digraph.
pub fn period(m: &Matrix) -> usize {
    let level = bfs(m, 0, false);
    let n = m.rows();
    let mut g = 0usize;
    for i in 0..n {
        for j in 0..n {
            if !m.get(i, j).is_zero() {
                if let (Some(li), Some(lj)) = (level[i], level[j]) {
                    g = g.gcd(&(li + 1).abs_diff(lj));
                }
            }
        }
    }
    g
}

/// Some power of `m` is strictly positive.
pub fn is_primitive(m: &Matrix) -> bool {
    is_irreducible(m) && period(m) == 1
}

pub fn row_sum_bound(m: &Matrix) -> BigUint {
    m.row_sums().into_iter().max().unwrap_or_default()
}

pub fn min_row_sum(m: &Matrix) -> BigUint {
    m.row_sums().into_iter().min().unwrap_or_default()
}

/// One Collatz-Wielandt bracket `min (Mx)_i / x_i <= lambda <= max (Mx)_i / x_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bracket {
    pub lo: BigRational,
    pub hi: BigRational,
}

/// Power iteration on a positive integer vector, yielding the bracket of each
/// iterate. Vectors are kept in lowest terms and rescaled if they grow too
/// long; every bracket is valid for any positive vector.
pub struct CollatzWielandt<'a> {
    m: &'a Matrix,
    x: Vec<BigUint>,
}

impl<'a> CollatzWielandt<'a> {
    pub fn new(m: &'a Matrix, seed: Vec<BigUint>) -> Result<Self, SpectralError> {
        if seed.len() != m.cols() || seed.iter().any(Zero::is_zero) {
            return Err(SpectralError::BadSeed(m.cols()));
        }
        Ok(CollatzWielandt { m, x: seed })
    }

    pub fn current(&self) -> &[BigUint] {
        &self.x
    }
}

impl Iterator for CollatzWielandt<'_> {
    type Item = Bracket;

    fn next(&mut self) -> Option<Bracket> {
        let y = self.m.mul_vec(&self.x);
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for (yi, xi) in y.iter().zip(&self.x) {
            let r = BigRational::new(BigInt::from(yi.clone()), BigInt::from(xi.clone()));
            if lo.as_ref().is_none_or(|l| &r < l) {
                lo = Some(r.clone());
            }
            if hi.as_ref().is_none_or(|h| &r > h) {
                hi = Some(r);
            }
        }
        let g = y.iter().fold(BigUint::zero(), |g, v| g.gcd(v));
        let mut next: Vec<BigUint> = if g.is_zero() {
            y
        } else {
            y.into_iter().map(|v| v / &g).collect()
        };
        let bits = next.iter().map(BigUint::bits).max().unwrap_or(0);
        if bits > RESCALE_BITS {
            let shift = bits - RESCALE_KEEP_BITS;
            next = next
                .into_iter()
                .map(|v| (v >> shift).max(BigUint::one()))
                .collect();
        }
        if next.iter().any(Zero::is_zero) {
            // a zero row: the iteration cannot continue with a positive vector
            return None;
        }
        self.x = next;
        Some(Bracket {
            lo: lo.unwrap_or_default(),
            hi: hi.unwrap_or_default(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PfOptions {
    pub tol: BigRational,
    pub max_iterations: usize,
    pub seed: Option<Vec<BigUint>>,
}

impl Default for PfOptions {
    fn default() -> Self {
        PfOptions {
            tol: default_tol(),
            max_iterations: DEFAULT_ITERATION_CAP,
            seed: None,
        }
    }
}

impl PfOptions {
    /// Defaults, with the iteration cap taken from the environment if set.
    pub fn from_env() -> Self {
        let max_iterations = std::env::var(ITER_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_ITERATION_CAP);
        PfOptions {
            max_iterations,
            ..PfOptions::default()
        }
    }

    pub fn with_tol(mut self, tol: BigRational) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: Vec<BigUint>) -> Self {
        self.seed = Some(seed);
        self
    }
}

/// `10^-9`.
pub fn default_tol() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(10u64.pow(9)))
}

/// Certified bracket of the Perron-Frobenius eigenvalue of a primitive matrix.
pub fn pf_enclosure(m: &Matrix, opts: &PfOptions) -> Result<SpectralEnclosure, SpectralError> {
    if !is_primitive(m) {
        return Err(SpectralError::NotPrimitive);
    }
    let seed = opts
        .seed
        .clone()
        .unwrap_or_else(|| vec![BigUint::one(); m.cols()]);
    let mut iter = CollatzWielandt::new(m, seed)?;
    let mut best: Option<Bracket> = None;
    let mut steps = 0;
    while steps < opts.max_iterations.max(1) {
        let Some(b) = iter.next() else { break };
        steps += 1;
        let merged = match best.take() {
            None => b,
            Some(prev) => Bracket {
                lo: prev.lo.max(b.lo),
                hi: prev.hi.min(b.hi),
            },
        };
        let done = &merged.hi - &merged.lo <= opts.tol;
        best = Some(merged);
        if done {
            let b = best.expect("just set");
            return Ok(SpectralEnclosure::new(b.lo, b.hi, steps, true));
        }
    }
    let b = best.expect("primitive matrices have no zero rows");
    Err(SpectralError::NonconvergenceBudget(Box::new(
        SpectralEnclosure::new(b.lo, b.hi, steps, false),
    )))
}
