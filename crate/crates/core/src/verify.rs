//! The self-verification suite behind `pushtrack verify`.
//!
//! Each check recomputes its expected values by a route independent of the
//! code under test where one exists: literal tables, closed forms, brute force.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{dilatation_bounds, least_dilatation_bounds, PowerClass};
use crate::curve::{face_labels, CurveDiagram, Handedness, SurfaceSig};
use crate::families::{
    cube_first_row_and_column_positive, fixed_family_curve, fixed_family_matrix, gamma0_diagram,
    winding_curve, winding_family, winding_first_row_formula, GAMMA0_MATRIX,
};
use crate::incidence::{incidence_matrix, pass_matrix};
use crate::matrix::Matrix;
use crate::pretrack::{build_pretrack, classify_regions, TrackClass};
use crate::spectral::{is_primitive, pf_enclosure, CollatzWielandt, PfOptions};

#[derive(Debug, Clone)]
pub struct CriterionResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} criterion {} ({}): {} [{} ms, budget {} ms]",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_millis(),
            self.budget.as_millis()
        )
    }
}

type Check = fn() -> Result<String, String>;

struct Criterion {
    id: usize,
    name: &'static str,
    group: &'static str,
    budget_ms: u64,
    run: Check,
}

const CRITERIA: [Criterion; 10] = [
    Criterion {
        id: 1,
        name: "pass-matrix",
        group: "incidence",
        budget_ms: 1000,
        run: pass_matrices,
    },
    Criterion {
        id: 2,
        name: "genus-two",
        group: "incidence pretrack",
        budget_ms: 1000,
        run: genus_two,
    },
    Criterion {
        id: 3,
        name: "fixed-family",
        group: "families",
        budget_ms: 5000,
        run: fixed_chain,
    },
    Criterion {
        id: 4,
        name: "cross-module",
        group: "families incidence",
        budget_ms: 5000,
        run: cross_module,
    },
    Criterion {
        id: 5,
        name: "winding-family",
        group: "families",
        budget_ms: 10_000,
        run: winding_chain,
    },
    Criterion {
        id: 6,
        name: "enclosure",
        group: "spectral",
        budget_ms: 1000,
        run: enclosure,
    },
    Criterion {
        id: 7,
        name: "euler-index",
        group: "pretrack",
        budget_ms: 1000,
        run: euler_conservation,
    },
    Criterion {
        id: 8,
        name: "monogon",
        group: "pretrack",
        budget_ms: 1000,
        run: monogon_detection,
    },
    Criterion {
        id: 9,
        name: "primitivity",
        group: "spectral",
        budget_ms: 10_000,
        run: primitivity_oracle,
    },
    Criterion {
        id: 10,
        name: "bounds",
        group: "bounds",
        budget_ms: 1000,
        run: bound_evaluators,
    },
];

/// Names accepted by `--filter`, besides criterion numbers.
pub fn criterion_names() -> Vec<(usize, &'static str, &'static str)> {
    CRITERIA.iter().map(|c| (c.id, c.name, c.group)).collect()
}

fn selected(c: &Criterion, filter: Option<&str>) -> bool {
    match filter {
        None => true,
        Some(f) => {
            let f = f.trim().to_ascii_lowercase();
            f.parse::<usize>().is_ok_and(|n| n == c.id)
                || c.name.contains(&f)
                || c.group.split(' ').any(|g| g == f)
        }
    }
}

/// Run the criteria matching `filter` (a number, name fragment or group).
/// A criterion that overruns its time budget fails.
pub fn run_criteria(filter: Option<&str>) -> Vec<CriterionResult> {
    CRITERIA
        .iter()
        .filter(|c| selected(c, filter))
        .map(|c| {
            let start = Instant::now();
            let outcome = (c.run)();
            let elapsed = start.elapsed();
            let budget = Duration::from_millis(c.budget_ms);
            let (mut passed, mut detail) = match outcome {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            if passed && elapsed > budget {
                passed = false;
                detail.push_str("; over time budget");
            }
            CriterionResult {
                id: c.id,
                name: c.name,
                passed,
                detail,
                elapsed,
                budget,
            }
        })
        .collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// The 6x6 active part of the pass matrix, rows and columns ordered eye then
/// crossing, for each orientation.
#[rustfmt::skip]
const RIGHT_DISPLAY: [[u32; 6]; 6] = [
    [1, 0, 1, 1, 0, 0],
    [0, 0, 0, 0, 1, 0],
    [0, 0, 0, 0, 0, 1],
    [2, 0, 1, 0, 0, 0],
    [0, 0, 1, 1, 1, 0],
    [0, 1, 0, 0, 0, 0],
];
#[rustfmt::skip]
const LEFT_DISPLAY: [[u32; 6]; 6] = [
    [1, 1, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 1],
    [0, 0, 0, 0, 1, 0],
    [2, 1, 0, 0, 0, 0],
    [0, 1, 0, 1, 1, 0],
    [0, 0, 1, 0, 0, 0],
];

fn pass_matrices() -> Result<String, String> {
    let mut count = 0;
    for n in 1..=16usize {
        for i in 1..=n {
            for (orientation, display) in [
                (Handedness::Right, &RIGHT_DISPLAY),
                (Handedness::Left, &LEFT_DISPLAY),
            ] {
                let m = pass_matrix(n, i, orientation)
                    .map_err(|e| e.to_string())?
                    .matrix;
                let active = |r: usize| {
                    if r < 3 {
                        Some(r)
                    } else if r / 3 == i {
                        Some(3 + r % 3)
                    } else {
                        None
                    }
                };
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        let want = match (active(r), active(c)) {
                            (Some(a), Some(b)) => display[a][b],
                            (None, _) | (_, None) => u32::from(r == c),
                        };
                        ensure(*m.get(r, c) == BigUint::from(want), || {
                            format!(
                                "n={n} i={i} {orientation}: entry ({r},{c}) is {}",
                                m.get(r, c)
                            )
                        })?;
                    }
                }
                let max = m.row_sums().into_iter().max().unwrap_or_default();
                ensure(max <= BigUint::from(3u32), || {
                    format!("n={n} i={i}: row sum {max}")
                })?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} pass matrices match, row sums <= 3"))
}

fn genus_two() -> Result<String, String> {
    let d = gamma0_diagram();
    let m = incidence_matrix(&d).map_err(|e| e.to_string())?.matrix;
    for (r, row) in GAMMA0_MATRIX.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            ensure(*m.get(r, c) == BigUint::from(v), || {
                format!("entry ({r},{c}) is {}, expected {v}", m.get(r, c))
            })?;
        }
    }
    let track = build_pretrack(&d).map_err(|e| e.to_string())?;
    let census = classify_regions(&track);
    ensure(
        census.trigons == 5
            && census.punctured_monogons == 1
            && census.monogons == 0
            && census.bigons == 0
            && census.higher == 0
            && census.nullgons == 0
            && census.punctured_nullgons == 0
            && census.punctured_higher == 0,
        || format!("census {census:?}"),
    )?;
    ensure(census.track_class == TrackClass::TrainTrack, || {
        format!("track class {}", census.track_class)
    })?;
    Ok("144 entries match; 5 trigons + 1 punctured monogon, train_track".into())
}

fn pow_u(b: u32, e: usize) -> BigUint {
    BigUint::from(b).pow(e as u32)
}

/// `q(n) = sum_{j<n} 11^j`, summed directly.
fn q_sum(n: usize) -> BigUint {
    (0..n).map(|j| pow_u(11, j)).sum()
}

fn fixed_chain() -> Result<String, String> {
    let mut sums = Vec::new();
    for g in 2..=8usize {
        let m = fixed_family_matrix(g).map_err(|e| e.to_string())?;
        let rows = m.row_sums();
        let first = rows[0].clone();
        let formula = pow_u(11, g - 1)
            + q_sum(g - 1) * 10u32
            + (1..g).map(|j| q_sum(j) * 20u32).sum::<BigUint>();
        ensure(first == formula, || {
            format!("g={g}: first row {first}, formula {formula}")
        })?;
        ensure(rows.iter().all(|r| r <= &first), || {
            format!("g={g}: first row is not the maximum")
        })?;
        ensure(&first * 5u32 < pow_u(11, g) * 2u32, || {
            format!("g={g}: {first} >= 2/5 11^g")
        })?;
        ensure(cube_first_row_and_column_positive(&m), || {
            format!("g={g}: M^3 has a zero on row or column 0")
        })?;
        ensure(is_primitive(&m), || format!("g={g}: not primitive"))?;
        sums.push(first.to_string());
    }
    Ok(format!("first-row sums {}", sums.join(", ")))
}

fn cross_module() -> Result<String, String> {
    for g in 2..=5usize {
        let curve = fixed_family_curve(g).map_err(|e| e.to_string())?;
        let from_curve = incidence_matrix(&curve).map_err(|e| e.to_string())?.matrix;
        let assembled = fixed_family_matrix(g).map_err(|e| e.to_string())?;
        ensure(from_curve == assembled, || {
            format!("g={g}: matrices differ")
        })?;
    }
    Ok("g = 2..5 agree entrywise".into())
}

fn winding_chain() -> Result<String, String> {
    let mut seen = Vec::new();
    for g in 3..=5usize {
        for n in 2..=10u64 {
            let m = winding_family(g, n).map_err(|e| e.to_string())?.matrix;
            let first: BigUint = m.row(0).iter().sum();
            let formula = winding_first_row_formula(g, n);
            ensure(first == formula, || {
                format!("g={g} n={n}: first row {first}, sum expression {formula}")
            })?;
            ensure(first < BigUint::from(n) * pow_u(11, g), || {
                format!("g={g} n={n}: {first} >= n 11^g")
            })?;
            ensure(is_primitive(&m), || format!("g={g} n={n}: not primitive"))?;
            if n == 2 {
                seen.push(format!("g={g}: {first}"));
            }
        }
    }
    Ok(format!("27 cases; n=2 sums {}", seen.join(", ")))
}

fn enclosure() -> Result<String, String> {
    let m = Matrix::from_rows(&GAMMA0_MATRIX.iter().map(|r| r.to_vec()).collect::<Vec<_>>());
    let tol = BigRational::new(BigInt::one(), BigInt::from(10u64.pow(9)));
    let opts = PfOptions::default().with_tol(tol.clone());
    let e = pf_enclosure(&m, &opts).map_err(|e| e.to_string())?;
    // lo >= 4^(1/5) exactly: lo^5 >= 4
    let lo5 = (0..5).fold(BigRational::one(), |acc, _| acc * &e.lo);
    ensure(lo5 >= BigRational::from_integer(4.into()), || {
        format!("lo = {} below 4^(1/5)", e.lo_float)
    })?;
    ensure(e.hi <= BigRational::from_integer(41.into()), || {
        format!("hi = {} above 41", e.hi_float)
    })?;
    ensure(e.width() <= tol, || format!("width {}", e.width()))?;
    let mut it =
        CollatzWielandt::new(&m, vec![BigUint::one(); m.cols()]).map_err(|e| e.to_string())?;
    let mut prev = it.next().ok_or("no bracket")?;
    for step in 1..e.iterations {
        let b = it.next().ok_or("iteration stopped")?;
        ensure(b.lo >= prev.lo && b.hi <= prev.hi, || {
            format!("bracket not monotone at step {step}")
        })?;
        prev = b;
    }
    Ok(format!(
        "[{:.12}, {:.12}] after {} iterations",
        e.lo_float, e.hi_float, e.iterations
    ))
}

/// Every diagram the suite builds a pretrack for, with punctured variants
/// that put one puncture in each of the first few faces.
fn suite_diagrams() -> Vec<CurveDiagram> {
    let mut base = vec![gamma0_diagram()];
    for g in 2..=8 {
        base.push(fixed_family_curve(g).expect("valid genus"));
    }
    for n in 1..=10 {
        base.push(winding_curve(n).expect("valid winding"));
    }
    let mut out = base.clone();
    for d in &base {
        let labels: Vec<String> = face_labels(d).into_iter().collect();
        for k in 1..=labels.len().min(3) {
            let punctures: BTreeMap<String, usize> =
                labels[..k].iter().map(|l| (l.clone(), 1)).collect();
            out.push(
                CurveDiagram::new(
                    format!("{}+{k}", d.name()),
                    d.code().clone(),
                    d.signs().to_vec(),
                    &punctures,
                )
                .expect("valid punctures"),
            );
        }
    }
    out
}

fn euler_conservation() -> Result<String, String> {
    let diagrams = suite_diagrams();
    for d in &diagrams {
        let track = build_pretrack(d).map_err(|e| format!("{}: {e}", d.name()))?;
        let census = classify_regions(&track);
        let SurfaceSig { genus, punctures } = d.surface();
        let expected =
            BigRational::from_integer(BigInt::from(2 - 2 * genus as i64 - (punctures as i64 + 1)));
        let sum: BigRational = track.regions().iter().map(|r| r.euler_index.clone()).sum();
        ensure(sum == expected && census.euler_sum == expected, || {
            format!("{}: sum {sum}, expected {expected}", d.name())
        })?;
    }
    Ok(format!(
        "{} pretracks conserve the Euler index",
        diagrams.len()
    ))
}

fn monogon_detection() -> Result<String, String> {
    for n in 1..=5 {
        let d = winding_curve(n).map_err(|e| e.to_string())?;
        let census = classify_regions(&build_pretrack(&d).map_err(|e| e.to_string())?);
        ensure(census.track_class == TrackClass::PretrackOnly, || {
            format!("n={n}: track class {}", census.track_class)
        })?;
        ensure(census.monogons >= 1, || {
            format!("n={n}: no unpunctured monogon")
        })?;
    }
    Ok("winding curves n = 1..5 are pretrack_only with monogons".into())
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

/// Some power up to the Wielandt exponent is entrywise positive.
fn brute_force_primitive(m: &[Vec<bool>]) -> bool {
    let d = m.len();
    let mut p = m.to_vec();
    for _ in 0..(d - 1) * (d - 1) + 1 {
        if p.iter().all(|row| row.iter().all(|&x| x)) {
            return true;
        }
        p = bool_mul(&p, m);
    }
    false
}

fn primitivity_oracle() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut primitive = 0;
    for trial in 0..1000 {
        let d = rng.gen_range(1..=8usize);
        let density = rng.gen_range(0.1..0.7);
        let rows: Vec<Vec<u32>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        if rng.gen_bool(density) {
                            rng.gen_range(1..4)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let support: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let want = brute_force_primitive(&support);
        let got = is_primitive(&Matrix::from_rows(&rows));
        ensure(want == got, || {
            format!("trial {trial}: {rows:?} brute force {want}, is_primitive {got}")
        })?;
        primitive += usize::from(want);
    }
    Ok(format!("1000 matrices agree ({primitive} primitive)"))
}

fn close(got: f64, want: f64) -> bool {
    (got - want).abs() <= 1e-12 * want.abs()
}

fn bound_evaluators() -> Result<String, String> {
    let ln = f64::ln;
    let s2 = least_dilatation_bounds(SurfaceSig::closed(2), None).map_err(|e| e.to_string())?;
    ensure(
        close(s2.log_lower, ln(4.0) / 5.0)
            && close(s2.log_upper().unwrap_or(f64::NAN), 2.0 * ln(11.0))
            && s2.upper_strict,
        || format!("S_2: [{}, {:?})", s2.log_lower, s2.log_upper()),
    )?;
    let s3 = least_dilatation_bounds(SurfaceSig::closed(3), Some(8)).map_err(|e| e.to_string())?;
    ensure(
        close(s3.log_lower, ln(9.0) / 5.0)
            && close(s3.log_upper().unwrap_or(f64::NAN), ln(8.0) + 3.0 * ln(11.0))
            && s3.upper_strict,
        || format!("S_3, k=8: [{}, {:?})", s3.log_lower, s3.log_upper()),
    )?;
    // (i, genus, punctures, class, dilatation lower bound as a fifth root)
    let table: [(u64, usize, usize, PowerClass, f64); 20] = [
        (2, 0, 4, PowerClass::SquareS04S12, 2.0),
        (5, 0, 4, PowerClass::SquareS04S12, 5.0),
        (9, 0, 4, PowerClass::SquareS04S12, 9.0),
        (2, 1, 2, PowerClass::SquareS04S12, 2.0),
        (7, 1, 2, PowerClass::SquareS04S12, 7.0),
        (16, 1, 2, PowerClass::SquareS04S12, 16.0),
        (1, 1, 1, PowerClass::Power234S11, 1.0),
        (3, 1, 1, PowerClass::Power234S11, 2.0),
        (8, 1, 1, PowerClass::Power234S11, 4.5),
        (15, 1, 1, PowerClass::Power234S11, 8.0),
        (40, 1, 1, PowerClass::Power234S11, 20.5),
        (3, 2, 0, PowerClass::Primitive, 4.0),
        (5, 2, 0, PowerClass::Primitive, 6.0),
        (6, 3, 0, PowerClass::Primitive, 7.0),
        (10, 3, 0, PowerClass::Other, 11.0),
        (2, 0, 4, PowerClass::Primitive, 3.0),
        (4, 1, 3, PowerClass::Other, 5.0),
        (12, 2, 2, PowerClass::Primitive, 13.0),
        (25, 4, 1, PowerClass::Other, 26.0),
        (50, 5, 0, PowerClass::Primitive, 51.0),
    ];
    for &(i, g, n, class, root) in &table {
        let r = dilatation_bounds(i, SurfaceSig::new(g, n), class).map_err(|e| e.to_string())?;
        let want_lo = root.powf(0.2).ln();
        let want_hi = 9f64.powi(i as i32).ln();
        let lo_ok = if want_lo == 0.0 {
            r.log_lower == 0.0
        } else {
            close(r.log_lower, want_lo)
        };
        ensure(
            lo_ok && close(r.log_upper().unwrap_or(f64::NAN), want_hi),
            || {
                format!(
                    "i={i} S_{{{g},{n}}} {class}: [{}, {:?}]",
                    r.log_lower,
                    r.log_upper()
                )
            },
        )?;
    }
    Ok("least-dilatation bounds and 20 tuples within 1e-12".into())
}
