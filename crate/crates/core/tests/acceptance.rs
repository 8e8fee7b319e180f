//! End-to-end acceptance checks. Each prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pushtrack::bounds::{dilatation_bounds, least_dilatation_bounds, PowerClass};
use pushtrack::curve::face_labels;
use pushtrack::families::{
    fixed_family_curve, fixed_family_matrix, gamma0_diagram, winding_curve, winding_family,
};
use pushtrack::incidence::pass_matrix;
use pushtrack::pretrack::Side;
use pushtrack::spectral::{is_primitive, pf_enclosure, CollatzWielandt, PfOptions};
use pushtrack::{
    build_pretrack, classify_regions, incidence_matrix, CurveDiagram, Handedness, Matrix,
    SurfaceSig, TrackClass,
};

type Dense = Vec<Vec<u128>>;

fn to_dense(m: &Matrix) -> Dense {
    (0..m.rows())
        .map(|i| {
            m.row(i)
                .iter()
                .map(|x| x.to_u128().expect("entry fits"))
                .collect()
        })
        .collect()
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let (n, k, m) = (a.len(), b.len(), b[0].len());
    let mut out = vec![vec![0u128; m]; n];
    for i in 0..n {
        for l in 0..k {
            if a[i][l] != 0 {
                for j in 0..m {
                    out[i][j] += a[i][l] * b[l][j];
                }
            }
        }
    }
    out
}

fn identity(n: usize) -> Dense {
    (0..n)
        .map(|i| (0..n).map(|j| u128::from(i == j)).collect())
        .collect()
}

fn bool_mul(a: &[Vec<bool>], b: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = a.len();
    (0..n)
        .map(|i| (0..n).map(|j| (0..n).any(|k| a[i][k] && b[k][j])).collect())
        .collect()
}

fn support(m: &Dense) -> Vec<Vec<bool>> {
    m.iter()
        .map(|r| r.iter().map(|&x| x > 0).collect())
        .collect()
}

/// `M^6 > 0` by repeated boolean products.
fn sixth_power_positive(m: &Dense) -> bool {
    let s = support(m);
    let s2 = bool_mul(&s, &s);
    let s3 = bool_mul(&s2, &s);
    bool_mul(&s3, &s3).iter().all(|r| r.iter().all(|&x| x))
}

fn q(n: u32) -> u128 {
    (0..n).map(|j| 11u128.pow(j)).sum()
}

// Reference genus-two incidence matrix, eye rows first.
#[rustfmt::skip]
const PUBLISHED: [[u128; 12]; 12] = [
    [11, 8, 2,   5, 0, 5, 4, 4, 0, 1, 0, 1],
    [0, 1, 0,    1, 1, 0, 0, 0, 0, 0, 0, 0],
    [0, 0, 1,    0, 0, 0, 0, 0, 0, 1, 1, 0],
    [2, 2, 0,    2, 0, 2, 2, 1, 0, 0, 0, 0],
    [2, 2, 0,    1, 1, 0, 0, 1, 0, 0, 0, 0],
    [0, 0, 0,    0, 0, 0, 0, 0, 1, 0, 0, 0],
    [6, 4, 2,    2, 0, 2, 2, 2, 0, 2, 0, 1],
    [2, 2, 0,    2, 0, 2, 1, 1, 0, 0, 0, 1],
    [0, 0, 0,    0, 0, 0, 0, 0, 0, 0, 1, 0],
    [10, 8, 2,   6, 0, 5, 3, 3, 0, 2, 0, 2],
    [6, 4, 2,    2, 0, 3, 3, 3, 0, 1, 1, 0],
    [0, 0, 0,    0, 1, 0, 0, 0, 0, 0, 0, 0],
];

// Active 6x6 part of the pass matrices: eye rows/columns, then crossing.
#[rustfmt::skip]
const RIGHT: [[u128; 6]; 6] = [
    [1, 0, 1, 1, 0, 0], [0, 0, 0, 0, 1, 0], [0, 0, 0, 0, 0, 1],
    [2, 0, 1, 0, 0, 0], [0, 0, 1, 1, 1, 0], [0, 1, 0, 0, 0, 0],
];
#[rustfmt::skip]
const LEFT: [[u128; 6]; 6] = [
    [1, 1, 0, 1, 0, 0], [0, 0, 0, 0, 0, 1], [0, 0, 0, 0, 1, 0],
    [2, 1, 0, 0, 0, 0], [0, 1, 0, 1, 1, 0], [0, 0, 1, 0, 0, 0],
];

/// The fixed-family matrix as an ordered product of per-sheet factors built
/// from the published blocks, first sheet applied first.
fn fixed_oracle(g: usize) -> Dense {
    let dim = 3 + 9 * (g - 1);
    let mut m = identity(dim);
    for sheet in 1..g {
        let s = 3 + 9 * (sheet - 1);
        let idx = |k: usize| if k < 3 { k } else { s + k - 3 };
        let mut f = identity(dim);
        for r in 0..12 {
            for c in 0..12 {
                f[idx(r)][idx(c)] = PUBLISHED[r][c];
            }
        }
        m = mul(&f, &m);
    }
    m
}

type Outcome = Result<String, String>;
/// Name, check and time budget in milliseconds.
type Named = (&'static str, fn() -> Outcome, u128);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn criterion_1() -> Outcome {
    let mut count = 0;
    for n in 1..=16usize {
        for i in 1..=n {
            for (h, table) in [(Handedness::Right, &RIGHT), (Handedness::Left, &LEFT)] {
                let m = to_dense(&pass_matrix(n, i, h).map_err(|e| e.to_string())?.matrix);
                let slot = |r: usize| match r {
                    0..=2 => Some(r),
                    _ if r / 3 == i => Some(3 + r % 3),
                    _ => None,
                };
                for (r, row) in m.iter().enumerate() {
                    for (c, &v) in row.iter().enumerate() {
                        let want = match (slot(r), slot(c)) {
                            (Some(a), Some(b)) => table[a][b],
                            _ => u128::from(r == c),
                        };
                        check(v == want, || {
                            format!("n={n} i={i} {h}: ({r},{c}) = {v}, want {want}")
                        })?;
                    }
                    let sum: u128 = row.iter().sum();
                    check(sum <= 3, || {
                        format!("n={n} i={i} {h}: row {r} sums to {sum}")
                    })?;
                }
                count += 1;
            }
        }
    }
    Ok(format!("{count} pass matrices, row sums at most 3"))
}

fn criterion_2() -> Outcome {
    let d = gamma0_diagram();
    let m = to_dense(&incidence_matrix(&d).map_err(|e| e.to_string())?.matrix);
    let published: Dense = PUBLISHED.iter().map(|r| r.to_vec()).collect();
    check(m == published, || {
        "genus-two matrix differs from the reference".into()
    })?;
    let track = build_pretrack(&d).map_err(|e| e.to_string())?;
    let mut shapes: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for r in track.regions() {
        *shapes
            .entry((recount_cusps(&track, r), r.punctures))
            .or_default() += 1;
    }
    let want = BTreeMap::from([((3, 0), 5), ((1, 1), 1)]);
    check(shapes == want, || {
        format!("regions by (cusps, punctures): {shapes:?}")
    })?;
    let class = classify_regions(&track).track_class;
    check(class == TrackClass::TrainTrack, || {
        format!("track class {class}")
    })?;
    Ok("144 entries; 5 trigons and 1 punctured monogon; train_track".into())
}

/// Count cusps from the switch rotations: a corner is a cusp when both
/// branch ends bounding it leave on the same side.
fn recount_cusps(
    track: &pushtrack::pretrack::Pretrack,
    region: &pushtrack::pretrack::Region,
) -> usize {
    region
        .corners
        .iter()
        .filter(|c| {
            let rot = &track.switches()[c.switch].rotation;
            let a: Side = rot[c.position].side;
            let b: Side = rot[(c.position + 1) % rot.len()].side;
            a == b
        })
        .count()
}

fn criterion_3() -> Outcome {
    let mut sums = Vec::new();
    for g in 2..=8usize {
        let m = to_dense(&fixed_family_matrix(g).map_err(|e| e.to_string())?);
        check(m == fixed_oracle(g), || {
            format!("g={g}: assembled matrix differs from the sheet product")
        })?;
        let rows: Vec<u128> = m.iter().map(|r| r.iter().sum()).collect();
        let k = (g - 1) as u32;
        let formula = 11u128.pow(k) + 10 * q(k) + (1..=k).map(|j| 20 * q(j)).sum::<u128>();
        check(rows[0] == formula, || {
            format!("g={g}: first row {} vs {formula}", rows[0])
        })?;
        check(rows.iter().all(|&r| r <= rows[0]), || {
            format!("g={g}: first row is not the largest")
        })?;
        check(5 * rows[0] < 2 * 11u128.pow(g as u32), || {
            format!("g={g}: {} is not below 2/5 11^g", rows[0])
        })?;
        let m3 = mul(&mul(&m, &m), &m);
        check(
            m3[0].iter().all(|&x| x > 0) && m3.iter().all(|r| r[0] > 0),
            || format!("g={g}: M^3 has a zero in its first row or column"),
        )?;
        let primitive = is_primitive(&fixed_family_matrix(g).map_err(|e| e.to_string())?);
        check(primitive && sixth_power_positive(&m), || {
            format!("g={g}: not primitive")
        })?;
        sums.push(rows[0].to_string());
    }
    Ok(format!("first-row sums {}", sums.join(", ")))
}

fn criterion_4() -> Outcome {
    for g in 2..=5usize {
        let curve = fixed_family_curve(g).map_err(|e| e.to_string())?;
        let from_curve = to_dense(&incidence_matrix(&curve).map_err(|e| e.to_string())?.matrix);
        let assembled = to_dense(&fixed_family_matrix(g).map_err(|e| e.to_string())?);
        check(from_curve == assembled, || {
            format!("g={g}: curve and assembly disagree")
        })?;
        check(from_curve == fixed_oracle(g), || {
            format!("g={g}: curve and sheet product disagree")
        })?;
    }
    Ok("g = 2..5 agree entrywise".into())
}

fn criterion_5() -> Outcome {
    for g in 3..=5u32 {
        for n in 2..=10u128 {
            let m = to_dense(
                &winding_family(g as usize, n as u64)
                    .map_err(|e| e.to_string())?
                    .matrix,
            );
            let first: u128 = m[0].iter().sum();
            let w = 6 * n + 11;
            let expr = w * (11u128.pow(g - 2) + 10 * q(g - 2) + 1)
                + (57 * n + 20)
                + (1..=g - 2).map(|j| w * (20 * q(j) + 2)).sum::<u128>();
            check(first == expr, || {
                format!("g={g} n={n}: first row {first}, sum expression {expr}")
            })?;
            check(first < n * 11u128.pow(g), || {
                format!("g={g} n={n}: {first} >= n 11^g")
            })?;
            let primitive = is_primitive(
                &winding_family(g as usize, n as u64)
                    .map_err(|e| e.to_string())?
                    .matrix,
            );
            check(primitive && sixth_power_positive(&m), || {
                format!("g={g} n={n}: not primitive")
            })?;
        }
    }
    Ok("g in 3..5, n in 2..10".into())
}

fn criterion_6() -> Outcome {
    let m = Matrix::from_rows(
        &PUBLISHED
            .iter()
            .map(|r| r.iter().map(|&x| x as u32).collect())
            .collect::<Vec<Vec<u32>>>(),
    );
    let tol = BigRational::new(BigInt::one(), BigInt::from(1_000_000_000u64));
    let e =
        pf_enclosure(&m, &PfOptions::default().with_tol(tol.clone())).map_err(|e| e.to_string())?;
    let lo5 = (0..5).fold(BigRational::one(), |p, _| p * &e.lo);
    check(lo5 >= BigRational::from_integer(4.into()), || {
        format!("lo {} is below 4^(1/5)", e.lo_float)
    })?;
    check(e.hi <= BigRational::from_integer(41.into()), || {
        format!("hi {} is above 41", e.hi_float)
    })?;
    check(e.hi.clone() - e.lo.clone() <= tol, || {
        "enclosure wider than 1e-9".into()
    })?;

    // running bounds reported at each cap, and the raw brackets
    let mut prev: Option<(BigRational, BigRational)> = None;
    for cap in 1..=e.iterations {
        let opts = PfOptions {
            tol: BigRational::from_integer(0.into()),
            max_iterations: cap,
            seed: None,
        };
        let b = match pf_enclosure(&m, &opts) {
            Ok(b) => b,
            Err(pushtrack::spectral::SpectralError::NonconvergenceBudget(b)) => *b,
            Err(err) => return Err(err.to_string()),
        };
        if let Some((lo, hi)) = &prev {
            check(&b.lo >= lo && &b.hi <= hi, || {
                format!("cap {cap}: bounds not monotone")
            })?;
        }
        prev = Some((b.lo, b.hi));
    }
    let mut it = CollatzWielandt::new(&m, vec![BigUint::one(); 12]).map_err(|e| e.to_string())?;
    let mut last = it.next().ok_or("no bracket")?;
    for step in 1..e.iterations {
        let b = it.next().ok_or("iteration stopped")?;
        check(b.lo >= last.lo && b.hi <= last.hi, || {
            format!("raw bracket {step} not nested")
        })?;
        last = b;
    }

    // floating power iteration lands inside
    let dense: Vec<Vec<f64>> = PUBLISHED
        .iter()
        .map(|r| r.iter().map(|&x| x as f64).collect())
        .collect();
    let mut x = vec![1.0f64; 12];
    let mut lambda = 0.0;
    for _ in 0..500 {
        let y: Vec<f64> = dense
            .iter()
            .map(|r| r.iter().zip(&x).map(|(a, b)| a * b).sum())
            .collect();
        let norm = y.iter().cloned().fold(0.0, f64::max);
        lambda = norm / x.iter().cloned().fold(0.0, f64::max);
        x = y.iter().map(|v| v / norm).collect();
    }
    check(
        e.lo_float - 1e-9 <= lambda && lambda <= e.hi_float + 1e-9,
        || {
            format!(
                "float estimate {lambda} outside [{}, {}]",
                e.lo_float, e.hi_float
            )
        },
    )?;
    Ok(format!(
        "[{:.12}, {:.12}] in {} iterations",
        e.lo_float, e.hi_float, e.iterations
    ))
}

fn all_diagrams() -> Vec<CurveDiagram> {
    let mut base = vec![gamma0_diagram()];
    base.extend((2..=8).map(|g| fixed_family_curve(g).unwrap()));
    base.extend((1..=10).map(|n| winding_curve(n).unwrap()));
    let mut out = base.clone();
    for d in &base {
        let labels: Vec<String> = face_labels(d).into_iter().collect();
        for k in 1..=labels.len().min(4) {
            let p: BTreeMap<String, usize> = labels[..k].iter().map(|l| (l.clone(), 1)).collect();
            out.push(
                CurveDiagram::new(
                    format!("{}+{k}", d.name()),
                    d.code().clone(),
                    d.signs().to_vec(),
                    &p,
                )
                .unwrap(),
            );
        }
    }
    out
}

fn criterion_7() -> Outcome {
    let ds = all_diagrams();
    for d in &ds {
        // genus from the cellulation: V - E + F with V = n, E = 2n
        let n = d.self_intersections() as i64;
        let chi = n - 2 * n + d.faces().len() as i64;
        let genus = (2 - chi) / 2;
        let punctures: i64 = d.faces().iter().map(|f| f.punctures as i64).sum();
        let expected = BigRational::from_integer(BigInt::from(2 - 2 * genus - (punctures + 1)));
        let track = build_pretrack(d).map_err(|e| format!("{}: {e}", d.name()))?;
        let mut total = BigRational::from_integer(0.into());
        for r in track.regions() {
            let cusps = recount_cusps(&track, r) as i64;
            let index = BigRational::new(
                BigInt::from(2 * (1 - r.punctures as i64) - cusps),
                BigInt::from(2),
            );
            check(index == r.euler_index, || {
                format!("{}: region index {} vs {index}", d.name(), r.euler_index)
            })?;
            total += index;
        }
        check(total == expected, || {
            format!("{}: sum {total}, expected {expected}", d.name())
        })?;
    }
    Ok(format!("{} pretracks", ds.len()))
}

fn criterion_8() -> Outcome {
    for n in 1..=5 {
        let d = winding_curve(n).map_err(|e| e.to_string())?;
        let track = build_pretrack(&d).map_err(|e| e.to_string())?;
        let monogons = track
            .regions()
            .iter()
            .filter(|r| r.punctures == 0 && recount_cusps(&track, r) == 1)
            .count();
        check(monogons >= 1, || format!("n={n}: no unpunctured monogon"))?;
        let class = classify_regions(&track).track_class;
        check(class == TrackClass::PretrackOnly, || {
            format!("n={n}: track class {class}")
        })?;
    }
    Ok("winding curves n = 1..5 carry unpunctured monogons".into())
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut positives = 0;
    for t in 0..1000 {
        let d = rng.gen_range(1..=8usize);
        let p = rng.gen_range(0.05..0.75);
        let rows: Vec<Vec<u32>> = (0..d)
            .map(|_| {
                (0..d)
                    .map(|_| {
                        if rng.gen_bool(p) {
                            rng.gen_range(1..=5)
                        } else {
                            0
                        }
                    })
                    .collect()
            })
            .collect();
        let s: Vec<Vec<bool>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x > 0).collect())
            .collect();
        let mut power = s.clone();
        let mut brute = false;
        for _ in 0..(d - 1) * (d - 1) + 1 {
            if power.iter().all(|r| r.iter().all(|&x| x)) {
                brute = true;
                break;
            }
            power = bool_mul(&power, &s);
        }
        let got = is_primitive(&Matrix::from_rows(&rows));
        check(got == brute, || {
            format!("matrix {t} {rows:?}: brute force {brute}, is_primitive {got}")
        })?;
        positives += usize::from(brute);
    }
    Ok(format!("1000 matrices, {positives} primitive"))
}

fn rel(got: f64, want: f64) -> bool {
    (got - want).abs() <= 1e-12 * want.abs()
}

fn criterion_10() -> Outcome {
    let s2 = least_dilatation_bounds(SurfaceSig::closed(2), None).map_err(|e| e.to_string())?;
    check(rel(s2.log_lower, 4f64.ln() / 5.0), || {
        format!("S_2 lower {}", s2.log_lower)
    })?;
    check(
        s2.upper_strict && rel(s2.log_upper().unwrap(), 121f64.ln()),
        || format!("S_2 upper {:?}", s2.log_upper()),
    )?;
    let s3 = least_dilatation_bounds(SurfaceSig::closed(3), Some(8)).map_err(|e| e.to_string())?;
    check(rel(s3.log_lower, 9f64.ln() / 5.0), || {
        format!("S_3 lower {}", s3.log_lower)
    })?;
    check(
        s3.upper_strict && rel(s3.log_upper().unwrap(), (8.0 * 1331.0f64).ln()),
        || format!("S_3 upper {:?}", s3.log_upper()),
    )?;

    // (i, g, n, class, lower bound on the dilatation itself)
    let table: [(u64, usize, usize, PowerClass, f64); 20] = [
        (2, 0, 4, PowerClass::SquareS04S12, 2f64.powf(0.2)),
        (3, 0, 4, PowerClass::SquareS04S12, 3f64.powf(0.2)),
        (11, 0, 4, PowerClass::SquareS04S12, 11f64.powf(0.2)),
        (2, 1, 2, PowerClass::SquareS04S12, 2f64.powf(0.2)),
        (6, 1, 2, PowerClass::SquareS04S12, 6f64.powf(0.2)),
        (20, 1, 2, PowerClass::SquareS04S12, 20f64.powf(0.2)),
        (3, 1, 1, PowerClass::Power234S11, 2f64.powf(0.2)),
        (5, 1, 1, PowerClass::Power234S11, 3f64.powf(0.2)),
        (9, 1, 1, PowerClass::Power234S11, 5f64.powf(0.2)),
        (14, 1, 1, PowerClass::Power234S11, 7.5f64.powf(0.2)),
        (31, 1, 1, PowerClass::Power234S11, 16f64.powf(0.2)),
        (3, 2, 0, PowerClass::Primitive, 4f64.powf(0.2)),
        (4, 2, 0, PowerClass::Primitive, 5f64.powf(0.2)),
        (7, 3, 0, PowerClass::Primitive, 8f64.powf(0.2)),
        (12, 3, 0, PowerClass::Other, 13f64.powf(0.2)),
        (2, 0, 4, PowerClass::Primitive, 3f64.powf(0.2)),
        (3, 0, 5, PowerClass::Other, 4f64.powf(0.2)),
        (9, 2, 3, PowerClass::Primitive, 10f64.powf(0.2)),
        (30, 4, 2, PowerClass::Other, 31f64.powf(0.2)),
        (45, 6, 0, PowerClass::Primitive, 46f64.powf(0.2)),
    ];
    for (i, g, n, class, lambda) in table {
        let b = dilatation_bounds(i, SurfaceSig::new(g, n), class).map_err(|e| e.to_string())?;
        check(rel(b.log_lower, lambda.ln()), || {
            format!("i={i} S_{{{g},{n}}} {class}: lower {}", b.log_lower)
        })?;
        let upper = (0..i).fold(1.0f64, |p, _| p * 9.0).ln();
        check(rel(b.log_upper().unwrap(), upper), || {
            format!("i={i} S_{{{g},{n}}}: upper {:?}", b.log_upper())
        })?;
    }
    Ok("least bounds for S_2 and S_3 (k=8); 20 tuples".into())
}

fn main() -> ExitCode {
    let criteria: [Named; 10] = [
        ("pass matrices", criterion_1, 1000),
        ("genus-two reproduction", criterion_2, 1000),
        ("fixed family chain", criterion_3, 5000),
        ("cross-module agreement", criterion_4, 5000),
        ("winding family chain", criterion_5, 10000),
        ("enclosure sandwich", criterion_6, 1000),
        ("euler index conservation", criterion_7, 1000),
        ("monogon detection", criterion_8, 1000),
        ("primitivity oracle", criterion_9, 10000),
        ("bound evaluators", criterion_10, 1000),
    ];
    let mut failed = 0;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        let outcome = match outcome {
            Ok(_) if ms > *budget => Err(format!("took {ms} ms, budget {budget} ms")),
            other => other,
        };
        match outcome {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail} [{ms} ms]", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail} [{ms} ms]", k + 1);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
