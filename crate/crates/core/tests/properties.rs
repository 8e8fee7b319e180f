use std::collections::{BTreeMap, BTreeSet};

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use pushtrack::curve::{handedness_of_passage, surface_and_filling, GaussCode, Passage, Token};
use pushtrack::families::{fixed_family_curve, gamma0_diagram};
use pushtrack::incidence::{pass_matrix, ReducedWeightVector};
use pushtrack::pretrack::{carried_curve_weights, reduced_to_full, restrict, PretrackError};
use pushtrack::spectral::{min_row_sum, pf_enclosure, row_sum_bound, CollatzWielandt, PfOptions};
use pushtrack::{build_pretrack, incidence_matrix, CurveDiagram, Handedness, Matrix, TrackClass};

fn hand(b: bool) -> Handedness {
    if b {
        Handedness::Right
    } else {
        Handedness::Left
    }
}

/// Build a diagram from crossing labels in traversal order and the
/// handedness seen at each label's first occurrence.
fn diagram_from_labels(labels: &[usize], first_hand: &BTreeMap<usize, Handedness>) -> CurveDiagram {
    let mut ids: BTreeMap<usize, usize> = BTreeMap::new();
    let mut signs = Vec::new();
    let mut word = Vec::new();
    for &l in labels {
        match ids.get(&l) {
            Some(&id) => word.push(Token::new(id, Passage::Second)),
            None => {
                let id = ids.len() + 1;
                ids.insert(l, id);
                signs.push(first_hand[&l]);
                word.push(Token::new(id, Passage::First));
            }
        }
    }
    let code = GaussCode::new(word).expect("canonical word");
    CurveDiagram::new("random", code, signs, &BTreeMap::new()).expect("orientable ribbon graph")
}

fn random_curve() -> impl Strategy<Value = CurveDiagram> {
    (1usize..=6)
        .prop_flat_map(|n| {
            let labels: Vec<usize> = (1..=n).flat_map(|c| [c, c]).collect();
            (
                Just(labels).prop_shuffle(),
                prop::collection::vec(any::<bool>(), n),
            )
        })
        .prop_map(|(labels, bits)| {
            let mut first_hand = BTreeMap::new();
            for &l in &labels {
                first_hand.entry(l).or_insert(hand(bits[l - 1]));
            }
            diagram_from_labels(&labels, &first_hand)
        })
}

/// The same curve with its basepoint moved forward past `k` crossings.
fn rotate(d: &CurveDiagram, k: usize) -> CurveDiagram {
    let toks = d.code().tokens();
    let k = k % toks.len();
    let mut labels = Vec::new();
    let mut first_hand = BTreeMap::new();
    for t in toks[k..].iter().chain(&toks[..k]) {
        labels.push(t.crossing);
        let h = handedness_of_passage(d, t.crossing, t.passage).expect("known crossing");
        first_hand.entry(t.crossing).or_insert(h);
    }
    diagram_from_labels(&labels, &first_hand)
}

fn random_matrix(max_dim: usize) -> impl Strategy<Value = Vec<Vec<u32>>> {
    (1..=max_dim).prop_flat_map(|d| prop::collection::vec(prop::collection::vec(0u32..4, d), d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cellulation_is_consistent(d in random_curve()) {
        let n = d.self_intersections();
        prop_assert_eq!(d.code().len(), 2 * n);
        let corners: Vec<_> = d.faces().iter().flat_map(|f| f.corners.iter().copied()).collect();
        let distinct: BTreeSet<_> = corners.iter().copied().collect();
        prop_assert_eq!(corners.len(), 4 * n);
        prop_assert_eq!(distinct.len(), 4 * n);
        let chi = n as i64 - 2 * n as i64 + d.faces().len() as i64;
        prop_assert_eq!(chi, 2 - 2 * d.surface().genus as i64);
    }

    #[test]
    fn mirror_keeps_faces_and_genus(d in random_curve()) {
        let m = d.mirrored();
        prop_assert_eq!(m.faces().len(), d.faces().len());
        prop_assert_eq!(m.surface().genus, d.surface().genus);
    }

    #[test]
    fn passages_see_opposite_sides(d in random_curve()) {
        for c in 1..=d.self_intersections() {
            let a = handedness_of_passage(&d, c, Passage::First).unwrap();
            let b = handedness_of_passage(&d, c, Passage::Second).unwrap();
            prop_assert_ne!(a, b);
        }
    }

    #[test]
    fn filling_needs_enough_crossings(d in random_curve()) {
        let f = surface_and_filling(&d);
        if f.filling {
            let (g, n) = (f.surface.genus as i64, f.surface.punctures as i64);
            let i = d.self_intersections() as i64;
            let enough = if n == 0 { i > 2 * g - 2 } else { i >= 2 * g + n - 2 };
            prop_assert!(enough);
        }
    }

    #[test]
    fn incidence_dimension_and_entry_bound(d in random_curve()) {
        let m = incidence_matrix(&d).unwrap();
        let n = d.self_intersections();
        prop_assert_eq!(m.dim(), 3 * (n + 1));
        let cap = BigUint::from(3u32).pow(2 * n as u32);
        prop_assert!(m.matrix.entries().all(|x| x <= &cap));
    }

    #[test]
    fn pass_products_grow_at_most_threefold(
        n in 1usize..=5,
        passes in prop::collection::vec((0usize..5, any::<bool>()), 0..8),
        u in prop::collection::vec(0u32..50, 18),
    ) {
        let dim = 3 * (n + 1);
        let mut d = Matrix::identity(dim);
        for &(i, h) in &passes {
            d = pass_matrix(n, i % n + 1, hand(h)).unwrap().matrix.mul(&d);
        }
        let u: Vec<BigUint> = u[..dim].iter().map(|&x| BigUint::from(x)).collect();
        let c = u.iter().max().cloned().unwrap_or_default();
        let out = d.mul_vec(&u);
        let bound = BigUint::from(3u32).pow(passes.len() as u32) * c;
        prop_assert!(out.iter().all(|x| x <= &bound));
    }

    #[test]
    fn pass_matrix_row_sums(n in 1usize..=8, i in 0usize..8, h in any::<bool>()) {
        let m = pass_matrix(n, i % n + 1, hand(h)).unwrap().matrix;
        let sums = m.row_sums();
        prop_assert!(sums.iter().all(|s| *s >= BigUint::one() && *s <= BigUint::from(3u32)));
    }

    #[test]
    fn expansion_then_restriction_is_identity(w in prop::collection::vec(0u64..6, 12)) {
        let track = build_pretrack(&gamma0_diagram()).unwrap();
        let w = ReducedWeightVector::from_integers(&w).unwrap();
        match reduced_to_full(&track, &w) {
            Ok(full) => {
                prop_assert!(full.satisfies_switches(&track));
                prop_assert_eq!(restrict(&track, &full), w);
            }
            Err(PretrackError::NotInReducedCone(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {}", e),
        }
    }

    #[test]
    fn enclosure_is_seed_independent(seed in prop::collection::vec(1u32..1000, 12)) {
        let m = incidence_matrix(&gamma0_diagram()).unwrap().matrix;
        let a = pf_enclosure(&m, &PfOptions::default()).unwrap();
        let seed: Vec<BigUint> = seed.into_iter().map(BigUint::from).collect();
        let b = pf_enclosure(&m, &PfOptions::default().with_seed(seed)).unwrap();
        prop_assert!(a.lo <= b.hi && b.lo <= a.hi);
    }

    #[test]
    fn enclosure_respects_row_sums_and_is_monotone(rows in random_matrix(6)) {
        let m = Matrix::from_rows(&rows);
        let opts = PfOptions::default();
        if let Ok(e) = pf_enclosure(&m, &opts) {
            let big = |x: BigUint| BigRational::from_integer(BigInt::from(x));
            prop_assert!(e.hi <= big(row_sum_bound(&m)) + &opts.tol);
            prop_assert!(e.lo >= big(min_row_sum(&m)) - &opts.tol);
            let mut it = CollatzWielandt::new(&m, vec![BigUint::one(); m.cols()]).unwrap();
            let mut prev = it.next().unwrap();
            for _ in 1..e.iterations {
                let b = it.next().unwrap();
                prop_assert!(b.lo >= prev.lo && b.hi <= prev.hi);
                prev = b;
            }
        }
    }

    #[test]
    fn basepoint_rotation_keeps_the_dilatation(g in 2usize..=4, k in 0usize..24) {
        let d = fixed_family_curve(g).unwrap();
        let r = rotate(&d, k);
        let class = build_pretrack(&r).unwrap().track_class();
        prop_assume!(class == TrackClass::TrainTrack);
        let opts = PfOptions::default();
        let a = pf_enclosure(&incidence_matrix(&d).unwrap().matrix, &opts).unwrap();
        let b = pf_enclosure(&incidence_matrix(&r).unwrap().matrix, &opts).unwrap();
        prop_assert!(a.lo <= &b.hi + &opts.tol && b.lo <= &a.hi + &opts.tol,
            "[{}, {}] vs [{}, {}]", a.lo_float, a.hi_float, b.lo_float, b.hi_float);
    }

    #[test]
    fn carried_curves_expand(d in random_curve()) {
        prop_assume!(surface_and_filling(&d).filling && d.surface().satisfies_kra());
        let track = build_pretrack(&d).unwrap();
        let w = carried_curve_weights(&d).unwrap();
        prop_assert!(!w.is_zero());
        let full = reduced_to_full(&track, &w).unwrap();
        prop_assert!(full.values().iter().all(|x| *x >= BigRational::zero()));
        prop_assert!(full.satisfies_switches(&track));
    }
}
