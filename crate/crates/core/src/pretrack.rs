//! The pretrack induced by a based filling curve.
//!
//! Each crossing is replaced by three switches and the three short branches
//! `a`, `b`, `c`; the basepoint is replaced by the eye, four switches carrying
//! the branches `d`, `l`, `r` and two back arcs around the marked point.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::curve::{
    quadrant_role_at, surface_and_filling, CurveDiagram, Handedness, Passage, QuadrantRole,
};
use crate::incidence::ReducedWeightVector;
use crate::render::serialize_rational;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PretrackError {
    #[error("curve does not fill its surface")]
    NotFilling,
    #[error("surface {0} violates 3g + n > 3")]
    HypothesisViolated(String),
    #[error("weights are not in the reduced weight cone: {0}")]
    NotInReducedCone(String),
    #[error("switch equations are degenerate: {0}")]
    InconsistentTrack(String),
    #[error("route is not a carried cycle: {0}")]
    NotCarried(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BranchKind {
    EyeD,
    EyeL,
    EyeR,
    CrossA(usize),
    CrossB(usize),
    CrossC(usize),
    PlainArc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub id: usize,
    pub kind: BranchKind,
    pub label: String,
    /// Start and finish, as (switch, side).
    pub ends: [(usize, Side); 2],
}

/// One branch end as seen from a switch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Slot {
    pub branch: usize,
    /// 0 at the start of the branch, 1 at its finish.
    pub end: u8,
    pub side: Side,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Switch {
    pub id: usize,
    pub label: String,
    /// Branch ends in counterclockwise order.
    pub rotation: Vec<Slot>,
}

impl Switch {
    pub fn side(&self, side: Side) -> impl Iterator<Item = &Slot> {
        self.rotation.iter().filter(move |s| s.side == side)
    }
}

/// A corner of a complementary region: the gap at `switch` between
/// rotation positions `position` and `position + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct RegionCorner {
    pub switch: usize,
    pub position: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Region {
    pub corners: Vec<RegionCorner>,
    pub cusps: usize,
    pub punctures: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub euler_index: BigRational,
}

impl Region {
    fn new(corners: Vec<RegionCorner>, cusps: usize, punctures: usize) -> Self {
        let chi = BigRational::from_integer(BigInt::from(1 - punctures as i64));
        let euler_index = chi - BigRational::new(BigInt::from(cusps), BigInt::from(2));
        Region {
            corners,
            cusps,
            punctures,
            euler_index,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrackClass {
    TrainTrack,
    BigonTrack,
    PretrackOnly,
}

impl TrackClass {
    /// Whether the dilatation is an eigenvalue of the incidence matrix.
    pub fn is_certifying(self) -> bool {
        matches!(self, TrackClass::TrainTrack | TrackClass::BigonTrack)
    }
}

impl fmt::Display for TrackClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TrackClass::TrainTrack => "train_track",
            TrackClass::BigonTrack => "bigon_track",
            TrackClass::PretrackOnly => "pretrack_only",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RegionCensus {
    pub nullgons: usize,
    pub monogons: usize,
    pub bigons: usize,
    pub trigons: usize,
    pub higher: usize,
    pub punctured_nullgons: usize,
    pub punctured_monogons: usize,
    /// Punctured regions with at least two cusps.
    pub punctured_higher: usize,
    pub track_class: TrackClass,
    #[serde(serialize_with = "serialize_rational")]
    pub euler_sum: BigRational,
}

#[derive(Debug, Clone)]
pub struct Pretrack {
    branches: Vec<Branch>,
    switches: Vec<Switch>,
    regions: Vec<Region>,
    track_class: TrackClass,
    /// Branch ids of `d, l, r, a_1, b_1, c_1, ...`.
    distinguished: Vec<usize>,
    genus: usize,
    punctures: usize,
    crossings: usize,
}

impl Pretrack {
    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn switches(&self) -> &[Switch] {
        &self.switches
    }

    pub fn regions(&self) -> &[Region] {
        &self.regions
    }

    pub fn track_class(&self) -> TrackClass {
        self.track_class
    }

    pub fn distinguished(&self) -> &[usize] {
        &self.distinguished
    }

    pub fn crossings(&self) -> usize {
        self.crossings
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Punctures of the underlying surface, not counting the marked point.
    pub fn punctures(&self) -> usize {
        self.punctures
    }

    /// `2 - 2g - (n + 1)`: the Euler characteristic once the marked point is removed.
    pub fn expected_euler_sum(&self) -> BigRational {
        let chi = 2 - 2 * self.genus as i64 - (self.punctures as i64 + 1);
        BigRational::from_integer(chi.into())
    }

    pub fn branch_by_kind(&self, kind: BranchKind) -> Option<&Branch> {
        self.branches.iter().find(|b| b.kind == kind)
    }

    fn other_end(&self, slot: Slot) -> Slot {
        let other = 1 - slot.end;
        Slot {
            branch: slot.branch,
            end: other,
            side: self.branches[slot.branch].ends[other as usize].1,
        }
    }
}

/// Half-edges of the curve attached to a crossing's three switches.
struct CrossingEdges {
    out1: usize,
    in1: usize,
    out2: usize,
    in2: usize,
}

struct Builder {
    branches: Vec<Branch>,
    rotations: Vec<Vec<Slot>>,
}

impl Builder {
    fn branch(
        &mut self,
        kind: BranchKind,
        label: String,
        from: (usize, Side),
        to: (usize, Side),
    ) -> usize {
        let id = self.branches.len();
        self.branches.push(Branch {
            id,
            kind,
            label,
            ends: [from, to],
        });
        id
    }

    fn slot(&self, branch: usize, end: u8) -> Slot {
        Slot {
            branch,
            end,
            side: self.branches[branch].ends[end as usize].1,
        }
    }
}

const S1: usize = 0;
const S2: usize = 1;
const S3: usize = 2;

fn crossing_switch(q: usize, which: usize) -> usize {
    3 * (q - 1) + which
}

/// Build the induced pretrack of a filling curve.
pub fn build_pretrack(diagram: &CurveDiagram) -> Result<Pretrack, PretrackError> {
    let report = surface_and_filling(diagram);
    if !report.filling {
        return Err(PretrackError::NotFilling);
    }
    if !report.kra_hypothesis {
        return Err(PretrackError::HypothesisViolated(
            report.surface.to_string(),
        ));
    }
    let n = diagram.self_intersections();
    let code = diagram.code();
    let len = code.len();
    let (x, u, l, y) = (3 * n, 3 * n + 1, 3 * n + 2, 3 * n + 3);
    let mut bld = Builder {
        branches: Vec::new(),
        rotations: vec![Vec::new(); 3 * n + 4],
    };

    // token j leaves from S1 on a first passage and from S3 on a second;
    // it arrives at S3 on a first passage and at S2 on a second
    let out_switch = |j: usize| {
        let t = code.tokens()[j];
        match t.passage {
            Passage::First => crossing_switch(t.crossing, S1),
            Passage::Second => crossing_switch(t.crossing, S3),
        }
    };
    let in_switch = |j: usize| {
        let t = code.tokens()[j];
        match t.passage {
            Passage::First => crossing_switch(t.crossing, S3),
            Passage::Second => crossing_switch(t.crossing, S2),
        }
    };

    let d = bld.branch(BranchKind::EyeD, "d".into(), (u, Side::B), (l, Side::B));
    let lb = bld.branch(BranchKind::EyeL, "l".into(), (u, Side::B), (y, Side::B));
    let rb = bld.branch(BranchKind::EyeR, "r".into(), (l, Side::B), (y, Side::B));
    let mut distinguished = vec![d, lb, rb];
    let mut abc = Vec::with_capacity(n);
    for q in 1..=n {
        let (s1, s2, s3) = (
            crossing_switch(q, S1),
            crossing_switch(q, S2),
            crossing_switch(q, S3),
        );
        let a = bld.branch(
            BranchKind::CrossA(q),
            format!("a{q}"),
            (s2, Side::B),
            (s3, Side::B),
        );
        let b = bld.branch(
            BranchKind::CrossB(q),
            format!("b{q}"),
            (s1, Side::B),
            (s3, Side::B),
        );
        let c = bld.branch(
            BranchKind::CrossC(q),
            format!("c{q}"),
            (s1, Side::B),
            (s2, Side::B),
        );
        distinguished.extend([a, b, c]);
        abc.push((a, b, c));
    }
    // curve edges; edge j runs from token j to token j + 1, and the last one
    // is cut by the eye into a tail and a head
    let mut edges = Vec::with_capacity(len + 1);
    for j in 0..len - 1 {
        edges.push(bld.branch(
            BranchKind::PlainArc,
            format!("e{j}"),
            (out_switch(j), Side::A),
            (
                in_switch(j + 1),
                if code.tokens()[j + 1].passage == Passage::First {
                    Side::B
                } else {
                    Side::A
                },
            ),
        ));
    }
    let tail = bld.branch(
        BranchKind::PlainArc,
        "tail".into(),
        (out_switch(len - 1), Side::A),
        (x, Side::A),
    );
    let head = bld.branch(
        BranchKind::PlainArc,
        "head".into(),
        (y, Side::A),
        (in_switch(0), Side::B),
    );
    let upper = bld.branch(
        BranchKind::PlainArc,
        "upper_back".into(),
        (x, Side::B),
        (u, Side::A),
    );
    let lower = bld.branch(
        BranchKind::PlainArc,
        "lower_back".into(),
        (x, Side::B),
        (l, Side::A),
    );
    let leaving = |j: usize| if j == len - 1 { tail } else { edges[j] };
    let arriving = |j: usize| if j == 0 { head } else { edges[j - 1] };

    for q in 1..=n {
        let t1 = code.position(q, Passage::First);
        let t2 = code.position(q, Passage::Second);
        let e = CrossingEdges {
            out1: leaving(t1),
            in1: arriving(t1),
            out2: leaving(t2),
            in2: arriving(t2),
        };
        let (a, b, c) = abc[q - 1];
        let mut s1 = vec![bld.slot(e.out1, 0), bld.slot(b, 0), bld.slot(c, 0)];
        let mut s2 = vec![bld.slot(e.in2, 1), bld.slot(c, 1), bld.slot(a, 0)];
        let mut s3 = vec![
            bld.slot(e.out2, 0),
            bld.slot(e.in1, 1),
            bld.slot(a, 1),
            bld.slot(b, 1),
        ];
        if diagram.sign(q) == Handedness::Left {
            for rot in [&mut s1, &mut s2, &mut s3] {
                rot[1..].reverse();
            }
        }
        bld.rotations[crossing_switch(q, S1)] = s1;
        bld.rotations[crossing_switch(q, S2)] = s2;
        bld.rotations[crossing_switch(q, S3)] = s3;
    }
    bld.rotations[x] = vec![bld.slot(tail, 1), bld.slot(lower, 0), bld.slot(upper, 0)];
    bld.rotations[u] = vec![bld.slot(lb, 0), bld.slot(upper, 1), bld.slot(d, 0)];
    bld.rotations[l] = vec![bld.slot(rb, 0), bld.slot(d, 1), bld.slot(lower, 1)];
    bld.rotations[y] = vec![bld.slot(head, 0), bld.slot(lb, 1), bld.slot(rb, 1)];

    let mut switches: Vec<Switch> = bld
        .rotations
        .into_iter()
        .enumerate()
        .map(|(id, rotation)| Switch {
            id,
            label: String::new(),
            rotation,
        })
        .collect();
    for q in 1..=n {
        for (k, name) in ["s1", "s2", "s3"].iter().enumerate() {
            switches[crossing_switch(q, k)].label = format!("{name}.c{q}");
        }
    }
    for (id, name) in [(x, "x"), (u, "u"), (l, "l"), (y, "y")] {
        switches[id].label = format!("eye.{name}");
    }

    let mut track = Pretrack {
        branches: bld.branches,
        switches,
        regions: Vec::new(),
        track_class: TrackClass::PretrackOnly,
        distinguished,
        genus: report.surface.genus,
        punctures: report.surface.punctures,
        crossings: n,
    };

    // where each region's punctures come from: the marked point sits between
    // the two back arcs at x, and each punctured face passes its punctures on
    // through the image of one of its quadrants
    let mut marks: Vec<(usize, [Slot; 2], usize)> = vec![(
        x,
        [track.switches[x].rotation[1], track.switches[x].rotation[2]],
        1,
    )];
    for face in diagram.faces().iter().filter(|f| f.punctures > 0) {
        let corner = face.corners[0];
        let q = corner.crossing;
        let t1 = code.position(q, Passage::First);
        let t2 = code.position(q, Passage::Second);
        let (a, b, c) = abc[q - 1];
        let pick = |sw: usize, p: usize, pe: u8, r: usize, re: u8| {
            (
                sw,
                [
                    Slot {
                        branch: p,
                        end: pe,
                        side: Side::A,
                    },
                    Slot {
                        branch: r,
                        end: re,
                        side: Side::A,
                    },
                ],
            )
        };
        let (sw, pair) = match quadrant_role_at(diagram.sign(q), corner.quadrant) {
            QuadrantRole::Outbound => pick(crossing_switch(q, S1), leaving(t1), 0, b, 0),
            QuadrantRole::AfterFirst => pick(crossing_switch(q, S1), c, 0, leaving(t1), 0),
            QuadrantRole::AfterSecond => {
                pick(crossing_switch(q, S3), leaving(t2), 0, arriving(t1), 1)
            }
            QuadrantRole::Inbound => pick(crossing_switch(q, S3), arriving(t1), 1, a, 1),
        };
        marks.push((sw, pair, face.punctures));
    }

    track.regions = trace_regions(&track, &marks);
    track.track_class = classify(&track.regions);
    Ok(track)
}

fn same_end(a: &Slot, b: &Slot) -> bool {
    a.branch == b.branch && a.end == b.end
}

fn trace_regions(track: &Pretrack, marks: &[(usize, [Slot; 2], usize)]) -> Vec<Region> {
    let position = |slot: Slot| -> (usize, usize) {
        let sw = track.branches[slot.branch].ends[slot.end as usize].0;
        let k = track.switches[sw]
            .rotation
            .iter()
            .position(|s| same_end(s, &slot))
            .expect("slot registered at its switch");
        (sw, k)
    };
    let mut seen: BTreeMap<(usize, usize), ()> = BTreeMap::new();
    let mut regions = Vec::new();
    for sw in &track.switches {
        for start in 0..sw.rotation.len() {
            if seen.contains_key(&(sw.id, start)) {
                continue;
            }
            let mut corners = Vec::new();
            let mut cusps = 0;
            let mut punctures = 0;
            // leave along the slot after the corner, arrive at the far end,
            // turn counterclockwise
            let (mut s, mut k) = (sw.id, start);
            while seen.insert((s, k), ()).is_none() {
                let rot = &track.switches[s].rotation;
                let here = rot[k];
                let next = rot[(k + 1) % rot.len()];
                corners.push(RegionCorner {
                    switch: s,
                    position: k,
                });
                if here.side == next.side {
                    cusps += 1;
                }
                for (msw, pair, count) in marks {
                    if *msw == s
                        && ((same_end(&pair[0], &here) && same_end(&pair[1], &next))
                            || (same_end(&pair[1], &here) && same_end(&pair[0], &next)))
                    {
                        punctures += count;
                    }
                }
                let far = track.other_end(next);
                (s, k) = position(far);
            }
            corners.sort();
            regions.push(Region::new(corners, cusps, punctures));
        }
    }
    regions.sort_by(|a, b| a.corners[0].cmp(&b.corners[0]));
    regions
}

fn classify(regions: &[Region]) -> TrackClass {
    let mut class = TrackClass::TrainTrack;
    for r in regions {
        if r.euler_index.is_negative() {
            continue;
        }
        if r.punctures == 0 && r.cusps == 2 {
            class = TrackClass::BigonTrack;
        } else {
            return TrackClass::PretrackOnly;
        }
    }
    class
}

/// Count regions by cusps and punctures.
pub fn classify_regions(track: &Pretrack) -> RegionCensus {
    let mut census = RegionCensus {
        nullgons: 0,
        monogons: 0,
        bigons: 0,
        trigons: 0,
        higher: 0,
        punctured_nullgons: 0,
        punctured_monogons: 0,
        punctured_higher: 0,
        track_class: track.track_class,
        euler_sum: BigRational::zero(),
    };
    for r in &track.regions {
        census.euler_sum += &r.euler_index;
        let slot = match (r.punctures > 0, r.cusps) {
            (false, 0) => &mut census.nullgons,
            (false, 1) => &mut census.monogons,
            (false, 2) => &mut census.bigons,
            (false, 3) => &mut census.trigons,
            (false, _) => &mut census.higher,
            (true, 0) => &mut census.punctured_nullgons,
            (true, 1) => &mut census.punctured_monogons,
            (true, _) => &mut census.punctured_higher,
        };
        *slot += 1;
    }
    census
}

/// Weights on every branch, indexed by branch id.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FullWeights(Vec<BigRational>);

impl FullWeights {
    pub fn get(&self, branch: usize) -> &BigRational {
        &self.0[branch]
    }

    pub fn values(&self) -> &[BigRational] {
        &self.0
    }

    /// Side sums `(A, B)` at a switch.
    pub fn side_sums(&self, sw: &Switch) -> (BigRational, BigRational) {
        let sum = |side| sw.side(side).map(|s| &self.0[s.branch]).sum();
        (sum(Side::A), sum(Side::B))
    }

    pub fn satisfies_switches(&self, track: &Pretrack) -> bool {
        track.switches().iter().all(|sw| {
            let (a, b) = self.side_sums(sw);
            a == b
        })
    }
}

/// Solve the switch equations with the distinguished branches pinned to `w`.
pub fn reduced_to_full(
    track: &Pretrack,
    w: &ReducedWeightVector,
) -> Result<FullWeights, PretrackError> {
    let nb = track.branches.len();
    if w.entries().len() != track.distinguished.len() {
        return Err(PretrackError::NotInReducedCone(format!(
            "expected {} reduced weights, got {}",
            track.distinguished.len(),
            w.entries().len()
        )));
    }
    // augmented rows: one per switch, one per pinned branch
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for sw in &track.switches {
        let mut row = vec![BigRational::zero(); nb + 1];
        for s in &sw.rotation {
            let sign = if s.side == Side::A { 1 } else { -1 };
            row[s.branch] += BigRational::from_integer(sign.into());
        }
        rows.push(row);
    }
    for (&b, v) in track.distinguished.iter().zip(w.entries()) {
        let mut row = vec![BigRational::zero(); nb + 1];
        row[b] = BigRational::one();
        row[nb] = v.clone();
        rows.push(row);
    }

    let mut pivot_row = 0;
    let mut pivots = Vec::with_capacity(nb);
    for col in 0..nb {
        let Some(p) = (pivot_row..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(pivot_row, p);
        let inv = rows[pivot_row][col].recip();
        for x in rows[pivot_row].iter_mut() {
            *x *= &inv;
        }
        let pr = rows[pivot_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != pivot_row && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivots.len() < nb {
        return Err(PretrackError::InconsistentTrack(format!(
            "rank {} for {} branches",
            pivots.len(),
            nb
        )));
    }
    if rows[pivot_row..].iter().any(|r| !r[nb].is_zero()) {
        return Err(PretrackError::NotInReducedCone(
            "switch equations have no solution extending these weights".into(),
        ));
    }
    let mut out = vec![BigRational::zero(); nb];
    for (r, &col) in pivots.iter().enumerate() {
        out[col] = rows[r][nb].clone();
    }
    if let Some(b) = out.iter().position(Signed::is_negative) {
        return Err(PretrackError::NotInReducedCone(format!(
            "branch {} would carry weight {}",
            track.branches[b].label, out[b]
        )));
    }
    Ok(FullWeights(out))
}

/// Project full weights onto the distinguished branches.
pub fn restrict(track: &Pretrack, full: &FullWeights) -> ReducedWeightVector {
    ReducedWeightVector::new(
        track
            .distinguished
            .iter()
            .map(|&b| full.0[b].clone())
            .collect(),
    )
    .expect("distinguished weights of a valid weight function")
}

/// A branch traversed in a direction: `forward` runs from end 0 to end 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub branch: usize,
    pub forward: bool,
}

/// Check that a cyclic sequence of steps is a smooth closed path in the
/// track: consecutive steps meet at a switch, entering and leaving on
/// opposite sides.
pub fn validate_cycle(track: &Pretrack, route: &[Step]) -> Result<(), PretrackError> {
    if route.is_empty() {
        return Err(PretrackError::NotCarried("empty route".into()));
    }
    for (k, step) in route.iter().enumerate() {
        let next = route[(k + 1) % route.len()];
        let arrive = track.branches[step.branch].ends[usize::from(step.forward)];
        let depart = track.branches[next.branch].ends[usize::from(!next.forward)];
        if arrive.0 != depart.0 {
            return Err(PretrackError::NotCarried(format!(
                "{} and {} do not meet",
                track.branches[step.branch].label, track.branches[next.branch].label
            )));
        }
        if arrive.1 == depart.1 {
            return Err(PretrackError::NotCarried(format!(
                "{} to {} turns back at a cusp",
                track.branches[step.branch].label, track.branches[next.branch].label
            )));
        }
    }
    Ok(())
}

/// The essential curve built from the loop at the last-reached crossing and
/// a band along the rest of the curve around the marked point.
pub fn carried_curve_route(diagram: &CurveDiagram, track: &Pretrack) -> Vec<Step> {
    let code = diagram.code();
    let len = code.len();
    let n = diagram.self_intersections();
    let find = |kind: BranchKind| track.branch_by_kind(kind).expect("branch present").id;
    let label = |name: &str| {
        track
            .branches
            .iter()
            .find(|b| b.label == name)
            .expect("named branch present")
            .id
    };
    let leaving = |j: usize| {
        if j == len - 1 {
            label("tail")
        } else {
            label(&format!("e{j}"))
        }
    };
    let fwd = |branch| Step {
        branch,
        forward: true,
    };
    let back = |branch| Step {
        branch,
        forward: false,
    };

    let t1 = code.position(n, Passage::First);
    let t2 = code.position(n, Passage::Second);
    let mut route = Vec::new();
    // the loop: only second passages occur strictly between t1 and t2
    for j in t1..t2 {
        route.push(fwd(leaving(j)));
        let next = code.tokens()[j + 1];
        route.push(fwd(find(BranchKind::CrossA(next.crossing))));
    }
    // out along the rest of the curve, around the marked point, and back
    let mut outward = Vec::new();
    for j in t2..len {
        outward.push(fwd(leaving(j)));
        if j + 1 < len {
            outward.push(fwd(find(BranchKind::CrossA(code.tokens()[j + 1].crossing))));
        }
    }
    route.extend(outward.iter().copied());
    route.extend([
        fwd(label("upper_back")),
        fwd(find(BranchKind::EyeD)),
        back(label("lower_back")),
    ]);
    route.extend(outward.iter().rev().map(|s| back(s.branch)));
    route.push(back(find(BranchKind::CrossB(n))));
    route
}

/// Reduced weights of the carried essential curve.
pub fn carried_curve_weights(diagram: &CurveDiagram) -> Result<ReducedWeightVector, PretrackError> {
    let track = build_pretrack(diagram)?;
    let route = carried_curve_route(diagram, &track);
    validate_cycle(&track, &route)?;
    let mut counts = vec![0u64; track.branches.len()];
    for s in &route {
        counts[s.branch] += 1;
    }
    let reduced: Vec<u64> = track.distinguished.iter().map(|&b| counts[b]).collect();
    Ok(ReducedWeightVector::from_integers(&reduced).expect("nonnegative counts"))
}
