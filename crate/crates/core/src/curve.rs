//! Based generic closed curves given as signed Gauss codes.
//!
//! A curve with `n` transverse double points is a 4-valent graph with `n`
//! vertices and `2n` edges. The handedness recorded for each crossing fixes
//! the cyclic order of the four half-edge ends around it, which is all the
//! data needed to trace the complementary faces and recover the ambient
//! surface.
//!
//! Quadrants at a crossing are numbered counterclockwise starting from the
//! outbound quadrant (the one bounded by the two outgoing directions), so the
//! inbound quadrant is always quadrant 2.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("malformed Gauss code: {0}")]
    MalformedCode(String),
    #[error("puncture assigned to unknown face `{0}`")]
    UnknownFaceLabel(String),
    #[error("inconsistent surface: {0}")]
    BadSurface(String),
    #[error("unknown crossing {0}")]
    UnknownCrossing(usize),
    #[error("invalid curve document: {0}")]
    Json(#[from] serde_json::Error),
}

/// Side of the direction of travel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Handedness {
    Right,
    Left,
}

impl Handedness {
    pub fn opposite(self) -> Self {
        match self {
            Handedness::Right => Handedness::Left,
            Handedness::Left => Handedness::Right,
        }
    }
}

impl fmt::Display for Handedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Handedness::Right => f.write_str("right"),
            Handedness::Left => f.write_str("left"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Passage {
    First,
    Second,
}

impl Passage {
    pub fn from_index(p: u8) -> Option<Self> {
        match p {
            1 => Some(Passage::First),
            2 => Some(Passage::Second),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Passage::First => 1,
            Passage::Second => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Token {
    pub crossing: usize,
    pub passage: Passage,
}

impl Token {
    pub fn new(crossing: usize, passage: Passage) -> Self {
        Token { crossing, passage }
    }
}

/// A half-edge end at a crossing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum End {
    In(Passage),
    Out(Passage),
}

/// Counterclockwise order of the four ends at a crossing, starting with the
/// end that opens the outbound quadrant.
pub fn ends_ccw(first_passage_inbound: Handedness) -> [End; 4] {
    use End::{In, Out};
    use Passage::{First, Second};
    match first_passage_inbound {
        // second strand crosses from right to left of the first
        Handedness::Right => [Out(First), Out(Second), In(First), In(Second)],
        Handedness::Left => [Out(Second), Out(First), In(Second), In(First)],
    }
}

/// The role a quadrant plays, independent of chirality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QuadrantRole {
    Outbound,
    Inbound,
    /// bounded by the second outgoing end and the first incoming end
    AfterSecond,
    /// bounded by the second incoming end and the first outgoing end
    AfterFirst,
}

/// Role of quadrant `quadrant` at a crossing with the given sign.
pub fn quadrant_role_at(sign: Handedness, quadrant: u8) -> QuadrantRole {
    let ends = ends_ccw(sign);
    let q = (quadrant % 4) as usize;
    let pair = [ends[q], ends[(q + 1) % 4]];
    let has = |e: End| pair.contains(&e);
    use End::{In, Out};
    use Passage::{First, Second};
    if has(Out(First)) && has(Out(Second)) {
        QuadrantRole::Outbound
    } else if has(In(First)) && has(In(Second)) {
        QuadrantRole::Inbound
    } else if has(Out(Second)) && has(In(First)) {
        QuadrantRole::AfterSecond
    } else {
        QuadrantRole::AfterFirst
    }
}

/// Validated passage word, linearized at the basepoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaussCode {
    word: Vec<Token>,
    positions: Vec<[usize; 2]>,
}

impl GaussCode {
    pub fn new(word: Vec<Token>) -> Result<Self, CurveError> {
        if word.is_empty() {
            return Err(CurveError::MalformedCode("empty word".into()));
        }
        if !word.len().is_multiple_of(2) {
            return Err(CurveError::MalformedCode(format!(
                "word has odd length {}",
                word.len()
            )));
        }
        let n = word.len() / 2;
        let mut positions: Vec<[Option<usize>; 2]> = vec![[None, None]; n + 1];
        let mut next_new = 1;
        for (pos, tok) in word.iter().enumerate() {
            if tok.crossing == 0 || tok.crossing > n {
                return Err(CurveError::MalformedCode(format!(
                    "crossing id {} outside 1..={}",
                    tok.crossing, n
                )));
            }
            let slot = &mut positions[tok.crossing];
            match tok.passage {
                Passage::First => {
                    if slot[0].is_some() {
                        return Err(CurveError::MalformedCode(format!(
                            "crossing {} has two first passages",
                            tok.crossing
                        )));
                    }
                    if tok.crossing != next_new {
                        return Err(CurveError::MalformedCode(format!(
                            "crossing {} is reached before crossing {}; ids must follow first-passage order",
                            tok.crossing, next_new
                        )));
                    }
                    next_new += 1;
                    slot[0] = Some(pos);
                }
                Passage::Second => {
                    if slot[1].is_some() {
                        return Err(CurveError::MalformedCode(format!(
                            "crossing {} has two second passages",
                            tok.crossing
                        )));
                    }
                    if slot[0].is_none() {
                        return Err(CurveError::MalformedCode(format!(
                            "second passage of crossing {} precedes its first passage",
                            tok.crossing
                        )));
                    }
                    slot[1] = Some(pos);
                }
            }
        }
        let positions = positions
            .into_iter()
            .enumerate()
            .skip(1)
            .map(|(id, p)| match p {
                [Some(a), Some(b)] => Ok([a, b]),
                _ => Err(CurveError::MalformedCode(format!(
                    "crossing {id} does not appear exactly twice"
                ))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(GaussCode { word, positions })
    }

    /// Number of crossings `n`.
    pub fn crossing_count(&self) -> usize {
        self.positions.len()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// Position of the given passage in the based word.
    pub fn position(&self, crossing: usize, passage: Passage) -> usize {
        let p = self.positions[crossing - 1];
        match passage {
            Passage::First => p[0],
            Passage::Second => p[1],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SurfaceSig {
    pub genus: usize,
    /// Punctures of the ambient surface; the marked point is not included.
    pub punctures: usize,
}

impl SurfaceSig {
    pub fn new(genus: usize, punctures: usize) -> Self {
        SurfaceSig { genus, punctures }
    }

    pub fn closed(genus: usize) -> Self {
        SurfaceSig::new(genus, 0)
    }

    pub fn euler_characteristic(&self) -> i64 {
        2 - 2 * self.genus as i64 - self.punctures as i64
    }

    /// `3g + n > 3`, the range where pushing along a filling curve is pseudo-Anosov.
    pub fn satisfies_kra(&self) -> bool {
        3 * self.genus + self.punctures > 3
    }
}

impl fmt::Display for SurfaceSig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S_{{{},{}}}", self.genus, self.punctures)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub crossing: usize,
    pub quadrant: u8,
}

impl fmt::Display for Corner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}.q{}", self.crossing, self.quadrant)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Face {
    pub label: String,
    /// Corners in boundary order, starting from the least corner.
    pub corners: Vec<Corner>,
    pub punctures: usize,
}

impl Face {
    pub fn inbound_corners(&self, diagram: &CurveDiagram) -> usize {
        self.corners
            .iter()
            .filter(|c| {
                quadrant_role_at(diagram.sign(c.crossing), c.quadrant) == QuadrantRole::Inbound
            })
            .count()
    }
}

fn face_label(least: Corner) -> String {
    format!("f:{least}")
}

/// Trace the boundary cycles of the ribbon graph defined by a word and the
/// crossing signs. Returns corner cycles, each rotated to start at its least
/// corner, sorted by that corner.
pub(crate) fn trace_corner_cycles(code: &GaussCode, signs: &[Handedness]) -> Vec<Vec<Corner>> {
    let n = code.crossing_count();
    let len = code.len();
    // End slots are indexed 4*(crossing-1) + position in the ccw rotation.
    let slot_of = |crossing: usize, end: End| -> usize {
        let rot = ends_ccw(signs[crossing - 1]);
        let k = rot.iter().position(|&e| e == end).expect("end present");
        4 * (crossing - 1) + k
    };
    let mut partner = vec![usize::MAX; 4 * n];
    for j in 0..len {
        let a = code.tokens()[j];
        let b = code.tokens()[(j + 1) % len];
        let out = slot_of(a.crossing, End::Out(a.passage));
        let inn = slot_of(b.crossing, End::In(b.passage));
        partner[out] = inn;
        partner[inn] = out;
    }
    let rot_next = |slot: usize| 4 * (slot / 4) + (slot % 4 + 1) % 4;

    let mut seen = vec![false; 4 * n];
    let mut cycles = Vec::new();
    for start in 0..4 * n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            let arrive = partner[x];
            cycle.push(Corner {
                crossing: arrive / 4 + 1,
                quadrant: (arrive % 4) as u8,
            });
            x = rot_next(arrive);
        }
        let (min_at, _) = cycle
            .iter()
            .enumerate()
            .min_by_key(|(_, c)| **c)
            .expect("nonempty cycle");
        cycle.rotate_left(min_at);
        cycles.push(cycle);
    }
    cycles.sort_by_key(|c| c[0]);
    cycles
}

/// A validated curve diagram together with its ribbon-graph data.
#[derive(Debug, Clone)]
pub struct CurveDiagram {
    name: String,
    code: GaussCode,
    signs: Vec<Handedness>,
    faces: Vec<Face>,
    surface: SurfaceSig,
}

impl CurveDiagram {
    /// Build a diagram from a word, the first-passage handedness of each
    /// crossing (indexed by id - 1) and a puncture assignment keyed by face label.
    pub fn new(
        name: impl Into<String>,
        code: GaussCode,
        signs: Vec<Handedness>,
        punctures: &BTreeMap<String, usize>,
    ) -> Result<Self, CurveError> {
        let n = code.crossing_count();
        if signs.len() != n {
            return Err(CurveError::MalformedCode(format!(
                "{} crossing signs for {} crossings",
                signs.len(),
                n
            )));
        }
        let cycles = trace_corner_cycles(&code, &signs);
        let mut faces: Vec<Face> = cycles
            .into_iter()
            .map(|corners| Face {
                label: face_label(corners[0]),
                corners,
                punctures: 0,
            })
            .collect();
        for (label, &count) in punctures {
            let face = faces
                .iter_mut()
                .find(|f| &f.label == label)
                .ok_or_else(|| CurveError::UnknownFaceLabel(label.clone()))?;
            face.punctures += count;
        }
        let chi = faces.len() as i64 - n as i64;
        if chi > 2 || (2 - chi) % 2 != 0 {
            return Err(CurveError::BadSurface(format!(
                "Euler characteristic {chi} of the traced ribbon graph is not that of a closed orientable surface"
            )));
        }
        let surface = SurfaceSig {
            genus: ((2 - chi) / 2) as usize,
            punctures: faces.iter().map(|f| f.punctures).sum(),
        };
        Ok(CurveDiagram {
            name: name.into(),
            code,
            signs,
            faces,
            surface,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn code(&self) -> &GaussCode {
        &self.code
    }

    /// Self-intersection count of the diagram as drawn.
    pub fn self_intersections(&self) -> usize {
        self.code.crossing_count()
    }

    pub fn crossings(&self) -> Vec<Crossing> {
        self.signs
            .iter()
            .enumerate()
            .map(|(k, &s)| Crossing {
                id: k + 1,
                first_passage_inbound: s,
            })
            .collect()
    }

    /// First-passage handedness of a crossing.
    pub fn sign(&self, crossing: usize) -> Handedness {
        self.signs[crossing - 1]
    }

    pub fn signs(&self) -> &[Handedness] {
        &self.signs
    }

    pub fn rotation(&self, crossing: usize) -> [End; 4] {
        ends_ccw(self.sign(crossing))
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn surface(&self) -> SurfaceSig {
        self.surface
    }

    pub fn puncture_assignment(&self) -> BTreeMap<String, usize> {
        self.faces
            .iter()
            .filter(|f| f.punctures > 0)
            .map(|f| (f.label.clone(), f.punctures))
            .collect()
    }

    /// The same curve with every crossing sign reversed.
    pub fn mirrored(&self) -> CurveDiagram {
        let signs: Vec<_> = self.signs.iter().map(|s| s.opposite()).collect();
        CurveDiagram::new(
            format!("{}-mirror", self.name),
            self.code.clone(),
            signs,
            &BTreeMap::new(),
        )
        .expect("mirror of a valid diagram is valid")
    }

    pub fn to_file(&self) -> CurveFile {
        CurveFile {
            name: self.name.clone(),
            crossings: self.crossings(),
            word: self
                .code
                .tokens()
                .iter()
                .map(|t| WordEntry::Plain(t.crossing, t.passage.index()))
                .collect(),
            punctures: self.puncture_assignment(),
            surface: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Crossing {
    pub id: usize,
    pub first_passage_inbound: Handedness,
}

/// One word token as written in a curve file: `[id, passage]`, optionally
/// followed by the handedness of that passage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum WordEntry {
    Plain(usize, u8),
    WithHandedness(usize, u8, Handedness),
}

/// On-disk JSON form of a curve.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveFile {
    pub name: String,
    pub crossings: Vec<Crossing>,
    pub word: Vec<WordEntry>,
    #[serde(default)]
    pub punctures: BTreeMap<String, usize>,
    /// Optional declared surface, checked against the derived one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<SurfaceSig>,
}

impl CurveFile {
    pub fn into_diagram(self) -> Result<CurveDiagram, CurveError> {
        let mut tokens = Vec::with_capacity(self.word.len());
        let mut overrides = Vec::new();
        for entry in &self.word {
            let (id, p, h) = match *entry {
                WordEntry::Plain(id, p) => (id, p, None),
                WordEntry::WithHandedness(id, p, h) => (id, p, Some(h)),
            };
            let passage = Passage::from_index(p).ok_or_else(|| {
                CurveError::MalformedCode(format!("passage must be 1 or 2, got {p}"))
            })?;
            tokens.push(Token::new(id, passage));
            if let Some(h) = h {
                overrides.push((id, passage, h));
            }
        }
        let code = GaussCode::new(tokens)?;
        let n = code.crossing_count();

        let mut signs: Vec<Option<Handedness>> = vec![None; n];
        for c in &self.crossings {
            if c.id == 0 || c.id > n {
                return Err(CurveError::MalformedCode(format!(
                    "crossing record {} has no passages in the word",
                    c.id
                )));
            }
            if signs[c.id - 1].replace(c.first_passage_inbound).is_some() {
                return Err(CurveError::MalformedCode(format!(
                    "crossing {} declared twice",
                    c.id
                )));
            }
        }
        let signs = signs
            .into_iter()
            .enumerate()
            .map(|(k, s)| {
                s.ok_or_else(|| {
                    CurveError::MalformedCode(format!("crossing {} has no handedness", k + 1))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        for (id, passage, h) in overrides {
            let expected = match passage {
                Passage::First => signs[id - 1],
                Passage::Second => signs[id - 1].opposite(),
            };
            if h != expected {
                return Err(CurveError::MalformedCode(format!(
                    "passage {} of crossing {id} declared {h}, but transversality forces {expected}",
                    passage.index()
                )));
            }
        }

        let diagram = CurveDiagram::new(self.name, code, signs, &self.punctures)?;
        if let Some(declared) = self.surface {
            if declared != diagram.surface() {
                return Err(CurveError::BadSurface(format!(
                    "declared {declared} but the diagram lives on {}",
                    diagram.surface()
                )));
            }
        }
        Ok(diagram)
    }
}

/// Parse and validate a curve document.
pub fn parse_curve(document: &str) -> Result<CurveDiagram, CurveError> {
    let file: CurveFile = serde_json::from_str(document)?;
    file.into_diagram()
}

/// Re-trace the faces of a diagram.
pub fn trace_faces(diagram: &CurveDiagram) -> Vec<Face> {
    let assignment = diagram.puncture_assignment();
    trace_corner_cycles(&diagram.code, &diagram.signs)
        .into_iter()
        .map(|corners| {
            let label = face_label(corners[0]);
            let punctures = assignment.get(&label).copied().unwrap_or(0);
            Face {
                label,
                corners,
                punctures,
            }
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FillingReport {
    pub surface: SurfaceSig,
    /// Every complementary region is a disk or a once-punctured disk.
    pub filling: bool,
    /// `3g + n > 3`.
    pub kra_hypothesis: bool,
    /// `i >= 2g + n - 2`, strict on closed surfaces.
    pub euler_bound_holds: bool,
}

pub fn surface_and_filling(diagram: &CurveDiagram) -> FillingReport {
    let surface = diagram.surface();
    let filling = diagram.faces().iter().all(|f| f.punctures <= 1);
    let i = diagram.self_intersections() as i64;
    let bound = 2 * surface.genus as i64 + surface.punctures as i64 - 2;
    let euler_bound_holds = if surface.punctures == 0 {
        i > bound
    } else {
        i >= bound
    };
    FillingReport {
        surface,
        filling,
        kra_hypothesis: surface.satisfies_kra(),
        euler_bound_holds,
    }
}

/// Unpunctured monogon and bigon faces of the diagram. A nonempty answer
/// means the drawing is visibly not in minimal position.
pub fn taut_obstruction(diagram: &CurveDiagram) -> Vec<Face> {
    diagram
        .faces()
        .iter()
        .filter(|f| f.punctures == 0 && (1..=2).contains(&f.corners.len()))
        .cloned()
        .collect()
}

/// Side of the inbound quadrant as seen along the given passage.
pub fn handedness_of_passage(
    diagram: &CurveDiagram,
    crossing: usize,
    passage: Passage,
) -> Result<Handedness, CurveError> {
    if crossing == 0 || crossing > diagram.self_intersections() {
        return Err(CurveError::UnknownCrossing(crossing));
    }
    let sign = diagram.sign(crossing);
    Ok(match passage {
        Passage::First => sign,
        Passage::Second => sign.opposite(),
    })
}

/// Labels of all faces, in canonical order.
pub fn face_labels(diagram: &CurveDiagram) -> BTreeSet<String> {
    diagram.faces().iter().map(|f| f.label.clone()).collect()
}
