//! Disk diagrams encoded by rotation systems, their cut vertices and arcs,
//! and a bounded search for diagrams filling a closed path.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::complex::{invert_word, reading, Dihedral, Edge, Face, Letter, TwoComplex};
use crate::error::{Error, Result};
use crate::morphism::{is_near_immersion, CellMorphism, CellularMap, EdgeImage, FaceImage};
use crate::rational::Rational;

/// A planar contractible complex with a rotation system and its boundary cycle.
///
/// Darts are letters: `Letter { edge, inverse }` leaves the start vertex of
/// that letter. `rotation[v]` lists the darts leaving `v` in cyclic order.
/// Faces of the embedding are the orbits of `d ↦ σ(d⁻¹)`, where `σ` is the
/// successor in the rotation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiskDiagram {
    complex: TwoComplex,
    rotation: Vec<Vec<Letter>>,
    boundary: Vec<Letter>,
}

fn canonical_cyclic(word: &[Letter]) -> Vec<Letter> {
    let n = word.len();
    (0..n.max(1))
        .map(|p| (0..n).map(|i| word[(i + p) % n]).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

/// Canonical form of a face boundary up to rotation and inversion.
fn canonical_unoriented(word: &[Letter]) -> Vec<Letter> {
    canonical_cyclic(word).min(canonical_cyclic(&invert_word(word)))
}

impl DiskDiagram {
    pub fn new(complex: TwoComplex, rotation: Vec<Vec<Letter>>, boundary: Vec<Letter>) -> Result<Self> {
        let d = DiskDiagram {
            complex,
            rotation,
            boundary,
        };
        d.validate()?;
        Ok(d)
    }

    fn bad<T>(msg: impl Into<String>) -> Result<T> {
        Err(Error::InvalidDiagram(msg.into()))
    }

    fn validate(&self) -> Result<()> {
        let x = &self.complex;
        if x.vertex_count() == 0 {
            return Self::bad("a diagram has at least one vertex");
        }
        if !x.is_connected() {
            return Self::bad("diagram is not connected");
        }
        if x.euler_characteristic() != 1 {
            return Self::bad(format!(
                "Euler characteristic is {}, a disk has 1",
                x.euler_characteristic()
            ));
        }
        if self.rotation.len() != x.vertex_count() {
            return Self::bad("rotation system must list every vertex");
        }
        let mut seen = BTreeSet::new();
        for (v, darts) in self.rotation.iter().enumerate() {
            for &d in darts {
                if d.edge >= x.edge_count() || x.start(d) != v || !seen.insert(d) {
                    return Self::bad(format!("rotation at vertex {v} is not a list of its darts"));
                }
            }
        }
        if seen.len() != 2 * x.edge_count() {
            return Self::bad("rotation system misses some darts");
        }
        let orbits = self.orbits();
        let genus_count = x.vertex_count() as i64 - x.edge_count() as i64 + orbits.len().max(1) as i64;
        if genus_count != 2 {
            return Self::bad("rotation system is not planar");
        }
        if let Some(l) = self.boundary.iter().find(|l| l.edge >= x.edge_count()) {
            return Self::bad(format!("boundary uses unknown edge {}", l.edge));
        }
        let outer = self.boundary_orbit_index(&orbits)?;
        let mut faces: Vec<Vec<Letter>> = x.faces().iter().map(|f| canonical_unoriented(&f.word)).collect();
        let mut inner: Vec<Vec<Letter>> = orbits
            .iter()
            .enumerate()
            .filter(|&(i, _)| Some(i) != outer)
            .map(|(_, o)| canonical_unoriented(o))
            .collect();
        faces.sort();
        inner.sort();
        if faces != inner {
            return Self::bad("faces of the embedding do not match the 2-cells");
        }
        Ok(())
    }

    fn boundary_orbit_index(&self, orbits: &[Vec<Letter>]) -> Result<Option<usize>> {
        if self.boundary.is_empty() {
            if self.complex.edge_count() == 0 {
                return Ok(None);
            }
            return Self::bad("empty boundary on a diagram with edges");
        }
        let first = self.boundary[0];
        let i = orbits
            .iter()
            .position(|o| o.contains(&first))
            .expect("every dart lies in an orbit");
        let o = &orbits[i];
        let start = o.iter().position(|&d| d == first).unwrap();
        let rotated: Vec<Letter> = (0..o.len()).map(|k| o[(start + k) % o.len()]).collect();
        if rotated != self.boundary {
            return Self::bad("boundary is not a face of the rotation system");
        }
        Ok(Some(i))
    }

    fn successor(&self, d: Letter) -> Letter {
        let darts = &self.rotation[self.complex.start(d)];
        let i = darts.iter().position(|&x| x == d).expect("dart is in the rotation");
        darts[(i + 1) % darts.len()]
    }

    /// Orbits of `d ↦ σ(d⁻¹)`, each started at its smallest dart.
    pub fn orbits(&self) -> Vec<Vec<Letter>> {
        let mut seen = BTreeSet::new();
        let mut orbits = Vec::new();
        for e in 0..self.complex.edge_count() {
            for d in [Letter::forward(e), Letter::backward(e)] {
                if seen.contains(&d) {
                    continue;
                }
                let mut orbit = Vec::new();
                let mut cur = d;
                while seen.insert(cur) {
                    orbit.push(cur);
                    cur = self.successor(cur.inv());
                }
                orbits.push(orbit);
            }
        }
        orbits
    }

    pub fn complex(&self) -> &TwoComplex {
        &self.complex
    }

    pub fn rotation(&self) -> &[Vec<Letter>] {
        &self.rotation
    }

    pub fn boundary(&self) -> &[Letter] {
        &self.boundary
    }

    /// Vertices met by the boundary cycle (the only vertex, for a point).
    pub fn boundary_vertices(&self) -> BTreeSet<usize> {
        if self.boundary.is_empty() {
            return (0..self.complex.vertex_count()).collect();
        }
        self.boundary.iter().map(|&l| self.complex.start(l)).collect()
    }

    pub fn is_interior_vertex(&self, v: usize) -> bool {
        !self.boundary_vertices().contains(&v)
    }

    pub fn valence(&self, v: usize) -> usize {
        self.rotation[v].len()
    }
}

pub fn validate_diagram(
    complex: TwoComplex,
    rotation: Vec<Vec<Letter>>,
    boundary: Vec<Letter>,
) -> Result<DiskDiagram> {
    DiskDiagram::new(complex, rotation, boundary)
}

pub fn area(d: &DiskDiagram) -> usize {
    d.complex.face_count()
}

/// The boundary cycle traced from the rotation system, checked against the stored one.
pub fn boundary_cycle(d: &DiskDiagram) -> Result<Vec<Letter>> {
    let orbits = d.orbits();
    match d.boundary_orbit_index(&orbits)? {
        None => Ok(Vec::new()),
        Some(_) => Ok(d.boundary.clone()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
enum Cell {
    Vertex(usize),
    Edge(usize),
    Face(usize),
}

/// Incidence graph on the cells of `d`, with the cells in `removed` deleted.
fn cell_components(d: &DiskDiagram, removed: &BTreeSet<usize>) -> Vec<BTreeSet<Cell>> {
    let x = &d.complex;
    let mut cells: Vec<Cell> = (0..x.vertex_count())
        .filter(|v| !removed.contains(v))
        .map(Cell::Vertex)
        .collect();
    cells.extend((0..x.edge_count()).map(Cell::Edge));
    cells.extend((0..x.face_count()).map(Cell::Face));
    let mut adjacency: BTreeMap<Cell, Vec<Cell>> = cells.iter().map(|&c| (c, Vec::new())).collect();
    let mut link = |a: Cell, b: Cell| {
        if let Cell::Vertex(v) = b {
            if removed.contains(&v) {
                return;
            }
        }
        adjacency.get_mut(&a).unwrap().push(b);
        adjacency.get_mut(&b).unwrap().push(a);
    };
    for (e, edge) in x.edges().iter().enumerate() {
        link(Cell::Edge(e), Cell::Vertex(edge.init));
        link(Cell::Edge(e), Cell::Vertex(edge.term));
    }
    for (f, face) in x.faces().iter().enumerate() {
        for l in &face.word {
            link(Cell::Face(f), Cell::Edge(l.edge));
        }
    }
    let mut seen = BTreeSet::new();
    let mut components = Vec::new();
    for &c in &cells {
        if seen.contains(&c) {
            continue;
        }
        let mut comp = BTreeSet::from([c]);
        seen.insert(c);
        let mut stack = vec![c];
        while let Some(a) = stack.pop() {
            for &b in &adjacency[&a] {
                if seen.insert(b) {
                    comp.insert(b);
                    stack.push(b);
                }
            }
        }
        components.push(comp);
    }
    components
}

/// Vertices whose removal disconnects the diagram.
pub fn cut_vertices(d: &DiskDiagram) -> Vec<usize> {
    (0..d.complex.vertex_count())
        .filter(|&v| cell_components(d, &BTreeSet::from([v])).len() > 1)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CutComponent {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
    /// Contains a 2-cell.
    pub nonsingular: bool,
}

/// Closures of the components left after removing every cut vertex.
pub fn cut_components(d: &DiskDiagram) -> Vec<CutComponent> {
    let cuts: BTreeSet<usize> = cut_vertices(d).into_iter().collect();
    let x = &d.complex;
    let mut out = Vec::new();
    for comp in cell_components(d, &cuts) {
        let mut vertices = BTreeSet::new();
        let mut edges = Vec::new();
        let mut faces = Vec::new();
        for c in comp {
            match c {
                Cell::Vertex(v) => {
                    vertices.insert(v);
                }
                Cell::Edge(e) => {
                    edges.push(e);
                    vertices.insert(x.edge(e).init);
                    vertices.insert(x.edge(e).term);
                }
                Cell::Face(f) => faces.push(f),
            }
        }
        out.push(CutComponent {
            vertices: vertices.into_iter().collect(),
            edges,
            nonsingular: !faces.is_empty(),
            faces,
        });
    }
    out.sort_by(|a, b| (&a.vertices, &a.edges).cmp(&(&b.vertices, &b.edges)));
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcKind {
    Boundary,
    Internal,
}

/// A maximal path whose inner vertices have valence two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub path: Vec<Letter>,
    pub start: usize,
    pub end: usize,
    /// The arc is a whole cycle of valence-two vertices.
    pub closed: bool,
    pub kind: ArcKind,
}

fn all_arcs(d: &DiskDiagram) -> Vec<Arc> {
    let x = &d.complex;
    let boundary_edges: BTreeSet<usize> = d.boundary.iter().map(|l| l.edge).collect();
    let mut used = vec![false; x.edge_count()];
    let mut arcs = Vec::new();
    let push_arc = |path: Vec<Letter>, closed: bool, arcs: &mut Vec<Arc>| {
        let kind = if path.iter().any(|l| boundary_edges.contains(&l.edge)) {
            ArcKind::Boundary
        } else {
            ArcKind::Internal
        };
        arcs.push(Arc {
            start: x.start(path[0]),
            end: x.end(*path.last().unwrap()),
            path,
            closed,
            kind,
        });
    };
    let walk = |first: Letter, used: &mut Vec<bool>| {
        let mut path = vec![first];
        used[first.edge] = true;
        let mut cur = first;
        loop {
            let v = x.end(cur);
            if d.valence(v) != 2 {
                break;
            }
            let back = cur.inv();
            let next = *d.rotation[v].iter().find(|&&l| l != back).unwrap();
            if used[next.edge] {
                break;
            }
            used[next.edge] = true;
            path.push(next);
            cur = next;
        }
        path
    };
    for v in 0..x.vertex_count() {
        if d.valence(v) == 2 {
            continue;
        }
        for &first in &d.rotation[v] {
            if !used[first.edge] {
                let path = walk(first, &mut used);
                push_arc(path, false, &mut arcs);
            }
        }
    }
    for e in 0..x.edge_count() {
        if !used[e] {
            let path = walk(Letter::forward(e), &mut used);
            push_arc(path, true, &mut arcs);
        }
    }
    arcs
}

pub fn boundary_arcs(d: &DiskDiagram) -> Vec<Arc> {
    all_arcs(d).into_iter().filter(|a| a.kind == ArcKind::Boundary).collect()
}

pub fn internal_arcs(d: &DiskDiagram) -> Vec<Arc> {
    all_arcs(d).into_iter().filter(|a| a.kind == ArcKind::Internal).collect()
}

/// Every inner vertex of the path is interior to `d` or unmarked.
pub fn is_good_path(d: &DiskDiagram, start: usize, path: &[Letter], marked: &BTreeSet<usize>) -> Result<bool> {
    let x = &d.complex;
    x.check_vertex(start)?;
    let mut v = start;
    let mut inner = Vec::new();
    for (i, &l) in path.iter().enumerate() {
        if l.edge >= x.edge_count() || x.start(l) != v {
            return Err(Error::InvalidPath(format!("letter {i} does not continue the path")));
        }
        v = x.end(l);
        if i + 1 < path.len() {
            inner.push(v);
        }
    }
    let boundary = d.boundary_vertices();
    Ok(inner.iter().all(|u| !boundary.contains(u) || !marked.contains(u)))
}

/// A diagram with a map to a complex whose boundary reads a given path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiagramMap {
    pub diagram: DiskDiagram,
    #[serde(skip)]
    pub target: TwoComplex,
    pub morphism: CellMorphism,
    pub near_immersion: bool,
}

impl DiagramMap {
    pub fn cellular_map(&self) -> CellularMap {
        CellularMap {
            source: self.diagram.complex.clone(),
            target: self.target.clone(),
            morphism: self.morphism.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DiagramSearch {
    Found(Box<DiagramMap>),
    NoneWithinBound { max_area: usize, states: usize },
}

/// Search states beyond this count end the search without a verdict.
pub const STATE_CAP: usize = 200_000;

fn rotate(word: &[Letter], p: usize) -> Vec<Letter> {
    let n = word.len();
    (0..n).map(|i| word[(i + p) % n]).collect()
}

/// Cyclic cancellations and the final rotation taking a raw closed word to
/// its canonical cyclically reduced form.
#[derive(Debug, Clone)]
struct Normalization {
    /// Each entry rotates the word by `.0` and then drops the pair starting with `.1`.
    cancels: Vec<(usize, Letter)>,
    rotation: usize,
    /// Image of the vertex left when the word cancels completely.
    base: usize,
}

fn normalize(x: &TwoComplex, raw: Vec<Letter>, base: usize) -> (Vec<Letter>, Normalization) {
    let mut w = raw;
    let mut cancels = Vec::new();
    loop {
        let m = w.len();
        let Some(i) = (0..m).find(|&i| m >= 2 && w[i] == w[(i + 1) % m].inv()) else { break };
        let r = rotate(&w, i);
        cancels.push((i, r[0]));
        w = r[2..].to_vec();
    }
    let rotation = if w.is_empty() {
        0
    } else {
        (0..w.len()).min_by_key(|&p| rotate(&w, p)).unwrap()
    };
    let w = rotate(&w, rotation);
    // a fully cancelled word sits where its last cancelled pair started
    let base = match cancels.last() {
        Some(&(_, l)) if w.is_empty() => x.start(l),
        _ => base,
    };
    debug_assert!(w.is_empty() || x.start(w[0]) == x.end(w[w.len() - 1]));
    (w, Normalization { cancels, rotation, base })
}

/// The search state: the canonical words still to be filled, sorted.
type State = Vec<Vec<Letter>>;

#[derive(Debug, Clone, Copy)]
enum Move {
    /// Glue a face along `w[rot..rot + k]` of the first word, read as the first
    /// `k` letters of the face's `align` reading.
    Attach { rot: usize, face: usize, align: Dihedral, k: usize },
    /// The first letter is a bridge: `w = a·u·a⁻¹·v` with `w[j] = a⁻¹`.
    Split { j: usize },
}

/// The children of applying `mv` to the canonical word `w`, as raw words with their base images.
fn move_children(x: &TwoComplex, w: &[Letter], mv: Move) -> Vec<(Vec<Letter>, usize)> {
    match mv {
        Move::Attach { rot, face, align, k } => {
            let r = reading(&x.face(face).word, align);
            let wr = rotate(w, rot);
            let mut child = invert_word(&r[k..]);
            child.extend_from_slice(&wr[k..]);
            vec![(child, x.start(wr[0]))]
        }
        Move::Split { j } => {
            let u = w[1..j].to_vec();
            let v = w[j + 1..].to_vec();
            vec![(u, x.end(w[0])), (v, x.start(w[0]))]
        }
    }
}

fn apply_move(x: &TwoComplex, state: &State, mv: Move) -> State {
    let mut next: State = state[1..].to_vec();
    for (raw, base) in move_children(x, &state[0], mv) {
        let (w, _) = normalize(x, raw, base);
        if !w.is_empty() {
            next.push(w);
        }
    }
    next.sort();
    next
}

/// Moves disposing of the first letter of the first word: every face through
/// it glued along the maximal matching segment, and every bridge split.
fn moves(readings: &[(usize, Dihedral, Vec<Letter>)], w: &[Letter]) -> Vec<Move> {
    let m = w.len();
    let mut out = Vec::new();
    for (face, align, r) in readings {
        let n = r.len();
        if r[0] != w[0] {
            continue;
        }
        let limit = n.min(m);
        let mut k = 1;
        while k < limit && w[k] == r[k] {
            k += 1;
        }
        let mut t = 0;
        while k + t < limit && w[m - 1 - t] == r[n - 1 - t] {
            t += 1;
        }
        let shift = Dihedral::new((n - t) % n, false);
        out.push(Move::Attach {
            rot: (m - t) % m,
            face: *face,
            align: align.compose(shift, n).normalized(n),
            k: k + t,
        });
    }
    for j in 2..m.saturating_sub(1) {
        if w[j] == w[0].inv() {
            out.push(Move::Split { j });
        }
    }
    out
}

/// Smallest-area diagram over `x` whose boundary reads the closed `path`
/// starting at `start`, among diagrams of area at most `max_area`.
pub fn find_disk_diagram(x: &TwoComplex, start: usize, path: &[Letter], max_area: usize) -> Result<DiagramSearch> {
    x.check_vertex(start)?;
    let mut v = start;
    for (i, &l) in path.iter().enumerate() {
        if l.edge >= x.edge_count() || x.start(l) != v {
            return Err(Error::InvalidPath(format!("letter {i} does not continue the path")));
        }
        v = x.end(l);
    }
    if v != start {
        return Err(Error::InvalidPath("path is not closed".into()));
    }
    let readings: Vec<(usize, Dihedral, Vec<Letter>)> = (0..x.face_count())
        .flat_map(|f| {
            let n = x.face(f).len();
            let word = x.face(f).word.clone();
            (0..n).flat_map(move |o| {
                let word = word.clone();
                [false, true].into_iter().map(move |r| {
                    let align = Dihedral::new(o, r);
                    (f, align, reading(&word, align))
                })
            })
        })
        .collect();

    let (root_word, _) = normalize(x, path.to_vec(), start);
    let root: State = if root_word.is_empty() { vec![] } else { vec![root_word] };
    let mut dist: HashMap<State, usize> = HashMap::from([(root.clone(), 0)]);
    let mut parent: HashMap<State, (State, Move)> = HashMap::new();
    let mut queue = VecDeque::from([(root.clone(), 0usize)]);
    let mut found = false;
    while let Some((state, d)) = queue.pop_front() {
        if dist[&state] < d {
            continue;
        }
        if state.is_empty() {
            found = true;
            break;
        }
        if dist.len() > STATE_CAP {
            return Ok(DiagramSearch::NoneWithinBound {
                max_area,
                states: dist.len(),
            });
        }
        for mv in moves(&readings, &state[0]) {
            let cost = usize::from(matches!(mv, Move::Attach { .. }));
            let nd = d + cost;
            if nd > max_area {
                continue;
            }
            let child = apply_move(x, &state, mv);
            if dist.get(&child).is_none_or(|&old| nd < old) {
                dist.insert(child.clone(), nd);
                parent.insert(child.clone(), (state.clone(), mv));
                if cost == 0 {
                    queue.push_front((child, nd));
                } else {
                    queue.push_back((child, nd));
                }
            }
        }
    }
    if !found {
        return Ok(DiagramSearch::NoneWithinBound {
            max_area,
            states: dist.len(),
        });
    }
    let mut path_moves = Vec::new();
    let mut cur: State = Vec::new();
    while cur != root {
        let (prev, mv) = parent[&cur].clone();
        path_moves.push(mv);
        cur = prev;
    }
    path_moves.reverse();

    // replay the moves forwards, recording how each word was resolved
    let mut tree = Derivation::default();
    let (root_word, root_norm) = normalize(x, path.to_vec(), start);
    let root_node = tree.node(root_word);
    let mut forest: Vec<usize> = root_node.into_iter().collect();
    for mv in path_moves {
        let focus = forest.remove(0);
        let word = tree.words[focus].clone();
        let mut children = Vec::new();
        for (raw, base) in move_children(x, &word, mv) {
            let (w, norm) = normalize(x, raw, base);
            let id = tree.node(w);
            forest.extend(id);
            children.push((norm, id));
        }
        tree.resolutions[focus] = Some((mv, children));
        forest.sort_by(|&a, &b| tree.words[a].cmp(&tree.words[b]));
    }
    debug_assert!(forest.is_empty());

    let mut builder = DiagramBuilder::new(x);
    let (boundary, _) = builder.build(&tree, &root_norm, root_node);
    builder.boundary = boundary;
    let map = builder.finish()?;
    Ok(DiagramSearch::Found(Box::new(map)))
}

/// The move applied to a word and its normalized children (`None` when empty).
type Resolution = (Move, Vec<(Normalization, Option<usize>)>);

/// The resolution of every word met while replaying a search path.
#[derive(Default)]
struct Derivation {
    words: Vec<Vec<Letter>>,
    resolutions: Vec<Option<Resolution>>,
}

impl Derivation {
    fn node(&mut self, word: Vec<Letter>) -> Option<usize> {
        if word.is_empty() {
            return None;
        }
        self.words.push(word);
        self.resolutions.push(None);
        Some(self.words.len() - 1)
    }
}

/// Grows a diagram from a derivation, tracking boundary darts.
struct DiagramBuilder<'a> {
    x: &'a TwoComplex,
    vertex_images: Vec<usize>,
    edges: Vec<Edge>,
    edge_images: Vec<EdgeImage>,
    faces: Vec<Face>,
    face_images: Vec<FaceImage>,
    rotation: Vec<Vec<Letter>>,
    boundary: Vec<Letter>,
}

impl<'a> DiagramBuilder<'a> {
    fn new(x: &'a TwoComplex) -> Self {
        DiagramBuilder {
            x,
            vertex_images: Vec::new(),
            edges: Vec::new(),
            edge_images: Vec::new(),
            faces: Vec::new(),
            face_images: Vec::new(),
            rotation: Vec::new(),
            boundary: Vec::new(),
        }
    }

    fn start(&self, d: Letter) -> usize {
        let e = self.edges[d.edge];
        if d.inverse {
            e.term
        } else {
            e.init
        }
    }

    fn end(&self, d: Letter) -> usize {
        self.start(d.inv())
    }

    fn insert_before(&mut self, v: usize, anchor: Letter, d: Letter) {
        let i = self.rotation[v].iter().position(|&x| x == anchor).unwrap();
        self.rotation[v].insert(i, d);
    }

    fn insert_after(&mut self, v: usize, anchor: Letter, d: Letter) {
        let i = self.rotation[v].iter().position(|&x| x == anchor).unwrap();
        self.rotation[v].insert(i + 1, d);
    }

    /// New edge from `from` mapping onto the letter `image`; returns its forward dart.
    fn new_edge(&mut self, from: usize, to: usize, image: Letter) -> Letter {
        self.edges.push(Edge { init: from, term: to });
        self.edge_images.push(EdgeImage {
            edge: image.edge,
            reversed: image.inverse,
        });
        Letter::forward(self.edges.len() - 1)
    }

    fn new_vertex(&mut self, image: usize) -> usize {
        self.vertex_images.push(image);
        self.rotation.push(Vec::new());
        self.vertex_images.len() - 1
    }

    /// Puts the dart `d` leaving `v` just before the boundary dart `next`
    /// (or alone, if the boundary is empty).
    fn insert_at_corner(&mut self, v: usize, next: Option<Letter>, d: Letter) {
        match next {
            Some(first) => self.insert_before(v, first, d),
            None => self.rotation[v].push(d),
        }
    }

    /// A fragment whose boundary reads the canonical word of `node`, or a
    /// single vertex for an empty word; returns the boundary and its base.
    fn build(&mut self, tree: &Derivation, norm: &Normalization, node: Option<usize>) -> (Vec<Letter>, usize) {
        let (mut boundary, mut base) = match node {
            None => (Vec::new(), self.new_vertex(norm.base)),
            Some(id) => self.resolve(tree, id),
        };
        // undo the canonical rotation, then the cancellations in reverse
        let m = boundary.len();
        if m > 0 {
            boundary = rotate(&boundary, m - norm.rotation % m);
        }
        for &(p, letter) in norm.cancels.iter().rev() {
            let at = boundary.first().map_or(base, |&d| self.start(d));
            let z = self.new_vertex(self.x.end(letter));
            let d = self.new_edge(at, z, letter);
            self.insert_at_corner(at, boundary.first().copied(), d);
            self.rotation[z].push(d.inv());
            let mut b = vec![d, d.inv()];
            b.extend(boundary);
            let m = b.len();
            boundary = rotate(&b, m - p % m);
        }
        if let Some(&d) = boundary.first() {
            base = self.start(d);
        }
        (boundary, base)
    }

    fn resolve(&mut self, tree: &Derivation, id: usize) -> (Vec<Letter>, usize) {
        let word = &tree.words[id];
        let (mv, children) = tree.resolutions[id].as_ref().expect("every replayed word is resolved");
        match *mv {
            Move::Attach { rot, face, align, k } => {
                let (norm, child) = &children[0];
                let (aligned, base) = self.build(tree, norm, *child);
                let r = reading(&self.x.face(face).word, align);
                let n = r.len();
                let t_len = n - k;
                let p = aligned.first().map_or(base, |&d| self.start(d));
                let q = if t_len == 0 { p } else { self.end(aligned[t_len - 1]) };
                // path s_1 .. s_k from p to q
                let mut s = Vec::with_capacity(k);
                let mut from = p;
                for (i, &letter) in r[..k].iter().enumerate() {
                    let to = if i + 1 == k { q } else { self.new_vertex(self.x.end(letter)) };
                    s.push(self.new_edge(from, to, letter));
                    from = to;
                }
                for i in 1..k {
                    let v = self.start(s[i]);
                    self.rotation[v].push(s[i - 1].inv());
                    self.rotation[v].push(s[i]);
                }
                let s1 = s[0];
                let sk_inv = s[k - 1].inv();
                self.insert_at_corner(p, aligned.first().copied(), s1);
                if t_len == 0 {
                    self.insert_after(p, s1, sk_inv);
                } else {
                    let anchor = aligned[t_len - 1].inv();
                    self.insert_after(q, anchor, sk_inv);
                }
                // face word: s, then the old boundary segment traversed backwards
                let mut face_word = s.clone();
                face_word.extend(aligned[..t_len].iter().rev().map(|d| d.inv()));
                let target = self.x.face(face);
                let angles: Vec<Rational> = (0..n).map(|j| target.angles[align.corner(j, n)]).collect();
                self.faces.push(Face { word: face_word, angles });
                self.face_images.push(FaceImage { face, align });
                let mut b = s;
                b.extend_from_slice(&aligned[t_len..]);
                let m = b.len();
                (rotate(&b, m - rot % m), p)
            }
            Move::Split { .. } => {
                let (u, _) = self.build(tree, &children[0].0, children[0].1);
                let (v, _) = self.build(tree, &children[1].0, children[1].1);
                let (s, t) = (self.start(v[0]), self.start(u[0]));
                let d = self.new_edge(s, t, word[0]);
                self.insert_before(s, v[0], d);
                self.insert_before(t, u[0], d.inv());
                let mut b = vec![d];
                b.extend(u);
                b.push(d.inv());
                b.extend(v);
                (b, s)
            }
        }
    }

    fn finish(self) -> Result<DiagramMap> {
        let complex = TwoComplex::new(self.vertex_images.len(), self.edges, self.faces)?;
        let morphism = CellMorphism {
            vertices: self.vertex_images,
            edges: self.edge_images,
            faces: self.face_images,
        };
        morphism.check(&complex, self.x)?;
        let diagram = DiskDiagram::new(complex, self.rotation, self.boundary)?;
        let map = CellularMap {
            source: diagram.complex.clone(),
            target: self.x.clone(),
            morphism,
        };
        let near_immersion = is_near_immersion(&map).holds;
        Ok(DiagramMap {
            diagram,
            target: map.target,
            morphism: map.morphism,
            near_immersion,
        })
    }
}
