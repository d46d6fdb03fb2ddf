//! Combinatorial 2-complexes with angled corners, their links, and the
//! `(p, q, r)` classification.
//!
//! Cells are identified by dense indices. A face is attached along a closed
//! word of oriented edges; corner `i` of a face sits at the start vertex of
//! letter `i`, between letters `i - 1` and `i` (cyclically).

use std::collections::VecDeque;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rational::{frac, Rational};

/// One letter of an attaching word: an edge traversed forwards or backwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub edge: usize,
    pub inverse: bool,
}

impl Letter {
    pub fn forward(edge: usize) -> Self {
        Letter { edge, inverse: false }
    }

    pub fn backward(edge: usize) -> Self {
        Letter { edge, inverse: true }
    }

    pub fn inv(self) -> Self {
        Letter {
            edge: self.edge,
            inverse: !self.inverse,
        }
    }

    /// The edge-end the letter leaves from.
    pub fn start_end(self) -> EdgeEnd {
        EdgeEnd {
            edge: self.edge,
            end: if self.inverse { End::Term } else { End::Init },
        }
    }

    /// The edge-end the letter arrives at.
    pub fn end_end(self) -> EdgeEnd {
        EdgeEnd {
            edge: self.edge,
            end: if self.inverse { End::Init } else { End::Term },
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inverse {
            write!(f, "-{}", self.edge)
        } else {
            write!(f, "{}", self.edge)
        }
    }
}

impl Serialize for Letter {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

pub fn invert_word(word: &[Letter]) -> Vec<Letter> {
    word.iter().rev().map(|l| l.inv()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum End {
    Init,
    Term,
}

impl End {
    pub fn flip(self) -> End {
        match self {
            End::Init => End::Term,
            End::Term => End::Init,
        }
    }
}

/// An end of a 1-cell; the vertices of a link are edge-ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeEnd {
    pub edge: usize,
    pub end: End,
}

/// A corner of a 2-cell; the edges of a link are corners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Corner {
    pub face: usize,
    pub position: usize,
}

/// A dihedral relabelling of the letter positions of an `n`-gon:
/// `j -> offset + j` or, when reflected, `j -> offset - j` (mod `n`).
///
/// Under a reflection the letters are also read backwards, so letter `j`
/// lands on the inverse of the target letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Dihedral {
    pub offset: usize,
    pub reflected: bool,
}

impl Dihedral {
    pub const IDENTITY: Dihedral = Dihedral {
        offset: 0,
        reflected: false,
    };

    pub fn new(offset: usize, reflected: bool) -> Self {
        Dihedral { offset, reflected }
    }

    pub fn letter(self, j: usize, n: usize) -> usize {
        if self.reflected {
            (self.offset + n - j % n) % n
        } else {
            (self.offset + j) % n
        }
    }

    pub fn corner(self, i: usize, n: usize) -> usize {
        if self.reflected {
            (self.offset + 1 + n - i % n) % n
        } else {
            (self.offset + i) % n
        }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(self, other: Dihedral, n: usize) -> Dihedral {
        let offset = self.letter(other.offset, n);
        Dihedral {
            offset,
            reflected: self.reflected != other.reflected,
        }
    }

    pub fn inverse(self, n: usize) -> Dihedral {
        if self.reflected {
            self
        } else {
            Dihedral {
                offset: (n - self.offset % n) % n,
                reflected: false,
            }
        }
    }

    pub fn normalized(self, n: usize) -> Dihedral {
        Dihedral {
            offset: self.offset % n.max(1),
            reflected: self.reflected,
        }
    }

    /// Transports a letter of the source face onto the target word.
    pub fn image_letter(self, target: &[Letter], j: usize) -> Letter {
        let l = target[self.letter(j, target.len())];
        if self.reflected {
            l.inv()
        } else {
            l
        }
    }
}

/// Reads `word` from position `offset`, forwards or (reflected) as the inverse word.
pub fn reading(word: &[Letter], align: Dihedral) -> Vec<Letter> {
    (0..word.len()).map(|j| align.image_letter(word, j)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Edge {
    pub init: usize,
    pub term: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Face {
    pub word: Vec<Letter>,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub angles: Vec<Rational>,
}

impl Face {
    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn angle_sum(&self) -> Rational {
        self.angles.iter().copied().sum()
    }
}

/// A validated combinatorial 2-complex with rational corner angles (π-units).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TwoComplex {
    vertex_count: usize,
    edges: Vec<Edge>,
    faces: Vec<Face>,
}

impl TwoComplex {
    pub fn new(vertex_count: usize, edges: Vec<Edge>, faces: Vec<Face>) -> Result<Self> {
        for e in &edges {
            for v in [e.init, e.term] {
                if v >= vertex_count {
                    return Err(Error::UnknownVertex(v));
                }
            }
        }
        let complex = TwoComplex {
            vertex_count,
            edges,
            faces,
        };
        for (f, face) in complex.faces.iter().enumerate() {
            if face.word.is_empty() {
                return Err(Error::EmptyWord { face: f });
            }
            if let Some(l) = face.word.iter().find(|l| l.edge >= complex.edges.len()) {
                return Err(Error::UnknownEdge(l.edge));
            }
            let n = face.word.len();
            for j in 0..n {
                let next = (j + 1) % n;
                if complex.end(face.word[j]) != complex.start(face.word[next]) {
                    return Err(Error::NotClosed {
                        face: f,
                        position: next,
                    });
                }
            }
            if face.angles.len() != n {
                return Err(Error::AngleCount {
                    face: f,
                    angles: face.angles.len(),
                    length: n,
                });
            }
        }
        Ok(complex)
    }

    /// A complex with edges only.
    pub fn graph(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        let edges = edges
            .into_iter()
            .map(|(init, term)| Edge { init, term })
            .collect();
        Self::new(vertex_count, edges, Vec::new())
    }

    pub fn empty() -> Self {
        TwoComplex {
            vertex_count: 0,
            edges: Vec::new(),
            faces: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    /// `(vertices, edges, faces)`.
    pub fn counts(&self) -> (usize, usize, usize) {
        (self.vertex_count, self.edges.len(), self.faces.len())
    }

    pub fn cell_count(&self) -> usize {
        self.vertex_count + self.edges.len() + self.faces.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn faces(&self) -> &[Face] {
        &self.faces
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn face(&self, f: usize) -> &Face {
        &self.faces[f]
    }

    pub fn start(&self, l: Letter) -> usize {
        let e = &self.edges[l.edge];
        if l.inverse {
            e.term
        } else {
            e.init
        }
    }

    pub fn end(&self, l: Letter) -> usize {
        let e = &self.edges[l.edge];
        if l.inverse {
            e.init
        } else {
            e.term
        }
    }

    pub fn end_vertex(&self, end: EdgeEnd) -> usize {
        match end.end {
            End::Init => self.edges[end.edge].init,
            End::Term => self.edges[end.edge].term,
        }
    }

    /// Replaces every corner angle; `angles[f]` must match face `f`.
    pub fn with_angles(&self, angles: Vec<Vec<Rational>>) -> Result<Self> {
        let faces = self
            .faces
            .iter()
            .zip(angles)
            .map(|(face, angles)| Face {
                word: face.word.clone(),
                angles,
            })
            .collect();
        TwoComplex::new(self.vertex_count, self.edges.clone(), faces)
    }

    /// The two link vertices joined by a corner: the arriving end of letter
    /// `position - 1` and the leaving end of letter `position`.
    pub fn corner_ends(&self, corner: Corner) -> (EdgeEnd, EdgeEnd) {
        let word = &self.faces[corner.face].word;
        let n = word.len();
        let prev = word[(corner.position + n - 1) % n];
        (prev.end_end(), word[corner.position].start_end())
    }

    pub fn corner_vertex(&self, corner: Corner) -> usize {
        self.start(self.faces[corner.face].word[corner.position])
    }

    pub fn corner_angle(&self, corner: Corner) -> Rational {
        self.faces[corner.face].angles[corner.position]
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count {
            Ok(())
        } else {
            Err(Error::UnknownVertex(v))
        }
    }

    /// Edge-ends at `v`, sorted.
    pub fn ends_at(&self, v: usize) -> Vec<EdgeEnd> {
        let mut ends = Vec::new();
        for (e, edge) in self.edges.iter().enumerate() {
            if edge.init == v {
                ends.push(EdgeEnd { edge: e, end: End::Init });
            }
            if edge.term == v {
                ends.push(EdgeEnd { edge: e, end: End::Term });
            }
        }
        ends
    }

    /// Corners at `v`, sorted by (face, position).
    pub fn corners_at(&self, v: usize) -> Vec<Corner> {
        let mut corners = Vec::new();
        for (f, face) in self.faces.iter().enumerate() {
            for (position, &l) in face.word.iter().enumerate() {
                if self.start(l) == v {
                    corners.push(Corner { face: f, position });
                }
            }
        }
        corners
    }

    pub fn all_corners(&self) -> impl Iterator<Item = Corner> + '_ {
        self.faces.iter().enumerate().flat_map(|(f, face)| {
            (0..face.word.len()).map(move |position| Corner { face: f, position })
        })
    }

    /// The link of `v`: edge-ends as vertices, corners as angled edges.
    pub fn link(&self, v: usize) -> Result<AngledGraph> {
        self.check_vertex(v)?;
        let ends = self.ends_at(v);
        let index = |end: EdgeEnd| ends.binary_search(&end).expect("corner end lies at v");
        let corners = self.corners_at(v);
        let edges = corners
            .iter()
            .map(|&c| {
                let (a, b) = self.corner_ends(c);
                GraphEdge {
                    ends: (index(a), index(b)),
                    angle: Some(self.corner_angle(c)),
                }
            })
            .collect();
        Ok(AngledGraph {
            vertex_count: ends.len(),
            edges,
            vertex_labels: ends.into_iter().map(Some).collect(),
            edge_labels: corners.into_iter().map(Some).collect(),
        })
    }

    /// `V - E + F`.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// Connected components as vertex labels `0..k`.
    pub fn vertex_components(&self) -> (usize, Vec<usize>) {
        let mut uf = UnionFind::new(self.vertex_count);
        for e in &self.edges {
            uf.union(e.init, e.term);
        }
        uf.labels()
    }

    pub fn is_connected(&self) -> bool {
        self.vertex_components().0 <= 1
    }

    /// Number of occurrences of each edge among all attaching words.
    pub fn edge_multiplicities(&self) -> Vec<usize> {
        let mut counts = vec![0; self.edges.len()];
        for face in &self.faces {
            for l in &face.word {
                counts[l.edge] += 1;
            }
        }
        counts
    }

    /// Disjoint union; cells of `other` are shifted after those of `self`.
    pub fn disjoint_union(&self, other: &TwoComplex) -> TwoComplex {
        let dv = self.vertex_count;
        let de = self.edges.len();
        let mut edges = self.edges.clone();
        edges.extend(other.edges.iter().map(|e| Edge {
            init: e.init + dv,
            term: e.term + dv,
        }));
        let mut faces = self.faces.clone();
        faces.extend(other.faces.iter().map(|f| Face {
            word: f
                .word
                .iter()
                .map(|l| Letter {
                    edge: l.edge + de,
                    inverse: l.inverse,
                })
                .collect(),
            angles: f.angles.clone(),
        }));
        TwoComplex {
            vertex_count: dv + other.vertex_count,
            edges,
            faces,
        }
    }

    /// Whether the edge path is consecutive; returns its start and end.
    pub fn path_endpoints(&self, path: &[Letter]) -> Result<Option<(usize, usize)>> {
        if let Some(l) = path.iter().find(|l| l.edge >= self.edges.len()) {
            return Err(Error::UnknownEdge(l.edge));
        }
        for w in path.windows(2) {
            if self.end(w[0]) != self.start(w[1]) {
                return Err(Error::InvalidPath(format!(
                    "letters {} and {} are not consecutive",
                    w[0], w[1]
                )));
            }
        }
        Ok(path
            .first()
            .map(|&first| (self.start(first), self.end(*path.last().unwrap()))))
    }
}

/// Shortest-cycle length or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Count {
    Finite(usize),
    Infinite,
}

impl Count {
    pub fn is_finite(self) -> bool {
        matches!(self, Count::Finite(_))
    }

    pub fn at_least(self, n: usize) -> bool {
        match self {
            Count::Finite(k) => k >= n,
            Count::Infinite => true,
        }
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "{k}"),
            Count::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for Count {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Count::Finite(k) => s.serialize_u64(*k as u64),
            Count::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct GraphEdge {
    pub ends: (usize, usize),
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub angle: Option<Rational>,
}

/// A finite multigraph (loops allowed) with optional edge angles.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AngledGraph {
    vertex_count: usize,
    edges: Vec<GraphEdge>,
    vertex_labels: Vec<Option<EdgeEnd>>,
    edge_labels: Vec<Option<Corner>>,
}

impl AngledGraph {
    pub fn new(vertex_count: usize, edges: Vec<GraphEdge>) -> Result<Self> {
        for e in &edges {
            for v in [e.ends.0, e.ends.1] {
                if v >= vertex_count {
                    return Err(Error::UnknownVertex(v));
                }
            }
        }
        let m = edges.len();
        Ok(AngledGraph {
            vertex_count,
            edges,
            vertex_labels: vec![None; vertex_count],
            edge_labels: vec![None; m],
        })
    }

    /// Convenience constructor with every edge angled.
    pub fn angled(vertex_count: usize, edges: &[(usize, usize, Rational)]) -> Result<Self> {
        Self::new(
            vertex_count,
            edges
                .iter()
                .map(|&(a, b, angle)| GraphEdge {
                    ends: (a, b),
                    angle: Some(angle),
                })
                .collect(),
        )
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[GraphEdge] {
        &self.edges
    }

    pub fn vertex_labels(&self) -> &[Option<EdgeEnd>] {
        &self.vertex_labels
    }

    pub fn edge_labels(&self) -> &[Option<Corner>] {
        &self.edge_labels
    }

    pub fn angle(&self, e: usize) -> Result<Rational> {
        self.edges[e].angle.ok_or(Error::UnangledEdge(e))
    }

    /// Adds an edge, returning the enlarged graph.
    pub fn with_edge(&self, a: usize, b: usize, angle: Rational) -> Result<AngledGraph> {
        for v in [a, b] {
            if v >= self.vertex_count {
                return Err(Error::UnknownVertex(v));
            }
        }
        let mut g = self.clone();
        g.edges.push(GraphEdge {
            ends: (a, b),
            angle: Some(angle),
        });
        g.edge_labels.push(None);
        Ok(g)
    }

    /// Valences with loops counted twice.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.vertex_count];
        for e in &self.edges {
            deg[e.ends.0] += 1;
            deg[e.ends.1] += 1;
        }
        deg
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64
    }

    pub fn component_count(&self) -> usize {
        let mut uf = UnionFind::new(self.vertex_count);
        for e in &self.edges {
            uf.union(e.ends.0, e.ends.1);
        }
        uf.labels().0
    }

    pub fn angle_sum(&self) -> Result<Rational> {
        (0..self.edges.len()).map(|e| self.angle(e)).sum()
    }

    /// Length of a shortest embedded cycle. Loops give 1, parallel edges 2.
    pub fn girth(&self) -> Count {
        let mut adjacency = vec![Vec::new(); self.vertex_count];
        for (i, e) in self.edges.iter().enumerate() {
            adjacency[e.ends.0].push((e.ends.1, i));
            if e.ends.0 != e.ends.1 {
                adjacency[e.ends.1].push((e.ends.0, i));
            }
        }
        let mut best = Count::Infinite;
        for (skip, e) in self.edges.iter().enumerate() {
            let (u, v) = e.ends;
            if u == v {
                return Count::Finite(1);
            }
            let mut dist = vec![usize::MAX; self.vertex_count];
            dist[u] = 0;
            let mut queue = VecDeque::from([u]);
            while let Some(x) = queue.pop_front() {
                if x == v {
                    break;
                }
                for &(y, i) in &adjacency[x] {
                    if i != skip && dist[y] == usize::MAX {
                        dist[y] = dist[x] + 1;
                        queue.push_back(y);
                    }
                }
            }
            if dist[v] != usize::MAX {
                best = best.min(Count::Finite(dist[v] + 1));
            }
        }
        best
    }

    /// Subgraph on the listed vertices and edges, renumbered densely in order.
    pub fn subgraph(&self, vertices: &[usize], edges: &[usize]) -> Result<AngledGraph> {
        let mut index = vec![usize::MAX; self.vertex_count];
        for (i, &v) in vertices.iter().enumerate() {
            index[v] = i;
        }
        let mut out = Vec::with_capacity(edges.len());
        for &e in edges {
            let (a, b) = self.edges[e].ends;
            if index[a] == usize::MAX || index[b] == usize::MAX {
                return Err(Error::Precondition(format!(
                    "edge {e} has an endpoint outside the chosen vertices"
                )));
            }
            out.push(GraphEdge {
                ends: (index[a], index[b]),
                angle: self.edges[e].angle,
            });
        }
        Ok(AngledGraph {
            vertex_count: vertices.len(),
            edges: out,
            vertex_labels: vertices.iter().map(|&v| self.vertex_labels[v]).collect(),
            edge_labels: edges.iter().map(|&e| self.edge_labels[e]).collect(),
        })
    }
}

/// The `(p, q, r)` data of a complex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PqrReport {
    pub p: Count,
    pub q: Count,
    pub r: usize,
    pub max_boundary: usize,
    pub corollary_case: Option<u8>,
}

/// Minimum boundary length, minimum link girth, maximum edge multiplicity,
/// and the first negative-curvature corollary case that applies.
pub fn classify_pqr(x: &TwoComplex) -> PqrReport {
    if x.face_count() == 0 {
        return PqrReport {
            p: Count::Infinite,
            q: Count::Infinite,
            r: 0,
            max_boundary: 0,
            corollary_case: None,
        };
    }
    let p = x.faces().iter().map(Face::len).min().unwrap();
    let max_boundary = x.faces().iter().map(Face::len).max().unwrap();
    let q = (0..x.vertex_count())
        .map(|v| x.link(v).expect("vertex exists").girth())
        .min()
        .unwrap_or(Count::Infinite);
    let r = x.edge_multiplicities().into_iter().max().unwrap_or(0);
    PqrReport {
        p: Count::Finite(p),
        q,
        r,
        max_boundary,
        corollary_case: corollary_case(p, q, r),
    }
}

fn corollary_case(p: usize, q: Count, r: usize) -> Option<u8> {
    let cases = [(7, 3, 3), (5, 4, 2), (4, 5, 1)];
    cases
        .iter()
        .position(|&(min_p, min_q, slack)| p >= min_p && q.at_least(min_q) && r + slack <= p)
        .map(|i| i as u8 + 1)
}

/// Whether the link of `v` contains an embedded cycle.
pub fn is_internal_vertex(x: &TwoComplex, v: usize) -> Result<bool> {
    Ok(x.link(v)?.girth().is_finite())
}

/// Angles of a Euclidean `n`-gon: `(n - 2) / n` at every corner.
pub fn euclidean_angles(n: usize) -> Vec<Rational> {
    vec![frac(n as i128 - 2, n as i128); n]
}

#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut y = x;
        while self.parent[y] != root {
            let next = self.parent[y];
            self.parent[y] = root;
            y = next;
        }
        root
    }

    /// Keeps the smaller root.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[drop] = keep;
        true
    }

    /// Dense labels ordered by smallest member.
    pub(crate) fn labels(&mut self) -> (usize, Vec<usize>) {
        let n = self.parent.len();
        let mut label = vec![usize::MAX; n];
        let mut out = vec![0; n];
        let mut next = 0;
        for x in 0..n {
            let r = self.find(x);
            if label[r] == usize::MAX {
                label[r] = next;
                next += 1;
            }
            out[x] = label[r];
        }
        (next, out)
    }
}
