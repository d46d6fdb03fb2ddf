//! Curvature of angled graphs, regular sections, and sectional curvature
//! certificates for complexes and group actions.

use std::collections::{BTreeSet, HashMap};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::{AngledGraph, TwoComplex};
use crate::error::{Error, Result};
use crate::group::FiniteGroup;
use crate::orbihedron::{face_curvature, GroupAction, Orbihedron};
use crate::rational::{int, Rational};

/// A permutation of the vertices and edges of a graph.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphPerm {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl GraphPerm {
    pub fn identity(g: &AngledGraph) -> Self {
        GraphPerm {
            vertices: (0..g.vertex_count()).collect(),
            edges: (0..g.edge_count()).collect(),
        }
    }

    pub fn compose(&self, other: &GraphPerm) -> GraphPerm {
        GraphPerm {
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
            edges: other.edges.iter().map(|&e| self.edges[e]).collect(),
        }
    }
}

/// A finite group acting on an angled graph, stored as its list of elements.
///
/// The list may contain repeated permutations when the action is not
/// faithful; every count below is taken with multiplicity, so `order` is the
/// order of the acting group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphAction {
    elements: Vec<GraphPerm>,
}

impl GraphAction {
    pub fn trivial(g: &AngledGraph) -> Self {
        GraphAction {
            elements: vec![GraphPerm::identity(g)],
        }
    }

    pub fn from_elements(g: &AngledGraph, elements: Vec<GraphPerm>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidAction("a group has at least one element".into()));
        }
        for (i, p) in elements.iter().enumerate() {
            check_graph_perm(g, p).map_err(|msg| Error::InvalidAction(format!("element {i}: {msg}")))?;
        }
        Ok(GraphAction { elements })
    }

    pub fn from_generators(g: &AngledGraph, generators: &[GraphPerm], cap: usize) -> Result<Self> {
        for (i, p) in generators.iter().enumerate() {
            check_graph_perm(g, p).map_err(|msg| Error::InvalidAction(format!("generator {i}: {msg}")))?;
        }
        let group = FiniteGroup::generate(GraphPerm::identity(g), generators, GraphPerm::compose, cap)?;
        Ok(GraphAction {
            elements: group.elements().to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[GraphPerm] {
        &self.elements
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.iter().all(|p| {
            p.vertices.iter().enumerate().all(|(i, &j)| i == j)
                && p.edges.iter().enumerate().all(|(i, &j)| i == j)
        })
    }

    fn orbit_labels(&self, n: usize, image: impl Fn(&GraphPerm, usize) -> usize) -> Vec<usize> {
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for c in 0..n {
            if label[c] == usize::MAX {
                for p in &self.elements {
                    label[image(p, c)] = next;
                }
                next += 1;
            }
        }
        label
    }

    pub fn vertex_orbits(&self, g: &AngledGraph) -> Vec<usize> {
        self.orbit_labels(g.vertex_count(), |p, v| p.vertices[v])
    }

    pub fn edge_orbits(&self, g: &AngledGraph) -> Vec<usize> {
        self.orbit_labels(g.edge_count(), |p, e| p.edges[e])
    }

    fn vertex_stabilizer_order(&self, v: usize) -> usize {
        self.elements.iter().filter(|p| p.vertices[v] == v).count()
    }

    fn edge_stabilizer_order(&self, e: usize) -> usize {
        self.elements.iter().filter(|p| p.edges[e] == e).count()
    }

    fn preserves(&self, vertices: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> bool {
        self.elements.iter().all(|p| {
            vertices.iter().all(|&v| vertices.contains(&p.vertices[v]))
                && edges.iter().all(|&e| edges.contains(&p.edges[e]))
        })
    }
}

fn check_graph_perm(g: &AngledGraph, p: &GraphPerm) -> std::result::Result<(), String> {
    let is_perm = |images: &[usize], n: usize| {
        images.len() == n && {
            let mut seen = vec![false; n];
            images.iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
        }
    };
    if !is_perm(&p.vertices, g.vertex_count()) || !is_perm(&p.edges, g.edge_count()) {
        return Err("not a permutation of the graph cells".into());
    }
    for (e, edge) in g.edges().iter().enumerate() {
        let image = &g.edges()[p.edges[e]];
        let (a, b) = (p.vertices[edge.ends.0], p.vertices[edge.ends.1]);
        let (c, d) = image.ends;
        if !((a, b) == (c, d) || (a, b) == (d, c)) {
            return Err(format!("edge {e} is not mapped compatibly with its endpoints"));
        }
        if edge.angle != image.angle {
            return Err(format!("edge {e} is mapped to an edge with a different angle"));
        }
    }
    Ok(())
}

/// A subgraph of an angled graph together with its structural flags.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Section {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub spurless: bool,
    pub connected: bool,
    pub edgeless: bool,
    pub regular: bool,
}

impl Section {
    pub fn new(g: &AngledGraph, vertices: &[usize], edges: &[usize]) -> Result<Section> {
        let vset: BTreeSet<usize> = vertices.iter().copied().collect();
        let eset: BTreeSet<usize> = edges.iter().copied().collect();
        if let Some(&v) = vset.iter().find(|&&v| v >= g.vertex_count()) {
            return Err(Error::UnknownVertex(v));
        }
        if let Some(&e) = eset.iter().find(|&&e| e >= g.edge_count()) {
            return Err(Error::UnknownEdge(e));
        }
        for &e in &eset {
            let (a, b) = g.edges()[e].ends;
            if !vset.contains(&a) || !vset.contains(&b) {
                return Err(Error::Precondition(format!(
                    "edge {e} is in the section but an endpoint is not"
                )));
            }
        }
        let mut degree: HashMap<usize, usize> = vset.iter().map(|&v| (v, 0)).collect();
        for &e in &eset {
            let (a, b) = g.edges()[e].ends;
            *degree.get_mut(&a).unwrap() += 1;
            *degree.get_mut(&b).unwrap() += 1;
        }
        let spurless = degree.values().all(|&d| d != 1);
        let connected = is_connected(g, &vset, &eset);
        let edgeless = eset.is_empty();
        Ok(Section {
            vertices: vset.into_iter().collect(),
            edges: eset.into_iter().collect(),
            spurless,
            connected,
            edgeless,
            regular: spurless && connected && !edgeless,
        })
    }

    /// The subgraph spanned by `edges` and their endpoints.
    pub fn from_edges(g: &AngledGraph, edges: &[usize]) -> Result<Section> {
        let mut vertices = Vec::new();
        for &e in edges {
            if e >= g.edge_count() {
                return Err(Error::UnknownEdge(e));
            }
            let (a, b) = g.edges()[e].ends;
            vertices.extend([a, b]);
        }
        Section::new(g, &vertices, edges)
    }

    pub fn whole(g: &AngledGraph) -> Section {
        let vertices: Vec<usize> = (0..g.vertex_count()).collect();
        let edges: Vec<usize> = (0..g.edge_count()).collect();
        Section::new(g, &vertices, &edges).expect("the whole graph is a section")
    }
}

fn is_connected(g: &AngledGraph, vertices: &BTreeSet<usize>, edges: &BTreeSet<usize>) -> bool {
    let Some(&start) = vertices.iter().next() else {
        return true;
    };
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &e in edges {
        let (a, b) = g.edges()[e].ends;
        adjacency.entry(a).or_default().push(b);
        adjacency.entry(b).or_default().push(a);
    }
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in adjacency.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == vertices.len()
}

/// `W(K, Γ) = 2/|K| − Σ_{vertex orbits} 1/|K_v| + Σ_{edge orbits} (1 − ∠e)/|K_e|`.
pub fn graph_curvature(g: &AngledGraph, k: &GraphAction) -> Result<Rational> {
    section_curvature(g, k, &Section::whole(g))
}

/// Curvature of a `K`-invariant subgraph under the restricted action.
pub fn section_curvature(g: &AngledGraph, k: &GraphAction, s: &Section) -> Result<Rational> {
    let vset: BTreeSet<usize> = s.vertices.iter().copied().collect();
    let eset: BTreeSet<usize> = s.edges.iter().copied().collect();
    if !k.preserves(&vset, &eset) {
        return Err(Error::Precondition("section is not invariant under the action".into()));
    }
    let order = k.order() as i128;
    let vlabel = k.vertex_orbits(g);
    let elabel = k.edge_orbits(g);
    let mut w = Rational::new(2, order);
    let mut seen = BTreeSet::new();
    for &v in &vset {
        if seen.insert(vlabel[v]) {
            w -= Rational::new(1, k.vertex_stabilizer_order(v) as i128);
        }
    }
    let mut seen = BTreeSet::new();
    for &e in &eset {
        if seen.insert(elabel[e]) {
            let angle = g.angle(e)?;
            w += (Rational::one() - angle) / int(k.edge_stabilizer_order(e) as i128);
        }
    }
    Ok(w)
}

/// Groups of edges chosen together: the edge orbits of the action.
fn edge_blocks(g: &AngledGraph, h: &GraphAction) -> Vec<Vec<usize>> {
    let labels = h.edge_orbits(g);
    let count = labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut blocks = vec![Vec::new(); count];
    for (e, &l) in labels.iter().enumerate() {
        blocks[l].push(e);
    }
    blocks
}

/// Every `H`-invariant regular section of `g`, in canonical order (by edge list).
pub fn enumerate_regular_sections(g: &AngledGraph, h: &GraphAction) -> Vec<Section> {
    let blocks = edge_blocks(g, h);
    // degree contribution of each block, and the last block touching each vertex
    let mut last_block = vec![None; g.vertex_count()];
    for (i, block) in blocks.iter().enumerate() {
        for &e in block {
            let (a, b) = g.edges()[e].ends;
            last_block[a] = Some(i);
            last_block[b] = Some(i);
        }
    }
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
    for (v, last) in last_block.iter().enumerate() {
        if let Some(i) = last {
            closing[*i].push(v);
        }
    }
    let mut found = Vec::new();
    let mut degree = vec![0usize; g.vertex_count()];
    let mut chosen = Vec::new();
    search_blocks(g, &blocks, &closing, 0, &mut degree, &mut chosen, &mut found);
    let mut sections: Vec<Section> = found
        .into_iter()
        .map(|edges| Section::from_edges(g, &edges).expect("edges are valid"))
        .filter(|s| s.regular)
        .collect();
    sections.sort_by(|a, b| a.edges.cmp(&b.edges));
    sections
}

fn search_blocks(
    g: &AngledGraph,
    blocks: &[Vec<usize>],
    closing: &[Vec<usize>],
    i: usize,
    degree: &mut Vec<usize>,
    chosen: &mut Vec<usize>,
    found: &mut Vec<Vec<usize>>,
) {
    if i == blocks.len() {
        if !chosen.is_empty() {
            let mut edges = chosen.clone();
            edges.sort_unstable();
            found.push(edges);
        }
        return;
    }
    for include in [false, true] {
        if include {
            for &e in &blocks[i] {
                let (a, b) = g.edges()[e].ends;
                degree[a] += 1;
                degree[b] += 1;
                chosen.push(e);
            }
        }
        // a vertex whose incident edges are all decided must not be a spur
        if closing[i].iter().all(|&v| degree[v] != 1) {
            search_blocks(g, blocks, closing, i + 1, degree, chosen, found);
        }
        if include {
            for &e in &blocks[i] {
                let (a, b) = g.edges()[e].ends;
                degree[a] -= 1;
                degree[b] -= 1;
                chosen.pop();
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Certified,
    Violated,
    /// Certified because no link admits a regular section.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Section {
        vertex: usize,
        /// Element indices of the subgroup, when certifying an action.
        subgroup: Option<Vec<usize>>,
        section: Section,
        #[serde(with = "crate::rational::serde_rational")]
        curvature: Rational,
    },
    Face {
        face: usize,
        #[serde(with = "crate::rational::serde_rational")]
        curvature: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub outcome: Outcome,
    #[serde(with = "crate::rational::serde_rational")]
    pub alpha: Rational,
    pub violation: Option<Violation>,
    /// Largest regular-section curvature at each vertex, if it has any.
    #[serde(serialize_with = "serialize_opt_vec")]
    pub vertex_maxima: Vec<Option<Rational>>,
}

fn serialize_opt_vec<S: serde::Serializer>(
    values: &[Option<Rational>],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use crate::rational::format_rational;
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&v.as_ref().map(format_rational))?;
    }
    seq.end()
}

impl Certificate {
    pub fn is_certified(&self) -> bool {
        self.outcome != Outcome::Violated
    }
}

fn finish_certificate(
    x: &TwoComplex,
    alpha: Rational,
    mut violation: Option<Violation>,
    vertex_maxima: Vec<Option<Rational>>,
) -> Certificate {
    if violation.is_none() {
        let trivial = Orbihedron::trivial(x);
        for f in 0..x.face_count() {
            let k = face_curvature(&trivial, f).expect("face exists");
            if k > Rational::zero() {
                violation = Some(Violation::Face { face: f, curvature: k });
                break;
            }
        }
    }
    let outcome = if violation.is_some() {
        Outcome::Violated
    } else if vertex_maxima.iter().all(Option::is_none) {
        Outcome::Vacuous
    } else {
        Outcome::Certified
    };
    Certificate {
        outcome,
        alpha,
        violation,
        vertex_maxima,
    }
}

/// Sectional curvature `≤ α`: every regular section of every link has
/// curvature at most `α` and no face has positive curvature.
pub fn certify_sectional(x: &TwoComplex, alpha: Rational) -> Result<Certificate> {
    let mut violation = None;
    let mut maxima = Vec::with_capacity(x.vertex_count());
    for v in 0..x.vertex_count() {
        let link = x.link(v)?;
        let trivial = GraphAction::trivial(&link);
        let mut best: Option<Rational> = None;
        for s in enumerate_regular_sections(&link, &trivial) {
            let w = section_curvature(&link, &trivial, &s)?;
            if violation.is_none() && w > alpha {
                violation = Some(Violation::Section {
                    vertex: v,
                    subgroup: None,
                    section: s,
                    curvature: w,
                });
            }
            best = Some(best.map_or(w, |b| b.max(w)));
        }
        maxima.push(best);
    }
    Ok(finish_certificate(x, alpha, violation, maxima))
}

/// The action of the elements `indices` of `a` on the link of `v`; each must fix `v`.
pub fn link_action(a: &GroupAction, v: usize, indices: &[usize]) -> Result<(AngledGraph, GraphAction)> {
    let x = a.carrier();
    let link = x.link(v)?;
    let vindex: HashMap<_, _> = link
        .vertex_labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.expect("link vertices are labelled"), i))
        .collect();
    let eindex: HashMap<_, _> = link
        .edge_labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.expect("link edges are labelled"), i))
        .collect();
    let mut elements = Vec::with_capacity(indices.len());
    for &i in indices {
        let g = &a.elements()[i];
        if g.vertices[v] != v {
            return Err(Error::Precondition(format!("element {i} does not fix vertex {v}")));
        }
        let vertices = link
            .vertex_labels()
            .iter()
            .map(|l| vindex[&g.end(l.unwrap())])
            .collect();
        let edges = link
            .edge_labels()
            .iter()
            .map(|l| eindex[&g.corner(x, l.unwrap())])
            .collect();
        elements.push(GraphPerm { vertices, edges });
    }
    let action = GraphAction::from_elements(&link, elements)?;
    Ok((link, action))
}

/// Generalized sectional curvature `≤ α`: for every vertex `x` and every
/// subgroup `H ≤ G_x`, every regular `H`-section of the link has
/// `W(H, ·) ≤ α`; faces as in [`certify_sectional`].
pub fn certify_generalized(a: &GroupAction, alpha: Rational) -> Result<Certificate> {
    let x = a.carrier();
    let mut violation = None;
    let mut maxima = Vec::with_capacity(x.vertex_count());
    for v in 0..x.vertex_count() {
        let stabilizer = a.vertex_stabilizer(v);
        let mut best: Option<Rational> = None;
        for h in a.group().subgroups_within(&stabilizer) {
            let (link, action) = link_action(a, v, &h.elements)?;
            for s in enumerate_regular_sections(&link, &action) {
                let w = section_curvature(&link, &action, &s)?;
                if violation.is_none() && w > alpha {
                    violation = Some(Violation::Section {
                        vertex: v,
                        subgroup: Some(h.elements.clone()),
                        section: s,
                        curvature: w,
                    });
                }
                best = Some(best.map_or(w, |b| b.max(w)));
            }
        }
        maxima.push(best);
    }
    Ok(finish_certificate(x, alpha, violation, maxima))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    /// Largest strictly negative section curvature (−1 if there is none).
    #[serde(with = "crate::rational::serde_rational")]
    pub a_neg: Rational,
    /// Largest nonnegative section curvature (0 if there is none).
    #[serde(with = "crate::rational::serde_rational")]
    pub a_pos: Rational,
}

/// Edge-orbit subsets beyond this many orbits are not enumerated.
pub const MAX_BLOCKS: usize = 24;

/// Extremes of `W(H, Δ)` over all vertices `x`, subgroups `H ≤ G_x`, and
/// nonempty `H`-invariant subgraphs `Δ` of the link (spurs allowed).
pub fn curvature_bounds(a: &GroupAction) -> Result<BoundsReport> {
    let x = a.carrier();
    let mut neg: Option<Rational> = None;
    let mut pos: Option<Rational> = None;
    for v in 0..x.vertex_count() {
        for h in a.group().subgroups_within(&a.vertex_stabilizer(v)) {
            let (link, action) = link_action(a, v, &h.elements)?;
            for w in invariant_subgraph_curvatures(&link, &action)? {
                if w < Rational::zero() {
                    neg = Some(neg.map_or(w, |b| b.max(w)));
                } else {
                    pos = Some(pos.map_or(w, |b| b.max(w)));
                }
            }
        }
    }
    Ok(BoundsReport {
        a_neg: neg.unwrap_or(int(-1)),
        a_pos: pos.unwrap_or(int(0)),
    })
}

/// All distinct values `W(H, Δ)` over nonempty `H`-invariant subgraphs `Δ`.
pub fn invariant_subgraph_curvatures(g: &AngledGraph, h: &GraphAction) -> Result<BTreeSet<Rational>> {
    let blocks = edge_blocks(g, h);
    if blocks.len() > MAX_BLOCKS {
        return Err(Error::Precondition(format!(
            "{} edge orbits exceed the enumeration limit of {MAX_BLOCKS}",
            blocks.len()
        )));
    }
    let vlabel = h.vertex_orbits(g);
    let orbit_count = vlabel.iter().map(|&l| l + 1).max().unwrap_or(0);
    let mut orbit_size = vec![0usize; orbit_count];
    for &l in &vlabel {
        orbit_size[l] += 1;
    }
    let order = int(h.order() as i128);
    let mut values = BTreeSet::new();
    for mask in 0u64..(1u64 << blocks.len()) {
        let mut touched = vec![false; orbit_count];
        let mut bend = Rational::zero();
        for (i, block) in blocks.iter().enumerate() {
            if mask >> i & 1 == 1 {
                for &e in block {
                    let (p, q) = g.edges()[e].ends;
                    touched[vlabel[p]] = true;
                    touched[vlabel[q]] = true;
                    bend += Rational::one() - g.angle(e)?;
                }
            }
        }
        let base_vertices: usize = (0..orbit_count).filter(|&o| touched[o]).map(|o| orbit_size[o]).sum();
        // subset sums of the untouched vertex orbits
        let mut sums = BTreeSet::from([0usize]);
        for o in (0..orbit_count).filter(|&o| !touched[o]) {
            let shifted: Vec<usize> = sums.iter().map(|s| s + orbit_size[o]).collect();
            sums.extend(shifted);
        }
        for extra in sums {
            if mask == 0 && extra == 0 {
                continue;
            }
            let w = (int(2) - int((base_vertices + extra) as i128) + bend) / order;
            values.insert(w);
        }
    }
    Ok(values)
}

/// `(2χ − a_pos·n_pos) / a_neg`, the bound on the number of negatively curved orbits.
pub fn negative_orbit_bound(chi: Rational, a_pos: Rational, n_pos: usize, a_neg: Rational) -> Result<Rational> {
    if a_neg >= Rational::zero() {
        return Err(Error::Precondition("a_neg must be negative".into()));
    }
    Ok((int(2) * chi - a_pos * int(n_pos as i128)) / a_neg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Augmentation {
    Nonpositive,
    StrictlyNegative,
    Inapplicable,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AugmentationReport {
    pub outcome: Augmentation,
    /// Angle distance between the endpoints; `None` when they are not connected.
    #[serde(with = "crate::rational::serde_rational_opt")]
    pub distance: Option<Rational>,
}

/// Shortest-path distance with edge length equal to the angle.
pub fn angle_distance(g: &AngledGraph, a: usize, b: usize) -> Result<Option<Rational>> {
    for v in [a, b] {
        if v >= g.vertex_count() {
            return Err(Error::UnknownVertex(v));
        }
    }
    let mut dist: Vec<Option<Rational>> = vec![None; g.vertex_count()];
    let mut done = vec![false; g.vertex_count()];
    dist[a] = Some(Rational::zero());
    loop {
        let next = (0..g.vertex_count())
            .filter(|&v| !done[v] && dist[v].is_some())
            .min_by_key(|&v| dist[v].unwrap());
        let Some(u) = next else { break };
        done[u] = true;
        let du = dist[u].unwrap();
        for (e, edge) in g.edges().iter().enumerate() {
            let (p, q) = edge.ends;
            let other = if p == u {
                q
            } else if q == u {
                p
            } else {
                continue;
            };
            let candidate = du + g.angle(e)?;
            if dist[other].is_none_or(|d| candidate < d) {
                dist[other] = Some(candidate);
            }
        }
    }
    Ok(dist[b])
}

/// Whether adding an edge of angle `theta` between `a` and `b` keeps the
/// sectional curvature nonpositive or makes it strictly negative.
///
/// The strict conclusion additionally requires `d + θ > 2`: a section made
/// of the new edge and a shortest path has curvature `2 − d − θ`, which the
/// conditions `d > 1`, `θ > 1 + α` alone do not make negative.
pub fn check_edge_augmentation(
    g: &AngledGraph,
    a: usize,
    b: usize,
    theta: Rational,
    alpha: Rational,
) -> Result<AugmentationReport> {
    let distance = angle_distance(g, a, b)?;
    for e in 0..g.edge_count() {
        if g.angle(e)? < Rational::zero() {
            return Err(Error::Precondition(format!("edge {e} has a negative angle")));
        }
    }
    let trivial = GraphAction::trivial(g);
    for s in enumerate_regular_sections(g, &trivial) {
        if section_curvature(g, &trivial, &s)? > alpha {
            return Err(Error::Precondition(format!(
                "a regular section has curvature above {alpha}"
            )));
        }
    }
    let one = Rational::one();
    let at_least = |bound: Rational| distance.is_none_or(|d| d >= bound);
    let above = |bound: Rational| distance.is_none_or(|d| d > bound);
    let outcome = if alpha < Rational::zero()
        && above(one)
        && theta > one + alpha
        && distance.is_none_or(|d| d + theta > int(2))
    {
        Augmentation::StrictlyNegative
    } else if alpha <= Rational::zero() && at_least(one) && theta == one {
        Augmentation::Nonpositive
    } else {
        Augmentation::Inapplicable
    };
    Ok(AugmentationReport { outcome, distance })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignWitness {
    SingleVertexFiniteGroup,
    TwoVerticesTrivialAction,
    TwoVerticesSwapped,
    Edgeless,
    ContainsEdge,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignReport {
    pub sign: Sign,
    #[serde(with = "crate::rational::serde_rational")]
    pub curvature: Rational,
    pub witness: SignWitness,
    /// Whether the sign agrees with the structural characterisation of
    /// positive and zero curvature sections.
    pub matches_prediction: bool,
    pub infinite_stabilizer_case: &'static str,
}

/// Sign of `W(H, Δ)` for a nonempty spurless `H`-section, with the structure
/// that explains it.
pub fn classify_section_sign(
    g: &AngledGraph,
    s: &Section,
    h: &GraphAction,
    alpha: Rational,
) -> Result<SignReport> {
    if s.vertices.is_empty() {
        return Err(Error::Precondition("section is empty".into()));
    }
    if !s.spurless {
        return Err(Error::Precondition("section has a spur".into()));
    }
    let w = section_curvature(g, h, s)?;
    let sign = match w.cmp(&Rational::zero()) {
        std::cmp::Ordering::Less => Sign::Negative,
        std::cmp::Ordering::Equal => Sign::Zero,
        std::cmp::Ordering::Greater => Sign::Positive,
    };
    let fixes_all = h
        .elements()
        .iter()
        .all(|p| s.vertices.iter().all(|&v| p.vertices[v] == v));
    let witness = if !s.edgeless {
        SignWitness::ContainsEdge
    } else if s.vertices.len() == 1 {
        SignWitness::SingleVertexFiniteGroup
    } else if s.vertices.len() == 2 && fixes_all {
        SignWitness::TwoVerticesTrivialAction
    } else if s.vertices.len() == 2 {
        SignWitness::TwoVerticesSwapped
    } else {
        SignWitness::Edgeless
    };
    let predicted_positive = witness == SignWitness::SingleVertexFiniteGroup;
    let mut matches_prediction = (sign == Sign::Positive) == predicted_positive;
    if alpha < Rational::zero() {
        let predicted_zero = witness == SignWitness::TwoVerticesTrivialAction;
        matches_prediction &= (sign == Sign::Zero) == predicted_zero;
    }
    if witness == SignWitness::ContainsEdge {
        matches_prediction &= w <= alpha.max(Rational::zero());
    }
    Ok(SignReport {
        sign,
        curvature: w,
        witness,
        matches_prediction,
        infinite_stabilizer_case: "unreachable for finite actions",
    })
}
