//! Random generators and brute-force oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::BTreeSet;

use angled::complex::{AngledGraph, Corner, Dihedral, Edge, EdgeEnd, Face, Letter, TwoComplex};
use angled::corpus;
use angled::folding::EquivariantMap;
use angled::morphism::{CellMorphism, CellularMap, EdgeImage, FaceImage};
use angled::orbihedron::{GroupAction, Orbihedron};
use angled::quotient::{descend, union_morphism, QuotientBuilder};
use angled::rational::{frac, int};
use angled::sections::{GraphAction, GraphPerm};
use angled::Rational;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const ANGLES: [(i128, i128); 8] = [(0, 1), (1, 4), (1, 3), (1, 2), (2, 3), (3, 4), (1, 1), (5, 4)];

pub fn random_angle(rng: &mut TestRng) -> Rational {
    let (n, d) = *ANGLES.choose(rng).unwrap();
    frac(n, d)
}

/// A uniformly chosen letter leaving `v`, or `None` if `v` has no edges.
fn random_letter_from(rng: &mut TestRng, edges: &[Edge], v: usize) -> Option<(Letter, usize)> {
    let mut options = Vec::new();
    for (e, edge) in edges.iter().enumerate() {
        if edge.init == v {
            options.push((Letter::forward(e), edge.term));
        }
        if edge.term == v {
            options.push((Letter::backward(e), edge.init));
        }
    }
    options.choose(rng).copied()
}

/// A random closed walk of length `len` in the graph `(vertices, edges)`.
pub fn random_closed_walk(rng: &mut TestRng, vertices: usize, edges: &[Edge], len: usize) -> Option<Vec<Letter>> {
    for _ in 0..200 {
        let start = rng.gen_range(0..vertices);
        let mut v = start;
        let mut word = Vec::with_capacity(len);
        for _ in 0..len {
            let Some((l, w)) = random_letter_from(rng, edges, v) else { break };
            word.push(l);
            v = w;
        }
        if word.len() == len && v == start {
            return Some(word);
        }
    }
    None
}

/// A random valid complex with at most `max_vertices` vertices.
pub fn random_complex(rng: &mut TestRng, max_vertices: usize, max_edges: usize, max_faces: usize) -> TwoComplex {
    let vertices = rng.gen_range(1..=max_vertices);
    let edge_count = rng.gen_range(0..=max_edges);
    let edges: Vec<Edge> = (0..edge_count)
        .map(|_| Edge {
            init: rng.gen_range(0..vertices),
            term: rng.gen_range(0..vertices),
        })
        .collect();
    let mut faces = Vec::new();
    if !edges.is_empty() {
        for _ in 0..rng.gen_range(0..=max_faces) {
            let len = rng.gen_range(1..=6);
            if let Some(word) = random_closed_walk(rng, vertices, &edges, len) {
                let angles = (0..len).map(|_| random_angle(rng)).collect();
                faces.push(Face { word, angles });
            }
        }
    }
    TwoComplex::new(vertices, edges, faces).expect("generated complex is valid")
}

/// A random complex with random stabilizer weights `1/k`.
pub fn random_weighted(rng: &mut TestRng) -> Orbihedron {
    let x = random_complex(rng, 5, 8, 5);
    let mut weights = |n: usize| -> Vec<Rational> { (0..n).map(|_| frac(1, rng.gen_range(1..=6))).collect() };
    let (v, e, f) = x.counts();
    let (wv, we, wf) = (weights(v), weights(e), weights(f));
    Orbihedron::new(x, wv, we, wf).expect("weights are reciprocals of positive integers")
}

/// A random angled multigraph, loops allowed.
pub fn random_multigraph(rng: &mut TestRng, max_vertices: usize, max_edges: usize) -> AngledGraph {
    let vertices = rng.gen_range(1..=max_vertices);
    let edges: Vec<(usize, usize, Rational)> = (0..rng.gen_range(0..=max_edges))
        .map(|_| (rng.gen_range(0..vertices), rng.gen_range(0..vertices), random_angle(rng)))
        .collect();
    AngledGraph::angled(vertices, &edges).unwrap()
}

/// Elements `(a, c)` of the cyclic group `ℤ/n` (`c = 0`) or the dihedral group
/// `D_n`, acting on a point set built from orbit types.
#[derive(Debug, Clone)]
pub struct SmallGroup {
    pub n: usize,
    pub dihedral: bool,
}

#[derive(Debug, Clone, Copy)]
pub enum OrbitType {
    /// The regular orbit.
    Free,
    /// `ℤ/n` acting on `ℤ/d` for a divisor `d`, or `D_n` on polygon vertices.
    Vertices(usize),
    /// `D_n` on polygon edge midpoints.
    Midpoints,
    Fixed,
}

impl SmallGroup {
    pub fn elements(&self) -> Vec<(usize, bool)> {
        let flips: &[bool] = if self.dihedral { &[false, true] } else { &[false] };
        flips
            .iter()
            .flat_map(|&c| (0..self.n).map(move |a| (a, c)))
            .collect()
    }

    fn rotate(&self, (a, c): (usize, bool), i: usize, m: usize) -> usize {
        if c {
            (a + m * self.n - i) % m
        } else {
            (a + i) % m
        }
    }

    pub fn orbit_size(&self, t: OrbitType) -> usize {
        match t {
            OrbitType::Free => self.n * if self.dihedral { 2 } else { 1 },
            OrbitType::Vertices(d) => d,
            OrbitType::Midpoints => self.n,
            OrbitType::Fixed => 1,
        }
    }

    pub fn act(&self, g: (usize, bool), t: OrbitType, i: usize) -> usize {
        let n = self.n;
        match t {
            OrbitType::Free => {
                let (p, b) = (i % n, i / n == 1);
                self.rotate(g, p, n) + n * usize::from(b != g.1)
            }
            OrbitType::Vertices(d) => self.rotate(g, i, d),
            OrbitType::Midpoints => {
                if g.1 {
                    (g.0 + 2 * n - i - 1) % n
                } else {
                    (g.0 + i) % n
                }
            }
            OrbitType::Fixed => 0,
        }
    }

    pub fn orbit_types(&self, rng: &mut TestRng) -> OrbitType {
        if self.dihedral {
            *[OrbitType::Free, OrbitType::Vertices(self.n), OrbitType::Midpoints, OrbitType::Fixed]
                .choose(rng)
                .unwrap()
        } else {
            let divisors: Vec<usize> = (1..=self.n).filter(|d| self.n.is_multiple_of(*d)).collect();
            if rng.gen_bool(0.2) {
                OrbitType::Free
            } else {
                OrbitType::Vertices(*divisors.choose(rng).unwrap())
            }
        }
    }
}

/// A random graph with an action of a random small cyclic or dihedral group,
/// given as the full element list.
pub fn random_graph_action(rng: &mut TestRng) -> (AngledGraph, GraphAction, usize) {
    let group = SmallGroup {
        n: rng.gen_range(1..=4),
        dihedral: rng.gen_bool(0.5),
    };
    let elements = group.elements();
    let mut offsets = Vec::new();
    let mut vertex_count = 0;
    for _ in 0..rng.gen_range(1..=3) {
        let t = group.orbit_types(rng);
        offsets.push((t, vertex_count));
        vertex_count += group.orbit_size(t);
    }
    let image = |g: (usize, bool), v: usize| -> usize {
        let &(t, off) = offsets.iter().rev().find(|&&(_, off)| off <= v).unwrap();
        off + group.act(g, t, v - off)
    };
    let mut edges: Vec<(usize, usize, Rational)> = Vec::new();
    let mut orbit_of_edge = Vec::new();
    for orbit in 0..rng.gen_range(0..=3) {
        let (u, v) = (rng.gen_range(0..vertex_count), rng.gen_range(0..vertex_count));
        let angle = random_angle(rng);
        let mut seen = BTreeSet::new();
        for &g in &elements {
            let (a, b) = (image(g, u), image(g, v));
            if seen.insert((a.min(b), a.max(b))) {
                edges.push((a, b, angle));
                orbit_of_edge.push(orbit);
            }
        }
    }
    let graph = AngledGraph::angled(vertex_count, &edges).unwrap();
    let perms = elements
        .iter()
        .map(|&g| {
            let vertices: Vec<usize> = (0..vertex_count).map(|v| image(g, v)).collect();
            let edge_images = edges
                .iter()
                .enumerate()
                .map(|(e, &(a, b, _))| {
                    let (ga, gb) = (vertices[a], vertices[b]);
                    (0..edges.len())
                        .find(|&f| {
                            orbit_of_edge[f] == orbit_of_edge[e]
                                && (edges[f].0, edges[f].1) == (ga, gb)
                                || orbit_of_edge[f] == orbit_of_edge[e] && (edges[f].1, edges[f].0) == (ga, gb)
                        })
                        .expect("edge orbits are closed")
                })
                .collect();
            GraphPerm {
                vertices,
                edges: edge_images,
            }
        })
        .collect();
    let order = elements.len();
    let action = GraphAction::from_elements(&graph, perms).expect("generated action is valid");
    (graph, action, order)
}

/// Targets with their group actions, each with at most 30 cells.
pub fn fold_targets() -> Vec<(String, GroupAction)> {
    let mut out = Vec::new();
    let trivial = |name: &str, x: TwoComplex| (name.to_string(), GroupAction::trivial(&x));
    out.push(trivial("torus", corpus::torus()));
    out.push(trivial("tetrahedron", corpus::tetrahedron()));
    out.push(trivial("genus-two", corpus::genus_two(frac(1, 2))));
    out.push(trivial("square", corpus::polygon_disk(4)));
    for n in 2..=5 {
        let (x, gens) = corpus::fan_rotation(n);
        out.push((format!("fan-rotation-{n}"), GroupAction::with_default_cap(x, gens).unwrap()));
    }
    for n in [4, 6] {
        let x = corpus::cone_fan(n);
        let gens = vec![corpus::fan_reflection_generator(n)];
        out.push((format!("fan-reflection-{n}"), GroupAction::with_default_cap(x, gens).unwrap()));
    }
    let (x, gens) = corpus::torus_grid(2, 2);
    out.push(("torus-grid".into(), GroupAction::with_default_cap(x, gens).unwrap()));
    out
}

/// Simply connected targets, each with its action.
pub fn simply_connected_targets() -> Vec<(String, GroupAction)> {
    let mut out = Vec::new();
    out.push(("tetrahedron".into(), GroupAction::trivial(&corpus::tetrahedron())));
    out.push(("square-grid-2".into(), GroupAction::trivial(&corpus::square_grid(2))));
    for n in 3..=5 {
        out.push((format!("cone-fan-{n}"), GroupAction::trivial(&corpus::cone_fan(n))));
        let (x, gens) = corpus::fan_rotation(n);
        out.push((format!("fan-rotation-{n}"), GroupAction::with_default_cap(x, gens).unwrap()));
    }
    let x = corpus::cone_fan(4);
    let gens = vec![corpus::fan_reflection_generator(4)];
    out.push(("fan-reflection-4".into(), GroupAction::with_default_cap(x, gens).unwrap()));
    out
}

/// A copy of face `f` of `x` mapped onto it through `align`.
pub fn face_piece(x: &TwoComplex, f: usize, align: Dihedral) -> (TwoComplex, CellMorphism) {
    let face = x.face(f);
    let n = face.len();
    let letters: Vec<Letter> = (0..n).map(|j| align.image_letter(&face.word, j)).collect();
    let edges = (0..n).map(|j| Edge { init: j, term: (j + 1) % n }).collect();
    let angles = (0..n)
        .map(|i| {
            x.corner_angle(Corner {
                face: f,
                position: align.corner(i, n),
            })
        })
        .collect();
    let word = (0..n).map(Letter::forward).collect();
    let piece = TwoComplex::new(n, edges, vec![Face { word, angles }]).unwrap();
    let m = CellMorphism {
        vertices: letters.iter().map(|&l| x.start(l)).collect(),
        edges: letters
            .iter()
            .map(|l| EdgeImage {
                edge: l.edge,
                reversed: l.inverse,
            })
            .collect(),
        faces: vec![FaceImage { face: f, align }],
    };
    m.check(&piece, x).expect("face piece maps onto its face");
    (piece, m)
}

/// A single edge mapped onto edge `e` of `x`.
pub fn edge_piece(x: &TwoComplex, e: usize, reversed: bool) -> (TwoComplex, CellMorphism) {
    let edge = x.edge(e);
    let (a, b) = if reversed { (edge.term, edge.init) } else { (edge.init, edge.term) };
    let piece = TwoComplex::graph(2, vec![(0, 1)]).unwrap();
    let m = CellMorphism {
        vertices: vec![a, b],
        edges: vec![EdgeImage { edge: e, reversed }],
        faces: vec![],
    };
    (piece, m)
}

pub fn vertex_piece(v: usize) -> (TwoComplex, CellMorphism) {
    (
        TwoComplex::graph(1, vec![]).unwrap(),
        CellMorphism {
            vertices: vec![v],
            edges: vec![],
            faces: vec![],
        },
    )
}

fn union_pieces(pieces: &[(TwoComplex, CellMorphism)]) -> (TwoComplex, CellMorphism) {
    let mut complex = TwoComplex::empty();
    let mut m = CellMorphism {
        vertices: vec![],
        edges: vec![],
        faces: vec![],
    };
    for (p, pm) in pieces {
        complex = complex.disjoint_union(p);
        m = union_morphism(&m, pm);
    }
    (complex, m)
}

/// Permutes the copies of a `copies`-fold disjoint union.
fn copy_permutation(piece: &TwoComplex, copies: usize, perm: impl Fn(usize) -> usize) -> CellMorphism {
    let (nv, ne, nf) = piece.counts();
    let mut m = CellMorphism {
        vertices: vec![],
        edges: vec![],
        faces: vec![],
    };
    for h in 0..copies {
        let k = perm(h);
        m.vertices.extend((0..nv).map(|v| k * nv + v));
        m.edges.extend((0..ne).map(|e| EdgeImage {
            edge: k * ne + e,
            reversed: false,
        }));
        m.faces.extend((0..nf).map(|f| FaceImage {
            face: k * nf + f,
            align: Dihedral::IDENTITY,
        }));
    }
    m
}

#[derive(Debug, Clone, Copy)]
pub struct MapOptions {
    pub max_cells: usize,
    pub bare_vertices: bool,
    pub faces: bool,
}

impl Default for MapOptions {
    fn default() -> Self {
        MapOptions {
            max_cells: 30,
            bare_vertices: true,
            faces: true,
        }
    }
}

/// A random equivariant map into `target`: `|G|` copies of random pieces of
/// the target, glued along random equivariant identifications of cells with
/// equal images. Returns `None` when the gluing is inconsistent.
pub fn random_equivariant_map(rng: &mut TestRng, target: &GroupAction, opts: MapOptions) -> Option<EquivariantMap> {
    let x = target.carrier();
    let order = target.order();
    let budget = opts.max_cells / order;
    let mut pieces = Vec::new();
    let mut used = 0;
    for _ in 0..6 {
        let kind = rng.gen_range(0..3);
        let piece = if kind == 0 && opts.faces && x.face_count() > 0 {
            let f = rng.gen_range(0..x.face_count());
            let n = x.face(f).len();
            face_piece(x, f, Dihedral::new(rng.gen_range(0..n), rng.gen_bool(0.5)))
        } else if kind <= 1 && x.edge_count() > 0 {
            edge_piece(x, rng.gen_range(0..x.edge_count()), rng.gen_bool(0.5))
        } else if opts.bare_vertices {
            vertex_piece(rng.gen_range(0..x.vertex_count()))
        } else {
            continue;
        };
        let cells = piece.0.cell_count();
        if used + cells > budget {
            continue;
        }
        used += cells;
        pieces.push(piece);
    }
    if pieces.is_empty() {
        return None;
    }
    let (piece, p) = union_pieces(&pieces);
    let group = target.group();
    let elements = target.elements();
    let copies: Vec<(TwoComplex, CellMorphism)> = elements
        .iter()
        .map(|t| (piece.clone(), t.after(&p, x)))
        .collect();
    let (w0, m0) = union_pieces(&copies);
    let (nv, ne, nf) = piece.counts();
    if nv == 0 {
        return None;
    }

    let mut builder = QuotientBuilder::new(&w0);
    for _ in 0..rng.gen_range(0..=5) {
        let (h1, h2) = (rng.gen_range(0..order), rng.gen_range(0..order));
        match rng.gen_range(0..3) {
            0 => {
                let c1 = rng.gen_range(0..nv);
                let img = m0.vertices[h1 * nv + c1];
                let same: Vec<usize> = (0..nv).filter(|&c| m0.vertices[h2 * nv + c] == img).collect();
                let Some(&c2) = same.choose(rng) else { continue };
                for g in 0..order {
                    let (a, b) = (group.mul(g, h1) * nv + c1, group.mul(g, h2) * nv + c2);
                    builder.merge_vertices(a, b);
                }
            }
            1 if ne > 0 => {
                let c1 = rng.gen_range(0..ne);
                let img = m0.edges[h1 * ne + c1].edge;
                let same: Vec<usize> = (0..ne).filter(|&c| m0.edges[h2 * ne + c].edge == img).collect();
                let Some(&c2) = same.choose(rng) else { continue };
                for g in 0..order {
                    let (a, b) = (group.mul(g, h1) * ne + c1, group.mul(g, h2) * ne + c2);
                    let flip = m0.edges[a].reversed != m0.edges[b].reversed;
                    builder.merge_edges(a, b, flip).ok()?;
                }
            }
            2 if nf > 0 => {
                let c1 = rng.gen_range(0..nf);
                let img = m0.faces[h1 * nf + c1].face;
                let same: Vec<usize> = (0..nf).filter(|&c| m0.faces[h2 * nf + c].face == img).collect();
                let Some(&c2) = same.choose(rng) else { continue };
                for g in 0..order {
                    let (a, b) = (group.mul(g, h1) * nf + c1, group.mul(g, h2) * nf + c2);
                    let n = w0.face(a).len();
                    let align = m0.faces[a].align.inverse(n).compose(m0.faces[b].align, n);
                    builder.merge_faces(a, b, align).ok()?;
                }
            }
            _ => {}
        }
    }
    let (w, q) = builder.build().ok()?;
    let m = descend(&w0, &w, &q, &m0).ok()?;
    let mut gens = Vec::new();
    for s in target.generators() {
        let k = group.index_of(s).expect("generators are group elements");
        let shift = copy_permutation(&piece, order, |h| group.mul(k, h));
        gens.push(descend(&w0, &w, &q, &q.after(&shift, &w0)).ok()?);
    }
    let source = GroupAction::with_default_cap(w.clone(), gens).ok()?;
    let map = CellularMap::new(w, x.clone(), m).ok()?;
    EquivariantMap::new(map, source, target.clone()).ok()
}

/// Brute-force local injectivity: distinct edge-ends and distinct corners at
/// each vertex have distinct images.
pub fn oracle_is_immersion(source: &TwoComplex, m: &CellMorphism) -> bool {
    let mut ends: BTreeSet<(usize, EdgeEnd)> = BTreeSet::new();
    let mut count = 0;
    for v in 0..source.vertex_count() {
        for end in source.ends_at(v) {
            count += 1;
            ends.insert((v, m.end(end)));
        }
    }
    if ends.len() != count {
        return false;
    }
    let mut corners = BTreeSet::new();
    let mut count = 0;
    for c in source.all_corners() {
        count += 1;
        corners.insert((source.corner_vertex(c), m.corner(source, c)));
    }
    corners.len() == count
}

/// Brute-force regular sections: every nonempty edge subset that is
/// connected, spurless and invariant under every element.
pub fn oracle_regular_sections(g: &AngledGraph, elements: &[GraphPerm]) -> BTreeSet<Vec<usize>> {
    let m = g.edge_count();
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << m) {
        let edges: Vec<usize> = (0..m).filter(|e| mask >> e & 1 == 1).collect();
        let invariant = elements
            .iter()
            .all(|p| edges.iter().all(|&e| mask >> p.edges[e] & 1 == 1));
        if !invariant {
            continue;
        }
        let mut degree = vec![0usize; g.vertex_count()];
        let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
        fn find(p: &mut Vec<usize>, x: usize) -> usize {
            if p[x] != x {
                let r = find(p, p[x]);
                p[x] = r;
            }
            p[x]
        }
        for &e in &edges {
            let (a, b) = g.edges()[e].ends;
            degree[a] += 1;
            degree[b] += 1;
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let touched: Vec<usize> = (0..g.vertex_count()).filter(|&v| degree[v] > 0).collect();
        let spurless = touched.iter().all(|&v| degree[v] != 1);
        let roots: BTreeSet<usize> = touched.iter().map(|&v| find(&mut parent, v)).collect();
        if spurless && roots.len() == 1 {
            out.insert(edges);
        }
    }
    out
}

/// `2 − χ(Δ) − Σ∠`, computed from the raw counts.
pub fn intro_curvature(g: &AngledGraph) -> Rational {
    let angles: Rational = g.edges().iter().map(|e| e.angle.unwrap()).sum();
    int(2) - int(g.vertex_count() as i128) + int(g.edge_count() as i128) - angles
}

/// Generator of the half turn of the `2k`-fan.
pub fn fan_half_turn(n: usize) -> CellMorphism {
    let x = corpus::cone_fan(n);
    let r = corpus::fan_rotation_generator(n);
    let mut g = CellMorphism::identity(&x);
    for _ in 0..n / 2 {
        g = r.after(&g, &x);
    }
    g
}
