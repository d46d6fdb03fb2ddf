//! Essential paths of immersions, collapsing them with disk diagrams, and
//! the resulting core iteration.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::{fold, immersion_invariants, pushout, EquivariantMap, Subcomplex};
use crate::complex::{Letter, TwoComplex};
use crate::diagrams::{find_disk_diagram, DiagramMap, DiagramSearch};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_CAP};
use crate::homology::{betti_1, is_nontrivial_class};
use crate::morphism::{is_immersion, CellMorphism, CellularMap, EdgeImage};
use crate::orbihedron::{orbihedron_from_action, GroupAction};
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PathKind {
    ClosedNotNullhomotopic,
    OpenWithClosedImage,
}

/// Why a closed path is taken to be essential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "by", rename_all = "snake_case")]
pub enum Witness {
    /// Distinct endpoints in the source.
    Endpoints,
    /// A nonzero class in rational first homology.
    Homology,
    /// No disk diagram of area at most `max_area` fills the path.
    BoundedSearch { max_area: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EssentialPath {
    pub start: usize,
    pub path: Vec<Letter>,
    pub kind: PathKind,
    pub witness: Witness,
    /// The image is a closed path visiting no vertex twice.
    pub image_simple: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PathLimits {
    pub max_length: usize,
    pub max_area: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum PathSearch {
    Found(EssentialPath),
    /// The source is simply connected and no two vertices of one component
    /// share an image, so no essential path exists at any length.
    None,
    Unknown { reason: String },
}

fn end_of(y: &TwoComplex, start: usize, path: &[Letter]) -> usize {
    path.last().map_or(start, |&l| y.end(l))
}

/// Free and cyclic reduction of a closed path, moving its base point as needed.
fn cyclic_reduce(y: &TwoComplex, start: usize, path: &[Letter]) -> (usize, Vec<Letter>) {
    let mut stack: Vec<Letter> = Vec::new();
    for &l in path {
        if stack.last() == Some(&l.inv()) {
            stack.pop();
        } else {
            stack.push(l);
        }
    }
    let mut lo = 0;
    let mut hi = stack.len();
    while hi - lo >= 2 && stack[lo] == stack[hi - 1].inv() {
        lo += 1;
        hi -= 1;
    }
    let reduced = stack[lo..hi].to_vec();
    let base = match (lo, reduced.first()) {
        (0, _) => start,
        (_, Some(&l)) => y.start(l),
        (_, None) => y.end(stack[lo - 1]),
    };
    (base, reduced)
}

/// Loops closing each non-tree edge of a breadth-first spanning forest.
pub fn fundamental_loops(y: &TwoComplex) -> Vec<(usize, Vec<Letter>)> {
    let n = y.vertex_count();
    let mut parent: Vec<Option<Letter>> = vec![None; n];
    let mut root = vec![usize::MAX; n];
    let mut tree_edges = BTreeSet::new();
    for r in 0..n {
        if root[r] != usize::MAX {
            continue;
        }
        root[r] = r;
        let mut queue = VecDeque::from([r]);
        while let Some(v) = queue.pop_front() {
            for end in y.ends_at(v) {
                let l = if end.end == crate::complex::End::Init {
                    Letter::forward(end.edge)
                } else {
                    Letter::backward(end.edge)
                };
                let u = y.end(l);
                if root[u] == usize::MAX {
                    root[u] = r;
                    parent[u] = Some(l);
                    tree_edges.insert(end.edge);
                    queue.push_back(u);
                }
            }
        }
    }
    let to_root = |mut v: usize| {
        let mut path = Vec::new();
        while let Some(l) = parent[v] {
            path.push(l.inv());
            v = y.start(l);
        }
        path
    };
    (0..y.edge_count())
        .filter(|e| !tree_edges.contains(e))
        .map(|e| {
            let edge = y.edge(e);
            let mut path: Vec<Letter> = to_root(edge.init).into_iter().rev().map(|l| l.inv()).collect();
            path.push(Letter::forward(e));
            path.extend(to_root(edge.term));
            cyclic_reduce(y, root[edge.init], &path)
        })
        .collect()
}

fn fills(y: &TwoComplex, start: usize, path: &[Letter], max_area: usize) -> Result<bool> {
    Ok(matches!(find_disk_diagram(y, start, path, max_area)?, DiagramSearch::Found(_)))
}

/// Whether `y` is certified simply connected: `H₁ = 0` and every fundamental
/// loop bounds a diagram of area at most `max_area`.
pub fn certify_simply_connected(y: &TwoComplex, max_area: usize) -> Result<bool> {
    if betti_1(y) != 0 {
        return Ok(false);
    }
    for (start, path) in fundamental_loops(y) {
        if !fills(y, start, &path, max_area)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn image_is_simple(psi: &CellMorphism, y: &TwoComplex, start: usize, path: &[Letter]) -> bool {
    let mut seen = HashSet::new();
    let mut v = start;
    for &l in path {
        if !seen.insert(psi.vertices[v]) {
            return false;
        }
        v = y.end(l);
    }
    psi.vertices[v] == psi.vertices[start]
}

/// Shortest essential path of the immersion `psi`, ties broken by start
/// vertex and then letter order.
pub fn find_essential_path(psi: &EquivariantMap, limits: PathLimits) -> Result<PathSearch> {
    let map = psi.map();
    let check = is_immersion(map);
    if !check.holds {
        return Err(Error::NotImmersion(format!("{:?}", check.witness)));
    }
    let y = &map.source;
    let m = &map.morphism;

    let (_, component) = y.vertex_components();
    let mut images = HashSet::new();
    let injective = (0..y.vertex_count()).all(|v| images.insert((component[v], m.vertices[v])));
    if injective && betti_1(y) == 0 {
        let mut certified = true;
        for (start, path) in fundamental_loops(y) {
            if !fills(y, start, &path, limits.max_area)? {
                certified = false;
                break;
            }
        }
        if certified {
            return Ok(PathSearch::None);
        }
    }

    let mut nullhomotopic: HashSet<Vec<Letter>> = HashSet::new();
    for length in 1..=limits.max_length {
        for start in 0..y.vertex_count() {
            let mut path = Vec::with_capacity(length);
            if let Some(found) = search_paths(psi, start, length, &mut path, &mut nullhomotopic, limits.max_area)? {
                return Ok(PathSearch::Found(found));
            }
        }
    }
    Ok(PathSearch::Unknown {
        reason: format!(
            "no essential path of length at most {} and no simple-connectivity certificate within area {}",
            limits.max_length, limits.max_area
        ),
    })
}

fn canonical_cycle(path: &[Letter]) -> Vec<Letter> {
    let n = path.len();
    (0..n)
        .map(|p| (0..n).map(|i| path[(i + p) % n]).collect::<Vec<_>>())
        .min()
        .unwrap_or_default()
}

fn search_paths(
    psi: &EquivariantMap,
    start: usize,
    length: usize,
    path: &mut Vec<Letter>,
    nullhomotopic: &mut HashSet<Vec<Letter>>,
    max_area: usize,
) -> Result<Option<EssentialPath>> {
    let y = &psi.map().source;
    let m = &psi.map().morphism;
    let here = end_of(y, start, path);
    if path.len() == length {
        if m.vertices[here] != m.vertices[start] {
            return Ok(None);
        }
        let simple = image_is_simple(m, y, start, path);
        if here != start {
            return Ok(Some(EssentialPath {
                start,
                path: path.clone(),
                kind: PathKind::OpenWithClosedImage,
                witness: Witness::Endpoints,
                image_simple: simple,
            }));
        }
        // a closed path that is not cyclically reduced has a shorter conjugate
        if path.len() >= 2 && path[0] == path[path.len() - 1].inv() {
            return Ok(None);
        }
        let witness = if is_nontrivial_class(y, path) {
            Witness::Homology
        } else {
            let key = canonical_cycle(path);
            if nullhomotopic.contains(&key) {
                return Ok(None);
            }
            if fills(y, start, path, max_area)? {
                nullhomotopic.insert(key);
                return Ok(None);
            }
            Witness::BoundedSearch { max_area }
        };
        return Ok(Some(EssentialPath {
            start,
            path: path.clone(),
            kind: PathKind::ClosedNotNullhomotopic,
            witness,
            image_simple: simple,
        }));
    }
    let mut letters: Vec<Letter> = y
        .ends_at(here)
        .into_iter()
        .map(|end| {
            if end.end == crate::complex::End::Init {
                Letter::forward(end.edge)
            } else {
                Letter::backward(end.edge)
            }
        })
        .collect();
    letters.sort();
    letters.dedup();
    for l in letters {
        if path.last() == Some(&l.inv()) {
            continue;
        }
        path.push(l);
        let found = search_paths(psi, start, length, path, nullhomotopic, max_area)?;
        path.pop();
        if found.is_some() {
            return Ok(found);
        }
    }
    Ok(None)
}

/// One application of the collapsing construction.
#[derive(Debug, Clone)]
pub struct Collapse {
    pub complex: TwoComplex,
    /// `Y -> Z`
    pub y_to_z: CellMorphism,
    /// `Z -> X`, an immersion
    pub z_to_x: CellMorphism,
    pub action: GroupAction,
    pub diagram: DiagramMap,
    pub bnd_or_isolated_before: usize,
    pub bnd_or_isolated_after: usize,
}

impl Collapse {
    pub fn monotone(&self) -> bool {
        self.bnd_or_isolated_after <= self.bnd_or_isolated_before
    }

    pub fn as_equivariant(&self, target: &GroupAction) -> Result<EquivariantMap> {
        let map = CellularMap::new(self.complex.clone(), target.carrier().clone(), self.z_to_x.clone())?;
        EquivariantMap::new(map, self.action.clone(), target.clone())
    }
}

#[derive(Debug, Clone)]
pub enum CollapseOutcome {
    Collapsed(Box<Collapse>),
    NoDiagram { area_bound: usize },
}

fn permute_copies(
    copy: &TwoComplex,
    copies: usize,
    perm: impl Fn(usize) -> usize,
) -> CellMorphism {
    let (nv, ne, nf) = copy.counts();
    let mut m = CellMorphism {
        vertices: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
    };
    for h in 0..copies {
        let k = perm(h);
        m.vertices.extend((0..nv).map(|v| k * nv + v));
        m.edges.extend((0..ne).map(|e| EdgeImage {
            edge: k * ne + e,
            reversed: false,
        }));
        m.faces.extend((0..nf).map(|f| crate::morphism::FaceImage {
            face: k * nf + f,
            align: crate::complex::Dihedral::IDENTITY,
        }));
    }
    m
}

fn copies_of(x: &TwoComplex, n: usize) -> TwoComplex {
    (0..n).fold(TwoComplex::empty(), |acc, _| acc.disjoint_union(x))
}

/// Attaches a disk diagram along every translate of `p` and folds.
pub fn collapse_essential_path(psi: &EquivariantMap, p: &EssentialPath, area_bound: usize) -> Result<CollapseOutcome> {
    let map = psi.map();
    let (y, x, m) = (&map.source, &map.target, &map.morphism);
    let len = p.path.len();
    if len == 0 {
        return Err(Error::Precondition("essential paths have positive length".into()));
    }
    if y.path_endpoints(&p.path)?.map(|(s, _)| s) != Some(p.start) {
        return Err(Error::InvalidPath("path does not start at its start vertex".into()));
    }
    let image = m.word(&p.path);
    let base = m.vertices[p.start];
    let diagram = match find_disk_diagram(x, base, &image, area_bound)? {
        DiagramSearch::Found(d) => *d,
        DiagramSearch::NoneWithinBound { .. } => return Ok(CollapseOutcome::NoDiagram { area_bound }),
    };
    let d = diagram.diagram.complex();
    let boundary = diagram.diagram.boundary();

    // the group acting diagonally on Y and X
    let pairs: Vec<(CellMorphism, CellMorphism)> = psi
        .source_action()
        .generators()
        .iter()
        .cloned()
        .zip(psi.target_action().generators().iter().cloned())
        .collect();
    let identity = (CellMorphism::identity(y), CellMorphism::identity(x));
    let group = FiniteGroup::generate(
        identity,
        &pairs,
        |a, b| (a.0.after(&b.0, y), a.1.after(&b.1, x)),
        DEFAULT_CAP,
    )?;
    let order = group.order();
    let gen_index: Vec<usize> = pairs.iter().map(|g| group.index_of(g).expect("generator is an element")).collect();

    let closed = p.kind == PathKind::ClosedNotNullhomotopic;
    let circle_edges: Vec<(usize, usize)> = (0..len)
        .map(|i| (i, if closed { (i + 1) % len } else { i + 1 }))
        .collect();
    let circle = TwoComplex::graph(if closed { len } else { len + 1 }, circle_edges)?;
    let c = copies_of(&circle, order);
    let b = copies_of(d, order);

    // C -> Y along the translates of the path
    let mut vertices_along = vec![p.start];
    for &l in &p.path {
        vertices_along.push(y.end(l));
    }
    let mut to_y = CellMorphism {
        vertices: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
    };
    let mut to_b = to_y.clone();
    let (dv, de) = (d.vertex_count(), d.edge_count());
    for (h, (gy, _)) in group.elements().iter().enumerate() {
        for i in 0..circle.vertex_count() {
            to_y.vertices.push(gy.vertices[vertices_along[i]]);
            let dart = boundary[i % len];
            to_b.vertices.push(h * dv + d.start(dart));
        }
        for (i, &l) in p.path.iter().enumerate() {
            let img = gy.letter(l);
            to_y.edges.push(EdgeImage {
                edge: img.edge,
                reversed: img.inverse,
            });
            let dart = boundary[i];
            to_b.edges.push(EdgeImage {
                edge: h * de + dart.edge,
                reversed: dart.inverse,
            });
        }
    }
    let shift = |copy: &TwoComplex| -> Result<Vec<CellMorphism>> {
        Ok(gen_index
            .iter()
            .map(|&k| permute_copies(copy, order, |h| group.mul(k, h)))
            .collect())
    };
    let c_action = GroupAction::new(c.clone(), shift(&circle)?, DEFAULT_CAP)?;
    let b_action = GroupAction::new(b.clone(), shift(d)?, DEFAULT_CAP)?;
    let phi = EquivariantMap::new(CellularMap::new(c.clone(), y.clone(), to_y)?, c_action.clone(), psi.source_action().clone())?;
    let chi = EquivariantMap::new(CellularMap::new(c, b.clone(), to_b)?, c_action, b_action)?;
    let glued = pushout(&phi, &chi)?;

    // B -> X: copy h maps through the translate by h
    let mut b_to_x = CellMorphism {
        vertices: Vec::new(),
        edges: Vec::new(),
        faces: Vec::new(),
    };
    for (_, gx) in group.elements() {
        let moved = gx.after(&diagram.morphism, x);
        b_to_x.vertices.extend(moved.vertices);
        b_to_x.edges.extend(moved.edges);
        b_to_x.faces.extend(moved.faces);
    }
    let z_prime_to_x = glued.mediator(m, &b_to_x)?;
    let unfolded = EquivariantMap::new(
        CellularMap::new(glued.complex.clone(), x.clone(), z_prime_to_x)?,
        glued.action.clone(),
        psi.target_action().clone(),
    )?;
    let folded = fold(&unfolded)?;
    let y_to_z = folded.q.after(&glued.i, &glued.complex);
    let before = immersion_invariants(psi)?.bnd_or_isolated;
    let result = EquivariantMap::new(
        CellularMap::new(folded.complex.clone(), x.clone(), folded.i.clone())?,
        folded.action.clone(),
        psi.target_action().clone(),
    )?;
    let after = immersion_invariants(&result)?.bnd_or_isolated;
    Ok(CollapseOutcome::Collapsed(Box::new(Collapse {
        complex: folded.complex,
        y_to_z,
        z_to_x: folded.i,
        action: folded.action,
        diagram,
        bnd_or_isolated_before: before,
        bnd_or_isolated_after: after,
    })))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoreLimits {
    pub max_length: usize,
    pub max_area: usize,
    pub max_iterations: usize,
}

impl CoreLimits {
    fn path_limits(&self) -> PathLimits {
        PathLimits {
            max_length: self.max_length,
            max_area: self.max_area,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CollapseStep {
    pub path: EssentialPath,
    pub diagram_area: usize,
    pub bnd_or_isolated_before: usize,
    pub bnd_or_isolated_after: usize,
    pub nega: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Core {
    pub subcomplex: Subcomplex,
    pub iterations: usize,
    pub steps: Vec<CollapseStep>,
    pub simply_connected: bool,
    /// `−dim H₁(Y₀/H; ℚ)`, a computable stand-in for the ℓ²-Betti term.
    #[serde(with = "crate::rational::serde_rational")]
    pub chi_surrogate: Rational,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum CoreOutcome {
    Found(Box<Core>),
    Unknown { reason: String, iterations: usize },
}

fn is_injective(m: &CellMorphism) -> bool {
    let distinct = |items: Vec<usize>| {
        let n = items.len();
        items.into_iter().collect::<BTreeSet<_>>().len() == n
    };
    distinct(m.vertices.clone())
        && distinct(m.edges.iter().map(|e| e.edge).collect())
        && distinct(m.faces.iter().map(|f| f.face).collect())
}

/// Grows the invariant connected subcomplex `y` of `a`'s carrier to a simply
/// connected invariant subcomplex by collapsing essential paths.
pub fn build_core(a: &GroupAction, y: &Subcomplex, limits: CoreLimits) -> Result<CoreOutcome> {
    let x = a.carrier();
    let (y_complex, _) = y.complex(x)?;
    if !y_complex.is_connected() {
        return Err(Error::Precondition("subcomplex is not connected".into()));
    }
    let mut psi = y.equivariant_inclusion(a)?;
    let quotient = orbihedron_from_action(psi.source_action())?;
    let chi_surrogate = int(-(betti_1(quotient.quotient()) as i128));
    let mut steps = Vec::new();
    loop {
        match find_essential_path(&psi, limits.path_limits())? {
            PathSearch::None => break,
            PathSearch::Unknown { reason } => {
                return Ok(CoreOutcome::Unknown {
                    reason,
                    iterations: steps.len(),
                })
            }
            PathSearch::Found(path) => {
                if steps.len() == limits.max_iterations {
                    return Ok(CoreOutcome::Unknown {
                        reason: format!("iteration limit {} reached", limits.max_iterations),
                        iterations: steps.len(),
                    });
                }
                let collapse = match collapse_essential_path(&psi, &path, limits.max_area)? {
                    CollapseOutcome::Collapsed(c) => c,
                    CollapseOutcome::NoDiagram { area_bound } => {
                        return Ok(CoreOutcome::Unknown {
                            reason: format!("no disk diagram of area at most {area_bound} for the essential path"),
                            iterations: steps.len(),
                        })
                    }
                };
                psi = collapse.as_equivariant(a)?;
                steps.push(CollapseStep {
                    diagram_area: collapse.diagram.diagram.complex().face_count(),
                    bnd_or_isolated_before: collapse.bnd_or_isolated_before,
                    bnd_or_isolated_after: collapse.bnd_or_isolated_after,
                    nega: immersion_invariants(&psi)?.nega,
                    path,
                });
            }
        }
    }
    if !is_injective(&psi.map().morphism) {
        return Ok(CoreOutcome::Unknown {
            reason: "final immersion is not an embedding".into(),
            iterations: steps.len(),
        });
    }
    let subcomplex = Subcomplex::image(psi.map())?;
    let simply_connected = certify_simply_connected(&psi.map().source, limits.max_area)?;
    Ok(CoreOutcome::Found(Box::new(Core {
        subcomplex,
        iterations: steps.len(),
        steps,
        simply_connected,
        chi_surrogate,
        warnings: vec![
            "chi_surrogate replaces the l2-Betti lower bound by -dim H1(Y0/H; Q)".into(),
        ],
    })))
}
