//! Equivariant pushouts and folds, essential-path collapsing, the core
//! iteration, and the vertex-orbit counts that control it.

use std::collections::hash_map::Entry;
use std::collections::{BTreeSet, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::complex::{Corner, EdgeEnd, Letter, TwoComplex};
use crate::error::{Error, Result};
use crate::group::DEFAULT_CAP;
use crate::homology::h1_surjective;
use crate::morphism::{is_immersion, CellMorphism, CellularMap};
use crate::orbihedron::{euler_characteristic, orbihedron_from_action, vertex_curvature, GroupAction};
use crate::quotient::{descend, sum_morphism, union_morphism, QuotientBuilder};
use crate::rational::Rational;
use crate::sections::{negative_orbit_bound, BoundsReport};

mod essential;
pub use essential::*;

/// A cellular map intertwining two actions whose generators correspond by index.
#[derive(Debug, Clone)]
pub struct EquivariantMap {
    map: CellularMap,
    source: GroupAction,
    target: GroupAction,
}

impl EquivariantMap {
    pub fn new(map: CellularMap, source: GroupAction, target: GroupAction) -> Result<Self> {
        if *source.carrier() != map.source || *target.carrier() != map.target {
            return Err(Error::InvalidAction("actions do not live on the map's complexes".into()));
        }
        if source.generators().len() != target.generators().len() {
            return Err(Error::InvalidAction("actions have different generator lists".into()));
        }
        for (k, (s, t)) in source.generators().iter().zip(target.generators()).enumerate() {
            let left = map.morphism.after(s, &map.source);
            let right = t.after(&map.morphism, &map.target);
            if left != right {
                return Err(Error::InvalidAction(format!("map does not commute with generator {k}")));
            }
        }
        Ok(EquivariantMap { map, source, target })
    }

    /// The map with trivial actions on both sides.
    pub fn trivial(map: CellularMap) -> Self {
        let source = GroupAction::trivial(&map.source);
        let target = GroupAction::trivial(&map.target);
        EquivariantMap { map, source, target }
    }

    pub fn map(&self) -> &CellularMap {
        &self.map
    }

    pub fn source_action(&self) -> &GroupAction {
        &self.source
    }

    pub fn target_action(&self) -> &GroupAction {
        &self.target
    }
}

/// Generators on `z` induced through the surjection `q: x -> z`.
fn induced_generators(x: &TwoComplex, z: &TwoComplex, q: &CellMorphism, gens: &[CellMorphism]) -> Result<Vec<CellMorphism>> {
    gens.iter()
        .map(|g| {
            descend(x, z, q, &q.after(g, x))
                .map_err(|_| Error::Pushout("identifications are not compatible with the action".into()))
        })
        .collect()
}

/// The pushout of `A <- C -> B` with its structure maps.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub complex: TwoComplex,
    /// `A -> Z`
    pub i: CellMorphism,
    /// `B -> Z`
    pub j: CellMorphism,
    pub action: GroupAction,
    sum: TwoComplex,
    quotient: CellMorphism,
}

impl Pushout {
    /// The unique map `Z -> W` restricting to `f` on `A` and `g` on `B`;
    /// fails unless `f ∘ phi = g ∘ psi`.
    pub fn mediator(&self, f: &CellMorphism, g: &CellMorphism) -> Result<CellMorphism> {
        descend(&self.sum, &self.complex, &self.quotient, &union_morphism(f, g))
    }
}

fn split_morphism(q: &CellMorphism, a: &TwoComplex) -> (CellMorphism, CellMorphism) {
    let (nv, ne, nf) = (a.vertex_count(), a.edge_count(), a.face_count());
    let first = CellMorphism {
        vertices: q.vertices[..nv].to_vec(),
        edges: q.edges[..ne].to_vec(),
        faces: q.faces[..nf].to_vec(),
    };
    let second = CellMorphism {
        vertices: q.vertices[nv..].to_vec(),
        edges: q.edges[ne..].to_vec(),
        faces: q.faces[nf..].to_vec(),
    };
    (first, second)
}

/// Glues `A` and `B` along the images of `phi: C -> A` and `psi: C -> B`.
pub fn pushout(phi: &EquivariantMap, psi: &EquivariantMap) -> Result<Pushout> {
    let c = &phi.map.source;
    if psi.map.source != *c || phi.source.generators() != psi.source.generators() {
        return Err(Error::Pushout("maps do not share their source action".into()));
    }
    let (a, b) = (&phi.map.target, &psi.map.target);
    let sum = a.disjoint_union(b);
    let (nv, ne, nf) = (a.vertex_count(), a.edge_count(), a.face_count());
    let (pm, qm) = (&phi.map.morphism, &psi.map.morphism);
    let mut builder = QuotientBuilder::new(&sum);
    for v in 0..c.vertex_count() {
        builder.merge_vertices(pm.vertices[v], qm.vertices[v] + nv);
    }
    for e in 0..c.edge_count() {
        let (ea, eb) = (pm.edges[e], qm.edges[e]);
        builder.merge_edges(ea.edge, eb.edge + ne, ea.reversed != eb.reversed)?;
    }
    for f in 0..c.face_count() {
        let n = c.face(f).len();
        let (fa, fb) = (pm.faces[f], qm.faces[f]);
        builder.merge_faces(fa.face, fb.face + nf, fa.align.compose(fb.align.inverse(n), n))?;
    }
    let (complex, quotient) = builder.build()?;
    let sum_gens: Vec<CellMorphism> = phi
        .target
        .generators()
        .iter()
        .zip(psi.target.generators())
        .map(|(ga, gb)| sum_morphism(ga, gb, a))
        .collect();
    let gens = induced_generators(&sum, &complex, &quotient, &sum_gens)?;
    let action = GroupAction::new(complex.clone(), gens, DEFAULT_CAP)?;
    let (i, j) = split_morphism(&quotient, a);
    Ok(Pushout {
        complex,
        i,
        j,
        action,
        sum,
        quotient,
    })
}

/// `W -> Z -> X` with `Z -> X` an immersion.
#[derive(Debug, Clone)]
pub struct Fold {
    pub complex: TwoComplex,
    /// `W -> Z`
    pub q: CellMorphism,
    /// `Z -> X`
    pub i: CellMorphism,
    pub action: GroupAction,
    pub rounds: usize,
}

/// One pass identifying link cells at a common vertex with a common image.
fn fold_round(z: &TwoComplex, i: &CellMorphism) -> Result<Option<(TwoComplex, CellMorphism)>> {
    let mut builder = QuotientBuilder::new(z);
    let mut changed = false;
    for v in 0..z.vertex_count() {
        let mut ends: HashMap<EdgeEnd, EdgeEnd> = HashMap::new();
        for end in z.ends_at(v) {
            match ends.entry(i.end(end)) {
                Entry::Occupied(o) => {
                    let first = *o.get();
                    builder.merge_edges(first.edge, end.edge, first.end != end.end)?;
                    changed = true;
                }
                Entry::Vacant(slot) => {
                    slot.insert(end);
                }
            }
        }
        let mut corners: HashMap<Corner, Corner> = HashMap::new();
        for c in z.corners_at(v) {
            match corners.entry(i.corner(z, c)) {
                Entry::Occupied(o) => {
                    let first = *o.get();
                    let n = z.face(c.face).len();
                    let d1 = i.faces[first.face].align;
                    let d2 = i.faces[c.face].align;
                    builder.merge_faces(first.face, c.face, d1.inverse(n).compose(d2, n))?;
                    changed = true;
                }
                Entry::Vacant(slot) => {
                    slot.insert(c);
                }
            }
        }
    }
    if !changed {
        return Ok(None);
    }
    builder.build().map(Some)
}

/// Factors `m` as a surjection followed by an immersion.
pub fn fold(m: &EquivariantMap) -> Result<Fold> {
    let w = &m.map.source;
    let mut z = w.clone();
    let mut q = CellMorphism::identity(w);
    let mut i = m.map.morphism.clone();
    let mut rounds = 0;
    while let Some((next, step)) = fold_round(&z, &i)? {
        i = descend(&z, &next, &step, &i)?;
        q = step.after(&q, &z);
        z = next;
        rounds += 1;
    }
    let gens = induced_generators(w, &z, &q, m.source.generators())?;
    let action = GroupAction::new(z.clone(), gens, DEFAULT_CAP)?;
    Ok(Fold {
        complex: z,
        q,
        i,
        action,
        rounds,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FoldCheck {
    pub immersion: bool,
    pub factors: bool,
    pub surjective: bool,
    pub h1_surjective: bool,
}

impl FoldCheck {
    pub fn holds(&self) -> bool {
        self.immersion && self.factors && self.surjective && self.h1_surjective
    }
}

/// Recomputes the defining properties of a fold of `m`.
pub fn check_fold(m: &EquivariantMap, f: &Fold) -> FoldCheck {
    let w = &m.map.source;
    let immersion = CellularMap::new(f.complex.clone(), m.map.target.clone(), f.i.clone())
        .map(|map| is_immersion(&map).holds)
        .unwrap_or(false);
    let factors = f.i.after(&f.q, &f.complex) == m.map.morphism;
    let hit = |images: &mut dyn Iterator<Item = usize>, n: usize| images.collect::<BTreeSet<_>>().len() == n;
    let surjective = hit(&mut f.q.vertices.iter().copied(), f.complex.vertex_count())
        && hit(&mut f.q.edges.iter().map(|e| e.edge), f.complex.edge_count())
        && hit(&mut f.q.faces.iter().map(|x| x.face), f.complex.face_count());
    FoldCheck {
        immersion,
        factors,
        surjective,
        h1_surjective: h1_surjective(w, &f.complex, &f.q),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SelfImmersion {
    pub isomorphism: bool,
    pub inverse: Option<CellMorphism>,
}

/// An equivariant immersion of a finite connected complex to itself is an
/// isomorphism; returns its inverse, or reports the input as a counterexample.
pub fn is_self_immersion_iso(phi: &EquivariantMap) -> Result<SelfImmersion> {
    let map = &phi.map;
    if map.source != map.target {
        return Err(Error::Precondition("map is not a self-map".into()));
    }
    if !map.source.is_connected() {
        return Err(Error::Precondition("complex is not connected".into()));
    }
    let check = is_immersion(map);
    if !check.holds {
        return Err(Error::NotImmersion(format!("{:?}", check.witness)));
    }
    let x = &map.source;
    if map.morphism.is_bijective(x, x) {
        Ok(SelfImmersion {
            isomorphism: true,
            inverse: Some(map.morphism.inverse(x)),
        })
    } else {
        Ok(SelfImmersion {
            isomorphism: false,
            inverse: None,
        })
    }
}

/// Classification of one vertex orbit of `Y`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrbitClass {
    pub representative: usize,
    #[serde(with = "crate::rational::serde_rational")]
    pub curvature: Rational,
    pub bnd: bool,
    pub isolated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImmersionInvariants {
    #[serde(with = "crate::rational::serde_rational")]
    pub chi: Rational,
    pub vertex_orbits: usize,
    pub bnd: usize,
    pub isolated: usize,
    pub bnd_or_isolated: usize,
    pub zero: usize,
    pub nega: usize,
    pub positive: usize,
    pub orbits: Vec<OrbitClass>,
}

impl ImmersionInvariants {
    /// `negative_orbit_bound(χ, A_pos, |positivecells|, A_neg)`.
    pub fn nega_bound(&self, bounds: &BoundsReport) -> Result<Rational> {
        negative_orbit_bound(self.chi, bounds.a_pos, self.positive, bounds.a_neg)
    }
}

/// `(bnd, isolated)` for a vertex: the link is empty, a single vertex or has
/// a spur; the link has a vertex of valence zero.
pub fn link_shape(y: &TwoComplex, v: usize) -> Result<(bool, bool)> {
    let link = y.link(v)?;
    let degrees = link.degrees();
    let bnd = degrees.len() <= 1 || degrees.contains(&1);
    let isolated = degrees.contains(&0);
    Ok((bnd, isolated))
}

/// Orbit counts of an immersion `Y -> X` under the source action.
pub fn immersion_invariants(psi: &EquivariantMap) -> Result<ImmersionInvariants> {
    let check = is_immersion(&psi.map);
    if !check.holds {
        return Err(Error::NotImmersion(format!("{:?}", check.witness)));
    }
    let y = &psi.map.source;
    let orbihedron = orbihedron_from_action(&psi.source)?;
    let labels = psi.source.vertex_orbits();
    let mut orbits: Vec<OrbitClass> = Vec::new();
    for (v, &label) in labels.iter().enumerate() {
        if label < orbits.len() {
            continue;
        }
        let (bnd, isolated) = link_shape(y, v)?;
        orbits.push(OrbitClass {
            representative: v,
            curvature: vertex_curvature(&orbihedron, label)?,
            bnd,
            isolated,
        });
    }
    let count = |p: &dyn Fn(&OrbitClass) -> bool| orbits.iter().filter(|o| p(o)).count();
    Ok(ImmersionInvariants {
        chi: euler_characteristic(&orbihedron),
        vertex_orbits: orbits.len(),
        bnd: count(&|o| o.bnd),
        isolated: count(&|o| o.isolated),
        bnd_or_isolated: count(&|o| o.bnd || o.isolated),
        zero: count(&|o| o.curvature.is_zero()),
        nega: count(&|o| o.curvature < Rational::zero()),
        positive: count(&|o| o.curvature > Rational::zero()),
        orbits,
    })
}

/// Restriction of an automorphism of `x` to a subcomplex given by sorted cell lists.
fn restrict_morphism(g: &CellMorphism, cells: &Subcomplex) -> Option<CellMorphism> {
    let vpos: HashMap<usize, usize> = cells.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let epos: HashMap<usize, usize> = cells.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let fpos: HashMap<usize, usize> = cells.faces.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    Some(CellMorphism {
        vertices: cells
            .vertices
            .iter()
            .map(|&v| vpos.get(&g.vertices[v]).copied())
            .collect::<Option<_>>()?,
        edges: cells
            .edges
            .iter()
            .map(|&e| {
                let img = g.edges[e];
                epos.get(&img.edge).map(|&edge| crate::morphism::EdgeImage {
                    edge,
                    reversed: img.reversed,
                })
            })
            .collect::<Option<_>>()?,
        faces: cells
            .faces
            .iter()
            .map(|&f| {
                let img = g.faces[f];
                fpos.get(&img.face).map(|&face| crate::morphism::FaceImage { face, align: img.align })
            })
            .collect::<Option<_>>()?,
    })
}

/// Cells of a subcomplex of some ambient complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Subcomplex {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

impl Subcomplex {
    pub fn whole(x: &TwoComplex) -> Self {
        Subcomplex {
            vertices: (0..x.vertex_count()).collect(),
            edges: (0..x.edge_count()).collect(),
            faces: (0..x.face_count()).collect(),
        }
    }

    /// Sorts and deduplicates the cell lists and checks closure in `x`.
    pub fn new(x: &TwoComplex, vertices: Vec<usize>, edges: Vec<usize>, faces: Vec<usize>) -> Result<Self> {
        let sorted = |v: Vec<usize>| v.into_iter().collect::<BTreeSet<_>>().into_iter().collect::<Vec<_>>();
        let s = Subcomplex {
            vertices: sorted(vertices),
            edges: sorted(edges),
            faces: sorted(faces),
        };
        let vs: BTreeSet<usize> = s.vertices.iter().copied().collect();
        let es: BTreeSet<usize> = s.edges.iter().copied().collect();
        for &v in &s.vertices {
            x.check_vertex(v)?;
        }
        for &e in &s.edges {
            if e >= x.edge_count() {
                return Err(Error::UnknownEdge(e));
            }
            let edge = x.edge(e);
            if !vs.contains(&edge.init) || !vs.contains(&edge.term) {
                return Err(Error::Precondition(format!("edge {e} has an endpoint outside the subcomplex")));
            }
        }
        for &f in &s.faces {
            if f >= x.face_count() {
                return Err(Error::UnknownFace(f));
            }
            if x.face(f).word.iter().any(|l| !es.contains(&l.edge)) {
                return Err(Error::Precondition(format!("face {f} has a boundary edge outside the subcomplex")));
            }
        }
        Ok(s)
    }

    /// The subcomplex as a complex of its own, with its inclusion into `x`.
    pub fn complex(&self, x: &TwoComplex) -> Result<(TwoComplex, CellMorphism)> {
        let vpos: HashMap<usize, usize> = self.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let epos: HashMap<usize, usize> = self.edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let edges = self
            .edges
            .iter()
            .map(|&e| crate::complex::Edge {
                init: vpos[&x.edge(e).init],
                term: vpos[&x.edge(e).term],
            })
            .collect();
        let faces = self
            .faces
            .iter()
            .map(|&f| {
                let face = x.face(f);
                crate::complex::Face {
                    word: face
                        .word
                        .iter()
                        .map(|l| Letter {
                            edge: epos[&l.edge],
                            inverse: l.inverse,
                        })
                        .collect(),
                    angles: face.angles.clone(),
                }
            })
            .collect();
        let y = TwoComplex::new(self.vertices.len(), edges, faces)?;
        let inclusion = CellMorphism {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&edge| crate::morphism::EdgeImage { edge, reversed: false })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|&face| crate::morphism::FaceImage {
                    face,
                    align: crate::complex::Dihedral::IDENTITY,
                })
                .collect(),
        };
        Ok((y, inclusion))
    }

    /// The inclusion as an equivariant map, with the action restricted.
    pub fn equivariant_inclusion(&self, a: &GroupAction) -> Result<EquivariantMap> {
        let x = a.carrier();
        let (y, inclusion) = self.complex(x)?;
        let gens = a
            .generators()
            .iter()
            .map(|g| restrict_morphism(g, self))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::Precondition("subcomplex is not invariant".into()))?;
        let source = GroupAction::new(y.clone(), gens, DEFAULT_CAP)?;
        let map = CellularMap::new(y, x.clone(), inclusion)?;
        EquivariantMap::new(map, source, a.clone())
    }

    /// The image of a map, as a subcomplex of its target.
    pub fn image(map: &CellularMap) -> Result<Self> {
        let m = &map.morphism;
        Subcomplex::new(
            &map.target,
            m.vertices.clone(),
            m.edges.iter().map(|e| e.edge).collect(),
            m.faces.iter().map(|f| f.face).collect(),
        )
    }
}
