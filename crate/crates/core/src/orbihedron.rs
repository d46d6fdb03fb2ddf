//! Group actions on complexes, weighted quotients and combinatorial Gauss-Bonnet.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::complex::{Dihedral, Letter, TwoComplex};
use crate::error::{Error, Result};
use crate::group::{FiniteGroup, DEFAULT_CAP};
use crate::morphism::CellMorphism;
use crate::rational::{int, is_stabilizer_weight, Rational};

/// A quotient complex together with the reciprocal stabilizer order of each cell.
/// A weight of zero stands for an infinite stabilizer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbihedron {
    quotient: TwoComplex,
    vertex_weights: Vec<Rational>,
    edge_weights: Vec<Rational>,
    face_weights: Vec<Rational>,
}

impl Orbihedron {
    pub fn new(
        quotient: TwoComplex,
        vertex_weights: Vec<Rational>,
        edge_weights: Vec<Rational>,
        face_weights: Vec<Rational>,
    ) -> Result<Self> {
        let counts = [
            ("vertex", vertex_weights.len(), quotient.vertex_count()),
            ("edge", edge_weights.len(), quotient.edge_count()),
            ("face", face_weights.len(), quotient.face_count()),
        ];
        for (kind, got, want) in counts {
            if got != want {
                return Err(Error::InvalidWeight(format!(
                    "{got} {kind} weights for {want} {kind}s"
                )));
            }
        }
        let all = vertex_weights.iter().chain(&edge_weights).chain(&face_weights);
        if let Some(w) = all.into_iter().find(|w| !is_stabilizer_weight(w)) {
            return Err(Error::InvalidWeight(format!(
                "{w} is neither 0 nor the reciprocal of a positive integer"
            )));
        }
        Ok(Orbihedron {
            quotient,
            vertex_weights,
            edge_weights,
            face_weights,
        })
    }

    /// The complex itself with every stabilizer trivial.
    pub fn trivial(x: &TwoComplex) -> Self {
        Orbihedron {
            quotient: x.clone(),
            vertex_weights: vec![int(1); x.vertex_count()],
            edge_weights: vec![int(1); x.edge_count()],
            face_weights: vec![int(1); x.face_count()],
        }
    }

    pub fn quotient(&self) -> &TwoComplex {
        &self.quotient
    }

    pub fn vertex_weights(&self) -> &[Rational] {
        &self.vertex_weights
    }

    pub fn edge_weights(&self) -> &[Rational] {
        &self.edge_weights
    }

    pub fn face_weights(&self) -> &[Rational] {
        &self.face_weights
    }

    /// Incidence constraints implied by stabilizer containment that the
    /// weights violate. These are advisory: the weights are still usable.
    pub fn weight_warnings(&self) -> Vec<String> {
        let x = &self.quotient;
        let mut warnings = Vec::new();
        let below = |small: Rational, large: Rational| !small.is_zero() && small < large;
        for (e, edge) in x.edges().iter().enumerate() {
            for v in [edge.init, edge.term] {
                if below(self.edge_weights[e], self.vertex_weights[v]) {
                    warnings.push(format!(
                        "edge {e} has weight {} below the weight {} of its endpoint {v}",
                        self.edge_weights[e], self.vertex_weights[v]
                    ));
                }
            }
        }
        for (f, face) in x.faces().iter().enumerate() {
            let edges: BTreeSet<usize> = face.word.iter().map(|l| l.edge).collect();
            for e in edges {
                if below(self.face_weights[f], self.edge_weights[e]) {
                    warnings.push(format!(
                        "face {f} has weight {} below the weight {} of its boundary edge {e}",
                        self.face_weights[f], self.edge_weights[e]
                    ));
                }
            }
        }
        warnings
    }
}

/// `Σ w(vertices) − Σ w(edges) + Σ w(faces)`.
pub fn euler_characteristic(o: &Orbihedron) -> Rational {
    let sum = |ws: &[Rational]| ws.iter().fold(Rational::zero(), |a, b| a + b);
    sum(&o.vertex_weights) - sum(&o.edge_weights) + sum(&o.face_weights)
}

/// `2w(v) − Σ_aristae w(edge) + Σ_corners (1 − ∠)·w(face)`.
pub fn vertex_curvature(o: &Orbihedron, v: usize) -> Result<Rational> {
    let x = &o.quotient;
    x.check_vertex(v)?;
    let mut k = int(2) * o.vertex_weights[v];
    for end in x.ends_at(v) {
        k -= o.edge_weights[end.edge];
    }
    for c in x.corners_at(v) {
        k += (Rational::one() - x.corner_angle(c)) * o.face_weights[c.face];
    }
    Ok(k)
}

/// `(Σ∠ − (|∂f| − 2))·w(f)`.
pub fn face_curvature(o: &Orbihedron, f: usize) -> Result<Rational> {
    let x = &o.quotient;
    if f >= x.face_count() {
        return Err(Error::UnknownFace(f));
    }
    let face = x.face(f);
    let excess = face.angle_sum() - int(face.len() as i128 - 2);
    Ok(excess * o.face_weights[f])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurvatureReport {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub vertex_curvatures: Vec<Rational>,
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub face_curvatures: Vec<Rational>,
    #[serde(with = "crate::rational::serde_rational")]
    pub euler_characteristic: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub lhs: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub rhs: Rational,
    #[serde(with = "crate::rational::serde_rational")]
    pub residual: Rational,
    pub holds: bool,
}

/// Compares `2χ` with the total vertex and face curvature.
pub fn gauss_bonnet(o: &Orbihedron) -> CurvatureReport {
    let x = &o.quotient;
    let vertex_curvatures: Vec<Rational> = (0..x.vertex_count())
        .map(|v| vertex_curvature(o, v).expect("vertex exists"))
        .collect();
    let face_curvatures: Vec<Rational> = (0..x.face_count())
        .map(|f| face_curvature(o, f).expect("face exists"))
        .collect();
    let chi = euler_characteristic(o);
    let lhs = int(2) * chi;
    let rhs = vertex_curvatures
        .iter()
        .chain(&face_curvatures)
        .fold(Rational::zero(), |a, b| a + b);
    let residual = lhs - rhs;
    CurvatureReport {
        vertex_curvatures,
        face_curvatures,
        euler_characteristic: chi,
        lhs,
        rhs,
        residual,
        holds: residual.is_zero(),
    }
}

/// A finite group acting on a complex by cellular automorphisms without inversions.
#[derive(Debug, Clone)]
pub struct GroupAction {
    carrier: TwoComplex,
    generators: Vec<CellMorphism>,
    group: FiniteGroup<CellMorphism>,
}

impl GroupAction {
    pub fn new(carrier: TwoComplex, generators: Vec<CellMorphism>, cap: usize) -> Result<Self> {
        for (i, g) in generators.iter().enumerate() {
            g.check(&carrier, &carrier)
                .map_err(|e| Error::InvalidAction(format!("generator {i}: {e}")))?;
            if !g.is_bijective(&carrier, &carrier) {
                return Err(Error::InvalidAction(format!(
                    "generator {i} is not a bijection"
                )));
            }
        }
        let identity = CellMorphism::identity(&carrier);
        let group = FiniteGroup::generate(identity, &generators, |a, b| a.after(b, &carrier), cap)?;
        let action = GroupAction {
            carrier,
            generators,
            group,
        };
        action.check_inversions()?;
        Ok(action)
    }

    pub fn with_default_cap(carrier: TwoComplex, generators: Vec<CellMorphism>) -> Result<Self> {
        Self::new(carrier, generators, DEFAULT_CAP)
    }

    pub fn trivial(carrier: &TwoComplex) -> Self {
        Self::new(carrier.clone(), Vec::new(), 1).expect("the trivial action is valid")
    }

    fn check_inversions(&self) -> Result<()> {
        for (i, g) in self.group.elements().iter().enumerate() {
            for (e, img) in g.edges.iter().enumerate() {
                if img.edge == e && img.reversed {
                    return Err(Error::Inversion(format!(
                        "element {i} reverses edge {e}"
                    )));
                }
            }
            for (f, img) in g.faces.iter().enumerate() {
                if img.face == f && img.align != Dihedral::IDENTITY {
                    return Err(Error::Inversion(format!(
                        "element {i} maps face {f} to itself without fixing its boundary"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn carrier(&self) -> &TwoComplex {
        &self.carrier
    }

    pub fn generators(&self) -> &[CellMorphism] {
        &self.generators
    }

    pub fn group(&self) -> &FiniteGroup<CellMorphism> {
        &self.group
    }

    pub fn order(&self) -> usize {
        self.group.order()
    }

    pub fn elements(&self) -> &[CellMorphism] {
        self.group.elements()
    }

    /// Indices of the group elements fixing vertex `v`.
    pub fn vertex_stabilizer(&self, v: usize) -> Vec<usize> {
        (0..self.order())
            .filter(|&i| self.elements()[i].vertices[v] == v)
            .collect()
    }

    pub fn max_stabilizer_order(&self) -> usize {
        let x = &self.carrier;
        let mut best = 1;
        for g_count in (0..x.vertex_count()).map(|v| self.vertex_stabilizer(v).len()) {
            best = best.max(g_count);
        }
        best
    }

    fn orbits(&self, n: usize, image: impl Fn(&CellMorphism, usize) -> usize) -> Vec<usize> {
        // orbit label per cell, labels ordered by smallest member
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for c in 0..n {
            if label[c] == usize::MAX {
                for g in self.elements() {
                    label[image(g, c)] = next;
                }
                next += 1;
            }
        }
        label
    }

    pub fn vertex_orbits(&self) -> Vec<usize> {
        self.orbits(self.carrier.vertex_count(), |g, v| g.vertices[v])
    }

    pub fn edge_orbits(&self) -> Vec<usize> {
        self.orbits(self.carrier.edge_count(), |g, e| g.edges[e].edge)
    }

    pub fn face_orbits(&self) -> Vec<usize> {
        self.orbits(self.carrier.face_count(), |g, f| g.faces[f].face)
    }
}

fn orbit_weight(orbit_size: usize, group_order: usize) -> Rational {
    Rational::new(orbit_size as i128, group_order as i128)
}

/// The quotient orbihedron: one cell per orbit, words transported through the
/// smallest representative, weights `|orbit| / |G|`.
pub fn orbihedron_from_action(a: &GroupAction) -> Result<Orbihedron> {
    let x = a.carrier();
    let order = a.order();
    let vlabel = a.vertex_orbits();
    let elabel = a.edge_orbits();
    let flabel = a.face_orbits();
    let count = |labels: &[usize]| labels.iter().map(|&l| l + 1).max().unwrap_or(0);
    let (nv, ne, nf) = (count(&vlabel), count(&elabel), count(&flabel));
    let size = |labels: &[usize], n: usize| {
        let mut sizes = vec![0usize; n];
        for &l in labels {
            sizes[l] += 1;
        }
        sizes
    };

    // representative edge per orbit and orientation of each member relative to it
    let mut edge_rep = vec![usize::MAX; ne];
    let mut flipped = vec![false; x.edge_count()];
    for e in 0..x.edge_count() {
        let l = elabel[e];
        if edge_rep[l] == usize::MAX {
            edge_rep[l] = e;
            for g in a.elements() {
                let img = g.edges[e];
                flipped[img.edge] = img.reversed;
            }
        }
    }
    let edges = edge_rep
        .iter()
        .map(|&e| crate::complex::Edge {
            init: vlabel[x.edge(e).init],
            term: vlabel[x.edge(e).term],
        })
        .collect();
    let mut face_rep = vec![usize::MAX; nf];
    for f in 0..x.face_count() {
        if face_rep[flabel[f]] == usize::MAX {
            face_rep[flabel[f]] = f;
        }
    }
    let faces = face_rep
        .iter()
        .map(|&f| {
            let face = x.face(f);
            crate::complex::Face {
                word: face
                    .word
                    .iter()
                    .map(|l| Letter {
                        edge: elabel[l.edge],
                        inverse: l.inverse != flipped[l.edge],
                    })
                    .collect(),
                angles: face.angles.clone(),
            }
        })
        .collect();
    let quotient = TwoComplex::new(nv, edges, faces)?;
    let weights = |labels: &[usize], n: usize| {
        size(labels, n)
            .into_iter()
            .map(|s| orbit_weight(s, order))
            .collect()
    };
    Orbihedron::new(
        quotient,
        weights(&vlabel, nv),
        weights(&elabel, ne),
        weights(&flabel, nf),
    )
}
