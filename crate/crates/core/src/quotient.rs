//! Quotients of a complex by identifications of cells, closed under the
//! incidences they force.

use crate::complex::{Dihedral, Edge, Face, Letter, TwoComplex, UnionFind};
use crate::error::{Error, Result};
use crate::morphism::{CellMorphism, EdgeImage, FaceImage};

/// Accumulates identifications of vertices, edges (with orientation) and
/// faces (with a dihedral alignment) of a fixed complex.
#[derive(Debug, Clone)]
pub struct QuotientBuilder<'a> {
    x: &'a TwoComplex,
    vertices: UnionFind,
    /// parent and whether the edge runs against its parent
    edge_parent: Vec<(usize, bool)>,
    /// parent and how the face's letters read on the parent's word
    face_parent: Vec<(usize, Dihedral)>,
}

impl<'a> QuotientBuilder<'a> {
    pub fn new(x: &'a TwoComplex) -> Self {
        QuotientBuilder {
            x,
            vertices: UnionFind::new(x.vertex_count()),
            edge_parent: (0..x.edge_count()).map(|e| (e, false)).collect(),
            face_parent: (0..x.face_count()).map(|f| (f, Dihedral::IDENTITY)).collect(),
        }
    }

    fn edge_root(&mut self, e: usize) -> (usize, bool) {
        let (p, flip) = self.edge_parent[e];
        if p == e {
            return (e, false);
        }
        let (root, flip2) = self.edge_root(p);
        self.edge_parent[e] = (root, flip != flip2);
        (root, flip != flip2)
    }

    fn face_root(&mut self, f: usize) -> (usize, Dihedral) {
        let (p, d) = self.face_parent[f];
        if p == f {
            return (f, Dihedral::IDENTITY);
        }
        let (root, d2) = self.face_root(p);
        let n = self.x.face(f).len();
        let combined = d2.compose(d, n);
        self.face_parent[f] = (root, combined);
        (root, combined)
    }

    pub fn merge_vertices(&mut self, a: usize, b: usize) {
        self.vertices.union(a, b);
    }

    /// Identifies edge `b` with edge `a`, reversed when `flip` is set.
    pub fn merge_edges(&mut self, a: usize, b: usize, flip: bool) -> Result<()> {
        let (ra, fa) = self.edge_root(a);
        let (rb, fb) = self.edge_root(b);
        let relative = (fa != fb) != flip;
        if ra == rb {
            if relative {
                return Err(Error::Pushout(format!(
                    "edge {b} would be identified with the reverse of edge {a}"
                )));
            }
            return Ok(());
        }
        let (keep, drop) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.edge_parent[drop] = (keep, relative);
        let (ea, eb) = (*self.x.edge(a), *self.x.edge(b));
        if flip {
            self.merge_vertices(ea.init, eb.term);
            self.merge_vertices(ea.term, eb.init);
        } else {
            self.merge_vertices(ea.init, eb.init);
            self.merge_vertices(ea.term, eb.term);
        }
        Ok(())
    }

    /// Identifies face `b` with face `a` so that letter `j` of `b` lands on
    /// `align.image_letter(word(a), j)`.
    pub fn merge_faces(&mut self, a: usize, b: usize, align: Dihedral) -> Result<()> {
        let n = self.x.face(a).len();
        if self.x.face(b).len() != n {
            return Err(Error::Pushout(format!(
                "faces {a} and {b} have different boundary lengths"
            )));
        }
        let align = align.normalized(n);
        let (ra, da) = self.face_root(a);
        let (rb, db) = self.face_root(b);
        // b ≙ a via align, a ≙ ra via da, so b ≙ ra via da ∘ align; and b ≙ rb via db.
        let b_on_ra = da.compose(align, n);
        if ra == rb {
            if b_on_ra != db {
                return Err(Error::Pushout(format!(
                    "face {b} would be identified with face {a} in two different ways"
                )));
            }
            return Ok(());
        }
        // rb ≙ ra via (da ∘ align) ∘ db⁻¹
        let rb_on_ra = b_on_ra.compose(db.inverse(n), n);
        if ra < rb {
            self.face_parent[rb] = (ra, rb_on_ra);
        } else {
            self.face_parent[ra] = (rb, rb_on_ra.inverse(n));
        }
        let (wa, wb) = (self.x.face(a).word.clone(), self.x.face(b).word.clone());
        for (j, lb) in wb.iter().enumerate() {
            let la = align.image_letter(&wa, j);
            self.merge_edges(la.edge, lb.edge, la.inverse != lb.inverse)?;
        }
        Ok(())
    }

    /// The quotient complex and the quotient map onto it.
    ///
    /// Classes are numbered by their smallest member; the representative of
    /// each class is its smallest member, whose orientation and angles the
    /// quotient cell inherits.
    pub fn build(mut self) -> Result<(TwoComplex, CellMorphism)> {
        let x = self.x;
        let (nv, vlabel) = self.vertices.labels();

        let mut edge_class = vec![usize::MAX; x.edge_count()];
        let mut edge_rep: Vec<usize> = Vec::new();
        let mut root_class = vec![usize::MAX; x.edge_count()];
        for e in 0..x.edge_count() {
            let (r, _) = self.edge_root(e);
            if root_class[r] == usize::MAX {
                root_class[r] = edge_rep.len();
                edge_rep.push(e);
            }
            edge_class[e] = root_class[r];
        }
        let edge_images: Vec<EdgeImage> = (0..x.edge_count())
            .map(|e| {
                let (_, fe) = self.edge_root(e);
                let (_, fr) = self.edge_root(edge_rep[edge_class[e]]);
                EdgeImage {
                    edge: edge_class[e],
                    reversed: fe != fr,
                }
            })
            .collect();
        let edges: Vec<Edge> = edge_rep
            .iter()
            .map(|&e| Edge {
                init: vlabel[x.edge(e).init],
                term: vlabel[x.edge(e).term],
            })
            .collect();

        let mut face_class = vec![usize::MAX; x.face_count()];
        let mut face_rep: Vec<usize> = Vec::new();
        let mut root_face_class = vec![usize::MAX; x.face_count()];
        for f in 0..x.face_count() {
            let (r, _) = self.face_root(f);
            if root_face_class[r] == usize::MAX {
                root_face_class[r] = face_rep.len();
                face_rep.push(f);
            }
            face_class[f] = root_face_class[r];
        }
        let map_letter = |l: Letter| {
            let img = edge_images[l.edge];
            Letter {
                edge: img.edge,
                inverse: l.inverse != img.reversed,
            }
        };
        let faces: Vec<Face> = face_rep
            .iter()
            .map(|&f| Face {
                word: x.face(f).word.iter().map(|&l| map_letter(l)).collect(),
                angles: x.face(f).angles.clone(),
            })
            .collect();
        let face_images: Vec<FaceImage> = (0..x.face_count())
            .map(|f| {
                let n = x.face(f).len();
                let (_, df) = self.face_root(f);
                let (_, dm) = self.face_root(face_rep[face_class[f]]);
                FaceImage {
                    face: face_class[f],
                    align: dm.inverse(n).compose(df, n),
                }
            })
            .collect();
        let quotient = TwoComplex::new(nv, edges, faces)?;
        let q = CellMorphism {
            vertices: vlabel,
            edges: edge_images,
            faces: face_images,
        };
        q.check(x, &quotient)
            .map_err(|e| Error::Pushout(format!("inconsistent identifications: {e}")))?;
        Ok((quotient, q))
    }
}

/// The unique `h̄: Z -> W` with `h̄ ∘ q = h`, for a surjective quotient map
/// `q: X -> Z`; fails when `h` is not constant on the fibres of `q`.
pub fn descend(
    x: &TwoComplex,
    z: &TwoComplex,
    q: &CellMorphism,
    h: &CellMorphism,
) -> Result<CellMorphism> {
    let mut vertices = vec![usize::MAX; z.vertex_count()];
    for (v, &zv) in q.vertices.iter().enumerate() {
        if vertices[zv] == usize::MAX {
            vertices[zv] = h.vertices[v];
        }
    }
    let mut edges = vec![None; z.edge_count()];
    for (e, img) in q.edges.iter().enumerate() {
        if edges[img.edge].is_none() {
            let he = h.edges[e];
            edges[img.edge] = Some(EdgeImage {
                edge: he.edge,
                reversed: he.reversed != img.reversed,
            });
        }
    }
    let mut faces = vec![None; z.face_count()];
    for (f, img) in q.faces.iter().enumerate() {
        if faces[img.face].is_none() {
            let n = x.face(f).len();
            let hf = h.faces[f];
            faces[img.face] = Some(FaceImage {
                face: hf.face,
                align: hf.align.compose(img.align.inverse(n), n),
            });
        }
    }
    if vertices.contains(&usize::MAX) || edges.contains(&None) || faces.contains(&None) {
        return Err(Error::InvalidMap("quotient map is not surjective".into()));
    }
    let bar = CellMorphism {
        vertices,
        edges: edges.into_iter().map(Option::unwrap).collect(),
        faces: faces.into_iter().map(Option::unwrap).collect(),
    };
    if bar.after(q, z) != *h {
        return Err(Error::InvalidMap(
            "map is not constant on the identified cells".into(),
        ));
    }
    Ok(bar)
}

/// Cell-wise disjoint union of two morphisms into the same target.
pub fn union_morphism(a: &CellMorphism, b: &CellMorphism) -> CellMorphism {
    CellMorphism {
        vertices: a.vertices.iter().chain(&b.vertices).copied().collect(),
        edges: a.edges.iter().chain(&b.edges).copied().collect(),
        faces: a.faces.iter().chain(&b.faces).copied().collect(),
    }
}

/// Disjoint union `f ⊔ g: A ⊔ B -> C ⊔ D`.
pub fn sum_morphism(f: &CellMorphism, g: &CellMorphism, c: &TwoComplex) -> CellMorphism {
    let (nv, ne, nf) = (c.vertex_count(), c.edge_count(), c.face_count());
    let shifted = CellMorphism {
        vertices: g.vertices.iter().map(|v| v + nv).collect(),
        edges: g
            .edges
            .iter()
            .map(|e| EdgeImage {
                edge: e.edge + ne,
                reversed: e.reversed,
            })
            .collect(),
        faces: g
            .faces
            .iter()
            .map(|fi| FaceImage {
                face: fi.face + nf,
                align: fi.align,
            })
            .collect(),
    };
    union_morphism(f, &shifted)
}
