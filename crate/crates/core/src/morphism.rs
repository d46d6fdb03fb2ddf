//! Combinatorial maps between 2-complexes and the local-injectivity tests.

use std::collections::HashMap;

use serde::Serialize;

use crate::complex::{Corner, Dihedral, EdgeEnd, Letter, TwoComplex};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct EdgeImage {
    pub edge: usize,
    pub reversed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FaceImage {
    pub face: usize,
    pub align: Dihedral,
}

/// Cell assignments of a combinatorial map, without the complexes themselves.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CellMorphism {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeImage>,
    pub faces: Vec<FaceImage>,
}

impl CellMorphism {
    pub fn identity(x: &TwoComplex) -> Self {
        CellMorphism {
            vertices: (0..x.vertex_count()).collect(),
            edges: (0..x.edge_count())
                .map(|edge| EdgeImage { edge, reversed: false })
                .collect(),
            faces: (0..x.face_count())
                .map(|face| FaceImage {
                    face,
                    align: Dihedral::IDENTITY,
                })
                .collect(),
        }
    }

    pub fn letter(&self, l: Letter) -> Letter {
        let img = self.edges[l.edge];
        Letter {
            edge: img.edge,
            inverse: l.inverse != img.reversed,
        }
    }

    pub fn word(&self, word: &[Letter]) -> Vec<Letter> {
        word.iter().map(|&l| self.letter(l)).collect()
    }

    pub fn end(&self, end: EdgeEnd) -> EdgeEnd {
        let img = self.edges[end.edge];
        EdgeEnd {
            edge: img.edge,
            end: if img.reversed { end.end.flip() } else { end.end },
        }
    }

    /// Image of a corner; `source` supplies the face length.
    pub fn corner(&self, source: &TwoComplex, c: Corner) -> Corner {
        let img = self.faces[c.face];
        let n = source.face(c.face).len();
        Corner {
            face: img.face,
            position: img.align.corner(c.position, n),
        }
    }

    /// `self ∘ other` where `other: A -> B` and `self: B -> C`; `middle` is B.
    pub fn after(&self, other: &CellMorphism, middle: &TwoComplex) -> CellMorphism {
        CellMorphism {
            vertices: other.vertices.iter().map(|&v| self.vertices[v]).collect(),
            edges: other
                .edges
                .iter()
                .map(|img| {
                    let second = self.edges[img.edge];
                    EdgeImage {
                        edge: second.edge,
                        reversed: img.reversed != second.reversed,
                    }
                })
                .collect(),
            faces: other
                .faces
                .iter()
                .map(|img| {
                    let second = self.faces[img.face];
                    let n = middle.face(img.face).len();
                    FaceImage {
                        face: second.face,
                        align: second.align.compose(img.align, n),
                    }
                })
                .collect(),
        }
    }

    /// Checks that the assignments define a combinatorial map `source -> target`.
    pub fn check(&self, source: &TwoComplex, target: &TwoComplex) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidMap(msg));
        if self.vertices.len() != source.vertex_count()
            || self.edges.len() != source.edge_count()
            || self.faces.len() != source.face_count()
        {
            return bad("cell counts do not match the source".into());
        }
        if let Some(v) = self.vertices.iter().find(|&&v| v >= target.vertex_count()) {
            return bad(format!("vertex image {v} is not a target vertex"));
        }
        for (e, img) in self.edges.iter().enumerate() {
            if img.edge >= target.edge_count() {
                return bad(format!("edge {e} maps to unknown edge {}", img.edge));
            }
            let src = source.edge(e);
            let tgt = target.edge(img.edge);
            let (a, b) = if img.reversed {
                (tgt.term, tgt.init)
            } else {
                (tgt.init, tgt.term)
            };
            if self.vertices[src.init] != a || self.vertices[src.term] != b {
                return bad(format!("edge {e} endpoints do not match its image"));
            }
        }
        for (f, img) in self.faces.iter().enumerate() {
            if img.face >= target.face_count() {
                return bad(format!("face {f} maps to unknown face {}", img.face));
            }
            let word = &source.face(f).word;
            let tword = &target.face(img.face).word;
            if word.len() != tword.len() {
                return bad(format!("face {f} and its image have different boundary lengths"));
            }
            let n = word.len();
            if img.align.offset >= n {
                return bad(format!("face {f}: offset out of range"));
            }
            for (j, &l) in word.iter().enumerate() {
                if self.letter(l) != img.align.image_letter(tword, j) {
                    return bad(format!(
                        "face {f}: boundary letter {j} does not match the image face"
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn is_bijective(&self, source: &TwoComplex, target: &TwoComplex) -> bool {
        fn perm(images: impl Iterator<Item = usize>, n: usize) -> bool {
            let mut seen = vec![false; n];
            let mut count = 0;
            for i in images {
                if i >= n || seen[i] {
                    return false;
                }
                seen[i] = true;
                count += 1;
            }
            count == n
        }
        perm(self.vertices.iter().copied(), target.vertex_count())
            && perm(self.edges.iter().map(|e| e.edge), target.edge_count())
            && perm(self.faces.iter().map(|f| f.face), target.face_count())
            && source.vertex_count() == target.vertex_count()
            && source.edge_count() == target.edge_count()
            && source.face_count() == target.face_count()
    }

    /// Inverse of a bijective morphism.
    pub fn inverse(&self, source: &TwoComplex) -> CellMorphism {
        let mut vertices = vec![0; self.vertices.len()];
        for (v, &img) in self.vertices.iter().enumerate() {
            vertices[img] = v;
        }
        let mut edges = vec![EdgeImage { edge: 0, reversed: false }; self.edges.len()];
        for (e, img) in self.edges.iter().enumerate() {
            edges[img.edge] = EdgeImage {
                edge: e,
                reversed: img.reversed,
            };
        }
        let mut faces = vec![
            FaceImage {
                face: 0,
                align: Dihedral::IDENTITY
            };
            self.faces.len()
        ];
        for (f, img) in self.faces.iter().enumerate() {
            let n = source.face(f).len();
            faces[img.face] = FaceImage {
                face: f,
                align: img.align.inverse(n),
            };
        }
        CellMorphism {
            vertices,
            edges,
            faces,
        }
    }
}

/// A validated map between two complexes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellularMap {
    pub source: TwoComplex,
    pub target: TwoComplex,
    pub morphism: CellMorphism,
}

impl CellularMap {
    pub fn new(source: TwoComplex, target: TwoComplex, morphism: CellMorphism) -> Result<Self> {
        morphism.check(&source, &target)?;
        Ok(CellularMap {
            source,
            target,
            morphism,
        })
    }

    pub fn identity(x: &TwoComplex) -> Self {
        CellularMap {
            source: x.clone(),
            target: x.clone(),
            morphism: CellMorphism::identity(x),
        }
    }

    /// `self ∘ first`.
    pub fn after(&self, first: &CellularMap) -> Result<CellularMap> {
        if first.target != self.source {
            return Err(Error::InvalidMap("composition of non-matching maps".into()));
        }
        Ok(CellularMap {
            source: first.source.clone(),
            target: self.target.clone(),
            morphism: self.morphism.after(&first.morphism, &self.source),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkCell {
    End(EdgeEnd),
    Corner(Corner),
}

/// Two link cells at `vertex` that the map sends to the same place.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinkWitness {
    pub vertex: usize,
    pub first: LinkCell,
    pub second: LinkCell,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalCheck {
    pub holds: bool,
    pub witness: Option<LinkWitness>,
}

impl LocalCheck {
    fn from_witness(witness: Option<LinkWitness>) -> Self {
        LocalCheck {
            holds: witness.is_none(),
            witness,
        }
    }
}

/// Local injectivity: every induced link map is an embedding.
pub fn is_immersion(m: &CellularMap) -> LocalCheck {
    LocalCheck::from_witness(immersion_witness(&m.source, &m.morphism))
}

pub(crate) fn immersion_witness(source: &TwoComplex, m: &CellMorphism) -> Option<LinkWitness> {
    for v in 0..source.vertex_count() {
        let mut seen: HashMap<EdgeEnd, EdgeEnd> = HashMap::new();
        for end in source.ends_at(v) {
            if let Some(&prev) = seen.get(&m.end(end)) {
                return Some(LinkWitness {
                    vertex: v,
                    first: LinkCell::End(prev),
                    second: LinkCell::End(end),
                });
            }
            seen.insert(m.end(end), end);
        }
        let mut seen: HashMap<Corner, Corner> = HashMap::new();
        for c in source.corners_at(v) {
            let img = m.corner(source, c);
            if let Some(&prev) = seen.get(&img) {
                return Some(LinkWitness {
                    vertex: v,
                    first: LinkCell::Corner(prev),
                    second: LinkCell::Corner(c),
                });
            }
            seen.insert(img, c);
        }
    }
    None
}

/// Every induced link map is a graph immersion: at each link vertex the
/// incident corners map injectively.
pub fn is_near_immersion(m: &CellularMap) -> LocalCheck {
    LocalCheck::from_witness(near_immersion_witness(&m.source, &m.morphism))
}

pub(crate) fn near_immersion_witness(source: &TwoComplex, m: &CellMorphism) -> Option<LinkWitness> {
    for v in 0..source.vertex_count() {
        // half-edge of the link: (corner, side) where side 0 is the arriving end.
        let mut seen: HashMap<(EdgeEnd, Corner, u8), Corner> = HashMap::new();
        for c in source.corners_at(v) {
            let (a, b) = source.corner_ends(c);
            let img = m.corner(source, c);
            let reflected = m.faces[c.face].align.reflected;
            for (side, end) in [(0u8, a), (1u8, b)] {
                let img_side = if reflected { 1 - side } else { side };
                let key = (end, img, img_side);
                if let Some(&prev) = seen.get(&key) {
                    return Some(LinkWitness {
                        vertex: v,
                        first: LinkCell::Corner(prev),
                        second: LinkCell::Corner(c),
                    });
                }
                seen.insert(key, c);
            }
        }
    }
    None
}
