//! JSON corpus documents: complexes, actions, weights, maps and paths, with
//! angles and weights written as exact rational strings in units of π.
//!
//! A document keeps its rational strings verbatim, so parsing and
//! re-serializing reproduces it exactly; conversion to the domain types
//! validates everything.

use serde::{Deserialize, Serialize};

use crate::complex::{Dihedral, Edge, Face, Letter, TwoComplex};
use crate::error::{Error, Result};
use crate::folding::{EquivariantMap, Subcomplex};
use crate::morphism::{CellMorphism, CellularMap, EdgeImage, FaceImage};
use crate::orbihedron::{GroupAction, Orbihedron};
use crate::rational::{format_rational, parse_rational, Rational};

pub const FORMAT_VERSION: u32 = 1;
pub const ANGLE_UNIT: &str = "pi";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusDocument {
    pub format_version: u32,
    /// Always `"pi"`: angles and curvatures are multiples of π.
    pub angle_unit: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub complex: ComplexDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<WeightsDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub paths: Option<Vec<PathDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subcomplex: Option<SubcomplexDoc>,
    /// A map from `complex` to another complex.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub map: Option<MapDoc>,
    /// Two maps out of `complex` to glue along.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pushout: Option<PushoutDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexDoc {
    pub vertices: usize,
    /// `[init, term]` per edge.
    pub edges: Vec<[usize; 2]>,
    pub faces: Vec<FaceDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceDoc {
    /// Letters separated by spaces; `-e` is edge `e` traversed backwards.
    pub word: String,
    /// Angle at corner `i`, between letters `i − 1` and `i`.
    pub angles: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    pub vertices: Vec<usize>,
    pub edges: Vec<EdgeImageDoc>,
    pub faces: Vec<FaceImageDoc>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeImageDoc {
    pub edge: usize,
    #[serde(default)]
    pub reversed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FaceImageDoc {
    pub face: usize,
    #[serde(default)]
    pub offset: usize,
    #[serde(default)]
    pub reflected: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ActionDoc {
    pub generators: Vec<MorphismDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightsDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
    pub faces: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathDoc {
    pub start: usize,
    pub word: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubcomplexDoc {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub faces: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDoc {
    pub target: ComplexDoc,
    pub morphism: MorphismDoc,
    /// Action on the target, generator `k` matching generator `k` of the source action.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target_action: Option<ActionDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PushoutDoc {
    pub left: MapDoc,
    pub right: MapDoc,
}

pub fn parse_letter(text: &str) -> Result<Letter> {
    let bad = || Error::Parse(format!("not a letter: {text:?}"));
    let (inverse, digits) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text),
    };
    let edge = digits.parse().map_err(|_| bad())?;
    Ok(Letter { edge, inverse })
}

/// Letters separated by whitespace or commas.
pub fn parse_word(text: &str) -> Result<Vec<Letter>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|s| !s.is_empty())
        .map(parse_letter)
        .collect()
}

pub fn format_word(word: &[Letter]) -> String {
    word.iter().map(Letter::to_string).collect::<Vec<_>>().join(" ")
}

fn parse_rationals(items: &[String]) -> Result<Vec<Rational>> {
    items.iter().map(|s| parse_rational(s)).collect()
}

fn format_rationals(items: &[Rational]) -> Vec<String> {
    items.iter().map(format_rational).collect()
}

impl ComplexDoc {
    pub fn from_complex(x: &TwoComplex) -> Self {
        ComplexDoc {
            vertices: x.vertex_count(),
            edges: x.edges().iter().map(|e| [e.init, e.term]).collect(),
            faces: x
                .faces()
                .iter()
                .map(|f| FaceDoc {
                    word: format_word(&f.word),
                    angles: format_rationals(&f.angles),
                })
                .collect(),
        }
    }

    pub fn to_complex(&self) -> Result<TwoComplex> {
        let edges = self.edges.iter().map(|&[init, term]| Edge { init, term }).collect();
        let faces = self
            .faces
            .iter()
            .map(|f| {
                Ok(Face {
                    word: parse_word(&f.word)?,
                    angles: parse_rationals(&f.angles)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        TwoComplex::new(self.vertices, edges, faces)
    }
}

impl MorphismDoc {
    pub fn from_morphism(m: &CellMorphism) -> Self {
        MorphismDoc {
            vertices: m.vertices.clone(),
            edges: m
                .edges
                .iter()
                .map(|e| EdgeImageDoc {
                    edge: e.edge,
                    reversed: e.reversed,
                })
                .collect(),
            faces: m
                .faces
                .iter()
                .map(|f| FaceImageDoc {
                    face: f.face,
                    offset: f.align.offset,
                    reflected: f.align.reflected,
                })
                .collect(),
        }
    }

    pub fn to_morphism(&self) -> CellMorphism {
        CellMorphism {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeImage {
                    edge: e.edge,
                    reversed: e.reversed,
                })
                .collect(),
            faces: self
                .faces
                .iter()
                .map(|f| FaceImage {
                    face: f.face,
                    align: Dihedral::new(f.offset, f.reflected),
                })
                .collect(),
        }
    }
}

impl ActionDoc {
    pub fn from_generators(gens: &[CellMorphism]) -> Self {
        ActionDoc {
            generators: gens.iter().map(MorphismDoc::from_morphism).collect(),
        }
    }

    pub fn to_action(&self, carrier: &TwoComplex) -> Result<GroupAction> {
        let gens = self.generators.iter().map(MorphismDoc::to_morphism).collect();
        GroupAction::with_default_cap(carrier.clone(), gens)
    }
}

fn action_or_trivial(doc: Option<&ActionDoc>, carrier: &TwoComplex) -> Result<GroupAction> {
    match doc {
        Some(a) => a.to_action(carrier),
        None => Ok(GroupAction::trivial(carrier)),
    }
}

impl CorpusDocument {
    pub fn new(name: Option<&str>, x: &TwoComplex) -> Self {
        CorpusDocument {
            format_version: FORMAT_VERSION,
            angle_unit: ANGLE_UNIT.into(),
            name: name.map(str::to_owned),
            complex: ComplexDoc::from_complex(x),
            action: None,
            weights: None,
            marked: None,
            paths: None,
            subcomplex: None,
            map: None,
            pushout: None,
        }
    }

    pub fn with_action(mut self, generators: &[CellMorphism]) -> Self {
        self.action = Some(ActionDoc::from_generators(generators));
        self
    }

    pub fn parse(text: &str) -> Result<Self> {
        let doc: CorpusDocument = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if doc.format_version != FORMAT_VERSION {
            return Err(Error::Parse(format!(
                "unsupported format_version {}, expected {FORMAT_VERSION}",
                doc.format_version
            )));
        }
        if doc.angle_unit != ANGLE_UNIT {
            return Err(Error::Parse(format!("angle_unit must be {ANGLE_UNIT:?}")));
        }
        Ok(doc)
    }

    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("documents serialize");
        s.push('\n');
        s
    }

    pub fn complex(&self) -> Result<TwoComplex> {
        self.complex.to_complex()
    }

    /// The document's action, or the trivial one.
    pub fn action(&self) -> Result<GroupAction> {
        action_or_trivial(self.action.as_ref(), &self.complex()?)
    }

    /// The weighted quotient given by `weights`, else by the action.
    pub fn orbihedron(&self) -> Result<Orbihedron> {
        match &self.weights {
            Some(w) => Orbihedron::new(
                self.complex()?,
                parse_rationals(&w.vertices)?,
                parse_rationals(&w.edges)?,
                parse_rationals(&w.faces)?,
            ),
            None => crate::orbihedron::orbihedron_from_action(&self.action()?),
        }
    }

    pub fn paths(&self) -> Result<Vec<(usize, Vec<Letter>)>> {
        self.paths
            .iter()
            .flatten()
            .map(|p| Ok((p.start, parse_word(&p.word)?)))
            .collect()
    }

    pub fn subcomplex(&self) -> Result<Option<Subcomplex>> {
        let x = self.complex()?;
        self.subcomplex
            .as_ref()
            .map(|s| Subcomplex::new(&x, s.vertices.clone(), s.edges.clone(), s.faces.clone()))
            .transpose()
    }

    fn equivariant(&self, doc: &MapDoc) -> Result<EquivariantMap> {
        let source = self.complex()?;
        let target = doc.target.to_complex()?;
        let map = CellularMap::new(source, target.clone(), doc.morphism.to_morphism())?;
        let target_action = action_or_trivial(doc.target_action.as_ref(), &target)?;
        EquivariantMap::new(map, self.action()?, target_action)
    }

    /// The `map` section as an equivariant map out of `complex`.
    pub fn map(&self) -> Result<Option<EquivariantMap>> {
        self.map.as_ref().map(|m| self.equivariant(m)).transpose()
    }

    /// The `pushout` section as two equivariant maps out of `complex`.
    pub fn pushout_maps(&self) -> Result<Option<(EquivariantMap, EquivariantMap)>> {
        self.pushout
            .as_ref()
            .map(|p| Ok((self.equivariant(&p.left)?, self.equivariant(&p.right)?)))
            .transpose()
    }

    /// Converts every section, reporting the first problem.
    pub fn validate(&self) -> Result<()> {
        let x = self.complex()?;
        self.action()?;
        if self.weights.is_some() {
            self.orbihedron()?;
        }
        for &v in self.marked.iter().flatten() {
            x.check_vertex(v)?;
        }
        for (start, word) in self.paths()? {
            x.check_vertex(start)?;
            if let Some((s, _)) = x.path_endpoints(&word)? {
                if s != start {
                    return Err(Error::InvalidPath(format!("path does not start at vertex {start}")));
                }
            }
        }
        self.subcomplex()?;
        self.map()?;
        self.pushout_maps()?;
        Ok(())
    }
}
