//! Named complexes and actions used by the tests, the CLI corpus and the docs.

use crate::complex::{euclidean_angles, Dihedral, Edge, Face, Letter, TwoComplex};
use crate::format::{ComplexDoc, CorpusDocument, MapDoc, MorphismDoc, PushoutDoc, SubcomplexDoc};
use crate::morphism::{CellMorphism, EdgeImage, FaceImage};
use crate::rational::{frac, int, Rational};

fn f(e: usize) -> Letter {
    Letter::forward(e)
}

fn b(e: usize) -> Letter {
    Letter::backward(e)
}

/// One vertex, two loops `a`, `b`, one square `a b a⁻¹ b⁻¹` with right angles.
pub fn torus() -> TwoComplex {
    let half = frac(1, 2);
    TwoComplex::new(
        1,
        vec![Edge { init: 0, term: 0 }, Edge { init: 0, term: 0 }],
        vec![Face {
            word: vec![f(0), f(1), b(0), b(1)],
            angles: vec![half; 4],
        }],
    )
    .expect("torus is well formed")
}

/// Boundary of a tetrahedron with all angles `1/3`.
pub fn tetrahedron() -> TwoComplex {
    // edges: 0:01 1:02 2:03 3:12 4:13 5:23
    let edges = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
        .iter()
        .map(|&(init, term)| Edge { init, term })
        .collect();
    let third = frac(1, 3);
    let faces = [
        vec![f(0), f(3), b(1)],
        vec![f(0), f(4), b(2)],
        vec![f(1), f(5), b(2)],
        vec![f(3), f(5), b(4)],
    ]
    .into_iter()
    .map(|word| Face {
        word,
        angles: vec![third; 3],
    })
    .collect();
    TwoComplex::new(4, edges, faces).expect("tetrahedron is well formed")
}

/// One vertex, four loops, one octagon `a b a⁻¹ b⁻¹ c d c⁻¹ d⁻¹`, all angles `angle`.
pub fn genus_two(angle: Rational) -> TwoComplex {
    TwoComplex::new(
        1,
        vec![Edge { init: 0, term: 0 }; 4],
        vec![Face {
            word: vec![f(0), f(1), b(0), b(1), f(2), f(3), b(2), b(3)],
            angles: vec![angle; 8],
        }],
    )
    .expect("genus two surface is well formed")
}

/// A single `n`-gon with vertices `0..n`, edge `i` from `i` to `i+1`, and
/// Euclidean angles.
pub fn polygon_disk(n: usize) -> TwoComplex {
    let edges = (0..n)
        .map(|i| Edge {
            init: i,
            term: (i + 1) % n,
        })
        .collect();
    TwoComplex::new(
        n,
        edges,
        vec![Face {
            word: (0..n).map(f).collect(),
            angles: euclidean_angles(n),
        }],
    )
    .expect("polygon is well formed")
}

/// A disk made of `n` triangles around a centre vertex `0`.
///
/// Boundary vertices are `1..=n`; spoke `i` runs from the centre to `i+1`,
/// boundary edge `n+i` from `i+1` to the next boundary vertex, and face `i`
/// reads `spoke_i · boundary_i · spoke_{i+1}⁻¹`. The apex corner gets `apex`
/// and the two base corners get `base`.
pub fn fan_disk(n: usize, apex: Rational, base: Rational) -> TwoComplex {
    let mut edges: Vec<Edge> = (0..n).map(|i| Edge { init: 0, term: i + 1 }).collect();
    edges.extend((0..n).map(|i| Edge {
        init: i + 1,
        term: (i + 1) % n + 1,
    }));
    let faces = (0..n)
        .map(|i| Face {
            word: vec![f(i), f(n + i), b((i + 1) % n)],
            angles: vec![apex, base, base],
        })
        .collect();
    TwoComplex::new(n + 1, edges, faces).expect("fan is well formed")
}

/// The flat fan: apex `2/n`, base angles filling each triangle to `1`.
pub fn flat_fan(n: usize) -> TwoComplex {
    let apex = frac(2, n as i128);
    fan_disk(n, apex, (int(1) - apex) / int(2))
}

/// The fan with angles whose rotation quotient is a cone of order `n`:
/// apex `2/n`, base angles `1 - 1/n`.
pub fn cone_fan(n: usize) -> TwoComplex {
    fan_disk(n, frac(2, n as i128), int(1) - frac(1, n as i128))
}

/// The generator of the rotation action of order `n` on a fan.
pub fn fan_rotation_generator(n: usize) -> CellMorphism {
    let mut vertices = vec![0];
    vertices.extend((0..n).map(|i| (i + 1) % n + 1));
    let mut edges: Vec<EdgeImage> = (0..n)
        .map(|i| EdgeImage {
            edge: (i + 1) % n,
            reversed: false,
        })
        .collect();
    edges.extend((0..n).map(|i| EdgeImage {
        edge: n + (i + 1) % n,
        reversed: false,
    }));
    let faces = (0..n)
        .map(|i| FaceImage {
            face: (i + 1) % n,
            align: Dihedral::IDENTITY,
        })
        .collect();
    CellMorphism {
        vertices,
        edges,
        faces,
    }
}

/// The reflection of a fan with `n` even, fixing boundary vertices `1` and `n/2 + 1`.
pub fn fan_reflection_generator(n: usize) -> CellMorphism {
    assert!(n.is_multiple_of(2), "the reflection needs an even number of triangles");
    let neg = |i: usize| (n - i) % n;
    let mut vertices = vec![0];
    vertices.extend((0..n).map(|i| neg(i) + 1));
    let mut edges: Vec<EdgeImage> = (0..n)
        .map(|i| EdgeImage {
            edge: neg(i),
            reversed: false,
        })
        .collect();
    // boundary edge i joins i -> i+1 and lands on -i -> -i-1, boundary edge -i-1 reversed.
    edges.extend((0..n).map(|i| EdgeImage {
        edge: n + (2 * n - i - 1) % n,
        reversed: true,
    }));
    let faces = (0..n)
        .map(|i| FaceImage {
            face: (2 * n - i - 1) % n,
            align: Dihedral::new(2, true),
        })
        .collect();
    CellMorphism {
        vertices,
        edges,
        faces,
    }
}

/// A cone fan with its rotation generator.
pub fn fan_rotation(n: usize) -> (TwoComplex, Vec<CellMorphism>) {
    (cone_fan(n), vec![fan_rotation_generator(n)])
}

/// An `n × m` square torus with translations by one step in each direction.
pub fn torus_grid(n: usize, m: usize) -> (TwoComplex, Vec<CellMorphism>) {
    let v = |i: usize, j: usize| (i % n) * m + (j % m);
    let h = |i: usize, j: usize| v(i, j);
    let vert = |i: usize, j: usize| n * m + v(i, j);
    let mut edges = vec![Edge { init: 0, term: 0 }; 2 * n * m];
    let mut faces = Vec::new();
    let half = frac(1, 2);
    for i in 0..n {
        for j in 0..m {
            edges[h(i, j)] = Edge {
                init: v(i, j),
                term: v(i + 1, j),
            };
            edges[vert(i, j)] = Edge {
                init: v(i, j),
                term: v(i, j + 1),
            };
        }
    }
    for i in 0..n {
        for j in 0..m {
            faces.push(Face {
                word: vec![f(h(i, j)), f(vert(i + 1, j)), b(h(i, j + 1)), b(vert(i, j))],
                angles: vec![half; 4],
            });
        }
    }
    let x = TwoComplex::new(n * m, edges, faces).expect("torus grid is well formed");
    let shift = |di: usize, dj: usize| {
        let vertices = (0..n * m).map(|k| v(k / m + di, k % m + dj)).collect();
        let mut edges = vec![EdgeImage { edge: 0, reversed: false }; 2 * n * m];
        for i in 0..n {
            for j in 0..m {
                edges[h(i, j)] = EdgeImage {
                    edge: h(i + di, j + dj),
                    reversed: false,
                };
                edges[vert(i, j)] = EdgeImage {
                    edge: vert(i + di, j + dj),
                    reversed: false,
                };
            }
        }
        let faces = (0..n * m)
            .map(|k| FaceImage {
                face: v(k / m + di, k % m + dj),
                align: Dihedral::IDENTITY,
            })
            .collect();
        CellMorphism {
            vertices,
            edges,
            faces,
        }
    };
    (x, vec![shift(1, 0), shift(0, 1)])
}

/// A `k × k` grid of unit squares, a disk with right angles throughout.
pub fn square_grid(k: usize) -> TwoComplex {
    let side = k + 1;
    let v = |i: usize, j: usize| i * side + j;
    let mut edges = Vec::new();
    // horizontal edges first, then vertical
    for i in 0..side {
        for j in 0..k {
            edges.push(Edge {
                init: v(i, j),
                term: v(i, j + 1),
            });
        }
    }
    let horizontal = |i: usize, j: usize| i * k + j;
    let vertical = |i: usize, j: usize| side * k + i * side + j;
    for i in 0..k {
        for j in 0..side {
            edges.push(Edge {
                init: v(i, j),
                term: v(i + 1, j),
            });
        }
    }
    let half = frac(1, 2);
    let mut faces = Vec::new();
    for i in 0..k {
        for j in 0..k {
            faces.push(Face {
                word: vec![
                    f(horizontal(i, j)),
                    f(vertical(i, j + 1)),
                    b(horizontal(i + 1, j)),
                    b(vertical(i, j)),
                ],
                angles: vec![half; 4],
            });
        }
    }
    TwoComplex::new(side * side, edges, faces).expect("grid is well formed")
}


fn graph_morphism(vertices: Vec<usize>, edges: &[(usize, bool)]) -> CellMorphism {
    CellMorphism {
        vertices,
        edges: edges.iter().map(|&(edge, reversed)| EdgeImage { edge, reversed }).collect(),
        faces: vec![],
    }
}

fn map_doc(target: &TwoComplex, morphism: &CellMorphism) -> MapDoc {
    MapDoc {
        target: ComplexDoc::from_complex(target),
        morphism: MorphismDoc::from_morphism(morphism),
        target_action: None,
    }
}

/// The named corpus shipped as JSON documents, as `(file stem, document)`.
pub fn documents() -> Vec<(String, CorpusDocument)> {
    let mut docs = Vec::new();
    let mut add = |name: String, doc: CorpusDocument| docs.push((name, doc));
    let plain = |name: &str, x: &TwoComplex| CorpusDocument::new(Some(name), x);
    add("torus".into(), plain("torus", &torus()));
    add("tetrahedron".into(), plain("tetrahedron", &tetrahedron()));
    add("genus-two".into(), plain("genus-two", &genus_two(frac(1, 4))));
    for n in 2..=6 {
        let name = format!("cone-orbifold-{n}");
        let (x, gens) = fan_rotation(n);
        add(name.clone(), plain(&name, &x).with_action(&gens));
    }
    for n in 3..=10 {
        let name = format!("polygon-{n}");
        add(name.clone(), plain(&name, &polygon_disk(n)));
    }
    for n in 3..=6 {
        let name = format!("flat-fan-{n}");
        add(name.clone(), plain(&name, &flat_fan(n)));
    }
    let (grid, shifts) = torus_grid(2, 2);
    add("torus-grid-2x2".into(), plain("torus-grid-2x2", &grid).with_action(&shifts));
    add("square-grid-2".into(), plain("square-grid-2", &square_grid(2)));

    let boundary = |n: usize| SubcomplexDoc {
        vertices: (1..=n).collect(),
        edges: (n..2 * n).collect(),
        faces: vec![],
    };
    let mut doc = plain("disk-core-6", &cone_fan(6));
    doc.subcomplex = Some(boundary(6));
    add("disk-core-6".into(), doc);
    let mut doc = plain("disk-core-reflection-4", &cone_fan(4)).with_action(&[fan_reflection_generator(4)]);
    doc.subcomplex = Some(boundary(4));
    add("disk-core-reflection-4".into(), doc);

    let edge = TwoComplex::graph(2, vec![(0, 1)]).expect("an edge is a complex");
    let vee = TwoComplex::graph(3, vec![(0, 1), (0, 2)]).expect("a vee is a complex");
    let mut doc = plain("fold-two-edges", &vee);
    doc.map = Some(map_doc(&edge, &graph_morphism(vec![0, 1, 1], &[(0, false), (0, false)])));
    add("fold-two-edges".into(), doc);

    let point = TwoComplex::graph(1, vec![]).expect("a point is a complex");
    let to_edge = graph_morphism(vec![0], &[]);
    let mut doc = plain("pushout-wedge", &point);
    doc.pushout = Some(PushoutDoc {
        left: map_doc(&edge, &to_edge),
        right: map_doc(&edge, &to_edge),
    });
    add("pushout-wedge".into(), doc);

    let triangle = polygon_disk(3);
    let path = TwoComplex::graph(4, vec![(0, 1), (1, 2), (2, 3)]).expect("a path is a complex");
    let mut doc = plain("collapse-open-path", &path);
    doc.map = Some(map_doc(
        &triangle,
        &graph_morphism(vec![0, 1, 2, 0], &[(0, false), (1, false), (2, false)]),
    ));
    add("collapse-open-path".into(), doc);

    let t = torus();
    let mut doc = plain("torus-identity", &t);
    doc.map = Some(map_doc(&t, &CellMorphism::identity(&t)));
    add("torus-identity".into(), doc);
    docs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_automorphisms() {
        for n in 2..7 {
            let x = cone_fan(n);
            fan_rotation_generator(n).check(&x, &x).unwrap();
            if n % 2 == 0 {
                fan_reflection_generator(n).check(&x, &x).unwrap();
            }
        }
        let (grid, gens) = torus_grid(3, 2);
        for g in gens {
            g.check(&grid, &grid).unwrap();
        }
    }

    #[test]
    fn euler_characteristics() {
        assert_eq!(torus().euler_characteristic(), 0);
        assert_eq!(tetrahedron().euler_characteristic(), 2);
        assert_eq!(genus_two(frac(1, 4)).euler_characteristic(), -2);
        assert_eq!(polygon_disk(5).euler_characteristic(), 1);
        assert_eq!(flat_fan(6).euler_characteristic(), 1);
        assert_eq!(torus_grid(3, 4).0.euler_characteristic(), 0);
        assert_eq!(square_grid(3).euler_characteristic(), 1);
    }
}
