//! First homology with rational coefficients, by exact Gaussian elimination.

use num_traits::{One, Zero};

use crate::complex::{Letter, TwoComplex};
use crate::morphism::CellMorphism;
use crate::rational::{int, Rational};

type Vector = Vec<Rational>;

/// Row-reduces `rows` in place and returns the rank.
fn row_reduce(rows: &mut [Vector]) -> usize {
    let width = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..width {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = Rational::one() / rows[rank][col];
        for x in rows[rank].iter_mut() {
            *x *= inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = rows[r][col];
                for c in col..width {
                    let delta = factor * rows[rank][c];
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank(rows: &[Vector]) -> usize {
    let mut rows = rows.to_vec();
    row_reduce(&mut rows)
}

/// A basis of `{x : Σ x_i · rows_i = 0}` where `rows` are vectors of equal width.
fn kernel_of_columns(columns: &[Vector], height: usize) -> Vec<Vector> {
    // matrix with the given columns; solve M x = 0
    let n = columns.len();
    let mut rows: Vec<Vector> = (0..height)
        .map(|r| columns.iter().map(|c| c[r]).collect())
        .collect();
    let rank = row_reduce(&mut rows);
    let mut pivots = Vec::new();
    for row in rows.iter().take(rank) {
        pivots.push(row.iter().position(|x| !x.is_zero()).expect("pivot row is nonzero"));
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut x = vec![Rational::zero(); n];
        x[free] = Rational::one();
        for (r, &p) in pivots.iter().enumerate() {
            x[p] = -rows[r][free];
        }
        basis.push(x);
    }
    basis
}

/// Boundary of each edge as a vector over the vertices.
fn edge_boundaries(x: &TwoComplex) -> Vec<Vector> {
    x.edges()
        .iter()
        .map(|e| {
            let mut v = vec![Rational::zero(); x.vertex_count()];
            v[e.term] += Rational::one();
            v[e.init] -= Rational::one();
            v
        })
        .collect()
}

/// The 1-chain traversed by a sequence of letters.
pub fn path_chain(x: &TwoComplex, path: &[Letter]) -> Vector {
    let mut c = vec![Rational::zero(); x.edge_count()];
    for l in path {
        c[l.edge] += if l.inverse { int(-1) } else { int(1) };
    }
    c
}

fn face_boundaries(x: &TwoComplex) -> Vec<Vector> {
    x.faces().iter().map(|f| path_chain(x, &f.word)).collect()
}

/// Basis of the 1-cycles.
pub fn cycle_basis(x: &TwoComplex) -> Vec<Vector> {
    kernel_of_columns(&edge_boundaries(x), x.vertex_count())
}

/// `dim H₁(X; ℚ)`.
pub fn betti_1(x: &TwoComplex) -> usize {
    let r1 = rank(&edge_boundaries(x));
    let r2 = rank(&face_boundaries(x));
    x.edge_count() - r1 - r2
}

/// Whether the closed path represents a nonzero class in `H₁(X; ℚ)`.
pub fn is_nontrivial_class(x: &TwoComplex, path: &[Letter]) -> bool {
    let mut rows = face_boundaries(x);
    let base = rank(&rows);
    rows.push(path_chain(x, path));
    rank(&rows) > base
}

/// Push-forward of a 1-chain along a morphism.
fn push_chain(m: &CellMorphism, target_edges: usize, chain: &[Rational]) -> Vector {
    let mut out = vec![Rational::zero(); target_edges];
    for (e, &c) in chain.iter().enumerate() {
        let img = m.edges[e];
        if img.reversed {
            out[img.edge] -= c;
        } else {
            out[img.edge] += c;
        }
    }
    out
}

/// Whether `m: source -> target` induces a surjection on `H₁(·; ℚ)`.
pub fn h1_surjective(source: &TwoComplex, target: &TwoComplex, m: &CellMorphism) -> bool {
    let mut rows: Vec<Vector> = cycle_basis(source)
        .iter()
        .map(|z| push_chain(m, target.edge_count(), z))
        .collect();
    rows.extend(face_boundaries(target));
    let cycles = target.edge_count() - rank(&edge_boundaries(target));
    rank(&rows) == cycles
}
