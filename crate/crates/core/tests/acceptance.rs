//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! All comparisons are exact rational equalities (tolerance 0). The only
//! pinned non-exact quantity is the Gauss-Bonnet runtime budget of one second
//! per instance.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use angled::cli;
use angled::complex::{classify_pqr, AngledGraph, Count, Edge, Face, Letter, TwoComplex};
use angled::corpus;
use angled::diagrams::{area, DiagramMap};
use angled::folding::{
    build_core, check_fold, collapse_essential_path, find_essential_path, fold,
    immersion_invariants, CollapseOutcome, CoreLimits, CoreOutcome, EquivariantMap, PathLimits, PathSearch,
    Subcomplex,
};
use angled::format::CorpusDocument;
use angled::homology::betti_1;
use angled::morphism::CellularMap;
use angled::orbihedron::{gauss_bonnet, GroupAction, Orbihedron};
use angled::rational::{frac, int};
use angled::sections::{
    certify_sectional, check_edge_augmentation, curvature_bounds, enumerate_regular_sections, graph_curvature,
    link_action, negative_orbit_bound, Augmentation, GraphAction,
};
use angled::Rational;
use common::*;
use rand::seq::SliceRandom;
use rand::Rng;

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

const GAUSS_BONNET_BUDGET: Duration = Duration::from_secs(1);
const CORE_MAX_AREA: usize = 20;
const CORE_MAX_ITERATIONS: usize = 10;
const CORE_MAX_LENGTH: usize = 10;

fn main() -> ExitCode {
    let criteria: Vec<(&str, fn() -> Verdict)> = vec![
        ("1 gauss-bonnet exactness", gauss_bonnet_exactness),
        ("2 intro formula agreement", intro_formula_agreement),
        ("3 orbit identity", orbit_identity),
        ("4 regular-section oracle", regular_section_oracle),
        ("5 fold soundness", fold_soundness),
        ("6 collapse monotonicity", collapse_monotonicity),
        ("7 core construction", core_construction),
        ("8 edge augmentation", edge_augmentation),
        ("9 negative orbit bound", negative_orbit_bound_holds),
        ("10 pqr corollary table", pqr_table),
        ("11 cli determinism and round-trip", cli_determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(check))
            .unwrap_or_else(|p| Err(format!("panicked: {}", panic_message(&p))));
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("PASS criterion {name}: {detail} ({secs:.2}s)"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} ({secs:.2}s)");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn panic_message(p: &Box<dyn std::any::Any + Send>) -> String {
    if let Some(s) = p.downcast_ref::<&str>() {
        s.to_string()
    } else if let Some(s) = p.downcast_ref::<String>() {
        s.clone()
    } else {
        "unknown panic".into()
    }
}

fn check_gauss_bonnet(name: &str, o: &Orbihedron) -> Result<(), String> {
    let start = Instant::now();
    let report = gauss_bonnet(o);
    let elapsed = start.elapsed();
    ensure(report.residual == Rational::from_integer(0), || {
        format!("{name}: residual {}", report.residual)
    })?;
    ensure(elapsed < GAUSS_BONNET_BUDGET, || format!("{name}: took {elapsed:?}"))
}

fn gauss_bonnet_exactness() -> Verdict {
    let mut named = 0;
    for (name, doc) in corpus::documents() {
        let o = doc.orbihedron().map_err(|e| format!("{name}: {e}"))?;
        check_gauss_bonnet(&name, &o)?;
        named += 1;
    }
    ensure(named >= 20, || format!("only {named} named complexes"))?;
    let genus = gauss_bonnet(&Orbihedron::trivial(&corpus::genus_two(frac(1, 4))));
    ensure(genus.euler_characteristic == int(-2), || "genus-two χ is not −2".into())?;
    let mut rng = rng(1);
    for i in 0..200 {
        check_gauss_bonnet(&format!("random weighted complex {i}"), &random_weighted(&mut rng))?;
    }
    Ok(format!("{named} named complexes and 200 random weighted complexes, residual 0"))
}

fn intro_formula_agreement() -> Verdict {
    let mut rng = rng(2);
    for i in 0..200 {
        let g = random_multigraph(&mut rng, 8, 12);
        let w = graph_curvature(&g, &GraphAction::trivial(&g)).map_err(|e| e.to_string())?;
        let expected = intro_curvature(&g);
        ensure(w == expected, || format!("graph {i}: W = {w}, 2 − χ − Σ∠ = {expected}"))?;
    }
    Ok("200 random multigraphs (≤ 12 edges) agree exactly".into())
}

fn orbit_identity() -> Verdict {
    let mut rng = rng(3);
    let mut nontrivial = 0;
    for i in 0..100 {
        let (g, action, order) = random_graph_action(&mut rng);
        let w_h = graph_curvature(&g, &action).map_err(|e| e.to_string())?;
        let w_1 = graph_curvature(&g, &GraphAction::trivial(&g)).map_err(|e| e.to_string())?;
        ensure(int(order as i128) * w_h == w_1, || {
            format!("action {i}: |H| = {order}, W(H) = {w_h}, W(1) = {w_1}")
        })?;
        nontrivial += usize::from(order > 1);
    }
    Ok(format!("100 random actions ({nontrivial} nontrivial) satisfy |H|·W(H,Δ) = W(1,Δ)"))
}

fn compare_sections(what: &str, g: &AngledGraph, h: &GraphAction) -> Result<usize, String> {
    let fast: BTreeSet<Vec<usize>> = enumerate_regular_sections(g, h).into_iter().map(|s| s.edges).collect();
    let slow = oracle_regular_sections(g, h.elements());
    ensure(fast == slow, || format!("{what}: {} sections vs oracle {}", fast.len(), slow.len()))?;
    Ok(fast.len())
}

fn regular_section_oracle() -> Verdict {
    let one = Rational::from_integer(1);
    let triangle = AngledGraph::angled(3, &[(0, 1, one), (1, 2, one), (2, 0, one)]).unwrap();
    let theta = AngledGraph::angled(2, &[(0, 1, one), (0, 1, one), (0, 1, one)]).unwrap();
    let t = compare_sections("triangle", &triangle, &GraphAction::trivial(&triangle))?;
    let th = compare_sections("theta", &theta, &GraphAction::trivial(&theta))?;
    ensure(t == 1 && th == 4, || format!("triangle {t}, theta {th}"))?;
    let mut graphs = 0;
    for (name, doc) in corpus::documents() {
        let a = doc.action().map_err(|e| format!("{name}: {e}"))?;
        for v in 0..a.carrier().vertex_count() {
            for sub in a.group().subgroups_within(&a.vertex_stabilizer(v)) {
                let (link, h) = link_action(&a, v, &sub.elements).map_err(|e| e.to_string())?;
                if link.edge_count() <= 10 {
                    compare_sections(&format!("{name} vertex {v}"), &link, &h)?;
                    graphs += 1;
                }
            }
        }
    }
    Ok(format!("triangle 1, theta 4, {graphs} corpus links (with stabilizer subgroups) match the oracle"))
}

fn fold_soundness() -> Verdict {
    let targets = fold_targets();
    let mut rng = rng(5);
    let (mut done, mut folded, mut attempts) = (0, 0, 0);
    while done < 200 {
        attempts += 1;
        ensure(attempts < 20_000, || format!("only {done} maps generated"))?;
        let (name, target) = &targets[done % targets.len()];
        let Some(m) = random_equivariant_map(&mut rng, target, MapOptions::default()) else { continue };
        ensure(m.map().source.cell_count() <= 30, || "source too large".into())?;
        let f = fold(&m).map_err(|e| format!("{name}: {e}"))?;
        let check = check_fold(&m, &f);
        ensure(check.holds(), || format!("{name} map {done}: {check:?}"))?;
        ensure(oracle_is_immersion(&f.complex, &f.i), || format!("{name} map {done}: oracle rejects immersion"))?;
        ensure(f.i.after(&f.q, &f.complex) == m.map().morphism, || format!("{name} map {done}: i ∘ q ≠ m"))?;
        let again = EquivariantMap::new(
            CellularMap::new(f.complex.clone(), m.map().target.clone(), f.i.clone()).map_err(|e| e.to_string())?,
            f.action.clone(),
            target.clone(),
        )
        .map_err(|e| e.to_string())?;
        let twice = fold(&again).map_err(|e| e.to_string())?;
        ensure(twice.rounds == 0 && twice.complex == f.complex, || {
            format!("{name} map {done}: second fold changed the complex")
        })?;
        folded += usize::from(f.rounds > 0);
        done += 1;
    }
    Ok(format!("200 random equivariant maps ({folded} needed folding) fold soundly; refolding is a no-op"))
}

/// Whether `a` is a cyclic rotation of `b` or of its inverse.
fn same_cycle(a: &[Letter], b: &[Letter]) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let inverse: Vec<Letter> = b.iter().rev().map(|l| l.inv()).collect();
    let n = a.len();
    n == 0
        || (0..n).any(|k| (0..n).all(|i| a[i] == b[(i + k) % n]))
        || (0..n).any(|k| (0..n).all(|i| a[i] == inverse[(i + k) % n]))
}

fn check_diagram(d: &DiagramMap, image: &[Letter], bound: usize) -> Result<(), String> {
    ensure(area(&d.diagram) <= bound, || format!("diagram area {} exceeds {bound}", area(&d.diagram)))?;
    d.morphism
        .check(d.diagram.complex(), &d.target)
        .map_err(|e| format!("diagram map: {e}"))?;
    let boundary = d.morphism.word(d.diagram.boundary());
    ensure(same_cycle(&boundary, image), || "diagram boundary does not read the path image".into())
}

/// Collapses essential paths of `psi` until none is left, checking every step.
fn collapse_all(psi: EquivariantMap, steps: &mut usize) -> Result<(), String> {
    let limits = PathLimits {
        max_length: CORE_MAX_LENGTH,
        max_area: CORE_MAX_AREA,
    };
    let target = psi.target_action().clone();
    let mut psi = psi;
    for _ in 0..CORE_MAX_ITERATIONS {
        let p = match find_essential_path(&psi, limits).map_err(|e| e.to_string())? {
            PathSearch::Found(p) => p,
            _ => return Ok(()),
        };
        let before = immersion_invariants(&psi).map_err(|e| e.to_string())?.bnd_or_isolated;
        let outcome = collapse_essential_path(&psi, &p, CORE_MAX_AREA).map_err(|e| e.to_string())?;
        let CollapseOutcome::Collapsed(c) = outcome else {
            return Err(format!("no filling diagram within area {CORE_MAX_AREA}"));
        };
        let image = psi.map().morphism.word(&p.path);
        check_diagram(&c.diagram, &image, CORE_MAX_AREA)?;
        let next = c.as_equivariant(&target).map_err(|e| e.to_string())?;
        let after = immersion_invariants(&next).map_err(|e| e.to_string())?.bnd_or_isolated;
        ensure(before == c.bnd_or_isolated_before && after == c.bnd_or_isolated_after, || {
            "reported counts disagree with recomputed invariants".into()
        })?;
        ensure(after <= before, || format!("|bnd ∪ isolated| rose from {before} to {after}"))?;
        *steps += 1;
        psi = next;
    }
    Ok(())
}

fn disk_family() -> Vec<(String, GroupAction, Subcomplex)> {
    let mut out = Vec::new();
    for n in 3..=8 {
        let x = corpus::cone_fan(n);
        let y = Subcomplex::new(&x, (1..=n).collect(), (n..2 * n).collect(), vec![]).unwrap();
        out.push((format!("disk-{n}"), GroupAction::trivial(&x), y.clone()));
        if n % 2 == 0 {
            let reflection = GroupAction::with_default_cap(x.clone(), vec![corpus::fan_reflection_generator(n)]).unwrap();
            out.push((format!("disk-{n}-reflection"), reflection, y.clone()));
            let half = GroupAction::with_default_cap(x.clone(), vec![fan_half_turn(n)]).unwrap();
            out.push((format!("disk-{n}-half-turn"), half, y));
        }
    }
    out
}

fn core_limits() -> CoreLimits {
    CoreLimits {
        max_length: CORE_MAX_LENGTH,
        max_area: CORE_MAX_AREA,
        max_iterations: CORE_MAX_ITERATIONS,
    }
}

fn collapse_monotonicity() -> Verdict {
    let mut steps = 0;
    for (name, a, y) in disk_family() {
        let outcome = build_core(&a, &y, core_limits()).map_err(|e| format!("{name}: {e}"))?;
        if let CoreOutcome::Found(core) = outcome {
            for s in &core.steps {
                ensure(s.bnd_or_isolated_after <= s.bnd_or_isolated_before, || format!("{name}: step increased"))?;
                ensure(s.diagram_area <= CORE_MAX_AREA, || format!("{name}: area {}", s.diagram_area))?;
                steps += 1;
            }
        }
        let psi = y.equivariant_inclusion(&a).map_err(|e| e.to_string())?;
        collapse_all(psi, &mut steps).map_err(|e| format!("{name}: {e}"))?;
    }
    let targets = simply_connected_targets();
    let mut rng = rng(6);
    let mut immersions = 0;
    let mut attempts = 0;
    while immersions < 40 {
        attempts += 1;
        ensure(attempts < 10_000, || "too few random immersions".into())?;
        let (name, target) = &targets[immersions % targets.len()];
        let opts = MapOptions {
            max_cells: 24,
            ..MapOptions::default()
        };
        let Some(m) = random_equivariant_map(&mut rng, target, opts) else { continue };
        let f = fold(&m).map_err(|e| e.to_string())?;
        let map = CellularMap::new(f.complex.clone(), target.carrier().clone(), f.i.clone()).map_err(|e| e.to_string())?;
        let psi = EquivariantMap::new(map, f.action.clone(), target.clone()).map_err(|e| e.to_string())?;
        collapse_all(psi, &mut steps).map_err(|e| format!("{name} immersion {immersions}: {e}"))?;
        immersions += 1;
    }
    ensure(steps > 0, || "no collapse steps were exercised".into())?;
    Ok(format!("{steps} collapse steps (disk family and 40 random immersions) never increase |bnd ∪ isolated|; every path image is filled within area {CORE_MAX_AREA}"))
}

/// A subcomplex of a disk with `χ = 1`, connected and `b₁ = 0`, is simply
/// connected: planar 2-complexes have free fundamental group.
fn oracle_disk_subcomplex_simply_connected(x: &TwoComplex, z: &Subcomplex) -> bool {
    let (zc, _) = z.complex(x).unwrap();
    zc.is_connected() && zc.euler_characteristic() == 1 && betti_1(&zc) == 0
}

fn core_construction() -> Verdict {
    let mut cases = 0;
    for (name, a, y) in disk_family() {
        let outcome = build_core(&a, &y, core_limits()).map_err(|e| format!("{name}: {e}"))?;
        let CoreOutcome::Found(core) = outcome else {
            return Err(format!("{name}: {outcome:?}"));
        };
        let z = &core.subcomplex;
        ensure(core.simply_connected, || format!("{name}: not certified simply connected"))?;
        ensure(core.iterations <= CORE_MAX_ITERATIONS, || format!("{name}: {} iterations", core.iterations))?;
        let contains = |small: &[usize], big: &[usize]| small.iter().all(|c| big.contains(c));
        ensure(
            contains(&y.vertices, &z.vertices) && contains(&y.edges, &z.edges) && contains(&y.faces, &z.faces),
            || format!("{name}: core does not contain Y"),
        )?;
        z.equivariant_inclusion(&a).map_err(|e| format!("{name}: core not invariant: {e}"))?;
        ensure(oracle_disk_subcomplex_simply_connected(a.carrier(), z), || {
            format!("{name}: oracle rejects simple connectivity")
        })?;
        let again = build_core(&a, z, core_limits()).map_err(|e| e.to_string())?;
        let CoreOutcome::Found(again) = again else {
            return Err(format!("{name}: rerun on the core failed"));
        };
        ensure(again.subcomplex == *z && again.iterations == 0, || format!("{name}: not idempotent"))?;
        cases += 1;
    }
    Ok(format!("{cases} disk cases (trivial and ℤ/2) give simply connected invariant cores, idempotent"))
}

/// Curvatures `2 − V + E − Σ∠` of all regular sections, via the oracle.
fn oracle_section_curvatures(g: &AngledGraph) -> Vec<Rational> {
    let trivial = GraphAction::trivial(g);
    oracle_regular_sections(g, trivial.elements())
        .into_iter()
        .map(|edges| {
            let vertices: BTreeSet<usize> = edges.iter().flat_map(|&e| [g.edges()[e].ends.0, g.edges()[e].ends.1]).collect();
            let angles: Rational = edges.iter().map(|&e| g.edges()[e].angle.unwrap()).sum();
            int(2) - int(vertices.len() as i128) + int(edges.len() as i128) - angles
        })
        .collect()
}

fn edge_augmentation() -> Verdict {
    let big = [frac(3, 4), frac(1, 1), frac(5, 4), frac(3, 2)];
    let mut rng = rng(8);
    let (mut checked, mut strict, mut attempts) = (0, 0, 0);
    while checked < 100 {
        attempts += 1;
        ensure(attempts < 200_000, || format!("only {checked} qualifying additions"))?;
        let n = rng.gen_range(2..=6);
        let mut edges = Vec::new();
        for _ in 0..rng.gen_range(1..=8) {
            let a = rng.gen_range(0..n);
            let b = (a + rng.gen_range(1..n)) % n;
            edges.push((a, b, *big.choose(&mut rng).unwrap()));
        }
        let g = AngledGraph::angled(n, &edges).unwrap();
        let curvatures = oracle_section_curvatures(&g);
        let max = curvatures.iter().copied().max().unwrap_or(int(-1));
        if max > int(0) {
            continue;
        }
        let alpha = if rng.gen_bool(0.5) { max } else { (max + int(0)) / int(2) };
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let theta = *[int(1), int(1) + alpha + frac(1, 4), *big.choose(&mut rng).unwrap()].choose(&mut rng).unwrap();
        let report = check_edge_augmentation(&g, a, b, theta, alpha).map_err(|e| e.to_string())?;
        let claimed = report.outcome;
        if claimed == Augmentation::Inapplicable {
            continue;
        }
        let augmented = g.with_edge(a, b, theta).unwrap();
        let after = oracle_section_curvatures(&augmented);
        let ok = match claimed {
            Augmentation::StrictlyNegative => after.iter().all(|&w| w < int(0)),
            Augmentation::Nonpositive => after.iter().all(|&w| w <= int(0)),
            Augmentation::Inapplicable => unreachable!(),
        };
        ensure(ok, || {
            format!("graph {edges:?} + ({a}, {b}, θ = {theta}), α = {alpha}: claimed {claimed:?} but max is {:?}", after.iter().max())
        })?;
        strict += usize::from(claimed == Augmentation::StrictlyNegative);
        checked += 1;
    }
    Ok(format!("100 qualifying additions ({strict} strictly negative) confirmed by re-certification"))
}

fn negative_orbit_bound_holds() -> Verdict {
    let x = corpus::genus_two(frac(1, 2));
    let cert = certify_sectional(&x, int(-1)).map_err(|e| e.to_string())?;
    ensure(cert.is_certified(), || "genus-two target is not negatively certified".into())?;
    let target = GroupAction::trivial(&x);
    let bounds = curvature_bounds(&target).map_err(|e| e.to_string())?;
    let opts = MapOptions {
        max_cells: 30,
        bare_vertices: false,
        faces: true,
    };
    let mut rng = rng(9);
    let (mut done, mut attempts, mut tight) = (0, 0, 0);
    while done < 50 {
        attempts += 1;
        ensure(attempts < 10_000, || format!("only {done} immersions"))?;
        let Some(m) = random_equivariant_map(&mut rng, &target, opts) else { continue };
        let f = fold(&m).map_err(|e| e.to_string())?;
        let map = CellularMap::new(f.complex.clone(), x.clone(), f.i.clone()).map_err(|e| e.to_string())?;
        let psi = EquivariantMap::new(map, f.action.clone(), target.clone()).map_err(|e| e.to_string())?;
        let inv = immersion_invariants(&psi).map_err(|e| e.to_string())?;
        let y = &f.complex;
        let measured = (0..y.vertex_count())
            .filter(|&v| {
                let mut k = int(2) - int(y.ends_at(v).len() as i128);
                for c in y.corners_at(v) {
                    k += int(1) - y.corner_angle(c);
                }
                k < int(0)
            })
            .count();
        ensure(measured == inv.nega, || format!("immersion {done}: nega {} vs measured {measured}", inv.nega))?;
        let bound = negative_orbit_bound(inv.chi, bounds.a_pos, inv.positive, bounds.a_neg).map_err(|e| e.to_string())?;
        ensure(int(measured as i128) <= bound, || format!("immersion {done}: nega {measured} > bound {bound}"))?;
        tight += usize::from(int(measured as i128) == bound);
        done += 1;
    }
    Ok(format!(
        "50 immersions into genus two (A_neg = {}, A_pos = {}) respect the bound ({tight} tight)",
        bounds.a_neg, bounds.a_pos
    ))
}

/// Hill-climbs over complexes with faces of length `p` until the classifier
/// reports exactly `(p, q, r)`.
fn search_pqr(rng: &mut TestRng, p: usize, q: usize, r: usize, vertices: usize, edges: usize, faces: usize) -> Option<TwoComplex> {
    let score = |x: &TwoComplex| {
        let rep = classify_pqr(x);
        let got_q = match rep.q {
            Count::Finite(g) => g.min(50),
            Count::Infinite => 50,
        };
        3 * got_q.abs_diff(q) + rep.r.abs_diff(r)
    };
    let angles = vec![frac(1, 2); p];
    for _ in 0..200 {
        let edge_list: Vec<Edge> = (0..edges)
            .map(|_| Edge {
                init: rng.gen_range(0..vertices),
                term: rng.gen_range(0..vertices),
            })
            .collect();
        let mut words = Vec::new();
        for _ in 0..faces {
            words.push(random_reduced_walk(rng, vertices, &edge_list, p)?);
        }
        let build = |words: &[Vec<Letter>]| {
            let faces = words.iter().map(|w| Face { word: w.clone(), angles: angles.clone() }).collect();
            TwoComplex::new(vertices, edge_list.clone(), faces).unwrap()
        };
        let mut current = score(&build(&words));
        for _ in 0..400 {
            if current == 0 {
                return Some(build(&words));
            }
            let i = rng.gen_range(0..faces);
            let Some(w) = random_reduced_walk(rng, vertices, &edge_list, p) else { continue };
            let old = std::mem::replace(&mut words[i], w);
            let s = score(&build(&words));
            if s <= current {
                current = s;
            } else {
                words[i] = old;
            }
        }
        if current == 0 {
            return Some(build(&words));
        }
    }
    None
}

/// A closed walk without backtracking, also cyclically.
fn random_reduced_walk(rng: &mut TestRng, vertices: usize, edges: &[Edge], len: usize) -> Option<Vec<Letter>> {
    for _ in 0..200 {
        let w = random_closed_walk(rng, vertices, edges, len)?;
        if (0..len).all(|i| w[i] != w[(i + 1) % len].inv()) {
            return Some(w);
        }
    }
    None
}

fn pqr_table() -> Verdict {
    let mut rng = rng(10);
    let cases: [((usize, usize, usize), (usize, usize, usize), Option<u8>); 3] = [
        ((7, 3, 4), (1, 5, 2), Some(1)),
        ((5, 4, 3), (2, 7, 3), Some(2)),
        ((4, 5, 3), (3, 9, 4), Some(3)),
    ];
    let mut found = Vec::new();
    for ((p, q, r), (v, e, f), expected) in cases {
        let x = search_pqr(&mut rng, p, q, r, v, e, f).ok_or_else(|| format!("no ({p},{q},{r}) complex found"))?;
        let rep = classify_pqr(&x);
        ensure(
            rep.p == Count::Finite(p) && rep.q == Count::Finite(q) && rep.r == r,
            || format!("search returned {rep:?}"),
        )?;
        ensure(rep.corollary_case == expected, || {
            format!("({p},{q},{r}): case {:?}, expected {expected:?}", rep.corollary_case)
        })?;
        found.push(format!("({p},{q},{r}) -> case {}", expected.unwrap()));
    }
    let torus = classify_pqr(&corpus::torus());
    ensure(
        torus.p == Count::Finite(4) && torus.q == Count::Finite(4) && torus.r == 2 && torus.corollary_case.is_none(),
        || format!("torus: {torus:?}"),
    )?;
    Ok(format!("{}, torus (4,4,2) -> none", found.join(", ")))
}

fn run_cli(args: &[&str]) -> (i32, Vec<u8>) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["angled"];
    argv.extend_from_slice(args);
    let code = cli::run(argv, &mut std::io::empty(), &mut out, &mut err);
    (code, out)
}

const CLI_COMMANDS: [&[&str]; 8] = [
    &["validate"],
    &["link"],
    &["pqr"],
    &["euler"],
    &["gauss-bonnet"],
    &["certify", "--alpha", "0"],
    &["bounds"],
    &["invariants"],
];

fn cli_determinism() -> Verdict {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus");
    let mut files: Vec<_> = std::fs::read_dir(&dir)
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    let mut runs = 0;
    for path in &files {
        let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
        let doc = CorpusDocument::parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let again = CorpusDocument::parse(&doc.to_json()).map_err(|e| e.to_string())?;
        ensure(doc == again, || format!("{}: parse/serialize/parse differs", path.display()))?;
        ensure(doc.to_json() == text, || format!("{}: serialization is not canonical", path.display()))?;
        let file = path.to_str().unwrap();
        let mut commands: Vec<Vec<&str>> = CLI_COMMANDS.iter().map(|c| c.to_vec()).collect();
        if doc.map.is_some() {
            commands.push(vec!["fold"]);
            commands.push(vec!["collapse"]);
        }
        if doc.pushout.is_some() {
            commands.push(vec!["pushout"]);
        }
        if doc.subcomplex.is_some() {
            commands.push(vec!["core"]);
        }
        for mut args in commands {
            args.push(file);
            let first = run_cli(&args);
            let second = run_cli(&args);
            ensure(first == second, || format!("{args:?}: output differs between runs"))?;
            runs += 1;
        }
    }
    let binary = env!("CARGO_BIN_EXE_angled");
    let sample = dir.join("torus.json");
    let outputs: Vec<_> = (0..2)
        .map(|_| Command::new(binary).args(["certify", "--alpha", "0"]).arg(&sample).output().unwrap())
        .collect();
    ensure(outputs[0].stdout == outputs[1].stdout && outputs[0].status == outputs[1].status, || {
        "binary output differs between processes".into()
    })?;
    ensure(outputs[0].stdout == run_cli(&["certify", "--alpha", "0", sample.to_str().unwrap()]).1, || {
        "binary and library outputs differ".into()
    })?;
    Ok(format!("{} corpus files round-trip byte-identically; {runs} command runs repeat identical bytes", files.len()))
}
