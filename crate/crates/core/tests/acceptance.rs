//! One PASS/FAIL line per acceptance criterion; exits nonzero if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use proptest::strategy::{Strategy, ValueTree};
use proptest::test_runner::TestRunner;

use chowbench_core::action::{amfm_check, analyze, critical_values, ActionError, ActionInput};
use chowbench_core::examples::{self, Example};
use chowbench_core::exactnum::{int, int_vec, rank_rat, rat, rat_from_int, Integer, Rational};
use chowbench_core::fan::{fans_equal, MorphismKind};
use chowbench_core::polytope::{canonicalize, hull, hull_tagged, normal_fan, AffineChart, LatticeTag};
use chowbench_core::quotient::{
    build_diagram, centers_report, chow_minkowski_polytope, pruning_between, DiagramOptions, QuotientDiagram,
    QuotientError,
};

type Check = Result<String, String>;

fn input(ex: &Example) -> ActionInput {
    ActionInput::new(hull(&ex.vertices).unwrap(), ex.nu.clone()).unwrap()
}

fn ints(rows: &[Vec<i64>]) -> Vec<Vec<Rational>> {
    rows.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect()
}

fn permutations(n: usize) -> Vec<Vec<i64>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for k in 0..n {
            let mut q = p.clone();
            q.insert(k, (n - 1) as i64);
            out.push(q);
        }
    }
    out
}

/// Facets of the permutahedron found by trying every 0/1 normal and keeping
/// those whose minimizing set spans a hyperplane of the (n-1)-dim polytope.
fn brute_force_facets(points: &[Vec<Rational>], n: usize) -> usize {
    (1..(1u32 << n) - 1)
        .filter(|mask| {
            let val = |p: &Vec<Rational>| -> Rational { (0..n).filter(|i| mask >> i & 1 == 1).map(|i| p[i].clone()).sum() };
            let min = points.iter().map(val).min().unwrap();
            let face: Vec<&Vec<Rational>> = points.iter().filter(|p| val(p) == min).collect();
            let diffs: Vec<Vec<Rational>> = face
                .iter()
                .map(|p| p.iter().zip(face[0]).map(|(a, b)| a - b).collect())
                .collect();
            rank_rat(&diffs) == n - 2
        })
        .count()
}

fn sorted(v: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut v = v.to_vec();
    v.sort();
    v
}

fn criterion_1() -> Check {
    let mut notes = Vec::new();
    for n in 2..=5 {
        let start = Instant::now();
        let ex = examples::cube(n).unwrap();
        let inp = input(&ex);
        let q = chow_minkowski_polytope(&inp, 0, n).map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let ambient = ints(&permutations(n));
        let chart = AffineChart::new(&ex.nu).unwrap();
        let coords: Vec<Vec<Rational>> = ambient.iter().map(|x| chart.forward(x).1).collect();
        let oracle = canonicalize(&hull_tagged(&coords, LatticeTag::Quotient).unwrap());
        if sorted(q.polytope().vertices()) != sorted(oracle.polytope.vertices()) {
            return Err(format!("n={n}: vertex set differs from the permutahedron"));
        }
        let facets = q.raw.facets().len();
        let expected = (1usize << n) - 2;
        let brute = brute_force_facets(&ambient, n);
        if facets != expected || brute != expected {
            return Err(format!("n={n}: facets {facets}, brute force {brute}, expected {expected}"));
        }
        if n == 5 && elapsed >= Duration::from_secs(10) {
            return Err(format!("n=5 took {elapsed:?} (limit 10 s)"));
        }
        notes.push(format!("n={n}: {} vertices, {facets} facets, {elapsed:.1?}", q.polytope().vertices().len()));
    }
    Ok(notes.join("; "))
}

struct Diagrams {
    cubes: Vec<(usize, QuotientDiagram)>,
    brus: QuotientDiagram,
    brus_time: Duration,
}

fn diagrams() -> Diagrams {
    let opts = DiagramOptions::default();
    let cubes = (1..=5)
        .map(|n| (n, build_diagram(&input(&examples::cube(n).unwrap()), &opts).unwrap()))
        .collect();
    let start = Instant::now();
    let brus = build_diagram(&input(&examples::brus()), &opts).unwrap();
    Diagrams {
        cubes,
        brus,
        brus_time: start.elapsed(),
    }
}

fn criterion_2(d: &Diagrams) -> Check {
    let mut checked = 0;
    for (name, diag) in d.cubes.iter().map(|(n, x)| (format!("cube_{n}"), x)).chain([("brus".to_string(), &d.brus)]) {
        for node in diag.nodes.values().filter(|n| n.j > n.i) {
            let (Some(f), Some(m)) = (node.fan(), node.minkowski.as_ref().and_then(|m| m.fan.as_ref())) else {
                return Err(format!("{name} ({}, {}): missing fan", node.i, node.j));
            };
            if !fans_equal(f, m) {
                return Err(format!("{name} ({}, {}): fiber and Minkowski fans differ", node.i, node.j));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} nodes agree exactly"))
}

fn criterion_3(d: &Diagrams) -> Check {
    let mut edges = 0;
    for (n, diag) in &d.cubes {
        let n = *n;
        for node in diag.nodes.values().filter(|n| n.j > n.i) {
            if let Some(s) = &node.smoothness {
                if !s.smooth {
                    return Err(format!("cube_{n} ({}, {}) not smooth", node.i, node.j));
                }
            } else {
                return Err(format!("cube_{n} ({}, {}) has no fan", node.i, node.j));
            }
        }
        for e in &diag.edges {
            match &e.classification {
                Some(c) if matches!(c.kind, MorphismKind::Isomorphism | MorphismKind::SmoothBlowup) => edges += 1,
                other => return Err(format!("cube_{n} {:?}->{:?}: {:?}", e.from, e.to, other.as_ref().map(|c| c.kind))),
            }
        }
        let same = |a: (usize, usize), b: (usize, usize)| match (diag.fan(a.0, a.1), diag.fan(b.0, b.1)) {
            (Some(x), Some(y)) => fans_equal(x, y),
            _ => false,
        };
        for j in 2..=n {
            if !same((0, j), (1, j)) {
                return Err(format!("cube_{n}: (0,{j}) != (1,{j})"));
            }
        }
        for i in 0..n.saturating_sub(1) {
            if !same((i, n - 1), (i, n)) {
                return Err(format!("cube_{n}: ({i},{}) != ({i},{n})", n - 1));
            }
        }
    }
    Ok(format!("all pruning nodes smooth, {edges} edges Isomorphism/SmoothBlowup, collapses hold for n<=5"))
}

fn criterion_4(d: &Diagrams) -> Check {
    let start = Instant::now();
    let inp = input(&examples::brus());
    let an = analyze(&inp).map_err(|e| e.to_string())?;
    if inp.polytope().vertices().len() != 26 {
        return Err(format!("{} vertices", inp.polytope().vertices().len()));
    }
    if an.critical_values != int_vec(&[0, 1, 3, 4]) {
        return Err(format!("critical values {:?}", an.critical_values));
    }
    if !an.smoothness.smooth || !an.equalization.equalized {
        return Err("polytope not smooth or action not equalized".into());
    }
    let diag = &d.brus;
    let blowup = diag.edge((0, 2), (0, 1)).and_then(|e| e.classification.as_ref()).ok_or("no (0,2)->(0,1) edge")?;
    if blowup.kind != MorphismKind::SmoothBlowup {
        return Err(format!("(0,2)->(0,1) is {:?}", blowup.kind));
    }
    let centers = centers_report(diag);
    let c = centers.iter().find(|c| c.from == (0, 2) && c.to == (0, 1)).unwrap();
    if c.components.len() != 1 || c.centers.iter().any(|x| x.stratum_dim != 1) {
        return Err(format!("centers {:?}", c.centers.iter().map(|x| x.stratum_dim).collect::<Vec<_>>()));
    }
    let refine = diag.edge((0, 3), (0, 2)).and_then(|e| e.classification.as_ref()).ok_or("no (0,3)->(0,2) edge")?;
    if refine.kind != MorphismKind::Refinement {
        return Err(format!("(0,3)->(0,2) is {:?}", refine.kind));
    }
    if diag.node(0, 3).and_then(|n| n.smoothness.as_ref()).map(|s| s.smooth) != Some(false) {
        return Err("CX fan reported smooth".into());
    }
    let total = start.elapsed() + d.brus_time;
    if total >= Duration::from_secs(30) {
        return Err(format!("took {total:?} (limit 30 s)"));
    }
    Ok(format!("crit (0,1,3,4); one curve center; CX singular; {total:.1?}"))
}

fn criterion_5(d: &Diagrams) -> Check {
    let mut count = 0;
    for (name, diag) in d.cubes.iter().map(|(n, x)| (format!("cube_{n}"), x)).chain([("brus".to_string(), &d.brus)]) {
        if let Some(s) = diag.squares.iter().find(|s| !s.holds) {
            return Err(format!("{name} square at {:?}: {:?}", s.top, s.diagnostic));
        }
        count += diag.squares.len();
    }
    Ok(format!("{count} squares equal the common refinement of their children"))
}

/// A rational strictly inside `(a, b)`.
fn inside(a: &Integer, b: &Integer, k: u32, d: u32) -> Rational {
    rat_from_int(a) + (rat_from_int(b) - rat_from_int(a)) * rat(k as i64, d as i64)
}

fn criterion_6() -> Check {
    let mut runner = TestRunner::deterministic();
    let strategy = (2u32..60).prop_flat_map(|d| (proptest::strategy::Just(d), 1..d, 1..d));
    let mut total = 0;
    for ex in [examples::cube(3).unwrap(), examples::brus()] {
        let inp = input(&ex);
        let crit = critical_values(&inp);
        let r = crit.len() - 1;
        for i in 0..r {
            for j in i + 1..=r {
                let mut fans = BTreeSet::new();
                let mut seen = 0;
                while seen < 50 {
                    let (d, k1, k2) = strategy.new_tree(&mut runner).unwrap().current();
                    let (lo, hi) = if j == i + 1 {
                        if k1 == k2 {
                            continue;
                        }
                        (inside(&crit[i], &crit[j], k1.min(k2), d), inside(&crit[i], &crit[j], k1.max(k2), d))
                    } else {
                        (inside(&crit[i], &crit[i + 1], k1, d), inside(&crit[j - 1], &crit[j], k2, d))
                    };
                    let p = pruning_between(&inp, &lo, &hi).map_err(|e| e.to_string())?;
                    let f = normal_fan(&p).map_err(|e| e.to_string())?;
                    fans.insert(format!("{:?}", (f.rays(), f.cones())));
                    seen += 1;
                }
                if fans.len() != 1 {
                    return Err(format!("{} chamber ({i},{j}): {} distinct fans", ex.name, fans.len()));
                }
                total += 1;
            }
        }
    }
    Ok(format!("{total} chambers, 50 random representatives each, one fan per chamber"))
}

/// Rectangle `[0,a] x [0,b]` with corners cut by diagonal lines; smooth as
/// long as no side shrinks to a point.
fn cut_rectangle(a: i64, b: i64, cuts: [i64; 4]) -> Vec<Vec<Rational>> {
    let [c0, c1, c2, c3] = cuts;
    let pts = vec![
        vec![c0, 0],
        vec![a - c1, 0],
        vec![a, c1],
        vec![a, b - c2],
        vec![a - c2, b],
        vec![c3, b],
        vec![0, b - c3],
        vec![0, c0],
    ];
    ints(&pts)
}

fn criterion_7() -> Check {
    let mut edges = 0;
    let mut named = 0;
    let mut fixed: Vec<Example> = (1..=5).map(|n| examples::cube(n).unwrap()).collect();
    fixed.extend([examples::brus(), examples::segment(), examples::square()]);
    for ex in &fixed {
        let inp = input(ex);
        let rows = amfm_check(&inp).map_err(|e| format!("{}: {e}", ex.name))?;
        if let Some(bad) = rows.iter().find(|e| !e.ok) {
            return Err(format!("{} edge {}: degree {} vs length {}", ex.name, bad.edge, bad.degree, bad.lattice_length));
        }
        edges += rows.len();
        named += 1;
    }
    let mut runner = TestRunner::deterministic();
    let shape = ((2i64..9), (2i64..9), proptest::array::uniform4(0i64..3), (-3i64..4), (-3i64..4));
    let mut polygons = 0;
    let mut tries = 0;
    while polygons < 200 && tries < 5000 {
        tries += 1;
        let (a, b, cuts, x, y) = shape.new_tree(&mut runner).unwrap().current();
        if cuts[0] + cuts[1] >= a || cuts[3] + cuts[2] >= a || cuts[0] + cuts[3] >= b || cuts[1] + cuts[2] >= b {
            continue;
        }
        if num_integer::Integer::gcd(&x, &y) != 1 {
            continue;
        }
        let p = hull(&cut_rectangle(a, b, cuts)).unwrap();
        let inp = match ActionInput::new(p, vec![int(x), int(y)]) {
            Ok(i) => i,
            Err(ActionError::TrivialAction) => continue,
            Err(e) => return Err(e.to_string()),
        };
        let an = analyze(&inp).map_err(|e| e.to_string())?;
        if !an.smoothness.smooth {
            return Err(format!("generated polygon {a}x{b} {cuts:?} is not smooth"));
        }
        if !an.equalization.equalized {
            continue;
        }
        let rows = amfm_check(&inp).map_err(|e| e.to_string())?;
        if let Some(bad) = rows.iter().find(|e| !e.ok) {
            return Err(format!("polygon {a}x{b} {cuts:?}, nu ({x},{y}): edge {}", bad.edge));
        }
        edges += rows.len();
        polygons += 1;
    }
    if polygons < 200 {
        return Err(format!("only {polygons} equalized random polygons in {tries} tries"));
    }
    Ok(format!("{edges} edges over {named} examples and {polygons} random smooth polygons"))
}

fn criterion_8() -> Check {
    let square = hull(&examples::square().vertices).unwrap();
    let bad = ActionInput::new(square.clone(), int_vec(&[2, 1])).map_err(|e| e.to_string())?;
    let an = analyze(&bad).map_err(|e| e.to_string())?;
    if an.equalization.equalized || an.equalization.offending.is_empty() {
        return Err("nu=(2,1) accepted as equalized".into());
    }
    match build_diagram(&bad, &DiagramOptions::default()) {
        Err(QuotientError::NotEqualized(k)) if k == an.equalization.offending.len() => {}
        other => return Err(format!("diagram on nu=(2,1): {:?}", other.map(|_| ()))),
    }
    let rep = ActionInput::new(square, int_vec(&[2, 2])).map_err(|e| e.to_string())?;
    if rep.nu() != int_vec(&[1, 1]).as_slice() || !rep.warnings().iter().any(|w| w.contains("re-parametrized to (1, 1)")) {
        return Err(format!("nu=(2,2) gave {:?}, warnings {:?}", rep.nu(), rep.warnings()));
    }
    Ok(format!(
        "nu=(2,1) rejected, offending edges {:?}; nu=(2,2) -> (1,1) with warning",
        an.equalization.offending
    ))
}

fn main() {
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let d = diagrams();
    let results: Vec<(u8, Check)> = vec![
        (1, criterion_1()),
        (2, criterion_2(&d)),
        (3, criterion_3(&d)),
        (4, criterion_4(&d)),
        (5, criterion_5(&d)),
        (6, criterion_6()),
        (7, criterion_7()),
        (8, criterion_8()),
    ];
    let mut failed = false;
    for (k, r) in &results {
        match r {
            Ok(msg) => println!("criterion {k}: PASS  {msg}"),
            Err(msg) => {
                failed = true;
                println!("criterion {k}: FAIL  {msg}");
            }
        }
    }
    if failed {
        std::process::exit(1);
    }
}
