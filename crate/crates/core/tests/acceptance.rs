//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines always appear in the output.
//! The process fails when any criterion is red, except for criteria listed in
//! `KNOWN_RED`, which must then be red for exactly the documented reason.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use flatveech::{
    build_default, centroids, classify_matrix, compute_veech_group, delaunay_triangulation,
    distance_to_cone_set, enumerate_saddle_connections, find_copies, holonomy_set, point_images,
    shortest_saddle_length, surface::examples, ConstructedSurface, Error, Family, GroupType,
    MatrixClass, PlanarMatrix, Vec2, VeechGroup,
};

/// Orthogonality, length and distance tolerance.
const TOL: f64 = 1e-9;
/// Gauss-Bonnet tolerance per cone class.
const GB_TOL: f64 = 1e-8;
/// Tolerance for comparing holonomy vectors with the oracle.
const HOL_TOL: f64 = 1e-7;
/// Tolerance for identifying surface points.
const POINT_TOL: f64 = 1e-7;
/// Runtime budget per group computation.
const BUDGET: Duration = Duration::from_secs(60);
const NS: [usize; 6] = [3, 4, 5, 6, 7, 8];

/// Criteria expected to be red, with the reason checked by `explain_known_red`.
const KNOWN_RED: &[usize] = &[5];

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(failures: Vec<String>, ok_detail: String) -> Outcome {
    if failures.is_empty() {
        Outcome {
            pass: true,
            detail: ok_detail,
        }
    } else {
        Outcome {
            pass: false,
            detail: failures.join("; "),
        }
    }
}

struct Builds {
    dihedral: Vec<ConstructedSurface>,
    cyclic: Vec<ConstructedSurface>,
    dihedral_groups: Vec<(VeechGroup, Duration)>,
    cyclic_groups: Vec<(VeechGroup, Duration)>,
}

impl Builds {
    fn new() -> Self {
        let dihedral: Vec<_> = NS
            .iter()
            .map(|&n| build_default(Family::Dihedral, n).unwrap())
            .collect();
        let cyclic: Vec<_> = NS
            .iter()
            .map(|&n| build_default(Family::Cyclic, n).unwrap())
            .collect();
        let timed = |c: &ConstructedSurface| {
            let t = Instant::now();
            let g = compute_veech_group(&c.surface).unwrap();
            (g, t.elapsed())
        };
        Self {
            dihedral_groups: dihedral.iter().map(timed).collect(),
            cyclic_groups: cyclic.iter().map(timed).collect(),
            dihedral,
            cyclic,
        }
    }

    fn all(&self) -> impl Iterator<Item = (&ConstructedSurface, &VeechGroup)> {
        self.dihedral
            .iter()
            .zip(self.dihedral_groups.iter().map(|g| &g.0))
            .chain(
                self.cyclic
                    .iter()
                    .zip(self.cyclic_groups.iter().map(|g| &g.0)),
            )
    }
}

fn orthogonality_defect(m: &PlanarMatrix) -> f64 {
    let p = [
        m.a * m.a + m.c * m.c - 1.0,
        m.a * m.b + m.c * m.d,
        m.b * m.b + m.d * m.d - 1.0,
    ];
    p.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

fn is_reflection(m: &PlanarMatrix) -> bool {
    (m.det() + 1.0).abs() <= TOL && m.trace().abs() <= TOL
}

fn criterion_1(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    let mut slowest = Duration::ZERO;
    for (&n, (g, dt)) in NS.iter().zip(&b.dihedral_groups) {
        slowest = slowest.max(*dt);
        if g.group_type != GroupType::Dihedral(n) || g.order() != 2 * n {
            fail.push(format!(
                "N={n}: got {} of order {}",
                g.group_type,
                g.order()
            ));
        }
        for m in &g.elements {
            if orthogonality_defect(m) > TOL {
                fail.push(format!("N={n}: non-orthogonal element {m:?}"));
            }
            let elliptic = m.det() > 0.0 && classify_matrix(m).ok() == Some(MatrixClass::Elliptic);
            if !(elliptic || is_reflection(m)) {
                fail.push(format!(
                    "N={n}: element neither elliptic nor a reflection {m:?}"
                ));
            }
        }
        if *dt > BUDGET {
            fail.push(format!("N={n}: took {dt:?}"));
        }
    }
    outcome(
        fail,
        format!("D3..D8 with 2N orthogonal elements, slowest {slowest:.1?}"),
    )
}

fn criterion_2(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    for (&n, (g, _)) in NS.iter().zip(&b.cyclic_groups) {
        if g.group_type != GroupType::Cyclic(n) || g.order() != n {
            fail.push(format!(
                "N={n}: got {} of order {}",
                g.group_type,
                g.order()
            ));
        }
        if g.elements.iter().any(|m| m.det() < 0.0) {
            fail.push(format!("N={n}: a det -1 element survived"));
        }
    }
    outcome(fail, "C3..C8 with N elements, no reflections".into())
}

fn criterion_3(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    for c in b.dihedral.iter().filter(|c| c.spec.n % 2 == 0) {
        let n = c.spec.n;
        let l2 = c.spec.l2;
        let shortest = shortest_saddle_length(&c.surface).unwrap();
        if (shortest - l2).abs() > TOL {
            fail.push(format!("N={n}: shortest {shortest} != l2 {l2}"));
            continue;
        }
        let short = enumerate_saddle_connections(&c.surface, l2 * (1.0 + 1e-9)).unwrap();
        let copies = find_copies(&c.surface, &c.spec.square().unwrap()).unwrap();
        if copies.len() != n {
            fail.push(format!(
                "N={n}: {} squares bounded by shortest connections",
                copies.len()
            ));
        }
        let short_mids: Vec<_> = short.iter().map(|s| common::midpoint(&s.segment)).collect();
        let mut covered = vec![false; short.len()];
        for copy in &copies {
            for piece in &copy.boundary {
                if (piece.length() - l2).abs() > TOL {
                    fail.push(format!("N={n}: square side of length {}", piece.length()));
                }
                match common::find_point(
                    &c.surface,
                    &short_mids,
                    common::midpoint(&piece.segment),
                    POINT_TOL,
                ) {
                    Some(i) => covered[i] = true,
                    None => fail.push(format!("N={n}: square side is not a shortest connection")),
                }
            }
        }
        if covered.iter().any(|c| !c) {
            fail.push(format!("N={n}: a shortest connection bounds no square"));
        }
    }
    outcome(
        fail,
        "N=4,6,8: shortest = l2, shortest connections are exactly the N square boundaries".into(),
    )
}

fn criterion_4(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    for c in b.dihedral.iter().filter(|c| c.spec.n % 2 == 0) {
        let n = c.spec.n;
        let q1 = find_copies(&c.surface, &c.spec.central_polygon().unwrap()).unwrap();
        if q1.len() != 1 || !c.surface.same_point(q1[0].centroid, c.o, POINT_TOL) {
            fail.push(format!("N={n}: {} central copies", q1.len()));
        }
        let cents = centroids(&c.surface, &c.spec.square().unwrap()).unwrap();
        let matched: Vec<_> =
            c.p.iter()
                .map(|p| common::find_point(&c.surface, &cents, *p, POINT_TOL))
                .collect();
        let mut idx: Vec<_> = matched.iter().flatten().copied().collect();
        idx.sort_unstable();
        idx.dedup();
        if cents.len() != n || idx.len() != n {
            fail.push(format!("N={n}: square centroids do not match P_1..P_N"));
        }
    }
    outcome(
        fail,
        "N=4,6,8: one central copy at O, square centroids = {P_i}".into(),
    )
}

/// Straight-line length from `O` to `P_i` in the cyclic builds, where `a` is
/// the apothem of the central polygon.
fn cyclic_segment_length(c: &ConstructedSurface) -> f64 {
    let a = c.spec.l1 / (2.0 * (c.theta / 2.0).tan());
    ((a + c.spec.l2 / 2.0).powi(2) + c.spec.l3.powi(2)).sqrt()
}

fn criterion_5(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    for c in b.dihedral.iter().chain(&b.cyclic) {
        let expect = c.spec.l1 / (2.0 * (c.theta / 2.0).tan()) + c.spec.l2 / 2.0;
        let worst =
            c.s.iter()
                .map(|s| (s.length - expect).abs())
                .fold(0.0, f64::max);
        if worst > TOL {
            fail.push(format!(
                "{} N={}: |S_i| - formula = {worst:.3e}",
                c.spec.kind, c.spec.n
            ));
        }
    }
    outcome(fail, "all S_i match l1/(2 tan(theta/2)) + l2/2".into())
}

/// Checks that criterion 5 is red only on cyclic builds, and only because
/// the offset squares move `P_i` off the perpendicular through the side
/// midpoint.
fn explain_known_red_5(b: &Builds) -> Result<String, String> {
    for c in &b.dihedral {
        let expect = c.spec.l1 / (2.0 * (c.theta / 2.0).tan()) + c.spec.l2 / 2.0;
        if c.s.iter().any(|s| (s.length - expect).abs() > TOL) {
            return Err(format!("dihedral N={} is red as well", c.spec.n));
        }
    }
    for c in &b.cyclic {
        let expect = cyclic_segment_length(c);
        if c.s.iter().any(|s| (s.length - expect).abs() > TOL) {
            return Err(format!(
                "cyclic N={} differs from sqrt((a + l2/2)^2 + l3^2)",
                c.spec.n
            ));
        }
    }
    Ok("dihedral builds match; cyclic S_i equal sqrt((a + l2/2)^2 + l3^2) with a = l1/(2 tan(theta/2))".into())
}

fn criterion_6(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    for c in b.dihedral.iter().filter(|c| c.spec.n % 2 == 1) {
        let l2 = c.spec.l2;
        for (k, p) in c.p.iter().enumerate() {
            let i = k + 1;
            let expect = if i % 2 == 0 {
                2f64.sqrt() * l2 / 2.0
            } else {
                l2 / 2.0
            };
            let d = distance_to_cone_set(&c.surface, *p, 2.0 * l2).unwrap();
            if (d - expect).abs() > TOL {
                fail.push(format!("N={} P{i}: {d} != {expect}", c.spec.n));
            }
        }
    }
    outcome(
        fail,
        "N=3,5,7: d(P_i) = sqrt2 l2/2 (even i), l2/2 (odd i)".into(),
    )
}

fn criterion_7(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    let mut checked = 0;
    for (c, g) in b.all() {
        for poly in [c.spec.central_polygon().unwrap(), c.spec.square().unwrap()] {
            let cents = centroids(&c.surface, &poly).unwrap();
            for m in &g.elements {
                checked += 1;
                let ok = match point_images(&c.surface, m, &cents).unwrap() {
                    Some(img) => {
                        let mut seen = vec![false; cents.len()];
                        img.iter().all(|i| match i {
                            Some(j) if !seen[*j] => {
                                seen[*j] = true;
                                true
                            }
                            _ => false,
                        })
                    }
                    None => false,
                };
                if !ok {
                    fail.push(format!(
                        "{} N={}: element {m:?} does not permute {} centroids",
                        c.spec.kind,
                        c.spec.n,
                        cents.len()
                    ));
                }
            }
        }
    }
    outcome(
        fail,
        format!("{checked} element/polygon pairs permute centroids"),
    )
}

fn criterion_8(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    let mut total = 0;
    for (c, g) in b.all() {
        for m in &g.elements {
            total += 1;
            match classify_matrix(m) {
                Ok(MatrixClass::Elliptic) => {}
                other => fail.push(format!(
                    "{} N={}: {m:?} classified {other:?}",
                    c.spec.kind, c.spec.n
                )),
            }
        }
    }
    outcome(fail, format!("{total} elements, 0 parabolic, 0 hyperbolic"))
}

fn criterion_9(b: &Builds) -> Outcome {
    let mut fail = Vec::new();
    let mut compared = 0;
    for c in b.dihedral.iter().chain(&b.cyclic) {
        let tag = format!("{} N={}", c.spec.kind, c.spec.n);
        let (lhs, rhs) = c.surface.gauss_bonnet();
        let classes = c.surface.vertex_classes().len() as f64;
        if (lhs - rhs).abs() > GB_TOL * classes {
            fail.push(format!("{tag}: Gauss-Bonnet {lhs} vs {rhs}"));
        }
        let tri = delaunay_triangulation(&c.surface).unwrap();
        if !tri.is_delaunay() {
            fail.push(format!(
                "{tag}: Delaunay defect {:.3e}",
                tri.delaunay_defect()
            ));
        }
        if c.spec.n <= 5 {
            let bound = 3.0 * c.spec.l2;
            let oracle = common::oracle_holonomies(&c.surface, bound);
            let set = holonomy_set(&c.surface, bound).unwrap();
            let mut lib: Vec<Vec2> = set
                .vectors
                .iter()
                .flat_map(|(v, m)| std::iter::repeat_n(*v, *m))
                .collect();
            common::sort_vectors(&mut lib);
            compared += oracle.len();
            if !common::same_vectors(&oracle, &lib, HOL_TOL) {
                fail.push(format!(
                    "{tag}: oracle {} vs library {} connections",
                    oracle.len(),
                    lib.len()
                ));
            }
        }
    }
    outcome(
        fail,
        format!("Gauss-Bonnet and Delaunay on 12 builds; {compared} oriented connections match the oracle"),
    )
}

fn criterion_10() -> Outcome {
    let mut fail = Vec::new();
    match compute_veech_group(&examples::square_torus()) {
        Err(Error::NoConePoints) => {}
        other => fail.push(format!("torus: expected NoConePoints, got {other:?}")),
    }
    let oct = examples::regular_octagon(1.0);
    match compute_veech_group(&oct) {
        Ok(g) => {
            if !g.contains(&PlanarMatrix::rotation(PI / 4.0)) {
                fail.push("octagon: rotation by pi/4 missing".into());
            }
            if !g.isometric_only {
                fail.push("octagon: not flagged as isometric subgroup".into());
            }
        }
        Err(e) => fail.push(format!("octagon: {e}")),
    }
    outcome(
        fail,
        "torus -> NoConePoints; octagon contains rot(pi/4), isometric subgroup only".into(),
    )
}

fn main() {
    let start = Instant::now();
    let builds = Builds::new();
    let results: Vec<(usize, Outcome)> = vec![
        (1, criterion_1(&builds)),
        (2, criterion_2(&builds)),
        (3, criterion_3(&builds)),
        (4, criterion_4(&builds)),
        (5, criterion_5(&builds)),
        (6, criterion_6(&builds)),
        (7, criterion_7(&builds)),
        (8, criterion_8(&builds)),
        (9, criterion_9(&builds)),
        (10, criterion_10()),
    ];
    let mut unexpected = Vec::new();
    for (id, r) in &results {
        println!(
            "criterion {id:>2}: {} - {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.detail
        );
        if !r.pass {
            if KNOWN_RED.contains(id) {
                match explain_known_red_5(&builds) {
                    Ok(why) => println!("              known deviation: {why}"),
                    Err(e) => unexpected.push(format!("criterion {id}: {e}")),
                }
            } else {
                unexpected.push(format!("criterion {id}"));
            }
        } else if KNOWN_RED.contains(id) {
            println!("              expected red but passed");
        }
    }
    let passed = results.iter().filter(|(_, r)| r.pass).count();
    println!(
        "acceptance: {passed}/{} PASS in {:.1?}",
        results.len(),
        start.elapsed()
    );
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {}", unexpected.join(", "));
        std::process::exit(1);
    }
}
