//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//!
//! Expected values on the census side are recomputed here from the
//! polynomials, and totals are checked against q^{2n²}, rather than read
//! back from the reports' own `expected` fields.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nilcone::combinatorics::*;
use nilcone::cones::*;
use nilcone::maps::*;
use nilcone::polycount::*;

type Outcome = Result<String, String>;

fn bp(mu: &[u32], nu: &[u32]) -> Bipartition {
    Bipartition::from_parts(mu, nu).unwrap()
}

fn part(p: &[u32]) -> Partition {
    Partition::new(p.to_vec()).unwrap()
}

fn poly(terms: &[(u32, i64)]) -> IntPolynomial {
    IntPolynomial::from_terms(terms)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn at(p: &IntPolynomial, q: u32) -> u64 {
    u64::try_from(p.evaluate(q as i64)).expect("count fits in u64")
}

fn nilpotent_total(n: u32, q: u32) -> u64 {
    (q as u64).pow(2 * n * n)
}

/// The Q₂ labels in the order the reference tables list them.
fn q2() -> [Bipartition; 5] {
    [bp(&[2], &[]), bp(&[1], &[1]), bp(&[], &[2]), bp(&[1, 1], &[]), bp(&[], &[1, 1])]
}

fn map_tables() -> Outcome {
    let tables: [(&str, fn(&Bipartition) -> Partition, [Partition; 5]); 3] = [
        ("Φ^C", phi_c, [part(&[4]), part(&[2, 2]), part(&[2, 2]), part(&[2, 1, 1]), part(&[1, 1, 1, 1])]),
        ("Φ^B", phi_b, [part(&[5]), part(&[3, 1, 1]), part(&[2, 2, 1]), part(&[3, 1, 1]), part(&[1; 5])]),
        ("Φ^{B,2}", phi_b2, [part(&[3, 2]), part(&[2, 2, 1]), part(&[2, 2, 1]), part(&[2, 1, 1, 1]), part(&[1; 5])]),
    ];
    for (name, phi, expected) in tables {
        for (label, want) in q2().iter().zip(expected) {
            let got = phi(label);
            ensure(got == want, || format!("{name}{label} = {got}, table says {want}"))?;
        }
    }
    Ok("15 table entries".into())
}

fn minspecial() -> Outcome {
    let q6 = poly(&[(6, 1), (0, -1)]);
    let (a, b, c) = (bp(&[1], &[1, 1]), bp(&[], &[2, 1]), bp(&[1, 1, 1], &[]));
    let mut checks = vec![
        ("orbit (1;1,1)", exotic_point_poly(&a), poly(&[(4, 1), (0, -1)]) * q6.clone()),
        ("orbit (;2,1)", exotic_point_poly(&b), poly(&[(2, 1), (0, 1)]) * q6.clone()),
        ("orbit (1,1,1;)", exotic_point_poly(&c), q6.clone()),
        ("B piece (1;1,1)", piece_poly(PieceKind::B, &a).unwrap(), poly(&[(4, 1)]) * q6.clone()),
        ("B piece (;2,1)", piece_poly(PieceKind::B, &b).unwrap(), poly(&[(2, 1), (0, 1)]) * q6.clone()),
        ("C piece (1;1,1)", piece_poly(PieceKind::C, &a).unwrap(), poly(&[(4, 1), (2, 1)]) * q6.clone()),
        ("C piece (1,1,1;)", piece_poly(PieceKind::C, &c).unwrap(), q6.clone()),
        ("special (1;1,1)", piece_poly(PieceKind::Special, &a).unwrap(), poly(&[(4, 1), (2, 1), (0, 1)]) * q6.clone()),
        ("typeB (1;1,1)", type_b_point_poly(&a).unwrap(), poly(&[(4, 1)]) * q6.clone()),
        ("typeB (;2,1)", type_b_point_poly(&b).unwrap(), poly(&[(2, 1), (0, 1)]) * q6.clone()),
        ("typeC (1;1,1)", type_c_point_poly(&a).unwrap(), poly(&[(4, 1), (2, 1)]) * q6.clone()),
        ("typeC (1,1,1;)", type_c_point_poly(&c).unwrap(), q6),
    ];
    for (name, got, want) in checks.drain(..) {
        ensure(got == want, || format!("{name}: {got} vs {want}"))?;
    }
    ensure(phi_b(&a) == part(&[3, 1, 1, 1, 1]) && phi_b(&b) == part(&[2, 2, 1, 1, 1]), || {
        "type-B Jordan types of the special piece".into()
    })?;
    Ok("12 polynomials".into())
}

fn main_identities() -> Outcome {
    let mut checks = 0;
    let mut c_labels = 0;
    for n in 0..=6u32 {
        let report = verify_identities(n);
        ensure(report.passed(), || format!("n={n}: {:?}", report.failures.first()))?;
        checks += report.checks;

        // Fibers found by brute poset search, not by the collapse maps.
        let all = enumerate_bipartitions(n);
        let c_set: Vec<Bipartition> = all.iter().filter(|b| is_c_dist(b)).cloned().collect();
        let b_set: Vec<Bipartition> = all.iter().filter(|b| is_b_dist(b)).cloned().collect();
        let s_set: Vec<Bipartition> = all.iter().filter(|b| is_special(b)).cloned().collect();
        let fiber = |set: &[Bipartition], target: &Bipartition| -> IntPolynomial {
            all.iter()
                .filter(|r| common::brute_min(r, set) == Some(target))
                .map(exotic_point_poly)
                .sum()
        };
        for t in &c_set {
            c_labels += (n == 6) as usize;
            let explicit = type_c_point_poly(t).unwrap();
            ensure(fiber(&c_set, t) == explicit, || format!("C-piece sum at {t}"))?;
        }
        for s in &s_set {
            let piece = fiber(&s_set, s);
            let via_c: IntPolynomial = c_set
                .iter()
                .filter(|r| common::brute_min(r, &s_set) == Some(s))
                .map(|r| type_c_point_poly(r).unwrap())
                .sum();
            let via_b: IntPolynomial = b_set
                .iter()
                .filter(|r| common::brute_min(r, &s_set) == Some(s))
                .map(|r| type_b_point_poly(r).unwrap())
                .sum();
            ensure(piece == via_c && via_c == via_b, || format!("special triple at {s}"))?;
        }
        let total: IntPolynomial = all.iter().map(exotic_point_poly).sum();
        let typec: IntPolynomial = c_set.iter().map(|r| type_c_point_poly(r).unwrap()).sum();
        let typeb: IntPolynomial = b_set.iter().map(|r| type_b_point_poly(r).unwrap()).sum();
        let top = IntPolynomial::monomial(2 * n * n, 1);
        ensure(total == top && typec == top && typeb == top, || format!("totals ≠ t^{} at n={n}", 2 * n * n))?;
    }
    Ok(format!("{checks} library identities, {c_labels} C-distinguished labels at n=6"))
}

fn degree_law() -> Outcome {
    let mut count = 0;
    for n in 0..=6u32 {
        for label in enumerate_bipartitions(n) {
            let deg = 2 * (n * n - b_stat(&label));
            let mut polys = vec![exotic_point_poly(&label)];
            if is_c_dist(&label) {
                polys.push(type_c_point_poly(&label).unwrap());
            }
            if is_b_dist(&label) {
                polys.push(type_b_point_poly(&label).unwrap());
            }
            for p in polys {
                count += 1;
                ensure(p.degree() == Some(deg) && p.leading_coefficient() == 1, || {
                    format!("{label}: {p} should have degree {deg} and be monic")
                })?;
            }
        }
    }
    Ok(format!("{count} polynomials"))
}

fn census(cone: Cone, n: u32, q: u32) -> Result<CensusReport, String> {
    let r = run_census(cone, n, q, false).map_err(|e| format!("{cone} n={n} q={q}: {e}"))?;
    ensure(r.passed && r.violation_count == 0, || {
        format!("{cone} n={n} q={q}: {:?} {:?}", r.failures().next(), r.violations.first())
    })?;
    ensure(r.points == nilpotent_total(n, q), || {
        format!("{cone} n={n} q={q}: {} nilpotent points, expected q^{}", r.points, 2 * n * n)
    })?;
    let orbit_sum: u64 = r.lines_of(LineKind::Orbit).map(|l| l.tally).sum();
    ensure(orbit_sum == r.points, || format!("{cone} n={n} q={q}: orbit tallies do not cover"))?;
    Ok(r)
}

/// Every line of `kind` matches `expected(label)` at q, and the lines cover `labels`.
fn lines_match(
    r: &CensusReport,
    kind: LineKind,
    labels: &[Bipartition],
    expected: impl Fn(&Bipartition) -> IntPolynomial,
) -> Result<usize, String> {
    let lines: Vec<&CensusLine> = r.lines_of(kind).collect();
    ensure(lines.len() == labels.len(), || {
        format!("{} n={} q={}: {} {} lines for {} labels", r.cone, r.n, r.q, lines.len(), kind.name(), labels.len())
    })?;
    for l in lines {
        let want = at(&expected(&l.label), r.q);
        ensure(l.tally == want, || {
            format!("{} n={} q={}: {} {} tally {} vs {want}", r.cone, r.n, r.q, kind.name(), l.label, l.tally)
        })?;
    }
    Ok(labels.len())
}

fn labels(n: u32, pred: fn(&Bipartition) -> bool) -> Vec<Bipartition> {
    enumerate_bipartitions(n).into_iter().filter(|b| pred(b)).collect()
}

const SMALL: [(u32, u32); 3] = [(2, 2), (2, 4), (3, 2)];

fn sp_char2() -> Outcome {
    let mut lines = 0;
    for (n, q) in SMALL {
        let r = census(Cone::Sp2, n, q)?;
        lines += lines_match(&r, LineKind::Orbit, &labels(n, |_| true), exotic_point_poly)?;
        lines += lines_match(&r, LineKind::Jordan, &labels(n, is_c_dist), |b| type_c_point_poly(b).unwrap())?;
        for l in r.lines_of(LineKind::Jordan) {
            ensure(l.jordan_type.as_ref() == Some(&phi_c(&l.label)), || format!("Jordan type of {}", l.label))?;
        }
    }
    Ok(format!("{lines} exact tallies"))
}

fn o_char2() -> Outcome {
    let mut lines = 0;
    for (n, q) in SMALL {
        let r = census(Cone::O2, n, q)?;
        let tilde_fiber = |t: &Bipartition| -> IntPolynomial {
            enumerate_bipartitions(n)
                .iter()
                .filter(|r| collapse_tilde(r) == *t)
                .map(exotic_point_poly)
                .sum()
        };
        lines += lines_match(&r, LineKind::Orbit, &labels(n, is_b2_dist), tilde_fiber)?;
        lines += lines_match(&r, LineKind::PieceB, &labels(n, is_b_dist), |b| type_b_point_poly(b).unwrap())?;
    }
    Ok(format!("{lines} exact tallies"))
}

fn odd_char() -> Outcome {
    let mut lines = 0;
    for q in [3, 5] {
        let r = census(Cone::SpOdd, 2, q)?;
        lines += lines_match(&r, LineKind::Orbit, &labels(2, is_c_dist), |b| type_c_point_poly(b).unwrap())?;
        let r = census(Cone::OOdd, 2, q)?;
        lines += lines_match(&r, LineKind::Orbit, &labels(2, is_b_dist), |b| type_b_point_poly(b).unwrap())?;
    }
    Ok(format!("{lines} exact tallies"))
}

fn exotic() -> Outcome {
    let mut lines = 0;
    for (n, q) in SMALL {
        let r = census(Cone::Exotic, n, q)?;
        let all = labels(n, |_| true);
        lines += lines_match(&r, LineKind::Orbit, &all, exotic_point_poly)?;
        let sp = run_census(Cone::Sp2, n, q, false).map_err(|e| e.to_string())?;
        for label in &all {
            let (a, b) = (r.tally(LineKind::Orbit, label), sp.tally(LineKind::Orbit, label));
            ensure(a.is_some() && a == b, || format!("n={n} q={q}: exotic {label} {a:?} vs sp {b:?}"))?;
        }
    }
    let mut maps = 0;
    for (n, q) in [(1, 2), (1, 4), (2, 2), (2, 4), (3, 2)] {
        for r in [psi_bijection_check(n, q), psi_tilde_bijection_check(n, q)] {
            let r = r.map_err(|e| e.to_string())?;
            ensure(r.passed && r.injective && r.onto && r.image_in_target, || {
                format!("{} n={n} q={q}: {r:?}", r.map)
            })?;
            ensure(r.domain == nilpotent_total(n, q) && r.target == r.domain, || {
                format!("{} n={n} q={q}: sizes {} → {}", r.map, r.domain, r.target)
            })?;
            maps += 1;
        }
    }
    Ok(format!("{lines} exact tallies, {maps} bijection checks"))
}

fn bundles() -> Outcome {
    let mut lines = 0;
    for q in [2, 4] {
        let r = bundle_check(2, q).map_err(|e| e.to_string())?;
        ensure(r.passed && r.pointwise_mismatches == 0, || format!("q={q}: {:?}", r.lines.iter().find(|l| !l.pass)))?;
        ensure(r.points == nilpotent_total(2, q), || format!("q={q}: {} points", r.points))?;
        for kind in ["E", "scriptE"] {
            let ls: Vec<&BundleLine> = r.lines.iter().filter(|l| l.kind == kind).collect();
            ensure(!ls.is_empty(), || format!("q={q}: no {kind} lines"))?;
            for l in ls {
                ensure(l.count == l.expected && l.count == l.reference, || format!("q={q}: {l:?}"))?;
                lines += 1;
            }
        }
    }
    Ok(format!("{lines} bundle counts"))
}

fn filtrations() -> Outcome {
    let mut points = 0;
    for kind in [FiltrationKind::C, FiltrationKind::B] {
        for (n, sample) in [(2, None), (3, Some(1000))] {
            let r = filtration_check(n, 2, kind, sample, 0, 2).map_err(|e| e.to_string())?;
            ensure(r.passed && r.failure_count == 0, || format!("{kind:?} n={n}: {:?}", r.failures.first()))?;
            ensure(r.points >= sample.unwrap_or(nilpotent_total(n, 2)), || format!("{kind:?} n={n}: {} points", r.points))?;
            ensure(r.perturbation_candidates > 0, || format!("{kind:?} n={n}: no perturbation candidates"))?;
            ensure(r.perturbations_adapted == 0, || format!("{kind:?} n={n}: a perturbed flag stayed adapted"))?;
            points += r.points;
        }
    }
    let mut resolutions = 0;
    for n in 0..=6 {
        for label in enumerate_bipartitions(n) {
            for (dist, kind) in [(is_c_dist(&label), CollapseKind::C), (is_b_dist(&label), CollapseKind::B)] {
                if dist {
                    let r = resolution_dim_check(&label, kind).map_err(|e| e.to_string())?;
                    ensure(r.passed, || format!("{r:?}"))?;
                    resolutions += 1;
                }
            }
        }
    }
    Ok(format!("{points} points, {resolutions} resolution counts"))
}

fn combinatorics() -> Outcome {
    let mut labels = 0;
    for n in 0..=8 {
        let mut f = common::combinatorics_failures(n);
        f.extend(common::maps_failures(n));
        ensure(f.is_empty(), || format!("n={n}: {} failures, first {}", f.len(), f[0]))?;
        labels += enumerate_bipartitions(n).len();
    }
    Ok(format!("{labels} labels"))
}

struct Criterion {
    title: &'static str,
    limit: Option<Duration>,
    run: fn() -> Outcome,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion { title: "map tables on Q_2", limit: secs(1), run: map_tables },
        Criterion { title: "minimal special piece, n=3", limit: secs(1), run: minspecial },
        Criterion { title: "piece sums and special triple equality, n<=6", limit: secs(10), run: main_identities },
        Criterion { title: "degree law, n<=6", limit: None, run: degree_law },
        Criterion { title: "char-2 symplectic censuses", limit: secs(300), run: sp_char2 },
        Criterion { title: "char-2 orthogonal censuses", limit: secs(300), run: o_char2 },
        Criterion { title: "odd-characteristic censuses", limit: secs(600), run: odd_char },
        Criterion { title: "exotic censuses and bijections", limit: secs(300), run: exotic },
        Criterion { title: "bundle identities, n=2", limit: None, run: bundles },
        Criterion { title: "filtrations and resolution dimensions", limit: None, run: filtrations },
        Criterion { title: "combinatorial invariants, n<=8", limit: secs(60), run: combinatorics },
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        let outcome = match (outcome, c.limit) {
            (Ok(_), Some(limit)) if elapsed > limit => Err(format!("took {elapsed:.2?}, limit {limit:?}")),
            (o, _) => o,
        };
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        failed += outcome.is_err() as usize;
        println!("{tag} [{:>2}] {}: {detail} ({elapsed:.2?})", i + 1, c.title);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
