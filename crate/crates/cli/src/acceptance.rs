//! The acceptance criteria, runnable from `padic selftest` and from the
//! `acceptance` test target. Each criterion reports pass or fail with a
//! one-line detail and its wall time; criteria with a time budget fail
//! when they exceed it.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use padic_core::dynamics::{
    derivative_norm, ergodicity_verdict, induced_cell_map, minimal_invariant_ball, orbit, verify_isometry,
    DynamicsConfig, ErgodicityReport, ErgodicityVerdict, IsometryCheck, IsometryWitness, NotErgodicReason,
    RationalMap, RhoOutcome,
};
use padic_core::geometry::DEFAULT_CELL_CAP;
use padic_core::groups::{check_group_axioms, iso, BallGroup, CarrierGroup, Group, SphereGroup};
use padic_core::measure::{haar_clopen, invariance_check, normalized_measure};
use padic_core::{canonical_ball, CellIndex, ClopenSet, ExactRational, PAdic, Prime, Radius, Region, Sphere};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 0x0ace_5eed;
const PREC: u32 = 32;

pub struct CriterionResult {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}] {} ({:.2}s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

type Check = fn() -> Result<String, String>;

/// `(id, name, time budget, check)`.
pub const CRITERIA: [(u8, &str, Option<u64>, Check); 9] = [
    (1, "group axioms", Some(10), group_axioms),
    (2, "isomorphisms", Some(5), isomorphisms),
    (3, "haar measure", Some(10), haar_measure),
    (4, "ergodicity verdicts", Some(30), verdicts),
    (5, "non-convergent orbit", None, non_convergence),
    (6, "minimal invariant ball", None, minimal_ball),
    (7, "periodic orbit and indifference", None, periodic_and_indifferent),
    (8, "assumption guards", None, guards),
    (9, "residue-ring oracle", Some(30), oracle_equivalence),
];

pub fn run(id: u8) -> Option<CriterionResult> {
    let &(id, name, budget, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = check();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(secs) = budget {
        if elapsed > Duration::from_secs(secs) {
            passed = false;
            detail = format!("{detail}; over the {secs}s budget");
        }
    }
    Some(CriterionResult {
        id,
        name,
        passed,
        detail,
        elapsed,
    })
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

fn prime(p: u64) -> Prime {
    Prime::new(p).expect("prime")
}

fn q(n: i64, d: i64) -> ExactRational {
    ExactRational::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: i64, p: Prime) -> PAdic {
    PAdic::from_int(n, p, PREC)
}

fn unit_sphere(p: Prime) -> Sphere {
    Sphere::new(PAdic::zero(p), 0)
}

fn map(text: &str) -> RationalMap {
    RationalMap::parse(text).expect("suite maps parse")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn core<T>(r: padic_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn group_axioms() -> Result<String, String> {
    let mut groups = 0;
    for pv in [2u64, 3, 5] {
        let p = prime(pv);
        let carriers: [(Group, &str); 4] = [
            (Group::Ball(core(BallGroup::new(int(0, p), 0))?), "V_1(0)"),
            (Group::Ball(core(BallGroup::new(int(2, p), -1))?), "V_{1/p}(2)"),
            (Group::Sphere(SphereGroup::new(int(0, p), 0, PREC)), "S_1(0)"),
            (Group::Sphere(SphereGroup::new(int(0, p), -1, PREC)), "S_{1/p}(0)"),
        ];
        for (g, label) in carriers {
            let expected = match &g {
                Group::Ball(_) => g.center().clone(),
                Group::Sphere(_) => core(PAdic::power_of_p(p, -g.radius_exp(), PREC).checked_add(g.center()))?,
            };
            ensure(core(g.identity().approx_eq(&expected))?, || format!("identity of {label} over Q_{pv}"))?;
            let rep = check_group_axioms(&g, 1000, SEED ^ pv, PREC);
            if let Some((law, cx)) = rep.first_failure() {
                return Err(format!("{} fails on {label} over Q_{pv} at x={}", law.name(), cx.x));
            }
            groups += 1;
        }
    }
    Ok(format!("{groups} groups x 1000 triples, all laws hold mod p^(v+24)"))
}

fn isomorphisms() -> Result<String, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut configs = 0;
    for pv in [2u64, 3] {
        let p = prime(pv);
        for _ in 0..3 {
            let (e1, e2) = (rng.gen_range(-3i64..=3), rng.gen_range(-3i64..=3));
            let a1 = PAdic::from_rational(&q(rng.gen_range(-50..=50), rng.gen_range(1..=9)), p, PREC);
            let a2 = PAdic::from_rational(&q(rng.gen_range(-50..=50), rng.gen_range(1..=9)), p, PREC);
            let pairs = [
                (
                    Group::Ball(core(BallGroup::new(a1.clone(), e1))?),
                    Group::Ball(core(BallGroup::new(a2.clone(), e2))?),
                ),
                (
                    Group::Sphere(SphereGroup::new(a1.clone(), e1, PREC)),
                    Group::Sphere(SphereGroup::new(a2.clone(), e2, PREC)),
                ),
            ];
            for (src, dst) in pairs {
                let h = |x: &PAdic| core(iso(&src, &dst, x));
                let back = |x: &PAdic| core(iso(&dst, &src, x));
                ensure(core(h(&src.identity())?.approx_eq(&dst.identity()))?, || {
                    format!("identity not preserved over Q_{pv}")
                })?;
                let w1 = -src.radius_exp() + 24;
                let w2 = -dst.radius_exp() + 24;
                for _ in 0..500 {
                    let x = src.random_element(&mut rng, PREC);
                    let y = src.random_element(&mut rng, PREC);
                    let lhs = h(&core(src.op(&x, &y))?)?;
                    let rhs = core(dst.op(&h(&x)?, &h(&y)?))?;
                    ensure(core(lhs.agrees_mod(&rhs, w2))?, || format!("h(x*y) != h(x)*h(y) at x={x}, y={y}"))?;
                    ensure(core(back(&h(&x)?)?.agrees_mod(&x, w1))?, || format!("inverse fails at {x}"))?;
                }
                configs += 1;
            }
        }
    }
    Ok(format!("{configs} carrier pairs x 500 pairs"))
}

fn haar_measure() -> Result<String, String> {
    let p3 = prime(3);
    let s = unit_sphere(p3);
    let a = core(ClopenSet::new(
        Region::Sphere(s.clone()),
        vec![core(canonical_ball(&int(1, p3), -1))?],
    ))?;
    let m = core(normalized_measure(&s, &a))?;
    ensure(m == q(1, 2), || format!("normalized V_(1/3)(1) = {m}"))?;
    for pv in [2u64, 3, 5] {
        let s = unit_sphere(prime(pv));
        for k in 1..=6 {
            let cells = core(ClopenSet::new(Region::Sphere(s.clone()), core(s.cells(k, DEFAULT_CELL_CAP))?))?;
            let total: ExactRational = core(haar_clopen(&cells))? / padic_core::measure::sphere_haar(&s);
            ensure(total.is_one(), || format!("level {k} cells of Q_{pv} sum to {total}"))?;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut pairs = 0;
    for pv in [2u64, 3, 5] {
        let p = prime(pv);
        let ball = Group::Ball(core(BallGroup::new(PAdic::zero(p), 0))?);
        let sphere = Group::Sphere(SphereGroup::new(PAdic::zero(p), 0, PREC));
        for g in [ball, sphere] {
            let region = g.region();
            for _ in 0..1000 / 3 + 1 {
                let k = rng.gen_range(1..=4);
                let cells = match &region {
                    Region::Ball(b) => core(b.cells(k, DEFAULT_CELL_CAP))?,
                    Region::Sphere(s) => core(s.cells(k, DEFAULT_CELL_CAP))?,
                };
                let cell = cells[rng.gen_range(0..cells.len())].clone();
                let x = g.random_element(&mut rng, PREC);
                let set = core(ClopenSet::new(region.clone(), vec![cell]))?;
                let rep = core(invariance_check(&g, &x, &set))?;
                ensure(rep.preserved(), || format!("translation by {x} changes the measure of {}", set.balls()[0]))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("1/2 exact; level sums 1 for k<=6; {pairs} translations preserve measure"))
}

fn verdict(s: &Sphere, f: &str, levels: u32) -> Result<ErgodicityReport, String> {
    core(ergodicity_verdict(s, &map(f), levels, 64, SEED, &DynamicsConfig::default()))
}

fn verdicts() -> Result<String, String> {
    for pv in [3u64, 5, 7] {
        let p = prime(pv);
        let f = format!("x+{pv}");
        let r = verdict(&unit_sphere(p), &f, 4)?;
        let want = q(1, pv as i64 - 1);
        match &r.verdict {
            ErgodicityVerdict::NotErgodic(NotErgodicReason::MeasureCriterion { value, .. }) if *value == want => {}
            other => return Err(format!("{f} over Q_{pv}: {other:?}")),
        }
    }
    let p2 = prime(2);
    let s = unit_sphere(p2);
    let r = verdict(&s, "x+2", 12)?;
    ensure(r.criterion == Some(q(1, 1)), || format!("x+2 criterion {:?}", r.criterion))?;
    ensure(r.verdict == ErgodicityVerdict::ErgodicUpToLevel(12), || format!("x+2: {:?}", r.verdict))?;
    for (k, level) in r.levels.iter().enumerate() {
        ensure(level.lengths == vec![1usize << k], || format!("x+2 level {}: {:?}", k + 1, level.lengths))?;
    }
    ensure(r.levels.len() == 12, || "x+2 levels missing".into())?;

    let r = verdict(&s, "3x", 12)?;
    ensure(r.criterion == Some(q(1, 1)), || format!("3x criterion {:?}", r.criterion))?;
    match &r.verdict {
        ErgodicityVerdict::NotErgodic(NotErgodicReason::CycleSplit { level: 3, measure, .. })
            if r.levels.last().map(|l| l.lengths.clone()) == Some(vec![2, 2]) && *measure == q(1, 2) => {}
        other => return Err(format!("3x: {other:?}")),
    }

    let r = verdict(&s, "x+4", 12)?;
    match &r.verdict {
        ErgodicityVerdict::NotErgodic(NotErgodicReason::MeasureCriterion { value, .. }) if *value == q(1, 2) => {}
        other => return Err(format!("x+4: {other:?}")),
    }
    Ok("x+p not ergodic (1/(p-1)); x+2 single cycles to level 12; 3x splits {2,2} at level 3; x+4 gives 1/2".into())
}

fn non_convergence() -> Result<String, String> {
    let p = prime(2);
    let o = orbit(&map("x+2"), &int(1, p), 10_000, &DynamicsConfig::default()).map_err(|e| e.to_string())?;
    ensure(o.displacements.len() == 10_000, || format!("only {} steps", o.displacements.len()))?;
    let rho = Some(Radius::new(-1));
    if let Some(i) = o.displacements.iter().position(|d| *d != rho) {
        return Err(format!("step {i} moved by {:?}", o.displacements[i]));
    }
    Ok("10^4 steps, each of size exactly 1/2".into())
}

fn minimal_ball() -> Result<String, String> {
    let p = prime(2);
    let s = unit_sphere(p);
    let f = map("x+4");
    let cfg = DynamicsConfig::default();
    let one = int(1, p);
    let ball = core(minimal_invariant_ball(&s, &f, Radius::new(-2), &one, &cfg))?;
    ensure(ball == core(canonical_ball(&one, -2))?, || format!("got {ball}"))?;
    let level2 = core(induced_cell_map(&s, &f, 2, &cfg))?;
    let home2 = core(s.locate_cell(2, &one))?.index;
    ensure(level2.image()[home2] == home2, || "level-2 cell of 1 moves".into())?;
    let level3 = core(induced_cell_map(&s, &f, 3, &cfg))?;
    let home3 = core(s.locate_cell(3, &one))?.index;
    ensure(level3.image()[home3] != home3, || "level-3 cell of 1 is fixed".into())?;
    // every residue mod 2^5 in V_{1/4}(1) stays in it and leaves its level-3 cell
    let compiled = f.compile(p, PREC);
    for u in (1..32).step_by(4) {
        let x = int(u, p);
        let fx = core(compiled.eval(&x))?;
        ensure(core(ball.contains(&fx))?, || format!("f({u}) leaves the ball"))?;
        let (cx, cfx): (CellIndex, CellIndex) = (core(s.locate_cell(3, &x))?, core(s.locate_cell(3, &fx))?);
        ensure(cx != cfx, || format!("level-3 cell of {u} is fixed"))?;
    }
    Ok("V_(1/4)(1) invariant, level-3 cells of its points all move (mod 2^5)".into())
}

/// Every map of the suite that passes the isometry check.
const SUITE: [(u64, &str); 13] = [
    (2, "x+2"),
    (2, "3x"),
    (2, "x+4"),
    (2, "5x+2"),
    (2, "(x+2)/(2x+1)"),
    (3, "x+3"),
    (3, "4x"),
    (3, "3-x"),
    (3, "1/x"),
    (3, "(x+3)/(3x+1)"),
    (5, "x+5"),
    (7, "x+7"),
    (2, "1/x"),
];

fn periodic_and_indifferent() -> Result<String, String> {
    let p3 = prime(3);
    let cfg = DynamicsConfig::default();
    let o = orbit(&map("3-x"), &int(1, p3), 10, &cfg).map_err(|e| e.to_string())?;
    let period = o.period.ok_or("no period found")?;
    ensure(period.length == 2 && period.offset == 0, || format!("period {period:?}"))?;
    ensure(
        core(o.points[0].approx_eq(&int(1, p3)))? && core(o.points[1].approx_eq(&int(2, p3)))?,
        || "orbit is not {1, 2}".into(),
    )?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut checked = 0;
    for (pv, f) in SUITE {
        let p = prime(pv);
        let s = unit_sphere(p);
        let f = map(f);
        if !core(verify_isometry(&s, &f, 64, SEED, &cfg))?.passed() {
            return Err(format!("{f} over Q_{pv} is not a verified isometry"));
        }
        for _ in 0..20 {
            let x = s.random_point(&mut rng, PREC);
            let d = core(derivative_norm(&f, &x, 12, &cfg))?;
            ensure(d == Radius::new(0), || format!("|f'({x})| = {pv}^{} for {f}", d.exp()))?;
        }
        checked += 1;
    }
    Ok(format!("3-x has period 2 on {{1,2}}; |f'| = 1 at 20 points for {checked} isometries"))
}

fn guards() -> Result<String, String> {
    let p3 = prime(3);
    let s = unit_sphere(p3);
    let r = verdict(&s, "x^2", 4)?;
    match &r.verdict {
        ErgodicityVerdict::NotIsometry(IsometryWitness::Distorts { x, y, .. })
            if core(x.approx_eq(&int(1, p3)))? && core(y.approx_eq(&int(2, p3)))? => {}
        other => return Err(format!("x^2: {other:?}")),
    }
    let r = verdict(&s, "1/x", 4)?;
    match &r.verdict {
        ErgodicityVerdict::AssumptionViolated(RhoOutcome::ZeroSomewhere { x, .. }) if core(x.approx_eq(&int(1, p3)))? => {}
        other => return Err(format!("1/x: {other:?}")),
    }
    let check = core(verify_isometry(&s, &map("x^2"), 64, SEED, &DynamicsConfig::default()))?;
    ensure(matches!(check, IsometryCheck::Witness(_)), || "x^2 passed the isometry check".into())?;
    Ok("x^2 -> NotIsometry (1,2); 1/x -> ZeroSomewhere at 1".into())
}

/// A map with integer coefficients, written out independently of the
/// parser: ascending-degree numerator and denominator.
struct OracleMap {
    p: u64,
    text: &'static str,
    num: &'static [i64],
    den: &'static [i64],
}

const ORACLE_MAPS: [OracleMap; 11] = [
    OracleMap { p: 2, text: "x+2", num: &[2, 1], den: &[1] },
    OracleMap { p: 2, text: "3x", num: &[0, 3], den: &[1] },
    OracleMap { p: 2, text: "x+4", num: &[4, 1], den: &[1] },
    OracleMap { p: 2, text: "5x+2", num: &[2, 5], den: &[1] },
    OracleMap { p: 2, text: "1/x", num: &[1], den: &[0, 1] },
    OracleMap { p: 2, text: "(x+2)/(2x+1)", num: &[2, 1], den: &[1, 2] },
    OracleMap { p: 3, text: "x+3", num: &[3, 1], den: &[1] },
    OracleMap { p: 3, text: "4x", num: &[0, 4], den: &[1] },
    OracleMap { p: 3, text: "3-x", num: &[3, -1], den: &[1] },
    OracleMap { p: 3, text: "1/x", num: &[1], den: &[0, 1] },
    OracleMap { p: 3, text: "(x+3)/(3x+1)", num: &[3, 1], den: &[1, 3] },
];

fn inverse_mod(a: i128, m: i128) -> Option<i128> {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i128, 0i128);
    while r1 != 0 {
        let t = r0 / r1;
        (r0, r1) = (r1, r0 - t * r1);
        (s0, s1) = (s1, s0 - t * s1);
    }
    (r0 == 1).then(|| s0.rem_euclid(m))
}

fn poly_mod(coeffs: &[i64], x: i128, m: i128) -> i128 {
    coeffs.iter().rev().fold(0i128, |acc, &c| (acc * x + c as i128).rem_euclid(m))
}

/// Cell index of a unit residue `u mod p^k`: digits `t_0 .. t_{k-1}` read
/// with `t_0` most significant, `t_0` shifted down by one.
fn oracle_index(u: u64, p: u64, k: u32) -> usize {
    let mut digits = Vec::with_capacity(k as usize);
    let mut rest = u;
    for _ in 0..k {
        digits.push(rest % p);
        rest /= p;
    }
    let mut index = digits[0] - 1;
    for &t in &digits[1..] {
        index = index * p + t;
    }
    index as usize
}

/// The permutation of level-`k` cells read off from `f` on all unit
/// residues mod `p^{k+2}`; errors if two lifts of a cell disagree.
fn oracle_perm(m: &OracleMap, k: u32) -> Result<Vec<usize>, String> {
    let p = m.p;
    let big = (p as i128).pow(k + 2);
    let small = p.pow(k);
    let cells = ((p - 1) * p.pow(k - 1)) as usize;
    let mut image = vec![usize::MAX; cells];
    for u in (1..big).filter(|u| u % p as i128 != 0) {
        let d = inverse_mod(poly_mod(m.den, u, big), big).ok_or_else(|| format!("{} has a pole at {u}", m.text))?;
        let fu = poly_mod(m.num, u, big) * d % big;
        if fu % p as i128 == 0 {
            return Err(format!("{} sends {u} off the unit sphere", m.text));
        }
        let src = oracle_index((u % small as i128) as u64, p, k);
        let dst = oracle_index((fu % small as i128) as u64, p, k);
        if image[src] == usize::MAX {
            image[src] = dst;
        } else if image[src] != dst {
            return Err(format!("{} does not respect level-{k} cells", m.text));
        }
    }
    Ok(image)
}

fn oracle_equivalence() -> Result<String, String> {
    let cfg = DynamicsConfig::default();
    let mut compared = 0;
    for m in &ORACLE_MAPS {
        let s = unit_sphere(prime(m.p));
        let f = map(m.text);
        ensure(
            f.numerator().iter().map(|c| c.to_integer().to_i64()).eq(m.num.iter().map(|&c| Some(c)))
                && f.denominator().iter().map(|c| c.to_integer().to_i64()).eq(m.den.iter().map(|&c| Some(c))),
            || format!("parsed coefficients of {} differ from the oracle's", m.text),
        )?;
        for k in 1..=8 {
            let ours = core(induced_cell_map(&s, &f, k, &cfg))?;
            let theirs = oracle_perm(m, k)?;
            ensure(ours.image() == theirs.as_slice(), || format!("{} over Q_{} differs at level {k}", m.text, m.p))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} (map, level) pairs agree with brute force mod p^(k+2)"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn oracle_indexing() {
        // odd residues mod 8 in cell order: 1, 5, 3, 7
        assert_eq!(oracle_index(1, 2, 3), 0);
        assert_eq!(oracle_index(5, 2, 3), 1);
        assert_eq!(oracle_index(3, 2, 3), 2);
        assert_eq!(oracle_index(7, 2, 3), 3);
        assert_eq!(oracle_index(2, 3, 1), 1);
        assert_eq!(inverse_mod(3, 8), Some(3));
        assert_eq!(inverse_mod(2, 8), None);
    }

    #[test]
    fn oracle_perm_of_translation() {
        let m = &ORACLE_MAPS[0];
        // x+2 on 1, 5, 3, 7 -> 3, 7, 5, 1
        assert_eq!(oracle_perm(m, 3).unwrap(), vec![2, 3, 1, 0]);
    }
}
