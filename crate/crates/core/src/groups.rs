//! The additive group `(V_r(a), ⊕)` on a ball, the multiplicative group
//! `(S_r(a), ⊙)` on a sphere, and the isomorphisms between any two of the
//! same kind.
//!
//! `x ⊕ y = x + y - a` with identity `a` and inverse `2a - x`.
//! `x ⊙ y = r(x - a)(y - a) + a` with identity `1/r + a` and inverse
//! `1/(r^2 (x - a)) + a`, where `r = p^e` is read as a p-adic number.
//! Multiplying by `r` is a shift of the valuation, so it costs no digits.

use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{canonical_ball, Ball, Region, Sphere};
use crate::padic::{PAdic, Prime};

/// Relative digits that group laws must agree on.
pub const AXIOM_WINDOW: u32 = 24;

/// A compact abelian group whose carrier is a ball or a sphere.
pub trait CarrierGroup {
    fn prime(&self) -> Prime;

    /// Exponent `e` of the carrier radius `p^e`.
    fn radius_exp(&self) -> i64;

    fn region(&self) -> Region;

    fn identity(&self) -> PAdic;

    /// The group operation without membership checks.
    fn combine(&self, x: &PAdic, y: &PAdic) -> Result<PAdic>;

    /// The inverse without membership checks.
    fn invert(&self, x: &PAdic) -> Result<PAdic>;

    fn contains(&self, x: &PAdic) -> Result<bool> {
        self.region().contains(x)
    }

    /// A Haar-uniform element known to `digits` digits below the radius.
    fn random_element(&self, rng: &mut ChaCha8Rng, digits: u32) -> PAdic;
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallGroup {
    center: PAdic,
    carrier: Ball,
}

impl BallGroup {
    pub fn new(center: PAdic, exp: i64) -> Result<Self> {
        let carrier = canonical_ball(&center, exp)?;
        Ok(BallGroup { center, carrier })
    }

    pub fn carrier(&self) -> &Ball {
        &self.carrier
    }

    /// The identity element `a`.
    pub fn center(&self) -> &PAdic {
        &self.center
    }

    pub fn oplus(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
        self.require(x)?;
        self.require(y)?;
        self.combine(x, y)
    }

    pub fn inverse(&self, x: &PAdic) -> Result<PAdic> {
        self.require(x)?;
        self.invert(x)
    }

    fn require(&self, x: &PAdic) -> Result<()> {
        if self.carrier.contains(x)? {
            Ok(())
        } else {
            Err(Error::NotInCarrier)
        }
    }
}

impl CarrierGroup for BallGroup {
    fn prime(&self) -> Prime {
        self.center.prime()
    }

    fn radius_exp(&self) -> i64 {
        self.carrier.exp()
    }

    fn region(&self) -> Region {
        Region::Ball(self.carrier.clone())
    }

    fn identity(&self) -> PAdic {
        self.center.clone()
    }

    fn combine(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
        x.checked_add(y)?.checked_sub(&self.center)
    }

    fn invert(&self, x: &PAdic) -> Result<PAdic> {
        self.center.checked_add(&self.center)?.checked_sub(x)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, digits: u32) -> PAdic {
        self.carrier.random_point(rng, digits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereGroup {
    carrier: Sphere,
    r: PAdic,
}

impl SphereGroup {
    /// `prec` is the number of digits carried by the embedded scalar `r`.
    pub fn new(center: PAdic, exp: i64, prec: u32) -> Self {
        let p = center.prime();
        SphereGroup {
            carrier: Sphere::new(center, exp),
            r: PAdic::power_of_p(p, exp, prec),
        }
    }

    pub fn carrier(&self) -> &Sphere {
        &self.carrier
    }

    pub fn center(&self) -> &PAdic {
        self.carrier.center()
    }

    /// The radius `p^e` as a p-adic number with unit digits `1, 0, 0, ...`.
    pub fn r_as_padic(&self) -> &PAdic {
        &self.r
    }

    pub fn odot(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
        self.require(x)?;
        self.require(y)?;
        self.combine(x, y)
    }

    pub fn inverse(&self, x: &PAdic) -> Result<PAdic> {
        self.require(x)?;
        self.invert(x)
    }

    fn require(&self, x: &PAdic) -> Result<()> {
        if self.carrier.contains(x)? {
            Ok(())
        } else {
            Err(Error::NotInCarrier)
        }
    }
}

impl CarrierGroup for SphereGroup {
    fn prime(&self) -> Prime {
        self.carrier.prime()
    }

    fn radius_exp(&self) -> i64 {
        self.carrier.exp()
    }

    fn region(&self) -> Region {
        Region::Sphere(self.carrier.clone())
    }

    fn identity(&self) -> PAdic {
        self.r
            .inv()
            .expect("p^e is a unit times a power of p")
            .checked_add(self.center())
            .expect("same prime")
    }

    fn combine(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
        let a = self.center();
        let e = self.carrier.exp();
        let prod = x.checked_sub(a)?.checked_mul(&y.checked_sub(a)?)?;
        prod.shift(e).checked_add(a)
    }

    fn invert(&self, x: &PAdic) -> Result<PAdic> {
        let a = self.center();
        let e = self.carrier.exp();
        x.checked_sub(a)?.shift(2 * e).inv()?.checked_add(a)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, digits: u32) -> PAdic {
        self.carrier.random_point(rng, digits)
    }
}

/// Either kind of group, for operations that accept both.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Group {
    Ball(BallGroup),
    Sphere(SphereGroup),
}

impl Group {
    fn inner(&self) -> &dyn CarrierGroup {
        match self {
            Group::Ball(g) => g,
            Group::Sphere(g) => g,
        }
    }

    pub fn center(&self) -> &PAdic {
        match self {
            Group::Ball(g) => g.center(),
            Group::Sphere(g) => g.center(),
        }
    }

    /// The group operation with carrier membership checks.
    pub fn op(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
        match self {
            Group::Ball(g) => g.oplus(x, y),
            Group::Sphere(g) => g.odot(x, y),
        }
    }

    pub fn inverse(&self, x: &PAdic) -> Result<PAdic> {
        match self {
            Group::Ball(g) => g.inverse(x),
            Group::Sphere(g) => g.inverse(x),
        }
    }
}

impl CarrierGroup for Group {
    fn prime(&self) -> Prime {
        self.inner().prime()
    }

    fn radius_exp(&self) -> i64 {
        self.inner().radius_exp()
    }

    fn region(&self) -> Region {
        self.inner().region()
    }

    fn identity(&self) -> PAdic {
        self.inner().identity()
    }

    fn combine(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
        self.inner().combine(x, y)
    }

    fn invert(&self, x: &PAdic) -> Result<PAdic> {
        self.inner().invert(x)
    }

    fn random_element(&self, rng: &mut ChaCha8Rng, digits: u32) -> PAdic {
        self.inner().random_element(rng, digits)
    }
}

/// `h(x) = r_1 (x - a_1) / r_2 + a_2`, a group isomorphism from `src` onto
/// `dst`. Both must be balls or both spheres, over the same prime.
pub fn iso(src: &Group, dst: &Group, x: &PAdic) -> Result<PAdic> {
    let same_kind = matches!(
        (src, dst),
        (Group::Ball(_), Group::Ball(_)) | (Group::Sphere(_), Group::Sphere(_))
    );
    if !same_kind {
        return Err(Error::KindMismatch);
    }
    if src.prime() != dst.prime() {
        return Err(Error::PrimeMismatch {
            left: src.prime().get(),
            right: dst.prime().get(),
        });
    }
    if !src.contains(x)? {
        return Err(Error::NotInCarrier);
    }
    let shift = src.radius_exp() - dst.radius_exp();
    x.checked_sub(src.center())?
        .shift(shift)
        .checked_add(dst.center())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Law {
    Closure,
    Commutativity,
    Associativity,
    Identity,
    Inverse,
}

impl Law {
    pub const ALL: [Law; 5] = [
        Law::Closure,
        Law::Commutativity,
        Law::Associativity,
        Law::Identity,
        Law::Inverse,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Law::Closure => "closure",
            Law::Commutativity => "commutativity",
            Law::Associativity => "associativity",
            Law::Identity => "identity",
            Law::Inverse => "inverse",
        }
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A sampled triple on which a law failed. For closure `rhs` is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub x: PAdic,
    pub y: PAdic,
    pub z: PAdic,
    pub lhs: Option<PAdic>,
    pub rhs: Option<PAdic>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LawReport {
    pub law: Law,
    pub trials: usize,
    /// Number of failing trials.
    pub failed: usize,
    /// The first few counterexamples, in trial order.
    pub failures: Vec<Counterexample>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxiomReport {
    pub laws: Vec<LawReport>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.laws.iter().all(|l| l.failed == 0)
    }

    pub fn first_failure(&self) -> Option<(Law, &Counterexample)> {
        self.laws
            .iter()
            .find_map(|l| l.failures.first().map(|c| (l.law, c)))
    }
}

const KEPT_FAILURES: usize = 3;

/// Randomized check of the abelian group laws on `trials` sampled triples.
///
/// Trial `t` draws from a ChaCha stream keyed by `(seed, t)`, so the outcome
/// does not depend on how trials are scheduled. Elements carry `digits`
/// digits below the radius; two sides must agree on [`AXIOM_WINDOW`] of
/// them. A comparison that cannot be decided counts as a failure.
pub fn check_group_axioms<G: CarrierGroup + ?Sized>(
    group: &G,
    trials: usize,
    seed: u64,
    digits: u32,
) -> AxiomReport {
    let window = -group.radius_exp() + AXIOM_WINDOW.min(digits) as i64;
    let mut laws: Vec<LawReport> = Law::ALL
        .iter()
        .map(|&law| LawReport {
            law,
            trials,
            failed: 0,
            failures: Vec::new(),
        })
        .collect();
    let identity = group.identity();
    for t in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(t as u64);
        let x = group.random_element(&mut rng, digits);
        let y = group.random_element(&mut rng, digits);
        let z = group.random_element(&mut rng, digits);
        let record = |laws: &mut Vec<LawReport>, law: Law, lhs: Option<PAdic>, rhs: Option<PAdic>| {
            let entry = &mut laws[law as usize];
            entry.failed += 1;
            if entry.failures.len() < KEPT_FAILURES {
                entry.failures.push(Counterexample {
                    x: x.clone(),
                    y: y.clone(),
                    z: z.clone(),
                    lhs,
                    rhs,
                });
            }
        };
        let agree = |a: &Result<PAdic>, b: &Result<PAdic>| match (a, b) {
            (Ok(a), Ok(b)) => a.agrees_mod(b, window).unwrap_or(false),
            _ => false,
        };

        let xy = group.combine(&x, &y);
        let closed = match &xy {
            Ok(v) => group.contains(v).unwrap_or(false),
            Err(_) => false,
        };
        if !closed {
            record(&mut laws, Law::Closure, xy.clone().ok(), None);
        }

        let yx = group.combine(&y, &x);
        if !agree(&xy, &yx) {
            record(&mut laws, Law::Commutativity, xy.clone().ok(), yx.ok());
        }

        let left = xy.and_then(|v| group.combine(&v, &z));
        let right = group.combine(&y, &z).and_then(|v| group.combine(&x, &v));
        if !agree(&left, &right) {
            record(&mut laws, Law::Associativity, left.ok(), right.ok());
        }

        let xe = group.combine(&x, &identity);
        if !agree(&xe, &Ok(x.clone())) {
            record(&mut laws, Law::Identity, xe.ok(), Some(x.clone()));
        }

        let xinv = group.invert(&x).and_then(|v| group.combine(&x, &v));
        if !agree(&xinv, &Ok(identity.clone())) {
            record(&mut laws, Law::Inverse, xinv.ok(), Some(identity.clone()));
        }
    }
    AxiomReport { laws }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::{parse_rational, DEFAULT_PRECISION};

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn num(text: &str, pr: u64) -> PAdic {
        PAdic::from_rational(&parse_rational(text).unwrap(), p(pr), DEFAULT_PRECISION)
    }

    fn ball(c: &str, e: i64, pr: u64) -> BallGroup {
        BallGroup::new(num(c, pr), e).unwrap()
    }

    fn sphere(c: &str, e: i64, pr: u64) -> SphereGroup {
        SphereGroup::new(num(c, pr), e, DEFAULT_PRECISION)
    }

    fn same(a: &PAdic, b: &PAdic) -> bool {
        a.approx_eq(b).unwrap()
    }

    #[test]
    fn oplus_examples() {
        let g = ball("2", -1, 3);
        assert!(same(&g.oplus(&num("5", 3), &num("8", 3)).unwrap(), &num("11", 3)));
        let x = num("5", 3);
        assert!(same(&g.oplus(&x, &num("2", 3)).unwrap(), &x));
        let inv = g.inverse(&x).unwrap();
        assert!(same(&inv, &num("-1", 3)));
        assert!(g.carrier().contains(&inv).unwrap());
        assert!(same(&g.oplus(&inv, &x).unwrap(), &num("2", 3)));
        assert!(same(&g.inverse(&inv).unwrap(), &x));
        assert!(same(&g.inverse(&num("2", 3)).unwrap(), &num("2", 3)));
        assert_eq!(g.oplus(&num("1", 3), &x), Err(Error::NotInCarrier));
    }

    #[test]
    fn odot_examples() {
        let g = sphere("0", 0, 3);
        assert!(same(&g.odot(&num("2", 3), &num("2", 3)).unwrap(), &num("4", 3)));
        assert!(same(&g.inverse(&num("2", 3)).unwrap(), &num("1/2", 3)));

        let h = sphere("0", -1, 2);
        assert!(same(&h.odot(&num("2", 2), &num("6", 2)).unwrap(), &num("6", 2)));
        let inv6 = h.inverse(&num("6", 2)).unwrap();
        assert!(same(&inv6, &num("2/3", 2)));
        assert!(same(&h.odot(&num("6", 2), &inv6).unwrap(), &num("2", 2)));
        let one = h.identity();
        assert!(same(&one, &num("2", 2)));
        assert!(h.carrier().contains(&one).unwrap());
        assert!(same(&h.inverse(&one).unwrap(), &one));
        let x = num("10", 2);
        assert!(same(&h.odot(&x, &one).unwrap(), &x));
        assert_eq!(h.odot(&num("1", 2), &x), Err(Error::NotInCarrier));
    }

    #[test]
    fn isomorphism_examples() {
        let src = Group::Ball(ball("0", 0, 3));
        let dst = Group::Ball(ball("2", -1, 3));
        assert!(same(&iso(&src, &dst, &PAdic::zero(p(3))).unwrap(), &num("2", 3)));
        let lhs = iso(&src, &dst, &src.op(&num("1", 3), &num("1", 3)).unwrap()).unwrap();
        let h1 = iso(&src, &dst, &num("1", 3)).unwrap();
        assert!(same(&h1, &num("5", 3)));
        assert!(same(&lhs, &num("8", 3)));
        assert!(same(&dst.op(&h1, &h1).unwrap(), &num("8", 3)));

        let s1 = Group::Sphere(sphere("0", 0, 2));
        let s2 = Group::Sphere(sphere("0", -1, 2));
        let lhs = iso(&s1, &s2, &s1.op(&num("3", 2), &num("5", 2)).unwrap()).unwrap();
        assert!(same(&lhs, &num("30", 2)));
        let rhs = s2
            .op(&iso(&s1, &s2, &num("3", 2)).unwrap(), &iso(&s1, &s2, &num("5", 2)).unwrap())
            .unwrap();
        assert!(same(&rhs, &num("30", 2)));

        assert_eq!(iso(&src, &s1, &num("1", 3)), Err(Error::KindMismatch));
        assert_eq!(iso(&src, &dst, &num("1/3", 3)), Err(Error::NotInCarrier));
    }

    #[test]
    fn axioms_hold() {
        let report = check_group_axioms(&ball("0", 0, 3), 200, 1, DEFAULT_PRECISION);
        assert!(report.passed(), "{:?}", report.first_failure());
        let report = check_group_axioms(&sphere("0", -1, 2), 200, 1, DEFAULT_PRECISION);
        assert!(report.passed(), "{:?}", report.first_failure());
        let report = check_group_axioms(&sphere("1/5", 2, 5), 200, 9, DEFAULT_PRECISION);
        assert!(report.passed(), "{:?}", report.first_failure());
    }

    /// `⊙` with `r` replaced by `r^2`.
    struct SquaredRadius(SphereGroup);

    impl CarrierGroup for SquaredRadius {
        fn prime(&self) -> Prime {
            self.0.prime()
        }
        fn radius_exp(&self) -> i64 {
            self.0.radius_exp()
        }
        fn region(&self) -> Region {
            self.0.region()
        }
        fn identity(&self) -> PAdic {
            self.0.identity()
        }
        fn combine(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
            let a = self.0.center();
            let prod = x.checked_sub(a)?.checked_mul(&y.checked_sub(a)?)?;
            prod.shift(2 * self.radius_exp()).checked_add(a)
        }
        fn invert(&self, x: &PAdic) -> Result<PAdic> {
            self.0.invert(x)
        }
        fn random_element(&self, rng: &mut ChaCha8Rng, digits: u32) -> PAdic {
            self.0.random_element(rng, digits)
        }
    }

    /// `⊙` that forgets to recenter one factor.
    struct Lopsided(SphereGroup);

    impl CarrierGroup for Lopsided {
        fn prime(&self) -> Prime {
            self.0.prime()
        }
        fn radius_exp(&self) -> i64 {
            self.0.radius_exp()
        }
        fn region(&self) -> Region {
            self.0.region()
        }
        fn identity(&self) -> PAdic {
            self.0.identity()
        }
        fn combine(&self, x: &PAdic, y: &PAdic) -> Result<PAdic> {
            let a = self.0.center();
            let prod = x.checked_sub(a)?.checked_mul(y)?;
            prod.shift(self.radius_exp()).checked_add(a)
        }
        fn invert(&self, x: &PAdic) -> Result<PAdic> {
            self.0.invert(x)
        }
        fn random_element(&self, rng: &mut ChaCha8Rng, digits: u32) -> PAdic {
            self.0.random_element(rng, digits)
        }
    }

    #[test]
    fn squared_radius_mutation_is_caught() {
        let bad = SquaredRadius(sphere("0", -1, 2));
        let report = check_group_axioms(&bad, 50, 3, DEFAULT_PRECISION);
        assert!(!report.passed());
        // r^2 (x-a)(y-a) + a is still associative; it leaves the sphere instead
        let failed: Vec<Law> = report.laws.iter().filter(|l| l.failed > 0).map(|l| l.law).collect();
        assert!(failed.contains(&Law::Closure));
        assert!(failed.contains(&Law::Identity));
        assert!(!failed.contains(&Law::Associativity));
    }

    #[test]
    fn non_associative_mutation_is_caught() {
        let bad = Lopsided(sphere("1", -1, 3));
        let report = check_group_axioms(&bad, 50, 3, DEFAULT_PRECISION);
        let assoc = &report.laws[Law::Associativity as usize];
        assert!(assoc.failed > 0);
        let cx = &assoc.failures[0];
        assert!(cx.lhs.is_some() && cx.rhs.is_some());
    }

    #[test]
    fn reports_are_reproducible() {
        let g = sphere("0", 0, 5);
        assert_eq!(check_group_axioms(&g, 20, 77, 16), check_group_axioms(&g, 20, 77, 16));
    }
}
