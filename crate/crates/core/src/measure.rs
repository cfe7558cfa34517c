//! Haar measure on the clopen algebra of a ball or sphere.
//!
//! A ball of radius `p^e` has measure exactly `p^e`; a finite disjoint union
//! has the sum. On a sphere `S_r(a)` the normalized measure divides by
//! `(p - 1) r / p`, the measure of the whole sphere.

use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{canonical_ball, check_disjoint, Ball, ClopenSet, Region, Sphere};
use crate::groups::CarrierGroup;
use crate::padic::{pow_rational, ExactRational, PAdic};

pub fn haar(b: &Ball) -> ExactRational {
    pow_rational(b.prime(), b.exp())
}

pub fn haar_clopen(set: &ClopenSet) -> Result<ExactRational> {
    check_disjoint(set.balls())?;
    Ok(set
        .balls()
        .iter()
        .map(haar)
        .fold(ExactRational::zero(), |acc, m| acc + m))
}

/// `(p - 1) p^e / p`.
pub fn sphere_haar(s: &Sphere) -> ExactRational {
    let p = s.prime();
    let pm1 = ExactRational::from_integer(BigInt::from(p.get() - 1));
    pm1 * pow_rational(p, s.exp() - 1)
}

/// `haar(A) * p / ((p - 1) r)` for a set inside the sphere `s`.
pub fn normalized_measure(s: &Sphere, set: &ClopenSet) -> Result<ExactRational> {
    match set.parent() {
        Region::Sphere(parent) if parent == s => {}
        _ => return Err(Error::InvalidArgument("clopen set does not live in this sphere")),
    }
    let total = haar_clopen(&set.normalized()?)?;
    Ok(total / sphere_haar(s))
}

/// Outcome of translating a clopen set by a group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceReport {
    /// Images of the balls: translated centers, unchanged radii.
    pub translated: Vec<Ball>,
    pub before: ExactRational,
    /// Measure of the image, when the image is a valid clopen set.
    pub after: Option<ExactRational>,
    pub disjoint: bool,
    pub inside_carrier: bool,
}

impl InvarianceReport {
    pub fn preserved(&self) -> bool {
        self.disjoint && self.inside_carrier && self.after.as_ref() == Some(&self.before)
    }
}

/// Translates every ball of `set` by `x` under the group operation,
/// re-canonicalizes, and compares measures.
pub fn invariance_check<G: CarrierGroup + ?Sized>(
    group: &G,
    x: &PAdic,
    set: &ClopenSet,
) -> Result<InvarianceReport> {
    let region = group.region();
    if !region.contains(x)? {
        return Err(Error::NotInCarrier);
    }
    for b in set.balls() {
        if !region.contains_ball(b)? {
            return Err(Error::NotInCarrier);
        }
    }
    let abs = x
        .absolute_precision()
        .unwrap_or(-group.radius_exp() + crate::padic::DEFAULT_PRECISION as i64);
    let mut translated = Vec::with_capacity(set.balls().len());
    for b in set.balls() {
        let image = group.combine(x, &b.point(abs))?;
        translated.push(canonical_ball(&image, b.exp())?);
    }
    let disjoint = check_disjoint(&translated).is_ok();
    let mut inside_carrier = true;
    for b in &translated {
        if !region.contains_ball(b)? {
            inside_carrier = false;
        }
    }
    let before = haar_clopen(set)?;
    let after = if disjoint && inside_carrier {
        Some(haar_clopen(&ClopenSet::new(region, translated.clone())?)?)
    } else {
        None
    };
    Ok(InvarianceReport {
        translated,
        before,
        after,
        disjoint,
        inside_carrier,
    })
}

/// True when `a ⊆ b`, comparing both sets refined to their smallest radius.
pub fn is_subset(a: &ClopenSet, b: &ClopenSet) -> Result<bool> {
    let finest = a
        .balls()
        .iter()
        .chain(b.balls())
        .map(Ball::exp)
        .min();
    let Some(finest) = finest else {
        return Ok(true);
    };
    let cap = u64::MAX;
    let big = b.refined_to(finest, cap)?;
    let keys: alloc::collections::BTreeSet<&Ball> = big.balls().iter().collect();
    for ball in a.refined_to(finest, cap)?.balls() {
        if !keys.contains(ball) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Lower and upper bounds used when checking invariant sets: `0 < m < 1`.
pub fn strictly_between_zero_and_one(m: &ExactRational) -> bool {
    *m > ExactRational::zero() && *m < ExactRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DEFAULT_CELL_CAP;
    use crate::groups::{BallGroup, SphereGroup};
    use crate::padic::{parse_rational, Prime, DEFAULT_PRECISION};
    use alloc::vec;

    fn p(n: u64) -> Prime {
        Prime::new(n).unwrap()
    }

    fn num(text: &str, pr: u64) -> PAdic {
        PAdic::from_rational(&parse_rational(text).unwrap(), p(pr), DEFAULT_PRECISION)
    }

    fn q(text: &str) -> ExactRational {
        parse_rational(text).unwrap()
    }

    fn unit_sphere(pr: u64) -> Sphere {
        Sphere::new(PAdic::zero(p(pr)), 0)
    }

    #[test]
    fn single_balls() {
        assert_eq!(haar(&canonical_ball(&num("1", 3), -2).unwrap()), q("1/9"));
        assert_eq!(haar(&canonical_ball(&num("0", 3), 0).unwrap()), q("1"));
        assert_eq!(haar(&canonical_ball(&num("0", 2), 2).unwrap()), q("4"));
    }

    #[test]
    fn unions() {
        let s = unit_sphere(3);
        let l1 = ClopenSet::new(Region::Sphere(s.clone()), s.cells(1, DEFAULT_CELL_CAP).unwrap()).unwrap();
        assert_eq!(haar_clopen(&l1).unwrap(), q("2/3"));
        assert_eq!(haar_clopen(&ClopenSet::empty(Region::Sphere(s.clone()))).unwrap(), q("0"));
        let l2 = ClopenSet::new(Region::Sphere(s.clone()), s.cells(2, DEFAULT_CELL_CAP).unwrap()).unwrap();
        assert_eq!(haar_clopen(&l2).unwrap(), q("2/3"));
        assert_eq!(sphere_haar(&s), q("2/3"));
    }

    #[test]
    fn normalized_examples() {
        let s = unit_sphere(3);
        let a = ClopenSet::new(Region::Sphere(s.clone()), vec![canonical_ball(&num("1", 3), -1).unwrap()]).unwrap();
        assert_eq!(normalized_measure(&s, &a).unwrap(), q("1/2"));
        assert_eq!(normalized_measure(&s, &ClopenSet::whole_sphere(&s).unwrap()).unwrap(), q("1"));
        let h = Sphere::new(PAdic::zero(p(2)), -1);
        let cell = ClopenSet::new(Region::Sphere(h.clone()), vec![canonical_ball(&num("2", 2), -2).unwrap()]).unwrap();
        assert_eq!(normalized_measure(&h, &cell).unwrap(), q("1"));
        assert!(normalized_measure(&s, &cell).is_err());
    }

    #[test]
    fn translations() {
        let g = SphereGroup::new(PAdic::zero(p(3)), 0, DEFAULT_PRECISION);
        let s = g.carrier().clone();
        let a = ClopenSet::new(Region::Sphere(s.clone()), vec![canonical_ball(&num("1", 3), -1).unwrap()]).unwrap();
        let rep = invariance_check(&g, &num("2", 3), &a).unwrap();
        assert!(rep.preserved());
        assert_eq!(rep.translated, vec![canonical_ball(&num("2", 3), -1).unwrap()]);
        let same = invariance_check(&g, &g.identity(), &a).unwrap();
        assert_eq!(same.translated, a.balls().to_vec());

        let b = BallGroup::new(PAdic::zero(p(3)), 0).unwrap();
        let a = ClopenSet::new(Region::Ball(b.carrier().clone()), vec![canonical_ball(&num("0", 3), -1).unwrap()]).unwrap();
        let rep = invariance_check(&b, &num("1/2", 3), &a).unwrap();
        assert!(rep.preserved());
        assert_eq!(rep.before, q("1/3"));
        assert_eq!(invariance_check(&b, &num("1/3", 3), &a), Err(Error::NotInCarrier));
    }

    #[test]
    fn refinement_keeps_measure_and_order() {
        let s = unit_sphere(5);
        let a = ClopenSet::new(
            Region::Sphere(s.clone()),
            vec![canonical_ball(&num("1", 5), -1).unwrap(), canonical_ball(&num("7", 5), -2).unwrap()],
        )
        .unwrap();
        let fine = a.refined_to(-4, DEFAULT_CELL_CAP).unwrap();
        assert_eq!(haar_clopen(&fine).unwrap(), haar_clopen(&a).unwrap());
        assert_eq!(fine.normalized().unwrap().balls(), a.normalized().unwrap().balls());
        let whole = ClopenSet::whole_sphere(&s).unwrap();
        assert!(is_subset(&a, &whole).unwrap());
        assert!(!is_subset(&whole, &a).unwrap());
        assert!(normalized_measure(&s, &a).unwrap() <= normalized_measure(&s, &whole).unwrap());
    }
}
