use super::*;
use crate::geometry::CellIndex;
use crate::padic::{parse_rational, Prime};
use alloc::vec;

fn pr(n: u64) -> Prime {
    Prime::new(n).unwrap()
}

fn num(text: &str, p: u64) -> PAdic {
    PAdic::from_rational(&parse_rational(text).unwrap(), pr(p), DEFAULT_PRECISION)
}

fn unit_sphere(p: u64) -> Sphere {
    Sphere::new(PAdic::zero(pr(p)), 0)
}

fn map(text: &str) -> RationalMap {
    RationalMap::parse(text).unwrap()
}

fn cfg() -> DynamicsConfig {
    DynamicsConfig::default()
}

/// Residue mod p^k of each cell's center, for readable permutation checks.
fn residues(s: &Sphere, k: u32) -> Vec<u64> {
    (0..s.cell_count(k) as usize)
        .map(|i| {
            let c = s.cell(CellIndex { level: k, index: i }).unwrap();
            let w = c.point(k as i64).digits_window(0, k).unwrap();
            w.iter_u64_digits().next().unwrap_or(0)
        })
        .collect()
}

fn as_residue_map(s: &Sphere, perm: &CellPermutation) -> Vec<(u64, u64)> {
    let r = residues(s, perm.level());
    let mut out: Vec<(u64, u64)> = perm.image().iter().enumerate().map(|(i, &j)| (r[i], r[j])).collect();
    out.sort();
    out
}

#[test]
fn isometry_examples() {
    assert!(verify_isometry(&unit_sphere(2), &map("x+2"), 16, 1, &cfg()).unwrap().passed());
    assert!(verify_isometry(&unit_sphere(3), &map("1/x"), 16, 1, &cfg()).unwrap().passed());
    match verify_isometry(&unit_sphere(3), &map("x^2"), 16, 1, &cfg()).unwrap() {
        IsometryCheck::Witness(IsometryWitness::Distorts { x, y, dist, image_dist }) => {
            assert!(x.approx_eq(&num("1", 3)).unwrap());
            assert!(y.approx_eq(&num("2", 3)).unwrap());
            assert_eq!(dist, Radius::new(0));
            assert_eq!(image_dist, Some(Radius::new(-1)));
        }
        other => panic!("{other:?}"),
    }
    match verify_isometry(&unit_sphere(3), &map("3x"), 4, 1, &cfg()).unwrap() {
        IsometryCheck::Witness(IsometryWitness::LeavesSphere { .. }) => {}
        other => panic!("{other:?}"),
    }
    match verify_isometry(&unit_sphere(3), &map("1/(x-1)"), 4, 1, &cfg()).unwrap() {
        IsometryCheck::Witness(IsometryWitness::Evaluation { error, .. }) => assert_eq!(error, Error::DivisionByZero),
        other => panic!("{other:?}"),
    }
    assert!(verify_isometry(&unit_sphere(3), &map("x"), 0, 1, &cfg()).is_err());
}

#[test]
fn close_pairs_are_checked() {
    // x^3 keeps distinct residues mod 3 apart but contracts nearby points
    match verify_isometry(&unit_sphere(3), &map("x^3"), 8, 5, &cfg()).unwrap() {
        IsometryCheck::Witness(IsometryWitness::Distorts { dist, image_dist, .. }) => {
            assert!(dist < Radius::new(0));
            assert!(image_dist.unwrap() < dist);
        }
        other => panic!("{other:?}"),
    }
    // (x - y)(1 + 3(x + y)) has a unit second factor on units
    assert!(verify_isometry(&unit_sphere(3), &map("x+3x^2"), 32, 5, &cfg()).unwrap().passed());
}

#[test]
fn rho_examples() {
    assert_eq!(
        compute_rho(&unit_sphere(2), &map("x+2"), 16, 3, &cfg()).unwrap(),
        RhoOutcome::Constant(Radius::new(-1))
    );
    assert_eq!(
        compute_rho(&unit_sphere(2), &map("3x"), 16, 3, &cfg()).unwrap(),
        RhoOutcome::Constant(Radius::new(-1))
    );
    match compute_rho(&unit_sphere(3), &map("1/x"), 16, 3, &cfg()).unwrap() {
        RhoOutcome::ZeroSomewhere { x, other: Some((y, ry)) } => {
            assert!(x.approx_eq(&num("1", 3)).unwrap());
            assert!(y.approx_eq(&num("2", 3)).unwrap());
            assert_eq!(ry, Radius::new(-1));
        }
        other => panic!("{other:?}"),
    }
    match compute_rho(&unit_sphere(5), &map("x^2"), 8, 3, &cfg()).unwrap() {
        RhoOutcome::ZeroSomewhere { .. } | RhoOutcome::NonConstant { .. } => {}
        other => panic!("{other:?}"),
    }
}

#[test]
fn invariant_balls() {
    let s = unit_sphere(2);
    let b = minimal_invariant_ball(&s, &map("x+2"), Radius::new(-1), &num("1", 2), &cfg()).unwrap();
    assert_eq!(b, canonical_ball(&num("1", 2), -1).unwrap());
    let b = minimal_invariant_ball(&s, &map("x+4"), Radius::new(-2), &num("1", 2), &cfg()).unwrap();
    assert_eq!(b, canonical_ball(&num("1", 2), -2).unwrap());
    let s3 = unit_sphere(3);
    let b = minimal_invariant_ball(&s3, &map("4x"), Radius::new(-1), &num("1", 3), &cfg()).unwrap();
    assert_eq!(b, canonical_ball(&num("1", 3), -1).unwrap());
    assert_eq!(
        minimal_invariant_ball(&s, &map("x+2"), Radius::new(-2), &num("1", 2), &cfg()),
        Err(Error::InvarianceFailed)
    );
    assert_eq!(
        minimal_invariant_ball(&s, &map("x+2"), Radius::new(-1), &num("2", 2), &cfg()),
        Err(Error::NotOnSphere)
    );
}

#[test]
fn orbit_examples() {
    let o = orbit(&map("x+2"), &num("1", 2), 5, &cfg()).unwrap();
    let expect: Vec<PAdic> = ["1", "3", "5", "7", "9", "11"].iter().map(|t| num(t, 2)).collect();
    assert_eq!(o.points.len(), 6);
    for (a, b) in o.points.iter().zip(&expect) {
        assert!(a.approx_eq(b).unwrap());
    }
    assert_eq!(o.displacements, vec![Some(Radius::new(-1)); 5]);
    assert_eq!(o.period, None);

    let o = orbit(&map("3-x"), &num("1", 3), 10, &cfg()).unwrap();
    assert_eq!(o.period, Some(Period { length: 2, offset: 0 }));
    assert_eq!(o.points.len(), 3);
    assert!(o.points[1].approx_eq(&num("2", 3)).unwrap());

    let err = orbit(&map("(x+2)/(3/2-1/2*x)"), &num("1", 3), 5, &cfg()).unwrap_err();
    assert_eq!(err.iterate, 2);
    assert_eq!(err.error, Error::DivisionByZero);
}

#[test]
fn long_orbit_never_settles() {
    let o = orbit(&map("x+3"), &num("1", 3), 2000, &cfg()).unwrap();
    assert_eq!(o.period, None);
    assert_eq!(o.min_displacement(), Some(Radius::new(-1)));
}

#[test]
fn derivative_examples() {
    let c = cfg();
    assert_eq!(derivative_norm(&map("x+2"), &num("5", 2), 6, &c).unwrap(), Radius::new(0));
    assert_eq!(derivative_norm(&map("3x"), &num("1", 2), 6, &c).unwrap(), Radius::new(0));
    assert_eq!(derivative_norm(&map("x^2"), &num("1", 3), 6, &c).unwrap(), Radius::new(0));
    assert_eq!(derivative_norm(&map("x^2"), &num("1", 2), 6, &c).unwrap(), Radius::new(-1));
}

#[test]
fn induced_permutations() {
    let s2 = unit_sphere(2);
    let perm = induced_cell_map(&s2, &map("x+2"), 3, &cfg()).unwrap();
    assert_eq!(as_residue_map(&s2, &perm), vec![(1, 3), (3, 5), (5, 7), (7, 1)]);
    assert_eq!(perm.cycle_structure().lengths, vec![4]);

    let perm = induced_cell_map(&s2, &map("3x"), 3, &cfg()).unwrap();
    assert_eq!(as_residue_map(&s2, &perm), vec![(1, 3), (3, 1), (5, 7), (7, 5)]);
    assert_eq!(cycle_structure(&perm).lengths, vec![2, 2]);

    let s3 = unit_sphere(3);
    let perm = induced_cell_map(&s3, &map("x+3"), 1, &cfg()).unwrap();
    assert_eq!(perm.image(), &[0, 1]);
    assert_eq!(perm.cycle_structure().lengths, vec![1, 1]);

    assert!(matches!(
        induced_cell_map(&s3, &map("x^2"), 1, &cfg()),
        Err(Error::NotPermutation { .. })
    ));
    assert_eq!(
        induced_cell_map(&s3, &map("x"), 30, &cfg()),
        Err(Error::InsufficientPrecision)
    );
}

#[test]
fn projections_agree() {
    let s = unit_sphere(3);
    for f in ["x+3", "4x", "1/x", "(x+3)/(3x+1)"] {
        let f = map(f);
        for k in 2..=4 {
            let fine = induced_cell_map(&s, &f, k, &cfg()).unwrap();
            let coarse = induced_cell_map(&s, &f, k - 1, &cfg()).unwrap();
            assert_eq!(fine.project(3).unwrap(), coarse);
        }
    }
}

#[test]
fn verdict_examples() {
    let r = ergodicity_verdict(&unit_sphere(2), &map("x+2"), 12, 16, 7, &cfg()).unwrap();
    assert_eq!(r.verdict, ErgodicityVerdict::ErgodicUpToLevel(12));
    assert_eq!(r.criterion, Some(ExactRational::one()));
    for (k, level) in r.levels.iter().enumerate() {
        assert_eq!(level.lengths, vec![1usize << k]);
    }

    let r = ergodicity_verdict(&unit_sphere(3), &map("x+3"), 4, 16, 7, &cfg()).unwrap();
    match &r.verdict {
        ErgodicityVerdict::NotErgodic(NotErgodicReason::MeasureCriterion { value, ball }) => {
            assert_eq!(*value, parse_rational("1/2").unwrap());
            assert_eq!(ball.exp(), -1);
        }
        other => panic!("{other:?}"),
    }

    let r = ergodicity_verdict(&unit_sphere(2), &map("3x"), 6, 16, 7, &cfg()).unwrap();
    assert_eq!(r.criterion, Some(ExactRational::one()));
    match &r.verdict {
        ErgodicityVerdict::NotErgodic(NotErgodicReason::CycleSplit { level, cycles, measure, invariant_set }) => {
            assert_eq!(*level, 3);
            assert_eq!(cycles.len(), 2);
            assert_eq!(*measure, parse_rational("1/2").unwrap());
            assert_eq!(invariant_set.balls().len(), 2);
        }
        other => panic!("{other:?}"),
    }
    assert_eq!(r.levels.last().unwrap().lengths, vec![2, 2]);
}

#[test]
fn verdict_failures() {
    let r = ergodicity_verdict(&unit_sphere(3), &map("x^2"), 3, 8, 1, &cfg()).unwrap();
    assert!(matches!(r.verdict, ErgodicityVerdict::NotIsometry(_)));
    let r = ergodicity_verdict(&unit_sphere(3), &map("1/x"), 3, 8, 1, &cfg()).unwrap();
    assert!(matches!(r.verdict, ErgodicityVerdict::AssumptionViolated(RhoOutcome::ZeroSomewhere { .. })));
    assert!(matches!(
        ergodicity_verdict(&unit_sphere(2), &map("x+2"), 40, 8, 1, &cfg()),
        Err(Error::ResourceLimit { .. })
    ));
}

#[test]
fn displacement_equal_to_radius() {
    // 2 topologically generates the units of Z_3, so x -> 2x moves every
    // point by the full radius and still has single-cycle quotients
    let r = ergodicity_verdict(&unit_sphere(3), &map("2x"), 6, 16, 2, &cfg()).unwrap();
    assert!(r.rho_equals_radius);
    assert_eq!(r.rho, Some(Radius::new(0)));
    assert_eq!(r.criterion, Some(parse_rational("3/2").unwrap()));
    assert_eq!(r.verdict, ErgodicityVerdict::ErgodicUpToLevel(6));
}

#[test]
fn shifted_sphere() {
    // S_{1/2}(1) in Q_2 is 3 + 4Z_2; x -> x + 4 moves by 1/4
    let s = Sphere::new(num("1", 2), -1);
    let r = ergodicity_verdict(&s, &map("x+4"), 8, 16, 3, &cfg()).unwrap();
    assert_eq!(r.rho, Some(Radius::new(-2)));
    assert_eq!(r.verdict, ErgodicityVerdict::ErgodicUpToLevel(8));
}
