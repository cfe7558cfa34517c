//! Isometries of a sphere `S_r(a)` given by rational maps: isometry and
//! displacement checks, orbits, induced permutations of the finite cell
//! quotients, and level-by-level ergodicity verdicts.

mod map;
mod perm;

pub use map::{CompiledMap, RationalMap, DEFAULT_DEGREE_CAP};
pub use perm::{CellPermutation, CycleStructure};

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{canonical_ball, Ball, ClopenSet, Region, Sphere};
use crate::measure::{normalized_measure, strictly_between_zero_and_one};
use crate::padic::{from_residue, pow_rational, ExactRational, PAdic, Radius, DEFAULT_PRECISION};

/// Knobs shared by every dynamics routine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynamicsConfig {
    /// Digits below the radius weight carried by sample points.
    pub precision: u32,
    /// Largest number of cells enumerated at one level.
    pub cell_cap: u64,
    /// Deepest level whose cell centers are always sampled.
    pub coverage_level: u32,
    /// Cell count above which coverage stops at a coarser level.
    pub coverage_cells: u64,
    /// Extra digits required beyond the level of a quotient computation.
    pub guard: u32,
}

impl Default for DynamicsConfig {
    fn default() -> Self {
        DynamicsConfig {
            precision: DEFAULT_PRECISION,
            cell_cap: crate::geometry::DEFAULT_CELL_CAP,
            coverage_level: 4,
            coverage_cells: 4096,
            guard: 8,
        }
    }
}

impl DynamicsConfig {
    pub fn with_precision(precision: u32) -> Self {
        DynamicsConfig {
            precision,
            ..Self::default()
        }
    }

    fn coeff_precision(&self) -> u32 {
        self.precision + self.guard + 8
    }
}

/// A sample pair or point on which `f` fails to be an isometry of `S`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometryWitness {
    LeavesSphere { x: PAdic, fx: PAdic },
    /// `|f(x) - f(y)| != |x - y|`; `None` stands for distance zero.
    Distorts {
        x: PAdic,
        y: PAdic,
        dist: Radius,
        image_dist: Option<Radius>,
    },
    Evaluation { x: PAdic, error: Error },
}

impl IsometryWitness {
    /// The points involved, `y` absent for single-point witnesses.
    pub fn points(&self) -> (&PAdic, Option<&PAdic>) {
        match self {
            IsometryWitness::LeavesSphere { x, .. } | IsometryWitness::Evaluation { x, .. } => (x, None),
            IsometryWitness::Distorts { x, y, .. } => (x, Some(y)),
        }
    }
}

impl fmt::Display for IsometryWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IsometryWitness::LeavesSphere { x, fx } => write!(f, "f({x}) = {fx} is off the sphere"),
            IsometryWitness::Distorts { x, y, .. } => write!(f, "f changes the distance between {x} and {y}"),
            IsometryWitness::Evaluation { x, error } => write!(f, "f({x}) failed: {error}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsometryCheck {
    /// No violation among the sampled points and pairs.
    Pass { points: usize, pairs: usize },
    Witness(IsometryWitness),
}

impl IsometryCheck {
    pub fn passed(&self) -> bool {
        matches!(self, IsometryCheck::Pass { .. })
    }
}

/// `|f(x) - x|` over the sample points; `None` marks a fixed point at
/// working precision.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DisplacementProfile {
    pub samples: Vec<(PAdic, Option<Radius>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RhoOutcome {
    Constant(Radius),
    NonConstant {
        x: PAdic,
        rx: Radius,
        y: PAdic,
        ry: Radius,
    },
    /// `x` is fixed; `other` is a sample with nonzero displacement, if any.
    ZeroSomewhere {
        x: PAdic,
        other: Option<(PAdic, Radius)>,
    },
}

impl DisplacementProfile {
    pub fn rho(&self) -> Result<RhoOutcome> {
        let mut fixed: Option<&PAdic> = None;
        let mut first: Option<(&PAdic, Radius)> = None;
        let mut mismatch: Option<(&PAdic, Radius)> = None;
        for (x, d) in &self.samples {
            match (d, first) {
                (None, _) => {
                    fixed.get_or_insert(x);
                }
                (Some(r), None) => first = Some((x, *r)),
                (Some(r), Some((_, r0))) => {
                    if *r != r0 && mismatch.is_none() {
                        mismatch = Some((x, *r));
                    }
                }
            }
        }
        if let Some(x) = fixed {
            return Ok(RhoOutcome::ZeroSomewhere {
                x: x.clone(),
                other: first.map(|(y, r)| (y.clone(), r)),
            });
        }
        match (first, mismatch) {
            (None, _) => Err(Error::InvalidArgument("no sample points")),
            (Some((x, rx)), Some((y, ry))) => Ok(RhoOutcome::NonConstant {
                x: x.clone(),
                rx,
                y: y.clone(),
                ry,
            }),
            (Some((_, r)), None) => Ok(RhoOutcome::Constant(r)),
        }
    }
}

/// Sample points of `S`: every cell center down to the coverage level,
/// coarse levels first, then `trials` random points. Also returns the
/// coverage depth and the sample position of each deepest-level cell.
fn sample_points(
    s: &Sphere,
    trials: u32,
    seed: u64,
    cfg: &DynamicsConfig,
) -> Result<(Vec<PAdic>, u32, Vec<usize>)> {
    let abs = -s.exp() + cfg.precision as i64;
    let mut depth = 0;
    for k in 1..=cfg.coverage_level {
        if s.cell_count(k) > cfg.coverage_cells.min(cfg.cell_cap) {
            break;
        }
        depth = k;
    }
    let mut points = Vec::new();
    let mut position = Vec::new();
    if depth > 0 {
        let cells = s.cells(depth, cfg.cell_cap)?;
        let p = s.prime().get() as usize;
        // the center of cell i first appears at the coarsest level k with
        // p^{depth-k} dividing i
        let appears = |mut i: usize| {
            let mut k = depth;
            while k > 1 && i % p == 0 {
                i /= p;
                k -= 1;
            }
            k
        };
        let mut order: Vec<usize> = (0..cells.len()).collect();
        order.sort_by_key(|&i| (appears(i), i));
        position = alloc::vec![0; cells.len()];
        for (pos, &i) in order.iter().enumerate() {
            position[i] = pos;
            points.push(cells[i].point(abs));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        points.push(s.random_point(&mut rng, cfg.precision));
    }
    Ok((points, depth, position))
}

enum DistanceCheck {
    Same,
    Differs(Option<Radius>),
    Skip,
}

/// Compares `|fx - fy|` with `|x - y|` from the digits actually known.
fn compare_distance(x: &PAdic, y: &PAdic, fx: &PAdic, fy: &PAdic) -> Result<DistanceCheck> {
    let d = x.checked_sub(y)?;
    let Some(v) = d.valuation() else {
        return Ok(DistanceCheck::Skip);
    };
    let fd = fx.checked_sub(fy)?;
    if let Some(w) = fd.valuation() {
        return Ok(if w == v {
            DistanceCheck::Same
        } else {
            DistanceCheck::Differs(Some(Radius::new(-w)))
        });
    }
    match fd.absolute_precision() {
        // f(x) = f(y) exactly
        None => Ok(DistanceCheck::Differs(None)),
        Some(abs) if abs > v => Ok(DistanceCheck::Differs(None)),
        Some(_) => Err(Error::PrecisionExhausted),
    }
}

/// Evaluates at the sample points, splitting precision failures (returned
/// as errors) from other failures (returned as witnesses).
fn evaluate(
    f: &CompiledMap,
    x: &PAdic,
) -> Result<core::result::Result<PAdic, IsometryWitness>> {
    match f.eval(x) {
        Ok(v) => Ok(Ok(v)),
        Err(e) if e.is_precision_or_resource() => Err(e),
        Err(e) => Ok(Err(IsometryWitness::Evaluation { x: x.clone(), error: e })),
    }
}

/// Samples points and pairs of `S` and looks for a violation of
/// `f(S) ⊆ S` or of `|f(x) - f(y)| = |x - y|`. Pairs are consecutive cell
/// centers at each coverage level, consecutive random points, and random
/// points paired with a nearby perturbation.
pub fn verify_isometry(
    s: &Sphere,
    f: &RationalMap,
    trials: u32,
    seed: u64,
    cfg: &DynamicsConfig,
) -> Result<IsometryCheck> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    let p = s.prime();
    let compiled = f.compile(p, cfg.coeff_precision());
    let (points, depth, position) = sample_points(s, trials, seed, cfg)?;
    let mut images = Vec::with_capacity(points.len());
    for x in &points {
        let fx = match evaluate(&compiled, x)? {
            Ok(v) => v,
            Err(w) => return Ok(IsometryCheck::Witness(w)),
        };
        if !s.contains(&fx)? {
            return Ok(IsometryCheck::Witness(IsometryWitness::LeavesSphere { x: x.clone(), fx }));
        }
        images.push(fx);
    }

    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let covered = if depth > 0 { s.cell_count(depth) as usize } else { 0 };
    for k in 1..=depth {
        let stride = p.get().pow(depth - k) as usize;
        let n = covered / stride;
        for i in 0..n.saturating_sub(1) {
            pairs.push((position[i * stride], position[(i + 1) * stride]));
        }
    }
    for i in covered..points.len().saturating_sub(1) {
        pairs.push((i, i + 1));
    }
    let mut checked = 0;
    for (i, j) in pairs {
        let verdict = compare_distance(&points[i], &points[j], &images[i], &images[j])?;
        checked += 1;
        if let DistanceCheck::Differs(image_dist) = verdict {
            return Ok(IsometryCheck::Witness(distorts(&points[i], &points[j], image_dist)));
        }
    }

    // close pairs y = x + p^{-e+j} w with a unit w
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let span = (cfg.precision / 2).max(1);
    for t in 0..trials as usize {
        let x = &points[covered + t];
        let j = 1 + rng.gen_range(0..span) as i64;
        let w = random_unit(&mut rng, p, cfg.precision);
        let y = x.checked_add(&w.shift(-s.exp() + j))?;
        let fy = match evaluate(&compiled, &y)? {
            Ok(v) => v,
            Err(w) => return Ok(IsometryCheck::Witness(w)),
        };
        checked += 1;
        if let DistanceCheck::Differs(image_dist) = compare_distance(x, &y, &images[covered + t], &fy)? {
            return Ok(IsometryCheck::Witness(distorts(x, &y, image_dist)));
        }
    }
    Ok(IsometryCheck::Pass {
        points: points.len(),
        pairs: checked,
    })
}

fn distorts(x: &PAdic, y: &PAdic, image_dist: Option<Radius>) -> IsometryWitness {
    let dist = x
        .checked_sub(y)
        .ok()
        .and_then(|d| d.valuation())
        .map(|v| Radius::new(-v))
        .unwrap_or(Radius::new(0));
    IsometryWitness::Distorts {
        x: x.clone(),
        y: y.clone(),
        dist,
        image_dist,
    }
}

fn random_unit<R: Rng>(rng: &mut R, p: crate::padic::Prime, digits: u32) -> PAdic {
    let mut residue = num_bigint::BigUint::from(rng.gen_range(1..p.get()));
    let mut weight = num_bigint::BigUint::from(p.get());
    for _ in 1..digits {
        residue += &weight * rng.gen_range(0..p.get());
        weight *= p.get();
    }
    from_residue(p, 0, &residue, digits)
}

/// `|f(x) - x|` at every sample point of [`verify_isometry`]'s first phase.
pub fn displacement_profile(
    s: &Sphere,
    f: &RationalMap,
    trials: u32,
    seed: u64,
    cfg: &DynamicsConfig,
) -> Result<DisplacementProfile> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1"));
    }
    let compiled = f.compile(s.prime(), cfg.coeff_precision());
    let (points, _, _) = sample_points(s, trials, seed, cfg)?;
    let mut samples = Vec::with_capacity(points.len());
    for x in points {
        let d = compiled.eval(&x)?.checked_sub(&x)?;
        let r = d.valuation().map(|v| Radius::new(-v));
        samples.push((x, r));
    }
    Ok(DisplacementProfile { samples })
}

pub fn compute_rho(s: &Sphere, f: &RationalMap, trials: u32, seed: u64, cfg: &DynamicsConfig) -> Result<RhoOutcome> {
    displacement_profile(s, f, trials, seed, cfg)?.rho()
}

/// The ball `V_ρ(x0)`, after checking that `f(x0)` lies in it and, when
/// `ρ < r`, that the level of `S` whose cells have radius `ρ` has the cell
/// of `x0` mapped into itself.
pub fn minimal_invariant_ball(s: &Sphere, f: &RationalMap, rho: Radius, x0: &PAdic, cfg: &DynamicsConfig) -> Result<Ball> {
    if !s.contains(x0)? {
        return Err(Error::NotOnSphere);
    }
    if rho.exp() > s.exp() {
        return Err(Error::InvalidArgument("displacement exceeds the sphere radius"));
    }
    let compiled = f.compile(s.prime(), cfg.coeff_precision());
    let ball = canonical_ball(x0, rho.exp())?;
    if !ball.contains(&compiled.eval(x0)?)? {
        return Err(Error::InvarianceFailed);
    }
    if rho.exp() < s.exp() {
        let level = (s.exp() - rho.exp()) as u32;
        let home = s.locate_cell(level, x0)?;
        let center = s.cell(home)?.point(-s.exp() + cfg.precision.max(level + cfg.guard) as i64);
        let image = compiled.eval(&center)?;
        if !s.contains(&image)? || s.locate_cell(level, &image)? != home {
            return Err(Error::InvarianceFailed);
        }
    }
    Ok(ball)
}

/// A repeated point: `points[offset + length]` equals `points[offset]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Period {
    pub length: usize,
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitRecord {
    pub start: PAdic,
    /// `x_0, x_1, ...`; stops early at the first repeat.
    pub points: Vec<PAdic>,
    /// `|x_{i+1} - x_i|`, `None` when the step is zero at working precision.
    pub displacements: Vec<Option<Radius>>,
    pub period: Option<Period>,
}

impl OrbitRecord {
    /// Smallest nonzero displacement, if every step moved.
    pub fn min_displacement(&self) -> Option<Radius> {
        let mut out: Option<Radius> = None;
        for d in &self.displacements {
            let d = (*d)?;
            out = Some(out.map_or(d, |m| if d < m { d } else { m }));
        }
        out
    }
}

/// An orbit computation that stopped at iterate `iterate`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitError {
    pub iterate: usize,
    pub error: Error,
}

impl fmt::Display for OrbitError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "iterate {}: {}", self.iterate, self.error)
    }
}

impl From<OrbitError> for Error {
    fn from(e: OrbitError) -> Self {
        e.error
    }
}

/// Iterates `f` up to `n` times from `x0`, stopping at the first point that
/// equals an earlier one at working precision.
pub fn orbit(f: &RationalMap, x0: &PAdic, n: usize, cfg: &DynamicsConfig) -> core::result::Result<OrbitRecord, OrbitError> {
    if n == 0 {
        return Err(OrbitError {
            iterate: 0,
            error: Error::InvalidArgument("iteration count must be at least 1"),
        });
    }
    let compiled = f.compile(x0.prime(), cfg.coeff_precision());
    // points are bucketed by their leading digits; those known to fewer
    // digits than the key are compared against everything
    let key_abs = x0.valuation().unwrap_or(0) + x0.precision().clamp(1, 16) as i64;
    let key = |x: &PAdic| match x.absolute_precision() {
        Some(abs) if abs < key_abs => None,
        _ => Some(x.truncate_abs(key_abs)),
    };
    let mut seen: BTreeMap<PAdic, Vec<usize>> = BTreeMap::new();
    let mut loose: Vec<usize> = Vec::new();
    match key(x0) {
        Some(k) => seen.entry(k).or_default().push(0),
        None => loose.push(0),
    }
    let mut points = Vec::with_capacity(n + 1);
    let mut displacements = Vec::with_capacity(n);
    points.push(x0.clone());
    let mut period = None;
    for i in 1..=n {
        let fail = |error| OrbitError { iterate: i, error };
        let prev = &points[i - 1];
        let next = compiled.eval(prev).map_err(fail)?;
        let step = next.checked_sub(prev).map_err(fail)?;
        displacements.push(step.valuation().map(|v| Radius::new(-v)));
        let k = key(&next);
        let candidates: Vec<usize> = match &k {
            Some(k) => seen.get(k).into_iter().flatten().chain(&loose).copied().collect(),
            None => (0..i).collect(),
        };
        for j in candidates {
            if next.approx_eq(&points[j]).map_err(fail)? {
                period = Some(Period {
                    length: i - j,
                    offset: j,
                });
                break;
            }
        }
        match k {
            Some(k) => seen.entry(k).or_default().push(i),
            None => loose.push(i),
        }
        points.push(next);
        if period.is_some() {
            break;
        }
    }
    Ok(OrbitRecord {
        start: x0.clone(),
        points,
        displacements,
        period,
    })
}

/// `|f(x + p^h) - f(x)| / |p^h|`.
pub fn derivative_norm(f: &RationalMap, x: &PAdic, h: i64, cfg: &DynamicsConfig) -> Result<Radius> {
    let p = x.prime();
    let compiled = f.compile(p, cfg.coeff_precision());
    let step = PAdic::power_of_p(p, h, cfg.precision);
    let diff = compiled.eval(&x.checked_add(&step)?)?.checked_sub(&compiled.eval(x)?)?;
    match diff.norm()? {
        Some(r) => Ok(Radius::new(r.exp() + h)),
        None => Err(Error::PrecisionExhausted),
    }
}

/// Sends each level-`k` cell of `S` to the cell containing the image of its
/// center.
pub fn induced_cell_map(s: &Sphere, f: &RationalMap, k: u32, cfg: &DynamicsConfig) -> Result<CellPermutation> {
    if k == 0 {
        return Err(Error::InvalidArgument("cell level must be at least 1"));
    }
    if cfg.precision < k + cfg.guard {
        return Err(Error::InsufficientPrecision);
    }
    let compiled = f.compile(s.prime(), cfg.coeff_precision());
    let abs = -s.exp() + cfg.precision as i64;
    let cells = s.cells(k, cfg.cell_cap)?;
    let mut image = Vec::with_capacity(cells.len());
    for cell in &cells {
        let fx = compiled.eval(&cell.point(abs))?;
        image.push(s.locate_cell(k, &fx)?.index);
    }
    CellPermutation::new(k, image)
}

pub fn cycle_structure(perm: &CellPermutation) -> CycleStructure {
    perm.cycle_structure()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NotErgodicReason {
    /// `p ρ / ((p - 1) r) != 1`; `ball` is the invariant ball `V_ρ(x0)`,
    /// whose normalized measure equals `value`.
    MeasureCriterion { value: ExactRational, ball: Ball },
    /// The cells of `cycles[0]` form an invariant set of measure `measure`.
    CycleSplit {
        level: u32,
        cycles: Vec<Vec<usize>>,
        invariant_set: ClopenSet,
        measure: ExactRational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ErgodicityVerdict {
    NotErgodic(NotErgodicReason),
    /// The induced permutation is a single cycle at every level `1..=K`.
    ErgodicUpToLevel(u32),
    AssumptionViolated(RhoOutcome),
    NotIsometry(IsometryWitness),
}

impl ErgodicityVerdict {
    pub fn name(&self) -> &'static str {
        match self {
            ErgodicityVerdict::NotErgodic(_) => "NotErgodic",
            ErgodicityVerdict::ErgodicUpToLevel(_) => "ErgodicUpToLevel",
            ErgodicityVerdict::AssumptionViolated(_) => "AssumptionViolated",
            ErgodicityVerdict::NotIsometry(_) => "NotIsometry",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErgodicityReport {
    pub verdict: ErgodicityVerdict,
    pub rho: Option<Radius>,
    /// `p ρ / ((p - 1) r)`, when `ρ` is constant.
    pub criterion: Option<ExactRational>,
    /// Cycle structures of the levels examined.
    pub levels: Vec<CycleStructure>,
    /// Set when `ρ = r`; the invariant ball then contains the whole sphere
    /// and the measure criterion says nothing.
    pub rho_equals_radius: bool,
    pub precision: u32,
}

/// `p^{1 + e_ρ - e_r} / (p - 1)`. The exponent difference `e_r - e_ρ` is
/// the `n` with `r = p^n ρ`.
pub fn measure_criterion(s: &Sphere, rho: Radius) -> ExactRational {
    let p = s.prime();
    let n = s.exp() - rho.exp();
    pow_rational(p, 1 - n) / ExactRational::from_integer(BigInt::from(p.get() - 1))
}

/// Runs the isometry check, the displacement check, the measure criterion,
/// and the per-level cycle analysis, retrying once at doubled precision when
/// digits run out.
pub fn ergodicity_verdict(
    s: &Sphere,
    f: &RationalMap,
    max_level: u32,
    trials: u32,
    seed: u64,
    cfg: &DynamicsConfig,
) -> Result<ErgodicityReport> {
    if max_level == 0 {
        return Err(Error::InvalidArgument("level must be at least 1"));
    }
    let count = s.cell_count(max_level);
    if count > cfg.cell_cap {
        return Err(Error::ResourceLimit {
            requested: count,
            cap: cfg.cell_cap,
        });
    }
    let mut cfg = cfg.clone();
    cfg.precision = cfg.precision.max(max_level + cfg.guard);
    match verdict_at(s, f, max_level, trials, seed, &cfg) {
        Err(Error::PrecisionExhausted | Error::InsufficientPrecision) => {
            cfg.precision *= 2;
            verdict_at(s, f, max_level, trials, seed, &cfg)
        }
        other => other,
    }
}

fn verdict_at(
    s: &Sphere,
    f: &RationalMap,
    max_level: u32,
    trials: u32,
    seed: u64,
    cfg: &DynamicsConfig,
) -> Result<ErgodicityReport> {
    let mut report = ErgodicityReport {
        verdict: ErgodicityVerdict::ErgodicUpToLevel(max_level),
        rho: None,
        criterion: None,
        levels: Vec::new(),
        rho_equals_radius: false,
        precision: cfg.precision,
    };
    if let IsometryCheck::Witness(w) = verify_isometry(s, f, trials, seed, cfg)? {
        report.verdict = ErgodicityVerdict::NotIsometry(w);
        return Ok(report);
    }
    let profile = displacement_profile(s, f, trials, seed, cfg)?;
    let rho = match profile.rho()? {
        RhoOutcome::Constant(r) => r,
        other => {
            report.verdict = ErgodicityVerdict::AssumptionViolated(other);
            return Ok(report);
        }
    };
    report.rho = Some(rho);
    let value = measure_criterion(s, rho);
    report.criterion = Some(value.clone());
    report.rho_equals_radius = rho.exp() == s.exp();
    if !report.rho_equals_radius && !value.is_one() {
        let x0 = &profile.samples[0].0;
        let ball = minimal_invariant_ball(s, f, rho, x0, cfg)?;
        report.verdict = ErgodicityVerdict::NotErgodic(NotErgodicReason::MeasureCriterion { value, ball });
        return Ok(report);
    }
    for k in 1..=max_level {
        let perm = induced_cell_map(s, f, k, cfg)?;
        let structure = perm.cycle_structure();
        let split = !structure.is_single_cycle();
        report.levels.push(structure);
        if split {
            let cycles = perm.cycles();
            let balls = cycles[0]
                .iter()
                .map(|&i| s.cell(crate::geometry::CellIndex { level: k, index: i }))
                .collect::<Result<Vec<_>>>()?;
            let invariant_set = ClopenSet::new(Region::Sphere(s.clone()), balls)?;
            let measure = normalized_measure(s, &invariant_set)?;
            if !strictly_between_zero_and_one(&measure) {
                return Err(Error::InvarianceFailed);
            }
            report.verdict = ErgodicityVerdict::NotErgodic(NotErgodicReason::CycleSplit {
                level: k,
                cycles,
                invariant_set,
                measure,
            });
            return Ok(report);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests;
