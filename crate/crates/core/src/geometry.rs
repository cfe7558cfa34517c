//! Balls, spheres, and their hierarchical decomposition into cells.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::ToPrimitive;
use rand::Rng;

use crate::error::{Error, Result};
use crate::padic::{from_residue, PAdic, Prime, Radius};

/// Default cap on the number of cells a single enumeration may produce.
pub const DEFAULT_CELL_CAP: u64 = 1_000_000;

/// The closed ball `V_{p^e}(c)` in canonical form: the center keeps only
/// digits of weight below `p^{-e}`, so two balls are equal iff their fields
/// are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ball {
    exp: i64,
    center: PAdic,
}

/// Canonical form of `V_{p^e}(c)`.
pub fn canonical_ball(c: &PAdic, exp: i64) -> Result<Ball> {
    let center = match c.absolute_precision() {
        None => c.clone(),
        Some(abs) if abs < -exp => return Err(Error::InsufficientPrecision),
        Some(_) => {
            let t = c.truncate_abs(-exp);
            if t.is_vanished() {
                PAdic::zero(c.prime())
            } else {
                t
            }
        }
    };
    Ok(Ball { exp, center })
}

impl Ball {
    pub fn prime(&self) -> Prime {
        self.center.prime()
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn radius(&self) -> Radius {
        Radius::new(self.exp)
    }

    /// The canonical (truncated) center.
    pub fn center(&self) -> &PAdic {
        &self.center
    }

    /// The canonical center as a point known to absolute precision `abs`.
    pub fn point(&self, abs: i64) -> PAdic {
        self.center.zero_extend(abs)
    }

    pub fn contains(&self, x: &PAdic) -> Result<bool> {
        let d = x.checked_sub(&self.center)?;
        if d.is_exact_zero() {
            return Ok(true);
        }
        match d.valuation() {
            Some(v) => Ok(v >= -self.exp),
            None => {
                if d.absolute_precision().unwrap_or(i64::MAX) >= -self.exp {
                    Ok(true)
                } else {
                    Err(Error::InsufficientPrecision)
                }
            }
        }
    }

    pub fn contains_ball(&self, other: &Ball) -> Result<bool> {
        Ok(other.exp <= self.exp && self.contains(&other.center)?)
    }

    /// Two balls of an ultrametric space are either nested or disjoint.
    pub fn is_disjoint(&self, other: &Ball) -> Result<bool> {
        let (small, large) = if self.exp <= other.exp {
            (self, other)
        } else {
            (other, self)
        };
        Ok(!large.contains(&small.center)?)
    }

    /// The ball of radius `p^{e+1}` containing this one.
    pub fn parent(&self) -> Ball {
        canonical_ball(&self.center, self.exp + 1).expect("canonical center has enough digits")
    }

    /// The `p^k` sub-balls of radius `p^{e-k}`, ordered lexicographically in
    /// the digit string `(t_0, ..., t_{k-1})` with `t_0` most significant.
    pub fn cells(&self, k: u32, cap: u64) -> Result<Vec<Ball>> {
        let p = self.prime();
        let count = checked_count(p, k, false, cap)?;
        let base = self.center.zero_extend(-self.exp + k as i64);
        (0..count)
            .map(|j| {
                let t = index_to_digits(p, k, j, false);
                let offset = digits_value(p, &t);
                let shifted = from_residue(p, -self.exp, &offset, k);
                canonical_ball(&base.checked_add(&shifted)?, self.exp - k as i64)
            })
            .collect()
    }

    /// A Haar-uniform point known to `digits` digits below the radius.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, digits: u32) -> PAdic {
        let p = self.prime();
        let t: Vec<u32> = (0..digits).map(|_| rng.gen_range(0..p.get())).collect();
        let offset = from_residue(p, -self.exp, &digits_value(p, &t), digits);
        self.point(-self.exp + digits as i64)
            .checked_add(&offset)
            .expect("same prime")
    }
}

impl fmt::Display for Ball {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "V[{}^{}]({})", self.prime(), self.exp, self.center)
    }
}

/// The sphere `S_{p^e}(c)`. The center is kept as given.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Sphere {
    exp: i64,
    center: PAdic,
}

/// Position of a cell among the `(p-1) p^{k-1}` level-`k` cells of a sphere.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CellIndex {
    pub level: u32,
    pub index: usize,
}

impl Sphere {
    pub fn new(center: PAdic, exp: i64) -> Self {
        Sphere { exp, center }
    }

    pub fn prime(&self) -> Prime {
        self.center.prime()
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn radius(&self) -> Radius {
        Radius::new(self.exp)
    }

    pub fn center(&self) -> &PAdic {
        &self.center
    }

    /// `|x - c| = p^e`, certified from the known digits.
    pub fn contains(&self, x: &PAdic) -> Result<bool> {
        let d = x.checked_sub(&self.center)?;
        if d.is_exact_zero() {
            return Ok(false);
        }
        match d.valuation() {
            Some(v) => Ok(v == -self.exp),
            None => {
                if d.absolute_precision().unwrap_or(i64::MAX) > -self.exp {
                    Ok(false)
                } else {
                    Err(Error::InsufficientPrecision)
                }
            }
        }
    }

    pub fn contains_ball(&self, b: &Ball) -> Result<bool> {
        Ok(b.exp < self.exp && self.contains(b.center())?)
    }

    pub fn cell_count(&self, k: u32) -> u64 {
        cell_count(self.prime(), k, true)
    }

    /// The level-`k` cells: balls of radius `p^{e-k}` with centers
    /// `c + p^{-e}(t_0 + t_1 p + ... + t_{k-1} p^{k-1})`, `t_0 != 0`.
    pub fn cells(&self, k: u32, cap: u64) -> Result<Vec<Ball>> {
        if k == 0 {
            return Err(Error::InvalidArgument("cell level must be at least 1"));
        }
        let p = self.prime();
        let count = checked_count(p, k, true, cap)?;
        let base = self.base(k)?;
        (0..count)
            .map(|j| {
                let t = index_to_digits(p, k, j, true);
                let offset = from_residue(p, -self.exp, &digits_value(p, &t), k);
                canonical_ball(&base.checked_add(&offset)?, self.exp - k as i64)
            })
            .collect()
    }

    /// The cell at a given index, without enumerating the others.
    pub fn cell(&self, idx: CellIndex) -> Result<Ball> {
        let p = self.prime();
        let k = idx.level;
        if k == 0 || idx.index as u64 >= self.cell_count(k) {
            return Err(Error::InvalidArgument("cell index out of range"));
        }
        let t = index_to_digits(p, k, idx.index as u64, true);
        let offset = from_residue(p, -self.exp, &digits_value(p, &t), k);
        canonical_ball(&self.base(k)?.checked_add(&offset)?, self.exp - k as i64)
    }

    /// Index of the level-`k` cell containing `x`.
    pub fn locate_cell(&self, k: u32, x: &PAdic) -> Result<CellIndex> {
        if k == 0 {
            return Err(Error::InvalidArgument("cell level must be at least 1"));
        }
        if !self.contains(x)? {
            return Err(Error::NotOnSphere);
        }
        let d = x.checked_sub(&self.center)?;
        let residue = d.digits_window(-self.exp, k)?;
        let p = self.prime();
        let mut rest = residue;
        let pb = BigUint::from(p.get());
        let mut digits = Vec::with_capacity(k as usize);
        for _ in 0..k {
            digits.push((&rest % &pb).to_u32().unwrap_or(0));
            rest /= &pb;
        }
        Ok(CellIndex {
            level: k,
            index: digits_to_index(p, &digits, true) as usize,
        })
    }

    /// A Haar-uniform point of the sphere known to `digits` digits below
    /// the radius weight.
    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R, digits: u32) -> PAdic {
        let p = self.prime();
        let mut t: Vec<u32> = Vec::with_capacity(digits as usize);
        t.push(rng.gen_range(1..p.get()));
        for _ in 1..digits {
            t.push(rng.gen_range(0..p.get()));
        }
        let offset = from_residue(p, -self.exp, &digits_value(p, &t), digits);
        self.center
            .zero_extend(-self.exp + digits as i64)
            .checked_add(&offset)
            .expect("same prime")
    }

    /// Center reduced to absolute precision `-e + k`, padded if it is a
    /// terminating expansion.
    fn base(&self, k: u32) -> Result<PAdic> {
        let need = -self.exp + k as i64;
        match self.center.absolute_precision() {
            None => Ok(self.center.clone()),
            Some(abs) if abs < need => Err(Error::InsufficientPrecision),
            Some(_) => Ok(self.center.clone()),
        }
    }
}

impl fmt::Display for Sphere {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S[{}^{}]({})", self.prime(), self.exp, self.center)
    }
}

/// The set a [`ClopenSet`] lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Region {
    Ball(Ball),
    Sphere(Sphere),
}

impl Region {
    pub fn prime(&self) -> Prime {
        match self {
            Region::Ball(b) => b.prime(),
            Region::Sphere(s) => s.prime(),
        }
    }

    pub fn contains_ball(&self, b: &Ball) -> Result<bool> {
        match self {
            Region::Ball(big) => big.contains_ball(b),
            Region::Sphere(s) => s.contains_ball(b),
        }
    }

    pub fn contains(&self, x: &PAdic) -> Result<bool> {
        match self {
            Region::Ball(b) => b.contains(x),
            Region::Sphere(s) => s.contains(x),
        }
    }
}

/// A finite union of pairwise disjoint canonical balls inside a parent
/// ball or sphere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClopenSet {
    parent: Region,
    balls: Vec<Ball>,
}

impl ClopenSet {
    /// Validates containment and disjointness.
    pub fn new(parent: Region, balls: Vec<Ball>) -> Result<Self> {
        for b in &balls {
            if b.prime() != parent.prime() {
                return Err(Error::PrimeMismatch {
                    left: parent.prime().get(),
                    right: b.prime().get(),
                });
            }
            if !parent.contains_ball(b)? {
                return Err(Error::NotContained);
            }
        }
        check_disjoint(&balls)?;
        Ok(ClopenSet { parent, balls })
    }

    pub fn empty(parent: Region) -> Self {
        ClopenSet {
            parent,
            balls: Vec::new(),
        }
    }

    /// A sphere as the union of its level-1 cells.
    pub fn whole_sphere(s: &Sphere) -> Result<Self> {
        let balls = s.cells(1, DEFAULT_CELL_CAP)?;
        Ok(ClopenSet {
            parent: Region::Sphere(s.clone()),
            balls,
        })
    }

    pub fn parent(&self) -> &Region {
        &self.parent
    }

    pub fn balls(&self) -> &[Ball] {
        &self.balls
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }

    /// Merges every complete family of `p` sibling balls into its parent
    /// (when the parent still lies inside the region) until no family is
    /// complete, then sorts. Two presentations of the same set normalize to
    /// the same list.
    pub fn normalized(&self) -> Result<Self> {
        let p = self.parent.prime();
        let mut levels: BTreeMap<i64, BTreeSet<PAdic>> = BTreeMap::new();
        for b in &self.balls {
            levels.entry(b.exp).or_default().insert(b.center.clone());
        }
        let mut exp = match levels.keys().next() {
            Some(&e) => e,
            None => return Ok(self.clone()),
        };
        loop {
            let max_exp = *levels.keys().next_back().expect("nonempty");
            if exp > max_exp {
                break;
            }
            if let Some(centers) = levels.get(&exp).cloned() {
                let mut families: BTreeMap<Ball, Vec<PAdic>> = BTreeMap::new();
                for c in centers {
                    let parent = canonical_ball(&c, exp + 1)?;
                    families.entry(parent).or_default().push(c);
                }
                for (parent, members) in families {
                    if members.len() as u64 == p.get() as u64 && self.parent.contains_ball(&parent)? {
                        let level = levels.get_mut(&exp).expect("present");
                        for m in &members {
                            level.remove(m);
                        }
                        levels.entry(exp + 1).or_default().insert(parent.center);
                    }
                }
            }
            exp += 1;
        }
        let mut balls = Vec::new();
        for (e, centers) in levels.into_iter().rev() {
            for c in centers {
                balls.push(Ball { exp: e, center: c });
            }
        }
        Ok(ClopenSet {
            parent: self.parent.clone(),
            balls,
        })
    }

    /// Rewrites every ball as its sub-balls of radius `p^exp`.
    pub fn refined_to(&self, exp: i64, cap: u64) -> Result<Self> {
        let mut balls = Vec::new();
        for b in &self.balls {
            if b.exp <= exp {
                balls.push(b.clone());
            } else {
                balls.extend(b.cells((b.exp - exp) as u32, cap)?);
            }
        }
        Ok(ClopenSet {
            parent: self.parent.clone(),
            balls,
        })
    }
}

/// Balls are pairwise disjoint iff no center lies in another ball of equal
/// or larger radius. Checked radius by radius through canonical keys.
pub fn check_disjoint(balls: &[Ball]) -> Result<()> {
    let mut by_exp: BTreeMap<i64, BTreeSet<&PAdic>> = BTreeMap::new();
    for b in balls {
        if !by_exp.entry(b.exp).or_default().insert(&b.center) {
            return Err(Error::OverlapDetected);
        }
    }
    for b in balls {
        for (&e, centers) in by_exp.range(b.exp + 1..) {
            let key = canonical_ball(&b.center, e)?;
            if centers.contains(&key.center) {
                return Err(Error::OverlapDetected);
            }
        }
    }
    Ok(())
}

pub(crate) fn cell_count(p: Prime, k: u32, sphere: bool) -> u64 {
    let pu = p.get() as u64;
    let mut n: u64 = if sphere { pu - 1 } else { pu };
    for _ in 1..k {
        n = n.saturating_mul(pu);
    }
    if k == 0 {
        1
    } else {
        n
    }
}

fn checked_count(p: Prime, k: u32, sphere: bool, cap: u64) -> Result<u64> {
    let n = cell_count(p, k, sphere);
    if n > cap {
        Err(Error::ResourceLimit { requested: n, cap })
    } else {
        Ok(n)
    }
}

/// Index `j` to digits `t_0..t_{k-1}` (little-endian by weight), where `t_0`
/// is the most significant position of the index.
fn index_to_digits(p: Prime, k: u32, j: u64, sphere: bool) -> Vec<u32> {
    let pu = p.get() as u64;
    let mut t = alloc::vec![0u32; k as usize];
    let mut rest = j;
    for i in (1..k as usize).rev() {
        t[i] = (rest % pu) as u32;
        rest /= pu;
    }
    t[0] = if sphere { rest as u32 + 1 } else { rest as u32 };
    t
}

fn digits_to_index(p: Prime, t: &[u32], sphere: bool) -> u64 {
    let pu = p.get() as u64;
    let lead = if sphere { t[0] as u64 - 1 } else { t[0] as u64 };
    t[1..].iter().fold(lead, |acc, &d| acc * pu + d as u64)
}

fn digits_value(p: Prime, t: &[u32]) -> BigUint {
    t.iter()
        .rev()
        .fold(BigUint::from(0u32), |acc, &d| acc * p.get() + d)
}
