//! Permutations induced on the level-`k` cells of a sphere.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// `image[i]` is the index of the cell that cell `i` is mapped into.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellPermutation {
    level: u32,
    image: Vec<usize>,
}

/// Cycle lengths of a permutation, largest first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleStructure {
    pub level: u32,
    pub lengths: Vec<usize>,
}

impl CycleStructure {
    pub fn is_single_cycle(&self) -> bool {
        self.lengths.len() == 1
    }

    pub fn domain_size(&self) -> usize {
        self.lengths.iter().sum()
    }
}

impl CellPermutation {
    /// Rejects maps that send two cells to the same cell.
    pub fn new(level: u32, image: Vec<usize>) -> Result<Self> {
        let n = image.len();
        let mut seen: Vec<Option<usize>> = vec![None; n];
        for (i, &j) in image.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidArgument("image index out of range"));
            }
            if let Some(first) = seen[j] {
                return Err(Error::NotPermutation {
                    first,
                    second: i,
                    image: j,
                });
            }
            seen[j] = Some(i);
        }
        Ok(CellPermutation { level, image })
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn len(&self) -> usize {
        self.image.len()
    }

    pub fn is_empty(&self) -> bool {
        self.image.is_empty()
    }

    /// Cycles in order of their smallest element, each starting there.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut done = vec![false; self.image.len()];
        let mut out = Vec::new();
        for start in 0..self.image.len() {
            if done[start] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut i = start;
            while !done[i] {
                done[i] = true;
                cycle.push(i);
                i = self.image[i];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_structure(&self) -> CycleStructure {
        let mut lengths: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        lengths.sort_unstable_by(|a, b| b.cmp(a));
        CycleStructure {
            level: self.level,
            lengths,
        }
    }

    /// The permutation one level coarser: cell `i` at level `k` lies in cell
    /// `i / p` at level `k - 1`. Errors when the projection is not well
    /// defined, which cannot happen for a map sending cells into cells.
    pub fn project(&self, p: u32) -> Result<CellPermutation> {
        if self.level <= 1 {
            return Err(Error::InvalidArgument("no coarser level"));
        }
        let p = p as usize;
        let n = self.image.len() / p;
        let mut image = vec![usize::MAX; n];
        for (i, &j) in self.image.iter().enumerate() {
            let (src, dst) = (i / p, j / p);
            if image[src] == usize::MAX {
                image[src] = dst;
            } else if image[src] != dst {
                return Err(Error::InvalidArgument("map does not respect the coarser cells"));
            }
        }
        CellPermutation::new(self.level - 1, image)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structures() {
        let four = CellPermutation::new(3, vec![1, 2, 3, 0]).unwrap();
        assert_eq!(four.cycle_structure().lengths, vec![4]);
        let pairs = CellPermutation::new(3, vec![1, 0, 3, 2]).unwrap();
        assert_eq!(pairs.cycles(), vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(pairs.cycle_structure().lengths, vec![2, 2]);
        let id = CellPermutation::new(1, vec![0, 1]).unwrap();
        assert_eq!(id.cycle_structure().lengths, vec![1, 1]);
        assert_eq!(id.cycle_structure().domain_size(), 2);
    }

    #[test]
    fn collisions() {
        assert_eq!(
            CellPermutation::new(2, vec![1, 0, 1]),
            Err(Error::NotPermutation {
                first: 0,
                second: 2,
                image: 1
            })
        );
    }

    #[test]
    fn projection() {
        let four = CellPermutation::new(3, vec![2, 3, 1, 0]).unwrap();
        assert_eq!(four.project(2).unwrap().image(), &[1, 0]);
        let bad = CellPermutation::new(3, vec![2, 0, 1, 3]).unwrap();
        assert!(bad.project(2).is_err());
    }
}
