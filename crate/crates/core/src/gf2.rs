//! Row spaces over GF(2) with rows packed into `u64` bitmasks.

use crate::error::{Error, Result};

/// Bitwise inner product `popcount(a & b) mod 2`.
#[inline]
pub fn dot(a: u64, b: u64) -> u64 {
    u64::from((a & b).count_ones() % 2 == 1)
}

/// Row-echelon basis of `n_bits`-wide rows, one row per pivot (its highest
/// set bit).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Basis {
    n_bits: usize,
    pivots: Vec<Option<u64>>,
}

impl Gf2Basis {
    pub fn new(n_bits: usize) -> Result<Self> {
        if n_bits == 0 || n_bits > 64 {
            return Err(Error::InvalidArgument(format!("row width {n_bits} not in 1..=64")));
        }
        Ok(Self { n_bits, pivots: vec![None; n_bits] })
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn rank(&self) -> usize {
        self.pivots.iter().flatten().count()
    }

    /// Stored rows, highest pivot first.
    pub fn rows(&self) -> Vec<u64> {
        self.pivots.iter().rev().flatten().copied().collect()
    }

    fn reduce(&self, mut row: u64) -> u64 {
        while row != 0 {
            let top = 63 - row.leading_zeros() as usize;
            match self.pivots.get(top).copied().flatten() {
                Some(r) => row ^= r,
                None => break,
            }
        }
        row
    }

    /// Add `row` if it is independent of the basis. Returns whether it was
    /// accepted; a rejected row leaves the basis untouched.
    pub fn add_if_independent(&mut self, row: u64) -> Result<bool> {
        if self.n_bits < 64 && row >> self.n_bits != 0 {
            return Err(Error::InvalidArgument(format!("row {row:#b} wider than {} bits", self.n_bits)));
        }
        let reduced = self.reduce(row);
        if reduced == 0 {
            return Ok(false);
        }
        let top = 63 - reduced.leading_zeros() as usize;
        self.pivots[top] = Some(reduced);
        Ok(true)
    }

    /// The unique `s != 0` orthogonal to every row, for a basis of rank
    /// `n - 1`.
    pub fn nullspace_nontrivial(&self) -> Result<u64> {
        let needed = self.n_bits - 1;
        let rank = self.rank();
        if rank < needed {
            return Err(Error::InsufficientRank { rank, needed });
        }
        if rank > needed {
            return Err(Error::Domain("full-rank rows have only the zero solution".into()));
        }
        // Reduced echelon form: clear each pivot bit from every other row.
        let mut rows: Vec<(usize, u64)> =
            self.pivots.iter().enumerate().filter_map(|(p, r)| r.map(|r| (p, r))).collect();
        for i in 0..rows.len() {
            let (p, r) = rows[i];
            for (j, (_, other)) in rows.iter_mut().enumerate() {
                if j != i && (*other >> p) & 1 == 1 {
                    *other ^= r;
                }
            }
        }
        let free = (0..self.n_bits).find(|&b| self.pivots[b].is_none()).expect("rank n - 1 leaves one free bit");
        let mut s = 1u64 << free;
        for (p, r) in rows {
            if (r >> free) & 1 == 1 {
                s |= 1 << p;
            }
        }
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_row_is_rejected() {
        let mut b = Gf2Basis::new(4).unwrap();
        assert_eq!(b.add_if_independent(0), Ok(false));
        assert_eq!(b.rank(), 0);
    }

    #[test]
    fn dependent_row_is_rejected_without_change() {
        let mut b = Gf2Basis::new(4).unwrap();
        assert_eq!(b.add_if_independent(2), Ok(true));
        assert_eq!(b.add_if_independent(7), Ok(true));
        let before = b.clone();
        assert_eq!(b.add_if_independent(5), Ok(false));
        assert_eq!(b, before);
        assert_eq!(b.add_if_independent(10), Ok(true));
        assert_eq!(b.rank(), 3);
        assert!(b.add_if_independent(16).is_err());
    }

    #[test]
    fn mask_from_three_equations() {
        let mut b = Gf2Basis::new(4).unwrap();
        for w in [0b0010, 0b0111, 0b1010] {
            assert!(b.add_if_independent(w).unwrap());
        }
        assert_eq!(b.nullspace_nontrivial(), Ok(5));
    }

    #[test]
    fn all_units_but_one() {
        for n in 2..=20usize {
            for missing in 0..n {
                let mut b = Gf2Basis::new(n).unwrap();
                for k in (0..n).filter(|&k| k != missing) {
                    b.add_if_independent(1 << k).unwrap();
                }
                assert_eq!(b.nullspace_nontrivial(), Ok(1 << missing));
            }
        }
    }

    #[test]
    fn rank_errors() {
        let mut b = Gf2Basis::new(4).unwrap();
        b.add_if_independent(3).unwrap();
        assert_eq!(b.nullspace_nontrivial(), Err(Error::InsufficientRank { rank: 1, needed: 3 }));
        for k in 0..4 {
            b.add_if_independent(1 << k).unwrap();
        }
        assert!(b.nullspace_nontrivial().is_err());
    }

    #[test]
    fn dot_products() {
        assert_eq!(dot(5, 15), 0);
        assert_eq!(dot(5, 13), 0);
        assert_eq!(dot(5, 1), 1);
    }
}
