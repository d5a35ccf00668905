//! Multi-indices over the spatial directions and the binomial combinatorics
//! used when expanding shifted powers like `(λ+∂)^N`.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use smallvec::SmallVec;
use std::fmt;
use std::ops::{Add, Index, Sub};

/// A tuple of non-negative integers, one entry per spatial direction (or per
/// base coordinate, for partial-derivative orders of 0-jet functions).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(pub SmallVec<[u16; 4]>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, len))
    }

    /// Unit multi-index `E_α` (0-based direction).
    pub fn unit(len: usize, alpha: usize) -> Self {
        let mut v = Self::zero(len);
        v.0[alpha] = 1;
        v
    }

    pub fn from_slice(s: &[u16]) -> Self {
        MultiIndex(SmallVec::from_slice(s))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Total order `|I| = Σ I_α`.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|&x| x as u32).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }

    /// Componentwise `J ≤ I`.
    pub fn leq(&self, other: &MultiIndex) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise difference; only defined when `other ≤ self`.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        if other.leq(self) {
            Some(MultiIndex(
                self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
            ))
        } else {
            None
        }
    }

    pub fn bump(&self, alpha: usize) -> MultiIndex {
        let mut v = self.clone();
        v.0[alpha] += 1;
        v
    }

    pub fn decrement(&self, alpha: usize) -> Option<MultiIndex> {
        if self.0[alpha] == 0 {
            return None;
        }
        let mut v = self.clone();
        v.0[alpha] -= 1;
        Some(v)
    }

    /// All multi-indices `K` with `K ≤ self` componentwise.
    pub fn sub_indices(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex(SmallVec::new())];
        for &top in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (top as usize + 1));
            for base in &out {
                for k in 0..=top {
                    let mut v = base.clone();
                    v.0.push(k);
                    next.push(v);
                }
            }
            out = next;
        }
        out
    }
}

/// Multi-index binomial coefficient: the product of componentwise binomials,
/// zero whenever any component of `b` exceeds `a`.
pub fn multi_binomial(a: &MultiIndex, b: &MultiIndex) -> BigInt {
    assert_eq!(a.len(), b.len(), "multi-index length mismatch");
    let mut acc = BigInt::one();
    for (&x, &y) in a.0.iter().zip(&b.0) {
        let c = binomial(x as u64, y as u64);
        if c.is_zero() {
            return BigInt::zero();
        }
        acc *= c;
    }
    acc
}

/// Ordinary binomial with the convention `C(a,b) = 0` for `b > a`.
pub fn binomial(a: u64, b: u64) -> BigInt {
    if b > a {
        return BigInt::zero();
    }
    let b = b.min(a - b);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for k in 0..b {
        num *= BigInt::from(a - k);
        den *= BigInt::from(k + 1);
    }
    num / den
}

impl Add for &MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: &MultiIndex) -> MultiIndex {
        assert_eq!(self.len(), rhs.len(), "multi-index length mismatch");
        MultiIndex(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &MultiIndex {
    type Output = MultiIndex;
    fn sub(self, rhs: &MultiIndex) -> MultiIndex {
        self.checked_sub(rhs).expect("multi-index subtraction underflow")
    }
}

impl Index<usize> for MultiIndex {
    type Output = u16;
    fn index(&self, idx: usize) -> &u16 {
        &self.0[idx]
    }
}

// Graded order: by |I| first, then lexicographic. Keeps printing and term
// ordering deterministic.
impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.order()
            .cmp(&other.order())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, x) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", x)?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(s: &[u16]) -> MultiIndex {
        MultiIndex::from_slice(s)
    }

    #[test]
    fn binomial_product_rule() {
        // C((2,1),(1,0)) = C(2,1)*C(1,0) = 2
        assert_eq!(multi_binomial(&mi(&[2, 1]), &mi(&[1, 0])), BigInt::from(2));
    }

    #[test]
    fn binomial_vanishes_outside_range() {
        assert_eq!(multi_binomial(&mi(&[2, 1]), &mi(&[3, 0])), BigInt::zero());
    }

    #[test]
    fn binomial_at_zero_is_one() {
        for a in [&[0u16, 0][..], &[2, 1], &[5, 3]] {
            assert_eq!(multi_binomial(&mi(a), &mi(&[0, 0])), BigInt::one());
        }
    }

    #[test]
    fn sub_indices_count() {
        // (2,1) has (2+1)*(1+1) = 6 sub-indices
        assert_eq!(mi(&[2, 1]).sub_indices().len(), 6);
    }
}
