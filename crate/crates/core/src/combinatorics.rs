//! Compositions of integers and the two scalar identities used for the Todd
//! class: the composition-fraction identity and the Bernoulli convolution.

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, Rational};
use crate::todd::bernoulli;

/// An ordered tuple of positive integers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Composition {
    parts: Vec<u64>,
}

impl Composition {
    pub fn new(parts: Vec<u64>) -> Result<Self> {
        if parts.is_empty() || parts.contains(&0) {
            return Err(Error::Precondition("a composition needs at least one part, all positive".into()));
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[u64] {
        &self.parts
    }

    /// The sum `l`.
    pub fn total(&self) -> u64 {
        self.parts.iter().sum()
    }

    /// The number of parts `k`.
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `R(c) = Π 1/c_i`.
    pub fn r(&self) -> Rational {
        self.parts.iter().map(|&c| Rational::new(1, c as i64)).product()
    }

    /// `RS(c) = Π_i 1/(c_1 + … + c_i)`.
    pub fn rs(&self) -> Rational {
        let mut acc = 0u64;
        let mut out = Rational::one();
        for &c in &self.parts {
            acc += c;
            out *= &Rational::new(1, acc as i64);
        }
        out
    }

    /// The `k` tuples obtained by erasing one coordinate, repeats included.
    pub fn erasures(&self) -> Vec<Vec<u64>> {
        (0..self.parts.len())
            .map(|p| {
                let mut v = self.parts.clone();
                v.remove(p);
                v
            })
            .collect()
    }
}

/// All distinct orderings of a multiset of positive integers, in
/// lexicographic order.
pub fn compositions_of_partition(parts: &[u64]) -> Result<Vec<Composition>> {
    let mut cur = parts.to_vec();
    Composition::new(cur.clone())?;
    cur.sort_unstable();
    let mut out = vec![Composition { parts: cur.clone() }];
    while next_permutation(&mut cur) {
        out.push(Composition { parts: cur.clone() });
    }
    Ok(out)
}

fn next_permutation(v: &mut [u64]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len()).rev().find(|&j| v[j] > v[i - 1]).expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// `C(l, k)`: every ordered `k`-tuple of positive integers summing to `l`.
pub fn compositions(l: u64, k: usize) -> Vec<Composition> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fill(l, k, &mut cur, &mut out);
    out
}

fn fill(rest: u64, k: usize, cur: &mut Vec<u64>, out: &mut Vec<Composition>) {
    if k == 0 {
        if rest == 0 && !cur.is_empty() {
            out.push(Composition { parts: cur.clone() });
        }
        return;
    }
    if rest < k as u64 {
        return;
    }
    for first in 1..=rest - (k as u64 - 1) {
        cur.push(first);
        fill(rest - first, k - 1, cur, out);
        cur.pop();
    }
}

/// All partitions of `l` into exactly `k` parts, each listed in
/// non-increasing order.
pub fn partitions(l: u64, k: usize) -> Vec<Vec<u64>> {
    fn go(rest: u64, k: usize, max: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if k == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        for p in (1..=max.min(rest)).rev() {
            if rest - p < (k as u64 - 1) {
                continue;
            }
            cur.push(p);
            go(rest - p, k - 1, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k > 0 {
        go(l, k, l, &mut Vec::new(), &mut out);
    }
    out
}

/// Both sides of the composition-fraction identity
/// `Σ_c RS(c) = (1/k!) Σ_c R(c)` over the orderings of `parts`.
pub fn lemma_frac_check(parts: &[u64]) -> Result<(Rational, Rational)> {
    let comps = compositions_of_partition(parts)?;
    let k = parts.len() as u64;
    let lhs: Rational = comps.iter().map(Composition::rs).sum();
    let rhs = comps.iter().map(Composition::r).sum::<Rational>() / factorial(k);
    Ok((lhs, rhs))
}

/// Both sides of `Σ_{i=1}^{n−1} C(2n,2i) B_{2i} B_{2n−2i} = −(2n+1) B_{2n}`.
pub fn bernoulli_recursion_check(n: usize) -> Result<(Rational, Rational)> {
    if n < 2 {
        return Err(Error::Precondition("the Bernoulli convolution needs n ≥ 2".into()));
    }
    let mut lhs = Rational::zero();
    for i in 1..n {
        lhs += &(binomial(2 * n as u64, 2 * i as u64) * bernoulli(2 * i) * bernoulli(2 * n - 2 * i));
    }
    let rhs = -(Rational::from_int(2 * n as i64 + 1) * bernoulli(2 * n));
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts_of(v: &[Composition]) -> Vec<Vec<u64>> {
        v.iter().map(|c| c.parts().to_vec()).collect()
    }

    #[test]
    fn distinct_orderings() {
        assert_eq!(parts_of(&compositions_of_partition(&[2, 1]).unwrap()), vec![vec![1, 2], vec![2, 1]]);
        assert_eq!(compositions_of_partition(&[2, 2]).unwrap().len(), 1);
        assert_eq!(compositions_of_partition(&[1, 2, 1]).unwrap().len(), 3);
        assert!(compositions_of_partition(&[]).is_err());
        assert!(compositions_of_partition(&[0, 1]).is_err());
    }

    #[test]
    fn frac_small_cases() {
        let (l, r) = lemma_frac_check(&[3]).unwrap();
        assert_eq!(l, Rational::new(1, 3));
        assert_eq!(r, Rational::new(1, 3));
        let (l, r) = lemma_frac_check(&[1, 2]).unwrap();
        assert_eq!(l, Rational::new(1, 2));
        assert_eq!(r, Rational::new(1, 2));
    }

    #[test]
    fn bernoulli_convolution_small() {
        let (l, r) = bernoulli_recursion_check(2).unwrap();
        assert_eq!(l, Rational::new(1, 6));
        assert_eq!(r, Rational::new(1, 6));
        assert!(bernoulli_recursion_check(1).is_err());
    }

    #[test]
    fn composition_counts() {
        for l in 1..=8u64 {
            for k in 1..=l as usize {
                assert_eq!(Rational::from_int(compositions(l, k).len() as i64), binomial(l - 1, k as u64 - 1));
            }
        }
        assert_eq!(partitions(5, 2), vec![vec![4, 1], vec![3, 2]]);
    }

    #[test]
    fn erasures_keep_repeats() {
        let c = Composition::new(vec![2, 1, 2]).unwrap();
        assert_eq!(c.erasures(), vec![vec![1, 2], vec![2, 2], vec![2, 1]]);
    }
}
