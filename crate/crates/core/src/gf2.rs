//! Dense vectors over Z2 and incremental Gaussian elimination.

use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gf2Vec {
    len: usize,
    words: Vec<u64>,
}

impl Gf2Vec {
    pub fn zeros(len: usize) -> Self {
        Gf2Vec {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        if self.get(i) != value {
            self.flip(i);
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range {}", self.len);
        self.words[i / 64] ^= 1 << (i % 64);
    }

    pub fn xor_assign(&mut self, other: &Gf2Vec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for Gf2Vec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Row-echelon basis of a subspace that remembers, for each row, which
/// inserted generators it is the sum of.
#[derive(Clone, Debug)]
pub struct Eliminator {
    generators: usize,
    rows: Vec<(usize, Gf2Vec, Gf2Vec)>,
}

impl Eliminator {
    pub fn new(generators: usize) -> Self {
        Eliminator {
            generators,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduces `v` against the basis; returns the remainder and the
    /// combination of generators that was added.
    pub fn reduce(&self, v: &Gf2Vec) -> (Gf2Vec, Gf2Vec) {
        let mut rem = v.clone();
        let mut combo = Gf2Vec::zeros(self.generators);
        for (pivot, row, rc) in &self.rows {
            if rem.get(*pivot) {
                rem.xor_assign(row);
                combo.xor_assign(rc);
            }
        }
        (rem, combo)
    }

    /// Inserts generator number `index`. Returns false when it is dependent.
    pub fn insert(&mut self, index: usize, v: &Gf2Vec) -> bool {
        let (rem, mut combo) = self.reduce(v);
        let Some(pivot) = rem.first_one() else {
            return false;
        };
        combo.flip(index);
        // keep rows fully reduced at the new pivot so `reduce` stays one pass
        for (_, row, rc) in self.rows.iter_mut() {
            if row.get(pivot) {
                row.xor_assign(&rem);
                rc.xor_assign(&combo);
            }
        }
        self.rows.push((pivot, rem, combo));
        true
    }

    /// Generator combination summing to `target`, if it lies in the span.
    pub fn solve(&self, target: &Gf2Vec) -> Option<Gf2Vec> {
        let (rem, combo) = self.reduce(target);
        rem.is_zero().then_some(combo)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_ops() {
        let mut v = Gf2Vec::zeros(130);
        v.flip(0);
        v.flip(129);
        assert_eq!(v.count_ones(), 2);
        assert_eq!(v.first_one(), Some(0));
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 129]);
        v.set(0, false);
        assert_eq!(v.first_one(), Some(129));
    }

    #[test]
    fn elimination_solves_in_span() {
        let gens = [
            Gf2Vec::from_ones(4, [0, 1]),
            Gf2Vec::from_ones(4, [1, 2]),
            Gf2Vec::from_ones(4, [0, 2]),
            Gf2Vec::from_ones(4, [2, 3]),
        ];
        let mut el = Eliminator::new(gens.len());
        let inserted: Vec<bool> = gens.iter().enumerate().map(|(i, g)| el.insert(i, g)).collect();
        assert_eq!(inserted, vec![true, true, false, true]);
        let target = Gf2Vec::from_ones(4, [0, 3]);
        let combo = el.solve(&target).unwrap();
        let mut sum = Gf2Vec::zeros(4);
        for i in combo.ones() {
            sum.xor_assign(&gens[i]);
        }
        assert_eq!(sum, target);
        assert!(el.solve(&Gf2Vec::from_ones(4, [0])).is_none());
    }
}
