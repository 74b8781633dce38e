//! Free Lie algebras in the tensor algebra, with the Lyndon basis.
//!
//! A Lyndon word `w` of length > 1 has the standard factorization `w = u v`
//! with `v` its longest proper Lyndon suffix; its bracketing is
//! `P(w) = [P(u), P(v)]`. `P(w)` equals `w` plus words lexicographically
//! larger than `w`, which makes decomposition into the basis triangular.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::Q;

pub type Word = Vec<u8>;

/// Noncommutative polynomial: word -> coefficient, zero coefficients dropped.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TensorPoly(BTreeMap<Word, Q>);

impl TensorPoly {
    pub fn zero() -> Self {
        TensorPoly(BTreeMap::new())
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, Q::from_integer(1.into()))
    }

    pub fn term(w: Word, c: Q) -> Self {
        let mut p = Self::zero();
        p.add_term(w, c);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Q)> {
        self.0.iter()
    }

    pub fn add_term(&mut self, w: Word, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(w) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &TensorPoly, c: &Q) {
        for (w, x) in &other.0 {
            self.add_term(w.clone(), x * c);
        }
    }

    pub fn add(&self, other: &TensorPoly) -> TensorPoly {
        let mut out = self.clone();
        out.add_scaled(other, &Q::from_integer(1.into()));
        out
    }

    pub fn scale(&self, c: &Q) -> TensorPoly {
        let mut out = TensorPoly::zero();
        out.add_scaled(self, c);
        out
    }

    /// Concatenation product, dropping words longer than `max_len`.
    pub fn mul_truncated(&self, other: &TensorPoly, max_len: usize) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for (a, x) in &self.0 {
            for (b, y) in &other.0 {
                if a.len() + b.len() > max_len {
                    continue;
                }
                let mut w = a.clone();
                w.extend_from_slice(b);
                out.add_term(w, x * y);
            }
        }
        out
    }

    pub fn bracket(&self, other: &TensorPoly, max_len: usize) -> TensorPoly {
        let ab = self.mul_truncated(other, max_len);
        let ba = other.mul_truncated(self, max_len);
        ab.add(&ba.scale(&Q::from_integer((-1).into())))
    }

    pub fn max_degree(&self) -> usize {
        self.0.keys().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> Option<usize> {
        self.0.keys().map(Vec::len).min()
    }
}

pub fn is_lyndon(w: &[u8]) -> bool {
    !w.is_empty() && (1..w.len()).all(|i| w < &w[i..])
}

/// `w = u v` with `v` the longest proper Lyndon suffix.
pub fn standard_factorization(w: &[u8]) -> Option<(Word, Word)> {
    if w.len() < 2 {
        return None;
    }
    (1..w.len()).find(|&i| is_lyndon(&w[i..])).map(|i| (w[..i].to_vec(), w[i..].to_vec()))
}

/// All Lyndon words over `g` letters of length `1..=max_len`, ordered by
/// length and then lexicographically (Duval's generation algorithm).
pub fn lyndon_words(g: usize, max_len: usize) -> Vec<Word> {
    assert!(g <= 256, "alphabet too large");
    let mut out = Vec::new();
    if g == 0 || max_len == 0 {
        return out;
    }
    let top = (g - 1) as u8;
    let mut w: Word = vec![0];
    loop {
        out.push(w.clone());
        // extend periodically to max_len, then strip trailing maximal letters
        let n = w.len();
        while w.len() < max_len {
            w.push(w[w.len() - n]);
        }
        while w.last() == Some(&top) {
            w.pop();
        }
        match w.last_mut() {
            None => break,
            Some(c) => *c += 1,
        }
    }
    out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    out
}

fn mobius(mut n: u64) -> i64 {
    let mut result = 1;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            n /= d;
            if n.is_multiple_of(d) {
                return 0;
            }
            result = -result;
        }
        d += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Dimension of the degree-`n` part of the free Lie algebra on `g`
/// generators: `(1/n) sum_{d | n} mu(d) g^{n/d}`.
pub fn witt_dimension(g: u64, n: u32) -> u64 {
    assert!(n >= 1);
    let mut total: i128 = 0;
    for d in 1..=n {
        if n.is_multiple_of(d) {
            total += mobius(d as u64) as i128 * (g as i128).pow(n / d);
        }
    }
    (total / n as i128) as u64
}

/// The free Lie algebra on `g` generators truncated above degree `level`,
/// with its Lyndon basis (ordered by degree, then lexicographically).
#[derive(Clone, Debug)]
pub struct FreeLie {
    g: usize,
    level: usize,
    words: Vec<Word>,
    index: HashMap<Word, usize>,
    polys: Vec<TensorPoly>,
}

impl FreeLie {
    pub fn new(g: usize, level: usize) -> Self {
        let words = lyndon_words(g, level);
        let index = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
        let mut polys: Vec<TensorPoly> = Vec::with_capacity(words.len());
        let mut lie = FreeLie { g, level, words, index, polys: Vec::new() };
        for w in &lie.words {
            let p = match standard_factorization(w) {
                None => TensorPoly::word(w.clone()),
                Some((u, v)) => polys[lie.index[&u]].bracket(&polys[lie.index[&v]], level),
            };
            polys.push(p);
        }
        lie.polys = polys;
        lie
    }

    pub fn generators(&self) -> usize {
        self.g
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn dim(&self) -> usize {
        self.words.len()
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn degree(&self, i: usize) -> usize {
        self.words[i].len()
    }

    pub fn graded_dims(&self) -> Vec<usize> {
        (1..=self.level).map(|d| self.words.iter().filter(|w| w.len() == d).count()).collect()
    }

    pub fn poly(&self, i: usize) -> &TensorPoly {
        &self.polys[i]
    }

    /// Bracketed form of basis element `i`, with generator names `names`.
    pub fn label(&self, i: usize, names: &[String]) -> String {
        fn go(w: &[u8], names: &[String]) -> String {
            match standard_factorization(w) {
                None => names[w[0] as usize].clone(),
                Some((u, v)) => format!("[{},{}]", go(&u, names), go(&v, names)),
            }
        }
        go(&self.words[i], names)
    }

    /// Coordinates of a Lie polynomial in the Lyndon basis; words longer
    /// than `level` are ignored. Fails if the polynomial is not Lie.
    pub fn decompose(&self, p: &TensorPoly) -> Result<Vec<Q>> {
        let mut rest = TensorPoly(p.0.iter().filter(|(w, _)| w.len() <= self.level).map(|(w, c)| (w.clone(), c.clone())).collect());
        let mut coords = vec![Q::zero(); self.dim()];
        // BTreeMap order is lexicographic; within a degree the smallest word
        // of the remainder is the leading term of some P(w).
        while let Some(d) = rest.min_degree() {
            let (w, c) = rest.0.iter().find(|(w, _)| w.len() == d).map(|(w, c)| (w.clone(), c.clone())).unwrap();
            let Some(&i) = self.index.get(&w) else {
                return Err(Error::InvalidInput(format!("not a Lie polynomial: leading word {w:?} is not Lyndon")));
            };
            coords[i] += &c;
            rest.add_scaled(&self.polys[i], &-c);
        }
        Ok(coords)
    }

    pub fn to_poly(&self, coords: &[Q]) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for (i, c) in coords.iter().enumerate() {
            if !c.is_zero() {
                out.add_scaled(&self.polys[i], c);
            }
        }
        out
    }

    /// Structure constants `[e_i, e_j]` (empty beyond the top degree).
    pub fn bracket(&self, i: usize, j: usize) -> Vec<Q> {
        if self.degree(i) + self.degree(j) > self.level {
            return vec![Q::zero(); self.dim()];
        }
        let p = self.polys[i].bracket(&self.polys[j], self.level);
        self.decompose(&p).expect("brackets of Lie polynomials are Lie")
    }

    /// Extend `x_k -> images[k]` to an algebra endomorphism and apply it.
    pub fn apply_hom(&self, images: &[TensorPoly], p: &TensorPoly) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for (w, c) in p.terms() {
            let mut acc = TensorPoly::term(Vec::new(), c.clone());
            for &x in w {
                acc = acc.mul_truncated(&images[x as usize], self.level);
                if acc.is_zero() {
                    break;
                }
            }
            out.add_scaled(&acc, &Q::from_integer(1.into()));
        }
        out
    }

    /// Extend `x_k -> images[k]` to a derivation and apply it.
    pub fn apply_derivation(&self, images: &[TensorPoly], p: &TensorPoly) -> TensorPoly {
        let mut out = TensorPoly::zero();
        for (w, c) in p.terms() {
            for k in 0..w.len() {
                let left = TensorPoly::term(w[..k].to_vec(), c.clone());
                let right = TensorPoly::word(w[k + 1..].to_vec());
                let t = left.mul_truncated(&images[w[k] as usize], self.level).mul_truncated(&right, self.level);
                out.add_scaled(&t, &Q::from_integer(1.into()));
            }
        }
        out
    }
}
