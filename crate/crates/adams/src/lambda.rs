//! The Lambda algebra at the prime 2.
//!
//! Generators `l_i` (`i >= 0`) sit in bidegree `(s, t) = (1, i + 1)`. A word
//! `l_{i_1} ... l_{i_s}` is admissible when `2*i_k >= i_{k+1}` for every
//! adjacent pair; the admissible words form a basis. An inadmissible adjacent
//! pair `l_i l_j` (that is, `j >= 2i + 1`) rewrites, with `n = j - 2i - 1`, as
//!
//! ```text
//! l_i l_j  =  sum_{k >= 0}  C(n-1-k, k)  l_{i+n-k} l_{2i+1+k}     (mod 2)
//! ```
//!
//! where `C(a, b) = 0` whenever `a < 0`, `b < 0`, or `b > a`. The differential
//! on generators is
//!
//! ```text
//! d(l_n)  =  sum_{j >= 1}  C(n-j, j)  l_{n-j} l_{j-1}             (mod 2)
//! ```
//!
//! extended to words by the Leibniz rule. Both conventions are pinned by the
//! `d∘d = 0` suite and by agreement with the independent homology oracles.
//!
//! Rewriting replaces the leftmost inadmissible pair and repeats. Every
//! replacement strictly increases the first index of the pair while the word
//! length and the degree stay fixed, so the process terminates; a step budget
//! guards against convention bugs all the same.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LambdaError {
    #[error("rewriting exceeded the step budget of {0} pair rewrites")]
    BudgetExceeded(u64),
    #[error("cannot parse lambda word {0:?}")]
    Parse(String),
    #[error("bidegree mismatch: {0:?} vs {1:?}")]
    BidegreeMismatch(Bidegree, Bidegree),
}

/// Default budget of pair rewrites per normalization call.
pub const DEFAULT_REWRITE_BUDGET: u64 = 10_000_000;

/// `C(a, b) mod 2`; zero when `a < 0`, `b < 0`, or `b > a`.
pub fn binomial_mod2(a: i64, b: i64) -> bool {
    if a < 0 || b < 0 || b > a {
        return false;
    }
    ((a - b) as u64) & (b as u64) == 0
}

/// Adams filtration `s` and internal degree `t`; the stem is `t - s`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Bidegree {
    pub s: u32,
    pub t: u32,
}

impl Bidegree {
    pub fn new(s: u32, t: u32) -> Self {
        Bidegree { s, t }
    }

    pub fn stem(&self) -> u32 {
        self.t - self.s
    }
}

/// A word in the generators `l_i`, not necessarily admissible.
///
/// Ordering is lexicographic on the index sequence; the leading term of a sum
/// is its lexicographically least word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    indices: Vec<u16>,
}

impl Monomial {
    pub fn new(indices: Vec<u16>) -> Self {
        Monomial { indices }
    }

    pub fn unit() -> Self {
        Monomial {
            indices: Vec::new(),
        }
    }

    pub fn indices(&self) -> &[u16] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn bidegree(&self) -> Bidegree {
        Bidegree {
            s: self.indices.len() as u32,
            t: self.indices.iter().map(|&i| i as u32 + 1).sum(),
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.indices
            .windows(2)
            .all(|w| 2 * w[0] as u32 >= w[1] as u32)
    }

    /// Concatenation `self * other` as a word (no normalization).
    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        Monomial { indices }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.indices.is_empty() {
            return write!(f, "1");
        }
        let words: Vec<String> = self.indices.iter().map(|i| format!("l{i}")).collect();
        write!(f, "{}", words.join(" "))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Monomial {
    type Err = LambdaError;

    /// Parses the rendering produced by `Display`: `"l4 l7 l11"`, or `"1"` for
    /// the unit.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::unit());
        }
        let mut indices = Vec::new();
        for tok in s.split_whitespace() {
            let rest = tok
                .strip_prefix('l')
                .ok_or_else(|| LambdaError::Parse(s.to_string()))?;
            let i: u16 = rest.parse().map_err(|_| LambdaError::Parse(s.to_string()))?;
            indices.push(i);
        }
        Ok(Monomial { indices })
    }
}

/// An F2 sum of admissible monomials sharing one bidegree.
#[derive(Clone, PartialEq, Eq)]
pub struct Element {
    bidegree: Bidegree,
    terms: BTreeSet<Monomial>,
}

impl Element {
    pub fn zero(bidegree: Bidegree) -> Self {
        Element {
            bidegree,
            terms: BTreeSet::new(),
        }
    }

    /// Wraps an admissible monomial as a one-term element.
    pub fn from_monomial(m: Monomial) -> Self {
        debug_assert!(m.is_admissible());
        let bidegree = m.bidegree();
        let mut terms = BTreeSet::new();
        terms.insert(m);
        Element { bidegree, terms }
    }

    pub fn from_terms(bidegree: Bidegree, terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut e = Element::zero(bidegree);
        for t in terms {
            debug_assert_eq!(t.bidegree(), bidegree);
            e.toggle(t);
        }
        e
    }

    pub fn bidegree(&self) -> Bidegree {
        self.bidegree
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Lexicographically least term; the Curtis-style tag of the element.
    pub fn leading_term(&self) -> Option<&Monomial> {
        self.terms.first()
    }

    fn toggle(&mut self, m: Monomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    pub fn add_assign(&mut self, other: &Element) -> Result<(), LambdaError> {
        if !other.is_zero() && !self.is_zero() && self.bidegree != other.bidegree {
            return Err(LambdaError::BidegreeMismatch(self.bidegree, other.bidegree));
        }
        for t in &other.terms {
            self.toggle(t.clone());
        }
        Ok(())
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let words: Vec<String> = self.terms.iter().map(|m| m.to_string()).collect();
        write!(f, "{}", words.join(" + "))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Position of the leftmost inadmissible adjacent pair, if any.
fn first_inadmissible(indices: &[u16]) -> Option<usize> {
    indices
        .windows(2)
        .position(|w| 2 * (w[0] as u32) < w[1] as u32)
}

/// Rewrites `m` to its admissible normal form.
pub fn rewrite(m: &Monomial) -> Result<Element, LambdaError> {
    rewrite_with_budget(m, DEFAULT_REWRITE_BUDGET)
}

pub fn rewrite_with_budget(m: &Monomial, budget: u64) -> Result<Element, LambdaError> {
    let bidegree = m.bidegree();
    let mut acc = Element::zero(bidegree);
    let mut work = vec![m.indices.clone()];
    let mut steps: u64 = 0;
    while let Some(word) = work.pop() {
        match first_inadmissible(&word) {
            None => acc.toggle(Monomial::new(word)),
            Some(p) => {
                steps += 1;
                if steps > budget {
                    return Err(LambdaError::BudgetExceeded(budget));
                }
                let i = word[p] as i64;
                let j = word[p + 1] as i64;
                let n = j - 2 * i - 1;
                debug_assert!(n >= 0);
                for k in 0..=((n - 1) / 2).max(0) {
                    if binomial_mod2(n - 1 - k, k) {
                        let mut next = word.clone();
                        next[p] = (i + n - k) as u16;
                        next[p + 1] = (2 * i + 1 + k) as u16;
                        work.push(next);
                    }
                }
            }
        }
    }
    Ok(acc)
}

/// Product of two elements, in admissible normal form.
pub fn product(a: &Element, b: &Element) -> Result<Element, LambdaError> {
    let bidegree = Bidegree {
        s: a.bidegree.s + b.bidegree.s,
        t: a.bidegree.t + b.bidegree.t,
    };
    let mut acc = Element::zero(bidegree);
    for ma in &a.terms {
        for mb in &b.terms {
            let normalized = rewrite(&ma.concat(mb))?;
            acc.add_assign(&normalized)?;
        }
    }
    Ok(acc)
}

/// Differential of a single generator `l_n` as a sum of (admissible) pairs.
fn d_generator(n: u16) -> Vec<(u16, u16)> {
    let n = n as i64;
    let mut out = Vec::new();
    for j in 1..=n {
        if binomial_mod2(n - j, j) {
            out.push(((n - j) as u16, (j - 1) as u16));
        }
    }
    out
}

/// Differential of a monomial via the Leibniz rule, normalized.
pub fn differential_monomial(m: &Monomial) -> Result<Element, LambdaError> {
    let b = m.bidegree();
    let mut acc = Element::zero(Bidegree { s: b.s + 1, t: b.t });
    for p in 0..m.indices.len() {
        for (x, y) in d_generator(m.indices[p]) {
            let mut word = Vec::with_capacity(m.indices.len() + 1);
            word.extend_from_slice(&m.indices[..p]);
            word.push(x);
            word.push(y);
            word.extend_from_slice(&m.indices[p + 1..]);
            let normalized = rewrite(&Monomial::new(word))?;
            acc.add_assign(&normalized)?;
        }
    }
    Ok(acc)
}

/// Differential of an element; raises `s` by one and preserves `t`.
pub fn differential(e: &Element) -> Result<Element, LambdaError> {
    let b = e.bidegree;
    let mut acc = Element::zero(Bidegree { s: b.s + 1, t: b.t });
    for m in &e.terms {
        acc.add_assign(&differential_monomial(m)?)?;
    }
    Ok(acc)
}

/// All admissible monomials of bidegree `(s, t)` in lexicographic order.
pub fn admissible_basis(bidegree: Bidegree) -> Vec<Monomial> {
    let Bidegree { s, t } = bidegree;
    if s == 0 {
        return if t == 0 { vec![Monomial::unit()] } else { vec![] };
    }
    if t < s {
        return Vec::new();
    }
    let mut out = Vec::new();
    let mut prefix: Vec<u16> = Vec::with_capacity(s as usize);
    // cap = no constraint for the first letter; 2 * previous afterwards.
    fn go(out: &mut Vec<Monomial>, prefix: &mut Vec<u16>, cap: u32, s_rem: u32, t_rem: u32) {
        if s_rem == 0 {
            if t_rem == 0 {
                out.push(Monomial::new(prefix.clone()));
            }
            return;
        }
        if t_rem < s_rem {
            return;
        }
        // Largest index this letter can take: it consumes i + 1 of t_rem and
        // each later letter consumes at least 1.
        let hi = (t_rem - s_rem).min(cap);
        for i in 0..=hi {
            // Later letters are bounded by the doubling cap, so the most the
            // tail can consume is sum_{k=1..s_rem-1} (i * 2^k + 1).
            let tail_rem = t_rem - i - 1;
            let tail_letters = s_rem - 1;
            if tail_letters > 0 {
                let max_tail: u64 = if i == 0 {
                    tail_letters as u64
                } else {
                    let pow = 1u64.checked_shl(tail_letters).unwrap_or(u64::MAX);
                    ((i as u64) * 2 * (pow - 1)).saturating_add(tail_letters as u64)
                };
                let min_tail = tail_letters as u64;
                if (tail_rem as u64) < min_tail || (tail_rem as u64) > max_tail {
                    continue;
                }
            } else if tail_rem != 0 {
                continue;
            }
            prefix.push(i as u16);
            go(out, prefix, 2 * i, s_rem - 1, tail_rem);
            prefix.pop();
        }
    }
    go(&mut out, &mut prefix, u32::MAX, s, t);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(indices: &[u16]) -> Monomial {
        Monomial::new(indices.to_vec())
    }

    #[test]
    fn bidegrees() {
        assert_eq!(
            mono(&[4, 7, 11, 15, 15]).bidegree(),
            Bidegree::new(5, 57)
        );
        assert_eq!(mono(&[4, 7, 11, 15, 15]).bidegree().stem(), 52);
        assert_eq!(
            mono(&[2, 4, 7, 11, 15, 15]).bidegree(),
            Bidegree::new(6, 60)
        );
        assert_eq!(mono(&[2, 4, 7, 11, 15, 15]).bidegree().stem(), 54);
        assert_eq!(Monomial::unit().bidegree(), Bidegree::new(0, 0));
    }

    #[test]
    fn admissibility() {
        assert!(mono(&[4, 7, 11, 15, 15]).is_admissible());
        assert!(!mono(&[1, 4]).is_admissible());
        // 2*2 >= 4 is the boundary case.
        assert!(mono(&[2, 4, 7, 11, 15, 15]).is_admissible());
    }

    #[test]
    fn basis_small() {
        assert_eq!(admissible_basis(Bidegree::new(1, 2)), vec![mono(&[1])]);
        assert_eq!(admissible_basis(Bidegree::new(2, 3)), vec![mono(&[1, 0])]);
        assert_eq!(admissible_basis(Bidegree::new(1, 1)), vec![mono(&[0])]);
        assert_eq!(admissible_basis(Bidegree::new(0, 0)), vec![Monomial::unit()]);
        assert!(admissible_basis(Bidegree::new(0, 3)).is_empty());
    }

    #[test]
    fn basis_is_admissible_and_sorted() {
        for t in 0..=14 {
            for s in 0..=t {
                let basis = admissible_basis(Bidegree::new(s, t));
                for m in &basis {
                    assert!(m.is_admissible());
                    assert_eq!(m.bidegree(), Bidegree::new(s, t));
                }
                let mut sorted = basis.clone();
                sorted.sort();
                assert_eq!(basis, sorted);
            }
        }
    }

    #[test]
    fn rewrite_examples() {
        // Already admissible.
        let e = rewrite(&mono(&[4, 7])).unwrap();
        assert_eq!(e, Element::from_monomial(mono(&[4, 7])));
        // One relation step.
        let e = rewrite(&mono(&[1, 4])).unwrap();
        assert_eq!(e, Element::from_monomial(mono(&[2, 3])));
        // n = 0 has no surviving terms.
        let e = rewrite(&mono(&[0, 1])).unwrap();
        assert!(e.is_zero());
    }

    #[test]
    fn rewrite_idempotent_and_degree_preserving() {
        for word in [vec![0, 3], vec![1, 5, 2], vec![2, 7, 3], vec![0, 2, 4]] {
            let m = Monomial::new(word);
            let b = m.bidegree();
            let e = rewrite(&m).unwrap();
            for t in e.terms() {
                assert!(t.is_admissible());
                assert_eq!(t.bidegree(), b);
                assert_eq!(rewrite(t).unwrap(), Element::from_monomial(t.clone()));
            }
        }
    }

    #[test]
    fn products() {
        let unit = Element::from_monomial(Monomial::unit());
        let a = Element::from_monomial(mono(&[3, 1]));
        assert_eq!(product(&unit, &a).unwrap(), a);
        let l1 = Element::from_monomial(mono(&[1]));
        let l0 = Element::from_monomial(mono(&[0]));
        assert_eq!(
            product(&l1, &l0).unwrap(),
            Element::from_monomial(mono(&[1, 0]))
        );
        assert!(product(&l0, &l1).unwrap().is_zero());
    }

    #[test]
    fn differential_examples() {
        let d = |w: &[u16]| differential_monomial(&mono(w)).unwrap();
        assert_eq!(d(&[2]), Element::from_monomial(mono(&[1, 0])));
        assert!(d(&[0]).is_zero());
        assert!(d(&[1]).is_zero());
        let d4 = d(&[4]);
        assert_eq!(
            d4,
            Element::from_terms(Bidegree::new(2, 5), [mono(&[3, 0]), mono(&[2, 1])])
        );
    }

    #[test]
    fn d_squared_zero_small() {
        for t in 0..=16u32 {
            for s in 0..=t {
                for m in admissible_basis(Bidegree::new(s, t)) {
                    let dd = differential(&differential_monomial(&m).unwrap()).unwrap();
                    assert!(dd.is_zero(), "d(d({m})) = {dd} is nonzero");
                }
            }
        }
    }

    #[test]
    fn parse_roundtrip() {
        let m: Monomial = "l4 l7 l11 l15 l15".parse().unwrap();
        assert_eq!(m, mono(&[4, 7, 11, 15, 15]));
        assert_eq!(m.to_string(), "l4 l7 l11 l15 l15");
        let unit: Monomial = "1".parse().unwrap();
        assert_eq!(unit, Monomial::unit());
        assert!("x4".parse::<Monomial>().is_err());
    }

    #[test]
    fn budget_error_reported() {
        // Any inadmissible word needs at least one step.
        let err = rewrite_with_budget(&mono(&[0, 5]), 0).unwrap_err();
        assert_eq!(err, LambdaError::BudgetExceeded(0));
    }

    fn random_admissible(rng: &mut impl rand::Rng, max_len: usize, max_t: u32) -> Monomial {
        loop {
            let len = rng.gen_range(0..=max_len);
            let mut indices = Vec::with_capacity(len);
            let mut cap = 9u32;
            for _ in 0..len {
                let i = rng.gen_range(0..=cap.min(9));
                indices.push(i as u16);
                cap = 2 * i;
            }
            let m = Monomial::new(indices);
            if m.bidegree().t <= max_t {
                return m;
            }
        }
    }

    #[test]
    fn leibniz_and_associativity_random() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..200 {
            let a = Element::from_monomial(random_admissible(&mut rng, 3, 12));
            let b = Element::from_monomial(random_admissible(&mut rng, 3, 12));
            if a.bidegree().t + b.bidegree().t > 25 {
                continue;
            }
            // d(ab) = d(a) b + a d(b)
            let lhs = differential(&product(&a, &b).unwrap()).unwrap();
            let mut rhs = product(&differential(&a).unwrap(), &b).unwrap();
            rhs.add_assign(&product(&a, &differential(&b).unwrap()).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs, "Leibniz failed for {a} and {b}");

            let c = Element::from_monomial(random_admissible(&mut rng, 2, 8));
            if a.bidegree().t + b.bidegree().t + c.bidegree().t > 25 {
                continue;
            }
            let left = product(&product(&a, &b).unwrap(), &c).unwrap();
            let right = product(&a, &product(&b, &c).unwrap()).unwrap();
            assert_eq!(left, right, "associativity failed for {a}, {b}, {c}");
        }
    }
}
