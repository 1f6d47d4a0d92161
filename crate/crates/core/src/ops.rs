//! The associative algebra of Lie-symmetry operators in PBW normal form.
//!
//! Generators are the operators
//!
//! ```text
//! P^y = D_y,   D = x D_x + y D_y,   K = 2xy D_x + y^2 D_y + x,
//! ```
//!
//! with the commutation relations `[P^y, D] = P^y`, `[P^y, K] = 2D`,
//! `[D, K] = K`.  Products are straightened into the ordered monomial basis
//! `K^a (P^y)^b D^c` by the confluent rewrite system
//!
//! ```text
//! P^y K -> K P^y + 2D,    D K -> K D + K,    D P^y -> P^y D - P^y,
//! ```
//!
//! applied to adjacent out-of-order pairs.  Coefficients are exact
//! rationals throughout; the identities this module exists to check are
//! exact claims.  The distinguished central element is
//! `D^2 - D - K P^y` (the Casimir of the Levi factor), which represents the
//! time-derivative operator on solutions.

use crate::linalg::{rat_int, Rat};
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use num_traits::{One, Signed, Zero};

/// The three ordered generators, `K` before `P^y` before `D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    K,
    Py,
    D,
}

impl Gen {
    pub fn name(&self) -> &'static str {
        match self {
            Gen::K => "K",
            Gen::Py => "Py",
            Gen::D => "D",
        }
    }
}

/// An ordered monomial `K^k (P^y)^py D^d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OpMonomial {
    pub k: u32,
    pub py: u32,
    pub d: u32,
}

impl OpMonomial {
    pub const ONE: OpMonomial = OpMonomial { k: 0, py: 0, d: 0 };

    pub fn degree(&self) -> u32 {
        self.k + self.py + self.d
    }

    pub fn word(&self) -> Vec<Gen> {
        let mut w = Vec::with_capacity(self.degree() as usize);
        w.extend(core::iter::repeat(Gen::K).take(self.k as usize));
        w.extend(core::iter::repeat(Gen::Py).take(self.py as usize));
        w.extend(core::iter::repeat(Gen::D).take(self.d as usize));
        w
    }
}

impl Ord for OpMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        // graded, then lexicographic on (k, py, d)
        self.degree()
            .cmp(&other.degree())
            .then(self.k.cmp(&other.k))
            .then(self.py.cmp(&other.py))
            .then(self.d.cmp(&other.d))
    }
}

impl PartialOrd for OpMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A polynomial in the PBW basis: monomial -> exact rational coefficient,
/// zero coefficients never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OpPoly {
    terms: BTreeMap<OpMonomial, Rat>,
}

/// Position-selection strategy for the rewrite engine.  Normal forms are
/// strategy-independent (confluence); exposing the choice lets tests check
/// exactly that.
#[derive(Debug, Clone, Copy)]
pub enum Strategy {
    Leftmost,
    Rightmost,
    /// Pseudo-random position choice from a seeded xorshift stream.
    Seeded(u64),
}

fn reducible(a: Gen, b: Gen) -> bool {
    matches!((a, b), (Gen::Py, Gen::K) | (Gen::D, Gen::K) | (Gen::D, Gen::Py))
}

fn xorshift(state: &mut u64) -> u64 {
    let mut x = *state;
    x ^= x << 13;
    x ^= x >> 7;
    x ^= x << 17;
    *state = x;
    x
}

/// Straightens a formal word into the PBW basis.
pub fn normal_order_word(word: &[Gen], strategy: Strategy) -> OpPoly {
    let mut rng_state = match strategy {
        Strategy::Seeded(s) => s | 1,
        _ => 1,
    };
    let mut out = OpPoly::zero();
    let mut queue: Vec<(Vec<Gen>, Rat)> = vec![(word.to_vec(), Rat::one())];
    while let Some((w, c)) = queue.pop() {
        let positions: Vec<usize> = (0..w.len().saturating_sub(1))
            .filter(|&i| reducible(w[i], w[i + 1]))
            .collect();
        if positions.is_empty() {
            let mono = sorted_word_monomial(&w);
            out.add_term(mono, c);
            continue;
        }
        let i = match strategy {
            Strategy::Leftmost => positions[0],
            Strategy::Rightmost => *positions.last().unwrap(),
            Strategy::Seeded(_) => {
                positions[(xorshift(&mut rng_state) % positions.len() as u64) as usize]
            }
        };
        // swap the pair and push the lower-degree bracket term
        let mut swapped = w.clone();
        swapped.swap(i, i + 1);
        match (w[i], w[i + 1]) {
            // P^y K = K P^y + 2 D
            (Gen::Py, Gen::K) => {
                let mut extra = w.clone();
                extra.splice(i..i + 2, [Gen::D]);
                queue.push((swapped, c.clone()));
                queue.push((extra, c * rat_int(2)));
            }
            // D K = K D + K
            (Gen::D, Gen::K) => {
                let mut extra = w.clone();
                extra.splice(i..i + 2, [Gen::K]);
                queue.push((swapped, c.clone()));
                queue.push((extra, c));
            }
            // D P^y = P^y D - P^y
            (Gen::D, Gen::Py) => {
                let mut extra = w.clone();
                extra.splice(i..i + 2, [Gen::Py]);
                queue.push((swapped, c.clone()));
                queue.push((extra, -c));
            }
            _ => unreachable!(),
        }
    }
    out
}

fn sorted_word_monomial(w: &[Gen]) -> OpMonomial {
    debug_assert!(w.windows(2).all(|p| p[0] <= p[1]));
    let mut m = OpMonomial::ONE;
    for g in w {
        match g {
            Gen::K => m.k += 1,
            Gen::Py => m.py += 1,
            Gen::D => m.d += 1,
        }
    }
    m
}

/// Leftmost straightening with sharing: identical subwords recur heavily,
/// so products of larger monomials need the memo to stay polynomial.
fn nf_cached(word: &[Gen], cache: &mut BTreeMap<Vec<Gen>, OpPoly>) -> OpPoly {
    let Some(i) = (0..word.len().saturating_sub(1)).find(|&i| reducible(word[i], word[i + 1]))
    else {
        return OpPoly::monomial(sorted_word_monomial(word));
    };
    if let Some(hit) = cache.get(word) {
        return hit.clone();
    }
    let mut swapped = word.to_vec();
    swapped.swap(i, i + 1);
    let (extra_gen, coef) = match (word[i], word[i + 1]) {
        (Gen::Py, Gen::K) => (Gen::D, 2),
        (Gen::D, Gen::K) => (Gen::K, 1),
        (Gen::D, Gen::Py) => (Gen::Py, -1),
        _ => unreachable!(),
    };
    let mut extra = word.to_vec();
    extra.splice(i..i + 2, [extra_gen]);
    let nf = nf_cached(&swapped, cache)
        .add(&nf_cached(&extra, cache).scale(&rat_int(coef)));
    cache.insert(word.to_vec(), nf.clone());
    nf
}

impl OpPoly {
    pub fn zero() -> Self {
        OpPoly { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::scalar(Rat::one())
    }

    pub fn scalar(c: Rat) -> Self {
        let mut p = Self::zero();
        p.add_term(OpMonomial::ONE, c);
        p
    }

    pub fn gen(g: Gen) -> Self {
        let mono = match g {
            Gen::K => OpMonomial { k: 1, py: 0, d: 0 },
            Gen::Py => OpMonomial { k: 0, py: 1, d: 0 },
            Gen::D => OpMonomial { k: 0, py: 0, d: 1 },
        };
        Self::monomial(mono)
    }

    pub fn monomial(m: OpMonomial) -> Self {
        let mut p = Self::zero();
        p.add_term(m, Rat::one());
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = (&OpMonomial, &Rat)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &OpMonomial) -> Rat {
        self.terms.get(m).cloned().unwrap_or_else(Rat::zero)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    fn add_term(&mut self, m: OpMonomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, rhs: &OpPoly) -> OpPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    pub fn sub(&self, rhs: &OpPoly) -> OpPoly {
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(*m, -c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rat) -> OpPoly {
        let mut out = OpPoly::zero();
        for (m, c) in &self.terms {
            out.add_term(*m, c.clone() * s.clone());
        }
        out
    }

    pub fn neg(&self) -> OpPoly {
        self.scale(&rat_int(-1))
    }

    /// Product in PBW normal form via the rewrite system.
    pub fn mul(&self, rhs: &OpPoly) -> OpPoly {
        self.mul_with(rhs, Strategy::Leftmost)
    }

    pub fn mul_with(&self, rhs: &OpPoly, strategy: Strategy) -> OpPoly {
        let mut cache = BTreeMap::new();
        let mut out = OpPoly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                let mut word = m1.word();
                word.extend(m2.word());
                let nf = match strategy {
                    Strategy::Leftmost => nf_cached(&word, &mut cache),
                    other => normal_order_word(&word, other),
                };
                let c = c1.clone() * c2.clone();
                for (m, cc) in nf.terms {
                    out.add_term(m, cc * c.clone());
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> OpPoly {
        let mut acc = OpPoly::one();
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn commutator(&self, rhs: &OpPoly) -> OpPoly {
        self.mul(rhs).sub(&rhs.mul(self))
    }
}

/// The Casimir element `D^2 - D - K P^y` of the Levi factor; on solutions
/// it acts as the time derivative.
pub fn casimir() -> OpPoly {
    let mut p = OpPoly::zero();
    p.add_term(OpMonomial { k: 0, py: 0, d: 2 }, rat_int(1));
    p.add_term(OpMonomial { k: 0, py: 0, d: 1 }, rat_int(-1));
    p.add_term(OpMonomial { k: 1, py: 1, d: 0 }, rat_int(-1));
    p
}

#[derive(Debug, Clone, PartialEq)]
pub enum OpError {
    /// `lemma_product` needs a positive iteration count.
    BadIterationCount(usize),
    /// Too few samples for the independence matrix to have full column rank.
    TooFewSamples { samples: usize, monomials: usize },
    /// Degree out of the supported range.
    BadDegree(usize),
}

impl fmt::Display for OpError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpError::BadIterationCount(n) => write!(f, "iteration count must be >= 1, got {n}"),
            OpError::TooFewSamples { samples, monomials } => {
                write!(f, "{samples} samples cannot span {monomials} monomials")
            }
            OpError::BadDegree(d) => write!(f, "degree {d} out of supported range"),
        }
    }
}

/// Normal form of `(∏_{k=1..n} (P^y K + 2k D + k^2 + k)) P^y`, factors
/// multiplied left to right in increasing `k`.
///
/// The factors commute (each is a polynomial in the commuting pair
/// `P^y K` and `D`), and the product equals the normal form of
/// `(P^y)^{n+1} K^n`.  The middle term carries the Euler operator `D`: a
/// reading with `2k P^y` in its place fails already at `n = 1`.
pub fn lemma_product(n: usize) -> Result<OpPoly, OpError> {
    if n < 1 {
        return Err(OpError::BadIterationCount(n));
    }
    let py_k = OpPoly::gen(Gen::Py).mul(&OpPoly::gen(Gen::K));
    let mut acc = OpPoly::one();
    for k in 1..=n as i64 {
        let factor = py_k
            .add(&OpPoly::gen(Gen::D).scale(&rat_int(2 * k)))
            .add(&OpPoly::scalar(rat_int(k * k + k)));
        acc = acc.mul(&factor);
    }
    Ok(acc.mul(&OpPoly::gen(Gen::Py)))
}

/// The other side of the same identity: `(P^y)^{n+1} K^n` straightened.
pub fn power_product(n: usize) -> OpPoly {
    let mut word = Vec::new();
    word.extend(core::iter::repeat(Gen::Py).take(n + 1));
    word.extend(core::iter::repeat(Gen::K).take(n));
    nf_cached(&word, &mut BTreeMap::new())
}

// ---------------------------------------------------------------------------
// printing
// ---------------------------------------------------------------------------

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn fmt_monomial(m: &OpMonomial) -> String {
    let mut parts = Vec::new();
    for (gen, e) in [("K", m.k), ("Py", m.py), ("D", m.d)] {
        match e {
            0 => {}
            1 => parts.push(gen.to_string()),
            _ => parts.push(format!("{gen}^{e}")),
        }
    }
    parts.join("*")
}

impl fmt::Display for OpPoly {
    /// Graded-lexicographic monomial order, highest first, e.g. `K*Py + 2*D`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut terms: Vec<(&OpMonomial, &Rat)> = self.terms.iter().collect();
        terms.sort_by(|a, b| b.0.cmp(a.0));
        for (i, (m, c)) in terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -(*c).clone() } else { (*c).clone() };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mono = fmt_monomial(m);
            if mono.is_empty() {
                write!(f, "{}", fmt_rat(&mag))?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{}*{mono}", fmt_rat(&mag))?;
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at {}: {}", self.pos, self.msg)
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError { pos: self.pos, msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<OpPoly, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<OpPoly, ParseError> {
        let mut acc = self.factor()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            acc = acc.mul(&self.factor()?);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<OpPoly, ParseError> {
        let base = self.atom()?;
        if let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return self.err("expected integer exponent after `^`");
            }
            let e: u32 = core::str::from_utf8(&self.src[start..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| ParseError { pos: start, msg: "exponent overflow".to_string() })?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<OpPoly, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(self.factor()?.neg())
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_digit()
                        || matches!(self.src[self.pos], b'/' | b'.'))
                {
                    self.pos += 1;
                }
                let text = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match crate::catalog::parse_rat(text) {
                    Some(r) => Ok(OpPoly::scalar(r)),
                    None => Err(ParseError { pos: start, msg: format!("bad number `{text}`") }),
                }
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match name {
                    "Py" => Ok(OpPoly::gen(Gen::Py)),
                    "D" => Ok(OpPoly::gen(Gen::D)),
                    "K" => Ok(OpPoly::gen(Gen::K)),
                    _ => Err(ParseError {
                        pos: start,
                        msg: format!("unknown generator `{name}` (expected Py, D or K)"),
                    }),
                }
            }
            _ => self.err("expected generator, number or `(`"),
        }
    }
}

/// Parses the operator expression syntax: generators `Py`, `D`, `K`,
/// products `*`, integer powers `^`, rational scalars `p/q`.
pub fn parse_op(src: &str) -> Result<OpPoly, ParseError> {
    let mut p = Parser::new(src);
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn k_py() -> OpMonomial {
        OpMonomial { k: 1, py: 1, d: 0 }
    }

    #[test]
    fn basic_rewrites() {
        // P^y K -> K P^y + 2D
        let p = OpPoly::gen(Gen::Py).mul(&OpPoly::gen(Gen::K));
        assert_eq!(p.coeff(&k_py()), rat_int(1));
        assert_eq!(p.coeff(&OpMonomial { k: 0, py: 0, d: 1 }), rat_int(2));
        assert_eq!(p.len(), 2);
        // D P^y -> P^y D - P^y
        let q = OpPoly::gen(Gen::D).mul(&OpPoly::gen(Gen::Py));
        assert_eq!(q.coeff(&OpMonomial { k: 0, py: 1, d: 1 }), rat_int(1));
        assert_eq!(q.coeff(&OpMonomial { k: 0, py: 1, d: 0 }), rat_int(-1));
        // D K -> K D + K
        let r = OpPoly::gen(Gen::D).mul(&OpPoly::gen(Gen::K));
        assert_eq!(r.coeff(&OpMonomial { k: 1, py: 0, d: 1 }), rat_int(1));
        assert_eq!(r.coeff(&OpMonomial { k: 1, py: 0, d: 0 }), rat_int(1));
    }

    #[test]
    fn unit_element() {
        let q = OpPoly::gen(Gen::K).mul(&OpPoly::gen(Gen::Py));
        assert_eq!(OpPoly::one().mul(&q), q);
        assert_eq!(q.mul(&OpPoly::one()), q);
    }

    #[test]
    fn py_squared_k_fixture() {
        // (P^y)^2 K = K (P^y)^2 + 4 P^y D - 2 P^y, by a two-step hand rewrite
        let py = OpPoly::gen(Gen::Py);
        let lhs = py.mul(&py).mul(&OpPoly::gen(Gen::K));
        let mut expect = OpPoly::zero();
        expect.add_term(OpMonomial { k: 1, py: 2, d: 0 }, rat_int(1));
        expect.add_term(OpMonomial { k: 0, py: 1, d: 1 }, rat_int(4));
        expect.add_term(OpMonomial { k: 0, py: 1, d: 0 }, rat_int(-2));
        assert_eq!(lhs, expect);
    }

    #[test]
    fn casimir_shape_and_centrality() {
        let c = casimir();
        assert_eq!(c.len(), 3);
        assert_eq!(c.coeff(&OpMonomial { k: 0, py: 0, d: 2 }), rat_int(1));
        assert_eq!(c.coeff(&OpMonomial { k: 0, py: 0, d: 1 }), rat_int(-1));
        assert_eq!(c.coeff(&k_py()), rat_int(-1));
        for g in [Gen::Py, Gen::D, Gen::K] {
            assert!(c.commutator(&OpPoly::gen(g)).is_zero(), "casimir vs {g:?}");
        }
    }

    #[test]
    fn lemma_product_matches_power_product() {
        for n in 1..=5 {
            let lhs = lemma_product(n).unwrap();
            let rhs = power_product(n);
            assert_eq!(lhs, rhs, "n = {n}");
        }
        assert!(lemma_product(0).is_err());
    }

    #[test]
    fn wrong_reading_of_lemma_factor_fails() {
        // the same product with 2k P^y in place of 2k D differs already at n = 1
        let py_k = OpPoly::gen(Gen::Py).mul(&OpPoly::gen(Gen::K));
        let wrong = py_k
            .add(&OpPoly::gen(Gen::Py).scale(&rat_int(2)))
            .add(&OpPoly::scalar(rat_int(2)))
            .mul(&OpPoly::gen(Gen::Py));
        assert_ne!(wrong, power_product(1));
    }

    #[test]
    fn strategies_agree_on_fixed_words() {
        use Gen::*;
        let words: [&[Gen]; 4] = [
            &[D, D, K, Py, K],
            &[Py, K, Py, K, D],
            &[D, Py, K, K, Py, D],
            &[Py, Py, K, K],
        ];
        for w in words {
            let a = normal_order_word(w, Strategy::Leftmost);
            let b = normal_order_word(w, Strategy::Rightmost);
            let c = normal_order_word(w, Strategy::Seeded(0xfeed));
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
    }

    #[test]
    fn display_format() {
        let p = OpPoly::gen(Gen::Py).mul(&OpPoly::gen(Gen::K));
        assert_eq!(p.to_string(), "K*Py + 2*D");
        assert_eq!(casimir().to_string(), "-K*Py + D^2 - D");
        assert_eq!(OpPoly::zero().to_string(), "0");
        let quarter = OpPoly::scalar(crate::linalg::rat(1, 2))
            .mul(&OpPoly::gen(Gen::K))
            .pow(2);
        assert_eq!(quarter.to_string(), "1/4*K^2");
    }

    #[test]
    fn parser_round_trips() {
        let p = parse_op("Py*K").unwrap();
        assert_eq!(p.to_string(), "K*Py + 2*D");
        let c = parse_op("D^2 - D - K*Py").unwrap();
        assert_eq!(c, casimir());
        let s = parse_op("1/2*(Py*K + K*Py)").unwrap();
        assert_eq!(s, parse_op("K*Py + D").unwrap());
        assert!(parse_op("Py*").is_err());
        let e = parse_op("Qx + D").unwrap_err();
        assert_eq!(e.pos, 0);
    }
}
