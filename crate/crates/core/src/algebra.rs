//! Generators, monomials and admissible bases.
//!
//! A generator is either `λ_i` (`i ≥ 1`, degree `2(p-1)i - 1`) or `μ_j`
//! (`j ≥ 0`, degree `2(p-1)j`). A word is admissible when every `λ_i` is
//! followed by an index at most `pi - 1` and every `μ_i` by an index at most
//! `pi`. Admissible words form a basis of the algebra.
//!
//! Ordering of generators is by index, with `λ` before `μ` at equal index;
//! words compare lexicographically. Every basis listing in this crate uses
//! that order, so matrices built on top of it are reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LambdaError, Result};
use crate::fparith::PrimeContext;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Kind {
    Lambda,
    Mu,
}

/// A single generator, packed as `2 * index + kind`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Generator(u32);

impl Generator {
    pub fn lambda(index: u32) -> Self {
        assert!(index >= 1, "λ_0 does not exist");
        Generator(index << 1)
    }

    pub fn mu(index: u32) -> Self {
        Generator((index << 1) | 1)
    }

    pub fn new(kind: Kind, index: u32) -> Result<Self> {
        match kind {
            Kind::Lambda if index == 0 => Err(LambdaError::Domain("λ_0 does not exist".into())),
            Kind::Lambda => Ok(Self::lambda(index)),
            Kind::Mu => Ok(Self::mu(index)),
        }
    }

    #[inline]
    pub fn kind(self) -> Kind {
        if self.0 & 1 == 0 {
            Kind::Lambda
        } else {
            Kind::Mu
        }
    }

    #[inline]
    pub fn is_lambda(self) -> bool {
        self.0 & 1 == 0
    }

    #[inline]
    pub fn index(self) -> u32 {
        self.0 >> 1
    }

    #[inline]
    pub fn degree(self, ctx: PrimeContext) -> u32 {
        let base = 2 * (ctx.p() - 1) * self.index();
        if self.is_lambda() {
            base - 1
        } else {
            base
        }
    }

    /// Largest index that may follow this generator in an admissible word.
    #[inline]
    pub fn max_next_index(self, ctx: PrimeContext) -> u32 {
        let b = ctx.p() * self.index();
        if self.is_lambda() {
            b - 1
        } else {
            b
        }
    }

    #[inline]
    pub fn admits(self, next: Generator, ctx: PrimeContext) -> bool {
        next.index() <= self.max_next_index(ctx)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = if self.is_lambda() { 'l' } else { 'm' };
        write!(f, "{c}{}", self.index())
    }
}

impl FromStr for Generator {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || LambdaError::Parse(format!("bad generator token `{s}`"));
        let (kind, rest) = match s.as_bytes().first() {
            Some(b'l') => (Kind::Lambda, &s[1..]),
            Some(b'm') => (Kind::Mu, &s[1..]),
            _ => return Err(bad()),
        };
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let index: u32 = rest.parse().map_err(|_| bad())?;
        Generator::new(kind, index).map_err(|_| bad())
    }
}

/// A word in the generators. The empty word is the unit.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(pub Vec<Generator>);

impl std::borrow::Borrow<[Generator]> for Monomial {
    fn borrow(&self) -> &[Generator] {
        &self.0
    }
}

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn from_gens(gens: impl IntoIterator<Item = Generator>) -> Self {
        Monomial(gens.into_iter().collect())
    }

    pub fn gens(&self) -> &[Generator] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self, ctx: PrimeContext) -> u32 {
        self.0.iter().map(|g| g.degree(ctx)).sum()
    }

    pub fn first(&self) -> Option<Generator> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Generator> {
        self.0.last().copied()
    }

    pub fn is_admissible(&self, ctx: PrimeContext) -> bool {
        self.0.windows(2).all(|w| w[0].admits(w[1], ctx))
    }

    /// Index of the leftmost inadmissible adjacent pair.
    pub fn first_inadmissible(&self, ctx: PrimeContext) -> Option<usize> {
        self.0.windows(2).position(|w| !w[0].admits(w[1], ctx))
    }

    /// Admissible, first index at most `n`, and (for the λ ideal) ending in a λ.
    pub fn in_basis(&self, ctx: PrimeContext, n: u32, ideal: Ideal) -> bool {
        self.is_admissible(ctx)
            && self.first().is_none_or(|g| g.index() <= n)
            && (ideal == Ideal::Full || self.last().is_some_and(|g| g.is_lambda()))
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Monomial(v)
    }

    pub fn pow(g: Generator, r: usize) -> Monomial {
        Monomial(vec![g; r])
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for (i, g) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{g}")?;
        }
        Ok(())
    }
}

impl FromStr for Monomial {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self> {
        let toks: Vec<&str> = s.split_whitespace().collect();
        match toks.as_slice() {
            [] => Err(LambdaError::Parse("empty monomial".into())),
            ["1"] => Ok(Monomial::unit()),
            _ => toks.iter().map(|t| t.parse()).collect::<Result<Vec<_>>>().map(Monomial),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Ideal {
    /// All admissible words of `Λ(n)`.
    Full,
    /// Admissible words ending in a `λ`; the E¹ term `Λλ(n)`.
    LambdaIdeal,
}

impl Ideal {
    pub fn name(self) -> &'static str {
        match self {
            Ideal::Full => "full",
            Ideal::LambdaIdeal => "lambda",
        }
    }
}

impl FromStr for Ideal {
    type Err = LambdaError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(Ideal::Full),
            "lambda" | "lambda_ideal" | "lambda-ideal" => Ok(Ideal::LambdaIdeal),
            _ => Err(LambdaError::Parse(format!("unknown ideal `{s}` (expected full|lambda)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    pub ctx: PrimeContext,
    pub n: u32,
    pub m: u32,
    pub l: u32,
    pub ideal: Ideal,
}

impl BasisKey {
    pub fn new(ctx: PrimeContext, n: u32, m: u32, l: u32, ideal: Ideal) -> Result<Self> {
        if n < 1 {
            return Err(LambdaError::Domain("unstable bound n must be at least 1".into()));
        }
        Ok(BasisKey { ctx, n, m, l, ideal })
    }

    /// The same key at another bidegree.
    pub fn at(&self, m: u32, l: u32) -> BasisKey {
        BasisKey { m, l, ..*self }
    }
}

/// Admissible words of `Λ(n)_{m,l}` (or `Λλ(n)_{m,l}`), sorted.
pub fn basis(key: &BasisKey) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut word = Vec::with_capacity(key.l as usize);
    fill(key, key.n, key.m, key.l, &mut word, &mut out);
    out
}

fn fill(key: &BasisKey, bound: u32, deg_left: u32, len_left: u32, word: &mut Vec<Generator>, out: &mut Vec<Monomial>) {
    let ctx = key.ctx;
    if len_left == 0 {
        let ok_tail = key.ideal == Ideal::Full || word.last().is_some_and(|g| g.is_lambda());
        if deg_left == 0 && ok_tail {
            out.push(Monomial(word.clone()));
        }
        return;
    }
    // μ_0 forces a μ_0 tail, which never ends in λ.
    if let Some(g) = word.last() {
        if *g == Generator::mu(0) {
            if deg_left == 0 && key.ideal == Ideal::Full {
                let mut w = word.clone();
                w.extend(std::iter::repeat_n(Generator::mu(0), len_left as usize));
                out.push(Monomial(w));
            }
            return;
        }
    }
    let step = 2 * (ctx.p() - 1);
    let top = bound.min((deg_left + 1) / step);
    for index in 0..=top {
        let lam = (index >= 1).then(|| Generator::lambda(index));
        for g in lam.into_iter().chain(std::iter::once(Generator::mu(index))) {
            let d = g.degree(ctx);
            if d > deg_left || (len_left == 1 && d != deg_left) {
                continue;
            }
            if key.ideal == Ideal::LambdaIdeal && g == Generator::mu(0) {
                continue;
            }
            word.push(g);
            fill(key, g.max_next_index(ctx), deg_left - d, len_left - 1, word, out);
            word.pop();
        }
    }
}

/// Bases for every `(m, l)` with `m ≤ max_degree` and `l ≤ max_len`.
#[derive(Debug, Clone)]
pub struct BigradedTable {
    pub ctx: PrimeContext,
    pub n: u32,
    pub ideal: Ideal,
    pub max_degree: u32,
    pub max_len: u32,
    pub cells: BTreeMap<(u32, u32), Vec<Monomial>>,
}

impl BigradedTable {
    pub fn get(&self, m: u32, l: u32) -> &[Monomial] {
        self.cells.get(&(m, l)).map_or(&[], |v| v.as_slice())
    }

    pub fn total(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }
}

/// Length cap used when a sweep covers "all lengths" up to degree `max_degree`.
pub fn default_length_cap(max_degree: u32) -> u32 {
    2 * max_degree
}

/// Enumerates all cells up to `max_degree`, failing once more than
/// `monomial_budget` basis words have been produced.
pub fn enumerate_up_to(
    ctx: PrimeContext,
    n: u32,
    max_degree: u32,
    max_len: u32,
    ideal: Ideal,
    monomial_budget: u64,
) -> Result<BigradedTable> {
    let mut cells = BTreeMap::new();
    let mut count = 0u64;
    for m in 0..=max_degree {
        for l in 0..=max_len {
            let b = basis(&BasisKey::new(ctx, n, m, l, ideal)?);
            count += b.len() as u64;
            if count > monomial_budget {
                return Err(LambdaError::Budget { what: "basis enumeration", limit: monomial_budget });
            }
            if !b.is_empty() {
                cells.insert((m, l), b);
            }
        }
    }
    Ok(BigradedTable { ctx, n, ideal, max_degree, max_len, cells })
}
