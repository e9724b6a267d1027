//! Straightening words into the admissible basis.
//!
//! Every inadmissible adjacent pair `ν_a ν_b` is the left-hand side of
//! exactly one of the four relation families, whose right-hand sides are
//! built here from `a(k, j)`, `b(k, j)`, `N(k)` and `N'(k)`. Each emitted
//! pair is itself admissible and has a strictly larger first generator in the
//! `(index, λ < μ)` order, which is what makes the rewriting terminate.
//!
//! Normalization works by left multiplication: `g · w` for an admissible `w`
//! only needs the pair `(g, w_1)` straightened, after which each right-hand
//! pair `h_1 h_2` is pushed into `w` recursively as `h_1 · (h_2 · w_2…)`.
//! Results of `g · w` are memoized on the [`Lambda`] context.

use std::cell::Cell;
use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use foldhash::fast::RandomState as FastHasher;
use serde::{Deserialize, Serialize};

use crate::algebra::{Generator, Ideal, Monomial};
use crate::error::{LambdaError, Result};
use crate::fparith::{Fp, PrimeContext};

/// Default cap on intermediate terms produced by one normalization.
pub const DEFAULT_TERM_BUDGET: u64 = 10_000_000;

/// A finite F_p-combination of admissible monomials, sorted by monomial with
/// no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Element {
    ctx: PrimeContext,
    terms: Vec<(Monomial, Fp)>,
}

impl Element {
    pub fn zero(ctx: PrimeContext) -> Self {
        Element { ctx, terms: Vec::new() }
    }

    pub fn unit(ctx: PrimeContext) -> Self {
        Self::monomial(ctx, Monomial::unit())
    }

    /// A single admissible monomial with coefficient one.
    pub fn monomial(ctx: PrimeContext, m: Monomial) -> Self {
        debug_assert!(m.is_admissible(ctx));
        Element { ctx, terms: vec![(m, Fp::ONE)] }
    }

    /// Builds an element from admissible terms, combining duplicates.
    pub fn from_terms(ctx: PrimeContext, terms: impl IntoIterator<Item = (Monomial, Fp)>) -> Self {
        let mut acc = Accumulator::new(ctx);
        for (m, c) in terms {
            debug_assert!(m.is_admissible(ctx));
            acc.add(m, c);
        }
        acc.finish()
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn terms(&self) -> &[(Monomial, Fp)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Fp {
        self.terms
            .binary_search_by(|(t, _)| t.cmp(m))
            .map_or(Fp::ZERO, |i| self.terms[i].1)
    }

    pub fn add(&self, other: &Element) -> Result<Element> {
        self.check_same(other)?;
        Ok(Self::from_terms(self.ctx, self.terms.iter().chain(&other.terms).cloned()))
    }

    pub fn sub(&self, other: &Element) -> Result<Element> {
        self.add(&other.scale(self.ctx.neg(Fp::ONE)))
    }

    pub fn scale(&self, c: Fp) -> Element {
        if c.is_zero() {
            return Element::zero(self.ctx);
        }
        let ctx = self.ctx;
        Element { ctx, terms: self.terms.iter().map(|(m, a)| (m.clone(), ctx.mul(*a, c))).collect() }
    }

    /// `(degree, length)` when every term shares it.
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.iter().map(|(m, _)| (m.degree(self.ctx), m.len() as u32));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    pub fn in_subalgebra(&self, n: u32, ideal: Ideal) -> bool {
        self.terms.iter().all(|(m, _)| m.in_basis(self.ctx, n, ideal))
    }

    fn check_same(&self, other: &Element) -> Result<()> {
        if self.ctx != other.ctx {
            return Err(LambdaError::MixedPrime(self.ctx.p(), other.ctx.p()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> ElementJson {
        ElementJson {
            p: self.ctx.p(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| TermJson { coeff: c.value(), word: m.gens().iter().map(|g| g.to_string()).collect() })
                .collect(),
        }
    }

    /// Reads the JSON form. Words need not be admissible; they are
    /// normalized through `lambda`.
    pub fn from_json(lambda: &Lambda, json: &ElementJson) -> Result<Element> {
        if json.p != lambda.ctx().p() {
            return Err(LambdaError::MixedPrime(json.p, lambda.ctx().p()));
        }
        let mut acc = Element::zero(lambda.ctx());
        for t in &json.terms {
            let word = t.word.iter().map(|s| s.parse()).collect::<Result<Vec<Generator>>>()?;
            let c = lambda.ctx().reduce(t.coeff as i64);
            acc = acc.add(&lambda.normalize(&word, c)?)?;
        }
        Ok(acc)
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Text form: `- m1 l1 + 2 l1 l1`; coefficients use the symmetric
/// representative and a unit coefficient is omitted. Zero prints as `0`.
impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            let s = self.ctx.symmetric(*c);
            match (i, s < 0) {
                (0, false) => {}
                (0, true) => write!(f, "- ")?,
                (_, false) => write!(f, " + ")?,
                (_, true) => write!(f, " - ")?,
            }
            if s.abs() != 1 {
                write!(f, "{} ", s.abs())?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub coeff: u32,
    pub word: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementJson {
    pub p: u32,
    pub terms: Vec<TermJson>,
}

/// One parsed term of the text grammar: coefficient and (possibly
/// inadmissible) word.
pub type RawTerm = (i64, Vec<Generator>);

/// Parses `[c] tok … [+ [c] tok …]`. A lone integer is that multiple of the
/// unit, and `1` stands for the unit word.
pub fn parse_expression(s: &str) -> Result<Vec<RawTerm>> {
    let toks: Vec<&str> = s.split_whitespace().collect();
    if toks.is_empty() {
        return Err(LambdaError::Parse("empty expression".into()));
    }
    if toks == ["0"] {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    let mut sign = 1i64;
    let mut cur: Vec<&str> = Vec::new();
    let mut flush = |sign: i64, cur: &mut Vec<&str>| -> Result<()> {
        if cur.is_empty() {
            return Err(LambdaError::Parse(format!("missing term in `{s}`")));
        }
        let (coeff, rest) = match cur[0].parse::<i64>() {
            Ok(c) if cur.len() > 1 => (c, &cur[1..]),
            Ok(c) if cur.len() == 1 => (c, &cur[..0]),
            _ => (1, &cur[..]),
        };
        let word = if rest == ["1"] {
            Vec::new()
        } else {
            rest.iter().map(|t| t.parse()).collect::<Result<Vec<Generator>>>()?
        };
        out.push((sign * coeff, word));
        cur.clear();
        Ok(())
    };
    for (i, t) in toks.iter().enumerate() {
        match *t {
            "+" | "-" => {
                let s_here = if *t == "-" { -1 } else { 1 };
                if i == 0 {
                    sign = s_here;
                    continue;
                }
                flush(sign, &mut cur)?;
                sign = s_here;
            }
            _ => cur.push(t),
        }
    }
    flush(sign, &mut cur)?;
    Ok(out)
}

/// Collects terms and merges equal monomials when finished; sorting is
/// cheaper than hashing long words.
pub(crate) struct Accumulator {
    ctx: PrimeContext,
    terms: Vec<(Monomial, Fp)>,
}

impl Accumulator {
    pub(crate) fn new(ctx: PrimeContext) -> Self {
        Accumulator { ctx, terms: Vec::new() }
    }

    pub(crate) fn add(&mut self, m: Monomial, c: Fp) {
        if !c.is_zero() {
            self.terms.push((m, c));
        }
    }

    pub(crate) fn finish(mut self) -> Element {
        let ctx = self.ctx;
        self.terms.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut terms: Vec<(Monomial, Fp)> = Vec::with_capacity(self.terms.len());
        for (m, c) in self.terms {
            match terms.last_mut() {
                Some(last) if last.0 == m => last.1 = ctx.add(last.1, c),
                _ => {
                    if terms.last().is_some_and(|l| l.1.is_zero()) {
                        terms.pop();
                    }
                    terms.push((m, c));
                }
            }
        }
        if terms.last().is_some_and(|l| l.1.is_zero()) {
            terms.pop();
        }
        Element { ctx, terms }
    }
}

type Terms = Arc<Vec<(Monomial, Fp)>>;

/// Tracks intermediate terms for one top-level call.
pub(crate) struct Budget {
    limit: u64,
    used: Cell<u64>,
}

impl Budget {
    pub(crate) fn new(limit: u64) -> Self {
        Budget { limit, used: Cell::new(0) }
    }

    #[inline]
    pub(crate) fn spend(&self, n: usize) -> Result<()> {
        let u = self.used.get() + n as u64;
        self.used.set(u);
        if u > self.limit {
            return Err(LambdaError::Budget { what: "term count", limit: self.limit });
        }
        Ok(())
    }
}

/// The lambda algebra at a fixed prime, with its memo tables.
///
/// Memo tables are concurrent maps; two threads that race on one key insert
/// identical values.
pub struct Lambda {
    ctx: PrimeContext,
    term_budget: u64,
    pairs: DashMap<(Generator, Generator), Arc<Vec<(Fp, Generator, Generator)>>, FastHasher>,
    left: DashMap<(Generator, Monomial), Terms, FastHasher>,
    /// One map per sign convention, keyed by admissible word.
    pub(crate) diffs: [DashMap<Monomial, Terms, FastHasher>; 2],
}

impl Lambda {
    pub fn new(ctx: PrimeContext) -> Self {
        Self::with_budget(ctx, DEFAULT_TERM_BUDGET)
    }

    pub fn with_budget(ctx: PrimeContext, term_budget: u64) -> Self {
        Lambda {
            ctx,
            term_budget,
            pairs: DashMap::default(),
            left: DashMap::default(),
            diffs: Default::default(),
        }
    }

    /// Number of memoized entries across all caches.
    pub fn cache_len(&self) -> usize {
        self.pairs.len() + self.left.len() + self.diffs.iter().map(DashMap::len).sum::<usize>()
    }

    /// Drop memoized products and differentials. Results are unaffected;
    /// long sweeps call this to keep memory bounded.
    pub fn clear_caches(&self) {
        self.left.clear();
        self.diffs.iter().for_each(DashMap::clear);
    }

    pub fn ctx(&self) -> PrimeContext {
        self.ctx
    }

    pub fn term_budget(&self) -> u64 {
        self.term_budget
    }

    pub(crate) fn budget(&self) -> Budget {
        Budget::new(self.term_budget)
    }

    /// Right-hand side of the relation whose left-hand side is the
    /// inadmissible pair `g1 g2`, as `(coeff, h1, h2)` triples.
    pub fn relation(&self, g1: Generator, g2: Generator) -> Result<Arc<Vec<(Fp, Generator, Generator)>>> {
        let ctx = self.ctx;
        if g1.admits(g2, ctx) {
            return Err(LambdaError::Domain(format!("{g1} {g2} is already admissible")));
        }
        if let Some(r) = self.pairs.get(&(g1, g2)) {
            return Ok(r.clone());
        }
        let r = Arc::new(relation_rhs(ctx, g1, g2));
        self.pairs.insert((g1, g2), r.clone());
        Ok(r)
    }

    pub fn straighten_pair(&self, g1: Generator, g2: Generator) -> Result<Element> {
        let rhs = self.relation(g1, g2)?;
        Ok(Element::from_terms(self.ctx, rhs.iter().map(|&(c, a, b)| (Monomial(vec![a, b]), c))))
    }

    /// `g · w` for admissible `w`, in the admissible basis.
    pub(crate) fn left_mul(&self, g: Generator, w: &[Generator], budget: &Budget) -> Result<Terms> {
        let ctx = self.ctx;
        match w.first() {
            None => return Ok(Arc::new(vec![(Monomial(vec![g]), Fp::ONE)])),
            Some(h) if g.admits(*h, ctx) => {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(g);
                v.extend_from_slice(w);
                return Ok(Arc::new(vec![(Monomial(v), Fp::ONE)]));
            }
            _ => {}
        }
        let key = (g, Monomial(w.to_vec()));
        if let Some(hit) = self.left.get(&key) {
            budget.spend(hit.len())?;
            return Ok(hit.clone());
        }
        let rhs = self.relation(g, w[0])?;
        let mut acc = Accumulator::new(ctx);
        for &(c, h1, h2) in rhs.iter() {
            let inner = self.left_mul(h2, &w[1..], budget)?;
            for (t, c2) in inner.iter() {
                let outer = self.left_mul(h1, t.gens(), budget)?;
                let c12 = ctx.mul(c, *c2);
                for (u, c3) in outer.iter() {
                    acc.add(u.clone(), ctx.mul(c12, *c3));
                }
                budget.spend(outer.len())?;
            }
        }
        let out: Terms = Arc::new(acc.finish().terms);
        self.left.insert(key, out.clone());
        Ok(out)
    }

    /// Multiplies the word `prefix` onto the admissible element given by `terms`.
    pub(crate) fn prefix_mul(&self, prefix: &[Generator], terms: Vec<(Monomial, Fp)>, budget: &Budget) -> Result<Vec<(Monomial, Fp)>> {
        let ctx = self.ctx;
        let mut cur = terms;
        for &g in prefix.iter().rev() {
            let mut acc = Accumulator::new(ctx);
            for (t, c) in &cur {
                let prod = self.left_mul(g, t.gens(), budget)?;
                for (u, c2) in prod.iter() {
                    acc.add(u.clone(), ctx.mul(*c, *c2));
                }
                budget.spend(prod.len())?;
            }
            cur = acc.finish().terms;
        }
        Ok(cur)
    }

    pub(crate) fn normalize_with(&self, word: &[Generator], coeff: Fp, budget: &Budget) -> Result<Vec<(Monomial, Fp)>> {
        if coeff.is_zero() {
            return Ok(Vec::new());
        }
        // Longest admissible suffix goes in as a single term.
        let mut start = word.len().saturating_sub(1);
        while start > 0 && word[start - 1].admits(word[start], self.ctx) {
            start -= 1;
        }
        let start = if word.is_empty() { 0 } else { start };
        self.prefix_mul(&word[..start], vec![(Monomial(word[start..].to_vec()), coeff)], budget)
    }

    /// The class of `coeff · word` in the admissible basis.
    pub fn normalize(&self, word: &[Generator], coeff: Fp) -> Result<Element> {
        let budget = self.budget();
        let terms = self.normalize_with(word, coeff, &budget)?;
        Ok(Element { ctx: self.ctx, terms })
    }

    pub fn normalize_monomial(&self, m: &Monomial) -> Result<Element> {
        self.normalize(m.gens(), Fp::ONE)
    }

    /// Normalizes a parsed expression.
    pub fn evaluate(&self, terms: &[RawTerm]) -> Result<Element> {
        let budget = self.budget();
        let mut acc = Accumulator::new(self.ctx);
        for (c, w) in terms {
            for (m, c2) in self.normalize_with(w, self.ctx.reduce(*c), &budget)? {
                acc.add(m, c2);
            }
        }
        Ok(acc.finish())
    }

    pub fn parse(&self, s: &str) -> Result<Element> {
        self.evaluate(&parse_expression(s)?)
    }

    pub fn multiply(&self, a: &Element, b: &Element) -> Result<Element> {
        if a.ctx != self.ctx {
            return Err(LambdaError::MixedPrime(a.ctx.p(), self.ctx.p()));
        }
        if b.ctx != self.ctx {
            return Err(LambdaError::MixedPrime(b.ctx.p(), self.ctx.p()));
        }
        let ctx = self.ctx;
        let budget = self.budget();
        let mut acc = Accumulator::new(ctx);
        for (x, c) in &a.terms {
            let scaled: Vec<(Monomial, Fp)> = b.terms.iter().map(|(y, d)| (y.clone(), ctx.mul(*c, *d))).collect();
            for (u, e) in self.prefix_mul(x.gens(), scaled, &budget)? {
                acc.add(u, e);
            }
        }
        Ok(acc.finish())
    }

    pub(crate) fn element(&self, terms: Vec<(Monomial, Fp)>) -> Element {
        Element { ctx: self.ctx, terms }
    }
}

/// The four relation families. `g1 g2` must be inadmissible.
fn relation_rhs(ctx: PrimeContext, g1: Generator, g2: Generator) -> Vec<(Fp, Generator, Generator)> {
    let p = ctx.p() as i64;
    let i = g1.index() as i64;
    let b = g2.index() as i64;
    let mut out = Vec::new();
    let mut push = |c: Fp, x: Generator, y: Generator| {
        if !c.is_zero() {
            out.push((c, x, y));
        }
    };
    let gen = |lambda: bool, idx: i64| {
        if lambda {
            Generator::lambda(idx as u32)
        } else {
            Generator::mu(idx as u32)
        }
    };
    match (g1.is_lambda(), g2.is_lambda()) {
        // λ_i λ_{pi+k}, λ_i μ_{pi+k}
        (true, second_is_lambda) => {
            let k = b - p * i;
            for j in 0..=ctx.bound_n(k) {
                push(ctx.coeff_a(k, j), gen(true, i + k - j), gen(second_is_lambda, p * i + j));
            }
            if !second_is_lambda {
                for j in 0..=ctx.bound_n_prime(k) {
                    push(ctx.coeff_b(k, j), gen(false, i + k - j), gen(true, p * i + j));
                }
            }
        }
        // μ_i λ_{pi+k+1}, μ_i μ_{pi+k+1}
        (false, second_is_lambda) => {
            let k = b - p * i - 1;
            for j in 0..=ctx.bound_n(k) {
                push(ctx.coeff_a(k, j), gen(false, i + k - j), gen(second_is_lambda, p * i + j + 1));
            }
        }
    }
    out
}
