//! The differential, extended from generators as a derivation.
//!
//! On generators
//!
//! ```text
//! ∂λ_k = Σ_{j=1}^{N(k)}  a(k,j) λ_{k-j} λ_j
//! ∂μ_k = Σ_{j=0}^{N(k)}  a(k,j) λ_{k-j} μ_j  +  Σ_{j=1}^{N'(k)} b(k,j) μ_{k-j} λ_j
//! ```
//!
//! Two Leibniz rules are implemented. [`SignConvention::TopologicalDegreeSign`]
//! is the one for which `∂² = 0`; see [`select_sign_convention`].

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{BasisKey, Generator, Ideal, Monomial};
use crate::error::{LambdaError, Result};
use crate::fparith::Fp;
use crate::rewrite::{Accumulator, Budget, Element, Lambda};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SignConvention {
    /// `d(xy) = d(x) y + x d(y)`
    Unsigned,
    /// `d(xy) = d(x) y + (-1)^{deg x} x d(y)`
    TopologicalDegreeSign,
}

impl SignConvention {
    pub const ALL: [SignConvention; 2] = [SignConvention::Unsigned, SignConvention::TopologicalDegreeSign];

    /// The convention under which the differential squares to zero.
    pub const SELECTED: SignConvention = SignConvention::TopologicalDegreeSign;
}

/// Unnormalized `∂g` as `(coeff, h1, h2)` triples.
pub fn generator_terms(lambda: &Lambda, g: Generator) -> Vec<(Fp, Generator, Generator)> {
    let ctx = lambda.ctx();
    let k = g.index() as i64;
    let mut out = Vec::new();
    if g.is_lambda() {
        for j in 1..=ctx.bound_n(k) {
            out.push((ctx.coeff_a(k, j), Generator::lambda((k - j) as u32), Generator::lambda(j as u32)));
        }
    } else {
        for j in 0..=ctx.bound_n(k) {
            out.push((ctx.coeff_a(k, j), Generator::lambda((k - j) as u32), Generator::mu(j as u32)));
        }
        for j in 1..=ctx.bound_n_prime(k) {
            out.push((ctx.coeff_b(k, j), Generator::mu((k - j) as u32), Generator::lambda(j as u32)));
        }
    }
    out.retain(|t| !t.0.is_zero());
    out
}

pub fn d_generator(lambda: &Lambda, g: Generator) -> Result<Element> {
    let ctx = lambda.ctx();
    let budget = lambda.budget();
    let mut acc = Accumulator::new(ctx);
    for (c, h1, h2) in generator_terms(lambda, g) {
        for (m, e) in lambda.normalize_with(&[h1, h2], c, &budget)? {
            acc.add(m, e);
        }
    }
    Ok(acc.finish())
}

fn d_word(lambda: &Lambda, word: &[Generator], sign: SignConvention, budget: &Budget) -> Result<Arc<Vec<(Monomial, Fp)>>> {
    let ctx = lambda.ctx();
    let Some((&g, rest)) = word.split_first() else {
        return Ok(Arc::new(Vec::new()));
    };
    let memo = &lambda.diffs[sign as usize];
    if let Some(hit) = memo.get(word) {
        budget.spend(hit.len())?;
        return Ok(hit.clone());
    }
    let mut acc = Accumulator::new(ctx);
    let tail = vec![(Monomial(rest.to_vec()), Fp::ONE)];
    for (c, h1, h2) in generator_terms(lambda, g) {
        let scaled = vec![(tail[0].0.clone(), c)];
        for (m, e) in lambda.prefix_mul(&[h1, h2], scaled, budget)? {
            acc.add(m, e);
        }
    }
    let d_rest = d_word(lambda, rest, sign, budget)?;
    if !d_rest.is_empty() {
        let s = match sign {
            SignConvention::Unsigned => Fp::ONE,
            SignConvention::TopologicalDegreeSign => ctx.sign(g.degree(ctx) as u64),
        };
        let scaled: Vec<(Monomial, Fp)> = d_rest.iter().map(|(m, c)| (m.clone(), ctx.mul(*c, s))).collect();
        for (m, e) in lambda.prefix_mul(&[g], scaled, budget)? {
            acc.add(m, e);
        }
    }
    let out = Arc::new(acc.finish().terms().to_vec());
    memo.insert(Monomial(word.to_vec()), out.clone());
    Ok(out)
}

/// `∂m` for an admissible monomial.
pub fn d_monomial(lambda: &Lambda, m: &Monomial, sign: SignConvention) -> Result<Element> {
    if !m.is_admissible(lambda.ctx()) {
        return Err(LambdaError::Domain(format!("{m} is not admissible")));
    }
    let budget = lambda.budget();
    Ok(lambda.element(d_word(lambda, m.gens(), sign, &budget)?.to_vec()))
}

pub fn d(lambda: &Lambda, x: &Element, sign: SignConvention) -> Result<Element> {
    let ctx = lambda.ctx();
    if x.ctx() != ctx {
        return Err(LambdaError::MixedPrime(x.ctx().p(), ctx.p()));
    }
    let budget = lambda.budget();
    let mut acc = Accumulator::new(ctx);
    for (m, c) in x.terms() {
        for (t, e) in d_word(lambda, m.gens(), sign, &budget)?.iter() {
            acc.add(t.clone(), ctx.mul(*c, *e));
        }
    }
    Ok(acc.finish())
}

pub fn is_cycle(lambda: &Lambda, x: &Element) -> Result<bool> {
    Ok(d(lambda, x, SignConvention::SELECTED)?.is_zero())
}

/// A basis monomial where `∂²` failed, with the nonzero value.
#[derive(Debug, Clone)]
pub struct SquareFailure {
    pub monomial: Monomial,
    pub value: Element,
}

/// Memo size at which [`check_square_zero`] flushes the caches.
pub const SWEEP_CACHE_LIMIT: usize = 1 << 18;

/// Checks `∂∂ = 0` on every basis monomial of `Λ(n)` with degree at most
/// `max_degree` and length at most `max_len`; returns the number of monomials
/// checked and the failures (at most `max_failures` are kept).
pub fn check_square_zero(
    lambda: &Lambda,
    n: u32,
    max_degree: u32,
    max_len: u32,
    sign: SignConvention,
    max_failures: usize,
) -> Result<(usize, Vec<SquareFailure>)> {
    let ctx = lambda.ctx();
    let mut checked = 0;
    let mut failures = Vec::new();
    for m in 0..=max_degree {
        for l in 0..=max_len {
            for mon in crate::algebra::basis(&BasisKey::new(ctx, n, m, l, Ideal::Full)?) {
                if lambda.cache_len() > SWEEP_CACHE_LIMIT {
                    lambda.clear_caches();
                }
                let dd = d(lambda, &d_monomial(lambda, &mon, sign)?, sign)?;
                checked += 1;
                if !dd.is_zero() {
                    failures.push(SquareFailure { monomial: mon, value: dd });
                    if failures.len() >= max_failures {
                        return Ok((checked, failures));
                    }
                }
            }
        }
    }
    Ok((checked, failures))
}

/// A finite check that `∂² = 0` on all of `Λ` through `max_degree` under
/// [`SignConvention::TopologicalDegreeSign`], without enumerating words.
///
/// It verifies (a) `∂²g = 0` for every generator `g` with `deg g ≤ max_degree`
/// and (b) for every inadmissible pair `g1 g2` in that range,
/// `∂(g1)·g2 + (-1)^{deg g1} g1·∂(g2)` equals `∂` of the straightened pair.
/// By (b) the Leibniz extension to the free algebra preserves the relation
/// ideal, so it descends to a derivation of `Λ`, and that derivation is the
/// one [`d_monomial`] computes. Its square is again a derivation (`p` is odd),
/// so (a) forces it to vanish.
#[derive(Debug, Clone, Serialize)]
pub struct DerivationCertificate {
    pub p: u32,
    pub max_degree: u32,
    pub generators_checked: usize,
    pub relations_checked: usize,
    pub generator_failures: Vec<String>,
    pub relation_failures: Vec<String>,
}

impl DerivationCertificate {
    pub fn holds(&self) -> bool {
        self.generator_failures.is_empty() && self.relation_failures.is_empty()
    }
}

pub fn derivation_certificate(lambda: &Lambda, max_degree: u32) -> Result<DerivationCertificate> {
    let ctx = lambda.ctx();
    let sign = SignConvention::TopologicalDegreeSign;
    let step = 2 * (ctx.p() - 1);
    let mut gens = Vec::new();
    for i in 0..=(max_degree + 1) / step {
        for g in [Generator::lambda(i.max(1)), Generator::mu(i)] {
            if g.degree(ctx) <= max_degree && !gens.contains(&g) {
                gens.push(g);
            }
        }
    }
    gens.sort();
    let mut cert = DerivationCertificate {
        p: ctx.p(),
        max_degree,
        generators_checked: 0,
        relations_checked: 0,
        generator_failures: Vec::new(),
        relation_failures: Vec::new(),
    };
    let mut dg = std::collections::HashMap::new();
    for &g in &gens {
        let x = d_generator(lambda, g)?;
        cert.generators_checked += 1;
        if !d(lambda, &x, sign)?.is_zero() {
            cert.generator_failures.push(g.to_string());
        }
        dg.insert(g, x);
    }
    for &g1 in &gens {
        for &g2 in &gens {
            if g1.admits(g2, ctx) || g1.degree(ctx) + g2.degree(ctx) > max_degree {
                continue;
            }
            let (e1, e2) = (Element::monomial(ctx, Monomial(vec![g1])), Element::monomial(ctx, Monomial(vec![g2])));
            let s = ctx.sign(g1.degree(ctx) as u64);
            let leibniz = lambda.multiply(&dg[&g1], &e2)?.add(&lambda.multiply(&e1, &dg[&g2])?.scale(s))?;
            let straightened = d(lambda, &lambda.normalize(&[g1, g2], Fp::ONE)?, sign)?;
            cert.relations_checked += 1;
            if leibniz != straightened {
                cert.relation_failures.push(format!("{g1} {g2}"));
            }
        }
    }
    Ok(cert)
}

/// The eleven displayed values used in the proof about `span(u) → span(v)`,
/// as `(label, computed, expected)` under `sign`.
pub fn identity_table(lambda: &Lambda, sign: SignConvention) -> Result<Vec<(&'static str, Element, Element)>> {
    let e = |s: &str| lambda.parse(s);
    let dm = |s: &str| -> Result<Element> { d(lambda, &lambda.parse(s)?, sign) };
    let prod = |a: &str, b: &str| -> Result<Element> { lambda.parse(&format!("{a} {b}")) };
    Ok(vec![
        ("d(l1) = 0", dm("l1")?, e("0")?),
        ("d(m1) = -l1 m0", dm("m1")?, e("- l1 m0")?),
        ("d(l2) = -2 l1 l1", dm("l2")?, e("-2 l1 l1")?),
        ("d(m2) = -l2 m0 - 2 l1 m1 + m1 l1", dm("m2")?, e("- l2 m0 - 2 l1 m1 + m1 l1")?),
        ("m0 m1 = 0", prod("m0", "m1")?, e("0")?),
        ("m0 l1 = 0", prod("m0", "l1")?, e("0")?),
        ("m0 l2 = -m1 l1", prod("m0", "l2")?, e("- m1 l1")?),
        ("m0 m2 = -m1 m1", prod("m0", "m2")?, e("- m1 m1")?),
        ("d(m2 l1) = -2 l1 m1 l1 + m1 l1 l1", dm("m2 l1")?, e("-2 l1 m1 l1 + m1 l1 l1")?),
        ("d(m1 l2) = l1 m1 l1 - 2 m1 l1 l1", dm("m1 l2")?, e("l1 m1 l1 - 2 m1 l1 l1")?),
        (
            "d(m1 m2 l1) = l1 m1 m1 l1 - 2 m1 l1 m1 l1 + m1 m1 l1 l1",
            dm("m1 m2 l1")?,
            e("l1 m1 m1 l1 - 2 m1 l1 m1 l1 + m1 m1 l1 l1")?,
        ),
    ])
}

/// Outcome of checking one sign convention.
#[derive(Debug, Clone)]
pub struct ConventionReport {
    pub sign: SignConvention,
    pub checked: usize,
    pub square_failures: usize,
    pub identity_failures: Vec<&'static str>,
}

impl ConventionReport {
    pub fn passes(&self) -> bool {
        self.square_failures == 0 && self.identity_failures.is_empty()
    }
}

/// Runs the `∂² = 0` sweep on `Λ(2p)` and the displayed identities under
/// both conventions. Succeeds only if exactly one convention passes.
pub fn select_sign_convention(lambda: &Lambda, max_degree: u32, max_len: u32) -> Result<(SignConvention, Vec<ConventionReport>)> {
    let n = 2 * lambda.ctx().p();
    let mut reports = Vec::new();
    for sign in SignConvention::ALL {
        let (checked, fails) = check_square_zero(lambda, n, max_degree, max_len, sign, 1)?;
        let identity_failures = identity_table(lambda, sign)?
            .into_iter()
            .filter(|(_, got, want)| got != want)
            .map(|(label, _, _)| label)
            .collect();
        reports.push(ConventionReport { sign, checked, square_failures: fails.len(), identity_failures });
    }
    let passing: Vec<_> = reports.iter().filter(|r| r.passes()).map(|r| r.sign).collect();
    match passing.as_slice() {
        [one] => Ok((*one, reports)),
        _ => Err(LambdaError::Domain(format!("expected exactly one passing sign convention, got {passing:?}"))),
    }
}
