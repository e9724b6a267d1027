//! The algebraic Hopf map `h_p : Λ(2) → Λ(2p)` and the computations built on
//! the span of `u_i` / `v_i` words.
//!
//! `h_p` strips a leading `μ_2` and kills every other basis word of `Λ(2)`;
//! its kernel is spanned by `Λ(1)` and the `λ_2`-led words `λ_2 Λ(2p-1)`.
//! The grading shift is `deg μ_2 = 4(p-1)` in degree and one in length.

use std::collections::HashMap;

use serde::Serialize;

use crate::algebra::{basis, BasisKey, Generator, Ideal, Monomial};
use crate::differential::{d, d_monomial, SignConvention};
use crate::error::{LambdaError, Result};
use crate::fparith::{Fp, PrimeContext};
use crate::homology::{d_matrix, Echelon, FpMatrix};
use crate::rewrite::{Element, Lambda};

pub fn hopf_map(lambda: &Lambda, x: &Element) -> Result<Element> {
    let ctx = lambda.ctx();
    if !x.in_subalgebra(2, Ideal::Full) {
        return Err(LambdaError::Domain(format!("{x} is not in Λ(2)")));
    }
    Ok(Element::from_terms(
        ctx,
        x.terms()
            .iter()
            .filter(|(m, _)| m.first() == Some(Generator::mu(2)))
            .map(|(m, c)| (Monomial(m.gens()[1..].to_vec()), *c)),
    ))
}

#[derive(Debug, Clone, Serialize)]
pub struct SesCell {
    pub m: u32,
    pub l: u32,
    pub dim_lambda2: usize,
    pub dim_lambda1: usize,
    pub dim_lambda2_led: usize,
    pub dim_image: usize,
}

impl SesCell {
    pub fn balanced(&self) -> bool {
        self.dim_lambda2 == self.dim_lambda1 + self.dim_lambda2_led + self.dim_image
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SesReport {
    pub p: u32,
    pub max_degree: u32,
    pub max_len: u32,
    pub cells_checked: usize,
    pub failures: Vec<SesCell>,
}

/// `dim Λ(2) = dim Λ(1) + dim λ_2Λ(2p-1) + dim Λ(2p)[shifted by μ_2]` in
/// every bidegree with `m ≤ max_degree`, `l ≤ max_len`.
pub fn ses_dimension_check(ctx: PrimeContext, max_degree: u32, max_len: u32) -> Result<SesReport> {
    let p = ctx.p();
    let l2 = Generator::lambda(2).degree(ctx);
    let m2 = Generator::mu(2).degree(ctx);
    let dim = |n: u32, m: i64, l: i64| -> Result<usize> {
        if m < 0 || l < 0 {
            return Ok(0);
        }
        Ok(basis(&BasisKey::new(ctx, n, m as u32, l as u32, Ideal::Full)?).len())
    };
    let mut failures = Vec::new();
    let mut checked = 0;
    for m in 0..=max_degree {
        for l in 0..=max_len {
            let (mi, li) = (m as i64, l as i64);
            let cell = SesCell {
                m,
                l,
                dim_lambda2: dim(2, mi, li)?,
                dim_lambda1: dim(1, mi, li)?,
                dim_lambda2_led: dim(2 * p - 1, mi - l2 as i64, li - 1)?,
                dim_image: dim(2 * p, mi - m2 as i64, li - 1)?,
            };
            checked += 1;
            if !cell.balanced() {
                failures.push(cell);
            }
        }
    }
    Ok(SesReport { p, max_degree, max_len, cells_checked: checked, failures })
}

/// Does `h_p` commute with `d` on every basis word of `Λ(2)` up to the
/// given degree and length? Returns the words where it does not.
pub fn chain_map_failures(lambda: &Lambda, max_degree: u32, max_len: u32, sign: SignConvention) -> Result<(usize, Vec<Monomial>)> {
    let ctx = lambda.ctx();
    let mut checked = 0;
    let mut bad = Vec::new();
    for m in 0..=max_degree {
        for l in 0..=max_len {
            for w in basis(&BasisKey::new(ctx, 2, m, l, Ideal::Full)?) {
                if lambda.cache_len() > crate::differential::SWEEP_CACHE_LIMIT {
                    lambda.clear_caches();
                }
                let x = Element::monomial(ctx, w.clone());
                let lhs = hopf_map(lambda, &d(lambda, &x, sign)?)?;
                let rhs = d(lambda, &hopf_map(lambda, &x)?, sign)?;
                checked += 1;
                if lhs != rhs {
                    bad.push(w);
                }
            }
        }
    }
    Ok((checked, bad))
}

/// `u_0 = μ_1^k λ_2`, `u_i = μ_1^{k-i} μ_2 μ_1^{i-1} λ_1` and
/// `v_i = μ_1^{k-i} λ_1 μ_1^i λ_1`.
#[derive(Debug, Clone)]
pub struct LemmaSpan {
    pub k: u32,
    pub u: Vec<Monomial>,
    pub v: Vec<Monomial>,
}

impl LemmaSpan {
    pub fn new(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(LambdaError::Domain("k must be at least 1".into()));
        }
        let (m1, l1) = (Generator::mu(1), Generator::lambda(1));
        let k = k as usize;
        let mut u = Vec::with_capacity(k + 1);
        let mut w = vec![m1; k];
        w.push(Generator::lambda(2));
        u.push(Monomial(w));
        for i in 1..=k {
            let mut w = vec![m1; k - i];
            w.push(Generator::mu(2));
            w.extend(std::iter::repeat_n(m1, i - 1));
            w.push(l1);
            u.push(Monomial(w));
        }
        let v = (0..=k)
            .map(|i| {
                let mut w = vec![m1; k - i];
                w.push(l1);
                w.extend(std::iter::repeat_n(m1, i));
                w.push(l1);
                Monomial(w)
            })
            .collect();
        Ok(LemmaSpan { k: k as u32, u, v })
    }
}

/// Matrix of `d` on `span(u)` in the basis `v`; column `j` is `d(u_j)`.
/// Fails if some `d(u_j)` leaves `span(v)`.
pub fn lemma_matrix(lambda: &Lambda, k: u32) -> Result<FpMatrix> {
    let span = LemmaSpan::new(k)?;
    let index: HashMap<&Monomial, usize> = span.v.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut columns = Vec::with_capacity(span.u.len());
    for u in &span.u {
        let du = d_monomial(lambda, u, SignConvention::SELECTED)?;
        let mut col = Vec::new();
        for (t, c) in du.terms() {
            let i = index
                .get(t)
                .ok_or_else(|| LambdaError::Domain(format!("d({u}) has component {t} outside span(v)")))?;
            col.push((*i, *c));
        }
        columns.push(col);
    }
    FpMatrix::from_columns(span.v.len(), columns)
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaVerdict {
    pub k: u32,
    pub p: u32,
    pub matrix: Vec<Vec<i64>>,
    pub det: u32,
    pub det_formula: u32,
    pub rank: usize,
    pub is_isomorphism: bool,
}

/// `(-1)^{k+1}(k+2) mod p`.
pub fn lemma_det_formula(ctx: PrimeContext, k: u32) -> Fp {
    ctx.mul(ctx.sign(k as u64 + 1), ctx.reduce(k as i64 + 2))
}

pub fn lemma_verdict(lambda: &Lambda, k: u32) -> Result<LemmaVerdict> {
    let ctx = lambda.ctx();
    let mat = lemma_matrix(lambda, k)?;
    let det = mat.det(ctx)?;
    let rank = mat.rank(ctx);
    Ok(LemmaVerdict {
        k,
        p: ctx.p(),
        matrix: mat.to_signed(ctx),
        det: det.value(),
        det_formula: lemma_det_formula(ctx, k).value(),
        rank,
        is_isomorphism: rank == mat.cols(),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct PropositionReport {
    pub k: u32,
    pub p: u32,
    /// Bidegree of `μ_2 μ_1^{k-3} λ_1` in `Λλ(2)`.
    pub m: u32,
    pub l: u32,
    pub dim_e1: usize,
    pub dim_cycles: usize,
    /// Whether `μ_1^{k-3} λ_1` is a nonzero class in `Λλ(2p)`; `None` for
    /// `k < 3`, where the target word does not exist.
    pub target_nonzero: Option<bool>,
    pub verdict: bool,
}

/// Does some cycle of `Λλ(2)` at the bidegree of `μ_2 μ_1^{k-3} λ_1` map
/// under `h_p` onto a nonzero multiple of the class of `μ_1^{k-3} λ_1`,
/// modulo boundaries in `Λλ(2p)`?
pub fn proposition_check(lambda: &Lambda, k: u32) -> Result<PropositionReport> {
    let ctx = lambda.ctx();
    let p = ctx.p();
    if k < 2 {
        return Err(LambdaError::Domain("k must be at least 2".into()));
    }
    let m = 2 * (p - 1) * k - 1;
    let l = k - 1;
    let src_key = BasisKey::new(ctx, 2, m, l, Ideal::LambdaIdeal)?;
    let src = basis(&src_key);
    let cycles = d_matrix(lambda, &src_key)?.kernel(ctx);
    let mut report = PropositionReport {
        k,
        p,
        m,
        l,
        dim_e1: src.len(),
        dim_cycles: cycles.len(),
        target_nonzero: None,
        verdict: false,
    };
    if k < 3 {
        return Ok(report);
    }
    let tgt_key = BasisKey::new(ctx, 2 * p, m - Generator::mu(2).degree(ctx), l - 1, Ideal::LambdaIdeal)?;
    let tgt = basis(&tgt_key);
    let index: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let mut alpha_word = vec![Generator::mu(1); k as usize - 3];
    alpha_word.push(Generator::lambda(1));
    let alpha_idx = *index
        .get(&Monomial(alpha_word))
        .ok_or_else(|| LambdaError::Domain("target word missing from Λλ(2p) basis".into()))?;
    let mut alpha = vec![Fp::ZERO; tgt.len()];
    alpha[alpha_idx] = Fp::ONE;

    let mut span = Echelon::new(ctx, tgt.len());
    if tgt_key.l > 0 {
        let incoming = d_matrix(lambda, &tgt_key.at(tgt_key.m + 1, tgt_key.l - 1))?;
        for j in 0..incoming.cols() {
            let mut v = vec![Fp::ZERO; tgt.len()];
            for &(i, x) in incoming.column(j) {
                v[i] = x;
            }
            span.insert(v);
        }
    }
    let nonzero = !span.contains(&alpha);
    report.target_nonzero = Some(nonzero);
    if !nonzero {
        return Ok(report);
    }
    for z in &cycles {
        let x = Element::from_terms(ctx, src.iter().cloned().zip(z.iter().copied()));
        let hx = hopf_map(lambda, &x)?;
        let mut v = vec![Fp::ZERO; tgt.len()];
        for (w, c) in hx.terms() {
            let i = index
                .get(w)
                .ok_or_else(|| LambdaError::Domain(format!("h_p image term {w} outside Λλ(2p)")))?;
            v[*i] = *c;
        }
        span.insert(v);
    }
    report.verdict = span.contains(&alpha);
    Ok(report)
}
