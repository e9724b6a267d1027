//! Certificates that `π_n(S²) ≠ 0` for every `n ≥ 2`, and the inequality
//! conditions for nonzero compositions of `α`-family elements.
//!
//! Dimensions `n ≢ 1 (mod 8)` are covered by Curtis' result. The rest are
//! `n = 2(p-1)k + 1` for an odd prime `p`, where a `Z/p` summand exists as
//! soon as `k ≢ 1 (mod p)` (statement A) or `k ≢ 0 (mod p)` (statement B);
//! one of the two always holds. `π_n(S³) = π_n(S²)` for `n ≥ 3`.

use serde::{Deserialize, Serialize};

use crate::error::{LambdaError, Result};
use crate::fparith::{is_prime, PrimeContext};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Statement {
    A,
    B,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CertificateKind {
    CurtisResidue { residue: u64 },
    OddPrimary { p: u32, k: u64, statement: Statement },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub n: u64,
    #[serde(flatten)]
    pub kind: CertificateKind,
}

pub fn statement_a_applies(p: u32, k: u64) -> bool {
    k % p as u64 != 1
}

pub fn statement_b_applies(p: u32, k: u64) -> bool {
    k % p as u64 != 0
}

fn odd_primary(n: u64, p: u32, k: u64) -> Certificate {
    let statement = if statement_a_applies(p, k) { Statement::A } else { Statement::B };
    Certificate { n, kind: CertificateKind::OddPrimary { p, k, statement } }
}

/// Default certificate: Curtis when it applies, otherwise `p = 3`.
pub fn certify_dimension(n: u64) -> Result<Certificate> {
    if n < 2 {
        return Err(LambdaError::Domain(format!("n = {n}: certificates exist only for n ≥ 2")));
    }
    if n % 8 != 1 {
        return Ok(Certificate { n, kind: CertificateKind::CurtisResidue { residue: n % 8 } });
    }
    // n = 8l + 1 = 2·2·(2l) + 1
    Ok(odd_primary(n, 3, (n - 1) / 4))
}

/// Every certificate for `n`: the Curtis residue if applicable, then one
/// odd-primary certificate per prime `p ≤ max_prime` with `2(p-1) | n-1`.
pub fn all_certificates(n: u64, max_prime: u32) -> Result<Vec<Certificate>> {
    if n < 2 {
        return Err(LambdaError::Domain(format!("n = {n}: certificates exist only for n ≥ 2")));
    }
    let mut out = Vec::new();
    if n % 8 != 1 {
        out.push(Certificate { n, kind: CertificateKind::CurtisResidue { residue: n % 8 } });
    }
    for p in (3..=max_prime).filter(|&p| is_prime(p as u64)) {
        let step = 2 * (p as u64 - 1);
        if n > 1 && (n - 1) % step == 0 {
            let k = (n - 1) / step;
            if k >= 1 {
                out.push(odd_primary(n, p, k));
            }
        }
    }
    Ok(out)
}

impl Certificate {
    /// Checks the certificate's own invariants.
    pub fn validate(&self) -> bool {
        if self.n < 2 {
            return false;
        }
        match &self.kind {
            CertificateKind::CurtisResidue { residue } => *residue == self.n % 8 && *residue != 1,
            CertificateKind::OddPrimary { p, k, statement } => {
                let ok_statement = match statement {
                    Statement::A => statement_a_applies(*p, *k),
                    Statement::B => statement_b_applies(*p, *k),
                };
                self.n >= 3
                    && *p >= 3
                    && is_prime(*p as u64)
                    && *k >= 1
                    && 2 * (*p as u64 - 1) * k + 1 == self.n
                    && ok_statement
            }
        }
    }
}

/// Parameters of a composition `α ∘ β` of `α`-family elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MoriParams {
    pub p: u32,
    pub f: u32,
    pub g: u32,
    pub i: u64,
    pub j: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct MoriBounds {
    /// `u = f + g + 2`, from `e_C(α_i^(f)) e_C(α_j^(g)) = p^{-u}`.
    pub u: i128,
    pub u_lower_exclusive: i128,
    pub u_upper: i128,
    /// Admissible `n` satisfy `n_lower ≤ n < n_upper`.
    pub n_lower: i128,
    pub n_upper: i128,
}

impl MoriParams {
    pub fn new(p: u32, f: u32, g: u32, i: u64, j: u64) -> Result<Self> {
        PrimeContext::new(p)?;
        if i < 1 || j < 1 {
            return Err(LambdaError::Domain("i and j must be at least 1".into()));
        }
        Ok(MoriParams { p, f, g, i, j })
    }

    /// `u` such that the product of the two e-invariants `-p^{-f-1}` and
    /// `-p^{-g-1}` is `p^{-u}`.
    pub fn u(&self) -> i128 {
        self.f as i128 + self.g as i128 + 2
    }

    pub fn bounds(&self) -> Result<MoriBounds> {
        let ctx = PrimeContext::new(self.p)?;
        let p = self.p as i128;
        let (f, g, i, j) = (self.f as i128, self.g as i128, self.i as i128, self.j as i128);
        let overflow = || LambdaError::Domain("Mori parameters overflow 128-bit arithmetic".into());
        let pf = p.checked_pow(self.f).ok_or_else(overflow)?;
        let pg = p.checked_pow(self.g).ok_or_else(overflow)?;
        let stable = i.checked_mul(p - 1).and_then(|x| x.checked_mul(pf)).ok_or_else(overflow)?;
        let sum = i.checked_mul(pf).zip(j.checked_mul(pg)).and_then(|(a, b)| a.checked_add(b)).ok_or_else(overflow)?;
        let (vi, vj, vs) = (ctx.valuation(i)? as i128, ctx.valuation(j)? as i128, ctx.valuation(sum)? as i128);
        let u = self.u();
        Ok(MoriBounds {
            u,
            u_lower_exclusive: vj + g + 1,
            u_upper: vi + f + 1 + stable,
            n_lower: u + vs - vi - f - stable,
            n_upper: u + vs - vj - g,
        })
    }
}

/// Both inequality chains for the given `n`.
pub fn mori_check(params: &MoriParams, n: i128) -> Result<bool> {
    let b = params.bounds()?;
    Ok(b.u_lower_exclusive < b.u && b.u <= b.u_upper && b.n_lower <= n && n < b.n_upper)
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalRemark {
    pub params: MoriParams,
    pub bounds: MoriBounds,
    /// Positive `n` satisfying both chains, as an inclusive range.
    pub n_window: Option<(i128, i128)>,
    pub verdict: bool,
    /// `2(p-1)(p^p k + 1) + 1`, the dimension of `S³` receiving the class.
    pub target_dimension: u128,
}

/// `g = 0, f = p-2, i = p²k - 1, j = p^{p-2}`; every positive `n` in the
/// window is checked with [`mori_check`].
pub fn final_remark_instance(p: u32, k: u64) -> Result<FinalRemark> {
    PrimeContext::new(p)?;
    if k < 1 {
        return Err(LambdaError::Domain("k must be at least 1".into()));
    }
    let overflow = || LambdaError::Domain("parameters overflow".into());
    let pp = (p as u64).checked_pow(2).and_then(|x| x.checked_mul(k)).ok_or_else(overflow)?;
    let params = MoriParams::new(p, p - 2, 0, pp - 1, (p as u64).checked_pow(p - 2).ok_or_else(overflow)?)?;
    let bounds = params.bounds()?;
    let lo = bounds.n_lower.max(1);
    let hi = bounds.n_upper - 1;
    let n_window = (lo <= hi).then_some((lo, hi));
    let mut verdict = n_window.is_some();
    if let Some((a, b)) = n_window {
        for n in a..=b {
            verdict &= mori_check(&params, n)?;
        }
    }
    let ppk = (p as u128).checked_pow(p).and_then(|x| x.checked_mul(k as u128)).ok_or_else(overflow)?;
    let target_dimension = 2 * (p as u128 - 1) * (ppk + 1) + 1;
    Ok(FinalRemark { params, bounds, n_window, verdict, target_dimension })
}
