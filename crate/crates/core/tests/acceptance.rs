//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always visible. The
//! process exits non-zero if any check finds a counterexample. A criterion
//! whose stated range was not fully covered is reported as
//! `FAIL (incomplete)` without affecting the exit status; set
//! `LAMBDA_ACCEPTANCE_FULL=1` to attempt the full ranges.

mod common;

use std::time::{Duration, Instant};

use lambda_core::coverage::{certify_dimension, final_remark_instance};
use lambda_core::differential::{check_square_zero, derivation_certificate, identity_table, SignConvention};
use lambda_core::homology::{coordinates, default_length_cap, is_nonzero_class, pi_index};
use lambda_core::hopf::{chain_map_failures, lemma_matrix, lemma_verdict, proposition_check, ses_dimension_check};
use lambda_core::{basis, differential, BasisKey, Element, Generator, Ideal, Lambda, Monomial, PrimeContext};

#[derive(PartialEq)]
enum Status {
    Pass,
    Fail,
    Incomplete,
}

struct Outcome {
    status: Status,
    detail: String,
}

fn pass_if(ok: bool, detail: String) -> Outcome {
    Outcome { status: if ok { Status::Pass } else { Status::Fail }, detail }
}

fn lam(p: u32) -> Lambda {
    Lambda::new(PrimeContext::new(p).unwrap())
}

fn full_mode() -> bool {
    std::env::var("LAMBDA_ACCEPTANCE_FULL").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn identities() -> Outcome {
    let mut bad = Vec::new();
    for p in [3, 5, 7] {
        for (label, got, want) in identity_table(&lam(p), SignConvention::SELECTED).unwrap() {
            if got != want {
                bad.push(format!("p={p}: {label} (got {got})"));
            }
        }
    }
    pass_if(bad.is_empty(), format!("11 identities x p in {{3,5,7}}, {} mismatches {bad:?}", bad.len()))
}

fn square_zero() -> Outcome {
    let targets = [(3u32, 60u32), (5, 80)];
    let sweeps: Vec<(u32, u32)> = if full_mode() { targets.to_vec() } else { vec![(3, 30), (5, 60)] };
    let mut notes = Vec::new();
    let mut violation = false;
    for (&(p, target), &(_, deg)) in targets.iter().zip(&sweeps) {
        let l = lam(p);
        let len = 2 * deg;
        let mut passing = Vec::new();
        for sign in SignConvention::ALL {
            let (n, f) = check_square_zero(&l, 2 * p, deg, len, sign, 1).unwrap();
            l.clear_caches();
            if f.is_empty() {
                passing.push(sign);
            }
            notes.push(format!("p={p} {sign:?}: {n} words to deg {deg}, len {len}, {}", if f.is_empty() { "clean" } else { "fails" }));
        }
        if passing != [SignConvention::SELECTED] {
            violation = true;
        }
        let cert = derivation_certificate(&l, target).unwrap();
        violation |= !cert.holds();
        notes.push(format!(
            "p={p} generator/relation certificate to deg {target}: {} ({} generators, {} relations)",
            if cert.holds() { "holds" } else { "fails" },
            cert.generators_checked,
            cert.relations_checked
        ));
    }
    let complete = sweeps == targets;
    let status = if violation {
        Status::Fail
    } else if complete {
        Status::Pass
    } else {
        Status::Incomplete
    };
    if !complete {
        notes.push("exhaustive sweep stopped below deg 60 (p=3) / 80 (p=5); see README".into());
    }
    Outcome { status, detail: notes.join("; ") }
}

fn straightening() -> Outcome {
    let (deg, len) = (24, 12);
    let r = common::straightening_check(&lam(3), deg, len);
    pass_if(
        r.ideal_violations == 0 && r.mismatches.is_empty() && r.products > 0,
        format!(
            "p=3, deg <= {deg}, total length <= {len}: {} free words, {} ideal violations, {} products, {} mismatches",
            r.free_words,
            r.ideal_violations,
            r.products,
            r.mismatches.len()
        ),
    )
}

fn lemma() -> Outcome {
    let mut bad = Vec::new();
    let mut count = 0;
    for p in [3, 5, 7] {
        let l = lam(p);
        let ctx = l.ctx();
        for k in 1..=40u32 {
            count += 1;
            if lemma_matrix(&l, k).is_err() {
                bad.push(format!("p={p} k={k}: residual outside span(v)"));
                continue;
            }
            let size = k as usize + 1;
            let expected: Vec<Vec<i64>> = (0..size)
                .map(|i| {
                    (0..size)
                        .map(|j| {
                            let x = match i.abs_diff(j) {
                                0 => -2,
                                1 => 1,
                                _ => 0,
                            };
                            ctx.symmetric(ctx.reduce(x))
                        })
                        .collect()
                })
                .collect();
            let v = lemma_verdict(&l, k).unwrap();
            let iso_expected = (k + 2) % p != 0;
            if v.matrix != expected || v.det != v.det_formula || v.is_isomorphism != iso_expected {
                bad.push(format!("p={p} k={k}"));
            }
        }
    }
    pass_if(bad.is_empty(), format!("{count} cases (p in {{3,5,7}}, 1 <= k <= 40), failures {bad:?}"))
}

fn hopf() -> Outcome {
    let (deg, len) = (40, 80);
    let l = lam(3);
    let ses = ses_dimension_check(l.ctx(), deg, len).unwrap();
    let (checked, bad) = chain_map_failures(&l, deg, len, SignConvention::SELECTED).unwrap();
    l.clear_caches();
    pass_if(
        ses.failures.is_empty() && bad.is_empty(),
        format!(
            "p=3, m <= {deg}, l <= {len}: SES {} cells / {} failures; chain map {checked} words / {} failures",
            ses.cells_checked,
            ses.failures.len(),
            bad.len()
        ),
    )
}

fn proposition() -> Outcome {
    let l = lam(3);
    let mut parts = Vec::new();
    let mut ok = true;
    for k in [2, 4, 5] {
        let r = proposition_check(&l, k).unwrap();
        ok &= !r.verdict;
        parts.push(format!("k={k}: {}", r.verdict));
    }
    pass_if(ok, format!("p=3 verdicts {}", parts.join(", ")))
}

fn toda() -> Outcome {
    let l = lam(3);
    let ctx = l.ctx();
    let mut parts = Vec::new();
    let mut ok = true;
    for k in 1..=6u32 {
        let mut w = vec![Generator::mu(1); k as usize - 1];
        w.push(Generator::lambda(1));
        let mono = Monomial(w);
        let x = Element::monomial(ctx, mono.clone());
        let (m, len) = (mono.degree(ctx), k);
        let key = BasisKey::new(ctx, 1, m, len, Ideal::LambdaIdeal).unwrap();
        let b = basis(&key);
        let index = b.iter().enumerate().map(|(i, w)| (w, i)).collect();
        let cycle = differential::is_cycle(&l, &x).unwrap();
        let nonzero = coordinates(&x, &index, b.len()).is_some_and(|v| is_nonzero_class(&l, &key, &v).unwrap());
        let stem = pi_index(1, m);
        ok &= cycle && nonzero && stem == 4 * k as i64 + 2;
        parts.push(format!("k={k} stem {stem}: {}", if cycle && nonzero { "nonzero" } else { "MISSING" }));
    }
    pass_if(ok, parts.join(", "))
}

fn e2_oracle() -> Outcome {
    let l = lam(3);
    let cap = default_length_cap(l.ctx(), Ideal::LambdaIdeal, 30);
    let mut cells = 0;
    let mut bad = Vec::new();
    for n in 1..=3 {
        let (c, b) = common::e2_mismatches(&l, n, 30, cap);
        cells += c;
        bad.extend(b);
    }
    pass_if(bad.is_empty(), format!("p=3, n in {{1,2,3}}, m <= 30, l <= {cap}: {cells} cells, mismatches {bad:?}"))
}

fn coverage() -> Outcome {
    let t = Instant::now();
    let mut bad = Vec::new();
    for n in 2..=1_000_000u64 {
        match certify_dimension(n) {
            Ok(c) if c.validate() && c.n == n => {}
            _ => bad.push(n),
        }
    }
    let elapsed = t.elapsed();
    pass_if(
        bad.is_empty() && elapsed < Duration::from_secs(5),
        format!("2 <= n <= 10^6 in {elapsed:.2?} (limit 5s), {} failures", bad.len()),
    )
}

fn final_remark() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (p, k) in [(3, 1), (3, 2), (3, 3), (5, 1)] {
        let r = final_remark_instance(p, k).unwrap();
        ok &= r.verdict && r.n_window.is_some();
        parts.push(format!("({p},{k}): window {:?}, verdict {}", r.n_window, r.verdict));
    }
    pass_if(ok, parts.join("; "))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome, Option<Duration>); 10] = [
        ("identities", identities, Some(Duration::from_secs(1))),
        ("square zero", square_zero, None),
        ("straightening oracle", straightening, None),
        ("lemma matrices", lemma, Some(Duration::from_secs(60))),
        ("hopf ses + chain map", hopf, None),
        ("proposition spot-check", proposition, None),
        ("toda classes", toda, None),
        ("e2 vs dense oracle", e2_oracle, None),
        ("coverage totality", coverage, None),
        ("final-remark instances", final_remark, None),
    ];
    let mut violations = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let mut outcome = run();
        let elapsed = t.elapsed();
        if let Some(limit) = limit {
            if elapsed > *limit && outcome.status == Status::Pass {
                outcome.status = Status::Fail;
                outcome.detail.push_str(&format!("; exceeded {limit:?}"));
            }
        }
        let tag = match outcome.status {
            Status::Pass => "PASS",
            Status::Fail => {
                violations += 1;
                "FAIL"
            }
            Status::Incomplete => "FAIL (incomplete)",
        };
        println!("criterion {:>2} {name}: {tag} [{elapsed:.2?}] {}", i + 1, outcome.detail);
    }
    if violations > 0 {
        std::process::exit(1);
    }
}
