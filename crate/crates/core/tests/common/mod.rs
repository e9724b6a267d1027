//! Reference implementations shared by the integration tests. Nothing here
//! calls the library's enumeration, rewriting or rank code; words are plain
//! `(is_mu, index)` pairs and linear algebra is dense.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use lambda_core::differential::{d_monomial, SignConvention};
use lambda_core::homology::{e2_page, E2Cell, E2Request};
use lambda_core::{Generator, Ideal, Lambda, Monomial};

pub type Letter = (bool, u32);
pub type Word = Vec<Letter>;

pub fn degree(p: u32, (mu, i): Letter) -> u32 {
    let s = 2 * (p - 1) * i;
    if mu {
        s
    } else {
        s - 1
    }
}

pub fn word_degree(p: u32, w: &[Letter]) -> u32 {
    w.iter().map(|&g| degree(p, g)).sum()
}

/// Is `a b` an admissible pair?
pub fn pair_ok(p: u32, a: Letter, b: Letter) -> bool {
    let limit = if a.0 { p * a.1 } else { p * a.1 - 1 };
    b.1 <= limit
}

pub fn admissible(p: u32, w: &[Letter]) -> bool {
    w.windows(2).all(|x| pair_ok(p, x[0], x[1]))
}

pub fn to_monomial(w: &[Letter]) -> Monomial {
    Monomial(w.iter().map(|&(mu, i)| if mu { Generator::mu(i) } else { Generator::lambda(i) }).collect())
}

pub fn alphabet(p: u32, max_degree: u32) -> Vec<Letter> {
    let mut out = Vec::new();
    for i in 0..=max_degree {
        if i >= 1 && degree(p, (false, i)) <= max_degree {
            out.push((false, i));
        }
        if degree(p, (true, i)) <= max_degree {
            out.push((true, i));
        }
    }
    out
}

/// All words over the alphabet with degree ≤ `max_degree` and length ≤
/// `max_len`, admissible or not.
pub fn free_words(p: u32, max_degree: u32, max_len: u32) -> Vec<Word> {
    let alpha = alphabet(p, max_degree);
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(Word, u32)> = vec![(Vec::new(), 0)];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for (w, dgr) in &frontier {
            for &g in &alpha {
                let nd = dgr + degree(p, g);
                if nd <= max_degree {
                    let mut v = w.clone();
                    v.push(g);
                    out.push(v.clone());
                    next.push((v, nd));
                }
            }
        }
        frontier = next;
    }
    out
}

/// Admissible words grouped by `(degree, length)`, with first index ≤ `n`
/// and, if `lambda_only`, last letter a λ. Extension is restricted to
/// admissible pairs so that `μ_0` tails stay bounded by `max_len`.
pub fn naive_basis(p: u32, n: u32, max_degree: u32, max_len: u32, lambda_only: bool) -> BTreeMap<(u32, u32), Vec<Word>> {
    let alpha = alphabet(p, max_degree);
    let mut out: BTreeMap<(u32, u32), Vec<Word>> = BTreeMap::new();
    let mut stack: Vec<Word> = vec![Vec::new()];
    while let Some(w) = stack.pop() {
        let dgr = word_degree(p, &w);
        let keep = match w.first() {
            None => !lambda_only,
            Some(f) => f.1 <= n && (!lambda_only || !w.last().unwrap().0),
        };
        if keep {
            out.entry((dgr, w.len() as u32)).or_default().push(w.clone());
        }
        if w.len() as u32 == max_len {
            continue;
        }
        for &g in &alpha {
            if dgr + degree(p, g) > max_degree {
                continue;
            }
            if let Some(&last) = w.last() {
                if !pair_ok(p, last, g) {
                    continue;
                }
            } else if g.1 > n {
                continue;
            }
            let mut v = w.clone();
            v.push(g);
            stack.push(v);
        }
    }
    for v in out.values_mut() {
        v.sort_by_key(|w| to_monomial(w));
    }
    out
}

/// Rank over F_p by dense Gaussian elimination.
pub fn dense_rank(p: u32, mut rows: Vec<Vec<u32>>) -> usize {
    let p = p as u64;
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..rows.len()).find(|&r| rows[r][c] != 0) else {
            continue;
        };
        rows.swap(rank, piv);
        let inv = pow_mod(rows[rank][c] as u64, p - 2, p);
        for x in rows[rank].iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && row[c] != 0 {
                let f = row[c] as u64;
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x = ((*x as u64 + p * p - f * *y as u64 % p) % p) as u32;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    r
}

/// Dense matrix of `d` from the words at `(m, l)` to those at `(m-1, l+1)`,
/// one row per source word.
fn d_rows(lambda: &Lambda, src: &[Word], tgt: &[Word]) -> Vec<Vec<u32>> {
    let index: HashMap<Monomial, usize> = tgt.iter().enumerate().map(|(i, w)| (to_monomial(w), i)).collect();
    src.iter()
        .map(|w| {
            let mut row = vec![0u32; tgt.len()];
            let dw = d_monomial(lambda, &to_monomial(w), SignConvention::SELECTED).unwrap();
            for (t, c) in dw.terms() {
                let i = *index.get(t).unwrap_or_else(|| panic!("d({t:?}) leaves the subcomplex"));
                row[i] = c.value();
            }
            row
        })
        .collect()
}

/// `(dim_e1, dim_kernel, dim_image_in, dim_e2)` per cell of `Λλ(n)`,
/// for `m ≤ max_degree`, `l ≤ max_len`.
pub fn naive_e2(lambda: &Lambda, n: u32, max_degree: u32, max_len: u32) -> BTreeMap<(u32, u32), [usize; 4]> {
    let p = lambda.ctx().p();
    let b = naive_basis(p, n, max_degree + 1, max_len + 1, true);
    let empty = Vec::new();
    let get = |m: u32, l: u32| b.get(&(m, l)).unwrap_or(&empty);
    let rank = |m: u32, l: u32| -> usize {
        if m == 0 {
            return 0;
        }
        let (src, tgt) = (get(m, l), get(m - 1, l + 1));
        if src.is_empty() || tgt.is_empty() {
            return 0;
        }
        dense_rank(p, d_rows(lambda, src, tgt))
    };
    let mut out = BTreeMap::new();
    for m in 0..=max_degree {
        for l in 0..=max_len {
            let dim = get(m, l).len();
            let kernel = dim - rank(m, l);
            let image = if l == 0 { 0 } else { rank(m + 1, l - 1) };
            out.insert((m, l), [dim, kernel, image, kernel - image]);
        }
    }
    out
}

/// Cells of `e2_page` and the naive computation that disagree.
pub fn e2_mismatches(lambda: &Lambda, n: u32, max_degree: u32, max_len: u32) -> (usize, Vec<String>) {
    let req = E2Request { n, max_degree, max_len, ideal: Ideal::LambdaIdeal, include_empty: true, jobs: 1 };
    let fast: Vec<E2Cell> = e2_page(lambda, &req, None).unwrap();
    let slow = naive_e2(lambda, n, max_degree, max_len);
    let mut bad = Vec::new();
    if fast.len() != slow.len() {
        bad.push(format!("cell count {} vs {}", fast.len(), slow.len()));
    }
    for c in &fast {
        let got = [c.dim_e1, c.dim_kernel, c.dim_image_in, c.dim_e2];
        let want = slow.get(&(c.m, c.l)).copied();
        if Some(got) != want || c.pi_index != (c.m + 2 * n + 1) as i64 {
            bad.push(format!("n={n} (m={}, l={}): {got:?} vs {want:?}", c.m, c.l));
        }
    }
    (fast.len(), bad)
}

/// Normal forms in the quotient of the free algebra by the relation ideal.
///
/// `reduce` rewrites the leftmost inadmissible pair. `ideal_violations`
/// checks that every spanning element `u·(ab - rhs(ab))·v` of the ideal
/// maps to zero, which makes `reduce` the quotient projection onto the
/// admissible words regardless of which pair is rewritten first.
pub struct QuotientOracle {
    pub p: u32,
    binom: Vec<Vec<u32>>,
    memo: HashMap<Word, Vec<(Word, u32)>>,
}

impl QuotientOracle {
    pub fn new(p: u32) -> Self {
        let size = 400;
        let mut binom = vec![vec![0u32; size]; size];
        for n in 0..size {
            binom[n][0] = 1;
            for k in 1..=n {
                binom[n][k] = (binom[n - 1][k - 1] + binom[n - 1][k]) % p;
            }
        }
        QuotientOracle { p, binom, memo: HashMap::new() }
    }

    fn c(&self, n: i64, k: i64) -> u32 {
        if n < 0 || k < 0 || k > n {
            0
        } else {
            self.binom[n as usize][k as usize]
        }
    }

    fn signed(&self, negative: bool, v: u32) -> u32 {
        if negative && v != 0 {
            self.p - v
        } else {
            v
        }
    }

    fn a(&self, k: i64, j: i64) -> u32 {
        self.signed(j % 2 == 0, self.c((self.p as i64 - 1) * (k - j) - 1, j))
    }

    fn b(&self, k: i64, j: i64) -> u32 {
        self.signed(j % 2 == 1, self.c((self.p as i64 - 1) * (k - j), j))
    }

    /// Right-hand side of the relation for an inadmissible pair.
    pub fn relation(&self, x: Letter, y: Letter) -> Vec<(u32, Letter, Letter)> {
        let p = self.p as i64;
        let (i, c) = (x.1 as i64, y.1 as i64);
        let n_of = |k: i64| (k * (p - 1) - 1).div_euclid(p);
        let n_prime = |k: i64| (k * (p - 1)).div_euclid(p);
        let mut out = Vec::new();
        let l = |t: i64| (false, t as u32);
        let m = |t: i64| (true, t as u32);
        match (x.0, y.0) {
            (false, false) => {
                let k = c - p * i;
                for j in 0..=n_of(k) {
                    out.push((self.a(k, j), l(i + k - j), l(p * i + j)));
                }
            }
            (false, true) => {
                let k = c - p * i;
                for j in 0..=n_of(k) {
                    out.push((self.a(k, j), l(i + k - j), m(p * i + j)));
                }
                for j in 0..=n_prime(k) {
                    out.push((self.b(k, j), m(i + k - j), l(p * i + j)));
                }
            }
            (true, false) => {
                let k = c - p * i - 1;
                for j in 0..=n_of(k) {
                    out.push((self.a(k, j), m(i + k - j), l(p * i + j + 1)));
                }
            }
            (true, true) => {
                let k = c - p * i - 1;
                for j in 0..=n_of(k) {
                    out.push((self.a(k, j), m(i + k - j), m(p * i + j + 1)));
                }
            }
        }
        out.retain(|t| t.0 != 0);
        out
    }

    fn add_into(&self, acc: &mut BTreeMap<Word, u32>, w: Word, c: u32) {
        let e = acc.entry(w).or_insert(0);
        *e = (*e + c) % self.p;
    }

    fn finish(acc: BTreeMap<Word, u32>) -> Vec<(Word, u32)> {
        acc.into_iter().filter(|t| t.1 != 0).collect()
    }

    /// Normal form of one word.
    pub fn reduce(&mut self, w: &[Letter]) -> Vec<(Word, u32)> {
        if let Some(hit) = self.memo.get(w) {
            return hit.clone();
        }
        let pos = (0..w.len().saturating_sub(1)).find(|&i| !pair_ok(self.p, w[i], w[i + 1]));
        let result = match pos {
            None => vec![(w.to_vec(), 1)],
            Some(i) => {
                let mut acc = BTreeMap::new();
                for (c, x, y) in self.relation(w[i], w[i + 1]) {
                    let mut v = w[..i].to_vec();
                    v.push(x);
                    v.push(y);
                    v.extend_from_slice(&w[i + 2..]);
                    for (t, e) in self.reduce(&v) {
                        self.add_into(&mut acc, t, c * e % self.p);
                    }
                }
                Self::finish(acc)
            }
        };
        self.memo.insert(w.to_vec(), result.clone());
        result
    }

    /// Words `w` and positions `i` at which `reduce(w) ≠ reduce(w with the
    /// pair at i replaced by its relation)`.
    pub fn ideal_violations(&mut self, words: &[Word]) -> Vec<(Word, usize)> {
        let mut bad = Vec::new();
        for w in words {
            let lhs = self.reduce(w);
            for i in 0..w.len().saturating_sub(1) {
                if pair_ok(self.p, w[i], w[i + 1]) {
                    continue;
                }
                let mut acc = BTreeMap::new();
                for (c, x, y) in self.relation(w[i], w[i + 1]) {
                    let mut v = w[..i].to_vec();
                    v.push(x);
                    v.push(y);
                    v.extend_from_slice(&w[i + 2..]);
                    for (t, e) in self.reduce(&v) {
                        self.add_into(&mut acc, t, c * e % self.p);
                    }
                }
                if Self::finish(acc) != lhs {
                    bad.push((w.clone(), i));
                }
            }
        }
        bad
    }
}

/// Outcome of comparing the engine's products with the quotient oracle.
#[derive(Debug, Default)]
pub struct StraighteningReport {
    pub free_words: usize,
    pub ideal_violations: usize,
    pub products: usize,
    pub mismatches: Vec<String>,
}

/// Every product `x·y` of admissible words with `deg x + deg y ≤ max_degree`
/// and `len x + len y ≤ max_len`, checked against the oracle.
pub fn straightening_check(lambda: &Lambda, max_degree: u32, max_len: u32) -> StraighteningReport {
    let p = lambda.ctx().p();
    let mut oracle = QuotientOracle::new(p);
    let words = free_words(p, max_degree, max_len);
    let mut report = StraighteningReport { free_words: words.len(), ..Default::default() };
    report.ideal_violations = oracle.ideal_violations(&words).len();
    let adm: Vec<&Word> = words.iter().filter(|w| admissible(p, w)).collect();
    for x in &adm {
        let ex = lambda_core::Element::monomial(lambda.ctx(), to_monomial(x));
        let dx = word_degree(p, x);
        for y in &adm {
            if dx + word_degree(p, y) > max_degree || x.len() + y.len() > max_len as usize {
                continue;
            }
            let ey = lambda_core::Element::monomial(lambda.ctx(), to_monomial(y));
            let got: Vec<(Monomial, u32)> =
                lambda.multiply(&ex, &ey).unwrap().terms().iter().map(|(m, c)| (m.clone(), c.value())).collect();
            let mut xy = (*x).clone();
            xy.extend_from_slice(y);
            let mut want: Vec<(Monomial, u32)> = oracle.reduce(&xy).into_iter().map(|(w, c)| (to_monomial(&w), c)).collect();
            want.sort();
            report.products += 1;
            if got != want {
                report.mismatches.push(format!("{} * {}", to_monomial(x), to_monomial(y)));
            }
        }
    }
    report
}
