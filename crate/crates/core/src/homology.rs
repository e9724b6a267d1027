//! Differential matrices per bidegree and the E² page `ker d / im d`.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{basis, BasisKey, Ideal, Monomial};
use crate::cache::Cache;
use crate::differential::{d_monomial, SignConvention};
use crate::error::{LambdaError, Result};
use crate::fparith::{Fp, PrimeContext};
use crate::rewrite::{Element, Lambda};

/// Sparse matrix over F_p stored by columns; no explicit zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FpMatrix {
    rows: usize,
    cols: usize,
    columns: Vec<Vec<(usize, Fp)>>,
}

impl FpMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        FpMatrix { rows, cols, columns: vec![Vec::new(); cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.columns[i].push((i, Fp::ONE));
        }
        m
    }

    /// Builds from sparse columns; zero entries are dropped and rows sorted.
    pub fn from_columns(rows: usize, columns: Vec<Vec<(usize, Fp)>>) -> Result<Self> {
        let cols = columns.len();
        let mut out = Vec::with_capacity(cols);
        for mut c in columns {
            c.retain(|e| !e.1.is_zero());
            c.sort_unstable_by_key(|e| e.0);
            if c.iter().any(|e| e.0 >= rows) || c.windows(2).any(|w| w[0].0 == w[1].0) {
                return Err(LambdaError::Domain("matrix entry out of range or duplicated".into()));
            }
            out.push(c);
        }
        Ok(FpMatrix { rows, cols, columns: out })
    }

    pub fn from_dense(ctx: PrimeContext, rows: &[Vec<i64>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut columns = vec![Vec::new(); c];
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let x = ctx.reduce(*v);
                if !x.is_zero() {
                    columns[j].push((i, x));
                }
            }
        }
        FpMatrix { rows: r, cols: c, columns }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn column(&self, j: usize) -> &[(usize, Fp)] {
        &self.columns[j]
    }

    pub fn get(&self, i: usize, j: usize) -> Fp {
        self.columns[j].iter().find(|e| e.0 == i).map_or(Fp::ZERO, |e| e.1)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.nnz() == 0
    }

    pub fn to_dense(&self) -> Vec<Vec<Fp>> {
        let mut d = vec![vec![Fp::ZERO; self.cols]; self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for &(i, v) in c {
                d[i][j] = v;
            }
        }
        d
    }

    /// Entries as signed representatives, row-major.
    pub fn to_signed(&self, ctx: PrimeContext) -> Vec<Vec<i64>> {
        self.to_dense().into_iter().map(|r| r.into_iter().map(|x| ctx.symmetric(x)).collect()).collect()
    }

    /// `self · other`.
    pub fn mul(&self, other: &FpMatrix, ctx: PrimeContext) -> Result<FpMatrix> {
        if self.cols != other.rows {
            return Err(LambdaError::Domain(format!(
                "shape mismatch: {}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let columns = other
            .columns
            .iter()
            .map(|oc| {
                let mut acc: BTreeMap<usize, Fp> = BTreeMap::new();
                for &(k, b) in oc {
                    for &(i, a) in &self.columns[k] {
                        let e = acc.entry(i).or_insert(Fp::ZERO);
                        *e = ctx.add(*e, ctx.mul(a, b));
                    }
                }
                acc.into_iter().filter(|e| !e.1.is_zero()).collect()
            })
            .collect();
        Ok(FpMatrix { rows: self.rows, cols: other.cols, columns })
    }

    pub fn rank(&self, ctx: PrimeContext) -> usize {
        Echelon::of_columns(ctx, self.rows, self.columns.iter().map(|c| c.as_slice())).rank()
    }

    /// Basis of the null space, each vector of length `cols`.
    pub fn kernel(&self, ctx: PrimeContext) -> Vec<Vec<Fp>> {
        // Row reduce the transpose-free system A x = 0 column by column: track
        // which combinations of source columns reduce to zero.
        let mut ech = Echelon::new(ctx, self.rows);
        let mut kernel = Vec::new();
        for j in 0..self.cols {
            let mut v = vec![Fp::ZERO; self.rows];
            for &(i, x) in &self.columns[j] {
                v[i] = x;
            }
            let mut combo = vec![Fp::ZERO; self.cols];
            combo[j] = Fp::ONE;
            if let Some(c) = ech.insert_tracked(v, combo) {
                kernel.push(c);
            }
        }
        kernel
    }

    /// Determinant of a square matrix.
    pub fn det(&self, ctx: PrimeContext) -> Result<Fp> {
        if self.rows != self.cols {
            return Err(LambdaError::Domain("determinant of a non-square matrix".into()));
        }
        let mut a = self.to_dense();
        let n = self.rows;
        let mut det = Fp::ONE;
        for col in 0..n {
            let Some(piv) = (col..n).find(|&r| !a[r][col].is_zero()) else {
                return Ok(Fp::ZERO);
            };
            if piv != col {
                a.swap(piv, col);
                det = ctx.neg(det);
            }
            det = ctx.mul(det, a[col][col]);
            let inv = ctx.inv(a[col][col]).expect("pivot is nonzero");
            for r in col + 1..n {
                let f = ctx.mul(a[r][col], inv);
                if f.is_zero() {
                    continue;
                }
                for c in col..n {
                    let t = ctx.mul(f, a[col][c]);
                    a[r][c] = ctx.sub(a[r][c], t);
                }
            }
        }
        Ok(det)
    }
}

/// Incremental row echelon form over F_p. Each stored vector has a pivot
/// (its first nonzero entry) normalized to one.
pub struct Echelon {
    ctx: PrimeContext,
    dim: usize,
    pivots: HashMap<usize, usize>,
    rows: Vec<Vec<Fp>>,
    combos: Vec<Vec<Fp>>,
}

impl Echelon {
    pub fn new(ctx: PrimeContext, dim: usize) -> Self {
        Echelon { ctx, dim, pivots: HashMap::new(), rows: Vec::new(), combos: Vec::new() }
    }

    pub fn of_columns<'a>(ctx: PrimeContext, dim: usize, cols: impl Iterator<Item = &'a [(usize, Fp)]>) -> Self {
        let mut e = Echelon::new(ctx, dim);
        for c in cols {
            let mut v = vec![Fp::ZERO; dim];
            for &(i, x) in c {
                v[i] = x;
            }
            e.insert(v);
        }
        e
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    fn reduce_tracked(&self, v: &mut [Fp], combo: &mut Option<&mut Vec<Fp>>) {
        let ctx = self.ctx;
        for i in 0..self.dim {
            if v[i].is_zero() {
                continue;
            }
            if let Some(&r) = self.pivots.get(&i) {
                let f = v[i];
                for (x, y) in v.iter_mut().zip(&self.rows[r]).skip(i) {
                    *x = ctx.sub(*x, ctx.mul(f, *y));
                }
                if let Some(c) = combo.as_deref_mut() {
                    for (x, y) in c.iter_mut().zip(&self.combos[r]) {
                        *x = ctx.sub(*x, ctx.mul(f, *y));
                    }
                }
            }
        }
    }

    /// Reduces `v` against the stored rows; zero iff `v` is in the span.
    pub fn reduce(&self, v: &mut [Fp]) {
        self.reduce_tracked(v, &mut None);
    }

    pub fn contains(&self, v: &[Fp]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|x| x.is_zero())
    }

    /// Adds `v` to the span; returns whether the rank grew.
    pub fn insert(&mut self, v: Vec<Fp>) -> bool {
        let n = self.combos.first().map_or(0, Vec::len);
        self.insert_tracked(v, vec![Fp::ZERO; n]).is_none()
    }

    /// Like [`Echelon::insert`], carrying a combination vector along. If `v`
    /// reduces to zero, returns the combination that produced zero.
    fn insert_tracked(&mut self, mut v: Vec<Fp>, mut combo: Vec<Fp>) -> Option<Vec<Fp>> {
        let ctx = self.ctx;
        self.reduce_tracked(&mut v, &mut Some(&mut combo));
        let Some(piv) = v.iter().position(|x| !x.is_zero()) else {
            return Some(combo);
        };
        let inv = ctx.inv(v[piv]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        for x in combo.iter_mut() {
            *x = ctx.mul(*x, inv);
        }
        self.pivots.insert(piv, self.rows.len());
        self.rows.push(v);
        self.combos.push(combo);
        None
    }
}

/// Coordinates of an element in an ordered basis; `None` if some term lies
/// outside the basis.
pub fn coordinates(x: &Element, index: &HashMap<&Monomial, usize>, dim: usize) -> Option<Vec<Fp>> {
    let mut v = vec![Fp::ZERO; dim];
    for (m, c) in x.terms() {
        v[*index.get(m)?] = *c;
    }
    Some(v)
}

/// Matrix of `d` from the basis at `(m, l)` to the basis at `(m-1, l+1)`.
pub fn d_matrix(lambda: &Lambda, key: &BasisKey) -> Result<FpMatrix> {
    let src = basis(key);
    if key.m == 0 {
        return Ok(FpMatrix::zeros(0, src.len()));
    }
    let tgt = basis(&key.at(key.m - 1, key.l + 1));
    d_matrix_between(lambda, &src, &tgt)
}

pub fn d_matrix_between(lambda: &Lambda, src: &[Monomial], tgt: &[Monomial]) -> Result<FpMatrix> {
    let index: HashMap<&Monomial, usize> = tgt.iter().enumerate().map(|(i, m)| (m, i)).collect();
    let mut columns = Vec::with_capacity(src.len());
    for s in src {
        let dx = d_monomial(lambda, s, SignConvention::SELECTED)?;
        let mut col = Vec::with_capacity(dx.len());
        for (t, c) in dx.terms() {
            let i = index
                .get(t)
                .ok_or_else(|| LambdaError::Domain(format!("d({s}) has term {t} outside the target basis")))?;
            col.push((*i, *c));
        }
        columns.push(col);
    }
    FpMatrix::from_columns(tgt.len(), columns)
}

/// One cell of the E² page.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct E2Cell {
    pub p: u32,
    pub n: u32,
    pub ideal: Ideal,
    pub m: u32,
    pub l: u32,
    pub dim_e1: usize,
    pub dim_kernel: usize,
    pub dim_image_in: usize,
    pub dim_e2: usize,
    pub pi_index: i64,
}

/// Stem a class at degree `m` of `Λ(n)` contributes to: `m + 2n + 1`.
/// This is a bookkeeping convention, calibrated so that `λ_1` at `n = 1`
/// lands in `π_{2p}(S³)`.
pub fn pi_index(n: u32, m: u32) -> i64 {
    m as i64 + 2 * n as i64 + 1
}

#[derive(Debug, Clone)]
pub struct E2Request {
    pub n: u32,
    pub max_degree: u32,
    pub max_len: u32,
    pub ideal: Ideal,
    pub include_empty: bool,
    pub jobs: usize,
}

/// Default length cap for a sweep up to `max_degree`. In the λ ideal no word
/// contains `μ_0`, so every letter has degree at least `2p - 3`.
pub fn default_length_cap(ctx: PrimeContext, ideal: Ideal, max_degree: u32) -> u32 {
    match ideal {
        Ideal::Full => crate::algebra::default_length_cap(max_degree),
        Ideal::LambdaIdeal => (max_degree + 1) / (2 * ctx.p() - 3) + 1,
    }
}

fn cell_cache_key(ctx: PrimeContext, n: u32, m: u32, l: u32, ideal: Ideal) -> String {
    format!("e2cell/p={}/n={n}/m={m}/l={l}/ideal={}", ctx.p(), ideal.name())
}

fn out_rank(lambda: &Lambda, key: &BasisKey) -> Result<(usize, usize)> {
    let mat = d_matrix(lambda, key)?;
    Ok((mat.cols(), mat.rank(lambda.ctx())))
}

/// Computes the E² cells for every `(m, l)` with `m ≤ max_degree` and
/// `l ≤ max_len`, in `(m, l)` order.
pub fn e2_page(lambda: &Lambda, req: &E2Request, cache: Option<&Cache>) -> Result<Vec<E2Cell>> {
    let ctx = lambda.ctx();
    BasisKey::new(ctx, req.n, 0, 0, req.ideal)?;
    let cells: Vec<(u32, u32)> =
        (0..=req.max_degree).flat_map(|m| (0..=req.max_len).map(move |l| (m, l))).collect();

    let compute = |&(m, l): &(u32, u32)| -> Result<E2Cell> {
        let key = BasisKey::new(ctx, req.n, m, l, req.ideal)?;
        let run = || -> Result<E2Cell> {
            let (dim_e1, r_out) = out_rank(lambda, &key)?;
            let r_in = if l == 0 { 0 } else { out_rank(lambda, &key.at(m + 1, l - 1))?.1 };
            let dim_kernel = dim_e1 - r_out;
            Ok(E2Cell {
                p: ctx.p(),
                n: req.n,
                ideal: req.ideal,
                m,
                l,
                dim_e1,
                dim_kernel,
                dim_image_in: r_in,
                dim_e2: dim_kernel - r_in,
                pi_index: pi_index(req.n, m),
            })
        };
        match cache {
            Some(c) => c.get_or_compute(&cell_cache_key(ctx, req.n, m, l, req.ideal), run),
            None => run(),
        }
    };

    let results: Vec<Result<E2Cell>> = if req.jobs > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(req.jobs)
            .build()
            .map_err(|e| LambdaError::Domain(format!("thread pool: {e}")))?;
        pool.install(|| cells.par_iter().map(compute).collect())
    } else {
        cells.iter().map(compute).collect()
    };
    let mut out = Vec::new();
    for r in results {
        let c = r?;
        if req.include_empty || c.dim_e1 > 0 {
            out.push(c);
        }
    }
    Ok(out)
}

/// Is the class of the cycle `x` (a vector in the basis at `key`) nonzero,
/// i.e. not in the image of `d` from `(m+1, l-1)`?
pub fn is_nonzero_class(lambda: &Lambda, key: &BasisKey, x: &[Fp]) -> Result<bool> {
    if key.l == 0 {
        return Ok(x.iter().any(|c| !c.is_zero()));
    }
    let incoming = d_matrix(lambda, &key.at(key.m + 1, key.l - 1))?;
    let ech = Echelon::of_columns(lambda.ctx(), incoming.rows(), (0..incoming.cols()).map(|j| incoming.column(j)));
    Ok(!ech.contains(x))
}

pub const CSV_HEADER: &str = "p,n,ideal,m,l,dim_e1,dim_e2,pi_index";

pub fn to_csv(cells: &[E2Cell]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for c in cells {
        let _ = writeln!(s, "{},{},{},{},{},{},{},{}", c.p, c.n, c.ideal.name(), c.m, c.l, c.dim_e1, c.dim_e2, c.pi_index);
    }
    s
}

/// Length on the vertical axis (largest at the top), stem on the horizontal;
/// each position shows `dim_e2` (`.` for zero, `+` for ten or more). Several
/// cells can share a position only if they share `(pi_index, l)`, which
/// cannot happen for a fixed `n`.
pub fn render_chart(cells: &[E2Cell]) -> String {
    let nonzero: Vec<&E2Cell> = cells.iter().filter(|c| c.dim_e2 > 0).collect();
    if cells.is_empty() {
        return String::from("(empty)\n");
    }
    let min_x = cells.iter().map(|c| c.pi_index).min().unwrap();
    let max_x = cells.iter().map(|c| c.pi_index).max().unwrap();
    let max_l = nonzero.iter().map(|c| c.l).max().unwrap_or(0);
    let grid: HashMap<(i64, u32), usize> = nonzero.iter().map(|c| ((c.pi_index, c.l), c.dim_e2)).collect();
    let mut s = String::new();
    for l in (0..=max_l).rev() {
        let _ = write!(s, "{l:>3} |");
        for x in min_x..=max_x {
            let ch = match grid.get(&(x, l)) {
                None => '.',
                Some(&d) if d < 10 => char::from_digit(d as u32, 10).unwrap(),
                Some(_) => '+',
            };
            s.push(ch);
        }
        s.push('\n');
    }
    let width = (max_x - min_x + 1) as usize;
    let _ = writeln!(s, "    +{}", "-".repeat(width));
    let mut axis = String::new();
    let mut x = min_x;
    while x <= max_x {
        let label = x.to_string();
        if (x - min_x) % 10 == 0 {
            axis.push_str(&format!("{label:<10}"));
            x += 10;
        } else {
            axis.push(' ');
            x += 1;
        }
    }
    let _ = writeln!(s, "     {}", axis.trim_end());
    s
}
