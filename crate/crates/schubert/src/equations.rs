//! Local coordinates on the flag variety, the submatrices M_ij, rank
//! condition systems, symbolic minors and a finite-field solution oracle.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::poly::{Polynomial, Var};
use crate::rank::RankMatrix;

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    /// Rank conditions at pillar positions only.
    Pillar,
    /// Rank conditions at all positions 1 <= i,j <= n-1.
    All,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Semantics {
    /// rank(M_ij) = i - r_ij: the Schubert cell.
    Cell,
    /// rank(M_ij) <= i - r_ij: the Schubert variety.
    Variety,
}

/// Strictly-lower-triangular coordinates of a unitriangular matrix over
/// F_q, stored in lexicographic (i, j) order.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CoordinatePoint {
    n: usize,
    q: u64,
    coords: Vec<u64>,
}

/// Variables x_{ij}, 1 <= j < i <= n, in lexicographic order; also the
/// digit order of the point enumeration.
pub fn coordinate_vars(n: usize) -> Vec<Var> {
    let mut vs = Vec::with_capacity(n * (n - 1) / 2);
    for i in 2..=n {
        for j in 1..i {
            vs.push((i as u8, j as u8));
        }
    }
    vs
}

impl CoordinatePoint {
    pub fn new(n: usize, q: u64, coords: Vec<u64>) -> Result<Self> {
        if coords.len() != n * (n - 1) / 2 {
            return Err(Error::IndexOutOfRange(format!(
                "expected {} coordinates, got {}",
                n * (n - 1) / 2,
                coords.len()
            )));
        }
        if coords.iter().any(|&c| c >= q) {
            return Err(Error::IndexOutOfRange(format!("coordinate not reduced mod {q}")));
        }
        Ok(CoordinatePoint { n, q, coords })
    }

    pub fn zero(n: usize, q: u64) -> Self {
        CoordinatePoint {
            n,
            q,
            coords: vec![0; n * (n - 1) / 2],
        }
    }

    /// Point number `index` in the mixed-radix little-endian enumeration:
    /// the first coordinate is the fastest digit.
    pub fn from_index(n: usize, q: u64, index: u64) -> Self {
        let d = n * (n - 1) / 2;
        let mut coords = Vec::with_capacity(d);
        let mut rest = index;
        for _ in 0..d {
            coords.push(rest % q);
            rest /= q;
        }
        CoordinatePoint { n, q, coords }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Value of x_{ij}; diagonal gives 1, above-diagonal gives 0.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        if i == j {
            return 1 % self.q;
        }
        if i < j {
            return 0;
        }
        // lex position of (i, j) among the strictly lower coordinates
        let idx = (i - 1) * (i - 2) / 2 + (j - 1);
        self.coords[idx]
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

/// Entry (r, c) of M_ij (1-based within the block): x_{(j+r), c} under
/// the unitriangular convention. Shape: (n-j) rows, i columns.
pub fn submatrix(i: usize, j: usize, n: usize) -> Result<Vec<Vec<Polynomial>>> {
    if !(1..n).contains(&i) || !(1..n).contains(&j) {
        return Err(Error::IndexOutOfRange(format!(
            "submatrix M_{i},{j} needs 1 <= i,j <= {}",
            n - 1
        )));
    }
    let mut m = Vec::with_capacity(n - j);
    for r in 1..=n - j {
        let mut row = Vec::with_capacity(i);
        let k = j + r;
        for c in 1..=i {
            row.push(match k.cmp(&c) {
                std::cmp::Ordering::Greater => Polynomial::var(k as u8, c as u8),
                std::cmp::Ordering::Equal => Polynomial::constant(1),
                std::cmp::Ordering::Less => Polynomial::zero(),
            });
        }
        m.push(row);
    }
    Ok(m)
}

fn numeric_submatrix(point: &CoordinatePoint, i: usize, j: usize) -> Vec<Vec<u64>> {
    let n = point.n;
    (1..=n - j)
        .map(|r| (1..=i).map(|c| point.get(j + r, c)).collect())
        .collect()
}

/// Rank over F_q by Gaussian elimination; q prime.
pub fn rank_mod_q(mut m: Vec<Vec<u64>>, q: u64) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows).find(|&r| m[r][c] % q != 0) else {
            continue;
        };
        m.swap(rank, pivot);
        let inv = mod_inverse(m[rank][c] % q, q);
        for r in rank + 1..rows {
            let factor = m[r][c] % q * inv % q;
            if factor != 0 {
                for cc in c..cols {
                    m[r][cc] = (m[r][cc] + (q - factor) * m[rank][cc]) % q;
                }
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

fn mod_inverse(a: u64, q: u64) -> u64 {
    // q prime, a != 0: Fermat
    let mut result = 1u64;
    let mut base = a % q;
    let mut e = q - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % q;
        }
        base = base * base % q;
        e >>= 1;
    }
    result
}

fn scope_positions(r: &RankMatrix, scope: Scope) -> Vec<(usize, usize)> {
    let n = r.n();
    match scope {
        Scope::Pillar => r.pillar_entries().iter().map(|p| (p.row, p.col)).collect(),
        Scope::All => (1..n).flat_map(|i| (1..n).map(move |j| (i, j))).collect(),
    }
}

/// Lemma-level membership test: cell semantics requires rank(M_ij) equal
/// to i - r_ij at every position in scope, variety semantics at most.
pub fn rank_condition_holds(
    point: &CoordinatePoint,
    w: &Permutation,
    scope: Scope,
    semantics: Semantics,
) -> bool {
    let r = RankMatrix::from_permutation(w);
    for (i, j) in scope_positions(&r, scope) {
        let bound = i as i64 - r.get(i, j) as i64;
        let rk = rank_mod_q(numeric_submatrix(point, i, j), point.q) as i64;
        let ok = match semantics {
            Semantics::Cell => rk == bound,
            Semantics::Variety => rk <= bound,
        };
        if !ok {
            return false;
        }
    }
    true
}

/// Rank matrix read off a point: r_ij = i - rank(M_ij), boundary rows and
/// columns forced by the axioms.
pub fn rank_matrix_from_point(point: &CoordinatePoint) -> Result<RankMatrix> {
    let n = point.n;
    let mut entries = vec![0i16; (n + 1) * (n + 1)];
    for k in 0..=n {
        entries[k * (n + 1) + n] = k as i16;
        entries[n * (n + 1) + k] = k as i16;
    }
    for i in 1..n {
        for j in 1..n {
            entries[i * (n + 1) + j] =
                i as i16 - rank_mod_q(numeric_submatrix(point, i, j), point.q) as i16;
        }
    }
    RankMatrix::from_entries(n, entries)
}

/// One rank condition with its symbolic generators.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RankCondition {
    pub position: (usize, usize),
    /// Required rank bound i - r_ij.
    pub bound: usize,
    /// All minors of M_ij of size bound + 1; empty when the bound is not
    /// a real constraint.
    pub generators: Vec<Polynomial>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MinorSystem {
    pub w: Permutation,
    pub scope: Scope,
    pub conditions: Vec<RankCondition>,
}

impl MinorSystem {
    pub fn generators(&self) -> Vec<&Polynomial> {
        self.conditions.iter().flat_map(|c| c.generators.iter()).collect()
    }

    /// True when every generator is homogeneous linear, i.e. the zero set
    /// is a linear subspace on the nose.
    pub fn is_linear(&self) -> bool {
        self.generators().iter().all(|g| g.degree().unwrap_or(0) <= 1 && {
            g.lowest_degree() != Some(0)
        })
    }

    /// Union of variables occurring in the generators.
    pub fn variables(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self.generators().iter().flat_map(|g| g.vars()).collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }
}

pub fn minor_system(w: &Permutation, scope: Scope) -> MinorSystem {
    let r = RankMatrix::from_permutation(w);
    let n = r.n();
    let conditions = scope_positions(&r, scope)
        .into_iter()
        .map(|(i, j)| {
            let bound = (i as i64 - r.get(i, j) as i64) as usize;
            let m = submatrix(i, j, n).expect("positions are interior");
            let generators = if bound + 1 > (n - j).min(i) {
                Vec::new()
            } else {
                all_minors(&m, bound + 1)
            };
            RankCondition {
                position: (i, j),
                bound,
                generators,
            }
        })
        .collect();
    MinorSystem {
        w: w.clone(),
        scope,
        conditions,
    }
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

/// Determinant of the square symbolic matrix by Laplace expansion along
/// columns, memoized on (column index, remaining-row mask).
pub fn symbolic_det(m: &[Vec<Polynomial>]) -> Polynomial {
    let k = m.len();
    assert!(k <= 64 && m.iter().all(|r| r.len() == k));
    let mut memo: HashMap<(usize, u64), Polynomial> = HashMap::new();
    fn rec(
        m: &[Vec<Polynomial>],
        col: usize,
        rowmask: u64,
        memo: &mut HashMap<(usize, u64), Polynomial>,
    ) -> Polynomial {
        if col == m.len() {
            return Polynomial::constant(1);
        }
        if let Some(cached) = memo.get(&(col, rowmask)) {
            return cached.clone();
        }
        let mut acc = Polynomial::zero();
        let mut sign = 1i64;
        for r in 0..m.len() {
            if rowmask >> r & 1 == 0 {
                continue;
            }
            if !m[r][col].is_zero() {
                let sub = rec(m, col + 1, rowmask & !(1 << r), memo);
                acc = acc.add(&m[r][col].mul(&sub).scale(sign));
            }
            sign = -sign;
        }
        memo.insert((col, rowmask), acc.clone());
        acc
    }
    rec(m, 0, (1u64 << k) - 1, &mut memo)
}

fn minor_of(m: &[Vec<Polynomial>], rows: &[usize], cols: &[usize]) -> Polynomial {
    let sub: Vec<Vec<Polynomial>> = rows
        .iter()
        .map(|&r| cols.iter().map(|&c| m[r][c].clone()).collect())
        .collect();
    symbolic_det(&sub)
}

/// All size-k minors, row sets outer, column sets inner, lexicographic.
pub fn all_minors(m: &[Vec<Polynomial>], k: usize) -> Vec<Polynomial> {
    let rows = m.len();
    let cols = if rows == 0 { 0 } else { m[0].len() };
    let mut out = Vec::new();
    for rs in combinations(rows, k) {
        for cs in combinations(cols, k) {
            out.push(minor_of(m, &rs, &cs));
        }
    }
    out
}

/// Size-r minors of M_ij that use all of the last i-j columns and all of
/// the first i-j rows (the ones meeting the unit block) have lowest-degree
/// part equal, up to sign, to the size-(r-i+j) minor of M_ji picked out by
/// the complementary rows and columns; the correspondence is a bijection
/// onto the size-(r-i+j) minors of M_ji.
pub fn duality_check(i: usize, j: usize, n: usize, r: usize) -> Result<bool> {
    if i <= j || j < 1 || i > n - 1 {
        return Err(Error::IndexOutOfRange(format!(
            "duality needs 1 <= j < i <= {}",
            n - 1
        )));
    }
    let d = i - j;
    if r < d || r > (n - j).min(i) {
        return Err(Error::IndexOutOfRange(format!(
            "minor size {r} outside {d}..={}",
            (n - j).min(i)
        )));
    }
    let big = submatrix(i, j, n)?;
    let small_size = r - d;
    let mut seen: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    // extra rows come from rows d.. (0-based), extra cols from cols 0..j
    for extra_rows in combinations(n - j - d, small_size) {
        for extra_cols in combinations(j, small_size) {
            let mut rows: Vec<usize> = (0..d).collect();
            rows.extend(extra_rows.iter().map(|&a| a + d));
            let mut cols: Vec<usize> = extra_cols.clone();
            cols.extend(i - d..i);
            cols.sort_unstable();
            let low = minor_of(&big, &rows, &cols).lowest_degree_part();
            let counterpart = if small_size == 0 {
                Polynomial::constant(1)
            } else {
                let small = submatrix(j, i, n)?;
                minor_of(&small, &extra_rows, &extra_cols)
            };
            if low != counterpart && low != counterpart.neg() {
                return Ok(false);
            }
            seen.push((extra_rows.clone(), extra_cols.clone()));
        }
    }
    // the correspondence must exhaust the small minors exactly once
    let expected = combinations(n - i, small_size).len() * combinations(j, small_size).len();
    seen.sort();
    seen.dedup();
    Ok(seen.len() == expected)
}

pub const DEFAULT_POINT_BUDGET: u64 = 400_000_000;

fn sweep_size(n: usize, q: u64, budget: u64) -> Result<u64> {
    let d = n * (n - 1) / 2;
    let mut total: u64 = 1;
    for _ in 0..d {
        total = total
            .checked_mul(q)
            .filter(|&t| t <= budget)
            .ok_or_else(|| {
                Error::ResourceLimit(format!("sweep {q}^{d} exceeds budget {budget}"))
            })?;
    }
    Ok(total)
}

/// Exact number of F_q points satisfying the rank conditions.
pub fn count_solutions(
    w: &Permutation,
    q: u64,
    scope: Scope,
    semantics: Semantics,
    budget: u64,
) -> Result<u64> {
    let n = w.n();
    let total = sweep_size(n, q, budget)?;
    let count = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let point = CoordinatePoint::from_index(n, q, idx);
            rank_condition_holds(&point, w, scope, semantics)
        })
        .count();
    Ok(count as u64)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SufficiencyReport {
    pub agree: bool,
    /// Smallest enumeration index where the two verdicts differ.
    pub first_divergence: Option<u64>,
    pub points: u64,
}

/// Streams both membership predicates (pillar-only vs all-entries, variety
/// semantics) over the common enumeration and reports the first
/// divergence, if any.
pub fn pillar_sufficiency(w: &Permutation, q: u64, budget: u64) -> Result<SufficiencyReport> {
    let n = w.n();
    let total = sweep_size(n, q, budget)?;
    let first_divergence = (0..total)
        .into_par_iter()
        .filter(|&idx| {
            let point = CoordinatePoint::from_index(n, q, idx);
            rank_condition_holds(&point, w, Scope::Pillar, Semantics::Variety)
                != rank_condition_holds(&point, w, Scope::All, Semantics::Variety)
        })
        .min();
    Ok(SufficiencyReport {
        agree: first_divergence.is_none(),
        first_divergence,
        points: total,
    })
}

/// Point count over F_q of the pillar system of a Coxeter element; the
/// tangent cone is the (n-1)-dimensional space {x_ab = 0 : a - b > 1}, and
/// the count comes out q^(n-1) although the system itself is quadratic at
/// below-diagonal pillars.
pub fn coxeter_cone_sweep(c: &Permutation, q: u64, budget: u64) -> Result<u64> {
    count_solutions(c, q, Scope::Pillar, Semantics::Variety, budget)
}

/// Symbolic side of the Coxeter cone identity: the linear lowest-degree
/// parts of the pillar generators span exactly the forms
/// {x_ab : a - b > 1}.
pub fn coxeter_linear_cone_check(c: &Permutation) -> bool {
    let n = c.n();
    let sys = minor_system(c, Scope::Pillar);
    let mut spanned: Vec<Var> = Vec::new();
    for g in sys.generators() {
        let low = g.lowest_degree_part();
        if low.degree() == Some(1) {
            // generators here are +-(single variable) plus higher terms
            let vars = low.vars();
            if vars.len() != 1 {
                return false;
            }
            spanned.push(vars[0]);
        }
    }
    spanned.sort_unstable();
    spanned.dedup();
    let expect: Vec<Var> = coordinate_vars(n)
        .into_iter()
        .filter(|&(a, b)| a - b > 1)
        .collect();
    spanned == expect
}
