//! Pillar sets, reconstruction of w, codimension, truncation and Rothe
//! diagrams.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::Permutation;
use crate::rank::{self, PillarEntry};

/// A candidate set of pillar entries on an (n+1)×(n+1) grid, kept in
/// lexicographic (row-major) order.
///
/// Construction only enforces the per-entry necessary conditions
/// 1 <= value <= min(row,col) and row + col - value < n; whether the set is
/// the pillar set of an actual permutation is decided by [`PillarSet::reconstruct`].
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PillarSet {
    n: usize,
    pillars: Vec<PillarEntry>,
}

impl PillarSet {
    pub fn new(n: usize, mut pillars: Vec<PillarEntry>) -> Result<Self> {
        if n == 0 || n > 255 {
            return Err(Error::InvalidPillarSet(format!("bad n={n}")));
        }
        pillars.sort();
        for pair in pillars.windows(2) {
            if pair[0].row == pair[1].row && pair[0].col == pair[1].col {
                return Err(Error::InvalidPillarSet(format!(
                    "duplicate position ({},{})",
                    pair[0].row, pair[0].col
                )));
            }
        }
        for p in &pillars {
            if p.row == 0 || p.col == 0 || p.row >= n || p.col >= n {
                return Err(Error::InvalidPillarSet(format!(
                    "position {p} outside 1..{}",
                    n - 1
                )));
            }
            if p.value == 0 || p.value > p.row.min(p.col) || p.row + p.col - p.value >= n {
                return Err(Error::InvalidPillarSet(format!("impossible entry {p}")));
            }
        }
        Ok(PillarSet { n, pillars })
    }

    pub fn from_permutation(w: &Permutation) -> Self {
        PillarSet {
            n: w.n(),
            pillars: rank::pillar_entries(w),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pillars(&self) -> &[PillarEntry] {
        &self.pillars
    }

    /// The increments k_i = K_i - L_i of the reconstruction: the number of
    /// new dots placed at step i, where L_i counts the earlier dots inside
    /// NW_i. A zero increment is legal (the pillar's value is already
    /// accounted for by earlier dots).
    pub fn increments(&self) -> Result<Vec<usize>> {
        Ok(self.place()?.0)
    }

    /// Reconstructs the unique permutation whose pillar set is exactly this
    /// set, following the N+1-step dot-placement algorithm; the result is
    /// verified post hoc and any mismatch is rejected.
    pub fn reconstruct(&self) -> Result<Permutation> {
        let (_, row_dot) = self.place()?;
        let values: Vec<u8> = (1..=self.n).map(|a| row_dot[a] as u8).collect();
        let w = Permutation::new(values)
            .map_err(|_| Error::InvalidPillarSet("placement did not produce a permutation".into()))?;
        if rank::pillar_entries(&w) != self.pillars {
            return Err(Error::InvalidPillarSet(
                "reconstructed permutation has a different pillar set".into(),
            ));
        }
        Ok(w)
    }

    /// Runs the N+1-step placement, returning the per-pillar increments and
    /// the dot positions (row_dot[a] = column of the dot on line a).
    fn place(&self) -> Result<(Vec<usize>, Vec<usize>)> {
        let n = self.n;
        // dot on horizontal line a and vertical line b: row_dot[a] = b
        let mut row_dot = vec![0usize; n + 1];
        let mut col_dot = vec![0usize; n + 1];
        let regions: Vec<(usize, usize, usize)> = self
            .pillars
            .iter()
            .map(|p| (p.row, p.col, p.value))
            .chain(std::iter::once((n, n, n)))
            .collect();
        let mut increments = Vec::with_capacity(self.pillars.len());
        for (step, &(pr, pc, pv)) in regions.iter().enumerate() {
            let placed: usize = (1..=pr).filter(|&a| row_dot[a] != 0 && row_dot[a] <= pc).count();
            if pv < placed {
                return Err(Error::InvalidPillarSet(format!(
                    "value at ({pr},{pc}) is below the dots already forced"
                )));
            }
            let k = pv - placed;
            if step < self.pillars.len() {
                increments.push(k);
            }
            // free lines inside NW, numbered bottom-to-top / right-to-left
            let free_rows: Vec<usize> = (1..=pr).rev().filter(|&a| row_dot[a] == 0).collect();
            let free_cols: Vec<usize> = (1..=pc).rev().filter(|&b| col_dot[b] == 0).collect();
            if free_rows.len() < k || free_cols.len() < k {
                return Err(Error::InvalidPillarSet(format!(
                    "not enough free lines for ({pr},{pc})"
                )));
            }
            for j in 1..=k {
                let b = free_cols[j - 1];
                let a = free_rows[k - j];
                // the new dot must avoid every earlier NW region
                if regions[..step]
                    .iter()
                    .any(|&(qr, qc, _)| a <= qr && b <= qc)
                {
                    return Err(Error::InvalidPillarSet(format!(
                        "dot ({a},{b}) falls inside an earlier region"
                    )));
                }
                row_dot[a] = b;
                col_dot[b] = a;
            }
        }
        Ok((increments, row_dot))
    }

    /// codim(C_w) = Σ k_i (K_i + n - p_i - q_i).
    pub fn codim(&self) -> Result<usize> {
        self.reconstruct()?;
        let k = self.increments()?;
        let n = self.n;
        Ok(self
            .pillars
            .iter()
            .zip(&k)
            .map(|(p, &ki)| ki * (p.value + n - p.row - p.col))
            .sum())
    }

    /// Transposes the pillars at the given indices (into the lex-ordered
    /// list) and re-sorts; no admissibility requirement.
    pub fn transpose_subset(&self, indices: &[usize]) -> Result<PillarSet> {
        let mut pillars = self.pillars.clone();
        for &i in indices {
            if i >= pillars.len() {
                return Err(Error::IndexOutOfRange(format!(
                    "pillar index {i} out of 0..{}",
                    pillars.len()
                )));
            }
            pillars[i] = pillars[i].transposed();
        }
        PillarSet::new(self.n, pillars)
    }
}

impl fmt::Display for PillarSet {
    /// "n=9; 2,2=1; 6,4=2" form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}", self.n)?;
        for p in &self.pillars {
            write!(f, "; {},{}={}", p.row, p.col, p.value)?;
        }
        Ok(())
    }
}

impl FromStr for PillarSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(';').map(str::trim);
        let head = parts.next().ok_or_else(|| Error::Parse("empty pillar set".into()))?;
        let n: usize = head
            .strip_prefix("n=")
            .ok_or_else(|| Error::Parse("pillar set must start with n=<int>".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad n: {e}")))?;
        let mut pillars = Vec::new();
        for part in parts {
            if part.is_empty() {
                continue;
            }
            let (pos, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected row,col=value in {part:?}")))?;
            let (r, c) = pos
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("expected row,col in {pos:?}")))?;
            let parse = |t: &str| -> Result<usize> {
                t.trim()
                    .parse()
                    .map_err(|e| Error::Parse(format!("bad integer {t:?}: {e}")))
            };
            pillars.push(PillarEntry::new(parse(r)?, parse(c)?, parse(value)?));
        }
        PillarSet::new(n, pillars)
    }
}

/// The permutation with the unique pillar entry (i,j) = a, requiring
/// a <= i,j and i + j - a < n.
pub fn single_pillar_permutation(i: usize, j: usize, a: usize, n: usize) -> Result<Permutation> {
    PillarSet::new(n, vec![PillarEntry::new(i, j, a)])?.reconstruct()
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum RotheFlavor {
    /// Shades right of and below each dot (dot included); SE frontier cells
    /// of the white region are the essential positions.
    Standard,
    /// Shades strictly left of and strictly above each dot; SE frontier
    /// cells are the pillar positions.
    Opposite,
}

/// An n×n Rothe or opposite Rothe diagram.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RotheDiagram {
    n: usize,
    flavor: RotheFlavor,
    w: Permutation,
    shaded: Vec<bool>, // n*n row-major, 0-based
}

impl RotheDiagram {
    pub fn new(w: &Permutation, flavor: RotheFlavor) -> Self {
        let n = w.n();
        let inv = w.inverse();
        let mut shaded = vec![false; n * n];
        for i in 1..=n {
            for j in 1..=n {
                let s = match flavor {
                    RotheFlavor::Standard => j >= w.apply(i) || i >= inv.apply(j),
                    RotheFlavor::Opposite => j < w.apply(i) || i < inv.apply(j),
                };
                shaded[(i - 1) * n + (j - 1)] = s;
            }
        }
        RotheDiagram {
            n,
            flavor,
            w: w.clone(),
            shaded,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn flavor(&self) -> RotheFlavor {
        self.flavor
    }

    pub fn is_shaded(&self, i: usize, j: usize) -> bool {
        self.shaded[(i - 1) * self.n + (j - 1)]
    }

    pub fn is_dot(&self, i: usize, j: usize) -> bool {
        self.w.apply(i) == j
    }

    /// White cells (undotted for the opposite flavor); their count is l(w)
    /// in both flavors.
    pub fn white_count(&self) -> usize {
        let mut count = 0;
        for i in 1..=self.n {
            for j in 1..=self.n {
                if !self.is_shaded(i, j) && !self.is_dot(i, j) {
                    count += 1;
                }
            }
        }
        count
    }

    /// White cells whose South and East neighbours are shaded; the value is
    /// the number of dots in the upper-left quadrant. These are the
    /// essential positions (standard) or pillar positions (opposite).
    pub fn frontier_cells(&self) -> Vec<PillarEntry> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..n {
            for j in 1..n {
                // dotted cells stay in play: in the opposite diagram the dot
                // itself can sit on a pillar cell
                if self.is_shaded(i, j) {
                    continue;
                }
                if self.is_shaded(i + 1, j) && self.is_shaded(i, j + 1) {
                    let value = (1..=i).filter(|&k| self.w.apply(k) <= j).count();
                    out.push(PillarEntry::new(i, j, value));
                }
            }
        }
        out
    }

    /// Monospace rendering: '•' dot, '#' shaded, '.' white, '*' frontier.
    pub fn render(&self) -> String {
        let frontier = self.frontier_cells();
        let mut out = String::new();
        for i in 1..=self.n {
            for j in 1..=self.n {
                let on_frontier = frontier.iter().any(|p| p.row == i && p.col == j);
                let c = if self.is_dot(i, j) && on_frontier {
                    '⊙'
                } else if self.is_dot(i, j) {
                    '•'
                } else if on_frontier {
                    '*'
                } else if self.is_shaded(i, j) {
                    '#'
                } else {
                    '.'
                };
                out.push(c);
                if j < self.n {
                    out.push(' ');
                }
            }
            out.push('\n');
        }
        out
    }
}

/// trc_t(w): the permutation whose pillar set is the first t linked classes
/// of w's, classes ordered left to right; t in 1..=s.
pub fn truncate(w: &Permutation, t: usize) -> Result<Permutation> {
    let graph = crate::transpose::linking_graph(w);
    let s = graph.components().len();
    if t == 0 || t > s {
        return Err(Error::IndexOutOfRange(format!("t={t} outside 1..={s}")));
    }
    let pillars: Vec<PillarEntry> = graph.components()[..t]
        .iter()
        .flat_map(|c| c.iter().map(|&i| graph.pillars()[i]))
        .collect();
    PillarSet::new(w.n(), pillars)?.reconstruct()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn reconstruct_s9_example() {
        let w = p("853471692");
        let ps = PillarSet::from_permutation(&w);
        assert_eq!(ps.reconstruct().unwrap(), w);
    }

    #[test]
    fn reconstruct_roundtrip_exhaustive() {
        for n in 1..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let ps = PillarSet::from_permutation(&w);
                assert_eq!(ps.reconstruct().unwrap(), w, "w={w}");
            }
        }
    }

    #[test]
    fn single_pillar_formula() {
        for n in 2..=7 {
            for i in 1..n {
                for j in 1..n {
                    for a in 1..=i.min(j) {
                        if i + j - a >= n {
                            continue;
                        }
                        let w = single_pillar_permutation(i, j, a, n).unwrap();
                        let mut expected: Vec<u8> = Vec::new();
                        expected.extend(((n + 1 - i + a)..=n).rev().map(|v| v as u8));
                        expected.extend(((j - a + 1)..=j).rev().map(|v| v as u8));
                        expected.extend(((j + 1)..=(n - i + a)).rev().map(|v| v as u8));
                        expected.extend((1..=(j - a)).rev().map(|v| v as u8));
                        assert_eq!(
                            w,
                            Permutation::new(expected).unwrap(),
                            "i={i} j={j} a={a} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn forbidden_transpositions_rejected() {
        // transposed-pillar variants of r(34521)
        let a = PillarSet::new(
            5,
            vec![PillarEntry::new(1, 3, 1), PillarEntry::new(4, 2, 2)],
        )
        .unwrap();
        assert!(matches!(a.reconstruct(), Err(Error::InvalidPillarSet(_))));
        let b = PillarSet::new(
            5,
            vec![PillarEntry::new(3, 1, 1), PillarEntry::new(2, 4, 2)],
        )
        .unwrap();
        assert!(matches!(b.reconstruct(), Err(Error::InvalidPillarSet(_))));
    }

    #[test]
    fn codim_examples() {
        assert_eq!(PillarSet::new(4, vec![]).unwrap().codim().unwrap(), 0);
        let ps = PillarSet::from_permutation(&p("2341"));
        assert_eq!(ps.increments().unwrap(), vec![1, 1]);
        assert_eq!(ps.codim().unwrap(), 3);
        let ps = PillarSet::from_permutation(&p("4231"));
        assert_eq!(ps.codim().unwrap(), 1);
    }

    #[test]
    fn codim_matches_colength() {
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let ps = PillarSet::from_permutation(&w);
                assert_eq!(ps.codim().unwrap(), w.colength(), "w={w}");
            }
        }
    }

    #[test]
    fn increments_consistency() {
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let ps = PillarSet::from_permutation(&w);
                let k = ps.increments().unwrap();
                // recompute K_i from increments via the partial order
                for (i, pi) in ps.pillars().iter().enumerate() {
                    let total: usize = ps.pillars()[..=i]
                        .iter()
                        .zip(&k)
                        .filter(|(q, _)| q.row <= pi.row && q.col <= pi.col)
                        .map(|(_, kj)| *kj)
                        .sum();
                    assert_eq!(total, pi.value, "w={w}");
                }
            }
        }
    }

    #[test]
    fn truncation_s12_example() {
        let w = p("12,2,9,7,6,4,10,5,3,11,1,8");
        // trc_1 must have {(2,2)=1} as its exact pillar set; the variant
        // (12,2,3,11,10,9,8,7,6,5,4,1) picks up an extra pillar (3,3)=2
        // and therefore is not the truncation
        let trc1 = truncate(&w, 1).unwrap();
        assert_eq!(trc1, p("12,2,11,10,9,8,7,6,5,4,3,1"));
        assert_eq!(
            rank::pillar_entries(&trc1),
            vec![PillarEntry::new(2, 2, 1)]
        );
        assert_eq!(
            rank::pillar_entries(&p("12,2,3,11,10,9,8,7,6,5,4,1")),
            vec![PillarEntry::new(2, 2, 1), PillarEntry::new(3, 3, 2)]
        );
        assert_eq!(truncate(&w, 2).unwrap(), p("12,2,11,10,9,4,8,7,6,5,3,1"));
        assert_eq!(truncate(&w, 3).unwrap(), w);
        assert!(matches!(truncate(&w, 4), Err(Error::IndexOutOfRange(_))));
        assert!(matches!(truncate(&w, 0), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn rothe_2341() {
        let std = RotheDiagram::new(&p("2341"), RotheFlavor::Standard);
        assert_eq!(std.frontier_cells(), vec![PillarEntry::new(3, 1, 0)]);
        let opp = RotheDiagram::new(&p("2341"), RotheFlavor::Opposite);
        assert_eq!(
            opp.frontier_cells(),
            vec![PillarEntry::new(1, 2, 1), PillarEntry::new(2, 3, 2)]
        );
    }

    #[test]
    fn rothe_identity() {
        let std = RotheDiagram::new(&Permutation::identity(4), RotheFlavor::Standard);
        assert_eq!(std.white_count(), 0);
        assert!(std.frontier_cells().is_empty());
    }

    #[test]
    fn rothe_agreement_exhaustive() {
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let std = RotheDiagram::new(&w, RotheFlavor::Standard);
                let opp = RotheDiagram::new(&w, RotheFlavor::Opposite);
                assert_eq!(std.white_count(), w.length(), "w={w}");
                assert_eq!(opp.white_count(), w.length(), "w={w}");
                assert_eq!(std.frontier_cells(), rank::essential_entries(&w), "w={w}");
                assert_eq!(opp.frontier_cells(), rank::pillar_entries(&w), "w={w}");
            }
        }
    }

    #[test]
    fn pillar_set_text_roundtrip() {
        let w = p("12,2,9,7,6,4,10,5,3,11,1,8");
        let ps = PillarSet::from_permutation(&w);
        let text = ps.to_string();
        assert!(text.starts_with("n=12; 2,2=1; 6,4=2;"));
        let back: PillarSet = text.parse().unwrap();
        assert_eq!(back, ps);
    }

    #[test]
    fn pillar_set_rejects_impossible_entries() {
        assert!(PillarSet::new(4, vec![PillarEntry::new(2, 2, 3)]).is_err());
        assert!(PillarSet::new(4, vec![PillarEntry::new(3, 3, 1)]).is_err());
        assert!(PillarSet::new(4, vec![PillarEntry::new(2, 2, 0)]).is_err());
        assert!(PillarSet::new(
            4,
            vec![PillarEntry::new(2, 2, 1), PillarEntry::new(2, 2, 2)]
        )
        .is_err());
    }
}
