//! Rank matrices r_ij = dim(V_i ∩ C^j), pillar and essential entries.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::perm::Permutation;

/// The (n+1)×(n+1) rank matrix of a Schubert cell.
///
/// Entries are 16-bit; n is capped at 255.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RankMatrix {
    n: usize,
    entries: Vec<i16>, // (n+1)^2 row-major
}

/// A marked entry (i,j) of a rank matrix with its value r_ij.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PillarEntry {
    pub row: usize,
    pub col: usize,
    pub value: usize,
}

impl PillarEntry {
    pub fn new(row: usize, col: usize, value: usize) -> Self {
        PillarEntry { row, col, value }
    }

    /// The interval [min(i,j), max(i,j)] used by the linking relation.
    pub fn interval(&self) -> (usize, usize) {
        (self.row.min(self.col), self.row.max(self.col))
    }

    pub fn transposed(&self) -> PillarEntry {
        PillarEntry {
            row: self.col,
            col: self.row,
            value: self.value,
        }
    }
}

impl fmt::Display for PillarEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})={}", self.row, self.col, self.value)
    }
}

impl RankMatrix {
    /// r_ij = #{k <= i | w(k) <= j}.
    pub fn from_permutation(w: &Permutation) -> Self {
        let n = w.n();
        let mut entries = vec![0i16; (n + 1) * (n + 1)];
        for i in 1..=n {
            let wi = w.apply(i);
            for j in 0..=n {
                let inc = if wi <= j { 1 } else { 0 };
                entries[i * (n + 1) + j] = entries[(i - 1) * (n + 1) + j] + inc;
            }
        }
        RankMatrix { n, entries }
    }

    pub fn from_entries(n: usize, entries: Vec<i16>) -> Result<Self> {
        if n == 0 || n > 255 || entries.len() != (n + 1) * (n + 1) {
            return Err(Error::InvalidRankMatrix(format!(
                "expected {} entries for n={n}",
                (n + 1) * (n + 1)
            )));
        }
        let r = RankMatrix { n, entries };
        r.validate()?;
        Ok(r)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> i16 {
        self.entries[i * (self.n + 1) + j]
    }

    /// Checks the rank-matrix axioms: zero/full borders, the supermodular
    /// inequality and unit steps in both directions.
    pub fn validate(&self) -> Result<()> {
        let n = self.n;
        for k in 0..=n {
            if self.get(0, k) != 0 || self.get(k, 0) != 0 {
                return Err(Error::InvalidRankMatrix("border row/col must be 0".into()));
            }
            if self.get(k, n) != k as i16 || self.get(n, k) != k as i16 {
                return Err(Error::InvalidRankMatrix("last row/col must be 0..n".into()));
            }
        }
        for i in 0..n {
            for j in 0..n {
                let (a, b, c, d) = (
                    self.get(i, j),
                    self.get(i, j + 1),
                    self.get(i + 1, j),
                    self.get(i + 1, j + 1),
                );
                if a + d < b + c {
                    return Err(Error::InvalidRankMatrix(format!(
                        "supermodularity fails at ({i},{j})"
                    )));
                }
                if !(b - a == 0 || b - a == 1) || !(c - a == 0 || c - a == 1) {
                    return Err(Error::InvalidRankMatrix(format!(
                        "non-unit step at ({i},{j})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Recovers w from the local pattern a,a / a,a+1: w(i) = j whenever
    /// r_ij = r_{i-1,j-1} + 1 and r_{i-1,j} = r_{i,j-1} = r_{i-1,j-1}.
    pub fn to_permutation(&self) -> Result<Permutation> {
        self.validate()?;
        let n = self.n;
        let mut values = vec![0u8; n];
        for i in 1..=n {
            for j in 1..=n {
                let a = self.get(i - 1, j - 1);
                if self.get(i, j) == a + 1 && self.get(i - 1, j) == a && self.get(i, j - 1) == a {
                    if values[i - 1] != 0 {
                        return Err(Error::InvalidRankMatrix(format!(
                            "two dots in row {i}"
                        )));
                    }
                    values[i - 1] = j as u8;
                }
            }
        }
        let w = Permutation::new(values)
            .map_err(|_| Error::InvalidRankMatrix("recovered dots are not a permutation".into()))?;
        if RankMatrix::from_permutation(&w) != *self {
            return Err(Error::InvalidRankMatrix(
                "matrix is not the rank matrix of its dot set".into(),
            ));
        }
        Ok(w)
    }

    /// Pillar entries detected by the local pattern: r_ij = r_{i-1,j}+1 =
    /// r_{i,j-1}+1 and r_ij = r_{i+1,j} = r_{i,j+1}.
    ///
    /// This is the matrix-level counterpart of [`pillar_entries`], used as a
    /// cross-check; both return entries in lexicographic order.
    pub fn pillar_entries(&self) -> Vec<PillarEntry> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..n {
            for j in 1..n {
                let v = self.get(i, j);
                if v == self.get(i - 1, j) + 1
                    && v == self.get(i, j - 1) + 1
                    && v == self.get(i + 1, j)
                    && v == self.get(i, j + 1)
                {
                    out.push(PillarEntry::new(i, j, v as usize));
                }
            }
        }
        out
    }

    /// Essential entries (Fulton), local pattern with the steps reversed.
    pub fn essential_entries(&self) -> Vec<PillarEntry> {
        let n = self.n;
        let mut out = Vec::new();
        for i in 1..n {
            for j in 1..n {
                let v = self.get(i, j);
                if v == self.get(i - 1, j)
                    && v == self.get(i, j - 1)
                    && v + 1 == self.get(i + 1, j)
                    && v + 1 == self.get(i, j + 1)
                {
                    out.push(PillarEntry::new(i, j, v as usize));
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> RankMatrix {
        let n = self.n;
        let mut entries = vec![0i16; (n + 1) * (n + 1)];
        for i in 0..=n {
            for j in 0..=n {
                entries[j * (n + 1) + i] = self.get(i, j);
            }
        }
        RankMatrix { n, entries }
    }

    /// Text rendering: dots are prefixed with
    /// '•', pillar entries are written "(v)" and essential entries "[v]".
    pub fn render(&self) -> String {
        let n = self.n;
        let dots: Vec<(usize, usize)> = match self.to_permutation() {
            Ok(w) => (1..=n).map(|i| (i, w.apply(i))).collect(),
            Err(_) => Vec::new(),
        };
        let pillars = self.pillar_entries();
        let essentials = self.essential_entries();
        let mut cells = vec![vec![String::new(); n + 1]; n + 1];
        for i in 0..=n {
            for j in 0..=n {
                let v = self.get(i, j);
                let mut s = if pillars.iter().any(|p| p.row == i && p.col == j) {
                    format!("({v})")
                } else if essentials.iter().any(|p| p.row == i && p.col == j) {
                    format!("[{v}]")
                } else {
                    format!("{v}")
                };
                if dots.contains(&(i, j)) {
                    s = format!("•{s}");
                }
                cells[i][j] = s;
            }
        }
        let width = cells
            .iter()
            .flat_map(|row| row.iter().map(|c| c.chars().count()))
            .max()
            .unwrap_or(1);
        let mut out = String::new();
        for row in &cells {
            let padded: Vec<String> = row
                .iter()
                .map(|c| format!("{:>w$}", c, w = width))
                .collect();
            out.push_str(&padded.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Pillar entries of r(w) computed combinatorially:
/// w(i) <= j, w(i+1) > j, w^-1(j) <= i, w^-1(j+1) > i.
///
/// Returned in lexicographic (row-major) order.
pub fn pillar_entries(w: &Permutation) -> Vec<PillarEntry> {
    let n = w.n();
    let inv = w.inverse();
    let mut out = Vec::new();
    for i in 1..n {
        // w(i) <= j < w(i+1) restricts j to a contiguous range
        let lo = w.apply(i);
        let hi = w.apply(i + 1);
        for j in lo..hi.min(n) {
            if j == 0 || j >= n {
                continue;
            }
            if inv.apply(j) <= i && inv.apply(j + 1) > i {
                let value = (1..=i).filter(|&k| w.apply(k) <= j).count();
                out.push(PillarEntry::new(i, j, value));
            }
        }
    }
    out
}

/// Essential entries of r(w) computed combinatorially:
/// w(i) > j, w(i+1) <= j, w^-1(j) > i, w^-1(j+1) <= i.
pub fn essential_entries(w: &Permutation) -> Vec<PillarEntry> {
    let n = w.n();
    let inv = w.inverse();
    let mut out = Vec::new();
    for i in 1..n {
        let lo = w.apply(i + 1);
        let hi = w.apply(i);
        for j in lo..hi {
            if j == 0 || j >= n {
                continue;
            }
            if inv.apply(j) > i && inv.apply(j + 1) <= i {
                let value = (1..=i).filter(|&k| w.apply(k) <= j).count();
                out.push(PillarEntry::new(i, j, value));
            }
        }
    }
    out
}

#[derive(Serialize, Deserialize)]
struct RankMatrixRepr {
    n: usize,
    entries: Vec<Vec<i16>>,
}

impl Serialize for RankMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = (0..=self.n)
            .map(|i| (0..=self.n).map(|j| self.get(i, j)).collect())
            .collect();
        RankMatrixRepr {
            n: self.n,
            entries: rows,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for RankMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = RankMatrixRepr::deserialize(deserializer)?;
        let mut entries = Vec::with_capacity((repr.n + 1) * (repr.n + 1));
        if repr.entries.len() != repr.n + 1 || repr.entries.iter().any(|r| r.len() != repr.n + 1) {
            return Err(D::Error::custom("entries must be (n+1)x(n+1)"));
        }
        for row in repr.entries {
            entries.extend(row);
        }
        RankMatrix::from_entries(repr.n, entries).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn rank_matrix_4321() {
        let r = RankMatrix::from_permutation(&p("4321"));
        assert_eq!(r.get(1, 4), 1);
        assert_eq!(r.get(2, 3), 1);
        assert_eq!(r.get(3, 3), 2);
        r.validate().unwrap();
    }

    #[test]
    fn rank_matrix_identity() {
        let r = RankMatrix::from_permutation(&Permutation::identity(4));
        for i in 0..=4 {
            for j in 0..=4 {
                assert_eq!(r.get(i, j) as usize, i.min(j));
            }
        }
    }

    #[test]
    fn rank_matrix_3412() {
        let r = RankMatrix::from_permutation(&p("3412"));
        assert_eq!(r.get(1, 3), 1);
        assert_eq!(r.get(3, 1), 1);
    }

    #[test]
    fn longest_element_formula() {
        for n in 2..=6 {
            let r = RankMatrix::from_permutation(&Permutation::longest(n));
            for i in 0..=n {
                for j in 0..=n {
                    assert_eq!(r.get(i, j) as i64, 0i64.max(i as i64 + j as i64 - n as i64));
                }
            }
            assert!(r.pillar_entries().is_empty());
        }
    }

    #[test]
    fn roundtrip_exhaustive_small() {
        for n in 1..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let r = RankMatrix::from_permutation(&w);
                r.validate().unwrap();
                assert_eq!(r.to_permutation().unwrap(), w);
            }
        }
    }

    #[test]
    fn pillar_examples() {
        assert!(pillar_entries(&p("4321")).is_empty());
        assert_eq!(
            pillar_entries(&p("2341")),
            vec![PillarEntry::new(1, 2, 1), PillarEntry::new(2, 3, 2)]
        );
        let w = p("12,2,9,7,6,4,10,5,3,11,1,8");
        assert_eq!(
            pillar_entries(&w),
            vec![
                PillarEntry::new(2, 2, 1),
                PillarEntry::new(6, 4, 2),
                PillarEntry::new(6, 7, 4),
                PillarEntry::new(6, 9, 5),
                PillarEntry::new(9, 7, 6),
                PillarEntry::new(9, 10, 8),
                PillarEntry::new(11, 7, 7),
            ]
        );
    }

    #[test]
    fn essential_examples() {
        assert_eq!(
            essential_entries(&p("4321")),
            vec![
                PillarEntry::new(1, 3, 0),
                PillarEntry::new(2, 2, 0),
                PillarEntry::new(3, 1, 0)
            ]
        );
        assert_eq!(
            essential_entries(&p("2143")),
            vec![PillarEntry::new(1, 1, 0), PillarEntry::new(3, 3, 2)]
        );
        assert_eq!(
            essential_entries(&p("4231")),
            vec![PillarEntry::new(1, 3, 0), PillarEntry::new(3, 1, 0)]
        );
    }

    #[test]
    fn pillar_matrix_agreement_and_disjointness() {
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let r = RankMatrix::from_permutation(&w);
                assert_eq!(pillar_entries(&w), r.pillar_entries(), "w={w}");
                assert_eq!(essential_entries(&w), r.essential_entries(), "w={w}");
                let pil = r.pillar_entries();
                let ess = r.essential_entries();
                for e in &ess {
                    assert!(!pil.iter().any(|q| q.row == e.row && q.col == e.col));
                }
            }
        }
    }

    #[test]
    fn only_longest_has_no_pillars() {
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            let mut no_pillar = Vec::new();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                if pillar_entries(&w).is_empty() {
                    no_pillar.push(w);
                }
            }
            assert_eq!(no_pillar, vec![Permutation::longest(n)]);
        }
    }

    #[test]
    fn transpose_matches_inverse() {
        for s in ["2341", "4231", "456321"] {
            let w = p(s);
            assert_eq!(
                RankMatrix::from_permutation(&w).transpose(),
                RankMatrix::from_permutation(&w.inverse())
            );
        }
        let w = p("2341");
        let transposed: Vec<PillarEntry> = pillar_entries(&w)
            .iter()
            .map(|q| q.transposed())
            .collect();
        let mut sorted = transposed.clone();
        sorted.sort();
        assert_eq!(sorted, pillar_entries(&w.inverse()));
    }

    #[test]
    fn strip_characterization() {
        // pillars = intersections of height-1 horizontal and width-1
        // vertical strips of the diagram
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let inv = w.inverse();
                let mut strip_pillars = Vec::new();
                // horizontal strip: dots (i, w(i)), (i+1, w(i+1)) with
                // w(i) < w(i+1); covers grid lines between them
                for i in 1..n {
                    if w.apply(i) >= w.apply(i + 1) {
                        continue;
                    }
                    for j in 1..n {
                        if inv.apply(j) >= inv.apply(j + 1) {
                            continue;
                        }
                        // vertical strip between columns j, j+1; intersection
                        // cell is (i, j) when the strips cross
                        let hi = (w.apply(i), w.apply(i + 1));
                        let vi = (inv.apply(j), inv.apply(j + 1));
                        if hi.0 <= j && j < hi.1 && vi.0 <= i && i < vi.1 {
                            strip_pillars.push((i, j));
                        }
                    }
                }
                strip_pillars.sort();
                let pil: Vec<(usize, usize)> =
                    pillar_entries(&w).iter().map(|q| (q.row, q.col)).collect();
                assert_eq!(strip_pillars, pil, "w={w}");
            }
        }
    }

    #[test]
    fn strip_existence() {
        // every height-1 horizontal strip intersects some width-1 vertical
        // strip and vice versa
        for n in 2..=6 {
            let count: u64 = (1..=n as u64).product();
            for rank in 0..count {
                let w = Permutation::from_lehmer_rank(n, rank);
                let inv = w.inverse();
                for i in 1..n {
                    if w.apply(i) >= w.apply(i + 1) {
                        continue;
                    }
                    let found = (1..n).any(|j| {
                        inv.apply(j) < inv.apply(j + 1)
                            && w.apply(i) <= j
                            && j < w.apply(i + 1)
                            && inv.apply(j) <= i
                            && i < inv.apply(j + 1)
                    });
                    assert!(found, "w={w} horizontal strip at {i}");
                }
                for j in 1..n {
                    if inv.apply(j) >= inv.apply(j + 1) {
                        continue;
                    }
                    let found = (1..n).any(|i| {
                        w.apply(i) < w.apply(i + 1)
                            && w.apply(i) <= j
                            && j < w.apply(i + 1)
                            && inv.apply(j) <= i
                            && i < inv.apply(j + 1)
                    });
                    assert!(found, "w={w} vertical strip at {j}");
                }
            }
        }
    }

    #[test]
    fn invalid_matrices_rejected() {
        // horizontal step of 2
        let w = p("2341");
        let r = RankMatrix::from_permutation(&w);
        let mut entries: Vec<i16> = (0..=4)
            .flat_map(|i| (0..=4).map(move |j| (i, j)))
            .map(|(i, j)| r.get(i, j))
            .collect();
        entries[5 + 2] = 2;
        assert!(RankMatrix::from_entries(4, entries).is_err());
        // monotone with unit steps but supermodularity fails at (2,2)
        let entries: Vec<i16> = vec![
            0, 0, 0, 0, //
            0, 0, 1, 1, //
            0, 1, 1, 2, //
            0, 1, 2, 3,
        ];
        assert!(RankMatrix::from_entries(3, entries).is_err());
        // wrong boundary
        let mut entries: Vec<i16> = (0..=4)
            .flat_map(|i| (0..=4).map(move |j| (i, j)))
            .map(|(i, j)| r.get(i, j))
            .collect();
        entries[4 * 5 + 2] = 3;
        assert!(RankMatrix::from_entries(4, entries).is_err());
    }

    #[test]
    fn json_roundtrip() {
        let r = RankMatrix::from_permutation(&p("3412"));
        let s = serde_json::to_string(&r).unwrap();
        let back: RankMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
    }
}
