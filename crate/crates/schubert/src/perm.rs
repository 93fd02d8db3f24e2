//! Permutations of S_n in one-line notation, 1-based.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A permutation w of {1,…,n} in one-line notation w(1),…,w(n).
///
/// Values are 1-based; n is capped at 255 so values fit in a byte.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    values: Vec<u8>,
}

impl Permutation {
    pub fn new(values: Vec<u8>) -> Result<Self> {
        let n = values.len();
        if n == 0 || n > 255 {
            return Err(Error::InvalidPermutation(format!(
                "n must be in 1..=255, got {n}"
            )));
        }
        let mut seen = vec![false; n + 1];
        for &v in &values {
            if v == 0 || v as usize > n || seen[v as usize] {
                return Err(Error::InvalidPermutation(format!(
                    "values are not a permutation of 1..={n}"
                )));
            }
            seen[v as usize] = true;
        }
        Ok(Permutation { values })
    }

    pub fn identity(n: usize) -> Self {
        Permutation {
            values: (1..=n as u8).collect(),
        }
    }

    /// The longest element w_0 = (n, n-1, …, 1).
    pub fn longest(n: usize) -> Self {
        Permutation {
            values: (1..=n as u8).rev().collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// w(i), 1-based.
    pub fn apply(&self, i: usize) -> usize {
        self.values[i - 1] as usize
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.n()];
        for (i, &v) in self.values.iter().enumerate() {
            inv[v as usize - 1] = (i + 1) as u8;
        }
        Permutation { values: inv }
    }

    /// Number of inversions #{(i,j) : i<j, w(i)>w(j)}.
    pub fn length(&self) -> usize {
        let v = &self.values;
        let mut count = 0;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                if v[i] > v[j] {
                    count += 1;
                }
            }
        }
        count
    }

    /// n(n-1)/2 - length(w) = codim of the Schubert cell C_w.
    pub fn colength(&self) -> usize {
        let n = self.n();
        n * (n - 1) / 2 - self.length()
    }

    /// (w v)(k) = w(v(k)).
    pub fn compose(&self, other: &Permutation) -> Permutation {
        let values = (1..=self.n()).map(|k| self.apply(other.apply(k)) as u8).collect();
        Permutation { values }
    }

    /// True iff w is a Coxeter element: a product s_{i1}…s_{i(n-1)} in which
    /// every elementary transposition appears exactly once.
    ///
    /// Checked via the pillar structure: length n-1 and, for each
    /// i in 1..=n-2, a pillar at (i,i+1) or (i+1,i) with value i.
    pub fn is_coxeter(&self) -> bool {
        let n = self.n();
        if n < 2 || self.length() != n - 1 {
            return false;
        }
        let pillars = crate::rank::pillar_entries(self);
        if pillars.len() != n.saturating_sub(2) {
            return false;
        }
        let mut needed: Vec<bool> = vec![false; n];
        for p in &pillars {
            let (lo, hi) = (p.row.min(p.col), p.row.max(p.col));
            if hi != lo + 1 || p.value != lo {
                return false;
            }
            if needed[lo] {
                return false;
            }
            needed[lo] = true;
        }
        (1..=n - 2).all(|i| needed[i])
    }

    /// Lehmer-code rank of w in 0..n!-1 (lexicographic index).
    pub fn lehmer_rank(&self) -> u64 {
        let n = self.n();
        let mut rank: u64 = 0;
        let mut fact: u64 = 1;
        // factorials up to n-1
        let mut facts = vec![1u64; n];
        for k in 1..n {
            fact *= k as u64;
            facts[k] = fact;
        }
        for i in 0..n {
            let smaller = (i + 1..n).filter(|&j| self.values[j] < self.values[i]).count();
            rank += smaller as u64 * facts[n - 1 - i];
        }
        rank
    }

    /// Inverse of `lehmer_rank`.
    pub fn from_lehmer_rank(n: usize, mut rank: u64) -> Self {
        let mut facts = vec![1u64; n];
        for k in 1..n {
            facts[k] = facts[k - 1] * k as u64;
        }
        let mut avail: Vec<u8> = (1..=n as u8).collect();
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            let f = facts[n - 1 - i];
            let idx = (rank / f) as usize;
            rank %= f;
            values.push(avail.remove(idx));
        }
        Permutation { values }
    }
}

/// All Coxeter elements of S_n, deduplicated, 2^(n-2) of them for n >= 2.
///
/// Built directly: for each i = 1..n-2 choose whether s_i precedes s_{i+1};
/// non-adjacent transpositions commute, so the choice vector determines the
/// group element.
pub fn coxeter_elements(n: usize) -> Vec<Permutation> {
    assert!(n >= 2);
    let masks = 1usize << (n.saturating_sub(2));
    let mut out = Vec::with_capacity(masks);
    for mask in 0..masks {
        // Linear order on s_1..s_{n-1} respecting the chosen precedences.
        let mut order: Vec<usize> = vec![n - 1];
        for i in (1..n - 1).rev() {
            if mask >> (i - 1) & 1 == 1 {
                order.insert(0, i); // s_i before s_{i+1}
            } else {
                order.push(i);
            }
        }
        let mut w = Permutation::identity(n);
        for &i in order.iter().rev() {
            // multiply on the right: w <- w * s_i applied innermost first
            w = adjacent_transposition(n, i).compose(&w);
        }
        out.push(w);
    }
    out.sort();
    out.dedup();
    out
}

fn adjacent_transposition(n: usize, i: usize) -> Permutation {
    let mut values: Vec<u8> = (1..=n as u8).collect();
    values.swap(i - 1, i);
    Permutation { values }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n() <= 9 {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            write!(f, "{}", parts.join(","))
        }
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation({self})")
    }
}

impl FromStr for Permutation {
    type Err = Error;

    /// Accepts compact digit strings ("4231") for n <= 9 and the
    /// comma-separated form ("12,2,9,…") for any n.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty permutation".into()));
        }
        let values: Vec<u8> = if s.contains(',') {
            s.split(',')
                .map(|t| {
                    t.trim()
                        .parse::<u8>()
                        .map_err(|e| Error::Parse(format!("bad entry {t:?}: {e}")))
                })
                .collect::<Result<_>>()?
        } else {
            s.chars()
                .map(|c| {
                    c.to_digit(10)
                        .map(|d| d as u8)
                        .ok_or_else(|| Error::Parse(format!("bad digit {c:?}")))
                })
                .collect::<Result<_>>()?
        };
        Permutation::new(values)
    }
}

#[derive(Serialize, Deserialize)]
struct PermutationRepr {
    n: usize,
    values: Vec<u8>,
}

impl Serialize for Permutation {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        PermutationRepr {
            n: self.n(),
            values: self.values.clone(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = PermutationRepr::deserialize(deserializer)?;
        if repr.n != repr.values.len() {
            return Err(D::Error::custom("n does not match values length"));
        }
        Permutation::new(repr.values).map_err(D::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(p("2341").inverse(), p("4123"));
        assert_eq!(p("4231").inverse(), p("4231"));
        assert_eq!(p("456321").inverse(), p("654123"));
    }

    #[test]
    fn length_examples() {
        assert_eq!(p("1234").length(), 0);
        assert_eq!(p("4321").length(), 6);
        assert_eq!(p("456321").length(), 12);
        assert_eq!(p("546132").length(), 11);
    }

    #[test]
    fn colength_examples() {
        assert_eq!(p("4321").colength(), 0);
        assert_eq!(p("1234").colength(), 6);
        // brute-force pair count oracle
        let w = p("953471682");
        let mut crosses = 0;
        for i in 1..=9 {
            for j in i + 1..=9 {
                if w.apply(i) < w.apply(j) {
                    crosses += 1;
                }
            }
        }
        assert_eq!(w.colength(), crosses);
    }

    #[test]
    fn coxeter_s4() {
        let cs = coxeter_elements(4);
        let expected: Vec<Permutation> =
            ["2341", "2413", "3142", "4123"].iter().map(|s| p(s)).collect();
        assert_eq!(cs, expected);
    }

    #[test]
    fn coxeter_s3_s5() {
        let cs3 = coxeter_elements(3);
        assert_eq!(cs3, vec![p("231"), p("312")]);
        let cs5 = coxeter_elements(5);
        assert_eq!(cs5.len(), 8);
        assert!(cs5.iter().all(|c| c.length() == 4));
    }

    #[test]
    fn coxeter_matches_bruteforce() {
        // brute force over all orderings of s_1..s_{n-1}
        for n in 2..=5 {
            let gens: Vec<usize> = (1..n).collect();
            let mut all = Vec::new();
            permute_orders(&gens, &mut Vec::new(), &mut all);
            let mut brute: Vec<Permutation> = all
                .iter()
                .map(|order| {
                    let mut w = Permutation::identity(n);
                    for &i in order.iter().rev() {
                        w = adjacent_transposition(n, i).compose(&w);
                    }
                    w
                })
                .collect();
            brute.sort();
            brute.dedup();
            assert_eq!(coxeter_elements(n), brute, "n={n}");
        }
    }

    fn permute_orders(rest: &[usize], acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for k in 0..rest.len() {
            let mut r = rest.to_vec();
            let x = r.remove(k);
            acc.push(x);
            permute_orders(&r, acc, out);
            acc.pop();
        }
    }

    #[test]
    fn is_coxeter_examples() {
        assert!(p("2341").is_coxeter());
        assert!(p("2413").is_coxeter());
        assert!(!p("4321").is_coxeter());
        for n in 2..=6 {
            let cs = coxeter_elements(n);
            for rank in 0..factorial(n) {
                let w = Permutation::from_lehmer_rank(n, rank);
                assert_eq!(w.is_coxeter(), cs.contains(&w), "w={w}");
            }
        }
    }

    fn factorial(n: usize) -> u64 {
        (1..=n as u64).product()
    }

    #[test]
    fn length_duality_and_inverse() {
        for rank in 0..factorial(5) {
            let w = Permutation::from_lehmer_rank(5, rank);
            let w0 = Permutation::longest(5);
            assert_eq!(w.length() + w.compose(&w0).length(), 10);
            assert_eq!(w.length(), w.inverse().length());
        }
    }

    #[test]
    fn lehmer_roundtrip() {
        for rank in 0..factorial(6) {
            let w = Permutation::from_lehmer_rank(6, rank);
            assert_eq!(w.lehmer_rank(), rank);
        }
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(p("12,2,9,7,6,4,10,5,3,11,1,8").n(), 12);
        assert_eq!(p("4231").to_string(), "4231");
        assert_eq!(
            p("12,2,9,7,6,4,10,5,3,11,1,8").to_string(),
            "12,2,9,7,6,4,10,5,3,11,1,8"
        );
        assert!("4221".parse::<Permutation>().is_err());
        assert!("".parse::<Permutation>().is_err());
    }

    #[test]
    fn json_roundtrip() {
        let w = p("2413");
        let s = serde_json::to_string(&w).unwrap();
        assert_eq!(s, r#"{"n":4,"values":[2,4,1,3]}"#);
        let back: Permutation = serde_json::from_str(&s).unwrap();
        assert_eq!(back, w);
    }
}
