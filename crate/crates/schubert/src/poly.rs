//! Sparse integer-coefficient polynomials in the coordinates x_{ij}, i > j.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate variable x_{ij} with i > j.
pub type Var = (u8, u8);

/// Exponent vector, sorted by variable; always canonical.
pub type Monomial = Vec<(Var, u8)>;

fn monomial_degree(m: &Monomial) -> usize {
    m.iter().map(|&(_, e)| e as usize).sum()
}

/// Canonical form: monomials sorted (BTreeMap), zero coefficients pruned.
/// Equality is structural.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug, Default, Serialize, Deserialize)]
pub struct Polynomial {
    terms: BTreeMap<Monomial, i64>,
}

impl Polynomial {
    pub fn zero() -> Self {
        Polynomial::default()
    }

    pub fn constant(c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(Vec::new(), c);
        }
        Polynomial { terms }
    }

    pub fn var(i: u8, j: u8) -> Self {
        assert!(i > j && j >= 1, "variable x_{{{i},{j}}} needs i > j >= 1");
        let mut terms = BTreeMap::new();
        terms.insert(vec![((i, j), 1)], 1);
        Polynomial { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<Monomial, i64> {
        &self.terms
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut terms = self.terms.clone();
        for (m, &c) in &other.terms {
            let entry = terms.entry(m.clone()).or_insert(0);
            *entry += c;
            if *entry == 0 {
                terms.remove(m);
            }
        }
        Polynomial { terms }
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial {
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut terms: BTreeMap<Monomial, i64> = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m = mul_monomials(ma, mb);
                let entry = terms.entry(m).or_insert(0);
                *entry += ca * cb;
            }
        }
        terms.retain(|_, c| *c != 0);
        Polynomial { terms }
    }

    pub fn scale(&self, c: i64) -> Polynomial {
        if c == 0 {
            return Polynomial::zero();
        }
        Polynomial {
            terms: self.terms.iter().map(|(m, &a)| (m.clone(), a * c)).collect(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        self.terms.keys().map(monomial_degree).max()
    }

    pub fn lowest_degree(&self) -> Option<usize> {
        self.terms.keys().map(monomial_degree).min()
    }

    /// Homogeneous part of minimal degree; zero for the zero polynomial.
    pub fn lowest_degree_part(&self) -> Polynomial {
        match self.lowest_degree() {
            None => Polynomial::zero(),
            Some(d) => Polynomial {
                terms: self
                    .terms
                    .iter()
                    .filter(|(m, _)| monomial_degree(m) == d)
                    .map(|(m, &c)| (m.clone(), c))
                    .collect(),
            },
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut vs: Vec<Var> = self
            .terms
            .keys()
            .flat_map(|m| m.iter().map(|&(v, _)| v))
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    /// Evaluates modulo q; `assign` gives each variable a residue.
    pub fn eval_mod(&self, q: u64, assign: &dyn Fn(Var) -> u64) -> u64 {
        let mut total: u64 = 0;
        for (m, &c) in &self.terms {
            let mut prod: u64 = c.rem_euclid(q as i64) as u64;
            for &(v, e) in m {
                let x = assign(v) % q;
                for _ in 0..e {
                    prod = prod * x % q;
                }
            }
            total = (total + prod) % q;
        }
        total
    }
}

fn mul_monomials(a: &Monomial, b: &Monomial) -> Monomial {
    let mut out = a.clone();
    for &(v, e) in b {
        match out.iter_mut().find(|(u, _)| *u == v) {
            Some((_, exp)) => *exp += e,
            None => out.push((v, e)),
        }
    }
    out.sort_unstable_by_key(|&(v, _)| v);
    out
}

fn fmt_var(f: &mut fmt::Formatter<'_>, (i, j): Var) -> fmt::Result {
    if i < 10 && j < 10 {
        write!(f, "x{i}{j}")
    } else {
        write!(f, "x{{{i},{j}}}")
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // graded order: higher degree first, lexicographic within a degree
        let mut ordered: Vec<(&Monomial, &i64)> = self.terms.iter().collect();
        ordered.sort_by(|(ma, _), (mb, _)| {
            monomial_degree(mb).cmp(&monomial_degree(ma)).then(ma.cmp(mb))
        });
        for (idx, (m, &c)) in ordered.into_iter().enumerate() {
            let mag = c.unsigned_abs();
            if idx == 0 {
                if c < 0 {
                    write!(f, "-")?;
                }
            } else if c < 0 {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut need_star = false;
            if mag != 1 || m.is_empty() {
                write!(f, "{mag}")?;
                need_star = true;
            }
            for &(v, e) in m {
                if need_star {
                    write!(f, "*")?;
                }
                fmt_var(f, v)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
                need_star = true;
            }
        }
        Ok(())
    }
}

impl std::str::FromStr for Polynomial {
    type Err = Error;

    /// Parses the text form, e.g. `x31*x42 - x32*x41` or `2*x{10,2}^3 + 1`.
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        if s == "0" {
            return Ok(Polynomial::zero());
        }
        let mut out = Polynomial::zero();
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut sign = 1i64;
        if bytes[0] == b'+' || bytes[0] == b'-' {
            sign = if bytes[0] == b'-' { -1 } else { 1 };
            pos = 1;
        }
        loop {
            let (term, next) = parse_term(&s, pos, sign)?;
            out = out.add(&term);
            pos = next;
            if pos == s.len() {
                break;
            }
            sign = match bytes[pos] {
                b'+' => 1,
                b'-' => -1,
                c => return Err(Error::Parse(format!("unexpected '{}' at {pos}", c as char))),
            };
            pos += 1;
        }
        Ok(out)
    }
}

fn parse_term(s: &str, mut pos: usize, sign: i64) -> Result<(Polynomial, usize)> {
    let bytes = s.as_bytes();
    let mut coeff: i64 = 1;
    let mut term = Polynomial::constant(1);
    loop {
        if pos < s.len() && bytes[pos].is_ascii_digit() {
            let start = pos;
            while pos < s.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            let num: i64 = s[start..pos]
                .parse()
                .map_err(|_| Error::Parse(format!("bad coefficient at {start}")))?;
            coeff *= num;
        } else if pos < s.len() && bytes[pos] == b'x' {
            pos += 1;
            let (i, j, next) = parse_var_indices(s, pos)?;
            pos = next;
            let mut exp = 1u8;
            if pos < s.len() && bytes[pos] == b'^' {
                let start = pos + 1;
                pos = start;
                while pos < s.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
                exp = s[start..pos]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad exponent at {start}")))?;
            }
            if i <= j || j == 0 {
                return Err(Error::Parse(format!("variable x{i}{j} needs i > j >= 1")));
            }
            let v = Polynomial::var(i, j);
            for _ in 0..exp {
                term = term.mul(&v);
            }
        } else {
            return Err(Error::Parse(format!("expected factor at {pos} in '{s}'")));
        }
        if pos < s.len() && bytes[pos] == b'*' {
            pos += 1;
        } else {
            break;
        }
    }
    Ok((term.scale(coeff * sign), pos))
}

fn parse_var_indices(s: &str, pos: usize) -> Result<(u8, u8, usize)> {
    let bytes = s.as_bytes();
    if pos < s.len() && bytes[pos] == b'{' {
        let close = s[pos..]
            .find('}')
            .ok_or_else(|| Error::Parse("unterminated '{'".into()))?
            + pos;
        let inner = &s[pos + 1..close];
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::Parse(format!("bad variable '{inner}'")))?;
        let i = a.parse().map_err(|_| Error::Parse(format!("bad index '{a}'")))?;
        let j = b.parse().map_err(|_| Error::Parse(format!("bad index '{b}'")))?;
        Ok((i, j, close + 1))
    } else if pos + 1 < s.len() && bytes[pos].is_ascii_digit() && bytes[pos + 1].is_ascii_digit() {
        Ok((bytes[pos] - b'0', bytes[pos + 1] - b'0', pos + 2))
    } else {
        Err(Error::Parse(format!("bad variable at {pos} in '{s}'")))
    }
}
