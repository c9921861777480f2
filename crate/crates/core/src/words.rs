//! Admissible words, eventually periodic boundary points and the vertex
//! combinatorics of the free-group boundary.
//!
//! Letters are small integers. For the free group on `d` generators the
//! letter `2j` is `a_{j+1}` and `2j+1` is `b_{j+1} = a_{j+1}^{-1}`, so the
//! inverse of a letter is obtained by flipping its lowest bit.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{rat, ratio, Error, Rat, Result};

pub type Letter = u8;

#[inline]
pub fn inverse_letter(x: Letter) -> Letter {
    x ^ 1
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_letters(letters: &[Letter]) -> Self {
        Word(letters.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Letter> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Letter> {
        self.0.last().copied()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    pub fn starts_with(&self, prefix: &Word) -> bool {
        self.0.starts_with(&prefix.0)
    }

    /// Free-group inverse (reversed, letterwise inverted).
    pub fn group_inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&x| inverse_letter(x)).collect())
    }

    /// Free reduction of the word.
    pub fn reduced(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &x in &self.0 {
            if out.last() == Some(&inverse_letter(x)) {
                out.pop();
            } else {
                out.push(x);
            }
        }
        Word(out)
    }

    /// Reduced product in the free group.
    pub fn group_mul(&self, other: &Word) -> Word {
        self.concat(other).reduced()
    }

    /// Parses words such as `a1 b2`, `a1a2`, `a1,b1`; `e` or the empty
    /// string is the empty word.
    pub fn parse(s: &str) -> Result<Word> {
        let s = s.trim();
        if s.is_empty() || s == "e" {
            return Ok(Word::empty());
        }
        let bytes: Vec<char> = s.chars().collect();
        let mut i = 0;
        let mut out = Vec::new();
        while i < bytes.len() {
            let c = bytes[i];
            if c.is_whitespace() || c == ',' || c == '.' {
                i += 1;
                continue;
            }
            let base = match c {
                'a' => 0u32,
                'b' => 1u32,
                _ => return Err(Error::Domain(format!("cannot parse letter at '{}'", &s[i..]))),
            };
            i += 1;
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if start == i {
                return Err(Error::Domain(format!("letter without index in '{s}'")));
            }
            let idx: u32 = bytes[start..i].iter().collect::<String>().parse().unwrap();
            if idx == 0 || idx > 120 {
                return Err(Error::Domain(format!("generator index {idx} out of range")));
            }
            out.push((2 * (idx - 1) + base) as Letter);
        }
        Ok(Word(out))
    }
}

pub fn letter_name(x: Letter) -> String {
    let j = x / 2 + 1;
    if x % 2 == 0 {
        format!("a{j}")
    } else {
        format!("b{j}")
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        let names: Vec<String> = self.0.iter().map(|&x| letter_name(x)).collect();
        write!(f, "{}", names.join(""))
    }
}

/// 0/1 transition matrix of a shift of finite type.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdjacencyModel {
    size: usize,
    entries: Vec<Vec<u8>>,
    free_rank: Option<usize>,
}

impl AdjacencyModel {
    pub fn new(entries: Vec<Vec<u8>>) -> Result<Self> {
        let size = entries.len();
        if size == 0 {
            return Err(Error::Domain("empty adjacency matrix".into()));
        }
        for row in &entries {
            if row.len() != size {
                return Err(Error::Domain("adjacency matrix must be square".into()));
            }
            if row.iter().any(|&v| v > 1) {
                return Err(Error::Domain("adjacency entries must be 0 or 1".into()));
            }
        }
        for i in 0..size {
            if entries[i].iter().all(|&v| v == 0) {
                return Err(Error::Domain(format!("row {i} is zero")));
            }
            if (0..size).all(|r| entries[r][i] == 0) {
                return Err(Error::Domain(format!("column {i} is zero")));
            }
        }
        Ok(Self { size, entries, free_rank: None })
    }

    /// The 2d×2d matrix of the free group boundary: identity 2×2 blocks on
    /// the diagonal, all-ones blocks elsewhere.
    pub fn free_group(d: usize) -> Self {
        assert!(d >= 1 && d <= 120, "free group rank out of range");
        let n = 2 * d;
        let mut entries = vec![vec![1u8; n]; n];
        for j in 0..d {
            entries[2 * j][2 * j + 1] = 0;
            entries[2 * j + 1][2 * j] = 0;
        }
        Self { size: n, entries, free_rank: Some(d) }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn free_rank(&self) -> Option<usize> {
        self.free_rank
    }

    pub fn require_free(&self) -> Result<usize> {
        self.free_rank
            .ok_or_else(|| Error::Unsupported("operation needs the free-group model".into()))
    }

    pub fn entry(&self, i: Letter, j: Letter) -> u8 {
        self.entries[i as usize][j as usize]
    }

    pub fn allowed(&self, i: Letter, j: Letter) -> bool {
        self.entries[i as usize][j as usize] == 1
    }

    pub fn check_letters(&self, w: &Word) -> Result<()> {
        if let Some(&x) = w.0.iter().find(|&&x| x as usize >= self.size) {
            return Err(Error::Domain(format!("letter {x} outside alphabet of size {}", self.size)));
        }
        Ok(())
    }
}

pub fn is_admissible(w: &Word, a: &AdjacencyModel) -> Result<bool> {
    a.check_letters(w)?;
    Ok(w.0.windows(2).all(|p| a.allowed(p[0], p[1])))
}

/// All admissible words of the given length whose first and last letters
/// satisfy the optional predicates, in lexicographic order.
pub fn enumerate_admissible(
    a: &AdjacencyModel,
    length: usize,
    first: Option<&dyn Fn(Letter) -> bool>,
    last: Option<&dyn Fn(Letter) -> bool>,
) -> Vec<Word> {
    let mut out = Vec::new();
    if length == 0 {
        out.push(Word::empty());
        return out;
    }
    let mut cur: Vec<Letter> = Vec::with_capacity(length);
    fn rec(
        a: &AdjacencyModel,
        length: usize,
        cur: &mut Vec<Letter>,
        first: Option<&dyn Fn(Letter) -> bool>,
        last: Option<&dyn Fn(Letter) -> bool>,
        out: &mut Vec<Word>,
    ) {
        if cur.len() == length {
            if last.map_or(true, |p| p(*cur.last().unwrap())) {
                out.push(Word(cur.clone()));
            }
            return;
        }
        for x in 0..a.size() as Letter {
            if cur.is_empty() {
                if !first.map_or(true, |p| p(x)) {
                    continue;
                }
            } else if !a.allowed(*cur.last().unwrap(), x) {
                continue;
            }
            cur.push(x);
            rec(a, length, cur, first, last, out);
            cur.pop();
        }
    }
    rec(a, length, &mut cur, first, last, &mut out);
    out
}

/// An eventually periodic infinite word `preperiod · period^∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub preperiod: Word,
    pub period: Word,
}

impl BoundaryPoint {
    pub fn new(preperiod: Word, period: Word) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::Domain("period must be nonempty".into()));
        }
        Ok(Self { preperiod, period }.canonical())
    }

    pub fn fixed_point(letter: Letter) -> Self {
        Self { preperiod: Word::empty(), period: Word(vec![letter]) }
    }

    pub fn is_fixed_point(&self) -> bool {
        self.preperiod.is_empty() && self.period.len() == 1
    }

    /// The letter repeated by a fixed point.
    pub fn fixed_letter(&self) -> Result<Letter> {
        if self.is_fixed_point() {
            Ok(self.period.0[0])
        } else {
            Err(Error::Unsupported("boundary point is not a fixed point".into()))
        }
    }

    pub fn is_admissible(&self, a: &AdjacencyModel) -> Result<bool> {
        let mut probe = self.preperiod.clone();
        probe.0.extend_from_slice(&self.period.0);
        probe.0.push(self.period.0[0]);
        is_admissible(&probe, a)
    }

    /// Unique representative: primitive period, shortest preperiod.
    pub fn canonical(&self) -> Self {
        let per = &self.period.0;
        let n = per.len();
        let mut p = n;
        for cand in 1..=n {
            if n % cand == 0 && (0..n).all(|i| per[i] == per[i % cand]) {
                p = cand;
                break;
            }
        }
        let mut period: Vec<Letter> = per[..p].to_vec();
        let mut pre = self.preperiod.0.clone();
        while let Some(&x) = pre.last() {
            if x == *period.last().unwrap() {
                pre.pop();
                period.rotate_right(1);
            } else {
                break;
            }
        }
        Self { preperiod: Word(pre), period: Word(period) }
    }

    pub fn letter(&self, i: usize) -> Letter {
        let pl = self.preperiod.len();
        if i < pl {
            self.preperiod.0[i]
        } else {
            self.period.0[(i - pl) % self.period.len()]
        }
    }

    pub fn prefix(&self, k: usize) -> Word {
        Word((0..k).map(|i| self.letter(i)).collect())
    }

    /// The shift σ^k.
    pub fn shift(&self, k: usize) -> Self {
        let pl = self.preperiod.len();
        if k <= pl {
            Self { preperiod: Word(self.preperiod.0[k..].to_vec()), period: self.period.clone() }
                .canonical()
        } else {
            let phase = (k - pl) % self.period.len();
            let mut per = self.period.0.clone();
            per.rotate_left(phase);
            Self { preperiod: Word::empty(), period: Word(per) }.canonical()
        }
    }

    /// Concatenation `w · self` without reduction.
    pub fn prepend(&self, w: &Word) -> Self {
        Self { preperiod: w.concat(&self.preperiod), period: self.period.clone() }.canonical()
    }

    /// Reduced free-group product `g · self`.
    pub fn group_prepend(&self, g: &Word) -> Self {
        let mut x = self.canonical();
        let mut g = g.0.clone();
        while let Some(&last) = g.last() {
            if x.letter(0) == inverse_letter(last) {
                g.pop();
                x = x.shift(1);
            } else {
                break;
            }
        }
        x.prepend(&Word(g))
    }

    pub fn starts_with(&self, w: &Word) -> bool {
        w.0.iter().enumerate().all(|(i, &x)| self.letter(i) == x)
    }
}

impl fmt::Display for BoundaryPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.preperiod.is_empty() {
            write!(f, "({})^inf", self.period)
        } else {
            write!(f, "{}({})^inf", self.preperiod, self.period)
        }
    }
}

/// ℓ(μ,t): how many trailing letters of μ cancel against the head of t.
pub fn cancellations(mu: &Word, t: &BoundaryPoint, a: &AdjacencyModel) -> Result<usize> {
    a.require_free()?;
    a.check_letters(mu)?;
    let n = mu.len();
    let mut k = 0;
    while k < n && mu.0[n - 1 - k] == inverse_letter(t.letter(k)) {
        k += 1;
    }
    Ok(k)
}

/// κ(x,n,y): the least k ≥ max(0,−n) with σ^{n+k}(x) = σ^k(y).
pub fn kappa(x: &BoundaryPoint, n: i64, y: &BoundaryPoint) -> Option<usize> {
    let k0 = if n < 0 { (-n) as usize } else { 0 };
    let px = x.period.len();
    let py = y.period.len();
    let lcm = px / gcd(px, py) * py;
    let span = x.preperiod.len() + y.preperiod.len() + lcm + 1;
    let mut sx = x.shift((n + k0 as i64) as usize);
    let mut sy = y.shift(k0);
    for k in k0..=k0 + span {
        if sx == sy {
            return Some(k);
        }
        sx = sx.shift(1);
        sy = sy.shift(1);
    }
    None
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// ψ(n,k): eigenvalue of the Cuntz–Krieger Dirac operator on a vertex.
pub fn psi(n: i64, k: i64) -> Result<i64> {
    if k < 0 || k < -n {
        return Err(Error::Domain(format!("psi needs k >= max(0,-n), got n={n}, k={k}")));
    }
    Ok(if k == 0 { n } else { -n.abs() - k })
}

/// Exponent ||μ|−2ℓ|+ℓ of the weight Ψ_t(μ), and its exponential.
pub fn psi_weight(mu: &Word, t: &BoundaryPoint, a: &AdjacencyModel) -> Result<(u64, f64)> {
    let l = cancellations(mu, t, a)? as i64;
    let e = ((mu.len() as i64 - 2 * l).abs() + l) as u64;
    Ok((e, (e as f64).exp()))
}

/// A vertex of the boundary groupoid graph, coordinatised by the reduced
/// group word μ with x = μt and n = |μ| − 2ℓ(μ,t).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexVt {
    pub group_word: Word,
    pub n: i64,
    pub k: i64,
}

impl VertexVt {
    pub fn from_group_word(mu: &Word, t: &BoundaryPoint, a: &AdjacencyModel) -> Result<Self> {
        let mu = mu.reduced();
        let l = cancellations(&mu, t, a)? as i64;
        Ok(Self { n: mu.len() as i64 - 2 * l, k: l, group_word: mu })
    }

    /// The Dirac eigenvalue ψ(n,k) on this vertex.
    pub fn dirac_eigenvalue(&self) -> i64 {
        if self.k == 0 {
            self.n
        } else {
            -self.n.abs() - self.k
        }
    }

    pub fn abs_dirac(&self) -> i64 {
        self.n.abs() + self.k
    }
}

/// φ_t(μ) = (μt, |μ|−2ℓ(μ,t)).
pub fn phi_t(mu: &Word, t: &BoundaryPoint, a: &AdjacencyModel) -> Result<(BoundaryPoint, i64)> {
    let l = cancellations(mu, t, a)? as i64;
    Ok((t.group_prepend(mu), mu.len() as i64 - 2 * l))
}

/// Counts N(q) = c_λ·(2d−1)^q + c_1 + c_alt·(−1)^q, valid for q ≥ 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CountSeries {
    pub lam: Rat,
    pub one: Rat,
    pub alt: Rat,
}

impl CountSeries {
    pub fn eval(&self, d: usize, q: u32) -> Rat {
        let lam = rat(2 * d as i64 - 1);
        let sign = if q % 2 == 0 { rat(1) } else { rat(-1) };
        &self.lam * num::pow(lam, q as usize) + &self.one + &self.alt * sign
    }
}

/// Number of reduced words of length q ≥ 1 with first letter in `first`
/// and last letter in `last`, via the spectral decomposition of the
/// free-group adjacency matrix (eigenvalues 2d−1, +1, −1).
pub fn letter_set_counts(d: usize, first: &[bool], last: &[bool]) -> CountSeries {
    let n = 2 * d;
    assert!(first.len() == n && last.len() == n);
    let f = first.iter().filter(|&&b| b).count() as i64;
    let b = last.iter().filter(|&&b| b).count() as i64;
    let fb = (0..n).filter(|&i| first[i] && last[i]).count() as i64;
    let fpib = (0..n).filter(|&i| first[i] && last[i ^ 1]).count() as i64;
    let lam = 2 * d as i64 - 1;
    let plus = ratio(fb - fpib, 2);
    let minus = ratio(fb + fpib, 2) - ratio(f * b, 2 * d as i64);
    CountSeries { lam: ratio(f * b, 2 * d as i64 * lam), one: plus, alt: -minus }
}

/// #{x : σ^{n+k}(x) = σ^k(t), x_{n+k} ≠ t_k, A_{ρ_end,x_1} = 1}: the number of
/// admissible prefixes of length n+k that synchronise with t after exactly
/// k steps, following the letter `boundary_letter`.
pub fn word_count(
    a: &AdjacencyModel,
    n: i64,
    k: i64,
    boundary_letter: Letter,
    t: &BoundaryPoint,
) -> Result<u128> {
    let d = a.require_free()?;
    if k < 1 || k < 1 - n || n + k < 1 {
        return Err(Error::Domain(format!("word_count needs k >= max(1,1-n), got n={n}, k={k}")));
    }
    let len = (n + k) as u32;
    let tk = t.letter(k as usize - 1);
    let tk1 = t.letter(k as usize);
    let size = 2 * d;
    let first: Vec<bool> = (0..size as Letter).map(|x| a.allowed(boundary_letter, x)).collect();
    let last: Vec<bool> = (0..size as Letter).map(|x| x != tk && a.allowed(x, tk1)).collect();
    let c = letter_set_counts(d, &first, &last).eval(d, len);
    debug_assert!(c.is_integer());
    use num::ToPrimitive;
    Ok(c.to_integer().to_u128().unwrap_or(0))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("a1 b1 a2").0, vec![0, 1, 2]);
        assert_eq!(w("a1b2").0, vec![0, 3]);
        assert_eq!(w("a1b2").to_string(), "a1b2");
        assert!(w("e").is_empty());
        assert!(Word::parse("c1").is_err());
    }

    #[test]
    fn admissibility_examples() {
        let a = AdjacencyModel::free_group(2);
        assert!(is_admissible(&w("a1 a1 a2"), &a).unwrap());
        assert!(!is_admissible(&w("a1 b1"), &a).unwrap());
        assert!(is_admissible(&Word::empty(), &a).unwrap());
        assert!(is_admissible(&Word(vec![9]), &a).is_err());
    }

    #[test]
    fn free_group_matrix_blocks() {
        let a = AdjacencyModel::free_group(3);
        for i in 0..6u8 {
            for j in 0..6u8 {
                let expect = if i / 2 == j / 2 { (i == j) as u8 } else { 1 };
                assert_eq!(a.entry(i, j), expect);
            }
        }
    }

    #[test]
    fn zero_rows_rejected() {
        assert!(AdjacencyModel::new(vec![vec![1, 0], vec![0, 0]]).is_err());
        assert!(AdjacencyModel::new(vec![vec![1, 1], vec![1, 0]]).is_ok());
    }

    #[test]
    fn enumeration_examples() {
        let a = AdjacencyModel::free_group(2);
        assert_eq!(enumerate_admissible(&a, 0, None, None), vec![Word::empty()]);
        assert_eq!(enumerate_admissible(&a, 1, None, None).len(), 4);
        let first = |x: Letter| a.allowed(0, x);
        let last = |x: Letter| x != 0 && a.allowed(x, 0);
        let words = enumerate_admissible(&a, 2, Some(&first), Some(&last));
        assert_eq!(words.len(), 4);
        assert!(words.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn cancellation_examples() {
        let a = AdjacencyModel::free_group(2);
        let t = BoundaryPoint::fixed_point(0);
        assert_eq!(cancellations(&w("a1"), &t, &a).unwrap(), 0);
        assert_eq!(cancellations(&w("b1"), &t, &a).unwrap(), 1);
        assert_eq!(cancellations(&Word::empty(), &t, &a).unwrap(), 0);
        let nonfree = AdjacencyModel::new(vec![vec![1, 1], vec![1, 1]]).unwrap();
        assert!(matches!(cancellations(&w("a1"), &t, &nonfree), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kappa_examples() {
        let a = AdjacencyModel::free_group(2);
        let t = BoundaryPoint::fixed_point(0);
        assert_eq!(kappa(&t, 0, &t), Some(0));
        let (x, n) = phi_t(&w("b1"), &t, &a).unwrap();
        assert_eq!(n, -1);
        assert_eq!(kappa(&x, n, &t), Some(1));
        let other = BoundaryPoint::fixed_point(2);
        assert_eq!(kappa(&other, 0, &t), None);
    }

    #[test]
    fn psi_examples() {
        assert_eq!(psi(0, 0).unwrap(), 0);
        assert_eq!(psi(3, 0).unwrap(), 3);
        assert_eq!(psi(2, 5).unwrap(), -7);
        assert!(psi(-2, 1).is_err());
    }

    #[test]
    fn psi_weight_examples() {
        let a = AdjacencyModel::free_group(2);
        let t = BoundaryPoint::fixed_point(0);
        assert_eq!(psi_weight(&Word::empty(), &t, &a).unwrap(), (0, 1.0));
        assert_eq!(psi_weight(&w("a1"), &t, &a).unwrap().0, 1);
        assert_eq!(psi_weight(&w("b1"), &t, &a).unwrap().0, 2);
    }

    #[test]
    fn boundary_point_canonical_forms() {
        let p = BoundaryPoint::new(w("a1 a1"), w("a1 a1")).unwrap();
        assert_eq!(p, BoundaryPoint::fixed_point(0));
        let q = BoundaryPoint::new(w("a2 b1 a1"), w("b1 a1")).unwrap();
        assert_eq!(q.preperiod, w("a2"));
        assert_eq!(q.shift(3), BoundaryPoint::new(Word::empty(), w("b1 a1")).unwrap());
        assert_eq!(q.shift(4), BoundaryPoint::new(Word::empty(), w("a1 b1")).unwrap());
    }

    #[test]
    fn word_count_small_values() {
        let a = AdjacencyModel::free_group(2);
        let t = BoundaryPoint::fixed_point(0);
        assert_eq!(word_count(&a, 0, 1, 0, &t).unwrap(), 2);
        assert_eq!(word_count(&a, 1, 1, 0, &t).unwrap(), 4);
        // Exhaustive enumeration gives 14 here (see the enumeration test).
        assert_eq!(word_count(&a, 2, 1, 0, &t).unwrap(), 14);
        assert!(word_count(&a, -1, 1, 0, &t).is_err());
    }
}
