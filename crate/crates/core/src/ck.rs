//! Exact Cuntz–Krieger monomial algebra.
//!
//! Elements are finite rational combinations of monomials `S_μ S_ν*`. Products
//! are resolved with `S_i* S_j = δ_ij Σ_k A_jk S_k S_k*`, so every product of
//! monomials is again a combination of monomials.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::words::{
    inverse_letter, is_admissible, AdjacencyModel, BoundaryPoint, Letter, VertexVt, Word,
};
use crate::{Error, Rat, Result};

/// `S_μ S_ν*`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Monomial {
    pub mu: Word,
    pub nu: Word,
}

impl Monomial {
    pub fn new(mu: Word, nu: Word) -> Self {
        Self { mu, nu }
    }

    pub fn unit() -> Self {
        Self { mu: Word::empty(), nu: Word::empty() }
    }

    /// `S_i`.
    pub fn isometry(i: Letter) -> Self {
        Self { mu: Word(vec![i]), nu: Word::empty() }
    }

    /// `S_i*`.
    pub fn coisometry(i: Letter) -> Self {
        Self { mu: Word::empty(), nu: Word(vec![i]) }
    }

    pub fn adjoint(&self) -> Self {
        Self { mu: self.nu.clone(), nu: self.mu.clone() }
    }

    pub fn is_diagonal(&self) -> bool {
        self.mu == self.nu
    }

    /// Whether the monomial is a nonzero operator.
    pub fn is_nonzero(&self, a: &AdjacencyModel) -> bool {
        if !matches!(is_admissible(&self.mu, a), Ok(true))
            || !matches!(is_admissible(&self.nu, a), Ok(true))
        {
            return false;
        }
        match (self.mu.last(), self.nu.last()) {
            (Some(x), Some(y)) => (0..a.size() as Letter).any(|k| a.allowed(x, k) && a.allowed(y, k)),
            _ => true,
        }
    }

    /// Parses `mu:nu`, e.g. `a1:a1`, `a1:e`, `:b2`.
    pub fn parse(s: &str) -> Result<Self> {
        let (m, n) = s
            .split_once(':')
            .ok_or_else(|| Error::Domain(format!("monomial '{s}' must have the form mu:nu")))?;
        Ok(Self { mu: Word::parse(m)?, nu: Word::parse(n)? })
    }

    /// Acts on the prefix `w` of an infinite word: strips ν, then attaches μ.
    /// Returns `None` if `w` does not start with ν, if nothing of `w` is left
    /// after stripping, or if the attachment is not admissible.
    pub fn act_on_prefix(&self, w: &Word, a: &AdjacencyModel) -> Option<Word> {
        if !w.starts_with(&self.nu) || w.len() <= self.nu.len() {
            return None;
        }
        let rest = &w.0[self.nu.len()..];
        if let Some(x) = self.mu.last() {
            if !a.allowed(x, rest[0]) {
                return None;
            }
        }
        let mut out = self.mu.0.clone();
        out.extend_from_slice(rest);
        Some(Word(out))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.mu, self.nu)
    }
}

/// Parses a chain such as `a1:a1,b1:e`.
pub fn parse_chain(s: &str) -> Result<Vec<Monomial>> {
    let chain: Vec<Monomial> = s
        .split(|c| c == ',' || c == ';')
        .filter(|p| !p.trim().is_empty())
        .map(|p| Monomial::parse(p.trim()))
        .collect::<Result<_>>()?;
    if chain.is_empty() {
        return Err(Error::Domain("empty chain".into()));
    }
    Ok(chain)
}

pub fn chain_to_string(chain: &[Monomial]) -> String {
    chain.iter().map(|m| m.to_string()).collect::<Vec<_>>().join(",")
}

#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct CKElement {
    pub terms: BTreeMap<Monomial, Rat>,
}

impl CKElement {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::from_monomial(Monomial::unit())
    }

    pub fn from_monomial(m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Rat::one());
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: Rat) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m.clone()).or_insert_with(Rat::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add(&self, other: &CKElement) -> CKElement {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, c: &Rat) -> CKElement {
        let mut out = CKElement::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), v * c);
        }
        out
    }

    /// Drops monomials that vanish as operators.
    pub fn pruned(&self, a: &AdjacencyModel) -> CKElement {
        CKElement {
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.is_nonzero(a))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Splits every monomial until both words have length at least `len`,
    /// using `S_μ S_ν* = Σ_k S_{μk} S_{νk}*`. Two elements are equal as
    /// operators iff their refinements to a common large length agree.
    pub fn refined(&self, a: &AdjacencyModel, len: usize) -> CKElement {
        let mut out = CKElement::zero();
        let mut stack: Vec<(Monomial, Rat)> =
            self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect();
        while let Some((m, c)) = stack.pop() {
            if !m.is_nonzero(a) {
                continue;
            }
            if m.mu.len() >= len && m.nu.len() >= len {
                out.add_term(m, c);
                continue;
            }
            for k in 0..a.size() as Letter {
                let ok_mu = m.mu.last().map_or(true, |x| a.allowed(x, k));
                let ok_nu = m.nu.last().map_or(true, |x| a.allowed(x, k));
                if ok_mu && ok_nu {
                    let mut mu = m.mu.clone();
                    mu.0.push(k);
                    let mut nu = m.nu.clone();
                    nu.0.push(k);
                    stack.push((Monomial { mu, nu }, c.clone()));
                }
            }
        }
        out
    }

    pub fn operator_eq(&self, other: &CKElement, a: &AdjacencyModel) -> bool {
        let depth = self
            .terms
            .keys()
            .chain(other.terms.keys())
            .map(|m| m.mu.len().max(m.nu.len()))
            .max()
            .unwrap_or(0)
            + 1;
        self.refined(a, depth) == other.refined(a, depth)
    }
}

impl fmt::Display for CKElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(m, c)| format!("{c}*[{m}]")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `S_ν* S_α` as a combination of monomials.
fn contract(nu: &Word, alpha: &Word, a: &AdjacencyModel) -> Vec<Monomial> {
    if alpha.len() > nu.len() {
        if !alpha.starts_with(nu) {
            return vec![];
        }
        let rho = Word(alpha.0[nu.len()..].to_vec());
        if let Some(x) = nu.last() {
            if !a.allowed(x, rho.0[0]) {
                return vec![];
            }
        }
        vec![Monomial { mu: rho, nu: Word::empty() }]
    } else if nu.len() > alpha.len() {
        if !nu.starts_with(alpha) {
            return vec![];
        }
        let rho = Word(nu.0[alpha.len()..].to_vec());
        if let Some(x) = alpha.last() {
            if !a.allowed(x, rho.0[0]) {
                return vec![];
            }
        }
        vec![Monomial { mu: Word::empty(), nu: rho }]
    } else if nu != alpha {
        vec![]
    } else if let Some(j) = nu.last() {
        (0..a.size() as Letter)
            .filter(|&k| a.allowed(j, k))
            .map(|k| Monomial { mu: Word(vec![k]), nu: Word(vec![k]) })
            .collect()
    } else {
        vec![Monomial::unit()]
    }
}

/// `S_μ (S_ρ S_τ*) S_β*`, with the admissibility of both junctions.
fn sandwich(mu: &Word, inner: &Monomial, beta: &Word, a: &AdjacencyModel) -> Option<Monomial> {
    let join = |left: &Word, right: &Word| -> Option<Word> {
        match (left.last(), right.first()) {
            (Some(x), Some(y)) if !a.allowed(x, y) => None,
            _ => Some(left.concat(right)),
        }
    };
    let new_mu = join(mu, &inner.mu)?;
    let new_nu = join(beta, &inner.nu)?;
    let m = Monomial { mu: new_mu, nu: new_nu };
    if m.is_nonzero(a) {
        Some(m)
    } else {
        None
    }
}

pub fn multiply_monomials(x: &Monomial, y: &Monomial, a: &AdjacencyModel) -> CKElement {
    let mut out = CKElement::zero();
    for inner in contract(&x.nu, &y.mu, a) {
        if let Some(m) = sandwich(&x.mu, &inner, &y.nu, a) {
            out.add_term(m, Rat::one());
        }
    }
    out
}

pub fn multiply(x: &CKElement, y: &CKElement, a: &AdjacencyModel) -> CKElement {
    let mut out = CKElement::zero();
    for (mx, cx) in &x.terms {
        for (my, cy) in &y.terms {
            let prod = multiply_monomials(mx, my, a);
            let c = cx * cy;
            for (m, v) in prod.terms {
                out.add_term(m, v * &c);
            }
        }
    }
    out
}

pub fn adjoint(x: &CKElement) -> CKElement {
    CKElement { terms: x.terms.iter().map(|(m, c)| (m.adjoint(), c.clone())).collect() }
}

pub fn chain_product(chain: &[Monomial], a: &AdjacencyModel) -> CKElement {
    let mut acc = CKElement::unit();
    for m in chain {
        acc = multiply(&acc, &CKElement::from_monomial(m.clone()), a);
    }
    acc
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DichotomyResult {
    /// `Σ c_l χ_{C_{ρ_l}}`, sorted by ρ.
    CylinderSum(Vec<(Word, Rat)>),
    ZeroDiagonal,
}

impl DichotomyResult {
    pub fn cylinders(&self) -> &[(Word, Rat)] {
        match self {
            DichotomyResult::CylinderSum(v) => v,
            DichotomyResult::ZeroDiagonal => &[],
        }
    }
}

/// Diagonal part of `S_{μ1}S_{ν1}* ⋯ S_{μm}S_{νm}*` on the vertex space, as a
/// cylinder sum with every cylinder of length at least `common_length`.
pub fn diagonal_dichotomy(
    chain: &[Monomial],
    a: &AdjacencyModel,
    common_length: usize,
) -> Result<DichotomyResult> {
    if chain.is_empty() {
        return Err(Error::Domain("chain must be nonempty".into()));
    }
    for m in chain {
        a.check_letters(&m.mu)?;
        a.check_letters(&m.nu)?;
    }
    let prod = chain_product(chain, a);
    let diag = CKElement {
        terms: prod
            .terms
            .into_iter()
            .filter(|(m, _)| m.is_diagonal())
            .collect(),
    };
    let refined = diag.refined(a, common_length);
    let cyl: Vec<(Word, Rat)> = refined
        .terms
        .into_iter()
        .map(|(m, c)| (m.mu, c))
        .collect();
    if cyl.is_empty() {
        Ok(DichotomyResult::ZeroDiagonal)
    } else {
        Ok(DichotomyResult::CylinderSum(cyl))
    }
}

/// Image of a free-group vertex (as a reduced group word) under `S_μ S_ν*`
/// for the fixed point `t = t0^∞`. Works on raw letters for speed.
pub fn monomial_on_group_word(
    m: &Monomial,
    g: &[Letter],
    t0: Letter,
    a: &AdjacencyModel,
) -> Option<Vec<Letter>> {
    // x = g·t in reduced form: drop trailing inverse letters of t0.
    let c = inverse_letter(t0);
    let mut w_len = g.len();
    while w_len > 0 && g[w_len - 1] == c {
        w_len -= 1;
    }
    let x_letter = |i: usize| if i < w_len { g[i] } else { t0 };
    for (i, &y) in m.nu.0.iter().enumerate() {
        if x_letter(i) != y {
            return None;
        }
    }
    if let Some(last) = m.mu.last() {
        if !a.allowed(last, x_letter(m.nu.len())) {
            return None;
        }
    }
    let mut out: Vec<Letter> = m.mu.0.clone();
    for &y in m.nu.0.iter().rev() {
        let inv = inverse_letter(y);
        if out.last() == Some(&y) {
            out.pop();
        } else {
            out.push(inv);
        }
    }
    for &y in g {
        if out.last() == Some(&inverse_letter(y)) {
            out.pop();
        } else {
            out.push(y);
        }
    }
    Some(out)
}

/// The vector `x·δ_v` on `ℓ²(𝒱_t)` for a fixed point `t`.
pub fn act_on_vertex(
    x: &CKElement,
    v: &VertexVt,
    t: &BoundaryPoint,
    a: &AdjacencyModel,
) -> Result<BTreeMap<VertexVt, Rat>> {
    a.require_free()?;
    let t0 = t.fixed_letter()?;
    let mut out: BTreeMap<VertexVt, Rat> = BTreeMap::new();
    for (m, c) in &x.terms {
        if let Some(g) = monomial_on_group_word(m, &v.group_word.0, t0, a) {
            let w = VertexVt::from_group_word(&Word(g), t, a)?;
            debug_assert_eq!(w.n, v.n + m.mu.len() as i64 - m.nu.len() as i64);
            let e = out.entry(w.clone()).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                out.remove(&w);
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{rat, words::Word};

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn mono(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    #[test]
    fn prefix_contraction() {
        let a = AdjacencyModel::free_group(2);
        let p = multiply_monomials(&mono(":a1"), &mono("a1a2:"), &a);
        assert_eq!(p, CKElement::from_monomial(mono("a2:")));
        assert!(multiply_monomials(&mono(":a1"), &mono("b1:"), &a).is_zero());
    }

    #[test]
    fn equal_words_expand() {
        let a = AdjacencyModel::free_group(2);
        let p = multiply_monomials(&mono(":a1"), &mono("a1:"), &a);
        let mut expect = CKElement::zero();
        for s in ["a1:a1", "a2:a2", "b2:b2"] {
            expect.add_term(mono(s), rat(1));
        }
        assert_eq!(p, expect);
    }

    #[test]
    fn adjoint_examples() {
        let x = CKElement::from_monomial(mono("a1:b1"));
        assert_eq!(adjoint(&x), CKElement::from_monomial(mono("b1:a1")));
        assert_eq!(adjoint(&CKElement::unit()), CKElement::unit());
    }

    #[test]
    fn dichotomy_examples() {
        let a = AdjacencyModel::free_group(2);
        let r = diagonal_dichotomy(&[mono("a1:a1"), mono("a1:a1")], &a, 2).unwrap();
        let cyl: Vec<(Word, Rat)> = ["a1a1", "a1a2", "a1b2"].iter().map(|x| (w(x), rat(1))).collect();
        assert_eq!(r, DichotomyResult::CylinderSum(cyl));
        let r = diagonal_dichotomy(&[mono("a1:a2")], &a, 0).unwrap();
        assert_eq!(r, DichotomyResult::ZeroDiagonal);
        // S_a1 S_b1* S_b1 S_a1* = S_a1 (1 - S_a1 S_a1*) S_a1* = χ_a1 − χ_{a1a1}
        let r = diagonal_dichotomy(&[mono("a1:b1"), mono("b1:a1")], &a, 2).unwrap();
        let expect = CKElement::from_monomial(mono("a1:a1"))
            .add(&CKElement::from_monomial(mono("a1a1:a1a1")).scale(&rat(-1)))
            .refined(&a, 2);
        let got: Vec<(Word, Rat)> = expect.terms.into_iter().map(|(m, c)| (m.mu, c)).collect();
        assert_eq!(r, DichotomyResult::CylinderSum(got));
    }

    #[test]
    fn unit_acts_trivially() {
        let a = AdjacencyModel::free_group(2);
        let t = BoundaryPoint::fixed_point(0);
        let v = VertexVt::from_group_word(&w("a2 b1"), &t, &a).unwrap();
        let img = act_on_vertex(&CKElement::unit(), &v, &t, &a).unwrap();
        assert_eq!(img.len(), 1);
        assert_eq!(img.get(&v), Some(&rat(1)));
    }

    #[test]
    fn generators_on_vertices() {
        let a = AdjacencyModel::free_group(2);
        let t = BoundaryPoint::fixed_point(0);
        let root = VertexVt::from_group_word(&Word::empty(), &t, &a).unwrap();
        let img = act_on_vertex(&CKElement::from_monomial(mono("a1:")), &root, &t, &a).unwrap();
        let target = VertexVt::from_group_word(&w("a1"), &t, &a).unwrap();
        assert_eq!(img.get(&target), Some(&rat(1)));
        let v = VertexVt::from_group_word(&w("b1 a2"), &t, &a).unwrap();
        let img = act_on_vertex(&CKElement::from_monomial(mono(":a1")), &v, &t, &a).unwrap();
        assert!(img.is_empty());
    }

    #[test]
    fn chain_parsing() {
        let c = parse_chain("a1:a1, b1:e").unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(chain_to_string(&c), "a1:a1,b1:e");
        assert!(parse_chain("").is_err());
    }
}
