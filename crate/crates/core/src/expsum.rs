//! Exponential polynomials and meromorphic traces in `E = e^{-Σ s_j}`.
//!
//! An [`ExpSum`] is a finite sum `Σ c·e^{-k}·e^{-Σ v_j s_j}` with rational
//! `c` and integer `k`, `v`. A [`MeromorphicTrace`] is a finite sum of
//! `ExpSum / (1 − rE)^p` with rational roots `r`. Because `e` is
//! transcendental, a combination `Σ c_k e^{-k}` vanishes iff every `c_k` does,
//! so pole orders and Laurent coefficients below are exact.

use std::collections::BTreeMap;
use std::fmt;

use num::{One, Signed, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{rat, rat_to_f64, Error, Rat, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpSum {
    pub m: usize,
    /// (const_exp, exp_vector) → coefficient.
    pub terms: BTreeMap<(i64, Vec<i64>), Rat>,
}

impl ExpSum {
    pub fn zero(m: usize) -> Self {
        Self { m, terms: BTreeMap::new() }
    }

    pub fn constant(m: usize, c: Rat) -> Self {
        let mut s = Self::zero(m);
        s.add_term(c, 0, vec![0; m]);
        s
    }

    pub fn one(m: usize) -> Self {
        Self::constant(m, Rat::one())
    }

    pub fn term(c: Rat, const_exp: i64, exp_vector: Vec<i64>) -> Self {
        let mut s = Self::zero(exp_vector.len());
        s.add_term(c, const_exp, exp_vector);
        s
    }

    /// `c·E^k`.
    pub fn e_power(m: usize, c: Rat, k: i64) -> Self {
        Self::term(c, 0, vec![k; m])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, c: Rat, const_exp: i64, exp_vector: Vec<i64>) {
        assert_eq!(exp_vector.len(), self.m, "exponent vector length mismatch");
        if c.is_zero() {
            return;
        }
        let key = (const_exp, exp_vector);
        let e = self.terms.entry(key.clone()).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn add_assign(&mut self, other: &ExpSum) {
        assert_eq!(self.m, other.m);
        for ((k, v), c) in &other.terms {
            self.add_term(c.clone(), *k, v.clone());
        }
    }

    pub fn add(&self, other: &ExpSum) -> ExpSum {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn scale(&self, c: &Rat) -> ExpSum {
        let mut out = ExpSum::zero(self.m);
        for ((k, v), x) in &self.terms {
            out.add_term(x * c, *k, v.clone());
        }
        out
    }

    pub fn mul(&self, other: &ExpSum) -> ExpSum {
        assert_eq!(self.m, other.m);
        let mut out = ExpSum::zero(self.m);
        for ((k1, v1), c1) in &self.terms {
            for ((k2, v2), c2) in &other.terms {
                let v: Vec<i64> = v1.iter().zip(v2).map(|(a, b)| a + b).collect();
                out.add_term(c1 * c2, k1 + k2, v);
            }
        }
        out
    }

    /// Multiplies by `E^k`.
    pub fn shift_e(&self, k: i64) -> ExpSum {
        self.shift_vec(&vec![k; self.m])
    }

    /// Multiplies by `e^{-k}`.
    pub fn shift_const(&self, k: i64) -> ExpSum {
        let mut out = ExpSum::zero(self.m);
        for ((c0, v), c) in &self.terms {
            out.add_term(c.clone(), c0 + k, v.clone());
        }
        out
    }

    /// Multiplies by `e^{-Σ w_j s_j}`.
    pub fn shift_vec(&self, w: &[i64]) -> ExpSum {
        let mut out = ExpSum::zero(self.m);
        for ((k, v), c) in &self.terms {
            let nv: Vec<i64> = v.iter().zip(w).map(|(a, b)| a + b).collect();
            out.add_term(c.clone(), *k, nv);
        }
        out
    }

    pub fn eval(&self, s: &[Complex64]) -> Complex64 {
        assert_eq!(s.len(), self.m, "wrong number of variables");
        let mut acc = Complex64::new(0.0, 0.0);
        for ((k, v), c) in &self.terms {
            let mut expo = Complex64::new(-(*k as f64), 0.0);
            for (vj, sj) in v.iter().zip(s) {
                expo -= sj * (*vj as f64);
            }
            acc += expo.exp() * rat_to_f64(c);
        }
        acc
    }
}

impl fmt::Display for ExpSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|((k, v), c)| format!("{c}·e^-{k}·e^-{v:?}·s"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `Σ c_k e^{-k}`: an exact element of `Q[e, e^{-1}]`.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ExpConst {
    pub terms: BTreeMap<i64, Rat>,
}

impl ExpConst {
    pub fn add_term(&mut self, k: i64, c: Rat) {
        if c.is_zero() {
            return;
        }
        let e = self.terms.entry(k).or_insert_with(Rat::zero);
        *e += c;
        if e.is_zero() {
            self.terms.remove(&k);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_f64(&self) -> f64 {
        self.terms.iter().map(|(k, c)| rat_to_f64(c) * (-(*k as f64)).exp()).sum()
    }

    pub fn rational(c: Rat) -> Self {
        let mut s = Self::default();
        s.add_term(0, c);
        s
    }
}

impl fmt::Display for ExpConst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, c)| if *k == 0 { format!("{c}") } else { format!("{c}·e^{}", -k) })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Denominator `(1 − root·E)^power`; `One` is the entire part.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Denom {
    One,
    Pow { root: Rat, power: u32 },
}

impl fmt::Display for Denom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Denom::One => write!(f, "1"),
            Denom::Pow { root, power } if *power == 1 => write!(f, "(1-({root})E)"),
            Denom::Pow { root, power } => write!(f, "(1-({root})E)^{power}"),
        }
    }
}

/// Partial fractions of `1/Π(1 − r_i E)^{m_i}` for distinct nonzero roots:
/// returns `((r_i, k), A_ik)` with `1/Π = Σ A_ik/(1 − r_i E)^k`.
pub fn partial_fractions(factors: &[(Rat, u32)]) -> Vec<((Rat, u32), Rat)> {
    let mut out = Vec::new();
    for (i, (ri, mi)) in factors.iter().enumerate() {
        let n = *mi as usize;
        // Around u = 1 − r_i E every other factor is a_j + b_j u.
        let mut series = vec![Rat::zero(); n];
        series[0] = Rat::one();
        for (j, (rj, mj)) in factors.iter().enumerate() {
            if j == i {
                continue;
            }
            let q = rj / ri;
            let aj = Rat::one() - &q;
            let bj = q;
            let ratio = &bj / &aj;
            // (a + b u)^{-m} = a^{-m} Σ binom(-m, k) (b/a)^k u^k
            let mut fac = vec![Rat::zero(); n];
            let mut binom = Rat::one();
            let mut pow = Rat::one();
            let mj = *mj as i64;
            for (k, slot) in fac.iter_mut().enumerate() {
                *slot = &binom * &pow;
                binom = binom * rat(-mj - k as i64) / rat(k as i64 + 1);
                pow = &pow * &ratio;
            }
            let scale = num::pow(Rat::one() / &aj, mj as usize);
            for c in fac.iter_mut() {
                *c = &*c * &scale;
            }
            series = series_mul(&series, &fac, n);
        }
        for k in 1..=n {
            let c = series[n - k].clone();
            if !c.is_zero() {
                out.push(((ri.clone(), k as u32), c));
            }
        }
    }
    out
}

fn series_mul(a: &[Rat], b: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    for (i, x) in a.iter().enumerate().take(n) {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn series_inv(a: &[Rat], n: usize) -> Vec<Rat> {
    let mut out = vec![Rat::zero(); n];
    if n == 0 {
        return out;
    }
    let inv0 = Rat::one() / &a[0];
    out[0] = inv0.clone();
    for k in 1..n {
        let mut acc = Rat::zero();
        for j in 1..=k.min(a.len() - 1) {
            acc += &a[j] * &out[k - j];
        }
        out[k] = -acc * &inv0;
    }
    out
}

fn exp_series(a: &Rat, n: usize) -> Vec<Rat> {
    let mut out = Vec::with_capacity(n);
    let mut cur = Rat::one();
    for k in 0..n {
        out.push(cur.clone());
        cur = cur * a / rat(k as i64 + 1);
    }
    out
}

/// `((1 − e^{-u})/u)^{-k}` to `n` terms.
fn phi_inv_pow(k: u32, n: usize) -> Vec<Rat> {
    let mut phi = Vec::with_capacity(n);
    let mut fact = Rat::one();
    for j in 0..n {
        fact = fact * rat(j as i64 + 1);
        let sign = if j % 2 == 0 { Rat::one() } else { -Rat::one() };
        phi.push(sign / &fact);
    }
    let inv = series_inv(&phi, n);
    let mut out = vec![Rat::zero(); n];
    out[0] = Rat::one();
    for _ in 0..k {
        out = series_mul(&out, &inv, n);
    }
    out
}

/// Where a pole sits: `s₀ = log|r| + iπ·[r < 0]` modulo `2πi`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasePoint {
    Zero,
    LogLambda,
    /// `log|r|` for a root other than `±1`, `±(2d−1)`.
    Other(Rat),
}

impl fmt::Display for BasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasePoint::Zero => write!(f, "0"),
            BasePoint::LogLambda => write!(f, "log(2d-1)"),
            BasePoint::Other(r) => write!(f, "log({r})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PoleDatum {
    pub root: Rat,
    pub base: BasePoint,
    /// Real part of the representative `s₀`.
    pub base_value: f64,
    /// Whether `s₀` is shifted by `iπ` (negative root).
    pub odd_pi_shift: bool,
    pub order: u32,
    /// Coefficients of `(s−s₀)^{-order}, …, (s−s₀)^{-1}`.
    pub laurent: Vec<ExpConst>,
}

impl PoleDatum {
    pub fn residue(&self) -> ExpConst {
        self.laurent.last().cloned().unwrap_or_default()
    }
}

/// Pole found by the multivariable audit along `S = Σ s_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PoleSummary {
    pub root: Rat,
    pub base: BasePoint,
    pub odd_pi_shift: bool,
    pub order: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeromorphicTrace {
    pub m: usize,
    /// Model parameter `d` of the free group, used to label `log(2d−1)`.
    pub d: Option<usize>,
    pub parts: BTreeMap<Denom, ExpSum>,
}

impl MeromorphicTrace {
    pub fn zero(m: usize, d: Option<usize>) -> Self {
        Self { m, d, parts: BTreeMap::new() }
    }

    pub fn from_expsum(num: ExpSum, d: Option<usize>) -> Self {
        let mut t = Self::zero(num.m, d);
        t.add_part(Denom::One, &num);
        t
    }

    /// `num / (1 − root·E)^power`.
    pub fn simple(num: ExpSum, root: Rat, power: u32, d: Option<usize>) -> Self {
        let mut t = Self::zero(num.m, d);
        if power == 0 {
            t.add_part(Denom::One, &num);
        } else {
            t.add_part(Denom::Pow { root, power }, &num);
        }
        t
    }

    pub fn add_part(&mut self, den: Denom, num: &ExpSum) {
        assert_eq!(num.m, self.m, "variable count mismatch");
        if num.is_zero() {
            return;
        }
        let e = self.parts.entry(den.clone()).or_insert_with(|| ExpSum::zero(num.m));
        e.add_assign(num);
        if e.is_zero() {
            self.parts.remove(&den);
        }
    }

    pub fn add_assign(&mut self, other: &MeromorphicTrace) {
        assert_eq!(self.m, other.m);
        if self.d.is_none() {
            self.d = other.d;
        }
        for (den, num) in &other.parts {
            self.add_part(den.clone(), num);
        }
    }

    pub fn add(&self, other: &MeromorphicTrace) -> MeromorphicTrace {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn scale(&self, c: &Rat) -> MeromorphicTrace {
        let mut out = Self::zero(self.m, self.d);
        for (den, num) in &self.parts {
            out.add_part(den.clone(), &num.scale(c));
        }
        out
    }

    pub fn mul_expsum(&self, f: &ExpSum) -> MeromorphicTrace {
        let mut out = Self::zero(self.m, self.d);
        for (den, num) in &self.parts {
            out.add_part(den.clone(), &num.mul(f));
        }
        out
    }

    /// Divides by `(1 − root·E)^power`, re-expanding into partial fractions.
    pub fn div_factor(&self, root: &Rat, power: u32) -> MeromorphicTrace {
        if power == 0 {
            return self.clone();
        }
        assert!(!root.is_zero(), "root must be nonzero");
        let mut out = Self::zero(self.m, self.d);
        for (den, num) in &self.parts {
            match den {
                Denom::One => out.add_part(Denom::Pow { root: root.clone(), power }, num),
                Denom::Pow { root: r, power: p } if r == root => {
                    out.add_part(Denom::Pow { root: r.clone(), power: p + power }, num)
                }
                Denom::Pow { root: r, power: p } => {
                    for ((rr, k), c) in partial_fractions(&[(r.clone(), *p), (root.clone(), power)]) {
                        out.add_part(Denom::Pow { root: rr, power: k }, &num.scale(&c));
                    }
                }
            }
        }
        out
    }

    /// Product of two traces.
    pub fn mul(&self, other: &MeromorphicTrace) -> MeromorphicTrace {
        let mut out = Self::zero(self.m, self.d.or(other.d));
        for (den, num) in &other.parts {
            let mut piece = self.mul_expsum(num);
            if let Denom::Pow { root, power } = den {
                piece = piece.div_factor(root, *power);
            }
            out.add_assign(&piece);
        }
        out
    }

    pub fn is_entire_form(&self) -> bool {
        self.parts.keys().all(|d| *d == Denom::One)
    }

    pub fn entire_part(&self) -> ExpSum {
        self.parts.get(&Denom::One).cloned().unwrap_or_else(|| ExpSum::zero(self.m))
    }

    pub fn eval(&self, s: &[Complex64]) -> Complex64 {
        let total: Complex64 = s.iter().sum();
        let e = (-total).exp();
        let mut acc = Complex64::new(0.0, 0.0);
        for (den, num) in &self.parts {
            let v = num.eval(s);
            acc += match den {
                Denom::One => v,
                Denom::Pow { root, power } => {
                    v / (Complex64::new(1.0, 0.0) - e * rat_to_f64(root)).powi(*power as i32)
                }
            };
        }
        acc
    }

    pub fn eval_real(&self, s: &[f64]) -> Complex64 {
        let sc: Vec<Complex64> = s.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.eval(&sc)
    }

    /// Substitutes `s_j = l_j − l_{j+1}` (j < m) and `s_m = s + l_m − l_1`.
    pub fn specialize_shifts(&self, l: &[i64]) -> Result<MeromorphicTrace> {
        if l.len() != self.m {
            return Err(Error::Domain(format!(
                "shift vector has length {}, expected {}",
                l.len(),
                self.m
            )));
        }
        let m = self.m;
        let mut out = Self::zero(1, self.d);
        for (den, num) in &self.parts {
            let mut s1 = ExpSum::zero(1);
            for ((k, v), c) in &num.terms {
                let mut extra = 0i64;
                for j in 0..m - 1 {
                    extra += v[j] * (l[j] - l[j + 1]);
                }
                extra += v[m - 1] * (l[m - 1] - l[0]);
                s1.add_term(c.clone(), k + extra, vec![v[m - 1]]);
            }
            out.add_part(den.clone(), &s1);
        }
        Ok(out)
    }

    fn classify(&self, root: &Rat) -> (BasePoint, f64, bool) {
        let abs = root.abs();
        let base = if abs.is_one() {
            BasePoint::Zero
        } else if self.d.map_or(false, |d| abs == rat(2 * d as i64 - 1)) {
            BasePoint::LogLambda
        } else {
            BasePoint::Other(abs.clone())
        };
        (base, rat_to_f64(&abs).ln(), root.is_negative())
    }

    /// Principal parts of a single-variable trace at every candidate pole.
    pub fn poles_and_laurent(&self) -> Result<Vec<PoleDatum>> {
        if self.m != 1 {
            return Err(Error::Domain("poles_and_laurent needs a single-variable trace".into()));
        }
        let mut out = Vec::new();
        for (root, parts) in self.by_root() {
            let n = parts.iter().map(|(p, _)| *p as usize).max().unwrap_or(0);
            let mut coeffs: Vec<ExpConst> = vec![ExpConst::default(); n + 1];
            for (power, num) in parts {
                let k = power as usize;
                let phi = phi_inv_pow(power, k);
                for ((c_exp, v), c) in &num.terms {
                    let v = v[0];
                    let w0v = num::pow(Rat::one() / &root, v.unsigned_abs() as usize);
                    let w0v = if v >= 0 { w0v } else { Rat::one() / w0v };
                    let ser = series_mul(&exp_series(&rat(-v), k), &phi, k);
                    for (j, coef) in ser.iter().enumerate() {
                        // u^{j−k}
                        let idx = k - j;
                        coeffs[idx].add_term(*c_exp, c * &w0v * coef);
                    }
                }
            }
            let order = (1..=n).rev().find(|&j| !coeffs[j].is_zero()).unwrap_or(0);
            if order == 0 {
                continue;
            }
            let (base, base_value, odd) = self.classify(&root);
            let laurent = (1..=order).rev().map(|j| coeffs[j].clone()).collect();
            out.push(PoleDatum {
                root,
                base,
                base_value,
                odd_pi_shift: odd,
                order: order as u32,
                laurent,
            });
        }
        Ok(out)
    }

    fn by_root(&self) -> BTreeMap<Rat, Vec<(u32, ExpSum)>> {
        let mut map: BTreeMap<Rat, Vec<(u32, ExpSum)>> = BTreeMap::new();
        for (den, num) in &self.parts {
            if let Denom::Pow { root, power } = den {
                map.entry(root.clone()).or_default().push((*power, num.clone()));
            }
        }
        map
    }

    /// Pole orders along `S = Σ s_j` for generic transverse values: terms are
    /// grouped by `(v_j − v_m)_{j<m}` and each group is audited on its own.
    pub fn pole_audit(&self) -> Vec<PoleSummary> {
        let m = self.m;
        let mut groups: BTreeMap<Vec<i64>, MeromorphicTrace> = BTreeMap::new();
        for (den, num) in &self.parts {
            for ((k, v), c) in &num.terms {
                let key: Vec<i64> = (0..m - 1).map(|j| v[j] - v[m - 1]).collect();
                let g = groups.entry(key).or_insert_with(|| MeromorphicTrace::zero(1, self.d));
                g.add_part(den.clone(), &ExpSum::term(c.clone(), *k, vec![v[m - 1]]));
            }
        }
        let mut best: BTreeMap<Rat, u32> = BTreeMap::new();
        for g in groups.values() {
            for p in g.poles_and_laurent().expect("single variable") {
                let e = best.entry(p.root.clone()).or_insert(0);
                *e = (*e).max(p.order);
            }
        }
        best.into_iter()
            .map(|(root, order)| {
                let (base, _, odd) = self.classify(&root);
                PoleSummary { root, base, odd_pi_shift: odd, order }
            })
            .collect()
    }

    /// No poles anywhere.
    pub fn is_entire(&self) -> bool {
        self.pole_audit().is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.parts.values().map(|p| p.len()).sum()
    }
}

impl fmt::Display for MeromorphicTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .parts
            .iter()
            .map(|(den, num)| format!("[{num}]/{den}"))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn partial_fraction_identity() {
        let factors = vec![(rat(1), 1), (rat(3), 2), (rat(-1), 2)];
        let pf = partial_fractions(&factors);
        for &e in &[0.1f64, 0.2, -0.35, 0.05] {
            let direct = 1.0 / ((1.0 - e) * (1.0 - 3.0 * e).powi(2) * (1.0 + e).powi(2));
            let sum: f64 = pf
                .iter()
                .map(|((r, k), a)| rat_to_f64(a) / (1.0 - rat_to_f64(r) * e).powi(*k as i32))
                .sum();
            assert!((direct - sum).abs() < 1e-12 * direct.abs());
        }
    }

    #[test]
    fn simple_pole_at_zero() {
        let t = MeromorphicTrace::simple(ExpSum::one(1), rat(1), 1, Some(2));
        let poles = t.poles_and_laurent().unwrap();
        assert_eq!(poles.len(), 1);
        assert_eq!(poles[0].base, BasePoint::Zero);
        assert_eq!(poles[0].order, 1);
        assert_eq!(poles[0].residue(), ExpConst::rational(rat(1)));
    }

    #[test]
    fn double_pole_at_log_lambda() {
        let t = MeromorphicTrace::simple(ExpSum::one(1), rat(3), 2, Some(2));
        let poles = t.poles_and_laurent().unwrap();
        assert_eq!(poles.len(), 1);
        assert_eq!(poles[0].base, BasePoint::LogLambda);
        assert_eq!(poles[0].order, 2);
        // 1/(1−3e^{−s})² = 1/(1−e^{−u})² = u^{-2} + u^{-1} + …
        assert_eq!(poles[0].laurent[0], ExpConst::rational(rat(1)));
        assert_eq!(poles[0].laurent[1], ExpConst::rational(rat(1)));
    }

    #[test]
    fn expsum_has_no_poles() {
        let t = MeromorphicTrace::from_expsum(ExpSum::term(rat(2), 1, vec![3]), Some(2));
        assert!(t.poles_and_laurent().unwrap().is_empty());
        assert!(t.is_entire());
    }

    #[test]
    fn removable_singularity_is_not_a_pole() {
        // (1 − E)/(1 − E) = 1
        let mut num = ExpSum::one(1);
        num.add_term(rat(-1), 0, vec![1]);
        let t = MeromorphicTrace::simple(num, rat(1), 1, None);
        assert!(t.poles_and_laurent().unwrap().is_empty());
    }

    #[test]
    fn laurent_matches_numeric_residue() {
        // E²/((1−E)(1+E)) at s=0: residue of 1/(2(1−e^{-s})) → 1/2
        let t = MeromorphicTrace::from_expsum(ExpSum::e_power(1, rat(1), 2), None)
            .div_factor(&rat(1), 1)
            .div_factor(&rat(-1), 1);
        let poles = t.poles_and_laurent().unwrap();
        let p0 = poles.iter().find(|p| p.root == rat(1)).unwrap();
        assert_eq!(p0.residue(), ExpConst::rational(ratio(1, 2)));
        let eps = 1e-5;
        let numeric = t.eval(&[c(eps)]) * eps;
        assert!((numeric.re - 0.5).abs() < 1e-4);
    }

    #[test]
    fn division_then_eval() {
        let t = MeromorphicTrace::simple(ExpSum::e_power(2, rat(1), 1), rat(3), 1, Some(2))
            .div_factor(&rat(1), 1)
            .div_factor(&rat(3), 1);
        let s = [c(1.7), c(0.9)];
        let e = (-2.6f64).exp();
        let direct = e / ((1.0 - 3.0 * e).powi(2) * (1.0 - e));
        assert!((t.eval(&s).re - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn specialization_preserves_values() {
        let mut num = ExpSum::zero(2);
        num.add_term(rat(1), 0, vec![2, 1]);
        num.add_term(ratio(1, 3), 1, vec![0, 3]);
        let t = MeromorphicTrace::simple(num, rat(3), 1, Some(2));
        let sp = t.specialize_shifts(&[1, 0]).unwrap();
        let s = 2.5;
        let direct = t.eval(&[c(1.0), c(s - 1.0)]);
        assert!((sp.eval(&[c(s)]) - direct).norm() < 1e-12);
        let same = t.specialize_shifts(&[0, 0]).unwrap();
        assert!((same.eval(&[c(s)]) - t.eval(&[c(0.0), c(s)])).norm() < 1e-12);
    }
}
