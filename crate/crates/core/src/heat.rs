//! Heat traces of Cuntz–Krieger monomial chains on the free-group vertex
//! space: exact closed forms, geometric-series building blocks and
//! brute-force truncated oracles.
//!
//! Vertices are reduced group words `g` with `x = g·t` for the fixed point
//! `t = t0^∞`; with `ℓ` the number of trailing `t0^{-1}` letters of `g`,
//! `|D_t|` acts by `||g| − 2ℓ| + ℓ`.

use std::collections::BTreeMap;

use num::{One, Signed, Zero};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ck::{diagonal_dichotomy, monomial_on_group_word, DichotomyResult, Monomial};
use crate::expsum::{ExpSum, MeromorphicTrace, PoleSummary};
use crate::words::{inverse_letter, letter_set_counts, AdjacencyModel, BoundaryPoint, Letter, Word};
use crate::{rat, Error, Rat, Result};

/// The four geometric-series identities.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GeomKind {
    /// `Σ_{n≥a} Σ_{k≥b} λ^{cn+k} e^{-Σ s_j(|n+d_j|+k)}`
    Rect,
    /// `Σ_{n≥a} Σ_{k≥n+b} λ^{cn+k} e^{-Σ s_j(|n+d_j|+k)}`
    Wedge,
    /// `Σ_{n≥a} λ^{cn} e^{-Σ s_j|n+d_j|}`
    Line,
    /// `Σ_{k≥b} λ^k e^{-Σ s_j k}`
    Tail,
}

impl GeomKind {
    pub fn from_index(i: u32) -> Result<Self> {
        match i {
            1 => Ok(GeomKind::Rect),
            2 => Ok(GeomKind::Wedge),
            3 => Ok(GeomKind::Line),
            4 => Ok(GeomKind::Tail),
            _ => Err(Error::Domain(format!("unknown geometric sum kind {i}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeomParams {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub d: Vec<i64>,
    pub lambda: Rat,
}

fn rpow(x: &Rat, e: i64) -> Rat {
    let p = num::pow(x.clone(), e.unsigned_abs() as usize);
    if e >= 0 {
        p
    } else {
        Rat::one() / p
    }
}

fn rat_sqrt(q: &Rat) -> Option<Rat> {
    if q.is_negative() {
        return None;
    }
    let n = q.numer().sqrt();
    let d = q.denom().sqrt();
    let r = Rat::new(n, d);
    if &(&r * &r) == q {
        Some(r)
    } else {
        None
    }
}

/// Exact right-hand side of the selected identity. The finite boundary sum
/// runs over `a ≤ n < max(a, −min d_j)`; the geometric tail starts there.
pub fn geom_sum(kind: GeomKind, p: &GeomParams) -> Result<MeromorphicTrace> {
    if !p.lambda.is_positive() {
        return Err(Error::Domain("lambda must be positive".into()));
    }
    if p.d.is_empty() {
        return Err(Error::Domain("need at least one variable".into()));
    }
    let m = p.d.len();
    let lam = &p.lambda;
    let dmin = *p.d.iter().min().unwrap();
    let n0 = p.a.max(-dmin);
    let tail = |b: i64| {
        MeromorphicTrace::simple(ExpSum::e_power(m, rpow(lam, b), b), lam.clone(), 1, None)
    };
    match kind {
        GeomKind::Tail => Ok(tail(p.b)),
        GeomKind::Line => Ok(line_sum(p, p.c, 0, n0)),
        GeomKind::Rect => Ok(line_sum(p, p.c, 0, n0).mul(&tail(p.b))),
        GeomKind::Wedge => {
            let mut boundary = ExpSum::zero(m);
            for n in p.a..n0 {
                let v: Vec<i64> = p.d.iter().map(|dj| (n + dj).abs() + n + p.b).collect();
                boundary.add_term(rpow(lam, (p.c + 1) * n + p.b), 0, v);
            }
            let mut out = MeromorphicTrace::from_expsum(boundary, None);
            let v: Vec<i64> = p.d.iter().map(|dj| 2 * n0 + dj + p.b).collect();
            let num = ExpSum::term(rpow(lam, (p.c + 1) * n0 + p.b), 0, v);
            let q = rpow(lam, p.c + 1);
            let r = rat_sqrt(&q).ok_or_else(|| {
                Error::Unsupported(format!("1 − {q}·E² does not split over the rationals"))
            })?;
            let t = MeromorphicTrace::from_expsum(num, None).div_factor(&r, 1).div_factor(&(-r.clone()), 1);
            out.add_assign(&t);
            Ok(out.div_factor(lam, 1))
        }
    }
}

fn line_sum(p: &GeomParams, c: i64, extra: i64, n0: i64) -> MeromorphicTrace {
    let m = p.d.len();
    let lam = &p.lambda;
    let mut boundary = ExpSum::zero(m);
    for n in p.a..n0 {
        let v: Vec<i64> = p.d.iter().map(|dj| (n + dj).abs() + extra).collect();
        boundary.add_term(rpow(lam, c * n), 0, v);
    }
    let mut out = MeromorphicTrace::from_expsum(boundary, None);
    let v: Vec<i64> = p.d.iter().map(|dj| n0 + dj + extra).collect();
    let tail = MeromorphicTrace::simple(ExpSum::term(rpow(lam, c * n0), 0, v), rpow(lam, c), 1, None);
    out.add_assign(&tail);
    out
}

/// Either a meromorphic trace or a certificate that the trace is an entire
/// exponential sum (zero when the chain has no diagonal).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum HeatTrace {
    Meromorphic(MeromorphicTrace),
    Entire(ExpSum),
}

impl HeatTrace {
    pub fn is_entire_certificate(&self) -> bool {
        matches!(self, HeatTrace::Entire(_))
    }

    pub fn as_trace(&self, d: Option<usize>) -> MeromorphicTrace {
        match self {
            HeatTrace::Meromorphic(t) => t.clone(),
            HeatTrace::Entire(e) => MeromorphicTrace::from_expsum(e.clone(), d),
        }
    }

    pub fn eval(&self, s: &[Complex64]) -> Complex64 {
        match self {
            HeatTrace::Meromorphic(t) => t.eval(s),
            HeatTrace::Entire(e) => e.eval(s),
        }
    }

    pub fn pole_audit(&self) -> Vec<PoleSummary> {
        match self {
            HeatTrace::Meromorphic(t) => t.pole_audit(),
            HeatTrace::Entire(_) => Vec::new(),
        }
    }

    pub fn specialize_shifts(&self, l: &[i64]) -> Result<HeatTrace> {
        match self {
            HeatTrace::Meromorphic(t) => Ok(HeatTrace::Meromorphic(t.specialize_shifts(l)?)),
            HeatTrace::Entire(e) => {
                let t = MeromorphicTrace::from_expsum(e.clone(), None).specialize_shifts(l)?;
                Ok(HeatTrace::Entire(t.entire_part()))
            }
        }
    }
}

fn abs_d(p: i64, n: i64) -> i64 {
    if n >= p {
        n
    } else if n >= 0 {
        p
    } else {
        p - 2 * n
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct CylinderShape {
    len: i64,
    omega: Vec<i64>,
    last: Letter,
    /// Canonical lengths `|σ_j|` with trailing `t0` removed, when ρ ends in `t0`.
    stripped: Option<Vec<i64>>,
}

fn check_chain(chain: &[Monomial], t: &BoundaryPoint, d: usize) -> Result<(AdjacencyModel, Letter)> {
    if chain.is_empty() {
        return Err(Error::Domain("chain must be nonempty".into()));
    }
    if d < 2 {
        return Err(Error::Domain("free group rank must be at least 2".into()));
    }
    let a = AdjacencyModel::free_group(d);
    let t0 = t
        .fixed_letter()
        .map_err(|_| Error::Unsupported("heat traces need a fixed point t".into()))?;
    a.check_letters(&t.period)?;
    for m in chain {
        a.check_letters(&m.mu)?;
        a.check_letters(&m.nu)?;
    }
    Ok((a, t0))
}

fn cylinder_shapes(
    chain: &[Monomial],
    a: &AdjacencyModel,
    t0: Letter,
) -> Result<Option<BTreeMap<CylinderShape, Rat>>> {
    let r: usize = chain.iter().map(|m| m.mu.len() + m.nu.len()).sum::<usize>() + 2;
    let dich = diagonal_dichotomy(chain, a, r)?;
    let cyl = match dich {
        DichotomyResult::ZeroDiagonal => return Ok(None),
        DichotomyResult::CylinderSum(c) => c,
    };
    let m = chain.len();
    let mut shapes: BTreeMap<CylinderShape, Rat> = BTreeMap::new();
    for (rho, c) in cyl {
        let mut sigma = vec![Word::empty(); m + 1];
        sigma[m] = rho.clone();
        for j in (1..=m).rev() {
            sigma[j - 1] = chain[j - 1].act_on_prefix(&sigma[j], a).ok_or_else(|| {
                Error::Domain(format!("chain does not act uniformly on cylinder {rho}"))
            })?;
        }
        if sigma[0] != rho {
            return Err(Error::Domain(format!("cylinder {rho} is not fixed by the chain")));
        }
        let len = rho.len() as i64;
        let omega: Vec<i64> = (1..=m).map(|j| sigma[j].len() as i64 - len).collect();
        let last = rho.last().expect("refined cylinders are nonempty");
        let stripped = if last == t0 {
            Some(
                (1..=m)
                    .map(|j| {
                        let s = &sigma[j].0;
                        let trail = s.iter().rev().take_while(|&&x| x == t0).count();
                        (s.len() - trail) as i64
                    })
                    .collect(),
            )
        } else {
            None
        };
        let key = CylinderShape { len, omega, last, stripped };
        let e = shapes.entry(key).or_insert_with(Rat::zero);
        *e += c;
    }
    shapes.retain(|_, c| !c.is_zero());
    Ok(Some(shapes))
}

/// `G(E) = Σ_q h(q) E^q` and `G1(E) = Σ_q q·h(q) E^q`, where `h(q)` counts the
/// reduced continuations of length `q` after `last` that leave a canonical
/// word (not ending in `t0^{±1}`).
fn continuation_series(d: usize, m: usize, last: Letter, t0: Letter) -> (MeromorphicTrace, MeromorphicTrace) {
    let a = AdjacencyModel::free_group(d);
    let n = 2 * d;
    let c = inverse_letter(t0);
    let first: Vec<bool> = (0..n as Letter).map(|f| a.allowed(last, f)).collect();
    let lastset: Vec<bool> = (0..n as Letter).map(|b| b != t0 && b != c).collect();
    let cs = letter_set_counts(d, &first, &lastset);
    let lam = rat(2 * d as i64 - 1);
    let h0 = if last != t0 && last != c { Rat::one() } else { Rat::zero() };
    let dd = Some(d);
    let mut g = MeromorphicTrace::from_expsum(ExpSum::constant(m, h0), dd);
    let mut g1 = MeromorphicTrace::zero(m, dd);
    for (coef, root) in [(&cs.lam * &lam, lam.clone()), (cs.one.clone(), Rat::one()), (-cs.alt.clone(), -Rat::one())] {
        let num = ExpSum::e_power(m, coef, 1);
        g.add_assign(&MeromorphicTrace::simple(num.clone(), root.clone(), 1, dd));
        g1.add_assign(&MeromorphicTrace::simple(num, root, 2, dd));
    }
    (g, g1)
}

fn expo(omega_like: impl Iterator<Item = i64>) -> ExpSum {
    let v: Vec<i64> = omega_like.collect();
    ExpSum::term(Rat::one(), 0, v)
}

fn shape_heat(shape: &CylinderShape, d: usize, t0: Letter, toeplitz: bool) -> MeromorphicTrace {
    let m = shape.omega.len();
    let dd = Some(d);
    let one = Rat::one();
    let r = shape.len;
    let om = &shape.omega;
    let wmin = *om.iter().min().unwrap();
    let wmax = *om.iter().max().unwrap();
    let (g, g1) = continuation_series(d, m, shape.last, t0);
    let ek = expo(om.iter().map(|w| r + w));
    let mut out = g.mul_expsum(&ek).div_factor(&one, 1);
    if !toeplitz {
        let t1a = g.scale(&rat(r + wmin)).add(&g1).mul_expsum(&ek);
        out.add_assign(&t1a);
        let t1b = g
            .mul_expsum(&expo(om.iter().map(|w| r - w + 2 * (wmax + 1))))
            .div_factor(&one, 1)
            .div_factor(&-one.clone(), 1);
        out.add_assign(&t1b);
        let mut band = ExpSum::zero(m);
        for n in -wmax..-wmin {
            band.add_term(one.clone(), 0, om.iter().map(|w| r - n + (n + w).abs()).collect());
        }
        out.add_assign(&g.mul_expsum(&band));
    }
    if let Some(p) = &shape.stripped {
        let n_hi = p.iter().zip(om).map(|(pj, w)| pj - w).max().unwrap();
        let upper = MeromorphicTrace::simple(expo(om.iter().map(|w| n_hi + w)), one.clone(), 1, dd);
        out.add_assign(&upper);
        if !toeplitz {
            let n_lo = om.iter().map(|w| -w).min().unwrap() - 1;
            let lower = MeromorphicTrace::from_expsum(
                expo(p.iter().zip(om).map(|(pj, w)| pj - 2 * w - 2 * n_lo)),
                dd,
            )
            .div_factor(&one, 1)
            .div_factor(&-one.clone(), 1);
            out.add_assign(&lower);
            let mut mid = ExpSum::zero(m);
            for n in n_lo + 1..n_hi {
                mid.add_term(one.clone(), 0, p.iter().zip(om).map(|(pj, w)| abs_d(*pj, n + w)).collect());
            }
            out.add_part(crate::expsum::Denom::One, &mid);
        }
    }
    out
}

fn closed_form(chain: &[Monomial], t: &BoundaryPoint, d: usize, toeplitz: bool) -> Result<HeatTrace> {
    let (a, t0) = check_chain(chain, t, d)?;
    let m = chain.len();
    let shapes = match cylinder_shapes(chain, &a, t0)? {
        None => return Ok(HeatTrace::Entire(ExpSum::zero(m))),
        Some(s) => s,
    };
    let mut total = MeromorphicTrace::zero(m, Some(d));
    for (shape, c) in &shapes {
        total.add_assign(&shape_heat(shape, d, t0, toeplitz).scale(c));
    }
    Ok(HeatTrace::Meromorphic(total))
}

/// `Tr(S_{μ1}S_{ν1}* e^{-s1|D_t|} ⋯ S_{μm}S_{νm}* e^{-sm|D_t|})` in closed form.
pub fn closed_form_heat_trace(chain: &[Monomial], t: &BoundaryPoint, d: usize) -> Result<HeatTrace> {
    closed_form(chain, t, d, false)
}

/// The same trace with every monomial compressed by the nonnegative spectral
/// projection `P` of `D_t` (vertices with no trailing `t0^{-1}`).
pub fn closed_form_toeplitz_trace(chain: &[Monomial], t: &BoundaryPoint, d: usize) -> Result<HeatTrace> {
    closed_form(chain, t, d, true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleValue {
    pub value: Complex64,
    /// Bound on the contribution of vertices beyond the truncation.
    pub tail_bound: f64,
    pub truncation: usize,
}

fn trailing(g: &[Letter], c: Letter) -> usize {
    g.iter().rev().take_while(|&&x| x == c).count()
}

fn vertex_abs_d(g: &[Letter], c: Letter) -> i64 {
    let l = trailing(g, c) as i64;
    (g.len() as i64 - 2 * l).abs() + l
}

fn reduced_words(d: usize, len: usize) -> Vec<Vec<Letter>> {
    let a = AdjacencyModel::free_group(d);
    crate::words::enumerate_admissible(&a, len, None, None).into_iter().map(|w| w.0).collect()
}

/// Counts of reduced `v` of length `q` (index) with `v_1` allowed after
/// `prev` and the last letter of `prev·v` outside `forbid`.
fn continuation_counts(d: usize, prev: Letter, forbid: &[Letter], qmax: usize) -> Vec<f64> {
    let n = 2 * d;
    let mut out = Vec::with_capacity(qmax + 1);
    out.push(if forbid.contains(&prev) { 0.0 } else { 1.0 });
    let mut vec = vec![0.0f64; n];
    for x in 0..n {
        if x as Letter != inverse_letter(prev) {
            vec[x] = 1.0;
        }
    }
    for _ in 1..=qmax {
        let s: f64 = (0..n).filter(|&x| !forbid.contains(&(x as Letter))).map(|x| vec[x]).sum();
        out.push(s);
        let mut next = vec![0.0f64; n];
        for y in 0..n {
            let tot: f64 = (0..n).filter(|&x| x != (y ^ 1)).map(|x| vec[x]).sum();
            next[y] = tot;
        }
        vec = next;
    }
    out
}

fn oracle_common(
    chain: &[Monomial],
    t: &BoundaryPoint,
    d: usize,
    s: &[Complex64],
) -> Result<(AdjacencyModel, Letter)> {
    let (a, t0) = check_chain(chain, t, d)?;
    if s.len() != chain.len() {
        return Err(Error::Domain(format!("need {} s-values, got {}", chain.len(), s.len())));
    }
    let sigma: f64 = s.iter().map(|z| z.re).sum();
    let lam = (2 * d - 1) as f64;
    if sigma <= lam.ln() {
        return Err(Error::Refused(format!(
            "Re Σs = {sigma} does not exceed log(2d−1) = {}; the trace diverges there",
            lam.ln()
        )));
    }
    Ok((a, t0))
}

fn weight(s: &[Complex64], ds: &[i64]) -> Complex64 {
    let mut e = Complex64::new(0.0, 0.0);
    for (sj, dj) in s.iter().zip(ds) {
        e -= sj * (*dj as f64);
    }
    e.exp()
}

/// Number of vertices at a given `|D_t|` level, bounded with `2d(2d−1)^{n−1}`
/// words of length `n`.
fn level_bound(d: usize, level: i64, toeplitz: bool) -> f64 {
    let lam = (2 * d - 1) as f64;
    let words = |n: i64| if n <= 0 { 1.0 } else { 2.0 * d as f64 * lam.powi(n as i32 - 1) };
    if toeplitz {
        return words(level);
    }
    let mut total = 0.0;
    for l in 0..=level {
        // |g| ≥ 2ℓ: |g| = level + ℓ
        total += words(level);
        let g = 3 * l - level;
        if g >= l && g < 2 * l {
            total += words(g - l);
        }
    }
    total
}

fn tail_bound(chain: &[Monomial], s: &[Complex64], d: usize, l_max: usize, toeplitz: bool) -> f64 {
    let m = chain.len();
    let sigma: f64 = s.iter().map(|z| z.re).sum();
    // |D| changes by at most 2 per letter along the chain.
    let mut shift = 0.0;
    for j in 0..m {
        let w: usize = chain[j + 1..].iter().map(|mo| mo.mu.len() + mo.nu.len()).sum();
        shift += s[j].re.abs() * 2.0 * w as f64;
    }
    let lam = (2 * d - 1) as f64;
    let mut total = 0.0;
    let mut level = l_max as i64 + 1;
    loop {
        let term = (level_bound(d, level, toeplitz).ln() - sigma * level as f64 + shift).exp();
        total += term;
        let ratio = lam * (-sigma).exp() * (level as f64 + 2.0) / (level as f64 + 1.0);
        if ratio < 1.0 && term * ratio / (1.0 - ratio) < 1e-30 * total.max(1e-300) {
            total += term * ratio / (1.0 - ratio);
            break;
        }
        if level > l_max as i64 + 100_000 {
            total = f64::INFINITY;
            break;
        }
        level += 1;
    }
    total
}

/// Runs the chain on a vertex; returns the |D| values at the positions of
/// `s_1..s_m` and whether the chain returned to the start.
fn run_chain(
    chain: &[Monomial],
    g: &[Letter],
    t0: Letter,
    a: &AdjacencyModel,
    require_p: bool,
) -> Option<Vec<i64>> {
    let c = inverse_letter(t0);
    let m = chain.len();
    let mut ds = vec![0i64; m];
    let mut cur = g.to_vec();
    for j in (0..m).rev() {
        if require_p && trailing(&cur, c) > 0 {
            return None;
        }
        ds[j] = vertex_abs_d(&cur, c);
        cur = monomial_on_group_word(&chain[j], &cur, t0, a)?;
    }
    if cur.as_slice() == g {
        Some(ds)
    } else {
        None
    }
}

fn grouped_oracle(
    chain: &[Monomial],
    t: &BoundaryPoint,
    d: usize,
    s: &[Complex64],
    l_max: usize,
    toeplitz: bool,
) -> Result<OracleValue> {
    let (a, t0) = oracle_common(chain, t, d, s)?;
    let c = inverse_letter(t0);
    let lmax = l_max as i64;
    let w_len: usize = chain.iter().map(|m| m.nu.len()).sum::<usize>() + 1;
    let mut value = Complex64::new(0.0, 0.0);

    // Short words, every tail of inverse letters written out.
    for len in 0..w_len {
        for w in reduced_words(d, len) {
            if w.last() == Some(&c) {
                continue;
            }
            let lmax_here = if toeplitz { 0 } else { lmax };
            for l in 0..=lmax_here {
                if l > 0 && w.last() == Some(&t0) {
                    break;
                }
                let mut g = w.clone();
                g.extend(std::iter::repeat(c).take(l as usize));
                if vertex_abs_d(&g, c) > lmax {
                    continue;
                }
                if let Some(ds) = run_chain(chain, &g, t0, &a, toeplitz) {
                    value += weight(s, &ds);
                }
            }
        }
    }

    // Long words g = π·v·c^ℓ: the chain only sees the prefix π.
    let qmax = (lmax - w_len as i64).max(0) as usize;
    let forbid_plain = [c];
    let forbid_tail = [c, t0];
    let mut count_cache: BTreeMap<(Letter, bool), Vec<f64>> = BTreeMap::new();
    for pi in reduced_words(d, w_len) {
        let pw = Word(pi.clone());
        let m = chain.len();
        let mut sig = vec![Word::empty(); m + 1];
        sig[m] = pw.clone();
        let mut ok = true;
        for j in (1..=m).rev() {
            match chain[j - 1].act_on_prefix(&sig[j], &a) {
                Some(x) => sig[j - 1] = x,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok || sig[0] != pw {
            continue;
        }
        let lens: Vec<i64> = (1..=m).map(|j| sig[j].len() as i64).collect();
        let last = *pi.last().unwrap();
        for flag in [false, true] {
            if toeplitz && flag {
                continue;
            }
            let counts = count_cache
                .entry((last, flag))
                .or_insert_with(|| {
                    continuation_counts(d, last, if flag { &forbid_tail } else { &forbid_plain }, qmax)
                })
                .clone();
            for (q, cnt) in counts.iter().enumerate() {
                if *cnt == 0.0 {
                    continue;
                }
                let q = q as i64;
                let (l_lo, l_hi) = if flag { (1, lmax) } else { (0, 0) };
                for l in l_lo..=l_hi {
                    let g_len = w_len as i64 + q + l;
                    let dv = (g_len - 2 * l).abs() + l;
                    if dv > lmax {
                        continue;
                    }
                    let ds: Vec<i64> = lens.iter().map(|lj| (lj + q - l).abs() + l).collect();
                    value += weight(s, &ds) * *cnt;
                }
            }
        }
    }
    Ok(OracleValue { value, tail_bound: tail_bound(chain, s, d, l_max, toeplitz), truncation: l_max })
}

/// Truncated trace over all vertices with `|D_t| ≤ L`, evaluated by grouping
/// long vertices by the prefix the chain acts on.
pub fn brute_force_heat_trace(
    chain: &[Monomial],
    t: &BoundaryPoint,
    d: usize,
    s: &[Complex64],
    l_max: usize,
) -> Result<OracleValue> {
    grouped_oracle(chain, t, d, s, l_max, false)
}

/// Truncated compressed trace over words of length `≤ L` without trailing
/// `t0^{-1}`, on which `|D_t|` is the length.
pub fn brute_force_toeplitz_trace(
    chain: &[Monomial],
    t: &BoundaryPoint,
    d: usize,
    s: &[Complex64],
    l_max: usize,
) -> Result<OracleValue> {
    grouped_oracle(chain, t, d, s, l_max, true)
}

/// All vertices (reduced group words) with `|D_t| ≤ L`.
pub fn vertices_up_to(d: usize, t0: Letter, l_max: usize) -> Vec<Vec<Letter>> {
    let c = inverse_letter(t0);
    let mut out = Vec::new();
    for len in 0..=2 * l_max {
        for g in reduced_words(d, len) {
            if vertex_abs_d(&g, c) <= l_max as i64 {
                out.push(g);
            }
        }
    }
    out
}

/// Vertex-by-vertex truncated trace (start vertex with `|D_t| ≤ L`).
pub fn enumerated_heat_trace(
    chain: &[Monomial],
    t: &BoundaryPoint,
    d: usize,
    s: &[Complex64],
    l_max: usize,
    toeplitz: bool,
) -> Result<Complex64> {
    let (a, t0) = oracle_common(chain, t, d, s)?;
    let mut value = Complex64::new(0.0, 0.0);
    for g in vertices_up_to(d, t0, l_max) {
        if toeplitz && trailing(&g, inverse_letter(t0)) > 0 {
            continue;
        }
        if let Some(ds) = run_chain(chain, &g, t0, &a, toeplitz) {
            value += weight(s, &ds);
        }
    }
    Ok(value)
}

/// Literal trace of the product of truncated matrices: every operator is
/// compressed to the vertices with `|D_t| ≤ L`.
pub fn truncated_matrix_trace(
    chain: &[Monomial],
    t: &BoundaryPoint,
    d: usize,
    s: &[Complex64],
    l_max: usize,
) -> Result<Complex64> {
    use crate::ck::{act_on_vertex, CKElement};
    use crate::words::VertexVt;
    use nalgebra::DMatrix;
    let (a, t0) = check_chain(chain, t, d)?;
    if s.len() != chain.len() {
        return Err(Error::Domain("wrong number of s-values".into()));
    }
    let verts: Vec<VertexVt> = vertices_up_to(d, t0, l_max)
        .into_iter()
        .map(|g| VertexVt::from_group_word(&Word(g), t, &a))
        .collect::<Result<_>>()?;
    let index: BTreeMap<&VertexVt, usize> = verts.iter().enumerate().map(|(i, v)| (v, i)).collect();
    let n = verts.len();
    let mut prod = DMatrix::<Complex64>::identity(n, n);
    for (j, mono) in chain.iter().enumerate() {
        let x = CKElement::from_monomial(mono.clone());
        let mut mat = DMatrix::<Complex64>::zeros(n, n);
        for (col, v) in verts.iter().enumerate() {
            for (w, c) in act_on_vertex(&x, v, t, &a)? {
                if let Some(&row) = index.get(&w) {
                    mat[(row, col)] += Complex64::new(crate::rat_to_f64(&c), 0.0);
                }
            }
        }
        let mut diag = DMatrix::<Complex64>::zeros(n, n);
        for (i, v) in verts.iter().enumerate() {
            diag[(i, i)] = (-s[j] * v.abs_dirac() as f64).exp();
        }
        prod = prod * mat * diag;
    }
    Ok(prod.trace())
}

/// Relative discrepancy between a closed form and an oracle value, and the
/// tolerance `max(rel_tol, tail/|closed|)` it must meet.
pub fn oracle_agreement(closed: Complex64, oracle: &OracleValue, rel_tol: f64) -> (f64, f64) {
    let scale = closed.norm().max(1e-300);
    let err = (closed - oracle.value).norm() / scale;
    let tol = rel_tol.max(oracle.tail_bound / scale);
    (err, tol)
}

/// Generator monomials `S_i` and `S_i*` for the free group on `d` letters.
pub fn generator_monomials(d: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for i in 0..(2 * d) as Letter {
        out.push(Monomial::isometry(i));
        out.push(Monomial::coisometry(i));
    }
    out
}

/// All chains of one or two generator monomials.
pub fn generator_chains(d: usize) -> Vec<Vec<Monomial>> {
    let gens = generator_monomials(d);
    let mut out: Vec<Vec<Monomial>> = gens.iter().map(|g| vec![g.clone()]).collect();
    for x in &gens {
        for y in &gens {
            out.push(vec![x.clone(), y.clone()]);
        }
    }
    out
}

pub fn is_zero_rat(x: &Rat) -> bool {
    x.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expsum::{BasePoint, Denom};
    use crate::ratio;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn t() -> BoundaryPoint {
        BoundaryPoint::fixed_point(0)
    }

    fn chain(s: &str) -> Vec<Monomial> {
        crate::ck::parse_chain(s).unwrap()
    }

    #[test]
    fn tail_kind_example() {
        let p = GeomParams { a: 0, b: 2, c: 0, d: vec![0], lambda: rat(3) };
        let g = geom_sum(GeomKind::Tail, &p).unwrap();
        let mut expect = MeromorphicTrace::zero(1, None);
        expect.add_part(Denom::Pow { root: rat(3), power: 1 }, &ExpSum::e_power(1, rat(9), 2));
        assert_eq!(g, expect);
    }

    #[test]
    fn line_kind_plain_series() {
        let p = GeomParams { a: 0, b: 0, c: 0, d: vec![0, 0], lambda: rat(3) };
        let g = geom_sum(GeomKind::Line, &p).unwrap();
        let expect = MeromorphicTrace::simple(ExpSum::one(2), rat(1), 1, None);
        assert_eq!(g, expect);
    }

    #[test]
    fn unknown_kind_rejected() {
        assert!(GeomKind::from_index(5).is_err());
    }

    #[test]
    fn kinds_match_direct_sums() {
        let p = GeomParams { a: -3, b: 1, c: 1, d: vec![2, -1], lambda: rat(3) };
        let s = [c(2.0), c(2.0)];
        let lam = 3.0f64;
        let tot = 4.0;
        let e = |n: i64, k: i64| -> f64 {
            p.d.iter().map(|dj| -2.0 * ((n + dj).abs() + k) as f64).sum::<f64>().exp()
        };
        let mut rect = 0.0;
        let mut wedge = 0.0;
        let mut line = 0.0;
        for n in p.a..p.a + 60 {
            line += lam.powi(n as i32) * e(n, 0);
            for k in p.b..p.b + 60 {
                rect += lam.powi((n + k) as i32) * e(n, k);
            }
            for k in n + p.b..n + p.b + 60 {
                wedge += lam.powi((n + k) as i32) * e(n, k);
            }
        }
        let _ = tot;
        for (kind, direct) in [(GeomKind::Rect, rect), (GeomKind::Line, line)] {
            let v = geom_sum(kind, &p).unwrap().eval(&s).re;
            assert!((v - direct).abs() < 1e-12 * direct.abs(), "{kind:?}: {v} vs {direct}");
        }
        // λ^{c+1} = 9 is a square
        let v = geom_sum(GeomKind::Wedge, &p).unwrap().eval(&s).re;
        assert!((v - wedge).abs() < 1e-12 * wedge.abs(), "wedge {v} vs {wedge}");
        let bad = GeomParams { c: 0, ..p };
        assert!(matches!(geom_sum(GeomKind::Wedge, &bad), Err(Error::Unsupported(_))));
    }

    #[test]
    fn off_diagonal_chain_is_entire() {
        let r = closed_form_heat_trace(&chain("a1:a2"), &t(), 2).unwrap();
        assert!(r.is_entire_certificate());
        assert!(r.pole_audit().is_empty());
    }

    #[test]
    fn projection_matches_oracle() {
        let ch = chain("a1:a1");
        let r = closed_form_heat_trace(&ch, &t(), 2).unwrap();
        let s = [c(3.0)];
        let o = brute_force_heat_trace(&ch, &t(), 2, &s, 40).unwrap();
        let v = r.eval(&s);
        assert!((v - o.value).norm() < 1e-10 * v.norm(), "{v} vs {}", o.value);
    }

    #[test]
    fn unit_chain_matches_oracle_and_refuses_slow_decay() {
        let ch = vec![Monomial::unit()];
        let s = [c(3.0)];
        let r = closed_form_heat_trace(&ch, &t(), 2).unwrap();
        let o = brute_force_heat_trace(&ch, &t(), 2, &s, 16).unwrap();
        let (err, tol) = oracle_agreement(r.eval(&s), &o, 1e-8);
        assert!(err <= tol, "{err} > {tol}");
        assert!(matches!(
            brute_force_heat_trace(&ch, &t(), 2, &[c(1.0)], 16),
            Err(Error::Refused(_))
        ));
        assert!(brute_force_heat_trace(&[], &t(), 2, &[], 16).is_err());
    }

    #[test]
    fn projection_pole_bases() {
        let r = closed_form_heat_trace(&chain("a1:a1"), &t(), 2).unwrap();
        let poles = r.pole_audit();
        let bases: Vec<BasePoint> = poles.iter().map(|p| p.base.clone()).collect();
        assert!(bases.contains(&BasePoint::Zero));
        assert!(bases.contains(&BasePoint::LogLambda));
        assert!(bases.iter().all(|b| *b == BasePoint::Zero || *b == BasePoint::LogLambda));
    }

    #[test]
    fn toeplitz_projection_matches_oracle() {
        let ch = chain("a1:a1");
        let r = closed_form_toeplitz_trace(&ch, &t(), 2).unwrap();
        let s = [c(3.0)];
        let o = brute_force_toeplitz_trace(&ch, &t(), 2, &s, 40).unwrap();
        let v = r.eval(&s);
        assert!((v - o.value).norm() < 1e-10 * v.norm(), "{v} vs {}", o.value);
    }

    #[test]
    fn toeplitz_projection_residue_at_zero() {
        // Words of length n starting with a1 and not ending in b1:
        // count(n) = a·3^n + b + c·(−1)^n; the constant b is the residue at 0.
        let a = AdjacencyModel::free_group(2);
        let mut counts = Vec::new();
        for n in 1..=6 {
            let first = |x: Letter| x == 0;
            let last = |x: Letter| x != 1;
            counts.push(crate::words::enumerate_admissible(&a, n, Some(&first), Some(&last)).len() as f64);
        }
        // Solve for (a, b, c) from n = 1, 2, 3.
        let m = nalgebra::Matrix3::new(3.0, 1.0, -1.0, 9.0, 1.0, 1.0, 27.0, 1.0, -1.0);
        let rhs = nalgebra::Vector3::new(counts[0], counts[1], counts[2]);
        let sol = m.lu().solve(&rhs).unwrap();
        for n in 4..=6 {
            let pred = sol[0] * 3f64.powi(n) + sol[1] + sol[2] * (-1f64).powi(n);
            assert!((pred - counts[n as usize - 1]).abs() < 1e-9);
        }
        let r = closed_form_toeplitz_trace(&chain("a1:a1"), &t(), 2).unwrap();
        let single = r.specialize_shifts(&[0]).unwrap().as_trace(Some(2));
        let poles = single.poles_and_laurent().unwrap();
        let at_zero = poles.iter().find(|p| p.root == rat(1)).expect("pole at 0");
        assert_eq!(at_zero.order, 1);
        assert!((at_zero.residue().to_f64() - sol[1]).abs() < 1e-9);
        assert_eq!(at_zero.residue(), crate::expsum::ExpConst::rational(ratio(1, 2)));
    }
}
