//! Residue cochains built from zeta residues, their combinatorial
//! coefficients, and the comparison against index pairings.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Mutex, OnceLock};

use nalgebra::DMatrix;
use num::{One, Zero};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::circle::{
    build_dirac, conformal_twist_power, crossed_operator, toeplitz_index, CircleZeta, CrossedElement,
    MoebiusMap, TrigPoly,
};
use crate::ck::{act_on_vertex, CKElement, Monomial};
use crate::expsum::{ExpConst, ExpSum};
use crate::heat::{vertices_up_to, HeatTrace};
use crate::ops::{matrix_norm, DiagonalOperator, TruncatedOperator};
use crate::words::{inverse_letter, AdjacencyModel, BoundaryPoint, Letter, VertexVt, Word};
use crate::{rat, Error, Rat, Result};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// All multi-indices of length `m` with `|k| = total`, lexicographic.
    pub fn with_total(m: usize, total: u32) -> Vec<MultiIndex> {
        fn rec(m: usize, total: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if cur.len() + 1 == m {
                cur.push(total);
                out.push(MultiIndex(cur.clone()));
                cur.pop();
                return;
            }
            for k in (0..=total).rev() {
                cur.push(k);
                rec(m, total - k, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        if m > 0 {
            rec(m, total, &mut Vec::new(), &mut out);
        }
        out
    }
}

fn factorial(n: u32) -> Rat {
    (1..=n as i64).fold(Rat::one(), |acc, k| acc * rat(k))
}

/// `1/(k₁!⋯k_m!·(k₁+1)(k₁+k₂+2)⋯(|k|+m))`.
pub fn alpha(k: &MultiIndex) -> Result<Rat> {
    if k.0.is_empty() {
        return Err(Error::Domain("multi-index must be nonempty".into()));
    }
    let mut den = Rat::one();
    let mut partial = 0i64;
    for (i, kj) in k.0.iter().enumerate() {
        partial += *kj as i64;
        den *= factorial(*kj) * rat(partial + i as i64 + 1);
    }
    Ok(Rat::one() / den)
}

/// Coefficients of `Π_{j<n} (z + j + 1/2)`, lowest degree first.
pub fn sigma_tilde(n: usize) -> Vec<Rat> {
    let mut poly = vec![Rat::one()];
    for j in 0..n {
        let c = rat(2 * j as i64 + 1) / rat(2);
        let mut next = vec![Rat::zero(); poly.len() + 1];
        for (i, p) in poly.iter().enumerate() {
            next[i] += p * &c;
            next[i + 1] += p;
        }
        poly = next;
    }
    poly
}

/// Why a residue vanishes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Certificate {
    /// The zeta function is a finite exponential sum in `z`.
    FiniteExpSum { terms: usize },
    /// The zeta function is a finite Dirichlet sum `Σ c_n n^{−2z}`.
    FiniteDirichlet { terms: usize },
    /// Diagonal coefficients decay like `e^{−rate·|n|}`.
    ExponentialDecay { rate: f64, support: usize },
    /// An iterated twisted commutator of order `> 0` is identically zero.
    TwistVanishing,
    /// No entirety certificate: the residue was computed from poles.
    Meromorphic,
}

impl Certificate {
    pub fn is_entire(&self) -> bool {
        !matches!(self, Certificate::Meromorphic)
    }
}

/// Operator whose zeta residues `Res_{z=0} z^j Tr(T|D|^{−2z})` are taken.
#[derive(Clone, Debug)]
pub enum TraceDescriptor {
    /// `Tr(T e^{−s|D_t|})` as a function of `s = 2z`.
    Heat(HeatTrace),
    Circle(CircleZeta),
    Entire(Certificate),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TauValue {
    pub exact: Option<ExpConst>,
    pub value: f64,
    pub certificate: Certificate,
}

impl TauValue {
    fn zero(certificate: Certificate) -> Self {
        TauValue { exact: Some(ExpConst::default()), value: 0.0, certificate }
    }
}

/// `τ_j(T) = Res_{z=0} z^j Tr(T|D|^{−2z})`.
pub fn tau_j(desc: &TraceDescriptor, j: u32) -> Result<TauValue> {
    match desc {
        TraceDescriptor::Entire(c) => Ok(TauValue::zero(c.clone())),
        TraceDescriptor::Circle(z) => {
            if z.is_entire() {
                return Ok(TauValue::zero(Certificate::FiniteDirichlet { terms: z.dirichlet.len() }));
            }
            let r = z.residue(0.0, j);
            Ok(TauValue { exact: None, value: r.re, certificate: Certificate::Meromorphic })
        }
        TraceDescriptor::Heat(h) => {
            let tr = match h {
                HeatTrace::Entire(e) => {
                    return Ok(TauValue::zero(Certificate::FiniteExpSum { terms: e.len() }));
                }
                HeatTrace::Meromorphic(t) => t,
            };
            if tr.m != 1 {
                return Err(Error::Domain("τ_j needs a single-variable trace".into()));
            }
            let poles = tr.poles_and_laurent()?;
            let mut exact = ExpConst::default();
            for p in poles.iter().filter(|p| p.root == Rat::one()) {
                if p.order > 2 {
                    return Err(Error::Resolution(format!("pole of order {} at z = 0", p.order)));
                }
                // coefficient of s^{−(j+1)}, with s = 2z
                let i = j as usize + 1;
                if i <= p.order as usize {
                    let c = &p.laurent[p.order as usize - i];
                    let scale = Rat::one() / num::pow(rat(2), i);
                    for (k, v) in &c.terms {
                        exact.add_term(*k, v * &scale);
                    }
                }
            }
            Ok(TauValue { value: exact.to_f64(), exact: Some(exact), certificate: Certificate::Meromorphic })
        }
    }
}

/// Numerical `Res_{z=0} z^j f(z)` by the trapezoidal rule on `|z| = r`.
pub fn contour_residue(f: impl Fn(Complex64) -> Complex64, j: u32, r: f64, points: usize) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0..points {
        let th = 2.0 * std::f64::consts::PI * k as f64 / points as f64;
        let z = Complex64::from_polar(r, th);
        acc += f(z) * z.powu(j + 1);
    }
    acc / points as f64
}

/// Algebra elements of the three model families.
#[derive(Clone, Debug)]
pub enum Family {
    FreeGroup { d: usize, t0: Letter },
    Circle,
    Moebius { gamma: MoebiusMap, max_mode: usize, quad_points: usize },
}

#[derive(Clone, Debug)]
pub enum Element {
    Ck(CKElement),
    Trig(TrigPoly),
    Crossed(CrossedElement),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiTerm {
    pub k: MultiIndex,
    pub j: u32,
    pub coefficient: String,
    pub tau: TauValue,
}

type FgVec = BTreeMap<VertexVt, ExpSum>;

struct FreeGroupCtx {
    a: AdjacencyModel,
    t: BoundaryPoint,
}

impl FreeGroupCtx {
    fn new(d: usize, t0: Letter) -> Result<Self> {
        let a = AdjacencyModel::free_group(d);
        if t0 as usize >= 2 * d {
            return Err(Error::Domain(format!("letter {t0} outside the alphabet")));
        }
        Ok(FreeGroupCtx { a, t: BoundaryPoint::fixed_point(t0) })
    }

    fn sign(v: &VertexVt) -> i64 {
        if v.dirac_eigenvalue() >= 0 {
            1
        } else {
            -1
        }
    }

    fn apply(&self, x: &CKElement, vec: &FgVec) -> Result<FgVec> {
        let mut out = FgVec::new();
        for (v, c) in vec {
            for (w, k) in act_on_vertex(x, v, &self.t, &self.a)? {
                let e = out.entry(w).or_insert_with(|| ExpSum::zero(1));
                e.add_assign(&c.scale(&k));
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    fn sign_vec(vec: &FgVec) -> FgVec {
        vec.iter().map(|(v, c)| (v.clone(), c.scale(&rat(Self::sign(v))))).collect()
    }

    /// `[F, x]` applied to `vec`.
    fn commutator(&self, x: &CKElement, vec: &FgVec) -> Result<FgVec> {
        let a = Self::sign_vec(&self.apply(x, vec)?);
        let b = self.apply(x, &Self::sign_vec(vec))?;
        let mut out = a;
        for (v, c) in b {
            let e = out.entry(v).or_insert_with(|| ExpSum::zero(1));
            e.add_assign(&c.scale(&rat(-1)));
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    /// Vertices on which `[F, x]` is nonzero; fails unless they sit well
    /// inside the enumerated window.
    fn commutator_support(&self, x: &CKElement) -> Result<Vec<VertexVt>> {
        static CACHE: OnceLock<Mutex<HashMap<String, Vec<VertexVt>>>> = OnceLock::new();
        let t0 = self.t.fixed_letter()?;
        let key = format!("{}/{t0}/{x:?}", self.a.size());
        let cache = CACHE.get_or_init(Default::default);
        if let Some(v) = cache.lock().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let len = x.terms.keys().map(|m| m.mu.len() + m.nu.len()).max().unwrap_or(0);
        let window = len + 3;
        let mut out = Vec::new();
        for g in vertices_up_to(self.a.size() / 2, t0, window) {
            let v = VertexVt::from_group_word(&Word(g), &self.t, &self.a)?;
            let single: FgVec = [(v.clone(), ExpSum::one(1))].into_iter().collect();
            if !self.commutator(x, &single)?.is_empty() {
                if v.abs_dirac() as usize + 2 > window {
                    return Err(Error::Resolution("commutator support reaches the window edge".into()));
                }
                out.push(v);
            }
        }
        cache.lock().unwrap().insert(key, out.clone());
        Ok(out)
    }

    /// `Tr(F a₀ [F,a₁]|D_af| ⋯ [F,a_m]|D_af| |D_af|^{−m} e^{−s|D_t|})`.
    fn word_trace(&self, elems: &[CKElement]) -> Result<ExpSum> {
        let m = elems.len() - 1;
        let mut total = ExpSum::zero(1);
        for v in self.commutator_support(&elems[m])? {
            let dv = v.abs_dirac();
            let mut vec: FgVec = [(v.clone(), ExpSum::term(Rat::one(), m as i64 * dv, vec![dv]))].into_iter().collect();
            for x in elems[1..].iter().rev() {
                vec = vec.into_iter().map(|(w, c)| {
                    let k = w.abs_dirac();
                    (w, c.shift_const(-k))
                }).collect();
                vec = self.commutator(x, &vec)?;
            }
            vec = Self::sign_vec(&self.apply(&elems[0], &vec)?);
            if let Some(c) = vec.get(&v) {
                total.add_assign(c);
            }
        }
        Ok(total)
    }
}

type ModeVec = BTreeMap<i64, Complex64>;

fn circle_sign(n: i64) -> f64 {
    if n >= 0 {
        1.0
    } else {
        -1.0
    }
}

fn circle_abs(n: i64) -> f64 {
    if n == 0 {
        1.0
    } else {
        n.abs() as f64
    }
}

fn mode_mul(f: &TrigPoly, v: &ModeVec) -> ModeVec {
    let mut out = ModeVec::new();
    for (n, c) in v {
        for (k, a) in &f.coeffs {
            *out.entry(n + k).or_default() += a * c;
        }
    }
    out.retain(|_, c| c.norm() != 0.0);
    out
}

fn mode_commutator(f: &TrigPoly, v: &ModeVec) -> ModeVec {
    let fv = mode_mul(f, v);
    let signed: ModeVec = v.iter().map(|(n, c)| (*n, c * circle_sign(*n))).collect();
    let mut out: ModeVec = fv.iter().map(|(n, c)| (*n, c * circle_sign(*n))).collect();
    for (n, c) in mode_mul(f, &signed) {
        *out.entry(n).or_default() -= c;
    }
    out.retain(|_, c| c.norm() != 0.0);
    out
}

/// The circle word as a finite Dirichlet sum.
fn circle_word_trace(elems: &[TrigPoly]) -> CircleZeta {
    let m = elems.len() - 1;
    let bw = elems[m].bandwidth() as i64;
    let mut dirichlet: BTreeMap<i64, Complex64> = BTreeMap::new();
    for v in -bw - 1..=bw + 1 {
        let start: ModeVec = [(v, Complex64::new(circle_abs(v).powi(-(m as i32)), 0.0))].into_iter().collect();
        if mode_commutator(&elems[m], &start).is_empty() {
            continue;
        }
        let mut vec = start;
        for f in elems[1..].iter().rev() {
            vec = vec.into_iter().map(|(n, c)| (n, c * circle_abs(n))).collect();
            vec = mode_commutator(f, &vec);
        }
        vec = mode_mul(&elems[0], &vec);
        if let Some(c) = vec.get(&v) {
            let c = c * circle_sign(v);
            if c.norm() != 0.0 {
                *dirichlet.entry(circle_abs(v) as i64).or_default() += c;
            }
        }
    }
    CircleZeta {
        zeta_coeff: Complex64::new(0.0, 0.0),
        dirichlet: dirichlet.into_iter().map(|(n, c)| (n as f64, c)).collect(),
    }
}

/// Diagonal of `F a₀ [F,a₁]|D| ⋯ [F,a_m]|D| |D|^{−m}` on the inner half-window.
fn moebius_word_diagonal(elems: &[CrossedElement], gamma: &MoebiusMap, m: usize, q: usize) -> Result<Vec<(i64, Complex64)>> {
    let d = build_dirac(m);
    let abs = d.abs();
    let f = d.map(|x| x.signum()).to_operator();
    let mut w = TruncatedOperator::identity(d.basis.clone());
    let inv_pow = abs.map(|x| x.powi(-(elems.len() as i32 - 1)));
    let mut factors: Vec<TruncatedOperator> = Vec::new();
    for x in &elems[1..] {
        let op = crossed_operator(x, gamma, m, q)?;
        let c = crate::ops::commutator(&f, &op)?.right_diag(&abs)?;
        factors.push(c);
    }
    let a0 = crossed_operator(&elems[0], gamma, m, q)?;
    w = w.mul(&f)?.mul(&a0)?;
    for c in &factors {
        w = w.mul(c)?;
    }
    w = w.right_diag(&inv_pow)?;
    let mm = m as i64;
    Ok((-mm / 2..=mm / 2).map(|n| (n, w.matrix[((n + mm) as usize, (n + mm) as usize)])).collect())
}

/// Least-squares slope of `−log|c_n|` against `|n|` on the nonnegligible part.
fn decay_rate(diag: &[(i64, Complex64)]) -> (f64, usize) {
    let pts: Vec<(f64, f64)> = diag
        .iter()
        .filter(|(_, c)| c.norm() > 1e-13)
        .map(|(n, c)| (n.abs() as f64, c.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return (f64::INFINITY, pts.len());
    }
    let nx = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / nx;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / nx;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return (f64::INFINITY, pts.len());
    }
    (-sxy / sxx, pts.len())
}

/// `φ_{m,j,k}(a₀,…,a_m)` for the twist `σ(a) = |D|a|D|^{-1}`.
pub fn phi_mjk(family: &Family, elems: &[Element], j: u32, k: &MultiIndex) -> Result<TauValue> {
    if elems.len() < 2 || k.0.len() + 1 != elems.len() {
        return Err(Error::Domain("need a₀..a_m and a multi-index of length m".into()));
    }
    if k.total() > 0 {
        return Ok(TauValue::zero(Certificate::TwistVanishing));
    }
    match family {
        Family::FreeGroup { d, t0 } => {
            let ctx = FreeGroupCtx::new(*d, *t0)?;
            let xs: Vec<CKElement> = elems
                .iter()
                .map(|e| match e {
                    Element::Ck(x) => Ok(x.clone()),
                    _ => Err(Error::Unsupported("free-group cochains take Cuntz–Krieger elements".into())),
                })
                .collect::<Result<_>>()?;
            let tr = ctx.word_trace(&xs)?;
            tau_j(&TraceDescriptor::Heat(HeatTrace::Entire(tr)), j)
        }
        Family::Circle => {
            let xs: Vec<TrigPoly> = elems
                .iter()
                .map(|e| match e {
                    Element::Trig(x) => Ok(x.clone()),
                    _ => Err(Error::Unsupported("circle cochains take trigonometric polynomials".into())),
                })
                .collect::<Result<_>>()?;
            tau_j(&TraceDescriptor::Circle(circle_word_trace(&xs)), j)
        }
        Family::Moebius { gamma, max_mode, quad_points } => {
            let xs: Vec<CrossedElement> = elems
                .iter()
                .map(|e| match e {
                    Element::Crossed(x) => Ok(x.clone()),
                    Element::Trig(f) => Ok(CrossedElement { f: f.clone(), n: 0 }),
                    _ => Err(Error::Unsupported("Möbius cochains take crossed-product elements".into())),
                })
                .collect::<Result<_>>()?;
            let diag = moebius_word_diagonal(&xs, gamma, *max_mode, *quad_points)?;
            let edge = diag
                .iter()
                .filter(|(n, _)| n.unsigned_abs() as usize * 4 > *max_mode)
                .map(|(_, c)| c.norm())
                .fold(0.0, f64::max);
            let (rate, support) = decay_rate(&diag);
            if edge > 1e-10 || rate <= 0.0 {
                return Err(Error::Resolution(format!(
                    "diagonal coefficients do not decay inside the window (edge {edge:e}, rate {rate})"
                )));
            }
            tau_j(&TraceDescriptor::Entire(Certificate::ExponentialDecay { rate, support }), j)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CochainReport {
    pub family: String,
    pub m: usize,
    pub cutoff: u32,
    pub terms: Vec<PhiTerm>,
    /// Exact value when every term is exact.
    pub phi_exact: Option<String>,
    pub phi: f64,
    pub all_entire: bool,
}

/// `|k| ≤ 2N−1−m` with `N = ⌊p/2⌋+1`, never below 0.
pub fn k_cutoff(spectral_dimension: u32, m: usize) -> u32 {
    let n = spectral_dimension / 2 + 1;
    (2 * n as i64 - 1 - m as i64).max(0) as u32
}

pub fn family_name(f: &Family) -> &'static str {
    match f {
        Family::FreeGroup { .. } => "free_group",
        Family::Circle => "circle",
        Family::Moebius { .. } => "moebius",
    }
}

/// `φ_m = Σ_k (−1)^{|k|} α(k) Σ_j σ̃_{n,j} φ_{m,j,k}` with `n = |k|+(m−1)/2`.
pub fn assemble_phi_m(family: &Family, elems: &[Element], cutoff: u32) -> Result<CochainReport> {
    let m = elems.len().checked_sub(1).filter(|m| *m >= 1).ok_or_else(|| Error::Domain("need m ≥ 1".into()))?;
    if m % 2 == 0 {
        return Err(Error::Unsupported("odd cochains only".into()));
    }
    let mut terms = Vec::new();
    let mut exact = ExpConst::default();
    let mut all_exact = true;
    let mut phi = 0.0;
    let mut all_entire = true;
    for total in 0..=cutoff {
        let n = total as usize + (m - 1) / 2;
        let st = sigma_tilde(n);
        for k in MultiIndex::with_total(m, total) {
            let sign = if total % 2 == 0 { Rat::one() } else { -Rat::one() };
            let ak = alpha(&k)? * sign;
            for (j, s) in st.iter().enumerate() {
                let coef = &ak * s;
                let tau = phi_mjk(family, elems, j as u32, &k)?;
                all_entire &= tau.certificate.is_entire();
                match &tau.exact {
                    Some(e) => {
                        for (kk, v) in &e.terms {
                            exact.add_term(*kk, v * &coef);
                        }
                    }
                    None => all_exact = false,
                }
                phi += crate::rat_to_f64(&coef) * tau.value;
                terms.push(PhiTerm { k: k.clone(), j: j as u32, coefficient: coef.to_string(), tau });
            }
        }
    }
    Ok(CochainReport {
        family: family_name(family).into(),
        m,
        cutoff,
        terms,
        phi_exact: if all_exact { Some(exact.to_string()) } else { None },
        phi,
        all_entire,
    })
}

/// `‖D²T − σ²(T)D²‖` for `σ(T) = |D|T|D|^{-1}` and a seeded random `T`.
pub fn twist_identity_defect(d: &DiagonalOperator, seed: u64) -> Result<f64> {
    if d.eigenvalues.iter().any(|x| *x == 0.0) {
        return Err(Error::Domain("|D| must be invertible".into()));
    }
    let n = d.eigenvalues.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let t = TruncatedOperator::new(d.basis.clone(), t)?;
    let sq = d.map(|x| x * x);
    let abs2 = d.map(|x| x.abs() * x.abs());
    let inv2 = d.map(|x| 1.0 / (x.abs() * x.abs()));
    let lhs = t.left_diag(&sq)?;
    let rhs = t.right_diag(&inv2)?.left_diag(&abs2)?.right_diag(&sq)?;
    Ok(matrix_norm(&lhs.sub(&rhs)?.matrix))
}

/// `λ_γ = S_γ + S_{γ^{-1}}*`, left translation by a generator.
pub fn translation(gamma: Letter) -> CKElement {
    CKElement::from_monomial(Monomial::isometry(gamma)).add(&CKElement::from_monomial(Monomial::coisometry(inverse_letter(gamma))))
}

/// `ind(Pλ_γP) = δ_{γ^{-1},t₁} − δ_{γ,t₁}`.
pub fn free_group_pairing(gamma: Letter, t0: Letter) -> i64 {
    (inverse_letter(gamma) == t0) as i64 - (gamma == t0) as i64
}

/// Kernel and cokernel dimensions of the compressed translation on words of
/// length `< L` without trailing `t0^{-1}`.
pub fn truncated_pairing(d: usize, gamma: Letter, t0: Letter, l_max: usize) -> Result<(usize, usize)> {
    let a = AdjacencyModel::free_group(d);
    let t = BoundaryPoint::fixed_point(t0);
    let c = inverse_letter(t0);
    let in_p = |v: &VertexVt| v.k == 0;
    let lam = translation(gamma);
    let lam_inv = translation(inverse_letter(gamma));
    let mut ker = 0;
    let mut coker = 0;
    for len in 0..l_max {
        for w in crate::words::enumerate_admissible(&a, len, None, None) {
            if w.last() == Some(c) {
                continue;
            }
            let v = VertexVt::from_group_word(&w, &t, &a)?;
            if !act_on_vertex(&lam, &v, &t, &a)?.keys().any(in_p) {
                ker += 1;
            }
            if !act_on_vertex(&lam_inv, &v, &t, &a)?.keys().any(in_p) {
                coker += 1;
            }
        }
    }
    Ok((ker, coker))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub family: String,
    pub pairing: i64,
    pub pairing_check: Option<(usize, usize)>,
    pub cochains: Vec<CochainReport>,
    pub pass: bool,
}

/// Generators `S_i`, `S_i*` of the free-group model.
pub fn free_group_generators(d: usize) -> Vec<CKElement> {
    crate::heat::generator_monomials(d).into_iter().map(CKElement::from_monomial).collect()
}

fn tuples<T: Clone>(gens: &[T], len: usize) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                gens.iter().map(move |g| {
                    let mut u = t.clone();
                    u.push(g.clone());
                    u
                })
            })
            .collect();
    }
    out
}

/// Index pairing next to `φ_m` for `m ∈ {1, 3}` on generator tuples. PASS iff
/// the pairing is nonzero and every `φ_m` vanishes.
pub fn counterexample_verdict(family: &Family, gamma_letter: Option<Letter>) -> Result<VerdictReport> {
    let mut cochains = Vec::new();
    let (pairing, check) = match family {
        Family::FreeGroup { d, t0 } => {
            let g = gamma_letter.unwrap_or(*t0);
            let p = free_group_pairing(g, *t0);
            let (ker, coker) = truncated_pairing(*d, g, *t0, 10)?;
            if ker as i64 - coker as i64 != p {
                return Err(Error::Resolution(format!("truncated kernel count {ker} − {coker} disagrees with {p}")));
            }
            let gens: Vec<Element> = free_group_generators(*d).into_iter().map(Element::Ck).collect();
            let dim = ((2 * d - 1) as f64).ln().ceil() as u32;
            for m in [1usize, 3] {
                for tup in tuples(&gens, m + 1) {
                    cochains.push(assemble_phi_m(family, &tup, k_cutoff(dim, m))?);
                }
            }
            (p, Some((ker, coker)))
        }
        Family::Circle => {
            let p = toeplitz_index(&TrigPoly::z(), 128)?;
            let zbar = Element::Trig(TrigPoly::zbar());
            let z = Element::Trig(TrigPoly::z());
            for m in [1usize, 3] {
                let tup: Vec<Element> = (0..=m).map(|i| if i % 2 == 0 { zbar.clone() } else { z.clone() }).collect();
                cochains.push(assemble_phi_m(family, &tup, k_cutoff(1, m))?);
            }
            (p, None)
        }
        Family::Moebius { gamma, .. } => {
            let p = toeplitz_index(&gamma.as_trig_poly(1e-12)?, 128)?;
            let u = CrossedElement { f: TrigPoly::one(), n: 1 };
            let uinv = CrossedElement { f: TrigPoly::one(), n: -1 };
            // saturation layers σ^k, |k| ≤ 3
            for k in -3..=3 {
                let tup = vec![
                    Element::Crossed(conformal_twist_power(&uinv, gamma, k, 1e-12)?),
                    Element::Crossed(conformal_twist_power(&u, gamma, k, 1e-12)?),
                ];
                cochains.push(assemble_phi_m(family, &tup, k_cutoff(1, 1))?);
            }
            let u = Element::Crossed(u);
            let uinv = Element::Crossed(uinv);
            let z = Element::Trig(TrigPoly::z());
            let zbar = Element::Trig(TrigPoly::zbar());
            for m in [1usize, 3] {
                for tup in [
                    (0..=m).map(|i| if i % 2 == 0 { zbar.clone() } else { z.clone() }).collect::<Vec<_>>(),
                    (0..=m).map(|i| if i % 2 == 0 { uinv.clone() } else { u.clone() }).collect::<Vec<_>>(),
                ] {
                    cochains.push(assemble_phi_m(family, &tup, k_cutoff(1, m))?);
                }
            }
            (p, None)
        }
    };
    let vanishing = cochains.iter().all(|c| c.all_entire && c.phi == 0.0);
    Ok(VerdictReport {
        family: family_name(family).into(),
        pairing,
        pairing_check: check,
        cochains,
        pass: pairing != 0 && vanishing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratio;

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha(&MultiIndex(vec![0])).unwrap(), rat(1));
        assert_eq!(alpha(&MultiIndex(vec![1])).unwrap(), ratio(1, 2));
        assert_eq!(alpha(&MultiIndex(vec![0, 0])).unwrap(), ratio(1, 2));
        assert!(alpha(&MultiIndex(vec![])).is_err());
    }

    #[test]
    fn sigma_tilde_examples() {
        assert_eq!(sigma_tilde(0), vec![rat(1)]);
        assert_eq!(sigma_tilde(1), vec![ratio(1, 2), rat(1)]);
        assert_eq!(sigma_tilde(2), vec![ratio(3, 4), rat(2), rat(1)]);
    }

    #[test]
    fn multi_indices_enumerate() {
        assert_eq!(MultiIndex::with_total(2, 2).len(), 3);
        assert_eq!(MultiIndex::with_total(3, 2).len(), 6);
    }

    #[test]
    fn translation_pairings() {
        assert_eq!(free_group_pairing(0, 0), -1);
        assert_eq!(free_group_pairing(1, 0), 1);
        assert_eq!(free_group_pairing(2, 0), 0);
        assert_eq!(truncated_pairing(2, 0, 0, 6).unwrap(), (0, 1));
        assert_eq!(truncated_pairing(2, 1, 0, 6).unwrap(), (1, 0));
        assert_eq!(truncated_pairing(2, 2, 0, 6).unwrap(), (0, 0));
    }

    #[test]
    fn free_group_m1_vanishes() {
        let f = Family::FreeGroup { d: 2, t0: 0 };
        let els = vec![
            Element::Ck(CKElement::from_monomial(Monomial::coisometry(0))),
            Element::Ck(CKElement::from_monomial(Monomial::isometry(0))),
        ];
        let r = assemble_phi_m(&f, &els, 0).unwrap();
        assert_eq!(r.phi_exact.as_deref(), Some("0"));
        assert!(r.all_entire);
    }

    #[test]
    fn circle_m1_vanishes() {
        let r = assemble_phi_m(&Family::Circle, &[Element::Trig(TrigPoly::zbar()), Element::Trig(TrigPoly::z())], 0)
            .unwrap();
        assert!(r.all_entire);
        assert_eq!(r.phi, 0.0);
        let word = circle_word_trace(&[TrigPoly::zbar(), TrigPoly::z()]);
        assert!(!word.dirichlet.is_empty());
    }

    #[test]
    fn twist_identity_is_exact() {
        let d = build_dirac(5);
        assert!(twist_identity_defect(&d, 7).unwrap() < 1e-12);
    }

    #[test]
    fn unit_tau_matches_contour() {
        let h = crate::heat::closed_form_heat_trace(&[Monomial::unit()], &BoundaryPoint::fixed_point(0), 2).unwrap();
        for j in 0..3 {
            let exact = tau_j(&TraceDescriptor::Heat(h.clone()), j).unwrap();
            let numeric = contour_residue(|z| h.eval(&[z * 2.0]), j, 0.2, 256);
            assert!((exact.value - numeric.re).abs() < 1e-8, "j={j}: {} vs {numeric}", exact.value);
            assert!(numeric.im.abs() < 1e-8);
        }
    }

    #[test]
    fn circle_unit_tau_vanishes_at_zero() {
        let z = crate::circle::circle_trace(&crate::circle::CircleTraceArg::Multiplication(TrigPoly::one()));
        for j in 0..3 {
            assert!(tau_j(&TraceDescriptor::Circle(z.clone()), j).unwrap().value.abs() < 1e-10);
        }
    }

    #[test]
    fn higher_twist_terms_vanish() {
        let f = Family::Circle;
        let els = [Element::Trig(TrigPoly::zbar()), Element::Trig(TrigPoly::z())];
        let t = phi_mjk(&f, &els, 0, &MultiIndex(vec![2])).unwrap();
        assert_eq!(t.certificate, Certificate::TwistVanishing);
        assert_eq!(t.value, 0.0);
    }

    #[test]
    fn cutoffs() {
        assert_eq!(k_cutoff(1, 1), 0);
        assert_eq!(k_cutoff(2, 1), 2);
        assert_eq!(k_cutoff(2, 3), 0);
        assert_eq!(k_cutoff(1, 3), 0);
    }
}
