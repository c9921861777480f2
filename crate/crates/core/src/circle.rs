//! Fourier-mode model of `L²(S¹)`: the Dirac operator `−i d/dx + P₀`,
//! multiplication operators, Möbius unitaries and Toeplitz indices.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::ops::{matrix_norm, matrix_rank, DiagonalOperator, Label, LabeledBasis, TruncatedOperator};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourierTruncation {
    pub max_mode: usize,
}

impl FourierTruncation {
    pub fn new(max_mode: usize) -> Result<Self> {
        if max_mode == 0 {
            return Err(Error::Domain("max mode must be positive".into()));
        }
        Ok(FourierTruncation { max_mode })
    }

    pub fn basis(&self) -> LabeledBasis {
        LabeledBasis::modes(self.max_mode)
    }

    pub fn modes(&self) -> impl Iterator<Item = i64> {
        let m = self.max_mode as i64;
        -m..=m
    }

    pub fn index(&self, n: i64) -> usize {
        (n + self.max_mode as i64) as usize
    }
}

/// Finitely supported Fourier series `Σ c_k z^k`.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TrigPoly {
    pub coeffs: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn constant(c: Complex64) -> Self {
        let mut p = TrigPoly::default();
        p.coeffs.insert(0, c);
        p
    }

    pub fn one() -> Self {
        TrigPoly::constant(Complex64::new(1.0, 0.0))
    }

    pub fn monomial(k: i64) -> Self {
        let mut p = TrigPoly::default();
        p.coeffs.insert(k, Complex64::new(1.0, 0.0));
        p
    }

    pub fn z() -> Self {
        TrigPoly::monomial(1)
    }

    pub fn zbar() -> Self {
        TrigPoly::monomial(-1)
    }

    pub fn coeff(&self, k: i64) -> Complex64 {
        self.coeffs.get(&k).copied().unwrap_or_default()
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs.keys().map(|k| k.unsigned_abs() as usize).max().unwrap_or(0)
    }

    pub fn mul(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = TrigPoly::default();
        for (i, a) in &self.coeffs {
            for (j, b) in &other.coeffs {
                *out.coeffs.entry(i + j).or_default() += a * b;
            }
        }
        out
    }

    pub fn add(&self, other: &TrigPoly) -> TrigPoly {
        let mut out = self.clone();
        for (k, c) in &other.coeffs {
            *out.coeffs.entry(*k).or_default() += c;
        }
        out
    }

    /// Pointwise complex conjugate.
    pub fn conj(&self) -> TrigPoly {
        TrigPoly { coeffs: self.coeffs.iter().map(|(k, c)| (-k, c.conj())).collect() }
    }

    pub fn eval(&self, theta: f64) -> Complex64 {
        self.coeffs.iter().map(|(k, c)| c * Complex64::from_polar(1.0, *k as f64 * theta)).sum()
    }

    /// Fourier coefficients of samples of a smooth function; coefficients
    /// below `tol` are dropped and the discarded mass must stay below `tol`.
    pub fn from_samples(samples: &[Complex64], tol: f64) -> Result<TrigPoly> {
        let q = samples.len();
        let coef = fft_coefficients(samples);
        let mut out = TrigPoly::default();
        let mut dropped = 0.0;
        for (idx, c) in coef.iter().enumerate() {
            let k = if idx <= q / 2 { idx as i64 } else { idx as i64 - q as i64 };
            if c.norm() > tol {
                if k.unsigned_abs() as usize >= q / 4 {
                    return Err(Error::Resolution(format!(
                        "Fourier coefficient {k} of size {} is not resolved by {q} samples",
                        c.norm()
                    )));
                }
                out.coeffs.insert(k, *c);
            } else {
                dropped += c.norm();
            }
        }
        if dropped > tol * q as f64 {
            return Err(Error::Resolution(format!("dropped Fourier tail {dropped} exceeds tolerance")));
        }
        Ok(out)
    }
}

fn fft_coefficients(samples: &[Complex64]) -> Vec<Complex64> {
    let q = samples.len();
    let mut buf = samples.to_vec();
    FftPlanner::<f64>::new().plan_fft_forward(q).process(&mut buf);
    buf.iter().map(|c| c / q as f64).collect()
}

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

/// `γ(z) = (az+b)/(b̄z+ā)` with `|a|²−|b|² = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusMap {
    pub a: Complex64,
    pub b: Complex64,
}

impl MoebiusMap {
    pub fn new(a: Complex64, b: Complex64) -> Result<Self> {
        let det = a.norm_sqr() - b.norm_sqr();
        if (det - 1.0).abs() > 1e-12 {
            return Err(Error::Domain(format!("|a|²−|b|² = {det}, expected 1")));
        }
        Ok(MoebiusMap { a, b })
    }

    pub fn identity() -> Self {
        MoebiusMap { a: Complex64::new(1.0, 0.0), b: Complex64::new(0.0, 0.0) }
    }

    /// Hyperbolic element with translation length `τ`.
    pub fn hyperbolic(tau: f64) -> Self {
        MoebiusMap { a: Complex64::new((tau / 2.0).cosh(), 0.0), b: Complex64::new((tau / 2.0).sinh(), 0.0) }
    }

    pub fn inverse(&self) -> Self {
        MoebiusMap { a: self.a.conj(), b: -self.b }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> Self {
        MoebiusMap {
            a: self.a * other.a + self.b * other.b.conj(),
            b: self.a * other.b + self.b * other.a.conj(),
        }
    }

    pub fn power(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut out = MoebiusMap::identity();
        for _ in 0..n.unsigned_abs() {
            out = out.compose(&base);
        }
        out
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.b.conj() * z + self.a.conj())
    }

    /// `|γ′(z)|` on the unit circle.
    pub fn abs_deriv(&self, z: Complex64) -> f64 {
        1.0 / (self.b.conj() * z + self.a.conj()).norm_sqr()
    }

    /// `γ` as a Fourier series on the circle.
    pub fn as_trig_poly(&self, tol: f64) -> Result<TrigPoly> {
        let q = 1024;
        let s: Vec<Complex64> = (0..q).map(|k| self.apply(unit(2.0 * PI * k as f64 / q as f64))).collect();
        TrigPoly::from_samples(&s, tol)
    }

    /// `|(γ^n)′|` as a Fourier series.
    pub fn abs_deriv_poly(&self, n: i64, tol: f64) -> Result<TrigPoly> {
        let g = self.power(n);
        let q = 1024;
        let s: Vec<Complex64> = (0..q)
            .map(|k| Complex64::new(g.abs_deriv(unit(2.0 * PI * k as f64 / q as f64)), 0.0))
            .collect();
        TrigPoly::from_samples(&s, tol)
    }
}

/// `D = −i d/dx + P₀`: eigenvalue `n` on mode `n ≠ 0`, `1` on mode 0.
pub fn build_dirac(m: usize) -> DiagonalOperator {
    let t = FourierTruncation { max_mode: m };
    let ev = t.modes().map(|n| if n == 0 { 1.0 } else { n as f64 }).collect();
    DiagonalOperator { basis: t.basis(), eigenvalues: ev }
}

/// `∂_log`: eigenvalue `sgn(n)·log|n|`, zero on modes `0, ±1`.
pub fn build_dlog(m: usize) -> DiagonalOperator {
    let t = FourierTruncation { max_mode: m };
    let ev = t
        .modes()
        .map(|n| if n == 0 { 0.0 } else { (n.signum() as f64) * (n.abs() as f64).ln() })
        .collect();
    DiagonalOperator { basis: t.basis(), eigenvalues: ev }
}

/// Phase `F = D|D|^{-1}`; `+1` on mode 0.
pub fn build_sign(m: usize) -> DiagonalOperator {
    build_dirac(m).map(|x| x.signum())
}

/// Convolution matrix `(f̂(m−n))_{m,n}` on the window.
pub fn mult_op(f: &TrigPoly, m: usize) -> TruncatedOperator {
    let t = FourierTruncation { max_mode: m };
    let n = 2 * m + 1;
    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for col in t.modes() {
        for (k, c) in &f.coeffs {
            let row = col + k;
            if row.unsigned_abs() as usize <= m {
                mat[(t.index(row), t.index(col))] = *c;
            }
        }
    }
    TruncatedOperator { basis: t.basis(), matrix: mat }
}

/// A quadrature-built operator with its unitarity defect.
#[derive(Clone, Debug)]
pub struct QuadratureOperator {
    pub op: TruncatedOperator,
    /// `‖V*V − I‖` over the inner half-window columns, using all quadrature rows.
    pub defect: f64,
}

/// Columns `n = −M..=M` of `|γ′|^p·γ^n` expanded in all `Q` Fourier modes;
/// row `r` holds mode `r − Q/2`.
fn composition_columns(g: &MoebiusMap, m: usize, q: usize, p: f64) -> DMatrix<Complex64> {
    let mm = m as i64;
    let zs: Vec<Complex64> = (0..q).map(|k| unit(2.0 * PI * k as f64 / q as f64)).collect();
    let ws: Vec<Complex64> = zs.iter().map(|z| g.apply(*z)).collect();
    let wt: Vec<f64> = zs.iter().map(|z| g.abs_deriv(*z).powf(p)).collect();
    let mut pw: Vec<Complex64> = ws.iter().map(|w| w.powi(-(mm as i32))).collect();
    let mut out = DMatrix::<Complex64>::zeros(q, 2 * m + 1);
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(q);
    let half = (q / 2) as i64;
    for (col, _n) in (-mm..=mm).enumerate() {
        let mut buf: Vec<Complex64> = pw.iter().zip(&wt).map(|(x, w)| x * *w).collect();
        fft.process(&mut buf);
        for (idx, c) in buf.iter().enumerate() {
            let k = if (idx as i64) < half { idx as i64 } else { idx as i64 - q as i64 };
            out[((k + half) as usize, col)] = c / q as f64;
        }
        for (x, w) in pw.iter_mut().zip(&ws) {
            *x *= w;
        }
    }
    out
}

fn window_rows(full: &DMatrix<Complex64>, m: usize, q: usize) -> DMatrix<Complex64> {
    let half = q / 2;
    full.rows(half - m, 2 * m + 1).into_owned()
}

fn weighted_composition(g: &MoebiusMap, m: usize, q: usize, p: f64) -> Result<QuadratureOperator> {
    if m == 0 {
        return Err(Error::Domain("max mode must be positive".into()));
    }
    if q < 8 * m {
        return Err(Error::Domain(format!("need at least {} quadrature points, got {q}", 8 * m)));
    }
    let full = composition_columns(g, m, q, p);
    let inner = full.columns(m - m / 2, 2 * (m / 2) + 1).into_owned();
    let gram = inner.adjoint() * &inner - DMatrix::<Complex64>::identity(inner.ncols(), inner.ncols());
    let defect = matrix_norm(&gram);
    let op = TruncatedOperator { basis: FourierTruncation { max_mode: m }.basis(), matrix: window_rows(&full, m, q) };
    Ok(QuadratureOperator { op, defect })
}

/// `π(γ)φ = |γ′|^{1/2}·φ∘γ` on the mode window.
pub fn moebius_unitary(g: &MoebiusMap, m: usize, quad_points: usize) -> Result<QuadratureOperator> {
    let u = weighted_composition(g, m, quad_points, 0.5)?;
    if u.defect > 1e-8 {
        return Err(Error::Resolution(format!("unitarity defect {} exceeds 1e-8", u.defect)));
    }
    Ok(u)
}

/// Crossed-product element `f·γ^n`, represented as `M_f π(γ^n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossedElement {
    pub f: TrigPoly,
    pub n: i64,
}

/// `σ(f·γ^n) = f·|(γ^n)′|·γ^n`.
pub fn conformal_twist(x: &CrossedElement, g: &MoebiusMap, tol: f64) -> Result<CrossedElement> {
    if x.n == 0 {
        return Ok(x.clone());
    }
    let w = g.abs_deriv_poly(x.n, tol)?;
    Ok(CrossedElement { f: x.f.mul(&w), n: x.n })
}

/// `σ^k(f·γ^n) = f·|(γ^n)′|^k·γ^n` for any integer `k`.
pub fn conformal_twist_power(x: &CrossedElement, g: &MoebiusMap, k: i64, tol: f64) -> Result<CrossedElement> {
    if x.n == 0 || k == 0 {
        return Ok(x.clone());
    }
    let gn = g.power(x.n);
    let q = 1024;
    let s: Vec<Complex64> = (0..q)
        .map(|j| Complex64::new(gn.abs_deriv(unit(2.0 * PI * j as f64 / q as f64)).powi(k as i32), 0.0))
        .collect();
    let w = TrigPoly::from_samples(&s, tol)?;
    Ok(CrossedElement { f: x.f.mul(&w), n: x.n })
}

pub fn crossed_operator(x: &CrossedElement, g: &MoebiusMap, m: usize, q: usize) -> Result<TruncatedOperator> {
    let u = moebius_unitary(&g.power(x.n), m, q)?;
    mult_op(&x.f, m).mul(&u.op)
}

/// Norms of `[D, π(γ)]`, `[D, π(γ)]_σ` and `[∂_log, π(γ)]` on the inner
/// half-window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoebiusNorms {
    pub max_mode: usize,
    pub plain: f64,
    pub twisted: f64,
    pub log: f64,
    pub defect: f64,
}

pub fn moebius_commutator_norms(g: &MoebiusMap, m: usize, q: usize) -> Result<MoebiusNorms> {
    let u = moebius_unitary(g, m, q)?;
    let v = weighted_composition(g, m, q, 1.5)?;
    let d = build_dirac(m);
    let dl = build_dlog(m);
    let inner = |l: &Label| matches!(l, Label::Mode(n) if n.unsigned_abs() as usize <= m / 2);
    let plain = u.op.left_diag(&d)?.sub(&u.op.right_diag(&d)?)?.compress(inner);
    let twisted = u.op.left_diag(&d)?.sub(&v.op.right_diag(&d)?)?.compress(inner);
    let log = u.op.left_diag(&dl)?.sub(&u.op.right_diag(&dl)?)?.compress(inner);
    Ok(MoebiusNorms {
        max_mode: m,
        plain: matrix_norm(&plain.matrix),
        twisted: matrix_norm(&twisted.matrix),
        log: matrix_norm(&log.matrix),
        defect: u.defect,
    })
}

/// Winding number of `u` around 0 by the argument principle.
pub fn winding_number(u: &TrigPoly, grid: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = u.eval(0.0);
    for k in 1..=grid {
        let cur = u.eval(2.0 * PI * k as f64 / grid as f64);
        total += (cur / prev).arg();
        prev = cur;
    }
    (total / (2.0 * PI)).round() as i64
}

fn toeplitz_nullity(u: &TrigPoly, m: usize, bw: usize) -> usize {
    let rows = m + 1;
    let cols = m + 1 - bw;
    let mat = DMatrix::from_fn(rows, cols, |r, c| u.coeff(r as i64 - c as i64));
    cols - matrix_rank(&mat, 1e-8)
}

/// `dim ker(PuP) − dim ker(Pu*P)` with `P` the projection onto modes `≥ 0`,
/// read off the rectangular compressions that avoid the window edge.
pub fn toeplitz_index(u: &TrigPoly, m: usize) -> Result<i64> {
    let grid = 1024;
    let min = (0..grid).map(|k| u.eval(2.0 * PI * k as f64 / grid as f64).norm()).fold(f64::INFINITY, f64::min);
    if min <= 0.1 {
        return Err(Error::Domain(format!("symbol not invertible on the circle (min |u| = {min})")));
    }
    let bw = u.bandwidth();
    if 2 * bw >= m {
        return Err(Error::Domain(format!("window {m} too small for bandwidth {bw}")));
    }
    Ok(toeplitz_nullity(u, m, bw) as i64 - toeplitz_nullity(&u.conj(), m, bw) as i64)
}

/// Bernoulli numbers `B_2, B_4, …, B_20`.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta by Euler–Maclaurin summation; valid for `s ≠ 1`.
pub fn riemann_zeta(s: Complex64) -> Complex64 {
    let n = 30usize;
    let nf = n as f64;
    let one = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 1..n {
        sum += (-s * (k as f64).ln()).exp();
    }
    let n_s = (-s * nf.ln()).exp();
    sum += n_s * nf / (s - one) + 0.5 * n_s;
    // Σ B_{2k}/(2k)! · s(s+1)⋯(s+2k−2) · N^{−s−2k+1}
    let mut rising = s;
    let mut fact = 2.0;
    let mut npow = n_s / nf;
    for (k, b) in BERNOULLI.iter().enumerate() {
        sum += rising * npow * (*b / fact);
        let k2 = 2.0 * (k as f64 + 1.0);
        rising *= (s + (k2 - 1.0)) * (s + k2);
        fact *= (k2 + 1.0) * (k2 + 2.0);
        npow /= nf * nf;
    }
    sum
}

/// Argument of `Tr(a|D|^{−2z})` on the circle.
#[derive(Clone, Debug)]
pub enum CircleTraceArg {
    Multiplication(TrigPoly),
    /// An operator built from commutators; only its window diagonal is used.
    FiniteRank(TruncatedOperator),
}

/// `Tr(a|D|^{−2z}) = c·(1 + 2ζ(2z)) + Σ_n a_n |λ_n|^{−2z}`.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleZeta {
    pub zeta_coeff: Complex64,
    pub dirichlet: Vec<(f64, Complex64)>,
}

impl CircleZeta {
    pub fn is_entire(&self) -> bool {
        self.zeta_coeff == Complex64::new(0.0, 0.0)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut v = Complex64::new(0.0, 0.0);
        if !self.is_entire() {
            v += self.zeta_coeff * (1.0 + 2.0 * riemann_zeta(2.0 * z));
        }
        for (lam, c) in &self.dirichlet {
            v += c * (-2.0 * z * lam.ln()).exp();
        }
        v
    }

    /// `Res_{z=z0} z^j Tr(a|D|^{−2z})`; the only pole is at `z = 1/2`.
    pub fn residue(&self, z0: f64, j: u32) -> Complex64 {
        if (z0 - 0.5).abs() < 1e-15 {
            self.zeta_coeff * 0.5f64.powi(j as i32)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }
}

pub fn circle_trace(a: &CircleTraceArg) -> CircleZeta {
    match a {
        CircleTraceArg::Multiplication(f) => CircleZeta { zeta_coeff: f.coeff(0), dirichlet: Vec::new() },
        CircleTraceArg::FiniteRank(t) => {
            let mut terms: BTreeMap<i64, Complex64> = BTreeMap::new();
            for (i, l) in t.basis.labels.iter().enumerate() {
                if let Label::Mode(n) = l {
                    let c = t.matrix[(i, i)];
                    if c.norm() > 1e-13 {
                        *terms.entry(n.abs().max(1)).or_default() += c;
                    }
                }
            }
            CircleZeta {
                zeta_coeff: Complex64::new(0.0, 0.0),
                dirichlet: terms.into_iter().map(|(n, c)| (n as f64, c)).collect(),
            }
        }
    }
}

/// Residue at `z = 0` of `z^j Tr(a|D|^{−2z})`.
pub fn circle_zeta(a: &CircleTraceArg, j: u32) -> Complex64 {
    circle_trace(a).residue(0.0, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::{commutator, numerical_rank, op_norm};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dirac_eigenvalues() {
        let d = build_dirac(8);
        let t = FourierTruncation { max_mode: 8 };
        assert_eq!(d.eigenvalues[t.index(0)], 1.0);
        assert_eq!(d.eigenvalues[t.index(5)], 5.0);
        assert_eq!(d.eigenvalues[t.index(-3)], -3.0);
        let l = build_dlog(8);
        assert_eq!(l.eigenvalues[t.index(1)], 0.0);
        assert_eq!(l.eigenvalues[t.index(0)], 0.0);
        assert!((l.eigenvalues[t.index(-4)] + 4f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn shift_and_sign_commutator() {
        let z = mult_op(&TrigPoly::z(), 64);
        let t = FourierTruncation { max_mode: 64 };
        assert_eq!(z.matrix[(t.index(4), t.index(3))], c(1.0));
        assert_eq!(mult_op(&TrigPoly::one(), 5), TruncatedOperator::identity(LabeledBasis::modes(5)));
        let f = build_sign(64).to_operator();
        let k = commutator(&f, &z).unwrap();
        assert_eq!(numerical_rank(&k, 1e-8), 1);
        assert!((op_norm(&k) - 2.0).abs() < 1e-10);
        assert_eq!(k.matrix[(t.index(0), t.index(-1))], c(2.0));
    }

    #[test]
    fn moebius_identity_and_inverse() {
        let id = moebius_unitary(&MoebiusMap::identity(), 16, 128).unwrap();
        let e = &id.op.matrix - DMatrix::<Complex64>::identity(33, 33);
        assert!(e.iter().all(|x| x.norm() < 1e-12));
        let g = MoebiusMap::hyperbolic(1.0);
        let u = moebius_unitary(&g, 64, 512).unwrap();
        assert!(u.defect < 1e-8);
        let v = moebius_unitary(&g.inverse(), 64, 512).unwrap();
        let p = (&u.op.matrix * &v.op.matrix).view((48, 48), (33, 33)).into_owned();
        let err = p - DMatrix::<Complex64>::identity(33, 33);
        assert!(err.iter().all(|x| x.norm() < 1e-8), "{}", err.iter().map(|x| x.norm()).fold(0.0, f64::max));
        assert!(moebius_unitary(&g, 64, 100).is_err());
    }

    #[test]
    fn toeplitz_indices() {
        assert_eq!(toeplitz_index(&TrigPoly::z(), 128).unwrap(), -1);
        assert_eq!(toeplitz_index(&TrigPoly::one(), 128).unwrap(), 0);
        let z2 = TrigPoly::monomial(2);
        assert_eq!(toeplitz_index(&z2, 128).unwrap(), -winding_number(&z2, 4096));
        assert_eq!(winding_number(&z2, 4096), 2);
        let bad = TrigPoly::one().add(&TrigPoly::z());
        assert!(toeplitz_index(&bad, 128).is_err());
    }

    #[test]
    fn zeta_values() {
        assert!((riemann_zeta(c(2.0)) - c(PI * PI / 6.0)).norm() < 1e-12);
        assert!((riemann_zeta(c(0.0)) - c(-0.5)).norm() < 1e-12);
        assert!((riemann_zeta(c(-1.0)) - c(-1.0 / 12.0)).norm() < 1e-12);
        let eps = 1e-6;
        assert!((riemann_zeta(c(1.0 + eps)) * eps - c(1.0)).norm() < 1e-5);
    }

    #[test]
    fn circle_zeta_examples() {
        let one = CircleTraceArg::Multiplication(TrigPoly::one());
        let tr = circle_trace(&one);
        assert_eq!(tr.residue(0.5, 0), c(1.0));
        for j in 0..4 {
            assert_eq!(circle_zeta(&one, j), c(0.0));
        }
        let z = CircleTraceArg::Multiplication(TrigPoly::z());
        assert!(circle_trace(&z).eval(c(0.3)).norm() == 0.0);
    }

    #[test]
    fn twist_power_matches_single_twist() {
        let g = MoebiusMap::hyperbolic(1.0);
        let x = CrossedElement { f: TrigPoly::z(), n: 1 };
        let once = conformal_twist(&x, &g, 1e-12).unwrap();
        let pow = conformal_twist_power(&x, &g, 1, 1e-12).unwrap();
        for k in -20..=20 {
            assert!((once.f.coeff(k) - pow.f.coeff(k)).norm() < 1e-12);
        }
        let back = conformal_twist_power(&pow, &g, -1, 1e-12).unwrap();
        assert!((back.f.coeff(1) - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!(back.f.coeff(3).norm() < 1e-10);
    }
}
