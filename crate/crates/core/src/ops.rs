//! Finite truncations of operators as labelled complex matrices.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A basis vector label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Label {
    /// Fourier mode `e_n`.
    Mode(i64),
    /// Free-group vertex, as a reduced group word.
    Vertex(Vec<u8>),
    /// Lattice site and Fourier mode, `e_n ⊗ e_k`.
    Site(i64, i64),
    /// Summand index of a direct sum, with the underlying label.
    Sheet(u8, Box<Label>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabeledBasis {
    pub labels: Vec<Label>,
    pub truncation: usize,
}

impl LabeledBasis {
    pub fn new(labels: Vec<Label>, truncation: usize) -> Result<Self> {
        let set: BTreeSet<&Label> = labels.iter().collect();
        if set.len() != labels.len() {
            return Err(Error::Domain("basis labels must be distinct".into()));
        }
        Ok(LabeledBasis { labels, truncation })
    }

    /// Modes `−M..=M`.
    pub fn modes(m: usize) -> Self {
        let m = m as i64;
        LabeledBasis { labels: (-m..=m).map(Label::Mode).collect(), truncation: m as usize }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn position(&self, l: &Label) -> Option<usize> {
        self.labels.iter().position(|x| x == l)
    }

    /// `B ⊕ B` with sheets 0 and 1.
    pub fn doubled(&self) -> Self {
        let mut labels = Vec::with_capacity(2 * self.len());
        for s in 0..2u8 {
            labels.extend(self.labels.iter().map(|l| Label::Sheet(s, Box::new(l.clone()))));
        }
        LabeledBasis { labels, truncation: self.truncation }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    pub basis: LabeledBasis,
    pub matrix: DMatrix<Complex64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalOperator {
    pub basis: LabeledBasis,
    pub eigenvalues: Vec<f64>,
}

impl DiagonalOperator {
    pub fn new(basis: LabeledBasis, eigenvalues: Vec<f64>) -> Result<Self> {
        if basis.len() != eigenvalues.len() {
            return Err(Error::BasisMismatch(format!(
                "{} eigenvalues for a basis of size {}",
                eigenvalues.len(),
                basis.len()
            )));
        }
        Ok(DiagonalOperator { basis, eigenvalues })
    }

    pub fn to_operator(&self) -> TruncatedOperator {
        let n = self.eigenvalues.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, x) in self.eigenvalues.iter().enumerate() {
            m[(i, i)] = Complex64::new(*x, 0.0);
        }
        TruncatedOperator { basis: self.basis.clone(), matrix: m }
    }

    pub fn abs(&self) -> DiagonalOperator {
        DiagonalOperator { basis: self.basis.clone(), eigenvalues: self.eigenvalues.iter().map(|x| x.abs()).collect() }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DiagonalOperator {
        DiagonalOperator { basis: self.basis.clone(), eigenvalues: self.eigenvalues.iter().map(|&x| f(x)).collect() }
    }
}

/// `x ↦ x|x|^{-1}` with `0 ↦ 0`.
pub fn sign0(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum()
    }
}

/// `x ↦ sgn(x)·log(1+|x|)`.
pub fn sgnlog(x: f64) -> f64 {
    sign0(x) * x.abs().ln_1p()
}

/// Entrywise functional calculus; `None` or a non-finite value is a domain error.
pub fn func_calc(d: &DiagonalOperator, f: impl Fn(f64) -> Option<f64>) -> Result<DiagonalOperator> {
    let mut out = Vec::with_capacity(d.eigenvalues.len());
    for &x in &d.eigenvalues {
        match f(x) {
            Some(y) if y.is_finite() => out.push(y),
            _ => return Err(Error::Domain(format!("function undefined at eigenvalue {x}"))),
        }
    }
    Ok(DiagonalOperator { basis: d.basis.clone(), eigenvalues: out })
}

impl TruncatedOperator {
    pub fn new(basis: LabeledBasis, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != basis.len() || matrix.ncols() != basis.len() {
            return Err(Error::BasisMismatch(format!(
                "{}x{} matrix for a basis of size {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.len()
            )));
        }
        Ok(TruncatedOperator { basis, matrix })
    }

    pub fn identity(basis: LabeledBasis) -> Self {
        let n = basis.len();
        TruncatedOperator { basis, matrix: DMatrix::identity(n, n) }
    }

    pub fn zeros(basis: LabeledBasis) -> Self {
        let n = basis.len();
        TruncatedOperator { basis, matrix: DMatrix::zeros(n, n) }
    }

    fn same_basis(&self, other: &TruncatedOperator) -> Result<()> {
        if self.basis.labels != other.basis.labels {
            return Err(Error::BasisMismatch("operators live on different bases".into()));
        }
        Ok(())
    }

    pub fn mul(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.same_basis(other)?;
        Ok(TruncatedOperator { basis: self.basis.clone(), matrix: &self.matrix * &other.matrix })
    }

    pub fn add(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.same_basis(other)?;
        Ok(TruncatedOperator { basis: self.basis.clone(), matrix: &self.matrix + &other.matrix })
    }

    pub fn sub(&self, other: &TruncatedOperator) -> Result<TruncatedOperator> {
        self.same_basis(other)?;
        Ok(TruncatedOperator { basis: self.basis.clone(), matrix: &self.matrix - &other.matrix })
    }

    pub fn scale(&self, c: Complex64) -> TruncatedOperator {
        TruncatedOperator { basis: self.basis.clone(), matrix: &self.matrix * c }
    }

    pub fn adjoint(&self) -> TruncatedOperator {
        TruncatedOperator { basis: self.basis.clone(), matrix: self.matrix.adjoint() }
    }

    /// `D·T` for diagonal `D`, entrywise on rows.
    pub fn left_diag(&self, d: &DiagonalOperator) -> Result<TruncatedOperator> {
        self.check_diag(d)?;
        let mut m = self.matrix.clone();
        for (i, x) in d.eigenvalues.iter().enumerate() {
            m.row_mut(i).scale_mut(*x);
        }
        Ok(TruncatedOperator { basis: self.basis.clone(), matrix: m })
    }

    /// `T·D` for diagonal `D`, entrywise on columns.
    pub fn right_diag(&self, d: &DiagonalOperator) -> Result<TruncatedOperator> {
        self.check_diag(d)?;
        let mut m = self.matrix.clone();
        for (j, x) in d.eigenvalues.iter().enumerate() {
            m.column_mut(j).scale_mut(*x);
        }
        Ok(TruncatedOperator { basis: self.basis.clone(), matrix: m })
    }

    fn check_diag(&self, d: &DiagonalOperator) -> Result<()> {
        if d.basis.labels != self.basis.labels {
            return Err(Error::BasisMismatch("diagonal operator on a different basis".into()));
        }
        Ok(())
    }

    /// Compression to the labels selected by `keep`.
    pub fn compress(&self, keep: impl Fn(&Label) -> bool) -> TruncatedOperator {
        let idx: Vec<usize> = (0..self.basis.len()).filter(|&i| keep(&self.basis.labels[i])).collect();
        let labels = idx.iter().map(|&i| self.basis.labels[i].clone()).collect();
        let m = DMatrix::from_fn(idx.len(), idx.len(), |r, c| self.matrix[(idx[r], idx[c])]);
        TruncatedOperator { basis: LabeledBasis { labels, truncation: self.basis.truncation }, matrix: m }
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// `T·a − a·T`.
pub fn commutator(t: &TruncatedOperator, a: &TruncatedOperator) -> Result<TruncatedOperator> {
    t.mul(a)?.sub(&a.mul(t)?)
}

/// `T·a − σ(a)·T`.
pub fn twisted_commutator(
    t: &TruncatedOperator,
    a: &TruncatedOperator,
    sigma_a: &TruncatedOperator,
) -> Result<TruncatedOperator> {
    t.mul(a)?.sub(&sigma_a.mul(t)?)
}

/// `[D, a]` for diagonal `D`: entries `(d_i − d_j)·a_ij`.
pub fn diag_commutator(d: &DiagonalOperator, a: &TruncatedOperator) -> Result<TruncatedOperator> {
    a.left_diag(d)?.sub(&a.right_diag(d)?)
}

pub fn singular_values(m: &DMatrix<Complex64>) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut sv: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
    sv
}

/// Largest singular value.
pub fn op_norm(t: &TruncatedOperator) -> f64 {
    matrix_norm(&t.matrix)
}

pub fn matrix_norm(m: &DMatrix<Complex64>) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Number of singular values above `tol` times the largest one.
pub fn numerical_rank(t: &TruncatedOperator, tol: f64) -> usize {
    matrix_rank(&t.matrix, tol)
}

pub fn matrix_rank(m: &DMatrix<Complex64>, tol: f64) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or(0.0);
    if top == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&x| x > tol * top).count()
}

pub fn singular_value_profile(t: &TruncatedOperator) -> Vec<f64> {
    singular_values(&t.matrix)
}

/// `f(H)` for Hermitian `H` via its eigendecomposition.
pub fn hermitian_func_calc(h: &TruncatedOperator, f: impl Fn(f64) -> f64) -> TruncatedOperator {
    let sym = (&h.matrix + h.matrix.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    let n = h.matrix.nrows();
    let mut diag = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        diag[(i, i)] = Complex64::new(f(eig.eigenvalues[i]), 0.0);
    }
    let v = &eig.eigenvectors;
    TruncatedOperator { basis: h.basis.clone(), matrix: v * diag * v.adjoint() }
}

/// Maximum deviation over the spectrum between
/// `(sin rπ/π)∫₀^∞ λ^{−r}(1+x²+λ)^{−1} dλ` and `(1+x²)^{−r}`, the integral
/// computed by the trapezoidal rule after `λ = e^u`.
pub fn frac_power_integral_check(d: &DiagonalOperator, r: f64, quad_points: usize) -> Result<f64> {
    if !(r > 0.0 && r < 1.0) {
        return Err(Error::Domain(format!("exponent {r} outside (0,1)")));
    }
    if quad_points < 16 {
        return Err(Error::Domain("need at least 16 quadrature points".into()));
    }
    let mut worst: f64 = 0.0;
    for &x in &d.eigenvalues {
        let a = 1.0 + x * x;
        let c = a.ln();
        let lo = c - 40.0 / (1.0 - r);
        let hi = c + 40.0 / r;
        let h = (hi - lo) / quad_points as f64;
        let mut sum = 0.0;
        for k in 0..=quad_points {
            let u = lo + h * k as f64;
            // e^{(1−r)u}/(a+e^u), written to avoid overflow
            let val = if u > c {
                (-r * u).exp() / (1.0 + a * (-u).exp())
            } else {
                ((1.0 - r) * u).exp() / (a + u.exp())
            };
            let w = if k == 0 || k == quad_points { 0.5 } else { 1.0 };
            sum += w * val;
        }
        let integral = (r * PI).sin() / PI * sum * h;
        worst = worst.max((integral - a.powf(-r)).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag(v: &[f64]) -> DiagonalOperator {
        let b = LabeledBasis::new((0..v.len() as i64).map(Label::Mode).collect(), v.len()).unwrap();
        DiagonalOperator::new(b, v.to_vec()).unwrap()
    }

    #[test]
    fn func_calc_examples() {
        let d = diag(&[3.0, 0.0, -2.0]);
        let l = func_calc(&d, |x| Some(sgnlog(x))).unwrap();
        assert_eq!(l.eigenvalues[0], 4f64.ln());
        assert_eq!(l.eigenvalues[1], 0.0);
        let s = func_calc(&d, |x| Some(sign0(x))).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0, 0.0, -1.0]);
        assert!(func_calc(&d, |x| if x == 0.0 { None } else { Some(1.0 / x) }).is_err());
    }

    #[test]
    fn norms_and_ranks() {
        assert!((op_norm(&diag(&[1.0, -3.0, 2.0]).to_operator()) - 3.0).abs() < 1e-12);
        let id = TruncatedOperator::identity(LabeledBasis::modes(2));
        assert!((op_norm(&id) - 1.0).abs() < 1e-12);
        assert_eq!(numerical_rank(&TruncatedOperator::identity(LabeledBasis::modes(3)), 1e-8), 7);
        assert_eq!(numerical_rank(&TruncatedOperator::zeros(LabeledBasis::modes(3)), 1e-8), 0);
    }

    #[test]
    fn mismatched_bases_rejected() {
        let a = TruncatedOperator::identity(LabeledBasis::modes(2));
        let b = TruncatedOperator::identity(LabeledBasis::modes(3));
        assert!(matches!(commutator(&a, &b), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn integral_formula_examples() {
        let d = diag(&[0.0]);
        assert!(frac_power_integral_check(&d, 0.5, 4000).unwrap() < 1e-6);
        let v: Vec<f64> = (-32..=32).map(|x| x as f64).collect();
        assert!(frac_power_integral_check(&diag(&v), 0.5, 4000).unwrap() < 1e-6);
        assert!(frac_power_integral_check(&d, 1.0, 4000).is_err());
    }
}
