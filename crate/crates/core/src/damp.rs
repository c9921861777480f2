//! Logarithmic dampening, exponentiation, invertible amplification and
//! summability scans.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ops::{sgnlog, sign0, DiagonalOperator, TruncatedOperator};
use crate::{Error, Result};

/// `x ↦ sgn(x)·log(1+|x|)`.
pub fn sgnlog_transform(d: &DiagonalOperator) -> DiagonalOperator {
    d.map(sgnlog)
}

/// `x ↦ x(1+x²)^{−1/2}·log(1+(1+x²)^{1/2−β})`.
pub fn beta_log_transform(d: &DiagonalOperator, beta: f64) -> Result<DiagonalOperator> {
    if !(beta > 0.0 && beta < 0.5) {
        return Err(Error::Domain(format!("β = {beta} outside (0, 1/2)")));
    }
    Ok(d.map(|x| {
        let r = (1.0 + x * x).sqrt();
        x / r * r.powf(1.0 - 2.0 * beta).ln_1p()
    }))
}

/// `D_af = F·e^{|D|}` kept as signs and exponents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exponentiated {
    pub signs: Vec<f64>,
    pub exponents: Vec<f64>,
}

pub const MAX_EXPONENT: f64 = 300.0;

pub fn exponentiate(d: &DiagonalOperator) -> Result<Exponentiated> {
    let exps: Vec<f64> = d.eigenvalues.iter().map(|x| x.abs()).collect();
    if let Some(big) = exps.iter().copied().find(|x| *x > MAX_EXPONENT) {
        return Err(Error::Refused(format!("|D| eigenvalue {big} would overflow e^{{|D|}}")));
    }
    Ok(Exponentiated { signs: d.eigenvalues.iter().map(|x| sign0(*x)).collect(), exponents: exps })
}

impl Exponentiated {
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.signs.iter().zip(&self.exponents).map(|(s, e)| s * e.exp()).collect()
    }

    /// `e^{|D|}·a·e^{−|D|}`, entries scaled by `e^{|d_i|−|d_j|}`.
    pub fn twist(&self, a: &TruncatedOperator) -> Result<TruncatedOperator> {
        let n = self.exponents.len();
        if a.matrix.nrows() != n {
            return Err(Error::BasisMismatch("operator and exponent ledger differ in size".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| a.matrix[(i, j)] * (self.exponents[i] - self.exponents[j]).exp());
        Ok(TruncatedOperator { basis: a.basis.clone(), matrix: m })
    }

    /// `|D_af|` after `sgnlog`, i.e. `log(1+e^{|x|})`.
    pub fn dampened_abs(&self) -> Vec<f64> {
        self.exponents.iter().map(|e| e + (-e).exp().ln_1p()).collect()
    }
}

/// `[[D, (1+D²)^{-1}], [(1+D²)^{-1}, −D]]` on `B ⊕ B`.
pub fn invertible_amplification(d: &DiagonalOperator) -> TruncatedOperator {
    let n = d.eigenvalues.len();
    let mut m = DMatrix::<Complex64>::zeros(2 * n, 2 * n);
    for (i, x) in d.eigenvalues.iter().enumerate() {
        let r = 1.0 / (1.0 + x * x);
        m[(i, i)] = Complex64::new(*x, 0.0);
        m[(n + i, n + i)] = Complex64::new(-*x, 0.0);
        m[(i, n + i)] = Complex64::new(r, 0.0);
        m[(n + i, i)] = Complex64::new(r, 0.0);
    }
    TruncatedOperator { basis: d.basis.doubled(), matrix: m }
}

/// Eigenvalue magnitudes with multiplicities, sorted ascending.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub levels: Vec<(f64, f64)>,
}

impl Spectrum {
    pub fn from_diagonal(d: &DiagonalOperator) -> Spectrum {
        let mut levels: Vec<(f64, f64)> = d.eigenvalues.iter().map(|x| (x.abs(), 1.0)).collect();
        levels.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Spectrum { levels }
    }

    /// `|D_t|` on the free-group vertex space, level `N` counted exactly
    /// from words of length `n` with `ℓ` trailing inverse fixed letters.
    pub fn free_group(d: usize, max_level: usize) -> Spectrum {
        let q = (2 * d - 1) as f64;
        let mut mult = vec![0.0f64; max_level + 1];
        let mut add = |n: usize, l: usize, c: f64| {
            let level = (n as i64 - 2 * l as i64).unsigned_abs() as usize + l;
            if level <= max_level {
                mult[level] += c;
            }
        };
        for n in 0..=2 * max_level {
            // ℓ = 0: words not ending in t0^{-1}
            add(n, 0, q.powi(n as i32));
            for l in 1..=n {
                let k = n - l;
                let c = if k == 0 { 1.0 } else { (2 * d - 2) as f64 * q.powi(k as i32 - 1) };
                add(n, l, c);
            }
        }
        Spectrum { levels: mult.into_iter().enumerate().map(|(n, c)| (n as f64, c)).collect() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumMode {
    /// `Σ (1+|x|)^{−s}`
    Power,
    /// `Σ e^{−s|x|}`
    Exp,
}

pub fn summand(mode: SumMode, x: f64, s: f64) -> f64 {
    match mode {
        SumMode::Power => (1.0 + x.abs()).powf(-s),
        SumMode::Exp => (-s * x.abs()).exp(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SumVerdict {
    Converged,
    Diverging,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummabilityReport {
    pub mode: SumMode,
    pub s_grid: Vec<f64>,
    pub sweep: Vec<f64>,
    /// `partial_sums[i][k]`: sum over levels `≤ sweep[k]` at `s_grid[i]`.
    pub partial_sums: Vec<Vec<f64>>,
    pub verdicts: Vec<SumVerdict>,
    pub abscissa_estimate: Option<f64>,
}

/// Ratio of consecutive increments of the partial sums along the sweep.
fn increment_ratios(sums: &[f64]) -> Vec<f64> {
    let inc: Vec<f64> = sums.windows(2).map(|w| w[1] - w[0]).collect();
    inc.windows(2).map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 }).collect()
}

pub fn sum_verdict(sums: &[f64]) -> SumVerdict {
    let r = increment_ratios(sums);
    if r.len() < 3 {
        return SumVerdict::Inconclusive;
    }
    let last = &r[r.len() - 3..];
    if last.iter().all(|x| *x > 1.0 - 1e-3) {
        SumVerdict::Diverging
    } else if last.iter().all(|x| *x < 1.0 - 1e-3) {
        SumVerdict::Converged
    } else {
        SumVerdict::Inconclusive
    }
}

pub fn summability_scan(spec: &Spectrum, mode: SumMode, s_grid: &[f64], sweep: &[f64]) -> Result<SummabilityReport> {
    if s_grid.is_empty() || sweep.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    if sweep.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("sweep must be strictly increasing".into()));
    }
    let mut partial = Vec::new();
    let mut verdicts = Vec::new();
    for &s in s_grid {
        let mut sums = Vec::new();
        let mut acc = 0.0;
        let mut idx = 0;
        for &l in sweep {
            while idx < spec.levels.len() && spec.levels[idx].0 <= l {
                acc += spec.levels[idx].1 * summand(mode, spec.levels[idx].0, s);
                idx += 1;
            }
            sums.push(acc);
        }
        verdicts.push(sum_verdict(&sums));
        partial.push(sums);
    }
    let lo = s_grid
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| **v == SumVerdict::Diverging)
        .map(|(s, _)| *s)
        .fold(f64::NEG_INFINITY, f64::max);
    let hi = s_grid
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| **v == SumVerdict::Converged)
        .map(|(s, _)| *s)
        .fold(f64::INFINITY, f64::min);
    let abscissa_estimate = if lo.is_finite() && hi.is_finite() && lo < hi { Some(0.5 * (lo + hi)) } else { None };
    Ok(SummabilityReport {
        mode,
        s_grid: s_grid.to_vec(),
        sweep: sweep.to_vec(),
        partial_sums: partial,
        verdicts,
        abscissa_estimate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circle::{build_dirac, build_dlog};
    use crate::ops::{matrix_norm, singular_values};

    #[test]
    fn sgnlog_examples() {
        let d = build_dirac(4);
        let l = sgnlog_transform(&d);
        assert_eq!(l.eigenvalues[4 + 3], 4f64.ln());
        let b = beta_log_transform(&d, 0.25).unwrap();
        let expect = (1.0 / 2f64.sqrt()) * (1.0 + 2f64.powf(0.25)).ln();
        assert!((b.eigenvalues[4 + 1] - expect).abs() < 1e-15);
        assert!(beta_log_transform(&d, 0.5).is_err());
    }

    #[test]
    fn dlog_close_to_sgnlog() {
        for m in [8, 64, 512] {
            let diff = build_dlog(m)
                .eigenvalues
                .iter()
                .zip(sgnlog_transform(&build_dirac(m)).eigenvalues)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(diff <= 2f64.ln() + 1.0);
        }
    }

    #[test]
    fn exponentiate_circle() {
        let e = exponentiate(&build_dirac(5)).unwrap();
        let ev = e.eigenvalues();
        assert!((ev[5] - 1f64.exp()).abs() < 1e-15);
        assert!((ev[5 + 3] - 3f64.exp()).abs() < 1e-12);
        assert!((ev[5 - 2] + 2f64.exp()).abs() < 1e-12);
        assert!(exponentiate(&build_dirac(301)).is_err());
    }

    #[test]
    fn amplification_is_invertible() {
        let d = DiagonalOperator::new(crate::ops::LabeledBasis::modes(3), vec![0.0, 0.3, -0.5, 0.0, 1.0, 2.0, -4.0])
            .unwrap();
        let a = invertible_amplification(&d);
        let sq = &a.matrix * &a.matrix;
        assert!((sq[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!(sq[(0, 7)].norm() < 1e-15);
        let sv = singular_values(&a.matrix);
        assert!(*sv.last().unwrap() > 0.5);
        assert!(matrix_norm(&a.matrix) < 5.0);
    }
}
