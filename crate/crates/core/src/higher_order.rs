//! ε-bounded commutator diagnostics and the Pimsner–Voiculescu boundary
//! operator on `ℓ²(ℤ) ⊗ L²(S¹)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circle::{mult_op, MoebiusMap, TrigPoly};
use crate::ops::{matrix_norm, DiagonalOperator, Label, LabeledBasis, TruncatedOperator};
use crate::{Error, Result};

/// `‖T·(1+D²)^{−(1−ε)/2}‖`.
pub fn eps_bounded_norm(t: &TruncatedOperator, d: &DiagonalOperator, eps: f64) -> Result<f64> {
    check_eps(eps)?;
    let w = d.map(|x| (1.0 + x * x).powf(-(1.0 - eps) / 2.0));
    Ok(matrix_norm(&t.right_diag(&w)?.matrix))
}

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::Domain(format!("ε = {eps} outside (0, 1]")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Growth {
    Plateau,
    Growing,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpsBoundReport {
    pub epsilon: f64,
    pub sweep: Vec<(usize, f64)>,
    pub verdict: Growth,
    /// `max/min` over the final three norms.
    pub plateau_ratio: f64,
    /// `last/first` over the whole sweep.
    pub growth_ratio: f64,
}

/// Plateau when the last three values are within 15% of each other, growing
/// when the sweep more than doubles.
pub fn classify(norms: &[f64]) -> (Growth, f64, f64) {
    if norms.len() < 3 {
        return (Growth::Indeterminate, f64::NAN, f64::NAN);
    }
    let tail = &norms[norms.len() - 3..];
    let max = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().copied().fold(f64::INFINITY, f64::min);
    let plateau = if min > 0.0 { max / min } else { f64::INFINITY };
    let growth = if norms[0] > 0.0 { norms[norms.len() - 1] / norms[0] } else { f64::INFINITY };
    let v = if plateau < 1.15 {
        Growth::Plateau
    } else if growth > 2.0 {
        Growth::Growing
    } else {
        Growth::Indeterminate
    };
    (v, plateau, growth)
}

/// The module `H ⊕ H`, `H = ℓ²(|n| ≤ L) ⊗ (modes |k| ≤ M)`, with
/// `D = [[0, N_s + iD_log], [N_s − iD_log, 0]]`.
#[derive(Clone, Debug)]
pub struct PvModule {
    pub s: f64,
    pub lattice: usize,
    pub modes: usize,
    pub gamma: MoebiusMap,
    pub d0_log: DiagonalOperator,
    pub basis: LabeledBasis,
    pub dirac: TruncatedOperator,
}

fn n_s(n: i64, s: f64) -> f64 {
    let x = n as f64;
    x * x.abs().powf(s)
}

/// Fourier series of `f∘γ^{−n}`, resolved within the mode window.
pub fn pulled_back(f: &TrigPoly, gamma: &MoebiusMap, n: i64, max_mode: usize) -> Result<TrigPoly> {
    let g = gamma.power(-n);
    let q = 4096usize.max(8 * max_mode.next_power_of_two());
    let samples: Vec<Complex64> = (0..q)
        .map(|k| {
            let w = g.apply(Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / q as f64));
            f.coeffs.iter().map(|(j, c)| c * w.powi(*j as i32)).sum()
        })
        .collect();
    let p = TrigPoly::from_samples(&samples, 1e-12)?;
    if 2 * p.bandwidth() > max_mode {
        return Err(Error::Domain(format!(
            "mode window {max_mode} cannot host f∘γ^{{{}}} of bandwidth {}",
            -n,
            p.bandwidth()
        )));
    }
    Ok(p)
}

pub fn pv_boundary_operator(
    d0_log: &DiagonalOperator,
    gamma: &MoebiusMap,
    s: f64,
    lattice: usize,
    modes: usize,
) -> Result<PvModule> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Domain(format!("s = {s} outside (0, 1]")));
    }
    if d0_log.basis != LabeledBasis::modes(modes) {
        return Err(Error::BasisMismatch("D0_log must live on the mode window".into()));
    }
    let ll = lattice as i64;
    let mm = modes as i64;
    for n in [-ll, ll] {
        pulled_back(&TrigPoly::z(), gamma, n, modes)?;
    }
    let mut site_labels = Vec::new();
    for n in -ll..=ll {
        for k in -mm..=mm {
            site_labels.push(Label::Site(n, k));
        }
    }
    let h = LabeledBasis { labels: site_labels, truncation: lattice };
    let basis = h.doubled();
    let dim = h.len();
    let mut m = DMatrix::<Complex64>::zeros(2 * dim, 2 * dim);
    for (i, l) in h.labels.iter().enumerate() {
        if let Label::Site(n, k) = l {
            let a = n_s(*n, s);
            let b = d0_log.eigenvalues[(k + mm) as usize];
            m[(i, dim + i)] = Complex64::new(a, b);
            m[(dim + i, i)] = Complex64::new(a, -b);
        }
    }
    Ok(PvModule {
        s,
        lattice,
        modes,
        gamma: *gamma,
        d0_log: d0_log.clone(),
        basis,
        dirac: TruncatedOperator { basis: h.doubled(), matrix: m },
    })
}

impl PvModule {
    fn site_dim(&self) -> usize {
        (2 * self.lattice + 1) * (2 * self.modes + 1)
    }

    fn site(&self, n: i64, k: i64) -> usize {
        ((n + self.lattice as i64) as usize) * (2 * self.modes + 1) + (k + self.modes as i64) as usize
    }

    fn on_both_sheets(&self, h: DMatrix<Complex64>) -> TruncatedOperator {
        let dim = self.site_dim();
        let mut m = DMatrix::<Complex64>::zeros(2 * dim, 2 * dim);
        m.view_mut((0, 0), (dim, dim)).copy_from(&h);
        m.view_mut((dim, dim), (dim, dim)).copy_from(&h);
        TruncatedOperator { basis: self.basis.clone(), matrix: m }
    }

    /// `π(f)(e_n ⊗ ψ) = e_n ⊗ (f∘γ^{−n})ψ`.
    pub fn pi(&self, f: &TrigPoly) -> Result<TruncatedOperator> {
        let dim = self.site_dim();
        let w = 2 * self.modes + 1;
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        let ll = self.lattice as i64;
        for n in -ll..=ll {
            let g = pulled_back(f, &self.gamma, n, self.modes)?;
            let block = mult_op(&g, self.modes).matrix;
            let o = self.site(n, -(self.modes as i64));
            h.view_mut((o, o), (w, w)).copy_from(&block);
        }
        Ok(self.on_both_sheets(h))
    }

    /// `α(γ)(e_n ⊗ ψ) = e_{n+1} ⊗ ψ`.
    pub fn alpha(&self) -> TruncatedOperator {
        let dim = self.site_dim();
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        let ll = self.lattice as i64;
        let mm = self.modes as i64;
        for n in -ll..ll {
            for k in -mm..=mm {
                h[(self.site(n + 1, k), self.site(n, k))] = Complex64::new(1.0, 0.0);
            }
        }
        self.on_both_sheets(h)
    }

    /// `N ⊗ 1` (with `|N|^s` applied when `power` is given).
    pub fn number(&self, power: Option<f64>) -> TruncatedOperator {
        let dim = self.site_dim();
        let mut h = DMatrix::<Complex64>::zeros(dim, dim);
        for (i, l) in self.basis.labels[..dim].iter().enumerate() {
            if let Label::Sheet(_, inner) = l {
                if let Label::Site(n, _) = **inner {
                    h[(i, i)] = Complex64::new(power.map_or(n as f64, |s| n_s(n, s)), 0.0);
                }
            }
        }
        self.on_both_sheets(h)
    }

    /// Eigenvalues of `D²` in basis order.
    pub fn dirac_squared_diagonal(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.basis.len());
        for l in &self.basis.labels {
            if let Label::Sheet(_, inner) = l {
                if let Label::Site(n, k) = **inner {
                    let a = n_s(n, self.s);
                    let b = self.d0_log.eigenvalues[(k + self.modes as i64) as usize];
                    out.push(a * a + b * b);
                }
            }
        }
        out
    }
}

/// Model whose ε-bounded commutator norms are swept.
#[derive(Clone, Debug)]
pub enum SweepTarget {
    /// `[D, π(f)]` in the Pimsner–Voiculescu module.
    PvPi { s: f64, f: TrigPoly, gamma: MoebiusMap, d0_log: DiagonalOperator },
    /// `[D, α(γ)]` in the Pimsner–Voiculescu module.
    PvAlpha { s: f64, d0_log: DiagonalOperator },
    /// A diagonal `T` against a diagonal `D`, as eigenvalue functions of `n ∈ 0..=L`.
    Diagonal { t: fn(f64) -> f64, d: fn(f64) -> f64 },
}

fn weight(n: i64, s: f64, lk: f64, eps: f64) -> f64 {
    let a = n_s(n, s);
    (1.0 + a * a + lk * lk).powf(-(1.0 - eps) / 2.0)
}

/// Norm of the block of `[D, π(f)]·(1+D²)^{−(1−ε)/2}` on lattice site `n`:
/// `‖[D_log, M_{f∘γ^{−n}}]·w_n‖`, evaluated on the inner half of the modes.
pub fn pv_pi_block_norm(f: &TrigPoly, gamma: &MoebiusMap, d0_log: &DiagonalOperator, s: f64, n: i64, eps: f64) -> Result<f64> {
    let modes = (d0_log.eigenvalues.len() - 1) / 2;
    let g = pulled_back(f, gamma, n, modes)?;
    let m = mult_op(&g, modes);
    let c = m.left_diag(d0_log)?.sub(&m.right_diag(d0_log)?)?;
    let w = d0_log.map(|lk| weight(n, s, lk, eps));
    let c = c.right_diag(&w)?;
    let inner = c.compress(|l| matches!(l, Label::Mode(k) if k.unsigned_abs() as usize <= modes / 2));
    Ok(matrix_norm(&inner.matrix))
}

/// Norm of `[D, α(γ)]·(1+D²)^{−(1−ε)/2}` restricted to sites `|n| ≤ L`:
/// the band `(n+1)|n+1|^s − n|n|^s` against the weight at `n`.
pub fn pv_alpha_norm(d0_log: &DiagonalOperator, s: f64, lattice: usize, eps: f64) -> f64 {
    let lmin = d0_log.eigenvalues.iter().map(|x| x.abs()).fold(f64::INFINITY, f64::min);
    let ll = lattice as i64;
    (-ll..ll)
        .map(|n| (n_s(n + 1, s) - n_s(n, s)).abs() * weight(n, s, lmin, eps))
        .fold(0.0, f64::max)
}

/// One report per ε over the lattice sweep.
pub fn order_sweep(target: &SweepTarget, eps_grid: &[f64], sweep: &[usize]) -> Result<Vec<EpsBoundReport>> {
    if eps_grid.is_empty() || sweep.is_empty() {
        return Err(Error::Domain("empty grid".into()));
    }
    if sweep.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("sweep sizes must be strictly increasing".into()));
    }
    for e in eps_grid {
        check_eps(*e)?;
    }
    let lmax = *sweep.last().unwrap() as i64;
    eps_grid
        .iter()
        .map(|&eps| {
            let norms: Vec<f64> = match target {
                SweepTarget::PvPi { s, f, gamma, d0_log } => {
                    let blocks: Vec<Result<f64>> = (-lmax..=lmax)
                        .into_par_iter()
                        .map(|n| pv_pi_block_norm(f, gamma, d0_log, *s, n, eps))
                        .collect();
                    let blocks: Vec<f64> = blocks.into_iter().collect::<Result<_>>()?;
                    sweep
                        .iter()
                        .map(|&l| {
                            let l = l as i64;
                            (-l..=l).map(|n| blocks[(n + lmax) as usize]).fold(0.0, f64::max)
                        })
                        .collect()
                }
                SweepTarget::PvAlpha { s, d0_log } => sweep.iter().map(|&l| pv_alpha_norm(d0_log, *s, l, eps)).collect(),
                SweepTarget::Diagonal { t, d } => sweep
                    .iter()
                    .map(|&l| {
                        (0..=l)
                            .map(|n| {
                                let x = n as f64;
                                (t(x) * (1.0 + d(x) * d(x)).powf(-(1.0 - eps) / 2.0)).abs()
                            })
                            .fold(0.0, f64::max)
                    })
                    .collect(),
            };
            let (verdict, plateau_ratio, growth_ratio) = classify(&norms);
            Ok(EpsBoundReport {
                epsilon: eps,
                sweep: sweep.iter().copied().zip(norms).collect(),
                verdict,
                plateau_ratio,
                growth_ratio,
            })
        })
        .collect()
}
