//! Covariance assembly for the Gaussian relay parameterizations and an
//! exact log-determinant engine for Gaussian (conditional) mutual
//! information. Every closed-form bound in [`crate::two_relay`] is
//! cross-checked against this engine, so it deliberately avoids any of
//! the closed-form algebra.
//!
//! Conditional quantities go through Schur complements with
//! pseudo-inverses, and determinants of degenerate (rank-deficient)
//! blocks become pseudo-determinants over the range space. Fully
//! correlated corner cases (`rho = 1` and friends) therefore evaluate to
//! their limiting values instead of crashing; a genuine information
//! divergence (conditioning reveals a noiseless direction) comes back as
//! `f64::INFINITY`.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Relative eigenvalue threshold for rank decisions.
const RANK_TOL: f64 = 1e-10;

/// PSD acceptance: minimum eigenvalue at least `-PSD_TOL` (scaled).
const PSD_TOL: f64 = 1e-10;

/// Symmetry acceptance on construction.
const SYM_TOL: f64 = 1e-12;

pub const HALF_LOG2_2PIE: f64 = 2.047_095_585_180_641; // 0.5*log2(2*pi*e)

/// Symmetric PSD matrix over a named variable set.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    names: Vec<String>,
    m: DMatrix<f64>,
}

impl CovarianceMatrix {
    pub fn new(names: Vec<String>, m: DMatrix<f64>) -> Result<CovarianceMatrix> {
        let k = names.len();
        if m.nrows() != k || m.ncols() != k {
            return Err(Error::ParameterDomain(format!(
                "matrix is {}x{}, expected {k}x{k}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().fold(1.0f64, |a, &v| a.max(v.abs()));
        let mut asym = 0.0f64;
        for i in 0..k {
            for j in (i + 1)..k {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > SYM_TOL * scale.max(1.0) {
            return Err(Error::NotSymmetric(asym));
        }
        let mut sym = m.clone();
        for i in 0..k {
            for j in 0..k {
                sym[(i, j)] = 0.5 * (m[(i, j)] + m[(j, i)]);
            }
        }
        let eigs = sym.clone().symmetric_eigenvalues();
        let max_eig = eigs.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
        let min_eig = eigs.iter().fold(f64::INFINITY, |a, &v| a.min(v));
        if min_eig < -PSD_TOL * max_eig.max(1.0) {
            return Err(Error::NotPsd(min_eig));
        }
        Ok(CovarianceMatrix { names, m: sym })
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.m
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &v| a.min(v))
    }

    /// Debug-friendly JSON dump `{"vars": [...], "matrix": [[...], ...]}`.
    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<f64>> = (0..self.m.nrows())
            .map(|i| (0..self.m.ncols()).map(|j| self.m[(i, j)]).collect())
            .collect();
        serde_json::json!({ "vars": self.names, "matrix": rows }).to_string()
    }

    fn resolve(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels
            .iter()
            .map(|l| {
                self.names
                    .iter()
                    .position(|n| n == l)
                    .ok_or_else(|| Error::UnknownLabel(l.to_string()))
            })
            .collect()
    }

    fn submatrix(&self, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.m[(rows[i], cols[j])])
    }

    /// One absolute eigenvalue threshold per evaluation, anchored to the
    /// full covariance scale. Anchoring to each submatrix's own largest
    /// eigenvalue would classify the same near-zero direction
    /// inconsistently across the Schur complements of one mutual
    /// information, which blows up at correlation corners.
    fn rank_tol(&self) -> f64 {
        let max_diag = (0..self.m.nrows()).fold(0.0f64, |a, i| a.max(self.m[(i, i)]));
        RANK_TOL * max_diag.max(1.0)
    }

    /// Conditional covariance of `target` given `cond` via the Schur
    /// complement with a pseudo-inverse on the conditioning block.
    fn conditional_cov(&self, target: &[usize], cond: &[usize], tol: f64) -> DMatrix<f64> {
        let st = self.submatrix(target, target);
        if cond.is_empty() {
            return st;
        }
        let sc = self.submatrix(cond, cond);
        let stc = self.submatrix(target, cond);
        let eig = sc.symmetric_eigen();
        let mut inv = DMatrix::zeros(cond.len(), cond.len());
        for (k, &lam) in eig.eigenvalues.iter().enumerate() {
            if lam > tol {
                let v = eig.eigenvectors.column(k);
                inv += (&v * v.transpose()) / lam;
            }
        }
        &st - &stc * inv * stc.transpose()
    }

    /// Gaussian conditional mutual information `I(A ; B | C)` in bits,
    /// equal to `0.5 log2(det S_{AC} det S_{BC} / (det S_C det S_{ABC}))`
    /// in the nonsingular case (with `det S_{} = 1`). Returns `INFINITY`
    /// when conditioning on `B` removes dimensions from `A`.
    pub fn gaussian_mi(&self, a: &[&str], b: &[&str], cond: &[&str]) -> Result<f64> {
        if a.is_empty() || b.is_empty() {
            return Err(Error::EmptySubset);
        }
        let ia = self.resolve(a)?;
        let ib = self.resolve(b)?;
        let ic = self.resolve(cond)?;
        check_disjoint(&[&ia, &ib, &ic])?;
        // Canonical argument order keeps I(A;B|C) == I(B;A|C) bit-exact.
        let mut sa = ia.clone();
        let mut sb = ib.clone();
        sa.sort_unstable();
        sb.sort_unstable();
        let (first, second) = if sa <= sb { (ia, ib) } else { (ib, ia) };
        let mut cond_plus: Vec<usize> = ic.clone();
        cond_plus.extend(&second);
        let tol = self.rank_tol();
        let (r1, l1) = log_pdet(&self.conditional_cov(&first, &ic, tol), tol);
        let (r2, l2) = log_pdet(&self.conditional_cov(&first, &cond_plus, tol), tol);
        if r2 < r1 {
            return Ok(f64::INFINITY);
        }
        Ok((0.5 * (l1 - l2)).max(0.0))
    }

    /// Differential entropy `0.5 log2((2 pi e)^k det S)` in bits; returns
    /// `-INFINITY` for a singular block (only meaningful inside
    /// differences, where the degeneracy cancels via the rank rules).
    pub fn gaussian_entropy(&self, subset: &[&str]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx = self.resolve(subset)?;
        check_disjoint(&[&idx])?;
        let s = self.submatrix(&idx, &idx);
        let (rank, lpd) = log_pdet(&s, self.rank_tol());
        if rank < idx.len() {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(idx.len() as f64 * HALF_LOG2_2PIE + 0.5 * lpd)
    }

    /// Differential total correlation of `subset` given `cond`:
    /// `0.5 log2(prod var(X_w | cond) / det S_{subset | cond})`. Variables
    /// that are deterministic given `cond` drop out of both sides; if the
    /// remaining block is singular the correlation diverges (`INFINITY`).
    pub fn gaussian_total_correlation(&self, subset: &[&str], cond: &[&str]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let is = self.resolve(subset)?;
        let ic = self.resolve(cond)?;
        check_disjoint(&[&is, &ic])?;
        let tol = self.rank_tol();
        let sc = self.conditional_cov(&is, &ic, tol);
        // Variables deterministic given the conditioning drop out of both
        // sides of the ratio.
        let active: Vec<usize> = (0..is.len()).filter(|&i| sc[(i, i)] > tol).collect();
        if active.len() <= 1 {
            return Ok(0.0);
        }
        let sub = DMatrix::from_fn(active.len(), active.len(), |i, j| {
            sc[(active[i], active[j])]
        });
        let (rank, lpd) = log_pdet(&sub, tol);
        if rank < active.len() {
            return Ok(f64::INFINITY);
        }
        let diag_sum: f64 = active.iter().map(|&i| sc[(i, i)].log2()).sum();
        Ok((0.5 * (diag_sum - lpd)).max(0.0))
    }
}

fn check_disjoint(sets: &[&Vec<usize>]) -> Result<()> {
    for (i, s) in sets.iter().enumerate() {
        for (k, &v) in s.iter().enumerate() {
            if s[k + 1..].contains(&v) || sets[i + 1..].iter().any(|t| t.contains(&v)) {
                return Err(Error::OverlappingSubsets(format!("column {v}")));
            }
        }
    }
    Ok(())
}

/// Rank and base-2 log pseudo-determinant (product of eigenvalues above
/// `tol`; empty product = 1). Eigenvalues within the PSD tolerance of
/// zero clamp to zero.
fn log_pdet(m: &DMatrix<f64>, tol: f64) -> (usize, f64) {
    if m.nrows() == 0 {
        return (0, 0.0);
    }
    let eigs = m.clone().symmetric_eigenvalues();
    let mut rank = 0usize;
    let mut lpd = 0.0f64;
    for &lam in eigs.iter() {
        if lam > tol {
            rank += 1;
            lpd += lam.log2();
        }
    }
    (rank, lpd)
}

/// Correlation/power/noise parameterization of the two-relay network:
/// `rho` couples the relay inputs, `rho1`/`rho2` couple them to the
/// common auxiliary `U` (unit variance), `p1`/`p2` are transmit powers
/// and `n_aux` is the variance of the noise `W` in `V = Y + W`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRelayParams {
    pub rho: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub p1: f64,
    pub p2: f64,
    pub n_aux: f64,
}

impl TwoRelayParams {
    pub fn new(rho: f64, rho1: f64, rho2: f64, p1: f64, p2: f64, n_aux: f64) -> TwoRelayParams {
        TwoRelayParams {
            rho,
            rho1,
            rho2,
            p1,
            p2,
            n_aux,
        }
    }

    /// `1 - rho^2 - rho1^2 - rho2^2 + 2 rho rho1 rho2`, the determinant of
    /// the (U, X1, X2) correlation matrix; nonnegative iff it is PSD.
    pub fn psd_margin(&self) -> f64 {
        1.0 - self.rho * self.rho - self.rho1 * self.rho1 - self.rho2 * self.rho2
            + 2.0 * self.rho * self.rho1 * self.rho2
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [("rho", self.rho), ("rho1", self.rho1), ("rho2", self.rho2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParameterDomain(format!(
                    "0 <= {label} <= 1 violated ({label} = {v})"
                )));
            }
        }
        for (label, v) in [("p1", self.p1), ("p2", self.p2)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::ParameterDomain(format!(
                    "{label} > 0 violated ({label} = {v})"
                )));
            }
        }
        if !(self.n_aux >= 0.0) || !self.n_aux.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "N >= 0 violated (N = {})",
                self.n_aux
            )));
        }
        let margin = self.psd_margin();
        if margin < -1e-12 {
            return Err(Error::ParameterDomain(format!(
                "1 - rho^2 - rho1^2 - rho2^2 + 2 rho rho1 rho2 >= 0 violated (got {margin})"
            )));
        }
        Ok(())
    }
}

/// Symmetric parameterization of the three-relay network: common
/// pairwise correlation `rho` between the relay inputs, common
/// correlation `rho_c` to the auxiliary `U`, per-relay power `p` and
/// `V = Y + W` noise variance `n_aux`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeRelaySymParams {
    pub rho: f64,
    pub rho_c: f64,
    pub p: f64,
    pub n_aux: f64,
}

impl ThreeRelaySymParams {
    pub fn new(rho: f64, rho_c: f64, p: f64, n_aux: f64) -> ThreeRelaySymParams {
        ThreeRelaySymParams {
            rho,
            rho_c,
            p,
            n_aux,
        }
    }

    /// PSD margin of the 4x4 (U, X1, X2, X3) correlation matrix; for the
    /// symmetric pattern this is `(1 + 2 rho)/3 - rho_c^2` after the
    /// `1 - rho >= 0` factor.
    pub fn psd_margin(&self) -> f64 {
        ((1.0 + 2.0 * self.rho) / 3.0 - self.rho_c * self.rho_c).min(1.0 - self.rho)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [("rho", self.rho), ("rho_c", self.rho_c)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::ParameterDomain(format!(
                    "0 <= {label} <= 1 violated ({label} = {v})"
                )));
            }
        }
        if !(self.p > 0.0) || !self.p.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "p > 0 violated (p = {})",
                self.p
            )));
        }
        if !(self.n_aux >= 0.0) || !self.n_aux.is_finite() {
            return Err(Error::ParameterDomain(format!(
                "N >= 0 violated (N = {})",
                self.n_aux
            )));
        }
        if self.psd_margin() < -1e-12 {
            return Err(Error::ParameterDomain(format!(
                "(1 + 2 rho)/3 - rho_c^2 >= 0 violated (got {})",
                self.psd_margin()
            )));
        }
        Ok(())
    }
}

/// Covariance of `(U, X1, X2, Y, V)` with `Y = X1 + X2 + Z` (unit-variance
/// channel noise) and `V = Y + W`, `W ~ N(0, n_aux)`. `U` has unit
/// variance: the bounds depend on it only through the correlations, so
/// `P_u = 1` loses no generality.
pub fn assemble_sigma2(p: &TwoRelayParams) -> Result<CovarianceMatrix> {
    p.validate()?;
    let s1 = p.p1.sqrt();
    let s2 = p.p2.sqrt();
    let c_ux1 = p.rho1 * s1;
    let c_ux2 = p.rho2 * s2;
    let c_x1x2 = p.rho * s1 * s2;
    let v_y = p.p1 + p.p2 + 2.0 * c_x1x2 + 1.0;
    let c_uy = c_ux1 + c_ux2;
    let c_x1y = p.p1 + c_x1x2;
    let c_x2y = p.p2 + c_x1x2;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(5, 5, &[
        1.0,   c_ux1, c_ux2, c_uy,          c_uy,
        c_ux1, p.p1,  c_x1x2, c_x1y,        c_x1y,
        c_ux2, c_x1x2, p.p2,  c_x2y,        c_x2y,
        c_uy,  c_x1y, c_x2y, v_y,           v_y,
        c_uy,  c_x1y, c_x2y, v_y,           v_y + p.n_aux,
    ]);
    CovarianceMatrix::new(
        ["U", "X1", "X2", "Y", "V"].map(String::from).to_vec(),
        m,
    )
}

/// Covariance of `(U, X1, X2, X3, Y, V)` for the symmetric three-relay
/// channel `Y = X1 + X2 + X3 + Z` with unit noise and `V = Y + W`.
pub fn assemble_sigma3(p: &ThreeRelaySymParams) -> Result<CovarianceMatrix> {
    p.validate()?;
    let s = p.p.sqrt();
    let c_ux = p.rho_c * s;
    let c_xx = p.rho * p.p;
    let v_y = 3.0 * p.p + 6.0 * c_xx + 1.0;
    let c_uy = 3.0 * c_ux;
    let c_xy = p.p + 2.0 * c_xx;
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(6, 6, &[
        1.0,  c_ux, c_ux, c_ux, c_uy, c_uy,
        c_ux, p.p,  c_xx, c_xx, c_xy, c_xy,
        c_ux, c_xx, p.p,  c_xx, c_xy, c_xy,
        c_ux, c_xx, c_xx, p.p,  c_xy, c_xy,
        c_uy, c_xy, c_xy, c_xy, v_y,  v_y,
        c_uy, c_xy, c_xy, c_xy, v_y,  v_y + p.n_aux,
    ]);
    CovarianceMatrix::new(
        ["U", "X1", "X2", "X3", "Y", "V"].map(String::from).to_vec(),
        m,
    )
}
