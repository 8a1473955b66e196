//! Discrete information measures over finite product alphabets.
//!
//! All quantities are exact sums over a dense joint probability tensor,
//! in bits (base-2 logs, `0 log 0 = 0`). The tensor is stored row-major
//! with the last declared variable varying fastest. Total correlation of
//! a set `S` is `sum_{w in S} H(U_w) - H(U_S)`, the multivariate
//! generalization of mutual information; it vanishes exactly when the
//! members of `S` are independent.

use crate::error::{Error, Result};
use serde::Deserialize;

/// Guard on the dense tensor size; this is a desk-scale tool.
pub const MAX_TENSOR_CELLS: usize = 10_000_000;

/// Tolerance for accepting an unnormalized tensor; inputs within this
/// distance of unit mass are renormalized, anything further is rejected.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Joint probability mass function over named finite-alphabet variables.
#[derive(Debug, Clone)]
pub struct DiscreteJointDist {
    names: Vec<String>,
    sizes: Vec<usize>,
    probs: Vec<f64>,
    strides: Vec<usize>,
}

#[derive(Deserialize)]
struct PmfDoc {
    vars: Vec<String>,
    sizes: Vec<usize>,
    probs: serde_json::Value,
}

fn flatten_probs(value: &serde_json::Value, sizes: &[usize], out: &mut Vec<f64>) -> Result<()> {
    match sizes {
        [] => match value.as_f64() {
            Some(p) => {
                out.push(p);
                Ok(())
            }
            None => Err(Error::Parse(format!("expected a number, got {value}"))),
        },
        [head, rest @ ..] => {
            let arr = value
                .as_array()
                .ok_or_else(|| Error::Parse(format!("expected an array, got {value}")))?;
            if arr.len() != *head {
                return Err(Error::Parse(format!(
                    "expected {head} entries at this nesting level, got {}",
                    arr.len()
                )));
            }
            for v in arr {
                flatten_probs(v, rest, out)?;
            }
            Ok(())
        }
    }
}

impl DiscreteJointDist {
    /// Builds a joint pmf from a flat row-major tensor (last variable
    /// fastest). Entries must be nonnegative and sum to 1 within
    /// [`NORMALIZATION_TOL`]; the mass is renormalized on ingestion.
    pub fn new(
        names: Vec<String>,
        sizes: Vec<usize>,
        probs: Vec<f64>,
    ) -> Result<DiscreteJointDist> {
        if names.is_empty() {
            return Err(Error::InvalidDistribution("no variables".into()));
        }
        if names.len() != sizes.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} names vs {} alphabet sizes",
                names.len(),
                sizes.len()
            )));
        }
        for (i, a) in names.iter().enumerate() {
            if names[i + 1..].contains(a) {
                return Err(Error::InvalidDistribution(format!("duplicate label `{a}`")));
            }
        }
        if sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidDistribution("alphabet size 0".into()));
        }
        let total: usize = sizes.iter().try_fold(1usize, |acc, &s| {
            acc.checked_mul(s).filter(|&t| t <= MAX_TENSOR_CELLS)
        })
        .ok_or_else(|| {
            Error::InvalidDistribution(format!("tensor exceeds {MAX_TENSOR_CELLS} cells"))
        })?;
        if probs.len() != total {
            return Err(Error::InvalidDistribution(format!(
                "tensor has {} cells, shape wants {total}",
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|&&p| !(p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("bad entry {p}")));
        }
        let mass: f64 = probs.iter().sum();
        if (mass - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!(
                "total mass {mass} outside 1 +/- {NORMALIZATION_TOL}"
            )));
        }
        let probs: Vec<f64> = probs.iter().map(|p| p / mass).collect();
        let mut strides = vec![1usize; sizes.len()];
        for i in (0..sizes.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * sizes[i + 1];
        }
        Ok(DiscreteJointDist {
            names,
            sizes,
            probs,
            strides,
        })
    }

    /// Parses the JSON document form
    /// `{"vars":["U","X"],"sizes":[2,2],"probs":[[..],[..]]}` where the
    /// nesting of `probs` is row-major in `vars` order.
    pub fn from_json(text: &str) -> Result<DiscreteJointDist> {
        let doc: PmfDoc =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let mut flat = Vec::new();
        flatten_probs(&doc.probs, &doc.sizes, &mut flat)?;
        DiscreteJointDist::new(doc.vars, doc.sizes, flat)
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn num_vars(&self) -> usize {
        self.names.len()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    fn resolve(&self, labels: &[&str]) -> Result<Vec<usize>> {
        labels.iter().map(|l| self.index_of(l)).collect()
    }

    /// Flat tensor index of a full symbol assignment.
    pub fn cell_index(&self, symbols: &[usize]) -> usize {
        symbols
            .iter()
            .zip(&self.strides)
            .map(|(s, st)| s * st)
            .sum()
    }

    /// Marginal pmf over the given variable indices, row-major in the
    /// order given.
    fn marginal_by_idx(&self, idx: &[usize]) -> Vec<f64> {
        let msize: usize = idx.iter().map(|&i| self.sizes[i]).product();
        let mut out = vec![0.0; msize];
        let mut sym = vec![0usize; self.num_vars()];
        for (cell, &p) in self.probs.iter().enumerate() {
            let mut rem = cell;
            for i in 0..self.num_vars() {
                sym[i] = rem / self.strides[i];
                rem %= self.strides[i];
            }
            let mut m = 0usize;
            for &i in idx {
                m = m * self.sizes[i] + sym[i];
            }
            out[m] += p;
        }
        out
    }

    /// Marginal pmf over the given labels.
    pub fn marginal(&self, labels: &[&str]) -> Result<Vec<f64>> {
        Ok(self.marginal_by_idx(&self.resolve(labels)?))
    }

    fn entropy_by_idx(&self, idx: &[usize]) -> f64 {
        plogp_sum(&self.marginal_by_idx(idx))
    }

    /// Shannon entropy of the marginal on `subset`, in bits.
    pub fn entropy(&self, subset: &[&str]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let idx = self.resolve(subset)?;
        check_disjoint(&[&idx])?;
        Ok(self.entropy_by_idx(&idx))
    }

    /// `H(A | B) = H(A,B) - H(B)`; `subset_b` may be empty.
    pub fn conditional_entropy(&self, subset_a: &[&str], subset_b: &[&str]) -> Result<f64> {
        if subset_a.is_empty() {
            return Err(Error::EmptySubset);
        }
        let a = self.resolve(subset_a)?;
        let b = self.resolve(subset_b)?;
        check_disjoint(&[&a, &b])?;
        if b.is_empty() {
            return Ok(self.entropy_by_idx(&a));
        }
        let ab: Vec<usize> = a.iter().chain(&b).copied().collect();
        Ok(self.entropy_by_idx(&ab) - self.entropy_by_idx(&b))
    }

    /// `I(A ; B | C) = H(A|C) + H(B|C) - H(A,B|C)`, clamped at 0.
    pub fn mutual_information(
        &self,
        subset_a: &[&str],
        subset_b: &[&str],
        subset_cond: &[&str],
    ) -> Result<f64> {
        if subset_a.is_empty() || subset_b.is_empty() {
            return Err(Error::EmptySubset);
        }
        let a = self.resolve(subset_a)?;
        let b = self.resolve(subset_b)?;
        let c = self.resolve(subset_cond)?;
        check_disjoint(&[&a, &b, &c])?;
        let join = |xs: &[&Vec<usize>]| -> Vec<usize> {
            xs.iter().flat_map(|v| v.iter().copied()).collect()
        };
        let h_ac = self.entropy_by_idx(&join(&[&a, &c]));
        let h_bc = self.entropy_by_idx(&join(&[&b, &c]));
        let h_abc = self.entropy_by_idx(&join(&[&a, &b, &c]));
        let h_c = if c.is_empty() {
            0.0
        } else {
            self.entropy_by_idx(&c)
        };
        Ok((h_ac + h_bc - h_abc - h_c).max(0.0))
    }

    /// Total correlation `sum_{w in subset} H(w|cond) - H(subset|cond)`,
    /// clamped at 0. A singleton has total correlation 0.
    pub fn total_correlation(&self, subset: &[&str], subset_cond: &[&str]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::EmptySubset);
        }
        let s = self.resolve(subset)?;
        let c = self.resolve(subset_cond)?;
        check_disjoint(&[&s, &c])?;
        let h_c = if c.is_empty() {
            0.0
        } else {
            self.entropy_by_idx(&c)
        };
        let mut acc = 0.0;
        for &w in &s {
            let wc: Vec<usize> = std::iter::once(w).chain(c.iter().copied()).collect();
            acc += self.entropy_by_idx(&wc) - h_c;
        }
        let sc: Vec<usize> = s.iter().chain(&c).copied().collect();
        acc -= self.entropy_by_idx(&sc) - h_c;
        Ok(acc.max(0.0))
    }

    /// Residual of the conditional-information identity
    /// `I(X;Y|Z) = I(X,Y;U|Z) - I(Y;U|X,Z) + I(X;Y|U,Z) - I(X;U|Y,Z)`,
    /// which holds for every joint distribution; the returned absolute
    /// residual is numerical noise only.
    pub fn auxiliary_identity_residual(
        &self,
        x: &[&str],
        y: &[&str],
        z: &[&str],
        u: &[&str],
    ) -> Result<f64> {
        if x.is_empty() || y.is_empty() || z.is_empty() || u.is_empty() {
            return Err(Error::EmptySubset);
        }
        check_disjoint(&[
            &self.resolve(x)?,
            &self.resolve(y)?,
            &self.resolve(z)?,
            &self.resolve(u)?,
        ])?;
        let xy: Vec<&str> = x.iter().chain(y).copied().collect();
        let xz: Vec<&str> = x.iter().chain(z).copied().collect();
        let yz: Vec<&str> = y.iter().chain(z).copied().collect();
        let uz: Vec<&str> = u.iter().chain(z).copied().collect();
        let lhs = self.mutual_information(x, y, z)?;
        let rhs = self.mutual_information(&xy, u, z)? - self.mutual_information(y, u, &xz)?
            + self.mutual_information(x, y, &uz)?
            - self.mutual_information(x, u, &yz)?;
        Ok((lhs - rhs).abs())
    }
}

fn check_disjoint(sets: &[&Vec<usize>]) -> Result<()> {
    for (i, a) in sets.iter().enumerate() {
        for (k, &v) in a.iter().enumerate() {
            if a[k + 1..].contains(&v) || sets[i + 1..].iter().any(|b| b.contains(&v)) {
                return Err(Error::OverlappingSubsets(format!("index {v}")));
            }
        }
    }
    Ok(())
}

/// `-sum p log2 p` with the `0 log 0 = 0` convention.
pub fn plogp_sum(probs: &[f64]) -> f64 {
    let mut h = 0.0;
    for &p in probs {
        if p > 0.0 {
            h -= p * p.log2();
        }
    }
    h.max(0.0)
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    plogp_sum(&[p, 1.0 - p])
}
