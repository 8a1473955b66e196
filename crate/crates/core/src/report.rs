//! Result containers shared by the bound evaluators.

use crate::error::{Error, Result};

/// One evaluated right-hand side of a min-expression.
#[derive(Debug, Clone)]
pub struct Term {
    pub label: String,
    pub value_bits: f64,
}

impl Term {
    pub fn new(label: impl Into<String>, value_bits: f64) -> Term {
        Term {
            label: label.into(),
            value_bits,
        }
    }
}

/// A bound value in bits together with the binding constraint and the
/// parameters that attain it. `terms` keeps every evaluated right-hand
/// side (raw, before the nonnegativity clamp) so the binding structure
/// stays inspectable.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub value_bits: f64,
    pub binding_index: usize,
    pub binding_label: String,
    pub argmax_params: Vec<(String, f64)>,
    pub argmin_n: Option<f64>,
    pub terms: Vec<Term>,
}

impl BoundResult {
    /// Builds the result as the min over `terms`, clamped at 0 (rates are
    /// nonnegative). The binding index refers to the raw minimum.
    pub fn from_terms(
        terms: Vec<Term>,
        argmax_params: Vec<(String, f64)>,
        argmin_n: Option<f64>,
    ) -> BoundResult {
        let (binding_index, _) = terms
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.value_bits.partial_cmp(&b.1.value_bits).unwrap())
            .expect("at least one term");
        let raw = terms[binding_index].value_bits;
        BoundResult {
            value_bits: raw.max(0.0),
            binding_index,
            binding_label: terms[binding_index].label.clone(),
            argmax_params,
            argmin_n,
            terms,
        }
    }
}

/// Outer-search control for the correlation grid: uniform points per axis
/// plus an optional simplex refinement pass from the best grid points.
#[derive(Debug, Clone, Copy)]
pub struct GridSpec {
    pub resolution: usize,
    pub refine: bool,
}

impl GridSpec {
    pub fn new(resolution: usize) -> GridSpec {
        GridSpec {
            resolution,
            refine: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 2 {
            return Err(Error::InvalidGrid(format!(
                "resolution must be at least 2 per axis (got {})",
                self.resolution
            )));
        }
        Ok(())
    }
}

impl Default for GridSpec {
    fn default() -> GridSpec {
        GridSpec::new(41)
    }
}

/// One row of a capacity sweep.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub c0: f64,
    pub c: f64,
    pub lower: f64,
    pub upper: f64,
    pub cutset: f64,
    pub binding_lower: String,
    pub binding_upper: String,
}
