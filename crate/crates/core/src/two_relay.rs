//! Closed-form evaluation and min-max optimization of the two-relay
//! Gaussian lower and upper bounds.
//!
//! All rate expressions are in bits. The correlation triple
//! `(rho, rho1, rho2)` lives in the PSD region
//! `1 - rho^2 - rho1^2 - rho2^2 + 2 rho rho1 rho2 >= 0`; upper bounds
//! take the max over that region of a min of constraint terms, with an
//! inner min over the auxiliary noise variance `N` where the bound uses
//! `V = Y + W`. Every closed form here is pinned against the
//! log-determinant engine in [`crate::gaussian`] by the test suite.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::gaussian::{assemble_sigma2, TwoRelayParams};
use crate::optim::{golden_min, nelder_mead_max, INFEASIBLE};
use crate::report::{BoundResult, GridSpec, SweepRow, Term};

/// Degeneracy threshold for the closed-form corner conventions.
const EPS: f64 = 1e-12;

/// `nstar` values below this are treated as 0 (the `V = Y` branch).
pub const NSTAR_POS_TOL: f64 = 1e-9;

/// Fronthaul and conferencing link capacities in bits per channel use.
/// `c11`/`c22` feed the relays from the central processor; `c12` is the
/// BS1->BS2 conferencing capacity and `c21` the reverse one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkCaps2 {
    pub c11: f64,
    pub c22: f64,
    pub c12: f64,
    pub c21: f64,
}

impl LinkCaps2 {
    pub fn new(c11: f64, c22: f64, c12: f64, c21: f64) -> LinkCaps2 {
        LinkCaps2 { c11, c22, c12, c21 }
    }

    pub fn symmetric(c: f64, c0: f64) -> LinkCaps2 {
        LinkCaps2::new(c, c, c0, c0)
    }

    pub fn validate(&self) -> Result<()> {
        for (label, v) in [
            ("c11", self.c11),
            ("c22", self.c22),
            ("c12", self.c12),
            ("c21", self.c21),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::ParameterDomain(format!(
                    "capacity {label} must be nonnegative (got {v})"
                )));
            }
        }
        Ok(())
    }

    fn sum4(&self) -> f64 {
        self.c11 + self.c22 + self.c12 + self.c21
    }
}

/// The two printings of the `phi_k` factor. The squared form
/// `(1 - rho_k^2)(1 + N) + margin * P` is the one the conditional-variance
/// derivation produces and the default everywhere; the linear form
/// `(1 - rho_k)^2 (1 + N) + margin * P` is selectable for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PhiVariant {
    #[default]
    Squared,
    Linear,
}

impl PhiVariant {
    pub fn parse(s: &str) -> Result<PhiVariant> {
        match s {
            "sq" | "squared" => Ok(PhiVariant::Squared),
            "linear" => Ok(PhiVariant::Linear),
            other => Err(Error::Parse(format!(
                "phi variant must be `sq` or `linear`, got `{other}`"
            ))),
        }
    }
}

/// `phi_k(rho, rho1, rho2, P) = (1 - rho_k^2)(1 + N) + margin * P`, with
/// `P` the power of the *other* relay and `N` taken from `params.n_aux`.
pub fn phi_k(params: &TwoRelayParams, k: u8, p_other: f64, variant: PhiVariant) -> Result<f64> {
    params.validate()?;
    let rho_k = match k {
        1 => params.rho1,
        2 => params.rho2,
        _ => {
            return Err(Error::ParameterDomain(format!(
                "phi_k index must be 1 or 2 (got {k})"
            )))
        }
    };
    let base = match variant {
        PhiVariant::Squared => 1.0 - rho_k * rho_k,
        PhiVariant::Linear => (1.0 - rho_k) * (1.0 - rho_k),
    };
    Ok(base * (1.0 + params.n_aux) + params.psd_margin() * p_other)
}

/// `varphi = 1 + (1-rho1^2)P1 + (1-rho2^2)P2 + 2(rho - rho1 rho2)sqrt(P1 P2)`,
/// the conditional received power `var(Y | U)`.
pub fn varphi(params: &TwoRelayParams) -> Result<f64> {
    params.validate()?;
    Ok(varphi_raw(
        params.rho,
        params.rho1,
        params.rho2,
        params.p1,
        params.p2,
    ))
}

fn margin_raw(rho: f64, rho1: f64, rho2: f64) -> f64 {
    1.0 - rho * rho - rho1 * rho1 - rho2 * rho2 + 2.0 * rho * rho1 * rho2
}

fn varphi_raw(rho: f64, rho1: f64, rho2: f64, p1: f64, p2: f64) -> f64 {
    1.0 + (1.0 - rho1 * rho1) * p1
        + (1.0 - rho2 * rho2) * p2
        + 2.0 * (rho - rho1 * rho2) * (p1 * p2).sqrt()
}

/// Closed-form Gaussian information quantities at a correlation triple.
/// Corner conventions (derived as limits within the PSD region):
/// `I(X1;X2|U)` collapses to 0 once either relay input is deterministic
/// given `U`, and diverges when the margin vanishes while both stay
/// random; the `I(X_k;Y|U,X_j)` ratios take their boundary values at
/// `rho_j = 1`.
#[derive(Debug, Clone, Copy)]
struct ClosedForms {
    i_x1x2_u: f64,
    i_x2y_ux1: f64,
    i_x1y_ux2: f64,
    i_mac: f64,
    i_x1x2y_u: f64,
    varphi: f64,
    margin: f64,
    a: f64,
    b: f64,
}

impl ClosedForms {
    fn at(rho: f64, rho1: f64, rho2: f64, p1: f64, p2: f64) -> ClosedForms {
        let a = 1.0 - rho1 * rho1;
        let b = 1.0 - rho2 * rho2;
        let margin = margin_raw(rho, rho1, rho2);
        let d = margin.max(0.0);
        let vphi = varphi_raw(rho, rho1, rho2, p1, p2);
        let i_x1x2_u = if a <= EPS || b <= EPS {
            0.0
        } else if d <= EPS {
            f64::INFINITY
        } else {
            0.5 * (a * b / d).log2()
        };
        let q_a = if a > EPS { d / a } else { b };
        let q_b = if b > EPS { d / b } else { a };
        ClosedForms {
            i_x1x2_u,
            i_x2y_ux1: 0.5 * (1.0 + p2 * q_a).log2(),
            i_x1y_ux2: 0.5 * (1.0 + p1 * q_b).log2(),
            i_mac: 0.5 * (1.0 + p1 + p2 + 2.0 * rho * (p1 * p2).sqrt()).log2(),
            i_x1x2y_u: 0.5 * vphi.log2(),
            varphi: vphi,
            margin: d,
            a,
            b,
        }
    }
}

const LB_LABELS: [&str; 5] = [
    "C11+C22 - I(X1;X2|U)",
    "C11+C12 + I(X2;Y|U,X1)",
    "C22+C21 + I(X1;Y|U,X2)",
    "I(X1,X2;Y)",
    "(C11+C22+C12+C21 + I(X1,X2;Y|U) - I(X1;X2|U))/2",
];

fn lower_terms_closed(cf: &ClosedForms, caps: &LinkCaps2) -> [f64; 5] {
    [
        caps.c11 + caps.c22 - cf.i_x1x2_u,
        caps.c11 + caps.c12 + cf.i_x2y_ux1,
        caps.c22 + caps.c21 + cf.i_x1y_ux2,
        cf.i_mac,
        0.5 * (caps.sum4() + cf.i_x1x2y_u - cf.i_x1x2_u),
    ]
}

/// Achievable rate at a fixed jointly Gaussian `(U, X1, X2)`: the min of
/// the five coded-cooperation terms, every mutual information evaluated
/// through the log-determinant engine on the assembled covariance.
pub fn lower_bound2(params: &TwoRelayParams, caps: &LinkCaps2) -> Result<BoundResult> {
    caps.validate()?;
    let sigma = assemble_sigma2(params)?;
    let i_x1x2_u = sigma.gaussian_mi(&["X1"], &["X2"], &["U"])?;
    let i_x2y_ux1 = sigma.gaussian_mi(&["X2"], &["Y"], &["U", "X1"])?;
    let i_x1y_ux2 = sigma.gaussian_mi(&["X1"], &["Y"], &["U", "X2"])?;
    let i_mac = sigma.gaussian_mi(&["X1", "X2"], &["Y"], &[])?;
    let i_x1x2y_u = sigma.gaussian_mi(&["X1", "X2"], &["Y"], &["U"])?;
    let values = [
        caps.c11 + caps.c22 - i_x1x2_u,
        caps.c11 + caps.c12 + i_x2y_ux1,
        caps.c22 + caps.c21 + i_x1y_ux2,
        i_mac,
        0.5 * (caps.sum4() + i_x1x2y_u - i_x1x2_u),
    ];
    let terms = LB_LABELS
        .iter()
        .zip(values)
        .map(|(l, v)| Term::new(*l, v))
        .collect();
    Ok(BoundResult::from_terms(
        terms,
        named_params(params.rho, params.rho1, params.rho2),
        None,
    ))
}

const UB1_LABELS: [&str; 6] = [
    "C11+C22",
    "C11+C12 + I(X2;Y|U,X1)",
    "C22+C21 + I(X1;Y|U,X2)",
    "I(X1,X2;Y)",
    "C12+C21 + I(X1,X2;Y|U)",
    "(C11+C22+C12+C21 + I(X1;V|U,X2) + I(X1,X2;Y|U,V) + I(X2;V|U,X1))/2",
];

/// The six right-hand sides of the first upper bound at a fixed
/// `(rho, rho1, rho2, N)`, in the listed order. The sixth term uses
/// `phi`, `phi_k` and `N` exactly as the proposition prints them.
pub fn upper_bound1_terms(
    params: &TwoRelayParams,
    caps: &LinkCaps2,
    variant: PhiVariant,
) -> Result<[f64; 6]> {
    params.validate()?;
    caps.validate()?;
    let cf = ClosedForms::at(params.rho, params.rho1, params.rho2, params.p1, params.p2);
    let n = params.n_aux;
    let t6 = if cf.a <= EPS || cf.b <= EPS {
        f64::INFINITY
    } else {
        let phi1 = phi_k(params, 1, params.p2, variant)?;
        let phi2 = phi_k(params, 2, params.p1, variant)?;
        let arg = n * cf.varphi * phi1 * phi2
            / ((1.0 + n) * (1.0 + n) * cf.a * cf.b * (n + cf.varphi));
        0.5 * (caps.sum4() + 0.5 * arg.log2())
    };
    Ok([
        caps.c11 + caps.c22,
        caps.c11 + caps.c12 + cf.i_x2y_ux1,
        caps.c22 + caps.c21 + cf.i_x1y_ux2,
        cf.i_mac,
        caps.c12 + caps.c21 + cf.i_x1x2y_u,
        t6,
    ])
}

/// Closed form of `I(X1;X2|U,V)` as a function of the `V = Y + W` noise
/// variance; used by `nstar` and pinned against `gaussian_mi` in tests.
fn i_x1x2_uv(rho: f64, rho1: f64, rho2: f64, p1: f64, p2: f64, n: f64) -> f64 {
    let a = 1.0 - rho1 * rho1;
    let b = 1.0 - rho2 * rho2;
    let d = margin_raw(rho, rho1, rho2).max(0.0);
    if a <= EPS || b <= EPS {
        return 0.0;
    }
    if d <= EPS {
        return f64::INFINITY;
    }
    let t = 1.0 + n;
    let phi1 = a * t + d * p2;
    let phi2 = b * t + d * p1;
    let vphi = varphi_raw(rho, rho1, rho2, p1, p2);
    (0.5 * (phi1 * phi2 / (d * t * (vphi + n))).log2()).max(0.0)
}

/// The auxiliary noise variance minimizing `I(X1;X2|U, V = Y + W_N)`.
///
/// A positive finite nullifier exists exactly when
/// `N = margin * sqrt(P1 P2) / (rho - rho1 rho2) - 1 > 0`; in that case a
/// golden-section search on `[0, 1e6]` (absolute tolerance 1e-9) refines
/// it. Otherwise the nullifying `N` is negative or does not exist and the
/// proper choice is 0.
pub fn nstar(params: &TwoRelayParams) -> Result<f64> {
    params.validate()?;
    let (rho, rho1, rho2, p1, p2) = (params.rho, params.rho1, params.rho2, params.p1, params.p2);
    let s = rho - rho1 * rho2;
    let d = margin_raw(rho, rho1, rho2);
    if s <= EPS || d <= EPS {
        return Ok(0.0);
    }
    let n_null = d * (p1 * p2).sqrt() / s - 1.0;
    if n_null <= 0.0 {
        return Ok(0.0);
    }
    let (n_min, _) = golden_min(
        |n| i_x1x2_uv(rho, rho1, rho2, p1, p2, n),
        0.0,
        1e6,
        1e-9,
    );
    Ok(n_min)
}

/// Per-point upper-bound value with the `N*` specialization: when the
/// nullifier is positive the sixth term collapses to
/// `(C11+C22+C12+C21 + 0.5 log2(varphi * margin / ((1-rho1^2)(1-rho2^2))))/2`
/// and otherwise (`V = Y` useless) the bound is the min of the first five
/// terms only.
fn ub1_terms_at(
    rho: f64,
    rho1: f64,
    rho2: f64,
    p1: f64,
    p2: f64,
    caps: &LinkCaps2,
) -> (Vec<Term>, Option<f64>) {
    let cf = ClosedForms::at(rho, rho1, rho2, p1, p2);
    let mut terms = vec![
        Term::new(UB1_LABELS[0], caps.c11 + caps.c22),
        Term::new(UB1_LABELS[1], caps.c11 + caps.c12 + cf.i_x2y_ux1),
        Term::new(UB1_LABELS[2], caps.c22 + caps.c21 + cf.i_x1y_ux2),
        Term::new(UB1_LABELS[3], cf.i_mac),
        Term::new(UB1_LABELS[4], caps.c12 + caps.c21 + cf.i_x1x2y_u),
    ];
    let params = TwoRelayParams::new(rho, rho1, rho2, p1, p2, 0.0);
    let ns = nstar(&params).unwrap_or(0.0);
    if ns > NSTAR_POS_TOL && cf.a > EPS && cf.b > EPS && cf.margin > EPS {
        let t6 = 0.5
            * (caps.sum4() + 0.5 * (cf.varphi * cf.margin / (cf.a * cf.b)).log2());
        terms.push(Term::new(
            "(C11+C22+C12+C21 + I(X1,X2;Y|U) - I(X1;X2|U))/2 at N*",
            t6,
        ));
        (terms, Some(ns))
    } else {
        (terms, Some(0.0))
    }
}

/// First upper bound, optimized: max over the PSD correlation region of
/// the `N*`-specialized min.
pub fn upper_bound1(
    caps: &LinkCaps2,
    p1: f64,
    p2: f64,
    grid: &GridSpec,
) -> Result<BoundResult> {
    caps.validate()?;
    let caps = *caps;
    optimize_correlations(grid, move |rho, rho1, rho2| {
        let (terms, ns) = ub1_terms_at(rho, rho1, rho2, p1, p2, &caps);
        let value = terms
            .iter()
            .map(|t| t.value_bits)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        (value, terms, ns)
    })
}

/// Closed form of the last (implicit-in-`R`) constraint of the second
/// upper bound: with `xi = 2^{2R}` the constraint is the quadratic
/// `xi^2 + 2^{2(C12+C21)} N xi <= 2^{2(C11+C22+C12+C21)} phi1 phi2 /
/// ((1+N)(1-rho1^2)(1-rho2^2))`, whose positive root gives
/// `R = 0.5 log2(xi)`.
pub fn upper_bound2_last_term_closed_form(
    params: &TwoRelayParams,
    caps: &LinkCaps2,
    variant: PhiVariant,
) -> Result<f64> {
    params.validate()?;
    caps.validate()?;
    let a = 1.0 - params.rho1 * params.rho1;
    let b = 1.0 - params.rho2 * params.rho2;
    if a <= EPS || b <= EPS {
        return Ok(f64::INFINITY);
    }
    let phi1 = phi_k(params, 1, params.p2, variant)?;
    let phi2 = phi_k(params, 2, params.p1, variant)?;
    let n = params.n_aux;
    let big_a = (2.0 * caps.sum4()).exp2() * phi1 * phi2 / (a * b * (1.0 + n));
    let big_b = (2.0 * (caps.c12 + caps.c21)).exp2() * n;
    // Stable positive quadratic root: A / (sqrt(A + B^2/4) + B/2).
    let xi = big_a / ((big_a + 0.25 * big_b * big_b).sqrt() + 0.5 * big_b);
    Ok(0.5 * xi.log2())
}

const UB2_LAST_LABEL: &str =
    "C11+C22 - log2(2^{2(R-C12-C21)}+N)/2 - log2(1+N)/2 + log2(phi1 phi2/((1-rho1^2)(1-rho2^2)))/2 at N-min";

/// Second upper bound, optimized: the first five terms are shared with
/// the first bound; the last constraint is minimized over `N >= 0` by
/// golden section on `[0, 1e3]` with multistart at `{0, N*}`.
pub fn upper_bound2(
    caps: &LinkCaps2,
    p1: f64,
    p2: f64,
    grid: &GridSpec,
    variant: PhiVariant,
) -> Result<BoundResult> {
    caps.validate()?;
    let caps = *caps;
    optimize_correlations(grid, move |rho, rho1, rho2| {
        let cf = ClosedForms::at(rho, rho1, rho2, p1, p2);
        let mut terms = vec![
            Term::new(UB1_LABELS[0], caps.c11 + caps.c22),
            Term::new(UB1_LABELS[1], caps.c11 + caps.c12 + cf.i_x2y_ux1),
            Term::new(UB1_LABELS[2], caps.c22 + caps.c21 + cf.i_x1y_ux2),
            Term::new(UB1_LABELS[3], cf.i_mac),
            Term::new(UB1_LABELS[4], caps.c12 + caps.c21 + cf.i_x1x2y_u),
        ];
        let last = |n: f64| {
            let p = TwoRelayParams::new(rho, rho1, rho2, p1, p2, n);
            upper_bound2_last_term_closed_form(&p, &caps, variant).unwrap_or(f64::INFINITY)
        };
        let (mut n_best, mut v_best) = golden_min(last, 0.0, 1e3, 1e-9);
        let params0 = TwoRelayParams::new(rho, rho1, rho2, p1, p2, 0.0);
        let ns = nstar(&params0).unwrap_or(0.0);
        for n in [0.0, ns] {
            let v = last(n);
            if v < v_best {
                v_best = v;
                n_best = n;
            }
        }
        terms.push(Term::new(UB2_LAST_LABEL, v_best));
        let value = terms
            .iter()
            .map(|t| t.value_bits)
            .fold(f64::INFINITY, f64::min)
            .max(0.0);
        (value, terms, Some(n_best))
    })
}

/// Achievable rate optimized over the jointly Gaussian input family: max
/// of [`lower_bound2`] over the PSD correlation region (closed-form fast
/// path in the inner loop).
pub fn maximize_lower_bound2(
    caps: &LinkCaps2,
    p1: f64,
    p2: f64,
    grid: &GridSpec,
) -> Result<BoundResult> {
    caps.validate()?;
    let caps = *caps;
    optimize_correlations(grid, move |rho, rho1, rho2| {
        let cf = ClosedForms::at(rho, rho1, rho2, p1, p2);
        let values = lower_terms_closed(&cf, &caps);
        let terms: Vec<Term> = LB_LABELS
            .iter()
            .zip(values)
            .map(|(l, v)| Term::new(*l, v))
            .collect();
        let value = values.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
        (value, terms, None)
    })
}

/// Classical cut-set reference with each cut optimized separately:
/// `min{C11+C22, C11+C12+log2(1+P2)/2, C22+C21+log2(1+P1)/2,
/// log2(1+P1+P2+2 sqrt(P1 P2))/2}`.
pub fn cut_set2(caps: &LinkCaps2, p1: f64, p2: f64) -> f64 {
    let cuts = [
        caps.c11 + caps.c22,
        caps.c11 + caps.c12 + 0.5 * (1.0 + p2).log2(),
        caps.c22 + caps.c21 + 0.5 * (1.0 + p1).log2(),
        0.5 * (1.0 + p1 + p2 + 2.0 * (p1 * p2).sqrt()).log2(),
    ];
    cuts.iter().copied().fold(f64::INFINITY, f64::min).max(0.0)
}

fn named_params(rho: f64, rho1: f64, rho2: f64) -> Vec<(String, f64)> {
    vec![
        ("rho".into(), rho),
        ("rho1".into(), rho1),
        ("rho2".into(), rho2),
    ]
}

/// Grid-then-refine max over the PSD region of `[0,1]^3`: uniform grid,
/// simplex refinement from the top five feasible grid points, 1e-6
/// convergence. Deterministic reduction in grid index order.
fn optimize_correlations<F>(grid: &GridSpec, eval: F) -> Result<BoundResult>
where
    F: Fn(f64, f64, f64) -> (f64, Vec<Term>, Option<f64>) + Sync + Send,
{
    grid.validate()?;
    let res = grid.resolution;
    let coord = |i: usize| i as f64 / (res - 1) as f64;
    let total = res * res * res;
    let values = exec::map_index_range(total, ExecMode::auto(), |idx| {
        let rho = coord(idx / (res * res));
        let rho1 = coord((idx / res) % res);
        let rho2 = coord(idx % res);
        if margin_raw(rho, rho1, rho2) < -1e-12 {
            f64::NEG_INFINITY
        } else {
            eval(rho, rho1, rho2).0
        }
    });
    let mut order: Vec<usize> = (0..total).filter(|&i| values[i].is_finite()).collect();
    if order.is_empty() {
        return Err(Error::InvalidGrid("no feasible grid point".into()));
    }
    order.sort_by(|&i, &j| values[j].partial_cmp(&values[i]).unwrap().then(i.cmp(&j)));

    let mut best_point = {
        let i = order[0];
        vec![coord(i / (res * res)), coord((i / res) % res), coord(i % res)]
    };
    let mut best_value = values[order[0]];
    if grid.refine {
        let objective = |x: &[f64]| {
            if margin_raw(x[0], x[1], x[2]) < -1e-12 {
                INFEASIBLE
            } else {
                eval(x[0], x[1], x[2]).0
            }
        };
        let step = 1.0 / (res - 1) as f64;
        for &i in order.iter().take(5) {
            let start = [coord(i / (res * res)), coord((i / res) % res), coord(i % res)];
            let (x, v) = nelder_mead_max(objective, &start, step, 1e-6, 400);
            if v > best_value {
                best_value = v;
                best_point = x;
            }
        }
    }
    let (_, terms, argmin_n) = eval(best_point[0], best_point[1], best_point[2]);
    Ok(BoundResult::from_terms(
        terms,
        named_params(best_point[0], best_point[1], best_point[2]),
        argmin_n,
    ))
}

/// Capacity sweep over symmetric caps (`C11 = C22 = c`, `C12 = C21 = c0`):
/// per row the optimized lower bound, the tighter of the two optimized
/// upper bounds, and the cut-set reference. Rows sorted by `(c0, c)`.
pub fn sweep2(
    c_values: &[f64],
    c0_values: &[f64],
    p: f64,
    grid: &GridSpec,
) -> Result<Vec<SweepRow>> {
    if c_values.is_empty() || c0_values.is_empty() {
        return Err(Error::InvalidGrid("empty sweep value list".into()));
    }
    let mut c_sorted = c_values.to_vec();
    let mut c0_sorted = c0_values.to_vec();
    c_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    c0_sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut rows = Vec::with_capacity(c_sorted.len() * c0_sorted.len());
    for &c0 in &c0_sorted {
        for &c in &c_sorted {
            let caps = LinkCaps2::symmetric(c, c0);
            let lower = maximize_lower_bound2(&caps, p, p, grid)?;
            let ub1 = upper_bound1(&caps, p, p, grid)?;
            let ub2 = upper_bound2(&caps, p, p, grid, PhiVariant::Squared)?;
            let (upper, which) = if ub1.value_bits <= ub2.value_bits {
                (&ub1, "ub1")
            } else {
                (&ub2, "ub2")
            };
            rows.push(SweepRow {
                c0,
                c,
                lower: lower.value_bits,
                upper: upper.value_bits,
                cutset: cut_set2(&caps, p, p),
                binding_lower: lower.binding_label.clone(),
                binding_upper: format!("{which}: {}", upper.binding_label),
            });
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::HALF_LOG2_2PIE;
    use approx::assert_abs_diff_eq;
    use rand::prelude::*;
    use rand_chacha::ChaCha12Rng;

    fn params(rho: f64, rho1: f64, rho2: f64, n: f64) -> TwoRelayParams {
        TwoRelayParams::new(rho, rho1, rho2, 1.0, 1.0, n)
    }

    #[test]
    fn phi_k_substitutions() {
        let p = params(0.0, 0.0, 0.0, 0.0);
        assert_abs_diff_eq!(phi_k(&p, 1, 1.0, PhiVariant::Squared).unwrap(), 2.0);
        let p = params(0.0, 0.0, 0.0, 1.0);
        assert_abs_diff_eq!(phi_k(&p, 1, 1.0, PhiVariant::Squared).unwrap(), 3.0);
        let p = params(0.5, 0.5, 0.5, 0.0);
        assert_abs_diff_eq!(
            phi_k(&p, 1, 1.0, PhiVariant::Squared).unwrap(),
            1.25,
            epsilon = 1e-12
        );
        // The linear printing differs once rho_k > 0.
        assert_abs_diff_eq!(
            phi_k(&p, 1, 1.0, PhiVariant::Linear).unwrap(),
            0.25 + 0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn varphi_substitutions() {
        assert_abs_diff_eq!(varphi(&params(0.0, 0.0, 0.0, 0.0)).unwrap(), 3.0);
        assert_abs_diff_eq!(varphi(&params(1.0, 0.0, 0.0, 0.0)).unwrap(), 5.0);
        assert_abs_diff_eq!(
            varphi(&params(0.5, 0.5, 0.5, 0.0)).unwrap(),
            3.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn phi_psd_violation_rejected() {
        let p = params(0.0, 0.9, 0.9, 0.0);
        assert!(phi_k(&p, 1, 1.0, PhiVariant::Squared).is_err());
        assert!(varphi(&p).is_err());
    }

    #[test]
    fn lower_bound_no_fronthaul_is_zero() {
        let r = lower_bound2(&params(0.0, 0.0, 0.0, 0.0), &LinkCaps2::new(0.0, 0.0, 0.0, 0.0))
            .unwrap();
        assert_eq!(r.value_bits, 0.0);
        assert_eq!(r.binding_index, 0);
    }

    #[test]
    fn lower_bound_binds_at_mac_with_large_caps() {
        let r = lower_bound2(
            &params(0.0, 0.0, 0.0, 0.0),
            &LinkCaps2::new(50.0, 50.0, 50.0, 50.0),
        )
        .unwrap();
        assert_eq!(r.binding_index, 3);
        assert_abs_diff_eq!(r.value_bits, 0.5 * 3.0f64.log2(), epsilon = 1e-9);
    }

    #[test]
    fn lower_bound_min_matches_term_oracle() {
        let caps = LinkCaps2::new(0.3, 0.3, 0.0, 0.0);
        let r = lower_bound2(&params(0.0, 0.0, 0.0, 0.0), &caps).unwrap();
        let min = r
            .terms
            .iter()
            .map(|t| t.value_bits)
            .fold(f64::INFINITY, f64::min);
        assert_abs_diff_eq!(r.value_bits, min.max(0.0), epsilon = 1e-12);
        assert_abs_diff_eq!(r.terms[0].value_bits, 0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(
            r.terms[1].value_bits,
            0.3 + 0.5 * 2.0f64.log2(),
            epsilon = 1e-9
        );
    }

    #[test]
    fn closed_forms_match_logdet_engine() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let mut checked = 0usize;
        while checked < 60 {
            let rho = rng.random::<f64>();
            let rho1 = rng.random::<f64>();
            let rho2 = rng.random::<f64>();
            if margin_raw(rho, rho1, rho2) < 1e-3 {
                continue;
            }
            let p1 = 0.5 + 1.5 * rng.random::<f64>();
            let p2 = 0.5 + 1.5 * rng.random::<f64>();
            let n = 2.0 * rng.random::<f64>();
            let pr = TwoRelayParams::new(rho, rho1, rho2, p1, p2, n);
            let sigma = assemble_sigma2(&pr).unwrap();
            let cf = ClosedForms::at(rho, rho1, rho2, p1, p2);
            assert_abs_diff_eq!(
                cf.i_x1x2_u,
                sigma.gaussian_mi(&["X1"], &["X2"], &["U"]).unwrap(),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                cf.i_x2y_ux1,
                sigma.gaussian_mi(&["X2"], &["Y"], &["U", "X1"]).unwrap(),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                cf.i_x1y_ux2,
                sigma.gaussian_mi(&["X1"], &["Y"], &["U", "X2"]).unwrap(),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                cf.i_mac,
                sigma.gaussian_mi(&["X1", "X2"], &["Y"], &[]).unwrap(),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                cf.i_x1x2y_u,
                sigma.gaussian_mi(&["X1", "X2"], &["Y"], &["U"]).unwrap(),
                epsilon = 1e-9
            );
            assert_abs_diff_eq!(
                i_x1x2_uv(rho, rho1, rho2, p1, p2, n),
                sigma.gaussian_mi(&["X1"], &["X2"], &["U", "V"]).unwrap(),
                epsilon = 1e-9
            );
            checked += 1;
        }
    }

    #[test]
    fn printed_sixth_term_matches_its_composition() {
        // The printed sixth term equals
        // (caps + I(X1;V|U,X2) + I(X2;V|U,X1) + h(Y|U,V) - h(Z))/2
        // with the squared phi variant; pinned against the engine.
        let mut rng = ChaCha12Rng::seed_from_u64(7);
        let caps = LinkCaps2::new(0.7, 0.4, 0.2, 0.9);
        let mut checked = 0usize;
        while checked < 40 {
            let rho = rng.random::<f64>();
            let rho1 = rng.random::<f64>();
            let rho2 = rng.random::<f64>();
            if margin_raw(rho, rho1, rho2) < 1e-3 {
                continue;
            }
            let n = 0.2 + 3.0 * rng.random::<f64>();
            let pr = TwoRelayParams::new(rho, rho1, rho2, 1.0, 1.0, n);
            let t6 = upper_bound1_terms(&pr, &caps, PhiVariant::Squared).unwrap()[5];
            let sigma = assemble_sigma2(&pr).unwrap();
            let mi1 = sigma.gaussian_mi(&["X1"], &["V"], &["U", "X2"]).unwrap();
            let mi2 = sigma.gaussian_mi(&["X2"], &["V"], &["U", "X1"]).unwrap();
            let h_yuv = sigma.gaussian_entropy(&["Y", "U", "V"]).unwrap()
                - sigma.gaussian_entropy(&["U", "V"]).unwrap();
            let oracle = 0.5 * (caps.sum4() + mi1 + mi2 + (h_yuv - HALF_LOG2_2PIE));
            assert_abs_diff_eq!(t6, oracle, epsilon = 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn ub1_term_values() {
        // Term 4 at full coherence.
        let pr = params(1.0, 0.0, 0.0, 0.5);
        let t = upper_bound1_terms(&pr, &LinkCaps2::new(1.0, 1.0, 1.0, 1.0), PhiVariant::Squared)
            .unwrap();
        assert_abs_diff_eq!(t[3], 0.5 * 5.0f64.log2(), epsilon = 1e-12);
        assert_abs_diff_eq!(t[3], 1.160964, epsilon = 1e-6);
        // Term 1 is the constant fronthaul sum.
        assert_abs_diff_eq!(t[0], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn nstar_nullified_and_boundary_cases() {
        // rho = rho1 rho2: no finite positive nullifier.
        let p = params(0.25, 0.5, 0.5, 0.0);
        assert_eq!(nstar(&p).unwrap(), 0.0);
        // Negative nullifier: argmin over [0, 100] is the origin.
        let p = params(0.8, 0.3, 0.3, 0.0);
        let n = nstar(&p).unwrap();
        let dense = (0..100_000)
            .map(|i| i as f64 * 1e-3)
            .min_by(|&x, &y| {
                i_x1x2_uv(0.8, 0.3, 0.3, 1.0, 1.0, x)
                    .partial_cmp(&i_x1x2_uv(0.8, 0.3, 0.3, 1.0, 1.0, y))
                    .unwrap()
            })
            .unwrap();
        assert_abs_diff_eq!(n, dense, epsilon = 1e-4);
        // PSD violation is a domain error.
        assert!(nstar(&params(0.0, 0.9, 0.9, 0.0)).is_err());
    }

    #[test]
    fn nstar_positive_interior_matches_dense_scan() {
        // Large margin, small s: nullifier D*sqrt(P1P2)/s - 1 lands inside.
        let (rho, rho1, rho2, p1, p2) = (0.3, 0.2, 0.25, 4.0, 4.0);
        let pr = TwoRelayParams::new(rho, rho1, rho2, p1, p2, 0.0);
        let n = nstar(&pr).unwrap();
        assert!(n > 0.0);
        let d = margin_raw(rho, rho1, rho2);
        let analytic = d * (p1 * p2).sqrt() / (rho - rho1 * rho2) - 1.0;
        assert_abs_diff_eq!(n, analytic, epsilon = 1e-6);
        // Dense 1e5-point scan over [0, 100] locates the same minimizer
        // to its grid resolution.
        let dense = (0..100_000)
            .map(|i| i as f64 * 1e-3)
            .min_by(|&x, &y| {
                i_x1x2_uv(rho, rho1, rho2, p1, p2, x)
                    .partial_cmp(&i_x1x2_uv(rho, rho1, rho2, p1, p2, y))
                    .unwrap()
            })
            .unwrap();
        assert_abs_diff_eq!(n, dense, epsilon = 1e-3);
        // And the value there is (numerically) zero.
        assert!(i_x1x2_uv(rho, rho1, rho2, p1, p2, n) < 1e-9);
    }

    #[test]
    fn upper_bound1_zero_fronthaul() {
        let g = GridSpec::new(11);
        let r = upper_bound1(&LinkCaps2::new(0.0, 0.0, 2.0, 3.0), 1.0, 1.0, &g).unwrap();
        assert_eq!(r.value_bits, 0.0);
    }

    #[test]
    fn upper_bound1_saturates_at_coherent_mac() {
        let g = GridSpec::new(21);
        let r = upper_bound1(&LinkCaps2::new(10.0, 10.0, 10.0, 10.0), 1.0, 1.0, &g).unwrap();
        assert_abs_diff_eq!(r.value_bits, 0.5 * 5.0f64.log2(), epsilon = 1e-3);
    }

    #[test]
    fn upper_bounds_dominate_lower_bound() {
        let g = GridSpec::new(17);
        for caps in [
            LinkCaps2::new(0.5, 0.5, 0.0, 0.0),
            LinkCaps2::new(1.0, 1.0, 0.25, 0.25),
            LinkCaps2::new(2.0, 0.7, 0.1, 0.4),
        ] {
            let lb = maximize_lower_bound2(&caps, 1.0, 1.0, &g).unwrap();
            let u1 = upper_bound1(&caps, 1.0, 1.0, &g).unwrap();
            let u2 = upper_bound2(&caps, 1.0, 1.0, &g, PhiVariant::Squared).unwrap();
            assert!(u1.value_bits >= lb.value_bits - 1e-6);
            assert!(u2.value_bits >= lb.value_bits - 1e-6);
            let cut = cut_set2(&caps, 1.0, 1.0);
            assert!(u1.value_bits <= cut + 1e-9);
            assert!(u2.value_bits <= cut + 1e-9);
        }
    }

    #[test]
    fn ub2_closed_form_matches_bisection() {
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let mut checked = 0usize;
        while checked < 200 {
            let rho = rng.random::<f64>();
            let rho1 = rng.random::<f64>();
            let rho2 = rng.random::<f64>();
            if margin_raw(rho, rho1, rho2) < 1e-3
                || 1.0 - rho1 * rho1 < 1e-3
                || 1.0 - rho2 * rho2 < 1e-3
            {
                continue;
            }
            let p1 = 0.5 + 1.5 * rng.random::<f64>();
            let p2 = 0.5 + 1.5 * rng.random::<f64>();
            let n = 5.0 * rng.random::<f64>();
            let caps = LinkCaps2::new(
                3.0 * rng.random::<f64>(),
                3.0 * rng.random::<f64>(),
                3.0 * rng.random::<f64>(),
                3.0 * rng.random::<f64>(),
            );
            let pr = TwoRelayParams::new(rho, rho1, rho2, p1, p2, n);
            let closed =
                upper_bound2_last_term_closed_form(&pr, &caps, PhiVariant::Squared).unwrap();
            let a = 1.0 - rho1 * rho1;
            let b = 1.0 - rho2 * rho2;
            let phi1 = phi_k(&pr, 1, p2, PhiVariant::Squared).unwrap();
            let phi2 = phi_k(&pr, 2, p1, PhiVariant::Squared).unwrap();
            let rhs = |r: f64| {
                caps.c11 + caps.c22
                    - 0.5 * ((2.0 * (r - caps.c12 - caps.c21)).exp2() + n).log2()
                    - 0.5 * (1.0 + n).log2()
                    + 0.5 * (phi1 * phi2 / (a * b)).log2()
            };
            // rhs(R) - R is strictly decreasing; bisection to 1e-12.
            let (mut lo, mut hi) = (-60.0, 60.0);
            assert!(rhs(lo) - lo > 0.0 && rhs(hi) - hi < 0.0);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if rhs(mid) - mid > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            assert_abs_diff_eq!(closed, 0.5 * (lo + hi), epsilon = 1e-9);
            checked += 1;
        }
    }

    #[test]
    fn ub2_last_term_n_zero_reduction() {
        // At N = 0 and C12 = C21 = 0 the closed form reduces to
        // (C11+C22)/2 + log2(phi1 phi2 / ((1-rho1^2)(1-rho2^2)))/4.
        let pr = TwoRelayParams::new(0.4, 0.3, 0.5, 1.0, 1.0, 0.0);
        let caps = LinkCaps2::new(0.8, 0.6, 0.0, 0.0);
        let closed =
            upper_bound2_last_term_closed_form(&pr, &caps, PhiVariant::Squared).unwrap();
        let a = 1.0 - 0.3f64 * 0.3;
        let b = 1.0 - 0.5f64 * 0.5;
        let phi1 = phi_k(&pr, 1, 1.0, PhiVariant::Squared).unwrap();
        let phi2 = phi_k(&pr, 2, 1.0, PhiVariant::Squared).unwrap();
        let direct = 0.5 * (caps.c11 + caps.c22) + 0.25 * (phi1 * phi2 / (a * b)).log2();
        assert_abs_diff_eq!(closed, direct, epsilon = 1e-12);

        // All-zero caps at independent inputs: log2(4)/4 = 0.5 bits.
        let pr = TwoRelayParams::new(0.0, 0.0, 0.0, 1.0, 1.0, 0.0);
        let caps = LinkCaps2::new(0.0, 0.0, 0.0, 0.0);
        let closed =
            upper_bound2_last_term_closed_form(&pr, &caps, PhiVariant::Squared).unwrap();
        assert_abs_diff_eq!(closed, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn upper_bound2_zero_caps_and_binding_consistency() {
        let g = GridSpec::new(11);
        let r = upper_bound2(
            &LinkCaps2::new(0.0, 0.0, 0.0, 0.0),
            1.0,
            1.0,
            &g,
            PhiVariant::Squared,
        )
        .unwrap();
        assert_eq!(r.value_bits, 0.0);

        let r = upper_bound2(
            &LinkCaps2::new(1.0, 1.0, 0.25, 0.25),
            1.0,
            1.0,
            &g,
            PhiVariant::Squared,
        )
        .unwrap();
        assert_abs_diff_eq!(
            r.terms[r.binding_index].value_bits,
            r.value_bits,
            epsilon = 1e-9
        );
    }

    #[test]
    fn cut_set_values() {
        assert_abs_diff_eq!(
            cut_set2(&LinkCaps2::new(100.0, 100.0, 100.0, 100.0), 1.0, 1.0),
            0.5 * 5.0f64.log2(),
            epsilon = 1e-12
        );
        assert_eq!(cut_set2(&LinkCaps2::new(0.0, 0.0, 0.0, 0.0), 1.0, 1.0), 0.0);
        assert_abs_diff_eq!(
            cut_set2(&LinkCaps2::new(0.5, 0.5, 0.0, 0.0), 1.0, 1.0),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sweep_rows_ordered_and_sandwiched() {
        let g = GridSpec::new(9);
        let rows = sweep2(&[0.0, 1.0, 2.0, 3.0], &[0.0], 1.0, &g).unwrap();
        assert_eq!(rows.len(), 4);
        for w in rows.windows(2) {
            assert!(w[0].c < w[1].c);
            assert!(w[1].lower >= w[0].lower - 1e-6);
        }
        for r in &rows {
            assert!(r.lower <= r.upper + 1e-6);
            assert!(r.upper <= r.cutset + 1e-9);
        }
    }
}
