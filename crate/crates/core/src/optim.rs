//! Small deterministic optimizers: golden-section line search and a
//! box-clamped Nelder-Mead simplex used to refine grid maxima.

/// Value used for infeasible points inside simplex refinement.
pub const INFEASIBLE: f64 = -1e12;

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section minimization of `f` on `[lo, hi]` to absolute tolerance
/// `tol` on the argument. Returns `(argmin, min)`; the endpoints are also
/// candidates, so a monotone `f` resolves to the correct boundary.
pub fn golden_min<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> (f64, f64) {
    let mut a = lo;
    let mut b = hi;
    let mut c = b - (b - a) * INV_PHI;
    let mut d = a + (b - a) * INV_PHI;
    let mut fc = f(c);
    let mut fd = f(d);
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INV_PHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INV_PHI;
            fd = f(d);
        }
    }
    let mut best = (c, fc);
    for (x, v) in [(d, fd), (lo, f(lo)), (hi, f(hi))] {
        if v < best.1 {
            best = (x, v);
        }
    }
    best
}

/// Nelder-Mead maximization over the unit box `[0,1]^dim`, starting from
/// `start` with the given initial step. Coordinates are clamped into the
/// box before evaluation; the objective signals infeasibility by
/// returning [`INFEASIBLE`]. Deterministic for fixed inputs.
pub fn nelder_mead_max<F: Fn(&[f64]) -> f64>(
    f: F,
    start: &[f64],
    step: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let dim = start.len();
    let clamp = |x: &mut Vec<f64>| {
        for v in x.iter_mut() {
            *v = v.clamp(0.0, 1.0);
        }
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    let mut x0 = start.to_vec();
    clamp(&mut x0);
    let f0 = f(&x0);
    simplex.push((x0.clone(), f0));
    for i in 0..dim {
        let mut x = x0.clone();
        // Step inward when at the upper box face so vertices stay distinct.
        x[i] = if x[i] + step <= 1.0 {
            x[i] + step
        } else {
            (x[i] - step).max(0.0)
        };
        let v = f(&x);
        simplex.push((x, v));
    }

    for _ in 0..max_iter {
        // Descending by value (maximization), worst last.
        simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
        let spread = simplex[0]
            .0
            .iter()
            .zip(&simplex[dim].0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        if spread < tol && (simplex[0].1 - simplex[dim].1).abs() < 1e-12 {
            break;
        }
        let centroid: Vec<f64> = (0..dim)
            .map(|i| simplex[..dim].iter().map(|(x, _)| x[i]).sum::<f64>() / dim as f64)
            .collect();
        let worst = simplex[dim].clone();
        let make = |alpha: f64| -> Vec<f64> {
            let mut x: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + alpha * (c - w))
                .collect();
            clamp(&mut x);
            x
        };
        let xr = make(1.0);
        let fr = f(&xr);
        if fr > simplex[0].1 {
            let xe = make(2.0);
            let fe = f(&xe);
            simplex[dim] = if fe > fr { (xe, fe) } else { (xr, fr) };
        } else if fr > simplex[dim - 1].1 {
            simplex[dim] = (xr, fr);
        } else {
            let xc = make(-0.5);
            let fc = f(&xc);
            if fc > simplex[dim].1 {
                simplex[dim] = (xc, fc);
            } else {
                let best = simplex[0].0.clone();
                for entry in simplex.iter_mut().skip(1) {
                    let x: Vec<f64> = entry
                        .0
                        .iter()
                        .zip(&best)
                        .map(|(v, b)| b + 0.5 * (v - b))
                        .collect();
                    let fv = f(&x);
                    *entry = (x, fv);
                }
            }
        }
    }
    simplex.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
    simplex.remove(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, v) = golden_min(|x| (x - 2.5) * (x - 2.5) + 1.0, 0.0, 10.0, 1e-9);
        assert_abs_diff_eq!(x, 2.5, epsilon = 1e-7);
        assert_abs_diff_eq!(v, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn golden_monotone_resolves_to_boundary() {
        let (x, _) = golden_min(|x| x, 0.0, 5.0, 1e-9);
        assert!(x.abs() < 1e-7);
        let (x, _) = golden_min(|x| -x, 0.0, 5.0, 1e-9);
        assert!((x - 5.0).abs() < 1e-7);
    }

    #[test]
    fn nelder_mead_recovers_interior_max() {
        let f = |x: &[f64]| {
            -((x[0] - 0.3) * (x[0] - 0.3) + (x[1] - 0.7) * (x[1] - 0.7))
        };
        let (x, _) = nelder_mead_max(f, &[0.5, 0.5], 0.1, 1e-8, 500);
        assert_abs_diff_eq!(x[0], 0.3, epsilon = 1e-5);
        assert_abs_diff_eq!(x[1], 0.7, epsilon = 1e-5);
    }

    #[test]
    fn nelder_mead_respects_box() {
        let f = |x: &[f64]| x[0] + x[1];
        let (x, v) = nelder_mead_max(f, &[0.9, 0.9], 0.2, 1e-8, 500);
        assert!(x.iter().all(|&c| (0.0..=1.0).contains(&c)));
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-6);
    }
}
