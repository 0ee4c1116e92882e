//! Derivative-free 1-D and coordinate-wise maximizers used by the grid
//! oracle polish step, the pairing-supremum search, and the counterexample
//! reductions.

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal `f` on `[a, b]` down to a
/// bracket of width `tol`. Returns `(x_max, f_max)`.
pub fn golden_section_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while (b - a).abs() > tol {
        if f1 > f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Dense grid scan over `[a, b)` followed by golden-section refinement of the
/// bracket around the best grid point.
pub fn grid_then_golden_max(
    f: impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    grid_points: usize,
    tol: f64,
) -> (f64, f64) {
    let h = (b - a) / grid_points as f64;
    let mut best = (a, f(a));
    for k in 1..grid_points {
        let x = a + k as f64 * h;
        let fx = f(x);
        if fx > best.1 {
            best = (x, fx);
        }
    }
    let (x, fx) = golden_section_max(&f, best.0 - h, best.0 + h, tol);
    if fx > best.1 {
        (x, fx)
    } else {
        best
    }
}

/// Three-point parabolic refinement of a smooth interior maximum. Golden
/// section alone localizes a peak only to about sqrt(eps) because the
/// objective is flat there; a parabola fit with a wide stencil sees through
/// the float plateau. `h` shrinks by 100x per round.
pub fn refine_parabolic(f: impl Fn(f64) -> f64, mut x: f64, mut h: f64, rounds: usize) -> (f64, f64) {
    for _ in 0..rounds {
        let (fm, f0, fp) = (f(x - h), f(x), f(x + h));
        let denom = fm - 2.0 * f0 + fp;
        if denom < 0.0 {
            let delta = 0.5 * h * (fm - fp) / denom;
            if delta.abs() <= h {
                x += delta;
            }
        }
        h /= 100.0;
    }
    (x, f(x))
}

#[derive(Debug, Clone, Copy)]
pub struct AscentResult {
    pub value: f64,
    pub evals: usize,
    pub converged: bool,
}

/// Coordinate-wise ascent with a three-point quadratic step per coordinate
/// and per-coordinate adaptive step sizes. `x` is updated in place.
pub fn coordinate_ascent(
    f: &dyn Fn(&[f64]) -> f64,
    x: &mut [f64],
    init_step: f64,
    tol: f64,
    max_evals: usize,
) -> AscentResult {
    let n = x.len();
    let dirs: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            d
        })
        .collect();
    direction_ascent(f, x, &dirs, init_step, tol, max_evals)
}

/// Cyclic ascent along a fixed direction set with a three-point quadratic
/// step and per-direction adaptive step sizes. `x` is updated in place.
/// Supplying non-axis directions lets the search move along tie surfaces of
/// piecewise-smooth objectives where axis steps stall.
pub fn direction_ascent(
    f: &dyn Fn(&[f64]) -> f64,
    x: &mut [f64],
    dirs: &[Vec<f64>],
    init_step: f64,
    tol: f64,
    max_evals: usize,
) -> AscentResult {
    let n = x.len();
    let mut steps = vec![init_step; dirs.len()];
    let mut fx = f(x);
    let mut evals = 1usize;
    let mut probe = vec![0.0; n];

    loop {
        let pass_start = fx;
        for (k, d) in dirs.iter().enumerate() {
            if evals + 3 > max_evals {
                return AscentResult { value: fx, evals, converged: false };
            }
            let h = steps[k];
            let eval_at = |t: f64, probe: &mut [f64]| {
                for i in 0..n {
                    probe[i] = x[i] + t * d[i];
                }
                f(probe)
            };

            let fp = eval_at(h, &mut probe);
            let fm = eval_at(-h, &mut probe);
            evals += 2;

            // parabola through (-h, fm), (0, fx), (+h, fp)
            let denom = fm - 2.0 * fx + fp;
            let mut cand_best = (0.0, fx);
            if fp > cand_best.1 {
                cand_best = (h, fp);
            }
            if fm > cand_best.1 {
                cand_best = (-h, fm);
            }
            if denom < 0.0 {
                let delta = 0.5 * h * (fm - fp) / denom;
                if delta.abs() <= 2.0 * h {
                    let fq = eval_at(delta, &mut probe);
                    evals += 1;
                    if fq > cand_best.1 {
                        cand_best = (delta, fq);
                    }
                }
            }

            if cand_best.1 > fx {
                for i in 0..n {
                    x[i] += cand_best.0 * d[i];
                }
                fx = cand_best.1;
                steps[k] = (steps[k] * 1.5).min(init_step * 4.0);
            } else {
                steps[k] *= 0.5;
            }
        }
        let improved = fx - pass_start;
        let max_step = steps.iter().cloned().fold(0.0, f64::max);
        if improved <= tol * fx.abs().max(1.0) && max_step < tol.max(1e-14) {
            return AscentResult { value: fx, evals, converged: true };
        }
        if improved <= 0.0 && max_step < 1e-13 {
            return AscentResult { value: fx, evals, converged: true };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_cosine_peak() {
        let (x, fx) = golden_section_max(|t| t.cos(), -1.0, 2.0, 1e-12);
        // flat-top plateau limits the raw location to about sqrt(eps)
        assert!(x.abs() < 1e-7);
        assert!((fx - 1.0).abs() < 1e-12);
        let (x, fx) = refine_parabolic(|t| t.cos(), x, 1e-3, 2);
        assert!(x.abs() < 1e-10);
        assert!((fx - 1.0).abs() < 1e-15);
    }

    #[test]
    fn grid_then_golden_handles_multimodal() {
        // peaks at x = pi/2 (value 2) and a lower one near 3pi/2
        let f = |t: f64| t.sin() + t.sin().powi(2);
        let (x, fx) = grid_then_golden_max(f, 0.0, std::f64::consts::TAU, 1000, 1e-12);
        assert!((x - std::f64::consts::FRAC_PI_2).abs() < 1e-8);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn ascent_maximizes_concave_quadratic() {
        let f = |v: &[f64]| -(v[0] - 1.0).powi(2) - 2.0 * (v[1] + 0.5).powi(2);
        let mut x = vec![3.0, 3.0];
        let res = coordinate_ascent(&f, &mut x, 0.5, 1e-12, 10_000);
        assert!(res.converged);
        assert!((x[0] - 1.0).abs() < 1e-6);
        assert!((x[1] + 0.5).abs() < 1e-6);
        assert!(res.value.abs() < 1e-10);
    }
}
