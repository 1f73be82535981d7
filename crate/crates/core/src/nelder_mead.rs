//! Derivative-free simplex minimization.

/// Standard reflection/expansion/contraction/shrink coefficients.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

#[derive(Debug, Clone, Copy)]
pub struct Options {
    /// Initial offset along each coordinate axis.
    pub step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_iter: usize,
}

impl Default for Options {
    fn default() -> Self {
        Self { step: 0.2, diameter_tol: 1e-10, max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn diameter(simplex: &[Vec<f64>]) -> f64 {
    let best = &simplex[0];
    simplex[1..].iter().map(|v| v.iter().zip(best).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()).fold(0.0, f64::max)
}

fn along(from: &[f64], to: &[f64], t: f64) -> Vec<f64> {
    from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
}

/// Minimizes `f` starting from `x0`. Non-finite values are treated as +∞.
pub fn minimize(mut f: impl FnMut(&[f64]) -> f64, x0: &[f64], opts: &Options) -> Minimum {
    let n = x0.len();
    assert!(n > 0, "empty parameter vector");
    let mut eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut simplex: Vec<Vec<f64>> = vec![x0.to_vec()];
    for i in 0..n {
        let mut v = x0.to_vec();
        v[i] += opts.step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| eval(v)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        // Stable sort keeps the order of ties deterministic.
        let mut order: Vec<usize> = (0..=n).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        if diameter(&simplex) < opts.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let mut centroid = vec![0.0; n];
        for v in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let reflected = along(&centroid, &worst, -ALPHA);
        let fr = eval(&reflected);
        if fr < values[0] {
            let expanded = along(&centroid, &worst, -GAMMA);
            let fe = eval(&expanded);
            if fe < fr {
                simplex[n] = expanded;
                values[n] = fe;
            } else {
                simplex[n] = reflected;
                values[n] = fr;
            }
            continue;
        }
        if fr < values[n - 1] {
            simplex[n] = reflected;
            values[n] = fr;
            continue;
        }
        // Outside contraction when the reflection helped at all, inside otherwise.
        let contracted = if fr < values[n] { along(&centroid, &reflected, RHO) } else { along(&centroid, &worst, RHO) };
        let fc = eval(&contracted);
        if fc < values[n].min(fr) {
            simplex[n] = contracted;
            values[n] = fc;
            continue;
        }
        let best = simplex[0].clone();
        for i in 1..=n {
            simplex[i] = along(&best, &simplex[i], SIGMA);
            values[i] = eval(&simplex[i]);
        }
    }

    let best = (0..=n).min_by(|&a, &b| values[a].total_cmp(&values[b])).expect("nonempty simplex");
    Minimum { x: simplex[best].clone(), value: values[best], iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let m = minimize(|x| (x[0] - 1.0).powi(2) + 3.0 * (x[1] + 2.0).powi(2), &[0.0, 0.0], &Options::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-9 && (m.x[1] + 2.0).abs() < 1e-9);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let m = minimize(f, &[-1.2, 1.0], &Options { step: 0.5, ..Options::default() });
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-7 && (m.x[1] - 1.0).abs() < 1e-7, "{:?}", m.x);
    }

    #[test]
    fn nan_is_rejected() {
        let m = minimize(|x| if x[0] < 0.0 { f64::NAN } else { (x[0] - 0.5).powi(2) }, &[0.1], &Options::default());
        assert!((m.x[0] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn iteration_cap_is_reported() {
        let m = minimize(|x| x[0], &[0.0], &Options { max_iter: 5, ..Options::default() });
        assert!(!m.converged);
        assert_eq!(m.iterations, 5);
    }
}
