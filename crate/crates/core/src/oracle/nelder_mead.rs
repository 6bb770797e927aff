//! Derivative-free simplex minimization.

#[derive(Debug, Clone)]
pub struct NelderMeadOptions {
    /// Offset of each initial vertex from the start point along one axis.
    pub initial_step: f64,
    /// Stop once every vertex lies within this distance of the best one.
    pub diameter_tol: f64,
    pub max_iterations: usize,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            initial_step: 0.3,
            diameter_tol: 1e-8,
            max_iterations: 2000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Minimizes `f` starting from an axis-aligned simplex around `x0`.
pub fn minimize<F>(f: F, x0: &[f64], opts: &NelderMeadOptions) -> Minimum
where
    F: Fn(&[f64]) -> f64,
{
    let n = x0.len();
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((x0.to_vec(), f(x0)));
    for i in 0..n {
        let mut x = x0.to_vec();
        x[i] += opts.initial_step;
        let fx = f(&x);
        simplex.push((x, fx));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iterations {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        if diameter(&simplex) < opts.diameter_tol {
            converged = true;
            break;
        }
        iterations += 1;

        let worst = n;
        let centroid: Vec<f64> = (0..n)
            .map(|j| simplex[..n].iter().map(|(x, _)| x[j]).sum::<f64>() / n as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&simplex[worst].0)
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };

        let xr = along(REFLECT);
        let fr = f(&xr);
        if fr < simplex[0].1 {
            let xe = along(EXPAND);
            let fe = f(&xe);
            simplex[worst] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < simplex[n - 1].1 {
            simplex[worst] = (xr, fr);
            continue;
        }
        // contraction: outside if the reflection improved on the worst point
        let (xc, fc) = if fr < simplex[worst].1 {
            let x = along(CONTRACT);
            let fx = f(&x);
            (x, fx)
        } else {
            let x = along(-CONTRACT);
            let fx = f(&x);
            (x, fx)
        };
        if fc < simplex[worst].1.min(fr) {
            simplex[worst] = (xc, fc);
            continue;
        }
        let best = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            for (xi, bi) in vertex.0.iter_mut().zip(&best) {
                *xi = bi + SHRINK * (*xi - bi);
            }
            vertex.1 = f(&vertex.0);
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    Minimum {
        x,
        value,
        iterations,
        converged,
    }
}

fn diameter(simplex: &[(Vec<f64>, f64)]) -> f64 {
    let best = &simplex[0].0;
    simplex[1..]
        .iter()
        .map(|(x, _)| {
            x.iter()
                .zip(best)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_bowl() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2) + x[2].powi(2);
        let m = minimize(f, &[0.0, 0.0, 0.0], &NelderMeadOptions::default());
        assert!(m.converged);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6 && m.x[2].abs() < 1e-6);
        assert!(m.value < 1e-12);
    }

    #[test]
    fn rosenbrock() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let opts = NelderMeadOptions {
            max_iterations: 5000,
            ..Default::default()
        };
        let m = minimize(f, &[-1.2, 1.0], &opts);
        assert!((m.x[0] - 1.0).abs() < 1e-5 && (m.x[1] - 1.0).abs() < 1e-5);
    }

    #[test]
    fn iteration_cap() {
        let f = |x: &[f64]| x.iter().map(|v| v.abs()).sum::<f64>();
        let opts = NelderMeadOptions {
            max_iterations: 3,
            ..Default::default()
        };
        let m = minimize(f, &[5.0; 4], &opts);
        assert_eq!(m.iterations, 3);
        assert!(!m.converged);
    }
}
