//! Derivative-free Nelder-Mead simplex minimizer.

pub(crate) struct SimplexResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Minimizes `f` starting from `x0` with per-coordinate initial steps.
///
/// Stops when the spread of function values across the simplex falls below
/// `tol * (1 + |f_best|)` or after `max_iter` iterations.
pub(crate) fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    x0: &[f64],
    steps: &[f64],
    tol: f64,
    max_iter: usize,
) -> SimplexResult {
    let dim = x0.len();
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    points.push(x0.to_vec());
    for i in 0..dim {
        let mut p = x0.to_vec();
        p[i] += steps[i];
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| f(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        iterations += 1;
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        let best = order[0];
        let worst = order[dim];
        let second_worst = order[dim - 1];

        if (values[worst] - values[best]).abs() <= tol * (1.0 + values[best].abs()) {
            converged = true;
            break;
        }

        // centroid of all but the worst point
        let mut centroid = vec![0.0; dim];
        for (idx, p) in points.iter().enumerate() {
            if idx == worst {
                continue;
            }
            for (c, v) in centroid.iter_mut().zip(p) {
                *c += v / dim as f64;
            }
        }

        let blend = |a: f64| -> Vec<f64> {
            (0..dim)
                .map(|i| centroid[i] + a * (points[worst][i] - centroid[i]))
                .collect()
        };

        let reflected = blend(-1.0);
        let f_reflected = f(&reflected);
        if f_reflected < values[order[0]] {
            let expanded = blend(-2.0);
            let f_expanded = f(&expanded);
            if f_expanded < f_reflected {
                points[worst] = expanded;
                values[worst] = f_expanded;
            } else {
                points[worst] = reflected;
                values[worst] = f_reflected;
            }
            continue;
        }
        if f_reflected < values[second_worst] {
            points[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        let contracted = if f_reflected < values[worst] {
            blend(-0.5)
        } else {
            blend(0.5)
        };
        let f_contracted = f(&contracted);
        if f_contracted < values[worst].min(f_reflected) {
            points[worst] = contracted;
            values[worst] = f_contracted;
            continue;
        }
        // shrink toward the best vertex
        let best_point = points[best].clone();
        for idx in 0..=dim {
            if idx == best {
                continue;
            }
            for i in 0..dim {
                points[idx][i] = best_point[i] + 0.5 * (points[idx][i] - best_point[i]);
            }
            values[idx] = f(&points[idx]);
        }
    }

    let (arg_best, &value) = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("simplex is non-empty");
    SimplexResult {
        x: points[arg_best].clone(),
        value,
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_rosenbrock() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            (1.0 - a).powi(2) + 100.0 * (b - a * a).powi(2)
        };
        let r = nelder_mead(f, &[-1.2, 1.0], &[0.5, 0.5], 1e-14, 5000);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-5, "x = {:?}", r.x);
        assert!((r.x[1] - 1.0).abs() < 1e-5);
    }
}
