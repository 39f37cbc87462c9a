//! Derivative-free Nelder–Mead simplex minimizer. Drives every numeric
//! maximum-likelihood fit; objectives return +∞ (or NaN, treated the
//! same) outside their feasible region.

pub(crate) struct SimplexOptions {
    pub max_iter: usize,
    /// Converged when every vertex is within this distance of the best.
    pub param_tol: f64,
    /// Converged when the value spread across the simplex is below this.
    pub value_tol: f64,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        Self {
            max_iter: 4000,
            param_tol: 1e-8,
            value_tol: 1e-10,
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SimplexResult {
    pub point: Vec<f64>,
    pub value: f64,
    pub converged: bool,
    pub iterations: usize,
}

pub(crate) fn minimize<F>(
    mut f: F,
    start: &[f64],
    step: &[f64],
    opts: &SimplexOptions,
) -> SimplexResult
where
    F: FnMut(&[f64]) -> f64,
{
    let dim = start.len();
    assert!(dim >= 1 && step.len() == dim);
    let mut eval = move |p: &[f64]| {
        let v = f(p);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };

    let mut points: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    points.push(start.to_vec());
    for d in 0..dim {
        let mut p = start.to_vec();
        p[d] += if step[d] != 0.0 { step[d] } else { 0.1 };
        points.push(p);
    }
    let mut values: Vec<f64> = points.iter().map(|p| eval(p)).collect();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        iterations += 1;

        // Order vertices best → worst.
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        points = order.iter().map(|&i| points[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let spread = values[dim] - values[0];
        let diameter = points[1..]
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&points[0])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread.abs() < opts.value_tol || diameter < opts.param_tol {
            converged = true;
            break;
        }

        // Centroid of all but the worst vertex.
        let centroid: Vec<f64> = (0..dim)
            .map(|d| points[..dim].iter().map(|p| p[d]).sum::<f64>() / dim as f64)
            .collect();
        let blend = |a: f64, b: f64| -> Vec<f64> {
            (0..dim)
                .map(|d| a * centroid[d] + b * points[dim][d])
                .collect()
        };

        let reflected = blend(2.0, -1.0);
        let v_reflected = eval(&reflected);
        if v_reflected < values[0] {
            let expanded = blend(3.0, -2.0);
            let v_expanded = eval(&expanded);
            if v_expanded < v_reflected {
                points[dim] = expanded;
                values[dim] = v_expanded;
            } else {
                points[dim] = reflected;
                values[dim] = v_reflected;
            }
            continue;
        }
        if v_reflected < values[dim - 1] {
            points[dim] = reflected;
            values[dim] = v_reflected;
            continue;
        }
        let contracted = if v_reflected < values[dim] {
            blend(1.5, -0.5) // outside contraction
        } else {
            blend(0.5, 0.5) // inside contraction
        };
        let v_contracted = eval(&contracted);
        if v_contracted < values[dim].min(v_reflected) {
            points[dim] = contracted;
            values[dim] = v_contracted;
            continue;
        }
        // Shrink everything toward the best vertex.
        for i in 1..=dim {
            points[i] = (0..dim)
                .map(|d| 0.5 * (points[i][d] + points[0][d]))
                .collect();
            values[i] = eval(&points[i]);
        }
    }

    let best = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    SimplexResult {
        point: points[best].clone(),
        value: values[best],
        converged,
        iterations,
    }
}
