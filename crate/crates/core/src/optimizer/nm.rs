//! Derivative-free simplex maximization with dimension-adaptive
//! expansion/contraction/shrink coefficients, suited to the moderate
//! parameter counts of per-site unitary generators.

/// Result of one simplex run: the best point found and its value.
pub(crate) struct SimplexOutcome {
    pub(crate) x: Vec<f64>,
    pub(crate) value: f64,
    /// Evaluations actually spent (budget accounting in tests).
    #[cfg_attr(not(test), allow(dead_code))]
    pub(crate) evals: usize,
}

/// Maximizes `f` starting at `x0`, spending at most `max_evals` function
/// evaluations, stopping early when the simplex collapses below
/// `step_tol` in every coordinate. Deterministic.
pub(crate) fn maximize(
    f: &mut dyn FnMut(&[f64]) -> f64,
    x0: &[f64],
    max_evals: usize,
    step_tol: f64,
) -> SimplexOutcome {
    const INITIAL_STEP: f64 = 0.25;
    let q = x0.len();
    let mut evals = 0usize;
    let budget = |f: &mut dyn FnMut(&[f64]) -> f64, x: &[f64], evals: &mut usize| -> f64 {
        *evals += 1;
        -f(x)
    };
    // Work in minimization form g = −f.
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(q + 1);
    let mut values: Vec<f64> = Vec::with_capacity(q + 1);
    points.push(x0.to_vec());
    values.push(budget(f, x0, &mut evals));
    for i in 0..q {
        if evals >= max_evals {
            break;
        }
        let mut x = x0.to_vec();
        x[i] += INITIAL_STEP;
        values.push(budget(f, &x, &mut evals));
        points.push(x);
    }
    // If the budget could not even seed the simplex, report the best seen.
    if points.len() < q + 1 {
        let best = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).expect("finite objective"))
            .map(|(i, _)| i)
            .unwrap_or(0);
        return SimplexOutcome {
            x: points[best].clone(),
            value: -values[best],
            evals,
        };
    }
    // Dimension-adaptive coefficients.
    let qf = q as f64;
    let alpha = 1.0;
    let beta = 1.0 + 2.0 / qf;
    let gamma = 0.75 - 1.0 / (2.0 * qf);
    let delta = 1.0 - 1.0 / qf;

    let mut order: Vec<usize> = (0..=q).collect();
    while evals < max_evals {
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"));
        let best = order[0];
        let worst = order[q];
        let second_worst = order[q - 1];
        // Collapse check: the simplex fits in a step_tol box around the best.
        let spread = points
            .iter()
            .map(|p| {
                p.iter()
                    .zip(&points[best])
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max);
        if spread < step_tol {
            break;
        }
        // Centroid of all but the worst.
        let mut centroid = vec![0.0f64; q];
        for &idx in order.iter().take(q) {
            for (c, x) in centroid.iter_mut().zip(&points[idx]) {
                *c += x;
            }
        }
        for c in &mut centroid {
            *c /= qf;
        }
        let blend = |t: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(&points[worst])
                .map(|(c, w)| c + t * (c - w))
                .collect()
        };
        let reflected = blend(alpha);
        let f_reflected = budget(f, &reflected, &mut evals);
        if f_reflected < values[best] {
            // Try to expand past the reflection.
            if evals < max_evals {
                let expanded = blend(beta);
                let f_expanded = budget(f, &expanded, &mut evals);
                if f_expanded < f_reflected {
                    points[worst] = expanded;
                    values[worst] = f_expanded;
                    continue;
                }
            }
            points[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        if f_reflected < values[second_worst] {
            points[worst] = reflected;
            values[worst] = f_reflected;
            continue;
        }
        let (contracted, f_contracted) = if f_reflected < values[worst] {
            let outside = blend(gamma);
            let fo = budget(f, &outside, &mut evals);
            if fo <= f_reflected {
                (outside, fo)
            } else {
                (reflected.clone(), f_reflected)
            }
        } else {
            let inside = blend(-gamma);
            let fi = budget(f, &inside, &mut evals);
            if fi < values[worst] {
                (inside, fi)
            } else {
                // Shrink toward the best point.
                for &idx in order.iter().skip(1) {
                    if evals >= max_evals {
                        break;
                    }
                    let shrunk: Vec<f64> = points[best]
                        .iter()
                        .zip(&points[idx])
                        .map(|(b, x)| b + delta * (x - b))
                        .collect();
                    values[idx] = budget(f, &shrunk, &mut evals);
                    points[idx] = shrunk;
                }
                continue;
            }
        };
        points[worst] = contracted;
        values[worst] = f_contracted;
    }
    let best = (0..points.len())
        .min_by(|&a, &b| values[a].partial_cmp(&values[b]).expect("finite objective"))
        .expect("simplex is non-empty");
    SimplexOutcome {
        x: points[best].clone(),
        value: -values[best],
        evals,
    }
}
