//! Root bracketing and derivative-free minimization used by the estimators.

/// Bisection on `[lo, hi]`, where `f(lo)` and `f(hi)` must differ in sign.
/// Returns `None` when the interval does not bracket a root.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || f_lo.is_nan() || f_hi.is_nan() {
        return None;
    }
    // 200 halvings exhaust f64 resolution on any finite bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol {
            return Some(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Some(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iter: usize,
    /// Stop once the spread of objective values across the simplex falls below this.
    pub f_tol: f64,
    /// ... and the simplex diameter falls below this.
    pub x_tol: f64,
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iter: 400,
            f_tol: 1e-9,
            x_tol: 1e-7,
            initial_step: 0.1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2, shrink 1/2),
/// the same scheme as MATLAB's `fminsearch`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(f: F, start: &[f64], opts: NelderMeadOptions) -> Minimum {
    let dim = start.len();
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    simplex.push(start.to_vec());
    for i in 0..dim {
        let mut v = start.to_vec();
        let step = if v[i] != 0.0 { opts.initial_step * v[i].abs() } else { opts.initial_step };
        v[i] += step;
        simplex.push(v);
    }
    let mut values: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let mut iterations = 0;
    while iterations < opts.max_iter {
        let mut order: Vec<usize> = (0..=dim).collect();
        order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        values = order.iter().map(|&i| values[i]).collect();

        let f_spread = values[dim] - values[0];
        let x_spread = simplex[1..]
            .iter()
            .flat_map(|v| v.iter().zip(&simplex[0]).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if f_spread <= opts.f_tol && x_spread <= opts.x_tol {
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|v| v[j]).sum::<f64>() / dim as f64)
            .collect();
        let along = |t: f64| -> Vec<f64> {
            centroid.iter().zip(&simplex[dim]).map(|(c, w)| c + t * (c - w)).collect()
        };

        let reflected = along(1.0);
        let f_r = f(&reflected);
        if f_r < values[0] {
            let expanded = along(2.0);
            let f_e = f(&expanded);
            if f_e < f_r {
                simplex[dim] = expanded;
                values[dim] = f_e;
            } else {
                simplex[dim] = reflected;
                values[dim] = f_r;
            }
            continue;
        }
        if f_r < values[dim - 1] {
            simplex[dim] = reflected;
            values[dim] = f_r;
            continue;
        }
        let (contracted, f_c) = if f_r < values[dim] {
            let c = along(0.5);
            let fc = f(&c);
            (c, fc)
        } else {
            let c = along(-0.5);
            let fc = f(&c);
            (c, fc)
        };
        if f_c < values[dim].min(f_r) {
            simplex[dim] = contracted;
            values[dim] = f_c;
            continue;
        }
        // shrink towards the best vertex
        for i in 1..=dim {
            let shrunk: Vec<f64> = simplex[0]
                .iter()
                .zip(&simplex[i])
                .map(|(b, v)| b + 0.5 * (v - b))
                .collect();
            values[i] = f(&shrunk);
            simplex[i] = shrunk;
        }
    }

    let best = (0..=dim).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    Minimum {
        x: simplex[best].clone(),
        value: values[best],
        iterations,
    }
}
