//! Derivative-free minimization (Nelder–Mead simplex with restarts).

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions {
    /// Total simplex steps across all restarts.
    pub max_iters: u64,
    /// Stop as soon as the best value is at or below this.
    pub target: f64,
    /// A simplex whose values and extent fall below these has stalled.
    pub f_tol: f64,
    pub x_tol: f64,
    /// Edge length of each fresh simplex.
    pub initial_step: f64,
    pub max_restarts: u32,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        NelderMeadOptions {
            max_iters: 2000,
            target: f64::NEG_INFINITY,
            f_tol: 1e-16,
            x_tol: 1e-12,
            initial_step: 0.5,
            max_restarts: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: u64,
    pub restarts: u32,
}

/// Minimizes `f` from `x0` with dimension-adaptive coefficients.
pub fn nelder_mead(
    mut f: impl FnMut(&[f64]) -> f64,
    x0: &[f64],
    opts: NelderMeadOptions,
) -> Minimum {
    let n = x0.len();
    let mut best = Minimum {
        x: x0.to_vec(),
        value: f(x0),
        iterations: 0,
        restarts: 0,
    };
    if n == 0 || best.value <= opts.target {
        return best;
    }
    let nf = n as f64;
    let (alpha, gamma, rho, sigma) = (1.0, 1.0 + 2.0 / nf, 0.75 - 0.5 / nf, 1.0 - 1.0 / nf);
    let mut step = opts.initial_step;

    loop {
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((best.x.clone(), best.value));
        for i in 0..n {
            let mut x = best.x.clone();
            x[i] += step;
            let v = f(&x);
            simplex.push((x, v));
        }
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            if simplex[0].1 < best.value {
                best.x = simplex[0].0.clone();
                best.value = simplex[0].1;
            }
            if best.value <= opts.target || best.iterations >= opts.max_iters {
                return best;
            }
            let spread = simplex[n].1 - simplex[0].1;
            let extent = simplex[1..]
                .iter()
                .map(|(x, _)| {
                    x.iter()
                        .zip(&simplex[0].0)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
                .fold(0.0, f64::max);
            if spread <= opts.f_tol && extent <= opts.x_tol.max(step * 1e-9) || extent <= opts.x_tol
            {
                break;
            }
            best.iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / nf;
                }
            }
            let along = |t: f64, from: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };
            let worst = simplex[n].0.clone();
            let reflected = along(alpha, &worst);
            let fr = f(&reflected);
            if fr < simplex[0].1 {
                let expanded = along(gamma, &worst);
                let fe = f(&expanded);
                simplex[n] = if fe < fr {
                    (expanded, fe)
                } else {
                    (reflected, fr)
                };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (reflected, fr);
                continue;
            }
            let (contracted, fc) = if fr < simplex[n].1 {
                let x = along(rho * alpha, &worst);
                let v = f(&x);
                (x, v)
            } else {
                let x = along(-rho, &worst);
                let v = f(&x);
                (x, v)
            };
            if fc < simplex[n].1.min(fr) {
                simplex[n] = (contracted, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for vertex in simplex.iter_mut().skip(1) {
                let x: Vec<f64> = anchor
                    .iter()
                    .zip(&vertex.0)
                    .map(|(a, v)| a + sigma * (v - a))
                    .collect();
                let v = f(&x);
                *vertex = (x, v);
            }
        }
        if best.restarts >= opts.max_restarts {
            return best;
        }
        best.restarts += 1;
        // restart around the incumbent with a smaller simplex
        step = (step * 0.5).max(1e-6);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimizes_quadratic() {
        let m = nelder_mead(
            |x| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2),
            &[0.0, 0.0],
            NelderMeadOptions {
                target: 1e-20,
                max_iters: 5000,
                ..Default::default()
            },
        );
        assert!(
            (m.x[0] - 1.0).abs() < 1e-8 && (m.x[1] + 2.0).abs() < 1e-8,
            "{m:?}"
        );
    }

    #[test]
    fn minimizes_rosenbrock() {
        let m = nelder_mead(
            |x| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2),
            &[-1.2, 1.0],
            NelderMeadOptions {
                max_iters: 10000,
                target: 1e-18,
                ..Default::default()
            },
        );
        assert!(m.value < 1e-12, "{m:?}");
    }

    #[test]
    fn stops_at_iteration_budget() {
        let m = nelder_mead(
            |x| x.iter().map(|v| v.abs()).sum(),
            &[3.0; 6],
            NelderMeadOptions {
                max_iters: 5,
                ..Default::default()
            },
        );
        assert!(m.iterations <= 5);
    }

    #[test]
    fn returns_immediately_when_start_meets_target() {
        let m = nelder_mead(
            |_| 0.0,
            &[1.0, 2.0],
            NelderMeadOptions {
                target: 0.0,
                ..Default::default()
            },
        );
        assert_eq!(m.iterations, 0);
    }
}
