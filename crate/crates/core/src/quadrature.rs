//! Composite Simpson rule with a doubling (Richardson) convergence check.

use crate::error::{QslError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimpsonOptions {
    /// Initial node count; must be odd and at least 3.
    pub nodes: usize,
    /// Relative change between successive doublings accepted as converged.
    pub rel_tol: f64,
    pub max_doublings: u32,
}

impl Default for SimpsonOptions {
    fn default() -> Self {
        SimpsonOptions {
            nodes: 201,
            rel_tol: 1e-6,
            max_doublings: 6,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    /// `|S_{h/2} - S_h| / 15`.
    pub error_estimate: f64,
    pub nodes: usize,
    pub converged: bool,
}

/// Simpson sum over equally spaced samples.
pub fn simpson(values: &[f64], h: f64) -> Result<f64> {
    let n = values.len();
    if n < 3 || n.is_multiple_of(2) {
        return Err(QslError::BadGrid(format!(
            "Simpson rule needs an odd node count >= 3, got {n}"
        )));
    }
    let mut acc = values[0] + values[n - 1];
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        acc += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
    }
    Ok(acc * h / 3.0)
}

/// `∫_a^b f` by Simpson's rule, halving the step until two successive
/// estimates agree to `rel_tol`.
pub fn integrate(
    mut f: impl FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    opts: SimpsonOptions,
) -> Result<Integral> {
    if !(b > a) {
        return Err(QslError::BadGrid(format!("empty interval [{a}, {b}]")));
    }
    let mut n = opts.nodes;
    let mut h = (b - a) / (n - 1) as f64;
    let mut values = (0..n)
        .map(|i| f(a + i as f64 * h))
        .collect::<Result<Vec<_>>>()?;
    let mut current = simpson(&values, h)?;
    let mut last = Integral {
        value: current,
        error_estimate: f64::INFINITY,
        nodes: n,
        converged: false,
    };
    for _ in 0..opts.max_doublings {
        let half = h / 2.0;
        let mut refined = Vec::with_capacity(2 * n - 1);
        for (i, v) in values.iter().enumerate() {
            refined.push(*v);
            if i + 1 < n {
                refined.push(f(a + (2 * i + 1) as f64 * half)?);
            }
        }
        let next = simpson(&refined, half)?;
        let change = (next - current).abs();
        n = refined.len();
        h = half;
        values = refined;
        let converged = change <= opts.rel_tol * next.abs() || change <= 1e-14;
        last = Integral {
            value: next,
            error_estimate: change / 15.0,
            nodes: n,
            converged,
        };
        current = next;
        if converged {
            break;
        }
    }
    if !last.converged && opts.max_doublings > 0 {
        log::warn!(
            "Simpson quadrature not converged after {} nodes (change {:e})",
            last.nodes,
            last.error_estimate * 15.0
        );
    }
    Ok(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn exact_for_cubics() {
        let v: Vec<f64> = (0..5).map(|i| (i as f64 * 0.5).powi(3)).collect();
        assert_abs_diff_eq!(simpson(&v, 0.5).unwrap(), 4.0, epsilon = 1e-14);
    }

    #[test]
    fn rejects_even_grids() {
        assert!(simpson(&[0.0, 1.0], 1.0).is_err());
        assert!(simpson(&[0.0, 1.0, 2.0, 3.0], 1.0).is_err());
    }

    #[test]
    fn integrates_sine() {
        let out = integrate(
            |t| Ok(t.sin()),
            0.0,
            std::f64::consts::PI,
            SimpsonOptions::default(),
        )
        .unwrap();
        assert!(out.converged);
        assert_abs_diff_eq!(out.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn square_root_singularity_converges_slowly_but_converges() {
        let out = integrate(
            |t: f64| Ok(t.sqrt()),
            0.0,
            1.0,
            SimpsonOptions {
                max_doublings: 10,
                ..Default::default()
            },
        )
        .unwrap();
        assert_abs_diff_eq!(out.value, 2.0 / 3.0, epsilon = 1e-6);
    }
}
