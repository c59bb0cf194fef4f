use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::model::{Column, Trajectory};

pub const MAX_FIT_ITERATIONS: usize = 200;
const MIN_SAMPLES: usize = 10;

/// y(t) = asymptote + amplitude · e^{−rate (t − t₀)}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub asymptote: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub rms: f64,
    pub iterations: usize,
    /// rate × sampled span; below 2 the asymptote is poorly constrained.
    pub decay_times: f64,
}

impl ExponentialFit {
    pub fn evaluate(&self, t_from_start: f64) -> f64 {
        self.asymptote + self.amplitude * (-self.rate * t_from_start).exp()
    }
}

pub fn fit_exponential(traj: &Trajectory, column: Column) -> Result<ExponentialFit> {
    fit_exponential_series(&traj.times, traj.column(column))
}

fn sum_squares(times: &[f64], values: &[f64], p: &Vector3<f64>) -> f64 {
    times
        .iter()
        .zip(values)
        .map(|(t, y)| {
            let r = p[0] + p[1] * (-p[2] * t).exp() - y;
            r * r
        })
        .sum()
}

/// Gauss-Newton least squares with step halving.
///
/// A series that is constant to rounding has no identifiable rate; it is
/// returned with zero amplitude and the initial rate guess.
pub fn fit_exponential_series(times: &[f64], values: &[f64]) -> Result<ExponentialFit> {
    if times.len() != values.len() {
        return Err(Error::DimensionMismatch {
            expected: times.len(),
            got: values.len(),
        });
    }
    if times.len() < MIN_SAMPLES {
        return Err(Error::FitDiverged(format!(
            "need at least {MIN_SAMPLES} samples, got {}",
            times.len()
        )));
    }
    if values.iter().chain(times).any(|v| !v.is_finite()) {
        return Err(Error::FitDiverged("non-finite input".into()));
    }
    let t0 = times[0];
    let shifted: Vec<f64> = times.iter().map(|t| t - t0).collect();
    let span = shifted[shifted.len() - 1];
    let first = values[0];
    let last = values[values.len() - 1];
    let n = values.len() as f64;
    let rms_of = |sse: f64| (sse / n).sqrt();

    let mean = values.iter().sum::<f64>() / n;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    if values.iter().all(|v| (v - mean).abs() <= 1e-12 * scale) {
        let p = Vector3::new(mean, 0.0, 3.0 / span);
        return Ok(ExponentialFit {
            asymptote: mean,
            amplitude: 0.0,
            rate: p[2],
            rms: rms_of(sum_squares(&shifted, values, &p)),
            iterations: 0,
            decay_times: 3.0,
        });
    }

    let mut p = Vector3::new(last, first - last, 3.0 / span);
    let mut sse = sum_squares(&shifted, values, &p);
    for iteration in 1..=MAX_FIT_ITERATIONS {
        let mut jtj = Matrix3::zeros();
        let mut jtr = Vector3::zeros();
        for (t, y) in shifted.iter().zip(values) {
            let e = (-p[2] * t).exp();
            let r = p[0] + p[1] * e - y;
            let j = Vector3::new(1.0, e, -p[1] * t * e);
            jtj += j * j.transpose();
            jtr += j * r;
        }
        let delta = jtj
            .lu()
            .solve(&(-jtr))
            .ok_or_else(|| Error::FitDiverged("singular normal equations".into()))?;

        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let trial = p + delta * lambda;
            let trial_sse = sum_squares(&shifted, values, &trial);
            if trial_sse.is_finite() && trial_sse <= sse {
                accepted = Some((trial, trial_sse));
                break;
            }
            lambda *= 0.5;
        }
        let Some((next, next_sse)) = accepted else {
            // no descent left along the Gauss-Newton direction
            return finish(p, sse, iteration, span, rms_of);
        };
        let small_step = (0..3).all(|i| (next[i] - p[i]).abs() <= 1e-12 * (p[i].abs() + 1e-300) + 1e-15);
        let stalled = sse - next_sse <= 1e-15 * sse;
        p = next;
        sse = next_sse;
        if !p.iter().all(|v| v.is_finite()) {
            return Err(Error::FitDiverged("non-finite parameters".into()));
        }
        if small_step || stalled {
            return finish(p, sse, iteration, span, rms_of);
        }
    }
    Err(Error::FitDiverged(format!(
        "no convergence within {MAX_FIT_ITERATIONS} iterations"
    )))
}

fn finish(
    p: Vector3<f64>,
    sse: f64,
    iterations: usize,
    span: f64,
    rms_of: impl Fn(f64) -> f64,
) -> Result<ExponentialFit> {
    if !p.iter().all(|v| v.is_finite()) || !sse.is_finite() {
        return Err(Error::FitDiverged("non-finite parameters".into()));
    }
    Ok(ExponentialFit {
        asymptote: p[0],
        amplitude: p[1],
        rate: p[2],
        rms: rms_of(sse),
        iterations,
        decay_times: p[2] * span,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic(a: f64, b: f64, c: f64, n: usize, span: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|k| span * k as f64 / (n - 1) as f64).collect();
        let y = t.iter().map(|t| a + b * (-c * t).exp()).collect();
        (t, y)
    }

    #[test]
    fn recovers_exact_exponential() {
        let (t, y) = synthetic(0.5, -1.5, 0.2, 100, 25.0);
        let fit = fit_exponential_series(&t, &y).unwrap();
        assert!((fit.asymptote - 0.5).abs() < 1e-6);
        assert!((fit.amplitude + 1.5).abs() < 1e-6);
        assert!((fit.rate - 0.2).abs() < 1e-6);
        assert!(fit.rms < 1e-9);
        assert!(fit.decay_times > 2.0);
    }

    #[test]
    fn recovers_slow_relaxation() {
        let (t, y) = synthetic(0.714, -1.714, 0.0035, 300, 1200.0);
        let fit = fit_exponential_series(&t, &y).unwrap();
        assert!((fit.rate - 0.0035).abs() < 1e-9);
        assert!((fit.asymptote - 0.714).abs() < 1e-9);
    }

    #[test]
    fn offset_start_time() {
        let (t, y) = synthetic(1.0, 2.0, 0.5, 40, 10.0);
        let t: Vec<f64> = t.iter().map(|t| t + 100.0).collect();
        let fit = fit_exponential_series(&t, &y).unwrap();
        assert!((fit.amplitude - 2.0).abs() < 1e-8);
        assert!((fit.evaluate(2.0) - (1.0 + 2.0 * (-1.0f64).exp())).abs() < 1e-8);
    }

    #[test]
    fn constant_series_has_no_amplitude() {
        let t: Vec<f64> = (0..20).map(f64::from).collect();
        let y = vec![0.3; 20];
        match fit_exponential_series(&t, &y) {
            Ok(fit) => {
                assert!(fit.amplitude.abs() < 1e-9);
                assert!(fit.rms < 1e-15);
            }
            Err(e) => assert!(matches!(e, Error::FitDiverged(_))),
        }
    }

    #[test]
    fn too_few_samples() {
        let (t, y) = synthetic(0.0, 1.0, 1.0, 5, 3.0);
        assert!(matches!(fit_exponential_series(&t, &y), Err(Error::FitDiverged(_))));
    }
}
