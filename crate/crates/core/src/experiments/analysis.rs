//! Small numerical helpers for reading features off sampled curves.

/// Location and value of the maximum of `ys`, refined by the parabola through
/// the maximal sample and its two neighbours. Edge maxima are returned
/// unrefined.
pub fn quadratic_peak(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    if xs.is_empty() || xs.len() != ys.len() {
        return None;
    }
    let (i, _) = ys
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (k, &y)| if y > best.1 { (k, y) } else { best });
    if i == 0 || i + 1 == ys.len() {
        return Some((xs[i], ys[i]));
    }
    Some(parabola_vertex(
        [xs[i - 1], xs[i], xs[i + 1]],
        [ys[i - 1], ys[i], ys[i + 1]],
    ))
}

/// Vertex of the parabola through three points.
fn parabola_vertex(x: [f64; 3], y: [f64; 3]) -> (f64, f64) {
    let d1 = (y[1] - y[0]) / (x[1] - x[0]);
    let d2 = (y[2] - y[1]) / (x[2] - x[1]);
    let curvature = (d2 - d1) / (x[2] - x[0]);
    if curvature == 0.0 {
        return (x[1], y[1]);
    }
    // y = y1 + b (x − x1) + c (x − x1)², with b the slope at x1
    let b = d1 + curvature * (x[1] - x[0]);
    let shift = -b / (2.0 * curvature);
    (x[1] + shift, y[1] + b * shift + curvature * shift * shift)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum {
    pub t: f64,
    pub value: f64,
    pub is_max: bool,
}

/// Interior local extrema of a sampled curve, each refined by a parabola.
pub fn local_extrema(ts: &[f64], ys: &[f64]) -> Vec<Extremum> {
    let mut out = Vec::new();
    for i in 1..ys.len().saturating_sub(1) {
        let is_max = ys[i] > ys[i - 1] && ys[i] >= ys[i + 1];
        let is_min = ys[i] < ys[i - 1] && ys[i] <= ys[i + 1];
        if is_max || is_min {
            let (t, value) = parabola_vertex([ts[i - 1], ts[i], ts[i + 1]], [ys[i - 1], ys[i], ys[i + 1]]);
            out.push(Extremum { t, value, is_max });
        }
    }
    out
}

/// Decay rate r of amplitudes following e^{−r t}, by least squares on the
/// logarithm. `None` with fewer than two positive samples.
pub fn log_linear_rate(ts: &[f64], amplitudes: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = ts
        .iter()
        .zip(amplitudes)
        .filter(|(_, a)| **a > 0.0)
        .map(|(t, a)| (*t, a.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(t, y)| (t - mt) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(t, _)| (t - mt) * (t - mt)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_is_exact_for_quadratics() {
        let xs: Vec<f64> = (0..11).map(|k| k as f64 * 0.3).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 - 3.0 * (x - 1.37) * (x - 1.37)).collect();
        let (x, y) = quadratic_peak(&xs, &ys).unwrap();
        assert!((x - 1.37).abs() < 1e-12);
        assert!((y - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lorentzian_peak_within_a_tenth_of_the_width() {
        let xs: Vec<f64> = (0..21).map(|k| -3.0 + 0.3 * k as f64).collect();
        for centre in [-1.0, 1.0, 0.05] {
            let ys: Vec<f64> = xs.iter().map(|x| 0.5 / ((x - centre).powi(2) + 0.25)).collect();
            let (x, _) = quadratic_peak(&xs, &ys).unwrap();
            assert!((x - centre).abs() < 0.1, "{centre}: {x}");
        }
    }

    #[test]
    fn edge_maximum_is_not_refined() {
        let (x, y) = quadratic_peak(&[0.0, 1.0, 2.0], &[3.0, 2.0, 1.0]).unwrap();
        assert_eq!((x, y), (0.0, 3.0));
        assert!(quadratic_peak(&[], &[]).is_none());
    }

    #[test]
    fn extrema_of_a_damped_cosine() {
        let ts: Vec<f64> = (0..2000).map(|k| k as f64 * 0.01).collect();
        let ys: Vec<f64> = ts.iter().map(|t| (-0.1 * t).exp() * (3.0 * t).cos()).collect();
        let ext = local_extrema(&ts, &ys);
        let maxima: Vec<&Extremum> = ext.iter().filter(|e| e.is_max).collect();
        let period = maxima[1].t - maxima[0].t;
        assert!((period - 2.0 * std::f64::consts::PI / 3.0).abs() < 1e-3);
        let amps: Vec<f64> = ext.windows(2).map(|w| (w[1].value - w[0].value).abs()).collect();
        let mids: Vec<f64> = ext.windows(2).map(|w| 0.5 * (w[0].t + w[1].t)).collect();
        let rate = log_linear_rate(&mids, &amps).unwrap();
        assert!((rate - 0.1).abs() < 0.01, "{rate}");
    }
}
