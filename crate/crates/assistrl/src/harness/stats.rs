//! Curve statistics: moving averages, threshold crossings, trend slopes.

/// Trailing moving average with window `window`; partial windows at the
/// start use however many samples exist.
pub fn moving_average(series: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 1, "window must be at least 1");
    series
        .iter()
        .enumerate()
        .map(|(i, _)| {
            let lo = (i + 1).saturating_sub(window);
            let slice = &series[lo..=i];
            slice.iter().sum::<f64>() / slice.len() as f64
        })
        .collect()
}

/// Which way a metric improves when crossing a threshold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Crossing means dropping to or below the threshold (error metrics).
    Below,
    /// Crossing means rising to or above the threshold (return metrics).
    Above,
}

/// First index whose value crosses `threshold` in the given direction.
pub fn episodes_to_threshold(series: &[f64], threshold: f64, direction: Direction) -> Option<usize> {
    series.iter().position(|&v| match direction {
        Direction::Below => v <= threshold,
        Direction::Above => v >= threshold,
    })
}

/// Mean of the final `tail` entries (the whole series if shorter).
pub fn tail_mean(series: &[f64], tail: usize) -> f64 {
    let lo = series.len().saturating_sub(tail);
    let slice = &series[lo..];
    slice.iter().sum::<f64>() / slice.len().max(1) as f64
}

/// Least-squares slope of `y` against indices `0..n`.
pub fn linear_trend_slope(y: &[f64]) -> f64 {
    let n = y.len();
    if n < 2 {
        return 0.0;
    }
    let x_mean = (n - 1) as f64 / 2.0;
    let y_mean = y.iter().sum::<f64>() / n as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, &yi) in y.iter().enumerate() {
        let dx = i as f64 - x_mean;
        num += dx * (yi - y_mean);
        den += dx * dx;
    }
    num / den
}

pub fn mean(series: &[f64]) -> f64 {
    series.iter().sum::<f64>() / series.len().max(1) as f64
}

/// Standard error of the mean with the sample (n-1) variance; 0 for n <= 1.
pub fn stderr(series: &[f64]) -> f64 {
    let n = series.len();
    if n <= 1 {
        return 0.0;
    }
    let m = mean(series);
    let var = series.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}
