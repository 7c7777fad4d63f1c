/// Kolmogorov–Smirnov distance sup |F_n(x) − F(x)| between the empirical
/// law of `samples` and `cdf`. Sorts `samples` in place.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d, (k, &x)| {
        let f = cdf(x);
        let above = (k + 1) as f64 / n - f;
        let below = f - k as f64 / n;
        d.max(above).max(below)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        // F_n jumps from 0 to 1 at 0.3; the uniform cdf is 0.3 there.
        assert!((ks_distance(&mut [0.3], |x| x) - 0.7).abs() < 1e-15);
    }

    #[test]
    fn evenly_spread_uniform_sample() {
        let mut s: Vec<f64> = (0..100).map(|k| (k as f64 + 0.5) / 100.0).rev().collect();
        assert!((ks_distance(&mut s, |x| x) - 0.005).abs() < 1e-12);
    }
}
