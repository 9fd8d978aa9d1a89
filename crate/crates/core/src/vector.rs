//! Dense vector helpers on `[f64]`.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn scale(alpha: f64, x: &[f64]) -> Vec<f64> {
    x.iter().map(|v| alpha * v).collect()
}

pub fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|&v| v == 0.0)
}

/// Number of entries that are not exactly zero.
pub fn support_size(a: &[f64]) -> usize {
    a.iter().filter(|&&v| v != 0.0).count()
}

/// One past the largest index holding a nonzero entry.
pub fn support_end(a: &[f64]) -> usize {
    a.iter().rposition(|&v| v != 0.0).map_or(0, |i| i + 1)
}

/// Parse a comma-separated list of decimals.
pub fn parse_csv_vector(s: &str) -> Result<Vec<f64>, std::num::ParseFloatError> {
    s.split(',').map(|t| t.trim().parse::<f64>()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn support_helpers() {
        let v = [0.0, 1.0, 0.0, -2.0, 0.0];
        assert_eq!(support_size(&v), 2);
        assert_eq!(support_end(&v), 4);
        assert_eq!(support_end(&[0.0, 0.0]), 0);
        assert!(is_zero(&[0.0, -0.0]));
    }

    #[test]
    fn parses_comma_separated() {
        assert_eq!(parse_csv_vector("0, -1.5,2").unwrap(), vec![0.0, -1.5, 2.0]);
        assert!(parse_csv_vector("1,,2").is_err());
    }
}
