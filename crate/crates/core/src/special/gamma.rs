//! Gamma-function family helpers.

pub use statrs::function::gamma::{gamma, ln_gamma};

/// Rising factorial `(z)_j = z (z+1) ... (z+j-1)`, with `(z)_0 = 1`.
pub fn pochhammer(z: f64, j: u32) -> f64 {
    (0..j).fold(1.0, |acc, k| acc * (z + k as f64))
}

pub fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Binomial coefficient as a float; exact for the index ranges used here.
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pochhammer_examples() {
        assert_eq!(pochhammer(3.0, 0), 1.0);
        assert_eq!(pochhammer(-2.0, 4), 0.0);
        assert_eq!(pochhammer(2.5, 3), 39.375);
        assert_eq!(pochhammer(1.0, 10), factorial(10));
    }

    #[test]
    fn binomial_values() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(30, 15), 155117520.0);
        assert_eq!(binomial(3, 4), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
    }
}
