//! Truncated spectral series and a decimal scientific float for counts that
//! overflow `f64` once multiplied by `(mn)!`.

use std::fmt;

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

/// One eigenvalue with its series weight `c = ⟨φ,1⟩² / ‖φ‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub lambda: f64,
    pub c: f64,
}

/// `Σ c_k λ_k^{m-1}`, the truncated expansion of `E(G □_S P_m) / (mn)!`.
pub fn series_sum(terms: &[Term], m: usize) -> f64 {
    assert!(m >= 1, "series index starts at m = 1");
    terms
        .iter()
        .map(|t| t.c * t.lambda.powi(m as i32 - 1))
        .sum()
}

/// `(mn)! · Σ c_k λ_k^{m-1}` with the factorial carried in log space.
pub fn scaled_series(terms: &[Term], n: usize, m: usize) -> SciFloat {
    SciFloat::from_f64(series_sum(terms, m)).mul_log10(log10_factorial(n * m))
}

/// `log10(k!)`.
pub fn log10_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).log10()).sum()
}

/// `mantissa × 10^exponent` with `1 <= |mantissa| < 10` (or exactly zero).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SciFloat {
    pub mantissa: f64,
    pub exponent: i32,
}

impl SciFloat {
    pub const ZERO: SciFloat = SciFloat {
        mantissa: 0.0,
        exponent: 0,
    };

    pub fn from_f64(x: f64) -> Self {
        if x == 0.0 || !x.is_finite() {
            return SciFloat {
                mantissa: x,
                exponent: 0,
            };
        }
        let e = x.abs().log10().floor() as i32;
        Self::normalize(x / 10f64.powi(e), e)
    }

    /// Exact decimal digits of `n`, rounded to the leading 17.
    pub fn from_big(n: &BigUint) -> Self {
        let digits = n.to_string();
        let lead: String = digits.chars().take(17).collect();
        let mantissa = format!("{}.{}", &lead[..1], &lead[1..])
            .parse::<f64>()
            .unwrap_or(0.0);
        Self::normalize(mantissa, digits.len() as i32 - 1)
    }

    fn normalize(mut mantissa: f64, mut exponent: i32) -> Self {
        if mantissa == 0.0 {
            return Self::ZERO;
        }
        while mantissa.abs() >= 10.0 {
            mantissa /= 10.0;
            exponent += 1;
        }
        while mantissa.abs() < 1.0 {
            mantissa *= 10.0;
            exponent -= 1;
        }
        SciFloat { mantissa, exponent }
    }

    /// Multiplies by `10^l`.
    pub fn mul_log10(self, l: f64) -> Self {
        if self.mantissa == 0.0 {
            return self;
        }
        let whole = l.floor();
        Self::normalize(
            self.mantissa * 10f64.powf(l - whole),
            self.exponent + whole as i32,
        )
    }

    /// Lossy conversion; overflows to infinity past `f64::MAX`.
    pub fn to_f64(self) -> f64 {
        self.mantissa * 10f64.powi(self.exponent)
    }

    /// `|self - exact| / exact`, evaluated on the mantissas so that neither
    /// value needs to fit a double.
    pub fn rel_err(self, exact: &BigUint) -> f64 {
        let e = SciFloat::from_big(exact);
        if e.mantissa == 0.0 {
            return if self.mantissa == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
        }
        let ratio = self.mantissa / e.mantissa * 10f64.powi(self.exponent - e.exponent);
        (ratio - 1.0).abs()
    }
}

impl fmt::Display for SciFloat {
    /// Nine significant digits, e.g. `6.79329879e14`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rounded = format!("{:.8}", self.mantissa);
        // rounding can carry into a tenth digit: 9.999999999 -> 10.00000000
        if rounded.trim_start_matches('-').starts_with("10") {
            write!(f, "{:.8}e{}", self.mantissa / 10.0, self.exponent + 1)
        } else {
            write!(f, "{}e{}", rounded, self.exponent)
        }
    }
}

impl Serialize for SciFloat {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_term_is_its_weight() {
        let t = [Term {
            lambda: 1.0,
            c: 0.25,
        }];
        for m in [1, 2, 17] {
            assert_eq!(series_sum(&t, m), 0.25);
        }
    }

    #[test]
    fn formatting() {
        assert_eq!(
            SciFloat::from_f64(6.79329879e14).to_string(),
            "6.79329879e14"
        );
        assert_eq!(SciFloat::from_f64(0.99379166).to_string(), "9.93791660e-1");
        assert_eq!(SciFloat::from_f64(9.9999999999).to_string(), "1.00000000e1");
        assert_eq!(SciFloat::from_f64(-250.0).to_string(), "-2.50000000e2");
    }

    #[test]
    fn big_values() {
        let n: BigUint = "679329771871725".parse().unwrap();
        let s = SciFloat::from_big(&n);
        assert_eq!(s.exponent, 14);
        assert!((s.mantissa - 6.79329771871725).abs() < 1e-14);
        let huge: BigUint = BigUint::from(10u32).pow(400) * 3u32;
        let s = SciFloat::from_big(&huge);
        assert_eq!((s.mantissa, s.exponent), (3.0, 400));
        assert!(
            SciFloat {
                mantissa: 3.0000003,
                exponent: 400
            }
            .rel_err(&huge)
                - 1e-7
                < 1e-12
        );
    }

    #[test]
    fn log_factorial_matches_direct_product() {
        assert!((10f64.powf(log10_factorial(10)) - 3_628_800.0).abs() < 1e-6);
        assert_eq!(log10_factorial(0), 0.0);
        assert_eq!(log10_factorial(1), 0.0);
        // 200! ≈ 7.8865786736e374
        let s = SciFloat::from_f64(1.0).mul_log10(log10_factorial(200));
        assert_eq!(s.exponent, 374);
        assert!((s.mantissa - 7.8865786736).abs() < 1e-8);
    }
}
