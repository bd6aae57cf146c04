//! Parsers for command-line values: exact integers in scientific notation
//! and comma-separated lists.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty value")]
    Empty,
    #[error("invalid integer {0:?}")]
    Invalid(String),
    #[error("non-integral mantissa in {0:?}")]
    NonIntegral(String),
    #[error("negative exponent in {0:?}")]
    NegativeExponent(String),
    #[error("{0:?} does not fit in 64 bits")]
    Overflow(String),
    #[error("invalid real {0:?}")]
    InvalidReal(String),
    #[error("empty list")]
    EmptyList,
}

fn all_digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Parses a non-negative integer written plainly (`1000`) or in scientific
/// notation (`1e9`, `1E+12`, `2.0e3`). Fractional digits are allowed only
/// when they are all zero, and the exponent must be non-negative.
pub fn parse_count(input: &str) -> Result<u64, ParseError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    let invalid = || ParseError::Invalid(s.to_string());
    let overflow = || ParseError::Overflow(s.to_string());
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], Some(&s[i + 1..])),
        None => (s, None),
    };
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (mantissa, None),
    };
    if !all_digits(int_part) {
        return Err(invalid());
    }
    if let Some(f) = frac_part {
        if !all_digits(f) {
            return Err(invalid());
        }
        if f.bytes().any(|b| b != b'0') {
            return Err(ParseError::NonIntegral(s.to_string()));
        }
    }
    let exp: u32 = match exponent {
        None => 0,
        Some(e) => {
            let digits = match e.strip_prefix('+') {
                Some(d) => d,
                None if e.starts_with('-') => {
                    return Err(ParseError::NegativeExponent(s.to_string()))
                }
                None => e,
            };
            if !all_digits(digits) {
                return Err(invalid());
            }
            digits.parse().map_err(|_| overflow())?
        }
    };
    let base: u64 = int_part.parse().map_err(|_| overflow())?;
    if base == 0 {
        return Ok(0);
    }
    let scale = 10u64.checked_pow(exp).ok_or_else(overflow)?;
    base.checked_mul(scale).ok_or_else(overflow)
}

/// Splits on commas, trims each item and parses it. Empty items and an
/// empty list are errors.
pub fn parse_list<T, F>(input: &str, item: F) -> Result<Vec<T>, ParseError>
where
    F: Fn(&str) -> Result<T, ParseError>,
{
    if input.trim().is_empty() {
        return Err(ParseError::EmptyList);
    }
    input.split(',').map(|s| item(s.trim())).collect()
}

pub fn parse_count_list(input: &str) -> Result<Vec<u64>, ParseError> {
    parse_list(input, parse_count)
}

/// A finite real number.
pub fn parse_real(input: &str) -> Result<f64, ParseError> {
    let s = input.trim();
    if s.is_empty() {
        return Err(ParseError::Empty);
    }
    match s.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(ParseError::InvalidReal(s.to_string())),
    }
}

pub fn parse_real_list(input: &str) -> Result<Vec<f64>, ParseError> {
    parse_list(input, parse_real)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_and_scientific() {
        assert_eq!(parse_count("1000"), Ok(1000));
        assert_eq!(parse_count("1e9"), Ok(1_000_000_000));
        assert_eq!(parse_count("1E+12"), Ok(1_000_000_000_000));
        assert_eq!(parse_count("25e2"), Ok(2500));
        assert_eq!(parse_count("2.0e3"), Ok(2000));
        assert_eq!(parse_count(" 7 "), Ok(7));
        assert_eq!(parse_count("0e400"), Ok(0));
        assert_eq!(parse_count("18446744073709551615"), Ok(u64::MAX));
    }

    #[test]
    fn rejections() {
        assert_eq!(parse_count(""), Err(ParseError::Empty));
        assert!(matches!(
            parse_count("2.5e3"),
            Err(ParseError::NonIntegral(_))
        ));
        assert!(matches!(
            parse_count("1e-3"),
            Err(ParseError::NegativeExponent(_))
        ));
        assert!(matches!(parse_count("1e20"), Err(ParseError::Overflow(_))));
        assert!(matches!(
            parse_count("18446744073709551616"),
            Err(ParseError::Overflow(_))
        ));
        for bad in [
            "e9", "1e", "-5", "1.e3", ".5", "0x10", "1 000", "1e+-2", "ten",
        ] {
            assert!(parse_count(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn lists() {
        assert_eq!(
            parse_count_list("1e3,1e6, 1e9"),
            Ok(vec![1000, 1_000_000, 1_000_000_000])
        );
        assert_eq!(parse_count_list(""), Err(ParseError::EmptyList));
        assert!(parse_count_list("1,,2").is_err());
        assert_eq!(parse_real_list("1,0.5"), Ok(vec![1.0, 0.5]));
        assert!(parse_real_list("1,inf").is_err());
        assert!(parse_real_list("nan").is_err());
    }

    mod props {
        use super::super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn decimal_round_trip(n: u64) {
                prop_assert_eq!(parse_count(&n.to_string()), Ok(n));
            }

            #[test]
            fn scientific_matches_plain(m in 0u64..100_000, e in 0u32..15) {
                let expected = m.checked_mul(10u64.pow(e));
                let got = parse_count(&format!("{m}e{e}")).ok();
                prop_assert_eq!(got, expected);
            }

            #[test]
            fn never_panics(s in "\\PC*") {
                let _ = parse_count(&s);
                let _ = parse_real_list(&s);
            }
        }
    }
}
