//! Frequency vectors of cyclic words in a free group: the finite-level
//! frequency polytopes with exact rational arithmetic, realization of
//! rational points as cyclic words, Nielsen automorphisms with their
//! occurrence-transfer tables, and exact optimization of length-distortion
//! functionals (the conjugacy distortion extremes and the hyperbolicity
//! constant).

pub mod automorphism;
pub mod cli;
pub mod error;
pub mod optimize;
pub mod oracle;
pub mod polytope;
pub mod simplex;
pub mod words;

pub use error::{Error, Result};

/// Exact arbitrary-precision rational; no floating point is used anywhere.
pub type Rational = num_rational::BigRational;

/// Parsing and printing of exact rationals as `p/q` (or plain integers).
pub mod rational {
    use crate::error::{Error, Result};
    use crate::Rational;
    use num_bigint::BigInt;
    use num_traits::One;
    use std::str::FromStr;

    pub fn parse(text: &str) -> Result<Rational> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), Some(d.trim())),
            None => (text, None),
        };
        let numerator = BigInt::from_str(num)
            .map_err(|_| Error::Parse(format!("bad rational numerator {num:?}")))?;
        let denominator = match den {
            Some(d) => BigInt::from_str(d)
                .map_err(|_| Error::Parse(format!("bad rational denominator {d:?}")))?,
            None => BigInt::one(),
        };
        if denominator == BigInt::from(0) {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(Rational::new(numerator, denominator))
    }

    pub fn format(value: &Rational) -> String {
        if value.denom().is_one() {
            value.numer().to_string()
        } else {
            format!("{}/{}", value.numer(), value.denom())
        }
    }

    #[cfg(test)]
    mod tests {
        use super::*;

        #[test]
        fn round_trips() {
            for text in ["2/5", "-3/7", "4", "0", "123456789012345678901/7"] {
                let value = parse(text).unwrap();
                assert_eq!(parse(&format(&value)).unwrap(), value);
            }
            assert_eq!(format(&parse("4/2").unwrap()), "2");
            assert!(parse("1/0").is_err());
            assert!(parse("x").is_err());
        }
    }
}
