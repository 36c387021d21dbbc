//! Parsers for command-line values: complex amplitudes and policy specs.

use std::fmt;
use std::str::FromStr;

use qubit_track::{Complex, Family};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("expected `re,im`, got {0:?}")]
    ComplexShape(String),
    #[error("invalid number {0:?}")]
    Number(String),
    #[error("non-finite value {0:?}")]
    NonFinite(String),
    #[error("expected `fixed:re,im` or `adaptive:real|imag-large|imag-small`, got {0:?}")]
    PolicyShape(String),
    #[error("unknown adaptive family {0:?}; expected real, imag-large or imag-small")]
    UnknownFamily(String),
}

fn parse_finite(s: &str) -> Result<f64, ParseError> {
    let t = s.trim();
    let x: f64 = t.parse().map_err(|_| ParseError::Number(t.to_string()))?;
    if !x.is_finite() {
        return Err(ParseError::NonFinite(t.to_string()));
    }
    Ok(x)
}

/// Parses `re,im` into a complex number. Both parts are required.
pub fn parse_complex(s: &str) -> Result<Complex, ParseError> {
    let mut parts = s.split(',');
    match (parts.next(), parts.next(), parts.next()) {
        (Some(re), Some(im), None) => Ok(Complex::new(parse_finite(re)?, parse_finite(im)?)),
        _ => Err(ParseError::ComplexShape(s.to_string())),
    }
}

/// Monitoring policy as given on the command line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolicySpec {
    Fixed(Complex),
    Adaptive(Family),
}

impl FromStr for PolicySpec {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, rest) = s
            .split_once(':')
            .ok_or_else(|| ParseError::PolicyShape(s.to_string()))?;
        match kind {
            "fixed" => Ok(PolicySpec::Fixed(parse_complex(rest)?)),
            "adaptive" => match Family::from_name(rest) {
                Some(f @ (Family::Real | Family::ImagLarge | Family::ImagSmall)) => {
                    Ok(PolicySpec::Adaptive(f))
                }
                _ => Err(ParseError::UnknownFamily(rest.to_string())),
            },
            _ => Err(ParseError::PolicyShape(s.to_string())),
        }
    }
}

impl fmt::Display for PolicySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PolicySpec::Fixed(mu) => write!(f, "fixed:{},{}", mu.re, mu.im),
            PolicySpec::Adaptive(family) => write!(f, "adaptive:{family}"),
        }
    }
}

pub fn parse_policy(s: &str) -> Result<PolicySpec, ParseError> {
    s.parse()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn complex_examples() {
        assert_eq!(parse_complex("0.5,0").unwrap(), Complex::new(0.5, 0.0));
        assert_eq!(parse_complex("-1e-3, 2").unwrap(), Complex::new(-1e-3, 2.0));
        assert!(matches!(
            parse_complex("0.5"),
            Err(ParseError::ComplexShape(_))
        ));
        assert!(matches!(
            parse_complex("1,2,3"),
            Err(ParseError::ComplexShape(_))
        ));
        assert!(matches!(parse_complex("a,1"), Err(ParseError::Number(_))));
        assert!(matches!(
            parse_complex("inf,1"),
            Err(ParseError::NonFinite(_))
        ));
        assert!(matches!(
            parse_complex("NaN,1"),
            Err(ParseError::NonFinite(_))
        ));
    }

    #[test]
    fn policy_examples() {
        assert_eq!(
            parse_policy("fixed:0.5,0").unwrap(),
            PolicySpec::Fixed(Complex::new(0.5, 0.0))
        );
        assert_eq!(
            parse_policy("adaptive:imag-small").unwrap(),
            PolicySpec::Adaptive(Family::ImagSmall)
        );
        assert!(matches!(
            parse_policy("adaptive:imag-coincident"),
            Err(ParseError::UnknownFamily(_))
        ));
        assert!(matches!(
            parse_policy("adaptive:"),
            Err(ParseError::UnknownFamily(_))
        ));
        assert!(matches!(
            parse_policy("fixed0.5,0"),
            Err(ParseError::PolicyShape(_))
        ));
        assert!(matches!(
            parse_policy("random:1"),
            Err(ParseError::PolicyShape(_))
        ));
    }

    proptest! {
        #[test]
        fn policy_display_round_trips(re in -1e6f64..1e6, im in -1e6f64..1e6, fam in 0usize..3) {
            let specs = [
                PolicySpec::Fixed(Complex::new(re, im)),
                PolicySpec::Adaptive([Family::Real, Family::ImagLarge, Family::ImagSmall][fam]),
            ];
            for spec in specs {
                prop_assert_eq!(parse_policy(&spec.to_string()).unwrap(), spec);
            }
        }

        #[test]
        fn arbitrary_text_never_panics(s in ".{0,40}") {
            let _ = parse_policy(&s);
            let _ = parse_complex(&s);
        }
    }
}
