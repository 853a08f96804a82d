//! Rationals as `"p/q"` strings (plain `"p"` for integers).

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactla::Rational;

pub fn to_string(r: &Rational) -> String {
    r.to_string()
}

pub fn parse(s: &str) -> Result<Rational> {
    let bad = |message: String| Error::Parse {
        path: String::new(),
        message,
    };
    let s = s.trim();
    let r: Rational = s
        .parse()
        .map_err(|_| bad(format!("`{s}` is not a rational of the form p or p/q")))?;
    Ok(r)
}

/// One rational as a string, for element-level error paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Str(pub Rational);

impl Serialize for Str {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        to_string(&self.0).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Str {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).map(Str).map_err(|e| match e {
            Error::Parse { message, .. } => serde::de::Error::custom(message),
            e => serde::de::Error::custom(e),
        })
    }
}

pub mod vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        v.iter().map(to_string).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactla::{int, rat};

    #[test]
    fn parses_both_forms() {
        assert_eq!(parse("3").unwrap(), int(3));
        assert_eq!(parse(" -2/6 ").unwrap(), rat(-1, 3));
        assert_eq!(to_string(&rat(4, -6)), "-2/3");
        assert!(parse("1/0").is_err());
        assert!(parse("0.5").is_err());
    }
}
