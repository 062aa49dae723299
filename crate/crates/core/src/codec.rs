//! JSON encoding of scalars.
//!
//! ```text
//! "zero"
//! {"re": "p/q", "im": "p/q"}
//! {"rou": [{"coef": ["p/q", "p/q"], "exp": "a/b"}, ...]}
//! ```
//!
//! Readers additionally accept JSON numbers wherever a rational string is
//! expected; floats are converted exactly.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

use crate::scalar::{format_rational, parse_rational, reduced_exponent, Rational, Scalar};

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        scalar_to_json(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        scalar_from_json(&v).map_err(D::Error::custom)
    }
}

pub fn scalar_to_json(z: &Scalar) -> Value {
    if z.is_zero() {
        return json!("zero");
    }
    if let Some(r) = z.as_rational() {
        return json!({"re": format_rational(r), "im": "0"});
    }
    if z.conductor() == 4 {
        let c = z.coefficients();
        return json!({"re": format_rational(&c[0]), "im": format_rational(&c[1])});
    }
    let terms: Vec<Value> = z
        .terms()
        .map(|(c, j)| {
            let (a, b) = reduced_exponent(j as i64, z.conductor());
            json!({"coef": [format_rational(c), "0"], "exp": format!("{a}/{b}")})
        })
        .collect();
    json!({ "rou": terms })
}

fn rational_field(v: &Value) -> Result<Rational, String> {
    match v {
        Value::String(s) => parse_rational(s).ok_or_else(|| format!("bad rational {s:?}")),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rational::from_integer(i.into()))
            } else {
                let x = n.as_f64().ok_or("bad number")?;
                Rational::from_float(x).ok_or_else(|| format!("non-finite number {x}"))
            }
        }
        other => Err(format!("expected rational, got {other}")),
    }
}

pub fn scalar_from_json(v: &Value) -> Result<Scalar, String> {
    match v {
        Value::String(s) if s == "zero" => Ok(Scalar::zero()),
        Value::String(_) | Value::Number(_) => Ok(Scalar::from_rational(rational_field(v)?)),
        Value::Object(map) => {
            if let Some(terms) = map.get("rou") {
                let terms = terms.as_array().ok_or("\"rou\" must be an array")?;
                let mut acc = Scalar::zero();
                for t in terms {
                    let coef = t.get("coef").and_then(Value::as_array).ok_or("term needs \"coef\" pair")?;
                    if coef.len() != 2 {
                        return Err("\"coef\" must have two entries".into());
                    }
                    let c = Scalar::gaussian(rational_field(&coef[0])?, rational_field(&coef[1])?);
                    let exp = t.get("exp").and_then(Value::as_str).ok_or("term needs \"exp\"")?;
                    let (a, b) = exp.split_once('/').ok_or_else(|| format!("bad exponent {exp:?}"))?;
                    let a: i64 = a.trim().parse().map_err(|_| format!("bad exponent {exp:?}"))?;
                    let b: u32 = b.trim().parse().map_err(|_| format!("bad exponent {exp:?}"))?;
                    if b == 0 || b > crate::scalar::MAX_CONDUCTOR {
                        return Err(format!("exponent denominator out of range in {exp:?}"));
                    }
                    acc = acc + c * Scalar::root_of_unity(a, b);
                }
                return Ok(acc);
            }
            let re = map.get("re").map(rational_field).transpose()?.unwrap_or_default();
            let im = map.get("im").map(rational_field).transpose()?.unwrap_or_default();
            if !map.contains_key("re") && !map.contains_key("im") {
                return Err("scalar object needs \"re\"/\"im\" or \"rou\"".into());
            }
            Ok(Scalar::gaussian(re, im))
        }
        other => Err(format!("cannot read scalar from {other}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn encodes_three_forms() {
        assert_eq!(scalar_to_json(&Scalar::zero()), json!("zero"));
        assert_eq!(scalar_to_json(&Scalar::ratio(-1, 2)), json!({"re": "-1/2", "im": "0"}));
        assert_eq!(scalar_to_json(&Scalar::i()), json!({"re": "0", "im": "1"}));
        let w = Scalar::root_of_unity(1, 3);
        assert_eq!(
            scalar_to_json(&w),
            json!({"rou": [{"coef": ["1", "0"], "exp": "1/3"}]})
        );
    }

    #[test]
    fn decodes_mixed_rou_terms() {
        let v = json!({"rou": [{"coef": ["1/2", "0"], "exp": "1/3"}, {"coef": ["-1/2", "0"], "exp": "2/3"}]});
        let z = scalar_from_json(&v).unwrap();
        // (ω - ω²)/2 = i√3/2
        assert!((z.to_complex().im - 3f64.sqrt() / 2.0).abs() < 1e-14);
        let back = scalar_from_json(&scalar_to_json(&z)).unwrap();
        assert_eq!(back, z);
        assert_eq!(scalar_from_json(&json!(0.25)).unwrap(), Scalar::ratio(1, 4));
        assert!(scalar_from_json(&json!({"foo": 1})).is_err());
    }
}
