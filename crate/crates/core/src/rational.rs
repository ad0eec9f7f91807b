//! Exact rationals and their canonical `p/q` text form.

use num_rational::Ratio;
use num_traits::{Signed, Zero};

/// Exact rational used for every d-invariant value.
pub type Q = Ratio<i64>;

/// Render as `+p/q`, `-p/q` or `0/1`, always in lowest terms.
pub fn fmt_q(q: &Q) -> String {
    let r = q.reduced();
    if r.is_zero() {
        "0/1".to_string()
    } else if r.is_negative() {
        format!("-{}/{}", r.numer().abs(), r.denom())
    } else {
        format!("+{}/{}", r.numer(), r.denom())
    }
}

/// Parse the output of [`fmt_q`] (a bare integer is also accepted).
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    let s = s.strip_prefix('+').unwrap_or(s);
    match s.split_once('/') {
        Some((p, q)) => {
            let p: i64 = p.trim().parse().ok()?;
            let q: i64 = q.trim().parse().ok()?;
            if q == 0 {
                return None;
            }
            Some(Q::new(p, q))
        }
        None => s.parse::<i64>().ok().map(Q::from_integer),
    }
}

/// Serde adapter writing rationals through [`fmt_q`].
pub mod serde_q {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let s = String::deserialize(d)?;
        parse_q(&s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}")))
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod serde_q_vec {
    use super::{fmt_q, parse_q, Q};
    use serde::{de::Error, ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[Q], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for q in v {
            seq.serialize_element(&fmt_q(q))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_q(s).ok_or_else(|| D::Error::custom(format!("bad rational {s:?}"))))
            .collect()
    }
}
