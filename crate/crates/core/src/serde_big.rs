//! Serialize big integers as decimal strings so JSON consumers never lose
//! precision.

use num_bigint::{BigInt, BigUint};
use serde::Serializer;

pub fn bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn biguint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

pub fn opt_biguint<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

pub fn opt_bigint<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => s.serialize_str(&v.to_string()),
        None => s.serialize_none(),
    }
}

/// A map with vector keys becomes a list of `{"word": [...], "count": "..."}`.
pub fn word_counts<S: Serializer>(
    v: &std::collections::BTreeMap<Vec<usize>, BigUint>,
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::{SerializeMap, SerializeSeq};
    struct Entry<'a>(&'a [usize], &'a BigUint);
    impl serde::Serialize for Entry<'_> {
        fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            let mut m = s.serialize_map(Some(2))?;
            m.serialize_entry("word", self.0)?;
            m.serialize_entry("count", &self.1.to_string())?;
            m.end()
        }
    }
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for (w, c) in v {
        seq.serialize_element(&Entry(w, c))?;
    }
    seq.end()
}
