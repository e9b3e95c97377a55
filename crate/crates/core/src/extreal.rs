//! JSON encoding for extended reals: finite values stay numbers, infinities
//! become the strings `"inf"` / `"-inf"` and NaN becomes `"nan"`.

use serde::Serializer;

pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

pub mod option {
    use serde::Serializer;

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => super::serialize(x, s),
            None => s.serialize_none(),
        }
    }
}

#[cfg(test)]
mod tests {
    use serde::Serialize;

    #[derive(Serialize)]
    struct Probe {
        #[serde(with = "super")]
        a: f64,
        #[serde(with = "super::option")]
        b: Option<f64>,
    }

    #[test]
    fn encodes_infinities_as_strings() {
        let j = serde_json::to_string(&Probe { a: f64::INFINITY, b: Some(1.5) }).unwrap();
        assert_eq!(j, r#"{"a":"inf","b":1.5}"#);
        let j = serde_json::to_string(&Probe { a: f64::NEG_INFINITY, b: None }).unwrap();
        assert_eq!(j, r#"{"a":"-inf","b":null}"#);
    }
}
