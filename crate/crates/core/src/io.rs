//! Tensor file formats.
//!
//! JSON: `{"order": k, "n": n, "entries": [f64, …]}`, row-major.
//! Binary: magic `TPVR`, `u32` order, `u32` n (little endian), then `n^k`
//! little-endian `f64` entries.

use std::path::Path;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const MAGIC: &[u8; 4] = b"TPVR";

pub fn to_json(t: &Tensor) -> String {
    json!({"order": t.order(), "n": t.n(), "entries": t.entries()}).to_string()
}

pub fn from_json(text: &str) -> Result<Tensor> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Malformed(e.to_string()))?;
    let header = |key: &str| -> Result<usize> {
        v.get(key)
            .and_then(Value::as_u64)
            .map(|x| x as usize)
            .ok_or_else(|| Error::Malformed(format!("missing or invalid {key:?}")))
    };
    let order = header("order")?;
    let n = header("n")?;
    let raw = v
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Malformed("missing \"entries\" array".into()))?;
    let mut entries = Vec::with_capacity(raw.len());
    for (index, e) in raw.iter().enumerate() {
        let x = match e {
            Value::Number(num) => num
                .as_f64()
                .ok_or_else(|| Error::Malformed(format!("entry {index} is not a float")))?,
            // JSON has no NaN/inf literals; accept their usual string spellings
            // only to reject them with a precise error.
            Value::String(s) => match s.trim().to_ascii_lowercase().as_str() {
                "nan" | "inf" | "+inf" | "-inf" | "infinity" | "-infinity" => return Err(Error::NonFinite { index }),
                _ => return Err(Error::Malformed(format!("entry {index} is a string"))),
            },
            _ => return Err(Error::Malformed(format!("entry {index} is not a number"))),
        };
        entries.push(x);
    }
    Tensor::new(order, n, entries)
}

pub fn to_binary(t: &Tensor) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * t.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(t.order() as u32).to_le_bytes());
    out.extend_from_slice(&(t.n() as u32).to_le_bytes());
    for v in t.entries() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn from_binary(bytes: &[u8]) -> Result<Tensor> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(Error::Malformed("missing TPVR header".into()));
    }
    let order = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let n = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let expected = n
        .checked_pow(order as u32)
        .ok_or_else(|| Error::Malformed("declared size overflows".into()))?;
    let payload = &bytes[12..];
    if payload.len() % 8 != 0 || payload.len() / 8 != expected {
        return Err(Error::LengthMismatch {
            expected,
            found: payload.len() / 8,
        });
    }
    let entries = payload
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Tensor::new(order, n, entries)
}

/// Reads either format, sniffing the binary magic.
pub fn read_tensor(path: &Path) -> Result<Tensor> {
    let bytes = std::fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        from_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|_| Error::Malformed("not UTF-8 JSON".into()))?;
        from_json(&text)
    }
}

pub fn write_tensor(path: &Path, t: &Tensor, binary: bool) -> Result<()> {
    if binary {
        std::fs::write(path, to_binary(t))?;
    } else {
        std::fs::write(path, to_json(t))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn diag_round_trips() {
        let d = Tensor::diagonal(3, 3);
        assert_eq!(from_json(&to_json(&d)).unwrap(), d);
        assert_eq!(from_binary(&to_binary(&d)).unwrap(), d);
    }

    #[test]
    fn truncated_payload_is_length_mismatch() {
        let bytes = to_binary(&Tensor::diagonal(3, 2));
        assert!(matches!(
            from_binary(&bytes[..bytes.len() - 8]),
            Err(Error::LengthMismatch { expected: 8, found: 7 })
        ));
        assert!(matches!(
            from_json(r#"{"order":2,"n":2,"entries":[1,2,3]}"#),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn nan_entry_rejected() {
        assert!(matches!(
            from_json(r#"{"order":1,"n":2,"entries":[1.0,"NaN"]}"#),
            Err(Error::NonFinite { index: 1 })
        ));
        let mut bytes = to_binary(&Tensor::filled(2, 2, 1.0));
        bytes[12..20].copy_from_slice(&f64::NAN.to_le_bytes());
        assert!(matches!(from_binary(&bytes), Err(Error::NonFinite { index: 0 })));
    }

    #[test]
    fn malformed_headers() {
        assert!(matches!(from_binary(b"XXXX\0\0\0\0"), Err(Error::Malformed(_))));
        assert!(matches!(from_json(r#"{"n":2,"entries":[]}"#), Err(Error::Malformed(_))));
        assert!(matches!(from_json("not json"), Err(Error::Malformed(_))));
    }

    proptest! {
        #[test]
        fn round_trip_both_formats(order in 1usize..4, n in 1usize..4, seed in any::<u64>()) {
            let t = crate::sampling::sample_gaussian_tensor(order, n, seed);
            prop_assert_eq!(&from_json(&to_json(&t)).unwrap(), &t);
            prop_assert_eq!(&from_binary(&to_binary(&t)).unwrap(), &t);
        }
    }
}
