//! JSON exchange format for spectral functions.
//!
//! ```json
//! {"max_degree": 2, "entries": [{"k": [1, -1, 0], "re": 0.5, "im": 0.0}]}
//! ```
//!
//! Unknown fields are rejected, as is any entry whose index does not sum to
//! zero or exceeds `max_degree`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{HexError, Result};
use crate::fourier::SpectralFunction;
use crate::lattice::HexIndex;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralFile {
    max_degree: u32,
    entries: Vec<Entry>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    k: [i64; 3],
    re: f64,
    im: f64,
}

pub fn from_json(text: &str) -> Result<SpectralFunction> {
    let file: SpectralFile =
        serde_json::from_str(text).map_err(|e| HexError::Format(e.to_string()))?;
    let mut f = SpectralFunction::new(file.max_degree);
    for (i, e) in file.entries.iter().enumerate() {
        let [k1, k2, k3] = e.k;
        let k = HexIndex::new(k1, k2, k3).map_err(|err| HexError::Format(format!("entry {i}: {err}")))?;
        f.insert(k, Complex64::new(e.re, e.im))
            .map_err(|err| HexError::Format(format!("entry {i}: {err}")))?;
    }
    Ok(f)
}

pub fn to_json(f: &SpectralFunction) -> String {
    let file = SpectralFile {
        max_degree: f.max_degree(),
        entries: f
            .iter()
            .map(|(k, c)| Entry {
                k: k.components(),
                re: c.re,
                im: c.im,
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("spectral file serializes")
}

pub fn read(path: &Path) -> Result<SpectralFunction> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| HexError::Format(format!("{}: {e}", path.display())))?;
    from_json(&text).map_err(|e| HexError::Format(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_off_plane_index() {
        let err = from_json(r#"{"max_degree": 2, "entries": [{"k": [1, 1, 0], "re": 1, "im": 0}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("(1, 1, 0)"), "{err}");
    }

    #[test]
    fn rejects_unknown_fields() {
        assert!(from_json(r#"{"max_degree": 1, "entries": [], "extra": 3}"#).is_err());
        assert!(from_json(r#"{"max_degree": 1, "entries": [{"k": [0,0,0], "re": 1, "im": 0, "w": 1}]}"#).is_err());
    }

    #[test]
    fn rejects_degree_above_max() {
        let err = from_json(r#"{"max_degree": 1, "entries": [{"k": [2, -1, -1], "re": 1, "im": 0}]}"#)
            .unwrap_err()
            .to_string();
        assert!(err.contains("(2, -1, -1)"), "{err}");
    }

    proptest! {
        #[test]
        fn json_roundtrip(entries in proptest::collection::vec((-6i64..6, -6i64..6, -1e3f64..1e3, -1e3f64..1e3), 0..20)) {
            let mut f = SpectralFunction::new(12);
            for (k1, k2, re, im) in entries {
                f.insert(HexIndex::from_pair(k1, k2), Complex64::new(re, im)).unwrap();
            }
            let back = from_json(&to_json(&f)).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
