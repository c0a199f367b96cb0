//! Instance file format: a versioned JSON object.
//!
//! ```json
//! { "version": 1, "types": ["m1", "m2"], "categories": ["k1", "k2"],
//!   "prior": [0.5, 0.5], "prefs": [[0.95, 0.1], [0.79, 0.81]] }
//! ```
//!
//! Row index of `prefs` is the category, column index the type. `types` and `categories`
//! may be omitted, in which case the names default to `m1, m2, ...` and `k1, k2, ...`. Numbers are written in
//! shortest round-trip form, so reading a written file reproduces every double exactly.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Instance;

pub const FORMAT_VERSION: u32 = 1;

fn compact<T: Serialize + ?Sized>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    types: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    categories: Option<Vec<String>>,
    prior: Vec<f64>,
    prefs: Vec<Vec<f64>>,
}

impl Instance {
    /// Pretty-printed with one matrix row per line.
    pub fn to_json(&self) -> String {
        let rows: Vec<String> = self.rows().map(|r| format!("    {}", compact(r))).collect();
        format!(
            "{{\n  \"version\": {FORMAT_VERSION},\n  \"types\": {},\n  \"categories\": {},\n  \"prior\": {},\n  \"prefs\": [\n{}\n  ]\n}}\n",
            compact(self.type_names()),
            compact(self.category_names()),
            compact(self.prior()),
            rows.join(",\n")
        )
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        if file.version != FORMAT_VERSION {
            return Err(Error::InvalidInstance(format!(
                "unsupported format version {} (expected {FORMAT_VERSION})",
                file.version
            )));
        }
        let types = file
            .types
            .unwrap_or_else(|| (1..=file.prior.len()).map(|m| format!("m{m}")).collect());
        let categories = file
            .categories
            .unwrap_or_else(|| (1..=file.prefs.len()).map(|k| format!("k{k}")).collect());
        Instance::with_names(file.prior, file.prefs, types, categories)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
        Self::from_json(&text)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path.as_ref(), self.to_json())
            .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn round_trips_exactly() {
        let inst = fixtures::appendix(3).unwrap();
        let back = Instance::from_json(&inst.to_json()).unwrap();
        assert_eq!(back, inst);

        let odd = Instance::new(
            vec![1.0 / 3.0, 2.0 / 3.0],
            vec![vec![0.1 + 0.2, std::f64::consts::FRAC_1_PI]],
        )
        .unwrap();
        assert_eq!(Instance::from_json(&odd.to_json()).unwrap(), odd);
    }

    #[test]
    fn reports_parse_position() {
        let err = Instance::from_json("{\n  \"version\": 1,\n  \"types\": [oops]\n}").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_unknown_version() {
        let text = fixtures::example1().to_json().replace("\"version\": 1", "\"version\": 2");
        assert!(matches!(Instance::from_json(&text), Err(Error::InvalidInstance(_))));
    }

    #[test]
    fn validates_on_load() {
        let text = r#"{"version":1,"types":["a","b"],"categories":["x"],"prior":[0.5,0.5],"prefs":[[1.0,0.2]]}"#;
        assert!(matches!(Instance::from_json(text), Err(Error::InvalidInstance(_))));
    }
}
