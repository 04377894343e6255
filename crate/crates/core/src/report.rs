//! Report values returned by the verification checks.

use serde::Serialize;

/// Outcome of a single named check, serializable as
/// `{"check":, "params":, "ok":, "first_failure":}`.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub check: String,
    pub params: serde_json::Value,
    pub ok: bool,
    pub first_failure: Option<String>,
}

impl Report {
    pub fn success(check: &str, params: serde_json::Value) -> Self {
        Report {
            check: check.to_string(),
            params,
            ok: true,
            first_failure: None,
        }
    }

    pub fn failure(check: &str, params: serde_json::Value, msg: String) -> Self {
        Report {
            check: check.to_string(),
            params,
            ok: false,
            first_failure: Some(msg),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serialization cannot fail")
    }
}
