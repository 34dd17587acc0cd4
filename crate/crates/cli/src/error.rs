use serde::Serialize;

/// Failure of a command, rendered as a JSON object on stderr.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("schema error at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error(transparent)]
    Core(#[from] liouville_core::Error),
    #[error("cannot write output: {0}")]
    Output(String),
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<&'a str>,
}

#[derive(Serialize)]
struct ErrorObject<'a> {
    error: ErrorBody<'a>,
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Schema { .. } => "schema",
            CliError::Core(e) => e.kind(),
            CliError::Output(_) => "output",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(_) => 3,
            CliError::Output(_) => 4,
            _ => 2,
        }
    }

    pub fn to_json(&self) -> String {
        let path = match self {
            CliError::Schema { path, .. } | CliError::Io { path, .. } => Some(path.as_str()),
            _ => None,
        };
        let obj = ErrorObject {
            error: ErrorBody {
                kind: self.kind(),
                message: self.to_string(),
                path,
            },
        };
        serde_json::to_string(&obj).unwrap_or_else(|_| format!("{{\"error\":{{\"kind\":\"{}\"}}}}", self.kind()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape_and_codes() {
        let e = CliError::Schema {
            path: "profile_b.exponent".into(),
            message: "invalid type".into(),
        };
        let v: serde_json::Value = serde_json::from_str(&e.to_json()).unwrap();
        assert_eq!(v["error"]["kind"], "schema");
        assert_eq!(v["error"]["path"], "profile_b.exponent");
        assert_eq!(e.exit_code(), 2);
        let core = CliError::from(liouville_core::Error::NoCounterexample { nu: -1.0 });
        assert_eq!(core.kind(), "no_counterexample");
        assert_eq!(core.exit_code(), 3);
        assert_eq!(CliError::Output("disk".into()).exit_code(), 4);
    }
}
