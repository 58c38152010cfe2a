use serde::Serialize;

/// One named pass/fail check, with the offending value on failure.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            ok: true,
            detail: None,
        }
    }

    pub fn fail(name: impl Into<String>, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            ok: false,
            detail: Some(detail.into()),
        }
    }

    pub fn from_bool(name: impl Into<String>, ok: bool, detail: impl FnOnce() -> String) -> Self {
        if ok {
            Check::pass(name)
        } else {
            Check::fail(name, detail())
        }
    }

    /// Passes when there is no failure description.
    pub fn from_first_failure(name: impl Into<String>, failure: Option<String>) -> Self {
        match failure {
            None => Check::pass(name),
            Some(d) => Check::fail(name, d),
        }
    }
}

pub fn all_ok(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.ok)
}
