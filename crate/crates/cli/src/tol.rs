//! Tolerance overrides from `KRANGE_TOL` and `--tol key=value` flags.

use krange::Tolerances;
use serde::ser::{Serialize, SerializeMap, Serializer};

use crate::CliError;

pub const ENV_VAR: &str = "KRANGE_TOL";

pub fn parse_assignment(text: &str) -> Result<(String, f64), CliError> {
    let (key, value) = text
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("tolerance override `{text}` is not key=value")))?;
    let key = key.trim();
    let value: f64 = value.trim().parse().map_err(|_| {
        CliError::Usage(format!("tolerance `{key}` has non-numeric value `{value}`"))
    })?;
    if !(value.is_finite() && value >= 0.0) {
        return Err(CliError::Usage(format!(
            "tolerance `{key}` must be finite and nonnegative"
        )));
    }
    if Tolerances::default().get(key).is_none() {
        return Err(CliError::Usage(format!(
            "unknown tolerance `{key}` (known: {})",
            Tolerances::KEYS.join(", ")
        )));
    }
    Ok((key.to_string(), value))
}

/// Defaults, then the comma-separated environment list, then flags.
pub fn resolve(env: Option<&str>, flags: &[String]) -> Result<Tolerances, CliError> {
    let mut tol = Tolerances::default();
    let env_items = env
        .into_iter()
        .flat_map(|s| s.split(','))
        .map(str::trim)
        .filter(|s| !s.is_empty());
    for item in env_items.chain(flags.iter().map(String::as_str)) {
        let (key, value) = parse_assignment(item)?;
        tol.set(&key, value);
    }
    Ok(tol)
}

/// Serializes tolerances as an object in `Tolerances::KEYS` order.
pub struct TolView<'a>(pub &'a Tolerances);

impl Serialize for TolView<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(Tolerances::KEYS.len()))?;
        for key in Tolerances::KEYS {
            map.serialize_entry(key, &self.0.get(key))?;
        }
        map.end()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_environment() {
        let tol = resolve(Some("residual=1e-6, norm=1e-5"), &["residual=1e-4".into()]).unwrap();
        assert_eq!(tol.residual, 1e-4);
        assert_eq!(tol.norm, 1e-5);
        assert_eq!(tol.psd, Tolerances::default().psd);
    }

    #[test]
    fn rejects_unknown_and_malformed() {
        assert!(resolve(None, &["bogus=1".into()]).is_err());
        assert!(resolve(None, &["residual".into()]).is_err());
        assert!(resolve(None, &["residual=abc".into()]).is_err());
        assert!(resolve(None, &["residual=-1".into()]).is_err());
        assert!(resolve(Some(""), &[]).is_ok());
    }
}
