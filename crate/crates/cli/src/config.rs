//! JSON config files and flag/config/default resolution.
//!
//! Precedence: command-line flags override config-file values, which
//! override built-in defaults.

use serde_json::Value;
use std::path::Path;

use crate::AppError;

#[derive(Default)]
pub struct ConfigFile(Value);

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, AppError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| AppError::config(format!("cannot read config {}: {e}", path.display())))?;
        let value: Value = serde_json::from_str(&text).map_err(|e| {
            AppError::config(format!(
                "config {} line {} column {}: {}",
                path.display(),
                e.line(),
                e.column(),
                e
            ))
        })?;
        if !value.is_object() {
            return Err(AppError::config(format!(
                "config {} must hold a JSON object",
                path.display()
            )));
        }
        Ok(Self(value))
    }

    pub fn f64(&self, key: &str) -> Result<Option<f64>, AppError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_f64()
                .map(Some)
                .ok_or_else(|| AppError::config(format!("config field '{key}' must be a number"))),
        }
    }

    pub fn u64(&self, key: &str) -> Result<Option<u64>, AppError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| {
                    AppError::config(format!("config field '{key}' must be a non-negative integer"))
                }),
        }
    }

    pub fn usize(&self, key: &str) -> Result<Option<usize>, AppError> {
        Ok(self.u64(key)?.map(|v| v as usize))
    }

    pub fn string(&self, key: &str) -> Result<Option<String>, AppError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => v
                .as_str()
                .map(|s| Some(s.to_string()))
                .ok_or_else(|| AppError::config(format!("config field '{key}' must be a string"))),
        }
    }

    pub fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, AppError> {
        match self.0.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::Array(items)) => items
                .iter()
                .map(|v| {
                    v.as_f64().ok_or_else(|| {
                        AppError::config(format!("config field '{key}' must hold numbers"))
                    })
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Some),
            Some(_) => Err(AppError::config(format!(
                "config field '{key}' must be an array of numbers"
            ))),
        }
    }
}

/// Flag value, else config value, else default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}

/// Flag value, else config value, else `None`.
pub fn pick_opt<T>(flag: Option<T>, config: Option<T>) -> Option<T> {
    flag.or(config)
}
