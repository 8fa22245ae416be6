//! Hand-rolled JSON schema walking with pointer tracking, so configuration
//! errors name the offending key as a JSON pointer.

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub fn as_object<'a>(v: &'a Value, ptr: &str) -> CliResult<&'a Map<String, Value>> {
    v.as_object()
        .ok_or_else(|| CliError::config(ptr, "expected an object"))
}

pub fn as_array<'a>(v: &'a Value, ptr: &str) -> CliResult<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| CliError::config(ptr, "expected an array"))
}

pub fn as_f64(v: &Value, ptr: &str) -> CliResult<f64> {
    v.as_f64()
        .ok_or_else(|| CliError::config(ptr, "expected a number"))
}

pub fn as_usize(v: &Value, ptr: &str) -> CliResult<usize> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| CliError::config(ptr, "expected a nonnegative integer"))
}

pub fn as_str<'a>(v: &'a Value, ptr: &str) -> CliResult<&'a str> {
    v.as_str()
        .ok_or_else(|| CliError::config(ptr, "expected a string"))
}

pub fn required<'a>(map: &'a Map<String, Value>, key: &str, ptr: &str) -> CliResult<&'a Value> {
    map.get(key)
        .ok_or_else(|| CliError::config(format!("{ptr}/{key}"), "missing required key"))
}

/// Rejects keys outside the allowed set, pointing at the first offender.
pub fn reject_unknown(map: &Map<String, Value>, allowed: &[&str], ptr: &str) -> CliResult<()> {
    for key in map.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::config(
                format!("{ptr}/{key}"),
                "unknown key (scenario schema rejects unrecognized keys)",
            ));
        }
    }
    Ok(())
}

pub fn number_pair(v: &Value, ptr: &str) -> CliResult<(f64, f64)> {
    let arr = as_array(v, ptr)?;
    if arr.len() != 2 {
        return Err(CliError::config(ptr, "expected a pair of numbers"));
    }
    Ok((
        as_f64(&arr[0], &format!("{ptr}/0"))?,
        as_f64(&arr[1], &format!("{ptr}/1"))?,
    ))
}
