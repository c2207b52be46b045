//! Unit-suffixed parsing for dimensionful config fields.
//!
//! Durations take ns/us/µs/ms/s, frequencies Hz/kHz/MHz/GHz (cyclic; callers
//! convert to angular), and rates a trailing `/s`. Bare numbers are rejected
//! for dimensionful fields so a value can never be silently misread.

use crate::error::{CliError, CliErrorKind};

fn split_suffix<'a>(input: &'a str, field: &str) -> Result<(f64, &'a str), CliError> {
    let trimmed = input.trim();
    let split = trimmed
        .char_indices()
        .find(|(_, c)| !(c.is_ascii_digit() || matches!(c, '.' | '+' | '-' | 'e' | 'E')))
        .map(|(i, _)| i)
        .unwrap_or(trimmed.len());
    let (number, suffix) = trimmed.split_at(split);
    let value: f64 = number.parse().map_err(|_| {
        CliError::new(CliErrorKind::Config, format!("{field}: cannot parse number in {input:?}"))
    })?;
    Ok((value, suffix.trim()))
}

/// Parse a duration into seconds. Accepts `inf` for fields that allow it.
pub fn parse_duration(input: &str, field: &str) -> Result<f64, CliError> {
    let trimmed = input.trim();
    if trimmed.eq_ignore_ascii_case("inf") || trimmed.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    let (value, suffix) = split_suffix(trimmed, field)?;
    let scale = match suffix {
        "ns" => 1e-9,
        "us" | "µs" => 1e-6,
        "ms" => 1e-3,
        "s" => 1.0,
        "" => {
            return Err(CliError::new(
                CliErrorKind::Config,
                format!("{field}: duration {input:?} needs a unit suffix (ns/us/ms/s)"),
            ))
        }
        other => {
            return Err(CliError::new(
                CliErrorKind::Config,
                format!("{field}: unknown duration unit {other:?}"),
            ))
        }
    };
    Ok(value * scale)
}

/// Parse a cyclic frequency into Hz. `"0"` is accepted without a unit.
pub fn parse_frequency(input: &str, field: &str) -> Result<f64, CliError> {
    let (value, suffix) = split_suffix(input, field)?;
    let scale = match suffix {
        "Hz" => 1.0,
        "kHz" => 1e3,
        "MHz" => 1e6,
        "GHz" => 1e9,
        "" if value == 0.0 => 1.0,
        "" => {
            return Err(CliError::new(
                CliErrorKind::Config,
                format!("{field}: frequency {input:?} needs a unit suffix (Hz/kHz/MHz/GHz)"),
            ))
        }
        other => {
            return Err(CliError::new(
                CliErrorKind::Config,
                format!("{field}: unknown frequency unit {other:?}"),
            ))
        }
    };
    Ok(value * scale)
}

/// Parse a rate with a `/s` suffix into s⁻¹. `"0"` is accepted bare.
pub fn parse_rate(input: &str, field: &str) -> Result<f64, CliError> {
    let (value, suffix) = split_suffix(input, field)?;
    match suffix {
        "/s" => Ok(value),
        "" if value == 0.0 => Ok(0.0),
        _ => Err(CliError::new(
            CliErrorKind::Config,
            format!("{field}: rate {input:?} needs the /s suffix"),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-15 * b.abs()
    }

    #[test]
    fn durations() {
        assert!(close(parse_duration("400ns", "dt").unwrap(), 400e-9));
        assert!(close(parse_duration("1.28us", "tau").unwrap(), 1.28e-6));
        assert!(close(parse_duration("1.28µs", "tau").unwrap(), 1.28e-6));
        assert!(close(parse_duration("20us", "t2star").unwrap(), 20e-6));
        assert!(close(parse_duration("2ms", "t").unwrap(), 2e-3));
        assert_eq!(parse_duration("inf", "t2star").unwrap(), f64::INFINITY);
        assert!(parse_duration("400", "dt").is_err()); // bare number rejected
        assert!(parse_duration("400min", "dt").is_err());
        assert!(parse_duration("abc", "dt").is_err());
    }

    #[test]
    fn frequencies() {
        assert!(close(parse_frequency("0.4MHz", "rabi").unwrap(), 0.4e6));
        assert!(close(parse_frequency("8MHz", "rabi").unwrap(), 8e6));
        assert!(close(parse_frequency("10kHz", "rabi").unwrap(), 1e4));
        assert_eq!(parse_frequency("0", "rabi").unwrap(), 0.0);
        assert!(parse_frequency("8", "rabi").is_err());
    }

    #[test]
    fn rates() {
        assert_eq!(parse_rate("1.3e6/s", "gamma").unwrap(), 1.3e6);
        assert_eq!(parse_rate("0", "gamma").unwrap(), 0.0);
        assert!(parse_rate("1.3e6", "gamma").is_err());
    }
}
