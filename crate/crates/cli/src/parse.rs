//! Command-line value syntax.
//!
//! Angles: `0.3pi`, `pi`, `170deg` or plain radians. Lists: comma-separated
//! values, or `start:stop:count` for evenly spaced points with both ends
//! included.

use std::f64::consts::PI;

/// A parsed value together with the text used for column labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub value: f64,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParamList(pub Vec<Param>);

impl ParamList {
    pub fn values(&self) -> Vec<f64> {
        self.0.iter().map(|p| p.value).collect()
    }

    /// Text form written to output metadata.
    pub fn describe(&self) -> String {
        self.0.iter().map(|p| p.label.as_str()).collect::<Vec<_>>().join(",")
    }
}

fn finite(x: f64, s: &str) -> Result<f64, String> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("'{s}' is not a finite number"))
    }
}

pub fn parse_real(s: &str) -> Result<f64, String> {
    let t = s.trim();
    let x = t.parse::<f64>().map_err(|_| format!("'{t}' is not a number"))?;
    finite(x, t)
}

pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if let Some(head) = t.strip_suffix("deg") {
        return Ok(parse_real(head)?.to_radians());
    }
    if let Some(head) = t.strip_suffix("pi") {
        let factor = match head.trim() {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => parse_real(h.strip_suffix('*').unwrap_or(h))?,
        };
        return finite(factor * PI, t);
    }
    parse_real(t).map_err(|_| format!("'{t}' is not an angle (use e.g. 0.3pi, 170deg or radians)"))
}

fn parse_list(s: &str, item: fn(&str) -> Result<f64, String>) -> Result<ParamList, String> {
    let t = s.trim();
    if t.is_empty() {
        return Err("empty list".into());
    }
    let parts: Vec<&str> = t.split(':').collect();
    match parts.len() {
        1 => t
            .split(',')
            .map(|p| {
                Ok(Param {
                    value: item(p)?,
                    label: p.trim().to_string(),
                })
            })
            .collect::<Result<Vec<_>, String>>()
            .map(ParamList),
        3 => {
            let (a, b) = (item(parts[0])?, item(parts[1])?);
            let n: usize = parts[2]
                .trim()
                .parse()
                .map_err(|_| format!("'{}' is not a point count", parts[2]))?;
            if n < 2 {
                return Err(format!("range '{t}' needs at least 2 points"));
            }
            Ok(ParamList(
                (0..n)
                    .map(|k| {
                        let value = a + (b - a) * k as f64 / (n - 1) as f64;
                        Param {
                            value,
                            label: format!("{value}"),
                        }
                    })
                    .collect(),
            ))
        }
        _ => Err(format!("'{t}' is neither a list nor start:stop:count")),
    }
}

pub fn parse_angle_list(s: &str) -> Result<ParamList, String> {
    parse_list(s, parse_angle)
}

pub fn parse_real_list(s: &str) -> Result<ParamList, String> {
    parse_list(s, parse_real)
}
