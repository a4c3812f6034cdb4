use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use ioncavity::{PureState, C64};
use serde::Serialize;

use crate::config::RunConfig;

/// Amplitudes smaller than this are left out of listings.
const AMPLITUDE_FLOOR: f64 = 1e-14;

#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a RunConfig,
    pub args: &'a serde_json::Value,
    pub within_tolerance: bool,
    pub result: T,
}

impl<'a, T: Serialize> Envelope<'a, T> {
    pub fn new(command: &'a str, config: &'a RunConfig, args: &'a serde_json::Value, within_tolerance: bool, result: T) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            args,
            within_tolerance,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Amplitude {
    pub state: String,
    pub re: f64,
    pub im: f64,
}

/// Non-negligible amplitudes of `psi`, labelled `"g,0;e,1;a=0"`.
pub fn amplitudes(psi: &PureState) -> Vec<Amplitude> {
    let cfg = psi.config();
    psi.amplitudes()
        .iter()
        .enumerate()
        .filter(|(_, a)| a.norm() > AMPLITUDE_FLOOR)
        .map(|(i, a)| Amplitude {
            state: cfg.label(i).map(|l| l.to_string()).unwrap_or_else(|_| i.to_string()),
            re: a.re,
            im: a.im,
        })
        .collect()
}

/// 17 significant digits, `.` decimal separator.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn complex(z: C64) -> String {
    let tidy = |x: f64| if x.abs() < 5e-7 { 0.0 } else { x };
    let z = C64::new(tidy(z.re), tidy(z.im));
    let im_sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{:+.6}{im_sign}{:.6}i", z.re, z.im.abs())
}

pub fn ket_text(psi: &PureState) -> String {
    let parts: Vec<String> =
        amplitudes(psi).iter().map(|a| format!("({}) |{}>", complex(C64::new(a.re, a.im)), a.state)).collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" ")
    }
}

/// CSV with the run envelope as a leading `#` comment line.
pub fn csv(header: &str, rows: &[Vec<String>], echo: &str) -> String {
    let mut out = format!("# {echo}\n{header}\n");
    for r in rows {
        out.push_str(&r.join(","));
        out.push('\n');
    }
    out
}

pub fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_keep_seventeen_digits() {
        let x = 0.1 + 0.2;
        let s = num(x);
        assert_eq!(s.parse::<f64>().unwrap(), x);
        assert_eq!(s, "3.0000000000000004e-1");
    }

    #[test]
    fn complex_formatting() {
        assert_eq!(complex(C64::new(0.5, -0.25)), "+0.500000-0.250000i");
    }
}
