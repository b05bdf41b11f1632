//! Text-based particle registry.
//!
//! One record per block: a `[name]` header followed by `key = value` lines.
//! Keys are case-sensitive, `#` starts a comment (whole-line or trailing),
//! blank lines are ignored. `cp_epsilon_re` / `cp_epsilon_im` default to
//! zero when omitted; the other four keys are required.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::particle::{MesonParams, ParamError};
use crate::C64;

/// The registry shipped with the crate (`K0` and `Bs` presets).
pub const DEFAULT_REGISTRY: &str = include_str!("default_registry.reg");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegistryError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("entry '{entry}': {source}")]
    Invalid { entry: String, source: ParamError },
}

fn parse_err(line: usize, message: impl Into<String>) -> RegistryError {
    RegistryError::Parse {
        line,
        message: message.into(),
    }
}

struct PartialEntry {
    name: String,
    header_line: usize,
    gamma_mean: Option<f64>,
    gamma_split: Option<f64>,
    mass_split: Option<f64>,
    lifetime_unit: Option<f64>,
    cp_re: f64,
    cp_im: f64,
}

impl PartialEntry {
    fn new(name: String, header_line: usize) -> Self {
        PartialEntry {
            name,
            header_line,
            gamma_mean: None,
            gamma_split: None,
            mass_split: None,
            lifetime_unit: None,
            cp_re: 0.0,
            cp_im: 0.0,
        }
    }

    fn finish(self) -> Result<MesonParams, RegistryError> {
        let require = |v: Option<f64>, key: &str| {
            v.ok_or_else(|| {
                parse_err(
                    self.header_line,
                    format!("entry '{}' is missing key '{}'", self.name, key),
                )
            })
        };
        let params = MesonParams {
            name: self.name.clone(),
            gamma_mean: require(self.gamma_mean, "gamma_mean")?,
            gamma_split: require(self.gamma_split, "gamma_split")?,
            mass_split: require(self.mass_split, "mass_split")?,
            lifetime_unit: require(self.lifetime_unit, "lifetime_unit")?,
            cp_epsilon: C64::new(self.cp_re, self.cp_im),
        };
        params.validate().map_err(|source| RegistryError::Invalid {
            entry: self.name,
            source,
        })
    }
}

/// Parses registry text into a list of validated parameter records.
///
/// An empty (or comment-only) input yields an empty list.
pub fn parse_registry(text: &str) -> Result<Vec<MesonParams>, RegistryError> {
    let mut entries = Vec::new();
    let mut current: Option<PartialEntry> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| parse_err(lineno, "unterminated '[name]' header"))?
                .trim();
            if name.is_empty() {
                return Err(parse_err(lineno, "empty entry name"));
            }
            if let Some(entry) = current.take() {
                entries.push(entry.finish()?);
            }
            current = Some(PartialEntry::new(name.to_string(), lineno));
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| parse_err(lineno, "expected 'key = value'"))?;
        let entry = current
            .as_mut()
            .ok_or_else(|| parse_err(lineno, "'key = value' before any '[name]' header"))?;
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| parse_err(lineno, format!("invalid number '{}'", value.trim())))?;
        match key.trim() {
            "gamma_mean" => entry.gamma_mean = Some(value),
            "gamma_split" => entry.gamma_split = Some(value),
            "mass_split" => entry.mass_split = Some(value),
            "lifetime_unit" => entry.lifetime_unit = Some(value),
            "cp_epsilon_re" => entry.cp_re = value,
            "cp_epsilon_im" => entry.cp_im = value,
            other => return Err(parse_err(lineno, format!("unknown key '{}'", other))),
        }
    }
    if let Some(entry) = current.take() {
        entries.push(entry.finish()?);
    }
    Ok(entries)
}

/// Renders a list of parameter records back into registry text.
///
/// Values are printed with shortest round-trip precision, so
/// `parse_registry(&write_registry(&list))` reproduces `list` exactly.
pub fn write_registry(entries: &[MesonParams]) -> String {
    let mut out = String::new();
    for p in entries {
        let block = format!(
            "[{}]\ngamma_mean = {:e}\ngamma_split = {:e}\nmass_split = {:e}\nlifetime_unit = {:e}\ncp_epsilon_re = {:e}\ncp_epsilon_im = {:e}\n\n",
            p.name, p.gamma_mean, p.gamma_split, p.mass_split, p.lifetime_unit,
            p.cp_epsilon.re, p.cp_epsilon.im,
        );
        out.push_str(&block);
    }
    out
}

/// Looks up an entry by name.
pub fn find<'a>(entries: &'a [MesonParams], name: &str) -> Option<&'a MesonParams> {
    entries.iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_registry_has_presets() {
        let entries = parse_registry(DEFAULT_REGISTRY).unwrap();
        let k0 = find(&entries, "K0").expect("K0 preset");
        assert_eq!(k0.mass_split, 0.5293e10);
        assert_eq!(k0, &MesonParams::kaon());
        let bs = find(&entries, "Bs").expect("Bs preset");
        assert_eq!(bs.lifetime_unit, 1.470e-12);
        assert_eq!(bs, &MesonParams::b_s());
    }

    #[test]
    fn empty_input_is_empty_list() {
        assert_eq!(parse_registry("").unwrap(), vec![]);
        assert_eq!(parse_registry("# only comments\n\n").unwrap(), vec![]);
    }

    #[test]
    fn inline_comments_are_stripped() {
        let text = "[K] # kaon-like\ngamma_mean = 1e10 # width\ngamma_split = 0.0\nmass_split = 1e10\nlifetime_unit = 1e-10\n";
        let entries = parse_registry(text).unwrap();
        assert_eq!(entries.len(), 1);
        assert_eq!(entries[0].name, "K");
        assert_eq!(entries[0].gamma_mean, 1e10);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let err = parse_registry("[K]\ngamma_mean = oops\n").unwrap_err();
        assert_eq!(
            err,
            RegistryError::Parse {
                line: 2,
                message: "invalid number 'oops'".into()
            }
        );
        let err = parse_registry("gamma_mean = 1.0\n").unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 1, .. }));
        let err = parse_registry("[K]\nwidth = 1.0\n").unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 2, .. }));
    }

    #[test]
    fn validation_errors_carry_entry_name() {
        let text =
            "[bad]\ngamma_mean = 1.0\ngamma_split = 3.0\nmass_split = 1.0\nlifetime_unit = 1.0\n";
        let err = parse_registry(text).unwrap_err();
        assert_eq!(
            err,
            RegistryError::Invalid {
                entry: "bad".into(),
                source: ParamError::WidthPositivity
            }
        );
    }

    #[test]
    fn missing_key_is_reported() {
        let err = parse_registry("[K]\ngamma_mean = 1.0\n").unwrap_err();
        assert!(matches!(err, RegistryError::Parse { line: 1, .. }));
    }

    #[test]
    fn round_trip_preserves_entries() {
        let entries = parse_registry(DEFAULT_REGISTRY).unwrap();
        let text = write_registry(&entries);
        assert_eq!(parse_registry(&text).unwrap(), entries);

        // Random parameter sets survive the round trip as well.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut list = Vec::new();
        for i in 0..20 {
            let gamma: f64 = 10f64.powf(rng.random_range(6.0..13.0));
            let p = MesonParams {
                name: format!("p{i}"),
                gamma_mean: gamma,
                gamma_split: gamma * rng.random_range(-2.0..2.0),
                mass_split: gamma * rng.random_range(0.0..20.0),
                lifetime_unit: 1.0 / gamma,
                cp_epsilon: C64::new(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)),
            }
            .validate()
            .unwrap();
            list.push(p);
        }
        let text = write_registry(&list);
        assert_eq!(parse_registry(&text).unwrap(), list);
    }

    #[test]
    fn all_registry_widths_non_negative() {
        for p in parse_registry(DEFAULT_REGISTRY).unwrap() {
            let (gs, gl) = p.component_widths();
            assert!(gs >= 0.0 && gl >= 0.0, "{}: ({gs}, {gl})", p.name);
        }
    }
}
