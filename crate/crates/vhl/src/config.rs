//! Suite configuration: a small line-oriented `key = value` format.
//!
//! The grammar is deliberately self-contained so the parser is testable and
//! the artifact carries no configuration-format dependency:
//!
//! ```text
//! # comment
//! s_values = 0.6 0.75 0.9      # [suite] section is implicit at the top
//! sigma_values = 0.5, 1.0      # lists split on commas and whitespace
//!
//! [mesh]
//! n_cells = 1024
//! grading_beta = auto          # or a number >= 1
//!
//! [fit]
//! d_min = 1e-4
//! d_max = 1e-2
//! ```
//!
//! Unknown keys and sections are rejected with their line number; duplicate
//! keys are rejected with both line numbers.

use crate::error::Error;
use crate::geometry::KernelParams;
use crate::Result;
use std::collections::HashMap;
use std::path::PathBuf;

/// All experiments the suite knows how to run, in execution order.
pub const ALL_EXPERIMENTS: [&str; 9] = [
    "a_constant",
    "oracle",
    "harmonic",
    "scaling",
    "solve",
    "exponent",
    "comparability",
    "barrier",
    "oscillation",
];

/// Validated suite configuration with defaults filled in.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub s_values: Vec<f64>,
    pub sigma_values: Vec<f64>,
    pub dimensions: Vec<usize>,
    pub n_cells: usize,
    /// `None` selects the automatic grading `min(2/(2s-1), 6)`.
    pub grading_beta: Option<f64>,
    pub fit_window: (f64, f64),
    pub seed: u64,
    pub output_dir: PathBuf,
    pub experiments: Vec<String>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            s_values: vec![0.6, 0.75, 0.9],
            sigma_values: vec![0.5, 1.0],
            dimensions: vec![1, 2, 3],
            n_cells: 1024,
            grading_beta: None,
            fit_window: (1e-4, 1e-2),
            seed: 42,
            output_dir: PathBuf::from("out"),
            experiments: ALL_EXPERIMENTS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

fn parse_list_f64(value: &str, line: usize, key: &str) -> Result<Vec<f64>> {
    let items: Vec<&str> = value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    if items.is_empty() {
        return Err(Error::Config {
            line,
            message: format!("key `{key}` needs at least one value"),
        });
    }
    items
        .iter()
        .map(|t| {
            t.parse::<f64>().map_err(|_| Error::Config {
                line,
                message: format!("cannot parse `{t}` as a number for key `{key}`"),
            })
        })
        .collect()
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<SuiteConfig> {
    // First pass: collect (section, key) -> (line, value), rejecting
    // duplicates and unknown names.
    let mut seen: HashMap<(String, String), (usize, String)> = HashMap::new();
    let mut section = "suite".to_string();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let content = content.trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or(Error::Config {
                line,
                message: "unterminated section header".into(),
            })?;
            match name {
                "suite" | "mesh" | "fit" => section = name.to_string(),
                other => {
                    return Err(Error::Config {
                        line,
                        message: format!("unknown section `[{other}]`"),
                    })
                }
            }
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(Error::Config {
            line,
            message: format!("expected `key = value`, got `{content}`"),
        })?;
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        let known = match section.as_str() {
            "suite" => matches!(
                key.as_str(),
                "s_values" | "sigma_values" | "dimensions" | "seed" | "output_dir" | "experiments"
            ),
            "mesh" => matches!(key.as_str(), "n_cells" | "grading_beta"),
            "fit" => matches!(key.as_str(), "d_min" | "d_max"),
            _ => unreachable!(),
        };
        if !known {
            return Err(Error::Config {
                line,
                message: format!("unknown key `{key}` in section `[{section}]`"),
            });
        }
        if let Some((first_line, _)) = seen.get(&(section.clone(), key.clone())) {
            return Err(Error::Config {
                line,
                message: format!("duplicate key `{key}` (lines {first_line} and {line})"),
            });
        }
        seen.insert((section.clone(), key.clone()), (line, value));
    }

    let mut cfg = SuiteConfig::default();
    let take = |seen: &HashMap<(String, String), (usize, String)>, sec: &str, key: &str| {
        seen.get(&(sec.to_string(), key.to_string())).cloned()
    };

    if let Some((line, v)) = take(&seen, "suite", "s_values") {
        cfg.s_values = parse_list_f64(&v, line, "s_values")?;
        for &s in &cfg.s_values {
            if !(s > 0.5 && s < 1.0) {
                return Err(Error::Config {
                    line,
                    message: format!("s must lie in (1/2,1), got {s}"),
                });
            }
        }
    }
    if let Some((line, v)) = take(&seen, "suite", "sigma_values") {
        cfg.sigma_values = parse_list_f64(&v, line, "sigma_values")?;
        for &sg in &cfg.sigma_values {
            if !(sg > 0.0 && sg <= 1.0) {
                return Err(Error::Config {
                    line,
                    message: format!("sigma must lie in (0,1], got {sg}"),
                });
            }
        }
    }
    // Every (s, sigma) combination must form valid kernel parameters.
    for &s in &cfg.s_values {
        for &sg in &cfg.sigma_values {
            if let Err(e) = KernelParams::new(s, sg) {
                return Err(Error::Config {
                    line: 0,
                    message: e.to_string(),
                });
            }
        }
    }
    if let Some((line, v)) = take(&seen, "suite", "dimensions") {
        let dims = parse_list_f64(&v, line, "dimensions")?;
        cfg.dimensions = dims
            .iter()
            .map(|d| {
                if *d >= 1.0 && d.fract() == 0.0 {
                    Ok(*d as usize)
                } else {
                    Err(Error::Config {
                        line,
                        message: format!("dimensions must be integers >= 1, got {d}"),
                    })
                }
            })
            .collect::<Result<_>>()?;
    }
    if let Some((line, v)) = take(&seen, "suite", "seed") {
        cfg.seed = v.parse().map_err(|_| Error::Config {
            line,
            message: format!("cannot parse `{v}` as a seed"),
        })?;
    }
    if let Some((_, v)) = take(&seen, "suite", "output_dir") {
        cfg.output_dir = PathBuf::from(v);
    }
    if let Some((line, v)) = take(&seen, "suite", "experiments") {
        let names: Vec<String> = v
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.to_string())
            .collect();
        for name in &names {
            if !ALL_EXPERIMENTS.contains(&name.as_str()) {
                return Err(Error::Config {
                    line,
                    message: format!(
                        "unknown experiment `{name}` (known: {})",
                        ALL_EXPERIMENTS.join(", ")
                    ),
                });
            }
        }
        cfg.experiments = names;
    }
    if let Some((line, v)) = take(&seen, "mesh", "n_cells") {
        cfg.n_cells = v.parse().map_err(|_| Error::Config {
            line,
            message: format!("cannot parse `{v}` as a cell count"),
        })?;
        if cfg.n_cells < 8 || cfg.n_cells % 2 != 0 {
            return Err(Error::Config {
                line,
                message: format!("n_cells must be even and at least 8, got {}", cfg.n_cells),
            });
        }
    }
    if let Some((line, v)) = take(&seen, "mesh", "grading_beta") {
        if v == "auto" {
            cfg.grading_beta = None;
        } else {
            let beta: f64 = v.parse().map_err(|_| Error::Config {
                line,
                message: format!("grading_beta must be a number or `auto`, got `{v}`"),
            })?;
            if !(beta >= 1.0) {
                return Err(Error::Config {
                    line,
                    message: format!("grading_beta must be at least 1, got {beta}"),
                });
            }
            cfg.grading_beta = Some(beta);
        }
    }
    let mut window = cfg.fit_window;
    if let Some((line, v)) = take(&seen, "fit", "d_min") {
        window.0 = v.parse().map_err(|_| Error::Config {
            line,
            message: format!("cannot parse `{v}` as d_min"),
        })?;
    }
    if let Some((line, v)) = take(&seen, "fit", "d_max") {
        window.1 = v.parse().map_err(|_| Error::Config {
            line,
            message: format!("cannot parse `{v}` as d_max"),
        })?;
    }
    if !(window.0 > 0.0 && window.0 < window.1 && window.1 <= 0.25) {
        let line = take(&seen, "fit", "d_min")
            .or_else(|| take(&seen, "fit", "d_max"))
            .map(|(l, _)| l)
            .unwrap_or(0);
        return Err(Error::Config {
            line,
            message: format!(
                "fit window needs 0 < d_min < d_max <= 1/4, got ({}, {})",
                window.0, window.1
            ),
        });
    }
    cfg.fit_window = window;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_documented_defaults() {
        let cfg = parse_config("s_values = 0.75").unwrap();
        assert_eq!(cfg.s_values, vec![0.75]);
        assert_eq!(cfg.sigma_values, vec![0.5, 1.0]);
        assert_eq!(cfg.n_cells, 1024);
        assert!(cfg.grading_beta.is_none());
        assert_eq!(cfg.seed, 42);
        assert_eq!(cfg.fit_window, (1e-4, 1e-2));
        assert_eq!(cfg.experiments.len(), ALL_EXPERIMENTS.len());
    }

    #[test]
    fn out_of_range_s_is_rejected_with_line() {
        let err = parse_config("# leading comment\ns_values = 0.4").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2"), "{msg}");
        assert!(msg.contains("s must lie in (1/2,1)"), "{msg}");
    }

    #[test]
    fn duplicate_key_reports_both_lines() {
        let err = parse_config("seed = 1\nseed = 2").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("lines 1 and 2"), "{msg}");
    }

    #[test]
    fn unknown_key_and_section_are_rejected() {
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("[bogus]\nn_cells = 16").is_err());
        // Keys are scoped: mesh keys cannot appear in [suite].
        assert!(parse_config("n_cells = 16").is_err());
    }

    #[test]
    fn sections_route_keys() {
        let cfg = parse_config(
            "s_values = 0.75\n[mesh]\nn_cells = 64\ngrading_beta = 2.5\n[fit]\nd_min = 1e-3\nd_max = 1e-1",
        )
        .unwrap();
        assert_eq!(cfg.n_cells, 64);
        assert_eq!(cfg.grading_beta, Some(2.5));
        assert_eq!(cfg.fit_window, (1e-3, 1e-1));
    }

    #[test]
    fn invalid_mesh_and_window_are_rejected() {
        assert!(parse_config("[mesh]\nn_cells = 15").is_err());
        assert!(parse_config("[mesh]\ngrading_beta = 0.5").is_err());
        assert!(parse_config("[fit]\nd_min = 0.2\nd_max = 0.1").is_err());
        assert!(parse_config("[fit]\nd_min = 1e-3\nd_max = 0.3").is_err());
    }

    #[test]
    fn experiment_names_are_validated() {
        assert!(parse_config("experiments = exponent, oracle").is_ok());
        assert!(parse_config("experiments = warp_drive").is_err());
    }

    #[test]
    fn comments_and_blank_lines_are_ignored() {
        let cfg = parse_config("\n# full comment\ns_values = 0.8  # trailing\n\n").unwrap();
        assert_eq!(cfg.s_values, vec![0.8]);
    }
}
