//! Flat key=value parameter files.
//!
//! One `key = value` pair per line, `#` comments, keys spelled exactly like
//! the command-line flags. `p-dc` takes a comma-separated list. Every parse
//! problem is reported with its line number.

use std::path::Path;

/// Values read from a parameter file; `None` means the key was absent.
#[derive(Debug, Default, Clone)]
pub struct ConfigValues {
    pub alpha: Option<f64>,
    pub delta_nu: Option<f64>,
    pub d_pmd: Option<f64>,
    pub regime: Option<String>,
    pub p_inf: Option<f64>,
    pub decoherence_length: Option<f64>,
    pub p_dc: Option<Vec<f64>>,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub points: Option<usize>,
    pub log_scale: Option<bool>,
    pub clock_hz: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
    pub out: Option<String>,
    pub format: Option<String>,
}

pub fn load(path: &Path) -> Result<ConfigValues, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("{}: cannot read config: {e}", path.display()))?;
    parse(&text, &path.display().to_string())
}

fn parse(text: &str, origin: &str) -> Result<ConfigValues, String> {
    let mut cfg = ConfigValues::default();
    let mut seen: Vec<String> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let n = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("{origin}:{n}: expected 'key = value'"))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(format!("{origin}:{n}: empty value for '{key}'"));
        }
        if seen.iter().any(|k| k == key) {
            return Err(format!("{origin}:{n}: duplicate key '{key}'"));
        }
        seen.push(key.to_string());

        let bad = |e: String| format!("{origin}:{n}: key '{key}': {e}");
        match key {
            "alpha" => cfg.alpha = Some(parse_f64(value).map_err(bad)?),
            "delta-nu" => cfg.delta_nu = Some(parse_f64(value).map_err(bad)?),
            "d-pmd" => cfg.d_pmd = Some(parse_f64(value).map_err(bad)?),
            "regime" => cfg.regime = Some(value.to_string()),
            "p-inf" => cfg.p_inf = Some(parse_f64(value).map_err(bad)?),
            "L" => cfg.decoherence_length = Some(parse_f64(value).map_err(bad)?),
            "p-dc" => {
                let list: Result<Vec<f64>, String> =
                    value.split(',').map(|v| parse_f64(v.trim())).collect();
                cfg.p_dc = Some(list.map_err(bad)?);
            }
            "d-min" => cfg.d_min = Some(parse_f64(value).map_err(bad)?),
            "d-max" => cfg.d_max = Some(parse_f64(value).map_err(bad)?),
            "points" => {
                cfg.points = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "log-scale" => {
                cfg.log_scale = Some(
                    value
                        .parse()
                        .map_err(|e: std::str::ParseBoolError| bad(e.to_string()))?,
                )
            }
            "clock-hz" => cfg.clock_hz = Some(parse_f64(value).map_err(bad)?),
            "seed" => {
                cfg.seed = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "trials" => {
                cfg.trials = Some(
                    value
                        .parse()
                        .map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
                )
            }
            "out" => cfg.out = Some(value.to_string()),
            "format" => cfg.format = Some(value.to_string()),
            _ => return Err(format!("{origin}:{n}: unknown key '{key}'")),
        }
    }
    Ok(cfg)
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.parse::<f64>().map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_file() {
        let text = "\
# headline parameters
alpha = 0.2
delta-nu = 100
d-pmd = 0.1
regime = dephase
p-dc = 0, 1e-3, 1e-2
d-min = 1
d-max = 500
points = 200   # grid
log-scale = true
clock-hz = 1e9
seed = 7
";
        let cfg = parse(text, "test.cfg").unwrap();
        assert_eq!(cfg.alpha, Some(0.2));
        assert_eq!(cfg.p_dc.as_deref(), Some(&[0.0, 1e-3, 1e-2][..]));
        assert_eq!(cfg.points, Some(200));
        assert_eq!(cfg.log_scale, Some(true));
        assert_eq!(cfg.out, None);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse("alpha = 0.2\nbogus-key = 3\n", "x.cfg").unwrap_err();
        assert!(err.contains("x.cfg:2"), "{err}");
        let err = parse("\n\nalpha 0.2\n", "x.cfg").unwrap_err();
        assert!(err.contains("x.cfg:3"), "{err}");
        let err = parse("points = twelve\n", "x.cfg").unwrap_err();
        assert!(err.contains("x.cfg:1"), "{err}");
        let err = parse("alpha = 1\nalpha = 2\n", "x.cfg").unwrap_err();
        assert!(err.contains("duplicate"), "{err}");
    }
}
