//! Flat `key = value` run configuration, merged with command-line overrides.

use std::collections::BTreeMap;
use std::fmt;

use mht_core::basins::Window;
use mht_core::model::{DimParams, GrowthLaw, NondimParams};

/// Failure classes, mapped onto process exit codes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    Invalid(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<mht_core::Error> for CliError {
    fn from(e: mht_core::Error) -> Self {
        match e {
            mht_core::Error::InvalidParams(_) => CliError::Invalid(e.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn invalid<T>(msg: impl Into<String>) -> CliResult<T> {
    Err(CliError::Invalid(msg.into()))
}

const NONDIM_KEYS: [&str; 5] = ["M", "B", "C", "S", "Q"];
const DIM_KEYS: [&str; 9] = ["r", "K", "m", "q", "s", "n", "b", "c", "variant"];

/// Keys that are not model parameters.
const OPTION_KEYS: [&str; 14] = [
    "window", "res", "tol", "tmax", "start", "axis", "range", "c_range", "bracket", "b_values",
    "basin", "trajectories", "budget", "eps",
];

/// Parses `key = value` lines; `#` starts a comment. Later keys win.
pub fn parse_entries(text: &str) -> CliResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return invalid(format!("line {}: expected `key = value`, got `{line}`", i + 1));
        };
        let (k, v) = (k.trim(), v.trim());
        if k.is_empty() {
            return invalid(format!("line {}: empty key", i + 1));
        }
        out.insert(k.to_string(), v.to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Params {
    Nondim(NondimParams),
    Dim(DimParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: Params,
    pub window: Option<Window>,
    pub res: Option<(usize, usize)>,
    pub tol: Option<f64>,
    pub tmax: Option<f64>,
    pub entries: BTreeMap<String, String>,
}

pub fn parse_f64(key: &str, v: &str) -> CliResult<f64> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => invalid(format!("{key}: `{v}` is not a finite number")),
    }
}

pub fn parse_list(key: &str, v: &str) -> CliResult<Vec<f64>> {
    v.split(',').map(|s| parse_f64(key, s.trim())).collect()
}

pub fn parse_pair(key: &str, v: &str) -> CliResult<(f64, f64)> {
    match parse_list(key, v)?.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => invalid(format!("{key}: expected two comma-separated numbers, got `{v}`")),
    }
}

pub fn parse_window(v: &str) -> CliResult<Window> {
    match parse_list("window", v)?.as_slice() {
        [u0, u1, v0, v1] => {
            if !(u1 > u0 && v1 > v0 && *u0 >= 0.0 && *v0 >= 0.0) {
                return invalid(format!("window `{v}` must satisfy 0 ≤ u0 < u1 and 0 ≤ v0 < v1"));
            }
            Ok(Window::new(*u0, *u1, *v0, *v1))
        }
        _ => invalid(format!("window: expected u0,u1,v0,v1, got `{v}`")),
    }
}

pub fn parse_res(v: &str) -> CliResult<(usize, usize)> {
    let parts: Vec<&str> = v.split(',').map(str::trim).collect();
    let [a, b] = parts.as_slice() else {
        return invalid(format!("res: expected NX,NY, got `{v}`"));
    };
    match (a.parse::<usize>(), b.parse::<usize>()) {
        (Ok(nx), Ok(ny)) if nx >= 16 && ny >= 16 => Ok((nx, ny)),
        (Ok(_), Ok(_)) => invalid(format!("res: resolutions must be at least 16, got `{v}`")),
        _ => invalid(format!("res: `{v}` is not a pair of integers")),
    }
}

impl RunConfig {
    /// Builds the configuration from file entries and `KEY=VAL` overrides.
    pub fn from_entries(mut entries: BTreeMap<String, String>, overrides: &[String]) -> CliResult<Self> {
        for o in overrides {
            let Some((k, v)) = o.split_once('=') else {
                return invalid(format!("--param expects KEY=VAL, got `{o}`"));
            };
            entries.insert(k.trim().to_string(), v.trim().to_string());
        }
        for k in entries.keys() {
            let known = NONDIM_KEYS.contains(&k.as_str())
                || DIM_KEYS.contains(&k.as_str())
                || OPTION_KEYS.contains(&k.as_str());
            if !known {
                return invalid(format!("unknown key `{k}`"));
            }
        }
        let has_nondim = NONDIM_KEYS.iter().any(|k| entries.contains_key(*k));
        let has_dim = DIM_KEYS.iter().any(|k| entries.contains_key(*k));
        let params = match (has_nondim, has_dim) {
            (true, true) => {
                return invalid("give exactly one parameter set: M,B,C,S,Q or r,K,m,q,s,n,b,c,variant")
            }
            (false, false) => return invalid("no parameters given"),
            (true, false) => {
                let g = |k: &str| -> CliResult<f64> {
                    match entries.get(k) {
                        Some(v) => parse_f64(k, v),
                        None => invalid(format!("missing parameter {k}")),
                    }
                };
                Params::Nondim(NondimParams::new(g("M")?, g("B")?, g("C")?, g("S")?, g("Q")?)?)
            }
            (false, true) => {
                let g = |k: &str| -> CliResult<f64> {
                    match entries.get(k) {
                        Some(v) => parse_f64(k, v),
                        None => invalid(format!("missing parameter {k}")),
                    }
                };
                let variant: GrowthLaw = entries
                    .get("variant")
                    .map(|v| v.parse())
                    .transpose()?
                    .unwrap_or(GrowthLaw::MultipleAllee);
                let d = DimParams {
                    r: g("r")?,
                    k: g("K")?,
                    m: g("m")?,
                    q: g("q")?,
                    s: g("s")?,
                    n: g("n")?,
                    b: g("b")?,
                    c: g("c")?,
                    variant,
                };
                d.validate()?;
                Params::Dim(d)
            }
        };
        let window = entries.get("window").map(|v| parse_window(v)).transpose()?;
        let res = entries.get("res").map(|v| parse_res(v)).transpose()?;
        let pos = |k: &str| -> CliResult<Option<f64>> {
            match entries.get(k) {
                None => Ok(None),
                Some(v) => {
                    let x = parse_f64(k, v)?;
                    if x > 0.0 {
                        Ok(Some(x))
                    } else {
                        invalid(format!("{k} must be positive"))
                    }
                }
            }
        };
        let tol = pos("tol")?;
        let tmax = pos("tmax")?;
        Ok(RunConfig {
            params,
            window,
            res,
            tol,
            tmax,
            entries,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn nondim(&self) -> CliResult<NondimParams> {
        match self.params {
            Params::Nondim(p) => Ok(p),
            Params::Dim(d) => Ok(mht_core::model::nondimensionalize(&d)?),
        }
    }

    pub fn flag(&self, key: &str) -> CliResult<bool> {
        match self.get(key) {
            None => Ok(false),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => invalid(format!("{key}: `{v}` is not a boolean")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comments_and_overrides() {
        let e = parse_entries("# fig 5a\nM = 0.07\nB=0.0645 # trailing\nC = 0.32\nS = 0.15\nQ = 0.736\n").unwrap();
        let c = RunConfig::from_entries(e, &["S=0.05".into()]).unwrap();
        match c.params {
            Params::Nondim(p) => assert_eq!(p.s, 0.05),
            _ => panic!(),
        }
    }

    #[test]
    fn mixed_sets_rejected() {
        let e = parse_entries("M=0.1\nB=0.1\nC=0.1\nS=0.1\nQ=0.1\nr=1").unwrap();
        assert_eq!(RunConfig::from_entries(e, &[]).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn bad_lines_and_values() {
        assert!(parse_entries("M 0.1").is_err());
        assert!(parse_res("8,8").is_err());
        assert!(parse_window("0,1,0").is_err());
        let e = parse_entries("M=1.2\nB=0.1\nC=0.1\nS=0.1\nQ=0.1").unwrap();
        assert!(RunConfig::from_entries(e, &[]).is_err());
        let e = parse_entries("M=0.1\nB=0.1\nC=0.1\nS=0.1\nQ=0.1\nwat=3").unwrap();
        assert!(RunConfig::from_entries(e, &[]).is_err());
    }

    #[test]
    fn dimensional_set() {
        let e = parse_entries("r=14\nK=150\nm=15\nq=1.08\ns=1.25\nn=0.05\nb=10\nc=0.75\nvariant=strong-allee").unwrap();
        let c = RunConfig::from_entries(e, &[]).unwrap();
        assert!(matches!(c.params, Params::Dim(d) if d.variant == GrowthLaw::StrongAllee));
        assert!((c.nondim().unwrap().q - 0.5785714285714286).abs() < 1e-12);
    }
}
