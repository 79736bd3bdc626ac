//! Flat key/value config format for profile and measure specs.
//!
//! Schema (one `key = value` per line, `#` comments, keys case-insensitive):
//!
//! ```text
//! kind  = constant | block48 | geometric | explicit
//! q     = positive real, != 1
//! depth = integer >= 1
//! a     = real in [0, 1]          (constant kind)
//! ratio = real > 1                (geometric kind)
//! seed  = integer >= 1            (geometric kind, default 1)
//! values = comma-separated reals  (explicit kind; depth defaults to the count)
//! ```

use std::collections::BTreeMap;

use crate::csvio::fmt17;
use crate::error::{Error, Result};
use crate::measure::{build_cascade, CascadeMeasure, WeightProfile};

/// A parsed measure descriptor: everything needed to rebuild the measure
/// deterministically.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpec {
    pub profile: WeightProfile,
    pub q: f64,
    pub depth: usize,
}

impl MeasureSpec {
    pub fn build(&self) -> Result<CascadeMeasure> {
        build_cascade(&self.profile, self.q, self.depth)
    }

    /// Serialize back to the config format (parse . serialize is the
    /// identity on parsed values).
    pub fn to_config_string(&self) -> String {
        let mut out = String::new();
        match &self.profile {
            WeightProfile::Constant { a, .. } => {
                out.push_str("kind = constant\n");
                out.push_str(&format!("a = {}\n", fmt17(*a)));
            }
            WeightProfile::Block48 { .. } => out.push_str("kind = block48\n"),
            WeightProfile::GeometricBlocks { ratio, seed, .. } => {
                out.push_str("kind = geometric\n");
                out.push_str(&format!("ratio = {}\n", fmt17(*ratio)));
                out.push_str(&format!("seed = {seed}\n"));
            }
            WeightProfile::Explicit { values } => {
                out.push_str("kind = explicit\n");
                let vals: Vec<String> = values.iter().map(|&v| fmt17(v)).collect();
                out.push_str(&format!("values = {}\n", vals.join(",")));
            }
        }
        out.push_str(&format!("q = {}\n", fmt17(self.q)));
        out.push_str(&format!("depth = {}\n", self.depth));
        out
    }
}

pub fn parse_measure_spec(text: &str) -> Result<MeasureSpec> {
    let mut keys: BTreeMap<String, (usize, String)> = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(Error::Config {
            line: line_no,
            msg: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim().to_string();
        if keys.insert(key.clone(), (line_no, value)).is_some() {
            return Err(Error::Config { line: line_no, msg: format!("duplicate key '{key}'") });
        }
    }

    let take = |keys: &mut BTreeMap<String, (usize, String)>, k: &str| keys.remove(k);
    let required = |v: Option<(usize, String)>, k: &str| {
        v.ok_or(Error::Config { line: 0, msg: format!("missing required key '{k}'") })
    };
    let parse_f64 = |(line, s): (usize, String), k: &str| {
        s.parse::<f64>()
            .map_err(|_| Error::Config { line, msg: format!("key '{k}': '{s}' is not a number") })
    };
    let parse_usize = |(line, s): (usize, String), k: &str| {
        s.parse::<usize>()
            .map_err(|_| Error::Config { line, msg: format!("key '{k}': '{s}' is not an integer") })
    };

    let (kind_line, kind) = required(take(&mut keys, "kind"), "kind")?;
    let q = parse_f64(required(take(&mut keys, "q"), "q")?, "q")?;
    let depth_entry = take(&mut keys, "depth");

    let (profile, depth) = match kind.as_str() {
        "constant" => {
            let a = parse_f64(required(take(&mut keys, "a"), "a")?, "a")?;
            let depth = parse_usize(required(depth_entry, "depth")?, "depth")?;
            (WeightProfile::Constant { a, len: depth }, depth)
        }
        "block48" => {
            let depth = parse_usize(required(depth_entry, "depth")?, "depth")?;
            (WeightProfile::Block48 { len: depth }, depth)
        }
        "geometric" => {
            let ratio = parse_f64(required(take(&mut keys, "ratio"), "ratio")?, "ratio")?;
            let seed = match take(&mut keys, "seed") {
                Some(e) => parse_usize(e, "seed")? as u64,
                None => 1,
            };
            let depth = parse_usize(required(depth_entry, "depth")?, "depth")?;
            (WeightProfile::GeometricBlocks { ratio, seed, len: depth }, depth)
        }
        "explicit" => {
            let (vline, vstr) = required(take(&mut keys, "values"), "values")?;
            let mut values = Vec::new();
            for part in vstr.split(',') {
                let v = part.trim().parse::<f64>().map_err(|_| Error::Config {
                    line: vline,
                    msg: format!("key 'values': '{}' is not a number", part.trim()),
                })?;
                values.push(v);
            }
            let depth = match depth_entry {
                Some(e) => parse_usize(e, "depth")?,
                None => values.len(),
            };
            (WeightProfile::Explicit { values }, depth)
        }
        other => {
            return Err(Error::Config {
                line: kind_line,
                msg: format!(
                    "key 'kind': unknown kind '{other}' (expected constant, block48, geometric, explicit)"
                ),
            })
        }
    };

    if let Some((line, _)) = keys.into_iter().map(|(k, v)| (v.0, k)).next() {
        // surface the first unknown key by line for a precise diagnostic
        let unknown = text
            .lines()
            .nth(line - 1)
            .unwrap_or("")
            .split('=')
            .next()
            .unwrap_or("")
            .trim()
            .to_string();
        return Err(Error::Config { line, msg: format!("unknown key '{unknown}'") });
    }

    Ok(MeasureSpec { profile, q, depth })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_constant() {
        let spec = parse_measure_spec("kind = constant\na = 1\nq = 2\ndepth = 12\n").unwrap();
        assert_eq!(spec.q, 2.0);
        assert_eq!(spec.depth, 12);
        assert_eq!(spec.profile, WeightProfile::Constant { a: 1.0, len: 12 });
        spec.build().unwrap();
    }

    #[test]
    fn parse_with_comments_and_case() {
        let text = "# a lebesgue cascade\nKIND = constant  # dyadic\na = 1.0\nQ = 2\ndepth = 4\n";
        assert!(parse_measure_spec(text).is_ok());
    }

    #[test]
    fn parse_explicit_defaults_depth() {
        let spec = parse_measure_spec("kind = explicit\nvalues = 0.5, 1, 0\nq = 2\n").unwrap();
        assert_eq!(spec.depth, 3);
    }

    #[test]
    fn round_trip() {
        for text in [
            "kind = block48\nq = 2\ndepth = 110592\n",
            "kind = geometric\nratio = 2\nseed = 1\nq = 0.5\ndepth = 1024\n",
            "kind = explicit\nvalues = 0.1,0.9\nq = 3\ndepth = 2\n",
        ] {
            let spec = parse_measure_spec(text).unwrap();
            let again = parse_measure_spec(&spec.to_config_string()).unwrap();
            assert_eq!(spec, again);
        }
    }

    #[test]
    fn errors_name_key_and_line() {
        let err = parse_measure_spec("kind = constant\na = banana\nq = 2\ndepth = 3\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("'a'"), "{msg}");

        let err = parse_measure_spec("kind = martian\nq = 2\ndepth = 3\n").unwrap_err();
        assert!(err.to_string().contains("martian"));

        let err = parse_measure_spec("q = 2\ndepth = 3\n").unwrap_err();
        assert!(err.to_string().contains("'kind'"));

        let err =
            parse_measure_spec("kind = constant\na = 1\nq = 2\ndepth = 3\nwobble = 7\n").unwrap_err();
        assert!(err.to_string().contains("wobble"), "{err}");

        let err = parse_measure_spec("kind = constant\nkind = block48\nq = 2\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }
}
