//! Plain-text model description.
//!
//! One `key = value` per line; `#` starts a comment. `model` selects the
//! builder and fixes the accepted keys:
//!
//! | model           | keys                                                   |
//! |-----------------|--------------------------------------------------------|
//! | `hubbard_chain` | `sites j u mu periodic n_up n_down`                    |
//! | `trimer`        | `j j13 u delta_u`                                      |
//! | `four_site`     | `j delta u split`                                      |
//! | `tensor`        | `modes n n_up n_down offset` plus `h`/`g` entry lines  |
//!
//! Tensor entries are written `h P Q value` and `g P Q R S value`; each line
//! sets its whole symmetry orbit (`h_QP`, and the eight index orders of `g`).

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fock::Occupation;

use super::{build_four_site_split, build_hubbard_chain, build_trimer, HamiltonianSpec};

/// Default per-site interaction splitting used to lift reflection degeneracies.
pub const DEFAULT_SPLIT: f64 = 1e-6;

/// Parsed model choice.
#[derive(Debug, Clone, PartialEq)]
pub enum ModelKind {
    HubbardChain { sites: usize, j: f64, u: f64, mu: f64, periodic: bool, particles: Option<(usize, usize)> },
    /// `U1 = u`, `U3 = u + delta_u`.
    Trimer { j: f64, j13: f64, u: f64, delta_u: f64 },
    /// `U_p = u + p·split` for sites `p = 0..4`.
    FourSite { j: f64, delta: f64, u: f64, split: f64 },
    Tensor { spec: HamiltonianSpec },
}

/// A parsed model block.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
}

impl ModelSpec {
    pub fn build(&self) -> Result<HamiltonianSpec> {
        match &self.kind {
            ModelKind::HubbardChain { sites, j, u, mu, periodic, particles } => {
                let spec = build_hubbard_chain(*sites, *j, *u, *mu, *periodic)?;
                Ok(match particles {
                    Some((up, down)) => spec.with_particles(Occupation::Spin { up: *up, down: *down }),
                    None => spec,
                })
            }
            ModelKind::Trimer { j, j13, u, delta_u } => Ok(build_trimer(*j, *j13, *u, u + delta_u)),
            ModelKind::FourSite { j, delta, u, split } => {
                Ok(build_four_site_split(*j, *delta, [0.0, 1.0, 2.0, 3.0].map(|p| u + p * split)))
            }
            ModelKind::Tensor { spec } => Ok(spec.clone()),
        }
    }
}

fn parse_f64(line: usize, key: &str, v: &str) -> Result<f64> {
    v.parse::<f64>()
        .ok()
        .filter(|x| x.is_finite())
        .ok_or_else(|| Error::Parse { line, msg: format!("`{key}` expects a number, got `{v}`") })
}

fn parse_usize(line: usize, key: &str, v: &str) -> Result<usize> {
    v.parse::<usize>()
        .map_err(|_| Error::Parse { line, msg: format!("`{key}` expects a non-negative integer, got `{v}`") })
}

fn parse_bool(line: usize, key: &str, v: &str) -> Result<bool> {
    match v {
        "true" | "yes" | "1" => Ok(true),
        "false" | "no" | "0" => Ok(false),
        _ => Err(Error::Parse { line, msg: format!("`{key}` expects true or false, got `{v}`") }),
    }
}

struct Fields {
    values: BTreeMap<String, (usize, String)>,
    end_line: usize,
}

impl Fields {
    fn take(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn f64_or(&mut self, key: &str, default: Option<f64>) -> Result<f64> {
        match self.take(key) {
            Some((line, v)) => parse_f64(line, key, &v),
            None => default.ok_or_else(|| Error::Parse { line: self.end_line, msg: format!("missing key `{key}`") }),
        }
    }

    fn usize_opt(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key).map(|(line, v)| parse_usize(line, key, &v)).transpose()
    }

    fn finish(self) -> Result<()> {
        if let Some((key, (line, _))) = self.values.into_iter().next() {
            return Err(Error::Parse { line, msg: format!("unknown key `{key}` for this model") });
        }
        Ok(())
    }
}

/// Parses model lines given as `(line number, text)`.
pub fn parse_model_lines(lines: &[(usize, &str)]) -> Result<ModelSpec> {
    let end_line = lines.last().map(|l| l.0).unwrap_or(0);
    let mut values = BTreeMap::new();
    let mut h_lines = Vec::new();
    let mut g_lines = Vec::new();
    for &(line, raw) in lines {
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some((k, v)) = text.split_once('=') {
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() || v.is_empty() {
                return Err(Error::Parse { line, msg: "expected `key = value`".into() });
            }
            if values.insert(k.clone(), (line, v)).is_some() {
                return Err(Error::Parse { line, msg: format!("duplicate key `{k}`") });
            }
            continue;
        }
        let words: Vec<&str> = text.split_whitespace().collect();
        match words[0] {
            "h" if words.len() == 4 => h_lines.push((line, words)),
            "g" if words.len() == 6 => g_lines.push((line, words)),
            "h" | "g" => {
                return Err(Error::Parse { line, msg: format!("malformed `{}` entry", words[0]) });
            }
            _ => return Err(Error::Parse { line, msg: format!("unrecognised line `{text}`") }),
        }
    }
    let mut f = Fields { values, end_line };
    let (model_line, model) = f
        .take("model")
        .ok_or_else(|| Error::Parse { line: end_line, msg: "missing key `model`".into() })?;
    if model != "tensor" && (!h_lines.is_empty() || !g_lines.is_empty()) {
        let line = h_lines.first().or(g_lines.first()).map(|l| l.0).unwrap_or(model_line);
        return Err(Error::Parse { line, msg: "tensor entries are only allowed with `model = tensor`".into() });
    }
    let kind = match model.as_str() {
        "hubbard_chain" => {
            let sites = f.usize_opt("sites")?.ok_or_else(|| Error::Parse { line: end_line, msg: "missing key `sites`".into() })?;
            let j = f.f64_or("j", Some(1.0))?;
            let u = f.f64_or("u", None)?;
            let mu = f.f64_or("mu", Some(0.0))?;
            let periodic = match f.take("periodic") {
                Some((line, v)) => parse_bool(line, "periodic", &v)?,
                None => false,
            };
            let up = f.usize_opt("n_up")?;
            let down = f.usize_opt("n_down")?;
            let particles = match (up, down) {
                (Some(a), Some(b)) => Some((a, b)),
                (None, None) => None,
                _ => return Err(Error::Parse { line: end_line, msg: "give both `n_up` and `n_down`".into() }),
            };
            ModelKind::HubbardChain { sites, j, u, mu, periodic, particles }
        }
        "trimer" => ModelKind::Trimer {
            j: f.f64_or("j", Some(1.0))?,
            j13: f.f64_or("j13", None)?,
            u: f.f64_or("u", None)?,
            delta_u: f.f64_or("delta_u", Some(DEFAULT_SPLIT))?,
        },
        "four_site" => ModelKind::FourSite {
            j: f.f64_or("j", Some(1.0))?,
            delta: f.f64_or("delta", None)?,
            u: f.f64_or("u", None)?,
            split: f.f64_or("split", Some(DEFAULT_SPLIT))?,
        },
        "tensor" => {
            let modes = f.usize_opt("modes")?.ok_or_else(|| Error::Parse { line: end_line, msg: "missing key `modes`".into() })?;
            if modes == 0 || modes > 62 {
                return Err(Error::Parse { line: end_line, msg: format!("`modes` = {modes} outside 1..=62") });
            }
            let n = f.usize_opt("n")?;
            let up = f.usize_opt("n_up")?;
            let down = f.usize_opt("n_down")?;
            let particles = match (n, up, down) {
                (Some(n), None, None) => Occupation::Total(n),
                (None, Some(up), Some(down)) => Occupation::Spin { up, down },
                _ => return Err(Error::Parse { line: end_line, msg: "give either `n` or both `n_up` and `n_down`".into() }),
            };
            let mut spec = HamiltonianSpec::zeros(modes, particles);
            spec.offset = f.f64_or("offset", Some(0.0))?;
            let index = |line: usize, w: &str| -> Result<usize> {
                let i = parse_usize(line, "index", w)?;
                if i >= modes {
                    return Err(Error::Parse { line, msg: format!("index {i} out of range for {modes} modes") });
                }
                Ok(i)
            };
            for (line, w) in h_lines {
                let (p, q) = (index(line, w[1])?, index(line, w[2])?);
                let v = parse_f64(line, "h", w[3])?;
                spec.h[(p, q)] = v;
                spec.h[(q, p)] = v;
            }
            for (line, w) in g_lines {
                let (p, q, r, s) = (index(line, w[1])?, index(line, w[2])?, index(line, w[3])?, index(line, w[4])?);
                let v = parse_f64(line, "g", w[5])?;
                for (a, b, c, d) in [
                    (p, q, r, s),
                    (r, s, p, q),
                    (q, p, r, s),
                    (p, q, s, r),
                    (q, p, s, r),
                    (s, r, p, q),
                    (r, s, q, p),
                    (s, r, q, p),
                ] {
                    spec.g.set(a, b, c, d, v);
                }
            }
            ModelKind::Tensor { spec }
        }
        other => {
            return Err(Error::Parse {
                line: model_line,
                msg: format!("unknown model `{other}` (expected hubbard_chain, trimer, four_site or tensor)"),
            })
        }
    };
    f.finish()?;
    Ok(ModelSpec { kind })
}

/// Parses a stand-alone model file.
pub fn parse_model(text: &str) -> Result<ModelSpec> {
    let lines: Vec<(usize, &str)> = text.lines().enumerate().map(|(i, l)| (i + 1, l)).collect();
    parse_model_lines(&lines)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::validate_symmetries;

    #[test]
    fn trimer_file() {
        let m = parse_model("model = trimer\nj = 1\nj13 = 0.37\nu = -5 # on-site\n").unwrap();
        assert_eq!(m.kind, ModelKind::Trimer { j: 1.0, j13: 0.37, u: -5.0, delta_u: 1e-6 });
        let spec = m.build().unwrap();
        assert_eq!(spec.g.get(4, 4, 5, 5), -5.0 + 1e-6);
    }

    #[test]
    fn tensor_file_fills_orbits() {
        let m = parse_model("model = tensor\nmodes = 4\nn = 2\nh 0 1 -1.0\ng 0 1 2 3 0.25\n").unwrap();
        let spec = m.build().unwrap();
        assert_eq!(spec.h[(1, 0)], -1.0);
        assert_eq!(spec.g.get(3, 2, 1, 0), 0.25);
        assert!(validate_symmetries(&spec).passes());
    }

    #[test]
    fn errors_name_lines() {
        let e = parse_model("model = trimer\nj13 = 0.3\nu = -5\ncolour = red\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 4, msg: "unknown key `colour` for this model".into() });
        let e = parse_model("model = trimer\nj13 = abc\nu = 1\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 2, .. }));
        let e = parse_model("model = tensor\nmodes = 3\nn = 2\ng 0 1 2 3 1.0\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 4, .. }));
        let e = parse_model("model = lattice\n").unwrap_err();
        assert!(matches!(e, Error::Parse { line: 1, .. }));
        let e = parse_model("j = 1\n").unwrap_err();
        assert!(e.to_string().contains("missing key `model`"));
    }
}
