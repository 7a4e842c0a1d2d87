//! Experiment files: `[model]`, `[path]`, `[analysis]` and `[output]`
//! sections of `key = value` lines. The model section uses the model-file
//! format of the core library.

use std::collections::BTreeMap;

use pairpath::experiments::{parse_stages, Reference, StageSelector};
use pairpath::hamiltonians::{parse_model_lines, ModelSpec};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathKind {
    Direct,
    Stepwise,
}

/// Interpolation settings; unset fields fall back to model defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct PathConfig {
    pub kind: PathKind,
    pub stages: Option<Vec<Vec<StageSelector>>>,
    pub endpoint_flat: bool,
    pub grid: usize,
    pub reference: Option<Reference>,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig { kind: PathKind::Direct, stages: None, endpoint_flat: false, grid: 401, reference: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    /// Three lowest levels, the gap and symmetry labels along the path.
    Gap,
    Evolve { time: f64, steps: usize, samples: usize },
    Numerator { nodes: usize },
    Jansen { delta: f64, nodes: usize },
    Bounds { l_min: usize, l_max: usize, n_min: usize, n_max: usize, samples: usize },
    Decompose,
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Gap => "gap",
            Analysis::Evolve { .. } => "evolve",
            Analysis::Numerator { .. } => "numerator",
            Analysis::Jansen { .. } => "jansen",
            Analysis::Bounds { .. } => "bounds",
            Analysis::Decompose => "decompose",
        }
    }

    /// Default parameters for the analysis called `name`.
    pub fn default_for(name: &str) -> Option<Analysis> {
        Some(match name {
            "gap" => Analysis::Gap,
            "evolve" => Analysis::Evolve { time: 80.0, steps: 20_000, samples: 201 },
            "numerator" => Analysis::Numerator { nodes: 201 },
            "jansen" => Analysis::Jansen { delta: 0.1, nodes: 201 },
            "bounds" => Analysis::Bounds { l_min: 4, l_max: 10, n_min: 2, n_max: 5, samples: 200 },
            "decompose" => Analysis::Decompose,
            _ => return None,
        })
    }

    pub fn needs_model(&self) -> bool {
        !matches!(self, Analysis::Bounds { .. })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: Option<ModelSpec>,
    pub path: PathConfig,
    pub analysis: Option<Analysis>,
    pub prefix: Option<String>,
    pub seed: u64,
}

struct Section<'a> {
    header_line: usize,
    lines: Vec<(usize, &'a str)>,
}

/// `key = value` pairs of a section, consumed as they are read.
struct Keys {
    section: &'static str,
    values: BTreeMap<String, (usize, String)>,
    end_line: usize,
}

impl Keys {
    fn new(section: &'static str, s: &Section) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for &(line, raw) in &s.lines {
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (k, v) = text
                .split_once('=')
                .ok_or_else(|| CliError::parse(line, format!("expected `key = value` in [{section}]")))?;
            let (k, v) = (k.trim(), v.trim());
            if k.is_empty() || v.is_empty() {
                return Err(CliError::parse(line, format!("expected `key = value` in [{section}]")));
            }
            if values.insert(k.to_string(), (line, v.to_string())).is_some() {
                return Err(CliError::parse(line, format!("duplicate key `{k}` in [{section}]")));
            }
        }
        let end_line = s.lines.last().map_or(s.header_line, |l| l.0);
        Ok(Keys { section, values, end_line })
    }

    fn take<T>(&mut self, key: &str, parse: impl Fn(&str) -> Option<T>, expects: &str) -> Result<Option<T>, CliError> {
        match self.values.remove(key) {
            None => Ok(None),
            Some((line, v)) => parse(&v)
                .map(Some)
                .ok_or_else(|| CliError::parse(line, format!("`{key}` expects {expects}, got `{v}`"))),
        }
    }

    fn number(&mut self, key: &str) -> Result<Option<f64>, CliError> {
        self.take(key, |v| v.parse::<f64>().ok().filter(|x| x.is_finite()), "a number")
    }

    fn count(&mut self, key: &str) -> Result<Option<usize>, CliError> {
        self.take(key, |v| v.parse().ok(), "a non-negative integer")
    }

    fn flag(&mut self, key: &str) -> Result<Option<bool>, CliError> {
        self.take(
            key,
            |v| match v {
                "true" | "yes" | "1" => Some(true),
                "false" | "no" | "0" => Some(false),
                _ => None,
            },
            "true or false",
        )
    }

    fn text(&mut self, key: &str) -> Option<(usize, String)> {
        self.values.remove(key)
    }

    fn finish(self) -> Result<(), CliError> {
        match self.values.into_iter().next() {
            Some((k, (line, _))) => Err(CliError::parse(line, format!("unknown key `{k}` in [{}]", self.section))),
            None => Ok(()),
        }
    }
}

fn split_sections(text: &str) -> Result<BTreeMap<String, Section<'_>>, CliError> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let trimmed = raw.split('#').next().unwrap_or("").trim();
        if let Some(name) = trimmed.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !["model", "path", "analysis", "output"].contains(&name.as_str()) {
                return Err(CliError::parse(line, format!("unknown section [{name}] (expected model, path, analysis or output)")));
            }
            if sections.contains_key(&name) {
                return Err(CliError::parse(line, format!("section [{name}] appears twice")));
            }
            sections.insert(name.clone(), Section { header_line: line, lines: Vec::new() });
            current = Some(name);
            continue;
        }
        match &current {
            Some(name) => sections.get_mut(name).expect("section exists").lines.push((line, raw)),
            None if trimmed.is_empty() => {}
            None => return Err(CliError::parse(line, "content before the first section header")),
        }
    }
    Ok(sections)
}

fn parse_path(s: &Section) -> Result<PathConfig, CliError> {
    let mut k = Keys::new("path", s)?;
    let mut path = PathConfig::default();
    if let Some((line, v)) = k.text("kind") {
        path.kind = match v.as_str() {
            "direct" => PathKind::Direct,
            "stepwise" => PathKind::Stepwise,
            _ => return Err(CliError::parse(line, format!("`kind` expects direct or stepwise, got `{v}`"))),
        };
    }
    if let Some((line, v)) = k.text("stages") {
        path.stages = Some(parse_stages(&v).map_err(|e| CliError::parse(line, e.to_string()))?);
    }
    if let Some((line, v)) = k.text("reference") {
        path.reference = Some(v.parse().map_err(|e: pairpath::Error| CliError::parse(line, e.to_string()))?);
    }
    path.endpoint_flat = k.flag("endpoint_flat")?.unwrap_or(false);
    if let Some(g) = k.count("grid")? {
        if g < 3 {
            return Err(CliError::parse(k.end_line, "`grid` needs at least 3 points"));
        }
        path.grid = g;
    }
    if path.kind == PathKind::Direct && path.stages.is_some() {
        return Err(CliError::parse(k.end_line, "`stages` given for a direct path"));
    }
    k.finish()?;
    Ok(path)
}

fn parse_analysis(s: &Section) -> Result<Analysis, CliError> {
    let mut k = Keys::new("analysis", s)?;
    let (line, name) = k
        .text("kind")
        .ok_or_else(|| CliError::parse(k.end_line, "[analysis] needs `kind`"))?;
    let mut a = Analysis::default_for(&name).ok_or_else(|| {
        CliError::parse(line, format!("unknown analysis `{name}` (expected gap, evolve, numerator, jansen, bounds or decompose)"))
    })?;
    match &mut a {
        Analysis::Evolve { time, steps, samples } => {
            *time = k.number("time")?.unwrap_or(*time);
            *steps = k.count("steps")?.unwrap_or(*steps);
            *samples = k.count("samples")?.unwrap_or(*samples);
        }
        Analysis::Numerator { nodes } => *nodes = k.count("nodes")?.unwrap_or(*nodes),
        Analysis::Jansen { delta, nodes } => {
            *delta = k.number("delta")?.unwrap_or(*delta);
            *nodes = k.count("nodes")?.unwrap_or(*nodes);
        }
        Analysis::Bounds { l_min, l_max, n_min, n_max, samples } => {
            *l_min = k.count("l_min")?.unwrap_or(*l_min);
            *l_max = k.count("l_max")?.unwrap_or(*l_max);
            *n_min = k.count("n_min")?.unwrap_or(*n_min);
            *n_max = k.count("n_max")?.unwrap_or(*n_max);
            *samples = k.count("samples")?.unwrap_or(*samples);
        }
        Analysis::Gap | Analysis::Decompose => {}
    }
    k.finish()?;
    Ok(a)
}

/// Parses a whole experiment file. Missing sections are left unset; the
/// caller decides which ones it needs.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, CliError> {
    let sections = split_sections(text)?;
    let model = sections
        .get("model")
        .map(|s| parse_model_lines(&s.lines))
        .transpose()
        .map_err(CliError::Core)?;
    let path = sections.get("path").map(parse_path).transpose()?.unwrap_or_default();
    let analysis = sections.get("analysis").map(parse_analysis).transpose()?;
    let (prefix, seed) = match sections.get("output") {
        Some(s) => {
            let mut k = Keys::new("output", s)?;
            let prefix = k.text("prefix").map(|(_, v)| v);
            let seed = k.take("seed", |v| v.parse::<u64>().ok(), "an unsigned integer")?.unwrap_or(0);
            k.finish()?;
            (prefix, seed)
        }
        None => (None, 0),
    };
    Ok(ExperimentConfig { model, path, analysis, prefix, seed })
}
