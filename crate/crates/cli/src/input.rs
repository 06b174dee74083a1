//! Spectrum and index-block ingestion.

use std::collections::BTreeMap;
use std::path::Path;

use marginals::asymptotics::{IndexPattern, SpectrumSequence};
use marginals::exact::{parse_exact, to_fraction_string};
use marginals::moments::{IndexBlock, MomentQuery, Spectrum, System};
use marginals::Exact;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum SystemKind {
    Two,
    Multi,
    Boson,
    Fermion,
}

impl SystemKind {
    fn parse(name: &str) -> Result<Self, CliError> {
        match name {
            "two" => Ok(SystemKind::Two),
            "multi" => Ok(SystemKind::Multi),
            "boson" => Ok(SystemKind::Boson),
            "fermion" => Ok(SystemKind::Fermion),
            other => Err(CliError::validation(format!("system: unknown system {other:?}"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SystemKind::Two => "two",
            SystemKind::Multi => "multi",
            SystemKind::Boson => "boson",
            SystemKind::Fermion => "fermion",
        }
    }

    /// `dims` is `m n`, `n₁ … n_k`, or `n k` for bosons and fermions.
    pub fn system(&self, dims: &[usize]) -> Result<System, CliError> {
        let want = |count: usize| -> Result<(), CliError> {
            if dims.len() != count {
                return Err(CliError::validation(format!(
                    "dims: system {} takes {count} values, got {}",
                    self.name(),
                    dims.len()
                )));
            }
            Ok(())
        };
        let system = match self {
            SystemKind::Two => {
                want(2)?;
                System::TwoDistinguishable { m: dims[0], n: dims[1] }
            }
            SystemKind::Multi => {
                if dims.is_empty() {
                    return Err(CliError::validation("dims: system multi needs at least one factor"));
                }
                System::Distinguishable { dims: dims.to_vec() }
            }
            SystemKind::Boson => {
                want(2)?;
                System::Boson { n: dims[0], k: dims[1] }
            }
            SystemKind::Fermion => {
                want(2)?;
                System::Fermion { n: dims[0], k: dims[1] }
            }
        };
        system.validate().map_err(|e| CliError::validation(format!("dims: {e}")))?;
        Ok(system)
    }
}

#[derive(Debug, Deserialize)]
struct SpectrumFile {
    dims: Vec<usize>,
    system: String,
    values: Vec<String>,
}

/// A spectrum together with where it came from.
#[derive(Debug, Clone)]
pub struct ResolvedSpectrum {
    pub values: Spectrum<Exact>,
    pub source: String,
}

impl ResolvedSpectrum {
    pub fn to_f64(&self) -> Vec<f64> {
        self.values.values().iter().map(marginals::exact::to_f64).collect()
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.values.values().iter().map(|v| Value::String(to_fraction_string(v))).collect())
    }
}

/// Resolves system, dimensions and spectrum from flags and an optional spectrum file.
pub fn resolve_system(
    kind: Option<SystemKind>,
    dims: &[usize],
    spectrum: &[String],
    file: Option<&Path>,
) -> Result<(SystemKind, System, ResolvedSpectrum), CliError> {
    if let Some(path) = file {
        if !spectrum.is_empty() {
            return Err(CliError::validation("spectrum: give either --spectrum or --spectrum-file, not both"));
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("spectrum-file: cannot read {}: {e}", path.display())))?;
        let parsed: SpectrumFile = serde_json::from_str(&text)
            .map_err(|e| CliError::validation(format!("spectrum-file: {e}")))?;
        let file_kind = SystemKind::parse(&parsed.system)?;
        if kind.is_some_and(|k| k != file_kind) {
            return Err(CliError::validation("system: flag disagrees with the spectrum file"));
        }
        if !dims.is_empty() && dims != parsed.dims.as_slice() {
            return Err(CliError::validation("dims: flag disagrees with the spectrum file"));
        }
        let system = file_kind.system(&parsed.dims)?;
        let values = parse_values(&parsed.values, "spectrum-file.values")?;
        check_len(&system, &values)?;
        let source = format!("file:{}", path.display());
        return Ok((file_kind, system, ResolvedSpectrum { values, source }));
    }
    let kind = kind.ok_or_else(|| CliError::validation("system: required without --spectrum-file"))?;
    let system = kind.system(dims)?;
    if spectrum.is_empty() {
        return Err(CliError::validation("spectrum: required (values, a builtin name, or --spectrum-file)"));
    }
    if let [name] = spectrum {
        if let Ok(seq) = name.parse::<SpectrumSequence>() {
            let values = seq.spectrum(system.dimension());
            return Ok((kind, system, ResolvedSpectrum { values, source: format!("builtin:{seq}") }));
        }
    }
    let values = parse_values(spectrum, "spectrum")?;
    check_len(&system, &values)?;
    Ok((kind, system, ResolvedSpectrum { values, source: "inline".into() }))
}

fn parse_values(raw: &[String], field: &str) -> Result<Spectrum<Exact>, CliError> {
    raw.iter()
        .enumerate()
        .map(|(idx, s)| parse_exact(s).map_err(|e| CliError::validation(format!("{field}[{idx}]: {e}"))))
        .collect::<Result<Vec<_>, _>>()
        .map(Spectrum::new)
}

fn check_len(system: &System, values: &Spectrum<Exact>) -> Result<(), CliError> {
    if values.len() != system.dimension() {
        return Err(CliError::validation(format!(
            "spectrum: {} system needs {} values, got {}",
            system.name(),
            system.dimension(),
            values.len()
        )));
    }
    Ok(())
}

/// `key=v1,v2,…` tokens; an empty value is an empty list.
pub fn parse_index_tokens(tokens: &[String]) -> Result<BTreeMap<String, Vec<usize>>, CliError> {
    let mut out = BTreeMap::new();
    for token in tokens.iter().flat_map(|t| t.split_whitespace()) {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| CliError::validation(format!("indices: expected key=values, got {token:?}")))?;
        let list = if value.is_empty() {
            Vec::new()
        } else {
            value
                .split(',')
                .map(|v| v.trim().parse::<usize>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| CliError::validation(format!("indices.{key}: not a list of positive integers: {value:?}")))?
        };
        if out.insert(key.to_string(), list).is_some() {
            return Err(CliError::validation(format!("indices.{key}: given twice")));
        }
    }
    Ok(out)
}

fn take(map: &mut BTreeMap<String, Vec<usize>>, key: &str) -> Vec<usize> {
    map.remove(key).unwrap_or_default()
}

fn check_count(map: &mut BTreeMap<String, Vec<usize>>, key: &str, seqs: &[(&str, &[usize])]) -> Result<(), CliError> {
    let Some(count) = map.remove(key) else {
        return Ok(());
    };
    let [count] = count.as_slice() else {
        return Err(CliError::validation(format!("indices.{key}: expected a single count")));
    };
    for (name, seq) in seqs {
        if seq.len() != *count {
            return Err(CliError::validation(format!("indices.{name}: has {} entries, {key}={count}", seq.len())));
        }
    }
    Ok(())
}

fn reject_leftovers(map: &BTreeMap<String, Vec<usize>>) -> Result<(), CliError> {
    match map.keys().next() {
        Some(key) => Err(CliError::validation(format!("indices.{key}: unknown key for this system"))),
        None => Ok(()),
    }
}

/// Two-particle pattern from keys `p q i k j l`.
pub fn two_pattern(tokens: &[String]) -> Result<IndexPattern, CliError> {
    let mut map = parse_index_tokens(tokens)?;
    let (i, k, j, l) = (take(&mut map, "i"), take(&mut map, "k"), take(&mut map, "j"), take(&mut map, "l"));
    check_count(&mut map, "p", &[("i", &i), ("k", &k)])?;
    check_count(&mut map, "q", &[("j", &j), ("l", &l)])?;
    reject_leftovers(&map)?;
    if i.len() != k.len() {
        return Err(CliError::validation(format!("indices.k: has {} entries, indices.i has {}", k.len(), i.len())));
    }
    if j.len() != l.len() {
        return Err(CliError::validation(format!("indices.l: has {} entries, indices.j has {}", l.len(), j.len())));
    }
    IndexPattern::new(&i, &k, &j, &l).map_err(|e| CliError::validation(format!("indices: {e}")))
}

/// Blocks for any system: `i k j l` (two), `i1 j1 i2 j2 …` (multi), `i j` (boson, fermion).
pub fn query(kind: SystemKind, system: &System, tokens: &[String]) -> Result<MomentQuery, CliError> {
    let blocks = match kind {
        SystemKind::Two => {
            let pat = two_pattern(tokens)?;
            vec![IndexBlock::new(pat.i, pat.k), IndexBlock::new(pat.j, pat.l)]
        }
        SystemKind::Multi => {
            let mut map = parse_index_tokens(tokens)?;
            let blocks = (1..=system.marginal_dims().len())
                .map(|f| IndexBlock::new(take(&mut map, &format!("i{f}")), take(&mut map, &format!("j{f}"))))
                .collect();
            reject_leftovers(&map)?;
            blocks
        }
        SystemKind::Boson | SystemKind::Fermion => {
            let mut map = parse_index_tokens(tokens)?;
            let (i, j) = (take(&mut map, "i"), take(&mut map, "j"));
            check_count(&mut map, "p", &[("i", &i), ("j", &j)])?;
            reject_leftovers(&map)?;
            vec![IndexBlock::new(i, j)]
        }
    };
    MomentQuery::new(system.clone(), blocks).map_err(|e| CliError::validation(format!("indices: {e}")))
}

pub fn query_json(query: &MomentQuery) -> Value {
    let blocks: Vec<Value> = query.blocks.iter().map(|b| json!({ "rows": b.rows, "cols": b.cols })).collect();
    Value::Array(blocks)
}
