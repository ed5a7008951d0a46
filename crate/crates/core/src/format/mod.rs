//! File formats. Parse failures and validation failures are kept apart so
//! callers can tell a malformed file from a well-formed but invalid object.

mod diagram;
mod equation;
mod maps;
mod poset;

use std::path::{Path, PathBuf};

use serde_json::Value;
use thiserror::Error;

use crate::diagram::DiagramError;
use crate::ep::EpError;
use crate::lift::LiftError;
use crate::order::{FinPoset, OrderError};
use crate::presheaf::PresheafError;
use crate::solver::builtin_constants;

pub use diagram::{
    load_diagram, load_presheaf, parse_diagram_json, parse_diagram_text, parse_presheaf_text, LoadedDiagram,
};
pub use equation::{load_equation, parse_equation, EquationFile};
pub use maps::{
    ep_from_json, ep_to_json, internal_kernel_from_json, internal_lifted_from_json, internal_lifted_to_json,
    lifted_from_json, lifted_to_json, load_ep, load_map, load_strict_ep, map_from_json, map_to_json,
    strict_ep_from_json, strict_ep_to_json,
};
pub use poset::{
    load_poset, poset_from_json, poset_from_text, poset_to_dot, poset_to_json, poset_to_text,
};

/// A well-formed input that fails validation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Invalid {
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Ep(#[from] EpError),
    #[error(transparent)]
    Lift(#[from] LiftError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Presheaf(#[from] PresheafError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("{path}: {msg}")]
    Io { path: String, msg: String },
    #[error("{path}:{line}: {msg}")]
    Syntax { path: String, line: usize, msg: String },
    #[error("{path}: {msg}")]
    Json { path: String, msg: String },
    #[error("{path}: {error}")]
    Invalid { path: String, error: Box<Invalid> },
}

impl FormatError {
    /// True when the input parsed but describes an invalid object.
    pub fn is_validation(&self) -> bool {
        matches!(self, FormatError::Invalid { .. })
    }

    pub(crate) fn invalid(path: &Path, error: impl Into<Invalid>) -> Self {
        FormatError::Invalid { path: shown(path), error: Box::new(error.into()) }
    }

    pub(crate) fn json(path: &Path, msg: impl Into<String>) -> Self {
        FormatError::Json { path: shown(path), msg: msg.into() }
    }

    pub(crate) fn syntax(path: &Path, line: usize, msg: impl Into<String>) -> Self {
        FormatError::Syntax { path: shown(path), line, msg: msg.into() }
    }
}

pub(crate) fn shown(path: &Path) -> String {
    path.display().to_string()
}

pub(crate) fn read(path: &Path) -> Result<String, FormatError> {
    std::fs::read_to_string(path).map_err(|e| FormatError::Io { path: shown(path), msg: e.to_string() })
}

pub(crate) fn read_json(path: &Path) -> Result<Value, FormatError> {
    let text = read(path)?;
    serde_json::from_str(&text).map_err(|e| FormatError::json(path, e.to_string()))
}

pub(crate) fn is_json(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "json")
}

/// Resolves `rel` against the directory holding `origin`.
pub(crate) fn relative_to(origin: &Path, rel: &str) -> PathBuf {
    let p = Path::new(rel);
    if p.is_absolute() {
        return p.to_path_buf();
    }
    origin.parent().map_or_else(|| p.to_path_buf(), |d| d.join(p))
}

/// A poset reference inside another file: `0`, `1`, a built-in constant name,
/// or a path relative to the referring file.
pub fn resolve_poset(origin: &Path, token: &str) -> Result<FinPoset, FormatError> {
    match token {
        "0" => Ok(FinPoset::empty()),
        "1" => Ok(FinPoset::point()),
        t => match builtin_constants().get(t) {
            Some(p) => Ok(p.clone()),
            None => load_poset(&relative_to(origin, t)),
        },
    }
}

/// A poset given in JSON either inline or as a reference string.
pub(crate) fn poset_value(origin: &Path, v: &Value) -> Result<FinPoset, FormatError> {
    match v {
        Value::String(s) => resolve_poset(origin, s),
        Value::Object(_) => poset_from_json(v, origin),
        _ => Err(FormatError::json(origin, "expected a poset object or a reference string")),
    }
}

/// Everything `check` knows how to validate.
#[derive(Debug, Clone)]
pub enum Artifact {
    Poset(FinPoset),
    Map(crate::order::MonotoneMap),
    Ep(crate::ep::EpPair),
    StrictEp(crate::lift::StrictEpPair),
    Diagram(Box<LoadedDiagram>),
    Presheaf(crate::presheaf::PresheafPoset),
    Equation(Box<EquationFile>),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Poset(_) => "poset",
            Artifact::Map(_) => "map",
            Artifact::Ep(_) => "ep-pair",
            Artifact::StrictEp(_) => "strict ep-pair",
            Artifact::Diagram(_) => "diagram",
            Artifact::Presheaf(_) => "presheaf",
            Artifact::Equation(_) => "equation",
        }
    }
}

fn first_keyword(text: &str) -> Option<&str> {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())
        .and_then(|l| l.split_whitespace().next())
}

/// Loads any supported file, telling the kinds apart by extension and by
/// their leading keyword or JSON keys.
pub fn load_any(path: &Path, budget: &crate::Budget) -> Result<Artifact, FormatError> {
    if is_json(path) {
        let v = read_json(path)?;
        let has = |k: &str| v.get(k).is_some();
        return if has("elements") {
            Ok(Artifact::Poset(poset_from_json(&v, path)?))
        } else if has("index") {
            Ok(Artifact::Diagram(Box::new(parse_diagram_json(&v, path, budget)?)))
        } else if has("emb") && v.get("kind").and_then(Value::as_str) == Some("strict") {
            Ok(Artifact::StrictEp(strict_ep_from_json(&v, path)?))
        } else if has("emb") {
            Ok(Artifact::Ep(ep_from_json(&v, path)?))
        } else if has("map") {
            Ok(Artifact::Map(map_from_json(&v, path)?))
        } else {
            Err(FormatError::json(path, "unrecognized JSON document"))
        };
    }
    let text = read(path)?;
    match first_keyword(&text) {
        Some("poset") => Ok(Artifact::Poset(poset_from_text(&text, path)?)),
        Some("mode") | Some("index") => Ok(Artifact::Diagram(Box::new(parse_diagram_text(&text, path, budget)?))),
        Some("base") if text.contains("stage") || text.contains("restrict") => {
            Ok(Artifact::Presheaf(parse_presheaf_text(&text, path)?))
        }
        Some("domain") | Some("base") | Some("depth") | Some("const") => {
            Ok(Artifact::Equation(Box::new(parse_equation(&text, path)?)))
        }
        _ => Err(FormatError::syntax(path, 1, "unrecognized file: expected `poset`, `index`, `base` or `domain`")),
    }
}
