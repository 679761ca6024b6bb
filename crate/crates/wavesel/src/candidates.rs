//! Candidate lists from the command line and model files.
//!
//! A candidate list is a comma separated list of tokens:
//!
//! * `builtin` for the whole builtin catalog, or a single builtin id such as `f3`;
//! * `glm:<family>:<link>`, for example `glm:gamma:log`;
//! * `glm:<family>` for every link of that family;
//! * `file:<path>` for the models of a model file.
//!
//! A model file holds one model per line, `id = expression` with an optional
//! `; start = v1, v2, ...`. Text after `#` is a comment.
//!
//! ```text
//! # Michaelis-Menten with an offset
//! f5 = b1 + b2*x/(b3 + x) ; start = 0, 100, 20
//! f6 = b1*exp(b2*x)
//! ```

use std::path::{Path, PathBuf};
use std::sync::Arc;

use wavesel_core::glm::{Family, Link};
use wavesel_core::nls::{builtin, builtin_catalog, ExprModel, NlsModel};
use wavesel_core::select::CandidateModel;

use crate::error::{CliError, CliResult};

/// Parses a model file body.
pub fn parse_model_file(text: &str) -> CliResult<Vec<Arc<dyn NlsModel>>> {
    let mut models: Vec<Arc<dyn NlsModel>> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |msg: String| CliError::Input(format!("model file line {}: {msg}", lineno + 1));
        let (head, start) = match line.split_once(';') {
            Some((head, tail)) => {
                let (key, values) = tail
                    .split_once('=')
                    .ok_or_else(|| err(format!("expected `start = ...` after `;`, got {tail:?}")))?;
                if key.trim() != "start" {
                    return Err(err(format!("unknown attribute {:?}", key.trim())));
                }
                let values = values
                    .split(',')
                    .map(|v| v.trim().parse::<f64>().map_err(|_| err(format!("bad start value {:?}", v.trim()))))
                    .collect::<CliResult<Vec<f64>>>()?;
                (head, Some(values))
            }
            None => (line, None),
        };
        let (id, expr) = head.split_once('=').ok_or_else(|| err("expected `id = expression`".into()))?;
        let id = id.trim();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(err(format!("invalid model id {id:?}")));
        }
        let model = ExprModel::new(id, expr.trim(), start).map_err(|e| err(e.to_string()))?;
        models.push(Arc::new(model));
    }
    Ok(models)
}

pub fn load_model_file(path: &Path) -> CliResult<Vec<Arc<dyn NlsModel>>> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_model_file(&text).map_err(|e| match e {
        CliError::Input(m) => CliError::Input(format!("{}: {m}", path.display())),
        other => other,
    })
}

fn parse_glm(token: &str) -> CliResult<Vec<CandidateModel>> {
    let parts: Vec<&str> = token.split(':').collect();
    let family: Family = parts.get(1).ok_or_else(|| CliError::Input(format!("bad GLM token {token:?}")))?.parse()?;
    match parts.len() {
        2 => Ok(family.links().iter().map(|l| CandidateModel::glm(family, *l)).collect()),
        3 => {
            let link: Link = parts[2].parse()?;
            if !family.links().contains(&link) {
                return Err(CliError::Input(format!("link {link} is not available for the {family} family")));
            }
            Ok(vec![CandidateModel::glm(family, link)])
        }
        _ => Err(CliError::Input(format!("bad GLM token {token:?}; expected glm:<family>:<link>"))),
    }
}

/// Resolves a candidate list. Relative `file:` paths are taken from `base_dir`.
pub fn parse_candidates(list: &str, base_dir: &Path) -> CliResult<Vec<CandidateModel>> {
    let mut out: Vec<CandidateModel> = Vec::new();
    for token in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if token == "builtin" {
            out.extend(builtin_catalog().into_iter().map(CandidateModel::nonlinear));
        } else if token.starts_with("glm:") {
            out.extend(parse_glm(token)?);
        } else if let Some(path) = token.strip_prefix("file:") {
            let path = resolve(base_dir, path);
            out.extend(load_model_file(&path)?.into_iter().map(CandidateModel::nonlinear));
        } else if let Some(model) = builtin(token) {
            out.push(CandidateModel::nonlinear(model));
        } else {
            return Err(CliError::Input(format!("unknown candidate {token:?}")));
        }
    }
    for (i, c) in out.iter().enumerate() {
        if out[..i].iter().any(|d| d.id == c.id) {
            return Err(CliError::Input(format!("candidate {} is listed twice", c.id)));
        }
    }
    if out.len() < 2 {
        return Err(CliError::Input("at least two candidates are required".into()));
    }
    Ok(out)
}

pub(crate) fn resolve(base_dir: &Path, path: &str) -> PathBuf {
    let p = Path::new(path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base_dir.join(p)
    }
}
