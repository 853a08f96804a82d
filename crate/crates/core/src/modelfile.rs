//! JSON model files.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "name": "boson.d2",
//!   "model": {
//!     "d": 2, "k_dim": 1,
//!     "g": [["1"]],
//!     "w_sym": {"vectors": []},
//!     "w_ext": {"vectors": [["1"]]},
//!     "order": "lex",
//!     "n_max": 6
//!   },
//!   "exchange": {"a": ["0"], "b": ["1"], "c": ["1"], "s": ["1"], "r": ["1"]},
//!   "guards": {"max_ambient_dim": 20000}
//! }
//! ```
//!
//! Every rational is a `"p/q"` (or `"p"`) string. Errors carry the JSON path
//! of the offending field, plus line and column for syntax errors.

use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactla::{Guard, Rational, RationalMatrix, Subspace};
use crate::fock::ExchangeData;
use crate::ratser;
use crate::statmodel::{preset, validate_form, StatModel};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelFile {
    pub name: Option<String>,
    pub model: StatModel,
    pub exchange: Option<ExchangeData>,
    pub guards: Guards,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Guards {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_ambient_dim: Option<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    model: RawModel,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    exchange: Option<ExchangeData>,
    #[serde(default, skip_serializing_if = "is_default")]
    guards: Guards,
}

fn is_default(g: &Guards) -> bool {
    *g == Guards::default()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    d: usize,
    k_dim: usize,
    g: Vec<RawRow>,
    w_sym: RawSubspace,
    w_ext: RawSubspace,
    #[serde(default = "lex")]
    order: RawOrder,
    n_max: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct RawRow(Vec<ratser::Str>);

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum RawSubspace {
    Vectors(Vec<RawRow>),
    Projector(Vec<RawRow>),
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawOrder {
    Named(String),
    Permutation(Vec<usize>),
}

fn lex() -> RawOrder {
    RawOrder::Named("lex".into())
}

fn at(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.into(),
        message: message.into(),
    }
}

fn rows_of(raw: Vec<RawRow>) -> Vec<Vec<Rational>> {
    raw.into_iter().map(|r| r.0.into_iter().map(|x| x.0).collect()).collect()
}

fn matrix(path: &str, rows: Vec<Vec<Rational>>, n: usize) -> Result<RationalMatrix> {
    if rows.len() != n {
        return Err(at(path, format!("expected {n} rows, found {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != n {
            return Err(at(format!("{path}[{i}]"), format!("expected {n} entries, found {}", r.len())));
        }
    }
    RationalMatrix::from_rows(n, rows)
}

fn subspace(path: &str, raw: RawSubspace, gram: &RationalMatrix) -> Result<Subspace> {
    let n = gram.rows();
    match raw {
        RawSubspace::Vectors(vs) => {
            let vs = rows_of(vs);
            for (i, v) in vs.iter().enumerate() {
                if v.len() != n {
                    return Err(at(
                        format!("{path}.vectors[{i}]"),
                        format!("expected k_dim² = {n} entries, found {}", v.len()),
                    ));
                }
            }
            Subspace::from_vectors(n, vs)
        }
        RawSubspace::Projector(rows) => {
            let path = format!("{path}.projector");
            let p = matrix(&path, rows_of(rows), n)?;
            let sq = p.mul(&p).sub(&p);
            if let Some((r, c)) = first_nonzero(&sq) {
                return Err(at(
                    path,
                    format!("not idempotent: (P² − P)[{r}][{c}] = {}", sq[(r, c)]),
                ));
            }
            // self-adjoint for g⊗g: G P is symmetric
            let gp = gram.mul(&p);
            let skew = gp.sub(&gp.transpose());
            if let Some((r, c)) = first_nonzero(&skew) {
                return Err(at(
                    path,
                    format!("not self-adjoint for g⊗g: (GP − (GP)ᵀ)[{r}][{c}] = {}", skew[(r, c)]),
                ));
            }
            Ok(Subspace::image(&p))
        }
    }
}

fn first_nonzero(m: &RationalMatrix) -> Option<(usize, usize)> {
    (0..m.rows())
        .flat_map(|r| (0..m.cols()).map(move |c| (r, c)))
        .find(|&(r, c)| !m[(r, c)].is_zero())
}

impl ModelFile {
    pub fn new(name: Option<String>, model: StatModel, exchange: Option<ExchangeData>) -> Self {
        ModelFile {
            name,
            model,
            exchange,
            guards: Guards::default(),
        }
    }

    pub fn parse_str(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let raw: RawFile = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            let path = if path == "." { String::new() } else { path };
            let message = if inner.is_syntax() || inner.is_eof() {
                inner.to_string()
            } else {
                format!("{inner} (line {}, column {})", inner.line(), inner.column())
            };
            at(if path.is_empty() { "<document>".to_string() } else { path }, message)
        })?;
        Self::from_raw(raw)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| at(path.display().to_string(), format!("cannot read file: {e}")))?;
        Self::parse_str(&text)
    }

    fn from_raw(raw: RawFile) -> Result<Self> {
        if raw.schema_version != SCHEMA_VERSION {
            return Err(at(
                "schema_version",
                format!("unsupported version {}, expected {SCHEMA_VERSION}", raw.schema_version),
            ));
        }
        let m = raw.model;
        if m.d == 0 {
            return Err(at("model.d", "must be at least 1"));
        }
        if m.k_dim == 0 {
            return Err(at("model.k_dim", "must be at least 1"));
        }
        let g = matrix("model.g", rows_of(m.g), m.k_dim)?;
        validate_form(&g, m.k_dim).map_err(|e| at("model.g", strip_prefix(e)))?;
        let gram = crate::exactla::kron(&g, &g);
        let w_sym = subspace("model.w_sym", m.w_sym, &gram)?;
        let w_ext = subspace("model.w_ext", m.w_ext, &gram)?;
        let order = match m.order {
            RawOrder::Named(s) if s == "lex" => None,
            RawOrder::Named(s) => {
                return Err(at("model.order", format!("expected \"lex\" or a permutation, found \"{s}\"")))
            }
            RawOrder::Permutation(p) => Some(p),
        };
        let model = StatModel::new(m.d, m.k_dim, g, w_sym, w_ext, order, m.n_max).map_err(|e| {
            let msg = strip_prefix(e);
            let field = if msg.starts_with("order") {
                "model.order"
            } else if msg.starts_with("n_max") {
                "model.n_max"
            } else {
                "model"
            };
            at(field, msg)
        })?;
        if let Some(ex) = &raw.exchange {
            for (name, t) in [("a", &ex.a), ("b", &ex.b), ("c", &ex.c), ("s", &ex.s), ("r", &ex.r)] {
                if let Some(t) = t {
                    if t.k() != m.k_dim {
                        return Err(at(
                            format!("exchange.{name}"),
                            format!("tensor over a {}-dimensional space, model has k_dim = {}", t.k(), m.k_dim),
                        ));
                    }
                }
            }
        }
        if raw.guards.max_ambient_dim == Some(0) {
            return Err(at("guards.max_ambient_dim", "must be positive"));
        }
        Ok(ModelFile {
            name: raw.name,
            model,
            exchange: raw.exchange,
            guards: raw.guards,
        })
    }

    fn to_raw(&self) -> RawFile {
        let m = &self.model;
        let raw_rows = |rows: Vec<Vec<Rational>>| rows
            .into_iter()
            .map(|r| RawRow(r.into_iter().map(ratser::Str).collect()))
            .collect::<Vec<_>>();
        RawFile {
            schema_version: SCHEMA_VERSION,
            name: self.name.clone(),
            model: RawModel {
                d: m.d(),
                k_dim: m.k_dim(),
                g: raw_rows(m.g().row_vectors()),
                w_sym: RawSubspace::Vectors(raw_rows(m.w_sym().vectors())),
                w_ext: RawSubspace::Vectors(raw_rows(m.w_ext().vectors())),
                order: if m.is_lex_order() {
                    RawOrder::Named("lex".into())
                } else {
                    RawOrder::Permutation(m.order().to_vec())
                },
                n_max: m.n_max(),
            },
            exchange: self.exchange.clone(),
            guards: self.guards,
        }
    }

    /// Canonical form: subspaces as their reduced bases.
    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_raw()).expect("model file serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_raw()).expect("model file serializes") + "\n"
    }

    /// Resolution order: explicit override, then the file's cap, then the
    /// environment/default guard.
    pub fn guard(&self, cli: Option<usize>) -> Guard {
        match cli.or(self.guards.max_ambient_dim) {
            Some(n) => Guard::new(n),
            None => Guard::from_env(),
        }
    }
}

fn strip_prefix(e: Error) -> String {
    match e {
        Error::InvalidModel(m) => m,
        other => other.to_string(),
    }
}

/// Preset files shipped with the tool: `(file stem, model file)`.
pub fn preset_files() -> Result<Vec<(String, ModelFile)>> {
    let mut out = Vec::new();
    for d in 1..=3 {
        for name in ["boson", "fermion"] {
            let model = preset(name, d)?;
            let k = model.k_dim();
            let ex = if name == "boson" {
                ExchangeData::bosonic(k)
            } else {
                ExchangeData::fermionic(k)
            };
            let stem = format!("{name}.d{d}");
            out.push((stem.clone(), ModelFile::new(Some(stem), model, Some(ex))));
        }
    }
    for d in [1, 2] {
        let stem = format!("example_sec5.d{d}");
        let model = preset("example_sec5", d)?;
        out.push((stem.clone(), ModelFile::new(Some(stem), model, None)));
    }
    // one user-style completion of the two-mode example: W_ext = span(h)
    let stem = "example_sec5.d2.wext_h".to_string();
    let h = Subspace::from_vectors(9, vec![crate::statmodel::sec5_h()])?;
    let model = preset("example_sec5", 2)?.with_w_ext(h)?;
    out.push((stem.clone(), ModelFile::new(Some(stem), model, None)));
    Ok(out)
}

/// Writes every preset as `<dir>/<stem>.json`, returning the paths.
pub fn write_presets(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| at(dir.display().to_string(), e.to_string()))?;
    let mut paths = Vec::new();
    for (stem, file) in preset_files()? {
        let path = dir.join(format!("{stem}.json"));
        std::fs::write(&path, file.to_json_pretty())
            .map_err(|e| at(path.display().to_string(), e.to_string()))?;
        paths.push(path);
    }
    Ok(paths)
}
