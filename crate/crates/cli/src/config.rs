//! The JSON run configuration and its validation into core types.
//!
//! ```json
//! {
//!   "field": "real",
//!   "dimension": 1,
//!   "coefficients": {"constant": 2.0},
//!   "forcing": "zero",
//!   "perturbation_set": {"interval": [-1.0, 1.0]},
//!   "seminorms": ["linf"],
//!   "horizon": 200,
//!   "tolerance": 1e-12,
//!   "seed": 7,
//!   "sampler": {"constant": [1.0]}
//! }
//! ```
//!
//! Scalars are a number or `[re, im]`. Unknown fields are rejected.

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use shadowrec_core::{
    BoundSet, CoeffLaw, CoefficientSpec, Field, ForcingLaw, ForcingSpec, ForcingTail, Sampler, Scalar, Seminorm,
    SeminormFamily, Vector,
};

use crate::error::CliError;

/// Longest pseudo-orbit a config may request.
pub const MAX_HORIZON: usize = 1_000_000;

/// Environment variable that replaces the configured seed.
pub const SEED_ENV: &str = "SHADOWREC_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldDoc {
    Real,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum ScalarDoc {
    Real(f64),
    Complex([f64; 2]),
}

pub type VectorDoc = Vec<ScalarDoc>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CoefficientsDoc {
    Constant(ScalarDoc),
    Periodic(Vec<ScalarDoc>),
    EventuallyConstant { prefix: Vec<ScalarDoc>, tail: ScalarDoc },
    Explicit(Vec<ScalarDoc>),
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingTailDoc {
    #[default]
    Zero,
    Constant(VectorDoc),
    Periodic(Vec<VectorDoc>),
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ForcingDoc {
    #[default]
    Zero,
    Constant(VectorDoc),
    Periodic(Vec<VectorDoc>),
    Explicit {
        values: Vec<VectorDoc>,
        #[serde(default)]
        tail: ForcingTailDoc,
    },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SeminormDoc {
    L1,
    L2,
    Linf,
    WeightedSup(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SetDoc {
    Ball { norm: SeminormDoc, radius: f64 },
    Interval([f64; 2]),
    Polytope(Vec<Vec<f64>>),
    FinitePoints(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SamplerDoc {
    #[default]
    Uniform,
    Vertex,
    Constant(VectorDoc),
}

/// File names for the outputs, relative to the output directory.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsDoc {
    #[serde(default = "default_csv")]
    pub csv: String,
    #[serde(default = "default_summary")]
    pub summary: String,
}

fn default_csv() -> String {
    "shadow.csv".into()
}

fn default_summary() -> String {
    "summary.json".into()
}

impl Default for OutputsDoc {
    fn default() -> Self {
        OutputsDoc { csv: default_csv(), summary: default_summary() }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub field: FieldDoc,
    pub dimension: usize,
    pub coefficients: CoefficientsDoc,
    #[serde(default)]
    pub forcing: ForcingDoc,
    pub perturbation_set: SetDoc,
    pub seminorms: Vec<SeminormDoc>,
    pub horizon: usize,
    #[serde(default)]
    pub q_override: Option<f64>,
    pub tolerance: f64,
    pub seed: u64,
    #[serde(default)]
    pub sampler: SamplerDoc,
    /// Starting state; zero when omitted.
    #[serde(default)]
    pub x0: Option<VectorDoc>,
    #[serde(default)]
    pub outputs: OutputsDoc,
}

/// A validated configuration, in core types.
#[derive(Debug, Clone)]
pub struct Instance {
    pub field: Field,
    pub dim: usize,
    pub a: CoefficientSpec,
    pub b: ForcingSpec,
    pub set: BoundSet,
    pub family: SeminormFamily,
    pub horizon: usize,
    pub q_override: Option<f64>,
    pub tolerance: f64,
    pub seed: u64,
    pub sampler: Sampler,
    pub x0: Vector,
    pub outputs: OutputsDoc,
}

/// Parses a config document. Errors name the offending field path and, for
/// syntax errors, the line and column.
pub fn parse_config(bytes: &[u8]) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path.is_empty() || path == "." {
            CliError::config(format!("config: {inner}"))
        } else {
            CliError::config(format!("config field `{path}`: {inner}"))
        }
    })?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(format!("reading {}", path.display()), e))?;
    parse_config(&bytes)
}

/// Applies `SHADOWREC_SEED` when set.
pub fn seed_override(configured: u64, env: Option<String>) -> Result<u64, CliError> {
    match env {
        None => Ok(configured),
        Some(s) => s
            .trim()
            .parse()
            .map_err(|_| CliError::config(format!("{SEED_ENV}={s:?} is not an unsigned 64-bit integer"))),
    }
}

impl FieldDoc {
    pub fn field(self) -> Field {
        match self {
            FieldDoc::Real => Field::Real,
            FieldDoc::Complex => Field::Complex,
        }
    }
}

fn field_error(what: &str) -> CliError {
    CliError::config(format!("config field `{what}`: complex value given but `field` is real"))
}

pub(crate) fn scalar(doc: ScalarDoc, field: Field, what: &str) -> Result<Scalar, CliError> {
    let s = match doc {
        ScalarDoc::Real(x) => Scalar::real(x),
        ScalarDoc::Complex([re, im]) => Scalar::complex(re, im),
    };
    if !s.is_finite() {
        return Err(CliError::config(format!("config field `{what}`: value is not finite")));
    }
    if field == Field::Real && s.field() == Field::Complex {
        return Err(field_error(what));
    }
    Ok(s.into_field(field)?)
}

pub(crate) fn vector(doc: &VectorDoc, field: Field, dim: usize, what: &str) -> Result<Vector, CliError> {
    if doc.len() != dim {
        return Err(CliError::config(format!("config field `{what}`: expected {dim} components, found {}", doc.len())));
    }
    let components =
        doc.iter().map(|&s| scalar(s, field, what).map(|s| s.as_complex())).collect::<Result<Vec<Complex64>, _>>()?;
    Ok(Vector::from_components(field, components))
}

fn vectors(docs: &[VectorDoc], field: Field, dim: usize, what: &str) -> Result<Vec<Vector>, CliError> {
    docs.iter().enumerate().map(|(i, v)| vector(v, field, dim, &format!("{what}[{i}]"))).collect()
}

fn scalars(docs: &[ScalarDoc], field: Field, what: &str) -> Result<Vec<Scalar>, CliError> {
    docs.iter().enumerate().map(|(i, &s)| scalar(s, field, &format!("{what}[{i}]"))).collect()
}

pub fn seminorm(doc: &SeminormDoc) -> Result<Seminorm, CliError> {
    Ok(match doc {
        SeminormDoc::L1 => Seminorm::L1,
        SeminormDoc::L2 => Seminorm::L2,
        SeminormDoc::Linf => Seminorm::LInf,
        SeminormDoc::WeightedSup(w) => Seminorm::weighted_sup(w.clone())?,
    })
}

pub fn bound_set(doc: &SetDoc) -> Result<BoundSet, CliError> {
    Ok(match doc {
        SetDoc::Ball { norm, radius } => BoundSet::Ball { norm: seminorm(norm)?, radius: *radius },
        SetDoc::Interval([lo, hi]) => BoundSet::Interval { lo: *lo, hi: *hi },
        SetDoc::Polytope(points) => BoundSet::Polytope(points.clone()),
        SetDoc::FinitePoints(points) => BoundSet::FinitePoints(points.clone()),
    })
}

fn prefixed(what: &str) -> impl Fn(shadowrec_core::Error) -> CliError + '_ {
    move |e| CliError::config(format!("config field `{what}`: {e}"))
}

impl RunConfig {
    /// Checks every field and cross-field constraint before anything runs.
    pub fn validate(&self) -> Result<Instance, CliError> {
        let field = self.field.field();
        let dim = self.dimension;
        if dim == 0 {
            return Err(CliError::config("config field `dimension`: must be at least 1"));
        }
        if self.horizon < 2 || self.horizon > MAX_HORIZON {
            return Err(CliError::config(format!("config field `horizon`: must lie in [2, {MAX_HORIZON}]")));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(CliError::config("config field `tolerance`: must be positive and finite"));
        }
        if let Some(q) = self.q_override {
            if !q.is_finite() {
                return Err(CliError::config("config field `q_override`: must be finite"));
            }
        }

        let law = match &self.coefficients {
            CoefficientsDoc::Constant(a) => CoeffLaw::Constant(scalar(*a, field, "coefficients.constant")?),
            CoefficientsDoc::Periodic(v) => CoeffLaw::Periodic(scalars(v, field, "coefficients.periodic")?),
            CoefficientsDoc::EventuallyConstant { prefix, tail } => CoeffLaw::EventuallyConstant {
                prefix: scalars(prefix, field, "coefficients.eventually_constant.prefix")?,
                tail: scalar(*tail, field, "coefficients.eventually_constant.tail")?,
            },
            CoefficientsDoc::Explicit(v) => {
                if v.len() < self.horizon {
                    return Err(CliError::config(format!(
                        "config field `coefficients.explicit`: {} values cannot cover horizon {}",
                        v.len(),
                        self.horizon
                    )));
                }
                CoeffLaw::ExplicitFinite(scalars(v, field, "coefficients.explicit")?)
            }
        };
        let a = CoefficientSpec::new(law).map_err(prefixed("coefficients"))?;

        let tail = |t: &ForcingTailDoc| -> Result<ForcingTail, CliError> {
            Ok(match t {
                ForcingTailDoc::Zero => ForcingTail::Zero,
                ForcingTailDoc::Constant(b) => ForcingTail::Constant(vector(b, field, dim, "forcing.explicit.tail")?),
                ForcingTailDoc::Periodic(v) => ForcingTail::Periodic(vectors(v, field, dim, "forcing.explicit.tail")?),
            })
        };
        let forcing = match &self.forcing {
            ForcingDoc::Zero => ForcingLaw::Zero,
            ForcingDoc::Constant(b) => ForcingLaw::Constant(vector(b, field, dim, "forcing.constant")?),
            ForcingDoc::Periodic(v) => ForcingLaw::Periodic(vectors(v, field, dim, "forcing.periodic")?),
            ForcingDoc::Explicit { values, tail: t } => ForcingLaw::ExplicitFinite {
                values: vectors(values, field, dim, "forcing.explicit.values")?,
                tail: tail(t)?,
            },
        };
        let b = ForcingSpec::new(forcing).map_err(prefixed("forcing"))?;

        let set = bound_set(&self.perturbation_set)
            .map_err(|e| CliError::config(format!("config field `perturbation_set`: {e}")))?;
        set.validate(field, dim).map_err(prefixed("perturbation_set"))?;

        if self.seminorms.is_empty() {
            return Err(CliError::config("config field `seminorms`: at least one seminorm is required"));
        }
        let members = self
            .seminorms
            .iter()
            .map(seminorm)
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| CliError::config(format!("config field `seminorms`: {e}")))?;
        let family = SeminormFamily::new(members).map_err(prefixed("seminorms"))?;
        family.check_dim(dim).map_err(prefixed("seminorms"))?;

        let sampler = match &self.sampler {
            SamplerDoc::Uniform => Sampler::Uniform,
            SamplerDoc::Vertex => {
                if matches!(set, BoundSet::Ball { .. }) {
                    return Err(CliError::config(
                        "config field `sampler`: the vertex sampler needs a vertex-based set",
                    ));
                }
                Sampler::Vertex
            }
            SamplerDoc::Constant(c) => {
                let c = vector(c, field, dim, "sampler.constant")?;
                if !set.contains(&c, 0.0).map_err(prefixed("sampler.constant"))? {
                    return Err(CliError::config(
                        "config field `sampler.constant`: defect lies outside the perturbation set",
                    ));
                }
                Sampler::Constant(c)
            }
        };

        let x0 = match &self.x0 {
            Some(v) => vector(v, field, dim, "x0")?,
            None => Vector::zeros(field, dim),
        };
        for (what, name) in [(&self.outputs.csv, "outputs.csv"), (&self.outputs.summary, "outputs.summary")] {
            let p = Path::new(what);
            if what.is_empty()
                || p.is_absolute()
                || p.components().any(|c| matches!(c, std::path::Component::ParentDir))
            {
                return Err(CliError::config(format!(
                    "config field `{name}`: must be a relative file name inside the output directory"
                )));
            }
        }
        if self.outputs.csv == self.outputs.summary {
            return Err(CliError::config("config field `outputs`: csv and summary must differ"));
        }

        Ok(Instance {
            field,
            dim,
            a,
            b,
            set,
            family,
            horizon: self.horizon,
            q_override: self.q_override,
            tolerance: self.tolerance,
            seed: self.seed,
            sampler,
            x0,
            outputs: self.outputs.clone(),
        })
    }
}
