//! Instance files: the JSON form of a [`RecurrenceSpec`].
//!
//! ```json
//! {"schema": 1, "field": "rational" | {"prime": p}, "d": 1, "m": 1, "k": 1, "l": 0,
//!  "degrees": [0, 1], "initials": [["1"], ["0", "1"]],
//!  "steps": {"2": {"g": ["0", "1"], "t": [{"alpha": [0, 0], "coeffs": ["0", "1"]}], "v": "-1"}}}
//! ```
//!
//! Coefficient arrays are ascending in degree. Scalars are written as text
//! (`"a/b"` or `"a"` over Q, a residue in `[0, p)` over F_p); bare JSON
//! integers are accepted on input.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use recres_core::{FieldDescriptor, Poly, RecurrenceSpec, Scalar, StepCoeffs, TTerm};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed instance JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0} (expected {SCHEMA_VERSION})")]
    Schema(u32),
    #[error("invalid instance: {0}")]
    Core(#[from] recres_core::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldSpec {
    Rational,
    Prime(u64),
}

impl FieldSpec {
    pub fn descriptor(self) -> recres_core::Result<FieldDescriptor> {
        match self {
            FieldSpec::Rational => Ok(FieldDescriptor::Rational),
            FieldSpec::Prime(p) => FieldDescriptor::prime(p),
        }
    }

    pub fn from_descriptor(descriptor: FieldDescriptor) -> Self {
        match descriptor.modulus() {
            None => FieldSpec::Rational,
            Some(p) => FieldSpec::Prime(p),
        }
    }
}

/// A scalar as found in the file: canonical text, or a bare integer.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarText {
    Text(String),
    Int(i64),
}

impl ScalarText {
    fn parse(&self, descriptor: FieldDescriptor) -> recres_core::Result<Scalar> {
        match self {
            ScalarText::Text(s) => Scalar::parse(descriptor, s),
            ScalarText::Int(n) => Scalar::parse(descriptor, &n.to_string()),
        }
    }
}

impl From<&Scalar> for ScalarText {
    fn from(s: &Scalar) -> Self {
        ScalarText::Text(s.to_string())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TTermFile {
    pub alpha: Vec<usize>,
    pub coeffs: Vec<ScalarText>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub g: Vec<ScalarText>,
    #[serde(default)]
    pub t: Vec<TTermFile>,
    pub v: ScalarText,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub schema: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub field: FieldSpec,
    pub d: usize,
    pub m: usize,
    pub k: usize,
    pub l: usize,
    pub degrees: Vec<usize>,
    pub initials: Vec<Vec<ScalarText>>,
    pub steps: BTreeMap<usize, StepFile>,
}

fn poly_from(descriptor: FieldDescriptor, coeffs: &[ScalarText]) -> recres_core::Result<Poly> {
    let scalars = coeffs.iter().map(|c| c.parse(descriptor)).collect::<recres_core::Result<Vec<_>>>()?;
    Poly::new(descriptor, scalars)
}

fn poly_to(p: &Poly) -> Vec<ScalarText> {
    p.coeffs().iter().map(ScalarText::from).collect()
}

impl InstanceFile {
    pub fn to_spec(&self) -> Result<RecurrenceSpec, LoadError> {
        if self.schema != SCHEMA_VERSION {
            return Err(LoadError::Schema(self.schema));
        }
        let descriptor = self.field.descriptor()?;
        let initials =
            self.initials.iter().map(|c| poly_from(descriptor, c)).collect::<recres_core::Result<Vec<_>>>()?;
        let mut steps = BTreeMap::new();
        for (&n, step) in &self.steps {
            let t_terms = step
                .t
                .iter()
                .map(|t| Ok(TTerm { alpha: t.alpha.clone(), poly: poly_from(descriptor, &t.coeffs)? }))
                .collect::<recres_core::Result<Vec<_>>>()?;
            steps.insert(n, StepCoeffs { g: poly_from(descriptor, &step.g)?, t_terms, v: step.v.parse(descriptor)? });
        }
        Ok(RecurrenceSpec::new(descriptor, self.d, self.m, self.k, self.l, self.degrees.clone(), initials, steps)?)
    }

    pub fn from_spec(spec: &RecurrenceSpec, name: Option<String>, seed: Option<u64>) -> Self {
        let steps = spec
            .steps()
            .iter()
            .map(|(&n, step)| {
                let t = step
                    .t_terms
                    .iter()
                    .map(|t| TTermFile { alpha: t.alpha.clone(), coeffs: poly_to(&t.poly) })
                    .collect();
                (n, StepFile { g: poly_to(&step.g), t, v: ScalarText::from(&step.v) })
            })
            .collect();
        Self {
            schema: SCHEMA_VERSION,
            name,
            seed,
            field: FieldSpec::from_descriptor(spec.descriptor()),
            d: spec.d(),
            m: spec.m(),
            k: spec.k(),
            l: spec.l(),
            degrees: spec.degrees().to_vec(),
            initials: spec.initials().iter().map(poly_to).collect(),
            steps,
        }
    }

    pub fn parse(text: &str) -> Result<Self, LoadError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self, LoadError> {
        let text =
            fs::read_to_string(path).map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    /// Pretty JSON with a trailing newline; stable for identical inputs.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("instance serializes");
        s.push('\n');
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SCHUR: &str = r#"{
        "schema": 1, "name": "schur", "field": "rational",
        "d": 1, "m": 1, "k": 1, "l": 0, "degrees": [0, 1],
        "initials": [["1"], ["0", "1"]],
        "steps": {"2": {"g": ["0", "1"], "v": "-1"}, "3": {"g": [0, 1], "t": [], "v": -1}}
    }"#;

    #[test]
    fn parses_schema() {
        let file = InstanceFile::parse(SCHUR).unwrap();
        let spec = file.to_spec().unwrap();
        assert_eq!(spec.d(), 1);
        assert_eq!(spec.steps().len(), 2);
        assert_eq!(spec.step_coeffs(3).unwrap().v, Scalar::from_integer(FieldDescriptor::Rational, -1));
    }

    #[test]
    fn round_trips_through_spec() {
        let spec = InstanceFile::parse(SCHUR).unwrap().to_spec().unwrap();
        let written = InstanceFile::from_spec(&spec, Some("schur".into()), None).to_json();
        let reread = InstanceFile::parse(&written).unwrap();
        assert_eq!(reread.to_spec().unwrap(), spec);
        assert_eq!(InstanceFile::from_spec(&spec, Some("schur".into()), None).to_json(), written);
        assert!(written.contains("\"2\": {"));
    }

    #[test]
    fn prime_field_encoding() {
        let text = r#"{"schema":1,"field":{"prime":7},"d":1,"m":1,"k":1,"l":0,"degrees":[0,1],
            "initials":[["1"],["0","1"]],"steps":{"2":{"g":["0","1"],"v":"-1"}}}"#;
        let file = InstanceFile::parse(text).unwrap();
        assert_eq!(file.field, FieldSpec::Prime(7));
        let spec = file.to_spec().unwrap();
        let written = InstanceFile::from_spec(&spec, None, None);
        assert_eq!(written.steps[&2].v, ScalarText::Text("6".into()));
        assert!(written.to_json().contains("\"prime\": 7"));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(InstanceFile::parse("{"), Err(LoadError::Json(_))));
        let wrong_schema = SCHUR.replace("\"schema\": 1", "\"schema\": 2");
        assert!(matches!(InstanceFile::parse(&wrong_schema).unwrap().to_spec(), Err(LoadError::Schema(2))));
        let bad_modulus = SCHUR.replace("\"rational\"", "{\"prime\": 8}");
        assert!(matches!(InstanceFile::parse(&bad_modulus).unwrap().to_spec(), Err(LoadError::Core(_))));
        let bad_scalar = SCHUR.replace("\"-1\"", "\"one\"");
        assert!(matches!(InstanceFile::parse(&bad_scalar).unwrap().to_spec(), Err(LoadError::Core(_))));
        let unknown = SCHUR.replace("\"schema\": 1", "\"schema\": 1, \"extra\": 0");
        assert!(InstanceFile::parse(&unknown).is_err());
    }
}
