//! Text format for tensors: a JSON document with `shape`, `field` and a flat
//! row-major `data` list. Real entries are numbers; complex entries are
//! `[re, im]` pairs.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::to_machine_string;

use super::{DenseTensor, Field, TensorSpace, C64};

/// One scalar as it appears in a file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex([f64; 2]),
}

impl Scalar {
    pub fn encode(x: C64, field: Field) -> Scalar {
        match field {
            Field::Real => Scalar::Real(x.re),
            Field::Complex => Scalar::Complex([x.re, x.im]),
        }
    }

    pub fn decode(self, field: Field) -> Result<C64> {
        match (self, field) {
            (Scalar::Real(x), Field::Real) => Ok(C64::new(x, 0.0)),
            (Scalar::Complex([re, im]), Field::Complex) => Ok(C64::new(re, im)),
            (Scalar::Real(_), Field::Complex) => {
                Err(Error::Malformed("complex entries must be [re, im] pairs".into()))
            }
            (Scalar::Complex(_), Field::Real) => {
                Err(Error::Malformed("real entries must be plain numbers".into()))
            }
        }
    }
}

/// Serialized form of a [`DenseTensor`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorFile {
    pub shape: Vec<usize>,
    pub field: Field,
    pub data: Vec<Scalar>,
}

impl From<&DenseTensor> for TensorFile {
    fn from(t: &DenseTensor) -> Self {
        let field = t.space().field();
        TensorFile {
            shape: t.space().dims().to_vec(),
            field,
            data: t.data().iter().map(|&x| Scalar::encode(x, field)).collect(),
        }
    }
}

impl TryFrom<TensorFile> for DenseTensor {
    type Error = Error;

    fn try_from(f: TensorFile) -> Result<Self> {
        let space = TensorSpace::new(f.shape, f.field).map_err(|e| Error::Malformed(e.to_string()))?;
        let data = f
            .data
            .into_iter()
            .map(|s| s.decode(f.field))
            .collect::<Result<Vec<_>>>()?;
        if data.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
            return Err(Error::Malformed("entries must be finite".into()));
        }
        DenseTensor::new(space, data).map_err(|e| Error::Malformed(e.to_string()))
    }
}

pub fn tensor_to_string(t: &DenseTensor) -> Result<String> {
    to_machine_string(&TensorFile::from(t))
}

pub fn tensor_from_str(s: &str) -> Result<DenseTensor> {
    let f: TensorFile = serde_json::from_str(s).map_err(|e| Error::Malformed(e.to_string()))?;
    DenseTensor::try_from(f)
}

pub fn read_tensor(path: impl AsRef<Path>) -> Result<DenseTensor> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
        Error::Malformed(format!("cannot read {}: {e}", path.as_ref().display()))
    })?;
    tensor_from_str(&text)
}

pub fn write_tensor(path: impl AsRef<Path>, t: &DenseTensor) -> Result<()> {
    std::fs::write(path, tensor_to_string(t)?)?;
    Ok(())
}
