//! JSON encodings shared by the file formats: complex numbers as `[re, im]`
//! pairs, matrices as row lists, and the `"format": "qmix/1"` version tag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{CMatrix, C64};

pub const FORMAT_TAG: &str = "qmix/1";

pub type ComplexJson = [f64; 2];
pub type MatrixJson = Vec<Vec<ComplexJson>>;

pub fn complex_to_json(z: C64) -> ComplexJson {
    [z.re, z.im]
}

pub fn complex_from_json(z: ComplexJson) -> C64 {
    C64::new(z[0], z[1])
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| complex_to_json(m[(i, j)])).collect())
        .collect()
}

pub fn matrix_from_json(rows: &MatrixJson) -> Result<CMatrix> {
    let n = rows.len();
    let m = rows.first().map_or(0, Vec::len);
    if rows.iter().any(|r| r.len() != m) {
        return Err(Error::Format("ragged matrix rows".into()));
    }
    Ok(CMatrix::from_fn(n, m, |i, j| complex_from_json(rows[i][j])))
}

/// Rejects documents whose `format` field is present but not [`FORMAT_TAG`].
pub fn check_format(tag: Option<&str>) -> Result<()> {
    match tag {
        None => Ok(()),
        Some(t) if t == FORMAT_TAG => Ok(()),
        Some(t) => Err(Error::Format(format!(
            "unsupported format `{t}`, expected `{FORMAT_TAG}`"
        ))),
    }
}

/// Wrapper that stamps the format tag onto any serializable payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tagged<T> {
    pub format: String,
    #[serde(flatten)]
    pub body: T,
}

impl<T> Tagged<T> {
    pub fn new(body: T) -> Self {
        Tagged {
            format: FORMAT_TAG.to_string(),
            body,
        }
    }
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("serializable value")
}
