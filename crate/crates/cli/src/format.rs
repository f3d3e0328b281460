//! On-disk JSON formats for tuples and vectors, and the byte-stable writer.
//!
//! Complex entries are `[re, im]` pairs, matrices are row-major. Floats are
//! written with 17 significant digits so that a load/store cycle reproduces
//! the same bytes.

use std::io;
use std::path::Path;

use krange::{Matrix, Signature, Tuple, C64};
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;
use serde_json::Value;

use crate::CliError;

pub type Pair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TupleFile {
    pub dim: usize,
    pub signature: Vec<i64>,
    pub ops: Vec<MatrixFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorFile {
    pub dim: usize,
    pub data: Vec<Pair>,
}

pub fn pairs(v: &[C64]) -> Vec<Pair> {
    v.iter().map(|c| [c.re, c.im]).collect()
}

fn complex(data: &[Pair]) -> Vec<C64> {
    data.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

impl MatrixFile {
    pub fn from_matrix(m: &Matrix) -> Self {
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data: pairs(m.as_slice()),
        }
    }

    pub fn to_matrix(&self) -> Result<Matrix, CliError> {
        Matrix::from_row_major(self.rows, self.cols, complex(&self.data))
            .map_err(|e| CliError::Parse(format!("matrix: {e}")))
    }
}

impl TupleFile {
    pub fn from_tuple(t: &Tuple, meta: Option<Value>) -> Self {
        Self {
            dim: t.dim(),
            signature: t.signature().as_ints(),
            ops: t.ops().iter().map(MatrixFile::from_matrix).collect(),
            meta,
        }
    }

    /// Operators and signature after shape checks. Validity is not judged here.
    pub fn to_parts(&self) -> Result<(Vec<Matrix>, Signature), CliError> {
        if self.ops.len() != self.signature.len() {
            return Err(CliError::Parse(format!(
                "{} operators but {} signature entries",
                self.ops.len(),
                self.signature.len()
            )));
        }
        let signature = Signature::from_ints(&self.signature)
            .map_err(|e| CliError::Parse(format!("signature: {e}")))?;
        let ops = self
            .ops
            .iter()
            .enumerate()
            .map(|(k, m)| {
                if m.rows != self.dim || m.cols != self.dim {
                    return Err(CliError::Parse(format!(
                        "operator {k} is {}x{}, expected {}x{}",
                        m.rows, m.cols, self.dim, self.dim
                    )));
                }
                m.to_matrix()
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok((ops, signature))
    }
}

impl VectorFile {
    pub fn from_slice(v: &[C64]) -> Self {
        Self {
            dim: v.len(),
            data: pairs(v),
        }
    }

    pub fn to_vector(&self) -> Result<Vec<C64>, CliError> {
        if self.data.len() != self.dim {
            return Err(CliError::Parse(format!(
                "vector declares dim {} but has {} entries",
                self.dim,
                self.data.len()
            )));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return Err(CliError::Parse("vector has non-finite entries".into()));
        }
        Ok(complex(&self.data))
    }
}

/// Compact JSON with every float as `{:.16e}`.
#[derive(Debug, Clone, Copy, Default)]
pub struct FixedDigits;

impl Formatter for FixedDigits {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes to UTF-8 JSON followed by a newline.
pub fn to_json_bytes<T: Serialize + ?Sized>(value: &T) -> Vec<u8> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, FixedDigits);
    value
        .serialize(&mut ser)
        .expect("in-memory serialization cannot fail");
    out.push(b'\n');
    out
}

pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
}

pub fn read_tuple_file(path: &Path) -> Result<TupleFile, CliError> {
    read_json(path)
}

pub fn read_vector(path: &Path, dim: usize) -> Result<Vec<C64>, CliError> {
    let v = read_json::<VectorFile>(path)?.to_vector()?;
    if v.len() != dim {
        return Err(CliError::Parse(format!(
            "{}: vector has dim {}, tuple acts on dim {dim}",
            path.display(),
            v.len()
        )));
    }
    Ok(v)
}

/// Writes to `path`, or to stdout when no path is given.
pub fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) => std::fs::write(p, bytes).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            use io::Write;
            let mut out = io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}
