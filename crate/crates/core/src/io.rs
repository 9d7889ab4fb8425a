//! File formats: JSON parsing and deterministic JSON emission.
//!
//! One matrix format is shared by every command: an object with `dim` and
//! row-major `re`/`im` arrays of length `dim * dim`. Witness files add a
//! `{"kind": "witness", "tol": ...}` header, channels are
//! `{"kind": "incoherent_channel", "kraus": [matrix, ...]}`. Parsers reject
//! mismatched lengths and non-finite entries.
//!
//! Emission is byte-deterministic: field order is fixed by the writers here
//! and every float is printed in scientific notation with 17 significant
//! digits, which round-trips `f64` exactly. Non-finite values (possible in
//! report fields such as infinite z-scores, never in matrices) are emitted
//! as JSON `null`.

use serde::Deserialize;

use crate::channels::IncoherentChannel;
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix, DEFAULT_TOL};
use crate::witness::Witness;

/// Scientific notation with 17 significant digits: the shortest fixed-width
/// format that reproduces every `f64` bit pattern on reparse. Non-finite
/// values become `null`.
pub fn fmt_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        "null".into()
    }
}

/// Comma-joined [`fmt_float`] rendering of a float slice.
pub fn fmt_floats(xs: &[f64]) -> String {
    xs.iter()
        .map(|&x| fmt_float(x))
        .collect::<Vec<_>>()
        .join(",")
}

/// The shared matrix object: `{"dim": d, "re": [...], "im": [...]}`.
pub fn matrix_json(m: &ComplexMatrix) -> String {
    let (re, im) = m.to_parts();
    format!(
        "{{\"dim\":{},\"re\":[{}],\"im\":[{}]}}",
        m.dim(),
        fmt_floats(&re),
        fmt_floats(&im)
    )
}

/// Witness file: the matrix object under a witness header carrying the
/// classification tolerance.
pub fn witness_json(w: &Witness) -> String {
    let (re, im) = w.matrix().to_parts();
    format!(
        "{{\"kind\":\"witness\",\"tol\":{},\"dim\":{},\"re\":[{}],\"im\":[{}]}}",
        fmt_float(w.tol()),
        w.dim(),
        fmt_floats(&re),
        fmt_floats(&im)
    )
}

/// Channel file: the Kraus family under an incoherent-channel header.
pub fn channel_json(ch: &IncoherentChannel) -> String {
    let kraus = ch
        .kraus()
        .iter()
        .map(matrix_json)
        .collect::<Vec<_>>()
        .join(",");
    format!(
        "{{\"kind\":\"incoherent_channel\",\"tol\":{},\"kraus\":[{}]}}",
        fmt_float(ch.tol()),
        kraus
    )
}

#[derive(Deserialize)]
struct RawMatrix {
    dim: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl RawMatrix {
    fn build(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::from_re_im(self.dim, &self.re, &self.im)
    }
}

#[derive(Deserialize)]
struct RawInput {
    kind: Option<String>,
    tol: Option<f64>,
    dim: Option<usize>,
    re: Option<Vec<f64>>,
    im: Option<Vec<f64>>,
    kraus: Option<Vec<RawMatrix>>,
}

impl RawInput {
    fn matrix(&self) -> Result<ComplexMatrix> {
        match (self.dim, &self.re, &self.im) {
            (Some(dim), Some(re), Some(im)) => ComplexMatrix::from_re_im(dim, re, im),
            _ => Err(Error::Parse(
                "matrix object needs dim, re, and im fields".into(),
            )),
        }
    }
}

/// Any object a command can read: a bare matrix, a tagged witness, or a
/// tagged channel.
pub enum ParsedInput {
    Matrix(ComplexMatrix),
    Witness {
        matrix: ComplexMatrix,
        tol: Option<f64>,
    },
    Channel(IncoherentChannel),
}

/// Parse a bare matrix object; header fields, if any, are ignored.
pub fn parse_matrix(json: &str) -> Result<ComplexMatrix> {
    let raw: RawMatrix = serde_json::from_str(json)?;
    raw.build()
}

/// Parse and validate a density matrix.
pub fn parse_state(json: &str, tol: f64) -> Result<DensityMatrix> {
    DensityMatrix::new(parse_matrix(json)?, tol)
}

/// Parse and validate a witness file. A missing header is accepted (any
/// matrix object is a witness candidate); a mismatched `kind` is not.
/// The embedded tolerance defaults to the crate-wide one.
pub fn parse_witness(json: &str) -> Result<Witness> {
    let raw: RawInput = serde_json::from_str(json)?;
    if let Some(kind) = &raw.kind {
        if kind != "witness" {
            return Err(Error::Parse(format!(
                "expected a witness object, found kind \"{kind}\""
            )));
        }
    }
    Witness::new(raw.matrix()?, raw.tol.unwrap_or(DEFAULT_TOL))
}

/// Parse and validate an incoherent channel file. The header is mandatory;
/// the embedded tolerance, if absent, falls back to `tol`.
pub fn parse_channel(json: &str, tol: f64) -> Result<IncoherentChannel> {
    let raw: RawInput = serde_json::from_str(json)?;
    match raw.kind.as_deref() {
        Some("incoherent_channel") => {}
        Some(kind) => {
            return Err(Error::Parse(format!(
                "expected an incoherent_channel object, found kind \"{kind}\""
            )))
        }
        None => {
            return Err(Error::Parse(
                "channel files need {\"kind\": \"incoherent_channel\"}".into(),
            ))
        }
    }
    let Some(kraus) = &raw.kraus else {
        return Err(Error::Parse("channel object needs a kraus array".into()));
    };
    let kraus = kraus.iter().map(RawMatrix::build).collect::<Result<_>>()?;
    IncoherentChannel::new(kraus, raw.tol.unwrap_or(tol))
}

/// Parse any input object, dispatching on the `kind` header: none for a
/// bare matrix, otherwise `witness` or `incoherent_channel`.
pub fn parse_any(json: &str, tol: f64) -> Result<ParsedInput> {
    let raw: RawInput = serde_json::from_str(json)?;
    match raw.kind.as_deref() {
        None => Ok(ParsedInput::Matrix(raw.matrix()?)),
        Some("witness") => Ok(ParsedInput::Witness {
            matrix: raw.matrix()?,
            tol: raw.tol,
        }),
        Some("incoherent_channel") => Ok(ParsedInput::Channel(parse_channel(json, tol)?)),
        Some(kind) => Err(Error::Parse(format!("unknown input kind \"{kind}\""))),
    }
}
