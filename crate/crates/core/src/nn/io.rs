//! Binary model files: magic, version, level, layer widths, then each
//! layer's weights (row-major, inputs × outputs) and biases, all
//! little-endian.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};

use crate::code::CodeSpec;
use crate::error::{Error, Result};

use super::{Layer, MlpSpec};

pub const MODEL_MAGIC: &[u8; 8] = b"SMHC-MLP";
pub const MODEL_VERSION: u32 = 1;
const MAX_LAYERS: usize = 64;
const MAX_WIDTH: usize = 1 << 20;

pub fn encode_model(net: &MlpSpec) -> Vec<u8> {
    let mut out = Vec::with_capacity(24 + 8 * net.num_parameters());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&(net.level() as u32).to_le_bytes());
    out.extend_from_slice(&(net.layers().len() as u32).to_le_bytes());
    for d in net.dims() {
        out.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for layer in net.layers() {
        for v in layer.weights.iter().chain(&layer.bias) {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
}

impl Reader<'_> {
    fn take(&mut self, n: usize) -> Result<&[u8]> {
        if self.bytes.len() < n {
            return Err(Error::Format("model file is truncated".into()));
        }
        let (head, tail) = self.bytes.split_at(n);
        self.bytes = tail;
        Ok(head)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        Ok(self
            .take(8 * n)?
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
            .collect())
    }
}

pub fn decode_model(bytes: &[u8]) -> Result<MlpSpec> {
    let mut r = Reader { bytes };
    if r.take(8)? != MODEL_MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let version = r.u32()?;
    if version != MODEL_VERSION {
        return Err(Error::Format(format!(
            "model format version {version}, expected {MODEL_VERSION}"
        )));
    }
    let level = r.u32()? as usize;
    let count = r.u32()? as usize;
    if count == 0 || count > MAX_LAYERS {
        return Err(Error::Format(format!("implausible layer count {count}")));
    }
    let dims = (0..=count)
        .map(|_| r.u32().map(|d| d as usize))
        .collect::<Result<Vec<_>>>()?;
    if dims.iter().any(|&d| d == 0 || d > MAX_WIDTH) {
        return Err(Error::Format(format!("implausible layer widths {dims:?}")));
    }
    let layers = dims
        .windows(2)
        .map(|w| {
            let weights = Array2::from_shape_vec((w[0], w[1]), r.f64s(w[0] * w[1])?)
                .map_err(|e| Error::Format(e.to_string()))?;
            let bias = Array1::from_vec(r.f64s(w[1])?);
            Ok(Layer { weights, bias })
        })
        .collect::<Result<Vec<_>>>()?;
    if !r.bytes.is_empty() {
        return Err(Error::Format(format!(
            "{} unexpected trailing bytes in model file",
            r.bytes.len()
        )));
    }
    MlpSpec::from_layers(level, layers)
}

pub fn save_model(net: &MlpSpec, path: &Path) -> Result<()> {
    fs::write(path, encode_model(net))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<MlpSpec> {
    decode_model(&fs::read(path)?)
}

/// Loads a model and checks that it reads this code's syndrome and emits its
/// label.
pub fn load_model_for(code: &CodeSpec, path: &Path) -> Result<MlpSpec> {
    let net = load_model(path)?;
    if net.level() != code.level()
        || net.input_dim() != code.num_stabilizers()
        || net.output_dim() != code.num_logicals()
    {
        return Err(Error::Format(format!(
            "dimension mismatch: model is level {} ({}→{}), code is level {} ({}→{})",
            net.level(),
            net.input_dim(),
            net.output_dim(),
            code.level(),
            code.num_stabilizers(),
            code.num_logicals()
        )));
    }
    Ok(net)
}
