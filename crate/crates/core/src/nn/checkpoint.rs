//! Model checkpoints: magic `RGMD`, a length-prefixed structured-text config
//! block, per-layer f32 parameter blocks in declaration order, then optional
//! Adam state. Files round-trip bit-exactly.

use serde::{Deserialize, Serialize};

use super::{Adam, Model, ModelConfig, NnError};

const MAGIC: &[u8; 4] = b"RGMD";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ConfigBlock {
    model: ModelConfig,
    /// Caller-owned metadata (label maps, feature configs); opaque here.
    #[serde(default)]
    app: toml::Table,
}

fn push_f32s(out: &mut Vec<u8>, values: &[f64]) {
    for &v in values {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
}

/// Serialize a model, optional optimizer state, and caller metadata.
pub fn save_model(model: &Model, adam: Option<&Adam>, app: toml::Table) -> Vec<u8> {
    let block = ConfigBlock {
        model: model.config().clone(),
        app,
    };
    let config_text = toml::to_string(&block).expect("config serializes");
    let mut out = Vec::new();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(config_text.len() as u32).to_le_bytes());
    out.extend_from_slice(config_text.as_bytes());
    for layer_state in model.snapshot_state() {
        for vec in layer_state {
            push_f32s(&mut out, &vec);
        }
    }
    match adam {
        None => out.push(0),
        Some(a) => {
            out.push(1);
            out.extend_from_slice(&a.lr.to_le_bytes());
            out.extend_from_slice(&a.beta1.to_le_bytes());
            out.extend_from_slice(&a.beta2.to_le_bytes());
            out.extend_from_slice(&a.epsilon.to_le_bytes());
            out.extend_from_slice(&a.t.to_le_bytes());
            out.extend_from_slice(&(a.m.len() as u32).to_le_bytes());
            for vec in a.m.iter().chain(a.v.iter()) {
                out.extend_from_slice(&(vec.len() as u32).to_le_bytes());
                push_f32s(&mut out, vec);
            }
        }
    }
    out
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], NnError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.bytes.len())
            .ok_or_else(|| NnError::Checkpoint("truncated file".to_string()))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self) -> Result<u32, NnError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, NnError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f64(&mut self) -> Result<f64, NnError> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn f32s(&mut self, n: usize) -> Result<Vec<f64>, NnError> {
        Ok(self
            .take(4 * n)?
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes([b[0], b[1], b[2], b[3]])))
            .collect())
    }
}

/// Deserialize a checkpoint into a fresh model (plus optimizer state and the
/// caller metadata written at save time).
pub fn load_model(bytes: &[u8]) -> Result<(Model, Option<Adam>, toml::Table), NnError> {
    let mut cur = Cursor { bytes, pos: 0 };
    if cur.take(4)? != MAGIC {
        return Err(NnError::Checkpoint("bad magic".to_string()));
    }
    let version = cur.u32()?;
    if version != VERSION {
        return Err(NnError::Checkpoint(format!(
            "unsupported version {version} (expected {VERSION})"
        )));
    }
    let config_len = cur.u32()? as usize;
    let config_text = std::str::from_utf8(cur.take(config_len)?)
        .map_err(|_| NnError::Checkpoint("config block is not UTF-8".to_string()))?;
    let block: ConfigBlock = toml::from_str(config_text)
        .map_err(|e| NnError::Checkpoint(format!("config parse: {e}")))?;

    let mut model = Model::new(block.model)?;
    let shapes: Vec<Vec<usize>> = model
        .snapshot_state()
        .iter()
        .map(|layer| layer.iter().map(Vec::len).collect())
        .collect();
    let mut state = Vec::with_capacity(shapes.len());
    for layer_shapes in &shapes {
        let mut layer_state = Vec::with_capacity(layer_shapes.len());
        for &n in layer_shapes {
            layer_state.push(cur.f32s(n)?);
        }
        state.push(layer_state);
    }
    model.restore_state(&state)?;

    let adam = match cur.take(1)?[0] {
        0 => None,
        1 => {
            let mut adam = Adam::new(cur.f64()?);
            adam.beta1 = cur.f64()?;
            adam.beta2 = cur.f64()?;
            adam.epsilon = cur.f64()?;
            adam.t = cur.u64()?;
            let tensors = cur.u32()? as usize;
            let mut moments = Vec::with_capacity(2 * tensors);
            for _ in 0..2 * tensors {
                let n = cur.u32()? as usize;
                moments.push(cur.f32s(n)?);
            }
            adam.v = moments.split_off(tensors);
            adam.m = moments;
            Some(adam)
        }
        flag => {
            return Err(NnError::Checkpoint(format!("bad optimizer flag {flag}")));
        }
    };
    if cur.pos != bytes.len() {
        return Err(NnError::Checkpoint("trailing bytes".to_string()));
    }
    Ok((model, adam, block.app))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tensor;

    fn model() -> Model {
        Model::new(ModelConfig::tiny_preset(16, 8, 4, 9)).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let m = model();
        let bytes = save_model(&m, None, toml::Table::new());
        let (loaded, adam, app) = load_model(&bytes).unwrap();
        assert!(adam.is_none());
        assert!(app.is_empty());
        assert_eq!(save_model(&loaded, None, toml::Table::new()), bytes);
    }

    #[test]
    fn loaded_model_predicts_like_the_rounded_original() {
        let mut m = model();
        let x = Tensor::from_vec(&[2, 16, 8], (0..256).map(|i| (i as f64) * 1e-2).collect()).unwrap();
        let bytes = save_model(&m, None, toml::Table::new());
        let (mut loaded, _, _) = load_model(&bytes).unwrap();
        // f32 storage: loading twice must be a fixed point.
        let bytes2 = save_model(&loaded, None, toml::Table::new());
        assert_eq!(bytes, bytes2);
        let y1 = loaded.forward(&x, false).unwrap();
        let (mut reloaded, _, _) = load_model(&bytes2).unwrap();
        let y2 = reloaded.forward(&x, false).unwrap();
        assert_eq!(y1.data(), y2.data());
        // And close to the full-precision model.
        let y0 = m.forward(&x, false).unwrap();
        for (a, b) in y0.data().iter().zip(y1.data()) {
            assert!((a - b).abs() < 1e-4);
        }
    }

    #[test]
    fn optimizer_state_round_trips() {
        let mut m = model();
        let mut adam = Adam::new(0.002);
        let x = Tensor::from_vec(&[2, 16, 8], vec![0.1; 256]).unwrap();
        let probs = m.forward(&x, true).unwrap();
        let labels = crate::nn::one_hot(&[0, 2], 4);
        let (_, grad) = crate::nn::cross_entropy(&probs, &labels).unwrap();
        m.zero_grads();
        m.backward_fused(&grad).unwrap();
        adam.step(&mut m);
        let bytes = save_model(&m, Some(&adam), toml::Table::new());
        let (loaded, loaded_adam, _) = load_model(&bytes).unwrap();
        let loaded_adam = loaded_adam.unwrap();
        assert_eq!(loaded_adam.t, 1);
        assert_eq!(loaded_adam.lr, 0.002);
        assert_eq!(loaded_adam.m.len(), adam.m.len());
        assert_eq!(save_model(&loaded, Some(&loaded_adam), toml::Table::new()), bytes);
    }

    #[test]
    fn app_metadata_round_trips() {
        let m = model();
        let mut app = toml::Table::new();
        app.insert("labels".to_string(), toml::Value::Array(vec![
            toml::Value::String("mohanam".to_string()),
            toml::Value::String("kalyani".to_string()),
        ]));
        let bytes = save_model(&m, None, app.clone());
        let (_, _, back) = load_model(&bytes).unwrap();
        assert_eq!(back, app);
    }

    #[test]
    fn version_mismatch_is_a_load_error() {
        let m = model();
        let mut bytes = save_model(&m, None, toml::Table::new());
        bytes[4] = 99;
        let err = load_model(&bytes).unwrap_err();
        assert!(matches!(err, NnError::Checkpoint(msg) if msg.contains("version")));
    }

    #[test]
    fn truncated_file_is_a_load_error() {
        let m = model();
        let bytes = save_model(&m, None, toml::Table::new());
        let err = load_model(&bytes[..bytes.len() / 2]).unwrap_err();
        assert!(matches!(err, NnError::Checkpoint(_)));
    }
}
