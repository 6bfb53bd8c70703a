//! Versioned binary model checkpoints: magic `MFNN1`, a length-prefixed JSON
//! header (spec, input shape, training history, best epoch), then the raw
//! parameter array as little-endian 64-bit floats in layer order.

use serde::{Deserialize, Serialize};

use crate::error::{NnError, Result};
use crate::network::Network;
use crate::train::{EpochStats, TrainedModel};

const MAGIC: &[u8; 5] = b"MFNN1";

#[derive(Serialize, Deserialize)]
struct Header {
    spec: crate::spec::NetworkSpec,
    input_shape: (usize, usize),
    history: Vec<(f64, f64)>,
    best_epoch: usize,
}

pub fn save_model(model: &TrainedModel) -> Vec<u8> {
    let header = Header {
        spec: model.network.spec().clone(),
        input_shape: model.network.input_shape(),
        history: model
            .history
            .iter()
            .map(|e| (e.train_loss, e.val_loss))
            .collect(),
        best_epoch: model.best_epoch,
    };
    let header_json = serde_json::to_vec(&header).expect("header serialises");
    let mut out = Vec::with_capacity(
        MAGIC.len() + 8 + header_json.len() + 8 * model.network.params().len(),
    );
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(header_json.len() as u64).to_le_bytes());
    out.extend_from_slice(&header_json);
    for p in model.network.params() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

pub fn load_model(bytes: &[u8]) -> Result<TrainedModel> {
    if bytes.len() < MAGIC.len() + 8 || &bytes[..MAGIC.len()] != MAGIC {
        return Err(NnError::MalformedCheckpoint("bad magic".into()));
    }
    let mut off = MAGIC.len();
    let len = u64::from_le_bytes(bytes[off..off + 8].try_into().unwrap()) as usize;
    off += 8;
    if bytes.len() < off + len {
        return Err(NnError::MalformedCheckpoint("truncated header".into()));
    }
    let header: Header = serde_json::from_slice(&bytes[off..off + len])
        .map_err(|e| NnError::MalformedCheckpoint(format!("header: {e}")))?;
    off += len;
    let mut network = Network::new(header.spec, header.input_shape)?;
    let n_params = network.params().len();
    if bytes.len() != off + 8 * n_params {
        return Err(NnError::MalformedCheckpoint(format!(
            "expected {} parameter bytes, found {}",
            8 * n_params,
            bytes.len() - off
        )));
    }
    let params: Vec<f64> = bytes[off..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    network.set_params(&params)?;
    Ok(TrainedModel {
        network,
        history: header
            .history
            .iter()
            .map(|&(t, v)| EpochStats {
                train_loss: t,
                val_loss: v,
            })
            .collect(),
        best_epoch: header.best_epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spec::{Activation, LayerSpec, Loss, NetworkSpec};

    fn model() -> TrainedModel {
        let spec = NetworkSpec {
            layers: vec![
                LayerSpec::Lstm { units: 3 },
                LayerSpec::Dense {
                    units: 2,
                    activation: Activation::Tanh,
                },
            ],
            loss: Loss::Mse,
            seed: 11,
        };
        TrainedModel {
            network: Network::new(spec, (5, 2)).unwrap(),
            history: vec![
                EpochStats {
                    train_loss: 0.5,
                    val_loss: 0.6,
                },
                EpochStats {
                    train_loss: 0.2,
                    val_loss: 0.3,
                },
            ],
            best_epoch: 1,
        }
    }

    #[test]
    fn round_trip_is_bit_identical() {
        let m = model();
        let bytes = save_model(&m);
        assert_eq!(&bytes[..5], b"MFNN1");
        let back = load_model(&bytes).unwrap();
        assert_eq!(back.network.params(), m.network.params());
        assert_eq!(back.best_epoch, 1);
        assert_eq!(back.history.len(), 2);
        // Serialising again gives the same bytes.
        assert_eq!(save_model(&back), bytes);
    }

    #[test]
    fn corrupt_inputs_rejected() {
        let m = model();
        let bytes = save_model(&m);
        assert!(load_model(&bytes[..3]).is_err());
        let mut bad_magic = bytes.clone();
        bad_magic[0] = b'X';
        assert!(load_model(&bad_magic).is_err());
        let truncated = &bytes[..bytes.len() - 4];
        assert!(load_model(truncated).is_err());
    }
}
