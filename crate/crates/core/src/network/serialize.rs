use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{hexfloat, AffineLayer, ReluNetwork};
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLayer {
    rows: usize,
    cols: usize,
    weights: Vec<String>,
    bias: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    format_version: u32,
    input_dim: usize,
    layers: Vec<RawLayer>,
    #[serde(default)]
    metadata: BTreeMap<String, Value>,
}

/// A network together with the free-form metadata stored next to it.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkFile {
    pub network: ReluNetwork,
    pub metadata: BTreeMap<String, Value>,
}

/// Writes `net` as pretty-printed JSON with every float as a hex literal.
pub fn serialize(net: &ReluNetwork, metadata: &BTreeMap<String, Value>) -> String {
    let hex = |v: &[f64]| -> Vec<String> {
        v.iter()
            .map(|x| hexfloat::format(*x).expect("layer entries are finite"))
            .collect()
    };
    let raw = RawFile {
        format_version: FORMAT_VERSION,
        input_dim: net.input_dim(),
        layers: net
            .layers()
            .iter()
            .map(|l| RawLayer {
                rows: l.rows(),
                cols: l.cols(),
                weights: hex(l.weights()),
                bias: hex(l.bias()),
            })
            .collect(),
        metadata: metadata.clone(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("plain data serializes");
    out.push('\n');
    out
}

pub fn deserialize(text: &str) -> Result<NetworkFile> {
    let raw: RawFile = serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("line {} column {}", e.line(), e.column()),
        reason: e.to_string(),
    })?;
    if raw.format_version != FORMAT_VERSION {
        return Err(Error::Parse {
            location: "format_version".into(),
            reason: format!("unsupported version {}", raw.format_version),
        });
    }
    let mut layers = Vec::with_capacity(raw.layers.len());
    for (i, l) in raw.layers.into_iter().enumerate() {
        let decode = |field: &str, v: Vec<String>| -> Result<Vec<f64>> {
            v.iter()
                .enumerate()
                .map(|(j, s)| {
                    hexfloat::parse(s).map_err(|reason| Error::Parse {
                        location: format!("layers[{i}].{field}[{j}]"),
                        reason,
                    })
                })
                .collect()
        };
        let weights = decode("weights", l.weights)?;
        let bias = decode("bias", l.bias)?;
        let layer = AffineLayer::new(l.rows, l.cols, weights, bias).map_err(|e| Error::Parse {
            location: format!("layers[{i}]"),
            reason: e.to_string(),
        })?;
        layers.push(layer);
    }
    let network = ReluNetwork::new(layers).map_err(|e| Error::Parse {
        location: "layers".into(),
        reason: e.to_string(),
    })?;
    if network.input_dim() != raw.input_dim {
        return Err(Error::Parse {
            location: "input_dim".into(),
            reason: format!(
                "declared {} but first layer reads {}",
                raw.input_dim,
                network.input_dim()
            ),
        });
    }
    Ok(NetworkFile {
        network,
        metadata: raw.metadata,
    })
}
