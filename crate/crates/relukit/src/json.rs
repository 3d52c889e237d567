//! Dense JSON interchange format for networks:
//!
//! ```json
//! {"L": 1, "widths": [1, 2, 1],
//!  "layers": [{"W": [[1.0], [1.0]], "v": [0.0]},
//!             {"W": [[1.0, 1.0]], "v": [0.0, 0.0]}],
//!  "output": "identity"}
//! ```
//!
//! Weights are row-major; layer `j`'s `"W"` has `widths[j+1]` rows and
//! `widths[j]` columns, and its `"v"` has length `widths[j]`. Round-trips
//! recover parameters bit-exactly (explicit `-0.0` normalizes to `0.0`).

use relukit_core::error::{CoreError, Result};
use relukit_core::network::{Layer, Network, OutputActivation};
use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize)]
struct NetworkDoc {
    #[serde(rename = "L")]
    l: usize,
    widths: Vec<usize>,
    layers: Vec<LayerDoc>,
    output: String,
}

#[derive(Serialize, Deserialize)]
struct LayerDoc {
    #[serde(rename = "W")]
    w: Vec<Vec<f64>>,
    v: Vec<f64>,
}

/// Serialize a network to the dense JSON document.
pub fn to_json(net: &Network) -> String {
    let doc = NetworkDoc {
        l: net.depth(),
        widths: net.widths(),
        layers: net
            .layers()
            .iter()
            .map(|layer| LayerDoc { w: layer.dense_rows(), v: layer.shift().to_vec() })
            .collect(),
        output: net.output_activation().to_string(),
    };
    serde_json::to_string(&doc).expect("network documents serialize")
}

/// Parse a network document. Malformed JSON reports the parser's location;
/// structurally inconsistent documents report a shape error.
pub fn from_json(text: &str) -> Result<Network> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| CoreError::Parse {
        line: e.line(),
        column: e.column(),
        detail: e.to_string(),
    })?;
    if doc.widths.len() != doc.l + 2 {
        return Err(CoreError::Shape {
            context: "document widths length",
            expected: doc.l + 2,
            got: doc.widths.len(),
        });
    }
    if doc.layers.len() != doc.l + 1 {
        return Err(CoreError::Shape {
            context: "document layer count",
            expected: doc.l + 1,
            got: doc.layers.len(),
        });
    }
    let output = match doc.output.as_str() {
        "identity" => OutputActivation::Identity,
        "softmax" => OutputActivation::Softmax,
        other => {
            return Err(CoreError::Validation {
                detail: format!("unknown output activation {other:?}"),
            })
        }
    };
    let mut layers = Vec::with_capacity(doc.layers.len());
    for (j, layer) in doc.layers.iter().enumerate() {
        if layer.w.len() != doc.widths[j + 1] {
            return Err(CoreError::Shape {
                context: "document W rows",
                expected: doc.widths[j + 1],
                got: layer.w.len(),
            });
        }
        if layer.v.len() != doc.widths[j] {
            return Err(CoreError::Shape {
                context: "document v length",
                expected: doc.widths[j],
                got: layer.v.len(),
            });
        }
        layers.push(Layer::from_dense(&layer.w, layer.v.clone())?);
    }
    Network::new(layers, output)
}

/// Parse and additionally require class membership (all `|params| ≤ 1`,
/// zero input shift).
pub fn from_json_strict(text: &str) -> Result<Network> {
    let net = from_json(text)?;
    let report = net.validate();
    if !report.is_valid() {
        return Err(CoreError::Validation {
            detail: format!("{} class invariant violation(s), e.g. {:?}",
                report.violations.len(),
                report.violations[0]
            ),
        });
    }
    Ok(net)
}

#[cfg(test)]
mod tests {
    use super::*;
    use relukit_core::algebra::scale_net;

    #[test]
    fn round_trip_is_identity() {
        let net = scale_net(2.0).unwrap();
        let text = to_json(&net);
        let back = from_json(&text).unwrap();
        assert_eq!(net, back);
    }

    #[test]
    fn truncated_document_reports_location() {
        let net = scale_net(2.0).unwrap();
        let text = to_json(&net);
        let err = from_json(&text[..text.len() / 2]).unwrap_err();
        assert!(matches!(err, CoreError::Parse { .. }));
    }

    #[test]
    fn strict_parse_rejects_out_of_class_parameters() {
        let text = r#"{"L": 1, "widths": [1, 1, 1],
            "layers": [{"W": [[1.5]], "v": [0.0]}, {"W": [[1.0]], "v": [0.0]}],
            "output": "identity"}"#;
        assert!(from_json(text).is_ok());
        assert!(matches!(from_json_strict(text), Err(CoreError::Validation { .. })));
    }

    #[test]
    fn inconsistent_widths_are_shape_errors() {
        let text = r#"{"L": 1, "widths": [1, 2, 1],
            "layers": [{"W": [[1.0]], "v": [0.0]}, {"W": [[1.0]], "v": [0.0]}],
            "output": "identity"}"#;
        assert!(matches!(from_json(text), Err(CoreError::Shape { .. })));
    }
}
