//! File formats: states, ensembles, mix trees, and classification reports.
//!
//! State files are written by hand with 17-significant-digit decimal floats
//! so that write→read round-trips are bit-exact and outputs are stable
//! byte-for-byte across runs.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use doubled::constructions::{DilationSeed, Ensemble, MixTree};
use doubled::doubling::DoubledShape;
use doubled::tensor::{Shape, StateTensor};

pub const STATE_FORMAT: &str = "doubled-state/1";
pub const ENSEMBLE_FORMAT: &str = "ensemble/1";
pub const TREE_FORMAT: &str = "mix-tree/1";

/// Input-layer error: malformed files, schema violations, shape problems.
#[derive(Debug)]
pub struct SchemaError(pub String);

impl std::fmt::Display for SchemaError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for SchemaError {}

type Result<T> = std::result::Result<T, SchemaError>;

fn bad(msg: impl Into<String>) -> SchemaError {
    SchemaError(msg.into())
}

/* Writing *********************************************************************/

/// 17 significant decimal digits; parses back to the identical f64.
fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_amplitudes(out: &mut String, amps: &[C64], indent: &str) {
    out.push_str("[\n");
    for (i, a) in amps.iter().enumerate() {
        out.push_str(indent);
        out.push_str("  [");
        out.push_str(&fmt_f64(a.re));
        out.push_str(", ");
        out.push_str(&fmt_f64(a.im));
        out.push(']');
        if i + 1 < amps.len() {
            out.push(',');
        }
        out.push('\n');
    }
    out.push_str(indent);
    out.push(']');
}

fn dims_json(dims: &[usize]) -> String {
    let inner: Vec<String> = dims.iter().map(|d| d.to_string()).collect();
    format!("[{}]", inner.join(", "))
}

/// Serialize a state tensor; `depth`/`base_dim` are filled exactly when the
/// shape is a doubled layout.
pub fn write_state(t: &StateTensor) -> String {
    let inferred = DoubledShape::infer(t.shape());
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str(&format!("  \"format\": \"{STATE_FORMAT}\",\n"));
    out.push_str(&format!("  \"dims\": {},\n", dims_json(t.shape().dims())));
    match inferred {
        Some(ds) => {
            out.push_str(&format!("  \"depth\": {},\n", ds.depth()));
            out.push_str(&format!("  \"base_dim\": {},\n", ds.base_dim()));
        }
        None => {
            out.push_str("  \"depth\": null,\n");
            out.push_str("  \"base_dim\": null,\n");
        }
    }
    out.push_str("  \"amplitudes\": ");
    write_amplitudes(&mut out, t.amplitudes(), "  ");
    out.push_str("\n}\n");
    out
}

/* Reading *********************************************************************/

#[derive(Deserialize)]
struct RawState {
    format: String,
    dims: Vec<usize>,
    #[serde(default)]
    depth: Option<u32>,
    #[serde(default)]
    base_dim: Option<usize>,
    amplitudes: Vec<(f64, f64)>,
}

fn state_from_raw(raw: RawState) -> Result<StateTensor> {
    if raw.format != STATE_FORMAT {
        return Err(bad(format!(
            "unsupported state format {:?}, expected {STATE_FORMAT:?}",
            raw.format
        )));
    }
    let shape = Shape::new(raw.dims).map_err(|e| bad(e.to_string()))?;
    let amps: Vec<C64> = raw
        .amplitudes
        .into_iter()
        .map(|(re, im)| C64::new(re, im))
        .collect();
    let tensor = StateTensor::new(shape, amps).map_err(|e| bad(e.to_string()))?;
    let inferred = DoubledShape::infer(tensor.shape());
    match (inferred, raw.depth, raw.base_dim) {
        (Some(ds), depth, base) => {
            if depth.is_some_and(|d| d != ds.depth()) || base.is_some_and(|b| b != ds.base_dim()) {
                return Err(bad(format!(
                    "declared depth/base_dim {:?}/{:?} contradict the shape (depth {}, base {})",
                    depth,
                    base,
                    ds.depth(),
                    ds.base_dim()
                )));
            }
        }
        (None, None, None) => {}
        (None, depth, base) => {
            return Err(bad(format!(
                "depth/base_dim {depth:?}/{base:?} declared for a non-doubled shape"
            )));
        }
    }
    Ok(tensor)
}

pub fn read_state(text: &str) -> Result<StateTensor> {
    let raw: RawState =
        serde_json::from_str(text).map_err(|e| bad(format!("malformed state file: {e}")))?;
    state_from_raw(raw)
}

/// Read a state file as a dilation seed (system factor first).
pub fn read_seed(text: &str) -> Result<DilationSeed> {
    let tensor = read_state(text)?;
    DilationSeed::new(tensor).map_err(|e| bad(e.to_string()))
}

#[derive(Deserialize)]
struct RawEnsembleMember {
    weight: f64,
    dims: Vec<usize>,
    amplitudes: Vec<(f64, f64)>,
}

#[derive(Deserialize)]
struct RawEnsemble {
    format: String,
    members: Vec<RawEnsembleMember>,
}

pub fn read_ensemble(text: &str) -> Result<Ensemble> {
    let raw: RawEnsemble =
        serde_json::from_str(text).map_err(|e| bad(format!("malformed ensemble file: {e}")))?;
    if raw.format != ENSEMBLE_FORMAT {
        return Err(bad(format!(
            "unsupported ensemble format {:?}, expected {ENSEMBLE_FORMAT:?}",
            raw.format
        )));
    }
    let members: Vec<(f64, StateTensor)> = raw
        .members
        .into_iter()
        .map(|m| {
            let shape = Shape::new(m.dims).map_err(|e| bad(e.to_string()))?;
            let amps = m
                .amplitudes
                .into_iter()
                .map(|(re, im)| C64::new(re, im))
                .collect();
            let state = StateTensor::new(shape, amps).map_err(|e| bad(e.to_string()))?;
            Ok((m.weight, state))
        })
        .collect::<Result<_>>()?;
    Ensemble::new(members).map_err(|e| bad(e.to_string()))
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawTreeNode {
    Node {
        weights: Vec<f64>,
        children: Vec<RawTreeNode>,
    },
    Leaf {
        dims: Vec<usize>,
        amplitudes: Vec<(f64, f64)>,
    },
}

#[derive(Deserialize)]
struct RawTree {
    format: String,
    tree: RawTreeNode,
}

fn tree_from_raw(node: RawTreeNode) -> Result<MixTree> {
    match node {
        RawTreeNode::Leaf { dims, amplitudes } => {
            let shape = Shape::new(dims).map_err(|e| bad(e.to_string()))?;
            let amps = amplitudes
                .into_iter()
                .map(|(re, im)| C64::new(re, im))
                .collect();
            let state = StateTensor::new(shape, amps).map_err(|e| bad(e.to_string()))?;
            Ok(MixTree::Leaf(state))
        }
        RawTreeNode::Node { weights, children } => {
            if weights.len() != children.len() {
                return Err(bad(format!(
                    "{} weights for {} children",
                    weights.len(),
                    children.len()
                )));
            }
            let kids = weights
                .into_iter()
                .zip(children)
                .map(|(w, child)| Ok((w, tree_from_raw(child)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(MixTree::Node(kids))
        }
    }
}

pub fn read_tree(text: &str) -> Result<MixTree> {
    let raw: RawTree =
        serde_json::from_str(text).map_err(|e| bad(format!("malformed tree file: {e}")))?;
    if raw.format != TREE_FORMAT {
        return Err(bad(format!(
            "unsupported tree format {:?}, expected {TREE_FORMAT:?}",
            raw.format
        )));
    }
    let tree = tree_from_raw(raw.tree)?;
    tree.depth().map_err(|e| bad(e.to_string()))?;
    Ok(tree)
}

/* Reports *********************************************************************/

#[derive(Serialize)]
pub struct ReportEvidence {
    pub check: String,
    pub value: f64,
}

#[derive(Serialize)]
pub struct ReportVerdict {
    pub name: String,
    pub kind: String,
    pub reasons: Vec<ReportEvidence>,
}

#[derive(Serialize)]
pub struct ReportCJ {
    pub level: u32,
    pub hermiticity_defect: f64,
    pub min_eigenvalue: f64,
    pub trace: (f64, f64),
    pub psd: bool,
}

#[derive(Serialize)]
pub struct ReportFixture {
    pub path: String,
    pub dims: Vec<usize>,
    pub depth: Option<u32>,
    pub base_dim: Option<usize>,
}

#[derive(Serialize)]
pub struct ReportFile {
    pub verdicts: Vec<ReportVerdict>,
    pub cj_reports: Vec<ReportCJ>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mix_pairing_report: Option<ReportCJ>,
    pub tolerance: f64,
    pub fixture: ReportFixture,
    pub tool_version: String,
}

impl ReportFile {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn verdict_to_report(name: &str, v: &doubled::classify::Verdict) -> ReportVerdict {
    ReportVerdict {
        name: name.into(),
        kind: kind_name(v.kind).into(),
        reasons: v
            .reasons
            .iter()
            .map(|e| ReportEvidence {
                check: e.check.clone(),
                value: e.value,
            })
            .collect(),
    }
}

pub fn kind_name(kind: doubled::classify::VerdictKind) -> &'static str {
    match kind {
        doubled::classify::VerdictKind::CertifiedYes => "CertifiedYes",
        doubled::classify::VerdictKind::CertifiedNo => "CertifiedNo",
        doubled::classify::VerdictKind::Consistent => "Consistent",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn state_round_trip_is_bit_exact() {
        let shape = Shape::new(vec![2, 2]).unwrap();
        let amps = vec![
            C64::new(1.0 / 3.0, -2.0 / 7.0),
            C64::new(0.1, 1e-300),
            C64::new(-0.0, 2.5e17),
            C64::new(f64::MIN_POSITIVE, -1.0),
        ];
        let t = StateTensor::new(shape, amps).unwrap();
        let text = write_state(&t);
        let back = read_state(&text).unwrap();
        assert_eq!(back.shape(), t.shape());
        for (a, b) in back.amplitudes().iter().zip(t.amplitudes().iter()) {
            assert_eq!(a.re.to_bits(), b.re.to_bits());
            assert_eq!(a.im.to_bits(), b.im.to_bits());
        }
        // And the re-serialization is byte-identical.
        assert_eq!(write_state(&back), text);
    }

    #[test]
    fn doubled_layouts_carry_depth_and_base_dim() {
        let t = StateTensor::zeros(Shape::new(vec![3, 3, 3, 3]).unwrap());
        let text = write_state(&t);
        assert!(text.contains("\"depth\": 2"));
        assert!(text.contains("\"base_dim\": 3"));
        let t = StateTensor::zeros(Shape::new(vec![2, 3]).unwrap());
        let text = write_state(&t);
        assert!(text.contains("\"depth\": null"));
    }

    #[test]
    fn inconsistent_metadata_is_rejected() {
        let text = r#"{
            "format": "doubled-state/1",
            "dims": [2, 2],
            "depth": 2,
            "base_dim": 2,
            "amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
        }"#;
        assert!(read_state(text).is_err());
        let text = r#"{
            "format": "doubled-state/1",
            "dims": [2, 3],
            "depth": 1,
            "base_dim": 2,
            "amplitudes": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 0.0]]
        }"#;
        assert!(read_state(text).is_err());
    }

    #[test]
    fn malformed_inputs_are_schema_errors() {
        assert!(read_state("{").is_err());
        assert!(read_state(r#"{"format": "other/9", "dims": [1], "amplitudes": [[0.0, 0.0]]}"#).is_err());
        assert!(read_ensemble(r#"{"format": "ensemble/1", "members": []}"#).is_err());
        assert!(read_tree(r#"{"format": "mix-tree/1", "tree": {"weights": [1.0], "children": []}}"#).is_err());
    }

    #[test]
    fn tree_files_parse_into_mix_trees() {
        let text = r#"{
            "format": "mix-tree/1",
            "tree": {
                "weights": [0.5, 0.5],
                "children": [
                    {"weights": [1.0], "children": [{"dims": [2], "amplitudes": [[1.0, 0.0], [0.0, 0.0]]}]},
                    {"weights": [1.0], "children": [{"dims": [2], "amplitudes": [[0.0, 0.0], [1.0, 0.0]]}]}
                ]
            }
        }"#;
        let tree = read_tree(text).unwrap();
        assert_eq!(tree.depth().unwrap(), 2);
    }
}
