//! Forest model serialization: a self-describing binary (`TFRF`) and a
//! human-readable JSON dump.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::domain::NUM_CATEGORIES;
use crate::error::{Error, Result};
use crate::features::{Cursor, FeatureRole};

use super::{ForestConfig, ForestModel, MaxFeatures, TreeNode};

const MAGIC: &[u8; 4] = b"TFRF";
const VERSION: u32 = 1;
const MAX_TREE_DEPTH: usize = 10_000;

/// Writes the canonical binary encoding. Identical models produce identical
/// bytes, so reruns with the same data and seed are byte-stable.
pub fn write_forest(mut w: impl Write, model: &ForestModel) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    let c = &model.config;
    w.write_all(&(c.n_estimators as u32).to_le_bytes())?;
    w.write_all(&[c.max_depth.is_some() as u8])?;
    w.write_all(&(c.max_depth.unwrap_or(0) as u32).to_le_bytes())?;
    let (mf_tag, mf_value): (u8, u32) = match c.max_features {
        MaxFeatures::Sqrt => (0, 0),
        MaxFeatures::All => (1, 0),
        MaxFeatures::Fixed(k) => (2, k as u32),
    };
    w.write_all(&[mf_tag])?;
    w.write_all(&mf_value.to_le_bytes())?;
    w.write_all(&[c.bootstrap as u8])?;
    w.write_all(&c.rng_seed.to_le_bytes())?;
    w.write_all(&(model.feature_dim as u32).to_le_bytes())?;
    w.write_all(&(model.timestep as u32).to_le_bytes())?;
    w.write_all(&(model.realized_max_depth as u32).to_le_bytes())?;
    w.write_all(&(model.fusion_signature.len() as u32).to_le_bytes())?;
    for &(role, dim) in &model.fusion_signature {
        w.write_all(&[role.tag()])?;
        w.write_all(&(dim as u32).to_le_bytes())?;
    }
    for tree in &model.trees {
        write_node(&mut w, tree)?;
    }
    Ok(())
}

fn write_node(w: &mut impl Write, node: &TreeNode) -> std::io::Result<()> {
    // Preorder, iteratively: right child pushed first so left is emitted first.
    let mut stack = vec![node];
    while let Some(node) = stack.pop() {
        match node {
            TreeNode::Leaf { class_counts } => {
                w.write_all(&[0u8])?;
                for &c in class_counts {
                    w.write_all(&c.to_le_bytes())?;
                }
            }
            TreeNode::Internal {
                feature_index,
                threshold,
                left,
                right,
            } => {
                w.write_all(&[1u8])?;
                w.write_all(&(*feature_index as u32).to_le_bytes())?;
                w.write_all(&threshold.to_le_bytes())?;
                stack.push(right);
                stack.push(left);
            }
        }
    }
    Ok(())
}

/// Decodes a `TFRF` byte stream.
pub fn read_forest(bytes: &[u8], path: &Path) -> Result<ForestModel> {
    let mut cursor = Cursor {
        bytes,
        pos: 0,
        path,
    };
    cursor.expect_magic(MAGIC)?;
    let version = cursor.read_u32()?;
    if version != VERSION {
        return Err(cursor.invalid(format!("unsupported version {version}")));
    }
    let n_estimators = cursor.read_u32()? as usize;
    let has_max_depth = cursor.read_u8()? != 0;
    let max_depth_raw = cursor.read_u32()? as usize;
    let max_depth = has_max_depth.then_some(max_depth_raw);
    let mf_tag = cursor.read_u8()?;
    let mf_value = cursor.read_u32()? as usize;
    let max_features = match mf_tag {
        0 => MaxFeatures::Sqrt,
        1 => MaxFeatures::All,
        2 => MaxFeatures::Fixed(mf_value),
        t => return Err(cursor.invalid(format!("unknown max_features tag {t}"))),
    };
    let bootstrap = cursor.read_u8()? != 0;
    let rng_seed = cursor.read_u64()?;
    let feature_dim = cursor.read_u32()? as usize;
    let timestep = cursor.read_u32()? as usize;
    let realized_max_depth = cursor.read_u32()? as usize;
    let sig_len = cursor.read_u32()? as usize;
    let mut fusion_signature = Vec::with_capacity(sig_len);
    for _ in 0..sig_len {
        let tag = cursor.read_u8()?;
        let role = FeatureRole::from_tag(tag)
            .ok_or_else(|| cursor.invalid(format!("unknown role tag {tag}")))?;
        let dim = cursor.read_u32()? as usize;
        fusion_signature.push((role, dim));
    }
    let mut trees = Vec::with_capacity(n_estimators);
    for _ in 0..n_estimators {
        trees.push(read_node(&mut cursor, feature_dim, 0)?);
    }
    if cursor.pos != bytes.len() {
        return Err(cursor.invalid("trailing bytes after last tree"));
    }
    Ok(ForestModel {
        trees,
        config: ForestConfig {
            n_estimators,
            max_depth,
            max_features,
            bootstrap,
            rng_seed,
        },
        feature_dim,
        fusion_signature,
        timestep,
        realized_max_depth,
    })
}

fn read_node(cursor: &mut Cursor<'_>, feature_dim: usize, depth: usize) -> Result<TreeNode> {
    if depth > MAX_TREE_DEPTH {
        return Err(cursor.invalid("tree nesting exceeds the decode limit"));
    }
    match cursor.read_u8()? {
        0 => {
            let mut class_counts = [0u64; NUM_CATEGORIES];
            for c in class_counts.iter_mut() {
                *c = cursor.read_u64()?;
            }
            if class_counts.iter().all(|&c| c == 0) {
                return Err(cursor.invalid("leaf with all-zero class counts"));
            }
            Ok(TreeNode::Leaf { class_counts })
        }
        1 => {
            let feature_index = cursor.read_u32()? as usize;
            if feature_index >= feature_dim {
                return Err(cursor.invalid(format!(
                    "feature index {feature_index} out of range for dim {feature_dim}"
                )));
            }
            let threshold = cursor.read_f64()?;
            let left = read_node(cursor, feature_dim, depth + 1)?;
            let right = read_node(cursor, feature_dim, depth + 1)?;
            Ok(TreeNode::Internal {
                feature_index,
                threshold,
                left: Box::new(left),
                right: Box::new(right),
            })
        }
        t => Err(cursor.invalid(format!("unknown node tag {t}"))),
    }
}

pub fn save_forest(path: impl AsRef<Path>, model: &ForestModel) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_forest(&mut buf, model).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_forest(path: impl AsRef<Path>) -> Result<ForestModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_forest(&bytes, path)
}

/// Human-readable JSON equivalent of the binary encoding.
pub fn forest_to_json(model: &ForestModel) -> String {
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str("  \"kind\": \"forest\",\n");
    let c = &model.config;
    out.push_str(&format!("  \"n_estimators\": {},\n", c.n_estimators));
    match c.max_depth {
        Some(d) => out.push_str(&format!("  \"max_depth\": {d},\n")),
        None => out.push_str("  \"max_depth\": null,\n"),
    }
    let mf = match c.max_features {
        MaxFeatures::Sqrt => "\"sqrt\"".to_string(),
        MaxFeatures::All => "\"all\"".to_string(),
        MaxFeatures::Fixed(k) => k.to_string(),
    };
    out.push_str(&format!("  \"max_features\": {mf},\n"));
    out.push_str(&format!("  \"bootstrap\": {},\n", c.bootstrap));
    out.push_str(&format!("  \"rng_seed\": {},\n", c.rng_seed));
    out.push_str(&format!("  \"feature_dim\": {},\n", model.feature_dim));
    out.push_str(&format!("  \"timestep\": {},\n", model.timestep));
    out.push_str(&format!(
        "  \"realized_max_depth\": {},\n",
        model.realized_max_depth
    ));
    let sig: Vec<String> = model
        .fusion_signature
        .iter()
        .map(|(role, dim)| format!("[\"{role}\", {dim}]"))
        .collect();
    out.push_str(&format!("  \"fusion_signature\": [{}],\n", sig.join(", ")));
    out.push_str("  \"trees\": [\n");
    for (i, tree) in model.trees.iter().enumerate() {
        out.push_str("    ");
        node_to_json(tree, &mut out);
        out.push_str(if i + 1 < model.trees.len() { ",\n" } else { "\n" });
    }
    out.push_str("  ]\n}\n");
    out
}

fn node_to_json(node: &TreeNode, out: &mut String) {
    match node {
        TreeNode::Leaf { class_counts } => {
            let counts: Vec<String> = class_counts.iter().map(u64::to_string).collect();
            out.push_str(&format!("{{\"counts\": [{}]}}", counts.join(",")));
        }
        TreeNode::Internal {
            feature_index,
            threshold,
            left,
            right,
        } => {
            out.push_str(&format!(
                "{{\"feature\": {feature_index}, \"threshold\": {threshold}, \"left\": "
            ));
            node_to_json(left, out);
            out.push_str(", \"right\": ");
            node_to_json(right, out);
            out.push('}');
        }
    }
}
