//! Recurrent model serialization: `TFRC` binary (shape header + the flat
//! parameter vector in its canonical block order) and a JSON dump.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::domain::NUM_CATEGORIES;
use crate::error::{Error, Result};
use crate::features::Cursor;

use super::RecurrentModel;

const MAGIC: &[u8; 4] = b"TFRC";
const VERSION: u32 = 1;

pub fn write_recurrent(mut w: impl Write, model: &RecurrentModel) -> std::io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&VERSION.to_le_bytes())?;
    w.write_all(&(model.input_dim() as u32).to_le_bytes())?;
    w.write_all(&(model.hidden_units() as u32).to_le_bytes())?;
    w.write_all(&(NUM_CATEGORIES as u32).to_le_bytes())?;
    w.write_all(&model.dropout_rate().to_le_bytes())?;
    w.write_all(&(model.theta().len() as u64).to_le_bytes())?;
    for v in model.theta() {
        w.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_recurrent(bytes: &[u8], path: &Path) -> Result<RecurrentModel> {
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
    let input_dim = cursor.read_u32()? as usize;
    let hidden_units = cursor.read_u32()? as usize;
    let out_dim = cursor.read_u32()? as usize;
    if out_dim != NUM_CATEGORIES {
        return Err(cursor.invalid(format!(
            "output dimension {out_dim} does not match the {NUM_CATEGORIES}-way taxonomy"
        )));
    }
    let dropout_rate = cursor.read_f64()?;
    let n_params = cursor.read_u64()? as usize;
    let mut theta = Vec::with_capacity(n_params);
    for _ in 0..n_params {
        theta.push(cursor.read_f64()?);
    }
    if cursor.pos != bytes.len() {
        return Err(cursor.invalid("trailing bytes after parameters"));
    }
    RecurrentModel::from_theta(input_dim, hidden_units, dropout_rate, theta)
        .map_err(|e| cursor.invalid(e.to_string()))
}

pub fn save_recurrent(path: impl AsRef<Path>, model: &RecurrentModel) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    write_recurrent(&mut buf, model).map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn load_recurrent(path: impl AsRef<Path>) -> Result<RecurrentModel> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_recurrent(&bytes, path)
}

/// Human-readable JSON equivalent: shape header plus every parameter block.
pub fn recurrent_to_json(model: &RecurrentModel) -> String {
    let (input_dim, hidden) = (model.input_dim(), model.hidden_units());
    let theta = model.theta();
    let mut out = String::new();
    out.push_str("{\n");
    out.push_str("  \"kind\": \"recurrent\",\n");
    out.push_str(&format!("  \"input_dim\": {input_dim},\n"));
    out.push_str(&format!("  \"hidden_units\": {hidden},\n"));
    out.push_str(&format!("  \"out_dim\": {NUM_CATEGORIES},\n"));
    out.push_str(&format!("  \"dropout_rate\": {},\n", model.dropout_rate()));

    let mut offset = 0usize;
    let mut blocks: Vec<(String, usize)> = Vec::new();
    for gate in ["i", "f", "o", "g"] {
        blocks.push((format!("W_{gate}"), input_dim * hidden));
    }
    for gate in ["i", "f", "o", "g"] {
        blocks.push((format!("U_{gate}"), hidden * hidden));
    }
    for gate in ["i", "f", "o", "g"] {
        blocks.push((format!("b_{gate}"), hidden));
    }
    blocks.push(("W_out".to_string(), hidden * NUM_CATEGORIES));
    blocks.push(("b_out".to_string(), NUM_CATEGORIES));

    out.push_str("  \"parameters\": {\n");
    for (i, (name, len)) in blocks.iter().enumerate() {
        let values: Vec<String> = theta[offset..offset + len].iter().map(f64::to_string).collect();
        offset += len;
        out.push_str(&format!("    \"{name}\": [{}]", values.join(", ")));
        out.push_str(if i + 1 < blocks.len() { ",\n" } else { "\n" });
    }
    out.push_str("  }\n}\n");
    out
}
