//! Per-frame feature vectors from pluggable providers: file-loaded
//! precomputed features, computed date/time encodings, and ordered fusion
//! into a single vector per frame.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use crate::domain::FrameRecord;
use crate::error::{Error, Result};

const SCORE_SUM_TOLERANCE: f64 = 1e-6;
const HISTOGRAM_BINS: usize = 10;
const HISTOGRAM_CHANNELS: usize = 3;

/// What a feature matrix represents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FeatureRole {
    /// Dense layer activations (FC/GAP-style backbone outputs).
    Embedding,
    /// Per-frame classifier probabilities; rows sum to 1.
    Score,
    /// 10 bins x 3 channels; each channel block sums to 1.
    ColorHistogram,
    /// Weekday one-hot plus cyclic time of day.
    DateTime,
}

impl FeatureRole {
    pub fn name(self) -> &'static str {
        match self {
            FeatureRole::Embedding => "Embedding",
            FeatureRole::Score => "Score",
            FeatureRole::ColorHistogram => "ColorHistogram",
            FeatureRole::DateTime => "DateTime",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "Embedding" => Some(FeatureRole::Embedding),
            "Score" => Some(FeatureRole::Score),
            "ColorHistogram" => Some(FeatureRole::ColorHistogram),
            "DateTime" => Some(FeatureRole::DateTime),
            _ => None,
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            FeatureRole::Embedding => 0,
            FeatureRole::Score => 1,
            FeatureRole::ColorHistogram => 2,
            FeatureRole::DateTime => 3,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(FeatureRole::Embedding),
            1 => Some(FeatureRole::Score),
            2 => Some(FeatureRole::ColorHistogram),
            3 => Some(FeatureRole::DateTime),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Ordered (role, dim) parts of a fused feature vector. Concatenation order
/// is part of a trained model's identity and is persisted with it.
pub type FusionSignature = Vec<(FeatureRole, usize)>;

/// Per-frame feature rows of one role, all sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    role: FeatureRole,
    dim: usize,
    rows: BTreeMap<String, Vec<f64>>,
}

impl FeatureMatrix {
    pub fn new(role: FeatureRole, dim: usize) -> Self {
        FeatureMatrix {
            role,
            dim,
            rows: BTreeMap::new(),
        }
    }

    pub fn role(&self) -> FeatureRole {
        self.role
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn row(&self, frame_id: &str) -> Option<&[f64]> {
        self.rows.get(frame_id).map(Vec::as_slice)
    }

    /// Rows in frame_id order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &[f64])> {
        self.rows.iter().map(|(id, v)| (id.as_str(), v.as_slice()))
    }

    pub fn frame_ids(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    /// Inserts a row after checking the matrix dimension and the role's
    /// normalization invariants.
    pub fn insert(&mut self, frame_id: impl Into<String>, values: Vec<f64>) -> Result<()> {
        let frame_id = frame_id.into();
        validate_row(self.role, self.dim, &frame_id, &values)?;
        self.rows.insert(frame_id, values);
        Ok(())
    }
}

fn validate_row(role: FeatureRole, dim: usize, frame_id: &str, values: &[f64]) -> Result<()> {
    if values.len() != dim {
        return Err(Error::Dimension {
            context: format!("feature row for frame {frame_id:?}"),
            expected: dim,
            got: values.len(),
        });
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteValue {
            frame_id: frame_id.to_string(),
        });
    }
    match role {
        FeatureRole::Score => {
            if values.iter().any(|&v| v < 0.0) {
                return Err(Error::NotADistribution(format!(
                    "Score row for frame {frame_id:?} has a negative entry"
                )));
            }
            let sum: f64 = values.iter().sum();
            if (sum - 1.0).abs() > SCORE_SUM_TOLERANCE {
                return Err(Error::RowNotNormalized {
                    frame_id: frame_id.to_string(),
                    role: "Score",
                    sum,
                });
            }
        }
        FeatureRole::ColorHistogram => {
            let expected = HISTOGRAM_BINS * HISTOGRAM_CHANNELS;
            if dim != expected {
                return Err(Error::Dimension {
                    context: "ColorHistogram matrix".to_string(),
                    expected,
                    got: dim,
                });
            }
            for chunk in values.chunks(HISTOGRAM_BINS) {
                let sum: f64 = chunk.iter().sum();
                if (sum - 1.0).abs() > SCORE_SUM_TOLERANCE {
                    return Err(Error::RowNotNormalized {
                        frame_id: frame_id.to_string(),
                        role: "ColorHistogram",
                        sum,
                    });
                }
            }
        }
        FeatureRole::Embedding | FeatureRole::DateTime => {}
    }
    Ok(())
}

/// Length of the date/time encoding: weekday one-hot (7) + sin/cos of the
/// time of day.
pub const DATETIME_DIM: usize = 9;

/// Encodes weekday and time of day. Time is mapped to the unit circle so
/// 23:59 and 00:00 are close.
pub fn datetime_features(frame: &FrameRecord) -> Vec<f64> {
    let mut v = vec![0.0; DATETIME_DIM];
    v[frame.weekday as usize] = 1.0;
    let angle = std::f64::consts::TAU * frame.timestamp as f64 / 1440.0;
    v[7] = angle.sin();
    v[8] = angle.cos();
    v
}

/// Builds a DateTime feature matrix for a set of frames.
pub fn datetime_matrix<'a>(frames: impl IntoIterator<Item = &'a FrameRecord>) -> FeatureMatrix {
    let mut matrix = FeatureMatrix::new(FeatureRole::DateTime, DATETIME_DIM);
    for f in frames {
        matrix
            .insert(f.frame_id.clone(), datetime_features(f))
            .expect("datetime rows always satisfy invariants");
    }
    matrix
}

/// Concatenates the parts' rows in the given order for each requested frame.
/// The result carries the Embedding role (it stands in for a fused layer
/// output); its dimension is the sum of the part dimensions.
pub fn fuse(parts: &[&FeatureMatrix], frame_ids: &[String]) -> Result<FeatureMatrix> {
    let dim = parts.iter().map(|p| p.dim()).sum();
    let mut fused = FeatureMatrix::new(FeatureRole::Embedding, dim);
    for frame_id in frame_ids {
        let mut row = Vec::with_capacity(dim);
        for part in parts {
            let values = part.row(frame_id).ok_or_else(|| Error::MissingFrame {
                frame_id: frame_id.clone(),
                context: format!("{} features", part.role()),
            })?;
            row.extend_from_slice(values);
        }
        fused.insert(frame_id.clone(), row)?;
    }
    Ok(fused)
}

/// The (role, dim) identity of a fusion, in concatenation order.
pub fn fusion_signature(parts: &[&FeatureMatrix]) -> FusionSignature {
    parts.iter().map(|p| (p.role(), p.dim())).collect()
}

const BINARY_MAGIC: &[u8; 4] = b"TFFM";

/// Loads a feature file (text or binary form, detected by magic bytes) and
/// checks that it declares the expected role.
pub fn load_features(path: impl AsRef<Path>, role: FeatureRole) -> Result<FeatureMatrix> {
    let matrix = load_features_any(path.as_ref())?;
    if matrix.role() != role {
        return Err(Error::Config(format!(
            "{}: expected {role} features, file declares {}",
            path.as_ref().display(),
            matrix.role()
        )));
    }
    Ok(matrix)
}

/// Loads a feature file taking the role from its own header.
pub fn load_features_any(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.starts_with(BINARY_MAGIC) {
        parse_features_binary(&bytes, path)
    } else {
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| Error::parse(path, 1, "file is neither TFFM binary nor UTF-8 text"))?;
        parse_features_text(text, path)
    }
}

pub(crate) fn parse_features_text(text: &str, path: &Path) -> Result<FeatureMatrix> {
    let mut matrix: Option<FeatureMatrix> = None;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some(m) = matrix.as_mut() else {
            matrix = Some(parse_text_header(line, path, lineno + 1)?);
            continue;
        };
        let mut fields = line.split('\t');
        let frame_id = fields.next().unwrap_or_default();
        if frame_id.is_empty() {
            return Err(Error::parse(path, lineno + 1, "missing frame_id"));
        }
        let values: Vec<f64> = fields
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| Error::parse(path, lineno + 1, format!("invalid value {s:?}")))
            })
            .collect::<Result<_>>()?;
        m.insert(frame_id, values)?;
    }
    matrix.ok_or_else(|| Error::parse(path, 1, "missing feature header"))
}

fn parse_text_header(line: &str, path: &Path, lineno: usize) -> Result<FeatureMatrix> {
    let mut dim = None;
    let mut role = None;
    for token in line.split_whitespace() {
        if let Some(v) = token.strip_prefix("dim=") {
            dim = v.parse::<usize>().ok();
        } else if let Some(v) = token.strip_prefix("role=") {
            role = FeatureRole::from_name(v);
        }
    }
    match (dim, role) {
        (Some(d), Some(r)) if d > 0 => Ok(FeatureMatrix::new(r, d)),
        _ => Err(Error::parse(
            path,
            lineno,
            "expected header `dim=<D> role=<Embedding|Score|ColorHistogram|DateTime>`",
        )),
    }
}

fn parse_features_binary(bytes: &[u8], path: &Path) -> Result<FeatureMatrix> {
    let mut cursor = Cursor { bytes, pos: 0, path };
    cursor.expect_magic(BINARY_MAGIC)?;
    let dim = cursor.read_u32()? as usize;
    let rows = cursor.read_u32()? as usize;
    let role_tag = cursor.read_u8()?;
    let role = FeatureRole::from_tag(role_tag)
        .ok_or_else(|| cursor.invalid(format!("unknown role tag {role_tag}")))?;
    if dim == 0 {
        return Err(cursor.invalid("dimension must be positive"));
    }
    let mut matrix = FeatureMatrix::new(role, dim);
    for _ in 0..rows {
        let id_len = cursor.read_u32()? as usize;
        let id_bytes = cursor.take(id_len)?;
        let frame_id = std::str::from_utf8(id_bytes)
            .map_err(|_| cursor.invalid("frame_id is not UTF-8"))?
            .to_string();
        let mut values = Vec::with_capacity(dim);
        for _ in 0..dim {
            values.push(cursor.read_f64()?);
        }
        matrix.insert(frame_id, values)?;
    }
    Ok(matrix)
}

/// Writes the text form: `dim=<D> role=<ROLE>` header, then one
/// tab-separated row per frame in frame_id order. Values are printed with
/// the shortest representation that round-trips exactly.
pub fn write_features_text(mut w: impl Write, matrix: &FeatureMatrix) -> std::io::Result<()> {
    writeln!(w, "dim={} role={}", matrix.dim(), matrix.role())?;
    for (frame_id, values) in matrix.iter() {
        write!(w, "{frame_id}")?;
        for v in values {
            write!(w, "\t{v}")?;
        }
        writeln!(w)?;
    }
    Ok(())
}

/// Writes the binary form: magic `TFFM`, little-endian u32 dim and row
/// count, u8 role tag, then per row a length-prefixed frame_id and dim
/// IEEE-754 doubles.
pub fn write_features_binary(mut w: impl Write, matrix: &FeatureMatrix) -> std::io::Result<()> {
    w.write_all(BINARY_MAGIC)?;
    w.write_all(&(matrix.dim() as u32).to_le_bytes())?;
    w.write_all(&(matrix.len() as u32).to_le_bytes())?;
    w.write_all(&[matrix.role().tag()])?;
    for (frame_id, values) in matrix.iter() {
        w.write_all(&(frame_id.len() as u32).to_le_bytes())?;
        w.write_all(frame_id.as_bytes())?;
        for v in values {
            w.write_all(&v.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Saves a matrix to a file in the requested form.
pub fn save_features(path: impl AsRef<Path>, matrix: &FeatureMatrix, binary: bool) -> Result<()> {
    let path = path.as_ref();
    let mut buf = Vec::new();
    let result = if binary {
        write_features_binary(&mut buf, matrix)
    } else {
        write_features_text(&mut buf, matrix)
    };
    result.map_err(|e| Error::io(path, e))?;
    fs::write(path, buf).map_err(|e| Error::io(path, e))
}

/// Bounds-checked little-endian reader over a byte slice.
pub(crate) struct Cursor<'a> {
    pub bytes: &'a [u8],
    pub pos: usize,
    pub path: &'a Path,
}

impl<'a> Cursor<'a> {
    pub fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.bytes.len() {
            return Err(self.invalid("unexpected end of file"));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub fn expect_magic(&mut self, magic: &[u8; 4]) -> Result<()> {
        let got = self.take(4)?;
        if got != magic {
            return Err(self.invalid(format!(
                "bad magic {:?}, expected {:?}",
                String::from_utf8_lossy(got),
                String::from_utf8_lossy(magic)
            )));
        }
        Ok(())
    }

    pub fn read_u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    pub fn read_u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    pub fn read_u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn read_f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    pub fn invalid(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line: 0,
            msg: format!("offset {}: {}", self.pos, msg.into()),
        }
    }
}
