//! Mesh file loading: OBJ (v/f records) and PLY (ascii and
//! binary-little-endian). Polygon faces are triangulated fan-wise.

use std::path::Path;

use nalgebra::Point3;

use super::{MeshError, TriangleMesh};

/// Load-time cleaning summary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LoadStats {
    pub vertices: usize,
    pub triangles: usize,
    pub dropped_degenerate: usize,
}

/// Loads an OBJ or PLY mesh, dispatching on the file extension
/// (falling back to content sniffing when the extension is unknown).
pub fn load_mesh(path: &Path) -> Result<(TriangleMesh, LoadStats), MeshError> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase());
    match ext.as_deref() {
        Some("obj") => load_obj(path),
        Some("ply") => load_ply(path),
        _ => {
            let bytes = read(path)?;
            if bytes.starts_with(b"ply") {
                load_ply(path)
            } else if bytes.starts_with(b"v ") || bytes.iter().take(512).any(|&b| b == b'\n') {
                load_obj(path)
            } else {
                Err(MeshError::UnsupportedFormat(path.display().to_string()))
            }
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, MeshError> {
    std::fs::read(path).map_err(|source| MeshError::Io { path: path.display().to_string(), source })
}

fn finish(
    path: &Path,
    vertices: Vec<Point3<f64>>,
    triangles: Vec<[u32; 3]>,
) -> Result<(TriangleMesh, LoadStats), MeshError> {
    let nv = vertices.len();
    let (mesh, dropped) = TriangleMesh::new(vertices, triangles).map_err(|e| match e {
        MeshError::IndexOutOfRange { index, vertices } => MeshError::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: format!("face index {index} out of range for {vertices} vertices"),
        },
        other => other,
    })?;
    let stats = LoadStats {
        vertices: nv,
        triangles: mesh.triangles.len(),
        dropped_degenerate: dropped,
    };
    Ok((mesh, stats))
}

pub fn load_obj(path: &Path) -> Result<(TriangleMesh, LoadStats), MeshError> {
    let bytes = read(path)?;
    let text = String::from_utf8_lossy(&bytes);
    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    let perr = |line: usize, msg: String| MeshError::Parse {
        path: path.display().to_string(),
        line,
        msg,
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in coords.iter_mut() {
                    let tok = parts
                        .next()
                        .ok_or_else(|| perr(lineno, "vertex needs 3 coordinates".into()))?;
                    *c = tok
                        .parse()
                        .map_err(|_| perr(lineno, format!("bad vertex coordinate {tok:?}")))?;
                }
                vertices.push(Point3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut idx = Vec::new();
                for tok in parts {
                    let first = tok.split('/').next().unwrap_or(tok);
                    let raw: i64 = first
                        .parse()
                        .map_err(|_| perr(lineno, format!("bad face index {tok:?}")))?;
                    let resolved = if raw > 0 {
                        raw - 1
                    } else if raw < 0 {
                        vertices.len() as i64 + raw
                    } else {
                        return Err(perr(lineno, "face index 0 is not valid in OBJ".into()));
                    };
                    if resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(perr(lineno, format!("face index {raw} out of range")));
                    }
                    idx.push(resolved as u32);
                }
                if idx.len() < 3 {
                    return Err(perr(lineno, "face needs at least 3 vertices".into()));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            // vn/vt/usemtl/etc are ignored
            _ => {}
        }
    }
    finish(path, vertices, triangles)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum PlyFormat {
    Ascii,
    BinaryLE,
}

#[derive(Debug, Clone, Copy)]
enum PlyType {
    I8,
    U8,
    I16,
    U16,
    I32,
    U32,
    F32,
    F64,
}

impl PlyType {
    fn parse(tok: &str) -> Option<Self> {
        Some(match tok {
            "char" | "int8" => Self::I8,
            "uchar" | "uint8" => Self::U8,
            "short" | "int16" => Self::I16,
            "ushort" | "uint16" => Self::U16,
            "int" | "int32" => Self::I32,
            "uint" | "uint32" => Self::U32,
            "float" | "float32" => Self::F32,
            "double" | "float64" => Self::F64,
            _ => return None,
        })
    }

    fn size(self) -> usize {
        match self {
            Self::I8 | Self::U8 => 1,
            Self::I16 | Self::U16 => 2,
            Self::I32 | Self::U32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }
}

#[derive(Debug)]
enum PlyProperty {
    Scalar { ty: PlyType, name: String },
    List { count_ty: PlyType, item_ty: PlyType, name: String },
}

#[derive(Debug)]
struct PlyElement {
    name: String,
    count: usize,
    properties: Vec<PlyProperty>,
}

struct BinaryCursor<'a> {
    data: &'a [u8],
    offset: usize,
    path: String,
}

impl<'a> BinaryCursor<'a> {
    fn take(&mut self, len: usize, what: &str) -> Result<&'a [u8], MeshError> {
        if self.offset + len > self.data.len() {
            return Err(MeshError::BinaryParse {
                path: self.path.clone(),
                offset: self.offset,
                msg: format!("truncated file while reading {what}"),
            });
        }
        let s = &self.data[self.offset..self.offset + len];
        self.offset += len;
        Ok(s)
    }

    fn value(&mut self, ty: PlyType, what: &str) -> Result<f64, MeshError> {
        let bytes = self.take(ty.size(), what)?;
        Ok(match ty {
            PlyType::I8 => bytes[0] as i8 as f64,
            PlyType::U8 => bytes[0] as f64,
            PlyType::I16 => i16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            PlyType::U16 => u16::from_le_bytes([bytes[0], bytes[1]]) as f64,
            PlyType::I32 => i32::from_le_bytes(bytes.try_into().unwrap()) as f64,
            PlyType::U32 => u32::from_le_bytes(bytes.try_into().unwrap()) as f64,
            PlyType::F32 => f32::from_le_bytes(bytes.try_into().unwrap()) as f64,
            PlyType::F64 => f64::from_le_bytes(bytes.try_into().unwrap()),
        })
    }
}

/// Loads a PLY triangle mesh.
pub fn load_ply(path: &Path) -> Result<(TriangleMesh, LoadStats), MeshError> {
    let (vertices, triangles, _) = parse_ply(path)?;
    finish(path, vertices, triangles)
}

/// Loads a PLY point cloud (faces ignored), returning the points and the
/// per-vertex `quality` property when present. Used to read heatmap
/// exports back.
pub fn load_ply_points(
    path: &Path,
) -> Result<(Vec<Point3<f64>>, Option<Vec<f64>>), MeshError> {
    let (vertices, _, quality) = parse_ply(path)?;
    Ok((vertices, quality))
}

#[allow(clippy::type_complexity)]
fn parse_ply(
    path: &Path,
) -> Result<(Vec<Point3<f64>>, Vec<[u32; 3]>, Option<Vec<f64>>), MeshError> {
    let bytes = read(path)?;
    let path_str = path.display().to_string();
    let perr = |line: usize, msg: String| MeshError::Parse { path: path_str.clone(), line, msg };

    // header is ascii regardless of body format
    let header_end = find_header_end(&bytes).ok_or_else(|| MeshError::Parse {
        path: path_str.clone(),
        line: 0,
        msg: "missing end_header".into(),
    })?;
    let header_text = String::from_utf8_lossy(&bytes[..header_end.text_len]);
    let mut lines = header_text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "ply" => {}
        _ => return Err(perr(1, "not a PLY file (missing magic)".into())),
    }
    let mut format = None;
    let mut elements: Vec<PlyElement> = Vec::new();
    for (lineno, raw) in lines {
        let line = raw.trim();
        let lineno = lineno + 1;
        if line.is_empty() || line.starts_with("comment") || line.starts_with("obj_info") {
            continue;
        }
        let mut toks = line.split_whitespace();
        match toks.next() {
            Some("format") => {
                format = match toks.next() {
                    Some("ascii") => Some(PlyFormat::Ascii),
                    Some("binary_little_endian") => Some(PlyFormat::BinaryLE),
                    Some(other) => {
                        return Err(perr(lineno, format!("unsupported PLY format {other:?}")))
                    }
                    None => return Err(perr(lineno, "format line missing type".into())),
                };
            }
            Some("element") => {
                let name = toks
                    .next()
                    .ok_or_else(|| perr(lineno, "element needs a name".into()))?
                    .to_string();
                let count: usize = toks
                    .next()
                    .and_then(|c| c.parse().ok())
                    .ok_or_else(|| perr(lineno, "element needs a count".into()))?;
                elements.push(PlyElement { name, count, properties: Vec::new() });
            }
            Some("property") => {
                let elem = elements
                    .last_mut()
                    .ok_or_else(|| perr(lineno, "property before any element".into()))?;
                let first = toks
                    .next()
                    .ok_or_else(|| perr(lineno, "property needs a type".into()))?;
                if first == "list" {
                    let count_ty = toks
                        .next()
                        .and_then(PlyType::parse)
                        .ok_or_else(|| perr(lineno, "bad list count type".into()))?;
                    let item_ty = toks
                        .next()
                        .and_then(PlyType::parse)
                        .ok_or_else(|| perr(lineno, "bad list item type".into()))?;
                    let name = toks
                        .next()
                        .ok_or_else(|| perr(lineno, "list property needs a name".into()))?
                        .to_string();
                    elem.properties.push(PlyProperty::List { count_ty, item_ty, name });
                } else {
                    let ty = PlyType::parse(first)
                        .ok_or_else(|| perr(lineno, format!("unknown property type {first:?}")))?;
                    let name = toks
                        .next()
                        .ok_or_else(|| perr(lineno, "property needs a name".into()))?
                        .to_string();
                    elem.properties.push(PlyProperty::Scalar { ty, name });
                }
            }
            Some("end_header") => break,
            Some(other) => return Err(perr(lineno, format!("unexpected header token {other:?}"))),
            None => {}
        }
    }
    let format = format.ok_or_else(|| perr(0, "missing format line".into()))?;

    let mut vertices: Vec<Point3<f64>> = Vec::new();
    let mut quality: Vec<f64> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    match format {
        PlyFormat::Ascii => {
            let body = String::from_utf8_lossy(&bytes[header_end.body_start..]);
            let mut rows = body.lines().enumerate();
            for elem in &elements {
                for _ in 0..elem.count {
                    let (lineno, row) = rows
                        .next()
                        .ok_or_else(|| perr(0, format!("truncated {} element data", elem.name)))?;
                    let mut toks = row.split_whitespace();
                    parse_ply_row(elem, &mut || {
                        toks.next()
                            .ok_or_else(|| perr(lineno + 1, "short data row".into()))?
                            .parse::<f64>()
                            .map_err(|_| perr(lineno + 1, "bad numeric value".into()))
                    }, &mut vertices, &mut quality, &mut triangles)?;
                }
            }
        }
        PlyFormat::BinaryLE => {
            let mut cur = BinaryCursor {
                data: &bytes,
                offset: header_end.body_start,
                path: path_str.clone(),
            };
            for elem in &elements {
                for _ in 0..elem.count {
                    let mut props = elem.properties.iter();
                    let mut row: Vec<f64> = Vec::new();
                    // flatten one row into values, expanding lists
                    for prop in props.by_ref() {
                        match prop {
                            PlyProperty::Scalar { ty, name } => {
                                row.push(cur.value(*ty, name)?);
                            }
                            PlyProperty::List { count_ty, item_ty, name } => {
                                let count = cur.value(*count_ty, name)? as usize;
                                row.push(count as f64);
                                for _ in 0..count {
                                    row.push(cur.value(*item_ty, name)?);
                                }
                            }
                        }
                    }
                    let mut it = row.into_iter();
                    parse_ply_row(elem, &mut || {
                        it.next().ok_or_else(|| MeshError::BinaryParse {
                            path: path_str.clone(),
                            offset: cur_offset_placeholder(),
                            msg: "internal row underflow".into(),
                        })
                    }, &mut vertices, &mut quality, &mut triangles)?;
                }
            }
        }
    }

    let has_quality = !quality.is_empty();
    Ok((vertices, triangles, has_quality.then_some(quality)))
}

fn cur_offset_placeholder() -> usize {
    0
}

/// Consumes one element row through `next_val`, routing vertex
/// coordinates, quality, and face indices.
fn parse_ply_row(
    elem: &PlyElement,
    next_val: &mut dyn FnMut() -> Result<f64, MeshError>,
    vertices: &mut Vec<Point3<f64>>,
    quality: &mut Vec<f64>,
    triangles: &mut Vec<[u32; 3]>,
) -> Result<(), MeshError> {
    if elem.name == "vertex" {
        let (mut x, mut y, mut z, mut q) = (0.0, 0.0, 0.0, f64::NAN);
        for prop in &elem.properties {
            match prop {
                PlyProperty::Scalar { name, .. } => {
                    let v = next_val()?;
                    match name.as_str() {
                        "x" => x = v,
                        "y" => y = v,
                        "z" => z = v,
                        "quality" => q = v,
                        _ => {}
                    }
                }
                PlyProperty::List { .. } => {
                    let count = next_val()? as usize;
                    for _ in 0..count {
                        next_val()?;
                    }
                }
            }
        }
        vertices.push(Point3::new(x, y, z));
        if !q.is_nan() {
            quality.push(q);
        }
    } else if elem.name == "face" {
        for prop in &elem.properties {
            match prop {
                PlyProperty::List { name, .. }
                    if name == "vertex_indices" || name == "vertex_index" =>
                {
                    let count = next_val()? as usize;
                    let idx: Vec<u32> =
                        (0..count).map(|_| next_val().map(|v| v as u32)).collect::<Result<_, _>>()?;
                    for k in 1..idx.len().saturating_sub(1) {
                        triangles.push([idx[0], idx[k], idx[k + 1]]);
                    }
                }
                PlyProperty::List { .. } => {
                    let count = next_val()? as usize;
                    for _ in 0..count {
                        next_val()?;
                    }
                }
                PlyProperty::Scalar { .. } => {
                    next_val()?;
                }
            }
        }
    } else {
        // skip unknown elements
        for prop in &elem.properties {
            match prop {
                PlyProperty::Scalar { .. } => {
                    next_val()?;
                }
                PlyProperty::List { .. } => {
                    let count = next_val()? as usize;
                    for _ in 0..count {
                        next_val()?;
                    }
                }
            }
        }
    }
    Ok(())
}

struct HeaderEnd {
    /// Length of the ascii header text including the end_header line.
    text_len: usize,
    /// Byte offset where element data begins.
    body_start: usize,
}

fn find_header_end(bytes: &[u8]) -> Option<HeaderEnd> {
    let needle = b"end_header";
    let pos = bytes.windows(needle.len()).position(|w| w == needle)?;
    let mut body_start = pos + needle.len();
    // consume the line terminator (\n or \r\n)
    if bytes.get(body_start) == Some(&b'\r') {
        body_start += 1;
    }
    if bytes.get(body_start) == Some(&b'\n') {
        body_start += 1;
    }
    Some(HeaderEnd { text_len: pos, body_start })
}
