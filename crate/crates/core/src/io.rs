//! File formats: CSV point clouds, plans, matrices and tables; binary PPM images.
//!
//! Floats are written with 17 significant digits so that every `f64`
//! round-trips exactly.

use std::io::{Read, Write};

use ndarray::{Array2, ArrayView2};

use crate::color::Image;
use crate::error::{invalid, Error, Result};
use crate::measures::{PointCloud, TransportPlan};

/// Formats a float with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidInput(format!("malformed CSV: {other:?}")),
    }
}

/// Reads one point per row. Lines starting with `#` (such as a header) are skipped.
pub fn read_point_cloud<R: Read>(reader: R) -> Result<PointCloud> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::InvalidInput(format!("row {line}: cannot parse {field:?} as a number"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    PointCloud::from_rows(&rows)
}

/// Reads a point cloud from a file path.
pub fn load_point_cloud(path: impl AsRef<std::path::Path>) -> Result<PointCloud> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| open_err(path, e))?;
    read_point_cloud(file)
}

fn open_err(path: &std::path::Path, e: std::io::Error) -> Error {
    Error::Io(std::io::Error::new(
        e.kind(),
        format!("{}: {e}", path.display()),
    ))
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().has_headers(false).from_writer(w)
}

fn write_table<W: Write>(
    w: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    let mut out = writer(w);
    if !header.is_empty() {
        out.write_record(header).map_err(csv_err)?;
    }
    for row in rows {
        out.write_record(&row).map_err(csv_err)?;
    }
    out.flush()?;
    Ok(())
}

/// Writes a matrix of floats, one row per line, under a `#` header.
pub fn write_matrix<W: Write>(w: W, values: ArrayView2<'_, f64>) -> Result<()> {
    let header: Vec<String> = (0..values.ncols()).map(|j| format!("x{j}")).collect();
    let mut header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let first = format!("# {}", header_refs.first().copied().unwrap_or(""));
    if let Some(h) = header_refs.first_mut() {
        *h = &first;
    }
    write_table(
        w,
        &header_refs,
        values
            .rows()
            .into_iter()
            .map(|r| r.iter().map(|&v| fmt_f64(v)).collect()),
    )
}

pub fn write_point_cloud<W: Write>(w: W, cloud: &PointCloud) -> Result<()> {
    write_matrix(w, cloud.points())
}

/// Writes `row,col,mass` triplets (0-indexed) after a header line.
pub fn write_plan<W: Write>(w: W, plan: &TransportPlan) -> Result<()> {
    write_table(
        w,
        &["row", "col", "mass"],
        plan.entries()
            .iter()
            .map(|&(r, c, m)| vec![r.to_string(), c.to_string(), fmt_f64(m)]),
    )
}

/// Reads a plan written by [`write_plan`]; marginals are set to the realized sums.
pub fn read_plan<R: Read>(reader: R, rows: usize, cols: usize) -> Result<TransportPlan> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut entries = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(csv_err)?;
        let parse_err = || Error::InvalidInput(format!("bad plan row {record:?}"));
        let r: usize = record
            .get(0)
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        let c: usize = record
            .get(1)
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        let m: f64 = record
            .get(2)
            .and_then(|s| s.parse().ok())
            .ok_or_else(parse_err)?;
        entries.push((r, c, m));
    }
    let draft =
        TransportPlan::from_triplets(rows, cols, entries, vec![0.0; rows], vec![0.0; cols])?;
    TransportPlan::from_triplets(
        rows,
        cols,
        draft.entries().to_vec(),
        draft.row_sums(),
        draft.col_sums(),
    )
}

/// Generic table writer for traces and sample dumps.
pub fn write_records<W: Write>(
    w: W,
    header: &[&str],
    rows: impl Iterator<Item = Vec<String>>,
) -> Result<()> {
    write_table(w, header, rows)
}

/// `index,r,g,b` rows for a palette.
pub fn write_palette<W: Write>(w: W, centers: ArrayView2<'_, f64>) -> Result<()> {
    write_table(
        w,
        &["index", "r", "g", "b"],
        centers.rows().into_iter().enumerate().map(|(i, c)| {
            std::iter::once(i.to_string())
                .chain(c.iter().map(|&v| fmt_f64(v)))
                .collect()
        }),
    )
}

fn ppm_token(bytes: &[u8], pos: &mut usize) -> Result<String> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return invalid("truncated PPM header"),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace()) {
        *pos += 1;
    }
    Ok(String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

/// Decodes a binary PPM (`P6`, maxval at most 255), scaling channels to `[0, 1]`.
pub fn decode_ppm(bytes: &[u8]) -> Result<Image> {
    let mut pos = 0;
    if ppm_token(bytes, &mut pos)? != "P6" {
        return invalid("not a binary PPM (P6) file");
    }
    let mut number = |what: &str| -> Result<usize> {
        let tok = ppm_token(bytes, &mut pos)?;
        tok.parse()
            .map_err(|_| Error::InvalidInput(format!("bad PPM {what}: {tok:?}")))
    };
    let width = number("width")?;
    let height = number("height")?;
    let maxval = number("maxval")?;
    if width == 0 || height == 0 {
        return invalid("PPM has zero size");
    }
    if maxval == 0 || maxval > 255 {
        return invalid(format!("unsupported PPM maxval {maxval}"));
    }
    // Exactly one whitespace byte separates the header from the raster.
    pos += 1;
    let len = width * height * 3;
    let raster = bytes
        .get(pos..pos + len)
        .ok_or_else(|| Error::InvalidInput("truncated PPM raster".into()))?;
    if raster.iter().any(|&b| b as usize > maxval) {
        return invalid("PPM sample exceeds maxval");
    }
    let pixels = Array2::from_shape_vec(
        (width * height, 3),
        raster
            .iter()
            .map(|&b| f64::from(b) / maxval as f64)
            .collect(),
    )
    .map_err(|e| Error::InvalidInput(e.to_string()))?;
    Image::new(width, height, pixels)
}

/// Encodes as `P6` with maxval 255, rounding to the nearest level.
pub fn encode_ppm(image: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    out.extend(
        image
            .pixels()
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8),
    );
    out
}

pub fn load_ppm(path: impl AsRef<std::path::Path>) -> Result<Image> {
    let path = path.as_ref();
    decode_ppm(&std::fs::read(path).map_err(|e| open_err(path, e))?)
}
