//! File formats: the GTP projection-vector format, its sidecar JSON manifest,
//! PGM (ASCII and binary) and CSV images, and direction-set JSON.
//!
//! GTP layout, one value per line in manifest order:
//!
//! ```text
//! GTP1
//! M N d
//! a b bin_count     (one line per direction)
//! v_0
//! ...
//! v_{m-1}
//! ```

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DirectionSet, GridDims};
use crate::projector::{BinLayout, Image, ImageKind, ProjectionVector};

/// Image container formats understood by the loaders and writers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageFormat {
    PgmAscii,
    PgmBinary,
    Csv,
}

impl std::str::FromStr for ImageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<ImageFormat> {
        match s {
            "pgm" | "pgm-ascii" => Ok(ImageFormat::PgmAscii),
            "pgm-binary" => Ok(ImageFormat::PgmBinary),
            "csv" => Ok(ImageFormat::Csv),
            other => Err(Error::parse(0, format!("unknown image format {other:?}"))),
        }
    }
}

// ---------------------------------------------------------------------------
// GTP projection vectors

/// Parsed contents of a GTP file.
#[derive(Debug, Clone, PartialEq)]
pub struct GtpFile {
    pub grid: GridDims,
    /// (a, b, bin_count) per direction, in block order.
    pub blocks: Vec<(i64, i64, usize)>,
    pub values: Vec<f64>,
}

impl GtpFile {
    /// Checks that the file describes exactly this layout.
    pub fn matches_layout(&self, layout: &BinLayout) -> Result<()> {
        if self.grid != layout.grid() {
            return Err(Error::DimensionMismatch(format!(
                "file grid {} vs layout grid {}",
                self.grid,
                layout.grid()
            )));
        }
        if self.blocks.len() != layout.blocks().len() {
            return Err(Error::DimensionMismatch(format!(
                "file has {} directions, layout has {}",
                self.blocks.len(),
                layout.blocks().len()
            )));
        }
        for (i, (blk, &(a, b, count))) in layout.blocks().iter().zip(&self.blocks).enumerate() {
            let d = blk.direction().vector();
            if d != (a, b) || blk.bin_count() != count {
                return Err(Error::DimensionMismatch(format!(
                    "block {i}: file ({a},{b})x{count} vs layout ({},{})x{}",
                    d.0,
                    d.1,
                    blk.bin_count()
                )));
            }
        }
        Ok(())
    }

    pub fn projection(&self) -> ProjectionVector {
        ProjectionVector::new(self.values.clone())
    }
}

pub fn write_gtp<W: Write>(w: &mut W, layout: &BinLayout, p: &ProjectionVector) -> Result<()> {
    if p.len() != layout.m() {
        return Err(Error::DimensionMismatch(format!(
            "projection vector has {} bins, layout has {}",
            p.len(),
            layout.m()
        )));
    }
    writeln!(w, "GTP1")?;
    writeln!(
        w,
        "{} {} {}",
        layout.grid().width(),
        layout.grid().height(),
        layout.blocks().len()
    )?;
    for blk in layout.blocks() {
        let (a, b) = blk.direction().vector();
        writeln!(w, "{a} {b} {}", blk.bin_count())?;
    }
    for v in p.values() {
        writeln!(w, "{v}")?;
    }
    Ok(())
}

pub fn read_gtp<R: BufRead>(r: R) -> Result<GtpFile> {
    let mut lines = r.lines().enumerate();
    let mut next_line = |expect: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i + 1, l)),
            Some((i, Err(e))) => Err(Error::parse(i + 1, e.to_string())),
            None => Err(Error::parse(0, format!("unexpected end of file, expected {expect}"))),
        }
    };
    let (ln, magic) = next_line("magic")?;
    if magic.trim() != "GTP1" {
        return Err(Error::parse(ln, format!("bad magic {magic:?}, expected GTP1")));
    }
    let (ln, header) = next_line("grid header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 3 {
        return Err(Error::parse(ln, "expected `M N d`"));
    }
    let m: usize = fields[0]
        .parse()
        .map_err(|e| Error::parse(ln, format!("bad M: {e}")))?;
    let n: usize = fields[1]
        .parse()
        .map_err(|e| Error::parse(ln, format!("bad N: {e}")))?;
    let d: usize = fields[2]
        .parse()
        .map_err(|e| Error::parse(ln, format!("bad d: {e}")))?;
    if m == 0 || n == 0 {
        return Err(Error::parse(ln, "grid sides must be positive"));
    }
    let mut blocks = Vec::with_capacity(d);
    for _ in 0..d {
        let (ln, line) = next_line("direction block")?;
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(ln, "expected `a b bin_count`"));
        }
        let a = fields[0]
            .parse()
            .map_err(|e| Error::parse(ln, format!("bad a: {e}")))?;
        let b = fields[1]
            .parse()
            .map_err(|e| Error::parse(ln, format!("bad b: {e}")))?;
        let count = fields[2]
            .parse()
            .map_err(|e| Error::parse(ln, format!("bad bin count: {e}")))?;
        blocks.push((a, b, count));
    }
    let total: usize = blocks.iter().map(|b| b.2).sum();
    let mut values = Vec::with_capacity(total);
    for _ in 0..total {
        let (ln, line) = next_line("projection value")?;
        values.push(
            line.trim()
                .parse()
                .map_err(|e| Error::parse(ln, format!("bad value: {e}")))?,
        );
    }
    Ok(GtpFile {
        grid: GridDims::new(m, n),
        blocks,
        values,
    })
}

pub fn write_gtp_file(path: &Path, layout: &BinLayout, p: &ProjectionVector) -> Result<()> {
    let mut buf = Vec::new();
    write_gtp(&mut buf, layout, p)?;
    fs::write(path, buf)?;
    Ok(())
}

pub fn read_gtp_file(path: &Path) -> Result<GtpFile> {
    let data = fs::read(path)?;
    read_gtp(&data[..])
}

// ---------------------------------------------------------------------------
// Layout manifest

/// One (direction, intercept, global bin) triple of the layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub direction: [i64; 2],
    pub t: i64,
    pub bin: usize,
}

/// The full bin manifest, bit-exactly describing the vector order.
pub fn layout_manifest(layout: &BinLayout) -> Vec<ManifestEntry> {
    let mut entries = Vec::with_capacity(layout.m());
    for blk in layout.blocks() {
        let (a, b) = blk.direction().vector();
        for (i, &t) in blk.t_values().iter().enumerate() {
            entries.push(ManifestEntry {
                direction: [a, b],
                t,
                bin: blk.offset() + i,
            });
        }
    }
    entries
}

pub fn write_manifest_file(path: &Path, layout: &BinLayout) -> Result<()> {
    let json = serde_json::to_string_pretty(&layout_manifest(layout))
        .map_err(|e| Error::parse(0, e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Images

fn require_binary(img: &Image, what: &str) -> Result<()> {
    if img.kind() != ImageKind::Binary {
        return Err(Error::DimensionMismatch(format!(
            "{what} requires a binary image; write real images as CSV"
        )));
    }
    Ok(())
}

pub fn write_pgm<W: Write>(w: &mut W, img: &Image, ascii: bool) -> Result<()> {
    require_binary(img, "PGM output")?;
    let (width, height) = (img.dims().width(), img.dims().height());
    if ascii {
        writeln!(w, "P2")?;
        writeln!(w, "{width} {height}")?;
        writeln!(w, "1")?;
        for y in 0..height {
            let row: Vec<String> = (0..width)
                .map(|x| format!("{}", img.get((x as i64, y as i64)) as u8))
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
    } else {
        write!(w, "P5\n{width} {height}\n1\n")?;
        let bytes: Vec<u8> = img.values().iter().map(|&v| v as u8).collect();
        w.write_all(&bytes)?;
    }
    Ok(())
}

struct PgmTokens<'a> {
    data: &'a [u8],
    pos: usize,
    line: usize,
}

impl PgmTokens<'_> {
    fn next_token(&mut self) -> Result<&str> {
        loop {
            while self.pos < self.data.len() && self.data[self.pos].is_ascii_whitespace() {
                if self.data[self.pos] == b'\n' {
                    self.line += 1;
                }
                self.pos += 1;
            }
            if self.pos < self.data.len() && self.data[self.pos] == b'#' {
                while self.pos < self.data.len() && self.data[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            break;
        }
        if self.pos >= self.data.len() {
            return Err(Error::parse(self.line, "unexpected end of PGM data"));
        }
        let start = self.pos;
        while self.pos < self.data.len() && !self.data[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.data[start..self.pos])
            .map_err(|e| Error::parse(self.line, e.to_string()))
    }

    fn next_usize(&mut self, what: &str) -> Result<usize> {
        let line = self.line;
        self.next_token()?
            .parse()
            .map_err(|e| Error::parse(line, format!("bad {what}: {e}")))
    }
}

/// Reads P2 or P5 data. The result is binary exactly when every sample is
/// 0 or the declared maximum; otherwise the raw sample values are kept as a
/// real image (threshold with [`threshold_binary`] if needed).
pub fn read_pgm(data: &[u8]) -> Result<Image> {
    let mut toks = PgmTokens {
        data,
        pos: 0,
        line: 1,
    };
    let magic = toks.next_token()?.to_string();
    if magic != "P2" && magic != "P5" {
        return Err(Error::parse(toks.line, format!("bad PGM magic {magic:?}")));
    }
    let width = toks.next_usize("width")?;
    let height = toks.next_usize("height")?;
    let maxval = toks.next_usize("maxval")?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::parse(toks.line, "bad PGM header"));
    }
    let count = width * height;
    let mut samples = Vec::with_capacity(count);
    if magic == "P2" {
        for _ in 0..count {
            samples.push(toks.next_usize("sample")? as f64);
        }
    } else {
        // single whitespace byte separates the header from raster data
        let mut pos = toks.pos;
        if pos < data.len() && data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let bytes_per = if maxval < 256 { 1 } else { 2 };
        if data.len() < pos + count * bytes_per {
            return Err(Error::parse(toks.line, "truncated P5 raster"));
        }
        for i in 0..count {
            let v = if bytes_per == 1 {
                data[pos + i] as f64
            } else {
                u16::from_be_bytes([data[pos + 2 * i], data[pos + 2 * i + 1]]) as f64
            };
            samples.push(v);
        }
    }
    let dims = GridDims::new(width, height);
    let maxval = maxval as f64;
    if samples.iter().all(|&v| v == 0.0 || v == maxval) {
        Image::binary(dims, samples.into_iter().map(|v| v / maxval).collect())
    } else {
        Ok(Image::from_values(dims, samples))
    }
}

/// ASCII PGM for small nonnegative integer data (ghost magnitudes and the
/// like); every value must lie in 0..=maxval.
pub fn write_pgm_gray<W: Write>(w: &mut W, img: &Image, maxval: u16) -> Result<()> {
    let (width, height) = (img.dims().width(), img.dims().height());
    writeln!(w, "P2")?;
    writeln!(w, "{width} {height}")?;
    writeln!(w, "{maxval}")?;
    for y in 0..height {
        let mut row = Vec::with_capacity(width);
        for x in 0..width {
            let v = img.get((x as i64, y as i64));
            if v < 0.0 || v > maxval as f64 || v.fract() != 0.0 {
                return Err(Error::DimensionMismatch(format!(
                    "value {v} at ({x},{y}) does not fit a 0..={maxval} gray scale"
                )));
            }
            row.push(format!("{}", v as u64));
        }
        writeln!(w, "{}", row.join(" "))?;
    }
    Ok(())
}

/// The documented threshold rule for gray data: value > max/2 becomes 1.
pub fn threshold_binary(img: &Image, maxval: f64) -> Image {
    let values = img
        .values()
        .iter()
        .map(|&v| if v > maxval / 2.0 { 1.0 } else { 0.0 })
        .collect();
    Image::binary(img.dims(), values).expect("thresholded values are binary")
}

pub fn write_csv<W: Write>(w: &mut W, img: &Image) -> Result<()> {
    let (width, height) = (img.dims().width(), img.dims().height());
    for y in 0..height {
        let row: Vec<String> = (0..width)
            .map(|x| format!("{}", img.get((x as i64, y as i64))))
            .collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_csv(data: &[u8]) -> Result<Image> {
    let text = std::str::from_utf8(data).map_err(|e| Error::parse(0, e.to_string()))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        let row = row.map_err(|e| Error::parse(i + 1, format!("bad CSV value: {e}")))?;
        if let Some(prev) = rows.first() {
            if prev.len() != row.len() {
                return Err(Error::parse(
                    i + 1,
                    format!("row has {} columns, expected {}", row.len(), prev.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::parse(1, "empty image file"));
    }
    let dims = GridDims::new(rows[0].len(), rows.len());
    let values: Vec<f64> = rows.into_iter().flatten().collect();
    if values.iter().all(|&v| v == 0.0 || v == 1.0) {
        Image::binary(dims, values)
    } else {
        Ok(Image::from_values(dims, values))
    }
}

pub fn save_image(path: &Path, img: &Image, format: ImageFormat) -> Result<()> {
    let mut buf = Vec::new();
    match format {
        ImageFormat::PgmAscii => write_pgm(&mut buf, img, true)?,
        ImageFormat::PgmBinary => write_pgm(&mut buf, img, false)?,
        ImageFormat::Csv => write_csv(&mut buf, img)?,
    }
    fs::write(path, buf)?;
    Ok(())
}

pub fn load_image(path: &Path, format: ImageFormat) -> Result<Image> {
    let data = fs::read(path)?;
    match format {
        ImageFormat::PgmAscii | ImageFormat::PgmBinary => read_pgm(&data),
        ImageFormat::Csv => read_csv(&data),
    }
}

/// Picks the format from the extension (.pgm/.pnm vs .csv), defaulting to
/// PGM when the data starts with a P2/P5 magic.
pub fn load_image_auto(path: &Path) -> Result<Image> {
    let ext = path
        .extension()
        .and_then(|e| e.to_str())
        .unwrap_or("")
        .to_ascii_lowercase();
    match ext.as_str() {
        "pgm" | "pnm" => load_image(path, ImageFormat::PgmAscii),
        "csv" => load_image(path, ImageFormat::Csv),
        _ => {
            let data = fs::read(path)?;
            if data.starts_with(b"P2") || data.starts_with(b"P5") {
                read_pgm(&data)
            } else {
                read_csv(&data)
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Direction sets

pub fn read_direction_set_file(path: &Path) -> Result<DirectionSet> {
    let data = fs::read_to_string(path)?;
    serde_json::from_str(&data).map_err(|e| Error::parse(e.line(), e.to_string()))
}

pub fn write_direction_set_file(path: &Path, s: &DirectionSet) -> Result<()> {
    let json = serde_json::to_string(s).map_err(|e| Error::parse(0, e.to_string()))?;
    fs::write(path, json)?;
    Ok(())
}
