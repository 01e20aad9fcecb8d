//! On-disk formats: cube files, binary PPM, chart / dataset / ROI CSVs.

use std::fs;
use std::io::Write as _;
use std::path::Path;

use crate::calibration::{write_atomic, ChartBlock, ColorChart};
use crate::error::{Error, Result};
use crate::phantom::{DatasetRecord, SyntheticDataset};
use crate::spectral::{RgbImage, RgbTriple, Roi, SpectralCube, Spectrum, WavelengthGrid};

pub const CUBE_MAGIC: &[u8; 4] = b"MSC1";

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

/// Header, little-endian u32 sizes, f32 band centres, then f32 band-sequential planes.
pub fn encode_cube(cube: &SpectralCube) -> Vec<u8> {
    let bands = cube.grid().bands();
    let mut out = Vec::with_capacity(16 + 4 * (bands.len() + cube.data().len()));
    out.extend_from_slice(CUBE_MAGIC);
    for v in [cube.width(), cube.height(), bands.len()] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    for &b in bands {
        out.extend_from_slice(&(b as f32).to_le_bytes());
    }
    for &v in cube.data() {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

pub fn decode_cube(bytes: &[u8]) -> Result<SpectralCube> {
    let bad = |reason: String| Error::format("cube file", reason);
    if bytes.len() < 16 || &bytes[..4] != CUBE_MAGIC {
        return Err(bad("missing MSC1 header".into()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[4 + 4 * i..8 + 4 * i].try_into().unwrap()) as usize;
    let (w, h, nb) = (word(0), word(1), word(2));
    let values = w
        .checked_mul(h)
        .and_then(|p| p.checked_mul(nb))
        .ok_or_else(|| bad("sizes overflow".into()))?;
    let expected = 16 + 4 * (nb + values);
    if bytes.len() != expected {
        return Err(bad(format!(
            "{w}x{h}x{nb} needs {expected} bytes, file has {}",
            bytes.len()
        )));
    }
    let floats: Vec<f64> = bytes[16..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
        .collect();
    let grid = WavelengthGrid::new(floats[..nb].to_vec())?;
    SpectralCube::new(w, h, grid, floats[nb..].to_vec())
}

pub fn write_cube(path: &Path, cube: &SpectralCube) -> Result<()> {
    write_atomic(path, &encode_cube(cube))
}

pub fn read_cube(path: &Path) -> Result<SpectralCube> {
    decode_cube(&read_file(path)?)
}

/// Binary PPM (P6) with 8-bit samples.
pub fn encode_ppm(image: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", image.width(), image.height()).into_bytes();
    for p in image.pixels() {
        for v in p.to_array() {
            out.push(v.round().clamp(0.0, 255.0) as u8);
        }
    }
    out
}

pub fn decode_ppm(bytes: &[u8]) -> Result<RgbImage> {
    let bad = |reason: &str| Error::format("PPM image", reason.to_string());
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        // skip whitespace and comments
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("non-ASCII header"))?);
    }
    if fields[0] != "P6" {
        return Err(bad("only binary P6 is supported"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad header number"));
    let (w, h, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval != 255 {
        return Err(bad("only 8-bit (maxval 255) images are supported"));
    }
    // exactly one whitespace byte separates the header from the raster
    pos += 1;
    let need = w * h * 3;
    if bytes.len() < pos + need {
        return Err(bad("raster shorter than declared size"));
    }
    let pixels = bytes[pos..pos + need]
        .chunks_exact(3)
        .map(|c| RgbTriple {
            r: c[0] as f64,
            g: c[1] as f64,
            b: c[2] as f64,
        })
        .collect();
    RgbImage::new(w, h, pixels)
}

pub fn write_ppm(path: &Path, image: &RgbImage) -> Result<()> {
    write_atomic(path, &encode_ppm(image))
}

pub fn read_ppm(path: &Path) -> Result<RgbImage> {
    decode_ppm(&read_file(path)?)
}

fn band_label(nm: f64) -> String {
    format!("{nm}")
}

fn parse_f64(field: &str, what: &str, row: usize) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::format(what, format!("row {row}: '{field}' is not a number")))
}

fn csv_reader(text: &str) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes())
}

/// `block_id,420,430,...,680`
pub fn chart_to_csv(chart: &ColorChart) -> String {
    let mut out = String::from("block_id");
    for &b in chart.grid().bands() {
        out.push(',');
        out.push_str(&band_label(b));
    }
    out.push('\n');
    for block in chart.blocks() {
        out.push_str(&block.id);
        for v in block.reflectance.values() {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push('\n');
    }
    out
}

pub fn chart_from_csv(text: &str, name: &str) -> Result<ColorChart> {
    let what = "chart CSV";
    let mut rdr = csv_reader(text);
    let header = rdr.headers().map_err(|e| Error::format(what, e.to_string()))?.clone();
    if header.get(0) != Some("block_id") || header.len() < 2 {
        return Err(Error::format(what, "header must start with block_id"));
    }
    let bands = header
        .iter()
        .skip(1)
        .map(|h| parse_f64(h, what, 0))
        .collect::<Result<Vec<_>>>()?;
    let grid = WavelengthGrid::new(bands)?;
    let mut blocks = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(what, e.to_string()))?;
        if rec.len() != header.len() {
            return Err(Error::format(what, format!("row {} has {} fields", i + 1, rec.len())));
        }
        let values = rec
            .iter()
            .skip(1)
            .map(|f| parse_f64(f, what, i + 1))
            .collect::<Result<Vec<_>>>()?;
        if values.iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::format(what, format!("row {}: reflectance outside [0, 1]", i + 1)));
        }
        blocks.push(ChartBlock {
            id: rec[0].to_string(),
            reflectance: Spectrum::new(grid.clone(), values)?,
        });
    }
    ColorChart::new(name, blocks)
}

pub fn read_chart(path: &Path) -> Result<ColorChart> {
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "chart".into());
    chart_from_csv(&read_text(path)?, &name)
}

pub fn write_chart(path: &Path, chart: &ColorChart) -> Result<()> {
    write_atomic(path, chart_to_csv(chart).as_bytes())
}

/// `id,r,g,b,s420,...,s680,bbl_umol_l`
pub fn dataset_to_csv(records: &[DatasetRecord]) -> String {
    let mut out = String::from("id,r,g,b");
    if let Some(first) = records.first() {
        for &b in first.spectrum.grid().bands() {
            out.push_str(",s");
            out.push_str(&band_label(b));
        }
    }
    out.push_str(",bbl_umol_l\n");
    for r in records {
        out.push_str(&format!("{},{},{},{}", r.id, r.rgb.r, r.rgb.g, r.rgb.b));
        for v in r.spectrum.values() {
            out.push(',');
            out.push_str(&v.to_string());
        }
        out.push(',');
        out.push_str(&r.bbl.to_string());
        out.push('\n');
    }
    out
}

pub fn dataset_from_csv(text: &str) -> Result<Vec<DatasetRecord>> {
    let what = "dataset CSV";
    let mut rdr = csv_reader(text);
    let header = rdr.headers().map_err(|e| Error::format(what, e.to_string()))?.clone();
    let cols: Vec<&str> = header.iter().collect();
    if cols.len() < 6 || cols[..4] != ["id", "r", "g", "b"] || cols[cols.len() - 1] != "bbl_umol_l" {
        return Err(Error::format(what, "header must be id,r,g,b,s<nm>...,bbl_umol_l"));
    }
    let bands = cols[4..cols.len() - 1]
        .iter()
        .map(|c| {
            c.strip_prefix('s')
                .ok_or_else(|| Error::format(what, format!("band column '{c}' lacks the s prefix")))
                .and_then(|nm| parse_f64(nm, what, 0))
        })
        .collect::<Result<Vec<_>>>()?;
    let grid = WavelengthGrid::new(bands)?;
    let mut records = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::format(what, e.to_string()))?;
        if rec.len() != cols.len() {
            return Err(Error::format(what, format!("row {row} has {} fields", rec.len())));
        }
        let id = rec[0]
            .parse::<usize>()
            .map_err(|_| Error::format(what, format!("row {row}: bad id '{}'", &rec[0])))?;
        let num = |j: usize| parse_f64(&rec[j], what, row);
        let rgb = RgbTriple::new(num(1)?, num(2)?, num(3)?)?;
        let values = (4..cols.len() - 1).map(num).collect::<Result<Vec<_>>>()?;
        records.push(DatasetRecord {
            id,
            rgb,
            spectrum: Spectrum::new(grid.clone(), values)?,
            bbl: num(cols.len() - 1)?,
        });
    }
    if records.is_empty() {
        return Err(Error::EmptyInput("dataset rows"));
    }
    Ok(records)
}

pub fn write_dataset(path: &Path, dataset: &SyntheticDataset) -> Result<()> {
    write_atomic(path, dataset_to_csv(&dataset.records).as_bytes())
}

pub fn read_dataset(path: &Path) -> Result<Vec<DatasetRecord>> {
    dataset_from_csv(&read_text(path)?)
}

/// One line of an ROI list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RoiEntry {
    /// 1-based data row, for messages.
    pub row: usize,
    pub roi: Roi,
    pub snapshot_id: Option<String>,
}

/// `x,y,side[,snapshot_id]`, header optional.
pub fn rois_from_csv(text: &str) -> Result<Vec<RoiEntry>> {
    let what = "ROI CSV";
    let has_header = text
        .lines()
        .find(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .is_some_and(|l| l.trim_start().starts_with('x'));
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .has_headers(has_header)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| Error::format(what, e.to_string()))?;
        if rec.len() < 3 || rec.len() > 4 {
            return Err(Error::format(what, format!("row {row}: expected x,y,side[,snapshot_id]")));
        }
        let num = |j: usize| {
            rec[j]
                .parse::<usize>()
                .map_err(|_| Error::format(what, format!("row {row}: '{}' is not a count", &rec[j])))
        };
        let roi = Roi::new(num(0)?, num(1)?, num(2)?)
            .map_err(|e| Error::format(what, format!("row {row}: {e}")))?;
        let snapshot_id = rec.get(3).filter(|s| !s.is_empty()).map(str::to_string);
        out.push(RoiEntry { row, roi, snapshot_id });
    }
    if out.is_empty() {
        return Err(Error::EmptyInput("ROI list"));
    }
    Ok(out)
}

pub fn read_rois(path: &Path) -> Result<Vec<RoiEntry>> {
    rois_from_csv(&read_text(path)?)
}

/// Writes `text` to `path`, or to stdout when `path` is `-`.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    if path.as_os_str() == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes())
            .map_err(|e| Error::io(path, e))?;
        return Ok(());
    }
    write_atomic(path, text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ppm_round_trip_with_comment() {
        let img = RgbImage::from_fn(3, 2, |x, y| RgbTriple::new((x * 80) as f64, (y * 200) as f64, 7.0).unwrap())
            .unwrap();
        let bytes = encode_ppm(&img);
        assert_eq!(decode_ppm(&bytes).unwrap(), img);
        let mut commented = b"P6\n# made by hand\n3 2\n255\n".to_vec();
        commented.extend_from_slice(&bytes[bytes.len() - 18..]);
        assert_eq!(decode_ppm(&commented).unwrap(), img);
        assert!(decode_ppm(b"P3\n1 1\n255\n0 0 0").is_err());
        assert!(decode_ppm(b"P6\n2 2\n255\n\x00\x00").is_err());
    }

    #[test]
    fn cube_rejects_bad_payload() {
        let cube = SpectralCube::new(1, 1, WavelengthGrid::new(vec![500.0]).unwrap(), vec![0.25]).unwrap();
        let mut bytes = encode_cube(&cube);
        assert_eq!(decode_cube(&bytes).unwrap(), cube);
        bytes.push(0);
        assert!(decode_cube(&bytes).is_err());
        assert!(decode_cube(b"XXXX").is_err());
    }

    #[test]
    fn roi_csv_variants() {
        let plain = rois_from_csv("0,0,10\n5,5,3\n").unwrap();
        assert_eq!(plain.len(), 2);
        assert_eq!(plain[1].roi, Roi::new(5, 5, 3).unwrap());
        let grouped = rois_from_csv("x,y,side,snapshot_id\n0,0,4,a\n1,1,4,b\n").unwrap();
        assert_eq!(grouped[1].snapshot_id.as_deref(), Some("b"));
        assert!(rois_from_csv("x,y,side\n").is_err());
        assert!(rois_from_csv("1,2\n").is_err());
    }
}
