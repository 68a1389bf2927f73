//! Export and import of grid states: a JSON header next to a binary or CSV
//! data file.
//!
//! Binary data is interleaved little-endian `f64` pairs `re, im`; CSV data has
//! the columns `index,re,im`. Both list samples axis-0 fastest.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridSpec, StateField};
use crate::error::{Error, Result};

pub const FIELD_SCHEMA: u32 = 1;
const ORDER: &str = "axis0_fastest";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Encoding {
    Binary,
    Csv,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldHeader {
    pub schema: u32,
    pub grid: GridSpec,
    pub encoding: Encoding,
    /// Path of the data file, relative to the header's directory.
    pub data_file: String,
    pub len: usize,
    pub order: String,
}

fn data_path(header: &Path, encoding: Encoding) -> PathBuf {
    header.with_extension(match encoding {
        Encoding::Binary => "bin",
        Encoding::Csv => "csv",
    })
}

/// Writes `header_path` and its data file; returns the data file path.
pub fn export(field: &StateField, header_path: &Path, encoding: Encoding) -> Result<PathBuf> {
    let data = data_path(header_path, encoding);
    let header = FieldHeader {
        schema: FIELD_SCHEMA,
        grid: *field.grid(),
        encoding,
        data_file: data.file_name().and_then(|s| s.to_str()).unwrap_or_default().to_string(),
        len: field.values().len(),
        order: ORDER.to_string(),
    };
    let mut out = BufWriter::new(fs::File::create(&data)?);
    match encoding {
        Encoding::Binary => {
            for z in field.values() {
                out.write_all(&z.re.to_le_bytes())?;
                out.write_all(&z.im.to_le_bytes())?;
            }
        }
        Encoding::Csv => {
            writeln!(out, "index,re,im")?;
            for (i, z) in field.values().iter().enumerate() {
                writeln!(out, "{i},{:e},{:e}", z.re, z.im)?;
            }
        }
    }
    out.flush()?;
    fs::write(header_path, serde_json::to_string_pretty(&header)?)?;
    Ok(data)
}

/// Reads a state written by [`export`].
pub fn import(header_path: &Path) -> Result<StateField> {
    let header: FieldHeader = serde_json::from_str(&fs::read_to_string(header_path)?)?;
    if header.schema != FIELD_SCHEMA {
        return Err(Error::Format(format!("unsupported field schema {}", header.schema)));
    }
    if header.order != ORDER {
        return Err(Error::Format(format!("unsupported sample order `{}`", header.order)));
    }
    header.grid.validate()?;
    if header.len != header.grid.len() {
        return Err(Error::Format(format!("header length {} but grid holds {}", header.len, header.grid.len())));
    }
    let dir = header_path.parent().unwrap_or_else(|| Path::new("."));
    let data = dir.join(&header.data_file);
    let values = match header.encoding {
        Encoding::Binary => {
            let bytes = fs::read(&data)?;
            if bytes.len() != header.len * 16 {
                return Err(Error::Format(format!("expected {} bytes, found {}", header.len * 16, bytes.len())));
            }
            bytes
                .chunks_exact(16)
                .map(|c| {
                    let re = f64::from_le_bytes(c[..8].try_into().expect("8 bytes"));
                    let im = f64::from_le_bytes(c[8..].try_into().expect("8 bytes"));
                    Complex64::new(re, im)
                })
                .collect::<Vec<_>>()
        }
        Encoding::Csv => parse_csv(&fs::read_to_string(&data)?, header.len)?,
    };
    StateField::new(header.grid, values)
}

fn parse_csv(text: &str, len: usize) -> Result<Vec<Complex64>> {
    let mut values = vec![None; len];
    for (lineno, line) in text.lines().enumerate().skip(1) {
        if line.trim().is_empty() {
            continue;
        }
        let bad = || Error::Format(format!("line {}: expected `index,re,im`", lineno + 1));
        let mut parts = line.split(',').map(str::trim);
        let (i, re, im) = (parts.next(), parts.next(), parts.next());
        let (Some(i), Some(re), Some(im), None) = (i, re, im, parts.next()) else {
            return Err(bad());
        };
        let i: usize = i.parse().map_err(|_| bad())?;
        let z = Complex64::new(re.parse().map_err(|_| bad())?, im.parse().map_err(|_| bad())?);
        let slot = values.get_mut(i).ok_or_else(|| Error::Format(format!("index {i} out of range")))?;
        *slot = Some(z);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::Format(format!("missing sample {i}"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> StateField {
        let g = GridSpec::spectral(2, 8, 3.0).unwrap();
        StateField::from_fn(g, |x| Complex64::new(x[0].sin(), x[1] * 0.1)).unwrap()
    }

    #[test]
    fn roundtrip_both_encodings() {
        let dir = tempfile::tempdir().unwrap();
        let f = sample();
        for enc in [Encoding::Binary, Encoding::Csv] {
            let header = dir.path().join(format!("state_{enc:?}.json"));
            export(&f, &header, enc).unwrap();
            let g = import(&header).unwrap();
            assert_eq!(f, g);
        }
    }

    #[test]
    fn truncated_binary_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let header = dir.path().join("s.json");
        let data = export(&sample(), &header, Encoding::Binary).unwrap();
        let bytes = fs::read(&data).unwrap();
        fs::write(&data, &bytes[..bytes.len() - 3]).unwrap();
        assert!(matches!(import(&header), Err(Error::Format(_))));
    }
}
