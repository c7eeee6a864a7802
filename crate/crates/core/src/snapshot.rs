//! ASCII snapshot files.
//!
//! ```text
//! NCHGRID M=<int> L=<float> t=<float>
//! <M lines of M space-separated values>
//! ```
//!
//! Line `j` of the body holds the values `u(x_0, y_j) … u(x_{M-1}, y_j)`.
//! Values are written in scientific notation with 17 significant digits.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::grid::GridFunction;

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub field: GridFunction,
}

pub fn format_snapshot(field: &GridFunction, t: f64) -> String {
    let m = field.m();
    let mut out = String::with_capacity(m * m * 25 + 64);
    writeln!(out, "NCHGRID M={} L={} t={}", m, field.length(), t).unwrap();
    for j in 0..m {
        for i in 0..m {
            if i > 0 {
                out.push(' ');
            }
            write!(out, "{:.16e}", field.get(i, j)).unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn parse_snapshot(text: &str, path: &Path) -> Result<Snapshot> {
    let err = |message: String| Error::Snapshot {
        path: path.to_path_buf(),
        message,
    };
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| err("empty file".into()))?;
    let mut tokens = header.split_whitespace();
    if tokens.next() != Some("NCHGRID") {
        return Err(err(format!("bad header '{header}'")));
    }
    let (mut m, mut length, mut t) = (None, None, None);
    for tok in tokens {
        let (key, value) = tok
            .split_once('=')
            .ok_or_else(|| err(format!("bad header token '{tok}'")))?;
        match key {
            "M" => m = Some(value.parse::<usize>().map_err(|e| err(format!("M: {e}")))?),
            "L" => length = Some(value.parse::<f64>().map_err(|e| err(format!("L: {e}")))?),
            "t" => t = Some(value.parse::<f64>().map_err(|e| err(format!("t: {e}")))?),
            other => return Err(err(format!("unknown header key '{other}'"))),
        }
    }
    let m = m.ok_or_else(|| err("header lacks M".into()))?;
    let length = length.ok_or_else(|| err("header lacks L".into()))?;
    let t = t.ok_or_else(|| err("header lacks t".into()))?;
    let mut values = vec![0.0; m * m];
    let mut rows = 0;
    for (j, line) in lines.enumerate() {
        if j >= m {
            return Err(err(format!("more than {m} data rows")));
        }
        let mut count = 0;
        for (i, tok) in line.split_whitespace().enumerate() {
            if i >= m {
                return Err(err(format!("row {j} has more than {m} values")));
            }
            values[i * m + j] = tok
                .parse::<f64>()
                .map_err(|e| err(format!("row {j} column {i}: {e}")))?;
            count += 1;
        }
        if count != m {
            return Err(err(format!("row {j} has {count} values, expected {m}")));
        }
        rows += 1;
    }
    if rows != m {
        return Err(err(format!("found {rows} data rows, expected {m}")));
    }
    let field = GridFunction::new(m, length, values).map_err(|e| err(e.to_string()))?;
    Ok(Snapshot { t, field })
}

pub fn write_snapshot(path: impl AsRef<Path>, field: &GridFunction, t: f64) -> Result<()> {
    fs::write(path, format_snapshot(field, t))?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::Snapshot {
        path: PathBuf::from(path),
        message: e.to_string(),
    })?;
    parse_snapshot(&text, path)
}

/// Binary 8-bit PGM mapping `[-1, 1]` linearly onto `0..=255`; image row `j`
/// is mesh row `y_j`.
pub fn write_pgm(path: impl AsRef<Path>, field: &GridFunction) -> Result<()> {
    let m = field.m();
    let mut file = fs::File::create(path)?;
    write!(file, "P5\n{m} {m}\n255\n")?;
    let mut bytes = Vec::with_capacity(m * m);
    for j in 0..m {
        for i in 0..m {
            let v = field.get(i, j).clamp(-1.0, 1.0);
            bytes.push(((v + 1.0) * 127.5).round() as u8);
        }
    }
    file.write_all(&bytes)?;
    Ok(())
}
