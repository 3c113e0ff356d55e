//! Text model files.
//!
//! ```text
//! idpnet 1
//! 4 100 2878
//! W 1
//! <ℓ_1 lines of ℓ_0 hex floats>
//! b 1
//! <one line of ℓ_1 hex floats>
//! W 2
//! …
//! ```

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::hexfloat::{format_hex, parse_hex};
use super::{Layer, Params};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &str = "idpnet 1";

pub fn write_params<W: Write>(p: &Params, mut out: W) -> std::io::Result<()> {
    let hex = |v: f64| {
        format_hex(v).ok_or_else(|| std::io::Error::new(std::io::ErrorKind::InvalidData, "non-finite parameter"))
    };
    writeln!(out, "{MODEL_MAGIC}")?;
    let widths: Vec<String> = p.widths().iter().map(usize::to_string).collect();
    writeln!(out, "{}", widths.join(" "))?;
    for (k, layer) in p.layers().iter().enumerate() {
        writeln!(out, "W {}", k + 1)?;
        for row in layer.weights.chunks_exact(layer.inputs) {
            let line = row.iter().map(|&v| hex(v)).collect::<std::io::Result<Vec<_>>>()?;
            writeln!(out, "{}", line.join(" "))?;
        }
        writeln!(out, "b {}", k + 1)?;
        let line = layer.bias.iter().map(|&v| hex(v)).collect::<std::io::Result<Vec<_>>>()?;
        writeln!(out, "{}", line.join(" "))?;
    }
    out.flush()
}

pub fn save_params(p: &Params, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    write_params(p, BufWriter::new(file)).map_err(|e| Error::io(path, e))
}

pub fn load_params(path: impl AsRef<Path>) -> Result<Params> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_params(BufReader::new(file), path)
}

/// Reads a model; `origin` only labels error messages.
pub fn read_params<R: BufRead>(input: R, origin: &Path) -> Result<Params> {
    let mut lines = input.lines().enumerate();
    let mut next_line = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((i, Ok(l))) => Ok((i + 1, l)),
            Some((i, Err(e))) => Err(Error::parse(origin, i + 1, e.to_string())),
            None => Err(Error::parse(origin, 0, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (n, magic) = next_line("header")?;
    if magic.trim_end() != MODEL_MAGIC {
        return Err(Error::parse(origin, n, format!("expected header {MODEL_MAGIC:?}, found {magic:?}")));
    }
    let (n, widths_line) = next_line("widths")?;
    let widths = widths_line
        .split_whitespace()
        .map(str::parse::<usize>)
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::parse(origin, n, format!("bad width: {e}")))?;
    if widths.len() < 2 || widths.contains(&0) {
        return Err(Error::parse(origin, n, format!("invalid widths {widths:?}")));
    }

    let parse_row = |n: usize, line: &str, len: usize| -> Result<Vec<f64>> {
        let row = line
            .split_whitespace()
            .map(parse_hex)
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::parse(origin, n, e))?;
        if row.len() != len {
            return Err(Error::parse(origin, n, format!("expected {len} values, found {}", row.len())));
        }
        Ok(row)
    };

    let mut layers = Vec::with_capacity(widths.len() - 1);
    for (k, w) in widths.windows(2).enumerate() {
        let (inputs, outputs) = (w[0], w[1]);
        let (n, tag) = next_line("weight block")?;
        if tag.trim_end() != format!("W {}", k + 1) {
            return Err(Error::parse(origin, n, format!("expected \"W {}\", found {tag:?}", k + 1)));
        }
        let mut weights = Vec::with_capacity(inputs * outputs);
        for _ in 0..outputs {
            let (n, line) = next_line("weight row")?;
            weights.extend(parse_row(n, &line, inputs)?);
        }
        let (n, tag) = next_line("bias block")?;
        if tag.trim_end() != format!("b {}", k + 1) {
            return Err(Error::parse(origin, n, format!("expected \"b {}\", found {tag:?}", k + 1)));
        }
        let (n, line) = next_line("bias row")?;
        let bias = parse_row(n, &line, outputs)?;
        layers.push(Layer { inputs, outputs, weights, bias });
    }
    if let Some((i, Ok(extra))) = lines.next() {
        if !extra.trim().is_empty() {
            return Err(Error::parse(origin, i + 1, "trailing data after last layer"));
        }
    }
    Params::from_layers(layers)
}
