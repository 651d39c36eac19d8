//! File loading and symbol mapping shared by the subcommands.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ped_core::text::{read_string_file, write_string_file, SymbolMap};
use ped_core::Text;

/// Load one string, auto-detecting the alphabet unless one is declared.
pub fn load_text(path: &Path, alphabet: Option<u16>) -> Result<Text> {
    let bytes = read_string_file(path).with_context(|| format!("reading {}", path.display()))?;
    let map = match alphabet {
        Some(a) => SymbolMap::canonical(a)?,
        None => SymbolMap::auto(&[&bytes])?,
    };
    let text = map
        .encode(&bytes)
        .with_context(|| format!("encoding {}", path.display()))?;
    Ok(text)
}

/// Load a pair of strings under one shared symbol map, so equal bytes in
/// the two files always compare equal.
pub fn load_pair(x: &Path, y: &Path, alphabet: Option<u16>) -> Result<(Text, Text)> {
    let bx = read_string_file(x).with_context(|| format!("reading {}", x.display()))?;
    let by = read_string_file(y).with_context(|| format!("reading {}", y.display()))?;
    let map = match alphabet {
        Some(a) => SymbolMap::canonical(a)?,
        None => SymbolMap::auto(&[&bx[..], &by[..]])?,
    };
    Ok((map.encode(&bx)?, map.encode(&by)?))
}

/// Write a text in its canonical byte form.
pub fn store_text(path: &Path, text: &Text) -> Result<()> {
    let map = SymbolMap::canonical(text.alphabet())?;
    let bytes = map.decode(text)?;
    write_string_file(path, &bytes).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Parse a 0/1 matrix file: one row of '0'/'1' characters per line.
pub fn load_matrix(path: &Path) -> Result<Vec<Vec<bool>>> {
    let lines = ped_core::text::read_lines_file(path)?;
    let mut rows = Vec::with_capacity(lines.len());
    for (ln, line) in lines.iter().enumerate() {
        let mut row = Vec::with_capacity(line.len());
        for (col, &b) in line.iter().enumerate() {
            match b {
                b'0' => row.push(false),
                b'1' => row.push(true),
                b' ' | b'\t' => continue,
                other => bail!(
                    "{}:{}:{}: expected 0 or 1, found {:?}",
                    path.display(),
                    ln + 1,
                    col + 1,
                    other as char
                ),
            }
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    if rows.is_empty() {
        bail!("{}: empty comparison matrix", path.display());
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        bail!("{}: ragged comparison matrix", path.display());
    }
    Ok(rows)
}
