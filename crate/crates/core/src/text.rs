//! Symbol sequences and their on-disk forms.
//!
//! A [`Text`] is a sequence of small integer codes over a declared
//! alphabet, plus the distinguished [`PAD`] sentinel used when block
//! decomposition pads strings to a block multiple. `PAD` never collides
//! with an alphabet code.

use std::path::Path;

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Out-of-alphabet padding sentinel.
pub const PAD: Symbol = Symbol::MAX;

/// Default alphabet size (genomic-style).
pub const DEFAULT_ALPHABET: u16 = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text {
    symbols: Vec<Symbol>,
    alphabet: u16,
}

impl Text {
    /// Build from raw codes, validating each against the alphabet.
    pub fn from_codes(symbols: Vec<Symbol>, alphabet: u16) -> Result<Self> {
        if alphabet == 0 {
            return Err(Error::InvalidParam("alphabet must be non-empty".into()));
        }
        for (i, &s) in symbols.iter().enumerate() {
            if s as u32 >= alphabet as u32 {
                return Err(Error::InvalidParam(format!(
                    "symbol {s} at index {i} outside alphabet of size {alphabet}"
                )));
            }
        }
        Ok(Self { symbols, alphabet })
    }

    pub fn empty(alphabet: u16) -> Self {
        Self {
            symbols: Vec::new(),
            alphabet,
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn alphabet(&self) -> u16 {
        self.alphabet
    }

    /// 1-based symbol access; positions follow the convention `x_1..x_n`.
    #[inline]
    pub fn sym(&self, pos: usize) -> Symbol {
        self.symbols[pos - 1]
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    /// 1-based inclusive slice `[lo, hi]`; `hi < lo` yields the empty slice.
    pub fn slice(&self, lo: usize, hi: usize) -> &[Symbol] {
        if hi < lo {
            &[]
        } else {
            &self.symbols[lo - 1..hi]
        }
    }

    /// Copy with `count` PAD symbols appended.
    pub fn padded(&self, count: usize) -> Text {
        let mut symbols = self.symbols.clone();
        symbols.extend(std::iter::repeat(PAD).take(count));
        Text {
            symbols,
            alphabet: self.alphabet,
        }
    }

    pub fn from_slice(slice: &[Symbol], alphabet: u16) -> Text {
        Text {
            symbols: slice.to_vec(),
            alphabet,
        }
    }

    /// Stable 64-bit content fingerprint (FNV-1a over the symbol stream).
    pub fn fingerprint(&self) -> u64 {
        let mut h: u64 = 0xcbf29ce484222325;
        let mut eat = |b: u8| {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        };
        eat(self.alphabet as u8);
        eat((self.alphabet >> 8) as u8);
        for &s in &self.symbols {
            eat(s as u8);
            eat((s >> 8) as u8);
        }
        h
    }
}

/// Bidirectional byte<->code mapping for file I/O.
///
/// The canonical encoding writes alphabets of size <= 4 as `ACGT`, sizes
/// <= 26 as lowercase letters, and larger alphabets as raw byte values.
/// Auto-detected maps assign codes in ascending byte order, which agrees
/// with the canonical maps on their own output.
#[derive(Debug, Clone)]
pub struct SymbolMap {
    byte_for: Vec<u8>,
    code_for: [Option<u16>; 256],
}

impl SymbolMap {
    pub fn canonical(alphabet: u16) -> Result<Self> {
        if alphabet == 0 || alphabet as usize > 256 {
            return Err(Error::InvalidParam(format!(
                "alphabet size {alphabet} not representable in byte form"
            )));
        }
        let byte_for: Vec<u8> = if alphabet <= 4 {
            b"ACGT"[..alphabet as usize].to_vec()
        } else if alphabet <= 26 {
            (0..alphabet as u8).map(|c| b'a' + c).collect()
        } else {
            (0..alphabet as usize).map(|c| c as u8).collect()
        };
        Ok(Self::from_bytes(byte_for))
    }

    /// Infer a map from the distinct bytes appearing in the given corpora.
    pub fn auto(corpora: &[&[u8]]) -> Result<Self> {
        let mut seen = [false; 256];
        for c in corpora {
            for &b in *c {
                seen[b as usize] = true;
            }
        }
        let byte_for: Vec<u8> = (0u16..256).filter(|&b| seen[b as usize]).map(|b| b as u8).collect();
        if byte_for.is_empty() {
            // An empty corpus still needs a non-empty alphabet.
            return Ok(Self::from_bytes(vec![b'a']));
        }
        Ok(Self::from_bytes(byte_for))
    }

    fn from_bytes(byte_for: Vec<u8>) -> Self {
        let mut code_for = [None; 256];
        for (code, &b) in byte_for.iter().enumerate() {
            code_for[b as usize] = Some(code as u16);
        }
        Self { byte_for, code_for }
    }

    pub fn alphabet(&self) -> u16 {
        self.byte_for.len() as u16
    }

    pub fn encode(&self, bytes: &[u8]) -> Result<Text> {
        let mut symbols = Vec::with_capacity(bytes.len());
        for (offset, &b) in bytes.iter().enumerate() {
            match self.code_for[b as usize] {
                Some(code) => symbols.push(code),
                None => return Err(Error::BadSymbol { byte: b, offset }),
            }
        }
        Ok(Text {
            symbols,
            alphabet: self.alphabet(),
        })
    }

    /// PAD symbols are not written; they exist only inside the pipeline.
    pub fn decode(&self, text: &Text) -> Result<Vec<u8>> {
        text.symbols
            .iter()
            .map(|&s| {
                self.byte_for
                    .get(s as usize)
                    .copied()
                    .ok_or_else(|| Error::InvalidParam(format!("symbol {s} has no byte form")))
            })
            .collect()
    }
}

/// Read a whole file as one string (a single trailing newline is ignored).
pub fn read_string_file(path: &Path) -> Result<Vec<u8>> {
    let mut bytes = std::fs::read(path)?;
    if bytes.last() == Some(&b'\n') {
        bytes.pop();
        if bytes.last() == Some(&b'\r') {
            bytes.pop();
        }
    }
    Ok(bytes)
}

/// Read a line-oriented file: one string per line.
pub fn read_lines_file(path: &Path) -> Result<Vec<Vec<u8>>> {
    let bytes = std::fs::read(path)?;
    let mut lines = Vec::new();
    for line in bytes.split(|&b| b == b'\n') {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        lines.push(line.to_vec());
    }
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    Ok(lines)
}

pub fn write_string_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut out = bytes.to_vec();
    out.push(b'\n');
    std::fs::write(path, out)?;
    Ok(())
}
