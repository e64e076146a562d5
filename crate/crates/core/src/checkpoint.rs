//! Binary checkpoint container.
//!
//! A checkpoint is a small header plus named sections, enough to resume a
//! run bit-for-bit: flat parameters, optimizer moments, and whatever
//! metadata the caller wants to echo. No generator state is stored —
//! random streams are derived from `(seed, purpose, iteration, index)`, so
//! the header's seed and iteration counter fully determine every draw
//! after resumption.
//!
//! Layout, little-endian throughout:
//!
//! ```text
//! magic      8 bytes  "HVMCCKP1"
//! version    u32
//! scalar     u8       width of the scalar type (4 or 8 bytes)
//! iter       u64
//! seed       u64
//! layout     u64      parameter-layout checksum
//! sections   u32      count, then per section:
//!     name_len u16, name utf-8, kind u8, count u64, payload
//! ```
//!
//! Section kinds: 0 = scalars, 1 = 64-bit counters, 2 = raw bytes.
//! Sections are sorted by name, so identical contents serialize to
//! identical files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{CoreError, Result};
use crate::scalar::Scalar;

const MAGIC: &[u8; 8] = b"HVMCCKP1";
const VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq)]
pub enum Section<T> {
    Scalars(Vec<T>),
    Counters(Vec<u64>),
    Bytes(Vec<u8>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Checkpoint<T> {
    pub iter: u64,
    pub seed: u64,
    pub layout_checksum: u64,
    sections: BTreeMap<String, Section<T>>,
}

impl<T: Scalar> Checkpoint<T> {
    pub fn new(iter: u64, seed: u64, layout_checksum: u64) -> Self {
        Self {
            iter,
            seed,
            layout_checksum,
            sections: BTreeMap::new(),
        }
    }

    pub fn insert_scalars(&mut self, name: &str, values: Vec<T>) {
        self.sections.insert(name.into(), Section::Scalars(values));
    }

    pub fn insert_counters(&mut self, name: &str, values: Vec<u64>) {
        self.sections.insert(name.into(), Section::Counters(values));
    }

    pub fn insert_bytes(&mut self, name: &str, bytes: Vec<u8>) {
        self.sections.insert(name.into(), Section::Bytes(bytes));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.sections.keys().map(String::as_str)
    }

    pub fn has(&self, name: &str) -> bool {
        self.sections.contains_key(name)
    }

    fn section(&self, name: &str) -> Result<&Section<T>> {
        self.sections
            .get(name)
            .ok_or_else(|| CoreError::Checkpoint(format!("missing section '{name}'")))
    }

    pub fn scalars(&self, name: &str) -> Result<&[T]> {
        match self.section(name)? {
            Section::Scalars(v) => Ok(v),
            _ => Err(CoreError::Checkpoint(format!(
                "section '{name}' does not hold scalars"
            ))),
        }
    }

    pub fn counters(&self, name: &str) -> Result<&[u64]> {
        match self.section(name)? {
            Section::Counters(v) => Ok(v),
            _ => Err(CoreError::Checkpoint(format!(
                "section '{name}' does not hold counters"
            ))),
        }
    }

    pub fn counter(&self, name: &str) -> Result<u64> {
        let v = self.counters(name)?;
        if v.len() != 1 {
            return Err(CoreError::Checkpoint(format!(
                "section '{name}' holds {} counters, expected 1",
                v.len()
            )));
        }
        Ok(v[0])
    }

    pub fn bytes(&self, name: &str) -> Result<&[u8]> {
        match self.section(name)? {
            Section::Bytes(v) => Ok(v),
            _ => Err(CoreError::Checkpoint(format!(
                "section '{name}' does not hold bytes"
            ))),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.push(T::BYTES as u8);
        out.extend_from_slice(&self.iter.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.layout_checksum.to_le_bytes());
        out.extend_from_slice(&(self.sections.len() as u32).to_le_bytes());
        for (name, section) in &self.sections {
            out.extend_from_slice(&(name.len() as u16).to_le_bytes());
            out.extend_from_slice(name.as_bytes());
            match section {
                Section::Scalars(v) => {
                    out.push(0);
                    out.extend_from_slice(&(v.len() as u64).to_le_bytes());
                    for &x in v {
                        x.write_le(&mut out);
                    }
                }
                Section::Counters(v) => {
                    out.push(1);
                    out.extend_from_slice(&(v.len() as u64).to_le_bytes());
                    for &x in v {
                        out.extend_from_slice(&x.to_le_bytes());
                    }
                }
                Section::Bytes(v) => {
                    out.push(2);
                    out.extend_from_slice(&(v.len() as u64).to_le_bytes());
                    out.extend_from_slice(v);
                }
            }
        }
        out
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self> {
        let mut r = Reader::new(data);
        let magic = r.take(8)?;
        if magic != MAGIC {
            return Err(CoreError::Checkpoint("bad magic bytes".into()));
        }
        let version = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        if version != VERSION {
            return Err(CoreError::Checkpoint(format!(
                "unsupported version {version}, expected {VERSION}"
            )));
        }
        let width = r.take(1)?[0] as usize;
        if width != T::BYTES {
            return Err(CoreError::Checkpoint(format!(
                "scalar width {width} bytes, expected {}",
                T::BYTES
            )));
        }
        let iter = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let seed = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let layout_checksum = u64::from_le_bytes(r.take(8)?.try_into().unwrap());
        let n_sections = u32::from_le_bytes(r.take(4)?.try_into().unwrap());
        let mut sections = BTreeMap::new();
        for _ in 0..n_sections {
            let name_len = u16::from_le_bytes(r.take(2)?.try_into().unwrap()) as usize;
            let name = std::str::from_utf8(r.take(name_len)?)
                .map_err(|_| CoreError::Checkpoint("section name is not utf-8".into()))?
                .to_owned();
            let kind = r.take(1)?[0];
            let count = u64::from_le_bytes(r.take(8)?.try_into().unwrap()) as usize;
            let section = match kind {
                0 => {
                    let raw = r.take(count * T::BYTES)?;
                    Section::Scalars(
                        raw.chunks_exact(T::BYTES).map(T::read_le).collect(),
                    )
                }
                1 => {
                    let raw = r.take(count * 8)?;
                    Section::Counters(
                        raw.chunks_exact(8)
                            .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                            .collect(),
                    )
                }
                2 => Section::Bytes(r.take(count)?.to_vec()),
                k => {
                    return Err(CoreError::Checkpoint(format!(
                        "unknown section kind {k}"
                    )))
                }
            };
            if sections.insert(name.clone(), section).is_some() {
                return Err(CoreError::Checkpoint(format!(
                    "duplicate section '{name}'"
                )));
            }
        }
        if !r.is_empty() {
            return Err(CoreError::Checkpoint("trailing bytes".into()));
        }
        Ok(Self {
            iter,
            seed,
            layout_checksum,
            sections,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut file = fs::File::create(path)?;
        file.write_all(&self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut data = Vec::new();
        fs::File::open(path)?.read_to_end(&mut data)?;
        Self::from_bytes(&data)
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        if self.pos + n > self.data.len() {
            return Err(CoreError::Checkpoint(format!(
                "truncated: wanted {n} bytes at offset {}, file has {}",
                self.pos,
                self.data.len()
            )));
        }
        let out = &self.data[self.pos..self.pos + n];
        self.pos += n;
        Ok(out)
    }

    fn is_empty(&self) -> bool {
        self.pos == self.data.len()
    }
}
