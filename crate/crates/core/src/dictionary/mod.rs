//! The map from snapped grid curves to payloads.
//!
//! Two interchangeable backends sit behind [`Dictionary`]: a randomly seeded
//! hash map and a deterministic prefix tree. Both serialize to the same
//! `ANNC` byte layout, with entries written in lexicographic key order:
//!
//! ```text
//! magic "ANNC" | version u32 = 1 | mode u8 (0 nn, 1 count) | p f64 (∞ as 0)
//! epsilon f64 | r f64 | d u32 | out_len u32 | edge f64 | entries u64
//! entry*: out_len·d × i64 lattice coords, then
//!         nn:    u32 byte length + UTF-8 curve id
//!         count: u64
//! ```
//!
//! All integers and reals are little-endian.

mod hashed;
mod trie;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::sync::Arc;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};

use crate::error::{Error, Result};
use crate::geometry::Metric;
use crate::grid::LatticeCurveKey;

use hashed::HashedMap;
use trie::PrefixTree;

pub const MAGIC: &[u8; 4] = b"ANNC";
pub const FORMAT_VERSION: u32 = 1;

/// Shared, cheaply clonable curve identifier.
pub type CurveId = Arc<str>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    NearNeighbor,
    RangeCount,
}

impl Mode {
    fn to_byte(self) -> u8 {
        match self {
            Mode::NearNeighbor => 0,
            Mode::RangeCount => 1,
        }
    }

    fn from_byte(b: u8) -> Result<Self> {
        match b {
            0 => Ok(Mode::NearNeighbor),
            1 => Ok(Mode::RangeCount),
            other => Err(Error::Format(format!("unknown mode byte {other}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Backend {
    #[default]
    Hash,
    Trie,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Curve(CurveId),
    Count(u64),
}

impl Payload {
    pub fn curve(&self) -> Option<&CurveId> {
        match self {
            Payload::Curve(id) => Some(id),
            Payload::Count(_) => None,
        }
    }

    pub fn count(&self) -> Option<u64> {
        match self {
            Payload::Count(c) => Some(*c),
            Payload::Curve(_) => None,
        }
    }
}

/// Parameters recorded in the file header.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DictHeader {
    pub mode: Mode,
    pub metric: Metric,
    pub epsilon: f64,
    pub r: f64,
    pub dim: usize,
    pub out_len: usize,
    pub edge: f64,
}

impl DictHeader {
    /// A header for a standalone dictionary with no grid attached.
    pub fn bare(mode: Mode, dim: usize, out_len: usize) -> Self {
        DictHeader {
            mode,
            metric: Metric::Frechet,
            epsilon: 1.0,
            r: 1.0,
            dim,
            out_len,
            edge: 1.0,
        }
    }

    fn write_to(&self, w: &mut impl Write) -> io::Result<()> {
        w.write_all(MAGIC)?;
        w.write_u32::<LE>(FORMAT_VERSION)?;
        w.write_u8(self.mode.to_byte())?;
        let p = self.metric.p();
        w.write_f64::<LE>(if p.is_infinite() { 0.0 } else { p })?;
        w.write_f64::<LE>(self.epsilon)?;
        w.write_f64::<LE>(self.r)?;
        w.write_u32::<LE>(self.dim as u32)?;
        w.write_u32::<LE>(self.out_len as u32)?;
        w.write_f64::<LE>(self.edge)
    }

    fn read_from(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != MAGIC {
            return Err(Error::Format(format!("bad magic {magic:?}, expected \"ANNC\"")));
        }
        let version = r.read_u32::<LE>().map_err(truncated)?;
        if version != FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported format version {version}")));
        }
        let mode = Mode::from_byte(r.read_u8().map_err(truncated)?)?;
        let p = r.read_f64::<LE>().map_err(truncated)?;
        let metric = Metric::from_p(if p == 0.0 { f64::INFINITY } else { p })
            .map_err(|e| Error::Format(format!("header metric: {e}")))?;
        let epsilon = r.read_f64::<LE>().map_err(truncated)?;
        let radius = r.read_f64::<LE>().map_err(truncated)?;
        let dim = r.read_u32::<LE>().map_err(truncated)? as usize;
        let out_len = r.read_u32::<LE>().map_err(truncated)? as usize;
        let edge = r.read_f64::<LE>().map_err(truncated)?;
        if dim == 0 || out_len == 0 {
            return Err(Error::Format(format!("header has dim={dim}, out_len={out_len}")));
        }
        Ok(DictHeader {
            mode,
            metric,
            epsilon,
            r: radius,
            dim,
            out_len,
            edge,
        })
    }
}

pub(crate) fn truncated(e: io::Error) -> Error {
    if e.kind() == io::ErrorKind::UnexpectedEof {
        Error::Corrupt("file is truncated".into())
    } else {
        Error::Io(e)
    }
}

#[derive(Clone, Debug)]
enum Store {
    Hash(HashedMap),
    Trie(PrefixTree),
}

macro_rules! dispatch {
    ($store:expr, $m:ident => $body:expr) => {
        match $store {
            Store::Hash($m) => $body,
            Store::Trie($m) => $body,
        }
    };
}

/// A fixed-length dictionary of snapped curves.
#[derive(Clone, Debug)]
pub struct Dictionary {
    header: DictHeader,
    store: Store,
}

impl Dictionary {
    pub fn new(backend: Backend, header: DictHeader) -> Self {
        let store = match backend {
            Backend::Hash => Store::Hash(HashedMap::new(header.out_len * header.dim)),
            Backend::Trie => Store::Trie(PrefixTree::new(header.dim)),
        };
        Dictionary { header, store }
    }

    pub fn header(&self) -> &DictHeader {
        &self.header
    }

    pub fn backend(&self) -> Backend {
        match self.store {
            Store::Hash(_) => Backend::Hash,
            Store::Trie(_) => Backend::Trie,
        }
    }

    pub fn len(&self) -> usize {
        dispatch!(&self.store, s => s.len())
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Prefix-tree node count (excluding the root); `None` for the hash backend.
    pub fn node_count(&self) -> Option<usize> {
        match &self.store {
            Store::Trie(t) => Some(t.node_count()),
            Store::Hash(_) => None,
        }
    }

    fn check_cells(&self, cells: &[i64]) -> Result<()> {
        let expected = self.header.out_len * self.header.dim;
        if cells.len() != expected {
            return Err(Error::Length {
                expected: self.header.out_len,
                found: cells.len() / self.header.dim.max(1),
            });
        }
        Ok(())
    }

    fn check_key(&self, key: &LatticeCurveKey) -> Result<()> {
        if key.dim() != self.header.dim {
            return Err(Error::Dimension {
                expected: self.header.dim,
                found: key.dim(),
            });
        }
        self.check_cells(key.cells())
    }

    fn check_mode(&self, wanted: Mode, op: &str) -> Result<()> {
        if self.header.mode != wanted {
            return Err(Error::ModeMismatch(format!(
                "{op} on a {:?} dictionary",
                self.header.mode
            )));
        }
        Ok(())
    }

    /// Inserts `id` under `key` unless the key is already present.
    pub fn insert_first_wins(&mut self, key: &LatticeCurveKey, id: &CurveId) -> Result<bool> {
        self.check_key(key)?;
        self.insert_cells_first_wins(key.cells(), id)
    }

    pub(crate) fn insert_cells_first_wins(&mut self, cells: &[i64], id: &CurveId) -> Result<bool> {
        self.check_mode(Mode::NearNeighbor, "insert")?;
        self.check_cells(cells)?;
        dispatch!(&mut self.store, s => {
            if s.get(cells).is_some() {
                Ok(false)
            } else {
                s.insert(cells, Payload::Curve(id.clone()));
                Ok(true)
            }
        })
    }

    /// Adds one to the counter under `key`, creating it at 1.
    pub fn increment(&mut self, key: &LatticeCurveKey) -> Result<u64> {
        self.check_key(key)?;
        self.increment_cells(key.cells())
    }

    pub(crate) fn increment_cells(&mut self, cells: &[i64]) -> Result<u64> {
        self.check_mode(Mode::RangeCount, "increment")?;
        self.check_cells(cells)?;
        dispatch!(&mut self.store, s => {
            match s.get_mut(cells) {
                Some(Payload::Count(c)) => {
                    *c += 1;
                    Ok(*c)
                }
                Some(Payload::Curve(_)) => unreachable!("counting dictionary holds a curve payload"),
                None => {
                    s.insert(cells, Payload::Count(1));
                    Ok(1)
                }
            }
        })
    }

    /// Subtracts one from the counter under `key`, removing it at zero.
    /// Returns the remaining count, or `None` when the key was absent.
    pub fn decrement(&mut self, key: &LatticeCurveKey) -> Result<Option<u64>> {
        self.check_key(key)?;
        self.decrement_cells(key.cells())
    }

    pub(crate) fn decrement_cells(&mut self, cells: &[i64]) -> Result<Option<u64>> {
        self.check_mode(Mode::RangeCount, "decrement")?;
        dispatch!(&mut self.store, s => {
            let left = match s.get_mut(cells) {
                Some(Payload::Count(c)) => {
                    *c -= 1;
                    *c
                }
                _ => return Ok(None),
            };
            if left == 0 {
                s.remove(cells);
            }
            Ok(Some(left))
        })
    }

    /// Overwrites the payload under `key`, inserting if absent.
    pub(crate) fn set_cells(&mut self, cells: &[i64], payload: Payload) {
        dispatch!(&mut self.store, s => s.insert(cells, payload))
    }

    pub fn remove(&mut self, key: &LatticeCurveKey) -> Option<Payload> {
        self.remove_cells(key.cells())
    }

    pub(crate) fn remove_cells(&mut self, cells: &[i64]) -> Option<Payload> {
        dispatch!(&mut self.store, s => s.remove(cells))
    }

    pub fn lookup(&self, key: &LatticeCurveKey) -> Option<&Payload> {
        self.lookup_cells(key.cells())
    }

    pub fn lookup_cells(&self, cells: &[i64]) -> Option<&Payload> {
        dispatch!(&self.store, s => s.get(cells))
    }

    /// All entries in lexicographic key order.
    pub fn entries(&self) -> Vec<(LatticeCurveKey, Payload)> {
        let dim = self.header.dim;
        let mut out = Vec::with_capacity(self.len());
        dispatch!(&self.store, s => s.for_each(|k, p| {
            out.push((LatticeCurveKey::from_flat(dim, k.to_vec()), p.clone()))
        }));
        if matches!(self.store, Store::Hash(_)) {
            out.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        }
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        self.header.write_to(w)?;
        w.write_u64::<LE>(self.len() as u64)?;
        for (key, payload) in self.entries() {
            for &c in key.cells() {
                w.write_i64::<LE>(c)?;
            }
            match payload {
                Payload::Curve(id) => {
                    w.write_u32::<LE>(id.len() as u32)?;
                    w.write_all(id.as_bytes())?;
                }
                Payload::Count(c) => w.write_u64::<LE>(c)?,
            }
        }
        Ok(())
    }

    pub fn read_from(r: &mut impl Read, backend: Backend) -> Result<Self> {
        let header = DictHeader::read_from(r)?;
        let mut dict = Dictionary::new(backend, header);
        let entries = r.read_u64::<LE>().map_err(truncated)?;
        let mut cells = vec![0i64; header.out_len * header.dim];
        for _ in 0..entries {
            for c in cells.iter_mut() {
                *c = r.read_i64::<LE>().map_err(truncated)?;
            }
            let payload = match header.mode {
                Mode::NearNeighbor => {
                    let len = r.read_u32::<LE>().map_err(truncated)? as usize;
                    let mut bytes = vec![0u8; len];
                    r.read_exact(&mut bytes).map_err(truncated)?;
                    let id = String::from_utf8(bytes).map_err(|_| Error::Corrupt("curve id is not UTF-8".into()))?;
                    Payload::Curve(id.into())
                }
                Mode::RangeCount => {
                    let c = r.read_u64::<LE>().map_err(truncated)?;
                    if c == 0 {
                        return Err(Error::Corrupt("stored count of zero".into()));
                    }
                    Payload::Count(c)
                }
            };
            if dict.lookup_cells(&cells).is_some() {
                return Err(Error::Corrupt("duplicate key".into()));
            }
            dict.set_cells(&cells, payload);
        }
        Ok(dict)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, backend: Backend) -> Result<Self> {
        let mut r = BufReader::new(File::open(path)?);
        Dictionary::read_from(&mut r, backend)
    }
}
