//! The assembled near-neighbour / range-counting structure.
//!
//! Building enumerates, for every input curve and every supported query
//! length, the grid curves close to it and folds them into one dictionary per
//! length. A query snaps the query curve to the grid and performs a single
//! dictionary lookup.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use byteorder::{LittleEndian as LE, ReadBytesExt, WriteBytesExt};
use indexmap::IndexMap;
use rayon::prelude::*;

use crate::candidates::{self, CandidateRequest, DEFAULT_MAX_CANDIDATES};
use crate::dictionary::{truncated, Backend, CurveId, DictHeader, Dictionary, Mode, Payload, MAGIC};
use crate::error::{Error, Result};
use crate::geometry::{Curve, Metric};
use crate::grid::GridSpec;
use crate::simplify::{simplify_dfd, SimplifyOutcome};

/// Magic of the registry section that follows the dictionaries in an index file.
pub const REGISTRY_MAGIC: &[u8; 4] = b"CREG";
const REGISTRY_VERSION: u32 = 1;

/// Approximation used when simplifying input curves for asymmetric queries;
/// yields simplifications within `2r`.
pub const ASYMMETRIC_SIMPLIFY_EPS: f64 = 1.0;

/// Generation radius around simplifications in the asymmetric index, in units of `r`.
pub const ASYMMETRIC_RADIUS_FACTOR: f64 = 4.0;

#[derive(Clone, Debug, PartialEq)]
pub struct IndexParams {
    pub epsilon: f64,
    pub r: f64,
    pub metric: Metric,
    pub mode: Mode,
    /// Query length for the asymmetric (short-query) variant; Fréchet only.
    pub asymmetric_k: Option<usize>,
    /// Explicit query lengths. `None` means every length up to the longest
    /// input for the Fréchet distance and the longest input length otherwise.
    pub query_lengths: Option<Vec<usize>>,
    pub backend: Backend,
    /// Per-curve bound on candidate keys.
    pub max_candidates: u64,
    /// Worker threads for candidate enumeration; `1` streams sequentially.
    pub threads: usize,
}

impl IndexParams {
    pub fn new(epsilon: f64, r: f64, metric: Metric) -> Self {
        IndexParams {
            epsilon,
            r,
            metric,
            mode: Mode::NearNeighbor,
            asymmetric_k: None,
            query_lengths: None,
            backend: Backend::Hash,
            max_candidates: DEFAULT_MAX_CANDIDATES,
            threads: 1,
        }
    }

    pub fn mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn asymmetric(mut self, k: usize) -> Self {
        self.asymmetric_k = Some(k);
        self
    }

    pub fn query_lengths(mut self, lengths: Vec<usize>) -> Self {
        self.query_lengths = Some(lengths);
        self
    }

    pub fn backend(mut self, backend: Backend) -> Self {
        self.backend = backend;
        self
    }

    pub fn max_candidates(mut self, limit: u64) -> Self {
        self.max_candidates = limit;
        self
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon={} outside (0, 1]",
                self.epsilon
            )));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            return Err(Error::InvalidParameter(format!("r={} must be positive", self.r)));
        }
        if let Some(k) = self.asymmetric_k {
            if !self.metric.is_frechet() {
                return Err(Error::InvalidParameter(
                    "asymmetric queries are only supported for the Fréchet distance".into(),
                ));
            }
            if k == 0 {
                return Err(Error::InvalidParameter("asymmetric k must be >= 1".into()));
            }
            if self.query_lengths.as_ref().is_some_and(|ls| ls != &[k]) {
                return Err(Error::InvalidParameter(
                    "asymmetric index supports only length k".into(),
                ));
            }
        }
        if let Some(ls) = &self.query_lengths {
            if ls.is_empty() || ls.contains(&0) {
                return Err(Error::InvalidParameter(
                    "query lengths must be non-empty and >= 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Radius within which a returned curve is guaranteed to lie.
    pub fn guarantee(&self) -> f64 {
        (1.0 + self.epsilon) * self.r
    }

    /// Candidate generation threshold around an input curve.
    pub fn candidate_radius(&self) -> f64 {
        (1.0 + self.epsilon / 2.0) * self.r
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum QueryResult {
    Match { id: CurveId, guarantee: f64 },
    NoMatch,
}

impl QueryResult {
    pub fn id(&self) -> Option<&CurveId> {
        match self {
            QueryResult::Match { id, .. } => Some(id),
            QueryResult::NoMatch => None,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct BuildStats {
    /// Candidate keys generated per input curve, summed over query lengths.
    pub candidates: Vec<(CurveId, u64)>,
    /// Curves dropped from the asymmetric index because no `k`-vertex curve
    /// is within `r` of them.
    pub skipped: Vec<CurveId>,
}

#[derive(Clone, Debug)]
struct Entry {
    id: CurveId,
    curve: Curve,
    /// Asymmetric mode: the padded simplification, or `None` if infeasible.
    simplified: Option<Curve>,
}

#[derive(Clone, Debug)]
struct Level {
    grid: GridSpec,
    dict: Dictionary,
}

/// Approximate near-neighbour or range-counting index over curves.
#[derive(Debug)]
pub struct CurveIndex {
    params: IndexParams,
    dim: usize,
    /// Length normaliser for finite-`p` grids.
    m_norm: usize,
    levels: BTreeMap<usize, Level>,
    registry: IndexMap<CurveId, Entry>,
    stats: BuildStats,
    lookups: AtomicU64,
}

impl CurveIndex {
    pub fn build(curves: &[Curve], params: IndexParams) -> Result<Self> {
        params.validate()?;
        let first = curves
            .first()
            .ok_or_else(|| Error::InvalidParameter("cannot build an index over no curves".into()))?;
        let dim = first.dim();
        let mut seen = HashSet::new();
        for c in curves {
            if c.dim() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    found: c.dim(),
                });
            }
            if !seen.insert(c.id()) {
                return Err(Error::DuplicateCurve(c.id().to_string()));
            }
        }
        let m_max = curves.iter().map(Curve::len).max().expect("non-empty");
        let lengths: Vec<usize> = match (&params.asymmetric_k, &params.query_lengths) {
            (Some(k), _) => vec![*k],
            (None, Some(ls)) => ls
                .iter()
                .copied()
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect(),
            (None, None) if params.metric.is_frechet() => (1..=m_max).collect(),
            (None, None) => vec![m_max],
        };
        let m_norm = m_max.max(*lengths.iter().max().expect("non-empty"));
        let mut index = CurveIndex {
            dim,
            m_norm,
            levels: BTreeMap::new(),
            registry: IndexMap::new(),
            stats: BuildStats::default(),
            lookups: AtomicU64::new(0),
            params,
        };
        for &len in &lengths {
            let grid = index.grid_for(len)?;
            let header = DictHeader {
                mode: index.params.mode,
                metric: index.params.metric,
                epsilon: index.params.epsilon,
                r: index.params.r,
                dim,
                out_len: len,
                edge: grid.edge,
            };
            index.levels.insert(
                len,
                Level {
                    grid,
                    dict: Dictionary::new(index.params.backend, header),
                },
            );
        }

        let entries: Vec<Entry> = curves
            .iter()
            .map(|c| index.make_entry(c.clone()))
            .collect::<Result<_>>()?;
        if index.params.threads <= 1 {
            for entry in entries {
                index.fold_streaming(&entry)?;
                index.register(entry);
            }
        } else {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(index.params.threads)
                .build()
                .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
            // Enumerate a batch in parallel, then fold in input order so
            // first-wins payloads do not depend on scheduling.
            for batch in entries.chunks(index.params.threads * 4) {
                let enumerated: Vec<Vec<(usize, Vec<i64>)>> = pool.install(|| {
                    batch
                        .par_iter()
                        .map(|e| index.collect_candidates(e))
                        .collect::<Result<_>>()
                })?;
                for (entry, keys) in batch.iter().zip(enumerated) {
                    index.fold_collected(entry, keys)?;
                    index.register(entry.clone());
                }
            }
        }
        Ok(index)
    }

    fn grid_for(&self, len: usize) -> Result<GridSpec> {
        let m_norm = if self.params.metric.is_frechet() {
            len
        } else {
            self.m_norm.max(len)
        };
        GridSpec::derive(self.params.epsilon, self.params.r, self.dim, m_norm, self.params.metric)
    }

    fn make_entry(&self, curve: Curve) -> Result<Entry> {
        let simplified = match self.params.asymmetric_k {
            Some(k) => match simplify_dfd(&curve, k, self.params.r, ASYMMETRIC_SIMPLIFY_EPS)? {
                SimplifyOutcome::Simplified(pi) => Some(pi),
                SimplifyOutcome::Infeasible => None,
            },
            None => None,
        };
        Ok(Entry {
            id: Arc::from(curve.id()),
            curve,
            simplified,
        })
    }

    fn register(&mut self, entry: Entry) {
        self.registry.insert(entry.id.clone(), entry);
    }

    /// The candidate request of `entry` at query length `len`, or `None`
    /// when the entry contributes nothing (infeasible simplification).
    fn request<'a>(&self, entry: &'a Entry, len: usize) -> Option<CandidateRequest<'a>> {
        let grid = self.levels[&len].grid;
        let params = &self.params;
        let req = match (params.asymmetric_k, &entry.simplified) {
            (Some(_), None) => return None,
            (Some(_), Some(pi)) => {
                CandidateRequest::new(pi, len, ASYMMETRIC_RADIUS_FACTOR * params.r, grid, params.metric)
                    .with_filter(&entry.curve, params.candidate_radius())
            }
            (None, _) => CandidateRequest::new(&entry.curve, len, params.candidate_radius(), grid, params.metric),
        };
        Some(req.with_max_candidates(params.max_candidates))
    }

    fn fold_key(dict: &mut Dictionary, mode: Mode, cells: &[i64], id: &CurveId) -> Result<()> {
        match mode {
            Mode::NearNeighbor => dict.insert_cells_first_wins(cells, id).map(|_| ()),
            Mode::RangeCount => dict.increment_cells(cells).map(|_| ()),
        }
    }

    fn fold_streaming(&mut self, entry: &Entry) -> Result<()> {
        let lengths: Vec<usize> = self.levels.keys().copied().collect();
        let mode = self.params.mode;
        let mut total = 0;
        for len in lengths {
            let Some(req) = self.request(entry, len) else { continue };
            let dict = &mut self.levels.get_mut(&len).expect("level exists").dict;
            let mut fold_err = None;
            let emitted = candidates::for_each_candidate(&req, |cells| {
                if fold_err.is_none() {
                    if let Err(e) = Self::fold_key(dict, mode, cells, &entry.id) {
                        fold_err = Some(e);
                    }
                }
            })?;
            if let Some(e) = fold_err {
                return Err(e);
            }
            total += emitted;
        }
        self.note_curve(entry, total);
        Ok(())
    }

    fn collect_candidates(&self, entry: &Entry) -> Result<Vec<(usize, Vec<i64>)>> {
        let mut out = Vec::new();
        for &len in self.levels.keys() {
            let Some(req) = self.request(entry, len) else { continue };
            let mut flat = Vec::new();
            candidates::for_each_candidate(&req, |cells| flat.extend_from_slice(cells))?;
            out.push((len, flat));
        }
        Ok(out)
    }

    fn fold_collected(&mut self, entry: &Entry, keys: Vec<(usize, Vec<i64>)>) -> Result<()> {
        let mode = self.params.mode;
        let mut total = 0;
        for (len, flat) in keys {
            let width = len * self.dim;
            let dict = &mut self.levels.get_mut(&len).expect("level exists").dict;
            for cells in flat.chunks_exact(width) {
                Self::fold_key(dict, mode, cells, &entry.id)?;
                total += 1;
            }
        }
        self.note_curve(entry, total);
        Ok(())
    }

    fn note_curve(&mut self, entry: &Entry, total: u64) {
        if self.params.asymmetric_k.is_some() && entry.simplified.is_none() {
            self.stats.skipped.push(entry.id.clone());
        }
        self.stats.candidates.push((entry.id.clone(), total));
    }

    pub fn params(&self) -> &IndexParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn stats(&self) -> &BuildStats {
        &self.stats
    }

    /// Supported query lengths, ascending.
    pub fn query_lengths(&self) -> Vec<usize> {
        self.levels.keys().copied().collect()
    }

    pub fn grid(&self, len: usize) -> Option<&GridSpec> {
        self.levels.get(&len).map(|l| &l.grid)
    }

    pub fn dictionary(&self, len: usize) -> Option<&Dictionary> {
        self.levels.get(&len).map(|l| &l.dict)
    }

    /// `(query length, entries)` per dictionary.
    pub fn dictionary_sizes(&self) -> Vec<(usize, usize)> {
        self.levels.iter().map(|(&l, lv)| (l, lv.dict.len())).collect()
    }

    pub fn len(&self) -> usize {
        self.registry.len()
    }

    pub fn is_empty(&self) -> bool {
        self.registry.is_empty()
    }

    pub fn curve(&self, id: &str) -> Option<&Curve> {
        self.registry.get(id).map(|e| &e.curve)
    }

    pub fn curves(&self) -> impl Iterator<Item = &Curve> + '_ {
        self.registry.values().map(|e| &e.curve)
    }

    /// The stored simplification of `id` (asymmetric mode only).
    pub fn simplification(&self, id: &str) -> Option<&Curve> {
        self.registry.get(id).and_then(|e| e.simplified.as_ref())
    }

    /// Dictionary lookups performed by `query` and `count` so far.
    pub fn lookup_count(&self) -> u64 {
        self.lookups.load(Ordering::Relaxed)
    }

    fn snapped_lookup(&self, q: &Curve) -> Result<Option<&Payload>> {
        if q.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: q.dim(),
            });
        }
        let level = self.levels.get(&q.len()).ok_or(Error::UnsupportedLength(q.len()))?;
        let key = level.grid.snap_curve(q)?;
        self.lookups.fetch_add(1, Ordering::Relaxed);
        Ok(level.dict.lookup(&key))
    }

    /// Returns an input curve within `(1+ε)r` of `q`; guaranteed to find one
    /// whenever some input curve is within `r`.
    pub fn query(&self, q: &Curve) -> Result<QueryResult> {
        if self.params.mode != Mode::NearNeighbor {
            return Err(Error::ModeMismatch("query on a range-counting index".into()));
        }
        Ok(match self.snapped_lookup(q)? {
            Some(Payload::Curve(id)) => QueryResult::Match {
                id: id.clone(),
                guarantee: self.params.guarantee(),
            },
            _ => QueryResult::NoMatch,
        })
    }

    /// Number of input curves within `r` of `q`, plus possibly some within `(1+ε)r`.
    pub fn count(&self, q: &Curve) -> Result<u64> {
        if self.params.mode != Mode::RangeCount {
            return Err(Error::ModeMismatch("count on a near-neighbour index".into()));
        }
        Ok(self.snapped_lookup(q)?.and_then(Payload::count).unwrap_or(0))
    }

    /// Whether the grid curve `cells` belongs to the candidate set of `entry`.
    fn is_member(&self, entry: &Entry, len: usize, cells: &[i64]) -> bool {
        self.request(entry, len)
            .is_some_and(|req| candidates::is_candidate(&req, cells))
    }

    /// Adds a curve to a built index.
    pub fn insert_curve(&mut self, curve: Curve) -> Result<()> {
        if curve.dim() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                found: curve.dim(),
            });
        }
        if self.registry.contains_key(curve.id()) {
            return Err(Error::DuplicateCurve(curve.id().to_string()));
        }
        if !self.params.metric.is_frechet() && curve.len() > self.m_norm {
            return Err(Error::InvalidParameter(format!(
                "curve of length {} exceeds the grid normaliser {} fixed at build time",
                curve.len(),
                self.m_norm
            )));
        }
        let entry = self.make_entry(curve)?;
        self.fold_streaming(&entry)?;
        self.register(entry);
        Ok(())
    }

    /// Removes a curve, undoing its contributions. In near-neighbour mode
    /// keys it owned pass to the earliest remaining curve whose candidate set
    /// contains them, or are dropped.
    pub fn delete_curve(&mut self, id: &str) -> Result<Curve> {
        let entry = self
            .registry
            .shift_remove(id)
            .ok_or_else(|| Error::UnknownCurve(id.to_string()))?;
        let lengths: Vec<usize> = self.levels.keys().copied().collect();
        for len in lengths {
            let Some(req) = self.request(&entry, len) else { continue };
            let mut keys = Vec::new();
            candidates::for_each_candidate(&req, |cells| keys.extend_from_slice(cells))?;
            let width = len * self.dim;
            for cells in keys.chunks_exact(width) {
                match self.params.mode {
                    Mode::RangeCount => {
                        let dict = &mut self.levels.get_mut(&len).expect("level exists").dict;
                        dict.decrement_cells(cells)?;
                    }
                    Mode::NearNeighbor => {
                        let owned = matches!(
                            self.levels[&len].dict.lookup_cells(cells),
                            Some(Payload::Curve(owner)) if *owner == entry.id
                        );
                        if !owned {
                            continue;
                        }
                        let heir = self
                            .registry
                            .values()
                            .find(|e| self.is_member(e, len, cells))
                            .map(|e| e.id.clone());
                        let dict = &mut self.levels.get_mut(&len).expect("level exists").dict;
                        match heir {
                            Some(h) => dict.set_cells(cells, Payload::Curve(h)),
                            None => {
                                dict.remove_cells(cells);
                            }
                        }
                    }
                }
            }
        }
        self.stats.candidates.retain(|(c, _)| **c != *id);
        self.stats.skipped.retain(|c| **c != *id);
        Ok(entry.curve)
    }

    /// Checks up to `limit` entries per dictionary against their defining
    /// predicate. Returns the number of entries checked.
    pub fn audit(&self, limit: usize) -> Result<usize> {
        let mut checked = 0;
        for (&len, level) in &self.levels {
            for (key, payload) in level.dict.entries().into_iter().take(limit) {
                let cells = key.cells();
                match payload {
                    Payload::Curve(owner) => {
                        let entry = self
                            .registry
                            .get(&owner)
                            .ok_or_else(|| Error::Corrupt(format!("payload names unknown curve `{owner}`")))?;
                        if !self.is_member(entry, len, cells) {
                            return Err(Error::Corrupt(format!(
                                "key {cells:?} is not a candidate of its owner `{owner}`"
                            )));
                        }
                    }
                    Payload::Count(c) => {
                        let members = self.registry.values().filter(|e| self.is_member(e, len, cells)).count();
                        if members as u64 != c {
                            return Err(Error::Corrupt(format!(
                                "key {cells:?} counts {c} but {members} curves generate it"
                            )));
                        }
                    }
                }
                checked += 1;
            }
        }
        Ok(checked)
    }

    /// Writes every dictionary followed by the curve registry.
    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        for level in self.levels.values() {
            level.dict.write_to(w)?;
        }
        w.write_all(REGISTRY_MAGIC)?;
        w.write_u32::<LE>(REGISTRY_VERSION)?;
        w.write_u32::<LE>(self.params.asymmetric_k.unwrap_or(0) as u32)?;
        w.write_u64::<LE>(self.m_norm as u64)?;
        w.write_u64::<LE>(self.params.max_candidates)?;
        w.write_u64::<LE>(self.registry.len() as u64)?;
        for entry in self.registry.values() {
            w.write_u32::<LE>(entry.id.len() as u32)?;
            w.write_all(entry.id.as_bytes())?;
            w.write_u32::<LE>(entry.curve.len() as u32)?;
            w.write_u32::<LE>(entry.curve.dim() as u32)?;
            for &c in entry.curve.flat() {
                w.write_f64::<LE>(c)?;
            }
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>, backend: Backend) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes, backend)
    }

    /// Loads an index and checks that it was built with `expected`'s
    /// epsilon, radius, metric and mode.
    pub fn load_expecting(path: impl AsRef<Path>, expected: &IndexParams) -> Result<Self> {
        let index = Self::load(path, expected.backend)?;
        let p = &index.params;
        let same = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0);
        if !same(p.epsilon, expected.epsilon)
            || !same(p.r, expected.r)
            || p.metric != expected.metric
            || p.mode != expected.mode
        {
            return Err(Error::Format(format!(
                "index was built with eps={}, r={}, metric={}, mode={:?}",
                p.epsilon, p.r, p.metric, p.mode
            )));
        }
        Ok(index)
    }

    pub fn from_bytes(bytes: &[u8], backend: Backend) -> Result<Self> {
        let mut r = bytes;
        let mut levels = BTreeMap::new();
        let mut header0: Option<DictHeader> = None;
        while r.len() >= 4 && &r[..4] == MAGIC {
            let dict = Dictionary::read_from(&mut r, backend)?;
            let h = *dict.header();
            if let Some(h0) = header0 {
                if (h.mode, h.metric, h.epsilon, h.r, h.dim) != (h0.mode, h0.metric, h0.epsilon, h0.r, h0.dim) {
                    return Err(Error::Format("dictionaries disagree on index parameters".into()));
                }
            }
            header0.get_or_insert(h);
            if levels.insert(h.out_len, dict).is_some() {
                return Err(Error::Format(format!("two dictionaries for length {}", h.out_len)));
            }
        }
        let h0 = header0.ok_or_else(|| Error::Format("index file holds no dictionary".into()))?;
        let mut magic = [0u8; 4];
        r.read_exact(&mut magic).map_err(truncated)?;
        if &magic != REGISTRY_MAGIC {
            return Err(Error::Format(format!("bad registry magic {magic:?}")));
        }
        let version = r.read_u32::<LE>().map_err(truncated)?;
        if version != REGISTRY_VERSION {
            return Err(Error::Format(format!("unsupported registry version {version}")));
        }
        let k = r.read_u32::<LE>().map_err(truncated)? as usize;
        let m_norm = r.read_u64::<LE>().map_err(truncated)? as usize;
        let max_candidates = r.read_u64::<LE>().map_err(truncated)?;
        let n = r.read_u64::<LE>().map_err(truncated)?;

        let mut params = IndexParams::new(h0.epsilon, h0.r, h0.metric)
            .mode(h0.mode)
            .backend(backend)
            .max_candidates(max_candidates)
            .query_lengths(levels.keys().copied().collect());
        if k > 0 {
            params = params.asymmetric(k);
        }
        params
            .validate()
            .map_err(|e| Error::Format(format!("header parameters: {e}")))?;
        let mut index = CurveIndex {
            params,
            dim: h0.dim,
            m_norm,
            levels: BTreeMap::new(),
            registry: IndexMap::new(),
            stats: BuildStats::default(),
            lookups: AtomicU64::new(0),
        };
        for (len, dict) in levels {
            let grid = index.grid_for(len)?;
            if grid.edge.to_bits() != dict.header().edge.to_bits() {
                return Err(Error::Format(format!(
                    "stored grid edge {} for length {len} does not match the derived edge {}",
                    dict.header().edge,
                    grid.edge
                )));
            }
            index.levels.insert(len, Level { grid, dict });
        }
        for _ in 0..n {
            let len = r.read_u32::<LE>().map_err(truncated)? as usize;
            let mut id = vec![0u8; len];
            r.read_exact(&mut id).map_err(truncated)?;
            let id = String::from_utf8(id).map_err(|_| Error::Corrupt("curve id is not UTF-8".into()))?;
            let points = r.read_u32::<LE>().map_err(truncated)? as usize;
            let dim = r.read_u32::<LE>().map_err(truncated)? as usize;
            if dim != index.dim {
                return Err(Error::Corrupt(format!("curve `{id}` has dimension {dim}")));
            }
            let mut coords = vec![0.0; points * dim];
            for c in coords.iter_mut() {
                *c = r.read_f64::<LE>().map_err(truncated)?;
            }
            let curve = Curve::from_flat(id, dim, coords).map_err(|e| Error::Corrupt(e.to_string()))?;
            let entry = index.make_entry(curve)?;
            index.register(entry);
        }
        if !r.is_empty() {
            return Err(Error::Corrupt(format!("{} trailing bytes", r.len())));
        }
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(id: &str, rows: &[&[f64]]) -> Curve {
        Curve::from_rows(id, rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn keys(index: &CurveIndex, len: usize) -> Vec<(Vec<i64>, Payload)> {
        index
            .dictionary(len)
            .unwrap()
            .entries()
            .into_iter()
            .map(|(k, p)| (k.cells().to_vec(), p))
            .collect()
    }

    #[test]
    fn single_point_build() {
        let c = curve("c", &[&[0.0]]);
        let index = CurveIndex::build(&[c], IndexParams::new(1.0, 1.0, Metric::Frechet)).unwrap();
        assert_eq!(index.grid(1).unwrap().edge, 1.0);
        let id: CurveId = Arc::from("c");
        assert_eq!(
            keys(&index, 1),
            vec![
                (vec![-1], Payload::Curve(id.clone())),
                (vec![0], Payload::Curve(id.clone())),
                (vec![1], Payload::Curve(id.clone())),
            ]
        );
        let hit = index.query(&curve("q", &[&[0.3]])).unwrap();
        assert_eq!(hit, QueryResult::Match { id, guarantee: 2.0 });
        assert_eq!(index.query(&curve("q", &[&[2.6]])).unwrap(), QueryResult::NoMatch);
        assert_eq!(index.lookup_count(), 2);
    }

    #[test]
    fn identical_curves() {
        let a = curve("a", &[&[0.0], &[1.0]]);
        let b = a.clone().with_id("b");
        let nn = CurveIndex::build(&[a.clone(), b.clone()], IndexParams::new(0.5, 1.0, Metric::Frechet)).unwrap();
        for len in nn.query_lengths() {
            assert!(keys(&nn, len).iter().all(|(_, p)| p == &Payload::Curve(Arc::from("a"))));
        }
        let counting = CurveIndex::build(
            &[a.clone(), b],
            IndexParams::new(0.5, 1.0, Metric::Frechet).mode(Mode::RangeCount),
        )
        .unwrap();
        for len in counting.query_lengths() {
            assert!(keys(&counting, len).iter().all(|(_, p)| p == &Payload::Count(2)));
        }
        assert_eq!(counting.count(&a).unwrap(), 2);
        assert_eq!(counting.count(&curve("far", &[&[100.0], &[100.0]])).unwrap(), 0);
    }

    #[test]
    fn count_separates_near_and_far() {
        let r = 1.0;
        let eps = 0.5;
        let near = curve("near", &[&[0.5]]);
        let far = curve("far", &[&[2.0 * (1.0 + eps) * r]]);
        let index = CurveIndex::build(
            &[near, far],
            IndexParams::new(eps, r, Metric::Frechet).mode(Mode::RangeCount),
        )
        .unwrap();
        assert_eq!(index.count(&curve("q", &[&[0.0]])).unwrap(), 1);
    }

    #[test]
    fn query_errors() {
        let c = curve("c", &[&[0.0], &[1.0]]);
        let index = CurveIndex::build(&[c], IndexParams::new(1.0, 1.0, Metric::Dtw)).unwrap();
        assert_eq!(index.query_lengths(), vec![2]);
        assert!(matches!(
            index.query(&curve("q", &[&[0.0]])),
            Err(Error::UnsupportedLength(1))
        ));
        assert!(matches!(
            index.query(&curve("q", &[&[0.0, 0.0], &[0.0, 0.0]])),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            index.count(&curve("q", &[&[0.0], &[1.0]])),
            Err(Error::ModeMismatch(_))
        ));
    }

    #[test]
    fn build_errors() {
        let p = IndexParams::new(1.0, 1.0, Metric::Frechet);
        assert!(CurveIndex::build(&[], p.clone()).is_err());
        let a = curve("a", &[&[0.0]]);
        let b = curve("b", &[&[0.0, 1.0]]);
        assert!(matches!(
            CurveIndex::build(&[a.clone(), b], p.clone()),
            Err(Error::Dimension { .. })
        ));
        assert!(matches!(
            CurveIndex::build(&[a.clone(), a.clone()], p.clone()),
            Err(Error::DuplicateCurve(_))
        ));
        assert!(CurveIndex::build(std::slice::from_ref(&a), IndexParams::new(0.0, 1.0, Metric::Frechet)).is_err());
        assert!(CurveIndex::build(std::slice::from_ref(&a), IndexParams::new(0.5, -1.0, Metric::Frechet)).is_err());
        assert!(CurveIndex::build(
            std::slice::from_ref(&a),
            IndexParams::new(0.5, 1.0, Metric::Dtw).asymmetric(1)
        )
        .is_err());
        let tiny = p.max_candidates(1);
        match CurveIndex::build(&[a], tiny) {
            Err(Error::Capacity { context, .. }) => assert!(context.contains("`a`")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn insert_then_delete_restores_empty() {
        let a = curve("a", &[&[0.0]]);
        let mut index = CurveIndex::build(&[a], IndexParams::new(1.0, 1.0, Metric::Frechet)).unwrap();
        index.insert_curve(curve("b", &[&[5.0]])).unwrap();
        assert_eq!(index.dictionary(1).unwrap().len(), 6);
        index.delete_curve("b").unwrap();
        index.delete_curve("a").unwrap();
        assert!(index.dictionary(1).unwrap().is_empty());
        assert!(matches!(index.delete_curve("a"), Err(Error::UnknownCurve(_))));
    }

    #[test]
    fn delete_reassigns_to_survivor() {
        let a = curve("a", &[&[0.0]]);
        let b = curve("b", &[&[1.0]]);
        let mut index = CurveIndex::build(&[a, b], IndexParams::new(1.0, 1.0, Metric::Frechet)).unwrap();
        index.delete_curve("a").unwrap();
        // b's candidate set {0, 1, 2} survives in full, now owned by b.
        let left = keys(&index, 1);
        assert_eq!(left.len(), 3);
        assert!(left.iter().all(|(_, p)| p == &Payload::Curve(Arc::from("b"))));
        assert_eq!(index.audit(usize::MAX).unwrap(), 3);
    }

    #[test]
    fn counting_insert_twice_delete_once() {
        let a = curve("a", &[&[0.0], &[1.0]]);
        let params = IndexParams::new(1.0, 1.0, Metric::Dtw).mode(Mode::RangeCount);
        let single = CurveIndex::build(std::slice::from_ref(&a), params.clone()).unwrap();
        let mut double = CurveIndex::build(std::slice::from_ref(&a), params).unwrap();
        double.insert_curve(a.clone().with_id("a2")).unwrap();
        double.delete_curve("a2").unwrap();
        assert_eq!(keys(&single, 2), keys(&double, 2));
    }

    #[test]
    fn asymmetric_build_skips_infeasible() {
        let good = curve("good", &[&[0.0], &[0.1], &[0.2], &[5.0]]);
        let bad = curve("bad", &[&[0.0], &[10.0], &[20.0], &[30.0]]);
        let params = IndexParams::new(1.0, 1.0, Metric::Frechet).asymmetric(2);
        let index = CurveIndex::build(&[good.clone(), bad], params).unwrap();
        assert_eq!(index.query_lengths(), vec![2]);
        assert_eq!(index.stats().skipped, vec![Arc::<str>::from("bad")]);
        let q = curve("q", &[&[0.1], &[5.0]]);
        assert_eq!(index.query(&q).unwrap().id().map(|s| &**s), Some("good"));
        assert!(index.simplification("good").is_some());
        assert!(index.audit(usize::MAX).unwrap() > 0);
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let a = curve("a", &[&[0.0, 0.0], &[1.0, 0.5]]);
        let b = curve("b", &[&[3.0, 0.0]]);
        let params = IndexParams::new(1.0, 1.0, Metric::Frechet).backend(Backend::Trie);
        let index = CurveIndex::build(&[a.clone(), b], params.clone()).unwrap();
        let path = dir.path().join("idx.annc");
        index.save(&path).unwrap();
        let back = CurveIndex::load_expecting(&path, &params).unwrap();
        assert_eq!(back.query_lengths(), index.query_lengths());
        for len in index.query_lengths() {
            assert_eq!(keys(&back, len), keys(&index, len));
        }
        assert_eq!(back.curve("a"), Some(&a));
        let mut again = Vec::new();
        back.write_to(&mut again).unwrap();
        assert_eq!(again, std::fs::read(&path).unwrap());

        let wrong = IndexParams::new(0.5, 1.0, Metric::Frechet);
        assert!(matches!(
            CurveIndex::load_expecting(&path, &wrong),
            Err(Error::Format(_))
        ));
        let bytes = std::fs::read(&path).unwrap();
        assert!(matches!(
            CurveIndex::from_bytes(&bytes[..bytes.len() - 1], Backend::Hash),
            Err(Error::Corrupt(_))
        ));
    }

    #[test]
    fn parallel_build_matches_sequential() {
        let curves: Vec<Curve> = (0..9)
            .map(|i| curve(&format!("c{i}"), &[&[i as f64 * 0.7], &[i as f64 * 0.3 + 1.0]]))
            .collect();
        let params = IndexParams::new(0.5, 1.0, Metric::Frechet).backend(Backend::Trie);
        let seq = CurveIndex::build(&curves, params.clone()).unwrap();
        let par = CurveIndex::build(&curves, params.threads(3)).unwrap();
        for len in seq.query_lengths() {
            assert_eq!(keys(&seq, len), keys(&par, len));
        }
        assert_eq!(seq.stats(), par.stats());
    }
}
