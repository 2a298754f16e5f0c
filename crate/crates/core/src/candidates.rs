//! Enumeration of candidate sets: every grid curve of a fixed length whose
//! distance to an anchor curve is within a threshold.
//!
//! Both enumerators build candidate curves vertex by vertex in depth-first
//! order. The Fréchet enumerator carries the free-space reachable set of the
//! anchor prefix; the `ℓ_{p,2}` enumerator carries the row of minimal partial
//! costs. A prefix whose state admits no continuation is abandoned. Because
//! the vertex pool is sorted and every depth iterates it in order, keys come
//! out in lexicographic order and each key is produced exactly once.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::{distance_flat, euclidean, Curve, Metric};
use crate::grid::{GridSpec, LatticeCurveKey, LatticePoint};

/// Default bound on the number of keys a single enumeration may emit.
pub const DEFAULT_MAX_CANDIDATES: u64 = 100_000_000;

/// Relative slack applied to `ℓ_{p,2}` pruning so rounding in the incremental
/// DP never discards a key the exact distance accepts.
const LP_PRUNE_SLACK: f64 = 1e-9;

/// What to enumerate.
#[derive(Clone, Debug)]
pub struct CandidateRequest<'a> {
    /// The curve candidates are generated around.
    pub anchor: &'a Curve,
    /// Optional second condition `distance(filter_curve, Q) <= filter_radius`.
    pub filter: Option<(&'a Curve, f64)>,
    pub out_len: usize,
    pub enum_radius: f64,
    pub grid: GridSpec,
    pub metric: Metric,
    pub max_candidates: u64,
}

impl<'a> CandidateRequest<'a> {
    pub fn new(anchor: &'a Curve, out_len: usize, enum_radius: f64, grid: GridSpec, metric: Metric) -> Self {
        CandidateRequest {
            anchor,
            filter: None,
            out_len,
            enum_radius,
            grid,
            metric,
            max_candidates: DEFAULT_MAX_CANDIDATES,
        }
    }

    pub fn with_filter(mut self, curve: &'a Curve, radius: f64) -> Self {
        self.filter = Some((curve, radius));
        self
    }

    pub fn with_max_candidates(mut self, limit: u64) -> Self {
        self.max_candidates = limit;
        self
    }

    fn validate(&self) -> Result<()> {
        let d = self.grid.dim;
        let check = |c: &Curve| {
            if c.dim() != d {
                Err(Error::Dimension {
                    expected: d,
                    found: c.dim(),
                })
            } else {
                Ok(())
            }
        };
        check(self.anchor)?;
        if let Some((f, radius)) = self.filter {
            check(f)?;
            if !(radius >= 0.0) {
                return Err(Error::InvalidParameter(format!("filter radius {radius} is negative")));
            }
        }
        if self.out_len == 0 {
            return Err(Error::InvalidParameter("candidate length must be >= 1".into()));
        }
        if !(self.enum_radius >= 0.0 && self.enum_radius.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "enumeration radius {} is invalid",
                self.enum_radius
            )));
        }
        Ok(())
    }
}

/// Deduplicated candidate keys in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CandidateSet {
    pub keys: Vec<LatticeCurveKey>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, key: &LatticeCurveKey) -> bool {
        self.keys.binary_search(key).is_ok()
    }
}

/// Grid points within `radius` of some vertex of `anchor`, deduplicated and
/// sorted lexicographically.
pub fn vertex_pool(anchor: &Curve, radius: f64, grid: &GridSpec) -> Result<Vec<LatticePoint>> {
    let mut set = BTreeSet::new();
    for v in anchor.points() {
        grid.for_each_in_ball(v, radius, |z| {
            set.insert(z.to_vec());
        })?;
    }
    Ok(set.into_iter().map(LatticePoint).collect())
}

/// Dispatches on the metric.
pub fn enumerate(req: &CandidateRequest<'_>) -> Result<CandidateSet> {
    let mut keys = Vec::new();
    for_each_candidate(req, |cells| {
        keys.push(LatticeCurveKey::from_flat(req.grid.dim, cells.to_vec()))
    })?;
    Ok(CandidateSet { keys })
}

/// Candidate set under the discrete Fréchet distance.
pub fn enumerate_dfd(req: &CandidateRequest<'_>) -> Result<CandidateSet> {
    if !req.metric.is_frechet() {
        return Err(Error::MetricMismatch(format!(
            "enumerate_dfd called with {}",
            req.metric
        )));
    }
    enumerate(req)
}

/// Candidate set under a finite-`p` distance.
pub fn enumerate_lp(req: &CandidateRequest<'_>) -> Result<CandidateSet> {
    if req.metric.is_frechet() {
        return Err(Error::MetricMismatch("enumerate_lp requires a finite p".into()));
    }
    enumerate(req)
}

/// Streams the candidate keys of `req` as flat lattice cells, in
/// lexicographic order, and returns how many were emitted.
pub fn for_each_candidate(req: &CandidateRequest<'_>, mut visit: impl FnMut(&[i64])) -> Result<u64> {
    req.validate()?;
    let pool = Pool::build(req)?;
    if pool.len() == 0 {
        return Ok(0);
    }
    let mut emitted = 0u64;
    let mut verify = Verifier::new(req);
    let mut sink = |cells: &[i64], phys: &[f64]| -> Result<()> {
        if !verify.accepts(phys) {
            return Ok(());
        }
        emitted += 1;
        if emitted > req.max_candidates {
            return Err(Error::Capacity {
                limit: req.max_candidates,
                context: format!("candidate set of curve `{}`", req.anchor.id()),
            });
        }
        visit(cells);
        Ok(())
    };
    match req.metric {
        Metric::Frechet => FrechetSearch::new(req, &pool).run(&mut sink)?,
        _ => CostSearch::new(req, &pool).run(&mut sink)?,
    }
    Ok(emitted)
}

/// Whether the grid curve `cells` is in the candidate set of `req`, decided
/// without enumerating it.
pub fn is_candidate(req: &CandidateRequest<'_>, cells: &[i64]) -> bool {
    let grid = &req.grid;
    let d = grid.dim;
    if req.validate().is_err() || cells.len() != req.out_len * d {
        return false;
    }
    let phys: Vec<f64> = cells.iter().map(|&k| k as f64 * grid.edge).collect();
    let vertex_ok = phys.chunks_exact(d).all(|z| {
        req.anchor.points().any(|a| euclidean(a, z) <= req.enum_radius)
            && req
                .filter
                .is_none_or(|(f, radius)| f.points().any(|v| euclidean(v, z) <= radius))
    });
    vertex_ok && Verifier::new(req).accepts(&phys)
}

/// Final exact check of every emitted key through the distance DP.
struct Verifier<'r> {
    req: &'r CandidateRequest<'r>,
}

impl<'r> Verifier<'r> {
    fn new(req: &'r CandidateRequest<'r>) -> Self {
        Verifier { req }
    }

    fn accepts(&mut self, phys: &[f64]) -> bool {
        let d = self.req.grid.dim;
        if distance_flat(self.req.anchor.flat(), phys, d, self.req.metric) > self.req.enum_radius {
            return false;
        }
        match self.req.filter {
            Some((f, radius)) => distance_flat(f.flat(), phys, d, self.req.metric) <= radius,
            None => true,
        }
    }
}

/// Sorted vertex pool with precomputed per-anchor-vertex neighbourhoods.
struct Pool {
    dim: usize,
    lattice: Vec<i64>,
    phys: Vec<f64>,
    /// `near[i]`: pool indices within the enumeration radius of anchor vertex `i`.
    near: Vec<Vec<u32>>,
}

impl Pool {
    fn build(req: &CandidateRequest<'_>) -> Result<Self> {
        let grid = &req.grid;
        let dim = grid.dim;
        let mut points = vertex_pool(req.anchor, req.enum_radius, grid)?;
        if let Some((f, radius)) = req.filter {
            // A vertex farther than the filter radius from every filter vertex
            // cannot occur in any accepted curve.
            let mut phys = vec![0.0; dim];
            points.retain(|z| {
                grid.physical_into(z.coords(), &mut phys);
                f.points().any(|v| euclidean(v, &phys) <= radius)
            });
        }
        let mut lattice = Vec::with_capacity(points.len() * dim);
        for z in &points {
            lattice.extend_from_slice(z.coords());
        }
        let phys: Vec<f64> = lattice.iter().map(|&k| k as f64 * grid.edge).collect();
        let near = req
            .anchor
            .points()
            .map(|a| {
                (0..points.len() as u32)
                    .filter(|&z| euclidean(a, &phys[z as usize * dim..(z as usize + 1) * dim]) <= req.enum_radius)
                    .collect()
            })
            .collect();
        Ok(Pool {
            dim,
            lattice,
            phys,
            near,
        })
    }

    fn len(&self) -> usize {
        self.lattice.len() / self.dim
    }

    fn phys(&self, z: u32) -> &[f64] {
        &self.phys[z as usize * self.dim..(z as usize + 1) * self.dim]
    }

    fn lattice(&self, z: u32) -> &[i64] {
        &self.lattice[z as usize * self.dim..(z as usize + 1) * self.dim]
    }
}

/// Shared scaffolding for both searches: the chosen vertex stack, output
/// buffers and per-depth candidate lists.
struct Frame {
    chosen: Vec<u32>,
    cells: Vec<i64>,
    phys: Vec<f64>,
    lists: Vec<Vec<u32>>,
    stamp: Vec<u32>,
    generation: u32,
}

impl Frame {
    fn new(out_len: usize, pool_len: usize, dim: usize) -> Self {
        Frame {
            chosen: vec![0; out_len],
            cells: vec![0; out_len * dim],
            phys: vec![0.0; out_len * dim],
            lists: vec![Vec::new(); out_len],
            stamp: vec![0; pool_len],
            generation: 0,
        }
    }

    /// Union of `near[i]` over the anchor indices selected by `frontier`,
    /// sorted by pool index.
    fn gather(&mut self, depth: usize, pool: &Pool, frontier: impl Iterator<Item = usize>) -> Vec<u32> {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let mut list = std::mem::take(&mut self.lists[depth]);
        list.clear();
        for i in frontier {
            for &z in &pool.near[i] {
                let s = &mut self.stamp[z as usize];
                if *s != self.generation {
                    *s = self.generation;
                    list.push(z);
                }
            }
        }
        list.sort_unstable();
        list
    }

    /// Union over `(i, slack)` of the pool points whose cost to anchor vertex
    /// `i` is at most `slack`, sorted by pool index. `by_cost[i]` is sorted by
    /// ascending cost.
    fn gather_bounded(
        &mut self,
        depth: usize,
        by_cost: &[Vec<(f64, u32)>],
        bounds: impl Iterator<Item = (usize, f64)>,
    ) -> Vec<u32> {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
        let mut list = std::mem::take(&mut self.lists[depth]);
        list.clear();
        for (i, slack) in bounds {
            for &(c, z) in &by_cost[i] {
                if c > slack {
                    break;
                }
                let s = &mut self.stamp[z as usize];
                if *s != self.generation {
                    *s = self.generation;
                    list.push(z);
                }
            }
        }
        list.sort_unstable();
        list
    }

    fn emit(&mut self, pool: &Pool, sink: &mut impl FnMut(&[i64], &[f64]) -> Result<()>) -> Result<()> {
        let d = pool.dim;
        for (k, &z) in self.chosen.iter().enumerate() {
            self.cells[k * d..(k + 1) * d].copy_from_slice(pool.lattice(z));
            self.phys[k * d..(k + 1) * d].copy_from_slice(pool.phys(z));
        }
        sink(&self.cells, &self.phys)
    }
}

/// Depth-first search over candidate curves carrying free-space reachability.
struct FrechetSearch<'p> {
    pool: &'p Pool,
    out_len: usize,
    m: usize,
    /// `within[z * m + i]`: pool point `z` is within radius of anchor vertex `i`.
    within: Vec<bool>,
    /// Same for the optional filter curve (`mf` vertices).
    filter_within: Vec<bool>,
    mf: usize,
    /// `rows[depth * m + i]`: anchor prefix `..=i` aligns with candidate prefix `..=depth`.
    rows: Vec<bool>,
    filter_rows: Vec<bool>,
    frame: Frame,
}

impl<'p> FrechetSearch<'p> {
    fn new(req: &CandidateRequest<'_>, pool: &'p Pool) -> Self {
        let m = req.anchor.len();
        let n = pool.len();
        let mut within = vec![false; n * m];
        for (i, zs) in pool.near.iter().enumerate() {
            for &z in zs {
                within[z as usize * m + i] = true;
            }
        }
        let (mf, filter_within) = match req.filter {
            Some((f, radius)) => {
                let mf = f.len();
                let mut w = vec![false; n * mf];
                for z in 0..n {
                    for (k, v) in f.points().enumerate() {
                        w[z * mf + k] = euclidean(v, pool.phys(z as u32)) <= radius;
                    }
                }
                (mf, w)
            }
            None => (0, Vec::new()),
        };
        FrechetSearch {
            pool,
            out_len: req.out_len,
            m,
            within,
            filter_within,
            mf,
            rows: vec![false; req.out_len * m],
            filter_rows: vec![false; req.out_len * mf],
            frame: Frame::new(req.out_len, n, pool.dim),
        }
    }

    fn run(mut self, sink: &mut impl FnMut(&[i64], &[f64]) -> Result<()>) -> Result<()> {
        self.descend(0, sink)
    }

    /// Reachability row for candidate vertex `z` at `depth` given the
    /// previous row (`None` at depth 0). Returns whether any cell is reachable.
    fn step(rows: &mut [bool], within: &[bool], m: usize, depth: usize, z: u32) -> bool {
        if m == 0 {
            return true;
        }
        let w = &within[z as usize * m..(z as usize + 1) * m];
        let (prev, cur) = if depth == 0 {
            (None, &mut rows[..m])
        } else {
            let (a, b) = rows.split_at_mut(depth * m);
            (Some(&a[(depth - 1) * m..]), &mut b[..m])
        };
        let mut any = false;
        for i in 0..m {
            let reach = w[i]
                && match prev {
                    None => i == 0 || cur[i - 1],
                    Some(p) => p[i] || (i > 0 && (p[i - 1] || cur[i - 1])),
                };
            cur[i] = reach;
            any |= reach;
        }
        any
    }

    fn descend(&mut self, depth: usize, sink: &mut impl FnMut(&[i64], &[f64]) -> Result<()>) -> Result<()> {
        let m = self.m;
        let list = if depth == 0 {
            self.frame.gather(0, self.pool, std::iter::once(0))
        } else {
            let prev = &self.rows[(depth - 1) * m..depth * m];
            let frontier: Vec<usize> = (0..m).filter(|&i| prev[i] || (i > 0 && prev[i - 1])).collect();
            self.frame.gather(depth, self.pool, frontier.into_iter())
        };
        for &z in &list {
            if !Self::step(&mut self.rows, &self.within, m, depth, z) {
                continue;
            }
            if self.mf > 0 && !Self::step(&mut self.filter_rows, &self.filter_within, self.mf, depth, z) {
                continue;
            }
            self.frame.chosen[depth] = z;
            if depth + 1 == self.out_len {
                let done =
                    self.rows[depth * m + m - 1] && (self.mf == 0 || self.filter_rows[depth * self.mf + self.mf - 1]);
                if done {
                    self.frame.emit(self.pool, sink)?;
                }
            } else {
                self.descend(depth + 1, sink)?;
            }
        }
        self.frame.lists[depth] = list;
        Ok(())
    }
}

/// Depth-first search over candidate curves carrying the DP row of minimal
/// partial `p`-th-power costs.
struct CostSearch<'p> {
    pool: &'p Pool,
    out_len: usize,
    m: usize,
    /// `cost[z * m + i]`: `‖z − a_i‖^p`.
    cost: Vec<f64>,
    /// `by_cost[i]`: `near[i]` with costs, cheapest first.
    by_cost: Vec<Vec<(f64, u32)>>,
    rows: Vec<f64>,
    threshold: f64,
    frame: Frame,
}

impl<'p> CostSearch<'p> {
    fn new(req: &CandidateRequest<'_>, pool: &'p Pool) -> Self {
        let m = req.anchor.len();
        let n = pool.len();
        let mut cost = vec![0.0; n * m];
        for z in 0..n {
            for (i, a) in req.anchor.points().enumerate() {
                cost[z * m + i] = req.metric.pair_cost(euclidean(a, pool.phys(z as u32)));
            }
        }
        let by_cost = pool
            .near
            .iter()
            .enumerate()
            .map(|(i, zs)| {
                let mut v: Vec<(f64, u32)> = zs.iter().map(|&z| (cost[z as usize * m + i], z)).collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
                v
            })
            .collect();
        let budget = req.metric.budget(req.enum_radius);
        CostSearch {
            pool,
            out_len: req.out_len,
            m,
            cost,
            by_cost,
            rows: vec![f64::INFINITY; req.out_len * m],
            threshold: budget * (1.0 + LP_PRUNE_SLACK) + f64::MIN_POSITIVE,
            frame: Frame::new(req.out_len, n, pool.dim),
        }
    }

    fn run(mut self, sink: &mut impl FnMut(&[i64], &[f64]) -> Result<()>) -> Result<()> {
        self.descend(0, sink)
    }

    /// Fills the cost row for `z` at `depth`; returns the row minimum.
    fn step(&mut self, depth: usize, z: u32) -> f64 {
        let m = self.m;
        let c = &self.cost[z as usize * m..(z as usize + 1) * m];
        let (head, tail) = self.rows.split_at_mut(depth * m);
        let cur = &mut tail[..m];
        let mut best = f64::INFINITY;
        for i in 0..m {
            let before = if depth == 0 {
                if i == 0 {
                    0.0
                } else {
                    cur[i - 1]
                }
            } else {
                let prev = &head[(depth - 1) * m..];
                let mut b = prev[i];
                if i > 0 {
                    b = b.min(prev[i - 1]).min(cur[i - 1]);
                }
                b
            };
            let v = before + c[i];
            cur[i] = if v <= self.threshold { v } else { f64::INFINITY };
            best = best.min(cur[i]);
        }
        best
    }

    fn descend(&mut self, depth: usize, sink: &mut impl FnMut(&[i64], &[f64]) -> Result<()>) -> Result<()> {
        let m = self.m;
        // Cell `i` of the new row costs at least the smallest finite entry of
        // the previous row at or before `i`, which caps the admissible pair
        // cost for vertex `i`.
        let list = if depth == 0 {
            self.frame
                .gather_bounded(0, &self.by_cost, std::iter::once((0, self.threshold)))
        } else {
            let prev = &self.rows[(depth - 1) * m..depth * m];
            let mut lb = f64::INFINITY;
            let mut bounds = Vec::with_capacity(m);
            for (i, &v) in prev.iter().enumerate() {
                lb = lb.min(v);
                if lb.is_finite() {
                    bounds.push((i, self.threshold - lb));
                }
            }
            self.frame.gather_bounded(depth, &self.by_cost, bounds.into_iter())
        };
        for &z in &list {
            if !self.step(depth, z).is_finite() {
                continue;
            }
            self.frame.chosen[depth] = z;
            if depth + 1 == self.out_len {
                if self.rows[depth * m + m - 1].is_finite() {
                    self.frame.emit(self.pool, sink)?;
                }
            } else {
                self.descend(depth + 1, sink)?;
            }
        }
        self.frame.lists[depth] = list;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(rows: &[&[f64]]) -> Curve {
        Curve::from_rows("a", rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    fn cells(set: &CandidateSet) -> Vec<Vec<i64>> {
        set.keys.iter().map(|k| k.cells().to_vec()).collect()
    }

    #[test]
    fn pool_examples() {
        let g = GridSpec::with_edge(1.0, 1).unwrap();
        let flat = |v: Vec<LatticePoint>| v.into_iter().map(|p| p.0[0]).collect::<Vec<_>>();
        assert_eq!(flat(vertex_pool(&curve(&[&[0.0]]), 1.0, &g).unwrap()), vec![-1, 0, 1]);
        assert_eq!(
            flat(vertex_pool(&curve(&[&[0.0], &[0.0]]), 1.0, &g).unwrap()),
            vec![-1, 0, 1]
        );
        assert_eq!(
            flat(vertex_pool(&curve(&[&[0.0], &[10.0]]), 1.0, &g).unwrap()),
            vec![-1, 0, 1, 9, 10, 11]
        );
    }

    #[test]
    fn dfd_examples() {
        let g = GridSpec::with_edge(1.0, 1).unwrap();
        let a = curve(&[&[0.0]]);
        let set = enumerate_dfd(&CandidateRequest::new(&a, 1, 1.5, g, Metric::Frechet)).unwrap();
        assert_eq!(cells(&set), vec![vec![-1], vec![0], vec![1]]);
        let set = enumerate_dfd(&CandidateRequest::new(&a, 1, 0.4, g, Metric::Frechet)).unwrap();
        assert_eq!(cells(&set), vec![vec![0]]);

        let a = curve(&[&[0.0], &[3.0]]);
        let set = enumerate_dfd(&CandidateRequest::new(&a, 2, 1.0, g, Metric::Frechet)).unwrap();
        let mut expected = Vec::new();
        for x in -1..=1 {
            for y in 2..=4 {
                expected.push(vec![x, y]);
            }
        }
        assert_eq!(cells(&set), expected);
    }

    #[test]
    fn lp_examples() {
        let g = GridSpec::with_edge(0.25, 1).unwrap();
        let a = curve(&[&[0.0]]);
        let set = enumerate_lp(&CandidateRequest::new(&a, 1, 1.0, g, Metric::Dtw)).unwrap();
        assert_eq!(cells(&set), (-4..=4).map(|x| vec![x]).collect::<Vec<_>>());

        let g = GridSpec::with_edge(1.0, 1).unwrap();
        let a = curve(&[&[0.0], &[0.0]]);
        let set = enumerate_lp(&CandidateRequest::new(&a, 2, 0.0, g, Metric::Dtw)).unwrap();
        assert_eq!(cells(&set), vec![vec![0, 0]]);
    }

    #[test]
    fn lp_half_unit_example() {
        // anchor ((0),(1)), p=1, radius 0.5, edge 0.5. Pool = {-1,0,1,2,3}
        // (lattice). Hand check: ((0),(1)) exact -> lattice (0,2) cost 0;
        // (0,1) or (0,3) or (1,2) or (-1,2) cost 0.5; anything else > 0.5.
        let g = GridSpec::with_edge(0.5, 1).unwrap();
        let a = curve(&[&[0.0], &[1.0]]);
        let set = enumerate_lp(&CandidateRequest::new(&a, 2, 0.5, g, Metric::Dtw)).unwrap();
        assert_eq!(
            cells(&set),
            vec![vec![-1, 2], vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2]]
        );
    }

    #[test]
    fn metric_mismatch_and_capacity() {
        let g = GridSpec::with_edge(1.0, 1).unwrap();
        let a = curve(&[&[0.0]]);
        assert!(matches!(
            enumerate_dfd(&CandidateRequest::new(&a, 1, 1.0, g, Metric::Dtw)),
            Err(Error::MetricMismatch(_))
        ));
        assert!(matches!(
            enumerate_lp(&CandidateRequest::new(&a, 1, 1.0, g, Metric::Frechet)),
            Err(Error::MetricMismatch(_))
        ));
        let req = CandidateRequest::new(&a, 2, 3.0, g, Metric::Frechet).with_max_candidates(5);
        match enumerate_dfd(&req) {
            Err(Error::Capacity { limit: 5, context }) => assert!(context.contains("`a`")),
            other => panic!("expected capacity error, got {other:?}"),
        }
    }

    #[test]
    fn filter_restricts_output() {
        let g = GridSpec::with_edge(1.0, 1).unwrap();
        let a = curve(&[&[0.0]]);
        let f = curve(&[&[1.0]]);
        let req = CandidateRequest::new(&a, 1, 2.0, g, Metric::Frechet).with_filter(&f, 1.0);
        assert_eq!(cells(&enumerate_dfd(&req).unwrap()), vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn dimension_mismatch() {
        let g = GridSpec::with_edge(1.0, 2).unwrap();
        let a = curve(&[&[0.0]]);
        assert!(matches!(
            enumerate(&CandidateRequest::new(&a, 1, 1.0, g, Metric::Frechet)),
            Err(Error::Dimension { .. })
        ));
    }
}
