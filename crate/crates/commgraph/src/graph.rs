//! The commuting graph of a matrix domain: vertices are the non-central
//! domain members, edges join distinct commuting pairs. Adjacency is not a
//! field of the graph; neighbor queries recompute commutation, and the
//! sweep-style computations (diameter, components) build a transient bitset
//! scratch only while they run, and only for graphs small enough that the
//! scratch stays in the tens of megabytes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{
    center_indices, commutes_flat, kernel_offset, scan_domain, DomainSpec, ModMatrix,
    KERNEL_MAX_MODULUS,
};

/// Default cap on the enumeration space m^(n*n) when building a graph.
pub const DEFAULT_VERTEX_GUARD: u64 = 1 << 20;

/// Default cap on vertex count for DOT/CSV export.
pub const DEFAULT_EXPORT_GUARD: u64 = 1 << 14;

/// Largest vertex count for which sweeps allocate the transient adjacency
/// scratch (V^2 bits; 2^14 vertices is 32 MB). Larger graphs fall back to
/// recomputing commutation inside the BFS inner loop.
const ADJACENCY_SCRATCH_LIMIT: usize = 1 << 14;

const UNSET: u32 = u32::MAX;

/// Commuting graph over a fixed domain, immutable after build.
///
/// `vertices` holds encoded indices ascending; `entry_cache` holds each
/// vertex's row-major entries so sweeps never re-decode.
pub struct GraphView {
    domain: DomainSpec,
    vertices: Vec<u128>,
    entry_cache: Vec<u64>,
    center: std::sync::Arc<Vec<u128>>,
    off: u64,
}

/// Exact partition of the vertex set into connected components.
///
/// Components are numbered in ascending order of their smallest vertex;
/// `labels[i]` is the component of `vertices[i]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentReport {
    pub component_count: usize,
    pub component_sizes: Vec<usize>,
    pub representatives: Vec<u128>,
    pub labels: Vec<u32>,
}

/// Enumerate the domain and assemble its commuting graph.
///
/// The guard bounds the enumeration space m^(n*n); the vertex count never
/// exceeds it. Dimensions below 2 are rejected: every 1x1 matrix is central.
pub fn build_graph(domain: DomainSpec, guard: u64) -> Result<GraphView> {
    if domain.n < 2 {
        return Err(Error::InvalidDimension { min: 2, got: domain.n });
    }
    if domain.m > KERNEL_MAX_MODULUS {
        return Err(Error::Precondition(format!(
            "modulus {} exceeds the commutation kernel bound {}",
            domain.m, KERNEL_MAX_MODULUS
        )));
    }
    let space = match domain.index_space() {
        Some(s) if s <= guard as u128 => s,
        Some(s) => return Err(Error::GuardExceeded { required: s, guard }),
        None => return Err(Error::GuardExceeded { required: u128::MAX, guard }),
    };
    let center = center_indices(domain, guard)?;
    let nn = domain.n * domain.n;
    let mut vertices = Vec::with_capacity(space as usize - center.len());
    let mut entry_cache = Vec::with_capacity(vertices.capacity() * nn);
    let mut next_central = 0usize;
    scan_domain(domain, |idx, e| {
        if next_central < center.len() && center[next_central] == idx {
            next_central += 1;
            return;
        }
        vertices.push(idx);
        entry_cache.extend_from_slice(e);
    });
    debug_assert_eq!(next_central, center.len());
    Ok(GraphView {
        domain,
        vertices,
        entry_cache,
        center,
        off: kernel_offset(domain.n, domain.m),
    })
}

impl GraphView {
    pub fn domain(&self) -> DomainSpec {
        self.domain
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Encoded vertex indices, ascending.
    pub fn vertices(&self) -> &[u128] {
        &self.vertices
    }

    /// Encoded center of the domain, ascending.
    pub fn center(&self) -> &[u128] {
        &self.center
    }

    /// Position of x in the vertex list.
    pub fn vertex_position(&self, x: &ModMatrix) -> Result<usize> {
        if x.n() != self.domain.n || x.modulus() != self.domain.m {
            return Err(Error::NotAVertex(format!("{x} has the wrong shape for {}", self.domain)));
        }
        let idx = x.encode()?;
        self.vertices
            .binary_search(&idx)
            .map_err(|_| Error::NotAVertex(format!("{x} is not a vertex of {}", self.domain)))
    }

    pub fn vertex_matrix(&self, pos: usize) -> ModMatrix {
        let nn = self.domain.n * self.domain.n;
        ModMatrix::from_entries(self.domain.n, self.domain.m, self.entry_slice(pos, nn))
    }

    #[inline]
    fn entry_slice(&self, pos: usize, nn: usize) -> &[u64] {
        &self.entry_cache[pos * nn..(pos + 1) * nn]
    }

    /// Edge test by vertex position.
    #[inline]
    pub fn commutes_at(&self, i: usize, j: usize) -> bool {
        let nn = self.domain.n * self.domain.n;
        commutes_flat(
            self.domain.n,
            self.domain.m,
            self.off,
            self.entry_slice(i, nn),
            self.entry_slice(j, nn),
        )
    }

    /// Neighbors of x, ascending by encoded index, recomputed lazily.
    pub fn neighbors(&self, x: &ModMatrix) -> Result<Neighbors<'_>> {
        let pos = self.vertex_position(x)?;
        Ok(Neighbors { graph: self, pos, cursor: 0 })
    }

    /// Exact shortest-path length between two vertices; None when no path.
    pub fn bfs_distance(&self, x: &ModMatrix, y: &ModMatrix) -> Result<Option<u32>> {
        let sx = self.vertex_position(x)?;
        let sy = self.vertex_position(y)?;
        if sx == sy {
            return Ok(Some(0));
        }
        let dist = self.bfs_from(sx, Some(sy));
        Ok((dist[sy] != UNSET).then_some(dist[sy]))
    }

    /// All distances from x, None per unreachable vertex.
    pub fn distances_from(&self, x: &ModMatrix) -> Result<Vec<Option<u32>>> {
        let sx = self.vertex_position(x)?;
        let dist = self.bfs_from(sx, None);
        Ok(dist.iter().map(|&d| (d != UNSET).then_some(d)).collect())
    }

    /// Single-source BFS over implicit adjacency, bottom-up: each still
    /// unvisited vertex probes the current frontier until it finds a
    /// neighbor. Stops early once target is reached.
    fn bfs_from(&self, src: usize, target: Option<usize>) -> Vec<u32> {
        let v = self.vertices.len();
        let mut dist = vec![UNSET; v];
        dist[src] = 0;
        let mut unvisited: Vec<u32> =
            (0..v as u32).filter(|&i| i as usize != src).collect();
        let mut frontier: Vec<u32> = vec![src as u32];
        let mut next: Vec<u32> = Vec::new();
        let mut level = 0u32;
        while !frontier.is_empty() && !unvisited.is_empty() {
            level += 1;
            next.clear();
            let mut i = 0;
            while i < unvisited.len() {
                let cand = unvisited[i] as usize;
                if frontier.iter().any(|&f| self.commutes_at(cand, f as usize)) {
                    dist[cand] = level;
                    next.push(cand as u32);
                    unvisited.swap_remove(i);
                } else {
                    i += 1;
                }
            }
            if let Some(t) = target {
                if dist[t] != UNSET {
                    return dist;
                }
            }
            std::mem::swap(&mut frontier, &mut next);
        }
        dist
    }

    /// Row-major V x V adjacency bitset, built in parallel row chunks.
    fn adjacency_scratch(&self) -> AdjacencyScratch {
        let v = self.vertices.len();
        let words = v.div_ceil(64);
        let mut rows = vec![0u64; v * words];
        rows.par_chunks_mut(words).enumerate().for_each(|(i, row)| {
            for j in 0..v {
                if j != i && self.commutes_at(i, j) {
                    row[j / 64] |= 1u64 << (j % 64);
                }
            }
        });
        AdjacencyScratch { words, rows }
    }

    /// Exact connected components via repeated BFS, seeds ascending.
    pub fn components(&self) -> ComponentReport {
        let v = self.vertices.len();
        let mut labels = vec![UNSET; v];
        let mut component_sizes = Vec::new();
        let mut representatives = Vec::new();
        if v <= ADJACENCY_SCRATCH_LIMIT {
            let adj = self.adjacency_scratch();
            let mut sweep = BitsetSweep::new(&adj);
            for seed in 0..v {
                if labels[seed] != UNSET {
                    continue;
                }
                let label = representatives.len() as u32;
                let (_, reached) = sweep.run(seed);
                let mut size = 0usize;
                for (k, &word) in sweep.visited.iter().enumerate() {
                    let mut w = word;
                    while w != 0 {
                        let pos = k * 64 + w.trailing_zeros() as usize;
                        labels[pos] = label;
                        size += 1;
                        w &= w - 1;
                    }
                }
                debug_assert_eq!(size, reached);
                component_sizes.push(size);
                representatives.push(self.vertices[seed]);
            }
        } else {
            for seed in 0..v {
                if labels[seed] != UNSET {
                    continue;
                }
                let label = representatives.len() as u32;
                let dist = self.bfs_from(seed, None);
                let size = dist.iter().filter(|&&d| d != UNSET).count();
                for (pos, &d) in dist.iter().enumerate() {
                    if d != UNSET {
                        debug_assert!(labels[pos] == UNSET);
                        labels[pos] = label;
                    }
                }
                component_sizes.push(size);
                representatives.push(self.vertices[seed]);
            }
        }
        ComponentReport {
            component_count: representatives.len(),
            component_sizes,
            representatives,
            labels,
        }
    }

    /// Exact diameter: max BFS eccentricity over every source; None when the
    /// graph is disconnected (or empty). Source vertices are partitioned
    /// across `threads` workers; the merge is a max-reduce, so the result is
    /// schedule-independent.
    pub fn diameter(&self, threads: usize) -> Result<Option<u32>> {
        let v = self.vertices.len();
        if v == 0 {
            return Ok(None);
        }
        if v == 1 {
            return Ok(Some(0));
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        if v <= ADJACENCY_SCRATCH_LIMIT {
            let adj = pool.install(|| self.adjacency_scratch());
            let (_, reached) = BitsetSweep::new(&adj).run(0);
            if reached < v {
                return Ok(None);
            }
            let diam = pool.install(|| {
                (0..v)
                    .into_par_iter()
                    .map_init(
                        || BitsetSweep::new(&adj),
                        |sweep, src| sweep.run(src).0,
                    )
                    .reduce(|| 0, u32::max)
            });
            Ok(Some(diam))
        } else {
            if self.bfs_from(0, None).iter().any(|&d| d == UNSET) {
                return Ok(None);
            }
            let diam = pool.install(|| {
                (0..v)
                    .into_par_iter()
                    .map(|src| {
                        let dist = self.bfs_from(src, None);
                        dist.iter().map(|&d| d).max().unwrap_or(0)
                    })
                    .reduce(|| 0, u32::max)
            });
            Ok(Some(diam))
        }
    }

    /// Diameter of each component, indexed by component label.
    pub fn component_diameters(&self, threads: usize) -> Result<Vec<u32>> {
        let report = self.components();
        let v = self.vertices.len();
        if v == 0 {
            return Ok(Vec::new());
        }
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build()
            .map_err(|e| Error::Precondition(format!("thread pool: {e}")))?;
        let fold = |acc: Vec<u32>, item: (usize, u32)| {
            let mut acc = acc;
            acc[report.labels[item.0] as usize] = acc[report.labels[item.0] as usize].max(item.1);
            acc
        };
        let merge = |a: Vec<u32>, b: Vec<u32>| {
            a.into_iter().zip(b).map(|(x, y)| x.max(y)).collect()
        };
        let zero = || vec![0u32; report.component_count];
        let out = if v <= ADJACENCY_SCRATCH_LIMIT {
            let adj = pool.install(|| self.adjacency_scratch());
            pool.install(|| {
                (0..v)
                    .into_par_iter()
                    .map_init(
                        || BitsetSweep::new(&adj),
                        |sweep, src| (src, sweep.run(src).0),
                    )
                    .fold(zero, fold)
                    .reduce(zero, merge)
            })
        } else {
            pool.install(|| {
                (0..v)
                    .into_par_iter()
                    .map(|src| {
                        let dist = self.bfs_from(src, None);
                        let ecc =
                            dist.iter().filter(|&&d| d != UNSET).max().copied().unwrap_or(0);
                        (src, ecc)
                    })
                    .fold(zero, fold)
                    .reduce(zero, merge)
            })
        };
        Ok(out)
    }

    /// Test-only assembly from explicit parts, bypassing enumeration.
    #[cfg(test)]
    pub(crate) fn from_raw_parts(
        domain: DomainSpec,
        vertices: Vec<u128>,
        center: Vec<u128>,
    ) -> GraphView {
        let nn = domain.n * domain.n;
        let mut entry_cache = Vec::with_capacity(vertices.len() * nn);
        for &idx in &vertices {
            let mat = ModMatrix::decode(domain.n, domain.m, idx).unwrap();
            entry_cache.extend_from_slice(mat.entries());
        }
        GraphView {
            domain,
            vertices,
            entry_cache,
            center: std::sync::Arc::new(center),
            off: kernel_offset(domain.n, domain.m),
        }
    }

    /// Undirected edges as ascending (i, j) position pairs, j > i.
    pub(crate) fn edges(&self) -> Vec<(u32, u32)> {
        let v = self.vertices.len();
        let mut out = Vec::new();
        for i in 0..v {
            for j in i + 1..v {
                if self.commutes_at(i, j) {
                    out.push((i as u32, j as u32));
                }
            }
        }
        out
    }
}

/// Lazy neighbor iterator: scans the vertex list in ascending order.
pub struct Neighbors<'g> {
    graph: &'g GraphView,
    pos: usize,
    cursor: usize,
}

impl Iterator for Neighbors<'_> {
    type Item = ModMatrix;

    fn next(&mut self) -> Option<ModMatrix> {
        while self.cursor < self.graph.vertices.len() {
            let j = self.cursor;
            self.cursor += 1;
            if j != self.pos && self.graph.commutes_at(self.pos, j) {
                return Some(self.graph.vertex_matrix(j));
            }
        }
        None
    }
}

struct AdjacencyScratch {
    words: usize,
    rows: Vec<u64>,
}

impl AdjacencyScratch {
    #[inline]
    fn row(&self, v: usize) -> &[u64] {
        &self.rows[v * self.words..(v + 1) * self.words]
    }
}

/// Per-worker BFS state over the shared adjacency bitset.
struct BitsetSweep<'a> {
    adj: &'a AdjacencyScratch,
    visited: Vec<u64>,
    frontier: Vec<u64>,
    next: Vec<u64>,
}

impl<'a> BitsetSweep<'a> {
    fn new(adj: &'a AdjacencyScratch) -> BitsetSweep<'a> {
        BitsetSweep {
            adj,
            visited: vec![0; adj.words],
            frontier: vec![0; adj.words],
            next: vec![0; adj.words],
        }
    }

    /// BFS from src; returns (eccentricity, reached count). `visited` holds
    /// the reachable set afterward.
    fn run(&mut self, src: usize) -> (u32, usize) {
        self.visited.fill(0);
        self.frontier.fill(0);
        self.visited[src / 64] |= 1u64 << (src % 64);
        self.frontier[src / 64] |= 1u64 << (src % 64);
        let mut reached = 1usize;
        let mut level = 0u32;
        loop {
            self.next.fill(0);
            for k in 0..self.adj.words {
                let mut w = self.frontier[k];
                while w != 0 {
                    let f = k * 64 + w.trailing_zeros() as usize;
                    w &= w - 1;
                    for (n, &r) in self.next.iter_mut().zip(self.adj.row(f)) {
                        *n |= r;
                    }
                }
            }
            let mut new = 0usize;
            for k in 0..self.adj.words {
                let fresh = self.next[k] & !self.visited[k];
                self.next[k] = fresh;
                self.visited[k] |= fresh;
                new += fresh.count_ones() as usize;
            }
            if new == 0 {
                return (level, reached);
            }
            reached += new;
            level += 1;
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
    }
}
