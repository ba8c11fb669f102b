//! Exhaustive enumeration of digraphs and the solver census.
//!
//! A digraph on `n <= 8` nodes is indexed by an integer code in
//! `[0, 2^(n^2))` with bit `u*n + v` set iff the arc `u -> v` exists.
//! The census sweeps every code in the selected universe, keeps the codes
//! whose network classifies density correctly, and deduplicates the
//! survivors by brute-force canonical labeling (minimum code over all node
//! permutations). Canonicalization only runs on solvers: solver density is
//! low, so this avoids the `n! * 2^(n^2)` blowup.
//!
//! The per-code solver test is deliberately independent of the main
//! dynamics path: it rebuilds the one-step transition table with narrow
//! integer masks and walks it directly. The property suite pins this table
//! against [`crate::MajorityNetwork::step`] entry by entry.

use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::MajorityNetwork;
use crate::error::{MbanError, Result};
use crate::graph::Digraph;

/// Largest node count for code-based enumeration (`n^2` must fit 64 bits
/// and `n!` permutations must stay tractable).
pub const MAX_CODE_N: usize = 8;

/// Largest node count for a materialized `2^n`-entry transition table.
pub const MAX_TABLE_N: usize = 20;

/// Largest census size accepted without an explicit override: `n = 7`
/// already means a sweep over `2^49` codes.
pub const DEFAULT_MAX_CENSUS_N: usize = 5;

/// Checkpoint cadence in codes processed.
pub const CHECKPOINT_EVERY: u64 = 1 << 20;

/// Integer encoding of a digraph for enumeration and canonical labeling.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GraphCode {
    pub n: usize,
    pub code: u64,
}

impl GraphCode {
    pub fn new(n: usize, code: u64) -> Result<Self> {
        check_code_size(n)?;
        if n < MAX_CODE_N && code >> (n * n) != 0 {
            return Err(MbanError::Parameter(format!(
                "code {code} has bits beyond 2^{}",
                n * n
            )));
        }
        Ok(Self { n, code })
    }

    /// Rebuilds the digraph this code denotes.
    pub fn decode(&self) -> Digraph {
        let mut g = Digraph::new(self.n).expect("code size checked on construction");
        for u in 0..self.n {
            for v in 0..self.n {
                if (self.code >> (u * self.n + v)) & 1 == 1 {
                    g.add_arc(u, v).expect("in range");
                }
            }
        }
        g
    }
}

fn check_code_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(MbanError::Parameter("size must be at least 1".into()));
    }
    if n > MAX_CODE_N {
        return Err(MbanError::TooLarge {
            what: "graph code",
            n,
            max: MAX_CODE_N,
            detail: "canonical labeling minimizes over all n! relabelings".into(),
        });
    }
    Ok(())
}

/// Bit-encodes a digraph on `n <= 8` nodes.
pub fn encode(g: &Digraph) -> Result<GraphCode> {
    check_code_size(g.n())?;
    let n = g.n();
    let mut code = 0u64;
    for (u, v) in g.arcs() {
        code |= 1 << (u * n + v);
    }
    Ok(GraphCode { n, code })
}

/// Precomputed bit-position relabeling tables, one per permutation.
fn perm_maps(n: usize) -> Vec<Vec<u8>> {
    (0..n)
        .permutations(n)
        .map(|perm| {
            let mut map = vec![0u8; n * n];
            for u in 0..n {
                for v in 0..n {
                    map[u * n + v] = (perm[u] * n + perm[v]) as u8;
                }
            }
            map
        })
        .collect()
}

fn relabel_code(code: u64, map: &[u8]) -> u64 {
    let mut rest = code;
    let mut out = 0u64;
    while rest != 0 {
        let bit = rest.trailing_zeros() as usize;
        out |= 1 << map[bit];
        rest &= rest - 1;
    }
    out
}

fn canonical_of_code(code: u64, maps: &[Vec<u8>]) -> u64 {
    maps.iter()
        .map(|m| relabel_code(code, m))
        .min()
        .expect("at least the identity permutation")
}

/// Minimum code over all node relabelings; two digraphs are isomorphic iff
/// their canonical codes are equal.
pub fn canonical_code(g: &Digraph) -> Result<GraphCode> {
    let gc = encode(g)?;
    let maps = perm_maps(gc.n);
    Ok(GraphCode {
        n: gc.n,
        code: canonical_of_code(gc.code, &maps),
    })
}

// ---------------------------------------------------------------------------
// Transition tables
// ---------------------------------------------------------------------------

/// Memoized one-step table: entry `i` is the configuration-as-integer of
/// the update applied to configuration `i`.
pub fn transition_table(net: &MajorityNetwork) -> Result<Vec<u32>> {
    let n = net.n();
    if n > MAX_TABLE_N {
        return Err(MbanError::TooLarge {
            what: "transition table",
            n,
            max: MAX_TABLE_N,
            detail: format!("table would hold 2^{n} entries"),
        });
    }
    let g = net.graph();
    let masks: Vec<u32> = (0..n).map(|v| g.in_mask(v) as u32).collect();
    let degrees: Vec<u32> = (0..n).map(|v| g.in_degree(v) as u32).collect();
    let mut table = vec![0u32; 1 << n];
    for (x, entry) in table.iter_mut().enumerate() {
        *entry = step_u32(&masks, &degrees, x as u32);
    }
    Ok(table)
}

/// Narrow-word update kernel shared by the table builder and the census.
#[inline]
fn step_u32(masks: &[u32], degrees: &[u32], x: u32) -> u32 {
    let mut out = 0u32;
    for (v, (&m, &deg)) in masks.iter().zip(degrees).enumerate() {
        let ones = 2 * (x & m).count_ones();
        let state = if ones > deg {
            1
        } else if ones < deg {
            0
        } else {
            (x >> v) & 1
        };
        out |= state << v;
    }
    out
}

// ---------------------------------------------------------------------------
// Census
// ---------------------------------------------------------------------------

/// Universe restriction flags. All default to off: the widest universe (all
/// `2^(n^2)` labeled digraphs) reproduces the published solver counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseOptions {
    pub no_self_loops: bool,
    pub odd_degrees_only: bool,
    pub weakly_connected: bool,
}

impl UniverseOptions {
    fn to_bits(self) -> u32 {
        self.no_self_loops as u32
            | (self.odd_degrees_only as u32) << 1
            | (self.weakly_connected as u32) << 2
    }

    fn from_bits(bits: u32) -> Self {
        Self {
            no_self_loops: bits & 1 != 0,
            odd_degrees_only: bits & 2 != 0,
            weakly_connected: bits & 4 != 0,
        }
    }
}

/// Census configuration beyond the universe flags.
#[derive(Debug, Clone, Default)]
pub struct CensusOptions {
    pub universe: UniverseOptions,
    /// Accept `n > DEFAULT_MAX_CENSUS_N` (library-only escape hatch).
    pub allow_large: bool,
    /// Persist progress here every [`CHECKPOINT_EVERY`] codes and resume
    /// from it when the file already exists.
    pub resume_path: Option<PathBuf>,
}

/// Exhaustive count of solver networks of size `n`, up to isomorphism.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverCensus {
    pub n: usize,
    /// Number of labeled digraphs in the selected universe.
    pub universe_size: u64,
    /// Labeled solver graphs found.
    pub raw_solver_count: u64,
    /// Isomorphism classes of solvers.
    pub canonical_solver_count: u64,
    /// Sorted canonical representative codes, one per class.
    pub canonical_codes: Vec<u64>,
    pub options: UniverseOptions,
}

struct CensusScratch {
    masks: Vec<u32>,
    degrees: Vec<u32>,
    table: Vec<u32>,
}

impl CensusScratch {
    fn new(n: usize) -> Self {
        Self {
            masks: vec![0; n],
            degrees: vec![0; n],
            table: vec![0; 1 << n],
        }
    }
}

fn in_universe(n: usize, code: u64, scratch: &CensusScratch, opts: UniverseOptions) -> bool {
    if opts.no_self_loops {
        for v in 0..n {
            if (code >> (v * n + v)) & 1 == 1 {
                return false;
            }
        }
    }
    if opts.odd_degrees_only && scratch.degrees.iter().any(|d| d % 2 == 0) {
        return false;
    }
    if opts.weakly_connected {
        // Symmetrized adjacency, BFS over bit frontiers.
        let mut adj = vec![0u32; n];
        for v in 0..n {
            adj[v] |= scratch.masks[v];
            for u in 0..n {
                if (scratch.masks[v] >> u) & 1 == 1 {
                    adj[u] |= 1 << v;
                }
            }
        }
        let all = (1u32 << n) - 1;
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 && seen != all {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                next |= adj[v];
                f &= f - 1;
            }
            frontier = next & !seen;
            seen |= next;
        }
        if seen != all {
            return false;
        }
    }
    true
}

/// Decides the task for one graph code. Fills the transition table while
/// checking that one update never flips the global majority (a necessary
/// condition that rejects most codes early), then walks each orbit from the
/// hard densities outward.
fn code_solves(n: usize, code: u64, order: &[u32], scratch: &mut CensusScratch) -> bool {
    for v in 0..n {
        let mut m = 0u32;
        for u in 0..n {
            m |= (((code >> (u * n + v)) & 1) as u32) << u;
        }
        scratch.masks[v] = m;
        scratch.degrees[v] = m.count_ones();
    }
    let size: u32 = 1 << n;
    let full = size - 1;
    let half = n as u32 / 2;
    for x in 0..size {
        let next = step_u32(&scratch.masks, &scratch.degrees, x);
        // maj flip: solver orbits keep the majority state forever.
        if (x.count_ones() > half) != (next.count_ones() > half) {
            return false;
        }
        scratch.table[x as usize] = next;
    }
    for &x in order {
        let target = if x.count_ones() > half { full } else { 0 };
        let mut cur = x;
        let mut reached = cur == target;
        if !reached {
            for _ in 0..size {
                cur = scratch.table[cur as usize];
                if cur == target {
                    reached = true;
                    break;
                }
            }
        }
        if !reached {
            return false;
        }
    }
    true
}

fn scan_order(n: usize) -> Vec<u32> {
    // Hard densities first: the slowest and most failure-prone orbits sit
    // at ones-counts floor(n/2) and ceil(n/2).
    let low = n as u32 / 2;
    let high = n.div_ceil(2) as u32;
    let mut order: Vec<u32> = (0..1u32 << n).collect();
    order.sort_by_key(|x| {
        let d = x.count_ones();
        (if d == low || d == high { 0 } else { 1 }, *x)
    });
    order
}

#[derive(Default)]
struct CensusPartial {
    universe: u64,
    raw: u64,
    canonical: Vec<u64>,
}

fn scan_codes(
    n: usize,
    lo: u64,
    hi: u64,
    order: &[u32],
    maps: &[Vec<u8>],
    opts: UniverseOptions,
) -> CensusPartial {
    let chunk: u64 = 4096;
    let n_chunks = (hi - lo).div_ceil(chunk);
    (0..n_chunks)
        .into_par_iter()
        .map(|ci| {
            let start = lo + ci * chunk;
            let end = hi.min(start + chunk);
            let mut scratch = CensusScratch::new(n);
            let mut part = CensusPartial::default();
            for code in start..end {
                // Masks must be in place before the universe filters run.
                for v in 0..n {
                    let mut m = 0u32;
                    for u in 0..n {
                        m |= (((code >> (u * n + v)) & 1) as u32) << u;
                    }
                    scratch.masks[v] = m;
                    scratch.degrees[v] = m.count_ones();
                }
                if !in_universe(n, code, &scratch, opts) {
                    continue;
                }
                part.universe += 1;
                if code_solves(n, code, order, &mut scratch) {
                    part.raw += 1;
                    part.canonical.push(canonical_of_code(code, maps));
                }
            }
            part
        })
        .reduce(CensusPartial::default, |mut a, mut b| {
            a.universe += b.universe;
            a.raw += b.raw;
            a.canonical.append(&mut b.canonical);
            a
        })
}

/// Sweeps every code in `[0, 2^(n^2))`, verifies each universe member
/// exhaustively, and returns solver counts with sorted canonical codes.
/// Deterministic for any worker count and chunking.
pub fn enumerate_solvers(n: usize, options: &CensusOptions) -> Result<SolverCensus> {
    check_code_size(n)?;
    if n % 2 == 0 {
        return Err(MbanError::EvenSize { n });
    }
    if n > DEFAULT_MAX_CENSUS_N && !options.allow_large {
        return Err(MbanError::TooLarge {
            what: "solver census",
            n,
            max: DEFAULT_MAX_CENSUS_N,
            detail: format!("sweep over 2^{} codes needs an explicit override", n * n),
        });
    }

    let total: u64 = 1u64 << (n * n);
    let order = scan_order(n);
    let maps = perm_maps(n);

    let mut state = match &options.resume_path {
        Some(path) if path.exists() => {
            let st = CheckpointState::load(path)?;
            st.validate(n, options.universe)?;
            st
        }
        _ => CheckpointState::fresh(n, options.universe),
    };

    while state.next_code < total {
        let hi = total.min(state.next_code + CHECKPOINT_EVERY);
        let part = scan_codes(n, state.next_code, hi, &order, &maps, options.universe);
        state.universe += part.universe;
        state.raw += part.raw;
        state.canonical.extend(part.canonical);
        state.canonical.sort_unstable();
        state.canonical.dedup();
        state.next_code = hi;
        if let Some(path) = &options.resume_path {
            if state.next_code < total {
                state.save(path)?;
            }
        }
    }
    if let Some(path) = &options.resume_path {
        state.save(path)?;
    }

    Ok(SolverCensus {
        n,
        universe_size: state.universe,
        raw_solver_count: state.raw,
        canonical_solver_count: state.canonical.len() as u64,
        canonical_codes: state.canonical,
        options: options.universe,
    })
}

// ---------------------------------------------------------------------------
// Checkpointing
// ---------------------------------------------------------------------------

const CHECKPOINT_MAGIC: &[u8; 8] = b"MBANCKP1";
const CHECKPOINT_VERSION: u32 = 1;

/// Resumable census state. On disk this is a fixed-width little-endian
/// record: magic, version, n, universe-option bits, reserved word, next
/// code, universe count, raw count, canonical-code count, then the sorted
/// canonical codes as u64s.
struct CheckpointState {
    n: usize,
    options: UniverseOptions,
    next_code: u64,
    universe: u64,
    raw: u64,
    canonical: Vec<u64>,
}

impl CheckpointState {
    fn fresh(n: usize, options: UniverseOptions) -> Self {
        Self {
            n,
            options,
            next_code: 0,
            universe: 0,
            raw: 0,
            canonical: Vec::new(),
        }
    }

    fn validate(&self, n: usize, options: UniverseOptions) -> Result<()> {
        if self.n != n || self.options != options {
            return Err(MbanError::Parameter(format!(
                "checkpoint was written for n={} options={:?}, requested n={n} options={options:?}",
                self.n, self.options
            )));
        }
        Ok(())
    }

    fn save(&self, path: &Path) -> Result<()> {
        let io_err = |e: std::io::Error| MbanError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let mut buf = Vec::with_capacity(56 + 8 * self.canonical.len());
        buf.extend_from_slice(CHECKPOINT_MAGIC);
        buf.extend_from_slice(&CHECKPOINT_VERSION.to_le_bytes());
        buf.extend_from_slice(&(self.n as u32).to_le_bytes());
        buf.extend_from_slice(&self.options.to_bits().to_le_bytes());
        buf.extend_from_slice(&0u32.to_le_bytes());
        buf.extend_from_slice(&self.next_code.to_le_bytes());
        buf.extend_from_slice(&self.universe.to_le_bytes());
        buf.extend_from_slice(&self.raw.to_le_bytes());
        buf.extend_from_slice(&(self.canonical.len() as u64).to_le_bytes());
        for code in &self.canonical {
            buf.extend_from_slice(&code.to_le_bytes());
        }
        let tmp = path.with_extension("tmp");
        let mut f = std::fs::File::create(&tmp).map_err(io_err)?;
        f.write_all(&buf).map_err(io_err)?;
        f.sync_all().map_err(io_err)?;
        std::fs::rename(&tmp, path).map_err(io_err)
    }

    fn load(path: &Path) -> Result<Self> {
        let io_err = |e: std::io::Error| MbanError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        };
        let parse_err = |message: &str| MbanError::Parse {
            location: path.display().to_string(),
            message: message.to_string(),
        };
        let mut buf = Vec::new();
        std::fs::File::open(path)
            .map_err(io_err)?
            .read_to_end(&mut buf)
            .map_err(io_err)?;
        if buf.len() < 56 || &buf[..8] != CHECKPOINT_MAGIC {
            return Err(parse_err("not a census checkpoint file"));
        }
        let u32_at = |o: usize| u32::from_le_bytes(buf[o..o + 4].try_into().unwrap());
        let u64_at = |o: usize| u64::from_le_bytes(buf[o..o + 8].try_into().unwrap());
        if u32_at(8) != CHECKPOINT_VERSION {
            return Err(parse_err("unsupported checkpoint version"));
        }
        let n = u32_at(12) as usize;
        let options = UniverseOptions::from_bits(u32_at(16));
        let count = u64_at(48) as usize;
        if buf.len() != 56 + 8 * count {
            return Err(parse_err("truncated checkpoint"));
        }
        let canonical = (0..count).map(|i| u64_at(56 + 8 * i)).collect();
        Ok(Self {
            n,
            options,
            next_code: u64_at(24),
            universe: u64_at(32),
            raw: u64_at(40),
            canonical,
        })
    }
}
