//! GF(2) certification of path sets.
//!
//! Coordinates of a path vector are the original edges in order followed by
//! the virtual end-to-begin edge, so every begin-end path is a cycle of the
//! closed graph and carries a 1 in the last coordinate.

mod bits;
pub mod gen;
mod oracle;

use std::collections::{BTreeMap, HashSet};

use serde::Serialize;

pub use bits::{rank_gf2, BitMatrix, Echelon, PathVector};
pub use oracle::{brute_force_basis, enumerate_paths};

use crate::basis::{Path, PathSet};
use crate::cfg::{cyclomatic_complexity, ClosedCfg, EdgeId};
use crate::decompose::{Decomposition, Region};
use crate::error::{Error, Result};

pub fn path_to_vector(path: &Path, closed: &ClosedCfg) -> Result<PathVector> {
    let mut v = PathVector::zeros(closed.edge_count());
    for &e in &path.edges {
        if e.0 >= closed.base().edge_count() {
            return Err(Error::InvalidPath(format!("edge {e} out of range")));
        }
        v.flip(e.0);
    }
    v.set(closed.virtual_edge().0, true);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coverage {
    pub covered: usize,
    pub total: usize,
    pub fraction: f64,
    pub missing: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegionTerm {
    pub region: Region,
    /// Block complexity minus one plus hosted loops, or the loop's own term.
    pub expected: i64,
    /// Non-backbone paths that leave the backbone only inside this region.
    pub observed: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Accounting {
    pub blocks: Vec<i64>,
    pub loops: Vec<i64>,
    /// `1 + sum(C_b - 1) + sum(C_l)`
    pub total: i64,
    /// Complexity minus total; zero on every well-formed graph.
    pub residual: i64,
    pub regions: Vec<RegionTerm>,
    /// Non-backbone paths that diverge in no region or in several.
    pub unlocalized: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationCertificate {
    pub complexity: i64,
    pub rank: usize,
    pub paths: usize,
    pub is_basis: bool,
    pub coverage: Coverage,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accounting: Option<Accounting>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub invalid: Vec<String>,
}

impl VerificationCertificate {
    pub fn summary(&self) -> String {
        if self.is_basis {
            format!(
                "basis verified: rank {} = complexity {}",
                self.rank, self.complexity
            )
        } else {
            format!(
                "not a basis: {} paths, rank {}, complexity {}, {} edges uncovered",
                self.paths,
                self.rank,
                self.complexity,
                self.coverage.missing.len()
            )
        }
    }
}

pub fn verify_basis(
    paths: &PathSet,
    closed: &ClosedCfg,
    decomposition: Option<&Decomposition>,
) -> VerificationCertificate {
    let base = closed.base();
    let complexity = cyclomatic_complexity(closed);
    let mut invalid = Vec::new();
    let mut echelon = Echelon::new(closed.edge_count());
    let mut seen = vec![false; base.edge_count()];
    for (i, p) in paths.paths.iter().enumerate() {
        if let Err(e) = p.validate(base) {
            invalid.push(format!("path {i}: {e}"));
            continue;
        }
        for &e in &p.edges {
            seen[e.0] = true;
        }
        echelon.insert(&path_to_vector(p, closed).expect("validated"));
    }
    let missing: Vec<EdgeId> = (0..base.edge_count())
        .filter(|&i| !seen[i])
        .map(EdgeId)
        .collect();
    let total = base.edge_count();
    let covered = total - missing.len();
    let coverage = Coverage {
        covered,
        total,
        fraction: if total == 0 {
            1.0
        } else {
            covered as f64 / total as f64
        },
        missing,
    };
    let rank = echelon.rank();
    let is_basis = invalid.is_empty()
        && rank as i64 == complexity
        && paths.paths.len() == rank
        && coverage.missing.is_empty();
    let accounting = decomposition.map(|d| account(paths, d, complexity));
    VerificationCertificate {
        complexity,
        rank,
        paths: paths.paths.len(),
        is_basis,
        coverage,
        accounting,
        invalid,
    }
}

fn account(paths: &PathSet, d: &Decomposition, complexity: i64) -> Accounting {
    let blocks: Vec<i64> = d.chain.blocks.iter().map(|b| b.complexity()).collect();
    let loops: Vec<i64> = d.loops.iter().map(|l| l.complexity()).collect();
    let total = 1 + blocks.iter().map(|c| c - 1).sum::<i64>() + loops.iter().sum::<i64>();

    let mut expected: BTreeMap<Region, i64> = BTreeMap::new();
    for (k, c) in blocks.iter().enumerate() {
        expected.insert(Region::Block(k), c - 1);
    }
    for (i, c) in loops.iter().enumerate() {
        *expected.entry(d.hosts[i]).or_insert(0) += c;
    }
    let mut observed: BTreeMap<Region, i64> = expected.keys().map(|&r| (r, 0)).collect();
    let mut unlocalized = Vec::new();
    if let Some(bb) = paths.paths.get(paths.backbone) {
        let bb_edges: HashSet<EdgeId> = bb.edges.iter().copied().collect();
        let attribution = EdgeAttribution::new(d);
        for (i, p) in paths.paths.iter().enumerate() {
            if i == paths.backbone {
                continue;
            }
            let regions: HashSet<Region> = attribution
                .regions(&p.edges)
                .into_iter()
                .zip(&p.edges)
                .filter(|(_, e)| !bb_edges.contains(e))
                .filter_map(|(r, _)| r)
                .collect();
            if regions.len() == 1 {
                let r = regions.into_iter().next().unwrap();
                *observed.entry(r).or_insert(0) += 1;
            } else {
                unlocalized.push(i);
            }
        }
    }
    let regions = expected
        .iter()
        .map(|(&region, &exp)| RegionTerm {
            region,
            expected: exp,
            observed: observed[&region],
        })
        .collect();
    Accounting {
        blocks,
        loops,
        total,
        residual: complexity - total,
        regions,
        unlocalized,
    }
}

/// Maps the edges of a walk to the block or loop they belong to.
struct EdgeAttribution<'a> {
    d: &'a Decomposition,
    block_of: Vec<Option<usize>>,
    loop_of: Vec<Option<usize>>,
    back_of: Vec<bool>,
}

impl<'a> EdgeAttribution<'a> {
    fn new(d: &'a Decomposition) -> Self {
        let n = d.edge_count;
        let mut block_of = vec![None; n];
        for (k, b) in d.chain.blocks.iter().enumerate() {
            for e in &b.edges {
                block_of[d.loopless.edge_origin[e.0].0] = Some(k);
            }
        }
        let mut loop_of = vec![None; n];
        let mut back_of = vec![false; n];
        for (i, l) in d.loops.iter().enumerate() {
            for e in &l.internal_edges {
                loop_of[e.0] = Some(i);
            }
            for e in &l.back_edges {
                back_of[e.0] = true;
            }
        }
        EdgeAttribution {
            d,
            block_of,
            loop_of,
            back_of,
        }
    }

    fn regions(&self, edges: &[EdgeId]) -> Vec<Option<Region>> {
        let at = |e: EdgeId| e.0 < self.block_of.len();
        let mut out = vec![None; edges.len()];
        let mut i = 0;
        while i < edges.len() {
            let e = edges[i];
            if !at(e) {
                i += 1;
                continue;
            }
            match self.loop_of[e.0] {
                None => {
                    out[i] = self.block_of[e.0].map(Region::Block);
                    i += 1;
                }
                Some(l) => {
                    let start = i;
                    while i < edges.len() && at(edges[i]) && self.loop_of[edges[i].0] == Some(l) {
                        i += 1;
                    }
                    // Up to the last back edge is a traversal; the rest is the
                    // route to the exit edge that follows.
                    let last_back = (start..i).rev().find(|&j| self.back_of[edges[j].0]);
                    let host = self.d.hosts[l];
                    let exit = edges
                        .get(i)
                        .and_then(|&x| self.block_of.get(x.0).copied().flatten())
                        .map(Region::Block)
                        .unwrap_or(host);
                    for (j, slot) in out.iter_mut().enumerate().take(i).skip(start) {
                        *slot = Some(match last_back {
                            Some(b) if j <= b => host,
                            _ => exit,
                        });
                    }
                }
            }
        }
        out
    }
}

/// Replaces path `rejected` by the first candidate independent of the
/// remaining paths; the backbone becomes the shortest member.
pub fn substitute_path(
    basis: &PathSet,
    rejected: usize,
    candidates: &[Path],
    closed: &ClosedCfg,
) -> Result<PathSet> {
    if rejected >= basis.paths.len() {
        return Err(Error::Contract(format!(
            "no path with index {rejected} (plan has {})",
            basis.paths.len()
        )));
    }
    let mut echelon = Echelon::new(closed.edge_count());
    for (i, p) in basis.paths.iter().enumerate() {
        if i != rejected {
            echelon.insert(&path_to_vector(p, closed)?);
        }
    }
    let target = cyclomatic_complexity(closed);
    for c in candidates {
        if *c == basis.paths[rejected] || c.validate(closed.base()).is_err() {
            continue;
        }
        if echelon.contains(&path_to_vector(c, closed)?) {
            continue;
        }
        let mut paths = basis.paths.clone();
        paths[rejected] = c.clone();
        let backbone = (0..paths.len())
            .min_by(|&a, &b| {
                (paths[a].len(), &paths[a].edges).cmp(&(paths[b].len(), &paths[b].edges))
            })
            .unwrap_or(0);
        return Ok(PathSet { paths, backbone });
    }
    Err(Error::NoIndependentSubstitute {
        candidates: candidates.len(),
        deficit: (target - echelon.rank() as i64).max(0) as usize,
    })
}
