//! Independent oracle: enumerate begin-end walks and keep the ones that
//! raise the GF(2) rank.

use crate::basis::{Path, PathSet};
use crate::cfg::{cyclomatic_complexity, ClosedCfg, EdgeId};
use crate::error::{Error, Result};

use super::bits::Echelon;
use super::path_to_vector;

/// Most times one walk may traverse the same edge. A simple stem, a simple
/// cycle and a simple stem back out never need more.
const EDGE_REPEAT: u8 = 2;

/// Calls `visit` on every begin-end walk that uses each edge at most twice,
/// in edge-id order, until it returns `false` or `budget` walks were seen.
/// Returns the number of walks visited.
pub fn enumerate_paths(
    closed: &ClosedCfg,
    budget: usize,
    mut visit: impl FnMut(&[EdgeId]) -> bool,
) -> usize {
    let g = closed.base();
    let Ok((b, t)) = g.terminals() else { return 0 };
    let outs = g.successors();
    let co = crate::cfg::reach_from(g, &[b], &[t]).backward;
    let mut used = vec![0u8; g.edge_count()];
    let mut walk: Vec<EdgeId> = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(b.0, 0)];
    let mut count = 0;
    if !co[b.0] {
        return 0;
    }
    while let Some(&mut (u, ref mut i)) = stack.last_mut() {
        if u == t.0 {
            count += 1;
            if !visit(&walk) || count >= budget {
                return count;
            }
            stack.pop();
            if let Some(e) = walk.pop() {
                used[e.0] -= 1;
            }
            continue;
        }
        if *i < outs[u].len() {
            let e = outs[u][*i];
            *i += 1;
            let w = g.edge(e).to.0;
            if used[e.0] == EDGE_REPEAT || !co[w] {
                continue;
            }
            used[e.0] += 1;
            walk.push(e);
            stack.push((w, 0));
        } else {
            stack.pop();
            if let Some(e) = walk.pop() {
                used[e.0] -= 1;
            }
        }
    }
    count
}

/// Greedy rank-raising selection from the trail enumeration.
pub fn brute_force_basis(closed: &ClosedCfg, path_budget: usize) -> Result<PathSet> {
    let target = cyclomatic_complexity(closed).max(0) as usize;
    let mut echelon = Echelon::new(closed.edge_count());
    let mut paths = Vec::new();
    enumerate_paths(closed, path_budget, |walk| {
        let p = Path::new(walk.to_vec());
        let v = path_to_vector(&p, closed).expect("walk edges are in range");
        if echelon.insert(&v) {
            paths.push(p);
        }
        paths.len() < target
    });
    if paths.len() < target || paths.is_empty() {
        return Err(Error::BudgetExhausted {
            budget: path_budget,
            rank: paths.len(),
            target,
        });
    }
    let backbone = (0..paths.len())
        .min_by(|&a, &b| (paths[a].len(), &paths[a].edges).cmp(&(paths[b].len(), &paths[b].edges)))
        .unwrap();
    Ok(PathSet { paths, backbone })
}
