//! Working graph shared by the analyses.
//!
//! A `Net` is a light adjacency view over some subset of a root `Cfg`: every
//! arc remembers the root `EdgeId` it stands for, so paths computed on any
//! derived net (loop-contracted, header-split, a block) are sequences of
//! root edges. Arcs leaving a contracted loop carry the in-body route that
//! leads from the loop header to the real exit point.

use std::cmp::{Ordering, Reverse};
use std::collections::BinaryHeap;

use crate::cfg::{Cfg, EdgeId};

#[derive(Clone, Debug)]
pub(crate) struct Arc {
    pub id: EdgeId,
    pub from: usize,
    pub to: usize,
    /// Root edges walked from the contracted header before this arc.
    pub route: Vec<EdgeId>,
}

impl Arc {
    pub fn new(id: EdgeId, from: usize, to: usize) -> Self {
        Arc {
            id,
            from,
            to,
            route: Vec::new(),
        }
    }

    /// Number of root edges this arc expands to.
    pub fn weight(&self) -> usize {
        self.route.len() + 1
    }

    pub fn expand_into(&self, out: &mut Vec<EdgeId>) {
        out.extend_from_slice(&self.route);
        out.push(self.id);
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Net {
    pub n: usize,
    pub arcs: Vec<Arc>,
    pub begin: usize,
    pub end: usize,
}

impl Net {
    pub fn from_cfg(cfg: &Cfg, begin: usize, end: usize) -> Net {
        Net {
            n: cfg.node_count(),
            arcs: cfg
                .edges()
                .iter()
                .enumerate()
                .map(|(i, e)| Arc::new(EdgeId(i), e.from.0, e.to.0))
                .collect(),
            begin,
            end,
        }
    }

    pub fn out_arcs(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.from].push(i);
        }
        adj
    }

    pub fn in_arcs(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.to].push(i);
        }
        adj
    }

    pub fn expand(&self, arcs: &[usize]) -> Vec<EdgeId> {
        let mut out = Vec::new();
        for &a in arcs {
            self.arcs[a].expand_into(&mut out);
        }
        out
    }

    pub fn weight_of(&self, arcs: &[usize]) -> usize {
        arcs.iter().map(|&a| self.arcs[a].weight()).sum()
    }

    /// Shortest path by expanded weight from `src` to `dst`, using only arcs
    /// accepted by `allow`. Among shortest paths the lexicographically
    /// smallest expanded edge sequence wins.
    pub fn shortest(
        &self,
        src: usize,
        dst: usize,
        allow: impl Fn(usize) -> bool,
    ) -> Option<Vec<usize>> {
        let ins = self.in_arcs();
        // Reverse Dijkstra gives distance-to-destination for every node.
        let mut dist = vec![usize::MAX; self.n];
        dist[dst] = 0;
        let mut heap = BinaryHeap::from([Reverse((0usize, dst))]);
        while let Some(Reverse((d, u))) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &a in &ins[u] {
                if !allow(a) {
                    continue;
                }
                let arc = &self.arcs[a];
                let nd = d + arc.weight();
                if nd < dist[arc.from] {
                    dist[arc.from] = nd;
                    heap.push(Reverse((nd, arc.from)));
                }
            }
        }
        if dist[src] == usize::MAX {
            return None;
        }
        let outs = self.out_arcs();
        let mut path = Vec::new();
        let mut u = src;
        while u != dst {
            let best = outs[u]
                .iter()
                .copied()
                .filter(|&a| allow(a))
                .filter(|&a| {
                    let arc = &self.arcs[a];
                    dist[arc.to] != usize::MAX && dist[arc.to] + arc.weight() == dist[u]
                })
                .min_by(|&x, &y| self.cmp_expanded(x, y))?;
            path.push(best);
            u = self.arcs[best].to;
        }
        Some(path)
    }

    fn cmp_expanded(&self, x: usize, y: usize) -> Ordering {
        let (a, b) = (&self.arcs[x], &self.arcs[y]);
        a.route
            .iter()
            .chain(std::iter::once(&a.id))
            .cmp(b.route.iter().chain(std::iter::once(&b.id)))
    }

    /// Nodes touched by at least one arc, plus begin and end.
    pub fn live_nodes(&self) -> Vec<bool> {
        let mut live = vec![false; self.n];
        live[self.begin] = true;
        live[self.end] = true;
        for a in &self.arcs {
            live[a.from] = true;
            live[a.to] = true;
        }
        live
    }

    /// Topological order of the live nodes, or `None` if a cycle exists.
    pub fn topo_order(&self) -> Option<Vec<usize>> {
        let live = self.live_nodes();
        let mut indeg = vec![0usize; self.n];
        for a in &self.arcs {
            indeg[a.to] += 1;
        }
        let outs = self.out_arcs();
        let mut stack: Vec<usize> = (0..self.n)
            .rev()
            .filter(|&u| live[u] && indeg[u] == 0)
            .collect();
        let mut order = Vec::new();
        while let Some(u) = stack.pop() {
            order.push(u);
            for &a in outs[u].iter().rev() {
                let w = self.arcs[a].to;
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        (order.len() == live.iter().filter(|&&l| l).count()).then_some(order)
    }

    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let outs = self.out_arcs();
        let mut seen = vec![false; self.n];
        seen[start] = true;
        let mut stack = vec![start];
        while let Some(u) = stack.pop() {
            for &a in &outs[u] {
                let w = self.arcs[a].to;
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }
}

/// Immediate dominators over the nodes reachable from the root, computed
/// with the iterative algorithm of Cooper, Harvey and Kennedy.
pub(crate) struct Dominators {
    idom: Vec<Option<usize>>,
    pre: Vec<usize>,
    post: Vec<usize>,
}

impl Dominators {
    pub fn compute(net: &Net, root: usize) -> Self {
        let outs = net.out_arcs();
        let ins = net.in_arcs();
        let rpo = reverse_postorder(net, &outs, root);
        let mut rpo_index = vec![usize::MAX; net.n];
        for (i, &u) in rpo.iter().enumerate() {
            rpo_index[u] = i;
        }
        let mut idom: Vec<Option<usize>> = vec![None; net.n];
        idom[root] = Some(root);
        let mut changed = true;
        while changed {
            changed = false;
            for &u in rpo.iter().skip(1) {
                let mut new_idom: Option<usize> = None;
                for &a in &ins[u] {
                    let p = net.arcs[a].from;
                    if idom[p].is_none() {
                        continue;
                    }
                    new_idom = Some(match new_idom {
                        None => p,
                        Some(cur) => intersect(&idom, &rpo_index, p, cur),
                    });
                }
                if new_idom.is_some() && idom[u] != new_idom {
                    idom[u] = new_idom;
                    changed = true;
                }
            }
        }
        // Pre/post numbering of the dominator tree answers `dominates` in O(1).
        let mut children = vec![Vec::new(); net.n];
        for &u in &rpo {
            if u != root {
                if let Some(p) = idom[u] {
                    children[p].push(u);
                }
            }
        }
        let mut pre = vec![usize::MAX; net.n];
        let mut post = vec![usize::MAX; net.n];
        let mut clock = 0;
        let mut stack = vec![(root, 0usize)];
        pre[root] = clock;
        clock += 1;
        while let Some((u, i)) = stack.pop() {
            if i < children[u].len() {
                stack.push((u, i + 1));
                let c = children[u][i];
                pre[c] = clock;
                clock += 1;
                stack.push((c, 0));
            } else {
                post[u] = clock;
                clock += 1;
            }
        }
        Dominators { idom, pre, post }
    }

    pub fn is_reachable(&self, u: usize) -> bool {
        self.idom[u].is_some()
    }

    /// `a` dominates `b` (reflexive). False if either is unreachable.
    pub fn dominates(&self, a: usize, b: usize) -> bool {
        self.is_reachable(a)
            && self.is_reachable(b)
            && self.pre[a] <= self.pre[b]
            && self.post[b] <= self.post[a]
    }
}

fn intersect(idom: &[Option<usize>], rpo_index: &[usize], mut a: usize, mut b: usize) -> usize {
    while a != b {
        while rpo_index[a] > rpo_index[b] {
            a = idom[a].expect("processed node has idom");
        }
        while rpo_index[b] > rpo_index[a] {
            b = idom[b].expect("processed node has idom");
        }
    }
    a
}

fn reverse_postorder(net: &Net, outs: &[Vec<usize>], root: usize) -> Vec<usize> {
    let mut seen = vec![false; net.n];
    let mut order = Vec::new();
    let mut stack = vec![(root, 0usize)];
    seen[root] = true;
    while let Some((u, i)) = stack.pop() {
        if i < outs[u].len() {
            stack.push((u, i + 1));
            let w = net.arcs[outs[u][i]].to;
            if !seen[w] {
                seen[w] = true;
                stack.push((w, 0));
            }
        } else {
            order.push(u);
        }
    }
    order.reverse();
    order
}

/// Arcs that close a cycle in a depth-first search from `root`, in
/// discovery order. In a reducible graph these are exactly the back edges.
pub(crate) fn retreating_arcs(net: &Net, root: usize) -> Vec<usize> {
    let outs = net.out_arcs();
    // 0 = unvisited, 1 = on stack, 2 = finished
    let mut state = vec![0u8; net.n];
    let mut found = Vec::new();
    let mut stack = vec![(root, 0usize)];
    state[root] = 1;
    while let Some((u, i)) = stack.pop() {
        if i < outs[u].len() {
            stack.push((u, i + 1));
            let a = outs[u][i];
            let w = net.arcs[a].to;
            match state[w] {
                0 => {
                    state[w] = 1;
                    stack.push((w, 0));
                }
                1 => found.push(a),
                _ => {}
            }
        } else {
            state[u] = 2;
        }
    }
    found
}

/// A natural loop: all back arcs into `header` merged.
#[derive(Clone, Debug)]
pub(crate) struct NaturalLoop {
    pub header: usize,
    pub body: Vec<bool>,
    pub back_arcs: Vec<usize>,
}

impl NaturalLoop {
    pub fn contains(&self, u: usize) -> bool {
        self.body[u]
    }

    pub fn size(&self) -> usize {
        self.body.iter().filter(|&&b| b).count()
    }

    /// Arcs with both endpoints inside the body, back arcs included.
    pub fn internal_arcs(&self, net: &Net) -> Vec<usize> {
        (0..net.arcs.len())
            .filter(|&a| self.body[net.arcs[a].from] && self.body[net.arcs[a].to])
            .collect()
    }
}

pub(crate) struct LoopAnalysis {
    /// Every natural loop, one per header, ordered by first back arc.
    pub loops: Vec<NaturalLoop>,
    /// Retreating arcs whose target does not dominate their source.
    pub irreducible: Vec<usize>,
}

impl LoopAnalysis {
    pub fn compute(net: &Net, root: usize) -> Self {
        let dom = Dominators::compute(net, root);
        let ins = net.in_arcs();
        let mut irreducible = Vec::new();
        let mut loops: Vec<NaturalLoop> = Vec::new();
        let mut back: Vec<usize> = Vec::new();
        for a in retreating_arcs(net, root) {
            let arc = &net.arcs[a];
            if dom.dominates(arc.to, arc.from) {
                back.push(a);
            } else {
                irreducible.push(a);
            }
        }
        // Back arcs that the DFS saw as non-retreating cannot exist in a
        // reducible graph; in an irreducible one the flaw is already recorded.
        back.sort_unstable();
        for a in back {
            let h = net.arcs[a].to;
            let idx = match loops.iter().position(|l| l.header == h) {
                Some(i) => i,
                None => {
                    let mut body = vec![false; net.n];
                    body[h] = true;
                    loops.push(NaturalLoop {
                        header: h,
                        body,
                        back_arcs: Vec::new(),
                    });
                    loops.len() - 1
                }
            };
            let lp = &mut loops[idx];
            lp.back_arcs.push(a);
            let mut stack = vec![net.arcs[a].from];
            while let Some(u) = stack.pop() {
                if lp.body[u] {
                    continue;
                }
                lp.body[u] = true;
                for &p in &ins[u] {
                    let src = net.arcs[p].from;
                    if !lp.body[src] && dom.is_reachable(src) {
                        stack.push(src);
                    }
                }
            }
        }
        LoopAnalysis { loops, irreducible }
    }

    /// Indices of loops not nested in any other loop.
    pub fn outermost(&self) -> Vec<usize> {
        (0..self.loops.len())
            .filter(|&i| {
                let h = self.loops[i].header;
                !self
                    .loops
                    .iter()
                    .enumerate()
                    .any(|(j, other)| j != i && other.contains(h))
            })
            .collect()
    }

    /// Loops directly nested inside loop `outer`.
    pub fn children(&self, outer: usize) -> Vec<usize> {
        let parent_of = |i: usize| -> Option<usize> {
            let h = self.loops[i].header;
            (0..self.loops.len())
                .filter(|&j| j != i && self.loops[j].contains(h))
                .min_by_key(|&j| self.loops[j].size())
        };
        (0..self.loops.len())
            .filter(|&i| i != outer && parent_of(i) == Some(outer))
            .collect()
    }
}

/// Articulation points of the undirected shadow (over `arcs`) that separate
/// `begin` from `end`, in path order, with both sentinels included.
pub(crate) fn separating_cut_vertices(
    net: &Net,
    arcs: &[usize],
    begin: usize,
    end: usize,
) -> Vec<usize> {
    // Local undirected adjacency keyed by arc so parallel edges are honoured.
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); net.n];
    for &a in arcs {
        let arc = &net.arcs[a];
        if arc.from == arc.to {
            continue;
        }
        adj[arc.from].push((arc.to, a));
        adj[arc.to].push((arc.from, a));
    }
    let mut disc = vec![usize::MAX; net.n];
    let mut low = vec![usize::MAX; net.n];
    let mut clock = 0usize;
    let mut separating = vec![false; net.n];
    // (node, parent arc, next neighbour index)
    let mut stack: Vec<(usize, usize, usize)> = vec![(begin, usize::MAX, 0)];
    disc[begin] = clock;
    low[begin] = clock;
    clock += 1;
    while let Some(&mut (u, parent_arc, ref mut i)) = stack.last_mut() {
        if *i < adj[u].len() {
            let (w, a) = adj[u][*i];
            *i += 1;
            if a == parent_arc {
                continue;
            }
            if disc[w] == usize::MAX {
                disc[w] = clock;
                low[w] = clock;
                clock += 1;
                stack.push((w, a, 0));
            } else {
                low[u] = low[u].min(disc[w]);
            }
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                low[p] = low[p].min(low[u]);
                // u's subtree holds exactly the discovery numbers [disc[u], clock).
                let end_below =
                    disc[end] != usize::MAX && disc[end] >= disc[u] && disc[end] < clock;
                if p != begin && low[u] >= disc[p] && end_below {
                    separating[p] = true;
                }
            }
        }
    }
    let mut cuts: Vec<usize> = (0..net.n).filter(|&u| separating[u] && u != end).collect();
    // Every begin-end path meets the cuts in the same order; the shortest
    // path from begin to each cut orders them.
    let order = topo_positions(net, arcs);
    cuts.sort_by_key(|&c| order[c]);
    let mut out = vec![begin];
    out.extend(cuts);
    out.push(end);
    out
}

/// Position of each node in a topological order of the sub-DAG `arcs`.
/// Nodes on a cycle or outside the subgraph get `usize::MAX`.
pub(crate) fn topo_positions(net: &Net, arcs: &[usize]) -> Vec<usize> {
    let mut indeg = vec![0usize; net.n];
    let mut present = vec![false; net.n];
    let mut outs = vec![Vec::new(); net.n];
    for &a in arcs {
        let arc = &net.arcs[a];
        indeg[arc.to] += 1;
        present[arc.from] = true;
        present[arc.to] = true;
        outs[arc.from].push(arc.to);
    }
    let mut pos = vec![usize::MAX; net.n];
    let mut stack: Vec<usize> = (0..net.n)
        .rev()
        .filter(|&u| present[u] && indeg[u] == 0)
        .collect();
    let mut k = 0;
    while let Some(u) = stack.pop() {
        pos[u] = k;
        k += 1;
        for &w in outs[u].iter().rev() {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                stack.push(w);
            }
        }
    }
    pos
}
