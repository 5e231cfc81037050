//! Louvain community detection on undirected weighted graphs.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Passes stop once modularity improves by less than this.
pub const MIN_GAIN: f64 = 1e-9;
/// Kernighan-Lin refinement is quadratic; larger graphs skip it.
pub const KL_MAX_NODES: usize = 2000;
/// Independent runs per call; the best partition wins.
pub const DEFAULT_RESTARTS: u64 = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityAssignment {
    /// Community of each node. Ids are dense and numbered by smallest member.
    pub communities: Vec<usize>,
    pub modularity: f64,
    /// Modularity after each aggregation level.
    pub levels: Vec<f64>,
}

impl CommunityAssignment {
    pub fn community_count(&self) -> usize {
        self.communities.iter().max().map_or(0, |m| m + 1)
    }

    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.community_count()];
        for (node, &c) in self.communities.iter().enumerate() {
            out[c].push(node);
        }
        out
    }
}

/// Symmetric weighted adjacency. `adj[i]` holds `(j, A_ij)`; a self-loop
/// stores `A_ii`, which after aggregation is twice the internal weight.
#[derive(Debug, Clone)]
struct Graph {
    adj: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    total: f64,
}

impl Graph {
    fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); n];
        for &(a, b, w) in edges {
            if a == b {
                *maps[a].entry(a).or_default() += 2.0 * w;
            } else {
                *maps[a].entry(b).or_default() += w;
                *maps[b].entry(a).or_default() += w;
            }
        }
        Self::from_maps(maps)
    }

    fn from_maps(maps: Vec<BTreeMap<usize, f64>>) -> Self {
        let adj: Vec<Vec<(usize, f64)>> =
            maps.into_iter().map(|m| m.into_iter().collect()).collect();
        let degree: Vec<f64> = adj
            .iter()
            .map(|row| row.iter().map(|(_, w)| w).sum())
            .collect();
        let total = degree.iter().sum();
        Graph { adj, degree, total }
    }

    fn len(&self) -> usize {
        self.adj.len()
    }

    fn modularity(&self, community: &[usize]) -> f64 {
        if self.total == 0.0 {
            return 0.0;
        }
        let k = community.iter().max().map_or(0, |m| m + 1);
        let mut inside = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for i in 0..self.len() {
            tot[community[i]] += self.degree[i];
            for &(j, w) in &self.adj[i] {
                if community[i] == community[j] {
                    inside[community[i]] += w;
                }
            }
        }
        let m2 = self.total;
        inside
            .iter()
            .zip(&tot)
            .map(|(i, t)| i / m2 - (t / m2) * (t / m2))
            .sum()
    }

    /// Moves single nodes while that raises modularity. Returns whether
    /// anything moved; `community` is left dense.
    fn local_moving(&self, community: &mut [usize], rng: &mut ChaCha8Rng) -> bool {
        let n = self.len();
        let m2 = self.total;
        let mut tot = vec![0.0; n];
        for i in 0..n {
            tot[community[i]] += self.degree[i];
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut moved_any = false;
        let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
        loop {
            let mut moved = false;
            for &i in &order {
                let own = community[i];
                let ki = self.degree[i];
                weights.clear();
                weights.insert(own, 0.0);
                for &(j, w) in &self.adj[i] {
                    if j != i {
                        *weights.entry(community[j]).or_default() += w;
                    }
                }
                tot[own] -= ki;
                let gain = |c: usize, k_ic: f64| k_ic - tot[c] * ki / m2;
                let mut best = own;
                let mut best_gain = gain(own, weights[&own]);
                for (&c, &k_ic) in &weights {
                    let g = gain(c, k_ic);
                    if g > best_gain + 1e-12 {
                        best = c;
                        best_gain = g;
                    }
                }
                tot[best] += ki;
                if best != own {
                    community[i] = best;
                    moved = true;
                    moved_any = true;
                }
            }
            if !moved {
                break;
            }
        }
        renumber(community);
        moved_any
    }

    /// Kernighan-Lin style refinement: repeatedly applies the best single
    /// move of a not-yet-moved node (possibly a losing one, possibly into a
    /// new community) and keeps the best partition seen along the way.
    /// Returns whether modularity improved by at least [`MIN_GAIN`].
    fn kernighan_lin(&self, community: &mut Vec<usize>) -> bool {
        let n = self.len();
        let m2 = self.total;
        let mut cur = community.clone();
        let mut tot = vec![0.0; n];
        let mut size = vec![0usize; n];
        for i in 0..n {
            tot[cur[i]] += self.degree[i];
            size[cur[i]] += 1;
        }
        let start = self.modularity(&cur);
        let (mut q, mut best_q) = (start, start);
        let mut best = cur.clone();
        let mut moved = vec![false; n];
        let mut weights: BTreeMap<usize, f64> = BTreeMap::new();
        for _ in 0..n {
            let empty = size.iter().position(|&s| s == 0);
            let mut choice: Option<(f64, usize, usize)> = None;
            for i in (0..n).filter(|&i| !moved[i]) {
                let own = cur[i];
                let ki = self.degree[i];
                weights.clear();
                for &(j, w) in &self.adj[i] {
                    if j != i {
                        *weights.entry(cur[j]).or_default() += w;
                    }
                }
                let k_own = weights.get(&own).copied().unwrap_or(0.0);
                let targets = weights
                    .iter()
                    .map(|(&c, &w)| (c, w))
                    .filter(|&(c, _)| c != own);
                let fresh = empty.filter(|_| size[own] > 1).map(|c| (c, 0.0));
                for (c, k_c) in targets.chain(fresh) {
                    let delta = 2.0 / m2 * (k_c - k_own - ki * (tot[c] - tot[own] + ki) / m2);
                    if choice.is_none_or(|(d, _, _)| delta > d + 1e-15) {
                        choice = Some((delta, i, c));
                    }
                }
            }
            let Some((delta, i, c)) = choice else { break };
            let own = cur[i];
            tot[own] -= self.degree[i];
            size[own] -= 1;
            tot[c] += self.degree[i];
            size[c] += 1;
            cur[i] = c;
            moved[i] = true;
            q += delta;
            if q > best_q + 1e-12 {
                best_q = q;
                best.clone_from(&cur);
            }
        }
        if self.modularity(&best) - start < MIN_GAIN {
            return false;
        }
        renumber(&mut best);
        *community = best;
        true
    }

    fn aggregate(&self, community: &[usize]) -> Graph {
        let k = community.iter().max().map_or(0, |m| m + 1);
        let mut maps: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); k];
        for i in 0..self.len() {
            for &(j, w) in &self.adj[i] {
                *maps[community[i]].entry(community[j]).or_default() += w;
            }
        }
        Graph::from_maps(maps)
    }
}

/// Relabels communities 0.. in order of their smallest member.
fn renumber(community: &mut [usize]) {
    let mut map = BTreeMap::new();
    for c in community.iter_mut() {
        let next = map.len();
        *c = *map.entry(*c).or_insert(next);
    }
}

/// Modularity of a partition of an undirected weighted graph, with 2m the
/// sum of all weights counted in both directions.
pub fn modularity(n: usize, edges: &[(usize, usize, f64)], community: &[usize]) -> f64 {
    let mut dense = community.to_vec();
    renumber(&mut dense);
    Graph::from_edges(n, edges).modularity(&dense)
}

/// Two-phase Louvain (local moving, then aggregation, until modularity gains
/// less than [`MIN_GAIN`]), followed by node moving and, up to
/// [`KL_MAX_NODES`] nodes, Kernighan-Lin refinement on the original graph.
/// A refinement that helps restarts the aggregation from the refined
/// partition. Node visiting order is shuffled from `seed`; isolated nodes
/// stay in singleton communities.
pub fn louvain(n: usize, edges: &[(usize, usize, f64)], seed: u64) -> CommunityAssignment {
    louvain_with_restarts(n, edges, seed, DEFAULT_RESTARTS)
}

/// Runs [`louvain`] `restarts` times with visiting orders drawn from
/// `seed`, `seed + 1`, … and keeps the highest modularity (earliest run on
/// ties).
pub fn louvain_with_restarts(
    n: usize,
    edges: &[(usize, usize, f64)],
    seed: u64,
    restarts: u64,
) -> CommunityAssignment {
    let original = Graph::from_edges(n, edges);
    let mut best: Option<CommunityAssignment> = None;
    for r in 0..restarts.max(1) {
        let run = single_run(&original, seed.wrapping_add(r));
        if best
            .as_ref()
            .is_none_or(|b| run.modularity > b.modularity + 1e-12)
        {
            best = Some(run);
        }
    }
    best.expect("at least one run")
}

fn single_run(original: &Graph, seed: u64) -> CommunityAssignment {
    let n = original.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment: Vec<usize> = (0..n).collect();
    let mut modularity = original.modularity(&assignment);
    let mut levels = Vec::new();
    if original.total == 0.0 {
        return CommunityAssignment {
            communities: assignment,
            modularity,
            levels,
        };
    }

    loop {
        let mut graph = original.aggregate(&assignment);
        loop {
            let mut level: Vec<usize> = (0..graph.len()).collect();
            if !graph.local_moving(&mut level, &mut rng) {
                break;
            }
            let candidate: Vec<usize> = assignment.iter().map(|&c| level[c]).collect();
            let q = original.modularity(&candidate);
            if q - modularity < MIN_GAIN {
                break;
            }
            assignment = candidate;
            modularity = q;
            levels.push(q);
            graph = graph.aggregate(&level);
        }
        // Refinement on the original nodes once the hierarchy has settled.
        let mut refined = assignment.clone();
        original.local_moving(&mut refined, &mut rng);
        if n <= KL_MAX_NODES {
            original.kernighan_lin(&mut refined);
        }
        let q = original.modularity(&refined);
        if q - modularity < MIN_GAIN {
            break;
        }
        assignment = refined;
        modularity = q;
        levels.push(q);
    }
    renumber(&mut assignment);
    CommunityAssignment {
        communities: assignment,
        modularity,
        levels,
    }
}
