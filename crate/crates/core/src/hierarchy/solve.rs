//! Level equations on an indexed weighted digraph.
//!
//! Row `v` of the system is `s(v) = 0` when `v` has no in-edges, otherwise
//! `s(v) - Σ_u p(u,v) s(u) = 1` with `p(u,v) = w(u,v) / w_in(v)`. The matrix
//! is block lower-triangular over strongly connected components taken in
//! topological order. A block is singular exactly when it is a source
//! component without a pinned node (its in-weight is then fully internal and
//! its rows sum to zero); its null vector is constant on the block. Every
//! other block is an M-matrix and solvable for any upstream values.
//!
//! The solve walks blocks in order (closed form for plain singletons, LSQR
//! for cycles), then removes the null-space component so the result is the
//! minimum-norm least-squares solution.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::lsqr::{lsqr_refined, CsrMatrix};

pub(crate) struct LevelSolution {
    /// Minimum-norm least-squares levels, before any shift.
    pub raw: Vec<f64>,
    /// `||A s - b||` of `raw`.
    pub residual: f64,
}

struct System {
    n: usize,
    /// Incoming `(source, p)` per node.
    inbound: Vec<Vec<(usize, f64)>>,
    /// Incoming `(source, w)` per node, and their total.
    inbound_weights: Vec<Vec<(usize, f64)>>,
    in_weight: Vec<f64>,
    pinned: Vec<bool>,
    /// Blocks in topological order.
    blocks: Vec<Vec<usize>>,
    block_of: Vec<usize>,
    singular: Vec<bool>,
}

impl System {
    fn new(n: usize, edges: &[(usize, usize, f64)]) -> Self {
        let mut in_weight = vec![0.0; n];
        for &(_, d, w) in edges {
            in_weight[d] += w;
        }
        let mut inbound = vec![Vec::new(); n];
        let mut inbound_weights = vec![Vec::new(); n];
        for &(s, d, w) in edges {
            if w > 0.0 {
                inbound[d].push((s, w / in_weight[d]));
                inbound_weights[d].push((s, w));
            }
        }
        let pinned: Vec<bool> = in_weight.iter().map(|&w| w <= 0.0).collect();

        let mut g: DiGraph<(), ()> = DiGraph::with_capacity(n, edges.len());
        for _ in 0..n {
            g.add_node(());
        }
        for &(s, d, w) in edges {
            if w > 0.0 {
                g.add_edge(NodeIndex::new(s), NodeIndex::new(d), ());
            }
        }
        // tarjan_scc yields components in reverse topological order
        let mut blocks: Vec<Vec<usize>> = tarjan_scc(&g)
            .into_iter()
            .rev()
            .map(|c| {
                let mut b: Vec<usize> = c.into_iter().map(|i| i.index()).collect();
                b.sort_unstable();
                b
            })
            .collect();
        // tarjan order among unrelated components depends on traversal;
        // a stable topological order keeps results reproducible
        blocks = stable_topological(blocks, &inbound, n);

        let mut block_of = vec![0; n];
        for (bi, b) in blocks.iter().enumerate() {
            for &v in b {
                block_of[v] = bi;
            }
        }
        let singular = blocks
            .iter()
            .enumerate()
            .map(|(bi, b)| {
                b.iter().all(|&v| !pinned[v])
                    && b
                        .iter()
                        .all(|&v| inbound[v].iter().all(|&(u, _)| block_of[u] == bi))
            })
            .collect();
        System {
            n,
            inbound,
            inbound_weights,
            in_weight,
            pinned,
            blocks,
            block_of,
            singular,
        }
    }

    /// Forward substitution over blocks. Non-pinned rows use right-hand side
    /// `c`; singular blocks take `fixed(block)` when given, otherwise their
    /// own least-squares solution.
    fn substitute(&self, c: f64, fixed: Option<&dyn Fn(usize) -> f64>) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (bi, block) in self.blocks.iter().enumerate() {
            if self.singular[bi] {
                if let Some(f) = fixed {
                    let val = f(bi);
                    for &v in block {
                        x[v] = val;
                    }
                    continue;
                }
            }
            if block.len() == 1 {
                let v = block[0];
                if self.pinned[v] {
                    x[v] = 0.0;
                    continue;
                }
                let self_p: f64 = self.inbound[v]
                    .iter()
                    .filter(|&&(u, _)| u == v)
                    .map(|&(_, p)| p)
                    .sum();
                if self_p == 0.0 {
                    // dividing once keeps integer-weighted means of equal levels exact
                    let acc: f64 = self.inbound_weights[v].iter().map(|&(u, w)| w * x[u]).sum();
                    x[v] = c + acc / self.in_weight[v];
                    continue;
                }
            }
            self.solve_block(bi, c, &mut x);
        }
        x
    }

    fn solve_block(&self, bi: usize, c: f64, x: &mut [f64]) {
        let block = &self.blocks[bi];
        let local: std::collections::HashMap<usize, usize> =
            block.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut triplets = Vec::new();
        let mut rhs = vec![0.0; block.len()];
        for (i, &v) in block.iter().enumerate() {
            triplets.push((i, i, 1.0));
            if self.pinned[v] {
                continue;
            }
            rhs[i] = c;
            for &(u, p) in &self.inbound[v] {
                if self.block_of[u] == bi {
                    triplets.push((i, local[&u], -p));
                } else {
                    rhs[i] += p * x[u];
                }
            }
        }
        let a = CsrMatrix::from_triplets(block.len(), block.len(), &triplets);
        let sol = lsqr_refined(&a, &rhs, 3);
        for (i, &v) in block.iter().enumerate() {
            x[v] = sol[i];
        }
    }

    fn residual(&self, x: &[f64]) -> f64 {
        let mut sum = 0.0;
        for v in 0..self.n {
            let r = if self.pinned[v] {
                x[v]
            } else {
                let acc: f64 = self.inbound[v].iter().map(|&(u, p)| p * x[u]).sum();
                x[v] - acc - 1.0
            };
            sum += r * r;
        }
        sum.sqrt()
    }
}

/// Kahn's algorithm on the condensation, always releasing the ready block
/// with the smallest first member.
fn stable_topological(blocks: Vec<Vec<usize>>, inbound: &[Vec<(usize, f64)>], n: usize) -> Vec<Vec<usize>> {
    let mut block_of = vec![0; n];
    for (bi, b) in blocks.iter().enumerate() {
        for &v in b {
            block_of[v] = bi;
        }
    }
    let k = blocks.len();
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut indeg = vec![0usize; k];
    for v in 0..n {
        for &(u, _) in &inbound[v] {
            let (bu, bv) = (block_of[u], block_of[v]);
            if bu != bv {
                succ[bu].push(bv);
            }
        }
    }
    for s in succ.iter_mut() {
        s.sort_unstable();
        s.dedup();
    }
    for s in &succ {
        for &t in s {
            indeg[t] += 1;
        }
    }
    let mut ready: std::collections::BTreeSet<(usize, usize)> = (0..k)
        .filter(|&b| indeg[b] == 0)
        .map(|b| (blocks[b][0], b))
        .collect();
    let mut order = Vec::with_capacity(k);
    while let Some(&first) = ready.iter().next() {
        ready.remove(&first);
        let b = first.1;
        order.push(b);
        for &t in &succ[b] {
            indeg[t] -= 1;
            if indeg[t] == 0 {
                ready.insert((blocks[t][0], t));
            }
        }
    }
    let mut blocks: Vec<Option<Vec<usize>>> = blocks.into_iter().map(Some).collect();
    order.into_iter().map(|b| blocks[b].take().unwrap()).collect()
}

/// Cholesky solve of a small symmetric positive definite system.
fn spd_solve(g: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let k = rhs.len();
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let mut s = g[i][j];
            for (a, b) in l[i][..j].iter().zip(&l[j][..j]) {
                s -= a * b;
            }
            if i == j {
                l[i][i] = s.max(f64::MIN_POSITIVE).sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    let mut y = vec![0.0; k];
    for i in 0..k {
        let mut s = rhs[i];
        for p in 0..i {
            s -= l[i][p] * y[p];
        }
        y[i] = s / l[i][i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = y[i];
        for p in i + 1..k {
            s -= l[p][i] * x[p];
        }
        x[i] = s / l[i][i];
    }
    x
}

pub(crate) fn solve_levels(n: usize, edges: &[(usize, usize, f64)]) -> LevelSolution {
    if n == 0 {
        return LevelSolution {
            raw: Vec::new(),
            residual: 0.0,
        };
    }
    let sys = System::new(n, edges);
    let mut x = sys.substitute(1.0, None);

    let singular_blocks: Vec<usize> = (0..sys.blocks.len()).filter(|&b| sys.singular[b]).collect();
    if !singular_blocks.is_empty() {
        let basis: Vec<Vec<f64>> = singular_blocks
            .iter()
            .map(|&target| {
                let pick = move |b: usize| if b == target { 1.0 } else { 0.0 };
                sys.substitute(0.0, Some(&pick))
            })
            .collect();
        let k = basis.len();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>();
        let gram: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| dot(&basis[i], &basis[j])).collect())
            .collect();
        // two passes: the second mops up rounding left by the first
        for _ in 0..2 {
            let proj: Vec<f64> = basis.iter().map(|b| dot(b, &x)).collect();
            let coef = spd_solve(&gram, &proj);
            for (b, c) in basis.iter().zip(&coef) {
                for (xi, bi) in x.iter_mut().zip(b) {
                    *xi -= c * bi;
                }
            }
        }
    }
    let residual = sys.residual(&x);
    LevelSolution { raw: x, residual }
}
