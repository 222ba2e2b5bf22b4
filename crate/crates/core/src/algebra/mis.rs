//! Exact maximum independent set on the forbidden-product graph of Sigma.

use crate::construction::{gen_sigma, inner_sign_unchecked, SignVector};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

pub const MIS_CAP_N: usize = 12;
const WORDS: usize = 8;
pub const MAX_VERTICES: usize = WORDS * 64;

type Bits = [u64; WORDS];

fn set(b: &mut Bits, i: usize) {
    b[i / 64] |= 1 << (i % 64);
}

fn clear(b: &mut Bits, i: usize) {
    b[i / 64] &= !(1 << (i % 64));
}

fn and(x: &Bits, y: &Bits) -> Bits {
    std::array::from_fn(|w| x[w] & y[w])
}

fn and_not(x: &Bits, y: &Bits) -> Bits {
    std::array::from_fn(|w| x[w] & !y[w])
}

fn count(b: &Bits) -> usize {
    b.iter().map(|w| w.count_ones() as usize).sum()
}

fn first(b: &Bits) -> Option<usize> {
    b.iter().enumerate().find(|(_, w)| **w != 0).map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

fn members(b: &Bits) -> impl Iterator<Item = usize> + '_ {
    b.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            if w == 0 {
                return None;
            }
            let t = w.trailing_zeros() as usize;
            w &= w - 1;
            Some(i * 64 + t)
        })
    })
}

/// Simple undirected graph with bitset adjacency (at most 512 vertices).
#[derive(Clone, Debug)]
pub struct Graph {
    v: usize,
    adj: Vec<Bits>,
}

impl Graph {
    pub fn new(v: usize) -> Self {
        assert!(v <= MAX_VERTICES, "graph too large for bitset adjacency");
        Self { v, adj: vec![[0; WORDS]; v] }
    }

    pub fn vertices(&self) -> usize {
        self.v
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        if i != j {
            set(&mut self.adj[i], j);
            set(&mut self.adj[j], i);
        }
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i][j / 64] >> (j % 64) & 1 == 1
    }

    pub fn degree(&self, i: usize) -> usize {
        count(&self.adj[i])
    }

    pub fn edge_count(&self) -> usize {
        (0..self.v).map(|i| self.degree(i)).sum::<usize>() / 2
    }

    pub fn is_regular(&self) -> bool {
        (0..self.v).all(|i| self.degree(i) == self.degree(0))
    }

    fn all(&self) -> Bits {
        let mut b = [0; WORDS];
        for i in 0..self.v {
            set(&mut b, i);
        }
        b
    }
}

/// Vertices = Sigma, edges = pairs with inner product `forbidden`.
pub fn forbidden_graph(sigma: &[SignVector], forbidden: i64) -> Graph {
    let mut g = Graph::new(sigma.len());
    for i in 0..sigma.len() {
        for j in i + 1..sigma.len() {
            if inner_sign_unchecked(&sigma[i], &sigma[j]) == forbidden {
                g.add_edge(i, j);
            }
        }
    }
    g
}

/// alpha <= V (-l_min) / (l_max - l_min) for regular graphs with edges.
pub fn hoffman_bound(g: &Graph) -> Option<f64> {
    if g.v == 0 || g.edge_count() == 0 || !g.is_regular() {
        return None;
    }
    let m: DMatrix<f64> = DMatrix::from_fn(g.v, g.v, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let eig = SymmetricEigen::new(m).eigenvalues;
    let lmax: f64 = eig.max();
    let lmin = eig.min();
    Some(g.v as f64 * -lmin / (lmax - lmin))
}

/// Greedy clique cover size of `cand`: an upper bound on its independence number.
fn clique_cover(g: &Graph, cand: &Bits) -> usize {
    let mut rem = *cand;
    let mut cliques = 0;
    while let Some(u) = first(&rem) {
        clear(&mut rem, u);
        let mut common = and(&rem, &g.adj[u]);
        while let Some(w) = first(&common) {
            clear(&mut rem, w);
            clear(&mut common, w);
            common = and(&common, &g.adj[w]);
        }
        cliques += 1;
    }
    cliques
}

/// Repeatedly take a vertex of least remaining degree.
pub fn min_degree_greedy(g: &Graph) -> Vec<usize> {
    let mut rem = g.all();
    let mut out = Vec::new();
    while first(&rem).is_some() {
        let v = members(&rem).min_by_key(|&v| (count(&and(&g.adj[v], &rem)), v)).expect("nonempty");
        out.push(v);
        rem = and_not(&rem, &g.adj[v]);
        clear(&mut rem, v);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MisCertificate {
    /// Greedy incumbent meets a root upper bound.
    RootBound,
    /// Branch-and-bound exhausted the tree.
    BranchAndBound,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MisResult {
    pub size: usize,
    pub witness: Vec<usize>,
    pub root_bound: usize,
    pub hoffman: Option<f64>,
    pub certified_by: MisCertificate,
    pub nodes: u64,
}

#[derive(Clone, Copy, Debug)]
pub struct MisOptions {
    pub use_hoffman: bool,
    pub node_budget: u64,
}

impl Default for MisOptions {
    fn default() -> Self {
        Self { use_hoffman: true, node_budget: 50_000_000 }
    }
}

struct Search<'g> {
    g: &'g Graph,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Search<'_> {
    fn run(&mut self, cand: Bits, cur: &mut Vec<usize>) -> Result<()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(Error::SearchBudgetExhausted(self.budget));
        }
        if cur.len() + clique_cover(self.g, &cand) <= self.best.len() {
            return Ok(());
        }
        let pick = members(&cand)
            .map(|v| (count(&and(&self.g.adj[v], &cand)), v))
            .max_by_key(|&(d, v)| (d, std::cmp::Reverse(v)));
        let Some((deg, v)) = pick else {
            if cur.len() > self.best.len() {
                self.best = cur.clone();
            }
            return Ok(());
        };
        if deg == 0 {
            // all remaining vertices are isolated
            let n0 = cur.len();
            cur.extend(members(&cand));
            if cur.len() > self.best.len() {
                self.best = cur.clone();
            }
            cur.truncate(n0);
            return Ok(());
        }
        let mut without = cand;
        clear(&mut without, v);
        cur.push(v);
        self.run(and_not(&without, &self.g.adj[v]), cur)?;
        cur.pop();
        self.run(without, cur)
    }
}

pub fn max_independent_set(g: &Graph, opts: &MisOptions) -> Result<MisResult> {
    let all = g.all();
    let greedy = min_degree_greedy(g);
    let hoffman = if opts.use_hoffman { hoffman_bound(g) } else { None };
    let mut root_bound = clique_cover(g, &all).min(g.v);
    if let Some(h) = hoffman {
        root_bound = root_bound.min((h + 1e-7).floor() as usize);
    }
    if greedy.len() >= root_bound {
        return Ok(MisResult {
            size: greedy.len(),
            witness: greedy,
            root_bound,
            hoffman,
            certified_by: MisCertificate::RootBound,
            nodes: 0,
        });
    }
    let mut s = Search { g, best: greedy, nodes: 0, budget: opts.node_budget };
    s.run(all, &mut Vec::new())?;
    let mut witness = s.best;
    witness.sort_unstable();
    Ok(MisResult {
        size: witness.len(),
        witness,
        root_bound,
        hoffman,
        certified_by: MisCertificate::BranchAndBound,
        nodes: s.nodes,
    })
}

/// Largest Q in Sigma(n) with no pair at inner product `forbidden`.
pub fn max_avoiding_exact(n: usize, forbidden: i64) -> Result<MisResult> {
    max_avoiding_exact_with(n, forbidden, &MisOptions::default())
}

pub fn max_avoiding_exact_with(n: usize, forbidden: i64, opts: &MisOptions) -> Result<MisResult> {
    if n > MIS_CAP_N {
        return Err(Error::SearchInfeasible { n, cap: MIS_CAP_N });
    }
    let sigma = gen_sigma(n)?;
    max_independent_set(&forbidden_graph(&sigma, forbidden), opts)
}
