use std::collections::BTreeSet;

use super::perm::Permutation;
use crate::error::{Error, Result};

/// Largest vertex count [`brute_force_automorphisms`] accepts.
pub const BRUTE_FORCE_CAP: usize = 10;

/// A simple undirected graph on vertices `1..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
    adj: Vec<u64>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        if n > 64 {
            return Err(Error::Capacity(format!("graphs are limited to 64 vertices, got {n}")));
        }
        let mut g = Graph { n, edges: BTreeSet::new(), adj: vec![0; n] };
        for (u, v) in edges {
            if u == v {
                return Err(Error::invalid(format!("self-loop at vertex {u}")));
            }
            if u == 0 || v == 0 || u > n || v > n {
                return Err(Error::invalid(format!("edge ({u},{v}) outside 1..={n}")));
            }
            g.edges.insert((u.min(v), u.max(v)));
            g.adj[u - 1] |= 1 << (v - 1);
            g.adj[v - 1] |= 1 << (u - 1);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        (self.adj[u - 1] >> (v - 1)) & 1 == 1
    }

    pub fn is_automorphism(&self, p: &Permutation) -> bool {
        p.len() == self.n && self.edges.iter().all(|&(u, v)| self.adjacent(p.apply(u), p.apply(v)))
    }

    /// The file format: `n` on the first line, then one `u v` edge per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for (u, v) in &self.edges {
            s.push_str(&format!("{u} {v}\n"));
        }
        s
    }
}

/// Parses the graph file format; blank lines and `#` comments are skipped.
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (ln, first) = lines.next().ok_or_else(|| Error::invalid("empty graph file"))?;
    let n: usize = first.parse().map_err(|_| Error::invalid(format!("line {ln}: expected vertex count")))?;
    let mut edges = Vec::new();
    for (ln, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        let parse = |s: &str| s.parse::<usize>().map_err(|_| Error::invalid(format!("line {ln}: bad vertex {s:?}")));
        match parts.as_slice() {
            [u, v] => edges.push((parse(u)?, parse(v)?)),
            _ => return Err(Error::invalid(format!("line {ln}: expected two vertices"))),
        }
    }
    Graph::new(n, edges).map_err(|e| match e {
        Error::InvalidInput(m) => Error::invalid(format!("graph file: {m}")),
        e => e,
    })
}

/// Every adjacency-preserving permutation, by depth-first search over
/// partial assignments that prunes as soon as an assigned pair disagrees.
pub fn brute_force_automorphisms(g: &Graph) -> Result<Vec<Permutation>> {
    if g.n > BRUTE_FORCE_CAP {
        return Err(Error::Capacity(format!("brute force is limited to {BRUTE_FORCE_CAP} vertices, got {}", g.n)));
    }
    fn extend(g: &Graph, image: &mut Vec<u16>, used: &mut [bool], out: &mut Vec<Permutation>) {
        let i = image.len();
        if i == g.n {
            out.push(Permutation::from_zero_based(image.clone()));
            return;
        }
        for c in 0..g.n {
            if used[c] {
                continue;
            }
            let consistent =
                (0..i).all(|j| g.adjacent(i + 1, j + 1) == g.adjacent(c + 1, image[j] as usize + 1));
            if consistent {
                used[c] = true;
                image.push(c as u16);
                extend(g, image, used, out);
                image.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    extend(g, &mut Vec::with_capacity(g.n), &mut vec![false; g.n], &mut out);
    Ok(out)
}
