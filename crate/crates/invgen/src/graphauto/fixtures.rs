use super::graph::Graph;
use super::perm::Permutation;

pub fn cycle_graph(n: usize) -> Graph {
    Graph::new(n, (1..=n).map(|i| (i, i % n + 1))).expect("cycle")
}

pub fn complete_graph(n: usize) -> Graph {
    Graph::new(n, (1..=n).flat_map(|u| (u + 1..=n).map(move |v| (u, v)))).expect("complete graph")
}

/// A 6-vertex graph whose only automorphism is the identity.
pub fn rigid_graph() -> Graph {
    Graph::new(6, [(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (2, 4)]).expect("rigid graph")
}

fn pairs() -> Vec<(usize, usize)> {
    (0..5).flat_map(|a| (a + 1..5).map(move |b| (a, b))).collect()
}

/// The Petersen graph as the Kneser graph on 2-subsets of a 5-set.
pub fn petersen_graph() -> Graph {
    let ps = pairs();
    let mut edges = Vec::new();
    for (i, a) in ps.iter().enumerate() {
        for (j, b) in ps.iter().enumerate().skip(i + 1) {
            if a.0 != b.0 && a.0 != b.1 && a.1 != b.0 && a.1 != b.1 {
                edges.push((i + 1, j + 1));
            }
        }
    }
    Graph::new(10, edges).expect("petersen")
}

/// All permutations of `{1..n}` in lexicographic order.
pub fn symmetric_group(n: usize) -> Vec<Permutation> {
    fn rec(n: usize, cur: &mut Vec<u16>, used: &mut [bool], out: &mut Vec<Permutation>) {
        if cur.len() == n {
            out.push(Permutation::from_zero_based(cur.clone()));
            return;
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                cur.push(v as u16);
                rec(n, cur, used, out);
                cur.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// The 2n symmetries of the n-cycle `1-2-…-n`.
pub fn dihedral_group(n: usize) -> Vec<Permutation> {
    let mut out = Vec::with_capacity(2 * n);
    for r in 0..n {
        out.push(Permutation::from_zero_based((0..n).map(|i| ((i + r) % n) as u16).collect()));
        out.push(Permutation::from_zero_based((0..n).map(|i| ((n + r - i) % n) as u16).collect()));
    }
    out.sort();
    out
}

/// Automorphisms of [`petersen_graph`]: the action of `S₅` on 2-subsets.
pub fn petersen_automorphisms() -> Vec<Permutation> {
    let ps = pairs();
    let index = |a: usize, b: usize| ps.iter().position(|&p| p == (a.min(b), a.max(b))).expect("pair");
    let mut out: Vec<Permutation> = symmetric_group(5)
        .iter()
        .map(|s| {
            let map = ps.iter().map(|&(a, b)| index(s.apply(a + 1) - 1, s.apply(b + 1) - 1) as u16).collect();
            Permutation::from_zero_based(map)
        })
        .collect();
    out.sort();
    out
}
