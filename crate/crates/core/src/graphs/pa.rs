//! Growth with preferential attachment, weight `degree^power`.

use rand::Rng;

use super::bitmatrix::BitMatrix;
use super::fenwick::Fenwick;
use super::Graph;

/// Grows `core` to `m` nodes. Each new node links to `per_step` distinct
/// existing nodes drawn with probability proportional to `degree^power`.
pub(crate) fn grow<R: Rng + ?Sized>(
    core: Graph,
    m: usize,
    power: f64,
    per_step: usize,
    rng: &mut R,
) -> Graph {
    let start = core.num_nodes();
    let mut adj: Vec<Vec<u32>> = core.into_lists();
    adj.resize(m, Vec::new());
    let mut deg: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut weights = Fenwick::new(m);
    for (i, &d) in deg.iter().enumerate().take(start) {
        weights.set(i, (d as f64).powf(power));
    }

    // Nodes below the current step with non-zero degree.
    let mut positive = deg.iter().filter(|&&d| d > 0).count();
    let mut chosen: Vec<usize> = Vec::with_capacity(per_step);
    for t in start..m {
        chosen.clear();
        let want = per_step.min(t);
        while chosen.len() < want.min(positive) {
            let total = weights.total();
            let v = weights.find(rng.random::<f64>() * total);
            if v >= t || weights.weight(v) <= 0.0 {
                continue;
            }
            chosen.push(v);
            weights.set(v, 0.0);
        }
        // Not enough connected nodes yet: fill uniformly from the isolated ones.
        while chosen.len() < want {
            let v = rng.random_range(0..t);
            if !chosen.contains(&v) {
                chosen.push(v);
            }
        }
        for &v in &chosen {
            adj[v].push(t as u32);
            adj[t].push(v as u32);
            if deg[v] == 0 {
                positive += 1;
            }
            deg[v] += 1;
            weights.set(v, (deg[v] as f64).powf(power));
        }
        deg[t] = chosen.len();
        if deg[t] > 0 {
            positive += 1;
        }
        weights.set(t, (deg[t] as f64).powf(power));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    Graph::from_sorted_lists(adj)
}

pub(crate) fn clique(k: usize) -> Graph {
    let mut b = BitMatrix::new(k);
    for i in 0..k {
        for j in i + 1..k {
            b.insert(i, j);
        }
    }
    b.into_graph()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn edge_count_is_deterministic() {
        let mut rng = RngStream::new(3).rng();
        let g = grow(clique(5), 60, 1.4, 5, &mut rng);
        g.audit().unwrap();
        assert_eq!(g.num_nodes(), 60);
        assert_eq!(g.num_edges(), 10 + 55 * 5);
        assert!((5..60).all(|v| g.degree(v) >= 5));
    }

    #[test]
    fn isolated_core_falls_back_to_uniform() {
        let mut rng = RngStream::new(4).rng();
        let core = Graph::from_sorted_lists(vec![Vec::new(); 3]);
        let g = grow(core, 10, 1.0, 2, &mut rng);
        g.audit().unwrap();
        assert_eq!(g.num_edges(), 14);
    }

    #[test]
    fn superlinear_weights_make_hubs() {
        let mut rng = RngStream::new(5).rng();
        let g = grow(clique(10), 500, 1.4, 10, &mut rng);
        let max = (0..500).map(|v| g.degree(v)).max().unwrap();
        assert!(max > 200, "largest degree {max}");
    }
}
