//! Erdős–Rényi and stochastic block models by geometric skipping.
//!
//! Nodes are laid out in contiguous blocks. For each row `i` the candidate
//! partners `j > i` inside a block are visited by jumping over runs of
//! non-edges whose lengths are geometric, so the cost is proportional to
//! the number of edges rather than the number of pairs.

use rand::Rng;

use super::Graph;

/// Block sizes for `m` nodes by largest remainder; sizes sum to `m`.
pub(crate) fn block_sizes(fractions: &[f64], m: usize) -> Vec<usize> {
    let total: f64 = fractions.iter().sum();
    let exact: Vec<f64> = fractions.iter().map(|f| f / total * m as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor() as usize).collect();
    let mut left = m - sizes.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..sizes.len()).collect();
    // Stable: ties keep block order.
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.partial_cmp(&ra).unwrap_or(std::cmp::Ordering::Equal)
    });
    for &b in order.iter().cycle() {
        if left == 0 {
            break;
        }
        sizes[b] += 1;
        left -= 1;
    }
    sizes
}

pub(crate) fn stochastic_block<R: Rng + ?Sized>(
    sizes: &[usize],
    probs: &[Vec<f64>],
    rng: &mut R,
) -> Graph {
    let m: usize = sizes.iter().sum();
    let mut starts = Vec::with_capacity(sizes.len() + 1);
    starts.push(0);
    for s in sizes {
        starts.push(starts.last().unwrap() + s);
    }
    let block_of = |i: usize| starts.partition_point(|&s| s <= i) - 1;

    let mut adj: Vec<Vec<u32>> = vec![Vec::new(); m];
    for i in 0..m {
        let row = &probs[block_of(i)];
        let mut b = 0;
        while b < row.len() {
            // Neighbouring blocks with the same probability form one run, so a
            // constant matrix draws exactly like a single block.
            let p = &row[b];
            let mut end = b + 1;
            while end < row.len() && row[end] == *p {
                end += 1;
            }
            let (lo, hi) = (starts[b].max(i + 1), starts[end]);
            b = end;
            if lo >= hi || *p <= 0.0 {
                continue;
            }
            if *p >= 1.0 {
                for j in lo..hi {
                    adj[i].push(j as u32);
                    adj[j].push(i as u32);
                }
                continue;
            }
            let log_q = (1.0 - p).ln();
            let mut j = lo;
            loop {
                let u: f64 = 1.0 - rng.random::<f64>();
                let skip = (u.ln() / log_q).floor();
                if skip >= (hi - j) as f64 {
                    break;
                }
                j += skip as usize;
                adj[i].push(j as u32);
                adj[j].push(i as u32);
                j += 1;
                if j >= hi {
                    break;
                }
            }
        }
    }
    // Rows fill in ascending order: smaller partners arrive while their own
    // row is processed, larger ones while row i is.
    Graph::from_sorted_lists(adj)
}

pub(crate) fn erdos_renyi<R: Rng + ?Sized>(m: usize, p: f64, rng: &mut R) -> Graph {
    stochastic_block(&[m], &[vec![p]], rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn sizes_sum_to_total() {
        assert_eq!(block_sizes(&[1.0, 1.0, 1.0], 999), vec![333, 333, 333]);
        assert_eq!(block_sizes(&[1.0, 1.0, 1.0], 1000), vec![334, 333, 333]);
        assert_eq!(block_sizes(&[0.5, 0.5], 7), vec![4, 3]);
        assert_eq!(block_sizes(&[0.2, 0.8], 10), vec![2, 8]);
    }

    #[test]
    fn constant_matrix_matches_single_block() {
        let a = stochastic_block(&[40, 60], &[vec![0.2, 0.2], vec![0.2, 0.2]], &mut RngStream::new(7).rng());
        let b = erdos_renyi(100, 0.2, &mut RngStream::new(7).rng());
        assert_eq!(a, b);
    }

    #[test]
    fn extreme_probabilities() {
        let mut rng = RngStream::new(1).rng();
        assert_eq!(erdos_renyi(30, 0.0, &mut rng).num_edges(), 0);
        assert_eq!(erdos_renyi(30, 1.0, &mut rng).num_edges(), 435);
        let g = stochastic_block(&[5, 5], &[vec![1.0, 0.0], vec![0.0, 1.0]], &mut rng);
        assert_eq!(g.num_edges(), 20);
        assert!(g.audit().is_ok());
    }

    #[test]
    fn er_edge_count() {
        let mut rng = RngStream::new(2).rng();
        let g = erdos_renyi(400, 0.05, &mut rng);
        g.audit().unwrap();
        let pairs = 400.0 * 399.0 / 2.0;
        let sd = (pairs * 0.05 * 0.95f64).sqrt();
        assert!((g.num_edges() as f64 - pairs * 0.05).abs() < 4.0 * sd);
    }
}
