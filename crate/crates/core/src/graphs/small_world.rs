//! Watts–Strogatz rewiring of a ring lattice.

use rand::Rng;

use super::bitmatrix::BitMatrix;
use super::Graph;

/// Ring lattice with `nei` neighbours on each side; every lattice edge
/// `(i, i + k)` is rewired to a uniformly chosen new endpoint with
/// probability `p_rewire`, avoiding self-loops and duplicates.
pub(crate) fn watts_strogatz<R: Rng + ?Sized>(m: usize, nei: usize, p_rewire: f64, rng: &mut R) -> Graph {
    let mut adj = BitMatrix::new(m);
    let mut degree = vec![0usize; m];
    for i in 0..m {
        for k in 1..=nei {
            adj.insert(i, (i + k) % m);
        }
    }
    for d in degree.iter_mut() {
        *d = 2 * nei;
    }
    for k in 1..=nei {
        for i in 0..m {
            let j = (i + k) % m;
            if !adj.get(i, j) || rng.random::<f64>() >= p_rewire {
                continue;
            }
            if degree[i] >= m - 1 {
                continue;
            }
            let w = loop {
                let w = rng.random_range(0..m);
                if w != i && !adj.get(i, w) {
                    break w;
                }
            };
            adj.remove(i, j);
            adj.insert(i, w);
            degree[j] -= 1;
            degree[w] += 1;
        }
    }
    adj.into_graph()
}
