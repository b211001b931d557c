//! Dense symmetric adjacency bitmap used while a graph is being built.

use super::Graph;

#[derive(Debug, Clone)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words = n.div_ceil(64);
        BitMatrix { n, words, bits: vec![0; n * words] }
    }

    #[inline]
    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    fn flip(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] ^= 1 << (j % 64);
        self.bits[j * self.words + i / 64] ^= 1 << (i % 64);
    }

    /// Adds the edge `{i, j}`; returns false if it was already present.
    #[inline]
    pub fn insert(&mut self, i: usize, j: usize) -> bool {
        debug_assert_ne!(i, j);
        if self.get(i, j) {
            return false;
        }
        self.flip(i, j);
        true
    }

    #[inline]
    pub fn remove(&mut self, i: usize, j: usize) -> bool {
        if !self.get(i, j) {
            return false;
        }
        self.flip(i, j);
        true
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        debug_assert_ne!(i, j);
        self.flip(i, j);
    }

    /// Number of common neighbours of `i` and `j`.
    #[inline]
    pub fn common(&self, i: usize, j: usize) -> u32 {
        self.row(i).iter().zip(self.row(j)).map(|(a, b)| (a & b).count_ones()).sum()
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.row(i).iter().map(|w| w.count_ones()).sum()
    }

    pub fn into_graph(self) -> Graph {
        let adj = (0..self.n)
            .map(|i| {
                let mut list = Vec::with_capacity(self.degree(i) as usize);
                for (w, &word) in self.row(i).iter().enumerate() {
                    let mut bits = word;
                    while bits != 0 {
                        let b = bits.trailing_zeros() as usize;
                        list.push((w * 64 + b) as u32);
                        bits &= bits - 1;
                    }
                }
                list
            })
            .collect();
        Graph::from_sorted_lists(adj)
    }
}
