//! Fenwick tree over non-negative weights, for sampling proportional to weight.

#[derive(Debug, Clone)]
pub(crate) struct Fenwick {
    tree: Vec<f64>,
    weights: Vec<f64>,
}

impl Fenwick {
    pub fn new(n: usize) -> Self {
        Fenwick { tree: vec![0.0; n + 1], weights: vec![0.0; n] }
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn set(&mut self, i: usize, w: f64) {
        let delta = w - self.weights[i];
        self.weights[i] = w;
        let mut k = i + 1;
        while k < self.tree.len() {
            self.tree[k] += delta;
            k += k & k.wrapping_neg();
        }
    }

    pub fn total(&self) -> f64 {
        let mut k = self.tree.len() - 1;
        let mut s = 0.0;
        while k > 0 {
            s += self.tree[k];
            k &= k - 1;
        }
        s
    }

    /// Index whose cumulative weight interval contains `target`.
    pub fn find(&self, mut target: f64) -> usize {
        let n = self.tree.len() - 1;
        let mut pos = 0;
        let mut step = n.next_power_of_two();
        while step > 0 {
            let next = pos + step;
            if next <= n && self.tree[next] <= target {
                pos = next;
                target -= self.tree[next];
            }
            step >>= 1;
        }
        pos.min(n - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn locates_intervals() {
        let mut f = Fenwick::new(5);
        for (i, w) in [1.0, 0.0, 2.0, 3.0, 0.5].into_iter().enumerate() {
            f.set(i, w);
        }
        assert_eq!(f.total(), 6.5);
        assert_eq!(f.find(0.0), 0);
        assert_eq!(f.find(0.99), 0);
        assert_eq!(f.find(1.0), 2);
        assert_eq!(f.find(2.99), 2);
        assert_eq!(f.find(3.0), 3);
        assert_eq!(f.find(6.2), 4);
        f.set(3, 0.0);
        assert_eq!(f.find(3.0), 4);
    }
}
