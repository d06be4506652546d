use ndarray::Array2;
use rand::Rng;

/// Connectivity pattern between a presynaptic population of `n_pre` and a
/// postsynaptic population of `n_post` neurons, stored row-compressed by
/// presynaptic neuron. Synapse indices follow row-major order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    n_pre: usize,
    n_post: usize,
    row_ptr: Vec<usize>,
    cols: Vec<u32>,
}

impl Mask {
    pub fn from_fn(n_pre: usize, n_post: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut row_ptr = Vec::with_capacity(n_pre + 1);
        let mut cols = Vec::new();
        row_ptr.push(0);
        for i in 0..n_pre {
            cols.extend((0..n_post).filter(|&j| f(i, j)).map(|j| j as u32));
            row_ptr.push(cols.len());
        }
        Self { n_pre, n_post, row_ptr, cols }
    }

    pub fn full(n_pre: usize, n_post: usize) -> Self {
        Self::from_fn(n_pre, n_post, |_, _| true)
    }

    pub fn one_to_one(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i == j)
    }

    /// All pairs except `i == j`; used for recurrent inhibition.
    pub fn all_but_self(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| i != j)
    }

    /// Each pair is connected independently with probability `p`.
    pub fn bernoulli<R: Rng + ?Sized>(n_pre: usize, n_post: usize, p: f64, rng: &mut R) -> Self {
        let p = p.clamp(0.0, 1.0);
        Self::from_fn(n_pre, n_post, |_, _| rng.random::<f64>() < p)
    }

    pub fn from_dense(m: &Array2<bool>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[[i, j]])
    }

    pub fn to_dense(&self) -> Array2<bool> {
        let mut out = Array2::from_elem((self.n_pre, self.n_post), false);
        for i in 0..self.n_pre {
            for &j in self.row(i) {
                out[[i, j as usize]] = true;
            }
        }
        out
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.n_pre, self.n_post)
    }

    pub fn n_synapses(&self) -> usize {
        self.cols.len()
    }

    /// Postsynaptic targets of presynaptic neuron `i`.
    pub fn row(&self, i: usize) -> &[u32] {
        &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]]
    }

    /// Synapse index range of presynaptic neuron `i`.
    pub fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    pub fn synapse_index(&self, i: usize, j: usize) -> Option<usize> {
        let row = self.row(i);
        row.binary_search(&(j as u32)).ok().map(|k| self.row_ptr[i] + k)
    }

    pub(crate) fn cols(&self) -> &[u32] {
        &self.cols
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn dense_roundtrip() {
        let m = Mask::from_fn(3, 4, |i, j| (i + j) % 2 == 0);
        assert_eq!(m.n_synapses(), 6);
        assert_eq!(Mask::from_dense(&m.to_dense()), m);
        assert_eq!(m.row(1), &[1, 3]);
        assert_eq!(m.synapse_index(1, 3), Some(3));
        assert_eq!(m.synapse_index(1, 2), None);
    }

    #[test]
    fn generators() {
        assert_eq!(Mask::full(3, 5).n_synapses(), 15);
        assert_eq!(Mask::one_to_one(4).n_synapses(), 4);
        assert_eq!(Mask::all_but_self(4).n_synapses(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let b = Mask::bernoulli(100, 100, 0.1, &mut rng);
        assert!((700..1300).contains(&b.n_synapses()));
    }
}
