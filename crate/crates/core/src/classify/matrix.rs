use crate::features::FeatureVector;

/// Row-compressed sparse matrix; explicit zeros are dropped.
#[derive(Debug, Clone)]
pub(crate) struct Csr {
    indptr: Vec<usize>,
    indices: Vec<u32>,
    values: Vec<f64>,
    dim: usize,
}

impl Csr {
    pub fn from_vectors<'a>(xs: impl IntoIterator<Item = &'a FeatureVector>, dim: usize) -> Self {
        let mut indptr = vec![0];
        let mut indices = Vec::new();
        let mut values = Vec::new();
        for x in xs {
            for (c, v) in x.entries() {
                if v != 0.0 {
                    indices.push(c as u32);
                    values.push(v);
                }
            }
            indptr.push(indices.len());
        }
        Csr {
            indptr,
            indices,
            values,
            dim,
        }
    }

    pub fn rows(&self) -> usize {
        self.indptr.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> (&[u32], &[f64]) {
        let r = self.indptr[i]..self.indptr[i + 1];
        (&self.indices[r.clone()], &self.values[r])
    }

    pub fn dot_row(&self, i: usize, w: &[f64]) -> f64 {
        let (idx, val) = self.row(i);
        idx.iter().zip(val).map(|(&c, v)| w[c as usize] * v).sum()
    }

    /// `out += alpha * row_i`
    pub fn axpy_row(&self, i: usize, alpha: f64, out: &mut [f64]) {
        let (idx, val) = self.row(i);
        for (&c, v) in idx.iter().zip(val) {
            out[c as usize] += alpha * v;
        }
    }
}
