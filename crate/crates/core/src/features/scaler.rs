use serde::{Deserialize, Serialize};

/// Floor applied to stored standard deviations.
pub const MIN_STD: f64 = 1e-8;

/// Per-feature z-scoring fitted on training rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerModel {
    pub mean: Vec<f64>,
    /// Population standard deviation, floored at [`MIN_STD`].
    pub std: Vec<f64>,
}

impl ScalerModel {
    /// Fit on row-major data. An empty row set gives an empty scaler of
    /// width `width`.
    pub fn fit(rows: &[Vec<f64>], width: usize) -> Self {
        let n = rows.len() as f64;
        let mut mean = vec![0.0; width];
        let mut std = vec![MIN_STD; width];
        if rows.is_empty() {
            return ScalerModel { mean, std };
        }
        for row in rows {
            for (m, x) in mean.iter_mut().zip(row) {
                *m += x;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut var = vec![0.0; width];
        for row in rows {
            for ((v, x), m) in var.iter_mut().zip(row).zip(&mean) {
                *v += (x - m) * (x - m);
            }
        }
        for (s, v) in std.iter_mut().zip(var) {
            *s = (v / n).sqrt().max(MIN_STD);
        }
        ScalerModel { mean, std }
    }

    pub fn width(&self) -> usize {
        self.mean.len()
    }

    /// True when the feature had no spread in training.
    pub fn is_constant(&self, index: usize) -> bool {
        self.std[index] <= MIN_STD
    }

    /// Z-score in place. Features that were constant in training carry no
    /// information and map to 0.
    pub fn transform_in_place(&self, row: &mut [f64]) {
        for (i, x) in row.iter_mut().enumerate() {
            *x = if self.is_constant(i) {
                0.0
            } else {
                (*x - self.mean[i]) / self.std[i]
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standardizes_training_rows() {
        let rows = vec![
            vec![1.0, 5.0, 3.0],
            vec![2.0, 5.0, -1.0],
            vec![6.0, 5.0, 0.5],
        ];
        let scaler = ScalerModel::fit(&rows, 3);
        assert!(scaler.is_constant(1));
        assert_eq!(scaler.std[1], MIN_STD);
        let scaled: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| {
                let mut r = r.clone();
                scaler.transform_in_place(&mut r);
                r
            })
            .collect();
        for j in [0, 2] {
            let mean: f64 = scaled.iter().map(|r| r[j]).sum::<f64>() / 3.0;
            let var: f64 = scaled.iter().map(|r| (r[j] - mean).powi(2)).sum::<f64>() / 3.0;
            assert!(mean.abs() < 1e-9);
            assert!((var.sqrt() - 1.0).abs() < 1e-6);
        }
        assert!(scaled.iter().all(|r| r[1] == 0.0));

        let mut unseen = vec![0.0, 9.0, 0.0];
        scaler.transform_in_place(&mut unseen);
        assert_eq!(unseen[1], 0.0);
    }
}
