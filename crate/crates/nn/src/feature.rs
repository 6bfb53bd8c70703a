//! Feature maps flowing between layers: a row-major `rows x cols` array where
//! rows index sequence position and cols index channels. Vectors are feature
//! maps with a single row.

#[derive(Clone, Debug, PartialEq)]
pub struct Feature {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Feature {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Feature {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(rows * cols, data.len(), "feature shape/data mismatch");
        Feature { rows, cols, data }
    }

    pub fn row_vector(data: Vec<f64>) -> Self {
        Feature {
            rows: 1,
            cols: data.len(),
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    /// Reinterpret as a single row, preserving the data order.
    pub fn flattened(&self) -> Feature {
        Feature {
            rows: 1,
            cols: self.data.len(),
            data: self.data.clone(),
        }
    }
}
