//! Snapshot data model: dense n-way arrays, the snapshot matrix/tensor pair
//! and the gap mask used to flag corrupted entries.
//!
//! Layout convention, fixed across the whole toolkit: tensors are stored
//! row-major with axes ordered `(component, spatial axes in declared order,
//! time)`. Flattening the leading axes into a single space index `j` therefore
//! never moves a value in memory, so matrix/tensor reshapes are bit-exact.

use nalgebra::DMatrix;

use crate::{CoreError, Result};

/// Dense real n-way array, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct NdArray {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl NdArray {
    pub fn zeros(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        NdArray {
            shape,
            data: vec![0.0; len],
        }
    }

    pub fn from_vec(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(CoreError::ShapeMismatch(format!(
                "shape {:?} needs {} entries, got {}",
                shape,
                len,
                data.len()
            )));
        }
        Ok(NdArray { shape, data })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn order(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    /// Row-major strides of the current shape.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1usize; self.shape.len()];
        for i in (0..self.shape.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.shape[i + 1];
        }
        strides
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.flat_index(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let i = self.flat_index(idx);
        self.data[i] = v;
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.shape.len());
        let strides = self.strides();
        idx.iter().zip(&strides).map(|(i, s)| i * s).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Mode-`axis` unfolding: rows follow the unfolded axis, columns run over
    /// the remaining axes in their original order, row-major.
    pub fn unfold(&self, axis: usize) -> DMatrix<f64> {
        let n = self.shape[axis];
        let rest: usize = self.len() / n.max(1);
        let strides = self.strides();
        let axis_stride = strides[axis];
        // Shape and strides of the remaining axes, in original order.
        let other_dims: Vec<usize> = (0..self.order())
            .filter(|&a| a != axis)
            .map(|a| self.shape[a])
            .collect();
        let other_strides: Vec<usize> = (0..self.order())
            .filter(|&a| a != axis)
            .map(|a| strides[a])
            .collect();

        let mut m = DMatrix::<f64>::zeros(n, rest);
        let mut idx = vec![0usize; other_dims.len()];
        for col in 0..rest {
            let base: usize = idx
                .iter()
                .zip(&other_strides)
                .map(|(i, s)| i * s)
                .sum();
            for row in 0..n {
                m[(row, col)] = self.data[base + row * axis_stride];
            }
            // Advance the row-major multi-index over the other axes.
            for d in (0..other_dims.len()).rev() {
                idx[d] += 1;
                if idx[d] < other_dims[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        m
    }

    /// Inverse of [`NdArray::unfold`]: rebuild an array of shape `shape` from
    /// its mode-`axis` unfolding.
    pub fn fold(m: &DMatrix<f64>, axis: usize, shape: &[usize]) -> Self {
        let mut out = NdArray::zeros(shape.to_vec());
        let n = shape[axis];
        let rest: usize = out.len() / n.max(1);
        debug_assert_eq!(m.nrows(), n);
        debug_assert_eq!(m.ncols(), rest);
        let strides = out.strides();
        let axis_stride = strides[axis];
        let other_dims: Vec<usize> = (0..shape.len())
            .filter(|&a| a != axis)
            .map(|a| shape[a])
            .collect();
        let other_strides: Vec<usize> = (0..shape.len())
            .filter(|&a| a != axis)
            .map(|a| strides[a])
            .collect();

        let mut idx = vec![0usize; other_dims.len()];
        for col in 0..rest {
            let base: usize = idx
                .iter()
                .zip(&other_strides)
                .map(|(i, s)| i * s)
                .sum();
            for row in 0..n {
                out.data[base + row * axis_stride] = m[(row, col)];
            }
            for d in (0..other_dims.len()).rev() {
                idx[d] += 1;
                if idx[d] < other_dims[d] {
                    break;
                }
                idx[d] = 0;
            }
        }
        out
    }

    /// Mode-`axis` product with `m` (`new_dim x old_dim`): contracts the given
    /// axis with the columns of `m`.
    pub fn mode_product(&self, axis: usize, m: &DMatrix<f64>) -> Result<Self> {
        if m.ncols() != self.shape[axis] {
            return Err(CoreError::ShapeMismatch(format!(
                "mode-{axis} product: matrix has {} columns, axis has {}",
                m.ncols(),
                self.shape[axis]
            )));
        }
        let unfolded = self.unfold(axis);
        let prod = m * unfolded;
        let mut new_shape = self.shape.clone();
        new_shape[axis] = m.nrows();
        Ok(NdArray::fold(&prod, axis, &new_shape))
    }
}

/// Boolean mask congruent with a snapshot tensor; `true` marks a gap.
#[derive(Clone, Debug)]
pub struct GapMask {
    shape: Vec<usize>,
    data: Vec<bool>,
}

impl GapMask {
    pub fn from_vec(shape: Vec<usize>, data: Vec<bool>) -> Result<Self> {
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(CoreError::ShapeMismatch(format!(
                "mask shape {:?} needs {} entries, got {}",
                shape,
                len,
                data.len()
            )));
        }
        Ok(GapMask { shape, data })
    }

    pub fn none(shape: Vec<usize>) -> Self {
        let len = shape.iter().product();
        GapMask {
            shape,
            data: vec![false; len],
        }
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn data(&self) -> &[bool] {
        &self.data
    }

    pub fn gap_count(&self) -> usize {
        self.data.iter().filter(|&&g| g).count()
    }

    pub fn gap_fraction(&self) -> f64 {
        if self.data.is_empty() {
            0.0
        } else {
            self.gap_count() as f64 / self.data.len() as f64
        }
    }
}

/// Spatio-temporal database in tensor form: `components x space ... x time`,
/// row-major with time as the last axis.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotTensor {
    components: usize,
    space_dims: Vec<usize>,
    times: usize,
    dt: f64,
    array: NdArray,
}

impl SnapshotTensor {
    pub fn new(
        components: usize,
        space_dims: Vec<usize>,
        times: usize,
        dt: f64,
        data: Vec<f64>,
    ) -> Result<Self> {
        if components == 0 || space_dims.contains(&0) {
            return Err(CoreError::InvalidArgument(
                "components and every spatial dimension must be positive".into(),
            ));
        }
        if space_dims.is_empty() || space_dims.len() > 3 {
            return Err(CoreError::InvalidArgument(format!(
                "expected 1 to 3 spatial axes, got {}",
                space_dims.len()
            )));
        }
        if times == 0 {
            return Err(CoreError::InvalidArgument("need at least one snapshot".into()));
        }
        if !(dt > 0.0) {
            return Err(CoreError::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        let mut shape = Vec::with_capacity(2 + space_dims.len());
        shape.push(components);
        shape.extend_from_slice(&space_dims);
        shape.push(times);
        let expected: usize = shape.iter().product();
        if data.len() != expected {
            return Err(CoreError::ShapeMismatch(format!(
                "shape {:?} needs {} entries, got {}",
                shape,
                expected,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "non-finite entries; ingest gappy data via from_nan_data".into(),
            ));
        }
        let array = NdArray::from_vec(shape, data)?;
        Ok(SnapshotTensor {
            components,
            space_dims,
            times,
            dt,
            array,
        })
    }

    /// Ingest data where gaps are marked by NaN: NaNs become zeros in the
    /// tensor and `true` in the returned mask, keeping the kernels NaN-free.
    pub fn from_nan_data(
        components: usize,
        space_dims: Vec<usize>,
        times: usize,
        dt: f64,
        data: Vec<f64>,
    ) -> Result<(Self, GapMask)> {
        let mask: Vec<bool> = data.iter().map(|x| x.is_nan()).collect();
        let clean: Vec<f64> = data
            .iter()
            .map(|x| if x.is_nan() { 0.0 } else { *x })
            .collect();
        let tensor = Self::new(components, space_dims, times, dt, clean)?;
        let mask = GapMask::from_vec(tensor.shape().to_vec(), mask)?;
        // A snapshot with every entry missing cannot be repaired.
        let j = tensor.spatial_dim();
        for k in 0..times {
            let all_gap = (0..j).all(|jj| mask.data()[jj * times + k]);
            if all_gap {
                return Err(CoreError::AllGaps);
            }
        }
        Ok((tensor, mask))
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn space_dims(&self) -> &[usize] {
        &self.space_dims
    }

    pub fn times(&self) -> usize {
        self.times
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Full shape `[components, space ..., time]`.
    pub fn shape(&self) -> &[usize] {
        self.array.shape()
    }

    pub fn order(&self) -> usize {
        self.array.order()
    }

    /// Flattened spatial dimension `J = components * prod(space_dims)`.
    pub fn spatial_dim(&self) -> usize {
        self.components * self.space_dims.iter().product::<usize>()
    }

    pub fn array(&self) -> &NdArray {
        &self.array
    }

    pub fn array_mut(&mut self) -> &mut NdArray {
        &mut self.array
    }

    pub fn into_array(self) -> NdArray {
        self.array
    }

    pub fn from_array(array: NdArray, dt: f64) -> Result<Self> {
        let shape = array.shape().to_vec();
        if shape.len() < 3 || shape.len() > 5 {
            return Err(CoreError::InvalidArgument(format!(
                "snapshot tensor must have order 3 to 5, got {}",
                shape.len()
            )));
        }
        let components = shape[0];
        let space_dims = shape[1..shape.len() - 1].to_vec();
        let times = shape[shape.len() - 1];
        Self::new(components, space_dims, times, dt, array.data.clone())
    }

    /// Flatten `(component, space axes)` into the single space index `j`.
    ///
    /// Because the data is row-major with time last, entry `(j, k)` of the
    /// matrix is exactly entry `j * K + k` of the tensor buffer: the
    /// round-trip with [`SnapshotMatrix::to_tensor`] is bit-identical.
    pub fn to_matrix(&self) -> SnapshotMatrix {
        let j = self.spatial_dim();
        let k = self.times;
        let data = DMatrix::from_fn(j, k, |r, c| self.array.data[r * k + c]);
        SnapshotMatrix {
            dt: self.dt,
            data,
        }
    }
}

/// Spatio-temporal database in matrix form: `J x K`, one snapshot per column.
#[derive(Clone, Debug, PartialEq)]
pub struct SnapshotMatrix {
    dt: f64,
    data: DMatrix<f64>,
}

impl SnapshotMatrix {
    pub fn new(data: DMatrix<f64>, dt: f64) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(CoreError::InvalidArgument("empty snapshot matrix".into()));
        }
        if !(dt > 0.0) {
            return Err(CoreError::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(CoreError::InvalidArgument(
                "non-finite entries; repair gappy data before analysis".into(),
            ));
        }
        Ok(SnapshotMatrix { dt, data })
    }

    pub fn spatial_dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn times(&self) -> usize {
        self.data.ncols()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn data(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.data
    }

    /// Inverse of [`SnapshotTensor::to_matrix`]. `component` and `space_dims`
    /// must multiply to the spatial dimension `J`.
    pub fn to_tensor(&self, components: usize, space_dims: &[usize]) -> Result<SnapshotTensor> {
        let j: usize = components * space_dims.iter().product::<usize>();
        if j != self.spatial_dim() {
            return Err(CoreError::ShapeMismatch(format!(
                "component/space dims {:?} x {} fold to {}, matrix has J = {}",
                space_dims,
                components,
                j,
                self.spatial_dim()
            )));
        }
        let k = self.times();
        let mut data = vec![0.0; j * k];
        for r in 0..j {
            for c in 0..k {
                data[r * k + c] = self.data[(r, c)];
            }
        }
        SnapshotTensor::new(components, space_dims.to_vec(), k, self.dt, data)
    }
}
