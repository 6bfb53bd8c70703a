//! Network runtime: parameter storage, shape inference, forward evaluation
//! and exact analytic backpropagation.
//!
//! Parameters live in one flat `Vec<f64>` segmented per layer (dense: weights
//! row-major then biases; conv1d: `[filter][tap][channel]` then biases; LSTM:
//! input weights, recurrent weights, biases, gates stacked `[i, f, g, o]`).
//! That layout is what the checkpoint format serialises and what the Adam
//! state mirrors. Initialisation is a seeded uniform fan-in rule,
//! `U(-sqrt(1/fan_in), sqrt(1/fan_in))`, biases zero except the LSTM forget
//! gate at 1.0.

use romkit_core::rng::Rng;

use crate::error::{NnError, Result};
use crate::feature::Feature;
use crate::spec::{LayerSpec, NetworkSpec};

#[derive(Clone, Debug)]
pub struct Network {
    spec: NetworkSpec,
    input_shape: (usize, usize),
    /// Output shape of every layer.
    shapes: Vec<(usize, usize)>,
    /// `(offset, len)` of every layer's parameter segment.
    segments: Vec<(usize, usize)>,
    params: Vec<f64>,
}

fn seg_len(layer: &LayerSpec, in_shape: (usize, usize)) -> usize {
    let (_, c) = in_shape;
    match layer {
        LayerSpec::Dense { units, .. } => units * c + units,
        LayerSpec::Conv1d {
            filters, kernel, ..
        } => filters * kernel * c + filters,
        LayerSpec::Lstm { units } => 4 * units * c + 4 * units * units + 4 * units,
        LayerSpec::Flatten => 0,
    }
}

fn out_shape(
    index: usize,
    layer: &LayerSpec,
    in_shape: (usize, usize),
) -> Result<(usize, usize)> {
    let (rows, cols) = in_shape;
    let fail = |kind: &str, reason: String| NnError::ShapeMismatch {
        layer: index,
        kind: kind.into(),
        reason,
    };
    match layer {
        LayerSpec::Dense { units, .. } => {
            if *units == 0 {
                return Err(fail("dense", "zero units".into()));
            }
            if rows != 1 {
                return Err(fail(
                    "dense",
                    format!("expects a flat row vector, got {rows}x{cols}; insert a flatten layer"),
                ));
            }
            Ok((1, *units))
        }
        LayerSpec::Conv1d {
            filters, kernel, ..
        } => {
            if *filters == 0 || *kernel == 0 {
                return Err(fail("conv1d", "zero filters or kernel".into()));
            }
            if rows < *kernel {
                return Err(fail(
                    "conv1d",
                    format!("kernel {kernel} longer than the {rows}-step input"),
                ));
            }
            Ok((rows - kernel + 1, *filters))
        }
        LayerSpec::Lstm { units } => {
            if *units == 0 {
                return Err(fail("lstm", "zero units".into()));
            }
            Ok((1, *units))
        }
        LayerSpec::Flatten => Ok((1, rows * cols)),
    }
}

/// Per-layer forward cache consumed by the backward pass.
pub enum LayerCache {
    Dense {
        input: Feature,
        preact: Vec<f64>,
    },
    Conv1d {
        input: Feature,
        preact: Feature,
    },
    Lstm {
        input: Feature,
        /// Hidden state per step, `h[0]` is the initial zero state.
        h: Vec<Vec<f64>>,
        /// Cell state per step, `c[0]` is the initial zero state.
        c: Vec<Vec<f64>>,
        /// Gate activations `(i, f, g, o)` per step.
        gates: Vec<[Vec<f64>; 4]>,
    },
    Flatten {
        in_shape: (usize, usize),
    },
}

impl Network {
    pub fn new(spec: NetworkSpec, input_shape: (usize, usize)) -> Result<Self> {
        if spec.layers.is_empty() {
            return Err(NnError::InvalidSpec("no layers".into()));
        }
        if input_shape.0 == 0 || input_shape.1 == 0 {
            return Err(NnError::InvalidSpec("empty input shape".into()));
        }
        let mut shapes = Vec::with_capacity(spec.layers.len());
        let mut segments = Vec::with_capacity(spec.layers.len());
        let mut shape = input_shape;
        let mut offset = 0usize;
        for (i, layer) in spec.layers.iter().enumerate() {
            let len = seg_len(layer, shape);
            segments.push((offset, len));
            offset += len;
            shape = out_shape(i, layer, shape)?;
            shapes.push(shape);
        }
        let mut params = vec![0.0; offset];
        let mut rng = Rng::seed_from(spec.seed);
        let mut shape = input_shape;
        for (i, layer) in spec.layers.iter().enumerate() {
            let (start, _) = segments[i];
            init_layer(layer, shape, &mut params[start..], &mut rng);
            shape = shapes[i];
        }
        Ok(Network {
            spec,
            input_shape,
            shapes,
            segments,
            params,
        })
    }

    pub fn spec(&self) -> &NetworkSpec {
        &self.spec
    }

    pub fn input_shape(&self) -> (usize, usize) {
        self.input_shape
    }

    pub fn output_shape(&self) -> (usize, usize) {
        *self.shapes.last().expect("at least one layer")
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn set_params(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.params.len() {
            return Err(NnError::InvalidSpec(format!(
                "expected {} parameters, got {}",
                self.params.len(),
                params.len()
            )));
        }
        self.params.copy_from_slice(params);
        Ok(())
    }

    fn check_input(&self, input: &Feature) -> Result<()> {
        if input.shape() != self.input_shape {
            return Err(NnError::ShapeMismatch {
                layer: 0,
                kind: "input".into(),
                reason: format!(
                    "network expects {}x{}, got {}x{}",
                    self.input_shape.0,
                    self.input_shape.1,
                    input.rows(),
                    input.cols()
                ),
            });
        }
        Ok(())
    }

    /// Deterministic forward pass.
    pub fn forward(&self, input: &Feature) -> Result<Feature> {
        self.check_input(input)?;
        let mut x = input.clone();
        for (i, layer) in self.spec.layers.iter().enumerate() {
            let (start, len) = self.segments[i];
            let seg = &self.params[start..start + len];
            let (out, _) = layer_forward(layer, seg, &x);
            x = out;
        }
        Ok(x)
    }

    /// Evaluate a single layer; `input` must match that layer's input shape.
    pub fn forward_layer(&self, index: usize, input: &Feature) -> Result<Feature> {
        if index >= self.spec.layers.len() {
            return Err(NnError::InvalidSpec(format!(
                "layer {index} out of range ({} layers)",
                self.spec.layers.len()
            )));
        }
        let (s, len) = self.segments[index];
        let seg = &self.params[s..s + len];
        let (out, _) = layer_forward(&self.spec.layers[index], seg, input);
        Ok(out)
    }

    /// Run only the layers from `start` onward; `input` must match the output
    /// shape of layer `start - 1`. Used to evaluate a trained sub-stack, e.g.
    /// the decoder half of an autoencoder.
    pub fn forward_from(&self, start: usize, input: &Feature) -> Result<Feature> {
        if start >= self.spec.layers.len() {
            return Err(NnError::InvalidSpec(format!(
                "layer {start} out of range ({} layers)",
                self.spec.layers.len()
            )));
        }
        let expected = if start == 0 {
            self.input_shape
        } else {
            self.shapes[start - 1]
        };
        if input.shape() != expected {
            return Err(NnError::ShapeMismatch {
                layer: start,
                kind: "sub-stack input".into(),
                reason: format!(
                    "expected {}x{}, got {}x{}",
                    expected.0,
                    expected.1,
                    input.rows(),
                    input.cols()
                ),
            });
        }
        let mut x = input.clone();
        for (i, layer) in self.spec.layers.iter().enumerate().skip(start) {
            let (s, len) = self.segments[i];
            let seg = &self.params[s..s + len];
            let (out, _) = layer_forward(layer, seg, &x);
            x = out;
        }
        Ok(x)
    }

    /// Forward pass that keeps every intermediate needed by `backward`.
    pub fn forward_cached(&self, input: &Feature) -> Result<(Feature, Vec<LayerCache>)> {
        self.check_input(input)?;
        let mut x = input.clone();
        let mut caches = Vec::with_capacity(self.spec.layers.len());
        for (i, layer) in self.spec.layers.iter().enumerate() {
            let (start, len) = self.segments[i];
            let seg = &self.params[start..start + len];
            let (out, cache) = layer_forward(layer, seg, &x);
            caches.push(cache);
            x = out;
        }
        Ok((x, caches))
    }

    /// Exact gradients of a scalar loss with respect to every parameter,
    /// given the gradient with respect to the network output. Gradients are
    /// accumulated into `grad_params` (same layout as `params`).
    pub fn backward(
        &self,
        caches: &[LayerCache],
        grad_output: &Feature,
        grad_params: &mut [f64],
    ) -> Feature {
        debug_assert_eq!(grad_params.len(), self.params.len());
        let mut grad = grad_output.clone();
        for (i, layer) in self.spec.layers.iter().enumerate().rev() {
            let (start, len) = self.segments[i];
            let seg = &self.params[start..start + len];
            let gseg = &mut grad_params[start..start + len];
            grad = layer_backward(layer, seg, &caches[i], &grad, gseg);
        }
        grad
    }
}

fn init_layer(layer: &LayerSpec, in_shape: (usize, usize), seg: &mut [f64], rng: &mut Rng) {
    let (_, c) = in_shape;
    match layer {
        LayerSpec::Dense { units, .. } => {
            let lim = (1.0 / c as f64).sqrt();
            for w in seg[..units * c].iter_mut() {
                *w = rng.uniform(-lim, lim);
            }
            // biases stay zero
        }
        LayerSpec::Conv1d {
            filters, kernel, ..
        } => {
            let lim = (1.0 / (kernel * c) as f64).sqrt();
            for w in seg[..filters * kernel * c].iter_mut() {
                *w = rng.uniform(-lim, lim);
            }
        }
        LayerSpec::Lstm { units } => {
            let h = *units;
            let lim_x = (1.0 / c as f64).sqrt();
            for w in seg[..4 * h * c].iter_mut() {
                *w = rng.uniform(-lim_x, lim_x);
            }
            let lim_h = (1.0 / h as f64).sqrt();
            for w in seg[4 * h * c..4 * h * c + 4 * h * h].iter_mut() {
                *w = rng.uniform(-lim_h, lim_h);
            }
            // Forget-gate biases start at 1.0 so early training does not
            // flush the cell state.
            let b0 = 4 * h * c + 4 * h * h;
            for b in seg[b0 + h..b0 + 2 * h].iter_mut() {
                *b = 1.0;
            }
        }
        LayerSpec::Flatten => {}
    }
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn layer_forward(layer: &LayerSpec, seg: &[f64], input: &Feature) -> (Feature, LayerCache) {
    match layer {
        LayerSpec::Dense { units, activation } => {
            let c = input.cols();
            let u = *units;
            let (w, b) = seg.split_at(u * c);
            let x = input.row(0);
            let mut preact = vec![0.0; u];
            for (o, z) in preact.iter_mut().enumerate() {
                let mut acc = b[o];
                let wrow = &w[o * c..(o + 1) * c];
                for (wi, xi) in wrow.iter().zip(x) {
                    acc += wi * xi;
                }
                *z = acc;
            }
            let out: Vec<f64> = preact.iter().map(|&z| activation.apply(z)).collect();
            (
                Feature::row_vector(out),
                LayerCache::Dense {
                    input: input.clone(),
                    preact,
                },
            )
        }
        LayerSpec::Conv1d {
            filters,
            kernel,
            activation,
        } => {
            let (rows, c) = input.shape();
            let (f, k) = (*filters, *kernel);
            let out_rows = rows - k + 1;
            let (w, b) = seg.split_at(f * k * c);
            let mut preact = Feature::zeros(out_rows, f);
            for t in 0..out_rows {
                for fi in 0..f {
                    let mut acc = b[fi];
                    for tau in 0..k {
                        let wrow = &w[(fi * k + tau) * c..(fi * k + tau + 1) * c];
                        let xrow = input.row(t + tau);
                        for (wi, xi) in wrow.iter().zip(xrow) {
                            acc += wi * xi;
                        }
                    }
                    preact.set(t, fi, acc);
                }
            }
            let mut out = Feature::zeros(out_rows, f);
            for (o, z) in out.data_mut().iter_mut().zip(preact.data()) {
                *o = activation.apply(*z);
            }
            (
                out,
                LayerCache::Conv1d {
                    input: input.clone(),
                    preact,
                },
            )
        }
        LayerSpec::Lstm { units } => {
            let (steps, c) = input.shape();
            let h = *units;
            let (wx, rest) = seg.split_at(4 * h * c);
            let (wh, b) = rest.split_at(4 * h * h);
            let mut hs: Vec<Vec<f64>> = vec![vec![0.0; h]];
            let mut cs: Vec<Vec<f64>> = vec![vec![0.0; h]];
            let mut gates: Vec<[Vec<f64>; 4]> = Vec::with_capacity(steps);
            for t in 0..steps {
                let x = input.row(t);
                let h_prev = hs[t].clone();
                let c_prev = cs[t].clone();
                let mut z = vec![0.0; 4 * h];
                for (r, zr) in z.iter_mut().enumerate() {
                    let mut acc = b[r];
                    let wxr = &wx[r * c..(r + 1) * c];
                    for (wi, xi) in wxr.iter().zip(x) {
                        acc += wi * xi;
                    }
                    let whr = &wh[r * h..(r + 1) * h];
                    for (wi, hi) in whr.iter().zip(&h_prev) {
                        acc += wi * hi;
                    }
                    *zr = acc;
                }
                let mut gi = vec![0.0; h];
                let mut gf = vec![0.0; h];
                let mut gg = vec![0.0; h];
                let mut go = vec![0.0; h];
                let mut c_new = vec![0.0; h];
                let mut h_new = vec![0.0; h];
                for j in 0..h {
                    gi[j] = sigmoid(z[j]);
                    gf[j] = sigmoid(z[h + j]);
                    gg[j] = z[2 * h + j].tanh();
                    go[j] = sigmoid(z[3 * h + j]);
                    c_new[j] = gf[j] * c_prev[j] + gi[j] * gg[j];
                    h_new[j] = go[j] * c_new[j].tanh();
                }
                gates.push([gi, gf, gg, go]);
                hs.push(h_new);
                cs.push(c_new);
            }
            let out = Feature::row_vector(hs[steps].clone());
            (
                out,
                LayerCache::Lstm {
                    input: input.clone(),
                    h: hs,
                    c: cs,
                    gates,
                },
            )
        }
        LayerSpec::Flatten => (
            input.flattened(),
            LayerCache::Flatten {
                in_shape: input.shape(),
            },
        ),
    }
}

fn layer_backward(
    layer: &LayerSpec,
    seg: &[f64],
    cache: &LayerCache,
    grad_out: &Feature,
    grad_seg: &mut [f64],
) -> Feature {
    match (layer, cache) {
        (LayerSpec::Dense { units, activation }, LayerCache::Dense { input, preact }) => {
            let c = input.cols();
            let u = *units;
            let (w, _) = seg.split_at(u * c);
            let (gw, gb) = grad_seg.split_at_mut(u * c);
            let x = input.row(0);
            let mut grad_in = vec![0.0; c];
            for o in 0..u {
                let dz = grad_out.get(0, o) * activation.derivative(preact[o]);
                gb[o] += dz;
                let gwrow = &mut gw[o * c..(o + 1) * c];
                let wrow = &w[o * c..(o + 1) * c];
                for i in 0..c {
                    gwrow[i] += dz * x[i];
                    grad_in[i] += dz * wrow[i];
                }
            }
            Feature::row_vector(grad_in)
        }
        (
            LayerSpec::Conv1d {
                filters,
                kernel,
                activation,
            },
            LayerCache::Conv1d { input, preact },
        ) => {
            let (rows, c) = input.shape();
            let (f, k) = (*filters, *kernel);
            let out_rows = rows - k + 1;
            let (w, _) = seg.split_at(f * k * c);
            let (gw, gb) = grad_seg.split_at_mut(f * k * c);
            let mut grad_in = Feature::zeros(rows, c);
            for t in 0..out_rows {
                for fi in 0..f {
                    let dz = grad_out.get(t, fi) * activation.derivative(preact.get(t, fi));
                    gb[fi] += dz;
                    for tau in 0..k {
                        let base = (fi * k + tau) * c;
                        let xrow = input.row(t + tau);
                        for ch in 0..c {
                            gw[base + ch] += dz * xrow[ch];
                            let cur = grad_in.get(t + tau, ch);
                            grad_in.set(t + tau, ch, cur + dz * w[base + ch]);
                        }
                    }
                }
            }
            grad_in
        }
        (LayerSpec::Lstm { units }, LayerCache::Lstm { input, h, c, gates }) => {
            let (steps, cin) = input.shape();
            let hsize = *units;
            let (wx, rest) = seg.split_at(4 * hsize * cin);
            let (wh, _) = rest.split_at(4 * hsize * hsize);
            let (gwx, grest) = grad_seg.split_at_mut(4 * hsize * cin);
            let (gwh, gb) = grest.split_at_mut(4 * hsize * hsize);

            let mut grad_in = Feature::zeros(steps, cin);
            let mut dh: Vec<f64> = grad_out.row(0).to_vec();
            let mut dc = vec![0.0; hsize];
            for t in (0..steps).rev() {
                let [gi, gf, gg, go] = &gates[t];
                let c_prev = &c[t];
                let c_new = &c[t + 1];
                let h_prev = &h[t];
                let x = input.row(t);
                let mut dz = vec![0.0; 4 * hsize];
                for j in 0..hsize {
                    let tc = c_new[j].tanh();
                    let do_ = dh[j] * tc;
                    let dc_j = dc[j] + dh[j] * go[j] * (1.0 - tc * tc);
                    let di = dc_j * gg[j];
                    let dg = dc_j * gi[j];
                    let df = dc_j * c_prev[j];
                    dz[j] = di * gi[j] * (1.0 - gi[j]);
                    dz[hsize + j] = df * gf[j] * (1.0 - gf[j]);
                    dz[2 * hsize + j] = dg * (1.0 - gg[j] * gg[j]);
                    dz[3 * hsize + j] = do_ * go[j] * (1.0 - go[j]);
                    dc[j] = dc_j * gf[j];
                }
                let mut dh_prev = vec![0.0; hsize];
                for r in 0..4 * hsize {
                    let d = dz[r];
                    if d == 0.0 {
                        continue;
                    }
                    gb[r] += d;
                    let gwxr = &mut gwx[r * cin..(r + 1) * cin];
                    for i in 0..cin {
                        gwxr[i] += d * x[i];
                    }
                    let gwhr = &mut gwh[r * hsize..(r + 1) * hsize];
                    let whr = &wh[r * hsize..(r + 1) * hsize];
                    for i in 0..hsize {
                        gwhr[i] += d * h_prev[i];
                        dh_prev[i] += d * whr[i];
                    }
                    let wxr = &wx[r * cin..(r + 1) * cin];
                    for i in 0..cin {
                        let cur = grad_in.get(t, i);
                        grad_in.set(t, i, cur + d * wxr[i]);
                    }
                }
                dh = dh_prev;
            }
            grad_in
        }
        (LayerSpec::Flatten, LayerCache::Flatten { in_shape }) => {
            Feature::from_vec(in_shape.0, in_shape.1, grad_out.data().to_vec())
        }
        _ => unreachable!("cache kind always matches its layer"),
    }
}
