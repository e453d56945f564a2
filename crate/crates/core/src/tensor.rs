//! Dense n-dimensional f64 tensors and the numeric ops the engine needs.
//!
//! Values are stored contiguously in row-major order. Operations are pure
//! functions with a deterministic ascending-index summation order, so runs
//! are bit-reproducible. In debug builds every operation checks that finite
//! inputs produced finite outputs.

use crate::error::{Error, Result};

/// Ordered tensor extents. Non-empty, every extent >= 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shape(Vec<usize>);

impl Shape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::dim("shape", "empty dimension list"));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::dim("shape", format!("zero extent in {dims:?}")));
        }
        Ok(Shape(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn count(&self) -> usize {
        self.0.iter().product()
    }
}

/// Dense row-major tensor of 64-bit reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl Tensor {
    /// Builds a tensor from explicit shape and data. Fails unless
    /// `product(shape) == data.len()` and the shape is valid.
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        let s = Shape::new(shape)?;
        if s.count() != data.len() {
            return Err(Error::dim(
                "tensor-new",
                format!("shape {:?} wants {} values, got {}", s.dims(), s.count(), data.len()),
            ));
        }
        Ok(Tensor { shape: s.0, data })
    }

    pub fn zeros(shape: &[usize]) -> Self {
        Self::full(shape, 0.0)
    }

    pub fn full(shape: &[usize], value: f64) -> Self {
        let s = Shape::new(shape.to_vec()).expect("invalid tensor shape");
        let n = s.count();
        Tensor {
            shape: s.0,
            data: vec![value; n],
        }
    }

    /// Rank-1 tensor over the given values.
    pub fn from_vec(data: Vec<f64>) -> Self {
        assert!(!data.is_empty(), "empty tensor");
        Tensor {
            shape: vec![data.len()],
            data,
        }
    }

    /// Identity matrix of extent `n`.
    pub fn eye(n: usize) -> Self {
        let mut t = Self::zeros(&[n, n]);
        for i in 0..n {
            t.data[i * n + i] = 1.0;
        }
        t
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        false // shape invariant forbids empty tensors
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Mutable access for owners (optimizer updates). Operations never
    /// mutate their inputs.
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Element at a full multi-index (row-major).
    pub fn at(&self, idx: &[usize]) -> f64 {
        assert_eq!(idx.len(), self.shape.len(), "index rank mismatch");
        let mut off = 0;
        for (i, (&ix, &ext)) in idx.iter().zip(&self.shape).enumerate() {
            assert!(ix < ext, "index {ix} out of range at axis {i}");
            off = off * ext + ix;
        }
        self.data[off]
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<Tensor> {
        let s = Shape::new(shape.to_vec())?;
        if s.count() != self.data.len() {
            return Err(Error::dim(
                "reshape",
                format!("cannot view {:?} as {:?}", self.shape, shape),
            ));
        }
        Ok(Tensor {
            shape: s.0,
            data: self.data.clone(),
        })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor {
        let out = Tensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&v| f(v)).collect(),
        };
        debug_check_finite(&out, "map");
        out
    }

    pub fn zip_map(&self, other: &Tensor, f: impl Fn(f64, f64) -> f64) -> Result<Tensor> {
        if self.shape != other.shape {
            return Err(Error::dim(
                "zip",
                format!("{:?} vs {:?}", self.shape, other.shape),
            ));
        }
        let out = Tensor {
            shape: self.shape.clone(),
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        };
        debug_check_finite(&out, "zip");
        Ok(out)
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_map(other, |a, b| a - b)
    }

    /// Elementwise (Hadamard) product.
    pub fn mul(&self, other: &Tensor) -> Result<Tensor> {
        self.zip_map(other, |a, b| a * b)
    }

    pub fn scale(&self, c: f64) -> Tensor {
        self.map(|v| v * c)
    }

    /// Rank-2 transpose.
    pub fn transpose(&self) -> Result<Tensor> {
        let [n, m] = require_rank2(self, "transpose")?;
        let mut data = vec![0.0; n * m];
        for i in 0..n {
            for j in 0..m {
                data[j * n + i] = self.data[i * m + j];
            }
        }
        Ok(Tensor {
            shape: vec![m, n],
            data,
        })
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.data.iter()
    }
}

fn require_rank2(t: &Tensor, op: &'static str) -> Result<[usize; 2]> {
    match t.shape() {
        &[n, m] => Ok([n, m]),
        s => Err(Error::dim(op, format!("expected rank-2 tensor, got {s:?}"))),
    }
}

fn require_rank4(t: &Tensor, op: &'static str) -> Result<[usize; 4]> {
    match t.shape() {
        &[a, b, c, d] => Ok([a, b, c, d]),
        s => Err(Error::dim(op, format!("expected rank-4 tensor, got {s:?}"))),
    }
}

#[inline]
fn debug_check_finite(t: &Tensor, op: &str) {
    if cfg!(debug_assertions) {
        debug_assert!(
            t.data.iter().all(|v| v.is_finite()),
            "non-finite value produced by {op}"
        );
    }
}

/// Standard matrix product of `a` (n x m) and `b` (m x k), summing in
/// ascending inner-index order.
pub fn matmul(a: &Tensor, b: &Tensor) -> Result<Tensor> {
    let [n, m] = require_rank2(a, "matmul")?;
    let [m2, k] = require_rank2(b, "matmul")?;
    if m != m2 {
        return Err(Error::dim(
            "matmul",
            format!("inner dimensions disagree: {:?} x {:?}", a.shape(), b.shape()),
        ));
    }
    let mut data = vec![0.0; n * k];
    let ad = a.data();
    let bd = b.data();
    for i in 0..n {
        for j in 0..k {
            let mut acc = 0.0;
            for l in 0..m {
                acc += ad[i * m + l] * bd[l * k + j];
            }
            data[i * k + j] = acc;
        }
    }
    let out = Tensor {
        shape: vec![n, k],
        data,
    };
    debug_check_finite(&out, "matmul");
    Ok(out)
}

/// Cross-correlation of `x` (N,C,H,W) with kernels `k` (F,C,kh,kw), zero
/// padding. Output extent along each spatial axis is
/// `(in + 2*pad - kernel) / stride + 1`.
pub fn conv2d_forward(x: &Tensor, k: &Tensor, stride: usize, pad: usize) -> Result<Tensor> {
    let [n, c, h, w] = require_rank4(x, "conv2d")?;
    let [f, kc, kh, kw] = require_rank4(k, "conv2d")?;
    if c != kc {
        return Err(Error::dim(
            "conv2d",
            format!("input channels {c} != kernel channels {kc}"),
        ));
    }
    if stride == 0 {
        return Err(Error::Config("conv2d stride must be positive".into()));
    }
    if kh > h + 2 * pad || kw > w + 2 * pad {
        return Err(Error::dim(
            "conv2d",
            format!("kernel {kh}x{kw} larger than padded input {}x{}", h + 2 * pad, w + 2 * pad),
        ));
    }
    let oh = (h + 2 * pad - kh) / stride + 1;
    let ow = (w + 2 * pad - kw) / stride + 1;
    let xd = x.data();
    let kd = k.data();
    let mut data = vec![0.0; n * f * oh * ow];
    for in_ in 0..n {
        for fo in 0..f {
            for yo in 0..oh {
                for xo in 0..ow {
                    let mut acc = 0.0;
                    for ci in 0..c {
                        for ky in 0..kh {
                            let iy = (yo * stride + ky) as isize - pad as isize;
                            if iy < 0 || iy >= h as isize {
                                continue;
                            }
                            for kx in 0..kw {
                                let ix = (xo * stride + kx) as isize - pad as isize;
                                if ix < 0 || ix >= w as isize {
                                    continue;
                                }
                                let xi = ((in_ * c + ci) * h + iy as usize) * w + ix as usize;
                                let ki = ((fo * c + ci) * kh + ky) * kw + kx;
                                acc += xd[xi] * kd[ki];
                            }
                        }
                    }
                    data[((in_ * f + fo) * oh + yo) * ow + xo] = acc;
                }
            }
        }
    }
    let out = Tensor {
        shape: vec![n, f, oh, ow],
        data,
    };
    debug_check_finite(&out, "conv2d");
    Ok(out)
}

/// Gradients of `sum(dy * conv2d_forward(x, k))` with respect to `x` and `k`.
pub fn conv2d_backward(
    dy: &Tensor,
    x: &Tensor,
    k: &Tensor,
    stride: usize,
    pad: usize,
) -> Result<(Tensor, Tensor)> {
    let [n, c, h, w] = require_rank4(x, "conv2d-backward")?;
    let [f, _, kh, kw] = require_rank4(k, "conv2d-backward")?;
    let expect = conv2d_output_shape(x.shape(), k.shape(), stride, pad)?;
    if dy.shape() != expect.as_slice() {
        return Err(Error::dim(
            "conv2d-backward",
            format!("upstream gradient {:?}, forward output is {:?}", dy.shape(), expect),
        ));
    }
    let [_, _, oh, ow] = require_rank4(dy, "conv2d-backward")?;
    let xd = x.data();
    let kd = k.data();
    let gd = dy.data();
    let mut dx = vec![0.0; xd.len()];
    let mut dk = vec![0.0; kd.len()];
    for in_ in 0..n {
        for fo in 0..f {
            for yo in 0..oh {
                for xo in 0..ow {
                    let g = gd[((in_ * f + fo) * oh + yo) * ow + xo];
                    for ci in 0..c {
                        for ky in 0..kh {
                            let iy = (yo * stride + ky) as isize - pad as isize;
                            if iy < 0 || iy >= h as isize {
                                continue;
                            }
                            for kx in 0..kw {
                                let ix = (xo * stride + kx) as isize - pad as isize;
                                if ix < 0 || ix >= w as isize {
                                    continue;
                                }
                                let xi = ((in_ * c + ci) * h + iy as usize) * w + ix as usize;
                                let ki = ((fo * c + ci) * kh + ky) * kw + kx;
                                dx[xi] += g * kd[ki];
                                dk[ki] += g * xd[xi];
                            }
                        }
                    }
                }
            }
        }
    }
    let dx = Tensor {
        shape: x.shape.clone(),
        data: dx,
    };
    let dk = Tensor {
        shape: k.shape.clone(),
        data: dk,
    };
    debug_check_finite(&dx, "conv2d-backward");
    debug_check_finite(&dk, "conv2d-backward");
    Ok((dx, dk))
}

/// Output shape of [`conv2d_forward`] for the given input/kernel shapes.
pub fn conv2d_output_shape(
    x: &[usize],
    k: &[usize],
    stride: usize,
    pad: usize,
) -> Result<Vec<usize>> {
    let [n, c, h, w] = match x {
        &[a, b, c, d] => [a, b, c, d],
        s => return Err(Error::dim("conv2d", format!("input rank {s:?}"))),
    };
    let [f, kc, kh, kw] = match k {
        &[a, b, c, d] => [a, b, c, d],
        s => return Err(Error::dim("conv2d", format!("kernel rank {s:?}"))),
    };
    if c != kc {
        return Err(Error::dim(
            "conv2d",
            format!("input channels {c} != kernel channels {kc}"),
        ));
    }
    if stride == 0 {
        return Err(Error::Config("conv2d stride must be positive".into()));
    }
    if kh > h + 2 * pad || kw > w + 2 * pad {
        return Err(Error::dim(
            "conv2d",
            format!("kernel {kh}x{kw} larger than padded input {}x{}", h + 2 * pad, w + 2 * pad),
        ));
    }
    Ok(vec![
        n,
        f,
        (h + 2 * pad - kh) / stride + 1,
        (w + 2 * pad - kw) / stride + 1,
    ])
}

/// Adds `bias` (length n) to every row of `y` (B x n). The only broadcast
/// the engine supports besides [`add_channel_bias`].
pub fn add_row_bias(y: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let [b, n] = require_rank2(y, "bias-add")?;
    if bias.shape() != [n] {
        return Err(Error::dim(
            "bias-add",
            format!("bias {:?} for activations {:?}", bias.shape(), y.shape()),
        ));
    }
    let mut out = y.clone();
    for r in 0..b {
        for j in 0..n {
            out.data[r * n + j] += bias.data[j];
        }
    }
    debug_check_finite(&out, "bias-add");
    Ok(out)
}

/// Adds `bias` (length F) to every spatial position of channel F in `y`
/// (N x F x H x W).
pub fn add_channel_bias(y: &Tensor, bias: &Tensor) -> Result<Tensor> {
    let [n, f, h, w] = require_rank4(y, "bias-add")?;
    if bias.shape() != [f] {
        return Err(Error::dim(
            "bias-add",
            format!("bias {:?} for activations {:?}", bias.shape(), y.shape()),
        ));
    }
    let mut out = y.clone();
    for in_ in 0..n {
        for fo in 0..f {
            let base = (in_ * f + fo) * h * w;
            for p in 0..h * w {
                out.data[base + p] += bias.data[fo];
            }
        }
    }
    debug_check_finite(&out, "bias-add");
    Ok(out)
}

/// Arithmetic mean of absolute values.
pub fn reduce_mean_abs(t: &Tensor) -> f64 {
    let mut acc = 0.0;
    for &v in t.data() {
        acc += v.abs();
    }
    acc / t.len() as f64
}
