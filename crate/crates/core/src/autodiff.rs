//! Reverse-mode automatic differentiation on small dense matrices.
//!
//! The networks here are tiny (embedding widths of at most a few dozen), so
//! the engine favors predictability over throughput: tensors are row-major
//! `Vec`s, every operation records a node in an arena [`Tape`], and
//! [`Tape::backward`] walks the arena in reverse. Summation orders are
//! fixed, which makes forward passes bit-for-bit reproducible and — because
//! causally masked attention zeroes future columns exactly — makes a prefix
//! forward agree bit-for-bit with the corresponding rows of a full-sequence
//! forward.
//!
//! Shape violations are programming errors, not runtime conditions, and
//! panic with a description of the mismatch.

use crate::scalar::Scalar;

/// Epsilon inside the layer-norm variance square root.
pub const LAYER_NORM_EPS: f64 = 1e-5;

// ---------------------------------------------------------------------------
// Tensor
// ---------------------------------------------------------------------------

/// Row-major matrix. Vectors are represented as `1×n` or `n×1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Tensor<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<T>) -> Self {
        assert_eq!(data.len(), rows * cols, "data length != rows*cols");
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn scalar(value: T) -> Self {
        Self::from_vec(1, 1, vec![value])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        debug_assert!(i < self.rows && j < self.cols);
        self.data[i * self.cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    #[inline]
    pub fn data(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    /// The single entry of a `1×1` tensor.
    pub fn item(&self) -> T {
        assert_eq!(self.shape(), (1, 1), "item() requires a scalar tensor");
        self.data[0]
    }
}

// ---------------------------------------------------------------------------
// Tape
// ---------------------------------------------------------------------------

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(usize);

enum Op<T> {
    Leaf,
    MatMul(Var, Var),
    /// `A · Bᵀ`.
    MatMulNT(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    /// Elementwise product.
    Mul(Var, Var),
    Scale(Var, T),
    /// Broadcast a `1×n` row onto every row of an `m×n` matrix.
    AddRow(Var, Var),
    Relu(Var),
    Ln(Var),
    /// Row-wise softmax with max subtraction.
    SoftmaxRows(Var),
    /// Row-wise layer normalization with learnable scale and offset.
    LayerNormRows { x: Var, gamma: Var, beta: Var },
    /// Gather rows of a table: output row `r` is `table.row(indices[r])`.
    Lookup(Var, Vec<usize>),
    /// Replace entries where the mask is true by a constant.
    MaskedFill(Var, Vec<bool>, T),
    ConcatCols(Vec<Var>),
    SliceCols(Var, usize, usize),
    /// Output `m×1`; entry `r` is `input[r, cols[r]]`.
    PickPerRow(Var, Vec<usize>),
    /// Row sums, `m×1`.
    RowSums(Var),
    /// Total sum, `1×1`.
    SumAll(Var),
}

struct Node<T> {
    value: Tensor<T>,
    op: Op<T>,
}

/// Arena of operation records. A forward pass pushes nodes; `backward`
/// produces gradients with respect to every node.
pub struct Tape<T: Scalar> {
    nodes: Vec<Node<T>>,
}

/// Gradients indexed by [`Var`]. Nodes the root does not depend on have no
/// entry; callers that need dense gradients should treat `None` as exactly
/// zero.
pub struct Gradients<T> {
    grads: Vec<Option<Tensor<T>>>,
}

impl<T: Scalar> Gradients<T> {
    pub fn get(&self, v: Var) -> Option<&Tensor<T>> {
        self.grads[v.0].as_ref()
    }
}

impl<T: Scalar> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Scalar> Tape<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.nodes[v.0].value
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>) -> Var {
        self.nodes.push(Node { value, op });
        Var(self.nodes.len() - 1)
    }

    pub fn leaf(&mut self, value: Tensor<T>) -> Var {
        self.push(value, Op::Leaf)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.value(a).shape();
        let (k2, n) = self.value(b).shape();
        assert_eq!(k, k2, "matmul: inner dimensions {k} vs {k2}");
        let mut out = Tensor::zeros(m, n);
        for i in 0..m {
            for kk in 0..k {
                let aik = self.value(a).get(i, kk);
                if aik == T::zero() {
                    continue;
                }
                let brow = self.value(b).row(kk);
                let orow = &mut out.data_mut()[i * n..(i + 1) * n];
                for (o, &bv) in orow.iter_mut().zip(brow) {
                    *o += aik * bv;
                }
            }
        }
        self.push(out, Op::MatMul(a, b))
    }

    /// `A · Bᵀ`, shapes `m×k` and `n×k`, producing `m×n`.
    pub fn matmul_nt(&mut self, a: Var, b: Var) -> Var {
        let (m, k) = self.value(a).shape();
        let (n, k2) = self.value(b).shape();
        assert_eq!(k, k2, "matmul_nt: inner dimensions {k} vs {k2}");
        let mut out = Tensor::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                let arow = self.value(a).row(i);
                let brow = self.value(b).row(j);
                let mut acc = T::zero();
                for (&av, &bv) in arow.iter().zip(brow) {
                    acc += av * bv;
                }
                out.set(i, j, acc);
            }
        }
        self.push(out, Op::MatMulNT(a, b))
    }

    fn binary_same_shape(&mut self, a: Var, b: Var, name: &str, f: impl Fn(T, T) -> T) -> Tensor<T> {
        let sa = self.value(a).shape();
        let sb = self.value(b).shape();
        assert_eq!(sa, sb, "{name}: shape {sa:?} vs {sb:?}");
        let mut out = self.value(a).clone();
        for (o, &bv) in out.data_mut().iter_mut().zip(self.value(b).data()) {
            *o = f(*o, bv);
        }
        out
    }

    pub fn add(&mut self, a: Var, b: Var) -> Var {
        let out = self.binary_same_shape(a, b, "add", |x, y| x + y);
        self.push(out, Op::Add(a, b))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Var {
        let out = self.binary_same_shape(a, b, "sub", |x, y| x - y);
        self.push(out, Op::Sub(a, b))
    }

    pub fn mul(&mut self, a: Var, b: Var) -> Var {
        let out = self.binary_same_shape(a, b, "mul", |x, y| x * y);
        self.push(out, Op::Mul(a, b))
    }

    pub fn scale(&mut self, a: Var, k: T) -> Var {
        let mut out = self.value(a).clone();
        for o in out.data_mut() {
            *o *= k;
        }
        self.push(out, Op::Scale(a, k))
    }

    pub fn add_row(&mut self, a: Var, row: Var) -> Var {
        let (m, n) = self.value(a).shape();
        assert_eq!(
            self.value(row).shape(),
            (1, n),
            "add_row: expected 1×{n} bias row"
        );
        let mut out = self.value(a).clone();
        for i in 0..m {
            for j in 0..n {
                let v = out.get(i, j) + self.value(row).get(0, j);
                out.set(i, j, v);
            }
        }
        self.push(out, Op::AddRow(a, row))
    }

    pub fn relu(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for o in out.data_mut() {
            if *o < T::zero() {
                *o = T::zero();
            }
        }
        self.push(out, Op::Relu(a))
    }

    pub fn ln(&mut self, a: Var) -> Var {
        let mut out = self.value(a).clone();
        for o in out.data_mut() {
            *o = o.ln();
        }
        self.push(out, Op::Ln(a))
    }

    pub fn softmax_rows(&mut self, a: Var) -> Var {
        let (m, n) = self.value(a).shape();
        let mut out = Tensor::zeros(m, n);
        for i in 0..m {
            let row = self.value(a).row(i);
            let mut max = T::neg_infinity();
            for &v in row {
                if v > max {
                    max = v;
                }
            }
            let row = self.value(a).row(i).to_vec();
            let mut denom = T::zero();
            for (j, &v) in row.iter().enumerate() {
                let e = (v - max).exp();
                out.set(i, j, e);
                denom += e;
            }
            for j in 0..n {
                out.set(i, j, out.get(i, j) / denom);
            }
        }
        self.push(out, Op::SoftmaxRows(a))
    }

    pub fn layer_norm_rows(&mut self, x: Var, gamma: Var, beta: Var) -> Var {
        let (m, n) = self.value(x).shape();
        assert_eq!(self.value(gamma).shape(), (1, n), "layer_norm: gamma shape");
        assert_eq!(self.value(beta).shape(), (1, n), "layer_norm: beta shape");
        let eps = T::of_f64(LAYER_NORM_EPS);
        let inv_n = T::one() / T::of_usize(n);
        let mut out = Tensor::zeros(m, n);
        for i in 0..m {
            let row = self.value(x).row(i).to_vec();
            let mut mean = T::zero();
            for &v in &row {
                mean += v;
            }
            mean *= inv_n;
            let mut var = T::zero();
            for &v in &row {
                var += (v - mean) * (v - mean);
            }
            var *= inv_n;
            let inv_std = T::one() / (var + eps).sqrt();
            for (j, &v) in row.iter().enumerate() {
                let xhat = (v - mean) * inv_std;
                out.set(
                    i,
                    j,
                    self.value(gamma).get(0, j) * xhat + self.value(beta).get(0, j),
                );
            }
        }
        self.push(out, Op::LayerNormRows { x, gamma, beta })
    }

    pub fn lookup(&mut self, table: Var, indices: &[usize]) -> Var {
        let (rows, n) = self.value(table).shape();
        let mut out = Tensor::zeros(indices.len(), n);
        for (r, &idx) in indices.iter().enumerate() {
            assert!(idx < rows, "lookup: row {idx} out of {rows}");
            let src = self.value(table).row(idx).to_vec();
            out.data_mut()[r * n..(r + 1) * n].copy_from_slice(&src);
        }
        self.push(out, Op::Lookup(table, indices.to_vec()))
    }

    pub fn masked_fill(&mut self, a: Var, mask: &[bool], fill: T) -> Var {
        let (m, n) = self.value(a).shape();
        assert_eq!(mask.len(), m * n, "masked_fill: mask length");
        let mut out = self.value(a).clone();
        for (o, &masked) in out.data_mut().iter_mut().zip(mask) {
            if masked {
                *o = fill;
            }
        }
        self.push(out, Op::MaskedFill(a, mask.to_vec(), fill))
    }

    pub fn concat_cols(&mut self, parts: &[Var]) -> Var {
        assert!(!parts.is_empty(), "concat_cols: no inputs");
        let m = self.value(parts[0]).rows();
        let total: usize = parts
            .iter()
            .map(|&p| {
                assert_eq!(self.value(p).rows(), m, "concat_cols: row mismatch");
                self.value(p).cols()
            })
            .sum();
        let mut out = Tensor::zeros(m, total);
        let mut offset = 0;
        for &p in parts {
            let w = self.value(p).cols();
            for i in 0..m {
                let src = self.value(p).row(i).to_vec();
                out.data_mut()[i * total + offset..i * total + offset + w].copy_from_slice(&src);
            }
            offset += w;
        }
        self.push(out, Op::ConcatCols(parts.to_vec()))
    }

    pub fn slice_cols(&mut self, a: Var, start: usize, end: usize) -> Var {
        let (m, n) = self.value(a).shape();
        assert!(start < end && end <= n, "slice_cols: [{start}, {end}) of {n}");
        let w = end - start;
        let mut out = Tensor::zeros(m, w);
        for i in 0..m {
            let src = self.value(a).row(i)[start..end].to_vec();
            out.data_mut()[i * w..(i + 1) * w].copy_from_slice(&src);
        }
        self.push(out, Op::SliceCols(a, start, end))
    }

    pub fn pick_per_row(&mut self, a: Var, cols: &[usize]) -> Var {
        let (m, n) = self.value(a).shape();
        assert_eq!(cols.len(), m, "pick_per_row: one column index per row");
        let mut out = Tensor::zeros(m, 1);
        for (i, &j) in cols.iter().enumerate() {
            assert!(j < n, "pick_per_row: column {j} out of {n}");
            out.set(i, 0, self.value(a).get(i, j));
        }
        self.push(out, Op::PickPerRow(a, cols.to_vec()))
    }

    pub fn row_sums(&mut self, a: Var) -> Var {
        let (m, _n) = self.value(a).shape();
        let mut out = Tensor::zeros(m, 1);
        for i in 0..m {
            let mut acc = T::zero();
            for &v in self.value(a).row(i) {
                acc += v;
            }
            out.set(i, 0, acc);
        }
        self.push(out, Op::RowSums(a))
    }

    pub fn sum_all(&mut self, a: Var) -> Var {
        let mut acc = T::zero();
        for &v in self.value(a).data() {
            acc += v;
        }
        self.push(Tensor::scalar(acc), Op::SumAll(a))
    }

    /// Reverse-mode gradients of a scalar `root` with respect to every node.
    ///
    /// # Panics
    /// If `root` is not `1×1`.
    pub fn backward(&self, root: Var) -> Gradients<T> {
        assert_eq!(
            self.value(root).shape(),
            (1, 1),
            "backward requires a scalar root"
        );
        let mut grads: Vec<Option<Tensor<T>>> = (0..self.nodes.len()).map(|_| None).collect();
        grads[root.0] = Some(Tensor::scalar(T::one()));

        for idx in (0..=root.0).rev() {
            let Some(g) = grads[idx].take() else {
                continue;
            };
            self.accumulate(idx, &g, &mut grads);
            grads[idx] = Some(g);
        }
        Gradients { grads }
    }

    fn add_grad(grads: &mut [Option<Tensor<T>>], v: Var, delta: Tensor<T>) {
        match &mut grads[v.0] {
            Some(existing) => {
                for (e, d) in existing.data_mut().iter_mut().zip(delta.data()) {
                    *e += *d;
                }
            }
            slot => *slot = Some(delta),
        }
    }

    #[allow(clippy::too_many_lines)]
    fn accumulate(&self, idx: usize, g: &Tensor<T>, grads: &mut [Option<Tensor<T>>]) {
        match &self.nodes[idx].op {
            Op::Leaf => {}
            Op::MatMul(a, b) => {
                // C = A·B: dA = g·Bᵀ, dB = Aᵀ·g.
                let av = self.value(*a);
                let bv = self.value(*b);
                let (m, k) = av.shape();
                let n = bv.cols();
                let mut da = Tensor::zeros(m, k);
                for i in 0..m {
                    for j in 0..k {
                        let mut acc = T::zero();
                        for l in 0..n {
                            acc += g.get(i, l) * bv.get(j, l);
                        }
                        da.set(i, j, acc);
                    }
                }
                let mut db = Tensor::zeros(k, n);
                for i in 0..k {
                    for j in 0..n {
                        let mut acc = T::zero();
                        for l in 0..m {
                            acc += av.get(l, i) * g.get(l, j);
                        }
                        db.set(i, j, acc);
                    }
                }
                Self::add_grad(grads, *a, da);
                Self::add_grad(grads, *b, db);
            }
            Op::MatMulNT(a, b) => {
                // C = A·Bᵀ: dA = g·B, dB = gᵀ·A.
                let av = self.value(*a);
                let bv = self.value(*b);
                let (m, k) = av.shape();
                let n = bv.rows();
                let mut da = Tensor::zeros(m, k);
                for i in 0..m {
                    for j in 0..k {
                        let mut acc = T::zero();
                        for l in 0..n {
                            acc += g.get(i, l) * bv.get(l, j);
                        }
                        da.set(i, j, acc);
                    }
                }
                let mut db = Tensor::zeros(n, k);
                for i in 0..n {
                    for j in 0..k {
                        let mut acc = T::zero();
                        for l in 0..m {
                            acc += g.get(l, i) * av.get(l, j);
                        }
                        db.set(i, j, acc);
                    }
                }
                Self::add_grad(grads, *a, da);
                Self::add_grad(grads, *b, db);
            }
            Op::Add(a, b) => {
                Self::add_grad(grads, *a, g.clone());
                Self::add_grad(grads, *b, g.clone());
            }
            Op::Sub(a, b) => {
                Self::add_grad(grads, *a, g.clone());
                let mut neg = g.clone();
                for v in neg.data_mut() {
                    *v = -*v;
                }
                Self::add_grad(grads, *b, neg);
            }
            Op::Mul(a, b) => {
                let mut da = g.clone();
                for (d, &bv) in da.data_mut().iter_mut().zip(self.value(*b).data()) {
                    *d *= bv;
                }
                let mut db = g.clone();
                for (d, &av) in db.data_mut().iter_mut().zip(self.value(*a).data()) {
                    *d *= av;
                }
                Self::add_grad(grads, *a, da);
                Self::add_grad(grads, *b, db);
            }
            Op::Scale(a, k) => {
                let mut da = g.clone();
                for d in da.data_mut() {
                    *d *= *k;
                }
                Self::add_grad(grads, *a, da);
            }
            Op::AddRow(a, row) => {
                Self::add_grad(grads, *a, g.clone());
                let (m, n) = g.shape();
                let mut drow = Tensor::zeros(1, n);
                for j in 0..n {
                    let mut acc = T::zero();
                    for i in 0..m {
                        acc += g.get(i, j);
                    }
                    drow.set(0, j, acc);
                }
                Self::add_grad(grads, *row, drow);
            }
            Op::Relu(a) => {
                let mut da = g.clone();
                for (d, &x) in da.data_mut().iter_mut().zip(self.value(*a).data()) {
                    if x <= T::zero() {
                        *d = T::zero();
                    }
                }
                Self::add_grad(grads, *a, da);
            }
            Op::Ln(a) => {
                let mut da = g.clone();
                for (d, &x) in da.data_mut().iter_mut().zip(self.value(*a).data()) {
                    *d /= x;
                }
                Self::add_grad(grads, *a, da);
            }
            Op::SoftmaxRows(a) => {
                // dx = y ∘ (g − Σ_j g_j y_j) per row.
                let y = &self.nodes[idx].value;
                let (m, n) = y.shape();
                let mut da = Tensor::zeros(m, n);
                for i in 0..m {
                    let mut dot = T::zero();
                    for j in 0..n {
                        dot += g.get(i, j) * y.get(i, j);
                    }
                    for j in 0..n {
                        da.set(i, j, y.get(i, j) * (g.get(i, j) - dot));
                    }
                }
                Self::add_grad(grads, *a, da);
            }
            Op::LayerNormRows { x, gamma, beta } => {
                let xv = self.value(*x);
                let gv = self.value(*gamma);
                let (m, n) = xv.shape();
                let eps = T::of_f64(LAYER_NORM_EPS);
                let inv_n = T::one() / T::of_usize(n);
                let mut dx = Tensor::zeros(m, n);
                let mut dgamma = Tensor::zeros(1, n);
                let mut dbeta = Tensor::zeros(1, n);
                for i in 0..m {
                    let row = xv.row(i);
                    let mut mean = T::zero();
                    for &v in row {
                        mean += v;
                    }
                    mean *= inv_n;
                    let mut var = T::zero();
                    for &v in row {
                        var += (v - mean) * (v - mean);
                    }
                    var *= inv_n;
                    let inv_std = T::one() / (var + eps).sqrt();

                    // d = g ∘ γ; dx = (d − mean(d) − x̂ · mean(d ∘ x̂)) / std.
                    let mut mean_d = T::zero();
                    let mut mean_dx_hat = T::zero();
                    let mut d_buf = vec![T::zero(); n];
                    let mut xhat_buf = vec![T::zero(); n];
                    for j in 0..n {
                        let xhat = (row[j] - mean) * inv_std;
                        let d = g.get(i, j) * gv.get(0, j);
                        d_buf[j] = d;
                        xhat_buf[j] = xhat;
                        mean_d += d;
                        mean_dx_hat += d * xhat;
                        dgamma.set(0, j, dgamma.get(0, j) + g.get(i, j) * xhat);
                        dbeta.set(0, j, dbeta.get(0, j) + g.get(i, j));
                    }
                    mean_d *= inv_n;
                    mean_dx_hat *= inv_n;
                    for j in 0..n {
                        dx.set(
                            i,
                            j,
                            (d_buf[j] - mean_d - xhat_buf[j] * mean_dx_hat) * inv_std,
                        );
                    }
                }
                Self::add_grad(grads, *x, dx);
                Self::add_grad(grads, *gamma, dgamma);
                Self::add_grad(grads, *beta, dbeta);
            }
            Op::Lookup(table, indices) => {
                let (rows, n) = self.value(*table).shape();
                let mut dt = Tensor::zeros(rows, n);
                for (r, &idx) in indices.iter().enumerate() {
                    for j in 0..n {
                        dt.set(idx, j, dt.get(idx, j) + g.get(r, j));
                    }
                }
                Self::add_grad(grads, *table, dt);
            }
            Op::MaskedFill(a, mask, _) => {
                let mut da = g.clone();
                for (d, &masked) in da.data_mut().iter_mut().zip(mask) {
                    if masked {
                        *d = T::zero();
                    }
                }
                Self::add_grad(grads, *a, da);
            }
            Op::ConcatCols(parts) => {
                let m = g.rows();
                let mut offset = 0;
                for &p in parts {
                    let w = self.value(p).cols();
                    let mut dp = Tensor::zeros(m, w);
                    for i in 0..m {
                        for j in 0..w {
                            dp.set(i, j, g.get(i, offset + j));
                        }
                    }
                    Self::add_grad(grads, p, dp);
                    offset += w;
                }
            }
            Op::SliceCols(a, start, _end) => {
                let (m, n) = self.value(*a).shape();
                let w = g.cols();
                let mut da = Tensor::zeros(m, n);
                for i in 0..m {
                    for j in 0..w {
                        da.set(i, start + j, g.get(i, j));
                    }
                }
                Self::add_grad(grads, *a, da);
            }
            Op::PickPerRow(a, cols) => {
                let (m, n) = self.value(*a).shape();
                let mut da = Tensor::zeros(m, n);
                for (i, &j) in cols.iter().enumerate() {
                    da.set(i, j, g.get(i, 0));
                }
                Self::add_grad(grads, *a, da);
            }
            Op::RowSums(a) => {
                let (m, n) = self.value(*a).shape();
                let mut da = Tensor::zeros(m, n);
                for i in 0..m {
                    for j in 0..n {
                        da.set(i, j, g.get(i, 0));
                    }
                }
                Self::add_grad(grads, *a, da);
            }
            Op::SumAll(a) => {
                let (m, n) = self.value(*a).shape();
                let g0 = g.get(0, 0);
                let mut da = Tensor::zeros(m, n);
                for d in da.data_mut() {
                    *d = g0;
                }
                Self::add_grad(grads, *a, da);
            }
        }
    }
}
