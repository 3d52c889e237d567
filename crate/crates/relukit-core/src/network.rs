//! Layered ReLU networks with bounded parameters and explicit sparsity.
//!
//! A network with `L` hidden layers computes
//!
//! ```text
//!   x ↦ ψ( W_L σ_{v_L} W_{L-1} σ_{v_{L-1}} ⋯ W_1 σ_{v_1} W_0 x )
//! ```
//!
//! where `σ_v(y)_k = max(y_k − v_k, 0)` is the shifted ReLU and `ψ` is the
//! declared output activation (identity or softmax). Layer `j` stores the
//! pair `(W_j, v_j)`; the shift `v_j` acts on the *input* of `W_j`, and by
//! convention `v_0` is identically zero (no rectification of the raw input).
//!
//! The class membership constraint is that every stored parameter is bounded
//! by one in absolute value; [`Network::validate`] reports violations instead
//! of failing, so that out-of-class networks can still be inspected.
//!
//! Weight matrices are stored sparsely (per-row column/value pairs). The
//! assembled approximation networks reach widths in the tens of thousands
//! with a few nonzeros per row, so dense storage is not an option; the JSON
//! interchange format is nevertheless dense, see the `relukit` companion
//! crate.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{incompatible, CoreError, Result};

/// Output activation `ψ` of a network.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputActivation {
    /// `ψ = id`; the raw affine output.
    Identity,
    /// `ψ = Φ`, the softmax map onto the probability simplex.
    Softmax,
}

impl fmt::Display for OutputActivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OutputActivation::Identity => f.write_str("identity"),
            OutputActivation::Softmax => f.write_str("softmax"),
        }
    }
}

/// One layer: the weight matrix `W_j` (shape `m_{j+1} × m_j`, sparse rows)
/// together with the shift vector `v_j` of length `m_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    in_width: usize,
    /// `rows[r]` holds the nonzero entries `(col, value)` of row `r`,
    /// sorted by column.
    rows: Vec<Vec<(u32, f64)>>,
    shift: Vec<f64>,
}

impl Layer {
    /// Build a layer from sparse rows. Entries that are exactly zero are
    /// dropped; duplicate column indices within a row are rejected.
    pub fn new(in_width: usize, rows: Vec<Vec<(u32, f64)>>, shift: Vec<f64>) -> Result<Layer> {
        if shift.len() != in_width {
            return Err(CoreError::Shape {
                context: "layer shift length",
                expected: in_width,
                got: shift.len(),
            });
        }
        let mut clean_rows = Vec::with_capacity(rows.len());
        for row in rows {
            let mut clean: Vec<(u32, f64)> = row.into_iter().filter(|&(_, v)| v != 0.0).collect();
            clean.sort_unstable_by_key(|&(c, _)| c);
            for pair in clean.windows(2) {
                if pair[0].0 == pair[1].0 {
                    return Err(incompatible("layer row", "duplicate column index"));
                }
            }
            if let Some(&(c, _)) = clean.last() {
                if c as usize >= in_width {
                    return Err(CoreError::Shape {
                        context: "layer column index",
                        expected: in_width,
                        got: c as usize,
                    });
                }
            }
            clean_rows.push(clean);
        }
        Ok(Layer { in_width, rows: clean_rows, shift })
    }

    /// Build a layer from dense rows.
    pub fn from_dense(rows: &[Vec<f64>], shift: Vec<f64>) -> Result<Layer> {
        let in_width = shift.len();
        let sparse = rows
            .iter()
            .map(|row| {
                if row.len() != in_width {
                    return Err(CoreError::Shape {
                        context: "dense layer row length",
                        expected: in_width,
                        got: row.len(),
                    });
                }
                Ok(row
                    .iter()
                    .enumerate()
                    .filter(|(_, &v)| v != 0.0)
                    .map(|(c, &v)| (c as u32, v))
                    .collect())
            })
            .collect::<Result<Vec<_>>>()?;
        Layer::new(in_width, sparse, shift)
    }

    /// Identity-forwarding layer of the given width (zero shift).
    pub fn identity(width: usize) -> Layer {
        Layer {
            in_width: width,
            rows: (0..width).map(|i| vec![(i as u32, 1.0)]).collect(),
            shift: vec![0.0; width],
        }
    }

    pub fn in_width(&self) -> usize {
        self.in_width
    }

    pub fn out_width(&self) -> usize {
        self.rows.len()
    }

    pub fn shift(&self) -> &[f64] {
        &self.shift
    }

    pub fn rows(&self) -> &[Vec<(u32, f64)>] {
        &self.rows
    }

    pub(crate) fn rows_mut(&mut self) -> &mut Vec<Vec<(u32, f64)>> {
        &mut self.rows
    }

    pub(crate) fn shift_mut(&mut self) -> &mut Vec<f64> {
        &mut self.shift
    }

    pub(crate) fn set_in_width(&mut self, w: usize) {
        self.in_width = w;
    }

    /// Dense `m_{j+1} × m_j` matrix, row-major.
    pub fn dense_rows(&self) -> Vec<Vec<f64>> {
        self.rows
            .iter()
            .map(|row| {
                let mut dense = vec![0.0; self.in_width];
                for &(c, v) in row {
                    dense[c as usize] = v;
                }
                dense
            })
            .collect()
    }

    fn nonzeros(&self) -> usize {
        self.rows.iter().map(Vec::len).sum::<usize>()
            + self.shift.iter().filter(|&&v| v != 0.0).count()
    }

    fn matvec(&self, s: &[f64], out: &mut Vec<f64>) {
        out.clear();
        out.extend(self.rows.iter().map(|row| {
            let mut acc = 0.0;
            for &(c, w) in row {
                acc += w * s[c as usize];
            }
            acc
        }));
    }
}

/// Which parameter a [`Violation::ParameterBound`] refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    Weight,
    Shift,
}

/// A single violated class invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Some `|parameter| > 1`. For weights, `index` is `(row, col)`; for
    /// shifts, `index.0` is the coordinate and `index.1` is unused.
    ParameterBound { layer: usize, kind: ParamKind, index: (usize, usize), value: f64 },
    /// The input shift `v_0` must be identically zero.
    NonzeroInputShift { index: usize, value: f64 },
    /// Internal width bookkeeping is inconsistent.
    Shape { detail: String },
}

/// Result of [`Network::validate`]: empty means the network is a member of
/// the bounded-parameter class for its architecture.
#[derive(Debug, Clone, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Architecture class label: depth `L`, width vector `m_0..m_{L+1}`,
/// sparsity budget `s` and output activation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArchitectureSpec {
    pub depth: usize,
    pub widths: Vec<usize>,
    pub sparsity: usize,
    pub output: OutputActivation,
}

impl ArchitectureSpec {
    pub fn new(
        depth: usize,
        widths: Vec<usize>,
        sparsity: usize,
        output: OutputActivation,
    ) -> Result<ArchitectureSpec> {
        if widths.len() != depth + 2 {
            return Err(CoreError::Shape {
                context: "architecture widths length",
                expected: depth + 2,
                got: widths.len(),
            });
        }
        if widths.iter().any(|&w| w == 0) {
            return Err(incompatible("architecture widths", "widths must be positive"));
        }
        Ok(ArchitectureSpec { depth, widths, sparsity, output })
    }

    /// The tightest spec a given network fits (sparsity = actual count).
    pub fn of(net: &Network) -> ArchitectureSpec {
        ArchitectureSpec {
            depth: net.depth(),
            widths: net.widths(),
            sparsity: net.sparsity(),
            output: net.output_activation(),
        }
    }

    /// Whether `net` is a member of this class by shape and sparsity
    /// (parameter bounds are checked by [`Network::validate`]).
    pub fn admits(&self, net: &Network) -> bool {
        net.depth() == self.depth
            && net.widths() == self.widths
            && net.sparsity() <= self.sparsity
            && net.output_activation() == self.output
    }
}

/// An immutable ReLU network. Evaluation is pure; values can be shared
/// freely across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
    output: OutputActivation,
}

impl Network {
    /// Assemble a network from layers `(W_0, v_0), …, (W_L, v_L)`.
    /// Consecutive widths must chain; `v_0 ≠ 0` and out-of-bound parameters
    /// are permitted here and reported by [`Network::validate`].
    pub fn new(layers: Vec<Layer>, output: OutputActivation) -> Result<Network> {
        if layers.is_empty() {
            return Err(incompatible("network", "at least one layer required"));
        }
        for j in 1..layers.len() {
            if layers[j].in_width() != layers[j - 1].out_width() {
                return Err(CoreError::Shape {
                    context: "layer width chain",
                    expected: layers[j - 1].out_width(),
                    got: layers[j].in_width(),
                });
            }
        }
        Ok(Network { layers, output })
    }

    /// Number of hidden layers `L`.
    pub fn depth(&self) -> usize {
        self.layers.len() - 1
    }

    /// Width vector `(m_0, …, m_{L+1})`.
    pub fn widths(&self) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.layers.len() + 1);
        w.push(self.layers[0].in_width());
        w.extend(self.layers.iter().map(Layer::out_width));
        w
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].in_width()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().expect("nonempty").out_width()
    }

    /// Largest hidden-layer width (0 if there is no hidden layer).
    pub fn max_hidden_width(&self) -> usize {
        let w = self.widths();
        w[1..w.len() - 1].iter().copied().max().unwrap_or(0)
    }

    pub fn output_activation(&self) -> OutputActivation {
        self.output
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub(crate) fn layers_mut(&mut self) -> &mut Vec<Layer> {
        &mut self.layers
    }

    pub fn set_output_activation(&mut self, output: OutputActivation) {
        self.output = output;
    }

    /// Number of nonzero weights and shifts, `Σ_j (‖W_j‖_0 + ‖v_j‖_0)`.
    pub fn sparsity(&self) -> usize {
        self.layers.iter().map(Layer::nonzeros).sum()
    }

    /// Forward pass on a single input.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.input_width() {
            return Err(CoreError::Shape {
                context: "network input",
                expected: self.input_width(),
                got: x.len(),
            });
        }
        let mut act = x.to_vec();
        let mut next = Vec::new();
        for (j, layer) in self.layers.iter().enumerate() {
            if j > 0 {
                for (a, &v) in act.iter_mut().zip(layer.shift()) {
                    *a = (*a - v).max(0.0);
                }
            }
            layer.matvec(&act, &mut next);
            core::mem::swap(&mut act, &mut next);
        }
        if self.output == OutputActivation::Softmax {
            softmax_in_place(&mut act);
        }
        Ok(act)
    }

    /// Forward pass on a batch of `n` inputs, flattened point-major
    /// (`xs[p*m_0 .. (p+1)*m_0]` is point `p`). Returns the outputs in the
    /// same layout. Results are identical to per-point [`Network::evaluate`].
    pub fn evaluate_batch(&self, xs: &[f64], n: usize) -> Result<Vec<f64>> {
        let m0 = self.input_width();
        if xs.len() != n * m0 {
            return Err(CoreError::Shape {
                context: "batch input",
                expected: n * m0,
                got: xs.len(),
            });
        }
        // Feature-major buffers so each sparse row streams contiguously.
        let mut act = vec![0.0; m0 * n];
        for p in 0..n {
            for i in 0..m0 {
                act[i * n + p] = xs[p * m0 + i];
            }
        }
        let mut next: Vec<f64> = Vec::new();
        for (j, layer) in self.layers.iter().enumerate() {
            if j > 0 {
                for (i, &v) in layer.shift().iter().enumerate() {
                    for a in &mut act[i * n..(i + 1) * n] {
                        *a = (*a - v).max(0.0);
                    }
                }
            }
            let m_out = layer.out_width();
            next.clear();
            next.resize(m_out * n, 0.0);
            for (r, row) in layer.rows().iter().enumerate() {
                let out = &mut next[r * n..(r + 1) * n];
                for &(c, w) in row {
                    let src = &act[c as usize * n..(c as usize + 1) * n];
                    for (o, &s) in out.iter_mut().zip(src) {
                        *o += w * s;
                    }
                }
            }
            core::mem::swap(&mut act, &mut next);
        }
        let m_out = self.output_width();
        let mut out = vec![0.0; m_out * n];
        for p in 0..n {
            for i in 0..m_out {
                out[p * m_out + i] = act[i * n + p];
            }
        }
        if self.output == OutputActivation::Softmax {
            for p in 0..n {
                softmax_slice(&mut out[p * m_out..(p + 1) * m_out]);
            }
        }
        Ok(out)
    }

    /// Check the class invariants: shapes consistent, all `|parameters| ≤ 1`
    /// and `v_0 ≡ 0`. An empty report means membership in the
    /// bounded-parameter class of this architecture.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for (j, layer) in self.layers.iter().enumerate() {
            if layer.shift().len() != layer.in_width() {
                violations.push(Violation::Shape {
                    detail: alloc::format!("layer {j}: shift length != in_width"),
                });
            }
            if j > 0 && layer.in_width() != self.layers[j - 1].out_width() {
                violations.push(Violation::Shape {
                    detail: alloc::format!("layer {j}: width chain broken"),
                });
            }
            for (r, row) in layer.rows().iter().enumerate() {
                for &(c, v) in row {
                    if v.abs() > 1.0 {
                        violations.push(Violation::ParameterBound {
                            layer: j,
                            kind: ParamKind::Weight,
                            index: (r, c as usize),
                            value: v,
                        });
                    }
                }
            }
            for (i, &v) in layer.shift().iter().enumerate() {
                if j == 0 && v != 0.0 {
                    violations.push(Violation::NonzeroInputShift { index: i, value: v });
                } else if v.abs() > 1.0 {
                    violations.push(Violation::ParameterBound {
                        layer: j,
                        kind: ParamKind::Shift,
                        index: (i, 0),
                        value: v,
                    });
                }
            }
        }
        ValidationReport { violations }
    }
}

/// Per-column propagation plan of one layer inside [`SparseEvaluator`].
///
/// Rows with a single incoming weight (`exclusive`) can be resolved by a
/// threshold test against the following rectification — the stacked
/// constructions have fan-out columns feeding thousands of such rows of
/// which only a couple survive at any input, so they are stored sorted by
/// survival threshold and binary-searched instead of touched one by one.
struct ColPlan {
    /// Entries whose target row has in-degree ≥ 2 (accumulated normally).
    shared: Vec<(u32, f64)>,
    /// Degree-1 entries with `w > 0`, sorted by `θ = shift/w` ascending:
    /// the unit survives iff `value > θ`, with value `w·val − shift`.
    pos: Vec<(f64, u32, f64, f64)>,
    /// Degree-1 entries with `w < 0`, sorted by `θ = shift/w` descending:
    /// the unit survives iff `value < θ`.
    neg: Vec<(f64, u32, f64, f64)>,
}

/// Column-major evaluation plan that skips inactive units. The assembled
/// approximation networks are wide stacks of compactly supported blocks, so
/// at any input only a handful of units are nonzero; propagating just the
/// active set makes grid sweeps orders of magnitude faster. Contributions
/// accumulate in the same (ascending-column) order as [`Network::evaluate`],
/// so the results are identical.
pub struct SparseEvaluator<'a> {
    net: &'a Network,
    plans: Vec<Vec<ColPlan>>,
    /// Per layer `j ≥ 1`: units whose shift is negative, with their
    /// baseline value `σ(0 − v) > 0`; these are active without input.
    bias_units: Vec<Vec<(u32, f64)>>,
    max_width: usize,
}

/// Reusable per-thread buffers for [`SparseEvaluator::evaluate`].
pub struct EvalScratch {
    pre: Vec<f64>,
    stamp: Vec<u32>,
    epoch: u32,
    active: Vec<(u32, f64)>,
    touched: Vec<u32>,
    survivors: Vec<(u32, f64)>,
}

impl EvalScratch {
    fn next_epoch(&mut self) {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
    }
}

impl<'a> SparseEvaluator<'a> {
    pub fn new(net: &'a Network) -> SparseEvaluator<'a> {
        let layers = net.layers();
        let mut plans = Vec::with_capacity(layers.len());
        let mut bias_units = Vec::with_capacity(layers.len());
        for (j, layer) in layers.iter().enumerate() {
            let next_shift = layers.get(j + 1).map(|l| l.shift());
            let mut cols: Vec<ColPlan> = (0..layer.in_width())
                .map(|_| ColPlan { shared: Vec::new(), pos: Vec::new(), neg: Vec::new() })
                .collect();
            for (r, row) in layer.rows().iter().enumerate() {
                for &(c, w) in row {
                    let plan = &mut cols[c as usize];
                    match next_shift {
                        // The threshold form applies when a rectification
                        // follows, the row has a single contribution, and
                        // the shift is nonnegative (negative shifts belong
                        // to the bias bookkeeping, which assumes untouched
                        // rows have zero pre-activation).
                        Some(shift) if row.len() == 1 && shift[r] >= 0.0 => {
                            let theta = shift[r] / w;
                            if w > 0.0 {
                                plan.pos.push((theta, r as u32, w, shift[r]));
                            } else {
                                plan.neg.push((theta, r as u32, w, shift[r]));
                            }
                        }
                        _ => plan.shared.push((r as u32, w)),
                    }
                }
            }
            for plan in &mut cols {
                // Ties broken by row index so equal-threshold units keep
                // their dense accumulation order.
                plan.pos.sort_unstable_by(|a, b| {
                    a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1))
                });
                plan.neg.sort_unstable_by(|a, b| {
                    b.0.partial_cmp(&a.0).expect("finite").then(a.1.cmp(&b.1))
                });
            }
            plans.push(cols);
            let bias = if j == 0 {
                Vec::new()
            } else {
                layer
                    .shift()
                    .iter()
                    .enumerate()
                    .filter(|&(_, &v)| v < 0.0)
                    .map(|(i, &v)| (i as u32, -v))
                    .collect()
            };
            bias_units.push(bias);
        }
        let max_width = net.widths().into_iter().max().unwrap_or(0);
        SparseEvaluator { net, plans, bias_units, max_width }
    }

    pub fn scratch(&self) -> EvalScratch {
        EvalScratch {
            pre: vec![0.0; self.max_width],
            stamp: vec![0; self.max_width],
            epoch: 0,
            active: Vec::new(),
            touched: Vec::new(),
            survivors: Vec::new(),
        }
    }

    /// Number of active units per layer for one input; diagnostic for the
    /// sweep drivers' evaluator choice.
    #[doc(hidden)]
    pub fn active_profile(&self, x: &[f64], s: &mut EvalScratch) -> Result<Vec<usize>> {
        let mut counts = Vec::new();
        self.evaluate_inner(x, s, Some(&mut counts))?;
        Ok(counts)
    }

    /// Forward pass; identical results to [`Network::evaluate`].
    pub fn evaluate(&self, x: &[f64], s: &mut EvalScratch) -> Result<Vec<f64>> {
        self.evaluate_inner(x, s, None)
    }

    fn evaluate_inner(
        &self,
        x: &[f64],
        s: &mut EvalScratch,
        mut counts: Option<&mut Vec<usize>>,
    ) -> Result<Vec<f64>> {
        if x.len() != self.net.input_width() {
            return Err(CoreError::Shape {
                context: "network input",
                expected: self.net.input_width(),
                got: x.len(),
            });
        }
        s.active.clear();
        for (i, &v) in x.iter().enumerate() {
            if v != 0.0 {
                s.active.push((i as u32, v));
            }
        }
        let layers = self.net.layers();
        for (j, layer) in layers.iter().enumerate() {
            if let Some(counts) = counts.as_deref_mut() {
                counts.push(s.active.len());
            }
            s.next_epoch();
            s.touched.clear();
            s.survivors.clear();
            for &(c, val) in s.active.iter() {
                let plan = &self.plans[j][c as usize];
                for &(r, w) in &plan.shared {
                    let r = r as usize;
                    if s.stamp[r] != s.epoch {
                        s.stamp[r] = s.epoch;
                        s.pre[r] = 0.0;
                        s.touched.push(r as u32);
                    }
                    s.pre[r] += w * val;
                }
                // Exclusive rows: only the survivors of the following
                // rectification are materialized (their shifts are
                // nonnegative, so they never appear in the bias list). The
                // sorted thresholds pre-filter; the exact sign test decides,
                // with a one-ulp window past the cut so that rounding in
                // θ = shift/w cannot change the survivor set.
                let window = 1e-14 * (1.0 + val.abs());
                let cut = plan.pos.partition_point(|&(theta, _, _, _)| theta < val);
                for &(_, r, w, shift) in &plan.pos[..cut] {
                    let v = w * val - shift;
                    if v > 0.0 {
                        s.survivors.push((r, v));
                    }
                }
                for &(theta, r, w, shift) in &plan.pos[cut..] {
                    if theta - val > window {
                        break;
                    }
                    let v = w * val - shift;
                    if v > 0.0 {
                        s.survivors.push((r, v));
                    }
                }
                let cut = plan.neg.partition_point(|&(theta, _, _, _)| theta > val);
                for &(_, r, w, shift) in &plan.neg[..cut] {
                    let v = w * val - shift;
                    if v > 0.0 {
                        s.survivors.push((r, v));
                    }
                }
                for &(theta, r, w, shift) in &plan.neg[cut..] {
                    if val - theta > window {
                        break;
                    }
                    let v = w * val - shift;
                    if v > 0.0 {
                        s.survivors.push((r, v));
                    }
                }
            }
            if j + 1 == layers.len() {
                // Output layer: materialize densely, no rectification
                // (exclusive entries were not split for the last layer).
                let mut out = vec![0.0; layer.out_width()];
                for &r in &s.touched {
                    out[r as usize] = s.pre[r as usize];
                }
                if self.net.output_activation() == OutputActivation::Softmax {
                    softmax_slice(&mut out);
                }
                return Ok(out);
            }
            // Rectify the shared rows and merge in bias-activated units.
            let shift = layers[j + 1].shift();
            for &r in &s.touched {
                let v = (s.pre[r as usize] - shift[r as usize]).max(0.0);
                if v != 0.0 {
                    s.survivors.push((r, v));
                }
            }
            for &(bi, bval) in &self.bias_units[j + 1] {
                if s.stamp[bi as usize] != s.epoch {
                    s.survivors.push((bi, bval));
                }
            }
            // Restoring index order keeps accumulation identical to the
            // dense pass. Above this size the active set comes from a
            // single fan-out column whose threshold order already delivers
            // every consumer row's units in column order, so the global
            // sort is skipped.
            if s.survivors.len() <= 512 {
                s.survivors.sort_unstable_by_key(|&(r, _)| r);
            }
            core::mem::swap(&mut s.active, &mut s.survivors);
        }
        unreachable!("network has at least one layer");
    }
}

fn softmax_in_place(act: &mut Vec<f64>) {
    softmax_slice(act.as_mut_slice());
}

/// Softmax with max-subtraction for overflow safety.
fn softmax_slice(a: &mut [f64]) {
    let m = a.iter().fold(f64::NEG_INFINITY, |acc, &v| acc.max(v));
    let mut sum = 0.0;
    for v in a.iter_mut() {
        *v = (*v - m).exp();
        sum += *v;
    }
    for v in a.iter_mut() {
        *v /= sum;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_relu() -> Network {
        // W_0 = W_1 = 1x1 identity, zero shifts: x ↦ σ(x).
        Network::new(
            vec![Layer::identity(1), Layer::identity(1)],
            OutputActivation::Identity,
        )
        .unwrap()
    }

    #[test]
    fn identity_composition_on_nonnegative_input() {
        let net = single_relu();
        assert_eq!(net.evaluate(&[0.7]).unwrap(), vec![0.7]);
    }

    #[test]
    fn relu_kills_negative_input() {
        let net = single_relu();
        assert_eq!(net.evaluate(&[-0.3]).unwrap(), vec![0.0]);
    }

    #[test]
    fn softmax_symmetry_on_zero_preactivation() {
        // Two-output net whose final pre-activation is (0, 0).
        let net = Network::new(
            vec![
                Layer::identity(1),
                Layer::from_dense(&[vec![0.0], vec![0.0]], vec![0.0]).unwrap(),
            ],
            OutputActivation::Softmax,
        )
        .unwrap();
        let out = net.evaluate(&[0.3]).unwrap();
        assert_eq!(out, vec![0.5, 0.5]);
    }

    #[test]
    fn sparsity_counts_nonzero_entries() {
        // All-zero one-hidden-layer net.
        let zero = Network::new(
            vec![
                Layer::from_dense(&[vec![0.0]], vec![0.0]).unwrap(),
                Layer::from_dense(&[vec![0.0]], vec![0.0]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        assert_eq!(zero.sparsity(), 0);

        // Doubling block: W_0 = (1,1)^T, v_1 = 0, W_1 = (1,1): four nonzeros.
        let double = Network::new(
            vec![
                Layer::from_dense(&[vec![1.0], vec![1.0]], vec![0.0]).unwrap(),
                Layer::from_dense(&[vec![1.0, 1.0]], vec![0.0, 0.0]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        assert_eq!(double.sparsity(), 4);
        assert_eq!(double.evaluate(&[0.3]).unwrap(), vec![0.6]);
    }

    #[test]
    fn validate_flags_parameter_bound() {
        let net = Network::new(
            vec![
                Layer::from_dense(&[vec![1.5]], vec![0.0]).unwrap(),
                Layer::identity(1),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let report = net.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(
            report.violations[0],
            Violation::ParameterBound { layer: 0, kind: ParamKind::Weight, .. }
        ));
    }

    #[test]
    fn validate_flags_nonzero_input_shift() {
        let net = Network::new(
            vec![
                Layer::new(1, vec![vec![(0, 1.0)]], vec![0.25]).unwrap(),
                Layer::identity(1),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let report = net.validate();
        assert!(matches!(report.violations[0], Violation::NonzeroInputShift { .. }));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let net = single_relu();
        assert!(matches!(net.evaluate(&[0.1, 0.2]), Err(CoreError::Shape { .. })));
    }

    #[test]
    fn sparse_evaluator_matches_dense_bitwise() {
        let net = Network::new(
            vec![
                Layer::from_dense(&[vec![0.5, -0.5], vec![0.25, 0.75], vec![0.0, 0.0]], vec![0.0, 0.0])
                    .unwrap(),
                Layer::from_dense(
                    &[vec![1.0, -1.0, 0.3], vec![0.5, 0.5, -0.2]],
                    vec![0.1, -0.2, -0.4],
                )
                .unwrap(),
                Layer::from_dense(&[vec![0.7, -0.9]], vec![-0.3, 0.2]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let eval = SparseEvaluator::new(&net);
        let mut scratch = eval.scratch();
        for i in 0..200 {
            let x = [-1.5 + 3.0 * (i as f64) / 199.0, 1.5 - 3.0 * (i as f64) / 199.0];
            let dense = net.evaluate(&x).unwrap();
            let sparse = eval.evaluate(&x, &mut scratch).unwrap();
            assert_eq!(dense, sparse, "x={x:?}");
        }
        assert_eq!(eval.evaluate(&[0.0, 0.0], &mut scratch).unwrap(), net.evaluate(&[0.0, 0.0]).unwrap());
    }

    #[test]
    fn batch_matches_single_point_evaluation() {
        let net = Network::new(
            vec![
                Layer::from_dense(&[vec![0.5, -0.5], vec![0.25, 0.75]], vec![0.0, 0.0]).unwrap(),
                Layer::from_dense(&[vec![1.0, -1.0], vec![0.5, 0.5]], vec![0.1, -0.2]).unwrap(),
            ],
            OutputActivation::Softmax,
        )
        .unwrap();
        let pts = [[0.3, 0.9], [-1.0, 0.4], [0.0, 0.0], [2.0, -3.0]];
        let flat: Vec<f64> = pts.iter().flatten().copied().collect();
        let batch = net.evaluate_batch(&flat, pts.len()).unwrap();
        for (p, x) in pts.iter().enumerate() {
            let single = net.evaluate(x).unwrap();
            assert_eq!(&batch[p * 2..(p + 1) * 2], single.as_slice());
        }
    }
}
