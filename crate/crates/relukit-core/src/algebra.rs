//! Network calculus: composition, parallelization, depth synchronization,
//! enlarging, inactive-node removal, sign extension and parameter counting,
//! plus the reusable blocks `scale_net` (computes `C·(x)₊` with parameters
//! bounded by one), `mult_net` (approximate products on `[0,1]^D` with exact
//! zero absorption) and identity-forwarding chains.
//!
//! All constructors emit networks whose parameters are bounded by one in
//! absolute value. Identity forwarding through prepended layers is exact on
//! nonnegative inputs only; every internal use feeds nonnegative values.

use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{incompatible, invalid, CoreError, Result};
use crate::network::{ArchitectureSpec, Layer, Network, OutputActivation};

/// Compose two networks into `g ∘ σ_v(f)`: the shift `v` is applied to the
/// output of `f` before rectification, then `g` runs on the result.
///
/// `f` must have identity output; the composition takes `g`'s output
/// activation. Depth adds as `L_f + L_g + 1` and sparsity is bounded by
/// `s_f + s_g + ‖v‖₀`.
pub fn compose(f: &Network, g: &Network, v: &[f64]) -> Result<Network> {
    if f.output_activation() != OutputActivation::Identity {
        return Err(incompatible("compose", "inner network must have identity output"));
    }
    if f.output_width() != g.input_width() {
        return Err(CoreError::Shape {
            context: "compose widths",
            expected: f.output_width(),
            got: g.input_width(),
        });
    }
    if v.len() != f.output_width() {
        return Err(CoreError::Shape {
            context: "composition shift length",
            expected: f.output_width(),
            got: v.len(),
        });
    }
    let mut layers = f.layers().to_vec();
    let g_layers = g.layers();
    let mut junction = g_layers[0].clone();
    *junction.shift_mut() = v.to_vec();
    layers.push(junction);
    layers.extend_from_slice(&g_layers[1..]);
    Network::new(layers, g.output_activation())
}

/// Stack two equal-depth networks over a shared input: `h(x) = (f(x), g(x))`.
/// Hidden widths add; weight matrices become block-diagonal except for the
/// first, which reads the common input.
pub fn parallelize(f: &Network, g: &Network) -> Result<Network> {
    parallelize_many(&[f, g])
}

/// k-ary version of [`parallelize`]; all networks must share input width,
/// depth and identity output.
pub fn parallelize_many(nets: &[&Network]) -> Result<Network> {
    let first = *nets.first().ok_or_else(|| invalid("parallelize", "empty network list"))?;
    let depth = first.depth();
    let m0 = first.input_width();
    for net in nets {
        if net.output_activation() != OutputActivation::Identity {
            return Err(incompatible("parallelize", "networks must have identity output"));
        }
        if net.depth() != depth {
            return Err(incompatible("parallelize", "depth mismatch (use depth_synchronize)"));
        }
        if net.input_width() != m0 {
            return Err(CoreError::Shape {
                context: "parallelize input width",
                expected: m0,
                got: net.input_width(),
            });
        }
    }
    let mut layers = Vec::with_capacity(depth + 1);
    for j in 0..=depth {
        let mut rows = Vec::new();
        let mut shift = Vec::new();
        let mut offset = 0u32;
        for net in nets {
            let layer = &net.layers()[j];
            if j == 0 {
                rows.extend_from_slice(layer.rows());
            } else {
                rows.extend(
                    layer
                        .rows()
                        .iter()
                        .map(|row| row.iter().map(|&(c, w)| (c + offset, w)).collect::<Vec<_>>()),
                );
                shift.extend_from_slice(layer.shift());
                offset += layer.in_width() as u32;
            }
        }
        if j == 0 {
            shift = vec![0.0; m0];
        }
        let in_width = if j == 0 { m0 } else { shift.len() };
        layers.push(Layer::new(in_width, rows, shift)?);
    }
    Network::new(layers, OutputActivation::Identity)
}

/// Prepend `a` identity-forwarding ReLU layers of the input width. On the
/// nonnegative orthant evaluation is unchanged; negative coordinates clamp
/// to zero at entry. Sparsity increases by exactly `a · m_0`.
pub fn depth_synchronize(f: &Network, a: usize) -> Result<Network> {
    if a == 0 {
        return Err(invalid("depth_synchronize", "a must be positive"));
    }
    let m0 = f.input_width();
    let mut layers = Vec::with_capacity(f.layers().len() + a);
    for _ in 0..a {
        layers.push(Layer::identity(m0));
    }
    layers.extend_from_slice(f.layers());
    Network::new(layers, f.output_activation())
}

/// Zero-pad a network into a larger architecture of the same depth and
/// output width. Evaluation is unchanged (extra input coordinates are
/// ignored, extra hidden units are dead); sparsity is unchanged.
pub fn embed(net: &Network, target: &ArchitectureSpec) -> Result<Network> {
    let widths = net.widths();
    if target.depth != net.depth() {
        return Err(incompatible("embed", "depth mismatch"));
    }
    if target.output != net.output_activation() {
        return Err(incompatible("embed", "output activation mismatch"));
    }
    if *target.widths.last().unwrap() != *widths.last().unwrap() {
        return Err(incompatible("embed", "output width must be preserved"));
    }
    if target.widths.iter().zip(&widths).any(|(&t, &w)| t < w) {
        return Err(incompatible("embed", "target widths must dominate componentwise"));
    }
    if target.sparsity < net.sparsity() {
        return Err(incompatible("embed", "target sparsity below network sparsity"));
    }
    let mut layers = Vec::with_capacity(net.layers().len());
    for (j, layer) in net.layers().iter().enumerate() {
        let mut padded = layer.clone();
        padded.set_in_width(target.widths[j]);
        padded.shift_mut().resize(target.widths[j], 0.0);
        padded.rows_mut().resize(target.widths[j + 1], Vec::new());
        layers.push(padded);
    }
    Network::new(layers, net.output_activation())
}

/// Delete hidden units that cannot influence the output: units with an
/// all-zero incoming row and zero shift (value identically zero) and units
/// with an all-zero outgoing column (value never read). Iterates until no
/// unit qualifies; the computed function is unchanged and the surviving
/// hidden widths are bounded by the sparsity.
pub fn remove_inactive(net: &Network) -> Network {
    let mut layers = net.layers().to_vec();
    loop {
        let mut changed = false;
        for h in 1..layers.len() {
            let width = layers[h].in_width();
            let mut keep = vec![false; width];
            let incoming = &layers[h - 1];
            let here = &layers[h];
            let mut used = vec![false; width];
            for row in here.rows() {
                for &(c, _) in row {
                    used[c as usize] = true;
                }
            }
            for i in 0..width {
                let alive_in = !incoming.rows()[i].is_empty() || here.shift()[i] != 0.0;
                keep[i] = alive_in && used[i];
            }
            if keep.iter().all(|&k| k) {
                continue;
            }
            changed = true;
            let remap: Vec<Option<u32>> = {
                let mut next = 0u32;
                keep.iter()
                    .map(|&k| {
                        if k {
                            next += 1;
                            Some(next - 1)
                        } else {
                            None
                        }
                    })
                    .collect()
            };
            let new_width = keep.iter().filter(|&&k| k).count();
            {
                let prev = &mut layers[h - 1];
                let rows = core::mem::take(prev.rows_mut());
                *prev.rows_mut() =
                    rows.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(r, _)| r).collect();
            }
            {
                let here = &mut layers[h];
                let shift = core::mem::take(here.shift_mut());
                *here.shift_mut() =
                    shift.into_iter().zip(&keep).filter(|(_, &k)| k).map(|(s, _)| s).collect();
                for row in here.rows_mut().iter_mut() {
                    *row = row
                        .iter()
                        .filter_map(|&(c, w)| remap[c as usize].map(|nc| (nc, w)))
                        .collect();
                }
                here.set_in_width(new_width);
            }
        }
        if !changed {
            break;
        }
    }
    Network::new(layers, net.output_activation()).expect("removal preserves width chain")
}

/// Number of parameters in a fully connected network of the given
/// architecture: `Σ_j (m_j + 1) m_{j+1} − m_{L+1}`.
pub fn full_param_count(arch: &ArchitectureSpec) -> usize {
    let w = &arch.widths;
    let total: usize = (0..=arch.depth).map(|j| (w[j] + 1) * w[j + 1]).sum();
    total - w[arch.depth + 1]
}

/// How [`extend_negative`] continues a network across sign flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extension {
    /// `f⁺(flip x) = f⁺(x)`.
    Even,
    /// `f⁻(flip x) = −f⁻(x)`.
    Odd,
}

/// Extend a network that vanishes whenever a flagged input coordinate is
/// `≤ 0` to an even or odd function of the flagged block. A mirrored copy
/// with the flagged columns of `W_0` negated runs in parallel and the
/// outputs combine with weight `±1`: hidden widths and sparsity double.
///
/// The extension is even/odd under a joint sign flip of all flagged
/// coordinates; with a single flagged coordinate this is the coordinatewise
/// statement.
pub fn extend_negative(net: &Network, parity: Extension, neg_indices: &[usize]) -> Result<Network> {
    let m0 = net.input_width();
    if neg_indices.iter().any(|&i| i >= m0) {
        return Err(invalid("extend_negative", "flagged index out of range"));
    }
    if net.output_activation() != OutputActivation::Identity {
        return Err(incompatible("extend_negative", "identity output required"));
    }
    let mut mirror = net.clone();
    {
        let first = &mut mirror.layers_mut()[0];
        for row in first.rows_mut().iter_mut() {
            for entry in row.iter_mut() {
                if neg_indices.contains(&(entry.0 as usize)) {
                    entry.1 = -entry.1;
                }
            }
        }
    }
    let stacked = parallelize(net, &mirror)?;
    let w = net.output_width();
    let sign = match parity {
        Extension::Even => 1.0,
        Extension::Odd => -1.0,
    };
    let mut combine = vec![vec![0.0; 2 * w]; w];
    for (i, row) in combine.iter_mut().enumerate() {
        row[i] = 1.0;
        row[w + i] = sign;
    }
    map_outputs(&stacked, &combine)
}

/// Scaling network `Scale_C(x) = C·(x)₊` with all parameters bounded by one.
///
/// For `|C| ≤ 1` a single rectifying layer suffices; for `|C| > 1` a chain
/// of `⌈log₂|C|⌉` doubling blocks is used, with the final weights replaced
/// by `C·2^{−⌈log₂|C|⌉}` (depth `2⌈log₂|C|⌉ − 1`, sparsity `4⌈log₂|C|⌉`).
pub fn scale_net(c: f64) -> Result<Network> {
    if c == 0.0 {
        return Err(invalid("scale_net", "C must be nonzero"));
    }
    if c.abs() <= 1.0 {
        let layers = vec![
            Layer::new(1, vec![vec![(0, 1.0)]], vec![0.0])?,
            Layer::new(1, vec![vec![(0, c)]], vec![0.0])?,
        ];
        return Network::new(layers, OutputActivation::Identity);
    }
    let mut k = c.abs().log2().ceil() as usize;
    // log2 can round down by an ulp for constants just above a power of two.
    while c.abs() / (2.0f64).powi(k as i32) > 1.0 {
        k += 1;
    }
    let tail = c / (2.0f64).powi(k as i32);
    let mut layers = Vec::with_capacity(2 * k);
    for block in 0..k {
        layers.push(Layer::new(1, vec![vec![(0, 1.0)], vec![(0, 1.0)]], vec![0.0])?);
        let w = if block + 1 == k { tail } else { 1.0 };
        layers.push(Layer::new(2, vec![vec![(0, w), (1, w)]], vec![0.0, 0.0])?);
    }
    Network::new(layers, OutputActivation::Identity)
}

/// Identity-forwarding network with `depth` hidden layers: exact on
/// nonnegative inputs, clamping at entry otherwise. `depth = 0` gives the
/// pure affine identity (exact everywhere).
pub fn identity_chain(depth: usize, dim: usize) -> Network {
    let layers = vec![Layer::identity(dim); depth + 1];
    Network::new(layers, OutputActivation::Identity).expect("identity chain is well formed")
}

/// Re-route a network's inputs: the new network has `new_in_width` inputs
/// and reads its `i`-th original input from coordinate `col_map[i]`.
/// Coefficients landing on the same source coordinate are summed.
pub fn with_input_map(net: &Network, new_in_width: usize, col_map: &[usize]) -> Result<Network> {
    if col_map.len() != net.input_width() {
        return Err(CoreError::Shape {
            context: "input map length",
            expected: net.input_width(),
            got: col_map.len(),
        });
    }
    if col_map.iter().any(|&c| c >= new_in_width) {
        return Err(invalid("with_input_map", "mapped column out of range"));
    }
    let mut layers = net.layers().to_vec();
    {
        let first = &mut layers[0];
        let rows = core::mem::take(first.rows_mut());
        *first.rows_mut() = rows
            .into_iter()
            .map(|row| {
                let mut acc: Vec<(u32, f64)> = Vec::with_capacity(row.len());
                for (c, w) in row {
                    let nc = col_map[c as usize] as u32;
                    match acc.iter_mut().find(|(ec, _)| *ec == nc) {
                        Some(entry) => entry.1 += w,
                        None => acc.push((nc, w)),
                    }
                }
                acc.sort_unstable_by_key(|&(c, _)| c);
                acc
            })
            .collect();
        first.set_in_width(new_in_width);
        *first.shift_mut() = vec![0.0; new_in_width];
    }
    Network::new(layers, net.output_activation())
}

/// Replace the output map `W_L` by `A·W_L` for a dense matrix `A` given by
/// rows: recombines outputs without extra layers.
pub fn map_outputs(net: &Network, a_rows: &[Vec<f64>]) -> Result<Network> {
    let w = net.output_width();
    if a_rows.iter().any(|r| r.len() != w) {
        return Err(CoreError::Shape {
            context: "output map columns",
            expected: w,
            got: a_rows.iter().map(Vec::len).find(|&l| l != w).unwrap_or(0),
        });
    }
    let mut layers = net.layers().to_vec();
    let last = layers.last_mut().expect("nonempty");
    let old_rows = last.rows().to_vec();
    let in_width = last.in_width();
    let mut new_rows = Vec::with_capacity(a_rows.len());
    for arow in a_rows {
        let mut dense = vec![0.0; in_width];
        for (j, &aij) in arow.iter().enumerate() {
            if aij == 0.0 {
                continue;
            }
            for &(c, v) in &old_rows[j] {
                dense[c as usize] += aij * v;
            }
        }
        new_rows.push(
            dense
                .iter()
                .enumerate()
                .filter(|(_, &v)| v != 0.0)
                .map(|(c, &v)| (c as u32, v))
                .collect::<Vec<_>>(),
        );
    }
    *last.rows_mut() = new_rows;
    Network::new(layers, net.output_activation())
}

/// Incremental layer-by-layer constructor. Each `layer(rows, unit_shifts)`
/// call appends the affine map producing the next pre-activations together
/// with the shifts that will rectify them (stored, per the layer convention,
/// in the following layer). `finish(out_rows)` appends the output map.
pub(crate) struct NetBuilder {
    layers: Vec<Layer>,
    pending_shift: Vec<f64>,
    width: usize,
}

impl NetBuilder {
    pub(crate) fn new(input_width: usize) -> NetBuilder {
        NetBuilder { layers: Vec::new(), pending_shift: vec![0.0; input_width], width: input_width }
    }

    pub(crate) fn layer(
        &mut self,
        rows: Vec<Vec<(u32, f64)>>,
        unit_shifts: Vec<f64>,
    ) -> Result<&mut Self> {
        debug_assert_eq!(rows.len(), unit_shifts.len());
        let layer = Layer::new(self.width, rows, core::mem::take(&mut self.pending_shift))?;
        self.width = layer.out_width();
        self.pending_shift = unit_shifts;
        self.layers.push(layer);
        Ok(self)
    }

    pub(crate) fn finish(mut self, out_rows: Vec<Vec<(u32, f64)>>) -> Result<Network> {
        let last = Layer::new(self.width, out_rows, self.pending_shift)?;
        self.layers.push(last);
        Network::new(self.layers, OutputActivation::Identity)
    }
}

/// Tent-map stage count used by [`mult_net`] for a given accuracy `η`.
fn squaring_stages(eta: u32) -> usize {
    core::cmp::min(eta.div_ceil(2), eta.saturating_sub(1)) as usize
}

/// Pairwise multiplication gadget on `[0,1]²`.
///
/// Computes `max(0, min(est, x, y))` where `est = sq(u) − sq(w)` with
/// `u = (x+y)/2`, `w = |x−y|/2` and `sq` the piecewise-linear interpolant
/// of the square on a grid of spacing `2^{−m}` realized by telescoped tent
/// maps `τ_{s+1} = τ_s/2 − σ(τ_s − 4^{−s}/2)`. The min-gating keeps the
/// output in `[0,1]`, makes the result exactly zero when a factor is zero,
/// and never worsens the estimate error `2·4^{−m−1}`.
fn mult_pair(m: usize) -> Result<Network> {
    let mut b = NetBuilder::new(2);
    // Units: u=(x+y)/2, p=σ((x-y)/2), q=σ((y-x)/2), x, y; w = p + q = |x-y|/2.
    b.layer(
        vec![
            vec![(0, 0.5), (1, 0.5)],
            vec![(0, 0.5), (1, -0.5)],
            vec![(0, -0.5), (1, 0.5)],
            vec![(0, 1.0)],
            vec![(1, 1.0)],
        ],
        vec![0.0; 5],
    )?;
    if m == 0 {
        // est = u − w = min(x, y).
        b.layer(
            vec![vec![(0, 1.0)], vec![(1, 1.0), (2, 1.0)], vec![(3, 1.0)], vec![(4, 1.0)]],
            vec![0.0; 4],
        )?;
        finish_gate(b, false)
    } else {
        // Units: U=u, Uh=σ(u−1/2), W=w, Wh=σ(w−1/2), X, Y.
        b.layer(
            vec![
                vec![(0, 1.0)],
                vec![(0, 1.0)],
                vec![(1, 1.0), (2, 1.0)],
                vec![(1, 1.0), (2, 1.0)],
                vec![(3, 1.0)],
                vec![(4, 1.0)],
            ],
            vec![0.0, 0.5, 0.0, 0.5, 0.0, 0.0],
        )?;
        if m == 1 {
            // Fold τ_1 = U/2 − Uh straight into the accumulators.
            b.layer(
                vec![
                    vec![(0, 1.0)],
                    vec![(0, 0.5), (1, -1.0)],
                    vec![(2, 1.0)],
                    vec![(2, 0.5), (3, -1.0)],
                    vec![(4, 1.0)],
                    vec![(5, 1.0)],
                ],
                vec![0.0; 6],
            )?;
        } else {
            // Stage 1 lays out [U, τ, τh, A | W, τw, τwh, Aw | X, Y].
            let shifts = |c: f64| vec![0.0, 0.0, c, 0.0, 0.0, 0.0, c, 0.0, 0.0, 0.0];
            b.layer(
                vec![
                    vec![(0, 1.0)],
                    vec![(0, 0.5), (1, -1.0)],
                    vec![(0, 0.5), (1, -1.0)],
                    vec![(0, 0.5), (1, -1.0)],
                    vec![(2, 1.0)],
                    vec![(2, 0.5), (3, -1.0)],
                    vec![(2, 0.5), (3, -1.0)],
                    vec![(2, 0.5), (3, -1.0)],
                    vec![(4, 1.0)],
                    vec![(5, 1.0)],
                ],
                shifts(0.5 * 0.25),
            )?;
            for s in 2..m {
                b.layer(
                    vec![
                        vec![(0, 1.0)],
                        vec![(1, 0.5), (2, -1.0)],
                        vec![(1, 0.5), (2, -1.0)],
                        vec![(1, 0.5), (2, -1.0), (3, 1.0)],
                        vec![(4, 1.0)],
                        vec![(5, 0.5), (6, -1.0)],
                        vec![(5, 0.5), (6, -1.0)],
                        vec![(5, 0.5), (6, -1.0), (7, 1.0)],
                        vec![(8, 1.0)],
                        vec![(9, 1.0)],
                    ],
                    shifts(0.5 * (4.0f64).powi(-(s as i32))),
                )?;
            }
            // Final stage folds τ_m into A and drops the τ slots.
            b.layer(
                vec![
                    vec![(0, 1.0)],
                    vec![(1, 0.5), (2, -1.0), (3, 1.0)],
                    vec![(4, 1.0)],
                    vec![(5, 0.5), (6, -1.0), (7, 1.0)],
                    vec![(8, 1.0)],
                    vec![(9, 1.0)],
                ],
                vec![0.0; 6],
            )?;
        }
        finish_gate(b, true)
    }
}

/// Gating tail of [`mult_pair`]. Incoming units are `[U, (Au), W, (Aw), X, Y]`
/// with accumulators present iff `has_acc`; computes
/// `σ(min(est, x, y))` for `est = (U − Au) − (W − Aw)` via
/// `min(a, b) = b − σ(b − a)` twice and a final rectification.
fn finish_gate(mut b: NetBuilder, has_acc: bool) -> Result<Network> {
    let (u, au, w, aw, x, y) = if has_acc { (0, 1, 2, 3, 4, 5) } else { (0, 0, 1, 1, 2, 3) };
    // G1 = σ(x − est); min(x, est) = x − G1.
    let mut g1 = vec![(x as u32, 1.0), (u as u32, -1.0), (w as u32, 1.0)];
    if has_acc {
        g1.push((au as u32, 1.0));
        g1.push((aw as u32, -1.0));
    }
    g1.sort_unstable_by_key(|&(c, _)| c);
    b.layer(vec![g1, vec![(x as u32, 1.0)], vec![(y as u32, 1.0)]], vec![0.0; 3])?;
    // G2 = σ(y − min(x, est)) = σ(Y − X + G1), and the carry Yc.
    b.layer(vec![vec![(0, 1.0), (1, -1.0), (2, 1.0)], vec![(2, 1.0)]], vec![0.0; 2])?;
    // O = σ(Yc − G2) = max(0, min(est, x, y)).
    b.layer(vec![vec![(0, -1.0), (1, 1.0)]], vec![0.0])?;
    b.finish(vec![vec![(0, 1.0)]])
}

/// Product-approximation network `Mult_η^D` on `[0,1]^D`.
///
/// Guarantees: output in `[0,1]`; `|out − Π x_i| ≤ 3^D 2^{−η}`; output is
/// exactly zero whenever some factor is zero; for `D ≥ 2` the depth is at
/// most `(η+5)⌈log₂ D⌉`, the width at most `6D` and the parameter count at
/// most `(η+5)·126·D²·log₂ D`. `D = 1` is the positive-part identity.
pub fn mult_net(eta: u32, d: usize) -> Result<Network> {
    if eta < 1 {
        return Err(invalid("mult_net", "eta must be at least 1"));
    }
    if d < 1 {
        return Err(invalid("mult_net", "D must be at least 1"));
    }
    if d == 1 {
        return Ok(identity_chain(1, 1));
    }
    let pair = mult_pair(squaring_stages(eta))?;
    let pair_depth = pair.depth();
    // Balanced binary tree of pairwise products; odd leaves forward through
    // identity chains of matching depth.
    let mut level_width = d;
    let mut net: Option<Network> = None;
    while level_width > 1 {
        let mut blocks = Vec::new();
        let mut i = 0;
        while i + 1 < level_width {
            blocks.push(with_input_map(&pair, level_width, &[i, i + 1])?);
            i += 2;
        }
        if i < level_width {
            blocks.push(with_input_map(&identity_chain(pair_depth, 1), level_width, &[i])?);
        }
        let refs: Vec<&Network> = blocks.iter().collect();
        let level = parallelize_many(&refs)?;
        net = Some(match net {
            None => level,
            Some(prev) => {
                let width = prev.output_width();
                compose(&prev, &level, &vec![0.0; width])?
            }
        });
        level_width = level_width.div_ceil(2);
    }
    Ok(net.expect("D >= 2 always builds at least one level"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn relu_scalar() -> Network {
        identity_chain(1, 1)
    }

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn grid(n: usize, lo: f64, hi: f64) -> impl Iterator<Item = f64> {
        (0..n).map(move |i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
    }

    #[test]
    fn compose_depth_adds_one() {
        let f = relu_scalar();
        let g = relu_scalar();
        let c = compose(&f, &g, &[0.0]).unwrap();
        assert_eq!(c.depth(), 3);
    }

    #[test]
    fn compose_matches_two_step_evaluation() {
        let f = Network::new(
            vec![
                Layer::from_dense(&[vec![0.7], vec![-0.5]], vec![0.0]).unwrap(),
                Layer::from_dense(&[vec![0.9, 0.4], vec![-0.3, 1.0]], vec![0.1, -0.2]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let g = Network::new(
            vec![
                Layer::from_dense(&[vec![0.5, -1.0]], vec![0.0, 0.0]).unwrap(),
                Layer::from_dense(&[vec![0.8]], vec![0.05]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let v = [0.1, -0.3];
        let c = compose(&f, &g, &v).unwrap();
        for i in 0..100 {
            let x = -2.0 + 4.0 * (i as f64) / 99.0;
            let mid: Vec<f64> = f
                .evaluate(&[x])
                .unwrap()
                .iter()
                .zip(&v)
                .map(|(&y, &vi)| (y - vi).max(0.0))
                .collect();
            let expect = g.evaluate(&mid).unwrap();
            let got = c.evaluate(&[x]).unwrap();
            assert!(approx_eq(expect[0], got[0], 1e-12), "x={x}: {expect:?} vs {got:?}");
        }
    }

    #[test]
    fn parallelize_duplicates_and_adds_widths() {
        let f = relu_scalar();
        let h = parallelize(&f, &f).unwrap();
        assert_eq!(h.widths(), vec![1, 2, 2]);
        assert_eq!(h.sparsity(), 2 * f.sparsity());
        let out = h.evaluate(&[0.4]).unwrap();
        assert_eq!(out, vec![0.4, 0.4]);
    }

    #[test]
    fn depth_synchronize_budget_and_values() {
        let f = relu_scalar();
        let s = f.sparsity();
        let g = depth_synchronize(&f, 2).unwrap();
        assert_eq!(g.depth(), f.depth() + 2);
        assert_eq!(g.sparsity(), s + 2);
        for x in grid(1000, 0.0, 1.0) {
            assert_eq!(g.evaluate(&[x]).unwrap(), f.evaluate(&[x]).unwrap());
        }
        assert_eq!(g.evaluate(&[-0.7]).unwrap(), vec![0.0]);
    }

    #[test]
    fn embed_preserves_function_and_sparsity() {
        let f = Network::new(
            vec![
                Layer::from_dense(&[vec![0.3], vec![-0.6]], vec![0.0]).unwrap(),
                Layer::from_dense(&[vec![1.0, 0.5]], vec![0.0, 0.1]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let target =
            ArchitectureSpec::new(1, vec![1, 6, 1], 20, OutputActivation::Identity).unwrap();
        let padded = embed(&f, &target).unwrap();
        assert_eq!(padded.widths(), vec![1, 6, 1]);
        assert_eq!(padded.sparsity(), f.sparsity());
        assert!(padded.validate().is_valid());
        for i in 0..1000 {
            let x = -3.0 + 6.0 * (i as f64) / 999.0;
            assert_eq!(padded.evaluate(&[x]).unwrap(), f.evaluate(&[x]).unwrap());
        }
    }

    #[test]
    fn remove_inactive_drops_dead_unit() {
        let f = Network::new(
            vec![
                Layer::from_dense(&[vec![1.0], vec![0.0]], vec![0.0]).unwrap(),
                Layer::from_dense(&[vec![0.8, 0.5]], vec![0.0, 0.0]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        let g = remove_inactive(&f);
        assert_eq!(g.widths(), vec![1, 1, 1]);
        for i in 0..1000 {
            let x = -2.0 + 4.0 * (i as f64) / 999.0;
            assert_eq!(g.evaluate(&[x]).unwrap(), f.evaluate(&[x]).unwrap());
        }
        let dense = Network::new(
            vec![
                Layer::from_dense(&[vec![1.0], vec![-1.0]], vec![0.0]).unwrap(),
                Layer::from_dense(&[vec![0.8, 0.5]], vec![0.0, 0.0]).unwrap(),
            ],
            OutputActivation::Identity,
        )
        .unwrap();
        assert_eq!(remove_inactive(&dense), dense);
        assert_eq!(remove_inactive(&g), g);
    }

    #[test]
    fn full_param_count_examples() {
        let arch = ArchitectureSpec::new(1, vec![1, 2, 1], 6, OutputActivation::Identity).unwrap();
        assert_eq!(full_param_count(&arch), 6);
        // Affine map (no hidden layer): d*K parameters.
        let affine = ArchitectureSpec::new(0, vec![3, 4], 12, OutputActivation::Identity).unwrap();
        assert_eq!(full_param_count(&affine), 12);
    }

    #[test]
    fn extend_negative_even_and_odd() {
        let f = relu_scalar(); // σ(x), vanishes for x ≤ 0
        let even = extend_negative(&f, Extension::Even, &[0]).unwrap();
        let odd = extend_negative(&f, Extension::Odd, &[0]).unwrap();
        assert_eq!(even.sparsity(), 2 * f.sparsity());
        for x in grid(101, -1.0, 1.0) {
            let e = even.evaluate(&[x]).unwrap()[0];
            let e_neg = even.evaluate(&[-x]).unwrap()[0];
            assert!(approx_eq(e, e_neg, 1e-12));
            let o = odd.evaluate(&[x]).unwrap()[0];
            let o_neg = odd.evaluate(&[-x]).unwrap()[0];
            assert!(approx_eq(o, -o_neg, 1e-12));
            if x >= 0.0 {
                assert!(approx_eq(e, x, 1e-12));
                assert!(approx_eq(o, x, 1e-12));
            }
        }
    }

    #[test]
    fn scale_net_examples_and_budgets() {
        assert!(approx_eq(scale_net(2.0).unwrap().evaluate(&[0.3]).unwrap()[0], 0.6, 1e-12));
        for c in [2.0, 3.0, 10.0, 1000.0] {
            let net = scale_net(c).unwrap();
            assert_eq!(net.evaluate(&[-1.0]).unwrap()[0], 0.0);
            assert!(net.validate().is_valid(), "C={c}");
            let k = c.log2().ceil() as usize;
            assert_eq!(net.depth(), 2 * k - 1, "C={c}");
            assert!(net.sparsity() <= 4 * k, "C={c}");
            for x in grid(50, 0.0, 1.0) {
                assert!(approx_eq(net.evaluate(&[x]).unwrap()[0], c * x, 1e-10 * c));
            }
        }
        let three = scale_net(3.0).unwrap();
        assert!(approx_eq(three.evaluate(&[1.0]).unwrap()[0], 3.0, 1e-12));
        assert!(approx_eq(scale_net(-5.0).unwrap().evaluate(&[0.5]).unwrap()[0], -2.5, 1e-12));
        assert!(approx_eq(scale_net(0.25).unwrap().evaluate(&[0.5]).unwrap()[0], 0.125, 1e-15));
        assert!(scale_net(0.0).is_err());
    }

    #[test]
    fn mult_net_zero_absorption_is_exact() {
        for d in 1..=4usize {
            let net = mult_net(6, d).unwrap();
            for hot in 0..d {
                let mut x = vec![0.37; d];
                x[hot] = 0.0;
                assert_eq!(net.evaluate(&x).unwrap()[0], 0.0, "d={d} hot={hot}");
            }
        }
    }

    #[test]
    fn mult_net_pair_error_bound() {
        let eta = 10u32;
        let net = mult_net(eta, 2).unwrap();
        assert!(net.validate().is_valid());
        let bound = 9.0 * (2.0f64).powi(-(eta as i32));
        let mut worst = 0.0f64;
        for x in grid(101, 0.0, 1.0) {
            for y in grid(101, 0.0, 1.0) {
                let out = net.evaluate(&[x, y]).unwrap()[0];
                assert!((0.0..=1.0).contains(&out));
                worst = worst.max((out - x * y).abs());
            }
        }
        assert!(worst <= bound, "worst {worst} > bound {bound}");
    }

    #[test]
    fn mult_net_one_factor_is_identity() {
        let net = mult_net(4, 1).unwrap();
        for x in grid(101, 0.0, 1.0) {
            assert_eq!(net.evaluate(&[x]).unwrap()[0], x);
        }
    }

    #[test]
    fn mult_net_budgets() {
        for d in 2..=4usize {
            for eta in [1u32, 4, 8, 12] {
                let net = mult_net(eta, d).unwrap();
                let levels = (d as f64).log2().ceil();
                let depth_budget = ((eta as f64 + 5.0) * levels) as usize;
                assert!(net.depth() <= depth_budget, "d={d} eta={eta}: {}", net.depth());
                assert!(net.max_hidden_width() <= 6 * d, "d={d} eta={eta}");
                let param_budget = (eta as f64 + 5.0) * 126.0 * (d * d) as f64 * levels;
                assert!((net.sparsity() as f64) <= param_budget, "d={d} eta={eta}");
                assert!(net.validate().is_valid(), "d={d} eta={eta}");
            }
        }
    }

    #[test]
    fn with_input_map_merges_duplicate_sources() {
        let pair = mult_net(8, 2).unwrap();
        let squared = with_input_map(&pair, 1, &[0, 0]).unwrap();
        assert!(squared.validate().is_valid());
        for x in grid(101, 0.0, 1.0) {
            let out = squared.evaluate(&[x]).unwrap()[0];
            assert!(approx_eq(out, x * x, 9.0 / 256.0), "x={x} out={out}");
        }
    }
}
