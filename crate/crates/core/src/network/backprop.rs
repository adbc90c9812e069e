//! Layer-wise jet propagation with hand-derived parameter gradients.
//!
//! This is the training hot path. The forward pass pushes the jet components
//! (value, ∂t, and for space-time problems ∂x, ∂xx) through the MLP storing
//! per-layer state; the backward pass turns an adjoint of the output jets
//! into the gradient with respect to every weight and bias.
//!
//! Component layout is comp-major: a layer of width `w` with `ncomp` active
//! components is a flat slice of length `ncomp * w`, component `c` occupying
//! `[c*w, (c+1)*w)`. Components are ordered value, ∂t, ∂x, ∂xx; time-only
//! problems run with `ncomp = 2`, plain value evaluation with `ncomp = 1`.
//!
//! Accumulation order (bias first, then inputs by ascending index) matches
//! [`super::eval_network_jets`] exactly, so the two paths agree bit for bit
//! and results are deterministic regardless of thread count.

use crate::autodiff::Jet2;

/// Offsets of each layer's weight block in the flat parameter vector.
pub fn layer_offsets(sizes: &[usize]) -> Vec<usize> {
    let mut offs = Vec::with_capacity(sizes.len() - 1);
    let mut off = 0;
    for w in sizes.windows(2) {
        offs.push(off);
        off += w[0] * w[1] + w[1];
    }
    offs
}

/// Reusable per-evaluation storage.
#[derive(Debug, Default)]
pub struct Workspace {
    ncomp: usize,
    sizes: Vec<usize>,
    /// Activations per layer; index 0 is the input.
    acts: Vec<Vec<f64>>,
    /// Pre-activations feeding layer l+1, index l.
    pre: Vec<Vec<f64>>,
    adj_cur: Vec<f64>,
    adj_next: Vec<f64>,
}

impl Workspace {
    pub fn new() -> Self {
        Workspace::default()
    }

    fn ensure(&mut self, sizes: &[usize], ncomp: usize) {
        if self.sizes != sizes || self.ncomp != ncomp {
            self.sizes = sizes.to_vec();
            self.ncomp = ncomp;
            self.acts = sizes.iter().map(|&w| vec![0.0; w * ncomp]).collect();
            self.pre = sizes[1..].iter().map(|&w| vec![0.0; w * ncomp]).collect();
            let widest = sizes.iter().copied().max().unwrap_or(0);
            self.adj_cur = vec![0.0; widest * ncomp];
            self.adj_next = vec![0.0; widest * ncomp];
        }
    }

    /// Forward pass. `input` is comp-major of length `sizes[0] * ncomp`.
    pub fn forward(&mut self, sizes: &[usize], params: &[f64], input: &[f64], ncomp: usize) {
        debug_assert!(ncomp >= 1 && ncomp <= 4);
        debug_assert_eq!(input.len(), sizes[0] * ncomp);
        self.ensure(sizes, ncomp);
        self.acts[0].copy_from_slice(input);
        let n_layers = sizes.len() - 1;
        let mut off = 0;
        for l in 0..n_layers {
            let (n_in, n_out) = (sizes[l], sizes[l + 1]);
            let weights = &params[off..off + n_in * n_out];
            let biases = &params[off + n_in * n_out..off + n_in * n_out + n_out];
            off += n_in * n_out + n_out;
            {
                let a = &self.acts[l];
                let z = &mut self.pre[l];
                for c in 0..ncomp {
                    let ain = &a[c * n_in..(c + 1) * n_in];
                    let zout = &mut z[c * n_out..(c + 1) * n_out];
                    for i in 0..n_out {
                        let row = &weights[i * n_in..(i + 1) * n_in];
                        let mut acc = if c == 0 { biases[i] } else { 0.0 };
                        for j in 0..n_in {
                            acc += row[j] * ain[j];
                        }
                        zout[i] = acc;
                    }
                }
            }
            let (z, a_out) = (&self.pre[l], &mut self.acts[l + 1]);
            if l + 1 < n_layers {
                for i in 0..n_out {
                    let y = z[i].tanh();
                    let s = 1.0 - y * y;
                    a_out[i] = y;
                    if ncomp >= 2 {
                        a_out[n_out + i] = s * z[n_out + i];
                    }
                    if ncomp >= 3 {
                        a_out[2 * n_out + i] = s * z[2 * n_out + i];
                    }
                    if ncomp == 4 {
                        let zx = z[2 * n_out + i];
                        a_out[3 * n_out + i] = s * z[3 * n_out + i] - 2.0 * y * s * zx * zx;
                    }
                }
            } else {
                a_out.copy_from_slice(z);
            }
        }
    }

    /// Output of the last forward pass, comp-major.
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("forward has not run")
    }

    /// Output as jets; inactive components read as zero.
    pub fn output_jets(&self) -> Vec<Jet2> {
        let n_out = *self.sizes.last().unwrap();
        let out = self.output();
        let comp = |c: usize, i: usize| if self.ncomp > c { out[c * n_out + i] } else { 0.0 };
        (0..n_out)
            .map(|i| Jet2::new(comp(0, i), comp(1, i), comp(2, i), comp(3, i)))
            .collect()
    }

    /// Backward pass over the state of the last forward call.
    ///
    /// `out_adj` is the adjoint of the output jets (comp-major, length
    /// `sizes.last() * ncomp`); the parameter gradient is accumulated into
    /// `grad`, which must have full parameter length.
    pub fn backward(&mut self, params: &[f64], out_adj: &[f64], grad: &mut [f64]) {
        let sizes = &self.sizes;
        let ncomp = self.ncomp;
        let n_layers = sizes.len() - 1;
        let n_last = sizes[n_layers];
        debug_assert_eq!(out_adj.len(), n_last * ncomp);
        debug_assert_eq!(grad.len(), params.len());
        let offs = layer_offsets(sizes);
        self.adj_cur[..n_last * ncomp].copy_from_slice(out_adj);
        for l in (0..n_layers).rev() {
            let (n_in, n_out) = (sizes[l], sizes[l + 1]);
            let off = offs[l];
            let weights = &params[off..off + n_in * n_out];
            // Weight and bias gradients from the pre-activation adjoint.
            {
                let a = &self.acts[l];
                let zbar = &self.adj_cur;
                let gw = &mut grad[off..off + n_in * n_out];
                for c in 0..ncomp {
                    let ain = &a[c * n_in..(c + 1) * n_in];
                    for i in 0..n_out {
                        let zb = zbar[c * n_out + i];
                        let row = &mut gw[i * n_in..(i + 1) * n_in];
                        for j in 0..n_in {
                            row[j] += zb * ain[j];
                        }
                    }
                }
                let gb = &mut grad[off + n_in * n_out..off + n_in * n_out + n_out];
                for i in 0..n_out {
                    gb[i] += zbar[i];
                }
            }
            // Adjoint of the previous activations: Wᵀ zbar per component.
            {
                let zbar = &self.adj_cur;
                let abar = &mut self.adj_next;
                abar[..n_in * ncomp].fill(0.0);
                for c in 0..ncomp {
                    let aslice = &mut abar[c * n_in..(c + 1) * n_in];
                    for i in 0..n_out {
                        let zb = zbar[c * n_out + i];
                        let row = &weights[i * n_in..(i + 1) * n_in];
                        for j in 0..n_in {
                            aslice[j] += row[j] * zb;
                        }
                    }
                }
            }
            if l > 0 {
                // Pull the adjoint through the tanh jet propagation.
                // With y = tanh(z0), s = 1 - y², the forward rules are
                //   a0 = y, a1 = s z1, a2 = s z2, a3 = s z3 - 2 y s z2²,
                // so the adjoints of the pre-activation components are
                //   z1^ = s a1^,  z2^ = s a2^ - 4 y s z2 a3^,  z3^ = s a3^,
                //   z0^ = s a0^ - 2 y s (z1 a1^ + z2 a2^ + z3 a3^)
                //         - 2 s (s - 2 y²) z2² a3^.
                let z = &self.pre[l - 1];
                let a = &self.acts[l];
                let abar = &mut self.adj_next;
                for i in 0..n_in {
                    let y = a[i];
                    let s = 1.0 - y * y;
                    let a0 = abar[i];
                    let a1 = if ncomp >= 2 { abar[n_in + i] } else { 0.0 };
                    let a2 = if ncomp >= 3 { abar[2 * n_in + i] } else { 0.0 };
                    let a3 = if ncomp == 4 { abar[3 * n_in + i] } else { 0.0 };
                    let z1 = if ncomp >= 2 { z[n_in + i] } else { 0.0 };
                    let z2 = if ncomp >= 3 { z[2 * n_in + i] } else { 0.0 };
                    let z3 = if ncomp == 4 { z[3 * n_in + i] } else { 0.0 };
                    abar[i] = s * a0
                        - 2.0 * y * s * (z1 * a1 + z2 * a2 + z3 * a3)
                        - 2.0 * s * (s - 2.0 * y * y) * z2 * z2 * a3;
                    if ncomp >= 2 {
                        abar[n_in + i] = s * a1;
                    }
                    if ncomp >= 3 {
                        abar[2 * n_in + i] = s * a2 - 4.0 * y * s * z2 * a3;
                    }
                    if ncomp == 4 {
                        abar[3 * n_in + i] = s * a3;
                    }
                }
            }
            std::mem::swap(&mut self.adj_cur, &mut self.adj_next);
        }
    }
}

/// Input builders (comp-major, components value/∂t/∂x/∂xx).
pub mod inputs {
    /// Time-only input with the time seed active (`ncomp = 2`).
    pub fn time(t: f64) -> [f64; 2] {
        [t, 1.0]
    }

    /// Time-only input with time pinned, used for the shift's t = 0 term.
    pub fn time_pinned(t: f64) -> [f64; 2] {
        [t, 0.0]
    }

    /// Space-time input with both seeds active (`ncomp = 4`).
    pub fn space_time(t: f64, x: f64) -> [f64; 8] {
        [t, x, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]
    }

    /// Space-time input with time pinned (`ncomp = 4`).
    pub fn space_time_pinned(t: f64, x: f64) -> [f64; 8] {
        [t, x, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]
    }

    /// Value-only evaluation (`ncomp = 1`).
    pub fn value_only(coords: &[f64]) -> Vec<f64> {
        coords.to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::autodiff::{loss_gradient, Scalar};
    use crate::network::{eval_network_jets, init_network};
    use crate::rng::Xoshiro256;

    #[test]
    fn forward_matches_generic_eval_bitwise() {
        let net = init_network(&[2, 9, 7, 3], 21).unwrap();
        let mut ws = Workspace::new();
        let (t, x) = (0.37, -0.64);
        ws.forward(
            net.layer_sizes(),
            net.values(),
            &inputs::space_time(t, x),
            4,
        );
        let fast = ws.output_jets();
        let slow = crate::network::jet_eval(&net, t, Some(x)).unwrap();
        for (f, s) in fast.iter().zip(&slow) {
            assert_eq!(f.value.to_bits(), s.value.to_bits());
            assert_eq!(f.d_t.to_bits(), s.d_t.to_bits());
            assert_eq!(f.d_x.to_bits(), s.d_x.to_bits());
            assert_eq!(f.d_xx.to_bits(), s.d_xx.to_bits());
        }
    }

    #[test]
    fn forward_matches_generic_eval_time_only() {
        let net = init_network(&[1, 8, 8, 3], 5).unwrap();
        let mut ws = Workspace::new();
        let t = 0.21;
        ws.forward(net.layer_sizes(), net.values(), &inputs::time(t), 2);
        let fast = ws.output_jets();
        let slow = crate::network::jet_eval(&net, t, None).unwrap();
        for (f, s) in fast.iter().zip(&slow) {
            assert_eq!(f.value.to_bits(), s.value.to_bits());
            assert_eq!(f.d_t.to_bits(), s.d_t.to_bits());
        }
    }

    /// Loss mixing all jet components quadratically; exercised against both
    /// the tape and central finite differences.
    fn mix_coeffs(n_out: usize, seed: u64) -> Vec<[f64; 4]> {
        let mut rng = Xoshiro256::seed_from_u64(seed);
        (0..n_out)
            .map(|_| {
                [
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(-1.0, 1.0),
                    rng.uniform(-1.0, 1.0),
                ]
            })
            .collect()
    }

    fn hand_loss_and_grad(
        sizes: &[usize],
        params: &[f64],
        t: f64,
        x: f64,
        coeffs: &[[f64; 4]],
    ) -> (f64, Vec<f64>) {
        let mut ws = Workspace::new();
        ws.forward(sizes, params, &inputs::space_time(t, x), 4);
        let jets = ws.output_jets();
        let n_out = jets.len();
        let mut loss = 0.0;
        let mut out_adj = vec![0.0; 4 * n_out];
        for (k, (jet, c)) in jets.iter().zip(coeffs).enumerate() {
            let lin = c[0] * jet.value + c[1] * jet.d_t + c[2] * jet.d_x + c[3] * jet.d_xx;
            loss += lin * lin;
            for comp in 0..4 {
                out_adj[comp * n_out + k] = 2.0 * lin * c[comp];
            }
        }
        let mut grad = vec![0.0; params.len()];
        ws.backward(params, &out_adj, &mut grad);
        (loss, grad)
    }

    #[test]
    fn backward_matches_tape_gradient() {
        let net = init_network(&[2, 6, 6, 2], 13).unwrap();
        let coeffs = mix_coeffs(2, 99);
        let (t, x) = (0.45, 0.3);
        let (_, grad) = hand_loss_and_grad(net.layer_sizes(), net.values(), t, x, &coeffs);

        let sizes = net.layer_sizes().to_vec();
        let coeffs2 = coeffs.clone();
        let tape_grad = loss_gradient(
            move |tape, p| {
                let input = vec![
                    crate::autodiff::Jet2::new(
                        tape.constant(t),
                        tape.constant(1.0),
                        tape.constant(0.0),
                        tape.constant(0.0),
                    ),
                    crate::autodiff::Jet2::new(
                        tape.constant(x),
                        tape.constant(0.0),
                        tape.constant(1.0),
                        tape.constant(0.0),
                    ),
                ];
                let jets = eval_network_jets(&sizes, p, &input);
                let mut acc = tape.constant(0.0);
                for (jet, c) in jets.iter().zip(&coeffs2) {
                    let lin = jet.value.scale(c[0])
                        + jet.d_t.scale(c[1])
                        + jet.d_x.scale(c[2])
                        + jet.d_xx.scale(c[3]);
                    acc = acc + lin * lin;
                }
                acc
            },
            net.values(),
        )
        .unwrap();

        for (h, tp) in grad.iter().zip(&tape_grad) {
            let rel = (h - tp).abs() / h.abs().max(tp.abs()).max(1e-12);
            assert!(rel < 1e-12, "hand {h} vs tape {tp}");
        }
    }

    #[test]
    fn backward_matches_finite_differences() {
        let net = init_network(&[2, 7, 5, 2], 31).unwrap();
        let coeffs = mix_coeffs(2, 7);
        let (t, x) = (0.8, -0.2);
        let sizes = net.layer_sizes();
        let (_, grad) = hand_loss_and_grad(sizes, net.values(), t, x, &coeffs);
        let h = 1e-5;
        let mut theta = net.values().to_vec();
        for k in 0..theta.len() {
            let orig = theta[k];
            theta[k] = orig + h;
            let (up, _) = hand_loss_and_grad(sizes, &theta, t, x, &coeffs);
            theta[k] = orig - h;
            let (dn, _) = hand_loss_and_grad(sizes, &theta, t, x, &coeffs);
            theta[k] = orig;
            let fd = (up - dn) / (2.0 * h);
            let rel = (grad[k] - fd).abs() / grad[k].abs().max(fd.abs()).max(1e-8);
            assert!(rel < 1e-5, "coord {k}: hand {} vs fd {fd}", grad[k]);
        }
    }
}
