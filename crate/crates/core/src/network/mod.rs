//! The tanh MLP solution ansatz.
//!
//! A plain fully-connected network with tanh hidden activations and a linear
//! output layer, stored as one flat parameter vector. The ansatz wraps the
//! raw network with a shift that enforces the initial condition exactly.

pub mod backprop;

use crate::autodiff::{Jet2, Scalar};
use crate::rng::Xoshiro256;
use crate::{Error, Result};

/// Flat parameter vector plus layer-shape metadata.
///
/// Storage layout per layer: weights row-major (output neuron by output
/// neuron), then biases. Weights are drawn Glorot-uniform in storage order
/// from a xoshiro256++ stream seeded with SplitMix64, biases start at zero;
/// a seed therefore pins every initial draw.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    layer_sizes: Vec<usize>,
    values: Vec<f64>,
    seed: u64,
}

/// Closed-form parameter count for a layer specification.
pub fn param_count(layer_sizes: &[usize]) -> usize {
    layer_sizes
        .windows(2)
        .map(|w| w[0] * w[1] + w[1])
        .sum()
}

/// Glorot-uniform initialization of a tanh MLP.
pub fn init_network(layer_sizes: &[usize], seed: u64) -> Result<NetworkParams> {
    if layer_sizes.len() < 2 {
        return Err(Error::invalid(
            "layer specification needs an input and an output width",
        ));
    }
    if layer_sizes.iter().any(|&n| n == 0) {
        return Err(Error::ZeroWidthLayer);
    }
    let mut rng = Xoshiro256::seed_from_u64(seed);
    let mut values = Vec::with_capacity(param_count(layer_sizes));
    for w in layer_sizes.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
        for _ in 0..fan_in * fan_out {
            values.push(rng.uniform(-limit, limit));
        }
        values.extend(std::iter::repeat(0.0).take(fan_out));
    }
    Ok(NetworkParams {
        layer_sizes: layer_sizes.to_vec(),
        values,
        seed,
    })
}

impl NetworkParams {
    pub fn from_values(layer_sizes: Vec<usize>, values: Vec<f64>, seed: u64) -> Result<Self> {
        if values.len() != param_count(&layer_sizes) {
            return Err(Error::invalid(format!(
                "value vector length {} does not match layer shape count {}",
                values.len(),
                param_count(&layer_sizes)
            )));
        }
        Ok(NetworkParams {
            layer_sizes,
            values,
            seed,
        })
    }

    pub fn layer_sizes(&self) -> &[usize] {
        &self.layer_sizes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn input_width(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn output_width(&self) -> usize {
        *self.layer_sizes.last().unwrap()
    }

    /// Text snapshot: a two-line header (layer sizes, seed) followed by one
    /// parameter per line in shortest round-trip notation.
    pub fn to_snapshot(&self) -> String {
        let mut s = String::new();
        let sizes: Vec<String> = self.layer_sizes.iter().map(|n| n.to_string()).collect();
        s.push_str(&format!("layers={}\n", sizes.join(",")));
        s.push_str(&format!("seed={}\n", self.seed));
        for v in &self.values {
            s.push_str(&format!("{v}\n"));
        }
        s
    }

    pub fn from_snapshot(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let layers_line = lines
            .next()
            .ok_or_else(|| Error::Snapshot("missing layers header".into()))?;
        let sizes_str = layers_line
            .strip_prefix("layers=")
            .ok_or_else(|| Error::Snapshot("first line must be layers=".into()))?;
        let layer_sizes: Vec<usize> = sizes_str
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::Snapshot(format!("bad layer width {s:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        let seed_line = lines
            .next()
            .ok_or_else(|| Error::Snapshot("missing seed header".into()))?;
        let seed: u64 = seed_line
            .strip_prefix("seed=")
            .ok_or_else(|| Error::Snapshot("second line must be seed=".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Snapshot(format!("bad seed: {e}")))?;
        let values: Vec<f64> = lines
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Snapshot(format!("bad value {l:?}: {e}")))
            })
            .collect::<Result<_>>()?;
        NetworkParams::from_values(layer_sizes, values, seed)
    }
}

/// Forward pass of the raw MLP on jet inputs, generic over the scalar type.
///
/// `params` must follow the [`NetworkParams`] storage layout for
/// `layer_sizes`. The accumulation order (bias, then inputs in ascending
/// index) is fixed so results are reproducible bit for bit.
pub fn eval_network_jets<S: Scalar>(
    layer_sizes: &[usize],
    params: &[S],
    input: &[Jet2<S>],
) -> Vec<Jet2<S>> {
    debug_assert_eq!(input.len(), layer_sizes[0]);
    let n_layers = layer_sizes.len() - 1;
    let mut current: Vec<Jet2<S>> = input.to_vec();
    let mut offset = 0usize;
    for l in 0..n_layers {
        let (n_in, n_out) = (layer_sizes[l], layer_sizes[l + 1]);
        let weights = &params[offset..offset + n_in * n_out];
        let biases = &params[offset + n_in * n_out..offset + n_in * n_out + n_out];
        offset += n_in * n_out + n_out;
        let mut next = Vec::with_capacity(n_out);
        for i in 0..n_out {
            let b = biases[i];
            let zero = b.lift(0.0);
            let mut acc = Jet2::new(b, zero, zero, zero);
            for (j, x) in current.iter().enumerate() {
                acc = acc + x.mul_scalar(weights[i * n_in + j]);
            }
            next.push(if l + 1 < n_layers { acc.tanh() } else { acc });
        }
        current = next;
    }
    current
}

/// Network output and its input derivatives at one collocation point,
/// exact to machine precision.
pub fn jet_eval(net: &NetworkParams, t: f64, x: Option<f64>) -> Result<Vec<Jet2>> {
    let input = input_jets(net.input_width(), t, x)?;
    Ok(eval_network_jets(&net.layer_sizes, &net.values, &input))
}

fn input_jets(width: usize, t: f64, x: Option<f64>) -> Result<Vec<Jet2>> {
    let given = 1 + x.is_some() as usize;
    if given != width {
        return Err(Error::ShapeMismatch {
            expected: width,
            given,
        });
    }
    Ok(match x {
        None => vec![Jet2::time_seed(t)],
        Some(x) => vec![Jet2::time_seed(t), Jet2::space_seed(x)],
    })
}

/// How the raw network output is turned into an ansatz satisfying the
/// initial condition exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShiftMode {
    /// u0(x) + N(t,x) - N(0,x). The subtracted term contributes to the
    /// space derivatives but not to ∂t.
    Additive,
    /// u0(x) + t * N(t,x); no evaluation at t = 0 is needed.
    TimeScaled,
}

/// Initial condition with the derivatives the shift needs.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    /// State-space constant (ODE problems); derivatives vanish.
    Constant(Vec<f64>),
    /// u0(x) = -sin(pi x) on [-1, 1].
    NegSinPi,
}

impl InitialCondition {
    pub fn dim(&self) -> usize {
        match self {
            InitialCondition::Constant(v) => v.len(),
            InitialCondition::NegSinPi => 1,
        }
    }

    /// (u0, u0', u0'') per output component at `x` (ignored for constants).
    pub fn jets_at(&self, x: Option<f64>) -> Vec<(f64, f64, f64)> {
        match self {
            InitialCondition::Constant(v) => v.iter().map(|&c| (c, 0.0, 0.0)).collect(),
            InitialCondition::NegSinPi => {
                let x = x.expect("space coordinate required for a spatial initial condition");
                let pi = std::f64::consts::PI;
                vec![(
                    -(pi * x).sin(),
                    -pi * (pi * x).cos(),
                    pi * pi * (pi * x).sin(),
                )]
            }
        }
    }
}

/// The network composed with the initial-condition shift.
#[derive(Debug, Clone)]
pub struct ShiftedAnsatz {
    net: NetworkParams,
    ic: InitialCondition,
    mode: ShiftMode,
}

impl ShiftedAnsatz {
    pub fn new(net: NetworkParams, ic: InitialCondition, mode: ShiftMode) -> Result<Self> {
        if net.output_width() != ic.dim() {
            return Err(Error::invalid(format!(
                "network output width {} does not match initial condition dimension {}",
                net.output_width(),
                ic.dim()
            )));
        }
        Ok(ShiftedAnsatz { net, ic, mode })
    }

    pub fn net(&self) -> &NetworkParams {
        &self.net
    }

    pub fn net_mut(&mut self) -> &mut NetworkParams {
        &mut self.net
    }

    pub fn initial_condition(&self) -> &InitialCondition {
        &self.ic
    }

    pub fn mode(&self) -> ShiftMode {
        self.mode
    }

    /// Shifted output and derivatives; satisfies the initial condition at
    /// t = 0 to machine precision by construction.
    ///
    /// Runs on the layer-wise fast path (thread-local workspaces), which
    /// agrees bit for bit with the generic evaluation.
    pub fn shifted_eval(&self, t: f64, x: Option<f64>) -> Result<Vec<Jet2>> {
        use backprop::{inputs, Workspace};
        use std::cell::RefCell;
        thread_local! {
            static WS: RefCell<(Workspace, Workspace)> =
                RefCell::new((Workspace::new(), Workspace::new()));
        }
        let given = 1 + x.is_some() as usize;
        if self.net.input_width() != given {
            return Err(Error::ShapeMismatch {
                expected: self.net.input_width(),
                given,
            });
        }
        let sizes = &self.net.layer_sizes;
        let params = &self.net.values;
        let u0 = self.ic.jets_at(x);
        Ok(WS.with(|cell| {
            let (ws_main, ws_zero) = &mut *cell.borrow_mut();
            match x {
                None => ws_main.forward(sizes, params, &inputs::time(t), 2),
                Some(x) => ws_main.forward(sizes, params, &inputs::space_time(t, x), 4),
            }
            let raw = ws_main.output_jets();
            match self.mode {
                ShiftMode::Additive => {
                    match x {
                        None => ws_zero.forward(sizes, params, &inputs::time_pinned(0.0), 2),
                        Some(x) => {
                            ws_zero.forward(sizes, params, &inputs::space_time_pinned(0.0, x), 4)
                        }
                    }
                    let at_zero = ws_zero.output_jets();
                    raw.into_iter()
                        .zip(at_zero)
                        .zip(u0)
                        .map(|((n, n0), (v, dx, dxx))| {
                            let n0_no_t = Jet2::new(n0.value, 0.0, n0.d_x, n0.d_xx);
                            n - n0_no_t + Jet2::new(v, 0.0, dx, dxx)
                        })
                        .collect()
                }
                ShiftMode::TimeScaled => {
                    let t_jet = Jet2::time_seed(t);
                    raw.into_iter()
                        .zip(u0)
                        .map(|(n, (v, dx, dxx))| Jet2::new(v, 0.0, dx, dxx) + t_jet * n)
                        .collect()
                }
            }
        }))
    }

    /// Same computation with the parameters substituted by any scalar type,
    /// so the shift can be recorded on a gradient tape.
    pub fn shifted_eval_generic<S: Scalar>(
        &self,
        params: &[S],
        t: f64,
        x: Option<f64>,
    ) -> Result<Vec<Jet2<S>>> {
        let given = 1 + x.is_some() as usize;
        if self.net.input_width() != given {
            return Err(Error::ShapeMismatch {
                expected: self.net.input_width(),
                given,
            });
        }
        let lift = params[0];
        let tj = Jet2::new(lift.lift(t), lift.lift(1.0), lift.lift(0.0), lift.lift(0.0));
        let input: Vec<Jet2<S>> = match x {
            None => vec![tj],
            Some(x) => vec![
                tj,
                Jet2::new(lift.lift(x), lift.lift(0.0), lift.lift(1.0), lift.lift(0.0)),
            ],
        };
        Ok(self.shifted_from_input(params, &input, t, x))
    }

    fn shifted_from_input<S: Scalar>(
        &self,
        params: &[S],
        input: &[Jet2<S>],
        t: f64,
        x: Option<f64>,
    ) -> Vec<Jet2<S>> {
        let sizes = &self.net.layer_sizes;
        let raw = eval_network_jets(sizes, params, input);
        let u0 = self.ic.jets_at(x);
        let lift = input[0].value;
        match self.mode {
            ShiftMode::Additive => {
                let zero_input: Vec<Jet2<S>> = {
                    let mut zi = input.to_vec();
                    // Pin time to zero: value 0, no time seed.
                    zi[0] = Jet2::new(lift.lift(0.0), lift.lift(0.0), lift.lift(0.0), lift.lift(0.0));
                    zi
                };
                let at_zero = eval_network_jets(sizes, params, &zero_input);
                raw.into_iter()
                    .zip(at_zero)
                    .zip(u0)
                    .map(|((n, n0), (v, dx, dxx))| {
                        // The subtracted term has no time dependence.
                        let n0_no_t = Jet2::new(n0.value, lift.lift(0.0), n0.d_x, n0.d_xx);
                        let u0_jet = Jet2::new(lift.lift(v), lift.lift(0.0), lift.lift(dx), lift.lift(dxx));
                        n - n0_no_t + u0_jet
                    })
                    .collect()
            }
            ShiftMode::TimeScaled => {
                let t_jet = Jet2::new(lift.lift(t), lift.lift(1.0), lift.lift(0.0), lift.lift(0.0));
                raw.into_iter()
                    .zip(u0)
                    .map(|(n, (v, dx, dxx))| {
                        let u0_jet = Jet2::new(lift.lift(v), lift.lift(0.0), lift.lift(dx), lift.lift(dxx));
                        u0_jet + t_jet * n
                    })
                    .collect()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Xoshiro256;

    pub(crate) fn lorenz_sizes() -> Vec<usize> {
        vec![1, 20, 20, 20, 20, 20, 3]
    }

    pub(crate) fn burgers_sizes() -> Vec<usize> {
        vec![2, 20, 20, 20, 20, 20, 20, 20, 20, 1]
    }

    #[test]
    fn parameter_counts_match_both_configurations() {
        assert_eq!(param_count(&lorenz_sizes()), 1783);
        assert_eq!(param_count(&burgers_sizes()), 3021);
        let net = init_network(&lorenz_sizes(), 0).unwrap();
        assert_eq!(net.len(), 1783);
        let net = init_network(&burgers_sizes(), 0).unwrap();
        assert_eq!(net.len(), 3021);
    }

    #[test]
    fn glorot_bounds_and_zero_biases() {
        // [1,1]: 2 parameters, weight within +-sqrt(3) for fan_in = fan_out = 1.
        let net = init_network(&[1, 1], 5).unwrap();
        assert_eq!(net.len(), 2);
        assert!(net.values()[0].abs() <= 3f64.sqrt());
        assert_eq!(net.values()[1], 0.0);

        let net = init_network(&[2, 20, 1], 11).unwrap();
        let lim1 = (6.0 / 22.0f64).sqrt();
        for &w in &net.values()[..40] {
            assert!(w.abs() <= lim1);
        }
        for &b in &net.values()[40..60] {
            assert_eq!(b, 0.0);
        }
    }

    #[test]
    fn reinitialization_is_reproducible() {
        let a = init_network(&lorenz_sizes(), 123).unwrap();
        let b = init_network(&lorenz_sizes(), 123).unwrap();
        assert_eq!(a, b);
        let c = init_network(&lorenz_sizes(), 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_width_layer_rejected() {
        assert!(matches!(
            init_network(&[1, 0, 3], 0),
            Err(Error::ZeroWidthLayer)
        ));
    }

    #[test]
    fn single_neuron_closed_form() {
        // One tanh neuron with an identity readout: value tanh(w t + b).
        let (w, b) = (0.8, -0.3);
        let net = NetworkParams::from_values(vec![1, 1, 1], vec![w, b, 1.0, 0.0], 0).unwrap();
        let t = 0.4;
        let out = jet_eval(&net, t, None).unwrap();
        let y = (w * t + b).tanh();
        assert!((out[0].value - y).abs() < 1e-15);
        assert!((out[0].d_t - w * (1.0 - y * y)).abs() < 1e-15);
    }

    #[test]
    fn zero_network_outputs_zero_jets() {
        let sizes = [2, 4, 4, 1];
        let net = NetworkParams::from_values(
            sizes.to_vec(),
            vec![0.0; param_count(&sizes)],
            0,
        )
        .unwrap();
        let out = jet_eval(&net, 0.3, Some(-0.7)).unwrap();
        assert_eq!(out[0].value, 0.0);
        assert_eq!(out[0].d_t, 0.0);
        assert_eq!(out[0].d_xx, 0.0);
    }

    #[test]
    fn jet_derivatives_match_finite_differences() {
        let net = init_network(&[2, 12, 12, 2], 3).unwrap();
        let h = 1e-5;
        let val = |t: f64, x: f64, k: usize| jet_eval(&net, t, Some(x)).unwrap()[k].value;
        let mut rng = Xoshiro256::seed_from_u64(9);
        for _ in 0..20 {
            let (t, x) = (rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
            for k in 0..2 {
                let jet = jet_eval(&net, t, Some(x)).unwrap()[k];
                let fd_t = (val(t + h, x, k) - val(t - h, x, k)) / (2.0 * h);
                let fd_x = (val(t, x + h, k) - val(t, x - h, k)) / (2.0 * h);
                let fd_xx = (val(t, x + h, k) - 2.0 * val(t, x, k) + val(t, x - h, k)) / (h * h);
                let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-3);
                assert!(rel(jet.d_t, fd_t) < 1e-6);
                assert!(rel(jet.d_x, fd_x) < 1e-6);
                assert!(rel(jet.d_xx, fd_xx) < 1e-4);
            }
        }
    }

    #[test]
    fn input_arity_is_checked() {
        let net = init_network(&[1, 4, 3], 0).unwrap();
        assert!(matches!(
            jet_eval(&net, 0.0, Some(1.0)),
            Err(Error::ShapeMismatch { .. })
        ));
        let net2 = init_network(&[2, 4, 1], 0).unwrap();
        assert!(matches!(
            jet_eval(&net2, 0.0, None),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn shift_enforces_initial_condition_exactly() {
        let net = init_network(&burgers_sizes(), 7).unwrap();
        for mode in [ShiftMode::Additive, ShiftMode::TimeScaled] {
            let ansatz = ShiftedAnsatz::new(net.clone(), InitialCondition::NegSinPi, mode).unwrap();
            let mut rng = Xoshiro256::seed_from_u64(1);
            for _ in 0..100 {
                let x = rng.uniform(-1.0, 1.0);
                let u = ansatz.shifted_eval(0.0, Some(x)).unwrap();
                let u0 = -(std::f64::consts::PI * x).sin();
                assert_eq!(u[0].value, u0, "mode {mode:?}");
            }
        }
    }

    #[test]
    fn lorenz_shift_hits_unit_initial_state() {
        let net = init_network(&lorenz_sizes(), 42).unwrap();
        let ansatz = ShiftedAnsatz::new(
            net,
            InitialCondition::Constant(vec![1.0, 1.0, 1.0]),
            ShiftMode::Additive,
        )
        .unwrap();
        let u = ansatz.shifted_eval(0.0, None).unwrap();
        for c in &u {
            assert_eq!(c.value, 1.0);
        }
    }

    #[test]
    fn zero_network_shifted_value_is_u0_for_all_t() {
        let sizes = [2, 5, 1];
        let net =
            NetworkParams::from_values(sizes.to_vec(), vec![0.0; param_count(&sizes)], 0).unwrap();
        let ansatz = ShiftedAnsatz::new(net, InitialCondition::NegSinPi, ShiftMode::Additive).unwrap();
        for &t in &[0.0, 0.3, 1.0] {
            let u = ansatz.shifted_eval(t, Some(0.5)).unwrap();
            assert!((u[0].value - (-1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn snapshot_round_trip_is_exact() {
        let net = init_network(&[2, 7, 3], 99).unwrap();
        let text = net.to_snapshot();
        let back = NetworkParams::from_snapshot(&text).unwrap();
        assert_eq!(net, back);
        assert_eq!(back.seed(), 99);
    }

    #[test]
    fn fast_and_generic_shifted_eval_agree_bitwise() {
        let net = init_network(&[2, 10, 6, 1], 17).unwrap();
        for mode in [ShiftMode::Additive, ShiftMode::TimeScaled] {
            let ansatz =
                ShiftedAnsatz::new(net.clone(), InitialCondition::NegSinPi, mode).unwrap();
            for &(t, x) in &[(0.0, 0.5), (0.31, -0.77), (1.0, 0.99)] {
                let fast = ansatz.shifted_eval(t, Some(x)).unwrap();
                let slow = ansatz
                    .shifted_eval_generic(ansatz.net().values(), t, Some(x))
                    .unwrap();
                for (f, s) in fast.iter().zip(&slow) {
                    assert_eq!(f.value.to_bits(), s.value.to_bits());
                    assert_eq!(f.d_t.to_bits(), s.d_t.to_bits());
                    assert_eq!(f.d_x.to_bits(), s.d_x.to_bits());
                    assert_eq!(f.d_xx.to_bits(), s.d_xx.to_bits());
                }
            }
        }
    }
}
