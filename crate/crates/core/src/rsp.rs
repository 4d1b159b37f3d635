//! Entanglement-assisted simulation: one classical bit per sender plus a
//! shared |φ⁺⟩ replaces the qubit line by remote state preparation.
//!
//! The sender measures her half of |φ⁺⟩ = (|00⟩ + |11⟩)/√2 in the basis
//! {|ψ⟩, |ψ^⊥⟩} and sends the outcome bit. Projecting the first qubit on
//! |v⟩ leaves the receiver with Σ_j (Σ_i v̄_i φ_{2i+j}) |j⟩ = |v̄⟩/√2, so each
//! outcome has probability ½ and the receiver holds the complex conjugate
//! of the projected state. On the xz great circle amplitudes are real:
//! outcome 0 leaves |ψ⟩ = (c, s) directly and outcome 1 leaves
//! |ψ^⊥⟩ = (−s, c), which σ_Y maps to −i(c, s), i.e. |ψ⟩ up to phase.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{born_probability, projector, tensor_all, DensityOperator, Ket, Operator, STRUCTURAL_TOL};
use crate::mac::{Mac, QuantumStrategy};

/// Remote state preparation of a fixed family of real qubit states.
#[derive(Debug, Clone)]
pub struct RspProtocol {
    targets: Vec<Ket>,
    correction: Operator,
}

impl RspProtocol {
    /// Accepts normalized qubit states whose amplitudes are real within
    /// [`STRUCTURAL_TOL`].
    pub fn new(targets: Vec<Ket>) -> Result<Self> {
        for (input, k) in targets.iter().enumerate() {
            if k.dim() != 2 {
                return Err(Error::DimensionMismatch { expected: 2, found: k.dim() });
            }
            if !k.is_normalized() {
                return Err(Error::NotNormalized { norm_sqr: k.norm_sqr() });
            }
            let imag = k.max_imaginary();
            if imag > STRUCTURAL_TOL {
                return Err(Error::NonRealTarget { input, imag });
            }
        }
        Ok(Self { targets, correction: Operator::pauli_y() })
    }

    pub fn targets(&self) -> &[Ket] {
        &self.targets
    }

    /// Unitary the receiver applies when the sent bit is 1.
    pub fn correction(&self) -> &Operator {
        &self.correction
    }
}

/// One measurement outcome of the sender.
#[derive(Debug, Clone, Serialize)]
pub struct RspBranch {
    pub bit: u8,
    pub probability: f64,
    #[serde(skip)]
    pub state: Ket,
    /// |⟨target|state⟩|² after correction.
    pub fidelity: f64,
}

fn phi_plus() -> Ket {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    Ket::from_real(&[h, 0.0, 0.0, h]).expect("normalized")
}

/// Receiver's unnormalized state after the sender projects her half on |v⟩.
fn conditional_state(shared: &Ket, v: &Ket) -> Ket {
    let phi = shared.amplitudes();
    let amps = (0..2)
        .map(|j| (0..2).map(|i| v.amplitudes()[i].conj() * phi[2 * i + j]).sum())
        .collect();
    Ket::new(amps).expect("dimension 2")
}

/// Both branches of the protocol for one input, in bit order.
pub fn rsp_simulate(proto: &RspProtocol, input: usize) -> Result<[RspBranch; 2]> {
    let target = proto
        .targets
        .get(input)
        .ok_or_else(|| Error::InvalidArgument(format!("input {input} out of range")))?;
    let a = target.amplitudes();
    let orthogonal = Ket::new(vec![-a[1], a[0]])?;
    let shared = phi_plus();
    let branch = |bit: u8, v: &Ket| -> Result<RspBranch> {
        let held = conditional_state(&shared, v);
        let probability = held.norm_sqr();
        let held = held.scaled((1.0 / probability.sqrt()).into());
        let state = if bit == 1 { proto.correction.apply(&held)? } else { held };
        let fidelity = target.fidelity(&state)?;
        Ok(RspBranch { bit, probability, state, fidelity })
    };
    Ok([branch(0, target)?, branch(1, &orthogonal)?])
}

/// The channel obtained when every sender runs remote state preparation of
/// its encoding states and the receiver applies the strategy's measurement,
/// averaging exactly over all 2^K equally likely branch combinations.
pub fn ea_mac_simulate(strategy: &QuantumStrategy) -> Result<Mac> {
    let protocols = strategy
        .encodings()
        .iter()
        .map(|enc| RspProtocol::new(enc.clone()))
        .collect::<Result<Vec<_>>>()?;
    let shape = strategy.shape();
    let k = shape.senders();
    let columns = shape.columns();
    let effects = strategy.decoding().effects();
    let mut probabilities = vec![0.0; shape.entries()];
    for column in 0..columns {
        let inputs = shape.unflatten(column);
        let branches = protocols
            .iter()
            .zip(&inputs)
            .map(|(p, &x)| rsp_simulate(p, x))
            .collect::<Result<Vec<_>>>()?;
        for combo in 0..1usize << k {
            let picked: Vec<&RspBranch> =
                branches.iter().enumerate().map(|(i, b)| &b[combo >> (k - 1 - i) & 1]).collect();
            let weight: f64 = picked.iter().map(|b| b.probability).product();
            let factors = picked
                .iter()
                .map(|b| DensityOperator::new(projector(&b.state, true)?))
                .collect::<Result<Vec<_>>>()?;
            let state = tensor_all(&factors).expect("at least one sender");
            for (a, effect) in effects.iter().enumerate() {
                probabilities[a * columns + column] += weight * born_probability(effect, &state)?;
            }
        }
    }
    Mac::from_probabilities(shape, probabilities)
}

/// Empirical output of a sampled run of the assisted protocol.
#[derive(Debug, Clone, Serialize)]
pub struct SampledRun {
    pub inputs: Vec<usize>,
    pub shots: usize,
    /// How often each sender sent bit 1.
    pub ones_sent: Vec<usize>,
    pub output_counts: Vec<usize>,
    pub exact: Vec<f64>,
}

impl SampledRun {
    pub fn frequencies(&self) -> Vec<f64> {
        self.output_counts.iter().map(|&c| c as f64 / self.shots as f64).collect()
    }

    pub fn max_deviation(&self) -> f64 {
        self.frequencies().iter().zip(&self.exact).map(|(f, p)| (f - p).abs()).fold(0.0, f64::max)
    }
}

fn sample_index<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let r: f64 = rng.gen::<f64>() * weights.iter().sum::<f64>();
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if r < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Samples the assisted protocol shot by shot: each sender's measurement
/// outcome, then the receiver's measurement on the corrected states. For
/// demonstration only; [`ea_mac_simulate`] is exact.
pub fn sample_ea_run<R: Rng + ?Sized>(
    strategy: &QuantumStrategy,
    inputs: &[usize],
    shots: usize,
    rng: &mut R,
) -> Result<SampledRun> {
    let shape = strategy.shape();
    if inputs.len() != shape.senders()
        || inputs.iter().zip(shape.input_cardinalities()).any(|(&x, &n)| x >= n)
    {
        return Err(Error::InvalidArgument(format!("inputs {inputs:?} do not fit the strategy")));
    }
    let branches = strategy
        .encodings()
        .iter()
        .zip(inputs)
        .map(|(enc, &x)| rsp_simulate(&RspProtocol::new(enc.clone())?, x))
        .collect::<Result<Vec<_>>>()?;
    let effects = strategy.decoding().effects();
    let k = shape.senders();
    // Output distribution for each branch combination.
    let tables = (0..1usize << k)
        .map(|combo| {
            let factors = branches
                .iter()
                .enumerate()
                .map(|(i, b)| DensityOperator::new(projector(&b[combo >> (k - 1 - i) & 1].state, true)?))
                .collect::<Result<Vec<_>>>()?;
            let state = tensor_all(&factors).expect("at least one sender");
            effects.iter().map(|e| born_probability(e, &state).map(|p| p.max(0.0))).collect()
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;
    let mut ones_sent = vec![0; k];
    let mut output_counts = vec![0; effects.len()];
    for _ in 0..shots {
        let mut combo = 0;
        for (i, b) in branches.iter().enumerate() {
            let bit = sample_index(rng, &[b[0].probability, b[1].probability]);
            ones_sent[i] += bit;
            combo |= bit << (k - 1 - i);
        }
        output_counts[sample_index(rng, &tables[combo])] += 1;
    }
    let exact_mac = crate::mac::mac_from_quantum_strategy(strategy)?;
    let exact = exact_mac.column(shape.flatten(inputs));
    Ok(SampledRun { inputs: inputs.to_vec(), shots, ones_sent, output_counts, exact })
}
