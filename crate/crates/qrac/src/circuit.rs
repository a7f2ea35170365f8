//! Circuit synthesis: the rotation cascade diagonalizing each optimal
//! observable, its lowering to standard gates, and the reference-state
//! encoding circuit.
//!
//! Wires are 1-based and coincide with Pauli sites; wire 1 is the most
//! significant basis bit.

use num_complex::Complex;

use crate::codebook::{displacement, DisplacementData, Bits, QracInstance};
use crate::decoder::{epsilon, mu, w_decomposition, WDecomposition};
use crate::dense::{DenseOperator, StateVector};
use crate::error::{QracError, Result};
use crate::pauli::{PauliLetter, PauliString, PauliSum};
use crate::scalar::{from_usize, real, Real, CONSTRUCTION_TOL};

/// Which half of the cascade a rotation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Left,
    Right,
}

/// One rotation `exp(-i * angle * generator / 2)` of the cascade.
#[derive(Debug, Clone)]
pub struct RotationStep<T: Real> {
    pub generator: PauliString,
    pub angle: T,
    pub stage: Stage,
    pub m: usize,
}

/// Standard gate set plus the abstract multi-controlled RY.
#[derive(Debug, Clone, PartialEq)]
pub enum Gate<T: Real> {
    H(usize),
    X(usize),
    Z(usize),
    S(usize),
    Sdg(usize),
    Ry(usize, T),
    Rz(usize, T),
    Cnot { control: usize, target: usize },
    /// RY on `target` conditioned on every control wire being |0>.
    Mcry {
        controls: Vec<usize>,
        target: usize,
        angle: T,
    },
}

/// Ordered gate sequence; gates are listed in application order (the first
/// gate is applied first).
#[derive(Debug, Clone)]
pub struct Circuit<T: Real> {
    pub num_qubits: usize,
    pub gates: Vec<Gate<T>>,
    pub metadata: String,
}

impl<T: Real> Circuit<T> {
    pub fn cnot_count(&self) -> usize {
        self.gates
            .iter()
            .filter(|g| matches!(g, Gate::Cnot { .. }))
            .count()
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }
}

/// `i * a * b` resolved to a signed Hermitian word; errors unless the phase
/// is real (it always is for anticommuting Hermitian factors).
fn i_product(a: &PauliString, b: &PauliString) -> Result<PauliString> {
    let (phase, word) = a.multiply(b)?;
    match (phase + 1) % 4 {
        0 => Ok(word),
        2 => Ok(word.negated()),
        p => Err(QracError::NonRealPhase(p)),
    }
}

/// The rotation cascade for bit `k`, in application order: left steps
/// ascending, then right steps descending, then the merging step at m = k.
pub fn diagonalization_rotations<T: Real>(
    inst: &QracInstance,
    k: usize,
) -> Result<Vec<RotationStep<T>>> {
    inst.check_index(k)?;
    let n = inst.n();
    let dec: WDecomposition<T> = w_decomposition(inst, k)?;
    let eps = epsilon::<T>(n);
    let c_k = mu::<T>(n).sqrt();
    let w = |j: usize| dec.words[j - 1];

    let mut steps = Vec::with_capacity(n - 1);
    for m in 1..k {
        let generator = i_product(&w(m + 1), &w(m))?;
        let angle = if m < k - 1 {
            from_usize::<T>(m).sqrt().atan()
        } else {
            (from_usize::<T>(k - 1).sqrt() * eps / c_k).atan()
        };
        steps.push(RotationStep {
            generator,
            angle,
            stage: Stage::Left,
            m,
        });
    }
    for m in (k..n).rev() {
        let generator = i_product(&w(m), &w(m + 1))?;
        let angle = if m > k {
            from_usize::<T>(n - m).sqrt().atan()
        } else {
            let merged = (from_usize::<T>(k - 1) * eps * eps + c_k * c_k).sqrt();
            (from_usize::<T>(n - k).sqrt() * eps / merged).atan()
        };
        steps.push(RotationStep {
            generator,
            angle,
            stage: Stage::Right,
            m,
        });
    }

    for step in &steps {
        check_generator_locality(step)?;
    }
    Ok(steps)
}

fn check_generator_locality<T: Real>(step: &RotationStep<T>) -> Result<()> {
    let weight = step.generator.weight();
    if weight > 2 {
        return Err(QracError::GeneratorWeight(weight));
    }
    let support = step.generator.support();
    if !support.iter().all(|&s| s == step.m || s == step.m + 1) {
        return Err(QracError::GeneratorWeight(weight));
    }
    Ok(())
}

/// Conjugates `observable` through the cascade and checks that it contracts
/// exactly to the diagonal word, with the per-step coefficient invariant of
/// the left region asserted along the way.
pub fn contract_observable<T: Real>(inst: &QracInstance, k: usize) -> Result<PauliSum<T>> {
    let n = inst.n();
    let dec: WDecomposition<T> = w_decomposition(inst, k)?;
    let eps = epsilon::<T>(n);
    let steps = diagonalization_rotations::<T>(inst, k)?;
    let tol: T = real(CONSTRUCTION_TOL);

    let mut current = dec.as_sum();
    for step in &steps {
        current = current.rotate_conjugate(&step.generator, step.angle)?;
        if step.stage == Stage::Left && step.m < k - 1 {
            // After left step m the mass sits on W_{m+1} with coefficient
            // sqrt(m+1) * eps.
            let expected = from_usize::<T>(step.m + 1).sqrt() * eps;
            let got = current.coefficient(&dec.words[step.m]);
            if (got - expected).abs() > tol {
                return Err(QracError::ContractionResidual(
                    (got - expected).abs().to_f64().unwrap_or(f64::NAN),
                ));
            }
        }
    }

    let mut target = PauliSum::zero(inst.m());
    target.add_term(T::one(), &dec.words[k - 1]);
    let residual = current.distance(&target);
    if residual > tol {
        return Err(QracError::ContractionResidual(
            residual.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(current)
}

/// Lowers cascade steps to H/S/CNOT/rotations. Two-body generators become a
/// CNOT-conjugated RZ with per-site basis changes; generator signs are
/// absorbed into the rotation angle.
pub fn lower_to_gates<T: Real>(steps: &[RotationStep<T>], num_qubits: usize) -> Result<Circuit<T>> {
    let mut gates = Vec::new();
    for step in steps {
        let weight = step.generator.weight();
        if weight > 2 {
            return Err(QracError::GeneratorWeight(weight));
        }
        let angle = if step.generator.sign() < 0 {
            -step.angle
        } else {
            step.angle
        };
        let support = step.generator.support();
        match support.len() {
            0 => {} // identity generator: global phase only
            1 => {
                let q = support[0];
                match step.generator.letter(q) {
                    PauliLetter::X => {
                        gates.push(Gate::H(q));
                        gates.push(Gate::Rz(q, angle));
                        gates.push(Gate::H(q));
                    }
                    PauliLetter::Y => gates.push(Gate::Ry(q, angle)),
                    PauliLetter::Z => gates.push(Gate::Rz(q, angle)),
                    PauliLetter::I => unreachable!(),
                }
            }
            2 => {
                let (a, b) = (support[0], support[1]);
                push_basis_change(&mut gates, a, step.generator.letter(a), false);
                push_basis_change(&mut gates, b, step.generator.letter(b), false);
                gates.push(Gate::Cnot {
                    control: a,
                    target: b,
                });
                gates.push(Gate::Rz(b, angle));
                gates.push(Gate::Cnot {
                    control: a,
                    target: b,
                });
                push_basis_change(&mut gates, b, step.generator.letter(b), true);
                push_basis_change(&mut gates, a, step.generator.letter(a), true);
            }
            _ => unreachable!(),
        }
    }
    Ok(Circuit {
        num_qubits,
        gates,
        metadata: String::new(),
    })
}

// Fixed basis-change table: X -> Z via H, Y -> Z via S-dagger then H.
fn push_basis_change<T: Real>(gates: &mut Vec<Gate<T>>, q: usize, letter: PauliLetter, inverse: bool) {
    match (letter, inverse) {
        (PauliLetter::X, _) => gates.push(Gate::H(q)),
        (PauliLetter::Y, false) => {
            gates.push(Gate::Sdg(q));
            gates.push(Gate::H(q));
        }
        (PauliLetter::Y, true) => {
            gates.push(Gate::H(q));
            gates.push(Gate::S(q));
        }
        (PauliLetter::Z, _) | (PauliLetter::I, _) => {}
    }
}

/// Full decoding circuit for bit `k`: cascade synthesis plus gate lowering.
pub fn decoding_circuit<T: Real>(inst: &QracInstance, k: usize) -> Result<Circuit<T>> {
    let steps = diagonalization_rotations::<T>(inst, k)?;
    let mut circuit = lower_to_gates(&steps, inst.m())?;
    circuit.metadata = format!("n={} k={}", inst.n(), k);
    Ok(circuit)
}

/// Encoding circuit: the controlled-RY ladder preparing the reference state,
/// followed by the displacement layer. Even-parity inputs reduce to an
/// X layer preparing the basis state. The returned sign is the global
/// (-1)^{v.y} phase of the prepared state relative to the direct encoding.
pub fn encoding_circuit<T: Real>(y: &Bits, inst: &QracInstance) -> Result<(Circuit<T>, i8)> {
    if y.len() != inst.n() {
        return Err(QracError::BadBitstring(y.len(), inst.n()));
    }
    let n = inst.n();
    let m = inst.m();
    let mut gates = Vec::new();

    if y.parity() == 0 {
        for i in 1..=m {
            if y.bit(i) == 1 {
                gates.push(Gate::X(i));
            }
        }
        return Ok((
            Circuit {
                num_qubits: m,
                gates,
                metadata: format!("n={} encode:{}", n, y),
            },
            1,
        ));
    }

    // Reference-state ladder: step k rotates wire k when wires 1..k-1 are
    // all |0>.
    for k in 1..=m {
        let angle = (T::one() / from_usize::<T>(n - k).sqrt()).atan() * real::<T>(2.0);
        gates.push(Gate::Mcry {
            controls: (1..k).collect(),
            target: k,
            angle,
        });
    }

    let data: DisplacementData = displacement(y)?;
    for i in 1..=m {
        if data.u.bit(i) == 1 {
            gates.push(Gate::X(i));
        }
    }
    for i in 1..=m {
        if data.v_prime.bit(i) == 1 {
            gates.push(Gate::Z(i));
        }
    }
    Ok((
        Circuit {
            num_qubits: m,
            gates,
            metadata: format!("n={} encode:{}", n, y),
        },
        data.global_sign,
    ))
}

/// Rewrites every MCRY into CNOT + RY via the ancilla-free halving
/// recursion, conjugating the zero-polarity controls with X.
pub fn expand_mcry<T: Real>(circuit: &Circuit<T>) -> Circuit<T> {
    let mut gates = Vec::new();
    for gate in &circuit.gates {
        match gate {
            Gate::Mcry {
                controls,
                target,
                angle,
            } => {
                for &c in controls {
                    gates.push(Gate::X(c));
                }
                expand_controlled_ry(controls, *target, *angle, &mut gates);
                for &c in controls {
                    gates.push(Gate::X(c));
                }
            }
            g => gates.push(g.clone()),
        }
    }
    Circuit {
        num_qubits: circuit.num_qubits,
        gates,
        metadata: circuit.metadata.clone(),
    }
}

// C^j RY(theta) = C^{j-1} RY(theta/2) . CNOT(c_j) . C^{j-1} RY(-theta/2) . CNOT(c_j)
// with one-polarity controls; RY halves commute through the CNOT pattern.
fn expand_controlled_ry<T: Real>(controls: &[usize], target: usize, angle: T, out: &mut Vec<Gate<T>>) {
    match controls.split_last() {
        None => out.push(Gate::Ry(target, angle)),
        Some((&last, rest)) => {
            let half = angle / real::<T>(2.0);
            expand_controlled_ry(rest, target, half, out);
            out.push(Gate::Cnot {
                control: last,
                target,
            });
            expand_controlled_ry(rest, target, -half, out);
            out.push(Gate::Cnot {
                control: last,
                target,
            });
        }
    }
}

fn wire_bit(num_qubits: usize, wire: usize) -> usize {
    num_qubits - wire
}

fn apply_single<T: Real>(
    state: &mut [Complex<T>],
    num_qubits: usize,
    wire: usize,
    matrix: [[Complex<T>; 2]; 2],
) {
    let bit = wire_bit(num_qubits, wire);
    let stride = 1usize << bit;
    let dim = state.len();
    let mut base = 0;
    while base < dim {
        for offset in 0..stride {
            let i0 = base + offset;
            let i1 = i0 + stride;
            let a = state[i0];
            let b = state[i1];
            state[i0] = matrix[0][0] * a + matrix[0][1] * b;
            state[i1] = matrix[1][0] * a + matrix[1][1] * b;
        }
        base += stride << 1;
    }
}

/// Applies one gate to a state vector in place.
pub fn apply_gate<T: Real>(state: &mut Vec<Complex<T>>, num_qubits: usize, gate: &Gate<T>) {
    let zero = T::zero();
    let one = T::one();
    let c = |re: T, im: T| Complex::new(re, im);
    match gate {
        Gate::H(q) => {
            let h = one / real::<T>(2.0).sqrt();
            apply_single(
                state,
                num_qubits,
                *q,
                [[c(h, zero), c(h, zero)], [c(h, zero), c(-h, zero)]],
            );
        }
        Gate::X(q) => apply_single(
            state,
            num_qubits,
            *q,
            [[c(zero, zero), c(one, zero)], [c(one, zero), c(zero, zero)]],
        ),
        Gate::Z(q) => apply_single(
            state,
            num_qubits,
            *q,
            [[c(one, zero), c(zero, zero)], [c(zero, zero), c(-one, zero)]],
        ),
        Gate::S(q) => apply_single(
            state,
            num_qubits,
            *q,
            [[c(one, zero), c(zero, zero)], [c(zero, zero), c(zero, one)]],
        ),
        Gate::Sdg(q) => apply_single(
            state,
            num_qubits,
            *q,
            [[c(one, zero), c(zero, zero)], [c(zero, zero), c(zero, -one)]],
        ),
        Gate::Ry(q, theta) => {
            let half = *theta / real::<T>(2.0);
            let (s, co) = (half.sin(), half.cos());
            apply_single(
                state,
                num_qubits,
                *q,
                [[c(co, zero), c(-s, zero)], [c(s, zero), c(co, zero)]],
            );
        }
        Gate::Rz(q, theta) => {
            let half = *theta / real::<T>(2.0);
            apply_single(
                state,
                num_qubits,
                *q,
                [
                    [Complex::from_polar(one, -half), c(zero, zero)],
                    [c(zero, zero), Complex::from_polar(one, half)],
                ],
            );
        }
        Gate::Cnot { control, target } => {
            let cb = 1usize << wire_bit(num_qubits, *control);
            let tb = 1usize << wire_bit(num_qubits, *target);
            for idx in 0..state.len() {
                if idx & cb != 0 && idx & tb == 0 {
                    state.swap(idx, idx | tb);
                }
            }
        }
        Gate::Mcry {
            controls,
            target,
            angle,
        } => {
            let half = *angle / real::<T>(2.0);
            let (s, co) = (half.sin(), half.cos());
            let control_mask: usize = controls
                .iter()
                .map(|&q| 1usize << wire_bit(num_qubits, q))
                .sum();
            let tb = 1usize << wire_bit(num_qubits, *target);
            for idx in 0..state.len() {
                // zero-polarity controls, target bit clear: rotate the pair
                if idx & control_mask == 0 && idx & tb == 0 {
                    let a = state[idx];
                    let b = state[idx | tb];
                    state[idx] = a * c(co, zero) + b * c(-s, zero);
                    state[idx | tb] = a * c(s, zero) + b * c(co, zero);
                }
            }
        }
    }
}

/// Runs the circuit on |0...0>.
pub fn run_circuit<T: Real>(circuit: &Circuit<T>) -> StateVector<T> {
    let dim = 1usize << circuit.num_qubits;
    let mut state = vec![Complex::new(T::zero(), T::zero()); dim];
    state[0] = Complex::new(T::one(), T::zero());
    for gate in &circuit.gates {
        apply_gate(&mut state, circuit.num_qubits, gate);
    }
    StateVector::from_amplitudes(state)
}

/// Dense unitary of the circuit (gate product in application order), with a
/// unitarity check.
pub fn circuit_to_unitary<T: Real>(circuit: &Circuit<T>) -> Result<DenseOperator<T>> {
    let dim = 1usize << circuit.num_qubits;
    if circuit.num_qubits > crate::scalar::DEFAULT_DENSE_LIMIT {
        return Err(QracError::DenseLimit {
            sites: circuit.num_qubits,
            limit: crate::scalar::DEFAULT_DENSE_LIMIT,
        });
    }
    let mut u = DenseOperator::zeros(dim);
    for col in 0..dim {
        let mut state = vec![Complex::new(T::zero(), T::zero()); dim];
        state[col] = Complex::new(T::one(), T::zero());
        for gate in &circuit.gates {
            apply_gate(&mut state, circuit.num_qubits, gate);
        }
        for row in 0..dim {
            u[(row, col)] = state[row];
        }
    }
    let defect = u
        .adjoint()
        .matmul(&u)?
        .max_abs_diff(&DenseOperator::identity(dim))?;
    if defect > real(crate::scalar::ALGEBRA_TOL) {
        return Err(QracError::SpectralCheck(format!(
            "unitarity defect {defect:?}"
        )));
    }
    Ok(u)
}

/// Native line-based text rendering: header comments, then one gate per
/// line with angles at 17 significant digits.
pub fn render_native<T: Real>(circuit: &Circuit<T>) -> String {
    let mut out = String::new();
    out.push_str(&format!("# qrac circuit {}\n", circuit.metadata));
    out.push_str(&format!("# qubits {}\n", circuit.num_qubits));
    for gate in &circuit.gates {
        let line = match gate {
            Gate::H(q) => format!("h {q}"),
            Gate::X(q) => format!("x {q}"),
            Gate::Z(q) => format!("z {q}"),
            Gate::S(q) => format!("s {q}"),
            Gate::Sdg(q) => format!("sdg {q}"),
            Gate::Ry(q, a) => format!("ry {q} {}", fmt_angle(*a)),
            Gate::Rz(q, a) => format!("rz {q} {}", fmt_angle(*a)),
            Gate::Cnot { control, target } => format!("cx {control} {target}"),
            Gate::Mcry {
                controls,
                target,
                angle,
            } => {
                let ctrl: Vec<String> = controls.iter().map(|c| c.to_string()).collect();
                format!("mcry0 [{}] {target} {}", ctrl.join(","), fmt_angle(*angle))
            }
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// OpenQASM 2.0 rendering; MCRY gates are expanded first.
pub fn render_qasm<T: Real>(circuit: &Circuit<T>) -> String {
    let expanded = expand_mcry(circuit);
    let mut out = String::new();
    out.push_str(&format!("// {}\n", circuit.metadata));
    out.push_str("OPENQASM 2.0;\n");
    out.push_str("include \"qelib1.inc\";\n");
    out.push_str(&format!("qreg q[{}];\n", circuit.num_qubits));
    for gate in &expanded.gates {
        let line = match gate {
            Gate::H(q) => format!("h q[{}];", q - 1),
            Gate::X(q) => format!("x q[{}];", q - 1),
            Gate::Z(q) => format!("z q[{}];", q - 1),
            Gate::S(q) => format!("s q[{}];", q - 1),
            Gate::Sdg(q) => format!("sdg q[{}];", q - 1),
            Gate::Ry(q, a) => format!("ry({}) q[{}];", fmt_angle(*a), q - 1),
            Gate::Rz(q, a) => format!("rz({}) q[{}];", fmt_angle(*a), q - 1),
            Gate::Cnot { control, target } => format!("cx q[{}],q[{}];", control - 1, target - 1),
            Gate::Mcry { .. } => unreachable!("expanded above"),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn fmt_angle<T: Real>(a: T) -> String {
    format!("{:.16e}", a.to_f64().unwrap_or(f64::NAN))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codebook::encode;
    use crate::decoder::observable_explicit;
    use crate::pauli::PauliLetter::{X as LX, Y as LY};
    use crate::scalar::DEFAULT_DENSE_LIMIT;

    fn inst(n: usize) -> QracInstance {
        QracInstance::new(n).unwrap()
    }

    #[test]
    fn cascade_for_n3_k1() {
        let steps: Vec<RotationStep<f64>> = diagonalization_rotations(&inst(3), 1).unwrap();
        assert_eq!(steps.len(), 2);
        // First applied: m=2, G = Y2, theta = pi/4.
        assert_eq!(steps[0].m, 2);
        assert_eq!(steps[0].generator, PauliString::single(2, 2, LY));
        assert!((steps[0].angle - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        // Then m=1, G = -Y1 X2, theta = arctan(1/sqrt 2).
        assert_eq!(steps[1].m, 1);
        assert_eq!(
            steps[1].generator,
            PauliString::from_letters(2, &[(1, LY), (2, LX)]).negated()
        );
        assert!((steps[1].angle - (1.0 / 2f64.sqrt()).atan()).abs() < 1e-12);
        assert!((steps[1].angle - 0.61548).abs() < 1e-5);
    }

    #[test]
    fn cascade_for_n2_k1() {
        let steps: Vec<RotationStep<f64>> = diagonalization_rotations(&inst(2), 1).unwrap();
        assert_eq!(steps.len(), 1);
        assert!((steps[0].angle - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let contracted: PauliSum<f64> = contract_observable(&inst(2), 1).unwrap();
        assert!((contracted.coefficient(&PauliString::single(1, 1, crate::pauli::PauliLetter::Z))
            - 1.0)
            .abs()
            < 1e-12);
    }

    #[test]
    fn contraction_reaches_diagonal_word() {
        for n in 2..=10 {
            let i = inst(n);
            for k in 1..=n {
                let contracted: PauliSum<f64> = contract_observable(&i, k).unwrap();
                assert_eq!(contracted.num_terms(), 1, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn k_equals_n_ends_with_unit_coefficient() {
        // For k=n only left steps exist and the last one leaves coefficient 1.
        let n = 5;
        let i = inst(n);
        let steps: Vec<RotationStep<f64>> = diagonalization_rotations(&i, n).unwrap();
        assert!(steps.iter().all(|s| s.stage == Stage::Left));
        assert_eq!(steps.len(), n - 1);
        let dec: WDecomposition<f64> = w_decomposition(&i, n).unwrap();
        let mut current = dec.as_sum();
        for step in &steps {
            current = current.rotate_conjugate(&step.generator, step.angle).unwrap();
        }
        assert!((current.coefficient(&dec.words[n - 1]) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn generators_are_local_two_body() {
        for n in 2..=16 {
            let i = inst(n);
            for k in 1..=n {
                let steps: Vec<RotationStep<f64>> = diagonalization_rotations(&i, k).unwrap();
                for step in &steps {
                    assert!(step.generator.weight() <= 2);
                    let support = step.generator.support();
                    assert!(support.iter().all(|&s| s == step.m || s == step.m + 1));
                }
            }
        }
    }

    #[test]
    fn left_rotations_commute_with_far_words() {
        // Non-interference: left generator G_m commutes with W_j for j > m+1.
        for n in [4usize, 6, 9] {
            let i = inst(n);
            for k in 2..=n {
                let dec: WDecomposition<f64> = w_decomposition(&i, k).unwrap();
                let steps: Vec<RotationStep<f64>> = diagonalization_rotations(&i, k).unwrap();
                for step in steps.iter().filter(|s| s.stage == Stage::Left) {
                    for j in (step.m + 2)..=n {
                        assert!(step
                            .generator
                            .commutes(&dec.words[j - 1])
                            .unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn lowering_counts() {
        // (n, k) = (3, 1): one weight-1 step and one weight-2 step, 2 CNOTs.
        let circuit: Circuit<f64> = decoding_circuit(&inst(3), 1).unwrap();
        assert_eq!(circuit.cnot_count(), 2);

        for n in 2..=8 {
            let i = inst(n);
            for k in 1..=n {
                let c: Circuit<f64> = decoding_circuit(&i, k).unwrap();
                assert!(c.cnot_count() <= 2 * (n - 1), "n={n} k={k}");
                assert!(c.gate_count() <= 9 * (n - 1), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn lowered_circuit_diagonalizes_observable() {
        for n in 2..=5 {
            let i = inst(n);
            for k in 1..=n {
                let circuit: Circuit<f64> = decoding_circuit(&i, k).unwrap();
                let u = circuit_to_unitary(&circuit).unwrap();
                let o = observable_explicit::<f64>(&i, k)
                    .unwrap()
                    .to_dense(DEFAULT_DENSE_LIMIT)
                    .unwrap();
                let e = crate::decoder::diagonal_part(&i, k)
                    .unwrap()
                    .to_dense::<f64>(DEFAULT_DENSE_LIMIT)
                    .unwrap();
                let conjugated = u.matmul(&o).unwrap().matmul(&u.adjoint()).unwrap();
                assert!(conjugated.max_abs_diff(&e).unwrap() < 1e-9, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn rotation_convention_matches_dense_oracle() {
        // R A R^dag with R = exp(-i theta G / 2) = cos(theta/2) I
        // - i sin(theta/2) G (valid since G^2 = I), against the symbolic
        // rotate_conjugate on a generic anticommuting pair.
        let g = PauliString::from_letters(2, &[(1, LY), (2, LX)]).negated();
        let a = PauliSum::from_terms(
            2,
            &[
                (0.6f64, PauliString::single(2, 1, crate::pauli::PauliLetter::Z)),
                (0.8, PauliString::from_letters(2, &[(1, LX), (2, LX)])),
            ],
        );
        let theta = 0.813f64;
        let id = DenseOperator::identity(4);
        let g_dense = g.to_dense::<f64>(DEFAULT_DENSE_LIMIT).unwrap();
        let r = id
            .scaled(Complex::new((theta / 2.0).cos(), 0.0))
            .add(&g_dense.scaled(Complex::new(0.0, -(theta / 2.0).sin())))
            .unwrap();
        let lhs = r
            .matmul(&a.to_dense(DEFAULT_DENSE_LIMIT).unwrap())
            .unwrap()
            .matmul(&r.adjoint())
            .unwrap();
        let rhs = a
            .rotate_conjugate(&g, theta)
            .unwrap()
            .to_dense(DEFAULT_DENSE_LIMIT)
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs).unwrap() < 1e-12);
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c: Circuit<f64> = Circuit {
            num_qubits: 2,
            gates: vec![],
            metadata: String::new(),
        };
        let u = circuit_to_unitary(&c).unwrap();
        assert!(u.max_abs_diff(&DenseOperator::identity(4)).unwrap() < 1e-15);
    }

    #[test]
    fn encoding_ladder_angles_for_n3() {
        let (circuit, sign): (Circuit<f64>, i8) =
            encoding_circuit(&Bits::parse("001").unwrap(), &inst(3)).unwrap();
        assert_eq!(sign, 1);
        match &circuit.gates[0] {
            Gate::Mcry { angle, .. } => assert!((angle - 1.2309594173407747).abs() < 1e-12),
            g => panic!("unexpected {g:?}"),
        }
        match &circuit.gates[1] {
            Gate::Mcry { angle, .. } => {
                assert!((angle - std::f64::consts::FRAC_PI_2).abs() < 1e-12)
            }
            g => panic!("unexpected {g:?}"),
        }
        // y_ref: no displacement gates beyond the ladder.
        assert_eq!(circuit.gates.len(), 2);
        let out = run_circuit(&circuit);
        let expected = crate::codebook::reference_state::<f64>(3).unwrap();
        assert!(out.max_abs_diff(&expected).unwrap() < 1e-12);
    }

    #[test]
    fn encoding_circuit_matches_direct_encode() {
        for n in 2..=6 {
            let i = inst(n);
            for y in Bits::all(n) {
                let (circuit, sign): (Circuit<f64>, i8) = encoding_circuit(&y, &i).unwrap();
                let out = run_circuit(&circuit);
                let direct = encode::<f64>(&y).unwrap();
                let signed = out.scaled(Complex::new(sign as f64, 0.0));
                assert!(signed.max_abs_diff(&direct).unwrap() < 1e-10, "n={n} y={y}");
            }
        }
    }

    #[test]
    fn encoding_example_with_displacement() {
        // n=3, y=100: ladder + X1 + Z1; output (1/sqrt 3)(|00> - |11> - |10>).
        let (circuit, sign): (Circuit<f64>, i8) =
            encoding_circuit(&Bits::parse("100").unwrap(), &inst(3)).unwrap();
        assert_eq!(sign, 1);
        assert!(circuit.gates.contains(&Gate::X(1)));
        assert!(circuit.gates.contains(&Gate::Z(1)));
        let out = run_circuit(&circuit);
        let s = 1.0 / 3f64.sqrt();
        assert!((out.amplitude(0b00).re - s).abs() < 1e-12);
        assert!((out.amplitude(0b11).re + s).abs() < 1e-12);
        assert!((out.amplitude(0b10).re + s).abs() < 1e-12);
    }

    #[test]
    fn mcry_expansion_equivalence() {
        // 0, 1 and 2 controls all reproduce the unexpanded unitary.
        for controls in [vec![], vec![1], vec![1, 2]] {
            let num_qubits = 3;
            let base: Circuit<f64> = Circuit {
                num_qubits,
                gates: vec![Gate::Mcry {
                    controls: controls.clone(),
                    target: 3,
                    angle: 0.7391,
                }],
                metadata: String::new(),
            };
            let expanded = expand_mcry(&base);
            if controls.is_empty() {
                assert_eq!(expanded.gates, vec![Gate::Ry(3, 0.7391)]);
            }
            let u0 = circuit_to_unitary(&base).unwrap();
            let u1 = circuit_to_unitary(&expanded).unwrap();
            assert!(u0.max_abs_diff(&u1).unwrap() < 1e-10);
        }
    }

    #[test]
    fn renderings_are_deterministic() {
        let circuit: Circuit<f64> = decoding_circuit(&inst(3), 1).unwrap();
        let a = render_native(&circuit);
        let b = render_native(&circuit);
        assert_eq!(a, b);
        assert!(a.starts_with("# qrac circuit n=3 k=1\n"));
        let q = render_qasm(&circuit);
        assert!(q.contains("OPENQASM 2.0;"));
        assert!(q.contains("cx q[0],q[1];"));
        assert_eq!(q.matches("cx ").count(), 2);
    }
}
