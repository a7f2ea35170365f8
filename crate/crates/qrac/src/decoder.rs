//! Optimal decoding: parity projectors, the projector-sum POVMs, and the
//! explicit Pauli form of the optimal observables, cross-checked against
//! each other.

use serde::Serialize;

use crate::codebook::{encode, ladder_word, Bits, QracInstance};
use crate::dense::{DenseOperator, StateVector};
use crate::error::{QracError, Result};
use crate::pauli::{PauliLetter, PauliString, PauliSum};
use crate::scalar::{from_usize, real, Real, ALGEBRA_TOL, VERIFY_TOL};

/// Hamming-weight parity class of the inputs behind a projector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// The overlap parameter mu = (n-1)/n.
pub fn mu<T: Real>(n: usize) -> T {
    (from_usize::<T>(n) - T::one()) / from_usize::<T>(n)
}

/// epsilon = 1/sqrt(n(n-1)).
pub fn epsilon<T: Real>(n: usize) -> T {
    T::one() / (from_usize::<T>(n) * (from_usize::<T>(n) - T::one())).sqrt()
}

/// Projector onto span{ |psi_x> : parity class, x_k = b }.
pub fn parity_projector<T: Real>(
    inst: &QracInstance,
    k: usize,
    b: u8,
    parity: Parity,
) -> Result<DenseOperator<T>> {
    inst.check_index(k)?;
    inst.check_dense()?;
    let want_parity = match parity {
        Parity::Even => 0,
        Parity::Odd => 1,
    };
    let mut proj = DenseOperator::zeros(inst.dim());
    for x in Bits::all(inst.n()) {
        if x.parity() == want_parity && x.bit(k) == b {
            let psi: StateVector<T> = encode(&x)?;
            proj.accumulate_outer(&psi, T::one());
        }
    }
    Ok(proj)
}

/// S_{k,b} = P^{(E)}_{k,b} + P^{(O)}_{k,b}.
pub fn s_operator<T: Real>(inst: &QracInstance, k: usize, b: u8) -> Result<DenseOperator<T>> {
    let even = parity_projector(inst, k, b, Parity::Even)?;
    let odd = parity_projector(inst, k, b, Parity::Odd)?;
    even.add(&odd)
}

/// Two-outcome POVM for bit `k`: the maximal-eigenvalue projectors of
/// S_{k,0} and S_{k,1}.
#[derive(Debug, Clone)]
pub struct PovmPair<T: Real> {
    pub k: usize,
    pub m0: DenseOperator<T>,
    pub m1: DenseOperator<T>,
}

impl<T: Real> PovmPair<T> {
    pub fn element(&self, b: u8) -> &DenseOperator<T> {
        if b == 0 {
            &self.m0
        } else {
            &self.m1
        }
    }

    /// Completeness, idempotence and Hermiticity checks at the fixed
    /// tolerances.
    pub fn validate(&self) -> Result<()> {
        let id = DenseOperator::identity(self.m0.dim());
        let completeness = self.m0.add(&self.m1)?.max_abs_diff(&id)?;
        if completeness > real(ALGEBRA_TOL) {
            return Err(QracError::SpectralCheck(format!(
                "completeness defect {completeness:?}"
            )));
        }
        for m in [&self.m0, &self.m1] {
            if !m.is_hermitian_within(real(ALGEBRA_TOL)) {
                return Err(QracError::SpectralCheck("non-Hermitian element".into()));
            }
            let idem = m.matmul(m)?.max_abs_diff(m)?;
            if idem > real(VERIFY_TOL) {
                return Err(QracError::SpectralCheck(format!(
                    "idempotence defect {idem:?}"
                )));
            }
        }
        Ok(())
    }
}

/// POVM from the closed-form projector expression
/// `M_b = (S_{k,b} - (1 - sqrt(mu)) I) / (2 sqrt(mu))`.
pub fn povm<T: Real>(inst: &QracInstance, k: usize) -> Result<PovmPair<T>> {
    inst.check_index(k)?;
    inst.check_dense()?;
    let root_mu = mu::<T>(inst.n()).sqrt();
    let id = DenseOperator::identity(inst.dim());
    let mut elements = Vec::with_capacity(2);
    for b in 0..2u8 {
        let s = s_operator::<T>(inst, k, b)?;
        let shifted = s.sub(&id.scaled_real(T::one() - root_mu))?;
        let m = shifted.scaled_real(T::one() / (root_mu + root_mu));
        elements.push(m);
    }
    let pair = PovmPair {
        k,
        m1: elements.pop().unwrap(),
        m0: elements.pop().unwrap(),
    };
    pair.validate()?;
    Ok(pair)
}

/// The diagonal part E_k: `Z_k` for k < n, the all-qubit parity operator for
/// k = n. Defined on the n-1 measurement qubits.
pub fn diagonal_part(inst: &QracInstance, k: usize) -> Result<PauliString> {
    inst.check_index(k)?;
    let m = inst.m();
    if k < inst.n() {
        Ok(PauliString::single(m, k, PauliLetter::Z))
    } else {
        let letters: Vec<(usize, PauliLetter)> = (1..=m).map(|j| (j, PauliLetter::Z)).collect();
        Ok(PauliString::from_letters(m, &letters))
    }
}

/// The explicit Pauli form of the optimal observable,
/// `O_k = sqrt((n-1)/n) E_k + (1/sqrt(n(n-1))) K_k`.
pub fn observable_explicit<T: Real>(inst: &QracInstance, k: usize) -> Result<PauliSum<T>> {
    inst.check_index(k)?;
    let n = inst.n();
    let m = inst.m();
    let c_k = mu::<T>(n).sqrt();
    let eps = epsilon::<T>(n);

    let mut sum = PauliSum::zero(m);
    sum.add_term(c_k, &diagonal_part(inst, k)?);

    if k < n {
        // X_k Z ... Z X_l terms and the X_k Z ... Z_{n-1} boundary term.
        for l in (k + 1)..=n {
            let mut letters = vec![(k, PauliLetter::X)];
            if l < n {
                letters.extend(((k + 1)..l).map(|s| (s, PauliLetter::Z)));
                letters.push((l, PauliLetter::X));
            } else {
                letters.extend(((k + 1)..=m).map(|s| (s, PauliLetter::Z)));
            }
            sum.add_term(eps, &PauliString::from_letters(m, &letters));
        }
        // Y_l Z ... Z Y_k terms.
        for l in 1..k {
            let mut letters = vec![(l, PauliLetter::Y)];
            letters.extend(((l + 1)..k).map(|s| (s, PauliLetter::Z)));
            letters.push((k, PauliLetter::Y));
            sum.add_term(eps, &PauliString::from_letters(m, &letters));
        }
    } else {
        // k = n: the -Z_1 ... Z_{l-1} X_l terms.
        for l in 1..=m {
            sum.add_term(-eps, &ladder_word(m, l, 1));
        }
    }
    Ok(sum)
}

/// Ordered W decomposition of the optimal observable: n mutually
/// anticommuting words with unit squared-coefficient mass.
#[derive(Debug, Clone)]
pub struct WDecomposition<T: Real> {
    pub k: usize,
    pub words: Vec<PauliString>,
    pub coeffs: Vec<T>,
}

impl<T: Real> WDecomposition<T> {
    pub fn as_sum(&self) -> PauliSum<T> {
        let terms: Vec<(T, PauliString)> = self
            .coeffs
            .iter()
            .zip(&self.words)
            .map(|(&c, &w)| (c, w))
            .collect();
        PauliSum::from_terms(self.words[0].num_sites(), &terms)
    }

    pub fn coeff_norm_sq(&self) -> T {
        self.coeffs.iter().map(|c| *c * *c).sum()
    }

    pub fn pairwise_anticommute(&self) -> Result<bool> {
        for i in 0..self.words.len() {
            for j in (i + 1)..self.words.len() {
                if self.words[i].commutes(&self.words[j])? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

/// Region-wise W_j words and coefficients for bit `k`.
pub fn w_decomposition<T: Real>(inst: &QracInstance, k: usize) -> Result<WDecomposition<T>> {
    inst.check_index(k)?;
    let n = inst.n();
    let m = inst.m();
    let c_k = mu::<T>(n).sqrt();
    let eps = epsilon::<T>(n);

    let mut words = Vec::with_capacity(n);
    let mut coeffs = Vec::with_capacity(n);
    if k < n {
        // Region I: Y_j Z ... Z Y_k.
        for j in 1..k {
            let mut letters = vec![(j, PauliLetter::Y)];
            letters.extend(((j + 1)..k).map(|s| (s, PauliLetter::Z)));
            letters.push((k, PauliLetter::Y));
            words.push(PauliString::from_letters(m, &letters));
            coeffs.push(eps);
        }
        // Region II: Z_k.
        words.push(diagonal_part(inst, k)?);
        coeffs.push(c_k);
        // Region III: X_k Z ... Z X_j (j < n) and X_k Z ... Z_{n-1} (j = n).
        for j in (k + 1)..=n {
            let mut letters = vec![(k, PauliLetter::X)];
            if j < n {
                letters.extend(((k + 1)..j).map(|s| (s, PauliLetter::Z)));
                letters.push((j, PauliLetter::X));
            } else {
                letters.extend(((k + 1)..=m).map(|s| (s, PauliLetter::Z)));
            }
            words.push(PauliString::from_letters(m, &letters));
            coeffs.push(eps);
        }
    } else {
        // k = n: -Z_1 ... Z_{j-1} X_j, then the parity word.
        for j in 1..=m {
            words.push(ladder_word(m, j, -1));
            coeffs.push(eps);
        }
        words.push(diagonal_part(inst, k)?);
        coeffs.push(c_k);
    }
    Ok(WDecomposition { k, words, coeffs })
}

/// The observable routed through the POVM: `M_{0|k} - M_{1|k}`. Errors if
/// the result disagrees with the explicit Pauli form beyond tolerance.
pub fn observable_from_povm<T: Real>(inst: &QracInstance, k: usize) -> Result<DenseOperator<T>> {
    let pair = povm::<T>(inst, k)?;
    let observable = pair.m0.sub(&pair.m1)?;
    let explicit = observable_explicit::<T>(inst, k)?.to_dense(inst.dense_limit())?;
    let deviation = observable.max_abs_diff(&explicit)?;
    if deviation > real(VERIFY_TOL) {
        return Err(QracError::ObservableMismatch(
            deviation.to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(observable)
}

/// Serializable view of a W decomposition (word strings plus coefficients).
#[derive(Debug, Serialize)]
pub struct WDecompositionExport {
    pub n: usize,
    pub k: usize,
    pub words: Vec<String>,
    pub coefficients: Vec<f64>,
}

pub fn w_decomposition_export(inst: &QracInstance, k: usize) -> Result<WDecompositionExport> {
    let dec: WDecomposition<f64> = w_decomposition(inst, k)?;
    Ok(WDecompositionExport {
        n: inst.n(),
        k,
        words: dec
            .coeffs
            .iter()
            .zip(&dec.words)
            .map(|(&c, w)| crate::pauli::render_term(c * w.sign() as f64, &w.with_sign(1)))
            .collect(),
        coefficients: dec.coeffs.iter().zip(&dec.words).map(|(&c, w)| c * w.sign() as f64).collect(),
    })
}
