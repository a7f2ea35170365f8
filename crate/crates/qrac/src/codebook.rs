//! The A_n sign structure and the 2^n encoding states.
//!
//! States are built two ways: directly from the sign rule, and via the
//! reference-state displacement. Both must agree exactly, including the
//! global sign.

use serde::Serialize;

use crate::dense::StateVector;
use crate::error::{QracError, Result};
use crate::pauli::{PauliLetter, PauliString, PauliSum};
use crate::scalar::{from_usize, real, Real, DEFAULT_DENSE_LIMIT};

/// Classical bitstring. Index 1 is the leftmost character and the most
/// significant basis bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bits {
    len: usize,
    value: u64,
}

impl Bits {
    pub fn new(len: usize, value: u64) -> Self {
        assert!(len >= 1 && len <= 63);
        assert!(value < (1u64 << len));
        Bits { len, value }
    }

    pub fn parse(s: &str) -> Result<Self> {
        let len = s.len();
        if len == 0 || len > 63 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(QracError::BadBitstring(len, len.max(1)));
        }
        let value = u64::from_str_radix(s, 2).map_err(|_| QracError::BadBitstring(len, len))?;
        Ok(Bits { len, value })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    /// Bit at 1-based position `i` (leftmost = 1).
    pub fn bit(&self, i: usize) -> u8 {
        assert!(i >= 1 && i <= self.len);
        ((self.value >> (self.len - i)) & 1) as u8
    }

    pub fn flipped(&self, i: usize) -> Bits {
        assert!(i >= 1 && i <= self.len);
        Bits {
            len: self.len,
            value: self.value ^ (1 << (self.len - i)),
        }
    }

    pub fn xor(&self, other: &Bits) -> Bits {
        assert_eq!(self.len, other.len);
        Bits {
            len: self.len,
            value: self.value ^ other.value,
        }
    }

    pub fn parity(&self) -> u8 {
        (self.value.count_ones() % 2) as u8
    }

    pub fn hamming(&self, other: &Bits) -> u32 {
        assert_eq!(self.len, other.len);
        (self.value ^ other.value).count_ones()
    }

    /// Dot product mod 2.
    pub fn dot(&self, other: &Bits) -> u8 {
        assert_eq!(self.len, other.len);
        ((self.value & other.value).count_ones() % 2) as u8
    }

    /// First `k` bits as a basis index (bit 1 most significant).
    pub fn prefix_index(&self, k: usize) -> usize {
        assert!(k <= self.len);
        (self.value >> (self.len - k)) as usize
    }

    /// Truncation to the first `k` bits.
    pub fn prefix(&self, k: usize) -> Bits {
        Bits::new(k, self.value >> (self.len - k))
    }

    pub fn all(len: usize) -> impl Iterator<Item = Bits> {
        (0..(1u64 << len)).map(move |v| Bits { len, value: v })
    }
}

impl std::fmt::Display for Bits {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for i in 1..=self.len {
            write!(f, "{}", self.bit(i))?;
        }
        Ok(())
    }
}

/// Parameters of one (n, n-1) code instance.
#[derive(Debug, Clone, Copy)]
pub struct QracInstance {
    n: usize,
    dense_limit: usize,
}

impl QracInstance {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(QracError::BadInstance(n));
        }
        Ok(QracInstance {
            n,
            dense_limit: DEFAULT_DENSE_LIMIT,
        })
    }

    pub fn with_dense_limit(mut self, limit: usize) -> Self {
        self.dense_limit = limit;
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Qubit count m = n - 1.
    pub fn m(&self) -> usize {
        self.n - 1
    }

    /// Hilbert-space dimension 2^{n-1}.
    pub fn dim(&self) -> usize {
        1 << (self.n - 1)
    }

    pub fn dense_limit(&self) -> usize {
        self.dense_limit
    }

    pub fn check_index(&self, k: usize) -> Result<()> {
        if k < 1 || k > self.n {
            return Err(QracError::BadIndex { k, n: self.n });
        }
        Ok(())
    }

    pub fn check_dense(&self) -> Result<()> {
        if self.m() > self.dense_limit {
            return Err(QracError::DenseLimit {
                sites: self.m(),
                limit: self.dense_limit,
            });
        }
        Ok(())
    }
}

/// Matrix element of A_n between basis bitstrings: 0 unless the Hamming
/// distance is exactly 1, otherwise the product of (-1)^{x_s} over positions
/// before the flipped bit.
pub fn a_entry(y: &Bits, x: &Bits) -> Result<i64> {
    if y.len() != x.len() {
        return Err(QracError::BadBitstring(x.len(), y.len()));
    }
    if y.hamming(x) != 1 {
        return Ok(0);
    }
    let diff = y.value() ^ x.value();
    let l = y.len() - diff.trailing_zeros() as usize; // 1-based flipped position
    let mut sign = 1i64;
    for s in 1..l {
        if x.bit(s) == 1 {
            sign = -sign;
        }
    }
    Ok(sign)
}

/// A_n as a Pauli sum: the n words Z_1 ... Z_{l-1} X_l on n sites.
pub fn a_pauli<T: Real>(n: usize) -> PauliSum<T> {
    assert!(n >= 1);
    let mut sum = PauliSum::zero(n);
    for l in 1..=n {
        sum.add_term(T::one(), &ladder_word(n, l, 1));
    }
    sum
}

/// The n ladder words of A_n in order: Z_1 ... Z_{l-1} X_l for l = 1..n.
pub fn ladder_terms(n: usize) -> Vec<PauliString> {
    (1..=n).map(|l| ladder_word(n, l, 1)).collect()
}

/// The word Z_1 ... Z_{l-1} X_l with a sign, on `n` sites.
pub(crate) fn ladder_word(n: usize, l: usize, sign: i8) -> PauliString {
    let mut letters: Vec<(usize, PauliLetter)> = (1..l).map(|s| (s, PauliLetter::Z)).collect();
    letters.push((l, PauliLetter::X));
    PauliString::from_letters(n, &letters).with_sign(sign)
}

/// Encoding map: even parity goes to a computational basis state, odd parity
/// to the signed uniform superposition of its even neighbors.
pub fn encode<T: Real>(x: &Bits) -> Result<StateVector<T>> {
    let n = x.len();
    if n < 2 {
        return Err(QracError::BadInstance(n));
    }
    let dim = 1usize << (n - 1);
    if x.parity() == 0 {
        return Ok(StateVector::basis_state(dim, x.prefix_index(n - 1)));
    }
    let mut amplitudes = vec![num_complex::Complex::new(T::zero(), T::zero()); dim];
    let scale: T = T::one() / from_usize::<T>(n).sqrt();
    for l in 1..=n {
        let neighbor = x.flipped(l);
        let sign = a_entry(x, &neighbor)?;
        let coeff = if sign >= 0 { scale } else { -scale };
        amplitudes[neighbor.prefix_index(n - 1)] = num_complex::Complex::new(coeff, T::zero());
    }
    Ok(StateVector::from_amplitudes(amplitudes))
}

/// The fixed reference input (0, ..., 0, 1).
pub fn reference_input(n: usize) -> Bits {
    Bits::new(n, 1)
}

/// Reference state: uniform superposition of the all-zero and all weight-1
/// basis states; equals `encode` of the reference input.
pub fn reference_state<T: Real>(n: usize) -> Result<StateVector<T>> {
    if n < 2 {
        return Err(QracError::BadInstance(n));
    }
    encode(&reference_input(n))
}

/// Displacement data carrying an odd-parity input to the reference state.
#[derive(Debug, Clone, Copy)]
pub struct DisplacementData {
    pub u: Bits,
    pub v: Bits,
    pub v_prime: Bits,
    pub global_sign: i8,
}

/// Computes (u, v, v', sign) for an odd-parity input.
pub fn displacement(y: &Bits) -> Result<DisplacementData> {
    if y.parity() != 1 {
        return Err(QracError::EvenParity);
    }
    let n = y.len();
    let u = y.xor(&reference_input(n));
    // v_l = sum_{j < l} u_j mod 2.
    let mut v_value = 0u64;
    let mut acc = 0u8;
    for l in 1..=n {
        if acc == 1 {
            v_value |= 1 << (n - l);
        }
        acc ^= u.bit(l);
    }
    let v = Bits::new(n, v_value);
    let v_n = v.bit(n);
    let mut vp_value = 0u64;
    for i in 1..n {
        if v.bit(i) ^ v_n == 1 {
            vp_value |= 1 << (n - 1 - i);
        }
    }
    let v_prime = Bits::new(n - 1, vp_value);
    let global_sign = if v.dot(y) == 1 { -1 } else { 1 };
    Ok(DisplacementData {
        u,
        v,
        v_prime,
        global_sign,
    })
}

/// Applies `sign * Z(v') X(u)` (u truncated to the first n-1 sites) to a
/// state of dimension 2^{n-1}.
pub fn apply_displacement<T: Real>(
    data: &DisplacementData,
    psi: &StateVector<T>,
) -> Result<StateVector<T>> {
    let n = data.u.len();
    let dim = 1usize << (n - 1);
    if psi.dim() != dim {
        return Err(QracError::DimMismatch(psi.dim(), dim));
    }
    let x_mask = data.u.prefix_index(n - 1);
    let z_mask = data.v_prime.value() as usize;
    let mut amplitudes = vec![num_complex::Complex::new(T::zero(), T::zero()); dim];
    for idx in 0..dim {
        // X(u) first, then Z(v') phases on the flipped index.
        let target = idx ^ x_mask;
        let mut amp = psi.amplitude(idx);
        if ((target & z_mask).count_ones() % 2) == 1 {
            amp = -amp;
        }
        if data.global_sign < 0 {
            amp = -amp;
        }
        amplitudes[target] = amp;
    }
    Ok(StateVector::from_amplitudes(amplitudes))
}

/// Encoding via displacement of the reference state; must agree with
/// [`encode`] exactly.
pub fn encode_via_displacement<T: Real>(y: &Bits) -> Result<StateVector<T>> {
    let data = displacement(y)?;
    apply_displacement(&data, &reference_state(y.len())?)
}

/// The displacement as an n-site Pauli word (phase irrelevant for
/// conjugation): X part u, Z part v.
pub fn displacement_word(data: &DisplacementData) -> PauliString {
    let n = data.u.len();
    let mut x_mask = 0u64;
    let mut z_mask = 0u64;
    for i in 1..=n {
        if data.u.bit(i) == 1 {
            x_mask |= 1 << (i - 1);
        }
        if data.v.bit(i) == 1 {
            z_mask |= 1 << (i - 1);
        }
    }
    PauliString::from_masks(n, x_mask, z_mask, 1)
}

/// Checks D(u, v) A_n D(u, v)^dagger = A_n symbolically.
pub fn displacement_covariance_holds<T: Real>(y: &Bits) -> Result<bool> {
    let n = y.len();
    let data = displacement(y)?;
    let a: PauliSum<T> = a_pauli(n);
    let conjugated = a.conjugate_by_pauli(&displacement_word(&data))?;
    Ok(conjugated.approx_eq(&a, real(1e-15)))
}

/// One codebook entry in the JSON export.
#[derive(Debug, Serialize)]
pub struct CodebookAmplitude {
    pub index: usize,
    pub amplitude: String,
    pub value: f64,
}

#[derive(Debug, Serialize)]
pub struct CodebookEntry {
    pub input: String,
    pub amplitudes: Vec<CodebookAmplitude>,
}

#[derive(Debug, Serialize)]
pub struct Codebook {
    pub n: usize,
    pub qubits: usize,
    pub entries: Vec<CodebookEntry>,
}

/// Full codebook with amplitudes rendered as exact rationals over sqrt(n)
/// where representable, else decimals at 17 significant digits.
pub fn codebook(n: usize) -> Result<Codebook> {
    let inst = QracInstance::new(n)?;
    let mut entries = Vec::new();
    for x in Bits::all(n) {
        let psi: StateVector<f64> = encode(&x)?;
        let mut amplitudes = Vec::new();
        for idx in 0..psi.dim() {
            let a = psi.amplitude(idx);
            if a.norm() < 1e-15 {
                continue;
            }
            amplitudes.push(CodebookAmplitude {
                index: idx,
                amplitude: render_amplitude(a.re, n),
                value: a.re,
            });
        }
        entries.push(CodebookEntry {
            input: x.to_string(),
            amplitudes,
        });
    }
    Ok(Codebook {
        n,
        qubits: inst.m(),
        entries,
    })
}

fn render_amplitude(value: f64, n: usize) -> String {
    let rounded = value.round();
    if (value - rounded).abs() < 1e-12 {
        return format!("{}", rounded as i64);
    }
    let scaled = value * (n as f64).sqrt();
    let k = scaled.round();
    if (scaled - k).abs() < 1e-9 {
        return format!("{}/sqrt({})", k as i64, n);
    }
    format!("{:.16e}", value)
}
