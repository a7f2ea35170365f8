//! Dense complex linear algebra: the independent brute-force backend.
//!
//! Everything the symbolic layer claims is checked here against explicit
//! matrices: Hermitian eigendecomposition (cyclic Jacobi), operator norms
//! and expectation values. Tensor order convention: site 1 is the most
//! significant bit of the basis index.

use num_complex::Complex;

use crate::error::{QracError, Result};
use crate::pauli::{PauliString, PauliSum};
use crate::scalar::{from_usize, real, Real, ALGEBRA_TOL, JACOBI_OFF_TOL};

/// Hard cap on the dense dimension (`512 = 2^9`).
pub const MAX_DENSE_DIM: usize = 512;

const MAX_JACOBI_SWEEPS: usize = 100;

/// Normalized complex amplitude vector of dimension `2^m`.
#[derive(Debug, Clone)]
pub struct StateVector<T: Real> {
    amplitudes: Vec<Complex<T>>,
}

impl<T: Real> StateVector<T> {
    pub fn from_amplitudes(amplitudes: Vec<Complex<T>>) -> Self {
        assert!(amplitudes.len().is_power_of_two());
        StateVector { amplitudes }
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        assert!(dim.is_power_of_two() && index < dim);
        let mut amplitudes = vec![Complex::new(T::zero(), T::zero()); dim];
        amplitudes[index] = Complex::new(T::one(), T::zero());
        StateVector { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex<T>] {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex<T> {
        self.amplitudes[index]
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<Complex<T>> {
        if self.dim() != other.dim() {
            return Err(QracError::DimMismatch(self.dim(), other.dim()));
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for (a, b) in self.amplitudes.iter().zip(&other.amplitudes) {
            acc = acc + a.conj() * b;
        }
        Ok(acc)
    }

    pub fn norm(&self) -> T {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    }

    pub fn normalized(&self) -> StateVector<T> {
        let n = self.norm();
        let inv = T::one() / n;
        StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .map(|a| a * Complex::new(inv, T::zero()))
                .collect(),
        }
    }

    pub fn scaled(&self, factor: Complex<T>) -> StateVector<T> {
        StateVector {
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn add(&self, other: &StateVector<T>) -> Result<StateVector<T>> {
        if self.dim() != other.dim() {
            return Err(QracError::DimMismatch(self.dim(), other.dim()));
        }
        Ok(StateVector {
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }

    /// Fidelity-style overlap magnitude `|<self|other>|`.
    pub fn overlap(&self, other: &StateVector<T>) -> Result<T> {
        Ok(self.inner(other)?.norm())
    }

    /// Maximum elementwise amplitude difference.
    pub fn max_abs_diff(&self, other: &StateVector<T>) -> Result<T> {
        if self.dim() != other.dim() {
            return Err(QracError::DimMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }
}

/// Dense complex square matrix, row-major.
#[derive(Debug, Clone)]
pub struct DenseOperator<T: Real> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> DenseOperator<T> {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim.is_power_of_two());
        DenseOperator {
            dim,
            entries: vec![Complex::new(T::zero(), T::zero()); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex::new(T::one(), T::zero());
        }
        m
    }

    pub fn from_fn(dim: usize, f: impl Fn(usize, usize) -> Complex<T>) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn check_dim(&self) -> Result<()> {
        if self.dim > MAX_DENSE_DIM {
            return Err(QracError::DenseLimit {
                sites: self.dim.trailing_zeros() as usize,
                limit: MAX_DENSE_DIM.trailing_zeros() as usize,
            });
        }
        Ok(())
    }

    pub fn matmul(&self, other: &DenseOperator<T>) -> Result<DenseOperator<T>> {
        if self.dim != other.dim {
            return Err(QracError::DimMismatch(self.dim, other.dim));
        }
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik.norm_sqr() == T::zero() {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] = out[(i, j)] + aik * other[(k, j)];
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, other: &DenseOperator<T>) -> Result<DenseOperator<T>> {
        if self.dim != other.dim {
            return Err(QracError::DimMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = *a + b;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DenseOperator<T>) -> Result<DenseOperator<T>> {
        if self.dim != other.dim {
            return Err(QracError::DimMismatch(self.dim, other.dim));
        }
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(&other.entries) {
            *a = *a - b;
        }
        Ok(out)
    }

    pub fn scaled(&self, factor: Complex<T>) -> DenseOperator<T> {
        let mut out = self.clone();
        for a in out.entries.iter_mut() {
            *a = *a * factor;
        }
        out
    }

    pub fn scaled_real(&self, factor: T) -> DenseOperator<T> {
        self.scaled(Complex::new(factor, T::zero()))
    }

    pub fn adjoint(&self) -> DenseOperator<T> {
        let n = self.dim;
        Self::from_fn(n, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> Complex<T> {
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..self.dim {
            acc = acc + self[(i, i)];
        }
        acc
    }

    pub fn apply(&self, psi: &StateVector<T>) -> Result<StateVector<T>> {
        if self.dim != psi.dim() {
            return Err(QracError::DimMismatch(self.dim, psi.dim()));
        }
        let n = self.dim;
        let mut out = vec![Complex::new(T::zero(), T::zero()); n];
        for i in 0..n {
            let mut acc = Complex::new(T::zero(), T::zero());
            for j in 0..n {
                acc = acc + self[(i, j)] * psi.amplitude(j);
            }
            out[i] = acc;
        }
        Ok(StateVector::from_amplitudes(out))
    }

    /// Adds `factor * |psi><psi|` in place.
    pub fn accumulate_outer(&mut self, psi: &StateVector<T>, factor: T) {
        assert_eq!(self.dim, psi.dim());
        let f = Complex::new(factor, T::zero());
        for i in 0..self.dim {
            let ai = psi.amplitude(i) * f;
            for j in 0..self.dim {
                self[(i, j)] = self[(i, j)] + ai * psi.amplitude(j).conj();
            }
        }
    }

    pub fn max_abs_diff(&self, other: &DenseOperator<T>) -> Result<T> {
        if self.dim != other.dim {
            return Err(QracError::DimMismatch(self.dim, other.dim));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(T::zero(), T::max))
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .map(|a| a.norm())
            .fold(T::zero(), T::max)
    }

    pub fn frobenius_norm(&self) -> T {
        self.entries
            .iter()
            .map(|a| a.norm_sqr())
            .fold(T::zero(), |acc, x| acc + x)
            .sqrt()
    }

    /// Max deviation from `A = A^dagger`.
    pub fn hermiticity_defect(&self) -> T {
        let mut worst = T::zero();
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian_within(&self, tol: T) -> bool {
        self.hermiticity_defect() <= tol
    }
}

impl<T: Real> std::ops::Index<(usize, usize)> for DenseOperator<T> {
    type Output = Complex<T>;
    fn index(&self, (i, j): (usize, usize)) -> &Complex<T> {
        &self.entries[i * self.dim + j]
    }
}

impl<T: Real> std::ops::IndexMut<(usize, usize)> for DenseOperator<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex<T> {
        let dim = self.dim;
        &mut self.entries[i * dim + j]
    }
}

/// Result of a Hermitian eigendecomposition: ascending eigenvalues and the
/// matching orthonormal eigenvector columns.
pub struct EigenDecomposition<T: Real> {
    pub eigenvalues: Vec<T>,
    pub eigenvectors: DenseOperator<T>,
}

/// Cyclic Jacobi eigendecomposition of a Hermitian matrix.
///
/// Sweeps 2x2 unitary rotations until the off-diagonal Frobenius mass drops
/// below the fixed target; errors on non-Hermitian input or missed
/// convergence.
pub fn hermitian_eigen<T: Real>(h: &DenseOperator<T>) -> Result<EigenDecomposition<T>> {
    h.check_dim()?;
    let defect = h.hermiticity_defect();
    if defect > real(ALGEBRA_TOL) {
        return Err(QracError::NotHermitian(defect.to_f64().unwrap_or(f64::NAN)));
    }

    let n = h.dim();
    let mut a = h.clone();
    let mut v = DenseOperator::identity(n);

    let fro_sq = {
        let f = a.frobenius_norm();
        f * f
    };
    // Fixed absolute target plus a floating-point floor so the loop
    // terminates for scalars whose epsilon cannot reach the target.
    let eps = T::epsilon();
    let floor = fro_sq * eps * eps * from_usize::<T>(n);
    let target = real::<T>(JACOBI_OFF_TOL) * T::max(T::one(), fro_sq);
    let threshold = T::max(target, floor);

    let mut converged = false;
    for _sweep in 0..MAX_JACOBI_SWEEPS {
        let mut off_sq = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += a[(p, q)].norm_sqr();
            }
        }
        off_sq = off_sq + off_sq;
        if off_sq <= threshold {
            converged = true;
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, p, q);
            }
        }
    }
    if !converged {
        // One final check after the last sweep.
        let mut off_sq = T::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                off_sq += a[(p, q)].norm_sqr();
            }
        }
        if off_sq + off_sq > threshold {
            return Err(QracError::NoConvergence(MAX_JACOBI_SWEEPS));
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].partial_cmp(&diag[j]).unwrap());

    let eigenvalues: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let eigenvectors = DenseOperator::from_fn(n, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// One two-sided Jacobi rotation zeroing `a[(p, q)]`, accumulated into `v`.
fn jacobi_rotate<T: Real>(a: &mut DenseOperator<T>, v: &mut DenseOperator<T>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == T::zero() {
        return;
    }
    let phase = apq / Complex::new(r, T::zero());
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;

    let tau = (aqq - app) / (r + r);
    let t = {
        let s = if tau >= T::zero() { T::one() } else { -T::one() };
        s / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;

    // Combined unitary on the (p, q) plane:
    //   J_pp = c, J_pq = s, J_qp = -s * conj(phase), J_qq = c * conj(phase).
    let cc = Complex::new(c, T::zero());
    let ss = Complex::new(s, T::zero());
    let jqp = -ss * phase.conj();
    let jqq = cc * phase.conj();

    let n = a.dim();
    // Columns: A <- A J.
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * cc + aiq * jqp;
        a[(i, q)] = aip * ss + aiq * jqq;
    }
    // Rows: A <- J^dagger A.
    for j in 0..n {
        let apj = a[(p, j)];
        let aqj = a[(q, j)];
        a[(p, j)] = apj * cc + aqj * jqp.conj();
        a[(q, j)] = apj * ss.conj() + aqj * jqq.conj();
    }
    a[(p, q)] = Complex::new(T::zero(), T::zero());
    a[(q, p)] = Complex::new(T::zero(), T::zero());
    a[(p, p)] = Complex::new(a[(p, p)].re, T::zero());
    a[(q, q)] = Complex::new(a[(q, q)].re, T::zero());

    // Eigenvectors: V <- V J.
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * cc + viq * jqp;
        v[(i, q)] = vip * ss + viq * jqq;
    }
}

/// Largest singular value. For Hermitian input this equals max |eigenvalue|.
pub fn operator_norm<T: Real>(a: &DenseOperator<T>) -> Result<T> {
    a.check_dim()?;
    if a.is_hermitian_within(real(ALGEBRA_TOL)) {
        let eig = hermitian_eigen(a)?;
        return Ok(eig
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .fold(T::zero(), T::max));
    }
    let gram = a.adjoint().matmul(a)?;
    let eig = hermitian_eigen(&gram)?;
    let top = eig
        .eigenvalues
        .last()
        .copied()
        .unwrap_or_else(T::zero)
        .max(T::zero());
    Ok(top.sqrt())
}

/// Real part of `<psi|A|psi>`; errors if the imaginary part is non-negligible.
pub fn expectation<T: Real>(a: &DenseOperator<T>, psi: &StateVector<T>) -> Result<T> {
    let value = psi.inner(&a.apply(psi)?)?;
    if value.im.abs() > real(ALGEBRA_TOL) {
        return Err(QracError::ComplexExpectation(
            value.im.abs().to_f64().unwrap_or(f64::NAN),
        ));
    }
    Ok(value.re)
}

impl PauliString {
    /// Dense matrix of the word; site 1 is the most significant basis bit.
    pub fn to_dense<T: Real>(&self, dense_limit: usize) -> Result<DenseOperator<T>> {
        if self.num_sites() > dense_limit {
            return Err(QracError::DenseLimit {
                sites: self.num_sites(),
                limit: dense_limit,
            });
        }
        let m = self.num_sites();
        let dim = 1usize << m;
        // Mask bit (i-1) holds site i; basis bit (m-i) holds site i.
        let bx = reverse_mask(self.x_mask(), m);
        let bz = reverse_mask(self.z_mask(), m);
        let y_count = (self.x_mask() & self.z_mask()).count_ones();
        let mut base_phase = y_count % 4;
        if self.sign() < 0 {
            base_phase = (base_phase + 2) % 4;
        }
        let mut out = DenseOperator::zeros(dim);
        for col in 0..dim {
            // op|col> = sign * i^{#Y} * (-1)^{|z & col|} |col ^ x>.
            let mut phase = base_phase;
            if (bz & col as u64).count_ones() % 2 == 1 {
                phase = (phase + 2) % 4;
            }
            let row = col ^ bx as usize;
            out[(row, col)] = phase_to_complex(phase);
        }
        Ok(out)
    }
}

impl<T: Real> PauliSum<T> {
    /// Dense Hermitian matrix of the sum.
    pub fn to_dense(&self, dense_limit: usize) -> Result<DenseOperator<T>> {
        if self.num_sites() > dense_limit {
            return Err(QracError::DenseLimit {
                sites: self.num_sites(),
                limit: dense_limit,
            });
        }
        let dim = 1usize << self.num_sites();
        let mut out = DenseOperator::zeros(dim);
        for (coeff, word) in self.terms() {
            let m = word.to_dense::<T>(dense_limit)?;
            out = out.add(&m.scaled_real(coeff))?;
        }
        Ok(out)
    }
}

fn reverse_mask(mask: u64, num_sites: usize) -> u64 {
    let mut out = 0u64;
    for i in 0..num_sites {
        if mask & (1 << i) != 0 {
            out |= 1 << (num_sites - 1 - i);
        }
    }
    out
}

fn phase_to_complex<T: Real>(phase: u32) -> Complex<T> {
    match phase % 4 {
        0 => Complex::new(T::one(), T::zero()),
        1 => Complex::new(T::zero(), T::one()),
        2 => Complex::new(-T::one(), T::zero()),
        _ => Complex::new(T::zero(), -T::one()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliLetter::{X, Y, Z};
    use crate::scalar::DEFAULT_DENSE_LIMIT;

    fn w(n: usize, letters: &[(usize, crate::pauli::PauliLetter)]) -> PauliString {
        PauliString::from_letters(n, letters)
    }

    #[test]
    fn single_site_matrices() {
        let z: DenseOperator<f64> = w(1, &[(1, Z)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(z[(0, 0)].re, 1.0);
        assert_eq!(z[(1, 1)].re, -1.0);
        assert_eq!(z[(0, 1)].norm(), 0.0);

        let x: DenseOperator<f64> = w(1, &[(1, X)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(x[(0, 1)].re, 1.0);
        assert_eq!(x[(1, 0)].re, 1.0);

        let y: DenseOperator<f64> = w(1, &[(1, Y)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(y[(0, 1)].im, -1.0);
        assert_eq!(y[(1, 0)].im, 1.0);
    }

    #[test]
    fn site_one_is_most_significant() {
        // Z1 on 2 sites = diag(1, 1, -1, -1).
        let z1: DenseOperator<f64> = w(2, &[(1, Z)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        assert_eq!(z1[(0, 0)].re, 1.0);
        assert_eq!(z1[(1, 1)].re, 1.0);
        assert_eq!(z1[(2, 2)].re, -1.0);
        assert_eq!(z1[(3, 3)].re, -1.0);
    }

    #[test]
    fn dense_multiply_matches_symbolic() {
        for xa in 0..4u64 {
            for za in 0..4u64 {
                for xb in 0..4u64 {
                    for zb in 0..4u64 {
                        let a = PauliString::from_masks(2, xa, za, 1);
                        let b = PauliString::from_masks(2, xb, zb, 1);
                        let (phase, word) = a.multiply(&b).unwrap();
                        let da: DenseOperator<f64> = a.to_dense(DEFAULT_DENSE_LIMIT).unwrap();
                        let db = b.to_dense(DEFAULT_DENSE_LIMIT).unwrap();
                        let product = da.matmul(&db).unwrap();
                        let expected = word
                            .to_dense::<f64>(DEFAULT_DENSE_LIMIT)
                            .unwrap()
                            .scaled(phase_to_complex(phase as u32));
                        assert!(product.max_abs_diff(&expected).unwrap() < 1e-14);
                    }
                }
            }
        }
    }

    #[test]
    fn eigen_of_diag() {
        let h: DenseOperator<f64> = w(1, &[(1, Z)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_of_unit_pauli_combination() {
        // (X + Z)/sqrt(2) has eigenvalues -1, 1.
        let inv = std::f64::consts::FRAC_1_SQRT_2;
        let sum = PauliSum::from_terms(1, &[(inv, w(1, &[(1, X)])), (inv, w(1, &[(1, Z)]))]);
        let h = sum.to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        let eig = hermitian_eigen(&h).unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-12);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn eigen_reconstruction_and_residual() {
        // Pseudo-random Hermitian matrix, fixed seed.
        let n = 16;
        let mut seed = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut h: DenseOperator<f64> = DenseOperator::zeros(n);
        for i in 0..n {
            for j in i..n {
                let re = next();
                let im = if i == j { 0.0 } else { next() };
                h[(i, j)] = Complex::new(re, im);
                h[(j, i)] = Complex::new(re, -im);
            }
        }
        let eig = hermitian_eigen(&h).unwrap();

        // H v = lambda v for every pair.
        for j in 0..n {
            let v = StateVector::from_amplitudes((0..n).map(|i| eig.eigenvectors[(i, j)]).collect());
            let hv = h.apply(&v).unwrap();
            let lv = v.scaled(Complex::new(eig.eigenvalues[j], 0.0));
            assert!(hv.max_abs_diff(&lv).unwrap() < 1e-9);
        }

        // Orthonormality.
        let gram = eig.eigenvectors.adjoint().matmul(&eig.eigenvectors).unwrap();
        assert!(gram.max_abs_diff(&DenseOperator::identity(n)).unwrap() < 1e-10);

        // Reconstruction.
        let mut recon = DenseOperator::zeros(n);
        for j in 0..n {
            let v = StateVector::from_amplitudes((0..n).map(|i| eig.eigenvectors[(i, j)]).collect());
            recon.accumulate_outer(&v, eig.eigenvalues[j]);
        }
        assert!(recon.max_abs_diff(&h).unwrap() < 1e-9);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m: DenseOperator<f64> = DenseOperator::zeros(2);
        m[(0, 1)] = Complex::new(1.0, 0.0);
        assert!(matches!(
            hermitian_eigen(&m),
            Err(QracError::NotHermitian(_))
        ));
    }

    #[test]
    fn operator_norm_basics() {
        let id: DenseOperator<f64> = DenseOperator::identity(8);
        assert!((operator_norm(&id).unwrap() - 1.0).abs() < 1e-12);
        let zero: DenseOperator<f64> = DenseOperator::zeros(4);
        assert!(operator_norm(&zero).unwrap().abs() < 1e-12);
    }

    #[test]
    fn operator_norm_submultiplicative() {
        let mut seed = 42u64;
        let mut next = || {
            seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((seed >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        for _ in 0..5 {
            let n = 8;
            let mut a: DenseOperator<f64> = DenseOperator::zeros(n);
            let mut b: DenseOperator<f64> = DenseOperator::zeros(n);
            for i in 0..n {
                for j in i..n {
                    let (re, im) = (next(), if i == j { 0.0 } else { next() });
                    a[(i, j)] = Complex::new(re, im);
                    a[(j, i)] = Complex::new(re, -im);
                    let (re, im) = (next(), if i == j { 0.0 } else { next() });
                    b[(i, j)] = Complex::new(re, im);
                    b[(j, i)] = Complex::new(re, -im);
                }
            }
            let ab = a.matmul(&b).unwrap();
            let lhs = operator_norm(&ab).unwrap();
            let rhs = operator_norm(&a).unwrap() * operator_norm(&b).unwrap();
            assert!(lhs <= rhs + 1e-9);
        }
    }

    #[test]
    fn expectation_basics() {
        let z: DenseOperator<f64> = w(1, &[(1, Z)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        let zero = StateVector::basis_state(2, 0);
        assert!((expectation(&z, &zero).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn expectation_dim_mismatch() {
        let z: DenseOperator<f64> = w(1, &[(1, Z)]).to_dense(DEFAULT_DENSE_LIMIT).unwrap();
        let psi = StateVector::basis_state(4, 0);
        assert!(expectation(&z, &psi).is_err());
    }
}
