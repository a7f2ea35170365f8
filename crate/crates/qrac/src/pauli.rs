//! Signed Hermitian Pauli words and real-weighted Pauli sums.
//!
//! A word is stored in symplectic form: an X mask, a Z mask and a sign in
//! {+1, -1}. The letter at site `i` is I/X/Z/Y for (x, z) = (0,0)/(1,0)/
//! (0,1)/(1,1), with the `i` phase of Y folded into the sign at
//! construction, so every stored word is Hermitian with a real sign.
//!
//! Sites are 1-based; site 1 is the most significant bit of dense basis
//! indices.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{QracError, Result};
use crate::scalar::{real, Real, PRUNE_TOL};

/// Signed Hermitian Pauli word on `num_sites` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    num_sites: usize,
    x_mask: u64,
    z_mask: u64,
    sign: i8,
}

/// Letter of a Pauli word at one site.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliString {
    pub fn identity(num_sites: usize) -> Self {
        assert!(num_sites >= 1 && num_sites <= 64);
        PauliString {
            num_sites,
            x_mask: 0,
            z_mask: 0,
            sign: 1,
        }
    }

    pub fn from_masks(num_sites: usize, x_mask: u64, z_mask: u64, sign: i8) -> Self {
        assert!(num_sites >= 1 && num_sites <= 64);
        assert!(sign == 1 || sign == -1);
        let all = mask_all(num_sites);
        assert!(x_mask & !all == 0 && z_mask & !all == 0);
        PauliString {
            num_sites,
            x_mask,
            z_mask,
            sign,
        }
    }

    /// Single-letter word: `letter` at site `site` (1-based), identity elsewhere.
    pub fn single(num_sites: usize, site: usize, letter: PauliLetter) -> Self {
        assert!(site >= 1 && site <= num_sites);
        let bit = 1u64 << (site - 1);
        let (x, z) = match letter {
            PauliLetter::I => (0, 0),
            PauliLetter::X => (bit, 0),
            PauliLetter::Z => (0, bit),
            PauliLetter::Y => (bit, bit),
        };
        Self::from_masks(num_sites, x, z, 1)
    }

    /// Builds a word from a site-indexed list of letters, e.g. `[(1, Y), (3, Z)]`.
    pub fn from_letters(num_sites: usize, letters: &[(usize, PauliLetter)]) -> Self {
        let mut x = 0u64;
        let mut z = 0u64;
        for &(site, letter) in letters {
            assert!(site >= 1 && site <= num_sites, "site out of range");
            let bit = 1u64 << (site - 1);
            assert!(x & bit == 0 && z & bit == 0, "duplicate site");
            match letter {
                PauliLetter::I => {}
                PauliLetter::X => x |= bit,
                PauliLetter::Z => z |= bit,
                PauliLetter::Y => {
                    x |= bit;
                    z |= bit;
                }
            }
        }
        Self::from_masks(num_sites, x, z, 1)
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn x_mask(&self) -> u64 {
        self.x_mask
    }

    pub fn z_mask(&self) -> u64 {
        self.z_mask
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    pub fn negated(&self) -> Self {
        PauliString {
            sign: -self.sign,
            ..*self
        }
    }

    pub fn with_sign(&self, sign: i8) -> Self {
        assert!(sign == 1 || sign == -1);
        PauliString { sign, ..*self }
    }

    pub fn letter(&self, site: usize) -> PauliLetter {
        assert!(site >= 1 && site <= self.num_sites);
        let bit = 1u64 << (site - 1);
        match (self.x_mask & bit != 0, self.z_mask & bit != 0) {
            (false, false) => PauliLetter::I,
            (true, false) => PauliLetter::X,
            (false, true) => PauliLetter::Z,
            (true, true) => PauliLetter::Y,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.x_mask == 0 && self.z_mask == 0
    }

    /// Number of non-identity sites.
    pub fn weight(&self) -> usize {
        (self.x_mask | self.z_mask).count_ones() as usize
    }

    /// 1-based sites carrying a non-identity letter, ascending.
    pub fn support(&self) -> Vec<usize> {
        (1..=self.num_sites)
            .filter(|&i| (self.x_mask | self.z_mask) & (1 << (i - 1)) != 0)
            .collect()
    }

    fn y_count(&self) -> u32 {
        (self.x_mask & self.z_mask).count_ones()
    }

    /// True iff the two words commute (symplectic form is even).
    pub fn commutes(&self, other: &PauliString) -> Result<bool> {
        if self.num_sites != other.num_sites {
            return Err(QracError::SiteMismatch(self.num_sites, other.num_sites));
        }
        let form = (self.x_mask & other.z_mask).count_ones()
            + (self.z_mask & other.x_mask).count_ones();
        Ok(form % 2 == 0)
    }

    /// Product `self * other` as `i^phase` times a Hermitian word with sign +1.
    ///
    /// The phase exponent (mod 4) accounts for XZ reorderings, the Y phases of
    /// both factors and the product, and the stored signs.
    pub fn multiply(&self, other: &PauliString) -> Result<(u8, PauliString)> {
        if self.num_sites != other.num_sites {
            return Err(QracError::SiteMismatch(self.num_sites, other.num_sites));
        }
        let x = self.x_mask ^ other.x_mask;
        let z = self.z_mask ^ other.z_mask;
        let word = PauliString::from_masks(self.num_sites, x, z, 1);
        // op = sign * i^{#Y} * X(x)Z(z); reordering Z(z_a)X(x_b) costs (-1)^|z_a & x_b|.
        let mut phase = self.y_count() as i64 + other.y_count() as i64 - word.y_count() as i64;
        phase += 2 * (self.z_mask & other.x_mask).count_ones() as i64;
        if self.sign < 0 {
            phase += 2;
        }
        if other.sign < 0 {
            phase += 2;
        }
        Ok((phase.rem_euclid(4) as u8, word))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", render_term(1.0 * self.sign as f64, self))
    }
}

fn mask_all(num_sites: usize) -> u64 {
    if num_sites == 64 {
        u64::MAX
    } else {
        (1u64 << num_sites) - 1
    }
}

/// Renders a weighted word as e.g. `+1.000000 * Y1 Z2 Y4` (identity as `I`).
pub fn render_term(coeff: f64, word: &PauliString) -> String {
    let mut s = format!("{:+.6} *", coeff);
    if word.is_identity() {
        s.push_str(" I");
        return s;
    }
    for site in word.support() {
        let letter = match word.letter(site) {
            PauliLetter::I => unreachable!(),
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        };
        s.push_str(&format!(" {letter}{site}"));
    }
    s
}

/// Real-weighted sum of Pauli words. Signs are folded into coefficients, so
/// no two stored terms share an (x, z) mask and all stored words have sign +1.
#[derive(Debug, Clone)]
pub struct PauliSum<T: Real> {
    num_sites: usize,
    terms: BTreeMap<(u64, u64), T>,
}

impl<T: Real> PauliSum<T> {
    pub fn zero(num_sites: usize) -> Self {
        PauliSum {
            num_sites,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(num_sites: usize, terms: &[(T, PauliString)]) -> Self {
        let mut sum = Self::zero(num_sites);
        for &(c, ref w) in terms {
            sum.add_term(c, w);
        }
        sum.prune();
        sum
    }

    pub fn num_sites(&self) -> usize {
        self.num_sites
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, coeff: T, word: &PauliString) {
        assert_eq!(word.num_sites(), self.num_sites, "site count mismatch");
        let c = if word.sign() < 0 { -coeff } else { coeff };
        let key = (word.x_mask(), word.z_mask());
        *self.terms.entry(key).or_insert_with(T::zero) += c;
    }

    /// Coefficient of `word` (its sign taken into account); zero if absent.
    pub fn coefficient(&self, word: &PauliString) -> T {
        let c = self
            .terms
            .get(&(word.x_mask(), word.z_mask()))
            .copied()
            .unwrap_or_else(T::zero);
        if word.sign() < 0 {
            -c
        } else {
            c
        }
    }

    /// Iterates over (coefficient, word-with-sign-+1) pairs in mask order.
    pub fn terms(&self) -> impl Iterator<Item = (T, PauliString)> + '_ {
        self.terms.iter().map(move |(&(x, z), &c)| {
            (c, PauliString::from_masks(self.num_sites, x, z, 1))
        })
    }

    /// Drops terms with |coefficient| below the fixed pruning tolerance.
    pub fn prune(&mut self) {
        let tol: T = real(PRUNE_TOL);
        self.terms.retain(|_, c| c.abs() > tol);
    }

    pub fn scaled(&self, factor: T) -> Self {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= factor;
        }
        out.prune();
        out
    }

    pub fn add(&self, other: &PauliSum<T>) -> Self {
        assert_eq!(self.num_sites, other.num_sites);
        let mut out = self.clone();
        for (c, w) in other.terms() {
            out.add_term(c, &w);
        }
        out.prune();
        out
    }

    /// Sum of squared coefficients.
    pub fn norm_sq(&self) -> T {
        self.terms.values().map(|c| *c * *c).sum()
    }

    /// Sum of |coefficient| over all terms.
    pub fn abs_sum(&self) -> T {
        self.terms.values().map(|c| c.abs()).sum()
    }

    /// Sum of |coefficient| mismatch against `other`.
    pub fn distance(&self, other: &PauliSum<T>) -> T {
        let mut keys: Vec<(u64, u64)> = self.terms.keys().copied().collect();
        for k in other.terms.keys() {
            if !self.terms.contains_key(k) {
                keys.push(*k);
            }
        }
        keys.iter()
            .map(|k| {
                let a = self.terms.get(k).copied().unwrap_or_else(T::zero);
                let b = other.terms.get(k).copied().unwrap_or_else(T::zero);
                (a - b).abs()
            })
            .sum()
    }

    /// Conjugation `R . R^dagger` with `R = exp(-i * angle * generator / 2)`.
    ///
    /// Terms commuting with the generator pass through; an anticommuting term
    /// `V` maps to `V cos(angle) - i (G V) sin(angle)`, with the phase of
    /// `-i G V` resolved to a real sign.
    pub fn rotate_conjugate(&self, generator: &PauliString, angle: T) -> Result<PauliSum<T>> {
        if generator.num_sites() != self.num_sites {
            return Err(QracError::SiteMismatch(generator.num_sites(), self.num_sites));
        }
        let (cos, sin) = (angle.cos(), angle.sin());
        let mut out = PauliSum::zero(self.num_sites);
        for (c, word) in self.terms() {
            if generator.commutes(&word)? {
                out.add_term(c, &word);
                continue;
            }
            let (phase, product) = generator.multiply(&word)?;
            // -i * i^phase must be real for Hermitian anticommuting inputs.
            let transfer_sign = match (phase + 3) % 4 {
                0 => T::one(),
                2 => -T::one(),
                p => return Err(QracError::NonRealPhase(p)),
            };
            out.add_term(c * cos, &word);
            out.add_term(c * sin * transfer_sign, &product);
        }
        out.prune();
        Ok(out)
    }

    /// Conjugation by a single Pauli word `D`: `D . D^dagger` flips the sign
    /// of every term anticommuting with `D`.
    pub fn conjugate_by_pauli(&self, d: &PauliString) -> Result<PauliSum<T>> {
        let mut out = PauliSum::zero(self.num_sites);
        for (c, word) in self.terms() {
            let c = if d.commutes(&word)? { c } else { -c };
            out.add_term(c, &word);
        }
        Ok(out)
    }

    /// True iff the two sums have identical terms within `tol` per coefficient.
    pub fn approx_eq(&self, other: &PauliSum<T>, tol: T) -> bool {
        self.distance(other) <= tol * from_len::<T>(self.terms.len().max(other.terms.len()).max(1))
    }
}

fn from_len<T: Real>(n: usize) -> T {
    crate::scalar::from_usize(n)
}

impl<T: Real> fmt::Display for PauliSum<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "{:+.6} * I", 0.0);
        }
        let rendered: Vec<String> = self
            .terms()
            .map(|(c, w)| render_term(c.to_f64().unwrap_or(f64::NAN), &w))
            .collect();
        write!(f, "{}", rendered.join("  "))
    }
}
