//! Quantitative analysis: exact and closed-form success probabilities,
//! classical bound and gap, commutator norms, measurement disturbance,
//! information gap, and a deterministic Monte Carlo shot harness.

use serde::Serialize;

use crate::codebook::{encode, Bits, QracInstance};
use crate::decoder::{mu, observable_explicit, povm, PovmPair};
use crate::dense::{expectation, operator_norm, DenseOperator, StateVector};
use crate::error::{QracError, Result};
use crate::scalar::{from_usize, real, Real, ALGEBRA_TOL, VERIFY_TOL};

/// Binary entropy in bits, with the 0 log 0 = 0 convention.
pub fn binary_entropy<T: Real>(p: T) -> T {
    let mut h = T::zero();
    for q in [p, T::one() - p] {
        if q > T::zero() {
            h = h - q * q.log2();
        }
    }
    h
}

/// Closed-form quantities for one instance.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForms<T: Real> {
    /// Quantum success probability (1 + sqrt((n-1)/n)) / 2.
    pub p_q: T,
    /// Classical bound (n - 1/2) / n.
    pub p_c: T,
    /// p_q - p_c.
    pub gap: T,
    /// Information gap n * H(p_q) - 1.
    pub delta_i: T,
}

pub fn closed_forms<T: Real>(inst: &QracInstance) -> ClosedForms<T> {
    let n = from_usize::<T>(inst.n());
    let half = real::<T>(0.5);
    let p_q = half * (T::one() + mu::<T>(inst.n()).sqrt());
    let p_c = (n - half) / n;
    ClosedForms {
        p_q,
        p_c,
        gap: p_q - p_c,
        delta_i: n * binary_entropy(p_q) - T::one(),
    }
}

/// Per-(x, k) success probabilities, indexed `[k-1][x]`.
fn success_table<T: Real>(inst: &QracInstance) -> Result<Vec<Vec<T>>> {
    inst.check_dense()?;
    let n = inst.n();
    let states: Vec<StateVector<T>> = Bits::all(n)
        .map(|y| encode(&y))
        .collect::<Result<_>>()?;
    let mut table = Vec::with_capacity(n);
    for k in 1..=n {
        let pair: PovmPair<T> = povm(inst, k)?;
        let mut row = Vec::with_capacity(1 << n);
        for (x, state) in states.iter().enumerate() {
            let y = Bits::new(n, x as u64);
            let b = y.bit(k);
            row.push(expectation(pair.element(b), state)?);
        }
        table.push(row);
    }
    Ok(table)
}

/// Brute-force average success probability over all inputs and indices,
/// asserting along the way that every individual term equals the closed-form
/// constant (1 + sqrt(mu)) / 2.
pub fn success_probability_exact<T: Real>(inst: &QracInstance) -> Result<T> {
    let constant = real::<T>(0.5) * (T::one() + mu::<T>(inst.n()).sqrt());
    let tol: T = real(ALGEBRA_TOL);
    let table = success_table::<T>(inst)?;
    let mut total = T::zero();
    let mut count = 0usize;
    for row in &table {
        for &p in row {
            if (p - constant).abs() > tol {
                return Err(QracError::SpectralCheck(format!(
                    "per-input success {:?} deviates from the constant {:?}",
                    p, constant
                )));
            }
            total += p;
            count += 1;
        }
    }
    Ok(total / from_usize(count))
}

/// Operator norm of [O_k, O_l] built from the explicit observables.
pub fn commutator_norm<T: Real>(inst: &QracInstance, k: usize, l: usize) -> Result<T> {
    if k == l {
        return Err(QracError::EqualIndices);
    }
    inst.check_dense()?;
    let ok = observable_explicit::<T>(inst, k)?.to_dense(inst.dense_limit())?;
    let ol = observable_explicit::<T>(inst, l)?.to_dense(inst.dense_limit())?;
    let commutator = ok.matmul(&ol)?.sub(&ol.matmul(&ok)?)?;
    operator_norm(&commutator)
}

/// Measurement-disturbance decomposition for the pair (O_1, O_2).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Disturbance {
    /// |<D>_post - <D>_initial| averaged over inputs, D the block-diagonal
    /// part of O_2 in the {P_1, Q_1} decomposition.
    pub term_i: f64,
    /// |<V>_initial| averaged over inputs, V the off-diagonal part.
    pub term_ii: f64,
    /// Half the commutator norm; upper bound on term_ii per input.
    pub commutator_bound: f64,
    pub term_i_max: f64,
    pub term_ii_max: f64,
}

/// Computes both disturbance contributions of a first-bit measurement on a
/// subsequent O_2 measurement. The post-measurement state is the normalized
/// outcome-conditioned state for the outcome matching x_1; term_ii is
/// checked against the commutator bound for every individual input.
pub fn disturbance<T: Real>(inst: &QracInstance) -> Result<Disturbance> {
    inst.check_dense()?;
    let n = inst.n();
    let pair: PovmPair<T> = povm(inst, 1)?;
    let o2 = observable_explicit::<T>(inst, 2)?.to_dense(inst.dense_limit())?;
    let bound = real::<T>(0.5) * commutator_norm::<T>(inst, 1, 2)?;
    let tol: T = real(VERIFY_TOL);

    let mut sum_i = T::zero();
    let mut sum_ii = T::zero();
    let mut max_i = T::zero();
    let mut max_ii = T::zero();
    let count = 1usize << n;
    for y in Bits::all(n) {
        let state = encode::<T>(&y)?;
        let p1 = pair.element(y.bit(1));
        let q1 = DenseOperator::identity(inst.dim()).sub(p1)?;
        // D = P O2 P + Q O2 Q, V = P O2 Q + Q O2 P.
        let d = p1
            .matmul(&o2)?
            .matmul(p1)?
            .add(&q1.matmul(&o2)?.matmul(&q1)?)?;
        let v = p1
            .matmul(&o2)?
            .matmul(&q1)?
            .add(&q1.matmul(&o2)?.matmul(p1)?)?;

        let term_ii = expectation(&v, &state)?.abs();
        if term_ii > bound + tol {
            return Err(QracError::SpectralCheck(format!(
                "off-diagonal disturbance {:?} exceeds bound {:?} at input {}",
                term_ii, bound, y
            )));
        }

        let post = p1.apply(&state)?.normalized();
        if (post.norm() - T::one()).abs() > real(crate::scalar::CONSTRUCTION_TOL) {
            return Err(QracError::SpectralCheck(
                "post-measurement state not normalized".into(),
            ));
        }
        let term_i = (expectation(&d, &post)? - expectation(&d, &state)?).abs();

        sum_i += term_i;
        sum_ii += term_ii;
        max_i = max_i.max(term_i);
        max_ii = max_ii.max(term_ii);
    }
    let avg = |s: T| (s / from_usize::<T>(count)).to_f64().unwrap_or(f64::NAN);
    Ok(Disturbance {
        term_i: avg(sum_i),
        term_ii: avg(sum_ii),
        commutator_bound: bound.to_f64().unwrap_or(f64::NAN),
        term_i_max: max_i.to_f64().unwrap_or(f64::NAN),
        term_ii_max: max_ii.to_f64().unwrap_or(f64::NAN),
    })
}

/// SplitMix64: the standard 64-bit mixing generator (Steele, Lea & Flood).
/// Fixed here so that simulation runs are reproducible bit for bit.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1) with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Monte Carlo shot result.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ShotSummary {
    pub count: u64,
    pub seed: u64,
    pub noise: f64,
    pub empirical_p: f64,
    pub std_error: f64,
}

/// Samples the protocol: uniform (x, k), success probability
/// <psi_x|M_{x_k|k}|psi_x>, optional depolarizing noise mixing the state
/// with I/2^{n-1}, Bernoulli draw per shot. One sequential SplitMix64
/// stream defines the result for a given (n, shots, seed, noise).
pub fn simulate_shots<T: Real>(
    inst: &QracInstance,
    shots: u64,
    seed: u64,
    noise: f64,
) -> Result<ShotSummary> {
    if shots == 0 {
        return Err(QracError::NoShots);
    }
    if !(0.0..1.0).contains(&noise) || !noise.is_finite() {
        return Err(QracError::BadNoiseRate(noise));
    }
    let n = inst.n();
    let table = success_table::<T>(inst)?;
    // Depolarizing: rho -> (1-r) rho + r I/dim; the POVM elements all have
    // trace dim/2, so the mixed-state term contributes r/2.
    let probs: Vec<Vec<f64>> = table
        .iter()
        .map(|row| {
            row.iter()
                .map(|&p| (1.0 - noise) * p.to_f64().unwrap_or(f64::NAN) + noise * 0.5)
                .collect()
        })
        .collect();

    let mut rng = SplitMix64::new(seed);
    let x_mask = (1u64 << n) - 1;
    let mut successes = 0u64;
    for _ in 0..shots {
        let x = (rng.next_u64() & x_mask) as usize;
        let k = (rng.next_u64() % n as u64) as usize;
        let p = probs[k][x];
        if rng.next_f64() < p {
            successes += 1;
        }
    }
    let empirical_p = successes as f64 / shots as f64;
    let std_error = (empirical_p * (1.0 - empirical_p) / shots as f64).sqrt();
    Ok(ShotSummary {
        count: shots,
        seed,
        noise,
        empirical_p,
        std_error,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CommutatorEntry {
    pub k: usize,
    pub l: usize,
    pub norm: f64,
}

/// One report row. Dense-oracle fields are omitted for instances beyond the
/// requested dense sweep bound; closed forms are always present.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub n: usize,
    pub p_quantum_exact: Option<f64>,
    pub p_quantum_closed: f64,
    pub p_classical: f64,
    pub gap: f64,
    #[serde(rename = "delta_I")]
    pub delta_i: f64,
    pub commutator_norms: Vec<CommutatorEntry>,
    pub disturbance: Option<Disturbance>,
    /// Loose analytic ceiling 1/2 + sqrt(2^{n-2}/n)/2, reported as a
    /// reference curve only (it exceeds 1 for larger n and is never
    /// asserted).
    pub reference_upper_bound: f64,
    pub shots: Option<ShotSummary>,
}

/// Versioned report container.
#[derive(Debug, Clone, Serialize)]
pub struct ReportSet {
    pub schema_version: u32,
    pub reports: Vec<Report>,
}

/// Optional shot-harness configuration for report rows.
#[derive(Debug, Clone, Copy)]
pub struct ShotConfig {
    pub shots: u64,
    pub seed: u64,
    pub noise: f64,
}

/// Builds one report row. `dense` selects whether the brute-force and
/// dense-oracle fields are computed.
pub fn report_row(
    inst: &QracInstance,
    dense: bool,
    shot_config: Option<ShotConfig>,
) -> Result<Report> {
    let n = inst.n();
    let forms = closed_forms::<f64>(inst);
    let mut row = Report {
        n,
        p_quantum_exact: None,
        p_quantum_closed: forms.p_q,
        p_classical: forms.p_c,
        gap: forms.gap,
        delta_i: forms.delta_i,
        commutator_norms: Vec::new(),
        disturbance: None,
        reference_upper_bound: 0.5 + (2f64.powi(n as i32 - 2) / n as f64).sqrt() / 2.0,
        shots: None,
    };
    if dense {
        let exact = success_probability_exact::<f64>(inst)?;
        if (exact - forms.p_q).abs() > VERIFY_TOL {
            return Err(QracError::SpectralCheck(format!(
                "brute-force probability {exact} disagrees with closed form {}",
                forms.p_q
            )));
        }
        row.p_quantum_exact = Some(exact);
        for k in 1..=n {
            for l in (k + 1)..=n {
                row.commutator_norms.push(CommutatorEntry {
                    k,
                    l,
                    norm: commutator_norm::<f64>(inst, k, l)?,
                });
            }
        }
        row.disturbance = Some(disturbance::<f64>(inst)?);
    }
    if let Some(cfg) = shot_config {
        row.shots = Some(simulate_shots::<f64>(inst, cfg.shots, cfg.seed, cfg.noise)?);
    }
    Ok(row)
}

/// Assembles rows for each n; dense fields are computed for n up to
/// `dense_up_to`.
pub fn report(
    n_values: &[usize],
    dense_up_to: usize,
    shot_config: Option<ShotConfig>,
) -> Result<ReportSet> {
    let mut reports = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let inst = QracInstance::new(n)?;
        reports.push(report_row(&inst, n <= dense_up_to, shot_config)?);
    }
    Ok(ReportSet {
        schema_version: 1,
        reports,
    })
}

fn fmt(v: f64) -> String {
    format!("{v:.16e}")
}

/// CSV rendering: one row per n, floats at 17 significant digits, optional
/// fields left empty when not computed.
pub fn to_csv(set: &ReportSet) -> String {
    let mut out = String::from(
        "n,p_quantum_exact,p_quantum_closed,p_classical,gap,delta_I,\
         max_commutator_norm,term_i,term_ii,commutator_bound,\
         reference_upper_bound,empirical_p,std_error\n",
    );
    for r in &set.reports {
        let max_comm = r
            .commutator_norms
            .iter()
            .map(|e| e.norm)
            .fold(f64::NAN, f64::max);
        let opt = |v: Option<f64>| v.map(fmt).unwrap_or_default();
        let row = [
            r.n.to_string(),
            opt(r.p_quantum_exact),
            fmt(r.p_quantum_closed),
            fmt(r.p_classical),
            fmt(r.gap),
            fmt(r.delta_i),
            opt(r.commutator_norms.first().map(|_| max_comm)),
            opt(r.disturbance.map(|d| d.term_i)),
            opt(r.disturbance.map(|d| d.term_ii)),
            opt(r.disturbance.map(|d| d.commutator_bound)),
            fmt(r.reference_upper_bound),
            opt(r.shots.map(|s| s.empirical_p)),
            opt(r.shots.map(|s| s.std_error)),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// JSON rendering of the versioned report set.
pub fn to_json(set: &ReportSet) -> Result<String> {
    Ok(serde_json::to_string_pretty(set)?)
}
