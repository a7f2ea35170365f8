//! Command-line front end: batch verification, codebook and circuit export,
//! Monte Carlo simulation, and report generation.
//!
//! Exit codes: 0 on success, 1 when a requested check fails, 2 on usage
//! errors. Failures print a single machine-parsable line to stderr.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qrac::analysis::{self, ShotConfig};
use qrac::circuit::{
    contract_observable, decoding_circuit, encoding_circuit, render_native, render_qasm,
    run_circuit,
};
use qrac::codebook::{codebook, displacement_covariance_holds, encode};
use qrac::decoder::{
    diagonal_part, mu, observable_explicit, observable_from_povm, povm, s_operator,
    w_decomposition, w_decomposition_export,
};
use qrac::dense::{hermitian_eigen, DenseOperator};
use qrac::{Bits, Circuit64, QracInstance};

#[derive(Parser)]
#[command(
    name = "qrac",
    about = "Exact (n, n-1) quantum random access codes: verification, circuits, simulation",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Native,
    Qasm,
    Json,
    Csv,
}

#[derive(Args)]
struct CommonOpts {
    /// Number of encoded bits (n >= 2).
    #[arg(long)]
    n: usize,
    /// Override the dense-oracle site limit.
    #[arg(long)]
    dense_limit: Option<usize>,
}

impl CommonOpts {
    fn instance(&self) -> qrac::Result<QracInstance> {
        let mut inst = QracInstance::new(self.n)?;
        if let Some(limit) = self.dense_limit {
            inst = inst.with_dense_limit(limit);
        }
        Ok(inst)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run the full invariant suite for one instance and print per-check results.
    Verify {
        #[command(flatten)]
        common: CommonOpts,
    },
    /// Print (or write) the codebook as JSON.
    Encode {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a decoding circuit (--k) or an encoding circuit (--y).
    Circuit {
        #[command(flatten)]
        common: CommonOpts,
        /// Bit index for a decoding circuit.
        #[arg(long)]
        k: Option<usize>,
        /// Input bitstring for an encoding circuit.
        #[arg(long)]
        y: Option<String>,
        #[arg(long, value_enum, default_value = "native")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run the deterministic shot harness.
    Simulate {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        shots: u64,
        #[arg(long, default_value = "0")]
        seed: u64,
        /// Depolarizing rate in [0, 1).
        #[arg(long, default_value = "0.0")]
        noise: f64,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Build the quantitative report over a range of n.
    Analyze {
        /// Inclusive range of n, e.g. 2..8.
        #[arg(long)]
        n_range: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Largest n for which the dense-oracle columns are computed.
        #[arg(long, default_value = "8")]
        dense_up_to: usize,
        #[arg(long)]
        shots: Option<u64>,
        #[arg(long, default_value = "0")]
        seed: u64,
        #[arg(long, default_value = "0.0")]
        noise: f64,
    },
    /// Export the observable decomposition and rotation schedule as JSON.
    Export {
        #[command(flatten)]
        common: CommonOpts,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(all_passed) => {
            if all_passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                qrac::QracError::Usage(_)
                | qrac::QracError::BadInstance(_)
                | qrac::QracError::BadIndex { .. }
                | qrac::QracError::BadBitstring(..) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}

fn run(command: Command) -> qrac::Result<bool> {
    match command {
        Command::Verify { common } => verify(&common.instance()?),
        Command::Encode { common, output } => {
            let book = codebook(common.n)?;
            emit(output.as_deref(), &serde_json::to_string_pretty(&book)?)?;
            Ok(true)
        }
        Command::Circuit {
            common,
            k,
            y,
            format,
            output,
        } => {
            let inst = common.instance()?;
            let circuit: Circuit64 = match (k, y) {
                (Some(k), None) => decoding_circuit(&inst, k)?,
                (None, Some(y)) => encoding_circuit(&Bits::parse(&y)?, &inst)?.0,
                _ => {
                    return Err(qrac::QracError::Usage(
                        "circuit requires exactly one of --k or --y".into(),
                    ))
                }
            };
            let text = match format {
                Format::Native => render_native(&circuit),
                Format::Qasm => render_qasm(&circuit),
                _ => {
                    return Err(qrac::QracError::Usage(
                        "circuit format must be native or qasm".into(),
                    ))
                }
            };
            emit(output.as_deref(), &text)?;
            Ok(true)
        }
        Command::Simulate {
            common,
            shots,
            seed,
            noise,
            format,
        } => {
            let inst = common.instance()?;
            let summary = analysis::simulate_shots::<f64>(&inst, shots, seed, noise)?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&summary)?),
                _ => println!(
                    "n={} shots={} seed={} noise={} empirical_p={:.10} std_error={:.3e}",
                    common.n, shots, seed, noise, summary.empirical_p, summary.std_error
                ),
            }
            Ok(true)
        }
        Command::Analyze {
            n_range,
            format,
            output,
            dense_up_to,
            shots,
            seed,
            noise,
        } => {
            let ns = parse_range(&n_range)?;
            let shot_config = shots.map(|count| ShotConfig {
                shots: count,
                seed,
                noise,
            });
            let set = analysis::report(&ns, dense_up_to, shot_config)?;
            let text = match format {
                Format::Csv => analysis::to_csv(&set),
                Format::Json => analysis::to_json(&set)?,
                _ => {
                    return Err(qrac::QracError::Usage(
                        "analyze format must be csv or json".into(),
                    ))
                }
            };
            emit(output.as_deref(), &text)?;
            Ok(true)
        }
        Command::Export { common, k, output } => {
            let inst = common.instance()?;
            let export = w_decomposition_export(&inst, k)?;
            let steps: Vec<serde_json::Value> = qrac::circuit::diagonalization_rotations::<f64>(
                &inst, k,
            )?
            .iter()
            .map(|s| {
                serde_json::json!({
                    "m": s.m,
                    "stage": format!("{:?}", s.stage),
                    "generator": qrac::pauli::render_term(s.generator.sign() as f64, &s.generator.with_sign(1)),
                    "angle": s.angle,
                })
            })
            .collect();
            let doc = serde_json::json!({
                "schema_version": 1,
                "observable": export,
                "rotations": steps,
            });
            emit(output.as_deref(), &serde_json::to_string_pretty(&doc)?)?;
            Ok(true)
        }
    }
}

/// Parses an inclusive "a..b" range of n values.
fn parse_range(s: &str) -> qrac::Result<Vec<usize>> {
    let parts: Vec<&str> = s.split("..").collect();
    let err = || qrac::QracError::Usage(format!("bad range '{s}', expected e.g. 2..8"));
    if parts.len() != 2 {
        return Err(err());
    }
    let lo: usize = parts[0].parse().map_err(|_| err())?;
    let hi: usize = parts[1].parse().map_err(|_| err())?;
    if lo < 2 || hi < lo {
        return Err(err());
    }
    Ok((lo..=hi).collect())
}

/// Writes to stdout, or atomically (temp file + rename) to a path.
fn emit(path: Option<&Path>, text: &str) -> qrac::Result<()> {
    match path {
        None => {
            print!("{text}");
            if !text.ends_with('\n') {
                println!();
            }
            Ok(())
        }
        Some(path) => {
            let tmp = path.with_extension(format!("tmp.{}", std::process::id()));
            fs::write(&tmp, text)?;
            fs::rename(&tmp, path)?;
            Ok(())
        }
    }
}

/// The per-instance invariant suite backing `qrac verify`.
fn verify(inst: &QracInstance) -> qrac::Result<bool> {
    let n = inst.n();
    let checks: Vec<(&str, Box<dyn Fn() -> qrac::Result<()> + '_>)> = vec![
        (
            "sign-matrix-laws",
            Box::new(|| check_sign_matrix(inst)),
        ),
        (
            "encoding-orthonormality",
            Box::new(|| check_orthonormality(inst)),
        ),
        (
            "projector-contraction",
            Box::new(|| check_projector_contraction(inst)),
        ),
        ("s-spectrum", Box::new(|| check_spectrum(inst))),
        ("povm-validity", Box::new(|| check_povm(inst))),
        (
            "observable-equivalence",
            Box::new(|| check_observable_equivalence(inst)),
        ),
        (
            "w-anticommutation",
            Box::new(|| check_w_decomposition(inst)),
        ),
        (
            "symbolic-contraction",
            Box::new(|| check_symbolic_contraction(inst)),
        ),
        ("circuit-unitary", Box::new(|| check_circuit_unitary(inst))),
        (
            "encoding-circuit",
            Box::new(|| check_encoding_circuit(inst)),
        ),
        (
            "displacement-covariance",
            Box::new(|| check_displacement_covariance(inst)),
        ),
        (
            "success-probability",
            Box::new(|| check_success_probability(inst)),
        ),
    ];

    let mut all_passed = true;
    for (name, check) in &checks {
        match check() {
            Ok(()) => println!("PASS {name} (n={n})"),
            Err(e) => {
                all_passed = false;
                println!("FAIL {name} (n={n}): {e}");
            }
        }
    }
    Ok(all_passed)
}

fn fail(msg: String) -> qrac::QracError {
    qrac::QracError::SpectralCheck(msg)
}

fn check_sign_matrix(inst: &QracInstance) -> qrac::Result<()> {
    let n = inst.n();
    for y in Bits::all(n) {
        for x in Bits::all(n) {
            let entry = qrac::codebook::a_entry(&y, &x)?;
            let expected_nonzero = y.hamming(&x) == 1;
            if expected_nonzero != (entry != 0) || entry.abs() > 1 {
                return Err(fail(format!("bad sign-matrix entry at y={y} x={x}")));
            }
        }
    }
    if n <= 6 {
        let a = qrac::codebook::a_pauli::<f64>(n).to_dense(inst.dense_limit())?;
        let residual = a
            .matmul(&a)?
            .max_abs_diff(&DenseOperator::identity(a.dim()).scaled_real(n as f64))?;
        if residual > 1e-12 {
            return Err(fail(format!("A^2 != nI, residual {residual:.3e}")));
        }
    }
    Ok(())
}

fn check_orthonormality(inst: &QracInstance) -> qrac::Result<()> {
    let n = inst.n();
    let odd: Vec<Bits> = Bits::all(n).filter(|y| y.parity() == 1).collect();
    for a in &odd {
        let sa = encode::<f64>(a)?;
        for b in &odd {
            let ip = sa.inner(&encode::<f64>(b)?)?;
            let expected = if a.value() == b.value() { 1.0 } else { 0.0 };
            if (ip.re - expected).abs() > 1e-12 || ip.im.abs() > 1e-12 {
                return Err(fail(format!("overlap violation at y={a} y'={b}")));
            }
        }
    }
    Ok(())
}

fn check_projector_contraction(inst: &QracInstance) -> qrac::Result<()> {
    let target = mu::<f64>(inst.n());
    for k in 1..=inst.n() {
        for b in 0..2u8 {
            let p = qrac::decoder::parity_projector::<f64>(inst, k, b, qrac::decoder::Parity::Even)?;
            let q = qrac::decoder::parity_projector::<f64>(inst, k, b, qrac::decoder::Parity::Odd)?;
            let pqp = p.matmul(&q)?.matmul(&p)?;
            let qpq = q.matmul(&p)?.matmul(&q)?;
            if pqp.max_abs_diff(&p.scaled_real(target))? > 1e-10
                || qpq.max_abs_diff(&q.scaled_real(target))? > 1e-10
            {
                return Err(fail(format!("projector contraction failed at k={k} b={b}")));
            }
        }
    }
    Ok(())
}

fn check_spectrum(inst: &QracInstance) -> qrac::Result<()> {
    let n = inst.n();
    let root_mu = mu::<f64>(n).sqrt();
    let half = inst.dim() / 2;
    for k in 1..=n {
        for b in 0..2u8 {
            let s = s_operator::<f64>(inst, k, b)?;
            let eig = hermitian_eigen(&s)?;
            let low = eig.eigenvalues.iter().filter(|&&v| (v - (1.0 - root_mu)).abs() < 1e-9).count();
            let high = eig.eigenvalues.iter().filter(|&&v| (v - (1.0 + root_mu)).abs() < 1e-9).count();
            if low != half || high != half {
                return Err(fail(format!(
                    "spectrum of S at k={k} b={b}: {low} low / {high} high, expected {half} each"
                )));
            }
        }
    }
    Ok(())
}

fn check_povm(inst: &QracInstance) -> qrac::Result<()> {
    for k in 1..=inst.n() {
        let pair = povm::<f64>(inst, k)?;
        pair.validate()?;
        for b in 0..2u8 {
            let eig = hermitian_eigen(pair.element(b))?;
            if eig.eigenvalues.iter().any(|&v| v < -1e-10) {
                return Err(fail(format!("negative POVM eigenvalue at k={k} b={b}")));
            }
        }
    }
    Ok(())
}

fn check_observable_equivalence(inst: &QracInstance) -> qrac::Result<()> {
    for k in 1..=inst.n() {
        // Errors internally if the POVM route disagrees with the Pauli form.
        observable_from_povm::<f64>(inst, k)?;
    }
    Ok(())
}

fn check_w_decomposition(inst: &QracInstance) -> qrac::Result<()> {
    for k in 1..=inst.n() {
        let dec = w_decomposition::<f64>(inst, k)?;
        if !dec.pairwise_anticommute()? {
            return Err(fail(format!("W words fail to anticommute at k={k}")));
        }
        if (dec.coeff_norm_sq() - 1.0).abs() > 1e-12 {
            return Err(fail(format!("W coefficient mass != 1 at k={k}")));
        }
        if !dec
            .as_sum()
            .approx_eq(&observable_explicit::<f64>(inst, k)?, 1e-12)
        {
            return Err(fail(format!("W sum disagrees with observable at k={k}")));
        }
    }
    Ok(())
}

fn check_symbolic_contraction(inst: &QracInstance) -> qrac::Result<()> {
    for k in 1..=inst.n() {
        contract_observable::<f64>(inst, k)?;
    }
    Ok(())
}

fn check_circuit_unitary(inst: &QracInstance) -> qrac::Result<()> {
    for k in 1..=inst.n() {
        let circuit: Circuit64 = decoding_circuit(inst, k)?;
        if circuit.cnot_count() > 2 * (inst.n() - 1) {
            return Err(fail(format!("CNOT budget exceeded at k={k}")));
        }
        let u = qrac::circuit::circuit_to_unitary(&circuit)?;
        let o = observable_explicit::<f64>(inst, k)?.to_dense(inst.dense_limit())?;
        let e = diagonal_part(inst, k)?.to_dense::<f64>(inst.dense_limit())?;
        let conjugated = u.matmul(&o)?.matmul(&u.adjoint())?;
        let residual = conjugated.max_abs_diff(&e)?;
        if residual > 1e-9 {
            return Err(fail(format!(
                "circuit fails to diagonalize O at k={k}, residual {residual:.3e}"
            )));
        }
    }
    Ok(())
}

fn check_encoding_circuit(inst: &QracInstance) -> qrac::Result<()> {
    for y in Bits::all(inst.n()) {
        let (circuit, sign): (Circuit64, i8) = encoding_circuit(&y, inst)?;
        let out = run_circuit(&circuit).scaled(num_complex::Complex::new(sign as f64, 0.0));
        let direct = encode::<f64>(&y)?;
        if out.max_abs_diff(&direct)? > 1e-10 {
            return Err(fail(format!("encoding circuit mismatch at y={y}")));
        }
    }
    Ok(())
}

fn check_displacement_covariance(inst: &QracInstance) -> qrac::Result<()> {
    for y in Bits::all(inst.n()).filter(|y| y.parity() == 1) {
        if !displacement_covariance_holds::<f64>(&y)? {
            return Err(fail(format!("displacement covariance fails at y={y}")));
        }
    }
    Ok(())
}

fn check_success_probability(inst: &QracInstance) -> qrac::Result<()> {
    let exact = analysis::success_probability_exact::<f64>(inst)?;
    let closed = analysis::closed_forms::<f64>(inst).p_q;
    if (exact - closed).abs() > 1e-9 {
        return Err(fail(format!(
            "brute-force probability {exact:.12} != closed form {closed:.12}"
        )));
    }
    Ok(())
}
