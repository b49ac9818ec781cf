//! Command-line front end. The library does the work; this binary parses
//! flags, routes subcommands, and maps outcomes onto the exit-code
//! contract:
//!
//! - 0: success
//! - 1: mathematical finding (indefinite Gram operator, violated
//!   validation, consistency alarm, residual above tolerance)
//! - 2: input error (bad file, parse error, invalid parameters)
//! - 3: resource cap exceeded (`d^n` above the dimension cap)

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;

use wick::audit::{audit_all, audit_kernel, AuditOptions};
use wick::coefficients::{uniform_q_matrix, validate, AlgebraInput, PresetInput, WickCoefficients};
use wick::fock::{build_rep, gram_spectra, norm_growth, verify_adjoint, verify_relations,
    BuildOptions, FockTruncation, NormGrowth};
use wick::symbolic::{parse_complex_literal, parse_expr, wick_order};
use wick::WickError;

#[derive(Parser)]
#[command(
    name = "wick",
    about = "Gram operators, Fock representations, and normal ordering for \
             deformed commutation relations",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check Wick symmetry of the coefficients and self-adjointness of T.
    Validate {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Eigenvalue table and positivity verdicts of the Gram operators.
    Spectrum {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Observed kernels of P_n versus the predicted sums of lifted
    /// ker(1+T), with degree-2 generators rendered as polynomials.
    Kernel {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Normal-order an expression in the generators.
    Order {
        /// Expression, e.g. "a1* a2" or "2 a1 a2 - (0+1i) a2 a1".
        expr: String,
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Build the truncated quotient representation and report residuals,
    /// quotient dimensions, and creation-norm growth.
    Rep {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Run every check and emit the full report.
    Audit {
        #[command(flatten)]
        algebra: AlgebraArgs,
        #[command(flatten)]
        common: CommonArgs,
    },
}

#[derive(Args)]
struct AlgebraArgs {
    /// JSON file describing the algebra (see README for the schema).
    #[arg(long, conflicts_with = "preset")]
    algebra: Option<std::path::PathBuf>,

    /// Inline preset: q-ccr, tccr, or zero.
    #[arg(long)]
    preset: Option<String>,

    /// Number of generators (inline presets).
    #[arg(long)]
    d: Option<usize>,

    /// q for q-ccr: a complex literal ("0.5", "(0+1i)") applied uniformly,
    /// or a full JSON matrix of [re, im] pairs.
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,

    /// mu for tccr (0 < mu < 1 unless the override flag is set).
    #[arg(long)]
    mu: Option<f64>,

    /// Accept |q| > 1 (and mu outside (0,1)) parameter values.
    #[arg(long)]
    allow_modulus_violation: bool,
}

#[derive(Args)]
struct CommonArgs {
    /// Truncation degree N (at least 2).
    #[arg(long, default_value_t = 5)]
    max_degree: usize,

    /// Relative tolerance for rank and positivity decisions.
    #[arg(long, default_value_t = wick::DEFAULT_REL_TOL)]
    tol: f64,

    /// Output format: text or json.
    #[arg(long, default_value = "text")]
    format: String,

    /// Seed for the randomized audit spot checks.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Cap on matrix dimensions d^n.
    #[arg(long, default_value_t = wick::DEFAULT_DIM_CAP)]
    dim_cap: usize,
}

impl CommonArgs {
    fn check(&self) -> Result<(), CliError> {
        if self.max_degree < 2 {
            return Err(CliError::input("--max-degree must be at least 2"));
        }
        if !(self.format == "text" || self.format == "json") {
            return Err(CliError::input("--format must be text or json"));
        }
        Ok(())
    }

    fn build_options(&self) -> BuildOptions {
        BuildOptions { rel_tol: self.tol, dim_cap: self.dim_cap }
    }

    fn audit_options(&self) -> AuditOptions {
        AuditOptions { rel_tol: self.tol, dim_cap: self.dim_cap, seed: self.seed }
    }

    fn json(&self) -> bool {
        self.format == "json"
    }
}

struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl From<WickError> for CliError {
    fn from(err: WickError) -> Self {
        let code = match &err {
            WickError::DimensionCap { .. } => 3,
            WickError::IndefiniteGram { .. } => 1,
            _ => 2,
        };
        CliError { code, message: err.to_string() }
    }
}

/// The algebra plus a one-line descriptor for report headers.
struct Resolved {
    coeffs: WickCoefficients,
    descriptor: String,
}

impl AlgebraArgs {
    fn resolve(&self, diagnostic: bool) -> Result<Resolved, CliError> {
        if let Some(path) = &self.algebra {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
            let input = AlgebraInput::from_json(&text)?;
            let coeffs = if diagnostic {
                input.to_coefficients_diagnostic()?
            } else {
                input.to_coefficients()?
            };
            return Ok(Resolved { coeffs, descriptor: input.descriptor() });
        }
        let preset = self
            .preset
            .as_deref()
            .ok_or_else(|| CliError::input("pass --algebra FILE or --preset KIND"))?;
        let d = self
            .d
            .ok_or_else(|| CliError::input("inline presets need --d"))?;
        let input = match preset {
            "q-ccr" | "q_ccr" => {
                let q_text = self
                    .q
                    .as_deref()
                    .ok_or_else(|| CliError::input("q-ccr needs --q"))?;
                let q = parse_q_matrix(q_text, d)?;
                AlgebraInput {
                    d,
                    preset: Some(PresetInput {
                        kind: "q_ccr".into(),
                        q: Some(
                            q.iter()
                                .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
                                .collect(),
                        ),
                        mu: None,
                    }),
                    coeff: None,
                    allow_modulus_violation: self.allow_modulus_violation,
                }
            }
            "tccr" => {
                let mu = self
                    .mu
                    .ok_or_else(|| CliError::input("tccr needs --mu"))?;
                AlgebraInput {
                    d,
                    preset: Some(PresetInput { kind: "tccr".into(), q: None, mu: Some(mu) }),
                    coeff: None,
                    allow_modulus_violation: self.allow_modulus_violation,
                }
            }
            "zero" => AlgebraInput {
                d,
                preset: Some(PresetInput { kind: "zero".into(), q: None, mu: None }),
                coeff: None,
                allow_modulus_violation: false,
            },
            other => {
                return Err(CliError::input(format!(
                    "unknown preset {other:?} (expected q-ccr, tccr, or zero)"
                )))
            }
        };
        let descriptor = match preset {
            "q-ccr" | "q_ccr" => format!("q_ccr(d = {d}, q = {})", self.q.as_deref().unwrap_or("")),
            _ => input.descriptor(),
        };
        Ok(Resolved { coeffs: input.to_coefficients()?, descriptor })
    }
}

/// `--q` accepts a single complex literal (uniform matrix) or a JSON
/// matrix of `[re, im]` pairs.
fn parse_q_matrix(text: &str, d: usize) -> Result<Vec<Vec<Complex64>>, CliError> {
    let trimmed = text.trim();
    if trimmed.starts_with('[') {
        let raw: Vec<Vec<[f64; 2]>> = serde_json::from_str(trimmed)
            .map_err(|e| CliError::input(format!("bad --q matrix: {e}")))?;
        if raw.len() != d || raw.iter().any(|row| row.len() != d) {
            return Err(CliError::input(format!("--q matrix must be {d}x{d}")));
        }
        Ok(raw
            .iter()
            .map(|row| row.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
            .collect())
    } else {
        let value = parse_complex_literal(trimmed)?;
        Ok(uniform_q_matrix(d, value))
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {}", err.message);
            err.code
        }
    };
    std::process::exit(code);
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Validate { algebra, common } => cmd_validate(&algebra, &common),
        Command::Spectrum { algebra, common } => cmd_spectrum(&algebra, &common),
        Command::Kernel { algebra, common } => cmd_kernel(&algebra, &common),
        Command::Order { expr, algebra, common } => cmd_order(&expr, &algebra, &common),
        Command::Rep { algebra, common } => cmd_rep(&algebra, &common),
        Command::Audit { algebra, common } => cmd_audit(&algebra, &common),
    }
}

fn cmd_validate(algebra: &AlgebraArgs, common: &CommonArgs) -> Result<i32, CliError> {
    common.check()?;
    let resolved = algebra.resolve(true)?;
    let report = validate(&resolved.coeffs);
    if common.json() {
        println!("{}", serde_json::to_string_pretty(&report).expect("serializable"));
    } else {
        println!("algebra: {}", resolved.descriptor);
        println!(
            "wick symmetry residual  {:.17e} (allowed {:.3e})",
            report.wick_symmetry_residual, report.wick_symmetry_allowed
        );
        println!(
            "T self-adjoint residual {:.17e} (allowed {:.3e})",
            report.t_hermiticity_residual, report.t_hermiticity_allowed
        );
        if report.ok {
            println!("valid");
        } else {
            for v in &report.violations {
                println!("violation: {v}");
            }
        }
    }
    Ok(if report.ok { 0 } else { 1 })
}

fn cmd_spectrum(algebra: &AlgebraArgs, common: &CommonArgs) -> Result<i32, CliError> {
    common.check()?;
    let resolved = algebra.resolve(false)?;
    let rows = gram_spectra(&resolved.coeffs, common.max_degree, &common.build_options())?;
    let any_indefinite = rows.iter().any(|r| {
        r.verdict.class == wick::operators::PositivityClass::Indefinite
    });
    if common.json() {
        #[derive(Serialize)]
        struct Out<'a> {
            algebra: &'a str,
            max_degree: usize,
            degrees: &'a [wick::fock::SpectrumRow],
            any_indefinite: bool,
        }
        let out = Out {
            algebra: &resolved.descriptor,
            max_degree: common.max_degree,
            degrees: &rows,
            any_indefinite,
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("algebra: {}", resolved.descriptor);
        for row in &rows {
            println!(
                "P_{:<2} dim {:>6}  {:<22} min eig {:.17e}  kernel dim {}",
                row.degree,
                row.dim,
                row.verdict.class.to_string(),
                row.verdict.min_eigenvalue,
                row.verdict.kernel_dim
            );
            let evals: Vec<String> = row.eigenvalues.iter().map(|l| format!("{l:.12}")).collect();
            println!("     eigenvalues: [{}]", evals.join(", "));
        }
    }
    Ok(if any_indefinite { 1 } else { 0 })
}

fn cmd_kernel(algebra: &AlgebraArgs, common: &CommonArgs) -> Result<i32, CliError> {
    common.check()?;
    let resolved = algebra.resolve(false)?;
    let section = audit_kernel(&resolved.coeffs, common.max_degree, &common.audit_options())?;
    if common.json() {
        println!("{}", serde_json::to_string_pretty(&section).expect("serializable"));
    } else {
        println!("algebra: {}", resolved.descriptor);
        println!(
            "kernel-structure hypothesis ({}) applicable: {}",
            section.theorem.hypothesis, section.theorem.applicable
        );
        if section.rows.iter().all(|r| r.observed_dim == 0) {
            println!("kernel trivial at all degrees <= {}", common.max_degree);
        }
        for row in &section.rows {
            println!(
                "degree {}: observed dim {} predicted dim {} distance {:.17e} ({})",
                row.degree,
                row.observed_dim,
                row.predicted_dim,
                row.distance,
                if row.equal { "equal" } else { "DIFFER" }
            );
        }
        for g in &section.degree2_generators {
            println!("degree-2 generator: {g}");
        }
    }
    Ok(if section.theorem.consistent { 0 } else { 1 })
}

fn cmd_order(expr: &str, algebra: &AlgebraArgs, common: &CommonArgs) -> Result<i32, CliError> {
    common.check()?;
    let resolved = algebra.resolve(false)?;
    let parsed = parse_expr(expr, resolved.coeffs.d())?;
    let ordered = wick_order(&parsed, &resolved.coeffs);
    if common.json() {
        #[derive(Serialize)]
        struct Out {
            input: String,
            normal_ordered: String,
            terms: usize,
        }
        let out = Out {
            input: expr.to_string(),
            normal_ordered: ordered.to_string(),
            terms: ordered.num_terms(),
        };
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("{ordered}");
    }
    Ok(0)
}

#[derive(Serialize)]
struct RepOutput {
    algebra: String,
    max_degree: usize,
    quotient_dims: Vec<usize>,
    adjoint_residual: f64,
    relation_residual: f64,
    kernel_covariance_residual: f64,
    norm_growth: NormGrowth,
}

fn cmd_rep(algebra: &AlgebraArgs, common: &CommonArgs) -> Result<i32, CliError> {
    common.check()?;
    let resolved = algebra.resolve(false)?;
    let trunc = FockTruncation::build(&resolved.coeffs, common.max_degree, &common.build_options())?;
    if let Some(degree) = trunc.first_indefinite() {
        let min = trunc.degree(degree).map(|g| g.verdict.min_eigenvalue).unwrap_or(f64::NAN);
        if common.json() {
            println!(
                "{}",
                serde_json::json!({
                    "algebra": resolved.descriptor,
                    "indefinite_degree": degree,
                    "min_eigenvalue": min,
                })
            );
        } else {
            println!(
                "Gram operator indefinite at degree {degree} (min eigenvalue {min:.17e}); \
                 representation refused"
            );
        }
        return Ok(1);
    }
    let rep = build_rep(&trunc)?;
    let adjoint_residual = verify_adjoint(&trunc, &rep);
    let relation_residual = verify_relations(&trunc, &rep, &resolved.coeffs);
    let growth = norm_growth(&trunc, &rep);
    let out = RepOutput {
        algebra: resolved.descriptor,
        max_degree: common.max_degree,
        quotient_dims: rep.quotient_dims.clone(),
        adjoint_residual,
        relation_residual,
        kernel_covariance_residual: rep.kernel_covariance_residual,
        norm_growth: growth,
    };
    if common.json() {
        println!("{}", serde_json::to_string_pretty(&out).expect("serializable"));
    } else {
        println!("algebra: {}", out.algebra);
        println!("quotient dims per degree: {:?}", out.quotient_dims);
        println!("adjointness residual:       {:.17e}", out.adjoint_residual);
        println!("relation residual:          {:.17e}", out.relation_residual);
        println!("kernel covariance residual: {:.17e}", out.kernel_covariance_residual);
        let norms: Vec<String> = out
            .norm_growth
            .per_degree
            .iter()
            .map(|x| format!("{x:.12}"))
            .collect();
        println!(
            "creation norms per degree: [{}] ({})",
            norms.join(", "),
            if out.norm_growth.growing { "growing" } else { "bounded-looking" }
        );
    }
    let ok = adjoint_residual < 1e-10 && relation_residual < 1e-8;
    Ok(if ok { 0 } else { 1 })
}

fn cmd_audit(algebra: &AlgebraArgs, common: &CommonArgs) -> Result<i32, CliError> {
    common.check()?;
    let resolved = algebra.resolve(false)?;
    let report = audit_all(
        &resolved.coeffs,
        &resolved.descriptor,
        common.max_degree,
        &common.audit_options(),
    )?;
    if common.json() {
        println!("{}", report.to_json());
    } else {
        print!("{}", report.render_text());
    }
    Ok(if report.alarm_count() == 0 { 0 } else { 1 })
}
