//! `homsense` — exact certifiers and the brute-force oracle on the command
//! line. JSON in, JSON or CSV out; exit codes: 0 certified/success, 2
//! undecided, 3 refuted or violations found, 1 usage or input error.

mod io;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use homsense_core::certify::{
    certify_prop4, certify_prop5, certify_thm1, certify_thm2, SignMode, Verdict,
};
use homsense_core::construct::{construct_boundary, construct_general, construct_half};
use homsense_core::permcodim::{codim_account, theorem2_bound};
use homsense_core::sensing::{
    exhaustive_oracle, random_subspace, OracleOptions, SensingInstance, TransformClass,
    DEFAULT_BUDGET,
};
use homsense_core::structure::{geometric_multiplicities, invariant_factors};
use std::path::{Path, PathBuf};

/// Sign-pattern pairs sampled per oracle run when the class is signed.
const SIGN_SAMPLES: usize = 16;

#[derive(Parser)]
#[command(
    name = "homsense",
    version,
    about = "Exact uniqueness certificates for subsampled, shuffled, and signed linear views"
)]
struct Cli {
    /// Worker threads for enumeration (default: available parallelism).
    /// Output is identical regardless of this setting.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum CertifyMode {
    Prop5,
    Thm1,
    Thm2,
    Prop4,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConstructMode {
    Boundary,
    Half,
    General,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Perm,
    SignedPerm,
    ProjPerm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Certify a uniqueness condition for the given transformations.
    Certify {
        #[arg(long, value_enum)]
        mode: CertifyMode,
        /// Matrix document (prop5), pair document (thm1, prop4), or
        /// permutation-class document (thm2).
        #[arg(long)]
        input: PathBuf,
        /// Subspace dimension the claim quantifies over.
        #[arg(long)]
        n: usize,
        /// Seed for the sampled-section route (thm1).
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Invariant factors and eigenvalue multiplicities of a matrix.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an explicit witness subspace V with dim(V + T V) = 2n.
    Construct {
        #[arg(long, value_enum)]
        mode: ConstructMode,
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exhaustive collision oracle over a transformation class.
    Oracle {
        /// Pair document for the endo-pair class; omit for permutation
        /// classes given by flags.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        /// Subspace dimension.
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum)]
        class: Option<ClassArg>,
        /// Minimum projection rank on the first side (default n).
        #[arg(long)]
        r1: Option<usize>,
        /// Minimum projection rank on the second side (default 2n).
        #[arg(long)]
        r2: Option<usize>,
        /// Number of sampled subspaces.
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Entry bound for sampled subspaces.
        #[arg(long, default_value_t = 100)]
        bound: i64,
        /// Maximum number of collision solves per run.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Codimension account for a signed permutation and two projections.
    Bound {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        // ignore failure: the pool can only be configured once
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match run(cli.command) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn read_input(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn verdict_code(v: Verdict) -> i32 {
    match v {
        Verdict::Certified => 0,
        Verdict::Undecided => 2,
        Verdict::Refuted => 3,
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Certify {
            mode,
            input,
            n,
            seed,
            out,
        } => {
            let text = read_input(&input)?;
            let cert = match mode {
                CertifyMode::Prop5 => {
                    let t = io::parse_matrix_json(&text)?;
                    certify_prop5(&t, n)?
                }
                CertifyMode::Thm1 => {
                    let (t1, t2) = io::parse_pair_json(&text)?;
                    certify_thm1(&t1, &t2, n, seed)?
                }
                CertifyMode::Thm2 => {
                    let (pi1, pi2, rho1, rho2) = io::parse_perm_class_json(&text)?;
                    certify_thm2(&pi1, &pi2, &rho1, &rho2, n)?
                }
                CertifyMode::Prop4 => {
                    let (t1, t2) = io::parse_pair_json(&text)?;
                    certify_prop4(&t1, &t2, n)?
                }
            };
            emit(&io::certificate_to_json(&cert), out.as_deref())?;
            Ok(verdict_code(cert.verdict))
        }
        Command::Decompose { input, format, out } => {
            let t = io::parse_matrix_json(&read_input(&input)?)?;
            let data = invariant_factors(&t)?;
            let report = geometric_multiplicities(&t)?;
            let text = match format {
                Format::Json => io::structure_to_json(&data, &report.entries),
                Format::Csv => io::multiplicities_to_csv(&report.entries),
            };
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Construct {
            mode,
            input,
            n,
            out,
        } => {
            let t = io::parse_matrix_json(&read_input(&input)?)?;
            let (label, witness) = match mode {
                ConstructMode::Boundary => ("boundary", construct_boundary(&t, n)?),
                ConstructMode::Half => ("half", construct_half(&t, n)?),
                ConstructMode::General => ("general", construct_general(&t, n)?),
            };
            emit(
                &io::witness_to_json(label, &witness.basis, witness.certificate_rank),
                out.as_deref(),
            )?;
            Ok(0)
        }
        Command::Oracle {
            input,
            m,
            n,
            class,
            r1,
            r2,
            trials,
            seed,
            bound,
            budget,
            format,
            out,
        } => {
            let budget = budget.unwrap_or(DEFAULT_BUDGET);
            let (m, class_spec, sign_mode, label) = match (&input, class) {
                (Some(path), None) => {
                    let (t1, t2) = io::parse_pair_json(&read_input(path)?)?;
                    let m = t1.rows();
                    (m, TransformClass::EndoPair { t1, t2 }, SignMode::Plain, "endo_pair")
                }
                (None, Some(class)) => {
                    let m = m.context("--m is required for permutation classes")?;
                    match class {
                        ClassArg::Perm => (m, TransformClass::Perm, SignMode::Plain, "perm"),
                        ClassArg::SignedPerm => match (r1, r2) {
                            (None, None) => {
                                (m, TransformClass::SignedPerm, SignMode::PlusMinus, "signed_perm")
                            }
                            _ => (
                                m,
                                TransformClass::ProjPerm {
                                    r1: r1.unwrap_or(n),
                                    r2: r2.unwrap_or(2 * n),
                                },
                                SignMode::PlusMinus,
                                "signed_proj_perm",
                            ),
                        },
                        ClassArg::ProjPerm => (
                            m,
                            TransformClass::ProjPerm {
                                r1: r1.unwrap_or(n),
                                r2: r2.unwrap_or(2 * n),
                            },
                            SignMode::Plain,
                            "proj_perm",
                        ),
                    }
                }
                (Some(_), Some(_)) => bail!("--input and --class are mutually exclusive"),
                (None, None) => bail!("either --input (endo pair) or --class is required"),
            };

            let mut runs: Vec<(u64, u64, Vec<homsense_core::sensing::Violation>)> = Vec::new();
            for t in 0..trials.max(1) as u64 {
                let sub_seed = seed.wrapping_add(t);
                let a = random_subspace(m, n, bound, sub_seed)?;
                let inst = SensingInstance::new(m, n, a, class_spec.clone(), sign_mode)?;
                let report = exhaustive_oracle(
                    &inst,
                    &OracleOptions {
                        budget,
                        sign_samples: SIGN_SAMPLES,
                        seed: sub_seed,
                    },
                )?;
                runs.push((sub_seed, report.pairs_checked, report.violations));
            }
            let run = io::OracleRun {
                class: label.to_string(),
                m,
                n,
                sign_mode,
                trials: runs,
            };
            let text = match format {
                Format::Json => io::oracle_to_json(&run),
                Format::Csv => io::oracle_to_csv(&run),
            };
            emit(&text, out.as_deref())?;
            let any = run.trials.iter().any(|(_, _, v)| !v.is_empty());
            Ok(if any { 3 } else { 0 })
        }
        Command::Bound { input, out } => {
            let (pi, rho1, rho2) = io::parse_bound_json(&read_input(&input)?)?;
            let account = codim_account(&pi, &rho1, &rho2)?;
            let dim = theorem2_bound(&pi, &rho1, &rho2)?;
            emit(
                &io::bound_to_json(pi.size(), rho2.rank(), &account, dim),
                out.as_deref(),
            )?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::io;
    use homsense_core::exactalg::{rat, RationalMatrix};

    #[test]
    fn matrix_parse_reduces_entries() {
        let doc = r#"{"rows":2,"cols":2,"entries":[["3/6","0"],[1,"-4/8"]]}"#;
        let m = io::parse_matrix_json(doc).unwrap();
        assert_eq!(m.at(0, 0), &rat(1, 2));
        assert_eq!(m.at(1, 1), &rat(-1, 2));
    }

    #[test]
    fn matrix_parse_names_the_bad_cell() {
        let doc = r#"{"rows":1,"cols":2,"entries":[["1/0","2"]]}"#;
        let err = io::parse_matrix_json(doc).unwrap_err();
        assert!(format!("{err:#}").contains("entry (0,0)"));

        let ragged = r#"{"rows":2,"cols":2,"entries":[["1","2"],["3"]]}"#;
        let err = io::parse_matrix_json(ragged).unwrap_err();
        assert!(format!("{err}").contains("row 1"));
    }

    #[test]
    fn matrix_roundtrip_is_canonical() {
        let m = RationalMatrix::from_rows(vec![
            vec![rat(1, 2), rat(-3, 1)],
            vec![rat(0, 1), rat(7, 5)],
        ])
        .unwrap();
        let text = io::matrix_to_json(&m);
        let back = io::parse_matrix_json(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(io::matrix_to_json(&back), text);
    }

    #[test]
    fn schema_tag_is_validated() {
        let doc = r#"{"schema":"other/v9","rows":1,"cols":1,"entries":[["1"]]}"#;
        assert!(io::parse_matrix_json(doc).is_err());
    }
}
