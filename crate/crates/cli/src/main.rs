//! Command-line workbench: curve-spec ingestion, counting and zeta
//! experiments, Jacobian structure probes, divisor lattices, and the
//! unit-group embedding recovery engine. Reports go to stdout as JSON with
//! insertion-ordered keys and decimal-string integers; diagnostics go to
//! stderr. Exit codes: 0 success, 1 verified rejection or failed
//! verification, 2 parse/validation/budget errors.

use std::process::ExitCode;

use anabelia::commands;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "anabelia")]
#[command(about = "exact-arithmetic workbench for curves over finite fields")]
struct Cli {
    /// Suppress the timings block (reports become byte-reproducible).
    #[arg(long, global = true)]
    no_timings: bool,

    /// Number of worker threads for partitionable enumerations.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit the zeta numerator of a hyperelliptic curve and audit it.
    Zeta {
        /// Curve spec file.
        #[arg(long)]
        curve: std::path::PathBuf,
    },

    /// Count points over an extension field.
    Count {
        #[arg(long)]
        curve: std::path::PathBuf,
        /// Extension degree.
        #[arg(long, short)]
        m: usize,
    },

    /// Count points whose residue field is exactly the degree-N extension
    /// (Mobius inversion, cross-checked against direct classification).
    ResidueCount {
        #[arg(long)]
        curve: std::path::PathBuf,
        #[arg(long, short = 'N')]
        n: usize,
    },

    /// Jacobian order, group structure, and r-primary exponent.
    Jacobian {
        #[arg(long)]
        curve: std::path::PathBuf,
        /// Prime whose primary exponent to compute.
        #[arg(long)]
        r: Option<u64>,
    },

    /// All point pairs whose difference class has order supported on sigma.
    TorsionProbe {
        #[arg(long)]
        curve: std::path::PathBuf,
        #[arg(long, short, default_value_t = 1)]
        m: usize,
        /// Comma-separated prime list, e.g. "2" or "2,3".
        #[arg(long)]
        sigma: String,
    },

    /// Basis of the lattice of principal divisors supported on given sites.
    Lattice {
        #[arg(long)]
        curve: std::path::PathBuf,
        /// Semicolon-separated sites: "inf", a rational code like "2", a
        /// bracketed monic polynomial "[2,0,1]" (rational model), or "x:y"
        /// point coordinates (hyperelliptic model).
        #[arg(long)]
        sites: String,
    },

    /// The divisor-class exact-sequence computation.
    ClassSequence {
        #[arg(long)]
        curve: std::path::PathBuf,
        #[arg(long)]
        sigma: String,
        /// Exceptional sites, same syntax as --sites (may be empty).
        #[arg(long, default_value = "")]
        exceptional: String,
        /// Degree cap for class-map generation.
        #[arg(long, default_value_t = 2)]
        gen_cap: usize,
    },

    /// Run the embedding recovery engine against a fixture oracle.
    Recover {
        /// Base field order q (a prime power).
        #[arg(long)]
        field: u64,
        /// identity | mobius | random | value-twist | order-scramble |
        /// nonadditive-constants
        #[arg(long)]
        oracle: String,
        /// Coordinate map entries "a,b,c,d" (codes) for --oracle mobius.
        #[arg(long)]
        mobius: Option<String>,
        /// Constant-field Frobenius power of tau.
        #[arg(long, default_value_t = 0)]
        const_frob: usize,
        /// Global Frobenius twist s (the oracle is tau^(p^s)).
        #[arg(long, short, default_value_t = 0)]
        s: u32,
        /// Tower prime.
        #[arg(long, default_value_t = 2)]
        ell: u64,
        /// Number of exceptional places drawn for random fixtures.
        #[arg(long, default_value_t = 0)]
        e_size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Verification trial count.
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Tower level cap for the pigeonhole.
        #[arg(long, default_value_t = 4)]
        level_cap: usize,
        /// Nonzero values shuffle the translate enumeration order.
        #[arg(long, default_value_t = 0)]
        alpha_seed: u64,
    },

    /// Run the built-in invariant battery.
    Selftest,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = commands::GlobalOpts { no_timings: cli.no_timings, threads: cli.threads.max(1) };
    let outcome = match cli.command {
        Command::Zeta { curve } => commands::zeta(&curve, &opts),
        Command::Count { curve, m } => commands::count(&curve, m, &opts),
        Command::ResidueCount { curve, n } => commands::residue_count(&curve, n, &opts),
        Command::Jacobian { curve, r } => commands::jacobian(&curve, r, &opts),
        Command::TorsionProbe { curve, m, sigma } => {
            commands::torsion_probe(&curve, m, &sigma, &opts)
        }
        Command::Lattice { curve, sites } => commands::lattice(&curve, &sites, &opts),
        Command::ClassSequence { curve, sigma, exceptional, gen_cap } => {
            commands::class_sequence(&curve, &sigma, &exceptional, gen_cap, &opts)
        }
        Command::Recover {
            field,
            oracle,
            mobius,
            const_frob,
            s,
            ell,
            e_size,
            seed,
            trials,
            level_cap,
            alpha_seed,
        } => commands::recover(
            commands::RecoverArgs {
                field,
                oracle,
                mobius,
                const_frob,
                s,
                ell,
                e_size,
                seed,
                trials,
                level_cap,
                alpha_seed,
            },
            &opts,
        ),
        Command::Selftest => commands::selftest(&opts),
    };
    match outcome {
        Ok(report) => {
            let code = if report.passed() { 0 } else { 1 };
            print!("{}", report.render());
            ExitCode::from(code)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}
