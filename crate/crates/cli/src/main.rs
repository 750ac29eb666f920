use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use spinamp::{ExpMethod, KickConvention, MapOrder, Mode, Scheme, TargetState};

use spinamp_cli::config::RunConfig;
use spinamp_cli::error::CliError;
use spinamp_cli::{commands, verify};

/// Spin-amplifier measurement protocols on an exact statevector simulator.
///
/// Exit codes: 0 success, 1 invalid configuration, 2 computation error,
/// 3 verification failure.
#[derive(Parser)]
#[command(name = "spinamp", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol at one size and write its trace.
    Run(RunArgs),
    /// Random-map runs over several sizes with an r_star vs log2 N fit.
    Sweep(RunArgs),
    /// Run the built-in identity suite.
    Verify {
        /// Test the rotated-dipolar identity with the wrong prefactor 3/8;
        /// the suite must fail.
        #[arg(long)]
        negative_control: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    CnotChain,
    CatGate,
    CatNq,
    RandomMap,
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetArg {
    #[value(name = "0")]
    Zero,
    #[value(name = "1")]
    One,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Full,
    Reduced,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    DipolarFirst,
    KickFirst,
}

#[derive(Clone, Copy, ValueEnum)]
enum KickArg {
    Projector,
    PauliSum,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Auto,
    Dense,
    Krylov,
}

/// Every flag overrides the matching field of `--config` (or the default).
#[derive(Args)]
struct RunArgs {
    /// JSON config, or the metadata file of an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    scheme: Option<SchemeArg>,
    /// Amplifier size(s), comma separated for sweep.
    #[arg(long, value_delimiter = ',')]
    n: Option<Vec<usize>>,
    #[arg(long, value_enum)]
    target: Option<TargetArg>,
    /// Explicit target qubit, or the target as a classical branch.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Amplifier spin coupled to the target.
    #[arg(long)]
    first_spin: Option<usize>,
    /// Conditional kick time t·b12.
    #[arg(long)]
    t_pert: Option<f64>,
    /// Free dipolar evolution time T·b12.
    #[arg(long)]
    t_free: Option<f64>,
    /// Repetitions of the random map.
    #[arg(long)]
    rmax: Option<usize>,
    /// Contrast level defining r_star.
    #[arg(long)]
    threshold: Option<f64>,
    /// Nearest-neighbour coupling b12.
    #[arg(long)]
    b0: Option<f64>,
    /// Couplings decay as 1/|i-j|^p; `inf` keeps nearest neighbours only.
    #[arg(long)]
    decay_exponent: Option<f64>,
    #[arg(long, value_enum)]
    map_order: Option<OrderArg>,
    /// Normalization of the raising operators in the kick.
    #[arg(long, value_enum)]
    kick_convention: Option<KickArg>,
    #[arg(long, value_enum)]
    method: Option<MethodArg>,
    /// Krylov error tolerance.
    #[arg(long)]
    tolerance: Option<f64>,
    #[arg(long)]
    krylov_dim: Option<usize>,
    /// Largest dimension handled by dense diagonalization.
    #[arg(long)]
    dense_cap: Option<usize>,
    /// Output directory [default: $SPINAMP_OUT_DIR, else ./spinamp-out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// File stem for the artifacts.
    #[arg(long)]
    name: Option<String>,
    /// Also write a matplotlib script.
    #[arg(long)]
    plot: bool,
}

impl RunArgs {
    fn resolve(self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(s) = self.scheme {
            c.scheme = match s {
                SchemeArg::CnotChain => Scheme::CnotChain,
                SchemeArg::CatGate => Scheme::CatGate,
                SchemeArg::CatNq => Scheme::CatNq,
                SchemeArg::RandomMap => Scheme::RandomMap,
            };
        }
        if let Some(n) = self.n {
            c.n = n;
        }
        if let Some(t) = self.target {
            c.target = match t {
                TargetArg::Zero => TargetState::Zero,
                TargetArg::One => TargetState::One,
            };
        }
        if let Some(m) = self.mode {
            c.mode = match m {
                ModeArg::Full => Mode::Full,
                ModeArg::Reduced => Mode::Reduced,
            };
        }
        if let Some(v) = self.first_spin {
            c.first_spin = v;
        }
        if let Some(v) = self.t_pert {
            c.t_pert = v;
        }
        if let Some(v) = self.t_free {
            c.t_free = v;
        }
        if let Some(v) = self.rmax {
            c.r_max = v;
        }
        if let Some(v) = self.threshold {
            c.threshold = v;
        }
        if let Some(v) = self.b0 {
            c.b0 = v;
        }
        if let Some(p) = self.decay_exponent {
            c.decay_exponent = if p == f64::INFINITY { None } else { Some(p) };
        }
        if let Some(o) = self.map_order {
            c.map_order = match o {
                OrderArg::DipolarFirst => MapOrder::DipolarFirst,
                OrderArg::KickFirst => MapOrder::KickFirst,
            };
        }
        if let Some(k) = self.kick_convention {
            c.kick_convention = match k {
                KickArg::Projector => KickConvention::Projector,
                KickArg::PauliSum => KickConvention::PauliSum,
            };
        }
        if let Some(m) = self.method {
            c.exp.method = match m {
                MethodArg::Auto => ExpMethod::Auto,
                MethodArg::Dense => ExpMethod::DenseEig,
                MethodArg::Krylov => ExpMethod::Krylov,
            };
        }
        if let Some(v) = self.tolerance {
            c.exp.tolerance = v;
        }
        if let Some(v) = self.krylov_dim {
            c.exp.krylov_dim = v;
        }
        if let Some(v) = self.dense_cap {
            c.exp.dense_cap = v;
        }
        if self.out.is_some() {
            c.output_dir = self.out;
        }
        if self.name.is_some() {
            c.name = self.name;
        }
        c.plot |= self.plot;
        Ok(c)
    }
}

fn dispatch(command: Command) -> Result<(), CliError> {
    match command {
        Command::Run(args) => commands::cmd_run(args.resolve()?),
        Command::Sweep(args) => commands::cmd_sweep(args.resolve()?),
        Command::Verify { negative_control } => verify::cmd_verify(negative_control),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
