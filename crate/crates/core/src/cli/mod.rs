//! The `ltk` command line: one subcommand per pipeline, JSON on stdout or in
//! `--out`, and a provenance block on every output.
//!
//! Exit codes: 0 on success, 2 when precision or a degree cap runs out,
//! 1 for usage and input errors.

mod commands;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::lubin_tate::{FormalGroup, Variant};
use crate::padic::{RingElem, RingSpec};

/// Environment variable that overrides every degree cap.
pub const CAP_ENV: &str = "LTK_CAP_OVERRIDE";

#[derive(Parser, Debug)]
#[command(name = "ltk", version, about = "Lubin-Tate groups, Coleman series and p-adic measures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RingArg {
    Zp,
    Ram,
    Unram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Default,
    Multiplicative,
}

/// Ring, cap and output flags shared by the algebraic subcommands.
#[derive(Args, Clone, Debug, Serialize)]
pub struct Common {
    #[arg(long, default_value_t = 3)]
    pub p: u64,
    /// Working precision: residues modulo p^prec.
    #[arg(long, default_value_t = 8)]
    pub prec: u32,
    /// Degree cap D of truncated series.
    #[arg(long, default_value_t = 32)]
    pub deg: usize,
    #[arg(long, value_enum, default_value_t = RingArg::Ram)]
    pub ring: RingArg,
    /// Eisenstein constant of the ramified ring; defaults to -p.
    #[arg(long, allow_hyphen_values = true)]
    pub pi_sq: Option<i64>,
    #[arg(long, value_enum, default_value_t = VariantArg::Default)]
    pub variant: VariantArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// The formal group: f = [pi], q and the invariant differential.
    Group(Common),
    /// The omega polynomials and the factorization check.
    Omega {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        n: u32,
    },
    /// The norm operator on a random or given unit series, by both methods.
    NormOp {
        #[command(flatten)]
        common: Common,
        /// Series file; a seeded random unit series otherwise.
        #[arg(long)]
        series: Option<PathBuf>,
    },
    /// Distinguished factors and valuations of the torsion tower.
    Tower {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        depth: u32,
    },
    /// Point masses and measure files: cosets, moments, restriction, twists.
    #[command(subcommand)]
    Measure(MeasureCmd),
    /// Compatible systems, their Coleman series and the measure mu^0.
    #[command(subcommand)]
    Coleman(ColemanCmd),
    /// The characteristic ideal of a presentation matrix.
    Char {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Complex theta and psi functions of lattices.
    #[command(subcommand)]
    Elliptic(EllipticCmd),
}

/// A measure from a file, or a point mass at the given coordinates.
#[derive(Args, Clone, Debug, Serialize)]
pub struct MeasureSource {
    #[command(flatten)]
    pub common: Common,
    /// Point mass at `a`, coordinates separated by commas.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "measure")]
    pub dirac: Option<String>,
    /// Measure file (amice series, tag, denominator).
    #[arg(long)]
    pub measure: Option<PathBuf>,
    /// Put the point mass on the units.
    #[arg(long)]
    pub units: bool,
}

#[derive(Subcommand, Debug)]
pub enum MeasureCmd {
    /// Masses of all unit cosets, or of one coset `delta U_n`.
    Coset {
        #[command(flatten)]
        src: MeasureSource,
        #[arg(long, default_value_t = 1)]
        level: u32,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
    },
    /// The k-th moment.
    Moment {
        #[command(flatten)]
        src: MeasureSource,
        #[arg(long)]
        k: usize,
    },
    /// Restriction to the units.
    Tilde {
        #[command(flatten)]
        src: MeasureSource,
    },
    /// Integral of chi(x) x^k against a Teichmuller-power character.
    Twist {
        #[command(flatten)]
        src: MeasureSource,
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Exponent i of the character omega^i.
        #[arg(long, default_value_t = 1)]
        teich: u64,
    },
}

#[derive(Subcommand, Debug)]
pub enum ColemanCmd {
    /// Writes a compatible system: Teichmuller constants, or the values of a
    /// norm-operator fixed point.
    System {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 2)]
        depth: u32,
        /// Constant system at the Teichmuller lift of this element.
        #[arg(long, allow_hyphen_values = true)]
        teichmuller: Option<String>,
        /// Digits for the fixed point.
        #[arg(long, default_value_t = 4)]
        digits: u32,
    },
    /// The Coleman series of a system.
    Interpolate {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// The measure mu^0 of a system.
    Mu0 {
        #[arg(long)]
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Lattice and point flags; complex numbers are `re,im`.
#[derive(Args, Clone, Debug, Serialize)]
pub struct EllipticArgs {
    /// `re1,im1,re2,im2` for w1, w2 with Im(w1/w2) > 0.
    #[arg(long, allow_hyphen_values = true)]
    pub lattice: String,
    #[arg(long, allow_hyphen_values = true)]
    pub z: String,
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum EllipticCmd {
    /// theta(z, L) = Delta(L) exp(-6 eta(z, L) z) sigma(z, L)^12, with sigma and Delta.
    Theta(EllipticArgs),
    /// psi(z; L, L') for a sublattice L of index prime to 6, with delta(L, L').
    Psi {
        #[command(flatten)]
        args: EllipticArgs,
        /// `re1,im1,re2,im2` for the basis of the sublattice L inside the lattice.
        #[arg(long, allow_hyphen_values = true)]
        sublattice: String,
    },
}

/// The validated configuration of one job.
#[derive(Clone, Debug)]
pub struct JobConfig {
    pub spec: RingSpec,
    pub cap: usize,
    pub cap_from_env: bool,
    pub variant: Variant,
    pub seed: u64,
}

impl Common {
    /// Validates the ring flags and applies `LTK_CAP_OVERRIDE`.
    pub fn config(&self) -> Result<JobConfig> {
        if self.prec == 0 {
            return Err(Error::Domain("--prec must be positive".into()));
        }
        let spec = match self.ring {
            RingArg::Zp => RingSpec::zp(self.p, self.prec)?,
            RingArg::Ram => RingSpec::ramified(self.p, self.prec, self.pi_sq.unwrap_or(-(self.p as i64)))?,
            RingArg::Unram => RingSpec::unramified(self.p, self.prec)?,
        };
        let (cap, cap_from_env) = match std::env::var(CAP_ENV) {
            Ok(v) => (v.trim().parse().map_err(|_| Error::Domain(format!("{CAP_ENV}={v} is not a degree")))?, true),
            Err(_) => (self.deg, false),
        };
        if cap < 2 {
            return Err(Error::Domain("the degree cap must be at least 2".into()));
        }
        let variant = match self.variant {
            VariantArg::Default => Variant::Default,
            VariantArg::Multiplicative => Variant::Multiplicative,
        };
        Ok(JobConfig { spec, cap, cap_from_env, variant, seed: self.seed })
    }
}

impl JobConfig {
    pub fn group(&self, cap: usize) -> Result<FormalGroup> {
        match self.variant {
            Variant::Default => FormalGroup::default_for(&self.spec, cap),
            Variant::Multiplicative => FormalGroup::multiplicative(&self.spec, cap),
        }
    }

    pub fn elem(&self, s: &str) -> Result<RingElem> {
        parse_elem(&self.spec, s)
    }
}

/// Reads `a` or `a,b` (meaning `a + b pi` or `a + b sqrt`); missing
/// coordinates are zero.
pub fn parse_elem(spec: &RingSpec, s: &str) -> Result<RingElem> {
    let coords: std::result::Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
    let mut coords = coords.map_err(|_| Error::Domain(format!("cannot read ring element {s:?}")))?;
    let n = if spec.has_quad() { 2 } else { 1 };
    if coords.len() < n {
        coords.resize(n, 0);
    }
    spec.from_coords(&coords)
}

/// An element in exact residue form with its precision and valuation.
pub fn elem_json(x: &RingElem) -> Value {
    json!({ "coords": x.coords(), "prec": x.prec(), "valuation": x.valuation().to_string() })
}

/// What a command hands back: its result, the caps it used, and the
/// precision it achieved.
pub struct Output {
    pub result: Value,
    pub caps: Value,
    pub achieved: Value,
}

/// Runs the tool on `args` (program name first), writing JSON to stdout or
/// `--out`, diagnostics to stderr, and returning the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (name, out_path) = describe(&cli.command);
    match commands::dispatch(&cli.command) {
        Ok((inputs, out)) => {
            let doc = json!({
                "command": name,
                "result": out.result,
                "provenance": {
                    "inputs_sha256": hex::encode(Sha256::digest(inputs.as_bytes())),
                    "caps": out.caps,
                    "achieved_precision": out.achieved,
                    "version": env!("CARGO_PKG_VERSION"),
                },
            });
            let text = serde_json::to_string_pretty(&doc).expect("JSON values serialize");
            match out_path {
                Some(p) => {
                    if let Err(e) = std::fs::write(&p, text + "\n") {
                        eprintln!("ltk: cannot write {}: {e}", p.display());
                        return 1;
                    }
                }
                // A closed pipe (`ltk ... | head`) is not an error.
                None => {
                    let _ = writeln!(std::io::stdout(), "{text}");
                }
            }
            0
        }
        Err(e) => {
            eprintln!("ltk {name}: {e}");
            if e.is_precision() {
                2
            } else {
                1
            }
        }
    }
}

fn describe(c: &Command) -> (&'static str, Option<PathBuf>) {
    match c {
        Command::Group(x) => ("group", x.out.clone()),
        Command::Omega { common, .. } => ("omega", common.out.clone()),
        Command::NormOp { common, .. } => ("norm-op", common.out.clone()),
        Command::Tower { common, .. } => ("tower", common.out.clone()),
        Command::Measure(m) => match m {
            MeasureCmd::Coset { src, .. } => ("measure coset", src.common.out.clone()),
            MeasureCmd::Moment { src, .. } => ("measure moment", src.common.out.clone()),
            MeasureCmd::Tilde { src } => ("measure tilde", src.common.out.clone()),
            MeasureCmd::Twist { src, .. } => ("measure twist", src.common.out.clone()),
        },
        Command::Coleman(c) => match c {
            ColemanCmd::System { common, .. } => ("coleman system", common.out.clone()),
            ColemanCmd::Interpolate { out, .. } => ("coleman interpolate", out.clone()),
            ColemanCmd::Mu0 { out, .. } => ("coleman mu0", out.clone()),
        },
        Command::Char { out, .. } => ("char", out.clone()),
        Command::Elliptic(e) => match e {
            EllipticCmd::Theta(a) => ("elliptic theta", a.out.clone()),
            EllipticCmd::Psi { args, .. } => ("elliptic psi", args.out.clone()),
        },
    }
}
