//! The `sbc` command line: generate, solve, verify, oracle and experiment.
//!
//! Exit codes: 0 success or equilibrium holds, 1 verification fails, 2 input
//! error, 3 resource cap.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::dynamics::{self, DynamicsError, MigrationTrace};
use crate::equilibria::{verify, verify_fne3, verify_sne, EquilibriumKind, Verdict};
use crate::format::decimal;
use crate::generators::{self, GenError};
use crate::io::{self, IoError, PartitionFile};
use crate::model::{social_welfare, Instance, ModelError, Partition, Size};
use crate::oracle::{self, OracleError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILS: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_CAP: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "sbc", version, about = "Selfish bin covering: equilibria, dynamics and exhaustive checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a family, reduction or random instance.
    Generate {
        #[arg(long, value_enum)]
        family: Family,
        #[arg(long)]
        n: Option<usize>,
        /// Partition-problem entries for the reductions, comma separated.
        #[arg(long, value_delimiter = ',')]
        e: Vec<Size>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest item size for random instances.
        #[arg(long, default_value_t = 100)]
        max_size: Size,
        /// Directory for instance.json (plus equilibrium.json and optimum.json
        /// for the ratio families). Prints one JSON document when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a construction or dynamics and report all six verdicts.
    Solve {
        #[arg(long, value_enum)]
        method: Method,
        #[arg(long)]
        instance: PathBuf,
        /// Start partition; first-fit decreasing when absent.
        #[arg(long)]
        partition: Option<PathBuf>,
        /// Directory for partition.json and trace.json.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        max_iterations: Option<usize>,
    },
    /// Check one equilibrium notion.
    Verify {
        #[arg(long)]
        kind: EquilibriumKind,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        partition: PathBuf,
    },
    /// Enumerate all partitions of a small instance.
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        /// Comma separated kinds; all six when absent.
        #[arg(long, value_delimiter = ',')]
        kinds: Vec<EquilibriumKind>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        /// Largest item count to enumerate; defaults to SBC_ORACLE_CAP or 12.
        #[arg(long)]
        cap: Option<usize>,
    },
    /// Ratio table of a worst-case family over a range of n.
    Experiment {
        #[arg(long, value_enum)]
        family: RatioFamily,
        /// Inclusive range `lo:hi`.
        #[arg(long)]
        n_range: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Thm3,
    Thm7,
    Thm4,
    Thm6,
    Thm8,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RatioFamily {
    Thm3,
    Thm7,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ffd,
    FfdLpt,
    BrFne1,
    Sne,
    ImproveFne3,
    ImproveMsne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    fn input(message: impl ToString) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.to_string(),
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Self::input(e)
    }
}

impl From<GenError> for Failure {
    fn from(e: GenError) -> Self {
        Self::input(e)
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Self::input(format!("contract violation: {e}"))
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        match e {
            OracleError::OverCap { .. } => Self {
                code: EXIT_CAP,
                message: e.to_string(),
            },
            OracleError::Model(m) => m.into(),
        }
    }
}

impl From<DynamicsError> for Failure {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::Contract(m) => m.into(),
            DynamicsError::BudgetExhausted { iterations, best } => Self {
                code: EXIT_CAP,
                message: format!(
                    "iteration budget of {iterations} exhausted; best partition so far: {}",
                    serde_json::to_string(&PartitionFile::from_partition(&best)).expect("serializes")
                ),
            },
        }
    }
}

/// Output of a successful command.
pub struct Success {
    pub code: u8,
    pub stdout: String,
}

impl Success {
    fn ok(stdout: String) -> Self {
        Self { code: EXIT_OK, stdout }
    }
}

/// Parses `args` (including the program name) and runs the command, writing
/// to the given streams. Returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(s) => {
            let _ = stdout.write_all(s.stdout.as_bytes());
            s.code
        }
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

pub fn execute(command: Command) -> Result<Success, Failure> {
    match command {
        Command::Generate {
            family,
            n,
            e,
            seed,
            max_size,
            out,
        } => generate(family, n, &e, seed, max_size, out),
        Command::Solve {
            method,
            instance,
            partition,
            out,
            max_iterations,
        } => solve(method, instance, partition, out, max_iterations),
        Command::Verify {
            kind,
            instance,
            partition,
        } => verify_cmd(kind, instance, partition),
        Command::Oracle {
            instance,
            kinds,
            format,
            cap,
        } => oracle_cmd(instance, kinds, format, cap),
        Command::Experiment { family, n_range } => experiment(family, &n_range).map(Success::ok),
    }
}

fn generate(
    family: Family,
    n: Option<usize>,
    e: &[Size],
    seed: u64,
    max_size: Size,
    out: Option<PathBuf>,
) -> Result<Success, Failure> {
    let need_n = || n.ok_or_else(|| Failure::input(format!("--n is required for {family:?}").to_lowercase()));
    let need_e = || {
        if e.is_empty() {
            Err(Failure::input("--e is required for the reductions"))
        } else {
            Ok(e)
        }
    };
    let (inst, refs) = match family {
        Family::Thm3 => {
            let (i, eq, opt) = generators::gen_thm3(need_n()?)?;
            (i, Some((eq, opt)))
        }
        Family::Thm7 => {
            let (i, eq, opt) = generators::gen_thm7(need_n()?)?;
            (i, Some((eq, opt)))
        }
        Family::Thm4 => (generators::gen_thm4_reduction(need_e()?)?, None),
        Family::Thm6 => (generators::gen_thm6_reduction(need_e()?)?, None),
        Family::Thm8 => (generators::gen_thm8_reduction(need_e()?)?, None),
        Family::Random => (generators::gen_random(need_n()?, max_size, seed)?, None),
    };
    match out {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|source| IoError::File {
                path: dir.clone(),
                source,
            })?;
            io::write(&dir.join("instance.json"), &io::instance_json(&inst))?;
            if let Some((eq, opt)) = &refs {
                io::write(&dir.join("equilibrium.json"), &io::partition_json(eq))?;
                io::write(&dir.join("optimum.json"), &io::partition_json(opt))?;
            }
            Ok(Success::ok(String::new()))
        }
        None => {
            let mut doc = json!({ "instance": io::InstanceFile::from_instance(&inst) });
            if let Some((eq, opt)) = &refs {
                doc["equilibrium"] = json!(PartitionFile::from_partition(eq));
                doc["optimum"] = json!(PartitionFile::from_partition(opt));
            }
            Ok(Success::ok(io::to_json(&doc)))
        }
    }
}

/// All six verdicts; NE and SNE report a contract violation as a string.
pub fn all_verdicts(p: &Partition, inst: &Instance) -> Value {
    let mut map = serde_json::Map::new();
    for kind in EquilibriumKind::ALL {
        let v = match verify(kind, p, inst) {
            Ok(v) => json!(v),
            Err(e) => json!({ "holds": false, "error": e.to_string() }),
        };
        map.insert(kind.name().to_string(), v);
    }
    Value::Object(map)
}

fn solve(
    method: Method,
    instance: PathBuf,
    partition: Option<PathBuf>,
    out: Option<PathBuf>,
    max_iterations: Option<usize>,
) -> Result<Success, Failure> {
    let inst = io::read_instance(&instance)?;
    let start = match &partition {
        Some(path) => io::read_partition(path, &inst)?,
        None => dynamics::ffd(&inst),
    };
    let mut meta = json!({});
    let (result, trace) = match method {
        Method::Ffd => (dynamics::ffd(&inst), MigrationTrace::new(inst.len())),
        Method::Sne => (dynamics::construct_sne(&inst), MigrationTrace::new(inst.len())),
        Method::FfdLpt => dynamics::ffd_lpt(&start, &inst)?,
        Method::BrFne1 => {
            let (p, trace) = dynamics::best_response_fne1(&start, &inst)?;
            let m = start.num_bins();
            let bound = inst.len() * (m - 1);
            meta = json!({
                "bins": m,
                "steps": trace.len(),
                "step_bound": bound,
                "within_step_bound": trace.len() <= bound,
                "max_moves_per_agent": trace.per_agent_counts.iter().max().copied().unwrap_or(0),
                "within_per_agent_bound": trace.per_agent_counts.iter().all(|&c| c < m),
            });
            (p, trace)
        }
        Method::ImproveFne3 => dynamics::improve_to_fne3(&start, &inst, max_iterations)?,
        Method::ImproveMsne => dynamics::improve_to_msne(&start, &inst, max_iterations)?,
    };
    let doc = json!({
        "method": method.to_possible_value().expect("not skipped").get_name(),
        "partition": PartitionFile::from_partition(&result),
        "welfare": social_welfare(&result, &inst),
        "verdicts": all_verdicts(&result, &inst),
        "metadata": meta,
        "trace": trace,
    });
    if let Some(dir) = out {
        std::fs::create_dir_all(&dir).map_err(|source| IoError::File {
            path: dir.clone(),
            source,
        })?;
        io::write(&dir.join("partition.json"), &io::partition_json(&result))?;
        io::write(&dir.join("trace.json"), &io::to_json(&trace))?;
    }
    Ok(Success::ok(io::to_json(&doc)))
}

fn verify_cmd(kind: EquilibriumKind, instance: PathBuf, partition: PathBuf) -> Result<Success, Failure> {
    let inst = io::read_instance(&instance)?;
    let p = io::read_partition(&partition, &inst)?;
    let verdict: Verdict = verify(kind, &p, &inst)?;
    let mut doc = json!({ "kind": kind.name() });
    doc.as_object_mut()
        .expect("object")
        .extend(json!(verdict).as_object().expect("object").clone());
    Ok(Success {
        code: if verdict.holds { EXIT_OK } else { EXIT_FAILS },
        stdout: io::to_json(&doc),
    })
}

/// `w/opt` unreduced and its decimal, or "undefined".
fn ratio_pair(w: Option<usize>, opt: usize) -> (String, String) {
    match w {
        Some(w) if opt > 0 => (format!("{w}/{opt}"), decimal(w as u64, opt as u64)),
        _ => ("undefined".into(), "undefined".into()),
    }
}

fn oracle_cmd(
    instance: PathBuf,
    kinds: Vec<EquilibriumKind>,
    format: Format,
    cap: Option<usize>,
) -> Result<Success, Failure> {
    let inst = io::read_instance(&instance)?;
    let kinds = if kinds.is_empty() {
        EquilibriumKind::ALL.to_vec()
    } else {
        kinds
    };
    let cap = cap.unwrap_or_else(oracle::cap_from_env);
    let report = oracle::report(&inst, &kinds, cap)?;
    let opt = report.opt_welfare;
    let stdout = match format {
        Format::Json => {
            let kinds: Vec<Value> = report
                .kinds
                .iter()
                .map(|k| {
                    let (poa, poa_dec) = ratio_pair(k.min_welfare, opt);
                    let (pos, pos_dec) = ratio_pair(k.max_welfare, opt);
                    json!({
                        "kind": k.kind.name(),
                        "count": k.count,
                        "min_welfare": k.min_welfare,
                        "max_welfare": k.max_welfare,
                        "poa": poa,
                        "poa_decimal": poa_dec,
                        "pos": pos,
                        "pos_decimal": pos_dec,
                        "examples": k.examples.iter().map(PartitionFile::from_partition).collect::<Vec<_>>(),
                    })
                })
                .collect();
            io::to_json(&json!({ "items": inst.len(), "opt_welfare": opt, "kinds": kinds }))
        }
        Format::Csv => {
            let mut s = String::from("kind,count,min_welfare,max_welfare,opt_welfare,poa,poa_decimal,pos,pos_decimal\n");
            for k in &report.kinds {
                let (poa, poa_dec) = ratio_pair(k.min_welfare, opt);
                let (pos, pos_dec) = ratio_pair(k.max_welfare, opt);
                let show = |w: Option<usize>| w.map_or_else(|| "undefined".to_string(), |w| w.to_string());
                writeln!(
                    s,
                    "{},{},{},{},{opt},{poa},{poa_dec},{pos},{pos_dec}",
                    k.kind.name(),
                    k.count,
                    show(k.min_welfare),
                    show(k.max_welfare)
                )
                .expect("string write");
            }
            s
        }
    };
    Ok(Success::ok(stdout))
}

/// One experiment row: family parameter, shipped equilibrium welfare,
/// analytic optimum and whether both were confirmed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExperimentRow {
    pub n: usize,
    pub equilibrium_welfare: usize,
    pub optimal_welfare: usize,
    pub verified: bool,
}

pub fn parse_range(text: &str) -> Result<(usize, usize), String> {
    let (lo, hi) = text
        .split_once(':')
        .ok_or_else(|| format!("range `{text}` must look like lo:hi"))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("range bound `{s}` is not a non-negative integer"))
    };
    let (lo, hi) = (parse(lo)?, parse(hi)?);
    if lo < 2 {
        return Err(format!("range must start at n >= 2 (got {lo})"));
    }
    if lo > hi {
        return Err(format!("empty range {lo}:{hi}"));
    }
    Ok((lo, hi))
}

/// Checks the shipped equilibrium with its verifier and the optimum by its
/// welfare `2n`. For the first family every optimum bin must be exactly
/// covered, which pins `2n` as an upper bound since `s(N) = 2n·b`.
pub fn experiment_row(family: RatioFamily, n: usize) -> Result<ExperimentRow, GenError> {
    let (inst, eq, opt) = match family {
        RatioFamily::Thm3 => generators::gen_thm3(n)?,
        RatioFamily::Thm7 => generators::gen_thm7(n)?,
    };
    let optimal_welfare = social_welfare(&opt, &inst);
    let eq_ok = match family {
        RatioFamily::Thm3 => verify_fne3(&eq, &inst).holds,
        RatioFamily::Thm7 => verify_sne(&eq, &inst).map(|v| v.holds).unwrap_or(false),
    };
    let opt_ok = optimal_welfare == 2 * n
        && match family {
            RatioFamily::Thm3 => opt.bins().iter().all(|b| inst.is_exactly_covered(b)),
            RatioFamily::Thm7 => opt.bins().iter().all(|b| inst.is_minimal_covered(b)),
        };
    Ok(ExperimentRow {
        n,
        equilibrium_welfare: social_welfare(&eq, &inst),
        optimal_welfare,
        verified: eq_ok && opt_ok,
    })
}

pub fn experiment(family: RatioFamily, n_range: &str) -> Result<String, Failure> {
    let (lo, hi) = parse_range(n_range).map_err(Failure::input)?;
    let mut s = String::from("n,equilibrium_welfare,optimal_welfare,ratio,decimal,verified\n");
    for n in lo..=hi {
        let r = experiment_row(family, n)?;
        writeln!(
            s,
            "{},{},{},{}/{},{},{}",
            r.n,
            r.equilibrium_welfare,
            r.optimal_welfare,
            r.equilibrium_welfare,
            r.optimal_welfare,
            decimal(r.equilibrium_welfare as u64, r.optimal_welfare as u64),
            r.verified
        )
        .expect("string write");
    }
    s.push_str("limit,,,1/2,0.500000,\n");
    Ok(s)
}
