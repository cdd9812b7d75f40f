use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use super::config::{parse_seed_range, Algorithm, ExperimentConfig, InstanceSource};
use super::report::{csv_string, emit_report};
use super::run::run_batch;
use crate::adaptive::Mode;
use crate::error::{Error, Result};
use crate::objectives::{write_instance, GeneratorSpec};

#[derive(Debug, Parser)]
#[command(name = "submax", about = "Adaptive submodular maximization benchmark harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run algorithms on one instance source.
    Run(RunArgs),
    /// Run every `run` line of a config file and write one merged report.
    Batch(BatchArgs),
    /// Write a generated instance to a file.
    Gen(GenArgs),
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[arg(long, conflicts_with = "gen", required_unless_present = "gen")]
    pub instance: Option<PathBuf>,
    /// e.g. `coverage:n=1000,u=5000,density=0.01,wmax=1.0`
    #[arg(long)]
    pub gen: Option<String>,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long = "algo", required = true)]
    pub algorithms: Vec<String>,
    /// Inclusive range `a..b`, or one seed.
    #[arg(long, default_value = "0")]
    pub seeds: String,
    #[arg(long, default_value = "practical")]
    pub mode: String,
    /// Compute the exact optimum and the ratio column.
    #[arg(long)]
    pub opt: bool,
    /// Evaluate each round's queries on the thread pool.
    #[arg(long)]
    pub parallel: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Default, Args)]
pub struct OutputArgs {
    /// CSV report; printed to stdout when omitted.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Directory for `rounds_vs_n.dat` and `ratio_vs_eps.dat`.
    #[arg(long)]
    pub plotdata: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BatchArgs {
    /// One `run ...` invocation per line; `#` starts a comment.
    pub file: PathBuf,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    pub spec: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

impl RunArgs {
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let source = match (&self.instance, &self.gen) {
            (Some(p), None) => InstanceSource::File(p.clone()),
            (None, Some(g)) => InstanceSource::Generator(g.parse()?),
            _ => return Err(Error::Config("exactly one of --instance and --gen is required".into())),
        };
        let config = ExperimentConfig {
            source,
            algorithms: self.algorithms.iter().map(|a| a.parse()).collect::<Result<Vec<Algorithm>>>()?,
            k: self.k,
            eps: self.eps,
            mode: self.mode.parse::<Mode>().map_err(|e| Error::Config(e.to_string()))?,
            seeds: parse_seed_range(&self.seeds)?,
            compute_opt: self.opt,
            parallel: self.parallel,
            csv: self.output.csv.clone(),
            json: self.output.json.clone(),
            plotdata: self.output.plotdata.clone(),
        };
        config.validate()?;
        Ok(config)
    }
}

/// Parses a batch file. Relative `--instance` paths resolve against the
/// file's directory.
pub fn parse_batch(text: &str, base: &Path) -> Result<Vec<ExperimentConfig>> {
    let mut configs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut words: Vec<&str> = line.split_whitespace().collect();
        if words.first() == Some(&"submax") {
            words.remove(0);
        }
        let argv = std::iter::once("submax").chain(words.iter().copied());
        let cli = Cli::try_parse_from(argv).map_err(|e| Error::parse(i + 1, e.to_string().trim().to_string()))?;
        let Command::Run(mut args) = cli.command else {
            return Err(Error::parse(i + 1, "only `run` lines are allowed in a batch file"));
        };
        if let Some(p) = args.instance.as_mut() {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        configs.push(args.to_config().map_err(|e| Error::parse(i + 1, e.to_string()))?);
    }
    if configs.is_empty() {
        return Err(Error::Config("batch file has no run lines".into()));
    }
    Ok(configs)
}

fn emit(rows: &[super::report::ReportRow], output: &OutputArgs) -> Result<()> {
    emit_report(rows, output.csv.as_deref(), output.json.as_deref(), output.plotdata.as_deref())?;
    if output.csv.is_none() {
        print!("{}", csv_string(rows));
    }
    Ok(())
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => {
            let config = args.to_config()?;
            let rows = run_batch(std::slice::from_ref(&config))?;
            emit(&rows, &args.output)
        }
        Command::Batch(args) => {
            let text = std::fs::read_to_string(&args.file).map_err(|e| Error::io(&args.file, e))?;
            let base = args.file.parent().unwrap_or(Path::new("."));
            let configs = parse_batch(&text, base)?;
            let rows = run_batch(&configs)?;
            emit(&rows, &args.output)
        }
        Command::Gen(args) => {
            let spec: GeneratorSpec = args.spec.parse()?;
            write_instance(&args.out, &spec.generate(args.seed)?)
        }
    }
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::report::read_csv;

    #[test]
    fn run_line_parses() {
        let cli = Cli::try_parse_from([
            "submax", "run", "--gen", "facloc:n=10,clients=5", "--k", "3", "--eps", "0.2", "--algo", "greedy",
            "--algo", "lazy", "--seeds", "1..3",
        ])
        .unwrap();
        let Command::Run(args) = cli.command else { panic!("not a run") };
        let c = args.to_config().unwrap();
        assert_eq!(c.algorithms, vec![Algorithm::Greedy, Algorithm::Lazy]);
        assert_eq!(c.seeds, vec![1, 2, 3]);
        assert_eq!(c.mode, Mode::Practical);
    }

    #[test]
    fn bad_command_lines_give_nonzero_exit() {
        assert_eq!(main_with(["submax", "run", "--k", "3"]), 2);
        assert_eq!(
            main_with(["submax", "run", "--gen", "foo:n=1", "--k", "3", "--eps", "0.1", "--algo", "greedy"]),
            1
        );
        assert_eq!(
            main_with(["submax", "run", "--gen", "facloc:n=5,clients=3", "--k", "3", "--eps", "0.1", "--algo", "x"]),
            1
        );
    }

    #[test]
    fn batch_file_end_to_end() {
        let dir = tempfile::tempdir().unwrap();
        let inst = dir.path().join("inst.txt");
        assert_eq!(
            main_with([
                "submax",
                "gen",
                "coverage:n=12,u=30,density=0.2",
                "--seed",
                "4",
                "--out",
                inst.to_str().unwrap()
            ]),
            0
        );
        let batch = dir.path().join("exp.txt");
        std::fs::write(
            &batch,
            "# small sweep\n\
             run --instance inst.txt --k 3 --eps 0.1 --algo greedy --algo adaptive --seeds 0..1 --opt\n\
             \n\
             run --gen facloc:n=30,clients=10 --k 4 --eps 0.2 --algo lazy  # trailing comment\n",
        )
        .unwrap();
        let csv = dir.path().join("out.csv");
        let plots = dir.path().join("plots");
        let code = main_with([
            "submax",
            "batch",
            batch.to_str().unwrap(),
            "--csv",
            csv.to_str().unwrap(),
            "--plotdata",
            plots.to_str().unwrap(),
        ]);
        assert_eq!(code, 0);
        let rows = read_csv(&csv).unwrap();
        assert_eq!(rows.len(), 5);
        assert!(rows[..4].iter().all(|r| r.ratio.is_some()));
        assert_eq!(rows[4].ratio, None);
        let rounds = std::fs::read_to_string(plots.join("rounds_vs_n.dat")).unwrap();
        assert_eq!(rounds.lines().count(), 3);

        std::fs::write(&batch, "gen coverage:n=3,u=3,density=1 --out x\n").unwrap();
        assert!(parse_batch(&std::fs::read_to_string(&batch).unwrap(), dir.path()).is_err());
        assert!(matches!(parse_batch("# nothing\n", dir.path()), Err(Error::Config(_))));
    }
}
