use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand};

use idp_core::binning::{bin_of, hib, relevant_set, RelevantSet};
use idp_core::hilbert::{hilbert_basis, is_idp, is_idp_bins};
use idp_core::nn::{load_params, save_params, NetSpec, Params};
use idp_core::sieve::{scan, ScanConfig};
use idp_core::simplex::{fpp_points, hstar, is_unimodal, QVector};
use idp_core::trainer::{
    generate_dataset, hib_confusion, idp_confusion, split, sweep, train, write_sweep_csv, Dataset, Predictor,
    TrainConfig,
};

/// Integer decomposition property of Δ(1,q) simplices: exact computation
/// and a neural-network sieve.
#[derive(Parser, Debug)]
#[command(name = "idp", version, about)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact Hilbert basis and IDP verdict for one q-vector.
    Exact {
        /// Comma-separated non-negative integers, e.g. 4,10,14,14.
        q: String,
    },
    /// Sample q-vectors uniformly from [1, bound]^d and label them exactly.
    Gen(GenArgs),
    /// Train a network on a labeled dataset.
    Train(TrainArgs),
    /// Confusion tables of a model on a labeled dataset.
    Eval(EvalArgs),
    /// Precision/sensitivity of predicted IDP over an η × τ grid, as CSV.
    Sweep(SweepArgs),
    /// Predict IDP over the whole grid [1, bound]^d, optionally verifying.
    Scan(ScanArgs),
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 25)]
    bound: i64,
    #[arg(long, default_value_t = 50_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct TrainArgs {
    /// Labeled dataset written by `gen`.
    #[arg(long)]
    data: PathBuf,
    /// Where to write the model.
    #[arg(long)]
    out: PathBuf,
    /// Hidden-layer widths; input and output widths follow from the data.
    #[arg(long, value_delimiter = ',', default_value = "100,400,800,3000")]
    hidden: Vec<usize>,
    #[arg(long, default_value_t = 0.001)]
    epsilon: f64,
    #[arg(long, default_value_t = 10.0)]
    beta: f64,
    #[arg(long, default_value_t = 10)]
    batch: usize,
    #[arg(long, default_value_t = 100_000)]
    updates: usize,
    #[arg(long, default_value_t = 1000)]
    eval_every: usize,
    #[arg(long, default_value_t = 10)]
    patience: usize,
    #[arg(long, default_value_t = 0.1)]
    val_fraction: f64,
    /// L2 penalty weight.
    #[arg(long, default_value_t = 0.0)]
    l2: f64,
    /// Seeds initialization, the train/validation split and batch order.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Input scale; defaults to the dataset's bound.
    #[arg(long)]
    scale: Option<f64>,
    /// Also write the held-out validation records here.
    #[arg(long)]
    val_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[arg(long)]
    model: PathBuf,
    /// Input scale used in training; defaults to the bound of the data or grid.
    #[arg(long)]
    scale: Option<f64>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 0)]
    tau: usize,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.12,0.25,0.5,0.75,0.9")]
    etas: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0,1,2,5,10,20,35,65,100")]
    taus: Vec<usize>,
    /// CSV destination; stdout if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScanArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, default_value_t = 4)]
    d: usize,
    #[arg(long, default_value_t = 25)]
    bound: i64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    #[arg(long, default_value_t = 65)]
    tau: usize,
    /// Run the exact test on each predicted positive.
    #[arg(long)]
    verify: bool,
    /// Run the exact test on the whole grid to report sensitivity too.
    #[arg(long)]
    exhaustive: bool,
    /// Predicted positives, one q-vector per line.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Command::Exact { q } => cmd_exact(&q),
        Command::Gen(a) => cmd_gen(&a),
        Command::Train(a) => cmd_train(&a),
        Command::Eval(a) => cmd_eval(&a),
        Command::Sweep(a) => cmd_sweep(&a),
        Command::Scan(a) => cmd_scan(&a),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn check_cutoffs(eta: f64) -> Result<()> {
    ensure!((0.0..=1.0).contains(&eta), "eta must lie in [0, 1], got {eta}");
    Ok(())
}

fn cmd_exact(q: &str) -> Result<()> {
    let q: QVector = q.parse().with_context(|| format!("parsing q-vector {q:?}"))?;
    let d = q.dim();
    let h = hstar(&q);
    let basis = hilbert_basis(&q);
    let mut out = io::stdout().lock();
    writeln!(out, "q: {q}")?;
    writeln!(out, "N: {}", q.volume())?;
    writeln!(out, "h*: {}", h.iter().map(u64::to_string).collect::<Vec<_>>().join(" "))?;
    writeln!(out, "h* unimodal: {}", is_unimodal(&h))?;
    writeln!(out, "parallelepiped points: {}", fpp_points(&q).len())?;
    writeln!(out, "hilbert basis extras: {}", basis.extras.len())?;
    for z in &basis.extras {
        let coords = z.coords.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        writeln!(out, "  ({coords})  height {}  weights {}  bin {}", z.height(), z.weights, bin_of(&z.weights, d))?;
    }
    if d <= idp_core::binning::MAX_BIN_DIM {
        let rs = relevant_set(d)?;
        writeln!(out, "relevant bins hit: {}", hib(&q, &rs)?.count())?;
    }
    writeln!(out, "IDP (height-1 basis): {}", is_idp(&q))?;
    writeln!(out, "IDP (bins): {}", is_idp_bins(&q))?;
    Ok(())
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let rs = relevant_set(a.d)?;
    let ds = generate_dataset(a.d, a.bound, a.count, a.seed, &rs)?;
    ds.save(&a.out)?;
    eprintln!(
        "wrote {} examples (d={}, bound={}, {} relevant bins, IDP rate {:.4}) to {}",
        ds.examples.len(),
        a.d,
        a.bound,
        rs.len(),
        ds.base_rate(),
        a.out.display()
    );
    Ok(())
}

fn cmd_train(a: &TrainArgs) -> Result<()> {
    let file = File::open(&a.data).with_context(|| format!("opening {}", a.data.display()))?;
    let ds = Dataset::read(io::BufReader::new(file), &a.data)?;
    let rs = relevant_set(ds.d)?;
    ds.check_labels(&rs, 100).map_err(|(line, msg)| anyhow::anyhow!("{}:{line}: {msg}", a.data.display()))?;
    let (tr, va) = split(&ds.examples, a.val_fraction, a.seed)?;
    ensure!(!tr.is_empty(), "no training records left after the split");
    if let Some(path) = &a.val_out {
        ds.with_examples(va.clone()).save(path)?;
    }

    let mut widths = vec![ds.d];
    widths.extend(&a.hidden);
    widths.push(rs.len());
    let spec = NetSpec { widths, epsilon: a.epsilon, beta: a.beta, batch_size: a.batch, seed: a.seed, l2: a.l2 };
    let cfg = TrainConfig {
        updates: a.updates,
        eval_every: a.eval_every,
        patience: a.patience,
        scale: a.scale.unwrap_or(ds.bound as f64),
    };
    eprintln!("training {:?} on {} records, validating on {}", spec.widths, tr.len(), va.len());
    let out = train(&spec, &tr, &va, &cfg)?;
    for r in &out.log {
        match r.train_loss {
            Some(t) => eprintln!("update {:>7}  train {:.5}  val {:.5}", r.update, t, r.val_loss),
            None => eprintln!("update {:>7}  val {:.5}", r.update, r.val_loss),
        }
    }
    save_params(&out.params, &a.out)?;
    eprintln!(
        "best val loss {:.5} at update {} ({} updates run{}); model written to {}",
        out.best_val_loss(),
        out.best_update,
        out.updates_run,
        if out.stopped_early { ", stopped early" } else { "" },
        a.out.display()
    );
    Ok(())
}

struct Loaded {
    params: Params,
    relevant: RelevantSet,
}

impl Loaded {
    fn open(m: &ModelArgs) -> Result<Loaded> {
        let params = load_params(&m.model)?;
        let relevant = relevant_set(params.input_dim())?;
        Ok(Loaded { params, relevant })
    }

    fn predictor(&self, scale: f64) -> Result<Predictor<'_>> {
        Ok(Predictor::new(&self.params, &self.relevant, scale)?)
    }
}

fn load_labeled(path: &Path, m: &Loaded) -> Result<Dataset> {
    let ds = Dataset::load(path, &m.relevant)?;
    ensure!(!ds.examples.is_empty(), "{} holds no records", path.display());
    Ok(ds)
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    check_cutoffs(a.eta)?;
    let m = Loaded::open(&a.model)?;
    let ds = load_labeled(&a.data, &m)?;
    let model = m.predictor(a.model.scale.unwrap_or(ds.bound as f64))?;
    let bins = hib_confusion(&model, &ds.examples, a.eta)?;
    let idp = idp_confusion(&model, &ds.examples, a.eta, a.tau)?;
    let mut out = io::stdout().lock();
    writeln!(out, "relevant bins, aggregated over {} examples (eta={})", ds.examples.len(), a.eta)?;
    writeln!(out, "{bins}\n")?;
    writeln!(out, "IDP verdicts (eta={}, tau={})", a.eta, a.tau)?;
    writeln!(out, "{idp}")?;
    Ok(())
}

fn cmd_sweep(a: &SweepArgs) -> Result<()> {
    for &eta in &a.etas {
        check_cutoffs(eta)?;
    }
    let m = Loaded::open(&a.model)?;
    let ds = load_labeled(&a.data, &m)?;
    let model = m.predictor(a.model.scale.unwrap_or(ds.bound as f64))?;
    let rows = sweep(&model, &ds.examples, &a.etas, &a.taus)?;
    match &a.out {
        Some(path) => write_sweep_csv(&rows, create(path)?).with_context(|| format!("writing {}", path.display()))?,
        None => write_sweep_csv(&rows, io::stdout().lock())?,
    }
    Ok(())
}

fn cmd_scan(a: &ScanArgs) -> Result<()> {
    check_cutoffs(a.eta)?;
    let m = Loaded::open(&a.model)?;
    if m.params.input_dim() != a.d {
        bail!("model takes d={} inputs but --d is {}", m.params.input_dim(), a.d);
    }
    let model = m.predictor(a.model.scale.unwrap_or(a.bound as f64))?;
    let cfg = ScanConfig { d: a.d, bound: a.bound, eta: a.eta, tau: a.tau, verify: a.verify, exhaustive: a.exhaustive };
    let outcome = scan(&model, &cfg)?;
    if let Some(path) = &a.out {
        let mut w = create(path)?;
        for v in &outcome.positives {
            writeln!(w, "{}", v.q)?;
        }
        w.flush().with_context(|| format!("writing {}", path.display()))?;
    }
    println!("{}", outcome.report);
    Ok(())
}
