use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use gzsi::analysis::{
    acceptability_compare, acceptability_markdown, confusion_markdown, confusion_pairs, features_for_predictions,
    stress_report, NgramLm,
};
use gzsi::config::{fingerprint_of, ExperimentConfig};
use gzsi::corpus::{
    default_stoplist, filter_uninformative, make_gzsl_split, normalize_dialogue_corpus, parse_schema_guided,
    parse_sgd_schema, Dataset, Dialogue, GzslSplit, Intent,
};
use gzsi::dataless::{build_synthetic_trainset, dataless_dataset, seen_intents, RuleFamily, DEFAULT_PER_INTENT};
use gzsi::encoder::{build_requests, ExternalScorer, PairScorer, ScoreRequest, ScoreResponse};
use gzsi::eval::{partitioned_report, EvalReport, RunReport};
use gzsi::gzsl::{
    intent_texts, map_seeds, predict_split, run_experiment, run_split, train_gzsl, GzslModel, PredictionRecord,
    SplitPlan,
};
use gzsi::lexicalize::{lexicalize, LexicalizeOptions, TemplateSet};
use gzsi::sampling::PairRecord;
use gzsi::synthetic::{generate, SyntheticSpec};
use gzsi::{jsonl, Error, Result};

#[derive(Parser)]
#[command(name = "gzsi", version, about = "Generalized zero-shot intent recognition")]
struct Cli {
    /// Root directory for artifacts.
    #[arg(long, global = true, env = "GZSI_OUTPUT_ROOT")]
    out_root: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a raw corpus into intents.jsonl and utterances.jsonl.
    Ingest(IngestArgs),
    /// Draw seen/unseen intents and the train/test partition.
    Split(SplitArgs),
    /// Turn intent labels into sentences with a template.
    Lexicalize(LexicalizeArgs),
    /// Train a model for one seed.
    Train(TrainArgs),
    /// Predict with a trained model or external scores.
    Predict(PredictArgs),
    /// Run every seed of a config, or score a predictions file.
    Eval(EvalArgs),
    /// Stress-test breakdown and confusion pairs for one seed.
    Analyze(AnalyzeArgs),
    /// Score labels and lexicalized labels with an n-gram LM.
    Acceptability(AcceptabilityArgs),
    /// Train on paraphrased labels instead of real utterances.
    Dataless(DatalessArgs),
    /// Evaluate every point of the hyperparameter grid.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InputFormat {
    /// Existing intents/utterances JSONL pair, re-validated.
    Jsonl,
    /// Schema-guided dialogue files (SGD, MultiWoZ 2.2).
    Sgd,
    /// JSONL of {"id", "turns": [{"text", "intent"}]}.
    Dialogues,
    /// The built-in synthetic generator.
    Synthetic,
}

#[derive(Args)]
struct IngestArgs {
    #[arg(long, value_enum)]
    format: InputFormat,
    /// Input files; for jsonl, the intents file then the utterances file.
    #[arg(long, num_args = 1..)]
    input: Vec<PathBuf>,
    /// SGD schema file supplying the intent inventory and descriptions.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    min_tokens: usize,
    #[arg(long)]
    no_stoplist: bool,
    #[arg(long, default_value_t = 20)]
    n_intents: usize,
    #[arg(long, default_value_t = 40)]
    per_intent: usize,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Directory receiving the two JSONL files.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, requires = "utterances", conflicts_with = "config")]
    intents: Option<PathBuf>,
    #[arg(long, requires = "intents", conflicts_with = "config")]
    utterances: Option<PathBuf>,
}

impl DataArgs {
    fn load(&self) -> Result<(Dataset, Option<ExperimentConfig>)> {
        match (&self.config, &self.intents, &self.utterances) {
            (Some(c), _, _) => {
                let cfg = ExperimentConfig::load(c)?;
                Ok((cfg.load_dataset()?, Some(cfg)))
            }
            (None, Some(i), Some(u)) => Ok((Dataset::load(i, u)?, None)),
            _ => Err(Error::InvalidArgument(
                "pass --config or both --intents and --utterances".into(),
            )),
        }
    }
}

#[derive(Args)]
struct SplitArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    n_unseen: Option<usize>,
    #[arg(long)]
    train_fraction: Option<f64>,
    #[arg(long)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct LexicalizeArgs {
    #[arg(long)]
    template: String,
    /// One label per line.
    #[arg(long)]
    labels: PathBuf,
    /// Template JSONL replacing the built-in set.
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    capitalize: bool,
    #[arg(long)]
    question_mark: bool,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model file written by `train`.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Predict a single utterance and print the result.
    #[arg(long, requires = "model")]
    text: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Split file; defaults to the one `train` wrote for the seed.
    #[arg(long)]
    split: Option<PathBuf>,
    /// Write external scoring requests for the test set and stop.
    #[arg(long, conflicts_with_all = ["model", "responses"])]
    write_requests: Option<PathBuf>,
    /// Responses of an external scorer to the written requests.
    #[arg(long, conflicts_with = "model")]
    responses: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Score an existing predictions file instead of running the config.
    #[arg(long, requires = "split", conflicts_with = "config")]
    predictions: Option<PathBuf>,
    #[arg(long)]
    split: Option<PathBuf>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: u64,
    /// Defaults to the predictions `eval` wrote for the seed.
    #[arg(long)]
    predictions: Option<PathBuf>,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
}

#[derive(Args)]
struct AcceptabilityArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Plain-text LM corpus, one sentence per line; defaults to the utterances.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Plain-text labels, one per line; defaults to the intent labels.
    #[arg(long)]
    labels: Option<PathBuf>,
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    order: usize,
    #[arg(long, default_value_t = 0.1)]
    k: f64,
}

#[derive(Args)]
struct DatalessArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PER_INTENT)]
    n_per_intent: usize,
    #[arg(long, value_delimiter = ',', default_values_t = ["prefix".to_string(), "synonym".to_string(), "form".to_string()])]
    families: Vec<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// List the grid points without training.
    #[arg(long)]
    dry_run: bool,
    #[arg(long)]
    runs_per_point: Option<usize>,
}

struct Output {
    root: PathBuf,
}

impl Output {
    fn new(flag: Option<PathBuf>, config: Option<&ExperimentConfig>) -> Self {
        let root = flag
            .or_else(|| config.and_then(|c| c.output_dir.as_ref().map(|p| c.resolve(p))))
            .unwrap_or_else(|| PathBuf::from("out"));
        Output { root }
    }

    fn dir(&self, fingerprint: &str) -> Result<PathBuf> {
        let dir = self.root.join(fingerprint);
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(dir)
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    jsonl::write_json(path, value)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    jsonl::write(path, records)?;
    eprintln!("wrote {}", path.display());
    Ok(())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(String::from)
        .collect())
}

fn stamp(fingerprint: &str, seed: Option<u64>, md: &str) -> String {
    match seed {
        Some(s) => format!("<!-- fingerprint {fingerprint} seed {s} -->\n{md}"),
        None => format!("<!-- fingerprint {fingerprint} -->\n{md}"),
    }
}

fn ingest(args: IngestArgs) -> Result<()> {
    let inputs = &args.input;
    let need = |n: usize| {
        if inputs.len() < n {
            Err(Error::InvalidArgument(format!("--input needs at least {n} file(s)")))
        } else {
            Ok(())
        }
    };
    let dataset = match args.format {
        InputFormat::Jsonl => {
            need(2)?;
            Dataset::load(&inputs[0], &inputs[1])?
        }
        InputFormat::Synthetic => generate(&SyntheticSpec {
            n_intents: args.n_intents,
            per_intent: args.per_intent,
            seed: args.seed,
            ..SyntheticSpec::default()
        })?,
        InputFormat::Sgd | InputFormat::Dialogues => {
            need(1)?;
            let mut dialogues: Vec<Dialogue> = Vec::new();
            for path in inputs {
                match args.format {
                    InputFormat::Sgd => dialogues.extend(parse_schema_guided(&jsonl::read_json(path)?)?),
                    _ => dialogues.extend(jsonl::read::<Dialogue>(path)?),
                }
            }
            let inventory: Option<Vec<Intent>> = match &args.schema {
                Some(p) => Some(parse_sgd_schema(&jsonl::read_json(p)?)?),
                None => None,
            };
            let provenance = inputs
                .iter()
                .map(|p| p.display().to_string())
                .collect::<Vec<_>>()
                .join(",");
            normalize_dialogue_corpus(&dialogues, inventory, &provenance)?
        }
    };
    let stoplist = if args.no_stoplist {
        Default::default()
    } else {
        default_stoplist()
    };
    let dataset = filter_uninformative(&dataset, &stoplist, args.min_tokens);
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    dataset.save(&args.out)?;
    eprintln!(
        "{} intents, {} utterances -> {}",
        dataset.intents().len(),
        dataset.utterances().len(),
        args.out.display()
    );
    Ok(())
}

fn split(args: SplitArgs, out: Option<PathBuf>) -> Result<()> {
    let (dataset, cfg) = args.data.load()?;
    let n_unseen = args
        .n_unseen
        .or(cfg.as_ref().map(|c| c.split.n_unseen))
        .ok_or_else(|| Error::InvalidArgument("--n-unseen is required without --config".into()))?;
    let train_fraction = args
        .train_fraction
        .or(cfg.as_ref().map(|c| c.split.train_fraction))
        .unwrap_or(0.7);
    let split = make_gzsl_split(&dataset, n_unseen, train_fraction, args.seed)?;
    let path = match args.out {
        Some(p) => p,
        None => {
            let fp = match &cfg {
                Some(c) => c.fingerprint(),
                None => fingerprint_of(
                    &json!({"provenance": dataset.provenance(), "n_unseen": n_unseen, "train_fraction": train_fraction}),
                ),
            };
            Output::new(out, cfg.as_ref())
                .dir(&fp)?
                .join(format!("split-seed{}.json", args.seed))
        }
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    write_json(&path, &split)?;
    eprintln!(
        "{} seen, {} unseen, {} train, {} test",
        split.seen.len(),
        split.unseen.len(),
        split.train.len(),
        split.test.len()
    );
    Ok(())
}

fn lexicalize_cmd(args: LexicalizeArgs) -> Result<()> {
    let templates = match &args.templates {
        Some(p) => TemplateSet::load(p)?,
        None => TemplateSet::builtin(),
    };
    let template = templates.get(&args.template)?;
    let options = LexicalizeOptions {
        capitalize: args.capitalize,
        question_mark: args.question_mark,
    };
    for label in read_lines(&args.labels)? {
        println!("{}", lexicalize(&label, template, &options)?);
    }
    Ok(())
}

fn seed_split(cfg: &ExperimentConfig, dataset: &Dataset, seed: u64) -> Result<GzslSplit> {
    match cfg.split_plan()? {
        SplitPlan::Random {
            n_unseen,
            train_fraction,
        } => make_gzsl_split(dataset, n_unseen, train_fraction, seed),
        SplitPlan::Fixed { split } => Ok(split),
    }
}

fn train(args: TrainArgs, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let dataset = cfg.load_dataset()?;
    let fp = cfg.fingerprint();
    let dir = Output::new(out, Some(&cfg)).dir(&fp)?;
    let split = seed_split(&cfg, &dataset, args.seed)?;
    let (model, training) = train_gzsl(&dataset, &split, &cfg.options()?.with_seed(args.seed), &fp)?;
    write_json(&dir.join(format!("split-seed{}.json", args.seed)), &split)?;
    let pairs: Vec<PairRecord> = training.pairs.iter().map(PairRecord::from).collect();
    write_jsonl(&dir.join(format!("pairs-seed{}.jsonl", args.seed)), &pairs)?;
    model.save(dir.join(format!("model-seed{}.json", args.seed)))?;
    eprintln!(
        "wrote {} ({} pairs, {} short of k, loss {:.4} -> {:.4})",
        dir.join(format!("model-seed{}.json", args.seed)).display(),
        pairs.len(),
        training.shortages,
        model.scorer.stats.initial_loss,
        model.scorer.stats.final_loss()
    );
    Ok(())
}

fn predict_cmd(args: PredictArgs, out: Option<PathBuf>) -> Result<()> {
    if let (Some(model), Some(text)) = (&args.model, &args.text) {
        let model = GzslModel::load(model)?;
        let p = model.predict(text)?;
        println!(
            "{}",
            serde_json::to_string_pretty(&json!({"intent": p.intent, "scores": p.scores})).expect("json")
        );
        return Ok(());
    }
    let config = args
        .config
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("--config is required".into()))?;
    let seed = args
        .seed
        .ok_or_else(|| Error::InvalidArgument("--seed is required".into()))?;
    let cfg = ExperimentConfig::load(config)?;
    let dataset = cfg.load_dataset()?;
    let fp = cfg.fingerprint();
    let dir = Output::new(out, Some(&cfg)).dir(&fp)?;
    let split = match &args.split {
        Some(p) => GzslSplit::load(p)?,
        None => {
            let p = dir.join(format!("split-seed{seed}.json"));
            if p.exists() {
                GzslSplit::load(p)?
            } else {
                seed_split(&cfg, &dataset, seed)?
            }
        }
    };
    split.validate(&dataset)?;
    let options = cfg.options()?;
    let texts = intent_texts(
        &dataset,
        &split.candidates(),
        &options.intent_text,
        &options.template_set()?,
        &options.lexicalize,
    )?;
    let requests = || {
        build_requests(
            &texts,
            split.test.iter().map(|id| {
                (
                    id.as_str(),
                    dataset.utterance(id).map(|u| u.text.as_str()).unwrap_or(""),
                )
            }),
        )
    };
    if let Some(path) = &args.write_requests {
        return write_jsonl(path, &requests());
    }
    let (scorer, candidates): (Box<dyn PairScorer>, BTreeMap<String, String>) = if let Some(resp) = &args.responses {
        let reqs: Vec<ScoreRequest> = requests();
        let responses: Vec<ScoreResponse> = jsonl::read(resp)?;
        (Box::new(ExternalScorer::from_responses(&reqs, &responses)?), texts)
    } else {
        let model_path = args
            .model
            .clone()
            .unwrap_or_else(|| dir.join(format!("model-seed{seed}.json")));
        let model = GzslModel::load(model_path)?;
        let texts = model.intent_texts.clone();
        (Box::new(model.scorer), texts)
    };
    let predictions = predict_split(scorer.as_ref(), &candidates, &dataset, &split)?;
    write_jsonl(&dir.join(format!("predictions-seed{seed}.jsonl")), &predictions)
}

fn score_predictions(split: &GzslSplit, predictions: &[PredictionRecord], seed: u64) -> Result<RunReport> {
    let gold: Vec<String> = predictions.iter().map(|p| p.gold.clone()).collect();
    let pred: Vec<String> = predictions.iter().map(|p| p.pred.clone()).collect();
    Ok(RunReport {
        seed,
        metrics: partitioned_report(split, &gold, &pred)?,
    })
}

fn eval(args: EvalArgs, out: Option<PathBuf>) -> Result<()> {
    if let (Some(pred_path), Some(split_path)) = (&args.predictions, &args.split) {
        let split = GzslSplit::load(split_path)?;
        let predictions: Vec<PredictionRecord> = jsonl::read(pred_path)?;
        let run = score_predictions(&split, &predictions, split.seed)?;
        println!("{}", serde_json::to_string_pretty(&run).expect("json"));
        return Ok(());
    }
    let config = args
        .config
        .ok_or_else(|| Error::InvalidArgument("pass --config, or --predictions with --split".into()))?;
    let cfg = ExperimentConfig::load(&config)?;
    let dataset = cfg.load_dataset()?;
    let dir = Output::new(out, Some(&cfg)).dir(&cfg.fingerprint())?;
    let (report, runs) = run_experiment(&dataset, &cfg.experiment()?)?;
    for run in &runs {
        write_json(&dir.join(format!("split-seed{}.json", run.seed)), &run.split)?;
        write_jsonl(
            &dir.join(format!("predictions-seed{}.jsonl", run.seed)),
            &run.predictions,
        )?;
        run.model.save(dir.join(format!("model-seed{}.json", run.seed)))?;
    }
    write_json(&dir.join("report.json"), &report)?;
    let name = config
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    write_text(&dir.join("report.md"), &report.to_markdown(&name))?;
    print!("{}", EvalReport::markdown_table(&[(&name, &report)]));
    Ok(())
}

fn analyze(args: AnalyzeArgs, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let dataset = cfg.load_dataset()?;
    let fp = cfg.fingerprint();
    let dir = Output::new(out, Some(&cfg)).dir(&fp)?;
    let path = args
        .predictions
        .unwrap_or_else(|| dir.join(format!("predictions-seed{}.jsonl", args.seed)));
    let predictions: Vec<PredictionRecord> = jsonl::read(&path)?;
    let labels: BTreeMap<String, String> = dataset
        .intents()
        .iter()
        .map(|i| (i.id.clone(), i.label.clone()))
        .collect();
    let features = features_for_predictions(
        &predictions,
        |id| Ok(dataset.utterance(id)?.text.clone()),
        |id| Ok(dataset.intent(id)?.label.clone()),
        &cfg.embedding,
    )?;
    let stress = stress_report(&predictions, &features)?;
    let gold: Vec<&str> = predictions.iter().map(|p| p.gold.as_str()).collect();
    let pred: Vec<&str> = predictions.iter().map(|p| p.pred.as_str()).collect();
    let confusion = confusion_pairs(&gold, &pred, &labels, args.top_k)?;
    let seed = args.seed;
    write_json(
        &dir.join(format!("stress-seed{seed}.json")),
        &json!({"fingerprint": fp, "seed": seed, "report": stress}),
    )?;
    write_text(
        &dir.join(format!("stress-seed{seed}.md")),
        &stamp(&fp, Some(seed), &stress.to_markdown()),
    )?;
    write_json(
        &dir.join(format!("confusion-seed{seed}.json")),
        &json!({"fingerprint": fp, "seed": seed, "pairs": confusion}),
    )?;
    write_text(
        &dir.join(format!("confusion-seed{seed}.md")),
        &stamp(&fp, Some(seed), &confusion_markdown(&confusion)),
    )?;
    Ok(())
}

fn acceptability_cmd(args: AcceptabilityArgs, out: Option<PathBuf>) -> Result<()> {
    let loaded = if args.data.config.is_some() || args.data.intents.is_some() {
        Some(args.data.load()?)
    } else {
        None
    };
    let corpus = match (&args.corpus, &loaded) {
        (Some(p), _) => read_lines(p)?,
        (None, Some((ds, _))) => ds.utterances().iter().map(|u| u.text.clone()).collect(),
        (None, None) => return Err(Error::InvalidArgument("pass --corpus or a dataset".into())),
    };
    let labels = match (&args.labels, &loaded) {
        (Some(p), _) => read_lines(p)?,
        (None, Some((ds, _))) => ds.intents().iter().map(|i| i.label.clone()).collect(),
        (None, None) => return Err(Error::InvalidArgument("pass --labels or a dataset".into())),
    };
    let templates = match &args.templates {
        Some(p) => TemplateSet::load(p)?,
        None => TemplateSet::builtin(),
    };
    let lm = NgramLm::train(&corpus, args.order, args.k)?;
    let rows = acceptability_compare(&labels, &templates, &lm, &LexicalizeOptions::default())?;
    let fp = fingerprint_of(&json!({
        "corpus": corpus, "labels": labels, "order": args.order, "k": args.k,
        "templates": templates.iter().collect::<Vec<_>>(),
    }));
    let cfg = loaded.as_ref().and_then(|(_, c)| c.as_ref());
    let dir = Output::new(out, cfg).dir(&fp)?;
    write_json(
        &dir.join("acceptability.json"),
        &json!({"fingerprint": fp, "order": args.order, "k": args.k, "rows": rows}),
    )?;
    let md = acceptability_markdown(&rows);
    write_text(&dir.join("acceptability.md"), &stamp(&fp, None, &md))?;
    print!("{md}");
    Ok(())
}

fn dataless(args: DatalessArgs, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let dataset = cfg.load_dataset()?;
    let families = args
        .families
        .iter()
        .map(|f| f.parse())
        .collect::<Result<Vec<RuleFamily>>>()?;
    let fp =
        fingerprint_of(&json!({"config": cfg.fingerprint(), "n_per_intent": args.n_per_intent, "families": families}));
    let dir = Output::new(out, Some(&cfg)).dir(&fp)?;
    let options = cfg.options()?;
    let templates = options.template_set()?;
    let runs = map_seeds(&cfg.seeds, |seed| {
        let split = seed_split(&cfg, &dataset, seed)?;
        let seen = seen_intents(&dataset, &split)?;
        let synthetic = build_synthetic_trainset(&seen, &templates, &families, args.n_per_intent, seed)?;
        let (ds, dsplit) = dataless_dataset(&dataset, &split, &synthetic)?;
        let run = run_split(&ds, dsplit, &options, seed, &fp)?;
        Ok((synthetic, run))
    })?;
    for (synthetic, run) in &runs {
        write_jsonl(&dir.join(format!("synthetic-seed{}.jsonl", run.seed)), synthetic)?;
        write_jsonl(
            &dir.join(format!("predictions-seed{}.jsonl", run.seed)),
            &run.predictions,
        )?;
    }
    let report = EvalReport::from_runs(&fp, runs.iter().map(|(_, r)| r.report.clone()).collect())?;
    write_json(&dir.join("report.json"), &report)?;
    write_text(&dir.join("report.md"), &report.to_markdown("dataless"))?;
    print!("{}", EvalReport::markdown_table(&[("dataless", &report)]));
    Ok(())
}

#[derive(Serialize)]
struct SweepRow {
    rank: usize,
    point: gzsi::config::SweepPoint,
    fingerprint: String,
    report: EvalReport,
}

fn sweep(args: SweepArgs, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = ExperimentConfig::load(&args.config)?;
    if let Some(n) = args.runs_per_point {
        cfg.sweep.runs_per_point = n;
    }
    cfg.sweep.validate()?;
    let points = cfg.sweep.points();
    if args.dry_run {
        for p in &points {
            println!("{}", serde_json::to_string(p).expect("json"));
        }
        eprintln!("{} configurations", points.len());
        return Ok(());
    }
    let runs = cfg.sweep.runs_per_point;
    if cfg.seeds.len() < runs {
        return Err(Error::config(
            "seeds",
            format!("sweep needs {runs} seeds, config lists {}", cfg.seeds.len()),
        ));
    }
    let dataset = cfg.load_dataset()?;
    let fp = cfg.fingerprint();
    let dir = Output::new(out, Some(&cfg)).dir(&fp)?;
    let mut rows = Vec::new();
    for (i, point) in points.iter().enumerate() {
        let mut c = point.apply(&cfg);
        c.seeds.truncate(runs);
        let (report, _) = run_experiment(&dataset, &c.experiment()?)?;
        eprintln!("[{}/{}] {}", i + 1, points.len(), c.fingerprint());
        rows.push(SweepRow {
            rank: 0,
            point: *point,
            fingerprint: c.fingerprint(),
            report,
        });
    }
    let key = |r: &SweepRow| {
        r.report
            .summary
            .unseen
            .as_ref()
            .map_or(f64::NEG_INFINITY, |u| u.weighted_f1.mean)
    };
    rows.sort_by(|a, b| key(b).total_cmp(&key(a)));
    for (i, r) in rows.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    write_json(
        &dir.join("sweep.json"),
        &json!({"fingerprint": fp, "seeds": cfg.seeds[..runs], "rows": rows}),
    )?;
    let names: Vec<String> = rows
        .iter()
        .map(|r| {
            let p = &r.point;
            format!(
                "#{} lr={} bs={} wu={} len={} k={}",
                r.rank, p.learning_rate, p.batch_size, p.warmup_ratio, p.max_len_tokens, p.k
            )
        })
        .collect();
    let table: Vec<(&str, &EvalReport)> = names
        .iter()
        .map(String::as_str)
        .zip(rows.iter().map(|r| &r.report))
        .collect();
    let md = EvalReport::markdown_table(&table);
    write_text(&dir.join("sweep.md"), &stamp(&fp, None, &md))?;
    print!("{md}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    let out = cli.out_root;
    match cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Split(a) => split(a, out),
        Command::Lexicalize(a) => lexicalize_cmd(a),
        Command::Train(a) => train(a, out),
        Command::Predict(a) => predict_cmd(a, out),
        Command::Eval(a) => eval(a, out),
        Command::Analyze(a) => analyze(a, out),
        Command::Acceptability(a) => acceptability_cmd(a, out),
        Command::Dataless(a) => dataless(a, out),
        Command::Sweep(a) => sweep(a, out),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let mut shown = e.to_string();
            eprintln!("error: {shown}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                let text = s.to_string();
                if !shown.contains(&text) {
                    eprintln!("  caused by: {text}");
                }
                shown = text;
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
