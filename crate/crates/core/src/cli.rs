//! Command-line front end. Each subcommand is one pipeline stage that reads
//! and writes plain files.

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::blr::{BlrConfig, BlrModel, LabelMode};
use crate::crowd::VerdictRecord;
use crate::datamodel::{
    label_counts_map, load_corpus, read_corpus, validate_corpus, write_jsonl, Corpus, CorpusPaths,
    Timestamp,
};
use crate::eval::{compare_models, evaluate, split_messages, Comparison, EvalReport, Split};
use crate::features::sentiment::Lexicon;
use crate::features::{EdgeFeatureRecord, FeatureTable};
use crate::forest::{rf_rank_features, ranking_tsv, ForestConfig};
use crate::graph::{derive_cascades, CascadeRecord};
use crate::pipeline::{
    edge_ranking_data, labeled_messages, persona_report, predict_crowdsourced,
    predict_noncrowdsourced, train_baseline_model, train_crowd_model, user_ranking_data, EdgeGroup,
};
use crate::synth::{generate, plant_report, Manifest, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "abuse-diffusion", version, about = "Abuse-level prediction from message diffusion")]
pub struct Cli {
    /// Emit log lines as JSON objects on stderr.
    #[arg(long, global = true)]
    pub log_json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic corpus with a planted diffusion signal.
    Synth(SynthArgs),
    /// Check a corpus against its invariants.
    Validate(CorpusArgs),
    /// Write one propagation cascade per message.
    Cascades(OutArgs),
    /// Write the 44-value feature vector of every propagation edge.
    Features(OutArgs),
    /// Train the edge-level (crowdsourced) model.
    Train(TrainArgs),
    /// Train the message-level (non-crowdsourced) baseline.
    TrainBaseline(TrainArgs),
    /// Label messages with both models.
    Predict(PredictArgs),
    /// Score verdicts against corpus labels.
    Evaluate(EvaluateArgs),
    /// Rank features with random forests.
    Rank(RankArgs),
    /// Persona scores and reaction classes per user.
    Persona(OutArgs),
}

#[derive(Debug, Args)]
pub struct CorpusArgs {
    /// Directory holding users.jsonl, tweets.jsonl, follows.csv and
    /// interactions.jsonl; individual paths override it.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long)]
    pub users: Option<PathBuf>,
    #[arg(long)]
    pub tweets: Option<PathBuf>,
    #[arg(long)]
    pub follows: Option<PathBuf>,
    #[arg(long)]
    pub interactions: Option<PathBuf>,
    /// RFC 3339 snapshot time. Defaults to the one recorded in the data
    /// directory's manifest.json.
    #[arg(long)]
    pub snapshot: Option<String>,
}

#[derive(Debug, Args)]
pub struct OutArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Sentiment lexicon (`token<TAB>polarity` lines); the bundled one by default.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    /// TOML file with generator settings; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_users: Option<usize>,
    #[arg(long)]
    pub n_messages: Option<usize>,
    /// Signal strength s in [0, 1].
    #[arg(long)]
    pub signal: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: OutArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 100.0)]
    pub sigma2: f64,
    #[arg(long, value_parser = parse_ratios, default_value = "0.6,0.3,0.1")]
    pub ratios: [f64; 3],
    #[arg(long, default_value = "multiclass")]
    pub mode: LabelMode,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub common: OutArgs,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub baseline: PathBuf,
    /// Predict the test part of this split instead of every message.
    #[arg(long)]
    pub split: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub corpus: CorpusArgs,
    #[arg(long)]
    pub verdicts: PathBuf,
    /// Baseline verdicts to compare against.
    #[arg(long)]
    pub baseline_verdicts: Option<PathBuf>,
    #[arg(long, default_value = "multiclass")]
    pub mode: LabelMode,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[command(flatten)]
    pub common: OutArgs,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 200)]
    pub trees: usize,
    #[arg(long, default_value_t = 10)]
    pub top_k: usize,
    /// Evenly subsample each edge group down to this many rows.
    #[arg(long, default_value_t = 20_000)]
    pub max_rows: usize,
}

fn parse_ratios(s: &str) -> Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("`{p}`: {e}")))
        .collect::<Result<_, _>>()?;
    let r: [f64; 3] = parts
        .try_into()
        .map_err(|_| "expected three comma-separated ratios".to_owned())?;
    if r.iter().any(|x| *x < 0.0) || (r.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err("ratios must be nonnegative and sum to 1".into());
    }
    Ok(r)
}

/// Usage errors exit with status 2, data errors with status 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(Box<dyn std::error::Error>),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Data(e) => write!(f, "{e}"),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 1,
        }
    }
}

impl<E: std::error::Error + 'static> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(Box::new(e))
    }
}

fn data_error(msg: impl Into<String>) -> CliError {
    CliError::Data(msg.into().into())
}

/// `report.json`.
#[derive(Debug, Serialize, Deserialize)]
pub struct Report {
    pub crowdsourced: EvalReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub noncrowdsourced: Option<EvalReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<Comparison>,
}

fn init_logging(json: bool) {
    let mut b = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"));
    if json {
        b.format(|buf, record| {
            let line = serde_json::json!({
                "level": record.level().as_str(),
                "target": record.target(),
                "message": record.args().to_string(),
            });
            writeln!(buf, "{line}")
        });
    } else {
        b.format(|buf, record| writeln!(buf, "[{}] {}", record.level(), record.args()));
    }
    let _ = b.try_init();
}

/// Parses `args` (program name first) and runs the chosen subcommand.
pub fn run_from<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    init_logging(cli.log_json);
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Synth(a) => synth(a),
        Command::Validate(a) => validate(a),
        Command::Cascades(a) => cascades(a),
        Command::Features(a) => features(a),
        Command::Train(a) => train(a, false),
        Command::TrainBaseline(a) => train(a, true),
        Command::Predict(a) => predict(a),
        Command::Evaluate(a) => evaluate_cmd(a),
        Command::Rank(a) => rank(a),
        Command::Persona(a) => persona(a),
    }
}

impl CorpusArgs {
    fn paths(&self) -> Result<CorpusPaths, CliError> {
        let defaults = self.data.as_ref().map(CorpusPaths::in_dir);
        let pick = |explicit: &Option<PathBuf>, default: Option<&PathBuf>, flag: &str| {
            explicit
                .clone()
                .or_else(|| default.cloned())
                .ok_or_else(|| CliError::Usage(format!("missing --{flag} (or --data DIR)")))
        };
        Ok(CorpusPaths {
            users: pick(&self.users, defaults.as_ref().map(|d| &d.users), "users")?,
            tweets: pick(&self.tweets, defaults.as_ref().map(|d| &d.tweets), "tweets")?,
            follows: pick(&self.follows, defaults.as_ref().map(|d| &d.follows), "follows")?,
            interactions: pick(
                &self.interactions,
                defaults.as_ref().map(|d| &d.interactions),
                "interactions",
            )?,
        })
    }

    fn snapshot(&self, paths: &CorpusPaths) -> Result<Timestamp, CliError> {
        if let Some(s) = &self.snapshot {
            return chrono::DateTime::parse_from_rfc3339(s)
                .map(|t| t.to_utc())
                .map_err(|e| CliError::Usage(format!("--snapshot `{s}`: {e}")));
        }
        let dir = self
            .data
            .clone()
            .or_else(|| paths.users.parent().map(Path::to_path_buf))
            .unwrap_or_default();
        let manifest = dir.join("manifest.json");
        let text = std::fs::read_to_string(&manifest).map_err(|_| {
            CliError::Usage(format!(
                "missing --snapshot and no manifest at {}",
                manifest.display()
            ))
        })?;
        let m: Manifest = serde_json::from_str(&text)?;
        Ok(m.config.snapshot)
    }

    fn load(&self) -> Result<Corpus, CliError> {
        let paths = self.paths()?;
        let snapshot = self.snapshot(&paths)?;
        let c = load_corpus(&paths, snapshot)?;
        log::info!(
            "loaded {} users, {} tweets, {} follows, {} interactions",
            c.users().len(),
            c.tweets().len(),
            c.follows().len(),
            c.interactions().len()
        );
        Ok(c)
    }
}

impl OutArgs {
    fn lexicon(&self) -> Result<Lexicon, CliError> {
        match &self.lexicon {
            Some(p) => Ok(Lexicon::from_path(p)?),
            None => Ok(Lexicon::bundled()),
        }
    }

    fn out_file(&self, name: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(&self.out)?;
        Ok(self.out.join(name))
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    log::info!("wrote {}", path.display());
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_text(path, &(serde_json::to_string_pretty(value)? + "\n"))
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| data_error(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| data_error(format!("{}: {e}", path.display())))
}

fn read_verdicts(path: &Path) -> Result<Vec<VerdictRecord>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| data_error(format!("{}: {e}", path.display())))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l)
                .map_err(|e| data_error(format!("{}:{}: {e}", path.display(), i + 1)))
        })
        .collect()
}

fn synth(a: SynthArgs) -> Result<(), CliError> {
    let mut config = match &a.config {
        Some(p) => SynthConfig::from_toml(&std::fs::read_to_string(p)?)?,
        None => SynthConfig::default(),
    };
    if let Some(v) = a.seed {
        config.seed = v;
    }
    if let Some(v) = a.n_users {
        config.n_users = v;
    }
    if let Some(v) = a.n_messages {
        config.n_messages = v;
    }
    if let Some(v) = a.signal {
        config.signal_strength = v;
    }
    let g = generate(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    g.write(&a.out)?;
    write_json(&a.out.join("plant_report.json"), &plant_report(&g.manifest))?;
    println!(
        "wrote {} users, {} tweets, {} follows, {} interactions to {}",
        g.manifest.n_users,
        g.manifest.n_tweets,
        g.manifest.n_follows,
        g.manifest.n_interactions,
        a.out.display()
    );
    Ok(())
}

fn validate(a: CorpusArgs) -> Result<(), CliError> {
    let paths = a.paths()?;
    let c = read_corpus(&paths, a.snapshot(&paths)?)?;
    let violations = validate_corpus(&c);
    for v in &violations {
        println!("{v}");
    }
    println!("{} violations", violations.len());
    let dist = c.label_distribution();
    println!("labels: {}", serde_json::to_string(&label_counts_map(&dist))?);
    if violations.is_empty() {
        Ok(())
    } else {
        Err(data_error(format!("{} violations", violations.len())))
    }
}

fn cascades(a: OutArgs) -> Result<(), CliError> {
    let c = a.corpus.load()?;
    let rows: Vec<CascadeRecord> = derive_cascades(&c).iter().map(CascadeRecord::from).collect();
    let path = a.out_file("cascades.jsonl")?;
    write_jsonl(&path, &rows)?;
    println!("{} cascades -> {}", rows.len(), path.display());
    Ok(())
}

fn features(a: OutArgs) -> Result<(), CliError> {
    let c = a.corpus.load()?;
    let lex = a.lexicon()?;
    let table = FeatureTable::new(&c, &lex);
    let rows: Vec<EdgeFeatureRecord> = derive_cascades(&c)
        .iter()
        .flat_map(|m| m.edges.iter())
        .map(|e| EdgeFeatureRecord::new(e, &table.edge_vector(e)))
        .collect();
    let path = a.out_file("features.jsonl")?;
    write_jsonl(&path, &rows)?;
    println!("{} edge vectors -> {}", rows.len(), path.display());
    Ok(())
}

fn train(a: TrainArgs, baseline: bool) -> Result<(), CliError> {
    let c = a.common.corpus.load()?;
    let lex = a.common.lexicon()?;
    let table = FeatureTable::new(&c, &lex);
    let split = split_messages(&labeled_messages(&c), a.ratios, a.seed)?;
    let config = BlrConfig {
        sigma2: a.sigma2,
        max_iters: a.max_iters,
        seed: a.seed,
        ..Default::default()
    };
    let (model, name) = if baseline {
        (train_baseline_model(&table, &split.train, a.mode, &config)?, "baseline.json")
    } else {
        let cascades = derive_cascades(&c);
        (train_crowd_model(&table, &cascades, &split.train, a.mode, &config)?, "model.json")
    };
    log::info!(
        "trained on {} samples in {} iterations (converged: {})",
        model.meta.n_samples,
        model.meta.iterations,
        model.meta.converged
    );
    write_text(&a.common.out_file(name)?, &(model.to_json() + "\n"))?;
    write_json(&a.common.out_file("split.json")?, &split)?;
    Ok(())
}

fn predict(a: PredictArgs) -> Result<(), CliError> {
    let c = a.common.corpus.load()?;
    let lex = a.common.lexicon()?;
    let table = FeatureTable::new(&c, &lex);
    let model: BlrModel = read_json(&a.model)?;
    let baseline: BlrModel = read_json(&a.baseline)?;
    if model.mode != baseline.mode {
        return Err(CliError::Usage("model and baseline use different label modes".into()));
    }
    let ids: Vec<String> = match &a.split {
        Some(p) => read_json::<Split>(p)?.test,
        None => c.tweets().iter().map(|t| t.tweet_id.clone()).collect(),
    };
    let cascades = derive_cascades(&c);
    let cro = predict_crowdsourced(&table, &cascades, &model, &baseline, &ids)?;
    let non = predict_noncrowdsourced(&table, &baseline, &ids)?;
    let rows: Vec<VerdictRecord> = cro.iter().map(VerdictRecord::from).collect();
    write_jsonl(&a.common.out_file("verdicts.jsonl")?, &rows)?;
    let rows: Vec<VerdictRecord> = non.iter().map(VerdictRecord::from).collect();
    write_jsonl(&a.common.out_file("verdicts.baseline.jsonl")?, &rows)?;
    println!("{} verdicts -> {}", cro.len(), a.common.out.display());
    Ok(())
}

fn report_for(c: &Corpus, verdicts: &[VerdictRecord], mode: LabelMode) -> Result<EvalReport, CliError> {
    let classes: Vec<String> = mode.classes().iter().map(|s| (*s).to_owned()).collect();
    let mut ids = Vec::new();
    let mut preds = Vec::new();
    let mut truths = Vec::new();
    for v in verdicts {
        let t = c
            .tweet(&v.message_id)
            .ok_or_else(|| data_error(format!("verdict for unknown message {}", v.message_id)))?;
        let Some(label) = t.label else { continue };
        let pred = classes
            .iter()
            .position(|k| *k == v.label)
            .ok_or_else(|| CliError::Usage(format!("label `{}` is not a {mode:?} class", v.label)))?;
        ids.push(v.message_id.clone());
        preds.push(pred);
        truths.push(mode.class_of(label));
    }
    Ok(evaluate(&classes, &ids, &preds, &truths)?)
}

fn evaluate_cmd(a: EvaluateArgs) -> Result<(), CliError> {
    let c = a.corpus.load()?;
    let crowdsourced = report_for(&c, &read_verdicts(&a.verdicts)?, a.mode)?;
    let noncrowdsourced = match &a.baseline_verdicts {
        Some(p) => Some(report_for(&c, &read_verdicts(p)?, a.mode)?),
        None => None,
    };
    let comparison = match &noncrowdsourced {
        Some(n) => Some(compare_models(&crowdsourced, n)?),
        None => None,
    };
    match &comparison {
        Some(cmp) => print!("{}", cmp.table()),
        None => println!(
            "accuracy {:.4}, macro-F1 {:.4}",
            crowdsourced.accuracy, crowdsourced.macro_f1
        ),
    }
    std::fs::create_dir_all(&a.out)?;
    write_json(
        &a.out.join("report.json"),
        &Report {
            crowdsourced,
            noncrowdsourced,
            comparison,
        },
    )
}

fn rank(a: RankArgs) -> Result<(), CliError> {
    let c = a.common.corpus.load()?;
    let lex = a.common.lexicon()?;
    let table = FeatureTable::new(&c, &lex);
    let cascades = derive_cascades(&c);
    let config = ForestConfig {
        n_trees: a.trees,
        seed: a.seed,
        ..Default::default()
    };
    let groups = [
        user_ranking_data(&c, &table),
        edge_ranking_data(&table, &cascades, EdgeGroup::Offensive, Some(a.max_rows)),
        edge_ranking_data(&table, &cascades, EdgeGroup::Normal, Some(a.max_rows)),
    ];
    for data in &groups {
        log::info!("ranking group {} on {} rows", data.group, data.rows.len());
        let forest = match data.fit(&config) {
            Ok(f) => f,
            Err(e) => {
                log::warn!("skipping group {}: {e}", data.group);
                continue;
            }
        };
        let rows = rf_rank_features(&forest, a.top_k);
        let tsv = ranking_tsv(&rows);
        println!("== {} (oob accuracy {:?})\n{tsv}", data.group, forest.oob_accuracy);
        write_text(&a.common.out_file(&format!("ranking.{}.tsv", data.group))?, &tsv)?;
        write_text(
            &a.common.out_file(&format!("forest.{}.json", data.group))?,
            &(forest.to_json() + "\n"),
        )?;
    }
    Ok(())
}

fn persona(a: OutArgs) -> Result<(), CliError> {
    let c = a.corpus.load()?;
    let rows = persona_report(&c);
    let mut classes = std::collections::BTreeMap::new();
    for r in &rows {
        *classes
            .entry(serde_json::to_value(r.discriminator)?.as_str().unwrap_or("").to_owned())
            .or_insert(0usize) += 1;
    }
    write_jsonl(&a.out_file("persona.jsonl")?, &rows)?;
    println!("{}", serde_json::to_string(&classes)?);
    Ok(())
}
