//! Command-line pipelines over record files: labeling, matching,
//! evaluation, statistics, splits, undersampling, triplet construction,
//! the chi-squared test, and DOT visualization.
//!
//! Standard output carries exactly one machine-readable result line per
//! command; diagnostics go to standard error and flip the exit status.

mod stream;

use std::collections::{HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use editalign::analysis::{
    chi_squared_independence, label_f1, set_f1, ContingencyTable, MatchEvalReport,
};
use editalign::corpus::{
    build_triplets, corpus_stats, read_records, stratified_split, undersample, write_records,
    PatentRecord, SplitSpec,
};
use editalign::labeling::{derive_labels, match_document, EditLabel, LabelConfig, PerClass};
use editalign::ScorerSpec;

#[derive(Parser)]
#[command(
    name = "editalign",
    version,
    about = "Sentence alignment and edit labeling between draft and final document revisions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive edit labels and match edges for every record
    Label(LabelCmd),
    /// Compute match edges only, leaving any existing labels untouched
    Match(MatchCmd),
    /// Score predicted match edges against gold edges, pooled across records
    EvalMatch(EvalCmd),
    /// Score predicted edit labels against gold labels, pooled across records
    EvalLabels(EvalCmd),
    /// Print label distribution statistics for a labeled record file
    Stats(StatsCmd),
    /// Split a labeled record file into train/validation/test files
    Split(SplitCmd),
    /// Balance per-sentence examples by undersampling majority classes
    Undersample(UndersampleCmd),
    /// Build (anchor, positive, negative) triplets from edited sentences
    Triplets(TripletsCmd),
    /// Chi-squared test of independence on a counts table
    Chi2(Chi2Cmd),
    /// Emit a DOT bipartite graph of one record's match edges
    Viz(VizCmd),
}

/// Labeling parameters; every flag overrides the config file and the
/// built-in defaults.
#[derive(Args, Clone)]
struct ConfigArgs {
    /// Flat key-value config file (keys match these flags); flags win
    #[arg(long)]
    config: Option<PathBuf>,
    /// Matching scorer: bleu1|bleu4|rouge1|rougeL|meteor|chrf or external:<path> [default: rougeL]
    #[arg(long)]
    match_scorer: Option<String>,
    /// Matching algorithm: draft_greedy|final_greedy|match_and_cover [default: match_and_cover]
    #[arg(long)]
    match_algorithm: Option<String>,
    /// Minimum similarity for an edge; drafts below it are deleted [default: 0.45]
    #[arg(long)]
    deleted_threshold: Option<f64>,
    /// Remaining-token fraction at which match-and-cover stops covering a final sentence [default: 0.3]
    #[arg(long)]
    fraction_limit: Option<f64>,
    /// Metric deciding kept vs edited on matched pairs [default: bleu4]
    #[arg(long)]
    kept_metric: Option<String>,
    /// Minimum kept-metric score for a matched draft to stay kept [default: 0.88]
    #[arg(long)]
    kept_threshold: Option<f64>,
}

impl ConfigArgs {
    fn build(&self) -> Result<LabelConfig> {
        let mut config = match &self.config {
            Some(path) => LabelConfig::from_file(path)
                .with_context(|| format!("config {}", path.display()))?,
            None => LabelConfig::default(),
        };
        if let Some(value) = &self.match_scorer {
            config.match_scorer = ScorerSpec::parse(value)?;
        }
        if let Some(value) = &self.match_algorithm {
            config.match_algorithm = value.parse()?;
        }
        if let Some(value) = self.deleted_threshold {
            config.deleted_threshold = value;
        }
        if let Some(value) = self.fraction_limit {
            config.fraction_limit = value;
        }
        if let Some(value) = &self.kept_metric {
            config.kept_metric = value.parse()?;
        }
        if let Some(value) = self.kept_threshold {
            config.kept_threshold = value;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
struct LabelCmd {
    /// Input record file (one JSON object per line)
    #[arg(long)]
    input: PathBuf,
    /// Output record file
    #[arg(long)]
    output: PathBuf,
    /// Worker threads; output order is input order regardless
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct MatchCmd {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct EvalCmd {
    /// Record file with predicted labels/edges
    #[arg(long)]
    predicted: PathBuf,
    /// Record file with gold labels/edges; paired with predictions by id
    #[arg(long)]
    gold: PathBuf,
}

#[derive(Args)]
struct StatsCmd {
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct SplitCmd {
    #[arg(long)]
    input: PathBuf,
    /// Directory receiving train.jsonl, validation.jsonl, and test.jsonl
    #[arg(long)]
    output_dir: PathBuf,
    #[arg(long, default_value_t = 0.8)]
    train_fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    validation_fraction: f64,
    #[arg(long, default_value_t = 0.1)]
    test_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct UndersampleCmd {
    /// Labeled record file; draft sentences become the examples
    #[arg(long)]
    input: PathBuf,
    /// Output file of {"sentence": ..., "label": ...} lines
    #[arg(long)]
    output: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct TripletsCmd {
    /// Labeled record file with edges
    #[arg(long)]
    input: PathBuf,
    /// Output file of {"anchor", "positive", "negative", "record_id"} lines
    #[arg(long)]
    output: PathBuf,
    /// Scorer ranking cited sentences against the draft sentence, or
    /// external:<dir> with one <record id>.txt grid per record
    #[arg(long, default_value = "rougeL")]
    ranker: String,
    /// Stop after this many triplets
    #[arg(long)]
    limit: Option<usize>,
}

#[derive(Args)]
struct Chi2Cmd {
    /// Counts table: one row of space-separated non-negative integers per line
    #[arg(long)]
    input: PathBuf,
}

#[derive(Args)]
struct VizCmd {
    #[arg(long)]
    input: PathBuf,
    /// Record to visualize
    #[arg(long)]
    record_id: String,
    /// Output DOT file
    #[arg(long)]
    output: PathBuf,
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Label(cmd) => cmd_label(cmd),
        Command::Match(cmd) => cmd_match(cmd),
        Command::EvalMatch(cmd) => cmd_eval_match(cmd),
        Command::EvalLabels(cmd) => cmd_eval_labels(cmd),
        Command::Stats(cmd) => cmd_stats(cmd),
        Command::Split(cmd) => cmd_split(cmd),
        Command::Undersample(cmd) => cmd_undersample(cmd),
        Command::Triplets(cmd) => cmd_triplets(cmd),
        Command::Chi2(cmd) => cmd_chi2(cmd),
        Command::Viz(cmd) => cmd_viz(cmd),
    }
}

fn cmd_label(cmd: LabelCmd) -> Result<()> {
    let config = cmd.config.build()?;
    let mut counts = PerClass::<usize>::default();
    let records = stream::process_records(
        &cmd.input,
        &cmd.output,
        cmd.threads,
        |mut record| {
            let (labels, edges) = derive_labels(&record.draft, &record.final_, &config)?;
            record.edges = Some(edges.iter().map(|e| (e.draft_index, e.final_index)).collect());
            record.labels = Some(labels);
            Ok(record)
        },
        |record| {
            for label in record.labels.as_deref().unwrap_or_default() {
                *counts.get_mut(*label) += 1;
            }
        },
    )?;
    println!(
        r#"{{"records":{},"keep":{},"edit":{},"del":{}}}"#,
        records, counts.keep, counts.edit, counts.del
    );
    Ok(())
}

fn cmd_match(cmd: MatchCmd) -> Result<()> {
    let config = cmd.config.build()?;
    let mut edge_total = 0usize;
    let records = stream::process_records(
        &cmd.input,
        &cmd.output,
        cmd.threads,
        |mut record| {
            let edges = match_document(&record.draft, &record.final_, &config)?;
            record.edges = Some(edges.iter().map(|e| (e.draft_index, e.final_index)).collect());
            Ok(record)
        },
        |record| edge_total += record.edges.as_deref().unwrap_or_default().len(),
    )?;
    println!(r#"{{"records":{records},"edges":{edge_total}}}"#);
    Ok(())
}

/// Reads a record file into an id-keyed map, rejecting duplicate ids.
fn records_by_id(path: &Path) -> Result<(Vec<String>, HashMap<String, PatentRecord>)> {
    let mut order = Vec::new();
    let mut map = HashMap::new();
    for record in read_records(path).with_context(|| format!("{}", path.display()))? {
        if map.contains_key(&record.id) {
            bail!("{}: duplicate record id `{}`", path.display(), record.id);
        }
        order.push(record.id.clone());
        map.insert(record.id.clone(), record);
    }
    Ok((order, map))
}

/// Pairs two record files by id, erroring on ids present in only one file.
fn paired_records(cmd: &EvalCmd) -> Result<Vec<(String, PatentRecord, PatentRecord)>> {
    let (order, mut predicted) = records_by_id(&cmd.predicted)?;
    let (_, mut gold) = records_by_id(&cmd.gold)?;
    for id in gold.keys() {
        if !predicted.contains_key(id) {
            bail!("record id `{id}` is only in {}", cmd.gold.display());
        }
    }
    let mut pairs = Vec::with_capacity(order.len());
    for id in order {
        let p = predicted.remove(&id).expect("order comes from the map");
        let Some(g) = gold.remove(&id) else {
            bail!("record id `{id}` is only in {}", cmd.predicted.display());
        };
        pairs.push((id, p, g));
    }
    Ok(pairs)
}

fn cmd_eval_match(cmd: EvalCmd) -> Result<()> {
    let mut predicted_pool: HashSet<(usize, usize, usize)> = HashSet::new();
    let mut gold_pool: HashSet<(usize, usize, usize)> = HashSet::new();
    for (record_index, (_, predicted, gold)) in paired_records(&cmd)?.into_iter().enumerate() {
        for (d, f) in predicted.edges.unwrap_or_default() {
            predicted_pool.insert((record_index, d, f));
        }
        for (d, f) in gold.edges.unwrap_or_default() {
            gold_pool.insert((record_index, d, f));
        }
    }
    let (precision, recall, f1) = set_f1(&predicted_pool, &gold_pool);
    println!("{}", MatchEvalReport { precision, recall, f1 }.to_json());
    Ok(())
}

fn cmd_eval_labels(cmd: EvalCmd) -> Result<()> {
    let mut predicted_labels = Vec::new();
    let mut gold_labels = Vec::new();
    for (id, predicted, gold) in paired_records(&cmd)? {
        let p = predicted
            .labels
            .with_context(|| format!("record `{id}` in {} has no labels", cmd.predicted.display()))?;
        let g = gold
            .labels
            .with_context(|| format!("record `{id}` in {} has no labels", cmd.gold.display()))?;
        if p.len() != g.len() {
            bail!(
                "record `{id}`: {} predicted labels vs {} gold labels",
                p.len(),
                g.len()
            );
        }
        predicted_labels.extend(p);
        gold_labels.extend(g);
    }
    let report = label_f1(&predicted_labels, &gold_labels)?;
    println!("{}", report.to_json());
    Ok(())
}

fn cmd_stats(cmd: StatsCmd) -> Result<()> {
    let records = read_records(&cmd.input)?;
    let stats = corpus_stats(&records)?;
    println!(
        r#"{{"records":{},"sentences":{},"mean_sentences_per_record":{:.4},"counts":{{"keep":{},"edit":{},"del":{}}},"fractions":{{"keep":{:.4},"edit":{:.4},"del":{:.4}}}}}"#,
        stats.records,
        stats.sentences,
        stats.mean_sentences_per_record,
        stats.counts.keep,
        stats.counts.edit,
        stats.counts.del,
        stats.fractions.keep,
        stats.fractions.edit,
        stats.fractions.del
    );
    Ok(())
}

fn cmd_split(cmd: SplitCmd) -> Result<()> {
    let records = read_records(&cmd.input)?;
    let spec = SplitSpec {
        train_fraction: cmd.train_fraction,
        validation_fraction: cmd.validation_fraction,
        test_fraction: cmd.test_fraction,
        seed: cmd.seed,
    };
    let (train, validation, test) = stratified_split(&records, &spec)?;
    std::fs::create_dir_all(&cmd.output_dir)
        .with_context(|| format!("cannot create {}", cmd.output_dir.display()))?;
    write_records(&train, &cmd.output_dir.join("train.jsonl"))?;
    write_records(&validation, &cmd.output_dir.join("validation.jsonl"))?;
    write_records(&test, &cmd.output_dir.join("test.jsonl"))?;
    println!(
        r#"{{"train":{},"validation":{},"test":{}}}"#,
        train.len(),
        validation.len(),
        test.len()
    );
    Ok(())
}

fn cmd_undersample(cmd: UndersampleCmd) -> Result<()> {
    let records = read_records(&cmd.input)?;
    let mut examples: Vec<(String, EditLabel)> = Vec::new();
    for record in &records {
        let labels = record
            .labels
            .as_ref()
            .with_context(|| format!("record `{}` has no labels", record.id))?;
        for (sentence, label) in record.draft.iter().zip(labels) {
            examples.push((sentence.clone(), *label));
        }
    }
    let balanced = undersample(&examples, cmd.seed);
    let mut writer = std::io::BufWriter::new(
        File::create(&cmd.output)
            .with_context(|| format!("cannot create {}", cmd.output.display()))?,
    );
    for (sentence, label) in &balanced {
        writeln!(
            writer,
            r#"{{"sentence":{},"label":"{}"}}"#,
            serde_json::to_string(sentence)?,
            label
        )?;
    }
    writer.flush()?;
    println!(r#"{{"input":{},"output":{}}}"#, examples.len(), balanced.len());
    Ok(())
}

fn cmd_triplets(cmd: TripletsCmd) -> Result<()> {
    let records = read_records(&cmd.input)?;
    let ranker = ScorerSpec::parse(&cmd.ranker)?;
    let triplets = build_triplets(&records, &ranker, cmd.limit)?;
    let mut writer = std::io::BufWriter::new(
        File::create(&cmd.output)
            .with_context(|| format!("cannot create {}", cmd.output.display()))?,
    );
    for triplet in &triplets {
        writeln!(writer, "{}", serde_json::to_string(triplet)?)?;
    }
    writer.flush()?;
    println!(r#"{{"triplets":{}}}"#, triplets.len());
    Ok(())
}

fn cmd_chi2(cmd: Chi2Cmd) -> Result<()> {
    let reader = BufReader::new(
        File::open(&cmd.input).with_context(|| format!("cannot open {}", cmd.input.display()))?,
    );
    let mut counts: Vec<Vec<u64>> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let row: Vec<u64> = line
            .split_whitespace()
            .map(|tok| {
                tok.parse()
                    .with_context(|| format!("line {}: `{tok}` is not a count", idx + 1))
            })
            .collect::<Result<_>>()?;
        counts.push(row);
    }
    let table = ContingencyTable::from_counts(counts)?;
    let result = chi_squared_independence(&table)?;
    // tiny p-values fall back to scientific notation; 4 decimals otherwise
    let p = if result.p_value > 0.0 && result.p_value < 1e-4 {
        format!("{:.4e}", result.p_value)
    } else {
        format!("{:.4}", result.p_value)
    };
    println!("statistic {:.4} dof {} p {}", result.statistic, result.dof, p);
    Ok(())
}

fn dot_escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}

fn cmd_viz(cmd: VizCmd) -> Result<()> {
    let records = read_records(&cmd.input)?;
    let record = records
        .iter()
        .find(|r| r.id == cmd.record_id)
        .with_context(|| {
            format!("no record with id `{}` in {}", cmd.record_id, cmd.input.display())
        })?;
    let edges: &[(usize, usize)] = record.edges.as_deref().unwrap_or_default();

    let mut dot = String::new();
    dot.push_str(&format!("digraph \"{}\" {{\n", dot_escape(&record.id)));
    dot.push_str("  rankdir=LR;\n  node [shape=box];\n");
    dot.push_str("  subgraph cluster_draft {\n    label=\"draft\";\n");
    for i in 0..record.draft.len() {
        dot.push_str(&format!("    d{i};\n"));
    }
    dot.push_str("  }\n");
    dot.push_str("  subgraph cluster_final {\n    label=\"final\";\n");
    for j in 0..record.final_.len() {
        dot.push_str(&format!("    f{j};\n"));
    }
    dot.push_str("  }\n");
    for &(draft_index, final_index) in edges {
        match record.labels.as_ref().map(|labels| labels[draft_index]) {
            Some(label) => dot.push_str(&format!(
                "  d{draft_index} -> f{final_index} [label=\"{label}\"];\n"
            )),
            None => dot.push_str(&format!("  d{draft_index} -> f{final_index};\n")),
        }
    }
    dot.push_str("}\n");

    std::fs::write(&cmd.output, dot)
        .with_context(|| format!("cannot write {}", cmd.output.display()))?;
    println!(
        r#"{{"record":{},"nodes":{},"edges":{}}}"#,
        serde_json::to_string(&record.id)?,
        record.draft.len() + record.final_.len(),
        edges.len()
    );
    Ok(())
}
