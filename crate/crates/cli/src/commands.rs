use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use cordir::bm25::{build_index, Bm25Params, InvertedIndex};
use cordir::contrastive::{train, PairConfig, TrainConfig};
use cordir::corpus::{build_corpus, filter_candidates, load_metadata, Corpus};
use cordir::dense::{load_embeddings, StoreKind, WordVariances};
use cordir::eval::{
    average_precision, compare_runs, load_qrels, load_topics, precision_at_k, read_run, write_run, RankedRun,
    Topic, TopicFormat,
};
use cordir::rankers::{run_topics, RankerInputs, RankerRegistry};
use cordir::textprep::{preprocess, PrepConfig};

use crate::args::{
    Bm25Args, Command, CompareArgs, EvalArgs, IndexArgs, IngestArgs, PrepArgs, RankerName, RunArgs, SearchArgs,
    TrainArgs,
};
use crate::error::Failure;

type Result<T> = std::result::Result<T, Failure>;

pub fn execute(command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => ingest(a),
        Command::Index(a) => index(a),
        Command::Search(a) => search(a),
        Command::Run(a) => run(a),
        Command::Train(a) => train_cmd(a),
        Command::Compare(a) => compare(a),
        Command::Eval(a) => eval(a),
    }
}

/// Inputs are checked before any work starts.
fn require(path: &Path) -> Result<()> {
    if path.exists() {
        Ok(())
    } else {
        Err(Failure::usage(format!("input not found: {}", path.display())))
    }
}

fn require_opt(path: &Option<PathBuf>) -> Result<()> {
    path.as_deref().map_or(Ok(()), require)
}

fn prep_config(a: &PrepArgs) -> Result<PrepConfig> {
    let mut prep = PrepConfig::default();
    if let Some(path) = &a.stopwords {
        prep = prep.with_stopword_file(path)?;
    }
    prep.remove_stopwords = !a.no_stopwords;
    prep.stem = !a.no_stem;
    Ok(prep)
}

fn bm25_params(a: Bm25Args) -> Result<Bm25Params> {
    if !(a.k1 >= 0.0 && (0.0..=1.0).contains(&a.b)) {
        return Err(Failure::usage(format!("need k1 >= 0 and 0 <= b <= 1, got k1={} b={}", a.k1, a.b)));
    }
    Ok(Bm25Params { k1: a.k1, b: a.b })
}

fn topic_format(path: &Path, explicit: Option<TopicFormat>) -> TopicFormat {
    explicit.unwrap_or_else(|| TopicFormat::from_path(path))
}

fn ingest(a: IngestArgs) -> Result<()> {
    require(&a.metadata)?;
    require(&a.json_dir)?;
    require_opt(&a.docids)?;
    let table = load_metadata(&a.metadata)?;
    let build = build_corpus(&table, &a.json_dir, !a.keep_empty_abstracts)?;
    let mut corpus = build.corpus;
    eprintln!("{}", corpus.source_note);
    if table.duplicates > 0 || !table.malformed_lines.is_empty() {
        eprintln!(
            "skipped {} duplicate and {} malformed metadata rows",
            table.duplicates,
            table.malformed_lines.len()
        );
    }
    for (id, reason) in &build.parse_errors {
        eprintln!("parse error for {id}: {reason}");
    }
    if let Some(path) = &a.docids {
        let filtered = filter_candidates(&corpus, path)?;
        eprintln!(
            "candidate filter kept {} documents; {} listed ids not in the corpus",
            filtered.corpus.len(),
            filtered.missing_ids
        );
        if filtered.empty_candidate_set {
            eprintln!("warning: no document survived the candidate filter");
        }
        corpus = filtered.corpus;
    }
    corpus.write_snapshot(&a.out)?;
    eprintln!("wrote {} documents to {}", corpus.len(), a.out.display());
    Ok(())
}

fn index(a: IndexArgs) -> Result<()> {
    require(&a.corpus)?;
    require_opt(&a.prep.stopwords)?;
    let corpus = Corpus::read_snapshot(&a.corpus)?;
    let index = build_index(&corpus, a.fields, &prep_config(&a.prep)?)?;
    index.save(&a.out)?;
    eprintln!(
        "indexed {} documents, {} terms, avgdl {:.2}",
        index.n_docs(),
        index.terms().count(),
        index.avgdl()
    );
    Ok(())
}

fn search(a: SearchArgs) -> Result<()> {
    require(&a.index)?;
    let params = bm25_params(a.bm25)?;
    let index = InvertedIndex::load(&a.index)?;
    let hits = index.search(&index.tokenize_query(&a.query), a.k as usize, params);
    let mut out = BufWriter::new(std::io::stdout().lock());
    for (rank, hit) in hits.iter().enumerate() {
        writeln!(out, "{}\t{}\t{}", rank + 1, hit.doc_id, hit.score)?;
    }
    out.flush()?;
    Ok(())
}

fn run(a: RunArgs) -> Result<()> {
    require(&a.topics)?;
    require_opt(&a.index)?;
    require_opt(&a.corpus)?;
    require_opt(&a.embeddings)?;
    require_opt(&a.prep.stopwords)?;
    let needed: &[(&str, bool)] = match a.ranker {
        RankerName::Bm25 => &[("--index", a.index.is_some())],
        RankerName::Bag | RankerName::Dense => {
            &[("--corpus", a.corpus.is_some()), ("--embeddings", a.embeddings.is_some())]
        }
    };
    if let Some((flag, _)) = needed.iter().find(|(_, given)| !given) {
        return Err(Failure::usage(format!("ranker {} needs {flag}", a.ranker.as_str())));
    }

    let topics = load_topics(&a.topics, topic_format(&a.topics, a.topic_format))?;
    let index = a.index.as_deref().map(InvertedIndex::load).transpose()?;
    let corpus = a.corpus.as_deref().map(Corpus::read_snapshot).transpose()?;
    let kind = match a.ranker {
        RankerName::Dense => StoreKind::Document,
        _ => StoreKind::Word,
    };
    let embeddings = a.embeddings.as_deref().map(|p| load_embeddings(p, kind)).transpose()?;

    let inputs = RankerInputs {
        corpus: corpus.as_ref(),
        index: index.as_ref(),
        embeddings: embeddings.as_ref(),
        bm25: bm25_params(a.bm25)?,
        metric: a.metric,
        variances: WordVariances::uniform(a.variance)?,
        fields: a.fields,
        prep: prep_config(&a.prep)?,
    };
    let ranker = RankerRegistry::default().build(a.ranker.as_str(), &inputs)?;
    let tag = a.tag.unwrap_or_else(|| a.ranker.as_str().to_string());
    let run = run_topics(ranker.as_ref(), &topics, a.field, a.k as usize, &tag)?;

    let mut out = BufWriter::new(File::create(&a.out)?);
    write_run(&run, &mut out)?;
    out.flush()?;
    let empty = run.per_topic.values().filter(|h| h.is_empty()).count();
    eprintln!(
        "{}: {} topics ({} with no hits), field {}, depth {}",
        tag,
        topics.len(),
        empty,
        a.field,
        a.k
    );
    Ok(())
}

fn train_cmd(a: TrainArgs) -> Result<()> {
    require(&a.corpus)?;
    require_opt(&a.prep.stopwords)?;
    let corpus = Corpus::read_snapshot(&a.corpus)?;
    let prep = prep_config(&a.prep)?;
    let documents: Vec<Vec<String>> = corpus.iter().map(|d| preprocess(&a.fields.text_of(d), &prep)).collect();

    let mut pairs = PairConfig::for_method(a.pairs);
    if let Some(span) = a.span {
        pairs.span_fraction = span;
    }
    pairs.delete_prob = a.delete_prob;
    pairs.seed = a.seed;
    let config = TrainConfig {
        dim: a.dim as usize,
        steps: a.steps as usize,
        batch_size: a.batch_size as usize,
        lr: a.lr,
        temperature: a.temperature,
        queue_capacity: a.queue as usize,
        score: a.score,
        pairs,
        init_scale: a.init_scale,
        init_seed: a.seed,
    };
    let outcome = train(&documents, &config)?;
    outcome.state.save(&a.out)?;
    if let Some(path) = &a.losses {
        let mut text = String::new();
        for l in &outcome.losses {
            let _ = writeln!(text, "{l}");
        }
        fs::write(path, text)?;
    }
    match (outcome.losses.first(), outcome.losses.last()) {
        (Some(first), Some(last)) => eprintln!(
            "{} steps over {} documents; loss {first:.4} -> {last:.4}; vocabulary {}",
            outcome.losses.len(),
            documents.len(),
            outcome.state.vocab_size()
        ),
        _ => eprintln!("exported untrained encoder; vocabulary {}", outcome.state.vocab_size()),
    }
    Ok(())
}

fn load_run(path: &Path) -> Result<RankedRun> {
    Ok(read_run(BufReader::new(File::open(path)?))?)
}

fn file_label(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn compare(a: CompareArgs) -> Result<()> {
    for p in &a.runs {
        require(p)?;
    }
    require_opt(&a.topics)?;
    let mut runs = a.runs.iter().map(|p| load_run(p)).collect::<Result<Vec<_>>>()?;

    // a run file cannot list a topic with no hits, so align topic sets
    let mut topics: BTreeSet<u32> = runs.iter().flat_map(RankedRun::topics).collect();
    if let Some(path) = &a.topics {
        let listed: Vec<Topic> = load_topics(path, topic_format(path, a.topic_format))?;
        topics.extend(listed.iter().map(|t| t.topic_id));
    }
    for r in &mut runs {
        r.cover_topics(topics.iter().copied());
    }

    let tags: BTreeSet<&str> = runs.iter().map(|r| r.run_tag.as_str()).collect();
    if tags.len() < runs.len() || tags.contains("") {
        for (r, p) in runs.iter_mut().zip(&a.runs) {
            r.run_tag = file_label(p);
        }
    }

    let report = compare_runs(&runs, a.k as usize)?;
    match &a.out {
        Some(path) => fs::write(path, report.to_text())?,
        None => print!("{}", report.to_text()),
    }
    if let Some(path) = &a.json {
        fs::write(path, report.to_json())?;
    }
    Ok(())
}

fn eval(a: EvalArgs) -> Result<()> {
    require(&a.qrels)?;
    for p in &a.runs {
        require(p)?;
    }
    let qrels = load_qrels(&a.qrels)?;
    let k = a.k as usize;

    let mut rows = Vec::new();
    for path in &a.runs {
        let run = load_run(path)?;
        let label = if run.run_tag.is_empty() { file_label(path) } else { run.run_tag.clone() };
        let p = precision_at_k(&run, &qrels, k, a.min_grade);
        let ap = average_precision(&run, &qrels, a.min_grade);
        rows.push((label, run.per_topic.len(), p.mean, ap.mean));
    }

    let width = rows.iter().map(|r| r.0.len()).max().unwrap_or(0).max("run".len());
    let p_label = format!("P@{k}");
    let mut text = String::new();
    let _ = writeln!(text, "# min grade {}; unjudged documents count as non-relevant", a.min_grade);
    let _ = writeln!(text, "{:<width$}  {:>6}  {:>8}  {:>8}", "run", "topics", p_label, "MAP");
    for (label, n, p, ap) in &rows {
        let _ = writeln!(text, "{label:<width$}  {n:>6}  {p:>8.4}  {ap:>8.4}");
    }
    match &a.out {
        Some(path) => fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
