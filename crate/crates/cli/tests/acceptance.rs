//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Tolerances and time limits are fixed here.

#[path = "../../core/tests/common/mod.rs"]
mod oracle;

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use cordir::bm25::{build_index, idf_value, Bm25Params, FieldSelector, InvertedIndex};
use cordir::contrastive::{
    info_nce, info_nce_grad, make_pair, train, EncoderState, PairConfig, ScoreFn, TrainConfig,
};
use cordir::corpus::{Corpus, Document};
use cordir::dense::{gaussian_overlap, GaussianEmbedding};
use cordir::eval::{
    overlap_stats, parse_topics_csv, parse_topics_xml, read_run, write_run, write_topics_csv, write_topics_xml,
    RankedRun, Topic,
};
use cordir::ranking::ScoredDoc;
use cordir::textprep::{preprocess, PrepConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit_s: f64) -> Result<(), String> {
    check(elapsed.as_secs_f64() < limit_s, || {
        format!("took {:.2}s, limit {limit_s}s", elapsed.as_secs_f64())
    })
}

// ---------------------------------------------------------------- 1

fn corpus_of(docs: &[(String, Vec<String>)]) -> Corpus {
    Corpus::new(
        docs.iter()
            .map(|(id, toks)| Document {
                doc_id: id.clone(),
                title: toks.join(" "),
                abstract_text: String::new(),
                body: String::new(),
            })
            .collect(),
        "generated",
    )
}

fn bm25_oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (corpora, queries_per) = (25, 8);
    let mut worst = 0.0f64;
    for c in 0..corpora {
        let docs = oracle::random_token_corpus(&mut rng, 20, 30);
        let index = build_index(&corpus_of(&docs), FieldSelector::default(), &PrepConfig::whitespace_only())
            .map_err(|e| e.to_string())?;
        for _ in 0..queries_per {
            let q = oracle::random_query(&mut rng, 30);
            let ours = index.search(&q, usize::MAX, Bm25Params::default());
            let theirs = oracle::bm25_brute(&docs, &q, 1.2, 0.75);
            let ids_a: Vec<&str> = ours.iter().map(|h| h.doc_id.as_str()).collect();
            let ids_b: Vec<&str> = theirs.iter().map(|(d, _)| d.as_str()).collect();
            check(ids_a == ids_b, || format!("corpus {c}, query {q:?}: order {ids_a:?} vs {ids_b:?}"))?;
            for (h, (_, s)) in ours.iter().zip(&theirs) {
                worst = worst.max((h.score - s).abs());
            }
        }
    }
    check(worst <= 1e-9, || format!("max score error {worst:e}"))?;
    within(start.elapsed(), 5.0)?;
    Ok(format!(
        "{corpora} corpora x {queries_per} queries, max |Δscore| {worst:.1e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 2

fn bm25_hand_values() -> Outcome {
    let docs: Vec<(String, Vec<String>)> = vec![
        ("D1".into(), vec!["virus".into(), "spread".into()]),
        ("D2".into(), vec!["virus".into(), "virus".into(), "mask".into(), "mask".into()]),
    ];
    let index = build_index(&corpus_of(&docs), FieldSelector::default(), &PrepConfig::whitespace_only())
        .map_err(|e| e.to_string())?;
    let hits = index.search(&["virus".to_string()], 2, Bm25Params::default());
    let order: Vec<&str> = hits.iter().map(|h| h.doc_id.as_str()).collect();
    check(order == ["D2", "D1"], || format!("order {order:?}"))?;
    let (d2, d1) = (hits[0].score, hits[1].score);
    check((d1 - 0.21112).abs() <= 1e-4, || format!("D1 {d1}"))?;
    check((d2 - 0.22920).abs() <= 1e-4, || format!("D2 {d2}"))?;
    let idf = idf_value(2, 1);
    check((idf - 2f64.ln()).abs() <= 1e-9, || format!("IDF(2,1) {idf}"))?;
    Ok(format!("D1 {d1:.5}, D2 {d2:.5}, IDF(2,1) {idf:.9}"))
}

// ---------------------------------------------------------------- 3

fn infonce_correctness() -> Outcome {
    let start = Instant::now();
    for k in 1..=8usize {
        let v = vec![0.4, -0.1, 0.7];
        let loss = info_nce(&v, &v, &vec![v.clone(); k], 0.3).map_err(|e| e.to_string())?;
        let want = ((k + 1) as f64).ln();
        check((loss - want).abs() <= 1e-9, || format!("uniform K={k}: {loss} vs {want}"))?;
    }
    let single = info_nce(&[1.0], &[1.0], &[vec![0.0]], 1.0).map_err(|e| e.to_string())?;
    let want = (1.0 + (-1f64).exp()).ln();
    check((single - want).abs() <= 1e-9, || format!("single negative {single} vs {want}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let h = 1e-5;
    for _ in 0..100 {
        let dim = rng.random_range(1..=8);
        let k = rng.random_range(1..=8);
        let mut v = || (0..dim).map(|_| rng.random_range(-1.5..1.5)).collect::<Vec<f64>>();
        let (q, pos) = (v(), v());
        let negs: Vec<Vec<f64>> = (0..k).map(|_| v()).collect();
        let tau = rng.random_range(0.1..2.0);
        let g = info_nce_grad(&q, &pos, &negs, tau).map_err(|e| e.to_string())?;
        let f = |q: &[f64], p: &[f64], n: &[Vec<f64>]| info_nce(q, p, n, tau).unwrap();
        let mut pairs: Vec<(f64, f64)> = Vec::new();
        pairs.extend(g.query.iter().copied().zip(oracle::central_diff(|x| f(x, &pos, &negs), &q, h)));
        pairs.extend(g.positive.iter().copied().zip(oracle::central_diff(|x| f(&q, x, &negs), &pos, h)));
        for i in 0..k {
            let numeric = oracle::central_diff(
                |x| {
                    let mut n = negs.clone();
                    n[i] = x.to_vec();
                    f(&q, &pos, &n)
                },
                &negs[i],
                h,
            );
            pairs.extend(g.negatives[i].iter().copied().zip(numeric));
        }
        for (a, n) in pairs {
            worst = worst.max(oracle::rel_err(a, n, 1e-3));
        }
    }
    check(worst <= 1e-4, || format!("max gradient relative error {worst:e}"))?;
    within(start.elapsed(), 10.0)?;
    Ok(format!(
        "ln(K+1) for K=1..8, single-negative case, 100 gradient checks (max rel err {worst:.1e}), {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 4

fn contrastive_sanity() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let docs: Vec<Vec<String>> = oracle::two_topic_corpus(&mut rng, 50, 40).into_iter().map(|(_, t)| t).collect();
    let config = TrainConfig {
        dim: 16,
        steps: 200,
        batch_size: 32,
        lr: 0.5,
        temperature: 0.5,
        queue_capacity: 64,
        score: ScoreFn::Cosine,
        pairs: PairConfig {
            seed: 7,
            ..PairConfig::crop()
        },
        init_scale: 0.1,
        init_seed: 7,
    };
    let out = train(&docs, &config).map_err(|e| e.to_string())?;
    check(out.losses.len() == 200, || format!("{} losses", out.losses.len()))?;
    let windows: Vec<f64> = out.losses.chunks(20).map(|w| w.iter().sum::<f64>() / 20.0).collect();
    check(windows.windows(2).all(|w| w[1] < w[0]), || format!("20-step window means {windows:?}"))?;

    let mut eval_rng = ChaCha8Rng::seed_from_u64(99);
    let (mut pos, mut rnd, mut n) = (0.0, 0.0, 0.0);
    for _ in 0..10 {
        for (i, doc) in docs.iter().enumerate() {
            let (q, k) = make_pair(doc, &config.pairs, &mut eval_rng).map_err(|e| e.to_string())?;
            let j = (i + eval_rng.random_range(1..docs.len())) % docs.len();
            let (_, other) = make_pair(&docs[j], &config.pairs, &mut eval_rng).map_err(|e| e.to_string())?;
            let eq = out.state.encode(&q);
            pos += oracle::cosine(&eq, &out.state.encode(&k));
            rnd += oracle::cosine(&eq, &out.state.encode(&other));
            n += 1.0;
        }
    }
    let (pos, rnd) = (pos / n, rnd / n);
    check(pos - rnd >= 0.1, || format!("positive cosine {pos:.3} vs random {rnd:.3}"))?;
    within(start.elapsed(), 60.0)?;
    Ok(format!(
        "window means {:.3} -> {:.3}, positive cos {pos:.3} vs random {rnd:.3}, {:.2}s",
        windows[0],
        windows[windows.len() - 1],
        start.elapsed().as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 5

fn gaussian_overlap_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = |m: f64, v: f64| GaussianEmbedding::new(vec![m], v).unwrap();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let (m1, m2) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
        let (v1, v2) = (rng.random_range(0.05..4.0), rng.random_range(0.05..4.0));
        let (a, b) = (g(m1, v1), g(m2, v2));
        let closed = gaussian_overlap(&a, &b).map_err(|e| e.to_string())?;
        worst = worst.max((closed - oracle::overlap_quadrature(m1, v1, m2, v2)).abs());
        let back = gaussian_overlap(&b, &a).map_err(|e| e.to_string())?;
        check(closed == back, || format!("asymmetric: {closed} vs {back}"))?;
        let peak = gaussian_overlap(&g(m1, v1), &g(m1, v2)).map_err(|e| e.to_string())?;
        check(peak >= closed, || format!("equal means {peak} < {closed}"))?;
    }
    check(worst <= 1e-6, || format!("max quadrature error {worst:e}"))?;
    Ok(format!("20 pairs, max |closed − quadrature| {worst:.1e}; symmetric; equal means maximal"))
}

// ---------------------------------------------------------------- 6

fn cli() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cordir"))
}

fn run_cli(args: &[&str], cwd: &Path) -> Result<String, String> {
    let out = cli().args(args).current_dir(cwd).output().map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "`cordir {}` exited {:?}: {}",
            args.join(" "),
            out.status.code(),
            String::from_utf8_lossy(&out.stderr).trim()
        ));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn overlap_protocol() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut run = RankedRun::new("sys");
    for t in 1..=40u32 {
        let mut hits: Vec<ScoredDoc> = (0..50)
            .map(|i| ScoredDoc::new(format!("d{}", i * 40 + t), rng.random_range(0.0..10.0)))
            .collect();
        hits.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
        run.per_topic.insert(t, hits);
    }
    for name in ["a", "b", "c"] {
        let mut r = run.clone();
        r.run_tag = name.to_string();
        let mut buf = Vec::new();
        write_run(&r, &mut buf).map_err(|e| e.to_string())?;
        fs::write(dir.path().join(format!("{name}.run")), buf).map_err(|e| e.to_string())?;
    }
    run_cli(&["compare", "a.run", "b.run", "c.run", "--k", "50", "--json", "stats.json"], dir.path())?;
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("stats.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    let rows = json["rows"].as_array().ok_or("no rows")?;
    check(rows.len() == 3, || format!("{} rows", rows.len()))?;
    for row in rows {
        let (mean, std) = (row["mean"].as_f64().unwrap_or(-1.0), row["std"].as_f64().unwrap_or(-1.0));
        check(mean == 50.0 && std == 0.0, || format!("{}: mean {mean} std {std}", row["pair_label"]))?;
        check(row["per_topic_counts"].as_object().map_or(0, |m| m.len()) == 40, || "not 40 topics".into())?;
    }
    let table = run_cli(&["compare", "a.run", "b.run", "c.run"], dir.path())?;
    let body: Vec<&str> = table.lines().skip(2).take_while(|l| !l.is_empty()).collect();
    check(body.len() == 3 && body.iter().all(|l| l.split_whitespace().count() == 3), || {
        format!("table body {body:?}")
    })?;

    let counts: BTreeMap<u32, usize> = [(1, 10), (2, 20), (3, 30)].into_iter().collect();
    let s = overlap_stats(&counts, "x").map_err(|e| e.to_string())?;
    check((s.mean - 20.0).abs() <= 1e-12 && (s.std - 10.0).abs() <= 1e-12, || {
        format!("[10,20,30]: mean {} std {}", s.mean, s.std)
    })?;
    Ok("identical runs: 3 pairs at mean 50 / std 0 over 40 topics; [10,20,30] -> 20 / 10; 3-row table".into())
}

// ---------------------------------------------------------------- 7

fn random_word(rng: &mut ChaCha8Rng, alphabet: &[u8], len: std::ops::RangeInclusive<usize>) -> String {
    let n = rng.random_range(len);
    (0..n).map(|_| alphabet[rng.random_range(0..alphabet.len())] as char).collect()
}

const ID_CHARS: &[u8] = b"abcdefghijklmnopqrstuvwxyz0123456789_-.";
const TEXT_CHARS: &[u8] = b"abcdefghij ABCXYZ 0123 ,;:'\"<>&?()-";

fn random_run(rng: &mut ChaCha8Rng) -> RankedRun {
    let mut run = RankedRun::new(random_word(rng, ID_CHARS, 1..=10));
    for _ in 0..rng.random_range(1..6) {
        let n = rng.random_range(1..30);
        let mut hits: Vec<ScoredDoc> = (0..n)
            .map(|i| ScoredDoc::new(format!("{}{i}", random_word(rng, ID_CHARS, 1..=6)), rng.random_range(-1e4..1e4)))
            .collect();
        hits.sort_by(|a, b| b.score.partial_cmp(&a.score).unwrap());
        run.per_topic.insert(rng.random_range(1..1000), hits);
    }
    run
}

fn random_topic_text(rng: &mut ChaCha8Rng) -> String {
    loop {
        let s = random_word(rng, TEXT_CHARS, 1..=40).trim().to_string();
        if !s.is_empty() {
            return s;
        }
    }
}

fn round_trips() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let cases = 100;

    for i in 0..cases {
        let run = random_run(&mut rng);
        let mut buf = Vec::new();
        write_run(&run, &mut buf).map_err(|e| e.to_string())?;
        let back = read_run(buf.as_slice()).map_err(|e| format!("run {i}: {e}"))?;
        check(back == run, || format!("run {i} differs after round trip"))?;
    }

    for i in 0..cases {
        let docs = oracle::random_token_corpus(&mut rng, 20, 30);
        let prep = if i % 2 == 0 { PrepConfig::default() } else { PrepConfig::whitespace_only() };
        let index = build_index(&corpus_of(&docs), FieldSelector::all(), &prep).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        index.write_to(&mut buf).map_err(|e| e.to_string())?;
        let loaded = InvertedIndex::read_from(buf.as_slice()).map_err(|e| format!("index {i}: {e}"))?;
        let q = oracle::random_query(&mut rng, 30);
        let p = Bm25Params::default();
        check(loaded == index && loaded.search(&q, 10, p) == index.search(&q, 10, p), || {
            format!("index {i} behaves differently after reload")
        })?;
    }

    for i in 0..cases {
        let vocab: Vec<String> = (0..rng.random_range(1..30)).map(|j| format!("{}{j}", random_word(&mut rng, ID_CHARS, 1..=5))).collect();
        let dim = rng.random_range(1..10);
        let scale = 10f64.powi(rng.random_range(-6..6));
        let state = EncoderState::random(vocab, dim, scale, i).map_err(|e| e.to_string())?;
        let mut buf = Vec::new();
        state.to_store().write_to(&mut buf).map_err(|e| e.to_string())?;
        let back = EncoderState::read_from(buf.as_slice()).map_err(|e| format!("checkpoint {i}: {e}"))?;
        check(back == state, || format!("checkpoint {i} differs after round trip"))?;
    }

    for i in 0..cases {
        let mut ids: Vec<u32> = (0..rng.random_range(1..8)).map(|_| rng.random_range(1..500)).collect();
        ids.sort_unstable();
        ids.dedup();
        let topics: Vec<Topic> = ids
            .into_iter()
            .map(|topic_id| Topic {
                topic_id,
                query: random_topic_text(&mut rng),
                question: random_topic_text(&mut rng),
                narrative: random_topic_text(&mut rng),
            })
            .collect();
        let (mut csv, mut xml) = (Vec::new(), Vec::new());
        write_topics_csv(&topics, &mut csv).map_err(|e| e.to_string())?;
        write_topics_xml(&topics, &mut xml).map_err(|e| e.to_string())?;
        let from_csv = parse_topics_csv(&String::from_utf8_lossy(&csv)).map_err(|e| format!("topics {i}: {e}"))?;
        let from_xml = parse_topics_xml(&String::from_utf8_lossy(&xml)).map_err(|e| format!("topics {i}: {e}"))?;
        check(from_csv == topics && from_xml == topics, || format!("topic set {i}: csv/xml disagree"))?;
    }
    Ok(format!("{cases} cases each: run files, index persistence, encoder checkpoints, csv/xml topics"))
}

// ---------------------------------------------------------------- 8

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/toy")
}

const OUTPUTS: &[&str] = &[
    "corpus.jsonl",
    "index.txt",
    "bm25.run",
    "random.emb",
    "bag.run",
    "dense.run",
    "stats.txt",
    "stats.json",
    "eval.txt",
];

fn pipeline(work: &Path) -> Result<Duration, String> {
    let toy = toy_dir();
    let t = |name: &str| toy.join(name).to_string_lossy().into_owned();
    let start = Instant::now();
    let steps: Vec<Vec<String>> = vec![
        vec!["ingest".into(), "--metadata".into(), t("metadata.csv"), "--json-dir".into(), t("pdf_json"),
             "--docids".into(), t("docids.txt"), "--out".into(), "corpus.jsonl".into()],
        vec!["index".into(), "--corpus".into(), "corpus.jsonl".into(), "--out".into(), "index.txt".into()],
        vec!["run".into(), "--ranker".into(), "bm25".into(), "--index".into(), "index.txt".into(),
             "--topics".into(), t("topics.csv"), "--field".into(), "combined".into(), "--k".into(), "50".into(),
             "--out".into(), "bm25.run".into()],
        vec!["train".into(), "--corpus".into(), "corpus.jsonl".into(), "--steps".into(), "0".into(),
             "--dim".into(), "16".into(), "--seed".into(), "11".into(), "--out".into(), "random.emb".into()],
        vec!["run".into(), "--ranker".into(), "bag".into(), "--corpus".into(), "corpus.jsonl".into(),
             "--embeddings".into(), "random.emb".into(), "--topics".into(), t("topics.xml"),
             "--field".into(), "average".into(), "--out".into(), "bag.run".into()],
        vec!["run".into(), "--ranker".into(), "dense".into(), "--corpus".into(), "corpus.jsonl".into(),
             "--embeddings".into(), t("vectors.txt"), "--topics".into(), t("topics.csv"),
             "--field".into(), "average".into(), "--out".into(), "dense.run".into()],
        vec!["compare".into(), "bm25.run".into(), "bag.run".into(), "dense.run".into(), "--topics".into(),
             t("topics.csv"), "--out".into(), "stats.txt".into(), "--json".into(), "stats.json".into()],
        vec!["eval".into(), "--qrels".into(), t("qrels.txt"), "bm25.run".into(), "bag.run".into(),
             "dense.run".into(), "--out".into(), "eval.txt".into()],
    ];
    for args in &steps {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        run_cli(&args, work)?;
    }
    Ok(start.elapsed())
}

fn toy_reproduction() -> Outcome {
    let a = tempfile::tempdir().map_err(|e| e.to_string())?;
    let b = tempfile::tempdir().map_err(|e| e.to_string())?;
    let ta = pipeline(a.path())?;
    let tb = pipeline(b.path())?;
    within(ta.max(tb), 30.0)?;
    for name in OUTPUTS {
        let x = fs::read(a.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        let y = fs::read(b.path().join(name)).map_err(|e| format!("{name}: {e}"))?;
        check(!x.is_empty() && x == y, || format!("{name} differs between runs or is empty"))?;
    }
    let corpus = Corpus::read_snapshot(&a.path().join("corpus.jsonl")).map_err(|e| e.to_string())?;
    let stats = fs::read_to_string(a.path().join("stats.txt")).map_err(|e| e.to_string())?;
    let rows: Vec<&str> = stats.lines().skip(2).take_while(|l| !l.is_empty()).collect();
    check(rows.len() == 3, || format!("stats table has {} rows", rows.len()))?;
    for tag in ["bm25", "bag", "dense"] {
        let run = read_run(fs::read(a.path().join(format!("{tag}.run"))).map_err(|e| e.to_string())?.as_slice())
            .map_err(|e| format!("{tag}.run: {e}"))?;
        check(run.per_topic.len() == 5 && run.depth() <= 50, || format!("{tag}.run shape"))?;
    }
    Ok(format!(
        "{} documents, 5 topics, 3 rankers; {} files byte-identical across 2 runs; {:.2}s / {:.2}s",
        corpus.len(),
        OUTPUTS.len(),
        ta.as_secs_f64(),
        tb.as_secs_f64()
    ))
}

// ---------------------------------------------------------------- 9

fn preprocessing_golden() -> Outcome {
    let golden = include_str!("../../core/tests/data/prep_golden.jsonl");
    let config = PrepConfig::default();
    let mut n = 0;
    let mut saw_worked_example = false;
    for line in golden.lines().filter(|l| !l.trim().is_empty()) {
        let v: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
        let input = v["input"].as_str().ok_or("missing input")?;
        let want: Vec<&str> = v["tokens"].as_array().ok_or("missing tokens")?.iter().filter_map(|t| t.as_str()).collect();
        let got = preprocess(input, &config);
        check(got == want, || format!("{input:?}: got {got:?}, want {want:?}"))?;
        saw_worked_example |= want == ["covid", "19", "viru"];
        n += 1;
    }
    check(n >= 30, || format!("only {n} golden cases"))?;
    check(saw_worked_example, || "worked example missing from golden file".into())?;
    Ok(format!("{n} golden cases match"))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("BM25 oracle equivalence", bm25_oracle_equivalence),
        ("BM25 hand values", bm25_hand_values),
        ("InfoNCE correctness", infonce_correctness),
        ("contrastive training sanity", contrastive_sanity),
        ("Gaussian overlap", gaussian_overlap_checks),
        ("overlap statistics protocol", overlap_protocol),
        ("format round-trips", round_trips),
        ("toy end-to-end reproduction", toy_reproduction),
        ("preprocessing golden file", preprocessing_golden),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS  {name} — {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} — {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
