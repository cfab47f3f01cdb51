//! Independent reference implementations used as test oracles.
//!
//! Nothing here calls into the library's scoring code; each oracle is written
//! straight from the defining formula.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::seq::IndexedRandom;
use rand::Rng;

/// BM25 by brute force over raw token lists: every document is scored against
/// every query token, zero scores dropped, best first, ties by id.
pub fn bm25_brute(docs: &[(String, Vec<String>)], query: &[String], k1: f64, b: f64) -> Vec<(String, f64)> {
    let n = docs.len() as f64;
    let avgdl = docs.iter().map(|(_, t)| t.len() as f64).sum::<f64>() / n;
    let mut out = Vec::new();
    for (id, toks) in docs {
        let dl = toks.len() as f64;
        let mut score = 0.0;
        for q in query {
            let df = docs.iter().filter(|(_, t)| t.contains(q)).count() as f64;
            let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
            let tf = toks.iter().filter(|t| *t == q).count() as f64;
            score += idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * dl / avgdl));
        }
        if score > 0.0 {
            out.push((id.clone(), score));
        }
    }
    out.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then_with(|| a.0.cmp(&b.0)));
    out
}

/// Random corpus of at most `max_docs` documents over a vocabulary of `vocab` words.
pub fn random_token_corpus<R: Rng>(rng: &mut R, max_docs: usize, vocab: usize) -> Vec<(String, Vec<String>)> {
    let n = rng.random_range(1..=max_docs);
    (0..n)
        .map(|i| {
            let len = rng.random_range(1..=25);
            let toks = (0..len).map(|_| format!("w{}", rng.random_range(0..vocab))).collect();
            (format!("doc{i:02}"), toks)
        })
        .collect()
}

pub fn random_query<R: Rng>(rng: &mut R, vocab: usize) -> Vec<String> {
    let len = rng.random_range(1..=5);
    (0..len).map(|_| format!("w{}", rng.random_range(0..vocab + 3))).collect()
}

/// InfoNCE for dot-product scores, computed naively (no shift).
pub fn info_nce_naive(q: &[f64], pos: &[f64], negs: &[Vec<f64>], tau: f64) -> f64 {
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let num = (dot(q, pos) / tau).exp();
    let den = num + negs.iter().map(|k| (dot(q, k) / tau).exp()).sum::<f64>();
    -(num / den).ln()
}

/// Central finite-difference gradient of `f` at `x`.
pub fn central_diff(f: impl Fn(&[f64]) -> f64, x: &[f64], h: f64) -> Vec<f64> {
    let mut x = x.to_vec();
    (0..x.len())
        .map(|i| {
            let orig = x[i];
            x[i] = orig + h;
            let up = f(&x);
            x[i] = orig - h;
            let down = f(&x);
            x[i] = orig;
            (up - down) / (2.0 * h)
        })
        .collect()
}

/// `|a − b| / max(|a|, |b|, floor)`.
pub fn rel_err(a: f64, b: f64, floor: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(floor)
}

fn normal_pdf(x: f64, mu: f64, var: f64) -> f64 {
    (-(x - mu) * (x - mu) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// ∫ N(x; μ1, v1) N(x; μ2, v2) dx by composite Simpson on a fine grid
/// covering both densities out to 12 standard deviations.
pub fn overlap_quadrature(mu1: f64, v1: f64, mu2: f64, v2: f64) -> f64 {
    let s = v1.sqrt().max(v2.sqrt());
    let lo = mu1.min(mu2) - 12.0 * s;
    let hi = mu1.max(mu2) + 12.0 * s;
    let n = 200_000; // even
    let h = (hi - lo) / n as f64;
    let f = |x: f64| normal_pdf(x, mu1, v1) * normal_pdf(x, mu2, v2);
    let mut sum = f(lo) + f(hi);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(lo + i as f64 * h);
    }
    sum * h / 3.0
}

/// Synthetic corpus: each document mixes words from one of two disjoint
/// topic vocabularies (70%), a shared filler pool (15%) and five words of its
/// own (15%). Returns (topic label, tokens).
pub fn two_topic_corpus<R: Rng>(rng: &mut R, n_docs: usize, doc_len: usize) -> Vec<(usize, Vec<String>)> {
    let topic_words: [Vec<String>; 2] = [
        (0..20).map(|i| format!("alpha{i}")).collect(),
        (0..20).map(|i| format!("beta{i}")).collect(),
    ];
    let filler: Vec<String> = (0..10).map(|i| format!("common{i}")).collect();
    (0..n_docs)
        .map(|d| {
            let label = d % 2;
            let toks = (0..doc_len)
                .map(|_| {
                    let u: f64 = rng.random();
                    if u < 0.7 {
                        topic_words[label].choose(rng).unwrap().clone()
                    } else if u < 0.85 {
                        filler.choose(rng).unwrap().clone()
                    } else {
                        format!("d{d}x{}", rng.random_range(0..5))
                    }
                })
                .collect();
            (label, toks)
        })
        .collect()
}

pub fn cosine(u: &[f64], v: &[f64]) -> f64 {
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu: f64 = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        0.0
    } else {
        dot / (nu * nv)
    }
}

/// Per-topic intersection sizes of two top-k id lists, by set arithmetic.
pub fn overlap_counts(a: &HashMap<u32, Vec<String>>, b: &HashMap<u32, Vec<String>>, k: usize) -> HashMap<u32, usize> {
    a.iter()
        .map(|(t, ids)| {
            let other = &b[t];
            let shared = ids.iter().take(k).filter(|id| other.iter().take(k).any(|o| o == *id)).count();
            (*t, shared)
        })
        .collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}
