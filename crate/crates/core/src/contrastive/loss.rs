//! InfoNCE loss and its analytic gradient.
//!
//! With logits `z_i = s(q, k_i) / τ` over the positive (index 0) and the
//! negatives, the loss is `−ln softmax(z)_0`. Writing `p` for the softmax,
//! `∂L/∂s_i = (p_i − [i = 0]) / τ`; the per-vector gradients follow through
//! the score function.

use super::ContrastiveError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScoreFn {
    #[default]
    Dot,
    Cosine,
}

impl std::str::FromStr for ScoreFn {
    type Err = ContrastiveError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(ScoreFn::Dot),
            "cosine" => Ok(ScoreFn::Cosine),
            other => Err(ContrastiveError::InvalidConfig(format!("unknown score function `{other}`"))),
        }
    }
}

fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

impl ScoreFn {
    fn score(self, q: &[f64], k: &[f64]) -> f64 {
        match self {
            ScoreFn::Dot => dot(q, k),
            ScoreFn::Cosine => {
                let denom = dot(q, q).sqrt() * dot(k, k).sqrt();
                if denom == 0.0 {
                    0.0
                } else {
                    dot(q, k) / denom
                }
            }
        }
    }

    /// Accumulate `weight · ∂s/∂q` into `dq` and `weight · ∂s/∂k` into `dk`.
    fn backprop(self, q: &[f64], k: &[f64], weight: f64, dq: &mut [f64], dk: &mut [f64]) {
        match self {
            ScoreFn::Dot => {
                for i in 0..q.len() {
                    dq[i] += weight * k[i];
                    dk[i] += weight * q[i];
                }
            }
            ScoreFn::Cosine => {
                let nq = dot(q, q).sqrt();
                let nk = dot(k, k).sqrt();
                if nq == 0.0 || nk == 0.0 {
                    return;
                }
                let s = dot(q, k) / (nq * nk);
                for i in 0..q.len() {
                    dq[i] += weight * (k[i] / (nq * nk) - s * q[i] / (nq * nq));
                    dk[i] += weight * (q[i] / (nq * nk) - s * k[i] / (nk * nk));
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InfoNceGrad {
    pub loss: f64,
    pub query: Vec<f64>,
    pub positive: Vec<f64>,
    pub negatives: Vec<Vec<f64>>,
}

fn check<V: AsRef<[f64]>>(q: &[f64], k_plus: &[f64], negatives: &[V], tau: f64) -> Result<(), ContrastiveError> {
    if !(tau > 0.0) {
        return Err(ContrastiveError::NonPositiveTemperature(tau));
    }
    let dim = q.len();
    for v in std::iter::once(k_plus).chain(negatives.iter().map(AsRef::as_ref)) {
        if v.len() != dim {
            return Err(ContrastiveError::DimensionMismatch {
                expected: dim,
                found: v.len(),
            });
        }
    }
    Ok(())
}

/// Logits, max-shifted softmax and loss.
fn softmax_loss<V: AsRef<[f64]>>(
    score: ScoreFn,
    q: &[f64],
    k_plus: &[f64],
    negatives: &[V],
    tau: f64,
) -> (f64, Vec<f64>) {
    let logits: Vec<f64> = std::iter::once(k_plus)
        .chain(negatives.iter().map(AsRef::as_ref))
        .map(|k| score.score(q, k) / tau)
        .collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|z| (z - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    let loss = total.ln() - (logits[0] - max);
    let probs = exps.into_iter().map(|e| e / total).collect();
    (loss, probs)
}

/// InfoNCE with dot-product scores.
pub fn info_nce<V: AsRef<[f64]>>(
    q: &[f64],
    k_plus: &[f64],
    negatives: &[V],
    tau: f64,
) -> Result<f64, ContrastiveError> {
    info_nce_with(ScoreFn::Dot, q, k_plus, negatives, tau)
}

pub fn info_nce_with<V: AsRef<[f64]>>(
    score: ScoreFn,
    q: &[f64],
    k_plus: &[f64],
    negatives: &[V],
    tau: f64,
) -> Result<f64, ContrastiveError> {
    check(q, k_plus, negatives, tau)?;
    Ok(softmax_loss(score, q, k_plus, negatives, tau).0)
}

/// Loss and exact gradients with dot-product scores.
pub fn info_nce_grad<V: AsRef<[f64]>>(
    q: &[f64],
    k_plus: &[f64],
    negatives: &[V],
    tau: f64,
) -> Result<InfoNceGrad, ContrastiveError> {
    info_nce_grad_with(ScoreFn::Dot, q, k_plus, negatives, tau)
}

pub fn info_nce_grad_with<V: AsRef<[f64]>>(
    score: ScoreFn,
    q: &[f64],
    k_plus: &[f64],
    negatives: &[V],
    tau: f64,
) -> Result<InfoNceGrad, ContrastiveError> {
    check(q, k_plus, negatives, tau)?;
    let (loss, probs) = softmax_loss(score, q, k_plus, negatives, tau);
    let dim = q.len();
    let mut grad = InfoNceGrad {
        loss,
        query: vec![0.0; dim],
        positive: vec![0.0; dim],
        negatives: vec![vec![0.0; dim]; negatives.len()],
    };
    score.backprop(q, k_plus, (probs[0] - 1.0) / tau, &mut grad.query, &mut grad.positive);
    for (i, k) in negatives.iter().enumerate() {
        score.backprop(q, k.as_ref(), probs[i + 1] / tau, &mut grad.query, &mut grad.negatives[i]);
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    const NONE: &[Vec<f64>] = &[];

    #[test]
    fn uniform_scores() {
        let q = [0.0, 0.0];
        let k = [1.0, 2.0];
        let negs = vec![vec![3.0, 1.0]; 3];
        let loss = info_nce(&q, &k, &negs, 0.5).unwrap();
        assert!((loss - 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn single_negative_hand_value() {
        // s(q,k+)/τ = 1, s(q,k-)/τ = 0
        let loss = info_nce(&[1.0], &[1.0], &[vec![0.0]], 1.0).unwrap();
        assert!((loss - (1.0 + (-1f64).exp()).ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_negatives() {
        assert_eq!(info_nce(&[1.0, 2.0], &[3.0, 4.0], NONE, 0.1).unwrap(), 0.0);
        let g = info_nce_grad(&[1.0, 2.0], &[3.0, 4.0], NONE, 0.1).unwrap();
        assert!(g.query.iter().chain(&g.positive).all(|&x| x == 0.0));
    }

    #[test]
    fn symmetric_case_has_zero_query_gradient() {
        let v = [0.3, -1.2, 2.0];
        let g = info_nce_grad(&v, &v, &[v.to_vec()], 0.7).unwrap();
        assert!(g.query.iter().all(|&x| x == 0.0), "{:?}", g.query);
    }

    #[test]
    fn errors() {
        assert!(matches!(
            info_nce(&[1.0], &[1.0], NONE, 0.0),
            Err(ContrastiveError::NonPositiveTemperature(_))
        ));
        assert!(matches!(
            info_nce(&[1.0], &[1.0, 2.0], NONE, 1.0),
            Err(ContrastiveError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn large_logits_stay_finite() {
        let q = [1000.0];
        let g = info_nce_grad(&q, &[1.0], &[vec![-1.0], vec![0.5]], 1.0).unwrap();
        assert!(g.loss.is_finite());
        assert!(g.query.iter().chain(&g.positive).all(|x| x.is_finite()));
        let g = info_nce_grad(&q, &[-1.0], &[vec![1.0]], 1.0).unwrap();
        assert!((g.loss - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn cosine_scores_ignore_scale() {
        let a = info_nce_with(ScoreFn::Cosine, &[1.0, 0.0], &[2.0, 0.0], &[vec![0.0, 5.0]], 1.0).unwrap();
        let b = info_nce_with(ScoreFn::Cosine, &[3.0, 0.0], &[1.0, 0.0], &[vec![0.0, 1.0]], 1.0).unwrap();
        assert!((a - b).abs() < 1e-12);
    }
}
