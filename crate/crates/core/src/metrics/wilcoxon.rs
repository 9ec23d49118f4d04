use statrs::function::erf::erfc;

use crate::error::{usage, Result};

/// Outcome of comparing sample `a` against sample `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// `a` is significantly better.
    Plus,
    /// `a` is significantly worse.
    Minus,
    /// No significant difference.
    Approx,
}

impl Verdict {
    pub fn symbol(self) -> &'static str {
        match self {
            Verdict::Plus => "+",
            Verdict::Minus => "-",
            Verdict::Approx => "≈",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSum {
    /// Rank sum of the first sample.
    pub statistic: f64,
    pub p_value: f64,
    pub verdict: Verdict,
}

/// Midranks of the pooled samples and the tie-group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        ties.push(j - i + 1);
        i = j + 1;
    }
    (ranks, ties)
}

/// Exact two-sided p-value of the rank sum `w` of a size-`na` subset of
/// `ranks`, under all equally likely assignments. Handles midranks.
pub fn rank_sum_exact_p(ranks: &[f64], na: usize, w: f64) -> f64 {
    // Doubled midranks are integers, so subset sums can be tabulated.
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let max_sum: usize = doubled.iter().sum();
    let mut counts = vec![vec![0.0f64; max_sum + 1]; na + 1];
    counts[0][0] = 1.0;
    for &r in &doubled {
        for k in (1..=na).rev() {
            for s in (r..=max_sum).rev() {
                let add = counts[k - 1][s - r];
                if add != 0.0 {
                    counts[k][s] += add;
                }
            }
        }
    }
    let dist = &counts[na];
    let total: f64 = dist.iter().sum();
    let target = (2.0 * w).round() as usize;
    let lower: f64 = dist[..=target.min(max_sum)].iter().sum();
    let upper: f64 = dist[target.min(max_sum + 1)..].iter().sum();
    (2.0 * lower.min(upper) / total).min(1.0)
}

fn normal_p(w: f64, na: usize, nb: usize, ties: &[usize]) -> f64 {
    let n = (na + nb) as f64;
    let (na, nb) = (na as f64, nb as f64);
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>() / (n * (n - 1.0));
    let var = na * nb / 12.0 * ((n + 1.0) - tie_term);
    if var <= 0.0 {
        return 1.0;
    }
    let diff = w - na * (n + 1.0) / 2.0;
    let corrected = diff - 0.5 * diff.signum();
    let z = corrected / var.sqrt();
    erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}

fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        (s[n / 2 - 1] + s[n / 2]) / 2.0
    }
}

/// Two-sided Wilcoxon rank-sum test of `a` against `b`.
///
/// Small samples (smaller side under 10 and fewer than 20 in total) use the
/// exact permutation distribution; larger ones the tie-corrected normal
/// approximation with continuity correction. A significant result is
/// oriented by the medians, falling back to mean ranks when they coincide.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64], alpha: f64, lower_is_better: bool) -> Result<RankSum> {
    if a.len() < 5 || b.len() < 5 {
        return Err(usage("rank-sum test needs at least 5 observations per sample"));
    }
    if a.iter().chain(b).any(|v| !v.is_finite()) {
        return Err(usage("rank-sum samples must be finite"));
    }
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let w: f64 = ranks[..a.len()].iter().sum();
    if ties.len() == 1 {
        return Ok(RankSum { statistic: w, p_value: 1.0, verdict: Verdict::Approx });
    }
    let exact = a.len().min(b.len()) < 10 && pooled.len() < 20;
    let p_value = if exact {
        rank_sum_exact_p(&ranks, a.len(), w)
    } else {
        normal_p(w, a.len(), b.len(), &ties)
    };
    let verdict = if p_value >= alpha {
        Verdict::Approx
    } else {
        let (ma, mb) = (median(a), median(b));
        let a_lower = if ma != mb {
            ma < mb
        } else {
            let mean_a = w / a.len() as f64;
            let mean_b = ranks[a.len()..].iter().sum::<f64>() / b.len() as f64;
            mean_a < mean_b
        };
        if a_lower == lower_is_better {
            Verdict::Plus
        } else {
            Verdict::Minus
        }
    };
    Ok(RankSum { statistic: w, p_value, verdict })
}
