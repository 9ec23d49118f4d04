//! Pareto dominance, nondominated sorting, crowding, normalization and
//! decision-space deduplication. Everything here is minimization.

use crate::error::{usage, Error, Result};
use crate::solution::Solution;

/// Pareto dominance on objective vectors.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    if a.len() != b.len() {
        return Err(usage(format!(
            "objective length mismatch: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    Ok(dominates_unchecked(a, b))
}

#[inline]
pub(crate) fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        if x < y {
            strictly = true;
        }
    }
    strictly
}

/// Feasibility-first dominance: feasible beats infeasible, smaller violation
/// wins among infeasible, Pareto dominance among feasible. Reduces to plain
/// Pareto dominance when both solutions are feasible.
#[inline]
pub fn constrained_dominates(a: &Solution, b: &Solution) -> bool {
    match (a.is_feasible(), b.is_feasible()) {
        (true, true) => dominates_unchecked(&a.f, &b.f),
        (true, false) => true,
        (false, true) => false,
        (false, false) => a.violation < b.violation,
    }
}

/// Sorts `set` into nondominated fronts (indices into `set`). Front 0 is ND(set).
pub fn nondominated_sort(set: &[Solution]) -> Result<Vec<Vec<usize>>> {
    if set.is_empty() {
        return Err(usage("nondominated sort of an empty set"));
    }
    let m = set[0].f.len();
    if set.iter().any(|s| s.f.len() != m) {
        return Err(usage("objective vectors of differing lengths"));
    }
    Ok(sort_by_relation(set.len(), |i, j| {
        constrained_dominates(&set[i], &set[j])
    }))
}

/// Nondominated sort over raw objective vectors (plain Pareto dominance).
pub fn nondominated_sort_objectives(set: &[Vec<f64>]) -> Result<Vec<Vec<usize>>> {
    if set.is_empty() {
        return Err(usage("nondominated sort of an empty set"));
    }
    let m = set[0].len();
    if set.iter().any(|f| f.len() != m) {
        return Err(usage("objective vectors of differing lengths"));
    }
    Ok(sort_by_relation(set.len(), |i, j| {
        dominates_unchecked(&set[i], &set[j])
    }))
}

fn sort_by_relation(n: usize, dom: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut dominated_by: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut count = vec![0usize; n];
    for i in 0..n {
        for j in (i + 1)..n {
            if dom(i, j) {
                dominated_by[i].push(j);
                count[j] += 1;
            } else if dom(j, i) {
                dominated_by[j].push(i);
                count[i] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| count[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &i in &current {
            for &j in &dominated_by[i] {
                count[j] -= 1;
                if count[j] == 0 {
                    next.push(j);
                }
            }
        }
        next.sort_unstable();
        fronts.push(current);
        current = next;
    }
    fronts
}

/// Indices of the nondominated subset ND(set), in input order. Empty for an empty set.
pub fn nondominated_indices(set: &[Solution]) -> Vec<usize> {
    if set.is_empty() {
        return Vec::new();
    }
    (0..set.len())
        .filter(|&i| !set.iter().any(|other| constrained_dominates(other, &set[i])))
        .collect()
}

/// Crowding distance of each member of a front, given its objective vectors.
///
/// Points holding the extreme value of an objective get `+inf`. Interior
/// points accumulate the normalized gap between the nearest strictly smaller
/// and strictly larger values, so duplicated objective vectors receive equal
/// distances regardless of input order. Constant objectives contribute nothing.
pub fn crowding_distance(front: &[Vec<f64>]) -> Vec<f64> {
    let n = front.len();
    let mut dist = vec![0.0; n];
    if n == 0 {
        return dist;
    }
    if n <= 2 {
        return vec![f64::INFINITY; n];
    }
    let m = front[0].len();
    let mut order: Vec<usize> = (0..n).collect();
    for k in 0..m {
        order.sort_by(|&a, &b| front[a][k].total_cmp(&front[b][k]));
        let lo = front[order[0]][k];
        let hi = front[order[n - 1]][k];
        let span = hi - lo;
        if span <= 0.0 {
            continue;
        }
        // distinct values in ascending order, with each index mapped to its slot
        let mut values: Vec<f64> = Vec::with_capacity(n);
        let mut slot = vec![0usize; n];
        for &i in &order {
            let v = front[i][k];
            if values.last() != Some(&v) {
                values.push(v);
            }
            slot[i] = values.len() - 1;
        }
        for i in 0..n {
            let v = front[i][k];
            if v == lo || v == hi {
                dist[i] = f64::INFINITY;
            } else if dist[i].is_finite() {
                let s = slot[i];
                dist[i] += (values[s + 1] - values[s - 1]) / span;
            }
        }
    }
    dist
}

/// Ideal and nadir points spanning a normalization box.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveScale {
    pub ideal: Vec<f64>,
    pub nadir: Vec<f64>,
}

impl ObjectiveScale {
    pub fn new(ideal: Vec<f64>, nadir: Vec<f64>) -> Result<Self> {
        if ideal.len() != nadir.len() {
            return Err(usage("ideal/nadir length mismatch"));
        }
        if ideal.iter().zip(&nadir).any(|(i, n)| !(i <= n)) {
            return Err(Error::Data("ideal exceeds nadir".into()));
        }
        Ok(Self { ideal, nadir })
    }

    /// Componentwise min/max over a set of objective vectors.
    pub fn from_points<'a>(points: impl IntoIterator<Item = &'a [f64]>) -> Option<Self> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut ideal = first.to_vec();
        let mut nadir = first.to_vec();
        for p in iter {
            for (k, &v) in p.iter().enumerate() {
                ideal[k] = ideal[k].min(v);
                nadir[k] = nadir[k].max(v);
            }
        }
        Some(Self { ideal, nadir })
    }

    /// Ideal/nadir estimated from the nondominated subset of `set`.
    pub fn from_nondominated(set: &[Solution]) -> Option<Self> {
        let nd = nondominated_indices(set);
        Self::from_points(nd.iter().map(|&i| set[i].f.as_slice()))
    }

    pub fn dim(&self) -> usize {
        self.ideal.len()
    }

    /// Normalizes one vector; degenerate axes map to 0.
    pub fn normalize(&self, f: &[f64]) -> Vec<f64> {
        f.iter()
            .enumerate()
            .map(|(k, &v)| {
                let span = self.nadir[k] - self.ideal[k];
                if span > 0.0 {
                    (v - self.ideal[k]) / span
                } else {
                    0.0
                }
            })
            .collect()
    }

    pub fn denormalize(&self, g: &[f64]) -> Vec<f64> {
        g.iter()
            .enumerate()
            .map(|(k, &v)| self.ideal[k] + v * (self.nadir[k] - self.ideal[k]))
            .collect()
    }
}

/// Result of [`normalize_objectives`].
#[derive(Debug, Clone, PartialEq)]
pub struct Normalized {
    pub values: Vec<Vec<f64>>,
    /// Set when any normalized coordinate falls outside `[0, 1]`.
    pub out_of_range: bool,
}

/// Maps objective vectors into the box spanned by `ideal` and `nadir`.
pub fn normalize_objectives(set: &[Vec<f64>], ideal: &[f64], nadir: &[f64]) -> Result<Normalized> {
    let all_finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
    if !all_finite(ideal) || !all_finite(nadir) || set.iter().any(|f| !all_finite(f)) {
        return Err(Error::Data("non-finite value in normalization input".into()));
    }
    let scale = ObjectiveScale::new(ideal.to_vec(), nadir.to_vec())?;
    if set.iter().any(|f| f.len() != scale.dim()) {
        return Err(usage("objective vector length differs from ideal/nadir"));
    }
    let values: Vec<Vec<f64>> = set.iter().map(|f| scale.normalize(f)).collect();
    let out_of_range = values
        .iter()
        .flatten()
        .any(|&v| !(0.0..=1.0).contains(&v));
    Ok(Normalized {
        values,
        out_of_range,
    })
}

/// Max-norm tolerance under which two decision vectors count as duplicates.
pub const DUPLICATE_TOLERANCE: f64 = 1e-12;

/// Removes decision-space duplicates, keeping first occurrences in order.
pub fn deduplicate(set: Vec<Solution>) -> Vec<Solution> {
    let keep = unique_mask(&set.iter().map(|s| s.x.as_slice()).collect::<Vec<_>>());
    set.into_iter()
        .zip(keep)
        .filter_map(|(s, k)| k.then_some(s))
        .collect()
}

/// `true` for every vector that is not within [`DUPLICATE_TOLERANCE`] of an
/// earlier retained vector.
pub fn unique_mask(xs: &[&[f64]]) -> Vec<bool> {
    let n = xs.len();
    if n == 0 {
        return Vec::new();
    }
    // Vectors within the max-norm tolerance have coordinate sums within
    // D * tol (+ rounding), so only neighbors in sum order need a full check.
    let dim = xs[0].len();
    let sums: Vec<f64> = xs.iter().map(|x| x.iter().sum()).collect();
    let scale = xs
        .iter()
        .flat_map(|x| x.iter())
        .fold(0.0f64, |a, &v| a.max(v.abs()));
    let window =
        dim as f64 * DUPLICATE_TOLERANCE + 4.0 * (dim as f64 + 1.0) * f64::EPSILON * scale.max(1.0);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sums[a].total_cmp(&sums[b]).then(a.cmp(&b)));
    let mut pos = vec![0usize; n];
    for (p, &i) in order.iter().enumerate() {
        pos[i] = p;
    }
    let same = |a: &[f64], b: &[f64]| {
        a.len() == b.len()
            && a
                .iter()
                .zip(b)
                .all(|(u, v)| (u - v).abs() <= DUPLICATE_TOLERANCE)
    };
    let mut keep = vec![false; n];
    for i in 0..n {
        let p = pos[i];
        let mut dup = false;
        let mut q = p;
        while q > 0 && !dup {
            q -= 1;
            let j = order[q];
            if sums[i] - sums[j] > window {
                break;
            }
            dup = j < i && keep[j] && same(xs[i], xs[j]);
        }
        let mut q = p + 1;
        while q < n && !dup {
            let j = order[q];
            if sums[j] - sums[i] > window {
                break;
            }
            dup = j < i && keep[j] && same(xs[i], xs[j]);
            q += 1;
        }
        keep[i] = !dup;
    }
    keep
}
