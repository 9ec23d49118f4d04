//! Reference directions on the unit simplex, used as coverage bins in the
//! normalized objective space, and front-segment detection.

/// Uniformly spaced directions on the unit simplex.
///
/// For two objectives exactly `target` directions are produced. For more
/// objectives a simplex lattice is used whose size is closest to `target`.
#[derive(Debug, Clone)]
pub struct ReferenceDirections {
    dirs: Vec<Vec<f64>>,
    norms: Vec<f64>,
    center: usize,
}

impl ReferenceDirections {
    pub fn new(m: usize, target: usize) -> Self {
        let target = target.max(1);
        let dirs = if m <= 1 {
            vec![vec![1.0]]
        } else if m == 2 {
            if target == 1 {
                vec![vec![0.5, 0.5]]
            } else {
                (0..target)
                    .map(|i| {
                        let a = i as f64 / (target - 1) as f64;
                        vec![a, 1.0 - a]
                    })
                    .collect()
            }
        } else {
            let h = closest_lattice_divisions(m, target);
            simplex_lattice(m, h)
        };
        let norms = dirs.iter().map(|d| norm(d)).collect();
        let centroid = vec![1.0 / m as f64; m];
        let center = (0..dirs.len())
            .min_by(|&a, &b| {
                dist2(&dirs[a], &centroid)
                    .total_cmp(&dist2(&dirs[b], &centroid))
                    .then(a.cmp(&b))
            })
            .unwrap_or(0);
        Self {
            dirs,
            norms,
            center,
        }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.dirs
    }

    /// Index of the direction with maximal cosine similarity to `g`. A zero
    /// vector falls into the direction nearest the simplex centroid.
    pub fn assign(&self, g: &[f64]) -> usize {
        let gn = norm(g);
        if gn < 1e-12 {
            return self.center;
        }
        let mut best = 0;
        let mut best_cos = f64::NEG_INFINITY;
        for (i, d) in self.dirs.iter().enumerate() {
            let dot: f64 = d.iter().zip(g).map(|(a, b)| a * b).sum();
            let cos = dot / (self.norms[i] * gn);
            if cos > best_cos {
                best_cos = cos;
                best = i;
            }
        }
        best
    }

    /// Number of directions receiving at least one of `points`.
    pub fn occupied(&self, points: &[Vec<f64>]) -> usize {
        let mut hit = vec![false; self.len()];
        for p in points {
            hit[self.assign(p)] = true;
        }
        hit.iter().filter(|&&h| h).count()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of lattice points for `m` objectives and `h` divisions.
pub fn lattice_size(m: usize, h: usize) -> usize {
    binomial(h + m - 1, m - 1)
}

fn closest_lattice_divisions(m: usize, target: usize) -> usize {
    let mut best_h = 1;
    let mut best_gap = usize::MAX;
    let mut h = 1;
    loop {
        let size = lattice_size(m, h);
        let gap = size.abs_diff(target);
        if gap < best_gap {
            best_gap = gap;
            best_h = h;
        }
        if size > target {
            break;
        }
        h += 1;
    }
    best_h
}

/// Largest lattice division count whose lattice has at most `n` points.
pub fn divisions_at_most(m: usize, n: usize) -> usize {
    let mut h = 1;
    while lattice_size(m, h + 1) <= n {
        h += 1;
    }
    h
}

/// All points of the simplex lattice with `h` divisions in `m` dimensions.
pub fn simplex_lattice(m: usize, h: usize) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(lattice_size(m, h));
    let mut current = vec![0usize; m];
    fill_lattice(m, h, 0, h, &mut current, &mut out);
    out
}

fn fill_lattice(
    m: usize,
    h: usize,
    k: usize,
    left: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<f64>>,
) {
    if k == m - 1 {
        current[k] = left;
        out.push(current.iter().map(|&c| c as f64 / h as f64).collect());
        return;
    }
    for c in 0..=left {
        current[k] = c;
        fill_lattice(m, h, k + 1, left - c, current, out);
    }
}

fn median(mut v: Vec<f64>) -> Option<f64> {
    if v.is_empty() {
        return None;
    }
    v.sort_by(f64::total_cmp);
    let n = v.len();
    Some(if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    })
}

/// Ratio over the median spacing above which two neighbors belong to different segments.
pub const SEGMENT_GAP_FACTOR: f64 = 3.0;

/// Number of connected segments in a normalized nondominated point set.
///
/// Two objectives: points sorted by the first objective are split wherever a
/// consecutive distance exceeds three times the median consecutive distance.
/// More objectives: single-linkage components under a cutoff of three times
/// the median nearest-neighbor distance. Duplicate points are merged first; a
/// set with fewer than three distinct points is one segment.
pub fn count_segments(points: &[Vec<f64>]) -> usize {
    let mut pts: Vec<Vec<f64>> = Vec::with_capacity(points.len());
    for p in points {
        if !pts.iter().any(|q| q == p) {
            pts.push(p.clone());
        }
    }
    let n = pts.len();
    if n < 3 {
        return 1;
    }
    let d = |a: &[f64], b: &[f64]| dist2(a, b).sqrt();
    if pts[0].len() == 2 {
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let gaps: Vec<f64> = pts.windows(2).map(|w| d(&w[0], &w[1])).collect();
        let Some(med) = median(gaps.clone()) else {
            return 1;
        };
        let cutoff = SEGMENT_GAP_FACTOR * med;
        return 1 + gaps.iter().filter(|&&g| g > cutoff).count();
    }
    let nearest: Vec<f64> = (0..n)
        .map(|i| {
            (0..n)
                .filter(|&j| j != i)
                .map(|j| d(&pts[i], &pts[j]))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    let cutoff = SEGMENT_GAP_FACTOR * median(nearest).unwrap_or(0.0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if d(&pts[i], &pts[j]) <= cutoff {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    (0..n).filter(|&i| find(&mut parent, i) == i).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_objective_directions_match_target() {
        let dirs = ReferenceDirections::new(2, 100);
        assert_eq!(dirs.len(), 100);
        assert_eq!(dirs.directions()[0], vec![0.0, 1.0]);
        assert_eq!(dirs.directions()[99], vec![1.0, 0.0]);
    }

    #[test]
    fn three_objective_lattice_closest_to_target() {
        // H=13 gives 105 points, H=12 gives 91; 105 is closer to 100
        assert_eq!(ReferenceDirections::new(3, 100).len(), 105);
        assert_eq!(lattice_size(3, 12), 91);
        assert_eq!(divisions_at_most(3, 100), 12);
        for p in simplex_lattice(3, 4) {
            assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn assignment_picks_aligned_direction() {
        let dirs = ReferenceDirections::new(2, 3);
        assert_eq!(dirs.assign(&[1.0, 0.0]), 2);
        assert_eq!(dirs.assign(&[0.0, 2.0]), 0);
        assert_eq!(dirs.assign(&[0.3, 0.3]), 1);
        assert_eq!(dirs.assign(&[0.0, 0.0]), 1);
        assert_eq!(dirs.occupied(&[vec![1.0, 0.0], vec![0.9, 0.0]]), 1);
    }

    #[test]
    fn segments_two_objectives() {
        let line: Vec<Vec<f64>> = (0..11)
            .map(|i| vec![i as f64 / 10.0, 1.0 - i as f64 / 10.0])
            .collect();
        assert_eq!(count_segments(&line), 1);
        let mut split = line.clone();
        split.retain(|p| !(p[0] > 0.25 && p[0] < 0.75));
        assert_eq!(count_segments(&split), 2);
        assert_eq!(count_segments(&line[..2]), 1);
    }

    #[test]
    fn segments_three_objectives() {
        let lattice = simplex_lattice(3, 6);
        assert_eq!(count_segments(&lattice), 1);
        let mut two: Vec<Vec<f64>> = lattice
            .iter()
            .map(|p| p.iter().map(|v| v * 0.1).collect())
            .collect();
        two.extend(lattice.iter().map(|p| p.iter().map(|v| v * 0.1 + 5.0).collect::<Vec<_>>()));
        assert_eq!(count_segments(&two), 2);
    }
}
