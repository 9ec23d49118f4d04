use crate::error::{config, usage, Result};
use crate::pareto::ObjectiveScale;

/// Reference coordinate used after normalizing by the true front's ideal and nadir.
pub const HV_REFERENCE: f64 = 1.1;

/// Exact hypervolume dominated by `points` and bounded by `reference`.
/// Points that do not strictly dominate the reference contribute nothing.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> Result<f64> {
    let m = reference.len();
    if points.iter().any(|p| p.len() != m) {
        return Err(usage("hypervolume point dimension differs from the reference"));
    }
    let inside: Vec<&[f64]> = points
        .iter()
        .filter(|p| p.iter().zip(reference).all(|(v, r)| v < r))
        .map(Vec::as_slice)
        .collect();
    match m {
        1 => Ok(inside.iter().map(|p| reference[0] - p[0]).fold(0.0, f64::max)),
        2 => Ok(sweep_2d(inside.iter().map(|p| (p[0], p[1])).collect(), reference[0], reference[1])),
        3 => Ok(slice_3d(&inside, reference)),
        _ => Err(config(format!("hypervolume supports at most 3 objectives, got {m}"))),
    }
}

fn sweep_2d(mut pts: Vec<(f64, f64)>, r0: f64, r1: f64) -> f64 {
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut area = 0.0;
    let mut ceiling = r1;
    for (x, y) in pts {
        if y < ceiling {
            area += (r0 - x) * (ceiling - y);
            ceiling = y;
        }
    }
    area
}

fn slice_3d(pts: &[&[f64]], reference: &[f64]) -> f64 {
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][2].total_cmp(&pts[b][2]));
    let mut volume = 0.0;
    let mut active: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for (pos, &i) in order.iter().enumerate() {
        active.push((pts[i][0], pts[i][1]));
        let next = order.get(pos + 1).map_or(reference[2], |&k| pts[k][2]);
        let depth = next - pts[i][2];
        if depth > 0.0 {
            volume += depth * sweep_2d(active.clone(), reference[0], reference[1]);
        }
    }
    volume
}

/// Hypervolume after normalizing by `scale`, with every reference coordinate at [`HV_REFERENCE`].
pub fn normalized_hypervolume(points: &[Vec<f64>], scale: &ObjectiveScale) -> Result<f64> {
    let normalized: Vec<Vec<f64>> = points.iter().map(|p| scale.normalize(p)).collect();
    hypervolume(&normalized, &vec![HV_REFERENCE; scale.dim()])
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn examples() {
        assert_eq!(hypervolume(&[vec![0.5, 0.5]], &[1.0, 1.0]).unwrap(), 0.25);
        let two = [vec![0.25, 0.75], vec![0.75, 0.25]];
        assert!((hypervolume(&two, &[1.0, 1.0]).unwrap() - 0.3125).abs() < 1e-12);
        assert_eq!(hypervolume(&[vec![1.0, 0.5]], &[1.0, 1.0]).unwrap(), 0.0);
        assert!(hypervolume(&[vec![0.0; 4]], &[1.0; 4]).is_err());
        let cube = hypervolume(&[vec![0.5, 0.5, 0.5]], &[1.0, 1.0, 1.0]).unwrap();
        assert!((cube - 0.125).abs() < 1e-12);
        // Two unit-offset boxes overlapping in a quarter cube.
        let v = hypervolume(&[vec![0.0, 0.5, 0.5], vec![0.5, 0.0, 0.0]], &[1.0, 1.0, 1.0]).unwrap();
        assert!((v - (0.25 + 0.5 - 0.125)).abs() < 1e-12);
    }

    fn point(m: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, m)
    }

    proptest! {
        #[test]
        fn permutation_invariant(mut pts in prop::collection::vec(point(3), 1..12), seed in any::<u64>()) {
            let before = hypervolume(&pts, &[1.0; 3]).unwrap();
            let k = (seed as usize) % pts.len();
            pts.rotate_left(k);
            pts.reverse();
            prop_assert!((hypervolume(&pts, &[1.0; 3]).unwrap() - before).abs() < 1e-12);
        }

        #[test]
        fn dominating_point_increases(pts in prop::collection::vec(point(2), 1..12)) {
            let before = hypervolume(&pts, &[1.0, 1.0]).unwrap();
            let best = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
            let mut more = pts.clone();
            more.push(vec![best * 0.5, 0.0]);
            prop_assert!(hypervolume(&more, &[1.0, 1.0]).unwrap() >= before);
        }
    }
}
