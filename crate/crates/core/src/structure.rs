//! Variable grouping and structure-induced targets.

use std::fmt;
use std::sync::Arc;

use crate::error::{config, Result};
use crate::solution::Bounds;

/// Supplies the structure-induced target value `x_j*` of a convergence-related
/// variable, possibly depending on the rest of the decision vector.
pub trait TargetProvider: Send + Sync {
    fn target(&self, j: usize, x: &[f64]) -> f64;
}

/// Targets every variable at the midpoint of its bounds.
#[derive(Debug, Clone)]
pub struct MidpointTargets {
    bounds: Bounds,
}

impl MidpointTargets {
    pub fn new(bounds: Bounds) -> Self {
        Self { bounds }
    }
}

impl TargetProvider for MidpointTargets {
    fn target(&self, j: usize, _x: &[f64]) -> f64 {
        self.bounds.midpoint(j)
    }
}

/// Fixed per-variable targets.
#[derive(Debug, Clone)]
pub struct ConstantTargets(pub Vec<f64>);

impl TargetProvider for ConstantTargets {
    fn target(&self, j: usize, _x: &[f64]) -> f64 {
        self.0[j]
    }
}

/// The front/convergence partition of the decision variables together with
/// the target provider used for structural repair.
///
/// Group 0 is the front-related group; groups `1..` are convergence-related.
#[derive(Clone)]
pub struct VariableStructure {
    groups: Vec<Vec<usize>>,
    bounds: Bounds,
    targets: Arc<dyn TargetProvider>,
    convergence: Vec<usize>,
    is_convergence: Vec<bool>,
}

impl fmt::Debug for VariableStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VariableStructure")
            .field("group_sizes", &self.groups.iter().map(Vec::len).collect::<Vec<_>>())
            .field("dim", &self.bounds.dim())
            .finish()
    }
}

impl VariableStructure {
    pub fn new(
        groups: Vec<Vec<usize>>,
        bounds: Bounds,
        targets: Arc<dyn TargetProvider>,
    ) -> Result<Self> {
        let dim = bounds.dim();
        if groups.is_empty() || groups[0].is_empty() {
            return Err(config("front-related group must be nonempty"));
        }
        let mut seen = vec![false; dim];
        for (k, g) in groups.iter().enumerate() {
            if g.is_empty() {
                return Err(config(format!("variable group {k} is empty")));
            }
            for &j in g {
                if j >= dim {
                    return Err(config(format!("group {k} index {j} out of range {dim}")));
                }
                if seen[j] {
                    return Err(config(format!("variable {j} appears in two groups")));
                }
                seen[j] = true;
            }
        }
        if let Some(j) = seen.iter().position(|s| !s) {
            return Err(config(format!("variable {j} is not in any group")));
        }
        let mut is_convergence = vec![false; dim];
        let mut convergence = Vec::new();
        for g in &groups[1..] {
            for &j in g {
                is_convergence[j] = true;
                convergence.push(j);
            }
        }
        convergence.sort_unstable();
        Ok(Self {
            groups,
            bounds,
            targets,
            convergence,
            is_convergence,
        })
    }

    /// Front group = the first `front_len` variables, the rest split into
    /// `conv_groups` contiguous groups of equal size (the last absorbs the remainder).
    pub fn contiguous(
        bounds: Bounds,
        front_len: usize,
        conv_groups: usize,
        targets: Arc<dyn TargetProvider>,
    ) -> Result<Self> {
        let dim = bounds.dim();
        if front_len == 0 || front_len > dim {
            return Err(config(format!("front group length {front_len} invalid for D={dim}")));
        }
        let rest = dim - front_len;
        let mut groups = vec![(0..front_len).collect::<Vec<_>>()];
        if rest > 0 {
            let k = conv_groups.clamp(1, rest);
            let size = rest / k;
            for g in 0..k {
                let start = front_len + g * size;
                let end = if g + 1 == k { dim } else { start + size };
                groups.push((start..end).collect());
            }
        }
        Self::new(groups, bounds, targets)
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    /// All groups; index 0 is the front-related group.
    pub fn groups(&self) -> &[Vec<usize>] {
        &self.groups
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn front(&self) -> &[usize] {
        &self.groups[0]
    }

    /// Sorted indices of all convergence-related variables.
    pub fn convergence(&self) -> &[usize] {
        &self.convergence
    }

    pub fn is_convergence(&self, j: usize) -> bool {
        self.is_convergence[j]
    }

    /// Structure-induced target `x_j*`, clipped into the bounds.
    pub fn target(&self, j: usize, x: &[f64]) -> f64 {
        self.bounds.clip(j, self.targets.target(j, x))
    }

    /// Structural transform `z_j(x)`: the coordinate normalized by its bounds.
    pub fn transform(&self, j: usize, x: &[f64]) -> f64 {
        self.bounds.normalize(j, x[j])
    }

    /// Normalized target of variable `j`.
    pub fn normalized_target(&self, j: usize, x: &[f64]) -> f64 {
        self.bounds.normalize(j, self.target(j, x))
    }

    /// Group target `z_k*`: mean normalized target over the group. The front
    /// group carries no target and returns `None`.
    pub fn group_target(&self, k: usize, x: &[f64]) -> Option<f64> {
        if k == 0 {
            return None;
        }
        let g = &self.groups[k];
        Some(g.iter().map(|&j| self.normalized_target(j, x)).sum::<f64>() / g.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds(d: usize) -> Bounds {
        Bounds::uniform(d, 0.0, 1.0).unwrap()
    }

    #[test]
    fn contiguous_partition_absorbs_remainder() {
        let b = bounds(13);
        let s = VariableStructure::contiguous(b.clone(), 1, 5, Arc::new(MidpointTargets::new(b)))
            .unwrap();
        let sizes: Vec<usize> = s.groups().iter().map(Vec::len).collect();
        assert_eq!(sizes, vec![1, 2, 2, 2, 2, 4]);
        assert_eq!(s.convergence().len(), 12);
        assert!(!s.is_convergence(0));
    }

    #[test]
    fn rejects_overlap_and_gaps() {
        let b = bounds(3);
        let t: Arc<dyn TargetProvider> = Arc::new(MidpointTargets::new(b.clone()));
        assert!(VariableStructure::new(vec![vec![0], vec![0, 1, 2]], b.clone(), t.clone()).is_err());
        assert!(VariableStructure::new(vec![vec![0], vec![1]], b.clone(), t.clone()).is_err());
        assert!(VariableStructure::new(vec![vec![], vec![0, 1, 2]], b, t).is_err());
    }

    #[test]
    fn targets_are_clipped() {
        let b = bounds(2);
        let s = VariableStructure::new(
            vec![vec![0], vec![1]],
            b,
            Arc::new(ConstantTargets(vec![0.0, 3.0])),
        )
        .unwrap();
        assert_eq!(s.target(1, &[0.5, 0.5]), 1.0);
        assert_eq!(s.group_target(1, &[0.5, 0.5]), Some(1.0));
        assert_eq!(s.group_target(0, &[0.5, 0.5]), None);
    }
}
