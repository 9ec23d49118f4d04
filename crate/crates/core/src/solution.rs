use crate::error::{config, Result};

/// An evaluated candidate: decision vector, objective vector and constraint violation.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub f: Vec<f64>,
    /// Sum of constraint violations, `0.0` when feasible.
    pub violation: f64,
}

impl Solution {
    pub fn new(x: Vec<f64>, f: Vec<f64>, violation: f64) -> Self {
        Self { x, f, violation }
    }

    /// Unconstrained solution.
    pub fn unconstrained(x: Vec<f64>, f: Vec<f64>) -> Self {
        Self::new(x, f, 0.0)
    }

    pub fn is_feasible(&self) -> bool {
        self.violation <= 0.0
    }
}

/// Box constraints of the decision space.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(config(format!(
                "bounds length mismatch: {} lower vs {} upper",
                lower.len(),
                upper.len()
            )));
        }
        if let Some(j) = (0..lower.len()).find(|&j| !(lower[j] < upper[j])) {
            return Err(config(format!(
                "bound {j} is empty: [{}, {}]",
                lower[j], upper[j]
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Self::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    #[inline]
    pub fn range(&self, j: usize) -> f64 {
        self.upper[j] - self.lower[j]
    }

    #[inline]
    pub fn clip(&self, j: usize, v: f64) -> f64 {
        v.clamp(self.lower[j], self.upper[j])
    }

    pub fn clip_all(&self, x: &mut [f64]) {
        for (j, v) in x.iter_mut().enumerate() {
            *v = self.clip(j, *v);
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .enumerate()
                .all(|(j, &v)| v >= self.lower[j] && v <= self.upper[j])
    }

    /// Coordinate mapped to `[0, 1]`.
    #[inline]
    pub fn normalize(&self, j: usize, v: f64) -> f64 {
        (v - self.lower[j]) / self.range(j)
    }

    #[inline]
    pub fn midpoint(&self, j: usize) -> f64 {
        0.5 * (self.lower[j] + self.upper[j])
    }
}

/// An ordered set of solutions with a nominal capacity.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Population {
    pub members: Vec<Solution>,
    pub capacity: usize,
}

impl Population {
    pub fn new(members: Vec<Solution>, capacity: usize) -> Self {
        Self { members, capacity }
    }

    pub fn empty(capacity: usize) -> Self {
        Self::new(Vec::new(), capacity)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Solution> {
        self.members.iter()
    }

    pub fn objectives(&self) -> Vec<Vec<f64>> {
        self.members.iter().map(|s| s.f.clone()).collect()
    }
}

impl<'a> IntoIterator for &'a Population {
    type Item = &'a Solution;
    type IntoIter = std::slice::Iter<'a, Solution>;

    fn into_iter(self) -> Self::IntoIter {
        self.members.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_reject_empty_interval() {
        assert!(Bounds::new(vec![0.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(Bounds::new(vec![0.0], vec![1.0, 2.0]).is_err());
    }

    #[test]
    fn clip_and_normalize() {
        let b = Bounds::new(vec![0.0, -1.0], vec![10.0, 1.0]).unwrap();
        let mut x = vec![12.0, -3.0];
        b.clip_all(&mut x);
        assert_eq!(x, vec![10.0, -1.0]);
        assert_eq!(b.normalize(0, 2.5), 0.25);
        assert_eq!(b.midpoint(1), 0.0);
    }
}
