//! Archive update operators and population reconstruction.

use std::collections::HashSet;

use rand::seq::index::sample;
use rand::Rng;

use crate::directions::ReferenceDirections;
use crate::error::{Error, Result};
use crate::pareto::{crowding_distance, nondominated_sort, ObjectiveScale};
use crate::rng::Stream;
use crate::solution::{Population, Solution};

/// Indices of the convergence-archive selection: whole fronts in rank order,
/// the splitting front truncated by descending crowding distance (ties keep
/// input order). Returned in ascending index order.
pub fn select_convergence(set: &[Solution], capacity: usize) -> Result<Vec<usize>> {
    if set.len() <= capacity {
        return Ok((0..set.len()).collect());
    }
    let mut chosen = Vec::with_capacity(capacity);
    for front in nondominated_sort(set)? {
        let room = capacity - chosen.len();
        if front.len() <= room {
            chosen.extend_from_slice(&front);
        } else {
            let objs: Vec<Vec<f64>> = front.iter().map(|&i| set[i].f.clone()).collect();
            let cd = crowding_distance(&objs);
            let mut order: Vec<usize> = (0..front.len()).collect();
            order.sort_by(|&a, &b| cd[b].total_cmp(&cd[a]).then(front[a].cmp(&front[b])));
            chosen.extend(order[..room].iter().map(|&o| front[o]));
        }
        if chosen.len() == capacity {
            break;
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Convergence-archive update: nondominated sorting with crowding truncation.
pub fn update_convergence_archive(set: &[Solution], capacity: usize) -> Result<Population> {
    let idx = select_convergence(set, capacity)?;
    Ok(Population::new(idx.into_iter().map(|i| set[i].clone()).collect(), capacity))
}

fn bit_key(x: &[f64]) -> Vec<u64> {
    x.iter().map(|v| v.to_bits()).collect()
}

/// Indices of the preference-archive selection, in selection order.
///
/// Candidates are visited by (violation, normalized objective norm, index).
/// First pass: candidates outside the convergence archive whose bin is still
/// empty, one per bin. Second pass: the remaining outside candidates. Third
/// pass: convergence-archive members.
pub fn select_preference(
    set: &[Solution],
    convergence: &[Solution],
    capacity: usize,
    dirs: &ReferenceDirections,
) -> Vec<usize> {
    if set.is_empty() || capacity == 0 {
        return Vec::new();
    }
    let scale = ObjectiveScale::from_nondominated(set)
        .or_else(|| ObjectiveScale::from_points(set.iter().map(|s| s.f.as_slice())))
        .expect("nonempty set");
    let in_convergence: HashSet<Vec<u64>> = convergence.iter().map(|s| bit_key(&s.x)).collect();
    let normalized: Vec<Vec<f64>> = set.iter().map(|s| scale.normalize(&s.f)).collect();
    let norm: Vec<f64> = normalized
        .iter()
        .map(|g| g.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by(|&a, &b| {
        set[a]
            .violation
            .total_cmp(&set[b].violation)
            .then(norm[a].total_cmp(&norm[b]))
            .then(a.cmp(&b))
    });
    let mut occupied = vec![false; dirs.len()];
    for s in convergence {
        occupied[dirs.assign(&scale.normalize(&s.f))] = true;
    }
    let member: Vec<bool> = set.iter().map(|s| in_convergence.contains(&bit_key(&s.x))).collect();
    let mut taken = vec![false; set.len()];
    let mut chosen = Vec::with_capacity(capacity);
    for &i in &order {
        if chosen.len() == capacity {
            return chosen;
        }
        let bin = dirs.assign(&normalized[i]);
        if !member[i] && !occupied[bin] {
            occupied[bin] = true;
            taken[i] = true;
            chosen.push(i);
        }
    }
    for want_member in [false, true] {
        for &i in &order {
            if chosen.len() == capacity {
                return chosen;
            }
            if !taken[i] && member[i] == want_member {
                taken[i] = true;
                chosen.push(i);
            }
        }
    }
    chosen
}

/// Preference-archive update: greedy coverage of bins left empty by `convergence`.
pub fn update_preference_archive(
    set: &[Solution],
    convergence: &[Solution],
    capacity: usize,
    dirs: &ReferenceDirections,
) -> Population {
    let idx = select_preference(set, convergence, capacity, dirs);
    Population::new(idx.into_iter().map(|i| set[i].clone()).collect(), capacity)
}

fn draw(pool: &[Solution], count: usize, rng: &mut Stream, out: &mut Vec<Solution>) {
    if count == 0 || pool.is_empty() {
        return;
    }
    if count <= pool.len() {
        out.extend(sample(rng, pool.len(), count).into_iter().map(|i| pool[i].clone()));
    } else {
        out.extend(pool.iter().cloned());
        for _ in pool.len()..count {
            out.push(pool[rng.random_range(0..pool.len())].clone());
        }
    }
}

/// Next population: `ceil(N/2)` members of the convergence archive and
/// `floor(N/2)` of the preference archive, any shortfall of the latter made up
/// from the former. Sampling is without replacement whenever the pool allows.
pub fn rebuild_population(
    convergence: &[Solution],
    preference: &[Solution],
    size: usize,
    rng: &mut Stream,
) -> Result<Population> {
    if convergence.is_empty() && preference.is_empty() {
        return Err(Error::Internal("cannot rebuild a population from empty archives".into()));
    }
    let (primary, secondary) = if convergence.is_empty() {
        (preference, convergence)
    } else {
        (convergence, preference)
    };
    let from_secondary = (size / 2).min(secondary.len());
    let mut members = Vec::with_capacity(size);
    draw(primary, size - from_secondary, rng, &mut members);
    draw(secondary, from_secondary, rng, &mut members);
    Ok(Population::new(members, size))
}
