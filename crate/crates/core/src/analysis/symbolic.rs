//! Region itineraries.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::integrator::Trajectory;
use crate::pwl::RegionLabeler;

fn symbol(label: u8) -> char {
    char::from_digit(u32::from(label), 36).unwrap_or('?')
}

/// One symbol per region entry; consecutive repeats collapse.
pub fn symbol_sequence(traj: &Trajectory) -> String {
    symbols_from_labels(&traj.regions)
}

/// Symbol sequence after relabelling the states with another scheme.
pub fn symbol_sequence_with(traj: &Trajectory, labeler: &impl RegionLabeler) -> String {
    let labels: Vec<u8> = traj.states.iter().map(|x| labeler.label(x)).collect();
    symbols_from_labels(&labels)
}

pub fn symbols_from_labels(labels: &[u8]) -> String {
    let mut out = String::new();
    let mut last = None;
    for &l in labels {
        if last != Some(l) {
            out.push(symbol(l));
            last = Some(l);
        }
    }
    out
}

/// True when every transition moves to a neighbouring region (labels differ
/// by exactly 2), i.e. no `15` or `51` in the three-scroll alphabet.
pub fn adjacent_transitions_only(symbols: &str) -> bool {
    symbols.chars().zip(symbols.chars().skip(1)).all(|(a, b)| {
        match (a.to_digit(36), b.to_digit(36)) {
            (Some(a), Some(b)) => a.abs_diff(b) == 2,
            _ => false,
        }
    })
}

/// Fraction of samples spent in each region.
pub fn occupancy(traj: &Trajectory) -> Result<BTreeMap<u8, f64>> {
    if traj.regions.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let mut counts: BTreeMap<u8, usize> = BTreeMap::new();
    for &l in &traj.regions {
        *counts.entry(l).or_default() += 1;
    }
    let total = traj.regions.len() as f64;
    Ok(counts
        .into_iter()
        .map(|(l, c)| (l, c as f64 / total))
        .collect())
}
