//! Minimal remaining travel distance to a target, per (cell, heading).

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::direction::Direction;
use crate::grid::{CellPos, Grid};

/// Sentinel for "no path from this pose to the target".
pub const UNREACHABLE: u32 = u32::MAX;

/// Exact shortest distances (in steps, unit edge cost) on the directed
/// (cell, heading) transition graph, computed by one backward breadth-first
/// search from the target.
///
/// `get(target, d)` is 0 for every heading; poses that cannot reach the
/// target report [`UNREACHABLE`] (`+inf` via [`DistanceMap::get_f64`]).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceMap {
    width: u16,
    height: u16,
    target: CellPos,
    dist: Vec<u32>,
}

impl DistanceMap {
    pub fn build(grid: &Grid, target: CellPos) -> DistanceMap {
        let (w, h) = (grid.width() as usize, grid.height() as usize);
        let mut dist = vec![UNREACHABLE; w * h * 4];
        let mut queue = VecDeque::new();
        let node = |pos: CellPos, d: Direction| {
            (pos.y as usize * w + pos.x as usize) * 4 + d.index() as usize
        };
        for d in Direction::ALL {
            dist[node(target, d)] = 0;
            queue.push_back((target, d));
        }
        // Backward relaxation: a predecessor of (cell, arrival) is any pose
        // (prev, heading) that may exit toward `arrival`, where prev is the
        // neighbour on the opposite side.
        while let Some((pos, arrival)) = queue.pop_front() {
            let next_dist = dist[node(pos, arrival)] + 1;
            let Some(prev) = grid.neighbor(pos, arrival.opposite()) else {
                continue;
            };
            let code = grid.get(prev);
            for heading in Direction::ALL {
                if code.allows(heading, arrival) && dist[node(prev, heading)] == UNREACHABLE {
                    dist[node(prev, heading)] = next_dist;
                    queue.push_back((prev, heading));
                }
            }
        }
        DistanceMap {
            width: grid.width(),
            height: grid.height(),
            target,
            dist,
        }
    }

    pub const fn target(&self) -> CellPos {
        self.target
    }

    pub fn get(&self, pos: CellPos, heading: Direction) -> u32 {
        debug_assert!(pos.x < self.width && pos.y < self.height);
        self.dist[(pos.y as usize * self.width as usize + pos.x as usize) * 4
            + heading.index() as usize]
    }

    /// Distance as a float, `+inf` when unreachable.
    pub fn get_f64(&self, pos: CellPos, heading: Direction) -> f64 {
        match self.get(pos, heading) {
            UNREACHABLE => f64::INFINITY,
            d => d as f64,
        }
    }
}
