//! Procedural generation of valid railway networks and agent tasks.
//!
//! Layout scheme: horizontal cities (a bundle of parallel station tracks
//! funnelled into one main line by simple switches at both ends), placed
//! with minimum spacing, then chained left to right by corridors routed
//! with a breadth-first search over (cell, heading) states. The router
//! only ever lays a track piece whose union with the existing cell still
//! classifies as a valid tile, so corridor crossings become diamonds and
//! merges share track; the joining rule holds by construction and is
//! re-validated before returning. Unused chain-end ports are capped with
//! dead-end stubs.
//!
//! Everything is a pure function of the parameters; the same seed yields a
//! byte-identical grid.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::direction::Direction;
use crate::grid::{cell, CellPos, Grid};
use crate::observations::{DistanceMap, UNREACHABLE};
use crate::sim::AgentTask;
use crate::transitions::{classify_cell, CellTransitions};

/// Cells per station track inside a city.
const STATION_LEN: u16 = 4;
/// Minimum Chebyshev distance between city centers.
const MIN_CITY_SPACING: i32 = 6;
/// Free border kept around every city footprint.
const MARGIN: u16 = 1;
/// Bounded attempts before giving up on a parameter set.
const MAX_ATTEMPTS: u32 = 10;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorParams {
    pub width: u16,
    pub height: u16,
    pub n_cities: u16,
    pub n_agents: u16,
    /// Parallel station tracks per city (effective range 1..=3).
    pub max_parallel_tracks: u8,
    /// Cities on a regular lattice instead of random placement.
    pub grid_mode: bool,
    pub seed: u64,
}

impl GeneratorParams {
    /// The benchmark-style small configuration.
    pub fn small(seed: u64) -> GeneratorParams {
        GeneratorParams {
            width: 25,
            height: 25,
            n_cities: 3,
            n_agents: 5,
            max_parallel_tracks: 2,
            grid_mode: false,
            seed,
        }
    }
}

/// A generated city: its rough center and the station cells agents may use
/// as starts and targets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct City {
    pub center: CellPos,
    pub station_tracks: Vec<CellPos>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GenerateError {
    InvalidParams(&'static str),
    /// Constraints could not be satisfied in bounded attempts.
    GenerationFailed { constraint: String },
}

impl core::fmt::Display for GenerateError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            GenerateError::InvalidParams(reason) => write!(f, "invalid parameters: {reason}"),
            GenerateError::GenerationFailed { constraint } => {
                write!(f, "generation failed: {constraint}")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskAssignmentError {
    /// Fewer than two cities with free station tracks.
    TooFewCities,
    /// Start or target station capacity exhausted.
    CapacityExhausted,
    /// No remaining target is reachable from the drawn start.
    NoReachableTarget { agent: usize },
}

impl core::fmt::Display for TaskAssignmentError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            TaskAssignmentError::TooFewCities => {
                write!(f, "need at least two cities with station tracks")
            }
            TaskAssignmentError::CapacityExhausted => write!(f, "station capacity exhausted"),
            TaskAssignmentError::NoReachableTarget { agent } => {
                write!(f, "no reachable target for agent {agent}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GenerateError {}
#[cfg(feature = "std")]
impl std::error::Error for TaskAssignmentError {}

/// A planned city before any track is laid. `x0` is the first station
/// column, `cy` the main row; station rows run `cy..cy + n_tracks`.
#[derive(Clone, Copy, Debug)]
struct CityPlan {
    x0: u16,
    cy: u16,
    n_tracks: u16,
}

impl CityPlan {
    fn x1(&self) -> u16 {
        self.x0 + STATION_LEN - 1
    }

    fn port_west(&self) -> CellPos {
        cell(self.x0 - self.n_tracks, self.cy)
    }

    fn port_east(&self) -> CellPos {
        cell(self.x1() + self.n_tracks, self.cy)
    }

    /// Inclusive footprint: every cell the city lays track on.
    fn footprint(&self) -> (u16, u16, u16, u16) {
        (
            self.x0 - self.n_tracks,
            self.x1() + self.n_tracks,
            self.cy,
            self.cy + self.n_tracks - 1,
        )
    }

    fn center(&self) -> CellPos {
        cell(self.x0 + STATION_LEN / 2, self.cy)
    }

    fn overlaps_inflated(&self, other: &CityPlan) -> bool {
        let (ax0, ax1, ay0, ay1) = self.footprint();
        let (bx0, bx1, by0, by1) = other.footprint();
        let (ax0, ay0) = (ax0.saturating_sub(MARGIN), ay0.saturating_sub(MARGIN));
        let (ax1, ay1) = (ax1 + MARGIN, ay1 + MARGIN);
        ax0 <= bx1 && bx0 <= ax1 && ay0 <= by1 && by0 <= ay1
    }

    fn spaced_from(&self, other: &CityPlan) -> bool {
        let (a, b) = (self.center(), other.center());
        let dx = (a.x as i32 - b.x as i32).abs();
        let dy = (a.y as i32 - b.y as i32).abs();
        dx.max(dy) >= MIN_CITY_SPACING
    }
}

/// Generates a consistent railway network with `n_cities` chained cities.
pub fn generate_sparse(params: &GeneratorParams) -> Result<(Grid, Vec<City>), GenerateError> {
    if params.width < 12 || params.height < 12 {
        return Err(GenerateError::InvalidParams("width and height must be >= 12"));
    }
    if params.n_cities < 2 {
        return Err(GenerateError::InvalidParams("need at least 2 cities"));
    }
    if params.n_agents < 1 {
        return Err(GenerateError::InvalidParams("need at least 1 agent"));
    }
    if params.max_parallel_tracks < 1 {
        return Err(GenerateError::InvalidParams("need at least 1 parallel track"));
    }
    let n_tracks = (params.max_parallel_tracks as u16).min(3);
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut last_constraint = String::new();
    for _ in 0..MAX_ATTEMPTS {
        match try_generate(params, n_tracks, &mut rng) {
            Ok(result) => return Ok(result),
            Err(constraint) => last_constraint = constraint,
        }
    }
    Err(GenerateError::GenerationFailed {
        constraint: last_constraint,
    })
}

fn try_generate(
    params: &GeneratorParams,
    n_tracks: u16,
    rng: &mut ChaCha8Rng,
) -> Result<(Grid, Vec<City>), String> {
    let mut plans = if params.grid_mode {
        place_lattice(params, n_tracks)?
    } else {
        place_random(params, n_tracks, rng)?
    };
    plans.sort_by_key(|p| (p.x0, p.cy));

    let mut grid = Grid::empty(params.width, params.height);
    for plan in &plans {
        lay_city(&mut grid, plan);
    }

    let mut blocked = vec![false; params.width as usize * params.height as usize];
    for plan in &plans {
        let (x0, x1, y0, y1) = plan.footprint();
        for y in y0..=y1 {
            for x in x0..=x1 {
                blocked[grid.index(cell(x, y))] = true;
            }
        }
    }

    for pair in plans.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let from = east_of(&grid, a.port_east())
            .ok_or_else(|| format!("no corridor room east of city at {:?}", a.center()))?;
        let to = west_of(&grid, b.port_west())
            .ok_or_else(|| format!("no corridor room west of city at {:?}", b.center()))?;
        let path = route_corridor(&grid, &blocked, from, to).ok_or_else(|| {
            format!(
                "could not route a corridor between cities at {:?} and {:?}",
                a.center(),
                b.center()
            )
        })?;
        for (pos, edge_in, edge_out) in path {
            grid.add_track(pos, edge_in, edge_out);
        }
    }

    // Chain ends are not connected to anything; cap the open ports.
    let first = plans.first().unwrap();
    let last = plans.last().unwrap();
    grid.set(
        first.port_west(),
        CellTransitions::track(Direction::East, Direction::East),
    );
    grid.set(
        last.port_east(),
        CellTransitions::track(Direction::West, Direction::West),
    );

    for (idx, code) in grid.cells().iter().enumerate() {
        if classify_cell(*code).is_none() {
            return Err(format!("cell {idx} compiled to invalid code {:#06x}", code.code()));
        }
    }
    let violations = grid.validate_consistency();
    if !violations.is_empty() {
        return Err(format!("{} consistency violations after layout", violations.len()));
    }

    let cities = plans
        .iter()
        .map(|plan| {
            let mut station_tracks = Vec::new();
            for track in 0..plan.n_tracks {
                for x in plan.x0..=plan.x1() {
                    station_tracks.push(cell(x, plan.cy + track));
                }
            }
            City {
                center: plan.center(),
                station_tracks,
            }
        })
        .collect();
    Ok((grid, cities))
}

fn east_of(grid: &Grid, pos: CellPos) -> Option<CellPos> {
    grid.neighbor(pos, Direction::East)
}

fn west_of(grid: &Grid, pos: CellPos) -> Option<CellPos> {
    grid.neighbor(pos, Direction::West)
}

/// Valid x0/cy ranges for a city plan, honoring the border margin.
fn plan_ranges(params: &GeneratorParams, n_tracks: u16) -> Option<(u16, u16, u16, u16)> {
    let x0_min = MARGIN + n_tracks;
    let x0_max = params
        .width
        .checked_sub(MARGIN + n_tracks + STATION_LEN)?;
    let cy_min = MARGIN;
    let cy_max = params.height.checked_sub(MARGIN + n_tracks)?;
    if x0_min > x0_max || cy_min > cy_max {
        return None;
    }
    Some((x0_min, x0_max, cy_min, cy_max))
}

fn place_random(
    params: &GeneratorParams,
    n_tracks: u16,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CityPlan>, String> {
    let (x0_min, x0_max, cy_min, cy_max) = plan_ranges(params, n_tracks)
        .ok_or_else(|| format!("grid too small for a {n_tracks}-track city"))?;
    let mut plans: Vec<CityPlan> = Vec::new();
    let mut tries = 0u32;
    let budget = 200 * params.n_cities as u32;
    while plans.len() < params.n_cities as usize {
        tries += 1;
        if tries > budget {
            return Err(format!(
                "placed only {} of {} cities with spacing {MIN_CITY_SPACING}",
                plans.len(),
                params.n_cities
            ));
        }
        let candidate = CityPlan {
            x0: rng.random_range(x0_min..=x0_max),
            cy: rng.random_range(cy_min..=cy_max),
            n_tracks,
        };
        let ok = plans
            .iter()
            .all(|p| candidate.spaced_from(p) && !candidate.overlaps_inflated(p));
        if ok {
            plans.push(candidate);
        }
    }
    Ok(plans)
}

fn place_lattice(params: &GeneratorParams, n_tracks: u16) -> Result<Vec<CityPlan>, String> {
    let (x0_min, x0_max, cy_min, cy_max) = plan_ranges(params, n_tracks)
        .ok_or_else(|| format!("grid too small for a {n_tracks}-track city"))?;
    let n = params.n_cities as u32;
    // Try near-square arrangements first, then progressively flatter ones.
    let mut col_candidates: Vec<u32> = Vec::new();
    let isqrt = n.isqrt();
    let root = if isqrt * isqrt == n { isqrt } else { isqrt + 1 };
    for delta in 0..n {
        for c in [root.saturating_sub(delta), root + delta] {
            if (1..=n).contains(&c) && !col_candidates.contains(&c) {
                col_candidates.push(c);
            }
        }
    }
    for cols in col_candidates {
        let rows = n.div_ceil(cols);
        let spread = |min: u16, max: u16, count: u32, i: u32| -> u16 {
            if count <= 1 {
                (min + max) / 2
            } else {
                min + ((max - min) as u32 * i / (count - 1)) as u16
            }
        };
        let mut plans = Vec::new();
        'grid: for i in 0..n {
            let (col, row) = (i % cols, i / cols);
            let plan = CityPlan {
                x0: spread(x0_min, x0_max, cols, col),
                cy: spread(cy_min, cy_max, rows, row),
                n_tracks,
            };
            for p in &plans {
                if !plan.spaced_from(p) || plan.overlaps_inflated(p) {
                    break 'grid;
                }
            }
            plans.push(plan);
        }
        if plans.len() == n as usize {
            return Ok(plans);
        }
    }
    Err(format!("no lattice arrangement fits {n} cities"))
}

fn lay_city(grid: &mut Grid, plan: &CityPlan) {
    use Direction::*;
    let (x0, cy, n) = (plan.x0, plan.cy, plan.n_tracks);
    let x1 = plan.x1();
    for track in 0..n {
        for x in x0..=x1 {
            grid.add_track(cell(x, cy + track), East, West);
        }
    }
    grid.add_track(plan.port_west(), East, West);
    grid.add_track(plan.port_east(), East, West);
    for k in 1..n {
        // West funnel: switch on the main row, vertical drop, corner curve,
        // feeder into station track k.
        grid.add_track(cell(x0 - k, cy), East, West);
        grid.add_track(cell(x0 - k, cy), West, South);
        for yy in 1..k {
            grid.add_track(cell(x0 - k, cy + yy), North, South);
        }
        grid.add_track(cell(x0 - k, cy + k), North, East);
        for x in (x0 - k + 1)..x0 {
            grid.add_track(cell(x, cy + k), East, West);
        }
        // East funnel, mirrored.
        grid.add_track(cell(x1 + k, cy), East, West);
        grid.add_track(cell(x1 + k, cy), East, South);
        for yy in 1..k {
            grid.add_track(cell(x1 + k, cy + yy), North, South);
        }
        grid.add_track(cell(x1 + k, cy + k), North, West);
        for x in (x1 + 1)..(x1 + k) {
            grid.add_track(cell(x, cy + k), East, West);
        }
    }
}

/// Breadth-first corridor router over (cell, heading) states.
///
/// The path enters `from` heading East (its West edge ties to the east port
/// of the source city) and must leave `to` through its East edge (tying to
/// the west port of the destination city). Expanding a state lays the track
/// piece {entry edge, exit edge} on the current cell; a move is taken only
/// if that piece unions with the existing cell into a valid tile and the
/// next cell is neither outside the grid nor inside a city footprint.
fn route_corridor(
    grid: &Grid,
    blocked: &[bool],
    from: CellPos,
    to: CellPos,
) -> Option<Vec<(CellPos, Direction, Direction)>> {
    let n_cells = grid.width() as usize * grid.height() as usize;
    let state = |pos: CellPos, h: Direction| grid.index(pos) * 4 + h.index() as usize;
    if blocked[grid.index(from)] || blocked[grid.index(to)] {
        return None;
    }

    let compatible = |pos: CellPos, a: Direction, b: Direction| {
        classify_cell(grid.get(pos) | CellTransitions::track(a, b)).is_some()
    };

    let mut parent: Vec<u32> = vec![u32::MAX; n_cells * 4];
    let mut queue = VecDeque::new();
    let start = state(from, Direction::East);
    parent[start] = start as u32;
    queue.push_back((from, Direction::East));

    let mut goal_state = None;
    'search: while let Some((pos, heading)) = queue.pop_front() {
        if pos == to && compatible(pos, heading.opposite(), Direction::East) {
            goal_state = Some(state(pos, heading));
            break 'search;
        }
        for exit in [heading, heading.left(), heading.right()] {
            if !compatible(pos, heading.opposite(), exit) {
                continue;
            }
            let Some(next) = grid.neighbor(pos, exit) else {
                continue;
            };
            if blocked[grid.index(next)] {
                continue;
            }
            let next_state = state(next, exit);
            if parent[next_state] == u32::MAX {
                parent[next_state] = state(pos, heading) as u32;
                queue.push_back((next, exit));
            }
        }
    }

    let goal = goal_state?;
    // Walk the parent chain back to the start, then lay pieces forward.
    let mut states = vec![goal];
    let mut cur = goal;
    while parent[cur] as usize != cur {
        cur = parent[cur] as usize;
        states.push(cur);
    }
    states.reverse();

    let decode = |s: usize| {
        let pos = cell((s / 4 % grid.width() as usize) as u16, (s / 4 / grid.width() as usize) as u16);
        (pos, Direction::from_index((s % 4) as u8).unwrap())
    };
    let mut pieces = Vec::with_capacity(states.len());
    for w in states.windows(2) {
        let (pos, heading) = decode(w[0]);
        let (_, exit) = decode(w[1]);
        pieces.push((pos, heading.opposite(), exit));
    }
    let (end_pos, end_heading) = decode(goal);
    pieces.push((end_pos, end_heading.opposite(), Direction::East));
    Some(pieces)
}

/// Draws `n_agents` tasks: unique start cells and unique target cells from
/// the station pools, start city always different from the target city, and
/// the start direction chosen so the target is reachable (the shorter of the
/// two headings when both reach).
pub fn assign_tasks(
    grid: &Grid,
    cities: &[City],
    n_agents: u16,
    seed: u64,
) -> Result<Vec<AgentTask>, TaskAssignmentError> {
    if n_agents == 0 {
        return Ok(Vec::new());
    }
    let usable = cities
        .iter()
        .filter(|c| !c.station_tracks.is_empty())
        .count();
    if usable < 2 {
        return Err(TaskAssignmentError::TooFewCities);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start_pool: Vec<(usize, CellPos)> = Vec::new();
    for (ci, city) in cities.iter().enumerate() {
        for pos in &city.station_tracks {
            start_pool.push((ci, *pos));
        }
    }
    let mut target_pool = start_pool.clone();
    let mut tasks = Vec::with_capacity(n_agents as usize);

    for agent in 0..n_agents as usize {
        if start_pool.is_empty() {
            return Err(TaskAssignmentError::CapacityExhausted);
        }
        let (start_city, start) =
            start_pool.swap_remove(rng.random_range(0..start_pool.len()));
        let mut candidates: Vec<usize> = (0..target_pool.len())
            .filter(|&i| target_pool[i].0 != start_city)
            .collect();
        if candidates.is_empty() {
            return Err(TaskAssignmentError::CapacityExhausted);
        }
        let mut assigned = None;
        while !candidates.is_empty() {
            let pick = rng.random_range(0..candidates.len());
            let target_idx = candidates.swap_remove(pick);
            let target = target_pool[target_idx].1;
            let dist = DistanceMap::build(grid, target);
            let east = dist.get(start, Direction::East);
            let west = dist.get(start, Direction::West);
            let direction = if east <= west && east != UNREACHABLE {
                Some(Direction::East)
            } else if west != UNREACHABLE {
                Some(Direction::West)
            } else {
                None
            };
            if let Some(direction) = direction {
                target_pool.swap_remove(target_idx);
                assigned = Some(AgentTask {
                    start,
                    start_direction: direction,
                    target,
                });
                break;
            }
        }
        match assigned {
            Some(task) => tasks.push(task),
            None => return Err(TaskAssignmentError::NoReachableTarget { agent }),
        }
    }
    Ok(tasks)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::direction::Direction;

    #[test]
    fn deterministic_in_seed() {
        let params = GeneratorParams::small(42);
        let (a, _) = generate_sparse(&params).unwrap();
        let (b, _) = generate_sparse(&params).unwrap();
        assert_eq!(a.to_le_bytes(), b.to_le_bytes());

        let (c, _) = generate_sparse(&GeneratorParams::small(43)).unwrap();
        assert_ne!(a.to_le_bytes(), c.to_le_bytes());
    }

    #[test]
    fn generated_network_is_consistent_and_classifiable() {
        let params = GeneratorParams {
            width: 25,
            height: 25,
            n_cities: 2,
            n_agents: 5,
            max_parallel_tracks: 2,
            grid_mode: false,
            seed: 42,
        };
        let (grid, cities) = generate_sparse(&params).unwrap();
        assert!(grid.validate_consistency().is_empty());
        assert!(grid.cells().iter().all(|c| classify_cell(*c).is_some()));
        assert_eq!(cities.len(), 2);
        for city in &cities {
            assert_eq!(city.station_tracks.len(), 2 * STATION_LEN as usize);
            for pos in &city.station_tracks {
                assert!(!grid.get(*pos).is_empty());
            }
        }
    }

    #[test]
    fn lattice_mode_generates_consistent_networks() {
        let params = GeneratorParams {
            width: 30,
            height: 30,
            n_cities: 4,
            n_agents: 4,
            max_parallel_tracks: 2,
            grid_mode: true,
            seed: 7,
        };
        let (grid, cities) = generate_sparse(&params).unwrap();
        assert!(grid.validate_consistency().is_empty());
        assert_eq!(cities.len(), 4);
    }

    #[test]
    fn too_many_cities_fail_with_the_constraint() {
        let params = GeneratorParams {
            width: 12,
            height: 12,
            n_cities: 9,
            n_agents: 1,
            max_parallel_tracks: 2,
            grid_mode: false,
            seed: 1,
        };
        match generate_sparse(&params) {
            Err(GenerateError::GenerationFailed { constraint }) => {
                assert!(!constraint.is_empty());
            }
            other => panic!("expected GenerationFailed, got {other:?}"),
        }
    }

    #[test]
    fn small_params_are_rejected() {
        let mut params = GeneratorParams::small(1);
        params.width = 11;
        assert!(matches!(
            generate_sparse(&params),
            Err(GenerateError::InvalidParams(_))
        ));
    }

    /// Forward breadth-first reachability oracle over the directed
    /// (cell, heading) graph, independent of DistanceMap.
    fn reaches(grid: &Grid, start: CellPos, dir: Direction, target: CellPos) -> bool {
        let mut visited =
            vec![false; grid.width() as usize * grid.height() as usize * 4];
        let idx = |p: CellPos, d: Direction| grid.index(p) * 4 + d.index() as usize;
        let mut queue = VecDeque::from([(start, dir)]);
        visited[idx(start, dir)] = true;
        while let Some((pos, heading)) = queue.pop_front() {
            if pos == target {
                return true;
            }
            for exit in grid.get(pos).outgoing(heading) {
                if let Some(next) = grid.neighbor(pos, exit) {
                    if !visited[idx(next, exit)] {
                        visited[idx(next, exit)] = true;
                        queue.push_back((next, exit));
                    }
                }
            }
        }
        false
    }

    #[test]
    fn tasks_are_reachable_unique_and_cross_city() {
        let params = GeneratorParams::small(20);
        let (grid, cities) = generate_sparse(&params).unwrap();
        let tasks = assign_tasks(&grid, &cities, 5, 77).unwrap();
        assert_eq!(tasks.len(), 5);
        let city_of = |pos: CellPos| {
            cities
                .iter()
                .position(|c| c.station_tracks.contains(&pos))
                .unwrap()
        };
        for (i, a) in tasks.iter().enumerate() {
            assert_ne!(city_of(a.start), city_of(a.target), "agent {i} stays home");
            assert!(
                reaches(&grid, a.start, a.start_direction, a.target),
                "agent {i} target unreachable"
            );
            for b in &tasks[i + 1..] {
                assert_ne!(a.start, b.start, "duplicate start");
                assert_ne!(a.target, b.target, "duplicate target");
            }
        }
        assert_eq!(assign_tasks(&grid, &cities, 5, 77).unwrap(), tasks);
        assert!(assign_tasks(&grid, &cities, 0, 1).unwrap().is_empty());
    }

    #[test]
    fn capacity_exhaustion_is_reported() {
        let params = GeneratorParams::small(3);
        let (grid, cities) = generate_sparse(&params).unwrap();
        let capacity: usize = cities.iter().map(|c| c.station_tracks.len()).sum();
        let result = assign_tasks(&grid, &cities, capacity as u16 + 1, 5);
        assert!(matches!(
            result,
            Err(TaskAssignmentError::CapacityExhausted)
        ));
    }

    #[test]
    fn hundred_seeds_hold_the_invariants() {
        for seed in 0..100u64 {
            let params = GeneratorParams {
                width: 25,
                height: 25,
                n_cities: 2 + (seed % 3) as u16,
                n_agents: 4,
                max_parallel_tracks: 2,
                grid_mode: false,
                seed,
            };
            let (grid, cities) = match generate_sparse(&params) {
                Ok(v) => v,
                Err(e) => panic!("seed {seed}: {e:?}"),
            };
            assert!(
                grid.validate_consistency().is_empty(),
                "seed {seed} inconsistent"
            );
            assert!(
                grid.cells().iter().all(|c| classify_cell(*c).is_some()),
                "seed {seed} has invalid cells"
            );
            let tasks = assign_tasks(&grid, &cities, 4, seed ^ 0xABCD).unwrap();
            for (i, t) in tasks.iter().enumerate() {
                assert!(
                    reaches(&grid, t.start, t.start_direction, t.target),
                    "seed {seed} agent {i} unreachable"
                );
            }
        }
    }
}
