//! The rail grid: a row-major array of transition codes, two bytes per cell.

use alloc::vec;
use alloc::vec::Vec;

use crate::direction::Direction;
use crate::transitions::CellTransitions;

/// A cell coordinate: `x` is the column (width axis), `y` the row (height
/// axis), origin at the top-left corner.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellPos {
    pub x: u16,
    pub y: u16,
}

impl CellPos {
    pub const fn new(x: u16, y: u16) -> CellPos {
        CellPos { x, y }
    }
}

/// Shorthand used all over the fixtures and the generator.
pub const fn cell(x: u16, y: u16) -> CellPos {
    CellPos::new(x, y)
}

/// A `width x height` grid of transition codes, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    width: u16,
    height: u16,
    cells: Vec<CellTransitions>,
}

/// One consistency defect: some movement allowed out of `pos` toward `exit`
/// is not answered by the neighbouring cell (or leaves the grid entirely,
/// in which case `neighbor` is `None`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ConsistencyViolation {
    pub pos: CellPos,
    pub exit: Direction,
    pub neighbor: Option<CellPos>,
}

impl Grid {
    pub fn empty(width: u16, height: u16) -> Grid {
        assert!(width > 0 && height > 0, "grid dimensions must be positive");
        Grid {
            width,
            height,
            cells: vec![CellTransitions::EMPTY; width as usize * height as usize],
        }
    }

    pub fn from_codes(width: u16, height: u16, codes: &[u16]) -> Option<Grid> {
        if codes.len() != width as usize * height as usize || width == 0 || height == 0 {
            return None;
        }
        Some(Grid {
            width,
            height,
            cells: codes.iter().map(|&c| CellTransitions::new(c)).collect(),
        })
    }

    pub const fn width(&self) -> u16 {
        self.width
    }

    pub const fn height(&self) -> u16 {
        self.height
    }

    pub fn cells(&self) -> &[CellTransitions] {
        &self.cells
    }

    pub const fn contains(&self, pos: CellPos) -> bool {
        pos.x < self.width && pos.y < self.height
    }

    pub const fn index(&self, pos: CellPos) -> usize {
        pos.y as usize * self.width as usize + pos.x as usize
    }

    pub fn get(&self, pos: CellPos) -> CellTransitions {
        self.cells[self.index(pos)]
    }

    pub fn set(&mut self, pos: CellPos, code: CellTransitions) {
        let idx = self.index(pos);
        self.cells[idx] = code;
    }

    /// ORs the track piece joining edges `a` and `b` into the cell.
    pub fn add_track(&mut self, pos: CellPos, a: Direction, b: Direction) {
        let idx = self.index(pos);
        self.cells[idx] = self.cells[idx] | CellTransitions::track(a, b);
    }

    /// The adjacent cell in direction `dir`, if it stays on the grid.
    pub fn neighbor(&self, pos: CellPos, dir: Direction) -> Option<CellPos> {
        let (dx, dy) = dir.offset();
        let nx = pos.x as i32 + dx;
        let ny = pos.y as i32 + dy;
        if nx < 0 || ny < 0 || nx >= self.width as i32 || ny >= self.height as i32 {
            None
        } else {
            Some(CellPos::new(nx as u16, ny as u16))
        }
    }

    /// Serializes the cell codes as little-endian u16, row-major: exactly
    /// `2 * width * height` bytes.
    pub fn to_le_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.cells.len() * 2);
        for c in &self.cells {
            out.extend_from_slice(&c.code().to_le_bytes());
        }
        out
    }

    pub fn from_le_bytes(width: u16, height: u16, bytes: &[u8]) -> Option<Grid> {
        if bytes.len() != width as usize * height as usize * 2 {
            return None;
        }
        let codes: Vec<u16> = bytes
            .chunks_exact(2)
            .map(|b| u16::from_le_bytes([b[0], b[1]]))
            .collect();
        Grid::from_codes(width, height, &codes)
    }

    /// Checks the joining rule: every outgoing connection of a cell must be
    /// answered by an incoming connection of the neighbour it points at.
    ///
    /// Violations are data, not failures; an empty list means the grid is a
    /// well-formed network. Exits are reported in row-major cell order, then
    /// N, E, S, W.
    pub fn validate_consistency(&self) -> Vec<ConsistencyViolation> {
        let mut violations = Vec::new();
        for y in 0..self.height {
            for x in 0..self.width {
                let pos = CellPos::new(x, y);
                let code = self.get(pos);
                if code.is_empty() {
                    continue;
                }
                let mut exits = 0u8;
                for d in Direction::ALL {
                    exits |= code.mask(d);
                }
                for e in Direction::ALL {
                    if exits & (1 << (3 - e.index())) == 0 {
                        continue;
                    }
                    match self.neighbor(pos, e) {
                        None => violations.push(ConsistencyViolation {
                            pos,
                            exit: e,
                            neighbor: None,
                        }),
                        Some(n) => {
                            // Arriving at n heading e; n must offer a way on.
                            if self.get(n).mask(e) == 0 {
                                violations.push(ConsistencyViolation {
                                    pos,
                                    exit: e,
                                    neighbor: Some(n),
                                });
                            }
                        }
                    }
                }
            }
        }
        violations
    }
}
