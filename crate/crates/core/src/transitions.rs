//! Bit-packed per-cell transition maps.
//!
//! A cell's movement rules are a 16-bit code: bit `15 - (4*d + e)` is set iff
//! an agent heading `d` may leave the cell heading `e` (rows and columns in
//! N, E, S, W order, most significant bit first). Row `d` is therefore the
//! 4-bit mask of outgoing headings for incoming heading `d`, and no valid
//! railway cell ever has more than two bits set in a row.
//!
//! Ten concrete tile patterns exist, closed under quarter-turn rotation and
//! grouped into eight case families (`case_id` 0..=7): curves share family 1
//! with the straight, and the mirrored simple switch shares family 2. See
//! `docs/transition_codes.md` for the full golden table.

use crate::direction::Direction;

/// The 16-bit transition code of one grid cell.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct CellTransitions(u16);

impl CellTransitions {
    pub const EMPTY: CellTransitions = CellTransitions(0);

    pub const fn new(code: u16) -> CellTransitions {
        CellTransitions(code)
    }

    pub const fn code(self) -> u16 {
        self.0
    }

    pub const fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// True iff an agent heading `heading` may leave toward `exit`.
    pub const fn allows(self, heading: Direction, exit: Direction) -> bool {
        let bit = 15 - (4 * heading.index() + exit.index());
        self.0 & (1 << bit) != 0
    }

    /// The 4-bit row for `heading`: bit `3 - e` set iff exit `e` is allowed
    /// (MSB-first N, E, S, W, i.e. the raw nibble of the code).
    pub const fn mask(self, heading: Direction) -> u8 {
        ((self.0 >> (12 - 4 * heading.index())) & 0xF) as u8
    }

    /// Number of outgoing options for `heading`; at most 2 on valid cells.
    pub const fn count_choices(self, heading: Direction) -> u8 {
        self.mask(heading).count_ones() as u8
    }

    /// Allowed outgoing headings for `heading`, in N, E, S, W order.
    pub fn outgoing(self, heading: Direction) -> impl Iterator<Item = Direction> {
        let row = self.mask(heading);
        Direction::ALL
            .into_iter()
            .filter(move |e| row & (1 << (3 - e.index())) != 0)
    }

    pub const fn with(self, heading: Direction, exit: Direction) -> CellTransitions {
        let bit = 15 - (4 * heading.index() + exit.index());
        CellTransitions(self.0 | (1 << bit))
    }

    /// Code of a single track piece joining the cell edges `a` and `b`.
    ///
    /// An agent entering through edge `a` (heading `opposite(a)`) leaves
    /// through `b` heading `b`, and vice versa. `a == b` is a dead-end stub:
    /// the lone transition bounces the agent back out of the same edge.
    pub const fn track(a: Direction, b: Direction) -> CellTransitions {
        if a.index() == b.index() {
            CellTransitions::EMPTY.with(a.opposite(), a)
        } else {
            CellTransitions::EMPTY
                .with(a.opposite(), b)
                .with(b.opposite(), a)
        }
    }

    pub const fn union(self, other: CellTransitions) -> CellTransitions {
        CellTransitions(self.0 | other.0)
    }

    /// Cell code after rotating the tile `quarter_turns` quarter turns
    /// clockwise: bit (d, e) maps to (d+k, e+k).
    pub fn rotated(self, quarter_turns: u8) -> CellTransitions {
        let k = quarter_turns % 4;
        let mut out = 0u16;
        for d in 0..4u8 {
            for e in 0..4u8 {
                if self.0 & (1 << (15 - (4 * d + e))) != 0 {
                    let (rd, re) = ((d + k) % 4, (e + k) % 4);
                    out |= 1 << (15 - (4 * rd + re));
                }
            }
        }
        CellTransitions(out)
    }

    /// Edges of the cell used by any track piece (bit `3 - e` per edge `e`).
    ///
    /// Edge `e` is connected iff some transition exits through it or some
    /// transition enters through it (i.e. row `opposite(e)` is non-empty).
    pub fn connected_edges(self) -> u8 {
        let mut edges = 0u8;
        for d in Direction::ALL {
            let row = self.mask(d);
            edges |= row;
            if row != 0 {
                edges |= 1 << (3 - d.opposite().index());
            }
        }
        edges
    }

    /// True iff some incoming heading has a genuine choice here.
    pub fn is_switch(self) -> bool {
        Direction::ALL.into_iter().any(|d| self.count_choices(d) >= 2)
    }

    /// The unordered edge pairs making up this cell's track work, in a
    /// deterministic order. Each transition (d, e) stems from the piece
    /// joining edges (opposite(d), e).
    pub fn track_pairs(self) -> impl Iterator<Item = (Direction, Direction)> {
        let mut seen = [false; 16];
        let mut pairs = [None; 16];
        let mut n = 0;
        for d in Direction::ALL {
            for e in self.outgoing(d) {
                let (a, b) = (d.opposite(), e);
                let (lo, hi) = if a.index() <= b.index() { (a, b) } else { (b, a) };
                let key = (lo.index() * 4 + hi.index()) as usize;
                if !seen[key] {
                    seen[key] = true;
                    pairs[n] = Some((lo, hi));
                    n += 1;
                }
            }
        }
        pairs.into_iter().flatten()
    }
}

impl core::ops::BitOr for CellTransitions {
    type Output = CellTransitions;
    fn bitor(self, rhs: CellTransitions) -> CellTransitions {
        self.union(rhs)
    }
}

/// The ten concrete tile patterns, grouped into the eight case families.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TileShape {
    /// Family 0: no track.
    Empty,
    /// Family 1: straight passage, no decision.
    Straight,
    /// Family 1: 90-degree passage, no decision.
    Curve,
    /// Family 2: straight with a branch curving off to the left of the stem.
    SwitchLeft,
    /// Family 2: mirrored simple switch, branch to the right of the stem.
    SwitchRight,
    /// Family 3: two straights crossing, no decision from any side.
    Crossing,
    /// Family 4: crossing plus one curve.
    SlipSingle,
    /// Family 5: crossing plus two parallel curves.
    SlipDouble,
    /// Family 6: two curves off a shared stem; both options involve a turn.
    SwitchSymmetric,
    /// Family 7: stub track; entering reverses the agent out the same edge.
    DeadEnd,
}

impl TileShape {
    pub const ALL: [TileShape; 10] = [
        TileShape::Empty,
        TileShape::Straight,
        TileShape::Curve,
        TileShape::SwitchLeft,
        TileShape::SwitchRight,
        TileShape::Crossing,
        TileShape::SlipSingle,
        TileShape::SlipDouble,
        TileShape::SwitchSymmetric,
        TileShape::DeadEnd,
    ];

    /// The case family (0..=7) this pattern belongs to.
    pub const fn case_id(self) -> u8 {
        match self {
            TileShape::Empty => 0,
            TileShape::Straight | TileShape::Curve => 1,
            TileShape::SwitchLeft | TileShape::SwitchRight => 2,
            TileShape::Crossing => 3,
            TileShape::SlipSingle => 4,
            TileShape::SlipDouble => 5,
            TileShape::SwitchSymmetric => 6,
            TileShape::DeadEnd => 7,
        }
    }

    /// Canonical (rotation 0) code of this pattern.
    pub const fn base_code(self) -> CellTransitions {
        CellTransitions::new(match self {
            TileShape::Empty => 0x0000,
            TileShape::Straight => 0x8020,        // N-S passage
            TileShape::Curve => 0x4002,           // S-E passage
            TileShape::SwitchLeft => 0x9220,      // N-S straight + S-W branch
            TileShape::SwitchRight => 0xC022,     // N-S straight + S-E branch
            TileShape::Crossing => 0x8421,        // N-S over E-W
            TileShape::SlipSingle => 0x9621,      // crossing + S-W curve
            TileShape::SlipDouble => 0xCC33,      // crossing + S-E and N-W curves
            TileShape::SwitchSymmetric => 0x5202, // S-E and S-W curves
            TileShape::DeadEnd => 0x2000,         // stub open to the South
        })
    }
}

/// Classification of a cell code: its concrete pattern plus the smallest
/// clockwise rotation of the pattern's base code producing it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CaseType {
    pub shape: TileShape,
    pub rotation: u8,
}

impl CaseType {
    /// The paper-style case family index in 0..=7.
    pub const fn case_id(self) -> u8 {
        self.shape.case_id()
    }
}

/// Canonical base code of a case family (the primary pattern of the family).
pub fn family_base_code(case_id: u8) -> Option<CellTransitions> {
    let shape = match case_id {
        0 => TileShape::Empty,
        1 => TileShape::Straight,
        2 => TileShape::SwitchLeft,
        3 => TileShape::Crossing,
        4 => TileShape::SlipSingle,
        5 => TileShape::SlipDouble,
        6 => TileShape::SwitchSymmetric,
        7 => TileShape::DeadEnd,
        _ => return None,
    };
    Some(shape.base_code())
}

/// Matches `code` against all rotations of the ten tile patterns.
///
/// `None` marks a corrupt or hand-crafted illegal code. The returned rotation
/// is the smallest index producing the code, so rotation-symmetric patterns
/// (straight, crossing, double slip) classify canonically.
pub fn classify_cell(code: CellTransitions) -> Option<CaseType> {
    for shape in TileShape::ALL {
        let base = shape.base_code();
        for rotation in 0..4u8 {
            if base.rotated(rotation) == code {
                return Some(CaseType { shape, rotation });
            }
        }
    }
    None
}
