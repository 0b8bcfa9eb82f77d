//! Cardinal headings and agent-relative turns.

/// One of the four cardinal headings. Doubles as the name of a cell edge
/// (the edge facing that direction).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[repr(u8)]
pub enum Direction {
    North = 0,
    East = 1,
    South = 2,
    West = 3,
}

impl Direction {
    /// All headings in index order N, E, S, W.
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::East,
        Direction::South,
        Direction::West,
    ];

    pub const fn index(self) -> u8 {
        self as u8
    }

    pub const fn from_index(value: u8) -> Option<Direction> {
        match value {
            0 => Some(Direction::North),
            1 => Some(Direction::East),
            2 => Some(Direction::South),
            3 => Some(Direction::West),
            _ => None,
        }
    }

    pub const fn opposite(self) -> Direction {
        self.rotated(2)
    }

    /// Heading after `quarter_turns` clockwise quarter turns (N -> E -> S -> W).
    pub const fn rotated(self, quarter_turns: u8) -> Direction {
        match (self as u8 + quarter_turns) % 4 {
            0 => Direction::North,
            1 => Direction::East,
            2 => Direction::South,
            _ => Direction::West,
        }
    }

    pub const fn left(self) -> Direction {
        self.rotated(3)
    }

    pub const fn right(self) -> Direction {
        self.rotated(1)
    }

    /// Grid offset of one move in this heading. The origin is the top-left
    /// corner: x grows eastward, y grows southward.
    pub const fn offset(self) -> (i32, i32) {
        match self {
            Direction::North => (0, -1),
            Direction::East => (1, 0),
            Direction::South => (0, 1),
            Direction::West => (-1, 0),
        }
    }
}

/// A turn relative to an agent's current heading.
///
/// The order of [`RelativeDir::BRANCH_ORDER`] is the canonical branch and
/// tie-break order used by the tree observation and the shortest-path policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RelativeDir {
    Left,
    Forward,
    Right,
    Backward,
}

impl RelativeDir {
    pub const BRANCH_ORDER: [RelativeDir; 4] = [
        RelativeDir::Left,
        RelativeDir::Forward,
        RelativeDir::Right,
        RelativeDir::Backward,
    ];

    /// Absolute heading obtained by applying this turn to `heading`.
    pub const fn apply(self, heading: Direction) -> Direction {
        match self {
            RelativeDir::Left => heading.left(),
            RelativeDir::Forward => heading,
            RelativeDir::Right => heading.right(),
            RelativeDir::Backward => heading.opposite(),
        }
    }
}
