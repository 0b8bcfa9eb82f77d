//! Deterministic SVG rendering of a grid state: one glyph per non-empty
//! cell, derived from the cell's track pieces, plus target markers and agent
//! markers showing position and heading.

use std::fmt::Write;

use railgrid_core::{AgentStatus, CellPos, Direction, EnvState, Grid};

const CELL: i32 = 30;
const HALF: i32 = CELL / 2;

const AGENT_COLORS: [&str; 8] = [
    "#d81b60", "#1e88e5", "#43a047", "#fb8c00", "#8e24aa", "#00acc1", "#f4511e", "#5e35b1",
];

fn edge_midpoint(d: Direction) -> (i32, i32) {
    match d {
        Direction::North => (HALF, 0),
        Direction::East => (CELL, HALF),
        Direction::South => (HALF, CELL),
        Direction::West => (0, HALF),
    }
}

/// Path fragment for one track piece of a cell at local coordinates.
fn piece_path(a: Direction, b: Direction) -> String {
    let (ax, ay) = edge_midpoint(a);
    if a == b {
        // Stub: half-line to the center; the bumper bar is drawn separately.
        return format!("M {ax} {ay} L {HALF} {HALF}");
    }
    let (bx, by) = edge_midpoint(b);
    if a.opposite() == b {
        format!("M {ax} {ay} L {bx} {by}")
    } else {
        // Quarter turn through the cell center.
        format!("M {ax} {ay} Q {HALF} {HALF} {bx} {by}")
    }
}

fn render_cell(out: &mut String, pos: CellPos, code: railgrid_core::CellTransitions) {
    let (ox, oy) = (pos.x as i32 * CELL, pos.y as i32 * CELL);
    let _ = write!(out, r#"<g class="cell" transform="translate({ox},{oy})">"#);
    for (a, b) in code.track_pairs() {
        let _ = write!(
            out,
            r#"<path d="{}" fill="none" stroke="#444" stroke-width="3"/>"#,
            piece_path(a, b)
        );
        if a == b {
            // Dead-end bumper: a short bar across the track at the center.
            let (x1, y1, x2, y2) = match a {
                Direction::North | Direction::South => (HALF - 6, HALF, HALF + 6, HALF),
                Direction::East | Direction::West => (HALF, HALF - 6, HALF, HALF + 6),
            };
            let _ = write!(
                out,
                r#"<line x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}" stroke="#444" stroke-width="4"/>"#
            );
        }
    }
    let _ = write!(out, "</g>");
}

fn heading_tip(d: Direction) -> (i32, i32) {
    match d {
        Direction::North => (0, -9),
        Direction::East => (9, 0),
        Direction::South => (0, 9),
        Direction::West => (-9, 0),
    }
}

/// Renders a bare grid (no agents).
pub fn render_grid_svg(grid: &Grid) -> String {
    render_impl(grid, &[])
}

/// Renders the current simulation state.
pub fn render_svg(env: &EnvState) -> String {
    let markers: Vec<Marker> = env
        .agents()
        .iter()
        .map(|a| Marker {
            id: a.id,
            target: a.target,
            position: match a.status {
                AgentStatus::Active => a.position.map(|p| (p, a.direction.unwrap())),
                _ => None,
            },
        })
        .collect();
    render_impl(env.grid(), &markers)
}

struct Marker {
    id: usize,
    target: CellPos,
    position: Option<(CellPos, Direction)>,
}

fn render_impl(grid: &Grid, markers: &[Marker]) -> String {
    let (w, h) = (grid.width() as i32 * CELL, grid.height() as i32 * CELL);
    let mut out = String::new();
    let _ = write!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#
    );
    let _ = write!(
        out,
        r#"<rect class="background" width="{w}" height="{h}" fill="#f4f1e8"/>"#
    );
    for y in 0..grid.height() {
        for x in 0..grid.width() {
            let pos = CellPos::new(x, y);
            let code = grid.get(pos);
            if !code.is_empty() {
                render_cell(&mut out, pos, code);
            }
        }
    }
    for marker in markers {
        let color = AGENT_COLORS[marker.id % AGENT_COLORS.len()];
        let (tx, ty) = (
            marker.target.x as i32 * CELL + 4,
            marker.target.y as i32 * CELL + 4,
        );
        let side = CELL - 8;
        let _ = write!(
            out,
            r#"<rect class="target" x="{tx}" y="{ty}" width="{side}" height="{side}" fill="none" stroke="{color}" stroke-width="2" stroke-dasharray="4 3"/>"#
        );
    }
    for marker in markers {
        let Some((pos, dir)) = marker.position else {
            continue;
        };
        let color = AGENT_COLORS[marker.id % AGENT_COLORS.len()];
        let (cx, cy) = (
            pos.x as i32 * CELL + HALF,
            pos.y as i32 * CELL + HALF,
        );
        let (dx, dy) = heading_tip(dir);
        let _ = write!(
            out,
            r#"<g class="agent"><circle cx="{cx}" cy="{cy}" r="8" fill="{color}"/><line x1="{cx}" y1="{cy}" x2="{}" y2="{}" stroke="{color}" stroke-width="4"/></g>"#,
            cx + dx,
            cy + dy
        );
    }
    out.push_str("</svg>\n");
    out
}
