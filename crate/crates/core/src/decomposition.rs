//! Region-conforming rectangular decomposition of the workspace not occupied
//! by fixed bodies.
//!
//! Grid lines are the workspace bounds, every region and fixed-body edge, and
//! uniform cuts at the requested resolution. Each grid rectangle therefore lies
//! entirely inside or outside every region and every fixed body. Cells inside
//! fixed bodies are dropped; the rest carry the label of the region containing
//! them, or the free-space proposition.

use std::collections::VecDeque;

use thiserror::Error;

use crate::geometry::{Rect, Vec2};
use crate::ltl::{DiscreteTrace, PropId};

pub type CellId = usize;

const LINE_EPS: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum DecompError {
    #[error("workspace bounds are degenerate")]
    DegenerateWorkspace,
    #[error("resolution must be positive and finite, got {0}")]
    BadResolution(f64),
    #[error("region {0:?} is degenerate or leaves the workspace bounds")]
    RegionOutOfBounds(PropId),
    #[error("regions {0:?} and {1:?} overlap")]
    OverlappingRegions(PropId, PropId),
    #[error("region {0:?} overlaps a fixed body")]
    RegionOnFixedBody(PropId),
    #[error("fixed body {0} is degenerate")]
    DegenerateFixedBody(usize),
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum LocateError {
    #[error("point ({0}, {1}) lies outside the workspace")]
    OutsideBounds(f64, f64),
    #[error("point ({0}, {1}) lies inside a fixed body")]
    InsideFixed(f64, f64),
    #[error("path is empty")]
    EmptyPath,
}

/// Static workspace: bounds, propositional regions and fixed-body footprints.
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    pub bounds: Rect,
    pub regions: Vec<(PropId, Rect)>,
    pub fixed: Vec<Rect>,
}

impl Workspace {
    pub fn validate(&self) -> Result<(), DecompError> {
        if self.bounds.is_degenerate() {
            return Err(DecompError::DegenerateWorkspace);
        }
        for (i, f) in self.fixed.iter().enumerate() {
            if f.is_degenerate() {
                return Err(DecompError::DegenerateFixedBody(i));
            }
        }
        for (i, (p, r)) in self.regions.iter().enumerate() {
            if r.is_degenerate() || !self.bounds.contains_rect(r, 0.0) {
                return Err(DecompError::RegionOutOfBounds(*p));
            }
            if self.fixed.iter().any(|f| f.overlap_area(r) > 0.0) {
                return Err(DecompError::RegionOnFixedBody(*p));
            }
            for (q, s) in &self.regions[i + 1..] {
                if r.overlap_area(s) > 0.0 {
                    return Err(DecompError::OverlappingRegions(*p, *q));
                }
            }
        }
        Ok(())
    }

    /// Default grid resolution: a twentieth of the shorter workspace side.
    pub fn default_resolution(&self) -> f64 {
        self.bounds.width().min(self.bounds.height()) / 20.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub rect: Rect,
    pub label: PropId,
    pub ix: usize,
    pub iy: usize,
}

impl Cell {
    pub fn center(&self) -> Vec2 {
        self.rect.center()
    }

    pub fn area(&self) -> f64 {
        self.rect.area()
    }
}

#[derive(Debug, Clone)]
pub struct Decomposition {
    bounds: Rect,
    xs: Vec<f64>,
    ys: Vec<f64>,
    grid: Vec<Option<CellId>>,
    cells: Vec<Cell>,
    adjacency: Vec<Vec<CellId>>,
}

fn grid_lines(lo: f64, hi: f64, edges: impl Iterator<Item = f64>, res: f64) -> Vec<f64> {
    let mut lines: Vec<f64> = vec![lo, hi];
    lines.extend(edges.filter(|v| *v > lo && *v < hi));
    lines.sort_by(f64::total_cmp);
    lines.dedup_by(|a, b| (*a - *b).abs() <= LINE_EPS);
    let geometric = lines.clone();
    let mut k = 1.0;
    loop {
        let v = lo + k * res;
        if v >= hi - LINE_EPS {
            break;
        }
        // Uniform cuts never displace a geometric edge.
        let near = geometric
            .binary_search_by(|g| g.total_cmp(&v))
            .map(|_| true)
            .unwrap_or_else(|i| {
                let left = i.checked_sub(1).map(|j| v - geometric[j]);
                let right = geometric.get(i).map(|g| g - v);
                left.is_some_and(|d| d <= res * 1e-3) || right.is_some_and(|d| d <= res * 1e-3)
            });
        if !near {
            lines.push(v);
        }
        k += 1.0;
    }
    lines.sort_by(f64::total_cmp);
    lines
}

/// Decomposes `w` into labeled cells over the fixed-body-free workspace.
pub fn decompose(w: &Workspace, resolution: f64) -> Result<Decomposition, DecompError> {
    w.validate()?;
    if !(resolution > 0.0 && resolution.is_finite()) {
        return Err(DecompError::BadResolution(resolution));
    }
    let b = w.bounds;
    let rects = || w.regions.iter().map(|(_, r)| r).chain(w.fixed.iter());
    let xs = grid_lines(
        b.min.x,
        b.max.x,
        rects().flat_map(|r| [r.min.x, r.max.x]),
        resolution,
    );
    let ys = grid_lines(
        b.min.y,
        b.max.y,
        rects().flat_map(|r| [r.min.y, r.max.y]),
        resolution,
    );
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;
    let mut grid = vec![None; nx * ny];
    let mut cells = Vec::new();
    for iy in 0..ny {
        for ix in 0..nx {
            let rect = Rect::new(xs[ix], ys[iy], xs[ix + 1], ys[iy + 1]);
            let c = rect.center();
            if w.fixed.iter().any(|f| f.contains_strict(c)) {
                continue;
            }
            let label = w
                .regions
                .iter()
                .find(|(_, r)| r.contains_strict(c))
                .map(|(p, _)| *p)
                .unwrap_or(PropId::FREE);
            grid[iy * nx + ix] = Some(cells.len());
            cells.push(Cell {
                rect,
                label,
                ix,
                iy,
            });
        }
    }
    let mut adjacency = vec![Vec::new(); cells.len()];
    for (id, c) in cells.iter().enumerate() {
        let mut push = |jx: usize, jy: usize| {
            if let Some(n) = grid[jy * nx + jx] {
                adjacency[id].push(n);
            }
        };
        if c.ix > 0 {
            push(c.ix - 1, c.iy);
        }
        if c.ix + 1 < nx {
            push(c.ix + 1, c.iy);
        }
        if c.iy > 0 {
            push(c.ix, c.iy - 1);
        }
        if c.iy + 1 < ny {
            push(c.ix, c.iy + 1);
        }
    }
    Ok(Decomposition {
        bounds: b,
        xs,
        ys,
        grid,
        cells,
        adjacency,
    })
}

impl Decomposition {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id]
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn neighbors(&self, id: CellId) -> &[CellId] {
        &self.adjacency[id]
    }

    pub fn bounds(&self) -> Rect {
        self.bounds
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(Cell::area).sum()
    }

    fn at(&self, ix: usize, iy: usize) -> Option<CellId> {
        self.grid[iy * (self.xs.len() - 1) + ix]
    }

    /// Maps a point to its cell and proposition. Points on a shared edge
    /// resolve to the cell on the +x/+y side; if that side is a fixed body,
    /// the cell on the other side is used.
    pub fn locate(&self, p: Vec2) -> Result<(CellId, PropId), LocateError> {
        if !self.bounds.contains(p) || !p.is_finite() {
            return Err(LocateError::OutsideBounds(p.x, p.y));
        }
        let index = |lines: &[f64], v: f64| -> (usize, bool) {
            let n = lines.len() - 1;
            let i = lines
                .partition_point(|l| *l <= v)
                .saturating_sub(1)
                .min(n - 1);
            (i, i > 0 && lines[i] == v)
        };
        let (ix, on_x) = index(&self.xs, p.x);
        let (iy, on_y) = index(&self.ys, p.y);
        let mut candidates = vec![(ix, iy)];
        if on_x {
            candidates.push((ix - 1, iy));
        }
        if on_y {
            candidates.push((ix, iy - 1));
        }
        if on_x && on_y {
            candidates.push((ix - 1, iy - 1));
        }
        candidates
            .into_iter()
            .find_map(|(x, y)| self.at(x, y))
            .map(|c| (c, self.cells[c].label))
            .ok_or(LocateError::InsideFixed(p.x, p.y))
    }

    /// Proposition trace of a sequence of positions.
    pub fn extract_trace<I>(&self, path: I) -> Result<DiscreteTrace, LocateError>
    where
        I: IntoIterator<Item = Vec2>,
    {
        let mut labels = Vec::new();
        for p in path {
            labels.push(self.locate(p)?.1);
        }
        DiscreteTrace::new(labels).map_err(|_| LocateError::EmptyPath)
    }

    /// Cells reachable from `start` through shared edges.
    pub fn reachable_from(&self, start: CellId) -> Vec<bool> {
        let mut seen = vec![false; self.cells.len()];
        let mut q = VecDeque::from([start]);
        seen[start] = true;
        while let Some(c) = q.pop_front() {
            for &n in &self.adjacency[c] {
                if !seen[n] {
                    seen[n] = true;
                    q.push_back(n);
                }
            }
        }
        seen
    }
}
