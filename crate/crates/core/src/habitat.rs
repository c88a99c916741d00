//! The toroidal lattice: item occupancy plus the pheromone field laid over it.
//!
//! Cells are addressed by [`Position`] and stored row-major (`y * width + x`).
//! Every coordinate computation wraps in both axes, so there are no borders.

use std::fmt::Write as _;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

/// Grid side length used when nothing else is configured.
pub const DEFAULT_SIDE: usize = 57;

/// Dense index of an item inside an [`ItemStore`](crate::datastream::ItemStore).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

impl ItemId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position {
    pub x: usize,
    pub y: usize,
}

impl Position {
    pub const fn new(x: usize, y: usize) -> Self {
        Self { x, y }
    }
}

/// Width and height of a toroidal lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(
            width >= 3 && height >= 3,
            "toroidal grid must be at least 3x3, got {width}x{height}"
        );
        Self { width, height }
    }

    #[inline]
    pub fn cells(&self) -> usize {
        self.width * self.height
    }

    /// Maps any signed coordinate pair onto the torus.
    #[inline]
    pub fn wrap(&self, x: i64, y: i64) -> Position {
        Position {
            x: x.rem_euclid(self.width as i64) as usize,
            y: y.rem_euclid(self.height as i64) as usize,
        }
    }

    /// Position reached by stepping `(dx, dy)` from `p`.
    #[inline]
    pub fn offset(&self, p: Position, dx: i64, dy: i64) -> Position {
        self.wrap(p.x as i64 + dx, p.y as i64 + dy)
    }

    #[inline]
    pub fn index(&self, p: Position) -> usize {
        debug_assert!(p.x < self.width && p.y < self.height);
        p.y * self.width + p.x
    }

    #[inline]
    pub fn position(&self, index: usize) -> Position {
        Position {
            x: index % self.width,
            y: index / self.width,
        }
    }

    /// The nine cells of the 3x3 block centred on `center`, row-major, north-west first.
    #[inline]
    pub fn block3x3(&self, center: Position) -> [Position; 9] {
        let mut out = [center; 9];
        let mut k = 0;
        for dy in -1..=1 {
            for dx in -1..=1 {
                out[k] = self.offset(center, dx, dy);
                k += 1;
            }
        }
        out
    }
}

/// Item occupancy of the lattice. A cell holds at most one item and an item sits in at
/// most one cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    dims: Dims,
    cells: Vec<Option<ItemId>>,
    occupied: usize,
}

impl Grid {
    pub fn new(width: usize, height: usize) -> Self {
        let dims = Dims::new(width, height);
        Self {
            dims,
            cells: vec![None; dims.cells()],
            occupied: 0,
        }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn width(&self) -> usize {
        self.dims.width
    }

    pub fn height(&self) -> usize {
        self.dims.height
    }

    pub fn wrap(&self, x: i64, y: i64) -> Position {
        self.dims.wrap(x, y)
    }

    #[inline]
    pub fn get(&self, p: Position) -> Option<ItemId> {
        self.cells[self.dims.index(p)]
    }

    pub fn is_empty_at(&self, p: Position) -> bool {
        self.get(p).is_none()
    }

    /// Number of occupied cells.
    pub fn item_count(&self) -> usize {
        self.occupied
    }

    pub fn free_cells(&self) -> usize {
        self.cells.len() - self.occupied
    }

    /// Puts `item` on `p`. Fails with [`Error::CellOccupied`] and leaves the grid
    /// untouched when the cell already holds something.
    pub fn place(&mut self, item: ItemId, p: Position) -> Result<()> {
        let idx = self.dims.index(p);
        if self.cells[idx].is_some() {
            return Err(Error::CellOccupied(p));
        }
        debug_assert!(
            !self.cells.contains(&Some(item)),
            "item {item:?} already on the grid"
        );
        self.cells[idx] = Some(item);
        self.occupied += 1;
        Ok(())
    }

    /// Clears `p`, returning what was there.
    pub fn remove(&mut self, p: Position) -> Option<ItemId> {
        let idx = self.dims.index(p);
        let taken = self.cells[idx].take();
        if taken.is_some() {
            self.occupied -= 1;
        }
        taken
    }

    /// The 3x3 block around `center` with its contents, row-major from the north-west.
    pub fn neighborhood3x3(&self, center: Position) -> [(Position, Option<ItemId>); 9] {
        self.dims.block3x3(center).map(|p| (p, self.get(p)))
    }

    /// All occupied cells in row-major order.
    pub fn occupants(&self) -> impl Iterator<Item = (Position, ItemId)> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter_map(|(i, c)| c.map(|id| (self.dims.position(i), id)))
    }

    /// Writes `x,y,item_id` rows for every occupied cell. `item_id` is produced by
    /// `name`, which lets callers substitute external identifiers.
    pub fn write_occupancy_csv<W: Write>(
        &self,
        mut out: W,
        name: impl Fn(ItemId) -> u64,
    ) -> std::io::Result<()> {
        writeln!(out, "x,y,item_id")?;
        for (p, id) in self.occupants() {
            writeln!(out, "{},{},{}", p.x, p.y, name(id))?;
        }
        Ok(())
    }
}

/// Non-negative pheromone concentration per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PheromoneField {
    dims: Dims,
    sigma: Vec<f64>,
}

impl PheromoneField {
    pub fn new(width: usize, height: usize) -> Self {
        let dims = Dims::new(width, height);
        Self {
            dims,
            sigma: vec![0.0; dims.cells()],
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn get(&self, p: Position) -> f64 {
        self.sigma[self.dims.index(p)]
    }

    /// Overwrites one cell. Negative values are rejected.
    pub fn set(&mut self, p: Position, value: f64) -> Result<()> {
        if value.is_nan() || value < 0.0 {
            return Err(Error::NegativeConcentration(value));
        }
        let idx = self.dims.index(p);
        self.sigma[idx] = value;
        Ok(())
    }

    pub fn values(&self) -> &[f64] {
        &self.sigma
    }

    /// Adds `eta` at `p`.
    #[inline]
    pub fn deposit(&mut self, p: Position, eta: f64) {
        debug_assert!(eta > 0.0);
        let idx = self.dims.index(p);
        self.sigma[idx] += eta;
    }

    /// Multiplicative decay of every cell: `sigma <- (1 - kappa) * sigma`.
    pub fn evaporate(&mut self, kappa: f64) {
        debug_assert!((0.0..=1.0).contains(&kappa));
        if kappa == 0.0 {
            return;
        }
        let keep = 1.0 - kappa;
        for s in &mut self.sigma {
            *s *= keep;
        }
    }

    pub fn total(&self) -> f64 {
        self.sigma.iter().sum()
    }

    /// `(min, mean, max)` over all cells.
    pub fn summary(&self) -> (f64, f64, f64) {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &s in &self.sigma {
            lo = lo.min(s);
            hi = hi.max(s);
        }
        (lo, self.total() / self.sigma.len() as f64, hi)
    }

    /// Plain PGM (P2) heatmap, one gray level per cell, scaled linearly from
    /// `[0, max sigma]` onto `[0, 255]`.
    pub fn to_pgm(&self) -> String {
        let (_, _, max) = self.summary();
        let Dims { width, height } = self.dims;
        let mut s = String::with_capacity(16 + 4 * width * height);
        let _ = write!(s, "P2\n{width} {height}\n255\n");
        for row in self.sigma.chunks(width) {
            let mut first = true;
            for &v in row {
                let level = if max > 0.0 {
                    (v / max * 255.0).round() as u8
                } else {
                    0
                };
                if !first {
                    s.push(' ');
                }
                first = false;
                let _ = write!(s, "{level}");
            }
            s.push('\n');
        }
        s
    }

    pub fn write_pgm(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_pgm()).map_err(|e| Error::io(path, e))
    }
}
