//! Grid cells and dense row-major rasters.

use std::fmt;

use serde::{Deserialize, Serialize};

/// A grid coordinate. `x` is the column, `y` the row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: usize,
    pub y: usize,
}

impl Cell {
    pub const fn new(x: usize, y: usize) -> Self {
        Cell { x, y }
    }

    /// True when `other` is one of the eight neighbours of `self`.
    pub fn is_adjacent8(&self, other: &Cell) -> bool {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        dx <= 1 && dy <= 1 && (dx + dy) > 0
    }

    pub fn is_diagonal_to(&self, other: &Cell) -> bool {
        self.x != other.x && self.y != other.y
    }

    pub fn euclidean(&self, other: &Cell) -> f64 {
        let dx = self.x.abs_diff(other.x) as f64;
        let dy = self.y.abs_diff(other.y) as f64;
        dx.hypot(dy)
    }

    /// Shortest 8-connected path length between two cells on an empty grid.
    pub fn octile(&self, other: &Cell) -> f64 {
        let dx = self.x.abs_diff(other.x);
        let dy = self.y.abs_diff(other.y);
        let (lo, hi) = if dx < dy { (dx, dy) } else { (dy, dx) };
        (hi - lo) as f64 + lo as f64 * std::f64::consts::SQRT_2
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// Neighbour offsets in a fixed order: cardinals first, then diagonals.
pub(crate) const OFFSETS8: [(isize, isize); 8] = [
    (1, 0),
    (-1, 0),
    (0, 1),
    (0, -1),
    (1, 1),
    (1, -1),
    (-1, 1),
    (-1, -1),
];

/// Width/height pair with index helpers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dims {
    pub width: usize,
    pub height: usize,
}

impl Dims {
    pub const fn new(width: usize, height: usize) -> Self {
        Dims { width, height }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.width * self.height
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn contains(&self, c: Cell) -> bool {
        c.x < self.width && c.y < self.height
    }

    #[inline]
    pub fn index(&self, c: Cell) -> usize {
        c.y * self.width + c.x
    }

    #[inline]
    pub fn cell(&self, idx: usize) -> Cell {
        Cell::new(idx % self.width, idx / self.width)
    }

    /// In-bounds 8-neighbours of `c`, in `OFFSETS8` order.
    pub fn neighbors8(&self, c: Cell) -> impl Iterator<Item = Cell> + '_ {
        OFFSETS8.iter().filter_map(move |&(dx, dy)| {
            let x = c.x as isize + dx;
            let y = c.y as isize + dy;
            if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
                Some(Cell::new(x as usize, y as usize))
            } else {
                None
            }
        })
    }
}

/// Dense row-major raster.
#[derive(Debug, Clone, PartialEq)]
pub struct Raster<T> {
    dims: Dims,
    data: Vec<T>,
}

impl<T: Copy> Raster<T> {
    pub fn filled(width: usize, height: usize, value: T) -> Self {
        Raster {
            dims: Dims::new(width, height),
            data: vec![value; width * height],
        }
    }

    /// Wraps `data`; returns `None` if the length does not match the dimensions.
    pub fn from_vec(width: usize, height: usize, data: Vec<T>) -> Option<Self> {
        (width.checked_mul(height)? == data.len()).then(|| Raster {
            dims: Dims::new(width, height),
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(Cell) -> T) -> Self {
        let dims = Dims::new(width, height);
        let data = (0..dims.len()).map(|i| f(dims.cell(i))).collect();
        Raster { dims, data }
    }

    #[inline]
    pub fn dims(&self) -> Dims {
        self.dims
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.dims.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.dims.height
    }

    #[inline]
    pub fn get(&self, c: Cell) -> T {
        self.data[self.dims.index(c)]
    }

    #[inline]
    pub fn set(&mut self, c: Cell, v: T) {
        let i = self.dims.index(c);
        self.data[i] = v;
    }

    /// Value at a possibly out-of-range coordinate, clamped onto the border.
    #[inline]
    pub fn get_clamped(&self, x: isize, y: isize) -> T {
        let cx = x.clamp(0, self.dims.width as isize - 1) as usize;
        let cy = y.clamp(0, self.dims.height as isize - 1) as usize;
        self.data[cy * self.dims.width + cx]
    }

    #[inline]
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn as_mut_slice(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<T> {
        self.data
    }

    pub fn map<U: Copy>(&self, f: impl FnMut(T) -> U) -> Raster<U> {
        Raster {
            dims: self.dims,
            data: self.data.iter().copied().map(f).collect(),
        }
    }
}
