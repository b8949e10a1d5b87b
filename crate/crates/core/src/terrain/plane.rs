use crate::grid::Cell;
use crate::scalar::Real;

use super::Dem;

/// Patch offsets `(dx, dy)` in row-major order around the centre cell.
pub const PATCH_OFFSETS: [(isize, isize); 9] = [
    (-1, -1),
    (0, -1),
    (1, -1),
    (-1, 0),
    (0, 0),
    (1, 0),
    (-1, 1),
    (0, 1),
    (1, 1),
];

/// Least-squares plane `z = a*x + b*y + c` over a 3x3 patch, in metres
/// relative to the patch centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchFit<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    /// Vertical residuals `z - plane(x, y)` in `PATCH_OFFSETS` order.
    pub residuals: [T; 9],
}

impl<T: Real> PatchFit<T> {
    /// Unit normal with non-negative vertical component.
    pub fn normal(&self) -> [T; 3] {
        let n = (self.a * self.a + self.b * self.b + T::one()).sqrt();
        [-self.a / n, -self.b / n, T::one() / n]
    }

    /// Plane offset `d` in `normal . p = d`.
    pub fn offset(&self) -> T {
        self.normal()[2] * self.c
    }

    /// Angle between the plane normal and the vertical, in degrees.
    pub fn slope_deg(&self) -> T {
        (self.a * self.a + self.b * self.b)
            .sqrt()
            .atan()
            .to_degrees()
    }

    pub fn sum_sq_residuals(&self) -> T {
        self.residuals.iter().map(|r| *r * *r).sum()
    }
}

/// Fits the patch centred on `cell`. Border patches replicate the nearest
/// edge heights.
pub fn fit_patch_plane<T: Real>(dem: &Dem<T>, cell: Cell) -> PatchFit<T> {
    let h = dem.cell_size();
    let heights = dem.heights();
    // Heights relative to the centre, so a level patch fits with exact zeros.
    let z0 = heights.get_clamped(cell.x as isize, cell.y as isize);
    let mut z = [T::zero(); 9];
    for (k, (dx, dy)) in PATCH_OFFSETS.iter().enumerate() {
        z[k] = heights.get_clamped(cell.x as isize + dx, cell.y as isize + dy) - z0;
    }

    // On the symmetric 3x3 stencil the normal equations are diagonal:
    // sum x = sum y = sum xy = 0 and sum x^2 = sum y^2 = 6 h^2.
    let mut sxz = T::zero();
    let mut syz = T::zero();
    let mut sz = T::zero();
    for (k, (dx, dy)) in PATCH_OFFSETS.iter().enumerate() {
        sxz = sxz + T::lit(*dx as f64) * z[k];
        syz = syz + T::lit(*dy as f64) * z[k];
        sz = sz + z[k];
    }
    let six_h = T::lit(6.0) * h;
    let a = sxz / six_h;
    let b = syz / six_h;
    let c = sz / T::lit(9.0);

    let mut residuals = [T::zero(); 9];
    for (k, (dx, dy)) in PATCH_OFFSETS.iter().enumerate() {
        let x = T::lit(*dx as f64) * h;
        let y = T::lit(*dy as f64) * h;
        residuals[k] = z[k] - (a * x + b * y + c);
    }
    PatchFit {
        a,
        b,
        c: c + z0,
        residuals,
    }
}
