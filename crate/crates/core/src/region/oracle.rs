use crate::error::{invalid, Error, Result};
use crate::grid::Raster;
use crate::scalar::Real;
use crate::search::GridPath;

use super::ProbabilityMap;

/// Model-free probability map built around a known path.
///
/// Cells within Chebyshev distance `radius` of any path cell get probability
/// 1, everything else 0; the result is then Gaussian-blurred with
/// `blur_sigma` (0 disables the blur) and rescaled so its peak is 1.
pub fn oracle_region<T: Real>(
    label_path: &GridPath,
    width: usize,
    height: usize,
    radius: usize,
    blur_sigma: T,
) -> Result<ProbabilityMap<T>> {
    if label_path.is_empty() {
        return Err(Error::InvalidPath("empty path".into()));
    }
    if radius < 1 {
        return Err(invalid("oracle radius must be >= 1"));
    }
    if !(blur_sigma >= T::zero()) || !blur_sigma.is_finite() {
        return Err(invalid("blur sigma must be finite and non-negative"));
    }
    if let Some(c) = label_path
        .cells
        .iter()
        .find(|c| c.x >= width || c.y >= height)
    {
        return Err(invalid(format!("path cell {c} outside {width}x{height}")));
    }

    let mut field = Raster::filled(width, height, T::zero());
    for c in &label_path.cells {
        let (x0, x1) = (c.x.saturating_sub(radius), (c.x + radius).min(width - 1));
        let (y0, y1) = (c.y.saturating_sub(radius), (c.y + radius).min(height - 1));
        for y in y0..=y1 {
            let row = &mut field.as_mut_slice()[y * width..(y + 1) * width];
            row[x0..=x1].iter_mut().for_each(|v| *v = T::one());
        }
    }
    if blur_sigma > T::zero() {
        field = gaussian_blur(&field, blur_sigma);
        let peak = field.as_slice().iter().fold(T::zero(), |a, v| a.max(*v));
        if peak > T::zero() {
            field
                .as_mut_slice()
                .iter_mut()
                .for_each(|v| *v = (*v / peak).min(T::one()));
        }
    }
    ProbabilityMap::from_raster(field)
}

/// Separable Gaussian blur; the kernel is renormalised where it leaves the grid.
fn gaussian_blur<T: Real>(src: &Raster<T>, sigma: T) -> Raster<T> {
    let r = (sigma * T::lit(3.0)).ceil().to_usize().unwrap_or(1).max(1);
    let two_s2 = T::lit(2.0) * sigma * sigma;
    let kernel: Vec<T> = (0..=2 * r)
        .map(|k| {
            let d = T::lit(k as f64 - r as f64);
            (-(d * d) / two_s2).exp()
        })
        .collect();
    let (w, h) = (src.width(), src.height());

    let pass = |input: &Raster<T>, horizontal: bool| -> Raster<T> {
        Raster::from_fn(w, h, |c| {
            let mut acc = T::zero();
            let mut wsum = T::zero();
            for (k, kv) in kernel.iter().enumerate() {
                let off = k as isize - r as isize;
                let (x, y) = if horizontal {
                    (c.x as isize + off, c.y as isize)
                } else {
                    (c.x as isize, c.y as isize + off)
                };
                if x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h {
                    acc = acc + *kv * input.as_slice()[y as usize * w + x as usize];
                    wsum = wsum + *kv;
                }
            }
            acc / wsum
        })
    };
    let tmp = pass(src, true);
    pass(&tmp, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;

    #[test]
    fn no_blur_gives_exact_corridor() {
        let path = GridPath::new(vec![Cell::new(2, 2), Cell::new(3, 3)]);
        let p = oracle_region::<f64>(&path, 8, 8, 1, 0.0).unwrap();
        for y in 0..8 {
            for x in 0..8 {
                let inside = (1..=4).contains(&x)
                    && (1..=4).contains(&y)
                    && !(x == 4 && y == 1)
                    && !(x == 1 && y == 4);
                assert_eq!(
                    p.get(Cell::new(x, y)),
                    if inside { 1.0 } else { 0.0 },
                    "({x},{y})"
                );
            }
        }
    }

    #[test]
    fn blurred_peak_is_one() {
        let path = GridPath::new((0..10).map(|x| Cell::new(x, 5)).collect());
        let p = oracle_region::<f64>(&path, 12, 12, 2, 1.5).unwrap();
        let peak = p.raster().as_slice().iter().fold(0.0f64, |a, v| a.max(*v));
        assert_eq!(peak, 1.0);
        assert!(p.get(Cell::new(5, 5)) > 0.9);
        assert!(p.get(Cell::new(5, 11)) < p.get(Cell::new(5, 8)));
        let again = oracle_region::<f64>(&path, 12, 12, 2, 1.5).unwrap();
        assert_eq!(p, again);
    }

    #[test]
    fn rejects_bad_arguments() {
        let path = GridPath::new(vec![Cell::new(0, 0)]);
        assert!(oracle_region::<f64>(&GridPath::default(), 4, 4, 1, 0.0).is_err());
        assert!(oracle_region::<f64>(&path, 4, 4, 0, 0.0).is_err());
        assert!(oracle_region::<f64>(&path, 4, 4, 1, -1.0).is_err());
        let far = GridPath::new(vec![Cell::new(9, 0)]);
        assert!(oracle_region::<f64>(&far, 4, 4, 1, 0.0).is_err());
    }
}
