//! Gaussian positional encoding of start and goal cells.

use crate::error::{invalid, Result};
use crate::grid::{Cell, Raster};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EncodingConfig<T> {
    /// Standard deviation in cells.
    pub sigma: T,
    /// Scale so the value at the centre is 1 instead of `1 / (2 pi sigma^2)`.
    pub normalize_peak: bool,
}

impl<T: Real> EncodingConfig<T> {
    /// `sigma = size / 4`, peak-normalised.
    pub fn for_map_size(size: usize) -> Self {
        Self::with_fraction(size, T::lit(0.25))
    }

    /// `sigma = fraction * size`, peak-normalised.
    pub fn with_fraction(size: usize, fraction: T) -> Self {
        EncodingConfig {
            sigma: T::lit(size as f64) * fraction,
            normalize_peak: true,
        }
    }

    pub fn raw(sigma: T) -> Self {
        EncodingConfig {
            sigma,
            normalize_peak: false,
        }
    }
}

/// Isotropic 2-D Gaussian centred on `center`.
pub fn gaussian_encode<T: Real>(
    width: usize,
    height: usize,
    center: Cell,
    config: &EncodingConfig<T>,
) -> Result<Raster<T>> {
    if center.x >= width || center.y >= height {
        return Err(invalid(format!("centre {center} outside {width}x{height}")));
    }
    if !(config.sigma > T::zero()) || !config.sigma.is_finite() {
        return Err(invalid("sigma must be positive"));
    }
    let two_s2 = T::lit(2.0) * config.sigma * config.sigma;
    let scale = if config.normalize_peak {
        T::one()
    } else {
        T::one() / (T::PI() * two_s2)
    };
    let (cx, cy) = (T::lit(center.x as f64), T::lit(center.y as f64));
    Ok(Raster::from_fn(width, height, |c| {
        let dx = T::lit(c.x as f64) - cx;
        let dy = T::lit(c.y as f64) - cy;
        scale * (-(dx * dx + dy * dy) / two_s2).exp()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalised_values() {
        let cfg = EncodingConfig {
            sigma: 4.0,
            normalize_peak: true,
        };
        let r = gaussian_encode::<f64>(20, 20, Cell::new(5, 6), &cfg).unwrap();
        assert_eq!(r.get(Cell::new(5, 6)), 1.0);
        assert!((r.get(Cell::new(9, 6)) - (-0.5f64).exp()).abs() < 1e-12);
        assert!((r.get(Cell::new(5, 2)) - 0.6065306597126334).abs() < 1e-12);
    }

    #[test]
    fn raw_peak() {
        let r = gaussian_encode::<f64>(256, 256, Cell::new(100, 30), &EncodingConfig::raw(64.0))
            .unwrap();
        let expect = 1.0 / (2.0 * std::f64::consts::PI * 4096.0);
        assert!((r.get(Cell::new(100, 30)) - expect).abs() < 1e-15);
    }

    #[test]
    fn radial_symmetry() {
        let cfg = EncodingConfig::<f32>::for_map_size(32);
        let c = Cell::new(16, 16);
        let r = gaussian_encode(33, 33, c, &cfg).unwrap();
        for (a, b) in [(3usize, 5usize), (7, 1), (16, 16)] {
            assert_eq!(
                r.get(Cell::new(c.x + a, c.y + b)),
                r.get(Cell::new(c.x - a, c.y - b))
            );
        }
    }

    #[test]
    fn rejects_bad_input() {
        let cfg = EncodingConfig::<f64>::for_map_size(8);
        assert!(gaussian_encode(8, 8, Cell::new(8, 0), &cfg).is_err());
        let cfg = EncodingConfig::<f64>::raw(0.0);
        assert!(gaussian_encode(8, 8, Cell::new(1, 1), &cfg).is_err());
    }
}
