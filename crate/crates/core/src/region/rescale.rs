use crate::error::{invalid, Result};
use crate::grid::Raster;
use crate::scalar::Real;

use super::{ProbabilityMap, RegionMask};

/// Resamples a probability map by an integer factor.
///
/// Shrinking average-pools `factor x factor` blocks; growing interpolates
/// bilinearly between cell centres (edges clamp).
pub fn rescale_region<T: Real>(
    prob: &ProbabilityMap<T>,
    target_width: usize,
    target_height: usize,
) -> Result<ProbabilityMap<T>> {
    let (w, h) = (prob.width(), prob.height());
    if target_width == 0 || target_height == 0 {
        return Err(invalid("target size must be non-zero"));
    }
    if (target_width, target_height) == (w, h) {
        return Ok(prob.clone());
    }
    let src = prob.raster();
    if target_width <= w && target_height <= h {
        if w % target_width != 0 || h % target_height != 0 || w / target_width != h / target_height
        {
            return Err(invalid(format!(
                "{w}x{h} -> {target_width}x{target_height} is not an integer downscale"
            )));
        }
        let f = w / target_width;
        let norm = T::lit((f * f) as f64);
        let out = Raster::from_fn(target_width, target_height, |c| {
            let mut acc = T::zero();
            for dy in 0..f {
                for dx in 0..f {
                    acc = acc + src.as_slice()[(c.y * f + dy) * w + c.x * f + dx];
                }
            }
            (acc / norm).min(T::one())
        });
        return ProbabilityMap::from_raster(out);
    }
    if target_width >= w && target_height >= h {
        if !target_width.is_multiple_of(w)
            || !target_height.is_multiple_of(h)
            || target_width / w != target_height / h
        {
            return Err(invalid(format!(
                "{w}x{h} -> {target_width}x{target_height} is not an integer upscale"
            )));
        }
        let f = T::lit((target_width / w) as f64);
        let half = T::lit(0.5);
        let out = Raster::from_fn(target_width, target_height, |c| {
            let sx = ((T::lit(c.x as f64) + half) / f - half).max(T::zero());
            let sy = ((T::lit(c.y as f64) + half) / f - half).max(T::zero());
            let x0 = sx.floor().to_usize().unwrap_or(0).min(w - 1);
            let y0 = sy.floor().to_usize().unwrap_or(0).min(h - 1);
            let (x1, y1) = ((x0 + 1).min(w - 1), (y0 + 1).min(h - 1));
            let fx = (sx - T::lit(x0 as f64)).min(T::one());
            let fy = (sy - T::lit(y0 as f64)).min(T::one());
            let at = |x: usize, y: usize| src.as_slice()[y * w + x];
            let top = at(x0, y0) * (T::one() - fx) + at(x1, y0) * fx;
            let bot = at(x0, y1) * (T::one() - fx) + at(x1, y1) * fx;
            (top * (T::one() - fy) + bot * fy)
                .max(T::zero())
                .min(T::one())
        });
        return ProbabilityMap::from_raster(out);
    }
    Err(invalid("mixed up/down scaling is not supported"))
}

/// Grows every `true` region by `radius` cells (Chebyshev).
pub fn dilate_mask(mask: &RegionMask, radius: usize) -> RegionMask {
    let dims = mask.dims();
    let mut out = mask.clone();
    if radius == 0 {
        return out;
    }
    for y in 0..dims.height {
        for x in 0..dims.width {
            if !mask.bits[y * dims.width + x] {
                continue;
            }
            let (x0, x1) = (x.saturating_sub(radius), (x + radius).min(dims.width - 1));
            let (y0, y1) = (y.saturating_sub(radius), (y + radius).min(dims.height - 1));
            for yy in y0..=y1 {
                out.bits[yy * dims.width + x0..=yy * dims.width + x1].fill(true);
            }
        }
    }
    out
}

/// Brings a low-resolution mask up by `factor`: bilinear interpolation of the
/// 0/1 raster, threshold at 0.5, then one cell of dilation so thin corridors
/// do not pinch off.
pub fn upscale_mask(mask: &RegionMask, factor: usize) -> Result<RegionMask> {
    if factor == 0 {
        return Err(invalid("factor must be positive"));
    }
    let dims = mask.dims();
    let prob = ProbabilityMap::from_raster(mask.to_raster::<f64>())?;
    let up = rescale_region(&prob, dims.width * factor, dims.height * factor)?;
    Ok(dilate_mask(&RegionMask::from_raster(up.raster()), 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Cell;

    #[test]
    fn constant_stays_constant() {
        let p = ProbabilityMap::uniform(8, 8, 0.3f64).unwrap();
        let down = rescale_region(&p, 4, 4).unwrap();
        assert!(down
            .raster()
            .as_slice()
            .iter()
            .all(|v| (*v - 0.3).abs() < 1e-15));
        let up = rescale_region(&p, 16, 16).unwrap();
        assert!(up
            .raster()
            .as_slice()
            .iter()
            .all(|v| (*v - 0.3).abs() < 1e-15));
    }

    #[test]
    fn pooling_averages() {
        let p = ProbabilityMap::new(2, 2, vec![0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(rescale_region(&p, 1, 1).unwrap().get(Cell::new(0, 0)), 0.5);
    }

    #[test]
    fn non_integer_factor_rejected() {
        let p = ProbabilityMap::uniform(6, 6, 0.3).unwrap();
        assert!(rescale_region(&p, 4, 4).is_err());
        assert!(rescale_region(&p, 9, 9).is_err());
        assert!(rescale_region(&p, 3, 12).is_err());
    }

    #[test]
    fn dilation_grows_by_one() {
        let mut m = RegionMask::empty(5, 5);
        m.set(Cell::new(2, 2), true);
        assert_eq!(dilate_mask(&m, 1).area(), 9);
        assert_eq!(dilate_mask(&m, 0).area(), 1);
    }

    #[test]
    fn upscaled_mask_covers_source_blocks() {
        let m = RegionMask::from_fn(4, 4, |c| c.x == c.y);
        let up = upscale_mask(&m, 2).unwrap();
        for i in 0..4 {
            for d in 0..2 {
                assert!(up.get(Cell::new(2 * i + d, 2 * i + d)));
            }
        }
    }
}
