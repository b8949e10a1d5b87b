//! Seeded diamond-square terrain.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::scalar::Real;

use super::Dem;

/// Cell size of synthesized terrain, metres.
pub const SYNTH_CELL_SIZE: f64 = 1.0;

// Displacement amplitude at a given step length (cells) is
// `ruggedness * AMP * step^HURST` for the relief layer and
// `ruggedness * DETAIL_AMP * step^DETAIL_HURST` for the detail layer.
const AMP: f64 = 0.05;
const HURST: f64 = 1.0;
const DETAIL_AMP: f64 = 0.05;
const DETAIL_HURST: f64 = 0.3;

/// Generates a `size x size` fractal DEM, deterministic in `seed`.
///
/// Heights are built on the smallest `2^k + 1` lattice covering `size` and
/// cropped. A second, low-frequency field modulates the fine detail so rough
/// patches cluster instead of being spread uniformly.
pub fn synth_terrain<T: Real>(seed: u64, size: usize, ruggedness: f64) -> Result<Dem<T>> {
    if size < 8 {
        return Err(invalid(format!(
            "terrain size must be at least 8, got {size}"
        )));
    }
    if !(ruggedness >= 0.0) || !ruggedness.is_finite() {
        return Err(invalid("ruggedness must be finite and non-negative"));
    }
    let mut levels = 0u32;
    while (1usize << levels) + 1 < size {
        levels += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let relief = diamond_square(&mut rng, levels, |step| AMP * (step as f64).powf(HURST));
    let detail = diamond_square(&mut rng, levels, |step| {
        DETAIL_AMP * (step as f64).powf(DETAIL_HURST)
    });
    let modulation = diamond_square(&mut rng, levels, |step| {
        if step as f64 >= (1usize << levels) as f64 / 8.0 {
            1.0
        } else {
            0.0
        }
    });

    let side = (1usize << levels) + 1;
    let mut heights = Vec::with_capacity(size * size);
    for y in 0..size {
        for x in 0..size {
            let i = y * side + x;
            let m = (1.0 + modulation[i]).clamp(0.0, 2.0);
            let z = ruggedness * (relief[i] + m * detail[i]);
            heights.push(T::lit(z));
        }
    }
    Dem::new(size, size, T::lit(SYNTH_CELL_SIZE), heights)
}

/// Diamond-square on a `(2^levels + 1)^2` lattice with uniform displacements
/// in `[-amp(step), amp(step)]`.
fn diamond_square(rng: &mut ChaCha8Rng, levels: u32, amp: impl Fn(usize) -> f64) -> Vec<f64> {
    let side = (1usize << levels) + 1;
    let mut g = vec![0.0f64; side * side];
    let idx = |x: usize, y: usize| y * side + x;
    let full = side - 1;
    for (x, y) in [(0, 0), (full, 0), (0, full), (full, full)] {
        g[idx(x, y)] = rng.gen_range(-1.0..=1.0) * amp(full);
    }

    let mut step = full;
    while step > 1 {
        let half = step / 2;
        let a = amp(step);
        // diamond: square centres
        for y in (half..side).step_by(step) {
            for x in (half..side).step_by(step) {
                let avg = (g[idx(x - half, y - half)]
                    + g[idx(x + half, y - half)]
                    + g[idx(x - half, y + half)]
                    + g[idx(x + half, y + half)])
                    / 4.0;
                g[idx(x, y)] = avg + rng.gen_range(-1.0..=1.0) * a;
            }
        }
        // square: edge midpoints
        for y in (0..side).step_by(half) {
            let x0 = if (y / half).is_multiple_of(2) {
                half
            } else {
                0
            };
            for x in (x0..side).step_by(step) {
                let mut sum = 0.0;
                let mut n = 0.0;
                if x >= half {
                    sum += g[idx(x - half, y)];
                    n += 1.0;
                }
                if x + half < side {
                    sum += g[idx(x + half, y)];
                    n += 1.0;
                }
                if y >= half {
                    sum += g[idx(x, y - half)];
                    n += 1.0;
                }
                if y + half < side {
                    sum += g[idx(x, y + half)];
                    n += 1.0;
                }
                g[idx(x, y)] = sum / n + rng.gen_range(-1.0..=1.0) * a;
            }
        }
        step = half;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terrain::{compute_cost_map, TerrainParams};

    #[test]
    fn deterministic_for_seed() {
        let a = synth_terrain::<f64>(42, 64, 1.0).unwrap();
        let b = synth_terrain::<f64>(42, 64, 1.0).unwrap();
        assert_eq!(a, b);
        let c = synth_terrain::<f64>(43, 64, 1.0).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn zero_ruggedness_is_flat() {
        let dem = synth_terrain::<f64>(3, 40, 0.0).unwrap();
        assert!(dem.heights().as_slice().iter().all(|h| *h == 0.0));
        let cm = compute_cost_map(&dem, &TerrainParams::default()).unwrap();
        assert!(cm.raster().as_slice().iter().all(|c| *c == 0.0));
    }

    #[test]
    fn rejects_tiny_maps() {
        assert!(synth_terrain::<f64>(1, 7, 1.0).is_err());
        assert!(synth_terrain::<f64>(1, 8, 1.0).is_ok());
    }
}
