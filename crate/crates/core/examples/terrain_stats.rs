use terrapath::terrain::{compute_cost_map, synth_terrain, TerrainParams};

fn main() {
    for size in [64usize, 128, 256] {
        for seed in [7u64, 1, 2, 3] {
            let dem = synth_terrain::<f64>(seed, size, 1.0).unwrap();
            let cm = compute_cost_map(&dem, &TerrainParams::default()).unwrap();
            let s = cm.raster().as_slice();
            let mean: f64 = s.iter().sum::<f64>() / s.len() as f64;
            let hs = dem.heights().as_slice();
            let (lo, hi) = hs
                .iter()
                .fold((f64::MAX, f64::MIN), |(a, b), h| (a.min(*h), b.max(*h)));
            println!(
                "size {size} seed {seed}: obstacles {:.3} mean cost {:.3} relief {:.2}",
                cm.obstacle_fraction(),
                mean,
                hi - lo
            );
        }
    }
}
