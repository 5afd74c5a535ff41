use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent, reproducible RNG stream for `(seed, stream)`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream id for sample `sample` of grid cell `cell`.
pub fn cell_stream(cell: usize, sample: usize) -> u64 {
    ((cell as u64) << 32) | sample as u64
}
