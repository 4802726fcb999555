//! Seeded train/test partitioning.
//!
//! The shuffle is a Fisher-Yates pass driven by splitmix64, so a given seed
//! produces the same partition on every platform and run.

/// splitmix64 generator (Steele, Lea & Flood). Small state, full 64-bit
/// output, and trivially portable, which is all the split needs.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform draw in [0, 1) from the high 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform index in [0, bound). `bound` must be positive.
    fn next_below(&mut self, bound: u64) -> u64 {
        self.next_u64() % bound
    }
}

/// Splits `samples` into (train, test) with `ceil(train_fraction * n)`
/// training samples.
///
/// The partition is exact (no overlap, union equals the input) and
/// bit-reproducible for a given seed.
///
/// # Panics
/// If `train_fraction` is not in (0, 1).
pub fn train_test_split<T: Clone>(
    samples: &[T],
    train_fraction: f64,
    seed: u64,
) -> (Vec<T>, Vec<T>) {
    assert!(
        train_fraction > 0.0 && train_fraction < 1.0,
        "train_fraction must be in (0, 1), got {train_fraction}"
    );
    let n = samples.len();
    let n_train = (train_fraction * n as f64).ceil() as usize;

    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = SplitMix64::new(seed);
    for i in (1..n).rev() {
        let j = rng.next_below(i as u64 + 1) as usize;
        order.swap(i, j);
    }

    let train = order[..n_train]
        .iter()
        .map(|&i| samples[i].clone())
        .collect();
    let test = order[n_train..]
        .iter()
        .map(|&i| samples[i].clone())
        .collect();
    (train, test)
}
