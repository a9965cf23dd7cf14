//! Counter-based random numbers for reproducible parallel ensembles.
//!
//! Every draw is a pure function of (master seed, stream index, counter), so
//! path i sees the same randomness no matter how many worker threads run or
//! how large the ensemble is.

use std::f64::consts::PI;

/// splitmix64 finalizer; a full-period bijective mixer on u64.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One keyed stream of standard normal deviates.
///
/// Sub-seed rule: `stream_key = splitmix64(splitmix64(master_seed) XOR
/// (stream_index + 1) * 0x9E3779B97F4A7C15)`; draw j of the stream mixes
/// `stream_key + j` through splitmix64 again. Normals come from a fixed-cost
/// Box-Muller pair so the counter advance per normal is deterministic.
#[derive(Debug, Clone)]
pub struct NormalStream {
    key: u64,
    counter: u64,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(master_seed: u64, stream_index: u64) -> Self {
        let key = splitmix64(
            splitmix64(master_seed) ^ (stream_index.wrapping_add(1)).wrapping_mul(0x9E37_79B9_7F4A_7C15),
        );
        Self { key, counter: 0, spare: None }
    }

    fn next_u64(&mut self) -> u64 {
        let v = splitmix64(self.key.wrapping_add(self.counter));
        self.counter = self.counter.wrapping_add(1);
        v
    }

    /// Uniform draw in (0, 1]; never 0, so ln() is safe.
    pub fn next_uniform(&mut self) -> f64 {
        (((self.next_u64() >> 11) + 1) as f64) * (1.0 / 9_007_199_254_740_992.0)
    }

    /// Standard normal via Box-Muller.
    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let mag = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * PI * u2;
        self.spare = Some(mag * theta.sin());
        mag * theta.cos()
    }

    /// Fill a buffer with normals.
    pub fn fill_normals(&mut self, out: &mut [f64]) {
        for v in out.iter_mut() {
            *v = self.next_normal();
        }
    }
}
