//! Reproducible random variate generation.
//!
//! Every replicate owns a [`SeedStream`]: a counter-based ChaCha8 stream
//! keyed by `(root_seed, replicate_index)`. Streams with distinct keys are
//! independent, identical keys replay bit-exactly, and no state is shared
//! between workers, so aggregate results do not depend on the degree of
//! parallelism.

use crate::model::{LawKind, OffspringLaw};
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Gamma, Poisson};

/// Population counts or control sizes left the exactly-simulable range.
/// This is an expected, classifiable outcome of supercritical growth, not
/// a fault: trajectories that reach it are diverging.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Explosion;

/// Largest binomial size the control phase will draw. Populations above
/// this are treated as diverged.
pub const MAX_BINOMIAL_SIZE: u64 = 1 << 32;

/// Largest representable population count.
pub const MAX_POPULATION: u64 = i64::MAX as u64;

/// A deterministic random stream for one replicate.
///
/// The generator is ChaCha8 with the cipher stream id set to the replicate
/// index, so derivation is collision-free over the full 64-bit index range.
/// `generation_index` and `draw_counter` track the position of the stream
/// inside a trajectory for diagnostics and replay assertions.
#[derive(Debug, Clone)]
pub struct SeedStream {
    root_seed: u64,
    replicate_index: u64,
    generation_index: u64,
    draw_counter: u64,
    rng: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives the stream for `(root_seed, replicate_index)`.
pub fn derive_stream(root_seed: u64, replicate_index: u64) -> SeedStream {
    SeedStream::derive(root_seed, replicate_index)
}

impl SeedStream {
    pub fn derive(root_seed: u64, replicate_index: u64) -> Self {
        let mut key = [0u8; 32];
        let mut state = root_seed;
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(replicate_index);
        SeedStream {
            root_seed,
            replicate_index,
            generation_index: 0,
            draw_counter: 0,
            rng,
        }
    }

    pub fn root_seed(&self) -> u64 {
        self.root_seed
    }

    pub fn replicate_index(&self) -> u64 {
        self.replicate_index
    }

    pub fn generation_index(&self) -> u64 {
        self.generation_index
    }

    pub fn draw_counter(&self) -> u64 {
        self.draw_counter
    }

    /// Marks the start of the next generation (bookkeeping only; the
    /// underlying stream advances with the draws themselves).
    pub fn advance_generation(&mut self) {
        self.generation_index += 1;
    }
}

impl RngCore for SeedStream {
    fn next_u32(&mut self) -> u32 {
        self.draw_counter += 1;
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.draw_counter += 1;
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.draw_counter += 1;
        self.rng.fill_bytes(dest);
    }
}

/// Exact `Binomial(n, p)` variate.
///
/// Sampling is by inversion for small `n*p` and by the BTPE rejection
/// method for large, both of which are exact given an ideal uniform source;
/// no normal approximation is involved. Sizes above [`MAX_BINOMIAL_SIZE`]
/// signal explosion instead of sampling.
pub fn sample_binomial(n: u64, p: f64, stream: &mut SeedStream) -> Result<u64, Explosion> {
    if n > MAX_BINOMIAL_SIZE {
        return Err(Explosion);
    }
    debug_assert!(
        (-1e-12..=1.0 + 1e-12).contains(&p),
        "probability {p} out of range"
    );
    let p = p.clamp(0.0, 1.0);
    Ok(Binomial::new(n, p)
        .expect("checked probability")
        .sample(stream))
}

/// Sum of `count` i.i.d. draws from `law` (0 when `count` is 0).
///
/// Geometric laws use the closed-form equivalence of the sum with a
/// negative binomial, realised exactly as a Gamma-Poisson mixture, so the
/// cost per generation is O(1) instead of O(count). Explicit laws draw
/// individuals for small counts and switch to per-support-point binomial
/// splitting for large ones. Sums that would exceed [`MAX_POPULATION`]
/// signal explosion.
pub fn sample_offspring_sum(
    law: &OffspringLaw,
    count: u64,
    stream: &mut SeedStream,
) -> Result<u64, Explosion> {
    if count == 0 {
        return Ok(0);
    }
    match law.kind() {
        LawKind::Geometric { p } => negative_binomial(count, *p, stream),
        LawKind::Explicit { pmf } => explicit_sum(pmf, count, stream),
    }
}

/// NegativeBinomial(count, p) via Poisson(Gamma(count, (1-p)/p)).
fn negative_binomial(count: u64, p: f64, stream: &mut SeedStream) -> Result<u64, Explosion> {
    let scale = (1.0 - p) / p;
    let lambda: f64 = Gamma::new(count as f64, scale)
        .expect("valid gamma shape/scale")
        .sample(stream);
    if lambda <= 0.0 {
        // Gamma underflow: the mixture mass at zero events.
        return Ok(0);
    }
    let poisson = Poisson::new(lambda).map_err(|_| Explosion)?;
    let value: f64 = poisson.sample(stream);
    if value >= MAX_POPULATION as f64 {
        return Err(Explosion);
    }
    Ok(value as u64)
}

fn explicit_sum(pmf: &[f64], count: u64, stream: &mut SeedStream) -> Result<u64, Explosion> {
    let loop_limit = (pmf.len() as u64 * 4).max(1024);
    let total: u128 = if count <= loop_limit {
        let mut acc: u128 = 0;
        for _ in 0..count {
            acc += inverse_draw(pmf, stream) as u128;
        }
        acc
    } else {
        // Occupancy counts per support point via conditional binomials.
        let mut acc: u128 = 0;
        let mut remaining = count;
        let mut mass_left = 1.0f64;
        for (k, &q) in pmf.iter().enumerate() {
            if remaining == 0 {
                break;
            }
            if k + 1 == pmf.len() {
                acc += k as u128 * remaining as u128;
                break;
            }
            let cond = (q / mass_left).clamp(0.0, 1.0);
            let taken = Binomial::new(remaining, cond)
                .expect("checked probability")
                .sample(stream);
            acc += k as u128 * taken as u128;
            remaining -= taken;
            mass_left = (mass_left - q).max(f64::MIN_POSITIVE);
        }
        acc
    };
    if total > MAX_POPULATION as u128 {
        Err(Explosion)
    } else {
        Ok(total as u64)
    }
}

fn inverse_draw(pmf: &[f64], stream: &mut SeedStream) -> u64 {
    let mut u: f64 = stream.random();
    for (k, &q) in pmf.iter().enumerate() {
        if u < q || k + 1 == pmf.len() {
            return k as u64;
        }
        u -= q;
    }
    pmf.len() as u64 - 1
}
