use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{DenseTensor, Field, TensorSpace, C64};

/// How `DenseTensor::random` draws entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Distribution {
    /// Independent standard normal entries; complex entries have independent
    /// real and imaginary parts of variance 1/2.
    Gaussian,
    /// A gaussian draw rescaled to unit Frobenius norm.
    UnitSphere,
}

/// SplitMix64 finalizer over a pair, used to derive independent stream seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn draw(rng: &mut ChaCha8Rng, field: Field) -> C64 {
    match field {
        Field::Real => C64::new(StandardNormal.sample(rng), 0.0),
        Field::Complex => {
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re * h, im * h)
        }
    }
}

/// Gaussian vectors, one per mode of `space`, from a single seeded stream.
pub fn random_factor(space: &TensorSpace, seed: u64) -> Vec<Vec<C64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    space
        .dims()
        .iter()
        .map(|&n| (0..n).map(|_| draw(&mut rng, space.field())).collect())
        .collect()
}

impl DenseTensor {
    /// Deterministic draw for a fixed `(space, seed, dist)`.
    pub fn random(space: &TensorSpace, seed: u64, dist: Distribution) -> DenseTensor {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<C64> = (0..space.total_dim()).map(|_| draw(&mut rng, space.field())).collect();
        let mut t = DenseTensor::new(space.clone(), data).expect("sized to the space");
        if dist == Distribution::UnitSphere {
            let n = t.norm();
            if n > 0.0 {
                t.scale_mut(C64::new(1.0 / n, 0.0));
            }
        }
        t
    }
}
