//! Seeded random operators and states for verification suites.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operators::{CMatrix, TorusOperator, TorusState};
use crate::lattice::TorusSpace;

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn entry<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// Entries with real and imaginary parts uniform in `[−1, 1)`.
pub fn random_operator<R: Rng>(space: &TorusSpace, rng: &mut R) -> TorusOperator {
    let n = space.n();
    let m = CMatrix::from_fn(n, n, |_, _| entry(rng));
    TorusOperator::from_parts(*space, m)
}

pub fn random_hermitian<R: Rng>(space: &TorusSpace, rng: &mut R) -> TorusOperator {
    let a = random_operator(space, rng);
    (&a + &a.adjoint()).scale(Complex64::from(0.5))
}

pub fn random_state<R: Rng>(space: &TorusSpace, rng: &mut R) -> TorusState {
    let v = (0..space.n()).map(|_| entry(rng)).collect();
    TorusState::new(*space, v)
        .and_then(|s| s.normalized())
        .expect("random state has the right length and is nonzero")
}
