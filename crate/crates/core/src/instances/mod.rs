//! Instance generation for LWE, ring-LWE and module-LWE.

mod lwe;
mod modulus;
mod ring;
mod sampling;
mod spec;

pub use lwe::{dot_mod, gen_lwe, LweInstance, RingShape, Truth};
pub use modulus::{center_mod, Modulus};
pub use ring::{
    gen_mlwe, gen_rlwe, mlwe_to_lwe, negacyclic_matrix, negacyclic_mul, rlwe_to_lwe, rotate,
    MlweInstance, RlweInstance,
};
pub use sampling::{
    cbd, derive_seed, sample_error, sample_error_with, sample_secret, sample_secret_with,
    seeded_rng, truncate_to_weight, uniform_centered, SeededRng,
};
pub use spec::{ErrorSpec, SecretFamily, SecretSpec};
