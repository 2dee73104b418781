//! Parameter containers: rotation angles and (for the unitary case) phase
//! angles, stored in block-major flat order matching [`crate::schedule::PairIndexMap`].
//!
//! Angle values are unrestricted reals; no range reduction is performed, so
//! values outside `(-pi, pi]` alias the same rotation.

use std::f64::consts::PI;
use std::ops::Deref;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GivensError, Result};
use crate::schedule::RotationSchedule;

macro_rules! angle_container {
    ($name:ident, $doc:literal) => {
        #[doc = $doc]
        #[derive(Clone, Debug, PartialEq)]
        pub struct $name {
            values: Vec<f64>,
        }

        impl $name {
            /// All-zero parameters for a schedule.
            pub fn zeros(s: &RotationSchedule) -> Self {
                Self {
                    values: vec![0.0; s.active_pair_count()],
                }
            }

            /// Wrap an existing vector, checking its length against the
            /// schedule's active pair count.
            pub fn from_values(s: &RotationSchedule, values: Vec<f64>) -> Result<Self> {
                if values.len() != s.active_pair_count() {
                    return Err(GivensError::LengthMismatch {
                        expected: s.active_pair_count(),
                        got: values.len(),
                    });
                }
                Ok(Self { values })
            }

            /// Seeded i.i.d. draws uniform on `(-pi, pi)`.
            pub fn random_uniform(s: &RotationSchedule, seed: u64) -> Self {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                Self {
                    values: (0..s.active_pair_count())
                        .map(|_| rng.random_range(-PI..PI))
                        .collect(),
                }
            }

            pub fn values(&self) -> &[f64] {
                &self.values
            }

            pub fn values_mut(&mut self) -> &mut [f64] {
                &mut self.values
            }

            pub fn into_vec(self) -> Vec<f64> {
                self.values
            }
        }

        impl Deref for $name {
            type Target = [f64];

            fn deref(&self) -> &[f64] {
                &self.values
            }
        }
    };
}

angle_container!(
    AngleSet,
    "Rotation angles in radians, one per active pair, block-major."
);
angle_container!(
    PhaseSet,
    "Phase angles in radians for the unitary case, indexed like [`AngleSet`]."
);
