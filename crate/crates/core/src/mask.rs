//! Particle-number symmetry constraints for fermionic problems.
//!
//! Spin orbitals are interleaved on the qubit register: spatial orbital `j`
//! maps its up component to qubit `2j` and its down component to qubit
//! `2j + 1`. A [`SymmetryMask`] restricts sampling to configurations with a
//! fixed number of up and down electrons by vetoing bit values during the
//! autoregressive sweep: a value is allowed only while the running count
//! leaves the target totals reachable.

use crate::error::{CoreError, Result};
use crate::pauli::Configuration;

/// Bitmask of even qubit positions (up spin orbitals).
const EVEN_POSITIONS: u64 = 0x5555_5555_5555_5555;

/// Sector constraint on the number of up and down electrons.
///
/// A disabled mask allows everything, so callers can run one code path for
/// both constrained and unconstrained problems.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryMask {
    enabled: bool,
    n_spatial: usize,
    n_up: usize,
    n_down: usize,
}

impl SymmetryMask {
    /// Mask that allows every configuration.
    pub fn disabled() -> Self {
        Self {
            enabled: false,
            n_spatial: 0,
            n_up: 0,
            n_down: 0,
        }
    }

    /// Constrain to exactly `n_up` up and `n_down` down electrons over
    /// `n_spatial` spatial orbitals (i.e. `2 * n_spatial` qubits).
    pub fn particle_number(n_spatial: usize, n_up: usize, n_down: usize) -> Result<Self> {
        if n_spatial == 0 {
            return Err(CoreError::InvalidInput(
                "particle-number mask needs at least one spatial orbital".into(),
            ));
        }
        if n_spatial > 32 {
            return Err(CoreError::TooManyQubits {
                what: "spatial orbitals under a particle-number mask",
                got: n_spatial,
                max: 32,
            });
        }
        if n_up > n_spatial || n_down > n_spatial {
            return Err(CoreError::InvalidInput(format!(
                "electron counts ({n_up} up, {n_down} down) exceed {n_spatial} spatial orbitals"
            )));
        }
        Ok(Self {
            enabled: true,
            n_spatial,
            n_up,
            n_down,
        })
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled
    }

    pub fn n_spatial(&self) -> usize {
        self.n_spatial
    }

    pub fn n_up(&self) -> usize {
        self.n_up
    }

    pub fn n_down(&self) -> usize {
        self.n_down
    }

    /// Check the mask against a register width.
    pub fn validate_for(&self, n_qubits: usize) -> Result<()> {
        if self.enabled && 2 * self.n_spatial != n_qubits {
            return Err(CoreError::InvalidInput(format!(
                "mask covers {} spatial orbitals ({} qubits) but the register has {n_qubits}",
                self.n_spatial,
                2 * self.n_spatial
            )));
        }
        Ok(())
    }

    /// Which values may bit `position` take, given the bits already fixed
    /// below it (only bits `< position` of `bits` are inspected)?
    ///
    /// Returns `(zero_allowed, one_allowed)`. For a consistent mask and a
    /// prefix produced by respecting earlier verdicts, at least one value is
    /// always allowed.
    pub fn allowed(&self, bits: u64, position: usize) -> (bool, bool) {
        if !self.enabled {
            return (true, true);
        }
        debug_assert!(position < 2 * self.n_spatial);
        let prefix = bits & ((1u64 << position) - 1);
        let (target_ones, target_zeros, ones_so_far, seen) = if position % 2 == 0 {
            let ones = (prefix & EVEN_POSITIONS).count_ones() as usize;
            (self.n_up, self.n_spatial - self.n_up, ones, position / 2)
        } else {
            let ones = (prefix & !EVEN_POSITIONS).count_ones() as usize;
            (
                self.n_down,
                self.n_spatial - self.n_down,
                ones,
                position / 2,
            )
        };
        let zeros_so_far = seen - ones_so_far;
        (zeros_so_far < target_zeros, ones_so_far < target_ones)
    }

    /// Exact-count membership test for a full configuration.
    pub fn is_valid(&self, config: Configuration) -> bool {
        if !self.enabled {
            return true;
        }
        debug_assert_eq!(config.n_qubits(), 2 * self.n_spatial);
        let up = (config.bits() & EVEN_POSITIONS).count_ones() as usize;
        let down = (config.bits() & !EVEN_POSITIONS).count_ones() as usize;
        up == self.n_up && down == self.n_down
    }

    /// Number of configurations the mask admits on an `n_qubits` register.
    pub fn support_size(&self, n_qubits: usize) -> u64 {
        if !self.enabled {
            return 1u64 << n_qubits;
        }
        binomial(self.n_spatial, self.n_up) * binomial(self.n_spatial, self.n_down)
    }
}

fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc = 1u64;
    for i in 0..k {
        acc = acc * (n - i) as u64 / (i + 1) as u64;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_valid(mask: &SymmetryMask, n_qubits: usize) -> Vec<u64> {
        (0..1u64 << n_qubits)
            .filter(|&b| mask.is_valid(Configuration::new(b, n_qubits)))
            .collect()
    }

    #[test]
    fn support_counts_match_enumeration() {
        for (n_spatial, n_up, n_down) in [(2, 1, 1), (2, 2, 1), (3, 1, 1), (3, 2, 1), (3, 3, 0)] {
            let mask = SymmetryMask::particle_number(n_spatial, n_up, n_down).unwrap();
            let n_qubits = 2 * n_spatial;
            assert_eq!(
                all_valid(&mask, n_qubits).len() as u64,
                mask.support_size(n_qubits),
                "({n_spatial},{n_up},{n_down})"
            );
        }
        let mask = SymmetryMask::particle_number(3, 1, 1).unwrap();
        assert_eq!(mask.support_size(6), 9);
    }

    #[test]
    fn disabled_mask_allows_everything() {
        let mask = SymmetryMask::disabled();
        assert_eq!(mask.support_size(4), 16);
        assert_eq!(mask.allowed(0b1011, 3), (true, true));
        assert!(mask.is_valid(Configuration::new(0b1111, 4)));
        mask.validate_for(5).unwrap();
    }

    #[test]
    fn sequential_verdicts_build_exactly_the_valid_set() {
        // Following `allowed` bit by bit must generate precisely the
        // exact-count configurations, with at least one value allowed at
        // every step.
        let mask = SymmetryMask::particle_number(3, 2, 1).unwrap();
        let n_qubits = 6;
        let mut generated = Vec::new();
        let mut stack = vec![(0u64, 0usize)];
        while let Some((bits, pos)) = stack.pop() {
            if pos == n_qubits {
                generated.push(bits);
                continue;
            }
            let (zero_ok, one_ok) = mask.allowed(bits, pos);
            assert!(zero_ok || one_ok, "dead end at prefix {bits:b} pos {pos}");
            if zero_ok {
                stack.push((bits, pos + 1));
            }
            if one_ok {
                stack.push((bits | (1 << pos), pos + 1));
            }
        }
        generated.sort_unstable();
        assert_eq!(generated, all_valid(&mask, n_qubits));
    }

    #[test]
    fn rejects_inconsistent_setup() {
        assert!(SymmetryMask::particle_number(2, 3, 1).is_err());
        assert!(SymmetryMask::particle_number(0, 0, 0).is_err());
        let mask = SymmetryMask::particle_number(3, 1, 1).unwrap();
        assert!(mask.validate_for(4).is_err());
        mask.validate_for(6).unwrap();
    }

    proptest! {
        #[test]
        fn respecting_verdicts_always_lands_in_sector(
            n_spatial in 1usize..=5,
            n_up in 0usize..=5,
            n_down in 0usize..=5,
            choices in proptest::collection::vec(any::<bool>(), 10),
        ) {
            let n_up = n_up.min(n_spatial);
            let n_down = n_down.min(n_spatial);
            let mask = SymmetryMask::particle_number(n_spatial, n_up, n_down).unwrap();
            let n_qubits = 2 * n_spatial;
            let mut bits = 0u64;
            for (pos, &choice) in choices.iter().enumerate().take(n_qubits) {
                let (zero_ok, one_ok) = mask.allowed(bits, pos);
                prop_assert!(zero_ok || one_ok);
                let take_one = if zero_ok && one_ok { choice } else { one_ok };
                if take_one {
                    bits |= 1 << pos;
                }
            }
            prop_assert!(mask.is_valid(Configuration::new(bits, n_qubits)));
        }
    }
}
