//! Two-qubit state machinery for the message mode of the ping-pong protocol.
//!
//! One round of the honest protocol, as far as this crate needs it:
//!
//! 1. Bob prepares the Bell pair (|01> + |10>)/sqrt(2) and sends the travel
//!    qubit to Alice (the "ping").
//! 2. Alice encodes her message bit with a phase flip on the travel qubit:
//!    bit 0 leaves the state alone, bit 1 negates the |01> and |11>
//!    amplitudes. This maps psi+ onto psi- (up to a global phase).
//! 3. Alice returns the travel qubit (the "pong") and Bob measures in the
//!    Bell basis: psi+ decodes as 0, psi- as 1.
//!
//! Amplitudes are ordered |00>, |01>, |10>, |11> with the home qubit first.
//! States are validated to unit norm at construction, so the encoding and
//! decoding operations themselves are total.

use num_complex::Complex64;
use thiserror::Error;

/// Tolerance on |norm^2 - 1| accepted by [`StateVector::new`].
pub const NORM_TOLERANCE: f64 = 1e-12;

/// A decoded state whose weight inside span{psi+, psi-} falls below
/// 1 - IN_SPAN_TOLERANCE is flagged as leaking outside the message space.
const IN_SPAN_TOLERANCE: f64 = 1e-9;

/// Errors from constructing protocol states.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    /// The amplitudes do not describe a unit-norm state.
    #[error("state is not normalized: |norm^2 - 1| = {deviation:.3e} exceeds {NORM_TOLERANCE:.0e}")]
    NotNormalized { deviation: f64 },
}

/// Pure state of the home + travel qubit pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: [Complex64; 4],
}

impl StateVector {
    /// Builds a state from amplitudes ordered |00>, |01>, |10>, |11>.
    ///
    /// Rejects inputs whose squared norm deviates from 1 by more than
    /// [`NORM_TOLERANCE`].
    pub fn new(amplitudes: [Complex64; 4]) -> Result<Self, StateError> {
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        let deviation = (norm_sqr - 1.0).abs();
        if deviation > NORM_TOLERANCE {
            return Err(StateError::NotNormalized { deviation });
        }
        Ok(Self { amplitudes })
    }

    /// Amplitudes in the fixed |00>, |01>, |10>, |11> order.
    pub fn amplitudes(&self) -> &[Complex64; 4] {
        &self.amplitudes
    }

    /// |<other|self>|^2.
    fn overlap_sqr(&self, other: &StateVector) -> f64 {
        let inner: Complex64 = self
            .amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| b.conj() * a)
            .sum();
        inner.norm_sqr()
    }
}

/// Result of a Bell-basis measurement restricted to the message subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct DecodeOutcome {
    /// Decoded message bit: psi+ reads as 0, psi- as 1.
    pub bit: bool,
    /// Squared overlap with the winning Bell state; 1.0 for honest traffic.
    pub confidence: f64,
    /// False when the state leaks outside span{psi+, psi-} by more than 1e-9.
    pub in_span: bool,
}

/// The Bell pair (|01> + |10>)/sqrt(2) that Bob prepares each round.
pub fn prepare_bell() -> StateVector {
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector {
        amplitudes: [Complex64::ZERO, amp, amp, Complex64::ZERO],
    }
}

/// psi- = (|01> - |10>)/sqrt(2), the image of the encoded bit 1.
pub fn psi_minus() -> StateVector {
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    StateVector {
        amplitudes: [Complex64::ZERO, amp, -amp, Complex64::ZERO],
    }
}

/// Alice's phase encoding. Bit 0 is the identity; bit 1 negates the |01> and
/// |11> amplitudes (a Z on the travel qubit), so applying it twice restores
/// the input exactly.
pub fn encode(state: &StateVector, bit: bool) -> StateVector {
    if !bit {
        return state.clone();
    }
    let mut amplitudes = state.amplitudes;
    amplitudes[0b01] = -amplitudes[0b01];
    amplitudes[0b11] = -amplitudes[0b11];
    StateVector { amplitudes }
}

/// Bob's Bell-basis decoding on the psi+/psi- subspace.
///
/// The decoded bit is whichever Bell projection carries more weight (ties go
/// to 0) and `confidence` is that winning weight. States with less than
/// 1 - 1e-9 of their weight inside the subspace are flagged via `in_span`;
/// their confidence still reflects only the in-span weight.
pub fn bell_decode(state: &StateVector) -> DecodeOutcome {
    let w_plus = state.overlap_sqr(&prepare_bell());
    let w_minus = state.overlap_sqr(&psi_minus());
    let bit = w_minus > w_plus;
    DecodeOutcome {
        bit,
        confidence: if bit { w_minus } else { w_plus },
        in_span: w_plus + w_minus >= 1.0 - IN_SPAN_TOLERANCE,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_pair_has_expected_amplitudes() {
        let state = prepare_bell();
        let amp = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(state.amplitudes()[0], c(0.0));
        assert_eq!(state.amplitudes()[1], c(amp));
        assert_eq!(state.amplitudes()[2], c(amp));
        assert_eq!(state.amplitudes()[3], c(0.0));
    }

    #[test]
    fn encode_zero_is_identity() {
        let state = prepare_bell();
        assert_eq!(encode(&state, false), state);
    }

    #[test]
    fn encode_one_maps_psi_plus_onto_psi_minus() {
        // Physical equality: the amplitude convention produces -psi-, which
        // differs from psi- only by a global phase.
        let encoded = encode(&prepare_bell(), true);
        assert!((encoded.overlap_sqr(&psi_minus()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn decode_reads_both_bell_states() {
        let zero = bell_decode(&prepare_bell());
        assert!(!zero.bit);
        assert!((zero.confidence - 1.0).abs() < 1e-12);
        assert!(zero.in_span);

        let one = bell_decode(&psi_minus());
        assert!(one.bit);
        assert!((one.confidence - 1.0).abs() < 1e-12);
        assert!(one.in_span);
    }

    #[test]
    fn decode_flags_states_outside_the_message_subspace() {
        let outside = StateVector::new([c(1.0), c(0.0), c(0.0), c(0.0)]).unwrap();
        let outcome = bell_decode(&outside);
        assert!(!outcome.in_span);
        assert!(outcome.confidence < 1e-12);

        // |01> = (psi+ + psi-)/sqrt(2) sits inside the subspace but splits
        // its weight evenly; the tie decodes as 0 with confidence 1/2.
        let split = StateVector::new([c(0.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        let outcome = bell_decode(&split);
        assert!(outcome.in_span);
        assert!(!outcome.bit);
        assert!((outcome.confidence - 0.5).abs() < 1e-12);
    }

    #[test]
    fn constructor_rejects_unnormalized_amplitudes() {
        let err = StateVector::new([c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap_err();
        match err {
            StateError::NotNormalized { deviation } => assert!((deviation - 1.0).abs() < 1e-12),
        }
    }

    #[test]
    fn honest_round_trip_recovers_every_bit() {
        for &bit in &[false, true] {
            let outcome = bell_decode(&encode(&prepare_bell(), bit));
            assert_eq!(outcome.bit, bit);
            assert!((outcome.confidence - 1.0).abs() < 1e-12);
            assert!(outcome.in_span);
        }
    }

    /// Strategy: a random normalized two-qubit state with complex amplitudes.
    fn arb_state() -> impl Strategy<Value = StateVector> {
        proptest::collection::vec(-1.0f64..1.0, 8)
            .prop_filter_map("norm too small", |parts| {
                let amps = [
                    Complex64::new(parts[0], parts[1]),
                    Complex64::new(parts[2], parts[3]),
                    Complex64::new(parts[4], parts[5]),
                    Complex64::new(parts[6], parts[7]),
                ];
                let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                if norm < 1e-3 {
                    return None;
                }
                let amps = amps.map(|a| a / norm);
                StateVector::new(amps).ok()
            })
    }

    proptest! {
        #[test]
        fn encode_preserves_normalization(state in arb_state(), bit: bool) {
            let encoded = encode(&state, bit);
            let norm_sqr: f64 = encoded.amplitudes().iter().map(|a| a.norm_sqr()).sum();
            prop_assert!((norm_sqr - 1.0).abs() < 1e-12);
        }

        #[test]
        fn encode_one_is_an_involution(state in arb_state()) {
            // Sign flips are exact in floating point, so equality is exact.
            prop_assert_eq!(encode(&encode(&state, true), true), state);
        }

        #[test]
        fn decode_confidence_never_exceeds_in_span_weight(state in arb_state()) {
            let outcome = bell_decode(&state);
            prop_assert!(outcome.confidence >= 0.0);
            prop_assert!(outcome.confidence <= 1.0 + 1e-12);
        }
    }
}
