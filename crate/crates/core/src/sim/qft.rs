//! Quantum Fourier transform circuits.

use std::f64::consts::PI;

use crate::sim::circuit::Circuit;
use crate::sim::gate::{Angle, GateOp};

/// Standard QFT (or its inverse) on `n` qubits, `O(n^2)` gates.
///
/// With qubit 0 as the most significant bit, the forward circuit maps
/// `|m>` to `2^{-n/2} sum_l exp(+2 pi i m l / 2^n) |l>`; final SWAPs restore
/// the natural bit order. The inverse is the exact dagger.
pub fn build_qft(n: usize, inverse: bool) -> Circuit {
    assert!(n >= 1);
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.push(GateOp::h(q)).expect("valid qft gate");
        for k in (q + 1)..n {
            let angle = PI / (1u64 << (k - q)) as f64;
            c.push(GateOp::cphase(k, q, Angle::Fixed(angle)))
                .expect("valid qft gate");
        }
    }
    for q in 0..n / 2 {
        c.push(GateOp::swap(q, n - 1 - q)).expect("valid qft gate");
    }
    if inverse {
        c.dagger()
    } else {
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::state::StateVector;
    use num_complex::Complex64;

    #[test]
    fn one_qubit_qft_is_hadamard() {
        let c = build_qft(1, false);
        assert_eq!(c.len(), 1);
        let s = c.run(&[], 0.0).unwrap();
        assert!((s.amplitudes()[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((s.amplitudes()[1].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn qft_of_zero_is_uniform() {
        let s = build_qft(3, false).run(&[], 0.0).unwrap();
        let expect = 1.0 / 8.0f64.sqrt();
        for a in s.amplitudes() {
            assert!((a - Complex64::new(expect, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn qft_matches_dft_matrix_on_basis_states() {
        let n = 4;
        let dim = 1usize << n;
        let qft = build_qft(n, false);
        for m in 0..dim {
            let mut amps = vec![Complex64::ZERO; dim];
            amps[m] = Complex64::ONE;
            let mut state = StateVector::from_amplitudes(amps).unwrap();
            qft.apply_to(&mut state, &[], 0.0).unwrap();
            for (l, a) in state.amplitudes().iter().enumerate() {
                let expect = Complex64::from_polar(
                    1.0 / (dim as f64).sqrt(),
                    2.0 * std::f64::consts::PI * (m * l) as f64 / dim as f64,
                );
                assert!((a - expect).norm() < 1e-12, "m={m} l={l}");
            }
        }
    }

    #[test]
    fn inverse_undoes_qft_on_random_state() {
        use rand::Rng;
        let n = 3;
        let mut rng = crate::rng::root(11);
        let mut amps: Vec<Complex64> = (0..1 << n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        let original = StateVector::from_amplitudes(amps).unwrap();
        let mut state = original.clone();
        build_qft(n, false).apply_to(&mut state, &[], 0.0).unwrap();
        build_qft(n, true).apply_to(&mut state, &[], 0.0).unwrap();
        for (a, b) in state.amplitudes().iter().zip(original.amplitudes()) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}
