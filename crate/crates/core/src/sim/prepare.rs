//! Arbitrary real-amplitude state preparation.
//!
//! Uniformly controlled RY rotations in the usual tree layout: level `t`
//! rotates qubit `t` conditioned on qubits `0..t`, with the multiplexed
//! rotation decomposed into `2^t` plain RY gates interleaved with CNOTs in
//! Gray-code order. Real input vectors with arbitrary signs are reproduced
//! exactly because the final level uses signed two-argument arctangents.

use crate::error::{Error, Result};
use crate::sim::circuit::Circuit;
use crate::sim::gate::{Angle, GateOp};

/// Circuit mapping `|0...0>` to `sum_l amps[l] |l>` for a normalized real
/// vector whose length is a power of two.
pub fn prepare_real_state(amps: &[f64]) -> Result<Circuit> {
    let len = amps.len();
    if len < 2 || !len.is_power_of_two() {
        return Err(Error::NonPowerOfTwo(len));
    }
    let norm2: f64 = amps.iter().map(|a| a * a).sum();
    if (norm2 - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized {
            deviation: (norm2 - 1.0).abs(),
        });
    }
    let n = len.trailing_zeros() as usize;

    let mut circuit = Circuit::new(n);
    for t in 0..n {
        // Children at level t+1: signed amplitudes at the leaves, subtree
        // norms everywhere else. Signs are then recovered exactly by the
        // leaf-level atan2.
        let children: Vec<f64> = if t + 1 == n {
            amps.to_vec()
        } else {
            levelsq(amps, n, t + 1).iter().map(|v| v.sqrt()).collect()
        };
        let thetas: Vec<f64> = (0..1usize << t)
            .map(|m| 2.0 * children[2 * m + 1].atan2(children[2 * m]))
            .collect();
        emit_multiplexed_ry(&mut circuit, t, &thetas)?;
    }
    Ok(circuit)
}

/// Squared subtree norms at `level` (2^level nodes).
fn levelsq(amps: &[f64], n: usize, level: usize) -> Vec<f64> {
    let width = 1usize << (n - level);
    (0..1usize << level)
        .map(|m| amps[m * width..(m + 1) * width].iter().map(|a| a * a).sum())
        .collect()
}

/// Multiplexed RY on qubit `t` controlled by qubits `0..t`, one rotation
/// angle per control pattern, in Gray-code CNOT form.
fn emit_multiplexed_ry(circuit: &mut Circuit, t: usize, thetas: &[f64]) -> Result<()> {
    if t == 0 {
        if thetas[0] != 0.0 {
            circuit.push(GateOp::ry(0, Angle::Fixed(thetas[0])))?;
        }
        return Ok(());
    }
    let k = thetas.len(); // 2^t
    let transformed: Vec<f64> = (0..k)
        .map(|i| {
            let gray = i ^ (i >> 1);
            let mut acc = 0.0;
            for (j, &theta) in thetas.iter().enumerate() {
                let parity = ((j & gray).count_ones() & 1) as i32;
                acc += if parity == 0 { theta } else { -theta };
            }
            acc / k as f64
        })
        .collect();
    for (i, &angle) in transformed.iter().enumerate() {
        circuit.push(GateOp::ry(t, Angle::Fixed(angle)))?;
        // Control bit flipped by the Gray step; bit b addresses qubit t-1-b.
        let flipped_bit = if i + 1 == k {
            t - 1
        } else {
            (!i).trailing_zeros() as usize
        };
        circuit.push(GateOp::cnot(t - 1 - flipped_bit, t))?;
    }
    Ok(())
}
