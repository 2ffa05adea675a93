//! Entanglement measures used as companions to the MUB criteria.

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::qla::{partial_trace, purity, DensityMatrix, StateVector};

/// One-tangles `4 det ρ_k` of the three single-qubit marginals.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OneTangleTriple {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl OneTangleTriple {
    pub fn of(psi: &StateVector) -> Result<Self> {
        require_qubits(psi, 3)?;
        let rho = psi.density();
        let t = |k: usize| partial_trace(&rho, &[k]).and_then(|m| one_tangle(&m));
        Ok(Self { a1: t(0)?, a2: t(1)?, a3: t(2)? })
    }

    /// Heron product `s(s−a₁)(s−a₂)(s−a₃)`, unclamped.
    pub fn heron_radicand(&self) -> f64 {
        let s = (self.a1 + self.a2 + self.a3) / 2.0;
        s * (s - self.a1) * (s - self.a2) * (s - self.a3)
    }
}

fn require_qubits(psi: &StateVector, n: usize) -> Result<()> {
    if psi.parties() != n || psi.dims().iter().any(|&d| d != 2) {
        return invalid(format!("expected {n} qubits, got dims {:?}", psi.dims()));
    }
    Ok(())
}

/// `4 det ρ` for a single-qubit state, clamped to `[0, 1]`.
pub fn one_tangle(rho: &DensityMatrix) -> Result<f64> {
    if rho.dim() != 2 {
        return invalid(format!("one-tangle needs a 2×2 density matrix, got side {}", rho.dim()));
    }
    let det = rho.get(0, 0) * rho.get(1, 1) - rho.get(0, 1) * rho.get(1, 0);
    Ok((4.0 * det.re).clamp(0.0, 1.0))
}

/// Triangle measure `√((16/3) · s(s−a₁)(s−a₂)(s−a₃))` over the one-tangle
/// triple, with the radicand clamped at zero. Normalized so that the
/// equilateral triangle of unit sides (the GHZ state) scores 1.
pub fn triangle_tau(psi: &StateVector) -> Result<f64> {
    let sides = OneTangleTriple::of(psi)?;
    Ok((16.0 / 3.0 * sides.heron_radicand()).max(0.0).sqrt())
}

/// Global measure `2(1 − (1/n) Σ_k Tr ρ_k²)` over the single-qubit marginals.
pub fn global_q(psi: &StateVector) -> Result<f64> {
    let n = psi.parties();
    if psi.dims().iter().any(|&d| d != 2) {
        return invalid("global measure expects qubits");
    }
    let rho = psi.density();
    let mut total = 0.0;
    for k in 0..n {
        total += purity(&partial_trace(&rho, &[k])?);
    }
    Ok((2.0 * (1.0 - total / n as f64)).clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::correlations::closed_form;
    use crate::states::{ghz3, ghz4, w3, wg4, zero_product};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn one_tangle_examples() {
        let zero = zero_product(1).density();
        assert_eq!(one_tangle(&zero).unwrap(), 0.0);
        let mixed = DensityMatrix::maximally_mixed(vec![2]).unwrap();
        assert_abs_diff_eq!(one_tangle(&mixed).unwrap(), 1.0, epsilon = 1e-15);
        let t = 0.3;
        let m = partial_trace(&ghz3(t).density(), &[0]).unwrap();
        assert_abs_diff_eq!(one_tangle(&m).unwrap(), (2.0 * t).sin().powi(2), epsilon = 1e-14);
        assert!(one_tangle(&zero_product(2).density()).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_abs_diff_eq!(triangle_tau(&ghz3(FRAC_PI_4)).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(triangle_tau(&zero_product(3)).unwrap(), 0.0);
        for k in 0..=50 {
            let t = FRAC_PI_2 * k as f64 / 50.0;
            assert_abs_diff_eq!(triangle_tau(&ghz3(t)).unwrap(), closed_form::tau_ghz(t), epsilon = 1e-9);
        }
        assert!(triangle_tau(&zero_product(4)).is_err());
    }

    #[test]
    fn heron_radicand_is_not_hiding_negatives_on_families() {
        for k in 0..=100 {
            let t = FRAC_PI_2 * k as f64 / 100.0;
            for psi in [ghz3(t), w3(t, FRAC_PI_4), w3(t, 0.3)] {
                assert!(OneTangleTriple::of(&psi).unwrap().heron_radicand() > -1e-8);
            }
        }
    }

    #[test]
    fn q_examples() {
        for t in [0.0, 0.1, FRAC_PI_4, 1.2] {
            assert_abs_diff_eq!(global_q(&ghz4(t)).unwrap(), closed_form::q_ghz(t), epsilon = 1e-12);
        }
        assert_eq!(global_q(&zero_product(4)).unwrap(), 0.0);
        assert_abs_diff_eq!(global_q(&ghz4(FRAC_PI_4)).unwrap(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(global_q(&ghz3(FRAC_PI_4)).unwrap(), 1.0, epsilon = 1e-12);
        let q = global_q(&wg4(1.05, 0.4, 0.5).0).unwrap();
        assert!((0.0..=1.0).contains(&q));
    }
}
