//! Subgroups Λ ⊂ ℝ of rank ≤ 3 and the twisted groups Λ(n) = (2πi)ⁿΛ,
//! together with reduction of complex values modulo Λ(n).

use crate::error::{Error, Result};
use crate::two_pi_i_pow;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A finitely generated subgroup Λ ⊂ ℝ together with a twist n, so that the
/// working group is Λ(n) = (2πi)ⁿΛ.
///
/// Generators are stored in canonical order (descending absolute value) and
/// lattice elements are always carried as exact integer coefficient vectors
/// against them; only the final complex value is floating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lattice {
    generators: Vec<f64>,
    twist: u32,
}

/// Outcome of reducing a complex value modulo Λ(n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    /// The value that was reduced.
    pub raw: Complex64,
    /// raw minus the best lattice point found.
    pub reduced: Complex64,
    /// Integer coefficients of that lattice point, aligned with the
    /// lattice's stored generator order.
    pub coefficients: Vec<i64>,
    /// |reduced|.
    pub residual: f64,
    pub verdict: Verdict,
}

/// Verdict of a mod-Λ(n) membership test.
///
/// `Inconclusive` only occurs for dense subgroups (rank ≥ 2), where a failed
/// search within the coefficient bound cannot distinguish "not a lattice
/// element" from "coefficients larger than the bound".
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

/// Coefficient scan cap for dense (rank ≥ 2) reductions.
const RANK2_SCAN_CAP: i64 = 2_000_000;
const RANK3_SCAN_CAP: i64 = 2_000;

impl Lattice {
    pub fn new(mut generators: Vec<f64>, twist: u32) -> Result<Self> {
        if generators.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "at most 3 lattice generators supported, got {}",
                generators.len()
            )));
        }
        if generators.iter().any(|g| *g == 0.0 || !g.is_finite()) {
            return Err(Error::InvalidArgument(
                "lattice generators must be nonzero and finite".into(),
            ));
        }
        generators.sort_by(|a, b| b.abs().partial_cmp(&a.abs()).unwrap());
        Ok(Self { generators, twist })
    }

    /// Λ = ℤ with the given twist.
    pub fn integers(twist: u32) -> Self {
        Self { generators: vec![1.0], twist }
    }

    /// Λ = {0} with the given twist.
    pub fn zero(twist: u32) -> Self {
        Self { generators: Vec::new(), twist }
    }

    pub fn generators(&self) -> &[f64] {
        &self.generators
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn twist(&self) -> u32 {
        self.twist
    }

    /// Same generators, different twist.
    pub fn with_twist(&self, twist: u32) -> Self {
        Self { generators: self.generators.clone(), twist }
    }

    /// The complex value (2πi)ⁿ · Σ cᵢ gᵢ of an exact element.
    pub fn value(&self, coefficients: &[i64]) -> Complex64 {
        assert_eq!(coefficients.len(), self.generators.len());
        let real: f64 = coefficients
            .iter()
            .zip(&self.generators)
            .map(|(c, g)| *c as f64 * g)
            .sum();
        two_pi_i_pow(self.twist) * real
    }

    /// Reduce `value` modulo Λ(n): find integer coefficients (|c| ≤ `bound`)
    /// whose lattice point is closest to `value`, by exact rounding for rank
    /// ≤ 1 and by a coefficient scan for dense ranks.
    pub fn reduce(&self, value: Complex64, bound: i64, tolerance: f64) -> Reduction {
        let scale = two_pi_i_pow(self.twist);
        // q should be (close to) real for genuine lattice elements.
        let q = value / scale;
        let (coefficients, best): (Vec<i64>, Complex64) = match self.generators.len() {
            0 => (Vec::new(), q),
            1 => {
                let g = self.generators[0];
                let c = (q.re / g).round() as i64;
                (vec![c], q - c as f64 * g)
            }
            2 => {
                let (g0, g1) = (self.generators[0], self.generators[1]);
                let b_max = bound.min(RANK2_SCAN_CAP);
                let mut best = (i64::MAX, i64::MAX, f64::INFINITY);
                for c1 in -b_max..=b_max {
                    let rem = q.re - c1 as f64 * g1;
                    let c0 = (rem / g0).round() as i64;
                    if c0.abs() > bound {
                        continue;
                    }
                    let r = (rem - c0 as f64 * g0).hypot(q.im);
                    if r < best.2 {
                        best = (c0, c1, r);
                    }
                }
                let (c0, c1, _) = best;
                (vec![c0, c1], q - (c0 as f64 * g0 + c1 as f64 * g1))
            }
            _ => {
                let (g0, g1, g2) =
                    (self.generators[0], self.generators[1], self.generators[2]);
                let b_max = bound.min(RANK3_SCAN_CAP);
                let mut best = (0i64, 0i64, 0i64, f64::INFINITY);
                for c2 in -b_max..=b_max {
                    for c1 in -b_max..=b_max {
                        let rem = q.re - c1 as f64 * g1 - c2 as f64 * g2;
                        let c0 = (rem / g0).round() as i64;
                        if c0.abs() > bound {
                            continue;
                        }
                        let r = (rem - c0 as f64 * g0).hypot(q.im);
                        if r < best.3 {
                            best = (c0, c1, c2, r);
                        }
                    }
                }
                let (c0, c1, c2, _) = best;
                (
                    vec![c0, c1, c2],
                    q - (c0 as f64 * g0 + c1 as f64 * g1 + c2 as f64 * g2),
                )
            }
        };
        let reduced = best * scale;
        let residual = reduced.norm();
        let verdict = if residual < tolerance {
            Verdict::Pass
        } else if self.generators.len() >= 2 && residual >= 10.0 * tolerance {
            Verdict::Inconclusive
        } else {
            Verdict::Fail
        };
        Reduction { raw: value, reduced, coefficients, residual, verdict }
    }

    /// Round a real number to an exact element of the untwisted group Λ,
    /// failing if no coefficient vector within `bound` lands within `tol`.
    pub fn round_real(&self, x: f64, bound: i64, tol: f64) -> Result<Vec<i64>> {
        let untwisted = Self { generators: self.generators.clone(), twist: 0 };
        let red = untwisted.reduce(Complex64::new(x, 0.0), bound, tol);
        if red.residual < tol {
            Ok(red.coefficients)
        } else {
            Err(Error::LatticeRounding { value: x, residual: red.residual })
        }
    }
}
