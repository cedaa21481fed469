//! Periodic points of hyperbolic (Anosov) automorphisms of T², the base
//! dynamics of the suspension examples.
//!
//! For A ∈ GL₂(ℤ) with |det A| = 1 and |tr A| > 2 the number of points of
//! period dividing n is |det(Aⁿ − I)|.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatMap {
    a: [[i64; 2]; 2],
}

fn det2(m: [[i128; 2]; 2]) -> i128 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

fn mul2(x: [[i128; 2]; 2], y: [[i128; 2]; 2]) -> [[i128; 2]; 2] {
    let mut out = [[0i128; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
        }
    }
    out
}

impl CatMap {
    pub fn new(a: [[i64; 2]; 2]) -> Result<Self> {
        let trace = a[0][0] + a[1][1];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        if det.abs() != 1 || trace.abs() <= 2 {
            return Err(Error::NotAnosov { trace, det });
        }
        Ok(Self { a })
    }

    /// Arnold's cat map [[2, 1], [1, 1]].
    pub fn standard() -> Self {
        Self { a: [[2, 1], [1, 1]] }
    }

    pub fn matrix(&self) -> [[i64; 2]; 2] {
        self.a
    }

    /// Aⁿ in 128-bit arithmetic (entries grow like |λ|ⁿ, far from overflow
    /// for any n this crate handles).
    fn power(&self, n: u32) -> [[i128; 2]; 2] {
        let a = [
            [self.a[0][0] as i128, self.a[0][1] as i128],
            [self.a[1][0] as i128, self.a[1][1] as i128],
        ];
        let mut acc = [[1, 0], [0, 1]];
        for _ in 0..n {
            acc = mul2(acc, a);
        }
        acc
    }

    /// Number of x ∈ T² with Aⁿx = x, i.e. |det(Aⁿ − I)|.
    pub fn periodic_points(&self, n: u32) -> u64 {
        let mut b = self.power(n);
        b[0][0] -= 1;
        b[1][1] -= 1;
        det2(b).unsigned_abs() as u64
    }

    /// Brute-force oracle: every solution of (Aⁿ − I)x ∈ ℤ² has coordinates
    /// with denominator dividing D = |det(Aⁿ − I)|, so scan the D × D grid
    /// of candidates (p/D, q/D).
    pub fn periodic_points_by_enumeration(&self, n: u32) -> u64 {
        let mut b = self.power(n);
        b[0][0] -= 1;
        b[1][1] -= 1;
        let d = det2(b).unsigned_abs();
        if d == 0 {
            return 0;
        }
        let d = d as i128;
        let mut count = 0u64;
        for p in 0..d {
            for q in 0..d {
                let u = b[0][0] * p + b[0][1] * q;
                let v = b[1][0] * p + b[1][1] * q;
                if u.rem_euclid(d) == 0 && v.rem_euclid(d) == 0 {
                    count += 1;
                }
            }
        }
        count
    }

    /// Points of *least* period n, by Möbius inversion over divisors.
    pub fn exact_period_points(&self, n: u32) -> i64 {
        let mut total = 0i64;
        for d in 1..=n {
            if n % d == 0 {
                total += moebius(n / d) * self.periodic_points(d) as i64;
            }
        }
        total
    }

    /// Number of closed orbits of least period n.
    pub fn orbit_count(&self, n: u32) -> i64 {
        self.exact_period_points(n) / n as i64
    }
}

fn moebius(mut n: u32) -> i64 {
    let mut mu = 1i64;
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            n /= p;
            if n % p == 0 {
                return 0;
            }
            mu = -mu;
        }
        p += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}
