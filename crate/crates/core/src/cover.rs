//! The standard 9-chart good cover of the 2-torus T² = (ℝ/ℤ)².
//!
//! Chart (row i, col j), with i, j ∈ {1, 2, 3}, is the open rectangle
//! ((j−1)/3 − p, j/3 + p) × ((i−1)/3 − p, i/3 + p) in lifted (s, t)
//! coordinates, where s (columns) is the longitude direction and t (rows) the
//! meridian direction. The pad p is kept below 1/12 so every chart has width
//! under 1/2: each point of an intersection then has a *unique* lift into each
//! participating chart, and the integer differences between those lifts — the
//! source of all the Λ(n)-valued cocycle data downstream — are constant on the
//! (connected) intersection and computed exactly.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of one chart of the cover; row and col run over 1..=3.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ChartId {
    pub row: u8,
    pub col: u8,
}

impl ChartId {
    pub fn new(row: u8, col: u8) -> Self {
        assert!((1..=3).contains(&row) && (1..=3).contains(&col));
        Self { row, col }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "U({},{})", self.row, self.col)
    }
}

/// A nonempty intersection U_{a0} ∩ … ∩ U_{ak}, described in the lifted
/// coordinates of the *first* chart of the tuple.
#[derive(Debug, Clone, PartialEq)]
pub struct Intersection {
    pub charts: Vec<ChartId>,
    /// s-range of the intersection in the first chart's lift.
    pub s: (f64, f64),
    /// t-range of the intersection in the first chart's lift.
    pub t: (f64, f64),
    /// Per chart of the tuple, the exact integer (Δs, Δt) with
    /// lift_{a0} = lift_{ak} + (Δs, Δt) on this intersection.
    pub offsets: Vec<(i64, i64)>,
}

impl Intersection {
    /// An interior grid of sample points (in the first chart's lift), used
    /// for numerical cocycle checks.
    pub fn sample_points(&self, per_axis: usize) -> Vec<(f64, f64)> {
        let mut pts = Vec::with_capacity(per_axis * per_axis);
        for a in 0..per_axis {
            let s = self.s.0 + (a as f64 + 0.5) / per_axis as f64 * (self.s.1 - self.s.0);
            for b in 0..per_axis {
                let t =
                    self.t.0 + (b as f64 + 0.5) / per_axis as f64 * (self.t.1 - self.t.0);
                pts.push((s, t));
            }
        }
        pts
    }

    /// Center of the intersection rectangle (first chart's lift).
    pub fn center(&self) -> (f64, f64) {
        (0.5 * (self.s.0 + self.s.1), 0.5 * (self.t.0 + self.t.1))
    }
}

/// The padded 9-chart cover.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoodCover {
    pad: f64,
}

impl GoodCover {
    /// The default cover with pad 0.08.
    pub fn standard() -> Self {
        Self { pad: 0.08 }
    }

    pub fn with_pad(pad: f64) -> Result<Self> {
        if !(pad > 0.0 && pad < 1.0 / 12.0) {
            return Err(Error::InvalidArgument(format!(
                "cover pad must lie in (0, 1/12), got {pad}"
            )));
        }
        Ok(Self { pad })
    }

    pub fn pad(&self) -> f64 {
        self.pad
    }

    /// All 9 charts in row-major order.
    pub fn charts(&self) -> Vec<ChartId> {
        let mut out = Vec::with_capacity(9);
        for row in 1..=3 {
            for col in 1..=3 {
                out.push(ChartId::new(row, col));
            }
        }
        out
    }

    /// The lifted interval covered by index k along one axis.
    fn axis_interval(&self, k: u8) -> (f64, f64) {
        ((k as f64 - 1.0) / 3.0 - self.pad, k as f64 / 3.0 + self.pad)
    }

    /// The lifted (s, t) rectangle of a chart.
    pub fn rect(&self, chart: ChartId) -> ((f64, f64), (f64, f64)) {
        (self.axis_interval(chart.col), self.axis_interval(chart.row))
    }

    /// Unique lift of the circle coordinate x into chart index k, if x lies
    /// in that chart's arc.
    fn lift_coord(&self, k: u8, x: f64) -> Option<f64> {
        let (lo, hi) = self.axis_interval(k);
        // Chart width is < 1/2, so at most one integer translate fits.
        let n = (lo - x).ceil();
        let lifted = x + n;
        (lifted > lo && lifted < hi).then_some(lifted)
    }

    /// Unique lift of a torus point into a chart, if the point lies in it.
    pub fn lift(&self, chart: ChartId, s: f64, t: f64) -> Option<(f64, f64)> {
        Some((self.lift_coord(chart.col, s)?, self.lift_coord(chart.row, t)?))
    }

    pub fn contains(&self, chart: ChartId, s: f64, t: f64) -> bool {
        self.lift(chart, s, t).is_some()
    }

    /// Overlap of the arcs of axis indices a and b on the circle: returns
    /// the integer n with lift_a = lift_b + n there, plus the common range
    /// in a's lift. Widths < 1/2 make n unique.
    fn axis_overlap(&self, a: u8, b: u8) -> Option<(i64, (f64, f64))> {
        let (alo, ahi) = self.axis_interval(a);
        let (blo, bhi) = self.axis_interval(b);
        for n in -1..=1i64 {
            let lo = alo.max(blo + n as f64);
            let hi = ahi.min(bhi + n as f64);
            if lo < hi {
                return Some((n, (lo, hi)));
            }
        }
        None
    }

    /// The exact integer lift offsets (Δs, Δt) with lift_a = lift_b + (Δs, Δt)
    /// on U_a ∩ U_b, or None if the intersection is empty.
    pub fn pair_offset(&self, a: ChartId, b: ChartId) -> Option<(i64, i64)> {
        let (ds, _) = self.axis_overlap(a.col, b.col)?;
        let (dt, _) = self.axis_overlap(a.row, b.row)?;
        Some((ds, dt))
    }

    /// Intersection of an arbitrary tuple of charts (repeats allowed), or
    /// None if empty.
    pub fn intersection(&self, charts: &[ChartId]) -> Option<Intersection> {
        let first = *charts.first()?;
        let mut s_range = self.axis_interval(first.col);
        let mut t_range = self.axis_interval(first.row);
        let mut offsets = Vec::with_capacity(charts.len());
        for &c in charts {
            let (ds, (slo, shi)) = self.axis_overlap(first.col, c.col)?;
            let (dt, (tlo, thi)) = self.axis_overlap(first.row, c.row)?;
            s_range = (s_range.0.max(slo), s_range.1.min(shi));
            t_range = (t_range.0.max(tlo), t_range.1.min(thi));
            if s_range.0 >= s_range.1 || t_range.0 >= t_range.1 {
                return None;
            }
            offsets.push((ds, dt));
        }
        Some(Intersection { charts: charts.to_vec(), s: s_range, t: t_range, offsets })
    }

    /// All nonempty intersections of `arity` *distinct* charts, tuples in
    /// ascending ChartId order.
    pub fn nerve(&self, arity: usize) -> Vec<Intersection> {
        let charts = self.charts();
        let mut out = Vec::new();
        let mut combo = Vec::with_capacity(arity);
        self.nerve_rec(&charts, 0, arity, &mut combo, &mut out);
        out
    }

    fn nerve_rec(
        &self,
        charts: &[ChartId],
        start: usize,
        arity: usize,
        combo: &mut Vec<ChartId>,
        out: &mut Vec<Intersection>,
    ) {
        if combo.len() == arity {
            if let Some(ix) = self.intersection(combo) {
                out.push(ix);
            }
            return;
        }
        for k in start..charts.len() {
            combo.push(charts[k]);
            self.nerve_rec(charts, k + 1, arity, combo, out);
            combo.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn chart_count_and_order() {
        let cover = GoodCover::standard();
        let charts = cover.charts();
        assert_eq!(charts.len(), 9);
        assert_eq!(charts[0], ChartId::new(1, 1));
        assert_eq!(charts[8], ChartId::new(3, 3));
    }

    #[test]
    fn nerve_counts() {
        let cover = GoodCover::standard();
        // Any two of the three padded arcs on a circle overlap, so all 36
        // pairs of distinct charts meet. Three distinct arcs never share a
        // point (pad < 1/6), which pins down the triple and quadruple counts.
        assert_eq!(cover.nerve(2).len(), 36);
        assert_eq!(cover.nerve(3).len(), 36);
        assert_eq!(cover.nerve(4).len(), 9);
        assert_eq!(cover.nerve(5).len(), 0);
    }

    #[test]
    fn wraparound_offset() {
        let cover = GoodCover::standard();
        // Columns 1 and 3 meet across the seam at s = 0; the col-1 lift is
        // near 0 while the col-3 lift is near 1.
        let a = ChartId::new(1, 1);
        let b = ChartId::new(1, 3);
        assert_eq!(cover.pair_offset(a, b), Some((-1, 0)));
        assert_eq!(cover.pair_offset(b, a), Some((1, 0)));
    }

    #[test]
    fn adjacent_offset_is_zero() {
        let cover = GoodCover::standard();
        let a = ChartId::new(2, 1);
        let b = ChartId::new(2, 2);
        assert_eq!(cover.pair_offset(a, b), Some((0, 0)));
    }

    #[test]
    fn lift_uniqueness_on_samples() {
        let cover = GoodCover::standard();
        for ix in cover.nerve(2) {
            for (s, t) in ix.sample_points(4) {
                let lift0 = cover.lift(ix.charts[0], s, t).unwrap();
                for (k, &c) in ix.charts.iter().enumerate() {
                    let liftk = cover.lift(c, s, t).unwrap();
                    let (ds, dt) = ix.offsets[k];
                    assert!((lift0.0 - liftk.0 - ds as f64).abs() < 1e-12);
                    assert!((lift0.1 - liftk.1 - dt as f64).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn offset_antisymmetry_and_cocycle() {
        let cover = GoodCover::standard();
        let charts = cover.charts();
        for &a in &charts {
            for &b in &charts {
                if let Some((ds, dt)) = cover.pair_offset(a, b) {
                    let (es, et) = cover.pair_offset(b, a).unwrap();
                    assert_eq!((ds, dt), (-es, -et));
                }
            }
        }
        // On triple overlaps the offsets satisfy the additive cocycle rule.
        for ix in cover.nerve(3) {
            let (a, b, c) = (ix.charts[0], ix.charts[1], ix.charts[2]);
            let ab = cover.pair_offset(a, b).unwrap();
            let bc = cover.pair_offset(b, c).unwrap();
            let ac = cover.pair_offset(a, c).unwrap();
            assert_eq!((ab.0 + bc.0, ab.1 + bc.1), ac);
        }
    }

    #[test]
    fn pad_bounds_enforced() {
        assert!(GoodCover::with_pad(0.0).is_err());
        assert!(GoodCover::with_pad(1.0 / 12.0).is_err());
        assert!(GoodCover::with_pad(0.04).is_ok());
    }

    proptest! {
        #[test]
        fn every_point_covered(s in 0.0f64..1.0, t in 0.0f64..1.0) {
            let cover = GoodCover::standard();
            let n = cover.charts().iter().filter(|c| cover.contains(**c, s, t)).count();
            prop_assert!(n >= 1, "point ({s}, {t}) uncovered");
        }

        #[test]
        fn lift_reduces_to_point(s in -2.0f64..2.0, t in -2.0f64..2.0) {
            let cover = GoodCover::standard();
            for c in cover.charts() {
                if let Some((ls, lt)) = cover.lift(c, s, t) {
                    prop_assert!(((ls - s) - (ls - s).round()).abs() < 1e-9);
                    prop_assert!(((lt - t) - (lt - t).round()).abs() < 1e-9);
                }
            }
        }
    }
}
