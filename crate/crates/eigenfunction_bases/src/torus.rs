//! Lattice points in an annulus, enumerated row by row.

use crate::error::BasisError;

pub const TORUS_MIN_LAMBDA: f64 = 5.0;

/// Contiguous run of `k₂` values in one lattice row.
#[derive(Clone, Debug, PartialEq)]
pub struct RowSegment {
    pub k2_lo: i64,
    pub k2_hi: i64,
    /// Position of `(k₁, k2_lo)` in the flattened index list.
    pub offset: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LatticeRow {
    pub k1: i64,
    pub segments: Vec<RowSegment>,
}

/// Largest integer `m ≥ 0` with `m² ≤ v`, or `None` if `v < 0`.
fn isqrt_floor(v: i128) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let mut m = (v as f64).sqrt() as i128;
    while m * m > v {
        m -= 1;
    }
    while (m + 1) * (m + 1) <= v {
        m += 1;
    }
    Some(m as i64)
}

/// Smallest integer `m ≥ 0` with `m² ≥ v`.
fn isqrt_ceil(v: i128) -> i64 {
    if v <= 0 {
        return 0;
    }
    let f = isqrt_floor(v).unwrap_or(0);
    if (f as i128) * (f as i128) == v {
        f
    } else {
        f + 1
    }
}

/// Squared radii bounds as integers: `|k|² ∈ [lo², hi²]` for integer `|k|²`.
fn square_bounds(lo: f64, hi: f64) -> (i128, i128) {
    let lo2 = if lo <= 0.0 { 0 } else { (lo * lo).ceil() as i128 };
    (lo2, (hi * hi).floor() as i128)
}

/// Points `k ∈ Z²` with `λ + w₀ ≤ |k| ≤ λ + w₁`, ordered by `k₁` then `k₂`.
pub fn annulus_points(lambda: f64, window: [f64; 2]) -> Result<Vec<[i64; 2]>, BasisError> {
    if !(lambda >= TORUS_MIN_LAMBDA) || !lambda.is_finite() {
        return Err(BasisError::OutOfRange { what: "lambda", value: lambda, range: "[5, ∞)" });
    }
    let (lo, hi) = (lambda + window[0], lambda + window[1]);
    if !(hi >= lo.max(0.0)) {
        return Err(BasisError::EmptyCluster { lo, hi });
    }
    let (lo2, hi2) = square_bounds(lo, hi);
    let kmax = isqrt_floor(hi2).unwrap_or(0);
    let mut pts = Vec::new();
    for k1 in -kmax..=kmax {
        let r = k1 as i128 * k1 as i128;
        let Some(top) = isqrt_floor(hi2 - r) else { continue };
        let bottom = isqrt_ceil(lo2 - r);
        if bottom > top {
            continue;
        }
        pts.extend((-top..=-bottom.max(1)).map(|k2| [k1, k2]));
        pts.extend((bottom..=top).map(|k2| [k1, k2]));
    }
    if pts.is_empty() {
        return Err(BasisError::EmptyCluster { lo, hi });
    }
    Ok(pts)
}

/// Group an ordered point list into rows of contiguous `k₂` runs.
pub fn lattice_rows(points: &[[i64; 2]]) -> Vec<LatticeRow> {
    let mut rows: Vec<LatticeRow> = Vec::new();
    for (i, &[k1, k2]) in points.iter().enumerate() {
        match rows.last_mut() {
            Some(row) if row.k1 == k1 => {
                let seg = row.segments.last_mut().expect("rows start with a segment");
                if seg.k2_hi + 1 == k2 {
                    seg.k2_hi = k2;
                } else {
                    row.segments.push(RowSegment { k2_lo: k2, k2_hi: k2, offset: i });
                }
            }
            _ => rows.push(LatticeRow { k1, segments: vec![RowSegment { k2_lo: k2, k2_hi: k2, offset: i }] }),
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integer_roots() {
        assert_eq!(isqrt_floor(35), Some(5));
        assert_eq!(isqrt_floor(36), Some(6));
        assert_eq!(isqrt_floor(-1), None);
        assert_eq!(isqrt_ceil(16), 4);
        assert_eq!(isqrt_ceil(17), 5);
        assert_eq!(isqrt_ceil(-3), 0);
    }

    #[test]
    fn rows_cover_points() {
        let pts = annulus_points(7.3, [-1.0, 1.0]).unwrap();
        let rows = lattice_rows(&pts);
        let total: i64 = rows.iter().flat_map(|r| &r.segments).map(|s| s.k2_hi - s.k2_lo + 1).sum();
        assert_eq!(total as usize, pts.len());
        for r in &rows {
            for s in &r.segments {
                assert_eq!(pts[s.offset], [r.k1, s.k2_lo]);
            }
        }
    }
}
