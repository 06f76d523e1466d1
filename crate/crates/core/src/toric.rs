//! Slice volumes of convex polytopes under coordinate projections.
//!
//! For a toric manifold the Duistermaat-Heckman function is the indicator of
//! the moment polytope, so the DH function of a circle subgroup acting along
//! a coordinate axis is the slice-volume profile computed here. Non-coordinate
//! directions are handled by rotating the polytope first; that is left to the
//! caller.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logconcavity::{discrete_logconcavity, LogConcavityError, ViolationReport};

/// Coordinates beyond this magnitude count as unbounded.
pub const BOUND: f64 = 1e6;

/// Cap on the number of vertex candidates examined.
pub const MAX_CANDIDATES: usize = 2_000_000;

const FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ToricError {
    #[error("malformed polytope: {0}")]
    Parse(String),
    #[error("polytope is empty")]
    Empty,
    #[error("polytope is unbounded along axis {0}")]
    Unbounded(usize),
    #[error("axis {axis} out of range for dimension {dim}")]
    Axis { axis: usize, dim: usize },
    #[error("exact slicing needs a 2-dimensional polytope, got dimension {0}")]
    NotPlanar(usize),
    #[error("vertex enumeration exceeds {MAX_CANDIDATES} candidates")]
    TooLarge,
    #[error("need at least 3 positive bins, got {0}")]
    InsufficientData(usize),
    #[error("positive bins are not contiguous")]
    NonContiguousSupport,
    #[error(transparent)]
    LogConcavity(#[from] LogConcavityError),
}

/// Half-space `a · x <= b`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    #[serde(rename = "a")]
    pub normal: Vec<f64>,
    #[serde(rename = "b")]
    pub offset: f64,
}

/// Intersection of half-spaces; JSON `{"dim": d, "halfspaces": [{"a": [...], "b": v}]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HPolytope {
    pub dim: usize,
    pub halfspaces: Vec<Halfspace>,
}

impl HPolytope {
    pub fn new(dim: usize, halfspaces: Vec<Halfspace>) -> Result<Self, ToricError> {
        if dim == 0 {
            return Err(ToricError::Parse("dimension must be positive".into()));
        }
        for (i, h) in halfspaces.iter().enumerate() {
            if h.normal.len() != dim {
                return Err(ToricError::Parse(format!(
                    "halfspace {i} has {} coefficients, expected {dim}",
                    h.normal.len()
                )));
            }
            if !h.offset.is_finite() || h.normal.iter().any(|v| !v.is_finite()) {
                return Err(ToricError::Parse(format!("halfspace {i} is not finite")));
            }
        }
        Ok(HPolytope { dim, halfspaces })
    }

    pub fn from_json(text: &str) -> Result<Self, ToricError> {
        let raw: HPolytope =
            serde_json::from_str(text).map_err(|e| ToricError::Parse(e.to_string()))?;
        HPolytope::new(raw.dim, raw.halfspaces)
    }

    /// Axis-aligned box `[lo_k, hi_k]`.
    pub fn cuboid(lo: &[f64], hi: &[f64]) -> Self {
        let dim = lo.len();
        let mut hs = Vec::with_capacity(2 * dim);
        for k in 0..dim {
            let mut e = vec![0.0; dim];
            e[k] = 1.0;
            hs.push(Halfspace {
                normal: e.clone(),
                offset: hi[k],
            });
            e[k] = -1.0;
            hs.push(Halfspace {
                normal: e,
                offset: -lo[k],
            });
        }
        HPolytope {
            dim,
            halfspaces: hs,
        }
    }

    /// Standard simplex `x >= 0, Σx <= 1`.
    pub fn simplex(dim: usize) -> Self {
        let mut hs: Vec<Halfspace> = (0..dim)
            .map(|k| {
                let mut e = vec![0.0; dim];
                e[k] = -1.0;
                Halfspace {
                    normal: e,
                    offset: 0.0,
                }
            })
            .collect();
        hs.push(Halfspace {
            normal: vec![1.0; dim],
            offset: 1.0,
        });
        HPolytope {
            dim,
            halfspaces: hs,
        }
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        HPolytope {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| Halfspace {
                    normal: h.normal.clone(),
                    offset: h.offset + dot(&h.normal, shift),
                })
                .collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| dot(&h.normal, x) <= h.offset)
    }

    fn check_axis(&self, axis: usize) -> Result<(), ToricError> {
        if axis < self.dim {
            Ok(())
        } else {
            Err(ToricError::Axis {
                axis,
                dim: self.dim,
            })
        }
    }

    /// Vertices, enumerated over `dim`-subsets of the constraints together
    /// with a `±BOUND` box. A vertex on the box means the input is unbounded.
    pub fn vertices(&self) -> Result<Vec<Vec<f64>>, ToricError> {
        let d = self.dim;
        let mut all = self.halfspaces.clone();
        all.extend(HPolytope::cuboid(&vec![-BOUND; d], &vec![BOUND; d]).halfspaces);
        if binomial(all.len(), d) > MAX_CANDIDATES {
            return Err(ToricError::TooLarge);
        }
        let scale = 1.0
            + self
                .halfspaces
                .iter()
                .map(|h| h.offset.abs())
                .fold(0.0, f64::max);
        let mut verts: Vec<Vec<f64>> = Vec::new();
        for_each_combination(all.len(), d, |idx| {
            let rows: Vec<&Halfspace> = idx.iter().map(|&i| &all[i]).collect();
            let Some(x) = solve(&rows) else { return };
            let feasible = all
                .iter()
                .all(|h| dot(&h.normal, &x) <= h.offset + FEAS_TOL * scale.max(h.offset.abs()));
            if feasible && !verts.iter().any(|v| dist_inf(v, &x) <= 1e-9 * scale) {
                verts.push(x);
            }
        });
        if verts.is_empty() {
            return Err(ToricError::Empty);
        }
        for v in &verts {
            if let Some(k) = v.iter().position(|c| c.abs() >= BOUND * (1.0 - 1e-9)) {
                return Err(ToricError::Unbounded(k));
            }
        }
        Ok(verts)
    }

    /// Bounding box `(lo, hi)` per axis.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>), ToricError> {
        let verts = self.vertices()?;
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for v in &verts {
            for k in 0..self.dim {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        Ok((lo, hi))
    }

    /// The polytope `{y : (y with x_axis = s) ∈ P}` in one dimension less.
    /// `None` when some constraint is violated for every `y`.
    pub fn slice(&self, axis: usize, s: f64) -> Option<HPolytope> {
        let mut hs = Vec::new();
        for h in &self.halfspaces {
            let offset = h.offset - h.normal[axis] * s;
            let normal: Vec<f64> = h
                .normal
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != axis)
                .map(|(_, &v)| v)
                .collect();
            if normal.iter().all(|&v| v == 0.0) {
                if offset < 0.0 {
                    return None;
                }
                continue;
            }
            hs.push(Halfspace { normal, offset });
        }
        Some(HPolytope {
            dim: self.dim - 1,
            halfspaces: hs,
        })
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn dist_inf(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn for_each_combination(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k;
        while i > 0 && idx[i - 1] == n - k + i - 1 {
            i -= 1;
        }
        if i == 0 {
            return;
        }
        idx[i - 1] += 1;
        for j in i..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Solves `rows · x = offsets` by Gaussian elimination with partial
/// pivoting; `None` when (numerically) singular.
fn solve(rows: &[&Halfspace]) -> Option<Vec<f64>> {
    let n = rows.len();
    let mut m: Vec<Vec<f64>> = rows
        .iter()
        .map(|h| {
            let mut r = h.normal.clone();
            r.push(h.offset);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        let norm = m[piv][..n].iter().map(|v| v.abs()).fold(0.0, f64::max);
        if m[piv][col].abs() <= 1e-12 * norm.max(1.0) {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let factor = m[r][col] / m[col][col];
                if factor != 0.0 {
                    for c in col..=n {
                        m[r][c] -= factor * m[col][c];
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// Exact min and max of `x_axis` over the polytope.
pub fn projection_range(p: &HPolytope, axis: usize) -> Result<(f64, f64), ToricError> {
    p.check_axis(axis)?;
    let verts = p.vertices()?;
    let lo = verts.iter().map(|v| v[axis]).fold(f64::INFINITY, f64::min);
    let hi = verts
        .iter()
        .map(|v| v[axis])
        .fold(f64::NEG_INFINITY, f64::max);
    Ok((lo, hi))
}

/// Length of the slice `x_axis = s` of a planar polytope.
pub fn slice_volume_exact_2d(p: &HPolytope, axis: usize, s: f64) -> Result<f64, ToricError> {
    if p.dim != 2 {
        return Err(ToricError::NotPlanar(p.dim));
    }
    p.check_axis(axis)?;
    let other = 1 - axis;
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in &p.halfspaces {
        let (a, c) = (h.normal[axis], h.normal[other]);
        let rhs = h.offset - a * s;
        if c > 0.0 {
            hi = hi.min(rhs / c);
        } else if c < 0.0 {
            lo = lo.max(rhs / c);
        } else if rhs < 0.0 {
            return Ok(0.0);
        }
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(ToricError::Unbounded(other));
    }
    Ok((hi - lo).max(0.0))
}

/// Hit-or-miss estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SliceEstimate {
    pub volume: f64,
    pub stderr: f64,
}

/// Hit-or-miss estimate of the `(dim-1)`-volume of the slice `x_axis = s`,
/// sampling uniformly from the slice's bounding box.
pub fn slice_volume_mc(
    p: &HPolytope,
    axis: usize,
    s: f64,
    n: u64,
    seed: u64,
) -> Result<SliceEstimate, ToricError> {
    slice_volume_mc_stream(p, axis, s, n, seed, 0)
}

fn slice_volume_mc_stream(
    p: &HPolytope,
    axis: usize,
    s: f64,
    n: u64,
    seed: u64,
    stream: u64,
) -> Result<SliceEstimate, ToricError> {
    p.check_axis(axis)?;
    let zero = SliceEstimate {
        volume: 0.0,
        stderr: 0.0,
    };
    let Some(sl) = p.slice(axis, s) else {
        return Ok(zero);
    };
    if sl.dim == 0 {
        // the slice of an interval is a point, of counting measure 1
        return Ok(SliceEstimate {
            volume: 1.0,
            stderr: 0.0,
        });
    }
    let (lo, hi) = match sl.bounding_box() {
        Ok(b) => b,
        Err(ToricError::Empty) => return Ok(zero),
        Err(e) => return Err(e),
    };
    let widths: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| b - a).collect();
    if n == 0 || widths.iter().any(|&w| !(w > 0.0)) {
        return Ok(zero);
    }
    let box_volume: f64 = widths.iter().product();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut y = vec![0.0; sl.dim];
    let mut hits = 0u64;
    for _ in 0..n {
        for k in 0..sl.dim {
            y[k] = lo[k] + widths[k] * rng.random::<f64>();
        }
        if sl.contains(&y) {
            hits += 1;
        }
    }
    let frac = hits as f64 / n as f64;
    Ok(SliceEstimate {
        volume: box_volume * frac,
        stderr: box_volume * (frac * (1.0 - frac) / n as f64).sqrt(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SliceMethod {
    Exact2d,
    Mc,
}

/// Slice volumes at bin centers across the projection range.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SliceVolumeFn {
    pub axis: usize,
    pub grid: Vec<f64>,
    pub volumes: Vec<f64>,
    pub stderr: Vec<f64>,
}

impl SliceVolumeFn {
    /// Index range `[first, last]` of strictly positive volumes.
    pub fn support(&self) -> Option<(usize, usize)> {
        let first = self.volumes.iter().position(|&v| v > 0.0)?;
        let last = self.volumes.iter().rposition(|&v| v > 0.0)?;
        Some((first, last))
    }

    /// Relative slack that absorbs `k` standard errors in the midpoint
    /// inequality `v_i² >= v_{i-1} v_{i+1}` anywhere on the support.
    pub fn noise_tolerance(&self, k: f64) -> f64 {
        let Some((first, last)) = self.support() else {
            return 0.0;
        };
        let rel = |i: usize| {
            if self.volumes[i] > 0.0 {
                self.stderr[i] / self.volumes[i]
            } else {
                0.0
            }
        };
        let worst = (first + 1..last)
            .map(|i| (rel(i - 1).powi(2) + rel(i + 1).powi(2) + 4.0 * rel(i).powi(2)).sqrt())
            .fold(0.0, f64::max);
        (k * worst).min(0.999)
    }

    /// Writes `s,volume,stderr` rows.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["s", "volume", "stderr"])?;
        for i in 0..self.grid.len() {
            w.write_record(&[
                format!("{:.9}", self.grid[i]),
                format!("{:.12e}", self.volumes[i]),
                format!("{:.12e}", self.stderr[i]),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evaluates the slice volume at `bins` bin centers across the projection
/// range. MC bins use stream `bin` of the seed, so the profile does not
/// depend on scheduling.
pub fn slice_profile(
    p: &HPolytope,
    axis: usize,
    bins: usize,
    method: SliceMethod,
    mc_n: u64,
    seed: u64,
) -> Result<SliceVolumeFn, ToricError> {
    if method == SliceMethod::Exact2d && p.dim != 2 {
        return Err(ToricError::NotPlanar(p.dim));
    }
    let (lo, hi) = projection_range(p, axis)?;
    let width = (hi - lo) / bins as f64;
    let grid: Vec<f64> = (0..bins).map(|i| lo + width * (i as f64 + 0.5)).collect();
    let values: Vec<SliceEstimate> = grid
        .par_iter()
        .enumerate()
        .map(|(i, &s)| match method {
            SliceMethod::Exact2d => slice_volume_exact_2d(p, axis, s).map(|v| SliceEstimate {
                volume: v,
                stderr: 0.0,
            }),
            SliceMethod::Mc => slice_volume_mc_stream(p, axis, s, mc_n, seed, i as u64),
        })
        .collect::<Result<_, _>>()?;
    Ok(SliceVolumeFn {
        axis,
        volumes: values.iter().map(|v| v.volume).collect(),
        stderr: values.iter().map(|v| v.stderr).collect(),
        grid,
    })
}

/// Discrete log-concavity test of a profile after trimming zero-volume bins
/// at both ends.
pub fn prekopa_check(f: &SliceVolumeFn, tol: f64) -> Result<ViolationReport, ToricError> {
    let (first, last) = f.support().ok_or(ToricError::InsufficientData(0))?;
    if f.volumes[first..=last].iter().any(|&v| !(v > 0.0)) {
        return Err(ToricError::NonContiguousSupport);
    }
    let count = last - first + 1;
    if count < 3 {
        return Err(ToricError::InsufficientData(count));
    }
    let samples: Vec<(f64, f64)> = (first..=last).map(|i| (f.grid[i], f.volumes[i])).collect();
    let mut report = discrete_logconcavity(&samples, tol)?;
    report.trimmed = Some((first, f.volumes.len() - 1 - last));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_square() -> HPolytope {
        HPolytope::cuboid(&[0.0, 0.0], &[1.0, 1.0])
    }

    #[test]
    fn projection_ranges() {
        assert_eq!(projection_range(&unit_square(), 0).unwrap(), (0.0, 1.0));
        assert_eq!(
            projection_range(&HPolytope::simplex(2), 0).unwrap(),
            (0.0, 1.0)
        );
        let cube = HPolytope::cuboid(&[2.0; 3], &[5.0; 3]);
        assert_eq!(projection_range(&cube, 2).unwrap(), (2.0, 5.0));
    }

    #[test]
    fn projection_range_errors() {
        let empty = HPolytope::new(
            1,
            vec![
                Halfspace {
                    normal: vec![1.0],
                    offset: 0.0,
                },
                Halfspace {
                    normal: vec![-1.0],
                    offset: -1.0,
                },
            ],
        )
        .unwrap();
        assert_eq!(projection_range(&empty, 0), Err(ToricError::Empty));
        let half_plane = HPolytope::new(
            2,
            vec![Halfspace {
                normal: vec![1.0, 0.0],
                offset: 1.0,
            }],
        )
        .unwrap();
        assert!(matches!(
            projection_range(&half_plane, 0),
            Err(ToricError::Unbounded(_))
        ));
        assert!(matches!(
            projection_range(&unit_square(), 2),
            Err(ToricError::Axis { .. })
        ));
    }

    #[test]
    fn exact_planar_slices() {
        assert_eq!(slice_volume_exact_2d(&unit_square(), 0, 0.3).unwrap(), 1.0);
        assert_eq!(
            slice_volume_exact_2d(&HPolytope::simplex(2), 0, 0.25).unwrap(),
            0.75
        );
        assert_eq!(
            slice_volume_exact_2d(&HPolytope::simplex(2), 0, 1.5).unwrap(),
            0.0
        );
        assert_eq!(
            slice_volume_exact_2d(&HPolytope::simplex(3), 0, 0.5),
            Err(ToricError::NotPlanar(3))
        );
    }

    #[test]
    fn mc_cube_slice() {
        let cube = HPolytope::cuboid(&[0.0; 3], &[1.0; 3]);
        let est = slice_volume_mc(&cube, 0, 0.5, 100_000, 1).unwrap();
        assert!((est.volume - 1.0).abs() <= 0.01);
    }

    #[test]
    fn mc_simplex_slice_at_base() {
        let est = slice_volume_mc(&HPolytope::simplex(3), 0, 0.0, 100_000, 9).unwrap();
        assert!((est.volume - 0.5).abs() <= 3.0 * est.stderr, "{est:?}");
    }

    #[test]
    fn mc_outside_range_is_zero() {
        let est = slice_volume_mc(&HPolytope::simplex(3), 0, 1.5, 1000, 9).unwrap();
        assert_eq!(est.volume, 0.0);
        let est = slice_volume_mc(&HPolytope::simplex(3), 0, -0.5, 1000, 9).unwrap();
        assert_eq!(est.volume, 0.0);
    }

    #[test]
    fn mc_is_deterministic() {
        let p = HPolytope::simplex(3);
        assert_eq!(
            slice_volume_mc(&p, 1, 0.3, 5000, 4).unwrap(),
            slice_volume_mc(&p, 1, 0.3, 5000, 4).unwrap()
        );
    }

    #[test]
    fn simplex_profile_is_one_minus_s() {
        let prof =
            slice_profile(&HPolytope::simplex(2), 0, 100, SliceMethod::Exact2d, 0, 0).unwrap();
        for (s, v) in prof.grid.iter().zip(&prof.volumes) {
            assert!((v - (1.0 - s)).abs() <= 1e-12);
        }
        assert!(prekopa_check(&prof, 1e-12).unwrap().log_concave);
    }

    #[test]
    fn square_profile_is_flat() {
        let prof = slice_profile(&unit_square(), 0, 20, SliceMethod::Exact2d, 0, 0).unwrap();
        assert!(prof.volumes.iter().all(|&v| v == 1.0));
    }

    #[test]
    fn translation_shifts_exact_profile() {
        let p = HPolytope::simplex(2);
        let q = p.translated(&[2.0, -1.0]);
        let a = slice_profile(&p, 0, 25, SliceMethod::Exact2d, 0, 0).unwrap();
        let b = slice_profile(&q, 0, 25, SliceMethod::Exact2d, 0, 0).unwrap();
        for i in 0..25 {
            assert!((b.grid[i] - a.grid[i] - 2.0).abs() < 1e-12);
            assert!((b.volumes[i] - a.volumes[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_and_mc_agree_in_the_plane() {
        let p = HPolytope::new(
            2,
            vec![
                Halfspace {
                    normal: vec![1.0, 1.0],
                    offset: 2.0,
                },
                Halfspace {
                    normal: vec![-1.0, 0.5],
                    offset: 1.0,
                },
                Halfspace {
                    normal: vec![0.0, -1.0],
                    offset: 0.5,
                },
                Halfspace {
                    normal: vec![0.3, -1.0],
                    offset: 1.0,
                },
            ],
        )
        .unwrap();
        let exact = slice_profile(&p, 0, 30, SliceMethod::Exact2d, 0, 0).unwrap();
        let mc = slice_profile(&p, 0, 30, SliceMethod::Mc, 20_000, 3).unwrap();
        for i in 0..30 {
            assert!(
                (exact.volumes[i] - mc.volumes[i]).abs() <= 3.0 * mc.stderr[i] + 1e-12,
                "bin {i}"
            );
        }
    }

    #[test]
    fn prekopa_rejects_fake_nonconcave_profile() {
        let grid: Vec<f64> = (0..41).map(|i| 0.5 + 0.1 * i as f64).collect();
        let prof = SliceVolumeFn {
            axis: 0,
            volumes: grid.iter().map(|s| s * s - 5.0 * s + 7.0).collect(),
            stderr: vec![0.0; 41],
            grid,
        };
        assert!(!prekopa_check(&prof, 1e-9).unwrap().log_concave);
    }

    #[test]
    fn prekopa_trims_and_counts() {
        let prof = SliceVolumeFn {
            axis: 0,
            grid: vec![0.0, 1.0, 2.0, 3.0, 4.0],
            volumes: vec![0.0, 1.0, 2.0, 1.0, 0.0],
            stderr: vec![0.0; 5],
        };
        let rep = prekopa_check(&prof, 0.0).unwrap();
        assert_eq!(rep.trimmed, Some((1, 1)));
        let short = SliceVolumeFn {
            volumes: vec![0.0, 1.0, 1.0, 0.0, 0.0],
            ..prof.clone()
        };
        assert_eq!(
            prekopa_check(&short, 0.0),
            Err(ToricError::InsufficientData(2))
        );
        let gap = SliceVolumeFn {
            volumes: vec![1.0, 1.0, 0.0, 1.0, 1.0],
            ..prof
        };
        assert_eq!(
            prekopa_check(&gap, 0.0),
            Err(ToricError::NonContiguousSupport)
        );
    }

    #[test]
    fn json_round_trip_and_errors() {
        let text = r#"{"dim": 2, "halfspaces": [{"a": [-1, 0], "b": 0}, {"a": [0, -1], "b": 0}, {"a": [1, 1], "b": 1}]}"#;
        let p = HPolytope::from_json(text).unwrap();
        assert_eq!(p, HPolytope::simplex(2));
        assert!(matches!(
            HPolytope::from_json("{"),
            Err(ToricError::Parse(_))
        ));
        assert!(matches!(
            HPolytope::from_json(r#"{"dim": 2, "halfspaces": [{"a": [1], "b": 0}]}"#),
            Err(ToricError::Parse(_))
        ));
    }

    #[test]
    fn combinations_are_complete() {
        let mut n = 0;
        for_each_combination(6, 3, |_| n += 1);
        assert_eq!(n, 20);
        assert_eq!(binomial(20, 4), 4845);
    }
}
