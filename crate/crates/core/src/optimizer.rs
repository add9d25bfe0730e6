//! Maximin choice of the decoders' measurement directions and the map of
//! sharpness pairs for which both decoders beat the classical bound.
//!
//! For fixed `(η₀, η₁)` the procedure starts from mutually unbiased settings.
//! If Bob already does no better than Charlie there, nothing can be gained.
//! Otherwise `α` is lowered, with `β` re-maximised for Charlie at every step,
//! until both success probabilities coincide.

use std::collections::HashMap;
use std::f64::consts::FRAC_PI_4;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_range, Error, Result};
use crate::numeric::{bisect, linspace};
use crate::protocol::{
    p_ab_at, p_ac_at, residual, Branch, ProtocolParams, SuccessReport, CLASSICAL_BOUND,
};

/// Bracket width at which the bisection over `α` stops.
pub const ALPHA_TOL: f64 = 1e-13;

/// Slack used by the violation flag, `min(P_AB, P_AC) ≥ 3/4 − VIOLATION_SLACK`.
pub const VIOLATION_SLACK: f64 = 1e-12;

/// Result of the maximin optimisation for one sharpness pair.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OptimalSetting {
    pub eta0: f64,
    pub eta1: f64,
    pub alpha: f64,
    pub beta: f64,
    /// `min(P_AB, P_AC)` at the returned angles; both coincide on the
    /// optimized branch.
    pub p_equal: f64,
    pub branch: Branch,
}

impl OptimalSetting {
    pub fn params(&self) -> ProtocolParams {
        ProtocolParams {
            eta0: self.eta0,
            eta1: self.eta1,
            alpha: self.alpha,
            beta: self.beta,
        }
    }

    pub fn report(&self) -> SuccessReport {
        SuccessReport::evaluate(&self.params(), self.branch)
    }

    pub fn alpha_deg(&self) -> f64 {
        self.alpha.to_degrees()
    }

    pub fn beta_deg(&self) -> f64 {
        self.beta.to_degrees()
    }

    pub fn violates(&self) -> bool {
        self.p_equal >= CLASSICAL_BOUND - VIOLATION_SLACK
    }
}

/// Charlie's best `β` for fixed `α`, from the stationarity condition
/// `tan β* = (2 sin²α + S cos²α)/(2 cos²α + S sin²α)`.
///
/// On `α ∈ [0, π/4]` the denominator is at least the numerator, so the
/// stationary point always lies inside `[0, π/4]` and is the maximum.
pub fn best_beta(alpha: f64, eta0: f64, eta1: f64) -> f64 {
    best_beta_residual(alpha, residual(eta0, eta1))
}

fn best_beta_residual(alpha: f64, s: f64) -> f64 {
    let (c2, s2) = (alpha.cos().powi(2), alpha.sin().powi(2));
    (2.0 * s2 + s * c2)
        .atan2(2.0 * c2 + s * s2)
        .clamp(0.0, FRAC_PI_4)
}

/// Charlie's best success probability at fixed `α`.
pub fn max_p_ac(alpha: f64, eta0: f64, eta1: f64) -> f64 {
    let s = residual(eta0, eta1);
    p_ac_at(alpha, best_beta_residual(alpha, s), s)
}

/// Maximin settings for the sharpness pair `(η₀, η₁)`.
pub fn optimize(eta0: f64, eta1: f64) -> Result<OptimalSetting> {
    check_range("eta0", eta0, 0.0, 1.0, "[0, 1]")?;
    check_range("eta1", eta1, 0.0, 1.0, "[0, 1]")?;
    let s = residual(eta0, eta1);
    let gap = |alpha: f64| p_ab_at(eta0, eta1, alpha) - p_ac_at(alpha, best_beta_residual(alpha, s), s);

    let p_ab = p_ab_at(eta0, eta1, FRAC_PI_4);
    let p_ac = p_ac_at(FRAC_PI_4, FRAC_PI_4, s);
    if p_ab <= p_ac {
        return Ok(OptimalSetting {
            eta0,
            eta1,
            alpha: FRAC_PI_4,
            beta: FRAC_PI_4,
            p_equal: p_ab,
            branch: Branch::Unbiased,
        });
    }

    // gap(0) = (η₀ + η₁ − √(4 + S²))/8 ≤ 0, vanishing only for two sharp
    // measurements.
    let alpha = bisect(gap, 0.0, FRAC_PI_4, ALPHA_TOL);
    let beta = best_beta_residual(alpha, s);
    let p_equal = p_ab_at(eta0, eta1, alpha).min(p_ac_at(alpha, beta, s));
    Ok(OptimalSetting {
        eta0,
        eta1,
        alpha,
        beta,
        p_equal,
        branch: Branch::Optimized,
    })
}

/// Equal-sharpness interval on which unbiased settings give a double
/// violation: from `P_AB = 3/4` at `η = 1/√2` to `P_AC = 3/4`, the root of
/// `√2 (1 + √(1 − η²)) = 2`.
pub fn unbiased_violation_interval() -> (f64, f64) {
    let lower = std::f64::consts::FRAC_1_SQRT_2;
    let k = std::f64::consts::SQRT_2 - 1.0;
    (lower, (1.0 - k * k).sqrt())
}

/// Square grid over `[0, 1]²` in `(η₀, η₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GridSpec {
    pub resolution: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { resolution: 241 }
    }
}

impl GridSpec {
    pub fn new(resolution: usize) -> Result<Self> {
        if resolution < 2 {
            return Err(Error::Usage(format!(
                "grid resolution must be at least 2 per axis, got {resolution}"
            )));
        }
        Ok(Self { resolution })
    }

    pub fn axis(&self) -> Vec<f64> {
        linspace(0.0, 1.0, self.resolution)
    }
}

/// One evaluated grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegionPoint {
    pub setting: OptimalSetting,
    pub report: SuccessReport,
    pub violation: bool,
}

/// A boundary vertex with its position in `(η₀, η₁)`.
pub type Vertex = (f64, f64);

/// Outcome of a region scan. Points are stored row-major with `η₀` varying
/// fastest.
#[derive(Clone, Debug, Serialize)]
pub struct RegionScan {
    pub grid: GridSpec,
    pub axis: Vec<f64>,
    pub points: Vec<RegionPoint>,
    /// Polylines tracing `min(P_AB, P_AC) = 3/4`.
    pub boundary: Vec<Vec<Vertex>>,
}

impl RegionScan {
    pub fn point(&self, i0: usize, i1: usize) -> &RegionPoint {
        &self.points[i1 * self.grid.resolution + i0]
    }

    pub fn violation_count(&self) -> usize {
        self.points.iter().filter(|p| p.violation).count()
    }

    /// Fraction of the unit square inside the double-violation region.
    pub fn violation_fraction(&self) -> f64 {
        self.violation_count() as f64 / self.points.len() as f64
    }

    /// All boundary segments, each as an ordered pair of vertices.
    pub fn segments(&self) -> Vec<(Vertex, Vertex)> {
        self.boundary
            .iter()
            .flat_map(|line| line.windows(2).map(|w| (w[0], w[1])))
            .collect()
    }
}

/// Maximin success probability minus the classical bound.
fn margin(eta0: f64, eta1: f64) -> f64 {
    optimize(eta0, eta1)
        .map(|s| s.p_equal - CLASSICAL_BOUND)
        .unwrap_or(f64::NAN)
}

fn inside(value: f64) -> bool {
    value >= -VIOLATION_SLACK
}

/// Evaluates every grid point in parallel, then traces the boundary.
pub fn scan_region(grid: GridSpec) -> Result<RegionScan> {
    let grid = GridSpec::new(grid.resolution)?;
    let axis = grid.axis();
    let n = grid.resolution;
    let points = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (e0, e1) = (axis[k % n], axis[k / n]);
            let setting = optimize(e0, e1)?;
            Ok(RegionPoint {
                setting,
                report: setting.report(),
                violation: setting.violates(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = points
        .iter()
        .map(|p| p.setting.p_equal - CLASSICAL_BOUND)
        .collect();
    let boundary = trace_boundary(&axis, &values);
    Ok(RegionScan {
        grid,
        axis,
        points,
        boundary,
    })
}

/// Identifies a grid edge by its lower-left vertex and direction
/// (0 along `η₀`, 1 along `η₁`).
type EdgeKey = (usize, usize, u8);

/// Marching squares on the margin field. Crossings are refined by bisection
/// along the edge, always oriented from the lower to the higher index so the
/// result is exactly symmetric under swapping the axes. Saddle cells are
/// resolved by the margin at the cell centre.
fn trace_boundary(axis: &[f64], values: &[f64]) -> Vec<Vec<Vertex>> {
    let n = axis.len();
    let value = |i: usize, j: usize| values[j * n + i];
    let mut crossings: HashMap<EdgeKey, Vertex> = HashMap::new();
    let mut crossing = |key: EdgeKey| -> Vertex {
        *crossings.entry(key).or_insert_with(|| {
            let (i, j, dir) = key;
            let (lo, hi) = if dir == 0 {
                (axis[i], axis[i + 1])
            } else {
                (axis[j], axis[j + 1])
            };
            let at = |t: f64| {
                let m = if dir == 0 { margin(t, axis[j]) } else { margin(axis[i], t) };
                if inside(m) {
                    1.0
                } else {
                    -1.0
                }
            };
            let t = bisect(at, lo, hi, 1e-12);
            if dir == 0 {
                (t, axis[j])
            } else {
                (axis[i], t)
            }
        })
    };

    let mut segments: Vec<(EdgeKey, EdgeKey)> = Vec::new();
    for j in 0..n - 1 {
        for i in 0..n - 1 {
            // Corners counter-clockwise from the lower left.
            let c = [
                inside(value(i, j)),
                inside(value(i + 1, j)),
                inside(value(i + 1, j + 1)),
                inside(value(i, j + 1)),
            ];
            // Edge k joins corner k and corner k+1.
            let edges: [EdgeKey; 4] = [(i, j, 0), (i + 1, j, 1), (i, j + 1, 0), (i, j, 1)];
            let cut: Vec<usize> = (0..4).filter(|&k| c[k] != c[(k + 1) % 4]).collect();
            match cut.len() {
                2 => segments.push((edges[cut[0]], edges[cut[1]])),
                4 => {
                    let centre = inside(margin(
                        0.5 * (axis[i] + axis[i + 1]),
                        0.5 * (axis[j] + axis[j + 1]),
                    ));
                    // If the centre agrees with corner 0, corner 0's region
                    // connects through the cell and cuts off corners 1 and 3.
                    if centre == c[0] {
                        segments.push((edges[0], edges[1]));
                        segments.push((edges[2], edges[3]));
                    } else {
                        segments.push((edges[3], edges[0]));
                        segments.push((edges[1], edges[2]));
                    }
                }
                _ => {}
            }
        }
    }

    let polylines = chain(&segments);
    polylines
        .into_iter()
        .map(|line| line.into_iter().map(&mut crossing).collect())
        .collect()
}

/// Joins segments that share an edge into maximal polylines. Open chains
/// start at their lowest-keyed free end; closed loops repeat their first
/// vertex at the end.
fn chain(segments: &[(EdgeKey, EdgeKey)]) -> Vec<Vec<EdgeKey>> {
    let mut adjacent: HashMap<EdgeKey, Vec<usize>> = HashMap::new();
    for (s, &(a, b)) in segments.iter().enumerate() {
        adjacent.entry(a).or_default().push(s);
        adjacent.entry(b).or_default().push(s);
    }
    let mut used = vec![false; segments.len()];
    let mut starts: Vec<EdgeKey> = adjacent
        .iter()
        .filter(|(_, v)| v.len() == 1)
        .map(|(k, _)| *k)
        .collect();
    starts.sort_unstable();
    let mut loops: Vec<EdgeKey> = segments.iter().map(|s| s.0).collect();
    loops.sort_unstable();

    let walk = |start: EdgeKey, used: &mut Vec<bool>| -> Option<Vec<EdgeKey>> {
        let mut line = vec![start];
        let mut here = start;
        loop {
            let next = adjacent[&here].iter().copied().find(|&s| !used[s]);
            let Some(s) = next else { break };
            used[s] = true;
            let (a, b) = segments[s];
            here = if a == here { b } else { a };
            line.push(here);
        }
        (line.len() > 1).then_some(line)
    };

    let mut out = Vec::new();
    for start in starts.into_iter().chain(loops) {
        if let Some(line) = walk(start, &mut used) {
            out.push(line);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{p_ab_closed, p_ac_closed, sharpness_from_theta};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn deg(d: f64) -> f64 {
        d.to_radians()
    }

    #[test]
    fn best_beta_examples() {
        for eta in [0.0, 0.3, 1.0] {
            assert!((best_beta(FRAC_PI_4, eta, 0.5) - FRAC_PI_4).abs() < 1e-15);
        }
        assert_eq!(best_beta(0.0, 1.0, 1.0), 0.0);
        // The printed 0.990 is rounded; the table angles belong to cos 8°.
        let eta = sharpness_from_theta(deg(2.0));
        let b = best_beta(deg(1.12), eta, eta);
        assert!((b.to_degrees() - 7.94).abs() < 0.01, "{}", b.to_degrees());
    }

    #[test]
    fn best_beta_beats_a_fine_scan() {
        for &(alpha, e0, e1) in &[(0.1, 0.9, 0.95), (0.5, 0.2, 0.99), (0.7, 0.707, 0.5), (0.0, 0.6, 0.6)] {
            let s = residual(e0, e1);
            let star = p_ac_at(alpha, best_beta(alpha, e0, e1), s);
            let steps = 785_398;
            let scan = (0..=steps)
                .map(|k| p_ac_at(alpha, k as f64 * 1e-6, s))
                .fold(f64::MIN, f64::max);
            assert!(star >= scan - 1e-12);
            assert!(star - scan < 1e-6);
        }
    }

    #[test]
    fn optimize_examples() {
        let cases = [
            (1.0, sharpness_from_theta(deg(5.0)), 2.62, 9.82),
            (FRAC_1_SQRT_2, sharpness_from_theta(deg(6.0)), 30.80, 37.29),
            (sharpness_from_theta(deg(8.0)), sharpness_from_theta(deg(8.0)), 22.40, 32.70),
        ];
        for (e0, e1, a, b) in cases {
            let s = optimize(e0, e1).unwrap();
            assert_eq!(s.branch, Branch::Optimized);
            assert!((s.alpha_deg() - a).abs() < 0.1, "α {} vs {a}", s.alpha_deg());
            assert!((s.beta_deg() - b).abs() < 0.1, "β {} vs {b}", s.beta_deg());
            let p = s.params();
            assert!((p_ab_closed(&p) - p_ac_closed(&p)).abs() < 1e-8);
        }
    }

    #[test]
    fn degenerate_cases() {
        let s = optimize(0.0, 0.0).unwrap();
        assert_eq!(s.branch, Branch::Unbiased);
        assert_eq!((s.alpha, s.beta), (FRAC_PI_4, FRAC_PI_4));

        let s = optimize(1.0, 1.0).unwrap();
        assert_eq!(s.branch, Branch::Optimized);
        assert_eq!((s.alpha, s.beta), (0.0, 0.0));
        assert!((s.p_equal - 0.75).abs() < 1e-15);

        assert!(optimize(1.2, 0.0).is_err());
    }

    #[test]
    fn corners_of_the_region() {
        let s = optimize(FRAC_1_SQRT_2, FRAC_1_SQRT_2).unwrap();
        assert_eq!(s.branch, Branch::Unbiased);
        assert!((s.p_equal - 0.75).abs() < 1e-10);

        let s = optimize(0.99, 0.99).unwrap();
        let r = s.report();
        assert!(r.p_ab > 0.75 && r.p_ac > 0.75);
        assert!((r.p_ab - 0.7523).abs() < 1e-3);

        assert!(!optimize(0.5, 0.5).unwrap().violates());
    }

    #[test]
    fn unbiased_interval_endpoints() {
        let (lo, hi) = unbiased_violation_interval();
        let p = |eta: f64| ProtocolParams::unbiased(eta, eta).unwrap();
        assert!((p_ab_closed(&p(lo)) - 0.75).abs() < 1e-12);
        assert!((p_ac_closed(&p(hi)) - 0.75).abs() < 1e-12);
        let root = bisect(
            |eta| std::f64::consts::SQRT_2 * (1.0 + (1.0 - eta * eta).sqrt()) - 2.0,
            0.8,
            1.0,
            1e-15,
        );
        assert!((hi - root).abs() < 1e-10);
        assert!((hi - 0.91018).abs() < 1e-5);
    }

    #[test]
    fn small_scan_is_symmetric_and_flags_match() {
        let scan = scan_region(GridSpec::new(21).unwrap()).unwrap();
        let n = scan.grid.resolution;
        for i in 0..n {
            for j in 0..n {
                let a = scan.point(i, j);
                let b = scan.point(j, i);
                assert_eq!(a.setting.p_equal.to_bits(), b.setting.p_equal.to_bits());
                assert_eq!(a.violation, a.report.min_decoder() >= 0.75 - 1e-12);
            }
        }
        assert!(!scan.boundary.is_empty());
        let mut segs: Vec<_> = scan
            .segments()
            .into_iter()
            .map(|(a, b)| canonical(a, b))
            .collect();
        let mut mirrored: Vec<_> = scan
            .segments()
            .into_iter()
            .map(|(a, b)| canonical((a.1, a.0), (b.1, b.0)))
            .collect();
        segs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        mirrored.sort_by(|x, y| x.partial_cmp(y).unwrap());
        assert_eq!(segs, mirrored);
    }

    fn canonical(a: Vertex, b: Vertex) -> (Vertex, Vertex) {
        if a <= b {
            (a, b)
        } else {
            (b, a)
        }
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(1).is_err());
        assert_eq!(GridSpec::default().resolution, 241);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn optimum_is_locally_maximin(e0 in 0.0f64..=1.0, e1 in 0.0f64..=1.0) {
            let s = optimize(e0, e1).unwrap();
            let value = |alpha: f64| {
                let alpha = alpha.clamp(0.0, FRAC_PI_4);
                p_ab_at(e0, e1, alpha).min(max_p_ac(alpha, e0, e1))
            };
            let here = value(s.alpha);
            prop_assert!(value(s.alpha + 1e-4) <= here + 1e-8);
            prop_assert!(value(s.alpha - 1e-4) <= here + 1e-8);
            if s.branch == Branch::Optimized {
                let p = s.params();
                prop_assert!((p_ab_closed(&p) - p_ac_closed(&p)).abs() <= 1e-8);
            }
        }

        #[test]
        fn optimize_is_symmetric(e0 in 0.0f64..=1.0, e1 in 0.0f64..=1.0) {
            let a = optimize(e0, e1).unwrap();
            let b = optimize(e1, e0).unwrap();
            prop_assert_eq!(a.alpha.to_bits(), b.alpha.to_bits());
            prop_assert_eq!(a.beta.to_bits(), b.beta.to_bits());
        }
    }
}
