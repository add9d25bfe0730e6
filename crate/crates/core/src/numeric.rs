/// Bisection for a root of `f` on `[lo, hi]`, assuming `f(lo)` and `f(hi)`
/// have opposite signs (or one of them is zero). Stops once the bracket is
/// narrower than `tol`, returning its midpoint.
pub(crate) fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return lo;
    }
    if f(hi) == 0.0 {
        return hi;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `count` evenly spaced points from `start` to `stop` inclusive.
pub(crate) fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..count)
            .map(|i| {
                if i + 1 == count {
                    stop
                } else {
                    start + (stop - start) * i as f64 / (count - 1) as f64
                }
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14);
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-13);
    }

    #[test]
    fn bisect_handles_decreasing_functions() {
        let r = bisect(|x| 1.0 - x, 0.0, 3.0, 1e-12);
        assert!((r - 1.0).abs() < 1e-11);
    }

    #[test]
    fn linspace_hits_both_ends() {
        let v = linspace(0.0, 1.0, 241);
        assert_eq!(v.len(), 241);
        assert_eq!(v[0], 0.0);
        assert_eq!(v[240], 1.0);
        assert_eq!(v[120], 0.5);
        assert_eq!(linspace(3.0, 4.0, 1), vec![3.0]);
    }
}
