//! Bracketing, bisection continuation, and search outcomes.

use std::collections::BTreeMap;

use crate::error::{Error, Result, SweepSample};
use crate::geometry::Point;
use crate::ode::Trajectory;

/// Symmetry line used to close a searched profile by reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymmetryAxis {
    /// u -> -u (the r-axis of the half-plane).
    VerticalAxis,
    /// (u, v) -> (v, u) (the diagonal of the quadrant).
    Diagonal,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    ImmersedSphere,
    EmbeddedTorus,
    ImmersedTorus,
    Unclassified,
}

/// Outcome of a bisection/continuation search: parameter value, certified
/// closure residuals, emitted profile.
#[derive(Debug, Clone)]
pub struct SearchResult {
    pub parameter: f64,
    pub bracket: (f64, f64),
    /// Named closure defects (orthogonality at axis hits, crossing-angle
    /// defects, endpoint gaps). Deterministically ordered.
    pub residuals: BTreeMap<String, f64>,
    /// The trajectory behind the profile, when the search shot one.
    pub trajectory: Option<Trajectory>,
    /// Closed (or axis-to-axis) polyline of the emitted profile.
    pub profile: Vec<Point>,
    pub classification: Classification,
    pub symmetry: SymmetryAxis,
}

/// Number of worker threads for parameter sweeps: SHRINKER_LAB_THREADS,
/// defaulting to the machine parallelism capped at 8.
fn sweep_threads() -> usize {
    std::env::var("SHRINKER_LAB_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get().min(8))
                .unwrap_or(1)
        })
}

/// Index-preserving parallel map; the output order never depends on thread
/// scheduling.
pub fn parallel_map<T, F>(inputs: &[f64], f: F) -> Vec<T>
where
    T: Send,
    F: Fn(f64) -> T + Sync,
{
    let threads = sweep_threads().min(inputs.len().max(1));
    if threads <= 1 || inputs.len() < 4 {
        return inputs.iter().map(|&t| f(t)).collect();
    }
    let mut out: Vec<Option<T>> = Vec::with_capacity(inputs.len());
    out.resize_with(inputs.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let out_cells: Vec<std::sync::Mutex<&mut Option<T>>> =
        out.iter_mut().map(std::sync::Mutex::new).collect();
    std::thread::scope(|scope| {
        for _ in 0..threads {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                if i >= inputs.len() {
                    break;
                }
                let value = f(inputs[i]);
                **out_cells[i].lock().unwrap() = Some(value);
            });
        }
    });
    drop(out_cells);
    out.into_iter().map(|v| v.unwrap()).collect()
}

/// Evaluates `f` on a uniform grid of `n` points over [lo, hi] inclusive.
pub fn sweep<F>(lo: f64, hi: f64, n: usize, f: F) -> Vec<SweepSample>
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    let n = n.max(2);
    let ts: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    let values = parallel_map(&ts, |t| f(t));
    ts.into_iter()
        .zip(values)
        .map(|(t, value)| SweepSample { t, value })
        .collect()
}

/// First adjacent pair of defined samples with a strict sign change.
pub fn bracket_from_sweep(samples: &[SweepSample]) -> Option<(f64, f64)> {
    for w in samples.windows(2) {
        if let (Some(a), Some(b)) = (w[0].value, w[1].value) {
            if a == 0.0 {
                return Some((w[0].t, w[1].t));
            }
            if a * b < 0.0 {
                return Some((w[0].t, w[1].t));
            }
        }
    }
    None
}

/// Bisection on a continuous functional with a sign change over [lo, hi].
/// Returns the midpoint and final bracket once the width is below `tol`.
/// Samples where the functional is undefined tighten toward `hi`'s side.
pub fn bisect_value<F>(mut lo: f64, mut hi: f64, tol: f64, f: F) -> Result<(f64, (f64, f64))>
where
    F: Fn(f64) -> Option<f64>,
{
    let f_lo = f(lo).ok_or_else(|| Error::Input("functional undefined at bracket start".into()))?;
    if f_lo == 0.0 {
        return Ok((lo, (lo, lo)));
    }
    let f_hi = f(hi).ok_or_else(|| Error::Input("functional undefined at bracket end".into()))?;
    if f_lo * f_hi > 0.0 {
        return Err(Error::Input(format!(
            "no sign change over bracket: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
        )));
    }
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        match f(mid) {
            Some(0.0) => return Ok((mid, (mid, mid))),
            Some(fm) => {
                if f_lo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            // Undefined in the middle: shrink toward the defined-low side.
            None => hi = mid,
        }
    }
    Ok((0.5 * (lo + hi), (lo, hi)))
}

/// Bisection on a boolean predicate that is true at `lo` and false at `hi`.
pub fn bisect_predicate<F>(mut lo: f64, mut hi: f64, tol: f64, pred: F) -> (f64, (f64, f64))
where
    F: Fn(f64) -> bool,
{
    for _ in 0..200 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if pred(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (0.5 * (lo + hi), (lo, hi))
}

/// Checks that the functional changes sign exactly once across `k` interior
/// samples of the bracket: guards against even-multiplicity roots and event
/// mislabeling.
pub fn single_sign_change<F>(lo: f64, hi: f64, k: usize, f: F) -> bool
where
    F: Fn(f64) -> Option<f64> + Sync,
{
    let samples = sweep(lo, hi, k, f);
    let signs: Vec<f64> = samples.iter().filter_map(|s| s.value).collect();
    if signs.len() < 2 {
        return false;
    }
    let mut changes = 0;
    for w in signs.windows(2) {
        if w[0] * w[1] < 0.0 {
            changes += 1;
        }
    }
    changes == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_value_finds_root() {
        let f = |x: f64| Some(x * x - 2.0);
        let (root, bracket) = bisect_value(0.0, 2.0, 1e-12, f).unwrap();
        assert!((root - 2.0f64.sqrt()).abs() < 1e-11);
        assert!(bracket.1 - bracket.0 <= 1e-12);
    }

    #[test]
    fn bisect_predicate_boundary() {
        let (p, _) = bisect_predicate(0.0, 1.0, 1e-12, |x| x < 0.37);
        assert!((p - 0.37).abs() < 1e-11);
    }

    #[test]
    fn sweep_and_bracket() {
        let s = sweep(0.0, 3.0, 31, |t| {
            if t < 0.5 {
                None
            } else {
                Some((t - 1.65).sin())
            }
        });
        assert_eq!(s.len(), 31);
        let (lo, hi) = bracket_from_sweep(&s).unwrap();
        assert!(lo < 1.65 && 1.65 < hi, "({lo}, {hi})");
    }

    #[test]
    fn single_sign_change_detects_double_roots() {
        assert!(single_sign_change(0.0, 3.0, 16, |t| Some(t - 1.5)));
        assert!(!single_sign_change(-2.0, 2.0, 16, |t| Some(t * t - 1.0)));
    }

    #[test]
    fn parallel_map_is_order_preserving() {
        let inputs: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let out = parallel_map(&inputs, |t| t * 2.0);
        for (i, v) in out.iter().enumerate() {
            assert_eq!(*v, 2.0 * i as f64);
        }
    }
}
