//! Iteration traces and convergence-order estimation.
//!
//! A sequence converges with order `p` and rate `θ` when
//! `e_{i+1} ≤ θ·e_i^p` eventually. [`estimate_order`] fits `(p, θ)` by
//! ordinary least squares on `ln e_{i+1} = ln θ + p·ln e_i` over a window of a
//! strictly decreasing error sequence. Entries at or below the stagnation floor
//! (`100·ε`) are round-off plateau and are cut from the window before fitting.

use std::ops::Range;

use thiserror::Error;

use crate::Scalar;

/// One row of an [`IterationTrace`].
#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord<T> {
    pub index: usize,
    /// Objective value at the iterate.
    pub value: T,
    /// Riemannian gradient norm at the iterate.
    pub grad_norm: T,
    /// Problem-specific distance-to-optimum proxy.
    pub error: T,
    /// Step length taken from this iterate (zero on the final record).
    pub step: T,
}

/// Per-iteration history of a solver run. Indices are `0, 1, 2, …`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IterationTrace<T> {
    records: Vec<IterationRecord<T>>,
}

impl<T: Scalar> IterationTrace<T> {
    pub fn new() -> Self {
        Self {
            records: Vec::new(),
        }
    }

    /// Appends a record with the next index.
    ///
    /// Panics if `error` is negative or NaN.
    pub fn record(&mut self, value: T, grad_norm: T, error: T, step: T) {
        assert!(error >= T::zero(), "error metric must be nonnegative, got {error}");
        self.records.push(IterationRecord {
            index: self.records.len(),
            value,
            grad_norm,
            error,
            step,
        });
    }

    /// Sets the step length of the most recent record.
    pub fn set_last_step(&mut self, step: T) {
        if let Some(last) = self.records.last_mut() {
            last.step = step;
        }
    }

    /// Rebuilds a trace from records, checking the index invariant.
    pub fn from_records(records: Vec<IterationRecord<T>>) -> Result<Self, TraceError> {
        for (i, r) in records.iter().enumerate() {
            if r.index != i {
                return Err(TraceError::BadIndex {
                    position: i,
                    index: r.index,
                });
            }
            if !(r.error >= T::zero()) {
                return Err(TraceError::NegativeError { index: i });
            }
        }
        Ok(Self { records })
    }

    pub fn records(&self) -> &[IterationRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn last(&self) -> Option<&IterationRecord<T>> {
        self.records.last()
    }

    /// Number of steps taken (records minus the initial point).
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn errors(&self) -> Vec<T> {
        self.records.iter().map(|r| r.error).collect()
    }

    pub fn values(&self) -> Vec<T> {
        self.records.iter().map(|r| r.value).collect()
    }

    /// Index of the first record whose error is strictly below `threshold`.
    pub fn first_below(&self, threshold: T) -> Option<usize> {
        self.records.iter().position(|r| r.error < threshold)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TraceError {
    #[error("record at position {position} carries index {index}")]
    BadIndex { position: usize, index: usize },
    #[error("record {index} has a negative or NaN error")]
    NegativeError { index: usize },
}

/// Fitted order `p` and rate `θ` of `e_{i+1} ≈ θ·e_i^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<T> {
    pub order: T,
    pub rate: T,
    /// Root-mean-square residual of the fit in log space.
    pub residual: T,
    /// Indices into the error sequence actually used.
    pub window: Range<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("need at least 3 usable entries, got {found}")]
    TooFewPoints { found: usize },
    #[error("sequence is not strictly decreasing at index {index}")]
    NonDecreasingSequence { index: usize },
    #[error("every entry in the window is at or below the stagnation floor")]
    AllBelowFloor,
    #[error("window {start}..{end} is out of bounds for {len} entries")]
    WindowOutOfBounds { start: usize, end: usize, len: usize },
}

/// Stagnation floor `100·ε`.
pub fn stagnation_floor<T: Scalar>() -> T {
    T::eps() * T::lit(100.0)
}

/// Fits `(p, θ)` to `errors[window]`.
///
/// The window is truncated at the first entry at or below the stagnation
/// floor; at least three entries must remain and they must be strictly
/// decreasing.
pub fn estimate_order<T: Scalar>(
    errors: &[T],
    window: Range<usize>,
) -> Result<ConvergenceReport<T>, OrderError> {
    if window.start > window.end || window.end > errors.len() {
        return Err(OrderError::WindowOutOfBounds {
            start: window.start,
            end: window.end,
            len: errors.len(),
        });
    }
    let floor = stagnation_floor::<T>();
    let mut end = window.start;
    while end < window.end && errors[end] > floor {
        end += 1;
    }
    if end == window.start && window.end > window.start {
        return Err(OrderError::AllBelowFloor);
    }
    let used = window.start..end;
    if used.len() < 3 {
        return Err(OrderError::TooFewPoints { found: used.len() });
    }
    for i in used.start + 1..used.end {
        if !(errors[i] < errors[i - 1]) {
            return Err(OrderError::NonDecreasingSequence { index: i });
        }
    }
    let pairs: Vec<(T, T)> = (used.start..used.end - 1)
        .map(|i| (errors[i], errors[i + 1]))
        .collect();
    let (order, rate, residual) = least_squares_log(&pairs);
    Ok(ConvergenceReport {
        order,
        rate,
        residual,
        window: used,
    })
}

/// Fits `(p, θ)` to independent one-step measurements `(e, e_next)`.
///
/// Useful when a method reaches round-off in fewer steps than a single
/// sequence needs for a fit: each pair comes from one step taken from a
/// separate starting error.
pub fn fit_order_pairs<T: Scalar>(pairs: &[(T, T)]) -> Result<ConvergenceReport<T>, OrderError> {
    let floor = stagnation_floor::<T>();
    let usable: Vec<(T, T)> = pairs
        .iter()
        .copied()
        .filter(|&(e, n)| e > floor && n > floor)
        .collect();
    if usable.is_empty() && !pairs.is_empty() {
        return Err(OrderError::AllBelowFloor);
    }
    if usable.len() < 2 {
        return Err(OrderError::TooFewPoints {
            found: usable.len(),
        });
    }
    let first = usable[0].0;
    if usable.iter().all(|&(e, _)| e == first) {
        return Err(OrderError::TooFewPoints { found: 1 });
    }
    let (order, rate, residual) = least_squares_log(&usable);
    Ok(ConvergenceReport {
        order,
        rate,
        residual,
        window: 0..pairs.len(),
    })
}

/// The longest strictly decreasing run that ends just before the sequence
/// first reaches the stagnation floor.
pub fn pre_stagnation_window<T: Scalar>(errors: &[T]) -> Range<usize> {
    let floor = stagnation_floor::<T>();
    let end = errors
        .iter()
        .position(|&e| !(e > floor))
        .unwrap_or(errors.len());
    if end == 0 {
        return 0..0;
    }
    let mut start = end - 1;
    while start > 0 && errors[start - 1] > errors[start] {
        start -= 1;
    }
    start..end
}

fn least_squares_log<T: Scalar>(pairs: &[(T, T)]) -> (T, T, T) {
    let n = T::from_usize_lossy(pairs.len());
    let xs: Vec<T> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<T> = pairs.iter().map(|p| p.1.ln()).collect();
    let mean_x = xs.iter().fold(T::zero(), |a, &v| a + v) / n;
    let mean_y = ys.iter().fold(T::zero(), |a, &v| a + v) / n;
    let mut sxx = T::zero();
    let mut sxy = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let order = sxy / sxx;
    let log_rate = mean_y - order * mean_x;
    let mut ss = T::zero();
    for (&x, &y) in xs.iter().zip(&ys) {
        let r = y - log_rate - order * x;
        ss += r * r;
    }
    (order, log_rate.exp(), (ss / n).sqrt())
}
