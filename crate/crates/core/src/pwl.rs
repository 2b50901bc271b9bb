//! Piecewise-linear convex functions on a knot representation.
//!
//! These carry the atomic part of the derivative measure dM': every jump of
//! the slope at a knot is a point mass, which is exactly what the inversion
//! needs for discrete distributions, and what the discrete sequence
//! construction produces.
//!
//! Wire format (used by the CLI and golden tests):
//! `{"knots": [[t, v], ...], "final_slope": s | "inf"}`.

use crate::error::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Slope beyond the last knot. `Infinite` encodes a function that jumps to
/// +inf past its last knot; such functions arise as conjugates of functions
/// with bounded slope.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FinalSlope {
    Finite(f64),
    Infinite,
}

/// A convex, nondecreasing piecewise-linear function through (0, 0).
///
/// Knot abscissae are strictly increasing, stored values are reproduced
/// exactly on evaluation, and segment slopes are nondecreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
    final_slope: FinalSlope,
}

// Slack for slope comparisons: values computed from divisions may make two
// mathematically equal slopes differ by a few ulps.
const SLOPE_SLACK: f64 = 1e-12;

impl PiecewiseLinear {
    pub fn new(knots: Vec<(f64, f64)>, final_slope: FinalSlope) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::NonConvex("no knots".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(Error::NonConvex(format!(
                "first knot must be (0, 0), got ({}, {})",
                knots[0].0, knots[0].1
            )));
        }
        let mut prev_slope = 0.0_f64;
        for w in knots.windows(2) {
            let [(t0, v0), (t1, v1)] = [w[0], w[1]];
            if !t1.is_finite() || !v1.is_finite() {
                return Err(Error::NonConvex("non-finite knot".into()));
            }
            if t1 <= t0 {
                return Err(Error::NonConvex(format!(
                    "knot abscissae must be strictly increasing ({t0} then {t1})"
                )));
            }
            let slope = (v1 - v0) / (t1 - t0);
            if slope < 0.0 {
                return Err(Error::NonConvex(format!("decreasing value at t = {t1}")));
            }
            let scale = slope.abs().max(prev_slope.abs()).max(1.0);
            if slope < prev_slope - SLOPE_SLACK * scale {
                return Err(Error::NonConvex(format!(
                    "slope decreases from {prev_slope} to {slope} at t = {t1}"
                )));
            }
            prev_slope = slope;
        }
        if let FinalSlope::Finite(s) = final_slope {
            if !s.is_finite() || s < 0.0 {
                return Err(Error::NonConvex(format!("invalid final slope {s}")));
            }
            let scale = s.abs().max(prev_slope.abs()).max(1.0);
            if s < prev_slope - SLOPE_SLACK * scale {
                return Err(Error::NonConvex(format!(
                    "final slope {s} is below the last segment slope {prev_slope}"
                )));
            }
        }
        Ok(Self { knots, final_slope })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn final_slope(&self) -> FinalSlope {
        self.final_slope
    }

    fn last(&self) -> (f64, f64) {
        *self.knots.last().expect("knots nonempty")
    }

    /// Function value; stored knot values are returned exactly.
    pub fn value(&self, t: f64) -> f64 {
        match self.knots.binary_search_by(|k| k.0.total_cmp(&t)) {
            Ok(j) => self.knots[j].1,
            Err(j) if j == self.knots.len() => {
                let (tm, vm) = self.last();
                match self.final_slope {
                    FinalSlope::Finite(s) => vm + s * (t - tm),
                    FinalSlope::Infinite => f64::INFINITY,
                }
            }
            Err(0) => f64::NAN, // t < 0: outside the domain
            Err(j) => {
                let (t0, v0) = self.knots[j - 1];
                v0 + self.segment_slope(j) * (t - t0)
            }
        }
    }

    /// Slope of segment j (between knots j-1 and j).
    fn segment_slope(&self, j: usize) -> f64 {
        let (t0, v0) = self.knots[j - 1];
        let (t1, v1) = self.knots[j];
        (v1 - v0) / (t1 - t0)
    }

    /// Right-hand derivative at `t`.
    pub fn right_slope(&self, t: f64) -> f64 {
        let m = self.knots.len() - 1;
        match self.knots.binary_search_by(|k| k.0.total_cmp(&t)) {
            Ok(j) | Err(j) if j >= m + 1 => match self.final_slope {
                FinalSlope::Finite(s) => s,
                FinalSlope::Infinite => f64::INFINITY,
            },
            Ok(j) if j == m => match self.final_slope {
                FinalSlope::Finite(s) => s,
                FinalSlope::Infinite => f64::INFINITY,
            },
            Ok(j) => self.segment_slope(j + 1),
            Err(0) => f64::NAN,
            Err(j) => self.segment_slope(j),
        }
    }

    /// The jumps of the derivative: pairs (location, jump size), including a
    /// jump at 0 when the first segment has positive slope. These are the
    /// atoms of dM'. An infinite final slope is not included; callers check
    /// [`Self::final_slope`].
    pub fn slope_jumps(&self) -> Vec<(f64, f64)> {
        let mut jumps = Vec::new();
        let mut prev = 0.0_f64;
        let m = self.knots.len() - 1;
        for j in 1..=m {
            let s = self.segment_slope(j);
            if s > prev {
                jumps.push((self.knots[j - 1].0, s - prev));
            }
            prev = s;
        }
        if let FinalSlope::Finite(s) = self.final_slope {
            if s > prev {
                jumps.push((self.last().0, s - prev));
            }
        }
        jumps
    }

    /// True if the function vanishes on an initial interval of positive
    /// length (the degenerate case).
    pub fn is_degenerate(&self) -> bool {
        if self.knots.len() >= 2 {
            self.knots[1].1 == 0.0
        } else {
            matches!(self.final_slope, FinalSlope::Finite(s) if s == 0.0)
        }
    }

    /// Cut the function at the leftmost point where it reaches 1 and extend
    /// linearly with the slope it has there.
    pub fn truncate_at_one(&self) -> Result<(Self, f64)> {
        let (tm, vm) = self.last();
        let point = if vm >= 1.0 {
            // inside the knot range: find the segment crossing value 1
            let j = self
                .knots
                .iter()
                .position(|&(_, v)| v >= 1.0)
                .expect("some value >= 1");
            let (t1, v1) = self.knots[j];
            if v1 == 1.0 {
                t1
            } else {
                let (t0, v0) = self.knots[j - 1];
                t0 + (1.0 - v0) / ((v1 - v0) / (t1 - t0))
            }
        } else {
            match self.final_slope {
                FinalSlope::Finite(s) if s > 0.0 => tm + (1.0 - vm) / s,
                _ => {
                    return Err(Error::OutOfRange {
                        value: 1.0,
                        context: "function never reaches 1".into(),
                    })
                }
            }
        };
        let slope = self.right_slope(point);
        if !slope.is_finite() {
            return Err(Error::OutOfRange {
                value: 1.0,
                context: "function jumps over 1".into(),
            });
        }
        let mut knots: Vec<(f64, f64)> = self
            .knots
            .iter()
            .copied()
            .take_while(|&(t, _)| t < point)
            .collect();
        knots.push((point, 1.0));
        let truncated = Self::new(knots, FinalSlope::Finite(slope))?;
        Ok((truncated, point))
    }

    /// Legendre conjugate, computed knot-exactly: segment slopes become the
    /// conjugate's knot abscissae and knot abscissae become its slopes.
    pub fn conjugate(&self) -> Self {
        let m = self.knots.len() - 1;
        let mut dual: Vec<(f64, f64)> = vec![(0.0, 0.0)];
        for j in 1..=m {
            let s = self.segment_slope(j);
            let (t0, v0) = self.knots[j - 1];
            if s > dual.last().unwrap().0 {
                dual.push((s, s * t0 - v0));
            }
        }
        let (tm, vm) = self.last();
        let dual_final = match self.final_slope {
            FinalSlope::Finite(s) => {
                if s > dual.last().unwrap().0 {
                    dual.push((s, s * tm - vm));
                }
                // beyond the largest slope the supremum is infinite
                FinalSlope::Infinite
            }
            // the primal jumps to +inf past tm, so the conjugate grows with
            // slope tm forever
            FinalSlope::Infinite => FinalSlope::Finite(tm),
        };
        Self::new(dual, dual_final).expect("conjugate of a convex pwl is a convex pwl")
    }
}

impl Serialize for PiecewiseLinear {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            knots: &'a [(f64, f64)],
            final_slope: WireSlope,
        }
        #[derive(Serialize)]
        #[serde(untagged)]
        enum WireSlope {
            Finite(f64),
            Tag(&'static str),
        }
        let final_slope = match self.final_slope {
            FinalSlope::Finite(s) => WireSlope::Finite(s),
            FinalSlope::Infinite => WireSlope::Tag("inf"),
        };
        Wire {
            knots: &self.knots,
            final_slope,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PiecewiseLinear {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Wire {
            knots: Vec<(f64, f64)>,
            final_slope: WireSlope,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum WireSlope {
            Finite(f64),
            Tag(String),
        }
        let wire = Wire::deserialize(deserializer)?;
        let final_slope = match wire.final_slope {
            WireSlope::Finite(s) => FinalSlope::Finite(s),
            WireSlope::Tag(tag) if tag == "inf" => FinalSlope::Infinite,
            WireSlope::Tag(tag) => {
                return Err(D::Error::custom(format!(
                    "final_slope must be a number or \"inf\", got {tag:?}"
                )))
            }
        };
        PiecewiseLinear::new(wire.knots, final_slope).map_err(D::Error::custom)
    }
}
