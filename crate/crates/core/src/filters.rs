//! Low-pass filters and the derived band-pass masks.
//!
//! A filter `h` is an even function with `h(t) = 1` on `[0, 1/2]` and
//! `h(t) = 0` for `|t| >= 1`. Every localized kernel in the crate is a
//! spectral sum weighted by `h(lambda / n)`, so the filter is the single knob
//! that controls how fast a kernel decays away from the diagonal.
//!
//! From `h` we derive
//!
//! * `g(t) = h(t) - h(2t)`, the dyadic band-pass mask,
//! * `g*(t) = sqrt(g(t))`,
//! * `g~(t) = h(t/2) - h(4t)`, which equals one on the support of `g`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the transition band of a filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FilterKind {
    /// Indicator of `|t| < 1`; realizes the reproducing (Dirichlet-type) kernel.
    Sharp,
    /// `1 - s(2t - 1)` on `(1/2, 1)` with the quintic smoothstep `s`.
    Quintic,
    /// C-infinity blend on `(1/2, 1)` built from `exp(-1/x)`.
    SmoothBump,
}

/// Which derived mask to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mask {
    G,
    GStar,
    GTilde,
}

/// An immutable low-pass filter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "FilterRepr")]
pub struct FilterSpec {
    pub kind: FilterKind,
    pub description: String,
}

/// Serialized form; the description is regenerated from the kind.
#[derive(Deserialize)]
struct FilterRepr {
    kind: FilterKind,
}

impl From<FilterRepr> for FilterSpec {
    fn from(r: FilterRepr) -> Self {
        FilterSpec::new(r.kind)
    }
}

impl FilterSpec {
    pub fn new(kind: FilterKind) -> Self {
        let description = match kind {
            FilterKind::Sharp => "sharp cutoff at |t| = 1",
            FilterKind::Quintic => "quintic smoothstep transition on (1/2, 1)",
            FilterKind::SmoothBump => "C-infinity exponential blend on (1/2, 1)",
        };
        Self {
            kind,
            description: description.to_string(),
        }
    }

    pub fn sharp() -> Self {
        Self::new(FilterKind::Sharp)
    }

    pub fn quintic() -> Self {
        Self::new(FilterKind::Quintic)
    }

    pub fn smooth_bump() -> Self {
        Self::new(FilterKind::SmoothBump)
    }

    pub fn is_smooth(&self) -> bool {
        self.kind != FilterKind::Sharp
    }

    /// Evaluates `h(|t|)`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.abs();
        match self.kind {
            FilterKind::Sharp => {
                if t < 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FilterKind::Quintic => {
                if t <= 0.5 {
                    1.0
                } else if t >= 1.0 {
                    0.0
                } else {
                    let u = 2.0 * t - 1.0;
                    1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
                }
            }
            FilterKind::SmoothBump => {
                if t <= 0.5 {
                    1.0
                } else if t >= 1.0 {
                    0.0
                } else {
                    let u = 2.0 * t - 1.0;
                    let left = bump_factor(1.0 - u);
                    let right = bump_factor(u);
                    left / (left + right)
                }
            }
        }
    }

    /// Evaluates one of the derived masks `g`, `g*` or `g~` at `t`.
    pub fn mask(&self, which: Mask, t: f64) -> Result<f64> {
        if !self.is_smooth() {
            return Err(Error::SharpFilterMask("sharp"));
        }
        let g = |t: f64| self.eval(t) - self.eval(2.0 * t);
        Ok(match which {
            Mask::G => g(t),
            // rounding can push g a hair below zero where both terms are equal
            Mask::GStar => g(t).max(0.0).sqrt(),
            Mask::GTilde => self.eval(t / 2.0) - self.eval(4.0 * t),
        })
    }
}

impl Default for FilterSpec {
    fn default() -> Self {
        Self::quintic()
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FilterKind::Sharp => "sharp",
            FilterKind::Quintic => "quintic",
            FilterKind::SmoothBump => "bump",
        })
    }
}

impl FromStr for FilterKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sharp" => Ok(FilterKind::Sharp),
            "quintic" => Ok(FilterKind::Quintic),
            "bump" | "smooth_bump" => Ok(FilterKind::SmoothBump),
            other => Err(Error::InvalidParameter {
                name: "filter",
                reason: format!("unknown filter kind `{other}` (expected sharp|quintic|bump)"),
            }),
        }
    }
}

fn bump_factor(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quintic_values() {
        let h = FilterSpec::quintic();
        assert_eq!(h.eval(0.3), 1.0);
        assert_eq!(h.eval(2.0), 0.0);
        assert!((h.eval(0.75) - 0.5).abs() < 1e-15);
        assert_eq!(h.eval(-0.3), h.eval(0.3));
    }

    #[test]
    fn sharp_values() {
        let h = FilterSpec::sharp();
        assert_eq!(h.eval(0.99), 1.0);
        assert_eq!(h.eval(1.0), 0.0);
        assert_eq!(h.eval(-0.2), 1.0);
    }

    #[test]
    fn mask_values() {
        let h = FilterSpec::quintic();
        assert_eq!(h.mask(Mask::G, 0.2).unwrap(), 0.0);
        assert_eq!(h.mask(Mask::GTilde, 0.5).unwrap(), 1.0);
        assert!((h.mask(Mask::G, 0.75).unwrap() - 0.5).abs() < 1e-15);
        assert!((h.mask(Mask::GStar, 0.75).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sharp_has_no_masks() {
        let err = FilterSpec::sharp().mask(Mask::G, 0.5).unwrap_err();
        assert!(matches!(err, Error::SharpFilterMask(_)));
    }

    #[test]
    fn bump_shape() {
        let h = FilterSpec::smooth_bump();
        assert_eq!(h.eval(0.5), 1.0);
        assert_eq!(h.eval(1.0), 0.0);
        assert!((h.eval(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=1000 {
            let v = h.eval(0.5 + 0.5 * i as f64 / 1000.0);
            assert!(v <= prev + 1e-15 && (0.0..=1.0).contains(&v));
            prev = v;
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("bump".parse::<FilterKind>().unwrap(), FilterKind::SmoothBump);
        assert!("gauss".parse::<FilterKind>().is_err());
        assert_eq!(FilterKind::Quintic.to_string(), "quintic");
    }
}
