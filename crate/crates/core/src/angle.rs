//! Points on the unit circle in turn coordinates.
//!
//! An [`Angle`] is a real number of turns constrained to the half-open
//! window `(-1/2, 1/2]`. Working in turns keeps the deformation maps of the
//! homotopy module free of 2π bookkeeping; the boundary convention puts the
//! angle of -1 at exactly +1/2.

use num_complex::Complex64 as c64;
use serde::{Deserialize, Serialize};

use crate::error::CoreError;
use crate::Result;

/// A point on the circle, stored as turns in `(-1/2, 1/2]`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);
    /// The angle of -1, i.e. half a turn.
    pub const HALF: Angle = Angle(0.5);

    /// Reduce an arbitrary real number of turns into the canonical window.
    pub fn normalize(x: f64) -> Result<Angle> {
        if !x.is_finite() {
            return Err(CoreError::NonFinite("angle"));
        }
        // x - round(x) lies in [-1/2, 1/2] exactly; fold the open endpoint.
        let mut y = x - x.round();
        if y == -0.5 {
            y = 0.5;
        }
        Ok(Angle(y))
    }

    /// Like [`Angle::normalize`] but for values already known finite.
    pub(crate) fn wrap(x: f64) -> Angle {
        let mut y = x - x.round();
        if y == -0.5 {
            y = 0.5;
        }
        Angle(y)
    }

    pub fn turns(self) -> f64 {
        self.0
    }

    /// The complex number `exp(2 pi i theta)`.
    pub fn phase(self) -> c64 {
        let w = 2.0 * std::f64::consts::PI * self.0;
        c64::new(w.cos(), w.sin())
    }

    /// Angle of a nonzero complex number.
    pub fn from_complex(z: c64) -> Angle {
        let t = z.im.atan2(z.re) / (2.0 * std::f64::consts::PI);
        Angle::wrap(t)
    }

    /// Rotate by `other`, staying in the canonical window.
    pub fn rotate(self, other: Angle) -> Angle {
        Angle::wrap(self.0 + other.0)
    }

    /// Chordal distance `|exp(2 pi i a) - exp(2 pi i b)|`.
    pub fn chord_to(self, other: Angle) -> f64 {
        2.0 * (std::f64::consts::PI * (self.0 - other.0)).sin().abs()
    }

    /// Squared chordal distance, the transport cost on the circle.
    pub fn chord_sq_to(self, other: Angle) -> f64 {
        let s = (std::f64::consts::PI * (self.0 - other.0)).sin();
        4.0 * s * s
    }
}

/// Normalize a real number of turns into `(-1/2, 1/2]`.
pub fn normalize_angle(x: f64) -> Result<Angle> {
    Angle::normalize(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_fixed_cases() {
        assert_eq!(normalize_angle(0.75).unwrap().turns(), -0.25);
        assert_eq!(normalize_angle(-0.5).unwrap().turns(), 0.5);
        assert_eq!(normalize_angle(0.0).unwrap().turns(), 0.0);
        assert_eq!(normalize_angle(0.5).unwrap().turns(), 0.5);
        assert_eq!(normalize_angle(1.0).unwrap().turns(), 0.0);
        assert_eq!(normalize_angle(-2.25).unwrap().turns(), -0.25);
    }

    #[test]
    fn rejects_non_finite() {
        assert!(normalize_angle(f64::NAN).is_err());
        assert!(normalize_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn phase_round_trip() {
        for &t in &[0.0, 0.1, -0.3, 0.5, 0.49999, -0.49999] {
            let a = Angle::normalize(t).unwrap();
            let b = Angle::from_complex(a.phase());
            assert!(
                (a.turns() - b.turns()).abs() < 1e-12 || (a.turns() - b.turns()).abs() > 0.9999,
                "{t}: {} vs {}",
                a.turns(),
                b.turns()
            );
        }
    }

    #[test]
    fn chord_is_symmetric_and_zero_on_diagonal() {
        let a = Angle::normalize(0.13).unwrap();
        let b = Angle::normalize(-0.41).unwrap();
        assert_eq!(a.chord_to(a), 0.0);
        assert!((a.chord_to(b) - b.chord_to(a)).abs() < 1e-15);
        // antipodal points are at distance 2
        let h = Angle::HALF;
        assert!((Angle::ZERO.chord_to(h) - 2.0).abs() < 1e-15);
    }

    proptest::proptest! {
        #[test]
        fn window_invariant(x in -1e6f64..1e6) {
            let a = normalize_angle(x).unwrap();
            proptest::prop_assert!(a.turns() > -0.5 && a.turns() <= 0.5);
            // congruent mod 1
            let d = (x - a.turns()).rem_euclid(1.0);
            proptest::prop_assert!(d < 1e-6 || d > 1.0 - 1e-6);
        }
    }
}
