//! Finitely supported probability measures on the unit circle.

use num_complex::Complex64 as c64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::angle::Angle;
use crate::error::CoreError;
use crate::Result;

/// Atoms closer than this (in turns) merge into one.
pub const MERGE_TOLERANCE: f64 = 1e-12;
/// Allowed deviation of the total mass from 1.
pub const MASS_TOLERANCE: f64 = 1e-12;

/// A probability measure supported on finitely many circle points:
/// sorted, distinct atoms with positive weights summing to 1.
#[derive(Clone, Debug, PartialEq)]
pub struct CircleMeasure {
    atoms: Vec<(Angle, f64)>,
}

impl CircleMeasure {
    /// Build a measure from raw atoms: drops zero weights, sorts by angle,
    /// merges near-coincident atoms, and validates the total mass.
    pub fn new(raw: Vec<(Angle, f64)>) -> Result<CircleMeasure> {
        let mut atoms: Vec<(Angle, f64)> = Vec::with_capacity(raw.len());
        for (a, w) in raw {
            if !w.is_finite() {
                return Err(CoreError::NonFinite("atom weight"));
            }
            if w < 0.0 {
                return Err(CoreError::InvalidMeasure(format!("negative weight {w}")));
            }
            if w > 0.0 {
                atoms.push((a, w));
            }
        }
        if atoms.is_empty() {
            return Err(CoreError::InvalidMeasure("no atoms with positive weight".into()));
        }
        atoms.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("angles are finite"));

        // merge adjacent atoms; representative is the first of each run
        let mut merged: Vec<(Angle, f64)> = Vec::with_capacity(atoms.len());
        for (a, w) in atoms {
            match merged.last_mut() {
                Some((la, lw)) if (a.turns() - la.turns()).abs() < MERGE_TOLERANCE => *lw += w,
                _ => merged.push((a, w)),
            }
        }
        // seam merge: last atom near +1/2 may coincide with the first near -1/2
        if merged.len() > 1 {
            let first = merged[0];
            let last = *merged.last().unwrap();
            if (first.0.turns() + 1.0 - last.0.turns()).abs() < MERGE_TOLERANCE {
                merged[0].1 += last.1;
                merged.pop();
            }
        }

        let mass: f64 = merged.iter().map(|(_, w)| w).sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(CoreError::InvalidMeasure(format!(
                "weights sum to {mass}, not 1"
            )));
        }
        Ok(CircleMeasure { atoms: merged })
    }

    /// Point mass at `angle`.
    pub fn dirac(angle: Angle) -> CircleMeasure {
        CircleMeasure { atoms: vec![(angle, 1.0)] }
    }

    /// `n` equal atoms at the n-th roots of unity.
    pub fn haar_discretization(n: usize) -> Result<CircleMeasure> {
        if n == 0 {
            return Err(CoreError::InvalidArgument("haar_discretization needs n >= 1".into()));
        }
        let w = 1.0 / n as f64;
        let atoms = (0..n)
            .map(|k| (Angle::wrap(k as f64 / n as f64), w))
            .collect();
        CircleMeasure::new(atoms)
    }

    /// The symmetric two-point measure at +1 and -1.
    pub fn bernoulli_pm1() -> CircleMeasure {
        CircleMeasure {
            atoms: vec![(Angle::ZERO, 0.5), (Angle::HALF, 0.5)],
        }
    }

    /// Equal-weight measure on `n` uniformly random angles; instance
    /// generator for oracle comparisons and calibration sweeps.
    pub fn random_equal_weight<R: Rng>(rng: &mut R, n: usize) -> CircleMeasure {
        assert!(n >= 1);
        loop {
            let w = 1.0 / n as f64;
            let atoms: Vec<(Angle, f64)> = (0..n)
                .map(|_| (Angle::wrap(rng.gen::<f64>() - 0.5), w))
                .collect();
            // rejection: rerun on the (measure-zero) event that two atoms merged
            if let Ok(m) = CircleMeasure::new(atoms) {
                if m.len() == n {
                    return m;
                }
            }
        }
    }

    pub fn atoms(&self) -> &[(Angle, f64)] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// Total mass, summed in sorted order.
    pub fn mass(&self) -> f64 {
        self.atoms.iter().map(|(_, w)| w).sum()
    }

    pub fn is_dirac(&self) -> bool {
        self.atoms.len() == 1
    }

    /// Complex moments `m_k = sum_i w_i exp(2 pi i k theta_i)` for `k = 0..=order`.
    pub fn moments(&self, order: usize) -> MomentSequence {
        let mut values = vec![c64::new(0.0, 0.0); order + 1];
        values[0] = c64::new(1.0, 0.0);
        for k in 1..=order {
            let mut m = c64::new(0.0, 0.0);
            for (a, w) in &self.atoms {
                let ph = Angle::wrap(k as f64 * a.turns()).phase();
                m += ph * *w;
            }
            values[k] = m;
        }
        MomentSequence::from_values(values, 1e-12).expect("measure moments are contractive")
    }

    /// Image measure under a circle map.
    pub fn pushforward<F: Fn(Angle) -> Angle>(&self, map: F) -> CircleMeasure {
        let atoms = self.atoms.iter().map(|&(a, w)| (map(a), w)).collect();
        CircleMeasure::new(atoms).expect("pushforward preserves mass")
    }

    /// Rotate every atom by `a`.
    pub fn rotate(&self, a: Angle) -> CircleMeasure {
        self.pushforward(|x| x.rotate(a))
    }

    /// Atom index holding the `(k + 1/2)/n` quantile, for `k = 0..n`, walking
    /// the cumulative distribution from angle -1/2 upward. The unmerged form
    /// of [`CircleMeasure::quantile_sample`]; also used to lay out diagonal
    /// spectra and to refine unequal-weight transport instances.
    pub fn quantile_indices(&self, n: usize) -> Result<Vec<usize>> {
        if n == 0 {
            return Err(CoreError::InvalidArgument("quantile sampling needs n >= 1".into()));
        }
        let mut out = Vec::with_capacity(n);
        let mut cum = 0.0;
        let mut idx = 0;
        for k in 0..n {
            let target = (k as f64 + 0.5) / n as f64;
            while idx + 1 < self.atoms.len() && cum + self.atoms[idx].1 < target - MERGE_TOLERANCE {
                cum += self.atoms[idx].1;
                idx += 1;
            }
            out.push(idx);
        }
        Ok(out)
    }

    /// The angles at the `n` half-grid quantiles, unmerged and sorted.
    pub fn quantile_angles(&self, n: usize) -> Result<Vec<Angle>> {
        Ok(self
            .quantile_indices(n)?
            .into_iter()
            .map(|i| self.atoms[i].0)
            .collect())
    }

    /// Deterministic `n`-atom equal-weight coarsening: atom `k` sits at the
    /// `(k + 1/2)/n` quantile of the cumulative distribution walked from
    /// angle -1/2 upward.
    pub fn quantile_sample(&self, n: usize) -> Result<CircleMeasure> {
        let w = 1.0 / n as f64;
        let out = self
            .quantile_angles(n)?
            .into_iter()
            .map(|a| (a, w))
            .collect();
        CircleMeasure::new(out)
    }

    /// Sorted angles, each repeated proportionally to weight when weights are
    /// integer multiples of `1/n`; plain atom list otherwise.
    pub fn angles(&self) -> Vec<Angle> {
        self.atoms.iter().map(|(a, _)| *a).collect()
    }

    pub fn to_json(&self) -> String {
        let dto = MeasureDto {
            version: 1,
            atoms: self
                .atoms
                .iter()
                .map(|&(a, w)| AtomDto { angle: a.turns(), weight: w })
                .collect(),
        };
        serde_json::to_string_pretty(&dto).expect("measure serializes")
    }

    pub fn from_json(s: &str) -> Result<CircleMeasure> {
        let dto: MeasureDto =
            serde_json::from_str(s).map_err(|e| CoreError::Serialization(e.to_string()))?;
        if dto.version != 1 {
            return Err(CoreError::Serialization(format!(
                "unsupported measure version {}",
                dto.version
            )));
        }
        let atoms = dto
            .atoms
            .into_iter()
            .map(|a| Ok((Angle::normalize(a.angle)?, a.weight)))
            .collect::<Result<Vec<_>>>()?;
        CircleMeasure::new(atoms)
    }
}

#[derive(Serialize, Deserialize)]
struct MeasureDto {
    version: u32,
    atoms: Vec<AtomDto>,
}

#[derive(Serialize, Deserialize)]
struct AtomDto {
    angle: f64,
    weight: f64,
}

/// Complex moments `m_0..m_K` of a circle measure; `m_0` is exactly 1 and
/// every entry lies in the closed unit disk (up to the stated slack).
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    values: Vec<c64>,
}

impl MomentSequence {
    /// Wrap raw values, checking the contractivity invariant with `slack`.
    pub fn from_values(values: Vec<c64>, slack: f64) -> Result<MomentSequence> {
        if values.is_empty() {
            return Err(CoreError::InvalidArgument("moment sequence needs m_0".into()));
        }
        if values[0] != c64::new(1.0, 0.0) {
            return Err(CoreError::InvalidMeasure(format!(
                "m_0 must be exactly 1, got {}",
                values[0]
            )));
        }
        for (k, v) in values.iter().enumerate() {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(CoreError::NonFinite("moment value"));
            }
            if v.norm() > 1.0 + slack {
                return Err(CoreError::InvalidMeasure(format!(
                    "|m_{k}| = {} exceeds 1",
                    v.norm()
                )));
            }
        }
        Ok(MomentSequence { values })
    }

    /// All-zero moments of the uniform measure, up to `order`.
    pub fn haar(order: usize) -> MomentSequence {
        let mut values = vec![c64::new(0.0, 0.0); order + 1];
        values[0] = c64::new(1.0, 0.0);
        MomentSequence { values }
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn value(&self, k: usize) -> c64 {
        self.values[k]
    }

    pub fn values(&self) -> &[c64] {
        &self.values
    }
}
