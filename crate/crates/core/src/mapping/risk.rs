use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Boundary of one risk level. A deployment reaches the level when its
/// terrain alone is complex enough (`ordinal >= terrain_bound`), or when it
/// is both energetic and on at least moderately complex terrain
/// (`ke >= ke_bound` and `ordinal >= ordinal_bound`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RiskThreshold<T> {
    pub ke_bound: T,
    pub ordinal_bound: u32,
    pub terrain_bound: u32,
}

impl<T: Real> RiskThreshold<T> {
    pub fn reached(&self, ke: T, ordinal: u32) -> bool {
        ordinal >= self.terrain_bound || (ke >= self.ke_bound && ordinal >= self.ordinal_bound)
    }

    /// Lowest kinetic energy at which a deployment on `ordinal` reaches this
    /// level; `Some(0)` when the terrain alone suffices.
    pub fn ke_onset(&self, ordinal: u32) -> Option<T> {
        if ordinal >= self.terrain_bound {
            Some(T::zero())
        } else if ordinal >= self.ordinal_bound {
            Some(self.ke_bound)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct RiskLevel(pub usize);

impl RiskLevel {
    /// `low`/`medium`/`high` for the usual three levels, `level N` otherwise.
    pub fn name(self, levels: usize) -> String {
        match (levels, self.0) {
            (_, 0) => "low".into(),
            (3, 1) => "medium".into(),
            (l, k) if k + 1 == l => "high".into(),
            (_, k) => format!("level {k}"),
        }
    }
}

/// Nested risk levels on the (kinetic energy, terrain ordinal) plane.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RiskZoning<T> {
    thresholds: Vec<RiskThreshold<T>>,
}

impl<T: Real> RiskZoning<T> {
    /// Bounds must increase from one level to the next (`ke_bound` and
    /// `terrain_bound` strictly, `ordinal_bound` weakly) so that every level
    /// is contained in the one below it.
    pub fn new(thresholds: Vec<RiskThreshold<T>>) -> Result<Self> {
        for t in &thresholds {
            if !(t.ke_bound.is_finite() && t.ke_bound > T::zero()) {
                return Err(Error::param(format!("risk ke_bound must be positive, got {}", t.ke_bound)));
            }
        }
        for w in thresholds.windows(2) {
            let (lo, hi) = (&w[0], &w[1]);
            if !(hi.ke_bound > lo.ke_bound && hi.terrain_bound > lo.terrain_bound && hi.ordinal_bound >= lo.ordinal_bound)
            {
                return Err(Error::param(format!("risk thresholds must increase: {lo:?} then {hi:?}")));
            }
        }
        Ok(Self { thresholds })
    }

    pub fn thresholds(&self) -> &[RiskThreshold<T>] {
        &self.thresholds
    }

    /// Number of levels including the base level.
    pub fn levels(&self) -> usize {
        self.thresholds.len() + 1
    }

    pub fn level(&self, ke: T, ordinal: u32) -> RiskLevel {
        RiskLevel(self.thresholds.iter().take_while(|t| t.reached(ke, ordinal)).count())
    }
}

impl<T: Real> Default for RiskZoning<T> {
    /// Medium from gravel-like terrain or 100 J; high from snow-like terrain,
    /// or from 1000 J on gravel-like terrain and beyond.
    fn default() -> Self {
        Self::new(vec![
            RiskThreshold {
                ke_bound: T::lit(100.0),
                ordinal_bound: 1,
                terrain_bound: 3,
            },
            RiskThreshold {
                ke_bound: T::lit(1000.0),
                ordinal_bound: 3,
                terrain_bound: 6,
            },
        ])
        .expect("valid default zoning")
    }
}
