use std::collections::HashSet;
use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::csvio;
use crate::kinematics::VehicleSpec;
use crate::metrics::{kinetic_energy, Inertial};
use crate::scalar::Real;

use super::{TerrainClass, TerrainScale};

/// Relative tolerance between a stored and a recomputed kinetic energy.
pub const KE_TOLERANCE: f64 = 1e-3;

const CSV_COLUMNS: [&str; 6] = ["label", "vehicle", "mass", "v_max", "terrain", "model_type"];

/// Name, mass and top speed: all the map needs to know about a vehicle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VehicleProfile<T> {
    pub name: String,
    pub mass: T,
    pub v_max: T,
}

impl<T: Real> VehicleProfile<T> {
    pub fn new(name: impl Into<String>, mass: T, v_max: T) -> Result<Self> {
        let name = name.into();
        if !(mass.is_finite() && mass > T::zero() && v_max.is_finite() && v_max > T::zero()) {
            return Err(Error::param(format!(
                "vehicle '{name}' needs positive mass and v_max, got {mass} kg, {v_max} m/s"
            )));
        }
        Ok(Self { name, mass, v_max })
    }
}

impl<T: Real> From<&VehicleSpec<T>> for VehicleProfile<T> {
    fn from(spec: &VehicleSpec<T>) -> Self {
        Self {
            name: spec.name().to_string(),
            mass: spec.mass(),
            v_max: spec.v_max(),
        }
    }
}

impl<T: Real> Inertial<T> for VehicleProfile<T> {
    fn mass(&self) -> T {
        self.mass
    }

    fn v_max(&self) -> T {
        self.v_max
    }
}

/// One deployment: a point on the map.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeploymentRecord<T> {
    pub label: String,
    pub vehicle: VehicleProfile<T>,
    pub terrain: TerrainClass,
    pub max_kinetic_energy: T,
    pub metric_median: Option<T>,
    pub model_type: String,
}

impl<T: Real> DeploymentRecord<T> {
    /// Record whose kinetic energy is computed from the vehicle.
    pub fn new(
        label: impl Into<String>,
        vehicle: VehicleProfile<T>,
        terrain: TerrainClass,
        model_type: impl Into<String>,
    ) -> Self {
        Self {
            label: label.into(),
            max_kinetic_energy: kinetic_energy(&vehicle),
            vehicle,
            terrain,
            metric_median: None,
            model_type: model_type.into(),
        }
    }

    pub fn with_metric_median(mut self, median: T) -> Self {
        self.metric_median = Some(median);
        self
    }
}

/// Validated, immutable set of deployments ordered by terrain ordinal, then
/// kinetic energy, then label.
#[derive(Debug, Clone, PartialEq)]
pub struct Catalog<T> {
    pub(crate) records: Vec<DeploymentRecord<T>>,
}

impl<T: Real> Catalog<T> {
    pub fn records(&self) -> &[DeploymentRecord<T>] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Reads `label,vehicle,mass,v_max,terrain,model_type`, resolving terrain
    /// names against `scale`.
    pub fn read_csv<R: Read>(reader: R, scale: &TerrainScale) -> Result<Self> {
        let mut rdr = csvio::reader(reader);
        if csvio::is_empty(&mut rdr)? {
            return build_catalog(Vec::new());
        }
        let cols = csvio::columns(&mut rdr, &CSV_COLUMNS)?;
        let mut records = Vec::new();
        for rec in rdr.records() {
            let (rec, line) = csvio::record(rec)?;
            let text = |k: usize| rec.get(cols[k]).unwrap_or("").to_string();
            let mass = csvio::number(&rec, cols[2], "mass", line)?;
            let v_max = csvio::number(&rec, cols[3], "v_max", line)?;
            let vehicle = VehicleProfile::new(text(1), mass, v_max).map_err(|e| Error::parse(line, e.to_string()))?;
            let terrain = scale
                .lookup(&text(4))
                .map_err(|e| Error::parse(line, e.to_string()))?
                .clone();
            records.push(DeploymentRecord::new(text(0), vehicle, terrain, text(5)));
        }
        build_catalog(records)
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_COLUMNS).map_err(csvio::write_err)?;
        for r in &self.records {
            w.write_record([
                r.label.clone(),
                r.vehicle.name.clone(),
                r.vehicle.mass.to_string(),
                r.vehicle.v_max.to_string(),
                r.terrain.name.clone(),
                r.model_type.clone(),
            ])
            .map_err(csvio::write_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))
    }
}

/// Validates labels and kinetic energies and orders the records.
pub fn build_catalog<T: Real>(mut records: Vec<DeploymentRecord<T>>) -> Result<Catalog<T>> {
    let mut seen = HashSet::new();
    for r in &records {
        if r.label.trim().is_empty() {
            return Err(Error::Validation("deployment label must not be empty".into()));
        }
        if !seen.insert(r.label.as_str()) {
            return Err(Error::Validation(format!("duplicate deployment label '{}'", r.label)));
        }
        let _ = VehicleProfile::new(r.vehicle.name.clone(), r.vehicle.mass, r.vehicle.v_max)
            .map_err(|e| Error::Validation(format!("'{}': {e}", r.label)))?;
        let expected = kinetic_energy(&r.vehicle);
        let stored = r.max_kinetic_energy;
        let rel = ((stored - expected) / expected).abs();
        if !(rel.to_f64_lossy() <= KE_TOLERANCE) {
            return Err(Error::Validation(format!(
                "'{}': stored kinetic energy {stored} J disagrees with ½·m·v_max² = {expected} J",
                r.label
            )));
        }
    }
    records.sort_by(|x, y| {
        x.terrain
            .ordinal
            .cmp(&y.terrain.ordinal)
            .then(x.max_kinetic_energy.partial_cmp(&y.max_kinetic_energy).expect("finite"))
            .then_with(|| x.label.cmp(&y.label))
    });
    Ok(Catalog { records })
}
