use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::ingest::{csvio, AlignedDataset};
use crate::kinematics::{ideal_diff_drive, slip, slip_modulus, AngularWeight, BodyVelocity};
use crate::scalar::Real;

const CSV_COLUMNS: [&str; 5] = ["t", "gx", "gy", "gomega", "modulus"];

/// Slip vector and its modulus at every step of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DistortionSeries<T> {
    dataset_name: String,
    t: Vec<T>,
    g: Vec<BodyVelocity<T>>,
    modulus: Vec<T>,
    /// `None` when the series was read back from CSV, which does not carry it.
    angular_weight: Option<AngularWeight<T>>,
}

impl<T: Real> DistortionSeries<T> {
    /// Builds a series from slip vectors, computing every modulus.
    pub fn from_slips(
        dataset_name: impl Into<String>,
        t: Vec<T>,
        g: Vec<BodyVelocity<T>>,
        angular_weight: AngularWeight<T>,
    ) -> Result<Self> {
        if t.len() != g.len() {
            return Err(Error::Validation(format!("{} timestamps but {} slip vectors", t.len(), g.len())));
        }
        let modulus = g.iter().map(|g| slip_modulus(g, angular_weight)).collect();
        Ok(Self {
            dataset_name: dataset_name.into(),
            t,
            g,
            modulus,
            angular_weight: Some(angular_weight),
        })
    }

    pub fn dataset_name(&self) -> &str {
        &self.dataset_name
    }

    pub fn times(&self) -> &[T] {
        &self.t
    }

    pub fn slips(&self) -> &[BodyVelocity<T>] {
        &self.g
    }

    pub fn modulus(&self) -> &[T] {
        &self.modulus
    }

    pub fn angular_weight(&self) -> Option<AngularWeight<T>> {
        self.angular_weight
    }

    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    /// Keeps every `stride`-th step, starting with the first.
    pub fn decimate(&self, stride: usize) -> Result<Self> {
        if stride == 0 {
            return Err(Error::param("decimation stride must be >= 1"));
        }
        fn pick<U: Copy>(v: &[U], stride: usize) -> Vec<U> {
            v.iter().step_by(stride).copied().collect()
        }
        Ok(Self {
            dataset_name: self.dataset_name.clone(),
            t: pick(&self.t, stride),
            g: pick(&self.g, stride),
            modulus: pick(&self.modulus, stride),
            angular_weight: self.angular_weight,
        })
    }

    /// CSV with header `t,gx,gy,gomega,modulus`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(CSV_COLUMNS).map_err(csvio::write_err)?;
        for ((t, g), m) in self.t.iter().zip(&self.g).zip(&self.modulus) {
            w.write_record([t, &g.vx, &g.vy, &g.omega, m].map(|x| x.to_string()))
                .map_err(csvio::write_err)?;
        }
        w.flush().map_err(|e| Error::io("<csv output>", e))
    }

    /// Reads a series written by [`write_csv`](Self::write_csv). Moduli are
    /// taken as stored; a header-only or zero-length file gives an empty series.
    pub fn read_csv<R: Read>(dataset_name: impl Into<String>, reader: R) -> Result<Self> {
        let mut rdr = csvio::reader(reader);
        let mut series = Self {
            dataset_name: dataset_name.into(),
            t: Vec::new(),
            g: Vec::new(),
            modulus: Vec::new(),
            angular_weight: None,
        };
        if csvio::is_empty(&mut rdr)? {
            return Ok(series);
        }
        let cols = csvio::columns(&mut rdr, &CSV_COLUMNS)?;
        let mut prev = None;
        for rec in rdr.records() {
            let (rec, line) = csvio::record(rec)?;
            let mut row = [T::zero(); 5];
            for (k, (&idx, name)) in cols.iter().zip(CSV_COLUMNS).enumerate() {
                row[k] = csvio::number(&rec, idx, name, line)?;
            }
            csvio::check_monotonic(&mut prev, row[0], line)?;
            if row[4] < T::zero() {
                return Err(Error::parse(line, format!("negative modulus {}", row[4])));
            }
            series.t.push(row[0]);
            series.g.push(BodyVelocity {
                vx: row[1],
                vy: row[2],
                omega: row[3],
            });
            series.modulus.push(row[4]);
        }
        Ok(series)
    }
}

/// Slip `f(u_t) − v_t` and its modulus at every aligned step.
pub fn distortion_series<T: Real>(
    ds: &AlignedDataset<T>,
    angular_weight: AngularWeight<T>,
) -> Result<DistortionSeries<T>> {
    if ds.is_empty() {
        return Err(Error::InsufficientData(format!("dataset '{}' has no aligned steps", ds.name())));
    }
    let spec = ds.vehicle();
    let (t, g) = ds
        .pairs()
        .map(|(cmd, v)| (cmd.t, slip(&ideal_diff_drive(cmd, spec), v)))
        .unzip();
    DistortionSeries::from_slips(ds.name(), t, g, angular_weight)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{DatasetMeta, TimedVelocity};
    use crate::kinematics::{VehicleSpec, WheelCommand};
    use crate::mapping::default_terrain_scale;

    fn dataset(l: f64, r: f64, v: (f64, f64, f64), n: usize) -> AlignedDataset<f64> {
        let meta = DatasetMeta {
            name: "fixture".into(),
            vehicle: VehicleSpec::new("v", 0.3, 1.2, 100.0, 2.0).unwrap(),
            terrain: default_terrain_scale().lookup("tile").unwrap().clone(),
        };
        let c = (0..n).map(|i| WheelCommand { t: i as f64 * 0.05, omega_l: l, omega_r: r }).collect();
        let vel = (0..n)
            .map(|i| TimedVelocity { t: i as f64 * 0.05, velocity: BodyVelocity { vx: v.0, vy: v.1, omega: v.2 } })
            .collect();
        AlignedDataset::new(meta, 0.05, c, vel).unwrap()
    }

    #[test]
    fn perfect_tracking_is_zero() {
        let s = distortion_series(&dataset(1.0, 3.0, (0.6, 0.0, 0.5), 20), AngularWeight::default()).unwrap();
        assert!(s.modulus().iter().all(|&m| m.abs() < 1e-15));
    }

    #[test]
    fn constant_offset_fixture() {
        // f = (0.3·(2+2)/2, 0, 0) = (0.6, 0, 0); g = (0.1, 0, 0)
        let s = distortion_series(&dataset(2.0, 2.0, (0.5, 0.0, 0.0), 20), AngularWeight::default()).unwrap();
        for &m in s.modulus() {
            assert!((m - 0.1).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_is_zero() {
        let s = distortion_series(&dataset(0.0, 0.0, (0.0, 0.0, 0.0), 5), AngularWeight::default()).unwrap();
        assert!(s.modulus().iter().all(|&m| m == 0.0));
    }

    #[test]
    fn empty_dataset_is_insufficient() {
        let ds = dataset(0.0, 0.0, (0.0, 0.0, 0.0), 0);
        assert!(matches!(distortion_series(&ds, AngularWeight::default()), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn decimation() {
        let s = distortion_series(&dataset(0.0, 0.0, (0.0, 0.0, 0.0), 10), AngularWeight::default()).unwrap();
        let d = s.decimate(3).unwrap();
        assert_eq!(d.len(), 4);
        assert_eq!(d.times()[1], s.times()[3]);
        assert!(s.decimate(0).is_err());
    }

    #[test]
    fn csv_round_trip_is_byte_stable() {
        let s = distortion_series(&dataset(1.7, 2.3, (0.49, 0.013, 0.21), 7), AngularWeight::new(0.37).unwrap())
            .unwrap();
        let mut a = Vec::new();
        s.write_csv(&mut a).unwrap();
        let back = DistortionSeries::<f64>::read_csv("fixture", a.as_slice()).unwrap();
        assert_eq!(back.modulus(), s.modulus());
        let mut b = Vec::new();
        back.write_csv(&mut b).unwrap();
        assert_eq!(a, b);
        assert!(String::from_utf8(a).unwrap().starts_with("t,gx,gy,gomega,modulus\n"));
    }

    #[test]
    fn read_empty_inputs() {
        assert!(DistortionSeries::<f64>::read_csv("e", "".as_bytes()).unwrap().is_empty());
        assert!(DistortionSeries::<f64>::read_csv("e", "t,gx,gy,gomega,modulus\n".as_bytes()).unwrap().is_empty());
        assert!(DistortionSeries::<f64>::read_csv("e", "t,gx,gy,gomega,modulus\n0,0,0,0,-1\n".as_bytes()).is_err());
    }
}
