use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::mesh::{cross, dot};

pub type CVec3 = [Complex64; 3];

/// Field evaluator returning `(E, curl E)` at a point.
pub type FieldFn = Arc<dyn Fn([f64; 3]) -> (CVec3, CVec3) + Send + Sync>;
/// Volume source evaluator.
pub type VolumeFn = Arc<dyn Fn([f64; 3]) -> CVec3 + Send + Sync>;

#[derive(Clone)]
pub enum IncidentField {
    /// `E = p exp(i k d.x)` with unit `d` orthogonal to `p`.
    PlaneWave { polarization: [f64; 3], direction: [f64; 3] },
    /// Arbitrary incident field with its curl, used for manufactured solutions.
    Custom(FieldFn),
}

impl fmt::Debug for IncidentField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IncidentField::PlaneWave { polarization, direction } => f
                .debug_struct("PlaneWave")
                .field("polarization", polarization)
                .field("direction", direction)
                .finish(),
            IncidentField::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl IncidentField {
    pub fn plane_wave(polarization: [f64; 3], direction: [f64; 3]) -> Self {
        IncidentField::PlaneWave { polarization, direction }
    }

    pub fn validate(&self) -> Result<()> {
        if let IncidentField::PlaneWave { polarization: p, direction: d } = self {
            let norm = dot(*d, *d).sqrt();
            if (norm - 1.0).abs() > 1e-12 {
                return Err(Error::Source(format!("direction must be a unit vector, |d| = {norm}")));
            }
            let pd = dot(*p, *d);
            if pd.abs() > 1e-12 {
                return Err(Error::Source(format!("polarization not orthogonal to direction: p.d = {pd:e}")));
            }
        }
        Ok(())
    }

    pub fn eval(&self, k: f64, x: [f64; 3]) -> (CVec3, CVec3) {
        match self {
            IncidentField::PlaneWave { polarization: p, direction: d } => {
                let phase = Complex64::from_polar(1.0, k * dot(*d, x));
                let dxp = cross(*d, *p);
                let ik = Complex64::new(0.0, k);
                (p.map(|c| phase * c), dxp.map(|c| ik * phase * c))
            }
            IncidentField::Custom(f) => f(x),
        }
    }
}

#[derive(Clone, Default)]
pub struct SourceSpec {
    pub incident: Option<IncidentField>,
    pub volume: Option<VolumeFn>,
}

impl fmt::Debug for SourceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceSpec")
            .field("incident", &self.incident)
            .field("volume", &self.volume.as_ref().map(|_| ".."))
            .finish()
    }
}

impl SourceSpec {
    pub fn plane_wave(polarization: [f64; 3], direction: [f64; 3]) -> Self {
        Self { incident: Some(IncidentField::plane_wave(polarization, direction)), volume: None }
    }

    /// The default benchmark source: z-polarized wave travelling along x.
    pub fn default_plane_wave() -> Self {
        Self::plane_wave([0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    }

    pub fn validate(&self) -> Result<()> {
        match &self.incident {
            Some(inc) => inc.validate(),
            None => Ok(()),
        }
    }
}
