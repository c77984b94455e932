use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::ModuleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    /// 2x2 patch array on the back face.
    Patch2x2,
    /// 1x2 dipole array along an edge.
    Dipole1x2,
}

impl ModuleKind {
    pub fn n_elements(self) -> usize {
        match self {
            ModuleKind::Patch2x2 => 4,
            ModuleKind::Dipole1x2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Face {
    Back,
    EdgeTop,
    EdgeLeft,
    EdgeRight,
    EdgeBottom,
}

/// One antenna module. Element positions are in wavelengths in the handset
/// frame: x across the width, y along the length (top is +y), z out of the
/// back face. The screen faces -z.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModuleSpec {
    pub id: ModuleId,
    pub kind: ModuleKind,
    pub face: Face,
    pub boresight: [f64; 3],
    pub elements: Vec<[f64; 3]>,
}

/// Placement of the nine modules on the handset.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HandsetLayout {
    pub carrier_ghz: f64,
    pub modules: Vec<ModuleSpec>,
}

/// Patch boresights lean this far from the back normal toward their corner.
pub const PATCH_TILT_DEG: f64 = 30.0;

const PITCH: f64 = 0.5;
const PITCH_TOL: f64 = 1e-9;

impl ModuleSpec {
    /// Unit vector along the module's element row; for dipoles this is also
    /// the dipole axis.
    pub fn row_axis(&self) -> [f64; 3] {
        let a = self.elements[0];
        let b = self.elements[1];
        normalize([b[0] - a[0], b[1] - a[1], b[2] - a[2]])
    }
}

impl HandsetLayout {
    /// Reference handset: three patch modules at the top-left, top-right and
    /// bottom-right corners of the back, each flanked by two edge dipole
    /// modules. Module ids group by corner: 1-3 top-left, 4-6 top-right,
    /// 7-9 bottom-right, with the patch first.
    pub fn reference() -> Self {
        // 75 x 150 mm body at 39 GHz, about 9.76 x 19.5 wavelengths
        let (half_w, half_h) = (4.88, 9.75);
        let (cx, cy) = (3.9, 8.8);
        let tilt = PATCH_TILT_DEG.to_radians();
        let corners = [(-1.0, 1.0), (1.0, 1.0), (1.0, -1.0)];

        let mut modules = Vec::with_capacity(9);
        for (c, &(sx, sy)) in corners.iter().enumerate() {
            let base = (3 * c) as ModuleId;
            let (px, py) = (sx * cx, sy * cy);
            let diag = std::f64::consts::FRAC_1_SQRT_2 * tilt.sin();
            modules.push(ModuleSpec {
                id: base + 1,
                kind: ModuleKind::Patch2x2,
                face: Face::Back,
                boresight: normalize([sx * diag, sy * diag, tilt.cos()]),
                elements: vec![
                    [px - 0.25, py - 0.25, 0.5],
                    [px + 0.25, py - 0.25, 0.5],
                    [px - 0.25, py + 0.25, 0.5],
                    [px + 0.25, py + 0.25, 0.5],
                ],
            });
            // edge along x (top or bottom)
            let ey = sy * half_h;
            modules.push(ModuleSpec {
                id: base + 2,
                kind: ModuleKind::Dipole1x2,
                face: if sy > 0.0 { Face::EdgeTop } else { Face::EdgeBottom },
                boresight: [0.0, sy, 0.0],
                elements: vec![[px - 0.25, ey, 0.0], [px + 0.25, ey, 0.0]],
            });
            // edge along y (left or right)
            let ex = sx * half_w;
            modules.push(ModuleSpec {
                id: base + 3,
                kind: ModuleKind::Dipole1x2,
                face: if sx > 0.0 { Face::EdgeRight } else { Face::EdgeLeft },
                boresight: [sx, 0.0, 0.0],
                elements: vec![[ex, py - 0.25, 0.0], [ex, py + 0.25, 0.0]],
            });
        }
        HandsetLayout {
            carrier_ghz: 39.0,
            modules,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.carrier_ghz.is_nan() || self.carrier_ghz <= 0.0 {
            return Err(Error::param("carrier frequency must be positive"));
        }
        let patches = self.modules.iter().filter(|m| m.kind == ModuleKind::Patch2x2).count();
        let dipoles = self.modules.iter().filter(|m| m.kind == ModuleKind::Dipole1x2).count();
        if patches != 3 || dipoles != 6 {
            return Err(Error::param(format!(
                "layout needs 3 patch and 6 dipole modules, has {patches} and {dipoles}"
            )));
        }
        let mut ids: Vec<ModuleId> = self.modules.iter().map(|m| m.id).collect();
        ids.sort_unstable();
        if ids != (1..=9).collect::<Vec<_>>() {
            return Err(Error::param("module ids must be exactly 1..=9"));
        }
        for m in &self.modules {
            let n = norm(m.boresight);
            if (n - 1.0).abs() > 1e-9 {
                return Err(Error::param(format!("module {} boresight norm is {n}", m.id)));
            }
            if m.elements.len() != m.kind.n_elements() {
                return Err(Error::param(format!(
                    "module {} has {} elements, a {:?} needs {}",
                    m.id,
                    m.elements.len(),
                    m.kind,
                    m.kind.n_elements()
                )));
            }
            // each element's nearest neighbour sits exactly half a wavelength away
            for (a, pa) in m.elements.iter().enumerate() {
                let nearest = m
                    .elements
                    .iter()
                    .enumerate()
                    .filter(|&(b, _)| b != a)
                    .map(|(_, pb)| norm([pb[0] - pa[0], pb[1] - pa[1], pb[2] - pa[2]]))
                    .fold(f64::INFINITY, f64::min);
                if (nearest - PITCH).abs() > PITCH_TOL {
                    return Err(Error::param(format!(
                        "module {} element spacing {nearest} is not half a wavelength",
                        m.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// Modules ordered by id.
    pub fn sorted_modules(&self) -> Vec<&ModuleSpec> {
        let mut m: Vec<&ModuleSpec> = self.modules.iter().collect();
        m.sort_by_key(|m| m.id);
        m
    }

    pub fn module(&self, id: ModuleId) -> Result<&ModuleSpec> {
        self.modules
            .iter()
            .find(|m| m.id == id)
            .ok_or_else(|| Error::param(format!("unknown module {id}")))
    }

    pub fn from_json(text: &str, source: &str) -> Result<Self> {
        let layout: HandsetLayout = serde_json::from_str(text).map_err(|e| Error::json(source, e))?;
        layout.validate()?;
        Ok(layout)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("layout serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, &path.display().to_string())
    }
}

pub(crate) fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn normalize(v: [f64; 3]) -> [f64; 3] {
    let n = norm(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

pub(crate) fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_layout_is_valid() {
        let l = HandsetLayout::reference();
        l.validate().unwrap();
        let patches: Vec<_> = l
            .sorted_modules()
            .iter()
            .filter(|m| m.kind == ModuleKind::Patch2x2)
            .map(|m| m.id)
            .collect();
        assert_eq!(patches, vec![1, 4, 7]);
        assert_eq!(l.module(9).unwrap().face, Face::EdgeRight);
        assert_eq!(l.module(2).unwrap().face, Face::EdgeTop);
    }

    #[test]
    fn validation_catches_bad_layouts() {
        let mut l = HandsetLayout::reference();
        l.modules[1].elements[1][0] += 0.1;
        assert!(l.validate().is_err());

        let mut l = HandsetLayout::reference();
        l.modules[0].boresight = [0.0, 0.0, 2.0];
        assert!(l.validate().is_err());

        let mut l = HandsetLayout::reference();
        l.modules[1].kind = ModuleKind::Patch2x2;
        assert!(l.validate().is_err());

        let mut l = HandsetLayout::reference();
        l.modules[0].id = 2;
        assert!(l.validate().is_err());
    }

    #[test]
    fn json_round_trip() {
        let l = HandsetLayout::reference();
        let text = l.to_json();
        assert!(text.contains("\"edge-bottom\""));
        assert!(text.contains("\"patch2x2\""));
        assert_eq!(HandsetLayout::from_json(&text, "mem").unwrap(), l);
    }
}
