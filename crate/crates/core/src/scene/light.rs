use serde::{Deserialize, Serialize};

use crate::math::Vec3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LightKind {
    Point,
    Spot { direction: Vec3, cone_deg: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Light {
    #[serde(flatten)]
    pub kind: LightKind,
    pub position: Vec3,
    pub intensity: f64,
}

impl Light {
    pub fn point(position: Vec3, intensity: f64) -> Self {
        Light {
            kind: LightKind::Point,
            position,
            intensity,
        }
    }

    pub fn spot(position: Vec3, target: Vec3, cone_deg: f64, intensity: f64) -> Self {
        Light {
            kind: LightKind::Spot {
                direction: (target - position).normalized(),
                cone_deg,
            },
            position,
            intensity,
        }
    }

    /// Whether `point` lies inside the light's emission cone. Point lights
    /// emit everywhere.
    pub fn illuminates(&self, point: Vec3) -> bool {
        match self.kind {
            LightKind::Point => true,
            LightKind::Spot { direction, cone_deg } => {
                let to = (point - self.position).normalized();
                to.dot(direction) >= (0.5 * cone_deg).to_radians().cos()
            }
        }
    }

    pub fn is_valid(&self) -> bool {
        self.intensity >= 0.0
            && match self.kind {
                LightKind::Point => true,
                LightKind::Spot { cone_deg, direction } => {
                    cone_deg > 0.0 && cone_deg < 180.0 && (direction.length() - 1.0).abs() < 1e-9
                }
            }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spot_cone_membership() {
        let l = Light::spot(Vec3::new(0.0, 2.0, 0.0), Vec3::ZERO, 60.0, 1.0);
        assert!(l.illuminates(Vec3::ZERO));
        assert!(l.illuminates(Vec3::new(1.0, 0.0, 0.0))); // 26.6 deg off axis
        assert!(!l.illuminates(Vec3::new(2.0, 0.0, 0.0))); // 45 deg off axis
        assert!(!l.illuminates(Vec3::new(0.0, 3.0, 0.0)));
    }
}
