use serde::{Deserialize, Serialize};

use crate::math::Rgb;

/// Parameters of the local Blinn-Phong model used by the fast renderer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LocalMaterial {
    pub diffuse: Rgb,
    pub specular: Rgb,
    pub shininess: f64,
    /// Weight of the environment reflection blended over local shading.
    pub reflectivity: f64,
    /// Index into the frame's texture library; modulates `diffuse`.
    pub texture: Option<u32>,
}

impl LocalMaterial {
    pub fn diffuse(color: Rgb) -> Self {
        LocalMaterial {
            diffuse: color,
            specular: Rgb::gray(0.0),
            shininess: 1.0,
            reflectivity: 0.0,
            texture: None,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.diffuse.in_unit_cube()
            && self.specular.in_unit_cube()
            && self.shininess > 0.0
            && (0.0..=1.0).contains(&self.reflectivity)
    }
}

/// Metalness/specular workflow material for the path tracer.
///
/// The reflected energy splits into a Lambertian lobe with albedo
/// `base_color * (1 - metalness)` and a GGX lobe with normal-incidence
/// reflectance `F0 = lerp(specular, base_color, metalness)`. A fraction
/// `reflectivity` of the energy is routed through the GGX lobe; of that
/// fraction, whatever `F0` does not reflect falls through to the diffuse lobe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalMaterial {
    pub base_color: Rgb,
    pub metalness: f64,
    pub specular: f64,
    pub reflectivity: f64,
    pub roughness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub texture: Option<u32>,
}

impl PhysicalMaterial {
    pub fn diffuse(base_color: Rgb) -> Self {
        PhysicalMaterial {
            base_color,
            metalness: 0.0,
            specular: 0.0,
            reflectivity: 0.0,
            roughness: 1.0,
            texture: None,
        }
    }

    pub fn is_valid(&self) -> bool {
        self.base_color.in_unit_cube()
            && [self.metalness, self.specular, self.reflectivity, self.roughness]
                .iter()
                .all(|v| (0.0..=1.0).contains(v))
    }
}
