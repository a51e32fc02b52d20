//! Fixtures shared by the benchmarks in `benches/`.

use glint::annotate::BoundingBox;
use glint::render::RenderSettings;
use glint::{Assets, Detection, GroundTruth, Planner, Protocol, ProtocolConfig};

/// A protocol preset rendering square `size` frames at `spp`.
pub struct Fixture {
    pub config: ProtocolConfig,
    pub assets: Assets,
    pub planner: Planner,
    pub settings: RenderSettings,
}

impl Fixture {
    pub fn new(protocol: Protocol, size: u32, spp: u32) -> Fixture {
        let mut config = ProtocolConfig::preset(protocol);
        config.dimensions = vec![[size, size]];
        config.prestudy.size = size;
        config.render.spp = spp;
        let assets = Assets::load(&config).expect("preset assets load");
        let planner = assets.planner(&config).expect("preset plans");
        let settings = RenderSettings::from(&config.render);
        Fixture {
            config,
            assets,
            planner,
            settings,
        }
    }
}

/// `frames` frames with three truths each and a shifted, scored detection
/// per truth plus one false positive per frame.
pub fn synthetic_eval(frames: u64) -> (Vec<Detection>, Vec<GroundTruth>) {
    let classes = ["toilet", "sink", "urinal"];
    let mut dets = Vec::new();
    let mut gts = Vec::new();
    for f in 0..frames {
        for (k, c) in classes.iter().enumerate() {
            let x = (k as f64) * 60.0 + (f % 7) as f64;
            let b = BoundingBox::from_pixels(x as u32, 10, x as u32 + 40, 60);
            gts.push(GroundTruth {
                frame_id: f,
                class: c.to_string(),
                bbox: b,
            });
            let shift = ((f * 3 + k as u64) % 11) as f64;
            dets.push(Detection {
                frame_id: f,
                class: c.to_string(),
                bbox: BoundingBox {
                    x_min: b.x_min + shift,
                    x_max: b.x_max + shift,
                    ..b
                },
                score: ((f * 7 + k as u64) % 100) as f64 / 100.0,
            });
        }
        dets.push(Detection {
            frame_id: f,
            class: classes[(f % 3) as usize].to_string(),
            bbox: BoundingBox::from_pixels(200, 200, 230, 240),
            score: ((f * 13) % 100) as f64 / 100.0,
        });
    }
    (dets, gts)
}
