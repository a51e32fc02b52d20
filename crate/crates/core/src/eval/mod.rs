//! Detection metrics and reference losses.

pub mod io;
pub mod losses;
pub mod metrics;

pub use io::{align_detections, ground_truths, report_csv, write_report, DetectionsFile};
pub use losses::{focal_loss, smooth_l1, FocalLossParams, DEFAULT_SMOOTH_L1_BETA};
pub use metrics::{
    average_precision, iou, mean_ap, ApResult, ClassReport, Detection, EvalReport, GroundTruth, DEFAULT_THRESHOLDS,
};
