//! Greedy non-maximum suppression.

use crate::detect::bbox::iou;
use crate::detect::Detection;

/// Greedy NMS over one class: repeatedly keeps the highest class-`class_id`
/// score (ties: earlier list index) and discards remaining detections whose
/// IoU with the kept box exceeds `iou_thresh`. At most `top_n` detections
/// are returned, in descending score order.
pub fn nms(dets: &[Detection], class_id: usize, iou_thresh: f64, top_n: usize) -> Vec<Detection> {
    let mut order: Vec<usize> = (0..dets.len()).collect();
    // Stable sort keeps input order among equal scores.
    order.sort_by(|&a, &b| {
        dets[b]
            .score(class_id)
            .partial_cmp(&dets[a].score(class_id))
            .expect("detection scores are finite")
    });
    let mut kept: Vec<Detection> = Vec::new();
    let mut suppressed = vec![false; dets.len()];
    for idx in order {
        if kept.len() >= top_n {
            break;
        }
        if suppressed[idx] {
            continue;
        }
        let keep = &dets[idx];
        for (other, flag) in dets.iter().zip(suppressed.iter_mut()) {
            if !*flag && iou(&keep.bbox, &other.bbox) > iou_thresh {
                *flag = true;
            }
        }
        kept.push(keep.clone());
    }
    kept
}
