//! Online action-tube generation.
//!
//! Detections are linked frame by frame: live tubes greedily claim the
//! best-scoring detection of their class among those overlapping their last
//! box by at least `lambda`; unmatched tubes coast for up to `k` frames on
//! extrapolated boxes before terminating; leftover detections spawn new
//! tubes. The linker is strictly online — the state after frame `t` depends
//! only on frames up to `t`.

pub mod io;

pub use io::{read_tubes, write_tubes, TubeFrameRecord, TubeRecord};
mod linker;

pub use linker::{
    predict_bbox, run_stream, update_label, ActionTube, LinkerConfig, TubeFrame, TubeLinker,
};
