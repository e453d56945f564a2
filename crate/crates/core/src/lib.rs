//! Multi-task neural-network engine built around binary weight masks.
//!
//! A single frozen backbone network is adapted to new classification tasks
//! by learning a per-task mask over its weights. Masks are trained
//! end-to-end through a hard threshold with a straight-through gradient,
//! then bit-packed into compact task artifacts (1 bit per masked
//! parameter). The backbone is never mutated, so adding tasks cannot
//! degrade earlier ones and task order does not matter.
//!
//! Module map:
//! - [`tensor`]: dense f64 tensors, matmul, 2-D convolution, reductions
//! - [`masking`]: binarizer/ternarizer, masked forward, mask gradients
//! - [`layers`]: dense/conv/relu/maxpool/batchnorm layers with hand-written
//!   backward passes, softmax cross-entropy
//! - [`optim`]: SGD with momentum, Adam, step-decay schedules
//! - [`registry`]: backbone snapshots, packed task artifacts, file formats
//! - [`training`]: pretraining, mask training, baselines, analyses
//! - [`data`]: synthetic multi-task generator and the dataset file format

pub mod data;
pub mod error;
pub mod layers;
pub mod masking;
pub mod optim;
pub mod registry;
pub mod tensor;
pub mod training;

pub use error::{Error, Result};
pub use tensor::Tensor;
