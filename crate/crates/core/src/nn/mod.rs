//! Fully connected syndrome-to-label network.
//!
//! The network reads the stabilizer syndrome and emits one probability per
//! logical label bit. It never sees physical-qubit corrections.

mod dataset;
mod io;
mod mlp;
mod train;

pub use dataset::{generate_dataset, Dataset};
pub use io::{
    decode_model, encode_model, load_model, load_model_for, save_model, MODEL_MAGIC, MODEL_VERSION,
};
pub use mlp::{Layer, MlpSpec};
pub use train::{train, TrainConfig, TrainReport};
