//! Generator systems, word balls and Cartan clouds.

mod ball;
mod cloud;
mod files;
mod generators;

pub use ball::{BallOptions, WordBall, DEFAULT_MEMORY_BUDGET};
pub use cloud::{cartan_cloud, write_layer_counts, CartanCloud, CloudMeta, CloudPoint};
pub use files::{read_ball, write_ball};
pub use generators::{Coloring, Generator, GeneratorSystem, Tag};
