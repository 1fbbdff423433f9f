pub mod config;
pub mod error;
pub mod frontend;
pub mod harness;
pub mod imaging;
pub mod metrics;
pub mod numerics;
pub mod scenario;
pub mod target;
pub mod tmc;
