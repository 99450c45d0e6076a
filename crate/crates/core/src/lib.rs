pub mod analysis;
pub mod config;
pub mod features;
pub mod persona;
pub mod pipeline;
pub mod probe;
pub mod report;
pub mod stats;
pub mod task;
