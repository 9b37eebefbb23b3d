//! Synthetic circle datasets and the experiment harnesses built on them.

mod changepoint;
mod generator;
mod manifest;
mod table1;

pub use changepoint::{
    gen_changepoint_sequence, run_changepoint_experiment, ChangepointConfig, ChangepointResult,
};
pub use generator::{
    gen_dataset, gen_instance, gen_instance_forced, ForcedDraws, Provenance, SynthConfig,
    SynthInstance,
};
pub use manifest::{write_dataset, DatasetManifest, ManifestEntry};
pub use table1::{
    cech_d1_diagrams, run_table1_experiment, KernelFamily, MethodResult, MethodSpec, Table1Options,
    Table1Result,
};
