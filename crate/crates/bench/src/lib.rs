//! Shared fixtures for the criterion benches.

use torlog::builtins::builtin_bundle;
use torlog::pipeline::{CheckSet, PipelineInput};

/// Pipeline input for a named builtin bundle with every check enabled.
pub fn input_for(name: &str) -> PipelineInput {
    let b = builtin_bundle(name).expect("builtin bundle");
    let fan = torlog::builtins::builtin_fan(b.fan).expect("builtin fan");
    PipelineInput { fan, data: b.data, tamper: b.tamper, checks: CheckSet::all() }
}
