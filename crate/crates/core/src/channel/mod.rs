//! Simulated sender, channel and receiver with attackers, and the harness
//! that measures the language-mixing layer.

pub mod eval;
pub mod sim;

pub use eval::{evaluate_nl_layer, ComparisonReport, EvalError, EvalOptions};
pub use sim::{
    eavesdrop_and_attack, inject_replays, read_frames, run_session, write_frames, AttackSuite,
    ChannelError, ChannelProfile, Frame, KeyPolicy, SessionTrace, TrialResult,
};
