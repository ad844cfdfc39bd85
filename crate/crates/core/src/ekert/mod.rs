//! Ekert key distribution with relativistic singlet pairs.
//!
//! Each round both parties independently choose between a test setting
//! (`a`/`a'` for Alice, `b`/`b'` for Bob) and one of the shared key axes.
//! Rounds where both picked the same key axis form the sifted key; rounds
//! where both picked test settings feed the Bell test.

mod protocol;

pub use protocol::{
    run_protocol, sample_pair_outcomes, EveStrategy, ProtocolConfig, ProtocolTranscript, RoundRecord, Setting,
    ThresholdMode, SCHEMA_VERSION,
};
pub use test::{bell_test, estimate_bell, verdict, z_quantile, BellEstimate, BellTestRecord, CorrelatorTally, Verdict, MIN_ROUNDS_PER_PAIR};
