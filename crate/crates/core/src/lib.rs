//! Secure degrees-of-freedom laboratory for one-hop Gaussian wiretap networks.
//!
//! The crate builds the real-interference-alignment schemes for the wiretap
//! channel with helpers, the broadcast and interference channels with
//! confidential messages, and the multiple access wiretap channel; evaluates
//! their secrecy rates exactly through Gaussian-mixture entropies; fits the
//! high-SNR slopes; and checks the single-letter converse inequalities
//! numerically.

pub mod alignment;
pub mod channel;
pub mod converse;
pub mod dof;
pub mod error;
pub mod experiment;
pub mod info;
pub mod oracle;
pub mod pam;
pub mod rng;
pub mod verify;

pub use alignment::{build_plan, receiver_space, ReceiverSpace, SignalingPlan, SymbolId};
pub use channel::{sample_gains, ChannelGains, GainRange, NetworkModel, Topology};
pub use converse::{CheckReport, Verdict};
pub use dof::{sweep, theory_dof, RateCurve, RatePoint, SweepOptions, TheoryEntry};
pub use error::{Error, Result};
pub use experiment::{run_experiment, ExperimentConfig, Manifest, PGrid};
pub use info::{mutual_info, MiEstimate, MiOptions, MixtureDensity};
pub use pam::{PamConstellation, Schedule};
