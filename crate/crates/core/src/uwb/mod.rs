//! DS-UWB uplink signal model: spreading, chip pulse, multipath channel,
//! ISI partitions and chip-rate received vectors.

mod channel;
mod codes;
mod config;
mod matrices;
mod oracle;
mod pulse;
mod received;
mod signatures;

pub use channel::{generate_channel, load_channel, parse_cir, ChannelRealization, ClusterProfile};
pub use codes::{generate_spreading_codes, SpreadingCodes};
pub use config::{Dims, SystemConfig};
pub use matrices::{build_isi_partitions, build_toeplitz_channel, matched_filter_matrix, pulse_shaping_matrix};
pub use oracle::synthesize_received_oracle;
pub use pulse::{chip_pulse, rrc_taps, rrc_value};
pub use received::{
    generate_batch, noise_vector, synthesize_noiseless, synthesize_received, ReceivedBatch, SymbolStreams,
};
pub use signatures::{build_signatures, noise_stddev_for, SignatureSet};
