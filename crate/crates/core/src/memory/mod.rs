//! The motion memory: expert plans for every ordered goal pair, augmented
//! training environments, one triplet-loss encoder per pair, and
//! nearest-centroid retrieval.

mod encoder;
mod experience;
mod store;

pub use encoder::{
    dist_sq, mean_triplet_loss, mean_vector, nearest_centroid, train_encoder, triplet_loss, Dense,
    Encoder, EncoderConfig, ForwardPass, Gradients, TrainedEncoder, TripletLoss, TripletSet,
};
pub use experience::{
    augment, expert_plan, expert_plans, grid_path, shortcut, start_facing, track_path,
    AugmentParams, SweptBody,
};
pub use store::{
    build_dataset, build_dataset_from, call_memory, goal_pairs, pair_index, score_held_out,
    train_store, Cluster, DatasetConfig, ExperienceDataset, MemoryQuery, MemoryStore, PairData,
    PairMemory, Retrieval, RetrievalScore, StoreMeta, GRID_RESOLUTION, STORE_VERSION,
    WAYPOINT_SPACING,
};
