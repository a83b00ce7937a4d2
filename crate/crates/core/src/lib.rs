//! Structural distances between mixed-integer linear programs.
//!
//! Instances are read from MPS, rewritten as minimization problems with only
//! `<=` rows, and summarized as a distribution over constraint templates.
//! Two instances are compared with a nested earth mover's distance, solved
//! either exactly or with a fast greedy approximation.

pub mod canonical;
pub mod distance;
pub mod eval;
pub mod load;
pub mod model;
pub mod mps;
pub mod normalize;
pub mod synth;
pub mod transport;

pub use canonical::{canonicalize, CanonicalError, CanonicalInstance};
pub use distance::{
    constraint_distance, cross_distances, distance_matrix, instance_distance, pair_ground_distance, DistanceEngine,
    DistanceMatrix, Mode,
};
pub use eval::{compare_modes, load_manifest, topk_accuracy, Corpus, DatasetManifest, EvalError, LabelLevel, Split};
pub use load::{load_instance, LoadError};
pub use model::{
    ConstraintTemplate, DistanceParams, ModelError, NormalizedInstance, PairKey, Proportion, RhsClass, VarClass,
    WeightClass,
};
pub use mps::{parse_mps, read_mps_file, MpsError, RawInstance};
pub use normalize::{normalize, render_template_table, NormalizeError};
pub use synth::{generate_synthetic, Family, SizeParams};
