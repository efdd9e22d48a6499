//! Finite relational structures, restricted classes of them, extension axioms and the
//! probability measures under which such axioms hold almost surely.

pub mod axioms;
pub mod classes;
pub mod colouring;
pub mod counting;
pub mod error;
pub mod experiment;
pub mod fixtures;
pub mod measures;
pub mod pairwise;
pub mod pregeometry;
pub mod structures;
pub mod verify;

pub use axioms::{
    all_k_extension_pairs, is_m_k_saturated, multiplicity, satisfies_extension_axiom, substitution_images,
    ExtensionPair,
};
pub use classes::{ClassRule, ClassSpec, Verdict};
pub use colouring::{ColourAssignment, GadgetS, GadgetU, Gadgets};
pub use error::{Result, ZolError};
pub use measures::{
    exact_probability, monte_carlo, DeltaTable, MeasureKind, ProbResult, ProbValue, Sample, Sampler,
};
pub use pairwise::PairwiseModel;
pub use pregeometry::{d_reduct, GeometryKind, Pregeometry};
pub use structures::{
    canonical_form, enumerate_embeddings, enumerate_structures, induced_substructure, parse_structure,
    parse_structures, serialize_structure, substitute, EmbeddingMode, Mapping, Structure, Symbol, Vocabulary,
    Witness,
};
pub use experiment::{
    list_events, resolve_class, resolve_vocab, run_experiment, EventSpec, ExperimentConfig, ExperimentTable, Mode,
    PreparedEvent,
};
pub use verify::{run_all, CriterionReport};
