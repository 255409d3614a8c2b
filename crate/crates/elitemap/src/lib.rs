//! Latent-space mapping of social-media elite follow networks.
//!
//! The pipeline this crate implements:
//!
//! 1. [`elite`] — turn tweet engagement records into an "elite" user set
//!    (several inclusion criteria, popularity score = likes + replies + retweets).
//! 2. [`graph`] — build the directed follow network over those users and
//!    compute the structural quantities downstream stages consume.
//! 3. [`model`] — the latent cluster random effects model: an edge from `i`
//!    to `j` has logit `beta0 - ||z_i - z_j|| + delta_i + gamma_j`, with a
//!    spherical Gaussian-mixture prior on the positions `z` and normal
//!    random effects.
//! 4. [`inference`] — Bayesian fit via Metropolis-within-Gibbs, Procrustes
//!    alignment and label-switching repair of the draws, posterior summaries,
//!    and approximated-BIC selection of the number of clusters.
//! 5. [`analysis`] — robustness sweeps across inclusion criteria, aligned
//!    confusion matrices, partition agreement, and content-word frequencies.
//! 6. [`viz`] — static SVG figures (force-directed network plot, latent-space
//!    map with degree-scaled pie nodes) and GraphML export.
//!
//! Everything is deterministic given a single master seed; see [`seeding`]
//! for how per-stage seeds are derived from it.

pub mod analysis;
pub mod elite;
pub mod graph;
pub mod inference;
pub mod model;
pub mod seeding;
pub mod synth;
pub mod viz;
