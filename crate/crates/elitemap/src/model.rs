//! The latent cluster random effects model.
//!
//! An edge from node `i` to node `j` is Bernoulli with
//! `logit P(y_ij = 1) = beta0 - ||z_i - z_j|| + delta_i + gamma_j`,
//! where `z_i` are latent positions in `d`-dimensional Euclidean space,
//! `delta` and `gamma` are sender and receiver effects, and the positions
//! follow a spherical Gaussian mixture with `K` components.
//!
//! Priors (conjugate family; the numeric defaults in [`ModelConfig`] are
//! implementation choices, fully overridable through the config file):
//!
//! * `beta0 ~ Normal(beta0_mean, beta0_var)`
//! * `delta_i ~ Normal(0, sigma2_delta)`, `sigma2_delta ~ InvGamma(a, b)`
//! * `gamma_j ~ Normal(0, sigma2_gamma)`, `sigma2_gamma ~ InvGamma(a, b)`
//! * `z_i | m_i = g ~ Normal(mu_g, sigma2_g I)`
//! * `m_i | lambda ~ Categorical(lambda)`, `lambda ~ Dirichlet(alpha)`
//! * `mu_g | sigma2_g ~ Normal(0, spread * sigma2_g I)`
//! * `sigma2_g ~ InvGamma(a, b)`

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::graph::DirectedGraph;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("{0}")]
    Domain(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// Row-major `rows x cols` matrix of f64, used for latent positions and
/// mixture means.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coords {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Coords {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Coords { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, ModelError> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(ModelError::Shape("ragged coordinate rows".into()));
        }
        Ok(Coords { rows: n, cols: d, data: rows.into_iter().flatten().collect() })
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn set_row(&mut self, i: usize, values: &[f64]) {
        self.row_mut(i).copy_from_slice(values);
    }

    /// Column means.
    pub fn centroid(&self) -> Vec<f64> {
        let mut c = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (k, v) in self.row(i).iter().enumerate() {
                c[k] += v;
            }
        }
        for v in &mut c {
            *v /= self.rows.max(1) as f64;
        }
        c
    }
}

/// Euclidean distance between two coordinate slices.
pub fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `ln(1 + exp(x))`, stable over the whole f64 range.
pub fn ln_1p_exp(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Logistic function, stable for large |x|.
pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub(crate) fn normal_lpdf(x: f64, mean: f64, var: f64) -> f64 {
    let diff = x - mean;
    -0.5 * ((2.0 * std::f64::consts::PI * var).ln() + diff * diff / var)
}

/// Spherical multivariate normal log-density.
pub(crate) fn spherical_normal_lpdf(x: &[f64], mean: &[f64], var: f64) -> f64 {
    let d = x.len() as f64;
    let sq: f64 = x.iter().zip(mean).map(|(a, b)| (a - b) * (a - b)).sum();
    -0.5 * (d * (2.0 * std::f64::consts::PI * var).ln() + sq / var)
}

/// Inverse-gamma log-density with shape `a` and scale `b`.
pub(crate) fn inv_gamma_lpdf(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return f64::NEG_INFINITY;
    }
    a * b.ln() - ln_gamma(a) - (a + 1.0) * x.ln() - b / x
}

/// Symmetric Dirichlet log-density with concentration `alpha`.
///
/// Weights on the simplex boundary get `-inf`: the sampler never produces
/// them and a zero weight under an occupied component must poison the prior.
pub(crate) fn symmetric_dirichlet_lpdf(weights: &[f64], alpha: f64) -> f64 {
    let k = weights.len() as f64;
    if weights.iter().any(|&w| w <= 0.0) {
        return f64::NEG_INFINITY;
    }
    ln_gamma(alpha * k) - k * ln_gamma(alpha)
        + weights.iter().map(|w| (alpha - 1.0) * w.ln()).sum::<f64>()
}

/// Model dimensions and prior hyperparameters.
///
/// Every default below is an implementation choice of this crate, chosen to
/// be weakly informative on the logit / latent scale; none of them is fixed
/// by the model family itself.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    /// Latent space dimension.
    pub dim: usize,
    /// Number of mixture components.
    pub n_clusters: usize,
    /// Normal prior on the intercept.
    pub beta0_mean: f64,
    pub beta0_var: f64,
    /// Inverse-gamma prior on the sender-effect variance.
    pub sender_var_shape: f64,
    pub sender_var_scale: f64,
    /// Inverse-gamma prior on the receiver-effect variance.
    pub receiver_var_shape: f64,
    pub receiver_var_scale: f64,
    /// Inverse-gamma prior on each spherical cluster variance.
    pub cluster_var_shape: f64,
    pub cluster_var_scale: f64,
    /// Symmetric Dirichlet concentration for the mixture weights.
    pub dirichlet_alpha: f64,
    /// Cluster means have prior `Normal(0, cluster_mean_spread * sigma2_g I)`.
    pub cluster_mean_spread: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            dim: 2,
            n_clusters: 2,
            beta0_mean: 0.0,
            beta0_var: 9.0,
            sender_var_shape: 2.0,
            sender_var_scale: 1.0,
            receiver_var_shape: 2.0,
            receiver_var_scale: 1.0,
            cluster_var_shape: 2.0,
            cluster_var_scale: 1.0,
            dirichlet_alpha: 1.0,
            cluster_mean_spread: 10.0,
        }
    }
}

impl ModelConfig {
    /// Validate, reporting every problem at once.
    pub fn validate(&self) -> Result<(), ModelError> {
        let mut problems = Vec::new();
        if self.dim < 1 {
            problems.push(format!("dim must be >= 1, got {}", self.dim));
        }
        if self.n_clusters < 1 {
            problems.push(format!("n_clusters must be >= 1, got {}", self.n_clusters));
        }
        for (name, v) in [
            ("beta0_var", self.beta0_var),
            ("sender_var_shape", self.sender_var_shape),
            ("sender_var_scale", self.sender_var_scale),
            ("receiver_var_shape", self.receiver_var_shape),
            ("receiver_var_scale", self.receiver_var_scale),
            ("cluster_var_shape", self.cluster_var_shape),
            ("cluster_var_scale", self.cluster_var_scale),
            ("dirichlet_alpha", self.dirichlet_alpha),
            ("cluster_mean_spread", self.cluster_mean_spread),
        ] {
            if !(v > 0.0) {
                problems.push(format!("{name} must be > 0, got {v}"));
            }
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(ModelError::Config(problems))
        }
    }
}

/// Mixture block of a [`ParameterState`]: weights on the K-simplex, K x d
/// component means, and K spherical variances.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mixture {
    pub weights: Vec<f64>,
    pub means: Coords,
    pub variances: Vec<f64>,
}

/// One full state of the model. Memberships are 1-based (`1..=K`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterState {
    #[serde(default = "default_schema_version")]
    pub schema_version: u32,
    pub beta0: f64,
    pub positions: Coords,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub sigma2_delta: f64,
    pub sigma2_gamma: f64,
    pub mixture: Mixture,
    pub memberships: Vec<usize>,
}

fn default_schema_version() -> u32 {
    1
}

impl ParameterState {
    pub fn n_nodes(&self) -> usize {
        self.positions.rows
    }

    pub fn dim(&self) -> usize {
        self.positions.cols
    }

    pub fn n_clusters(&self) -> usize {
        self.mixture.weights.len()
    }

    /// Structural validity: matching shapes, weights on the simplex,
    /// positive variances, memberships in `1..=K`.
    pub fn check_consistent(&self) -> Result<(), ModelError> {
        let n = self.n_nodes();
        let k = self.n_clusters();
        if self.delta.len() != n || self.gamma.len() != n || self.memberships.len() != n {
            return Err(ModelError::Shape(format!(
                "n = {n} but delta/gamma/memberships have lengths {}/{}/{}",
                self.delta.len(),
                self.gamma.len(),
                self.memberships.len()
            )));
        }
        if self.mixture.means.rows != k || self.mixture.variances.len() != k {
            return Err(ModelError::Shape(format!(
                "K = {k} but means/variances have {} rows / {} entries",
                self.mixture.means.rows,
                self.mixture.variances.len()
            )));
        }
        if self.mixture.means.cols != self.dim() {
            return Err(ModelError::Shape(format!(
                "positions have dim {} but means have dim {}",
                self.dim(),
                self.mixture.means.cols
            )));
        }
        let weight_sum: f64 = self.mixture.weights.iter().sum();
        if (weight_sum - 1.0).abs() > 1e-12 {
            return Err(ModelError::Domain(format!(
                "mixture weights sum to {weight_sum}, not 1"
            )));
        }
        if self.sigma2_delta <= 0.0 || self.sigma2_gamma <= 0.0 {
            return Err(ModelError::Domain("effect variances must be > 0".into()));
        }
        if self.mixture.variances.iter().any(|&v| v <= 0.0) {
            return Err(ModelError::Domain("cluster variances must be > 0".into()));
        }
        if self.memberships.iter().any(|&m| m < 1 || m > k) {
            return Err(ModelError::Domain(format!("memberships must lie in 1..={k}")));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String, ModelError> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(text)?)
    }
}

/// `beta0 - ||z_i - z_j|| + delta_i + gamma_j`.
pub fn edge_logit(state: &ParameterState, i: usize, j: usize) -> Result<f64, ModelError> {
    if i == j {
        return Err(ModelError::Domain(format!("edge logit undefined for i = j = {i}")));
    }
    Ok(state.beta0 - distance(state.positions.row(i), state.positions.row(j))
        + state.delta[i]
        + state.gamma[j])
}

/// Bernoulli log-likelihood over all ordered dyads,
/// `sum_{i != j} [ y_ij * eta_ij - ln(1 + exp(eta_ij)) ]`.
pub fn log_likelihood(state: &ParameterState, graph: &DirectedGraph) -> Result<f64, ModelError> {
    let n = graph.node_count();
    if state.n_nodes() != n {
        return Err(ModelError::Shape(format!(
            "state has {} nodes, graph has {n}",
            state.n_nodes()
        )));
    }
    state.check_consistent()?;
    let y = graph.dense_adjacency();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let eta = state.beta0 - distance(state.positions.row(i), state.positions.row(j))
                + state.delta[i]
                + state.gamma[j];
            let term = if y[i * n + j] { eta } else { 0.0 };
            total += term - ln_1p_exp(eta);
        }
    }
    Ok(total)
}

/// Joint log-density of all parameters under the prior.
///
/// Returns `-inf` (as an explicit sentinel, not an error) when the state has
/// zero prior density, e.g. a mixture weight of zero.
pub fn log_prior(state: &ParameterState, config: &ModelConfig) -> Result<f64, ModelError> {
    state.check_consistent()?;
    if state.dim() != config.dim || state.n_clusters() != config.n_clusters {
        return Err(ModelError::Shape(format!(
            "state is ({}, K={}) but config is ({}, K={})",
            state.dim(),
            state.n_clusters(),
            config.dim,
            config.n_clusters
        )));
    }

    let mut total = 0.0;

    // positions given memberships, and memberships given weights
    for i in 0..state.n_nodes() {
        let g = state.memberships[i] - 1;
        total += spherical_normal_lpdf(
            state.positions.row(i),
            state.mixture.means.row(g),
            state.mixture.variances[g],
        );
        let w = state.mixture.weights[g];
        if w <= 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        total += w.ln();
    }

    total += symmetric_dirichlet_lpdf(&state.mixture.weights, config.dirichlet_alpha);

    let origin = vec![0.0; config.dim];
    for g in 0..state.n_clusters() {
        let var_g = state.mixture.variances[g];
        total += spherical_normal_lpdf(
            state.mixture.means.row(g),
            &origin,
            config.cluster_mean_spread * var_g,
        );
        total += inv_gamma_lpdf(var_g, config.cluster_var_shape, config.cluster_var_scale);
    }

    for &d in &state.delta {
        total += normal_lpdf(d, 0.0, state.sigma2_delta);
    }
    total += inv_gamma_lpdf(state.sigma2_delta, config.sender_var_shape, config.sender_var_scale);
    for &g in &state.gamma {
        total += normal_lpdf(g, 0.0, state.sigma2_gamma);
    }
    total += inv_gamma_lpdf(
        state.sigma2_gamma,
        config.receiver_var_shape,
        config.receiver_var_scale,
    );

    total += normal_lpdf(state.beta0, config.beta0_mean, config.beta0_var);

    Ok(total)
}

/// Draw each ordered dyad independently as `Bernoulli(logistic(eta_ij))`.
///
/// Returns the edge index pairs; deterministic given the RNG state.
pub fn sample_edge_indices<R: Rng>(state: &ParameterState, rng: &mut R) -> Vec<(usize, usize)> {
    let n = state.n_nodes();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let eta = state.beta0 - distance(state.positions.row(i), state.positions.row(j))
                + state.delta[i]
                + state.gamma[j];
            if rng.random::<f64>() < logistic(eta) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Sample a network from the generative model with labels `v0..v{n-1}`.
pub fn sample_network(state: &ParameterState, rng_seed: u64) -> DirectedGraph {
    let mut rng = ChaCha12Rng::seed_from_u64(rng_seed);
    let n = state.n_nodes();
    let labels: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let rows: Vec<(String, String)> = sample_edge_indices(state, &mut rng)
        .into_iter()
        .map(|(i, j)| (labels[i].clone(), labels[j].clone()))
        .collect();
    DirectedGraph::from_edge_list_with_nodes(labels.iter().map(String::as_str), &rows)
        .expect("generated labels are valid")
        .graph
}

/// A homogeneous state: all positions at the origin, no effects, one free
/// intercept. Useful as a building block in tests and the demo.
pub fn homogeneous_state(n: usize, dim: usize, n_clusters: usize, beta0: f64) -> ParameterState {
    ParameterState {
        schema_version: 1,
        beta0,
        positions: Coords::zeros(n, dim),
        delta: vec![0.0; n],
        gamma: vec![0.0; n],
        sigma2_delta: 1.0,
        sigma2_gamma: 1.0,
        mixture: Mixture {
            weights: vec![1.0 / n_clusters as f64; n_clusters],
            means: Coords::zeros(n_clusters, dim),
            variances: vec![1.0; n_clusters],
        },
        memberships: vec![1; n],
    }
}
