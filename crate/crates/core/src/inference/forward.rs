use super::lattice::{InferenceStats, Lattice, LatticeKind};
use super::trellis::{check_length, EmissionTable, Kernel, Trellis};
use crate::error::Result;
use crate::hmm::HmmModel;
use crate::numeric::log_sum_exp;
use crate::observation::ObservationSequence;

/// Output of the forward pass.
#[derive(Clone, Debug)]
pub struct ForwardResult {
    pub log_likelihood: f64,
    pub lattice: Lattice,
    pub stats: InferenceStats,
}

/// Output of the backward pass.
#[derive(Clone, Debug)]
pub struct BackwardResult {
    /// Total obtained by closing the backward lattice with the ramp and the
    /// first `order` emissions.
    pub log_likelihood: f64,
    pub lattice: Lattice,
    pub stats: InferenceStats,
}

fn stats_for(trellis: &Trellis, n_frames: usize) -> InferenceStats {
    let steps = (n_frames - trellis.order) as u64;
    let per_step = trellis.arcs_per_step();
    InferenceStats {
        mul_add_count: steps * per_step,
        mul_adds_per_step: per_step,
        steps,
        peak_context_cells: trellis.n_contexts as u64,
    }
}

pub(crate) fn forward_pass(
    trellis: &Trellis,
    emissions: &EmissionTable,
) -> (f64, Lattice, InferenceStats) {
    let n = trellis.n_states;
    let k = trellis.order;
    let t_len = emissions.len();
    let mut lattice = Lattice::new(LatticeKind::Forward, k, n, trellis.n_contexts, t_len);
    lattice
        .slice_mut(k - 1)
        .copy_from_slice(&trellis.initial_scores(emissions));

    let mut mul_adds = 0u64;
    let mut terms = Vec::with_capacity(n);
    for t in k..t_len {
        let (prev, cur) = lattice.pair_mut(t - 1);
        for (next, cell) in cur.iter_mut().enumerate() {
            terms.clear();
            for arc in trellis.incoming(next) {
                terms.push(prev[arc.ctx as usize] + trellis.log_trans[arc.trans as usize]);
            }
            mul_adds += terms.len() as u64;
            let lb = emissions.get(t, next % n);
            *cell = log_sum_exp(&terms) + lb;
        }
    }
    let total = log_sum_exp(lattice.slice(t_len - 1));
    let stats = stats_for(trellis, t_len);
    debug_assert_eq!(stats.mul_add_count, mul_adds);
    (total, lattice, stats)
}

pub(crate) fn backward_pass(
    trellis: &Trellis,
    emissions: &EmissionTable,
) -> (f64, Lattice, InferenceStats) {
    let n = trellis.n_states;
    let k = trellis.order;
    let t_len = emissions.len();
    let mut lattice = Lattice::new(LatticeKind::Backward, k, n, trellis.n_contexts, t_len);
    lattice.slice_mut(t_len - 1).fill(0.0);

    let mut terms = Vec::with_capacity(n);
    for t in (k - 1..t_len - 1).rev() {
        let (cur, next_slice) = lattice.pair_mut(t);
        for (ctx, cell) in cur.iter_mut().enumerate() {
            terms.clear();
            for arc in trellis.outgoing(ctx) {
                terms.push(
                    trellis.log_trans[arc.trans as usize]
                        + emissions.get(t + 1, arc.succ as usize)
                        + next_slice[arc.next as usize],
                );
            }
            *cell = log_sum_exp(&terms);
        }
    }
    let init = trellis.initial_scores(emissions);
    let closing: Vec<f64> = init
        .iter()
        .zip(lattice.slice(k - 1))
        .map(|(a, b)| a + b)
        .collect();
    (log_sum_exp(&closing), lattice, stats_for(trellis, t_len))
}

/// Forward recursion in the log domain.
///
/// The lattice starts at time `order - 1` from the ramp and the first
/// `order` emissions; each step shifts the context window by one state. The
/// total is the log-sum over all final contexts.
pub fn forward(model: &HmmModel, obs: &ObservationSequence) -> Result<ForwardResult> {
    forward_with(model, obs, Kernel::Masked)
}

/// [`forward`] with an explicit kernel; both kernels give identical totals.
pub fn forward_with(model: &HmmModel, obs: &ObservationSequence, kernel: Kernel) -> Result<ForwardResult> {
    check_length(model, obs)?;
    let emissions = EmissionTable::new(model, obs)?;
    let trellis = Trellis::new(model, kernel);
    let (log_likelihood, lattice, stats) = forward_pass(&trellis, &emissions);
    Ok(ForwardResult {
        log_likelihood,
        lattice,
        stats,
    })
}

/// Backward recursion in the log domain, terminal slice `ln 1 = 0`.
pub fn backward(model: &HmmModel, obs: &ObservationSequence) -> Result<BackwardResult> {
    backward_with(model, obs, Kernel::Masked)
}

pub fn backward_with(model: &HmmModel, obs: &ObservationSequence, kernel: Kernel) -> Result<BackwardResult> {
    check_length(model, obs)?;
    let emissions = EmissionTable::new(model, obs)?;
    let trellis = Trellis::new(model, kernel);
    let (log_likelihood, lattice, stats) = backward_pass(&trellis, &emissions);
    Ok(BackwardResult {
        log_likelihood,
        lattice,
        stats,
    })
}

/// `ln Σ_ctx exp(α_t(ctx) + β_t(ctx))` for every lattice time.
pub fn combined_totals(forward: &Lattice, backward: &Lattice) -> Vec<f64> {
    forward
        .times()
        .map(|t| {
            let v: Vec<f64> = forward
                .slice(t)
                .iter()
                .zip(backward.slice(t))
                .map(|(a, b)| a + b)
                .collect();
            log_sum_exp(&v)
        })
        .collect()
}
