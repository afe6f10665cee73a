use super::lattice::{Lattice, LatticeKind};
use super::trellis::{check_length, EmissionTable, Kernel, Trellis};
use crate::error::{Error, Result};
use crate::hmm::{decode_context, HmmModel};
use crate::observation::ObservationSequence;

/// Best state sequence and its joint log-probability.
#[derive(Clone, Debug)]
pub struct ViterbiPath {
    pub states: Vec<usize>,
    pub log_joint: f64,
    /// Best-completion scores, see [`LatticeKind::Viterbi`].
    pub lattice: Lattice,
}

/// Most likely state sequence under an order-k model.
///
/// The max-product recursion runs from the last frame backwards, so every
/// context knows the best score of any completion. Decoding then walks
/// forward choosing, at each step, the smallest state index that attains
/// that score. Among equally scoring sequences this returns the
/// lexicographically smallest.
pub fn viterbi(model: &HmmModel, obs: &ObservationSequence) -> Result<ViterbiPath> {
    check_length(model, obs)?;
    let emissions = EmissionTable::new(model, obs)?;
    let trellis = Trellis::new(model, Kernel::Masked);
    decode(&trellis, &emissions)
}

pub(crate) fn decode(trellis: &Trellis, emissions: &EmissionTable) -> Result<ViterbiPath> {
    let n = trellis.n_states;
    let k = trellis.order;
    let t_len = emissions.len();
    let mut lattice = Lattice::new(LatticeKind::Viterbi, k, n, trellis.n_contexts, t_len);
    lattice.slice_mut(t_len - 1).fill(0.0);
    for t in (k - 1..t_len - 1).rev() {
        let (cur, next_slice) = lattice.pair_mut(t);
        for (ctx, cell) in cur.iter_mut().enumerate() {
            *cell = trellis
                .outgoing(ctx)
                .iter()
                .map(|arc| {
                    trellis.log_trans[arc.trans as usize]
                        + emissions.get(t + 1, arc.succ as usize)
                        + next_slice[arc.next as usize]
                })
                .fold(f64::NEG_INFINITY, f64::max);
        }
    }

    let init = trellis.initial_scores(emissions);
    let mut best = f64::NEG_INFINITY;
    let mut best_ctx = 0;
    for (ctx, (a, b)) in init.iter().zip(lattice.slice(k - 1)).enumerate() {
        let v = a + b;
        if v > best {
            best = v;
            best_ctx = ctx;
        }
    }
    if best == f64::NEG_INFINITY || best.is_nan() {
        return Err(Error::NoValidPath);
    }

    let mut states = decode_context(best_ctx, k, n);
    let mut ctx = best_ctx;
    for t in k..t_len {
        let next_slice = lattice.slice(t);
        let mut choice = None;
        let mut choice_score = f64::NEG_INFINITY;
        for arc in trellis.outgoing(ctx) {
            let v = trellis.log_trans[arc.trans as usize]
                + emissions.get(t, arc.succ as usize)
                + next_slice[arc.next as usize];
            if choice.is_none() || v > choice_score {
                choice = Some(*arc);
                choice_score = v;
            }
        }
        let arc = choice.ok_or(Error::NoValidPath)?;
        states.push(arc.succ as usize);
        ctx = arc.next as usize;
    }

    Ok(ViterbiPath {
        states,
        log_joint: best,
        lattice,
    })
}
