use crate::error::{Error, Result};
use crate::hmm::{context_count, decode_context, shift_context, HmmModel};
use crate::numeric::ln_or_neg_inf;
use crate::observation::ObservationSequence;

/// Which (context, successor) pairs the recursions visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Kernel {
    /// Only pairs the topology allows.
    #[default]
    Masked,
    /// Every pair, masked ones contributing `-inf`.
    Dense,
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Arc {
    pub ctx: u32,
    pub next: u32,
    pub succ: u32,
    pub trans: u32,
}

/// Context graph of a model with log-domain transitions precomputed.
pub(crate) struct Trellis {
    pub order: usize,
    pub n_states: usize,
    pub n_contexts: usize,
    pub log_trans: Vec<f64>,
    pub log_init_ramp: Vec<f64>,
    /// Arcs grouped by source context, successors ascending.
    pub out_start: Vec<usize>,
    pub out_arcs: Vec<Arc>,
    /// Arcs grouped by destination context, sources ascending.
    pub in_start: Vec<usize>,
    pub in_arcs: Vec<Arc>,
}

impl Trellis {
    pub fn new(model: &HmmModel, kernel: Kernel) -> Self {
        let n = model.n_states;
        let k = model.order;
        let n_contexts = context_count(n, k);
        let log_trans: Vec<f64> = model.transitions.probs.iter().map(|&p| ln_or_neg_inf(p)).collect();

        let succ_of_state: Vec<Vec<usize>> = (0..n)
            .map(|s| match kernel {
                Kernel::Masked => model.topology.successors(n, s),
                Kernel::Dense => (0..n).collect(),
            })
            .collect();

        let mut out_start = Vec::with_capacity(n_contexts + 1);
        let mut out_arcs = Vec::new();
        let mut incoming: Vec<Vec<Arc>> = vec![Vec::new(); n_contexts];
        for ctx in 0..n_contexts {
            out_start.push(out_arcs.len());
            for &w in &succ_of_state[ctx % n] {
                let arc = Arc {
                    ctx: ctx as u32,
                    next: shift_context(ctx, w, n, k) as u32,
                    succ: w as u32,
                    trans: (ctx * n + w) as u32,
                };
                out_arcs.push(arc);
                incoming[arc.next as usize].push(arc);
            }
        }
        out_start.push(out_arcs.len());
        let mut in_start = Vec::with_capacity(n_contexts + 1);
        let mut in_arcs = Vec::with_capacity(out_arcs.len());
        for list in incoming {
            in_start.push(in_arcs.len());
            in_arcs.extend(list);
        }
        in_start.push(in_arcs.len());

        let log_init_ramp = (0..n_contexts)
            .map(|ctx| model.ramp.prefix_log_prob(&decode_context(ctx, k, n), n))
            .collect();

        Self {
            order: k,
            n_states: n,
            n_contexts,
            log_trans,
            log_init_ramp,
            out_start,
            out_arcs,
            in_start,
            in_arcs,
        }
    }

    pub fn outgoing(&self, ctx: usize) -> &[Arc] {
        &self.out_arcs[self.out_start[ctx]..self.out_start[ctx + 1]]
    }

    pub fn incoming(&self, ctx: usize) -> &[Arc] {
        &self.in_arcs[self.in_start[ctx]..self.in_start[ctx + 1]]
    }

    pub fn arcs_per_step(&self) -> u64 {
        self.out_arcs.len() as u64
    }

    /// Log-probability of the first `order` frames for every context:
    /// ramp terms plus their emissions.
    pub fn initial_scores(&self, emissions: &EmissionTable) -> Vec<f64> {
        let n = self.n_states;
        (0..self.n_contexts)
            .map(|ctx| {
                let states = decode_context(ctx, self.order, n);
                states
                    .iter()
                    .enumerate()
                    .fold(self.log_init_ramp[ctx], |acc, (t, &s)| acc + emissions.get(t, s))
            })
            .collect()
    }
}

/// `ln b_s(O_t)` for every frame and state.
pub struct EmissionTable {
    n_states: usize,
    values: Vec<f64>,
}

impl EmissionTable {
    pub fn new(model: &HmmModel, obs: &ObservationSequence) -> Result<Self> {
        if obs.dim() != model.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: model.feature_dim,
                got: obs.dim(),
            });
        }
        let prepared: Vec<_> = model.emissions.iter().map(|e| e.prepare()).collect();
        let mut values = Vec::with_capacity(obs.len() * model.n_states);
        for frame in obs.frames() {
            values.extend(prepared.iter().map(|g| g.log_density(frame)));
        }
        Ok(Self {
            n_states: model.n_states,
            values,
        })
    }

    #[inline]
    pub fn get(&self, t: usize, state: usize) -> f64 {
        self.values[t * self.n_states + state]
    }

    pub fn len(&self) -> usize {
        self.values.len() / self.n_states
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

pub(crate) fn check_length(model: &HmmModel, obs: &ObservationSequence) -> Result<()> {
    if obs.len() < model.order || obs.is_empty() {
        return Err(Error::SequenceTooShort {
            len: obs.len(),
            order: model.order,
        });
    }
    Ok(())
}
