use crate::error::Result;
use crate::hmm::{
    ExpandedTopology, GmmEmission, HmmModel, InitialRamp, Topology, TransitionTensor,
};

/// Rewrites an order-2 or order-3 model as an equivalent first-order model.
///
/// Composite states are state histories. Histories shorter than the order
/// are transient start-up states whose outgoing probabilities come from the
/// ramp; full histories are steady states whose outgoing probabilities come
/// from the order-k tensor. Every composite state emits with the mixture of
/// its most recent original state, so the forward total is unchanged for
/// any observation sequence. Order-1 input is returned unchanged.
pub fn expand_to_first_order(model: &HmmModel) -> Result<HmmModel> {
    if model.order == 1 {
        return Ok(model.clone());
    }
    let n = model.n_states;
    let k = model.order;
    let layout = ExpandedTopology {
        base: model.topology.clone(),
        base_states: n,
        order: k,
    };
    let big_n = layout.composite_count();
    let topology = Topology::Expanded(Box::new(layout.clone()));

    let mut start_probs = vec![0.0; big_n];
    for s in 0..n {
        start_probs[layout.encode(crate::hmm::History { len: 1, code: s })] = model.ramp.levels[0][s];
    }

    let mut probs = vec![0.0; big_n * big_n];
    for from in 0..big_n {
        let h = layout.decode(from);
        for w in 0..n {
            let (to, p) = if h.len < k {
                let to = layout.encode(crate::hmm::History {
                    len: h.len + 1,
                    code: h.code * n + w,
                });
                (to, model.ramp.levels[h.len][h.code * n + w])
            } else {
                let to = layout.steady_index(crate::hmm::shift_context(h.code, w, n, k));
                (to, model.transitions.get(h.code, w))
            };
            probs[from * big_n + to] = p;
        }
    }

    let emissions: Vec<GmmEmission> = (0..big_n)
        .map(|i| model.emissions[layout.last_base_state(i)].clone())
        .collect();

    HmmModel::from_parts(
        1,
        topology,
        InitialRamp { levels: vec![start_probs] },
        TransitionTensor {
            order: 1,
            n_states: big_n,
            probs,
        },
        emissions,
    )
}
