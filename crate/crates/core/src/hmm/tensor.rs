//! Order-k transition tensors and the start-up ramp.
//!
//! A context is the tuple of the `order` most recent states, encoded in base
//! `N` with the oldest state most significant. Tensor entry `(ctx, w)` lives at
//! `ctx * N + w`.

use serde::{Deserialize, Serialize};

use super::topology::Topology;

/// Encodes a state tuple (oldest first) as a context code.
pub fn encode_context(states: &[usize], n_states: usize) -> usize {
    states.iter().fold(0, |acc, &s| acc * n_states + s)
}

/// Decodes a context code into `len` states, oldest first.
pub fn decode_context(mut code: usize, len: usize, n_states: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = code % n_states;
        code /= n_states;
    }
    out
}

/// Drops the oldest state of `ctx` and appends `next`.
#[inline]
pub fn shift_context(ctx: usize, next: usize, n_states: usize, order: usize) -> usize {
    let keep = n_states.pow(order as u32 - 1);
    (ctx % keep) * n_states + next
}

/// Number of contexts for an order-`order` chain.
pub fn context_count(n_states: usize, order: usize) -> usize {
    n_states.pow(order as u32)
}

/// Dense order-k transition probabilities `a[ctx, w]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitionTensor {
    pub order: usize,
    pub n_states: usize,
    /// Row-major over context then successor; `N^(order+1)` entries.
    pub probs: Vec<f64>,
}

impl TransitionTensor {
    /// Uniform over the successors the topology allows from each context's
    /// most recent state.
    pub fn uniform(order: usize, n_states: usize, topology: &Topology) -> Self {
        let n_ctx = context_count(n_states, order);
        let mut probs = vec![0.0; n_ctx * n_states];
        for ctx in 0..n_ctx {
            let succ = topology.successors(n_states, ctx % n_states);
            let p = 1.0 / succ.len() as f64;
            for w in succ {
                probs[ctx * n_states + w] = p;
            }
        }
        Self {
            order,
            n_states,
            probs,
        }
    }

    pub fn n_contexts(&self) -> usize {
        context_count(self.n_states, self.order)
    }

    #[inline]
    pub fn get(&self, ctx: usize, next: usize) -> f64 {
        self.probs[ctx * self.n_states + next]
    }

    pub fn row(&self, ctx: usize) -> &[f64] {
        &self.probs[ctx * self.n_states..(ctx + 1) * self.n_states]
    }

    pub fn row_mut(&mut self, ctx: usize) -> &mut [f64] {
        let n = self.n_states;
        &mut self.probs[ctx * n..(ctx + 1) * n]
    }
}

/// Start-up distributions for the first `order` states.
///
/// `levels[0]` is the initial distribution over the first state (`N`
/// entries). `levels[m]` for `m >= 1` holds the distribution of state `m+1`
/// given the `m` states before it (`N^(m+1)` entries, rows indexed by the
/// prefix code). An order-k model carries exactly `k` levels.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitialRamp {
    pub levels: Vec<Vec<f64>>,
}

impl InitialRamp {
    pub fn uniform(order: usize, n_states: usize, topology: &Topology) -> Self {
        let starts: Vec<usize> = (0..n_states)
            .filter(|&s| topology.allows_start(n_states, s))
            .collect();
        let mut first = vec![0.0; n_states];
        for &s in &starts {
            first[s] = 1.0 / starts.len() as f64;
        }
        let mut levels = vec![first];
        for m in 1..order {
            let n_prefix = context_count(n_states, m);
            let mut level = vec![0.0; n_prefix * n_states];
            for prefix in 0..n_prefix {
                let succ = topology.successors(n_states, prefix % n_states);
                let p = 1.0 / succ.len() as f64;
                for w in succ {
                    level[prefix * n_states + w] = p;
                }
            }
            levels.push(level);
        }
        Self { levels }
    }

    pub fn order(&self) -> usize {
        self.levels.len()
    }

    pub fn start_probs(&self) -> &[f64] {
        &self.levels[0]
    }

    /// Probability of the first `states.len()` states (at most `order`).
    pub fn prefix_prob(&self, states: &[usize], n_states: usize) -> f64 {
        let mut p = 1.0;
        for m in 0..states.len().min(self.levels.len()) {
            let code = encode_context(&states[..=m], n_states);
            p *= self.levels[m][code];
        }
        p
    }

    /// Log probability of the first `states.len()` states (at most `order`).
    pub fn prefix_log_prob(&self, states: &[usize], n_states: usize) -> f64 {
        let mut lp = 0.0;
        for m in 0..states.len().min(self.levels.len()) {
            let code = encode_context(&states[..=m], n_states);
            lp += crate::numeric::ln_or_neg_inf(self.levels[m][code]);
        }
        lp
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn context_codec() {
        let n = 3;
        for code in 0..27 {
            let s = decode_context(code, 3, n);
            assert_eq!(encode_context(&s, n), code);
        }
        // (2,0,1) then 2 -> (0,1,2)
        let c = encode_context(&[2, 0, 1], n);
        assert_eq!(shift_context(c, 2, n, 3), encode_context(&[0, 1, 2], n));
        assert_eq!(shift_context(1, 2, n, 1), 2);
    }

    #[test]
    fn uniform_tensor_respects_mask() {
        let t = TransitionTensor::uniform(3, 9, &Topology::LeftToRight);
        for ctx in 0..t.n_contexts() {
            let k = ctx % 9;
            for w in 0..9 {
                let p = t.get(ctx, w);
                if w == k || w == k + 1 {
                    assert!(p > 0.0);
                } else {
                    assert_eq!(p, 0.0);
                }
            }
        }
        assert_eq!(t.get(8, 8), 1.0);
    }

    #[test]
    fn uniform_ramp_rows_sum_to_one() {
        let r = InitialRamp::uniform(3, 4, &Topology::Circular);
        assert_eq!(r.order(), 3);
        assert_eq!(r.levels[1].len(), 16);
        assert_eq!(r.levels[2].len(), 64);
        for row in r.levels[2].chunks(4) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        }
        let ltr = InitialRamp::uniform(1, 4, &Topology::LeftToRight);
        assert_eq!(ltr.start_probs(), &[1.0, 0.0, 0.0, 0.0]);
    }
}
