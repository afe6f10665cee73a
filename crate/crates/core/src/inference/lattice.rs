use std::ops::Range;

/// What a lattice holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LatticeKind {
    /// `ln P(O_1..O_t, context at t)`.
    Forward,
    /// `ln P(O_{t+1}..O_T | context at t)`.
    Backward,
    /// Best log-score of any completion `O_{t+1}..O_T` given the context at `t`.
    Viterbi,
}

/// Log-domain values indexed by time and by the context of the `order` most
/// recent states. Times are 0-based and start at `order - 1`, the first
/// frame at which a full context exists.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    pub kind: LatticeKind,
    pub order: usize,
    pub n_states: usize,
    pub n_contexts: usize,
    first_time: usize,
    values: Vec<f64>,
}

impl Lattice {
    pub(crate) fn new(
        kind: LatticeKind,
        order: usize,
        n_states: usize,
        n_contexts: usize,
        n_frames: usize,
    ) -> Self {
        let first_time = order - 1;
        Self {
            kind,
            order,
            n_states,
            n_contexts,
            first_time,
            values: vec![f64::NEG_INFINITY; (n_frames - first_time) * n_contexts],
        }
    }

    /// Time indices covered by the lattice.
    pub fn times(&self) -> Range<usize> {
        self.first_time..self.first_time + self.values.len() / self.n_contexts
    }

    pub fn slice(&self, t: usize) -> &[f64] {
        let i = t - self.first_time;
        &self.values[i * self.n_contexts..(i + 1) * self.n_contexts]
    }

    pub(crate) fn slice_mut(&mut self, t: usize) -> &mut [f64] {
        let i = t - self.first_time;
        &mut self.values[i * self.n_contexts..(i + 1) * self.n_contexts]
    }

    /// Two adjacent slices: `(t, t + 1)`.
    pub(crate) fn pair_mut(&mut self, t: usize) -> (&mut [f64], &mut [f64]) {
        let i = t - self.first_time;
        let (a, b) = self.values[i * self.n_contexts..(i + 2) * self.n_contexts].split_at_mut(self.n_contexts);
        (a, b)
    }

    pub fn get(&self, t: usize, context: usize) -> f64 {
        self.slice(t)[context]
    }
}

/// Operation counts for one recursion pass.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InferenceStats {
    /// Total (context, successor) multiply-adds over all recursion steps.
    pub mul_add_count: u64,
    /// Multiply-adds in one recursion step.
    pub mul_adds_per_step: u64,
    /// Recursion steps, `T - order`.
    pub steps: u64,
    /// Context cells held per time slice, `N^order`.
    pub peak_context_cells: u64,
}
