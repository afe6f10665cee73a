use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Allowed-transition structure of a state chain.
///
/// `LeftToRight` moves from state `k` to `{k, k+1}` and the last state is
/// absorbing. `Circular` moves from `k` to `{k, (k+1) mod N}` and has no
/// absorbing state. `Expanded` is the first-order chain over state histories
/// produced by [`crate::inference::expand_to_first_order`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    #[serde(alias = "ltr")]
    LeftToRight,
    Circular,
    Expanded(Box<ExpandedTopology>),
}

/// Composite states are the histories of length `1..=order` of a base chain
/// with `base_states` states. Histories shorter than `order` are the
/// transient start-up states; full-length histories are the steady ones.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpandedTopology {
    pub base: Topology,
    pub base_states: usize,
    pub order: usize,
}

/// A decoded composite state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct History {
    /// Number of base states in the history, `1..=order`.
    pub len: usize,
    /// Base-`N` code of the history, oldest state most significant.
    pub code: usize,
}

impl ExpandedTopology {
    pub fn composite_count(&self) -> usize {
        (1..=self.order).map(|l| self.base_states.pow(l as u32)).sum()
    }

    pub fn steady_count(&self) -> usize {
        self.base_states.pow(self.order as u32)
    }

    fn offset(&self, len: usize) -> usize {
        (1..len).map(|l| self.base_states.pow(l as u32)).sum()
    }

    pub fn encode(&self, h: History) -> usize {
        self.offset(h.len) + h.code
    }

    pub fn decode(&self, mut index: usize) -> History {
        for len in 1..=self.order {
            let block = self.base_states.pow(len as u32);
            if index < block {
                return History { len, code: index };
            }
            index -= block;
        }
        panic!("composite index out of range");
    }

    /// Index of the steady composite state for a full history code.
    pub fn steady_index(&self, code: usize) -> usize {
        self.offset(self.order) + code
    }

    pub fn last_base_state(&self, index: usize) -> usize {
        self.decode(index).code % self.base_states
    }

    fn allows(&self, from: usize, to: usize) -> bool {
        let n = self.base_states;
        let a = self.decode(from);
        let b = self.decode(to);
        let w = b.code % n;
        if !self.base.allows(n, a.code % n, w) {
            return false;
        }
        if a.len < self.order {
            b.len == a.len + 1 && b.code == a.code * n + w
        } else {
            let keep = n.pow(self.order as u32 - 1);
            b.len == self.order && b.code == (a.code % keep) * n + w
        }
    }
}

impl Topology {
    /// Whether a chain with `n_states` states may move from `from` to `to`.
    pub fn allows(&self, n_states: usize, from: usize, to: usize) -> bool {
        match self {
            Topology::LeftToRight => to == from || (to == from + 1 && to < n_states),
            Topology::Circular => to == from || to == (from + 1) % n_states,
            Topology::Expanded(e) => e.allows(from, to),
        }
    }

    /// Whether a chain may start in `state`.
    pub fn allows_start(&self, _n_states: usize, state: usize) -> bool {
        match self {
            Topology::LeftToRight => state == 0,
            Topology::Circular => true,
            Topology::Expanded(e) => {
                let h = e.decode(state);
                h.len == 1 && e.base.allows_start(e.base_states, h.code)
            }
        }
    }

    /// Allowed successors of `from`, ascending.
    pub fn successors(&self, n_states: usize, from: usize) -> Vec<usize> {
        match self {
            Topology::LeftToRight | Topology::Circular => {
                let mut s: Vec<usize> = [from, (from + 1) % n_states]
                    .into_iter()
                    .filter(|&to| self.allows(n_states, from, to))
                    .collect();
                s.sort_unstable();
                s.dedup();
                s
            }
            Topology::Expanded(_) => (0..n_states)
                .filter(|&to| self.allows(n_states, from, to))
                .collect(),
        }
    }

    pub fn is_expanded(&self) -> bool {
        matches!(self, Topology::Expanded(_))
    }

    pub fn short_name(&self) -> &'static str {
        match self {
            Topology::LeftToRight => "ltr",
            Topology::Circular => "circular",
            Topology::Expanded(_) => "expanded",
        }
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.short_name())
    }
}

impl FromStr for Topology {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ltr" | "left-to-right" | "left_to_right" | "lefttoright" => Ok(Topology::LeftToRight),
            "circular" | "c" | "ring" => Ok(Topology::Circular),
            other => Err(Error::param(format!(
                "unknown topology `{other}` (expected ltr or circular)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ltr_successors() {
        let t = Topology::LeftToRight;
        assert_eq!(t.successors(3, 0), vec![0, 1]);
        assert_eq!(t.successors(3, 1), vec![1, 2]);
        assert_eq!(t.successors(3, 2), vec![2]);
        assert!(t.allows_start(3, 0));
        assert!(!t.allows_start(3, 1));
    }

    #[test]
    fn circular_successors_wrap() {
        let t = Topology::Circular;
        assert_eq!(t.successors(3, 2), vec![0, 2]);
        assert_eq!(t.successors(1, 0), vec![0]);
        assert_eq!(t.successors(2, 1), vec![0, 1]);
        assert!((0..3).all(|s| t.allows_start(3, s)));
    }

    #[test]
    fn expanded_codec_round_trips() {
        let e = ExpandedTopology {
            base: Topology::Circular,
            base_states: 2,
            order: 3,
        };
        assert_eq!(e.composite_count(), 2 + 4 + 8);
        assert_eq!(e.steady_count(), 8);
        for i in 0..e.composite_count() {
            assert_eq!(e.encode(e.decode(i)), i);
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!("LTR".parse::<Topology>().unwrap(), Topology::LeftToRight);
        assert_eq!("circular".parse::<Topology>().unwrap(), Topology::Circular);
        assert!("ergodic".parse::<Topology>().is_err());
    }
}
