//! Dense action-value tables over one-period price-memory states.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Bijection between a tuple of per-seller action indices and a state id in `[0, k^n)`.
///
/// The first seller's action is the most significant digit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StateCodec {
    actions: usize,
    agents: usize,
    states: usize,
}

impl StateCodec {
    pub fn new(actions: usize, agents: usize) -> Result<Self> {
        if actions == 0 || agents == 0 {
            return Err(Error::input("state codec needs at least one action and one agent"));
        }
        let states = u32::try_from(agents)
            .ok()
            .and_then(|n| actions.checked_pow(n))
            .ok_or_else(|| Error::input(format!("{actions}^{agents} states overflow")))?;
        Ok(StateCodec {
            actions,
            agents,
            states,
        })
    }

    pub fn n_states(&self) -> usize {
        self.states
    }

    /// Actions per agent (`k`).
    pub fn n_actions(&self) -> usize {
        self.actions
    }

    pub fn n_agents(&self) -> usize {
        self.agents
    }

    #[inline]
    pub fn encode(&self, actions: &[usize]) -> usize {
        debug_assert_eq!(actions.len(), self.agents);
        actions.iter().fold(0, |acc, &a| {
            debug_assert!(a < self.actions);
            acc * self.actions + a
        })
    }

    pub fn decode(&self, state: usize) -> Vec<usize> {
        let mut out = vec![0; self.agents];
        self.decode_into(state, &mut out);
        out
    }

    pub fn decode_into(&self, mut state: usize, out: &mut [usize]) {
        for slot in out.iter_mut().rev() {
            *slot = state % self.actions;
            state /= self.actions;
        }
    }
}

/// `|S| x |A|` matrix of action-values, row-major by state.
#[derive(Clone, Debug, PartialEq)]
pub struct QTable<T> {
    codec: StateCodec,
    n_actions: usize,
    values: Vec<T>,
}

impl<T: Scalar> QTable<T> {
    /// Table over the states of `codec` with `n_actions` columns, every cell set to `value`.
    pub fn filled(codec: StateCodec, n_actions: usize, value: T) -> Self {
        QTable {
            codec,
            n_actions,
            values: vec![value; codec.n_states() * n_actions],
        }
    }

    pub fn zeros(codec: StateCodec, n_actions: usize) -> Self {
        Self::filled(codec, n_actions, T::zero())
    }

    pub fn codec(&self) -> &StateCodec {
        &self.codec
    }

    pub fn n_states(&self) -> usize {
        self.codec.n_states()
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    #[inline]
    pub fn get(&self, state: usize, action: usize) -> T {
        self.values[state * self.n_actions + action]
    }

    #[inline]
    pub fn set(&mut self, state: usize, action: usize, value: T) {
        self.values[state * self.n_actions + action] = value;
    }

    #[inline]
    pub fn row(&self, state: usize) -> &[T] {
        &self.values[state * self.n_actions..(state + 1) * self.n_actions]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.values
    }

    /// Greedy action of `state`; ties go to the lowest index.
    #[inline]
    pub fn argmax(&self, state: usize) -> usize {
        argmax(self.row(state))
    }

    #[inline]
    pub fn max(&self, state: usize) -> T {
        self.row(state)
            .iter()
            .fold(T::neg_infinity(), |best, &v| if v > best { v } else { best })
    }

    /// Writes `state,action,value` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "state,action,value")?;
        for s in 0..self.n_states() {
            for a in 0..self.n_actions {
                writeln!(out, "{s},{a},{:.16e}", self.get(s, a))?;
            }
        }
        out.flush()?;
        Ok(())
    }

    /// Reads a dump produced by [`QTable::write_csv`]; every cell must appear exactly once.
    pub fn read_csv<R: BufRead>(input: R, codec: StateCodec, n_actions: usize) -> Result<Self> {
        let mut table = Self::zeros(codec, n_actions);
        let mut seen = vec![false; table.values.len()];
        let mut lines = input.lines().enumerate();
        match lines.next() {
            Some((_, Ok(header))) if header.trim() == "state,action,value" => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => {
                return Err(Error::Parse {
                    line: 1,
                    message: "expected header `state,action,value`".into(),
                })
            }
        }
        for (idx, line) in lines {
            let line = line?;
            let line_no = idx + 1;
            if line.trim().is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                line: line_no,
                message,
            };
            let mut fields = line.split(',');
            let (Some(s), Some(a), Some(v), None) =
                (fields.next(), fields.next(), fields.next(), fields.next())
            else {
                return Err(parse_err(format!("expected 3 fields in `{line}`")));
            };
            let s: usize = s.trim().parse().map_err(|e| parse_err(format!("state: {e}")))?;
            let a: usize = a.trim().parse().map_err(|e| parse_err(format!("action: {e}")))?;
            let v: f64 = v.trim().parse().map_err(|e| parse_err(format!("value: {e}")))?;
            if s >= table.n_states() || a >= n_actions {
                return Err(parse_err(format!("cell ({s}, {a}) outside the table")));
            }
            let cell = s * n_actions + a;
            if std::mem::replace(&mut seen[cell], true) {
                return Err(parse_err(format!("cell ({s}, {a}) listed twice")));
            }
            table.values[cell] = T::lit(v);
        }
        if let Some(missing) = seen.iter().position(|&x| !x) {
            return Err(Error::Parse {
                line: 0,
                message: format!(
                    "cell ({}, {}) missing from dump",
                    missing / n_actions,
                    missing % n_actions
                ),
            });
        }
        Ok(table)
    }
}

/// Index of the first maximal element.
#[inline]
pub fn argmax<T: Scalar>(row: &[T]) -> usize {
    let mut best = 0;
    for (i, &v) in row.iter().enumerate().skip(1) {
        if v > row[best] {
            best = i;
        }
    }
    best
}
