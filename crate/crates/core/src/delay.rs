// SPDX-License-Identifier: Apache-2.0
//! Per-gate-kind propagation delays.
//!
//! File form is a JSON object with one integer per gate kind plus a
//! `time_unit` label. `CE2` is accepted as an alias for `C2`:
//!
//! ```text
//! {"BUF": 0, "AND2": 1, "AND4": 2, "OR2": 1, "OR3": 2, "OR4": 2,
//!  "AO21": 3, "AO22": 2, "AO222": 3, "CE2": 2, "time_unit": "ps"}
//! ```

use std::collections::BTreeMap;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netlist::GateKind;

/// Integer simulation time.
pub type Time = u64;

#[derive(Debug, Error)]
pub enum DelayError {
    #[error("delay for {0} must be at least 1")]
    NonPositive(GateKind),
    #[error("delay table has no entry for {0}")]
    Missing(GateKind),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("malformed delay table: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DelayTable {
    delays: [Time; 10],
    pub time_unit: String,
}

impl Default for DelayTable {
    /// One time unit per gate, zero for buffers.
    fn default() -> Self {
        Self::uniform(1)
    }
}

impl DelayTable {
    pub fn uniform(d: Time) -> Self {
        let mut delays = [d; 10];
        delays[GateKind::BUF.index()] = 0;
        Self {
            delays,
            time_unit: "ps".into(),
        }
    }

    /// Table under which the 2-single/15-dual 32-bit adder is the unique
    /// fastest hybrid configuration.
    pub fn example() -> Self {
        Self::from_pairs(&[
            (GateKind::BUF, 0),
            (GateKind::AND2, 1),
            (GateKind::AND4, 2),
            (GateKind::OR2, 1),
            (GateKind::OR3, 2),
            (GateKind::OR4, 2),
            (GateKind::AO21, 3),
            (GateKind::AO22, 2),
            (GateKind::AO222, 3),
            (GateKind::C2, 2),
        ])
        .expect("example table is valid")
    }

    /// Builds a table from explicit entries; kinds not listed default to 1
    /// (BUF to 0).
    pub fn from_pairs(pairs: &[(GateKind, Time)]) -> Result<Self, DelayError> {
        let mut t = Self::default();
        for &(k, d) in pairs {
            t.delays[k.index()] = d;
        }
        t.check()?;
        Ok(t)
    }

    pub fn get(&self, kind: GateKind) -> Time {
        self.delays[kind.index()]
    }

    pub fn set(&mut self, kind: GateKind, d: Time) -> Result<(), DelayError> {
        let old = self.delays[kind.index()];
        self.delays[kind.index()] = d;
        if let Err(e) = self.check() {
            self.delays[kind.index()] = old;
            return Err(e);
        }
        Ok(())
    }

    /// Register delay: one C-element.
    pub fn register(&self) -> Time {
        self.get(GateKind::C2)
    }

    fn check(&self) -> Result<(), DelayError> {
        for k in GateKind::ALL {
            if k != GateKind::BUF && self.get(k) == 0 {
                return Err(DelayError::NonPositive(k));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&DelayFile::from(self)).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self, DelayError> {
        let f: DelayFile = serde_json::from_str(s)?;
        if let Some(k) = GateKind::ALL.into_iter().find(|k| !f.delays.contains_key(k)) {
            return Err(DelayError::Missing(k));
        }
        let t = DelayTable::from(f);
        t.check()?;
        Ok(t)
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, DelayError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct DelayFile {
    #[serde(flatten)]
    delays: BTreeMap<GateKind, Time>,
    time_unit: String,
}

impl From<&DelayTable> for DelayFile {
    fn from(t: &DelayTable) -> Self {
        DelayFile {
            delays: GateKind::ALL.into_iter().map(|k| (k, t.get(k))).collect(),
            time_unit: t.time_unit.clone(),
        }
    }
}

impl From<DelayFile> for DelayTable {
    fn from(f: DelayFile) -> Self {
        let mut t = DelayTable {
            delays: [Time::MAX; 10],
            time_unit: f.time_unit,
        };
        for (k, d) in f.delays {
            t.delays[k.index()] = d;
        }
        t
    }
}
