use std::fmt;

use serde::{Deserialize, Serialize};

/// Whose move it is. `Stopped` marks the terminal state entered by choosing NA as a VA.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Turn {
    Va,
    Ca,
    Stopped,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VaStatus {
    None,
    Pass,
    Fail,
}

/// Result of executing an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepOutcome {
    Pass,
    Fail,
    /// Deterministic actions (CAs and NA).
    Done,
}

/// Action indices refer to the scenario's activity lists (sorted by id).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    Va(usize),
    Ca(usize),
    Na,
}

/// Canonical system state: turn, ternary VA results, applied CAs.
///
/// The expansion depth is deliberately not part of the identity, so states
/// reached along different histories share lookup-table entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SystemState {
    turn: Turn,
    pass: u64,
    fail: u64,
    applied: u64,
}

impl SystemState {
    pub fn initial() -> Self {
        SystemState { turn: Turn::Va, pass: 0, fail: 0, applied: 0 }
    }

    pub fn new(turn: Turn, statuses: &[VaStatus], applied: &[bool]) -> Self {
        let mut s = SystemState { turn, pass: 0, fail: 0, applied: 0 };
        for (i, st) in statuses.iter().enumerate() {
            s = s.with_status(i, *st);
        }
        for (k, &on) in applied.iter().enumerate() {
            if on {
                s.applied |= 1 << k;
            }
        }
        s
    }

    pub fn turn(&self) -> Turn {
        self.turn
    }

    pub fn va_status(&self, va: usize) -> VaStatus {
        if self.pass >> va & 1 == 1 {
            VaStatus::Pass
        } else if self.fail >> va & 1 == 1 {
            VaStatus::Fail
        } else {
            VaStatus::None
        }
    }

    pub fn ca_applied(&self, ca: usize) -> bool {
        self.applied >> ca & 1 == 1
    }

    pub fn pass_mask(&self) -> u64 {
        self.pass
    }

    pub fn fail_mask(&self) -> u64 {
        self.fail
    }

    pub fn applied_mask(&self) -> u64 {
        self.applied
    }

    /// Number of VAs with a currently valid result.
    pub fn va_count(&self) -> u32 {
        (self.pass | self.fail).count_ones()
    }

    pub fn ca_count(&self) -> u32 {
        self.applied.count_ones()
    }

    pub fn with_turn(mut self, turn: Turn) -> Self {
        self.turn = turn;
        self
    }

    pub fn with_status(mut self, va: usize, status: VaStatus) -> Self {
        let bit = 1u64 << va;
        self.pass &= !bit;
        self.fail &= !bit;
        match status {
            VaStatus::Pass => self.pass |= bit,
            VaStatus::Fail => self.fail |= bit,
            VaStatus::None => {}
        }
        self
    }

    pub(crate) fn with_applied(mut self, ca: usize) -> Self {
        self.applied |= 1 << ca;
        self
    }

    pub(crate) fn clear_results(mut self, mask: u64) -> Self {
        self.pass &= !mask;
        self.fail &= !mask;
        self
    }

    /// Evidence-relevant part of the state (the turn does not affect beliefs).
    pub fn evidence_key(&self) -> (u64, u64, u64) {
        (self.pass, self.fail, self.applied)
    }

    /// Compact text form `turn|statuses|applied`, e.g. `va|NP-F|01`.
    pub fn encode(&self, n_va: usize, n_ca: usize) -> String {
        let turn = match self.turn {
            Turn::Va => "va",
            Turn::Ca => "ca",
            Turn::Stopped => "stop",
        };
        let statuses: String = (0..n_va)
            .map(|i| match self.va_status(i) {
                VaStatus::None => '-',
                VaStatus::Pass => 'P',
                VaStatus::Fail => 'F',
            })
            .collect();
        let applied: String = (0..n_ca).map(|k| if self.ca_applied(k) { '1' } else { '0' }).collect();
        format!("{turn}|{statuses}|{applied}")
    }

    pub fn decode(text: &str) -> Option<SystemState> {
        let mut parts = text.split('|');
        let turn = match parts.next()? {
            "va" => Turn::Va,
            "ca" => Turn::Ca,
            "stop" => Turn::Stopped,
            _ => return None,
        };
        let statuses = parts
            .next()?
            .chars()
            .map(|c| match c {
                '-' => Some(VaStatus::None),
                'P' => Some(VaStatus::Pass),
                'F' => Some(VaStatus::Fail),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        let applied = parts
            .next()?
            .chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()?;
        if parts.next().is_some() || statuses.len() > 64 || applied.len() > 64 {
            return None;
        }
        Some(SystemState::new(turn, &statuses, &applied))
    }
}

impl fmt::Display for SystemState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}[P={:#x} F={:#x} C={:#x}]", self.turn, self.pass, self.fail, self.applied)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_round_trip() {
        let s = SystemState::initial().with_status(3, VaStatus::Fail).with_status(1, VaStatus::Pass);
        assert_eq!(s.va_status(3), VaStatus::Fail);
        assert_eq!(s.va_status(1), VaStatus::Pass);
        assert_eq!(s.va_status(0), VaStatus::None);
        assert_eq!(s.va_count(), 2);
        let s = s.with_status(3, VaStatus::Pass);
        assert_eq!(s.va_status(3), VaStatus::Pass);
        assert_eq!(s.fail_mask(), 0);
    }

    #[test]
    fn encode_decode() {
        let s = SystemState::new(Turn::Ca, &[VaStatus::None, VaStatus::Pass, VaStatus::Fail], &[false, true]);
        let text = s.encode(3, 2);
        assert_eq!(text, "ca|-PF|01");
        assert_eq!(SystemState::decode(&text), Some(s));
        assert_eq!(SystemState::decode("xx|-|0"), None);
    }
}
