use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WtaStatus {
    /// A single maximum.
    Clear,
    /// Several entries share the maximum; the lowest index wins.
    Tie,
    /// Every count is zero.
    NoWinner,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WtaOutcome {
    pub winner: Option<usize>,
    pub status: WtaStatus,
}

/// Winner-take-all readout over per-unit spike counts.
pub fn wta_readout(counts: &[u32]) -> WtaOutcome {
    let Some(&best) = counts.iter().max() else {
        return WtaOutcome { winner: None, status: WtaStatus::NoWinner };
    };
    if best == 0 {
        return WtaOutcome { winner: None, status: WtaStatus::NoWinner };
    }
    let winner = counts.iter().position(|&c| c == best);
    let status = if counts.iter().filter(|&&c| c == best).count() > 1 {
        WtaStatus::Tie
    } else {
        WtaStatus::Clear
    };
    WtaOutcome { winner, status }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn readout_cases() {
        assert_eq!(wta_readout(&[1, 5, 2]), WtaOutcome { winner: Some(1), status: WtaStatus::Clear });
        assert_eq!(wta_readout(&[3, 1, 3]), WtaOutcome { winner: Some(0), status: WtaStatus::Tie });
        assert_eq!(wta_readout(&[0, 0]).status, WtaStatus::NoWinner);
        assert_eq!(wta_readout(&[]).winner, None);
    }
}
