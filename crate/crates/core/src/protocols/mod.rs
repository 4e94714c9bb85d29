//! Agent protocols. Each one implements [`crate::sim::Protocol`]; the
//! pieces shared between them (tours, group merging, the map explorer,
//! tree walks) live in their own modules as plain state machines.

mod dovetail;
mod gather;
mod mapping;
mod omega;
mod quotient_probe;
mod rdv;
mod reduce;
mod registry;
mod tour;
mod walk;

pub use dovetail::{length_lex, DovetailTreesize};
pub use gather::{Gather, Gatherer, Schedule};
pub use mapping::{Explorer, ExplorerStep, TeamMap, TeamMapState, TokenMap};
pub use omega::{decode_omega_input, OmegaInput, OmegaVerify};
pub use quotient_probe::{CycleCoSun, QuotientProbe};
pub use rdv::Rdv;
pub use reduce::{lift_with_class, ReduceState, ReduceToOmega};
pub use registry::{default_budget, gather_horizon, protocol_names, run_named, NamedRun, RunRequest};
pub use tour::DfsTour;
pub use walk::{
    decode_size_certificate, DecideOdd, DecideTreesize, PathCertificate, TreeWalk, VerifyDegree,
    VerifyTreeSize, WalkCheck,
};

/// `n^n`, saturating.
fn pow_self(n: u64) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..n {
        acc = acc.saturating_mul(n);
    }
    acc
}

/// Length of one padded tour slot: `2 n^n` rounds.
pub fn slot(n: u64) -> u64 {
    pow_self(n).saturating_mul(2)
}

/// Rounds after which an agent with id `i` running rendezvous for size `n`
/// is back at its start for good: `2 (i + 1) n^n`.
pub fn tau(n: u64, i: u64) -> u64 {
    slot(n).saturating_mul(i.saturating_add(1))
}

/// Largest [`tau`] over ids below `2^b`: `2 * 2^b * n^n`.
pub fn tau_max(n: u64, b: u32) -> u64 {
    let ids = 1u64.checked_shl(b).unwrap_or(u64::MAX);
    slot(n).saturating_mul(ids)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budgets() {
        assert_eq!(tau(2, 1), 16);
        assert_eq!(tau(4, 2), 1536);
        assert_eq!(slot(1), 2);
        assert_eq!(tau_max(4, 2), 2048);
        assert_eq!(tau(30, 5), u64::MAX);
    }

    #[test]
    fn tau_is_bounded_by_tau_max() {
        for n in 1..6 {
            for b in 0..5u32 {
                for i in 0..(1u64 << b) {
                    assert!(tau(n, i) <= tau_max(n, b));
                    assert!(tau(n, i) <= tau(n + 1, i) && tau(n, i) < tau(n, i + 1));
                }
            }
        }
    }
}
