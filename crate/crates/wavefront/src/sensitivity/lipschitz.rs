use super::{propagate, ShiftSeed};
use crate::error::Result;
use crate::fronttrack::{FrontId, History};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Amplification of one unit seed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedAmplification {
    pub front: FrontId,
    pub sigma0: f64,
    /// `sup_T V^ξ(T) / |σ0|`.
    pub ratio: f64,
    /// `V^ξ(t_end) / |σ0|`.
    pub terminal_ratio: f64,
    pub q_xi_same: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LipschitzReport {
    pub tau: f64,
    pub t_end: f64,
    /// `L̂(τ)`: the largest ratio over all seeds.
    pub l_hat: f64,
    pub seeds: Vec<SeedAmplification>,
}

impl LipschitzReport {
    pub fn argmax(&self) -> Option<&SeedAmplification> {
        self.seeds.iter().max_by(|a, b| a.ratio.total_cmp(&b.ratio))
    }
}

/// Seeds every front alive at `tau` with `ξ0 = 1` and records the amplification
/// of `V^ξ` up to the end of the run. Seeds run in parallel.
pub fn lipschitz_estimate(history: &History, tau: f64) -> Result<LipschitzReport> {
    let ids: Vec<FrontId> = history.profile_at(tau).fronts.iter().map(|f| f.id).collect();
    lipschitz_estimate_for(history, tau, &ids)
}

/// [`lipschitz_estimate`] restricted to the given seeds.
pub fn lipschitz_estimate_for(history: &History, tau: f64, ids: &[FrontId]) -> Result<LipschitzReport> {
    let seeds = ids
        .par_iter()
        .map(|&id| {
            let sigma0 = history.fronts[id].front.strength;
            let ledger = propagate(history, ShiftSeed { front: id, xi0: 1.0, tau }, &[])?;
            let a = sigma0.abs();
            Ok(SeedAmplification {
                front: id,
                sigma0,
                ratio: ledger.v_xi_max / a,
                terminal_ratio: ledger.v_xi_final / a,
                q_xi_same: ledger.q_xi_same,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let l_hat = seeds.iter().map(|s| s.ratio).fold(if seeds.is_empty() { 0.0 } else { 1.0 }, f64::max);
    Ok(LipschitzReport { tau, t_end: history.t_end, l_hat, seeds })
}
