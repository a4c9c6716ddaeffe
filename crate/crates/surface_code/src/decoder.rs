use std::collections::VecDeque;

use crate::matching::{min_weight_matching, Matching};
use crate::{Result, StabilizerKind, SurfaceCodePatch, SurfaceError};

/// Matching graph for Z readout: nodes are the Z-type stabilizers, each data
/// qubit is an edge between the (one or two) Z checks containing it, and a
/// qubit in a single check is an edge to the shared boundary node.
#[derive(Debug, Clone)]
pub struct Decoder {
    patch: SurfaceCodePatch,
    checks: Vec<Vec<usize>>,
    on_logical: Vec<bool>,
    /// Shortest-path length between checks, avoiding the boundary.
    dist: Vec<Vec<u64>>,
    /// Parity of the Z̄ overlap of the chosen shortest path.
    parity: Vec<Vec<bool>>,
    boundary_dist: Vec<Option<u64>>,
    boundary_parity: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    pub logical: bool,
    pub defects: Vec<usize>,
    pub matching: Matching,
}

impl Decoder {
    pub fn new(patch: &SurfaceCodePatch) -> Self {
        let checks: Vec<Vec<usize>> = patch.stabilizers_of(StabilizerKind::Z).map(|s| s.support.clone()).collect();
        let nq = patch.num_qubits();
        let nc = checks.len();
        let mut incident = vec![Vec::new(); nq];
        for (c, sup) in checks.iter().enumerate() {
            for &q in sup {
                incident[q].push(c);
            }
        }
        let mut on_logical = vec![false; nq];
        for &q in patch.logical_z_support() {
            on_logical[q] = true;
        }
        // adj[c] = (neighbour check, qubit); boundary qubits per check.
        let mut adj = vec![Vec::new(); nc];
        let mut to_boundary = vec![Vec::new(); nc];
        for q in 0..nq {
            match incident[q][..] {
                [a, b] => {
                    adj[a].push((b, q));
                    adj[b].push((a, q));
                }
                [a] => to_boundary[a].push(q),
                _ => {}
            }
        }
        let mut dist = vec![vec![u64::MAX; nc]; nc];
        let mut parity = vec![vec![false; nc]; nc];
        let mut boundary_dist = vec![None; nc];
        let mut boundary_parity = vec![false; nc];
        for s in 0..nc {
            let (d, par) = (&mut dist[s], &mut parity[s]);
            d[s] = 0;
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                for &(v, q) in &adj[u] {
                    if d[v] == u64::MAX {
                        d[v] = d[u] + 1;
                        par[v] = par[u] ^ on_logical[q];
                        queue.push_back(v);
                    }
                }
            }
            let mut best: Option<(u64, bool)> = None;
            for u in 0..nc {
                if d[u] == u64::MAX {
                    continue;
                }
                for &q in &to_boundary[u] {
                    let cand = (d[u] + 1, par[u] ^ on_logical[q]);
                    if best.is_none_or(|b| cand.0 < b.0) {
                        best = Some(cand);
                    }
                }
            }
            boundary_dist[s] = best.map(|b| b.0);
            boundary_parity[s] = best.is_some_and(|b| b.1);
        }
        Decoder { patch: patch.clone(), checks, on_logical, dist, parity, boundary_dist, boundary_parity }
    }

    pub fn patch(&self) -> &SurfaceCodePatch {
        &self.patch
    }

    pub fn num_checks(&self) -> usize {
        self.checks.len()
    }

    /// Distance between two Z checks in the matching graph.
    pub fn check_distance(&self, a: usize, b: usize) -> u64 {
        self.dist[a][b]
    }

    pub fn boundary_distance(&self, a: usize) -> Option<u64> {
        self.boundary_dist[a]
    }

    /// Z checks violated by `outcomes`.
    pub fn syndrome(&self, outcomes: &[bool]) -> Result<Vec<usize>> {
        self.check_len(outcomes)?;
        Ok((0..self.checks.len())
            .filter(|&c| self.checks[c].iter().fold(false, |acc, &q| acc ^ outcomes[q]))
            .collect())
    }

    /// Minimum-weight matching of `defects` (indices of Z checks).
    pub fn mwpm(&self, defects: &[usize]) -> Matching {
        min_weight_matching(
            defects.len(),
            |i, j| self.dist[defects[i]][defects[j]],
            |i| self.boundary_dist[defects[i]],
        )
    }

    pub fn decode(&self, outcomes: &[bool]) -> Result<DecodeResult> {
        let defects = self.syndrome(outcomes)?;
        let matching = self.mwpm(&defects);
        let mut logical = self.patch.logical_z_support().iter().fold(false, |acc, &q| acc ^ outcomes[q]);
        for &(i, j) in &matching.pairs {
            logical ^= self.parity[defects[i]][defects[j]];
        }
        for &i in &matching.boundary {
            logical ^= self.boundary_parity[defects[i]];
        }
        Ok(DecodeResult { logical, defects, matching })
    }

    fn check_len(&self, outcomes: &[bool]) -> Result<()> {
        if outcomes.len() != self.on_logical.len() {
            return Err(SurfaceError::Length { expected: self.on_logical.len(), found: outcomes.len() });
        }
        Ok(())
    }
}

/// Decodes a full Z-basis readout of `patch` to the logical bit.
pub fn z_readout_decode(patch: &SurfaceCodePatch, outcomes: &[bool]) -> Result<bool> {
    Ok(Decoder::new(patch).decode(outcomes)?.logical)
}

/// Minimum-weight matching of a set of Z-check defects on `patch`.
pub fn mwpm(defects: &[usize], patch: &SurfaceCodePatch) -> Matching {
    Decoder::new(patch).mwpm(defects)
}
