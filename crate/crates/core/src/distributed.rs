//! The cooperative support-estimation protocol.
//!
//! Each user first runs OMP on its own measurements. Then, for `i = 1..=L`
//! rounds, every user broadcasts its current support estimate to its
//! out-neighbours, fuses what it receives into `i` consensus indices by a
//! (weighted) majority vote and completes the remaining `L - i` indices
//! with OMP warm-started from the consensus. The final coefficients are a
//! local least-squares fit on the agreed support.
//!
//! DiOMP counts every received support once per index. WDiOMP weighs the
//! support from sender `l` at user `k` by `a_lk`, where
//!
//! ```text
//! b_lk ← (1 − v)·b_lk + v·|Ŝ_l \ Ŝ_k|
//! a_lk = (1 / b_lk) / Σ_m (1 / b_mk)
//! ```
//!
//! so neighbours that keep disagreeing with `k` lose influence.

use std::io::Write;

use serde::Serialize;

use crate::recovery::{omp, RecoveryResult, SupportEstimate};
use crate::{CMatrix, CVector, Error, Result};

/// Lower bound on `b_lk`.
pub const WEIGHT_FLOOR: f64 = 1e-12;

/// Directed communication graph between users.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetworkTopology {
    in_neighbors: Vec<Vec<usize>>,
    out_neighbors: Vec<Vec<usize>>,
}

impl NetworkTopology {
    /// Every user hears every user; `include_self` adds the self-loops.
    pub fn complete(num_users: usize, include_self: bool) -> Self {
        let in_neighbors = (0..num_users)
            .map(|k| (0..num_users).filter(|&l| include_self || l != k).collect())
            .collect();
        Self::from_in_neighbors(in_neighbors).expect("complete graph is consistent")
    }

    /// Users that only hear themselves.
    pub fn self_only(num_users: usize) -> Self {
        Self::from_in_neighbors((0..num_users).map(|k| vec![k]).collect())
            .expect("self loops are consistent")
    }

    /// Builds the graph from in-neighbour lists, deriving the out-lists.
    pub fn from_in_neighbors(mut in_neighbors: Vec<Vec<usize>>) -> Result<Self> {
        let k_total = in_neighbors.len();
        let mut out_neighbors = vec![Vec::new(); k_total];
        for (k, row) in in_neighbors.iter_mut().enumerate() {
            row.sort_unstable();
            row.dedup();
            for &l in row.iter() {
                if l >= k_total {
                    return Err(Error::Config(format!(
                        "user {k} lists neighbour {l}, but there are only {k_total} users"
                    )));
                }
                out_neighbors[l].push(k);
            }
        }
        Ok(Self {
            in_neighbors,
            out_neighbors,
        })
    }

    /// Builds the graph from explicit in- and out-lists, which must agree:
    /// `l ∈ in(k)` iff `k ∈ out(l)`.
    pub fn new(in_neighbors: Vec<Vec<usize>>, out_neighbors: Vec<Vec<usize>>) -> Result<Self> {
        if in_neighbors.len() != out_neighbors.len() {
            return Err(Error::Config("in- and out-neighbour lists differ in length".into()));
        }
        let derived = Self::from_in_neighbors(in_neighbors)?;
        for (l, out) in out_neighbors.into_iter().enumerate() {
            let mut out = out;
            out.sort_unstable();
            out.dedup();
            if out != derived.out_neighbors[l] {
                return Err(Error::Config(format!(
                    "out-neighbours of user {l} disagree with the in-neighbour lists"
                )));
            }
        }
        Ok(derived)
    }

    pub fn num_users(&self) -> usize {
        self.in_neighbors.len()
    }

    pub fn in_neighbors(&self, user: usize) -> &[usize] {
        &self.in_neighbors[user]
    }

    pub fn out_neighbors(&self, user: usize) -> &[usize] {
        &self.out_neighbors[user]
    }

    /// Number of other users `user` transmits to (self-loops are free).
    pub fn transmit_degree(&self, user: usize) -> usize {
        self.out_neighbors[user].iter().filter(|&&l| l != user).count()
    }

    /// Common transmit degree, if every user has the same one.
    pub fn uniform_transmit_degree(&self) -> Option<usize> {
        let first = self.transmit_degree(0);
        (1..self.num_users())
            .all(|k| self.transmit_degree(k) == first)
            .then_some(first)
    }
}

/// Adaptive combination weights held by one user for its in-neighbours.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightRow {
    senders: Vec<usize>,
    b: Vec<f64>,
    a: Vec<f64>,
}

impl WeightRow {
    fn uniform(senders: &[usize]) -> Self {
        let n = senders.len();
        Self {
            senders: senders.to_vec(),
            b: vec![1.0; n],
            a: vec![1.0 / n as f64; n],
        }
    }

    pub fn senders(&self) -> &[usize] {
        &self.senders
    }

    pub fn disagreement(&self) -> &[f64] {
        &self.b
    }

    pub fn weights(&self) -> &[f64] {
        &self.a
    }

    pub fn weight_of(&self, sender: usize) -> Option<f64> {
        self.senders.binary_search(&sender).ok().map(|i| self.a[i])
    }

    /// `(sender, a)` pairs.
    pub fn pairs(&self) -> Vec<(usize, f64)> {
        self.senders.iter().copied().zip(self.a.iter().copied()).collect()
    }
}

/// Weight rows for every user plus the forgetting factor `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightTable {
    forgetting: f64,
    rows: Vec<WeightRow>,
}

impl WeightTable {
    /// Starts every `b_lk` at 1, i.e. uniform weights.
    pub fn new(topology: &NetworkTopology, forgetting: f64) -> Result<Self> {
        if !(forgetting > 0.0 && forgetting < 1.0) {
            return Err(Error::Config(format!(
                "forgetting factor must lie in (0, 1), got {forgetting}"
            )));
        }
        Ok(Self {
            forgetting,
            rows: (0..topology.num_users())
                .map(|k| WeightRow::uniform(topology.in_neighbors(k)))
                .collect(),
        })
    }

    pub fn forgetting(&self) -> f64 {
        self.forgetting
    }

    pub fn row(&self, user: usize) -> &WeightRow {
        &self.rows[user]
    }

    pub fn rows(&self) -> &[WeightRow] {
        &self.rows
    }
}

/// Updates user `user`'s weights from the supports it just received and its
/// own estimate from the previous round.
pub fn update_weights(
    table: &mut WeightTable,
    user: usize,
    received: &[(usize, &SupportEstimate)],
    previous_own: &SupportEstimate,
) -> Result<()> {
    let v = table.forgetting;
    let row = table
        .rows
        .get_mut(user)
        .ok_or_else(|| Error::Protocol(format!("no weight row for user {user}")))?;
    for &(sender, support) in received {
        let pos = row.senders.binary_search(&sender).map_err(|_| {
            Error::Protocol(format!("user {user} has no weight for sender {sender}"))
        })?;
        let diff = support.difference_len(previous_own) as f64;
        row.b[pos] = ((1.0 - v) * row.b[pos] + v * diff).max(WEIGHT_FLOOR);
    }
    let total: f64 = row.b.iter().map(|b| 1.0 / b).sum();
    for (a, b) in row.a.iter_mut().zip(&row.b) {
        *a = (1.0 / b) / total;
    }
    Ok(())
}

/// One received support together with the weight it votes with.
#[derive(Debug, Clone, Copy)]
pub struct Ballot<'a> {
    pub sender: usize,
    pub support: &'a SupportEstimate,
    pub weight: f64,
}

/// Accumulated votes `z`, one entry per atom.
#[derive(Debug, Clone, PartialEq)]
pub struct VoteVector(Vec<f64>);

impl VoteVector {
    /// Adds each ballot's weight at the indices of its support.
    pub fn tally(ballots: &[Ballot<'_>], num_atoms: usize) -> Result<Self> {
        let mut z = vec![0.0; num_atoms];
        for b in ballots {
            if !(b.weight >= 0.0) {
                return Err(Error::Protocol(format!(
                    "sender {} votes with invalid weight {}",
                    b.sender, b.weight
                )));
            }
            for &idx in b.support {
                let slot = z.get_mut(idx).ok_or_else(|| {
                    Error::Protocol(format!("sender {} voted for atom {idx} out of range", b.sender))
                })?;
                *slot += b.weight;
            }
        }
        Ok(Self(z))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// The `count` largest entries, lowest index first among equals.
    pub fn top(&self, count: usize) -> SupportEstimate {
        top_indices(&self.0, count, |a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal))
    }
}

fn top_indices<T: Copy>(
    scores: &[T],
    count: usize,
    desc: impl Fn(&T, &T) -> std::cmp::Ordering,
) -> SupportEstimate {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Stable sort keeps ascending index order among ties.
    order.sort_by(|&i, &j| desc(&scores[i], &scores[j]));
    order.truncate(count);
    order.into_iter().collect()
}

fn check_vote(received: usize, count: usize, num_atoms: usize) -> Result<()> {
    if received == 0 {
        return Err(Error::Protocol("vote with no received supports".into()));
    }
    if count == 0 || count > num_atoms {
        return Err(Error::Protocol(format!(
            "cannot select {count} indices out of {num_atoms} atoms"
        )));
    }
    Ok(())
}

/// Weighted majority vote: the `count` indices with the largest
/// accumulated weight.
pub fn weighted_vote(ballots: &[Ballot<'_>], num_atoms: usize, count: usize) -> Result<SupportEstimate> {
    check_vote(ballots.len(), count, num_atoms)?;
    Ok(VoteVector::tally(ballots, num_atoms)?.top(count))
}

/// Simple majority vote: every received support contributes one vote per
/// index.
pub fn majority_vote(received: &[&SupportEstimate], num_atoms: usize, count: usize) -> Result<SupportEstimate> {
    check_vote(received.len(), count, num_atoms)?;
    let mut votes = vec![0u32; num_atoms];
    for support in received {
        for &idx in *support {
            *votes.get_mut(idx).ok_or_else(|| {
                Error::Protocol(format!("vote for atom {idx} out of range"))
            })? += 1;
        }
    }
    Ok(top_indices(&votes, count, |a, b| b.cmp(a)))
}

/// Fusion rule applied in every round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Voting {
    /// DiOMP: unweighted counts.
    Majority,
    /// WDiOMP: weights adapted with forgetting factor `v`.
    Adaptive { forgetting: f64 },
    /// Weighted vote with the uniform initial weights, never updated.
    FrozenUniform,
}

/// Parameters of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProtocolConfig {
    /// Total sparsity `L` known to every user.
    pub sparsity: usize,
    pub voting: Voting,
    /// Number of cooperation rounds; `None` means `L`.
    pub rounds: Option<usize>,
}

/// What happened in one cooperation round.
#[derive(Debug, Clone, PartialEq)]
pub struct RoundTrace {
    /// 1-based round index; equals the consensus size.
    pub round: usize,
    /// Support each user broadcast at the start of the round.
    pub exchanged: Vec<SupportEstimate>,
    /// Each user's `(sender, a)` weights after this round's update; empty
    /// under majority voting.
    pub weights: Vec<Vec<(usize, f64)>>,
    pub consensus: Vec<SupportEstimate>,
    pub bits: u64,
}

/// Full record of a protocol run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ProtocolTrace {
    /// Stage-one local OMP supports.
    pub initial: Vec<SupportEstimate>,
    pub rounds: Vec<RoundTrace>,
    pub total_bits: u64,
}

#[derive(Serialize)]
struct TraceRecord<'a> {
    trial: usize,
    round: usize,
    user: usize,
    exchanged: &'a SupportEstimate,
    weights: &'a [(usize, f64)],
    consensus: &'a SupportEstimate,
}

impl ProtocolTrace {
    /// Writes one JSON object per (round, user) line.
    pub fn write_jsonl<W: Write>(&self, trial: usize, out: &mut W) -> std::io::Result<()> {
        for r in &self.rounds {
            for user in 0..r.exchanged.len() {
                let record = TraceRecord {
                    trial,
                    round: r.round,
                    user,
                    exchanged: &r.exchanged[user],
                    weights: r.weights.get(user).map(Vec::as_slice).unwrap_or(&[]),
                    consensus: &r.consensus[user],
                };
                serde_json::to_writer(&mut *out, &record)?;
                out.write_all(b"\n")?;
            }
        }
        Ok(())
    }
}

/// Per-user estimates plus the protocol trace.
#[derive(Debug, Clone, PartialEq)]
pub struct CooperativeOutcome {
    pub results: Vec<RecoveryResult>,
    pub trace: ProtocolTrace,
    /// Final weight table for adaptive and frozen voting.
    pub weights: Option<WeightTable>,
}

/// `⌈log₂ L̂⌉`, the bits needed to send one atom index.
pub fn index_bits(num_atoms: usize) -> u64 {
    if num_atoms <= 1 {
        0
    } else {
        u64::from(usize::BITS - (num_atoms - 1).leading_zeros())
    }
}

/// Runs the three-stage cooperative protocol.
pub fn run_protocol(
    topology: &NetworkTopology,
    a: &CMatrix,
    ys: &[CVector],
    cfg: ProtocolConfig,
) -> Result<CooperativeOutcome> {
    let k_total = topology.num_users();
    if ys.len() != k_total {
        return Err(Error::Config(format!(
            "topology has {k_total} users but {} measurements were given",
            ys.len()
        )));
    }
    if let Some(k) = (0..k_total).find(|&k| topology.in_neighbors(k).is_empty()) {
        return Err(Error::Config(format!("user {k} has no in-neighbours")));
    }
    let sparsity = cfg.sparsity;
    let rounds = cfg.rounds.unwrap_or(sparsity);
    if rounds > sparsity {
        return Err(Error::Config(format!(
            "{rounds} rounds requested but the sparsity is only {sparsity}"
        )));
    }
    let num_atoms = a.ncols();
    let mut table = match cfg.voting {
        Voting::Majority => None,
        Voting::Adaptive { forgetting } => Some(WeightTable::new(topology, forgetting)?),
        // The forgetting factor is never used when weights are frozen.
        Voting::FrozenUniform => Some(WeightTable::new(topology, 0.5)?),
    };

    // Stage one: independent local estimates.
    let mut current = ys
        .iter()
        .map(|y| omp(a, y, sparsity, &SupportEstimate::new()))
        .collect::<Result<Vec<_>>>()?;
    let mut trace = ProtocolTrace {
        initial: current.iter().map(|r| r.support.clone()).collect(),
        ..Default::default()
    };
    let bits_per_index = index_bits(num_atoms);

    // Stage two: synchronous exchange, vote, local completion.
    for round in 1..=rounds {
        let exchanged: Vec<SupportEstimate> = current.iter().map(|r| r.support.clone()).collect();
        let bits: u64 = (0..k_total)
            .map(|k| topology.transmit_degree(k) as u64 * exchanged[k].len() as u64 * bits_per_index)
            .sum();
        let mut consensus = Vec::with_capacity(k_total);
        let mut weights = Vec::new();
        let mut next = Vec::with_capacity(k_total);
        for k in 0..k_total {
            let received: Vec<(usize, &SupportEstimate)> = topology
                .in_neighbors(k)
                .iter()
                .map(|&l| (l, &exchanged[l]))
                .collect();
            let agreed = match (&cfg.voting, table.as_mut()) {
                (Voting::Majority, _) => {
                    let supports: Vec<&SupportEstimate> = received.iter().map(|&(_, s)| s).collect();
                    majority_vote(&supports, num_atoms, round)?
                }
                (voting, Some(table)) => {
                    if matches!(voting, Voting::Adaptive { .. }) {
                        update_weights(table, k, &received, &exchanged[k])?;
                    }
                    let row = table.row(k);
                    let ballots: Vec<Ballot<'_>> = received
                        .iter()
                        .map(|&(sender, support)| Ballot {
                            sender,
                            support,
                            weight: row.weight_of(sender).expect("row covers in-neighbours"),
                        })
                        .collect();
                    weights.push(row.pairs());
                    weighted_vote(&ballots, num_atoms, round)?
                }
                (_, None) => unreachable!("weighted voting always has a table"),
            };
            // A user whose estimate already contains the consensus keeps it.
            let updated = if agreed.is_subset(&current[k].support) {
                current[k].clone()
            } else {
                omp(a, &ys[k], sparsity, &agreed)?
            };
            consensus.push(agreed);
            next.push(updated);
        }
        trace.total_bits += bits;
        trace.rounds.push(RoundTrace {
            round,
            exchanged,
            weights,
            consensus,
            bits,
        });
        current = next;
    }

    // Stage three: the estimates already carry least-squares coefficients
    // fitted on their final supports.
    Ok(CooperativeOutcome {
        results: current,
        trace,
        weights: table,
    })
}

/// WDiOMP: adaptive weighted majority voting.
pub fn run_wdiomp(
    topology: &NetworkTopology,
    a: &CMatrix,
    ys: &[CVector],
    sparsity: usize,
    forgetting: f64,
) -> Result<CooperativeOutcome> {
    run_protocol(
        topology,
        a,
        ys,
        ProtocolConfig {
            sparsity,
            voting: Voting::Adaptive { forgetting },
            rounds: None,
        },
    )
}

/// DiOMP: simple majority voting.
pub fn run_diomp(topology: &NetworkTopology, a: &CMatrix, ys: &[CVector], sparsity: usize) -> Result<CooperativeOutcome> {
    run_protocol(
        topology,
        a,
        ys,
        ProtocolConfig {
            sparsity,
            voting: Voting::Majority,
            rounds: None,
        },
    )
}

/// Where the support sets are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Scheme {
    /// Measurements quantised and fed back to the base station, which runs
    /// SOMP and returns the support indices.
    CentralizedSomp,
    /// Users exchange support indices for `L` rounds.
    DiompFamily,
}

/// Bits needed to estimate every user's support under `scheme`.
///
/// Centralized: `2·K·T·q + L·⌈log₂ L̂⌉`. Cooperative:
/// `K·out_degree·⌈log₂ L̂⌉·L²`.
pub fn transmission_cost(
    scheme: Scheme,
    bits_per_sample: u64,
    num_users: u64,
    num_slots: u64,
    num_atoms: usize,
    sparsity: u64,
    out_degree: u64,
) -> u64 {
    let idx = index_bits(num_atoms);
    match scheme {
        Scheme::CentralizedSomp => 2 * num_users * num_slots * bits_per_sample + sparsity * idx,
        Scheme::DiompFamily => num_users * out_degree * idx * sparsity * sparsity,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal_model::SupportSet;

    fn s<const N: usize>(v: [usize; N]) -> SupportSet {
        SupportSet::from(v)
    }

    #[test]
    fn unanimous_index_wins() {
        let (a, b, c) = (s([1, 2]), s([1, 3]), s([1, 4]));
        let ballots = [
            Ballot { sender: 0, support: &a, weight: 1.0 / 3.0 },
            Ballot { sender: 1, support: &b, weight: 1.0 / 3.0 },
            Ballot { sender: 2, support: &c, weight: 1.0 / 3.0 },
        ];
        assert_eq!(weighted_vote(&ballots, 8, 1).unwrap(), s([1]));
    }

    #[test]
    fn dominant_weight_wins() {
        let (a, b) = (s([7]), s([2]));
        let ballots = [
            Ballot { sender: 0, support: &b, weight: 0.9 },
            Ballot { sender: 1, support: &a, weight: 0.1 },
        ];
        assert_eq!(weighted_vote(&ballots, 8, 1).unwrap(), s([2]));
        // Swapping the weights flips the outcome.
        let ballots = [
            Ballot { sender: 0, support: &b, weight: 0.1 },
            Ballot { sender: 1, support: &a, weight: 0.9 },
        ];
        assert_eq!(weighted_vote(&ballots, 8, 1).unwrap(), s([7]));
    }

    #[test]
    fn ties_resolve_to_lowest_index() {
        let (a, b) = (s([5, 6]), s([3, 6]));
        assert_eq!(majority_vote(&[&a, &b], 8, 2).unwrap(), s([3, 6]));
        // Unvoted atoms pad from the bottom.
        assert_eq!(majority_vote(&[&a], 8, 4).unwrap(), s([0, 1, 5, 6]));
    }

    #[test]
    fn empty_vote_is_a_protocol_error() {
        assert!(matches!(weighted_vote(&[], 8, 1), Err(Error::Protocol(_))));
        assert!(matches!(majority_vote(&[], 8, 1), Err(Error::Protocol(_))));
        let a = s([1]);
        assert!(majority_vote(&[&a], 8, 9).is_err());
        let bad = [Ballot { sender: 0, support: &a, weight: f64::NAN }];
        assert!(weighted_vote(&bad, 8, 1).is_err());
    }

    #[test]
    fn weight_update_arithmetic() {
        let topo = NetworkTopology::complete(3, true);
        let mut table = WeightTable::new(&topo, 0.1).unwrap();
        let own = s([1, 2, 3, 4, 5]);
        let same = own.clone();
        let disjoint = s([10, 11, 12, 13, 14]);
        let received = [(0, &same), (1, &own), (2, &disjoint)];
        update_weights(&mut table, 1, &received, &own).unwrap();
        let row = table.row(1);
        assert!((row.disagreement()[0] - 0.9).abs() < 1e-15);
        assert!((row.disagreement()[1] - 0.9).abs() < 1e-15);
        assert!((row.disagreement()[2] - 1.4).abs() < 1e-15);
        let inv = [1.0 / 0.9, 1.0 / 0.9, 1.0 / 1.4];
        let total: f64 = inv.iter().sum();
        for (a, i) in row.weights().iter().zip(inv) {
            assert!((a - i / total).abs() < 1e-15);
        }
        assert!((row.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn equal_disagreement_gives_equal_weights() {
        let topo = NetworkTopology::complete(2, false);
        let mut table = WeightTable::new(&topo, 0.1).unwrap();
        let own = s([1, 2]);
        let other = s([2, 3]);
        update_weights(&mut table, 0, &[(1, &other)], &own).unwrap();
        assert_eq!(table.row(0).weights(), &[1.0]);
        let topo = NetworkTopology::complete(3, false);
        let mut table = WeightTable::new(&topo, 0.1).unwrap();
        update_weights(&mut table, 0, &[(1, &other), (2, &other)], &own).unwrap();
        assert_eq!(table.row(0).weights(), &[0.5, 0.5]);
    }

    #[test]
    fn disagreement_floor() {
        let topo = NetworkTopology::complete(2, true);
        let mut table = WeightTable::new(&topo, 0.9).unwrap();
        let own = s([1]);
        for _ in 0..1000 {
            update_weights(&mut table, 0, &[(0, &own), (1, &own)], &own).unwrap();
        }
        assert!(table.row(0).disagreement().iter().all(|&b| b == WEIGHT_FLOOR));
        assert_eq!(table.row(0).weights(), &[0.5, 0.5]);
    }

    #[test]
    fn unknown_sender_rejected() {
        let topo = NetworkTopology::complete(2, false);
        let mut table = WeightTable::new(&topo, 0.1).unwrap();
        let own = s([1]);
        assert!(update_weights(&mut table, 0, &[(0, &own)], &own).is_err());
        assert!(WeightTable::new(&topo, 1.0).is_err());
        assert!(WeightTable::new(&topo, 0.0).is_err());
    }

    #[test]
    fn topology_consistency() {
        let topo = NetworkTopology::complete(4, true);
        for k in 0..4 {
            assert_eq!(topo.in_neighbors(k), &[0, 1, 2, 3]);
            assert_eq!(topo.out_neighbors(k), &[0, 1, 2, 3]);
            assert_eq!(topo.transmit_degree(k), 3);
        }
        assert_eq!(topo.uniform_transmit_degree(), Some(3));
        // User 0 hears user 1, so user 1 must list user 0 as an out-neighbour.
        assert!(NetworkTopology::new(vec![vec![1], vec![]], vec![vec![], vec![0]]).is_ok());
        assert!(NetworkTopology::new(vec![vec![1], vec![]], vec![vec![], vec![1]]).is_err());
        assert!(NetworkTopology::new(vec![vec![1], vec![]], vec![vec![1], vec![0]]).is_err());
        let line = NetworkTopology::new(vec![vec![1], vec![0]], vec![vec![1], vec![0]]).unwrap();
        assert_eq!(line.transmit_degree(0), 1);
        assert!(NetworkTopology::from_in_neighbors(vec![vec![2], vec![0]]).is_err());
    }

    #[test]
    fn worked_cost_example() {
        assert_eq!(index_bits(200), 8);
        assert_eq!(transmission_cost(Scheme::CentralizedSomp, 36, 10, 20, 200, 5, 6), 14_440);
        assert_eq!(transmission_cost(Scheme::DiompFamily, 36, 10, 20, 200, 5, 6), 12_000);
        assert_eq!(transmission_cost(Scheme::DiompFamily, 36, 10, 20, 200, 0, 6), 0);
    }

    #[test]
    fn index_bit_widths() {
        assert_eq!(index_bits(1), 0);
        assert_eq!(index_bits(2), 1);
        assert_eq!(index_bits(3), 2);
        assert_eq!(index_bits(256), 8);
        assert_eq!(index_bits(257), 9);
    }
}
