//! Peeling (belief-propagation on the erasure channel) decoders.
//!
//! [`SymbolGraph`] is the explicit form: neighbour lists are edited in
//! place and decoding proceeds in whole sweeps. [`PeelingDecoder`] is the
//! incremental form used by the simulator: symbols can be added at any time
//! and each keeps only its residual degree and the XOR of its unresolved
//! neighbour ids. Both reach the same fixed point.

use std::collections::BTreeSet;

use super::{CodedSymbol, Packet};

/// Which source symbols an observer has resolved, over `users * k` global
/// indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryState {
    users: usize,
    k: usize,
    known: Vec<bool>,
}

impl RecoveryState {
    pub fn new(users: usize, k: usize) -> Self {
        Self { users, k, known: vec![false; users * k] }
    }

    pub fn users(&self) -> usize {
        self.users
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn global(&self, user: usize, index: usize) -> u32 {
        (user * self.k + index) as u32
    }

    pub fn is_known(&self, id: u32) -> bool {
        self.known.get(id as usize).copied().unwrap_or(false)
    }

    /// Marks `id` known; returns true if it was not known before.
    pub fn insert(&mut self, id: u32) -> bool {
        !std::mem::replace(&mut self.known[id as usize], true)
    }

    pub fn mark_user(&mut self, user: usize) {
        self.known[user * self.k..(user + 1) * self.k].fill(true);
    }

    pub fn count_for_user(&self, user: usize) -> usize {
        self.known[user * self.k..(user + 1) * self.k].iter().filter(|&&b| b).count()
    }

    pub fn user_complete(&self, user: usize, prefix: usize) -> bool {
        self.known[user * self.k..user * self.k + prefix].iter().all(|&b| b)
    }

    pub fn total(&self) -> usize {
        self.known.iter().filter(|&&b| b).count()
    }

    pub fn iter_known(&self) -> impl Iterator<Item = u32> + '_ {
        self.known.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i as u32)
    }

    /// True when every symbol known here is also known in `later`.
    pub fn is_subset_of(&self, later: &RecoveryState) -> bool {
        self.known.iter().zip(&later.known).all(|(&a, &b)| !a || b)
    }
}

/// Coded symbols together with what the observer already knows.
#[derive(Debug, Clone)]
pub struct SymbolGraph {
    pub coded: Vec<CodedSymbol>,
    pub known: RecoveryState,
    /// Values of known symbols, for payload-mode stripping.
    pub values: Vec<Option<Packet>>,
}

impl SymbolGraph {
    pub fn new(coded: Vec<CodedSymbol>, known: RecoveryState) -> Self {
        let values = vec![None; known.known.len()];
        Self { coded, known, values }
    }

    /// Removes every edge into a symbol of `known`, XORing its value out of
    /// payloads when available. Degree-0 symbols stay in the graph.
    pub fn strip_known(mut self, known: &RecoveryState) -> SymbolGraph {
        for id in known.iter_known() {
            self.known.insert(id);
        }
        let (known, values) = (&self.known, &self.values);
        for sym in &mut self.coded {
            sym.neighbors.retain(|&n| {
                if !known.is_known(n) {
                    return true;
                }
                if let (Some(payload), Some(value)) = (sym.payload.as_mut(), &values[n as usize]) {
                    payload.xor_assign(value);
                }
                false
            });
        }
        self
    }

    /// Runs up to `max_iters` sweeps. Each sweep resolves every current
    /// degree-1 symbol and strips the resolved sources from the graph.
    /// Returns the newly recovered sources in increasing order.
    pub fn peel_decode(&mut self, max_iters: usize) -> Vec<u32> {
        let mut delta = BTreeSet::new();
        for _ in 0..max_iters {
            let mut resolved = RecoveryState::new(self.known.users, self.known.k);
            let mut any = false;
            for sym in &self.coded {
                if let [id] = sym.neighbors[..] {
                    if resolved.insert(id) {
                        any = true;
                        if let Some(p) = &sym.payload {
                            self.values[id as usize] = Some(p.clone());
                        }
                    }
                }
            }
            if !any {
                break;
            }
            delta.extend(resolved.iter_known());
            let graph = std::mem::replace(
                self,
                SymbolGraph {
                    coded: Vec::new(),
                    known: RecoveryState::new(0, 0),
                    values: Vec::new(),
                },
            );
            *self = graph.strip_known(&resolved);
        }
        delta.into_iter().collect()
    }
}

#[derive(Debug, Clone)]
struct Slot {
    degree: u32,
    xor: u32,
    payload: Option<Packet>,
}

/// Incremental peeling decoder over a fixed space of source symbols.
#[derive(Debug, Clone)]
pub struct PeelingDecoder {
    known: Vec<bool>,
    values: Option<Vec<Option<Packet>>>,
    edges: Vec<Vec<u32>>,
    slots: Vec<Slot>,
    ripple: Vec<u32>,
    fresh: Vec<u32>,
    n_known: usize,
}

impl PeelingDecoder {
    /// Structural decoder (no payloads) over `sources` symbols.
    pub fn new(sources: usize) -> Self {
        Self {
            known: vec![false; sources],
            values: None,
            edges: vec![Vec::new(); sources],
            slots: Vec::new(),
            ripple: Vec::new(),
            fresh: Vec::new(),
            n_known: 0,
        }
    }

    /// Decoder that also tracks packet values.
    pub fn with_payloads(sources: usize) -> Self {
        Self { values: Some(vec![None; sources]), ..Self::new(sources) }
    }

    pub fn sources(&self) -> usize {
        self.known.len()
    }

    pub fn is_known(&self, id: u32) -> bool {
        self.known[id as usize]
    }

    pub fn known_count(&self) -> usize {
        self.n_known
    }

    pub fn known_mask(&self) -> &[bool] {
        &self.known
    }

    pub fn value(&self, id: u32) -> Option<&Packet> {
        self.values.as_ref()?.get(id as usize)?.as_ref()
    }

    pub fn received(&self) -> usize {
        self.slots.len()
    }

    /// Adds an equation `XOR(neighbors) = payload`. Known neighbours are
    /// stripped immediately. Call [`process`](Self::process) to propagate.
    pub fn add_symbol(&mut self, neighbors: &[u32], payload: Option<Packet>) {
        let id = self.slots.len() as u32;
        let mut payload = payload;
        let mut degree = 0u32;
        let mut xor = 0u32;
        for &n in neighbors {
            if self.known[n as usize] {
                if let (Some(p), Some(values)) = (payload.as_mut(), &self.values) {
                    if let Some(v) = &values[n as usize] {
                        p.xor_assign(v);
                    }
                }
            } else {
                degree += 1;
                xor ^= n;
                self.edges[n as usize].push(id);
            }
        }
        if degree == 1 {
            self.ripple.push(id);
        }
        self.slots.push(Slot { degree, xor, payload });
    }

    /// Records out-of-band knowledge of a source symbol.
    pub fn learn(&mut self, id: u32, value: Option<Packet>) {
        if !self.known[id as usize] {
            self.resolve(id, value);
        }
    }

    fn resolve(&mut self, id: u32, value: Option<Packet>) {
        self.known[id as usize] = true;
        self.n_known += 1;
        self.fresh.push(id);
        for slot_id in std::mem::take(&mut self.edges[id as usize]) {
            let slot = &mut self.slots[slot_id as usize];
            slot.degree -= 1;
            slot.xor ^= id;
            if let (Some(p), Some(v)) = (slot.payload.as_mut(), value.as_ref()) {
                p.xor_assign(v);
            }
            if slot.degree == 1 {
                self.ripple.push(slot_id);
            }
        }
        if let Some(values) = self.values.as_mut() {
            values[id as usize] = value;
        }
    }

    /// Resolves degree-1 symbols until none remain. Returns how many sources
    /// were recovered by this call.
    pub fn process(&mut self) -> usize {
        let before = self.n_known;
        while let Some(slot_id) = self.ripple.pop() {
            let slot = &self.slots[slot_id as usize];
            if slot.degree != 1 {
                continue;
            }
            let target = slot.xor;
            if self.known[target as usize] {
                continue;
            }
            let value = slot.payload.clone();
            self.resolve(target, value);
        }
        self.n_known - before
    }

    /// Drains the list of sources resolved since the last call, in
    /// resolution order.
    pub fn take_recovered(&mut self) -> Vec<u32> {
        std::mem::take(&mut self.fresh)
    }

    /// Counts resolved sources in `range`.
    pub fn known_in(&self, range: std::ops::Range<usize>) -> usize {
        self.known[range].iter().filter(|&&b| b).count()
    }

    pub fn all_known_in(&self, range: std::ops::Range<usize>) -> bool {
        self.known[range].iter().all(|&b| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(neighbors: &[u32]) -> CodedSymbol {
        CodedSymbol { origin: 0, frame: 0, neighbors: neighbors.to_vec(), payload: None, seed: 0 }
    }

    #[test]
    fn chain_of_three_is_fully_recovered() {
        let mut graph = SymbolGraph::new(
            vec![sym(&[0]), sym(&[0, 1]), sym(&[1, 2])],
            RecoveryState::new(1, 3),
        );
        assert_eq!(graph.peel_decode(100), vec![0, 1, 2]);

        let mut dec = PeelingDecoder::new(3);
        for s in [&[1u32, 2][..], &[0, 1], &[0]] {
            dec.add_symbol(s, None);
        }
        assert_eq!(dec.process(), 3);
    }

    #[test]
    fn lone_degree_two_recovers_nothing() {
        let mut graph = SymbolGraph::new(vec![sym(&[0, 1])], RecoveryState::new(1, 2));
        assert!(graph.peel_decode(100).is_empty());
        let mut dec = PeelingDecoder::new(2);
        dec.add_symbol(&[0, 1], None);
        assert_eq!(dec.process(), 0);
    }

    #[test]
    fn distinct_singletons_cover_everything() {
        let k = 10;
        let coded = (0..k).map(|i| sym(&[i])).collect();
        let mut graph = SymbolGraph::new(coded, RecoveryState::new(1, k as usize));
        assert_eq!(graph.peel_decode(1).len(), k as usize);
    }

    #[test]
    fn strip_known_drops_edges_and_keeps_inert_symbols() {
        let mut known = RecoveryState::new(1, 3);
        known.insert(0);
        let graph = SymbolGraph::new(vec![sym(&[0, 1]), sym(&[0])], RecoveryState::new(1, 3));
        let stripped = graph.strip_known(&known);
        assert_eq!(stripped.coded[0].neighbors, vec![1]);
        assert!(stripped.coded[1].neighbors.is_empty());
        assert_eq!(stripped.coded.len(), 2);

        let empty = RecoveryState::new(1, 3);
        let graph = SymbolGraph::new(vec![sym(&[0, 1])], RecoveryState::new(1, 3));
        assert_eq!(graph.clone().strip_known(&empty).coded, graph.coded);
    }

    #[test]
    fn max_iters_limits_sweeps() {
        // 0 -> 1 -> 2 needs three sweeps
        let coded = vec![sym(&[0]), sym(&[0, 1]), sym(&[1, 2])];
        let mut graph = SymbolGraph::new(coded, RecoveryState::new(1, 3));
        assert_eq!(graph.peel_decode(1), vec![0]);
        assert_eq!(graph.peel_decode(1), vec![1]);
    }

    #[test]
    fn payload_values_propagate() {
        let p = |b: u8| Packet::from_bytes(vec![b]);
        let mut dec = PeelingDecoder::with_payloads(3);
        dec.add_symbol(&[0, 1], Some(p(0b11)));
        dec.add_symbol(&[1, 2], Some(p(0b110)));
        dec.learn(0, Some(p(0b01)));
        dec.process();
        assert_eq!(dec.value(1), Some(&p(0b10)));
        assert_eq!(dec.value(2), Some(&p(0b100)));
    }
}
