//! Discrete-time TDMA execution of the four schemes.
//!
//! One trial is a loop over time frames; frame `t` has `M` slots and user
//! `u` sends `N` coded packets in slot `u`. The destination decodes after
//! every slot and acknowledges as soon as every user's message is known.
//! Users decode what they overheard at frame ends (every frame for FCC,
//! every `F` frames for PCC).

use super::{Scenario, Scheme, TranscriptStats};
use crate::channel::{rng_stream, survives, Link, StreamLabel};
use crate::codec::{lt_encode, Packet, PeelingDecoder, SymbolTag};
use crate::protocol::{control_overhead, Fidelity, ProtocolError};

struct Node {
    dec: PeelingDecoder,
    union: Vec<u32>,
    partner_done: Vec<bool>,
    stage: usize,
}

struct Trial<'a> {
    sc: &'a Scenario,
    trial: u64,
    m: usize,
    k: usize,
    payload: bool,
    truth: Vec<Packet>,
}

impl<'a> Trial<'a> {
    fn new(sc: &'a Scenario, trial: u64) -> Self {
        let m = sc.users();
        let k = sc.k();
        let payload = sc.config.fidelity == Fidelity::Payload;
        let mut truth = Vec::new();
        if payload {
            for (u, code) in sc.precodes.iter().enumerate() {
                let mut rng = rng_stream(
                    sc.config.master_seed,
                    StreamLabel::new(trial, 0, Link::Source { user: u as u16 }),
                );
                let message: Vec<Packet> =
                    (0..sc.n).map(|_| Packet::random(sc.config.packet_bits, &mut rng)).collect();
                truth.extend(code.encode(&message).expect("message length matches precode"));
            }
        }
        Self { sc, trial, m, k, payload, truth }
    }

    fn decoder(&self) -> PeelingDecoder {
        if self.payload {
            PeelingDecoder::with_payloads(self.m * self.k)
        } else {
            PeelingDecoder::new(self.m * self.k)
        }
    }

    fn zero(&self) -> Option<Packet> {
        self.payload.then(|| Packet::zeros(self.sc.config.packet_bits))
    }

    fn add_precode(&self, dec: &mut PeelingDecoder, user: usize) {
        let base = (user * self.k) as u32;
        for eq in self.sc.precodes[user].constraints(base) {
            dec.add_symbol(&eq, self.zero());
        }
    }

    fn block(&self, user: usize) -> std::ops::Range<u32> {
        (user * self.k) as u32..((user + 1) * self.k) as u32
    }

    fn user_node(&self, user: usize, with_precode: bool) -> Node {
        let mut dec = self.decoder();
        if with_precode {
            for p in (0..self.m).filter(|&p| p != user) {
                self.add_precode(&mut dec, p);
            }
        }
        for id in self.block(user) {
            dec.learn(id, self.payload.then(|| self.truth[id as usize].clone()));
        }
        dec.take_recovered();
        Node {
            dec,
            union: self.block(user).collect(),
            partner_done: (0..self.m).map(|p| p == user).collect(),
            stage: 0,
        }
    }

    fn run(&self) -> TranscriptStats {
        let sc = self.sc;
        let (m, k, n_slot) = (self.m, self.k, sc.config.symbols_per_slot);
        let scheme = sc.scheme();
        let cooperative = matches!(scheme, Scheme::Fcc | Scheme::Pcc);
        let mut nodes: Vec<Node> = if cooperative {
            (0..m).map(|u| self.user_node(u, scheme == Scheme::Fcc)).collect()
        } else {
            Vec::new()
        };
        let everything: Vec<u32> = (0..(m * k) as u32).collect();

        let mut dest = self.decoder();
        for u in 0..m {
            self.add_precode(&mut dest, u);
        }
        dest.process();

        let mut stats = TranscriptStats::new(scheme, m);
        let message_done =
            |dest: &PeelingDecoder, u: usize| dest.all_known_in(u * k..u * k + sc.n);
        let mut slot_index = 0usize;

        for t in 1..=sc.max_frames {
            for u in 0..m {
                slot_index += 1;
                let (union, dist) = match scheme {
                    Scheme::Nocoop => (&everything[u * k..(u + 1) * k], &sc.dists[0]),
                    Scheme::Perfect => (&everything[..], &sc.dists[0]),
                    Scheme::Pcc => (&nodes[u].union[..], &sc.dists[0]),
                    Scheme::Fcc => (&nodes[u].union[..], &sc.dists[nodes[u].stage]),
                };
                let mut enc_rng = rng_stream(
                    sc.config.master_seed,
                    StreamLabel::new(self.trial, t as u64, Link::Encode { user: u as u16 }),
                );
                let tag = SymbolTag { origin: u, frame: t as u32 };
                let mut symbols =
                    lt_encode(union, dist, n_slot, tag, &mut enc_rng).expect("union is never empty");
                if self.payload {
                    for sym in &mut symbols {
                        let mut acc = Packet::zeros(sc.config.packet_bits);
                        for &id in &sym.neighbors {
                            let value = if cooperative {
                                nodes[u].dec.value(id).expect("sender knows its encoding union")
                            } else {
                                &self.truth[id as usize]
                            };
                            acc.xor_assign(value);
                        }
                        sym.payload = Some(acc);
                    }
                }
                stats.symbols_sent[u] += n_slot;

                let mut dest_rng = rng_stream(
                    sc.config.master_seed,
                    StreamLabel::new(self.trial, t as u64, Link::ToDestination { user: u as u16 }),
                );
                let e_dest = sc.erasures.to_dest(u);
                for sym in &symbols {
                    if survives(e_dest, &mut dest_rng) {
                        dest.add_symbol(&sym.neighbors, sym.payload.clone());
                    }
                }
                dest.process();
                for v in 0..m {
                    if stats.dest_decode_slot[v].is_none() && message_done(&dest, v) {
                        stats.dest_decode_slot[v] = Some(slot_index);
                    }
                }
                if stats.dest_decode_slot.iter().all(Option::is_some) {
                    stats.complete = true;
                    stats.frames_used = t;
                    stats.slots_used = slot_index;
                    let total: usize = stats.symbols_sent.iter().sum();
                    let mut throughput = (m * sc.n) as f64 / total as f64;
                    if sc.config.fold_overhead && scheme == Scheme::Pcc {
                        throughput *= 1.0
                            - control_overhead(
                                m,
                                k,
                                sc.config.packet_bits,
                                n_slot,
                                sc.config.decode_period,
                            );
                    }
                    stats.throughput = Some(throughput);
                    if self.payload {
                        stats.payload_verified = Some(
                            (0..m).all(|v| {
                                (v * k..v * k + sc.n)
                                    .all(|id| dest.value(id as u32) == Some(&self.truth[id]))
                            }),
                        );
                    }
                    return stats;
                }

                if cooperative {
                    for r in (0..m).filter(|&r| r != u) {
                        let mut link_rng = rng_stream(
                            sc.config.master_seed,
                            StreamLabel::new(
                                self.trial,
                                t as u64,
                                Link::Between { from: u as u16, to: r as u16 },
                            ),
                        );
                        let e = sc.erasures.between(u, r);
                        for sym in &symbols {
                            if survives(e, &mut link_rng) {
                                nodes[r].dec.add_symbol(&sym.neighbors, sym.payload.clone());
                            }
                        }
                    }
                }
            }

            if cooperative {
                let decode_now = scheme == Scheme::Fcc || t % sc.config.decode_period == 0;
                for (r, node) in nodes.iter_mut().enumerate() {
                    if !decode_now {
                        continue;
                    }
                    node.dec.process();
                    let fresh = node.dec.take_recovered();
                    match scheme {
                        Scheme::Pcc => node.union.extend(fresh),
                        _ => {
                            for p in 0..m {
                                if !node.partner_done[p] && node.dec.all_known_in(p * k..(p + 1) * k)
                                {
                                    node.partner_done[p] = true;
                                    node.union.extend(self.block(p));
                                    node.stage += 1;
                                    stats.phase_switch_tf[r].push(t + 1);
                                }
                            }
                        }
                    }
                }
                stats.per_tf_recovery.push(
                    nodes
                        .iter()
                        .flat_map(|node| (0..m).map(|p| node.dec.known_in(p * k..(p + 1) * k)))
                        .collect(),
                );
            }
            stats
                .dest_known_per_tf
                .push((0..m).map(|u| dest.known_in(u * k..(u + 1) * k)).collect());
        }
        stats.frames_used = sc.max_frames;
        stats.slots_used = slot_index;
        stats
    }
}

/// Runs one trial of whatever scheme the scenario names.
pub fn run_trial(sc: &Scenario, trial: u64) -> TranscriptStats {
    Trial::new(sc, trial).run()
}

fn run_checked(sc: &Scenario, trial: u64, want: Scheme) -> Result<TranscriptStats, ProtocolError> {
    if sc.scheme() != want {
        return Err(ProtocolError::SchemeMismatch { expected: want, found: sc.scheme() });
    }
    Ok(run_trial(sc, trial))
}

/// Each user encodes its own block only.
pub fn run_nocoop(sc: &Scenario, trial: u64) -> Result<TranscriptStats, ProtocolError> {
    run_checked(sc, trial, Scheme::Nocoop)
}

/// Every user encodes over all `M·k` intermediates.
pub fn run_perfect(sc: &Scenario, trial: u64) -> Result<TranscriptStats, ProtocolError> {
    run_checked(sc, trial, Scheme::Perfect)
}

/// Broadcast phase with `Φ^(1)`, then `Φ^(m+1)` over the blocks of the `m`
/// fully decoded partners.
pub fn run_fcc(sc: &Scenario, trial: u64) -> Result<TranscriptStats, ProtocolError> {
    run_checked(sc, trial, Scheme::Fcc)
}

/// One `Ω` over the own block plus every partner symbol recovered so far.
pub fn run_pcc(sc: &Scenario, trial: u64) -> Result<TranscriptStats, ProtocolError> {
    run_checked(sc, trial, Scheme::Pcc)
}
