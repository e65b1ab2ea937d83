//! Analytical counterparts of the simulated schemes: expected symbol
//! counts are fed to AND-OR models to predict when the destination (and,
//! for FCC, each user) finishes decoding.

use super::andor::{and_or_iterate, AnalysisError, AndOrModel, PrecodeGroup, Stream, DEFAULT_ITERS, DEFAULT_TOL};
use super::pcc::{pcc_destination_model, pcc_user_recursion, PartsLayout, DEFAULT_PART_CAP};
use crate::codec::{DegreeDistribution, PrecodeSpec};
use crate::protocol::{Scenario, Scheme};

/// Expected unrecovered symbols below which a block counts as decoded.
pub const DECODED_SYMBOLS: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub scheme: Scheme,
    /// Slot after which every user's block is predicted decoded.
    pub slots: Option<usize>,
    pub frames: Option<usize>,
    /// `M·n / (slots·N)`.
    pub throughput: Option<f64>,
    /// FCC: `switch[u][p]`, the frame from which user `u` includes partner
    /// `p`'s block.
    pub switch: Vec<Vec<Option<usize>>>,
    /// PCC: predicted partner recovery after each frame.
    pub s: Vec<f64>,
}

/// Analysis pipeline for the scenario's scheme.
pub struct Predictor<'a> {
    sc: &'a Scenario,
    switch: Vec<Vec<Option<usize>>>,
    layout: Option<PartsLayout>,
    s: Vec<f64>,
}

impl<'a> Predictor<'a> {
    pub fn new(sc: &'a Scenario) -> Result<Self, AnalysisError> {
        let m = sc.users();
        let mut p = Self { sc, switch: vec![vec![None; m]; m], layout: None, s: Vec::new() };
        match sc.scheme() {
            Scheme::Fcc => p.switch = fcc_switch_frames(sc)?,
            Scheme::Pcc if m > 1 => {
                let e = mean_inter_erasure(sc);
                let traj = pcc_user_recursion(&sc.dists[0], sc.k(), sc.config.symbols_per_slot, m, e, sc.max_frames)?;
                p.layout = Some(PartsLayout::symmetric(m, sc.k(), &traj.s));
                p.s = traj.s;
            }
            _ => {}
        }
        Ok(p)
    }

    /// Predicted unrecovered fraction of each user's block after `slots`
    /// slots.
    pub fn unrecovered(&self, slots: usize) -> Result<Vec<f64>, AnalysisError> {
        let sc = self.sc;
        let (m, k) = (sc.users(), sc.k());
        let kf = k as f64;
        let n_slot = sc.config.symbols_per_slot as f64;
        // received[τ][u]
        let frames = slots.div_ceil(m);
        let received: Vec<Vec<f64>> = (0..frames)
            .map(|t| {
                (0..m)
                    .map(|u| if t * m + u < slots { n_slot * (1.0 - sc.erasures.to_dest(u)) } else { 0.0 })
                    .collect()
            })
            .collect();
        let (mut model, types) = match sc.scheme() {
            Scheme::Pcc if self.layout.is_some() => {
                let d = pcc_destination_model(
                    &sc.dists[0],
                    self.layout.as_ref().expect("checked"),
                    &received,
                    DEFAULT_PART_CAP,
                )?;
                (d.model, d.types)
            }
            scheme => {
                let mut streams = Vec::new();
                for (t, row) in received.iter().enumerate() {
                    for (u, &count) in row.iter().enumerate() {
                        if count <= 0.0 {
                            continue;
                        }
                        let (members, dist): (Vec<usize>, &DegreeDistribution) = match scheme {
                            Scheme::Perfect => ((0..m).collect(), &sc.dists[0]),
                            Scheme::Fcc => {
                                let mut members = vec![u];
                                members.extend((0..m).filter(|&p| {
                                    p != u && self.switch[u][p].is_some_and(|from| from <= t + 1)
                                }));
                                let stage = members.len() - 1;
                                members.sort_unstable();
                                (members, &sc.dists[stage])
                            }
                            _ => (vec![u], &sc.dists[0]),
                        };
                        streams.push(Stream {
                            count,
                            dist: dist.clone(),
                            members: members.into_iter().map(|w| (w, kf)).collect(),
                        });
                    }
                }
                (AndOrModel::from_streams(vec![kf; m], &streams)?, (0..m).map(|u| vec![u]).collect())
            }
        };
        for (u, ids) in types.iter().enumerate() {
            if let Some(g) = precode_group(sc, u, ids.clone()) {
                model.precodes.push(g);
            }
        }
        let r = and_or_iterate(&model, DEFAULT_ITERS, DEFAULT_TOL);
        Ok(types
            .iter()
            .map(|ids| {
                let pop: f64 = ids.iter().map(|&i| model.populations[i]).sum();
                ids.iter().map(|&i| model.populations[i] * r.p[i]).sum::<f64>() / pop
            })
            .collect())
    }

    fn decoded(&self, slots: usize) -> Result<bool, AnalysisError> {
        let kf = self.sc.k() as f64;
        Ok(self.unrecovered(slots)?.iter().all(|&p| p * kf < DECODED_SYMBOLS))
    }

    pub fn predict(&self) -> Result<Prediction, AnalysisError> {
        let sc = self.sc;
        let m = sc.users();
        let cap = sc.max_frames * m;
        let slots = if self.decoded(cap)? {
            // smallest decoded slot count; decoding is monotone in slots
            let (mut lo, mut hi) = (0usize, cap);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if self.decoded(mid)? {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            Some(hi)
        } else {
            None
        };
        let throughput =
            slots.map(|s| (m * sc.n) as f64 / (s * sc.config.symbols_per_slot) as f64);
        Ok(Prediction {
            scheme: sc.scheme(),
            slots,
            frames: slots.map(|s| s.div_ceil(m)),
            throughput,
            switch: self.switch.clone(),
            s: self.s.clone(),
        })
    }
}

/// Runs the analysis pipeline for the scenario's scheme.
pub fn predict(sc: &Scenario) -> Result<Prediction, AnalysisError> {
    Predictor::new(sc)?.predict()
}

fn mean_inter_erasure(sc: &Scenario) -> f64 {
    let m = sc.users();
    let mut sum = 0.0;
    for i in 0..m {
        for j in (0..m).filter(|&j| j != i) {
            sum += sc.erasures.between(i, j);
        }
    }
    sum / (m * (m - 1)) as f64
}

fn precode_group(sc: &Scenario, user: usize, members: Vec<usize>) -> Option<PrecodeGroup> {
    let PrecodeSpec::RegularBipartite { check_degree, .. } = sc.config.precode else {
        return None;
    };
    let code = &sc.precodes[user];
    let checks = code.checks().len();
    if checks == 0 {
        return None;
    }
    Some(PrecodeGroup {
        members,
        message_fraction: code.n() as f64 / code.k() as f64,
        check_degree,
        message_degree: (checks * check_degree) as f64 / code.n() as f64,
    })
}

/// Frame from which each user adds each partner's block: one after the
/// frame by whose end the partner's broadcast-phase symbols alone decode
/// it.
fn fcc_switch_frames(sc: &Scenario) -> Result<Vec<Vec<Option<usize>>>, AnalysisError> {
    let m = sc.users();
    let kf = sc.k() as f64;
    let n_slot = sc.config.symbols_per_slot as f64;
    let mut out = vec![vec![None; m]; m];
    for u in 0..m {
        for p in (0..m).filter(|&p| p != u) {
            let per_frame = n_slot * (1.0 - sc.erasures.between(p, u));
            let decoded = |frames: usize| -> bool {
                let stream = Stream {
                    count: per_frame * frames as f64,
                    dist: sc.dists[0].clone(),
                    members: vec![(0, kf)],
                };
                let Ok(mut model) = AndOrModel::from_streams(vec![kf], &[stream]) else {
                    return false;
                };
                if let Some(g) = precode_group(sc, p, vec![0]) {
                    model.precodes.push(g);
                }
                let r = and_or_iterate(&model, DEFAULT_ITERS, DEFAULT_TOL);
                r.p[0] * kf < DECODED_SYMBOLS
            };
            if per_frame <= 0.0 || !decoded(sc.max_frames) {
                continue;
            }
            let (mut lo, mut hi) = (0usize, sc.max_frames);
            while hi - lo > 1 {
                let mid = (lo + hi) / 2;
                if decoded(mid) {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            out[u][p] = Some(hi + 1);
        }
    }
    Ok(out)
}
