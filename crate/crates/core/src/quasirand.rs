//! Edge-distribution measurements: `e(S, T)`, the discrepancy constant for
//! `QR(theta)`, spectral mixing certificates and clique census.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSet;
use crate::ff::FieldElement;
use crate::graph::GraphInstance;
use crate::spectral::SpectrumReport;

/// Largest `q` for exhaustive discrepancy (`4^q` ordered pairs).
pub const MAX_EXHAUSTIVE: usize = 13;
pub const MAX_CENSUS_Q: usize = 2000;
pub const MAX_CENSUS_M: u32 = 5;

/// Offset between per-worker seed streams.
const STREAM_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;
/// Structured neighborhoods are taken from this many leading vertices.
const MAX_STRUCTURED_NEIGHBORHOODS: usize = 512;
const HILL_CLIMB_PASSES: usize = 3;

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum QuasiError {
    #[error("q = {q} exceeds the limit of {max} for this computation")]
    TooLarge { q: usize, max: usize },
    #[error("clique size m = {m} must satisfy 2 <= m <= {max}")]
    BadCliqueSize { m: u32, max: u32 },
    #[error("samples must be at least 1")]
    NoSamples,
}

/// `#{(u, v) in S x T : uv in E}`; edges inside `S & T` count twice.
pub fn e_st(g: &GraphInstance, s: &BitSet, t: &BitSet) -> u64 {
    s.iter()
        .map(|u| crate::bits::intersect_count(g.row(u), t.words()) as u64)
        .sum()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Argmax {
    /// Which phase found the pair: `exhaustive`, `random`, `structured:<name>`,
    /// or `hill_climb`.
    pub source: String,
    pub s: Vec<u32>,
    pub t: Vec<u32>,
    pub e: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub theta: f64,
    pub c_hat: f64,
    pub argmax: Argmax,
    pub mode: Mode,
    /// Pairs `(S, T)` examined.
    pub samples: u64,
    pub seed: u64,
}

/// `|e - |S||T|/2| / (q^theta sqrt(|S||T|))`.
pub fn ratio(q: usize, theta: f64, e: u64, s: usize, t: usize) -> f64 {
    if s == 0 || t == 0 {
        return 0.0;
    }
    let st = (s * t) as f64;
    (e as f64 - st / 2.0).abs() / ((q as f64).powf(theta) * st.sqrt())
}

fn mask_to_vec(mask: u32, n: usize) -> Vec<u32> {
    (0..n as u32).filter(|i| mask >> i & 1 == 1).collect()
}

/// Exact `c_hat` over all ordered pairs of nonempty subsets.
pub fn discrepancy_exhaustive(g: &GraphInstance, theta: f64) -> Result<DiscrepancyReport, QuasiError> {
    let n = g.q();
    if n > MAX_EXHAUSTIVE {
        return Err(QuasiError::TooLarge { q: n, max: MAX_EXHAUSTIVE });
    }
    let rows: Vec<u32> = (0..n).map(|u| g.row(u).first().copied().unwrap_or(0) as u32).collect();
    let qt = (n as f64).powf(theta);
    let scale: Vec<Vec<f64>> = (0..=n)
        .map(|s| (0..=n).map(|t| 1.0 / (qt * ((s * t) as f64).sqrt())).collect())
        .collect();
    let full = 1u32 << n;
    let best = (1..full)
        .into_par_iter()
        .map(|t| {
            let tc = t.count_ones() as usize;
            let cnt: Vec<u32> = rows.iter().map(|r| (r & t).count_ones()).collect();
            let mut sums = vec![0u32; full as usize];
            let mut best = (f64::NEG_INFINITY, 0u32, t, 0u32);
            for s in 1..full {
                let low = s.trailing_zeros() as usize;
                let e = sums[(s & (s - 1)) as usize] + cnt[low];
                sums[s as usize] = e;
                let sc = s.count_ones() as usize;
                let r = (e as f64 - (sc * tc) as f64 / 2.0).abs() * scale[sc][tc];
                if r > best.0 {
                    best = (r, s, t, e);
                }
            }
            best
        })
        .reduce(
            || (f64::NEG_INFINITY, 0, 0, 0),
            |a, b| {
                if b.0 > a.0 || (b.0 == a.0 && (b.2, b.1) < (a.2, a.1)) {
                    b
                } else {
                    a
                }
            },
        );
    let pairs = (full as u64 - 1).pow(2);
    Ok(DiscrepancyReport {
        theta,
        c_hat: best.0.max(0.0),
        argmax: Argmax {
            source: "exhaustive".into(),
            s: mask_to_vec(best.1, n),
            t: mask_to_vec(best.2, n),
            e: best.3 as u64,
        },
        mode: Mode::Exhaustive,
        samples: pairs,
        seed: 0,
    })
}

#[derive(Clone)]
struct Candidate {
    ratio: f64,
    source: String,
    s: BitSet,
    t: BitSet,
    e: u64,
}

impl Candidate {
    fn better_than(&self, other: &Candidate) -> bool {
        self.ratio > other.ratio
    }
}

fn keep_best(best: &mut Option<Candidate>, c: Candidate) {
    match best {
        Some(b) if !c.better_than(b) => {}
        _ => *best = Some(c),
    }
}

fn random_subset(rng: &mut ChaCha8Rng, order: &mut [usize], n: usize) -> BitSet {
    let size = ((rng.gen::<f64>() * (n as f64).ln()).exp().round() as usize).clamp(1, n);
    let (chosen, _) = order.partial_shuffle(rng, size);
    BitSet::from_indices(n, chosen.iter().copied())
}

/// Named vertex sets used as structured candidates.
pub fn structured_sets(g: &GraphInstance) -> Vec<(String, BitSet)> {
    let n = g.q();
    let mut sets = Vec::new();
    for v in 0..n.min(MAX_STRUCTURED_NEIGHBORHOODS) {
        if g.degrees()[v] > 0 {
            sets.push((format!("N({v})"), g.neighbors(v)));
        }
    }
    if let Some(p) = g.provenance() {
        let field = &p.field;
        if field.q() as usize == n {
            let squares = BitSet::from_indices(
                n,
                field
                    .elements()
                    .filter(|&a| !a.is_zero() && field.is_square(a))
                    .map(|a| a.index() as usize),
            );
            let r = field.least_non_square();
            let coset = BitSet::from_indices(
                n,
                squares
                    .iter()
                    .map(|a| field.mul(r, FieldElement::from_raw(a as u32)).index() as usize),
            );
            sets.push(("squares".into(), squares));
            sets.push((format!("{}*squares", r.index()), coset));
            if let Some(sub) = field.half_subfield() {
                sets.push(("subfield".into(), BitSet::from_indices(n, sub.iter().map(|a| a.index() as usize))));
            }
        }
    }
    let mut k = 1;
    let mut lengths = Vec::new();
    while k < n {
        lengths.push(k);
        k *= 2;
    }
    lengths.extend([n / 2, n]);
    lengths.sort_unstable();
    lengths.dedup();
    for k in lengths.into_iter().filter(|&k| k > 0) {
        sets.push((format!("[0,{k})"), BitSet::from_indices(n, 0..k)));
    }
    sets
}

/// Lower bound on `c_hat` from random pairs, structured sets and
/// single-element hill climbing. Uses one worker stream.
pub fn discrepancy_sampled(
    g: &GraphInstance,
    theta: f64,
    samples: u64,
    seed: u64,
) -> Result<DiscrepancyReport, QuasiError> {
    discrepancy_sampled_with(g, theta, samples, seed, 1)
}

/// As [`discrepancy_sampled`], splitting the random phase across `workers`
/// seed streams. Output depends on `(seed, samples, workers)` only.
pub fn discrepancy_sampled_with(
    g: &GraphInstance,
    theta: f64,
    samples: u64,
    seed: u64,
    workers: usize,
) -> Result<DiscrepancyReport, QuasiError> {
    if samples == 0 {
        return Err(QuasiError::NoSamples);
    }
    let n = g.q();
    let workers = workers.max(1) as u64;
    let random_best = (0..workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(w.wrapping_mul(STREAM_STRIDE)));
            let mut order: Vec<usize> = (0..n).collect();
            let mut best = None;
            let share = samples / workers + u64::from(w < samples % workers);
            for _ in 0..share {
                let s = random_subset(&mut rng, &mut order, n);
                let t = random_subset(&mut rng, &mut order, n);
                let e = e_st(g, &s, &t);
                let r = ratio(n, theta, e, s.count(), t.count());
                keep_best(
                    &mut best,
                    Candidate {
                        ratio: r,
                        source: "random".into(),
                        s,
                        t,
                        e,
                    },
                );
            }
            best
        })
        .collect::<Vec<_>>();
    let mut best = None;
    for c in random_best.into_iter().flatten() {
        keep_best(&mut best, c);
    }

    let sets = structured_sets(g);
    let counts: Vec<Vec<u32>> = sets
        .par_iter()
        .map(|(_, b)| {
            (0..n)
                .map(|u| crate::bits::intersect_count(g.row(u), b.words()) as u32)
                .collect()
        })
        .collect();
    let structured = (0..sets.len())
        .into_par_iter()
        .map(|i| {
            let mut local: Option<(f64, usize, u64)> = None;
            for (j, cnt) in counts.iter().enumerate() {
                let e: u64 = sets[i].1.iter().map(|u| cnt[u] as u64).sum();
                let r = ratio(n, theta, e, sets[i].1.count(), sets[j].1.count());
                if local.is_none_or(|(br, _, _)| r > br) {
                    local = Some((r, j, e));
                }
            }
            local.map(|(r, j, e)| (r, i, j, e))
        })
        .collect::<Vec<_>>();
    for (r, i, j, e) in structured.into_iter().flatten() {
        keep_best(
            &mut best,
            Candidate {
                ratio: r,
                source: format!("structured:{}x{}", sets[i].0, sets[j].0),
                s: sets[i].1.clone(),
                t: sets[j].1.clone(),
                e,
            },
        );
    }
    let examined = samples + (sets.len() * sets.len()) as u64;
    let start = best.expect("at least one candidate");
    let (climbed, moves) = hill_climb(g, theta, start.clone());
    let best = if climbed.better_than(&start) { climbed } else { start };
    Ok(DiscrepancyReport {
        theta,
        c_hat: best.ratio,
        argmax: Argmax {
            source: best.source,
            s: best.s.iter().map(|v| v as u32).collect(),
            t: best.t.iter().map(|v| v as u32).collect(),
            e: best.e,
        },
        mode: Mode::Sampled,
        samples: examined + moves,
        seed,
    })
}

/// Toggles single elements of `S` and `T` while the ratio improves.
fn hill_climb(g: &GraphInstance, theta: f64, start: Candidate) -> (Candidate, u64) {
    let n = g.q();
    let mut s = start.s;
    let mut t = start.t;
    let count = |set: &BitSet| -> Vec<i64> {
        (0..n)
            .map(|u| crate::bits::intersect_count(g.row(u), set.words()) as i64)
            .collect()
    };
    let mut in_s = count(&s);
    let mut in_t = count(&t);
    let mut e = start.e as i64;
    let (mut sc, mut tc) = (s.count(), t.count());
    let mut r = ratio(n, theta, e as u64, sc, tc);
    let mut tried = 0u64;
    let mut improved = false;
    for _ in 0..HILL_CLIMB_PASSES {
        let mut changed = false;
        for x in 0..n {
            for side in [0, 1] {
                tried += 1;
                let (set, size, other_cnt) = if side == 0 {
                    (&s, sc, &in_t)
                } else {
                    (&t, tc, &in_s)
                };
                let present = set.contains(x);
                if present && size == 1 {
                    continue;
                }
                let delta = if present { -other_cnt[x] } else { other_cnt[x] };
                let new_size = if present { size - 1 } else { size + 1 };
                let (ns, nt) = if side == 0 { (new_size, tc) } else { (sc, new_size) };
                let nr = ratio(n, theta, (e + delta) as u64, ns, nt);
                if nr > r {
                    r = nr;
                    e += delta;
                    let sign = if present { -1 } else { 1 };
                    let (set, cnt) = if side == 0 { (&mut s, &mut in_s) } else { (&mut t, &mut in_t) };
                    set.toggle(x);
                    for v in g.neighbors(x).iter() {
                        cnt[v] += sign;
                    }
                    sc = s.count();
                    tc = t.count();
                    changed = true;
                    improved = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let source = if improved { "hill_climb".to_string() } else { start.source };
    (
        Candidate {
            ratio: r,
            source,
            s,
            t,
            e: e as u64,
        },
        tried,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingCertificate {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    pub gamma_hat: f64,
    /// `max((1 + alpha)/4, beta, gamma)`.
    pub theta_cert: f64,
    /// `max((2 + alpha)/4, (3 + beta)/4, gamma)`, the edge-count variant.
    pub theta_cert_edges: f64,
}

fn log_q(q: f64, x: f64) -> f64 {
    if x < 1.0 {
        0.0
    } else {
        x.ln() / q.ln()
    }
}

pub fn mixing_certificate(g: &GraphInstance, spectrum: &SpectrumReport) -> MixingCertificate {
    let q = g.q() as f64;
    let dev: f64 = g.degrees().iter().map(|&d| (d as f64 - q / 2.0).powi(2)).sum();
    let alpha_hat = log_q(q, dev);
    let beta_hat = log_q(q, (spectrum.lambda1() - q / 2.0).abs());
    let gamma_hat = log_q(q, spectrum.lambda2().abs());
    MixingCertificate {
        alpha_hat,
        beta_hat,
        gamma_hat,
        theta_cert: ((1.0 + alpha_hat) / 4.0).max(beta_hat).max(gamma_hat),
        theta_cert_edges: ((2.0 + alpha_hat) / 4.0).max((3.0 + beta_hat) / 4.0).max(gamma_hat),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TupleCensus {
    pub m: u32,
    pub count: u64,
    pub predicted: f64,
    pub rel_err: f64,
}

/// `q^m / (2^{C(m,2)} m!)`.
pub fn predicted_cliques(q: usize, m: u32) -> f64 {
    let pairs = m * (m.saturating_sub(1)) / 2;
    let fact: f64 = (1..=m).map(f64::from).product();
    (q as f64).powi(m as i32) / (2f64.powi(pairs as i32) * fact)
}

fn count_cliques(g: &GraphInstance, cand: &BitSet, depth: u32) -> u64 {
    if depth == 0 {
        return cand.count() as u64;
    }
    cand.iter()
        .map(|w| {
            let mut next = g.neighbors(w);
            next.intersect_with(cand);
            clear_through(&mut next, w);
            count_cliques(g, &next, depth - 1)
        })
        .sum()
}

/// Clears bits `0..=w`.
fn clear_through(set: &mut BitSet, w: usize) {
    let words = w / 64;
    let mut raw = set.words().to_vec();
    raw[..words].iter_mut().for_each(|x| *x = 0);
    let keep = if w % 64 == 63 { 0 } else { !0u64 << (w % 64 + 1) };
    raw[words] &= keep;
    *set = BitSet::from_words(set.universe(), raw);
}

/// Exact number of `m`-cliques.
pub fn tuple_census(g: &GraphInstance, m: u32) -> Result<TupleCensus, QuasiError> {
    if !(2..=MAX_CENSUS_M).contains(&m) {
        return Err(QuasiError::BadCliqueSize { m, max: MAX_CENSUS_M });
    }
    let n = g.q();
    if n > MAX_CENSUS_Q {
        return Err(QuasiError::TooLarge { q: n, max: MAX_CENSUS_Q });
    }
    let count = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut cand = g.neighbors(v);
            clear_through(&mut cand, v);
            count_cliques(g, &cand, m - 2)
        })
        .sum();
    let predicted = predicted_cliques(n, m);
    Ok(TupleCensus {
        m,
        count,
        predicted,
        rel_err: (count as f64 - predicted).abs() / predicted,
    })
}
