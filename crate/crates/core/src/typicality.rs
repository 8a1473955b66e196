//! Seeded Monte Carlo verification of the covering, packing and
//! expected-codebook-size arguments behind the coding scheme, at small
//! blocklengths and alphabets.
//!
//! Typicality is the robust (relative) kind: a tuple of sequences is
//! epsilon-typical when every joint symbol's empirical frequency is
//! within `epsilon * p` of its probability `p`; in particular symbols of
//! probability zero may not occur at all. The asymptotic statements are
//! verified as finite-n trends under explicit work guards, never as
//! limits.
//!
//! Randomness: ChaCha12 with one substream per trial (stream index =
//! trial counter), so trials are independent of scheduling order and
//! every estimate is bit-reproducible from `(experiment, seed)`.

use crate::error::{Error, Result};
use crate::exec::{self, ExecMode};
use crate::info::DiscreteJointDist;
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use serde_json::Value;

/// Per-codebook size cap.
pub const MAX_CODEBOOK: u64 = 1 << 20;

/// Tuple checks per trial cap.
pub const MAX_WORK: u64 = 100_000_000;

const Z95: f64 = 1.959963984540054;

/// Blocklength and typicality slack for one experiment.
#[derive(Debug, Clone, Copy)]
pub struct TypicalityConfig {
    pub epsilon: f64,
    pub n: usize,
}

impl TypicalityConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::ParameterDomain(format!(
                "epsilon must lie in (0,1), got {}",
                self.epsilon
            )));
        }
        if self.n == 0 {
            return Err(Error::ParameterDomain("blocklength must be positive".into()));
        }
        Ok(())
    }
}

/// Empirical mean with a normal-approximation 95% half width.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmpiricalEstimate {
    pub mean: f64,
    pub half_width_95: f64,
    pub trials: u32,
}

impl EmpiricalEstimate {
    fn from_indicators(hits: &[bool]) -> EmpiricalEstimate {
        let t = hits.len() as f64;
        let mean = hits.iter().filter(|&&h| h).count() as f64 / t;
        EmpiricalEstimate {
            mean,
            half_width_95: Z95 * (mean * (1.0 - mean) / t).sqrt(),
            trials: hits.len() as u32,
        }
    }

    fn from_samples(samples: &[f64]) -> EmpiricalEstimate {
        let t = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / t;
        let var = if samples.len() > 1 {
            samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (t - 1.0)
        } else {
            0.0
        };
        EmpiricalEstimate {
            mean,
            half_width_95: Z95 * (var / t).sqrt(),
            trials: samples.len() as u32,
        }
    }
}

/// Robust joint typicality of one length-n sequence per variable, in the
/// joint's variable order.
pub fn is_typical(
    sequences: &[&[usize]],
    joint: &DiscreteJointDist,
    epsilon: f64,
) -> Result<bool> {
    if sequences.len() != joint.num_vars() {
        return Err(Error::ParameterDomain(format!(
            "{} sequences for {} variables",
            sequences.len(),
            joint.num_vars()
        )));
    }
    let n = sequences.first().map_or(0, |s| s.len());
    if n == 0 || sequences.iter().any(|s| s.len() != n) {
        return Err(Error::ParameterDomain("sequence length mismatch".into()));
    }
    for (seq, &size) in sequences.iter().zip(joint.sizes()) {
        if seq.iter().any(|&s| s >= size) {
            return Err(Error::ParameterDomain("symbol outside alphabet".into()));
        }
    }
    let probs = joint.probs();
    let mut counts = vec![0u32; probs.len()];
    let mut sym = vec![0usize; joint.num_vars()];
    for i in 0..n {
        for (v, seq) in sequences.iter().enumerate() {
            sym[v] = seq[i];
        }
        let cell = joint.cell_index(&sym);
        if probs[cell] == 0.0 {
            return Ok(false);
        }
        counts[cell] += 1;
    }
    let nf = n as f64;
    Ok(probs
        .iter()
        .zip(&counts)
        .all(|(&p, &c)| (c as f64 / nf - p).abs() <= epsilon * p))
}

/// `delta(epsilon) = epsilon * sum of marginal entropies`, the concrete
/// vanishing slack used in the codebook-size pass/fail contract.
pub fn delta_slack(joint: &DiscreteJointDist, epsilon: f64) -> f64 {
    let names: Vec<&str> = joint.names().iter().map(|s| s.as_str()).collect();
    let h: f64 = names
        .iter()
        .map(|v| joint.entropy(&[v]).expect("marginal entropy"))
        .sum();
    epsilon * h
}

fn trial_rng(seed: u64, trial: u32) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64 + 1);
    rng
}

fn codebook_size(n: usize, rate: f64, what: &str) -> Result<u64> {
    if rate < 0.0 {
        return Err(Error::ParameterDomain(format!("{what} rate must be >= 0")));
    }
    let size = (n as f64 * rate).exp2().ceil();
    if size > MAX_CODEBOOK as f64 {
        return Err(Error::ExperimentTooLarge(format!(
            "{what} codebook would hold {size:.3e} codewords (cap {MAX_CODEBOOK}); \
             reduce the blocklength or the rate"
        )));
    }
    Ok(size as u64)
}

fn cdf(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|&p| {
            acc += p;
            acc
        })
        .collect()
}

fn sample(cdf: &[f64], rng: &mut ChaCha12Rng) -> usize {
    let u: f64 = rng.random();
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

/// Draws `count` i.i.d. length-n sequences from a marginal pmf, flattened
/// as `count * n` symbols.
fn draw_codebook(cdf: &[f64], count: u64, n: usize, rng: &mut ChaCha12Rng) -> Vec<u8> {
    let mut book = Vec::with_capacity(count as usize * n);
    for _ in 0..count as usize * n {
        book.push(sample(cdf, rng) as u8);
    }
    book
}

/// Multivariate covering experiment: independent codebooks from the
/// marginals, uniform binning of index tuples, and the probability that
/// bin 1 holds no jointly typical tuple.
#[derive(Debug, Clone)]
pub struct CoveringExperiment {
    pub joint: DiscreteJointDist,
    pub rates: Vec<f64>,
    pub bin_rate: f64,
    pub config: TypicalityConfig,
    pub trials: u32,
    pub seed: u64,
}

impl CoveringExperiment {
    fn sizes(&self) -> Result<Vec<u64>> {
        if self.rates.len() != self.joint.num_vars() {
            return Err(Error::ParameterDomain(format!(
                "{} rates for {} codebooks",
                self.rates.len(),
                self.joint.num_vars()
            )));
        }
        self.config.validate()?;
        let sizes: Vec<u64> = self
            .rates
            .iter()
            .enumerate()
            .map(|(w, &r)| codebook_size(self.config.n, r, &format!("component {w}")))
            .collect::<Result<_>>()?;
        let work = sizes
            .iter()
            .try_fold(1u64, |a, &s| a.checked_mul(s).filter(|&t| t <= MAX_WORK));
        if work.is_none() {
            return Err(Error::ExperimentTooLarge(format!(
                "tuple scan of {} needs more than {MAX_WORK} checks per trial",
                sizes
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(" x ")
            )));
        }
        Ok(sizes)
    }

    /// Estimates `P(E(1))`, the probability that no tuple assigned to the
    /// first bin is jointly epsilon-typical.
    pub fn run(&self) -> Result<EmpiricalEstimate> {
        let sizes = self.sizes()?;
        let n = self.config.n;
        let eps = self.config.epsilon;
        let num_bins = {
            let b = (n as f64 * self.bin_rate).exp2().ceil();
            if self.bin_rate < 0.0 {
                return Err(Error::ParameterDomain("bin rate must be >= 0".into()));
            }
            b as u64
        };
        let vars = self.joint.num_vars();
        let cdfs: Vec<Vec<f64>> = self
            .joint
            .names()
            .iter()
            .map(|v| Ok(cdf(&self.joint.marginal(&[v.as_str()])?)))
            .collect::<Result<_>>()?;
        let probs = self.joint.probs();
        let strides: Vec<usize> = {
            let mut st = vec![1usize; vars];
            for i in (0..vars.saturating_sub(1)).rev() {
                st[i] = st[i + 1] * self.joint.sizes()[i + 1];
            }
            st
        };
        let total: u64 = sizes.iter().product();

        let uncovered = exec::map_index_range(self.trials as usize, ExecMode::auto(), |t| {
            let mut rng = trial_rng(self.seed, t as u32);
            let books: Vec<Vec<u8>> = (0..vars)
                .map(|w| draw_codebook(&cdfs[w], sizes[w], n, &mut rng))
                .collect();
            let mut counts = vec![0u32; probs.len()];
            let mut covered = false;
            let mut tuple = vec![0u64; vars];
            'scan: for _ in 0..total {
                let in_bin = num_bins <= 1 || rng.random_range(0..num_bins) == 0;
                if in_bin {
                    counts.iter_mut().for_each(|c| *c = 0);
                    let mut typical = true;
                    'pos: for i in 0..n {
                        let mut cell = 0usize;
                        for w in 0..vars {
                            cell += strides[w] * books[w][tuple[w] as usize * n + i] as usize;
                        }
                        if probs[cell] == 0.0 {
                            typical = false;
                            break 'pos;
                        }
                        counts[cell] += 1;
                    }
                    if typical {
                        let nf = n as f64;
                        typical = probs
                            .iter()
                            .zip(&counts)
                            .all(|(&p, &c)| (c as f64 / nf - p).abs() <= eps * p);
                    }
                    if typical {
                        covered = true;
                        break 'scan;
                    }
                }
                // Mixed-radix increment, last component fastest.
                for w in (0..vars).rev() {
                    tuple[w] += 1;
                    if tuple[w] < sizes[w] {
                        break;
                    }
                    tuple[w] = 0;
                }
            }
            !covered
        });
        Ok(EmpiricalEstimate::from_indicators(&uncovered))
    }
}

fn counts_typical(counts: &[u32], probs: &[f64], n: usize, eps: f64) -> bool {
    let nf = n as f64;
    probs
        .iter()
        .zip(counts)
        .all(|(&p, &c)| (c as f64 / nf - p).abs() <= eps * p)
}

/// Multivariate packing experiment: the observed block `(U_{S^c}, Y)` is
/// drawn jointly from the true pmf, the candidate codebooks for `S` from
/// the independent marginals; estimated is the probability that some
/// (necessarily wrong) candidate tuple looks jointly typical.
///
/// A single-codebook experiment streams its candidates instead of
/// materializing the codebook, so it is bounded by the per-trial work
/// guard alone; multi-codebook experiments store the books and also
/// observe the per-codebook size cap.
#[derive(Debug, Clone)]
pub struct PackingExperiment {
    pub joint: DiscreteJointDist,
    pub codeword_vars: Vec<String>,
    pub rates: Vec<f64>,
    pub config: TypicalityConfig,
    pub trials: u32,
    pub seed: u64,
}

struct PackingLayout {
    s_idx: Vec<usize>,
    rest_idx: Vec<usize>,
    rest_sizes: Vec<usize>,
    rest_cdf: Vec<f64>,
    strides: Vec<usize>,
}

impl PackingExperiment {
    fn layout(&self) -> Result<PackingLayout> {
        self.config.validate()?;
        if self.codeword_vars.is_empty() {
            return Err(Error::EmptySubset);
        }
        if self.rates.len() != self.codeword_vars.len() {
            return Err(Error::ParameterDomain(format!(
                "{} rates for {} codeword variables",
                self.rates.len(),
                self.codeword_vars.len()
            )));
        }
        let vars = self.joint.num_vars();
        let s_idx: Vec<usize> = self
            .codeword_vars
            .iter()
            .map(|v| self.joint.index_of(v))
            .collect::<Result<_>>()?;
        let rest_idx: Vec<usize> = (0..vars).filter(|i| !s_idx.contains(i)).collect();
        if rest_idx.is_empty() {
            return Err(Error::ParameterDomain(
                "packing needs at least one observed variable".into(),
            ));
        }
        let rest_labels: Vec<&str> = rest_idx
            .iter()
            .map(|&i| self.joint.names()[i].as_str())
            .collect();
        let rest_cdf = cdf(&self.joint.marginal(&rest_labels)?);
        let rest_sizes: Vec<usize> = rest_idx.iter().map(|&i| self.joint.sizes()[i]).collect();
        let strides: Vec<usize> = {
            let mut st = vec![1usize; vars];
            for i in (0..vars.saturating_sub(1)).rev() {
                st[i] = st[i + 1] * self.joint.sizes()[i + 1];
            }
            st
        };
        Ok(PackingLayout {
            s_idx,
            rest_idx,
            rest_sizes,
            rest_cdf,
            strides,
        })
    }

    /// Observed side of one trial: a jointly drawn length-n block plus
    /// the per-position cell offsets it contributes.
    fn draw_observed(
        &self,
        lay: &PackingLayout,
        rng: &mut ChaCha12Rng,
    ) -> (Vec<Vec<u8>>, Vec<usize>) {
        let n = self.config.n;
        let mut rest_syms: Vec<Vec<u8>> = vec![Vec::with_capacity(n); lay.rest_idx.len()];
        let mut offsets = Vec::with_capacity(n);
        for _ in 0..n {
            let mut flat = sample(&lay.rest_cdf, rng);
            let mut offset = 0usize;
            for k in (0..lay.rest_idx.len()).rev() {
                let sym = flat % lay.rest_sizes[k];
                flat /= lay.rest_sizes[k];
                rest_syms[k].push(sym as u8);
                offset += lay.strides[lay.rest_idx[k]] * sym;
            }
            offsets.push(offset);
        }
        (rest_syms, offsets)
    }

    pub fn run(&self) -> Result<EmpiricalEstimate> {
        let lay = self.layout()?;
        if lay.s_idx.len() == 1 {
            self.run_streaming(&lay)
        } else {
            self.run_product(&lay)
        }
    }

    /// Single codebook: candidates are generated on the fly. With a
    /// uniform binary codeword marginal and n <= 64 each candidate is one
    /// word draw and the joint counts come from popcounts; the general
    /// path draws symbols through the marginal CDF. Both produce the same
    /// candidate distribution.
    fn run_streaming(&self, lay: &PackingLayout) -> Result<EmpiricalEstimate> {
        let n = self.config.n;
        let eps = self.config.epsilon;
        let m = {
            let size = (n as f64 * self.rates[0]).exp2().ceil();
            if self.rates[0] < 0.0 {
                return Err(Error::ParameterDomain("rate must be >= 0".into()));
            }
            if size > MAX_WORK as f64 {
                return Err(Error::ExperimentTooLarge(format!(
                    "candidate scan of {size:.3e} codewords exceeds the {MAX_WORK} \
                     checks per trial guard; reduce the blocklength or the rate"
                )));
            }
            size as u64
        };
        let u_var = self.codeword_vars[0].as_str();
        let u_marginal = self.joint.marginal(&[u_var])?;
        let u_cdf = cdf(&u_marginal);
        let stride_u = lay.strides[lay.s_idx[0]];
        let probs = self.joint.probs();
        let fast = u_marginal.len() == 2 && (u_marginal[0] - 0.5).abs() < 1e-12 && n <= 128;

        let hits = exec::map_index_range(self.trials as usize, ExecMode::auto(), |t| {
            let mut rng = trial_rng(self.seed, t as u32);
            let (_, offsets) = self.draw_observed(lay, &mut rng);
            let mut counts = vec![0u32; probs.len()];
            let mut found = false;
            if fast {
                // Group positions by their observed cell offset; two mask
                // words per group, counts via popcount. Per-cell count
                // acceptance windows are precomputed from the exact same
                // predicate `counts_typical` applies, then folded into a
                // per-group window on the number of ones.
                let mut groups: Vec<(usize, [u64; 2], u32)> = Vec::new();
                for (i, &o) in offsets.iter().enumerate() {
                    let word = if i < 64 {
                        [1u64 << i, 0]
                    } else {
                        [0, 1u64 << (i - 64)]
                    };
                    match groups.iter_mut().find(|g| g.0 == o) {
                        Some(g) => {
                            g.1[0] |= word[0];
                            g.1[1] |= word[1];
                            g.2 += 1;
                        }
                        None => groups.push((o, word, 1)),
                    }
                }
                let cell_ok = |cell: usize, c: u32| {
                    (c as f64 / n as f64 - probs[cell]).abs() <= eps * probs[cell]
                };
                // Uncovered positive-probability cells keep count 0 for
                // every candidate; if that is already atypical no
                // candidate can win this trial.
                let viable = (0..probs.len()).all(|cell| {
                    groups
                        .iter()
                        .any(|g| g.0 == cell || g.0 + stride_u == cell)
                        || cell_ok(cell, 0)
                });
                let windows: Option<Vec<(u32, u32)>> = if viable {
                    groups
                        .iter()
                        .map(|&(o, _, gc)| {
                            let ok = (0..=gc)
                                .filter(|&k| cell_ok(o + stride_u, k) && cell_ok(o, gc - k))
                                .collect::<Vec<_>>();
                            ok.first().map(|&lo| (lo, *ok.last().unwrap()))
                        })
                        .collect()
                } else {
                    None
                };
                if let Some(windows) = windows {
                    let mask = |len: usize| -> u64 {
                        if len >= 64 {
                            !0
                        } else {
                            (1u64 << len) - 1
                        }
                    };
                    let masks = [mask(n.min(64)), mask(n.saturating_sub(64))];
                    'cand: for _ in 0..m {
                        let bits = [
                            rng.random::<u64>() & masks[0],
                            if n > 64 {
                                rng.random::<u64>() & masks[1]
                            } else {
                                0
                            },
                        ];
                        for (g, &(_, gmask, _)) in groups.iter().enumerate() {
                            let ones = (bits[0] & gmask[0]).count_ones()
                                + (bits[1] & gmask[1]).count_ones();
                            let (lo, hi) = windows[g];
                            if ones < lo || ones > hi {
                                continue 'cand;
                            }
                        }
                        found = true;
                        break;
                    }
                }
            } else {
                let mut cand = vec![0u8; n];
                'scan: for _ in 0..m {
                    for s in cand.iter_mut() {
                        *s = sample(&u_cdf, &mut rng) as u8;
                    }
                    counts.iter_mut().for_each(|c| *c = 0);
                    let mut alive = true;
                    for i in 0..n {
                        let cell = offsets[i] + stride_u * cand[i] as usize;
                        if probs[cell] == 0.0 {
                            alive = false;
                            break;
                        }
                        counts[cell] += 1;
                    }
                    if alive && counts_typical(&counts, probs, n, eps) {
                        found = true;
                        break 'scan;
                    }
                }
            }
            found
        });
        Ok(EmpiricalEstimate::from_indicators(&hits))
    }

    /// Product of stored codebooks, scanned tuple by tuple.
    fn run_product(&self, lay: &PackingLayout) -> Result<EmpiricalEstimate> {
        let n = self.config.n;
        let eps = self.config.epsilon;
        let sizes: Vec<u64> = self
            .codeword_vars
            .iter()
            .zip(&self.rates)
            .map(|(v, &r)| codebook_size(n, r, v))
            .collect::<Result<_>>()?;
        let work = sizes
            .iter()
            .try_fold(1u64, |a, &s| a.checked_mul(s).filter(|&t| t <= MAX_WORK));
        if work.is_none() {
            return Err(Error::ExperimentTooLarge(format!(
                "candidate scan of {sizes:?} needs more than {MAX_WORK} checks per trial"
            )));
        }
        let s_cdfs: Vec<Vec<f64>> = self
            .codeword_vars
            .iter()
            .map(|v| Ok(cdf(&self.joint.marginal(&[v.as_str()])?)))
            .collect::<Result<_>>()?;
        let probs = self.joint.probs();
        let total: u64 = sizes.iter().product();

        let hits = exec::map_index_range(self.trials as usize, ExecMode::auto(), |t| {
            let mut rng = trial_rng(self.seed, t as u32);
            let (_, offsets) = self.draw_observed(lay, &mut rng);
            let books: Vec<Vec<u8>> = (0..lay.s_idx.len())
                .map(|w| draw_codebook(&s_cdfs[w], sizes[w], n, &mut rng))
                .collect();
            let mut counts = vec![0u32; probs.len()];
            let mut tuple = vec![0u64; lay.s_idx.len()];
            let mut found = false;
            'scan: for _ in 0..total {
                counts.iter_mut().for_each(|c| *c = 0);
                let mut alive = true;
                'pos: for i in 0..n {
                    let mut cell = offsets[i];
                    for (w, &vi) in lay.s_idx.iter().enumerate() {
                        cell += lay.strides[vi] * books[w][tuple[w] as usize * n + i] as usize;
                    }
                    if probs[cell] == 0.0 {
                        alive = false;
                        break 'pos;
                    }
                    counts[cell] += 1;
                }
                if alive && counts_typical(&counts, probs, n, eps) {
                    found = true;
                    break 'scan;
                }
                for w in (0..lay.s_idx.len()).rev() {
                    tuple[w] += 1;
                    if tuple[w] < sizes[w] {
                        break;
                    }
                    tuple[w] = 0;
                }
            }
            found
        });
        Ok(EmpiricalEstimate::from_indicators(&hits))
    }
}

/// Expected-dictionary-size experiment: how many of `2^{nR}` independent
/// `U`-codewords look jointly typical with a fresh `V` block.
#[derive(Debug, Clone)]
pub struct DictionaryExperiment {
    pub joint: DiscreteJointDist,
    pub u_var: String,
    pub v_var: String,
    pub rate: f64,
    pub config: TypicalityConfig,
    pub trials: u32,
    pub seed: u64,
}

impl DictionaryExperiment {
    /// Mean of `|D|` over trials (not a probability).
    pub fn run(&self) -> Result<EmpiricalEstimate> {
        self.config.validate()?;
        let iu = self.joint.index_of(&self.u_var)?;
        let iv = self.joint.index_of(&self.v_var)?;
        if self.joint.num_vars() != 2 || iu == iv {
            return Err(Error::ParameterDomain(
                "dictionary experiment wants a joint over exactly (U, V)".into(),
            ));
        }
        let n = self.config.n;
        let eps = self.config.epsilon;
        let m = codebook_size(n, self.rate, "dictionary")?;
        if m > MAX_WORK {
            return Err(Error::ExperimentTooLarge(format!(
                "{m} codewords exceed the {MAX_WORK} checks per trial guard"
            )));
        }
        let u_cdf = cdf(&self.joint.marginal(&[self.u_var.as_str()])?);
        let v_cdf = cdf(&self.joint.marginal(&[self.v_var.as_str()])?);
        let probs = self.joint.probs();
        let sizes = self.joint.sizes();
        let (stride_u, stride_v) = if iu == 0 {
            (sizes[1], 1)
        } else {
            (1, sizes[0])
        };

        let counts = exec::map_index_range(self.trials as usize, ExecMode::auto(), |t| {
            let mut rng = trial_rng(self.seed, t as u32);
            let v_seq: Vec<u8> = (0..n).map(|_| sample(&v_cdf, &mut rng) as u8).collect();
            let book = draw_codebook(&u_cdf, m, n, &mut rng);
            let mut cells = vec![0u32; probs.len()];
            let nf = n as f64;
            let mut dict = 0u64;
            for k in 0..m as usize {
                cells.iter_mut().for_each(|c| *c = 0);
                let mut typical = true;
                for i in 0..n {
                    let cell =
                        stride_u * book[k * n + i] as usize + stride_v * v_seq[i] as usize;
                    if probs[cell] == 0.0 {
                        typical = false;
                        break;
                    }
                    cells[cell] += 1;
                }
                if typical
                    && probs
                        .iter()
                        .zip(&cells)
                        .all(|(&p, &c)| (c as f64 / nf - p).abs() <= eps * p)
                {
                    dict += 1;
                }
            }
            dict as f64
        });
        Ok(EmpiricalEstimate::from_samples(&counts))
    }
}

/// One of the three experiment kinds, as a template for scans.
#[derive(Debug, Clone)]
pub enum Experiment {
    Cover(CoveringExperiment),
    Pack(PackingExperiment),
    Dict(DictionaryExperiment),
}

impl Experiment {
    pub fn run(&self) -> Result<EmpiricalEstimate> {
        match self {
            Experiment::Cover(e) => e.run(),
            Experiment::Pack(e) => e.run(),
            Experiment::Dict(e) => e.run(),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            Experiment::Cover(e) => e.seed,
            Experiment::Pack(e) => e.seed,
            Experiment::Dict(e) => e.seed,
        }
    }

    pub fn with_blocklength_and_seed(&self, n: usize, seed: u64) -> Experiment {
        let mut out = self.clone();
        match &mut out {
            Experiment::Cover(e) => {
                e.config.n = n;
                e.seed = seed;
            }
            Experiment::Pack(e) => {
                e.config.n = n;
                e.seed = seed;
            }
            Experiment::Dict(e) => {
                e.config.n = n;
                e.seed = seed;
            }
        }
        out
    }

    /// Parses an experiment spec document; `kind` selects the shape:
    ///
    /// ```json
    /// {"kind":"cover","joint":{...},"rates":[0.8,0.8],"bin_rate":0.0,
    ///  "epsilon":0.1,"trials":400}
    /// ```
    ///
    /// Packing adds `"codeword_vars":[...]`; dictionary uses
    /// `"u_var"`, `"v_var"` and a scalar `"rate"`. Blocklength and seed
    /// are injected at run time.
    pub fn from_json(text: &str) -> Result<Experiment> {
        let doc: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let joint = DiscreteJointDist::from_json(&doc["joint"].to_string())?;
        let epsilon = doc["epsilon"]
            .as_f64()
            .ok_or_else(|| Error::Parse("missing `epsilon`".into()))?;
        let trials = doc["trials"]
            .as_u64()
            .ok_or_else(|| Error::Parse("missing `trials`".into()))? as u32;
        let config = TypicalityConfig { epsilon, n: 1 };
        let rates = |v: &Value| -> Result<Vec<f64>> {
            v.as_array()
                .ok_or_else(|| Error::Parse("missing `rates` array".into()))?
                .iter()
                .map(|x| x.as_f64().ok_or_else(|| Error::Parse("bad rate".into())))
                .collect()
        };
        match doc["kind"].as_str() {
            Some("cover") => Ok(Experiment::Cover(CoveringExperiment {
                joint,
                rates: rates(&doc["rates"])?,
                bin_rate: doc["bin_rate"].as_f64().unwrap_or(0.0),
                config,
                trials,
                seed: 0,
            })),
            Some("pack") => Ok(Experiment::Pack(PackingExperiment {
                joint,
                codeword_vars: doc["codeword_vars"]
                    .as_array()
                    .ok_or_else(|| Error::Parse("missing `codeword_vars`".into()))?
                    .iter()
                    .map(|v| {
                        v.as_str()
                            .map(String::from)
                            .ok_or_else(|| Error::Parse("bad codeword var".into()))
                    })
                    .collect::<Result<_>>()?,
                rates: rates(&doc["rates"])?,
                config,
                trials,
                seed: 0,
            })),
            Some("dict") => Ok(Experiment::Dict(DictionaryExperiment {
                joint,
                u_var: doc["u_var"]
                    .as_str()
                    .ok_or_else(|| Error::Parse("missing `u_var`".into()))?
                    .into(),
                v_var: doc["v_var"]
                    .as_str()
                    .ok_or_else(|| Error::Parse("missing `v_var`".into()))?
                    .into(),
                rate: doc["rate"]
                    .as_f64()
                    .ok_or_else(|| Error::Parse("missing `rate`".into()))?,
                config,
                trials,
                seed: 0,
            })),
            other => Err(Error::Parse(format!("unknown experiment kind {other:?}"))),
        }
    }
}

/// Runs the template at each blocklength with the per-n seed derivation
/// `seed XOR n`, so scan rows are individually reproducible.
pub fn phase_scan(
    template: &Experiment,
    n_values: &[usize],
    seed: u64,
) -> Result<Vec<(usize, EmpiricalEstimate)>> {
    n_values
        .iter()
        .map(|&n| {
            let exp = template.with_blocklength_and_seed(n, seed ^ n as u64);
            Ok((n, exp.run()?))
        })
        .collect()
}
