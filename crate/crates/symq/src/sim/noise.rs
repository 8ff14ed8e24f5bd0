//! Pair-dependent under-rotation noise with optional readout depolarizing.

use crate::error::{Error, Result};
use crate::seeds::{stream_rng, Stream};
use rand::Rng;
use std::collections::BTreeMap;

/// A frozen noise realization for one run.
///
/// Every unordered physical pair `{p, q}` carries a relative under-rotation
/// `delta`: an entangling gate requested at angle `theta` on that pair acts
/// at `theta * (1 - delta)`. Pairs without an entry are exact. On top of the
/// coherent errors, measured distributions may be mixed with the uniform
/// distribution at strength `depolarizing`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pair_delta: BTreeMap<(usize, usize), f64>,
    depolarizing: f64,
}

impl NoiseModel {
    /// A model with no errors at all.
    pub fn ideal() -> Self {
        NoiseModel { pair_delta: BTreeMap::new(), depolarizing: 0.0 }
    }

    /// Sets the relative under-rotation for the unordered pair `{p, q}`.
    /// `delta` must be finite and in `[-1, 1]`; negative values model
    /// over-rotation.
    pub fn set_pair_delta(&mut self, p: usize, q: usize, delta: f64) -> Result<()> {
        if p == q {
            return Err(Error::Noise(format!("pair must name two distinct ions, got {p} twice")));
        }
        if !delta.is_finite() || !(-1.0..=1.0).contains(&delta) {
            return Err(Error::Noise(format!("pair delta must be in [-1, 1], got {delta}")));
        }
        self.pair_delta.insert(key(p, q), delta);
        Ok(())
    }

    /// Sets the readout depolarizing strength; must be in `[0, 1]`.
    pub fn set_depolarizing(&mut self, eps: f64) -> Result<()> {
        if !eps.is_finite() || !(0.0..=1.0).contains(&eps) {
            return Err(Error::Noise(format!(
                "depolarizing strength must be in [0, 1], got {eps}"
            )));
        }
        self.depolarizing = eps;
        Ok(())
    }

    /// The under-rotation for `{p, q}`; zero if no entry was set.
    pub fn pair_delta(&self, p: usize, q: usize) -> f64 {
        self.pair_delta.get(&key(p, q)).copied().unwrap_or(0.0)
    }

    pub fn depolarizing(&self) -> f64 {
        self.depolarizing
    }

    /// Entries in `(p, q)` order with `p < q`.
    pub fn pair_entries(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.pair_delta.iter().map(|(&k, &v)| (k, v))
    }

    pub fn is_ideal(&self) -> bool {
        self.depolarizing == 0.0 && self.pair_delta.values().all(|&d| d == 0.0)
    }

    /// Largest `|delta|` across all pairs.
    pub fn max_abs_delta(&self) -> f64 {
        self.pair_delta.values().fold(0.0, |m, &d| m.max(d.abs()))
    }

    /// A copy with every pair delta multiplied by `factor`. Fails if a
    /// scaled delta would leave `[-1, 1]`.
    pub fn scaled(&self, factor: f64) -> Result<NoiseModel> {
        let mut out = self.clone();
        for (&k, &d) in &self.pair_delta {
            let s = d * factor;
            if !s.is_finite() || !(-1.0..=1.0).contains(&s) {
                return Err(Error::Noise(format!(
                    "scaling pair {{{}, {}}} by {factor} gives delta {s}, outside [-1, 1]",
                    k.0, k.1
                )));
            }
            out.pair_delta.insert(k, s);
        }
        Ok(out)
    }

    /// Draws an independent delta for every unordered pair among
    /// `n_physical` ions, uniformly from `[lo, hi]`. Pairs are visited in
    /// `(p, q)` order with `p < q`, one draw each, so a model is fully
    /// determined by `(n_physical, lo, hi, master_seed)`.
    pub fn random_uniform(
        n_physical: usize,
        lo: f64,
        hi: f64,
        master_seed: u64,
    ) -> Result<NoiseModel> {
        if n_physical < 2 {
            return Err(Error::Noise(format!(
                "need at least two ions to define pair noise, got {n_physical}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < -1.0 || hi > 1.0 {
            return Err(Error::Noise(format!(
                "delta band [{lo}, {hi}] must be ordered and inside [-1, 1]"
            )));
        }
        let mut rng = stream_rng(master_seed, Stream::Noise, 0);
        let mut model = NoiseModel::ideal();
        for p in 0..n_physical {
            for q in (p + 1)..n_physical {
                let d = if lo == hi { lo } else { rng.gen_range(lo..=hi) };
                model.set_pair_delta(p, q, d)?;
            }
        }
        Ok(model)
    }

    /// Parses the text form: one `pair <p> <q> <delta>` line per pair, an
    /// optional `depolarizing <eps>` line, `#` comments, blank lines
    /// ignored.
    pub fn parse(text: &str) -> Result<NoiseModel> {
        let mut model = NoiseModel::ideal();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let fail = |message: String| Error::Parse { line: idx + 1, message };
            match fields[0] {
                "pair" => {
                    if fields.len() != 4 {
                        return Err(fail(format!(
                            "`pair` takes ion, ion, delta; got {} fields",
                            fields.len() - 1
                        )));
                    }
                    let p: usize = fields[1]
                        .parse()
                        .map_err(|_| fail(format!("invalid ion index `{}`", fields[1])))?;
                    let q: usize = fields[2]
                        .parse()
                        .map_err(|_| fail(format!("invalid ion index `{}`", fields[2])))?;
                    let d: f64 = fields[3]
                        .parse()
                        .map_err(|_| fail(format!("invalid delta `{}`", fields[3])))?;
                    model
                        .set_pair_delta(p, q, d)
                        .map_err(|e| fail(e.to_string()))?;
                }
                "depolarizing" => {
                    if fields.len() != 2 {
                        return Err(fail(format!(
                            "`depolarizing` takes one strength; got {} fields",
                            fields.len() - 1
                        )));
                    }
                    let eps: f64 = fields[1]
                        .parse()
                        .map_err(|_| fail(format!("invalid strength `{}`", fields[1])))?;
                    model.set_depolarizing(eps).map_err(|e| fail(e.to_string()))?;
                }
                other => {
                    return Err(fail(format!("unknown noise directive `{other}`")));
                }
            }
        }
        Ok(model)
    }

    /// Canonical text form; `parse` of the output reproduces the model.
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        for ((p, q), d) in self.pair_entries() {
            out.push_str(&format!("pair {p} {q} {}\n", crate::circuit::fmt_significant(d, 17)));
        }
        if self.depolarizing > 0.0 {
            out.push_str(&format!(
                "depolarizing {}\n",
                crate::circuit::fmt_significant(self.depolarizing, 17)
            ));
        }
        out
    }
}

fn key(p: usize, q: usize) -> (usize, usize) {
    (p.min(q), p.max(q))
}
