use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::binning::{hib, join_ranks, parse_ranks, RelevantSet};
use crate::error::{Error, Result};
use crate::rng::{stream, SplitMix64};
use crate::simplex::QVector;

/// A q-vector with its exact labels: ascending positions into the relevant
/// set of bins holding a Hilbert basis element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledExample {
    pub q: QVector,
    pub positives: Vec<usize>,
}

impl LabeledExample {
    pub fn label(q: QVector, relevant: &RelevantSet) -> Result<Self> {
        let positives = hib(&q, relevant)?.positives;
        Ok(LabeledExample { q, positives })
    }

    /// Ground-truth IDP: no relevant bin holds a basis element.
    pub fn is_idp(&self) -> bool {
        self.positives.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub d: usize,
    pub bound: i64,
    pub seed: u64,
    /// Size of the relevant set the labels index into.
    pub relevant: usize,
    pub examples: Vec<LabeledExample>,
}

pub const DATASET_MAGIC: &str = "# idpdata 1";

/// Draws `count` q-vectors uniformly from `{1..=bound}^d` (with replacement)
/// and labels them exactly. Output order is draw order.
pub fn generate_dataset(d: usize, bound: i64, count: usize, seed: u64, relevant: &RelevantSet) -> Result<Dataset> {
    if bound < 1 {
        return Err(Error::InvalidArgument(format!("bound must be >= 1, got {bound}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("count must be >= 1".into()));
    }
    if relevant.dim() != d {
        return Err(Error::DimensionMismatch { expected: relevant.dim(), actual: d });
    }
    let mut rng = SplitMix64::derived(seed, stream::DATASET);
    let draws: Vec<Vec<i64>> = (0..count).map(|_| (0..d).map(|_| rng.gen_range(1..=bound)).collect()).collect();
    let examples =
        draws.into_par_iter().map(|q| LabeledExample::label(QVector::new(q)?, relevant)).collect::<Result<Vec<_>>>()?;
    Ok(Dataset { d, bound, seed, relevant: relevant.len(), examples })
}

/// Seeded shuffle; the last `round(fraction·n)` records (at least one)
/// become the validation set.
pub fn split(
    examples: &[LabeledExample],
    fraction: f64,
    seed: u64,
) -> Result<(Vec<LabeledExample>, Vec<LabeledExample>)> {
    if !(fraction > 0.0 && fraction < 1.0) {
        return Err(Error::InvalidArgument(format!("split fraction must be in (0, 1), got {fraction}")));
    }
    let mut order: Vec<usize> = (0..examples.len()).collect();
    order.shuffle(&mut SplitMix64::derived(seed, stream::SPLIT));
    let n_val = ((fraction * examples.len() as f64).round() as usize).clamp(1, examples.len());
    let (train, val) = order.split_at(examples.len() - n_val);
    let pick = |idx: &[usize]| idx.iter().map(|&i| examples[i].clone()).collect();
    Ok((pick(train), pick(val)))
}

impl Dataset {
    pub fn base_rate(&self) -> f64 {
        self.examples.iter().filter(|e| e.is_idp()).count() as f64 / self.examples.len().max(1) as f64
    }

    /// Same header, different records.
    pub fn with_examples(&self, examples: Vec<LabeledExample>) -> Dataset {
        Dataset { examples, ..self.clone() }
    }

    pub fn write<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(
            out,
            "{DATASET_MAGIC} d={} bound={} seed={} relevant={}",
            self.d, self.bound, self.seed, self.relevant
        )?;
        for ex in &self.examples {
            writeln!(out, "{}|{}", ex.q, join_ranks(&ex.positives))?;
        }
        out.flush()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write(BufWriter::new(file)).map_err(|e| Error::io(path, e))
    }

    /// Reads a dataset without recomputing labels.
    pub fn read<R: BufRead>(input: R, origin: &Path) -> Result<Dataset> {
        let mut lines = input.lines();
        let header = match lines.next() {
            Some(l) => l.map_err(|e| Error::io(origin, e))?,
            None => return Err(Error::parse(origin, 1, "empty dataset file")),
        };
        let fields = header
            .strip_prefix(DATASET_MAGIC)
            .ok_or_else(|| Error::parse(origin, 1, format!("expected header starting {DATASET_MAGIC:?}")))?;
        let (mut d, mut bound, mut seed, mut relevant) = (None, None, None, None);
        for kv in fields.split_whitespace() {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::parse(origin, 1, format!("bad field {kv:?}")))?;
            let bad = |e: std::num::ParseIntError| Error::parse(origin, 1, format!("{k}: {e}"));
            match k {
                "d" => d = Some(v.parse::<usize>().map_err(bad)?),
                "bound" => bound = Some(v.parse::<i64>().map_err(bad)?),
                "seed" => seed = Some(v.parse::<u64>().map_err(bad)?),
                "relevant" => relevant = Some(v.parse::<usize>().map_err(bad)?),
                _ => return Err(Error::parse(origin, 1, format!("unknown field {k:?}"))),
            }
        }
        let missing = |k: &str| Error::parse(origin, 1, format!("header lacks {k}="));
        let d = d.ok_or_else(|| missing("d"))?;
        let bound = bound.ok_or_else(|| missing("bound"))?;
        let seed = seed.ok_or_else(|| missing("seed"))?;
        let relevant = relevant.ok_or_else(|| missing("relevant"))?;

        let mut examples = Vec::new();
        for (i, line) in lines.enumerate() {
            let n = i + 2;
            let line = line.map_err(|e| Error::io(origin, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let (qs, ranks) = line.split_once('|').ok_or_else(|| Error::parse(origin, n, "missing '|'"))?;
            let q: QVector = qs.parse().map_err(|e: Error| Error::parse(origin, n, e.to_string()))?;
            if q.dim() != d {
                return Err(Error::parse(origin, n, format!("q-vector has dimension {}, header says {d}", q.dim())));
            }
            let positives = parse_ranks(ranks, relevant).map_err(|e| Error::parse(origin, n, e))?;
            examples.push(LabeledExample { q, positives });
        }
        Ok(Dataset { d, bound, seed, relevant, examples })
    }

    /// Loads a dataset and recomputes the labels of every hundredth record.
    pub fn load(path: impl AsRef<Path>, relevant: &RelevantSet) -> Result<Dataset> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let ds = Dataset::read(BufReader::new(file), path)?;
        ds.check_labels(relevant, 100).map_err(|(line, msg)| Error::parse(path, line, msg))?;
        Ok(ds)
    }

    /// Recomputes labels of records `0, stride, 2·stride, …`; reports the
    /// file line of the first mismatch.
    pub fn check_labels(&self, relevant: &RelevantSet, stride: usize) -> std::result::Result<(), (usize, String)> {
        if relevant.dim() != self.d || relevant.len() != self.relevant {
            return Err((
                1,
                format!(
                    "header relevant={} for d={} but the relevant set has {} entries",
                    self.relevant,
                    self.d,
                    relevant.len()
                ),
            ));
        }
        self.examples.par_iter().enumerate().step_by(stride.max(1)).try_for_each(|(i, ex)| {
            let fresh = hib(&ex.q, relevant).map_err(|e| (i + 2, e.to_string()))?;
            if fresh.positives != ex.positives {
                return Err((i + 2, format!("labels of {} do not match the exact computation", ex.q)));
            }
            Ok(())
        })
    }
}
