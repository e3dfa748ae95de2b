//! Per-class threshold search on the development split.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::bootstrap::decide;
use crate::corpus::{Document, Label};
use crate::error::{Error, Result};
use crate::eval::EvalRow;
use crate::parser::Parser;
use crate::stats::{
    count_patterns, encode_documents, select_from_counts, ClassThresholds, CountMode,
    EncodedDocument, IdSet, PatternIndex, Thresholds,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TuningGrid {
    pub theta_f: Vec<u64>,
    pub theta_p: Vec<f64>,
    pub theta_n: Vec<usize>,
    /// Minimum dev recall for a point to compete on precision.
    pub recall_floor: f64,
}

impl Default for TuningGrid {
    fn default() -> Self {
        TuningGrid {
            theta_f: vec![2, 3, 5, 10],
            theta_p: vec![0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.90],
            theta_n: vec![2, 3, 4],
            recall_floor: 0.05,
        }
    }
}

impl TuningGrid {
    pub fn validate(&self) -> Result<()> {
        if self.theta_f.is_empty() || self.theta_p.is_empty() || self.theta_n.is_empty() {
            return Err(Error::config("threshold tuning grid has an empty axis"));
        }
        for &f in &self.theta_f {
            for &p in &self.theta_p {
                for &n in &self.theta_n {
                    Thresholds::new(f, p, n)?;
                }
            }
        }
        Ok(())
    }

    fn points(&self) -> Vec<Thresholds> {
        let mut out = Vec::new();
        for &theta_f in &self.theta_f {
            for &theta_p in &self.theta_p {
                for &theta_n in &self.theta_n {
                    out.push(Thresholds {
                        theta_f,
                        theta_p,
                        theta_n,
                    });
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub label: Label,
    pub thresholds: Thresholds,
    pub precision: Option<f64>,
    pub recall: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TuneOutcome {
    pub thresholds: ClassThresholds,
    /// Every evaluated point, in search order.
    pub points: Vec<GridPoint>,
}

/// Better point first: precision, then recall, then the smaller thresholds.
fn compare(a: &GridPoint, b: &GridPoint, floor: f64) -> Ordering {
    let ok_a = a.recall >= floor && a.precision.is_some();
    let ok_b = b.recall >= floor && b.precision.is_some();
    let pa = a.precision.unwrap_or(0.0);
    let pb = b.precision.unwrap_or(0.0);
    let primary = match (ok_a, ok_b) {
        (true, false) => Ordering::Less,
        (false, true) => Ordering::Greater,
        (true, true) => pb.total_cmp(&pa).then(b.recall.total_cmp(&a.recall)),
        // nothing reaches the floor: fall back to recall
        (false, false) => b.recall.total_cmp(&a.recall).then(pb.total_cmp(&pa)),
    };
    primary
        .then(a.thresholds.theta_p.total_cmp(&b.thresholds.theta_p))
        .then(a.thresholds.theta_f.cmp(&b.thresholds.theta_f))
        .then(a.thresholds.theta_n.cmp(&b.thresholds.theta_n))
}

/// Coordinate search: FACT thresholds with FEEL fixed at `start`, then FEEL
/// with the chosen FACT thresholds. Each class is scored by its own dev
/// precision and recall.
pub fn tune_thresholds(
    parser: &Parser<'_>,
    train: &[&Document],
    dev: &[&Document],
    grid: &TuningGrid,
    start: ClassThresholds,
    mode: CountMode,
) -> Result<TuneOutcome> {
    grid.validate()?;
    let mut index = PatternIndex::new();
    let train_enc = encode_documents(parser, &mut index, train.iter().copied());
    let dev_enc = encode_documents(parser, &mut index, dev.iter().copied());
    let gold: Vec<Label> = dev_enc
        .iter()
        .map(|d| {
            d.label
                .ok_or_else(|| Error::config(format!("dev document {:?} has no label", d.id)))
        })
        .collect::<Result<_>>()?;
    if gold.is_empty() {
        return Err(Error::config("development split is empty"));
    }
    let pairs: Vec<(Label, &EncodedDocument)> = train_enc
        .iter()
        .map(|d| {
            d.label
                .map(|l| (l, d))
                .ok_or_else(|| Error::config(format!("training document {:?} has no label", d.id)))
        })
        .collect::<Result<_>>()?;
    let counts = count_patterns(&pairs, mode);

    let matches = |label: Label, t: &Thresholds| -> Vec<usize> {
        let ids = IdSet::resolve(&select_from_counts(&counts, &index, label, t), &index);
        dev_enc.iter().map(|d| ids.matches(d)).collect()
    };

    let mut chosen = start;
    let mut points = Vec::new();
    for label in Label::ALL {
        let fixed = matches(label.other(), chosen.get(label.other()));
        let mut best: Option<GridPoint> = None;
        let mut cached: Option<((u64, u64), Vec<usize>)> = None;
        for t in grid.points() {
            let key = (t.theta_f, t.theta_p.to_bits());
            if cached.as_ref().is_none_or(|(k, _)| *k != key) {
                cached = Some((key, matches(label, &t)));
            }
            let own = &cached.as_ref().unwrap().1;
            let mut th = chosen;
            *th.get_mut(label) = t;
            let predicted: Vec<Option<Label>> = own
                .iter()
                .zip(&fixed)
                .map(|(&m, &o)| match label {
                    Label::Fact => decide(m, o, &th),
                    Label::Feel => decide(o, m, &th),
                })
                .collect();
            let row = EvalRow::score("dev", &gold, &predicted);
            let scores = row.class(label);
            let point = GridPoint {
                label,
                thresholds: t,
                precision: scores.precision(),
                recall: scores.recall().unwrap_or(0.0),
            };
            if best
                .as_ref()
                .is_none_or(|b| compare(&point, b, grid.recall_floor) == Ordering::Less)
            {
                best = Some(point.clone());
            }
            points.push(point);
        }
        let best = best.expect("grid validated non-empty");
        log::info!(
            "tuned {label}: theta_f={} theta_p={} theta_n={} (dev precision {:?}, recall {:.3})",
            best.thresholds.theta_f,
            best.thresholds.theta_p,
            best.thresholds.theta_n,
            best.precision,
            best.recall
        );
        *chosen.get_mut(label) = best.thresholds;
    }
    Ok(TuneOutcome {
        thresholds: chosen,
        points,
    })
}
