//! Characteristic-pattern tables, syntactic-form histograms and preposition
//! distributions over learned pattern sets.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::stats::{PatternSet, PatternStats};
use crate::templates::{PatternInstance, TemplateForm};

const DEFAULT_GROUPS: &str = include_str!("../data/form_groups.toml");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TopRow {
    pub id: String,
    pub probability: f64,
    pub frequency: u64,
    pub form: TemplateForm,
    pub display: String,
}

/// The first `k` patterns by descending probability, descending frequency, then display.
pub fn top_patterns(set: &PatternSet, k: usize) -> Vec<TopRow> {
    let prefix = match set.label() {
        Label::Fact => "FC",
        Label::Feel => "FE",
    };
    set.entries()
        .iter()
        .take(k)
        .enumerate()
        .map(|(i, e)| TopRow {
            id: format!("{prefix}{}", i + 1),
            probability: e.p(set.label()),
            frequency: e.freq,
            form: e.pattern.form,
            display: e.pattern.display(),
        })
        .collect()
}

pub fn write_top_csv(rows: &[TopRow], path: &Path) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["id", "probability", "frequency", "form", "display"])?;
    for r in rows {
        w.write_record([
            r.id.clone(),
            format!("{:.2}", r.probability),
            r.frequency.to_string(),
            r.form.name().to_string(),
            r.display.clone(),
        ])?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormGroup {
    pub name: String,
    pub forms: Vec<TemplateForm>,
}

/// Histogram axes: template forms merged into named groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormGrouping {
    #[serde(rename = "group")]
    pub groups: Vec<FormGroup>,
}

impl Default for FormGrouping {
    fn default() -> Self {
        FormGrouping::from_toml(DEFAULT_GROUPS).expect("shipped grouping is valid")
    }
}

impl FormGrouping {
    /// Parses a grouping; forms not listed get a singleton group named after the form.
    pub fn from_toml(source: &str) -> Result<Self> {
        let mut g: FormGrouping =
            toml::from_str(source).map_err(|e| Error::config(format!("form grouping: {e}")))?;
        let mut seen = HashSet::new();
        for group in &g.groups {
            for form in &group.forms {
                if !seen.insert(*form) {
                    return Err(Error::config(format!(
                        "form grouping lists {form} more than once"
                    )));
                }
            }
        }
        for form in TemplateForm::ALL {
            if !seen.contains(&form) {
                g.groups.push(FormGroup {
                    name: form.name().to_string(),
                    forms: vec![form],
                });
            }
        }
        Ok(g)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        FormGrouping::from_toml(&text)
    }

    pub fn group_of(&self, form: TemplateForm) -> &str {
        self.groups
            .iter()
            .find(|g| g.forms.contains(&form))
            .map(|g| g.name.as_str())
            .expect("every form is grouped")
    }

    pub fn describe(&self) -> String {
        self.groups
            .iter()
            .map(|g| {
                let forms: Vec<&str> = g.forms.iter().map(|f| f.name()).collect();
                format!("{}: {}", g.name, forms.join(", "))
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Weighting {
    Unique,
    Instance,
}

/// Which sets a histogram covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scope {
    Class(Label),
    All,
}

impl Scope {
    pub const ALL: [Scope; 3] = [Scope::Class(Label::Fact), Scope::Class(Label::Feel), Scope::All];

    pub fn name(self) -> &'static str {
        match self {
            Scope::Class(l) => l.as_str(),
            Scope::All => "ALL",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HistogramRow {
    pub scope: Scope,
    pub group: String,
    pub unique: u64,
    pub unique_pct: f64,
    pub instances: u64,
    pub instance_pct: f64,
}

impl HistogramRow {
    pub fn count(&self, w: Weighting) -> u64 {
        match w {
            Weighting::Unique => self.unique,
            Weighting::Instance => self.instances,
        }
    }

    pub fn share(&self, w: Weighting) -> f64 {
        match w {
            Weighting::Unique => self.unique_pct,
            Weighting::Instance => self.instance_pct,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormHistogram {
    /// Rows per scope in grouping order.
    pub rows: Vec<HistogramRow>,
    pub grouping: FormGrouping,
}

impl FormHistogram {
    pub fn scope(&self, scope: Scope) -> impl Iterator<Item = &HistogramRow> {
        self.rows.iter().filter(move |r| r.scope == scope)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record([
            "class",
            "group",
            "forms",
            "unique",
            "unique_pct",
            "instances",
            "instance_pct",
        ])?;
        for r in &self.rows {
            let forms = self
                .grouping
                .groups
                .iter()
                .find(|g| g.name == r.group)
                .map(|g| g.forms.iter().map(|f| f.name()).collect::<Vec<_>>().join(";"))
                .unwrap_or_default();
            w.write_record([
                r.scope.name().to_string(),
                r.group.clone(),
                forms,
                r.unique.to_string(),
                format!("{:.1}", r.unique_pct),
                r.instances.to_string(),
                format!("{:.1}", r.instance_pct),
            ])?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn percent(part: u64, whole: u64) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

/// Distribution of syntactic forms over the members of both sets.
///
/// `instances` gives the occurrence count used for instance weighting;
/// patterns it does not know weigh zero.
pub fn form_histogram(
    fact: &PatternSet,
    feel: &PatternSet,
    instances: &HashMap<PatternInstance, u64>,
    grouping: &FormGrouping,
) -> FormHistogram {
    let mut rows = Vec::new();
    for scope in Scope::ALL {
        let members: Vec<&PatternInstance> = match scope {
            Scope::Class(Label::Fact) => fact.patterns().collect(),
            Scope::Class(Label::Feel) => feel.patterns().collect(),
            Scope::All => {
                let mut seen = HashSet::new();
                fact.patterns()
                    .chain(feel.patterns())
                    .filter(|p| seen.insert(*p))
                    .collect()
            }
        };
        let mut per_group: HashMap<&str, (u64, u64)> = HashMap::new();
        for p in &members {
            let slot = per_group.entry(grouping.group_of(p.form)).or_default();
            slot.0 += 1;
            slot.1 += instances.get(*p).copied().unwrap_or(0);
        }
        let total_unique: u64 = per_group.values().map(|v| v.0).sum();
        let total_instances: u64 = per_group.values().map(|v| v.1).sum();
        for g in &grouping.groups {
            let (u, i) = per_group.get(g.name.as_str()).copied().unwrap_or_default();
            rows.push(HistogramRow {
                scope,
                group: g.name.clone(),
                unique: u,
                unique_pct: percent(u, total_unique),
                instances: i,
                instance_pct: percent(i, total_instances),
            });
        }
    }
    FormHistogram {
        rows,
        grouping: grouping.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrepShare {
    pub preposition: String,
    pub count: u64,
    pub pct: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PrepDistribution {
    pub fact: Vec<PrepShare>,
    pub feel: Vec<PrepShare>,
}

impl PrepDistribution {
    pub fn class(&self, label: Label) -> &[PrepShare] {
        match label {
            Label::Fact => &self.fact,
            Label::Feel => &self.feel,
        }
    }

    pub fn share(&self, label: Label, prep: &str) -> f64 {
        self.class(label)
            .iter()
            .find(|s| s.preposition == prep)
            .map_or(0.0, |s| s.pct)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(["class", "preposition", "count", "pct"])?;
        for label in Label::ALL {
            for s in self.class(label) {
                w.write_record([
                    label.as_str().to_string(),
                    s.preposition.clone(),
                    s.count.to_string(),
                    format!("{:.1}", s.pct),
                ])?;
            }
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

fn prep_shares(set: &PatternSet) -> Vec<PrepShare> {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    for p in set.patterns().filter(|p| p.form == TemplateForm::NPPrepNP) {
        if let Some(prep) = p.anchors.get(1) {
            *counts.entry(prep.as_str()).or_default() += 1;
        }
    }
    let total: u64 = counts.values().sum();
    let mut out: Vec<PrepShare> = counts
        .into_iter()
        .map(|(p, c)| PrepShare {
            preposition: p.to_string(),
            count: c,
            pct: percent(c, total),
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.preposition.cmp(&b.preposition)));
    out
}

/// Share of each preposition among the NP-Prep members of each set.
pub fn prep_distribution(fact: &PatternSet, feel: &PatternSet) -> PrepDistribution {
    PrepDistribution {
        fact: prep_shares(fact),
        feel: prep_shares(feel),
    }
}

pub fn instance_counts(stats: &[PatternStats]) -> HashMap<PatternInstance, u64> {
    stats.iter().map(|s| (s.pattern.clone(), s.freq)).collect()
}

fn bar(pct: f64) -> String {
    "#".repeat((pct / 2.5).round() as usize)
}

/// Markdown report with every analysis table and text bar charts.
pub fn render_report(
    fact_top: &[TopRow],
    feel_top: &[TopRow],
    hist: &FormHistogram,
    preps: &PrepDistribution,
) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Pattern analysis\n");
    for (title, rows) in [("FACT", fact_top), ("FEEL", feel_top)] {
        let _ = writeln!(out, "## Top {title} patterns\n");
        let _ = writeln!(out, "| ID | Probability | Frequency | Form | Pattern |");
        let _ = writeln!(out, "|---|---|---|---|---|");
        for r in rows {
            let _ = writeln!(
                out,
                "| {} | {:.2} | {} | {} | `{}` |",
                r.id,
                r.probability,
                r.frequency,
                r.form.label().replace('<', "&lt;").replace('>', "&gt;"),
                r.display
            );
        }
        let _ = writeln!(out);
    }
    let _ = writeln!(out, "## Syntactic forms\n");
    let _ = writeln!(out, "Form grouping:\n\n```\n{}\n```\n", hist.grouping.describe());
    for weighting in [Weighting::Unique, Weighting::Instance] {
        let title = match weighting {
            Weighting::Unique => "distinct patterns",
            Weighting::Instance => "pattern instances",
        };
        for scope in Scope::ALL {
            let _ = writeln!(out, "### {} ({title})\n\n```", scope.name());
            for r in hist.scope(scope) {
                let _ = writeln!(
                    out,
                    "{:<14} {:>6} {:>5.1}% {}",
                    r.group,
                    r.count(weighting),
                    r.share(weighting),
                    bar(r.share(weighting))
                );
            }
            let _ = writeln!(out, "```\n");
        }
    }
    let _ = writeln!(out, "## Prepositions in NP Prep patterns\n");
    for label in Label::ALL {
        let _ = writeln!(out, "### {label}\n\n```");
        if preps.class(label).is_empty() {
            let _ = writeln!(out, "(no NP Prep patterns)");
        }
        for s in preps.class(label) {
            let _ = writeln!(out, "{:<10} {:>5} {:>5.1}% {}", s.preposition, s.count, s.pct, bar(s.pct));
        }
        let _ = writeln!(out, "```\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use TemplateForm as F;

    fn entry(form: TemplateForm, anchors: &[&str], fact: u64, feel: u64) -> PatternStats {
        PatternStats::new(PatternInstance::new(form, anchors.iter().copied()), fact, feel)
    }

    #[test]
    fn preposition_shares() {
        let fact = PatternSet::from_entries(
            Label::Fact,
            vec![
                entry(F::NPPrepNP, &["result", "of"], 9, 0),
                entry(F::NPPrepNP, &["origin", "of"], 5, 0),
                entry(F::NPPrepNP, &["demand", "for"], 4, 0),
                entry(F::AdjNoun, &["big", "deal"], 4, 0),
            ],
        );
        let d = prep_distribution(&fact, &PatternSet::empty(Label::Feel));
        assert_eq!(d.fact[0].preposition, "of");
        assert!((d.fact[0].pct - 66.666).abs() < 0.01);
        assert!((d.share(Label::Fact, "for") - 33.333).abs() < 0.01);
        assert!(d.feel.is_empty());
    }

    #[test]
    fn top_rows() {
        let set = PatternSet::from_entries(
            Label::Fact,
            vec![
                entry(F::NPPrepNP, &["result", "of"], 38, 1),
                entry(F::NPPrepNP, &["species", "of"], 18, 0),
                entry(F::SubjPassVP, &["observed"], 14, 0),
            ],
        );
        let rows = top_patterns(&set, 2);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0].id, "FC1");
        assert_eq!(rows[0].display, "SPECIES OF");
        assert_eq!(rows[1].display, "OBSERVED");
        assert!(top_patterns(&set, 0).is_empty());
        assert_eq!(top_patterns(&set, 10).len(), 3);
    }

    #[test]
    fn singleton_histogram() {
        let fact = PatternSet::from_entries(Label::Fact, vec![entry(F::AdjNoun, &["a", "b"], 3, 0)]);
        let feel = PatternSet::empty(Label::Feel);
        let counts = instance_counts(fact.entries());
        let h = form_histogram(&fact, &feel, &counts, &FormGrouping::default());
        let row = h.scope(Scope::Class(Label::Fact)).find(|r| r.group == "Adj Noun").unwrap();
        assert_eq!((row.unique_pct, row.instance_pct), (100.0, 100.0));
    }

    #[test]
    fn default_grouping_covers_every_form_once() {
        let g = FormGrouping::default();
        let listed: usize = g.groups.iter().map(|g| g.forms.len()).sum();
        assert_eq!(listed, 24);
        assert_eq!(g.group_of(F::SubjActVPDobj), "ActVP");
        assert!(FormGrouping::from_toml("[[group]]\nname='x'\nforms=['AdjNoun','AdjNoun']").is_err());
        assert!(FormGrouping::from_toml("[[group]]\nname='x'\nforms=['Nope']").is_err());
        let partial = FormGrouping::from_toml("[[group]]\nname='x'\nforms=['AdjNoun']").unwrap();
        assert_eq!(partial.groups.len(), 24);
    }

    #[test]
    fn shares_sum_to_one_hundred() {
        let fact = PatternSet::from_entries(
            Label::Fact,
            vec![
                entry(F::AdjNoun, &["a", "b"], 3, 0),
                entry(F::NPPrepNP, &["c", "of"], 7, 1),
                entry(F::SubjActVP, &["run"], 5, 0),
            ],
        );
        let feel = PatternSet::from_entries(
            Label::Feel,
            vec![entry(F::AdvAdj, &["so", "sad"], 0, 4), entry(F::AdvAdvAdj, &["so", "very", "sad"], 0, 3)],
        );
        let mut counts = instance_counts(fact.entries());
        counts.extend(instance_counts(feel.entries()));
        let h = form_histogram(&fact, &feel, &counts, &FormGrouping::default());
        for scope in Scope::ALL {
            for w in [Weighting::Unique, Weighting::Instance] {
                let total: f64 = h.scope(scope).map(|r| r.share(w)).sum();
                assert!((total - 100.0).abs() < 0.1, "{scope:?} {w:?} {total}");
            }
        }
        let report = render_report(&top_patterns(&fact, 3), &top_patterns(&feel, 3), &h, &prep_distribution(&fact, &feel));
        assert!(report.contains("Adv Adj"));
    }
}
