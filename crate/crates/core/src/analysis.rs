//! Study statistics: per-level mean and sample standard deviation, and the
//! two-way (interface x preview) repeated-measures ANOVA.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("no records")]
    Empty,
    #[error("incomplete 2x2 design: {0}")]
    IncompleteDesign(String),
    #[error("need at least 2 subjects, got {0}")]
    TooFewSubjects(usize),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Interface {
    #[serde(rename = "GUI", alias = "gui")]
    Gui,
    #[serde(rename = "AR", alias = "ar")]
    Ar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preview {
    #[serde(alias = "OFF", alias = "Off")]
    Off,
    #[serde(alias = "ON", alias = "On")]
    On,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub subject: String,
    pub interface: Interface,
    pub preview: Preview,
    pub measure: String,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    Interface,
    Preview,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSummary {
    pub level: String,
    pub mean: f64,
    pub sd: f64,
    pub count: usize,
}

impl fmt::Display for LevelSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.level, format_mean_sd(self.mean, self.sd, 1, 1))
    }
}

/// Table-style "mean (σ=sd)" with the given decimals.
pub fn format_mean_sd(mean: f64, sd: f64, mean_decimals: usize, sd_decimals: usize) -> String {
    format!("{mean:.mean_decimals$} (σ={sd:.sd_decimals$})")
}

/// Arithmetic mean and sample (n - 1) standard deviation; a single value
/// has deviation 0.
pub fn mean_sd(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Some((mean, 0.0));
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    Some((mean, (ss / (n - 1.0)).sqrt()))
}

pub fn summarize(records: &[TrialRecord], group_by: Factor) -> Result<Vec<LevelSummary>, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut groups: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for r in records {
        let level = match group_by {
            Factor::Interface => format!("{:?}", r.interface).to_uppercase(),
            Factor::Preview => format!("{:?}", r.preview).to_lowercase(),
        };
        groups.entry(level).or_default().push(r.value);
    }
    Ok(groups
        .into_iter()
        .map(|(level, vals)| {
            let (mean, sd) = mean_sd(&vals).expect("groups are non-empty");
            LevelSummary {
                level,
                mean,
                sd,
                count: vals.len(),
            }
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectRow {
    pub effect: String,
    pub ss: f64,
    pub ss_error: f64,
    pub df_effect: usize,
    pub df_error: usize,
    pub f: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnovaResult {
    pub n_subjects: usize,
    /// Interface, preview and interaction, in that order.
    pub effects: [EffectRow; 3],
}

impl AnovaResult {
    pub fn interface(&self) -> &EffectRow {
        &self.effects[0]
    }

    pub fn preview(&self) -> &EffectRow {
        &self.effects[1]
    }

    pub fn interaction(&self) -> &EffectRow {
        &self.effects[2]
    }
}

/// Subject cells indexed [interface][preview].
fn cells(records: &[TrialRecord]) -> Result<Vec<[[f64; 2]; 2]>, AnalysisError> {
    let mut by_subject: BTreeMap<&str, [[Option<f64>; 2]; 2]> = BTreeMap::new();
    let measure = &records.first().ok_or(AnalysisError::Empty)?.measure;
    for r in records {
        if &r.measure != measure {
            return Err(AnalysisError::IncompleteDesign(format!(
                "mixed measures {measure:?} and {:?}",
                r.measure
            )));
        }
        let cell = &mut by_subject.entry(&r.subject).or_default()[r.interface as usize][r.preview as usize];
        if cell.replace(r.value).is_some() {
            return Err(AnalysisError::IncompleteDesign(format!(
                "duplicate cell for subject {}",
                r.subject
            )));
        }
    }
    by_subject
        .into_iter()
        .map(|(subject, c)| {
            let get = |a: usize, b: usize| {
                c[a][b].ok_or_else(|| AnalysisError::IncompleteDesign(format!("subject {subject} is missing a condition")))
            };
            Ok([[get(0, 0)?, get(0, 1)?], [get(1, 0)?, get(1, 1)?]])
        })
        .collect()
}

/// One-sample test of per-subject contrasts `d`, scaled so that the sums of
/// squares agree with the classical within-subject decomposition.
fn contrast_row(effect: &str, d: &[f64], scale: f64) -> EffectRow {
    let n = d.len();
    let mean = d.iter().sum::<f64>() / n as f64;
    let ss = n as f64 * mean * mean * scale;
    let ss_error = d.iter().map(|x| (x - mean).powi(2)).sum::<f64>() * scale;
    let df_error = n - 1;
    let (f, p) = if ss == 0.0 {
        (0.0, 1.0)
    } else if ss_error == 0.0 {
        (f64::INFINITY, 0.0)
    } else {
        let f = ss / (ss_error / df_error as f64);
        (f, f_survival(f, 1.0, df_error as f64))
    };
    EffectRow {
        effect: effect.to_string(),
        ss,
        ss_error,
        df_effect: 1,
        df_error,
        f,
        p,
    }
}

/// Two-way repeated-measures ANOVA for one measure of a balanced 2x2
/// within-subject design.
pub fn rm_anova_2x2(records: &[TrialRecord]) -> Result<AnovaResult, AnalysisError> {
    let cells = cells(records)?;
    if cells.len() < 2 {
        return Err(AnalysisError::TooFewSubjects(cells.len()));
    }
    // Contrasts are differences of sums so that exactly balanced data gives
    // exactly zero.
    let a: Vec<f64> = cells.iter().map(|c| ((c[1][0] + c[1][1]) - (c[0][0] + c[0][1])) / 2.0).collect();
    let b: Vec<f64> = cells.iter().map(|c| ((c[0][1] + c[1][1]) - (c[0][0] + c[1][0])) / 2.0).collect();
    let ab: Vec<f64> = cells.iter().map(|c| (c[0][0] + c[1][1]) - (c[0][1] + c[1][0])).collect();
    Ok(AnovaResult {
        n_subjects: cells.len(),
        effects: [
            contrast_row("interface", &a, 1.0),
            contrast_row("preview", &b, 1.0),
            contrast_row("interaction", &ab, 0.25),
        ],
    })
}

/// Upper tail P(X > f) of the F(d1, d2) distribution.
pub fn f_survival(f: f64, d1: f64, d2: f64) -> f64 {
    if f <= 0.0 {
        return 1.0;
    }
    if f.is_infinite() {
        return 0.0;
    }
    regularized_beta(d2 / (d2 + d1 * f), d2 / 2.0, d1 / 2.0)
}

/// Lanczos approximation (g = 7, n = 9) of ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    let t = x + G + 0.5;
    for (i, c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized incomplete beta I_x(a, b), by the continued fraction with
/// the symmetry swap for fast convergence.
pub fn regularized_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (1.0 - x).ln();
    if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cf(x, a, b) / a
    } else {
        1.0 - ln_front.exp() * beta_cf(1.0 - x, b, a) / b
    }
}

/// Modified Lentz evaluation of the incomplete beta continued fraction.
fn beta_cf(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    let mut c = 1.0;
    let mut d = 1.0 - (a + b) * x / (a + 1.0);
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=500 {
        let m = m as f64;
        let m2 = 2.0 * m;
        let even = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
        for coef in [even, -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0))] {
            d = 1.0 + coef * d;
            if d.abs() < TINY {
                d = TINY;
            }
            c = 1.0 + coef / c;
            if c.abs() < TINY {
                c = TINY;
            }
            d = 1.0 / d;
            h *= d * c;
        }
        if (d * c - 1.0).abs() < EPS {
            break;
        }
    }
    h
}

/// Reads `subject,interface,preview,measure,value` records.
pub fn read_records(reader: impl Read) -> Result<Vec<TrialRecord>, AnalysisError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let records = rdr.deserialize().collect::<Result<Vec<TrialRecord>, _>>()?;
    Ok(records)
}

/// Per-measure summaries and ANOVA.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure: String,
    pub cells: Vec<(String, LevelSummary)>,
    pub by_interface: Vec<LevelSummary>,
    pub by_preview: Vec<LevelSummary>,
    pub anova: AnovaResult,
}

pub fn analyze(records: &[TrialRecord]) -> Result<Vec<MeasureReport>, AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::Empty);
    }
    let mut measures: BTreeMap<&str, Vec<TrialRecord>> = BTreeMap::new();
    for r in records {
        measures.entry(&r.measure).or_default().push(r.clone());
    }
    measures
        .into_iter()
        .map(|(measure, recs)| {
            let mut cells = Vec::new();
            for iface in [Interface::Gui, Interface::Ar] {
                let sub: Vec<TrialRecord> = recs.iter().filter(|r| r.interface == iface).cloned().collect();
                if sub.is_empty() {
                    continue;
                }
                for s in summarize(&sub, Factor::Preview)? {
                    cells.push((format!("{iface:?}").to_uppercase(), s));
                }
            }
            Ok(MeasureReport {
                measure: measure.to_string(),
                cells,
                by_interface: summarize(&recs, Factor::Interface)?,
                by_preview: summarize(&recs, Factor::Preview)?,
                anova: rm_anova_2x2(&recs)?,
            })
        })
        .collect()
}

impl fmt::Display for MeasureReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "measure: {}", self.measure)?;
        for (iface, s) in &self.cells {
            writeln!(f, "  {iface:<4} preview {:<4} {}  n={}", s.level, format_mean_sd(s.mean, s.sd, 2, 2), s.count)?;
        }
        for s in self.by_interface.iter().chain(&self.by_preview) {
            writeln!(f, "  {:<17} {}  n={}", s.level, format_mean_sd(s.mean, s.sd, 2, 2), s.count)?;
        }
        writeln!(f, "  {:<12} {:>10} {:>8} {:>10}", "effect", "F", "df", "p")?;
        for e in &self.anova.effects {
            writeln!(
                f,
                "  {:<12} {:>10.4} {:>8} {:>10.3e}",
                e.effect,
                e.f,
                format!("{},{}", e.df_effect, e.df_error),
                e.p
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(subject: usize, interface: Interface, preview: Preview, value: f64) -> TrialRecord {
        TrialRecord {
            subject: format!("s{subject}"),
            interface,
            preview,
            measure: "m".into(),
            value,
        }
    }

    fn design(n: usize, f: impl Fn(usize, usize, usize) -> f64) -> Vec<TrialRecord> {
        let mut out = Vec::new();
        for s in 0..n {
            for (a, iface) in [Interface::Gui, Interface::Ar].into_iter().enumerate() {
                for (b, prev) in [Preview::Off, Preview::On].into_iter().enumerate() {
                    out.push(rec(s, iface, prev, f(s, a, b)));
                }
            }
        }
        out
    }

    #[test]
    fn summary_formulas() {
        let constant = design(3, |_, _, _| 5.0);
        for s in summarize(&constant, Factor::Interface).unwrap() {
            assert_eq!((s.mean, s.sd, s.count), (5.0, 0.0, 6));
        }
        let (m, sd) = mean_sd(&[73.0, 75.0]).unwrap();
        assert_eq!(m, 74.0);
        assert!((sd - 2f64.sqrt()).abs() < 1e-12);
        assert!(summarize(&[], Factor::Preview).is_err());
        assert_eq!(format_mean_sd(73.8, 8.7, 1, 1), "73.8 (σ=8.7)");
        assert_eq!(format_mean_sd(4.41, 1.9, 2, 1), "4.41 (σ=1.9)");
    }

    #[test]
    fn gamma_and_beta_reference_values() {
        assert!(ln_gamma(1.0).abs() < 1e-14);
        assert!((ln_gamma(5.0) - 24f64.ln()).abs() < 1e-13);
        assert!((ln_gamma(0.5) - std::f64::consts::PI.sqrt().ln()).abs() < 1e-14);
        // I_x(1, 1) = x and I_x(a, 1) = x^a
        assert!((regularized_beta(0.3, 1.0, 1.0) - 0.3).abs() < 1e-14);
        assert!((regularized_beta(0.6, 3.0, 1.0) - 0.216).abs() < 1e-14);
        assert!((regularized_beta(0.4, 2.5, 4.0) + regularized_beta(0.6, 4.0, 2.5) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn f_table_point() {
        let p = f_survival(4.45, 1.0, 17.0);
        assert!((p - 0.05).abs() < 0.002, "{p}");
        assert_eq!(f_survival(0.0, 1.0, 17.0), 1.0);
    }

    #[test]
    fn anova_degenerate_and_pure_effect() {
        let flat = design(5, |_, _, _| 3.0);
        let r = rm_anova_2x2(&flat).unwrap();
        for e in &r.effects {
            assert_eq!((e.f, e.p), (0.0, 1.0));
            assert_eq!((e.df_effect, e.df_error), (1, 4));
        }
        let offsets = [0.3, 7.1, -2.2, 4.0, 9.9, 1.5, -6.5, 2.2, 3.3, 0.01];
        let pure_b = design(10, |s, _, b| offsets[s] + b as f64);
        let r = rm_anova_2x2(&pure_b).unwrap();
        assert!(r.preview().p < 1e-6);
        assert_eq!(r.interface().f, 0.0);
        assert_eq!(r.interaction().f, 0.0);
    }

    #[test]
    fn anova_design_errors() {
        let mut recs = design(3, |s, a, b| (s + a + b) as f64);
        assert!(matches!(rm_anova_2x2(&recs[..4]), Err(AnalysisError::TooFewSubjects(1))));
        recs.pop();
        assert!(matches!(rm_anova_2x2(&recs), Err(AnalysisError::IncompleteDesign(_))));
        let dup = design(2, |_, _, _| 1.0).into_iter().chain(design(1, |_, _, _| 1.0)).collect::<Vec<_>>();
        assert!(matches!(rm_anova_2x2(&dup), Err(AnalysisError::IncompleteDesign(_))));
    }

    #[test]
    fn csv_parsing() {
        let text = "subject,interface,preview,measure,value\n1,GUI,off,time,240\n1, AR ,on,time,200.5\n";
        let recs = read_records(text.as_bytes()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[1].interface, Interface::Ar);
        assert_eq!(recs[1].preview, Preview::On);
        assert_eq!(recs[1].value, 200.5);
        assert!(read_records("subject,interface,preview,measure,value\n1,VR,off,t,1\n".as_bytes()).is_err());
    }
}
