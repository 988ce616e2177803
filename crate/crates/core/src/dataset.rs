//! Per-rule example pools and training-set sampling.
//!
//! A pool holds three kinds of examples for one rule: violations
//! (non-compliant lines), fixed lines (violations after autofix) and
//! extant lines (lines already compliant with that rule; they may still
//! violate other rules). Training sets are drawn from a pool with
//! replacement according to a [`LearningConfig`].

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusView, LineRef, ViolationIndex};
use crate::error::{Error, Result};
use crate::jsonl;
use crate::oracle::RuleId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    NonCompliant,
    Compliant,
}

impl Label {
    pub fn is_positive(self) -> bool {
        self == Label::NonCompliant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleKind {
    Violation,
    Fixed,
    Extant,
}

impl ExampleKind {
    pub const ALL: [ExampleKind; 3] = [
        ExampleKind::Violation,
        ExampleKind::Fixed,
        ExampleKind::Extant,
    ];

    pub fn label(self) -> Label {
        match self {
            ExampleKind::Violation => Label::NonCompliant,
            ExampleKind::Fixed | ExampleKind::Extant => Label::Compliant,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ExampleKind::Violation => "violation",
            ExampleKind::Fixed => "fixed",
            ExampleKind::Extant => "extant",
        }
    }
}

/// Where an example came from. For fixed examples this is the violating
/// line the fix was derived from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Origin {
    pub file_id: u32,
    pub line_no: u32,
}

impl From<LineRef> for Origin {
    fn from(r: LineRef) -> Self {
        Origin {
            file_id: r.file_id,
            line_no: r.line_no,
        }
    }
}

/// A drawable instance: fixed and violation examples of the same line are
/// different instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceKey {
    pub kind: ExampleKind,
    pub origin: Origin,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub kind: ExampleKind,
    pub label: Label,
    pub text: String,
    pub origin: Origin,
}

impl Example {
    pub fn new(kind: ExampleKind, text: impl Into<String>, origin: Origin) -> Self {
        Example {
            kind,
            label: kind.label(),
            text: text.into(),
            origin,
        }
    }

    pub fn key(&self) -> InstanceKey {
        InstanceKey {
            kind: self.kind,
            origin: self.origin,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExamplePool {
    pub rule: RuleId,
    pub violations: Vec<Example>,
    pub fixed: Vec<Example>,
    pub extant: Vec<Example>,
}

impl ExamplePool {
    pub fn category(&self, kind: ExampleKind) -> &[Example] {
        match kind {
            ExampleKind::Violation => &self.violations,
            ExampleKind::Fixed => &self.fixed,
            ExampleKind::Extant => &self.extant,
        }
    }

    pub fn len(&self) -> usize {
        self.violations.len() + self.fixed.len() + self.extant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Persist as JSON Lines, one `{kind, label, text, origin}` per example.
    pub fn save_jsonl(&self, path: &Path) -> Result<()> {
        jsonl::write(
            path,
            self.violations
                .iter()
                .chain(&self.fixed)
                .chain(&self.extant),
        )
    }

    pub fn load_jsonl(path: &Path, rule: RuleId) -> Result<Self> {
        let examples: Vec<Example> = jsonl::read(path)?;
        let mut pool = ExamplePool {
            rule,
            violations: Vec::new(),
            fixed: Vec::new(),
            extant: Vec::new(),
        };
        for (i, ex) in examples.into_iter().enumerate() {
            if ex.label != ex.kind.label() {
                return Err(Error::Format {
                    path: path.to_path_buf(),
                    line: i + 1,
                    message: format!("{} example labeled {:?}", ex.kind.name(), ex.label),
                });
            }
            match ex.kind {
                ExampleKind::Violation => pool.violations.push(ex),
                ExampleKind::Fixed => pool.fixed.push(ex),
                ExampleKind::Extant => pool.extant.push(ex),
            }
        }
        Ok(pool)
    }
}

/// Pools for the rules that met the minimum plus the rules that did not,
/// with their violation counts.
#[derive(Debug, Clone)]
pub struct PoolSet {
    pub pools: Vec<ExamplePool>,
    pub excluded: Vec<(RuleId, usize)>,
}

/// Build one pool per rule with at least `min_examples` violations.
pub fn build_pools(
    index: &ViolationIndex,
    view: &CorpusView<'_>,
    rules: &[RuleId],
    min_examples: usize,
) -> Result<PoolSet> {
    let store = view.store();
    let mut pools = Vec::new();
    let mut excluded = Vec::new();
    for &rule in rules {
        let violations = index.violations(rule);
        if violations.is_empty() || violations.len() < min_examples {
            excluded.push((rule, violations.len()));
            continue;
        }
        let mut pool = ExamplePool {
            rule,
            violations: Vec::with_capacity(violations.len()),
            fixed: Vec::with_capacity(violations.len()),
            extant: Vec::new(),
        };
        for v in violations {
            let Some(line) = store.line(v.line) else {
                return Err(Error::invalid(format!(
                    "violation index refers to missing line {}:{}",
                    v.line.file_id, v.line.line_no
                )));
            };
            pool.violations.push(Example::new(
                ExampleKind::Violation,
                &line.text,
                v.line.into(),
            ));
            pool.fixed.push(Example::new(
                ExampleKind::Fixed,
                &v.fixed_text,
                v.line.into(),
            ));
        }
        let flagged = index.line_set(rule);
        pool.extant = view
            .lines()
            .filter(|l| !flagged.contains(&l.key()))
            .map(|l| Example::new(ExampleKind::Extant, &l.text, l.key().into()))
            .collect();
        pools.push(pool);
    }
    if pools.is_empty() {
        return Err(Error::NoEligibleRules { min_examples });
    }
    Ok(PoolSet { pools, excluded })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TrainingSize {
    S,
    M,
    L,
    Custom(usize),
}

impl TrainingSize {
    pub fn count(self) -> usize {
        match self {
            TrainingSize::S => 10,
            TrainingSize::M => 100,
            TrainingSize::L => 1000,
            TrainingSize::Custom(n) => n,
        }
    }
}

impl fmt::Display for TrainingSize {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainingSize::S => f.write_str("S"),
            TrainingSize::M => f.write_str("M"),
            TrainingSize::L => f.write_str("L"),
            TrainingSize::Custom(n) => write!(f, "{n}"),
        }
    }
}

impl FromStr for TrainingSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "S" | "s" => Ok(TrainingSize::S),
            "M" | "m" => Ok(TrainingSize::M),
            "L" | "l" => Ok(TrainingSize::L),
            other => other
                .parse::<usize>()
                .ok()
                .filter(|&n| n >= 2)
                .map(TrainingSize::Custom)
                .ok_or_else(|| Error::invalid(format!("bad training size `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ratio {
    /// violations + fixed
    VF,
    /// violations + extant
    VE,
    /// violations + fixed + extant
    VFE,
}

impl Ratio {
    pub const ALL: [Ratio; 3] = [Ratio::VF, Ratio::VE, Ratio::VFE];
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ratio::VF => "VF",
            Ratio::VE => "VE",
            Ratio::VFE => "VFE",
        })
    }
}

impl FromStr for Ratio {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "VF" => Ok(Ratio::VF),
            "VE" => Ok(Ratio::VE),
            "VFE" => Ok(Ratio::VFE),
            other => Err(Error::invalid(format!("bad ratio `{other}`"))),
        }
    }
}

macro_rules! string_serde {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                String::deserialize(d)?
                    .parse()
                    .map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(TrainingSize);
string_serde!(Ratio);

/// Per-category example counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Composition {
    pub violations: usize,
    pub fixed: usize,
    pub extant: usize,
}

impl Composition {
    pub fn get(&self, kind: ExampleKind) -> usize {
        match kind {
            ExampleKind::Violation => self.violations,
            ExampleKind::Fixed => self.fixed,
            ExampleKind::Extant => self.extant,
        }
    }

    pub fn total(&self) -> usize {
        self.violations + self.fixed + self.extant
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LearningConfig {
    pub size: TrainingSize,
    pub ratio: Ratio,
}

impl LearningConfig {
    pub fn new(size: TrainingSize, ratio: Ratio) -> Self {
        Self { size, ratio }
    }

    /// The nine size × ratio combinations.
    pub fn grid() -> Vec<LearningConfig> {
        [TrainingSize::S, TrainingSize::M, TrainingSize::L]
            .into_iter()
            .flat_map(|size| {
                Ratio::ALL
                    .into_iter()
                    .map(move |ratio| Self::new(size, ratio))
            })
            .collect()
    }

    /// Half violations (rounded up); VFE gives the odd compliant example to
    /// the fixed category, so S/VFE is 5/3/2.
    pub fn composition(&self) -> Composition {
        let size = self.size.count();
        let violations = size.div_ceil(2);
        let compliant = size - violations;
        let (fixed, extant) = match self.ratio {
            Ratio::VF => (compliant, 0),
            Ratio::VE => (0, compliant),
            Ratio::VFE => (compliant.div_ceil(2), compliant / 2),
        };
        Composition {
            violations,
            fixed,
            extant,
        }
    }
}

impl fmt::Display for LearningConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.size, self.ratio)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrainingSet {
    pub rule: RuleId,
    pub config: LearningConfig,
    pub examples: Vec<Example>,
    pub drawn_instances: BTreeSet<InstanceKey>,
}

impl TrainingSet {
    pub fn count(&self, kind: ExampleKind) -> usize {
        self.examples.iter().filter(|e| e.kind == kind).count()
    }

    pub fn has_both_labels(&self) -> bool {
        let positives = self
            .examples
            .iter()
            .filter(|e| e.label.is_positive())
            .count();
        positives > 0 && positives < self.examples.len()
    }

    /// Files any drawn instance came from.
    pub fn origin_files(&self) -> BTreeSet<u32> {
        self.drawn_instances
            .iter()
            .map(|k| k.origin.file_id)
            .collect()
    }
}

/// Draw a training set with replacement: violations, then fixed, then extant.
pub fn sample_training_set<R: Rng + ?Sized>(
    pool: &ExamplePool,
    config: LearningConfig,
    rng: &mut R,
) -> Result<TrainingSet> {
    if config.size.count() < 2 {
        return Err(Error::invalid("training size must be at least 2"));
    }
    let composition = config.composition();
    let mut examples = Vec::with_capacity(composition.total());
    for kind in ExampleKind::ALL {
        let wanted = composition.get(kind);
        if wanted == 0 {
            continue;
        }
        let source = pool.category(kind);
        if source.is_empty() {
            return Err(Error::InsufficientInstances {
                category: kind.name().into(),
                needed: wanted,
                available: 0,
            });
        }
        for _ in 0..wanted {
            examples.push(source[rng.gen_range(0..source.len())].clone());
        }
    }
    let drawn_instances = examples.iter().map(Example::key).collect();
    Ok(TrainingSet {
        rule: pool.rule,
        config,
        examples,
        drawn_instances,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{analyze, CorpusStore};
    use crate::oracle::check;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn planted_store(violations: usize, clean: usize) -> CorpusStore {
        let mut lines = Vec::new();
        for i in 0..violations {
            lines.push(format!("if (a{i} == b) {{"));
        }
        for i in 0..clean {
            lines.push(format!("let c{i} = d;"));
        }
        let mut store = CorpusStore::new();
        store.add_file("p", "a.js", None, &lines.join("\n"));
        store
    }

    #[test]
    fn compositions() {
        let c = |s, r| LearningConfig::new(s, r).composition();
        let vfe_s = c(TrainingSize::S, Ratio::VFE);
        assert_eq!((vfe_s.violations, vfe_s.fixed, vfe_s.extant), (5, 3, 2));
        let vf_m = c(TrainingSize::M, Ratio::VF);
        assert_eq!((vf_m.violations, vf_m.fixed, vf_m.extant), (50, 50, 0));
        let vfe_l = c(TrainingSize::L, Ratio::VFE);
        assert_eq!(
            (vfe_l.violations, vfe_l.fixed, vfe_l.extant),
            (500, 250, 250)
        );
        let ve_odd = c(TrainingSize::Custom(7), Ratio::VE);
        assert_eq!((ve_odd.violations, ve_odd.fixed, ve_odd.extant), (4, 0, 3));
        for cfg in LearningConfig::grid() {
            let comp = cfg.composition();
            assert_eq!(comp.total(), cfg.size.count());
            assert_eq!(comp.violations, cfg.size.count().div_ceil(2));
        }
        assert_eq!(LearningConfig::grid().len(), 9);
    }

    #[test]
    fn size_and_ratio_parsing() {
        assert_eq!("M".parse::<TrainingSize>().unwrap(), TrainingSize::M);
        assert_eq!(
            "40".parse::<TrainingSize>().unwrap(),
            TrainingSize::Custom(40)
        );
        assert!("1".parse::<TrainingSize>().is_err());
        assert_eq!("vfe".parse::<Ratio>().unwrap(), Ratio::VFE);
        assert!("FV".parse::<Ratio>().is_err());
    }

    #[test]
    fn pools_from_planted_corpus() {
        let store = planted_store(10, 25);
        let view = store.view();
        let index = analyze(&view, &RuleId::ALL).unwrap();
        let set = build_pools(&index, &view, &[RuleId::Eqeqeq], 10).unwrap();
        let pool = &set.pools[0];
        assert_eq!(pool.violations.len(), 10);
        assert_eq!(pool.fixed.len(), 10);
        assert_eq!(pool.extant.len(), 25);
        for ex in &pool.fixed {
            assert!(check(RuleId::Eqeqeq, &ex.text).is_empty());
        }
    }

    #[test]
    fn thresholds_exclude_rules() {
        let store = planted_store(999, 1);
        let view = store.view();
        let index = analyze(&view, &[RuleId::Eqeqeq, RuleId::NoVar]).unwrap();
        let err = build_pools(&index, &view, &[RuleId::Eqeqeq, RuleId::NoVar], 1000).unwrap_err();
        assert!(matches!(err, Error::NoEligibleRules { min_examples: 1000 }));

        let set = build_pools(&index, &view, &[RuleId::Eqeqeq, RuleId::NoVar], 999).unwrap();
        assert_eq!(set.pools.len(), 1);
        assert_eq!(set.excluded, vec![(RuleId::NoVar, 0)]);
    }

    #[test]
    fn sampling_matches_composition() {
        let store = planted_store(30, 30);
        let view = store.view();
        let index = analyze(&view, &[RuleId::Eqeqeq]).unwrap();
        let pool = &build_pools(&index, &view, &[RuleId::Eqeqeq], 10)
            .unwrap()
            .pools[0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ts = sample_training_set(
            pool,
            LearningConfig::new(TrainingSize::S, Ratio::VFE),
            &mut rng,
        )
        .unwrap();
        assert_eq!(ts.examples.len(), 10);
        assert_eq!(ts.count(ExampleKind::Violation), 5);
        assert_eq!(ts.count(ExampleKind::Fixed), 3);
        assert_eq!(ts.count(ExampleKind::Extant), 2);

        let ts = sample_training_set(
            pool,
            LearningConfig::new(TrainingSize::L, Ratio::VFE),
            &mut rng,
        )
        .unwrap();
        assert_eq!(
            (
                ts.count(ExampleKind::Violation),
                ts.count(ExampleKind::Fixed),
                ts.count(ExampleKind::Extant)
            ),
            (500, 250, 250)
        );
        // 1000 draws from 90 instances must repeat
        assert!(ts.drawn_instances.len() < ts.examples.len());
    }

    #[test]
    fn empty_category_is_an_error() {
        let store = planted_store(12, 0);
        let view = store.view();
        let index = analyze(&view, &[RuleId::Eqeqeq]).unwrap();
        let pool = &build_pools(&index, &view, &[RuleId::Eqeqeq], 10)
            .unwrap()
            .pools[0];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let err = sample_training_set(
            pool,
            LearningConfig::new(TrainingSize::M, Ratio::VE),
            &mut rng,
        )
        .unwrap_err();
        assert!(
            matches!(err, Error::InsufficientInstances { ref category, .. } if category == "extant")
        );
    }

    #[test]
    fn pool_jsonl_round_trip() {
        let store = planted_store(10, 5);
        let view = store.view();
        let index = analyze(&view, &[RuleId::Eqeqeq]).unwrap();
        let pool = build_pools(&index, &view, &[RuleId::Eqeqeq], 1)
            .unwrap()
            .pools
            .remove(0);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eqeqeq.jsonl");
        pool.save_jsonl(&path).unwrap();
        assert_eq!(
            ExamplePool::load_jsonl(&path, RuleId::Eqeqeq).unwrap(),
            pool
        );
    }
}
