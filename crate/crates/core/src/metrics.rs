//! Metrics over models and on-demand trees.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::ast::{is_decision_point, AstError, AstService};
use crate::loc::SourceLocation;
use crate::model::M3Model;
use crate::rel::Relation;
use crate::source::{SourceResolver, SourceUnavailable};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Ast(#[from] AstError),
    #[error(transparent)]
    SourceUnavailable(#[from] SourceUnavailable),
    #[error("inheritance cycle through {0}")]
    InheritanceCycle(SourceLocation),
    #[error("{0} is not a method or constructor")]
    NotAMethod(SourceLocation),
}

/// One value per subject, sorted by the printed subject.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricReport {
    pub metric: String,
    pub model_id: SourceLocation,
    pub rows: Vec<(SourceLocation, u64)>,
}

impl MetricReport {
    fn new(metric: &str, model_id: &SourceLocation, rows: impl IntoIterator<Item = (SourceLocation, u64)>) -> Self {
        let sorted: BTreeMap<String, (SourceLocation, u64)> =
            rows.into_iter().map(|(l, v)| (l.to_string(), (l, v))).collect();
        MetricReport {
            metric: metric.to_string(),
            model_id: model_id.clone(),
            rows: sorted.into_values().collect(),
        }
    }

    pub fn value(&self, subject: &SourceLocation) -> Option<u64> {
        self.rows.iter().find(|(l, _)| l == subject).map(|(_, v)| *v)
    }

    /// CSV with header `subject,value`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["subject", "value"]).expect("write to memory");
        for (l, v) in &self.rows {
            w.write_record([l.to_string(), v.to_string()]).expect("write to memory");
        }
        String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
    }

    /// Two aligned columns, values right-aligned.
    pub fn to_table(&self) -> String {
        let subjects: Vec<String> = self.rows.iter().map(|(l, _)| l.to_string()).collect();
        let values: Vec<String> = self.rows.iter().map(|(_, v)| v.to_string()).collect();
        let sw = subjects.iter().map(String::len).chain([7]).max().unwrap_or(7);
        let vw = values.iter().map(String::len).chain([5]).max().unwrap_or(5);
        let mut out = format!("{:<sw$}  {:>vw$}\n", "subject", "value");
        for (s, v) in subjects.iter().zip(&values) {
            out.push_str(&format!("{s:<sw$}  {v:>vw$}\n"));
        }
        out
    }
}

fn is_callable(l: &SourceLocation) -> bool {
    matches!(l.kind(), "method" | "constructor")
}

fn is_type(l: &SourceLocation) -> bool {
    matches!(l.kind(), "class" | "interface")
}

/// Non-blank lines of every file holding a declaration, plus a total row
/// keyed by the model id.
pub fn volume(m: &M3Model, source: &dyn SourceResolver) -> Result<MetricReport, SourceUnavailable> {
    let files: BTreeSet<SourceLocation> = m.declarations.range().iter().map(|p| p.without_region()).collect();
    let mut rows = Vec::new();
    let mut total = 0;
    for f in files {
        let text = source.read(&f)?;
        let n = text.lines().filter(|l| !l.trim().is_empty()).count() as u64;
        total += n;
        if f != m.id {
            rows.push((f, n));
        }
    }
    rows.push((m.id.clone(), total));
    Ok(MetricReport::new("volume", &m.id, rows))
}

/// 1 + branch statements + short-circuit operators in the method's tree.
pub fn cyclomatic_complexity(
    m: &M3Model,
    method: &SourceLocation,
    source: &dyn SourceResolver,
) -> Result<u64, MetricError> {
    cc_with(&AstService::new(m, source), m, method)
}

fn cc_with(service: &AstService, m: &M3Model, method: &SourceLocation) -> Result<u64, MetricError> {
    if m.declarations.image(method).is_empty() {
        return Err(AstError::NotDeclared(method.clone()).into());
    }
    if !is_callable(method) {
        return Err(MetricError::NotAMethod(method.clone()));
    }
    let tree = service.get(method)?;
    Ok(1 + tree.visit_count(is_decision_point) as u64)
}

/// Cyclomatic complexity of every declared method and constructor.
pub fn cc_report(m: &M3Model, source: &dyn SourceResolver) -> Result<MetricReport, MetricError> {
    let service = AstService::new(m, source);
    let mut rows = Vec::new();
    for l in m.declarations.domain().into_iter().filter(is_callable) {
        let v = cc_with(&service, m, &l)?;
        rows.push((l, v));
    }
    Ok(MetricReport::new("cc", &m.id, rows))
}

/// Depth of inheritance with the supertypes that were reached but are not
/// declared in the model (the depth only counts known edges).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dit {
    pub depth: u64,
    pub incomplete: Vec<SourceLocation>,
}

/// Warning for a hierarchy that reaches an undeclared supertype.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct IncompleteHierarchy {
    pub subject: SourceLocation,
    pub missing: SourceLocation,
}

impl fmt::Display for IncompleteHierarchy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "warning: incomplete hierarchy for {}: supertype {} is not declared",
            self.subject, self.missing
        )
    }
}

/// Longest path from `ty` along `<subtype, supertype>` edges; 0 for roots.
pub fn depth_of_inheritance(m: &M3Model, ty: &SourceLocation) -> Result<Dit, MetricError> {
    let mut memo = HashMap::new();
    let depth = longest(&m.inheritance, ty, &mut memo, &mut Vec::new())?;
    let declared = m.declarations.domain();
    let incomplete = memo
        .keys()
        .filter(|l| *l != ty && !declared.contains(*l))
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    Ok(Dit { depth, incomplete })
}

fn longest(
    r: &Relation,
    x: &SourceLocation,
    memo: &mut HashMap<SourceLocation, u64>,
    path: &mut Vec<SourceLocation>,
) -> Result<u64, MetricError> {
    if let Some(d) = memo.get(x) {
        return Ok(*d);
    }
    if path.contains(x) {
        return Err(MetricError::InheritanceCycle(x.clone()));
    }
    path.push(x.clone());
    let mut best = 0;
    for s in r.image(x) {
        best = best.max(1 + longest(r, &s, memo, path)?);
    }
    path.pop();
    memo.insert(x.clone(), best);
    Ok(best)
}

/// DIT of every declared type, with incomplete-hierarchy warnings.
pub fn dit_report(m: &M3Model) -> Result<(MetricReport, Vec<IncompleteHierarchy>), MetricError> {
    let mut rows = Vec::new();
    let mut warnings = BTreeSet::new();
    for t in m.declarations.domain().into_iter().filter(is_type) {
        let d = depth_of_inheritance(m, &t)?;
        for missing in d.incomplete {
            warnings.insert(IncompleteHierarchy {
                subject: t.clone(),
                missing,
            });
        }
        rows.push((t, d.depth));
    }
    Ok((MetricReport::new("dit", &m.id, rows), warnings.into_iter().collect()))
}

/// Number of distinct statically resolved callees.
pub fn fan_out(m: &M3Model, method: &SourceLocation) -> u64 {
    m.invocations.image(method).len() as u64
}

pub fn fan_out_report(m: &M3Model) -> MetricReport {
    let rows = m.declarations.domain().into_iter().filter(is_callable).map(|l| {
        let v = fan_out(m, &l);
        (l, v)
    });
    MetricReport::new("fanout", &m.id, rows)
}

/// `invocations ∘ overrides`: callers paired with the overriding
/// implementations of the methods they call.
pub fn concrete_callees(m: &M3Model) -> Relation {
    m.invocations.compose(&m.overrides)
}
