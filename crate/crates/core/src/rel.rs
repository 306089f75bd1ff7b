//! Immutable binary relations over source locations.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::loc::{parse_prefix, LocationError, SourceLocation};

pub type LocSet = BTreeSet<SourceLocation>;
pub type Pair = (SourceLocation, SourceLocation);

/// A finite set of ordered location pairs. Every operation returns a new value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    pairs: BTreeSet<Pair>,
}

impl FromIterator<Pair> for Relation {
    fn from_iter<T: IntoIterator<Item = Pair>>(iter: T) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Relation {
    type Item = &'a Pair;
    type IntoIter = std::collections::btree_set::Iter<'a, Pair>;

    fn into_iter(self) -> Self::IntoIter {
        self.pairs.iter()
    }
}

impl Relation {
    pub fn new() -> Self {
        Relation::default()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, from: &SourceLocation, to: &SourceLocation) -> bool {
        self.pairs.contains(&(from.clone(), to.clone()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Pair> {
        self.pairs.iter()
    }

    /// Returns a relation with one more pair.
    pub fn with(&self, from: SourceLocation, to: SourceLocation) -> Relation {
        let mut pairs = self.pairs.clone();
        pairs.insert((from, to));
        Relation { pairs }
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    pub fn union(&self, other: &Relation) -> Relation {
        self.pairs.union(&other.pairs).cloned().collect()
    }

    pub fn difference(&self, other: &Relation) -> Relation {
        self.pairs.difference(&other.pairs).cloned().collect()
    }

    /// `{<a,c> | <a,b> in self, <b,c> in other}`.
    pub fn compose(&self, other: &Relation) -> Relation {
        let mut by_from: HashMap<&SourceLocation, Vec<&SourceLocation>> = HashMap::new();
        for (b, c) in &other.pairs {
            by_from.entry(b).or_default().push(c);
        }
        let mut out = BTreeSet::new();
        for (a, b) in &self.pairs {
            if let Some(cs) = by_from.get(b) {
                for c in cs {
                    out.insert((a.clone(), (*c).clone()));
                }
            }
        }
        Relation { pairs: out }
    }

    pub fn inverse(&self) -> Relation {
        self.pairs.iter().map(|(a, b)| (b.clone(), a.clone())).collect()
    }

    pub fn domain(&self) -> LocSet {
        self.pairs.iter().map(|(a, _)| a.clone()).collect()
    }

    pub fn range(&self) -> LocSet {
        self.pairs.iter().map(|(_, b)| b.clone()).collect()
    }

    /// Domain and range together.
    pub fn carrier(&self) -> LocSet {
        let mut set = self.domain();
        set.extend(self.range());
        set
    }

    pub fn image(&self, x: &SourceLocation) -> LocSet {
        self.pairs
            .range((x.clone(), min_loc())..)
            .take_while(|(a, _)| a == x)
            .map(|(_, b)| b.clone())
            .collect()
    }

    pub fn restrict_domain(&self, set: &LocSet) -> Relation {
        self.pairs.iter().filter(|(a, _)| set.contains(a)).cloned().collect()
    }

    pub fn restrict_range(&self, set: &LocSet) -> Relation {
        self.pairs.iter().filter(|(_, b)| set.contains(b)).cloned().collect()
    }

    /// Applies `f` to both sides of every pair.
    pub fn map(&self, mut f: impl FnMut(&SourceLocation) -> SourceLocation) -> Relation {
        self.pairs.iter().map(|(a, b)| (f(a), f(b))).collect()
    }

    /// Smallest transitive relation containing `self`.
    ///
    /// Breadth-first reachability from every node of the carrier: O(V * E).
    pub fn transitive_closure(&self) -> Relation {
        let nodes: Vec<&SourceLocation> = self.carrier_refs();
        let index: HashMap<&SourceLocation, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut succ = vec![Vec::new(); nodes.len()];
        for (a, b) in &self.pairs {
            succ[index[a]].push(index[b]);
        }
        let mut out = BTreeSet::new();
        let mut seen = vec![usize::MAX; nodes.len()];
        for start in 0..nodes.len() {
            let mut stack: Vec<usize> = succ[start].clone();
            while let Some(n) = stack.pop() {
                if seen[n] == start {
                    continue;
                }
                seen[n] = start;
                out.insert((nodes[start].clone(), nodes[n].clone()));
                stack.extend(succ[n].iter().copied().filter(|&m| seen[m] != start));
            }
        }
        Relation { pairs: out }
    }

    fn carrier_refs(&self) -> Vec<&SourceLocation> {
        let mut set: BTreeSet<&SourceLocation> = BTreeSet::new();
        for (a, b) in &self.pairs {
            set.insert(a);
            set.insert(b);
        }
        set.into_iter().collect()
    }

    /// Tuples as printed text, sorted by that text.
    pub fn sorted_tuples(&self) -> Vec<String> {
        let mut lines: Vec<String> = self.pairs.iter().map(|(a, b)| format!("<{a},{b}>")).collect();
        lines.sort();
        lines
    }

    /// Parses `{<l,l>,<l,l>}`; whitespace between tokens is ignored.
    pub fn parse(text: &str) -> Result<Relation, LocationError> {
        let bad = |reason: &str| LocationError::MalformedLocation {
            literal: text.to_string(),
            reason: reason.to_string(),
        };
        let mut rest = text
            .trim()
            .strip_prefix('{')
            .ok_or_else(|| bad("relation must start with `{`"))?
            .trim_start();
        let mut pairs = BTreeSet::new();
        loop {
            if let Some(r) = rest.strip_prefix('}') {
                if !r.trim().is_empty() {
                    return Err(bad("text after closing `}`"));
                }
                return Ok(Relation { pairs });
            }
            if !pairs.is_empty() {
                rest = rest
                    .strip_prefix(',')
                    .ok_or_else(|| bad("expected `,` between tuples"))?
                    .trim_start();
            }
            let (pair, r) = parse_tuple(rest)?;
            pairs.insert(pair);
            rest = r.trim_start();
        }
    }
}

/// Parses one `<l,l>` tuple at the start of `input`.
pub fn parse_tuple(input: &str) -> Result<(Pair, &str), LocationError> {
    let bad = |reason: &str| LocationError::MalformedLocation {
        literal: input.to_string(),
        reason: reason.to_string(),
    };
    let rest = input.strip_prefix('<').ok_or_else(|| bad("expected `<`"))?;
    let (a, rest) = parse_prefix(rest.trim_start())?;
    let rest = rest
        .trim_start()
        .strip_prefix(',')
        .ok_or_else(|| bad("expected `,` inside tuple"))?;
    let (b, rest) = parse_prefix(rest.trim_start())?;
    let rest = rest.trim_start().strip_prefix('>').ok_or_else(|| bad("expected `>`"))?;
    Ok(((a, b), rest))
}

fn min_loc() -> SourceLocation {
    SourceLocation::minimum()
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.sorted_tuples().join(","))
    }
}
