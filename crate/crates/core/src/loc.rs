//! Source locations: URI-shaped identities for physical storage regions and
//! logically declared entities.
//!
//! The literal form is `|scheme://authority/seg/seg?k=v&k=v|(offset,length)`.
//! Printing is canonical: query keys are sorted and every component is
//! percent-encoded outside `[A-Za-z0-9._~()-]`, so `parse(print(l)) == l`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use thiserror::Error;

/// Characters left unescaped in printed components.
const COMPONENT: &AsciiSet = &NON_ALPHANUMERIC
    .remove(b'.')
    .remove(b'_')
    .remove(b'~')
    .remove(b'(')
    .remove(b')')
    .remove(b'-');

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocationError {
    #[error("malformed location `{literal}`: {reason}")]
    MalformedLocation { literal: String, reason: String },
    #[error("unknown scheme `{0}`")]
    UnknownScheme(String),
    #[error("scheme `{0}` registered as both physical and logical")]
    OverlappingScheme(String),
}

fn malformed(literal: &str, reason: impl Into<String>) -> LocationError {
    LocationError::MalformedLocation {
        literal: literal.to_string(),
        reason: reason.into(),
    }
}

/// A character slice of the identified artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Region {
    pub offset: u64,
    pub length: u64,
}

impl Region {
    pub fn new(offset: u64, length: u64) -> Self {
        Region { offset, length }
    }

    pub fn end(&self) -> u64 {
        self.offset + self.length
    }

    pub fn contains(&self, other: &Region) -> bool {
        other.offset >= self.offset && other.end() <= self.end()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SourceLocation {
    scheme: String,
    authority: String,
    path: Vec<String>,
    query: BTreeMap<String, String>,
    region: Option<Region>,
}

fn check_scheme(scheme: &str) -> Result<String, String> {
    let lowered = scheme.to_ascii_lowercase();
    if lowered.is_empty() {
        return Err("empty scheme".into());
    }
    if let Some(c) = lowered
        .chars()
        .find(|c| !(c.is_ascii_lowercase() || c.is_ascii_digit() || matches!(c, '+' | '.' | '-')))
    {
        return Err(format!("invalid character `{c}` in scheme"));
    }
    Ok(lowered)
}

impl SourceLocation {
    /// Builds a location without query or region.
    pub fn new<I, S>(scheme: &str, authority: &str, path: I) -> Result<Self, LocationError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let scheme = check_scheme(scheme).map_err(|r| malformed(scheme, r))?;
        Ok(SourceLocation {
            scheme,
            authority: authority.to_string(),
            path: path.into_iter().map(Into::into).collect(),
            query: BTreeMap::new(),
            region: None,
        })
    }

    pub fn scheme(&self) -> &str {
        &self.scheme
    }

    pub fn authority(&self) -> &str {
        &self.authority
    }

    pub fn path(&self) -> &[String] {
        &self.path
    }

    pub fn query(&self) -> &BTreeMap<String, String> {
        &self.query
    }

    pub fn region(&self) -> Option<Region> {
        self.region
    }

    /// The kind part of the scheme: the text after the last `+`, or the whole scheme.
    pub fn kind(&self) -> &str {
        self.scheme.rsplit('+').next().unwrap_or(&self.scheme)
    }

    /// The language part of a `<language>+<kind>` scheme.
    pub fn language(&self) -> Option<&str> {
        self.scheme.rsplit_once('+').map(|(lang, _)| lang)
    }

    pub fn with_authority(&self, authority: &str) -> Self {
        SourceLocation {
            authority: authority.to_string(),
            ..self.clone()
        }
    }

    pub fn with_region(&self, region: Region) -> Self {
        SourceLocation {
            region: Some(region),
            ..self.clone()
        }
    }

    pub fn without_region(&self) -> Self {
        SourceLocation {
            region: None,
            ..self.clone()
        }
    }

    pub fn with_query(&self, key: &str, value: &str) -> Self {
        let mut query = self.query.clone();
        query.insert(key.to_string(), value.to_string());
        SourceLocation { query, ..self.clone() }
    }

    /// Appends one path segment.
    pub fn child(&self, segment: &str) -> Self {
        let mut path = self.path.clone();
        path.push(segment.to_string());
        SourceLocation { path, ..self.clone() }
    }

    /// Replaces the scheme, keeping the remaining fields.
    pub fn with_scheme(&self, scheme: &str) -> Result<Self, LocationError> {
        let scheme = check_scheme(scheme).map_err(|r| malformed(scheme, r))?;
        Ok(SourceLocation { scheme, ..self.clone() })
    }

    /// Smallest value under the derived ordering; only used as a range bound.
    pub(crate) fn minimum() -> Self {
        SourceLocation {
            scheme: String::new(),
            authority: String::new(),
            path: Vec::new(),
            query: BTreeMap::new(),
            region: None,
        }
    }

    /// Parses a `|...|(off,len)` literal.
    pub fn parse(literal: &str) -> Result<Self, LocationError> {
        match parse_prefix(literal)? {
            (loc, "") => Ok(loc),
            (_, rest) => Err(malformed(literal, format!("trailing text `{rest}`"))),
        }
    }

    /// Joined path, `/`-prefixed, as it appears inside the literal (decoded).
    pub fn path_string(&self) -> String {
        let mut out = String::new();
        for seg in &self.path {
            out.push('/');
            out.push_str(seg);
        }
        out
    }
}

/// Parses one location literal at the start of `input`, returning the rest.
pub fn parse_prefix(input: &str) -> Result<(SourceLocation, &str), LocationError> {
    let body_start = input
        .strip_prefix('|')
        .ok_or_else(|| malformed(input, "missing opening `|`"))?;
    let close = body_start
        .find('|')
        .ok_or_else(|| malformed(input, "missing closing `|`"))?;
    let body = &body_start[..close];
    let mut rest = &body_start[close + 1..];
    let literal = &input[..close + 2];

    let (scheme, after) = body
        .split_once("://")
        .ok_or_else(|| malformed(literal, "missing `://`"))?;
    let scheme = check_scheme(scheme).map_err(|r| malformed(literal, r))?;

    let (hier, query_text) = match after.split_once('?') {
        Some((h, q)) => (h, Some(q)),
        None => (after, None),
    };
    let (authority, path_text) = match hier.find('/') {
        Some(i) => (&hier[..i], Some(&hier[i + 1..])),
        None => (hier, None),
    };
    let authority = decode(authority, literal)?;
    let path = match path_text {
        Some(p) => p
            .split('/')
            .map(|s| decode(s, literal))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };

    let mut query = BTreeMap::new();
    if let Some(q) = query_text.filter(|q| !q.is_empty()) {
        for item in q.split('&') {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| malformed(literal, format!("query item `{item}` lacks `=`")))?;
            let k = decode(k, literal)?;
            if query.insert(k.clone(), decode(v, literal)?).is_some() {
                return Err(malformed(literal, format!("duplicate query key `{k}`")));
            }
        }
    }

    let mut region = None;
    if let Some(r) = rest.strip_prefix('(') {
        let end = r.find(')').ok_or_else(|| malformed(input, "unterminated region"))?;
        let (off, len) = r[..end]
            .split_once(',')
            .ok_or_else(|| malformed(input, "region needs `(offset,length)`"))?;
        let num = |s: &str| {
            if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
                return Err(malformed(input, format!("non-numeric region component `{s}`")));
            }
            s.parse::<u64>()
                .map_err(|e| malformed(input, format!("region component `{s}`: {e}")))
        };
        region = Some(Region::new(num(off)?, num(len)?));
        rest = &r[end + 1..];
    }

    Ok((
        SourceLocation {
            scheme,
            authority,
            path,
            query,
            region,
        },
        rest,
    ))
}

fn decode(s: &str, literal: &str) -> Result<String, LocationError> {
    percent_decode_str(s)
        .decode_utf8()
        .map(|c| c.into_owned())
        .map_err(|_| malformed(literal, "percent-escape does not decode to UTF-8"))
}

fn encode(s: &str) -> impl fmt::Display + '_ {
    utf8_percent_encode(s, COMPONENT)
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}://{}", self.scheme, encode(&self.authority))?;
        for seg in &self.path {
            write!(f, "/{}", encode(seg))?;
        }
        for (i, (k, v)) in self.query.iter().enumerate() {
            let sep = if i == 0 { '?' } else { '&' };
            write!(f, "{sep}{}={}", encode(k), encode(v))?;
        }
        f.write_str("|")?;
        if let Some(r) = self.region {
            write!(f, "({},{})", r.offset, r.length)?;
        }
        Ok(())
    }
}

impl FromStr for SourceLocation {
    type Err = LocationError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SourceLocation::parse(s)
    }
}

/// Distinguishes physical storage schemes from logical entity kinds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeRegistry {
    physical: BTreeSet<String>,
    logical_kinds: BTreeSet<String>,
}

pub const DEFAULT_PHYSICAL: [&str; 4] = ["file", "project", "cwd", "unknown"];
pub const DEFAULT_LOGICAL_KINDS: [&str; 9] = [
    "class",
    "interface",
    "method",
    "constructor",
    "field",
    "parameter",
    "variable",
    "package",
    "typeparameter",
];

impl Default for SchemeRegistry {
    fn default() -> Self {
        SchemeRegistry {
            physical: DEFAULT_PHYSICAL.iter().map(|s| s.to_string()).collect(),
            logical_kinds: DEFAULT_LOGICAL_KINDS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl SchemeRegistry {
    pub fn empty() -> Self {
        SchemeRegistry {
            physical: BTreeSet::new(),
            logical_kinds: BTreeSet::new(),
        }
    }

    pub fn with_physical(mut self, scheme: &str) -> Result<Self, LocationError> {
        let scheme = scheme.to_ascii_lowercase();
        if self.logical_kinds.contains(&scheme) {
            return Err(LocationError::OverlappingScheme(scheme));
        }
        self.physical.insert(scheme);
        Ok(self)
    }

    pub fn with_logical_kind(mut self, kind: &str) -> Result<Self, LocationError> {
        let kind = kind.to_ascii_lowercase();
        if self.physical.contains(&kind) {
            return Err(LocationError::OverlappingScheme(kind));
        }
        self.logical_kinds.insert(kind);
        Ok(self)
    }

    pub fn physical_schemes(&self) -> &BTreeSet<String> {
        &self.physical
    }

    pub fn logical_kinds(&self) -> &BTreeSet<String> {
        &self.logical_kinds
    }

    pub fn is_logical(&self, loc: &SourceLocation) -> Result<bool, LocationError> {
        if self.logical_kinds.contains(loc.kind()) {
            Ok(true)
        } else if self.physical.contains(loc.scheme()) {
            Ok(false)
        } else {
            Err(LocationError::UnknownScheme(loc.scheme().to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(s: &str) -> SourceLocation {
        SourceLocation::parse(s).unwrap()
    }

    #[test]
    fn parses_physical_file_literal() {
        let l = loc("|file:///tmp/Hello.java|");
        assert_eq!(l.scheme(), "file");
        assert_eq!(l.authority(), "");
        assert_eq!(l.path(), ["tmp", "Hello.java"]);
        assert!(l.query().is_empty());
        assert_eq!(l.region(), None);
        assert_eq!(l.to_string(), "|file:///tmp/Hello.java|");
    }

    #[test]
    fn parses_logical_literal() {
        let l = loc("|java+class://myProject/java/util/List|");
        assert_eq!(l.scheme(), "java+class");
        assert_eq!(l.authority(), "myProject");
        assert_eq!(l.path(), ["java", "util", "List"]);
        assert_eq!(l.kind(), "class");
        assert_eq!(l.language(), Some("java"));
    }

    #[test]
    fn parses_version_query() {
        let l = loc("|class://myPrj/java/util/List?svn=4242|");
        assert_eq!(l.query().get("svn").map(String::as_str), Some("4242"));
        assert_eq!(l.query().len(), 1);
    }

    #[test]
    fn rejects_malformed() {
        for bad in [
            "||",
            "|file:///x",
            "file:///x|",
            "|:///x|",
            "|file:///x|(a,1)",
            "|file:///x|(1)",
            "|file:///x|(1,2",
            "|fi le:///x|",
            "|file:///x|junk",
            "|file:///a|b|",
            "|file:///x?k|",
            "|file:///x?k=1&k=2|",
            "|file:///%FF|",
        ] {
            assert!(
                matches!(SourceLocation::parse(bad), Err(LocationError::MalformedLocation { .. })),
                "{bad} should be malformed"
            );
        }
    }

    #[test]
    fn prints_region_and_escapes() {
        let l = SourceLocation::new("file", "", ["a b"]).unwrap();
        assert_eq!(l.to_string(), "|file:///a%20b|");
        assert_eq!(loc("|file:///a%20b|"), l);
        let r = l.with_region(Region::new(0, 0));
        assert_eq!(r.to_string(), "|file:///a%20b|(0,0)");
        assert_eq!(loc(&r.to_string()), r);
    }

    #[test]
    fn query_keys_print_sorted() {
        let l = SourceLocation::new("class", "p", ["A"])
            .unwrap()
            .with_query("z", "1")
            .with_query("a", "2");
        assert_eq!(l.to_string(), "|class://p/A?a=2&z=1|");
    }

    #[test]
    fn scheme_is_lowercased() {
        assert_eq!(loc("|FILE:///x|").scheme(), "file");
    }

    #[test]
    fn empty_segments_round_trip() {
        for s in ["|file://|", "|file:///|", "|file:///a//b|", "|file://h/|"] {
            assert_eq!(loc(s).to_string(), s);
        }
    }

    #[test]
    fn classification() {
        let reg = SchemeRegistry::default();
        assert!(reg.is_logical(&loc("|java+class://p/a/B|")).unwrap());
        assert!(reg.is_logical(&loc("|class:///foo/Bar|")).unwrap());
        assert!(!reg.is_logical(&loc("|file:///x|")).unwrap());
        assert_eq!(
            reg.is_logical(&loc("|gopher://x|")),
            Err(LocationError::UnknownScheme("gopher".into()))
        );
    }

    #[test]
    fn registry_stays_disjoint() {
        let reg = SchemeRegistry::default();
        assert!(reg.clone().with_physical("class").is_err());
        assert!(reg.clone().with_logical_kind("file").is_err());
        let reg = reg.with_physical("jar").unwrap();
        assert!(!reg.is_logical(&loc("|jar:///x|")).unwrap());
    }

    #[test]
    fn with_authority_substitutes() {
        let l = loc("|java+class://projA/foo/Bar|");
        assert_eq!(l.with_authority("projB"), loc("|java+class://projB/foo/Bar|"));
        assert_eq!(l.with_authority(l.authority()), l);
        assert_eq!(l.authority(), "projA");
        let p = loc("|file://host/x|(1,2)");
        assert_eq!(p.with_authority("other"), loc("|file://other/x|(1,2)"));
    }
}
