//! The `.m3` text format.
//!
//! ```text
//! m3 |project://corpus|
//! relation containment
//! {
//!   <|java+class://corpus/foo/Bar|,|java+package://corpus/foo|>,
//!   <|java+method://corpus/foo/Bar/f()|,|java+class://corpus/foo/Bar|>
//! }
//! relation declarations
//! {}
//! ...
//! types
//! |java+class://corpus/foo/Bar| -> class(|java+class://corpus/foo/Bar|,[])
//! ```
//!
//! Six `relation` sections and one `types` section, each exactly once, in any
//! order on read; written in the order of [`RELATION_NAMES`] with tuples and
//! type lines sorted by their printed text.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::loc::{parse_prefix, SourceLocation};
use crate::model::{M3Model, RELATION_NAMES};
use crate::rel::{parse_tuple, Relation};
use crate::typesym::TypeSymbol;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SerialError {
    #[error("line {line}: {message}")]
    MalformedModel { line: usize, message: String },
    #[error("line {line}: unknown section `{name}`")]
    UnknownSection { line: usize, name: String },
}

fn malformed(line: usize, message: impl Into<String>) -> SerialError {
    SerialError::MalformedModel {
        line,
        message: message.into(),
    }
}

pub fn write_model(m: &M3Model) -> String {
    let mut out = String::new();
    writeln!(out, "m3 {}", m.id).unwrap();
    for (name, rel) in m.relations() {
        writeln!(out, "relation {name}").unwrap();
        let tuples = rel.sorted_tuples();
        if tuples.is_empty() {
            out.push_str("{}\n");
            continue;
        }
        out.push_str("{\n");
        let last = tuples.len() - 1;
        for (i, t) in tuples.iter().enumerate() {
            out.push_str("  ");
            out.push_str(t);
            out.push_str(if i == last { "\n" } else { ",\n" });
        }
        out.push_str("}\n");
    }
    out.push_str("types\n");
    let mut lines: Vec<String> = m.declared_types.iter().map(|(k, v)| format!("{k} -> {v}")).collect();
    lines.sort();
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

pub fn read_model(text: &str) -> Result<M3Model, SerialError> {
    // Lines are (1-based number, content without trailing whitespace); blank lines skipped.
    let mut lines = text
        .split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end()))
        .filter(|(_, l)| !l.is_empty())
        .peekable();
    let total_lines = text.split('\n').count();

    let (n, header) = lines
        .next()
        .ok_or_else(|| malformed(1, "empty input, expected `m3 <location>` header"))?;
    let id_text = header
        .strip_prefix("m3 ")
        .ok_or_else(|| malformed(n, "expected `m3 <location>` header"))?;
    let id = SourceLocation::parse(id_text.trim()).map_err(|e| malformed(n, e.to_string()))?;

    let mut model = M3Model::empty(id);
    let mut seen: BTreeSet<&'static str> = BTreeSet::new();

    while let Some((n, line)) = lines.next() {
        let line = line.trim_start();
        if line == "types" {
            if !seen.insert("types") {
                return Err(malformed(n, "duplicate section `types`"));
            }
            while let Some((_, l)) = lines.peek() {
                let l = l.trim_start();
                if l.starts_with("relation ") || l == "types" {
                    break;
                }
                let (n, l) = lines.next().unwrap();
                let (key, value) = parse_type_line(l.trim_start()).map_err(|m| malformed(n, m))?;
                if model.declared_types.insert(key, value).is_some() {
                    return Err(malformed(n, "duplicate key in types section"));
                }
            }
            continue;
        }
        let name = match line.strip_prefix("relation ") {
            Some(name) => name.trim(),
            None => {
                let name = line.split_whitespace().next().unwrap_or(line);
                return Err(SerialError::UnknownSection {
                    line: n,
                    name: name.to_string(),
                });
            }
        };
        let name = RELATION_NAMES
            .iter()
            .find(|r| **r == name)
            .ok_or_else(|| SerialError::UnknownSection {
                line: n,
                name: name.to_string(),
            })?;
        if !seen.insert(name) {
            return Err(malformed(n, format!("duplicate section `{name}`")));
        }
        let rel = read_relation_body(&mut lines, n, total_lines)?;
        *model.relation_mut(name).expect("known name") = rel;
    }

    for required in RELATION_NAMES.iter().chain(["types"].iter()) {
        if !seen.contains(required) {
            return Err(malformed(
                total_lines,
                format!("missing section `{required}` (truncated input?)"),
            ));
        }
    }
    Ok(model)
}

fn read_relation_body<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    header_line: usize,
    total_lines: usize,
) -> Result<Relation, SerialError> {
    let (n, open) = lines
        .next()
        .ok_or_else(|| malformed(total_lines, format!("missing relation body after line {header_line}")))?;
    let open = open.trim_start();
    if open.starts_with('{') && open.ends_with('}') {
        // Single-line form, e.g. `{}` or `{<a,b>,<c,d>}`.
        return Relation::parse(open).map_err(|e| malformed(n, e.to_string()));
    }
    if open != "{" {
        return Err(malformed(n, "expected `{`"));
    }
    let mut pairs = Vec::new();
    let mut expect_more = true;
    for (n, line) in lines.by_ref() {
        let line = line.trim_start();
        if line == "}" {
            if !pairs.is_empty() && expect_more {
                return Err(malformed(n, "trailing `,` before `}`"));
            }
            return Ok(pairs.into_iter().collect());
        }
        if !expect_more {
            return Err(malformed(n, "missing `,` after previous tuple"));
        }
        let (pair, rest) = parse_tuple(line).map_err(|e| malformed(n, e.to_string()))?;
        match rest.trim() {
            "," => expect_more = true,
            "" => expect_more = false,
            other => return Err(malformed(n, format!("unexpected `{other}` after tuple"))),
        }
        pairs.push(pair);
    }
    Err(malformed(total_lines, "unterminated relation, expected `}`"))
}

fn parse_type_line(line: &str) -> Result<(SourceLocation, TypeSymbol), String> {
    let (key, rest) = parse_prefix(line).map_err(|e| e.to_string())?;
    let sym = rest
        .trim_start()
        .strip_prefix("->")
        .ok_or("expected `->` after location")?;
    let sym = TypeSymbol::parse(sym.trim()).map_err(|e| e.to_string())?;
    Ok((key, sym))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn loc(s: &str) -> SourceLocation {
        SourceLocation::parse(s).unwrap()
    }

    fn sample() -> M3Model {
        let mut m = M3Model::empty(loc("|project://corpus|"));
        let bar = loc("|java+class://c/foo/Bar|");
        let f = loc("|java+method://c/foo/Bar/f(int%2Cint)|");
        m.containment = m
            .containment
            .with(bar.clone(), loc("|java+package://c/foo|"))
            .with(f.clone(), bar.clone());
        m.declarations = m
            .declarations
            .with(bar.clone(), loc("|project://corpus/foo/Bar.java|(13,40)"));
        m.declared_types.insert(
            bar.clone(),
            TypeSymbol::Class {
                decl: bar,
                args: vec![],
            },
        );
        m
    }

    #[test]
    fn empty_model_layout() {
        let text = write_model(&M3Model::empty(loc("|file:///p|")));
        let expected = "m3 |file:///p|\n\
            relation containment\n{}\n\
            relation declarations\n{}\n\
            relation uses\n{}\n\
            relation inheritance\n{}\n\
            relation overrides\n{}\n\
            relation invocations\n{}\n\
            types\n";
        assert_eq!(text, expected);
        assert_eq!(read_model(&text).unwrap(), M3Model::empty(loc("|file:///p|")));
    }

    #[test]
    fn round_trip_and_fixpoint() {
        let m = sample();
        let text = write_model(&m);
        assert!(text.contains("{\n  <|java+class://c/foo/Bar|,|java+package://c/foo|>,\n  <"));
        let back = read_model(&text).unwrap();
        assert_eq!(back, m);
        assert_eq!(write_model(&back), text);
    }

    #[test]
    fn tolerant_line_endings_and_order() {
        let text = write_model(&sample());
        let crlf = text.replace('\n', "  \r\n");
        assert_eq!(read_model(&crlf).unwrap(), sample());

        // Move the types section to the front.
        let (head, types) = text.split_at(text.find("types\n").unwrap());
        let first_nl = head.find('\n').unwrap() + 1;
        let reordered = format!("{}{}{}", &head[..first_nl], types, &head[first_nl..]);
        let m = read_model(&reordered).unwrap();
        assert_eq!(m, sample());
        assert_eq!(write_model(&m), text);
    }

    #[test]
    fn truncated_input_reports_line() {
        let text = write_model(&sample());
        let cut: String = text.lines().take(4).collect::<Vec<_>>().join("\n");
        match read_model(&cut) {
            Err(SerialError::MalformedModel { line, .. }) => assert_eq!(line, 4),
            other => panic!("{other:?}"),
        }
        let cut: String = text.lines().take(9).collect::<Vec<_>>().join("\n");
        assert!(matches!(read_model(&cut), Err(SerialError::MalformedModel { .. })));
        assert!(matches!(
            read_model(""),
            Err(SerialError::MalformedModel { line: 1, .. })
        ));
    }

    #[test]
    fn unknown_sections_rejected() {
        let text = write_model(&sample()).replace("relation uses", "relation flow");
        assert!(matches!(read_model(&text), Err(SerialError::UnknownSection { ref name, .. }) if name == "flow"));
        let text = write_model(&sample()) + "modifiers\n";
        // `modifiers` is read as a type line and fails to parse as a location.
        assert!(read_model(&text).is_err());
        let text = write_model(&sample()).replace("types\n", "documentation\ntypes\n");
        assert!(matches!(read_model(&text), Err(SerialError::UnknownSection { .. })));
    }

    #[test]
    fn duplicate_sections_rejected() {
        let text = write_model(&sample()) + "relation uses\n{}\n";
        assert!(matches!(read_model(&text), Err(SerialError::MalformedModel { .. })));
    }
}
