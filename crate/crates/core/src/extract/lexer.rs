//! Tokenizer for the Java subset. Offsets are in Unicode scalar values.

use super::ParseError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Int(i64),
    Str(String),
    Punct(&'static str),
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

// Longest first so that `==` wins over `=`.
const PUNCT: [&str; 27] = [
    "&&", "||", "==", "!=", "<=", ">=", "{", "}", "(", ")", "[", "]", ";", ",", ".", "=", "<", ">", "+", "-", "*", "/",
    "%", "!", ":", "?", "@",
];

pub const KEYWORDS: [&str; 27] = [
    "package",
    "import",
    "class",
    "interface",
    "extends",
    "implements",
    "public",
    "private",
    "protected",
    "static",
    "abstract",
    "final",
    "void",
    "int",
    "boolean",
    "if",
    "else",
    "while",
    "for",
    "return",
    "break",
    "continue",
    "new",
    "this",
    "null",
    "true",
    "false",
];

/// Tokenizes `text`, whose first character sits at absolute offset `base`.
pub fn tokenize(text: &str, base: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;

    // Advances over `n` characters, keeping line/column current.
    let bump = |i: &mut usize, line: &mut usize, col: &mut usize, n: usize| {
        for _ in 0..n {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        }
    };

    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col, 1);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            let (l0, c0) = (line, col);
            bump(&mut i, &mut line, &mut col, 2);
            loop {
                if i + 1 >= chars.len() {
                    return Err(ParseError::new(l0, c0, "end of comment `*/`"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    bump(&mut i, &mut line, &mut col, 2);
                    break;
                }
                bump(&mut i, &mut line, &mut col, 1);
            }
            continue;
        }

        let (start, l0, c0) = (i, line, col);
        let tok = if c.is_alphabetic() || c == '_' || c == '$' {
            let mut s = String::new();
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                s.push(chars[i]);
                bump(&mut i, &mut line, &mut col, 1);
            }
            Tok::Ident(s)
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while i < chars.len() && chars[i].is_ascii_digit() {
                s.push(chars[i]);
                bump(&mut i, &mut line, &mut col, 1);
            }
            let v = s
                .parse::<i64>()
                .map_err(|_| ParseError::new(l0, c0, "integer literal in range"))?;
            Tok::Int(v)
        } else if c == '"' {
            bump(&mut i, &mut line, &mut col, 1);
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None | Some('\n') => return Err(ParseError::new(l0, c0, "closing `\"` of string literal")),
                    Some('"') => {
                        bump(&mut i, &mut line, &mut col, 1);
                        break;
                    }
                    Some('\\') => {
                        let e = match chars.get(i + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => return Err(ParseError::new(line, col, "valid escape sequence")),
                        };
                        s.push(e);
                        bump(&mut i, &mut line, &mut col, 2);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        bump(&mut i, &mut line, &mut col, 1);
                    }
                }
            }
            Tok::Str(s)
        } else {
            let p = PUNCT
                .iter()
                .find(|p| p.chars().enumerate().all(|(k, pc)| chars.get(i + k) == Some(&pc)));
            match p {
                Some(p) => {
                    bump(&mut i, &mut line, &mut col, p.chars().count());
                    Tok::Punct(p)
                }
                None => return Err(ParseError::new(l0, c0, format!("a token, found `{c}`"))),
            }
        };
        out.push(Token {
            tok,
            start: base + start,
            end: base + i,
            line: l0,
            column: c0,
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        start: base + i,
        end: base + i,
        line,
        column: col,
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokens_and_positions() {
        let toks = tokenize("a <= b // c\n  \"x\\ny\" 42 /* z */ é", 10).unwrap();
        let kinds: Vec<Tok> = toks.iter().map(|t| t.tok.clone()).collect();
        assert_eq!(
            kinds,
            vec![
                Tok::Ident("a".into()),
                Tok::Punct("<="),
                Tok::Ident("b".into()),
                Tok::Str("x\ny".into()),
                Tok::Int(42),
                Tok::Ident("é".into()),
                Tok::Eof,
            ]
        );
        assert_eq!((toks[3].line, toks[3].column), (2, 3));
        assert_eq!((toks[1].start, toks[1].end), (12, 14));
        // The non-ASCII identifier is one character wide.
        assert_eq!(toks[5].end - toks[5].start, 1);
    }

    #[test]
    fn errors_carry_positions() {
        let e = tokenize("a\n  #", 0).unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
        assert!(tokenize("\"abc", 0).is_err());
        assert!(tokenize("/* open", 0).is_err());
    }
}
