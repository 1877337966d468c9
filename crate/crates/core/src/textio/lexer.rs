use super::ParseError;

#[derive(Debug, Clone, PartialEq)]
pub enum TokKind {
    Name(String),
    Var(String),
    Quoted(String),
    Int(i64),
    Float(f64),
    KwIf,
    KwAs,
    KwTrue,
    KwFalse,
    KwInf,
    KwNan,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Comma,
    Dot,
    Star,
    Slash,
    Plus,
    Minus,
    PlusEq,
    Eq,
    Neq,
    ColonColon,
    At,
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tok {
    pub kind: TokKind,
    pub line: usize,
    pub col: usize,
}

pub fn lex(text: &str) -> Result<Vec<Tok>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    let mut line = 1;
    let mut col = 1;
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        let (tline, tcol) = (line, col);
        let err = |msg: String| ParseError {
            line: tline,
            col: tcol,
            message: msg,
        };
        let mut push = |kind| {
            toks.push(Tok {
                kind,
                line: tline,
                col: tcol,
            })
        };
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                bump!();
            }
            let word: String = chars[start..i].iter().collect();
            let kind = match word.as_str() {
                "if" => TokKind::KwIf,
                "as" => TokKind::KwAs,
                "true" => TokKind::KwTrue,
                "false" => TokKind::KwFalse,
                "inf" => TokKind::KwInf,
                "nan" => TokKind::KwNan,
                _ if c.is_ascii_lowercase() => TokKind::Name(word),
                _ => TokKind::Var(word),
            };
            push(kind);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            let mut is_float = false;
            if i + 1 < chars.len() && chars[i] == '.' && chars[i + 1].is_ascii_digit() {
                is_float = true;
                bump!();
                while i < chars.len() && chars[i].is_ascii_digit() {
                    bump!();
                }
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    is_float = true;
                    while i < j {
                        bump!();
                    }
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        bump!();
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            if is_float {
                let v: f64 = text
                    .parse()
                    .map_err(|_| err(format!("bad number {text}")))?;
                push(TokKind::Float(v));
            } else {
                let v: i64 = text
                    .parse()
                    .map_err(|_| err(format!("integer {text} out of range")))?;
                push(TokKind::Int(v));
            }
            continue;
        }
        if c == '"' {
            bump!();
            let mut s = String::new();
            loop {
                if i >= chars.len() || chars[i] == '\n' {
                    return Err(err("unterminated string".to_string()));
                }
                match chars[i] {
                    '"' => {
                        bump!();
                        break;
                    }
                    '\\' => {
                        bump!();
                        if i >= chars.len() {
                            return Err(err("unterminated string".to_string()));
                        }
                        match chars[i] {
                            '"' => s.push('"'),
                            '\\' => s.push('\\'),
                            other => return Err(err(format!("unknown escape \\{other}"))),
                        }
                        bump!();
                    }
                    other => {
                        s.push(other);
                        bump!();
                    }
                }
            }
            push(TokKind::Quoted(s));
            continue;
        }
        let next = chars.get(i + 1).copied();
        let compound = match (c, next) {
            ('+', Some('=')) => Some(TokKind::PlusEq),
            ('!', Some('=')) => Some(TokKind::Neq),
            (':', Some(':')) => Some(TokKind::ColonColon),
            _ => None,
        };
        if let Some(kind) = compound {
            push(kind);
            bump!();
            bump!();
            continue;
        }
        let kind = match c {
            '(' => TokKind::LParen,
            ')' => TokKind::RParen,
            '[' => TokKind::LBracket,
            ']' => TokKind::RBracket,
            '<' => TokKind::LAngle,
            '>' => TokKind::RAngle,
            ',' => TokKind::Comma,
            '.' => TokKind::Dot,
            '*' => TokKind::Star,
            '/' => TokKind::Slash,
            '+' => TokKind::Plus,
            '-' => TokKind::Minus,
            '=' => TokKind::Eq,
            '@' => TokKind::At,
            other => return Err(err(format!("unexpected character {other:?}"))),
        };
        push(kind);
        bump!();
    }
    toks.push(Tok {
        kind: TokKind::Eof,
        line,
        col,
    });
    Ok(toks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(text: &str) -> Vec<TokKind> {
        lex(text).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn offsets_do_not_glue_into_negative_numbers() {
        assert_eq!(
            kinds("I - 1"),
            vec![
                TokKind::Var("I".into()),
                TokKind::Minus,
                TokKind::Int(1),
                TokKind::Eof
            ]
        );
        assert_eq!(
            kinds("I-1"),
            vec![
                TokKind::Var("I".into()),
                TokKind::Minus,
                TokKind::Int(1),
                TokKind::Eof
            ]
        );
    }

    #[test]
    fn numbers_and_dots_separate() {
        assert_eq!(
            kinds("goal = 3."),
            vec![
                TokKind::Name("goal".into()),
                TokKind::Eq,
                TokKind::Int(3),
                TokKind::Dot,
                TokKind::Eof
            ]
        );
        assert_eq!(kinds("0.375")[0], TokKind::Float(0.375));
        assert_eq!(kinds("1e-3")[0], TokKind::Float(1e-3));
        assert_eq!(kinds("2.5e2")[0], TokKind::Float(250.0));
    }

    #[test]
    fn keywords_and_identifiers() {
        assert_eq!(
            kinds("if it X1 xY"),
            vec![
                TokKind::KwIf,
                TokKind::Name("it".into()),
                TokKind::Var("X1".into()),
                TokKind::Name("xY".into()),
                TokKind::Eof
            ]
        );
    }

    #[test]
    fn comments_and_strings() {
        assert_eq!(
            kinds("a % rest is gone\nb"),
            vec![
                TokKind::Name("a".into()),
                TokKind::Name("b".into()),
                TokKind::Eof
            ]
        );
        assert_eq!(kinds("\"two words\"")[0], TokKind::Quoted("two words".into()));
        assert_eq!(kinds("\"a\\\"b\\\\c\"")[0], TokKind::Quoted("a\"b\\c".into()));
        assert!(lex("\"open").is_err());
    }

    #[test]
    fn compound_operators() {
        assert_eq!(
            kinds("+= != :: < >"),
            vec![
                TokKind::PlusEq,
                TokKind::Neq,
                TokKind::ColonColon,
                TokKind::LAngle,
                TokKind::RAngle,
                TokKind::Eof
            ]
        );
    }

    #[test]
    fn positions_are_tracked() {
        let toks = lex("a\n  bc").unwrap();
        assert_eq!((toks[0].line, toks[0].col), (1, 1));
        assert_eq!((toks[1].line, toks[1].col), (2, 3));
    }
}
