use super::error::{ParseError, SourceSpan};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    /// Magnitude only; a leading minus is a separate token.
    Nat(u64),
    Goal,
    Forall,
    Exists,
    In,
    If,
    Then,
    Else,
    True,
    False,
    Length,
    Count,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Define,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Star,
    Percent,
    Append,
    Cons,
    And,
    Or,
    Arrow,
    Not,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Nat(n) => format!("integer `{n}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.spelling()),
        }
    }

    fn spelling(&self) -> &'static str {
        match self {
            Tok::Goal => "goal",
            Tok::Forall => "forall",
            Tok::Exists => "exists",
            Tok::In => "in",
            Tok::If => "if",
            Tok::Then => "then",
            Tok::Else => "else",
            Tok::True => "true",
            Tok::False => "false",
            Tok::Length => "length",
            Tok::Count => "count",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Define => ":=",
            Tok::Eq => "=",
            Tok::Ne => "!=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::Ge => ">=",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Percent => "%",
            Tok::Append => "++",
            Tok::Cons => "::",
            Tok::And => "/\\",
            Tok::Or => "\\/",
            Tok::Arrow => "->",
            Tok::Not => "~",
            Tok::Ident(_) | Tok::Nat(_) | Tok::Eof => "",
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    let mut line = 1usize;
    let mut col = 1usize;

    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }

        let start_col = col;
        let peek = chars.get(i + 1).copied();
        let (tok, width) = if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let digits: String = chars[i..j].iter().collect();
            let span = SourceSpan::new(line, start_col, j - i);
            let value = digits
                .parse::<u64>()
                .map_err(|_| ParseError::new(format!("integer literal `{digits}` is too large"), span))?;
            (Tok::Nat(value), j - i)
        } else if c.is_alphabetic() || c == '_' {
            let mut j = i;
            while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_' || chars[j] == '\'') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            (keyword(&word).unwrap_or(Tok::Ident(word)), j - i)
        } else {
            match (c, peek) {
                (':', Some('=')) => (Tok::Define, 2),
                (':', Some(':')) => (Tok::Cons, 2),
                (':', _) => (Tok::Colon, 1),
                ('<', Some('=')) => (Tok::Le, 2),
                ('<', _) => (Tok::Lt, 1),
                ('>', Some('=')) => (Tok::Ge, 2),
                ('>', _) => (Tok::Gt, 1),
                ('!', Some('=')) => (Tok::Ne, 2),
                ('-', Some('>')) => (Tok::Arrow, 2),
                ('-', _) => (Tok::Minus, 1),
                ('+', Some('+')) => (Tok::Append, 2),
                ('+', _) => (Tok::Plus, 1),
                ('/', Some('\\')) => (Tok::And, 2),
                ('\\', Some('/')) => (Tok::Or, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('[', _) => (Tok::LBracket, 1),
                (']', _) => (Tok::RBracket, 1),
                (',', _) => (Tok::Comma, 1),
                ('=', _) => (Tok::Eq, 1),
                ('*', _) => (Tok::Star, 1),
                ('%', _) => (Tok::Percent, 1),
                ('~', _) | ('¬', _) => (Tok::Not, 1),
                ('∧', _) => (Tok::And, 1),
                ('∨', _) => (Tok::Or, 1),
                ('→', _) | ('⇒', _) => (Tok::Arrow, 1),
                ('∀', _) => (Tok::Forall, 1),
                ('∃', _) => (Tok::Exists, 1),
                ('∈', _) => (Tok::In, 1),
                ('≤', _) => (Tok::Le, 1),
                ('≥', _) => (Tok::Ge, 1),
                ('≠', _) => (Tok::Ne, 1),
                _ => {
                    return Err(ParseError::new(
                        format!("unexpected character `{c}`"),
                        SourceSpan::new(line, start_col, 1),
                    ))
                }
            }
        };
        out.push(Token {
            tok,
            span: SourceSpan::new(line, start_col, width),
        });
        i += width;
        col += width;
    }
    out.push(Token {
        tok: Tok::Eof,
        span: SourceSpan::new(line, col, 0),
    });
    Ok(out)
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "goal" => Tok::Goal,
        "forall" => Tok::Forall,
        "exists" => Tok::Exists,
        "in" => Tok::In,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "true" => Tok::True,
        "false" => Tok::False,
        "length" | "Length" => Tok::Length,
        "count" | "Count" => Tok::Count,
        _ => return None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn unicode_aliases_map_to_ascii_tokens() {
        assert_eq!(toks("∀ ∃ ∧ ∨ → ¬ ∈ ≤ ≥ ≠"), toks("forall exists /\\ \\/ -> ~ in <= >= !="));
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("# header\n  goal x").unwrap();
        assert_eq!(t[0].tok, Tok::Goal);
        assert_eq!((t[0].span.line, t[0].span.column), (2, 3));
        assert_eq!(t[1].span.column, 8);
    }

    #[test]
    fn overlong_literal_is_an_error() {
        let err = tokenize("99999999999999999999999").unwrap_err();
        assert!(err.message.contains("too large"));
    }

    #[test]
    fn stray_character_reports_span() {
        let err = tokenize("x = @").unwrap_err();
        assert_eq!((err.span.line, err.span.column), (1, 5));
    }
}
