use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `0` and `1`, the empty and unit value types.
    Digit(u8),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    LAngle,
    RAngle,
    Comma,
    Semi,
    Dot,
    Colon,
    Bar,
    Lambda,
    Equals,
    Arrow,
    Star,
    Plus,
    Amp,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Digit(d) => format!("`{d}`"),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Bar => "|",
            Tok::Lambda => "\\",
            Tok::Equals => "=",
            Tok::Arrow => "->",
            Tok::Star => "*",
            Tok::Plus => "+",
            Tok::Amp => "&",
            Tok::Ident(_) | Tok::Digit(_) => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub const KEYWORDS: &[&str] = &[
    "return", "to", "force", "fst", "snd", "pm", "as", "case", "case0", "of", "inl", "inr", "let", "in", "thunk", "F",
    "U", "Top",
];

pub fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

pub fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() && c != 'λ' || c == '_'
}

pub fn is_ident_continue(c: char) -> bool {
    c.is_alphanumeric() && c != 'λ' || c == '_' || c == '\''
}

/// Splits the input into tokens. `#` starts a comment running to the end of the line.
pub fn tokenize(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, col);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };

        if c.is_whitespace() {
            bump(&mut chars);
            continue;
        }
        if c == '#' {
            while let Some(&c) = chars.peek() {
                if c == '\n' {
                    break;
                }
                bump(&mut chars);
            }
            continue;
        }
        let tok = if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&c) = chars.peek() {
                if !is_ident_continue(c) {
                    break;
                }
                s.push(c);
                bump(&mut chars);
            }
            Tok::Ident(s)
        } else if c == '0' || c == '1' {
            bump(&mut chars);
            if chars.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Err(ParseError::lexical(
                    tl,
                    tc,
                    "numeric literals other than 0 and 1 are not part of the grammar",
                ));
            }
            Tok::Digit(if c == '0' { 0 } else { 1 })
        } else {
            bump(&mut chars);
            match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBrack,
                ']' => Tok::RBrack,
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '<' => Tok::LAngle,
                '>' => Tok::RAngle,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                '.' => Tok::Dot,
                ':' => Tok::Colon,
                '|' => Tok::Bar,
                '\\' | 'λ' => Tok::Lambda,
                '=' => Tok::Equals,
                '*' | '×' => Tok::Star,
                '+' => Tok::Plus,
                '&' => Tok::Amp,
                '→' => Tok::Arrow,
                '-' => {
                    if chars.peek() == Some(&'>') {
                        bump(&mut chars);
                        Tok::Arrow
                    } else {
                        return Err(ParseError::lexical(tl, tc, "expected `->`"));
                    }
                }
                other => {
                    return Err(ParseError::lexical(tl, tc, format!("unexpected character `{other}`")));
                }
            }
        };
        out.push(Spanned { tok, line: tl, col: tc });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_spellings_agree() {
        let a: Vec<_> = tokenize("\\x. x").unwrap().into_iter().map(|s| s.tok).collect();
        let b: Vec<_> = tokenize("λx. x").unwrap().into_iter().map(|s| s.tok).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("# header\n  return ()").unwrap();
        assert_eq!(toks[0].tok, Tok::Ident("return".into()));
        assert_eq!((toks[0].line, toks[0].col), (2, 3));
    }

    #[test]
    fn stray_character_is_lexical_error() {
        let err = tokenize("return $").unwrap_err();
        assert_eq!((err.line, err.col), (1, 8));
        assert!(matches!(err.kind, super::super::ParseErrorKind::Lexical));
    }
}
