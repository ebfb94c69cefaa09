use super::Diagnostic;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Kind {
    Ident,
    Arrow,
    NoFlow,
    Colon,
    Semi,
    Comma,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Bowtie,
    Eof,
}

impl Kind {
    pub(crate) fn describe(self) -> &'static str {
        match self {
            Kind::Ident => "identifier",
            Kind::Arrow => "`->`",
            Kind::NoFlow => "`!->`",
            Kind::Colon => "`:`",
            Kind::Semi => "`;`",
            Kind::Comma => "`,`",
            Kind::LBrace => "`{`",
            Kind::RBrace => "`}`",
            Kind::LParen => "`(`",
            Kind::RParen => "`)`",
            Kind::Bowtie => "`⋈`",
            Kind::Eof => "end of input",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: Kind,
    pub text: String,
    pub line: usize,
    pub column: usize,
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let start = (line, col);
        let mut push = |kind, text: String, width: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { kind, text, line: start.0, column: start.1 });
            *i += width;
            *col += width;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '/' if chars.get(i + 1) == Some(&'/') => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '-' if chars.get(i + 1) == Some(&'>') => push(Kind::Arrow, "->".into(), 2, &mut i, &mut col),
            '!' if chars.get(i + 1) == Some(&'-') && chars.get(i + 2) == Some(&'>') => {
                push(Kind::NoFlow, "!->".into(), 3, &mut i, &mut col)
            }
            ':' => push(Kind::Colon, ":".into(), 1, &mut i, &mut col),
            ';' => push(Kind::Semi, ";".into(), 1, &mut i, &mut col),
            ',' => push(Kind::Comma, ",".into(), 1, &mut i, &mut col),
            '{' => push(Kind::LBrace, "{".into(), 1, &mut i, &mut col),
            '}' => push(Kind::RBrace, "}".into(), 1, &mut i, &mut col),
            '(' => push(Kind::LParen, "(".into(), 1, &mut i, &mut col),
            ')' => push(Kind::RParen, ")".into(), 1, &mut i, &mut col),
            '⋈' => push(Kind::Bowtie, "⋈".into(), 1, &mut i, &mut col),
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let word: String = chars[i..j].iter().collect();
                push(Kind::Ident, word, j - i, &mut i, &mut col);
            }
            other => return Err(Diagnostic::error(line, col, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token { kind: Kind::Eof, text: String::new(), line, column: col });
    Ok(out)
}
