use super::{
    ClassRule, FormatAtom, GrammarSpec, LeafRule, LexicalKind, Multiplicity, PrettyRule,
    ProductionRule, Slot, SugarKind, SugarRule, SyntaxError,
};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Str(String),
    Directive(String),
    Metavar(String),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Lexeme {
    tok: Tok,
    line: usize,
    col: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

fn lex(text: &str) -> Result<Vec<Lexeme>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, col, message: String| SyntaxError { line, col, message };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, line: &mut usize, col: &mut usize| {
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
        if c.is_whitespace() {
            advance(1, &mut i, &mut line, &mut col);
            continue;
        }
        if c == '#' {
            if chars.get(i + 1).copied().is_some_and(is_ident_start) {
                let mut j = i + 1;
                while j < chars.len() && is_ident_char(chars[j]) {
                    j += 1;
                }
                let name: String = chars[i + 1..j].iter().collect();
                advance(j - i, &mut i, &mut line, &mut col);
                out.push(Lexeme { tok: Tok::Metavar(name), line: start_line, col: start_col });
            } else {
                while i < chars.len() && chars[i] != '\n' {
                    advance(1, &mut i, &mut line, &mut col);
                }
            }
            continue;
        }
        if is_ident_start(c) {
            let mut j = i + 1;
            while j < chars.len()
                && (is_ident_char(chars[j])
                    || (chars[j] == '-' && chars.get(j + 1).copied().is_some_and(is_ident_char)))
            {
                j += 1;
            }
            let name: String = chars[i..j].iter().collect();
            advance(j - i, &mut i, &mut line, &mut col);
            out.push(Lexeme { tok: Tok::Ident(name), line: start_line, col: start_col });
            continue;
        }
        if c == '"' {
            let mut j = i + 1;
            let mut value = String::new();
            loop {
                match chars.get(j) {
                    None | Some('\n') => {
                        return Err(err(start_line, start_col, "unterminated string".into()))
                    }
                    Some('"') => break,
                    Some('\\') => {
                        let escaped = match chars.get(j + 1) {
                            Some('n') => '\n',
                            Some('t') => '\t',
                            Some('"') => '"',
                            Some('\\') => '\\',
                            _ => {
                                return Err(err(start_line, start_col, "bad escape in string".into()))
                            }
                        };
                        value.push(escaped);
                        j += 2;
                    }
                    Some(&ch) => {
                        value.push(ch);
                        j += 1;
                    }
                }
            }
            advance(j + 1 - i, &mut i, &mut line, &mut col);
            out.push(Lexeme { tok: Tok::Str(value), line: start_line, col: start_col });
            continue;
        }
        if c == '\'' {
            let mut j = i + 1;
            while j < chars.len() && chars[j] != '\'' && chars[j] != '\n' {
                j += 1;
            }
            if chars.get(j) != Some(&'\'') {
                return Err(err(start_line, start_col, "unterminated directive".into()));
            }
            let body: String = chars[i + 1..j].iter().collect();
            advance(j + 1 - i, &mut i, &mut line, &mut col);
            out.push(Lexeme { tok: Tok::Directive(body), line: start_line, col: start_col });
            continue;
        }
        let punct: &'static str = match c {
            '-' if chars.get(i + 1) == Some(&'>') => "->",
            '(' => "(",
            ')' => ")",
            ',' => ",",
            ':' => ":",
            '*' => "*",
            '=' => "=",
            '|' => "|",
            ';' => ";",
            _ => return Err(err(start_line, start_col, format!("unexpected character {c:?}"))),
        };
        advance(punct.len(), &mut i, &mut line, &mut col);
        out.push(Lexeme { tok: Tok::Punct(punct), line: start_line, col: start_col });
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Lexeme>,
    pos: usize,
    eof: (usize, usize),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|l| &l.tok)
    }

    fn here(&self) -> (usize, usize) {
        self.toks.get(self.pos).map(|l| (l.line, l.col)).unwrap_or(self.eof)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, SyntaxError> {
        let (line, col) = self.here();
        Err(SyntaxError { line, col, message: message.into() })
    }

    fn next(&mut self) -> Option<Tok> {
        let tok = self.toks.get(self.pos).map(|l| l.tok.clone());
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn expect_punct(&mut self, p: &str) -> Result<(), SyntaxError> {
        if self.at_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected `{p}`"))
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, SyntaxError> {
        match self.peek() {
            Some(Tok::Ident(name)) => {
                let name = name.clone();
                self.pos += 1;
                Ok(name)
            }
            _ => self.error(format!("expected {what}")),
        }
    }
}

/// Parses the `.absyn` declaration format.
pub fn parse_spec(text: &str) -> Result<GrammarSpec, SyntaxError> {
    let toks = lex(text)?;
    let eof = {
        let line = text.matches('\n').count() + 1;
        let col = text.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    };
    let mut p = Parser { toks, pos: 0, eof };
    let mut spec = GrammarSpec {
        name: String::new(),
        start: String::new(),
        classes: Vec::new(),
        productions: Vec::new(),
        leaves: Vec::new(),
        pretty_rules: Vec::new(),
        sugar_rules: Vec::new(),
    };
    let mut seen_language = false;

    while let Some(tok) = p.peek().cloned() {
        let Tok::Ident(keyword) = tok else {
            return p.error("expected a declaration");
        };
        p.pos += 1;
        match keyword.as_str() {
            "language" => {
                if seen_language {
                    return p.error("duplicate language declaration");
                }
                spec.name = p.ident("language name")?;
                match p.next() {
                    Some(Tok::Ident(kw)) if kw == "start" => {}
                    _ => {
                        p.pos = p.pos.saturating_sub(1);
                        return p.error("expected `start`");
                    }
                }
                spec.start = p.ident("start class")?;
                if p.at_punct(";") {
                    p.pos += 1;
                }
                seen_language = true;
            }
            "class" => {
                let name = p.ident("class name")?;
                p.expect_punct("=")?;
                let mut alternatives = vec![p.ident("alternative")?];
                while p.at_punct("|") {
                    p.pos += 1;
                    alternatives.push(p.ident("alternative")?);
                }
                p.expect_punct(";")?;
                spec.classes.push(ClassRule { name, alternatives });
            }
            "node" => {
                let operator = p.ident("operator name")?;
                let mut slots = Vec::new();
                if p.at_punct("(") {
                    p.pos += 1;
                    if !p.at_punct(")") {
                        loop {
                            let name = p.ident("slot name")?;
                            p.expect_punct(":")?;
                            let ty = p.ident("slot type")?;
                            let multiplicity = if p.at_punct("*") {
                                p.pos += 1;
                                Multiplicity::List
                            } else {
                                Multiplicity::One
                            };
                            slots.push(Slot { name, ty, multiplicity });
                            if p.at_punct(",") {
                                p.pos += 1;
                            } else {
                                break;
                            }
                        }
                    }
                    p.expect_punct(")")?;
                }
                p.expect_punct(";")?;
                spec.productions.push(ProductionRule { operator, slots });
            }
            "leaf" => {
                let operator = p.ident("leaf name")?;
                p.expect_punct(":")?;
                let kind = match p.ident("lexical kind")?.as_str() {
                    "integer" => LexicalKind::Integer,
                    "identifier" => LexicalKind::Identifier,
                    "string" => LexicalKind::String,
                    other => {
                        p.pos -= 1;
                        return p.error(format!("unknown lexical kind {other}"));
                    }
                };
                p.expect_punct(";")?;
                spec.leaves.push(LeafRule { operator, kind });
            }
            "pretty" => spec.pretty_rules.push(parse_pretty(&mut p)?),
            "sugar" => {
                let name = p.ident("sugar name")?;
                let kind_name = p.ident("sugar kind")?;
                let Some(kind) = SugarKind::from_name(&kind_name) else {
                    p.pos -= 1;
                    return p.error(format!("unknown sugar kind {kind_name}"));
                };
                p.expect_punct("(")?;
                let target = p.ident("target operator")?;
                p.expect_punct(")")?;
                let mut keywords = Vec::new();
                while let Some(Tok::Str(s)) = p.peek() {
                    let s = s.clone();
                    if s.is_empty() {
                        return p.error("empty keyword");
                    }
                    keywords.push(s);
                    p.pos += 1;
                }
                p.expect_punct(";")?;
                spec.sugar_rules.push(SugarRule { name, kind, target, keywords });
            }
            other => {
                p.pos -= 1;
                return p.error(format!("unknown declaration `{other}`"));
            }
        }
    }

    if !seen_language {
        return Err(SyntaxError { line: 1, col: 1, message: "missing start declaration".into() });
    }
    Ok(spec)
}

fn parse_pretty(p: &mut Parser) -> Result<PrettyRule, SyntaxError> {
    let operator = p.ident("operator name")?;
    p.expect_punct("(")?;
    let mut metavars: Vec<String> = Vec::new();
    if !p.at_punct(")") {
        loop {
            match p.peek() {
                Some(Tok::Metavar(m)) => {
                    if metavars.contains(m) {
                        return p.error(format!("duplicate meta-variable #{m}"));
                    }
                    metavars.push(m.clone());
                    p.pos += 1;
                }
                _ => return p.error("expected meta-variable"),
            }
            if p.at_punct(",") {
                p.pos += 1;
            } else {
                break;
            }
        }
    }
    p.expect_punct(")")?;
    p.expect_punct("->")?;

    let declared = |p: &Parser, m: &str| -> Result<(), SyntaxError> {
        if metavars.iter().any(|v| v == m) {
            Ok(())
        } else {
            p.error(format!("undeclared meta-variable #{m}"))
        }
    };

    let mut format = Vec::new();
    loop {
        match p.peek().cloned() {
            Some(Tok::Punct(";")) => {
                p.pos += 1;
                break;
            }
            Some(Tok::Str(s)) => {
                if s.is_empty() {
                    return p.error("empty keyword");
                }
                format.push(FormatAtom::Keyword(s));
                p.pos += 1;
            }
            Some(Tok::Metavar(m)) => {
                declared(p, &m)?;
                format.push(FormatAtom::Child(m));
                p.pos += 1;
            }
            Some(Tok::Directive(d)) => {
                let atom = match d.as_str() {
                    "\\n" => FormatAtom::Newline,
                    "\\tab+" => FormatAtom::TabPush,
                    "\\tab-" => FormatAtom::TabPop,
                    "\\sp" => FormatAtom::Space,
                    other => return p.error(format!("unknown formatting directive '{other}'")),
                };
                format.push(atom);
                p.pos += 1;
            }
            Some(Tok::Ident(name)) if name == "sep" => {
                p.pos += 1;
                p.expect_punct("(")?;
                let sep = match p.next() {
                    Some(Tok::Str(s)) => s,
                    _ => {
                        p.pos -= 1;
                        return p.error("expected separator string");
                    }
                };
                p.expect_punct(",")?;
                let metavar = match p.peek() {
                    Some(Tok::Metavar(m)) => m.clone(),
                    _ => return p.error("expected meta-variable"),
                };
                declared(p, &metavar)?;
                p.pos += 1;
                p.expect_punct(")")?;
                format.push(FormatAtom::ListSep { sep, metavar });
            }
            None => return p.error("expected `;`"),
            Some(_) => return p.error("expected a format atom"),
        }
    }
    Ok(PrettyRule { operator, metavars, format })
}
