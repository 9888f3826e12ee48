use std::collections::HashSet;

use thiserror::Error;

use super::{Circuit, Instruction, Pauli, Target};
use crate::register::QubitRange;
use crate::statevec::max_qubits;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("qubits declaration required first")]
    MissingQubits,
    #[error("duplicate qubits declaration")]
    DuplicateQubits,
    #[error("unknown mnemonic `{0}`")]
    UnknownMnemonic(String),
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    QubitOutOfRange { qubit: usize, n_qubits: usize },
    #[error("{0} qubits is outside the supported range 1..={1}")]
    QubitCount(usize, usize),
    #[error("control equals target")]
    ControlEqualsTarget,
    #[error("set after a gate on qubit {0}")]
    SetAfterGate(usize),
    #[error("qubit {0} is already set")]
    DuplicateSet(usize),
    #[error("set only accepts the value 1")]
    SetValue,
    #[error("empty range {0}..{1}")]
    EmptyRange(usize, usize),
    #[error("oracle input and output ranges overlap")]
    OverlappingRanges,
    #[error("duplicate measurement label `{0}`")]
    DuplicateLabel(String),
    #[error("expected {expected}, found `{found}`")]
    Unexpected { expected: &'static str, found: String },
    #[error("expected {0}, found end of line")]
    MissingOperand(&'static str),
    #[error("unexpected character `{0}`")]
    BadCharacter(char),
    #[error("invalid UTF-8")]
    InvalidUtf8,
}

/// A diagnostic located at a 1-based line and column.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{kind}, line {line}, column {column}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub line: usize,
    pub column: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok<'a> {
    Word(&'a str),
    DotDot,
    Arrow,
}

#[derive(Clone, Debug)]
struct Token<'a> {
    tok: Tok<'a>,
    column: usize,
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Column (1-based, in characters) of byte offset `at` within `line`.
fn column_of(line: &str, at: usize) -> usize {
    line[..at].chars().count() + 1
}

fn lex(line: &str, line_no: usize) -> Result<Vec<Token<'_>>, ParseError> {
    let mut out = Vec::new();
    let bytes = line.as_bytes();
    let mut i = 0;
    while i < line.len() {
        let c = line[i..].chars().next().unwrap_or(' ');
        let column = column_of(line, i);
        if c.is_whitespace() {
            i += c.len_utf8();
        } else if is_word_char(c) {
            let end = line[i..].find(|c: char| !is_word_char(c)).map_or(line.len(), |k| i + k);
            out.push(Token { tok: Tok::Word(&line[i..end]), column });
            i = end;
        } else if bytes[i..].starts_with(b"..") {
            out.push(Token { tok: Tok::DotDot, column });
            i += 2;
        } else if bytes[i..].starts_with(b"->") {
            out.push(Token { tok: Tok::Arrow, column });
            i += 2;
        } else {
            return Err(ParseError { kind: ParseErrorKind::BadCharacter(c), line: line_no, column });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    line: usize,
    /// Column just past the last token, for "end of line" errors.
    eol: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, kind: ParseErrorKind, column: usize) -> ParseError {
        ParseError { kind, line: self.line, column }
    }

    fn next(&mut self, expected: &'static str) -> Result<Token<'a>, ParseError> {
        let t = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| self.err(ParseErrorKind::MissingOperand(expected), self.eol))?;
        self.pos += 1;
        Ok(t)
    }

    fn word(&mut self, expected: &'static str) -> Result<(&'a str, usize), ParseError> {
        let t = self.next(expected)?;
        match t.tok {
            Tok::Word(w) => Ok((w, t.column)),
            other => Err(self.err(ParseErrorKind::Unexpected { expected, found: show(&other) }, t.column)),
        }
    }

    fn keyword(&mut self, kw: &'static str) -> Result<(), ParseError> {
        let (w, column) = self.word(kw)?;
        if !w.eq_ignore_ascii_case(kw) {
            return Err(self.err(ParseErrorKind::Unexpected { expected: kw, found: w.to_string() }, column));
        }
        Ok(())
    }

    fn punct(&mut self, want: Tok<'static>, expected: &'static str) -> Result<(), ParseError> {
        let t = self.next(expected)?;
        if t.tok != want {
            return Err(self.err(ParseErrorKind::Unexpected { expected, found: show(&t.tok) }, t.column));
        }
        Ok(())
    }

    fn number(&mut self, expected: &'static str) -> Result<(usize, usize), ParseError> {
        let (w, column) = self.word(expected)?;
        match w.parse::<usize>() {
            Ok(v) => Ok((v, column)),
            Err(_) => Err(self.err(ParseErrorKind::Unexpected { expected, found: w.to_string() }, column)),
        }
    }

    fn qubit(&mut self, n: usize) -> Result<(usize, usize), ParseError> {
        let (q, column) = self.number("a qubit index")?;
        if q >= n {
            return Err(self.err(ParseErrorKind::QubitOutOfRange { qubit: q, n_qubits: n }, column));
        }
        Ok((q, column))
    }

    fn range(&mut self, n: usize) -> Result<QubitRange, ParseError> {
        let (lo, lo_col) = self.qubit(n)?;
        self.punct(Tok::DotDot, "`..`")?;
        let (hi, _) = self.qubit(n)?;
        if hi < lo {
            return Err(self.err(ParseErrorKind::EmptyRange(lo, hi), lo_col));
        }
        Ok(QubitRange::new(lo, hi - lo + 1))
    }

    fn name(&mut self, expected: &'static str) -> Result<String, ParseError> {
        let (w, column) = self.word(expected)?;
        if w.starts_with(|c: char| c.is_ascii_digit()) {
            return Err(self.err(ParseErrorKind::Unexpected { expected, found: w.to_string() }, column));
        }
        Ok(w.to_string())
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.tokens.get(self.pos) {
            Some(t) => {
                Err(self.err(ParseErrorKind::Unexpected { expected: "end of line", found: show(&t.tok) }, t.column))
            }
            None => Ok(()),
        }
    }
}

fn show(t: &Tok<'_>) -> String {
    match t {
        Tok::Word(w) => w.to_string(),
        Tok::DotDot => "..".into(),
        Tok::Arrow => "->".into(),
    }
}

/// `load <name> <path>`: the path is taken verbatim as one
/// whitespace-free token.
fn parse_load(text: &str, line: usize, offset: usize) -> Result<Instruction, ParseError> {
    let mut parts = text.split_whitespace();
    let at = |s: &str| column_of(text, s.as_ptr() as usize - text.as_ptr() as usize) + offset;
    let kw = parts.next().unwrap_or_default();
    let name = parts.next().ok_or(ParseError {
        kind: ParseErrorKind::MissingOperand("an oracle name"),
        line,
        column: at(kw) + kw.chars().count(),
    })?;
    if !name.chars().all(is_word_char) || name.starts_with(|c: char| c.is_ascii_digit()) {
        let kind = ParseErrorKind::Unexpected { expected: "an oracle name", found: name.to_string() };
        return Err(ParseError { kind, line, column: at(name) });
    }
    let path = parts.next().ok_or(ParseError {
        kind: ParseErrorKind::MissingOperand("a table path"),
        line,
        column: at(name) + name.chars().count(),
    })?;
    if let Some(extra) = parts.next() {
        let kind = ParseErrorKind::Unexpected { expected: "end of line", found: extra.to_string() };
        return Err(ParseError { kind, line, column: at(extra) });
    }
    Ok(Instruction::Load { name: name.to_string(), path: path.to_string() })
}

fn parse_instruction(cur: &mut Cursor<'_>, mnemonic: &str, column: usize, n: usize) -> Result<Instruction, ParseError> {
    let instr = match mnemonic.to_ascii_lowercase().as_str() {
        "set" => {
            let (q, _) = cur.qubit(n)?;
            let (v, vcol) = cur.number("the value 1")?;
            if v != 1 {
                return Err(cur.err(ParseErrorKind::SetValue, vcol));
            }
            Instruction::Set(q)
        }
        "h" => match cur.tokens.get(cur.pos).map(|t| &t.tok) {
            Some(Tok::Word(w)) if w.eq_ignore_ascii_case("all") => {
                cur.pos += 1;
                Instruction::H(Target::All)
            }
            _ => Instruction::H(Target::Range(QubitRange::new(cur.qubit(n)?.0, 1))),
        },
        "x" => Instruction::Pauli(Pauli::X, cur.qubit(n)?.0),
        "y" => Instruction::Pauli(Pauli::Y, cur.qubit(n)?.0),
        "z" => Instruction::Pauli(Pauli::Z, cur.qubit(n)?.0),
        "cnot" => {
            let (control, _) = cur.qubit(n)?;
            let (target, tcol) = cur.qubit(n)?;
            if control == target {
                return Err(cur.err(ParseErrorKind::ControlEqualsTarget, tcol));
            }
            Instruction::Cnot { control, target }
        }
        "oracle" => {
            let name = cur.name("an oracle name")?;
            let input = cur.range(n)?;
            cur.punct(Tok::Arrow, "`->`")?;
            let out_col = cur.tokens.get(cur.pos).map_or(cur.eol, |t| t.column);
            let output = cur.range(n)?;
            if input.overlaps(&output) {
                return Err(cur.err(ParseErrorKind::OverlappingRanges, out_col));
            }
            Instruction::Oracle { name, input, output }
        }
        "qft" => Instruction::Qft { range: cur.range(n)?, inverse: false },
        "iqft" => Instruction::Qft { range: cur.range(n)?, inverse: true },
        "diffuse" => Instruction::Diffuse(cur.range(n)?),
        "measure" => {
            let target = match cur.tokens.get(cur.pos).map(|t| &t.tok) {
                Some(Tok::Word(w)) if w.eq_ignore_ascii_case("all") => {
                    cur.pos += 1;
                    Target::All
                }
                _ => Target::Range(cur.range(n)?),
            };
            cur.keyword("as")?;
            Instruction::Measure { target, label: cur.name("a label")? }
        }
        "qubits" => return Err(cur.err(ParseErrorKind::DuplicateQubits, column)),
        _ => return Err(cur.err(ParseErrorKind::UnknownMnemonic(mnemonic.to_string()), column)),
    };
    cur.finish()?;
    Ok(instr)
}

/// Parse circuit source text.
pub fn parse(source: &str) -> Result<Circuit, ParseError> {
    let mut n_qubits = None;
    let mut instructions = Vec::new();
    let mut lines = Vec::new();
    let mut touched = HashSet::new();
    let mut set = HashSet::new();
    let mut labels = HashSet::new();
    for (idx, raw) in source.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or_default();
        let start = text.len() - text.trim_start().len();
        let is_load = text.split_whitespace().next().is_some_and(|w| w.eq_ignore_ascii_case("load"));
        let tokens = lex(if is_load { &text[..start + 4] } else { text }, line)?;
        let Some(first) = tokens.first().cloned() else { continue };
        let eol = column_of(text, text.trim_end().len());
        let mut cur = Cursor { tokens, pos: 1, line, eol };
        let Tok::Word(mnemonic) = first.tok else {
            return Err(
                cur.err(ParseErrorKind::Unexpected { expected: "a mnemonic", found: show(&first.tok) }, first.column)
            );
        };
        let Some(n) = n_qubits else {
            if !mnemonic.eq_ignore_ascii_case("qubits") {
                return Err(cur.err(ParseErrorKind::MissingQubits, first.column));
            }
            let (n, column) = cur.number("a qubit count")?;
            if n == 0 || n > max_qubits() {
                return Err(cur.err(ParseErrorKind::QubitCount(n, max_qubits()), column));
            }
            cur.finish()?;
            n_qubits = Some(n);
            continue;
        };
        let instr = if is_load {
            parse_load(&text[start..], line, column_of(text, start) - 1)?
        } else {
            parse_instruction(&mut cur, mnemonic, first.column, n)?
        };
        match &instr {
            Instruction::Set(q) => {
                if set.contains(q) {
                    return Err(cur.err(ParseErrorKind::DuplicateSet(*q), first.column));
                }
                if touched.contains(q) {
                    return Err(cur.err(ParseErrorKind::SetAfterGate(*q), first.column));
                }
                set.insert(*q);
            }
            Instruction::Measure { label, .. } if !labels.insert(label.clone()) => {
                return Err(cur.err(ParseErrorKind::DuplicateLabel(label.clone()), first.column));
            }
            _ => {}
        }
        if !matches!(instr, Instruction::Set(_)) {
            touched.extend((0..n).filter(|&q| instr.touches(q)));
        }
        instructions.push(instr);
        lines.push(line);
    }
    let n_qubits = n_qubits.ok_or(ParseError { kind: ParseErrorKind::MissingQubits, line: 1, column: 1 })?;
    Ok(Circuit { n_qubits, instructions, lines })
}

/// Parse raw bytes, reporting invalid UTF-8 at its position.
pub fn parse_bytes(source: &[u8]) -> Result<Circuit, ParseError> {
    match std::str::from_utf8(source) {
        Ok(text) => parse(text),
        Err(e) => {
            let valid = &source[..e.valid_up_to()];
            let line = valid.iter().filter(|&&b| b == b'\n').count() + 1;
            let line_start = valid.iter().rposition(|&b| b == b'\n').map_or(0, |p| p + 1);
            // The prefix is valid UTF-8 by construction.
            let column = std::str::from_utf8(&valid[line_start..]).map_or(1, |s| s.chars().count() + 1);
            Err(ParseError { kind: ParseErrorKind::InvalidUtf8, line, column })
        }
    }
}
