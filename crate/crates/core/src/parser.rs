//! Text syntax for programs and its canonical printer.
//!
//! ```text
//! program   := (decl | clause)* ;
//! decl      := ("certain" | "uncertain" | "complete" | "incomplete" | "closed") predname ("," predname)* "." ;
//! clause    := literal ("<-" hyp)? "." ;
//! hyp       := quant | disj ;
//! quant     := ("some" | "each") var ("," var)* "|" hyp ;
//! disj      := conj ("or" conj)* ;
//! conj      := unit ("and" unit)* ;
//! unit      := "not" unit | "(" hyp ")" | "true" | "false" | literal ;
//! literal   := "not"? predname "(" term ("," term)* ")" | "not"? predname ;
//! term      := var | number | "'" chars "'" ;
//! ```
//!
//! `%` starts a comment running to the end of the line.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::language::{
    Atom, Certainty, Completeness, Constant, Fact, HypExpr, Literal, PredicateDecl, Program, Rule,
    Term,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}{}", expected_suffix(.expected))]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

fn expected_suffix(expected: &[String]) -> String {
    if expected.is_empty() {
        String::new()
    } else {
        format!(" (expected {})", expected.join(" or "))
    }
}

const KEYWORDS: &[&str] = &[
    "certain",
    "uncertain",
    "complete",
    "incomplete",
    "closed",
    "not",
    "and",
    "or",
    "some",
    "each",
    "true",
    "false",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Number(u64),
    Quoted(String),
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Bar,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("'{s}'"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Quoted(s) => format!("string '{s}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Arrow => "'<-'".into(),
            Tok::Bar => "'|'".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

fn err(span: SourceSpan, message: impl Into<String>, expected: &[&str]) -> ParseError {
    ParseError {
        span,
        message: message.into(),
        expected: expected.iter().map(|s| s.to_string()).collect(),
    }
}

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let start = SourceSpan { line, column: col, length: 1 };
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
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
                col += 1;
            }
            continue;
        }
        let (tok, len) = match c {
            '(' => (Tok::LParen, 1),
            ')' => (Tok::RParen, 1),
            ',' => (Tok::Comma, 1),
            '.' => (Tok::Dot, 1),
            '|' => (Tok::Bar, 1),
            '<' if chars.get(i + 1) == Some(&'-') => (Tok::Arrow, 2),
            '\'' => {
                let mut j = i + 1;
                while j < chars.len() && chars[j] != '\'' && chars[j] != '\n' {
                    j += 1;
                }
                if j >= chars.len() || chars[j] != '\'' {
                    return Err(err(
                        SourceSpan { length: j - i, ..start },
                        "unterminated quoted constant",
                        &["'"],
                    ));
                }
                (Tok::Quoted(chars[i + 1..j].iter().collect()), j + 1 - i)
            }
            d if d.is_ascii_digit() => {
                let mut j = i;
                while j < chars.len() && chars[j].is_ascii_digit() {
                    j += 1;
                }
                let digits: String = chars[i..j].iter().collect();
                let n = digits.parse::<u64>().map_err(|_| {
                    err(SourceSpan { length: j - i, ..start }, "numeral out of range", &[])
                })?;
                (Tok::Number(n), j - i)
            }
            a if a.is_ascii_alphabetic() => {
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                (Tok::Ident(chars[i..j].iter().collect()), j - i)
            }
            other => {
                return Err(err(start, format!("unexpected character '{other}'"), &[]));
            }
        };
        out.push(Token { tok, span: SourceSpan { length: len, ..start } });
        i += len;
        col += len;
    }
    out.push(Token { tok: Tok::Eof, span: SourceSpan { line, column: col, length: 0 } });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == kw)
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        let t = self.peek();
        err(t.span, format!("unexpected {}", t.tok.describe()), expected)
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<Token, ParseError> {
        if self.peek().tok == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(&[what]))
        }
    }

    fn predname(&mut self) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let s = s.clone();
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["predicate name"])),
        }
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Number(n) => {
                self.bump();
                Ok(Term::Const(Constant::Num(n)))
            }
            Tok::Quoted(s) => {
                self.bump();
                Ok(Term::Const(Constant::Str(s)))
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                if !s.chars().all(|c| c.is_ascii_alphabetic()) {
                    return Err(err(t.span, format!("invalid variable name '{s}'"), &["letters only"]));
                }
                self.bump();
                Ok(Term::Var(s))
            }
            _ => Err(self.unexpected(&["variable", "number", "quoted constant"])),
        }
    }

    fn atom(&mut self) -> Result<(Atom, SourceSpan), ParseError> {
        let (name, mut span) = self.predname()?;
        let mut args = Vec::new();
        if self.peek().tok == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek().tok {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        let end = self.bump().span;
                        if end.line == span.line {
                            span.length = end.column + 1 - span.column;
                        }
                        break;
                    }
                    _ => return Err(self.unexpected(&["','", "')'"])),
                }
            }
        }
        Ok((Atom::new(name, args), span))
    }

    fn literal(&mut self) -> Result<(Literal, SourceSpan), ParseError> {
        let positive = if self.is_kw("not") {
            self.bump();
            false
        } else {
            true
        };
        let (atom, span) = self.atom()?;
        Ok((Literal { atom, positive }, span))
    }

    fn hyp(&mut self, lits: &mut Vec<(Literal, SourceSpan)>) -> Result<HypExpr, ParseError> {
        if self.is_kw("some") || self.is_kw("each") {
            let universal = self.is_kw("each");
            self.bump();
            let mut vars: Vec<String> = Vec::new();
            loop {
                let t = self.peek().clone();
                let v = match self.term()? {
                    Term::Var(v) => v,
                    _ => return Err(err(t.span, "quantifier binds a variable", &["variable"])),
                };
                if vars.contains(&v) {
                    return Err(err(t.span, format!("variable {v} bound twice in one quantifier"), &[]));
                }
                vars.push(v);
                if self.peek().tok == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::Bar, "'|'")?;
            let body = Box::new(self.hyp(lits)?);
            return Ok(if universal { HypExpr::Forall(vars, body) } else { HypExpr::Exists(vars, body) });
        }
        let mut disjuncts = vec![self.conj(lits)?];
        while self.is_kw("or") {
            self.bump();
            disjuncts.push(self.conj(lits)?);
        }
        Ok(if disjuncts.len() == 1 { disjuncts.pop().unwrap() } else { HypExpr::Or(disjuncts) })
    }

    fn conj(&mut self, lits: &mut Vec<(Literal, SourceSpan)>) -> Result<HypExpr, ParseError> {
        let mut units = vec![self.unit(lits)?];
        while self.is_kw("and") {
            self.bump();
            units.push(self.unit(lits)?);
        }
        Ok(if units.len() == 1 { units.pop().unwrap() } else { HypExpr::And(units) })
    }

    fn unit(&mut self, lits: &mut Vec<(Literal, SourceSpan)>) -> Result<HypExpr, ParseError> {
        match self.peek().tok.clone() {
            Tok::Ident(s) if s == "not" => {
                let names_predicate = matches!(self.peek_at(1),
                    Tok::Ident(n) if !KEYWORDS.contains(&n.as_str()));
                if names_predicate {
                    let lit = self.literal()?;
                    lits.push(lit.clone());
                    Ok(HypExpr::Lit(lit.0))
                } else {
                    self.bump();
                    Ok(HypExpr::Not(Box::new(self.unit(lits)?)))
                }
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(HypExpr::Const(s == "true"))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.hyp(lits)?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let lit = self.literal()?;
                lits.push(lit.clone());
                Ok(HypExpr::Lit(lit.0))
            }
            _ => Err(self.unexpected(&["literal", "'not'", "'('", "'true'", "'false'"])),
        }
    }
}

#[derive(Default)]
struct DeclBuilder {
    certainty: Option<Certainty>,
    completeness: Option<Completeness>,
    closed: bool,
}

/// Parse a program. Declarations are recorded as written; defaults are
/// applied later by [`crate::language::resolve_declarations`].
pub fn parse_program(text: &str) -> Result<Program, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut decls: BTreeMap<String, DeclBuilder> = BTreeMap::new();
    let mut rules = Vec::new();
    let mut facts = Vec::new();
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    let mut check_arity = |lit: &(Literal, SourceSpan)| -> Result<(), ParseError> {
        let (l, span) = lit;
        let n = l.atom.args.len();
        match arities.get(&l.atom.predicate) {
            Some(&m) if m != n => Err(err(
                *span,
                format!("predicate {} used with {n} arguments, earlier with {m}", l.atom.predicate),
                &[],
            )),
            Some(_) => Ok(()),
            None => {
                arities.insert(l.atom.predicate.clone(), n);
                Ok(())
            }
        }
    };

    while p.peek().tok != Tok::Eof {
        let kw = match &p.peek().tok {
            Tok::Ident(s)
                if matches!(s.as_str(), "certain" | "uncertain" | "complete" | "incomplete" | "closed") =>
            {
                Some(s.clone())
            }
            _ => None,
        };
        if let Some(kw) = kw {
            p.bump();
            loop {
                let (name, span) = p.predname()?;
                let d = decls.entry(name.clone()).or_default();
                let conflict = match kw.as_str() {
                    "certain" | "uncertain" => {
                        let c = if kw == "certain" { Certainty::Certain } else { Certainty::Uncertain };
                        let clash = d.certainty.is_some_and(|old| old != c);
                        d.certainty = Some(c);
                        clash
                    }
                    "complete" | "incomplete" => {
                        let c = if kw == "complete" { Completeness::Complete } else { Completeness::Incomplete };
                        let clash = d.completeness.is_some_and(|old| old != c);
                        d.completeness = Some(c);
                        clash
                    }
                    _ => {
                        d.closed = true;
                        false
                    }
                };
                if conflict {
                    return Err(err(span, format!("contradictory declarations for {name}"), &[]));
                }
                match p.peek().tok {
                    Tok::Comma => {
                        p.bump();
                    }
                    Tok::Dot => {
                        p.bump();
                        break;
                    }
                    _ => return Err(p.unexpected(&["','", "'.'"])),
                }
            }
            continue;
        }

        let head = p.literal()?;
        check_arity(&head)?;
        let mut lits = Vec::new();
        let body = if p.peek().tok == Tok::Arrow {
            p.bump();
            Some(p.hyp(&mut lits)?)
        } else {
            None
        };
        p.expect(Tok::Dot, "'.'")?;
        for l in &lits {
            check_arity(l)?;
        }
        let (lit, span) = head;
        match body {
            None => match lit.atom.to_ground() {
                Some(atom) => facts.push(Fact { atom, positive: lit.positive }),
                None => return Err(err(span, "a fact must not contain variables", &["constant"])),
            },
            Some(body) => {
                let rule = Rule::new(lit, body);
                if let Some(v) = rule.unbound_head_vars().first() {
                    return Err(err(
                        span,
                        format!("variable {v} of the conclusion does not occur in the hypotheses"),
                        &[],
                    ));
                }
                rules.push(rule);
            }
        }
    }

    let decls = decls
        .into_iter()
        .map(|(k, d)| {
            (k, PredicateDecl { certainty: d.certainty, completeness: d.completeness, closed: d.closed })
        })
        .collect();
    Ok(Program { decls, rules, facts })
}

/// Render a hypothesis so that it reparses to the same tree.
pub fn render_hyp(e: &HypExpr) -> String {
    match e {
        HypExpr::Exists(vs, b) => format!("some {} | {}", vs.join(", "), render_hyp(b)),
        HypExpr::Forall(vs, b) => format!("each {} | {}", vs.join(", "), render_hyp(b)),
        HypExpr::Or(xs) if xs.is_empty() => "false".into(),
        HypExpr::Or(xs) if xs.len() > 1 => xs
            .iter()
            .map(|x| match x {
                HypExpr::Or(_) | HypExpr::Exists(..) | HypExpr::Forall(..) => format!("({})", render_hyp(x)),
                _ => render_hyp(x),
            })
            .collect::<Vec<_>>()
            .join(" or "),
        HypExpr::Or(xs) => render_hyp(&xs[0]),
        _ => render_conj(e),
    }
}

fn render_conj(e: &HypExpr) -> String {
    match e {
        HypExpr::And(xs) if xs.is_empty() => "true".into(),
        HypExpr::And(xs) if xs.len() > 1 => xs.iter().map(render_unit).collect::<Vec<_>>().join(" and "),
        HypExpr::And(xs) => render_hyp(&xs[0]),
        _ => render_unit(e),
    }
}

fn render_unit(e: &HypExpr) -> String {
    match e {
        HypExpr::Const(b) => b.to_string(),
        HypExpr::Lit(l) => l.to_string(),
        HypExpr::Not(x) => format!("not ({})", render_hyp(x)),
        _ => format!("({})", render_hyp(e)),
    }
}

pub fn render_rule(r: &Rule) -> String {
    format!("{} <- {}.", r.head, render_hyp(&r.body))
}

pub fn render_fact(f: &Fact) -> String {
    if f.positive {
        format!("{}.", f.atom)
    } else {
        format!("not {}.", f.atom)
    }
}

/// Canonical text: declarations first (per predicate, in name order), then
/// facts, then rules, each group sorted; one clause per line.
pub fn render_program(program: &Program) -> String {
    let mut out = String::new();
    for (pred, d) in &program.decls {
        match d.certainty {
            Some(Certainty::Certain) => out.push_str(&format!("certain {pred}.\n")),
            Some(Certainty::Uncertain) => out.push_str(&format!("uncertain {pred}.\n")),
            None => {}
        }
        match d.completeness {
            Some(Completeness::Complete) => out.push_str(&format!("complete {pred}.\n")),
            Some(Completeness::Incomplete) => out.push_str(&format!("incomplete {pred}.\n")),
            _ => {}
        }
        if d.closed {
            out.push_str(&format!("closed {pred}.\n"));
        }
    }
    let mut facts: Vec<String> = program.facts.iter().map(render_fact).collect();
    facts.sort();
    let mut rules: Vec<String> = program.rules.iter().map(render_rule).collect();
    rules.sort();
    for line in facts.into_iter().chain(rules) {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// The program with facts and rules in canonical (rendered) order.
pub fn canonical(program: &Program) -> Program {
    let mut p = program.clone();
    p.facts.sort_by_cached_key(render_fact);
    p.rules.sort_by_cached_key(render_rule);
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::GroundAtom;

    fn var(s: &str) -> Term {
        Term::Var(s.into())
    }

    #[test]
    fn win_rule() {
        let p = parse_program("win(x) <- move(x,y) and not win(y).").unwrap();
        assert_eq!(p.rules.len(), 1);
        let r = &p.rules[0];
        assert_eq!(r.head, Literal::pos(Atom::new("win", vec![var("x")])));
        assert_eq!(
            r.body,
            HypExpr::And(vec![
                HypExpr::Lit(Literal::pos(Atom::new("move", vec![var("x"), var("y")]))),
                HypExpr::Lit(Literal::neg(Atom::new("win", vec![var("y")]))),
            ])
        );
    }

    #[test]
    fn forall_body() {
        let p = parse_program("lose(x) <- each y | not move(x,y) or win(y).").unwrap();
        let HypExpr::Forall(vs, body) = &p.rules[0].body else { panic!("expected forall") };
        assert_eq!(vs, &vec!["y".to_string()]);
        assert!(matches!(**body, HypExpr::Or(ref xs) if xs.len() == 2));
    }

    #[test]
    fn negative_fact() {
        let p = parse_program("not loaded(0).").unwrap();
        assert_eq!(p.facts, vec![Fact::neg(GroundAtom::new("loaded", vec![Constant::Num(0)]))]);
    }

    #[test]
    fn render_round_trip_simple() {
        let p = parse_program("q <- not q.").unwrap();
        assert_eq!(render_program(&p), "q <- not q.\n");
    }

    #[test]
    fn render_declarations_first() {
        let p = parse_program("win(x) <- move(x,y) and not win(y). uncertain win. complete win. move(1,2).").unwrap();
        assert_eq!(
            render_program(&p),
            "uncertain win.\ncomplete win.\nmove(1,2).\nwin(x) <- move(x,y) and not win(y).\n"
        );
    }

    #[test]
    fn quoted_constants_preserved() {
        let text = "shave('barber',x) <- man(x) and not shave(x,x).\nman('barber').\n";
        let out = render_program(&parse_program(text).unwrap());
        assert!(out.contains("man('barber')."));
        assert!(out.contains("shave('barber',x) <- man(x) and not shave(x,x)."));
    }

    #[test]
    fn precedence() {
        let p = parse_program("p <- a or b and c.").unwrap();
        assert!(matches!(&p.rules[0].body, HypExpr::Or(xs) if matches!(xs[1], HypExpr::And(_))));
        let p = parse_program("p <- not a and b.").unwrap();
        assert!(matches!(&p.rules[0].body, HypExpr::And(_)));
        let p = parse_program("p <- not (a and b).").unwrap();
        assert!(matches!(&p.rules[0].body, HypExpr::Not(_)));
        // quantifier body extends to the right
        let p = parse_program("p <- some x | a(x) or b(x).").unwrap();
        assert!(matches!(&p.rules[0].body, HypExpr::Exists(_, b) if matches!(**b, HypExpr::Or(_))));
    }

    #[test]
    fn nested_structure_round_trips() {
        for text in [
            "p <- (a and b) or (c or d).",
            "p <- a and (b and c).",
            "p <- not (not a).",
            "p <- not (a).",
            "p(x) <- q(x) and (some y | r(x,y) and not (each z | s(z))).",
            "p <- true. q <- false or not p.",
            "p(1,'a b') <- q('x', 7).",
        ] {
            let p = parse_program(text).unwrap();
            let again = parse_program(&render_program(&p)).unwrap();
            assert_eq!(again, canonical(&p), "{text}");
        }
    }

    #[test]
    fn zero_arity_and_comments() {
        let p = parse_program("% program 8\nq <- not q and q. % trailing\n").unwrap();
        assert_eq!(p.rules.len(), 1);
    }

    #[test]
    fn errors_have_spans() {
        let e = parse_program("p(x) <- q(x)").unwrap_err();
        assert_eq!(e.span.line, 1);
        assert!(e.expected.contains(&"'.'".to_string()));

        let e = parse_program("p <- q.\np(1).").unwrap_err();
        assert_eq!((e.span.line, e.span.column), (2, 1));

        let e = parse_program("p(x).").unwrap_err();
        assert!(e.message.contains("variables"));

        let e = parse_program("p(x) <- q(y).").unwrap_err();
        assert!(e.message.contains("does not occur"));

        let e = parse_program("certain p. uncertain p. p.").unwrap_err();
        assert!(e.message.contains("contradictory"));

        let e = parse_program("p(x1) <- q(x1).").unwrap_err();
        assert!(e.message.contains("invalid variable"));

        let e = parse_program("p <- some x, x | q(x).").unwrap_err();
        assert!(e.message.contains("bound twice"));

        assert!(parse_program("p('abc).").is_err());
        assert!(parse_program("p <- q & r.").is_err());
    }

    #[test]
    fn repeated_same_declaration_ok() {
        let p = parse_program("uncertain p. uncertain p, q. p <- q.").unwrap();
        assert_eq!(p.decl("p").certainty, Some(Certainty::Uncertain));
    }
}
