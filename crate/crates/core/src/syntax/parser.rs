use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::lexer::{tokenize, SourceSpan, Tok, Token};
use crate::logic::{FiniteStructure, Formula, Quantifier, StructureDraft, Term, Theory, Vocabulary};

/// A parsed tuple: element names with their spans, and the span of the whole tuple.
type SpannedTuple = (Vec<(String, SourceSpan)>, SourceSpan);

/// A parse failure with its location and the tokens that would have been accepted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    pub message: String,
    pub span: SourceSpan,
    pub expected: Vec<String>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.span, self.message)?;
        if !self.expected.is_empty() {
            write!(f, " (expected {})", self.expected.join(", "))?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

type PResult<T> = Result<T, ParseError>;

struct Parser<'v> {
    tokens: Vec<Token>,
    pos: usize,
    vocab: Option<&'v Vocabulary>,
}

impl<'v> Parser<'v> {
    fn new(text: &str, vocab: Option<&'v Vocabulary>) -> PResult<Self> {
        let tokens = tokenize(text).map_err(|span| ParseError {
            message: format!("unexpected character `{}`", &text[span.start..span.end]),
            span,
            expected: Vec::new(),
        })?;
        Ok(Self { tokens, pos: 0, vocab })
    }

    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, span: SourceSpan, message: impl Into<String>) -> ParseError {
        ParseError {
            message: message.into(),
            span,
            expected: Vec::new(),
        }
    }

    fn unexpected(&self, expected: &[&str]) -> ParseError {
        ParseError {
            message: format!("unexpected {}", self.peek().describe()),
            span: self.span(),
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if self.peek() == &tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&[tok.symbol()]))
        }
    }

    fn ident(&mut self) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }

    fn keyword(&mut self, word: &str) -> PResult<SourceSpan> {
        match self.peek() {
            Tok::Ident(s) if s == word => Ok(self.bump().span),
            _ => Err(self.unexpected(&[word])),
        }
    }

    fn expect_eof(&self) -> PResult<()> {
        if self.peek() == &Tok::Eof {
            Ok(())
        } else {
            Err(self.unexpected(&["end of input"]))
        }
    }

    // formula := iff
    fn formula(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&Tok::DoubleArrow) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    // imp := or ("->" imp)?
    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            let rhs = self.conjunction()?;
            lhs = Formula::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        while self.eat(&Tok::Amp) {
            let rhs = self.unary()?;
            lhs = Formula::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::Tilde => {
                self.bump();
                Ok(Formula::not(self.unary()?))
            }
            Tok::Forall | Tok::Exists => self.quantified(),
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Ident(_) => self.atom(),
            _ => Err(self.unexpected(&["~", "forall", "exists", "(", "identifier"])),
        }
    }

    fn quantified(&mut self) -> PResult<Formula> {
        let q = match self.bump().tok {
            Tok::Forall => Quantifier::Forall,
            _ => Quantifier::Exists,
        };
        let mut vars = vec![self.bound_variable()?];
        while self.eat(&Tok::Comma) {
            vars.push(self.bound_variable()?);
        }
        if !self.eat(&Tok::Dot) {
            return Err(self.unexpected(&[",", "."]));
        }
        let body = self.formula()?;
        Ok(Formula::quantify_all(q, vars, body))
    }

    fn bound_variable(&mut self) -> PResult<String> {
        let (name, span) = self.ident()?;
        if let Some(v) = self.vocab {
            if v.has_symbol(&name) {
                return Err(self.error_at(span, format!("cannot bind symbol `{name}` of the vocabulary")));
            }
        }
        Ok(name)
    }

    fn atom(&mut self) -> PResult<Formula> {
        if matches!(self.peek_at(1), Tok::LParen) {
            let (rel, span) = self.ident()?;
            self.bump();
            let mut args = vec![self.term()?];
            while self.eat(&Tok::Comma) {
                args.push(self.term()?);
            }
            if !self.eat(&Tok::RParen) {
                return Err(self.unexpected(&[",", ")"]));
            }
            if let Some(v) = self.vocab {
                match v.relation_index(&rel) {
                    None => return Err(self.error_at(span, format!("unknown relation `{rel}`"))),
                    Some(i) if v.relations()[i].arity != args.len() => {
                        return Err(self.error_at(
                            span,
                            format!(
                                "arity mismatch for {rel}: expected {}, found {}",
                                v.relations()[i].arity,
                                args.len()
                            ),
                        ))
                    }
                    Some(_) => {}
                }
            }
            return Ok(Formula::Atom(rel, args));
        }
        let lhs = self.term()?;
        let negated = match self.peek() {
            Tok::Equals => false,
            Tok::NotEquals => true,
            _ => return Err(self.unexpected(&["(", "=", "!="])),
        };
        self.bump();
        let rhs = self.term()?;
        let eq = Formula::Eq(lhs, rhs);
        Ok(if negated { Formula::not(eq) } else { eq })
    }

    fn term(&mut self) -> PResult<Term> {
        let (name, span) = self.ident()?;
        match self.vocab {
            Some(v) if v.constant_index(&name).is_some() => Ok(Term::Const(name)),
            Some(v) if v.relation_index(&name).is_some() => Err(self.error_at(
                span,
                format!("relation symbol `{name}` used as a term"),
            )),
            _ => Ok(Term::Var(name)),
        }
    }

    fn tuple(&mut self) -> PResult<(Vec<(String, SourceSpan)>, SourceSpan)> {
        if matches!(self.peek(), Tok::Ident(_)) {
            let (e, span) = self.ident()?;
            return Ok((vec![(e, span)], span));
        }
        let open = self.expect(Tok::LParen)?;
        let mut elems = vec![self.ident()?];
        while self.eat(&Tok::Comma) {
            elems.push(self.ident()?);
        }
        let close = self.expect(Tok::RParen)?;
        let span = SourceSpan {
            end: close.end,
            ..open
        };
        Ok((elems, span))
    }

    fn vocabulary(&mut self) -> PResult<Vocabulary> {
        let head = self.keyword("vocab")?;
        let (name, _) = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut relations = Vec::new();
        let mut constants = Vec::new();
        let mut seen = BTreeSet::new();
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    break;
                }
                Tok::Ident(w) if w == "relation" => {
                    self.bump();
                    let (r, span) = self.ident()?;
                    self.expect(Tok::Slash)?;
                    let arity = match self.bump() {
                        Token {
                            tok: Tok::Number(n),
                            span,
                        } => {
                            if n == 0 {
                                return Err(self.error_at(span, "arity must be at least 1"));
                            }
                            n
                        }
                        t => {
                            return Err(ParseError {
                                message: format!("unexpected {}", t.tok.describe()),
                                span: t.span,
                                expected: vec!["number".into()],
                            })
                        }
                    };
                    if !seen.insert(r.clone()) {
                        return Err(self.error_at(span, format!("duplicate symbol `{r}`")));
                    }
                    relations.push((r, arity));
                    self.expect(Tok::Semi)?;
                }
                Tok::Ident(w) if w == "constant" => {
                    self.bump();
                    let (c, span) = self.ident()?;
                    if !seen.insert(c.clone()) {
                        return Err(self.error_at(span, format!("duplicate symbol `{c}`")));
                    }
                    constants.push(c);
                    self.expect(Tok::Semi)?;
                }
                _ => return Err(self.unexpected(&["relation", "constant", "}"])),
            }
        }
        Vocabulary::new(name, relations, constants).map_err(|e| self.error_at(head, e.to_string()))
    }

    fn structure(&mut self, vocab: &Arc<Vocabulary>) -> PResult<(FiniteStructure, SourceSpan)> {
        self.keyword("structure")?;
        let (name, name_span) = self.ident()?;
        self.expect(Tok::Colon)?;
        let (vname, vspan) = self.ident()?;
        if vname != vocab.name() {
            return Err(self.error_at(vspan, format!("unknown vocabulary `{vname}`")));
        }
        self.expect(Tok::LBrace)?;

        let mut universe: Option<Vec<(String, SourceSpan)>> = None;
        let mut tables: Vec<(String, SourceSpan, Vec<SpannedTuple>)> = Vec::new();
        let mut constants: Vec<(String, SourceSpan, String, SourceSpan)> = Vec::new();
        let close;
        loop {
            if let Tok::RBrace = self.peek() {
                close = self.bump().span;
                break;
            }
            let (sym, span) = match self.peek() {
                Tok::Ident(_) => self.ident()?,
                _ => return Err(self.unexpected(&["universe", "identifier", "}"])),
            };
            self.expect(Tok::Equals)?;
            if sym == "universe" && !vocab.has_symbol("universe") {
                if universe.is_some() {
                    return Err(self.error_at(span, "universe declared twice"));
                }
                self.expect(Tok::LBrace)?;
                let mut elems = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    elems.push(self.ident()?);
                    while self.eat(&Tok::Comma) {
                        elems.push(self.ident()?);
                    }
                    if !self.eat(&Tok::RBrace) {
                        return Err(self.unexpected(&[",", "}"]));
                    }
                }
                universe = Some(elems);
            } else if vocab.relation_index(&sym).is_some() {
                if tables.iter().any(|(r, ..)| r == &sym) {
                    return Err(self.error_at(span, format!("relation `{sym}` interpreted twice")));
                }
                self.expect(Tok::LBrace)?;
                let mut tuples = Vec::new();
                if !self.eat(&Tok::RBrace) {
                    tuples.push(self.tuple()?);
                    while self.eat(&Tok::Comma) {
                        tuples.push(self.tuple()?);
                    }
                    if !self.eat(&Tok::RBrace) {
                        return Err(self.unexpected(&[",", "}"]));
                    }
                }
                tables.push((sym, span, tuples));
            } else if vocab.constant_index(&sym).is_some() {
                if constants.iter().any(|(c, ..)| c == &sym) {
                    return Err(self.error_at(span, format!("constant `{sym}` interpreted twice")));
                }
                let (e, espan) = self.ident()?;
                constants.push((sym, span, e, espan));
            } else {
                return Err(self.error_at(span, format!("undeclared symbol `{sym}`")));
            }
            self.expect(Tok::Semi)?;
        }

        let universe = universe.ok_or_else(|| self.error_at(name_span, "missing universe"))?;
        if universe.is_empty() {
            return Err(self.error_at(name_span, "empty universe"));
        }
        let mut elements = BTreeSet::new();
        for (e, span) in &universe {
            if !elements.insert(e.as_str()) {
                return Err(self.error_at(*span, format!("duplicate element `{e}`")));
            }
        }
        let check_element = |e: &str, span: SourceSpan| {
            if elements.contains(e) {
                Ok(())
            } else {
                Err(ParseError {
                    message: format!("`{e}` is not in the universe"),
                    span,
                    expected: Vec::new(),
                })
            }
        };
        for (rel, _, tuples) in &tables {
            let arity = vocab.relations()[vocab.relation_index(rel).unwrap()].arity;
            for (tuple, span) in tuples {
                if tuple.len() != arity {
                    return Err(self.error_at(
                        *span,
                        format!("arity mismatch for {rel}: expected {arity}, found {}", tuple.len()),
                    ));
                }
                for (e, espan) in tuple {
                    check_element(e, *espan)?;
                }
            }
        }
        for (_, _, e, espan) in &constants {
            check_element(e, *espan)?;
        }
        for c in vocab.constants() {
            if !constants.iter().any(|(d, ..)| d == c) {
                return Err(self.error_at(close, format!("uninterpreted constant `{c}`")));
            }
        }

        let draft = StructureDraft {
            name: name.clone(),
            vocab: vocab.clone(),
            universe: universe.into_iter().map(|(e, _)| e).collect(),
            tables: tables
                .into_iter()
                .map(|(r, _, ts)| {
                    (
                        r,
                        ts.into_iter()
                            .map(|(t, _)| t.into_iter().map(|(e, _)| e).collect())
                            .collect(),
                    )
                })
                .collect(),
            constants: constants.into_iter().map(|(c, _, e, _)| (c, e)).collect(),
        };
        let s = draft
            .build()
            .map_err(|e| self.error_at(name_span, e.to_string()))?;
        Ok((s, name_span))
    }
}

/// Parses a formula, checking symbols and arities against `vocab`.
pub fn parse_formula(text: &str, vocab: &Vocabulary) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, Some(vocab))?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a formula without a vocabulary: every term is a variable and atoms are unchecked.
pub fn parse_formula_unchecked(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(text, None)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses sentences separated by `;` (a trailing `;` is allowed).
pub fn parse_theory(text: &str, vocab: &Vocabulary) -> Result<Theory, ParseError> {
    let mut p = Parser::new(text, Some(vocab))?;
    let mut sentences = Vec::new();
    while p.peek() != &Tok::Eof {
        let start = p.span();
        let f = p.formula()?;
        let free = f.free_variables();
        if !free.is_empty() {
            return Err(p.error_at(
                start,
                format!(
                    "not a sentence: free variables {}",
                    free.into_iter().collect::<Vec<_>>().join(", ")
                ),
            ));
        }
        sentences.push(f);
        if !p.eat(&Tok::Semi) {
            p.expect_eof().map_err(|mut e| {
                e.expected = vec![";".into(), "end of input".into()];
                e
            })?;
        }
    }
    Ok(Theory::new(sentences).expect("sentences checked above"))
}

/// Parses a vocabulary declaration such as `vocab graph { relation E/2; constant c0; }`.
pub fn parse_vocabulary(text: &str) -> Result<Vocabulary, ParseError> {
    let mut p = Parser::new(text, None)?;
    let v = p.vocabulary()?;
    p.expect_eof()?;
    Ok(v)
}

/// Parses a structure file: one vocabulary declaration followed by any number of
/// structures over it.
pub fn parse_structures(text: &str) -> Result<(Vocabulary, Vec<FiniteStructure>), ParseError> {
    let mut p = Parser::new(text, None)?;
    let vocab = Arc::new(p.vocabulary()?);
    let mut structures = Vec::new();
    let mut names: BTreeMap<String, SourceSpan> = BTreeMap::new();
    while p.peek() != &Tok::Eof {
        if matches!(p.peek(), Tok::Ident(w) if w == "vocab") {
            return Err(p.error_at(p.span(), "only one vocabulary per file is supported"));
        }
        let (s, span) = p.structure(&vocab)?;
        if names.insert(s.name().to_string(), span).is_some() {
            return Err(p.error_at(span, format!("duplicate structure name `{}`", s.name())));
        }
        structures.push(s);
    }
    Ok(((*vocab).clone(), structures))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn graph() -> Vocabulary {
        Vocabulary::graph()
    }

    #[test]
    fn quantifier_prefix() {
        let f = parse_formula("exists x. forall y. E(x,y)", &graph()).unwrap();
        assert_eq!(
            f,
            Formula::exists("x", Formula::forall("y", Formula::atom_vars("E", &["x", "y"])))
        );
    }

    #[test]
    fn fewer_than_two() {
        let f = parse_formula("forall x1. forall x2. x1 = x2", &Vocabulary::empty()).unwrap();
        let g = parse_formula("forall x1, x2. x1 = x2", &Vocabulary::empty()).unwrap();
        assert_eq!(f, g);
        assert_eq!(
            f,
            Formula::forall("x1", Formula::forall("x2", Formula::eq(Term::var("x1"), Term::var("x2"))))
        );
    }

    #[test]
    fn arity_error_has_span() {
        let err = parse_formula("E(x)", &graph()).unwrap_err();
        assert!(err.message.contains("arity mismatch"));
        assert_eq!(err.span.start, 0);
    }

    #[test]
    fn precedence_and_associativity() {
        let v = Vocabulary::new("p", [("P".into(), 1), ("Q".into(), 1), ("R".into(), 1)], []).unwrap();
        let p = |s| parse_formula(s, &v).unwrap();
        let (a, b, c) = (
            Formula::atom_vars("P", &["x"]),
            Formula::atom_vars("Q", &["x"]),
            Formula::atom_vars("R", &["x"]),
        );
        assert_eq!(
            p("P(x) -> Q(x) -> R(x)"),
            Formula::implies(a.clone(), Formula::implies(b.clone(), c.clone()))
        );
        assert_eq!(
            p("P(x) | Q(x) & R(x)"),
            Formula::or(a.clone(), Formula::and(b.clone(), c.clone()))
        );
        assert_eq!(
            p("~P(x) & Q(x)"),
            Formula::and(Formula::not(a.clone()), b.clone())
        );
        assert_eq!(
            p("P(x) & forall y. Q(y) | R(x)"),
            Formula::and(
                a.clone(),
                Formula::forall("y", Formula::or(Formula::atom_vars("Q", &["y"]), c.clone()))
            )
        );
        assert_eq!(
            p("P(x) <-> Q(x) <-> R(x)"),
            Formula::iff(Formula::iff(a, b), c)
        );
    }

    #[test]
    fn errors_carry_expected_tokens() {
        let err = parse_formula("forall x E(x,x)", &graph()).unwrap_err();
        assert_eq!(err.expected, vec![",", "."]);
        let err = parse_formula("E(x,y) &", &graph()).unwrap_err();
        assert_eq!(err.span.start, 8);
        assert!(parse_formula("F(x)", &graph()).unwrap_err().message.contains("unknown relation"));
        assert!(parse_formula("(E(x,y)", &graph()).is_err());
        assert!(parse_formula("x", &graph()).is_err());
    }

    #[test]
    fn constants_are_terms() {
        let v = Vocabulary::new("g", [("E".into(), 2)], ["c0".into()]).unwrap();
        let f = parse_formula("E(c0, x)", &v).unwrap();
        assert_eq!(f, Formula::atom("E", [Term::constant("c0"), Term::var("x")]));
        assert!(parse_formula("forall c0. E(c0,c0)", &v).is_err());
    }

    const C3: &str = "
        vocab graph { relation E/2; constant c0; }
        structure C3 : graph {
          universe = { a, b, c };
          E = { (a,b), (b,c), (c,a) };
          c0 = a;
        }";

    #[test]
    fn structure_file() {
        let (vocab, ss) = parse_structures(C3).unwrap();
        assert_eq!(vocab.relations().len(), 1);
        assert_eq!(ss.len(), 1);
        assert_eq!(ss[0].size(), 3);
        assert_eq!(ss[0].tuples(0).len(), 3);
        assert_eq!(ss[0].constant_by_name("c0"), Some("a"));
    }

    #[test]
    fn structure_file_errors() {
        let bad = "vocab graph { relation E/2; }\nstructure S : graph { universe = { a, b, c }; E = { (a,b,c) }; }";
        let err = parse_structures(bad).unwrap_err();
        assert!(err.message.contains("arity mismatch"));
        assert_eq!(&bad[err.span.start..err.span.end], "(a,b,c)");

        let missing = "vocab graph { relation E/2; constant c0; }\nstructure S : graph { universe = { a }; }";
        assert!(parse_structures(missing).unwrap_err().message.contains("uninterpreted constant"));

        let dup = "vocab g { relation E/2; }\nstructure S : g { universe = { a }; }\nstructure S : g { universe = { a }; }";
        assert!(parse_structures(dup).unwrap_err().message.contains("duplicate structure name"));

        let undeclared = "vocab g { relation E/2; }\nstructure S : g { universe = { a }; F = { }; }";
        assert!(parse_structures(undeclared).unwrap_err().message.contains("undeclared"));
    }

    #[test]
    fn theory_text() {
        let t = parse_theory("exists x. E(x,x); exists y. ~E(y,y);", &graph()).unwrap();
        assert_eq!(t.len(), 2);
        assert!(parse_theory("E(x,x)", &graph()).is_err());
    }
}
