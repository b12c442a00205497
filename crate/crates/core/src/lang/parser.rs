//! Recursive-descent parser for goal files with sort checking.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! file     := decl*
//! decl     := "goal" IDENT ( "(" binder ("," binder)* ")" )? ":=" formula
//! formula  := or ( "->" formula )?
//! or       := and ( "\/" and )*
//! and      := unary ( "/\" unary )*
//! unary    := "~" unary | ("forall" | "exists") IDENT ":" sort "," formula | atom
//! atom     := "true" | "false" | "(" formula ")" | term relop term
//! term     := additive ( ("::" | "++") term )?
//! additive := mul ( ("+" | "-") mul )*
//! mul      := primary ( ("*" | "%") primary )*
//! primary  := NAT | "-" NAT | IDENT | "[" terms "]" | "length" "(" term ")"
//!           | "count" "(" term "," term ")" | "if" formula "then" term "else" term
//!           | "(" term ")"
//! ```
//!
//! A parenthesised group is read as a term exactly when the token after its
//! closing parenthesis continues a term or a relation.

use std::collections::HashSet;

use super::ast::{Binder, Formula, GoalDecl, Sort, Term};
use super::error::{ParseError, SourceSpan};
use super::lexer::{tokenize, Tok, Token};

const MAX_DEPTH: usize = 200;

/// Parse every declaration in a goal file, in source order.
pub fn parse_goal_file(text: &str) -> Result<Vec<GoalDecl>, ParseError> {
    let mut parser = Parser::new(text)?;
    let mut goals = Vec::new();
    let mut names = HashSet::new();
    while parser.peek() != &Tok::Eof {
        let span = parser.span();
        let goal = parser.decl()?;
        if !names.insert(goal.name.clone()) {
            return Err(ParseError::new(
                format!("duplicate goal name `{}`", goal.name),
                span,
            ));
        }
        goals.push(goal);
    }
    Ok(goals)
}

/// Parse text that must contain exactly one declaration.
pub fn parse_goal(text: &str) -> Result<GoalDecl, ParseError> {
    let mut goals = parse_goal_file(text)?;
    match goals.len() {
        1 => Ok(goals.remove(0)),
        n => Err(ParseError::new(
            format!("expected exactly one goal declaration, found {n}"),
            SourceSpan::new(1, 1, 0),
        )),
    }
}

/// Parse a standalone formula whose free variables must come from `binders`.
pub fn parse_formula(text: &str, binders: &[Binder]) -> Result<Formula, ParseError> {
    let mut parser = Parser::new(text)?;
    parser.scope = binders.iter().map(|b| (b.name.clone(), b.sort)).collect();
    let f = parser.formula()?;
    parser.expect(&Tok::Eof, "end of input")?;
    Ok(f)
}

struct Parser {
    toks: Vec<Token>,
    /// For every `(` token, the index of its matching `)`.
    matching: Vec<Option<usize>>,
    pos: usize,
    scope: Vec<(String, Sort)>,
    depth: usize,
}

type PResult<T> = Result<T, ParseError>;

fn is_term_continuation(tok: &Tok) -> bool {
    matches!(
        tok,
        Tok::Eq
            | Tok::Ne
            | Tok::Lt
            | Tok::Le
            | Tok::Gt
            | Tok::Ge
            | Tok::In
            | Tok::Plus
            | Tok::Minus
            | Tok::Star
            | Tok::Percent
            | Tok::Append
            | Tok::Cons
    )
}

impl Parser {
    fn new(text: &str) -> PResult<Self> {
        let toks = tokenize(text)?;
        let mut matching = vec![None; toks.len()];
        let mut stack = Vec::new();
        for (i, t) in toks.iter().enumerate() {
            match t.tok {
                Tok::LParen => stack.push(i),
                Tok::RParen => {
                    if let Some(open) = stack.pop() {
                        matching[open] = Some(i);
                    }
                }
                _ => {}
            }
        }
        Ok(Parser {
            toks,
            matching,
            pos: 0,
            scope: Vec::new(),
            depth: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> PResult<Token> {
        if self.peek() == tok {
            Ok(self.bump())
        } else {
            Err(self.unexpected(what))
        }
    }

    fn unexpected(&self, what: &str) -> ParseError {
        ParseError::new(
            format!("expected {what}, found {}", self.peek().describe()),
            self.span(),
        )
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(ParseError::new("expression nested too deeply", self.span()))
        } else {
            Ok(())
        }
    }

    fn leave(&mut self, n: usize) {
        self.depth -= n;
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(name) => {
                let span = self.bump().span;
                Ok((name, span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn sort(&mut self) -> PResult<Sort> {
        let (name, span) = self.ident("a sort")?;
        match name.as_str() {
            "Int" => Ok(Sort::Int),
            "IntList" => Ok(Sort::IntList),
            other => Err(ParseError::new(format!("unknown sort `{other}`"), span)),
        }
    }

    fn decl(&mut self) -> PResult<GoalDecl> {
        self.expect(&Tok::Goal, "`goal`")?;
        let (name, _) = self.ident("a goal name")?;
        let mut binders: Vec<Binder> = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                let (bname, bspan) = self.ident("a binder name")?;
                self.expect(&Tok::Colon, "`:`")?;
                let sort = self.sort()?;
                if binders.iter().any(|b| b.name == bname) {
                    return Err(ParseError::new(
                        format!("duplicate binder `{bname}`"),
                        bspan,
                    ));
                }
                binders.push(Binder::new(bname, sort));
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(&Tok::Comma, "`,` or `)`")?;
            }
        }
        self.expect(&Tok::Define, "`:=`")?;
        self.scope = binders.iter().map(|b| (b.name.clone(), b.sort)).collect();
        let body = self.formula()?;
        self.scope.clear();
        if !matches!(self.peek(), Tok::Goal | Tok::Eof) {
            return Err(self.unexpected("a connective, `goal` or end of input"));
        }
        Ok(GoalDecl {
            name,
            binders,
            body,
        })
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.enter()?;
        let lhs = self.or()?;
        let out = if self.eat(&Tok::Arrow) {
            Formula::implies(lhs, self.formula()?)
        } else {
            lhs
        };
        self.leave(1);
        Ok(out)
    }

    fn or(&mut self) -> PResult<Formula> {
        let mut lhs = self.and()?;
        let mut links = 0;
        while self.eat(&Tok::Or) {
            self.enter()?;
            links += 1;
            lhs = Formula::or(lhs, self.and()?);
        }
        self.leave(links);
        Ok(lhs)
    }

    fn and(&mut self) -> PResult<Formula> {
        let mut lhs = self.unary()?;
        let mut links = 0;
        while self.eat(&Tok::And) {
            self.enter()?;
            links += 1;
            lhs = Formula::and(lhs, self.unary()?);
        }
        self.leave(links);
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Formula> {
        self.enter()?;
        let out = match self.peek() {
            Tok::Not => {
                self.bump();
                Formula::not(self.unary()?)
            }
            Tok::Forall | Tok::Exists => {
                let universal = self.bump().tok == Tok::Forall;
                let (name, _) = self.ident("a bound variable")?;
                self.expect(&Tok::Colon, "`:`")?;
                let sort = self.sort()?;
                self.expect(&Tok::Comma, "`,`")?;
                self.scope.push((name.clone(), sort));
                let body = self.formula();
                self.scope.pop();
                let binder = Binder::new(name, sort);
                if universal {
                    Formula::Forall(binder, Box::new(body?))
                } else {
                    Formula::Exists(binder, Box::new(body?))
                }
            }
            _ => self.atom()?,
        };
        self.leave(1);
        Ok(out)
    }

    fn atom(&mut self) -> PResult<Formula> {
        match self.peek() {
            Tok::True => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::False => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::LParen => {
                let close = self.matching[self.pos];
                let term_group = close
                    .map(|c| is_term_continuation(&self.toks[c + 1].tok))
                    .unwrap_or(false);
                if term_group {
                    self.relation()
                } else {
                    self.bump();
                    let f = self.formula()?;
                    self.expect(&Tok::RParen, "`)`")?;
                    Ok(f)
                }
            }
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> PResult<Formula> {
        let lspan = self.span();
        let (lhs, lsort) = self.term()?;
        let op_span = self.span();
        let op = self.peek().clone();
        match op {
            Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge | Tok::In => {
                self.bump();
            }
            _ => return Err(self.unexpected("a relation (`=`, `<`, `<=`, `in`, ...)")),
        }
        let rspan = self.span();
        let (rhs, rsort) = self.term()?;
        match op {
            Tok::Eq | Tok::Ne => {
                if lsort != rsort {
                    return Err(ParseError::new(
                        format!("sort mismatch: `{lsort}` compared with `{rsort}`"),
                        op_span,
                    ));
                }
                let eq = Formula::Eq(lhs, rhs);
                Ok(if op == Tok::Ne { Formula::not(eq) } else { eq })
            }
            Tok::In => {
                require(lsort, Sort::Int, lspan)?;
                require(rsort, Sort::IntList, rspan)?;
                Ok(Formula::Mem(lhs, rhs))
            }
            _ => {
                require(lsort, Sort::Int, lspan)?;
                require(rsort, Sort::Int, rspan)?;
                Ok(match op {
                    Tok::Lt => Formula::Lt(lhs, rhs),
                    Tok::Le => Formula::Le(lhs, rhs),
                    Tok::Gt => Formula::Lt(rhs, lhs),
                    _ => Formula::Le(rhs, lhs),
                })
            }
        }
    }

    fn term(&mut self) -> PResult<(Term, Sort)> {
        self.enter()?;
        let lspan = self.span();
        let (lhs, lsort) = self.additive()?;
        let out = match self.peek() {
            Tok::Cons => {
                self.bump();
                let rspan = self.span();
                let (rhs, rsort) = self.term()?;
                require(lsort, Sort::Int, lspan)?;
                require(rsort, Sort::IntList, rspan)?;
                (Term::cons(lhs, rhs), Sort::IntList)
            }
            Tok::Append => {
                self.bump();
                let rspan = self.span();
                let (rhs, rsort) = self.term()?;
                require(lsort, Sort::IntList, lspan)?;
                require(rsort, Sort::IntList, rspan)?;
                (Term::append(lhs, rhs), Sort::IntList)
            }
            _ => (lhs, lsort),
        };
        self.leave(1);
        Ok(out)
    }

    fn additive(&mut self) -> PResult<(Term, Sort)> {
        let lspan = self.span();
        let (mut lhs, lsort) = self.multiplicative()?;
        let mut links = 0;
        while matches!(self.peek(), Tok::Plus | Tok::Minus) {
            require(lsort, Sort::Int, lspan)?;
            let plus = self.bump().tok == Tok::Plus;
            self.enter()?;
            links += 1;
            let rspan = self.span();
            let (rhs, rsort) = self.multiplicative()?;
            require(rsort, Sort::Int, rspan)?;
            lhs = if plus { Term::add(lhs, rhs) } else { Term::sub(lhs, rhs) };
        }
        self.leave(links);
        Ok((lhs, lsort))
    }

    fn multiplicative(&mut self) -> PResult<(Term, Sort)> {
        let lspan = self.span();
        let (mut lhs, lsort) = self.primary()?;
        let mut links = 0;
        while matches!(self.peek(), Tok::Star | Tok::Percent) {
            require(lsort, Sort::Int, lspan)?;
            let star = self.bump().tok == Tok::Star;
            self.enter()?;
            links += 1;
            let rspan = self.span();
            let (rhs, rsort) = self.primary()?;
            require(rsort, Sort::Int, rspan)?;
            lhs = if star { Term::mul(lhs, rhs) } else { Term::modulo(lhs, rhs) };
        }
        self.leave(links);
        Ok((lhs, lsort))
    }

    fn primary(&mut self) -> PResult<(Term, Sort)> {
        self.enter()?;
        let span = self.span();
        let out = match self.peek().clone() {
            Tok::Nat(n) => {
                self.bump();
                let v = i64::try_from(n).map_err(|_| {
                    ParseError::new(format!("integer literal `{n}` is out of range"), span)
                })?;
                (Term::Int(v), Sort::Int)
            }
            Tok::Minus => {
                self.bump();
                match self.peek().clone() {
                    Tok::Nat(n) => {
                        self.bump();
                        let v = 0i128 - n as i128;
                        let v = i64::try_from(v).map_err(|_| {
                            ParseError::new(format!("integer literal `-{n}` is out of range"), span)
                        })?;
                        (Term::Int(v), Sort::Int)
                    }
                    _ => return Err(self.unexpected("an integer literal after `-`")),
                }
            }
            Tok::Ident(name) => {
                self.bump();
                let sort = self
                    .scope
                    .iter()
                    .rev()
                    .find(|(n, _)| *n == name)
                    .map(|(_, s)| *s)
                    .ok_or_else(|| {
                        ParseError::new(format!("unbound variable `{name}`"), span)
                    })?;
                (Term::Var(name), sort)
            }
            Tok::LBracket => {
                self.bump();
                let mut items = Vec::new();
                if !self.eat(&Tok::RBracket) {
                    loop {
                        let ispan = self.span();
                        let (item, sort) = self.term()?;
                        require(sort, Sort::Int, ispan)?;
                        items.push(item);
                        if self.eat(&Tok::RBracket) {
                            break;
                        }
                        self.expect(&Tok::Comma, "`,` or `]`")?;
                    }
                }
                (Term::List(items), Sort::IntList)
            }
            Tok::Length => {
                self.bump();
                self.expect(&Tok::LParen, "`(`")?;
                let aspan = self.span();
                let (list, sort) = self.term()?;
                require(sort, Sort::IntList, aspan)?;
                self.expect(&Tok::RParen, "`)`")?;
                (Term::length(list), Sort::Int)
            }
            Tok::Count => {
                self.bump();
                self.expect(&Tok::LParen, "`(`")?;
                let lspan = self.span();
                let (list, lsort) = self.term()?;
                require(lsort, Sort::IntList, lspan)?;
                self.expect(&Tok::Comma, "`,`")?;
                let espan = self.span();
                let (elem, esort) = self.term()?;
                require(esort, Sort::Int, espan)?;
                self.expect(&Tok::RParen, "`)`")?;
                (Term::count(list, elem), Sort::Int)
            }
            Tok::If => {
                self.bump();
                let cond = self.formula()?;
                self.expect(&Tok::Then, "`then`")?;
                let (then, tsort) = self.term()?;
                self.expect(&Tok::Else, "`else`")?;
                let espan = self.span();
                let (other, esort) = self.term()?;
                if tsort != esort {
                    return Err(ParseError::new(
                        format!("sort mismatch: `then` branch is `{tsort}`, `else` branch is `{esort}`"),
                        espan,
                    ));
                }
                (Term::ite(cond, then, other), tsort)
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(&Tok::RParen, "`)`")?;
                t
            }
            _ => return Err(self.unexpected("a term")),
        };
        self.leave(1);
        Ok(out)
    }
}

fn require(found: Sort, wanted: Sort, span: SourceSpan) -> PResult<()> {
    if found == wanted {
        Ok(())
    } else {
        Err(ParseError::new(
            format!("sort mismatch: expected `{wanted}`, found `{found}`"),
            span,
        ))
    }
}
