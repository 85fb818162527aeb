//! Recursive-descent parser for the litmus format.
//!
//! Header directives are line-oriented; thread bodies and conditions are
//! free-form. Variables must be declared before they are used.

use std::collections::BTreeMap;

use super::ast::{LitmusTest, Quantifier, Stmt, Thread, Verdict};
use crate::error::{Error, Result};
use crate::lang::{Annotation, BinOp, Expr, FenceKind, ThreadId, UnOp, Value, Variable};
use crate::model::MemoryModel;

const RESERVED: &[&str] = &[
    "rel", "acq", "assume", "skip", "fence", "mfence", "dsb", "dsb.st", "isb", "if", "else", "while", "true", "false",
];

/// Where bare names are looked up.
#[derive(Clone, Copy)]
enum Ctx {
    Thread(ThreadId),
    /// Conditions and `init`: bare names are shared, registers qualified.
    Global,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    shared: Vec<String>,
    locals: BTreeMap<ThreadId, Vec<String>>,
}

pub fn parse_litmus(text: &str) -> Result<LitmusTest> {
    Parser {
        src: text,
        pos: 0,
        shared: Vec::new(),
        locals: BTreeMap::new(),
    }
    .test()
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '.'
}

fn thread_id(name: &str) -> Option<ThreadId> {
    let digits = name.strip_prefix('P')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn peek2(&self) -> Option<char> {
        self.rest().chars().nth(1)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.src[..pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, col)
    }

    fn error_at(&self, pos: usize, msg: impl Into<String>) -> Error {
        let (line, col) = self.location(pos);
        Error::parse(line, col, msg)
    }

    fn error(&self, msg: impl Into<String>) -> Error {
        self.error_at(self.pos, msg)
    }

    /// Skips blanks and comments, crossing line breaks only if `lines`.
    fn skip(&mut self, lines: bool) {
        while let Some(c) = self.peek() {
            if c == '#' {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
            } else if c == '\n' && !lines {
                break;
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn ws(&mut self) {
        self.skip(true)
    }

    fn at_line_end(&mut self) -> bool {
        self.skip(false);
        matches!(self.peek(), None | Some('\n'))
    }

    fn end_line(&mut self) -> Result<()> {
        if self.at_line_end() {
            Ok(())
        } else {
            Err(self.error("expected end of line"))
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        self.ws();
        if self.rest().starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{s}`")))
        }
    }

    fn peek_ident(&mut self) -> Option<&'a str> {
        self.ws();
        let rest = self.rest();
        if !rest.starts_with(is_ident_start) {
            return None;
        }
        let end = rest.find(|c| !is_ident_char(c)).unwrap_or(rest.len());
        Some(&rest[..end])
    }

    fn ident(&mut self) -> Result<&'a str> {
        match self.peek_ident() {
            Some(id) => {
                self.pos += id.len();
                Ok(id)
            }
            None => Err(self.error("expected an identifier")),
        }
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_ident() == Some(kw) {
            self.pos += kw.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<Value> {
        self.ws();
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.bump();
        }
        self.src[start..self.pos]
            .parse()
            .map_err(|_| self.error_at(start, "expected an integer"))
    }

    fn test(mut self) -> Result<LitmusTest> {
        let mut name = None;
        let mut model = None;
        let mut init = Vec::new();
        let mut threads: Vec<Thread> = Vec::new();
        let mut condition = None;
        let mut expect = None;
        loop {
            self.ws();
            if self.peek().is_none() {
                break;
            }
            let at = self.pos;
            let kw = self.ident()?;
            match kw {
                "name" => {
                    self.skip(false);
                    let rest = self.rest();
                    let end = rest.find(['\n', '#']).unwrap_or(rest.len());
                    let n = rest[..end].trim();
                    if n.is_empty() {
                        return Err(self.error("expected a test name"));
                    }
                    name = Some(n.to_string());
                    self.pos += end;
                }
                "model" => {
                    let m = self.ident()?;
                    model = Some(m.parse::<MemoryModel>().map_err(|e| self.error_at(self.pos - m.len(), e))?);
                    self.end_line()?;
                }
                "shared" => {
                    while !self.at_line_end() {
                        let id = self.declared_name(None)?;
                        self.shared.push(id.to_string());
                    }
                }
                "local" => {
                    let t = self.thread_name()?;
                    while !self.at_line_end() {
                        let id = self.declared_name(Some(t))?;
                        self.locals.entry(t).or_default().push(id.to_string());
                    }
                }
                "init" => {
                    while !self.at_line_end() {
                        let v = self.global_var()?;
                        self.expect("=")?;
                        init.push((v, self.number()?));
                        self.skip(false);
                        if self.peek() == Some(',') || self.peek() == Some(';') {
                            self.bump();
                        }
                    }
                }
                "thread" => {
                    let t = self.thread_name()?;
                    if t != threads.len() {
                        return Err(self.error_at(at, format!("expected thread P{}", threads.len())));
                    }
                    let body = self.block(t)?;
                    threads.push(Thread { id: t, body });
                    self.end_line()?;
                }
                "exists" | "forbidden" => {
                    let q = if kw == "exists" {
                        Quantifier::Exists
                    } else {
                        Quantifier::Forbidden
                    };
                    self.expect("(")?;
                    let e = self.expr(Ctx::Global)?;
                    self.expect(")")?;
                    condition = Some((q, e));
                    self.end_line()?;
                }
                "expect" => {
                    expect = Some(match self.ident()? {
                        "allowed" => Verdict::Allowed,
                        "forbidden" => Verdict::Forbidden,
                        other => return Err(self.error(format!("expected `allowed` or `forbidden`, found `{other}`"))),
                    });
                    self.end_line()?;
                }
                other => return Err(self.error_at(at, format!("unknown directive `{other}`"))),
            }
        }
        let missing = |what: &str| self.error(format!("missing `{what}`"));
        let name = name.ok_or_else(|| missing("name"))?;
        let model = model.ok_or_else(|| missing("model"))?;
        let (quantifier, condition) = condition.ok_or_else(|| missing("exists"))?;
        let expect = expect.ok_or_else(|| missing("expect"))?;
        if threads.is_empty() {
            return Err(missing("thread"));
        }
        Ok(LitmusTest {
            name,
            model,
            shared: self.shared,
            locals: self.locals,
            init,
            threads,
            quantifier,
            condition,
            expect,
        })
    }

    fn thread_name(&mut self) -> Result<ThreadId> {
        let at = self.pos;
        let id = self.ident()?;
        thread_id(id).ok_or_else(|| self.error_at(at, format!("expected a thread name like P0, found `{id}`")))
    }

    /// A new name; registers of different threads may share names, but no
    /// register may shadow a shared variable.
    fn declared_name(&mut self, thread: Option<ThreadId>) -> Result<&'a str> {
        self.ws();
        let at = self.pos;
        let id = self.ident()?;
        if RESERVED.contains(&id) || id.contains('.') {
            return Err(self.error_at(at, format!("`{id}` cannot name a variable")));
        }
        let clash = self.shared.iter().any(|s| s == id)
            || match thread {
                None => self.locals.values().flatten().any(|s| s == id),
                Some(t) => self.locals.get(&t).is_some_and(|ls| ls.iter().any(|s| s == id)),
            };
        if clash {
            return Err(self.error_at(at, format!("`{id}` is declared twice")));
        }
        Ok(id)
    }

    /// `x` (shared) or `P0:r1` (a register).
    fn global_var(&mut self) -> Result<Variable> {
        let id = self.ident()?;
        self.resolve(id, Ctx::Global)
    }

    fn resolve(&mut self, id: &str, ctx: Ctx) -> Result<Variable> {
        if let (Ctx::Global, Some(t)) = (ctx, thread_id(id)) {
            if self.peek() == Some(':') && self.peek2() != Some('=') {
                self.bump();
                let r = self.ident()?;
                return if self.locals.get(&t).is_some_and(|ls| ls.iter().any(|l| l == r)) {
                    Ok(Variable::local(t, r))
                } else {
                    Err(Error::UndeclaredVariable(format!("{id}:{r}")))
                };
            }
        }
        if let Ctx::Thread(t) = ctx {
            if self.locals.get(&t).is_some_and(|ls| ls.iter().any(|l| l == id)) {
                return Ok(Variable::local(t, id));
            }
        }
        if self.shared.iter().any(|s| s == id) {
            return Ok(Variable::shared(id));
        }
        Err(Error::UndeclaredVariable(id.to_string()))
    }

    fn block(&mut self, t: ThreadId) -> Result<Vec<Stmt>> {
        self.expect("{")?;
        let mut out = Vec::new();
        loop {
            if self.eat("}") {
                return Ok(out);
            }
            let (s, compound) = self.stmt(t)?;
            out.push(s);
            if !self.eat(";") && !compound {
                self.ws();
                if self.peek() != Some('}') {
                    return Err(self.error("expected `;` or `}`"));
                }
            }
        }
    }

    fn annotation(&mut self) -> Option<Annotation> {
        if self.eat_keyword("rel") {
            Some(Annotation::Release)
        } else if self.eat_keyword("acq") {
            Some(Annotation::Acquire)
        } else {
            None
        }
    }

    /// A statement, and whether it ended with a block.
    fn stmt(&mut self, t: ThreadId) -> Result<(Stmt, bool)> {
        self.ws();
        let at = self.pos;
        let annot = self.annotation();
        if annot.is_some() {
            if self.annotation().is_some() {
                return Err(Error::NestedAnnotation);
            }
            return match self.peek_ident() {
                Some("assume") => {
                    self.ident()?;
                    Ok((Stmt::Assume { annot, cond: self.paren_expr(t)? }, false))
                }
                Some(kw) if RESERVED.contains(&kw) => {
                    Err(self.error_at(at, "only assignments and `assume` can be annotated"))
                }
                _ => Ok((self.assign(t, annot)?, false)),
            };
        }
        let Some(kw) = self.peek_ident() else {
            return Err(self.error("expected a statement"));
        };
        let simple = |s| Ok((s, false));
        match kw {
            "assume" => {
                self.ident()?;
                simple(Stmt::Assume {
                    annot: None,
                    cond: self.paren_expr(t)?,
                })
            }
            "skip" => {
                self.ident()?;
                simple(Stmt::Skip)
            }
            "mfence" | "dsb" => {
                self.ident()?;
                simple(Stmt::Fence(FenceKind::Full))
            }
            "dsb.st" => {
                self.ident()?;
                simple(Stmt::Fence(FenceKind::StoreStore))
            }
            "isb" => {
                self.ident()?;
                simple(Stmt::Fence(FenceKind::Control))
            }
            "fence" => {
                self.ident()?;
                simple(Stmt::Fence(self.fence_kind()?))
            }
            "if" => {
                self.ident()?;
                let cond = self.paren_expr(t)?;
                let then_branch = self.block(t)?;
                let else_branch = if self.eat_keyword("else") {
                    if self.peek_ident() == Some("if") {
                        vec![self.stmt(t)?.0]
                    } else {
                        self.block(t)?
                    }
                } else {
                    Vec::new()
                };
                Ok((
                    Stmt::If {
                        cond,
                        then_branch,
                        else_branch,
                    },
                    true,
                ))
            }
            "while" => {
                self.ident()?;
                let cond = self.paren_expr(t)?;
                Ok((
                    Stmt::While {
                        cond,
                        body: self.block(t)?,
                    },
                    true,
                ))
            }
            "else" => Err(self.error("`else` without `if`")),
            _ => simple(self.assign(t, None)?),
        }
    }

    /// `full`, `ss`, … or the RISC-V predecessor/successor form `rw,w`.
    fn fence_kind(&mut self) -> Result<FenceKind> {
        let at = self.pos;
        let first = self.ident()?;
        if let Some(k) = FenceKind::from_keyword(first) {
            return Ok(k);
        }
        if !matches!(first, "r" | "w" | "rw") {
            return Err(self.error_at(at, format!("unknown fence `{first}`")));
        }
        self.expect(",")?;
        let second = self.ident()?;
        match (first, second) {
            ("rw", "rw") => Ok(FenceKind::Full),
            ("w", "w") => Ok(FenceKind::StoreStore),
            ("r", "r") => Ok(FenceKind::LoadLoad),
            ("rw", "w") => Ok(FenceKind::RwW),
            ("r", "rw") => Ok(FenceKind::RRw),
            _ => Err(self.error_at(at, format!("unsupported fence `{first},{second}`"))),
        }
    }

    fn assign(&mut self, t: ThreadId, annot: Option<Annotation>) -> Result<Stmt> {
        let at = self.pos;
        let id = self.ident()?;
        if RESERVED.contains(&id) {
            return Err(self.error_at(at, format!("unexpected `{id}`")));
        }
        let target = self.resolve(id, Ctx::Thread(t))?;
        self.expect(":=")?;
        let expr = self.expr(Ctx::Thread(t))?;
        Ok(Stmt::Assign { annot, target, expr })
    }

    fn paren_expr(&mut self, t: ThreadId) -> Result<Expr> {
        self.expect("(")?;
        let e = self.expr(Ctx::Thread(t))?;
        self.expect(")")?;
        Ok(e)
    }

    fn expr(&mut self, ctx: Ctx) -> Result<Expr> {
        self.binary(ctx, 1)
    }

    /// The binary operator at the cursor with precedence `level`, if any.
    fn binop(&mut self, level: u8) -> Option<(BinOp, bool)> {
        self.ws();
        let r = self.rest();
        // Longest operators first; `=` alone means equality and `>` flips.
        let table: [(&str, BinOp, bool); 12] = [
            ("||", BinOp::Or, false),
            ("&&", BinOp::And, false),
            ("==", BinOp::Eq, false),
            ("!=", BinOp::Ne, false),
            ("<=", BinOp::Le, false),
            (">=", BinOp::Le, true),
            ("<", BinOp::Lt, false),
            (">", BinOp::Lt, true),
            ("=", BinOp::Eq, false),
            ("+", BinOp::Add, false),
            ("-", BinOp::Sub, false),
            ("*", BinOp::Mul, false),
        ];
        for (sym, op, flip) in table {
            if r.starts_with(sym) && op.precedence() == level {
                self.pos += sym.len();
                return Some((op, flip));
            }
            if r.starts_with(sym) {
                return None;
            }
        }
        None
    }

    fn binary(&mut self, ctx: Ctx, level: u8) -> Result<Expr> {
        if level > 6 {
            return self.unary(ctx);
        }
        let mut lhs = self.binary(ctx, level + 1)?;
        while let Some((op, flip)) = self.binop(level) {
            let rhs = self.binary(ctx, level + 1)?;
            lhs = if flip {
                Expr::binary(op, rhs, lhs)
            } else {
                Expr::binary(op, lhs, rhs)
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self, ctx: Ctx) -> Result<Expr> {
        self.ws();
        match self.peek() {
            Some('-') if self.peek2().is_some_and(|c| c.is_ascii_digit()) => Ok(Expr::Const(self.number()?)),
            Some('-') => {
                self.bump();
                Ok(Expr::unary(UnOp::Neg, self.unary(ctx)?))
            }
            Some('!') if self.peek2() != Some('=') => {
                self.bump();
                Ok(Expr::unary(UnOp::Not, self.unary(ctx)?))
            }
            Some('(') => {
                self.bump();
                let e = self.expr(ctx)?;
                self.expect(")")?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Const(self.number()?)),
            Some(c) if is_ident_start(c) => {
                let at = self.pos;
                let id = self.ident()?;
                match id {
                    "true" => Ok(Expr::Const(1)),
                    "false" => Ok(Expr::Const(0)),
                    _ if RESERVED.contains(&id) => Err(self.error_at(at, format!("unexpected `{id}`"))),
                    _ => Ok(Expr::Var(self.resolve(id, ctx)?)),
                }
            }
            _ => Err(self.error("expected an expression")),
        }
    }
}
