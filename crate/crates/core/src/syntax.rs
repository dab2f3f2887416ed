//! Text grammars for quasi-orders, terms and formulas, with printers.
//!
//! ```text
//! T   ::= "0" | "pt" [":" LABEL] | "int" [":" ENDS] | "(" T {"+" T} ")"
//!       | "w(" SEQ ";" LABEL ";" SEQ ")"
//! SEQ ::= "_" | "[" [T {"," T}] "|" T {"," T} "]"
//! ENDS ::= LABEL | LABEL "/" LABEL "/" LABEL
//! ```

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qo::{Label, OmegaSeq, QuasiOrder};
use crate::term::{Ends, OrderTerm};

/// Character cursor tracking line and column for error reports.
pub(crate) struct Cursor<'s> {
    src: &'s str,
    pos: usize,
}

impl<'s> Cursor<'s> {
    pub fn new(src: &'s str) -> Self {
        Cursor { src, pos: 0 }
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    pub fn ws(&mut self) {
        let r = self.rest();
        self.pos += r.len() - r.trim_start().len();
    }

    pub fn at_end(&mut self) -> bool {
        self.ws();
        self.pos == self.src.len()
    }

    pub fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let col = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
        Err(Error::Parse { line, col, msg: msg.into() })
    }

    pub fn peek(&mut self) -> Option<char> {
        self.ws();
        self.rest().chars().next()
    }

    pub fn eat(&mut self, tok: &str) -> bool {
        self.ws();
        if self.rest().starts_with(tok) {
            self.pos += tok.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &str) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            self.err(format!("expected `{tok}`"))
        }
    }

    /// An identifier: letters, digits, `_`, `'`.
    pub fn ident(&mut self) -> Result<&'s str> {
        self.ws();
        let r = self.rest();
        let n = r
            .char_indices()
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\''))
            .map_or(r.len(), |(i, _)| i);
        if n == 0 {
            return self.err("expected an identifier");
        }
        self.pos += n;
        Ok(&r[..n])
    }

    /// Consumes `word` only when it is not the start of a longer identifier.
    pub fn keyword(&mut self, word: &str) -> bool {
        self.ws();
        let r = self.rest();
        if !r.starts_with(word) {
            return false;
        }
        let next = r[word.len()..].chars().next();
        if next.is_some_and(|c| c.is_alphanumeric() || c == '_') {
            return false;
        }
        self.pos += word.len();
        true
    }
}

// ---- quasi-orders ----

/// Parses `qo { elements: [a,b]; leq: [a<=b] }`; the closure is taken on load.
pub fn parse_qo(text: &str) -> Result<QuasiOrder> {
    let mut c = Cursor::new(text);
    if !c.keyword("qo") {
        return c.err("expected `qo`");
    }
    c.expect("{")?;
    if !c.keyword("elements") {
        return c.err("expected `elements`");
    }
    c.expect(":")?;
    c.expect("[")?;
    let mut names = Vec::new();
    if !c.eat("]") {
        loop {
            names.push(c.ident()?.to_string());
            if c.eat("]") {
                break;
            }
            c.expect(",")?;
        }
    }
    let mut pairs = Vec::new();
    if c.eat(";") && c.keyword("leq") {
        c.expect(":")?;
        c.expect("[")?;
        if !c.eat("]") {
            loop {
                let a = c.ident()?.to_string();
                c.expect("<=")?;
                let b = c.ident()?.to_string();
                pairs.push((a, b));
                if c.eat("]") {
                    break;
                }
                c.expect(",")?;
            }
        }
        c.eat(";");
    }
    c.expect("}")?;
    if !c.at_end() {
        return c.err("trailing input");
    }
    QuasiOrder::new(&names, &pairs)
}

pub fn format_qo(q: &QuasiOrder) -> String {
    q.to_string()
}

// ---- terms ----

/// Parses and validates a term over `q`.
pub fn parse_term(text: &str, q: &QuasiOrder) -> Result<OrderTerm> {
    let t = parse_term_raw(text, q)?;
    t.validated()?;
    Ok(t)
}

/// Parses without validating, so violations can be reported as data.
pub fn parse_term_raw(text: &str, q: &QuasiOrder) -> Result<OrderTerm> {
    let mut c = Cursor::new(text);
    let t = term(&mut c, q)?;
    if !c.at_end() {
        return c.err("trailing input");
    }
    Ok(t)
}

fn label(c: &mut Cursor, q: &QuasiOrder) -> Result<Label> {
    let save = c.pos;
    let name = c.ident()?;
    q.label(name).or_else(|_| {
        c.pos = save;
        c.err(format!("unknown label `{name}`"))
    })
}

fn term(c: &mut Cursor, q: &QuasiOrder) -> Result<OrderTerm> {
    match c.peek() {
        Some('0') if !c.rest()[1..].starts_with(|ch: char| ch.is_alphanumeric()) => {
            c.pos += 1;
            Ok(OrderTerm::Empty)
        }
        Some('(') => {
            c.pos += 1;
            let mut parts = Vec::new();
            loop {
                match term(c, q)? {
                    OrderTerm::Sum(inner) => parts.extend(inner),
                    t => parts.push(t),
                }
                if c.eat(")") {
                    break;
                }
                c.expect("+")?;
            }
            Ok(if parts.len() == 1 { parts.pop().unwrap() } else { OrderTerm::Sum(parts) })
        }
        _ => {
            if c.keyword("pt") {
                let l = if c.eat(":") { label(c, q)? } else { q.default_label() };
                Ok(OrderTerm::Atom(l))
            } else if c.keyword("int") {
                let e = if c.eat(":") {
                    let lo = label(c, q)?;
                    if c.eat("/") {
                        let inner = label(c, q)?;
                        c.expect("/")?;
                        let hi = label(c, q)?;
                        Ends { lo, inner, hi }
                    } else {
                        Ends::uniform(lo)
                    }
                } else {
                    Ends::uniform(q.default_label())
                };
                Ok(OrderTerm::Interval(e))
            } else if c.eat("w(") {
                let left = seq(c, q)?;
                c.expect(";")?;
                // `_` as center stands for the default label
                let center = if c.eat("_") { q.default_label() } else { label(c, q)? };
                c.expect(";")?;
                let right = seq(c, q)?;
                c.expect(")")?;
                Ok(OrderTerm::omega(left, center, right))
            } else {
                c.err("expected a term")
            }
        }
    }
}

fn seq(c: &mut Cursor, q: &QuasiOrder) -> Result<Option<OmegaSeq<OrderTerm>>> {
    if c.eat("_") {
        return Ok(None);
    }
    c.expect("[")?;
    let mut prefix = Vec::new();
    if !c.eat("|") {
        loop {
            prefix.push(term(c, q)?);
            if c.eat("|") {
                break;
            }
            c.expect(",")?;
        }
    }
    let mut cycle = Vec::new();
    if !c.eat("]") {
        loop {
            cycle.push(term(c, q)?);
            if c.eat("]") {
                break;
            }
            c.expect(",")?;
        }
    }
    // an empty cycle is kept so that validation reports it
    Ok(Some(OmegaSeq { prefix, cycle }))
}

/// Prints in the grammar accepted by `parse_term`; default labels are omitted.
pub fn format_term(t: &OrderTerm, q: &QuasiOrder) -> String {
    let mut s = String::new();
    write_term(t, q, &mut s);
    s
}

fn write_label(l: Label, q: &QuasiOrder, s: &mut String) {
    if l != q.default_label() {
        s.push(':');
        s.push_str(q.name(l));
    }
}

fn write_term(t: &OrderTerm, q: &QuasiOrder, s: &mut String) {
    match t {
        OrderTerm::Empty => s.push('0'),
        OrderTerm::Atom(l) => {
            s.push_str("pt");
            write_label(*l, q, s);
        }
        OrderTerm::Interval(e) => {
            s.push_str("int");
            if e.is_uniform() {
                write_label(e.inner, q, s);
            } else {
                s.push_str(&format!(":{}/{}/{}", q.name(e.lo), q.name(e.inner), q.name(e.hi)));
            }
        }
        OrderTerm::Sum(parts) => {
            s.push('(');
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    s.push_str(" + ");
                }
                write_term(p, q, s);
            }
            s.push(')');
        }
        OrderTerm::Omega(o) => {
            s.push_str("w(");
            write_seq(o.left.as_ref(), q, s);
            s.push(';');
            s.push_str(q.name(o.center));
            s.push(';');
            write_seq(o.right.as_ref(), q, s);
            s.push(')');
        }
    }
}

fn write_seq(seq: Option<&OmegaSeq<OrderTerm>>, q: &QuasiOrder, s: &mut String) {
    let Some(seq) = seq else {
        s.push('_');
        return;
    };
    s.push('[');
    for (i, t) in seq.prefix.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_term(t, q, s);
    }
    s.push('|');
    for (i, t) in seq.cycle.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        write_term(t, q, s);
    }
    s.push(']');
}

/// JSON export with explicit `kind` tags.
pub fn term_to_json(t: &OrderTerm, q: &QuasiOrder) -> Value {
    let seq = |s: Option<&OmegaSeq<OrderTerm>>| match s {
        None => Value::Null,
        Some(s) => json!({
            "prefix": s.prefix.iter().map(|t| term_to_json(t, q)).collect::<Vec<_>>(),
            "cycle": s.cycle.iter().map(|t| term_to_json(t, q)).collect::<Vec<_>>(),
        }),
    };
    match t {
        OrderTerm::Empty => json!({"kind": "empty"}),
        OrderTerm::Atom(l) => json!({"kind": "atom", "label": q.name(*l)}),
        OrderTerm::Interval(e) if e.is_uniform() => json!({"kind": "interval", "label": q.name(e.inner)}),
        OrderTerm::Interval(e) => json!({
            "kind": "interval",
            "label": q.name(e.inner),
            "lo": q.name(e.lo),
            "hi": q.name(e.hi),
        }),
        OrderTerm::Sum(parts) => {
            json!({"kind": "sum", "parts": parts.iter().map(|p| term_to_json(p, q)).collect::<Vec<_>>()})
        }
        OrderTerm::Omega(o) => json!({
            "kind": "omega",
            "left": seq(o.left.as_ref()),
            "center": q.name(o.center),
            "right": seq(o.right.as_ref()),
        }),
    }
}

/// Inverse of `term_to_json`; the result is validated.
pub fn term_from_json(v: &Value, q: &QuasiOrder) -> Result<OrderTerm> {
    let t = from_json(v, q)?;
    t.validated()?;
    Ok(t)
}

fn from_json(v: &Value, q: &QuasiOrder) -> Result<OrderTerm> {
    let bad = |m: &str| Error::Input(format!("term json: {m}"));
    let lab = |key: &str| -> Result<Label> {
        let name = v.get(key).and_then(Value::as_str).ok_or_else(|| bad(&format!("missing `{key}`")))?;
        q.label(name)
    };
    let list = |x: &Value| -> Result<Vec<OrderTerm>> {
        x.as_array().ok_or_else(|| bad("expected an array"))?.iter().map(|e| from_json(e, q)).collect()
    };
    let seq = |key: &str| -> Result<Option<OmegaSeq<OrderTerm>>> {
        match v.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(s) => Ok(Some(OmegaSeq {
                prefix: list(s.get("prefix").unwrap_or(&json!([])))?,
                cycle: list(s.get("cycle").ok_or_else(|| bad("missing `cycle`"))?)?,
            })),
        }
    };
    match v.get("kind").and_then(Value::as_str) {
        Some("empty") => Ok(OrderTerm::Empty),
        Some("atom") => Ok(OrderTerm::Atom(lab("label")?)),
        Some("interval") => {
            let inner = lab("label")?;
            let lo = if v.get("lo").is_some() { lab("lo")? } else { inner };
            let hi = if v.get("hi").is_some() { lab("hi")? } else { inner };
            Ok(OrderTerm::Interval(Ends { lo, inner, hi }))
        }
        Some("sum") => Ok(OrderTerm::Sum(list(v.get("parts").ok_or_else(|| bad("missing `parts`"))?)?)),
        Some("omega") => Ok(OrderTerm::omega(seq("left")?, lab("center")?, seq("right")?)),
        _ => Err(bad("unknown `kind`")),
    }
}

// ---- formulas ----

pub use crate::goedel::formula::{format_formula, parse_formula};

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qo_literal() {
        let q = parse_qo("qo { elements: [a, b, c]; leq: [a<=b, b<=c] }").unwrap();
        assert!(q.leq(q.label("a").unwrap(), q.label("c").unwrap()));
        let back = parse_qo(&format_qo(&q)).unwrap();
        assert_eq!(back, q);
        assert!(parse_qo("qo { elements: [a]; leq: [a<=z] }").is_err());
    }

    #[test]
    fn term_examples() {
        let q = QuasiOrder::unlabeled();
        assert_eq!(parse_term("pt", &q).unwrap(), OrderTerm::Atom(q.default_label()));
        let w = parse_term("w([|pt];p;_)", &q).unwrap();
        assert_eq!(w, OrderTerm::omega_left(vec![OrderTerm::Atom(Label(0))], Label(0)));
        let e = parse_term("w(_;p;_)", &q).unwrap_err();
        assert!(e.to_string().contains("both sides empty"), "{e}");
        assert!(parse_term("(pt + 0)", &q).is_err());
    }

    #[test]
    fn parse_error_position() {
        let q = QuasiOrder::unlabeled();
        match parse_term("(pt +\n  qq)", &q) {
            Err(Error::Parse { line, col, .. }) => assert_eq!((line, col), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let q = QuasiOrder::two_chain();
        for s in ["0", "pt:1", "int:0/1/1", "(pt + int:1)", "w([pt:1|pt, (pt + pt)];1;[|pt])"] {
            let t = parse_term(s, &q).unwrap();
            assert_eq!(parse_term(&format_term(&t, &q), &q).unwrap(), t);
            assert_eq!(term_from_json(&term_to_json(&t, &q), &q).unwrap(), t);
        }
    }
}
