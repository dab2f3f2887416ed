use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::syntax::Cursor;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Arg {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Atom(String, Vec<Arg>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
    Forall(String, Box<Formula>),
    Exists(String, Box<Formula>),
}

impl Formula {
    pub fn atom(p: &str, args: &[&str]) -> Formula {
        Formula::Atom(p.into(), args.iter().map(|a| Arg::Const(a.to_string())).collect())
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Formula {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    /// `~a`, which abbreviates `a -> bot`.
    pub fn neg(a: Formula) -> Formula {
        Formula::imp(a, Formula::Bot)
    }

    pub fn forall(x: &str, body: Formula) -> Formula {
        Formula::Forall(x.into(), Box::new(body))
    }

    pub fn exists(x: &str, body: Formula) -> Formula {
        Formula::Exists(x.into(), Box::new(body))
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Atom(..) => 0,
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => 1 + a.depth().max(b.depth()),
            Formula::Forall(_, a) | Formula::Exists(_, a) => 1 + a.depth(),
        }
    }

    /// Every subformula, root first.
    pub fn subformulas(&self) -> Vec<&Formula> {
        let mut out = vec![self];
        let mut i = 0;
        while i < out.len() {
            match out[i] {
                Formula::Bot | Formula::Atom(..) => {}
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    out.push(a);
                    out.push(b);
                }
                Formula::Forall(_, a) | Formula::Exists(_, a) => out.push(a),
            }
            i += 1;
        }
        out
    }

    /// Variables occurring free.
    pub fn free_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        fn go(f: &Formula, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match f {
                Formula::Bot => {}
                Formula::Atom(_, args) => {
                    for a in args {
                        if let Arg::Var(x) = a {
                            if !bound.contains(x) && !out.contains(x) {
                                out.push(x.clone());
                            }
                        }
                    }
                }
                Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                Formula::Forall(x, a) | Formula::Exists(x, a) => {
                    bound.push(x.clone());
                    go(a, bound, out);
                    bound.pop();
                }
            }
        }
        go(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    /// Predicate symbols with arities; conflicting arities are an error.
    pub fn signature(&self) -> Result<BTreeMap<String, usize>> {
        let mut sig = BTreeMap::new();
        for f in self.subformulas() {
            if let Formula::Atom(p, args) = f {
                match sig.insert(p.clone(), args.len()) {
                    Some(n) if n != args.len() => {
                        return Err(Error::Input(format!("predicate `{p}` used with arities {n} and {}", args.len())))
                    }
                    _ => {}
                }
            }
        }
        Ok(sig)
    }

    /// Universe constants named in the formula, in first-occurrence order.
    pub fn constants(&self) -> Vec<String> {
        let mut out = Vec::new();
        for f in self.subformulas() {
            if let Formula::Atom(_, args) = f {
                for a in args {
                    if let Arg::Const(c) = a {
                        if !out.contains(c) {
                            out.push(c.clone());
                        }
                    }
                }
            }
        }
        out
    }
}

pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut c = Cursor::new(text);
    let mut bound = Vec::new();
    let f = imp(&mut c, &mut bound)?;
    if !c.at_end() {
        return c.err("trailing input");
    }
    f.signature()?;
    Ok(f)
}

fn imp(c: &mut Cursor, bound: &mut Vec<String>) -> Result<Formula> {
    let a = or(c, bound)?;
    if c.eat("->") {
        let b = imp(c, bound)?;
        return Ok(Formula::imp(a, b));
    }
    Ok(a)
}

fn or(c: &mut Cursor, bound: &mut Vec<String>) -> Result<Formula> {
    let mut a = and(c, bound)?;
    while c.eat("|") {
        a = Formula::or(a, and(c, bound)?);
    }
    Ok(a)
}

fn and(c: &mut Cursor, bound: &mut Vec<String>) -> Result<Formula> {
    let mut a = unary(c, bound)?;
    while c.eat("&") {
        a = Formula::and(a, unary(c, bound)?);
    }
    Ok(a)
}

fn unary(c: &mut Cursor, bound: &mut Vec<String>) -> Result<Formula> {
    if c.eat("~") {
        return Ok(Formula::neg(unary(c, bound)?));
    }
    if c.eat("(") {
        let f = imp(c, bound)?;
        c.expect(")")?;
        return Ok(f);
    }
    if c.keyword("bot") {
        return Ok(Formula::Bot);
    }
    for (word, forall) in [("forall", true), ("exists", false)] {
        if c.keyword(word) {
            let x = c.ident()?.to_string();
            c.expect(".")?;
            bound.push(x.clone());
            let body = imp(c, bound)?;
            bound.pop();
            let body = Box::new(body);
            return Ok(if forall { Formula::Forall(x, body) } else { Formula::Exists(x, body) });
        }
    }
    let p = c.ident()?.to_string();
    let mut args = Vec::new();
    if c.eat("(") && !c.eat(")") {
        loop {
            let a = c.ident()?;
            args.push(if bound.iter().any(|b| b == a) { Arg::Var(a.into()) } else { Arg::Const(a.into()) });
            if c.eat(")") {
                break;
            }
            c.expect(",")?;
        }
    }
    Ok(Formula::Atom(p, args))
}

pub fn format_formula(f: &Formula) -> String {
    f.to_string()
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Bot => f.write_str("bot"),
            Formula::Atom(p, args) => {
                f.write_str(p)?;
                if !args.is_empty() {
                    let names: Vec<&str> = args
                        .iter()
                        .map(|a| match a {
                            Arg::Var(x) | Arg::Const(x) => x.as_str(),
                        })
                        .collect();
                    write!(f, "({})", names.join(","))?;
                }
                Ok(())
            }
            Formula::Imp(a, b) if **b == Formula::Bot => write!(f, "~{a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Imp(a, b) => write!(f, "({a} -> {b})"),
            Formula::Forall(x, a) => write!(f, "(forall {x}. {a})"),
            Formula::Exists(x, a) => write!(f, "(exists {x}. {a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_examples() {
        assert_eq!(parse_formula("bot").unwrap(), Formula::Bot);
        let pc = Formula::atom("P", &["c"]);
        assert_eq!(parse_formula("P(c) -> P(c)").unwrap(), Formula::imp(pc.clone(), pc.clone()));
        let f = parse_formula("forall x. P(x) -> bot").unwrap();
        let px = Formula::Atom("P".into(), vec![Arg::Var("x".into())]);
        assert_eq!(f, Formula::forall("x", Formula::imp(px, Formula::Bot)));
        assert_eq!(parse_formula("~P(c)").unwrap(), Formula::neg(pc.clone()));
    }

    #[test]
    fn precedence() {
        let f = parse_formula("a & b | c -> d -> e").unwrap();
        let [a, b, c, d, e] = ["a", "b", "c", "d", "e"].map(|s| Formula::atom(s, &[]));
        let want = Formula::imp(Formula::or(Formula::and(a, b), c), Formula::imp(d, e));
        assert_eq!(f, want);
    }

    #[test]
    fn arity_conflict() {
        assert!(parse_formula("P(a) & P(a,b)").is_err());
    }

    #[test]
    fn print_round_trip() {
        for s in ["bot", "~(P(c) | Q)", "forall x. exists y. R(x,y) -> ~R(y,x)", "(a -> b) -> a"] {
            let f = parse_formula(s).unwrap();
            assert_eq!(parse_formula(&format_formula(&f)).unwrap(), f, "{s}");
        }
    }
}
