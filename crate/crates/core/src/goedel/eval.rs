use std::collections::{BTreeMap, BTreeSet, HashMap};

use num::{One, Zero};
use serde_json::{json, Map, Value};

use super::formula::{Arg, Formula};
use crate::error::{Error, Result};
use crate::term::Rat;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connective {
    And,
    Or,
    Imp,
    Neg,
}

fn in_unit(a: &Rat) -> Result<()> {
    if a < &Rat::zero() || a > &Rat::one() {
        return Err(Error::Input(format!("truth value {a} outside [0,1]")));
    }
    Ok(())
}

/// Goedel implication: `1` when `a <= b`, otherwise `b`.
pub fn imp(a: &Rat, b: &Rat) -> Rat {
    if a <= b {
        Rat::one()
    } else {
        b.clone()
    }
}

pub fn connective(kind: Connective, a: &Rat, b: Option<&Rat>) -> Result<Rat> {
    in_unit(a)?;
    if let Some(b) = b {
        in_unit(b)?;
    }
    let need = || b.ok_or_else(|| Error::Input("binary connective needs two arguments".into()));
    Ok(match kind {
        Connective::And => a.min(need()?).clone(),
        Connective::Or => a.max(need()?).clone(),
        Connective::Imp => imp(a, need()?),
        Connective::Neg => imp(a, &Rat::zero()),
    })
}

/// A finite model: universe plus one truth table per predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Valuation {
    pub universe: Vec<String>,
    pub tables: BTreeMap<String, BTreeMap<Vec<String>, Rat>>,
}

impl Valuation {
    pub fn new(universe: Vec<String>) -> Result<Self> {
        if universe.is_empty() {
            return Err(Error::Input("empty universe".into()));
        }
        Ok(Valuation { universe, tables: BTreeMap::new() })
    }

    pub fn set(&mut self, p: &str, args: &[&str], value: Rat) -> Result<()> {
        in_unit(&value)?;
        for a in args {
            if !self.universe.iter().any(|m| m == a) {
                return Err(Error::Input(format!("`{a}` is not in the universe")));
            }
        }
        self.tables
            .entry(p.to_string())
            .or_default()
            .insert(args.iter().map(|s| s.to_string()).collect(), value);
        Ok(())
    }

    pub fn get(&self, p: &str, args: &[String]) -> Result<&Rat> {
        self.tables
            .get(p)
            .and_then(|t| t.get(args))
            .ok_or_else(|| Error::Input(format!("no table entry for {p}({})", args.join(","))))
    }

    /// Every table value.
    pub fn values(&self) -> BTreeSet<Rat> {
        self.tables.values().flat_map(|t| t.values().cloned()).collect()
    }

    pub fn map_values(&self, mut f: impl FnMut(&Rat) -> Result<Rat>) -> Result<Valuation> {
        let mut tables = BTreeMap::new();
        for (p, t) in &self.tables {
            let mut nt = BTreeMap::new();
            for (k, v) in t {
                nt.insert(k.clone(), f(v)?);
            }
            tables.insert(p.clone(), nt);
        }
        Ok(Valuation { universe: self.universe.clone(), tables })
    }

    /// Checks totality of every table and arity agreement with `sig`.
    pub fn check_total(&self, sig: &BTreeMap<String, usize>) -> Result<()> {
        for (p, &k) in sig {
            let t = self.tables.get(p).ok_or_else(|| Error::Input(format!("no table for `{p}`")))?;
            let n = self.universe.len().pow(k as u32);
            if t.len() != n || t.keys().any(|a| a.len() != k) {
                return Err(Error::Input(format!("table `{p}` is not total over M^{k}")));
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let mut tables = Map::new();
        for (p, t) in &self.tables {
            let mut m = Map::new();
            for (k, v) in t {
                m.insert(format!("({})", k.join(",")), Value::String(v.to_string()));
            }
            tables.insert(p.clone(), Value::Object(m));
        }
        json!({"universe": self.universe, "tables": tables})
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let bad = |m: &str| Error::Input(format!("valuation json: {m}"));
        let universe = v
            .get("universe")
            .and_then(Value::as_array)
            .ok_or_else(|| bad("missing `universe`"))?
            .iter()
            .map(|m| m.as_str().map(String::from).ok_or_else(|| bad("universe entries must be strings")))
            .collect::<Result<Vec<_>>>()?;
        let mut val = Valuation::new(universe)?;
        let tables = v.get("tables").and_then(Value::as_object).ok_or_else(|| bad("missing `tables`"))?;
        for (p, t) in tables {
            let t = t.as_object().ok_or_else(|| bad("table must be an object"))?;
            for (k, x) in t {
                let inner = k
                    .trim()
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| bad("keys look like `(m1,m2)`"))?;
                let args: Vec<&str> =
                    if inner.trim().is_empty() { Vec::new() } else { inner.split(',').map(str::trim).collect() };
                let s = x.as_str().ok_or_else(|| bad("values are fraction strings"))?;
                let r: Rat = s.trim().parse().map_err(|_| bad(&format!("bad fraction `{s}`")))?;
                val.set(p, &args, r)?;
            }
        }
        Ok(val)
    }
}

type Env = HashMap<String, String>;

fn resolve(args: &[Arg], env: &Env) -> Result<Vec<String>> {
    args.iter()
        .map(|a| match a {
            Arg::Const(c) => Ok(c.clone()),
            Arg::Var(x) => env.get(x).cloned().ok_or_else(|| Error::Input(format!("unbound variable `{x}`"))),
        })
        .collect()
}

fn eval_in(v: &Valuation, f: &Formula, env: &mut Env) -> Result<Rat> {
    Ok(match f {
        Formula::Bot => Rat::zero(),
        Formula::Atom(p, args) => v.get(p, &resolve(args, env)?)?.clone(),
        Formula::And(a, b) => eval_in(v, a, env)?.min(eval_in(v, b, env)?),
        Formula::Or(a, b) => eval_in(v, a, env)?.max(eval_in(v, b, env)?),
        Formula::Imp(a, b) => imp(&eval_in(v, a, env)?, &eval_in(v, b, env)?),
        Formula::Forall(x, a) | Formula::Exists(x, a) => {
            let all = matches!(f, Formula::Forall(..));
            let saved = env.get(x).cloned();
            let mut acc: Option<Rat> = None;
            for m in &v.universe {
                env.insert(x.clone(), m.clone());
                let r = eval_in(v, a, env)?;
                acc = Some(match acc {
                    None => r,
                    Some(s) if all => s.min(r),
                    Some(s) => s.max(r),
                });
            }
            match saved {
                Some(s) => env.insert(x.clone(), s),
                None => env.remove(x),
            };
            acc.expect("nonempty universe")
        }
    })
}

/// Value of a closed formula; quantifiers range over the finite universe.
pub fn evaluate(v: &Valuation, f: &Formula) -> Result<Rat> {
    if let Some(x) = f.free_vars().first() {
        return Err(Error::Input(format!("unbound variable `{x}`")));
    }
    eval_in(v, f, &mut Env::new())
}

/// Value of a possibly open formula with free variables bound by `env`.
pub fn evaluate_with(v: &Valuation, f: &Formula, env: &HashMap<String, String>) -> Result<Rat> {
    eval_in(v, f, &mut env.clone())
}

/// Values of every subformula under every assignment of its free variables.
pub fn subformula_values(v: &Valuation, f: &Formula) -> Result<BTreeSet<Rat>> {
    let mut out = BTreeSet::new();
    for g in f.subformulas() {
        let free = g.free_vars();
        let n = v.universe.len();
        let total = n.pow(free.len() as u32);
        for code in 0..total {
            let mut env = Env::new();
            let mut c = code;
            for x in &free {
                env.insert(x.clone(), v.universe[c % n].clone());
                c /= n;
            }
            out.insert(eval_in(v, g, &mut env)?);
        }
    }
    Ok(out)
}

/// `h_b`: identity below `b`, `1` from `b` on.
pub fn cut_off(a: &Rat, b: &Rat) -> Rat {
    if a < b {
        a.clone()
    } else {
        Rat::one()
    }
}

/// Replaces every table value `a` by `h_b(a)`.
pub fn truncate_valuation(v: &Valuation, f: &Formula, b: &Rat) -> Result<Valuation> {
    let val = evaluate(v, f)?;
    if !(&val < b) {
        return Err(Error::Precondition(format!("formula value {val} is not below b = {b}")));
    }
    if b >= &Rat::one() {
        return Err(Error::Precondition(format!("b = {b} is not below 1")));
    }
    if subformula_values(v, f)?.contains(b) {
        return Err(Error::Precondition(format!("b = {b} is the value of a subformula")));
    }
    v.map_values(|a| Ok(cut_off(a, b)))
}

/// Composes every table with `h`, given as its values on the sample.
pub fn induced_valuation(v1: &Valuation, h: &BTreeMap<Rat, Rat>) -> Result<Valuation> {
    v1.map_values(|a| h.get(a).cloned().ok_or_else(|| Error::Input(format!("value {a} outside the domain of h"))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::goedel::formula::parse_formula;

    fn r(n: i64, d: i64) -> Rat {
        Rat::new(n.into(), d.into())
    }

    #[test]
    fn connective_cases() {
        assert_eq!(connective(Connective::Imp, &r(3, 10), Some(&r(7, 10))).unwrap(), r(1, 1));
        assert_eq!(connective(Connective::Imp, &r(7, 10), Some(&r(3, 10))).unwrap(), r(3, 10));
        assert_eq!(connective(Connective::Neg, &r(0, 1), None).unwrap(), r(1, 1));
        assert_eq!(connective(Connective::Neg, &r(1, 2), None).unwrap(), r(0, 1));
        assert!(connective(Connective::And, &r(3, 2), Some(&r(0, 1))).is_err());
    }

    fn two_point() -> Valuation {
        let mut v = Valuation::new(vec!["m1".into(), "m2".into()]).unwrap();
        v.set("P", &["m1"], r(1, 3)).unwrap();
        v.set("P", &["m2"], r(2, 3)).unwrap();
        v
    }

    #[test]
    fn quantifiers() {
        let v = two_point();
        assert_eq!(evaluate(&v, &parse_formula("exists x. P(x)").unwrap()).unwrap(), r(2, 3));
        assert_eq!(evaluate(&v, &parse_formula("forall x. P(x)").unwrap()).unwrap(), r(1, 3));
        assert_eq!(evaluate(&v, &Formula::Bot).unwrap(), r(0, 1));
        assert!(evaluate(&v, &parse_formula("P(m3)").unwrap()).is_err());
    }

    #[test]
    fn truncation_example() {
        let mut v = Valuation::new(vec!["a".into(), "b".into()]).unwrap();
        v.set("P", &["a"], r(1, 3)).unwrap();
        v.set("P", &["b"], r(3, 4)).unwrap();
        let f = parse_formula("forall x. P(x)").unwrap();
        let t = truncate_valuation(&v, &f, &r(1, 2)).unwrap();
        assert_eq!(t.values(), [r(1, 3), r(1, 1)].into_iter().collect());
        assert_eq!(evaluate(&t, &f).unwrap(), r(1, 3));
        assert!(matches!(truncate_valuation(&v, &f, &r(3, 4)), Err(Error::Precondition(_))));
    }

    #[test]
    fn json_round_trip() {
        let v = two_point();
        assert_eq!(Valuation::from_json(&v.to_json()).unwrap(), v);
    }
}
