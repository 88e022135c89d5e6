use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Index of a proposition. Id 0 is the reserved proposition of the free space
/// outside every declared region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PropId(pub u16);

impl PropId {
    pub const FREE: PropId = PropId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PropTableError {
    #[error("proposition name `{0}` is reserved")]
    Reserved(String),
    #[error("proposition `{0}` declared twice")]
    Duplicate(String),
    #[error("`{0}` is not a valid proposition name")]
    InvalidName(String),
}

/// Dense table of proposition names. Entry 0 is always the reserved `p0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropTable {
    names: Vec<String>,
}

pub(crate) const RESERVED_WORDS: [&str; 5] = ["F", "X", "U", "true", "false"];

impl PropTable {
    pub const FREE_NAME: &'static str = "p0";

    pub fn new() -> Self {
        PropTable {
            names: vec![Self::FREE_NAME.to_string()],
        }
    }

    /// Builds a table from the declared names, in order, as ids `1..=n`.
    pub fn with_names<I, S>(names: I) -> Result<Self, PropTableError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut t = PropTable::new();
        for n in names {
            t.declare(n.as_ref())?;
        }
        Ok(t)
    }

    pub fn declare(&mut self, name: &str) -> Result<PropId, PropTableError> {
        if name == Self::FREE_NAME {
            return Err(PropTableError::Reserved(name.to_string()));
        }
        let valid = name
            .chars()
            .next()
            .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !RESERVED_WORDS.contains(&name);
        if !valid {
            return Err(PropTableError::InvalidName(name.to_string()));
        }
        if self.lookup(name).is_some() {
            return Err(PropTableError::Duplicate(name.to_string()));
        }
        self.names.push(name.to_string());
        Ok(PropId((self.names.len() - 1) as u16))
    }

    pub fn lookup(&self, name: &str) -> Option<PropId> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| PropId(i as u16))
    }

    pub fn name(&self, id: PropId) -> &str {
        &self.names[id.index()]
    }

    /// Number of propositions including the reserved one.
    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn ids(&self) -> impl Iterator<Item = PropId> {
        (0..self.names.len() as u16).map(PropId)
    }

    pub fn declared(&self) -> impl Iterator<Item = PropId> {
        (1..self.names.len() as u16).map(PropId)
    }
}

impl Default for PropTable {
    fn default() -> Self {
        PropTable::new()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(PropId),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
}

impl Formula {
    pub fn atom(p: u16) -> Formula {
        Formula::Atom(PropId(p))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Next(a) | Formula::Eventually(a) => vec![a],
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Until(a, b) => vec![a, b],
        }
    }

    /// Height of the syntax tree; atoms and constants have depth 1.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn props(&self) -> BTreeSet<PropId> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<PropId>) {
        if let Formula::Atom(p) = self {
            out.insert(*p);
        }
        for c in self.children() {
            c.collect_props(out);
        }
    }

    pub fn mentions(&self, p: PropId) -> bool {
        match self {
            Formula::Atom(q) => *q == p,
            _ => self.children().iter().any(|c| c.mentions(p)),
        }
    }

    /// True iff negation only wraps atoms.
    pub fn is_pnf(&self) -> bool {
        match self {
            Formula::Not(a) => matches!(**a, Formula::Atom(_)),
            _ => self.children().iter().all(|c| c.is_pnf()),
        }
    }

    /// Renders the formula in the ASCII grammar with names from `props`.
    pub fn display<'a>(&'a self, props: &'a PropTable) -> impl fmt::Display + 'a {
        Printer {
            f: self,
            props: Some(props),
        }
    }
}

/// Falls back to `p<id>` names.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Printer {
            f: self,
            props: None,
        }
        .fmt(f)
    }
}

struct Printer<'a> {
    f: &'a Formula,
    props: Option<&'a PropTable>,
}

// Binding strength: higher binds tighter.
const PREC_OR: u8 = 1;
const PREC_AND: u8 = 2;
const PREC_UNTIL: u8 = 3;
const PREC_UNARY: u8 = 4;
const PREC_ATOM: u8 = 5;

fn prec(f: &Formula) -> u8 {
    match f {
        Formula::Or(..) => PREC_OR,
        Formula::And(..) => PREC_AND,
        Formula::Until(..) => PREC_UNTIL,
        Formula::Not(_) | Formula::Next(_) | Formula::Eventually(_) => PREC_UNARY,
        _ => PREC_ATOM,
    }
}

impl Printer<'_> {
    fn name(&self, p: PropId, out: &mut String) {
        match self.props {
            Some(t) if p.index() < t.len() => out.push_str(t.name(p)),
            _ => {
                out.push('p');
                out.push_str(&p.0.to_string());
            }
        }
    }

    fn write(&self, f: &Formula, out: &mut String) {
        match f {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Atom(p) => self.name(*p, out),
            Formula::Not(a) => {
                out.push('!');
                self.operand(a, PREC_UNARY, out);
            }
            Formula::Next(a) | Formula::Eventually(a) => {
                out.push(if matches!(f, Formula::Next(_)) {
                    'X'
                } else {
                    'F'
                });
                if prec(a) >= PREC_UNARY {
                    out.push(' ');
                }
                self.operand(a, PREC_UNARY, out);
            }
            // & and | associate to the left, U to the right.
            Formula::And(a, b) | Formula::Or(a, b) => {
                let (p, sym) = if matches!(f, Formula::And(..)) {
                    (PREC_AND, " & ")
                } else {
                    (PREC_OR, " | ")
                };
                self.operand(a, p, out);
                out.push_str(sym);
                self.operand(b, p + 1, out);
            }
            Formula::Until(a, b) => {
                self.operand(a, PREC_UNTIL + 1, out);
                out.push_str(" U ");
                self.operand(b, PREC_UNTIL, out);
            }
        }
    }

    fn operand(&self, f: &Formula, min_prec: u8, out: &mut String) {
        if prec(f) < min_prec {
            out.push('(');
            self.write(f, out);
            out.push(')');
        } else {
            self.write(f, out);
        }
    }
}

impl fmt::Display for Printer<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        self.write(self.f, &mut s);
        f.write_str(&s)
    }
}
