//! Conversion to Chomsky normal form for epsilon-free, unit-free grammars.
//!
//! Original nonterminals keep their ids; helpers are registered after them.
//! The conversion is:
//!
//! * every terminal inside a rhs of length two or three is replaced by a
//!   wrapper `T[l] -> w_l`;
//! * a ternary start rule `S -> W X Y` becomes `S -> W S'` with one shared
//!   `S' -> X Y`;
//! * a ternary rule `X -> Y W T[b]` becomes `X -> Y U[b]` with one shared
//!   `U[b] -> W T[b]` per final terminal;
//! * any other ternary rule `X -> Y Z V` becomes `X -> Y H[k]` with one
//!   `H[k] -> Z V` per distinct pair `(Z, V)`.
//!
//! On the reduction grammars only the first three cases occur, so the
//! helper count is linear in the block size.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::grammar::{Grammar, GrammarBuilder, NonterminalId, NonterminalName, Production, Symbol, Tag, TerminalId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("production `{0}` is an epsilon-production")]
    Epsilon(String),
    #[error("production `{0}` is a unit production between nonterminals")]
    Unit(String),
    #[error("production `{0}` has more than three rhs symbols")]
    TooLong(String),
    #[error("grammar already uses helper name {0}")]
    HelperClash(NonterminalName),
    #[error("suffix helpers requested but the grammar has no W nonterminal")]
    MissingW,
}

/// Converts `g` to CNF.
pub fn to_cnf(g: &Grammar) -> Result<Grammar, CnfError> {
    to_cnf_reserving(g, &[])
}

/// Like [`to_cnf`], additionally registering `U[b] -> W T[b]` (and `T[b]`)
/// for every `b` in `suffixes` whether or not a rule needs it.
pub fn to_cnf_reserving(g: &Grammar, suffixes: &[TerminalId]) -> Result<Grammar, CnfError> {
    let mut conv = Converter::new(g)?;
    if !suffixes.is_empty() {
        let w = g.id(NonterminalName::W).ok_or(CnfError::MissingW)?;
        for &b in suffixes {
            conv.suffix_helper(w, b);
        }
    }
    for p in g.productions() {
        let render = || g.render_production(p);
        match p.rhs.as_slice() {
            [] => return Err(CnfError::Epsilon(render())),
            [Symbol::Nonterminal(_)] => return Err(CnfError::Unit(render())),
            [t @ Symbol::Terminal(_)] => conv.emit(p.lhs, vec![*t]),
            [x, y] => {
                let (x, y) = (conv.lift(*x), conv.lift(*y));
                conv.emit(p.lhs, vec![x, y]);
            }
            [x, y, z] => {
                let first = conv.lift(*x);
                let tail = conv.tail(p.lhs, *x, *y, *z);
                conv.emit(p.lhs, vec![first, Symbol::Nonterminal(tail)]);
            }
            _ => return Err(CnfError::TooLong(render())),
        }
    }
    Ok(conv.out.build_cnf())
}

struct Converter<'g> {
    g: &'g Grammar,
    out: GrammarBuilder,
    w: Option<NonterminalId>,
    wrappers: HashMap<TerminalId, NonterminalId>,
    suffixes: HashMap<TerminalId, NonterminalId>,
    start_tail: Option<NonterminalId>,
    pairs: HashMap<(Symbol, Symbol), NonterminalId>,
    emitted: HashSet<Production>,
}

impl<'g> Converter<'g> {
    fn new(g: &'g Grammar) -> Result<Self, CnfError> {
        let mut out = GrammarBuilder::new();
        for (id, name) in g.nonterminals() {
            if name.is_cnf_helper() {
                return Err(CnfError::HelperClash(name));
            }
            let got = out.nonterminal(name);
            debug_assert_eq!(got, id, "original ids must be preserved");
        }
        for &t in g.terminals() {
            out.terminal(t);
        }
        Ok(Converter {
            g,
            out,
            w: g.id(NonterminalName::W),
            wrappers: HashMap::new(),
            suffixes: HashMap::new(),
            start_tail: None,
            pairs: HashMap::new(),
            emitted: HashSet::new(),
        })
    }

    /// Adds a production unless an identical one was already emitted.
    fn emit(&mut self, lhs: NonterminalId, rhs: Vec<Symbol>) {
        let p = Production::new(lhs, rhs);
        if !self.emitted.contains(&p) {
            self.out.rule(p.lhs, p.rhs.clone());
            self.emitted.insert(p);
        }
    }

    fn wrapper(&mut self, t: TerminalId) -> NonterminalId {
        if let Some(&id) = self.wrappers.get(&t) {
            return id;
        }
        let id = self.out.nonterminal(NonterminalName::wrapper(t));
        self.emit(id, vec![Symbol::Terminal(t)]);
        self.wrappers.insert(t, id);
        id
    }

    fn lift(&mut self, s: Symbol) -> Symbol {
        match s {
            Symbol::Terminal(t) => Symbol::Nonterminal(self.wrapper(t)),
            nt => nt,
        }
    }

    fn suffix_helper(&mut self, w: NonterminalId, b: TerminalId) -> NonterminalId {
        if let Some(&id) = self.suffixes.get(&b) {
            return id;
        }
        let tb = self.wrapper(b);
        let id = self.out.nonterminal(NonterminalName::suffix(b));
        self.emit(id, vec![Symbol::Nonterminal(w), Symbol::Nonterminal(tb)]);
        self.suffixes.insert(b, id);
        id
    }

    /// Nonterminal standing for the last two symbols of `lhs -> x y z`.
    fn tail(&mut self, lhs: NonterminalId, x: Symbol, y: Symbol, z: Symbol) -> NonterminalId {
        let is_w = |s: Symbol| self.w.is_some() && s == Symbol::Nonterminal(self.w.unwrap());
        if lhs == self.g.start() && is_w(x) {
            let id = match self.start_tail {
                Some(id) => id,
                None => {
                    let id = self.out.nonterminal(NonterminalName::START_PRIME);
                    self.start_tail = Some(id);
                    id
                }
            };
            let (y, z) = (self.lift(y), self.lift(z));
            self.emit(id, vec![y, z]);
            return id;
        }
        if let (true, Symbol::Terminal(b)) = (is_w(y), z) {
            return self.suffix_helper(self.w.unwrap(), b);
        }
        let (y, z) = (self.lift(y), self.lift(z));
        if let Some(&id) = self.pairs.get(&(y, z)) {
            return id;
        }
        let id = self.out.nonterminal(NonterminalName::helper(self.pairs.len() as u32));
        self.emit(id, vec![y, z]);
        self.pairs.insert((y, z), id);
        id
    }
}

/// Number of CNF helper nonterminals (`T`, `U`, `S'`, `H`) in `g`.
pub fn helper_count(g: &Grammar) -> usize {
    g.nonterminals().filter(|(_, n)| n.is_cnf_helper()).count()
}

/// Number of helpers with the given tag.
pub fn helpers_with_tag(g: &Grammar, tag: Tag) -> usize {
    g.nonterminals().filter(|(_, n)| n.tag() == tag).count()
}
