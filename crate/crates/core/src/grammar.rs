//! Context-free grammars with structured nonterminal identities.
//!
//! A [`Grammar`] is the usual 4-tuple: a terminal alphabet, a set of
//! nonterminals, a list of productions and a start symbol. Nonterminals are
//! identified densely by [`NonterminalId`] in registration order; each one
//! also carries a [`NonterminalName`] (a tag plus up to two indices) so the
//! reduction can look up families like `C[p,q]` in constant time and dumps
//! are deterministic.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A terminal symbol `w<id>`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TerminalId(pub u32);

/// Dense index of a nonterminal inside one grammar.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonterminalId(pub u32);

impl NonterminalId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for TerminalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "w{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symbol {
    Terminal(TerminalId),
    Nonterminal(NonterminalId),
}

impl Symbol {
    pub fn as_nonterminal(self) -> Option<NonterminalId> {
        match self {
            Symbol::Nonterminal(n) => Some(n),
            Symbol::Terminal(_) => None,
        }
    }

    pub fn as_terminal(self) -> Option<TerminalId> {
        match self {
            Symbol::Terminal(t) => Some(t),
            Symbol::Nonterminal(_) => None,
        }
    }
}

/// Family tag of a nonterminal.
///
/// `S`, `W`, `A`, `B` and `C` are the reduction's families; `T`, `U` and
/// `Sprime` are introduced by CNF conversion. `N` names nonterminals of
/// hand-written or generated grammars and `H` names generic pair helpers
/// introduced when binarizing rules outside the reduction's shapes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tag {
    S,
    Sprime,
    W,
    A,
    B,
    C,
    T,
    U,
    N,
    H,
}

impl Tag {
    /// Number of indices the tag carries.
    pub fn arity(self) -> usize {
        match self {
            Tag::S | Tag::Sprime | Tag::W => 0,
            Tag::T | Tag::U | Tag::N | Tag::H => 1,
            Tag::A | Tag::B | Tag::C => 2,
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            Tag::S => "S",
            Tag::Sprime => "S'",
            Tag::W => "W",
            Tag::A => "A",
            Tag::B => "B",
            Tag::C => "C",
            Tag::T => "T",
            Tag::U => "U",
            Tag::N => "N",
            Tag::H => "H",
        }
    }

    fn from_str(s: &str) -> Option<Tag> {
        Some(match s {
            "S" => Tag::S,
            "S'" => Tag::Sprime,
            "W" => Tag::W,
            "A" => Tag::A,
            "B" => Tag::B,
            "C" => Tag::C,
            "T" => Tag::T,
            "U" => Tag::U,
            "N" => Tag::N,
            "H" => Tag::H,
            _ => return None,
        })
    }
}

/// Structured identity of a nonterminal: a tag with zero, one or two indices.
///
/// Ordering is lexicographic on `(tag, p, q)`, which is the order used by
/// grammar dumps.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NonterminalName {
    tag: Tag,
    p: Option<u32>,
    q: Option<u32>,
}

impl NonterminalName {
    pub const START: NonterminalName = NonterminalName {
        tag: Tag::S,
        p: None,
        q: None,
    };
    pub const START_PRIME: NonterminalName = NonterminalName {
        tag: Tag::Sprime,
        p: None,
        q: None,
    };
    pub const W: NonterminalName = NonterminalName {
        tag: Tag::W,
        p: None,
        q: None,
    };

    pub fn pair(tag: Tag, p: u32, q: u32) -> NonterminalName {
        assert_eq!(tag.arity(), 2, "tag {tag:?} does not take two indices");
        NonterminalName {
            tag,
            p: Some(p),
            q: Some(q),
        }
    }

    pub fn single(tag: Tag, p: u32) -> NonterminalName {
        assert_eq!(tag.arity(), 1, "tag {tag:?} does not take one index");
        NonterminalName {
            tag,
            p: Some(p),
            q: None,
        }
    }

    pub fn a(p: u32, q: u32) -> NonterminalName {
        Self::pair(Tag::A, p, q)
    }

    pub fn b(p: u32, q: u32) -> NonterminalName {
        Self::pair(Tag::B, p, q)
    }

    pub fn c(p: u32, q: u32) -> NonterminalName {
        Self::pair(Tag::C, p, q)
    }

    /// Terminal wrapper `T[l] -> w_l`.
    pub fn wrapper(terminal: TerminalId) -> NonterminalName {
        Self::single(Tag::T, terminal.0)
    }

    /// Shared suffix helper `U[b] -> W T[b]`.
    pub fn suffix(terminal: TerminalId) -> NonterminalName {
        Self::single(Tag::U, terminal.0)
    }

    pub fn generic(k: u32) -> NonterminalName {
        Self::single(Tag::N, k)
    }

    pub fn helper(k: u32) -> NonterminalName {
        Self::single(Tag::H, k)
    }

    pub fn tag(&self) -> Tag {
        self.tag
    }

    pub fn p(&self) -> Option<u32> {
        self.p
    }

    pub fn q(&self) -> Option<u32> {
        self.q
    }

    /// True for nonterminals that only exist because of CNF conversion.
    pub fn is_cnf_helper(&self) -> bool {
        matches!(self.tag, Tag::T | Tag::U | Tag::Sprime | Tag::H)
    }
}

impl fmt::Display for NonterminalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag.as_str())?;
        match (self.p, self.q) {
            (Some(p), Some(q)) => write!(f, "[{p},{q}]"),
            (Some(p), None) => write!(f, "[{p}]"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("malformed nonterminal name `{0}`")]
pub struct NameParseError(pub String);

impl FromStr for NonterminalName {
    type Err = NameParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || NameParseError(s.to_string());
        let (tag_str, indices) = match s.find('[') {
            Some(open) => {
                let inner = s[open + 1..].strip_suffix(']').ok_or_else(err)?;
                let parsed = inner
                    .split(',')
                    .map(|part| part.trim().parse::<u32>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|_| err())?;
                (&s[..open], parsed)
            }
            None => (s, Vec::new()),
        };
        let tag = Tag::from_str(tag_str).ok_or_else(err)?;
        if tag.arity() != indices.len() {
            return Err(err());
        }
        Ok(NonterminalName {
            tag,
            p: indices.first().copied(),
            q: indices.get(1).copied(),
        })
    }
}

/// `lhs -> rhs`, with `rhs` of one to three symbols in a valid grammar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Production {
    pub lhs: NonterminalId,
    pub rhs: Vec<Symbol>,
}

impl Production {
    pub fn new(lhs: NonterminalId, rhs: Vec<Symbol>) -> Production {
        Production { lhs, rhs }
    }

    /// Exactly one terminal, or exactly two nonterminals.
    pub fn is_cnf(&self) -> bool {
        matches!(
            self.rhs.as_slice(),
            [Symbol::Terminal(_)] | [Symbol::Nonterminal(_), Symbol::Nonterminal(_)]
        )
    }

    /// `size` contribution: rhs length plus one for the lhs.
    pub fn size(&self) -> usize {
        self.rhs.len() + 1
    }
}

/// One broken grammar invariant.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("start symbol {0:?} is not a registered nonterminal")]
    StartUnregistered(NonterminalId),
    #[error("production #{production} is an epsilon-production")]
    EpsilonProduction { production: usize },
    #[error("production #{production} has {len} right-hand symbols (at most 3 allowed)")]
    RhsTooLong { production: usize, len: usize },
    #[error("production #{production} has unregistered lhs {lhs:?}")]
    UnregisteredLhs { production: usize, lhs: NonterminalId },
    #[error("production #{production} references unregistered nonterminal {symbol:?}")]
    UnregisteredNonterminal { production: usize, symbol: NonterminalId },
    #[error("production #{production} references unregistered terminal {symbol}")]
    UnregisteredTerminal { production: usize, symbol: TerminalId },
    #[error("production #{production} is not in Chomsky normal form")]
    NotCnf { production: usize },
    #[error("nonterminal name {name} is registered more than once")]
    DuplicateName { name: NonterminalName },
}

/// An immutable context-free grammar.
#[derive(Clone, Debug)]
pub struct Grammar {
    terminals: BTreeSet<TerminalId>,
    names: Vec<NonterminalName>,
    lookup: HashMap<NonterminalName, NonterminalId>,
    productions: Vec<Production>,
    start: NonterminalId,
    cnf: bool,
}

impl Grammar {
    /// Assembles a grammar without checking any invariant.
    ///
    /// Use [`validate_grammar`] on the result; the builder is the normal way
    /// to construct grammars.
    pub fn from_parts(
        terminals: impl IntoIterator<Item = TerminalId>,
        names: Vec<NonterminalName>,
        productions: Vec<Production>,
        start: NonterminalId,
        cnf: bool,
    ) -> Grammar {
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            lookup.entry(*name).or_insert(NonterminalId(i as u32));
        }
        Grammar {
            terminals: terminals.into_iter().collect(),
            names,
            lookup,
            productions,
            start,
            cnf,
        }
    }

    pub fn terminals(&self) -> &BTreeSet<TerminalId> {
        &self.terminals
    }

    pub fn productions(&self) -> &[Production] {
        &self.productions
    }

    pub fn start(&self) -> NonterminalId {
        self.start
    }

    pub fn is_cnf(&self) -> bool {
        self.cnf
    }

    pub fn nonterminal_count(&self) -> usize {
        self.names.len()
    }

    pub fn nonterminals(&self) -> impl Iterator<Item = (NonterminalId, NonterminalName)> + '_ {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (NonterminalId(i as u32), *n))
    }

    pub fn name(&self, id: NonterminalId) -> Option<NonterminalName> {
        self.names.get(id.index()).copied()
    }

    pub fn id(&self, name: NonterminalName) -> Option<NonterminalId> {
        self.lookup.get(&name).copied()
    }

    pub fn has_terminal(&self, t: TerminalId) -> bool {
        self.terminals.contains(&t)
    }

    /// Sum over productions of rhs length plus one.
    pub fn size(&self) -> usize {
        self.productions.iter().map(Production::size).sum()
    }

    /// Copy of this grammar keeping only the productions accepted by `keep`.
    /// The CNF flag is carried over since removing productions cannot break it.
    pub fn filtered(&self, mut keep: impl FnMut(&Grammar, &Production) -> bool) -> Grammar {
        let productions = self.productions.iter().filter(|p| keep(self, p)).cloned().collect();
        Grammar {
            productions,
            ..self.clone()
        }
    }

    fn render_symbol(&self, s: Symbol) -> String {
        match s {
            Symbol::Terminal(t) => t.to_string(),
            Symbol::Nonterminal(n) => match self.name(n) {
                Some(name) => name.to_string(),
                None => format!("?{}", n.0),
            },
        }
    }

    pub fn render_production(&self, p: &Production) -> String {
        let mut line = self.render_symbol(Symbol::Nonterminal(p.lhs));
        line.push_str(" ->");
        for s in &p.rhs {
            line.push(' ');
            line.push_str(&self.render_symbol(*s));
        }
        line
    }

    /// Productions one per line, `LHS -> SYM [SYM [SYM]]`, sorted by
    /// `(lhs name, rhs)` so the output is independent of registration order.
    pub fn dump(&self) -> String {
        let mut keyed: Vec<_> = self
            .productions
            .iter()
            .map(|p| {
                let key = (
                    self.name(p.lhs),
                    p.rhs.iter().map(|s| self.sort_key(*s)).collect::<Vec<_>>(),
                );
                (key, p)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out = String::new();
        for (_, p) in keyed {
            out.push_str(&self.render_production(p));
            out.push('\n');
        }
        out
    }

    fn sort_key(&self, s: Symbol) -> SymbolKey {
        match s {
            Symbol::Nonterminal(n) => SymbolKey::Nonterminal(self.name(n)),
            Symbol::Terminal(t) => SymbolKey::Terminal(t),
        }
    }

    /// Parses the dump format back into a grammar.
    ///
    /// Blank lines and lines starting with `#` or `STRING:` are skipped.
    /// Every nonterminal and terminal mentioned is registered; the start
    /// symbol is `S`. The CNF flag is set when every production has CNF shape.
    pub fn parse_dump(text: &str) -> Result<Grammar, DumpParseError> {
        let mut builder = GrammarBuilder::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("STRING:") {
                continue;
            }
            let err = |message: String| DumpParseError {
                line: lineno + 1,
                message,
            };
            let (lhs, rhs) = line.split_once("->").ok_or_else(|| err("missing `->`".into()))?;
            let lhs_name: NonterminalName = lhs.trim().parse().map_err(|e: NameParseError| err(e.to_string()))?;
            let lhs_id = builder.nonterminal(lhs_name);
            let mut symbols = Vec::new();
            for tok in rhs.split_whitespace() {
                let sym = match tok.strip_prefix('w').map(str::parse::<u32>) {
                    Some(Ok(t)) => Symbol::Terminal(TerminalId(t)),
                    _ => {
                        let name: NonterminalName = tok.parse().map_err(|e: NameParseError| err(e.to_string()))?;
                        Symbol::Nonterminal(builder.nonterminal(name))
                    }
                };
                symbols.push(sym);
            }
            if symbols.is_empty() {
                return Err(err("empty right-hand side".into()));
            }
            builder.rule(lhs_id, symbols);
        }
        let mut grammar = builder.build();
        grammar.cnf = grammar.productions.iter().all(Production::is_cnf);
        Ok(grammar)
    }
}

#[derive(PartialEq, Eq, PartialOrd, Ord)]
enum SymbolKey {
    Nonterminal(Option<NonterminalName>),
    Terminal(TerminalId),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("line {line}: {message}")]
pub struct DumpParseError {
    pub line: usize,
    pub message: String,
}

/// Incremental grammar construction.
///
/// The start symbol `S` is always registered first and therefore has id 0.
#[derive(Debug, Clone)]
pub struct GrammarBuilder {
    terminals: BTreeSet<TerminalId>,
    names: Vec<NonterminalName>,
    lookup: HashMap<NonterminalName, NonterminalId>,
    productions: Vec<Production>,
}

impl Default for GrammarBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl GrammarBuilder {
    pub fn new() -> GrammarBuilder {
        let mut b = GrammarBuilder {
            terminals: BTreeSet::new(),
            names: Vec::new(),
            lookup: HashMap::new(),
            productions: Vec::new(),
        };
        b.nonterminal(NonterminalName::START);
        b
    }

    pub fn start(&self) -> NonterminalId {
        NonterminalId(0)
    }

    /// Registers `name` if needed and returns its id.
    pub fn nonterminal(&mut self, name: NonterminalName) -> NonterminalId {
        if let Some(&id) = self.lookup.get(&name) {
            return id;
        }
        let id = NonterminalId(self.names.len() as u32);
        self.names.push(name);
        self.lookup.insert(name, id);
        id
    }

    pub fn lookup(&self, name: NonterminalName) -> Option<NonterminalId> {
        self.lookup.get(&name).copied()
    }

    pub fn terminal(&mut self, t: TerminalId) -> Symbol {
        self.terminals.insert(t);
        Symbol::Terminal(t)
    }

    /// Adds a production; terminals on the rhs are registered implicitly.
    pub fn rule(&mut self, lhs: NonterminalId, rhs: Vec<Symbol>) {
        for s in &rhs {
            if let Symbol::Terminal(t) = s {
                self.terminals.insert(*t);
            }
        }
        self.productions.push(Production { lhs, rhs });
    }

    pub fn production_count(&self) -> usize {
        self.productions.len()
    }

    pub fn build(self) -> Grammar {
        Grammar {
            terminals: self.terminals,
            names: self.names,
            lookup: self.lookup,
            productions: self.productions,
            start: NonterminalId(0),
            cnf: false,
        }
    }

    pub(crate) fn build_cnf(self) -> Grammar {
        let mut g = self.build();
        g.cnf = true;
        g
    }
}

/// Checks every grammar invariant, returning one entry per violation.
pub fn validate_grammar(g: &Grammar) -> Vec<Violation> {
    let mut report = Vec::new();
    let registered = |n: NonterminalId| n.index() < g.names.len();
    if !registered(g.start) {
        report.push(Violation::StartUnregistered(g.start));
    }
    let mut seen = HashMap::new();
    for name in &g.names {
        if seen.insert(*name, ()).is_some() {
            report.push(Violation::DuplicateName { name: *name });
        }
    }
    for (i, p) in g.productions.iter().enumerate() {
        if !registered(p.lhs) {
            report.push(Violation::UnregisteredLhs {
                production: i,
                lhs: p.lhs,
            });
        }
        if p.rhs.is_empty() {
            report.push(Violation::EpsilonProduction { production: i });
        } else if p.rhs.len() > 3 {
            report.push(Violation::RhsTooLong {
                production: i,
                len: p.rhs.len(),
            });
        }
        for s in &p.rhs {
            match *s {
                Symbol::Nonterminal(n) if !registered(n) => report.push(Violation::UnregisteredNonterminal {
                    production: i,
                    symbol: n,
                }),
                Symbol::Terminal(t) if !g.terminals.contains(&t) => report.push(Violation::UnregisteredTerminal {
                    production: i,
                    symbol: t,
                }),
                _ => {}
            }
        }
        if g.cnf && !p.rhs.is_empty() && !p.is_cnf() {
            report.push(Violation::NotCnf { production: i });
        }
    }
    report
}
