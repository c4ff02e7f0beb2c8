//! CKY charts and the constant-time derivation oracle they provide.
//!
//! A [`Chart`] maps every span `(i, j)`, `1 <= i <= j <= N`, to the set of
//! nonterminals deriving `w_i^j`. Each cell is a fixed-width bit row over
//! nonterminal ids, so a membership query is one word load and a mask.

use std::collections::HashMap;

use thiserror::Error;

use crate::grammar::{Grammar, NonterminalId, Symbol, TerminalId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("grammar is not in Chomsky normal form")]
    NotCnf,
    #[error("input string is empty")]
    EmptyInput,
    #[error("terminal {terminal} at position {position} is not in the grammar's alphabet")]
    UnknownTerminal { position: usize, terminal: TerminalId },
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("span [{i}, {j}] is out of range for a chart over {len} positions")]
pub struct SpanOutOfRange {
    pub i: usize,
    pub j: usize,
    pub len: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleAnswer {
    Yes,
    No,
}

impl OracleAnswer {
    pub fn is_yes(self) -> bool {
        self == OracleAnswer::Yes
    }
}

/// Triangular table of nonterminal sets over the spans of a string.
#[derive(Clone, PartialEq, Eq)]
pub struct Chart {
    len: usize,
    nonterminals: usize,
    words: usize,
    cells: Vec<u64>,
}

impl std::fmt::Debug for Chart {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Chart")
            .field("len", &self.len)
            .field("nonterminals", &self.nonterminals)
            .finish()
    }
}

impl Chart {
    pub fn empty(len: usize, nonterminals: usize) -> Chart {
        let words = nonterminals.div_ceil(64).max(1);
        Chart {
            len,
            nonterminals,
            words,
            cells: vec![0; len * len * words],
        }
    }

    /// Number of string positions `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of nonterminal ids a cell can hold.
    pub fn nonterminals(&self) -> usize {
        self.nonterminals
    }

    #[inline]
    fn offset(&self, s: usize, e: usize) -> usize {
        (s * self.len + e) * self.words
    }

    /// Word index and bit of `(a, i, j)` inside [`Chart::raw_words`], or
    /// `None` if the span is out of range or `a` is beyond the chart's width.
    #[inline]
    pub fn locate(&self, a: NonterminalId, i: usize, j: usize) -> Option<(usize, u32)> {
        if i < 1 || i > j || j > self.len || a.index() >= self.nonterminals {
            return None;
        }
        Some((self.offset(i - 1, j - 1) + a.index() / 64, (a.index() % 64) as u32))
    }

    pub fn raw_words(&self) -> &[u64] {
        &self.cells
    }

    /// Whether `a` is in cell `(i, j)`; false for out-of-range queries.
    #[inline]
    pub fn contains(&self, a: NonterminalId, i: usize, j: usize) -> bool {
        match self.locate(a, i, j) {
            Some((word, bit)) => self.cells[word] >> bit & 1 == 1,
            None => false,
        }
    }

    pub fn insert(&mut self, a: NonterminalId, i: usize, j: usize) {
        let (word, bit) = self.locate(a, i, j).expect("chart insert out of range");
        self.cells[word] |= 1 << bit;
    }

    #[inline]
    pub(crate) fn cell_words(&self, s: usize, e: usize) -> &[u64] {
        let o = self.offset(s, e);
        &self.cells[o..o + self.words]
    }

    #[inline]
    pub(crate) fn cell_words_mut(&mut self, s: usize, e: usize) -> &mut [u64] {
        let o = self.offset(s, e);
        &mut self.cells[o..o + self.words]
    }

    /// Members of cell `(i, j)` in id order.
    pub fn cell(&self, i: usize, j: usize) -> Vec<NonterminalId> {
        if self.locate(NonterminalId(0), i, j).is_none() {
            return Vec::new();
        }
        let mut out = Vec::new();
        for (w, &word) in self.cell_words(i - 1, j - 1).iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                out.push(NonterminalId((w * 64 + bits.trailing_zeros() as usize) as u32));
                bits &= bits - 1;
            }
        }
        out
    }

    /// Total number of `(nonterminal, span)` entries.
    pub fn entry_count(&self) -> usize {
        self.cells.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Debug text: one line `i j : NAME NAME ...` per nonempty cell, ordered
    /// by span length and then start; names sorted.
    pub fn dump(&self, g: &Grammar) -> String {
        let mut out = String::new();
        for width in 0..self.len {
            for i in 1..=self.len - width {
                let j = i + width;
                let mut names: Vec<String> = Vec::new();
                let mut members: Vec<_> = self.cell(i, j).into_iter().map(|a| (g.name(a), a)).collect();
                if members.is_empty() {
                    continue;
                }
                members.sort();
                for (name, a) in members {
                    names.push(name.map(|n| n.to_string()).unwrap_or_else(|| format!("?{}", a.0)));
                }
                out.push_str(&format!("{i} {j} : {}\n", names.join(" ")));
            }
        }
        out
    }
}

/// Answers whether `a` derives `w_i^j`, reading a single bit of the chart.
///
/// Chart membership is exact derivability, so the answer is yes for every
/// c-derivation and no for every non-derivation.
#[inline]
pub fn oracle_query(chart: &Chart, a: NonterminalId, i: usize, j: usize) -> Result<OracleAnswer, SpanOutOfRange> {
    if i < 1 || i > j || j > chart.len {
        return Err(SpanOutOfRange { i, j, len: chart.len });
    }
    Ok(if chart.contains(a, i, j) {
        OracleAnswer::Yes
    } else {
        OracleAnswer::No
    })
}

/// Anything that turns a CNF grammar and a string into a chart.
pub trait CParser {
    fn parse(&self, g: &Grammar, w: &[TerminalId]) -> Result<Chart, ParseError>;

    fn name(&self) -> &'static str;
}

/// The CKY algorithm.
#[derive(Clone, Copy, Debug, Default)]
pub struct Cky;

impl CParser for Cky {
    fn parse(&self, g: &Grammar, w: &[TerminalId]) -> Result<Chart, ParseError> {
        cky_parse(g, w)
    }

    fn name(&self) -> &'static str {
        "cky"
    }
}

/// Binary rules as `(lhs, left, right)` index triples.
pub(crate) fn binary_rules(g: &Grammar) -> Vec<(usize, usize, usize)> {
    g.productions()
        .iter()
        .filter_map(|p| match p.rhs.as_slice() {
            [Symbol::Nonterminal(y), Symbol::Nonterminal(z)] => Some((p.lhs.index(), y.index(), z.index())),
            _ => None,
        })
        .collect()
}

/// Checks the parser preconditions and returns the chart with its diagonal
/// seeded from the terminal rules.
pub(crate) fn seeded_chart(g: &Grammar, w: &[TerminalId]) -> Result<Chart, ParseError> {
    if !g.is_cnf() {
        return Err(ParseError::NotCnf);
    }
    if w.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut by_terminal: HashMap<TerminalId, Vec<NonterminalId>> = HashMap::new();
    for p in g.productions() {
        if let [Symbol::Terminal(t)] = p.rhs.as_slice() {
            by_terminal.entry(*t).or_default().push(p.lhs);
        }
    }
    let mut chart = Chart::empty(w.len(), g.nonterminal_count());
    for (pos, &t) in w.iter().enumerate() {
        if !g.has_terminal(t) {
            return Err(ParseError::UnknownTerminal {
                position: pos + 1,
                terminal: t,
            });
        }
        for &a in by_terminal.get(&t).map(Vec::as_slice).unwrap_or(&[]) {
            chart.insert(a, pos + 1, pos + 1);
        }
    }
    Ok(chart)
}

#[inline]
fn has(row: &[u64], a: usize) -> bool {
    row[a / 64] >> (a % 64) & 1 == 1
}

/// Fills the chart bottom-up by span length, testing every binary rule at
/// every split point: O(|R| N^3).
pub fn cky_parse(g: &Grammar, w: &[TerminalId]) -> Result<Chart, ParseError> {
    let mut chart = seeded_chart(g, w)?;
    let rules = binary_rules(g);
    let n = w.len();
    let mut acc = vec![0u64; chart.words];
    for len in 2..=n {
        for s in 0..=n - len {
            let e = s + len - 1;
            acc.iter_mut().for_each(|x| *x = 0);
            for k in s..e {
                let left = chart.cell_words(s, k);
                let right = chart.cell_words(k + 1, e);
                for &(x, y, z) in &rules {
                    if has(left, y) && has(right, z) {
                        acc[x / 64] |= 1 << (x % 64);
                    }
                }
            }
            chart.cell_words_mut(s, e).copy_from_slice(&acc);
        }
    }
    Ok(chart)
}

/// Marks the chart entries that sit inside some complete parse of the string.
///
/// Top-down pass from `(S, 1, N)`: whenever `X` is marked over `(i, j)` and
/// `X -> Y Z` applies with `Y` over `(i, k)` and `Z` over `(k+1, j)` in the
/// chart, both children are marked. The result is the set of `(A, i, j)` such
/// that `A` c-derives `w_i^j`.
pub fn outside_reachable(chart: &Chart, g: &Grammar) -> Chart {
    let n = chart.len;
    let mut marked = Chart::empty(n, chart.nonterminals);
    if n == 0 || !chart.contains(g.start(), 1, n) {
        return marked;
    }
    marked.insert(g.start(), 1, n);
    let mut by_lhs: Vec<Vec<(usize, usize)>> = vec![Vec::new(); chart.nonterminals];
    for (x, y, z) in binary_rules(g) {
        if x < by_lhs.len() {
            by_lhs[x].push((y, z));
        }
    }
    for len in (2..=n).rev() {
        for s in 0..=n - len {
            let e = s + len - 1;
            let here: Vec<usize> = marked
                .cell(s + 1, e + 1)
                .into_iter()
                .map(NonterminalId::index)
                .collect();
            for x in here {
                for &(y, z) in &by_lhs[x] {
                    for k in s..e {
                        if has(chart.cell_words(s, k), y) && has(chart.cell_words(k + 1, e), z) {
                            marked.cell_words_mut(s, k)[y / 64] |= 1 << (y % 64);
                            marked.cell_words_mut(k + 1, e)[z / 64] |= 1 << (z % 64);
                        }
                    }
                }
            }
        }
    }
    marked
}
