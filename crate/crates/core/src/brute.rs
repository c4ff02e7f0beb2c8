//! Exhaustive derivation oracles for small instances.
//!
//! These work on any epsilon-free, unit-free grammar with right-hand sides of
//! arbitrary length (raw or CNF) and share no code with the chart parser, so
//! they serve as ground truth for it. Positions are 1-based and spans are
//! inclusive, matching the substring notation `w_i^j`.

use thiserror::Error;

use crate::grammar::{Grammar, NonterminalId, Symbol, TerminalId};

/// Longest string the exhaustive oracles accept.
pub const MAX_BRUTE_LEN: usize = 40;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BruteError {
    #[error("string of length {0} exceeds the exhaustive-search cap of {MAX_BRUTE_LEN}")]
    TooLong(usize),
    #[error("span [{i}, {j}] is out of bounds for a string of length {len}")]
    SpanOutOfBounds { i: usize, j: usize, len: usize },
    #[error("unknown nonterminal {0:?}")]
    UnknownNonterminal(NonterminalId),
    #[error("production `{0}` is an epsilon or unit production")]
    Unsupported(String),
}

const UNKNOWN: u8 = 0;
const NO: u8 = 1;
const YES: u8 = 2;

/// Memoized derivation search for one grammar and one string.
pub struct BruteForce<'a> {
    g: &'a Grammar,
    w: &'a [TerminalId],
    by_lhs: Vec<Vec<usize>>,
    derives_memo: Vec<u8>,
}

impl<'a> BruteForce<'a> {
    pub fn new(g: &'a Grammar, w: &'a [TerminalId]) -> Result<Self, BruteError> {
        if w.len() > MAX_BRUTE_LEN {
            return Err(BruteError::TooLong(w.len()));
        }
        let v = g.nonterminal_count();
        let mut by_lhs = vec![Vec::new(); v];
        for (k, p) in g.productions().iter().enumerate() {
            if p.rhs.is_empty() || matches!(p.rhs.as_slice(), [Symbol::Nonterminal(_)]) {
                return Err(BruteError::Unsupported(g.render_production(p)));
            }
            if let Some(list) = by_lhs.get_mut(p.lhs.index()) {
                list.push(k);
            }
        }
        let n = w.len();
        Ok(BruteForce {
            g,
            w,
            by_lhs,
            derives_memo: vec![UNKNOWN; v * n * n],
        })
    }

    fn check(&self, a: NonterminalId, i: usize, j: usize) -> Result<(), BruteError> {
        if a.index() >= self.g.nonterminal_count() {
            return Err(BruteError::UnknownNonterminal(a));
        }
        if i < 1 || i > j || j > self.w.len() {
            return Err(BruteError::SpanOutOfBounds {
                i,
                j,
                len: self.w.len(),
            });
        }
        Ok(())
    }

    /// `a ⇒* w_i^j`.
    pub fn derives(&mut self, a: NonterminalId, i: usize, j: usize) -> Result<bool, BruteError> {
        self.check(a, i, j)?;
        Ok(self.nt_derives(a, i - 1, j - 1))
    }

    /// `a ⇒* w_i^j` and `S ⇒* w_1^{i-1} a w_{j+1}^N`.
    pub fn cderives(&mut self, a: NonterminalId, i: usize, j: usize) -> Result<bool, BruteError> {
        if !self.derives(a, i, j)? {
            return Ok(false);
        }
        let n = self.w.len();
        let mut ctx = ContextSearch {
            target: a,
            lo: i - 1,
            hi: j - 1,
            memo: vec![UNKNOWN; self.g.nonterminal_count() * n * n],
        };
        Ok(ctx.reaches(self, self.g.start(), 0, n - 1))
    }

    fn slot(&self, a: NonterminalId, s: usize, e: usize) -> usize {
        let n = self.w.len();
        (a.index() * n + s) * n + e
    }

    fn nt_derives(&mut self, a: NonterminalId, s: usize, e: usize) -> bool {
        let slot = self.slot(a, s, e);
        match self.derives_memo[slot] {
            YES => return true,
            NO => return false,
            _ => {}
        }
        let g = self.g;
        let mut found = false;
        for idx in 0..self.by_lhs[a.index()].len() {
            let k = self.by_lhs[a.index()][idx];
            if self.seq_derives(&g.productions()[k].rhs, s, e) {
                found = true;
                break;
            }
        }
        self.derives_memo[slot] = if found { YES } else { NO };
        found
    }

    fn sym_derives(&mut self, sym: Symbol, s: usize, e: usize) -> bool {
        match sym {
            Symbol::Terminal(t) => s == e && self.w[s] == t,
            Symbol::Nonterminal(a) => self.nt_derives(a, s, e),
        }
    }

    /// Whether the symbol sequence `rhs` derives `w[s..=e]`, every symbol
    /// covering at least one position.
    fn seq_derives(&mut self, rhs: &[Symbol], s: usize, e: usize) -> bool {
        match rhs {
            [] => false,
            [only] => self.sym_derives(*only, s, e),
            [first, rest @ ..] => {
                let room = rest.len();
                if e - s + 1 < rhs.len() {
                    return false;
                }
                (s..=e - room).any(|k| self.sym_derives(*first, s, k) && self.seq_derives(rest, k + 1, e))
            }
        }
    }
}

/// Search for sentential forms `w[s..lo) target w(hi..=e]` derivable from a
/// nonterminal. Memoized per `(nonterminal, s, e)` for one fixed target.
struct ContextSearch {
    target: NonterminalId,
    lo: usize,
    hi: usize,
    memo: Vec<u8>,
}

impl ContextSearch {
    fn reaches(&mut self, bf: &mut BruteForce<'_>, x: NonterminalId, s: usize, e: usize) -> bool {
        if x == self.target && s == self.lo && e == self.hi {
            return true;
        }
        let slot = bf.slot(x, s, e);
        match self.memo[slot] {
            YES => return true,
            NO => return false,
            _ => {}
        }
        let g = bf.g;
        let mut found = false;
        'rules: for idx in 0..bf.by_lhs[x.index()].len() {
            let k = bf.by_lhs[x.index()][idx];
            let rhs = &g.productions()[k].rhs;
            for pieces in compositions(s, e, rhs.len()) {
                for (pos, &(ps, pe)) in pieces.iter().enumerate() {
                    let Symbol::Nonterminal(y) = rhs[pos] else { continue };
                    if ps > self.lo || pe < self.hi {
                        continue;
                    }
                    let others = pieces
                        .iter()
                        .enumerate()
                        .filter(|&(q, _)| q != pos)
                        .all(|(q, &(qs, qe))| bf.sym_derives(rhs[q], qs, qe));
                    if others && self.reaches(bf, y, ps, pe) {
                        found = true;
                        break 'rules;
                    }
                }
            }
        }
        self.memo[slot] = if found { YES } else { NO };
        found
    }
}

/// All ways to cut `[s, e]` into `parts` consecutive nonempty pieces.
fn compositions(s: usize, e: usize, parts: usize) -> Vec<Vec<(usize, usize)>> {
    if parts == 0 || e + 1 - s < parts {
        return Vec::new();
    }
    if parts == 1 {
        return vec![vec![(s, e)]];
    }
    let mut out = Vec::new();
    for k in s..=e + 1 - parts {
        for mut rest in compositions(k + 1, e, parts - 1) {
            rest.insert(0, (s, k));
            out.push(rest);
        }
    }
    out
}

/// `a ⇒* w_i^j` by exhaustive memoized search.
pub fn derives_bruteforce(
    g: &Grammar,
    a: NonterminalId,
    w: &[TerminalId],
    i: usize,
    j: usize,
) -> Result<bool, BruteError> {
    BruteForce::new(g, w)?.derives(a, i, j)
}

/// Whether `a` c-derives `w_i^j`: it derives the substring and the start
/// symbol derives `w_1^{i-1} a w_{j+1}^N`.
pub fn cderives_bruteforce(
    g: &Grammar,
    a: NonterminalId,
    i: usize,
    j: usize,
    w: &[TerminalId],
) -> Result<bool, BruteError> {
    BruteForce::new(g, w)?.cderives(a, i, j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grammar::NonterminalName;

    fn word(ids: &[u32]) -> Vec<TerminalId> {
        ids.iter().map(|&t| TerminalId(t)).collect()
    }

    fn nt(g: &Grammar, s: &str) -> NonterminalId {
        g.id(s.parse().unwrap()).unwrap()
    }

    #[test]
    fn single_rule() {
        let g = Grammar::parse_dump("S -> w1\n").unwrap();
        assert!(derives_bruteforce(&g, g.start(), &word(&[1]), 1, 1).unwrap());
        assert!(!derives_bruteforce(&g, g.start(), &word(&[2]), 1, 1).unwrap());
        assert!(cderives_bruteforce(&g, g.start(), 1, 1, &word(&[1])).unwrap());
    }

    #[test]
    fn cderives_needs_context() {
        // S -> A B, A -> a, B -> b with a = w1, b = w2
        let g = Grammar::parse_dump("S -> N[0] N[1]\nN[0] -> w1\nN[1] -> w2\n").unwrap();
        let w = word(&[1, 2]);
        let a = nt(&g, "N[0]");
        assert!(cderives_bruteforce(&g, a, 1, 1, &w).unwrap());
        assert!(!cderives_bruteforce(&g, a, 2, 2, &w).unwrap());
    }

    #[test]
    fn derivable_but_not_consistent() {
        // S -> A B, A -> a, A -> b, B -> b
        let g = Grammar::parse_dump("S -> N[0] N[1]\nN[0] -> w1\nN[0] -> w2\nN[1] -> w2\n").unwrap();
        let w = word(&[1, 2]);
        let a = nt(&g, "N[0]");
        assert!(derives_bruteforce(&g, a, &w, 2, 2).unwrap());
        assert!(!cderives_bruteforce(&g, a, 2, 2, &w).unwrap());
        assert!(cderives_bruteforce(&g, a, 1, 1, &w).unwrap());
        assert!(cderives_bruteforce(&g, g.start(), 1, 2, &w).unwrap());
    }

    #[test]
    fn ternary_rules_and_deep_context() {
        let g = Grammar::parse_dump("S -> W C[0,0] W\nC[0,0] -> w2 W w4\nW -> w1 W\nW -> w1\nW -> w2 W\nW -> w2\nW -> w3 W\nW -> w3\nW -> w4 W\nW -> w4\nW -> w5 W\nW -> w5\n").unwrap();
        let w = word(&[1, 2, 3, 4, 5]);
        let c = g.id(NonterminalName::c(0, 0)).unwrap();
        assert!(cderives_bruteforce(&g, c, 2, 4, &w).unwrap());
        assert!(!cderives_bruteforce(&g, c, 1, 4, &w).unwrap());
        let wnt = g.id(NonterminalName::W).unwrap();
        assert!(cderives_bruteforce(&g, wnt, 1, 1, &w).unwrap());
        assert!(cderives_bruteforce(&g, wnt, 3, 3, &w).unwrap());
        // W over w3..w5 derives but no parse puts W there with C over 2..4
        assert!(derives_bruteforce(&g, wnt, &w, 3, 5).unwrap());
        assert!(!cderives_bruteforce(&g, wnt, 3, 5, &w).unwrap());
    }

    #[test]
    fn errors() {
        let g = Grammar::parse_dump("S -> w1\n").unwrap();
        let long = vec![TerminalId(1); MAX_BRUTE_LEN + 1];
        assert_eq!(
            derives_bruteforce(&g, g.start(), &long, 1, 1).unwrap_err(),
            BruteError::TooLong(41)
        );
        assert!(matches!(
            derives_bruteforce(&g, g.start(), &word(&[1]), 1, 2),
            Err(BruteError::SpanOutOfBounds { .. })
        ));
        assert!(matches!(
            derives_bruteforce(&g, g.start(), &word(&[1]), 0, 1),
            Err(BruteError::SpanOutOfBounds { .. })
        ));
        assert!(matches!(
            derives_bruteforce(&g, NonterminalId(5), &word(&[1]), 1, 1),
            Err(BruteError::UnknownNonterminal(_))
        ));
        let unit = Grammar::parse_dump("S -> N[0]\nN[0] -> w1\n").unwrap();
        assert!(matches!(
            BruteForce::new(&unit, &word(&[1])),
            Err(BruteError::Unsupported(_))
        ));
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(0, 4, 1).len(), 1);
        assert_eq!(compositions(0, 4, 2).len(), 4);
        assert_eq!(compositions(0, 4, 3).len(), 6);
        assert!(compositions(0, 1, 3).is_empty());
    }
}
