//! Boolean matrix multiplication reduced to context-free parsing.
//!
//! Given `m x m` matrices `A` and `B`, let `n = ceil(m^(1/3))` and
//! `delta = n + 2`. A matrix index `i` (1-based) is split into
//! `(i1, i2) = (floor(i / n), (i mod n) + 2)`. The string is
//! `w_1 .. w_{3n+6}`, three blocks of `delta` distinct terminals, and the
//! grammar has the rule families
//!
//! ```text
//! W      -> w_l W | w_l                      for every terminal
//! A[i1,k1] -> w_{i2} W w_{k2+delta}          for every a_ik = 1
//! B[k1,j1] -> w_{k2+1+delta} W w_{j2+2delta} for every b_kj = 1
//! C[p,q] -> A[p,r] B[r,q]                    for all p, q, r in 0..=n^2
//! S      -> W C[p,q] W                       for all p, q in 0..=n^2
//! ```
//!
//! The grammar checks the first index part of `k` through the shared `r`;
//! adjacency of the `A` and `B` spans in the middle block checks the second.
//! Hence `c_ij = 1` exactly when `C[i1,j1]` derives `w_{i2} .. w_{j2+2delta}`.

use std::fmt;

use thiserror::Error;

use crate::chart::{oracle_query, CParser, Chart, ParseError};
use crate::cnf::{helper_count, to_cnf_reserving, CnfError};
use crate::grammar::{Grammar, GrammarBuilder, NonterminalId, NonterminalName, Symbol, Tag, TerminalId};
use crate::matrix::{same_dim, BoolMatrix, MatrixError};

#[derive(Debug, Error, PartialEq)]
pub enum ReductionError {
    #[error("index {i} is outside 1..={max} for block size {n}")]
    IndexOutOfRange { i: usize, n: usize, max: usize },
    #[error("encoded index ({i1}, {i2}) is outside its range for block size {n}")]
    EncodedOutOfRange { i1: usize, i2: usize, n: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

/// The pair `(floor(i / n), (i mod n) + 2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EncodedIndex {
    pub i1: usize,
    pub i2: usize,
}

/// Smallest `n` with `n^3 >= m`, i.e. `ceil(m^(1/3))`; 1 for `m <= 1`.
pub fn block_size(m: usize) -> usize {
    let mut n = (m as f64).cbrt().round().max(1.0) as usize;
    while n * n * n < m {
        n += 1;
    }
    while n > 1 && (n - 1).pow(3) >= m {
        n -= 1;
    }
    n
}

pub fn encode_index(i: usize, n: usize) -> Result<EncodedIndex, ReductionError> {
    let max = n.pow(3);
    if n == 0 || i < 1 || i > max {
        return Err(ReductionError::IndexOutOfRange { i, n, max });
    }
    Ok(EncodedIndex {
        i1: i / n,
        i2: i % n + 2,
    })
}

pub fn decode_index(e: EncodedIndex, n: usize) -> Result<usize, ReductionError> {
    let bad = || ReductionError::EncodedOutOfRange { i1: e.i1, i2: e.i2, n };
    if n == 0 || e.i1 > n * n || e.i2 < 2 || e.i2 > n + 1 {
        return Err(bad());
    }
    let i = e.i1 * n + (e.i2 - 2);
    if i < 1 || i > n.pow(3) {
        return Err(bad());
    }
    Ok(i)
}

/// The grammar and string built from one pair of matrices.
#[derive(Debug, Clone)]
pub struct ReductionInstance {
    m: usize,
    n: usize,
    delta: usize,
    pruned: bool,
    grammar: Grammar,
    cnf_grammar: Grammar,
    string: Vec<TerminalId>,
}

impl ReductionInstance {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn delta(&self) -> usize {
        self.delta
    }

    pub fn is_pruned(&self) -> bool {
        self.pruned
    }

    /// The grammar as constructed, before CNF conversion.
    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn cnf_grammar(&self) -> &Grammar {
        &self.cnf_grammar
    }

    /// `w_1 .. w_{3n+6}`.
    pub fn string(&self) -> &[TerminalId] {
        &self.string
    }

    /// Id of a nonterminal by structured name; ids agree between the raw and
    /// the CNF grammar.
    pub fn lookup(&self, name: NonterminalName) -> Option<NonterminalId> {
        self.grammar.id(name)
    }

    pub fn c_id(&self, p: usize, q: usize) -> NonterminalId {
        self.lookup(NonterminalName::c(p as u32, q as u32))
            .expect("C family covers 0..=n^2")
    }

    /// Largest family index `n^2`.
    pub fn family_max(&self) -> usize {
        self.n * self.n
    }

    /// For 1-based matrix indices: the nonterminal `C[i1,j1]` and the span
    /// `(i2, j2 + 2 delta)` whose derivability encodes `c_ij`.
    pub fn product_query(&self, i: usize, j: usize) -> Result<(NonterminalId, usize, usize), ReductionError> {
        let ei = encode_index(i, self.n)?;
        let ej = encode_index(j, self.n)?;
        Ok((self.c_id(ei.i1, ej.i1), ei.i2, ej.i2 + 2 * self.delta))
    }

    /// `# m=.. n=.. delta=..` header, sorted productions, then the string.
    pub fn dump(&self) -> String {
        self.dump_grammar(&self.grammar)
    }

    pub fn dump_cnf(&self) -> String {
        self.dump_grammar(&self.cnf_grammar)
    }

    fn dump_grammar(&self, g: &Grammar) -> String {
        let mut out = format!("# m={} n={} delta={}\n", self.m, self.n, self.delta);
        out.push_str(&g.dump());
        out.push_str("STRING:");
        for t in &self.string {
            out.push(' ');
            out.push_str(&t.to_string());
        }
        out.push('\n');
        out
    }

    pub fn stats(&self) -> InstanceStats {
        instance_stats(self)
    }
}

/// Builds the grammar and string for `a x b`.
///
/// With `prune`, C-rules whose `A` or `B` child has no productions and
/// S-rules over such `C` are left out; they cannot take part in any
/// terminal derivation.
pub fn build_instance(a: &BoolMatrix, b: &BoolMatrix, prune: bool) -> Result<ReductionInstance, ReductionError> {
    same_dim(a, b)?;
    let m = a.dim();
    if m == 0 {
        return Err(MatrixError::Empty.into());
    }
    let n = block_size(m);
    let delta = n + 2;
    let len = 3 * n + 6;
    let fam = n * n;
    let mut g = GrammarBuilder::new();
    let w_nt = g.nonterminal(NonterminalName::W);
    for tag in [Tag::A, Tag::B, Tag::C] {
        for p in 0..=fam {
            for q in 0..=fam {
                g.nonterminal(NonterminalName::pair(tag, p as u32, q as u32));
            }
        }
    }
    let term = |l: usize| Symbol::Terminal(TerminalId(l as u32));
    let string: Vec<TerminalId> = (1..=len).map(|l| TerminalId(l as u32)).collect();
    for &t in &string {
        g.terminal(t);
    }

    for l in 1..=len {
        g.rule(w_nt, vec![term(l), Symbol::Nonterminal(w_nt)]);
        g.rule(w_nt, vec![term(l)]);
    }

    let fam_id = |g: &GrammarBuilder, tag: Tag, p: usize, q: usize| {
        g.lookup(NonterminalName::pair(tag, p as u32, q as u32))
            .expect("family registered")
    };
    let side = (fam + 1) * (fam + 1);
    let mut a_used = vec![false; side];
    let mut b_used = vec![false; side];
    let enc = |i: usize| encode_index(i, n).expect("1 <= i <= m <= n^3");
    for i in 1..=m {
        let ei = enc(i);
        for k in 1..=m {
            let ek = enc(k);
            if a.get(i - 1, k - 1) {
                let lhs = fam_id(&g, Tag::A, ei.i1, ek.i1);
                g.rule(lhs, vec![term(ei.i2), Symbol::Nonterminal(w_nt), term(ek.i2 + delta)]);
                a_used[ei.i1 * (fam + 1) + ek.i1] = true;
            }
            // here i plays the role of the B row index k and k of the column j
            if b.get(i - 1, k - 1) {
                let lhs = fam_id(&g, Tag::B, ei.i1, ek.i1);
                g.rule(
                    lhs,
                    vec![
                        term(ei.i2 + 1 + delta),
                        Symbol::Nonterminal(w_nt),
                        term(ek.i2 + 2 * delta),
                    ],
                );
                b_used[ei.i1 * (fam + 1) + ek.i1] = true;
            }
        }
    }

    let mut c_used = vec![false; side];
    for p in 0..=fam {
        for q in 0..=fam {
            let c = fam_id(&g, Tag::C, p, q);
            for r in 0..=fam {
                if prune && !(a_used[p * (fam + 1) + r] && b_used[r * (fam + 1) + q]) {
                    continue;
                }
                let (an, bn) = (fam_id(&g, Tag::A, p, r), fam_id(&g, Tag::B, r, q));
                g.rule(c, vec![Symbol::Nonterminal(an), Symbol::Nonterminal(bn)]);
                c_used[p * (fam + 1) + q] = true;
            }
        }
    }
    let start = g.start();
    for p in 0..=fam {
        for q in 0..=fam {
            if prune && !c_used[p * (fam + 1) + q] {
                continue;
            }
            let c = fam_id(&g, Tag::C, p, q);
            g.rule(
                start,
                vec![
                    Symbol::Nonterminal(w_nt),
                    Symbol::Nonterminal(c),
                    Symbol::Nonterminal(w_nt),
                ],
            );
        }
    }

    let grammar = g.build();
    let suffixes: Vec<TerminalId> = (n + 4..=2 * n + 3)
        .chain(2 * n + 6..=3 * n + 5)
        .map(|l| TerminalId(l as u32))
        .collect();
    let cnf_grammar = to_cnf_reserving(&grammar, &suffixes)?;
    Ok(ReductionInstance {
        m,
        n,
        delta,
        pruned: prune,
        grammar,
        cnf_grammar,
        string,
    })
}

/// Reads `C = A x B` off a chart of the instance's CNF grammar: `c_ij` is set
/// iff the chart answers yes for `C[i1,j1]` over `(i2, j2 + 2 delta)`.
pub fn read_product(inst: &ReductionInstance, chart: &Chart) -> Result<BoolMatrix, ReductionError> {
    let m = inst.m;
    let n = inst.n;
    let enc: Vec<EncodedIndex> = (1..=m).map(|i| encode_index(i, n)).collect::<Result<_, _>>()?;
    let mut c = BoolMatrix::zeros(m);
    for (i, ei) in enc.iter().enumerate() {
        for (j, ej) in enc.iter().enumerate() {
            let nt = inst.c_id(ei.i1, ej.i1);
            let answer =
                oracle_query(chart, nt, ei.i2, ej.i2 + 2 * inst.delta).expect("product spans lie inside the string");
            if answer.is_yes() {
                c.set(i, j, true);
            }
        }
    }
    Ok(c)
}

/// Multiplies `a` and `b` by building the instance, parsing it with
/// `parser` and querying the chart once per entry.
pub fn multiply_via_parser<P: CParser + ?Sized>(
    a: &BoolMatrix,
    b: &BoolMatrix,
    parser: &P,
) -> Result<BoolMatrix, ReductionError> {
    multiply_via_parser_with(a, b, parser, false)
}

pub fn multiply_via_parser_with<P: CParser + ?Sized>(
    a: &BoolMatrix,
    b: &BoolMatrix,
    parser: &P,
    prune: bool,
) -> Result<BoolMatrix, ReductionError> {
    let inst = build_instance(a, b, prune)?;
    let chart = parser.parse(inst.cnf_grammar(), inst.string())?;
    read_product(&inst, &chart)
}

/// Sizes of one reduction instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceStats {
    pub m: usize,
    pub n: usize,
    pub delta: usize,
    pub string_length: usize,
    pub w_rules: usize,
    pub a_rules: usize,
    pub b_rules: usize,
    pub c_rules: usize,
    pub s_rules: usize,
    pub productions: usize,
    /// Sum over productions of rhs length plus one.
    pub grammar_size: usize,
    pub nonterminals: usize,
    pub cnf_productions: usize,
    pub cnf_grammar_size: usize,
    pub cnf_nonterminals: usize,
    pub cnf_helpers: usize,
}

pub fn instance_stats(inst: &ReductionInstance) -> InstanceStats {
    let g = &inst.grammar;
    let mut counts = [0usize; 5];
    for p in g.productions() {
        let slot = match g.name(p.lhs).map(|n| n.tag()) {
            Some(Tag::W) => 0,
            Some(Tag::A) => 1,
            Some(Tag::B) => 2,
            Some(Tag::C) => 3,
            Some(Tag::S) => 4,
            _ => continue,
        };
        counts[slot] += 1;
    }
    InstanceStats {
        m: inst.m,
        n: inst.n,
        delta: inst.delta,
        string_length: inst.string.len(),
        w_rules: counts[0],
        a_rules: counts[1],
        b_rules: counts[2],
        c_rules: counts[3],
        s_rules: counts[4],
        productions: g.productions().len(),
        grammar_size: g.size(),
        nonterminals: g.nonterminal_count(),
        cnf_productions: inst.cnf_grammar.productions().len(),
        cnf_grammar_size: inst.cnf_grammar.size(),
        cnf_nonterminals: inst.cnf_grammar.nonterminal_count(),
        cnf_helpers: helper_count(&inst.cnf_grammar),
    }
}

/// One `key=value` line per field.
impl fmt::Display for InstanceStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let fields = [
            ("m", self.m),
            ("n", self.n),
            ("delta", self.delta),
            ("string_length", self.string_length),
            ("w_rules", self.w_rules),
            ("a_rules", self.a_rules),
            ("b_rules", self.b_rules),
            ("c_rules", self.c_rules),
            ("s_rules", self.s_rules),
            ("productions", self.productions),
            ("grammar_size", self.grammar_size),
            ("nonterminals", self.nonterminals),
            ("cnf_productions", self.cnf_productions),
            ("cnf_grammar_size", self.cnf_grammar_size),
            ("cnf_nonterminals", self.cnf_nonterminals),
            ("cnf_helpers", self.cnf_helpers),
        ];
        for (k, v) in fields {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::Cky;
    use crate::grammar::validate_grammar;
    use crate::kernels::bmm_naive;

    #[test]
    fn encode_examples() {
        assert_eq!(encode_index(5, 2).unwrap(), EncodedIndex { i1: 2, i2: 3 });
        assert_eq!(encode_index(1, 1).unwrap(), EncodedIndex { i1: 1, i2: 2 });
        assert_eq!(encode_index(1, 2).unwrap(), EncodedIndex { i1: 0, i2: 3 });
        assert!(encode_index(0, 2).is_err());
        assert!(encode_index(9, 2).is_err());
        assert!(encode_index(1, 0).is_err());
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode_index(EncodedIndex { i1: 2, i2: 3 }, 2).unwrap(), 5);
        assert_eq!(decode_index(EncodedIndex { i1: 0, i2: 3 }, 2).unwrap(), 1);
        for i in 1..=27 {
            assert_eq!(decode_index(encode_index(i, 3).unwrap(), 3).unwrap(), i);
        }
        assert!(decode_index(EncodedIndex { i1: 0, i2: 1 }, 2).is_err());
        assert!(decode_index(EncodedIndex { i1: 0, i2: 4 }, 2).is_err());
        assert!(decode_index(EncodedIndex { i1: 5, i2: 2 }, 2).is_err());
        // in field ranges but decodes to 0 or past n^3
        assert!(decode_index(EncodedIndex { i1: 0, i2: 2 }, 2).is_err());
        assert!(decode_index(EncodedIndex { i1: 4, i2: 3 }, 2).is_err());
    }

    #[test]
    fn block_sizes() {
        let expected = [
            (1, 1),
            (2, 2),
            (8, 2),
            (9, 3),
            (27, 3),
            (28, 4),
            (64, 4),
            (125, 5),
            (216, 6),
            (217, 7),
        ];
        for (m, n) in expected {
            assert_eq!(block_size(m), n, "m={m}");
        }
    }

    #[test]
    fn m2_counts_and_a_rule() {
        let a = BoolMatrix::from_rows(&[[1, 0], [0, 0]]);
        let b = BoolMatrix::zeros(2);
        let inst = build_instance(&a, &b, false).unwrap();
        assert_eq!((inst.n(), inst.delta()), (2, 4));
        assert_eq!(inst.string().len(), 12);
        let s = inst.stats();
        assert_eq!(
            (s.w_rules, s.a_rules, s.b_rules, s.c_rules, s.s_rules),
            (24, 1, 0, 125, 25)
        );
        let dump = inst.dump();
        assert!(dump.starts_with("# m=2 n=2 delta=4\n"));
        assert!(dump.contains("\nA[0,0] -> w3 W w7\n"));
        assert!(dump.ends_with("STRING: w1 w2 w3 w4 w5 w6 w7 w8 w9 w10 w11 w12\n"));
        assert!(validate_grammar(inst.grammar()).is_empty());
        assert!(validate_grammar(inst.cnf_grammar()).is_empty());
    }

    #[test]
    fn m1_sizes() {
        let inst = build_instance(&BoolMatrix::zeros(1), &BoolMatrix::zeros(1), false).unwrap();
        let s = instance_stats(&inst);
        assert_eq!((s.n, s.delta, s.string_length), (1, 3, 9));
        assert_eq!((s.a_rules, s.b_rules), (0, 0));
        assert_eq!(s.cnf_helpers, 9 + 2 + 1);
    }

    #[test]
    fn stats_render_as_key_value_lines() {
        let inst = build_instance(&BoolMatrix::identity(2), &BoolMatrix::identity(2), false).unwrap();
        let text = inst.stats().to_string();
        assert!(text.starts_with("m=2\nn=2\ndelta=4\nstring_length=12\nw_rules=24\n"));
        assert!(text.lines().all(|l| l.split_once('=').is_some()));
    }

    #[test]
    fn identity_through_pipeline() {
        let id = BoolMatrix::identity(2);
        assert_eq!(multiply_via_parser(&id, &id, &Cky).unwrap(), id);
    }

    #[test]
    fn hand_example_through_pipeline() {
        let a = BoolMatrix::from_rows(&[[1, 1], [0, 0]]);
        let b = BoolMatrix::from_rows(&[[0, 0], [1, 0]]);
        let c = multiply_via_parser(&a, &b, &Cky).unwrap();
        assert_eq!(c, bmm_naive(&a, &b).unwrap());
        assert_eq!(c, BoolMatrix::from_rows(&[[1, 0], [0, 0]]));
    }

    #[test]
    fn pruning_drops_dead_rules_only() {
        let a = BoolMatrix::from_rows(&[[1, 0], [0, 0]]);
        let b = BoolMatrix::from_rows(&[[1, 0], [0, 0]]);
        let pruned = build_instance(&a, &b, true).unwrap();
        let s = pruned.stats();
        assert_eq!((s.c_rules, s.s_rules), (1, 1));
        assert_eq!(
            multiply_via_parser_with(&a, &b, &Cky, true).unwrap(),
            bmm_naive(&a, &b).unwrap()
        );
    }

    #[test]
    fn dimension_mismatch() {
        let err = build_instance(&BoolMatrix::zeros(2), &BoolMatrix::zeros(3), false).unwrap_err();
        assert_eq!(
            err,
            ReductionError::Matrix(MatrixError::DimensionMismatch { left: 2, right: 3 })
        );
    }
}
