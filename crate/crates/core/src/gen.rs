//! Seeded random grammars and strings for differential testing.

use crate::grammar::{Grammar, GrammarBuilder, NonterminalId, NonterminalName, Symbol, TerminalId};
use crate::rng::Xorshift64Star;

fn pick(rng: &mut Xorshift64Star, n: usize) -> usize {
    rng.range_inclusive(0, n as u64 - 1) as usize
}

fn register(nonterminals: usize) -> (GrammarBuilder, Vec<NonterminalId>) {
    let mut g = GrammarBuilder::new();
    let mut ids = vec![g.start()];
    for k in 1..nonterminals {
        ids.push(g.nonterminal(NonterminalName::generic(k as u32 - 1)));
    }
    (g, ids)
}

/// A CNF grammar over `S, N[0], ..` (`nonterminals` in total) and terminals
/// `w1 ..= w{terminals}` with `productions` distinct rules, roughly a third of
/// them terminal rules.
pub fn random_cnf_grammar(seed: u64, nonterminals: usize, terminals: usize, productions: usize) -> Grammar {
    assert!(nonterminals >= 1 && terminals >= 1);
    let mut rng = Xorshift64Star::seeded(seed);
    let (mut g, ids) = register(nonterminals);
    let mut seen = std::collections::HashSet::new();
    let capacity = nonterminals * terminals + nonterminals.pow(3);
    while g.production_count() < productions.min(capacity) {
        let lhs = ids[pick(&mut rng, ids.len())];
        let rhs = if rng.next_f64() < 0.35 {
            vec![Symbol::Terminal(TerminalId(1 + pick(&mut rng, terminals) as u32))]
        } else {
            vec![
                Symbol::Nonterminal(ids[pick(&mut rng, ids.len())]),
                Symbol::Nonterminal(ids[pick(&mut rng, ids.len())]),
            ]
        };
        if seen.insert((lhs, rhs.clone())) {
            g.rule(lhs, rhs);
        }
    }
    for t in 1..=terminals {
        g.terminal(TerminalId(t as u32));
    }
    g.build_cnf()
}

/// An epsilon-free, unit-free grammar whose rules have one terminal or two
/// to three arbitrary symbols.
pub fn random_grammar(seed: u64, nonterminals: usize, terminals: usize, productions: usize) -> Grammar {
    assert!(nonterminals >= 1 && terminals >= 1);
    let mut rng = Xorshift64Star::seeded(seed);
    let (mut g, ids) = register(nonterminals);
    for t in 1..=terminals {
        g.terminal(TerminalId(t as u32));
    }
    for _ in 0..productions {
        let lhs = ids[pick(&mut rng, ids.len())];
        let len = 1 + pick(&mut rng, 3);
        let rhs = (0..len)
            .map(|_| {
                if len == 1 || rng.next_f64() < 0.4 {
                    Symbol::Terminal(TerminalId(1 + pick(&mut rng, terminals) as u32))
                } else {
                    Symbol::Nonterminal(ids[pick(&mut rng, ids.len())])
                }
            })
            .collect();
        g.rule(lhs, rhs);
    }
    g.build()
}

pub fn random_string(seed: u64, len: usize, terminals: usize) -> Vec<TerminalId> {
    let mut rng = Xorshift64Star::seeded(seed);
    (0..len)
        .map(|_| TerminalId(1 + pick(&mut rng, terminals) as u32))
        .collect()
}
