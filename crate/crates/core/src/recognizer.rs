//! Recognition by Boolean matrix products.
//!
//! Each nonterminal `X` gets an `(N+1) x (N+1)` span matrix over string
//! boundaries: entry `(s, e)` is set iff `X` derives `w_{s+1} .. w_e`. For a
//! rule `X -> Y Z` the product `M_Y * M_Z` holds exactly the spans `X` covers
//! by that rule given the current `Y` and `Z` entries, so unioning products
//! into `M_X` until nothing changes reaches the CKY chart. Every round adds
//! at least one level of derivation height, and heights are bounded by `N`.

use crate::chart::{binary_rules, seeded_chart, CParser, Chart, ParseError};
use crate::grammar::{Grammar, NonterminalId, TerminalId};
use crate::kernels::BmmKernel;
use crate::matrix::BoolMatrix;

/// Chart plus the number of rounds the fixpoint took.
#[derive(Debug, Clone)]
pub struct Recognition {
    pub chart: Chart,
    pub rounds: usize,
}

/// Same chart as [`crate::chart::cky_parse`], computed with `mult`.
pub fn recognize_bmm<K: BmmKernel + ?Sized>(g: &Grammar, w: &[TerminalId], mult: &K) -> Result<Chart, ParseError> {
    recognize_bmm_traced(g, w, mult).map(|r| r.chart)
}

pub fn recognize_bmm_traced<K: BmmKernel + ?Sized>(
    g: &Grammar,
    w: &[TerminalId],
    mult: &K,
) -> Result<Recognition, ParseError> {
    let seeded = seeded_chart(g, w)?;
    let n = w.len();
    let v = g.nonterminal_count();
    let mut spans: Vec<BoolMatrix> = (0..v).map(|_| BoolMatrix::zeros(n + 1)).collect();
    for (x, span) in spans.iter_mut().enumerate() {
        for s in 0..n {
            if seeded.contains(NonterminalId(x as u32), s + 1, s + 1) {
                span.set(s, s + 1, true);
            }
        }
    }
    let mut occupied: Vec<bool> = spans.iter().map(|m| !m.is_zero()).collect();
    let rules = binary_rules(g);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let mut changed = false;
        for &(x, y, z) in &rules {
            if !occupied[y] || !occupied[z] {
                continue;
            }
            let product = mult
                .multiply(&spans[y], &spans[z])
                .expect("span matrices share one dimension");
            if spans[x].or_assign(&product).expect("span matrices share one dimension") {
                changed = true;
                occupied[x] = true;
            }
        }
        if !changed {
            break;
        }
    }
    debug_assert!(rounds <= n + 1, "fixpoint took {rounds} rounds for N = {n}");

    let mut chart = seeded;
    for (x, span) in spans.iter().enumerate() {
        if !occupied[x] {
            continue;
        }
        for s in 0..n {
            for e in s + 1..=n {
                if span.get(s, e) {
                    chart.insert(NonterminalId(x as u32), s + 1, e);
                }
            }
        }
    }
    Ok(Recognition { chart, rounds })
}

/// [`CParser`] adapter around [`recognize_bmm`] with a fixed kernel.
#[derive(Clone, Copy, Debug)]
pub struct BmmRecognizer<K>(pub K);

impl<K: BmmKernel> CParser for BmmRecognizer<K> {
    fn parse(&self, g: &Grammar, w: &[TerminalId]) -> Result<Chart, ParseError> {
        recognize_bmm(g, w, &self.0)
    }

    fn name(&self) -> &'static str {
        "bmm-recognizer"
    }
}
