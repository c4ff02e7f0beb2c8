//! Boolean matrix multiplication through context-free parsing.
//!
//! The crate builds, for two Boolean matrices, a grammar and a string whose
//! CKY chart contains the matrix product ([`reduction`]), and goes the other
//! way as well, recognizing strings with Boolean matrix products
//! ([`recognizer`]). Exhaustive derivation oracles ([`brute`]) and a naive
//! multiplication kernel ([`kernels::bmm_naive`]) serve as ground truth.

pub mod brute;
pub mod chart;
pub mod cnf;
pub mod gen;
pub mod grammar;
pub mod kernels;
pub mod matrix;
pub mod recognizer;
pub mod reduction;
pub mod rng;

pub use brute::{cderives_bruteforce, derives_bruteforce, BruteError, BruteForce};
pub use chart::{cky_parse, oracle_query, outside_reachable, CParser, Chart, Cky, OracleAnswer, ParseError};
pub use cnf::{to_cnf, CnfError};
pub use grammar::{
    validate_grammar, Grammar, GrammarBuilder, NonterminalId, NonterminalName, Production, Symbol, Tag, TerminalId,
    Violation,
};
pub use kernels::{bmm_bitset, bmm_four_russians, bmm_naive, BmmKernel, Kernel};
pub use matrix::{random_matrix, BoolMatrix, MatrixError};
pub use recognizer::{recognize_bmm, BmmRecognizer};
pub use reduction::{
    build_instance, decode_index, encode_index, instance_stats, multiply_via_parser, EncodedIndex, InstanceStats,
    ReductionError, ReductionInstance,
};
