//! Acceptance suite. Each test prints one `[PASS]` or `[FAIL]` line for its
//! criterion; run with `--nocapture` to see them. Tests share a lock so the
//! timing criteria never run next to other work in this binary.

use std::hint::black_box;
use std::sync::Mutex;
use std::time::Instant;

use bmmparse::gen::{random_cnf_grammar, random_string};
use bmmparse::recognizer::recognize_bmm;
use bmmparse::reduction::block_size;
use bmmparse::{
    bmm_naive, build_instance, cky_parse, multiply_via_parser, oracle_query, random_matrix, BmmKernel, BoolMatrix,
    BruteForce, Chart, Cky, Grammar, Kernel, NonterminalId, ReductionInstance, Tag,
};
use bmmparse_cli::bench::{bench, BenchOptions, DEFAULT_MEM_CAP};
use bmmparse_cli::MultiplyPath;

static LOCK: Mutex<()> = Mutex::new(());

const DENSITIES: [f64; 3] = [0.1, 0.5, 0.9];

fn criterion(n: u32, title: &str, check: impl FnOnce() -> Result<String, String>) {
    let _guard = LOCK.lock().unwrap_or_else(|e| e.into_inner());
    let start = Instant::now();
    let result = check();
    let secs = start.elapsed().as_secs_f64();
    match result {
        Ok(detail) => println!("[PASS] criterion {n}: {title} ({detail}; {secs:.2}s)"),
        Err(why) => {
            println!("[FAIL] criterion {n}: {title} ({why}; {secs:.2}s)");
            panic!("criterion {n} failed: {why}");
        }
    }
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seeded_pair(m: usize, k: usize, salt: u64) -> (BoolMatrix, BoolMatrix) {
    let d = DENSITIES[k % 3];
    let seed = salt.wrapping_mul(0x100000001b3) ^ ((m as u64) << 20) ^ k as u64;
    (random_matrix(m, d, seed).unwrap(), random_matrix(m, d, !seed).unwrap())
}

/// The twenty small instances shared by criteria 2 and 9.
fn small_instances() -> Vec<(BoolMatrix, BoolMatrix, ReductionInstance)> {
    (0..20)
        .map(|k| {
            let m = 1 + k % 3;
            let (a, b) = seeded_pair(m, k, 2);
            let inst = build_instance(&a, &b, false).unwrap();
            (a, b, inst)
        })
        .collect()
}

#[test]
fn criterion_1_parser_product_equals_naive() {
    criterion(
        1,
        "multiply_via_parser with CKY equals bmm_naive, m = 1..10, 50 pairs each",
        || {
            for m in 1..=10 {
                for k in 0..50 {
                    let (a, b) = seeded_pair(m, k, 1);
                    let got = multiply_via_parser(&a, &b, &Cky).map_err(|e| e.to_string())?;
                    let expected = bmm_naive(&a, &b).unwrap();
                    ensure(got == expected, || format!("m={m} pair={k}: product differs"))?;
                }
            }
            Ok("500 pairs".into())
        },
    );
}

#[test]
fn criterion_2_c_derivation_form() {
    criterion(
        2,
        "c_ij = 1 iff C[i1,j1] c-derives (i2, j2+2delta), exhaustive oracle",
        || {
            let mut entries = 0;
            for (k, (a, b, inst)) in small_instances().iter().enumerate() {
                let c = bmm_naive(a, b).unwrap();
                let mut bf = BruteForce::new(inst.cnf_grammar(), inst.string()).map_err(|e| e.to_string())?;
                for i in 1..=inst.m() {
                    for j in 1..=inst.m() {
                        let (nt, lo, hi) = inst.product_query(i, j).map_err(|e| e.to_string())?;
                        let cd = bf.cderives(nt, lo, hi).map_err(|e| e.to_string())?;
                        ensure(cd == c.get(i - 1, j - 1), || format!("instance {k} entry ({i},{j})"))?;
                        entries += 1;
                    }
                }
            }
            Ok(format!("20 instances, {entries} entries"))
        },
    );
}

fn force_zero(a: &BoolMatrix, b: &BoolMatrix, style: usize) -> (BoolMatrix, BoolMatrix) {
    let m = a.dim();
    match style % 3 {
        0 => (BoolMatrix::zeros(m), b.clone()),
        1 => (a.clone(), BoolMatrix::zeros(m)),
        // a may only use columns whose rows in b are empty
        _ => {
            let half = m / 2;
            let a = BoolMatrix::from_fn(m, |i, k| k < half && a.get(i, k));
            let b = BoolMatrix::from_fn(m, |k, j| k >= half && b.get(k, j));
            (a, b)
        }
    }
}

#[test]
fn criterion_3_start_symbol_iff_nonzero() {
    criterion(3, "S in cell(1, 3n+6) iff product nonzero, 200 instances", || {
        let mut zeros = 0;
        for k in 0..200 {
            let m = 1 + k % 8;
            let (mut a, mut b) = seeded_pair(m, k, 3);
            if k % 6 == 0 {
                (a, b) = force_zero(&a, &b, k / 6);
            }
            let c = bmm_naive(&a, &b).unwrap();
            zeros += c.is_zero() as usize;
            let inst = build_instance(&a, &b, false).map_err(|e| e.to_string())?;
            let n = inst.string().len();
            ensure(n == 3 * inst.n() + 6, || format!("instance {k}: string length {n}"))?;
            let chart = cky_parse(inst.cnf_grammar(), inst.string()).map_err(|e| e.to_string())?;
            let s = chart.contains(inst.cnf_grammar().start(), 1, n);
            ensure(s == !c.is_zero(), || {
                format!("instance {k} (m={m}): S={s}, product zero={}", c.is_zero())
            })?;
        }
        ensure(zeros >= 20, || format!("only {zeros} zero products"))?;
        Ok(format!("{zeros} zero products"))
    });
}

fn count_tag(g: &Grammar, tag: Tag) -> usize {
    g.productions()
        .iter()
        .filter(|p| g.name(p.lhs).map(|n| n.tag()) == Some(tag))
        .count()
}

#[test]
fn criterion_4_size_accounting() {
    criterion(4, "per-family rule counts and quadratic total size", || {
        let sized = |m: usize| {
            let (a, b) = seeded_pair(m, 1, 4);
            let inst = build_instance(&a, &b, false).unwrap();
            (a, b, inst)
        };
        for m in [1usize, 2, 8, 27] {
            let (a, b, inst) = sized(m);
            let g = inst.grammar();
            let n = block_size(m);
            let f = n * n + 1;
            let measured = [Tag::W, Tag::A, Tag::B, Tag::C, Tag::S].map(|t| count_tag(g, t));
            ensure(measured[0] == 2 * (3 * n + 6), || {
                format!("m={m}: W rules {}", measured[0])
            })?;
            ensure(measured[1] == a.count_ones(), || {
                format!("m={m}: A rules {}", measured[1])
            })?;
            ensure(measured[2] == b.count_ones(), || {
                format!("m={m}: B rules {}", measured[2])
            })?;
            ensure(measured[3] <= f * f * f, || format!("m={m}: C rules {}", measured[3]))?;
            ensure(measured[4] <= f * f, || format!("m={m}: S rules {}", measured[4]))?;
            let s = inst.stats();
            let reported = [s.w_rules, s.a_rules, s.b_rules, s.c_rules, s.s_rules];
            ensure(reported == measured, || {
                format!("m={m}: stats {reported:?} vs {measured:?}")
            })?;
            let size: usize = g.productions().iter().map(|p| p.size()).sum();
            ensure(size == s.grammar_size, || {
                format!("m={m}: size {size} vs {}", s.grammar_size)
            })?;
        }
        let c = sized(8).2.stats().grammar_size as f64 / 64.0;
        for m in [27usize, 64, 125] {
            let size = sized(m).2.stats().grammar_size as f64;
            ensure(size <= c * (m * m) as f64, || {
                format!("m={m}: size {size} > {c:.2} m^2")
            })?;
        }
        Ok(format!("c = {c:.3}"))
    });
}

#[test]
fn criterion_5_cnf_preservation() {
    criterion(
        5,
        "normal form keeps c-derivations of every C[p,q]; helper count",
        || {
            let mut checks = 0;
            for m in [1usize, 2] {
                for k in 0..3 {
                    let (a, b) = seeded_pair(m, k, 5);
                    let inst = build_instance(&a, &b, false).map_err(|e| e.to_string())?;
                    let w = inst.string();
                    let mut raw = BruteForce::new(inst.grammar(), w).map_err(|e| e.to_string())?;
                    let mut cnf = BruteForce::new(inst.cnf_grammar(), w).map_err(|e| e.to_string())?;
                    for p in 0..=inst.family_max() {
                        for q in 0..=inst.family_max() {
                            let c = inst.c_id(p, q);
                            for i in 1..=w.len() {
                                for j in i..=w.len() {
                                    let (x, y) = (raw.cderives(c, i, j).unwrap(), cnf.cderives(c, i, j).unwrap());
                                    ensure(x == y, || format!("m={m} k={k} C[{p},{q}] ({i},{j}): {x} vs {y}"))?;
                                    checks += 1;
                                }
                            }
                        }
                    }
                    let n = inst.n();
                    let g = inst.cnf_grammar();
                    let helpers = g.nonterminals().filter(|(_, nm)| nm.is_cnf_helper()).count();
                    let want = (3 * n + 6) + 2 * n + 1;
                    ensure(helpers == want, || format!("m={m}: {helpers} helpers, want {want}"))?;
                    ensure(inst.stats().cnf_helpers == want, || {
                        format!("m={m}: stats helper count")
                    })?;
                }
            }
            Ok(format!("{checks} span checks"))
        },
    );
}

#[test]
fn criterion_6_recognizer_matches_cky() {
    criterion(6, "recognize_bmm charts equal cky_parse for every kernel", || {
        let compare = |g: &Grammar, w: &[bmmparse::TerminalId], what: &str| -> Result<(), String> {
            let expected = cky_parse(g, w).map_err(|e| e.to_string())?;
            for k in Kernel::ALL {
                let got = recognize_bmm(g, w, &k).map_err(|e| e.to_string())?;
                ensure(got == expected, || format!("{what} with {}", k.name()))?;
            }
            Ok(())
        };
        for k in 0..50 {
            let m = 1 + (k * 11) % 27;
            let (a, b) = seeded_pair(m, k, 6);
            let inst = build_instance(&a, &b, false).map_err(|e| e.to_string())?;
            compare(inst.cnf_grammar(), inst.string(), &format!("instance {k} (m={m})"))?;
        }
        for k in 0..50u64 {
            let g = random_cnf_grammar(600 + k, 2 + (k as usize) % 5, 3, 6 + (k as usize) % 12);
            let w = random_string(900 + k, 1 + (k as usize) % 10, 3);
            compare(&g, &w, &format!("grammar {k}"))?;
        }
        Ok(format!("{} kernels", Kernel::ALL.len()))
    });
}

#[test]
fn criterion_7_kernel_equivalence() {
    criterion(7, "kernels bit-identical to bmm_naive", || {
        for k in 0..500 {
            let m = 1 + (k * 37) % 128;
            let (a, b) = seeded_pair(m, k, 7);
            let expected = bmm_naive(&a, &b).unwrap();
            for kernel in Kernel::ALL {
                let got = kernel.multiply(&a, &b).unwrap();
                ensure(got == expected, || format!("pair {k} (m={m}) with {}", kernel.name()))?;
            }
        }
        for bits in 0u32..256 {
            let a = BoolMatrix::from_fn(2, |i, j| bits >> (2 * i + j) & 1 == 1);
            let b = BoolMatrix::from_fn(2, |i, j| bits >> (4 + 2 * i + j) & 1 == 1);
            let truth = BoolMatrix::from_fn(2, |i, j| (0..2).any(|k| a.get(i, k) && b.get(k, j)));
            for kernel in Kernel::ALL {
                ensure(kernel.multiply(&a, &b).unwrap() == truth, || {
                    format!("2x2 case {bits} with {}", kernel.name())
                })?;
            }
        }
        Ok("500 random pairs, 256 truth-table pairs".into())
    });
}

#[test]
fn criterion_8_empirical_exponent() {
    criterion(8, "cky-pipeline log-log slope in [2.4, 3.6] with r^2 >= 0.95", || {
        let opts = BenchOptions {
            sizes: vec![27, 64, 125, 216],
            paths: vec![MultiplyPath::Cky],
            reps: 5,
            seed: 8,
            mem_cap: DEFAULT_MEM_CAP,
        };
        let report = bench(&opts).map_err(|e| e.to_string())?;
        let times: Vec<String> = report
            .records
            .iter()
            .map(|r| format!("{}:{:.4}s", r.m, r.wall_time))
            .collect();
        let fit = report.fit_for(MultiplyPath::Cky).ok_or("no fit")?;
        let detail = format!("slope {:.3}, r^2 {:.4}, {}", fit.slope, fit.r_squared, times.join(" "));
        ensure((2.4..=3.6).contains(&fit.slope) && fit.r_squared >= 0.95, || {
            detail.clone()
        })?;
        Ok(detail)
    });
}

fn time_queries(chart: &Chart, queries: &[(NonterminalId, usize, usize)], rounds: usize) -> f64 {
    let start = Instant::now();
    let mut yes = 0usize;
    for _ in 0..rounds {
        for &(a, i, j) in queries {
            yes += oracle_query(black_box(chart), a, i, j).unwrap().is_yes() as usize;
        }
    }
    black_box(yes);
    start.elapsed().as_secs_f64() / (rounds * queries.len()) as f64
}

fn query_sample(inst: &ReductionInstance, count: usize, seed: u64) -> Vec<(NonterminalId, usize, usize)> {
    let mut rng = bmmparse::rng::Xorshift64Star::seeded(seed);
    let n = inst.string().len() as u64;
    let v = inst.cnf_grammar().nonterminal_count() as u64;
    (0..count)
        .map(|_| {
            let i = rng.range_inclusive(1, n);
            let j = rng.range_inclusive(i, n);
            (
                NonterminalId(rng.range_inclusive(0, v - 1) as u32),
                i as usize,
                j as usize,
            )
        })
        .collect()
}

#[test]
fn criterion_9_oracle_contract() {
    criterion(
        9,
        "oracle_query is one bit test and honours the c-derivation contract",
        || {
            let mut answered = 0;
            for (k, (_, _, inst)) in small_instances().iter().enumerate() {
                let g = inst.cnf_grammar();
                let w = inst.string();
                let chart = cky_parse(g, w).map_err(|e| e.to_string())?;
                let mut bf = BruteForce::new(g, w).map_err(|e| e.to_string())?;
                let mut seen = std::collections::HashSet::new();
                for (a, _) in g.nonterminals() {
                    for i in 1..=w.len() {
                        for j in i..=w.len() {
                            let (word, bit) = chart.locate(a, i, j).ok_or("span inside the string has no location")?;
                            ensure(bit < 64 && seen.insert((word, bit)), || {
                                format!("location of {a:?} ({i},{j}) reused")
                            })?;
                            let answer = oracle_query(&chart, a, i, j).map_err(|e| e.to_string())?.is_yes();
                            ensure(answer == (chart.raw_words()[word] >> bit & 1 == 1), || {
                                "answer is not the bit".into()
                            })?;
                            if bf.cderives(a, i, j).unwrap() {
                                ensure(answer, || format!("instance {k}: no on a c-derivation {a:?} ({i},{j})"))?;
                            }
                            if !bf.derives(a, i, j).unwrap() {
                                ensure(!answer, || {
                                    format!("instance {k}: yes on a non-derivation {a:?} ({i},{j})")
                                })?;
                            }
                            answered += 1;
                        }
                    }
                }
                let n = w.len();
                for (i, j) in [(0, 1), (2, 1), (1, n + 1)] {
                    ensure(oracle_query(&chart, NonterminalId(0), i, j).is_err(), || {
                        format!("({i},{j}) accepted")
                    })?;
                    ensure(chart.locate(NonterminalId(0), i, j).is_none(), || {
                        format!("({i},{j}) located")
                    })?;
                }
            }
            // query cost must not grow with the chart
            let small = build_instance(&BoolMatrix::ones(1), &BoolMatrix::ones(1), false).unwrap();
            let (a, b) = seeded_pair(216, 0, 9);
            let large = build_instance(&a, &b, false).unwrap();
            let cs = cky_parse(small.cnf_grammar(), small.string()).unwrap();
            let cl = cky_parse(large.cnf_grammar(), large.string()).unwrap();
            let (qs, ql) = (query_sample(&small, 4096, 1), query_sample(&large, 4096, 2));
            let (ts, tl) = (time_queries(&cs, &qs, 200), time_queries(&cl, &ql, 200));
            let ratio = tl / ts;
            let growth = cl.raw_words().len() as f64 / cs.raw_words().len() as f64;
            ensure(ratio < 4.0, || {
                format!("query time grew {ratio:.2}x for a {growth:.0}x larger chart")
            })?;
            Ok(format!(
                "{answered} queries checked; {ratio:.2}x time for {growth:.0}x chart"
            ))
        },
    );
}
