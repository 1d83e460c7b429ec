//! Acceptance gate. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line; exits non-zero on failure.

use std::collections::{BTreeMap, HashMap};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treelike::checker::decide;
use treelike::family::{four_point_check, q_classes, restrict_family, s_table};
use treelike::number::{int, ratio};
use treelike::oracle::{
    brute_decide, catalog, random_pseudostar, random_tree, random_weights, realize_with, BruteVerdict, SignConstraint,
    WeightRange,
};
use treelike::reconstruct::{reconstruct, rescale_internal, tree_from_pair_table};
use treelike::{parse_newick, KFamily, LeafSet, Rational, WeightedTree};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn set(labels: &[usize]) -> LeafSet {
    LeafSet::from_labels(labels.iter().copied())
}

fn f5() -> KFamily {
    KFamily::from_fn(5, 3, |s| if s == set(&[3, 4, 5]) { int(3) } else { int(5) }).unwrap()
}

fn verdict_pair(f: &KFamily) -> BruteVerdict {
    let v = decide(f).expect("k in range");
    BruteVerdict {
        ip_l_treelike: v.ip_l_treelike,
        p_l_treelike: v.p_l_treelike,
    }
}

/// Adds `+1` or `-1` (or only `+1` when `up_only`) to one random entry.
fn bump(f: &KFamily, rng: &mut ChaCha8Rng, up_only: bool) -> KFamily {
    let subsets: Vec<LeafSet> = f.iter().map(|(s, _)| s).collect();
    let target = subsets[rng.gen_range(0..subsets.len())];
    let delta = if up_only || rng.gen_bool(0.5) { int(1) } else { int(-1) };
    f.with_value(target, f.get(target) + delta)
}

fn worked_example() -> Outcome {
    let start = Instant::now();
    let f = f5();
    let p = s_table(&f);
    for (i, j) in [(1, 2)]
        .into_iter()
        .chain((1..=2).flat_map(|i| (3..=5).map(move |j| (i, j))))
    {
        ensure(*p.get(i, j) == int(15), || format!("S_{i}{j} = {}", p.get(i, j)))?;
    }
    for (i, j) in [(3, 4), (3, 5), (4, 5)] {
        ensure(*p.get(i, j) == int(13), || format!("S_{i}{j} = {}", p.get(i, j)))?;
    }
    let classes = q_classes(&p, 3).map_err(|e| e.to_string())?;
    ensure(classes.len() == 1 && classes[0].wtilde == int(2), || {
        format!("classes {classes:?}")
    })?;
    ensure(
        classes[0].side_ab == set(&[1, 2]) && classes[0].side_cd == set(&[3, 4, 5]),
        || "class sides".into(),
    )?;
    let r = reconstruct(&f).map_err(|e| e.to_string())?;
    ensure(r.tau == vec![int(3); 5], || format!("tau = {:?}", r.tau))?;
    let t5 = parse_newick("(1:1,2:1,(3:1,4:1,5:1):2);").unwrap();
    ensure(r.tree == t5, || format!("tree {}", r.tree.to_newick()))?;
    let v = decide(&f).unwrap();
    ensure(v.ip_l_treelike && v.p_l_treelike, || {
        "five-leaf family not accepted".into()
    })?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))?;
    Ok(format!(
        "S-table, wtilde = 2, tau = 3, source tree reproduced in {elapsed:?}"
    ))
}

fn roundtrip_a() -> Outcome {
    let start = Instant::now();
    let cases = [(5, 3), (6, 3), (6, 4), (7, 3), (7, 4), (7, 5), (8, 4), (9, 4)];
    let range = WeightRange::with_negative_twigs(6);
    let mut trials = 0;
    for (n, k) in cases {
        for seed in 0..100u64 {
            let t = random_pseudostar(n, k, 1000 * n as u64 + 100 * k as u64 + seed, &range);
            let f = t.k_dissimilarity(k).unwrap();
            let r = reconstruct(&f).map_err(|e| format!("({n},{k}) {}: {e}", t.to_newick()))?;
            ensure(r.tree == t, || {
                format!("({n},{k}) {} came back as {}", t.to_newick(), r.tree.to_newick())
            })?;
            trials += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {elapsed:?}"))?;
    Ok(format!("{trials}/{trials} pseudostars reproduced in {elapsed:?}"))
}

fn oracle_agreement() -> Outcome {
    let schemes = [
        WeightRange::positive(5),
        WeightRange::with_negative_twigs(5),
        WeightRange {
            min: -2,
            max: 3,
            twig_min: -3,
        },
    ];
    let mut checked = 0;
    let mut pool = Vec::new();
    for (n, k) in [(4, 3), (5, 3), (5, 4)] {
        for (t_idx, topology) in catalog(n).unwrap().iter().enumerate() {
            for draw in 0..10u64 {
                let seed = (n * 100_000 + k * 10_000 + t_idx * 10) as u64 + draw;
                let tree = random_weights(topology, seed, &schemes[draw as usize % 3]);
                let f = tree.k_dissimilarity(k).unwrap();
                let (ours, brute) = (verdict_pair(&f), brute_decide(&f).unwrap());
                ensure(ours == brute, || {
                    format!("{} k={k}: decide {ours:?}, oracle {brute:?}", tree.to_newick())
                })?;
                checked += 1;
                pool.push(f);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ip_count = 0;
    for _ in 0..500 {
        let f = bump(&pool[rng.gen_range(0..pool.len())], &mut rng, false);
        let (ours, brute) = (verdict_pair(&f), brute_decide(&f).unwrap());
        ensure(ours == brute, || {
            format!("perturbed family {f:?}: decide {ours:?}, oracle {brute:?}")
        })?;
        ip_count += usize::from(ours.ip_l_treelike);
        checked += 1;
    }
    Ok(format!(
        "{checked} families agree ({ip_count}/500 perturbed still ip-l-treelike)"
    ))
}

struct ForwardStats {
    four_point: usize,
    pseudostar: usize,
    rescaled: usize,
}

fn internal_splits(t: &WeightedTree) -> BTreeMap<LeafSet, Rational> {
    let topo = t.topology();
    topo.internal_edges()
        .into_iter()
        .map(|e| (topo.split(e), t.weight(e).clone()))
        .collect()
}

/// Criteria 4-6 share the same 500 trees.
fn forward_runs() -> Result<ForwardStats, String> {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let range = WeightRange::with_negative_twigs(6);
    let mut stats = ForwardStats {
        four_point: 0,
        pseudostar: 0,
        rescaled: 0,
    };
    for run in 0..500u64 {
        let n = rng.gen_range(4..=8);
        let k = rng.gen_range(3..n);
        let t = random_tree(n, 40_000 + run, &range);
        let f = t.k_dissimilarity(k).unwrap();
        let p = s_table(&f);
        if four_point_check(&p).is_ok() {
            stats.four_point += 1;
        }
        let Ok(tprime) = tree_from_pair_table(&p) else { continue };
        if tprime.topology().is_pseudostar(k) {
            stats.pseudostar += 1;
        }
        let Ok(classes) = q_classes(&p, k) else { continue };
        let Ok(rescaled) = rescale_internal(&tprime, &classes, k) else {
            continue;
        };
        let n_leaves = t.num_leaves();
        let expected: BTreeMap<LeafSet, Rational> = internal_splits(&t)
            .into_iter()
            .filter(|(split, _)| split.len().max(n_leaves - split.len()) >= k)
            .collect();
        if internal_splits(&rescaled) == expected {
            stats.rescaled += 1;
        }
    }
    Ok(stats)
}

fn specific_cases() -> Outcome {
    let bad = f5().with_value(set(&[1, 2, 3]), int(6));
    let v = decide(&bad).unwrap();
    ensure(!v.ip_l_treelike && !v.p_l_treelike, || "D123 = 6 accepted".into())?;
    let w = v.failure.as_ref().ok_or("no witness")?;
    ensure(w.stage_name == "four_point" && w.indices == vec![1, 3, 4, 5], || {
        format!("witness {w:?}")
    })?;
    ensure(brute_decide(&bad).unwrap() == verdict_pair(&bad), || {
        "oracle disagrees on D123 = 6".into()
    })?;

    let shifted = f5().with_value(set(&[3, 4, 5]), int(4));
    let v = decide(&shifted).unwrap();
    let tree = v.tree.as_ref().ok_or("D345 = 4 rejected")?;
    let expected = parse_newick("(1:4/3,2:4/3,(3:4/3,4:4/3,5:4/3):1);").unwrap();
    ensure(*tree == expected, || format!("D345 = 4 gave {}", tree.to_newick()))?;
    ensure(brute_decide(&shifted).unwrap() == verdict_pair(&shifted), || {
        "oracle disagrees on D345 = 4".into()
    })?;

    let negative = parse_newick("(1:-1,2:1,(3:1,4:1,5:1):2);")
        .unwrap()
        .k_dissimilarity(3)
        .unwrap();
    let v = decide(&negative).unwrap();
    ensure(v.ip_l_treelike && !v.p_l_treelike, || "twig(1) = -1 verdict".into())?;
    ensure(
        brute_decide(&negative).unwrap()
            == BruteVerdict {
                ip_l_treelike: true,
                p_l_treelike: false,
            },
        || "oracle disagrees on twig(1) = -1".into(),
    )?;
    ensure(ratio(4, 3) == expected.twig_weight(1).unwrap(), || "twig".into())?;
    Ok("D123=6 rejected at (1,3,4,5); D345=4 -> twigs 4/3, edge 1; twig(1)=-1 -> ip only; oracle agrees".into())
}

fn uniqueness() -> Outcome {
    let range = WeightRange::with_negative_twigs(5);
    let mut families = 0;
    for n in 4..=6 {
        let topologies = catalog(n).unwrap();
        for k in 3..n {
            let pseudostars: Vec<_> = topologies.iter().filter(|t| t.is_pseudostar(k)).collect();
            for (idx, source) in pseudostars.iter().enumerate() {
                let t = random_weights(source, (n * 1000 + k * 100 + idx) as u64, &range);
                let f = t.k_dissimilarity(k).unwrap();
                let mut found = Vec::new();
                for candidate in &pseudostars {
                    let Some(r) = realize_with(candidate, &f, SignConstraint::None).unwrap() else {
                        continue;
                    };
                    let topo = r.tree.topology();
                    if topo.internal_edges().iter().all(|&e| *r.tree.weight(e) != int(0)) {
                        found.push(r);
                    }
                }
                ensure(found.len() == 1, || {
                    format!("{} (k={k}): {} realizing pseudostars", t.to_newick(), found.len())
                })?;
                ensure(found[0].unique && found[0].tree == t, || {
                    format!("{} realized as {}", t.to_newick(), found[0].tree.to_newick())
                })?;
                families += 1;
            }
        }
    }
    Ok(format!(
        "{families} pseudostar families, each with exactly one realizing pseudostar"
    ))
}

fn injectivity() -> Outcome {
    let range = WeightRange::positive(7);
    let mut seen: HashMap<KFamily, String> = HashMap::new();
    let mut trees = 0;
    for (idx, topology) in catalog(7).unwrap().iter().enumerate() {
        let mut drawn: Vec<WeightedTree> = Vec::new();
        for draw in 0..2u64 {
            let t = random_weights(topology, 70_000 + 2 * idx as u64 + draw, &range);
            if drawn.contains(&t) {
                continue;
            }
            let f = t.k_dissimilarity(3).unwrap();
            if let Some(other) = seen.insert(f, t.to_newick()) {
                return Err(format!("{} and {other} share a 3-dissimilarity family", t.to_newick()));
            }
            drawn.push(t);
            trees += 1;
        }
    }
    Ok(format!(
        "{trees} distinct positive trees on 7 leaves give {trees} distinct families"
    ))
}

fn restriction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut agree = 0;
    let mut accepted = 0;
    for i in 0..100u64 {
        let t = random_tree(7, 100_000 + i, &WeightRange::positive(6));
        let mut f = t.k_dissimilarity(3).unwrap();
        if i >= 50 {
            // +1 keeps the family positive
            f = bump(&f, &mut rng, true);
        }
        let whole = decide(&f).unwrap().ip_l_treelike;
        let parts = LeafSet::full(7)
            .subsets(6)
            .all(|s| decide(&restrict_family(&f, s).unwrap()).unwrap().ip_l_treelike);
        ensure(whole == parts, || {
            format!("family #{i}: whole {whole}, restrictions {parts}")
        })?;
        agree += 1;
        accepted += usize::from(whole);
    }
    Ok(format!("{agree}/100 agree ({accepted} ip-l-treelike)"))
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut report = |id: &str, name: &str, outcome: Outcome| match outcome {
        Ok(detail) => println!("criterion {id:>2} {name:<28} PASS  {detail}"),
        Err(why) => {
            failed += 1;
            println!("criterion {id:>2} {name:<28} FAIL  {why}");
        }
    };

    report("1", "worked example", worked_example());
    report("2", "roundtrip", roundtrip_a());
    report("3", "oracle agreement", oracle_agreement());
    match forward_runs() {
        Ok(s) => {
            let line = |count: usize, what: &str| -> Outcome {
                if count == 500 {
                    Ok(format!("500/500 {what}"))
                } else {
                    Err(format!("{count}/500 {what}"))
                }
            };
            report(
                "4",
                "four-point forward",
                line(s.four_point, "pair tables satisfy the 4-point condition"),
            );
            report(
                "5",
                "pair tree is pseudostar",
                line(s.pseudostar, "pair-table trees are pseudostars"),
            );
            report(
                "6",
                "internal rescaling",
                line(s.rescaled, "rescaled internal weights match"),
            );
        }
        Err(why) => {
            for (id, name) in [
                ("4", "four-point forward"),
                ("5", "pair tree is pseudostar"),
                ("6", "internal rescaling"),
            ] {
                report(id, name, Err(why.clone()));
            }
        }
    }
    report("7", "specific cases", specific_cases());
    report("8", "uniqueness", uniqueness());
    report("9", "injectivity", injectivity());
    report("10", "restriction to 6-subsets", restriction());

    if failed == 0 {
        println!("acceptance: all 10 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
