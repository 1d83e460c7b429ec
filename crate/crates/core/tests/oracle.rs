use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treelike::checker::decide;
use treelike::number::int;
use treelike::oracle::{
    brute_decide, catalog, enumerate_topologies, random_pseudostar, random_tree, random_weights, realize_exact,
    BruteVerdict, WeightRange,
};
use treelike::{parse_newick, KFamily, LeafSet};

fn ours(f: &KFamily) -> BruteVerdict {
    let v = decide(f).unwrap();
    BruteVerdict {
        ip_l_treelike: v.ip_l_treelike,
        p_l_treelike: v.p_l_treelike,
    }
}

#[test]
fn catalog_sizes() {
    assert_eq!(enumerate_topologies(7).len(), 2752);
    assert_eq!(catalog(8).unwrap().len(), 39208);
}

#[test]
fn linear_solve_examples() {
    let t4 = KFamily::from_entries(
        4,
        3,
        LeafSet::full(4)
            .subsets(3)
            .zip([11, 12, 13, 14])
            .map(|(s, v)| (s, int(v))),
    )
    .unwrap();
    let star = parse_newick("(1:1,2:1,3:1,4:1);").unwrap();
    let r = realize_exact(star.topology(), &t4, true).unwrap().unwrap();
    assert!(r.unique);
    assert_eq!(r.tree.to_newick(), "(1:8/3,2:11/3,3:14/3,4:17/3);");

    let quartet = parse_newick("((1:1,2:1):1,3:1,4:1);").unwrap();
    let r = realize_exact(quartet.topology(), &t4, true).unwrap().unwrap();
    assert!(!r.unique);
    assert!(r.tree.is_internal_positive());
    assert_eq!(r.tree.k_dissimilarity(3).unwrap(), t4);
}

#[test]
fn decide_matches_oracle_on_every_small_topology() {
    let schemes = [
        WeightRange::positive(4),
        WeightRange::with_negative_twigs(4),
        WeightRange {
            min: -2,
            max: 2,
            twig_min: -2,
        },
    ];
    for n in 4..=6 {
        for (idx, topology) in catalog(n).unwrap().iter().enumerate() {
            for k in 3..n {
                let scheme = &schemes[(idx + k) % 3];
                let t = random_weights(topology, (n * 10_000 + idx * 10 + k) as u64, scheme);
                let f = t.k_dissimilarity(k).unwrap();
                assert_eq!(ours(&f), brute_decide(&f).unwrap(), "{} k = {k}", t.to_newick());
            }
        }
    }
}

#[test]
fn decide_matches_oracle_on_random_families() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut treelike = 0;
    for i in 0..1000u64 {
        let n = [4, 5, 5, 5, 6][rng.gen_range(0..5)];
        let k = rng.gen_range(3..n);
        let t = if i % 2 == 0 {
            random_pseudostar(n, k, i, &WeightRange::with_negative_twigs(4))
        } else {
            random_tree(n, i, &WeightRange::positive(4))
        };
        let mut f = t.k_dissimilarity(k).unwrap();
        if i % 3 != 0 {
            let subsets: Vec<LeafSet> = f.iter().map(|(s, _)| s).collect();
            let target = subsets[rng.gen_range(0..subsets.len())];
            f = f.with_value(target, f.get(target) + int(rng.gen_range(-2..=2)));
        }
        let expected = brute_decide(&f).unwrap();
        assert_eq!(ours(&f), expected, "family from {} k = {k}", t.to_newick());
        treelike += usize::from(expected.ip_l_treelike);
    }
    assert!(treelike > 300 && treelike < 1000, "{treelike}");
}
