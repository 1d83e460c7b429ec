//! The brute-force oracle: topology catalogs, exact realizations on a given
//! topology, and agreement with the decision procedure.

use treelike::checker::decide;
use treelike::number::int;
use treelike::oracle::{all_realizations, brute_decide, catalog};
use treelike::{KFamily, LeafSet};

fn main() {
    for n in 3..=7 {
        println!("n = {n}: {} essential topologies", catalog(n).unwrap().len());
    }

    let t4 = KFamily::from_entries(
        4,
        3,
        LeafSet::full(4)
            .subsets(3)
            .zip([11, 12, 13, 14])
            .map(|(s, v)| (s, int(v))),
    )
    .unwrap();
    for r in all_realizations(&t4).unwrap() {
        let note = if r.unique { "unique" } else { "one of infinitely many" };
        println!("family 11,12,13,14 on {}  ({note})", r.tree.to_newick());
    }

    let f = KFamily::from_fn(5, 3, |s| {
        if s == LeafSet::from_labels([1, 2, 4]) {
            int(7)
        } else {
            int(5)
        }
    })
    .unwrap();
    let brute = brute_decide(&f).unwrap();
    let verdict = decide(&f).unwrap();
    println!(
        "perturbed family: oracle ({}, {}), decide ({}, {})",
        brute.ip_l_treelike, brute.p_l_treelike, verdict.ip_l_treelike, verdict.p_l_treelike
    );
}
