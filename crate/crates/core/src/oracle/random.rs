//! Seeded random trees for testing.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::enumerate::Proto;
use crate::number::{ratio, Rational};
use crate::tree::{Topology, WeightedTree};

/// Weights are drawn as `p / q` with `q` in `1..=6` and `p / q` in
/// `[min, max]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightRange {
    pub min: i64,
    pub max: i64,
    /// Twigs are drawn from `[twig_min, max]` instead.
    pub twig_min: i64,
}

impl WeightRange {
    pub fn positive(max: i64) -> Self {
        WeightRange {
            min: 1,
            max,
            twig_min: 1,
        }
    }

    pub fn with_negative_twigs(max: i64) -> Self {
        WeightRange {
            min: 1,
            max,
            twig_min: -max,
        }
    }

    fn draw(&self, rng: &mut impl Rng, lo: i64) -> Rational {
        let q = rng.gen_range(1..=6);
        let p = rng.gen_range(lo * q..=self.max * q);
        ratio(p, q)
    }
}

fn random_proto(n: usize, rng: &mut impl Rng) -> Proto {
    assert!(n >= 3);
    let mut proto = Proto::star3();
    for label in 4..=n {
        let slots = proto.slots();
        let slot = slots[rng.gen_range(0..slots.len())];
        proto = proto.insert(slot, label);
    }
    proto
}

/// A random essential topology on `{1..n}`.
pub fn random_topology(n: usize, rng: &mut impl Rng) -> Topology {
    random_proto(n, rng).topology()
}

fn weigh(topology: Topology, range: &WeightRange, rng: &mut impl Rng) -> WeightedTree {
    let twig = topology.twig_mask();
    let weights = twig
        .iter()
        .map(|&t| range.draw(rng, if t { range.twig_min } else { range.min }))
        .collect();
    WeightedTree::new(topology, weights).expect("one weight per edge")
}

/// Seeded weights from `range` on a fixed topology.
pub fn random_weights(topology: &Topology, seed: u64, range: &WeightRange) -> WeightedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    weigh(topology.clone(), range, &mut rng)
}

/// A random tree on `{1..n}` with weights from `range`.
pub fn random_tree(n: usize, seed: u64, range: &WeightRange) -> WeightedTree {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topology = random_topology(n, &mut rng);
    weigh(topology, range, &mut rng)
}

/// A random pseudostar of kind `(n, k)`: a random topology with every edge
/// whose sides are both smaller than `k` contracted.
pub fn random_pseudostar(n: usize, k: usize, seed: u64, range: &WeightRange) -> WeightedTree {
    assert!(n >= 3 && k >= 2 && k < n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let proto = random_proto(n, &mut rng);
    let topology = proto.topology();
    let drop: Vec<bool> = (0..topology.num_edges())
        .map(|e| {
            let side = topology.split(e).len();
            side < k && n - side < k
        })
        .collect();
    let topology = proto.contract(&drop).topology();
    debug_assert!(topology.is_pseudostar(k) && topology.is_essential());
    weigh(topology, range, &mut rng)
}

/// A random tree on `{1..n}` that is *not* a k-pseudostar.
pub fn random_non_pseudostar(n: usize, k: usize, seed: u64, range: &WeightRange) -> WeightedTree {
    assert!(
        n >= 4 && n + 2 <= 2 * k && k < n,
        "needs a split with both sides smaller than k"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let topology = loop {
        let t = random_topology(n, &mut rng);
        if !t.is_pseudostar(k) {
            break t;
        }
    };
    weigh(topology, range, &mut rng)
}
