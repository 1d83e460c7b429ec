//! Deciding ip-l-treelikeness (internal-positive realization with the index
//! set as leaves) and p-l-treelikeness (all weights positive).
//!
//! The decision is reconstruct-and-verify: build the candidate pseudostar
//! and compare its k-weights against every input value. Because the
//! essential pseudostar realization is unique, this is both sound and
//! complete. The four arithmetic conditions on the pair table are evaluated
//! alongside as diagnostics.

use num_traits::Signed;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::family::{
    four_point_check, l_set, q_classes, q_hat, relaxed_four_point_check, s_table, FourPointViolation, KFamily,
    PairSide, PairTable, QClass, QMembership,
};
use crate::leafset::LeafSet;
use crate::number::{format_rational, int, Rational};
use crate::reconstruct::{
    canonical_x, delta, reconstruct, sweep_canonical_tau, tau, PairTreeError, ReconstructFailure, RescaleError,
};
use crate::tree::WeightedTree;

/// How the X-dependent conditions are swept.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    /// Up to this many leaves every X (and every I) is tried.
    pub exhaustive_max_n: usize,
    /// Random draws per pair (condition iii) or per leaf (condition iv)
    /// above the exhaustive limit, and extra mixed-X draws for condition iv.
    pub samples: usize,
    pub seed: u64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            exhaustive_max_n: 9,
            samples: 64,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("k = {k} is outside 2..={max}")]
pub struct KRangeError {
    pub k: usize,
    pub max: usize,
}

/// Condition (i): the pair table satisfies the 4-point condition.
pub fn condition_i(f: &KFamily) -> Result<(), FourPointViolation> {
    four_point_check(&s_table(f))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallSplitViolation {
    pub quartet: [usize; 4],
    pub sums: [Rational; 3],
    pub side_ab: LeafSet,
    pub side_cd: LeafSet,
}

/// Condition (ii): a quartet whose sides cover `{1..n}` with both sides
/// smaller than `k` must have all three pairing sums equal (its edge would
/// have vanished in the pair-table tree).
pub fn condition_ii(f: &KFamily) -> Result<(), SmallSplitViolation> {
    let (n, k) = (f.n(), f.k());
    if k < 3 {
        return Ok(());
    }
    let p = s_table(f);
    let universe = LeafSet::full(n);
    for q in universe.subsets(4) {
        let [a, b, c, d] = <[usize; 4]>::try_from(q.to_vec()).unwrap();
        for quartet in [[a, b, c, d], [a, c, b, d], [a, d, b, c]] {
            let sums = p.pairing_sums(quartet);
            if sums[1] != sums[2] {
                continue;
            }
            let side_ab = l_set(&p, quartet, PairSide::Ab);
            let side_cd = l_set(&p, quartet, PairSide::Cd);
            if (side_ab | side_cd) != universe || side_ab.len() >= k || side_cd.len() >= k {
                continue;
            }
            if sums[0] != sums[1] {
                return Err(SmallSplitViolation {
                    quartet,
                    sums,
                    side_ab,
                    side_cd,
                });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaViolation {
    pub i: usize,
    pub j: usize,
    pub x: LeafSet,
    pub x_other: LeafSet,
    pub delta: Rational,
    pub delta_other: Rational,
}

fn random_subset(rng: &mut ChaCha8Rng, pool: LeafSet, size: usize) -> LeafSet {
    let labels = pool.to_vec();
    sample(rng, labels.len(), size).iter().map(|i| labels[i]).collect()
}

/// Condition (iii), per pair: `delta(i, j, X)` does not depend on `X`.
pub fn condition_iii(f: &KFamily, classes: &[QClass], sweep: &SweepConfig) -> Result<(), DeltaViolation> {
    let (n, k) = (f.n(), f.k());
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.seed);
    for i in 1..=n {
        for j in (1..=n).filter(|&j| j != i) {
            let pool = LeafSet::full(n).without(i).without(j);
            let x0 = canonical_x(n, k, i, j);
            let d0 = delta(f, classes, i, j, x0);
            let candidates: Box<dyn Iterator<Item = LeafSet>> = if n <= sweep.exhaustive_max_n {
                Box::new(pool.subsets(k - 1))
            } else {
                Box::new(
                    (0..sweep.samples)
                        .map(|_| random_subset(&mut rng, pool, k - 1))
                        .collect::<Vec<_>>()
                        .into_iter(),
                )
            };
            for x in candidates {
                let d = delta(f, classes, i, j, x);
                if d != d0 {
                    return Err(DeltaViolation {
                        i,
                        j,
                        x: x0,
                        x_other: x,
                        delta: d0,
                        delta_other: d,
                    });
                }
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TauViolation {
    pub i: usize,
    pub subset: LeafSet,
    pub xs: Vec<(usize, LeafSet)>,
    pub value: Rational,
    pub other_subset: LeafSet,
    pub other_xs: Vec<(usize, LeafSet)>,
    pub other_value: Rational,
}

/// Condition (iv): `tau_i(I, X)` does not depend on `I` or on the choice of
/// the `X_ij`. Returns the constant values on success.
pub fn condition_iv(f: &KFamily, classes: &[QClass], sweep: &SweepConfig) -> Result<Vec<Rational>, TauViolation> {
    let (n, k) = (f.n(), f.k());
    let canonical = |i: usize, j: usize| canonical_x(n, k, i, j);
    let xs_of = |i: usize, subset: LeafSet, x_of: &dyn Fn(usize, usize) -> LeafSet| -> Vec<(usize, LeafSet)> {
        subset.iter().filter(|&j| j != i).map(|j| (j, x_of(i, j))).collect()
    };
    let base_subset = LeafSet::full(k);
    if n <= sweep.exhaustive_max_n {
        if let Err((i, subset, value, other_value)) = sweep_canonical_tau(f, classes) {
            return Err(TauViolation {
                i,
                subset: base_subset,
                xs: xs_of(i, base_subset, &canonical),
                value,
                other_subset: subset,
                other_xs: xs_of(i, subset, &canonical),
                other_value,
            });
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(sweep.seed ^ 0x1f);
    let mut values = Vec::with_capacity(n);
    for i in 1..=n {
        let base = tau(f, classes, i, base_subset, &canonical);
        let violation = |subset: LeafSet, xs: Vec<(usize, LeafSet)>, value: Rational| TauViolation {
            i,
            subset: base_subset,
            xs: xs_of(i, base_subset, &canonical),
            value: base.clone(),
            other_subset: subset,
            other_xs: xs,
            other_value: value,
        };

        if n > sweep.exhaustive_max_n {
            for _ in 0..sweep.samples {
                let subset = random_subset(&mut rng, LeafSet::full(n), k);
                let value = tau(f, classes, i, subset, &canonical);
                if value != base {
                    return Err(violation(subset, xs_of(i, subset, &canonical), value));
                }
            }
        }
        // independent random X per pair
        for _ in 0..sweep.samples {
            let subset = random_subset(&mut rng, LeafSet::full(n), k);
            let xs: Vec<(usize, LeafSet)> = subset
                .iter()
                .filter(|&j| j != i)
                .map(|j| {
                    (
                        j,
                        random_subset(&mut rng, LeafSet::full(n).without(i).without(j), k - 1),
                    )
                })
                .collect();
            let lookup = |_: usize, j: usize| xs.iter().find(|(jj, _)| *jj == j).unwrap().1;
            let value = tau(f, classes, i, subset, &lookup);
            if value != base {
                return Err(violation(subset, xs.clone(), value));
            }
        }
        values.push(base);
    }
    Ok(values)
}

/// The sum displayed in condition (iii), taken literally: halved
/// differences, classes counted when a member quartet lies inside the set,
/// summed over ordered pairs of `subset`. Audit helper only; with a
/// symmetric X-selector it vanishes for every family.
pub fn condition_iii_literal_sum(
    f: &KFamily,
    classes: &[QClass],
    subset: LeafSet,
    x_of: &dyn Fn(usize, usize) -> LeafSet,
) -> Rational {
    let literal = QMembership::QuartetInside;
    let mut total = int(0);
    for i in subset.iter() {
        for j in subset.iter().filter(|&j| j != i) {
            let x = x_of(i, j);
            let (ix, jx) = (x.with(i), x.with(j));
            total += (f.get(jx) - f.get(ix)) / int(2);
            total += q_hat(classes, ix, literal) - q_hat(classes, jx, literal);
        }
    }
    total
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    Pass,
    Fail { indices: Vec<usize>, message: String },
    Skipped(String),
}

impl Diagnostic {
    pub fn passed(&self) -> bool {
        matches!(self, Diagnostic::Pass)
    }

    pub fn status(&self) -> &'static str {
        match self {
            Diagnostic::Pass => "pass",
            Diagnostic::Fail { .. } => "fail",
            Diagnostic::Skipped(_) => "skipped",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostics {
    pub relaxed_four_point: Diagnostic,
    pub condition_i: Diagnostic,
    pub condition_ii: Diagnostic,
    pub condition_iii: Diagnostic,
    pub condition_iv: Diagnostic,
}

impl Diagnostics {
    pub fn entries(&self) -> [(&'static str, &Diagnostic); 5] {
        [
            ("relaxed_four_point", &self.relaxed_four_point),
            ("condition_i", &self.condition_i),
            ("condition_ii", &self.condition_ii),
            ("condition_iii", &self.condition_iii),
            ("condition_iv", &self.condition_iv),
        ]
    }

    pub fn all_pass(&self) -> bool {
        self.entries().iter().all(|(_, d)| d.passed())
    }
}

/// Why a family was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub stage: u8,
    pub stage_name: &'static str,
    pub indices: Vec<usize>,
    pub message: String,
}

#[derive(Debug, Clone)]
pub struct Verdict {
    pub ip_l_treelike: bool,
    pub p_l_treelike: bool,
    pub tree: Option<WeightedTree>,
    /// `tau[i - 1] = k * twig(i)` of the realizing tree.
    pub tau: Option<Vec<Rational>>,
    pub diagnostics: Diagnostics,
    pub failure: Option<Failure>,
}

fn four_point_diag(v: Result<(), FourPointViolation>) -> Diagnostic {
    match v {
        Ok(()) => Diagnostic::Pass,
        Err(v) => Diagnostic::Fail {
            indices: v.quartet.to_vec(),
            message: format!(
                "pairing sums {} on {:?}",
                v.sums.iter().map(format_rational).collect::<Vec<_>>().join(", "),
                v.quartet
            ),
        },
    }
}

fn diagnostics_for(f: &KFamily, p: &PairTable, sweep: &SweepConfig) -> Diagnostics {
    let relaxed_four_point = four_point_diag(relaxed_four_point_check(p));
    let condition_i = four_point_diag(four_point_check(p));
    if f.k() < 3 {
        let skip = || Diagnostic::Skipped("k = 2: the pair table is the family".to_string());
        return Diagnostics {
            relaxed_four_point,
            condition_i,
            condition_ii: skip(),
            condition_iii: skip(),
            condition_iv: skip(),
        };
    }
    let condition_ii = match condition_ii(f) {
        Ok(()) => Diagnostic::Pass,
        Err(v) => Diagnostic::Fail {
            indices: v.quartet.to_vec(),
            message: format!(
                "sides {} | {} are both smaller than k but the pairing sums are {}",
                v.side_ab,
                v.side_cd,
                v.sums.iter().map(format_rational).collect::<Vec<_>>().join(", ")
            ),
        },
    };
    let (condition_iii, condition_iv) = match q_classes(p, f.k()) {
        Err(e) => {
            let why = format!("quartet classes unavailable: {e}");
            (Diagnostic::Skipped(why.clone()), Diagnostic::Skipped(why))
        }
        Ok(classes) => {
            let iii = match condition_iii(f, &classes, sweep) {
                Ok(()) => Diagnostic::Pass,
                Err(v) => Diagnostic::Fail {
                    indices: vec![v.i, v.j],
                    message: format!(
                        "delta({}, {}, X) is {} for X = {} but {} for X = {}",
                        v.i,
                        v.j,
                        format_rational(&v.delta),
                        v.x,
                        format_rational(&v.delta_other),
                        v.x_other
                    ),
                },
            };
            let iv = match condition_iv(f, &classes, sweep) {
                Ok(_) => Diagnostic::Pass,
                Err(v) => Diagnostic::Fail {
                    indices: vec![v.i],
                    message: format!(
                        "tau_{} is {} on I = {} but {} on I = {}",
                        v.i,
                        format_rational(&v.value),
                        v.subset,
                        format_rational(&v.other_value),
                        v.other_subset
                    ),
                },
            };
            (iii, iv)
        }
    };
    Diagnostics {
        relaxed_four_point,
        condition_i,
        condition_ii,
        condition_iii,
        condition_iv,
    }
}

fn failure_indices(failure: &ReconstructFailure) -> Vec<usize> {
    match failure {
        ReconstructFailure::KOutOfRange { .. } => Vec::new(),
        ReconstructFailure::FourPoint(v) => v.quartet.to_vec(),
        ReconstructFailure::PairTree(PairTreeError::Inconsistent(x)) => vec![*x],
        ReconstructFailure::PairTree(PairTreeError::Mismatch { i, j, .. }) => vec![*i, *j],
        ReconstructFailure::PairTree(PairTreeError::TooFewLeaves) => Vec::new(),
        ReconstructFailure::NotPseudostar { split, .. } => split.to_vec(),
        ReconstructFailure::Classes(e) => e.quartet().map(|q| q.to_vec()).unwrap_or_default(),
        ReconstructFailure::Rescale(RescaleError::UnmatchedClass(q)) => q.to_vec(),
        ReconstructFailure::Rescale(
            RescaleError::UnmatchedEdge(split)
            | RescaleError::ZeroDenominator(split)
            | RescaleError::RouteMismatch { split, .. },
        ) => split.to_vec(),
        ReconstructFailure::TwigNotConstant { leaf, subset, .. } => {
            std::iter::once(*leaf).chain(subset.iter()).collect()
        }
    }
}

/// Decides with the default sweep configuration.
pub fn decide(f: &KFamily) -> Result<Verdict, KRangeError> {
    decide_with(f, &SweepConfig::default())
}

pub fn decide_with(f: &KFamily, sweep: &SweepConfig) -> Result<Verdict, KRangeError> {
    let (n, k) = (f.n(), f.k());
    if k < 2 || k + 1 > n {
        return Err(KRangeError {
            k,
            max: n.saturating_sub(1),
        });
    }
    let p = s_table(f);
    let diagnostics = diagnostics_for(f, &p, sweep);
    let rejected = |failure: Failure| Verdict {
        ip_l_treelike: false,
        p_l_treelike: false,
        tree: None,
        tau: None,
        diagnostics: diagnostics.clone(),
        failure: Some(failure),
    };

    let result = match reconstruct(f) {
        Ok(r) => r,
        Err(e) => {
            return Ok(rejected(Failure {
                stage: e.stage(),
                stage_name: e.stage_name(),
                indices: failure_indices(&e),
                message: e.to_string(),
            }))
        }
    };

    let rebuilt = result
        .tree
        .k_dissimilarity(k)
        .expect("reconstruction keeps the leaf set");
    if let Some((subset, expected)) = f.iter().find(|(s, d)| rebuilt.get(*s) != *d) {
        return Ok(rejected(Failure {
            stage: 7,
            stage_name: "verify",
            indices: subset.to_vec(),
            message: format!(
                "reconstructed tree gives {} on {} instead of {}",
                format_rational(rebuilt.get(subset)),
                subset,
                format_rational(expected)
            ),
        }));
    }

    let p_l_treelike = result.tree.is_positive() && result.tau.iter().all(Signed::is_positive);
    Ok(Verdict {
        ip_l_treelike: true,
        p_l_treelike,
        tree: Some(result.tree),
        tau: Some(result.tau),
        diagnostics,
        failure: None,
    })
}
