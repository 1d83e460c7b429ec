//! k-dissimilarity families, the pair table obtained by summing them, the
//! 4-point conditions and the quartet classes that identify internal edges.
//!
//! Leaf sides recovered from a pair table (`l_set`) include the two quartet
//! endpoints themselves, so the two sides of a class partition `{1..n}` and
//! their sizes are the sizes of the corresponding split.

use num_traits::{Signed, Zero};
use thiserror::Error;

use crate::leafset::{LeafSet, MAX_LEAVES};
use crate::number::{binomial, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FamilyError {
    #[error("need 2 <= k <= n - 1 with n <= {MAX_LEAVES}, got n = {n}, k = {k}")]
    OutOfRange { n: usize, k: usize },
    #[error("{0} is not a {1}-subset of the index set")]
    BadSubset(LeafSet, usize),
    #[error("subset {0} is listed twice")]
    Duplicate(LeafSet),
    #[error("subset {0} is missing")]
    Missing(LeafSet),
    #[error("restriction to {got} indices needs more than k = {k}")]
    RestrictionTooSmall { got: usize, k: usize },
}

/// Values `D_I` for every k-subset `I` of `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KFamily {
    n: usize,
    k: usize,
    // indexed by colex rank
    values: Vec<Rational>,
}

impl KFamily {
    fn check_range(n: usize, k: usize) -> Result<(), FamilyError> {
        if n > MAX_LEAVES || k < 2 || k + 1 > n {
            return Err(FamilyError::OutOfRange { n, k });
        }
        Ok(())
    }

    pub fn from_fn(n: usize, k: usize, mut value: impl FnMut(LeafSet) -> Rational) -> Result<Self, FamilyError> {
        Self::check_range(n, k)?;
        let mut values = vec![Rational::zero(); binomial(n as i64, k as i64) as usize];
        for set in LeafSet::full(n).subsets(k) {
            values[set.colex_rank()] = value(set);
        }
        Ok(KFamily { n, k, values })
    }

    /// Builds a family from explicit entries, which must cover every
    /// k-subset exactly once.
    pub fn from_entries(
        n: usize,
        k: usize,
        entries: impl IntoIterator<Item = (LeafSet, Rational)>,
    ) -> Result<Self, FamilyError> {
        Self::check_range(n, k)?;
        let universe = LeafSet::full(n);
        let mut values: Vec<Option<Rational>> = vec![None; binomial(n as i64, k as i64) as usize];
        for (set, value) in entries {
            if set.len() != k || !set.is_subset(universe) {
                return Err(FamilyError::BadSubset(set, k));
            }
            let slot = &mut values[set.colex_rank()];
            if slot.is_some() {
                return Err(FamilyError::Duplicate(set));
            }
            *slot = Some(value);
        }
        if let Some(missing) = universe.subsets(k).find(|s| values[s.colex_rank()].is_none()) {
            return Err(FamilyError::Missing(missing));
        }
        Ok(KFamily {
            n,
            k,
            values: values.into_iter().map(Option::unwrap).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn universe(&self) -> LeafSet {
        LeafSet::full(self.n)
    }

    fn check_subset(&self, set: LeafSet) {
        assert!(
            set.len() == self.k && set.is_subset(self.universe()),
            "{set} is not a {}-subset of 1..={}",
            self.k,
            self.n
        );
    }

    /// `D_I`. Panics unless `set` is a k-subset of `{1..n}`.
    pub fn get(&self, set: LeafSet) -> &Rational {
        self.check_subset(set);
        &self.values[set.colex_rank()]
    }

    pub fn set(&mut self, set: LeafSet, value: Rational) {
        self.check_subset(set);
        self.values[set.colex_rank()] = value;
    }

    #[must_use]
    pub fn with_value(&self, set: LeafSet, value: Rational) -> Self {
        let mut out = self.clone();
        out.set(set, value);
        out
    }

    /// Entries in lexicographic order of the sorted index tuple.
    pub fn iter(&self) -> impl Iterator<Item = (LeafSet, &Rational)> + '_ {
        self.universe()
            .subsets(self.k)
            .map(move |s| (s, &self.values[s.colex_rank()]))
    }

    pub fn restrict(&self, subset: LeafSet) -> Result<KFamily, FamilyError> {
        restrict_family(self, subset)
    }
}

/// Symmetric values on the 2-subsets of `{1..n}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTable {
    n: usize,
    values: Vec<Rational>,
}

impl PairTable {
    pub fn from_fn(n: usize, mut value: impl FnMut(usize, usize) -> Rational) -> Self {
        assert!(n <= MAX_LEAVES);
        let mut values = vec![Rational::zero(); binomial(n as i64, 2) as usize];
        for pair in LeafSet::full(n).subsets(2) {
            let (i, j) = (pair.min().unwrap(), pair.max().unwrap());
            values[pair.colex_rank()] = value(i, j);
        }
        PairTable { n, values }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `S_{i,j}`; symmetric. Panics when `i == j` or out of range.
    pub fn get(&self, i: usize, j: usize) -> &Rational {
        assert!(
            i != j && (1..=self.n).contains(&i) && (1..=self.n).contains(&j),
            "bad pair ({i}, {j})"
        );
        &self.values[LeafSet::from_labels([i, j]).colex_rank()]
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), &Rational)> + '_ {
        LeafSet::full(self.n)
            .subsets(2)
            .map(move |s| ((s.min().unwrap(), s.max().unwrap()), &self.values[s.colex_rank()]))
    }

    fn sum2(&self, a: usize, b: usize, c: usize, d: usize) -> Rational {
        self.get(a, b) + self.get(c, d)
    }

    /// `[S_ab + S_cd, S_ac + S_bd, S_ad + S_bc]`.
    pub fn pairing_sums(&self, [a, b, c, d]: [usize; 4]) -> [Rational; 3] {
        [self.sum2(a, b, c, d), self.sum2(a, c, b, d), self.sum2(a, d, b, c)]
    }
}

impl From<&KFamily> for PairTable {
    fn from(f: &KFamily) -> Self {
        s_table(f)
    }
}

/// `S_{i,j}` = sum of `D_I` over the k-subsets containing both `i` and `j`.
/// For `k = 2` this is the family itself.
pub fn s_table(f: &KFamily) -> PairTable {
    let mut values = vec![Rational::zero(); binomial(f.n as i64, 2) as usize];
    for (set, d) in f.iter() {
        for pair in set.subsets(2) {
            values[pair.colex_rank()] += d;
        }
    }
    PairTable { n: f.n, values }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FourPointViolation {
    pub quartet: [usize; 4],
    pub sums: [Rational; 3],
}

fn quartets(n: usize) -> impl Iterator<Item = [usize; 4]> {
    LeafSet::full(n).subsets(4).map(|s| {
        let v = s.to_vec();
        [v[0], v[1], v[2], v[3]]
    })
}

/// The maximum of the three pairing sums is attained at least twice on every
/// quartet. Reports the lexicographically first violating quartet.
pub fn four_point_check(p: &PairTable) -> Result<(), FourPointViolation> {
    for quartet in quartets(p.n) {
        let sums = p.pairing_sums(quartet);
        let max = sums.iter().max().unwrap();
        if sums.iter().filter(|s| *s == max).count() < 2 {
            return Err(FourPointViolation { quartet, sums });
        }
    }
    Ok(())
}

/// At least two of the three pairing sums coincide on every quartet.
pub fn relaxed_four_point_check(p: &PairTable) -> Result<(), FourPointViolation> {
    for quartet in quartets(p.n) {
        let sums = p.pairing_sums(quartet);
        if sums[0] != sums[1] && sums[1] != sums[2] && sums[0] != sums[2] {
            return Err(FourPointViolation { quartet, sums });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSide {
    /// `{a, b}` of `(a, b, c, d)`.
    Ab,
    /// `{c, d}` of `(a, b, c, d)`.
    Cd,
}

fn differences_constant(p: &PairTable, x: usize, base: usize, others: [usize; 3]) -> bool {
    let diff = |z: usize| p.get(x, z) - p.get(base, z);
    let first = diff(others[0]);
    others[1..].iter().all(|&z| diff(z) == first)
}

fn l_bar(p: &PairTable, (a, b): (usize, usize), (c, d): (usize, usize)) -> LeafSet {
    let quartet = LeafSet::from_labels([a, b, c, d]);
    let mut out = LeafSet::from_labels([a, b]);
    for x in LeafSet::full(p.n).minus(quartet).iter() {
        if differences_constant(p, x, a, [b, c, d]) || differences_constant(p, x, b, [a, c, d]) {
            out = out.with(x);
        }
    }
    out
}

/// Leaves that behave like `a` or `b` (or like `c` or `d`) relative to the
/// other pair, endpoints included.
pub fn l_set(p: &PairTable, [a, b, c, d]: [usize; 4], side: PairSide) -> LeafSet {
    match side {
        PairSide::Ab => l_bar(p, (a, b), (c, d)),
        PairSide::Cd => l_bar(p, (c, d), (a, b)),
    }
}

/// Rescaling denominator `C(|A| - 2, k - 2) + C(|B| - 2, k - 2)` for a split
/// with side sizes `|A|`, `|B|`.
pub fn split_denominator(side_a: usize, side_b: usize, k: usize) -> u64 {
    let r = k as i64 - 2;
    binomial(side_a as i64 - 2, r) + binomial(side_b as i64 - 2, r)
}

/// One internal edge as seen from the pair table: the quartets whose bridge
/// is that single edge, the split they determine and the edge's rescaled
/// weight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QClass {
    /// First member found in lexicographic scan order, as `(a, b, c, d)`.
    pub quartet: [usize; 4],
    pub side_ab: LeafSet,
    pub side_cd: LeafSet,
    /// `S_ac + S_bd - S_ab - S_cd`, twice the edge weight in the pair-table tree.
    pub gap: Rational,
    pub denominator: u64,
    pub wtilde: Rational,
    pub members: Vec<[usize; 4]>,
}

impl QClass {
    /// Whether this class's edge lies in the subtree spanned by `set`.
    pub fn spans(&self, set: LeafSet) -> bool {
        self.side_ab.intersects(set) && self.side_cd.intersects(set)
    }

    /// Whether the class separates `side` from its complement.
    pub fn has_split(&self, side: LeafSet) -> bool {
        side == self.side_ab || side == self.side_cd
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QClassError {
    #[error("quartet classes need k >= 3, got {0}")]
    KTooSmall(usize),
    #[error("sides {side_ab} | {side_cd} of quartet {quartet:?} overlap")]
    OverlappingSides {
        quartet: [usize; 4],
        side_ab: LeafSet,
        side_cd: LeafSet,
    },
    #[error("quartets {0:?} and {1:?} are equivalent but disagree on their sides or gap")]
    Inconsistent([usize; 4], [usize; 4]),
    #[error("both sides of {side_ab} | {side_cd} are smaller than k; rescaling denominator vanishes")]
    ZeroDenominator {
        quartet: [usize; 4],
        side_ab: LeafSet,
        side_cd: LeafSet,
    },
}

impl QClassError {
    /// The offending quartet, when there is one.
    pub fn quartet(&self) -> Option<[usize; 4]> {
        match self {
            QClassError::KTooSmall(_) => None,
            QClassError::OverlappingSides { quartet, .. } | QClassError::ZeroDenominator { quartet, .. } => {
                Some(*quartet)
            }
            QClassError::Inconsistent(_, q) => Some(*q),
        }
    }
}

struct Candidate {
    quartet: [usize; 4],
    side_ab: LeafSet,
    side_cd: LeafSet,
    gap: Rational,
}

impl Candidate {
    fn pairs(&self) -> (LeafSet, LeafSet) {
        let [a, b, c, d] = self.quartet;
        (LeafSet::from_labels([a, b]), LeafSet::from_labels([c, d]))
    }

    fn equivalent(&self, other: &Candidate) -> bool {
        let (ab, cd) = self.pairs();
        let (ab2, cd2) = other.pairs();
        let straight = ab.is_subset(other.side_ab)
            && cd.is_subset(other.side_cd)
            && ab2.is_subset(self.side_ab)
            && cd2.is_subset(self.side_cd);
        let swapped = cd.is_subset(other.side_ab)
            && ab.is_subset(other.side_cd)
            && ab2.is_subset(self.side_cd)
            && cd2.is_subset(self.side_ab);
        straight || swapped
    }

    fn same_split(&self, other: &Candidate) -> bool {
        (self.side_ab == other.side_ab && self.side_cd == other.side_cd)
            || (self.side_ab == other.side_cd && self.side_cd == other.side_ab)
    }
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// All quartets `(a,b,c,d)` with `S_ab + S_cd < S_ac + S_bd = S_ad + S_bc`
/// whose sides cover `{1..n}`, grouped into classes (one per internal edge).
pub fn q_classes(p: &PairTable, k: usize) -> Result<Vec<QClass>, QClassError> {
    if k < 3 {
        return Err(QClassError::KTooSmall(k));
    }
    let universe = LeafSet::full(p.n);
    let mut candidates = Vec::new();
    for [a, b, c, d] in quartets(p.n) {
        for quartet in [[a, b, c, d], [a, c, b, d], [a, d, b, c]] {
            let [s_abcd, s_acbd, s_adbc] = p.pairing_sums(quartet);
            if !(s_abcd < s_acbd && s_acbd == s_adbc) {
                continue;
            }
            let side_ab = l_set(p, quartet, PairSide::Ab);
            let side_cd = l_set(p, quartet, PairSide::Cd);
            if (side_ab | side_cd) != universe {
                continue;
            }
            if side_ab.intersects(side_cd) {
                return Err(QClassError::OverlappingSides {
                    quartet,
                    side_ab,
                    side_cd,
                });
            }
            candidates.push(Candidate {
                quartet,
                side_ab,
                side_cd,
                gap: s_acbd - s_abcd,
            });
        }
    }

    let mut parent: Vec<usize> = (0..candidates.len()).collect();
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            if candidates[i].equivalent(&candidates[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }

    let mut classes: Vec<QClass> = Vec::new();
    let mut class_of_root = vec![usize::MAX; candidates.len()];
    for i in 0..candidates.len() {
        let root = find(&mut parent, i);
        let cand = &candidates[i];
        if class_of_root[root] == usize::MAX {
            let denominator = split_denominator(cand.side_ab.len(), cand.side_cd.len(), k);
            if denominator == 0 {
                return Err(QClassError::ZeroDenominator {
                    quartet: cand.quartet,
                    side_ab: cand.side_ab,
                    side_cd: cand.side_cd,
                });
            }
            class_of_root[root] = classes.len();
            classes.push(QClass {
                quartet: cand.quartet,
                side_ab: cand.side_ab,
                side_cd: cand.side_cd,
                gap: cand.gap.clone(),
                denominator,
                wtilde: &cand.gap / Rational::from_integer(denominator.into()),
                members: vec![cand.quartet],
            });
        } else {
            let class = &mut classes[class_of_root[root]];
            let rep = &candidates[root];
            if !cand.same_split(rep) || cand.gap != rep.gap {
                return Err(QClassError::Inconsistent(rep.quartet, cand.quartet));
            }
            class.members.push(cand.quartet);
        }
    }
    debug_assert!(classes.iter().all(|c| c.wtilde.is_positive()));
    Ok(classes)
}

/// How a class is counted as belonging to a leaf set `W`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QMembership {
    /// Both sides of the class meet `W`: its edge lies in the subtree spanned
    /// by `W`.
    #[default]
    SidesMeet,
    /// Some member quartet lies inside `W`. Kept for auditing; it misses
    /// edges whenever `|W| < 4`.
    QuartetInside,
}

impl QMembership {
    pub fn includes(self, class: &QClass, set: LeafSet) -> bool {
        match self {
            QMembership::SidesMeet => class.spans(set),
            QMembership::QuartetInside => class.members.iter().any(|q| LeafSet::from_labels(*q).is_subset(set)),
        }
    }
}

/// Sum of `wtilde` over the classes belonging to `set`.
pub fn q_hat(classes: &[QClass], set: LeafSet, membership: QMembership) -> Rational {
    classes
        .iter()
        .filter(|c| membership.includes(c, set))
        .map(|c| &c.wtilde)
        .sum()
}

/// The subfamily on `subset`, relabelled order-preservingly to `1..=|subset|`.
pub fn restrict_family(f: &KFamily, subset: LeafSet) -> Result<KFamily, FamilyError> {
    if !subset.is_subset(f.universe()) {
        return Err(FamilyError::BadSubset(subset, subset.len()));
    }
    if subset.len() <= f.k {
        return Err(FamilyError::RestrictionTooSmall {
            got: subset.len(),
            k: f.k,
        });
    }
    let labels = subset.to_vec();
    KFamily::from_fn(labels.len(), f.k, |local| {
        f.get(local.iter().map(|i| labels[i - 1]).collect()).clone()
    })
}
