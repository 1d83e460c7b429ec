//! Exact linear algebra over the rationals: affine solution spaces of
//! `A w = b` and strict feasibility of `c . y + c0 > 0` systems.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::number::{int, Rational};

/// `{ particular + sum_t y_t kernel[t] }` is the full solution set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineSolution {
    pub particular: Vec<Rational>,
    pub kernel: Vec<Vec<Rational>>,
}

impl AffineSolution {
    pub fn dimension(&self) -> usize {
        self.kernel.len()
    }

    pub fn point(&self, y: &[Rational]) -> Vec<Rational> {
        let mut x = self.particular.clone();
        for (coeff, dir) in y.iter().zip(&self.kernel) {
            for (xi, di) in x.iter_mut().zip(dir) {
                *xi += coeff * di;
            }
        }
        x
    }
}

/// Solves `A x = b` for a 0/1 (or small integer) matrix with fraction-free
/// elimination. Returns `None` when the system is inconsistent.
pub fn solve(a: &[Vec<i64>], b: &[Rational]) -> Option<AffineSolution> {
    assert_eq!(a.len(), b.len());
    let cols = a.first().map_or(0, Vec::len);
    // scale each row to clear the denominator of its right-hand side
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let scale = rhs.denom().clone();
            let mut out: Vec<BigInt> = row.iter().map(|&v| BigInt::from(v) * &scale).collect();
            out.push(rhs.numer().clone());
            out
        })
        .collect();

    let rows = m.len();
    let mut prev = BigInt::one();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(p, r);
        for i in r + 1..rows {
            if m[i][c].is_zero() {
                // entries still need the common rescale
                for j in c + 1..=cols {
                    m[i][j] = &m[r][c] * &m[i][j] / &prev;
                }
                continue;
            }
            for j in c + 1..=cols {
                m[i][j] = (&m[r][c] * &m[i][j] - &m[i][c] * &m[r][j]) / &prev;
            }
            m[i][c] = BigInt::zero();
        }
        prev = m[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    if m[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }

    let back = |rhs: &dyn Fn(usize) -> Rational, x: &mut Vec<Rational>| {
        for (t, &pc) in pivots.iter().enumerate().rev() {
            let mut acc = rhs(t);
            for j in pc + 1..cols {
                if !m[t][j].is_zero() && !x[j].is_zero() {
                    acc -= Rational::from_integer(m[t][j].clone()) * &x[j];
                }
            }
            x[pc] = acc / Rational::from_integer(m[t][pc].clone());
        }
    };

    let mut particular = vec![int(0); cols];
    back(&|t| Rational::from_integer(m[t][cols].clone()), &mut particular);

    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let kernel = free
        .iter()
        .map(|&f| {
            let mut x = vec![int(0); cols];
            x[f] = int(1);
            back(&|_| int(0), &mut x);
            x
        })
        .collect();
    Some(AffineSolution { particular, kernel })
}

/// A strict inequality `coeffs . y + constant > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Strict {
    pub coeffs: Vec<Rational>,
    pub constant: Rational,
}

impl Strict {
    fn eval_partial(&self, y: &[Rational], from: usize) -> Rational {
        let mut acc = self.constant.clone();
        for (c, yv) in self.coeffs.iter().zip(y).skip(from) {
            acc += c * yv;
        }
        acc
    }

    // scale so the leading nonzero coefficient is +-1
    fn normalized(mut self) -> Self {
        if let Some(lead) = self.coeffs.iter().find(|c| !c.is_zero()).map(|c| c.abs()) {
            for c in &mut self.coeffs {
                *c /= &lead;
            }
            self.constant /= &lead;
        }
        self
    }
}

/// Fourier-Motzkin elimination for a system of strict inequalities in
/// `dim` unknowns. Returns a witness point when the system is feasible.
pub fn strictly_feasible(system: Vec<Strict>, dim: usize) -> Option<Vec<Rational>> {
    let mut stages: Vec<Vec<Strict>> = Vec::with_capacity(dim);
    let mut current = dedup(system.into_iter().map(Strict::normalized).collect());
    for v in 0..dim {
        if current
            .iter()
            .any(|s| s.coeffs.iter().all(Zero::is_zero) && !s.constant.is_positive())
        {
            return None;
        }
        stages.push(current.clone());
        let (mut pos, mut neg, mut rest) = (Vec::new(), Vec::new(), Vec::new());
        for s in current {
            if s.coeffs[v].is_positive() {
                pos.push(s);
            } else if s.coeffs[v].is_negative() {
                neg.push(s);
            } else {
                rest.push(s);
            }
        }
        for p in &pos {
            for q in &neg {
                // lower bound from p, upper bound from q
                let (a, b) = (&p.coeffs[v], -&q.coeffs[v]);
                let coeffs: Vec<Rational> = p.coeffs.iter().zip(&q.coeffs).map(|(x, y)| x * &b + y * a).collect();
                let constant = &p.constant * &b + &q.constant * a;
                rest.push(Strict { coeffs, constant }.normalized());
            }
        }
        current = dedup(rest);
    }
    if current.iter().any(|s| !s.constant.is_positive()) {
        return None;
    }

    let mut y = vec![int(0); dim];
    for v in (0..dim).rev() {
        let mut lower: Option<Rational> = None;
        let mut upper: Option<Rational> = None;
        for s in &stages[v] {
            let c = &s.coeffs[v];
            if c.is_zero() {
                continue;
            }
            // c * y_v + rest > 0
            let bound = -s.eval_partial(&y, v + 1) / c;
            if c.is_positive() {
                if lower.as_ref().is_none_or(|l| bound > *l) {
                    lower = Some(bound);
                }
            } else if upper.as_ref().is_none_or(|u| bound < *u) {
                upper = Some(bound);
            }
        }
        y[v] = match (lower, upper) {
            (None, None) => int(0),
            (Some(l), None) => l.floor() + int(1),
            (None, Some(u)) => u.ceil() - int(1),
            (Some(l), Some(u)) => {
                debug_assert!(l < u);
                (l + u) / int(2)
            }
        };
    }
    Some(y)
}

fn dedup(mut system: Vec<Strict>) -> Vec<Strict> {
    let mut out: Vec<Strict> = Vec::with_capacity(system.len());
    for s in system.drain(..) {
        if s.coeffs.iter().all(Zero::is_zero) && s.constant.is_positive() {
            continue;
        }
        if let Some(same) = out.iter_mut().find(|o| o.coeffs == s.coeffs) {
            // keep the tighter one
            if s.constant < same.constant {
                same.constant = s.constant;
            }
        } else {
            out.push(s);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;

    #[test]
    fn unique_solution() {
        let a = vec![vec![1, 1], vec![1, -1]];
        let s = solve(&a, &[int(3), ratio(1, 2)]).unwrap();
        assert_eq!(s.particular, vec![ratio(7, 4), ratio(5, 4)]);
        assert_eq!(s.dimension(), 0);
    }

    #[test]
    fn inconsistent_and_underdetermined() {
        let a = vec![vec![1, 1, 0], vec![2, 2, 0]];
        assert!(solve(&a, &[int(1), int(3)]).is_none());
        let s = solve(&a, &[int(1), int(2)]).unwrap();
        assert_eq!(s.dimension(), 2);
        for y in [[int(0), int(0)], [int(2), int(-5)]] {
            let x = s.point(&y);
            assert_eq!(&x[0] + &x[1], int(1));
        }
    }

    #[test]
    fn elimination_skips_empty_columns() {
        let a = vec![vec![0, 1, 1], vec![0, 2, 1], vec![0, 1, 0]];
        let s = solve(&a, &[int(2), int(3), int(1)]).unwrap();
        assert_eq!(s.dimension(), 1);
        assert_eq!(s.particular[1..], [int(1), int(1)]);
    }

    #[test]
    fn fourier_motzkin() {
        // y0 > 0, y1 > y0, 1 - y1 > 0
        let sys = vec![
            Strict {
                coeffs: vec![int(1), int(0)],
                constant: int(0),
            },
            Strict {
                coeffs: vec![int(-1), int(1)],
                constant: int(0),
            },
            Strict {
                coeffs: vec![int(0), int(-1)],
                constant: int(1),
            },
        ];
        let y = strictly_feasible(sys.clone(), 2).unwrap();
        for s in &sys {
            assert!(s.eval_partial(&y, 0).is_positive());
        }
        // y0 > 0 and -y0 > 0
        let bad = vec![
            Strict {
                coeffs: vec![int(1)],
                constant: int(0),
            },
            Strict {
                coeffs: vec![int(-1)],
                constant: int(0),
            },
        ];
        assert!(strictly_feasible(bad, 1).is_none());
        assert_eq!(strictly_feasible(Vec::new(), 0), Some(Vec::new()));
        let closed = vec![Strict {
            coeffs: vec![],
            constant: int(0),
        }];
        assert!(strictly_feasible(closed, 0).is_none());
    }
}
