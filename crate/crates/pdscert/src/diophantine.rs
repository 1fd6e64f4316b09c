//! Enumeration of nonincreasing nonnegative-integer tuples of fixed length
//! with prescribed sum and sum of squares.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiophantineError {
    #[error("tuple length must be at least 1")]
    ZeroLength,
    #[error("sum of squares {sum_squares} is below the Cauchy-Schwarz floor {sum}^2/{length}")]
    CauchySchwarz {
        length: usize,
        sum: u64,
        sum_squares: u64,
    },
}

/// A system `sum(C_j) = S1, sum(C_j^2) = S2` over nonincreasing nonnegative
/// integer tuples of fixed length.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CSystem {
    length: usize,
    sum: u64,
    sum_squares: u64,
}

impl CSystem {
    /// Rejects zero length and systems violating the Cauchy-Schwarz
    /// necessary condition `S2 * L >= S1^2`.
    pub fn new(length: usize, sum: u64, sum_squares: u64) -> Result<Self, DiophantineError> {
        if length == 0 {
            return Err(DiophantineError::ZeroLength);
        }
        if (sum_squares as u128) * (length as u128) < (sum as u128) * (sum as u128) {
            return Err(DiophantineError::CauchySchwarz {
                length,
                sum,
                sum_squares,
            });
        }
        Ok(CSystem {
            length,
            sum,
            sum_squares,
        })
    }

    pub fn length(&self) -> usize {
        self.length
    }

    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn sum_squares(&self) -> u64 {
        self.sum_squares
    }
}

/// Complete, duplicate-free list of nonincreasing solutions, in
/// lexicographically descending order. Infeasible systems yield an empty
/// list.
pub fn enumerate_solutions(sys: &CSystem) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(sys.length);
    let cap = sys.sum.min(sys.sum_squares.isqrt());
    descend(sys.length, sys.sum, sys.sum_squares, cap, &mut prefix, &mut out);
    out
}

fn descend(
    remaining: usize,
    sum: u64,
    sum_squares: u64,
    cap: u64,
    prefix: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
) {
    if remaining == 0 {
        if sum == 0 && sum_squares == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let hi = cap.min(sum).min(sum_squares.isqrt());
    // descending choice order keeps the output lexicographically descending
    for c in (0..=hi).rev() {
        let rest = (remaining - 1) as u64;
        let s = sum - c;
        let q = sum_squares - c * c;
        // remaining entries are bounded by c
        if s > c * rest || q > c * c * rest {
            continue;
        }
        // Cauchy-Schwarz on the tail
        if (q as u128) * (rest as u128) < (s as u128) * (s as u128) {
            continue;
        }
        prefix.push(c);
        descend(remaining - 1, s, q, c, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: filter every partition of `sum` with at most
    /// `length` parts (padded with zeros) by the sum-of-squares target.
    fn naive_solutions(length: usize, sum: u64, sum_squares: u64) -> Vec<Vec<u64>> {
        let mut parts = Vec::new();
        let mut acc = Vec::new();
        partitions_into(sum, sum, length, &mut acc, &mut parts);
        let mut hits: Vec<Vec<u64>> = parts
            .into_iter()
            .map(|mut p| {
                p.resize(length, 0);
                p
            })
            .filter(|p| p.iter().map(|&x| x * x).sum::<u64>() == sum_squares)
            .collect();
        hits.sort();
        hits.reverse();
        hits
    }

    fn partitions_into(n: u64, max: u64, slots: usize, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 0 {
            out.push(acc.clone());
            return;
        }
        if slots == 0 {
            return;
        }
        for part in (1..=max.min(n)).rev() {
            acc.push(part);
            partitions_into(n - part, part, slots - 1, acc, out);
            acc.pop();
        }
    }

    #[test]
    fn the_twenty_forty_eight_system() {
        let sys = CSystem::new(13, 20, 48).unwrap();
        let sols = enumerate_solutions(&sys);
        let expected: Vec<Vec<u64>> = vec![
            vec![5, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            vec![5, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 0],
            vec![4, 4, 2, 2, 1, 1, 1, 1, 1, 1, 1, 1, 0],
            vec![4, 3, 3, 2, 2, 1, 1, 1, 1, 1, 1, 0, 0],
            vec![4, 3, 2, 2, 2, 2, 2, 1, 1, 1, 0, 0, 0],
            vec![4, 2, 2, 2, 2, 2, 2, 2, 2, 0, 0, 0, 0],
            vec![3, 3, 3, 3, 2, 2, 1, 1, 1, 1, 0, 0, 0],
            vec![3, 3, 3, 2, 2, 2, 2, 2, 1, 0, 0, 0, 0],
        ];
        assert_eq!(sols, expected);
    }

    #[test]
    fn the_eighteen_thirty_two_system() {
        let sys = CSystem::new(13, 18, 32).unwrap();
        let sols = enumerate_solutions(&sys);
        let expected: Vec<Vec<u64>> = vec![
            vec![3, 3, 2, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1],
            vec![3, 2, 2, 2, 2, 1, 1, 1, 1, 1, 1, 1, 0],
            vec![2, 2, 2, 2, 2, 2, 2, 1, 1, 1, 1, 0, 0],
        ];
        assert_eq!(sols, expected);
    }

    #[test]
    fn zero_system_has_the_zero_tuple() {
        let sys = CSystem::new(13, 0, 0).unwrap();
        assert_eq!(enumerate_solutions(&sys), vec![vec![0u64; 13]]);
    }

    #[test]
    fn construction_guards() {
        assert!(matches!(
            CSystem::new(0, 1, 1),
            Err(DiophantineError::ZeroLength)
        ));
        // 13 entries summing to 20 need sum of squares at least ceil(400/13) = 31
        assert!(matches!(
            CSystem::new(13, 20, 30),
            Err(DiophantineError::CauchySchwarz { .. })
        ));
        assert!(CSystem::new(13, 20, 31).is_ok());
    }

    #[test]
    fn feasible_construction_can_still_be_unsolvable() {
        // sum 1 forces a single 1, whose square is 1, never 2
        let sys = CSystem::new(13, 1, 2).unwrap();
        assert!(enumerate_solutions(&sys).is_empty());
        // sum of squares above sum^2 is unreachable
        let sys = CSystem::new(13, 3, 10).unwrap();
        assert!(enumerate_solutions(&sys).is_empty());
    }

    #[test]
    fn agrees_with_naive_enumeration_up_to_twenty() {
        for sum in 0..=20u64 {
            for sum_squares in 0..=sum * sum {
                let expected = naive_solutions(13, sum, sum_squares);
                match CSystem::new(13, sum, sum_squares) {
                    Ok(sys) => assert_eq!(
                        enumerate_solutions(&sys),
                        expected,
                        "mismatch at sum={sum} sum_squares={sum_squares}"
                    ),
                    Err(_) => assert!(
                        expected.is_empty(),
                        "constructor rejected a solvable system sum={sum} sum_squares={sum_squares}"
                    ),
                }
            }
        }
    }

    #[test]
    fn every_solution_is_nonincreasing_and_exact() {
        let sys = CSystem::new(13, 20, 48).unwrap();
        for sol in enumerate_solutions(&sys) {
            assert_eq!(sol.len(), 13);
            assert!(sol.windows(2).all(|w| w[0] >= w[1]));
            assert_eq!(sol.iter().sum::<u64>(), 20);
            assert_eq!(sol.iter().map(|&x| x * x).sum::<u64>(), 48);
        }
    }
}
