//! Exact determinants via fraction-free (Bareiss) elimination.
//!
//! Integer matrices are reduced with a fast fixed-width path that falls back
//! to arbitrary precision on overflow; rational matrices are cleared to
//! integers row by row first, so no intermediate quotient ever rounds.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Determinant of an integer matrix in `i128`, or `None` if any intermediate
/// product would overflow (callers then retry in arbitrary precision).
pub(crate) fn det_i128(mut m: Vec<Vec<i128>>) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let a = m[k][k].checked_mul(m[i][j])?;
                let b = m[i][k].checked_mul(m[k][j])?;
                // Bareiss guarantees this division is exact.
                m[i][j] = a.checked_sub(b)? / prev;
            }
            m[i][k] = 0;
        }
        prev = m[k][k];
    }
    Some(sign * m[n - 1][n - 1])
}

/// Exact determinant of an integer matrix of any size.
pub(crate) fn det_bigint(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (&m[k][k] * &m[i][j] - &m[i][k] * &m[k][j]) / &prev;
            }
            m[i][k] = BigInt::zero();
        }
        prev = m[k][k].clone();
    }
    sign * m[n - 1][n - 1].clone()
}

/// Exact determinant of a rational matrix: clear each row to integers, take
/// the integer determinant, divide the scale factors back out.
pub(crate) fn det_rational(m: &[Vec<BigRational>]) -> BigRational {
    let n = m.len();
    if n == 0 {
        return BigRational::one();
    }
    let mut scale = BigInt::one();
    let mut int_rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
    for row in m {
        let mut lcm = BigInt::one();
        for x in row {
            lcm = num_integer::lcm(lcm, x.denom().abs());
        }
        int_rows.push(row.iter().map(|x| (x * &lcm).to_integer()).collect());
        scale *= lcm;
    }
    BigRational::new(det_bigint(int_rows), scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::FromPrimitive;

    fn big(m: &[&[i64]]) -> Vec<Vec<BigInt>> {
        m.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    #[test]
    fn small_integer_determinants() {
        assert_eq!(det_i128(vec![]), Some(1));
        assert_eq!(det_i128(vec![vec![7]]), Some(7));
        assert_eq!(det_i128(vec![vec![1, 2], vec![3, 4]]), Some(-2));
        // Needs a pivot swap.
        assert_eq!(det_i128(vec![vec![0, 1], vec![1, 0]]), Some(-1));
        // Singular.
        assert_eq!(
            det_i128(vec![vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]),
            Some(0)
        );
        assert_eq!(det_bigint(big(&[&[1, 2], &[3, 4]])), BigInt::from(-2));
    }

    #[test]
    fn overflow_falls_back_cleanly() {
        let huge = i128::MAX / 2;
        assert_eq!(det_i128(vec![vec![huge, huge], vec![-huge, huge]]), None);
        let m = big(&[&[i64::MAX, i64::MAX], &[-i64::MAX, i64::MAX]]);
        let expect = BigInt::from(i64::MAX) * BigInt::from(i64::MAX) * BigInt::from(2);
        assert_eq!(det_bigint(m), expect);
    }

    #[test]
    fn rational_determinant_is_exact() {
        let half = BigRational::from_f64(0.5).unwrap();
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let m = vec![
            vec![half.clone(), third.clone()],
            vec![third.clone(), half.clone()],
        ];
        // 1/4 - 1/9 = 5/36
        let expect = BigRational::new(BigInt::from(5), BigInt::from(36));
        assert_eq!(det_rational(&m), expect);
    }
}
