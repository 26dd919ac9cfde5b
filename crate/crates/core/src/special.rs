//! Factorials, binomials and associated Laguerre polynomials.

use alloc::vec::Vec;

const FACTORIALS: [f64; 21] = [
    1.0,
    1.0,
    2.0,
    6.0,
    24.0,
    120.0,
    720.0,
    5040.0,
    40320.0,
    362880.0,
    3628800.0,
    39916800.0,
    479001600.0,
    6227020800.0,
    87178291200.0,
    1307674368000.0,
    20922789888000.0,
    355687428096000.0,
    6402373705728000.0,
    121645100408832000.0,
    2432902008176640000.0,
];

/// `n!`, exact up to 20 and overflowing to infinity past 170.
pub fn factorial(n: usize) -> f64 {
    if n < FACTORIALS.len() {
        FACTORIALS[n]
    } else {
        ln_factorial(n).exp()
    }
}

/// `ln n!`.
pub fn ln_factorial(n: usize) -> f64 {
    if n < FACTORIALS.len() {
        FACTORIALS[n].ln()
    } else {
        libm::lgamma(n as f64 + 1.0)
    }
}

/// Binomial coefficient with the convention that it vanishes outside `0 <= k <= n`.
pub fn binomial(n: i64, k: i64) -> f64 {
    if n < 0 || k < 0 || k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    if n <= 120 {
        let mut c: u128 = 1;
        for i in 0..k {
            c = c * (n - i) as u128 / (i + 1) as u128;
        }
        c as f64
    } else {
        ln_binomial(n as usize, k as usize).exp().round()
    }
}

/// `ln C(n, k)` for `0 <= k <= n`.
pub fn ln_binomial(n: usize, k: usize) -> f64 {
    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
}

/// `n!!` with `0!! = (-1)!! = 1`. Any other negative argument gives 1 as well,
/// callers guard the index range themselves.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut i = n;
    while i > 1 {
        acc *= i as f64;
        i -= 2;
    }
    acc
}

/// `ln n!!`, same conventions as [`double_factorial`].
pub fn ln_double_factorial(n: i64) -> f64 {
    if n <= 1 {
        return 0.0;
    }
    let n = n as f64;
    // n!! = 2^{n/2} Gamma(n/2 + 1)                 for even n
    // n!! = 2^{(n+1)/2} Gamma(n/2 + 1) / sqrt(pi)  for odd n
    let base = 0.5 * n * core::f64::consts::LN_2 + libm::lgamma(0.5 * n + 1.0);
    if (n as i64) % 2 == 0 {
        base
    } else {
        base + 0.5 * core::f64::consts::LN_2 - 0.5 * core::f64::consts::PI.ln()
    }
}

/// Associated Laguerre polynomial `L_n^k(x)` by the three-term recurrence.
///
/// The recurrence is used for negative `k` too, which gives the analytic
/// continuation of the polynomial in its order.
pub fn laguerre(n: usize, k: i64, x: f64) -> f64 {
    let k = k as f64;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + k - x;
    for i in 1..n {
        let i = i as f64;
        let next = ((2.0 * i + 1.0 + k - x) * cur - (i + k) * prev) / (i + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_0^k(x), ..., L_{len-1}^k(x)` in one pass.
pub fn laguerre_sequence(len: usize, k: i64, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    let k = k as f64;
    out.push(1.0);
    if len == 1 {
        return out;
    }
    out.push(1.0 + k - x);
    for i in 1..len - 1 {
        let fi = i as f64;
        let next = ((2.0 * fi + 1.0 + k - x) * out[i] - (fi + k) * out[i - 1]) / (fi + 1.0);
        out.push(next);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // explicit sum L_n^k(x) = sum_i (-1)^i C(n+k, n-i) x^i / i!
    fn laguerre_explicit(n: usize, k: i64, x: f64) -> f64 {
        (0..=n)
            .map(|i| {
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                sign * binomial(n as i64 + k, (n - i) as i64) * x.powi(i as i32) / factorial(i)
            })
            .sum()
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), 1.0);
        assert_eq!(factorial(10), 3628800.0);
        assert_relative_eq!(factorial(25), 1.5511210043330986e25, max_relative = 1e-13);
        assert!(factorial(171).is_infinite());
        assert_relative_eq!(ln_factorial(200), 863.2319871924054, max_relative = 1e-14);
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), 10.0);
        assert_eq!(binomial(5, -1), 0.0);
        assert_eq!(binomial(5, 6), 0.0);
        assert_eq!(binomial(-1, 0), 0.0);
        assert_eq!(binomial(0, 0), 1.0);
        assert_relative_eq!(binomial(100, 50), 1.0089134454556419e29, max_relative = 1e-15);
        assert_relative_eq!(binomial(150, 75), 9.282606973670874e43, max_relative = 1e-12);
    }

    #[test]
    fn double_factorials() {
        assert_eq!(double_factorial(-1), 1.0);
        assert_eq!(double_factorial(0), 1.0);
        assert_eq!(double_factorial(7), 105.0);
        assert_eq!(double_factorial(8), 384.0);
        for n in -1..40 {
            assert_relative_eq!(
                ln_double_factorial(n),
                double_factorial(n).ln(),
                max_relative = 1e-12,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn laguerre_matches_explicit_sum() {
        for n in 0..12 {
            for k in 0..6 {
                for &x in &[0.0, 0.3, 1.7, 4.0] {
                    assert_relative_eq!(
                        laguerre(n, k, x),
                        laguerre_explicit(n, k, x),
                        max_relative = 1e-10,
                        epsilon = 1e-10
                    );
                }
            }
        }
    }

    #[test]
    fn laguerre_negative_order_continuation() {
        // L_k^{j-k}(x) = (-x)^{k-j} j!/k! L_j^{k-j}(x)   for j < k
        for k in 1..10usize {
            for j in 0..k {
                for &x in &[0.4, 1.3, 2.9] {
                    let d = (k - j) as i32;
                    let lhs = laguerre(k, -(d as i64), x);
                    let rhs = (-x).powi(d) * factorial(j) / factorial(k) * laguerre(j, d as i64, x);
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-9, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn sequence_agrees_with_pointwise() {
        let seq = laguerre_sequence(30, 3, 2.5);
        for (n, v) in seq.iter().enumerate() {
            assert_eq!(*v, laguerre(n, 3, 2.5));
        }
    }
}
