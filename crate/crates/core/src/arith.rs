//! Small-integer number theory used throughout the crate: gcd, modular
//! exponentiation, valuations, trial factorisation and a smallest-prime-factor
//! sieve.

/// Greatest common divisor of two signed integers, always non-negative.
pub fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a as i64
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// gcd of a slice; 0 for the empty slice or the zero vector.
pub fn gcd_slice(xs: &[i64]) -> i64 {
    xs.iter().fold(0, |g, &x| gcd(g, x))
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Least non-negative residue of `a` modulo `m`.
#[inline]
pub fn rem(a: i128, m: u64) -> u64 {
    a.rem_euclid(m as i128) as u64
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// p-adic valuation of a nonzero integer. Returns `u32::MAX` for zero.
pub fn valuation(a: i128, p: u64) -> u32 {
    if a == 0 {
        return u32::MAX;
    }
    let p = p as i128;
    let mut a = a;
    let mut v = 0;
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    v
}

/// Splits `a = p^v * u` with `p ∤ u`. `a` must be nonzero.
pub fn split_valuation(a: i128, p: u64) -> (u32, i128) {
    debug_assert!(a != 0);
    let pp = p as i128;
    let (mut a, mut v) = (a, 0);
    while a % pp == 0 {
        a /= pp;
        v += 1;
    }
    (v, a)
}

/// Distinct prime factors of |n| by trial division, ascending. Empty for |n| ≤ 1.
pub fn prime_factors(n: u128) -> Vec<u64> {
    let mut n = n;
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    if n % 2 == 0 {
        out.push(2);
        while n % 2 == 0 {
            n /= 2;
        }
    }
    let mut d: u128 = 3;
    while d * d <= n {
        if n % d == 0 {
            out.push(d as u64);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 2;
    }
    if n > 1 {
        out.push(n as u64);
    }
    out
}

/// Factorisation with multiplicities, ascending primes.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    let mut n = n;
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_squarefree(n: i64) -> bool {
    n != 0 && factorize(n.unsigned_abs()).iter().all(|&(_, e)| e == 1)
}

/// Squarefree kernel with sign: the unique squarefree `s` with `n / s` a
/// rational square. `n` must be nonzero.
pub fn squarefree_part(n: i128) -> i128 {
    debug_assert!(n != 0);
    let sign = n.signum();
    let mut m = n.unsigned_abs();
    let mut s: u128 = 1;
    let mut d: u128 = 2;
    while d * d <= m {
        let mut e = 0;
        while m % d == 0 {
            m /= d;
            e += 1;
        }
        if e % 2 == 1 {
            s *= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    s *= m;
    sign * s as i128
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n)
        .iter()
        .fold(n, |acc, &(p, _)| acc / p * (p - 1))
}

/// Smallest-prime-factor table on `0..=limit`, usable for fast factorisation
/// of many small integers.
#[derive(Debug, Clone)]
pub struct Sieve {
    spf: Vec<u32>,
}

impl Sieve {
    pub fn new(limit: u64) -> Self {
        let limit = limit.max(2) as usize;
        let mut spf = vec![0u32; limit + 1];
        for i in 2..=limit {
            if spf[i] == 0 {
                let mut j = i;
                while j <= limit {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        Sieve { spf }
    }

    pub fn limit(&self) -> u64 {
        (self.spf.len() - 1) as u64
    }

    pub fn is_prime(&self, n: u64) -> bool {
        n >= 2 && self.spf[n as usize] as u64 == n
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        (2..self.spf.len())
            .filter(|&i| self.spf[i] as usize == i)
            .map(|i| i as u64)
    }

    /// Pushes the distinct primes dividing `n` (|n| ≤ limit) into `out`.
    pub fn push_prime_factors(&self, n: u64, out: &mut Vec<u64>) {
        let mut n = n as usize;
        while n > 1 {
            let p = self.spf[n] as usize;
            out.push(p as u64);
            while n % p == 0 {
                n /= p;
            }
        }
    }

    pub fn prime_factors(&self, n: u64) -> Vec<u64> {
        let mut v = Vec::new();
        self.push_prime_factors(n, &mut v);
        v
    }
}

/// All primes ≤ limit in ascending order.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Möbius function on `0..=limit` (index 0 is unused and set to 0).
pub fn mobius_table(limit: usize) -> Vec<i8> {
    let mut mu = vec![1i8; limit + 1];
    if limit >= 1 {
        mu[0] = 0;
    }
    let mut is_comp = vec![false; limit + 1];
    for p in 2..=limit {
        if !is_comp[p] {
            let mut j = p;
            while j <= limit {
                if j > p {
                    is_comp[j] = true;
                }
                mu[j] = -mu[j];
                j += p;
            }
            let sq = p.saturating_mul(p);
            let mut j = sq;
            while j <= limit {
                mu[j] = 0;
                j += sq;
            }
        }
    }
    mu
}

/// Riemann zeta at a real argument `s > 1`, by direct summation with an
/// Euler-Maclaurin tail. Accurate to ~1e-14 for s ≥ 2.
pub fn zeta(s: f64) -> f64 {
    assert!(s > 1.0, "zeta is only evaluated for s > 1");
    let n = 64u32;
    let mut sum = 0.0;
    for k in 1..n {
        sum += (k as f64).powf(-s);
    }
    let nf = n as f64;
    // tail: ∫_N^∞ x^{-s} dx + N^{-s}/2 + s N^{-s-1}/12 - s(s+1)(s+2) N^{-s-3}/720
    sum += nf.powf(1.0 - s) / (s - 1.0) + 0.5 * nf.powf(-s) + s * nf.powf(-s - 1.0) / 12.0
        - s * (s + 1.0) * (s + 2.0) * nf.powf(-s - 3.0) / 720.0;
    sum
}
