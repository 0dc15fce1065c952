//! Small sieve utilities.

/// Primes `<= n` in increasing order.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
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

/// Smallest-prime-factor table for `0..=n`; entries 0 and 1 are 0.
pub fn smallest_prime_factors(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Splits `n` into `(p, e, m)` with `n = p^e · m`, `p` the smallest prime
/// factor and `gcd(p, m) = 1`.
pub fn peel_smallest(n: usize, spf: &[u32]) -> (u64, u32, usize) {
    let p = spf[n] as usize;
    let mut m = n;
    let mut e = 0;
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (p as u64, e, m)
}

/// Prime-power factorization of `n` as `(p, e)` pairs.
pub fn factorize(mut n: usize, spf: &[u32]) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    while n > 1 {
        let (p, e, m) = peel_smallest(n, spf);
        out.push((p, e));
        n = m;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_agrees_with_trial_division() {
        let sieved = primes_up_to(1000);
        let trial: Vec<u64> = (0..=1000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, trial);
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(1_000_000).len(), 78_498);
    }

    #[test]
    fn factorization_round_trips() {
        let spf = smallest_prime_factors(5000);
        for n in 2..=5000usize {
            let prod: u64 = factorize(n, &spf).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(prod, n as u64);
        }
        assert_eq!(factorize(360, &spf), vec![(2, 3), (3, 2), (5, 1)]);
    }
}
