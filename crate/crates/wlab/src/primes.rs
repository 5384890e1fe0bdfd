//! Prime enumeration decoupled from factorization tables.
//!
//! The factor-table sieve ([`crate::sieve::SieveTable`]) costs 4 bytes per
//! integer, which is the wrong tool when all we need is to *visit* every prime
//! up to 10^8 (prime-zeta partial sums) or to collect the prime list for
//! suffix-sum tables. This module runs an odd-only segmented Eratosthenes in
//! O(sqrt(limit)) memory instead.

const SEGMENT_BITS: usize = 1 << 20;

/// Calls `f` with every prime `p <= limit` in increasing order.
pub fn for_each_prime(limit: u64, mut f: impl FnMut(u64)) {
    if limit < 2 {
        return;
    }
    f(2);
    if limit < 3 {
        return;
    }

    // Base primes up to sqrt(limit), odd-only bit sieve over small range.
    let root = (limit as f64).sqrt() as u64 + 1;
    let base = simple_odd_primes(root);

    // Segments cover odd numbers only: bit i of a segment starting at `lo`
    // represents lo + 2i. Both `lo` and `hi` stay odd so the index map never
    // drifts across segment boundaries.
    let top = limit - (1 - limit % 2); // largest odd <= limit
    let mut segment = vec![false; SEGMENT_BITS];
    let mut lo: u64 = 3;
    while lo <= top {
        let hi = (lo + 2 * (SEGMENT_BITS as u64 - 1)).min(top);
        let len = ((hi - lo) / 2 + 1) as usize;
        segment[..len].fill(false);
        for &p in &base {
            if p * p > hi {
                break;
            }
            // First odd multiple of p in [lo, hi] that is >= p*p.
            let mut start = p * p;
            if start < lo {
                start = lo.div_ceil(p) * p;
                if start % 2 == 0 {
                    start += p;
                }
            }
            let mut idx = (start - lo) / 2;
            while idx < len as u64 {
                segment[idx as usize] = true;
                idx += p;
            }
        }
        for (i, &composite) in segment[..len].iter().enumerate() {
            if !composite {
                f(lo + 2 * i as u64);
            }
        }
        lo = hi + 2;
    }
}

/// Collects every prime `p <= limit` into a vector.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    let mut out = Vec::new();
    for_each_prime(limit, |p| out.push(p));
    out
}

/// Odd primes <= limit by a plain sieve, plus 2; used for base primes only.
fn simple_odd_primes(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    let n = ((limit - 1) / 2) as usize; // flags for 3, 5, 7, ...
    let mut composite = vec![false; n];
    let mut primes = Vec::new();
    for i in 0..n {
        if !composite[i] {
            let p = 2 * i as u64 + 3;
            primes.push(p);
            let mut j = (p * p - 3) / 2;
            while (j as usize) < n {
                composite[j as usize] = true;
                j += p;
            }
        }
    }
    primes
}
