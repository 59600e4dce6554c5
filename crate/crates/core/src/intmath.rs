//! Exact integer versions of the floors and logs that appear in the size formulas.

/// Largest `a` with `a^k <= n`.
pub fn floor_root(n: u64, k: u32) -> u64 {
    assert!(k >= 1);
    if k == 1 || n < 2 {
        return n;
    }
    let mut a = (n as f64).powf(1.0 / k as f64).round() as u64;
    while a > 0 && a.checked_pow(k).is_none_or(|p| p > n) {
        a -= 1;
    }
    while (a + 1).checked_pow(k).is_some_and(|p| p <= n) {
        a += 1;
    }
    a
}

/// Largest `e` with `3^e <= n`; `n` must be positive.
pub fn floor_log3(n: u64) -> u32 {
    assert!(n >= 1);
    let mut e = 0;
    let mut p = 3u64;
    while p <= n {
        e += 1;
        match p.checked_mul(3) {
            Some(q) => p = q,
            None => break,
        }
    }
    e
}

/// Smallest `m` with `m^2 >= 2 L^2`, i.e. `ceil(sqrt(2) L)`.
pub fn ceil_sqrt2_times(l: u64) -> u64 {
    let target = 2 * (l as u128) * (l as u128);
    let mut m = ((2f64).sqrt() * l as f64).floor() as u128;
    while m * m < target {
        m += 1;
    }
    while m > 0 && (m - 1) * (m - 1) >= target {
        m -= 1;
    }
    m as u64
}
