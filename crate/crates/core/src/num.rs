//! Small integer and float helpers usable without `std`.

/// Largest `s` with `s * s <= n`.
pub fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut s = libm::sqrt(n as f64) as u64;
    while s * s > n {
        s -= 1;
    }
    while (s + 1) * (s + 1) <= n {
        s += 1;
    }
    s
}

/// Smallest `s` with `s * s >= n`.
pub fn ceil_sqrt(n: u64) -> u64 {
    let s = isqrt(n);
    if s * s == n {
        s
    } else {
        s + 1
    }
}

/// Nearest integer to `sqrt(n)`. Never a tie for integer `n`.
pub fn round_sqrt(n: u64) -> u64 {
    isqrt(4 * n).div_ceil(2)
}

/// Round half up.
#[inline]
pub fn round_half_up(x: f64) -> f64 {
    libm::floor(x + 0.5)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sqrt_helpers() {
        for n in 0..20_000u64 {
            let f = libm::sqrt(n as f64);
            assert_eq!(isqrt(n), libm::floor(f) as u64);
            assert_eq!(ceil_sqrt(n), libm::ceil(f) as u64);
            assert_eq!(round_sqrt(n), libm::round(f) as u64, "n={n}");
        }
    }
}
