//! Special functions not covered by `libm`.

/// Hurwitz zeta `sum_{n >= 0} (a + n)^{-s}` for `s > 1`, `a > 0`, by
/// Euler-Maclaurin summation.
pub fn hurwitz_zeta(s: f64, a: f64) -> f64 {
    debug_assert!(s > 1.0 && a > 0.0);
    // B_{2j} / (2j)!
    const B2K_OVER_FACT: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30240.0,
        -1.0 / 1209600.0,
        1.0 / 47900160.0,
        -691.0 / 1307674368000.0,
        1.0 / 74724249600.0,
    ];
    let shift = if a < 16.0 { (16.0 - a) as usize + 1 } else { 0 };
    let mut sum = 0.0;
    for n in 0..shift {
        sum += libm::pow(a + n as f64, -s);
    }
    let b = a + shift as f64;
    sum += libm::pow(b, 1.0 - s) / (s - 1.0) + 0.5 * libm::pow(b, -s);
    // rising product s (s+1) ... (s + 2j - 2) times b^{-s-2j+1}
    let mut rising = s;
    let mut power = libm::pow(b, -s - 1.0);
    let inv_b2 = 1.0 / (b * b);
    for (j, coef) in B2K_OVER_FACT.iter().enumerate() {
        let term = coef * rising * power;
        sum += term;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power *= inv_b2;
    }
    sum
}

/// `Gamma(x)`.
pub fn gamma(x: f64) -> f64 {
    libm::tgamma(x)
}
