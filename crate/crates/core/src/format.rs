//! Decimal rendering of exact ratios.

/// Significant digits in every rendered decimal.
pub const SIG_DIGITS: u32 = 6;

/// `num / den` rounded half-up to six significant digits, in positional
/// notation: `11/20` renders as `0.550000`, `1` as `1.00000`.
pub fn decimal(num: u64, den: u64) -> String {
    assert!(den > 0, "zero denominator");
    if num == 0 {
        return format!("0.{}", "0".repeat(SIG_DIGITS as usize - 1));
    }
    let (num, den) = (num as u128, den as u128);
    let pow = |k: i32| 10u128.pow(k.unsigned_abs());
    // num * 10^shift / den, rounded half-up
    let scaled = |shift: i32| {
        let (n, d) = if shift >= 0 { (num * pow(shift), den) } else { (num, den * pow(shift)) };
        (2 * n + d) / (2 * d)
    };
    let digits = |x: u128| x.to_string().len() as i32;
    // e = floor(log10(num / den))
    let mut e = digits(num) - digits(den);
    let below = if e >= 0 { num < den * pow(e) } else { num * pow(e) < den };
    if below {
        e -= 1;
    }
    let mut shift = SIG_DIGITS as i32 - 1 - e;
    let mut q = scaled(shift);
    if q == pow(SIG_DIGITS as i32) {
        shift -= 1;
        q /= 10;
    }
    let s = q.to_string();
    if shift <= 0 {
        return format!("{s}{}", "0".repeat((-shift) as usize));
    }
    let shift = shift as usize;
    if s.len() > shift {
        let (int, frac) = s.split_at(s.len() - shift);
        format!("{int}.{frac}")
    } else {
        format!("0.{}{s}", "0".repeat(shift - s.len()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders() {
        assert_eq!(decimal(11, 20), "0.550000");
        assert_eq!(decimal(1, 1), "1.00000");
        assert_eq!(decimal(4, 4), "1.00000");
        assert_eq!(decimal(1, 2), "0.500000");
        assert_eq!(decimal(5, 6), "0.833333");
        assert_eq!(decimal(2, 3), "0.666667");
        assert_eq!(decimal(1, 3000), "0.000333333");
        assert_eq!(decimal(0, 7), "0.00000");
        assert_eq!(decimal(3, 2), "1.50000");
        assert_eq!(decimal(1234567, 1), "1234570");
        assert_eq!(decimal(999999, 1000000), "0.999999");
        assert_eq!(decimal(9999995, 10000000), "1.00000");
    }
}
