//! Canonical hexadecimal float literals.
//!
//! Normal numbers are written `0x1.<frac>p<exp>` with trailing zero hex digits
//! dropped (and the dot dropped when the fraction is zero), subnormals as
//! `0x0.<frac>p-1022`, zero as `0x0p+0`. A leading `-` marks negative values,
//! including negative zero. Only the canonical spelling is accepted on input,
//! which makes text and bits correspond one to one.

const FRAC_BITS: u32 = 52;
const FRAC_MASK: u64 = (1 << FRAC_BITS) - 1;
const EXP_BIAS: i32 = 1023;

/// Formats a finite `f64`. Non-finite values have no literal and return `None`.
pub fn format(v: f64) -> Option<String> {
    if !v.is_finite() {
        return None;
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> FRAC_BITS) & 0x7ff) as i32;
    let frac = bits & FRAC_MASK;
    if biased == 0 && frac == 0 {
        return Some(format!("{sign}0x0p+0"));
    }
    let (lead, exp) = if biased == 0 {
        (0, 1 - EXP_BIAS)
    } else {
        (1, biased - EXP_BIAS)
    };
    let mut digits = format!("{frac:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let dot = if digits.is_empty() { "" } else { "." };
    Some(format!("{sign}0x{lead}{dot}{digits}p{exp:+}"))
}

/// Parses a canonical literal produced by [`format`].
pub fn parse(s: &str) -> Result<f64, String> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s),
    };
    let body = body
        .strip_prefix("0x")
        .ok_or_else(|| format!("`{s}` lacks the 0x prefix"))?;
    let (mant, exp) = body
        .split_once('p')
        .ok_or_else(|| format!("`{s}` lacks a binary exponent"))?;
    if !(exp.starts_with('+') || exp.starts_with('-')) {
        return Err(format!("`{s}` exponent must carry an explicit sign"));
    }
    let exp: i32 = exp
        .parse()
        .map_err(|_| format!("`{s}` has a malformed exponent"))?;
    let (lead, digits) = match mant.split_once('.') {
        Some((l, d)) => (l, d),
        None => (mant, ""),
    };
    if digits.len() > 13 || !digits.bytes().all(|b| b.is_ascii_hexdigit()) {
        return Err(format!("`{s}` has a malformed fraction"));
    }
    let mut frac = 0u64;
    for (i, ch) in digits.chars().enumerate() {
        let d = ch.to_digit(16).expect("checked hex") as u64;
        frac |= d << (4 * (12 - i));
    }
    let magnitude = match lead {
        "1" if (1 - EXP_BIAS..=EXP_BIAS).contains(&exp) => {
            (((exp + EXP_BIAS) as u64) << FRAC_BITS) | frac
        }
        "0" if exp == 1 - EXP_BIAS || (exp == 0 && frac == 0) => frac,
        _ => return Err(format!("`{s}` is out of range or not normalized")),
    };
    let v = f64::from_bits(magnitude | (u64::from(neg) << 63));
    if format(v).as_deref() != Some(s) {
        return Err(format!("`{s}` is not in canonical form"));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_literals() {
        assert_eq!(format(1.0).unwrap(), "0x1p+0");
        assert_eq!(format(-0.625).unwrap(), "-0x1.4p-1");
        assert_eq!(format(0.1).unwrap(), "0x1.999999999999ap-4");
        assert_eq!(format(0.0).unwrap(), "0x0p+0");
        assert_eq!(format(-0.0).unwrap(), "-0x0p+0");
        assert_eq!(format(f64::MIN_POSITIVE / 2.0).unwrap(), "0x0.8p-1022");
        assert_eq!(format(f64::MAX).unwrap(), "0x1.fffffffffffffp+1023");
        assert!(format(f64::NAN).is_none());
    }

    #[test]
    fn round_trips_edge_values() {
        for v in [
            0.0,
            -0.0,
            1.0,
            0.1,
            -1e-300,
            f64::MAX,
            f64::MIN_POSITIVE,
            5e-324,
            1.0 - f64::EPSILON / 2.0,
        ] {
            let back = parse(&format(v).unwrap()).unwrap();
            assert_eq!(back.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn rejects_non_canonical() {
        for s in [
            "1.0",
            "0x1.0p+0",
            "0x1p0",
            "0x2p+0",
            "0x1.4p-1023",
            "0x1p+1024",
            "0x",
            "0x1.gp+0",
            "0x0.8p-1021",
        ] {
            assert!(parse(s).is_err(), "{s}");
        }
    }
}
