//! C99-style hexadecimal float literals (`0x1.8p-1`), exact for every finite
//! `f64`.

const MANTISSA_BITS: u32 = 52;
const MANTISSA_MASK: u64 = (1 << MANTISSA_BITS) - 1;
const EXP_BIAS: i64 = 1023;

/// Formats a finite `f64`; `None` for NaN and infinities.
pub fn format_hex(v: f64) -> Option<String> {
    if !v.is_finite() {
        return None;
    }
    let bits = v.to_bits();
    let sign = if bits >> 63 == 1 { "-" } else { "" };
    let biased = ((bits >> MANTISSA_BITS) & 0x7ff) as i64;
    let mantissa = bits & MANTISSA_MASK;
    if biased == 0 && mantissa == 0 {
        return Some(format!("{sign}0x0p+0"));
    }
    let (lead, exp) = if biased == 0 { (0, 1 - EXP_BIAS) } else { (1, biased - EXP_BIAS) };
    let mut digits = format!("{mantissa:013x}");
    while digits.ends_with('0') {
        digits.pop();
    }
    let frac = if digits.is_empty() { String::new() } else { format!(".{digits}") };
    let exp_sign = if exp < 0 { '-' } else { '+' };
    Some(format!("{sign}0x{lead}{frac}p{exp_sign}{}", exp.abs()))
}

/// Parses the output of [`format_hex`]. Only the canonical shape
/// `[-]0x{0|1}[.hex]p{+|-}dec` is accepted, so parsing is exact.
pub fn parse_hex(s: &str) -> Result<f64, String> {
    let err = || format!("malformed hex float {s:?}");
    let (neg, rest) = match s.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, s),
    };
    let rest = rest.strip_prefix("0x").ok_or_else(err)?;
    let (mant, exp) = rest.split_once('p').ok_or_else(err)?;
    let (lead, frac) = match mant.split_once('.') {
        Some((l, f)) if !f.is_empty() => (l, f),
        Some(_) => return Err(err()),
        None => (mant, ""),
    };
    if frac.len() > 13 || !frac.bytes().all(|c| c.is_ascii_hexdigit()) {
        return Err(err());
    }
    if !(exp.starts_with('+') || exp.starts_with('-')) {
        return Err(err());
    }
    let exp: i64 = exp.parse().map_err(|_| err())?;
    let frac_bits =
        if frac.is_empty() { 0 } else { u64::from_str_radix(frac, 16).map_err(|_| err())? << (4 * (13 - frac.len())) };
    let bits = match lead {
        "0" if frac_bits == 0 => {
            if exp != 0 {
                return Err(err());
            }
            0
        }
        "0" => {
            if exp != 1 - EXP_BIAS {
                return Err(err());
            }
            frac_bits
        }
        "1" => {
            let biased = exp + EXP_BIAS;
            if !(1..=2046).contains(&biased) {
                return Err(err());
            }
            ((biased as u64) << MANTISSA_BITS) | frac_bits
        }
        _ => return Err(err()),
    };
    Ok(f64::from_bits(bits | (u64::from(neg) << 63)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn known_literals() {
        assert_eq!(format_hex(0.75).unwrap(), "0x1.8p-1");
        assert_eq!(format_hex(1.0).unwrap(), "0x1p+0");
        assert_eq!(format_hex(-0.5).unwrap(), "-0x1p-1");
        assert_eq!(format_hex(0.0).unwrap(), "0x0p+0");
        assert_eq!(format_hex(-0.0).unwrap(), "-0x0p+0");
        assert_eq!(format_hex(0.1).unwrap(), "0x1.999999999999ap-4");
        assert_eq!(format_hex(f64::MIN_POSITIVE / 4.0).unwrap(), "0x0.4p-1022");
        assert_eq!(format_hex(f64::MAX).unwrap(), "0x1.fffffffffffffp+1023");
        assert!(format_hex(f64::NAN).is_none());
        assert!(format_hex(f64::INFINITY).is_none());
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "1.0", "0x", "0x1.p+0", "0x1.8p1", "0x2p+0", "0x1p+1024", "0x1.gp+0", "inf", "0x1.8"] {
            assert!(parse_hex(s).is_err(), "{s}");
        }
    }

    proptest! {
        #[test]
        fn roundtrip(bits in any::<u64>()) {
            let v = f64::from_bits(bits);
            prop_assume!(v.is_finite());
            let s = format_hex(v).unwrap();
            prop_assert_eq!(parse_hex(&s).unwrap().to_bits(), bits);
        }
    }
}
