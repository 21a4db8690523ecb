//! Number formatting for CSV and report output.
//!
//! Every value is rounded to 17 significant digits (enough to round-trip an
//! `f64`), then printed in plain decimal when the exponent is moderate and in
//! scientific notation otherwise. Trailing zeros are dropped.

pub fn sig17(x: f64) -> String {
    if x.is_nan() {
        return "NaN".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let s = format!("{:.16e}", x);
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let (sign, mant) = match mant.strip_prefix('-') {
        Some(m) => ("-", m),
        None => ("", mant),
    };
    let digits: String = mant.chars().filter(|c| *c != '.').collect();
    if (-4..17).contains(&exp) {
        let (int_part, frac_part) = if exp >= 0 {
            let split = exp as usize + 1;
            (digits[..split].to_string(), digits[split..].to_string())
        } else {
            let zeros = "0".repeat((-exp - 1) as usize);
            ("0".to_string(), format!("{zeros}{digits}"))
        };
        let frac = frac_part.trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac}")
        }
    } else {
        let frac = digits[1..].trim_end_matches('0');
        if frac.is_empty() {
            format!("{sign}{}e{exp}", &digits[..1])
        } else {
            format!("{sign}{}.{frac}e{exp}", &digits[..1])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::sig17;

    #[test]
    fn plain_and_scientific() {
        assert_eq!(sig17(21.0), "21");
        assert_eq!(sig17(-0.25), "-0.25");
        assert_eq!(sig17(0.0), "0");
        assert_eq!(sig17(1e-7), "9.9999999999999995e-8");
        assert_eq!(sig17(0.1), "0.10000000000000001");
        assert_eq!(sig17(2f64.powi(-20)), "9.5367431640625e-7");
        assert_eq!(sig17(1.5e20), "1.5e20");
        assert_eq!(sig17(0.5), "0.5");
        assert_eq!(sig17(0.0078125), "0.0078125");
        assert_eq!(sig17(std::f64::consts::PI), "3.1415926535897931");
    }

    #[test]
    fn round_trips() {
        for x in [
            1.0 / 3.0,
            2.0f64.sqrt() * 1e-9,
            -123456.789e10,
            6.02214076e23,
            5e-324,
        ] {
            let back: f64 = sig17(x).parse().unwrap();
            assert_eq!(back, x);
        }
    }
}
