//! Number formatting shared by the CSV, JSON and pretty writers.

/// `x` with 15 significant digits, trailing zeros trimmed.
pub fn sig15(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    if x == 0.0 {
        return "0".into();
    }
    let e = x.abs().log10().floor() as i32;
    if (-5..15).contains(&e) {
        let s = format!("{:.*}", (14 - e).max(0) as usize, x);
        let s = if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s
        };
        if s == "-0" {
            "0".into()
        } else {
            s
        }
    } else {
        let s = format!("{:.14e}", x);
        let (m, exp) = s.split_once('e').expect("exponent");
        let m = m.trim_end_matches('0').trim_end_matches('.');
        format!("{m}e{exp}")
    }
}

/// `x` rounded to 15 significant digits.
pub fn round15(x: f64) -> f64 {
    sig15(x).parse().unwrap_or(x)
}

/// Serializer writing `x` rounded to 15 significant digits.
pub fn ser15<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round15(*x))
}

/// Three decimals, as in printed tables.
pub fn fixed3(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// Left-aligned text table with a header rule.
pub fn pretty_table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut width: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for r in rows {
        for (w, c) in width.iter_mut().zip(r) {
            *w = (*w).max(c.len());
        }
    }
    let line = |cells: Vec<&str>| -> String {
        let s: Vec<String> = cells
            .iter()
            .zip(&width)
            .map(|(c, w)| format!("{c:>w$}"))
            .collect();
        s.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    out += &line(width.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect());
    for r in rows {
        out += &line(r.iter().map(|s| s.as_str()).collect());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig15(std::f64::consts::PI), "3.14159265358979");
        assert_eq!(sig15(9.869604401089358), "9.86960440108936");
        assert_eq!(sig15(1.0), "1");
        assert_eq!(sig15(-0.25), "-0.25");
        assert_eq!(sig15(1.5e-9), "1.5e-9");
        assert_eq!(sig15(0.0), "0");
        assert_eq!(fixed3(10.0604), "10.060");
    }
}
