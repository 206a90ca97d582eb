//! German cardinal number names, written out by hand.
//!
//! Follows the fixture's conventions: 100 is `hundert` and 1000 is
//! `tausend` (no leading `ein`), and a unit one inside a larger number is
//! `eins` unless it is followed by `und`.

const UNITS: [&str; 10] = [
    "null", "eins", "zwei", "drei", "vier", "fünf", "sechs", "sieben", "acht", "neun",
];

const TEENS: [&str; 10] = [
    "zehn", "elf", "zwölf", "dreizehn", "vierzehn", "fünfzehn", "sechzehn", "siebzehn",
    "achtzehn", "neunzehn",
];

const TENS: [&str; 10] = [
    "", "zehn", "zwanzig", "dreißig", "vierzig", "fünfzig", "sechzig", "siebzig", "achtzig",
    "neunzig",
];

/// Name of `n` in 1..=99.
fn below_hundred(n: u32) -> String {
    match n {
        1..=9 => UNITS[n as usize].to_string(),
        10..=19 => TEENS[(n - 10) as usize].to_string(),
        _ if n.is_multiple_of(10) => TENS[(n / 10) as usize].to_string(),
        _ => {
            let unit = if n % 10 == 1 { "ein" } else { UNITS[(n % 10) as usize] };
            format!("{unit}und{}", TENS[(n / 10) as usize])
        }
    }
}

/// Name of `n` in 0..=9999.
pub fn german_number(n: u32) -> String {
    assert!(n <= 9999, "{n} is out of range");
    if n == 0 {
        return "null".into();
    }
    let mut out = String::new();
    let (thousands, hundreds, rest) = (n / 1000, n / 100 % 10, n % 100);
    if thousands > 0 {
        if thousands > 1 {
            out.push_str(UNITS[thousands as usize]);
        }
        out.push_str("tausend");
    }
    if hundreds > 0 {
        if hundreds > 1 {
            out.push_str(UNITS[hundreds as usize]);
        }
        out.push_str("hundert");
    }
    if rest > 0 {
        out.push_str(&below_hundred(rest));
    }
    out
}
