//! Independent timestamp arithmetic and the instant-ordering property.

use std::cmp::Ordering;

use kql_core::{Timestamp, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Report;

fn days_from_civil(y: i64, m: i64, d: i64) -> i64 {
    let y = if m <= 2 { y - 1 } else { y };
    let era = y.div_euclid(400);
    let yoe = y - era * 400;
    let mp = (m + 9) % 12;
    let doy = (153 * mp + 2) / 5 + d - 1;
    let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    era * 146_097 + doe - 719_468
}

/// Seconds since the Unix epoch of `YYYY-MM-DD HH:MM:SS±HH:MM`, parsed by
/// hand. Does not validate day-of-month ranges.
pub fn naive_epoch(s: &str) -> Option<i64> {
    let b = s.as_bytes();
    if b.len() != 25 || b[4] != b'-' || b[7] != b'-' || b[10] != b' ' || b[13] != b':' || b[16] != b':' || b[22] != b':' {
        return None;
    }
    let num = |r: std::ops::Range<usize>| s.get(r)?.parse::<i64>().ok();
    let (y, mo, d) = (num(0..4)?, num(5..7)?, num(8..10)?);
    let (h, mi, se) = (num(11..13)?, num(14..16)?, num(17..19)?);
    let sign = match b[19] {
        b'+' => 1,
        b'-' => -1,
        _ => return None,
    };
    let off = sign * (num(20..22)? * 3600 + num(23..25)? * 60);
    Some(days_from_civil(y, mo, d) * 86_400 + h * 3600 + mi * 60 + se - off)
}

fn random_ts(rng: &mut impl Rng, offset: Option<&str>) -> String {
    let offsets = ["-08:00", "-07:00", "+00:00", "+05:30", "+14:00", "-12:00", "+09:45"];
    let off = offset.map(str::to_string).unwrap_or_else(|| offsets[rng.gen_range(0..offsets.len())].to_string());
    // narrow ranges so that near-equal instants occur
    format!(
        "{:04}-{:02}-{:02} {:02}:{:02}:{:02}{off}",
        rng.gen_range(1999..=2001),
        rng.gen_range(1..=12),
        rng.gen_range(1..=28),
        rng.gen_range(0..24),
        rng.gen_range(0..60),
        rng.gen_range(0..2) * 30,
    )
}

/// Compares `n` random pairs: instant order must be total, agree with the
/// hand-computed epoch, and agree with text order under a shared offset.
pub fn suite(n: usize, seed: u64) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Report::default();
    for _ in 0..n {
        report.cases += 1;
        let same = rng.gen_bool(0.5);
        let a = random_ts(&mut rng, None);
        let b = if same { random_ts(&mut rng, Some(&a[19..])) } else { random_ts(&mut rng, None) };
        let (Some(ta), Some(tb)) = (Timestamp::parse(&a), Timestamp::parse(&b)) else {
            report.fail(format!("valid timestamp rejected: {a} / {b}"));
            continue;
        };
        let ord = ta.instant_cmp(&tb);
        let expected = naive_epoch(&a).cmp(&naive_epoch(&b));
        if ord != expected {
            report.fail(format!("{a} vs {b}: {ord:?}, epoch says {expected:?}"));
        }
        if tb.instant_cmp(&ta) != ord.reverse() {
            report.fail(format!("{a} vs {b}: not antisymmetric"));
        }
        if Value::Ts(ta.clone()).compare(&Value::Ts(tb.clone())) != Some(ord) {
            report.fail(format!("{a} vs {b}: Value::compare disagrees"));
        }
        if a[19..] == b[19..] {
            report.note("same_offset", 1);
            if ord != a.cmp(&b) {
                report.fail(format!("{a} vs {b}: instant order {ord:?} differs from text order"));
            }
        }
        if ord == Ordering::Equal && a != b {
            report.note("equal_instant_different_text", 1);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_anchors() {
        assert_eq!(naive_epoch("1970-01-01 00:00:00+00:00"), Some(0));
        assert_eq!(naive_epoch("2000-01-01 00:00:00-07:00"), Some(946_710_000));
        assert_eq!(naive_epoch("2000-01-01 00:00:00"), None);
    }
}
