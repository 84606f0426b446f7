//! Deterministic synthetic corpus in the 11-field `email_message_table` shape.

use chrono::{Duration, FixedOffset, Months, TimeZone};
use kql_core::engine::schema_of;
use kql_core::{fixtures, Table, Timestamp, Value};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::BenchError;

/// Users are grouped into communities of this size; most mail stays inside
/// a group, which gives Girvan–Newman something to find.
pub const GROUP_SIZE: usize = 4;
const IN_GROUP: f64 = 0.7;
const LIAISON: f64 = 0.2;

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub n_users: usize,
    pub n_messages: usize,
    pub start: Timestamp,
    pub end: Timestamp,
    pub seed: u64,
    /// Fraction of messages filed under `sent`; the rest go to `sent_items`.
    pub folder_mix: f64,
}

impl CorpusSpec {
    /// Corpus starting 2000-01-01 (UTC-08:00) and spanning `months`.
    pub fn new(n_users: usize, n_messages: usize, months: u32, seed: u64) -> Result<CorpusSpec, BenchError> {
        let offset = FixedOffset::west_opt(8 * 3600).expect("valid offset");
        let start = offset.with_ymd_and_hms(2000, 1, 1, 0, 0, 0).single().expect("unambiguous");
        let end = start
            .checked_add_months(Months::new(months))
            .ok_or_else(|| BenchError::Spec(format!("{months} months overflows the calendar")))?;
        Ok(CorpusSpec {
            n_users,
            n_messages,
            start: Timestamp::from_datetime(start),
            end: Timestamp::from_datetime(end),
            seed,
            folder_mix: 0.5,
        })
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        if self.n_users < 2 {
            return Err(BenchError::Spec(format!("n_users must be at least 2, got {}", self.n_users)));
        }
        if self.n_messages < 1 {
            return Err(BenchError::Spec("n_messages must be at least 1".into()));
        }
        if self.start.epoch_seconds() >= self.end.epoch_seconds() {
            return Err(BenchError::Spec(format!("start {} is not before end {}", self.start, self.end)));
        }
        if !(0.0..=1.0).contains(&self.folder_mix) {
            return Err(BenchError::Spec(format!("folder_mix {} is outside [0, 1]", self.folder_mix)));
        }
        Ok(())
    }
}

pub fn user_address(i: usize) -> String {
    format!("user{i:03}@example.com")
}

fn pick_recipient(rng: &mut ChaCha8Rng, sender: usize, n_users: usize) -> usize {
    let group = sender / GROUP_SIZE;
    let members: Vec<usize> = (group * GROUP_SIZE..((group + 1) * GROUP_SIZE).min(n_users))
        .filter(|&u| u != sender)
        .collect();
    let n_groups = n_users.div_ceil(GROUP_SIZE);
    let roll: f64 = rng.gen();
    if roll < IN_GROUP && !members.is_empty() {
        return members[rng.gen_range(0..members.len())];
    }
    // group leaders keep a ring of liaison traffic so groups stay connected
    if roll < IN_GROUP + LIAISON && sender.is_multiple_of(GROUP_SIZE) && n_groups > 1 {
        return ((group + 1) % n_groups) * GROUP_SIZE;
    }
    let r = rng.gen_range(0..n_users - 1);
    if r >= sender {
        r + 1
    } else {
        r
    }
}

/// Generates the corpus as an engine table. A pure function of `spec`.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Table, BenchError> {
    spec.validate()?;
    let registry = fixtures::email_registry();
    let def = registry.table(fixtures::EMAIL_TABLE).expect("fixture table");
    let mut table = Table::new(fixtures::EMAIL_TABLE, schema_of(def));

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let span = spec.end.epoch_seconds() - spec.start.epoch_seconds();
    let offsets = [
        FixedOffset::west_opt(7 * 3600).expect("valid offset"),
        FixedOffset::west_opt(8 * 3600).expect("valid offset"),
    ];
    for i in 0..spec.n_messages {
        let sender = rng.gen_range(0..spec.n_users);
        let recipient = pick_recipient(&mut rng, sender, spec.n_users);
        let at = spec.start.datetime() + Duration::seconds(rng.gen_range(0..span));
        let delay = Duration::seconds(rng.gen_range(0..120));
        let offset = offsets[i % 2];
        let folder = if rng.gen_bool(spec.folder_mix) { "sent" } else { "sent_items" };
        let row = vec![
            Value::Str(format!("<{i}.{}@kql.bench>", spec.seed)),
            Value::Ts(Timestamp::from_datetime(at.with_timezone(&offset))),
            Value::Str(user_address(recipient)),
            Value::Str(folder.into()),
            Value::Ts(Timestamp::from_datetime((at + delay).with_timezone(&offset))),
            Value::Str(format!("Message {i} body.")),
            Value::Str(String::new()),
            Value::Str(user_address(sender)),
            Value::Int(1),
            Value::Str(format!("user{sender:03}")),
            Value::Str(format!("Message {i}")),
        ];
        table.rows.push(row);
    }
    Ok(table)
}
