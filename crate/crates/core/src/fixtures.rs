//! The email ontology used throughout the examples and tests.
//!
//! `email_message_table` binds the eleven email fields; `raw_message_table`
//! holds unaddressed fields only.

use crate::registry::Registry;

pub const EMAIL_REGISTRY_JSON: &str = include_str!("../fixtures/email_registry.json");

/// Six sample messages for `email_message_table`, JSONL.
pub const EMAIL_MESSAGES_JSONL: &str = include_str!("../fixtures/data/email_message_table.jsonl");

pub const EMAIL_TABLE: &str = "email_message_table";

pub fn email_registry() -> Registry {
    Registry::from_json(EMAIL_REGISTRY_JSON).expect("fixture registry is valid")
}

/// The distinct-senders query.
pub const SENDERS_KQL: &str = "SELECT DISTINCT ALL*email_address*_:source \
FROM ALL/emailmessage \
WHERE ( ALL*folder = 'sent_items' OR \
ALL*folder = 'sent')";

pub const SENDERS_SQL: &str = "SELECT DISTINCT sender_address FROM email_message_table \
WHERE (message_folder = 'sent_items' OR message_folder = 'sent')";

pub const SENDERS_MONGO: &str = "db.email_message_table.distinct(\"sender_address\", \
{ \"$or\" : [{ \"message_folder\" : \"sent_items\"}, { \"message_folder\" : \"sent\"}]})";

/// Messages sent by one address inside a time window, via a nested query.
pub const NESTED_KQL: &str = "SELECT ALL*[emailmessage] \
FROM (SELECT * FROM ALL/emailmessage \
WHERE \
ALL*email_address*_:sender='susan.scott@enron.com') \
as example \
WHERE ( ALL*datetime*_:sender >= \
'2000-01-01 00:00:00-07:00' AND \
ALL*datetime*_:sender < \
'2003-01-01 00:00:00-07:00' )";

pub const NESTED_SQL: &str = "SELECT message_id, sent_time, recipient_address, message_folder, received_time, \
message_body, email_attachment, sender_address, recipient_count, message_mailbox, message_subject \
FROM (SELECT * FROM email_message_table WHERE sender_address = 'susan.scott@enron.com') AS example \
WHERE (sent_time >= '2000-01-01 00:00:00-07:00' AND sent_time < '2003-01-01 00:00:00-07:00')";
