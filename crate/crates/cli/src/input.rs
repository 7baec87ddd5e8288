//! Observation files: whitespace-separated `<count> <value>` integer pairs.

use std::fs;
use std::io;
use std::path::Path;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InputRecord {
    /// Sequence number, echoed to the output as-is.
    pub count: i32,
    pub value: i32,
}

/// Parse integer pairs from `text`.
///
/// Line breaks carry no meaning: tokens are paired in order, the way a
/// `"%d%d"` scan loop reads them. Parsing stops at the first token that is
/// not a 32-bit integer, and a dangling unpaired token is dropped.
pub fn parse_records(text: &str) -> Vec<InputRecord> {
    let mut ints = text
        .split_whitespace()
        .map_while(|tok| tok.parse::<i32>().ok());
    let mut records = Vec::new();
    while let (Some(count), Some(value)) = (ints.next(), ints.next()) {
        records.push(InputRecord { count, value });
    }
    records
}

pub fn read_records(path: &Path) -> io::Result<Vec<InputRecord>> {
    Ok(parse_records(&fs::read_to_string(path)?))
}
