//! Custom segment lengths: `length, segment_name` per line, metres.

use std::collections::BTreeMap;

use crate::diag::{Code, Parsed, Report};
use crate::formats::{format_number, records, Ctx, PERCENT};

pub fn parse_segment_lengths(text: &str, file: &str) -> Result<Parsed<BTreeMap<String, f64>>, Report> {
    let ctx = Ctx::new(file);
    let mut lengths = BTreeMap::new();
    let mut report = Report::new();
    for rec in records(text, PERCENT) {
        let result = (|| {
            ctx.field_count(&rec, 2, 2, "segment length")?;
            let length = ctx.positive_length(&rec, 0, "segment length")?;
            let name = ctx.name(&rec, 1, "segment name")?;
            if lengths.insert(name.clone(), length).is_some() {
                return Err(ctx.err(
                    rec.line,
                    Code::DuplicateEntry,
                    format!("length of {name:?} given more than once"),
                ));
            }
            Ok(())
        })();
        if let Err(d) = result {
            report.push(d);
        }
    }
    if report.has_errors() {
        Err(report)
    } else {
        Ok(Parsed::new(lengths))
    }
}

pub fn serialize_segment_lengths(lengths: &BTreeMap<String, f64>) -> String {
    lengths
        .iter()
        .map(|(name, l)| format!("{}, {name}\n", format_number(*l)))
        .collect()
}
