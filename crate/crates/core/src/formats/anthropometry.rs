//! Subject anthropometry files.
//!
//! ```text
//! gender, male
//! age, 30
//! height, 1.80
//! weight, 80
//! hipCenterDistance, 0.18
//! ```
//!
//! Keywords: `gender, age, height, weight, pelvisWidth, hipCenterDistance,
//! shoulderCenterDistance, footLength, footWidth, heelAnkleOffset,
//! ankleHeight`. Lengths are metres, weight kg, age years.

use std::collections::BTreeSet;

use crate::anthro::{AnthropometryProfile, Gender};
use crate::diag::{Code, Parsed, Report};
use crate::formats::{format_number, records, Ctx, PERCENT};

pub const KEYWORDS: [&str; 11] = [
    "gender",
    "age",
    "height",
    "weight",
    "pelvisWidth",
    "hipCenterDistance",
    "shoulderCenterDistance",
    "footLength",
    "footWidth",
    "heelAnkleOffset",
    "ankleHeight",
];

fn length_slot<'p>(p: &'p mut AnthropometryProfile, keyword: &str) -> Option<&'p mut Option<f64>> {
    Some(match keyword {
        "height" => &mut p.height,
        "weight" => &mut p.weight,
        "pelvisWidth" => &mut p.pelvis_width,
        "hipCenterDistance" => &mut p.hip_center_distance,
        "shoulderCenterDistance" => &mut p.shoulder_center_distance,
        "footLength" => &mut p.foot_length,
        "footWidth" => &mut p.foot_width,
        "heelAnkleOffset" => &mut p.heel_ankle_offset,
        "ankleHeight" => &mut p.ankle_height,
        _ => return None,
    })
}

pub fn parse_anthropometry(text: &str, file: &str) -> Result<Parsed<AnthropometryProfile>, Report> {
    let ctx = Ctx::new(file);
    let mut profile = AnthropometryProfile::default();
    let mut seen = BTreeSet::new();
    let mut report = Report::new();
    for rec in records(text, PERCENT) {
        let result = (|| {
            ctx.field_count(&rec, 2, 2, "anthropometry entry")?;
            let keyword = rec.fields[0];
            if !KEYWORDS.contains(&keyword) {
                return Err(ctx.err(
                    rec.line,
                    Code::UnknownKeyword,
                    format!("unknown anthropometry keyword {keyword:?}"),
                ));
            }
            if !seen.insert(keyword) {
                return Err(ctx.err(
                    rec.line,
                    Code::DuplicateKeyword,
                    format!("{keyword} given more than once"),
                ));
            }
            match keyword {
                "gender" => {
                    profile.gender = Some(Gender::parse(rec.fields[1]).ok_or_else(|| {
                        ctx.err(
                            rec.line,
                            Code::InvalidValue,
                            format!("gender must be male or female, found {:?}", rec.fields[1]),
                        )
                    })?)
                }
                "age" => {
                    let age = ctx.number(&rec, 1, "age")?;
                    if age < 0.0 {
                        return Err(ctx.err(
                            rec.line,
                            Code::NegativeValue,
                            format!("age must not be negative, found {}", format_number(age)),
                        ));
                    }
                    profile.age = Some(age);
                }
                k => {
                    let v = ctx.positive_length(&rec, 1, k)?;
                    *length_slot(&mut profile, k).expect("keyword list and slots agree") = Some(v);
                }
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
        Ok(Parsed::new(profile))
    }
}

pub fn serialize_anthropometry(profile: &AnthropometryProfile) -> String {
    let mut out = String::new();
    if let Some(g) = profile.gender {
        out.push_str(&format!("gender, {}\n", g.as_str()));
    }
    if let Some(a) = profile.age {
        out.push_str(&format!("age, {}\n", format_number(a)));
    }
    let mut copy = profile.clone();
    for k in &KEYWORDS[2..] {
        if let Some(v) = *length_slot(&mut copy, k).expect("length keyword") {
            out.push_str(&format!("{k}, {}\n", format_number(v)));
        }
    }
    out
}
