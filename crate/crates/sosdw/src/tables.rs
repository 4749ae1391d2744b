//! Colour tables (`A_n`, `C_n`, `K_i`, `p_i`) and exact polynomial identities.

use std::io::{self, Write};

use num_bigint::BigInt;
use serde::Serialize;
use serde_json::{json, Value};
use sosdw_core::enumeration::{
    colour_counts, colour_probabilities, dynamical_identity, three_colour_identity, two_enumeration,
};

use crate::io::{big_int, big_uint, poly, rational, SCHEMA};

/// Column names of the CSV table, in order.
pub const HEADER: [&str; 9] = ["n", "A_n", "C_n", "K_0", "K_1", "K_2", "p_0", "p_1", "p_2"];

#[derive(Debug, Clone, PartialEq)]
pub struct ColourRow {
    pub n: usize,
    pub a_n: String,
    pub c_n: String,
    pub k: [String; 3],
    pub p: [String; 3],
    /// Whether enumeration reproduced `K_i`, when it was run.
    pub enumerated: Option<bool>,
    report: sosdw_core::enumeration::ColourReport,
}

/// Rows for `n ∈ range`. With `verify_up_to = Some(cap)` the `K_i` of every
/// `n ≤ cap` are recounted from the states.
pub fn colour_rows(
    range: std::ops::RangeInclusive<usize>,
    verify_up_to: Option<usize>,
) -> sosdw_core::Result<Vec<ColourRow>> {
    range
        .map(|n| {
            let report = colour_probabilities(n);
            let enumerated = match verify_up_to {
                Some(cap) if n <= cap => {
                    let counted = colour_counts(n, cap)?;
                    Some((0..3).all(|i| report.k[i] == BigInt::from(counted[i].clone())))
                }
                _ => None,
            };
            Ok(ColourRow {
                n,
                a_n: report.a_n.to_string(),
                c_n: report.c_n.to_string(),
                k: report.k.clone().map(|k| k.to_string()),
                p: report.p.clone().map(|p| rational(&p)),
                enumerated,
                report,
            })
        })
        .collect()
}

pub fn write_csv(rows: &[ColourRow], w: &mut dyn Write) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    let with_check = rows.iter().any(|r| r.enumerated.is_some());
    let mut header: Vec<&str> = HEADER.to_vec();
    if with_check {
        header.push("enumerated");
    }
    out.write_record(&header)?;
    for r in rows {
        let mut rec = vec![r.n.to_string(), r.a_n.clone(), r.c_n.clone()];
        rec.extend(r.k.iter().cloned());
        rec.extend(r.p.iter().cloned());
        if with_check {
            rec.push(r.enumerated.map_or(String::new(), |b| b.to_string()));
        }
        out.write_record(&rec)?;
    }
    out.flush()
}

pub fn to_json(rows: &[ColourRow]) -> Value {
    let rows: Vec<Value> = rows
        .iter()
        .map(|r| {
            let mut v = json!({
                "n": r.n,
                "A_n": big_uint(&r.report.a_n),
                "C_n": big_uint(&r.report.c_n),
                "K": r.report.k.iter().map(big_int).collect::<Vec<_>>(),
                "p": r.p,
            });
            if let Some(b) = r.enumerated {
                v["enumerated"] = Value::Bool(b);
            }
            v
        })
        .collect();
    json!({ "schema": SCHEMA, "table": "colour", "rows": rows })
}

pub fn write_text(rows: &[ColourRow], w: &mut dyn Write) -> io::Result<()> {
    writeln!(
        w,
        "{:>4} {:>14} {:>14}  {:<28} p_0, p_1, p_2",
        "n", "A_n", "C_n", "K_0, K_1, K_2"
    )?;
    for r in rows {
        let check = match r.enumerated {
            Some(true) => "  [enumerated]",
            Some(false) => "  [ENUMERATION MISMATCH]",
            None => "",
        };
        writeln!(
            w,
            "{:>4} {:>14} {:>14}  {:<28} {}{check}",
            r.n,
            r.a_n,
            r.c_n,
            r.k.join(", "),
            r.p.join(", ")
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum IdentityKind {
    /// Trigonometric state sum at q = ω, over Z[ω].
    Dynamical,
    /// Three-colouring generating function, over Z[ω].
    ThreeColour,
    /// Dynamical 2-enumeration, over Z[i].
    TwoEnumeration,
}

impl IdentityKind {
    pub fn name(self) -> &'static str {
        match self {
            IdentityKind::Dynamical => "dynamical",
            IdentityKind::ThreeColour => "three-colour",
            IdentityKind::TwoEnumeration => "two-enumeration",
        }
    }
}

/// Both sides of an exact identity as coefficient lists.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityDocument {
    pub schema: &'static str,
    pub identity: &'static str,
    pub n: usize,
    /// The coefficient ring, e.g. `Z[ω]` with `ω² = −1 − ω`.
    pub ring: &'static str,
    pub variable: &'static str,
    /// Exponent `E` of the `(1 − λ³)^E` both sides were multiplied by.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cleared_by: Option<u32>,
    pub lhs: Value,
    pub rhs: Value,
    pub holds: bool,
}

pub fn identity_document(
    kind: IdentityKind,
    n: usize,
    cap: usize,
) -> sosdw_core::Result<IdentityDocument> {
    let omega = "Z[ω], ω² = −1 − ω, pairs [a, b] = a + bω";
    let (ring, cleared_by, lhs, rhs, holds) = match kind {
        IdentityKind::Dynamical => {
            let id = dynamical_identity(n, cap)?;
            (
                omega,
                Some(id.cleared_by),
                poly(&id.lhs),
                poly(&id.rhs),
                id.holds(),
            )
        }
        IdentityKind::ThreeColour => {
            let id = three_colour_identity(n, cap)?;
            (
                omega,
                Some(id.cleared_by),
                poly(&id.lhs),
                poly(&id.rhs),
                id.holds(),
            )
        }
        IdentityKind::TwoEnumeration => {
            let id = two_enumeration(n, cap)?;
            (
                "Z[i], pairs [a, b] = a + bi",
                None,
                poly(&id.lhs),
                poly(&id.rhs),
                id.holds(),
            )
        }
    };
    Ok(IdentityDocument {
        schema: SCHEMA,
        identity: kind.name(),
        n,
        ring,
        variable: "λ",
        cleared_by,
        lhs,
        rhs,
        holds,
    })
}
