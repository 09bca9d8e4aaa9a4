//! Deterministic parameter sweeps over every table row, each answer checked
//! against its independent derivation.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use serde::Serialize;

use crate::oracle::{
    c0_embeds, derive_c0_via_proof, derive_campanato_via_proof, derive_modulus_via_proof, derive_morrey_via_proof,
    holder_campanato_compare, holder_campanato_forms, morrey_campanato_compare, morrey_campanato_forms,
    optimal_campanato, optimal_modulus, optimal_morrey, ri_consistent, ri_optimal_target, EmbeddingQuery, Payload,
    SpaceComparison, Table, TargetReport,
};
use crate::rational::{ExtendedRational, Q};
use crate::space::{validate, SpaceDescriptor, ValidationStatus};
use crate::Result;

use ExtendedRational::{Finite, Infinity};

/// Orders `(m, n)` visited by the sweeps.
pub const ORDERS: [(u32, u32); 9] = [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (2, 2), (3, 3), (4, 4)];

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub table: Table,
    pub row: u8,
    pub query: EmbeddingQuery,
    pub tabulated: String,
    pub derived: String,
    pub agrees: bool,
}

fn ext_q(x: Q) -> ExtendedRational {
    Finite(x)
}

fn qq(n: i64, d: i64) -> Q {
    Q::new(n, d)
}

/// Candidate exponents around the thresholds `1/q′` and `−1/q`.
fn log_exponents(q: ExtendedRational) -> Vec<Q> {
    let a = q.conjugate().recip();
    let b = -q.recip();
    let mut v = vec![a - 1, a, a + 1, b - 1, b, b + qq(1, 2), Q::zero(), qq(1, 2), qq(-3, 2)];
    v.sort();
    v.dedup();
    v
}

fn p_values(m: u32, n: u32) -> Vec<ExtendedRational> {
    let c1 = qq(n as i64, m as i64);
    let mut v = vec![Q::one(), c1, (Q::one() + c1) / 2, c1 + 1, c1 * 2, Q::from_integer(n as i64) * 3];
    if m >= 2 {
        let c2 = qq(n as i64, m as i64 - 1);
        v.extend([c2, (c1 + c2) / 2, c2 + 1]);
    }
    let top = qq(n as i64, n as i64 - 1);
    v.extend([top, (Q::one() + top) / 2]);
    v.sort();
    v.dedup();
    let mut out: Vec<ExtendedRational> = v.into_iter().filter(|p| *p >= Q::one()).map(ext_q).collect();
    out.push(Infinity);
    out
}

const Q_VALUES: [(i64, i64); 3] = [(1, 1), (2, 1), (3, 1)];

fn q_values() -> Vec<ExtendedRational> {
    let mut v: Vec<ExtendedRational> = Q_VALUES.iter().map(|&(a, b)| ExtendedRational::new(a, b)).collect();
    v.push(Infinity);
    v
}

/// All valid star and double-star domains on the candidate grid for `(m, n)`.
pub fn candidate_spaces(m: u32, n: u32) -> Vec<SpaceDescriptor> {
    let mut out = Vec::new();
    for q in q_values() {
        let logs = log_exponents(q);
        for &p in &p_values(m, n) {
            for &a in &logs {
                for &b in &logs {
                    out.push(SpaceDescriptor::star(p, q, a, b));
                }
            }
        }
        for &a in &logs {
            for &b in &logs {
                out.push(SpaceDescriptor::double_star(ExtendedRational::int(1), q, a, b));
            }
        }
    }
    out.retain(|d| validate(d).status == ValidationStatus::ValidNorm);
    out
}

fn show_payload(p: &Payload) -> String {
    match p {
        Payload::Space(s) => s.to_string(),
        Payload::Form(f) => f.to_string(),
        Payload::Bracket { lower, upper } => format!("[{lower}, {upper}]"),
        Payload::NoEmbedding => "no embedding".into(),
        Payload::Bool(b) => b.to_string(),
    }
}

fn check(report: &TargetReport, q: &EmbeddingQuery) -> Result<Option<SweepEntry>> {
    let Some((table, row)) = report.row else { return Ok(None) };
    let (derived, agrees) = match table {
        Table::RiStar | Table::RiDoubleStar => {
            let ok = ri_consistent(q)?;
            (format!("associate fundamental consistent: {ok}"), ok)
        }
        Table::Continuity => {
            let d = derive_c0_via_proof(q)?;
            (d.to_string(), report.payload == Payload::Bool(d))
        }
        Table::HolderFirst | Table::HolderMiddle | Table::HolderTop | Table::HolderDoubleStar => {
            let d = derive_modulus_via_proof(q)?;
            (format!("{d:?}"), d.matches(&report.payload))
        }
        Table::MorreyStar | Table::MorreyDoubleStar => {
            let d = derive_morrey_via_proof(q)?;
            (d.to_string(), report.form().is_some_and(|f| f.is_equivalent(&d)))
        }
        _ => {
            let d = derive_campanato_via_proof(q)?;
            (d.to_string(), report.form().is_some_and(|f| f.is_equivalent(&d)))
        }
    };
    Ok(Some(SweepEntry { table, row, query: *q, tabulated: show_payload(&report.payload), derived, agrees }))
}

/// Up to `per_row` tuples for every `(table, row)`, in grid order, each
/// checked against its derivation.
pub fn table_sweep(per_row: usize) -> Result<Vec<SweepEntry>> {
    let mut counts: BTreeMap<(Table, u8), usize> = BTreeMap::new();
    let mut out = Vec::new();
    for (m, n) in ORDERS {
        for space in candidate_spaces(m, n) {
            let q = EmbeddingQuery::new(m, n, space)?;
            let reports =
                [ri_optimal_target(&q), c0_embeds(&q), optimal_modulus(&q), optimal_morrey(&q), optimal_campanato(&q)];
            for report in &reports {
                let Some(key) = report.row else { continue };
                let seen = counts.entry(key).or_default();
                if *seen >= per_row {
                    continue;
                }
                if let Some(entry) = check(report, &q)? {
                    *seen += 1;
                    out.push(entry);
                }
            }
        }
    }
    Ok(out)
}

/// Rows `1..=lines` of `table` with fewer than `min` entries.
pub fn uncovered_rows(entries: &[SweepEntry], min: usize) -> Vec<(Table, u8)> {
    let mut missing = Vec::new();
    for table in Table::ALL {
        for row in 1..=table.lines() {
            let c = entries.iter().filter(|e| e.table == table && e.row == row).count();
            if c < min {
                missing.push((table, row));
            }
        }
    }
    missing
}

#[derive(Clone, Debug, Serialize)]
pub struct ComparisonEntry {
    pub query: EmbeddingQuery,
    pub kind: &'static str,
    pub listed: SpaceComparison,
    pub from_forms: SpaceComparison,
    /// Both optimal forms exist, so `listed` and `from_forms` are comparable.
    pub comparable: bool,
}

impl ComparisonEntry {
    pub fn mismatch(&self) -> bool {
        self.comparable && self.listed != self.from_forms
    }
}

/// Tuples exercising every listed alternative of both comparisons and their
/// boundary near-misses.
pub fn comparison_sweep() -> Result<Vec<ComparisonEntry>> {
    let mut out = Vec::new();
    for (m, n) in ORDERS {
        for space in candidate_spaces(m, n) {
            let q = EmbeddingQuery::new(m, n, space)?;
            let campanato = optimal_campanato(&q).form().is_some();
            if let Ok(listed) = holder_campanato_compare(&q) {
                let comparable = campanato && optimal_modulus(&q).form().is_some();
                let from_forms = holder_campanato_forms(&q);
                out.push(ComparisonEntry { query: q, kind: "holder-campanato", listed, from_forms, comparable });
            }
            if let Ok(listed) = morrey_campanato_compare(&q) {
                let comparable = campanato && optimal_morrey(&q).form().is_some();
                let from_forms = morrey_campanato_forms(&q);
                out.push(ComparisonEntry { query: q, kind: "morrey-campanato", listed, from_forms, comparable });
            }
        }
    }
    Ok(out)
}
