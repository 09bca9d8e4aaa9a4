//! Fixed inputs shared by the benchmarks.

use glz_embed::oracle::EmbeddingQuery;
use glz_embed::{parse_q, ExtendedRational, PsiParams, SpaceDescriptor};

/// One query per table family.
pub fn sample_queries() -> Vec<EmbeddingQuery> {
    [(1, 2, "L(2,2;0,0)"), (1, 3, "L(3,2;1,-1)"), (2, 3, "L(4,2;0,0)"), (2, 2, "L*(1,2;0,0)"), (3, 3, "L(1,1;0,0)")]
        .iter()
        .map(|&(m, n, s)| EmbeddingQuery::new(m, n, s.parse().expect("fixture parses")).expect("fixture is valid"))
        .collect()
}

/// Head-norm kernels covering the power, log and iterated-log regimes.
pub fn sample_kernels() -> Vec<PsiParams> {
    let p = |l: &str, q: &str, a: &str, b: &str| {
        PsiParams::new(
            parse_q(l).unwrap(),
            q.parse::<ExtendedRational>().unwrap(),
            parse_q(a).unwrap(),
            parse_q(b).unwrap(),
        )
    };
    vec![p("1/2", "2", "0", "0"), p("0", "2", "1", "0"), p("0", "inf", "1", "2"), p("0", "1", "1", "0")]
}

pub fn sample_spaces() -> Vec<SpaceDescriptor> {
    ["L(2,2;0,0)", "L(inf,2;-1,0)", "L*(1,2;0,0)", "L(4,3;1,-1)"].iter().map(|s| s.parse().unwrap()).collect()
}
