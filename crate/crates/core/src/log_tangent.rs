//! The logarithmic tangent sheaf and its canonical global frame.
//!
//! In each chart the sheaf of vector fields with logarithmic zeros along
//! the boundary is free on `X_i = x_i ∂/∂x_i`.  The torus provides `n`
//! global fields: the lattice basis vector `e_j` acts as the derivation
//! `δ_j = t_j ∂/∂t_j`, and in a chart with dual matrix `M` one has
//! `δ_j = Σ_i M_{ij} X_i`.  Since `M` is unimodular, the `δ_j` frame the
//! sheaf in every chart simultaneously — the log tangent bundle is the
//! trivial bundle on the ambient lattice.  This module computes the
//! per-chart action matrices, transports log fields between charts, and
//! verifies the triviality claim exactly.

use thiserror::Error;

use crate::algebra::intmat::IntMat;
use crate::algebra::matrix::LaurentMat;
use crate::algebra::rational::rint;
use crate::fan::{Atlas, Chart};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogTangentError {
    #[error("chart {chart}: action matrix has determinant {det}, not a unit")]
    NotUnimodular { chart: usize, det: i64 },
    #[error("global field {field} breaks between charts {from} and {to}: {detail}")]
    FrameMismatch { to: usize, from: usize, field: usize, detail: String },
}

/// What was verified, for reporting.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FrameCheck {
    pub charts: usize,
    pub pairs: usize,
}

/// Coordinates of the global fields `δ_1 .. δ_n` in the chart's log
/// frame; column `j` expresses `δ_j`.
pub fn action_matrix(chart: &Chart) -> IntMat {
    chart.dual_matrix.clone()
}

fn constant_mat(m: &IntMat, vars: usize) -> LaurentMat {
    LaurentMat::from_fn(m.rows, m.cols, vars, |i, j| {
        crate::algebra::laurent::Laurent::constant(vars, rint(m[(i, j)]))
    })
}

/// Rewrites a log vector field (columns of `field` are coefficient
/// vectors against the `from`-chart frame) into the `to`-chart frame.
/// Coefficient functions change coordinates monomially and the frame
/// itself transforms by the transposed inverse transition.
pub fn transport_log_field(
    atlas: &Atlas,
    to: usize,
    from: usize,
    field: &LaurentMat,
) -> LaurentMat {
    let rewrite = atlas.transition(to, from);
    let frame_change = atlas.transition(from, to).transpose();
    constant_mat(&frame_change, field.vars()).mul(&field.map_exponents(rewrite))
}

/// The kernel of the triviality check for one ordered chart pair: the
/// `from`-chart action matrix, pushed through the frame change, must
/// reproduce the `to`-chart action matrix.
pub fn check_frame_pair(
    m_to: &IntMat,
    m_from: &IntMat,
    transition_from_to: &IntMat,
) -> Result<(), String> {
    let transported = transition_from_to.transpose().mul(m_from);
    if &transported == m_to {
        return Ok(());
    }
    for i in 0..m_to.rows {
        for j in 0..m_to.cols {
            if transported[(i, j)] != m_to[(i, j)] {
                return Err(format!(
                    "coefficient of X_{} in δ_{}: transported {} vs native {}",
                    i + 1,
                    j + 1,
                    transported[(i, j)],
                    m_to[(i, j)]
                ));
            }
        }
    }
    unreachable!("matrices differ but no differing entry found");
}

/// Verifies that the torus fields trivialize the log tangent sheaf:
/// every action matrix is a unit and the frames glue across every
/// ordered chart pair.
pub fn check_global_frame(atlas: &Atlas) -> Result<FrameCheck, LogTangentError> {
    let k = atlas.len();
    for s in 0..k {
        let det = action_matrix(atlas.chart(s)).det();
        if det.abs() != 1 {
            return Err(LogTangentError::NotUnimodular { chart: s, det });
        }
    }
    let mut pairs = 0;
    for s in 0..k {
        let m_s = action_matrix(atlas.chart(s));
        for t in 0..k {
            if s == t {
                continue;
            }
            let m_t = action_matrix(atlas.chart(t));
            check_frame_pair(&m_s, &m_t, atlas.transition(t, s)).map_err(|detail| {
                let field = detail
                    .split("δ_")
                    .nth(1)
                    .and_then(|s| s.split(':').next())
                    .and_then(|s| s.parse::<usize>().ok())
                    .map_or(0, |f| f - 1);
                LogTangentError::FrameMismatch { to: s, from: t, field, detail }
            })?;
            pairs += 1;
        }
    }
    Ok(FrameCheck { charts: k, pairs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::laurent::Laurent;
    use crate::fan::Fan;

    fn p1_atlas() -> Atlas {
        Atlas::new(Fan::from_parts(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]])).unwrap()
    }

    fn p2_atlas() -> Atlas {
        Atlas::new(Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        ))
        .unwrap()
    }

    #[test]
    fn euler_field_on_the_line() {
        // x d/dx on the finite chart is -y d/dy at infinity
        let atlas = p1_atlas();
        let mut f = LaurentMat::zero(1, 1, 1);
        f.set(0, 0, Laurent::one(1));
        let g = transport_log_field(&atlas, 1, 0, &f);
        assert_eq!(g.get(0, 0), &Laurent::constant(1, rint(-1)));
    }

    #[test]
    fn plane_frame_is_global() {
        let check = check_global_frame(&p2_atlas()).unwrap();
        assert_eq!(check.charts, 3);
        assert_eq!(check.pairs, 6);
    }

    #[test]
    fn plane_action_matrices_frozen() {
        let atlas = p2_atlas();
        assert_eq!(action_matrix(atlas.chart(0)), IntMat::identity(2));
        assert_eq!(
            action_matrix(atlas.chart(1)),
            IntMat::from_rows(&[vec![-1, 1], vec![-1, 0]])
        );
        assert_eq!(
            action_matrix(atlas.chart(2)),
            IntMat::from_rows(&[vec![0, -1], vec![1, -1]])
        );
    }

    #[test]
    fn transport_composes() {
        let atlas = p2_atlas();
        // a field with nonconstant coefficients
        let mut f = LaurentMat::zero(2, 1, 2);
        f.set(0, 0, Laurent::monomial(vec![1, 0], rint(1)).add(&Laurent::constant(2, rint(2))));
        f.set(1, 0, Laurent::monomial(vec![0, -1], rint(3)));
        for s in 0..3 {
            for t in 0..3 {
                for u in 0..3 {
                    let direct = transport_log_field(&atlas, s, u, &f);
                    let via_t =
                        transport_log_field(&atlas, s, t, &transport_log_field(&atlas, t, u, &f));
                    assert_eq!(direct, via_t);
                }
            }
        }
    }

    #[test]
    fn transport_round_trips() {
        let atlas = p2_atlas();
        let mut f = LaurentMat::zero(2, 1, 2);
        f.set(0, 0, Laurent::monomial(vec![2, 1], rint(5)));
        f.set(1, 0, Laurent::one(2));
        let back = transport_log_field(&atlas, 0, 1, &transport_log_field(&atlas, 1, 0, &f));
        assert_eq!(back, f);
    }

    #[test]
    fn tampered_pair_fails() {
        let atlas = p2_atlas();
        let m0 = action_matrix(atlas.chart(0));
        let m1 = action_matrix(atlas.chart(1));
        // the correct witness for this pair is transition(1, 0)
        assert!(check_frame_pair(&m0, &m1, atlas.transition(1, 0)).is_ok());
        // feeding the opposite direction must break the identity
        let wrong = atlas.transition(0, 1);
        assert!(check_frame_pair(&m0, &m1, wrong).is_err());
        // and a sign flip in one dual matrix is caught
        let mut bad = m1.clone();
        bad[(0, 1)] = -bad[(0, 1)];
        assert!(check_frame_pair(&m0, &bad, atlas.transition(1, 0)).is_err());
    }
}
