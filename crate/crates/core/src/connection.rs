//! The canonical logarithmic connection of an equivariant bundle.
//!
//! In the eigenframe of a chart the connection matrix is diagonal with
//! constant `dlog` coefficients: the slot with weight `u` receives
//! `ε Σ_i ⟨u, v_i⟩ dx_i/x_i`, where the `v_i` are the chart's rays and
//! `ε` is the global sign [`CONNECTION_SIGN`].  Everything checkable
//! about this connection is checked exactly: the gauge transformation
//! law across every chart pair, vanishing curvature, parallelism of the
//! twisted frame, residue spectra along every boundary divisor, and the
//! degree bookkeeping that ties residue traces to the determinant line.

use thiserror::Error;

use crate::algebra::forms::LogOneForm;
use crate::algebra::laurent::Laurent;
use crate::algebra::linalg::QMat;
use crate::algebra::matrix::LaurentMat;
use crate::algebra::rational::{format_rat, rint, Rat};
use crate::fan::Atlas;
use crate::klyachko::EquivariantBundle;

/// The sign `ε` tying weights to connection coefficients.  With the
/// decreasing-filtration convention used by the builder, `ε = -1` is the
/// unique choice for which the twisted frame is parallel and the gauge
/// law holds; the sign-pinning test below fails for `+1`.
pub const CONNECTION_SIGN: i64 = -1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectionError {
    #[error("gauge law fails from chart {from} to chart {to}: {detail}")]
    GaugeMismatch { to: usize, from: usize, detail: String },
    #[error("curvature does not vanish on chart {chart}: {detail}")]
    NotFlat { chart: usize, detail: String },
    #[error("twisted frame is not parallel on chart {chart}: {detail}")]
    NotParallel { chart: usize, detail: String },
    #[error("chart {chart}, coordinate {coord}: pole of order above one")]
    HigherOrderPole { chart: usize, coord: usize },
    #[error("residue along ray {ray} in chart {chart} is not constant")]
    NonConstantResidue { ray: usize, chart: usize },
    #[error("residue spectrum along ray {ray} in chart {chart} is wrong: {detail}")]
    ResidueMismatch { ray: usize, chart: usize, detail: String },
    #[error("degree bookkeeping fails along ray {ray}: {detail}")]
    ChernMismatch { ray: usize, detail: String },
}

/// Connection matrices, one per chart, in that chart's eigenframe.
#[derive(Debug, Clone, PartialEq)]
pub struct LogConnection {
    pub rank: usize,
    pub charts: Vec<LogOneForm>,
}

/// Builds the diagonal connection for an explicit sign (tests pin the
/// sign by showing the other choice breaks the gauge law).
pub fn canonical_connection_with_sign(
    atlas: &Atlas,
    bundle: &EquivariantBundle,
    sign: i64,
) -> LogConnection {
    let n = atlas.rank();
    let r = bundle.rank;
    let charts = bundle
        .decompositions
        .iter()
        .map(|dec| {
            let chart = atlas.chart(dec.chart);
            let per_slot: Vec<Vec<i64>> =
                dec.weights.iter().map(|u| chart.weight_exponents(u)).collect();
            let dlog = (0..n)
                .map(|i| {
                    LaurentMat::from_fn(r, r, n, |a, b| {
                        if a == b {
                            Laurent::constant(n, rint(sign * per_slot[a][i]))
                        } else {
                            Laurent::zero(n)
                        }
                    })
                })
                .collect();
            LogOneForm::from_dlog(n, r, r, dlog)
        })
        .collect();
    LogConnection { rank: r, charts }
}

pub fn canonical_connection(atlas: &Atlas, bundle: &EquivariantBundle) -> LogConnection {
    canonical_connection_with_sign(atlas, bundle, CONNECTION_SIGN)
}

/// Covariant derivative of a matrix of sections written in the chart
/// eigenframe: `∇F = dF + A F`.
pub fn covariant_derivative(a: &LogOneForm, f: &LaurentMat) -> LogOneForm {
    LogOneForm::d_of_matrix(f).add(&a.right_mul(f))
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct GaugeCheck {
    pub pairs: usize,
}

/// The connection matrices must satisfy
/// `A_t = g^{-1} A_s g + g^{-1} dg` for every chart pair, with both
/// sides written in chart-`s` coordinates and `g` the transition from
/// `t` to `s`.
pub fn check_gauge_law(
    atlas: &Atlas,
    bundle: &EquivariantBundle,
    conn: &LogConnection,
) -> Result<GaugeCheck, ConnectionError> {
    let k = atlas.len();
    let mut pairs = 0;
    for s in 0..k {
        for t in 0..k {
            if s == t {
                continue;
            }
            let g = &bundle.cocycles[s][t];
            let g_inv = g.inverse().map_err(|e| ConnectionError::GaugeMismatch {
                to: s,
                from: t,
                detail: format!("transition is not invertible: {e}"),
            })?;
            let lhs = conn.charts[t].transport(atlas.transition(s, t));
            let rhs = conn.charts[s]
                .right_mul(g)
                .left_mul(&g_inv)
                .add(&LogOneForm::d_of_matrix(g).left_mul(&g_inv));
            if lhs != rhs {
                let detail = lhs.first_difference(&rhs).unwrap_or_default();
                return Err(ConnectionError::GaugeMismatch { to: s, from: t, detail });
            }
            pairs += 1;
        }
    }
    Ok(GaugeCheck { pairs })
}

#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct FlatnessCheck {
    pub charts: usize,
}

/// Curvature `dA + A ∧ A` must vanish identically on every chart.
pub fn check_flatness(conn: &LogConnection) -> Result<FlatnessCheck, ConnectionError> {
    for (c, a) in conn.charts.iter().enumerate() {
        let f = a.exterior_derivative().add(&a.wedge(a));
        if !f.is_zero() {
            let zero = crate::algebra::forms::LogTwoForm::zero(a.vars(), conn.rank, conn.rank);
            let detail = f.first_difference(&zero).unwrap_or_default();
            return Err(ConnectionError::NotFlat { chart: c, detail });
        }
    }
    Ok(FlatnessCheck { charts: conn.charts.len() })
}

/// The frame section `x^{-ε c_a} s_a` (with `c_a` the slot's jump vector)
/// must be parallel on each chart.
pub fn check_flat_frames(
    atlas: &Atlas,
    bundle: &EquivariantBundle,
    conn: &LogConnection,
) -> Result<(), ConnectionError> {
    let n = atlas.rank();
    let r = bundle.rank;
    for (c, a) in conn.charts.iter().enumerate() {
        let chart = atlas.chart(c);
        let dec = &bundle.decompositions[c];
        let h = LaurentMat::from_fn(r, r, n, |i, j| {
            if i == j {
                let mut e = chart.weight_exponents(&dec.weights[i]);
                for x in &mut e {
                    *x *= -CONNECTION_SIGN;
                }
                Laurent::monomial(e, rint(1))
            } else {
                Laurent::zero(n)
            }
        });
        let nabla = covariant_derivative(a, &h);
        if !nabla.is_zero() {
            let zero = LogOneForm::zero(n, r, r);
            let detail = nabla.first_difference(&zero).unwrap_or_default();
            return Err(ConnectionError::NotParallel { chart: c, detail });
        }
    }
    Ok(())
}

/// Residue data along one ray's divisor.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidueSpectrum {
    pub ray: usize,
    /// eigenvalues with multiplicity, ascending
    pub eigenvalues: Vec<Rat>,
    pub trace: Rat,
}

fn constant_qmat(m: &LaurentMat) -> Option<QMat> {
    let mut q = QMat::zero(m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            q[(i, j)] = m.get(i, j).as_constant()?;
        }
    }
    Some(q)
}

/// Characteristic polynomial `det(λ I - R)` as a one-variable Laurent
/// polynomial; exact, no root extraction needed.
fn char_poly(r: &QMat, size: usize) -> Laurent {
    let m = LaurentMat::from_fn(size, size, 1, |i, j| {
        let lam = if i == j { Laurent::monomial(vec![1], rint(1)) } else { Laurent::zero(1) };
        lam.sub(&Laurent::constant(1, r[(i, j)].clone()))
    });
    m.det()
}

/// Extracts the residue along every ray from every chart containing its
/// divisor, verifies the spectra against the filtration jumps, and
/// verifies that all hosting charts agree.
pub fn check_residues(
    atlas: &Atlas,
    bundle: &EquivariantBundle,
    conn: &LogConnection,
) -> Result<Vec<ResidueSpectrum>, ConnectionError> {
    let r = bundle.rank;
    let mut out = Vec::new();
    for ray in 0..atlas.fan().rays().len() {
        let jumps = bundle.data.filtrations[ray].jump_multiset();
        let mut eigenvalues: Vec<Rat> =
            jumps.iter().map(|&j| rint(CONNECTION_SIGN * j)).collect();
        eigenvalues.sort();
        let expected = eigenvalues
            .iter()
            .fold(Laurent::one(1), |acc, ev| {
                acc.mul(&Laurent::monomial(vec![1], rint(1)).sub(&Laurent::constant(1, ev.clone())))
            });
        for (chart, coord) in atlas.ray_charts(ray) {
            let res = conn.charts[chart]
                .residue(coord)
                .ok_or(ConnectionError::HigherOrderPole { chart, coord })?;
            let q = constant_qmat(&res)
                .ok_or(ConnectionError::NonConstantResidue { ray, chart })?;
            let got = char_poly(&q, r);
            if got != expected {
                return Err(ConnectionError::ResidueMismatch {
                    ray,
                    chart,
                    detail: format!(
                        "characteristic polynomial {got} differs from expected {expected}"
                    ),
                });
            }
        }
        let trace = eigenvalues.iter().fold(rint(0), |acc, ev| acc + ev);
        out.push(ResidueSpectrum { ray, eigenvalues, trace });
    }
    Ok(out)
}

/// Degree bookkeeping along each ray, computed two independent ways.
#[derive(Debug, Clone, PartialEq)]
pub struct FirstChernCheck {
    /// trace of the residue along each ray, from the connection matrices
    pub residue_traces: Vec<Rat>,
    /// divisor coefficient of the determinant line along each ray, from
    /// the input jumps
    pub divisor_coefficients: Vec<i64>,
}

/// The residue trace along each ray must equal `-ε` times the divisor
/// coefficient of the determinant line there (which is minus the jump
/// sum of the filtration).
pub fn check_first_chern(
    atlas: &Atlas,
    bundle: &EquivariantBundle,
    conn: &LogConnection,
) -> Result<FirstChernCheck, ConnectionError> {
    let rays = atlas.fan().rays().len();
    let mut residue_traces = Vec::with_capacity(rays);
    let mut divisor_coefficients = Vec::with_capacity(rays);
    for ray in 0..rays {
        let (chart, coord) = atlas.ray_charts(ray)[0];
        let res = conn.charts[chart]
            .residue(coord)
            .ok_or(ConnectionError::HigherOrderPole { chart, coord })?;
        let q = constant_qmat(&res)
            .ok_or(ConnectionError::NonConstantResidue { ray, chart })?;
        let trace = (0..bundle.rank).fold(rint(0), |acc, i| acc + q[(i, i)].clone());
        let coeff = -bundle.data.jump_sum(ray);
        let expected = rint(-CONNECTION_SIGN * coeff);
        if trace != expected {
            return Err(ConnectionError::ChernMismatch {
                ray,
                detail: format!(
                    "residue trace {} vs {} from divisor coefficient {coeff}",
                    format_rat(&trace),
                    format_rat(&expected)
                ),
            });
        }
        residue_traces.push(trace);
        divisor_coefficients.push(coeff);
    }
    Ok(FirstChernCheck { residue_traces, divisor_coefficients })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fan::Fan;
    use crate::klyachko::{build_bundle, FiltrationStep, KlyachkoData, RayFiltration};

    fn rv(xs: &[i64]) -> Vec<Rat> {
        xs.iter().map(|&x| rint(x)).collect()
    }

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

    fn line_bundle_p1(k: i64) -> KlyachkoData {
        KlyachkoData {
            rank: 1,
            filtrations: vec![
                RayFiltration::new(vec![FiltrationStep { jump: 0, vectors: vec![rv(&[1])] }]),
                RayFiltration::new(vec![FiltrationStep { jump: k, vectors: vec![rv(&[1])] }]),
            ],
        }
    }

    fn tangent_p2() -> KlyachkoData {
        let f = |dir: &[i64], rest: &[i64]| {
            RayFiltration::new(vec![
                FiltrationStep { jump: 1, vectors: vec![rv(dir)] },
                FiltrationStep { jump: 0, vectors: vec![rv(rest)] },
            ])
        };
        KlyachkoData {
            rank: 2,
            filtrations: vec![
                f(&[1, 0], &[0, 1]),
                f(&[0, 1], &[1, 0]),
                f(&[-1, -1], &[1, 0]),
            ],
        }
    }

    #[test]
    fn line_bundle_connection_is_frozen() {
        let atlas = p1_atlas();
        let k = 3;
        let bundle = build_bundle(&atlas, &line_bundle_p1(k)).unwrap();
        let conn = canonical_connection(&atlas, &bundle);
        assert!(conn.charts[0].is_zero());
        // chart 1 weight is -k against ray -1: coefficient -k dlog y
        assert_eq!(
            conn.charts[1].log[0].get(0, 0),
            &Laurent::constant(1, rint(-k))
        );
    }

    #[test]
    fn gauge_law_holds_and_pins_the_sign() {
        let atlas = p1_atlas();
        let bundle = build_bundle(&atlas, &line_bundle_p1(1)).unwrap();
        let good = canonical_connection(&atlas, &bundle);
        assert_eq!(check_gauge_law(&atlas, &bundle, &good).unwrap().pairs, 2);
        let flipped = canonical_connection_with_sign(&atlas, &bundle, -CONNECTION_SIGN);
        assert!(matches!(
            check_gauge_law(&atlas, &bundle, &flipped),
            Err(ConnectionError::GaugeMismatch { .. })
        ));
        assert!(matches!(
            check_flat_frames(&atlas, &bundle, &flipped),
            Err(ConnectionError::NotParallel { .. })
        ));
    }

    #[test]
    fn tangent_plane_connection_checks() {
        let atlas = p2_atlas();
        let bundle = build_bundle(&atlas, &tangent_p2()).unwrap();
        let conn = canonical_connection(&atlas, &bundle);
        assert_eq!(check_gauge_law(&atlas, &bundle, &conn).unwrap().pairs, 6);
        assert_eq!(check_flatness(&conn).unwrap().charts, 3);
        check_flat_frames(&atlas, &bundle, &conn).unwrap();
        let spectra = check_residues(&atlas, &bundle, &conn).unwrap();
        for s in &spectra {
            assert_eq!(s.eigenvalues, vec![rint(-1), rint(0)]);
            assert_eq!(s.trace, rint(-1));
        }
        let chern = check_first_chern(&atlas, &bundle, &conn).unwrap();
        assert_eq!(chern.divisor_coefficients, vec![-1, -1, -1]);
        assert_eq!(chern.residue_traces, vec![rint(-1), rint(-1), rint(-1)]);
    }

    #[test]
    fn perturbed_connection_fails_every_check() {
        let atlas = p1_atlas();
        let bundle = build_bundle(&atlas, &line_bundle_p1(2)).unwrap();
        let mut conn = canonical_connection(&atlas, &bundle);
        // shift one diagonal dlog coefficient by 1
        let mut dlog = conn.charts[1].dlog_coeff(0);
        let bumped = dlog.get(0, 0).add(&Laurent::one(1));
        dlog.set(0, 0, bumped);
        conn.charts[1] = LogOneForm::from_dlog(1, 1, 1, vec![dlog]);
        assert!(matches!(
            check_gauge_law(&atlas, &bundle, &conn),
            Err(ConnectionError::GaugeMismatch { .. })
        ));
        assert!(matches!(
            check_flat_frames(&atlas, &bundle, &conn),
            Err(ConnectionError::NotParallel { .. })
        ));
        assert!(matches!(
            check_residues(&atlas, &bundle, &conn),
            Err(ConnectionError::ResidueMismatch { ray: 1, .. })
        ));
        assert!(matches!(
            check_first_chern(&atlas, &bundle, &conn),
            Err(ConnectionError::ChernMismatch { ray: 1, .. })
        ));
    }

    #[test]
    fn nilpotent_perturbation_breaks_flatness() {
        let atlas = p2_atlas();
        let data = KlyachkoData {
            rank: 2,
            filtrations: (0..3)
                .map(|_| {
                    RayFiltration::new(vec![FiltrationStep {
                        jump: 0,
                        vectors: vec![rv(&[1, 0]), rv(&[0, 1])],
                    }])
                })
                .collect(),
        };
        let bundle = build_bundle(&atlas, &data).unwrap();
        let mut conn = canonical_connection(&atlas, &bundle);
        assert!(check_flatness(&conn).is_ok());
        // add x2 dx1 in the top-right corner
        let mut g0 = conn.charts[0].dlog_coeff(0);
        g0.set(0, 1, Laurent::monomial(vec![1, 1], rint(1)));
        conn.charts[0] = LogOneForm::from_dlog(2, 2, 2, vec![g0, conn.charts[0].dlog_coeff(1)]);
        assert!(matches!(
            check_flatness(&conn),
            Err(ConnectionError::NotFlat { chart: 0, .. })
        ));
    }

    #[test]
    fn residue_spectra_follow_the_jumps() {
        let atlas = p1_atlas();
        for k in -2..=2 {
            let bundle = build_bundle(&atlas, &line_bundle_p1(k)).unwrap();
            let conn = canonical_connection(&atlas, &bundle);
            let spectra = check_residues(&atlas, &bundle, &conn).unwrap();
            assert_eq!(spectra[0].eigenvalues, vec![rint(0)]);
            assert_eq!(spectra[1].eigenvalues, vec![rint(-k)]);
        }
    }
}
