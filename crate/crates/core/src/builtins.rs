//! Named example fans and bundles, plus deliberately broken fixtures.
//!
//! The CLI accepts `builtin:NAME` wherever a file path is expected; the
//! names here are the catalogue.  Broken fixtures carry a [`Tamper`]
//! describing a modification applied after construction, so the
//! verification stages have genuine failures to detect.

use crate::algebra::forms::LogOneForm;
use crate::algebra::laurent::Laurent;
use crate::algebra::linalg::Subspace;
use crate::algebra::rational::{rint, Rat};
use crate::connection::LogConnection;
use crate::fan::{Atlas, Fan};
use crate::klyachko::{EquivariantBundle, FiltrationStep, KlyachkoData, RayFiltration};

/// A post-construction modification for negative-control fixtures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tamper {
    None,
    /// overwrite one transition entry with a monomial
    CocycleEntry { to: usize, from: usize, entry: (usize, usize), exponent: Vec<i64> },
    /// multiply one diagonal slot of a transition (and its inverse,
    /// consistently) by a monomial, so the pair still cancels but loops
    /// do not close
    DiagonalTwist { to: usize, from: usize, slot: usize, exponent: Vec<i64> },
    /// shift one diagonal connection coefficient by a constant
    ConnectionShift { chart: usize, slot: usize, coord: usize, delta: i64 },
    /// add a nilpotent logarithmic term to one connection matrix
    Nilpotent { chart: usize },
}

impl Tamper {
    pub fn is_none(&self) -> bool {
        matches!(self, Tamper::None)
    }

    /// Applies the bundle-level part of the tamper.
    pub fn apply_to_bundle(&self, atlas: &Atlas, bundle: &mut EquivariantBundle) {
        match self {
            Tamper::CocycleEntry { to, from, entry, exponent } => {
                let mut m = bundle.cocycles[*to][*from].clone();
                m.set(entry.0, entry.1, Laurent::monomial(exponent.clone(), rint(1)));
                bundle.cocycles[*to][*from] = m;
            }
            Tamper::DiagonalTwist { to, from, slot, exponent } => {
                let twist = |m: &Laurent, e: &[i64]| m.mul_monomial(e);
                let g = bundle.cocycles[*to][*from].get(*slot, *slot).clone();
                let mut m_to = bundle.cocycles[*to][*from].clone();
                m_to.set(*slot, *slot, twist(&g, exponent));
                bundle.cocycles[*to][*from] = m_to;
                // keep the opposite direction inverse-consistent
                let neg: Vec<i64> = exponent.iter().map(|x| -x).collect();
                let back = atlas.transition(*from, *to).matvec(&neg);
                let h = bundle.cocycles[*from][*to].get(*slot, *slot).clone();
                let mut m_from = bundle.cocycles[*from][*to].clone();
                m_from.set(*slot, *slot, twist(&h, &back));
                bundle.cocycles[*from][*to] = m_from;
            }
            _ => {}
        }
    }

    /// Applies the connection-level part of the tamper.
    pub fn apply_to_connection(&self, conn: &mut LogConnection) {
        match self {
            Tamper::ConnectionShift { chart, slot, coord, delta } => {
                let a = &conn.charts[*chart];
                let vars = a.vars();
                let mut coeffs: Vec<_> = (0..vars).map(|i| a.dlog_coeff(i)).collect();
                let bumped = coeffs[*coord]
                    .get(*slot, *slot)
                    .add(&Laurent::constant(vars, rint(*delta)));
                coeffs[*coord].set(*slot, *slot, bumped);
                conn.charts[*chart] = LogOneForm::from_dlog(vars, conn.rank, conn.rank, coeffs);
            }
            Tamper::Nilpotent { chart } => {
                let a = &conn.charts[*chart];
                let vars = a.vars();
                let mut coeffs: Vec<_> = (0..vars).map(|i| a.dlog_coeff(i)).collect();
                let mut e = vec![0i64; vars];
                e[0] = 1;
                e[1] = 1;
                let bumped = coeffs[0].get(0, 1).add(&Laurent::monomial(e, rint(1)));
                coeffs[0].set(0, 1, bumped);
                conn.charts[*chart] = LogOneForm::from_dlog(vars, conn.rank, conn.rank, coeffs);
            }
            _ => {}
        }
    }
}

fn hirzebruch(a: i64) -> Fan {
    Fan::from_parts(
        2,
        vec![vec![1, 0], vec![0, 1], vec![-1, a], vec![0, -1]],
        vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
    )
}

pub const FAN_NAMES: &[&str] = &[
    "p1",
    "p2",
    "p3",
    "p1xp1",
    "f1",
    "f2",
    "f3",
    "blowup-p2",
    "corrupt-nonprimitive",
    "corrupt-nonsmooth",
    "corrupt-incomplete",
];

pub fn builtin_fan(name: &str) -> Option<Fan> {
    let fan = match name {
        "p1" => Fan::from_parts(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]),
        "p2" => Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        ),
        "p3" => Fan::from_parts(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        ),
        "p1xp1" => hirzebruch(0),
        "f1" => hirzebruch(1),
        "f2" => hirzebruch(2),
        "f3" => hirzebruch(3),
        "blowup-p2" => Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![1, 1]],
            vec![vec![0, 3], vec![3, 1], vec![1, 2], vec![2, 0]],
        ),
        "corrupt-nonprimitive" => {
            Fan::from_parts(2, vec![vec![1, 0], vec![0, 2]], vec![vec![0, 1]])
        }
        "corrupt-nonsmooth" => Fan::from_parts(
            2,
            vec![vec![1, 0], vec![1, 2], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        ),
        "corrupt-incomplete" => Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2]],
        ),
        _ => return None,
    };
    Some(fan)
}

fn rv(xs: &[i64]) -> Vec<Rat> {
    xs.iter().map(|&x| rint(x)).collect()
}

/// Rank-one data with one prescribed jump per ray.
pub fn line_data(jumps: &[i64]) -> KlyachkoData {
    KlyachkoData {
        rank: 1,
        filtrations: jumps
            .iter()
            .map(|&j| {
                RayFiltration::new(vec![FiltrationStep { jump: j, vectors: vec![vec![rint(1)]] }])
            })
            .collect(),
    }
}

/// Direct sum of lines: slot `d` jumps by `lines[d][ray]` in direction
/// of the `d`-th coordinate vector.
pub fn sum_of_lines(lines: &[Vec<i64>]) -> KlyachkoData {
    let rank = lines.len();
    let rays = lines[0].len();
    let filtrations = (0..rays)
        .map(|ray| {
            let mut by_jump: std::collections::BTreeMap<i64, Vec<Vec<Rat>>> = Default::default();
            for (d, line) in lines.iter().enumerate() {
                let mut e = vec![rint(0); rank];
                e[d] = rint(1);
                by_jump.entry(line[ray]).or_default().push(e);
            }
            RayFiltration::new(
                by_jump
                    .into_iter()
                    .map(|(jump, vectors)| FiltrationStep { jump, vectors })
                    .collect(),
            )
        })
        .collect();
    KlyachkoData { rank, filtrations }
}

/// Rank-`rank` data with every filtration jumping all at once at zero.
pub fn trivial_data(rank: usize, rays: usize) -> KlyachkoData {
    sum_of_lines(&vec![vec![0; rays]; rank])
}

/// The tangent bundle: each ray keeps its own direction one step longer
/// than the rest of the space.
pub fn tangent_data(fan: &Fan) -> KlyachkoData {
    let n = fan.rank();
    let filtrations = fan
        .rays()
        .iter()
        .map(|ray| {
            let v: Vec<Rat> = ray.iter().map(|&x| rint(x)).collect();
            let rest = Subspace::full(n)
                .pivot_complement(&Subspace::from_vectors(n, std::slice::from_ref(&v)));
            let mut steps = vec![FiltrationStep { jump: 1, vectors: vec![v] }];
            if !rest.is_empty() {
                steps.push(FiltrationStep { jump: 0, vectors: rest });
            }
            RayFiltration::new(steps)
        })
        .collect();
    KlyachkoData { rank: n, filtrations }
}

fn three_lines_p3() -> KlyachkoData {
    let line = |v: &[i64], rest: &[i64]| {
        RayFiltration::new(vec![
            FiltrationStep { jump: 1, vectors: vec![rv(v)] },
            FiltrationStep { jump: 0, vectors: vec![rv(rest)] },
        ])
    };
    KlyachkoData {
        rank: 2,
        filtrations: vec![
            line(&[1, 0], &[0, 1]),
            line(&[0, 1], &[1, 0]),
            line(&[1, 1], &[1, 0]),
            RayFiltration::new(vec![FiltrationStep {
                jump: 0,
                vectors: vec![rv(&[1, 0]), rv(&[0, 1])],
            }]),
        ],
    }
}

/// A named bundle fixture: data plus the fan it lives on.
#[derive(Debug, Clone)]
pub struct BuiltinBundle {
    pub name: &'static str,
    pub fan: &'static str,
    pub summary: &'static str,
    pub data: KlyachkoData,
    pub tamper: Tamper,
}

pub const BUNDLE_NAMES: &[&str] = &[
    "p1-trivial",
    "p1-o1",
    "p1-o2",
    "p1-om1",
    "p1-om2",
    "p1-o1-plus-om1",
    "p1-tangent",
    "p2-trivial",
    "p2-o1",
    "p2-om2",
    "p2-tangent",
    "p2-o1-plus-om1",
    "p1xp1-o11",
    "p1xp1-o2m3",
    "p1xp1-tangent",
    "f1-line",
    "f1-tangent",
    "f2-line",
    "f2-tangent",
    "f3-line",
    "f3-tangent",
    "blowup-p2-tangent",
    "p3-o1",
    "p3-tangent",
    "p3-three-lines",
    "p2-tangent-corrupted-cocycle",
    "p1-o2-perturbed-connection",
    "p2-trivial-nonflat",
    "p2-o1-nonexact",
];

pub fn builtin_bundle(name: &str) -> Option<BuiltinBundle> {
    let mk = |fan: &'static str, summary: &'static str, data: KlyachkoData, tamper: Tamper| {
        Some(BuiltinBundle {
            name: BUNDLE_NAMES.iter().find(|&&n| n == name).copied().unwrap_or("?"),
            fan,
            summary,
            data,
            tamper,
        })
    };
    let fan_of = |n: &str| builtin_fan(n).expect("registered fan");
    match name {
        "p1-trivial" => mk("p1", "rank-two trivial bundle", trivial_data(2, 2), Tamper::None),
        "p1-o1" => mk("p1", "degree-one line", line_data(&[0, 1]), Tamper::None),
        "p1-o2" => mk("p1", "degree-two line", line_data(&[0, 2]), Tamper::None),
        "p1-om1" => mk("p1", "degree minus one line", line_data(&[0, -1]), Tamper::None),
        "p1-om2" => mk("p1", "degree minus two line", line_data(&[0, -2]), Tamper::None),
        "p1-o1-plus-om1" => mk(
            "p1",
            "sum of degree one and minus one",
            sum_of_lines(&[vec![0, 1], vec![0, -1]]),
            Tamper::None,
        ),
        "p1-tangent" => mk("p1", "tangent of the line", tangent_data(&fan_of("p1")), Tamper::None),
        "p2-trivial" => mk("p2", "rank-two trivial bundle", trivial_data(2, 3), Tamper::None),
        "p2-o1" => mk("p2", "hyperplane line", line_data(&[0, 0, 1]), Tamper::None),
        "p2-om2" => mk("p2", "degree minus two line", line_data(&[0, 0, -2]), Tamper::None),
        "p2-tangent" => mk("p2", "tangent of the plane", tangent_data(&fan_of("p2")), Tamper::None),
        "p2-o1-plus-om1" => mk(
            "p2",
            "sum of degrees one and minus one",
            sum_of_lines(&[vec![0, 0, 1], vec![0, 0, -1]]),
            Tamper::None,
        ),
        "p1xp1-o11" => mk("p1xp1", "bidegree (1,1) line", line_data(&[0, 0, 1, 1]), Tamper::None),
        "p1xp1-o2m3" => {
            mk("p1xp1", "bidegree (2,-3) line", line_data(&[0, 0, 2, -3]), Tamper::None)
        }
        "p1xp1-tangent" => mk(
            "p1xp1",
            "tangent of the quadric",
            tangent_data(&fan_of("p1xp1")),
            Tamper::None,
        ),
        "f1-line" => mk("f1", "a line on the first Hirzebruch surface", line_data(&[0, 0, 1, 1]), Tamper::None),
        "f1-tangent" => mk("f1", "tangent bundle", tangent_data(&fan_of("f1")), Tamper::None),
        "f2-line" => mk("f2", "a line on the second Hirzebruch surface", line_data(&[1, 0, 0, 2]), Tamper::None),
        "f2-tangent" => mk("f2", "tangent bundle", tangent_data(&fan_of("f2")), Tamper::None),
        "f3-line" => mk("f3", "a line on the third Hirzebruch surface", line_data(&[0, -1, 2, 0]), Tamper::None),
        "f3-tangent" => mk("f3", "tangent bundle", tangent_data(&fan_of("f3")), Tamper::None),
        "blowup-p2-tangent" => mk(
            "blowup-p2",
            "tangent of the blown-up plane",
            tangent_data(&fan_of("blowup-p2")),
            Tamper::None,
        ),
        "p3-o1" => mk("p3", "hyperplane line", line_data(&[0, 0, 0, 1]), Tamper::None),
        "p3-tangent" => mk("p3", "tangent of projective space", tangent_data(&fan_of("p3")), Tamper::None),
        "p3-three-lines" => mk(
            "p3",
            "three distinct plane lines: not compatible over a solid cone",
            three_lines_p3(),
            Tamper::None,
        ),
        "p2-tangent-corrupted-cocycle" => mk(
            "p2",
            "tangent bundle with one transition entry overwritten",
            tangent_data(&fan_of("p2")),
            Tamper::CocycleEntry { to: 0, from: 1, entry: (0, 1), exponent: vec![1, 0] },
        ),
        "p1-o2-perturbed-connection" => mk(
            "p1",
            "degree-two line with one connection coefficient shifted",
            line_data(&[0, 2]),
            Tamper::ConnectionShift { chart: 1, slot: 0, coord: 0, delta: 1 },
        ),
        "p2-trivial-nonflat" => mk(
            "p2",
            "trivial bundle with a nilpotent term added to one chart",
            trivial_data(2, 3),
            Tamper::Nilpotent { chart: 0 },
        ),
        "p2-o1-nonexact" => mk(
            "p2",
            "hyperplane line with one transition twisted out of cocycle",
            line_data(&[0, 0, 1]),
            Tamper::DiagonalTwist { to: 0, from: 1, slot: 0, exponent: vec![1, 0] },
        ),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::klyachko::{build_bundle, check_cocycle_identities, KlyachkoError};

    #[test]
    fn all_clean_fans_validate() {
        for name in FAN_NAMES.iter().filter(|n| !n.starts_with("corrupt")) {
            let fan = builtin_fan(name).unwrap();
            assert!(fan.validate().is_empty(), "{name} should validate");
        }
    }

    #[test]
    fn corrupt_fans_fail_as_labelled() {
        use crate::fan::FanError;
        let errs = builtin_fan("corrupt-nonprimitive").unwrap().validate();
        assert!(errs.iter().any(|e| matches!(e, FanError::NonPrimitiveRay { .. })));
        let errs = builtin_fan("corrupt-nonsmooth").unwrap().validate();
        assert!(errs.iter().any(|e| matches!(e, FanError::NonSmoothCone { .. })));
        let errs = builtin_fan("corrupt-incomplete").unwrap().validate();
        assert!(errs.iter().any(|e| matches!(e, FanError::IncompleteFan { .. })));
    }

    #[test]
    fn clean_bundles_build_and_glue() {
        for name in BUNDLE_NAMES {
            let b = builtin_bundle(name).unwrap();
            if !b.tamper.is_none() || b.name == "p3-three-lines" {
                continue;
            }
            let atlas = Atlas::new(builtin_fan(b.fan).unwrap()).unwrap();
            let bundle = build_bundle(&atlas, &b.data)
                .unwrap_or_else(|e| panic!("{name} should build: {e}"));
            check_cocycle_identities(&atlas, &bundle)
                .unwrap_or_else(|e| panic!("{name} should glue: {e}"));
        }
    }

    #[test]
    fn three_lines_fixture_is_incompatible() {
        let b = builtin_bundle("p3-three-lines").unwrap();
        let atlas = Atlas::new(builtin_fan(b.fan).unwrap()).unwrap();
        let err = build_bundle(&atlas, &b.data).unwrap_err();
        assert!(matches!(err, KlyachkoError::IncompatibleFiltrations { .. }));
    }

    #[test]
    fn diagonal_twist_keeps_pairs_but_breaks_triples() {
        let b = builtin_bundle("p2-o1-nonexact").unwrap();
        let atlas = Atlas::new(builtin_fan(b.fan).unwrap()).unwrap();
        let mut bundle = build_bundle(&atlas, &b.data).unwrap();
        b.tamper.apply_to_bundle(&atlas, &mut bundle);
        // pair identity still holds...
        let g01 = &bundle.cocycles[0][1];
        let g10 = bundle.cocycles[1][0].map_exponents(atlas.transition(0, 1));
        assert_eq!(g01.mul(&g10), crate::algebra::matrix::LaurentMat::identity(1, 2));
        // ...but the full check detects the broken triple
        let err = check_cocycle_identities(&atlas, &bundle).unwrap_err();
        assert!(matches!(err, KlyachkoError::CocycleMismatch { .. }));
    }

    #[test]
    fn every_name_resolves() {
        for name in FAN_NAMES {
            assert!(builtin_fan(name).is_some());
        }
        for name in BUNDLE_NAMES {
            let b = builtin_bundle(name).unwrap();
            assert_eq!(&b.name, name);
            assert!(builtin_fan(b.fan).is_some());
        }
    }
}
