//! Fans, charts and chart transitions.
//!
//! A fan is given by its rays (primitive lattice vectors) and its maximal
//! cones (index sets into the ray list).  We only accept fans that are
//! smooth and complete: every maximal cone is generated by a lattice
//! basis, and the cones cover the whole ambient space.  Under those
//! hypotheses every chart is an affine space with coordinates indexed by
//! the cone's rays, the boundary divisor is a union of coordinate
//! hyperplanes meeting transversally, and chart transitions are monomial.
//!
//! Conventions used throughout:
//! * the ray matrix `V` of a cone has the rays as *columns*, in the order
//!   listed in the cone;
//! * the dual matrix `M = V^{-1}` has the dual basis as *rows*; chart
//!   coordinate `x_i` is the character of row `i`;
//! * a character with weight `u` becomes the monomial with exponent
//!   vector `V^T u` in the chart;
//! * the transition `T[σ][τ] = V_σ^T M_τ^T` rewrites τ-exponents into
//!   σ-exponents: a τ-monomial with exponent `a` is the σ-monomial with
//!   exponent `T a`, and `dlog y_j = Σ_i T_{ij} dlog x_i`.

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::intmat::IntMat;
use crate::algebra::laurent::Laurent;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("ambient rank must be positive")]
    ZeroRank,
    #[error("fan lists no rays")]
    NoRays,
    #[error("fan lists no maximal cones")]
    NoCones,
    #[error("ray {index} has {got} entries, expected {expected}")]
    BadRayDimension { index: usize, got: usize, expected: usize },
    #[error("ray {index} is not primitive: {ray:?}")]
    NonPrimitiveRay { index: usize, ray: Vec<i64> },
    #[error("rays {first} and {second} coincide")]
    DuplicateRay { first: usize, second: usize },
    #[error("ray {index} does not appear in any maximal cone")]
    UnusedRay { index: usize },
    #[error("cone {index} lists {got} rays, expected {expected}")]
    BadConeSize { index: usize, got: usize, expected: usize },
    #[error("cone {index} references unknown ray {ray}")]
    UnknownRay { index: usize, ray: usize },
    #[error("cone {index} repeats ray {ray}")]
    RepeatedRayInCone { index: usize, ray: usize },
    #[error("cones {first} and {second} have the same rays")]
    DuplicateCone { first: usize, second: usize },
    #[error("cone {index} is not smooth: ray determinant {det}")]
    NonSmoothCone { index: usize, det: i64 },
    #[error("fan is not complete: {reason}")]
    IncompleteFan { reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Fan {
    rank: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
}

/// Facts about a validated fan, suitable for inclusion in reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FanSummary {
    pub rank: usize,
    pub rays: usize,
    pub max_cones: usize,
    pub smooth: bool,
    pub complete: bool,
    /// Boundary divisors are coordinate hyperplanes in every chart, so
    /// they always cross normally once smoothness holds.
    pub simple_normal_crossings: bool,
}

impl Fan {
    /// Wraps raw data without validation; call [`Fan::validate`] or build
    /// an [`Atlas`] to check it.
    pub fn from_parts(rank: usize, rays: Vec<Vec<i64>>, max_cones: Vec<Vec<usize>>) -> Self {
        Fan { rank, rays, max_cones }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, i: usize) -> &[i64] {
        &self.rays[i]
    }

    pub fn max_cones(&self) -> &[Vec<usize>] {
        &self.max_cones
    }

    pub fn summary(&self) -> FanSummary {
        FanSummary {
            rank: self.rank,
            rays: self.rays.len(),
            max_cones: self.max_cones.len(),
            smooth: true,
            complete: true,
            simple_normal_crossings: true,
        }
    }

    /// Collects every defect; empty means the fan is smooth and complete.
    pub fn validate(&self) -> Vec<FanError> {
        let mut errs = Vec::new();
        if self.rank == 0 {
            errs.push(FanError::ZeroRank);
            return errs;
        }
        if self.rays.is_empty() {
            errs.push(FanError::NoRays);
        }
        if self.max_cones.is_empty() {
            errs.push(FanError::NoCones);
        }
        for (i, ray) in self.rays.iter().enumerate() {
            if ray.len() != self.rank {
                errs.push(FanError::BadRayDimension {
                    index: i,
                    got: ray.len(),
                    expected: self.rank,
                });
                continue;
            }
            let g = ray.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            if g != 1 {
                errs.push(FanError::NonPrimitiveRay { index: i, ray: ray.clone() });
            }
            for (j, other) in self.rays.iter().enumerate().take(i) {
                if other == ray {
                    errs.push(FanError::DuplicateRay { first: j, second: i });
                }
            }
        }
        if !errs.is_empty() {
            // dimension or primitivity problems poison everything below
            return errs;
        }

        let mut used = vec![false; self.rays.len()];
        let mut sorted_cones: Vec<Vec<usize>> = Vec::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            if cone.len() != self.rank {
                errs.push(FanError::BadConeSize {
                    index: c,
                    got: cone.len(),
                    expected: self.rank,
                });
                continue;
            }
            let mut ok = true;
            for &r in cone {
                if r >= self.rays.len() {
                    errs.push(FanError::UnknownRay { index: c, ray: r });
                    ok = false;
                } else {
                    used[r] = true;
                }
            }
            if !ok {
                continue;
            }
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            if sorted.windows(2).any(|w| w[0] == w[1]) {
                let ray = sorted.windows(2).find(|w| w[0] == w[1]).unwrap()[0];
                errs.push(FanError::RepeatedRayInCone { index: c, ray });
                continue;
            }
            if let Some(prev) = sorted_cones.iter().position(|s| *s == sorted) {
                errs.push(FanError::DuplicateCone { first: prev, second: c });
            }
            sorted_cones.push(sorted);
            let v = self.ray_matrix(cone);
            let det = v.det();
            if det.abs() != 1 {
                errs.push(FanError::NonSmoothCone { index: c, det });
            }
        }
        for (i, u) in used.iter().enumerate() {
            if !u {
                errs.push(FanError::UnusedRay { index: i });
            }
        }
        if !errs.is_empty() {
            return errs;
        }

        if let Err(e) = self.check_complete() {
            errs.push(e);
        }
        errs
    }

    /// Columns of the returned matrix are the rays of `cone`, in order.
    fn ray_matrix(&self, cone: &[usize]) -> IntMat {
        let mut v = IntMat::zero(self.rank, self.rank);
        for (j, &r) in cone.iter().enumerate() {
            for i in 0..self.rank {
                v[(i, j)] = self.rays[r][i];
            }
        }
        v
    }

    /// Completeness: every wall (codimension-one face) must separate
    /// exactly two maximal cones, the wall-adjacency graph must be
    /// connected, and a deterministic sample of lattice points must be
    /// covered (points covered only once must be interior, otherwise a
    /// neighbouring cone is missing).
    fn check_complete(&self) -> Result<(), FanError> {
        use std::collections::BTreeMap;
        let n = self.rank;
        let mut walls: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for (c, cone) in self.max_cones.iter().enumerate() {
            let mut sorted = cone.clone();
            sorted.sort_unstable();
            for skip in 0..n {
                let facet: Vec<usize> = sorted
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &r)| r)
                    .collect();
                walls.entry(facet).or_default().push(c);
            }
        }
        for (facet, cones) in &walls {
            if cones.len() != 2 {
                return Err(FanError::IncompleteFan {
                    reason: format!(
                        "wall spanned by rays {:?} lies in {} maximal cone(s), expected 2",
                        facet,
                        cones.len()
                    ),
                });
            }
        }
        // connectivity across walls
        let mut seen = vec![false; self.max_cones.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(c) = stack.pop() {
            for cones in walls.values() {
                if cones.contains(&c) {
                    for &d in cones {
                        if !seen[d] {
                            seen[d] = true;
                            stack.push(d);
                        }
                    }
                }
            }
        }
        if let Some(c) = seen.iter().position(|s| !s) {
            return Err(FanError::IncompleteFan {
                reason: format!("maximal cone {c} is disconnected from cone 0 across walls"),
            });
        }
        // covering backstop on deterministic samples
        let duals: Vec<IntMat> = self
            .max_cones
            .iter()
            .map(|cone| {
                self.ray_matrix(cone)
                    .inverse_unimodular()
                    .expect("smoothness checked before completeness")
            })
            .collect();
        for p in self.sample_points() {
            let mut containing = Vec::new();
            let mut interior = false;
            for (c, m) in duals.iter().enumerate() {
                let coords = m.matvec(&p);
                if coords.iter().all(|&x| x >= 0) {
                    containing.push(c);
                    if coords.iter().all(|&x| x > 0) {
                        interior = true;
                    }
                }
            }
            if containing.is_empty() {
                return Err(FanError::IncompleteFan {
                    reason: format!("lattice point {p:?} is not covered by any maximal cone"),
                });
            }
            if containing.len() == 1 && !interior {
                return Err(FanError::IncompleteFan {
                    reason: format!(
                        "lattice point {p:?} sits on the boundary of cone {} with no neighbour",
                        containing[0]
                    ),
                });
            }
        }
        Ok(())
    }

    fn sample_points(&self) -> Vec<Vec<i64>> {
        let n = self.rank;
        let mut pts: Vec<Vec<i64>> = self.rays.clone();
        if n <= 3 {
            let mut grid = vec![vec![0i64; n]];
            for i in 0..n {
                let mut next = Vec::new();
                for p in grid {
                    for v in -2..=2 {
                        let mut q = p.clone();
                        q[i] = v;
                        next.push(q);
                    }
                }
                grid = next;
            }
            pts.extend(grid);
        }
        // fixed-seed linear congruential extras, entries in [-9, 9]
        let mut state = 0x5EEDu64;
        for _ in 0..64 {
            let mut p = Vec::with_capacity(n);
            for _ in 0..n {
                state = state
                    .wrapping_mul(6364136223846793005)
                    .wrapping_add(1442695040888963407);
                p.push(((state >> 33) % 19) as i64 - 9);
            }
            pts.push(p);
        }
        pts.retain(|p| p.iter().any(|&x| x != 0));
        pts
    }
}

/// One affine chart of the variety: the data attached to a maximal cone.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Chart {
    pub cone_index: usize,
    /// ray indices, in the order fixed by the fan's cone listing
    pub rays: Vec<usize>,
    /// columns are the rays
    pub ray_matrix: IntMat,
    /// inverse of `ray_matrix`; row `i` is the weight of coordinate `x_i`
    pub dual_matrix: IntMat,
}

impl Chart {
    /// Exponent vector of the character with weight `u` in this chart:
    /// `V^T u`, i.e. component `i` is the pairing of `u` with ray `i`.
    pub fn weight_exponents(&self, u: &[i64]) -> Vec<i64> {
        self.ray_matrix.transpose().matvec(u)
    }

    /// The character with weight `u` as a chart monomial.
    pub fn character(&self, u: &[i64]) -> Laurent {
        Laurent::monomial(self.weight_exponents(u), crate::algebra::rational::rint(1))
    }

    pub fn dim(&self) -> usize {
        self.rays.len()
    }
}

/// A validated fan with all charts and pairwise transitions precomputed.
#[derive(Debug, Clone)]
pub struct Atlas {
    fan: Fan,
    charts: Vec<Chart>,
    /// `transitions[s][t]` rewrites chart-`t` exponents into chart `s`
    transitions: Vec<Vec<IntMat>>,
}

/// Chart transition from `from`-coordinates to `to`-coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TransitionMap {
    pub to: usize,
    pub from: usize,
    /// exponent rewrite matrix: a `from`-monomial `y^a` equals the
    /// `to`-monomial `x^{T a}`
    pub matrix: IntMat,
}

impl Atlas {
    /// Validates the fan and builds every chart; the first defect aborts.
    pub fn new(fan: Fan) -> Result<Atlas, FanError> {
        let errs = fan.validate();
        if let Some(e) = errs.into_iter().next() {
            return Err(e);
        }
        let charts: Vec<Chart> = fan
            .max_cones()
            .iter()
            .enumerate()
            .map(|(c, cone)| {
                let v = fan.ray_matrix(cone);
                let m = v.inverse_unimodular().expect("validated smooth cone");
                Chart { cone_index: c, rays: cone.clone(), ray_matrix: v, dual_matrix: m }
            })
            .collect();
        let transitions = charts
            .iter()
            .map(|cs| {
                charts
                    .iter()
                    .map(|ct| cs.ray_matrix.transpose().mul(&ct.dual_matrix.transpose()))
                    .collect()
            })
            .collect();
        Ok(Atlas { fan, charts, transitions })
    }

    pub fn fan(&self) -> &Fan {
        &self.fan
    }

    pub fn rank(&self) -> usize {
        self.fan.rank()
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, s: usize) -> &Chart {
        &self.charts[s]
    }

    pub fn len(&self) -> usize {
        self.charts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.charts.is_empty()
    }

    /// Exponent rewrite matrix from chart `from` into chart `to`.
    pub fn transition(&self, to: usize, from: usize) -> &IntMat {
        &self.transitions[to][from]
    }

    pub fn transition_map(&self, to: usize, from: usize) -> TransitionMap {
        TransitionMap { to, from, matrix: self.transitions[to][from].clone() }
    }

    /// All charts containing the divisor of `ray`, with the local
    /// coordinate index cutting it out.
    pub fn ray_charts(&self, ray: usize) -> Vec<(usize, usize)> {
        self.charts
            .iter()
            .enumerate()
            .filter_map(|(c, ch)| ch.rays.iter().position(|&r| r == ray).map(|i| (c, i)))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> Fan {
        Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        )
    }

    fn p1() -> Fan {
        Fan::from_parts(1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]])
    }

    #[test]
    fn plane_fan_validates() {
        assert!(p2().validate().is_empty());
        assert!(p1().validate().is_empty());
    }

    #[test]
    fn plane_duals_are_frozen() {
        let atlas = Atlas::new(p2()).unwrap();
        assert_eq!(atlas.chart(0).dual_matrix, IntMat::identity(2));
        // cone {1,2}: rays (0,1), (-1,-1)
        assert_eq!(
            atlas.chart(1).dual_matrix,
            IntMat::from_rows(&[vec![-1, 1], vec![-1, 0]])
        );
        // transition from chart 1 into chart 0
        assert_eq!(
            atlas.transition(0, 1),
            &IntMat::from_rows(&[vec![-1, -1], vec![1, 0]])
        );
    }

    #[test]
    fn transitions_compose() {
        let atlas = Atlas::new(p2()).unwrap();
        let k = atlas.len();
        for s in 0..k {
            assert_eq!(atlas.transition(s, s), &IntMat::identity(2));
            for t in 0..k {
                for u in 0..k {
                    let lhs = atlas.transition(s, t).mul(atlas.transition(t, u));
                    assert_eq!(&lhs, atlas.transition(s, u));
                }
                let round = atlas.transition(s, t).mul(atlas.transition(t, s));
                assert_eq!(round, IntMat::identity(2));
            }
        }
    }

    #[test]
    fn characters_restrict_compatibly() {
        // chi^u in chart s equals the rewrite of chi^u in chart t
        let atlas = Atlas::new(p2()).unwrap();
        let u = vec![3, -2];
        for s in 0..atlas.len() {
            for t in 0..atlas.len() {
                let direct = atlas.chart(s).weight_exponents(&u);
                let via_t = atlas
                    .transition(s, t)
                    .matvec(&atlas.chart(t).weight_exponents(&u));
                assert_eq!(direct, via_t);
            }
        }
    }

    #[test]
    fn ray_chart_lookup() {
        let atlas = Atlas::new(p2()).unwrap();
        assert_eq!(atlas.ray_charts(0), vec![(0, 0), (2, 1)]);
        assert_eq!(atlas.ray_charts(2), vec![(1, 1), (2, 0)]);
    }

    #[test]
    fn rejects_nonprimitive_ray() {
        let fan = Fan::from_parts(2, vec![vec![1, 0], vec![0, 2]], vec![vec![0, 1]]);
        let errs = fan.validate();
        assert!(errs
            .iter()
            .any(|e| matches!(e, FanError::NonPrimitiveRay { index: 1, .. })));
    }

    #[test]
    fn rejects_nonsmooth_cone() {
        // rays (1,0) and (1,2) span index-two sublattice
        let fan = Fan::from_parts(
            2,
            vec![vec![1, 0], vec![1, 2], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![3, 0]],
        );
        let errs = fan.validate();
        assert!(errs
            .iter()
            .any(|e| matches!(e, FanError::NonSmoothCone { index: 0, det: 2 })));
    }

    #[test]
    fn rejects_incomplete_fan() {
        let fan = Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2]],
        );
        let errs = fan.validate();
        assert_eq!(errs.len(), 1);
        assert!(matches!(errs[0], FanError::IncompleteFan { .. }));
    }

    #[test]
    fn rejects_half_line() {
        let fan = Fan::from_parts(1, vec![vec![1]], vec![vec![0]]);
        let errs = fan.validate();
        assert!(errs.iter().any(|e| matches!(e, FanError::IncompleteFan { .. })));
    }

    #[test]
    fn rejects_unused_ray() {
        let fan = Fan::from_parts(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1], vec![1, 1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
        );
        let errs = fan.validate();
        assert!(errs.iter().any(|e| matches!(e, FanError::UnusedRay { index: 3 })));
    }

    #[test]
    fn three_space_fan_validates() {
        let fan = Fan::from_parts(
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, -1, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        );
        assert!(fan.validate().is_empty());
    }
}
