//! Equivariant bundles from ray filtrations.
//!
//! The input is one decreasing filtration of a fixed rank-`r` rational
//! vector space per ray: `E^ρ(i) ⊇ E^ρ(i+1)`, equal to the whole space
//! for small `i` and zero for large `i`.  A filtration is stored by its
//! jumps; the vectors listed at a jump are new generators, so
//! `E^ρ(i)` is spanned by everything listed at jumps `≥ i`.
//!
//! Compatibility over a maximal cone σ with rays `v_1 .. v_n` means the
//! space splits as a direct sum of pieces `E_u` indexed by weights `u`
//! with `E^{ρ_j}(i) = Σ { E_u : ⟨u, v_j⟩ ≥ i }` for every ray of σ.  The
//! solver recovers the pieces greedily: a candidate jump tuple `c` gives
//! the weight `u = M^T c` and the space `S_c = ∩_j E^{ρ_j}(c_j)`; walking
//! candidates by decreasing total jump, the piece at `c` is a complement
//! of the span of the pieces already found at tuples `≥ c` inside `S_c`.
//! For compatible data this reproduces the unique decomposition; the
//! reconstruction check afterwards rejects everything else.
//!
//! Each chart then gets a frame of eigenvectors (the pieces' echelon
//! bases, ordered lexicographically by vector, largest first) and the
//! transitions between charts are monomial matrices twisted by the
//! weight characters.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::intmat::{smith_normal_form, IntMat};
use crate::algebra::laurent::Laurent;
use crate::algebra::linalg::{QMat, Subspace};
use crate::algebra::matrix::LaurentMat;
use crate::algebra::rational::{format_rat, rint, Rat};
use crate::fan::{Atlas, Fan};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KlyachkoError {
    #[error("expected {expected} ray filtrations, got {got}")]
    FiltrationCount { expected: usize, got: usize },
    #[error("ray {ray}: vector has {got} entries, expected {expected}")]
    WrongVectorLength { ray: usize, expected: usize, got: usize },
    #[error("ray {ray}: jump {jump} lists no vectors")]
    EmptyStep { ray: usize, jump: i64 },
    #[error("ray {ray}: jump {jump} appears more than once")]
    RepeatedJump { ray: usize, jump: i64 },
    #[error("ray {ray}: vectors at jump {jump} are dependent on higher jumps")]
    DependentStep { ray: usize, jump: i64 },
    #[error("ray {ray}: filtration spans dimension {dim}, expected {rank}")]
    NotFull { ray: usize, dim: usize, rank: usize },
    #[error("filtrations are not compatible over chart {chart}: {detail}")]
    IncompatibleFiltrations { chart: usize, detail: String },
    #[error("transition check failed: {detail}")]
    CocycleMismatch { detail: String },
    #[error("bundle is not split into coordinate line subbundles: {detail}")]
    NotSplit { detail: String },
    #[error("pulled-back transitions are not a coboundary: {detail}")]
    NoCoboundary { detail: String },
    #[error("per-cone weights are inconsistent: {detail}")]
    CartierInconsistent { detail: String },
}

/// One jump of a filtration: the vectors newly present at value `jump`
/// (and at everything below it).
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationStep {
    pub jump: i64,
    pub vectors: Vec<Vec<Rat>>,
}

/// A decreasing filtration, stored by jumps in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct RayFiltration {
    steps: Vec<FiltrationStep>,
}

impl RayFiltration {
    pub fn new(mut steps: Vec<FiltrationStep>) -> Self {
        steps.sort_by_key(|s| s.jump);
        RayFiltration { steps }
    }

    pub fn steps(&self) -> &[FiltrationStep] {
        &self.steps
    }

    pub fn jumps(&self) -> Vec<i64> {
        self.steps.iter().map(|s| s.jump).collect()
    }

    pub fn max_jump(&self) -> i64 {
        self.steps.last().map_or(0, |s| s.jump)
    }

    /// `E(i)`: the span of every vector listed at a jump `≥ i`.
    pub fn space_at(&self, i: i64, rank: usize) -> Subspace {
        let vectors: Vec<Vec<Rat>> = self
            .steps
            .iter()
            .filter(|s| s.jump >= i)
            .flat_map(|s| s.vectors.iter().cloned())
            .collect();
        Subspace::from_vectors(rank, &vectors)
    }

    fn validate(&self, ray: usize, rank: usize) -> Result<(), KlyachkoError> {
        for pair in self.steps.windows(2) {
            if pair[0].jump == pair[1].jump {
                return Err(KlyachkoError::RepeatedJump { ray, jump: pair[0].jump });
            }
        }
        let mut above = Subspace::zero(rank);
        for step in self.steps.iter().rev() {
            if step.vectors.is_empty() {
                return Err(KlyachkoError::EmptyStep { ray, jump: step.jump });
            }
            for v in &step.vectors {
                if v.len() != rank {
                    return Err(KlyachkoError::WrongVectorLength {
                        ray,
                        expected: rank,
                        got: v.len(),
                    });
                }
            }
            let with_step = above.sum(&Subspace::from_vectors(rank, &step.vectors));
            if with_step.dim() != above.dim() + step.vectors.len() {
                return Err(KlyachkoError::DependentStep { ray, jump: step.jump });
            }
            above = with_step;
        }
        if above.dim() != rank {
            return Err(KlyachkoError::NotFull { ray, dim: above.dim(), rank });
        }
        Ok(())
    }

    /// Jump values with multiplicity (the dimension lost when passing
    /// each jump), smallest first; always `rank` entries for valid data.
    pub fn jump_multiset(&self) -> Vec<i64> {
        let mut out = Vec::new();
        for step in &self.steps {
            out.extend(std::iter::repeat_n(step.jump, step.vectors.len()));
        }
        out
    }
}

/// Full input: the common rank and one filtration per fan ray.
#[derive(Debug, Clone, PartialEq)]
pub struct KlyachkoData {
    pub rank: usize,
    pub filtrations: Vec<RayFiltration>,
}

impl KlyachkoData {
    pub fn validate(&self, fan: &Fan) -> Result<(), KlyachkoError> {
        if self.filtrations.len() != fan.rays().len() {
            return Err(KlyachkoError::FiltrationCount {
                expected: fan.rays().len(),
                got: self.filtrations.len(),
            });
        }
        for (ray, f) in self.filtrations.iter().enumerate() {
            f.validate(ray, self.rank)?;
        }
        Ok(())
    }

    /// Sum of all jumps (with multiplicity) over the given ray.
    pub fn jump_sum(&self, ray: usize) -> i64 {
        self.filtrations[ray].jump_multiset().iter().sum()
    }
}

/// A weight piece of the decomposition over one chart.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightPiece {
    /// weight in the ambient character lattice
    pub weight: Vec<i64>,
    /// pairings of the weight with the chart's rays, in chart order
    pub jumps: Vec<i64>,
    /// echelon basis of the piece
    pub vectors: Vec<Vec<Rat>>,
}

/// The chart-local eigenframe: pieces plus a flattened ordered frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeDecomposition {
    pub chart: usize,
    pub pieces: Vec<WeightPiece>,
    /// frame vectors, lexicographically largest first
    pub frame: Vec<Vec<Rat>>,
    /// weight of each frame vector, aligned with `frame`
    pub weights: Vec<Vec<i64>>,
}

impl ConeDecomposition {
    /// Columns are the frame vectors.
    pub fn frame_matrix(&self) -> QMat {
        let r = self.frame.len();
        let mut m = QMat::zero(r, r);
        for (j, v) in self.frame.iter().enumerate() {
            for i in 0..r {
                m[(i, j)] = v[i].clone();
            }
        }
        m
    }
}

fn cartesian(sets: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for &v in set {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Solves for the weight decomposition of one chart and verifies that it
/// reproduces every input filtration restricted to the chart's rays.
pub fn solve_decomposition(
    atlas: &Atlas,
    chart: usize,
    data: &KlyachkoData,
) -> Result<ConeDecomposition, KlyachkoError> {
    let ch = atlas.chart(chart);
    let rank = data.rank;
    let jump_sets: Vec<Vec<i64>> =
        ch.rays.iter().map(|&r| data.filtrations[r].jumps()).collect();
    let mut candidates = cartesian(&jump_sets);
    candidates.sort_by_key(|c| std::cmp::Reverse(c.iter().sum::<i64>()));

    let mut accepted: Vec<(Vec<i64>, Vec<Vec<Rat>>)> = Vec::new();
    for c in candidates {
        let mut s = Subspace::full(rank);
        for (j, &ray) in ch.rays.iter().enumerate() {
            s = s.intersect(&data.filtrations[ray].space_at(c[j], rank));
        }
        let higher: Vec<Vec<Rat>> = accepted
            .iter()
            .filter(|(c2, _)| c2.iter().zip(&c).all(|(a, b)| a >= b))
            .flat_map(|(_, vs)| vs.iter().cloned())
            .collect();
        let pieces = s.pivot_complement(&Subspace::from_vectors(rank, &higher));
        if !pieces.is_empty() {
            accepted.push((c, pieces));
        }
    }

    let total: usize = accepted.iter().map(|(_, vs)| vs.len()).sum();
    if total != rank {
        return Err(KlyachkoError::IncompatibleFiltrations {
            chart,
            detail: format!("weight pieces span dimension {total}, expected {rank}"),
        });
    }
    let all: Vec<Vec<Rat>> =
        accepted.iter().flat_map(|(_, vs)| vs.iter().cloned()).collect();
    if Subspace::from_vectors(rank, &all).dim() != rank {
        return Err(KlyachkoError::IncompatibleFiltrations {
            chart,
            detail: "weight pieces are not independent".to_string(),
        });
    }
    // the decomposition must rebuild each filtration exactly
    for (j, &ray) in ch.rays.iter().enumerate() {
        for i in data.filtrations[ray].jumps() {
            let from_pieces: Vec<Vec<Rat>> = accepted
                .iter()
                .filter(|(c, _)| c[j] >= i)
                .flat_map(|(_, vs)| vs.iter().cloned())
                .collect();
            let rebuilt = Subspace::from_vectors(rank, &from_pieces);
            let expected = data.filtrations[ray].space_at(i, rank);
            if rebuilt != expected {
                return Err(KlyachkoError::IncompatibleFiltrations {
                    chart,
                    detail: format!(
                        "ray {ray} at value {i}: pieces span dimension {}, filtration has {}",
                        rebuilt.dim(),
                        expected.dim()
                    ),
                });
            }
        }
    }

    let dual_t = ch.dual_matrix.transpose();
    let mut pieces: Vec<WeightPiece> = accepted
        .into_iter()
        .map(|(c, vectors)| WeightPiece { weight: dual_t.matvec(&c), jumps: c, vectors })
        .collect();
    pieces.sort_by(|a, b| a.weight.cmp(&b.weight));

    let mut flat: Vec<(Vec<Rat>, Vec<i64>)> = pieces
        .iter()
        .flat_map(|p| p.vectors.iter().map(|v| (v.clone(), p.weight.clone())))
        .collect();
    flat.sort_by(|a, b| b.0.cmp(&a.0));
    let (frame, weights) = flat.into_iter().unzip();
    Ok(ConeDecomposition { chart, pieces, frame, weights })
}

/// The transition matrix from the `from`-chart frame to the `to`-chart
/// frame, written in `to`-chart coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle {
    pub to: usize,
    pub from: usize,
    pub matrix: LaurentMat,
}

/// Entry `(a, b)` is `C_{ab} χ^{u_a - u_b}` where `C` compares the two
/// frames and `u_a`, `u_b` are the weights of the frame vectors.
pub fn build_cocycle(
    atlas: &Atlas,
    to_dec: &ConeDecomposition,
    from_dec: &ConeDecomposition,
) -> Result<Cocycle, KlyachkoError> {
    let r = to_dec.frame.len();
    let n = atlas.rank();
    let w_to = to_dec.frame_matrix();
    let c = w_to
        .inverse()
        .ok_or_else(|| KlyachkoError::IncompatibleFiltrations {
            chart: to_dec.chart,
            detail: "frame is not a basis".to_string(),
        })?
        .mul(&from_dec.frame_matrix());
    let chart = atlas.chart(to_dec.chart);
    let mut m = LaurentMat::zero(r, r, n);
    for a in 0..r {
        for b in 0..r {
            if c[(a, b)] == rint(0) {
                continue;
            }
            let du: Vec<i64> = to_dec.weights[a]
                .iter()
                .zip(&from_dec.weights[b])
                .map(|(x, y)| x - y)
                .collect();
            m.set(a, b, Laurent::monomial(chart.weight_exponents(&du), c[(a, b)].clone()));
        }
    }
    Ok(Cocycle { to: to_dec.chart, from: from_dec.chart, matrix: m })
}

/// Decompositions for every chart plus the full transition family.
#[derive(Debug, Clone)]
pub struct EquivariantBundle {
    pub rank: usize,
    pub data: KlyachkoData,
    pub decompositions: Vec<ConeDecomposition>,
    /// `cocycles[to][from]`, identity on the diagonal
    pub cocycles: Vec<Vec<LaurentMat>>,
}

pub fn build_bundle(atlas: &Atlas, data: &KlyachkoData) -> Result<EquivariantBundle, KlyachkoError> {
    data.validate(atlas.fan())?;
    let decompositions: Vec<ConeDecomposition> = (0..atlas.len())
        .map(|c| solve_decomposition(atlas, c, data))
        .collect::<Result<_, _>>()?;
    let cocycles = (0..atlas.len())
        .map(|s| {
            (0..atlas.len())
                .map(|t| {
                    if s == t {
                        Ok(LaurentMat::identity(data.rank, atlas.rank()))
                    } else {
                        build_cocycle(atlas, &decompositions[s], &decompositions[t])
                            .map(|c| c.matrix)
                    }
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EquivariantBundle {
        rank: data.rank,
        data: data.clone(),
        decompositions,
        cocycles,
    })
}

/// What the transition checks covered.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct CocycleCheck {
    pub pairs: usize,
    pub triples: usize,
}

/// Verifies the full cocycle condition: units on divisor complements,
/// inverse pairs, and all composition triples, each by exact identity.
pub fn check_cocycle_identities(
    atlas: &Atlas,
    bundle: &EquivariantBundle,
) -> Result<CocycleCheck, KlyachkoError> {
    let k = atlas.len();
    let r = bundle.rank;
    let id = LaurentMat::identity(r, atlas.rank());
    let mut pairs = 0;
    let mut triples = 0;
    for s in 0..k {
        if bundle.cocycles[s][s] != id {
            return Err(KlyachkoError::CocycleMismatch {
                detail: format!("chart {s}: self-transition is not the identity"),
            });
        }
        for t in 0..k {
            if s == t {
                continue;
            }
            let g_st = &bundle.cocycles[s][t];
            let det = g_st.det();
            if det.as_unit_monomial().is_none() {
                return Err(KlyachkoError::CocycleMismatch {
                    detail: format!("transition {s}<-{t} has non-unit determinant {det}"),
                });
            }
            // g_ts lives in t-coordinates; rewrite before composing
            let g_ts = bundle.cocycles[t][s].map_exponents(atlas.transition(s, t));
            if g_st.mul(&g_ts) != id {
                let diff = g_st
                    .mul(&g_ts)
                    .first_difference(&id)
                    .map(|(a, b, e, x, y)| {
                        format!(
                            "entry ({a},{b}) exponent {e:?}: {} vs {}",
                            format_rat(&x),
                            format_rat(&y)
                        )
                    })
                    .unwrap_or_default();
                return Err(KlyachkoError::CocycleMismatch {
                    detail: format!("transitions {s}<->{t} are not inverse: {diff}"),
                });
            }
            pairs += 1;
            for u in 0..k {
                if u == s || u == t {
                    continue;
                }
                let g_tu = bundle.cocycles[t][u].map_exponents(atlas.transition(s, t));
                let composed = g_st.mul(&g_tu);
                if composed != bundle.cocycles[s][u] {
                    let diff = composed
                        .first_difference(&bundle.cocycles[s][u])
                        .map(|(a, b, e, x, y)| {
                            format!(
                                "entry ({a},{b}) exponent {e:?}: {} vs {}",
                                format_rat(&x),
                                format_rat(&y)
                            )
                        })
                        .unwrap_or_default();
                    return Err(KlyachkoError::CocycleMismatch {
                        detail: format!("triple ({s},{t},{u}) fails: {diff}"),
                    });
                }
                triples += 1;
            }
        }
    }
    Ok(CocycleCheck { pairs, triples })
}

/// Expands per-cone weight vectors (one weight per maximal cone, the
/// classical local data of an invertible sheaf) into rank-one filtration
/// data, checking that cones sharing a ray agree on its jump.
pub fn cartier_to_filtrations(fan: &Fan, weights: &[Vec<i64>]) -> Result<KlyachkoData, KlyachkoError> {
    if weights.len() != fan.max_cones().len() {
        return Err(KlyachkoError::CartierInconsistent {
            detail: format!(
                "{} weights for {} maximal cones",
                weights.len(),
                fan.max_cones().len()
            ),
        });
    }
    let mut jumps: BTreeMap<usize, (i64, usize)> = BTreeMap::new();
    for (c, (cone, u)) in fan.max_cones().iter().zip(weights).enumerate() {
        if u.len() != fan.rank() {
            return Err(KlyachkoError::CartierInconsistent {
                detail: format!("cone {c}: weight has {} entries, expected {}", u.len(), fan.rank()),
            });
        }
        for &ray in cone {
            let jump: i64 = u.iter().zip(fan.ray(ray)).map(|(a, b)| a * b).sum();
            match jumps.get(&ray) {
                None => {
                    jumps.insert(ray, (jump, c));
                }
                Some(&(prev, pc)) if prev != jump => {
                    return Err(KlyachkoError::CartierInconsistent {
                        detail: format!(
                            "ray {ray}: cone {pc} gives jump {prev}, cone {c} gives {jump}"
                        ),
                    });
                }
                _ => {}
            }
        }
    }
    let filtrations = (0..fan.rays().len())
        .map(|ray| {
            let (jump, _) = jumps[&ray];
            RayFiltration::new(vec![FiltrationStep { jump, vectors: vec![vec![rint(1)]] }])
        })
        .collect();
    Ok(KlyachkoData { rank: 1, filtrations })
}

/// Result of the pullback-splitting check: one character exponent per
/// chart and line subbundle, normalized so chart 0 gets zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PullbackSplit {
    pub slots: usize,
    /// `exponents[slot][chart]` is the torus character trivializing the
    /// pulled-back slot over that chart
    pub exponents: Vec<Vec<Vec<i64>>>,
}

/// Checks that pulling a split bundle back along the torus action only
/// rescales each line subbundle by a character: substituting
/// `x_i -> x_i t^{m_i}` into every transition must equal the original
/// transition times a coboundary of pure torus monomials.  The
/// coboundary is found by solving the chart-pair incidence system in
/// Smith normal form and then confirmed by direct multiplication in the
/// doubled Laurent ring.
pub fn check_pullback_invariance(
    atlas: &Atlas,
    cocycles: &[Vec<LaurentMat>],
) -> Result<PullbackSplit, KlyachkoError> {
    let k = atlas.len();
    let n = atlas.rank();
    let r = cocycles.first().and_then(|row| row.first()).map_or(0, |m| m.rows);

    // collect the torus exponent of every diagonal slot of every pair
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for s in 0..k {
        for t in 0..k {
            if s != t {
                pairs.push((s, t));
            }
        }
    }
    let mut rho: Vec<Vec<Vec<i64>>> = vec![Vec::new(); r]; // [slot][pair] -> Z^n
    for &(s, t) in &pairs {
        let g = &cocycles[s][t];
        for a in 0..r {
            for b in 0..r {
                if a != b && !g.get(a, b).is_zero() {
                    return Err(KlyachkoError::NotSplit {
                        detail: format!("transition {s}<-{t} entry ({a},{b}) is nonzero"),
                    });
                }
            }
        }
        let m_s_t = atlas.chart(s).dual_matrix.transpose();
        for (d, rho_d) in rho.iter_mut().enumerate() {
            let Some((e, _)) = g.get(d, d).as_unit_monomial() else {
                return Err(KlyachkoError::NotSplit {
                    detail: format!("transition {s}<-{t} slot {d} is not a unit monomial"),
                });
            };
            rho_d.push(m_s_t.matvec(e));
        }
    }

    // incidence system: l_s - l_t = rho_{st} for each ordered pair
    let mut b = IntMat::zero(pairs.len(), k);
    for (row, &(s, t)) in pairs.iter().enumerate() {
        b[(row, s)] = 1;
        b[(row, t)] = -1;
    }
    let snf = smith_normal_form(&b);
    let diag = snf.diagonal();

    let mut exponents = vec![vec![vec![0i64; n]; k]; r];
    for d in 0..r {
        for coord in 0..n {
            let rhs: Vec<i64> = rho[d].iter().map(|v| v[coord]).collect();
            let w = snf.u.matvec(&rhs);
            let mut z = vec![0i64; k];
            for (i, &wi) in w.iter().enumerate() {
                if i < diag.len() && diag[i] != 0 {
                    if wi % diag[i] != 0 {
                        return Err(KlyachkoError::NoCoboundary {
                            detail: format!(
                                "slot {d}, coordinate {coord}: {wi} not divisible by {}",
                                diag[i]
                            ),
                        });
                    }
                    z[i] = wi / diag[i];
                } else if wi != 0 {
                    return Err(KlyachkoError::NoCoboundary {
                        detail: format!(
                            "slot {d}, coordinate {coord}: inconsistent transition family"
                        ),
                    });
                }
            }
            let y = snf.v.matvec(&z);
            for s in 0..k {
                exponents[d][s][coord] = y[s];
            }
        }
        // gauge: character of chart 0 is zero
        let base = exponents[d][0].clone();
        for l in exponents[d].iter_mut() {
            for (x, b0) in l.iter_mut().zip(&base) {
                *x -= b0;
            }
        }
    }

    // confirm by multiplication in the ring with torus variables added
    for &(s, t) in &pairs {
        let m_s = &atlas.chart(s).dual_matrix;
        let images: Vec<Laurent> = (0..2 * n)
            .map(|i| {
                let mut e = vec![0i64; 2 * n];
                e[i] = 1;
                if i < n {
                    for kk in 0..n {
                        e[n + kk] = m_s[(i, kk)];
                    }
                }
                Laurent::monomial(e, rint(1))
            })
            .collect();
        for (d, exp_d) in exponents.iter().enumerate() {
            let g = cocycles[s][t].get(d, d).extend_vars(n);
            let pulled = g.substitute(&images).expect("monomial images are units");
            let mut shift = vec![0i64; 2 * n];
            for coord in 0..n {
                shift[n + coord] = exp_d[s][coord] - exp_d[t][coord];
            }
            if pulled != g.mul_monomial(&shift) {
                return Err(KlyachkoError::NoCoboundary {
                    detail: format!("slot {d}, pair {s}<-{t}: verification product differs"),
                });
            }
        }
    }
    Ok(PullbackSplit { slots: r, exponents })
}
