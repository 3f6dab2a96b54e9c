//! The truncated symmetric-tensor algebra over the one-particle space and
//! its operadic structure.
//!
//! Basis vectors are multisets of one-particle indices (sorted tuples); the
//! multiset `{i_1, ..., i_p}` stands for the symmetrization of
//! `e_{i_1} ⊗ ... ⊗ e_{i_p}`, so inner products carry the multiplicity
//! weight `Π mult! / p!`. The product attached to a separated configuration
//! composes three stages: pairwise contraction exponentials (finite sums,
//! since each contraction removes a particle from two slots), the lifted
//! one-particle action per slot, and the final symmetrized merge, which on
//! multisets is concatenation.

use std::collections::BTreeMap;

use rand::Rng;

use crate::contraction::{contraction_general, ContractionMatrix};
use crate::mobius::{image_ball, is_ce_config, BallRegion, DiskConfig, MobiusMatrix, SpherePoint};
use crate::rkhs::{op_rho, HOperator, Truncation};
use crate::{Error, Result};

/// Sorted multiset of one-particle flat indices.
pub type Multiset = Vec<u16>;

/// Particle- and degree-truncated symmetric tensor space.
pub struct FockTruncation {
    pub trunc: std::sync::Arc<Truncation>,
    /// Maximum particle number.
    pub p_max: usize,
    /// Maximum total one-particle degree of a basis multiset.
    pub deg_max: u32,
}

impl FockTruncation {
    pub fn new(trunc: std::sync::Arc<Truncation>, p_max: usize, deg_max: u32) -> Self {
        FockTruncation { trunc, p_max, deg_max }
    }

    pub fn d(&self) -> usize {
        self.trunc.d()
    }

    fn degree_of_index(&self, i: u16) -> u32 {
        self.trunc.degree_of(i as usize)
    }

    /// Total degree of a multiset.
    pub fn total_degree(&self, m: &Multiset) -> u32 {
        m.iter().map(|&i| self.degree_of_index(i)).sum()
    }

    /// Does a multiset respect both cutoffs?
    pub fn admits(&self, m: &Multiset) -> bool {
        m.len() <= self.p_max && self.total_degree(m) <= self.deg_max
    }

    /// Deterministic basis enumeration: graded by particle count, then
    /// lexicographic on the sorted index tuples.
    pub fn enumerate_basis(&self) -> Vec<Multiset> {
        let mut out = vec![vec![]];
        let dim = self.trunc.dim() as u16;
        let mut layer: Vec<Multiset> = vec![vec![]];
        for _ in 0..self.p_max {
            let mut next = Vec::new();
            for m in &layer {
                let start = m.last().cloned().unwrap_or(0);
                for i in start..dim {
                    let mut ext = m.clone();
                    ext.push(i);
                    if self.total_degree(&ext) <= self.deg_max {
                        next.push(ext);
                    }
                }
            }
            out.extend(next.iter().cloned());
            layer = next;
        }
        out
    }
}

/// The inner-product weight `Π mult! / p!` of a multiset basis vector.
pub fn multiset_weight(m: &Multiset) -> f64 {
    let p = m.len() as u32;
    let mut ln = -crate::num::ln_factorial(p);
    let mut run = 1u32;
    for k in 1..m.len() {
        if m[k] == m[k - 1] {
            run += 1;
        } else {
            ln += crate::num::ln_factorial(run);
            run = 1;
        }
    }
    if !m.is_empty() {
        ln += crate::num::ln_factorial(run);
    }
    ln.exp()
}

/// Sparse vector over the multiset basis.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FockVector {
    pub coeffs: BTreeMap<Multiset, f64>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector { coeffs: BTreeMap::new() }
    }

    /// The vacuum `1`.
    pub fn vacuum() -> Self {
        let mut v = FockVector::zero();
        v.coeffs.insert(vec![], 1.0);
        v
    }

    /// A single particle in one-particle basis slot `i`.
    pub fn single(i: u16) -> Self {
        let mut v = FockVector::zero();
        v.coeffs.insert(vec![i], 1.0);
        v
    }

    /// Basis multiset with coefficient one.
    pub fn from_multiset(m: Multiset) -> Self {
        debug_assert!(m.windows(2).all(|w| w[0] <= w[1]));
        let mut v = FockVector::zero();
        v.coeffs.insert(m, 1.0);
        v
    }

    pub fn add_term(&mut self, m: Multiset, c: f64) {
        if c == 0.0 {
            return;
        }
        let e = self.coeffs.entry(m).or_insert(0.0);
        *e += c;
        if *e == 0.0 {
            // keep the map free of explicit zeros
            let key: Vec<u16> = Vec::new();
            let _ = key;
        }
    }

    /// Vacuum coefficient (degree-0 slot).
    pub fn vacuum_coefficient(&self) -> f64 {
        self.coeffs.get(&vec![]).cloned().unwrap_or(0.0)
    }

    /// Largest particle number with a nonzero coefficient.
    pub fn particles(&self) -> usize {
        self.coeffs.keys().map(|m| m.len()).max().unwrap_or(0)
    }

    pub fn inner(&self, other: &FockVector) -> f64 {
        let mut acc = 0.0;
        for (m, c) in &self.coeffs {
            if let Some(c2) = other.coeffs.get(m) {
                acc += c * c2 * multiset_weight(m);
            }
        }
        acc
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn scaled(&self, s: f64) -> FockVector {
        FockVector {
            coeffs: self.coeffs.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            *out.coeffs.entry(m.clone()).or_insert(0.0) -= c;
        }
        out.coeffs.retain(|_, c| *c != 0.0);
        out
    }

    /// Rescale each particle sector by `f(p)`.
    pub fn rescale_sectors(&self, f: impl Fn(usize) -> f64) -> FockVector {
        FockVector {
            coeffs: self
                .coeffs
                .iter()
                .map(|(m, c)| (m.clone(), c * f(m.len())))
                .collect(),
        }
    }
}

/// Orthogonal projection of a raw `p`-particle tensor (map from ordered index
/// tuples to coefficients) onto the symmetric subspace, in multiset
/// coordinates.
pub fn sym_project(ft: &FockTruncation, tensor: &BTreeMap<Vec<u16>, f64>) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for (tuple, c) in tensor {
        if tuple.len() > ft.p_max {
            return Err(Error::ParticleOverflow { got: tuple.len(), max: ft.p_max });
        }
        let mut m = tuple.clone();
        m.sort_unstable();
        out.add_term(m, *c);
    }
    out.coeffs.retain(|_, c| *c != 0.0);
    Ok(out)
}

/// Squared norm of a raw tensor (orthonormal tuple basis).
pub fn tensor_norm_sq(tensor: &BTreeMap<Vec<u16>, f64>) -> f64 {
    tensor.values().map(|c| c * c).sum()
}

/// Lift of a one-particle operator to the symmetric algebra: act on every
/// particle, pruning by the degree cutoff.
pub fn lift_monoid(op: &HOperator, ft: &FockTruncation, v: &FockVector) -> FockVector {
    let cols = column_major(op);
    let mut out = FockVector::zero();
    for (m, c) in &v.coeffs {
        expand_multiset(&cols, ft, m, *c, &mut out);
    }
    out.coeffs.retain(|_, c| c.abs() > 0.0);
    out
}

/// Column view: for each source index, targets as (degree-ordered) pairs.
fn column_major(op: &HOperator) -> Vec<Vec<(u16, f64)>> {
    let n = op.mat.ncols();
    (0..n)
        .map(|j| {
            (0..op.mat.nrows())
                .filter_map(|i| {
                    let v = op.mat[(i, j)];
                    (v != 0.0).then_some((i as u16, v))
                })
                .collect()
        })
        .collect()
}

fn expand_multiset(
    cols: &[Vec<(u16, f64)>],
    ft: &FockTruncation,
    m: &Multiset,
    coeff: f64,
    out: &mut FockVector,
) {
    let mut scratch: Vec<u16> = Vec::with_capacity(m.len());
    expand_rec(cols, ft, m, 0, ft.deg_max, coeff, &mut scratch, out);
}

fn expand_rec(
    cols: &[Vec<(u16, f64)>],
    ft: &FockTruncation,
    m: &Multiset,
    pos: usize,
    budget: u32,
    coeff: f64,
    scratch: &mut Vec<u16>,
    out: &mut FockVector,
) {
    if coeff == 0.0 {
        return;
    }
    if pos == m.len() {
        let mut key = scratch.clone();
        key.sort_unstable();
        *out.coeffs.entry(key).or_insert(0.0) += coeff;
        return;
    }
    for &(j, v) in &cols[m[pos] as usize] {
        let dj = ft.degree_of_index(j);
        if dj > budget {
            // columns are ordered by degree: nothing further fits
            break;
        }
        scratch.push(j);
        expand_rec(cols, ft, m, pos + 1, budget - dj, coeff * v, scratch, out);
        scratch.pop();
    }
}

/// Tensor state over `n` slots: map from slot multisets to coefficients.
pub type TensorState = BTreeMap<Vec<Multiset>, f64>;

/// One application of the pairwise contraction operator on slots `(i, j)`
/// (first argument of the form comes from slot `i`).
pub fn lift_contraction(
    c: &ContractionMatrix,
    slots: (usize, usize),
    state: &TensorState,
) -> TensorState {
    let (si, sj) = slots;
    let mut out = TensorState::new();
    for (tuple, coeff) in state {
        let mi = &tuple[si];
        let mj = &tuple[sj];
        if mi.is_empty() || mj.is_empty() {
            continue;
        }
        for (u, mu) in distinct_with_multiplicity(mi) {
            for (v, mv) in distinct_with_multiplicity(mj) {
                let cval = c.mat[(u as usize, v as usize)];
                if cval == 0.0 {
                    continue;
                }
                let mut nt = tuple.clone();
                nt[si] = remove_one(mi, u);
                nt[sj] = remove_one(mj, v);
                *out.entry(nt).or_insert(0.0) += coeff * mu as f64 * mv as f64 * cval;
            }
        }
    }
    out
}

fn distinct_with_multiplicity(m: &Multiset) -> Vec<(u16, usize)> {
    let mut out: Vec<(u16, usize)> = Vec::new();
    for &x in m {
        match out.last_mut() {
            Some((y, k)) if *y == x => *k += 1,
            _ => out.push((x, 1)),
        }
    }
    out
}

fn remove_one(m: &Multiset, x: u16) -> Multiset {
    let mut out = Vec::with_capacity(m.len() - 1);
    let mut removed = false;
    for &y in m {
        if !removed && y == x {
            removed = true;
        } else {
            out.push(y);
        }
    }
    out
}

/// `exp` of the contraction on a slot pair: a finite sum, since every
/// application removes one particle from each slot.
pub fn exp_contraction(
    c: &ContractionMatrix,
    slots: (usize, usize),
    state: &TensorState,
) -> TensorState {
    let mut total = state.clone();
    let mut term = state.clone();
    let mut k = 1.0;
    loop {
        let next = lift_contraction(c, slots, &term);
        if next.is_empty() {
            break;
        }
        term = next
            .into_iter()
            .map(|(m, v)| (m, v / k))
            .collect();
        for (m, v) in &term {
            *total.entry(m.clone()).or_insert(0.0) += v;
        }
        k += 1.0;
    }
    total
}

/// The operadic product machinery of a fixed separated configuration.
pub struct OperadicProduct {
    pub config: DiskConfig,
    /// Pair contraction matrices, indexed by `(i, j)` with `i > j`.
    pairs: BTreeMap<(usize, usize), ContractionMatrix>,
    /// One-particle action per slot.
    actions: Vec<HOperator>,
}

impl OperadicProduct {
    /// Precompute the contraction matrices and slot actions for a strict
    /// configuration.
    pub fn new(elements: &[MobiusMatrix], ft: &FockTruncation) -> Result<Self> {
        let config = is_ce_config(elements)?;
        if elements.len() >= 2 && !config.strict {
            return Err(Error::NonStrictConfig);
        }
        let mut pairs = BTreeMap::new();
        for i in 0..elements.len() {
            for j in 0..i {
                pairs.insert(
                    (i, j),
                    contraction_general(&elements[i], &elements[j], &ft.trunc)?,
                );
            }
        }
        let actions = elements
            .iter()
            .map(|g| op_rho(g, &ft.trunc))
            .collect::<Result<Vec<_>>>()?;
        Ok(OperadicProduct { config, pairs, actions })
    }

    pub fn arity(&self) -> usize {
        self.config.arity()
    }

    /// Total-particle budget check for a tuple of inputs.
    fn check_inputs(&self, ft: &FockTruncation, inputs: &[FockVector]) -> Result<()> {
        if inputs.len() != self.arity() {
            return Err(Error::ArityMismatch(self.arity(), inputs.len()));
        }
        let total: usize = inputs.iter().map(|v| v.particles()).sum();
        if total > ft.p_max {
            return Err(Error::ParticleOverflow { got: total, max: ft.p_max });
        }
        Ok(())
    }

    /// Contraction stage: tensor the inputs and apply every pairwise
    /// exponential.
    fn contracted_state(&self, inputs: &[FockVector]) -> TensorState {
        let mut state = TensorState::new();
        // outer product of the sparse inputs
        let mut stack: Vec<(Vec<Multiset>, f64)> = vec![(Vec::new(), 1.0)];
        for v in inputs {
            let mut next = Vec::new();
            for (prefix, c) in &stack {
                for (m, cv) in &v.coeffs {
                    let mut t = prefix.clone();
                    t.push(m.clone());
                    next.push((t, c * cv));
                }
            }
            stack = next;
        }
        for (t, c) in stack {
            *state.entry(t).or_insert(0.0) += c;
        }
        for ((i, j), c) in &self.pairs {
            state = exp_contraction(c, (*i, *j), &state);
        }
        state
    }

    /// Full product: contractions, per-slot action, symmetrized merge.
    pub fn apply(&self, ft: &FockTruncation, inputs: &[FockVector]) -> Result<FockVector> {
        self.check_inputs(ft, inputs)?;
        if self.arity() == 0 {
            return Ok(FockVector::vacuum());
        }
        let state = self.contracted_state(inputs);
        let cols: Vec<Vec<Vec<(u16, f64)>>> =
            self.actions.iter().map(column_major).collect();
        let mut out = FockVector::zero();
        for (tuple, coeff) in &state {
            merge_slots(&cols, ft, tuple, *coeff, &mut out);
        }
        out.coeffs.retain(|_, c| *c != 0.0);
        Ok(out)
    }

    /// Vacuum pairing `⟨1, product⟩`: only complete contractions survive, so
    /// the per-slot action stage can be skipped (it preserves particle count
    /// and fixes the vacuum).
    pub fn vacuum_expectation(&self, ft: &FockTruncation, inputs: &[FockVector]) -> Result<f64> {
        self.check_inputs(ft, inputs)?;
        if self.arity() == 0 {
            return Ok(1.0);
        }
        let state = self.contracted_state(inputs);
        let empty = vec![Vec::new(); self.arity()];
        Ok(state.get(&empty).cloned().unwrap_or(0.0))
    }
}

/// Expand every slot through its one-particle action under the global degree
/// budget and merge into one multiset.
fn merge_slots(
    cols: &[Vec<Vec<(u16, f64)>>],
    ft: &FockTruncation,
    tuple: &[Multiset],
    coeff: f64,
    out: &mut FockVector,
) {
    fn rec(
        cols: &[Vec<Vec<(u16, f64)>>],
        ft: &FockTruncation,
        tuple: &[Multiset],
        slot: usize,
        pos: usize,
        budget: u32,
        coeff: f64,
        scratch: &mut Vec<u16>,
        out: &mut FockVector,
    ) {
        if coeff == 0.0 {
            return;
        }
        if slot == tuple.len() {
            let mut key = scratch.clone();
            key.sort_unstable();
            *out.coeffs.entry(key).or_insert(0.0) += coeff;
            return;
        }
        let m = &tuple[slot];
        if pos == m.len() {
            rec(cols, ft, tuple, slot + 1, 0, budget, coeff, scratch, out);
            return;
        }
        for &(j, v) in &cols[slot][m[pos] as usize] {
            let dj = ft.degree_of_index(j);
            if dj > budget {
                break;
            }
            scratch.push(j);
            rec(cols, ft, tuple, slot, pos + 1, budget - dj, coeff * v, scratch, out);
            scratch.pop();
        }
    }
    let mut scratch = Vec::new();
    rec(cols, ft, tuple, 0, 0, ft.deg_max, coeff, &mut scratch, out);
}

/// Operadic product for a configuration given directly by its elements.
pub fn product_rho(
    elements: &[MobiusMatrix],
    ft: &FockTruncation,
    inputs: &[FockVector],
) -> Result<FockVector> {
    OperadicProduct::new(elements, ft)?.apply(ft, inputs)
}

/// Degree-0 coordinate of the product: the vacuum expectation value.
pub fn vacuum_expectation(
    elements: &[MobiusMatrix],
    ft: &FockTruncation,
    inputs: &[FockVector],
) -> Result<f64> {
    OperadicProduct::new(elements, ft)?.vacuum_expectation(ft, inputs)
}

/// The square-root-factorial conjugated product: inputs are scaled by
/// `1/sqrt(p!)` per sector, the output by `sqrt(p!)`.
pub fn psi_twist_product(
    elements: &[MobiusMatrix],
    ft: &FockTruncation,
    inputs: &[FockVector],
) -> Result<FockVector> {
    let twisted: Vec<FockVector> = inputs
        .iter()
        .map(|v| v.rescale_sectors(|p| (-0.5 * crate::num::ln_factorial(p as u32)).exp()))
        .collect();
    let out = product_rho(elements, ft, &twisted)?;
    Ok(out.rescale_sectors(|p| (0.5 * crate::num::ln_factorial(p as u32)).exp()))
}

/// Brute-force perfect-matching sum for single-particle insertions: the
/// combinatorial shadow of the contraction exponential. Odd arity gives 0.
pub fn npoint_wick_oracle(
    elements: &[MobiusMatrix],
    ft: &FockTruncation,
    particles: &[u16],
) -> Result<f64> {
    let n = elements.len();
    if particles.len() != n {
        return Err(Error::ArityMismatch(n, particles.len()));
    }
    let cfg = is_ce_config(elements)?;
    if n >= 2 && !cfg.strict {
        return Err(Error::NonStrictConfig);
    }
    if n % 2 == 1 {
        return Ok(0.0);
    }
    if n == 0 {
        return Ok(1.0);
    }
    let mut pairs: BTreeMap<(usize, usize), ContractionMatrix> = BTreeMap::new();
    for i in 0..n {
        for j in 0..i {
            pairs.insert((i, j), contraction_general(&elements[i], &elements[j], &ft.trunc)?);
        }
    }
    let mut used = vec![false; n];
    Ok(matchings(&mut used, &pairs, particles))
}

fn matchings(
    used: &mut Vec<bool>,
    pairs: &BTreeMap<(usize, usize), ContractionMatrix>,
    particles: &[u16],
) -> f64 {
    let first = match used.iter().position(|u| !u) {
        Some(i) => i,
        None => return 1.0,
    };
    used[first] = true;
    let mut acc = 0.0;
    for j in (first + 1)..used.len() {
        if used[j] {
            continue;
        }
        used[j] = true;
        // slot order: the contraction key is (larger, smaller)
        let c = &pairs[&(j, first)];
        let val = c.mat[(particles[j] as usize, particles[first] as usize)];
        acc += val * matchings(used, pairs, particles);
        used[j] = false;
    }
    used[first] = false;
    acc
}

/// Options of the sphere-state evaluation.
#[derive(Debug, Clone, Copy)]
pub struct SphereStateOptions {
    /// Point-sampling budget before giving up.
    pub sample_budget: usize,
    /// Shrink the transported images to this fraction of the unit ball.
    pub interior_margin: f64,
    /// Clearance required between the free point and every image closure.
    pub clearance: f64,
}

impl Default for SphereStateOptions {
    fn default() -> Self {
        SphereStateOptions { sample_budget: 10_000, interior_margin: 0.75, clearance: 1e-3 }
    }
}

/// Conformally invariant state on the sphere: transport the configuration
/// into the ball and take the vacuum expectation there.
///
/// Steps: find a point clear of all image closures, send it to `∞` by an
/// inversion-translation, then shrink by a dilation until every image lands
/// strictly inside the unit ball. Any two admissible choices differ by a
/// transformation fixing `∞`, under which the value is invariant, so the
/// result is choice-independent up to truncation error.
pub fn sphere_state<R: Rng>(
    elements: &[MobiusMatrix],
    ft: &FockTruncation,
    inputs: &[FockVector],
    rng: &mut R,
    opts: SphereStateOptions,
) -> Result<f64> {
    if elements.is_empty() {
        return Ok(1.0);
    }
    let d = elements[0].d;
    let regions: Vec<BallRegion> = elements.iter().map(image_ball).collect();
    for i in 0..regions.len() {
        for j in 0..i {
            if !regions[i].closure_disjoint(&regions[j], 0.0) {
                return Err(Error::InvalidConfig(
                    "image closures are not pairwise disjoint".into(),
                ));
            }
        }
    }
    let x0 = free_point(&regions, d, rng, &opts)?;
    // inversion-after-translation sends x0 to ∞ but reverses orientation;
    // a coordinate flip (fixing ∞) restores it
    let mut flip = nalgebra::DMatrix::identity(d + 2, d + 2);
    flip[(0, 0)] = -1.0;
    let send_off = MobiusMatrix { d, m: flip }
        .compose(&MobiusMatrix::inversion(d))?
        .compose(&MobiusMatrix::translation(
            &x0.iter().map(|v| -v).collect::<Vec<_>>(),
        ))?;
    let moved: Vec<MobiusMatrix> = elements
        .iter()
        .map(|g| send_off.compose(g))
        .collect::<Result<Vec<_>>>()?;
    let mut enclosing: f64 = 0.0;
    for g in &moved {
        match image_ball(g) {
            BallRegion::Ball { center, radius } => {
                let c: f64 = center.iter().map(|v| v * v).sum::<f64>().sqrt();
                enclosing = enclosing.max(c + radius);
            }
            _ => {
                return Err(Error::InvalidConfig(
                    "transported image still reaches infinity".into(),
                ))
            }
        }
    }
    let scale = (opts.interior_margin / enclosing).min(0.99);
    let shrink = MobiusMatrix::dilation(d, scale)?;
    let transported: Vec<MobiusMatrix> = moved
        .iter()
        .map(|g| shrink.compose(g))
        .collect::<Result<Vec<_>>>()?;
    vacuum_expectation(&transported, ft, inputs)
}

fn free_point<R: Rng>(
    regions: &[BallRegion],
    d: usize,
    rng: &mut R,
    opts: &SphereStateOptions,
) -> Result<Vec<f64>> {
    for _ in 0..opts.sample_budget {
        // uniform point on the round sphere, mapped to the chart
        let mut w: Vec<f64> = (0..=d).map(|_| normal(rng)).collect();
        let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-9 {
            continue;
        }
        for v in &mut w {
            *v /= norm;
        }
        if (1.0 - w[d]).abs() < 1e-6 {
            continue; // too close to the chart pole
        }
        let x: Vec<f64> = (0..d).map(|i| w[i] / (1.0 - w[d])).collect();
        let p = SpherePoint::Finite(x.clone());
        if regions.iter().all(|r| !r.closure_contains(&p, opts.clearance)) {
            return Ok(x);
        }
    }
    Err(Error::NoFreePoint)
}

fn normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Largest two-point pairing magnitude of `v` against probe vectors over a
/// grid of separated pairs — the two-point radical probe.
pub fn radical_probe_2pt(
    v: &FockVector,
    grid: &[(MobiusMatrix, MobiusMatrix)],
    probes: &[FockVector],
    ft: &FockTruncation,
) -> Result<f64> {
    let mut best = 0.0f64;
    for (g1, g2) in grid {
        let prod = OperadicProduct::new(&[g1.clone(), g2.clone()], ft)?;
        for w in probes {
            let val = prod.vacuum_expectation(ft, &[w.clone(), v.clone()])?;
            best = best.max(val.abs());
        }
    }
    Ok(best)
}

/// Relative discrepancy of operadic composition at a slot: compare the
/// composed configuration against outer-after-inner.
pub fn operad_check(
    outer: &[MobiusMatrix],
    inner: &[MobiusMatrix],
    slot: usize,
    ft: &FockTruncation,
    inputs: &[FockVector],
) -> Result<f64> {
    let n = outer.len();
    let m = inner.len();
    if slot >= n {
        return Err(Error::InvalidConfig(format!("slot {slot} out of range")));
    }
    if inputs.len() != n - 1 + m {
        return Err(Error::ArityMismatch(n - 1 + m, inputs.len()));
    }
    // composed configuration
    let mut composed = Vec::with_capacity(n - 1 + m);
    composed.extend_from_slice(&outer[..slot]);
    for f in inner {
        composed.push(outer[slot].compose(f)?);
    }
    composed.extend_from_slice(&outer[slot + 1..]);
    let direct = product_rho(&composed, ft, inputs)?;
    // nested evaluation
    let inner_out = product_rho(inner, ft, &inputs[slot..slot + m])?;
    let mut outer_inputs: Vec<FockVector> = Vec::with_capacity(n);
    outer_inputs.extend_from_slice(&inputs[..slot]);
    outer_inputs.push(inner_out);
    outer_inputs.extend_from_slice(&inputs[slot + m..]);
    let nested = product_rho(outer, ft, &outer_inputs)?;
    let diff = direct.sub(&nested).norm();
    let denom = direct.norm().max(nested.norm()).max(1e-300);
    Ok(diff / denom)
}
