//! The weight-set predictors attached to a tame semisimple inertial
//! parameter and their relations: obvious weights, the closure operation,
//! explicit predicted weights, the exact `GL₃/Q_p` recipe, the generic
//! characterization for any `n`, the cycle-based predictor, genericity
//! depth, and shift-closure reporting.
//!
//! Per-parameter functions enumerate directly; whole-universe scans use the
//! `*_atlas` builders, which invert the same enumerations into a map keyed by
//! canonical parameter.

use crate::alcove_geometry::{dominant_predecessors, DotWeight};
use crate::context::{eta, Context};
use crate::jordan_holder::{jh_L_lambda, JhError};
use crate::tame_types::{all_permutation_tuples, all_permutations, TamePiece, TameType};
use crate::weight_lattice::{enumerate_all, HodgeType, SerreWeight};
use num_bigint::BigUint;
use serde::Serialize;
use std::collections::{BTreeSet, HashMap, VecDeque};

/// An ordered set of canonical Serre weights.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSet {
    /// Shared context.
    pub ctx: Context,
    /// Canonical members in lexicographic order.
    pub members: BTreeSet<SerreWeight>,
}

impl WeightSet {
    /// The empty set.
    pub fn new(ctx: Context) -> WeightSet {
        WeightSet { ctx, members: BTreeSet::new() }
    }

    /// Wraps a member set.
    pub fn from_members(ctx: Context, members: BTreeSet<SerreWeight>) -> WeightSet {
        WeightSet { ctx, members }
    }

    /// Membership test (canonical forms).
    pub fn contains(&self, w: &SerreWeight) -> bool {
        self.members.contains(w)
    }

    /// Number of members.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    /// Whether the set is empty.
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members not present in `other`.
    pub fn difference(&self, other: &WeightSet) -> WeightSet {
        WeightSet {
            ctx: self.ctx,
            members: self.members.difference(&other.members).cloned().collect(),
        }
    }

    /// Members present in both sets.
    pub fn intersection(&self, other: &WeightSet) -> WeightSet {
        WeightSet {
            ctx: self.ctx,
            members: self.members.intersection(&other.members).cloned().collect(),
        }
    }

    /// Members with all gaps strictly below `p−1`.
    pub fn regular_part(&self) -> WeightSet {
        WeightSet {
            ctx: self.ctx,
            members: self.members.iter().filter(|w| w.is_regular()).cloned().collect(),
        }
    }

    /// Applies a weight map member-wise.
    pub fn map(&self, f: impl Fn(&SerreWeight) -> SerreWeight) -> WeightSet {
        WeightSet { ctx: self.ctx, members: self.members.iter().map(f).collect() }
    }
}

impl Serialize for WeightSet {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.members.iter())
    }
}

/// A whole-universe predictor evaluation: canonical parameter → weight set.
pub type TypeAtlas = HashMap<TameType, BTreeSet<SerreWeight>>;

// ---------------------------------------------------------------------------
// Obvious weights
// ---------------------------------------------------------------------------

/// The obvious weights of `t`: the weights witnessed by sums of inductions of
/// crystalline characters whose reduction matches `t` on inertia.
pub fn w_obv(t: &TameType) -> WeightSet {
    if t.ctx.e == 1 {
        w_obv_unramified(t)
    } else {
        w_obv_general(t)
    }
}

/// Unramified base (`e = 1`): `F(μ)` is obvious exactly when
/// `t ≅ τ(w, μ+η)` for some tuple of permutations `w`.
fn w_obv_unramified(t: &TameType) -> WeightSet {
    let ctx = t.ctx;
    let perms = all_permutation_tuples(ctx.n as usize, ctx.f as usize);
    let mut members = BTreeSet::new();
    for a in enumerate_all(ctx) {
        let mu = a.rows_plus_eta();
        if perms.iter().any(|w| TameType::from_pair(w, &mu, ctx) == *t) {
            members.insert(a);
        }
    }
    WeightSet { ctx, members }
}

/// Forward atlas for the unramified obvious-weight search: every
/// `τ(w, μ+η)` mapped to the set of witnessing `μ`.
pub fn obvious_atlas(ctx: Context) -> TypeAtlas {
    assert_eq!(ctx.e, 1);
    let perms = all_permutation_tuples(ctx.n as usize, ctx.f as usize);
    let mut map: TypeAtlas = HashMap::new();
    for a in enumerate_all(ctx) {
        let mu = a.rows_plus_eta();
        for w in &perms {
            map.entry(TameType::from_pair(w, &mu, ctx)).or_default().insert(a.clone());
        }
    }
    map
}

/// General (possibly ramified) obvious-weight search: for each weight, each
/// lift, and each partition of `n` into induction-block sizes, distribute the
/// per-embedding Hodge–Tate multisets into block slots in every bijective
/// way and compare the reduction of the resulting sum of inductions with `t`.
fn w_obv_general(t: &TameType) -> WeightSet {
    let ctx = t.ctx;
    let mut members = BTreeSet::new();
    for a in enumerate_all(ctx) {
        if is_obvious_weight(t, &a) {
            members.insert(a);
        }
    }
    WeightSet { ctx, members }
}

/// Whether one weight is witnessed for `t` by some sum of inductions.
pub fn is_obvious_weight(t: &TameType, a: &SerreWeight) -> bool {
    let ctx = t.ctx;
    let (f, e, n) = (ctx.f as usize, ctx.e as usize, ctx.n as usize);
    let perms = all_permutations(n);
    for lam in a.lifts_of() {
        for dims in integer_partitions(ctx.n) {
            // Slot layout: block j contributes one slot per residue
            // embedding index of its coefficient field above each σ.
            let slots: Vec<(usize, usize)> = dims
                .iter()
                .enumerate()
                .flat_map(|(j, &d)| (0..d as usize).map(move |s| (j, s)))
                .collect();
            // Per σ: the distinct per-slot sum vectors over all bijective
            // distributions of the e Hodge–Tate multisets above σ.
            let mut per_sigma: Vec<Vec<Vec<i64>>> = Vec::with_capacity(f);
            for sigma in 0..f {
                let values: Vec<Vec<i64>> =
                    (0..e).map(|m| lam.ht_weights(sigma * e + m)).collect();
                let mut sums: BTreeSet<Vec<i64>> = BTreeSet::new();
                distribute(&values, 0, &mut vec![0i64; n], &perms, &mut sums);
                per_sigma.push(sums.into_iter().collect());
            }
            // Cross the σ choices and test the reduction.
            let mut combo = vec![0usize; f];
            loop {
                let mut raw: Vec<(u32, BigUint)> = Vec::new();
                for (j, &d) in dims.iter().enumerate() {
                    let du = d as usize;
                    // Character data over the e·f·d embeddings of the
                    // unramified degree-d extension; only per-residue sums
                    // matter, stored in the first slot above each.
                    let mut block = vec![0i64; e * f * du];
                    for sigma in 0..f {
                        let sums = &per_sigma[sigma][combo[sigma]];
                        for s in 0..du {
                            let slot = slots.iter().position(|&x| x == (j, s)).unwrap();
                            block[(sigma + f * s) * e] = sums[slot];
                        }
                    }
                    let part = crate::tame_types::reduce_induced(&block, d, ctx);
                    raw.extend(part.pieces.into_iter().map(|p| (p.niveau, p.exponent)));
                }
                if TameType::from_raw_pieces(ctx, raw) == *t {
                    return true;
                }
                // odometer over σ choices
                let mut k = 0;
                loop {
                    if k == f {
                        break;
                    }
                    combo[k] += 1;
                    if combo[k] < per_sigma[k].len() {
                        break;
                    }
                    combo[k] = 0;
                    k += 1;
                }
                if k == f {
                    break;
                }
            }
        }
    }
    false
}

/// Accumulates per-slot sums for all tuples of bijections (one per embedding
/// above σ) of the value multisets onto the slots.
fn distribute(
    values: &[Vec<i64>],
    kappa: usize,
    acc: &mut Vec<i64>,
    perms: &[Vec<usize>],
    out: &mut BTreeSet<Vec<i64>>,
) {
    if kappa == values.len() {
        out.insert(acc.clone());
        return;
    }
    let n = acc.len();
    for perm in perms {
        for slot in 0..n {
            acc[slot] += values[kappa][perm[slot]];
        }
        distribute(values, kappa + 1, acc, perms, out);
        for slot in 0..n {
            acc[slot] -= values[kappa][perm[slot]];
        }
    }
}

// ---------------------------------------------------------------------------
// Closure operation
// ---------------------------------------------------------------------------

/// The smallest set containing `w` and closed under: if the set meets the
/// constituents of the reduction of `L_λ` for some lift `λ` of `a`, then `a`
/// joins. Supported for `n ≤ 3`.
pub fn closure_c(w: &WeightSet) -> Result<WeightSet, JhError> {
    if w.ctx.n > 3 {
        return Err(JhError::Unsupported { n: w.ctx.n });
    }
    let mut members = w.members.clone();
    let mut queue: VecDeque<SerreWeight> = members.iter().cloned().collect();
    while let Some(b) = queue.pop_front() {
        for a in co_mates(&b) {
            if members.insert(a.clone()) {
                queue.push_back(a);
            }
        }
    }
    Ok(WeightSet { ctx: w.ctx, members })
}

/// The weights `a` whose lift-reduction constituents include `b`, other than
/// `b` itself. The constituents of the reduction of a lift of `a` are exactly
/// the per-row choices of `a`'s row or its linkage partner when the row is
/// regular upper-alcove; inverting, each strictly-lower-alcove row of `b` may
/// be replaced by its partner.
fn co_mates(b: &SerreWeight) -> Vec<SerreWeight> {
    if b.ctx.n != 3 {
        return Vec::new();
    }
    let p = b.ctx.p as i64;
    let upper: Vec<Option<Vec<i64>>> = b
        .rows
        .iter()
        .map(|r| {
            if r[0] - r[2] <= p - 3 {
                Some(vec![r[2] + p - 2, r[1], r[0] - p + 2])
            } else {
                None
            }
        })
        .collect();
    let idx: Vec<usize> = (0..b.rows.len()).filter(|&i| upper[i].is_some()).collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << idx.len()) {
        let mut rows = b.rows.clone();
        for (bit, &i) in idx.iter().enumerate() {
            if mask & (1 << bit) != 0 {
                rows[i] = upper[i].clone().unwrap();
            }
        }
        out.push(
            SerreWeight::canonicalize(&rows, b.ctx).expect("partner rows are restricted"),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Explicit predicted weights
// ---------------------------------------------------------------------------

/// The explicit predicted weights of `t`: the least fixpoint seeded by the
/// obvious weights and closed under the decomposition rule over groupings of
/// `t`'s pieces with η-partitions of lifts. Supported for `n ≤ 3`.
pub fn w_expl(t: &TameType) -> Result<WeightSet, JhError> {
    let mut memo = HashMap::new();
    w_expl_memo(t, &mut memo)
}

/// As [`w_expl`], but sharing a memo table across calls — worthwhile for
/// sweeps over many parameters, whose recursions overlap heavily.
pub fn w_expl_cached(
    t: &TameType,
    memo: &mut HashMap<TameType, WeightSet>,
) -> Result<WeightSet, JhError> {
    w_expl_memo(t, memo)
}

fn w_expl_memo(
    t: &TameType,
    memo: &mut HashMap<TameType, WeightSet>,
) -> Result<WeightSet, JhError> {
    if let Some(w) = memo.get(t) {
        return Ok(w.clone());
    }
    let ctx = t.ctx;
    if ctx.n > 3 {
        return Err(JhError::Unsupported { n: ctx.n });
    }
    let mut seeds = w_obv(t).members;
    // Proper groupings of the pieces refer to strictly smaller parameters,
    // so their contribution is a fixed seed set; the trivial grouping is the
    // closure rule and is applied as the final fixpoint.
    for grouping in set_partitions(t.pieces.len()) {
        if grouping.len() < 2 {
            continue;
        }
        let subtypes: Vec<TameType> =
            grouping.iter().map(|g| t.sub_type(g)).collect();
        let sub_sets: Vec<WeightSet> = subtypes
            .iter()
            .map(|s| w_expl_memo(s, memo))
            .collect::<Result<_, _>>()?;
        let sizes: Vec<u32> = subtypes.iter().map(TameType::dim).collect();
        for a in enumerate_all(ctx) {
            if seeds.contains(&a) {
                continue;
            }
            if weight_has_eta_partition_witness(&a, &sizes, &sub_sets)? {
                seeds.insert(a);
            }
        }
    }
    let result = closure_c(&WeightSet { ctx, members: seeds })?;
    memo.insert(t.clone(), result.clone());
    Ok(result)
}

/// Whether some lift of `a` admits an η-partition into blocks of the given
/// sizes whose constituent sets all meet the corresponding weight sets.
fn weight_has_eta_partition_witness(
    a: &SerreWeight,
    sizes: &[u32],
    sub_sets: &[WeightSet],
) -> Result<bool, JhError> {
    for lam in a.lifts_of() {
        for blocks in eta_partitions(&lam, sizes) {
            let mut all = true;
            for (block, sub) in blocks.iter().zip(sub_sets) {
                let jh = jh_L_lambda(block)?;
                if !jh.weights().any(|b| sub.members.contains(b)) {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// All η-partitions of the lift `lam` into labeled blocks of the given sizes:
/// per embedding, every split of the η-shifted column into decreasing
/// subsequences of those lengths (then each block is η-unshifted in its own
/// dimension).
fn eta_partitions(lam: &HodgeType, sizes: &[u32]) -> Vec<Vec<HodgeType>> {
    let ctx = lam.ctx;
    let cols = lam.cols.len();
    let labelings = label_sequences(sizes);
    // choice of labeling per column
    let mut out = Vec::new();
    let mut choice = vec![0usize; cols];
    loop {
        let mut blocks: Vec<HodgeType> = sizes
            .iter()
            .map(|&s| HodgeType { ctx: ctx.with_n(s), cols: vec![Vec::new(); cols] })
            .collect();
        for (kappa, &li) in choice.iter().enumerate() {
            let values = lam.ht_weights(kappa);
            for (pos, &label) in labelings[li].iter().enumerate() {
                blocks[label].cols[kappa].push(values[pos]);
            }
        }
        for (j, &s) in sizes.iter().enumerate() {
            let eta_j = eta(s);
            for col in &mut blocks[j].cols {
                for (v, h) in col.iter_mut().zip(&eta_j) {
                    *v -= h;
                }
            }
        }
        out.push(blocks);
        // odometer
        let mut k = 0;
        loop {
            if k == cols {
                return out;
            }
            choice[k] += 1;
            if choice[k] < labelings.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Forward seed atlas for the explicit-weight recursion at `n = 3`, `f = 1`,
/// `e = 1`: for every weight, every proper grouping's possible matching
/// parameters, keyed by canonical parameter.
pub fn expl_seed_atlas(ctx: Context) -> TypeAtlas {
    assert_eq!((ctx.n, ctx.f, ctx.e), (3, 1, 1));
    let p = ctx.p as i64;
    let swap2 = all_permutations(2);
    let mut map: TypeAtlas = HashMap::new();
    for a in enumerate_all(ctx) {
        let h: Vec<i64> = a.rows_plus_eta()[0].clone();
        // grouping into a 2-block (entries i < j) and a singleton k
        for (i, j, k) in [(0usize, 1usize, 2usize), (0, 2, 1), (1, 2, 0)] {
            let gap = (h[i] - 1) - h[j];
            let base = h[j];
            let block = crate::jordan_holder::jh_weyl_gl2(gap, base, ctx)
                .expect("η-partition block gaps are within range");
            let ch = TameType::from_raw_pieces(
                ctx.with_n(1),
                vec![(1, mod_pm1(h[k], p))],
            );
            for b in block.weights() {
                let mu2: Vec<i64> = vec![b.rows[0][0] + 1, b.rows[0][1]];
                for w in &swap2 {
                    let t2 = TameType::from_pair(
                        std::slice::from_ref(w),
                        &[mu2.clone()],
                        ctx.with_n(2),
                    );
                    let t = t2.direct_sum(&ch);
                    map.entry(t).or_default().insert(a.clone());
                }
            }
        }
        // grouping into three singletons
        let chars =
            TameType::from_raw_pieces(ctx, h.iter().map(|&v| (1, mod_pm1(v, p))).collect());
        map.entry(chars).or_default().insert(a.clone());
    }
    map
}

fn mod_pm1(v: i64, p: i64) -> BigUint {
    BigUint::try_from(v.rem_euclid(p - 1)).unwrap()
}

/// Explicit weights through the atlases: closure of obvious seeds plus the
/// grouping seeds. Must agree with [`w_expl`].
pub fn w_expl_via_atlases(
    t: &TameType,
    obvious: &TypeAtlas,
    seeds: &TypeAtlas,
) -> Result<WeightSet, JhError> {
    let mut members: BTreeSet<SerreWeight> = BTreeSet::new();
    if let Some(s) = obvious.get(t) {
        members.extend(s.iter().cloned());
    }
    if let Some(s) = seeds.get(t) {
        members.extend(s.iter().cloned());
    }
    closure_c(&WeightSet { ctx: t.ctx, members })
}

// ---------------------------------------------------------------------------
// The exact GL₃/Q_p recipe
// ---------------------------------------------------------------------------

/// The predicted weight set for `GL₃` over `Q_p`: the union of the `A`-sets
/// of the restricted `μ` for which some good pair `(w, μ)` matches `t`.
pub fn w_q_gl3(t: &TameType) -> WeightSet {
    let ctx = t.ctx;
    assert_eq!((ctx.n, ctx.f, ctx.e), (3, 1, 1));
    let perms = all_permutations(3);
    let mut members = BTreeSet::new();
    for mu in enumerate_all(ctx) {
        for w in &perms {
            if TameType::is_good(std::slice::from_ref(w), &mu.rows, ctx)
                && TameType::from_pair(std::slice::from_ref(w), &mu.rows, ctx) == *t
            {
                members.extend(a_set(&mu));
                break;
            }
        }
    }
    WeightSet { ctx, members }
}

/// `A(μ)`: the regular replacement of `μ−η` plus, when the top gap is small,
/// its linkage partner.
fn a_set(mu: &SerreWeight) -> Vec<SerreWeight> {
    let ctx = mu.ctx;
    let p = ctx.p as i64;
    let v: Vec<i64> = mu.rows[0].iter().zip(eta(3)).map(|(m, h)| m - h).collect();
    let g1 = (v[0] - v[1]).rem_euclid(p - 1);
    let g2 = (v[1] - v[2]).rem_euclid(p - 1);
    let z = v[2].rem_euclid(p - 1);
    let (x, y) = (z + g2 + g1, z + g2);
    let mut out =
        vec![SerreWeight::canonicalize(&[vec![x, y, z]], ctx).expect("regular replacement")];
    if x - z < p - 2 {
        out.push(
            SerreWeight::canonicalize(&[vec![z + p - 2, y, x - p + 2]], ctx)
                .expect("partner is restricted"),
        );
    }
    out
}

// ---------------------------------------------------------------------------
// Generic characterization (any n) and genericity depth
// ---------------------------------------------------------------------------

/// The generic predicted weight set: `F(λ)` is included exactly when
/// `t ≅ τ(w, λ'+η)` for some dominant `λ'` strongly linked to `λ`.
pub fn w_q_generic(t: &TameType) -> WeightSet {
    let ctx = t.ctx;
    let perms = all_permutation_tuples(ctx.n as usize, ctx.f as usize);
    let mut members = BTreeSet::new();
    for lam in enumerate_all(ctx) {
        let dw = DotWeight::new(ctx, lam.rows.clone());
        'search: for pred in dominant_predecessors(&dw) {
            let mu: Vec<Vec<i64>> = pred
                .rows
                .iter()
                .map(|r| r.iter().zip(eta(ctx.n)).map(|(v, h)| v + h).collect())
                .collect();
            for w in &perms {
                if TameType::from_pair(w, &mu, ctx) == *t {
                    members.insert(lam.clone());
                    break 'search;
                }
            }
        }
    }
    WeightSet { ctx, members }
}

/// Forward atlas for [`w_q_generic`].
pub fn generic_prediction_atlas(ctx: Context) -> TypeAtlas {
    let perms = all_permutation_tuples(ctx.n as usize, ctx.f as usize);
    let mut map: TypeAtlas = HashMap::new();
    for lam in enumerate_all(ctx) {
        let dw = DotWeight::new(ctx, lam.rows.clone());
        for pred in dominant_predecessors(&dw) {
            let mu: Vec<Vec<i64>> = pred
                .rows
                .iter()
                .map(|r| r.iter().zip(eta(ctx.n)).map(|(v, h)| v + h).collect())
                .collect();
            for w in &perms {
                map.entry(TameType::from_pair(w, &mu, ctx)).or_default().insert(lam.clone());
            }
        }
    }
    map
}

/// Visits every matching pair `(w, μ)` with `μ` inside the lowest alcove,
/// reporting the wall distance of `μ`.
fn for_each_deep_match(ctx: Context, mut visit: impl FnMut(&TameType, i64)) {
    let p = ctx.p as i64;
    let (f, n) = (ctx.f as usize, ctx.n as usize);
    let perms = all_permutation_tuples(n, f);
    // gap vectors per row with all ρ-shifted pairings < p
    let mut gap_options: Vec<Vec<i64>> = Vec::new();
    enumerate_gap_vectors(n - 1, p - n as i64, &mut Vec::new(), &mut gap_options);
    let mut rows_choice = vec![0usize; f];
    let last_bottom_max = ctx.pf_minus_1_i64() - 1;
    loop {
        for bottom in 0..=last_bottom_max {
            let mut rows: Vec<Vec<i64>> = Vec::with_capacity(f);
            let mut depth = i64::MAX;
            for (ri, &gi) in rows_choice.iter().enumerate() {
                let gaps = &gap_options[gi];
                let base = if ri + 1 == f { bottom } else { 0 };
                let mut row = vec![base; n];
                for i in (0..n - 1).rev() {
                    row[i] = row[i + 1] + gaps[i];
                }
                rows.push(row);
                // pairings of μ+ρ over positive roots
                for i in 0..n {
                    for j in (i + 1)..n {
                        let t: i64 =
                            gaps[i..j].iter().sum::<i64>() + (j - i) as i64;
                        depth = depth.min(t.min(p - t));
                    }
                }
            }
            for w in &perms {
                let t = TameType::from_pair(w, &rows, ctx);
                visit(&t, depth);
            }
        }
        let mut k = 0;
        loop {
            if k == f {
                return;
            }
            rows_choice[k] += 1;
            if rows_choice[k] < gap_options.len() {
                break;
            }
            rows_choice[k] = 0;
            k += 1;
        }
    }
}

fn enumerate_gap_vectors(
    slots: usize,
    budget: i64,
    prefix: &mut Vec<i64>,
    out: &mut Vec<Vec<i64>>,
) {
    if slots == 0 {
        out.push(prefix.clone());
        return;
    }
    for g in 0..=budget {
        prefix.push(g);
        enumerate_gap_vectors(slots - 1, budget - g, prefix, out);
        prefix.pop();
    }
}

/// The genericity depth of `t`: the maximal wall distance of a lowest-alcove
/// `μ` matching `t` through some `(w, μ)`, or 0 when none matches.
pub fn genericity_depth(t: &TameType) -> i64 {
    let mut best = 0i64;
    for_each_deep_match(t.ctx, |cand, depth| {
        if cand == t && depth > best {
            best = depth;
        }
    });
    best
}

/// Whole-universe genericity depths.
pub fn genericity_atlas(ctx: Context) -> HashMap<TameType, i64> {
    let mut map: HashMap<TameType, i64> = HashMap::new();
    for_each_deep_match(ctx, |t, depth| {
        let e = map.entry(t.clone()).or_insert(0);
        if depth > *e {
            *e = depth;
        }
    });
    map
}

/// Whether `t` admits a matching `μ` strictly deeper than `delta`.
pub fn is_delta_generic(t: &TameType, delta: i64) -> bool {
    genericity_depth(t) > delta
}

// ---------------------------------------------------------------------------
// Cycle-based predictor
// ---------------------------------------------------------------------------

/// The cycle-based predicted weights (`f = 1`, `e = 1`): `F(λ)` is included
/// when `λ+η` splits into decreasing subsequences matched by irreducible
/// summands `τ(w_i, μ^{(i)}+η)` with `w_i` a cycle, `μ^{(i)}` restricted
/// congruent to the subsequence entrywise mod `p−1` with window at most
/// `p−1`, reassembling `t`.
pub fn adp_weights(t: &TameType) -> WeightSet {
    let ctx = t.ctx;
    assert_eq!((ctx.f, ctx.e), (1, 1));
    let mut members = BTreeSet::new();
    for lam in enumerate_all(ctx) {
        if adp_matches(t, &lam) {
            members.insert(lam);
        }
    }
    WeightSet { ctx, members }
}

/// Forward atlas for [`adp_weights`].
pub fn adp_atlas(ctx: Context) -> TypeAtlas {
    assert_eq!((ctx.f, ctx.e), (1, 1));
    let mut map: TypeAtlas = HashMap::new();
    for lam in enumerate_all(ctx) {
        for cand in adp_candidates(&lam) {
            map.entry(cand).or_default().insert(lam.clone());
        }
    }
    map
}

fn adp_matches(t: &TameType, lam: &SerreWeight) -> bool {
    adp_candidates(lam).iter().any(|cand| cand == t)
}

/// All parameters reachable from the weight by the cycle-based rule.
fn adp_candidates(lam: &SerreWeight) -> BTreeSet<TameType> {
    let ctx = lam.ctx;
    let p = ctx.p as i64;
    let h = &lam.rows_plus_eta()[0];
    let n = ctx.n as usize;
    let mut out = BTreeSet::new();
    for grouping in set_partitions(n) {
        // per block: the possible irreducible summands
        let mut block_options: Vec<Vec<TamePiece>> = Vec::new();
        let mut feasible = true;
        for positions in &grouping {
            let seq: Vec<i64> = positions.iter().map(|&i| h[i]).collect();
            let ni = seq.len();
            let eta_i = eta(ni as u32);
            let shifted: Vec<i64> = seq.iter().zip(&eta_i).map(|(v, h)| v - h).collect();
            let mut opts = Vec::new();
            for mu in adp_mu_options(&shifted, p) {
                let mu_eta: Vec<i64> = mu.iter().zip(&eta_i).map(|(v, h)| v + h).collect();
                for w in full_cycles(ni) {
                    let sub = ctx.with_n(ni as u32);
                    if TameType::is_good(std::slice::from_ref(&w), &[mu_eta.clone()], sub) {
                        let piece_type = TameType::from_pair(
                            std::slice::from_ref(&w),
                            &[mu_eta.clone()],
                            sub,
                        );
                        opts.extend(piece_type.pieces);
                    }
                }
            }
            if opts.is_empty() {
                feasible = false;
                break;
            }
            opts.sort();
            opts.dedup();
            block_options.push(opts);
        }
        if !feasible {
            continue;
        }
        // cross the block choices
        let mut choice = vec![0usize; block_options.len()];
        loop {
            let raw: Vec<(u32, BigUint)> = choice
                .iter()
                .zip(&block_options)
                .map(|(&c, opts)| (opts[c].niveau, opts[c].exponent.clone()))
                .collect();
            out.insert(TameType::from_raw_pieces(ctx, raw));
            let mut k = 0;
            loop {
                if k == choice.len() {
                    break;
                }
                choice[k] += 1;
                if choice[k] < block_options[k].len() {
                    break;
                }
                choice[k] = 0;
                k += 1;
            }
            if k == choice.len() {
                break;
            }
        }
    }
    out
}

/// Restricted dominant `μ` congruent to the target entrywise mod `p−1` with
/// `μ_top − μ_bottom ≤ p−1` and bottom in `[0, p−2]`.
fn adp_mu_options(target: &[i64], p: i64) -> Vec<Vec<i64>> {
    let k = target.len();
    let bottom = target[k - 1].rem_euclid(p - 1);
    let mut partials: Vec<Vec<i64>> = vec![vec![bottom]];
    for idx in (0..k - 1).rev() {
        let mut next = Vec::new();
        for partial in &partials {
            let floor = partial[0];
            let mut v = floor + (target[idx] - floor).rem_euclid(p - 1);
            while v <= bottom + p - 1 {
                let mut grown = Vec::with_capacity(partial.len() + 1);
                grown.push(v);
                grown.extend_from_slice(partial);
                next.push(grown);
                v += p - 1;
            }
        }
        partials = next;
    }
    partials
}

/// The full cycles on `n` letters (as images `i ↦ w[i]`).
fn full_cycles(n: usize) -> Vec<Vec<usize>> {
    all_permutations(n)
        .into_iter()
        .filter(|w| {
            let mut len = 1;
            let mut cur = w[0];
            while cur != 0 {
                cur = w[cur];
                len += 1;
            }
            len == n
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Shift reporting
// ---------------------------------------------------------------------------

/// One legal shift of a member and whether the shifted weight stays inside.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftEntry {
    /// The member admitting the shift.
    pub member: SerreWeight,
    /// The index at which `p−1` is added to the top rows.
    pub i0: usize,
    /// The shifted weight.
    pub shifted: SerreWeight,
    /// Whether the shifted weight is also a member.
    pub present: bool,
}

/// Report of shift-closure for a weight set.
#[derive(Clone, Debug, Serialize)]
pub struct ShiftReport {
    /// Whether every legal shift of a member is a member.
    pub closed: bool,
    /// All legal shifts found.
    pub entries: Vec<ShiftEntry>,
}

/// Reports, for each member with a legal shift, whether the shift is a
/// member. Asserts nothing; shift-entailment is an open question.
pub fn is_shift_closed(w: &WeightSet) -> ShiftReport {
    let mut entries = Vec::new();
    for member in &w.members {
        for i0 in 1..w.ctx.n as usize {
            if let Ok(shifted) = member.shift_of(i0) {
                let present = w.members.contains(&shifted);
                entries.push(ShiftEntry { member: member.clone(), i0, shifted, present });
            }
        }
    }
    ShiftReport { closed: entries.iter().all(|e| e.present), entries }
}

// ---------------------------------------------------------------------------
// Result object
// ---------------------------------------------------------------------------

/// Genericity annotation carried by every result.
#[derive(Clone, Debug, Serialize)]
pub struct Genericity {
    /// The threshold the parameter was tested against.
    pub delta: i64,
    /// Whether some matching lowest-alcove `μ` is strictly deeper.
    pub is_generic: bool,
}

/// The JSON result object for one parameter.
#[derive(Clone, Debug, Serialize)]
pub struct PredictorReport {
    /// The input parameter.
    #[serde(rename = "type")]
    pub parameter: TameType,
    /// Obvious weights, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_obv: Option<WeightSet>,
    /// Closure of the obvious weights, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub closure: Option<WeightSet>,
    /// Explicit predicted weights, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_expl: Option<WeightSet>,
    /// The predicted set (exact recipe when applicable, generic otherwise).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w_q: Option<WeightSet>,
    /// Explicit weights outside the closure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub obscure: Option<WeightSet>,
    /// Closure weights outside the obvious set.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shadow: Option<WeightSet>,
    /// The cycle-based predicted set, when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub adp: Option<WeightSet>,
    /// Genericity annotation.
    pub genericity: Genericity,
}

// ---------------------------------------------------------------------------
// Small combinatorial helpers
// ---------------------------------------------------------------------------

/// Non-increasing partitions of `n`.
fn integer_partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=max.min(n)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// Set partitions of `{0, …, m−1}`; blocks are sorted by smallest element
/// and each block keeps increasing order.
fn set_partitions(m: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for i in 0..m {
        let mut next = Vec::new();
        for part in &out {
            for b in 0..part.len() {
                let mut p2 = part.clone();
                p2[b].push(i);
                next.push(p2);
            }
            let mut p2 = part.clone();
            p2.push(vec![i]);
            next.push(p2);
        }
        out = next;
    }
    out
}

/// All sequences over labels `0..sizes.len()` with the given multiplicities.
fn label_sequences(sizes: &[u32]) -> Vec<Vec<usize>> {
    fn go(remaining: &mut Vec<u32>, prefix: &mut Vec<usize>, total: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == total {
            out.push(prefix.clone());
            return;
        }
        for label in 0..remaining.len() {
            if remaining[label] > 0 {
                remaining[label] -= 1;
                prefix.push(label);
                go(remaining, prefix, total, out);
                prefix.pop();
                remaining[label] += 1;
            }
        }
    }
    let total: u32 = sizes.iter().sum();
    let mut remaining = sizes.to_vec();
    let mut out = Vec::new();
    go(&mut remaining, &mut Vec::new(), total as usize, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tame_types::enumerate_types;

    fn ctx(p: u64, f: u32, e: u32, n: u32) -> Context {
        Context::new(p, f, e, n).unwrap()
    }

    fn w(c: Context, rows: &[&[i64]]) -> SerreWeight {
        let rows: Vec<Vec<i64>> = rows.iter().map(|r| r.to_vec()).collect();
        SerreWeight::canonicalize(&rows, c).unwrap()
    }

    fn unramified3(c: Context) -> TameType {
        TameType::from_raw_pieces(
            c,
            vec![(1, 0u32.into()), (1, 0u32.into()), (1, 0u32.into())],
        )
    }

    #[test]
    fn unramified_obvious_weights() {
        for p in [5u64, 7, 11] {
            let c = ctx(p, 1, 1, 3);
            let t = unramified3(c);
            let pi = p as i64;
            let expect: BTreeSet<SerreWeight> = [
                w(c, &[&[pi - 3, -1, -pi + 1]]),
                w(c, &[&[pi - 2, -1, -1]]),
                w(c, &[&[pi - 2, pi - 2, -1]]),
            ]
            .into_iter()
            .collect();
            assert_eq!(w_obv(&t).members, expect);
        }
        // p = 2: all four weights
        let c = ctx(2, 1, 1, 3);
        assert_eq!(w_obv(&unramified3(c)).len(), 4);
        assert_eq!(enumerate_all(c).count(), 4);
    }

    #[test]
    fn niveau_one_example() {
        // t = ω^6 ⊕ ω^3 ⊕ ω^0 at p = 11
        let c = ctx(11, 1, 1, 3);
        let (a, b, cc, p) = (6i64, 3i64, 0i64, 11i64);
        let t = TameType::from_raw_pieces(
            c,
            vec![(1, 6u32.into()), (1, 3u32.into()), (1, 0u32.into())],
        );
        let expect: BTreeSet<SerreWeight> = [
            w(c, &[&[a - 2, b - 1, cc]]),
            w(c, &[&[b - 2, cc - 1, a - p + 1]]),
            w(c, &[&[cc + p - 3, a - 1, b]]),
            w(c, &[&[cc + p - 3, b - 1, a - p + 1]]),
            w(c, &[&[a - 2, cc - 1, b - p + 1]]),
            w(c, &[&[b + p - 3, a - 1, cc]]),
        ]
        .into_iter()
        .collect();
        assert_eq!(w_obv(&t).members, expect);
        // closure adds exactly the three shadow partners
        let cl = closure_c(&w_obv(&t)).unwrap();
        let extra: BTreeSet<SerreWeight> = [
            w(c, &[&[cc + p - 2, b - 1, a - p]]),
            w(c, &[&[a - 1, cc - 1, b - p]]),
            w(c, &[&[b + p - 2, a - 1, cc - 1]]),
        ]
        .into_iter()
        .collect();
        let shadow: BTreeSet<_> =
            cl.members.difference(&w_obv(&t).members).cloned().collect();
        assert_eq!(shadow, extra);
    }

    #[test]
    fn closure_matches_direct_fixpoint() {
        // co-mate inversion agrees with the literal fixpoint over all lifts
        let c = ctx(5, 1, 1, 3);
        let start = WeightSet {
            ctx: c,
            members: [w(c, &[&[2, 1, 0]]), w(c, &[&[4, 4, 0]])].into_iter().collect(),
        };
        let fast = closure_c(&start).unwrap();
        // naive fixpoint
        let universe: Vec<SerreWeight> = enumerate_all(c).collect();
        let mut slow = start.members.clone();
        loop {
            let mut grew = false;
            for a in &universe {
                if slow.contains(a) {
                    continue;
                }
                let hit = a.lifts_of().iter().any(|lam| {
                    jh_L_lambda(lam).unwrap().weights().any(|b| slow.contains(b))
                });
                if hit {
                    slow.insert(a.clone());
                    grew = true;
                }
            }
            if !grew {
                break;
            }
        }
        assert_eq!(fast.members, slow);
        // idempotence
        assert_eq!(closure_c(&fast).unwrap(), fast);
    }

    #[test]
    fn explicit_equals_obvious_in_dimension_two() {
        let c = ctx(5, 1, 1, 2);
        for t in enumerate_types(c) {
            assert_eq!(w_expl(&t).unwrap().members, w_obv(&t).members, "{t:?}");
        }
        let c = ctx(3, 2, 1, 2);
        for t in enumerate_types(c) {
            assert_eq!(w_expl(&t).unwrap().members, w_obv(&t).members, "{t:?}");
        }
    }

    #[test]
    fn unramified_exact_recipe() {
        for p in [5u64, 7] {
            let c = ctx(p, 1, 1, 3);
            let t = unramified3(c);
            let pi = p as i64;
            let expect: BTreeSet<SerreWeight> =
                [w(c, &[&[pi - 3, -1, -pi + 1]])].into_iter().collect();
            assert_eq!(w_q_gl3(&t).members, expect);
        }
    }

    #[test]
    fn general_path_agrees_with_tau_path_when_unramified_base() {
        let c = ctx(3, 1, 1, 2);
        for t in enumerate_types(c) {
            assert_eq!(w_obv_general(&t).members, w_obv_unramified(&t).members);
        }
        let c = ctx(3, 1, 1, 3);
        for t in enumerate_types(c).into_iter().take(12) {
            assert_eq!(w_obv_general(&t).members, w_obv_unramified(&t).members, "{t:?}");
        }
    }

    #[test]
    fn atlases_agree_with_direct_functions() {
        let c = ctx(5, 1, 1, 3);
        let obvious = obvious_atlas(c);
        let seeds = expl_seed_atlas(c);
        let empty = BTreeSet::new();
        for t in enumerate_types(c) {
            let direct = w_obv(&t);
            assert_eq!(obvious.get(&t).unwrap_or(&empty), &direct.members, "{t:?}");
            let via = w_expl_via_atlases(&t, &obvious, &seeds).unwrap();
            assert_eq!(via.members, w_expl(&t).unwrap().members, "{t:?}");
        }
    }

    #[test]
    fn generic_predictor_reduces_to_obvious_on_lowest_alcove_types() {
        let c = ctx(5, 1, 1, 3);
        let t = unramified3(c);
        let gen = w_q_generic(&t);
        // all obvious weights are included
        for m in &w_obv(&t).members {
            assert!(gen.members.contains(m));
        }
    }

    #[test]
    fn genericity_depth_of_spread_characters() {
        let c = ctx(11, 1, 1, 3);
        // ω^{a}⊕ω^{b}⊕ω^{c} matched by μ = (a−2, b−1, c) with gaps 2, 2:
        // pairings 3, 3, 6 → depth 3 at (6, 3, 0)
        let t = TameType::from_raw_pieces(
            c,
            vec![(1, 6u32.into()), (1, 3u32.into()), (1, 0u32.into())],
        );
        assert_eq!(genericity_depth(&t), 3);
        assert!(is_delta_generic(&t, 2));
        assert!(!is_delta_generic(&t, 3));
        let atlas = genericity_atlas(c);
        assert_eq!(atlas.get(&t), Some(&3));
    }

    #[test]
    fn adp_candidates_cover_obvious_cycle_witnesses() {
        let c = ctx(5, 1, 1, 3);
        // For every type, the cycle-based prediction contains every weight
        // that the τ-pair search witnesses with a full-cycle w and lowest
        // window μ; sanity-check against containment in the universe.
        let atlas = adp_atlas(c);
        for (t, ws) in &atlas {
            assert!(t.dim() == 3 && !ws.is_empty());
        }
        let t = unramified3(c);
        let members = adp_weights(&t).members;
        assert_eq!(atlas.get(&t), Some(&members));
        assert!(!members.is_empty());
    }

    #[test]
    fn shift_report_flags_missing_shifts() {
        let c = ctx(5, 1, 1, 3);
        let base = w(c, &[&[2, 2, 0]]);
        let shifted = base.shift_of(1).unwrap();
        let open = WeightSet { ctx: c, members: [base.clone()].into_iter().collect() };
        let rep = is_shift_closed(&open);
        assert!(!rep.closed);
        let closed = WeightSet { ctx: c, members: [base, shifted].into_iter().collect() };
        // the shifted weight itself has no legal shift at i0=1? it does:
        // entries stay equal after shifting, so the report only closes if
        // its own shift is present; just assert the original pair is flagged
        // present.
        let rep = is_shift_closed(&closed);
        assert!(rep.entries.iter().any(|e| e.present));
    }

    #[test]
    fn helper_combinatorics() {
        assert_eq!(integer_partitions(4).len(), 5);
        assert_eq!(set_partitions(3).len(), 5);
        assert_eq!(label_sequences(&[2, 1]).len(), 3);
        assert_eq!(full_cycles(3).len(), 2);
        assert_eq!(full_cycles(1), vec![vec![0]]);
    }

    #[test]
    fn dual_and_twist_equivariance_of_obvious_weights() {
        let c = ctx(5, 1, 1, 3);
        for t in enumerate_types(c).into_iter().take(40) {
            let d = t.dual();
            assert_eq!(
                w_obv(&d).members,
                w_obv(&t).members.iter().map(|m| m.dual_weight()).collect::<BTreeSet<_>>(),
                "dual failure {t:?}"
            );
            let tw = t.twist(2);
            assert_eq!(
                w_obv(&tw).members,
                w_obv(&t).members.iter().map(|m| m.twist(2)).collect::<BTreeSet<_>>(),
                "twist failure {t:?}"
            );
        }
    }
}
