//! Tame semisimple inertial parameters.
//!
//! A parameter is stored as a multiset of primitive niveau-`d` pieces. A
//! piece is the Frobenius orbit `{N, qN, q²N, …}` of an exponent class
//! `N mod q^d − 1` (with `q = p^f` the residue cardinality), kept as the
//! smallest non-negative orbit member. Primitivity means the orbit has full
//! size `d`; imprimitive inputs split into `d/d'` copies of a niveau-`d'`
//! piece along the geometric-sum relation.
//!
//! Construction from a pair `(w, μ)` — a tuple of permutations and an
//! integer matrix — follows the slot-permutation convention fixed by two
//! anchors: for `f = 1` a cycle `(c_0 … c_{d−1})` with `w(c_j) = c_{j+1}`
//! produces `N = Σ_j p^j μ_{c_j}`, and for `f > 1` trivial `w` produces the
//! character with exponent `Σ_j p^j μ_{σ_j}`.

use crate::context::Context;
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

/// A primitive niveau-`d` piece: the canonical orbit representative of an
/// exponent class mod `q^d − 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TamePiece {
    /// The niveau (dimension of the irreducible piece).
    pub niveau: u32,
    /// Smallest non-negative member of the orbit `{N·q^i mod q^d − 1}`.
    pub exponent: BigUint,
}

impl Serialize for TamePiece {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("TamePiece", 2)?;
        st.serialize_field("niveau", &self.niveau)?;
        // Exponents are plain JSON numbers whenever they fit; huge values
        // fall back to a decimal string.
        match u64::try_from(&self.exponent) {
            Ok(v) => st.serialize_field("exponent", &v)?,
            Err(_) => st.serialize_field("exponent", &self.exponent.to_string())?,
        }
        st.end()
    }
}

impl<'de> Deserialize<'de> for TamePiece {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Exp {
            Num(u64),
            Text(String),
        }
        #[derive(Deserialize)]
        struct Raw {
            niveau: u32,
            exponent: Exp,
        }
        let raw = Raw::deserialize(d)?;
        let exponent = match raw.exponent {
            Exp::Num(v) => BigUint::from(v),
            Exp::Text(t) => t
                .parse::<BigUint>()
                .map_err(|e| serde::de::Error::custom(format!("bad exponent: {e}")))?,
        };
        Ok(TamePiece { niveau: raw.niveau, exponent })
    }
}

/// A tame semisimple inertial parameter: a multiset of primitive pieces with
/// niveaux summing to `n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TameType {
    /// The arithmetic frame.
    pub ctx: Context,
    /// Sorted multiset of primitive canonical pieces.
    pub pieces: Vec<TamePiece>,
}

/// Non-negative representative of `a mod m`.
fn mod_big(a: &BigInt, m: &BigUint) -> BigUint {
    let m_int = BigInt::from(m.clone());
    a.mod_floor(&m_int).to_biguint().expect("mod_floor is non-negative")
}

/// The canonical (smallest) member of the `×q` orbit of `n mod m`, where
/// `m = q^d − 1`.
fn orbit_min(n: &BigUint, d: u32, q: &BigUint, m: &BigUint) -> BigUint {
    let mut best = n % m;
    let mut cur = best.clone();
    for _ in 1..d {
        cur = cur * q % m;
        if cur < best {
            best = cur.clone();
        }
    }
    best
}

/// Smallest proper divisor `d'` of `d` with `(q^{d'} − 1)·N ≡ 0 mod q^d − 1`,
/// if any (i.e. the piece is imprimitive).
fn minimal_splitting_divisor(n: &BigUint, d: u32, q: &BigUint, m: &BigUint) -> Option<u32> {
    (1..d)
        .filter(|dp| d % dp == 0)
        .find(|&dp| (n * (q.pow(dp) - 1u32)) % m == BigUint::zero())
}

/// Walks the slot-permutation orbit of `(0, i0)` under
/// `(j, i) ↦ ((j+1) mod f, w_j(i))`, accumulating `Σ p^k μ_{slot_k}` and
/// marking visited slots. Returns `(orbit length, accumulated exponent)`.
fn walk_orbit(
    w: &[Vec<usize>],
    mu: &[Vec<i64>],
    ctx: Context,
    i0: usize,
    seen: &mut [bool],
) -> (u32, BigInt) {
    let (f, n) = (ctx.f as usize, ctx.n as usize);
    let p = BigInt::from(ctx.p);
    let (mut j, mut i) = (0usize, i0);
    let mut len = 0u32;
    let mut acc = BigInt::zero();
    let mut pk = BigInt::from(1u32);
    loop {
        seen[j * n + i] = true;
        acc += &pk * mu[j][i];
        pk *= &p;
        len += 1;
        let next = ((j + 1) % f, w[j][i]);
        j = next.0;
        i = next.1;
        if j == 0 && i == i0 {
            break;
        }
    }
    (len, acc)
}

impl TameType {
    /// Builds a canonical type from raw `(niveau, exponent)` pairs: reduces
    /// exponents, splits imprimitive pieces, canonicalizes orbits, sorts.
    pub fn from_raw_pieces(ctx: Context, raw: Vec<(u32, BigUint)>) -> TameType {
        let q = ctx.q();
        let mut pieces = Vec::new();
        let mut stack = raw;
        while let Some((d, n)) = stack.pop() {
            let m = ctx.qd_minus_1(d);
            let n = n % &m;
            match minimal_splitting_divisor(&n, d, &q, &m) {
                Some(dp) => {
                    // n = n' · (q^d − 1)/(q^{d'} − 1) exactly; the piece is
                    // d/d' copies of the primitive niveau-d' piece at n'.
                    let ratio = &m / ctx.qd_minus_1(dp);
                    let np = &n / &ratio;
                    for _ in 0..d / dp {
                        stack.push((dp, np.clone()));
                    }
                }
                None => pieces.push(TamePiece { niveau: d, exponent: orbit_min(&n, d, &q, &m) }),
            }
        }
        pieces.sort();
        TameType { ctx, pieces }
    }

    /// Builds the type `τ(w, μ)` from per-embedding permutations
    /// `w = (w_0, …, w_{f−1})` (each a permutation of `{0, …, n−1}` given as
    /// the image table `i ↦ w[i]`) and an `f×n` integer matrix `μ`.
    pub fn from_pair(w: &[Vec<usize>], mu: &[Vec<i64>], ctx: Context) -> TameType {
        let (f, n) = (ctx.f as usize, ctx.n as usize);
        assert_eq!(w.len(), f, "need one permutation per residue embedding");
        assert_eq!(mu.len(), f, "μ must have f rows");
        debug_assert!(w.iter().all(|p| is_permutation(p, n)));
        let mut seen = vec![false; f * n];
        let mut raw = Vec::new();
        for i0 in 0..n {
            if seen[i0] {
                continue;
            }
            let (len, acc) = walk_orbit(w, mu, ctx, i0, &mut seen);
            debug_assert_eq!(len % ctx.f, 0);
            let d = len / ctx.f;
            raw.push((d, mod_big(&acc, &ctx.qd_minus_1(d))));
        }
        TameType::from_raw_pieces(ctx, raw)
    }

    /// Whether the pair `(w, μ)` is *good*: every slot orbit yields a
    /// primitive piece (no splitting), i.e. the niveaux of `τ(w,μ)` match the
    /// orbit lengths of `w`.
    pub fn is_good(w: &[Vec<usize>], mu: &[Vec<i64>], ctx: Context) -> bool {
        let (f, n) = (ctx.f as usize, ctx.n as usize);
        let q = ctx.q();
        let mut seen = vec![false; f * n];
        for i0 in 0..n {
            if seen[i0] {
                continue;
            }
            let (len, acc) = walk_orbit(w, mu, ctx, i0, &mut seen);
            let d = len / ctx.f;
            let m = ctx.qd_minus_1(d);
            if minimal_splitting_divisor(&mod_big(&acc, &m), d, &q, &m).is_some() {
                return false;
            }
        }
        true
    }

    /// Structural equality of canonical forms.
    pub fn equivalent(&self, other: &TameType) -> bool {
        self == other
    }

    /// The dual parameter: every exponent negated.
    pub fn dual(&self) -> TameType {
        let raw = self
            .pieces
            .iter()
            .map(|pc| {
                let m = self.ctx.qd_minus_1(pc.niveau);
                let neg = mod_big(&-BigInt::from(pc.exponent.clone()), &m);
                (pc.niveau, neg)
            })
            .collect();
        TameType::from_raw_pieces(self.ctx, raw)
    }

    /// Twist by the `c`-th power of the determinant-style character: adds
    /// `c·(1 + q + … + q^{d−1})` to each niveau-`d` exponent.
    pub fn twist(&self, c: i64) -> TameType {
        let q = BigInt::from(self.ctx.q());
        let raw = self
            .pieces
            .iter()
            .map(|pc| {
                let m = self.ctx.qd_minus_1(pc.niveau);
                let mut geom = BigInt::zero();
                let mut qi = BigInt::from(1u32);
                for _ in 0..pc.niveau {
                    geom += &qi;
                    qi *= &q;
                }
                let e = BigInt::from(pc.exponent.clone()) + geom * c;
                (pc.niveau, mod_big(&e, &m))
            })
            .collect();
        TameType::from_raw_pieces(self.ctx, raw)
    }

    /// Total dimension `Σ d` over the pieces.
    pub fn dim(&self) -> u32 {
        self.pieces.iter().map(|p| p.niveau).sum()
    }

    /// The direct sum of two parameters over the same field data; the
    /// dimension is the sum of dimensions.
    pub fn direct_sum(&self, other: &TameType) -> TameType {
        assert_eq!((self.ctx.p, self.ctx.f, self.ctx.e), (other.ctx.p, other.ctx.f, other.ctx.e));
        let ctx = self.ctx.with_n(self.dim() + other.dim());
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        pieces.sort();
        TameType { ctx, pieces }
    }

    /// The sub-parameter consisting of the selected piece indices.
    pub fn sub_type(&self, idxs: &[usize]) -> TameType {
        let mut pieces: Vec<TamePiece> = idxs.iter().map(|&i| self.pieces[i].clone()).collect();
        let n: u32 = pieces.iter().map(|p| p.niveau).sum();
        pieces.sort();
        TameType { ctx: self.ctx.with_n(n), pieces }
    }
}

/// The reduction of a crystalline character of `K` with labelled Hodge–Tate
/// weights `Λ` (one integer per embedding, column `σ·e + j`): returns the
/// exponent tuple `b_σ = Σ_{κ above σ} λ_κ` of `∏ ω_σ^{b_σ}`.
pub fn reduce_crystalline_character(lambda: &[i64], ctx: Context) -> Vec<i64> {
    let (f, e) = (ctx.f as usize, ctx.e as usize);
    assert_eq!(lambda.len(), f * e);
    (0..f)
        .map(|sigma| lambda[sigma * e..(sigma + 1) * e].iter().sum())
        .collect()
}

/// The tame type of the induction to `K` of a crystalline character of the
/// unramified degree-`d` extension `K_d`, with labelled Hodge–Tate weights
/// `Λ` (one integer per embedding of `K_d`, index `s·e + j` for the residue
/// embedding `σ'_s` of `k_d`, `s ∈ 0..fd`, ordered so `σ'_{s+1} = (σ'_s)^p`).
///
/// The result is a (possibly split) dimension-`d` parameter over `K`.
pub fn reduce_induced(lambda: &[i64], d: u32, ctx: Context) -> TameType {
    let (f, e) = (ctx.f as usize, ctx.e as usize);
    let fd = f * d as usize;
    assert_eq!(lambda.len(), fd * e);
    let p = BigInt::from(ctx.p);
    let mut acc = BigInt::zero();
    let mut pk = BigInt::from(1u32);
    for s in 0..fd {
        let b: i64 = lambda[s * e..(s + 1) * e].iter().sum();
        acc += &pk * b;
        pk *= &p;
    }
    let m = ctx.qd_minus_1(d);
    TameType::from_raw_pieces(ctx.with_n(d), vec![(d, mod_big(&acc, &m))])
}

fn is_permutation(p: &[usize], n: usize) -> bool {
    if p.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    p.iter().all(|&v| v < n && !std::mem::replace(&mut seen[v], true))
}

/// All permutations of `{0, …, n−1}` as image tables.
/// All canonical tame semisimple parameters for the given context: every
/// multiset of primitive canonical pieces whose niveaux sum to `n`.
pub fn enumerate_types(ctx: Context) -> Vec<TameType> {
    let q = ctx.q();
    let n = ctx.n;
    // Canonical primitive pieces for each niveau d ≤ n.
    let mut by_niveau: Vec<Vec<TamePiece>> = Vec::new();
    for d in 1..=n {
        let m = ctx.qd_minus_1(d);
        let mut list = Vec::new();
        let mut exp = BigUint::zero();
        while exp < m {
            if orbit_min(&exp, d, &q, &m) == exp
                && minimal_splitting_divisor(&exp, d, &q, &m).is_none()
            {
                list.push(TamePiece { niveau: d, exponent: exp.clone() });
            }
            exp += 1u32;
        }
        by_niveau.push(list);
    }
    // Non-decreasing piece sequences summing to n.
    let mut out = Vec::new();
    let mut current: Vec<TamePiece> = Vec::new();
    fn go(
        remaining: u32,
        by_niveau: &[Vec<TamePiece>],
        current: &mut Vec<TamePiece>,
        ctx: Context,
        out: &mut Vec<TameType>,
    ) {
        if remaining == 0 {
            out.push(TameType { ctx, pieces: current.clone() });
            return;
        }
        for d in 1..=remaining {
            for piece in &by_niveau[d as usize - 1] {
                if let Some(last) = current.last() {
                    if piece < last {
                        continue;
                    }
                }
                current.push(piece.clone());
                go(remaining - d, by_niveau, current, ctx, out);
                current.pop();
            }
        }
    }
    go(n, &by_niveau, &mut current, ctx, &mut out);
    out
}

pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..n).collect();
    permute(&mut items, 0, &mut out);
    out
}

fn permute(items: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
    if k == items.len() {
        out.push(items.clone());
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permute(items, k + 1, out);
        items.swap(k, i);
    }
}

/// All `f`-tuples of permutations of `{0, …, n−1}` (the group `S_n^f`).
pub fn all_permutation_tuples(n: usize, f: usize) -> Vec<Vec<Vec<usize>>> {
    let singles = all_permutations(n);
    let mut out: Vec<Vec<Vec<usize>>> = vec![Vec::new()];
    for _ in 0..f {
        out = out
            .into_iter()
            .flat_map(|t| {
                singles.iter().map(move |s| {
                    let mut t2 = t.clone();
                    t2.push(s.clone());
                    t2
                })
            })
            .collect();
    }
    out
}
