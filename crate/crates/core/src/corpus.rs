//! Frozen worked instances used as ground truth for the weight-set
//! predictors: the irregular-weight tables for `GL_3` over `Q_p`, the
//! classification of obscure weights in that setting, closure partners of
//! niveau-one parameters, the unramified fixture, shift-closure behaviour,
//! the ramified obscure-weight family, and the classical rank-two recipe.
//!
//! Every verifier sweeps its whole parameter range at a given prime and
//! reports each instance checked, so a passing [`CorpusReport`] is an
//! exhaustive confirmation rather than a spot check.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::Serialize;

use crate::context::Context;
use crate::jordan_holder::JhError;
use crate::tame_types::{enumerate_types, TameType};
use crate::weight_lattice::{enumerate_all, SerreWeight};
use crate::weight_sets::{
    closure_c, is_shift_closed, w_expl_cached, w_obv, w_q_gl3, WeightSet,
};

/// Outcome of one sweep: how many instances were checked and which (if any)
/// disagreed with the frozen expectation.
#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    /// Which sweep this report covers.
    pub label: String,
    /// Number of instances compared.
    pub checked: usize,
    /// Human-readable descriptions of every disagreement.
    pub mismatches: Vec<String>,
}

impl CorpusReport {
    fn new(label: impl Into<String>) -> CorpusReport {
        CorpusReport { label: label.into(), checked: 0, mismatches: Vec::new() }
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.mismatches.push(msg());
        }
    }

    /// True when every checked instance agreed.
    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty()
    }
}

impl fmt::Display for CorpusReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_clean() {
            write!(f, "{}: {} instances ok", self.label, self.checked)
        } else {
            write!(
                f,
                "{}: {} mismatches out of {} instances; first: {}",
                self.label,
                self.mismatches.len(),
                self.checked,
                self.mismatches[0]
            )
        }
    }
}

// ---------------------------------------------------------------------------
// The irregular-weight tables for GL_3 over Q_p.
// ---------------------------------------------------------------------------

/// Shape of a three-dimensional tame parameter over `Q_p` in normal form,
/// keyed by the permutation pairing the parameter with a triple `(a, b, c)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum ShapeCase {
    /// Identity pairing: a sum of three characters.
    I,
    /// Transposition of the lower two slots: a character plus a niveau-two
    /// piece.
    II,
    /// A three-cycle: an irreducible niveau-three parameter.
    III,
}

impl ShapeCase {
    fn parse(s: &str) -> Option<ShapeCase> {
        match s {
            "i" => Some(ShapeCase::I),
            "ii" => Some(ShapeCase::II),
            "iii" => Some(ShapeCase::III),
            _ => None,
        }
    }

    /// The pairing permutation as a zero-indexed image vector.
    pub fn permutation(self) -> Vec<usize> {
        match self {
            ShapeCase::I => vec![0, 1, 2],
            ShapeCase::II => vec![0, 2, 1],
            ShapeCase::III => vec![1, 2, 0],
        }
    }
}

impl fmt::Display for ShapeCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShapeCase::I => write!(f, "i"),
            ShapeCase::II => write!(f, "ii"),
            ShapeCase::III => write!(f, "iii"),
        }
    }
}

/// An integer-linear expression in `a`, `b`, `c`, `p`.
#[derive(Clone, Copy, Debug, Default)]
struct LinExpr {
    a: i64,
    b: i64,
    c: i64,
    p: i64,
    k: i64,
}

impl LinExpr {
    fn eval(&self, a: i64, b: i64, c: i64, p: i64) -> i64 {
        self.a * a + self.b * b + self.c * c + self.p * p + self.k
    }
}

#[derive(Clone, Copy, Debug)]
enum RelOp {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

#[derive(Clone, Debug)]
struct Condition {
    lhs: LinExpr,
    op: RelOp,
    rhs: LinExpr,
}

impl Condition {
    fn holds(&self, a: i64, b: i64, c: i64, p: i64) -> bool {
        let l = self.lhs.eval(a, b, c, p);
        let r = self.rhs.eval(a, b, c, p);
        match self.op {
            RelOp::Eq => l == r,
            RelOp::Ne => l != r,
            RelOp::Le => l <= r,
            RelOp::Ge => l >= r,
            RelOp::Lt => l < r,
            RelOp::Gt => l > r,
        }
    }
}

#[derive(Clone, Debug)]
struct TableRow {
    case: ShapeCase,
    conds: Vec<Condition>,
    mu: [LinExpr; 3],
}

/// The parsed irregular-weight tables, with the normal-form domain of each
/// shape.
#[derive(Clone, Debug)]
pub struct IrregularTables {
    domains: HashMap<ShapeCase, Vec<Condition>>,
    rows: Vec<TableRow>,
}

fn parse_expr(s: &str) -> Result<LinExpr, String> {
    let cleaned: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        return Err(format!("empty expression in `{s}`"));
    }
    let bytes = cleaned.as_bytes();
    let mut e = LinExpr::default();
    let mut i = 0usize;
    while i < bytes.len() {
        let mut sign = 1i64;
        match bytes[i] {
            b'+' => i += 1,
            b'-' => {
                sign = -1;
                i += 1;
            }
            _ => {}
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let coeff: Option<i64> = if i > start {
            Some(cleaned[start..i].parse().map_err(|_| format!("bad number in `{s}`"))?)
        } else {
            None
        };
        let var = if i < bytes.len() && matches!(bytes[i], b'a' | b'b' | b'c' | b'p') {
            let v = bytes[i];
            i += 1;
            Some(v)
        } else {
            None
        };
        match (coeff, var) {
            (c0, Some(v)) => {
                let k = sign * c0.unwrap_or(1);
                match v {
                    b'a' => e.a += k,
                    b'b' => e.b += k,
                    b'c' => e.c += k,
                    _ => e.p += k,
                }
            }
            (Some(c0), None) => e.k += sign * c0,
            (None, None) => return Err(format!("cannot parse term in `{s}`")),
        }
    }
    Ok(e)
}

fn parse_condition(s: &str) -> Result<Condition, String> {
    for (tok, op) in [
        ("!=", RelOp::Ne),
        ("<=", RelOp::Le),
        (">=", RelOp::Ge),
        ("<", RelOp::Lt),
        (">", RelOp::Gt),
        ("=", RelOp::Eq),
    ] {
        if let Some(pos) = s.find(tok) {
            let lhs = parse_expr(&s[..pos])?;
            let rhs = parse_expr(&s[pos + tok.len()..])?;
            return Ok(Condition { lhs, op, rhs });
        }
    }
    Err(format!("no relation in `{s}`"))
}

fn parse_conditions(s: &str) -> Result<Vec<Condition>, String> {
    s.split(',').map(parse_condition).collect()
}

impl IrregularTables {
    /// Parses the structured-text table format described in the data file
    /// header.
    pub fn parse(text: &str) -> Result<IrregularTables, String> {
        let mut domains = HashMap::new();
        let mut rows = Vec::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |m: String| format!("line {}: {m}", no + 1);
            let parts: Vec<&str> = line.split('|').map(str::trim).collect();
            if let Some(rest) = parts[0].strip_prefix("domain ") {
                if parts.len() != 2 {
                    return Err(err("domain record needs one condition column".into()));
                }
                let case = ShapeCase::parse(rest.trim())
                    .ok_or_else(|| err(format!("unknown case `{rest}`")))?;
                domains.insert(case, parse_conditions(parts[1]).map_err(err)?);
            } else {
                if parts.len() != 3 {
                    return Err(err("table record needs three columns".into()));
                }
                let case = ShapeCase::parse(parts[0])
                    .ok_or_else(|| err(format!("unknown case `{}`", parts[0])))?;
                let conds = parse_conditions(parts[1]).map_err(&err)?;
                let inner = parts[2]
                    .strip_prefix('(')
                    .and_then(|s| s.strip_suffix(')'))
                    .ok_or_else(|| err(format!("mu `{}` is not parenthesized", parts[2])))?;
                let entries: Vec<LinExpr> = inner
                    .split(',')
                    .map(parse_expr)
                    .collect::<Result<_, _>>()
                    .map_err(err)?;
                let mu: [LinExpr; 3] = entries
                    .try_into()
                    .map_err(|_| format!("line {}: mu must have three entries", no + 1))?;
                rows.push(TableRow { case, conds, mu });
            }
        }
        for case in [ShapeCase::I, ShapeCase::II, ShapeCase::III] {
            if !domains.contains_key(&case) {
                return Err(format!("missing domain record for case {case}"));
            }
        }
        Ok(IrregularTables { domains, rows })
    }

    /// The tables shipped with the crate.
    pub fn builtin() -> IrregularTables {
        IrregularTables::parse(include_str!("../corpus/gl3_irregular_tables.txt"))
            .expect("embedded tables parse")
    }

    /// Whether `(a, b, c)` lies in the normal-form domain of `case`.
    pub fn in_domain(&self, case: ShapeCase, a: i64, b: i64, c: i64, p: i64) -> bool {
        self.domains[&case].iter().all(|cond| cond.holds(a, b, c, p))
    }

    /// The expected irregular members of the explicit set for the parameter
    /// of shape `case` at `(a, b, c)`.
    pub fn expected_irregular(
        &self,
        case: ShapeCase,
        a: i64,
        b: i64,
        c: i64,
        ctx: Context,
    ) -> Result<BTreeSet<SerreWeight>, String> {
        let p = ctx.p as i64;
        let mut out = BTreeSet::new();
        for row in self.rows.iter().filter(|r| r.case == case) {
            if !row.conds.iter().all(|cond| cond.holds(a, b, c, p)) {
                continue;
            }
            let mu: Vec<i64> = row.mu.iter().map(|e| e.eval(a, b, c, p)).collect();
            let rows = [vec![mu[0] - 2, mu[1] - 1, mu[2]]];
            let w = SerreWeight::canonicalize(&rows, ctx).map_err(|e| {
                format!("case {case} ({a},{b},{c}): invalid table weight {mu:?}: {e}")
            })?;
            out.insert(w);
        }
        Ok(out)
    }
}

// ---------------------------------------------------------------------------
// Shared helpers.
// ---------------------------------------------------------------------------

fn gl3_ctx(p: u64) -> Context {
    Context { p, f: 1, e: 1, n: 3 }
}

fn weight(ctx: Context, row: &[i64]) -> SerreWeight {
    SerreWeight::canonicalize(&[row.to_vec()], ctx).expect("fixture weight is valid")
}

fn chars(ctx: Context, exps: &[i64]) -> TameType {
    let m = ctx.pf_minus_1_i64();
    TameType::from_raw_pieces(
        ctx,
        exps.iter().map(|&x| (1, BigUint::from(x.rem_euclid(m) as u64))).collect(),
    )
}

fn niveau3(ctx: Context, exp: i64) -> TameType {
    let p = ctx.p as i64;
    let m = p * p * p - 1;
    TameType::from_raw_pieces(ctx, vec![(3, BigUint::from(exp.rem_euclid(m) as u64))])
}

fn irregular_members(set: &WeightSet) -> BTreeSet<SerreWeight> {
    set.members.iter().filter(|w| !w.is_regular()).cloned().collect()
}

fn set_diff(label: &str, actual: &BTreeSet<SerreWeight>, expected: &BTreeSet<SerreWeight>) -> String {
    let missing: Vec<_> = expected.difference(actual).map(|w| format!("{:?}", w.rows)).collect();
    let extra: Vec<_> = actual.difference(expected).map(|w| format!("{:?}", w.rows)).collect();
    format!("{label}: missing {missing:?}, unexpected {extra:?}")
}

/// All normal-form triples `(a, b, c)` with `c` sweeping one twist period.
fn sweep_triples(p: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    for c in 0..=(p - 2) {
        for g2 in 0..=p {
            for g1 in 0..=(p - g2) {
                out.push((c + g1 + g2, c + g2, c));
            }
        }
    }
    out
}

fn is_genuine_niveau3(t: &TameType) -> bool {
    t.pieces.len() == 1 && t.pieces[0].niveau == 3
}

// ---------------------------------------------------------------------------
// Verifiers.
// ---------------------------------------------------------------------------

/// Sweeps the irregular-weight tables for all three shapes at the prime `p`,
/// plus the duality description of the fourth shape. For the irreducible
/// shape the comparison sets aside weight shifts of members, which the table
/// deliberately omits.
pub fn verify_irregular_tables(p: u64) -> Result<Vec<CorpusReport>, JhError> {
    let tables = IrregularTables::builtin();
    let ctx = gl3_ctx(p);
    let pi = p as i64;
    let mut memo = HashMap::new();
    let mut reports = Vec::new();

    for case in [ShapeCase::I, ShapeCase::II, ShapeCase::III] {
        let mut rep = CorpusReport::new(format!("irregular-table-{case}"));
        for (a, b, c) in sweep_triples(pi) {
            if !tables.in_domain(case, a, b, c, pi) {
                continue;
            }
            let t = TameType::from_pair(&[case.permutation()], &[vec![a, b, c]], ctx);
            if case == ShapeCase::III && !is_genuine_niveau3(&t) {
                // The parameter degenerates to lower niveau and is covered
                // by the other shapes.
                continue;
            }
            let expected = match tables.expected_irregular(case, a, b, c, ctx) {
                Ok(set) => set,
                Err(msg) => {
                    rep.check(false, || msg);
                    continue;
                }
            };
            let expl = w_expl_cached(&t, &mut memo)?;
            let mut actual = irregular_members(&expl);
            if case == ShapeCase::III {
                for m in &expl.members {
                    for i0 in 1..3 {
                        if let Ok(s) = m.shift_of(i0) {
                            if !expected.contains(&s) {
                                actual.remove(&s);
                            }
                        }
                    }
                }
            }
            rep.check(actual == expected, || {
                set_diff(&format!("case {case} ({a},{b},{c})"), &actual, &expected)
            });
        }
        reports.push(rep);
    }

    // Fourth shape: its irregular explicit weights are the duals of those of
    // the corresponding third-shape parameter.
    let mut rep = CorpusReport::new("irregular-table-iv-duality");
    for (a, b, c) in sweep_triples(pi) {
        if !tables.in_domain(ShapeCase::III, a, b, c, pi) {
            continue;
        }
        let t3 = TameType::from_pair(&[ShapeCase::III.permutation()], &[vec![a, b, c]], ctx);
        if !is_genuine_niveau3(&t3) {
            continue;
        }
        let from_t3 = irregular_members(&w_expl_cached(&t3, &mut memo)?);
        let expected: BTreeSet<SerreWeight> =
            from_t3.iter().map(SerreWeight::dual_weight).collect();
        let t4 = t3.dual();
        let actual = irregular_members(&w_expl_cached(&t4, &mut memo)?);
        rep.check(actual == expected, || {
            set_diff(&format!("dual of case iii ({a},{b},{c})"), &actual, &expected)
        });
    }
    reports.push(rep);

    Ok(reports)
}

/// Sums of three spread-out characters: six obvious weights, exactly three
/// shadow partners under closure, and no obscure weights.
pub fn verify_niveau_one_closure(p: u64) -> Result<CorpusReport, JhError> {
    let ctx = gl3_ctx(p);
    let pi = p as i64;
    let mut rep = CorpusReport::new("niveau-one-closure");
    let mut memo = HashMap::new();
    for cc in 0..=(pi - 2) {
        for g2 in 2..=(pi - 5) {
            for g1 in 2..=(pi - 3 - g2) {
                let (a, b) = (cc + g1 + g2, cc + g2);
                let t = chars(ctx, &[a, b, cc]);
                let obvious: BTreeSet<SerreWeight> = [
                    weight(ctx, &[a - 2, b - 1, cc]),
                    weight(ctx, &[b - 2, cc - 1, a - pi + 1]),
                    weight(ctx, &[cc + pi - 3, a - 1, b]),
                    weight(ctx, &[cc + pi - 3, b - 1, a - pi + 1]),
                    weight(ctx, &[a - 2, cc - 1, b - pi + 1]),
                    weight(ctx, &[b + pi - 3, a - 1, cc]),
                ]
                .into_iter()
                .collect();
                let shadows: BTreeSet<SerreWeight> = [
                    weight(ctx, &[cc + pi - 2, b - 1, a - pi]),
                    weight(ctx, &[a - 1, cc - 1, b - pi]),
                    weight(ctx, &[b + pi - 2, a - 1, cc - 1]),
                ]
                .into_iter()
                .collect();
                let full: BTreeSet<SerreWeight> =
                    obvious.union(&shadows).cloned().collect();

                let got_obv = w_obv(&t);
                rep.check(got_obv.members == obvious, || {
                    set_diff(&format!("obvious ({a},{b},{cc})"), &got_obv.members, &obvious)
                });
                let got_cl = closure_c(&got_obv)?;
                rep.check(got_cl.members == full, || {
                    set_diff(&format!("closure ({a},{b},{cc})"), &got_cl.members, &full)
                });
                let got_expl = w_expl_cached(&t, &mut memo)?;
                rep.check(got_expl.members == full, || {
                    set_diff(&format!("explicit ({a},{b},{cc})"), &got_expl.members, &full)
                });
            }
        }
    }
    Ok(rep)
}

/// The parameter of an unramified representation: its obvious, explicit, and
/// exact weight sets in closed form.
pub fn verify_unramified(p: u64) -> Result<CorpusReport, JhError> {
    let ctx = gl3_ctx(p);
    let pi = p as i64;
    let mut rep = CorpusReport::new("unramified-parameter");
    let t = chars(ctx, &[0, 0, 0]);
    let obvious = w_obv(&t);
    let explicit = w_expl_cached(&t, &mut HashMap::new())?;
    if p == 2 {
        // Every weight in the (four-element) universe occurs.
        let all: BTreeSet<SerreWeight> = enumerate_all(ctx).collect();
        rep.check(obvious.members == all, || {
            set_diff("obvious at p=2", &obvious.members, &all)
        });
        rep.check(explicit.members == all, || {
            set_diff("explicit at p=2", &explicit.members, &all)
        });
        return Ok(rep);
    }
    let expect_obv: BTreeSet<SerreWeight> = [
        weight(ctx, &[pi - 3, -1, -pi + 1]),
        weight(ctx, &[pi - 2, -1, -1]),
        weight(ctx, &[pi - 2, pi - 2, -1]),
    ]
    .into_iter()
    .collect();
    let mut expect_expl = expect_obv.clone();
    expect_expl.insert(weight(ctx, &[pi - 2, -1, -pi]));
    rep.check(obvious.members == expect_obv, || {
        set_diff("obvious", &obvious.members, &expect_obv)
    });
    rep.check(explicit.members == expect_expl, || {
        set_diff("explicit", &explicit.members, &expect_expl)
    });
    if p >= 5 {
        let expect_exact: BTreeSet<SerreWeight> =
            [weight(ctx, &[pi - 3, -1, -pi + 1])].into_iter().collect();
        let exact = w_q_gl3(&t);
        rep.check(exact.members == expect_exact, || {
            set_diff("exact", &exact.members, &expect_exact)
        });
        let reg = explicit.regular_part();
        rep.check(reg.members == expect_exact, || {
            set_diff("regular explicit", &reg.members, &expect_exact)
        });
    }
    Ok(rep)
}

/// Closure of a single weight: it gains exactly its partner with reversed,
/// reflected outer entries when the outer gap is at most `p − 3`, and
/// nothing otherwise.
pub fn verify_closure_partners(p: u64) -> Result<CorpusReport, JhError> {
    let ctx = gl3_ctx(p);
    let pi = p as i64;
    let mut rep = CorpusReport::new("closure-partners");
    for a in enumerate_all(ctx) {
        let (x, y, z) = (a.rows[0][0], a.rows[0][1], a.rows[0][2]);
        let mut expected: BTreeSet<SerreWeight> = [a.clone()].into_iter().collect();
        if x - z <= pi - 3 {
            expected.insert(weight(ctx, &[z + pi - 2, y, x - pi + 2]));
        }
        let single = WeightSet::from_members(ctx, [a.clone()].into_iter().collect());
        let cl = closure_c(&single)?;
        rep.check(cl.members == expected, || {
            set_diff(&format!("closure of {:?}", a.rows), &cl.members, &expected)
        });
    }
    Ok(rep)
}

/// The complete classification of obscure weights over `Q_p` in dimension
/// three: every obscure weight is irregular and attaches to one of four
/// parameter families, and no other parameter has any obscure weight.
pub fn verify_obscure_classification(p: u64) -> Result<CorpusReport, JhError> {
    let ctx = gl3_ctx(p);
    let pi = p as i64;
    let mut rep = CorpusReport::new("obscure-classification");

    let mut predicted: HashMap<TameType, BTreeSet<SerreWeight>> = HashMap::new();
    let mut predict = |t: TameType, w: &SerreWeight| {
        predicted.entry(t).or_default().insert(w.clone());
    };
    for w in enumerate_all(ctx) {
        let (r0, r1, r2) = (w.rows[0][0], w.rows[0][1], w.rows[0][2]);
        if r0 - r1 == pi - 1 {
            let (y, z) = (r1, r2);
            if p > 2 && y - z != 0 && y - z != pi - 2 {
                predict(chars(ctx, &[y + 1, y + 1, z + 1]), &w);
            }
            if y - z != pi - 2 && y - z != pi - 1 {
                let t = TameType::from_raw_pieces(
                    ctx,
                    vec![
                        (1, BigUint::from(((y + 1).rem_euclid(pi - 1)) as u64)),
                        (2, BigUint::from(((y + 2 + pi * z).rem_euclid(pi * pi - 1)) as u64)),
                    ],
                );
                if t.pieces.iter().any(|pc| pc.niveau == 2) {
                    predict(t, &w);
                }
            }
        }
        if r1 - r2 == pi - 1 {
            let (x, y) = (r0, r1);
            if p > 2 && x - y != 0 && x - y != pi - 2 {
                predict(chars(ctx, &[x + 1, y + 1, y + 1]), &w);
            }
            if x - y != pi - 2 && x - y != pi - 1 {
                let t = TameType::from_raw_pieces(
                    ctx,
                    vec![
                        (1, BigUint::from(((y + 1).rem_euclid(pi - 1)) as u64)),
                        (2, BigUint::from(((x + 2 + pi * y).rem_euclid(pi * pi - 1)) as u64)),
                    ],
                );
                if t.pieces.iter().any(|pc| pc.niveau == 2) {
                    predict(t, &w);
                }
            }
        }
    }

    let mut memo = HashMap::new();
    let empty = BTreeSet::new();
    for t in enumerate_types(ctx) {
        let expl = w_expl_cached(&t, &mut memo)?;
        let cl = closure_c(&w_obv(&t))?;
        let obscure: BTreeSet<SerreWeight> =
            expl.members.difference(&cl.members).cloned().collect();
        let expected = predicted.remove(&t);
        let expected = expected.as_ref().unwrap_or(&empty);
        rep.check(&obscure == expected, || {
            set_diff(&format!("obscure for {:?}", t.pieces), &obscure, expected)
        });
    }
    // Every predicted family member must correspond to an enumerated
    // parameter; anything left over means the prediction map used a
    // non-canonical key.
    rep.check(predicted.is_empty(), || {
        format!("unmatched predicted parameters: {:?}", predicted.keys().collect::<Vec<_>>())
    });
    Ok(rep)
}

/// Shift closure over `Q_p` in dimension three: reducible parameters have
/// shift-closed explicit sets, and for irreducible parameters exactly two
/// parametrized families of shifts are missing.
pub fn verify_shift_reports(p: u64) -> Result<CorpusReport, JhError> {
    let ctx = gl3_ctx(p);
    let pi = p as i64;
    let mut rep = CorpusReport::new("shift-reports");
    let mut memo = HashMap::new();

    // Direct fixtures for the two missing-shift families.
    for z in 0..=(pi - 2) {
        for g in 0..=(pi - 2) {
            let y = z + g;
            let t = niveau3(ctx, (y + 2) + pi * (y + 1) + pi * pi * z);
            let expl = w_expl_cached(&t, &mut memo)?;
            let inside = weight(ctx, &[y, y, z]);
            let outside = weight(ctx, &[y + pi - 1, y, z]);
            rep.check(expl.contains(&inside), || {
                format!("({y},{y},{z}) missing from explicit set of its family parameter")
            });
            rep.check(!expl.contains(&outside), || {
                format!("shift of ({y},{y},{z}) unexpectedly present")
            });

            let yy = z;
            let x2 = yy + g;
            let t2 = niveau3(ctx, yy + pi * (yy + 1) + pi * pi * (x2 + 2));
            let expl2 = w_expl_cached(&t2, &mut memo)?;
            let inside2 = weight(ctx, &[x2, yy, yy]);
            let outside2 = weight(ctx, &[x2, yy, yy - pi + 1]);
            rep.check(expl2.contains(&inside2), || {
                format!("({x2},{yy},{yy}) missing from explicit set of its family parameter")
            });
            rep.check(!expl2.contains(&outside2), || {
                format!("shift of ({x2},{yy},{yy}) unexpectedly present")
            });
        }
    }

    // Exhaustive shift reports.
    for t in enumerate_types(ctx) {
        let expl = w_expl_cached(&t, &mut memo)?;
        let report = is_shift_closed(&expl);
        if t.pieces.len() > 1 {
            rep.check(report.closed, || {
                format!("reducible parameter {:?} is not shift-closed", t.pieces)
            });
            continue;
        }
        for entry in &report.entries {
            let r = &entry.member.rows[0];
            let missing = match entry.i0 {
                1 => {
                    let (y, z) = (r[0], r[2]);
                    r[0] == r[1]
                        && y - z <= pi - 2
                        && t == niveau3(ctx, (y + 2) + pi * (y + 1) + pi * pi * z)
                }
                2 => {
                    let (x, y) = (r[0], r[1]);
                    r[1] == r[2]
                        && x - y <= pi - 2
                        && t == niveau3(ctx, y + pi * (y + 1) + pi * pi * (x + 2))
                }
                _ => false,
            };
            rep.check(entry.present == !missing, || {
                format!(
                    "parameter {:?}, member {:?}, i0={}: present={}, expected {}",
                    t.pieces, entry.member.rows, entry.i0, entry.present, !missing
                )
            });
        }
    }
    Ok(rep)
}

/// The ramified-quadratic family of obscure weights: for spread characters
/// over a ramified quadratic field, the lowest-alcove weight matching the
/// exponents is explicit but not in the closure of the obvious set.
pub fn verify_ramified_obscure(p: u64) -> Result<CorpusReport, JhError> {
    let ctx = Context { p, f: 1, e: 2, n: 3 };
    let pi = p as i64;
    let mut rep = CorpusReport::new("ramified-obscure");
    let mut memo = HashMap::new();
    for cc in 0..=(pi - 2) {
        for g2 in 1..=(pi - 6) {
            for g1 in 1..=(pi - 5 - g2) {
                let (a, b) = (cc + g1 + g2, cc + g2);
                let t = chars(ctx, &[a + 3, b + 2, cc + 1]);
                let target = weight(ctx, &[a, b, cc]);
                let expl = w_expl_cached(&t, &mut memo)?;
                rep.check(expl.contains(&target), || {
                    format!("({a},{b},{cc}): weight not explicit for ramified parameter")
                });
                let cl = closure_c(&w_obv(&t))?;
                rep.check(!cl.contains(&target), || {
                    format!("({a},{b},{cc}): weight unexpectedly in the closure")
                });
            }
        }
    }
    Ok(rep)
}

/// The classical closed-form recipe for obvious weights in dimension two,
/// checked against the general predictor over every parameter and weight.
pub fn verify_rank_two_recipe(p: u64, f: u32, e: u32) -> CorpusReport {
    let ctx = Context { p, f, e, n: 2 };
    let mut rep = CorpusReport::new(format!("rank-two-recipe-p{p}-f{f}-e{e}"));
    let weights: Vec<SerreWeight> = enumerate_all(ctx).collect();
    for t in enumerate_types(ctx) {
        let obvious = w_obv(&t);
        for a in &weights {
            let predicted = rank_two_predicts(&t, a);
            let actual = obvious.contains(a);
            rep.check(predicted == actual, || {
                format!(
                    "parameter {:?}, weight {:?}: recipe says {predicted}, predictor says {actual}",
                    t.pieces, a.rows
                )
            });
        }
    }
    rep
}

/// The closed-form membership test for dimension two: an exponent-matching
/// condition over a choice of embedding pairing and per-embedding
/// distribution of the `e − 1` auxiliary gaps.
fn rank_two_predicts(t: &TameType, a: &SerreWeight) -> bool {
    let ctx = a.ctx;
    let f = ctx.f as usize;
    let e = ctx.e as i64;
    let p = BigUint::from(ctx.p);
    let pw = |k: usize| p.pow(k as u32);
    let xs: Vec<i64> = a.rows.iter().map(|r| r[0]).collect();
    let ys: Vec<i64> = a.rows.iter().map(|r| r[1]).collect();
    let irreducible = t.pieces.iter().any(|pc| pc.niveau == 2);

    let mut ms = vec![0i64; f];
    loop {
        if irreducible {
            // Choice of which extension of each residue embedding carries
            // the top exponent.
            for eps in 0..(1u32 << f) {
                let mut n = BigUint::zero();
                for s in 0..f {
                    let hi = if eps >> s & 1 == 1 { s + f } else { s };
                    let lo = s + f - (hi - s);
                    n += BigUint::from((xs[s] + 1 + ms[s]) as u64) * pw(hi);
                    n += BigUint::from((ys[s] + e - 1 - ms[s]) as u64) * pw(lo);
                }
                if &TameType::from_raw_pieces(ctx, vec![(2, n)]) == t {
                    return true;
                }
            }
        } else {
            // Choice of which character carries the top exponent at each
            // residue embedding.
            for j in 0..(1u32 << f) {
                let mut m1 = BigUint::zero();
                let mut m2 = BigUint::zero();
                for s in 0..f {
                    let top = BigUint::from((xs[s] + 1 + ms[s]) as u64) * pw(s);
                    let bot = BigUint::from((ys[s] + e - 1 - ms[s]) as u64) * pw(s);
                    if j >> s & 1 == 1 {
                        m1 += top;
                        m2 += bot;
                    } else {
                        m1 += bot;
                        m2 += top;
                    }
                }
                if &TameType::from_raw_pieces(ctx, vec![(1, m1), (1, m2)]) == t {
                    return true;
                }
            }
        }
        // Next distribution vector in [0, e−1]^f.
        let mut s = 0;
        while s < f {
            ms[s] += 1;
            if ms[s] < e {
                break;
            }
            ms[s] = 0;
            s += 1;
        }
        if s == f {
            return false;
        }
    }
}

/// Runs every verifier applicable at the prime `p` and returns their
/// reports.
pub fn verify_corpus(p: u64) -> Result<Vec<CorpusReport>, JhError> {
    let mut reports = Vec::new();
    if p >= 5 {
        reports.extend(verify_irregular_tables(p)?);
    }
    if p >= 7 {
        reports.push(verify_niveau_one_closure(p)?);
        reports.push(verify_ramified_obscure(p)?);
    }
    reports.push(verify_unramified(p)?);
    reports.push(verify_closure_partners(p)?);
    reports.push(verify_obscure_classification(p)?);
    reports.push(verify_shift_reports(p)?);
    reports.push(verify_rank_two_recipe(p, 1, 1));
    reports.push(verify_rank_two_recipe(p, 1, 2));
    reports.push(verify_rank_two_recipe(p, 2, 1));
    Ok(reports)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_tables_parse() {
        let tables = IrregularTables::builtin();
        assert_eq!(tables.rows.len(), 34);
        assert_eq!(tables.domains.len(), 3);
        assert_eq!(tables.rows.iter().filter(|r| r.case == ShapeCase::I).count(), 18);
        assert_eq!(tables.rows.iter().filter(|r| r.case == ShapeCase::II).count(), 10);
        assert_eq!(tables.rows.iter().filter(|r| r.case == ShapeCase::III).count(), 6);
    }

    #[test]
    fn expression_parser_handles_signed_terms() {
        let e = parse_expr("a-2p+2").unwrap();
        assert_eq!(e.eval(9, 0, 0, 5), 1);
        let e = parse_expr("c+p+1").unwrap();
        assert_eq!(e.eval(0, 0, 3, 5), 9);
        let cond = parse_condition("a-c != p-1").unwrap();
        assert!(cond.holds(3, 2, 0, 5));
        assert!(!cond.holds(4, 2, 0, 5));
    }

    #[test]
    fn table_spot_instance() {
        // Case i at (3, 2, 0), p = 5: the first row applies and contributes
        // the irregular weight with rows (5, 1, 0).
        let tables = IrregularTables::builtin();
        let ctx = gl3_ctx(5);
        let expected = tables.expected_irregular(ShapeCase::I, 3, 2, 0, ctx).unwrap();
        assert!(expected.contains(&weight(ctx, &[5, 1, 0])));
        let t = chars(ctx, &[3, 2, 0]);
        let expl = crate::weight_sets::w_expl(&t).unwrap();
        assert!(expl.contains(&weight(ctx, &[5, 1, 0])));
    }

    #[test]
    fn irregular_tables_hold_at_five() {
        for rep in verify_irregular_tables(5).unwrap() {
            assert!(rep.is_clean(), "{rep}");
            assert!(rep.checked > 0, "{}: empty sweep", rep.label);
        }
    }

    #[test]
    fn fixture_suite_at_five() {
        for rep in verify_corpus(5).unwrap() {
            assert!(rep.is_clean(), "{rep}");
        }
    }

    #[test]
    fn niveau_one_closure_at_seven() {
        let rep = verify_niveau_one_closure(7).unwrap();
        assert!(rep.is_clean(), "{rep}");
        assert!(rep.checked > 0);
    }

    #[test]
    fn ramified_obscure_at_seven() {
        let rep = verify_ramified_obscure(7).unwrap();
        assert!(rep.is_clean(), "{rep}");
        assert!(rep.checked > 0);
    }

    #[test]
    fn rank_two_recipe_with_residue_extension() {
        let rep = verify_rank_two_recipe(3, 2, 2);
        assert!(rep.is_clean(), "{rep}");
        assert!(rep.checked > 0);
    }
}
