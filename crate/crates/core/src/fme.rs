//! Exact-rational Fourier-Motzkin elimination over linear rate/capacity
//! inequality systems.
//!
//! Symbolic constants (capacities, log-dictionary sizes) are ordinary
//! non-eliminated symbols: projection happens over the split-rate
//! subindices only. Equalities are used for direct substitution when an
//! eliminated symbol appears in one (unit coefficients preferred);
//! everything else is the classic positive/negative pairing. No floating
//! point anywhere in this module.
//!
//! Beyond syntactic duplicate/domination removal, an optional exact
//! redundancy prune runs a rational simplex per row, optionally under
//! ambient nonnegativity assumptions on the kept symbols (rates and
//! capacities are nonnegative quantities; rows implied by that alone are
//! noise in a projection report).

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

pub type Rat = BigRational;

/// Hard cap on intermediate row count; the elimination is doubly
/// exponential in general and this tool targets small systems.
pub const ROW_GUARD: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    fn as_str(&self) -> &'static str {
        match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        }
    }

    fn parse(s: &str) -> Result<Relation> {
        match s {
            "<=" => Ok(Relation::Le),
            ">=" => Ok(Relation::Ge),
            "=" | "==" => Ok(Relation::Eq),
            other => Err(Error::Parse(format!("unknown relation `{other}`"))),
        }
    }
}

/// One linear relation `coeffs . x REL rhs` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub coeffs: Vec<Rat>,
    pub rel: Relation,
    pub rhs: Rat,
}

impl Row {
    fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// Tautology: no symbols and trivially satisfied.
    fn is_tautology(&self) -> bool {
        self.is_zero()
            && match self.rel {
                Relation::Le => !self.rhs.is_negative(),
                Relation::Ge => !self.rhs.is_positive(),
                Relation::Eq => self.rhs.is_zero(),
            }
    }
}

/// Rational-coefficient inequality system over named symbols.
#[derive(Debug, Clone)]
pub struct LinearInequalitySystem {
    pub symbols: Vec<String>,
    pub rows: Vec<Row>,
}

/// Outcome of [`LinearInequalitySystem::eliminate`].
#[derive(Debug, Clone)]
pub struct EliminationReport {
    pub eliminated: Vec<String>,
    pub result: LinearInequalitySystem,
    pub dropped_redundant: usize,
}

/// Controls for the optional exact redundancy prune.
#[derive(Debug, Clone, Default)]
pub struct EliminateOptions {
    /// Run the rational-LP redundancy removal on the projected system.
    pub exact_prune: bool,
    /// Symbols assumed nonnegative while testing redundancy (assumption
    /// only; no rows are added to the output).
    pub ambient_nonneg: Vec<String>,
}

fn parse_rat(v: &serde_json::Value) -> Result<Rat> {
    match v {
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(Rat::from_integer(BigInt::from(i)))
            } else {
                Err(Error::Parse(format!(
                    "non-integer number {n}; write rationals as strings like \"3/4\""
                )))
            }
        }
        serde_json::Value::String(s) => {
            let mut parts = s.splitn(2, '/');
            let num: BigInt = parts
                .next()
                .unwrap()
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
            match parts.next() {
                None => Ok(Rat::from_integer(num)),
                Some(d) => {
                    let den: BigInt = d
                        .trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("bad rational `{s}`")))?;
                    if den.is_zero() {
                        return Err(Error::Parse(format!("zero denominator in `{s}`")));
                    }
                    Ok(Rat::new(num, den))
                }
            }
        }
        other => Err(Error::Parse(format!("expected a rational, got {other}"))),
    }
}

fn rat_to_json(r: &Rat) -> serde_json::Value {
    if r.denom().is_one() {
        if let Ok(i) = i64::try_from(r.numer().clone()) {
            return serde_json::Value::from(i);
        }
    }
    serde_json::Value::from(r.to_string())
}

impl LinearInequalitySystem {
    pub fn new(symbols: Vec<String>, rows: Vec<Row>) -> Result<LinearInequalitySystem> {
        for (i, s) in symbols.iter().enumerate() {
            if symbols[i + 1..].contains(s) {
                return Err(Error::Parse(format!("duplicate symbol `{s}`")));
            }
        }
        for r in &rows {
            if r.coeffs.len() != symbols.len() {
                return Err(Error::Parse(format!(
                    "row has {} coefficients, system has {} symbols",
                    r.coeffs.len(),
                    symbols.len()
                )));
            }
        }
        Ok(LinearInequalitySystem { symbols, rows })
    }

    pub fn index_of(&self, symbol: &str) -> Result<usize> {
        self.symbols
            .iter()
            .position(|s| s == symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))
    }

    /// Loads the JSON document form
    /// `{"symbols":[...],"rows":[{"coeffs":{"R00":1},"rel":"<=","rhs":{"C11":1},"const":0}]}`.
    /// Symbolic right-hand terms are folded into the coefficients with a
    /// sign flip; `rhs` and `const` are both optional.
    pub fn from_json(text: &str) -> Result<LinearInequalitySystem> {
        let doc: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let symbols: Vec<String> = doc["symbols"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing `symbols` array".into()))?
            .iter()
            .map(|v| {
                v.as_str()
                    .map(String::from)
                    .ok_or_else(|| Error::Parse(format!("bad symbol {v}")))
            })
            .collect::<Result<_>>()?;
        let index = |name: &str| -> Result<usize> {
            symbols
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
        };
        let rows_json = doc["rows"]
            .as_array()
            .ok_or_else(|| Error::Parse("missing `rows` array".into()))?;
        let mut rows = Vec::with_capacity(rows_json.len());
        for rj in rows_json {
            let mut coeffs = vec![Rat::zero(); symbols.len()];
            if let Some(map) = rj.get("coeffs").and_then(|v| v.as_object()) {
                for (name, val) in map {
                    coeffs[index(name)?] += parse_rat(val)?;
                }
            }
            if let Some(map) = rj.get("rhs").and_then(|v| v.as_object()) {
                for (name, val) in map {
                    coeffs[index(name)?] -= parse_rat(val)?;
                }
            }
            let rhs = match rj.get("const") {
                Some(v) => parse_rat(v)?,
                None => Rat::zero(),
            };
            let rel = Relation::parse(
                rj.get("rel")
                    .and_then(|v| v.as_str())
                    .ok_or_else(|| Error::Parse("row missing `rel`".into()))?,
            )?;
            rows.push(Row { coeffs, rel, rhs });
        }
        LinearInequalitySystem::new(symbols, rows)
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|r| {
                let coeffs: BTreeMap<&str, serde_json::Value> = self
                    .symbols
                    .iter()
                    .zip(&r.coeffs)
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(s, c)| (s.as_str(), rat_to_json(c)))
                    .collect();
                serde_json::json!({
                    "coeffs": coeffs,
                    "rel": r.rel.as_str(),
                    "const": rat_to_json(&r.rhs),
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "symbols": self.symbols,
            "rows": rows,
        }))
        .expect("system serialization")
    }

    /// Canonical form: relations flipped to `<=` (equalities kept), each
    /// row scaled positively so the leading nonzero coefficient has unit
    /// magnitude (equalities are scaled to a leading `+1`), tautologies
    /// dropped, rows sorted lexicographically, duplicates removed.
    /// Idempotent.
    pub fn normalize(&self) -> LinearInequalitySystem {
        let mut rows: Vec<Row> = self.rows.iter().map(normalize_row).filter_map(|r| r).collect();
        rows.sort_by(compare_rows);
        rows.dedup();
        LinearInequalitySystem {
            symbols: self.symbols.clone(),
            rows,
        }
    }

    /// Classic Fourier-Motzkin projection eliminating `victims` in order,
    /// with syntactic duplicate and domination removal only.
    pub fn eliminate(&self, victims: &[&str]) -> Result<EliminationReport> {
        self.eliminate_with(victims, &EliminateOptions::default())
    }

    pub fn eliminate_with(
        &self,
        victims: &[&str],
        opts: &EliminateOptions,
    ) -> Result<EliminationReport> {
        if self.rows.is_empty() {
            return Err(Error::EmptySystem);
        }
        let victim_idx: Vec<usize> = victims
            .iter()
            .map(|v| self.index_of(v))
            .collect::<Result<_>>()?;
        let mut rows = self.rows.clone();
        let mut dropped = 0usize;
        for &v in &victim_idx {
            rows = eliminate_one(rows, v, &mut dropped)?;
            if rows.len() > ROW_GUARD {
                return Err(Error::RowExplosion {
                    rows: rows.len(),
                    limit: ROW_GUARD,
                });
            }
        }
        let mut result = LinearInequalitySystem {
            symbols: self.symbols.clone(),
            rows,
        }
        .normalize();
        if opts.exact_prune {
            let ambient: Vec<usize> = opts
                .ambient_nonneg
                .iter()
                .map(|s| result.index_of(s))
                .collect::<Result<_>>()?;
            let before = result.rows.len();
            result = prune_redundant(&result, &ambient);
            dropped += before - result.rows.len();
        }
        Ok(EliminationReport {
            eliminated: victims.iter().map(|s| s.to_string()).collect(),
            result,
            dropped_redundant: dropped,
        })
    }

    /// True iff the normalized row sets are identical after aligning the
    /// symbol columns. Errors when the declared symbol sets differ.
    pub fn check_equivalence(&self, other: &LinearInequalitySystem) -> Result<bool> {
        let mut a_syms = self.symbols.clone();
        let mut b_syms = other.symbols.clone();
        a_syms.sort();
        b_syms.sort();
        if a_syms != b_syms {
            return Err(Error::SymbolMismatch(format!(
                "{:?} vs {:?}",
                self.symbols, other.symbols
            )));
        }
        let canon = |sys: &LinearInequalitySystem, order: &[String]| {
            let perm: Vec<usize> = order
                .iter()
                .map(|s| sys.symbols.iter().position(|t| t == s).unwrap())
                .collect();
            let rows = sys
                .rows
                .iter()
                .map(|r| Row {
                    coeffs: perm.iter().map(|&i| r.coeffs[i].clone()).collect(),
                    rel: r.rel,
                    rhs: r.rhs.clone(),
                })
                .collect();
            LinearInequalitySystem {
                symbols: order.to_vec(),
                rows,
            }
            .normalize()
        };
        Ok(canon(self, &a_syms).rows == canon(other, &a_syms).rows)
    }

    /// Symmetric difference of normalized rows, for diff reporting.
    pub fn row_diff(&self, other: &LinearInequalitySystem) -> (Vec<String>, Vec<String>) {
        let order: Vec<String> = {
            let mut s = self.symbols.clone();
            s.sort();
            s
        };
        let canon = |sys: &LinearInequalitySystem| {
            let perm: Vec<usize> = order
                .iter()
                .map(|s| sys.symbols.iter().position(|t| t == s).unwrap())
                .collect();
            let rows: Vec<Row> = sys
                .rows
                .iter()
                .map(|r| Row {
                    coeffs: perm.iter().map(|&i| r.coeffs[i].clone()).collect(),
                    rel: r.rel,
                    rhs: r.rhs.clone(),
                })
                .collect();
            LinearInequalitySystem {
                symbols: order.clone(),
                rows,
            }
            .normalize()
        };
        let a = canon(self);
        let b = canon(other);
        let fmt_missing: Vec<String> = a
            .rows
            .iter()
            .filter(|r| !b.rows.contains(r))
            .map(|r| format_row(&a.symbols, r))
            .collect();
        let fmt_extra: Vec<String> = b
            .rows
            .iter()
            .filter(|r| !a.rows.contains(r))
            .map(|r| format_row(&b.symbols, r))
            .collect();
        (fmt_missing, fmt_extra)
    }

    /// True iff the rational point (full symbol assignment) satisfies
    /// every row.
    pub fn satisfied_by(&self, point: &[Rat]) -> bool {
        self.rows.iter().all(|r| {
            let lhs: Rat = r
                .coeffs
                .iter()
                .zip(point)
                .map(|(c, x)| c * x)
                .fold(Rat::zero(), |a, b| a + b);
            match r.rel {
                Relation::Le => lhs <= r.rhs,
                Relation::Ge => lhs >= r.rhs,
                Relation::Eq => lhs == r.rhs,
            }
        })
    }

    /// Exact feasibility of the system with some symbols pinned to given
    /// values (used by the projection oracle tests and the CLI).
    pub fn feasible_with_pinned(&self, pinned: &[(usize, Rat)]) -> bool {
        let mut rows = self.rows.clone();
        for &(idx, ref val) in pinned {
            let mut coeffs = vec![Rat::zero(); self.symbols.len()];
            coeffs[idx] = Rat::one();
            rows.push(Row {
                coeffs,
                rel: Relation::Eq,
                rhs: val.clone(),
            });
        }
        !matches!(
            lp_maximize(self.symbols.len(), &rows, &vec![Rat::zero(); self.symbols.len()]),
            LpOutcome::Infeasible
        )
    }
}

impl fmt::Display for LinearInequalitySystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rows {
            writeln!(f, "{}", format_row(&self.symbols, r))?;
        }
        Ok(())
    }
}

pub fn format_row(symbols: &[String], r: &Row) -> String {
    let mut lhs = String::new();
    for (s, c) in symbols.iter().zip(&r.coeffs) {
        if c.is_zero() {
            continue;
        }
        if lhs.is_empty() {
            if c.is_negative() {
                lhs.push('-');
            }
        } else if c.is_negative() {
            lhs.push_str(" - ");
        } else {
            lhs.push_str(" + ");
        }
        let mag = c.abs();
        if mag.is_one() {
            lhs.push_str(s);
        } else {
            lhs.push_str(&format!("{mag} {s}"));
        }
    }
    if lhs.is_empty() {
        lhs.push('0');
    }
    format!("{lhs} {} {}", r.rel.as_str(), r.rhs)
}

/// Scale to canonical form; `None` drops a tautology.
fn normalize_row(r: &Row) -> Option<Row> {
    let mut row = r.clone();
    if row.rel == Relation::Ge {
        for c in row.coeffs.iter_mut() {
            *c = -c.clone();
        }
        row.rhs = -row.rhs;
        row.rel = Relation::Le;
    }
    if row.is_tautology() {
        return None;
    }
    if let Some(lead) = row.coeffs.iter().find(|c| !c.is_zero()).cloned() {
        let scale = match row.rel {
            Relation::Eq => lead,
            _ => lead.abs(),
        };
        for c in row.coeffs.iter_mut() {
            *c = c.clone() / scale.clone();
        }
        row.rhs = row.rhs / scale;
    }
    Some(row)
}

fn compare_rows(a: &Row, b: &Row) -> std::cmp::Ordering {
    for (x, y) in a.coeffs.iter().zip(&b.coeffs) {
        match x.cmp(y) {
            std::cmp::Ordering::Equal => continue,
            ord => return ord,
        }
    }
    a.rel.cmp(&b.rel).then_with(|| a.rhs.cmp(&b.rhs))
}

/// Syntactic cleanup: normalize rows, drop duplicates and dominated rows
/// (identical coefficient vectors with weaker constants).
fn dedup_rows(rows: Vec<Row>, dropped: &mut usize) -> Vec<Row> {
    let before = rows.len();
    let mut normd: Vec<Row> = rows.iter().filter_map(normalize_row).collect();
    normd.sort_by(compare_rows);
    let mut out: Vec<Row> = Vec::with_capacity(normd.len());
    for row in normd {
        if let Some(prev) = out.last_mut() {
            if prev.coeffs == row.coeffs && prev.rel == row.rel {
                if prev.rel == Relation::Le {
                    // Identical normalized coefficients: keep the tighter
                    // constant.
                    if row.rhs < prev.rhs {
                        prev.rhs = row.rhs;
                    }
                    continue;
                } else if prev.rhs == row.rhs {
                    continue;
                }
            }
        }
        out.push(row);
    }
    *dropped += before - out.len();
    out
}

fn eliminate_one(rows: Vec<Row>, v: usize, dropped: &mut usize) -> Result<Vec<Row>> {
    let mut rows = rows;
    // Substitution from an equality, unit coefficients preferred.
    let eq_pick = rows
        .iter()
        .position(|r| r.rel == Relation::Eq && r.coeffs[v].abs().is_one())
        .or_else(|| {
            rows.iter()
                .position(|r| r.rel == Relation::Eq && !r.coeffs[v].is_zero())
        });
    if let Some(ei) = eq_pick {
        let eq = rows.remove(ei);
        let pivot = eq.coeffs[v].clone();
        for r in rows.iter_mut() {
            if r.coeffs[v].is_zero() {
                continue;
            }
            let factor = r.coeffs[v].clone() / pivot.clone();
            for (c, e) in r.coeffs.iter_mut().zip(&eq.coeffs) {
                *c = c.clone() - factor.clone() * e.clone();
            }
            r.rhs = r.rhs.clone() - factor * eq.rhs.clone();
            r.coeffs[v] = Rat::zero();
        }
        return Ok(dedup_rows(rows, dropped));
    }
    // Classic pairing; equalities still holding the victim split first.
    let mut les: Vec<Row> = Vec::new();
    for r in rows {
        if r.rel == Relation::Eq && !r.coeffs[v].is_zero() {
            let mut flip = r.clone();
            flip.rel = Relation::Ge;
            les.extend(normalize_row(&Row {
                rel: Relation::Le,
                ..r
            }));
            les.extend(normalize_row(&flip));
        } else {
            les.push(r);
        }
    }
    let mut keep: Vec<Row> = Vec::new();
    let mut pos: Vec<Row> = Vec::new();
    let mut neg: Vec<Row> = Vec::new();
    for r in les {
        if r.rel != Relation::Le || r.coeffs[v].is_zero() {
            keep.push(r);
        } else if r.coeffs[v].is_positive() {
            pos.push(r);
        } else {
            neg.push(r);
        }
    }
    let combos = pos.len().saturating_mul(neg.len());
    if keep.len().saturating_add(combos) > ROW_GUARD {
        return Err(Error::RowExplosion {
            rows: keep.len() + combos,
            limit: ROW_GUARD,
        });
    }
    for p in &pos {
        let pc = p.coeffs[v].clone();
        for n in &neg {
            let nc = -n.coeffs[v].clone();
            let coeffs: Vec<Rat> = p
                .coeffs
                .iter()
                .zip(&n.coeffs)
                .map(|(a, b)| a.clone() / pc.clone() + b.clone() / nc.clone())
                .collect();
            let rhs = p.rhs.clone() / pc.clone() + n.rhs.clone() / nc.clone();
            let mut row = Row {
                coeffs,
                rel: Relation::Le,
                rhs,
            };
            row.coeffs[v] = Rat::zero();
            keep.push(row);
        }
    }
    Ok(dedup_rows(keep, dropped))
}

/// Removes rows implied by the remaining system (optionally under
/// nonnegativity of the `ambient` symbols) via exact LP maximization.
fn prune_redundant(
    sys: &LinearInequalitySystem,
    ambient: &[usize],
) -> LinearInequalitySystem {
    let n = sys.symbols.len();
    let ambient_rows: Vec<Row> = ambient
        .iter()
        .map(|&i| {
            let mut coeffs = vec![Rat::zero(); n];
            coeffs[i] = -Rat::one();
            Row {
                coeffs,
                rel: Relation::Le,
                rhs: Rat::zero(),
            }
        })
        .collect();
    let mut kept: Vec<Row> = sys.rows.clone();
    let mut i = 0usize;
    while i < kept.len() {
        if kept[i].rel != Relation::Le {
            i += 1;
            continue;
        }
        let candidate = kept[i].clone();
        let mut context: Vec<Row> = kept
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, r)| r.clone())
            .collect();
        context.extend(ambient_rows.iter().cloned());
        let redundant = match lp_maximize(n, &context, &candidate.coeffs) {
            LpOutcome::Optimal(v) => v <= candidate.rhs,
            LpOutcome::Infeasible => true,
            LpOutcome::Unbounded => false,
        };
        if redundant {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    LinearInequalitySystem {
        symbols: sys.symbols.clone(),
        rows: kept,
    }
    .normalize()
}

/// Outcome of an exact LP solve.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal(Rat),
}

/// Maximizes `objective . x` over free variables subject to the rows,
/// with exact rational two-phase simplex (Bland's rule). Small systems
/// only; dense tableau.
pub fn lp_maximize(n_symbols: usize, rows: &[Row], objective: &[Rat]) -> LpOutcome {
    // Free x -> u - w with u, w >= 0; Le rows get a slack; every row is
    // then an equality with nonnegative right-hand side.
    let le_count = rows.iter().filter(|r| r.rel != Relation::Eq).count();
    let n_struct = 2 * n_symbols + le_count;
    let m = rows.len();
    let width = n_struct + m + 1; // artificials + rhs column
    let mut t = vec![vec![Rat::zero(); width]; m];
    let mut basis = vec![0usize; m];
    let mut slack_seen = 0usize;
    for (ri, row) in rows.iter().enumerate() {
        let (coeffs, rhs, flip) = match row.rel {
            Relation::Ge => (
                row.coeffs.iter().map(|c| -c.clone()).collect::<Vec<_>>(),
                -row.rhs.clone(),
                true,
            ),
            _ => (row.coeffs.clone(), row.rhs.clone(), false),
        };
        let _ = flip;
        for (j, c) in coeffs.iter().enumerate() {
            t[ri][2 * j] = c.clone();
            t[ri][2 * j + 1] = -c.clone();
        }
        if row.rel != Relation::Eq {
            t[ri][2 * n_symbols + slack_seen] = Rat::one();
            slack_seen += 1;
        }
        t[ri][width - 1] = rhs;
        if t[ri][width - 1].is_negative() {
            for v in t[ri].iter_mut() {
                *v = -v.clone();
            }
        }
        // Artificial basis to start phase 1.
        let art = n_struct + ri;
        t[ri][art] = Rat::one();
        basis[ri] = art;
    }

    // Phase 1: minimize the artificial sum == maximize its negative.
    let mut cost1 = vec![Rat::zero(); width];
    for ri in 0..m {
        let art = n_struct + ri;
        cost1[art] = -Rat::one();
    }
    let obj1 = run_simplex(&mut t, &mut basis, &cost1, n_struct + m);
    match obj1 {
        Some(v) if v.is_zero() => {}
        Some(_) => return LpOutcome::Infeasible,
        None => return LpOutcome::Infeasible, // phase 1 is always bounded
    }
    // Drive leftover artificials out of the basis where possible.
    for ri in 0..m {
        if basis[ri] >= n_struct {
            if let Some(col) = (0..n_struct).find(|&c| !t[ri][c].is_zero()) {
                pivot(&mut t, &mut basis, ri, col);
            }
        }
    }

    // Phase 2 over structural columns only.
    let mut cost2 = vec![Rat::zero(); width];
    for (j, c) in objective.iter().enumerate() {
        cost2[2 * j] = c.clone();
        cost2[2 * j + 1] = -c.clone();
    }
    match run_simplex(&mut t, &mut basis, &cost2, n_struct) {
        Some(v) => LpOutcome::Optimal(v),
        None => LpOutcome::Unbounded,
    }
}

fn pivot(t: &mut [Vec<Rat>], basis: &mut [usize], row: usize, col: usize) {
    let p = t[row][col].clone();
    for v in t[row].iter_mut() {
        *v = v.clone() / p.clone();
    }
    for r in 0..t.len() {
        if r == row || t[r][col].is_zero() {
            continue;
        }
        let f = t[r][col].clone();
        for j in 0..t[r].len() {
            let delta = f.clone() * t[row][j].clone();
            t[r][j] = t[r][j].clone() - delta;
        }
    }
    basis[row] = col;
}

/// Bland-rule simplex; maximizes `cost . x`. Returns the optimum, or
/// `None` when unbounded. Columns at index >= `allowed` may not enter.
fn run_simplex(
    t: &mut [Vec<Rat>],
    basis: &mut [usize],
    cost: &[Rat],
    allowed: usize,
) -> Option<Rat> {
    let m = t.len();
    let width = cost.len();
    loop {
        // Reduced costs: c_j - c_B . B^{-1} A_j.
        let mut entering = None;
        for j in 0..allowed {
            if basis.contains(&j) {
                continue;
            }
            let mut red = cost[j].clone();
            for r in 0..m {
                if !t[r][j].is_zero() && !cost[basis[r]].is_zero() {
                    red -= cost[basis[r]].clone() * t[r][j].clone();
                }
            }
            if red.is_positive() {
                entering = Some(j);
                break; // Bland: smallest index
            }
        }
        let Some(col) = entering else {
            let mut obj = Rat::zero();
            for r in 0..m {
                if !cost[basis[r]].is_zero() {
                    obj += cost[basis[r]].clone() * t[r][width - 1].clone();
                }
            }
            return Some(obj);
        };
        let mut leave: Option<(usize, Rat)> = None;
        for r in 0..m {
            if t[r][col].is_positive() {
                let ratio = t[r][width - 1].clone() / t[r][col].clone();
                match &leave {
                    None => leave = Some((r, ratio)),
                    Some((lr, lv)) => {
                        if ratio < *lv || (ratio == *lv && basis[r] < basis[*lr]) {
                            leave = Some((r, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return None; // unbounded
        };
        pivot(t, basis, row, col);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64) -> Rat {
        Rat::from_integer(BigInt::from(n))
    }

    fn sys(symbols: &[&str], rows: Vec<(Vec<(usize, i64)>, Relation, i64)>) -> LinearInequalitySystem {
        let syms: Vec<String> = symbols.iter().map(|s| s.to_string()).collect();
        let rows = rows
            .into_iter()
            .map(|(cs, rel, rhs)| {
                let mut coeffs = vec![Rat::zero(); syms.len()];
                for (i, c) in cs {
                    coeffs[i] = rat(c);
                }
                Row {
                    coeffs,
                    rel,
                    rhs: rat(rhs),
                }
            })
            .collect();
        LinearInequalitySystem::new(syms, rows).unwrap()
    }

    #[test]
    fn normalize_scales_and_flips() {
        // {2x <= 4} -> {x <= 2}
        let s = sys(&["x"], vec![(vec![(0, 2)], Relation::Le, 4)]).normalize();
        assert_eq!(s.rows[0].coeffs[0], rat(1));
        assert_eq!(s.rows[0].rhs, rat(2));
        // {-x >= -2} -> {x <= 2}? After Ge flip: x <= 2.
        let s = sys(&["x"], vec![(vec![(0, -1)], Relation::Ge, -2)]).normalize();
        assert_eq!(s.rows[0].rel, Relation::Le);
        assert_eq!(s.rows[0].coeffs[0], rat(1));
        assert_eq!(s.rows[0].rhs, rat(2));
    }

    #[test]
    fn normalize_idempotent_random() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(17);
        for _ in 0..50 {
            let rows: Vec<(Vec<(usize, i64)>, Relation, i64)> = (0..6)
                .map(|_| {
                    let cs: Vec<(usize, i64)> = (0..4)
                        .map(|i| (i, rng.random_range(-5..=5)))
                        .collect();
                    let rel = match rng.random_range(0..3) {
                        0 => Relation::Le,
                        1 => Relation::Ge,
                        _ => Relation::Eq,
                    };
                    (cs, rel, rng.random_range(-10..=10))
                })
                .collect();
            let s = sys(&["a", "b", "c", "d"], rows);
            let n1 = s.normalize();
            let n2 = n1.normalize();
            assert_eq!(n1.rows, n2.rows);
        }
    }

    #[test]
    fn eliminate_single_pair() {
        // {x + y <= 1, -y <= 0} |- eliminate y -> {x <= 1}
        let s = sys(
            &["x", "y"],
            vec![
                (vec![(0, 1), (1, 1)], Relation::Le, 1),
                (vec![(1, -1)], Relation::Le, 0),
            ],
        );
        let rep = s.eliminate(&["y"]).unwrap();
        assert_eq!(rep.result.rows.len(), 1);
        assert_eq!(rep.result.rows[0].coeffs[0], rat(1));
        assert!(rep.result.rows[0].coeffs[1].is_zero());
        assert_eq!(rep.result.rows[0].rhs, rat(1));
    }

    #[test]
    fn eliminate_uses_equality_substitution() {
        // {x + y = 3, x - y <= 1} |- eliminate y -> {2x <= 4} i.e. {x <= 2}
        let s = sys(
            &["x", "y"],
            vec![
                (vec![(0, 1), (1, 1)], Relation::Eq, 3),
                (vec![(0, 1), (1, -1)], Relation::Le, 1),
            ],
        );
        let rep = s.eliminate(&["y"]).unwrap();
        assert_eq!(rep.result.rows.len(), 1);
        assert_eq!(rep.result.rows[0].rhs, rat(2));
    }

    #[test]
    fn eliminate_unknown_victim_and_empty_system() {
        let s = sys(&["x"], vec![(vec![(0, 1)], Relation::Le, 1)]);
        assert!(matches!(
            s.eliminate(&["nope"]),
            Err(Error::UnknownSymbol(_))
        ));
        let empty = LinearInequalitySystem::new(vec!["x".into()], vec![]).unwrap();
        assert!(matches!(empty.eliminate(&["x"]), Err(Error::EmptySystem)));
    }

    #[test]
    fn equivalence_under_permutation_and_scaling() {
        let a = sys(
            &["x", "y"],
            vec![
                (vec![(0, 1), (1, 2)], Relation::Le, 4),
                (vec![(0, -1)], Relation::Le, 0),
            ],
        );
        let b = sys(
            &["y", "x"],
            vec![
                (vec![(1, -3)], Relation::Le, 0),
                (vec![(0, 6), (1, 3)], Relation::Le, 12),
            ],
        );
        assert!(a.check_equivalence(&b).unwrap());
        assert!(a.check_equivalence(&a).unwrap());
        let c = sys(&["x", "z"], vec![(vec![(0, 1)], Relation::Le, 1)]);
        assert!(matches!(
            a.check_equivalence(&c),
            Err(Error::SymbolMismatch(_))
        ));
    }

    #[test]
    fn lp_basic_outcomes() {
        // max x s.t. x <= 5
        let rows = vec![Row {
            coeffs: vec![rat(1)],
            rel: Relation::Le,
            rhs: rat(5),
        }];
        assert_eq!(lp_maximize(1, &rows, &[rat(1)]), LpOutcome::Optimal(rat(5)));
        // max x s.t. -x <= -7, x <= 5 : infeasible
        let rows = vec![
            Row {
                coeffs: vec![rat(-1)],
                rel: Relation::Le,
                rhs: rat(-7),
            },
            Row {
                coeffs: vec![rat(1)],
                rel: Relation::Le,
                rhs: rat(5),
            },
        ];
        assert_eq!(lp_maximize(1, &rows, &[rat(1)]), LpOutcome::Infeasible);
        // max x s.t. -x <= 0 : unbounded
        let rows = vec![Row {
            coeffs: vec![rat(-1)],
            rel: Relation::Le,
            rhs: rat(0),
        }];
        assert_eq!(lp_maximize(1, &rows, &[rat(1)]), LpOutcome::Unbounded);
    }

    #[test]
    fn prune_drops_dominated_row() {
        // x <= 1 makes x <= 3 redundant.
        let s = sys(
            &["x"],
            vec![
                (vec![(0, 1)], Relation::Le, 1),
                (vec![(0, 1)], Relation::Le, 3),
            ],
        );
        let rep = s
            .eliminate_with(
                &[],
                &EliminateOptions {
                    exact_prune: true,
                    ambient_nonneg: vec![],
                },
            )
            .unwrap();
        assert_eq!(rep.result.rows.len(), 1);
        assert_eq!(rep.result.rows[0].rhs, rat(1));
    }

    #[test]
    fn projection_agrees_with_feasibility_oracle() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(2718);
        for _ in 0..8 {
            // Random 6-var, 10-row system with small integer entries.
            let rows: Vec<(Vec<(usize, i64)>, Relation, i64)> = (0..10)
                .map(|_| {
                    let cs: Vec<(usize, i64)> = (0..6)
                        .map(|i| (i, rng.random_range(-3..=3)))
                        .collect();
                    (cs, Relation::Le, rng.random_range(-4..=8))
                })
                .collect();
            let s = sys(&["a", "b", "c", "d", "e", "f"], rows);
            let rep = s.eliminate(&["d", "e", "f"]).unwrap();
            // Probe random points of the kept space.
            for _ in 0..100 {
                let point: Vec<Rat> = (0..6).map(|_| rat(rng.random_range(-5..=5))).collect();
                let kept_ok = rep.result.satisfied_by(&point);
                let extends = s.feasible_with_pinned(&[
                    (0, point[0].clone()),
                    (1, point[1].clone()),
                    (2, point[2].clone()),
                ]);
                assert_eq!(
                    kept_ok, extends,
                    "projection membership must match the extension oracle"
                );
            }
        }
    }
}
