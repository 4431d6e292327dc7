//! Exact two-phase simplex over the rationals.
//!
//! Free variables are split into positive and negative parts, inequalities
//! get slack columns, and phase 1 drives artificial variables to zero.
//! Bland's smallest-index rule is used for both entering and leaving
//! choices, which guarantees termination on degenerate problems. All
//! arithmetic is exact, so feasibility and optimality answers are never
//! approximate.
//!
//! Solves run on a fraction-free i128 tableau first (entries scaled by the
//! previous pivot value, so every update divides exactly) and fall back to
//! the rational tableau when the input cannot be scaled into i128 or an
//! intermediate value overflows.

use crate::rat::Q;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// A linear program over free rational variables:
/// inequalities a.x <= b and equalities a.x = b.
#[derive(Debug, Clone, Default)]
pub struct Lp {
    pub nvars: usize,
    pub ineqs: Vec<(Vec<Q>, Q)>,
    pub eqs: Vec<(Vec<Q>, Q)>,
}

impl Lp {
    pub fn new(nvars: usize) -> Self {
        Lp {
            nvars,
            ineqs: Vec::new(),
            eqs: Vec::new(),
        }
    }

    pub fn le(&mut self, a: Vec<Q>, b: Q) {
        debug_assert_eq!(a.len(), self.nvars);
        self.ineqs.push((a, b));
    }

    pub fn eq(&mut self, a: Vec<Q>, b: Q) {
        debug_assert_eq!(a.len(), self.nvars);
        self.eqs.push((a, b));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { point: Vec<Q>, value: Q },
}

struct Tableau {
    ncols: usize,
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    basis: Vec<usize>,
    /// z[j] = c_B B^-1 A_j - c_j; optimal when all z[j] >= 0 (maximizing).
    z: Vec<Q>,
    z_rhs: Q,
    art_start: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, s: usize) {
        let inv = self.rows[r][s].recip();
        for x in self.rows[r].iter_mut() {
            *x *= &inv;
        }
        self.rhs[r] *= &inv;
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][s].is_zero() {
                continue;
            }
            let f = std::mem::replace(&mut self.rows[i][s], Q::zero());
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let sub = &f * &self.rows[r][j];
                    self.rows[i][j] -= sub;
                }
            }
            self.rows[i][s] = Q::zero();
            let sub = &f * &self.rhs[r];
            self.rhs[i] -= sub;
        }
        if !self.z[s].is_zero() {
            let f = std::mem::replace(&mut self.z[s], Q::zero());
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let sub = &f * &self.rows[r][j];
                    self.z[j] -= sub;
                }
            }
            self.z[s] = Q::zero();
            let sub = &f * &self.rhs[r];
            self.z_rhs -= sub;
        }
        self.basis[r] = s;
    }

    /// Prices the objective (coefficients per column) into the z row.
    fn set_objective(&mut self, c: &[Q]) {
        self.z = c.iter().map(|x| -x.clone()).collect();
        self.z_rhs = Q::zero();
        for r in 0..self.rows.len() {
            let cb = c[self.basis[r]].clone();
            if cb.is_zero() {
                continue;
            }
            for j in 0..self.ncols {
                if !self.rows[r][j].is_zero() {
                    let add = &cb * &self.rows[r][j];
                    self.z[j] += add;
                }
            }
            let add = &cb * &self.rhs[r];
            self.z_rhs += add;
        }
    }

    /// Runs simplex to optimality; false means the objective is unbounded.
    fn optimize(&mut self, ncols_active: usize) -> bool {
        loop {
            let Some(s) = (0..ncols_active).find(|&j| self.z[j] < Q::zero()) else {
                return true;
            };
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][s] <= Q::zero() {
                    continue;
                }
                let ratio = &self.rhs[r] / &self.rows[r][s];
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            let Some((r, _)) = leave else {
                return false;
            };
            self.pivot(r, s);
        }
    }
}

fn build_tableau(lp: &Lp) -> Tableau {
    let n = lp.nvars;
    let m_ineq = lp.ineqs.len();
    let m = m_ineq + lp.eqs.len();
    let art_start = 2 * n + m_ineq;
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let mut n_art = 0;
    // First pass decides which rows need artificial columns.
    let mut needs_art = Vec::with_capacity(m);
    for (_, b) in &lp.ineqs {
        needs_art.push(*b < Q::zero());
    }
    for _ in &lp.eqs {
        needs_art.push(true);
    }
    let total_art: usize = needs_art.iter().filter(|&&x| x).count();
    let ncols = art_start + total_art;
    for (k, (a, b)) in lp.ineqs.iter().chain(lp.eqs.iter()).enumerate() {
        let is_ineq = k < m_ineq;
        let negate = *b < Q::zero();
        let mut row = vec![Q::zero(); ncols];
        for (i, coef) in a.iter().enumerate() {
            let c = if negate { -coef.clone() } else { coef.clone() };
            row[n + i] = -c.clone();
            row[i] = c;
        }
        if is_ineq {
            row[2 * n + k] = if negate { -Q::one() } else { Q::one() };
        }
        let b_row = if negate { -b.clone() } else { b.clone() };
        if needs_art[k] {
            row[art_start + n_art] = Q::one();
            basis.push(art_start + n_art);
            n_art += 1;
        } else {
            basis.push(2 * n + k);
        }
        rows.push(row);
        rhs.push(b_row);
    }
    Tableau {
        ncols,
        rows,
        rhs,
        basis,
        z: vec![Q::zero(); ncols],
        z_rhs: Q::zero(),
        art_start,
    }
}

/// Phase 1. Returns a tableau holding a basic feasible solution with all
/// artificial columns removed, or None if the system is infeasible.
fn phase1(lp: &Lp) -> Option<Tableau> {
    let mut t = build_tableau(lp);
    if t.ncols > t.art_start {
        let mut c = vec![Q::zero(); t.ncols];
        for j in t.art_start..t.ncols {
            c[j] = -Q::one();
        }
        t.set_objective(&c);
        let optimal = t.optimize(t.ncols);
        debug_assert!(optimal, "phase 1 objective is bounded by construction");
        if t.z_rhs < Q::zero() {
            return None;
        }
        // Drive leftover artificials out of the basis; their rows are
        // degenerate (rhs 0), so any nonzero structural pivot keeps
        // feasibility. Rows with no structural entry are redundant.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= t.art_start {
                match (0..t.art_start).find(|&j| !t.rows[r][j].is_zero()) {
                    Some(s) => t.pivot(r, s),
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in t.rows.iter_mut() {
            row.truncate(t.art_start);
        }
        t.ncols = t.art_start;
        t.z = vec![Q::zero(); t.ncols];
        t.z_rhs = Q::zero();
    }
    Some(t)
}

fn extract_point(t: &Tableau, nvars: usize) -> Vec<Q> {
    let mut x = vec![Q::zero(); nvars];
    for (r, &bv) in t.basis.iter().enumerate() {
        if bv < nvars {
            x[bv] += &t.rhs[r];
        } else if bv < 2 * nvars {
            x[bv - nvars] -= &t.rhs[r];
        }
    }
    x
}

/// A point satisfying all constraints, or None if there is none.
pub fn feasible_point(lp: &Lp) -> Option<Vec<Q>> {
    match solve_int(lp, None) {
        Some(LpOutcome::Optimal { point, .. }) => return Some(point),
        Some(LpOutcome::Infeasible) => return None,
        Some(LpOutcome::Unbounded) => unreachable!("no objective in play"),
        None => {}
    }
    phase1(lp).map(|t| extract_point(&t, lp.nvars))
}

/// Maximizes objective.x over the constraint set.
pub fn maximize(lp: &Lp, objective: &[Q]) -> LpOutcome {
    debug_assert_eq!(objective.len(), lp.nvars);
    if let Some(out) = solve_int(lp, Some(objective)) {
        return out;
    }
    maximize_rational(lp, objective)
}

fn maximize_rational(lp: &Lp, objective: &[Q]) -> LpOutcome {
    let Some(mut t) = phase1(lp) else {
        return LpOutcome::Infeasible;
    };
    let mut c = vec![Q::zero(); t.ncols];
    for (i, coef) in objective.iter().enumerate() {
        c[i] = coef.clone();
        c[lp.nvars + i] = -coef.clone();
    }
    t.set_objective(&c);
    if !t.optimize(t.ncols) {
        return LpOutcome::Unbounded;
    }
    LpOutcome::Optimal {
        point: extract_point(&t, lp.nvars),
        value: t.z_rhs.clone(),
    }
}

/// Integer tableau in Bareiss form: every entry is the exact rational
/// tableau value times `den`, the previous pivot value. Pivot updates are
/// (a p - f g) / den with the division exact by the fraction-free pivoting
/// identity; sign tests multiply through by den's sign. Both objective
/// rows are priced before the first pivot so the identity covers them.
struct ITab {
    ncols: usize,
    art_start: usize,
    nvars: usize,
    rows: Vec<Vec<i128>>,
    rhs: Vec<i128>,
    basis: Vec<usize>,
    /// Phase 1 reduced costs: minus the sum of scaled artificials.
    z1: Vec<i128>,
    z1_rhs: i128,
    /// Phase 2 reduced costs of the scaled objective.
    z2: Vec<i128>,
    z2_rhs: i128,
    /// Positive scale folded into the objective row.
    obj_scale: i128,
    /// Last pivot value; starts at 1, may change sign.
    den: i128,
}

fn q_parts(x: &Q) -> Option<(i128, i128)> {
    let n = i128::try_from(x.numer()).ok()?;
    let d = i128::try_from(x.denom()).ok()?;
    Some((n, d))
}

fn checked_lcm(a: i128, b: i128) -> Option<i128> {
    let g = a.gcd(&b);
    (a / g).checked_mul(b)
}

/// Scales a rational row to integers: (coefficients, rhs, scale used).
fn scale_row(a: &[Q], b: &Q) -> Option<(Vec<i128>, i128, i128)> {
    let mut lcm: i128 = 1;
    let mut parts = Vec::with_capacity(a.len() + 1);
    for x in a.iter().chain(std::iter::once(b)) {
        let (n, d) = q_parts(x)?;
        parts.push((n, d));
        lcm = checked_lcm(lcm, d)?;
    }
    let mut out = Vec::with_capacity(a.len() + 1);
    for (n, d) in parts {
        out.push(n.checked_mul(lcm / d)?);
    }
    let b_scaled = out.pop().expect("rhs part present");
    Some((out, b_scaled, lcm))
}

/// (a p - f g) / d, refusing overflow and inexact division.
fn comb(a: i128, p: i128, f: i128, g: i128, d: i128) -> Option<i128> {
    let num = a.checked_mul(p)?.checked_sub(f.checked_mul(g)?)?;
    debug_assert!(num % d == 0, "fraction-free pivot division must be exact");
    if num % d != 0 {
        return None;
    }
    Some(num / d)
}

fn ratio(n: i128, d: i128) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

impl ITab {
    fn pivot(&mut self, r0: usize, s: usize) -> Option<()> {
        let p = self.rows[r0][s];
        debug_assert!(p != 0, "pivot entry must be nonzero");
        let d = self.den;
        let prow = self.rows[r0].clone();
        let prhs = self.rhs[r0];
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r0 {
                continue;
            }
            let f = row[s];
            for (x, &g) in row.iter_mut().zip(&prow) {
                *x = comb(*x, p, f, g, d)?;
            }
            self.rhs[i] = comb(self.rhs[i], p, f, prhs, d)?;
        }
        let f1 = self.z1[s];
        for (x, &g) in self.z1.iter_mut().zip(&prow) {
            *x = comb(*x, p, f1, g, d)?;
        }
        self.z1_rhs = comb(self.z1_rhs, p, f1, prhs, d)?;
        let f2 = self.z2[s];
        for (x, &g) in self.z2.iter_mut().zip(&prow) {
            *x = comb(*x, p, f2, g, d)?;
        }
        self.z2_rhs = comb(self.z2_rhs, p, f2, prhs, d)?;
        self.den = p;
        self.basis[r0] = s;
        Some(())
    }

    /// Bland's rule on the requested objective row. Some(false) means
    /// unbounded, None means the fast path gave up.
    fn optimize(&mut self, phase2: bool) -> Option<bool> {
        loop {
            let sgn = self.den.signum();
            let z = if phase2 { &self.z2 } else { &self.z1 };
            let Some(s) = (0..self.ncols).find(|&j| z[j].signum() * sgn < 0) else {
                return Some(true);
            };
            let mut leave: Option<usize> = None;
            for r in 0..self.rows.len() {
                if self.rows[r][s].signum() * sgn <= 0 {
                    continue;
                }
                let better = match leave {
                    None => true,
                    Some(lr) => {
                        // rhs[r]/rows[r][s] < rhs[lr]/rows[lr][s]; the two
                        // column entries have equal sign, so cross
                        // multiplying preserves the order.
                        let a = self.rhs[r].checked_mul(self.rows[lr][s])?;
                        let b = self.rhs[lr].checked_mul(self.rows[r][s])?;
                        a < b || (a == b && self.basis[r] < self.basis[lr])
                    }
                };
                if better {
                    leave = Some(r);
                }
            }
            let Some(r) = leave else {
                return Some(false);
            };
            self.pivot(r, s)?;
        }
    }

    fn extract(&self) -> Vec<Q> {
        let mut x = vec![Q::zero(); self.nvars];
        for (r, &bv) in self.basis.iter().enumerate() {
            if bv < self.nvars {
                x[bv] += ratio(self.rhs[r], self.den);
            } else if bv < 2 * self.nvars {
                x[bv - self.nvars] -= ratio(self.rhs[r], self.den);
            }
        }
        x
    }
}

fn build_int(lp: &Lp, objective: Option<&[Q]>) -> Option<ITab> {
    let n = lp.nvars;
    let m_ineq = lp.ineqs.len();
    let art_start = 2 * n + m_ineq;
    let mut needs_art = Vec::with_capacity(m_ineq + lp.eqs.len());
    for (_, b) in &lp.ineqs {
        needs_art.push(*b < Q::zero());
    }
    for _ in &lp.eqs {
        needs_art.push(true);
    }
    let total_art: usize = needs_art.iter().filter(|&&x| x).count();
    let ncols = art_start + total_art;
    let mut rows = Vec::with_capacity(needs_art.len());
    let mut rhs = Vec::with_capacity(needs_art.len());
    let mut basis = Vec::with_capacity(needs_art.len());
    let mut n_art = 0;
    for (k, (a, b)) in lp.ineqs.iter().chain(lp.eqs.iter()).enumerate() {
        let (ai, bi, _) = scale_row(a, b)?;
        let is_ineq = k < m_ineq;
        let negate = bi < 0;
        let mut row = vec![0i128; ncols];
        for (i, &c0) in ai.iter().enumerate() {
            let c = if negate { c0.checked_neg()? } else { c0 };
            row[i] = c;
            row[n + i] = c.checked_neg()?;
        }
        if is_ineq {
            row[2 * n + k] = if negate { -1 } else { 1 };
        }
        let b_row = if negate { bi.checked_neg()? } else { bi };
        if needs_art[k] {
            row[art_start + n_art] = 1;
            basis.push(art_start + n_art);
            n_art += 1;
        } else {
            basis.push(2 * n + k);
        }
        rows.push(row);
        rhs.push(b_row);
    }
    let mut z1 = vec![0i128; ncols];
    let mut z1_rhs = 0i128;
    if total_art > 0 {
        for x in z1.iter_mut().skip(art_start) {
            *x = 1;
        }
        for (r, &bv) in basis.iter().enumerate() {
            if bv >= art_start {
                for (x, &g) in z1.iter_mut().zip(&rows[r]) {
                    *x = x.checked_sub(g)?;
                }
                z1_rhs = z1_rhs.checked_sub(rhs[r])?;
            }
        }
    }
    let mut z2 = vec![0i128; ncols];
    let mut obj_scale = 1i128;
    if let Some(c) = objective {
        let (ci, _, scale) = scale_row(c, &Q::zero())?;
        obj_scale = scale;
        for (i, &c0) in ci.iter().enumerate() {
            z2[i] = c0.checked_neg()?;
            z2[n + i] = c0;
        }
    }
    Some(ITab {
        ncols,
        art_start,
        nvars: n,
        rows,
        rhs,
        basis,
        z1,
        z1_rhs,
        z2,
        z2_rhs: 0,
        obj_scale,
        den: 1,
    })
}

/// Runs both phases on the integer tableau. None means the input did not
/// fit or an intermediate overflowed; the caller retries over Q.
fn solve_int(lp: &Lp, objective: Option<&[Q]>) -> Option<LpOutcome> {
    let mut t = build_int(lp, objective)?;
    if t.ncols > t.art_start {
        if !t.optimize(false)? {
            debug_assert!(false, "phase 1 objective is bounded by construction");
            return None;
        }
        if t.z1_rhs.signum() * t.den.signum() < 0 {
            return Some(LpOutcome::Infeasible);
        }
        // Mirror of the rational cleanup: pivot leftover artificials onto
        // structural columns (their rows are degenerate) or drop the row.
        let mut r = 0;
        while r < t.rows.len() {
            if t.basis[r] >= t.art_start {
                match (0..t.art_start).find(|&j| t.rows[r][j] != 0) {
                    Some(s) => t.pivot(r, s)?,
                    None => {
                        t.rows.remove(r);
                        t.rhs.remove(r);
                        t.basis.remove(r);
                        continue;
                    }
                }
            }
            r += 1;
        }
        for row in t.rows.iter_mut() {
            row.truncate(t.art_start);
        }
        t.z1.truncate(t.art_start);
        t.z2.truncate(t.art_start);
        t.ncols = t.art_start;
    }
    if objective.is_some() && !t.optimize(true)? {
        return Some(LpOutcome::Unbounded);
    }
    let value = ratio(t.z2_rhs, t.den.checked_mul(t.obj_scale)?);
    Some(LpOutcome::Optimal {
        point: t.extract(),
        value,
    })
}
