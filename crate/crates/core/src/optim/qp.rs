//! Primal-dual interior-point solver for convex QPs
//!
//! ```text
//! minimize ½ xᵀPx + qᵀx  subject to  A x = b,  l ≤ x ≤ u
//! ```
//!
//! Each iteration solves the regularized quasi-definite system
//! `[P + Σ + δI, Aᵀ; A, −δI]` with a sparse LDLᵀ, refines against the
//! unregularized system, and takes a Mehrotra predictor-corrector step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{LdlSymbolic, PivotPolicy, SparseLdl, SparseMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    /// Symmetric positive semi-definite, both triangles stored.
    pub p: SparseMatrix,
    pub q: Vec<f64>,
    pub a: SparseMatrix,
    pub b: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QpStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub x: Vec<f64>,
    /// Equality multipliers.
    pub y: Vec<f64>,
    /// Bound multipliers, `z_lower − z_upper`.
    pub z: Vec<f64>,
    pub status: QpStatus,
    /// `‖A x − b‖_∞`
    pub primal_residual: f64,
    /// `‖P x + q + Aᵀy − z‖_∞`
    pub dual_residual: f64,
    /// Largest complementarity product over finite bounds.
    pub gap: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Strictly interior starting point; computed when absent.
    pub initial_x: Option<Vec<f64>>,
    /// Elimination order of the KKT unknowns (variables `0..n`, then
    /// equality rows `n..n+m`), `order[new] = old`; nested dissection when
    /// absent.
    pub kkt_order: Option<Vec<usize>>,
}

impl Default for QpSettings {
    fn default() -> Self {
        Self {
            tol: 1e-9,
            max_iter: 200_000,
            initial_x: None,
            kkt_order: None,
        }
    }
}

impl QpProblem {
    pub fn num_variables(&self) -> usize {
        self.q.len()
    }

    pub fn num_equalities(&self) -> usize {
        self.b.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.q.len();
        let m = self.b.len();
        let shape_ok = self.p.n_rows() == n
            && self.p.n_cols() == n
            && self.a.n_rows() == m
            && self.a.n_cols() == n
            && self.lower.len() == n
            && self.upper.len() == n;
        if !shape_ok {
            return Err(Error::Invalid("QP dimensions are inconsistent".into()));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.q) || !finite(&self.b) || !finite(self.p.values()) || !finite(self.a.values()) {
            return Err(Error::Invalid("QP data has non-finite entries".into()));
        }
        for i in 0..n {
            if self.lower[i].is_nan() || self.upper[i].is_nan() || self.lower[i] > self.upper[i] {
                return Err(Error::Invalid(format!("bounds of variable {i} are inconsistent")));
            }
        }
        Ok(())
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        let px = self.p.mul_vec(x);
        x.iter().zip(&px).map(|(a, b)| 0.5 * a * b).sum::<f64>()
            + x.iter().zip(&self.q).map(|(a, b)| a * b).sum::<f64>()
    }

    /// Tolerance scale `1 + ‖q‖_∞`.
    pub fn scale(&self) -> f64 {
        1.0 + self.q.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Max-abs norm that propagates NaN.
fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| {
        if x.is_nan() || m.is_nan() {
            f64::NAN
        } else {
            m.max(x.abs())
        }
    })
}

struct Kkt {
    n: usize,
    m: usize,
    /// KKT matrix with the pattern fixed; diagonal positions cached.
    matrix: SparseMatrix,
    diag_pos: Vec<usize>,
    p_diag: Vec<f64>,
    ldl: SparseLdl,
    signs: Vec<i8>,
    delta: f64,
}

impl Kkt {
    fn new(prob: &QpProblem, delta: f64, order: Option<&[usize]>) -> Result<Self> {
        let n = prob.num_variables();
        let m = prob.num_equalities();
        let mut t: Vec<(usize, usize, f64)> = Vec::with_capacity(prob.p.nnz() + 2 * prob.a.nnz() + n + m);
        t.extend(prob.p.triplets());
        for (i, j, v) in prob.a.triplets() {
            t.push((n + i, j, v));
            t.push((j, n + i, v));
        }
        for i in 0..n + m {
            t.push((i, i, 0.0));
        }
        let matrix = SparseMatrix::from_triplets(n + m, n + m, &t)?;
        let diag_pos: Vec<usize> = (0..n + m)
            .map(|i| {
                let (cols, _) = matrix.row(i);
                matrix.row_ptr()[i] + cols.binary_search(&i).expect("diagonal present")
            })
            .collect();
        let p_diag = prob.p.diagonal();
        let symbolic = match order {
            Some(o) => LdlSymbolic::analyze_ordered(&matrix, o)?,
            None => LdlSymbolic::analyze(&matrix)?,
        };
        log::debug!(
            "KKT dimension {}, factor entries {}, largest front {}, {:.3e} flops",
            n + m,
            symbolic.factor_nnz(),
            symbolic.max_front(),
            symbolic.factor_flops()
        );
        let ldl = SparseLdl::new(symbolic);
        let signs = (0..n + m).map(|i| if i < n { 1 } else { -1 }).collect();
        Ok(Self {
            n,
            m,
            matrix,
            diag_pos,
            p_diag,
            ldl,
            signs,
            delta,
        })
    }

    /// Factors `[P + diag(sigma) + δI, Aᵀ; A, −δI]`.
    fn factor(&mut self, sigma: &[f64]) -> Result<()> {
        let vals = self.matrix.values_mut();
        for i in 0..self.n {
            vals[self.diag_pos[i]] = self.p_diag[i] + sigma[i] + self.delta;
        }
        for i in 0..self.m {
            vals[self.diag_pos[self.n + i]] = -self.delta;
        }
        let tiny = 1e-13 * (1.0 + inf_norm(&self.p_diag));
        self.ldl
            .factor(&self.matrix, Some(&self.signs), PivotPolicy::Regularize { delta: tiny })
    }

    /// Solves the unregularized system `[P + Σ, Aᵀ; A, 0] d = r` with the
    /// regularized factor as a preconditioner.
    fn solve(&self, prob: &QpProblem, sigma: &[f64], rhs: &[f64]) -> Vec<f64> {
        let (n, m) = (self.n, self.m);
        let mut d = self.ldl.solve(rhs);
        let residual = |d: &[f64]| -> Vec<f64> {
            let mut r = rhs.to_vec();
            let (dx, dy) = d.split_at(n);
            let px = prob.p.mul_vec(dx);
            for i in 0..n {
                r[i] -= px[i] + sigma[i] * dx[i];
            }
            prob.a.mul_transpose_vec_add(-1.0, dy, &mut r[..n]);
            prob.a.mul_vec_add(-1.0, dx, &mut r[n..n + m]);
            r
        };
        let mut r = residual(&d);
        let mut rn = inf_norm(&r);
        for _ in 0..4 {
            if rn <= 1e-14 * (1.0 + inf_norm(rhs)) {
                break;
            }
            let c = self.ldl.solve(&r);
            let trial: Vec<f64> = d.iter().zip(&c).map(|(a, b)| a + b).collect();
            let tr = residual(&trial);
            let tn = inf_norm(&tr);
            if tn >= rn {
                break;
            }
            d = trial;
            r = tr;
            rn = tn;
        }
        d
    }
}

/// Largest `α ≤ 1` keeping `s + α ds ≥ 0`.
fn max_step(s: &[f64], ds: &[f64], mask: &[bool]) -> f64 {
    let mut a: f64 = 1.0;
    for i in 0..s.len() {
        if mask[i] && ds[i] < 0.0 {
            a = a.min(-s[i] / ds[i]);
        }
    }
    a
}

/// Minimum-norm least-squares check of `A x = b`.
fn equalities_consistent(prob: &QpProblem, tol: f64, order: Option<&[usize]>) -> Result<bool> {
    let n = prob.num_variables();
    let m = prob.num_equalities();
    if m == 0 {
        return Ok(true);
    }
    let ident = QpProblem {
        p: SparseMatrix::from_diagonal(&vec![0.0; n]),
        q: vec![0.0; n],
        a: prob.a.clone(),
        b: prob.b.clone(),
        lower: vec![f64::NEG_INFINITY; n],
        upper: vec![f64::INFINITY; n],
    };
    let anorm = prob.a.inf_norm().max(1.0);
    let mut kkt = Kkt::new(&ident, 1e-10 * anorm * anorm, order)?;
    let sigma = vec![1.0; n];
    kkt.factor(&sigma)?;
    let mut rhs = vec![0.0; n + m];
    rhs[n..].copy_from_slice(&prob.b);
    let d = kkt.solve(&ident, &sigma, &rhs);
    let ax = prob.a.mul_vec(&d[..n]);
    let res = ax.iter().zip(&prob.b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    Ok(res <= tol.sqrt() * (1.0 + inf_norm(&prob.b)))
}

pub fn solve_qp(prob: &QpProblem, settings: &QpSettings) -> Result<QpSolution> {
    prob.validate()?;
    let n = prob.num_variables();
    let m = prob.num_equalities();
    let scale = prob.scale();
    let tol = settings.tol;

    let order = settings.kkt_order.as_deref();
    if let Some(o) = order {
        if o.len() != n + m {
            return Err(Error::Invalid("KKT ordering has the wrong length".into()));
        }
    }
    if !equalities_consistent(prob, tol, order)? {
        let x: Vec<f64> = (0..n).map(|i| 0.0f64.clamp(prob.lower[i], prob.upper[i])).collect();
        return Ok(finish(
            prob,
            x,
            vec![0.0; m],
            vec![0.0; n],
            QpStatus::Infeasible,
            0,
            f64::NAN,
        ));
    }

    let has_l: Vec<bool> = prob.lower.iter().map(|v| v.is_finite()).collect();
    let has_u: Vec<bool> = prob.upper.iter().map(|v| v.is_finite()).collect();
    let n_bounds = has_l.iter().chain(&has_u).filter(|&&b| b).count();

    let pnorm = prob.p.inf_norm().max(1.0);
    let anorm = prob.a.inf_norm().max(1.0);
    let delta = 1e-10 * pnorm.max(anorm);
    let mut kkt = Kkt::new(prob, delta, order)?;

    // starting point
    let mut x = match &settings.initial_x {
        Some(x0) if x0.len() == n => x0.clone(),
        _ => {
            let sigma = vec![1.0; n];
            kkt.factor(&sigma)?;
            let mut rhs = vec![0.0; n + m];
            for i in 0..n {
                rhs[i] = -prob.q[i];
            }
            rhs[n..].copy_from_slice(&prob.b);
            kkt.solve(prob, &sigma, &rhs)[..n].to_vec()
        }
    };
    for i in 0..n {
        let (l, u) = (prob.lower[i], prob.upper[i]);
        if has_l[i] && has_u[i] {
            let w = u - l;
            if w == 0.0 {
                return Err(Error::Invalid(format!(
                    "variable {i} has equal bounds; use an equality"
                )));
            }
            x[i] = x[i].clamp(l + 0.1 * w, u - 0.1 * w);
        } else if has_l[i] {
            x[i] = x[i].max(l + 1e-2 * (1.0 + l.abs()));
        } else if has_u[i] {
            x[i] = x[i].min(u - 1e-2 * (1.0 + u.abs()));
        }
    }
    let mut y = vec![0.0; m];
    let mut zl: Vec<f64> = (0..n).map(|i| if has_l[i] { 1.0 } else { 0.0 }).collect();
    let mut zu: Vec<f64> = (0..n).map(|i| if has_u[i] { 1.0 } else { 0.0 }).collect();

    let slack = |x: &[f64]| -> (Vec<f64>, Vec<f64>) {
        let sl = (0..n)
            .map(|i| if has_l[i] { x[i] - prob.lower[i] } else { 1.0 })
            .collect();
        let su = (0..n)
            .map(|i| if has_u[i] { prob.upper[i] - x[i] } else { 1.0 })
            .collect();
        (sl, su)
    };

    // (merit, primal residual, x, y, z)
    let mut best: Option<(f64, f64, Iterate)> = None;
    let mut stall = 0usize;
    let mut last_merit = f64::INFINITY;
    let mut iterations = 0;
    let mut status = QpStatus::MaxIterations;

    while iterations < settings.max_iter {
        let (sl, su) = slack(&x);
        // residuals
        let mut rd: Vec<f64> = prob.p.mul_vec(&x);
        for i in 0..n {
            rd[i] += prob.q[i] - zl[i] + zu[i];
        }
        prob.a.mul_transpose_vec_add(1.0, &y, &mut rd);
        let mut rp = prob.a.mul_vec(&x);
        for i in 0..m {
            rp[i] -= prob.b[i];
        }
        let mu = if n_bounds > 0 {
            (0..n)
                .map(|i| if has_l[i] { sl[i] * zl[i] } else { 0.0 } + if has_u[i] { su[i] * zu[i] } else { 0.0 })
                .sum::<f64>()
                / n_bounds as f64
        } else {
            0.0
        };
        let gap = (0..n)
            .map(|i| {
                let a = if has_l[i] { sl[i] * zl[i] } else { 0.0 };
                let b = if has_u[i] { su[i] * zu[i] } else { 0.0 };
                a.max(b)
            })
            .fold(0.0, f64::max);
        let (pres, dres) = (inf_norm(&rp), inf_norm(&rd));
        let merit = pres.max(dres).max(gap);
        if !merit.is_finite() || !mu.is_finite() {
            // numerical breakdown; fall back to the best iterate
            break;
        }
        if best.as_ref().is_none_or(|b| merit < b.0) {
            let z: Vec<f64> = (0..n).map(|i| zl[i] - zu[i]).collect();
            best = Some((merit, pres, (x.clone(), y.clone(), z)));
        }
        if pres <= tol * scale && dres <= tol * scale && gap <= tol * scale {
            status = QpStatus::Optimal;
            break;
        }
        // divergence of the multipliers with a stuck primal residual signals
        // incompatible bounds and equalities
        let zmax = inf_norm(&zl).max(inf_norm(&zu));
        if zmax > 1e12 * scale && pres > tol * scale {
            status = QpStatus::Infeasible;
            break;
        }
        if merit > 0.999 * last_merit {
            stall += 1;
            if stall > 50 {
                break;
            }
        } else {
            stall = 0;
        }
        last_merit = last_merit.min(merit);
        iterations += 1;

        let sigma_d: Vec<f64> = (0..n)
            .map(|i| (if has_l[i] { zl[i] / sl[i] } else { 0.0 }) + (if has_u[i] { zu[i] / su[i] } else { 0.0 }))
            .collect();
        let clock = std::time::Instant::now();
        kkt.factor(&sigma_d)?;
        log::trace!("iteration {iterations}: merit {merit:e}, factor {:?}", clock.elapsed());

        // direction for complementarity targets rl = sl∘zl − tl, ru = su∘zu − tu
        let direction = |rcl: &[f64], rcu: &[f64]| -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
            let mut rhs = vec![0.0; n + m];
            for i in 0..n {
                let mut r = -rd[i];
                if has_l[i] {
                    r -= rcl[i] / sl[i];
                }
                if has_u[i] {
                    r += rcu[i] / su[i];
                }
                rhs[i] = r;
            }
            for i in 0..m {
                rhs[n + i] = -rp[i];
            }
            let d = kkt.solve(prob, &sigma_d, &rhs);
            let dx = d[..n].to_vec();
            let dy = d[n..].to_vec();
            let dzl: Vec<f64> = (0..n)
                .map(|i| {
                    if has_l[i] {
                        (-rcl[i] - zl[i] * dx[i]) / sl[i]
                    } else {
                        0.0
                    }
                })
                .collect();
            let dzu: Vec<f64> = (0..n)
                .map(|i| {
                    if has_u[i] {
                        (-rcu[i] + zu[i] * dx[i]) / su[i]
                    } else {
                        0.0
                    }
                })
                .collect();
            (dx, dy, dzl, dzu)
        };

        let step = |dx: &[f64], dzl: &[f64], dzu: &[f64]| -> f64 {
            let neg_dx: Vec<f64> = dx.iter().map(|v| -v).collect();
            max_step(&sl, dx, &has_l)
                .min(max_step(&su, &neg_dx, &has_u))
                .min(max_step(&zl, dzl, &has_l))
                .min(max_step(&zu, dzu, &has_u))
        };

        let rcl0: Vec<f64> = (0..n).map(|i| sl[i] * zl[i]).collect();
        let rcu0: Vec<f64> = (0..n).map(|i| su[i] * zu[i]).collect();
        let (dx, dy, dzl, dzu) = if n_bounds == 0 {
            direction(&rcl0, &rcu0)
        } else {
            let (ax, _, azl, azu) = direction(&rcl0, &rcu0);
            let alpha = step(&ax, &azl, &azu);
            let mu_aff = (0..n)
                .map(|i| {
                    (if has_l[i] {
                        (sl[i] + alpha * ax[i]) * (zl[i] + alpha * azl[i])
                    } else {
                        0.0
                    }) + (if has_u[i] {
                        (su[i] - alpha * ax[i]) * (zu[i] + alpha * azu[i])
                    } else {
                        0.0
                    })
                })
                .sum::<f64>()
                / n_bounds as f64;
            let sig = if mu > 0.0 {
                (mu_aff / mu).powi(3).clamp(0.0, 1.0)
            } else {
                0.0
            };
            let rcl: Vec<f64> = (0..n)
                .map(|i| {
                    if has_l[i] {
                        sl[i] * zl[i] + ax[i] * azl[i] - sig * mu
                    } else {
                        0.0
                    }
                })
                .collect();
            let rcu: Vec<f64> = (0..n)
                .map(|i| {
                    if has_u[i] {
                        su[i] * zu[i] - ax[i] * azu[i] - sig * mu
                    } else {
                        0.0
                    }
                })
                .collect();
            direction(&rcl, &rcu)
        };
        let alpha = if n_bounds == 0 {
            1.0
        } else {
            (0.99 * step(&dx, &dzl, &dzu)).min(1.0)
        };
        for i in 0..n {
            x[i] += alpha * dx[i];
            zl[i] += alpha * dzl[i];
            zu[i] += alpha * dzu[i];
        }
        for i in 0..m {
            y[i] += alpha * dy[i];
        }
    }

    let (x, y, z) = match status {
        QpStatus::Optimal => (x, y, (0..n).map(|i| zl[i] - zu[i]).collect()),
        _ => {
            let (_, best_pres, (bx, by, bz)) = best.expect("at least one iterate");
            // the equalities alone are consistent, so an unreachable primal
            // residual means the bounds cut the affine set away
            if best_pres > tol.sqrt() * scale {
                status = QpStatus::Infeasible;
            }
            (bx, by, bz)
        }
    };
    let clip = |x: Vec<f64>| -> Vec<f64> {
        x.iter()
            .enumerate()
            .map(|(i, v)| v.clamp(prob.lower[i], prob.upper[i]))
            .collect()
    };
    let x = clip(x);
    let gap = complementarity(prob, &x, &z);
    let sol = finish(prob, x, y, z, status, iterations, gap);
    if status == QpStatus::Optimal {
        if let Some((px, py, pz)) = polish(prob, &sol, order)? {
            let px = clip(px);
            let pgap = complementarity(prob, &px, &pz);
            let polished = finish(prob, px, py, pz, status, iterations, pgap);
            let worst = |s: &QpSolution| s.primal_residual.max(s.dual_residual).max(s.gap);
            if worst(&polished) <= worst(&sol).max(1e-3 * tol * scale) {
                return Ok(polished);
            }
        }
    }
    Ok(sol)
}

/// Primal and dual iterates `(x, y, z)`.
type Iterate = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Re-solves the equality-constrained problem with the identified active
/// bounds fixed. Returns `None` when the guess is inconsistent.
fn polish(prob: &QpProblem, sol: &QpSolution, order: Option<&[usize]>) -> Result<Option<Iterate>> {
    let n = prob.num_variables();
    let m = prob.num_equalities();
    let mut active = vec![0i8; n];
    for i in 0..n {
        let zl = sol.z[i].max(0.0);
        let zu = (-sol.z[i]).max(0.0);
        if prob.lower[i].is_finite() && sol.x[i] - prob.lower[i] < zl {
            active[i] = -1;
        } else if prob.upper[i].is_finite() && prob.upper[i] - sol.x[i] < zu {
            active[i] = 1;
        }
    }
    let free: Vec<usize> = (0..n).filter(|&i| active[i] == 0).collect();
    let mut x = sol.x.clone();
    for i in 0..n {
        match active[i] {
            -1 => x[i] = prob.lower[i],
            1 => x[i] = prob.upper[i],
            _ => {}
        }
    }
    let nf = free.len();
    let mut xa = x.clone();
    for &i in &free {
        xa[i] = 0.0;
    }
    // rhs = [-q_F - P_{F,·} x_act; b - A x_act]
    let pxa = prob.p.mul_vec(&xa);
    let axa = prob.a.mul_vec(&xa);
    let all_rows: Vec<usize> = (0..m).collect();
    let reduced = QpProblem {
        p: prob.p.select(&free, &free),
        q: free.iter().map(|&i| prob.q[i] + pxa[i]).collect(),
        a: prob.a.select(&all_rows, &free),
        b: (0..m).map(|r| prob.b[r] - axa[r]).collect(),
        lower: vec![f64::NEG_INFINITY; nf],
        upper: vec![f64::INFINITY; nf],
    };
    let pnorm = reduced.p.inf_norm().max(1.0);
    let anorm = reduced.a.inf_norm().max(1.0);
    // the full ordering restricted to the free variables and all rows
    let reduced_order: Option<Vec<usize>> = order.map(|o| {
        let mut slot = vec![usize::MAX; n];
        for (k, &i) in free.iter().enumerate() {
            slot[i] = k;
        }
        o.iter()
            .filter_map(|&u| {
                if u < n {
                    (slot[u] != usize::MAX).then(|| slot[u])
                } else {
                    Some(nf + u - n)
                }
            })
            .collect()
    });
    let mut kkt = Kkt::new(&reduced, 1e-10 * pnorm.max(anorm), reduced_order.as_deref())?;
    let zero = vec![0.0; nf];
    kkt.factor(&zero)?;
    let mut rhs = vec![0.0; nf + m];
    for k in 0..nf {
        rhs[k] = -reduced.q[k];
    }
    rhs[nf..].copy_from_slice(&reduced.b);
    let d = kkt.solve(&reduced, &zero, &rhs);
    if d.iter().any(|v| !v.is_finite()) {
        return Ok(None);
    }
    for (k, &i) in free.iter().enumerate() {
        x[i] = d[k];
    }
    let y = d[nf..].to_vec();
    let mut z = prob.p.mul_vec(&x);
    for i in 0..n {
        z[i] += prob.q[i];
    }
    prob.a.mul_transpose_vec_add(1.0, &y, &mut z);
    let slack_tol = 1e-9 * prob.scale();
    for i in 0..n {
        match active[i] {
            0 => {
                z[i] = 0.0;
                if x[i] < prob.lower[i] - slack_tol || x[i] > prob.upper[i] + slack_tol {
                    return Ok(None);
                }
            }
            -1 if z[i] < -slack_tol => return Ok(None),
            1 if z[i] > slack_tol => return Ok(None),
            _ => {}
        }
    }
    Ok(Some((x, y, z)))
}

fn complementarity(prob: &QpProblem, x: &[f64], z: &[f64]) -> f64 {
    (0..x.len())
        .map(|i| {
            if z[i] >= 0.0 && prob.lower[i].is_finite() {
                (x[i] - prob.lower[i]) * z[i]
            } else if z[i] < 0.0 && prob.upper[i].is_finite() {
                (prob.upper[i] - x[i]) * -z[i]
            } else {
                z[i].abs()
            }
        })
        .fold(0.0, f64::max)
}

fn finish(
    prob: &QpProblem,
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    status: QpStatus,
    iterations: usize,
    gap: f64,
) -> QpSolution {
    let mut rd = prob.p.mul_vec(&x);
    for i in 0..x.len() {
        rd[i] += prob.q[i] - z[i];
    }
    prob.a.mul_transpose_vec_add(1.0, &y, &mut rd);
    let ax = prob.a.mul_vec(&x);
    let pres = ax.iter().zip(&prob.b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    QpSolution {
        x,
        y,
        z,
        status,
        primal_residual: pres,
        dual_residual: inf_norm(&rd),
        gap,
        iterations,
    }
}
