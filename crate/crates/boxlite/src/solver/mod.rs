//! Reference first-order solver for compiled problems: projected
//! subgradient with diminishing steps and cyclic halfspace projection,
//! plus the standard-form SOCP export.

mod socp;

pub use socp::{export_socp, verify_socp_equivalence, AffineRow, ConeBlock, SocpProgram};

use crate::problem::{CompiledProblem, LinearConstraint, ProblemError, WidthTerm};
use crate::rng::Rng;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("projection stalled at residual {residual} on a problem certified nonempty")]
    InfeasibleDetected { residual: f64 },
    #[error("{0}")]
    Problem(#[from] ProblemError),
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_iters: usize,
    pub tol_feas: f64,
    /// Early-stop threshold on the best feasible objective.
    pub tol_obj: f64,
    /// Diminishing step c/sqrt(k).
    pub step_c: f64,
    /// Cyclic projection passes per iteration.
    pub projection_passes: usize,
    /// Full passes allowed to reach feasibility at initialization.
    pub max_init_passes: usize,
    pub seed: u64,
    pub warm_start: Option<Vec<f64>>,
    /// When set, a projection stall is a configuration bug, not a result.
    pub certified_nonempty: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            max_iters: 5000,
            tol_feas: 1e-6,
            tol_obj: 1e-4,
            step_c: 0.4,
            projection_passes: 3,
            max_init_passes: 300,
            seed: 0,
            warm_start: None,
            certified_nonempty: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Converged,
    ZeroSubgradient,
    IterationLimit,
}

#[derive(Debug, Clone)]
pub struct Diagnostics {
    pub iterations: usize,
    pub final_residual: f64,
    pub best_objective: f64,
    pub objective_trace: Vec<f64>,
    pub stop: StopReason,
}

struct Projector<'a> {
    constraints: &'a [LinearConstraint],
    norm2: Vec<f64>,
}

impl<'a> Projector<'a> {
    fn new(constraints: &'a [LinearConstraint]) -> Self {
        let norm2 = constraints
            .iter()
            .map(|c| c.terms.iter().map(|(_, v)| v * v).sum::<f64>())
            .collect();
        Projector { constraints, norm2 }
    }

    fn pass(&self, z: &mut [f64]) {
        for (c, n2) in self.constraints.iter().zip(&self.norm2) {
            if *n2 == 0.0 {
                continue;
            }
            let v = c.dot(z) - c.rhs;
            if v > 0.0 {
                let scale = v / n2;
                for (i, a) in &c.terms {
                    z[*i as usize] -= scale * a;
                }
            }
        }
    }
}

/// Cyclic projection onto the halfspaces; each individual projection is
/// the closed-form halfspace projection.
pub fn project_polyhedron(z: &mut [f64], constraints: &[LinearConstraint], passes: usize) {
    let projector = Projector::new(constraints);
    for _ in 0..passes {
        projector.pass(z);
    }
}

/// A valid subgradient of the objective at z: first attained argmax in
/// every max, positive-part gradient on the exterior signed-distance
/// branch, first max coordinate on the interior branch, and normalized
/// width directions (zero at width zero).
pub fn subgradient(problem: &CompiledProblem, z: &[f64]) -> Result<Vec<f64>, ProblemError> {
    if z.len() != problem.n() {
        return Err(ProblemError::DimensionMismatch { expected: problem.n(), got: z.len() });
    }
    let mut g = vec![0.0; problem.n()];
    let obj = &problem.objective;

    let add_loss_group = |g: &mut Vec<f64>, terms: &[crate::problem::LossTerm], weight: f64| {
        if terms.is_empty() || weight == 0.0 {
            return;
        }
        // First attained argmax term, then its first attained argmax part.
        let mut best_t = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for (ti, t) in terms.iter().enumerate() {
            let v = problem.loss_value(t, z);
            if v > best_v {
                best_v = v;
                best_t = ti;
            }
        }
        let term = &terms[best_t];
        let mut best_p = 0usize;
        let mut best_pv = f64::NEG_INFINITY;
        for (pi, p) in term.parts.iter().enumerate() {
            let v = problem.dist_value(p, z);
            if v > best_pv {
                best_pv = v;
                best_p = pi;
            }
        }
        let part = &term.parts[best_p];
        let y = problem.slack_vector(part, z);
        if y.iter().any(|v| *v > 0.0) {
            let norm = y.iter().map(|v| v.max(0.0).powi(2)).sum::<f64>().sqrt();
            if norm > 0.0 {
                for (j, yj) in y.iter().enumerate() {
                    if *yj > 0.0 {
                        let w = weight * yj / norm;
                        problem.slack_coeffs(part, j, |idx, c| g[idx] += w * c);
                    }
                }
            }
        } else {
            let mut jmax = 0usize;
            for (j, yj) in y.iter().enumerate() {
                if *yj > y[jmax] {
                    jmax = j;
                }
            }
            problem.slack_coeffs(part, jmax, |idx, c| g[idx] += weight * c);
        }
    };

    add_loss_group(&mut g, &obj.assertion_terms, 1.0);
    add_loss_group(&mut g, &obj.negative_terms, obj.lambda1);

    let add_width = |g: &mut Vec<f64>, terms: &[WidthTerm], weight: f64| {
        if weight == 0.0 {
            return;
        }
        for term in terms {
            let norm = problem.width_value(term, z);
            if norm == 0.0 {
                continue;
            }
            for i in 0..problem.d() {
                let (lo, hi) = problem.width_vars(term, i);
                let w = (z[hi] - z[lo]) / norm;
                g[hi] += weight * w;
                g[lo] -= weight * w;
            }
        }
    };
    add_width(&mut g, &obj.width_terms_cr, obj.lambda2);
    add_width(&mut g, &obj.width_terms_bump, obj.lambda3);

    Ok(g)
}

/// Minimize the compiled objective over the compiled polyhedron. Returns
/// the best feasible iterate and diagnostics; the best-iterate objective
/// is non-increasing by construction.
pub fn solve(
    problem: &CompiledProblem,
    opts: &SolveOptions,
) -> Result<(Vec<f64>, Diagnostics), SolveError> {
    let n = problem.n();
    let projector = Projector::new(&problem.constraints);

    let mut z = match &opts.warm_start {
        Some(w) => {
            if w.len() != n {
                return Err(SolveError::Problem(ProblemError::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                }));
            }
            w.clone()
        }
        None => {
            let s = problem.layout.cfg.s_world;
            let mut rng = Rng::new(opts.seed);
            (0..n).map(|_| rng.range_f64(-s / 2.0, s / 2.0)).collect()
        }
    };

    // Reach feasibility before descending.
    let mut residual = problem.feasibility_residual(&z)?;
    let mut used = 0;
    while residual > opts.tol_feas && used < opts.max_init_passes {
        projector.pass(&mut z);
        used += 1;
        residual = problem.feasibility_residual(&z)?;
    }
    if residual > opts.tol_feas && opts.certified_nonempty {
        return Err(SolveError::InfeasibleDetected { residual });
    }

    let mut best_z = z.clone();
    let mut best_f = f64::INFINITY;
    let mut best_found = false;
    let mut trace = Vec::new();
    let mut stop = StopReason::IterationLimit;
    let mut iterations = 0;

    for k in 1..=opts.max_iters {
        iterations = k;
        let f = problem.evaluate_objective(&z)?;
        trace.push(f);
        residual = problem.feasibility_residual(&z)?;
        if residual <= opts.tol_feas && f < best_f {
            best_f = f;
            best_z.copy_from_slice(&z);
            best_found = true;
        }
        if best_found && best_f <= opts.tol_obj {
            stop = StopReason::Converged;
            break;
        }
        let g = subgradient(problem, &z)?;
        let gnorm2: f64 = g.iter().map(|v| v * v).sum();
        if gnorm2 == 0.0 {
            stop = StopReason::ZeroSubgradient;
            if residual <= opts.tol_feas && f < best_f {
                best_f = f;
                best_z.copy_from_slice(&z);
                best_found = true;
            }
            break;
        }
        let step = opts.step_c / (k as f64).sqrt();
        for (zi, gi) in z.iter_mut().zip(&g) {
            *zi -= step * gi;
        }
        for _ in 0..opts.projection_passes {
            projector.pass(&mut z);
        }
        // Keep passing until the iterate is feasible again, so it stays
        // eligible for best-iterate tracking; bounded to avoid stalls.
        let mut extra = 0;
        while problem.feasibility_residual(&z)? > opts.tol_feas && extra < opts.max_init_passes {
            projector.pass(&mut z);
            extra += 1;
        }
    }

    let (out, out_f) = if best_found {
        (best_z, best_f)
    } else {
        let f = problem.evaluate_objective(&z)?;
        (z, f)
    };
    let final_residual = problem.feasibility_residual(&out)?;
    Ok((
        out,
        Diagnostics {
            iterations,
            final_residual,
            best_objective: out_f,
            objective_trace: trace,
            stop,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::faithful_embedding;
    use crate::geometry::WorldConfig;
    use crate::ontology::parse_kb;
    use crate::problem::{compile, NegativeMode};
    use crate::reasoner::WitnessDomain;

    #[test]
    fn scalar_halfspace_projection() {
        let constraints = vec![LinearConstraint { terms: vec![(0, 1.0)], rhs: 1.0 }];
        let mut z = vec![5.0];
        project_polyhedron(&mut z, &constraints, 1);
        assert_eq!(z, vec![1.0]);
        // Feasible points are fixed.
        let mut z2 = vec![0.5];
        project_polyhedron(&mut z2, &constraints, 3);
        assert_eq!(z2, vec![0.5]);
    }

    fn tiny_problem() -> CompiledProblem {
        let kb = parse_kb(
            "concept A\nrole R\nindividual a\nindividual b\nci A exists(R)\nra R a b\nca A a",
        )
        .unwrap();
        let cfg = WorldConfig { d: 3, s_world: 4.0, eps: 0.01 };
        compile(&kb, cfg, (0.3, 0.05, 0.05), NegativeMode::AssertedOnly).unwrap()
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let p = tiny_problem();
        let mut rng = Rng::new(555);
        let h = 1e-6;
        let mut checked = 0;
        'outer: for _ in 0..80 {
            let z: Vec<f64> = (0..p.n()).map(|_| rng.range_f64(-2.0, 2.0)).collect();
            // Skip points close to a kink: near-ties in any max.
            for group in [&p.objective.assertion_terms, &p.objective.negative_terms] {
                let mut vals: Vec<f64> =
                    group.iter().map(|t| p.loss_value(t, &z)).collect();
                vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
                if vals.len() > 1 && vals[0] - vals[1] < 1e-3 {
                    continue 'outer;
                }
                for t in group.iter() {
                    let mut pv: Vec<f64> =
                        t.parts.iter().map(|part| p.dist_value(part, &z)).collect();
                    pv.sort_by(|a, b| b.partial_cmp(a).unwrap());
                    if pv.len() > 1 && pv[0] - pv[1] < 1e-3 {
                        continue 'outer;
                    }
                    for part in &t.parts {
                        let y = p.slack_vector(part, &z);
                        let mut ys = y.clone();
                        ys.sort_by(|a, b| b.partial_cmp(a).unwrap());
                        if ys[0].abs() < 1e-3 || (ys[0] - ys[1]).abs() < 1e-3 {
                            continue 'outer;
                        }
                    }
                }
            }
            let g = subgradient(&p, &z).unwrap();
            for _ in 0..4 {
                let dir: Vec<f64> = (0..p.n()).map(|_| rng.range_f64(-1.0, 1.0)).collect();
                let mut zp = z.clone();
                let mut zm = z.clone();
                for i in 0..p.n() {
                    zp[i] += h * dir[i];
                    zm[i] -= h * dir[i];
                }
                let fd = (p.evaluate_objective(&zp).unwrap()
                    - p.evaluate_objective(&zm).unwrap())
                    / (2.0 * h);
                let gd: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
                assert!((fd - gd).abs() < 1e-5, "fd {fd} vs g·dir {gd}");
                checked += 1;
            }
        }
        assert!(checked >= 40, "too few differentiable samples: {checked}");
    }

    #[test]
    fn subgradient_inequality() {
        let p = tiny_problem();
        let mut rng = Rng::new(99);
        for _ in 0..200 {
            let z: Vec<f64> = (0..p.n()).map(|_| rng.range_f64(-3.0, 3.0)).collect();
            let y: Vec<f64> = (0..p.n()).map(|_| rng.range_f64(-3.0, 3.0)).collect();
            let g = subgradient(&p, &z).unwrap();
            let fz = p.evaluate_objective(&z).unwrap();
            let fy = p.evaluate_objective(&y).unwrap();
            let inner: f64 = g.iter().zip(y.iter().zip(&z)).map(|(gi, (yi, zi))| gi * (yi - zi)).sum();
            assert!(fy >= fz + inner - 1e-9, "violated: {fy} < {fz} + {inner}");
        }
    }

    #[test]
    fn zero_width_subgradient_accepted() {
        let p = tiny_problem();
        // All-zero point has zero-width boxes; the width part contributes
        // a zero subgradient rather than NaN.
        let z = vec![0.0; p.n()];
        let g = subgradient(&p, &z).unwrap();
        assert!(g.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn solve_reaches_nonpositive_objective_on_tiny_kb() {
        let kb = parse_kb(
            "concept A\nrole R\nindividual a\nindividual b\nra R a b",
        )
        .unwrap();
        let d = crate::analytic::d_min(&kb.signature, crate::analytic::DimBoundMode::Kb);
        let cfg = WorldConfig { d, s_world: 4.0, eps: 0.01 };
        let p = compile(&kb, cfg, (0.0, 0.0, 0.0), NegativeMode::AssertedOnly).unwrap();
        let opts = SolveOptions {
            max_iters: 20000,
            tol_obj: -1e-3,
            certified_nonempty: true,
            seed: 7,
            ..Default::default()
        };
        let (z, diag) = solve(&p, &opts).unwrap();
        assert!(diag.final_residual <= 1e-6, "residual {}", diag.final_residual);
        assert!(diag.best_objective <= 1e-4, "objective {}", diag.best_objective);
        let eta = p.extract_interpretation(&z, 1e-6).unwrap();
        assert!(eta.is_box_consistent());
    }

    #[test]
    fn warm_start_at_analytic_point_stays_feasible() {
        let kb = parse_kb("concept A\nrole R\nindividual a\nindividual b\nra R a b\nca A a").unwrap();
        let eta = faithful_embedding(&kb, WitnessDomain::Full, 0.01).unwrap();
        let cfg = WorldConfig { d: eta.config.d, s_world: 4.0, eps: 0.01 };
        let p = compile(&kb, cfg, (0.0, 0.0, 0.0), NegativeMode::AssertedOnly).unwrap();
        let z0 = p.layout.pack(&eta);
        let f0 = p.evaluate_objective(&z0).unwrap();
        assert!(f0 <= 0.0);
        let opts = SolveOptions {
            max_iters: 200,
            warm_start: Some(z0),
            certified_nonempty: true,
            tol_obj: f64::NEG_INFINITY,
            ..Default::default()
        };
        let (_, diag) = solve(&p, &opts).unwrap();
        assert!(diag.final_residual <= 1e-9);
        // Best-iterate tracking never loses the warm start's value.
        assert!(diag.best_objective <= f0 + 1e-12);
    }

    #[test]
    fn solve_is_deterministic() {
        let p = tiny_problem();
        let opts = SolveOptions { max_iters: 300, seed: 42, ..Default::default() };
        let (z1, d1) = solve(&p, &opts).unwrap();
        let (z2, d2) = solve(&p, &opts).unwrap();
        assert_eq!(z1, z2);
        assert_eq!(d1.objective_trace, d2.objective_trace);
    }

    #[test]
    fn empty_objective_any_feasible_point_is_optimal() {
        let kb = parse_kb("ri R S").unwrap();
        let cfg = WorldConfig { d: 4, s_world: 4.0, eps: 0.01 };
        let p = compile(&kb, cfg, (0.0, 0.0, 0.0), NegativeMode::AssertedOnly).unwrap();
        let opts = SolveOptions { max_iters: 50, certified_nonempty: true, ..Default::default() };
        let (z, diag) = solve(&p, &opts).unwrap();
        assert!(diag.final_residual <= 1e-6);
        assert_eq!(p.evaluate_objective(&z).unwrap(), 0.0);
    }
}
