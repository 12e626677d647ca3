//! Exact solutions of the reference experiments, error norms, empirical
//! convergence orders, and the 1D/multi-D drivers that produce the
//! table-style reports.

use crate::integrate::{
    evolve_symbol_exact, symbol_stability_radius, BoundaryData, NoBoundary, SchemeSelector,
    SemiDiscrete, StateVector,
};
use crate::mesh::{uniform_1d_periodic, SimplicialMesh};
use crate::symbols::SchemeParams;
use crate::{Error, Result};

/// Nodes with |u_exact| below this are left out of the relative sup norm.
pub const REL_NORM_EXCLUSION: f64 = 1e-10;

/// Closed-form solutions of the experiment problems.
#[derive(Clone, Debug)]
pub enum ExactSolution {
    /// u = A e^(omega_exact t) e^(i x p); complex-valued, periodic 1D runs only.
    Harmonic1D { amplitude: f64, p: f64, lambda: f64, kappa: f64 },
    /// u = A exp(k.x + |k|^2 kappa t) exp(lambda.x/(2 kappa) - |lambda|^2 t/(4 kappa)).
    ConvDiff2D { amplitude: f64, k: [f64; 2], lambda: [f64; 2], kappa: f64 },
    /// u = cos(2 pi (x - l1 t)) cos(2 pi (y - l2 t)).
    Transport2D { lambda: [f64; 2] },
    /// 3D analogue of `ConvDiff2D`.
    ConvDiff3D { amplitude: f64, k: [f64; 3], lambda: [f64; 3], kappa: f64 },
    /// u = A (1 - 2 lambda) |x|^2 (t+1)^(-2 lambda) + 6 A kappa (t+1)^(-2 lambda + 1),
    /// convected by the field lambda x / (t + 1).
    Decay3D { amplitude: f64, kappa: f64, lambda: f64 },
    /// u = sin(2 pi (x - l1 t)) sin(2 pi (y - l2 t)) sin(2 pi (z - l3 t)).
    Transport3D { lambda: [f64; 3] },
}

impl ExactSolution {
    pub fn dim(&self) -> usize {
        match self {
            ExactSolution::Harmonic1D { .. } => 1,
            ExactSolution::ConvDiff2D { .. } | ExactSolution::Transport2D { .. } => 2,
            _ => 3,
        }
    }

    pub fn kappa(&self) -> f64 {
        match self {
            ExactSolution::Harmonic1D { kappa, .. }
            | ExactSolution::ConvDiff2D { kappa, .. }
            | ExactSolution::ConvDiff3D { kappa, .. }
            | ExactSolution::Decay3D { kappa, .. } => *kappa,
            _ => 0.0,
        }
    }

    /// Point value at time t (real-valued solutions).
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ExactSolution::Harmonic1D { amplitude, p, kappa, .. } => {
                // real part; the 1D driver works with the full complex pair
                let (re, _) = self.eval_complex(t, x[0]);
                let _ = (amplitude, p, kappa);
                re
            }
            ExactSolution::ConvDiff2D { amplitude, k, lambda, kappa } => {
                let kk = k[0] * k[0] + k[1] * k[1];
                let ll = lambda[0] * lambda[0] + lambda[1] * lambda[1];
                amplitude
                    * (k[0] * x[0] + k[1] * x[1] + kk * kappa * t).exp()
                    * ((lambda[0] * x[0] + lambda[1] * x[1]) / (2.0 * kappa)
                        - ll / (4.0 * kappa) * t)
                        .exp()
            }
            ExactSolution::Transport2D { lambda } => {
                let tau = std::f64::consts::TAU;
                (tau * (x[0] - lambda[0] * t)).cos() * (tau * (x[1] - lambda[1] * t)).cos()
            }
            ExactSolution::ConvDiff3D { amplitude, k, lambda, kappa } => {
                let kk: f64 = k.iter().map(|v| v * v).sum();
                let ll: f64 = lambda.iter().map(|v| v * v).sum();
                let kx: f64 = k.iter().zip(x).map(|(a, b)| a * b).sum();
                let lx: f64 = lambda.iter().zip(x).map(|(a, b)| a * b).sum();
                amplitude
                    * (kx + kk * kappa * t).exp()
                    * (lx / (2.0 * kappa) - ll / (4.0 * kappa) * t).exp()
            }
            ExactSolution::Decay3D { amplitude, kappa, lambda } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                amplitude * (1.0 - 2.0 * lambda) * r2 * (t + 1.0).powf(-2.0 * lambda)
                    + 6.0 * amplitude * kappa * (t + 1.0).powf(-2.0 * lambda + 1.0)
            }
            ExactSolution::Transport3D { lambda } => {
                let tau = std::f64::consts::TAU;
                (tau * (x[0] - lambda[0] * t)).sin()
                    * (tau * (x[1] - lambda[1] * t)).sin()
                    * (tau * (x[2] - lambda[2] * t)).sin()
            }
        }
    }

    /// Time derivative at a point (feeds the boundary-rate coupling).
    pub fn rate(&self, t: f64, x: &[f64]) -> f64 {
        match self {
            ExactSolution::Harmonic1D { .. } => {
                let (re, _) = self.rate_complex(t, x[0]);
                re
            }
            ExactSolution::ConvDiff2D { k, lambda, kappa, .. } => {
                let kk = k[0] * k[0] + k[1] * k[1];
                let ll = lambda[0] * lambda[0] + lambda[1] * lambda[1];
                (kk * kappa - ll / (4.0 * kappa)) * self.eval(t, x)
            }
            ExactSolution::ConvDiff3D { k, lambda, kappa, .. } => {
                let kk: f64 = k.iter().map(|v| v * v).sum();
                let ll: f64 = lambda.iter().map(|v| v * v).sum();
                (kk * kappa - ll / (4.0 * kappa)) * self.eval(t, x)
            }
            ExactSolution::Transport2D { lambda } => {
                let tau = std::f64::consts::TAU;
                let a = tau * (x[0] - lambda[0] * t);
                let b = tau * (x[1] - lambda[1] * t);
                tau * lambda[0] * a.sin() * b.cos() + tau * lambda[1] * a.cos() * b.sin()
            }
            ExactSolution::Decay3D { amplitude, kappa, lambda } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                amplitude * (1.0 - 2.0 * lambda) * r2 * (-2.0 * lambda)
                    * (t + 1.0).powf(-2.0 * lambda - 1.0)
                    + 6.0 * amplitude * kappa * (1.0 - 2.0 * lambda)
                        * (t + 1.0).powf(-2.0 * lambda)
            }
            ExactSolution::Transport3D { lambda } => {
                let tau = std::f64::consts::TAU;
                let a = tau * (x[0] - lambda[0] * t);
                let b = tau * (x[1] - lambda[1] * t);
                let c = tau * (x[2] - lambda[2] * t);
                -tau * (lambda[0] * a.cos() * b.sin() * c.sin()
                    + lambda[1] * a.sin() * b.cos() * c.sin()
                    + lambda[2] * a.sin() * b.sin() * c.cos())
            }
        }
    }

    /// Complex value of the 1D harmonic.
    pub fn eval_complex(&self, t: f64, x: f64) -> (f64, f64) {
        match self {
            ExactSolution::Harmonic1D { amplitude, p, lambda, kappa } => {
                let modulus = amplitude * (-kappa * p * p * t).exp();
                let phase = p * x - lambda * p * t;
                (modulus * phase.cos(), modulus * phase.sin())
            }
            _ => panic!("eval_complex is defined for the 1D harmonic only"),
        }
    }

    fn rate_complex(&self, t: f64, x: f64) -> (f64, f64) {
        match self {
            ExactSolution::Harmonic1D { p, lambda, kappa, .. } => {
                let (re, im) = self.eval_complex(t, x);
                // d/dt = omega_exact * u with omega = -kappa p^2 - i lambda p
                let (wr, wi) = (-kappa * p * p, -lambda * p);
                (wr * re - wi * im, wr * im + wi * re)
            }
            _ => unreachable!(),
        }
    }

    /// Assemble the semi-discrete system this solution's PDE needs.
    pub fn system(&self, mesh: &SimplicialMesh) -> Result<SemiDiscrete> {
        if self.dim() != mesh.dim {
            return Err(Error::Domain(format!(
                "solution dimension {} does not match mesh dimension {}",
                self.dim(),
                mesh.dim
            )));
        }
        match self {
            ExactSolution::Harmonic1D { .. } => {
                Err(Error::Domain("the 1D harmonic runs on the periodic driver".into()))
            }
            ExactSolution::ConvDiff2D { lambda, kappa, .. } => {
                SemiDiscrete::on_mesh(mesh, *kappa, lambda)
            }
            ExactSolution::Transport2D { lambda } => SemiDiscrete::on_mesh(mesh, 0.0, lambda),
            ExactSolution::ConvDiff3D { lambda, kappa, .. } => {
                SemiDiscrete::on_mesh(mesh, *kappa, lambda)
            }
            ExactSolution::Decay3D { kappa, lambda, .. } => {
                let l = *lambda;
                SemiDiscrete::on_mesh_with_field(
                    mesh,
                    *kappa,
                    move |x| x.iter().map(|&v| l * v).collect(),
                    Some(|t| 1.0 / (t + 1.0)),
                )
            }
            ExactSolution::Transport3D { lambda } => SemiDiscrete::on_mesh(mesh, 0.0, lambda),
        }
    }
}

/// Dirichlet data read off an exact solution.
pub struct ExactBoundary<'a> {
    pub solution: &'a ExactSolution,
    pub mesh: &'a SimplicialMesh,
}

impl BoundaryData for ExactBoundary<'_> {
    fn value(&self, node: usize, t: f64) -> f64 {
        self.solution.eval(t, self.mesh.node(node))
    }
    fn rate(&self, node: usize, t: f64) -> f64 {
        self.solution.rate(t, self.mesh.node(node))
    }
}

/// Error norms of one run.
#[derive(Clone, Copy, Debug)]
pub struct ErrorReport {
    pub inf_abs: f64,
    pub inf_rel: f64,
    pub l2_rel: f64,
    pub excluded_nodes: usize,
}

/// Norms from pointwise |error| and |exact| magnitudes.
pub fn pointwise_norms(err_abs: &[f64], exact_abs: &[f64]) -> Result<ErrorReport> {
    assert_eq!(err_abs.len(), exact_abs.len());
    let mut inf_abs = 0.0f64;
    let mut inf_rel = 0.0f64;
    let mut excluded = 0usize;
    let mut err_sq = 0.0;
    let mut exact_sq = 0.0;
    for (&e, &u) in err_abs.iter().zip(exact_abs) {
        inf_abs = inf_abs.max(e);
        err_sq += e * e;
        exact_sq += u * u;
        if u < REL_NORM_EXCLUSION {
            excluded += 1;
        } else {
            inf_rel = inf_rel.max(e / u);
        }
    }
    if excluded == err_abs.len() {
        return Err(Error::AllNodesExcluded);
    }
    Ok(ErrorReport {
        inf_abs,
        inf_rel,
        l2_rel: (err_sq / exact_sq).sqrt(),
        excluded_nodes: excluded,
    })
}

/// Norms of a full-grid numeric vector against an exact solution at time t.
pub fn error_norms(
    values: &[f64],
    solution: &ExactSolution,
    mesh: &SimplicialMesh,
    t: f64,
) -> Result<ErrorReport> {
    let n = mesh.n_nodes();
    assert_eq!(values.len(), n);
    let mut err = Vec::with_capacity(n);
    let mut exact = Vec::with_capacity(n);
    for i in 0..n {
        let u = solution.eval(t, mesh.node(i));
        err.push((values[i] - u).abs());
        exact.push(u.abs());
    }
    pointwise_norms(&err, &exact)
}

/// ln(A_prev/A_cur) / ln(h_prev/h_cur); requires both gap values on one side
/// of zero.
pub fn empirical_order(a_prev: f64, a_cur: f64, h_prev: f64, h_cur: f64) -> Result<f64> {
    if !(h_prev > h_cur && h_cur > 0.0) {
        return Err(Error::Domain("need h_prev > h_cur > 0".into()));
    }
    if a_prev * a_cur <= 0.0 {
        return Err(Error::SignChange(a_prev, a_cur));
    }
    Ok((a_prev / a_cur).ln() / (h_prev / h_cur).ln())
}

/// How a 1D convergence run evaluates each scheme.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvergenceMode {
    /// Closed-form symbol errors (the tables' reference values).
    SymbolExact,
    /// RK4 with the stability-plus-Richardson step rule.
    TimeStepped,
}

/// One gap column: the pair of schemes whose squared absolute sup errors are
/// differenced.
#[derive(Clone, Copy, Debug)]
pub struct GapPairSpec {
    pub upper: SchemeSelector,
    pub lower: SchemeSelector,
}

impl GapPairSpec {
    pub fn label(&self) -> String {
        format!("P_{}_{}", self.upper.label(), self.lower.label())
    }
}

/// Per-mesh errors, squared-error gaps and empirical orders of a 1D sweep.
#[derive(Clone, Debug)]
pub struct ConvergenceTable {
    pub ns: Vec<usize>,
    pub hs: Vec<f64>,
    pub schemes: Vec<SchemeSelector>,
    /// rel_errors[scheme][column]
    pub rel_errors: Vec<Vec<f64>>,
    pub abs_errors: Vec<Vec<f64>>,
    pub pairs: Vec<GapPairSpec>,
    /// gaps[pair][column]: A(upper, lower) from absolute sup norms squared.
    pub gaps: Vec<Vec<f64>>,
    /// orders[pair][column]; None in the first column or across a sign change.
    pub orders: Vec<Vec<Option<f64>>>,
}

impl ConvergenceTable {
    pub fn scheme_index(&self, selector: SchemeSelector) -> Option<usize> {
        self.schemes.iter().position(|&s| s == selector)
    }

    pub fn pair_index(&self, upper: SchemeSelector, lower: SchemeSelector) -> Option<usize> {
        self.pairs
            .iter()
            .position(|p| p.upper == upper && p.lower == lower)
    }
}

/// The gap pairs the diffusive and pure-transport tables track.
pub fn table_pairs(kappa: f64) -> Vec<GapPairSpec> {
    use SchemeSelector::*;
    if kappa > 0.0 {
        vec![
            GapPairSpec { upper: Corrected(2), lower: Corrected(1) },
            GapPairSpec { upper: Corrected(3), lower: Corrected(2) },
            GapPairSpec { upper: Consistent, lower: Corrected(1) },
            GapPairSpec { upper: Consistent, lower: Corrected(2) },
            GapPairSpec { upper: Consistent, lower: Corrected(3) },
        ]
    } else {
        vec![
            GapPairSpec { upper: Corrected(1), lower: Corrected(2) },
            GapPairSpec { upper: Corrected(2), lower: Corrected(3) },
            GapPairSpec { upper: Corrected(1), lower: Consistent },
            GapPairSpec { upper: Corrected(2), lower: Consistent },
            GapPairSpec { upper: Corrected(3), lower: Consistent },
        ]
    }
}

/// Sweep mesh sizes for the 1D harmonic problem and report error norms, gaps
/// and empirical orders.
pub fn run_convergence_1d(
    example: &ExactSolution,
    domain: (f64, f64),
    ns: &[usize],
    schemes: &[SchemeSelector],
    mode: ConvergenceMode,
    t_end: f64,
    user_tau: Option<f64>,
) -> Result<ConvergenceTable> {
    let ExactSolution::Harmonic1D { amplitude, p, lambda, kappa } = *example else {
        return Err(Error::Domain("1D convergence runs take the harmonic solution".into()));
    };
    if ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("mesh sizes must be strictly increasing".into()));
    }
    let (a, b) = domain;
    let mut rel_errors = vec![Vec::new(); schemes.len()];
    let mut abs_errors = vec![Vec::new(); schemes.len()];
    let mut hs = Vec::new();
    for &n_nodes in ns {
        let mesh = uniform_1d_periodic(a, b, n_nodes)?;
        let h = mesh.h();
        hs.push(h);
        let params = SchemeParams::new(lambda, kappa, h, p)?;
        match mode {
            ConvergenceMode::SymbolExact => {
                for (s, &selector) in schemes.iter().enumerate() {
                    let (rel, abs_unit) = evolve_symbol_exact(selector, &params, t_end);
                    rel_errors[s].push(rel);
                    abs_errors[s].push(amplitude * abs_unit);
                }
            }
            ConvergenceMode::TimeStepped => {
                let system = SemiDiscrete::periodic_1d(&mesh, lambda, kappa)?;
                for (s, &selector) in schemes.iter().enumerate() {
                    let (rel, abs) = time_stepped_harmonic_errors(
                        &system, &mesh, &params, amplitude, selector, t_end, user_tau,
                    )?;
                    rel_errors[s].push(rel);
                    abs_errors[s].push(abs);
                }
            }
        }
    }
    let pairs = table_pairs(kappa);
    let mut gaps = vec![Vec::new(); pairs.len()];
    let mut orders = vec![Vec::new(); pairs.len()];
    for (pi, pair) in pairs.iter().enumerate() {
        let iu = schemes.iter().position(|&s| s == pair.upper);
        let il = schemes.iter().position(|&s| s == pair.lower);
        for col in 0..ns.len() {
            let gap = match (iu, il) {
                (Some(iu), Some(il)) => {
                    let eu = abs_errors[iu][col];
                    let el = abs_errors[il][col];
                    eu * eu - el * el
                }
                _ => f64::NAN,
            };
            gaps[pi].push(gap);
            let order = if col == 0 || gap.is_nan() {
                None
            } else {
                empirical_order(gaps[pi][col - 1], gap, hs[col - 1], hs[col]).ok()
            };
            orders[pi].push(order);
        }
    }
    Ok(ConvergenceTable {
        ns: ns.to_vec(),
        hs,
        schemes: schemes.to_vec(),
        rel_errors,
        abs_errors,
        pairs,
        gaps,
        orders,
    })
}

/// Evolve the complex harmonic (as two real systems) and return the relative
/// and absolute sup-norm errors at t_end.
fn time_stepped_harmonic_errors(
    system: &SemiDiscrete,
    mesh: &crate::mesh::Mesh1DPeriodic,
    params: &SchemeParams,
    amplitude: f64,
    selector: SchemeSelector,
    t_end: f64,
    user_tau: Option<f64>,
) -> Result<(f64, f64)> {
    let n = mesh.unknowns();
    let p = params.p;
    let run = |tau: f64| -> Result<f64> {
        let re0: Vec<f64> =
            (0..n).map(|k| amplitude * (p * mesh.node_x(k)).cos()).collect();
        let im0: Vec<f64> =
            (0..n).map(|k| amplitude * (p * mesh.node_x(k)).sin()).collect();
        let re = system
            .evolve(selector, StateVector { values: re0, t: 0.0 }, &NoBoundary, t_end, tau)?;
        let im = system
            .evolve(selector, StateVector { values: im0, t: 0.0 }, &NoBoundary, t_end, tau)?;
        let modulus = amplitude * (-params.kappa * p * p * t_end).exp();
        let mut worst = 0.0f64;
        for k in 0..n {
            let x = mesh.node_x(k);
            let phase = p * x - params.lambda * p * t_end;
            let err = (re.values[k] - modulus * phase.cos())
                .hypot(im.values[k] - modulus * phase.sin());
            worst = worst.max(err);
        }
        Ok(worst)
    };
    let stability =
        0.8 * 2.8 / symbol_stability_radius(params.lambda, params.kappa, params.h, selector);
    let mut tau = user_tau.map_or(stability, |u| u.min(stability));
    let mut coarse = run(tau)?;
    // halve until the Richardson-predicted RK4 error drops under 1e-3 of the norm
    for _ in 0..8 {
        let fine = run(0.5 * tau)?;
        let predicted = (coarse - fine).abs() / 15.0;
        if predicted <= 1e-3 * fine {
            let modulus = amplitude * (-params.kappa * p * p * t_end).exp();
            return Ok((fine / modulus, fine));
        }
        tau *= 0.5;
        coarse = fine;
    }
    Err(Error::SolveFailure { residual: f64::NAN, iterations: 8 })
}

/// Evolve each scheme on a simplicial mesh from exact initial data with
/// Dirichlet injection and report the error norms at t_end.
///
/// The step starts at 0.8 of the per-scheme stability bound (power-iteration
/// estimate) and is halved until two consecutive runs agree to the point where
/// the predicted time error is below 1e-3 of the reported norm.
pub fn run_fem(
    example: &ExactSolution,
    mesh: &SimplicialMesh,
    schemes: &[SchemeSelector],
    user_tau: Option<f64>,
    t_end: f64,
) -> Result<Vec<(SchemeSelector, ErrorReport)>> {
    let system = example.system(mesh)?;
    let boundary = ExactBoundary { solution: example, mesh };
    let mut out = Vec::with_capacity(schemes.len());
    for &selector in schemes {
        let initial: Vec<f64> = system
            .interior
            .iter()
            .map(|&i| example.eval(0.0, mesh.node(i)))
            .collect();
        let run = |tau: f64| -> Result<ErrorReport> {
            let state = system.evolve(
                selector,
                StateVector { values: initial.clone(), t: 0.0 },
                &boundary,
                t_end,
                tau,
            )?;
            let full = system.full_vector(&state.values, &boundary, t_end);
            error_norms(&full, example, mesh, t_end)
        };
        if t_end == 0.0 {
            out.push((selector, run(1.0)?));
            continue;
        }
        let stability = system.stable_tau(selector)?;
        let mut tau = user_tau.map_or(stability, |u| u.min(stability));
        let mut report = run(tau)?;
        for _ in 0..4 {
            let fine = run(0.5 * tau)?;
            let predicted = (report.inf_rel - fine.inf_rel).abs() / 15.0;
            let settled = predicted <= 1e-3 * fine.inf_rel.max(f64::MIN_POSITIVE);
            report = fine;
            tau *= 0.5;
            if settled {
                break;
            }
        }
        out.push((selector, report));
    }
    Ok(out)
}

/// The paper's experiment presets.
pub mod presets {
    use super::ExactSolution;
    use std::f64::consts::PI;

    /// 1D problem: solution, domain, final time.
    pub struct Problem1D {
        pub solution: ExactSolution,
        pub domain: (f64, f64),
        pub t_end: f64,
    }

    /// Multi-D problem on the unit box: solution and final time.
    pub struct ProblemFem {
        pub solution: ExactSolution,
        pub t_end: f64,
    }

    /// Convection-diffusion harmonic on [0, 10].
    pub fn example1() -> Problem1D {
        Problem1D {
            solution: ExactSolution::Harmonic1D {
                amplitude: 1.0,
                p: 3.0 * PI,
                lambda: 1.0,
                kappa: 1e-2,
            },
            domain: (0.0, 10.0),
            t_end: 0.1,
        }
    }

    /// Example 1 with the diffusion switched off.
    pub fn example1_pure() -> Problem1D {
        let mut p = example1();
        if let ExactSolution::Harmonic1D { kappa, .. } = &mut p.solution {
            *kappa = 0.0;
        }
        p
    }

    /// Pure transport harmonic with p = 20 pi on [0, 1].
    pub fn example2() -> Problem1D {
        Problem1D {
            solution: ExactSolution::Harmonic1D {
                amplitude: 1.0,
                p: 20.0 * PI,
                lambda: 1.0,
                kappa: 0.0,
            },
            domain: (0.0, 1.0),
            t_end: 1.0,
        }
    }

    /// 2D convection-diffusion with an exponential solution.
    pub fn example3() -> ProblemFem {
        ProblemFem {
            solution: ExactSolution::ConvDiff2D {
                amplitude: 100.0,
                k: [1.0, 2.0],
                lambda: [1.0, 1.5],
                kappa: 1.0,
            },
            t_end: 0.5,
        }
    }

    /// 2D pure transport of a cosine product.
    pub fn example4() -> ProblemFem {
        ProblemFem {
            solution: ExactSolution::Transport2D { lambda: [1.0, 1.5] },
            t_end: 0.5,
        }
    }

    /// 3D convection-diffusion with an exponential solution.
    pub fn example5() -> ProblemFem {
        ProblemFem {
            solution: ExactSolution::ConvDiff3D {
                amplitude: 10.0,
                k: [1.0, 1.5, 2.0],
                lambda: [1.0, 1.5, 2.0],
                kappa: 2.0,
            },
            t_end: 0.5,
        }
    }

    /// 3D decaying paraboloid with the radial 1/(t+1) convection field.
    pub fn example6() -> ProblemFem {
        ProblemFem {
            solution: ExactSolution::Decay3D { amplitude: 100.0, kappa: 0.35, lambda: 1.0 },
            t_end: 0.5,
        }
    }

    /// 3D pure transport of a sine product.
    pub fn example7() -> ProblemFem {
        ProblemFem {
            solution: ExactSolution::Transport3D { lambda: [1.0, -2.0, 3.0] },
            t_end: 0.1,
        }
    }
}
