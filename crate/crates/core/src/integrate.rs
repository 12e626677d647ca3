//! Semi-discrete right-hand sides, the conjugate-gradient mass solve, classical
//! RK4 stepping with strong Dirichlet injection, and symbol-exact harmonic
//! evolution.
//!
//! The constrained system keeps the interior nodes as unknowns. One flux
//! vector F = -(kappa K + theta(t) C) u - M g_dot serves every scheme, where
//! g_dot carries the exact boundary rates; the schemes differ only in how the
//! interior mass block is inverted: diagonally (lumped), by the truncated
//! Neumann series (corrected), or by CG (consistent). Lumping and the
//! correction operator are built from the interior-block row sums, which is
//! the discretisation that reproduces the reference tables on matching grids.

use crate::assembly::{
    assemble_convection, assemble_convection_1d_periodic, assemble_convection_with,
    assemble_diffusion, assemble_diffusion_1d_periodic, assemble_mass, assemble_mass_1d_periodic,
    correction_apply, lump, LumpedMass, SparseMatrix,
};
use crate::mesh::{Mesh1DPeriodic, SimplicialMesh};
use crate::symbols::{
    self, consistent_deviation, corrected_deviation, rel_error_from_deviation, SchemeParams,
};
use crate::{Error, Result};

/// Which inverse-mass treatment a run uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeSelector {
    Lumped,
    /// n >= 1 corrections; `SchemeSelector::corrected(0)` normalises to `Lumped`.
    Corrected(usize),
    Consistent,
}

impl SchemeSelector {
    pub fn corrected(n: usize) -> Self {
        if n == 0 {
            SchemeSelector::Lumped
        } else {
            SchemeSelector::Corrected(n)
        }
    }

    pub fn label(&self) -> String {
        match self {
            SchemeSelector::Lumped => "L".into(),
            SchemeSelector::Corrected(n) => n.to_string(),
            SchemeSelector::Consistent => "G".into(),
        }
    }

    fn corrections(&self) -> usize {
        match self {
            SchemeSelector::Lumped => 0,
            SchemeSelector::Corrected(n) => *n,
            SchemeSelector::Consistent => 8, // series length proxy for stability estimates
        }
    }
}

/// Unknown values over the interior nodes at one time.
#[derive(Clone, Debug)]
pub struct StateVector {
    pub values: Vec<f64>,
    pub t: f64,
}

/// Time-dependent Dirichlet data: exact values and rates at boundary nodes.
pub trait BoundaryData {
    fn value(&self, node: usize, t: f64) -> f64;
    fn rate(&self, node: usize, t: f64) -> f64;
}

/// No boundary nodes (periodic problems).
pub struct NoBoundary;

impl BoundaryData for NoBoundary {
    fn value(&self, _: usize, _: f64) -> f64 {
        0.0
    }
    fn rate(&self, _: usize, _: f64) -> f64 {
        0.0
    }
}

/// Assembled matrices plus the interior indexing of one problem.
pub struct SemiDiscrete {
    pub n_nodes: usize,
    /// Interior (unknown) node ids, ascending.
    pub interior: Vec<usize>,
    boundary_nodes: Vec<usize>,
    /// Full-grid consistent mass (couples interior rows to boundary rates).
    pub mass_full: SparseMatrix,
    /// Interior principal block of the mass matrix.
    pub mass_interior: SparseMatrix,
    /// Row sums of the interior mass block.
    pub lumped: LumpedMass,
    /// Diagonal of the interior mass block (CG preconditioner).
    mass_diag: Vec<f64>,
    diffusion: SparseMatrix,
    convection: SparseMatrix,
    /// Time factor multiplying the convection matrix (1 when absent).
    pub conv_time_factor: Option<fn(f64) -> f64>,
}

impl SemiDiscrete {
    /// Constant-coefficient problem on a simplicial mesh with Dirichlet boundary.
    pub fn on_mesh(mesh: &SimplicialMesh, kappa: f64, velocity: &[f64]) -> Result<Self> {
        let convection = assemble_convection(mesh, velocity)?;
        Self::from_parts(mesh, kappa, convection, None)
    }

    /// Nodally interpolated velocity field with an optional scalar time factor.
    pub fn on_mesh_with_field(
        mesh: &SimplicialMesh,
        kappa: f64,
        velocity_at: impl Fn(&[f64]) -> Vec<f64>,
        conv_time_factor: Option<fn(f64) -> f64>,
    ) -> Result<Self> {
        let convection = assemble_convection_with(mesh, velocity_at)?;
        Self::from_parts(mesh, kappa, convection, conv_time_factor)
    }

    fn from_parts(
        mesh: &SimplicialMesh,
        kappa: f64,
        convection: SparseMatrix,
        conv_time_factor: Option<fn(f64) -> f64>,
    ) -> Result<Self> {
        let n = mesh.n_nodes();
        let interior: Vec<usize> = (0..n).filter(|&i| !mesh.boundary[i]).collect();
        let boundary_nodes: Vec<usize> = (0..n).filter(|&i| mesh.boundary[i]).collect();
        if interior.is_empty() {
            return Err(Error::InvalidMesh("no interior nodes".into()));
        }
        let mass_full = assemble_mass(mesh)?;
        let mass_interior = mass_full.restrict(&interior);
        let lumped = lump(&mass_interior)?;
        let mass_diag = (0..mass_interior.n_rows).map(|i| mass_interior.get(i, i)).collect();
        let diffusion = assemble_diffusion(mesh, kappa)?;
        Ok(SemiDiscrete {
            n_nodes: n,
            interior,
            boundary_nodes,
            mass_full,
            mass_interior,
            lumped,
            mass_diag,
            diffusion,
            convection,
            conv_time_factor,
        })
    }

    /// Periodic interval problem; every node is an unknown.
    pub fn periodic_1d(mesh: &Mesh1DPeriodic, lambda: f64, kappa: f64) -> Result<Self> {
        let n = mesh.unknowns();
        let mass = assemble_mass_1d_periodic(mesh);
        let lumped = lump(&mass)?;
        let mass_diag = (0..n).map(|i| mass.get(i, i)).collect();
        Ok(SemiDiscrete {
            n_nodes: n,
            interior: (0..n).collect(),
            boundary_nodes: Vec::new(),
            mass_interior: mass.clone(),
            mass_full: mass,
            lumped,
            mass_diag,
            diffusion: assemble_diffusion_1d_periodic(mesh, kappa),
            convection: assemble_convection_1d_periodic(mesh, lambda),
            conv_time_factor: None,
        })
    }

    pub fn n_unknowns(&self) -> usize {
        self.interior.len()
    }

    /// Scatter interior values and boundary data into a full-grid vector.
    pub fn full_vector(&self, state: &[f64], boundary: &dyn BoundaryData, t: f64) -> Vec<f64> {
        let mut full = vec![0.0; self.n_nodes];
        for (k, &i) in self.interior.iter().enumerate() {
            full[i] = state[k];
        }
        for &b in &self.boundary_nodes {
            full[b] = boundary.value(b, t);
        }
        full
    }

    /// F = -(kappa K + theta(t) C) u - M g_dot restricted to interior rows.
    fn flux(&self, t: f64, state: &[f64], boundary: &dyn BoundaryData) -> Vec<f64> {
        let full = self.full_vector(state, boundary, t);
        let theta = self.conv_time_factor.map_or(1.0, |f| f(t));
        let mut work = vec![0.0; self.n_nodes];
        let mut flux_full = vec![0.0; self.n_nodes];
        self.diffusion.mul_vec(&full, &mut flux_full);
        self.convection.mul_vec(&full, &mut work);
        for i in 0..self.n_nodes {
            flux_full[i] = -flux_full[i] - theta * work[i];
        }
        if !self.boundary_nodes.is_empty() {
            let mut g_dot = vec![0.0; self.n_nodes];
            for &b in &self.boundary_nodes {
                g_dot[b] = boundary.rate(b, t);
            }
            self.mass_full.mul_vec(&g_dot, &mut work);
            for i in 0..self.n_nodes {
                flux_full[i] -= work[i];
            }
        }
        self.interior.iter().map(|&i| flux_full[i]).collect()
    }

    /// Apply the scheme's approximate interior mass inverse to a flux vector.
    pub fn apply_mass_inverse(&self, selector: SchemeSelector, flux: &[f64]) -> Result<Vec<f64>> {
        match selector {
            SchemeSelector::Lumped => {
                Ok(flux.iter().zip(&self.lumped.diag).map(|(f, d)| f / d).collect())
            }
            SchemeSelector::Corrected(n) => {
                Ok(correction_apply(&self.mass_interior, &self.lumped, flux, n))
            }
            SchemeSelector::Consistent => {
                solve_mass_guess(&self.mass_interior, &self.mass_diag, flux, 1e-13, None)
            }
        }
    }

    /// Semi-discrete right-hand side of the selected scheme.
    pub fn rhs(
        &self,
        selector: SchemeSelector,
        state: &StateVector,
        boundary: &dyn BoundaryData,
    ) -> Result<Vec<f64>> {
        let flux = self.flux(state.t, &state.values, boundary);
        self.apply_mass_inverse(selector, &flux)
    }

    /// One classical RK4 step; Dirichlet data enters through the stage times.
    pub fn rk4_step(
        &self,
        selector: SchemeSelector,
        state: &StateVector,
        boundary: &dyn BoundaryData,
        tau: f64,
    ) -> Result<StateVector> {
        let eval = |t: f64, values: &[f64]| -> Result<Vec<f64>> {
            let flux = self.flux(t, values, boundary);
            self.apply_mass_inverse(selector, &flux)
        };
        rk4_step_with(&eval, state, tau)
    }

    /// Integrate from `initial.t` to `t_end` with step `tau` (the final step is
    /// shortened). Fails with `NonFinite` if the state leaves the stable region.
    pub fn evolve(
        &self,
        selector: SchemeSelector,
        initial: StateVector,
        boundary: &dyn BoundaryData,
        t_end: f64,
        tau: f64,
    ) -> Result<StateVector> {
        if !(tau > 0.0) {
            return Err(Error::InvalidParams(format!("tau = {tau} must be positive")));
        }
        // the consistent solve warm-starts from the previous stage solution;
        // the CG tolerance contract is unchanged
        let warm: std::cell::RefCell<Option<Vec<f64>>> = std::cell::RefCell::new(None);
        let eval = |t: f64, values: &[f64]| -> Result<Vec<f64>> {
            let flux = self.flux(t, values, boundary);
            if selector == SchemeSelector::Consistent {
                let guess = warm.borrow().clone();
                let sol = solve_mass_guess(
                    &self.mass_interior,
                    &self.mass_diag,
                    &flux,
                    1e-13,
                    guess.as_deref(),
                )?;
                *warm.borrow_mut() = Some(sol.clone());
                Ok(sol)
            } else {
                self.apply_mass_inverse(selector, &flux)
            }
        };
        let mut state = initial;
        while state.t < t_end - 1e-14 * t_end.abs().max(1.0) {
            let step = tau.min(t_end - state.t);
            state = rk4_step_with(&eval, &state, step)?;
            if state.values.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(state.t));
            }
        }
        Ok(state)
    }

    /// Power-iteration estimate of the spectral radius of the scheme operator
    /// w -> scheme_inverse(-(kappa K + C) w) on the interior block.
    pub fn estimate_spectral_radius(&self, selector: SchemeSelector) -> Result<f64> {
        let n = self.n_unknowns();
        let theta = self.conv_time_factor.map_or(1.0, |f| f(0.0));
        let apply = |v: &[f64]| -> Result<Vec<f64>> {
            let mut full = vec![0.0; self.n_nodes];
            for (k, &i) in self.interior.iter().enumerate() {
                full[i] = v[k];
            }
            let mut kx = vec![0.0; self.n_nodes];
            let mut cx = vec![0.0; self.n_nodes];
            self.diffusion.mul_vec(&full, &mut kx);
            self.convection.mul_vec(&full, &mut cx);
            let flux: Vec<f64> =
                self.interior.iter().map(|&i| -kx[i] - theta * cx[i]).collect();
            self.apply_mass_inverse(selector, &flux)
        };
        let mut v: Vec<f64> = (0..n).map(|i| (i as f64 * 2.3).cos() + 0.01).collect();
        let mut rho = 1.0;
        for _ in 0..60 {
            let w = apply(&v)?;
            rho = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if rho == 0.0 {
                return Ok(0.0);
            }
            v = w.iter().map(|x| x / rho).collect();
        }
        Ok(rho)
    }

    /// 0.8 times the RK4 stability step for this scheme operator.
    pub fn stable_tau(&self, selector: SchemeSelector) -> Result<f64> {
        let rho = self.estimate_spectral_radius(selector)?;
        if rho == 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(0.8 * 2.8 / rho)
    }
}

/// Classical RK4 update of a generic right-hand side.
pub fn rk4_step_with(
    f: &impl Fn(f64, &[f64]) -> Result<Vec<f64>>,
    state: &StateVector,
    tau: f64,
) -> Result<StateVector> {
    let n = state.values.len();
    let y = &state.values;
    let t = state.t;
    let k1 = f(t, y)?;
    let mut stage = vec![0.0; n];
    for i in 0..n {
        stage[i] = y[i] + 0.5 * tau * k1[i];
    }
    let k2 = f(t + 0.5 * tau, &stage)?;
    for i in 0..n {
        stage[i] = y[i] + 0.5 * tau * k2[i];
    }
    let k3 = f(t + 0.5 * tau, &stage)?;
    for i in 0..n {
        stage[i] = y[i] + tau * k3[i];
    }
    let k4 = f(t + tau, &stage)?;
    let mut out = vec![0.0; n];
    for i in 0..n {
        out[i] = y[i] + tau / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(StateVector { values: out, t: t + tau })
}

/// Jacobi-preconditioned conjugate gradients for the SPD mass matrix.
/// Converges to ||M x - b|| <= tol ||b|| or fails after 10 n iterations.
pub fn solve_mass(mass: &SparseMatrix, b: &[f64], tol: f64) -> Result<Vec<f64>> {
    let diag: Vec<f64> = (0..mass.n_rows).map(|i| mass.get(i, i)).collect();
    solve_mass_guess(mass, &diag, b, tol, None)
}

/// CG with an optional initial guess (used by `evolve` to warm-start from the
/// previous stage solution; the tolerance contract is unchanged).
fn solve_mass_guess(
    mass: &SparseMatrix,
    diag: &[f64],
    b: &[f64],
    tol: f64,
    guess: Option<&[f64]>,
) -> Result<Vec<f64>> {
    let n = mass.n_rows;
    let b_norm = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = match guess {
        Some(g) => g.to_vec(),
        None => vec![0.0; n],
    };
    let mut r = b.to_vec();
    if guess.is_some() {
        let mut mx = vec![0.0; n];
        mass.mul_vec(&x, &mut mx);
        for i in 0..n {
            r[i] -= mx[i];
        }
    }
    let mut z: Vec<f64> = r.iter().zip(diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let mut mp = vec![0.0; n];
    let max_iter = 10 * n;
    for iter in 0..max_iter {
        mass.mul_vec(&p, &mut mp);
        let p_mp: f64 = p.iter().zip(&mp).map(|(a, b)| a * b).sum();
        let alpha = rz / p_mp;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * mp[i];
        }
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        if r_norm <= tol * b_norm {
            return Ok(x);
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
        if iter == max_iter - 1 {
            return Err(Error::SolveFailure { residual: r_norm / b_norm, iterations: max_iter });
        }
    }
    unreachable!()
}

/// Stability radius of the 1D symbol at z = pi: the lumped bound scaled by the
/// partial geometric factor of the correction series.
pub fn symbol_stability_radius(lambda: f64, kappa: f64, h: f64, selector: SchemeSelector) -> f64 {
    let factor = symbols::partial_geometric(2.0 / 3.0, selector.corrections() + 1);
    (4.0 * kappa / (h * h) + lambda.abs() / h) * factor
}

/// Exact single-harmonic errors of a scheme on the uniform periodic interval:
/// (relative sup-norm, absolute sup-norm for unit amplitude) at time t.
pub fn evolve_symbol_exact(
    selector: SchemeSelector,
    params: &SchemeParams,
    t: f64,
) -> (f64, f64) {
    let deviation = match selector {
        SchemeSelector::Lumped => corrected_deviation(0, params),
        SchemeSelector::Corrected(n) => corrected_deviation(n, params),
        SchemeSelector::Consistent => consistent_deviation(params),
    };
    let rel = rel_error_from_deviation(deviation, t);
    let abs = (-params.kappa * params.p * params.p * t).exp() * rel;
    (rel, abs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{structured_simplicial, uniform_1d_periodic};
    use crate::symbols::{consistent_symbol, corrected_symbol, lumped_symbol};
    use std::f64::consts::PI;

    #[test]
    fn rk4_single_step_decay() {
        let f = |_t: f64, y: &[f64]| -> Result<Vec<f64>> { Ok(vec![-y[0]]) };
        let state = StateVector { values: vec![1.0], t: 0.0 };
        let next = rk4_step_with(&f, &state, 0.1).unwrap();
        assert!((next.values[0] - 0.90483750).abs() < 1e-9);
        assert!((next.t - 0.1).abs() < 1e-15);
    }

    #[test]
    fn rk4_fourth_order_convergence() {
        let f = |_t: f64, y: &[f64]| -> Result<Vec<f64>> { Ok(vec![-y[0]]) };
        let run = |tau: f64| {
            let mut s = StateVector { values: vec![1.0], t: 0.0 };
            while s.t < 1.0 - 1e-12 {
                s = rk4_step_with(&f, &s, tau.min(1.0 - s.t)).unwrap();
            }
            (s.values[0] - (-1.0f64).exp()).abs()
        };
        let e1 = run(0.1);
        let e2 = run(0.05);
        let order = (e1 / e2).log2();
        assert!((order - 4.0).abs() < 0.1, "order {order}");
    }

    #[test]
    fn rk4_zero_rhs_is_identity() {
        let f = |_t: f64, y: &[f64]| -> Result<Vec<f64>> { Ok(vec![0.0; y.len()]) };
        let state = StateVector { values: vec![3.0, -1.0], t: 0.5 };
        let next = rk4_step_with(&f, &state, 0.25).unwrap();
        assert_eq!(next.values, vec![3.0, -1.0]);
    }

    #[test]
    fn mass_solve_diagonal_and_dense_oracle() {
        // diagonal: one CG step
        let m = SparseMatrix {
            n_rows: 3,
            n_cols: 3,
            row_offsets: vec![0, 1, 2, 3],
            col_indices: vec![0, 1, 2],
            values: vec![2.0, 3.0, 4.0],
        };
        let x = solve_mass(&m, &[2.0, 6.0, 12.0], 1e-13).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-13 && (x[1] - 2.0).abs() < 1e-13);

        // periodic tridiagonal with wraparound vs dense Gauss elimination
        let mesh = uniform_1d_periodic(0.0, 1.0, 17).unwrap();
        let m = assemble_mass_1d_periodic(&mesh);
        let n = mesh.unknowns();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.9).sin()).collect();
        let x = solve_mass(&m, &b, 1e-13).unwrap();
        let mut dense: Vec<Vec<f64>> =
            (0..n).map(|i| (0..n).map(|j| m.get(i, j)).collect()).collect();
        let mut rhs = b.clone();
        for col in 0..n {
            let pivot = (col..n).max_by(|&a, &b| {
                dense[a][col].abs().partial_cmp(&dense[b][col].abs()).unwrap()
            }).unwrap();
            dense.swap(col, pivot);
            rhs.swap(col, pivot);
            for row in col + 1..n {
                let f = dense[row][col] / dense[col][col];
                for j in col..n {
                    dense[row][j] -= f * dense[col][j];
                }
                rhs[row] -= f * rhs[col];
            }
        }
        let mut exact = vec![0.0; n];
        for row in (0..n).rev() {
            let mut acc = rhs[row];
            for j in row + 1..n {
                acc -= dense[row][j] * exact[j];
            }
            exact[row] = acc / dense[row][row];
        }
        for i in 0..n {
            assert!((x[i] - exact[i]).abs() < 1e-12, "{} vs {}", x[i], exact[i]);
        }

        // b = M * ones recovers ones
        let ones = vec![1.0; n];
        let b = m.mul_vec_alloc(&ones);
        let x = solve_mass(&m, &b, 1e-13).unwrap();
        assert!(x.iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn harmonic_is_eigenvector_of_every_scheme() {
        // rhs(harmonic) = omega * harmonic for the periodic schemes
        let mut state = 42u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..50 {
            let n_nodes = 16 + (next() * 60.0) as usize;
            let length = 0.5 + 2.0 * next();
            let mesh = uniform_1d_periodic(0.0, length, n_nodes).unwrap();
            let wave_index = 1 + (next() * ((n_nodes - 1) / 4) as f64) as usize;
            let p = 2.0 * PI * wave_index as f64 / length;
            let lambda = 2.0 * next() - 1.0;
            let kappa = if next() > 0.3 { next() } else { 0.0 };
            if kappa + lambda.abs() == 0.0 {
                continue;
            }
            let params = SchemeParams::new(lambda, kappa, mesh.h(), p).unwrap();
            let system = SemiDiscrete::periodic_1d(&mesh, lambda, kappa).unwrap();
            let n = mesh.unknowns();
            let re: Vec<f64> = (0..n).map(|k| (p * mesh.node_x(k)).cos()).collect();
            let im: Vec<f64> = (0..n).map(|k| (p * mesh.node_x(k)).sin()).collect();
            for (selector, omega) in [
                (SchemeSelector::Lumped, lumped_symbol(&params)),
                (SchemeSelector::Corrected(1), corrected_symbol(1, &params)),
                (SchemeSelector::Corrected(3), corrected_symbol(3, &params)),
                (SchemeSelector::Consistent, consistent_symbol(&params)),
            ] {
                let rhs_re = system
                    .rhs(selector, &StateVector { values: re.clone(), t: 0.0 }, &NoBoundary)
                    .unwrap();
                let rhs_im = system
                    .rhs(selector, &StateVector { values: im.clone(), t: 0.0 }, &NoBoundary)
                    .unwrap();
                // d/dt (re + i im) = omega (re + i im)
                let scale = re
                    .iter()
                    .chain(im.iter())
                    .fold(0.0f64, |a, &b| a.max(b.abs()));
                for k in 0..n {
                    let want_re = omega.re * re[k] - omega.im * im[k];
                    let want_im = omega.re * im[k] + omega.im * re[k];
                    let err = (rhs_re[k] - want_re).hypot(rhs_im[k] - want_im);
                    assert!(
                        err <= 1e-11 * scale.max(omega.abs()),
                        "{selector:?}: node {k} err {err:e}"
                    );
                }
            }
        }
    }

    #[test]
    fn constant_state_is_steady_on_periodic_mesh() {
        let mesh = uniform_1d_periodic(0.0, 2.0, 33).unwrap();
        let system = SemiDiscrete::periodic_1d(&mesh, 0.7, 0.3).unwrap();
        let state = StateVector { values: vec![4.0; mesh.unknowns()], t: 0.0 };
        for selector in
            [SchemeSelector::Lumped, SchemeSelector::Corrected(2), SchemeSelector::Consistent]
        {
            let rhs = system.rhs(selector, &state, &NoBoundary).unwrap();
            assert!(rhs.iter().all(|v| v.abs() < 1e-11));
        }
    }

    #[test]
    fn corrected_rhs_adds_second_difference_of_lumped_rhs() {
        let mesh = uniform_1d_periodic(0.0, 1.0, 41).unwrap();
        let system = SemiDiscrete::periodic_1d(&mesh, 1.0, 0.01).unwrap();
        let n = mesh.unknowns();
        let h = mesh.h();
        let state = StateVector {
            values: (0..n).map(|k| (2.0 * PI * mesh.node_x(k)).sin()).collect(),
            t: 0.0,
        };
        let lumped = system.rhs(SchemeSelector::Lumped, &state, &NoBoundary).unwrap();
        let first = system.rhs(SchemeSelector::Corrected(1), &state, &NoBoundary).unwrap();
        for k in 0..n {
            let second_diff =
                (lumped[(k + 1) % n] - 2.0 * lumped[k] + lumped[(k + n - 1) % n]) / (h * h);
            let expected = lumped[k] - h * h / 6.0 * second_diff;
            assert!((first[k] - expected).abs() < 1e-11, "{} vs {}", first[k], expected);
        }
    }

    #[test]
    fn evolve_zero_duration_returns_initial() {
        let mesh = uniform_1d_periodic(0.0, 1.0, 21).unwrap();
        let system = SemiDiscrete::periodic_1d(&mesh, 1.0, 0.0).unwrap();
        let initial =
            StateVector { values: (0..20).map(|k| k as f64).collect(), t: 0.25 };
        let out = system
            .evolve(SchemeSelector::Lumped, initial.clone(), &NoBoundary, 0.25, 0.1)
            .unwrap();
        assert_eq!(out.values, initial.values);
    }

    #[test]
    fn transport_conserves_lumped_mass() {
        let mesh = uniform_1d_periodic(0.0, 1.0, 101).unwrap();
        let system = SemiDiscrete::periodic_1d(&mesh, 1.0, 0.0).unwrap();
        let n = mesh.unknowns();
        for selector in [SchemeSelector::Lumped, SchemeSelector::Corrected(2)] {
            let initial = StateVector {
                values: (0..n).map(|k| (2.0 * PI * mesh.node_x(k)).sin() + 1.0).collect(),
                t: 0.0,
            };
            let total0: f64 =
                initial.values.iter().zip(&system.lumped.diag).map(|(v, d)| v * d).sum();
            let tau = system.stable_tau(selector).unwrap();
            let out = system.evolve(selector, initial, &NoBoundary, 0.1, tau).unwrap();
            let total1: f64 =
                out.values.iter().zip(&system.lumped.diag).map(|(v, d)| v * d).sum();
            assert!(
                (total1 - total0).abs() <= 1e-10 * total0.abs(),
                "{selector:?}: {total0} vs {total1}"
            );
        }
    }

    #[test]
    fn unstable_step_reports_nonfinite() {
        let mesh = uniform_1d_periodic(0.0, 1.0, 101).unwrap();
        let system = SemiDiscrete::periodic_1d(&mesh, 0.0, 1.0).unwrap();
        let n = mesh.unknowns();
        let initial = StateVector {
            values: (0..n).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect(),
            t: 0.0,
        };
        let tau = 100.0 * system.stable_tau(SchemeSelector::Lumped).unwrap();
        let res = system.evolve(SchemeSelector::Lumped, initial, &NoBoundary, 10.0, tau);
        assert!(matches!(res, Err(Error::NonFinite(_))));
    }

    #[test]
    fn symbol_exact_reference_values() {
        // Table-1/2 cells
        let params = SchemeParams::new(1.0, 1e-2, 0.02, 3.0 * PI).unwrap();
        let (rel, _) = evolve_symbol_exact(SchemeSelector::Lumped, &params, 0.1);
        assert!((rel - 5.5781e-3).abs() < 1e-7);
        let params259 = SchemeParams::new(1.0, 1e-2, 10.0 / 258.0, 3.0 * PI).unwrap();
        let (rel, _) = evolve_symbol_exact(SchemeSelector::Corrected(1), &params259, 0.1);
        assert!((rel - 1.0964e-3).abs() < 1e-7, "{rel:e}");
        let (rel, _) = evolve_symbol_exact(SchemeSelector::Consistent, &params, 0.0);
        assert_eq!(rel, 0.0);
    }

    #[test]
    fn time_stepped_matches_symbol_prediction() {
        // Corrected(1), Example-1 parameters at N = 501: tau from the symbol
        // stability rule, halved once for the time error to sit below 1e-3 of
        // the spatial error
        let mesh = uniform_1d_periodic(0.0, 10.0, 501).unwrap();
        let lambda = 1.0;
        let kappa = 1e-2;
        let p = 3.0 * PI;
        let system = SemiDiscrete::periodic_1d(&mesh, lambda, kappa).unwrap();
        let params = SchemeParams::new(lambda, kappa, mesh.h(), p).unwrap();
        let n = mesh.unknowns();
        let selector = SchemeSelector::Corrected(1);
        let tau = 0.8 * 2.8 / symbol_stability_radius(lambda, kappa, mesh.h(), selector) / 4.0;
        let re0: Vec<f64> = (0..n).map(|k| (p * mesh.node_x(k)).cos()).collect();
        let im0: Vec<f64> = (0..n).map(|k| (p * mesh.node_x(k)).sin()).collect();
        let t_end = 0.1;
        let re = system
            .evolve(selector, StateVector { values: re0, t: 0.0 }, &NoBoundary, t_end, tau)
            .unwrap();
        let im = system
            .evolve(selector, StateVector { values: im0, t: 0.0 }, &NoBoundary, t_end, tau)
            .unwrap();
        let exact_mod = (-kappa * p * p * t_end).exp();
        let mut max_rel = 0.0f64;
        for k in 0..n {
            let x = mesh.node_x(k);
            let exact_re = exact_mod * (p * x - lambda * p * t_end).cos();
            let exact_im = exact_mod * (p * x - lambda * p * t_end).sin();
            let err = (re.values[k] - exact_re).hypot(im.values[k] - exact_im);
            max_rel = max_rel.max(err / exact_mod);
        }
        let (rel_symbol, _) = evolve_symbol_exact(selector, &params, t_end);
        assert!(
            (max_rel - rel_symbol).abs() <= 1e-3 * rel_symbol,
            "time-stepped {max_rel:e} vs symbol {rel_symbol:e}"
        );
        // Table 2 pins this cell
        assert!((rel_symbol - 2.6315e-4).abs() < 1e-8);
    }

    #[test]
    fn dirichlet_flux_includes_mass_column_rate() {
        // 1D mesh with Dirichlet ends: with zero interior state the flux at the
        // boundary-adjacent interior node must carry -M_ib g_dot and the
        // stiffness column times g
        let mesh = structured_simplicial(1, &[5], &[(0.0, 1.0)]).unwrap();
        let system = SemiDiscrete::on_mesh(&mesh, 1.0, &[0.0]).unwrap();
        struct Ramp;
        impl BoundaryData for Ramp {
            fn value(&self, node: usize, _t: f64) -> f64 {
                if node == 0 {
                    2.0
                } else {
                    0.0
                }
            }
            fn rate(&self, node: usize, _t: f64) -> f64 {
                if node == 0 {
                    3.0
                } else {
                    0.0
                }
            }
        }
        let state = StateVector { values: vec![0.0; 3], t: 0.0 };
        let flux = system.flux(state.t, &state.values, &Ramp);
        let h: f64 = 0.25;
        // interior node 1 couples to boundary node 0: -K_10 g - M_10 g_dot
        let expected = -(-1.0 / h) * 2.0 - h / 6.0 * 3.0;
        assert!((flux[0] - expected).abs() < 1e-13, "{} vs {expected}", flux[0]);
        // far interior node sees nothing
        assert!(flux[1].abs() < 1e-13);
    }

    #[test]
    fn spectral_radius_matches_symbol_bound_on_periodic_mesh() {
        let mesh = uniform_1d_periodic(0.0, 10.0, 201).unwrap();
        let system = SemiDiscrete::periodic_1d(&mesh, 1.0, 1e-2).unwrap();
        for selector in [SchemeSelector::Lumped, SchemeSelector::Corrected(2)] {
            let power = system.estimate_spectral_radius(selector).unwrap();
            let bound = symbol_stability_radius(1.0, 1e-2, mesh.h(), selector);
            assert!(power <= bound * 1.0001, "{selector:?}: {power} vs {bound}");
            assert!(power >= 0.25 * bound, "{selector:?}: estimate far below bound");
        }
    }
}
