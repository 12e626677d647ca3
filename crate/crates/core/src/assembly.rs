//! P1 finite-element matrices on simplicial and periodic-interval meshes, and
//! the matrix-free Neumann correction operator.
//!
//! Element integrals are exact closed forms (no quadrature): the mass matrix is
//! |T| (1 + delta_ij) / ((d+1)(d+2)), the stiffness |T| grad(phi_i).grad(phi_j),
//! and convection (v . grad(phi_j)) integrated against phi_i with v interpolated
//! linearly from its vertex values. Assembly runs over a precomputed sparsity
//! pattern in element order, so summation is deterministic.

use crate::mesh::{factorial, Mesh1DPeriodic, SimplicialMesh};
use crate::{Error, Result};

/// Compressed sparse row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SparseMatrix {
    pub n_rows: usize,
    pub n_cols: usize,
    pub row_offsets: Vec<usize>,
    pub col_indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl SparseMatrix {
    /// y = A x.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n_cols);
        debug_assert_eq!(y.len(), self.n_rows);
        for i in 0..self.n_rows {
            let lo = self.row_offsets[i];
            let hi = self.row_offsets[i + 1];
            let mut acc = 0.0;
            for (&col, &value) in self.col_indices[lo..hi].iter().zip(&self.values[lo..hi]) {
                acc += value * x[col];
            }
            y[i] = acc;
        }
    }

    pub fn mul_vec_alloc(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n_rows];
        self.mul_vec(x, &mut y);
        y
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        for k in self.row_offsets[i]..self.row_offsets[i + 1] {
            if self.col_indices[k] == j {
                return self.values[k];
            }
        }
        0.0
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        (self.row_offsets[i]..self.row_offsets[i + 1])
            .map(move |k| (self.col_indices[k], self.values[k]))
    }

    /// Restriction to the rows and columns of `keep` (ascending node ids).
    pub fn restrict(&self, keep: &[usize]) -> SparseMatrix {
        let mut index_of = vec![usize::MAX; self.n_cols];
        for (new, &old) in keep.iter().enumerate() {
            index_of[old] = new;
        }
        let mut builder = CsrBuilder::new(keep.len(), keep.len());
        for (new_row, &old_row) in keep.iter().enumerate() {
            for (col, value) in self.row(old_row) {
                if index_of[col] != usize::MAX {
                    builder.add(new_row, index_of[col], value);
                }
            }
        }
        builder.finish()
    }

    pub fn scaled(&self, factor: f64) -> SparseMatrix {
        let mut out = self.clone();
        for v in out.values.iter_mut() {
            *v *= factor;
        }
        out
    }
}

/// Two-pass CSR accumulator with sorted, deduplicated columns per row.
struct CsrBuilder {
    n_rows: usize,
    n_cols: usize,
    entries: Vec<Vec<(usize, f64)>>,
}

impl CsrBuilder {
    fn new(n_rows: usize, n_cols: usize) -> Self {
        CsrBuilder { n_rows, n_cols, entries: vec![Vec::new(); n_rows] }
    }

    fn add(&mut self, i: usize, j: usize, v: f64) {
        self.entries[i].push((j, v));
    }

    fn finish(mut self) -> SparseMatrix {
        let mut row_offsets = Vec::with_capacity(self.n_rows + 1);
        let mut col_indices = Vec::new();
        let mut values = Vec::new();
        row_offsets.push(0);
        for row in self.entries.iter_mut() {
            // stable sort keeps the element-order accumulation deterministic
            row.sort_by_key(|&(j, _)| j);
            let mut k = 0;
            while k < row.len() {
                let j = row[k].0;
                let mut acc = 0.0;
                while k < row.len() && row[k].0 == j {
                    acc += row[k].1;
                    k += 1;
                }
                col_indices.push(j);
                values.push(acc);
            }
            row_offsets.push(col_indices.len());
        }
        SparseMatrix { n_rows: self.n_rows, n_cols: self.n_cols, row_offsets, col_indices, values }
    }
}

/// Diagonal lumped mass: row sums of the consistent mass matrix.
#[derive(Clone, Debug)]
pub struct LumpedMass {
    pub diag: Vec<f64>,
}

pub fn lump(mass: &SparseMatrix) -> Result<LumpedMass> {
    let mut diag = vec![0.0; mass.n_rows];
    for i in 0..mass.n_rows {
        diag[i] = mass.row(i).map(|(_, v)| v).sum();
        if !(diag[i] > 0.0) {
            return Err(Error::NonPositiveLumping(i));
        }
    }
    Ok(LumpedMass { diag })
}

/// Barycentric gradients and measure of one element.
fn element_geometry(mesh: &SimplicialMesh, e: usize) -> Result<(Vec<[f64; 3]>, f64)> {
    let d = mesh.dim;
    let el = mesh.element(e);
    let measure = mesh.signed_measure(e);
    if !(measure > 0.0) {
        return Err(Error::DegenerateElement { element: e, volume: measure });
    }
    let origin = mesh.node(el[0]);
    let mut jac = [[0.0f64; 3]; 3];
    for (col, &v) in el[1..].iter().enumerate() {
        let pv = mesh.node(v);
        for row in 0..d {
            jac[row][col] = pv[row] - origin[row];
        }
    }
    // barycentric gradient of vertex m+1 is row m of jac^-1 = adj(jac)/det
    let det = measure * factorial(d) as f64;
    let a = &jac;
    let mut grads = vec![[0.0f64; 3]; d + 1];
    match d {
        1 => {
            grads[1][0] = 1.0 / a[0][0];
        }
        2 => {
            let adj = [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]];
            for m in 0..2 {
                for r in 0..2 {
                    grads[m + 1][r] = adj[m][r] / det;
                }
            }
        }
        3 => {
            let adj = [
                [
                    a[1][1] * a[2][2] - a[1][2] * a[2][1],
                    a[0][2] * a[2][1] - a[0][1] * a[2][2],
                    a[0][1] * a[1][2] - a[0][2] * a[1][1],
                ],
                [
                    a[1][2] * a[2][0] - a[1][0] * a[2][2],
                    a[0][0] * a[2][2] - a[0][2] * a[2][0],
                    a[0][2] * a[1][0] - a[0][0] * a[1][2],
                ],
                [
                    a[1][0] * a[2][1] - a[1][1] * a[2][0],
                    a[0][1] * a[2][0] - a[0][0] * a[2][1],
                    a[0][0] * a[1][1] - a[0][1] * a[1][0],
                ],
            ];
            for m in 0..3 {
                for r in 0..3 {
                    grads[m + 1][r] = adj[m][r] / det;
                }
            }
        }
        _ => unreachable!(),
    }
    for r in 0..d {
        grads[0][r] = -(1..=d).map(|m| grads[m][r]).sum::<f64>();
    }
    Ok((grads, measure))
}

/// Consistent P1 mass matrix.
pub fn assemble_mass(mesh: &SimplicialMesh) -> Result<SparseMatrix> {
    let d = mesh.dim;
    let nv = d + 1;
    let denom = ((d + 1) * (d + 2)) as f64;
    let mut builder = CsrBuilder::new(mesh.n_nodes(), mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        let measure = mesh.signed_measure(e);
        if !(measure > 0.0) {
            return Err(Error::DegenerateElement { element: e, volume: measure });
        }
        let el = mesh.element(e);
        for a in 0..nv {
            for b in 0..nv {
                let w = if a == b { 2.0 } else { 1.0 };
                builder.add(el[a], el[b], measure * w / denom);
            }
        }
    }
    Ok(builder.finish())
}

/// Diffusion stiffness kappa * integral grad(phi_i).grad(phi_j).
pub fn assemble_diffusion(mesh: &SimplicialMesh, kappa: f64) -> Result<SparseMatrix> {
    let d = mesh.dim;
    let nv = d + 1;
    let mut builder = CsrBuilder::new(mesh.n_nodes(), mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        let (grads, measure) = element_geometry(mesh, e)?;
        let el = mesh.element(e);
        for a in 0..nv {
            for b in 0..nv {
                let dot: f64 = (0..d).map(|r| grads[a][r] * grads[b][r]).sum();
                builder.add(el[a], el[b], kappa * measure * dot);
            }
        }
    }
    Ok(builder.finish())
}

/// Convection integral (v . grad(phi_j)) phi_i for a constant velocity.
pub fn assemble_convection(mesh: &SimplicialMesh, velocity: &[f64]) -> Result<SparseMatrix> {
    if velocity.len() != mesh.dim {
        return Err(Error::InvalidMesh("velocity arity must match mesh dim".into()));
    }
    assemble_convection_with(mesh, |_| velocity.to_vec())
}

/// Convection with a velocity field sampled at the nodes and interpolated
/// linearly; exact for fields that are linear in the coordinates.
pub fn assemble_convection_with(
    mesh: &SimplicialMesh,
    velocity_at: impl Fn(&[f64]) -> Vec<f64>,
) -> Result<SparseMatrix> {
    let d = mesh.dim;
    let nv = d + 1;
    let denom = ((d + 1) * (d + 2)) as f64;
    let nodal: Vec<Vec<f64>> = (0..mesh.n_nodes())
        .map(|i| {
            let v = velocity_at(mesh.node(i));
            debug_assert_eq!(v.len(), d);
            v
        })
        .collect();
    let mut builder = CsrBuilder::new(mesh.n_nodes(), mesh.n_nodes());
    for e in 0..mesh.n_elements() {
        let (grads, measure) = element_geometry(mesh, e)?;
        let el = mesh.element(e);
        for a in 0..nv {
            for b in 0..nv {
                // sum_k (v_k . grad phi_b) \int phi_k phi_a
                let mut acc = 0.0;
                for (k, &node_k) in el.iter().enumerate() {
                    let dot: f64 = (0..d).map(|r| nodal[node_k][r] * grads[b][r]).sum();
                    let w = if a == k { 2.0 } else { 1.0 };
                    acc += dot * measure * w / denom;
                }
                builder.add(el[a], el[b], acc);
            }
        }
    }
    Ok(builder.finish())
}

/// Mass matrix on the periodic interval: rows (h/6, 2h/3, h/6) with wraparound.
pub fn assemble_mass_1d_periodic(mesh: &Mesh1DPeriodic) -> SparseMatrix {
    periodic_from_element(mesh, |h| [[h / 3.0, h / 6.0], [h / 6.0, h / 3.0]])
}

/// Diffusion matrix kappa * (-1/h, 2/h, -1/h) rows on the periodic interval.
pub fn assemble_diffusion_1d_periodic(mesh: &Mesh1DPeriodic, kappa: f64) -> SparseMatrix {
    periodic_from_element(mesh, |h| {
        [[kappa / h, -kappa / h], [-kappa / h, kappa / h]]
    })
}

/// Convection matrix lambda * (-1/2, 0, 1/2) rows on the periodic interval.
pub fn assemble_convection_1d_periodic(mesh: &Mesh1DPeriodic, lambda: f64) -> SparseMatrix {
    periodic_from_element(mesh, |_| {
        [[-lambda / 2.0, lambda / 2.0], [-lambda / 2.0, lambda / 2.0]]
    })
}

fn periodic_from_element(
    mesh: &Mesh1DPeriodic,
    local: impl Fn(f64) -> [[f64; 2]; 2],
) -> SparseMatrix {
    let n = mesh.unknowns();
    let h = mesh.h();
    let m = local(h);
    let mut builder = CsrBuilder::new(n, n);
    for k in 0..n {
        let nodes = [k, (k + 1) % n];
        for a in 0..2 {
            for b in 0..2 {
                builder.add(nodes[a], nodes[b], m[a][b]);
            }
        }
    }
    builder.finish()
}

/// (I + A + ... + A^n) (Mbar^-1 v) applied matrix-free, where
/// A = Mbar^-1 (Mbar - M). Each pass costs one multiply by M.
pub fn correction_apply(
    mass: &SparseMatrix,
    lumped: &LumpedMass,
    v: &[f64],
    n: usize,
) -> Vec<f64> {
    let len = v.len();
    let mut w: Vec<f64> = v.iter().zip(&lumped.diag).map(|(x, d)| x / d).collect();
    let mut acc = w.clone();
    let mut mw = vec![0.0; len];
    for _ in 0..n {
        mass.mul_vec(&w, &mut mw);
        for i in 0..len {
            w[i] -= mw[i] / lumped.diag[i];
        }
        for i in 0..len {
            acc[i] += w[i];
        }
    }
    acc
}
