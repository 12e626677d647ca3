//! Mesh construction and I/O: uniform periodic 1D meshes, structured simplicial
//! meshes in 1D/2D/3D, seeded interior-node perturbation and a line-oriented
//! text format.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::{Error, Result};

/// Uniform periodic interval mesh. Node count follows h = (b - a)/(n_nodes - 1),
/// with the last node identified with the first; the system then has
/// n_nodes - 1 unknowns with cyclic neighbours.
#[derive(Clone, Copy, Debug)]
pub struct Mesh1DPeriodic {
    pub a: f64,
    pub b: f64,
    pub n_nodes: usize,
}

impl Mesh1DPeriodic {
    pub fn h(&self) -> f64 {
        (self.b - self.a) / (self.n_nodes - 1) as f64
    }

    /// Number of distinct unknowns.
    pub fn unknowns(&self) -> usize {
        self.n_nodes - 1
    }

    pub fn node_x(&self, k: usize) -> f64 {
        self.a + self.h() * k as f64
    }
}

pub fn uniform_1d_periodic(a: f64, b: f64, n_nodes: usize) -> Result<Mesh1DPeriodic> {
    if n_nodes < 3 {
        return Err(Error::InvalidMesh(format!("need at least 3 nodes, got {n_nodes}")));
    }
    if !(b > a) {
        return Err(Error::InvalidMesh(format!("empty interval [{a}, {b}]")));
    }
    Ok(Mesh1DPeriodic { a, b, n_nodes })
}

/// P1 simplicial mesh: segments, triangles or tetrahedra.
#[derive(Clone, Debug, PartialEq)]
pub struct SimplicialMesh {
    pub dim: usize,
    /// Node coordinates, `dim` per node.
    pub nodes: Vec<f64>,
    /// Element connectivity, `dim + 1` node indices per element.
    pub elements: Vec<usize>,
    /// Per-node boundary flag.
    pub boundary: Vec<bool>,
}

impl SimplicialMesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len() / self.dim
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len() / (self.dim + 1)
    }

    pub fn node(&self, i: usize) -> &[f64] {
        &self.nodes[i * self.dim..(i + 1) * self.dim]
    }

    pub fn element(&self, e: usize) -> &[usize] {
        &self.elements[e * (self.dim + 1)..(e + 1) * (self.dim + 1)]
    }

    /// Signed volume of element e (length / area / volume up to orientation).
    pub fn signed_measure(&self, e: usize) -> f64 {
        let el = self.element(e);
        let origin = self.node(el[0]);
        let d = self.dim;
        let mut jac = [0.0f64; 9];
        for (col, &v) in el[1..].iter().enumerate() {
            let pv = self.node(v);
            for row in 0..d {
                jac[row * d + col] = pv[row] - origin[row];
            }
        }
        let det = match d {
            1 => jac[0],
            2 => jac[0] * jac[3] - jac[1] * jac[2],
            3 => {
                jac[0] * (jac[4] * jac[8] - jac[5] * jac[7])
                    - jac[1] * (jac[3] * jac[8] - jac[5] * jac[6])
                    + jac[2] * (jac[3] * jac[7] - jac[4] * jac[6])
            }
            _ => unreachable!(),
        };
        det / factorial(d) as f64
    }

    pub fn total_measure(&self) -> f64 {
        (0..self.n_elements()).map(|e| self.signed_measure(e)).sum()
    }

    fn check_positive_measures(&self) -> Result<()> {
        for e in 0..self.n_elements() {
            let v = self.signed_measure(e);
            if !(v > 0.0) {
                return Err(Error::DegenerateElement { element: e, volume: v });
            }
        }
        Ok(())
    }
}

pub(crate) fn factorial(d: usize) -> usize {
    (1..=d).product::<usize>().max(1)
}

/// Tensor-product node grid on a box, split into simplices.
///
/// 2D cells are split along the (i+1, j) -- (i, j+1) diagonal, which is the
/// triangulation the uniform-grid experiments in the reference tables use;
/// 3D cells are split into six tetrahedra sharing the cell diagonal.
pub fn structured_simplicial(
    dim: usize,
    counts: &[usize],
    bounds: &[(f64, f64)],
) -> Result<SimplicialMesh> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidMesh(format!("dim = {dim} not in 1..=3")));
    }
    if counts.len() != dim || bounds.len() != dim {
        return Err(Error::InvalidMesh("counts/bounds arity must match dim".into()));
    }
    if counts.iter().any(|&c| c < 2) {
        return Err(Error::InvalidMesh("need at least 2 nodes per direction".into()));
    }
    if bounds.iter().any(|&(lo, hi)| !(hi > lo)) {
        return Err(Error::InvalidMesh("degenerate bounds".into()));
    }
    let coords: Vec<Vec<f64>> = (0..dim)
        .map(|d| {
            let (lo, hi) = bounds[d];
            let n = counts[d];
            (0..n).map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64).collect()
        })
        .collect();

    let mut nodes = Vec::new();
    let mut boundary = Vec::new();
    match dim {
        1 => {
            for i in 0..counts[0] {
                nodes.push(coords[0][i]);
                boundary.push(i == 0 || i == counts[0] - 1);
            }
        }
        2 => {
            for j in 0..counts[1] {
                for i in 0..counts[0] {
                    nodes.extend_from_slice(&[coords[0][i], coords[1][j]]);
                    boundary
                        .push(i == 0 || i == counts[0] - 1 || j == 0 || j == counts[1] - 1);
                }
            }
        }
        3 => {
            for k in 0..counts[2] {
                for j in 0..counts[1] {
                    for i in 0..counts[0] {
                        nodes.extend_from_slice(&[coords[0][i], coords[1][j], coords[2][k]]);
                        boundary.push(
                            i == 0
                                || i == counts[0] - 1
                                || j == 0
                                || j == counts[1] - 1
                                || k == 0
                                || k == counts[2] - 1,
                        );
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    let mut elements = Vec::new();
    match dim {
        1 => {
            for i in 0..counts[0] - 1 {
                elements.extend_from_slice(&[i, i + 1]);
            }
        }
        2 => {
            let nx = counts[0];
            let id = |i: usize, j: usize| j * nx + i;
            for j in 0..counts[1] - 1 {
                for i in 0..nx - 1 {
                    let (n00, n10, n01, n11) =
                        (id(i, j), id(i + 1, j), id(i, j + 1), id(i + 1, j + 1));
                    elements.extend_from_slice(&[n00, n10, n01]);
                    elements.extend_from_slice(&[n10, n11, n01]);
                }
            }
        }
        3 => {
            let (nx, ny) = (counts[0], counts[1]);
            let id = |i: usize, j: usize, k: usize| (k * ny + j) * nx + i;
            // six tetrahedra per cell, each a monotone lattice path 000 -> 111
            const PERMS: [[usize; 3]; 6] =
                [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            for k in 0..counts[2] - 1 {
                for j in 0..ny - 1 {
                    for i in 0..nx - 1 {
                        for perm in PERMS {
                            let mut at = [0usize; 3];
                            let mut tet = [id(i, j, k); 4];
                            for (step, &axis) in perm.iter().enumerate() {
                                at[axis] = 1;
                                tet[step + 1] = id(i + at[0], j + at[1], k + at[2]);
                            }
                            elements.extend_from_slice(&orient_positive(&nodes, dim, tet));
                        }
                    }
                }
            }
        }
        _ => unreachable!(),
    }

    let mesh = SimplicialMesh { dim, nodes, elements, boundary };
    mesh.check_positive_measures()?;
    Ok(mesh)
}

fn orient_positive(nodes: &[f64], dim: usize, mut el: [usize; 4]) -> [usize; 4] {
    let probe = SimplicialMesh {
        dim,
        nodes: nodes.to_vec(),
        elements: el.to_vec(),
        boundary: Vec::new(),
    };
    if probe.signed_measure(0) < 0.0 {
        el.swap(2, 3);
    }
    el
}

/// Displace interior nodes by seeded uniform offsets of `amplitude` times the
/// local grid spacing per coordinate; boundary nodes stay put. Nodes whose
/// star turns inside out get their displacement halved, up to 10 rounds.
pub fn perturb_interior(
    mesh: &SimplicialMesh,
    amplitude: f64,
    seed: u64,
) -> Result<SimplicialMesh> {
    if !(0.0..0.5).contains(&amplitude) {
        return Err(Error::InvalidMesh(format!(
            "amplitude {amplitude} outside [0, 0.5)"
        )));
    }
    let dim = mesh.dim;
    let n = mesh.n_nodes();
    // local scale per node: the shortest incident edge of the unperturbed mesh
    let mut scale = vec![f64::INFINITY; n];
    for e in 0..mesh.n_elements() {
        let el = mesh.element(e);
        for a in 0..el.len() {
            for b in (a + 1)..el.len() {
                let pa = mesh.node(el[a]);
                let pb = mesh.node(el[b]);
                let len2: f64 = (0..dim).map(|d| (pa[d] - pb[d]).powi(2)).sum();
                let len = len2.sqrt();
                scale[el[a]] = scale[el[a]].min(len);
                scale[el[b]] = scale[el[b]].min(len);
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut offsets = vec![0.0f64; n * dim];
    for i in 0..n {
        for d in 0..dim {
            let u: f64 = rng.gen_range(-1.0..1.0);
            if !mesh.boundary[i] {
                offsets[i * dim + d] = amplitude * scale[i] * u;
            }
        }
    }

    let mut out = mesh.clone();
    for round in 0..=10 {
        for i in 0..n {
            for d in 0..dim {
                out.nodes[i * dim + d] = mesh.nodes[i * dim + d] + offsets[i * dim + d];
            }
        }
        let mut bad_nodes = Vec::new();
        for e in 0..out.n_elements() {
            if !(out.signed_measure(e) > 0.0) {
                bad_nodes.extend_from_slice(out.element(e));
            }
        }
        if bad_nodes.is_empty() {
            return Ok(out);
        }
        if round == 10 {
            break;
        }
        bad_nodes.sort_unstable();
        bad_nodes.dedup();
        for i in bad_nodes {
            for d in 0..dim {
                offsets[i * dim + d] *= 0.5;
            }
        }
    }
    let e = (0..out.n_elements()).find(|&e| !(out.signed_measure(e) > 0.0)).unwrap();
    Err(Error::DegenerateElement { element: e, volume: out.signed_measure(e) })
}

/// Serialize to the line-oriented text format:
/// `dim d` / `nodes N` / N coordinate lines / `elements E` / E index lines /
/// `boundary B` / B node indices.
pub fn write_mesh(mesh: &SimplicialMesh) -> String {
    let mut out = String::new();
    out.push_str(&format!("dim {}\n", mesh.dim));
    out.push_str(&format!("nodes {}\n", mesh.n_nodes()));
    for i in 0..mesh.n_nodes() {
        let coords: Vec<String> = mesh.node(i).iter().map(|v| format!("{v}")).collect();
        out.push_str(&coords.join(" "));
        out.push('\n');
    }
    out.push_str(&format!("elements {}\n", mesh.n_elements()));
    for e in 0..mesh.n_elements() {
        let ids: Vec<String> = mesh.element(e).iter().map(|v| v.to_string()).collect();
        out.push_str(&ids.join(" "));
        out.push('\n');
    }
    let boundary: Vec<usize> =
        (0..mesh.n_nodes()).filter(|&i| mesh.boundary[i]).collect();
    out.push_str(&format!("boundary {}\n", boundary.len()));
    for i in boundary {
        out.push_str(&format!("{i}\n"));
    }
    out
}

fn expect_header<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    tag: &str,
) -> Result<(usize, usize)> {
    let (idx, line) = lines
        .next()
        .ok_or_else(|| Error::Parse { line: 0, message: format!("missing '{tag}' line") })?;
    let mut parts = line.split_whitespace();
    let head = parts.next().unwrap_or("");
    if head != tag {
        return Err(Error::Parse {
            line: idx + 1,
            message: format!("expected '{tag}', found '{head}'"),
        });
    }
    let count: usize = parts
        .next()
        .ok_or_else(|| Error::Parse { line: idx + 1, message: format!("missing {tag} count") })?
        .parse()
        .map_err(|_| Error::Parse { line: idx + 1, message: format!("bad {tag} count") })?;
    if parts.next().is_some() {
        return Err(Error::Parse { line: idx + 1, message: "trailing tokens".into() });
    }
    Ok((idx + 1, count))
}

pub fn read_mesh(text: &str) -> Result<SimplicialMesh> {
    let mut lines = text.lines().enumerate();
    let (_, dim) = expect_header(&mut lines, "dim")?;
    if !(1..=3).contains(&dim) {
        return Err(Error::Parse { line: 1, message: format!("dim = {dim} not in 1..=3") });
    }
    let (_, n_nodes) = expect_header(&mut lines, "nodes")?;
    let mut nodes = Vec::with_capacity(n_nodes * dim);
    for _ in 0..n_nodes {
        let (idx, line) = lines
            .next()
            .ok_or(Error::Parse { line: 0, message: "missing node line".into() })?;
        let vals: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: idx + 1, message: "bad coordinate".into() })?;
        if vals.len() != dim {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {dim} coordinates, found {}", vals.len()),
            });
        }
        nodes.extend_from_slice(&vals);
    }
    let (_, n_elements) = expect_header(&mut lines, "elements")?;
    let mut elements = Vec::with_capacity(n_elements * (dim + 1));
    for _ in 0..n_elements {
        let (idx, line) = lines
            .next()
            .ok_or(Error::Parse { line: 0, message: "missing element line".into() })?;
        let ids: Vec<usize> = line
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::Parse { line: idx + 1, message: "bad node index".into() })?;
        if ids.len() != dim + 1 {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected {} indices, found {}", dim + 1, ids.len()),
            });
        }
        if let Some(&bad) = ids.iter().find(|&&i| i >= n_nodes) {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("node index {bad} out of range (nodes = {n_nodes})"),
            });
        }
        elements.extend_from_slice(&ids);
    }
    let (_, n_boundary) = expect_header(&mut lines, "boundary")?;
    let mut boundary = vec![false; n_nodes];
    for _ in 0..n_boundary {
        let (idx, line) = lines
            .next()
            .ok_or(Error::Parse { line: 0, message: "missing boundary line".into() })?;
        let i: usize = line
            .trim()
            .parse()
            .map_err(|_| Error::Parse { line: idx + 1, message: "bad boundary index".into() })?;
        if i >= n_nodes {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("boundary index {i} out of range"),
            });
        }
        boundary[i] = true;
    }
    Ok(SimplicialMesh { dim, nodes, elements, boundary })
}
