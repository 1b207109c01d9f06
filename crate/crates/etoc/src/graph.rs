//! Communication topology: weighted digraphs, Laplacian spectra, and the
//! orthonormal complement of the agreement direction.
//!
//! Edges follow the adjacency convention of the consensus literature: an edge
//! `(from j, to i)` with weight `a_ij > 0` means agent `i` receives the
//! information of agent `j`, and `a_ij` sits at row `i`, column `j` of the
//! adjacency matrix.

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

/// Algebraic identity tolerance for double-precision dense linear algebra.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Eigenvalue nonnegativity tolerance for Sym(L).
pub const EIG_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("graph must have at least one node")]
    Empty,
    #[error("edge ({from}, {to}) references a node outside 1..={n}")]
    NodeOutOfRange { from: usize, to: usize, n: usize },
    #[error("self-loop at node {node}")]
    SelfLoop { node: usize },
    #[error("edge ({from}, {to}) has non-positive weight {weight}")]
    NonPositiveWeight { from: usize, to: usize, weight: f64 },
    #[error("complement basis requires n >= 2, got {n}")]
    BasisTooSmall { n: usize },
    #[error("eigen decomposition failed: {0}")]
    EigenFailure(String),
}

/// Directed edge `from -> to` carrying weight `a_{to,from}`; nodes 0-indexed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Weighted digraph over nodes `1..=n` (stored 0-indexed).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDigraph {
    n: usize,
    edges: Vec<Edge>,
}

impl WeightedDigraph {
    /// Build from 1-indexed `(from, to, weight)` triples, validating weights,
    /// self-loops, and node ranges.
    pub fn new(n: usize, edges: &[(usize, usize, f64)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut out = Vec::with_capacity(edges.len());
        for &(from, to, weight) in edges {
            if from == 0 || to == 0 || from > n || to > n {
                return Err(GraphError::NodeOutOfRange { from, to, n });
            }
            if from == to {
                return Err(GraphError::SelfLoop { node: from });
            }
            if !(weight > 0.0) {
                return Err(GraphError::NonPositiveWeight { from, to, weight });
            }
            out.push(Edge { from: from - 1, to: to - 1, weight });
        }
        Ok(Self { n, edges: out })
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Weighted adjacency matrix with `a_ij` at row `i`, column `j`.
    pub fn adjacency(&self) -> DMatrix<f64> {
        let mut a = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            a[(e.to, e.from)] += e.weight;
        }
        a
    }

    /// In-degree Laplacian `L = D_in - A`; every row sums to zero.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let a = self.adjacency();
        let mut l = -a;
        for i in 0..self.n {
            let row_sum: f64 = -l.row(i).sum();
            l[(i, i)] = row_sum;
        }
        l
    }

    fn reachable(&self, start: usize, reversed: bool) -> usize {
        let mut seen = vec![false; self.n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut count = 1;
        while let Some(node) = stack.pop() {
            for e in &self.edges {
                let (tail, head) = if reversed { (e.to, e.from) } else { (e.from, e.to) };
                if tail == node && !seen[head] {
                    seen[head] = true;
                    count += 1;
                    stack.push(head);
                }
            }
        }
        count
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.reachable(0, false) == self.n && self.reachable(0, true) == self.n
    }

    /// In-weight equals out-weight at every node, within `ALGEBRA_TOL`.
    pub fn is_weight_balanced(&self) -> bool {
        let mut in_w = vec![0.0; self.n];
        let mut out_w = vec![0.0; self.n];
        for e in &self.edges {
            in_w[e.to] += e.weight;
            out_w[e.from] += e.weight;
        }
        in_w
            .iter()
            .zip(&out_w)
            .all(|(i, o)| (i - o).abs() <= ALGEBRA_TOL)
    }

    /// Verifies the standing connectivity assumption: returns
    /// `(strongly_connected, weight_balanced)`.
    pub fn check_assumption2(&self) -> (bool, bool) {
        (self.is_strongly_connected(), self.is_weight_balanced())
    }

    /// Full spectral report for this graph.
    pub fn spectral_report(&self) -> Result<SpectralReport, GraphError> {
        let l = self.laplacian();
        let (strongly_connected, weight_balanced) = self.check_assumption2();
        let (sym_eigs, lambda2, lambda_n) = sym_spectrum(&l)?;
        Ok(SpectralReport {
            laplacian: l,
            sym_eigs,
            lambda2,
            lambda_n,
            strongly_connected,
            weight_balanced,
        })
    }
}

/// Spectral data of `Sym(L) = (L + L^T)/2` plus connectivity flags.
#[derive(Debug, Clone)]
pub struct SpectralReport {
    pub laplacian: DMatrix<f64>,
    /// Eigenvalues of `Sym(L)`, sorted ascending.
    pub sym_eigs: DVector<f64>,
    /// Second-smallest eigenvalue; `None` for a single-node graph.
    pub lambda2: Option<f64>,
    /// Largest eigenvalue.
    pub lambda_n: f64,
    pub strongly_connected: bool,
    pub weight_balanced: bool,
}

/// Eigenvalues of `Sym(L)` sorted ascending, with the second-smallest and
/// largest pulled out.
pub fn sym_spectrum(l: &DMatrix<f64>) -> Result<(DVector<f64>, Option<f64>, f64), GraphError> {
    if l.nrows() != l.ncols() {
        return Err(GraphError::EigenFailure(format!(
            "matrix is {}x{}, expected square",
            l.nrows(),
            l.ncols()
        )));
    }
    let sym = (l + l.transpose()) * 0.5;
    let eig = sym
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| GraphError::EigenFailure("symmetric eigensolver did not converge".into()))?;
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let lambda2 = if vals.len() >= 2 { Some(vals[1]) } else { None };
    let lambda_n = *vals.last().unwrap();
    Ok((DVector::from_vec(vals), lambda2, lambda_n))
}

/// Orthonormal basis split of R^n into the agreement direction and its
/// complement: `m1 = 1/sqrt(n) * 1`, and `m2` whose columns span `1^⊥` with
/// `m2^T m1 = 0`, `m2^T m2 = I`, `m2 m2^T = I - m1 m1^T`.
#[derive(Debug, Clone)]
pub struct ComplementBasis {
    pub m1: DVector<f64>,
    pub m2: DMatrix<f64>,
}

/// Householder construction: reflect `e1` onto `m1`; the remaining columns of
/// the (symmetric, orthogonal) reflector span the complement.
pub fn complement_basis(n: usize) -> Result<ComplementBasis, GraphError> {
    if n < 2 {
        return Err(GraphError::BasisTooSmall { n });
    }
    let m1 = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut w = m1.clone();
    w[0] -= 1.0;
    let denom = w.norm_squared();
    let mut h = DMatrix::identity(n, n);
    if denom > 0.0 {
        h -= (&w * w.transpose()) * (2.0 / denom);
    }
    let m2 = h.columns(1, n - 1).into_owned();
    Ok(ComplementBasis { m1, m2 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Directed ring 1 -> 2 -> 3 -> 1 plus the 3 <-> 4 pair, unit weights.
    pub(crate) fn four_agent_graph() -> WeightedDigraph {
        WeightedDigraph::new(
            4,
            &[
                (1, 2, 1.0),
                (2, 3, 1.0),
                (3, 1, 1.0),
                (3, 4, 1.0),
                (4, 3, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn laplacian_of_four_agent_graph() {
        let l = four_agent_graph().laplacian();
        let expected = DMatrix::from_row_slice(
            4,
            4,
            &[
                1.0, 0.0, -1.0, 0.0, //
                -1.0, 1.0, 0.0, 0.0, //
                0.0, -1.0, 2.0, -1.0, //
                0.0, 0.0, -1.0, 1.0,
            ],
        );
        assert_eq!(l, expected);
    }

    #[test]
    fn laplacian_two_node_bidirectional() {
        let g = WeightedDigraph::new(2, &[(1, 2, 1.0), (2, 1, 1.0)]).unwrap();
        assert_eq!(g.laplacian(), DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn laplacian_single_node() {
        let g = WeightedDigraph::new(1, &[]).unwrap();
        assert_eq!(g.laplacian(), DMatrix::from_row_slice(1, 1, &[0.0]));
    }

    #[test]
    fn laplacian_rows_sum_to_zero() {
        let g = WeightedDigraph::new(3, &[(1, 2, 0.5), (2, 3, 2.0), (3, 1, 1.5), (1, 3, 0.25)]).unwrap();
        let l = g.laplacian();
        for i in 0..3 {
            assert_relative_eq!(l.row(i).sum(), 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn assumption2_on_four_agent_graph() {
        assert_eq!(four_agent_graph().check_assumption2(), (true, true));
    }

    #[test]
    fn assumption2_chain_fails_both() {
        let g = WeightedDigraph::new(3, &[(1, 2, 1.0), (2, 3, 1.0)]).unwrap();
        assert_eq!(g.check_assumption2(), (false, false));
    }

    #[test]
    fn assumption2_unbalanced_two_node() {
        let g = WeightedDigraph::new(2, &[(1, 2, 1.0), (2, 1, 2.0)]).unwrap();
        assert_eq!(g.check_assumption2(), (true, false));
    }

    #[test]
    fn weight_balance_matches_column_sums() {
        let g = four_agent_graph();
        let l = g.laplacian();
        let col_sums_zero = (0..4).all(|j| l.column(j).sum().abs() < ALGEBRA_TOL);
        assert_eq!(g.is_weight_balanced(), col_sums_zero);
    }

    #[test]
    fn sym_spectrum_two_node() {
        let l = DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0]);
        let (eigs, lambda2, lambda_n) = sym_spectrum(&l).unwrap();
        assert_relative_eq!(eigs[0], 0.0, epsilon = 1e-12);
        assert_relative_eq!(lambda2.unwrap(), 2.0, epsilon = 1e-12);
        assert_relative_eq!(lambda_n, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn sym_spectrum_four_agent_graph() {
        // Frozen by an independent eigensolver run on Sym(L) of the 4x4.
        let report = four_agent_graph().spectral_report().unwrap();
        assert!(report.sym_eigs[0].abs() < 1e-10);
        assert_relative_eq!(report.lambda2.unwrap(), 0.7192235935955847, epsilon = 1e-9);
        assert_relative_eq!(report.lambda_n, 2.780776406404416, epsilon = 1e-9);
        assert!(report.sym_eigs.iter().all(|&e| e >= -EIG_TOL));
    }

    #[test]
    fn sym_spectrum_zero_matrix() {
        let (eigs, lambda2, lambda_n) = sym_spectrum(&DMatrix::zeros(3, 3)).unwrap();
        assert!(eigs.iter().all(|&e| e.abs() < 1e-14));
        assert_eq!(lambda2.unwrap(), 0.0);
        assert_eq!(lambda_n, 0.0);
    }

    #[test]
    fn connected_multiplicity_of_zero_is_one() {
        let report = four_agent_graph().spectral_report().unwrap();
        assert!(report.strongly_connected && report.weight_balanced);
        assert!(report.lambda2.unwrap() > 1e-8);
    }

    #[test]
    fn complement_basis_two_nodes() {
        let b = complement_basis(2).unwrap();
        let r = 1.0 / 2.0_f64.sqrt();
        assert_relative_eq!(b.m1[0], r, epsilon = 1e-15);
        assert_relative_eq!(b.m1[1], r, epsilon = 1e-15);
        // Unique up to sign.
        assert_relative_eq!(b.m2[(0, 0)].abs(), r, epsilon = 1e-14);
        assert_relative_eq!(b.m2[(1, 0)].abs(), r, epsilon = 1e-14);
        assert_relative_eq!(b.m2[(0, 0)] + b.m2[(1, 0)], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn complement_basis_identities() {
        for n in 2..=8 {
            let b = complement_basis(n).unwrap();
            let nm1 = n - 1;
            assert!((b.m2.transpose() * &b.m1).norm() < ALGEBRA_TOL);
            assert!((b.m2.transpose() * &b.m2 - DMatrix::identity(nm1, nm1)).norm() < ALGEBRA_TOL);
            let proj = DMatrix::identity(n, n) - &b.m1 * b.m1.transpose();
            assert!((&b.m2 * b.m2.transpose() - proj).norm() < ALGEBRA_TOL);
        }
    }

    #[test]
    fn complement_basis_rejects_small_n() {
        assert!(complement_basis(1).is_err());
    }

    #[test]
    fn invalid_graphs_rejected() {
        assert!(WeightedDigraph::new(0, &[]).is_err());
        assert!(WeightedDigraph::new(2, &[(1, 1, 1.0)]).is_err());
        assert!(WeightedDigraph::new(2, &[(1, 3, 1.0)]).is_err());
        assert!(WeightedDigraph::new(2, &[(1, 2, 0.0)]).is_err());
        assert!(WeightedDigraph::new(2, &[(1, 2, -1.0)]).is_err());
    }
}
