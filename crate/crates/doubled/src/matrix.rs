//! Square complex matrices produced by CJ reshapings, and the Hermitian
//! spectral routines used to certify them.
//!
//! The eigensolver is a cyclic Jacobi iteration on the Hermitian part of the
//! matrix; it is dependency-free and accurate enough for the dimensions this
//! crate works at (≤ 256).

use num_complex::Complex64 as C64;

use crate::doubling::PairingSpec;
use crate::error::{Error, Result};
use crate::tensor::{advance_index, StateTensor};

/// Sweep cap for the Jacobi iteration.
pub const JACOBI_SWEEP_CAP: usize = 100;

/// The iteration stops once the off-diagonal Frobenius mass drops below
/// `JACOBI_OFF_FACTOR * (frobenius_norm + 1)`.
pub const JACOBI_OFF_FACTOR: f64 = 1e-12;

/// A square complex matrix, optionally remembering the pairing that
/// produced it.
#[derive(Clone, Debug, PartialEq)]
pub struct CJMatrix {
    dim: usize,
    entries: Vec<C64>,
    pairing: Option<PairingSpec>,
}

impl CJMatrix {
    pub fn new(dim: usize, entries: Vec<C64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::Shape(format!(
                "{} entries do not fill a {dim}x{dim} matrix",
                entries.len()
            )));
        }
        if let Some(bad) = entries.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(CJMatrix {
            dim,
            entries,
            pairing: None,
        })
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        let mut entries = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                entries.push(f(r, c));
            }
        }
        CJMatrix::new(dim, entries)
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = CJMatrix {
            dim,
            entries: vec![C64::new(0.0, 0.0); dim * dim],
            pairing: None,
        };
        for i in 0..dim {
            m.entries[i * dim + i] = C64::new(1.0, 0.0);
        }
        m
    }

    pub(crate) fn with_pairing(mut self, pairing: PairingSpec) -> Self {
        self.pairing = Some(pairing);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    /// The pairing this matrix was reshaped along, if any.
    pub fn pairing(&self) -> Option<&PairingSpec> {
        self.pairing.as_ref()
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.entries[row * self.dim + col]
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation from self-adjointness,
    /// `max |m[i][j] - conj(m[j][i])|`.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut defect = 0.0f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                defect = defect.max(d);
            }
        }
        defect
    }

    pub fn scale(&mut self, c: f64) {
        for a in &mut self.entries {
            *a *= c;
        }
    }

    /// Largest entrywise distance to another matrix of the same dimension.
    pub fn max_dist(&self, other: &CJMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_dist over mismatched dims");
        self.entries
            .iter()
            .zip(other.entries.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Scale-aware tolerance: `tol * (dim * max|entry| + 1)`.
pub fn scaled_tolerance(tol: f64, m: &CJMatrix) -> f64 {
    tol * (m.dim as f64 * m.max_abs() + 1.0)
}

/// Reshape a tensor into a matrix by splitting its factors into row and
/// column groups. The groups must partition all positions and carry equal
/// total dimension. Row and column multi-indices are assembled in the order
/// the positions are listed. The reshaping is linear: no conjugation is
/// applied to either group.
pub fn reshape_group(t: &StateTensor, rows: &[usize], cols: &[usize]) -> Result<CJMatrix> {
    let rank = t.shape().rank();
    let mut seen = vec![false; rank];
    for &p in rows.iter().chain(cols.iter()) {
        if p >= rank {
            return Err(Error::Shape(format!("position {p} out of range for rank {rank}")));
        }
        if seen[p] {
            return Err(Error::Shape(format!("position {p} listed twice")));
        }
        seen[p] = true;
    }
    if !seen.iter().all(|&s| s) {
        return Err(Error::Shape("row and column groups must cover all factors".into()));
    }
    let dims = t.shape().dims();
    let row_size: usize = rows.iter().map(|&p| dims[p]).product();
    let col_size: usize = cols.iter().map(|&p| dims[p]).product();
    if row_size != col_size {
        return Err(Error::Shape(format!(
            "row size {row_size} != column size {col_size}"
        )));
    }

    let row_dims: Vec<usize> = rows.iter().map(|&p| dims[p]).collect();
    let col_dims: Vec<usize> = cols.iter().map(|&p| dims[p]).collect();
    let mut entries = vec![C64::new(0.0, 0.0); row_size * col_size];
    let mut full = vec![0usize; rank];
    let mut rmulti = vec![0usize; rows.len()];
    let mut r = 0usize;
    loop {
        for (&p, &v) in rows.iter().zip(rmulti.iter()) {
            full[p] = v;
        }
        let mut cmulti = vec![0usize; cols.len()];
        let mut c = 0usize;
        loop {
            for (&p, &v) in cols.iter().zip(cmulti.iter()) {
                full[p] = v;
            }
            entries[r * col_size + c] = t.get(&full);
            c += 1;
            if !advance_index(&mut cmulti, &col_dims) {
                break;
            }
        }
        r += 1;
        if !advance_index(&mut rmulti, &row_dims) {
            break;
        }
    }
    CJMatrix::new(row_size, entries)
}

/// Eigenvalues of the Hermitian part `(m + m†)/2`, ascending.
pub fn hermitian_eigenvalues(m: &CJMatrix) -> Result<Vec<f64>> {
    Ok(hermitian_eigen(m)?.0)
}

/// Eigenvalues (ascending) and matching orthonormal eigenvectors of the
/// Hermitian part of `m`. Vector `k` is returned as column `k`.
pub fn hermitian_eigen(m: &CJMatrix) -> Result<(Vec<f64>, Vec<Vec<C64>>)> {
    let n = m.dim;
    if n == 0 {
        return Ok((Vec::new(), Vec::new()));
    }
    // Hermitian part.
    let mut a = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = 0.5 * (m.get(i, j) + m.get(j, i).conj());
        }
    }
    let mut v = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        v[i * n + i] = C64::new(1.0, 0.0);
    }

    let frob: f64 = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let threshold = JACOBI_OFF_FACTOR * (frob + 1.0);

    let mut converged = false;
    for _ in 0..JACOBI_SWEEP_CAP {
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in 0..n {
                    if p != q {
                        s += a[p * n + q].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        if off < threshold {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                jacobi_rotate(&mut a, &mut v, n, p, q);
            }
        }
    }
    if !converged {
        // One final check; the last sweep may have finished the job.
        let off: f64 = {
            let mut s = 0.0;
            for p in 0..n {
                for q in 0..n {
                    if p != q {
                        s += a[p * n + q].norm_sqr();
                    }
                }
            }
            s.sqrt()
        };
        if off >= threshold {
            return Err(Error::NonConvergence {
                sweeps: JACOBI_SWEEP_CAP,
            });
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values: Vec<f64> = order.iter().map(|&i| a[i * n + i].re).collect();
    let vectors: Vec<Vec<C64>> = order
        .iter()
        .map(|&k| (0..n).map(|r| v[r * n + k]).collect())
        .collect();
    Ok((values, vectors))
}

/// One Jacobi rotation annihilating the (p, q) entry of the Hermitian
/// matrix `a`, with the rotation accumulated into `v`.
fn jacobi_rotate(a: &mut [C64], v: &mut [C64], n: usize, p: usize, q: usize) {
    let beta = a[p * n + q];
    let abs_beta = beta.norm();
    if abs_beta == 0.0 {
        return;
    }
    let w = beta / abs_beta;
    let alpha = a[p * n + p].re;
    let gamma = a[q * n + q].re;
    let delta = alpha - gamma;
    let disc = (delta * delta + 4.0 * abs_beta * abs_beta).sqrt();
    // Smaller-magnitude root of |β|t² + (α−γ)t − |β| = 0.
    let t = if delta >= 0.0 {
        2.0 * abs_beta / (delta + disc)
    } else {
        -2.0 * abs_beta / (-delta + disc)
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    let wbar = w.conj();

    for r in 0..n {
        if r == p || r == q {
            continue;
        }
        let arp = a[r * n + p];
        let arq = a[r * n + q];
        let new_rp = c * arp + s * wbar * arq;
        let new_rq = -s * w * arp + c * arq;
        a[r * n + p] = new_rp;
        a[r * n + q] = new_rq;
        a[p * n + r] = new_rp.conj();
        a[q * n + r] = new_rq.conj();
    }
    let new_pp = alpha * c * c + gamma * s * s + 2.0 * c * s * abs_beta;
    let new_qq = alpha * s * s + gamma * c * c - 2.0 * c * s * abs_beta;
    a[p * n + p] = C64::new(new_pp, 0.0);
    a[q * n + q] = C64::new(new_qq, 0.0);
    a[p * n + q] = C64::new(0.0, 0.0);
    a[q * n + p] = C64::new(0.0, 0.0);

    for r in 0..n {
        let vrp = v[r * n + p];
        let vrq = v[r * n + q];
        v[r * n + p] = c * vrp + s * wbar * vrq;
        v[r * n + q] = -s * w * vrp + c * vrq;
    }
}

/// Whether `m` is self-adjoint and positive semi-definite within the
/// scale-aware tolerance `tol * (dim * max|entry| + 1)`.
pub fn is_psd(m: &CJMatrix, tol: f64) -> Result<bool> {
    let scaled = scaled_tolerance(tol, m);
    if m.hermiticity_defect() > scaled {
        return Ok(false);
    }
    let values = hermitian_eigenvalues(m)?;
    Ok(values.first().map_or(true, |&min| min >= -scaled))
}

/// Partial transpose over the second tensor factor of a `d1*d2`-dimensional
/// matrix: entry `[(i1,i2),(j1,j2)]` moves to `[(i1,j2),(j1,i2)]`.
pub fn partial_transpose(m: &CJMatrix, d1: usize, d2: usize) -> Result<CJMatrix> {
    if d1 * d2 != m.dim {
        return Err(Error::Shape(format!(
            "split {d1}x{d2} does not match dim {}",
            m.dim
        )));
    }
    CJMatrix::from_fn(m.dim, |r, c| {
        let (i1, i2) = (r / d2, r % d2);
        let (j1, j2) = (c / d2, c % d2);
        m.get(i1 * d2 + j2, j1 * d2 + i2)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Shape;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn swap4() -> CJMatrix {
        // SWAP on C^2 ⊗ C^2.
        CJMatrix::from_fn(4, |r, c| {
            let (r1, r2) = (r / 2, r % 2);
            let (c1, c2) = (c / 2, c % 2);
            if r1 == c2 && r2 == c1 {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .unwrap()
    }

    #[test]
    fn reshape_group_matricizes_rank_two() {
        let t = StateTensor::new(
            Shape::new(vec![2, 2]).unwrap(),
            vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)],
        )
        .unwrap();
        let m = reshape_group(&t, &[0], &[1]).unwrap();
        assert_eq!(m.entries(), &[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]);
        let mt = reshape_group(&t, &[1], &[0]).unwrap();
        assert_eq!(mt.entries(), &[c(1.0, 0.0), c(3.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)]);
    }

    #[test]
    fn reshape_group_rejects_bad_partitions() {
        let t = StateTensor::zeros(Shape::new(vec![2, 3]).unwrap());
        assert!(reshape_group(&t, &[0], &[1]).is_err()); // 2 != 3
        let t = StateTensor::zeros(Shape::new(vec![2, 2]).unwrap());
        assert!(reshape_group(&t, &[0], &[0]).is_err());
        assert!(reshape_group(&t, &[0], &[]).is_err());
    }

    #[test]
    fn eigenvalues_of_scaled_identity() {
        let mut m = CJMatrix::identity(4);
        m.scale(0.25);
        let vals = hermitian_eigenvalues(&m).unwrap();
        for v in vals {
            assert!((v - 0.25).abs() < 1e-14);
        }
    }

    #[test]
    fn eigenvalues_of_a_real_diagonal() {
        let m = CJMatrix::from_fn(2, |r, c| {
            if r == c {
                C64::new(if r == 0 { 3.0 } else { 1.0 }, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
        .unwrap();
        assert_eq!(hermitian_eigenvalues(&m).unwrap(), vec![1.0, 3.0]);
    }

    #[test]
    fn swap_over_four_has_one_negative_eigenvalue() {
        let mut m = swap4();
        m.scale(0.25);
        let vals = hermitian_eigenvalues(&m).unwrap();
        assert!((vals[0] + 0.25).abs() < 1e-12);
        for v in &vals[1..] {
            assert!((v - 0.25).abs() < 1e-12);
        }
        assert!(!is_psd(&m, 1e-9).unwrap());
    }

    #[test]
    fn eigenvectors_satisfy_the_eigen_equation() {
        // A fixed non-trivial Hermitian matrix with complex off-diagonals.
        let m = CJMatrix::new(
            3,
            vec![
                c(2.0, 0.0), c(0.5, 0.3), c(0.0, -1.0),
                c(0.5, -0.3), c(-1.0, 0.0), c(0.25, 0.0),
                c(0.0, 1.0), c(0.25, 0.0), c(0.5, 0.0),
            ],
        )
        .unwrap();
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        for (lambda, vec) in vals.iter().zip(vecs.iter()) {
            for r in 0..3 {
                let mut mv = c(0.0, 0.0);
                for k in 0..3 {
                    mv += m.get(r, k) * vec[k];
                }
                assert!((mv - lambda * vec[r]).norm() < 1e-10);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 1.5).abs() < 1e-12);
    }

    #[test]
    fn psd_examples() {
        let mut id = CJMatrix::identity(4);
        id.scale(0.25);
        assert!(is_psd(&id, 1e-9).unwrap());
        let zero = CJMatrix::new(3, vec![c(0.0, 0.0); 9]).unwrap();
        assert!(is_psd(&zero, 1e-9).unwrap());
        // Non-Hermitian matrices fail regardless of spectrum.
        let nh = CJMatrix::new(2, vec![c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(!is_psd(&nh, 1e-9).unwrap());
    }

    #[test]
    fn partial_transpose_of_a_product_transposes_one_side() {
        let x = [[c(1.0, 0.0), c(0.0, 2.0)], [c(0.0, -2.0), c(3.0, 0.0)]];
        let y = [[c(0.0, 0.0), c(1.0, 1.0)], [c(2.0, 0.0), c(0.5, 0.0)]];
        let kron = CJMatrix::from_fn(4, |r, c| {
            x[r / 2][c / 2] * y[r % 2][c % 2]
        })
        .unwrap();
        let expected = CJMatrix::from_fn(4, |r, c| {
            x[r / 2][c / 2] * y[c % 2][r % 2]
        })
        .unwrap();
        let pt = partial_transpose(&kron, 2, 2).unwrap();
        assert_eq!(pt.entries(), expected.entries());
        // Involution.
        let back = partial_transpose(&pt, 2, 2).unwrap();
        assert_eq!(back.entries(), kron.entries());
    }

    #[test]
    fn partial_transpose_of_the_cup_projector_is_swap() {
        // cup = Σ_k e_k ⊗ e_k over d = 2; |cup⟩⟨cup|/4 has PT = SWAP/4.
        let cup = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let mut proj = CJMatrix::from_fn(4, |r, c| cup[r] * cup[c].conj()).unwrap();
        proj.scale(0.25);
        let pt = partial_transpose(&proj, 2, 2).unwrap();
        let mut expected = swap4();
        expected.scale(0.25);
        assert!(pt.max_dist(&expected) < 1e-15);
        let vals = hermitian_eigenvalues(&pt).unwrap();
        assert!((vals[0] + 0.25).abs() < 1e-12);
    }

    #[test]
    fn partial_transpose_rejects_bad_splits() {
        let m = CJMatrix::identity(6);
        assert!(partial_transpose(&m, 2, 2).is_err());
        assert!(partial_transpose(&m, 2, 3).is_ok());
    }
}
