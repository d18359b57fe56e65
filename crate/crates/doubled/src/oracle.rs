//! Brute-force evaluators of the literal double-mix and double-dilate
//! summation formulas, with retained per-term data.
//!
//! These evaluators exist to validate the wiring conventions of the main
//! construction code, so they deliberately share no index arithmetic with
//! [`crate::tensor`]: flat offsets are computed with their own nested loops.
//! Each evaluator also records every rank-one term of the sum, which lets
//! [`psd_by_expansion`] rebuild Gram decompositions of the CJ reshapings
//! directly from the loop structure.

use num_complex::Complex64 as C64;

use crate::doubling::PairingSpec;
use crate::error::{Error, Result};
use crate::tensor::{Shape, StateTensor};

/// One outer component of a double mixture: an outer weight together with
/// the weighted single-factor states of its inner mixture.
#[derive(Clone, Debug)]
pub struct MixComponent {
    pub weight: f64,
    pub members: Vec<(f64, Vec<C64>)>,
}

/// One rank-one term `r_k p_ki p_kj · φ_ki ⊗ conj(φ_ki) ⊗ φ_kj ⊗ conj(φ_kj)`
/// of the double-mix sum.
#[derive(Clone, Debug)]
pub struct MixTerm {
    pub outer: usize,
    pub left: usize,
    pub right: usize,
    pub coeff: f64,
    pub left_state: Vec<C64>,
    pub right_state: Vec<C64>,
}

/// A literal double-mix evaluation with its term list.
#[derive(Clone, Debug)]
pub struct DoubleMixExpansion {
    pub base_dim: usize,
    pub tensor: StateTensor,
    pub terms: Vec<MixTerm>,
}

/// Evaluate the double-mix triple sum over components `k` and inner indices
/// `i, j`, with conjugation applied entrywise at the fixed printed factor
/// order (plain, conjugated, plain, conjugated).
pub fn literal_double_mix(base_dim: usize, components: &[MixComponent]) -> Result<DoubleMixExpansion> {
    if base_dim == 0 {
        return Err(Error::Shape("base dimension must be >= 1".into()));
    }
    if components.is_empty() {
        return Err(Error::Precondition("at least one outer component".into()));
    }
    for comp in components {
        if comp.members.is_empty() {
            return Err(Error::Precondition("inner mixtures must be nonempty".into()));
        }
        for (_, phi) in &comp.members {
            if phi.len() != base_dim {
                return Err(Error::Shape(format!(
                    "inner state of length {} over base dim {base_dim}",
                    phi.len()
                )));
            }
        }
    }

    let d = base_dim;
    let mut amps = vec![C64::new(0.0, 0.0); d * d * d * d];
    let mut terms = Vec::new();
    for (k, comp) in components.iter().enumerate() {
        for (i, (p_i, phi_i)) in comp.members.iter().enumerate() {
            for (j, (p_j, phi_j)) in comp.members.iter().enumerate() {
                let coeff = comp.weight * p_i * p_j;
                for a1 in 0..d {
                    for a2 in 0..d {
                        for a3 in 0..d {
                            for a4 in 0..d {
                                let idx = ((a1 * d + a2) * d + a3) * d + a4;
                                amps[idx] += coeff
                                    * phi_i[a1]
                                    * phi_i[a2].conj()
                                    * phi_j[a3]
                                    * phi_j[a4].conj();
                            }
                        }
                    }
                }
                terms.push(MixTerm {
                    outer: k,
                    left: i,
                    right: j,
                    coeff,
                    left_state: phi_i.clone(),
                    right_state: phi_j.clone(),
                });
            }
        }
    }
    let tensor = StateTensor::new(Shape::new(vec![d; 4])?, amps)?;
    Ok(DoubleMixExpansion {
        base_dim,
        tensor,
        terms,
    })
}

/// One rank-one term of the double-dilate sum. The four factor vectors are
/// the seed slices `⟨e_k e_i|φ⟩`, `⟨e_l e_i|φ⟩`, `⟨e_l e_j|φ⟩`, `⟨e_k e_j|φ⟩`
/// in printed order; the second and fourth enter conjugated.
#[derive(Clone, Debug)]
pub struct DilateTerm {
    pub k: usize,
    pub l: usize,
    pub i: usize,
    pub j: usize,
    pub factors: [Vec<C64>; 4],
}

/// A literal double-dilate evaluation with its term list.
#[derive(Clone, Debug)]
pub struct DoubleDilateExpansion {
    pub base_dim: usize,
    pub tensor: StateTensor,
    pub terms: Vec<DilateTerm>,
}

/// Evaluate the double-dilate quadruple sum over basis labels `k, l` of the
/// outer ancilla and `i, j` of the inner ancilla, for a seed over
/// `A ⊗ B ⊗ C` given row-major as `seed[(a*dim_b + i)*dim_c + k]`.
pub fn literal_double_dilate(
    dim_a: usize,
    dim_b: usize,
    dim_c: usize,
    seed: &[C64],
) -> Result<DoubleDilateExpansion> {
    if dim_a == 0 || dim_b == 0 || dim_c == 0 {
        return Err(Error::Shape("seed dimensions must be >= 1".into()));
    }
    if seed.len() != dim_a * dim_b * dim_c {
        return Err(Error::Shape(format!(
            "seed length {} does not match {dim_a}x{dim_b}x{dim_c}",
            seed.len()
        )));
    }
    let d = dim_a;
    let slice = |i: usize, k: usize| -> Vec<C64> {
        (0..d).map(|a| seed[(a * dim_b + i) * dim_c + k]).collect()
    };

    let mut amps = vec![C64::new(0.0, 0.0); d * d * d * d];
    let mut terms = Vec::new();
    for k in 0..dim_c {
        for l in 0..dim_c {
            for i in 0..dim_b {
                for j in 0..dim_b {
                    let f1 = slice(i, k);
                    let f2 = slice(i, l);
                    let f3 = slice(j, l);
                    let f4 = slice(j, k);
                    for a1 in 0..d {
                        for a2 in 0..d {
                            for a3 in 0..d {
                                for a4 in 0..d {
                                    let idx = ((a1 * d + a2) * d + a3) * d + a4;
                                    amps[idx] +=
                                        f1[a1] * f2[a2].conj() * f3[a3] * f4[a4].conj();
                                }
                            }
                        }
                    }
                    terms.push(DilateTerm {
                        k,
                        l,
                        i,
                        j,
                        factors: [f1, f2, f3, f4],
                    });
                }
            }
        }
    }
    let tensor = StateTensor::new(Shape::new(vec![d; 4])?, amps)?;
    Ok(DoubleDilateExpansion {
        base_dim: d,
        tensor,
        terms,
    })
}

/// A literal expansion of either kind, for Gram checking.
#[derive(Clone, Debug)]
pub enum Expansion {
    DoubleMix(DoubleMixExpansion),
    DoubleDilate(DoubleDilateExpansion),
}

impl Expansion {
    fn tensor(&self) -> &StateTensor {
        match self {
            Expansion::DoubleMix(e) => &e.tensor,
            Expansion::DoubleDilate(e) => &e.tensor,
        }
    }

    fn base_dim(&self) -> usize {
        match self {
            Expansion::DoubleMix(e) => e.base_dim,
            Expansion::DoubleDilate(e) => e.base_dim,
        }
    }
}

/// Outcome of the structural PSD check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GramVerdict {
    /// The pairing matrix decomposes as `Σ_g w_g w_g†` over the recorded
    /// loop structure; `groups` counts the Gram vectors.
    Decomposable { groups: usize },
    /// No grouping of the loop variables yields a Gram decomposition; the
    /// pairing cross-links the summation index families for this input
    /// class.
    StructuralFalse { reason: String },
}

impl GramVerdict {
    pub fn is_decomposable(&self) -> bool {
        matches!(self, GramVerdict::Decomposable { .. })
    }
}

/// Relative mismatch allowed between the Gram reconstruction and the
/// reshaped matrix.
const GRAM_TOL: f64 = 1e-12;

/// Check whether the matrix obtained by reshaping the expansion's tensor
/// along `pairing` decomposes as a sum of `w·w†` blocks grouped by the
/// expansion's loop variables, which certifies positive semi-definiteness
/// structurally.
///
/// The candidate groupings are the ones the summation formulas admit: for a
/// double mixture, grouping by the outer component or one self-adjoint block
/// per term; for a double dilation, grouping by the outer label pair `(k,l)`,
/// by the inner pair `(i,j)`, or per term.
pub fn psd_by_expansion(expansion: &Expansion, pairing: &PairingSpec) -> Result<GramVerdict> {
    if pairing.factor_count() != 4 {
        return Err(Error::Precondition("expansions are depth-2 tensors".into()));
    }
    let rows = pairing.row_positions();
    let cols = pairing.col_positions();
    let target = crate::matrix::reshape_group(expansion.tensor(), &rows, &cols)?;
    let scale = target.max_abs() + 1.0;

    let candidates: Vec<Grouping> = match expansion {
        Expansion::DoubleMix(_) => vec![Grouping::MixOuter, Grouping::PerTerm],
        Expansion::DoubleDilate(_) => {
            vec![Grouping::DilateOuterPair, Grouping::DilateInnerPair, Grouping::PerTerm]
        }
    };
    for grouping in candidates {
        if let Some(vectors) = gram_vectors(expansion, &rows, grouping) {
            let dim = target.dim();
            let mut rebuilt = vec![C64::new(0.0, 0.0); dim * dim];
            for w in &vectors {
                for r in 0..dim {
                    for c in 0..dim {
                        rebuilt[r * dim + c] += w[r] * w[c].conj();
                    }
                }
            }
            let diff = rebuilt
                .iter()
                .zip(target.entries().iter())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            if diff <= GRAM_TOL * scale {
                return Ok(GramVerdict::Decomposable {
                    groups: vectors.len(),
                });
            }
        }
    }
    Ok(GramVerdict::StructuralFalse {
        reason: "no loop grouping makes the row and column halves conjugate copies; \
                 the pairing cross-links the summation indices"
            .into(),
    })
}

#[derive(Copy, Clone, Debug)]
enum Grouping {
    MixOuter,
    DilateOuterPair,
    DilateInnerPair,
    PerTerm,
}

/// Build the candidate Gram vectors for a grouping, or `None` when the
/// grouping does not apply to this expansion/pairing combination.
fn gram_vectors(expansion: &Expansion, rows: &[usize], grouping: Grouping) -> Option<Vec<Vec<C64>>> {
    let d = expansion.base_dim();
    match (expansion, grouping) {
        (Expansion::DoubleMix(e), Grouping::MixOuter) => {
            // w_k = Σ_i sqrt(r_k) p_ki · (row factors of the (k, i, ·) terms).
            // Valid only if the row positions draw from the i-indexed half.
            if !rows.iter().all(|&p| p < 2) {
                return None;
            }
            let outer_count = e.terms.iter().map(|t| t.outer).max()? + 1;
            let mut vectors = vec![vec![C64::new(0.0, 0.0); d * d]; outer_count];
            for t in &e.terms {
                if t.left != t.right {
                    continue; // each (k, i) contributes once, via the diagonal term
                }
                let coeff = t.coeff; // r_k p_ki^2 on the diagonal
                if coeff < 0.0 {
                    return None;
                }
                // sqrt(r_k) p_ki scales the row vector of term (k, i).
                let scale = coeff.sqrt();
                let row_vec = assemble(rows, &mix_factors(t), d);
                for (dst, src) in vectors[t.outer].iter_mut().zip(row_vec.iter()) {
                    *dst += scale * src;
                }
            }
            Some(vectors)
        }
        (Expansion::DoubleMix(e), Grouping::PerTerm) => {
            let mut vectors = Vec::with_capacity(e.terms.len());
            for t in &e.terms {
                if t.coeff < 0.0 {
                    return None;
                }
                let row_vec = assemble(rows, &mix_factors(t), d);
                vectors.push(row_vec.iter().map(|a| t.coeff.sqrt() * a).collect());
            }
            Some(vectors)
        }
        (Expansion::DoubleDilate(e), Grouping::DilateOuterPair) => {
            // w_{(k,l)} = Σ_i rowvec of term (k, l, i, ·); rows must draw
            // from the i-indexed positions 0 and 1.
            if !rows.iter().all(|&p| p < 2) {
                return None;
            }
            group_dilate(e, rows, d, |t| (t.k, t.l), |t| t.i, |t| t.j)
        }
        (Expansion::DoubleDilate(e), Grouping::DilateInnerPair) => {
            // w_{(i,j)} = Σ_k rowvec of term (k, ·, i, j); rows must draw
            // from the k-indexed positions 0 and 3.
            if !rows.iter().all(|&p| p == 0 || p == 3) {
                return None;
            }
            group_dilate(e, rows, d, |t| (t.i, t.j), |t| t.k, |t| t.l)
        }
        (Expansion::DoubleDilate(e), Grouping::PerTerm) => {
            let mut vectors = Vec::with_capacity(e.terms.len());
            for t in &e.terms {
                vectors.push(assemble(rows, &dilate_factors(t), d));
            }
            Some(vectors)
        }
        _ => None,
    }
}

/// Per-position factor vectors of a mix term, with the conjugation pattern
/// of the printed order applied.
fn mix_factors(t: &MixTerm) -> [Vec<C64>; 4] {
    let conj = |v: &[C64]| v.iter().map(|a| a.conj()).collect::<Vec<_>>();
    [
        t.left_state.clone(),
        conj(&t.left_state),
        t.right_state.clone(),
        conj(&t.right_state),
    ]
}

fn dilate_factors(t: &DilateTerm) -> [Vec<C64>; 4] {
    let conj = |v: &[C64]| v.iter().map(|a| a.conj()).collect::<Vec<_>>();
    [
        t.factors[0].clone(),
        conj(&t.factors[1]),
        t.factors[2].clone(),
        conj(&t.factors[3]),
    ]
}

/// Outer product of the factor vectors at the row positions, assembled in
/// row order.
fn assemble(rows: &[usize], factors: &[Vec<C64>; 4], d: usize) -> Vec<C64> {
    debug_assert_eq!(rows.len(), 2);
    let (fa, fb) = (&factors[rows[0]], &factors[rows[1]]);
    let mut out = Vec::with_capacity(d * d);
    for x in fa.iter() {
        for y in fb.iter() {
            out.push(x * y);
        }
    }
    out
}

fn group_dilate(
    e: &DoubleDilateExpansion,
    rows: &[usize],
    d: usize,
    group: impl Fn(&DilateTerm) -> (usize, usize),
    alpha: impl Fn(&DilateTerm) -> usize,
    beta: impl Fn(&DilateTerm) -> usize,
) -> Option<Vec<Vec<C64>>> {
    use std::collections::BTreeMap;
    let mut groups: BTreeMap<(usize, usize), Vec<C64>> = BTreeMap::new();
    for t in &e.terms {
        if alpha(t) != beta(t) {
            continue; // each α contributes once, via its diagonal term
        }
        let row_vec = assemble(rows, &dilate_factors(t), d);
        let acc = groups
            .entry(group(t))
            .or_insert_with(|| vec![C64::new(0.0, 0.0); d * d]);
        for (dst, src) in acc.iter_mut().zip(row_vec.iter()) {
            *dst += src;
        }
    }
    Some(groups.into_values().collect())
}
