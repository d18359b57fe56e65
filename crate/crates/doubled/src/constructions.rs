//! The mixing and dilation constructions, their iterations, the separating
//! state, and the constructive witnesses connecting the two families.
//!
//! Neither construction normalizes its output: weights ride along explicitly
//! and norm bookkeeping belongs to the caller. Zero weights and
//! one-dimensional ancillas are legal; they embed pure states as trivial
//! mixtures and trivial dilations.

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::matrix::{hermitian_eigen, scaled_tolerance, CJMatrix};
use crate::tensor::{conjugate_reverse, contract_basis, tensor_product, Shape, StateTensor};

/// A weighted family of equally shaped states feeding one mixing step.
#[derive(Clone, Debug)]
pub struct Ensemble {
    members: Vec<(f64, StateTensor)>,
}

impl Ensemble {
    /// Weights must be finite and nonnegative; member shapes must agree.
    pub fn new(members: Vec<(f64, StateTensor)>) -> Result<Self> {
        let first = members
            .first()
            .ok_or_else(|| Error::Precondition("ensembles must be nonempty".into()))?;
        let shape = first.1.shape().clone();
        for (w, state) in &members {
            if !w.is_finite() || *w < 0.0 {
                return Err(Error::Precondition(format!("invalid weight {w}")));
            }
            if state.shape() != &shape {
                return Err(Error::Shape(format!(
                    "ensemble member shape {:?} differs from {:?}",
                    state.shape().dims(),
                    shape.dims()
                )));
            }
        }
        Ok(Ensemble { members })
    }

    pub fn members(&self) -> &[(f64, StateTensor)] {
        &self.members
    }

    /// Enforce probability semantics: weights must sum to one within `tol`.
    pub fn check_probability(&self, tol: f64) -> Result<()> {
        let total: f64 = self.members.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > tol {
            return Err(Error::Precondition(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        Ok(())
    }
}

/// A nested mixture: a leaf state, or a weighted family of subtrees of equal
/// depth.
#[derive(Clone, Debug)]
pub enum MixTree {
    Leaf(StateTensor),
    Node(Vec<(f64, MixTree)>),
}

impl MixTree {
    /// Height of the tree; leaves are depth 0. Fails on empty nodes or
    /// ragged depths.
    pub fn depth(&self) -> Result<u32> {
        match self {
            MixTree::Leaf(_) => Ok(0),
            MixTree::Node(children) => {
                let first = children
                    .first()
                    .ok_or_else(|| Error::Precondition("mix nodes must be nonempty".into()))?;
                let d = first.1.depth()?;
                for (_, child) in children.iter().skip(1) {
                    if child.depth()? != d {
                        return Err(Error::Shape("children of a mix node differ in depth".into()));
                    }
                }
                Ok(d + 1)
            }
        }
    }
}

/// One mixing step: `Σ_i w_i · φ_i ⊗ conj(φ_i)`, doubling the factor count.
pub fn mix_step(ensemble: &Ensemble) -> Result<StateTensor> {
    let shape = ensemble.members[0].1.shape();
    let out_shape = shape.concat(&shape.reversed())?;
    let mut out = StateTensor::zeros(out_shape);
    for (w, state) in &ensemble.members {
        let doubled = tensor_product(state, &conjugate_reverse(state))?;
        out.axpy(*w, &doubled)?;
    }
    Ok(out)
}

/// Apply [`mix_step`] recursively over a [`MixTree`]; the output depth is
/// the tree height.
pub fn iterate_mix(tree: &MixTree) -> Result<StateTensor> {
    tree.depth()?;
    iterate_mix_inner(tree)
}

fn iterate_mix_inner(tree: &MixTree) -> Result<StateTensor> {
    match tree {
        MixTree::Leaf(state) => Ok(state.clone()),
        MixTree::Node(children) => {
            let mut members = Vec::with_capacity(children.len());
            for (w, child) in children {
                members.push((*w, iterate_mix_inner(child)?));
            }
            mix_step(&Ensemble::new(members)?)
        }
    }
}

/// One dilation step: sum over the product basis of the listed factor group
/// of `slice ⊗ conj(slice)`.
pub fn dilate_step(t: &StateTensor, positions: &[usize]) -> Result<StateTensor> {
    if positions.is_empty() {
        return Err(Error::Precondition(
            "dilation needs at least one factor to contract".into(),
        ));
    }
    let dims = t.shape().dims();
    let group_dims: Vec<usize> = positions
        .iter()
        .map(|&p| {
            dims.get(p)
                .copied()
                .ok_or_else(|| Error::Index(format!("position {p} out of range")))
        })
        .collect::<Result<_>>()?;

    let mut labels = vec![0usize; positions.len()];
    let mut out: Option<StateTensor> = None;
    loop {
        let slice = contract_basis(t, positions, &labels)?;
        let doubled = tensor_product(&slice, &conjugate_reverse(&slice))?;
        match &mut out {
            None => out = Some(doubled),
            Some(acc) => acc.axpy(1.0, &doubled)?,
        }
        if !crate::tensor::advance_index(&mut labels, &group_dims) {
            break;
        }
    }
    Ok(out.expect("at least one basis label"))
}

/// A seed for iterated dilation: factor 0 is the system, factors `1..=n` are
/// the ancillas in the order they are contracted.
#[derive(Clone, Debug)]
pub struct DilationSeed {
    seed: StateTensor,
}

impl DilationSeed {
    pub fn new(seed: StateTensor) -> Result<Self> {
        if seed.shape().rank() < 2 {
            return Err(Error::Shape(
                "a dilation seed needs a system factor and at least one ancilla".into(),
            ));
        }
        Ok(DilationSeed { seed })
    }

    pub fn tensor(&self) -> &StateTensor {
        &self.seed
    }

    pub fn system_dim(&self) -> usize {
        self.seed.shape().dims()[0]
    }

    pub fn ancilla_dims(&self) -> &[usize] {
        &self.seed.shape().dims()[1..]
    }

    /// Number of dilation iterations the seed drives.
    pub fn depth(&self) -> u32 {
        (self.seed.shape().rank() - 1) as u32
    }
}

/// Run the full iterated dilation of a seed. Step `t` contracts, jointly,
/// every factor copy descended from ancilla `t`; after the doubling of step
/// `t-1` there are `2^(t-1)` such copies. The output is a doubled state of
/// depth `n` over the system dimension.
pub fn iterate_dilation(seed: &DilationSeed) -> Result<StateTensor> {
    let n = seed.depth();
    let mut state = seed.tensor().clone();
    // Ancilla provenance per factor; `None` marks system copies.
    let mut tags: Vec<Option<u32>> = (0..state.shape().rank())
        .map(|p| if p == 0 { None } else { Some(p as u32) })
        .collect();

    for step in 1..=n {
        let positions: Vec<usize> = tags
            .iter()
            .enumerate()
            .filter_map(|(p, tag)| (*tag == Some(step)).then_some(p))
            .collect();
        let expected = 1usize << (step - 1);
        if positions.len() != expected {
            return Err(Error::Precondition(format!(
                "internal tag bookkeeping failure: {} copies of ancilla {step}, expected {expected}",
                positions.len()
            )));
        }
        state = dilate_step(&state, &positions)?;
        let kept: Vec<Option<u32>> = tags
            .iter()
            .enumerate()
            .filter_map(|(p, tag)| (!positions.contains(&p)).then_some(*tag))
            .collect();
        tags = kept.iter().copied().chain(kept.iter().rev().copied()).collect();
    }
    debug_assert!(tags.iter().all(|t| t.is_none()));
    Ok(state)
}

/// The depth-2 dilated state that separates the two families: amplitude
/// `(a, b, c, e) = δ_{a,e} δ_{b,c} / d²`, the nested-rainbow pattern. It
/// equals the iterated dilation of the normalized cup seed with a trivial
/// inner ancilla.
pub fn counterexample_state(d: usize) -> Result<StateTensor> {
    if d < 2 {
        return Err(Error::Precondition(format!(
            "the separating state needs dimension >= 2, got {d}"
        )));
    }
    let w = 1.0 / (d * d) as f64;
    StateTensor::from_fn(Shape::new(vec![d; 4])?, |idx| {
        if idx[0] == idx[3] && idx[1] == idx[2] {
            C64::new(w, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

/// The normalized cup seed over `A ⊗ B ⊗ C` with `dim B = 1` whose iterated
/// dilation is [`counterexample_state`].
pub fn cup_seed(d: usize) -> Result<DilationSeed> {
    if d < 2 {
        return Err(Error::Precondition(format!(
            "the cup seed needs dimension >= 2, got {d}"
        )));
    }
    let w = 1.0 / (d as f64).sqrt();
    let seed = StateTensor::from_fn(Shape::new(vec![d, 1, d])?, |idx| {
        if idx[0] == idx[2] {
            C64::new(w, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })?;
    DilationSeed::new(seed)
}

/// Rewrite a depth-2 mixture as a dilation seed over `A ⊗ B ⊗ C`, with `B`
/// indexed by the flattened inner pairs `(k, i)` and `C` by the outer index
/// `k`: the seed entry at `(a, (k, i), k')` is
/// `δ_{k,k'} · r_k^{1/4} · √(p_ki) · φ_ki(a)`. Its iterated dilation
/// reproduces the iterated mixture exactly.
pub fn mix_to_dilation_witness(tree: &MixTree) -> Result<DilationSeed> {
    if tree.depth()? != 2 {
        return Err(Error::Precondition("the witness takes depth-2 mix trees".into()));
    }
    let MixTree::Node(outer) = tree else { unreachable!() };
    let mut components: Vec<(f64, Vec<(f64, &StateTensor)>)> = Vec::new();
    let mut base_dim: Option<usize> = None;
    for (r, child) in outer {
        let MixTree::Node(inner) = child else { unreachable!() };
        let mut states = Vec::with_capacity(inner.len());
        for (p, leaf) in inner {
            let MixTree::Leaf(phi) = leaf else { unreachable!() };
            if phi.shape().rank() != 1 {
                return Err(Error::Shape(
                    "witness leaves must be single-factor states".into(),
                ));
            }
            let d = phi.shape().dims()[0];
            match base_dim {
                None => base_dim = Some(d),
                Some(expected) if expected != d => {
                    return Err(Error::Shape("witness leaves differ in dimension".into()))
                }
                _ => {}
            }
            states.push((*p, phi));
        }
        components.push((*r, states));
    }
    let base_dim = base_dim.expect("depth-2 trees have leaves");
    let dim_c = components.len();
    let dim_b: usize = components.iter().map(|(_, states)| states.len()).sum();
    let offsets: Vec<usize> = components
        .iter()
        .scan(0usize, |acc, (_, states)| {
            let off = *acc;
            *acc += states.len();
            Some(off)
        })
        .collect();

    let mut amps = vec![C64::new(0.0, 0.0); base_dim * dim_b * dim_c];
    for (k, (r, states)) in components.iter().enumerate() {
        let outer_scale = r.max(0.0).powf(0.25);
        for (i, (p, phi)) in states.iter().enumerate() {
            let b = offsets[k] + i;
            let scale = outer_scale * p.max(0.0).sqrt();
            for (a, amp) in phi.amplitudes().iter().enumerate() {
                amps[(a * dim_b + b) * dim_c + k] = scale * amp;
            }
        }
    }
    DilationSeed::new(StateTensor::new(Shape::new(vec![base_dim, dim_b, dim_c])?, amps)?)
}

/// Spectral square root of a PSD matrix as a depth-1 dilation seed over
/// `A ⊗ B`: column `j` of the seed is `√λ_j · u_j`, keeping the eigenvalues
/// above the scale-aware tolerance. One dilation step of the seed has `m` as
/// its CJ matrix.
pub fn purify(m: &CJMatrix, tol: f64) -> Result<DilationSeed> {
    let scaled = scaled_tolerance(tol, m);
    if m.hermiticity_defect() > scaled {
        return Err(Error::Precondition("purify needs a self-adjoint matrix".into()));
    }
    let (values, vectors) = hermitian_eigen(m)?;
    if values.first().is_some_and(|&min| min < -scaled) {
        return Err(Error::Precondition(format!(
            "purify needs a PSD matrix; min eigenvalue {}",
            values[0]
        )));
    }
    let kept: Vec<(f64, &Vec<C64>)> = values
        .iter()
        .zip(vectors.iter())
        .rev() // descending eigenvalues
        .filter(|(&v, _)| v > scaled)
        .map(|(&v, u)| (v, u))
        .collect();
    let d = m.dim();
    let rank = kept.len().max(1);
    let mut amps = vec![C64::new(0.0, 0.0); d * rank];
    for (j, (lambda, u)) in kept.iter().enumerate() {
        let s = lambda.sqrt();
        for a in 0..d {
            amps[a * rank + j] = s * u[a];
        }
    }
    DilationSeed::new(StateTensor::new(Shape::new(vec![d, rank])?, amps)?)
}

/// Eigen-decomposition of a PSD matrix as an ensemble `{(λ_j, u_j)}`; one
/// mixing step of the ensemble has `m` as its CJ matrix.
pub fn eigen_ensemble(m: &CJMatrix, tol: f64) -> Result<Ensemble> {
    let scaled = scaled_tolerance(tol, m);
    if m.hermiticity_defect() > scaled {
        return Err(Error::Precondition(
            "eigen_ensemble needs a self-adjoint matrix".into(),
        ));
    }
    let (values, vectors) = hermitian_eigen(m)?;
    if values.first().is_some_and(|&min| min < -scaled) {
        return Err(Error::Precondition(format!(
            "eigen_ensemble needs a PSD matrix; min eigenvalue {}",
            values[0]
        )));
    }
    let d = m.dim();
    let shape = Shape::new(vec![d])?;
    let mut members = Vec::new();
    for (lambda, u) in values.iter().zip(vectors.iter()).rev() {
        if *lambda > scaled {
            members.push((*lambda, StateTensor::new(shape.clone(), u.clone())?));
        }
    }
    if members.is_empty() {
        members.push((0.0, StateTensor::zeros(shape)));
    }
    Ensemble::new(members)
}

/// Weights drawn uniformly from the probability simplex.
fn random_simplex(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    use rand::Rng;
    let mut weights: Vec<f64> = (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            -(1.0 - u).ln()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return vec![1.0 / count as f64; count];
    }
    weights.iter_mut().for_each(|w| *w /= total);
    weights
}

/// A unit-norm state with independent complex Gaussian amplitudes.
pub fn random_gaussian_state(shape: Shape, rng: &mut ChaCha8Rng) -> StateTensor {
    let n = shape.total_size();
    let mut amps = Vec::with_capacity(n);
    for _ in 0..n {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        amps.push(C64::new(re, im));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if norm > 0.0 {
        for a in &mut amps {
            *a /= norm;
        }
    } else {
        amps[0] = C64::new(1.0, 0.0);
    }
    StateTensor::new(shape, amps).expect("finite amplitudes")
}

/// Deterministic random mix tree: `branching` components per level, simplex
/// weights, unit Gaussian leaves of dimension `d`.
pub fn random_mix_tree(d: usize, depth: u32, branching: usize, rng_seed: u64) -> Result<MixTree> {
    if d == 0 || branching == 0 {
        return Err(Error::Precondition("dimension and branching must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    fn build(d: usize, depth: u32, branching: usize, rng: &mut ChaCha8Rng) -> Result<MixTree> {
        if depth == 0 {
            return Ok(MixTree::Leaf(random_gaussian_state(Shape::new(vec![d])?, rng)));
        }
        let weights = random_simplex(rng, branching);
        let mut children = Vec::with_capacity(branching);
        for w in weights {
            children.push((w, build(d, depth - 1, branching, rng)?));
        }
        Ok(MixTree::Node(children))
    }
    build(d, depth, branching, &mut rng)
}

/// Deterministic random dilation seed over the given factor dimensions
/// (system first), drawn as one unit Gaussian tensor.
pub fn random_dilation_seed(dims: &[usize], rng_seed: u64) -> Result<DilationSeed> {
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    DilationSeed::new(random_gaussian_state(Shape::new(dims.to_vec())?, &mut rng))
}
