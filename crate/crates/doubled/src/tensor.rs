//! Dense complex state tensors with an explicit factor shape.
//!
//! Amplitudes are stored row-major with the first factor slowest-varying.
//! Conjugating a state means conjugating every amplitude *and* reversing the
//! factor order; under this convention the doubled layout `t ⊗ conj(t)` used
//! by the construction modules keeps its printed factor order at every
//! iteration depth.

use num_complex::Complex64 as C64;

use crate::config;
use crate::error::{Error, Result};

/// Ordered factor dimensions of a tensor. The empty shape is the scalar.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Shape {
    dims: Vec<usize>,
}

impl Shape {
    /// Build a shape from per-factor dimensions. Every dimension must be at
    /// least one and the total size must stay under the configured cap.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::Shape("factor dimensions must be >= 1".into()));
        }
        checked_size(&dims)?;
        Ok(Shape { dims })
    }

    /// The scalar shape (no factors, one entry).
    pub fn scalar() -> Self {
        Shape { dims: Vec::new() }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of tensor factors.
    pub fn rank(&self) -> usize {
        self.dims.len()
    }

    /// Product of all factor dimensions.
    pub fn total_size(&self) -> usize {
        self.dims.iter().product()
    }

    /// Row-major flat index of a full multi-index.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        debug_assert_eq!(multi.len(), self.dims.len());
        let mut flat = 0;
        for (i, &d) in multi.iter().zip(self.dims.iter()) {
            debug_assert!(*i < d);
            flat = flat * d + i;
        }
        flat
    }

    /// Multi-index of a row-major flat index.
    pub fn multi_index(&self, mut flat: usize) -> Vec<usize> {
        let mut multi = vec![0; self.dims.len()];
        for (slot, &d) in multi.iter_mut().zip(self.dims.iter()).rev() {
            *slot = flat % d;
            flat /= d;
        }
        multi
    }

    /// Shape of `self ⊗ other`.
    pub fn concat(&self, other: &Shape) -> Result<Shape> {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Shape::new(dims)
    }

    /// Shape with the factor order reversed.
    pub fn reversed(&self) -> Shape {
        let mut dims = self.dims.clone();
        dims.reverse();
        Shape { dims }
    }
}

fn checked_size(dims: &[usize]) -> Result<usize> {
    let cap = config::max_tensor_entries();
    let mut total: u128 = 1;
    for &d in dims {
        total = total.saturating_mul(d as u128);
        if total > cap as u128 {
            return Err(Error::SizeLimit {
                requested: total,
                cap,
            });
        }
    }
    Ok(total as usize)
}

/// Advance a row-major odometer over `dims`; returns false after the last
/// index has been visited.
pub(crate) fn advance_index(multi: &mut [usize], dims: &[usize]) -> bool {
    for pos in (0..multi.len()).rev() {
        multi[pos] += 1;
        if multi[pos] < dims[pos] {
            return true;
        }
        multi[pos] = 0;
    }
    false
}

/// A dense vector of complex amplitudes over a [`Shape`].
#[derive(Clone, Debug, PartialEq)]
pub struct StateTensor {
    shape: Shape,
    amps: Vec<C64>,
}

impl StateTensor {
    /// Wrap a flat amplitude vector. The length must match the shape and
    /// every entry must be finite.
    pub fn new(shape: Shape, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != shape.total_size() {
            return Err(Error::Shape(format!(
                "amplitude count {} does not match shape size {}",
                amps.len(),
                shape.total_size()
            )));
        }
        if let Some(bad) = amps.iter().position(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::NonFinite(bad));
        }
        Ok(StateTensor { shape, amps })
    }

    /// All-zero tensor over the given shape.
    pub fn zeros(shape: Shape) -> Self {
        let n = shape.total_size();
        StateTensor {
            shape,
            amps: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Fill a tensor by evaluating `f` on every multi-index.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> C64) -> Result<Self> {
        let mut amps = Vec::with_capacity(shape.total_size());
        let mut multi = vec![0; shape.rank()];
        loop {
            amps.push(f(&multi));
            if !advance_index(&mut multi, shape.dims()) {
                break;
            }
        }
        StateTensor::new(shape, amps)
    }

    /// Single-factor computational basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::Index(format!("basis label {k} out of range for dim {dim}")));
        }
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[k] = C64::new(1.0, 0.0);
        StateTensor::new(Shape::new(vec![dim])?, amps)
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    /// Amplitude at a full multi-index.
    pub fn get(&self, multi: &[usize]) -> C64 {
        self.amps[self.shape.flat_index(multi)]
    }

    /// Squared 2-norm of the amplitude vector.
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest amplitude magnitude.
    pub fn max_abs(&self) -> f64 {
        self.amps.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Rescale every amplitude in place.
    pub fn scale(&mut self, c: C64) {
        for a in &mut self.amps {
            *a *= c;
        }
    }

    /// Accumulate `w * other` into `self`; shapes must match.
    pub(crate) fn axpy(&mut self, w: f64, other: &StateTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Shape(format!(
                "cannot accumulate shape {:?} into {:?}",
                other.shape.dims(),
                self.shape.dims()
            )));
        }
        for (dst, src) in self.amps.iter_mut().zip(other.amps.iter()) {
            *dst += w * src;
        }
        Ok(())
    }

    /// Largest entrywise distance to another tensor of identical shape.
    pub fn max_dist(&self, other: &StateTensor) -> f64 {
        assert_eq!(self.shape, other.shape, "max_dist over mismatched shapes");
        self.amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// Outer product `a ⊗ b`; the result's factors are `a`'s followed by `b`'s.
pub fn tensor_product(a: &StateTensor, b: &StateTensor) -> Result<StateTensor> {
    let shape = a.shape.concat(&b.shape)?;
    let bn = b.amps.len();
    let mut amps = Vec::with_capacity(shape.total_size());
    for &x in &a.amps {
        for k in 0..bn {
            amps.push(x * b.amps[k]);
        }
    }
    StateTensor::new(shape, amps)
}

/// Entrywise complex conjugation combined with reversal of the factor order.
///
/// This is an involution and is the notion of conjugation used by every
/// doubling construction in the crate.
pub fn conjugate_reverse(t: &StateTensor) -> StateTensor {
    let rev_shape = t.shape.reversed();
    let mut amps = vec![C64::new(0.0, 0.0); t.amps.len()];
    let mut multi = vec![0; t.shape.rank()];
    let mut rev = vec![0; t.shape.rank()];
    let mut flat = 0;
    loop {
        for (r, &m) in rev.iter_mut().zip(multi.iter().rev()) {
            *r = m;
        }
        amps[rev_shape.flat_index(&rev)] = t.amps[flat].conj();
        flat += 1;
        if !advance_index(&mut multi, t.shape.dims()) {
            break;
        }
    }
    StateTensor {
        shape: rev_shape,
        amps,
    }
}

/// Apply the product-basis effect `⟨e_label|` at each listed factor position,
/// removing those factors. Positions must be strictly increasing.
pub fn contract_basis(
    t: &StateTensor,
    positions: &[usize],
    labels: &[usize],
) -> Result<StateTensor> {
    if positions.len() != labels.len() {
        return Err(Error::Index(format!(
            "{} positions but {} labels",
            positions.len(),
            labels.len()
        )));
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Index("positions must be strictly increasing".into()));
    }
    let dims = t.shape.dims();
    for (&p, &l) in positions.iter().zip(labels.iter()) {
        if p >= dims.len() {
            return Err(Error::Index(format!("position {p} out of range for rank {}", dims.len())));
        }
        if l >= dims[p] {
            return Err(Error::Index(format!("label {l} out of range at position {p} (dim {})", dims[p])));
        }
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let out_shape = Shape::new(kept.iter().map(|&p| dims[p]).collect())?;

    let mut full = vec![0; dims.len()];
    for (&p, &l) in positions.iter().zip(labels.iter()) {
        full[p] = l;
    }
    let mut out = Vec::with_capacity(out_shape.total_size());
    let mut partial = vec![0; kept.len()];
    loop {
        for (slot, &p) in partial.iter().zip(kept.iter()) {
            full[p] = *slot;
        }
        out.push(t.amps[t.shape.flat_index(&full)]);
        if !advance_index(&mut partial, out_shape.dims()) {
            break;
        }
    }
    StateTensor::new(out_shape, out)
}
