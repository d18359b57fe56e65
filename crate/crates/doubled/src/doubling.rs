//! Shape algebra for iterated doubling.
//!
//! A state at doubling depth `n` has `2^n` factors of one base dimension.
//! Each factor is either a plain or a conjugated copy of the base space; the
//! right half of a depth-`n` layout is the reversed, role-flipped copy of the
//! left half. This module also computes the row/column pairings that define
//! the CJ reshaping at every level.

use crate::error::{Error, Result};
use crate::tensor::Shape;

/// Whether a factor carries the base space or its conjugate.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Role {
    Plain,
    Conjugated,
}

impl Role {
    fn flipped(self) -> Role {
        match self {
            Role::Plain => Role::Conjugated,
            Role::Conjugated => Role::Plain,
        }
    }
}

/// Factor bookkeeping for a state of doubling depth `n` over one base space.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DoubledShape {
    base_dim: usize,
    depth: u32,
}

impl DoubledShape {
    pub fn new(base_dim: usize, depth: u32) -> Result<Self> {
        if base_dim == 0 {
            return Err(Error::Shape("base dimension must be >= 1".into()));
        }
        if depth >= usize::BITS {
            return Err(Error::Shape(format!("depth {depth} is out of range")));
        }
        // Building the Shape enforces the entry cap.
        let ds = DoubledShape { base_dim, depth };
        ds.shape()?;
        Ok(ds)
    }

    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// Number of tensor factors, `2^depth`.
    pub fn factor_count(&self) -> usize {
        1usize << self.depth
    }

    /// Per-factor roles. The recursion is: depth 0 is a single plain factor,
    /// and each doubling appends the reversed, role-flipped copy.
    pub fn roles(&self) -> Vec<Role> {
        let mut roles = vec![Role::Plain];
        for _ in 0..self.depth {
            let mut mirrored: Vec<Role> = roles.iter().rev().map(|r| r.flipped()).collect();
            roles.append(&mut mirrored);
        }
        roles
    }

    pub fn role(&self, position: usize) -> Role {
        self.roles()[position]
    }

    pub fn shape(&self) -> Result<Shape> {
        Shape::new(vec![self.base_dim; self.factor_count()])
    }

    /// Recognize a shape as a doubled layout: a power-of-two factor count
    /// with one common dimension. Scalars and mixed dimensions are rejected.
    pub fn infer(shape: &Shape) -> Option<DoubledShape> {
        let dims = shape.dims();
        let count = dims.len();
        if count == 0 || !count.is_power_of_two() {
            return None;
        }
        let d = dims[0];
        if dims.iter().any(|&x| x != d) {
            return None;
        }
        Some(DoubledShape {
            base_dim: d,
            depth: count.trailing_zeros(),
        })
    }
}

/// Construct the doubled shape of a given base dimension and depth.
pub fn doubled_shape(base_dim: usize, depth: u32) -> Result<DoubledShape> {
    DoubledShape::new(base_dim, depth)
}

/// A perfect matching of factor positions into (row, column) pairs, defining
/// one CJ reshaping of a depth-`n` state.
///
/// Positions are 0-based. At level `m` every pair lies inside one contiguous
/// block of `2^m` positions. Row and column multi-indices are assembled in
/// pair order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingSpec {
    level: u32,
    pairs: Vec<(usize, usize)>,
}

impl PairingSpec {
    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn row_positions(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(r, _)| r).collect()
    }

    pub fn col_positions(&self) -> Vec<usize> {
        self.pairs.iter().map(|&(_, c)| c).collect()
    }

    /// Factor count of the states this pairing applies to.
    pub fn factor_count(&self) -> usize {
        2 * self.pairs.len()
    }
}

/// The level-`m` pairing of a depth-`n` layout.
///
/// At the outermost level (`m == n`) position `p` pairs with its mirror
/// `2^n - 1 - p`: rows are the left half in natural order, columns the
/// mirrored right half. Every inner level is inherited: the depth-`(n-1)`
/// pairing applies unchanged to the left half and mirrored to the right
/// half, where the mirror of a row position again acts as a row. Reading the
/// right half in natural position order, the row/column pattern therefore
/// comes out reversed relative to the left half, which is exactly what the
/// reversed conjugated copy demands; it is the unique inheritance rule under
/// which every level of an iterated dilation output decomposes as a sum of
/// `v·v†` blocks.
pub fn position_pairs(depth: u32, level: u32) -> Result<PairingSpec> {
    if depth == 0 {
        return Err(Error::Precondition("pairings need depth >= 1".into()));
    }
    if level == 0 || level > depth {
        return Err(Error::Precondition(format!(
            "level {level} out of range for depth {depth}"
        )));
    }
    Ok(PairingSpec {
        level,
        pairs: pairs_rec(depth, level),
    })
}

fn pairs_rec(depth: u32, level: u32) -> Vec<(usize, usize)> {
    let mirror = (1usize << depth) - 1;
    if level == depth {
        let half = 1usize << (depth - 1);
        (0..half).map(|p| (p, mirror - p)).collect()
    } else {
        let left = pairs_rec(depth - 1, level);
        let mut pairs = left.clone();
        pairs.extend(left.iter().map(|&(r, c)| (mirror - r, mirror - c)));
        pairs
    }
}

/// The printed depth-2 grouping that pairs each plain factor with the
/// conjugated factor to its right: rows (0, 2), columns (1, 3).
///
/// On doubly mixed states this reshaping is a sum of products of density
/// matrices and hence PSD; on general doubly dilated states it is not, so it
/// serves only as a necessary condition for double mixing and is kept apart
/// from [`position_pairs`].
pub fn printed_mix_pairing() -> PairingSpec {
    PairingSpec {
        level: 1,
        pairs: vec![(0, 1), (2, 3)],
    }
}
