//! The same constructions over the boolean semiring: tensors become
//! relations, weights collapse to presence, conjugation degrades to factor
//! reversal.
//!
//! Besides the step operations this module enumerates, exhaustively within
//! explicit bounds, every depth-n mixed and depth-n dilated relation over a
//! small carrier, deduplicates them by canonical key, and reports whether
//! the mixed set sits strictly inside the dilated set.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tensor::{advance_index, Shape};

/// A boolean tensor (a relation) with the same layout rules as the complex
/// state tensors: row-major, first factor slowest.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelTensor {
    shape: Shape,
    bits: Vec<bool>,
}

impl RelTensor {
    pub fn new(shape: Shape, bits: Vec<bool>) -> Result<Self> {
        if bits.len() != shape.total_size() {
            return Err(Error::Shape(format!(
                "{} bits do not fill shape of size {}",
                bits.len(),
                shape.total_size()
            )));
        }
        Ok(RelTensor { shape, bits })
    }

    pub fn empty(shape: Shape) -> Self {
        let n = shape.total_size();
        RelTensor {
            shape,
            bits: vec![false; n],
        }
    }

    pub fn full(shape: Shape) -> Self {
        let n = shape.total_size();
        RelTensor {
            shape,
            bits: vec![true; n],
        }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, multi: &[usize]) -> bool {
        self.bits[self.shape.flat_index(multi)]
    }

    pub fn is_empty_relation(&self) -> bool {
        self.bits.iter().all(|&b| !b)
    }

    fn or_assign(&mut self, other: &RelTensor) -> Result<()> {
        if self.shape != other.shape {
            return Err(Error::Shape("OR over mismatched shapes".into()));
        }
        for (dst, src) in self.bits.iter_mut().zip(other.bits.iter()) {
            *dst |= src;
        }
        Ok(())
    }
}

/// Factor-order reversal; the boolean shadow of conjugation.
pub fn rel_reverse(t: &RelTensor) -> RelTensor {
    let rev_shape = t.shape.reversed();
    let mut bits = vec![false; t.bits.len()];
    let mut multi = vec![0; t.shape.rank()];
    let mut rev = vec![0; t.shape.rank()];
    let mut flat = 0;
    loop {
        for (r, &m) in rev.iter_mut().zip(multi.iter().rev()) {
            *r = m;
        }
        bits[rev_shape.flat_index(&rev)] = t.bits[flat];
        flat += 1;
        if !advance_index(&mut multi, t.shape.dims()) {
            break;
        }
    }
    RelTensor {
        shape: rev_shape,
        bits,
    }
}

/// Cartesian product `a ⊗ b` of two relations.
pub fn rel_tensor_product(a: &RelTensor, b: &RelTensor) -> Result<RelTensor> {
    let shape = a.shape.concat(&b.shape)?;
    let mut bits = Vec::with_capacity(shape.total_size());
    for &x in &a.bits {
        for &y in &b.bits {
            bits.push(x && y);
        }
    }
    RelTensor::new(shape, bits)
}

/// The slice of `t` at fixed labels of the listed positions.
pub fn rel_contract(t: &RelTensor, positions: &[usize], labels: &[usize]) -> Result<RelTensor> {
    if positions.len() != labels.len() {
        return Err(Error::Index("positions and labels differ in length".into()));
    }
    if positions.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Index("positions must be strictly increasing".into()));
    }
    let dims = t.shape.dims();
    for (&p, &l) in positions.iter().zip(labels.iter()) {
        if p >= dims.len() || l >= dims[p] {
            return Err(Error::Index(format!("position {p}/label {l} out of range")));
        }
    }
    let kept: Vec<usize> = (0..dims.len()).filter(|p| !positions.contains(p)).collect();
    let out_shape = Shape::new(kept.iter().map(|&p| dims[p]).collect())?;
    let mut full = vec![0; dims.len()];
    for (&p, &l) in positions.iter().zip(labels.iter()) {
        full[p] = l;
    }
    let mut bits = Vec::with_capacity(out_shape.total_size());
    let mut partial = vec![0; kept.len()];
    loop {
        for (slot, &p) in partial.iter().zip(kept.iter()) {
            full[p] = *slot;
        }
        bits.push(t.bits[t.shape.flat_index(&full)]);
        if !advance_index(&mut partial, out_shape.dims()) {
            break;
        }
    }
    RelTensor::new(out_shape, bits)
}

/// Boolean mixing step: OR over members of `member ⊗ reverse(member)`.
pub fn rel_mix_step(members: &[RelTensor]) -> Result<RelTensor> {
    let first = members
        .first()
        .ok_or_else(|| Error::Precondition("mixing needs a nonempty family".into()))?;
    let out_shape = first.shape.concat(&first.shape.reversed())?;
    let mut out = RelTensor::empty(out_shape);
    for member in members {
        out.or_assign(&rel_tensor_product(member, &rel_reverse(member))?)?;
    }
    Ok(out)
}

/// Boolean dilation step: OR over all product-basis labels of the listed
/// positions of `slice ⊗ reverse(slice)`.
pub fn rel_dilate_step(t: &RelTensor, positions: &[usize]) -> Result<RelTensor> {
    if positions.is_empty() {
        return Err(Error::Precondition(
            "dilation needs at least one factor to contract".into(),
        ));
    }
    let dims = t.shape.dims();
    let group_dims: Vec<usize> = positions
        .iter()
        .map(|&p| {
            dims.get(p)
                .copied()
                .ok_or_else(|| Error::Index(format!("position {p} out of range")))
        })
        .collect::<Result<_>>()?;
    let mut labels = vec![0usize; positions.len()];
    let mut out: Option<RelTensor> = None;
    loop {
        let slice = rel_contract(t, positions, &labels)?;
        let doubled = rel_tensor_product(&slice, &rel_reverse(&slice))?;
        match &mut out {
            None => out = Some(doubled),
            Some(acc) => acc.or_assign(&doubled)?,
        }
        if !advance_index(&mut labels, &group_dims) {
            break;
        }
    }
    Ok(out.expect("at least one basis label"))
}

/// Iterated boolean dilation of a seed relation whose factor 0 is the
/// system and factors `1..=n` are ancillas in contraction order; mirrors
/// the complex construction's tag bookkeeping.
pub fn rel_iterate_dilation(seed: &RelTensor) -> Result<RelTensor> {
    if seed.shape.rank() < 2 {
        return Err(Error::Shape("a dilation seed needs at least two factors".into()));
    }
    let n = seed.shape.rank() - 1;
    let mut state = seed.clone();
    let mut tags: Vec<Option<usize>> = (0..seed.shape.rank())
        .map(|p| if p == 0 { None } else { Some(p) })
        .collect();
    for step in 1..=n {
        let positions: Vec<usize> = tags
            .iter()
            .enumerate()
            .filter_map(|(p, tag)| (*tag == Some(step)).then_some(p))
            .collect();
        state = rel_dilate_step(&state, &positions)?;
        let kept: Vec<Option<usize>> = tags
            .iter()
            .enumerate()
            .filter_map(|(p, tag)| (!positions.contains(&p)).then_some(*tag))
            .collect();
        tags = kept.iter().copied().chain(kept.iter().rev().copied()).collect();
    }
    Ok(state)
}

/// Stable deduplication key: the bit sequence, one character per entry.
pub fn canonical_form(t: &RelTensor) -> String {
    t.bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Enumeration bounds for the census.
#[derive(Copy, Clone, Debug, Serialize)]
pub struct CensusBounds {
    /// Largest ancilla dimension per dilation slot.
    pub max_ancilla: usize,
    /// Largest mixture family size per mixing level.
    pub max_components: usize,
}

impl Default for CensusBounds {
    fn default() -> Self {
        CensusBounds {
            max_ancilla: 4,
            max_components: 16,
        }
    }
}

/// A separating relation in a census: dilated but not mixed.
#[derive(Clone, Debug, Serialize)]
pub struct SeparatingRelation {
    pub dims: Vec<usize>,
    pub bits: String,
}

/// Result of an exhaustive enumeration over one carrier and depth.
#[derive(Clone, Debug, Serialize)]
pub struct Census {
    pub format: String,
    pub carrier_size: usize,
    pub depth: usize,
    pub max_ancilla: usize,
    pub max_components: usize,
    pub mixed_count: usize,
    pub dilated_count: usize,
    pub mixed_subset_of_dilated: bool,
    pub strict_inclusion: bool,
    pub separating_relation: Option<SeparatingRelation>,
    /// The dilated set is exhaustive only for ancilla dimensions within the
    /// bound; the mixed set is exhaustive within the component bound.
    pub note: String,
    pub mixed: Vec<String>,
    pub dilated: Vec<String>,
}

impl Census {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("census serializes");
        s.push('\n');
        s
    }

    /// Counts table, one record.
    pub fn to_csv(&self) -> String {
        format!(
            "carrier_size,depth,max_ancilla,max_components,mixed_count,dilated_count,mixed_subset_of_dilated,strict_inclusion\n{},{},{},{},{},{},{},{}\n",
            self.carrier_size,
            self.depth,
            self.max_ancilla,
            self.max_components,
            self.mixed_count,
            self.dilated_count,
            self.mixed_subset_of_dilated,
            self.strict_inclusion
        )
    }
}

/// Node budget for the dilated-side enumeration.
const MAX_CENSUS_NODES: f64 = 6e8;
/// Largest slice alphabet for which the pairwise table is built.
const MAX_TABLE_BASE: usize = 1024;

fn combinations_upto(n: usize, k: usize) -> f64 {
    let mut total = 0.0f64;
    let mut c = 1.0f64;
    for i in 1..=k.min(n) {
        c = c * ((n - i + 1) as f64) / (i as f64);
        total += c;
        if !total.is_finite() {
            return f64::INFINITY;
        }
    }
    total
}

/// Exhaustively enumerate all depth-`n` mixed and dilated relations over a
/// carrier of the given size, within the bounds. Supported: carrier 1..=3,
/// depth 1..=2. Requests whose search space exceeds the internal budget are
/// refused with advice.
pub fn enumerate_census(carrier: usize, depth: usize, bounds: &CensusBounds) -> Result<Census> {
    if carrier == 0 || carrier > 3 {
        return Err(Error::Bounds(format!(
            "carrier size {carrier} unsupported; the census runs at sizes 1..=3"
        )));
    }
    if depth == 0 || depth > 2 {
        return Err(Error::Bounds(format!(
            "depth {depth} unsupported; the census runs at depths 1..=2"
        )));
    }
    if bounds.max_ancilla == 0 || bounds.max_components == 0 {
        return Err(Error::Bounds("bounds must be >= 1".into()));
    }

    let (mixed, dilated) = match depth {
        1 => (
            depth1_mix_set(carrier, bounds.max_components),
            depth1_dilated_set(carrier, bounds.max_ancilla)?,
        ),
        _ => (
            depth2_mix_set(carrier, bounds.max_components)?,
            depth2_dilated_set(carrier, bounds.max_ancilla)?,
        ),
    };

    let mixed_keys: BTreeSet<String> = mixed;
    let dilated_keys: BTreeSet<String> = dilated;
    let subset = mixed_keys.iter().all(|k| dilated_keys.contains(k));
    let separating = dilated_keys
        .iter()
        .find(|k| !mixed_keys.contains(*k))
        .cloned();
    let strict = subset && separating.is_some();
    let dims = vec![carrier; 1 << depth];

    Ok(Census {
        format: "rel-census/1".into(),
        carrier_size: carrier,
        depth,
        max_ancilla: bounds.max_ancilla,
        max_components: bounds.max_components,
        mixed_count: mixed_keys.len(),
        dilated_count: dilated_keys.len(),
        mixed_subset_of_dilated: subset,
        strict_inclusion: strict,
        separating_relation: separating.map(|bits| SeparatingRelation { dims, bits }),
        note: format!(
            "exhaustive for mixing families of <= {} components per level and ancilla dimensions <= {}; \
             relations needing larger witnesses are not explored",
            bounds.max_components, bounds.max_ancilla
        ),
        mixed: mixed_keys.into_iter().collect(),
        dilated: dilated_keys.into_iter().collect(),
    })
}

/// All subsets of the carrier as single-factor relations.
fn base_subsets(carrier: usize) -> Vec<RelTensor> {
    let shape = Shape::new(vec![carrier]).expect("small shape");
    (0..1usize << carrier)
        .map(|mask| {
            let bits = (0..carrier).map(|i| mask >> i & 1 == 1).collect();
            RelTensor::new(shape.clone(), bits).expect("sized bits")
        })
        .collect()
}

/// Distinct outputs of one boolean mixing step over families drawn from
/// `pool`, with family size at most `limit`.
fn mix_closure(pool: &[RelTensor], limit: usize) -> Vec<RelTensor> {
    let limit = limit.min(pool.len());
    let mut seen: BTreeSet<String> = BTreeSet::new();
    let mut out = Vec::new();
    let mut family: Vec<usize> = Vec::new();
    fn dfs(
        pool: &[RelTensor],
        start: usize,
        family: &mut Vec<usize>,
        limit: usize,
        seen: &mut BTreeSet<String>,
        out: &mut Vec<RelTensor>,
    ) {
        for next in start..pool.len() {
            family.push(next);
            let members: Vec<RelTensor> = family.iter().map(|&i| pool[i].clone()).collect();
            let mixed = rel_mix_step(&members).expect("equal shapes");
            if seen.insert(canonical_form(&mixed)) {
                out.push(mixed);
            }
            if family.len() < limit {
                dfs(pool, next + 1, family, limit, seen, out);
            }
            family.pop();
        }
    }
    dfs(pool, 0, &mut family, limit, &mut seen, &mut out);
    out
}

fn depth1_mix_set(carrier: usize, max_components: usize) -> BTreeSet<String> {
    mix_closure(&base_subsets(carrier), max_components)
        .iter()
        .map(canonical_form)
        .collect()
}

/// Depth-1 dilated relations: seeds over `A ⊗ B` with `dim B` bounded give
/// exactly the mixing closure with the ancilla bound as family size.
fn depth1_dilated_set(carrier: usize, max_ancilla: usize) -> Result<BTreeSet<String>> {
    Ok(mix_closure(&base_subsets(carrier), max_ancilla)
        .iter()
        .map(canonical_form)
        .collect())
}

fn depth2_mix_set(carrier: usize, max_components: usize) -> Result<BTreeSet<String>> {
    let level1 = mix_closure(&base_subsets(carrier), max_components);
    let work = combinations_upto(level1.len(), max_components);
    if work > MAX_CENSUS_NODES {
        return Err(Error::Bounds(format!(
            "depth-2 mixing would enumerate ~{work:.1e} families over {} depth-1 states; \
             lower --max-components",
            level1.len()
        )));
    }
    Ok(mix_closure(&level1, max_components)
        .iter()
        .map(canonical_form)
        .collect())
}

/// Depth-2 dilated relations via the pairwise table.
///
/// A seed over `A ⊗ B ⊗ C` is, up to collapse of duplicate slices, a set
/// `{T_1..T_b}` of relations `T_i ⊆ A×C`, and the double dilation is the OR
/// over ordered pairs `(i, j)` of a term depending on `(T_i, T_j)` only.
/// Tabulating all pairs makes the family enumeration incremental. Smaller
/// ancilla dimensions embed by padding with empty columns, so only the
/// maximal `dim C` is enumerated.
fn depth2_dilated_set(carrier: usize, max_ancilla: usize) -> Result<BTreeSet<String>> {
    let s = carrier;
    let c = max_ancilla;
    let t_bits = s * c;
    let t_count = 1usize << t_bits;
    if t_count > MAX_TABLE_BASE {
        return Err(Error::Bounds(format!(
            "{t_count} distinct slices over the {s}x{c} ancilla plane exceed the table budget; \
             lower --max-ancilla (carrier {s} supports up to {})",
            (MAX_TABLE_BASE.trailing_zeros() as usize) / s
        )));
    }
    let nodes = combinations_upto(t_count, max_ancilla);
    if nodes > MAX_CENSUS_NODES {
        return Err(Error::Bounds(format!(
            "depth-2 dilation would visit ~{nodes:.1e} slice families; lower --max-ancilla"
        )));
    }

    let out_bits = s * s * s * s;
    debug_assert!(out_bits <= 128);

    // G(x, y)(a, a') = OR_k x(a, k) ∧ y(a', k), packed as s*s bits;
    // slice rows are the k-masks of each carrier point.
    let row = |t: usize, a: usize| -> usize { (t >> (a * c)) & ((1 << c) - 1) };
    let mut table = vec![0u128; t_count * t_count];
    for x in 0..t_count {
        for y in 0..t_count {
            let mut g = 0u64;
            for a in 0..s {
                for ap in 0..s {
                    if row(x, a) & row(y, ap) != 0 {
                        g |= 1 << (a * s + ap);
                    }
                }
            }
            // W bit (a1,a2,a3,a4) = G(a1,a4) ∧ G(a2,a3).
            let mut w = 0u128;
            for a1 in 0..s {
                for a2 in 0..s {
                    for a3 in 0..s {
                        for a4 in 0..s {
                            if g >> (a1 * s + a4) & 1 == 1 && g >> (a2 * s + a3) & 1 == 1 {
                                w |= 1 << (((a1 * s + a2) * s + a3) * s + a4);
                            }
                        }
                    }
                }
            }
            table[x * t_count + y] = w;
        }
    }

    // Incremental DFS over strictly increasing slice families.
    enum Sink {
        Bitmap(Vec<bool>),
        Set(HashSet<u128>),
    }
    impl Sink {
        fn record(&mut self, psi: u128) {
            match self {
                Sink::Bitmap(map) => map[psi as usize] = true,
                Sink::Set(set) => {
                    set.insert(psi);
                }
            }
        }
    }
    let mut sink = if out_bits <= 20 {
        Sink::Bitmap(vec![false; 1 << out_bits])
    } else {
        Sink::Set(HashSet::new())
    };

    fn dfs(
        table: &[u128],
        t_count: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        psi: u128,
        left: usize,
        sink: &mut Sink,
    ) {
        for t in start..t_count {
            let mut next = psi | table[t * t_count + t];
            for &x in chosen.iter() {
                next |= table[x * t_count + t] | table[t * t_count + x];
            }
            sink.record(next);
            if left > 1 {
                chosen.push(t);
                dfs(table, t_count, t + 1, chosen, next, left - 1, sink);
                chosen.pop();
            }
        }
    }
    let mut chosen = Vec::new();
    dfs(
        &table,
        t_count,
        0,
        &mut chosen,
        0,
        max_ancilla.min(t_count),
        &mut sink,
    );

    let keys = match sink {
        Sink::Bitmap(map) => map
            .iter()
            .enumerate()
            .filter_map(|(psi, &hit)| hit.then(|| key_of(psi as u128, out_bits)))
            .collect(),
        Sink::Set(set) => {
            let mut sorted: Vec<u128> = set.into_iter().collect();
            sorted.sort_unstable();
            sorted.into_iter().map(|psi| key_of(psi, out_bits)).collect()
        }
    };
    Ok(keys)
}

fn key_of(psi: u128, bits: usize) -> String {
    (0..bits)
        .map(|i| if psi >> i & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// Unpack a census key back into a relation over the given dims.
pub fn relation_from_key(dims: &[usize], key: &str) -> Result<RelTensor> {
    let shape = Shape::new(dims.to_vec())?;
    if key.len() != shape.total_size() {
        return Err(Error::Shape(format!(
            "key of length {} over shape of size {}",
            key.len(),
            shape.total_size()
        )));
    }
    let bits = key
        .chars()
        .map(|ch| match ch {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(Error::Precondition(format!("bad key character {other:?}"))),
        })
        .collect::<Result<Vec<bool>>>()?;
    RelTensor::new(shape, bits)
}
