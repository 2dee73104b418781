//! Round-robin coordinate-pair schedules via the circle method.
//!
//! A schedule partitions all coordinate pairs `(i, j)`, `i < j`, into
//! `n_effective - 1` blocks of `n_effective / 2` pairs such that no two pairs
//! in a block share a coordinate. The construction fixes the first element of
//! a seed permutation and cyclically shifts the rest, pairing entries at
//! equal distance from the ends of the current arrangement.
//!
//! Odd dimensions are handled by appending a phantom coordinate equal to `n`;
//! pairs touching it stay in the block structure but are flagged inactive.
//! The restricted parametrization keeps only pairs with `i < m_active`, again
//! by flagging rather than re-coloring, so kernels skip them with a single
//! comparison.

use std::fmt;

use crate::error::{GivensError, Result};

/// An unordered coordinate pair stored as `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CoordinatePair {
    pub i: usize,
    pub j: usize,
}

impl CoordinatePair {
    /// Normalizing constructor; rejects `a == b`.
    pub fn new(a: usize, b: usize) -> Result<Self> {
        if a == b {
            return Err(GivensError::DegeneratePair(a));
        }
        Ok(Self::ordered(a, b))
    }

    #[inline]
    pub(crate) fn ordered(a: usize, b: usize) -> Self {
        if a < b {
            Self { i: a, j: b }
        } else {
            Self { i: b, j: a }
        }
    }
}

impl fmt::Display for CoordinatePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.i, self.j)
    }
}

/// A scheduled pair that survives the phantom/restriction filters, with its
/// precomputed slot and flat parameter index. Internal to the kernels.
#[derive(Clone, Copy, Debug)]
pub(crate) struct ActivePair {
    pub i: u32,
    pub j: u32,
    /// Structural position of the pair inside its block.
    pub slot: u32,
    /// Contiguous block-major parameter index.
    pub flat: u32,
}

/// Ordered blocks of disjoint coordinate pairs covering every pair exactly
/// once, plus the activity filters.
#[derive(Clone, Debug)]
pub struct RotationSchedule {
    n: usize,
    n_effective: usize,
    m_active: usize,
    initial_permutation: Vec<usize>,
    blocks: Vec<Vec<CoordinatePair>>,
    active: Vec<Vec<ActivePair>>,
    active_count: usize,
}

impl RotationSchedule {
    /// Logical matrix dimension (may be odd).
    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    /// `n` rounded up to even; the dimension the circle method runs on.
    #[inline]
    pub fn n_effective(&self) -> usize {
        self.n_effective
    }

    /// Restriction bound `m`; pairs with `i >= m` are inactive. `m == n`
    /// means unrestricted.
    #[inline]
    pub fn m_active(&self) -> usize {
        self.m_active
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn blocks(&self) -> &[Vec<CoordinatePair>] {
        &self.blocks
    }

    pub fn block(&self, k: usize) -> &[CoordinatePair] {
        &self.blocks[k]
    }

    pub fn initial_permutation(&self) -> &[usize] {
        &self.initial_permutation
    }

    /// A pair parametrizes a rotation iff it avoids both the phantom
    /// coordinate and the restricted trailing subset.
    #[inline]
    pub fn is_active(&self, e: CoordinatePair) -> bool {
        e.i < self.m_active && e.j < self.n
    }

    /// Number of active pairs: `m*n - m(m+1)/2` with `m = m_active`.
    #[inline]
    pub fn active_pair_count(&self) -> usize {
        self.active_count
    }

    #[inline]
    pub(crate) fn active_in_block(&self, k: usize) -> &[ActivePair] {
        &self.active[k]
    }

    /// Derive the pair at `(block, slot)` directly from the seed permutation
    /// without reading the materialized blocks. Workers could use this to
    /// recover their pair from the step index alone; it must agree with
    /// `block(k)[slot]` (tested).
    pub fn pair_at(&self, block: usize, slot: usize) -> CoordinatePair {
        let ne = self.n_effective;
        let rot = ne - 1;
        let elem = |pos: usize| -> usize {
            if pos == 0 {
                self.initial_permutation[0]
            } else {
                // position `pos` after `block` right-rotations of the tail
                let src = (pos as isize - 1 - block as isize).rem_euclid(rot as isize) as usize;
                self.initial_permutation[1 + src]
            }
        };
        CoordinatePair::ordered(elem(slot), elem(ne - 1 - slot))
    }

    /// Line-oriented text export: one block per line, pairs as `i-j`
    /// separated by spaces, inactive pairs marked with a trailing `*`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for block in &self.blocks {
            let line: Vec<String> = block
                .iter()
                .map(|&e| {
                    if self.is_active(e) {
                        e.to_string()
                    } else {
                        format!("{e}*")
                    }
                })
                .collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Build the circle-method schedule for dimension `n`.
///
/// `initial_permutation`, when given, must be a permutation of
/// `0..n_effective`; the default is the identity. `m_active` restricts the
/// parametrization to pairs with `i < m_active` (`m_active == n` keeps all).
pub fn build_circle_schedule(
    n: usize,
    initial_permutation: Option<&[usize]>,
    m_active: usize,
) -> Result<RotationSchedule> {
    if n < 2 {
        return Err(GivensError::DimensionTooSmall(n));
    }
    if m_active < 1 || m_active > n {
        return Err(GivensError::InvalidRestriction { m: m_active, n });
    }
    let n_effective = n + (n % 2);

    let perm: Vec<usize> = match initial_permutation {
        Some(p) => {
            if p.len() != n_effective {
                return Err(GivensError::InvalidPermutation(format!(
                    "length {} != n_effective {}",
                    p.len(),
                    n_effective
                )));
            }
            let mut seen = vec![false; n_effective];
            for &v in p {
                if v >= n_effective {
                    return Err(GivensError::InvalidPermutation(format!(
                        "entry {v} out of range 0..{n_effective}"
                    )));
                }
                if seen[v] {
                    return Err(GivensError::InvalidPermutation(format!("duplicate entry {v}")));
                }
                seen[v] = true;
            }
            p.to_vec()
        }
        None => (0..n_effective).collect(),
    };

    let half = n_effective / 2;
    let mut arrangement = perm.clone();
    let mut blocks = Vec::with_capacity(n_effective - 1);
    for _ in 0..n_effective - 1 {
        let block: Vec<CoordinatePair> = (0..half)
            .map(|s| CoordinatePair::ordered(arrangement[s], arrangement[n_effective - 1 - s]))
            .collect();
        blocks.push(block);
        // hold the first element, shift the rest one step
        arrangement[1..].rotate_right(1);
    }

    let mut active = Vec::with_capacity(blocks.len());
    let mut flat = 0u32;
    for block in &blocks {
        let row: Vec<ActivePair> = block
            .iter()
            .enumerate()
            .filter(|(_, e)| e.i < m_active && e.j < n)
            .map(|(slot, e)| {
                let ap = ActivePair {
                    i: e.i as u32,
                    j: e.j as u32,
                    slot: slot as u32,
                    flat,
                };
                flat += 1;
                ap
            })
            .collect();
        active.push(row);
    }
    let active_count = flat as usize;
    debug_assert_eq!(active_count, m_active * n - m_active * (m_active + 1) / 2);

    Ok(RotationSchedule {
        n,
        n_effective,
        m_active,
        initial_permutation: perm,
        blocks,
        active,
        active_count,
    })
}

/// One validated invariant.
#[derive(Clone, Debug)]
pub struct ValidationCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Pass/fail report over the schedule invariants. Failures are reported,
/// never thrown.
#[derive(Clone, Debug)]
pub struct ValidationReport {
    pub checks: Vec<ValidationCheck>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ValidationCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            if c.detail.is_empty() {
                writeln!(f, "{}: {}", c.name, status)?;
            } else {
                writeln!(f, "{}: {} ({})", c.name, status, c.detail)?;
            }
        }
        Ok(())
    }
}

/// Check block count, block sizes, within-block disjointness, and exact
/// cover of all pairs.
pub fn validate_schedule(s: &RotationSchedule) -> ValidationReport {
    let ne = s.n_effective;
    let mut checks = Vec::new();

    let expected_blocks = ne - 1;
    checks.push(ValidationCheck {
        name: "block-count",
        passed: s.blocks.len() == expected_blocks,
        detail: format!("{} blocks, expected {}", s.blocks.len(), expected_blocks),
    });

    let bad_sizes: Vec<usize> = s
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.len() != ne / 2)
        .map(|(k, _)| k)
        .collect();
    checks.push(ValidationCheck {
        name: "block-sizes",
        passed: bad_sizes.is_empty(),
        detail: if bad_sizes.is_empty() {
            format!("all blocks have {} pairs", ne / 2)
        } else {
            format!("blocks {bad_sizes:?} have the wrong size")
        },
    });

    let mut disjoint_failures = Vec::new();
    for (k, block) in s.blocks.iter().enumerate() {
        let mut seen = vec![false; ne];
        for e in block {
            for c in [e.i, e.j] {
                if c >= ne {
                    disjoint_failures.push(format!("block {k}: coordinate {c} out of range"));
                } else if seen[c] {
                    disjoint_failures.push(format!("block {k}: coordinate {c} repeated"));
                } else {
                    seen[c] = true;
                }
            }
        }
    }
    checks.push(ValidationCheck {
        name: "within-block-disjointness",
        passed: disjoint_failures.is_empty(),
        detail: disjoint_failures.join("; "),
    });

    let mut counts = vec![0usize; ne * ne];
    for block in &s.blocks {
        for e in block {
            if e.i < ne && e.j < ne {
                counts[e.i * ne + e.j] += 1;
            }
        }
    }
    let mut cover_failures = Vec::new();
    for i in 0..ne {
        for j in i + 1..ne {
            match counts[i * ne + j] {
                1 => {}
                0 => cover_failures.push(format!("pair {i}-{j} missing")),
                c => cover_failures.push(format!("pair {i}-{j} appears {c} times")),
            }
        }
    }
    checks.push(ValidationCheck {
        name: "exact-cover",
        passed: cover_failures.is_empty(),
        detail: cover_failures.join("; "),
    });

    ValidationReport { checks }
}

/// Bijection between active pairs and their `(block, slot)` positions and
/// flat block-major parameter indices.
#[derive(Clone, Debug)]
pub struct PairIndexMap {
    n_effective: usize,
    entries: Vec<Option<(u32, u32, u32)>>, // (block, slot, flat), keyed i * ne + j
    pairs: Vec<CoordinatePair>,            // flat -> pair
}

impl PairIndexMap {
    /// Flat parameter index of an active pair, `None` if inactive/unknown.
    pub fn flat_index(&self, e: CoordinatePair) -> Option<usize> {
        self.lookup(e).map(|(_, _, f)| f as usize)
    }

    /// `(block, slot)` of an active pair.
    pub fn block_slot(&self, e: CoordinatePair) -> Option<(usize, usize)> {
        self.lookup(e).map(|(b, s, _)| (b as usize, s as usize))
    }

    /// Inverse direction: the pair carrying flat index `flat`.
    pub fn pair(&self, flat: usize) -> Option<CoordinatePair> {
        self.pairs.get(flat).copied()
    }

    /// Active pairs in flat order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, CoordinatePair)> + '_ {
        self.pairs.iter().copied().enumerate()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    fn lookup(&self, e: CoordinatePair) -> Option<(u32, u32, u32)> {
        if e.i >= self.n_effective || e.j >= self.n_effective {
            return None;
        }
        self.entries[e.i * self.n_effective + e.j]
    }
}

/// Build the active-pair index map for a schedule. Flat indices are
/// contiguous `0..active_pair_count` in block-major order.
pub fn pair_index_map(s: &RotationSchedule) -> PairIndexMap {
    let ne = s.n_effective;
    let mut entries = vec![None; ne * ne];
    let mut pairs = Vec::with_capacity(s.active_count);
    for (b, row) in s.active.iter().enumerate() {
        for ap in row {
            let e = CoordinatePair {
                i: ap.i as usize,
                j: ap.j as usize,
            };
            entries[e.i * ne + e.j] = Some((b as u32, ap.slot, ap.flat));
            pairs.push(e);
        }
    }
    PairIndexMap {
        n_effective: ne,
        entries,
        pairs,
    }
}
