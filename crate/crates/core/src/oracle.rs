//! Exhaustive oracles for small instances.
//!
//! Two independent routes to the optimal linear code length:
//! - [`optimal_code_length`] searches coding matrices column by column and
//!   checks decodability directly;
//! - [`minrank_fitted`] enumerates subspaces of `F_q^m` and asks whether each
//!   client's row of some fitted matrix can be drawn from the subspace.
//!
//! Every search has a hard budget and fails loudly instead of running long.

use serde::Serialize;

use crate::decode::decodable_messages;
use crate::error::{Error, Result};
use crate::field::{reduce_columns, FMatrix, Field};
use crate::instance::PliableInstance;

/// Column assignments the matrix search may visit.
pub const DEFAULT_NODE_BUDGET: u64 = 100_000_000;
/// Matrices [`enumerate_codes`] may list.
pub const DEFAULT_MATRIX_BUDGET: u128 = 100_000_000;
/// Subspaces per dimension [`minrank_fitted`] may list.
pub const DEFAULT_SUBSPACE_BUDGET: u128 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OptimalCode {
    #[serde(rename = "K")]
    pub k: usize,
    pub witness: FMatrix,
    /// Column assignments visited over all tried lengths.
    pub enumerated: u64,
}

/// Searches `K = 0, 1, ..., max_k` for the shortest valid code over `field`.
///
/// Matrices are visited in lexicographic order of their columns (each
/// column read top to bottom as a base-`q` number), so the witness is the
/// first valid matrix in that order. A branch is cut as soon as a client
/// whose requirement set is fully assigned cannot decode.
pub fn optimal_code_length(instance: &PliableInstance, field: Field, max_k: usize) -> Result<OptimalCode> {
    optimal_code_length_with_budget(instance, field, max_k, DEFAULT_NODE_BUDGET)
}

pub fn optimal_code_length_with_budget(
    instance: &PliableInstance,
    field: Field,
    max_k: usize,
    budget: u64,
) -> Result<OptimalCode> {
    let m = instance.m();
    // clients to check once column j is placed: those whose last required message is j
    let mut closing: Vec<Vec<usize>> = vec![Vec::new(); m];
    for i in 0..instance.n() {
        if let Some(&last) = instance.requirement(i).last() {
            closing[last].push(i);
        }
    }

    let mut nodes = 0u64;
    for k in 0..=max_k {
        if m == 0 || closing.iter().all(Vec::is_empty) {
            return Ok(OptimalCode {
                k,
                witness: FMatrix::zeros(field, k, m),
                enumerated: nodes,
            });
        }
        let Some(column_count) = (field.order() as u64).checked_pow(k as u32) else {
            return Err(Error::BudgetExceeded {
                what: "column values",
                needed: u128::MAX,
                budget: budget as u128,
            });
        };
        let mut search = ColumnSearch {
            instance,
            field,
            k,
            closing: &closing,
            columns: vec![0; m],
            nodes: &mut nodes,
            budget,
            column_count,
        };
        if search.descend(0)? {
            let witness = search.matrix();
            return Ok(OptimalCode { k, witness, enumerated: nodes });
        }
    }
    Err(Error::ExceedsLimit(max_k))
}

struct ColumnSearch<'a> {
    instance: &'a PliableInstance,
    field: Field,
    k: usize,
    closing: &'a [Vec<usize>],
    /// Column values as base-q numbers.
    columns: Vec<u64>,
    nodes: &'a mut u64,
    budget: u64,
    column_count: u64,
}

impl ColumnSearch<'_> {
    fn digits(&self, value: u64) -> Vec<u32> {
        let q = self.field.order() as u64;
        let mut out = vec![0; self.k];
        let mut v = value;
        for slot in out.iter_mut().rev() {
            *slot = (v % q) as u32;
            v /= q;
        }
        out
    }

    fn matrix(&self) -> FMatrix {
        let m = self.columns.len();
        let cols: Vec<Vec<u32>> = self.columns.iter().map(|&c| self.digits(c)).collect();
        let mut data = vec![0; self.k * m];
        for (j, col) in cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                data[r * m + j] = v;
            }
        }
        FMatrix::new(self.field, self.k, m, data).expect("digits are field elements")
    }

    fn client_ok(&self, client: usize) -> bool {
        let req = self.instance.requirement(client);
        let mut data = vec![0; self.k * req.len()];
        for (c, &j) in req.iter().enumerate() {
            for (r, v) in self.digits(self.columns[j]).into_iter().enumerate() {
                data[r * req.len() + c] = v;
            }
        }
        let sub = FMatrix::new(self.field, self.k, req.len(), data).expect("valid entries");
        reduce_columns(&sub).isolated.iter().any(|&x| x)
    }

    fn descend(&mut self, j: usize) -> Result<bool> {
        if j == self.columns.len() {
            return Ok(true);
        }
        for value in 0..self.column_count {
            *self.nodes += 1;
            if *self.nodes > self.budget {
                return Err(Error::BudgetExceeded {
                    what: "code search nodes",
                    needed: *self.nodes as u128,
                    budget: self.budget as u128,
                });
            }
            self.columns[j] = value;
            if self.closing[j].iter().all(|&i| self.client_ok(i)) && self.descend(j + 1)? {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CodeCensus {
    pub enumerated: u64,
    pub valid: u64,
}

/// Lists every `k × m` matrix over `field` without pruning and counts the
/// valid codes. Refuses when `q^(k·m)` exceeds [`DEFAULT_MATRIX_BUDGET`].
pub fn enumerate_codes(instance: &PliableInstance, field: Field, k: usize) -> Result<CodeCensus> {
    let m = instance.m();
    let q = field.order() as u128;
    let total = (0..k * m).try_fold(1u128, |acc, _| acc.checked_mul(q)).unwrap_or(u128::MAX);
    if total > DEFAULT_MATRIX_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "matrices",
            needed: total,
            budget: DEFAULT_MATRIX_BUDGET,
        });
    }
    let mut data = vec![0u32; k * m];
    let mut census = CodeCensus { enumerated: 0, valid: 0 };
    loop {
        census.enumerated += 1;
        let a = FMatrix::new(field, k, m, data.clone())?;
        let ok = (0..instance.n()).all(|i| {
            instance.is_vacuous(i) || !decodable_messages(&a, instance, i).expect("shape matches").is_empty()
        });
        census.valid += ok as u64;
        // odometer increment, last entry fastest
        let mut pos = data.len();
        loop {
            if pos == 0 {
                return Ok(census);
            }
            pos -= 1;
            data[pos] += 1;
            if data[pos] < field.order() {
                break;
            }
            data[pos] = 0;
        }
    }
}

/// Gaussian binomial `[m choose r]_q`, the number of `r`-dimensional
/// subspaces of `F_q^m`. Saturates at `u128::MAX`.
pub fn gaussian_binomial(m: usize, r: usize, q: u32) -> u128 {
    if r > m {
        return 0;
    }
    let q = q as u128;
    let pow = |e: usize| (0..e).try_fold(1u128, |acc, _| acc.checked_mul(q));
    let mut num = 1u128;
    let mut den = 1u128;
    for i in 0..r {
        let (Some(a), Some(b)) = (pow(m - i), pow(i + 1)) else {
            return u128::MAX;
        };
        let Some(n) = num.checked_mul(a - 1) else {
            return u128::MAX;
        };
        num = n;
        den *= b - 1;
        let g = gcd(num, den);
        num /= g;
        den /= g;
    }
    num / den
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Visits every `r`-dimensional subspace of `F_q^m` once, as its reduced
/// row echelon basis. Order: pivot sets lexicographically, then free entries
/// as an odometer (last entry fastest). Stops early when `visit` returns
/// `false`; returns the number of subspaces visited.
pub fn for_each_subspace(field: Field, m: usize, r: usize, mut visit: impl FnMut(&FMatrix) -> bool) -> u64 {
    if r > m {
        return 0;
    }
    let q = field.order();
    let mut count = 0u64;
    let mut pivots: Vec<usize> = (0..r).collect();
    loop {
        let mut is_pivot = vec![false; m];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        let mut base = vec![0u32; r * m];
        let mut free = Vec::new();
        for (row, &p) in pivots.iter().enumerate() {
            base[row * m + p] = 1;
            free.extend((p + 1..m).filter(|&c| !is_pivot[c]).map(|c| row * m + c));
        }
        let mut fill = vec![0u32; free.len()];
        loop {
            let mut data = base.clone();
            for (&slot, &v) in free.iter().zip(&fill) {
                data[slot] = v;
            }
            count += 1;
            let basis = FMatrix::new(field, r, m, data).expect("entries below q");
            if !visit(&basis) {
                return count;
            }
            let mut pos = fill.len();
            let mut carried_out = true;
            while pos > 0 {
                pos -= 1;
                fill[pos] += 1;
                if fill[pos] < q {
                    carried_out = false;
                    break;
                }
                fill[pos] = 0;
            }
            if carried_out {
                break;
            }
        }
        if !next_combination(&mut pivots, m) {
            return count;
        }
    }
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let r = combo.len();
    let Some(i) = (0..r).rev().find(|&i| combo[i] < n - r + i) else {
        return false;
    };
    combo[i] += 1;
    for k in i + 1..r {
        combo[k] = combo[k - 1] + 1;
    }
    true
}

/// Whether `row` is an admissible row of a fitted matrix for `client`:
/// exactly one required position holds 1 and the other required positions
/// hold 0. Side-information positions are unconstrained.
pub fn fits_client(instance: &PliableInstance, client: usize, row: &[u32]) -> bool {
    let req = instance.requirement(client);
    let mut ones = 0;
    for &j in req {
        match row[j] {
            0 => {}
            1 => ones += 1,
            _ => return false,
        }
    }
    ones == 1
}

/// All `q^r` vectors of the row space of `basis`.
fn span_vectors(basis: &FMatrix) -> Vec<Vec<u32>> {
    let field = basis.field();
    let q = field.order();
    let (r, m) = (basis.rows(), basis.cols());
    let mut coeffs = vec![0u32; r];
    let mut out = Vec::new();
    loop {
        let mut v = vec![0u32; m];
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                for (x, &b) in v.iter_mut().zip(basis.row(k)) {
                    *x = field.add(*x, field.mul(c, b));
                }
            }
        }
        out.push(v);
        let mut pos = r;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            coeffs[pos] += 1;
            if coeffs[pos] < q {
                break;
            }
            coeffs[pos] = 0;
        }
    }
}

/// Whether some fitted matrix has all its rows inside the row space of
/// `basis`.
pub fn subspace_fits(instance: &PliableInstance, basis: &FMatrix) -> bool {
    let vectors = span_vectors(basis);
    (0..instance.n())
        .filter(|&i| !instance.is_vacuous(i))
        .all(|i| vectors.iter().any(|v| fits_client(instance, i, v)))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Minrank {
    pub r: usize,
    /// Reduced echelon basis of the first fitting subspace found.
    pub basis: FMatrix,
    /// Subspaces visited over all tried dimensions.
    pub enumerated: u64,
}

/// Smallest dimension `r <= max_r` of a subspace of `F_q^m` containing a
/// fitted row for every non-vacuous client. That dimension is the minimum
/// rank over all fitted matrices.
pub fn minrank_fitted(instance: &PliableInstance, field: Field, max_r: usize) -> Result<Minrank> {
    let m = instance.m();
    let mut enumerated = 0u64;
    for r in 0..=max_r.min(m) {
        let count = gaussian_binomial(m, r, field.order());
        if count > DEFAULT_SUBSPACE_BUDGET {
            return Err(Error::BudgetExceeded {
                what: "subspaces",
                needed: count,
                budget: DEFAULT_SUBSPACE_BUDGET,
            });
        }
        let mut found = None;
        enumerated += for_each_subspace(field, m, r, |basis| {
            if subspace_fits(instance, basis) {
                found = Some(basis.clone());
                false
            } else {
                true
            }
        });
        if let Some(basis) = found {
            return Ok(Minrank { r, basis, enumerated });
        }
    }
    Err(Error::ExceedsLimit(max_r))
}

/// Smallest prime in `primes` over which the all-pairs instance on `m`
/// messages has a length-2 code.
pub fn min_field_for_length2(m: usize, primes: &[u32]) -> Result<Option<u32>> {
    if m < 3 {
        return Err(Error::InvalidParameter("min_field_for_length2 needs m >= 3".into()));
    }
    let instance = PliableInstance::all_pairs(m)?;
    let mut sorted = primes.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    for q in sorted {
        let field = Field::new(q)?;
        match optimal_code_length(&instance, field, 2) {
            Ok(code) if code.k == 2 => return Ok(Some(q)),
            Ok(_) | Err(Error::ExceedsLimit(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(None)
}

/// Maximum number of pairwise linearly independent nonzero vectors in
/// `F_q^2`: the two axis vectors plus `q - 1` vectors with both entries
/// nonzero, one per scalar class.
pub fn count_pairwise_independent(q: u32) -> Result<usize> {
    Field::new(q)?;
    Ok(2 + (q as usize - 1))
}

/// The same count by brute force: scan all nonzero vectors of `F_q^2` and
/// keep each one independent of everything kept so far.
pub fn pairwise_independent_exhaustive(field: Field) -> Vec<[u32; 2]> {
    let q = field.order();
    let mut kept: Vec<[u32; 2]> = Vec::new();
    for x in 0..q {
        for y in 0..q {
            if x == 0 && y == 0 {
                continue;
            }
            let independent = kept.iter().all(|&[a, b]| {
                // det [a x; b y] != 0
                field.sub(field.mul(a, y), field.mul(b, x)) != 0
            });
            if independent {
                kept.push([x, y]);
            }
        }
    }
    kept
}
