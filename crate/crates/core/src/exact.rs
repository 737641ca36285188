//! Exact counters for the number of d-regular (r,r)-graphs.
//!
//! Three independent routes (subset enumeration, a slab dynamic program for
//! r = 3, and root-of-unity coefficient extraction) plus the reduced
//! Cauchy integral evaluated by an exact periodic quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hypergraph::{Hypergraph, Params};
use crate::numeric::{binomial_u128, xlogx, BigCount, LogReal};

/// Work limits for the exact counters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Maximum `C(m^r, m d)` for subset enumeration.
    pub subsets: u128,
    /// Maximum DP work (state bound times slab classes).
    pub dp_work: u128,
    /// Maximum grid evaluations for the DFT and quadrature routes.
    pub grid_points: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { subsets: 100_000_000, dp_work: 1_000_000_000, grid_points: 100_000_000 }
    }
}

impl Budget {
    /// The same limit for every counter.
    pub fn uniform(limit: u128) -> Self {
        Budget { subsets: limit, dp_work: limit, grid_points: limit }
    }

    /// Defaults, overridden by `HYPERCOUNT_BUDGET` when set.
    pub fn from_env() -> Self {
        std::env::var("HYPERCOUNT_BUDGET")
            .ok()
            .and_then(|s| s.trim().parse::<u128>().ok())
            .map(Budget::uniform)
            .unwrap_or_default()
    }
}

fn check_budget(what: &'static str, needed: u128, budget: u128) -> Result<()> {
    if needed > budget {
        Err(Error::BudgetExceeded { what, needed, budget })
    } else {
        Ok(())
    }
}

/// Enumerate every d-regular (r,r)-graph, calling `visit` with its sorted
/// cell indices.
///
/// Cells are scanned in lexicographic order, so the cells through class-1
/// vertex `i` form one contiguous block; a branch is cut as soon as a degree
/// exceeds `d` or a finished block leaves its vertex short.
pub fn enumerate_regular(p: &Params, budget: &Budget, mut visit: impl FnMut(&[u64])) -> Result<()> {
    let subsets = binomial_u128(p.cells(), p.edges()).unwrap_or(u128::MAX);
    check_budget("subset enumeration", subsets, budget.subsets)?;

    let cells = p.cells() as usize;
    let block = p.cells_per_vertex() as usize;
    let verts: Vec<Vec<usize>> =
        (0..p.cells()).map(|c| p.cell_vertices(c).into_iter().map(|v| v as usize).collect()).collect();

    struct Walk<'a, F: FnMut(&[u64])> {
        d: u64,
        cells: usize,
        block: usize,
        verts: &'a [Vec<usize>],
        deg: Vec<u64>,
        chosen: Vec<u64>,
        visit: F,
    }

    impl<F: FnMut(&[u64])> Walk<'_, F> {
        fn go(&mut self, pos: usize, block_count: u64) {
            if pos % self.block == 0 && pos > 0 && block_count != self.d {
                return;
            }
            let block_count = if pos % self.block == 0 { 0 } else { block_count };
            if pos == self.cells {
                if self.deg.iter().all(|&g| g == self.d) {
                    (self.visit)(&self.chosen);
                }
                return;
            }
            let left_in_block = (self.block - pos % self.block) as u64;
            if block_count < self.d && self.verts[pos].iter().all(|&v| self.deg[v] < self.d) {
                for &v in &self.verts[pos] {
                    self.deg[v] += 1;
                }
                self.chosen.push(pos as u64);
                self.go(pos + 1, block_count + 1);
                self.chosen.pop();
                for &v in &self.verts[pos] {
                    self.deg[v] -= 1;
                }
            }
            // exclude
            if block_count + left_in_block > self.d {
                self.go(pos + 1, block_count);
            }
        }
    }

    let mut walk = Walk {
        d: p.d,
        cells,
        block,
        verts: &verts,
        deg: vec![0; p.n() as usize],
        chosen: Vec::with_capacity(p.edges() as usize),
        visit: &mut visit,
    };
    walk.go(0, 0);
    Ok(())
}

/// All d-regular (r,r)-graphs, in lexicographic order of their cell lists.
pub fn list_regular(p: &Params, budget: &Budget) -> Result<Vec<Hypergraph>> {
    let mut out = Vec::new();
    enumerate_regular(p, budget, |cells| out.push(Hypergraph::from_cells(*p, cells)))?;
    Ok(out)
}

/// Exact count by enumerating edge subsets.
pub fn count_bruteforce(p: &Params, budget: &Budget) -> Result<BigCount> {
    let mut n: u64 = 0;
    enumerate_regular(p, budget, |_| n += 1)?;
    Ok(BigCount::from_u64(n))
}

/// Exact count for r = 3 by a dynamic program over the m slabs of class 1.
///
/// Each slab is an `m x m` 0/1 matrix with `d` ones; the state is the pair of
/// residual degree vectors of classes 2 and 3. Completions only depend on
/// the multisets of residuals, so states are kept sorted.
pub fn count_slab_dp(p: &Params, budget: &Budget) -> Result<BigCount> {
    if p.r != 3 {
        return Err(Error::UnsupportedArity(p.r));
    }
    let m = p.m as usize;
    let d = p.d;
    let slab_cells = (m * m) as u64;
    let matrices = binomial_u128(slab_cells, d).unwrap_or(u128::MAX);
    let sorted_states = binomial_u128(m as u64 + d, d).unwrap_or(u128::MAX);
    let work = sorted_states.saturating_mul(sorted_states).saturating_mul(matrices);
    check_budget("slab dynamic program", work, budget.dp_work)?;

    // Group slab matrices by (row sums, column sums).
    let mut slabs: HashMap<(Vec<u16>, Vec<u16>), u64> = HashMap::new();
    let mut chosen = Vec::with_capacity(d as usize);
    fn pick(
        start: usize,
        left: u64,
        total: usize,
        m: usize,
        chosen: &mut Vec<usize>,
        out: &mut HashMap<(Vec<u16>, Vec<u16>), u64>,
    ) {
        if left == 0 {
            let mut rows = vec![0u16; m];
            let mut cols = vec![0u16; m];
            for &c in chosen.iter() {
                rows[c / m] += 1;
                cols[c % m] += 1;
            }
            *out.entry((rows, cols)).or_insert(0) += 1;
            return;
        }
        for c in start..total {
            if (total - c) as u64 >= left {
                chosen.push(c);
                pick(c + 1, left - 1, total, m, chosen, out);
                chosen.pop();
            }
        }
    }
    pick(0, d, m * m, m, &mut chosen, &mut slabs);
    let slabs: Vec<(Vec<u16>, Vec<u16>, BigUint)> =
        slabs.into_iter().map(|((r, c), k)| (r, c, BigUint::from(k))).collect();

    let d16 = u16::try_from(d).map_err(|_| Error::domain("d too large for the slab DP"))?;
    let mut layer: HashMap<Vec<u16>, BigUint> = HashMap::new();
    layer.insert(vec![d16; 2 * m], BigUint::from(1u32));
    for _ in 0..m {
        let mut next: HashMap<Vec<u16>, BigUint> = HashMap::new();
        for (state, ways) in &layer {
            let (r2, r3) = state.split_at(m);
            for (rows, cols, mult) in &slabs {
                if rows.iter().zip(r2).any(|(a, b)| a > b) || cols.iter().zip(r3).any(|(a, b)| a > b) {
                    continue;
                }
                let mut n2: Vec<u16> = r2.iter().zip(rows).map(|(a, b)| a - b).collect();
                let mut n3: Vec<u16> = r3.iter().zip(cols).map(|(a, b)| a - b).collect();
                n2.sort_unstable();
                n3.sort_unstable();
                n2.extend(n3);
                *next.entry(n2).or_insert_with(BigUint::zero) += ways * mult;
            }
        }
        layer = next;
    }
    Ok(BigCount(layer.remove(&vec![0u16; 2 * m]).unwrap_or_else(BigUint::zero)))
}

/// Mean over a periodic grid of `grid^k` points of
/// `prod_cells w[s(cell)] * prod_vertices omega^(-d k_v)` where `s(cell)` is
/// the sum of the phase indices of the cell's vertices modulo `grid`.
///
/// With `reduced`, the last vertex of every class except the first is pinned
/// at phase 0. The last class is summed in closed form: once the phases of
/// the other classes are fixed, the product factorizes over its vertices.
fn torus_mean(p: &Params, grid: usize, weights: &[Complex64], reduced: bool) -> Complex64 {
    let r = p.r as usize;
    let m = p.m as usize;
    let prefix_cells = p.cells_per_vertex() as usize;
    let d_mod = (p.d % grid as u64) as usize;
    let omega = |k: usize| Complex64::from_polar(1.0, 2.0 * PI * (k % grid) as f64 / grid as f64);

    // pow_table[s][c] = weights[s]^c
    let pow_table: Vec<Vec<Complex64>> = weights
        .iter()
        .map(|w| {
            let mut row = Vec::with_capacity(prefix_cells + 1);
            let mut acc = Complex64::new(1.0, 0.0);
            for _ in 0..=prefix_cells {
                row.push(acc);
                acc *= w;
            }
            row
        })
        .collect();
    let char_last: Vec<Complex64> = (0..grid).map(|y| omega((grid - (d_mod * y) % grid) % grid)).collect();

    // Free vertices among classes 0..r-2.
    let prefix_vertices: Vec<(usize, usize)> = (0..r - 1)
        .flat_map(|t| (0..m).map(move |i| (t, i)))
        .filter(|&(t, i)| !(reduced && t >= 1 && i == m - 1))
        .collect();
    let free = prefix_vertices.len() as u32;
    let total = (grid as u64).pow(free);
    let last_free = if reduced { m - 1 } else { m } as u32;
    let last_fixed = if reduced { 1 } else { 0 };

    let eval = |flat: u64| -> Complex64 {
        let mut phases = vec![0usize; (r - 1) * m];
        let mut rest = flat;
        let mut phase_total = 0usize;
        for &(t, i) in &prefix_vertices {
            let k = (rest % grid as u64) as usize;
            rest /= grid as u64;
            phases[t * m + i] = k;
            phase_total += k;
        }
        // Histogram of prefix-cell phase sums, built class by class.
        let mut hist = vec![0usize; grid];
        hist[0] = 1;
        let mut class_hist = vec![0usize; grid];
        let mut next = vec![0usize; grid];
        for t in 0..r - 1 {
            class_hist.iter_mut().for_each(|x| *x = 0);
            for i in 0..m {
                class_hist[phases[t * m + i]] += 1;
            }
            next.iter_mut().for_each(|x| *x = 0);
            for (a, &ha) in hist.iter().enumerate() {
                if ha == 0 {
                    continue;
                }
                for (b, &hb) in class_hist.iter().enumerate() {
                    if hb != 0 {
                        next[(a + b) % grid] += ha * hb;
                    }
                }
            }
            std::mem::swap(&mut hist, &mut next);
        }
        let g = |y: usize| -> Complex64 {
            let mut acc = Complex64::new(1.0, 0.0);
            for (a, &ha) in hist.iter().enumerate() {
                if ha != 0 {
                    acc *= pow_table[(a + y) % grid][ha];
                }
            }
            acc
        };
        let mut s = Complex64::zero();
        let mut g0 = Complex64::zero();
        for (y, &ch) in char_last.iter().enumerate().take(grid) {
            let gy = g(y);
            if y == 0 {
                g0 = gy;
            }
            s += gy * ch;
        }
        s /= grid as f64;
        let mut last = Complex64::new(1.0, 0.0);
        for _ in 0..last_free {
            last *= s;
        }
        for _ in 0..last_fixed {
            last *= g0;
        }
        let prefix_char = omega((grid - (d_mod * (phase_total % grid)) % grid) % grid);
        prefix_char * last
    };

    const CHUNK: u64 = 4096;
    let chunks = total.div_ceil(CHUNK);
    let sum: Complex64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(total);
            (lo..hi).map(eval).sum::<Complex64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    sum / total as f64
}

fn grid_work(p: &Params, grid: usize, reduced: bool) -> u128 {
    let m = u128::from(p.m);
    let r = u128::from(p.r);
    let mut free = (r - 1) * m;
    if reduced {
        free -= r - 2;
    }
    (grid as u128).checked_pow(free as u32).and_then(|x| x.checked_mul(grid as u128)).unwrap_or(u128::MAX)
}

/// Relative tolerance for the near-integer test of the Fourier routes.
pub const ROUNDING_TOLERANCE: f64 = 1e-6;

/// Exact count via coefficient extraction on the root-of-unity grid with
/// `m^(r-1) + 1` points per variable.
pub fn count_dft(p: &Params, budget: &Budget) -> Result<BigCount> {
    let grid = (p.cells_per_vertex() + 1) as usize;
    check_budget("root-of-unity grid", grid_work(p, grid, false), budget.grid_points)?;
    let weights: Vec<Complex64> = (0..grid)
        .map(|s| Complex64::new(1.0, 0.0) + Complex64::from_polar(1.0, 2.0 * PI * s as f64 / grid as f64))
        .collect();
    let v = torus_mean(p, grid, &weights, false);
    let rounded = v.re.round();
    let scale = rounded.abs().max(1.0);
    if (v.re - rounded).abs() > ROUNDING_TOLERANCE * scale || v.im.abs() > ROUNDING_TOLERANCE * scale {
        return Err(Error::NumericalInstability(format!(
            "DFT value {v} is not within {ROUNDING_TOLERANCE} of an integer"
        )));
    }
    if rounded < 0.0 || rounded >= 2f64.powi(53) {
        return Err(Error::NumericalInstability(format!(
            "DFT value {rounded} outside the exactly representable range"
        )));
    }
    Ok(BigCount::from_u64(rounded as u64))
}

/// Log of the count from the reduced Cauchy integral, evaluated by the
/// periodic trapezoid rule with `2(m^(r-1) + d) + 1` points per free
/// variable (exact for this trigonometric polynomial).
pub fn count_reduced_integral(p: &Params, budget: &Budget) -> Result<LogReal> {
    if p.d == 0 || p.d == p.cells_per_vertex() {
        return Err(Error::domain("reduced integral needs 0 < d < m^(r-1)"));
    }
    let grid = (2 * (p.cells_per_vertex() + p.d) + 1) as usize;
    check_budget("quadrature grid", grid_work(p, grid, true), budget.grid_points)?;
    let lam = p.lambda();
    let weights: Vec<Complex64> = (0..grid)
        .map(|s| {
            let z = Complex64::from_polar(1.0, 2.0 * PI * s as f64 / grid as f64);
            Complex64::new(1.0, 0.0) + (z - 1.0) * lam
        })
        .collect();
    let mean = torus_mean(p, grid, &weights, true);
    if mean.re <= 0.0 || mean.im.abs() > ROUNDING_TOLERANCE * mean.re {
        return Err(Error::NumericalInstability(format!("quadrature mean {mean} is not a positive real")));
    }
    let entropy = xlogx(lam) + xlogx(1.0 - lam);
    Ok(LogReal::from_log(mean.re.ln() - p.cells() as f64 * entropy))
}

/// Counting route selector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Brute,
    Dp,
    Dft,
    Integral,
    Auto,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Brute => "brute",
            Method::Dp => "dp",
            Method::Dft => "dft",
            Method::Integral => "integral",
            Method::Auto => "auto",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountResult {
    pub count_log: f64,
    /// Decimal string; absent for the quadrature route.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub count_exact: Option<BigCount>,
    pub method: &'static str,
}

/// Run one counting route; `Auto` tries dp, brute, dft, integral in turn and
/// keeps the first that fits the budget.
pub fn count(p: &Params, method: Method, budget: &Budget) -> Result<CountResult> {
    let exact = |c: BigCount, m: Method| CountResult { count_log: c.ln(), count_exact: Some(c), method: m.name() };
    match method {
        Method::Brute => count_bruteforce(p, budget).map(|c| exact(c, Method::Brute)),
        Method::Dp => count_slab_dp(p, budget).map(|c| exact(c, Method::Dp)),
        Method::Dft => count_dft(p, budget).map(|c| exact(c, Method::Dft)),
        Method::Integral => count_reduced_integral(p, budget).map(|l| CountResult {
            count_log: l.ln(),
            count_exact: None,
            method: Method::Integral.name(),
        }),
        Method::Auto => {
            let mut last = None;
            for m in [Method::Dp, Method::Brute, Method::Dft, Method::Integral] {
                match count(p, m, budget) {
                    Ok(c) => return Ok(c),
                    Err(e @ (Error::BudgetExceeded { .. } | Error::UnsupportedArity(_) | Error::Domain(_))) => {
                        last = Some(e)
                    }
                    Err(e) => return Err(e),
                }
            }
            Err(last.unwrap_or_else(|| Error::domain("no counting route applies")))
        }
    }
}

/// `exp` of a log count as an integer, when it is within `tol` (relative) of one.
pub fn nearest_integer(log: f64, tol: f64) -> Option<u64> {
    let v = log.exp();
    let r = v.round();
    ((v - r).abs() <= tol * r.max(1.0)).then(|| r.to_u64()).flatten()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::make_params;

    fn p(r: u32, m: u32, d: u64) -> Params {
        make_params(r, m, d).unwrap()
    }

    /// Independent oracle: scan every subset of cells of the right size.
    fn naive_subset_count(p: &Params) -> u64 {
        let cells = p.cells() as u32;
        assert!(cells <= 24);
        let verts: Vec<Vec<u64>> = (0..p.cells()).map(|c| p.cell_vertices(c)).collect();
        let mut count = 0;
        for mask in 0u32..(1u32 << cells) {
            if u64::from(mask.count_ones()) != p.edges() {
                continue;
            }
            let mut deg = vec![0u64; p.n() as usize];
            for (c, vs) in verts.iter().enumerate() {
                if mask >> c & 1 == 1 {
                    for &v in vs {
                        deg[v as usize] += 1;
                    }
                }
            }
            if deg.iter().all(|&g| g == p.d) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn bruteforce_examples() {
        let b = Budget::default();
        assert_eq!(count_bruteforce(&p(3, 2, 1), &b).unwrap(), 4u64.into());
        assert_eq!(count_bruteforce(&p(3, 2, 2), &b).unwrap(), 8u64.into());
        assert_eq!(count_bruteforce(&p(3, 1, 1), &b).unwrap(), 1u64.into());
        assert_eq!(count_bruteforce(&p(2, 3, 2), &b).unwrap(), 6u64.into());
    }

    #[test]
    fn bruteforce_matches_plain_subset_scan() {
        for (r, m) in [(2, 2), (2, 3), (2, 4), (3, 2), (4, 2)] {
            let per = u64::from(m).pow(r - 1);
            for d in 0..=per {
                let q = p(r, m, d);
                assert_eq!(
                    count_bruteforce(&q, &Budget::default()).unwrap().to_u64().unwrap(),
                    naive_subset_count(&q),
                    "{q:?}"
                );
            }
        }
    }

    #[test]
    fn subsets_by_size_sum_to_power_of_two() {
        // Unconstrained sanity: all k-edge subsets together number 2^(m^r).
        for (r, m) in [(2, 2), (3, 2), (2, 4)] {
            let q = p(r, m, 0);
            let cells = q.cells() as u32;
            let mut by_size = vec![0u64; cells as usize + 1];
            for mask in 0u64..(1u64 << cells) {
                by_size[mask.count_ones() as usize] += 1;
            }
            for (k, &c) in by_size.iter().enumerate() {
                assert_eq!(u128::from(c), binomial_u128(u64::from(cells), k as u64).unwrap());
            }
            assert_eq!(by_size.iter().sum::<u64>(), 1u64 << cells);
        }
    }

    #[test]
    fn bruteforce_refuses_over_budget() {
        let tiny = Budget::uniform(10);
        assert!(matches!(count_bruteforce(&p(3, 2, 2), &tiny), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn slab_dp_examples() {
        let b = Budget::default();
        assert_eq!(count_slab_dp(&p(3, 2, 1), &b).unwrap(), 4u64.into());
        assert_eq!(count_slab_dp(&p(3, 3, 1), &b).unwrap(), 36u64.into());
        assert_eq!(count_slab_dp(&p(3, 3, 2), &b).unwrap(), count_bruteforce(&p(3, 3, 2), &b).unwrap());
        assert!(matches!(count_slab_dp(&p(2, 3, 1), &b), Err(Error::UnsupportedArity(2))));
    }

    #[test]
    fn degree_one_counts_are_latin_like() {
        // d = 1: a perfect matching per extra class, (m!)^(r-1).
        let b = Budget::default();
        for (r, m, expect) in [(3u32, 3u32, 36u64), (2, 4, 24), (4, 2, 8), (3, 4, 576)] {
            let q = p(r, m, 1);
            let c = if r == 3 { count_slab_dp(&q, &b) } else { count_bruteforce(&q, &b) };
            assert_eq!(c.unwrap(), expect.into());
        }
    }

    #[test]
    fn dft_examples() {
        let b = Budget::default();
        assert_eq!(count_dft(&p(3, 2, 2), &b).unwrap(), 8u64.into());
        assert_eq!(count_dft(&p(3, 2, 0), &b).unwrap(), 1u64.into());
        assert_eq!(count_dft(&p(2, 3, 2), &b).unwrap(), 6u64.into());
        assert_eq!(count_dft(&p(3, 2, 4), &b).unwrap(), 1u64.into());
    }

    #[test]
    fn reduced_integral_examples() {
        let b = Budget::default();
        for (q, exact) in [(p(3, 2, 2), 8.0f64), (p(3, 2, 1), 4.0), (p(2, 2, 1), 2.0)] {
            let l = count_reduced_integral(&q, &b).unwrap();
            assert!((l.ln() - exact.ln()).abs() < 1e-6, "{q:?}: {}", l.ln());
        }
        assert!(matches!(count_reduced_integral(&p(3, 2, 0), &b), Err(Error::Domain(_))));
        assert!(matches!(count_reduced_integral(&p(3, 2, 4), &b), Err(Error::Domain(_))));
    }

    #[test]
    fn complement_symmetry_of_counts() {
        let b = Budget::default();
        for q in [p(3, 2, 1), p(2, 4, 1), p(3, 3, 2), p(4, 2, 3)] {
            assert_eq!(
                count(&q, Method::Auto, &b).unwrap().count_exact,
                count(&q.complement(), Method::Auto, &b).unwrap().count_exact
            );
        }
    }

    #[test]
    fn auto_picks_a_route() {
        let c = count(&p(3, 3, 2), Method::Auto, &Budget::default()).unwrap();
        assert_eq!(c.method, "dp");
        let c = count(&p(2, 3, 2), Method::Auto, &Budget::default()).unwrap();
        assert_eq!(c.method, "brute");
        assert_eq!(c.count_exact, Some(6u64.into()));
    }

    #[test]
    fn list_regular_is_sorted_and_complete() {
        let gs = list_regular(&p(3, 2, 2), &Budget::default()).unwrap();
        assert_eq!(gs.len(), 8);
        assert!(gs.iter().all(Hypergraph::is_regular));
        assert!(gs.windows(2).all(|w| w[0].cell_indices() < w[1].cell_indices()));
    }
}
