//! The configuration model: uniform configurations, the simplicity
//! probability, and rejection sampling of uniform regular hypergraphs.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::hypergraph::{Configuration, Hypergraph, MultiHypergraph, Params};
use crate::numeric::{factorial_big, BigCount};
use crate::rng::RngStream;

/// Largest configuration count enumerated exhaustively.
pub const EXHAUSTIVE_LIMIT: u128 = 10_000_000;

/// Monte Carlo samples per deterministic chunk.
pub const MC_CHUNK: u64 = 1024;

/// Uniform configuration: r - 1 independent Fisher-Yates shuffles of [md].
pub fn sample_configuration<R: Rng + ?Sized>(p: &Params, rng: &mut R) -> Configuration {
    let len = p.edges() as u32;
    let perms = (1..p.r)
        .map(|_| {
            let mut v: Vec<u32> = (0..len).collect();
            v.shuffle(rng);
            v
        })
        .collect();
    Configuration::new(*p, perms).expect("shuffles are permutations")
}

/// The multi-hypergraph a configuration provides.
pub fn provides(c: &Configuration) -> MultiHypergraph {
    c.provides()
}

/// Number of configurations providing a given simple d-regular graph,
/// `(d!)^(m r)`.
pub fn count_providing_configurations(g: &Hypergraph) -> Result<BigCount> {
    if !g.is_regular() {
        return Err(Error::domain("hypergraph is not d-regular"));
    }
    let p = g.params();
    Ok(BigCount(factorial_big(p.d).pow(p.m * p.r)))
}

/// `((md)!)^(r-1)`, the number of configurations.
pub fn configuration_count(p: &Params) -> BigUint {
    factorial_big(p.edges()).pow(p.r - 1)
}

/// Cell indices of the spine sets of a configuration given as raw permutations.
fn spine_cells(p: &Params, perms: &[Vec<u32>], out: &mut Vec<u64>) {
    let d = p.d as u32;
    let m = u64::from(p.m);
    out.clear();
    for i in 0..p.edges() as u32 {
        let mut idx = u64::from(i / d);
        for perm in perms {
            idx = idx * m + u64::from(perm[i as usize] / d);
        }
        out.push(idx);
    }
}

/// True when no two spine sets land on the same cell.
pub fn is_simple_perms(p: &Params, perms: &[Vec<u32>], scratch: &mut Vec<u64>) -> bool {
    spine_cells(p, perms, scratch);
    scratch.sort_unstable();
    scratch.windows(2).all(|w| w[0] != w[1])
}

/// Advance to the next permutation in lexicographic order; false after the last.
pub fn next_permutation(v: &mut [u32]) -> bool {
    let n = v.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        v.reverse();
        return false;
    }
    let mut j = n - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// The permutation of [n] with lexicographic rank `k`.
pub fn unrank_permutation(n: usize, mut k: u64) -> Vec<u32> {
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut fact: Vec<u64> = vec![1; n + 1];
    for i in 1..=n {
        fact[i] = fact[i - 1].saturating_mul(i as u64);
    }
    let mut out = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let q = (k / fact[i]) as usize;
        k %= fact[i];
        out.push(pool.remove(q));
    }
    out
}

/// Fold over every configuration in lexicographic order of permutation
/// tuples. The first permutation's index range is split across workers;
/// per-chunk accumulators are merged in chunk order.
pub fn fold_configurations<T, I, F, M>(p: &Params, limit: u128, init: I, fold: F, merge: M) -> Result<T>
where
    T: Send,
    I: Fn() -> T + Sync,
    F: Fn(&mut T, &[Vec<u32>]) + Sync,
    M: Fn(T, T) -> T,
{
    let total = configuration_count(p);
    let needed = total.to_u128().unwrap_or(u128::MAX);
    if needed > limit {
        return Err(Error::BudgetExceeded { what: "configuration enumeration", needed, budget: limit });
    }
    let len = p.edges() as usize;
    let k = p.r as usize - 1;
    let first_count = factorial_big(len as u64).to_u64().expect("within limit");
    const CHUNKS: u64 = 64;
    let per_chunk = first_count.div_ceil(CHUNKS).max(1);
    let chunk_ids: Vec<u64> = (0..first_count.div_ceil(per_chunk)).collect();
    let parts: Vec<T> = chunk_ids
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            let lo = c * per_chunk;
            let hi = (lo + per_chunk).min(first_count);
            let identity: Vec<u32> = (0..len as u32).collect();
            let mut perms = vec![identity.clone(); k];
            perms[0] = unrank_permutation(len, lo);
            for _ in lo..hi {
                for q in perms.iter_mut().skip(1) {
                    q.copy_from_slice(&identity);
                }
                loop {
                    fold(&mut acc, &perms);
                    // odometer over permutations 1..k, last varying fastest
                    let mut t = k;
                    let mut advanced = false;
                    while t > 1 {
                        t -= 1;
                        if next_permutation(&mut perms[t]) {
                            advanced = true;
                            break;
                        }
                    }
                    if !advanced {
                        break;
                    }
                }
                next_permutation(&mut perms[0]);
            }
            acc
        })
        .collect();
    Ok(parts.into_iter().reduce(merge).unwrap_or_else(init))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SimplicityMethod {
    Exhaustive,
    MonteCarlo,
}

fn ser_rational<S: Serializer>(v: &Option<BigRational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match v {
        Some(q) => s.serialize_str(&format!("{}/{}", q.numer(), q.denom())),
        None => s.serialize_none(),
    }
}

/// Estimate of the probability that a uniform configuration is simple.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SimplicityEstimate {
    pub p_hat: f64,
    pub samples: u64,
    pub std_err: f64,
    pub method: SimplicityMethod,
    /// Exact value as `num/den` in exhaustive mode.
    #[serde(serialize_with = "ser_rational", skip_serializing_if = "Option::is_none")]
    pub p_exact: Option<BigRational>,
}

/// Exact simplicity probability by exhaustive enumeration.
pub fn simplicity_exhaustive(p: &Params, limit: u128) -> Result<SimplicityEstimate> {
    let simple: u64 = fold_configurations(
        p,
        limit,
        || (0u64, Vec::new()),
        |acc, perms| {
            if is_simple_perms(p, perms, &mut acc.1) {
                acc.0 += 1;
            }
        },
        |a, b| (a.0 + b.0, a.1),
    )?
    .0;
    let total = configuration_count(p);
    let samples = total.to_u64().expect("within limit");
    let q = BigRational::new(BigInt::from(simple), BigInt::from(total));
    Ok(SimplicityEstimate {
        p_hat: simple as f64 / samples as f64,
        samples,
        std_err: 0.0,
        method: SimplicityMethod::Exhaustive,
        p_exact: Some(q),
    })
}

/// Monte Carlo estimate. Sample `i` of chunk `k` comes from substream `k`,
/// so the result does not depend on the number of workers.
pub fn simplicity_monte_carlo(p: &Params, samples: u64, rng: RngStream) -> SimplicityEstimate {
    let chunks = samples.div_ceil(MC_CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut g = rng.substream(k).rng();
            let n = MC_CHUNK.min(samples - k * MC_CHUNK);
            let mut scratch = Vec::new();
            (0..n)
                .filter(|_| {
                    let c = sample_configuration(p, &mut g);
                    is_simple_perms(p, &c.perms, &mut scratch)
                })
                .count() as u64
        })
        .sum();
    let p_hat = if samples == 0 { 0.0 } else { hits as f64 / samples as f64 };
    SimplicityEstimate {
        p_hat,
        samples,
        std_err: if samples == 0 { 0.0 } else { (p_hat * (1.0 - p_hat) / samples as f64).sqrt() },
        method: SimplicityMethod::MonteCarlo,
        p_exact: None,
    }
}

/// Exhaustive when at most [`EXHAUSTIVE_LIMIT`] configurations, otherwise
/// Monte Carlo with `samples` draws.
pub fn simplicity_probability(p: &Params, samples: u64, rng: RngStream) -> SimplicityEstimate {
    match simplicity_exhaustive(p, EXHAUSTIVE_LIMIT) {
        Ok(e) => e,
        Err(_) => simplicity_monte_carlo(p, samples, rng),
    }
}

/// `((md)!)^(r-1) / (d!)^(m r) * P` as an exact integer.
pub fn h_from_configuration_identity(p: &Params, prob: &BigRational) -> Result<BigCount> {
    let num = BigInt::from(configuration_count(p));
    let den = BigInt::from(factorial_big(p.d).pow(p.m * p.r));
    let h = BigRational::new(num, den) * prob;
    if !h.is_integer() {
        return Err(Error::NonIntegralResult(format!("{}/{} is not an integer", h.numer(), h.denom())));
    }
    let v = h.to_integer();
    if v < BigInt::zero() {
        return Err(Error::domain("probability must be nonnegative"));
    }
    Ok(BigCount(v.to_biguint().expect("nonnegative")))
}

/// Upper bounds on the probability that a configuration is not simple.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CollisionBound {
    /// `m C(d,2) m^(1-r)`.
    pub union_bound: f64,
    /// `((d-1)/(md-1))^(r-1)`, the chance that two spine sets sharing a
    /// class-1 vertex coincide.
    pub per_pair: f64,
}

pub fn sparse_collision_bound(p: &Params) -> CollisionBound {
    let (m, d) = (f64::from(p.m), p.d as f64);
    let union_bound = m * d * (d - 1.0) / 2.0 * m.powi(1 - p.r as i32);
    let md = m * d;
    let per_pair = if p.d < 2 { 0.0 } else { ((d - 1.0) / (md - 1.0)).powi(p.r as i32 - 1) };
    CollisionBound { union_bound: union_bound.max(0.0), per_pair }
}

/// Sample configurations until one is simple. Returns the graph and the
/// number of tries used.
pub fn rejection_sample_regular<R: Rng + ?Sized>(p: &Params, max_tries: u64, rng: &mut R) -> Result<(Hypergraph, u64)> {
    for t in 1..=max_tries {
        let c = sample_configuration(p, rng);
        if let Some(g) = c.provides().to_simple() {
            return Ok((g, t));
        }
    }
    Err(Error::RetriesExhausted(max_tries))
}

/// `count` independent rejection samples; sample `i` uses substream `i`.
pub fn rejection_samples(p: &Params, count: u64, max_tries: u64, rng: RngStream) -> Result<Vec<(Hypergraph, u64)>> {
    (0..count).into_par_iter().map(|i| rejection_sample_regular(p, max_tries, &mut rng.substream(i).rng())).collect()
}

/// Lowest-terms `num/den` of an exact probability.
pub fn rational_parts(q: &BigRational) -> (BigInt, BigInt) {
    let g = q.numer().gcd(q.denom());
    if g.is_one() || g.is_zero() {
        (q.numer().clone(), q.denom().clone())
    } else {
        (q.numer() / &g, q.denom() / &g)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{list_regular, Budget};
    use crate::hypergraph::{make_multigraph_params, make_params, Edge};
    use std::collections::HashMap;

    fn p(r: u32, m: u32, d: u64) -> Params {
        make_params(r, m, d).unwrap()
    }

    fn q(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn sampling_is_deterministic() {
        let a = sample_configuration(&p(3, 2, 1), &mut RngStream::new(42, 0).rng());
        let b = sample_configuration(&p(3, 2, 1), &mut RngStream::new(42, 0).rng());
        assert_eq!(a, b);
        let e = sample_configuration(&p(3, 4, 0), &mut RngStream::new(1, 0).rng());
        assert!(e.is_empty());
    }

    #[test]
    fn sampled_configurations_are_uniform() {
        let q = p(3, 2, 1);
        let mut g = RngStream::new(7, 0).rng();
        let n = 100_000;
        let mut freq: HashMap<Vec<Vec<u32>>, u64> = HashMap::new();
        for _ in 0..n {
            *freq.entry(sample_configuration(&q, &mut g).perms).or_insert(0) += 1;
        }
        assert_eq!(freq.len(), 4);
        let sigma = (0.25f64 * 0.75 / n as f64).sqrt();
        for &c in freq.values() {
            assert!((c as f64 / n as f64 - 0.25).abs() <= 3.0 * sigma, "{c}");
        }
    }

    #[test]
    fn provides_examples() {
        let q = p(3, 2, 1);
        let swap = Configuration::new(q, vec![vec![1, 0], vec![0, 1]]).unwrap();
        let g = provides(&swap).to_simple().unwrap();
        assert_eq!(g.edges(), &[Edge::new(vec![0, 1, 0]), Edge::new(vec![1, 0, 1])]);
        let forced = sample_configuration(&make_multigraph_params(3, 1, 2).unwrap(), &mut RngStream::new(3, 0).rng());
        let mh = provides(&forced);
        assert!(!mh.is_simple());
        assert_eq!(mh.edge_mult.values().copied().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn providing_configuration_counts() {
        for g in list_regular(&p(3, 2, 1), &Budget::default()).unwrap() {
            assert_eq!(count_providing_configurations(&g).unwrap(), 1u64.into());
        }
        let graphs = list_regular(&p(3, 2, 2), &Budget::default()).unwrap();
        assert_eq!(count_providing_configurations(&graphs[0]).unwrap(), 64u64.into());
        let bip = list_regular(&p(2, 3, 2), &Budget::default()).unwrap();
        assert_eq!(count_providing_configurations(&bip[0]).unwrap(), 64u64.into());
        let irregular = Hypergraph::from_cells(p(3, 2, 2), &[0]);
        assert!(count_providing_configurations(&irregular).is_err());
    }

    #[test]
    fn providing_count_matches_exhaustive_preimages() {
        let q = p(3, 2, 2);
        let preimages = fold_configurations(
            &q,
            EXHAUSTIVE_LIMIT,
            HashMap::<Vec<u64>, u64>::new,
            |acc, perms| {
                let c = Configuration::new(q, perms.to_vec()).unwrap();
                if let Some(g) = c.provides().to_simple() {
                    *acc.entry(g.cell_indices()).or_insert(0) += 1;
                }
            },
            |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            },
        )
        .unwrap();
        assert_eq!(preimages.len(), 8);
        assert!(preimages.values().all(|&v| v == 64));
    }

    #[test]
    fn enumeration_visits_every_configuration_once() {
        let q = p(3, 2, 2);
        let (n, distinct) = fold_configurations(
            &q,
            EXHAUSTIVE_LIMIT,
            || (0u64, std::collections::HashSet::new()),
            |acc, perms| {
                acc.0 += 1;
                acc.1.insert(perms.to_vec());
            },
            |mut a, b| {
                a.0 += b.0;
                a.1.extend(b.1);
                a
            },
        )
        .unwrap();
        assert_eq!(n, 576);
        assert_eq!(distinct.len(), 576);
        assert!(fold_configurations(&p(3, 3, 3), EXHAUSTIVE_LIMIT, || (), |_, _| (), |a, _| a).is_err());
    }

    #[test]
    fn simplicity_examples() {
        let e = simplicity_probability(&p(3, 2, 1), 0, RngStream::new(0, 0));
        assert_eq!(e.method, SimplicityMethod::Exhaustive);
        assert_eq!(e.p_exact, Some(q(1, 1)));
        let e = simplicity_probability(&p(3, 2, 2), 0, RngStream::new(0, 0));
        assert_eq!(e.p_exact, Some(q(8, 9)));
        assert_eq!(e.std_err, 0.0);
        assert_eq!(e.samples, 576);
    }

    #[test]
    fn monte_carlo_is_seeded_and_banded() {
        let q3 = p(3, 2, 2);
        let a = simplicity_monte_carlo(&q3, 20_000, RngStream::new(5, 1));
        let b = simplicity_monte_carlo(&q3, 20_000, RngStream::new(5, 1));
        assert_eq!(a, b);
        assert!((a.p_hat - 8.0 / 9.0).abs() <= 3.0 * a.std_err);
        assert!((a.std_err - (a.p_hat * (1.0 - a.p_hat) / 20_000.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn identity_reproduces_counts() {
        assert_eq!(h_from_configuration_identity(&p(3, 2, 2), &q(8, 9)).unwrap(), 8u64.into());
        assert_eq!(h_from_configuration_identity(&p(3, 2, 1), &q(1, 1)).unwrap(), 4u64.into());
        assert!(matches!(h_from_configuration_identity(&p(3, 2, 2), &q(1, 2)), Err(Error::NonIntegralResult(_))));
    }

    #[test]
    fn collision_bound_examples() {
        let b = sparse_collision_bound(&p(3, 2, 2));
        assert!((b.union_bound - 0.5).abs() < 1e-15);
        assert!(b.union_bound >= 1.0 / 9.0);
        let b = sparse_collision_bound(&p(4, 5, 1));
        assert_eq!(b.union_bound, 0.0);
        assert_eq!(b.per_pair, 0.0);
        let q4 = p(4, 10, 3);
        let b = sparse_collision_bound(&q4);
        assert!((b.union_bound - 0.03).abs() < 1e-15);
        let mc = simplicity_monte_carlo(&q4, 20_000, RngStream::new(11, 0));
        assert!(1.0 - mc.p_hat <= 0.03 + 3.0 * mc.std_err);
    }

    #[test]
    fn rejection_sampler_examples() {
        let q1 = p(3, 2, 1);
        let mut g = RngStream::new(9, 0).rng();
        for _ in 0..100 {
            assert_eq!(rejection_sample_regular(&q1, 1, &mut g).unwrap().1, 1);
        }
        let q2 = p(3, 2, 2);
        let trials = 10_000u64;
        let mut accepted = 0u64;
        for _ in 0..trials {
            if rejection_sample_regular(&q2, 1, &mut g).is_ok() {
                accepted += 1;
            }
        }
        let pr = 8.0 / 9.0;
        let sigma = (pr * (1.0 - pr) / trials as f64).sqrt();
        assert!((accepted as f64 / trials as f64 - pr).abs() <= 3.0 * sigma);
        assert!(matches!(
            rejection_sample_regular(&make_multigraph_params(3, 1, 2).unwrap(), 5, &mut g),
            Err(Error::RetriesExhausted(5))
        ));
    }

    #[test]
    fn rejection_samples_are_regular_and_reproducible() {
        let q2 = p(3, 2, 2);
        let a = rejection_samples(&q2, 50, 100, RngStream::new(1, 2)).unwrap();
        let b = rejection_samples(&q2, 50, 100, RngStream::new(1, 2)).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|(g, _)| g.is_regular()));
    }

    #[test]
    fn permutation_helpers() {
        let mut v = vec![0, 1, 2];
        let mut all = vec![v.clone()];
        while next_permutation(&mut v) {
            all.push(v.clone());
        }
        assert_eq!(all.len(), 6);
        for (k, perm) in all.iter().enumerate() {
            assert_eq!(&unrank_permutation(3, k as u64), perm);
        }
        assert_eq!(rational_parts(&q(2, 4)), (1.into(), 2.into()));
    }
}
