//! Switchings between configurations with `l` and `l - 1` double edges
//! (r = 3), their exhaustive censuses, and the summation bounds used to turn
//! switching ratios into a simplicity probability.
//!
//! Spine roles: `a[0] = a`, `a[j] = a_j` for `j = 1..6`, likewise `b`, `c`.
//! In a forward switching the seven spine sets
//! `{a,b,c} {a1,b5,c3} {a2,b4,c6} {a3,b1,c5} {a4,b6,c2} {a5,b3,c1} {a6,b2,c4}`
//! are replaced by
//! `{a,b2,c1} {a1,b,c2} {a2,b1,c} {a3,b3,c3} {a4,b4,c4} {a5,b5,c5} {a6,b6,c6}`;
//! a reverse switching undoes this.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::configmodel::fold_configurations;
use crate::error::{Error, Result};
use crate::hypergraph::{Configuration, Edge, Params};
use crate::numeric::BigCount;

/// Class-2 and class-3 role of the spines in the six non-central sets of
/// the double-edge side: set `k` is `{a_k, b_{B_ROLE[k]}, c_{C_ROLE[k]}}`.
pub const B_ROLE: [usize; 7] = [0, 5, 4, 1, 6, 3, 2];
pub const C_ROLE: [usize; 7] = [0, 3, 6, 5, 2, 1, 4];

/// The three spine sets of the single-edge side that meet `a`, `b`, `c`:
/// `{a,b2,c1} {a1,b,c2} {a2,b1,c}` as role triples.
const CROSS: [(usize, usize, usize); 3] = [(0, 2, 1), (1, 0, 2), (2, 1, 0)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Forward,
    Reverse,
}

/// The 21 spines of one switching, 0-based spine indices within each class.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SwitchingSites {
    pub direction: Direction,
    pub a: [u32; 7],
    pub b: [u32; 7],
    pub c: [u32; 7],
}

impl SwitchingSites {
    /// Spine sets of the double-edge side, `{a,b,c}` first.
    pub fn double_side(&self) -> [[u32; 3]; 7] {
        std::array::from_fn(|k| [self.a[k], self.b[B_ROLE[k]], self.c[C_ROLE[k]]])
    }

    /// Spine sets of the single-edge side, the three cross sets first.
    pub fn single_side(&self) -> [[u32; 3]; 7] {
        std::array::from_fn(|k| {
            if k < 3 {
                let (x, y, z) = CROSS[k];
                [self.a[x], self.b[y], self.c[z]]
            } else {
                [self.a[k], self.b[k], self.c[k]]
            }
        })
    }

    pub fn reversed(&self) -> SwitchingSites {
        SwitchingSites {
            direction: match self.direction {
                Direction::Forward => Direction::Reverse,
                Direction::Reverse => Direction::Forward,
            },
            ..*self
        }
    }
}

/// Numbers of distinct edges by multiplicity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MultiplicityProfile {
    pub simple: u64,
    pub double: u64,
    pub triple_or_more: u64,
}

impl MultiplicityProfile {
    /// `Some(l)` when the configuration lies in T(l).
    pub fn t_class(&self) -> Option<u64> {
        (self.triple_or_more == 0).then_some(self.double)
    }
}

pub fn multiplicity_profile(c: &Configuration) -> MultiplicityProfile {
    let mut prof = MultiplicityProfile { simple: 0, double: 0, triple_or_more: 0 };
    for &k in c.provides().edge_mult.values() {
        match k {
            1 => prof.simple += 1,
            2 => prof.double += 1,
            _ => prof.triple_or_more += 1,
        }
    }
    prof
}

/// `floor(8 d^2 / m + ln m)`.
pub fn m_cap(p: &Params) -> u64 {
    let d = p.d as f64;
    let m = f64::from(p.m);
    (8.0 * d * d / m + m.ln()).floor() as u64
}

/// Error scale `(l + d) / (m d)` of the switching claims.
pub fn eps_ell(p: &Params, ell: u64) -> f64 {
    (ell + p.d) as f64 / p.edges() as f64
}

/// Leading term `2 l m^6 d^6` of the forward count.
pub fn forward_leading(p: &Params, ell: u64) -> f64 {
    2.0 * ell as f64 * (f64::from(p.m) * p.d as f64).powi(6)
}

/// Leading term `m^5 d^5 (d-1)^3` of the reverse count.
pub fn reverse_leading(p: &Params) -> f64 {
    let d = p.d as f64;
    (f64::from(p.m) * d).powi(5) * (d - 1.0).powi(3)
}

/// Predicted `|T(l)| / |T(l-1)| = (d-1)^3 / (2 l d m)`.
pub fn predicted_ratio(p: &Params, ell: u64) -> f64 {
    let d = p.d as f64;
    (d - 1.0).powi(3) / (2.0 * ell as f64 * d * f64::from(p.m))
}

fn require_r3(p: &Params) -> Result<()> {
    if p.r != 3 {
        Err(Error::UnsupportedArity(p.r))
    } else {
        Ok(())
    }
}

/// Largest `m` handled by the dense multiplicity table.
pub const MAX_SWITCHING_M: u32 = 256;

/// Fast view of an r = 3 configuration for the enumerators.
struct View<'a> {
    d: u32,
    m: u64,
    s2: &'a [u32],
    s3: &'a [u32],
    inv2: Vec<u32>,
    inv3: Vec<u32>,
    mult: Vec<u8>,
}

impl<'a> View<'a> {
    fn new(c: &'a Configuration) -> Result<Self> {
        require_r3(&c.params)?;
        if c.params.m > MAX_SWITCHING_M {
            return Err(Error::domain(format!("switching enumeration needs m <= {MAX_SWITCHING_M}")));
        }
        let p = c.params;
        let len = c.len();
        let (s2, s3) = (&c.perms[0][..], &c.perms[1][..]);
        let mut inv2 = vec![0u32; len];
        let mut inv3 = vec![0u32; len];
        for i in 0..len {
            inv2[s2[i] as usize] = i as u32;
            inv3[s3[i] as usize] = i as u32;
        }
        let mut v = View { d: p.d as u32, m: u64::from(p.m), s2, s3, inv2, inv3, mult: vec![0; p.cells() as usize] };
        for i in 0..len as u32 {
            let cell = v.set_cell(i) as usize;
            v.mult[cell] = v.mult[cell].saturating_add(1);
        }
        if v.mult.iter().any(|&k| k > 2) {
            return Err(Error::domain("configuration has an edge of multiplicity 3 or more"));
        }
        Ok(v)
    }

    fn cell(&self, a: u32, b: u32, c: u32) -> u64 {
        let d = self.d;
        (u64::from(a / d) * self.m + u64::from(b / d)) * self.m + u64::from(c / d)
    }

    fn set_cell(&self, i: u32) -> u64 {
        self.cell(i, self.s2[i as usize], self.s3[i as usize])
    }

    fn mult_of(&self, a: u32, b: u32, c: u32) -> u8 {
        self.mult[self.cell(a, b, c) as usize]
    }

    fn len(&self) -> u32 {
        self.s2.len() as u32
    }
}

/// Vertices seen so far for each role of one class; roles 0, 1, 2 may share
/// a vertex with each other, every other pair must differ.
#[derive(Clone, Copy)]
struct RoleVertices([Option<u32>; 7]);

impl RoleVertices {
    fn fits(&self, role: usize, v: u32) -> bool {
        self.0.iter().enumerate().all(|(k, w)| match w {
            Some(w) if k != role => (role < 3 && k < 3) || *w != v,
            _ => true,
        })
    }
}

/// Visit every forward switching available in `c`.
pub fn for_each_forward(c: &Configuration, mut visit: impl FnMut(&SwitchingSites)) -> Result<()> {
    let v = View::new(c)?;
    let d = v.d;
    let len = v.len();
    let mut picks = [0u32; 7];
    let empty = RoleVertices([None; 7]);

    #[allow(clippy::too_many_arguments)]
    fn pick_rest(
        v: &View,
        k: usize,
        picks: &mut [u32; 7],
        rv: [RoleVertices; 3],
        len: u32,
        d: u32,
        visit: &mut dyn FnMut(&SwitchingSites),
    ) {
        if k == 7 {
            let s = SwitchingSites {
                direction: Direction::Forward,
                a: std::array::from_fn(|j| picks[j]),
                b: std::array::from_fn(|j| {
                    let k = B_ROLE.iter().position(|&x| x == j).unwrap();
                    v.s2[picks[k] as usize]
                }),
                c: std::array::from_fn(|j| {
                    let k = C_ROLE.iter().position(|&x| x == j).unwrap();
                    v.s3[picks[k] as usize]
                }),
            };
            // none of the new sets may be parallel to an existing edge
            let fresh = s.single_side().iter().all(|t| v.mult_of(t[0], t[1], t[2]) == 0);
            let cross: [u64; 3] = std::array::from_fn(|q| {
                let (x, y, z) = CROSS[q];
                v.cell(s.a[x], s.b[y], s.c[z])
            });
            if fresh && cross[0] != cross[1] && cross[0] != cross[2] && cross[1] != cross[2] {
                visit(&s);
            }
            return;
        }
        for i in 0..len {
            if picks[..k].contains(&i) || v.mult[v.set_cell(i) as usize] != 1 {
                continue;
            }
            let (va, vb, vc) = (i / d, v.s2[i as usize] / d, v.s3[i as usize] / d);
            if !(rv[0].fits(k, va) && rv[1].fits(B_ROLE[k], vb) && rv[2].fits(C_ROLE[k], vc)) {
                continue;
            }
            let mut next = rv;
            next[0].0[k] = Some(va);
            next[1].0[B_ROLE[k]] = Some(vb);
            next[2].0[C_ROLE[k]] = Some(vc);
            picks[k] = i;
            pick_rest(v, k + 1, picks, next, len, d, visit);
        }
    }

    for a in 0..len {
        if v.mult[v.set_cell(a) as usize] != 2 {
            continue;
        }
        picks[0] = a;
        let mut rv = [empty; 3];
        rv[0].0[0] = Some(a / d);
        rv[1].0[0] = Some(v.s2[a as usize] / d);
        rv[2].0[0] = Some(v.s3[a as usize] / d);
        pick_rest(&v, 1, &mut picks, rv, len, d, &mut visit);
    }
    Ok(())
}

/// Visit every reverse switching available in `c`.
pub fn for_each_reverse(c: &Configuration, mut visit: impl FnMut(&SwitchingSites)) -> Result<()> {
    let v = View::new(c)?;
    let d = v.d;
    let len = v.len();
    for x in 0..len {
        if v.mult[v.set_cell(x) as usize] != 1 {
            continue;
        }
        let (xa, xb, xc) = (x / d, v.s2[x as usize] / d, v.s3[x as usize] / d);
        for a in xa * d..(xa + 1) * d {
            let ia = a;
            if ia == x || v.mult[v.set_cell(ia) as usize] != 1 {
                continue;
            }
            for b in xb * d..(xb + 1) * d {
                let ib = v.inv2[b as usize];
                if ib == x || ib == ia || v.mult[v.set_cell(ib) as usize] != 1 {
                    continue;
                }
                for c3 in xc * d..(xc + 1) * d {
                    let ic = v.inv3[c3 as usize];
                    if ic == x || ic == ia || ic == ib || v.mult[v.set_cell(ic) as usize] != 1 {
                        continue;
                    }
                    let mut s = SwitchingSites { direction: Direction::Reverse, a: [0; 7], b: [0; 7], c: [0; 7] };
                    s.a[0] = a;
                    s.b[2] = v.s2[ia as usize];
                    s.c[1] = v.s3[ia as usize];
                    s.a[1] = ib;
                    s.b[0] = b;
                    s.c[2] = v.s3[ib as usize];
                    s.a[2] = ic;
                    s.b[1] = v.s2[ic as usize];
                    s.c[0] = c3;
                    let mut rv = [RoleVertices([None; 7]); 3];
                    for j in 0..3 {
                        rv[0].0[j] = Some(s.a[j] / d);
                        rv[1].0[j] = Some(s.b[j] / d);
                        rv[2].0[j] = Some(s.c[j] / d);
                    }
                    pick_parallel(&v, 3, &mut s, rv, [ia, ib, ic], len, &mut visit);
                }
            }
        }
    }
    Ok(())
}

fn pick_parallel(
    v: &View,
    j: usize,
    s: &mut SwitchingSites,
    rv: [RoleVertices; 3],
    used: [u32; 3],
    len: u32,
    visit: &mut dyn FnMut(&SwitchingSites),
) {
    let d = v.d;
    if j == 7 {
        // the restored sets must not be parallel to an existing edge
        let clear = s.double_side()[1..].iter().all(|t| v.mult_of(t[0], t[1], t[2]) == 0);
        if clear {
            visit(s);
        }
        return;
    }
    for i in 0..len {
        if used.contains(&i) || s.a[3..j].contains(&i) || v.mult[v.set_cell(i) as usize] != 1 {
            continue;
        }
        let (b, c) = (v.s2[i as usize], v.s3[i as usize]);
        if !(rv[0].fits(j, i / d) && rv[1].fits(j, b / d) && rv[2].fits(j, c / d)) {
            continue;
        }
        let mut next = rv;
        next[0].0[j] = Some(i / d);
        next[1].0[j] = Some(b / d);
        next[2].0[j] = Some(c / d);
        s.a[j] = i;
        s.b[j] = b;
        s.c[j] = c;
        pick_parallel(v, j + 1, s, next, used, len, visit);
    }
}

pub fn enumerate_forward_switchings(c: &Configuration) -> Result<Vec<SwitchingSites>> {
    let mut out = Vec::new();
    for_each_forward(c, |s| out.push(*s))?;
    Ok(out)
}

pub fn enumerate_reverse_switchings(c: &Configuration) -> Result<Vec<SwitchingSites>> {
    let mut out = Vec::new();
    for_each_reverse(c, |s| out.push(*s))?;
    Ok(out)
}

pub fn count_forward_switchings(c: &Configuration) -> Result<u64> {
    let mut n = 0;
    for_each_forward(c, |_| n += 1)?;
    Ok(n)
}

pub fn count_reverse_switchings(c: &Configuration) -> Result<u64> {
    let mut n = 0;
    for_each_reverse(c, |_| n += 1)?;
    Ok(n)
}

/// Vertex tuple multiplicities of a configuration, from its provided multigraph.
pub fn edge_multiplicities(c: &Configuration) -> BTreeMap<Edge, u32> {
    c.provides().edge_mult
}

/// Independent validity check of `s` against `c` in the direction of `s`.
pub fn check_switching(c: &Configuration, s: &SwitchingSites) -> Result<()> {
    check_switching_with(c, &edge_multiplicities(c), s)
}

/// [`check_switching`] with precomputed multiplicities.
pub fn check_switching_with(c: &Configuration, mult: &BTreeMap<Edge, u32>, s: &SwitchingSites) -> Result<()> {
    require_r3(&c.params)?;
    let fail = |why: &str| Err(Error::InvalidSwitching(why.to_string()));
    let md = c.len() as u32;
    let (s2, s3) = (&c.perms[0], &c.perms[1]);
    for class in [&s.a, &s.b, &s.c] {
        if class.iter().any(|&x| x >= md) {
            return fail("spine out of range");
        }
        for i in 0..7 {
            if class[i + 1..].contains(&class[i]) {
                return fail("spines are not distinct");
            }
        }
    }
    if mult.values().any(|&k| k > 2) {
        return fail("configuration has an edge of multiplicity 3 or more");
    }
    let vx = |x: u32| c.spine_vertex(x);
    for class in [&s.a, &s.b, &s.c] {
        for i in 0..7 {
            for j in i + 1..7 {
                if !(i < 3 && j < 3) && vx(class[i]) == vx(class[j]) {
                    return fail("spines share a vertex outside the allowed coincidences");
                }
            }
        }
    }
    let is_set = |t: &[u32; 3]| s2[t[0] as usize] == t[1] && s3[t[0] as usize] == t[2];
    let m_of = |t: &[u32; 3]| {
        let e = Edge(vec![vx(t[0]), vx(t[1]), vx(t[2])]);
        mult.get(&e).copied().unwrap_or(0)
    };
    let double = s.double_side();
    let single = s.single_side();
    match s.direction {
        Direction::Forward => {
            if !double.iter().all(is_set) {
                return fail("the double-edge side is not present");
            }
            if m_of(&double[0]) != 2 {
                return fail("{a,b,c} is not half of a double edge");
            }
            if !double[1..].iter().all(|t| m_of(t) == 1) {
                return fail("an outer set is not a simple edge");
            }
            if !single.iter().all(|t| m_of(t) == 0) {
                return fail("a new set is parallel to an existing edge");
            }
            let tuples: Vec<Vec<u32>> = single[..3].iter().map(|t| t.iter().map(|&x| vx(x)).collect()).collect();
            if tuples[0] == tuples[1] || tuples[0] == tuples[2] || tuples[1] == tuples[2] {
                return fail("two cross sets are parallel");
            }
        }
        Direction::Reverse => {
            if !single.iter().all(is_set) {
                return fail("the single-edge side is not present");
            }
            if !single.iter().all(|t| m_of(t) == 1) {
                return fail("a set of the single-edge side is not simple");
            }
            if m_of(&double[0]) != 1 {
                return fail("{a,b,c} is not parallel to a simple edge");
            }
            let abc: Vec<u32> = double[0].iter().map(|&x| vx(x)).collect();
            if single.iter().any(|t| t.iter().map(|&x| vx(x)).collect::<Vec<_>>() == abc) {
                return fail("the edge parallel to {a,b,c} is one of the switched sets");
            }
            if !double[1..].iter().all(|t| m_of(t) == 0) {
                return fail("a restored set is parallel to an existing edge");
            }
        }
    }
    Ok(())
}

/// Perform a validated switching. The sites, with direction flipped, are a
/// valid switching of the result that leads back.
pub fn apply_switching(c: &Configuration, s: &SwitchingSites) -> Result<Configuration> {
    check_switching(c, s)?;
    let mut perms = c.perms.clone();
    let target = match s.direction {
        Direction::Forward => s.single_side(),
        Direction::Reverse => s.double_side(),
    };
    for t in target {
        perms[0][t[0] as usize] = t[1];
        perms[1][t[0] as usize] = t[2];
    }
    Configuration::new(c.params, perms)
}

/// Exhaustive sizes of the classes T(l), plus configurations with a triple edge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TClassCensus {
    pub t: Vec<BigCount>,
    pub triple_or_more: BigCount,
    pub total: BigCount,
}

/// Census of T(l) over all configurations.
pub fn t_class_census(p: &Params, limit: u128) -> Result<TClassCensus> {
    require_r3(p)?;
    let (t, triples) = fold_configurations(
        p,
        limit,
        || (Vec::<u64>::new(), 0u64),
        |acc, perms| {
            let c = Configuration { params: *p, perms: perms.to_vec() };
            match multiplicity_profile(&c).t_class() {
                Some(l) => {
                    let l = l as usize;
                    if acc.0.len() <= l {
                        acc.0.resize(l + 1, 0);
                    }
                    acc.0[l] += 1;
                }
                None => acc.1 += 1,
            }
        },
        merge_counts,
    )?;
    let total: u64 = t.iter().sum::<u64>() + triples;
    Ok(TClassCensus {
        t: t.into_iter().map(BigCount::from_u64).collect(),
        triple_or_more: BigCount::from_u64(triples),
        total: BigCount::from_u64(total),
    })
}

fn merge_counts(mut a: (Vec<u64>, u64), b: (Vec<u64>, u64)) -> (Vec<u64>, u64) {
    if a.0.len() < b.0.len() {
        a.0.resize(b.0.len(), 0);
    }
    for (x, y) in a.0.iter_mut().zip(&b.0) {
        *x += y;
    }
    (a.0, a.1 + b.1)
}

/// `(sum over T(l) of forward counts, sum over T(l-1) of reverse counts)`.
pub fn double_counting_check(p: &Params, ell: u64, limit: u128) -> Result<(BigCount, BigCount)> {
    let rows = switch_census(p, ell.max(1), limit)?;
    if ell == 0 {
        return Ok((BigCount::zero(), BigCount::zero()));
    }
    let row = &rows[ell as usize - 1];
    Ok((row.fwd_total.clone(), row.rev_total.clone()))
}

/// One row of the switching census.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CensusRow {
    pub ell: u64,
    pub t_ell: BigCount,
    pub t_prev: BigCount,
    /// Forward switchings summed over T(l).
    pub fwd_total: BigCount,
    /// Reverse switchings summed over T(l-1).
    pub rev_total: BigCount,
    /// `|T(l)| / |T(l-1)|`, absent when T(l-1) is empty.
    pub ratio: Option<f64>,
    pub predicted_ratio: f64,
}

/// Exhaustive switching census for `l = 1..=lmax`.
pub fn switch_census(p: &Params, lmax: u64, limit: u128) -> Result<Vec<CensusRow>> {
    require_r3(p)?;
    let lmax_us = lmax as usize;
    let zero = || (vec![0u64; lmax_us + 1], vec![0u64; lmax_us + 1], vec![0u64; lmax_us + 2]);
    let (t, fwd, rev) = fold_configurations(
        p,
        limit,
        zero,
        |acc, perms| {
            let c = Configuration { params: *p, perms: perms.to_vec() };
            if let Some(l) = multiplicity_profile(&c).t_class() {
                let l = l as usize;
                if l <= lmax_us {
                    acc.0[l] += 1;
                    if l >= 1 {
                        acc.1[l] += count_forward_switchings(&c).expect("no triples in T(l)");
                    }
                }
                if l < lmax_us {
                    acc.2[l + 1] += count_reverse_switchings(&c).expect("no triples in T(l)");
                }
            }
        },
        |mut a, b| {
            for (x, y) in [(&mut a.0, &b.0), (&mut a.1, &b.1), (&mut a.2, &b.2)] {
                for (u, v) in x.iter_mut().zip(y) {
                    *u += v;
                }
            }
            a
        },
    )?;
    Ok((1..=lmax)
        .map(|l| {
            let li = l as usize;
            CensusRow {
                ell: l,
                t_ell: BigCount::from_u64(t[li]),
                t_prev: BigCount::from_u64(t[li - 1]),
                fwd_total: BigCount::from_u64(fwd[li]),
                rev_total: BigCount::from_u64(rev[li]),
                ratio: (t[li - 1] > 0).then(|| t[li] as f64 / t[li - 1] as f64),
                predicted_ratio: predicted_ratio(p, l),
            }
        })
        .collect())
}

/// Inputs of the summation lemma.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumLemmaInput {
    pub big_m: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c_hat: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SumLemmaBounds {
    pub lower: f64,
    pub upper: f64,
    pub partial_sum: f64,
}

/// Bounds on `sum_{i=0}^{M} n_i` with `n_0 = 1`,
/// `n_i = n_{i-1} A(i) (1 - (i-1) B(i)) / i`.
pub fn sum_lemma_bounds(input: &SumLemmaInput) -> Result<SumLemmaBounds> {
    let bad = |why: String| Err(Error::HypothesisViolated(why));
    let mm = input.big_m;
    if mm < 2 {
        return bad(format!("M = {mm} must be at least 2"));
    }
    if input.a.len() != mm || input.b.len() != mm {
        return bad("A and B must have exactly M entries".into());
    }
    let c_hat = input.c_hat;
    if !(c_hat > 0.0 && c_hat < 1.0 / 3.0) {
        return bad(format!("c_hat = {c_hat} must lie in (0, 1/3)"));
    }
    for i in 1..=mm {
        let (a, b) = (input.a[i - 1], input.b[i - 1]);
        if a.is_nan() || a < 0.0 {
            return bad(format!("A({i}) = {a} is negative"));
        }
        let slack = 1.0 - (i as f64 - 1.0) * b;
        if slack.is_nan() || slack < 0.0 {
            return bad(format!("1 - (i-1) B({i}) is negative"));
        }
    }
    let fold = |f: fn(f64, f64) -> f64, xs: &mut dyn Iterator<Item = f64>| xs.reduce(f).expect("M >= 2");
    let a1 = fold(f64::min, &mut input.a.iter().copied());
    let a2 = fold(f64::max, &mut input.a.iter().copied());
    let ab = || input.a.iter().zip(&input.b).map(|(a, b)| a * b);
    let c1 = fold(f64::min, &mut ab());
    let c2 = fold(f64::max, &mut ab());
    // A/M and |C| are maximized at the rectangle's corners.
    if a2 / mm as f64 > c_hat {
        return bad(format!("A_2 / M = {} exceeds c_hat", a2 / mm as f64));
    }
    if c1.abs().max(c2.abs()) > c_hat {
        return bad(format!("max |C| = {} exceeds c_hat", c1.abs().max(c2.abs())));
    }
    let mut n = 1.0;
    let mut sum = 1.0;
    for i in 1..=mm {
        let fi = i as f64;
        n = n / fi * input.a[i - 1] * (1.0 - (fi - 1.0) * input.b[i - 1]);
        sum += n;
    }
    let tail = (2.0 * std::f64::consts::E * c_hat).powi(mm as i32);
    let lower = (a1 - 0.5 * a1 * c2).exp() - tail;
    let upper = (a2 - 0.5 * a2 * c1 + 0.5 * a2 * c1 * c1).exp() + tail;
    if !(lower <= sum && sum <= upper) {
        return Err(Error::check(format!("bounds [{lower}, {upper}] miss the partial sum {sum}")));
    }
    Ok(SumLemmaBounds { lower, upper, partial_sum: sum })
}

/// Lemma inputs for the switching ratios at an r = 3 instance:
/// `A(i) = (d-1)^3 / (2 d m)`, `B(i) = 1 / (m d)`, `M = m_cap`, and the
/// smallest `c_hat` of the form `k / 1000` that satisfies the hypothesis.
pub fn switching_sum_input(p: &Params) -> Result<SumLemmaInput> {
    require_r3(p)?;
    let mm = m_cap(p) as usize;
    let a = (p.d as f64 - 1.0).powi(3) / (2.0 * p.d as f64 * f64::from(p.m));
    let b = 1.0 / p.edges() as f64;
    let need = (a / mm as f64).max(a * b);
    let c_hat = ((need * 1000.0).ceil().max(1.0)) / 1000.0;
    Ok(SumLemmaInput { big_m: mm, a: vec![a; mm], b: vec![b; mm], c_hat })
}

/// A random input satisfying the lemma's hypotheses: `2 <= M < 40`,
/// `c_hat` in `(0, 1/3)`, `0 <= A(i) <= c_hat M`, `|A(i) B(i)| <= c_hat` and
/// `(i-1) B(i) <= 1`.
pub fn random_sum_lemma_input<R: rand::Rng + ?Sized>(rng: &mut R) -> SumLemmaInput {
    let mm = rng.gen_range(2usize..40);
    let c_hat = rng.gen_range(0.001f64..0.333);
    let a: Vec<f64> = (0..mm).map(|_| rng.gen::<f64>() * c_hat * mm as f64).collect();
    let b: Vec<f64> = (0..mm)
        .map(|i| {
            // 0-based i: the constraint is i B <= 1
            let cap = if i == 0 { 1.0 } else { 1.0 / i as f64 };
            (rng.gen::<f64>() * 2.0 - 1.0) * a[i].recip().min(cap) * c_hat
        })
        .collect();
    SumLemmaInput { big_m: mm, a, b, c_hat }
}

/// The sparse law `exp(-d^2 / 2m)` for the simplicity probability at r = 3.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct P3Formula {
    pub value: f64,
    /// `2 <= d` and `d^2 <= m`, the regime where `d = o(m)` is plausible.
    pub in_regime: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

pub fn p3_sparse_formula(p: &Params) -> Result<P3Formula> {
    require_r3(p)?;
    let d = p.d as f64;
    let m = f64::from(p.m);
    let in_regime = p.d >= 2 && d * d <= m;
    Ok(P3Formula {
        value: (-d * d / (2.0 * m)).exp(),
        in_regime,
        warning: (!in_regime).then(|| "outside the regime 2 <= d = o(m)".to_string()),
    })
}

/// `|T(l)|` as a big integer sum, for reporting.
pub fn census_total(c: &TClassCensus) -> BigUint {
    c.t.iter().map(|x| x.0.clone()).sum::<BigUint>() + &c.triple_or_more.0
}
