//! Random instance generators and an independent brute-force oracle shared
//! by the integration tests.

#![allow(dead_code)]

pub mod oracle;
pub mod simplex;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use toricomplex::complexity::{Mode, OrbifoldDecomposition, OrbifoldStructure, Part};
use toricomplex::divisor::{is_nef, InvariantDivisor};
use toricomplex::fan::{examples, Fan};
use toricomplex::lattice::RationalCone;
use toricomplex::num::{primitive, Int, Rat};
use toricomplex::pair::{build_pair, ToricPair};

pub fn rng(seed: u64) -> ChaCha8Rng {
    rand::SeedableRng::seed_from_u64(seed)
}

/// A suite fan of rank at most 3, star-subdivided at random lattice points of
/// random cones until it has up to `max_rays` rays.
pub fn random_fan(rng: &mut ChaCha8Rng, max_rays: usize) -> Fan {
    let suite: Vec<Fan> = examples::suite().into_iter().map(|(_, f)| f).filter(|f| f.rank() <= 3).collect();
    let mut f = suite.choose(rng).unwrap().clone();
    let extra = rng.gen_range(0..=max_rays.saturating_sub(f.num_rays()).min(4));
    for _ in 0..extra {
        let c = rng.gen_range(0..f.max_cones().len());
        let rays = f.cone_rays(&f.max_cones()[c]);
        let mut v = vec![Int::zero(); f.rank()];
        let mut used = 0;
        for r in &rays {
            let k: i64 = rng.gen_range(0..=2);
            used += usize::from(k > 0);
            for (x, y) in v.iter_mut().zip(r) {
                *x += y * Int::from(k);
            }
        }
        if used < 2 {
            continue;
        }
        let v = primitive(&v);
        if f.ray_index(&v).is_none() {
            f = f.star_subdivision(&v).expect("subdividing at a point of the support");
        }
    }
    f
}

fn random_fraction(rng: &mut ChaCha8Rng) -> Rat {
    let d: i64 = *[1, 2, 3, 4, 6].choose(rng).unwrap();
    Rat::new(Int::from(rng.gen_range(0..=d)), Int::from(d))
}

/// A projective lc generalized CY pair `(X, B + M)`: `M = Σ t_ρ D_ρ` with
/// `t ∈ [0,1]` nef and `B = 1 − t`, so `K + B + M = K + Σ D_ρ ∼ 0`.
pub fn random_projective_pair(rng: &mut ChaCha8Rng, f: Fan) -> ToricPair {
    let n = f.num_rays();
    let mut t = InvariantDivisor::zero(n);
    for _ in 0..8 {
        let mut cand = InvariantDivisor::zero(n);
        for r in 0..n {
            if rng.gen_bool(0.4) {
                cand.set_coeff(r, random_fraction(rng));
            }
        }
        if is_nef(&cand, &f).unwrap_or(false) {
            t = cand;
            break;
        }
    }
    let b = InvariantDivisor::new(t.coeffs().iter().map(|x| Rat::one() - x).collect());
    let m = if t.is_zero() { None } else { Some(t) };
    build_pair(f, b, m, Mode::Projective).expect("generated pair is valid")
}

/// A random pointed full-dimensional cone given by its extremal rays.
pub fn random_cone(rng: &mut ChaCha8Rng, rank: usize) -> Fan {
    loop {
        let k = if rank == 2 { 2 } else { rng.gen_range(3..=4) };
        let gens: Vec<Vec<Int>> = (0..k)
            .map(|_| {
                let mut v: Vec<i64> = (0..rank).map(|_| rng.gen_range(-2..=3)).collect();
                // Keep the cone on the positive side of the last coordinate.
                v[rank - 1] = rng.gen_range(1..=3);
                primitive(&v.iter().map(|&x| Int::from(x)).collect::<Vec<_>>())
            })
            .collect();
        let Ok(c) = RationalCone::new(rank, gens) else { continue };
        if !c.is_full_dimensional() || !c.is_pointed() {
            continue;
        }
        let rays = c.extremal_rays();
        let all = (0..rays.len()).collect();
        return Fan::new(rank, rays, vec![all]);
    }
}

/// A random primitive vector in the interior of a single-cone fan.
pub fn random_interior(rng: &mut ChaCha8Rng, x: &Fan) -> Vec<Int> {
    let mut v = vec![Int::zero(); x.rank()];
    for r in x.rays() {
        let k: i64 = rng.gen_range(1..=3);
        for (a, b) in v.iter_mut().zip(r) {
            *a += b * Int::from(k);
        }
    }
    primitive(&v)
}

/// A relative lc CY pair over a random affine base: the fan subdivides the
/// base cone and `B_ρ = 1 − ⟨m, u_ρ⟩` for an `m` with values in `[0, 1]`.
pub fn random_relative_pair(rng: &mut ChaCha8Rng) -> ToricPair {
    let rank = rng.gen_range(2..=3);
    let base = random_cone(rng, rank);
    let mut f = base.clone();
    for _ in 0..rng.gen_range(1..=3) {
        let v = random_interior(rng, &base);
        if f.ray_index(&v).is_none() {
            f = f.star_subdivision(&v).unwrap();
        }
    }
    let mut m = vec![Rat::zero(); rank];
    for _ in 0..8 {
        let d = Int::from(*[2i64, 3, 4].choose(rng).unwrap());
        let cand: Vec<Rat> = (0..rank).map(|_| Rat::new(Int::from(rng.gen_range(-2..=2)), d.clone())).collect();
        let vals: Vec<Rat> = f.rays().iter().map(|u| cand.iter().zip(u).map(|(a, b)| a * Rat::from_integer(b.clone())).sum()).collect();
        if vals.iter().all(|v| !v.is_negative() && *v <= Rat::one()) {
            m = cand;
            break;
        }
    }
    let b = InvariantDivisor::new(
        f.rays().iter().map(|u| Rat::one() - m.iter().zip(u).map(|(a, b)| a * Rat::from_integer(b.clone())).sum::<Rat>()).collect(),
    );
    let mode = Mode::Relative { base_rays: base.rays().to_vec() };
    build_pair(f, b, None, mode).expect("generated pair is valid")
}

/// Mixed stream of projective (with nef trace) and relative CY pairs.
pub fn random_pair(rng: &mut ChaCha8Rng, max_rays: usize) -> ToricPair {
    if rng.gen_bool(0.7) {
        let f = random_fan(rng, max_rays);
        random_projective_pair(rng, f)
    } else {
        random_relative_pair(rng)
    }
}

/// A random decomposition of `b` for adjunction along `e`: every part other
/// than `E` contains a neighbor of `e`, orbifold indices satisfy
/// `1 − 1/n ≤ B`, parts are orbifold Weil and `Σ ≤ B`.
pub fn random_adjunction_sigma(rng: &mut ChaCha8Rng, f: &Fan, b: &InvariantDivisor, e: usize) -> OrbifoldDecomposition {
    let n = f.num_rays();
    let neighbors: Vec<usize> = f.neighbors(e).into_iter().filter(|&u| b.coeff(u).is_positive()).collect();
    let mut orbifold = OrbifoldStructure::trivial();
    let mut budget: Vec<Rat> = b.coeffs().to_vec();
    for &u in &neighbors {
        if rng.gen_bool(0.35) {
            let allowed: Vec<u64> = (2..=4u64).filter(|&k| Rat::one() - Rat::new(Int::one(), Int::from(k)) <= *b.coeff(u)).collect();
            if let Some(&k) = allowed.choose(rng) {
                orbifold.set(u, k);
                budget[u] -= Rat::one() - Rat::new(Int::one(), Int::from(k));
            }
        }
    }
    let mut parts = Vec::new();
    let e_alone = rng.gen_bool(0.75);
    if e_alone {
        parts.push(Part { b: Rat::one(), divisor: InvariantDivisor::prime(n, e) });
        budget[e] = Rat::zero();
    }
    let mut pool = neighbors.clone();
    pool.shuffle(rng);
    while !pool.is_empty() {
        let size = rng.gen_range(1..=pool.len().min(3));
        let block: Vec<usize> = pool.drain(..size).collect();
        let mut d = InvariantDivisor::zero(n);
        for &u in &block {
            d.set_coeff(u, Rat::new(Int::one(), Int::from(orbifold.get(u))));
        }
        if !e_alone && parts.is_empty() {
            d.set_coeff(e, Rat::one());
        }
        let cap = d.support().iter().map(|&u| &budget[u] / d.coeff(u)).min().unwrap();
        if !cap.is_positive() {
            continue;
        }
        let frac = Rat::new(Int::from(rng.gen_range(1..=4)), Int::from(4));
        let w = cap * frac;
        for u in d.support() {
            budget[u] -= &w * d.coeff(u);
        }
        parts.push(Part { b: w, divisor: d });
    }
    OrbifoldDecomposition::new(orbifold, parts)
}

/// Set partitions of `items` into blocks, with items optionally left out.
pub fn partial_partitions(items: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(items: &[usize], i: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == items.len() {
            out.push(cur.clone());
            return;
        }
        rec(items, i + 1, cur, out);
        for k in 0..cur.len() {
            cur[k].push(items[i]);
            rec(items, i + 1, cur, out);
            cur[k].pop();
        }
        cur.push(vec![items[i]]);
        rec(items, i + 1, cur, out);
        cur.pop();
    }
    rec(items, 0, &mut Vec::new(), &mut out);
    out
}
