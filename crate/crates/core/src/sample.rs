//! Seeded random generators for ideles, automorphisms and subgroups.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::adeles::{Idele, Point};
use crate::global_galois::{ram_locus, GlobalAutomorphism};
use crate::laurent::{LaurentSeries, LocalField};
use crate::local_algebra::LocalAutomorphism;
use crate::perm::Permutation;

/// `n` distinct integer-labelled points, drawn from `0..span`.
pub fn points<R: Rng + ?Sized>(rng: &mut R, n: usize, span: u64) -> Vec<Point> {
    let mut labels: Vec<u64> = (0..span.max(n as u64)).collect();
    labels.shuffle(rng);
    let mut out: Vec<Point> = labels[..n].iter().map(|l| Point::label(l.to_string())).collect();
    out.sort();
    out
}

/// A random nonzero series at level 0 with valuation `val`.
pub fn series<R: Rng + ?Sized>(k: &LocalField, rng: &mut R, val: i64) -> LaurentSeries {
    k.random_series(val, 0, rng)
}

/// An idele with up to `max_points` exceptions, valuations in `-4..=4`, and a random unit
/// as default component half of the time.
pub fn idele<R: Rng + ?Sized>(k: &LocalField, rng: &mut R, max_points: usize) -> Idele {
    let n = rng.gen_range(0..=max_points);
    let pts = points(rng, n, 40);
    let default = if rng.gen_bool(0.5) { k.random_unit(0, rng) } else { k.one() };
    let ex: Vec<(Point, LaurentSeries)> = pts
        .into_iter()
        .map(|x| {
            let v = rng.gen_range(-4..=4);
            (x, series(k, rng, v))
        })
        .collect();
    Idele::new(default, ex).expect("random components are nonzero")
}

/// An idele whose valuations at the given points are the given residues mod `p`, lifted
/// by a random multiple of `p`, with unit default.
pub fn idele_with_valuations<R: Rng + ?Sized>(k: &LocalField, rng: &mut R, vals: &[(Point, i64)]) -> Idele {
    let p = k.p() as i64;
    let ex: Vec<(Point, LaurentSeries)> = vals
        .iter()
        .map(|(x, v)| {
            let lift = v + p * rng.gen_range(-1..=1);
            (x.clone(), series(k, rng, lift))
        })
        .collect();
    Idele::new(k.random_unit(0, rng), ex).expect("random components are nonzero")
}

/// An idele with exactly `ram` ramified points and `extra` unramified exceptions.
pub fn ramified_idele<R: Rng + ?Sized>(k: &LocalField, rng: &mut R, ram: usize, extra: usize) -> Idele {
    let p = k.p() as i64;
    let mut pts = points(rng, ram + extra, 40);
    pts.shuffle(rng);
    let mut vals = Vec::new();
    for (i, x) in pts.into_iter().enumerate() {
        let v = if i < ram { rng.gen_range(1..p) } else { 0 };
        vals.push((x, v));
    }
    idele_with_valuations(k, rng, &vals)
}

pub fn permutation<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut images: Vec<usize> = (0..n).collect();
    images.shuffle(rng);
    Permutation::from_images(images).expect("shuffled identity")
}

/// A uniformly random `n`-cycle.
pub fn full_cycle<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Permutation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut images = vec![0; n];
    for i in 0..n {
        images[order[i]] = order[(i + 1) % n];
    }
    Permutation::from_images(images).expect("cycle")
}

/// A generator of a pointwise transitive subgroup for `t`: random nonzero exponents at the
/// ramified points, random `p`-cycles at some unramified exceptions and as default.
pub fn transitive_generator<R: Rng + ?Sized>(t: &Idele, p: u64, rng: &mut R) -> GlobalAutomorphism {
    let ram = ram_locus(t, p);
    let mut ex: Vec<(Point, LocalAutomorphism)> =
        ram.iter().map(|x| (x.clone(), LocalAutomorphism::Ram { a: rng.gen_range(1..p) })).collect();
    for x in t.points().into_iter().filter(|x| !ram.contains(x)) {
        if rng.gen_bool(0.5) {
            ex.push((x, LocalAutomorphism::unram(full_cycle(rng, p as usize))));
        }
    }
    GlobalAutomorphism::new(full_cycle(rng, p as usize), ex)
}

/// A generator with the prescribed ramified exponents and random unramified data.
pub fn generator_with_projection<R: Rng + ?Sized>(
    t: &Idele,
    p: u64,
    ram: &[(Point, u64)],
    rng: &mut R,
) -> GlobalAutomorphism {
    let mut g = transitive_generator(t, p, rng);
    for (x, a) in ram {
        g.exceptions.insert(x.clone(), LocalAutomorphism::Ram { a: *a });
    }
    g
}
