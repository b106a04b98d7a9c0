//! A small deterministic invariant suite, runnable from the command line.

use adelic_core::global_galois::{construct_conjugation, is_galois, primitive_element, Character, CyclicSubgroup};
use adelic_core::harrison::{classify, kummer_inverse, kummer_map, stratification, ExtensionClass};
use adelic_core::local_algebra::{kummer_pair, oracle_pair};
use adelic_core::p1_ingest::{classify_superelliptic, RationalFunction};
use adelic_core::{sample, Error, FieldCtx, LocalField, Point, ValuationVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

const ROUNDS: usize = 20;

#[derive(Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Serialize)]
pub struct Report {
    pub passed: usize,
    pub failed: usize,
    pub checks: Vec<Check>,
}

type Step = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Step {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    format!("{}: {e}", e.kind())
}

fn tower(ctx: &FieldCtx) -> Step {
    ensure(ctx.verify_tower(), || "tower polynomials are not irreducible".into())?;
    let z = ctx.zeta();
    ensure(ctx.pow(&z, ctx.p() as i64).map_err(err)?.is_one(), || "ζᵖ ≠ 1".into())?;
    ensure(!z.is_one(), || "ζ = 1".into())
}

fn kummer_additivity(k: &LocalField, rng: &mut ChaCha8Rng) -> Step {
    let p = k.p();
    for _ in 0..ROUNDS {
        let (t1, t2) = (sample::idele(k, rng, 4), sample::idele(k, rng, 4));
        let sum = kummer_map(&t1, p).product(&kummer_map(&t2, p)).map_err(err)?;
        ensure(kummer_map(&t1.mul(k, &t2), p) == sum, || "υ is not additive".into())?;
        let back = kummer_map(&kummer_inverse(k, &sum), p);
        ensure(back == sum, || "kummer_inverse is not a section".into())?;
    }
    Ok(())
}

fn kernel_roots(k: &LocalField, rng: &mut ChaCha8Rng) -> Step {
    let p = k.p();
    for _ in 0..ROUNDS {
        let n = rng.gen_range(0..=4);
        let vals: Vec<(Point, i64)> = sample::points(rng, n, 30).into_iter().map(|x| (x, 0)).collect();
        let t = sample::idele_with_valuations(k, rng, &vals);
        let u = t.pth_root(k, p).map_err(err)?;
        ensure(u.pow(k, p as i64).agrees(&t), || "uᵖ ≠ t".into())?;
    }
    Ok(())
}

fn pairing(k: &LocalField, rng: &mut ChaCha8Rng) -> Step {
    let p = k.p();
    for _ in 0..ROUNDS {
        let a = rng.gen_range(0..p);
        let lv = rng.gen_range(-4..=4);
        let tv = loop {
            let v = rng.gen_range(-4..=4i64);
            if v.rem_euclid(p as i64) != 0 {
                break v;
            }
        };
        let (lambda, t) = (sample::series(k, rng, lv), sample::series(k, rng, tv));
        let closed = kummer_pair(k.ctx(), a, lv, tv).map_err(err)?;
        ensure(closed == oracle_pair(k, a, &lambda, &t).map_err(err)?, || format!("a={a}, υ(λ)={lv}, υ(t)={tv}"))?;
    }
    Ok(())
}

fn primitive_elements(k: &LocalField, rng: &mut ChaCha8Rng) -> Step {
    let p = k.p();
    for _ in 0..ROUNDS {
        let (r, extra) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let t = sample::ramified_idele(k, rng, r, extra);
        let g = CyclicSubgroup::new(&sample::transitive_generator(&t, p, rng), &t, p).map_err(err)?;
        ensure(is_galois(&t, &g.generator, p), || "transitive generator is not Galois".into())?;
        let chi = Character::new(rng.gen_range(1..p as i64), p).map_err(err)?;
        let alpha = primitive_element(k, &t, &g, chi).map_err(err)?;
        ensure(alpha.verify(k, &t, &g).map_err(err)?, || "primitive element fails its contract".into())?;
        let c = classify(k, &t, &g, chi).map_err(err)?;
        ensure(c.vec.points() == t.valuation_vector(p).points(), || "class support ≠ Ram(t)".into())?;
    }
    Ok(())
}

fn conjugations(k: &LocalField, rng: &mut ChaCha8Rng) -> Step {
    let p = k.p();
    for _ in 0..ROUNDS / 2 {
        let (r, extra) = (rng.gen_range(0..=2), rng.gen_range(0..=2));
        let t = sample::ramified_idele(k, rng, r, extra);
        let g1 = CyclicSubgroup::new(&sample::transitive_generator(&t, p, rng), &t, p).map_err(err)?;
        let j = rng.gen_range(1..p);
        let ram: Vec<(Point, u64)> =
            g1.generator.ram_projection(&t, p).into_iter().map(|(x, a)| (x, (a * j) % p)).collect();
        let g2 = CyclicSubgroup::new(&sample::generator_with_projection(&t, p, &ram, rng), &t, p).map_err(err)?;
        let chi = Character::new(1, p).map_err(err)?;
        let c = construct_conjugation(k, &g1, &g2, &t, chi).map_err(err)?;
        ensure(c.verify(k, &g1, &g2, &t, 1, rng).map_err(err)?, || "φ∘g ≠ τ(g)∘φ".into())?;
    }
    Ok(())
}

fn superelliptic(ctx: &FieldCtx, prec: usize) -> Step {
    let k = LocalField::new(ctx, prec);
    let f = RationalFunction::from_int_roots(ctx, &[(0, 1), (1, 2)]).map_err(err)?;
    let c = classify_superelliptic(&k, &f).map_err(err)?;
    let want = ValuationVector::new(3, [(Point::label("0"), 1), (Point::label("1"), 2)]);
    ensure(c.vec == want && !c.ram.contains(&Point::Infinity), || format!("got {:?}", c.vec))
}

fn strata(p: u64) -> Step {
    let support = [Point::label("0"), Point::label("1")];
    let want = 1 + ((p * p - 1) / (p - 1)) as usize;
    let got = stratification(&support, p).len();
    ensure(got == want, || format!("{got} classes, expected {want}"))?;
    ensure(ExtensionClass::trivial(p).is_trivial(), || "trivial class has support".into())
}

pub fn run(ell: u64, p: Option<u64>, prec: usize) -> Report {
    let primes = match p {
        Some(p) => vec![p],
        None => vec![2, 3, 5],
    };
    let mut checks = Vec::new();
    let mut record = |name: String, step: Step| {
        checks.push(Check { name, passed: step.is_ok(), detail: step.err() });
    };
    let prec = prec.min(16);
    for p in primes {
        let ctx = match FieldCtx::new(ell, p) {
            Ok(c) => c,
            Err(e) => {
                record(format!("p={p} field"), Err(err(e)));
                continue;
            }
        };
        let k = LocalField::new(&ctx, prec);
        let mut rng = ChaCha8Rng::seed_from_u64(p);
        record(format!("p={p} tower"), tower(&ctx));
        record(format!("p={p} kummer map additivity"), kummer_additivity(&k, &mut rng));
        record(format!("p={p} kernel roots"), kernel_roots(&k, &mut rng));
        record(format!("p={p} pairing closed form"), pairing(&k, &mut rng));
        record(format!("p={p} primitive elements"), primitive_elements(&k, &mut rng));
        record(format!("p={p} conjugations"), conjugations(&k, &mut rng));
        record(format!("p={p} stratification"), strata(p));
        if p == 3 {
            record("superelliptic example".into(), superelliptic(&ctx, prec));
        }
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    Report { failed: checks.len() - passed, passed, checks }
}
