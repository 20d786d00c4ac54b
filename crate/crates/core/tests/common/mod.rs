#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use relorder::error::Error;
use relorder::geometry::{build_order, causally_related, regions_spacelike, Event, Region};
use relorder::linalg::{c, CMatrix, DensityMatrix};
use relorder::observables::PortionObservable;
use relorder::outcome_fn::parse_f;
use relorder::scenario::{Factor, Instrument, Scenario};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut impl Rng, r: usize, k: usize) -> CMatrix {
    DMatrix::from_fn(r, k, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut impl Rng, d: usize) -> CMatrix {
    let g = random_complex(rng, d, d);
    (&g + g.adjoint()).scale(0.5)
}

pub fn random_unitary(rng: &mut impl Rng, d: usize) -> CMatrix {
    random_complex(rng, d, d).qr().q()
}

/// `U diag(values) U†`
pub fn with_spectrum(u: &CMatrix, values: &[f64]) -> CMatrix {
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| c(v, 0.0)),
    ));
    u * d * u.adjoint()
}

/// Integer eigenvalues drawn from a small set, so degeneracies and outcome
/// collisions are common.
pub fn integer_spectrum(rng: &mut impl Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1..=2) as f64).collect();
        if v.iter().any(|&x| x != v[0]) {
            return v;
        }
    }
}

pub fn random_density(rng: &mut impl Rng, d: usize) -> DensityMatrix {
    let rank = rng.random_range(1..=3.min(d));
    let g = random_complex(rng, d, rank);
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(m.unscale(tr)).expect("positive with unit trace")
}

fn point(t: f64, x: f64) -> Event {
    Event::new(t, vec![x])
}

/// Achronal region of 1..=max_points points in 1+1 dimensions.
pub fn random_region(rng: &mut impl Rng, max_points: usize) -> Region {
    let n = rng.random_range(1..=max_points);
    let mut pts: Vec<Event> = Vec::new();
    while pts.len() < n {
        let p = point(rng.random_range(0.0..3.0), rng.random_range(-4.0..4.0));
        if pts.iter().all(|q| !causally_related(&p, q)) {
            pts.push(p);
        }
    }
    Region::new(pts)
}

pub fn random_region_2d(rng: &mut impl Rng, max_points: usize) -> Region {
    let n = rng.random_range(1..=max_points);
    let mut pts: Vec<Event> = Vec::new();
    while pts.len() < n {
        let p = Event::new(
            rng.random_range(0.0..3.0),
            vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)],
        );
        if pts.iter().all(|q| !causally_related(&p, q)) {
            pts.push(p);
        }
    }
    Region::new(pts)
}

pub fn initial_region(spatial: usize) -> Region {
    Region::new(vec![Event::new(-100.0, vec![0.0; spatial])])
}

const F2: &[&str] = &["b1+b2", "(b1+b2)^2", "b1*b2", "b1^2+b2", "b1-2*b2", "b1*b2+b1"];
const F3: &[&str] = &["b1+b2+b3", "b1*b2+b3", "(b1-b3)^2+b2", "b1*b2*b3"];

fn random_f(rng: &mut impl Rng, arity: usize) -> &'static str {
    match arity {
        1 => "b1",
        2 => F2.choose(rng).unwrap(),
        _ => F3.choose(rng).unwrap(),
    }
}

fn random_dims(rng: &mut impl Rng) -> Vec<usize> {
    loop {
        let n = rng.random_range(2..=4);
        let dims: Vec<usize> = (0..n).map(|_| rng.random_range(2..=4)).collect();
        if dims.iter().product::<usize>() <= 64 {
            return dims;
        }
    }
}

/// A valid scenario with three instruments on random geometry, random
/// single-factor portion observables and a random mixed state. Every
/// instrument's observable portions coincide with its causal portions.
/// Retries until microcausality holds and at least one instrument pair is
/// spacelike.
pub fn random_scenario(rng: &mut impl Rng) -> Scenario {
    loop {
        if let Some(s) = try_random_scenario(rng) {
            return s;
        }
    }
}

fn try_random_scenario(rng: &mut impl Rng) -> Option<Scenario> {
    let dims = random_dims(rng);
    let names = ["A", "B", "C"];
    let regions: Vec<Region> = names.iter().map(|_| random_region(rng, 3)).collect();
    let initial = initial_region(1);
    let has_spacelike = (0..3).any(|i| (i + 1..3).any(|j| regions_spacelike(&regions[i], &regions[j])));
    if !has_spacelike {
        return None;
    }
    let order = build_order(&regions, &initial).ok()?;
    // one shared eigenbasis per factor; observables built on it commute
    let bases: Vec<CMatrix> = dims.iter().map(|&d| random_unitary(rng, d)).collect();
    let mut instruments = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let causal = &order.by_instrument[i];
        if causal.len() > 3 {
            return None;
        }
        let mut portions = Vec::new();
        let mut points = Vec::new();
        for (k, &p) in causal.iter().enumerate() {
            let f = rng.random_range(0..dims.len());
            let spectrum = integer_spectrum(rng, dims[f]);
            let u = if rng.random_bool(0.3) {
                random_unitary(rng, dims[f])
            } else {
                bases[f].clone()
            };
            let local = with_spectrum(&u, &spectrum);
            portions.push(PortionObservable::new(format!("{name}{}", k + 1), local, vec![f], &dims).ok()?);
            points.push(order.portions[p].points.clone());
        }
        let f = parse_f(random_f(rng, portions.len()), portions.len()).ok()?;
        match Instrument::new(*name, regions[i].clone(), portions, points, f) {
            Ok(inst) => instruments.push(inst),
            Err(Error::NonCommuting { .. }) => return None,
            Err(e) => panic!("generator produced an invalid instrument: {e}"),
        }
    }
    let factors = dims.iter().enumerate().map(|(i, &d)| Factor::new(format!("f{i}"), d)).collect();
    let rho = random_density(rng, dims.iter().product());
    let v = rng.random_range(-0.5..0.5);
    match Scenario::new(factors, rho, initial, instruments, Some(vec![v]), None) {
        Ok(s) => Some(s),
        Err(Error::NonCommuting { .. }) => None,
        Err(e) => panic!("generator produced an invalid scenario: {e}"),
    }
}

/// Every ordered pair of distinct spacelike instruments.
pub fn spacelike_pairs(s: &Scenario) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for a in &s.instruments {
        for b in &s.instruments {
            if a.name != b.name && regions_spacelike(&a.region, &b.region) {
                out.push((a.name.clone(), b.name.clone()));
            }
        }
    }
    out
}

const INJECTIVE_F: &[&str] = &["b1+b2", "2*b1+b2^2", "b1-3*b2", "3*b1+b2*b2", "b1+b2^3"];

/// Sorkin-arrangement scenario with jittered geometry, random observables
/// (A and B2 on factor x, B1 and C on factor y) and an outcome function
/// injective in `b1` for every fixed `b2`.
pub fn random_sorkin_family(rng: &mut impl Rng) -> Scenario {
    let dx = rng.random_range(2..=3);
    let dy = rng.random_range(2..=3);
    let dims = [dx, dy];
    let mut jitter = |t: f64, x: f64| point(t + rng.random_range(-0.1..0.1), x + rng.random_range(-0.1..0.1));
    let initial = Region::new(vec![jitter(-10.0, 0.0)]);
    let ra = Region::new(vec![jitter(0.0, 0.0)]);
    let rb = Region::new(vec![jitter(1.0, 0.5), jitter(1.0, 3.0)]);
    let rc = Region::new(vec![jitter(2.0, 3.5)]);
    let a = with_spectrum(&random_unitary(rng, dx), &integer_spectrum(rng, dx));
    let b2 = with_spectrum(&random_unitary(rng, dx), &integer_spectrum(rng, dx));
    let b1 = with_spectrum(&random_unitary(rng, dy), &integer_spectrum(rng, dy));
    let cc = random_hermitian(rng, dy);
    let f = INJECTIVE_F.choose(rng).unwrap();
    let inst_a = Instrument::simple("A", ra, PortionObservable::new("A", a, vec![0], &dims).unwrap()).unwrap();
    let inst_b = Instrument::new(
        "B",
        rb,
        vec![
            PortionObservable::new("B1", b1, vec![1], &dims).unwrap(),
            PortionObservable::new("B2", b2, vec![0], &dims).unwrap(),
        ],
        vec![vec![1], vec![0]],
        parse_f(f, 2).unwrap(),
    )
    .unwrap();
    let inst_c = Instrument::simple("C", rc, PortionObservable::new("C", cc, vec![1], &dims).unwrap()).unwrap();
    // keeps the frame order A, B, C
    let v = rng.random_range(0.0..0.25);
    Scenario::new(
        vec![Factor::new("x", dx), Factor::new("y", dy)],
        random_density(rng, dx * dy),
        initial,
        vec![inst_a, inst_b, inst_c],
        Some(vec![v]),
        None,
    )
    .expect("Sorkin-family scenarios are valid")
}
