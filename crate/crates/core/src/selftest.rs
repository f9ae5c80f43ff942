//! Invariant checks run by the `selftest` command.
//!
//! Each check measures a worst-case residual over a deterministic sample and
//! compares it with its threshold. Residuals are absolute; sampled points
//! keep at least 0.05 from every pole.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::constants::{compute_k_quadrature, compute_k_root};
use crate::identities::{self, FunctionPair};
use crate::inverse::sm_inverse_with;
use crate::par::{self, Execution};
use crate::render::{domain_color, sample_grid_with, Region, Selector};
use crate::{Complex, EllipticValue, Evaluator};

/// Reference value of `K` to eight decimals.
pub const K_REFERENCE: f64 = 1.76663875;
/// Reference root of `1 + 10σ - 12σ² + 4σ³ - 2σ⁴` in the unit disc; it is
/// the value of `sm(-K/4)³`.
pub const QUARTIC_ROOT_REFERENCE: f64 = -0.0899798;

const SEED: u64 = 0x5eed_d1c0;

pub struct Check {
    pub name: &'static str,
    pub threshold: f64,
    run: fn(&Evaluator) -> f64,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub name: &'static str,
    pub measured: f64,
    pub threshold: f64,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.measured <= self.threshold
    }
}

pub fn checks() -> Vec<Check> {
    macro_rules! check {
        ($name:literal, $thr:expr, $f:expr) => {
            Check {
                name: $name,
                threshold: $thr,
                run: $f,
            }
        };
    }
    vec![
        check!("series_recurrence_exact", 0.0, series_recurrence),
        check!("k_root_reference", 1e-8, |ev| (ev.constants().k
            - K_REFERENCE)
            .abs()),
        check!("k_quadrature_reference", 1e-8, |_| {
            compute_k_quadrature(1e-12).map_or(f64::INFINITY, |k| (k - K_REFERENCE).abs())
        }),
        check!("k_routes_agree", 1e-9, k_routes_agree),
        check!("cardinal_values", 1e-10, cardinal_values),
        check!("quartic_root", 1e-6, quartic_root),
        check!("cube_identity", 1e-10, cube_identity),
        check!("ode_finite_difference", 1e-6, ode_finite_difference),
        check!("periodicity", 1e-9, periodicity),
        check!("zeros", 1e-9, zeros),
        check!("residues", 1e-5, residues),
        check!("residue_sum", 1e-5, residue_sum),
        check!("symmetry_conjugation", 1e-10, |ev| symmetry(
            ev,
            Symmetry::Conjugation
        )),
        check!("symmetry_negation", 1e-10, |ev| symmetry(
            ev,
            Symmetry::Negation
        )),
        check!("symmetry_rotation", 1e-10, |ev| symmetry(
            ev,
            Symmetry::Rotation
        )),
        check!("symmetry_reflection", 1e-10, |ev| symmetry(
            ev,
            Symmetry::Reflection
        )),
        check!("symmetry_translation_2k", 1e-10, |ev| symmetry(
            ev,
            Symmetry::Translation
        )),
        check!("triangle_unit_modulus", 1e-9, triangle_unit_modulus),
        check!("imaginary_axis_unit_modulus", 1e-9, imaginary_axis),
        check!("hexagon_edge_reality", 1e-9, hexagon_edge),
        check!("ray_reality", 1e-9, ray_reality),
        check!("addition_formula", 1e-9, addition),
        check!("triplication_formula", 1e-10, triplication),
        check!("weierstrass_ode", 1e-10, weierstrass_ode),
        check!("weierstrass_round_trip", 1e-10, weierstrass_round_trip),
        check!("inverse_round_trip", 1e-9, inverse_round_trip),
        check!("inverse_at_unit", 1e-8, |ev| {
            sm_inverse_with(ev, Complex::new(1.0, 0.0), 1e-12)
                .map_or(f64::INFINITY, |r| (r.z - ev.constants().k).norm())
        }),
        check!("grid_determinism", 0.0, grid_determinism),
    ]
}

/// Runs every check; `tol` replaces each check's own threshold when given.
pub fn run_all(ev: &Evaluator, tol: Option<f64>) -> Vec<Outcome> {
    checks()
        .into_iter()
        .map(|c| Outcome {
            name: c.name,
            measured: (c.run)(ev),
            threshold: tol.unwrap_or(c.threshold),
        })
        .collect()
}

fn gap(a: FunctionPair, b: FunctionPair) -> f64 {
    (a.s - b.s).norm().max((a.c - b.c).norm())
}

/// Distance from `z` to the pole set `{-Kγʲ} + lattice`.
pub fn pole_distance(ev: &Evaluator, z: Complex) -> f64 {
    let Ok(red) = ev.reduce(z) else {
        return 0.0;
    };
    let (w1, w2) = ev.constants().periods;
    let mut best = f64::INFINITY;
    for &p in &ev.constants().pole_reps {
        for m in -1..=1 {
            for n in -1..=1 {
                let q = p + w1 * f64::from(m) + w2 * f64::from(n);
                best = best.min((red.z_reduced - q).norm());
            }
        }
    }
    best
}

/// Uniform points of the centred cell for which every transformed argument
/// keeps at least `margin` from the pole set.
pub fn cell_points<F>(ev: &Evaluator, n: usize, seed: u64, margin: f64, images: F) -> Vec<Complex>
where
    F: Fn(Complex) -> Vec<Complex>,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cell = ev.cell();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = cell.origin + cell.edge1 * rng.random::<f64>() + cell.edge2 * rng.random::<f64>();
        if std::iter::once(z)
            .chain(images(z))
            .all(|w| pole_distance(ev, w) >= margin)
        {
            out.push(z);
        }
    }
    out
}

fn pair(ev: &Evaluator, z: Complex) -> Option<FunctionPair> {
    ev.pair(z).ok()
}

fn worst(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc, v| {
        if v.is_nan() {
            f64::INFINITY
        } else {
            acc.max(v)
        }
    })
}

fn par_worst<F>(points: &[Complex], f: F) -> f64
where
    F: Fn(Complex) -> f64 + Sync + Send,
{
    worst(par::map(points, Execution::Parallel, |&z| f(z)))
}

fn series_recurrence(ev: &Evaluator) -> f64 {
    if ev.series().satisfies_recurrence() {
        0.0
    } else {
        1.0
    }
}

fn k_routes_agree(ev: &Evaluator) -> f64 {
    let root = compute_k_root(ev.series(), ev.tolerances(), 1e-14);
    let quad = compute_k_quadrature(1e-12);
    match (root, quad) {
        (Ok(a), Ok(b)) => (a - b).abs(),
        _ => f64::INFINITY,
    }
}

fn cardinal_values(ev: &Evaluator) -> f64 {
    let k = ev.constants().k;
    let half = 2f64.powf(-1.0 / 3.0);
    let cases = [
        (k, 1.0, 0.0),
        (k / 2.0, half, half),
        (-k / 2.0, -1.0, 2f64.cbrt()),
    ];
    worst(cases.iter().map(|&(z, s, c)| {
        pair(ev, Complex::new(z, 0.0))
            .map_or(f64::INFINITY, |p| (p.s - s).norm().max((p.c - c).norm()))
    }))
}

/// `1 + 10σ - 12σ² + 4σ³ - 2σ⁴`.
pub fn quartic(sigma: f64) -> f64 {
    1.0 + sigma * (10.0 + sigma * (-12.0 + sigma * (4.0 - 2.0 * sigma)))
}

fn quartic_root(ev: &Evaluator) -> f64 {
    let k = ev.constants().k;
    match ev
        .sm(Complex::new(-k / 4.0, 0.0))
        .ok()
        .and_then(EllipticValue::finite)
    {
        Some(s) => {
            let cube = s.powu(3);
            (cube.re - QUARTIC_ROOT_REFERENCE)
                .abs()
                .max(quartic(cube.re).abs())
                .max(cube.im.abs())
        }
        None => f64::INFINITY,
    }
}

fn cube_identity(ev: &Evaluator) -> f64 {
    let pts = cell_points(ev, 2000, SEED, 0.05, |_| vec![]);
    par_worst(&pts, |z| {
        pair(ev, z).map_or(f64::INFINITY, |p| p.cubic_residual())
    })
}

/// `f'(z)` from `n` values on a circle of radius `r`; the stencil is exact
/// for polynomials of degree below `n`.
fn circle_derivative(
    f: impl Fn(Complex) -> Option<Complex>,
    z: Complex,
    r: f64,
    n: usize,
) -> Option<Complex> {
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..n {
        let w = Complex::from_polar(1.0, std::f64::consts::TAU * j as f64 / n as f64);
        acc += f(z + w * r)? / w;
    }
    Some(acc / (n as f64 * r))
}

fn ode_finite_difference(ev: &Evaluator) -> f64 {
    let pts = cell_points(ev, 500, SEED + 1, 0.05, |_| vec![]);
    par_worst(&pts, |z| {
        let p = pair(ev, z);
        let ds = circle_derivative(|w| pair(ev, w).map(|q| q.s), z, 0.02, 48);
        let dc = circle_derivative(|w| pair(ev, w).map(|q| q.c), z, 0.02, 48);
        match (p, ds, dc) {
            (Some(p), Some(ds), Some(dc)) => (ds - p.c * p.c).norm().max((dc + p.s * p.s).norm()),
            _ => f64::INFINITY,
        }
    })
}

fn periodicity(ev: &Evaluator) -> f64 {
    let (w1, w2) = ev.constants().periods;
    let pts = cell_points(ev, 200, SEED + 2, 0.05, |_| vec![]);
    par_worst(&pts, |z| {
        let Some(base) = pair(ev, z) else {
            return f64::INFINITY;
        };
        let mut e: f64 = 0.0;
        for m in -2..=2 {
            for n in -2..=2 {
                let shifted = z + w1 * f64::from(m) + w2 * f64::from(n);
                e = e.max(pair(ev, shifted).map_or(f64::INFINITY, |p| (p.s - base.s).norm()));
            }
        }
        e
    })
}

fn zeros(ev: &Evaluator) -> f64 {
    let c = ev.constants();
    let (w1, w2) = c.periods;
    let reps = [
        Complex::new(0.0, 0.0),
        -c.k + c.k * c.gamma,
        -c.k + c.k * c.gamma.conj(),
    ];
    let shifts = [Complex::new(0.0, 0.0), w1, w2];
    worst(reps.iter().flat_map(|&r| {
        shifts.iter().map(move |&t| {
            ev.sm(r + t)
                .ok()
                .and_then(EllipticValue::finite)
                .map_or(f64::INFINITY, |v| v.norm())
        })
    }))
}

/// Mean of `(z - p)·sm(z)` over eight points at distance `1e-4` from `p`.
pub fn residue_estimate(ev: &Evaluator, p: Complex) -> Option<Complex> {
    let radius = 1e-4;
    let mut sum = Complex::new(0.0, 0.0);
    for k in 0..8 {
        let d = Complex::from_polar(radius, 0.1 + std::f64::consts::TAU * k as f64 / 8.0);
        sum += d * ev.sm(p + d).ok()?.finite()?;
    }
    Some(sum / 8.0)
}

fn residue_cases(ev: &Evaluator) -> [(Complex, Complex); 3] {
    let c = ev.constants();
    let (k, g) = (Complex::new(c.k, 0.0), c.gamma);
    [
        (-k, Complex::new(-1.0, 0.0)),
        (2.0 * k * g, -g.conj()),
        (2.0 * k * g.conj(), -g),
    ]
}

fn residues(ev: &Evaluator) -> f64 {
    worst(residue_cases(ev).iter().map(|&(p, expected)| {
        residue_estimate(ev, p).map_or(f64::INFINITY, |r| (r - expected).norm())
    }))
}

fn residue_sum(ev: &Evaluator) -> f64 {
    let mut sum = Complex::new(0.0, 0.0);
    for (p, _) in residue_cases(ev) {
        match residue_estimate(ev, p) {
            Some(r) => sum += r,
            None => return f64::INFINITY,
        }
    }
    sum.norm()
}

#[derive(Clone, Copy)]
enum Symmetry {
    Conjugation,
    Negation,
    Rotation,
    Reflection,
    Translation,
}

fn symmetry(ev: &Evaluator, which: Symmetry) -> f64 {
    let k = ev.constants().k;
    let g = ev.constants().gamma;
    let image = move |z: Complex| match which {
        Symmetry::Conjugation => z.conj(),
        Symmetry::Negation => -z,
        Symmetry::Rotation => g * z,
        Symmetry::Reflection => k - z,
        Symmetry::Translation => z + 2.0 * k,
    };
    let pts = cell_points(ev, 500, SEED + 3, 0.05, |z| vec![image(z)]);
    par_worst(&pts, |z| {
        let (Some(p), Some(q)) = (pair(ev, z), pair(ev, image(z))) else {
            return f64::INFINITY;
        };
        let (s, c) = match which {
            Symmetry::Conjugation => (p.s.conj(), p.c.conj()),
            Symmetry::Negation => (-p.s / p.c, 1.0 / p.c),
            Symmetry::Rotation => (g * p.s, p.c),
            Symmetry::Reflection => (p.c, p.s),
            Symmetry::Translation => (-p.c / p.s, 1.0 / p.s),
        };
        (q.s - s).norm().max((q.c - c).norm())
    })
}

fn edge_points(a: Complex, b: Complex, n: usize) -> impl Iterator<Item = Complex> {
    (0..n).map(move |i| a + (b - a) * ((i as f64 + 0.5) / n as f64))
}

fn triangle_unit_modulus(ev: &Evaluator) -> f64 {
    let c = ev.constants();
    let k = Complex::new(c.k, 0.0);
    let v = [k, k * c.gamma, k * c.gamma.conj()];
    worst((0..3).flat_map(|e| {
        edge_points(v[e], v[(e + 1) % 3], 100).map(|z| {
            ev.sm(z)
                .ok()
                .and_then(EllipticValue::finite)
                .map_or(f64::INFINITY, |s| (s.norm() - 1.0).abs())
        })
    }))
}

fn imaginary_axis(ev: &Evaluator) -> f64 {
    worst(
        edge_points(Complex::new(0.0, -10.0), Complex::new(0.0, 10.0), 200).map(|z| {
            ev.cm(z)
                .ok()
                .and_then(EllipticValue::finite)
                .map_or(f64::INFINITY, |c| (c.norm() - 1.0).abs())
        }),
    )
}

fn hexagon_edge(ev: &Evaluator) -> f64 {
    let c = ev.constants();
    let k = Complex::new(c.k, 0.0);
    let gbar = c.gamma.conj();
    worst(edge_points(k, -k * gbar, 100).map(|z| {
        let Some(p) = pair(ev, z) else {
            return f64::INFINITY;
        };
        // sm real, cm on the line γℝ
        p.s.im.abs().max((p.c * gbar).im.abs())
    }))
}

fn ray_reality(ev: &Evaluator) -> f64 {
    worst(
        (0..6)
            .flat_map(|ray| {
                let dir = Complex::from_polar(1.0, std::f64::consts::FRAC_PI_3 * ray as f64);
                (1..=50).map(move |i| dir * (0.6 * i as f64 / 51.0))
            })
            .map(|z| match ev.sm(z).ok().and_then(EllipticValue::finite) {
                Some(s) => {
                    let ratio = s / z;
                    if ratio.re > 0.0 {
                        ratio.im.abs() / ratio.norm()
                    } else {
                        f64::INFINITY
                    }
                }
                None => f64::INFINITY,
            }),
    )
}

fn addition(ev: &Evaluator) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 4);
    let pts = cell_points(ev, 1000, SEED + 5, 0.05, |_| vec![]);
    let pairs: Vec<(Complex, Complex)> = (0..500)
        .map(|i| (pts[i], pts[500 + (i + rng.random_range(0..500)) % 500]))
        .filter(|&(a, z)| pole_distance(ev, a + z) >= 0.05)
        .collect();
    let tol = ev.tolerances().denom_tol;
    worst(par::map(&pairs, Execution::Parallel, |&(a, z)| {
        let (Some(pa), Some(pz), Some(sum)) = (pair(ev, a), pair(ev, z), pair(ev, a + z)) else {
            return f64::INFINITY;
        };
        match identities::add(pa, pz, tol) {
            Ok(p) => gap(p, sum),
            Err(_) => f64::INFINITY,
        }
    }))
}

fn triplication(ev: &Evaluator) -> f64 {
    let tol = ev.tolerances().denom_tol;
    let pts = cell_points(ev, 500, SEED + 6, 0.05, |z| vec![2.0 * z, 3.0 * z]);
    par_worst(&pts, |z| {
        let Some(p) = pair(ev, z) else {
            return f64::INFINITY;
        };
        let via_add = identities::duplicate(p, tol).and_then(|d| identities::add(d, p, tol));
        match (identities::triplicate(p, tol), via_add) {
            (Ok(t), Ok(a)) => gap(t, a),
            _ => f64::INFINITY,
        }
    })
}

fn weierstrass_points(ev: &Evaluator) -> Vec<Complex> {
    cell_points(ev, 500, SEED + 7, 0.05, |_| vec![])
        .into_iter()
        .filter(|z| z.norm() >= 0.5)
        .collect()
}

fn weierstrass_ode(ev: &Evaluator) -> f64 {
    let tol = ev.tolerances().denom_tol;
    par_worst(&weierstrass_points(ev), |z| {
        pair(ev, z)
            .and_then(|p| identities::to_weierstrass(p, tol).ok())
            .map_or(f64::INFINITY, |w| w.ode_residual())
    })
}

fn weierstrass_round_trip(ev: &Evaluator) -> f64 {
    let tol = ev.tolerances().denom_tol;
    par_worst(&weierstrass_points(ev), |z| {
        let Some(p) = pair(ev, z) else {
            return f64::INFINITY;
        };
        identities::to_weierstrass(p, tol)
            .and_then(|w| identities::from_weierstrass(w, tol))
            .map_or(f64::INFINITY, |q| gap(q, p))
    })
}

fn inverse_round_trip(ev: &Evaluator) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let ws: Vec<Complex> = (0..300)
        .map(|_| {
            Complex::from_polar(
                0.9 * rng.random::<f64>().sqrt(),
                std::f64::consts::TAU * rng.random::<f64>(),
            )
        })
        .collect();
    par_worst(&ws, |w| {
        sm_inverse_with(ev, w, 1e-12)
            .ok()
            .and_then(|r| ev.sm(r.z).ok()?.finite())
            .map_or(f64::INFINITY, |s| (s - w).norm())
    })
}

fn grid_determinism(ev: &Evaluator) -> f64 {
    let Ok(region) = Region::cell_preset(ev.constants(), 64) else {
        return f64::INFINITY;
    };
    let a = sample_grid_with(ev, region, Selector::Sm, Execution::Sequential);
    let b = sample_grid_with(ev, region, Selector::Sm, Execution::Parallel);
    match (a, b) {
        (Ok(a), Ok(b)) if domain_color(&a) == domain_color(&b) => 0.0,
        _ => 1.0,
    }
}
