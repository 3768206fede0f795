//! Batch verification suites: seeded randomized checks of the determinant
//! and unit identities, the middle-edge commutation identities, and
//! exhaustive sweeps (lower bound, isolated component, all-pairs paths).
//! A fixed seed fully determines every randomized suite.

use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::build_graph;
use crate::matrix::{DomainKind, DomainSpec, ModMatrix};
use crate::modulus::{check_units_lemma, classify, is_prime, ModulusClass};
use crate::witness::{field_isolated_component, path3, verify_lower_bound, verify_path};

/// Result of one suite run: how many checks ran, how many failed, and a
/// description of the first failure in deterministic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrialOutcome {
    pub trials: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl TrialOutcome {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.trials += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(describe());
            }
        }
    }
}

impl std::fmt::Display for TrialOutcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.passed() {
            write!(f, "pass {}/{}", self.trials, self.trials)
        } else {
            write!(f, "FAIL {} of {} checks", self.failures, self.trials)?;
            if let Some(first) = &self.first_failure {
                write!(f, "; first: {first}")?;
            }
            Ok(())
        }
    }
}

fn pow_mod(base: u64, exp: u32, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let b = (base % m) as u128;
    for _ in 0..exp {
        acc = acc * b % m as u128;
    }
    acc as u64
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, m: u64) -> ModMatrix {
    let entries: Vec<u64> = (0..n * n).map(|_| rng.gen_range(0..m)).collect();
    ModMatrix::from_entries(n, m, &entries)
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize, m: u64) -> Result<ModMatrix> {
    // Units are dense over desk-scale moduli; the cap only guards against
    // misuse with near-unit-free rings.
    for _ in 0..100_000 {
        let x = random_matrix(rng, n, m);
        if x.is_invertible() {
            return Ok(x);
        }
    }
    Err(Error::Precondition(format!(
        "could not sample an invertible {n}x{n} matrix over Z_{m}"
    )))
}

fn coprime_split(m: u64) -> Result<(u64, u64)> {
    match classify(m)? {
        ModulusClass::CoprimeSplit { s, t } => Ok((s, t)),
        _ => Err(Error::Precondition(format!(
            "modulus {m} does not split into two coprime factors above 1"
        ))),
    }
}

/// Determinant identity on random invertible pairs: with m = s*t coprime,
/// det(sX + tY) = s^n det(X) + t^n det(Y) mod m, and sX + tY is invertible.
pub fn dets_identity_suite(n: usize, m: u64, trials: u64, seed: u64) -> Result<TrialOutcome> {
    if n < 1 {
        return Err(Error::InvalidDimension { min: 1, got: n });
    }
    let (s, t) = coprime_split(m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    for _ in 0..trials {
        let x = random_invertible(&mut rng, n, m)?;
        let y = random_invertible(&mut rng, n, m)?;
        let sum = x.scalar_mul(s).add(&y.scalar_mul(t));
        let lhs = sum.det().value();
        let rhs = (pow_mod(s, n as u32, m) as u128 * x.det().value() as u128
            + pow_mod(t, n as u32, m) as u128 * y.det().value() as u128)
            % m as u128;
        let ok = lhs as u128 == rhs && sum.is_invertible();
        out.record(ok, || format!("n={n} m={m} X={x} Y={y} det(sX+tY)={lhs} expected={rhs}"));
    }
    Ok(out)
}

/// Unit identity on random valid tuples: gcd(u*s^k + v*t^l, s*t) = 1.
pub fn units_suite(trials: u64, seed: u64, max_factor: u64, max_exp: u32) -> Result<TrialOutcome> {
    if max_factor < 3 || max_exp < 1 {
        return Err(Error::Precondition(
            "need max_factor >= 3 and max_exp >= 1 to sample tuples".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    for _ in 0..trials {
        let (s, t) = loop {
            let s = rng.gen_range(2..=max_factor);
            let t = rng.gen_range(2..=max_factor);
            if s.gcd(&t) == 1 {
                break (s, t);
            }
        };
        let st = s * t;
        // Valid tuples are pairwise coprime across u, v, s, t.
        let u = loop {
            let u = rng.gen_range(1..st);
            if u.gcd(&st) == 1 {
                break u;
            }
        };
        let v = loop {
            let v = rng.gen_range(1..st);
            if v.gcd(&st) == 1 && v.gcd(&u) == 1 {
                break v;
            }
        };
        let k = rng.gen_range(1..=max_exp);
        let l = rng.gen_range(1..=max_exp);
        let ok = matches!(check_units_lemma(u, v, s, t, k, l), Ok(true));
        out.record(ok, || format!("u={u} v={v} s={s} t={t} k={k} l={l}"));
    }
    Ok(out)
}

/// Middle-edge identity over Z_{p^t}: (p^(t-1)A + I)(p^(t-1)B + I) commutes
/// for arbitrary A, B because p^(2t-2) vanishes. Dimensions alternate 2, 3.
pub fn middle_edge_prime_power_suite(
    p: u64,
    t: u32,
    trials: u64,
    seed: u64,
) -> Result<TrialOutcome> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if t < 2 {
        return Err(Error::Precondition(format!("exponent must be at least 2, got {t}")));
    }
    let m = p.checked_pow(t).ok_or_else(|| {
        Error::Precondition(format!("{p}^{t} overflows u64"))
    })?;
    let scale = p.pow(t - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    for trial in 0..trials {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let id = ModMatrix::identity(n, m);
        let a = random_matrix(&mut rng, n, m);
        let b = random_matrix(&mut rng, n, m);
        let wa = a.scalar_mul(scale).add(&id);
        let wb = b.scalar_mul(scale).add(&id);
        out.record(wa.commutes_with(&wb), || format!("p={p} t={t} A={a} B={b}"));
    }
    Ok(out)
}

/// Middle-edge identity over Z_{st}: (sA + kI)(tB + lI) commutes for
/// arbitrary A, B, k, l because every cross term carries a factor st.
pub fn middle_edge_coprime_suite(s: u64, t: u64, trials: u64, seed: u64) -> Result<TrialOutcome> {
    if s < 2 || t < 2 {
        return Err(Error::Precondition(format!("factors must exceed 1, got ({s}, {t})")));
    }
    if s.gcd(&t) != 1 {
        return Err(Error::NotCoprime { a: s, b: t });
    }
    let m = s
        .checked_mul(t)
        .ok_or_else(|| Error::Precondition(format!("{s}*{t} overflows u64")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    for trial in 0..trials {
        let n = if trial % 2 == 0 { 2 } else { 3 };
        let a = random_matrix(&mut rng, n, m);
        let b = random_matrix(&mut rng, n, m);
        let k = rng.gen_range(0..m);
        let l = rng.gen_range(0..m);
        let wa = a.scalar_mul(s).add(&ModMatrix::scalar(n, m, k));
        let wb = b.scalar_mul(t).add(&ModMatrix::scalar(n, m, l));
        out.record(wa.commutes_with(&wb), || format!("s={s} t={t} k={k} l={l} A={a} B={b}"));
    }
    Ok(out)
}

/// Exhaustive lower-bound verification for the bidiagonal pair.
pub fn pmatrix_suite(n: usize, m: u64, guard: u64) -> Result<TrialOutcome> {
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    let ok = verify_lower_bound(n, m, guard)?;
    out.record(ok, || format!("lower bound failed for n={n} m={m}"));
    Ok(out)
}

/// Isolated-component verification over a prime modulus: the class itself,
/// plus component splits of the shear pair in all three domain graphs.
pub fn component_suite(p: u64, guard: u64) -> Result<TrialOutcome> {
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    match field_isolated_component(p, guard) {
        Ok(_) => out.record(true, String::new),
        Err(Error::SelfCheckFailed(msg)) => out.record(false, || msg),
        Err(other) => return Err(other),
    }
    let b = ModMatrix::from_entries(2, p, &[1, 1, 0, 1]);
    let c = ModMatrix::from_entries(2, p, &[1, 0, 1, 1]);
    for kind in [DomainKind::MatrixRing, DomainKind::GeneralLinear, DomainKind::SpecialLinear] {
        let domain = DomainSpec::new(kind, 2, p)?;
        let g = build_graph(domain, guard)?;
        let report = g.components();
        out.record(report.component_count >= 2, || {
            format!("{domain} has {} component(s)", report.component_count)
        });
        let bp = g.vertex_position(&b)?;
        let cp = g.vertex_position(&c)?;
        out.record(report.labels[bp] != report.labels[cp], || {
            format!("{domain}: shears share component {}", report.labels[bp])
        });
    }
    Ok(out)
}

/// All ordered pairs of distinct vertices: the constructed path must verify
/// independently and stay within three edges.
pub fn path_exhaustive_suite(
    kind: DomainKind,
    n: usize,
    m: u64,
    guard: u64,
) -> Result<TrialOutcome> {
    if kind == DomainKind::SpecialLinear {
        return Err(Error::UnsupportedDomain(
            "determinant-one subgroup: connectivity is not established there".into(),
        ));
    }
    let domain = DomainSpec::new(kind, n, m)?;
    let g = build_graph(domain, guard)?;
    let v = g.vertex_count();
    let per_source: Vec<(u64, u64, Option<String>)> = (0..v)
        .into_par_iter()
        .map(|i| {
            let x = g.vertex_matrix(i);
            let mut failures = 0u64;
            let mut first = None;
            let mut trials = 0u64;
            for j in 0..v {
                if j == i {
                    continue;
                }
                trials += 1;
                let y = g.vertex_matrix(j);
                let ok = match path3(&x, &y, domain) {
                    Ok(w) => w.len() <= 3 && verify_path(&w, guard).is_pass(),
                    Err(_) => false,
                };
                if !ok && first.is_none() {
                    first = Some(format!("x={x} y={y}"));
                }
                if !ok {
                    failures += 1;
                }
            }
            (trials, failures, first)
        })
        .collect();
    let mut out = TrialOutcome { trials: 0, failures: 0, first_failure: None };
    for (trials, failures, first) in per_source {
        out.trials += trials;
        out.failures += failures;
        if out.first_failure.is_none() {
            out.first_failure = first;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::DEFAULT_VERTEX_GUARD;
    use crate::witness::DEFAULT_SCAN_GUARD;

    #[test]
    fn dets_suite_passes_on_coprime_moduli() {
        for (n, m) in [(2usize, 6u64), (2, 15), (3, 10)] {
            let out = dets_identity_suite(n, m, 200, 7).unwrap();
            assert!(out.passed(), "n={n} m={m}: {out}");
            assert_eq!(out.trials, 200);
        }
    }

    #[test]
    fn dets_suite_rejects_non_split_moduli() {
        assert!(matches!(dets_identity_suite(2, 4, 10, 7), Err(Error::Precondition(_))));
        assert!(matches!(dets_identity_suite(2, 7, 10, 7), Err(Error::Precondition(_))));
    }

    #[test]
    fn suites_are_seed_deterministic() {
        let a = dets_identity_suite(2, 6, 100, 99).unwrap();
        let b = dets_identity_suite(2, 6, 100, 99).unwrap();
        assert_eq!(a, b);
        let a = units_suite(100, 3, 50, 6).unwrap();
        let b = units_suite(100, 3, 50, 6).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn units_suite_passes() {
        let out = units_suite(500, 11, 64, 8).unwrap();
        assert!(out.passed(), "{out}");
    }

    #[test]
    fn middle_edge_suites_pass() {
        for (p, t) in [(2u64, 2u32), (2, 3), (3, 2)] {
            let out = middle_edge_prime_power_suite(p, t, 300, 5).unwrap();
            assert!(out.passed(), "p={p} t={t}: {out}");
        }
        for (s, t) in [(2u64, 3u64), (4, 3), (2, 5)] {
            let out = middle_edge_coprime_suite(s, t, 300, 5).unwrap();
            assert!(out.passed(), "s={s} t={t}: {out}");
        }
        assert!(matches!(middle_edge_coprime_suite(2, 4, 10, 5), Err(Error::NotCoprime { .. })));
        assert!(matches!(middle_edge_prime_power_suite(6, 2, 10, 5), Err(Error::NotPrime(6))));
    }

    #[test]
    fn pmatrix_suite_passes_small() {
        assert!(pmatrix_suite(2, 4, DEFAULT_SCAN_GUARD).unwrap().passed());
        assert!(pmatrix_suite(2, 9, DEFAULT_SCAN_GUARD).unwrap().passed());
    }

    #[test]
    fn component_suite_small_primes() {
        for p in [2u64, 3] {
            let out = component_suite(p, DEFAULT_VERTEX_GUARD).unwrap();
            assert!(out.passed(), "p={p}: {out}");
            assert_eq!(out.trials, 7);
        }
        assert!(matches!(
            component_suite(6, DEFAULT_VERTEX_GUARD),
            Err(Error::NotPrime(6))
        ));
    }

    #[test]
    fn path_suite_covers_small_unit_group() {
        let out =
            path_exhaustive_suite(DomainKind::GeneralLinear, 2, 4, DEFAULT_VERTEX_GUARD).unwrap();
        assert!(out.passed(), "{out}");
        assert_eq!(out.trials, 94 * 93);
        assert!(matches!(
            path_exhaustive_suite(DomainKind::SpecialLinear, 2, 4, DEFAULT_VERTEX_GUARD),
            Err(Error::UnsupportedDomain(_))
        ));
    }
}
