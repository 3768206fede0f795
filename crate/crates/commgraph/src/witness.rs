//! Constructive certificates for the commuting graph over composite moduli:
//! explicit neighbor witnesses, length-at-most-3 paths with independent
//! re-verification, the bidiagonal lower-bound witness pair, and the
//! isolated component that disconnects the graph over prime moduli.
//!
//! Every constructor re-checks its own output (commutation, non-centrality,
//! invertibility where demanded) and aborts with `SelfCheckFailed` rather
//! than return a wrong certificate.

use num_integer::Integer;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{
    center_indices, commutes_flat, kernel_offset, scan_domain, scan_domain_range, DomainKind,
    DomainSpec, ModMatrix, KERNEL_MAX_MODULUS,
};
use crate::modulus::{classify, is_prime, ModulusClass};

/// Default cap on the enumeration space for the exhaustive lower-bound scan.
pub const DEFAULT_SCAN_GUARD: u64 = 1 << 30;

/// Which construction produced a neighbor witness.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum WitnessForm {
    /// s * E_{1,1} + I.
    ScaledCornerPlusIdentity,
    /// s * x + I.
    ScaledInputPlusIdentity,
    /// s * (E_{1,n} + I) + t * I.
    ShearPlusSplitIdentity,
    /// s * (I - 2 E_{1,1}) + t * I.
    ReflectedCornerPlusSplitIdentity,
    /// s * x + t * I.
    ScaledInputPlusSplitIdentity,
}

/// A certified commuting neighbor of `base`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeighborWitness {
    pub base: ModMatrix,
    pub witness: ModMatrix,
    pub form: WitnessForm,
}

/// A certified path of length <= 3 between two vertices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PathWitness {
    pub endpoints: (ModMatrix, ModMatrix),
    pub interior: Vec<ModMatrix>,
    pub domain: DomainSpec,
    pub verified: bool,
}

impl PathWitness {
    /// Vertex sequence from one endpoint to the other; a single-vertex
    /// sequence when the endpoints coincide with no interior.
    pub fn sequence(&self) -> Vec<ModMatrix> {
        let mut seq = vec![self.endpoints.0.clone()];
        seq.extend(self.interior.iter().cloned());
        if self.endpoints.1 != self.endpoints.0 || !self.interior.is_empty() {
            seq.push(self.endpoints.1.clone());
        }
        seq
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.sequence().len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl std::fmt::Display for PathWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "len={} verified={}", self.len(), self.verified)?;
        for (k, v) in self.sequence().iter().enumerate() {
            write!(f, "{}{v}", if k == 0 { " " } else { " ~ " })?;
        }
        Ok(())
    }
}

/// Outcome of independent path verification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PathCheck {
    Pass,
    Fail(PathDefect),
}

impl PathCheck {
    pub fn is_pass(&self) -> bool {
        matches!(self, PathCheck::Pass)
    }
}

/// Why a claimed path failed verification.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum PathDefect {
    TooLong { edges: usize },
    RepeatedVertex(String),
    OutsideDomain(String),
    CentralEndpoint(String),
    CentralInterior(String),
    NonCommutingStep { from: String, to: String },
    Unverifiable(String),
}

impl std::fmt::Display for PathDefect {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathDefect::TooLong { edges } => write!(f, "too long: {edges} edges"),
            PathDefect::RepeatedVertex(v) => write!(f, "repeated vertex: {v}"),
            PathDefect::OutsideDomain(v) => write!(f, "outside domain: {v}"),
            PathDefect::CentralEndpoint(v) => write!(f, "central endpoint: {v}"),
            PathDefect::CentralInterior(v) => write!(f, "central interior: {v}"),
            PathDefect::NonCommutingStep { from, to } => {
                write!(f, "non-commuting step: {from} vs {to}")
            }
            PathDefect::Unverifiable(why) => write!(f, "unverifiable: {why}"),
        }
    }
}

fn pow_u64(p: u64, t: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..t {
        acc = acc.checked_mul(p)?;
    }
    Some(acc)
}

/// Shared self-check: the witness must commute with its base, be non-scalar
/// (non-scalar implies non-central here: the centers of these domains are
/// scalar sets, which verify_lower_bound establishes independently), and be
/// invertible when demanded.
fn check_witness(
    base: &ModMatrix,
    witness: &ModMatrix,
    need_invertible: bool,
    what: &str,
) -> Result<()> {
    if !base.commutes_with(witness) {
        return Err(Error::SelfCheckFailed(format!("{what}: witness does not commute with base")));
    }
    if witness.is_scalar() {
        return Err(Error::SelfCheckFailed(format!("{what}: witness is scalar")));
    }
    if need_invertible && !witness.is_invertible() {
        return Err(Error::SelfCheckFailed(format!("{what}: witness is not invertible")));
    }
    Ok(())
}

/// A non-central invertible neighbor of x over Z_{p^t}, t >= 2.
///
/// If every off-diagonal entry of x is divisible by p the witness is
/// p^(t-1) E_{1,1} + I; otherwise it is p^(t-1) x + I. Either way the
/// witness W satisfies W * (2I - W) = I because p^(2t-2) vanishes mod p^t,
/// so it is invertible for free.
pub fn prime_power_neighbor(x: &ModMatrix, p: u64, t: u32) -> Result<NeighborWitness> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if t < 2 {
        return Err(Error::Precondition(format!("exponent must be at least 2, got {t}")));
    }
    let m = pow_u64(p, t)
        .ok_or_else(|| Error::Precondition(format!("{p}^{t} overflows u64")))?;
    if x.modulus() != m {
        return Err(Error::ModulusMismatch { expected: m, got: x.modulus() });
    }
    if x.n() < 2 {
        return Err(Error::InvalidDimension { min: 2, got: x.n() });
    }
    let n = x.n();
    let s = pow_u64(p, t - 1).expect("p^(t-1) divides p^t");
    let id = ModMatrix::identity(n, m);
    let (witness, form) = if x.off_diagonal_divisible_by(p) {
        let w = ModMatrix::unit(n, m, 0, 0).scalar_mul(s).add(&id);
        (w, WitnessForm::ScaledCornerPlusIdentity)
    } else {
        (x.scalar_mul(s).add(&id), WitnessForm::ScaledInputPlusIdentity)
    };
    check_witness(x, &witness, true, "prime power neighbor")?;
    Ok(NeighborWitness { base: x.clone(), witness, form })
}

/// A non-central neighbor of x over Z_{st} with gcd(s,t) = 1, of the form
/// s*Y + k*I. The plain variant uses k = 1; the invertible variant uses
/// k = t and picks Y by case analysis so that the determinant lands on
/// s^n det(Y) + t^n, which is a unit whenever det(Y) is.
pub fn coprime_neighbor(
    x: &ModMatrix,
    s: u64,
    t: u64,
    require_invertible: bool,
) -> Result<NeighborWitness> {
    if s < 2 || t < 2 {
        return Err(Error::Precondition(format!("factors must exceed 1, got ({s}, {t})")));
    }
    if s.gcd(&t) != 1 {
        return Err(Error::NotCoprime { a: s, b: t });
    }
    let m = s
        .checked_mul(t)
        .ok_or_else(|| Error::Precondition(format!("{s}*{t} overflows u64")))?;
    if x.modulus() != m {
        return Err(Error::ModulusMismatch { expected: m, got: x.modulus() });
    }
    if x.n() < 2 {
        return Err(Error::InvalidDimension { min: 2, got: x.n() });
    }
    if require_invertible && !x.is_invertible() {
        return Err(Error::Precondition(format!("{x} is not invertible over Z_{m}")));
    }
    let n = x.n();
    let id = ModMatrix::identity(n, m);
    let all_divisible = x.off_diagonal_divisible_by(t);
    let (witness, form) = if require_invertible {
        let t_id = ModMatrix::scalar(n, m, t);
        if all_divisible && t == 2 {
            let y = ModMatrix::unit(n, m, 0, n - 1).add(&id);
            (y.scalar_mul(s).add(&t_id), WitnessForm::ShearPlusSplitIdentity)
        } else if all_divisible {
            let y = id.sub(&ModMatrix::unit(n, m, 0, 0).scalar_mul(2));
            (y.scalar_mul(s).add(&t_id), WitnessForm::ReflectedCornerPlusSplitIdentity)
        } else {
            (x.scalar_mul(s).add(&t_id), WitnessForm::ScaledInputPlusSplitIdentity)
        }
    } else if all_divisible {
        let w = ModMatrix::unit(n, m, 0, 0).scalar_mul(s).add(&id);
        (w, WitnessForm::ScaledCornerPlusIdentity)
    } else {
        (x.scalar_mul(s).add(&id), WitnessForm::ScaledInputPlusIdentity)
    };
    check_witness(x, &witness, require_invertible, "coprime neighbor")?;
    Ok(NeighborWitness { base: x.clone(), witness, form })
}

/// A certified path of length <= 3 between two non-central matrices over a
/// composite modulus, in the full ring or its unit group.
///
/// The interior pair is one constructed neighbor per endpoint; the middle
/// edge commutes identically (prime power: p^(2t-2) = 0; coprime split: the
/// st cross terms vanish). Coinciding vertices collapse the path, so the
/// result is always a sequence of distinct vertices.
pub fn path3(x: &ModMatrix, y: &ModMatrix, domain: DomainSpec) -> Result<PathWitness> {
    if domain.kind == DomainKind::SpecialLinear {
        return Err(Error::UnsupportedDomain(
            "determinant-one subgroup: connectivity is not established there".into(),
        ));
    }
    if !domain.contains(x) {
        return Err(Error::NotInDomain(format!("{x} is not in {domain}")));
    }
    if !domain.contains(y) {
        return Err(Error::NotInDomain(format!("{y} is not in {domain}")));
    }
    let class = match classify(domain.m)? {
        ModulusClass::Prime(p) => return Err(Error::PrimeModulus(p)),
        other => other,
    };
    // Scalar means central here: these domains have scalar centers.
    if x.is_scalar() {
        return Err(Error::CentralInput(x.to_string()));
    }
    if y.is_scalar() {
        return Err(Error::CentralInput(y.to_string()));
    }

    let finish = |interior: Vec<ModMatrix>| -> Result<PathWitness> {
        let mut w = PathWitness {
            endpoints: (x.clone(), y.clone()),
            interior,
            domain,
            verified: false,
        };
        if let PathCheck::Fail(defect) = verify_steps(&w) {
            return Err(Error::SelfCheckFailed(format!("path {w}: {defect}")));
        }
        w.verified = true;
        Ok(w)
    };

    if x == y {
        return finish(Vec::new());
    }
    if x.commutes_with(y) {
        return finish(Vec::new());
    }

    let invertible = domain.kind == DomainKind::GeneralLinear;
    let (a, b) = match class {
        ModulusClass::PrimePower { p, t } => (
            prime_power_neighbor(x, p, t)?.witness,
            prime_power_neighbor(y, p, t)?.witness,
        ),
        ModulusClass::CoprimeSplit { s, t } => (
            coprime_neighbor(x, s, t, invertible)?.witness,
            coprime_neighbor(y, t, s, invertible)?.witness,
        ),
        ModulusClass::Prime(_) => unreachable!("rejected above"),
    };
    // a == y would mean x and y commute, handled above; likewise b == x.
    debug_assert!(a != *y && b != *x);
    let interior = match (&a == x, &b == y) {
        (true, false) => vec![b],
        (false, true) => vec![a],
        (false, false) if a == b => vec![a],
        (false, false) => vec![a, b],
        (true, true) => unreachable!("middle edge would make x and y commute"),
    };
    finish(interior)
}

/// Structural checks shared by path3's self-check and verify_path: shape,
/// membership, distinctness, length, consecutive commutation, and
/// non-scalarity of every vertex. Does not consult the enumerated center.
fn verify_steps(w: &PathWitness) -> PathCheck {
    let seq = w.sequence();
    if seq.len() > 4 {
        return PathCheck::Fail(PathDefect::TooLong { edges: seq.len() - 1 });
    }
    for (k, v) in seq.iter().enumerate() {
        if !w.domain.contains(v) {
            return PathCheck::Fail(PathDefect::OutsideDomain(v.to_string()));
        }
        if v.is_scalar() {
            let text = v.to_string();
            return PathCheck::Fail(if k == 0 || k == seq.len() - 1 {
                PathDefect::CentralEndpoint(text)
            } else {
                PathDefect::CentralInterior(text)
            });
        }
    }
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] == seq[j] {
                return PathCheck::Fail(PathDefect::RepeatedVertex(seq[i].to_string()));
            }
        }
    }
    for pair in seq.windows(2) {
        if !pair[0].commutes_with(&pair[1]) {
            return PathCheck::Fail(PathDefect::NonCommutingStep {
                from: pair[0].to_string(),
                to: pair[1].to_string(),
            });
        }
    }
    PathCheck::Pass
}

/// Independent certificate checker: re-derives every path invariant from
/// scratch, including centrality against the enumerated center of the
/// domain (bounded by `guard`). Never trusts the `verified` flag.
pub fn verify_path(w: &PathWitness, guard: u64) -> PathCheck {
    if let PathCheck::Fail(defect) = verify_steps(w) {
        return PathCheck::Fail(defect);
    }
    let center = match center_indices(w.domain, guard) {
        Ok(c) => c,
        Err(e) => return PathCheck::Fail(PathDefect::Unverifiable(e.to_string())),
    };
    let seq = w.sequence();
    for (k, v) in seq.iter().enumerate() {
        let idx = match v.encode() {
            Ok(i) => i,
            Err(e) => return PathCheck::Fail(PathDefect::Unverifiable(e.to_string())),
        };
        if center.binary_search(&idx).is_ok() {
            let text = v.to_string();
            return PathCheck::Fail(if k == 0 || k == seq.len() - 1 {
                PathDefect::CentralEndpoint(text)
            } else {
                PathDefect::CentralInterior(text)
            });
        }
    }
    PathCheck::Pass
}

/// The unit upper bidiagonal matrix: 1s on the diagonal and superdiagonal.
/// Unitriangular, so its determinant is 1 over every modulus.
pub fn p_matrix(n: usize, m: u64) -> Result<ModMatrix> {
    if n < 2 {
        return Err(Error::InvalidDimension { min: 2, got: n });
    }
    if m < 2 {
        return Err(Error::InvalidModulus(m));
    }
    let mut p = ModMatrix::identity(n, m);
    for i in 0..n - 1 {
        p.set_entry(i, i + 1, 1);
    }
    Ok(p)
}

/// Exhaustively confirm the distance lower bound d(P, Pᵀ) >= 3 over
/// M(n, Z_m) and its unit group, for P the unit bidiagonal matrix:
///
/// 1. P and Pᵀ do not commute (so d >= 2).
/// 2. The matrices commuting with both P and Pᵀ are exactly the scalars,
///    by a full streamed scan of all m^(n*n) matrices. Scalars are central,
///    so P and Pᵀ share no vertex as a common neighbor, giving d >= 3.
///    The scan also pins the center: it traps every central element, so
///    center = scalar set exactly.
/// 3. Unit-group restriction, checked rather than inferred: the invertible
///    members of the intersection are exactly the unit scalars.
///
/// Returns Ok(false) when any check fails; errors only on bad inputs or a
/// guard violation.
pub fn verify_lower_bound(n: usize, m: u64, guard: u64) -> Result<bool> {
    let p = p_matrix(n, m)?;
    if m > KERNEL_MAX_MODULUS {
        return Err(Error::Precondition(format!(
            "modulus {m} exceeds the commutation kernel bound {KERNEL_MAX_MODULUS}"
        )));
    }
    let domain = DomainSpec::new(DomainKind::MatrixRing, n, m)?;
    let space = match domain.index_space() {
        Some(s) if s <= guard as u128 => s,
        Some(s) => return Err(Error::GuardExceeded { required: s, guard }),
        None => return Err(Error::GuardExceeded { required: u128::MAX, guard }),
    };
    let pt = p.transpose();
    if p.commutes_with(&pt) {
        return Ok(false);
    }

    let off = kernel_offset(n, m);
    let pe = p.entries();
    let te = pt.entries();
    let chunks: u128 = 512.min(space);
    let per_chunk = space.div_ceil(chunks);
    let both: Vec<u128> = (0..chunks as u64)
        .into_par_iter()
        .map(|c| {
            let start = c as u128 * per_chunk;
            let end = space.min(start + per_chunk);
            let mut local = Vec::new();
            scan_domain_range(domain, start, end, |idx, e| {
                if commutes_flat(n, m, off, pe, e) && commutes_flat(n, m, off, te, e) {
                    local.push(idx);
                }
            });
            local
        })
        .collect::<Vec<Vec<u128>>>()
        .concat();

    let scalars: Vec<u128> = (0..m)
        .map(|s| ModMatrix::scalar(n, m, s).encode().expect("guarded space fits"))
        .collect();
    if both != scalars {
        return Ok(false);
    }
    let invertible: Vec<u128> = both
        .iter()
        .copied()
        .filter(|&idx| ModMatrix::decode(n, m, idx).expect("scanned index").is_invertible())
        .collect();
    let unit_scalars: Vec<u128> = (0..m)
        .filter(|s| s.gcd(&m) == 1)
        .map(|s| ModMatrix::scalar(n, m, s).encode().expect("guarded space fits"))
        .collect();
    Ok(invertible == unit_scalars)
}

/// The isolated class over a prime modulus: A = {a*I + b*E_{1,2}, b != 0}
/// in M(2, Z_p), returned ascending by encoded index.
///
/// Exhaustively asserts that every neighbor of a member of A is again a
/// member, and that the unit shears [[1,1],[0,1]] and [[1,0],[1,1]] fall
/// inside and outside A respectively. Both shears have determinant 1, so
/// the same split disconnects the full ring graph, the unit-group graph,
/// and the determinant-one graph.
pub fn field_isolated_component(p: u64, guard: u64) -> Result<Vec<ModMatrix>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let domain = DomainSpec::new(DomainKind::MatrixRing, 2, p)?;
    let space = domain.index_space().expect("p^4 fits u128");
    if space > guard as u128 {
        return Err(Error::GuardExceeded { required: space, guard });
    }
    let members: Vec<ModMatrix> = (0..p)
        .flat_map(|a| (1..p).map(move |b| (a, b)))
        .map(|(a, b)| ModMatrix::from_entries(2, p, &[a, b, 0, a]))
        .collect();
    let encoded: Vec<u128> = members.iter().map(|x| x.encode().expect("p^4 fits")).collect();
    debug_assert!(encoded.windows(2).all(|w| w[0] < w[1]));

    let center = center_indices(domain, guard)?;
    let off = kernel_offset(2, p);
    let mut leak: Option<(u128, u128)> = None;
    scan_domain(domain, |idx, e| {
        if leak.is_some()
            || center.binary_search(&idx).is_ok()
            || encoded.binary_search(&idx).is_ok()
        {
            return;
        }
        for x in &members {
            if commutes_flat(2, p, off, x.entries(), e) {
                leak = Some((x.encode().expect("p^4 fits"), idx));
                return;
            }
        }
    });
    if let Some((member, outsider)) = leak {
        return Err(Error::SelfCheckFailed(format!(
            "class member {member} has neighbor {outsider} outside the class"
        )));
    }

    let b = ModMatrix::from_entries(2, p, &[1, 1, 0, 1]);
    let c = ModMatrix::from_entries(2, p, &[1, 0, 1, 1]);
    if encoded.binary_search(&b.encode().expect("fits")).is_err() {
        return Err(Error::SelfCheckFailed("upper shear missing from the class".into()));
    }
    if encoded.binary_search(&c.encode().expect("fits")).is_ok() {
        return Err(Error::SelfCheckFailed("lower shear must lie outside the class".into()));
    }
    if b.det().value() != 1 % p || c.det().value() != 1 % p {
        return Err(Error::SelfCheckFailed("shear determinants drifted from 1".into()));
    }
    Ok(members)
}
