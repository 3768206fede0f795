//! Dense matrices over Z_m with exact residue arithmetic, plus enumeration
//! of the three matrix domains (full ring, invertible group, determinant-one
//! group) and center/centralizer computation over them.
//!
//! Centers are always computed by enumeration, never assumed to be the
//! scalar matrices; the guard arguments bound how many elements an
//! enumeration may touch.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::error::{Error, Result};

/// Largest modulus the fused commutation kernel accepts (see `commutes_flat`).
pub(crate) const KERNEL_MAX_MODULUS: u64 = 1 << 20;

/// A normalized residue class mod m: 0 <= value < modulus, modulus >= 2.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct Residue {
    value: u64,
    modulus: u64,
}

impl Residue {
    /// # Panics
    /// Panics if `modulus < 2`.
    pub fn new(value: u64, modulus: u64) -> Residue {
        assert!(modulus >= 2, "modulus must be at least 2, got {modulus}");
        Residue { value: value % modulus, modulus }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_unit(&self) -> bool {
        self.value.gcd(&self.modulus) == 1
    }
}

impl fmt::Display for Residue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

macro_rules! check_same_modulus {
    ($a:expr, $b:expr) => {
        assert_eq!($a.modulus, $b.modulus, "residue modulus mismatch");
    };
}

impl std::ops::Add for Residue {
    type Output = Residue;
    fn add(self, rhs: Residue) -> Residue {
        check_same_modulus!(self, rhs);
        Residue { value: (self.value + rhs.value) % self.modulus, modulus: self.modulus }
    }
}

impl std::ops::Sub for Residue {
    type Output = Residue;
    fn sub(self, rhs: Residue) -> Residue {
        check_same_modulus!(self, rhs);
        Residue {
            value: (self.value + self.modulus - rhs.value) % self.modulus,
            modulus: self.modulus,
        }
    }
}

impl std::ops::Mul for Residue {
    type Output = Residue;
    fn mul(self, rhs: Residue) -> Residue {
        check_same_modulus!(self, rhs);
        let v = (self.value as u128 * rhs.value as u128 % self.modulus as u128) as u64;
        Residue { value: v, modulus: self.modulus }
    }
}

impl std::ops::Neg for Residue {
    type Output = Residue;
    fn neg(self) -> Residue {
        Residue { value: (self.modulus - self.value) % self.modulus, modulus: self.modulus }
    }
}

/// Square matrix over Z_m, entries stored row-major and kept normalized.
/// Equality and hashing are entry-wise on the normalized form.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModMatrix {
    n: usize,
    m: u64,
    entries: Vec<u64>,
}

impl ModMatrix {
    /// Build from row-major entries, reducing each mod m.
    ///
    /// # Panics
    /// Panics if `n < 1`, `m < 2`, or `entries.len() != n * n`.
    pub fn from_entries(n: usize, m: u64, entries: &[u64]) -> ModMatrix {
        assert!(n >= 1, "dimension must be at least 1");
        assert!(m >= 2, "modulus must be at least 2, got {m}");
        assert_eq!(entries.len(), n * n, "expected {} entries", n * n);
        ModMatrix { n, m, entries: entries.iter().map(|&e| e % m).collect() }
    }

    pub fn zero(n: usize, m: u64) -> ModMatrix {
        ModMatrix::from_entries(n, m, &vec![0; n * n])
    }

    pub fn identity(n: usize, m: u64) -> ModMatrix {
        ModMatrix::scalar(n, m, 1)
    }

    /// s * I.
    pub fn scalar(n: usize, m: u64, s: u64) -> ModMatrix {
        let mut mat = ModMatrix::zero(n, m);
        for i in 0..n {
            mat.entries[i * n + i] = s % m;
        }
        mat
    }

    /// Matrix unit E_{i,j} (zero-based indices): 1 at (i, j), 0 elsewhere.
    pub fn unit(n: usize, m: u64, i: usize, j: usize) -> ModMatrix {
        assert!(i < n && j < n, "unit index out of range");
        let mut mat = ModMatrix::zero(n, m);
        mat.entries[i * n + j] = 1 % m;
        mat
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn entry(&self, i: usize, j: usize) -> Residue {
        Residue::new(self.entries[i * self.n + j], self.m)
    }

    pub fn set_entry(&mut self, i: usize, j: usize, v: u64) {
        self.entries[i * self.n + j] = v % self.m;
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    fn check_compatible(&self, other: &ModMatrix) {
        assert_eq!(self.n, other.n, "matrix dimension mismatch");
        assert_eq!(self.m, other.m, "matrix modulus mismatch");
    }

    /// # Panics
    /// Panics on dimension or modulus mismatch.
    pub fn add(&self, other: &ModMatrix) -> ModMatrix {
        self.check_compatible(other);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + b) % self.m)
            .collect();
        ModMatrix { n: self.n, m: self.m, entries }
    }

    /// # Panics
    /// Panics on dimension or modulus mismatch.
    pub fn sub(&self, other: &ModMatrix) -> ModMatrix {
        self.check_compatible(other);
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(&a, &b)| (a + self.m - b) % self.m)
            .collect();
        ModMatrix { n: self.n, m: self.m, entries }
    }

    pub fn neg(&self) -> ModMatrix {
        ModMatrix::zero(self.n, self.m).sub(self)
    }

    /// # Panics
    /// Panics on dimension or modulus mismatch.
    pub fn mul(&self, other: &ModMatrix) -> ModMatrix {
        self.check_compatible(other);
        let n = self.n;
        let m = self.m as u128;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut acc: u128 = 0;
                for k in 0..n {
                    acc += self.entries[i * n + k] as u128 * other.entries[k * n + j] as u128 % m;
                }
                out[i * n + j] = (acc % m) as u64;
            }
        }
        ModMatrix { n, m: self.m, entries: out }
    }

    pub fn scalar_mul(&self, s: u64) -> ModMatrix {
        let m = self.m as u128;
        let s = (s % self.m) as u128;
        let entries = self.entries.iter().map(|&e| (e as u128 * s % m) as u64).collect();
        ModMatrix { n: self.n, m: self.m, entries }
    }

    pub fn transpose(&self) -> ModMatrix {
        let n = self.n;
        let mut out = vec![0u64; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.entries[i * n + j];
            }
        }
        ModMatrix { n, m: self.m, entries: out }
    }

    pub fn det(&self) -> Residue {
        Residue::new(det_flat(self.n, self.m, &self.entries), self.m)
    }

    /// True iff gcd(det, m) = 1, i.e. the matrix is a unit of M(n, Z_m).
    pub fn is_invertible(&self) -> bool {
        self.det().is_unit()
    }

    /// # Panics
    /// Panics on dimension or modulus mismatch.
    pub fn commutes_with(&self, other: &ModMatrix) -> bool {
        self.check_compatible(other);
        if self.m <= KERNEL_MAX_MODULUS {
            let off = kernel_offset(self.n, self.m);
            commutes_flat(self.n, self.m, off, &self.entries, &other.entries)
        } else {
            self.mul(other) == other.mul(self)
        }
    }

    /// True iff the matrix is s * I for some s.
    pub fn is_scalar(&self) -> bool {
        let n = self.n;
        let d = self.entries[0];
        for i in 0..n {
            for j in 0..n {
                let e = self.entries[i * n + j];
                if (i == j && e != d) || (i != j && e != 0) {
                    return false;
                }
            }
        }
        true
    }

    /// True iff every off-diagonal entry is divisible by d.
    pub fn off_diagonal_divisible_by(&self, d: u64) -> bool {
        assert!(d >= 1);
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                if i != j && self.entries[i * n + j] % d != 0 {
                    return false;
                }
            }
        }
        true
    }

    /// Number of matrices of this shape: m^(n*n), or None past u128.
    pub fn index_space(n: usize, m: u64) -> Option<u128> {
        let mut acc: u128 = 1;
        for _ in 0..n * n {
            acc = acc.checked_mul(m as u128)?;
        }
        Some(acc)
    }

    /// Row-major base-m digits, entry (0,0) most significant.
    pub fn encode(&self) -> Result<u128> {
        let mut acc: u128 = 0;
        for &e in &self.entries {
            acc = acc
                .checked_mul(self.m as u128)
                .and_then(|a| a.checked_add(e as u128))
                .ok_or(Error::Unencodable { n: self.n, m: self.m })?;
        }
        Ok(acc)
    }

    /// Inverse of `encode`.
    pub fn decode(n: usize, m: u64, index: u128) -> Result<ModMatrix> {
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        if n < 1 {
            return Err(Error::InvalidDimension { min: 1, got: n });
        }
        if let Some(space) = ModMatrix::index_space(n, m) {
            if index >= space {
                return Err(Error::IndexOutOfRange { index, space });
            }
        }
        let mut entries = vec![0u64; n * n];
        let mut rest = index;
        for k in (0..n * n).rev() {
            entries[k] = (rest % m as u128) as u64;
            rest /= m as u128;
        }
        Ok(ModMatrix { n, m, entries })
    }

    /// Parse the canonical text form `n:m:[e11,e12,...,enn]`.
    pub fn parse_text(s: &str) -> Result<ModMatrix> {
        let mut parts = s.splitn(3, ':');
        let (n_str, m_str, body) = match (parts.next(), parts.next(), parts.next()) {
            (Some(a), Some(b), Some(c)) => (a, b, c),
            _ => return Err(Error::Parse(format!("expected n:m:[entries], got {s:?}"))),
        };
        let n: usize = n_str
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension {n_str:?}")))?;
        let m: u64 = m_str
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad modulus {m_str:?}")))?;
        if n < 1 {
            return Err(Error::InvalidDimension { min: 1, got: n });
        }
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        let body = body.trim();
        let inner = body
            .strip_prefix('[')
            .and_then(|b| b.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("entries must be bracketed, got {body:?}")))?;
        let mut entries = Vec::with_capacity(n * n);
        for piece in inner.split(',') {
            let e: u64 = piece
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad entry {piece:?}")))?;
            entries.push(e);
        }
        if entries.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} entries for n={n}, got {}",
                n * n,
                entries.len()
            )));
        }
        Ok(ModMatrix::from_entries(n, m, &entries))
    }
}

impl fmt::Display for ModMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:[", self.n, self.m)?;
        for (k, e) in self.entries.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for ModMatrix {
    type Err = Error;
    fn from_str(s: &str) -> Result<ModMatrix> {
        ModMatrix::parse_text(s)
    }
}

/// Determinant of a row-major slice, 0 <= result < m.
///
/// Cofactor expansion up to n = 4; above that, fraction-free elimination
/// over arbitrary-precision integers reduced mod m at the end.
pub(crate) fn det_flat(n: usize, m: u64, e: &[u64]) -> u64 {
    let mm = m as u128;
    let mul = |a: u64, b: u64| (a as u128 * b as u128 % mm) as u64;
    let sub = |a: u64, b: u64| (a + m - b) % m;
    match n {
        1 => e[0] % m,
        2 => sub(mul(e[0], e[3]), mul(e[1], e[2])),
        3 => {
            let minor = |a, b, c, d| sub(mul(e[a], e[b]), mul(e[c], e[d]));
            let t0 = mul(e[0], minor(4, 8, 5, 7));
            let t1 = mul(e[1], minor(3, 8, 5, 6));
            let t2 = mul(e[2], minor(3, 7, 4, 6));
            sub((t0 + t2) % m, t1)
        }
        4 => {
            let det3 = |r: [usize; 3], c: [usize; 3]| {
                let g = |i: usize, j: usize| e[r[i] * 4 + c[j]];
                let minor = |a: u64, b: u64, c2: u64, d: u64| sub(mul(a, b), mul(c2, d));
                let t0 = mul(g(0, 0), minor(g(1, 1), g(2, 2), g(1, 2), g(2, 1)));
                let t1 = mul(g(0, 1), minor(g(1, 0), g(2, 2), g(1, 2), g(2, 0)));
                let t2 = mul(g(0, 2), minor(g(1, 0), g(2, 1), g(1, 1), g(2, 0)));
                sub((t0 + t2) % m, t1)
            };
            let rows = [1, 2, 3];
            let cols = [[1, 2, 3], [0, 2, 3], [0, 1, 3], [0, 1, 2]];
            let mut acc = 0u64;
            for (j, c) in cols.iter().enumerate() {
                let term = mul(e[j], det3(rows, *c));
                acc = if j % 2 == 0 { (acc + term) % m } else { sub(acc, term) };
            }
            acc
        }
        _ => det_bareiss(n, m, e),
    }
}

fn det_bareiss(n: usize, m: u64, e: &[u64]) -> u64 {
    let mut a: Vec<BigInt> = e.iter().map(|&x| BigInt::from(x)).collect();
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k * n + k].is_zero() {
            match (k + 1..n).find(|&r| !a[r * n + k].is_zero()) {
                Some(r) => {
                    for j in 0..n {
                        a.swap(k * n + j, r * n + j);
                    }
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[i * n + j] * &a[k * n + k] - &a[i * n + k] * &a[k * n + j];
                // Exact division: the previous pivot divides every 2x2 update.
                a[i * n + j] = num / &prev;
            }
        }
        prev = a[k * n + k].clone();
    }
    let det = &a[n * n - 1] * BigInt::from(sign);
    let r = det.mod_floor(&BigInt::from(m));
    assert!(!r.is_negative());
    let digits = r.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

/// Offset added before the mod in the fused kernel; any multiple of m at
/// least n*(m-1)^2 works.
#[inline]
pub(crate) fn kernel_offset(n: usize, m: u64) -> u64 {
    n as u64 * m * m
}

/// Entry-wise comparison of a*b and b*a with early exit, over row-major
/// slices. Callers guarantee m <= KERNEL_MAX_MODULUS so the u64 sums cannot
/// overflow.
#[inline]
pub(crate) fn commutes_flat(n: usize, m: u64, off: u64, a: &[u64], b: &[u64]) -> bool {
    for i in 0..n {
        let ra = &a[i * n..(i + 1) * n];
        let rb = &b[i * n..(i + 1) * n];
        for j in 0..n {
            let mut ab = 0u64;
            let mut ba = 0u64;
            for k in 0..n {
                ab += ra[k] * b[k * n + j];
                ba += rb[k] * a[k * n + j];
            }
            if (ab + off - ba) % m != 0 {
                return false;
            }
        }
    }
    true
}

/// Which matrix set over Z_m is being worked in.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum DomainKind {
    /// Full matrix ring M(n, Z_m).
    MatrixRing,
    /// Invertible matrices GL(n, Z_m).
    GeneralLinear,
    /// Determinant-one matrices SL(n, Z_m).
    SpecialLinear,
}

/// A concrete enumerable domain: kind plus shape.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
    pub m: u64,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, n: usize, m: u64) -> Result<DomainSpec> {
        if n < 1 {
            return Err(Error::InvalidDimension { min: 1, got: n });
        }
        if m < 2 {
            return Err(Error::InvalidModulus(m));
        }
        Ok(DomainSpec { kind, n, m })
    }

    /// Size of the ambient index space m^(n*n), or None past u128.
    pub fn index_space(&self) -> Option<u128> {
        ModMatrix::index_space(self.n, self.m)
    }

    pub fn contains(&self, a: &ModMatrix) -> bool {
        a.n() == self.n && a.modulus() == self.m && self.admits_entries(a.entries())
    }

    pub(crate) fn admits_entries(&self, e: &[u64]) -> bool {
        match self.kind {
            DomainKind::MatrixRing => true,
            DomainKind::GeneralLinear => det_flat(self.n, self.m, e).gcd(&self.m) == 1,
            DomainKind::SpecialLinear => det_flat(self.n, self.m, e) == 1 % self.m,
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            DomainKind::MatrixRing => "M",
            DomainKind::GeneralLinear => "GL",
            DomainKind::SpecialLinear => "SL",
        };
        write!(f, "{}({}, Z_{})", name, self.n, self.m)
    }
}

/// Base-m odometer over row-major entries: steps through all matrices of a
/// shape in ascending encoded order without per-element decoding.
pub(crate) struct Odometer {
    entries: Vec<u64>,
    m: u64,
}

impl Odometer {
    pub(crate) fn at_index(n: usize, m: u64, index: u128) -> Odometer {
        let mat = ModMatrix::decode(n, m, index).expect("odometer start index in range");
        Odometer { entries: mat.entries, m }
    }

    pub(crate) fn entries(&self) -> &[u64] {
        &self.entries
    }

    /// Advance to the next matrix; false on wrap-around.
    pub(crate) fn step(&mut self) -> bool {
        for k in (0..self.entries.len()).rev() {
            self.entries[k] += 1;
            if self.entries[k] < self.m {
                return true;
            }
            self.entries[k] = 0;
        }
        false
    }
}

/// Visit domain members with encoded index in [start, end), ascending.
pub(crate) fn scan_domain_range<F: FnMut(u128, &[u64])>(
    domain: DomainSpec,
    start: u128,
    end: u128,
    mut f: F,
) {
    if start >= end {
        return;
    }
    let mut odo = Odometer::at_index(domain.n, domain.m, start);
    let mut idx = start;
    loop {
        if domain.admits_entries(odo.entries()) {
            f(idx, odo.entries());
        }
        idx += 1;
        if idx >= end || !odo.step() {
            break;
        }
    }
}

/// Visit every member of the domain in ascending encoded order.
pub(crate) fn scan_domain<F: FnMut(u128, &[u64])>(domain: DomainSpec, f: F) {
    let space = domain.index_space().expect("guarded domains fit in u128");
    scan_domain_range(domain, 0, space, f);
}

fn checked_space(domain: DomainSpec, guard: u64) -> Result<u128> {
    match domain.index_space() {
        Some(space) if space <= guard as u128 => Ok(space),
        Some(space) => Err(Error::GuardExceeded { required: space, guard }),
        None => Err(Error::GuardExceeded { required: u128::MAX, guard }),
    }
}

/// All domain members commuting with x, ascending by encoded index.
///
/// The whole domain is enumerated, which the guard must allow.
pub fn centralizer(x: &ModMatrix, domain: DomainSpec, guard: u64) -> Result<Vec<ModMatrix>> {
    if !domain.contains(x) {
        return Err(Error::NotInDomain(format!("{x} is not in {domain}")));
    }
    checked_space(domain, guard)?;
    let off = kernel_offset(domain.n, domain.m);
    let mut out = Vec::new();
    scan_domain(domain, |_, e| {
        if commutes_flat(domain.n, domain.m, off, x.entries(), e) {
            out.push(ModMatrix { n: domain.n, m: domain.m, entries: e.to_vec() });
        }
    });
    Ok(out)
}

static CENTER_CACHE: Lazy<Mutex<HashMap<DomainSpec, Arc<Vec<u128>>>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Encoded indices of the center, ascending; memoized per domain.
///
/// Candidates are seeded with the members commuting with one fixed probe
/// (the unit upper bidiagonal matrix, which lies in every domain kind) and
/// then filtered against every domain member, so the result is the exact
/// enumerated center with no closed-form shortcut. For n = 1 the seeding
/// degenerates to all members and the fold is quadratic; keep m small.
pub(crate) fn center_indices(domain: DomainSpec, guard: u64) -> Result<Arc<Vec<u128>>> {
    if let Some(hit) = CENTER_CACHE.lock().unwrap().get(&domain) {
        return Ok(hit.clone());
    }
    checked_space(domain, guard)?;
    let (n, m) = (domain.n, domain.m);
    let off = kernel_offset(n, m);

    let probe: Option<ModMatrix> = (n >= 2).then(|| {
        let mut p = ModMatrix::identity(n, m);
        for i in 0..n - 1 {
            p.set_entry(i, i + 1, 1);
        }
        p
    });

    // Pass 1: candidate (index, entries) pairs.
    let mut cand: Vec<(u128, Vec<u64>)> = Vec::new();
    scan_domain(domain, |idx, e| {
        let keep = match &probe {
            Some(p) => commutes_flat(n, m, off, p.entries(), e),
            None => true,
        };
        if keep {
            cand.push((idx, e.to_vec()));
        }
    });

    // Pass 2: keep only candidates commuting with every member.
    scan_domain(domain, |_, e| {
        if cand.is_empty() {
            return;
        }
        cand.retain(|(_, ce)| commutes_flat(n, m, off, ce, e));
    });

    let center: Arc<Vec<u128>> = Arc::new(cand.into_iter().map(|(idx, _)| idx).collect());
    CENTER_CACHE.lock().unwrap().insert(domain, center.clone());
    Ok(center)
}

/// The center of the domain: members commuting with every member, computed
/// by enumeration and returned ascending by encoded index.
pub fn center_of(domain: DomainSpec, guard: u64) -> Result<Vec<ModMatrix>> {
    let idxs = center_indices(domain, guard)?;
    idxs.iter().map(|&i| ModMatrix::decode(domain.n, domain.m, i)).collect()
}

/// True iff a lies in the enumerated center of the domain.
pub fn is_central(a: &ModMatrix, domain: DomainSpec, guard: u64) -> Result<bool> {
    if !domain.contains(a) {
        return Err(Error::NotInDomain(format!("{a} is not in {domain}")));
    }
    let center = center_indices(domain, guard)?;
    Ok(center.binary_search(&a.encode()?).is_ok())
}
