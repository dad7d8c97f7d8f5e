//! Finite fields GF(p^k) at desk scale and the prime-power constructions:
//! collision-1 function families and mutually unbiased basis families.
//!
//! Elements are coefficient vectors over GF(p) reduced modulo a monic
//! irreducible polynomial, found by exhaustive search. Element indexing is
//! fixed as 0, 1, then the remaining elements by ascending coefficient
//! value (constant coefficient least significant); the function-family and
//! Mean King lookup tables depend on this order.

use crate::error::{Error, Result};
use crate::families::{unbiased_deviation, ControlledFamily};
use crate::numerics::{c, ComplexMatrix};

const MAX_ORDER: u64 = 16;

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A finite field GF(p^k) with its reduction modulus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    k: usize,
    /// Monic modulus, coefficients constant-first, length k + 1.
    modulus: Vec<u64>,
}

/// An element of a [`FieldSpec`]: k coefficients over GF(p), constant first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldElement {
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }
}

/// Schoolbook polynomial product over GF(p), no reduction.
fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

/// Reduce a polynomial modulo a monic modulus over GF(p).
fn poly_reduce(mut v: Vec<u64>, modulus: &[u64], p: u64) -> Vec<u64> {
    let k = modulus.len() - 1;
    for d in (k..v.len()).rev() {
        let coef = v[d];
        if coef != 0 {
            v[d] = 0;
            for t in 0..k {
                let sub = (coef * modulus[t]) % p;
                v[d - k + t] = (v[d - k + t] + p * p - sub) % p;
            }
        }
    }
    v.truncate(k.max(1));
    v.resize(k.max(1), 0);
    v
}

/// Does monic `g` divide `f` over GF(p)? Plain long division.
fn poly_divides(g: &[u64], f: &[u64], p: u64) -> bool {
    let mut rem: Vec<u64> = f.to_vec();
    let dg = g.len() - 1;
    while rem.len() > dg {
        let lead = *rem.last().unwrap();
        if lead != 0 {
            let shift = rem.len() - 1 - dg;
            for (t, &gc) in g.iter().enumerate() {
                let sub = (lead * gc) % p;
                rem[shift + t] = (rem[shift + t] + p * p - sub) % p;
            }
        }
        rem.pop();
    }
    rem.iter().all(|&x| x == 0)
}

fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        // trial division by every monic polynomial of degree d
        let count = p.pow(d as u32);
        for idx in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut v = idx;
            for _ in 0..d {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if poly_divides(&g, f, p) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// Construct GF(p^k), finding the least monic irreducible modulus of
    /// degree k (non-leading coefficients read as a base-p numeral).
    pub fn new(p: u64, k: usize) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if k == 0 || p.pow(k as u32) > MAX_ORDER {
            return Err(Error::Invalid(format!(
                "field order {}^{k} out of desk-scale range",
                p
            )));
        }
        if k == 1 {
            // prime field; the modulus x is never used for reduction
            return Ok(Self {
                p,
                k,
                modulus: vec![0, 1],
            });
        }
        let count = p.pow(k as u32);
        for idx in 0..count {
            let mut f = Vec::with_capacity(k + 1);
            let mut v = idx;
            for _ in 0..k {
                f.push(v % p);
                v /= p;
            }
            f.push(1);
            if is_irreducible(&f, p) {
                return Ok(Self { p, k, modulus: f });
            }
        }
        unreachable!("an irreducible monic polynomial of every degree exists over GF(p)")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn order(&self) -> u64 {
        self.p.pow(self.k as u32)
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            coeffs: vec![0; self.k],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.k];
        coeffs[0] = 1;
        FieldElement { coeffs }
    }

    /// Element with the given index in the canonical order: 0, 1, then the
    /// remaining elements by ascending coefficient value.
    pub fn element(&self, index: usize) -> Result<FieldElement> {
        let n = self.order() as usize;
        if index >= n {
            return Err(Error::IndexOutOfRange {
                what: "field element",
                got: index,
                bound: n,
            });
        }
        // 0 and 1 are the two smallest coefficient values, so the canonical
        // order coincides with ascending base-p value
        let mut coeffs = Vec::with_capacity(self.k);
        let mut v = index as u64;
        for _ in 0..self.k {
            coeffs.push(v % self.p);
            v /= self.p;
        }
        Ok(FieldElement { coeffs })
    }

    pub fn index_of(&self, e: &FieldElement) -> usize {
        let mut value = 0u64;
        for &cc in e.coeffs.iter().rev() {
            value = value * self.p + cc;
        }
        value as usize
    }

    /// All elements in canonical index order.
    pub fn elements(&self) -> Vec<FieldElement> {
        (0..self.order() as usize)
            .map(|i| self.element(i).unwrap())
            .collect()
    }

    pub fn add(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a
                .coeffs
                .iter()
                .zip(&b.coeffs)
                .map(|(x, y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &FieldElement) -> FieldElement {
        FieldElement {
            coeffs: a.coeffs.iter().map(|x| (self.p - x) % self.p).collect(),
        }
    }

    pub fn sub(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &FieldElement, b: &FieldElement) -> FieldElement {
        let prod = poly_mul(&a.coeffs, &b.coeffs, self.p);
        FieldElement {
            coeffs: poly_reduce(prod, &self.modulus, self.p),
        }
    }

    pub fn pow(&self, a: &FieldElement, mut e: u64) -> FieldElement {
        let mut acc = self.one();
        let mut base = a.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inv(&self, a: &FieldElement) -> Result<FieldElement> {
        if a.coeffs.iter().all(|&x| x == 0) {
            return Err(Error::ZeroInverse { p: self.p, k: self.k });
        }
        Ok(self.pow(a, self.order() - 2))
    }

    /// Absolute trace to the prime subfield: sum of the k Frobenius images,
    /// returned as an element of GF(p).
    pub fn trace(&self, a: &FieldElement) -> u64 {
        let mut total = self.zero();
        let mut cur = a.clone();
        for _ in 0..self.k {
            total = self.add(&total, &cur);
            cur = self.pow(&cur, self.p);
        }
        debug_assert!(total.coeffs[1..].iter().all(|&x| x == 0));
        total.coeffs[0]
    }
}

/// n^2 functions [n+1] -> [n] with pairwise collision count one.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctionFamily {
    n: usize,
    functions: Vec<Vec<usize>>,
}

impl FunctionFamily {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn function(&self, i: usize) -> &[usize] {
        &self.functions[i]
    }

    pub fn functions(&self) -> &[Vec<usize>] {
        &self.functions
    }
}

/// Number of arguments where two equal-length functions agree.
pub fn collisions(f: &[usize], g: &[usize]) -> Result<usize> {
    if f.len() != g.len() {
        return Err(Error::LengthMismatch(f.len(), g.len()));
    }
    Ok(f.iter().zip(g).filter(|(a, b)| a == b).count())
}

fn prime_power(n: usize) -> Result<(u64, usize)> {
    for p in 2..=n as u64 {
        if is_prime(p) && n as u64 % p == 0 {
            let mut k = 0;
            let mut v = n as u64;
            while v % p == 0 {
                v /= p;
                k += 1;
            }
            if v == 1 {
                return Ok((p, k));
            }
            return Err(Error::UnsupportedDimension(n));
        }
    }
    Err(Error::UnsupportedDimension(n))
}

/// The affine family over GF(n): f_{s,t}(c) = s * x_c + t for c < n and
/// f_{s,t}(n) = index(s), listed in (s, t) index order.
pub fn function_family(n: usize) -> Result<FunctionFamily> {
    let (p, k) = prime_power(n)?;
    let field = FieldSpec::new(p, k)?;
    let elements = field.elements();
    let mut functions = Vec::with_capacity(n * n);
    for s in &elements {
        for t in &elements {
            let mut f: Vec<usize> = elements
                .iter()
                .map(|x| field.index_of(&field.add(&field.mul(s, x), t)))
                .collect();
            f.push(field.index_of(s));
            functions.push(f);
        }
    }
    Ok(FunctionFamily { n, functions })
}

/// The dimensions for which a full basis family is shipped.
pub const SUPPORTED_DIMS: [usize; 7] = [2, 3, 4, 5, 7, 8, 9];

/// A family of n+1 pairwise unbiased bases of dimension n.
///
/// Odd prime powers use the additive-character construction over GF(n);
/// n = 2 uses the Z, X, Y eigenbases; n = 4 and n = 8 are fixed tables
/// validated on load.
pub fn mub_family(n: usize) -> Result<ControlledFamily> {
    match n {
        2 => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let x = crate::numerics::hadamard2();
            let y = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(s, 0.0), c(0.0, s), c(0.0, -s)])?;
            ControlledFamily::new(2, vec![ComplexMatrix::identity(2), x, y])
        }
        3 | 5 | 7 | 9 => odd_character_family(n),
        4 => load_table(include_str!("../data/mub4.txt"), 4),
        8 => load_table(include_str!("../data/mub8.txt"), 8),
        other => Err(Error::UnsupportedDimension(other)),
    }
}

/// Computational basis plus, for each a in GF(q), the basis with vectors
/// v^a_b[x] = w^tr(a x^2 + b x) / sqrt(q), w the p-th root of unity.
fn odd_character_family(n: usize) -> Result<ControlledFamily> {
    let (p, k) = prime_power(n)?;
    let field = FieldSpec::new(p, k)?;
    let elements = field.elements();
    let norm = 1.0 / (n as f64).sqrt();
    let mut bases = vec![ComplexMatrix::identity(n)];
    for a in &elements {
        let mut basis = ComplexMatrix::zeros(n, n);
        for (col, b) in elements.iter().enumerate() {
            for (row, x) in elements.iter().enumerate() {
                let ax2 = field.mul(a, &field.mul(x, x));
                let bx = field.mul(b, x);
                let t = field.trace(&field.add(&ax2, &bx));
                let theta = 2.0 * std::f64::consts::PI * t as f64 / p as f64;
                basis.set(row, col, c(norm * theta.cos(), norm * theta.sin()));
            }
        }
        bases.push(basis);
    }
    ControlledFamily::new(n, bases)
}

/// Parse a shipped basis table ("re im" per entry line, row-major per basis,
/// comments with '#') and validate unitarity and pairwise unbiasedness.
fn load_table(text: &str, n: usize) -> Result<ControlledFamily> {
    let mut entries = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (re, im) = match (parts.next(), parts.next(), parts.next()) {
            (Some(re), Some(im), None) => (re, im),
            _ => {
                return Err(Error::ParseFamily(format!(
                    "line {}: expected `re im`",
                    lineno + 1
                )))
            }
        };
        let re: f64 = re
            .parse()
            .map_err(|_| Error::ParseFamily(format!("line {}: bad real part", lineno + 1)))?;
        let im: f64 = im
            .parse()
            .map_err(|_| Error::ParseFamily(format!("line {}: bad imaginary part", lineno + 1)))?;
        entries.push(c(re, im));
    }
    let per_basis = n * n;
    let expected = (n + 1) * per_basis;
    if entries.len() != expected {
        return Err(Error::ParseFamily(format!(
            "expected {expected} entries for dimension {n}, found {}",
            entries.len()
        )));
    }
    let bases: Vec<ComplexMatrix> = entries
        .chunks(per_basis)
        .map(|chunk| ComplexMatrix::new(n, n, chunk.to_vec()))
        .collect::<Result<_>>()?;
    let family = ControlledFamily::new(n, bases)?;
    for a in 0..family.count() {
        for b in a + 1..family.count() {
            let dev = unbiased_deviation(family.basis(a), family.basis(b))?;
            if dev > 1e-9 {
                return Err(Error::ParseFamily(format!(
                    "table bases {a} and {b} are not unbiased (deviation {dev:e})"
                )));
            }
        }
    }
    Ok(family)
}
