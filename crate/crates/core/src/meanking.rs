//! The Mean King problem: chain states built from functions, the collision
//! identity, scheme construction over prime-power dimensions, the defining
//! equation for a solution, and an exact protocol simulator.
//!
//! Convention: a bipartite amplitude vector stores Alice's kept leg first
//! and the system handed to the King second (index u * n + v). Measuring
//! the second leg of the unnormalized pair sum_t |t,t> in basis b with
//! outcome k collapses the kept leg to the conjugate vector |b-bar_k>, so
//! chain states carry the conjugate basis on the kept slot. This is the
//! unique slot convention under which the standard scheme succeeds.

use crate::diagrams::{function_cell, tensors_equal, IndexedTensor};
use crate::error::{Error, Result};
use crate::families::ControlledFamily;
use crate::gf::{function_family, mub_family};
use crate::numerics::{c, Complex64, ComplexMatrix};

/// A vector in C^n (x) C^n over the product basis |u> (x) |v>, index u*n+v.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl BipartiteState {
    pub fn new(dim: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != dim * dim {
            return Err(Error::BadEntryCount {
                rows: dim,
                cols: dim,
                got: amplitudes.len(),
            });
        }
        Ok(Self { dim, amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Hermitian inner product `<self|other>`.
    pub fn inner(&self, other: &BipartiteState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).re.sqrt()
    }
}

/// The chain state for a function f: [n+1] -> [n] over a family of n+1
/// bases of C^n:
///
/// (1/sqrt(n)) ( sum_a |a-bar_{f(a)}> (x) |a_{f(a)}>  -  sum_t |t> (x) |t> )
pub fn mu_state(f: &[usize], family: &ControlledFamily) -> Result<BipartiteState> {
    let n = family.dim();
    if family.count() != n + 1 {
        return Err(Error::Invalid(format!(
            "family must have n+1 = {} bases, has {}",
            n + 1,
            family.count()
        )));
    }
    if f.len() != n + 1 {
        return Err(Error::LengthMismatch(f.len(), n + 1));
    }
    if let Some(&bad) = f.iter().find(|&&v| v >= n) {
        return Err(Error::IndexOutOfRange {
            what: "function value",
            got: bad,
            bound: n,
        });
    }
    let norm = 1.0 / (n as f64).sqrt();
    let mut amps = vec![Complex64::ZERO; n * n];
    for (a, &fa) in f.iter().enumerate() {
        let vec = family.vector(a, fa);
        for u in 0..n {
            for v in 0..n {
                amps[u * n + v] += vec[u].conj() * vec[v];
            }
        }
    }
    for t in 0..n {
        amps[t * n + t] -= Complex64::ONE;
    }
    for z in &mut amps {
        *z *= norm;
    }
    BipartiteState::new(n, amps)
}

/// Joint state of Alice's kept leg and the returned system after the King
/// measures basis b with outcome k and re-prepares: |b-bar_k> (x) |b_k>.
pub fn post_measurement_state(family: &ControlledFamily, b: usize, k: usize) -> BipartiteState {
    let n = family.dim();
    let vec = family.vector(b, k);
    let mut amps = vec![Complex64::ZERO; n * n];
    for u in 0..n {
        for v in 0..n {
            amps[u * n + v] = vec[u].conj() * vec[v];
        }
    }
    BipartiteState { dim: n, amplitudes: amps }
}

/// Outcome of the collision identity check `n <mu_f|mu_g> + 1 = f <> g`.
#[derive(Clone, Debug)]
pub struct CollisionReport {
    pub holds: bool,
    pub worst_deviation: f64,
    pub worst_pair: Option<(usize, usize)>,
}

/// Verify the collision identity over all ordered pairs of the function
/// family, including the diagonal (self collisions are n + 1).
pub fn check_collision_lemma(
    family: &ControlledFamily,
    functions: &[Vec<usize>],
    tol: f64,
) -> Result<CollisionReport> {
    let n = family.dim() as f64;
    let states: Vec<BipartiteState> = functions
        .iter()
        .map(|f| mu_state(f, family))
        .collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    let mut worst_pair = None;
    for (i, f) in functions.iter().enumerate() {
        for (j, g) in functions.iter().enumerate() {
            let want = crate::gf::collisions(f, g)? as f64;
            let got = n * states[i].inner(&states[j]) + Complex64::ONE;
            let dev = (got - c(want, 0.0)).norm();
            if dev > worst {
                worst = dev;
                worst_pair = Some((i, j));
            }
        }
    }
    Ok(CollisionReport {
        holds: worst <= tol,
        worst_deviation: worst,
        worst_pair,
    })
}

/// A full scheme: the basis family, Alice's bipartite measurement basis and
/// her classical lookup table (state index, basis) -> guess.
#[derive(Clone, Debug)]
pub struct MeanKingScheme {
    family: ControlledFamily,
    mu_basis: Vec<BipartiteState>,
    lookup: Vec<Vec<usize>>,
}

impl MeanKingScheme {
    pub fn new(
        family: ControlledFamily,
        mu_basis: Vec<BipartiteState>,
        lookup: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let n = family.dim();
        if mu_basis.len() != n * n || lookup.len() != n * n {
            return Err(Error::Invalid(format!(
                "scheme needs n^2 = {} states and lookup rows",
                n * n
            )));
        }
        for row in &lookup {
            if row.len() != family.count() {
                return Err(Error::LengthMismatch(row.len(), family.count()));
            }
            if let Some(&bad) = row.iter().find(|&&v| v >= n) {
                return Err(Error::IndexOutOfRange {
                    what: "lookup entry",
                    got: bad,
                    bound: n,
                });
            }
        }
        Ok(Self {
            family,
            mu_basis,
            lookup,
        })
    }

    pub fn n(&self) -> usize {
        self.family.dim()
    }

    pub fn family(&self) -> &ControlledFamily {
        &self.family
    }

    pub fn mu_basis(&self) -> &[BipartiteState] {
        &self.mu_basis
    }

    pub fn lookup(&self, state: usize, basis: usize) -> usize {
        self.lookup[state][basis]
    }

    /// Deterministically corrupt one lookup entry, for negative tests.
    pub fn with_corrupted_lookup(&self) -> MeanKingScheme {
        let mut lookup = self.lookup.clone();
        lookup[0][0] = (lookup[0][0] + 1) % self.n();
        MeanKingScheme {
            family: self.family.clone(),
            mu_basis: self.mu_basis.clone(),
            lookup,
        }
    }
}

/// The standard scheme for a prime-power dimension: the shipped basis
/// family, chain states of the affine function family, and the function
/// table itself as the lookup.
pub fn build_scheme(n: usize) -> Result<MeanKingScheme> {
    let family = mub_family(n)?;
    let functions = function_family(n)?;
    let mu_basis: Vec<BipartiteState> = functions
        .functions()
        .iter()
        .map(|f| mu_state(f, &family))
        .collect::<Result<_>>()?;
    let lookup = functions.functions().to_vec();
    MeanKingScheme::new(family, mu_basis, lookup)
}

/// Gram-matrix deviation of the scheme's bipartite basis from the identity.
pub fn check_orthonormal(scheme: &MeanKingScheme, tol: f64) -> (bool, f64) {
    let states = scheme.mu_basis();
    let mut worst = 0.0f64;
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate() {
            let want = if i == j { Complex64::ONE } else { Complex64::ZERO };
            worst = worst.max((a.inner(b) - want).norm());
        }
    }
    (worst <= tol, worst)
}

/// Outcome of the support condition check.
#[derive(Clone, Debug)]
pub struct SupportReport {
    pub ok: bool,
    pub worst_overlap_sq: f64,
    /// (state index, basis, outcome) of the worst forbidden overlap.
    pub witness: Option<(usize, usize, usize)>,
}

/// Wherever the lookup disagrees with the King's outcome, the corresponding
/// post-measurement state must be orthogonal to Alice's basis state.
pub fn verify_support(scheme: &MeanKingScheme, tol: f64) -> SupportReport {
    let n = scheme.n();
    let mut worst = 0.0f64;
    let mut witness = None;
    for b in 0..scheme.family().count() {
        for k in 0..n {
            let post = post_measurement_state(scheme.family(), b, k);
            for (i, state) in scheme.mu_basis().iter().enumerate() {
                if scheme.lookup(i, b) != k {
                    let p = state.inner(&post).norm_sqr();
                    if p > worst {
                        worst = p;
                        witness = Some((i, b, k));
                    }
                }
            }
        }
    }
    SupportReport {
        ok: worst <= tol,
        worst_overlap_sq: worst,
        witness: if worst <= tol { None } else { witness },
    }
}

/// The scheme composite as a tensor over (King basis b, King outcome k,
/// Alice guess g): normalized entangled pair, King measure-and-reprepare,
/// Alice's bipartite measurement, then the classical lookup applied to her
/// outcome. A correct scheme evaluates to the delta on (k, g).
pub fn build_mk_tensor(scheme: &MeanKingScheme) -> Result<IndexedTensor> {
    let n = scheme.n();
    let family = scheme.family();
    let pair = IndexedTensor::cup(n).tensor_scale(c(1.0 / (n as f64).sqrt(), 0.0));
    let king_measure = family
        .measurement_cell("b", "k", false)?
        .quantum_kron_left(n);
    let king_encode = family.encode_cell("b2", "k2", false)?.quantum_kron_left(n);
    let mu_cell = IndexedTensor::from_fn(&[("i", n * n)], 1, n * n, |assign| {
        let bra: Vec<Complex64> = scheme.mu_basis()[assign[0]]
            .amplitudes()
            .iter()
            .map(|z| z.conj())
            .collect();
        ComplexMatrix::row(&bra)
    })?;
    let lookup_cell = IndexedTensor::scalar_from_fn(
        &[("i2", n * n), ("b3", family.count()), ("g", n)],
        |assign| {
            if scheme.lookup(assign[0], assign[1]) == assign[2] {
                Complex64::ONE
            } else {
                Complex64::ZERO
            }
        },
    )?;
    pair.compose_quantum(&king_measure, &[])?
        .compose_quantum(&king_encode, &[("b", "b2"), ("k", "k2")])?
        .compose_quantum(&mu_cell, &[])?
        .compose_quantum(&lookup_cell, &[("i", "i2"), ("b", "b3")])?
        .close_index("i")?
        .permute_to(&["b", "k", "g"])
}

/// Full verdict for a scheme.
#[derive(Clone, Debug)]
pub struct MkReport {
    pub support_ok: bool,
    pub equation_ok: bool,
    pub success_probability: f64,
    pub worst_violation: f64,
}

/// Check the defining equation (the composite equals itself with outcome
/// and guess merged by the compare spider) and compute the exact success
/// probability under uniform basis choice.
pub fn check_mk_equation(scheme: &MeanKingScheme, tol: f64) -> Result<MkReport> {
    let mk = build_mk_tensor(scheme)?;
    let merged = mk.apply_ps("k", "g")?;
    let eq = tensors_equal(&mk, &merged, tol)?;

    let support = verify_support(scheme, tol);

    // exact success probability: uniform basis, uniform outcome given basis
    let n = scheme.n();
    let count = scheme.family().count();
    let mut success = 0.0;
    for b in 0..count {
        for k in 0..n {
            let post = post_measurement_state(scheme.family(), b, k);
            for (i, state) in scheme.mu_basis().iter().enumerate() {
                if scheme.lookup(i, b) == k {
                    success += state.inner(&post).norm_sqr() / (count * n) as f64;
                }
            }
        }
    }
    Ok(MkReport {
        support_ok: support.ok,
        equation_ok: eq.equal,
        success_probability: success,
        worst_violation: eq.worst_deviation.max(support.worst_overlap_sq),
    })
}

/// One row of the exact conditional distribution after the King's
/// measurement: Alice's outcome, her guess, and the probability.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationRow {
    pub alice_outcome: usize,
    pub alice_guess: usize,
    pub probability: f64,
}

/// Exact distribution over (Alice outcome, Alice guess) conditioned on the
/// King's basis and outcome. Probabilities are computed from the collapsed
/// joint state, not sampled.
pub fn simulate(
    scheme: &MeanKingScheme,
    king_basis: usize,
    king_outcome: usize,
) -> Result<Vec<SimulationRow>> {
    if king_basis >= scheme.family().count() {
        return Err(Error::IndexOutOfRange {
            what: "king basis",
            got: king_basis,
            bound: scheme.family().count(),
        });
    }
    if king_outcome >= scheme.n() {
        return Err(Error::IndexOutOfRange {
            what: "king outcome",
            got: king_outcome,
            bound: scheme.n(),
        });
    }
    let post = post_measurement_state(scheme.family(), king_basis, king_outcome);
    Ok(scheme
        .mu_basis()
        .iter()
        .enumerate()
        .map(|(i, state)| SimulationRow {
            alice_outcome: i,
            alice_guess: scheme.lookup(i, king_basis),
            probability: state.inner(&post).norm_sqr(),
        })
        .collect())
}

/// The chain cell for a family: at (a, v), the column |a_v> (x) |a-bar_v>
/// on the doubled wire. Contracting its closed form against its dagger
/// yields the overlap identities behind the collision identity.
pub fn function_chain_cell(family: &ControlledFamily) -> Result<IndexedTensor> {
    let n = family.dim();
    IndexedTensor::from_fn(
        &[("a", family.count()), ("v", n)],
        n * n,
        1,
        |assign| {
            let vec = family.vector(assign[0], assign[1]);
            let mut col = vec![Complex64::ZERO; n * n];
            for u in 0..n {
                for w in 0..n {
                    col[u * n + w] = vec[u] * vec[w].conj();
                }
            }
            ComplexMatrix::column(&col)
        },
    )
}

/// Left side of the function-overlap identity: the closed chain of g
/// contracted against the open chain dagger, a scalar tensor over
/// (a, v). For complementary families it equals `[g(a) = v] + 1`.
pub fn function_overlap_lhs(family: &ControlledFamily, g: &[usize]) -> Result<IndexedTensor> {
    if g.len() != family.count() {
        return Err(Error::LengthMismatch(g.len(), family.count()));
    }
    let chain = function_chain_cell(family)?;
    // pin the chain's value region to g of its argument, then close both
    let g_cell = function_cell("a2", family.count(), "v2", family.dim(), |a| g[a])?;
    let closed = g_cell
        .compose_quantum(&chain, &[("a2", "a"), ("v2", "v")])?
        .close_index("v2")?
        .close_index("a2")?;
    closed
        .compose_quantum(&chain.dagger(), &[])?
        .permute_to(&["a", "v"])
}

/// Right side of the function-overlap identity: the function cell plus the
/// constant one.
pub fn function_overlap_rhs(family: &ControlledFamily, g: &[usize]) -> Result<IndexedTensor> {
    if g.len() != family.count() {
        return Err(Error::LengthMismatch(g.len(), family.count()));
    }
    let delta = function_cell("a", family.count(), "v", family.dim(), |a| g[a])?;
    let ones = IndexedTensor::scalar_from_fn(
        &[("a", family.count()), ("v", family.dim())],
        |_| Complex64::ONE,
    )?;
    delta.tensor_add(&ones)
}
