//! Concrete semantics for surface diagrams with classical regions.
//!
//! A diagram with open classical boundaries evaluates to an [`IndexedTensor`]:
//! a matrix-valued function of one label per open classical index. Quantum
//! wires are matrix dimensions, classical regions are indices, and every
//! spider (copy / compare / create / delete network) is a delta of weight one.
//! Under this convention a closed floating classical region of size n is the
//! scalar n, and all explicit scalar factors appear exactly where equations
//! write them.

use crate::error::{Error, Result};
use crate::numerics::{Complex64, ComplexMatrix};

/// A classical system: a finite set of labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalSystem {
    name: String,
    size: usize,
}

impl ClassicalSystem {
    pub fn new(name: impl Into<String>, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Invalid("classical system must have size >= 1".into()));
        }
        Ok(Self {
            name: name.into(),
            size,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }
}

/// Named assignment of classical indices, used in witnesses and reports.
pub type Assignment = Vec<(String, usize)>;

fn named(spec: &[(String, usize)], values: &[usize]) -> Assignment {
    spec.iter()
        .map(|(n, _)| n.clone())
        .zip(values.iter().copied())
        .collect()
}

/// Iterate all assignments of a mixed-radix index spec in row-major order
/// (first index most significant).
fn assignments(sizes: &[usize]) -> impl Iterator<Item = Vec<usize>> + '_ {
    let total: usize = sizes.iter().product();
    (0..total).map(move |mut r| {
        let mut out = vec![0; sizes.len()];
        for (slot, &s) in out.iter_mut().zip(sizes).rev() {
            *slot = r % s;
            r /= s;
        }
        out
    })
}

fn rank(sizes: &[usize], values: &[usize]) -> usize {
    debug_assert_eq!(sizes.len(), values.len());
    let mut r = 0;
    for (&v, &s) in values.iter().zip(sizes) {
        debug_assert!(v < s);
        r = r * s + v;
    }
    r
}

/// The concrete value of a 2-cell with open classical boundaries: one
/// `quantum_out x quantum_in` matrix per assignment of the indices.
#[derive(Clone, Debug, PartialEq)]
pub struct IndexedTensor {
    index_spec: Vec<(String, usize)>,
    quantum_in: usize,
    quantum_out: usize,
    components: Vec<ComplexMatrix>,
}

impl IndexedTensor {
    /// Build a tensor by evaluating `f` on every assignment.
    pub fn from_fn(
        index_spec: &[(&str, usize)],
        quantum_out: usize,
        quantum_in: usize,
        mut f: impl FnMut(&[usize]) -> ComplexMatrix,
    ) -> Result<Self> {
        let spec: Vec<(String, usize)> = index_spec
            .iter()
            .map(|(n, s)| (n.to_string(), *s))
            .collect();
        for (i, (n, s)) in spec.iter().enumerate() {
            if *s == 0 {
                return Err(Error::Invalid(format!("index `{n}` has size 0")));
            }
            if spec[..i].iter().any(|(m, _)| m == n) {
                return Err(Error::DuplicateIndex(n.clone()));
            }
        }
        let sizes: Vec<usize> = spec.iter().map(|(_, s)| *s).collect();
        let mut components = Vec::with_capacity(sizes.iter().product());
        for a in assignments(&sizes) {
            let m = f(&a);
            if m.rows() != quantum_out || m.cols() != quantum_in {
                return Err(Error::ShapeMismatch {
                    op: "from_fn component",
                    lrows: quantum_out,
                    lcols: quantum_in,
                    rrows: m.rows(),
                    rcols: m.cols(),
                });
            }
            components.push(m);
        }
        Ok(Self {
            index_spec: spec,
            quantum_in,
            quantum_out,
            components,
        })
    }

    /// Tensor with scalar components given by `f`.
    pub fn scalar_from_fn(
        index_spec: &[(&str, usize)],
        mut f: impl FnMut(&[usize]) -> Complex64,
    ) -> Result<Self> {
        Self::from_fn(index_spec, 1, 1, |a| ComplexMatrix::scalar(f(a)))
    }

    /// The identity on a bare quantum wire of dimension `dim`.
    pub fn quantum_identity(dim: usize) -> Self {
        Self {
            index_spec: vec![],
            quantum_in: dim,
            quantum_out: dim,
            components: vec![ComplexMatrix::identity(dim)],
        }
    }

    /// A closed scalar diagram.
    pub fn scalar(z: Complex64) -> Self {
        Self {
            index_spec: vec![],
            quantum_in: 1,
            quantum_out: 1,
            components: vec![ComplexMatrix::scalar(z)],
        }
    }

    /// The entangled pair (bent wire) on a quantum wire of dimension `dim`:
    /// a single column of shape dim^2 holding sum_t |t,t>.
    pub fn cup(dim: usize) -> Self {
        let mut col = vec![Complex64::ZERO; dim * dim];
        for t in 0..dim {
            col[t * dim + t] = Complex64::ONE;
        }
        Self {
            index_spec: vec![],
            quantum_in: 1,
            quantum_out: dim * dim,
            components: vec![ComplexMatrix::column(&col)],
        }
    }

    pub fn index_spec(&self) -> &[(String, usize)] {
        &self.index_spec
    }

    pub fn quantum_in(&self) -> usize {
        self.quantum_in
    }

    pub fn quantum_out(&self) -> usize {
        self.quantum_out
    }

    fn sizes(&self) -> Vec<usize> {
        self.index_spec.iter().map(|(_, s)| *s).collect()
    }

    pub fn index_position(&self, name: &str) -> Result<usize> {
        self.index_spec
            .iter()
            .position(|(n, _)| n == name)
            .ok_or_else(|| Error::UnknownIndex(name.to_string()))
    }

    pub fn component(&self, values: &[usize]) -> &ComplexMatrix {
        debug_assert_eq!(values.len(), self.index_spec.len());
        let mut r = 0;
        for (&v, (_, s)) in values.iter().zip(&self.index_spec) {
            debug_assert!(v < *s);
            r = r * s + v;
        }
        &self.components[r]
    }

    /// All assignments in canonical (row-major) order.
    pub fn assignments(&self) -> Vec<Vec<usize>> {
        assignments(&self.sizes()).collect()
    }

    pub fn rename_index(mut self, old: &str, new: &str) -> Result<Self> {
        let pos = self.index_position(old)?;
        if self.index_spec.iter().any(|(n, _)| n == new) {
            return Err(Error::DuplicateIndex(new.to_string()));
        }
        self.index_spec[pos].0 = new.to_string();
        Ok(self)
    }

    /// Reorder the classical indices to the given name order.
    pub fn permute_to(&self, order: &[&str]) -> Result<Self> {
        if order.len() != self.index_spec.len() {
            return Err(Error::IndexSpecMismatch {
                op: "permute_to",
                detail: format!(
                    "expected {} names, got {}",
                    self.index_spec.len(),
                    order.len()
                ),
            });
        }
        let positions: Vec<usize> = order
            .iter()
            .map(|n| self.index_position(n))
            .collect::<Result<_>>()?;
        let new_spec: Vec<(String, usize)> =
            positions.iter().map(|&p| self.index_spec[p].clone()).collect();
        let spec_refs: Vec<(&str, usize)> =
            new_spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
        let sizes = self.sizes();
        Self::from_fn(&spec_refs, self.quantum_out, self.quantum_in, |a| {
            let mut orig = vec![0; a.len()];
            for (slot, &v) in positions.iter().zip(a) {
                orig[*slot] = v;
            }
            debug_assert_eq!(orig.len(), sizes.len());
            self.components[rank(&sizes, &orig)].clone()
        })
    }

    /// Componentwise sum; index specs and quantum shapes must agree.
    pub fn tensor_add(&self, other: &IndexedTensor) -> Result<IndexedTensor> {
        self.check_same_spec("tensor_add", other)?;
        let components = self
            .components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| a.add(b))
            .collect::<Result<_>>()?;
        Ok(IndexedTensor {
            index_spec: self.index_spec.clone(),
            quantum_in: self.quantum_in,
            quantum_out: self.quantum_out,
            components,
        })
    }

    /// Componentwise scaling.
    pub fn tensor_scale(&self, s: Complex64) -> IndexedTensor {
        IndexedTensor {
            index_spec: self.index_spec.clone(),
            quantum_in: self.quantum_in,
            quantum_out: self.quantum_out,
            components: self.components.iter().map(|m| m.scale(s)).collect(),
        }
    }

    /// Flip the tensor about a horizontal axis: dagger every component and
    /// swap the quantum wires.
    pub fn dagger(&self) -> IndexedTensor {
        IndexedTensor {
            index_spec: self.index_spec.clone(),
            quantum_in: self.quantum_out,
            quantum_out: self.quantum_in,
            components: self.components.iter().map(|m| m.dagger()).collect(),
        }
    }

    /// Entrywise complex conjugate (the mirror image about a vertical axis).
    pub fn conj(&self) -> IndexedTensor {
        IndexedTensor {
            index_spec: self.index_spec.clone(),
            quantum_in: self.quantum_in,
            quantum_out: self.quantum_out,
            components: self.components.iter().map(|m| m.conj()).collect(),
        }
    }

    /// Tensor the quantum wire with an ambient identity wire of dimension
    /// `dim` on the right (components become `C (x) I_dim`).
    pub fn quantum_kron_right(&self, dim: usize) -> IndexedTensor {
        let id = ComplexMatrix::identity(dim);
        IndexedTensor {
            index_spec: self.index_spec.clone(),
            quantum_in: self.quantum_in * dim,
            quantum_out: self.quantum_out * dim,
            components: self.components.iter().map(|m| m.kron(&id)).collect(),
        }
    }

    /// As `quantum_kron_right`, identity wire on the left.
    pub fn quantum_kron_left(&self, dim: usize) -> IndexedTensor {
        let id = ComplexMatrix::identity(dim);
        IndexedTensor {
            index_spec: self.index_spec.clone(),
            quantum_in: dim * self.quantum_in,
            quantum_out: dim * self.quantum_out,
            components: self.components.iter().map(|m| id.kron(m)).collect(),
        }
    }

    /// Vertical composition `other` after `self` on the quantum wires.
    ///
    /// `shared` pairs a classical index of `self` with one of `other`; the
    /// two are identified (kept open, diagonal) under the `self`-side name.
    /// Unshared indices of both tensors stay open; their names must not
    /// collide.
    pub fn compose_quantum(
        &self,
        other: &IndexedTensor,
        shared: &[(&str, &str)],
    ) -> Result<IndexedTensor> {
        if self.quantum_out != other.quantum_in {
            return Err(Error::QuantumWireMismatch {
                op: "compose_quantum",
                out: self.quantum_out,
                inp: other.quantum_in,
            });
        }
        let mut other_shared_pos: Vec<Option<usize>> = vec![None; other.index_spec.len()];
        let mut self_pos_for = Vec::new();
        for (sa, sb) in shared {
            let pa = self.index_position(sa)?;
            let pb = other.index_position(sb)?;
            if self.index_spec[pa].1 != other.index_spec[pb].1 {
                return Err(Error::IndexSpecMismatch {
                    op: "compose_quantum",
                    detail: format!(
                        "shared indexes `{sa}`/`{sb}` have sizes {} and {}",
                        self.index_spec[pa].1, other.index_spec[pb].1
                    ),
                });
            }
            if other_shared_pos[pb].is_some() {
                return Err(Error::DuplicateIndex((*sb).to_string()));
            }
            other_shared_pos[pb] = Some(pa);
            self_pos_for.push(pa);
        }
        // result spec: all of self's indices, then other's unshared ones
        let mut new_spec: Vec<(String, usize)> = self.index_spec.clone();
        let mut other_open_pos = Vec::new();
        for (pb, (n, s)) in other.index_spec.iter().enumerate() {
            if other_shared_pos[pb].is_none() {
                if new_spec.iter().any(|(m, _)| m == n) {
                    return Err(Error::DuplicateIndex(n.clone()));
                }
                other_open_pos.push(pb);
                new_spec.push((n.clone(), *s));
            }
        }
        let spec_refs: Vec<(&str, usize)> =
            new_spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
        let n_self = self.index_spec.len();
        let self_sizes = self.sizes();
        let other_sizes = other.sizes();
        Self::from_fn(&spec_refs, other.quantum_out, self.quantum_in, |a| {
            let self_vals = &a[..n_self];
            let mut other_vals = vec![0; other.index_spec.len()];
            for (pb, slot) in other_shared_pos.iter().enumerate() {
                if let Some(pa) = slot {
                    other_vals[pb] = self_vals[*pa];
                }
            }
            for (k, &pb) in other_open_pos.iter().enumerate() {
                other_vals[pb] = a[n_self + k];
            }
            let left = &other.components[rank(&other_sizes, &other_vals)];
            let right = &self.components[rank(&self_sizes, self_vals)];
            left.matmul(right).expect("checked quantum wires")
        })
    }

    /// Append a fresh open index the components do not depend on (a
    /// weight-one creation of uniform classical data).
    pub fn add_uniform_index(&self, name: &str, size: usize) -> Result<IndexedTensor> {
        if self.index_spec.iter().any(|(n, _)| n == name) {
            return Err(Error::DuplicateIndex(name.to_string()));
        }
        let mut new_spec: Vec<(String, usize)> = self.index_spec.clone();
        new_spec.push((name.to_string(), size));
        let spec_refs: Vec<(&str, usize)> =
            new_spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
        let sizes = self.sizes();
        let n = self.index_spec.len();
        Self::from_fn(&spec_refs, self.quantum_out, self.quantum_in, |a| {
            self.components[rank(&sizes, &a[..n])].clone()
        })
    }

    /// Sum an open classical index out (close the region with a weight-one
    /// deletion).
    pub fn close_index(&self, name: &str) -> Result<IndexedTensor> {
        let pos = self.index_position(name)?;
        let size = self.index_spec[pos].1;
        let mut new_spec = self.index_spec.clone();
        new_spec.remove(pos);
        let spec_refs: Vec<(&str, usize)> =
            new_spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
        let sizes = self.sizes();
        Self::from_fn(&spec_refs, self.quantum_out, self.quantum_in, |a| {
            let mut acc = ComplexMatrix::zeros(self.quantum_out, self.quantum_in);
            let mut full = a.to_vec();
            full.insert(pos, 0);
            for v in 0..size {
                full[pos] = v;
                acc = acc.add(&self.components[rank(&sizes, &full)]).unwrap();
            }
            acc
        })
    }

    /// Keep only components where indices `i` and `j` hold the same value.
    pub fn apply_ps(&self, i: &str, j: &str) -> Result<IndexedTensor> {
        self.project(i, j, true)
    }

    /// Keep only components where indices `i` and `j` hold different values.
    pub fn apply_pd(&self, i: &str, j: &str) -> Result<IndexedTensor> {
        self.project(i, j, false)
    }

    fn project(&self, i: &str, j: &str, same: bool) -> Result<IndexedTensor> {
        let pi = self.index_position(i)?;
        let pj = self.index_position(j)?;
        if self.index_spec[pi].1 != self.index_spec[pj].1 {
            return Err(Error::IndexSpecMismatch {
                op: "projector",
                detail: format!(
                    "indices `{i}` and `{j}` have sizes {} and {}",
                    self.index_spec[pi].1, self.index_spec[pj].1
                ),
            });
        }
        let spec_refs: Vec<(&str, usize)> = self
            .index_spec
            .iter()
            .map(|(n, s)| (n.as_str(), *s))
            .collect();
        let sizes = self.sizes();
        Self::from_fn(&spec_refs, self.quantum_out, self.quantum_in, |a| {
            if (a[pi] == a[pj]) == same {
                self.components[rank(&sizes, a)].clone()
            } else {
                ComplexMatrix::zeros(self.quantum_out, self.quantum_in)
            }
        })
    }

    fn check_same_spec(&self, op: &'static str, other: &IndexedTensor) -> Result<()> {
        if self.index_spec != other.index_spec {
            return Err(Error::IndexSpecMismatch {
                op,
                detail: format!("{:?} vs {:?}", self.index_spec, other.index_spec),
            });
        }
        if self.quantum_in != other.quantum_in || self.quantum_out != other.quantum_out {
            return Err(Error::QuantumWireMismatch {
                op,
                out: self.quantum_out,
                inp: other.quantum_out,
            });
        }
        Ok(())
    }
}

/// A connected spider network on `region` with `legs` open boundary legs:
/// component one when all legs agree, zero otherwise. With zero legs this is
/// the closed floating classical sphere, the scalar `region.size()`.
pub fn spider(region: &ClassicalSystem, legs: usize) -> IndexedTensor {
    if legs == 0 {
        return IndexedTensor::scalar(Complex64::new(region.size() as f64, 0.0));
    }
    let names: Vec<String> = (0..legs).map(|k| format!("leg{k}")).collect();
    let spec: Vec<(&str, usize)> = names.iter().map(|n| (n.as_str(), region.size())).collect();
    IndexedTensor::scalar_from_fn(&spec, |a| {
        if a.iter().all(|&v| v == a[0]) {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
    .expect("valid spider spec")
}

/// As [`spider`] with caller-chosen leg names.
pub fn spider_named(region: &ClassicalSystem, names: &[&str]) -> Result<IndexedTensor> {
    let spec: Vec<(&str, usize)> = names.iter().map(|n| (*n, region.size())).collect();
    IndexedTensor::scalar_from_fn(&spec, |a| {
        if a.iter().all(|&v| v == a[0]) {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// A classical function cell: maps the value of index `arg` to `f(arg)` on
/// index `out` (component one when out = f(arg), zero otherwise).
pub fn function_cell(
    arg_name: &str,
    arg_size: usize,
    out_name: &str,
    out_size: usize,
    f: impl Fn(usize) -> usize,
) -> Result<IndexedTensor> {
    IndexedTensor::scalar_from_fn(&[(arg_name, arg_size), (out_name, out_size)], |a| {
        if f(a[0]) == a[1] {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// Outcome of an entrywise tensor comparison.
#[derive(Clone, Debug)]
pub struct EqualityReport {
    pub equal: bool,
    pub worst_deviation: f64,
    /// Assignment realising the worst deviation (absent for index-free
    /// tensors that agree exactly).
    pub witness: Option<Assignment>,
}

/// Compare two tensors entrywise; specs must agree.
pub fn tensors_equal(a: &IndexedTensor, b: &IndexedTensor, tol: f64) -> Result<EqualityReport> {
    a.check_same_spec("tensors_equal", b)?;
    let mut worst = 0.0;
    let mut witness = None;
    for assign in a.assignments() {
        let d = a.component(&assign).max_abs_diff(b.component(&assign))?;
        if d > worst {
            worst = d;
            witness = Some(named(&a.index_spec, &assign));
        }
    }
    Ok(EqualityReport {
        equal: worst <= tol,
        worst_deviation: worst,
        witness,
    })
}

/// A controlled phase: one scalar per assignment of its classical indices.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseCell {
    index_spec: Vec<(String, usize)>,
    values: Vec<Complex64>,
}

impl PhaseCell {
    pub fn from_fn(
        index_spec: &[(&str, usize)],
        mut f: impl FnMut(&[usize]) -> Complex64,
    ) -> Result<Self> {
        let t = IndexedTensor::scalar_from_fn(index_spec, &mut f)?;
        Ok(Self {
            index_spec: t.index_spec.clone(),
            values: t.components.iter().map(|m| m.get(0, 0)).collect(),
        })
    }

    pub fn index_spec(&self) -> &[(String, usize)] {
        &self.index_spec
    }

    pub fn value(&self, values: &[usize]) -> Complex64 {
        let sizes: Vec<usize> = self.index_spec.iter().map(|(_, s)| *s).collect();
        self.values[rank(&sizes, values)]
    }

    pub fn assignments(&self) -> Vec<Vec<usize>> {
        let sizes: Vec<usize> = self.index_spec.iter().map(|(_, s)| *s).collect();
        assignments(&sizes).collect()
    }

    /// Worst deviation of any value's modulus from one.
    pub fn unit_modulus_deviation(&self) -> f64 {
        self.values
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_unit_modulus(&self, tol: f64) -> bool {
        self.unit_modulus_deviation() <= tol
    }

    pub fn conj(&self) -> PhaseCell {
        PhaseCell {
            index_spec: self.index_spec.clone(),
            values: self.values.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

/// Result of recovering the existential phase in an equation
/// `lhs = phase * template` on a support of assignments.
#[derive(Clone, Debug)]
pub struct PhaseExtraction {
    pub phase: PhaseCell,
    /// True when lhs is proportional to the template on every support
    /// assignment, within tolerance.
    pub proportional: bool,
    pub worst_residual: f64,
    /// True when additionally every extracted scalar has unit modulus.
    pub all_unit_modulus: bool,
    pub worst_unit_deviation: f64,
    /// Support assignment realising the worst violation of either kind.
    pub worst_assignment: Option<Assignment>,
    /// Support assignments where proportionality fails.
    pub failures: Vec<Assignment>,
}

impl PhaseExtraction {
    pub fn passed(&self) -> bool {
        self.proportional && self.all_unit_modulus
    }
}

/// For each support assignment, find the least-squares scalar `s` with
/// `lhs = s * template` and check the residual; off-support assignments get
/// the neutral phase one. Zero template against nonzero lhs is reported as a
/// proportionality failure, not an error.
pub fn extract_phase(
    lhs: &IndexedTensor,
    template: &IndexedTensor,
    support: impl Fn(&[usize]) -> bool,
    tol: f64,
) -> Result<PhaseExtraction> {
    lhs.check_same_spec("extract_phase", template)?;
    let mut worst_residual = 0.0f64;
    let mut worst_unit = 0.0f64;
    let mut worst_assignment = None;
    let mut worst_seen = -1.0f64;
    let mut failures = Vec::new();
    let mut phases = Vec::new();
    for assign in lhs.assignments() {
        if !support(&assign) {
            phases.push(Complex64::ONE);
            continue;
        }
        let l = lhs.component(&assign);
        let t = template.component(&assign);
        let mut tt = 0.0;
        let mut tl = Complex64::ZERO;
        for (a, b) in t.entries().iter().zip(l.entries()) {
            tt += a.norm_sqr();
            tl += a.conj() * b;
        }
        let s = if tt > 0.0 {
            tl / tt
        } else if l.max_abs() == 0.0 {
            // both sides vanish: any phase works, pick the neutral one
            Complex64::ONE
        } else {
            Complex64::ZERO
        };
        let residual = l.max_abs_diff(&t.scale(s))?;
        worst_residual = worst_residual.max(residual);
        if residual > tol {
            failures.push(named(&lhs.index_spec, &assign));
        }
        let unit = (s.norm() - 1.0).abs();
        worst_unit = worst_unit.max(unit);
        if residual.max(unit) > worst_seen {
            worst_seen = residual.max(unit);
            worst_assignment = Some(named(&lhs.index_spec, &assign));
        }
        phases.push(s);
    }
    let spec_refs: Vec<(&str, usize)> = lhs
        .index_spec
        .iter()
        .map(|(n, s)| (n.as_str(), *s))
        .collect();
    let mut it = phases.into_iter();
    let phase = PhaseCell::from_fn(&spec_refs, |_| it.next().unwrap())?;
    Ok(PhaseExtraction {
        phase,
        proportional: failures.is_empty(),
        worst_residual,
        all_unit_modulus: worst_unit <= tol,
        worst_unit_deviation: worst_unit,
        worst_assignment,
        failures,
    })
}
