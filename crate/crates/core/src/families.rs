//! Controlled families of measurements and the equivalent characterizations
//! of complementarity.
//!
//! A controlled family is a Hilbert space with an ordered list of orthonormal
//! bases, one selected per classical control value. The family is
//! complementary when every two distinct bases are unbiased; the checks in
//! this module verify that condition through four further equations, each
//! evaluated as an indexed-tensor identity. With weight-one spiders the
//! doubled equation carries the scalar 1/sqrt(m) and the four-vertex
//! equation carries 1/m, where m is the Hilbert space dimension.

use crate::diagrams::{extract_phase, tensors_equal, Assignment, IndexedTensor, PhaseCell};
use crate::error::{Error, Result};
use crate::numerics::{c, Complex64, ComplexMatrix};

/// Unitarity tolerance applied when a family is constructed.
pub const FAMILY_VALIDATION_TOL: f64 = 1e-10;

/// A list of orthonormal bases of an m-dimensional space; the columns of
/// each matrix are the basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlledFamily {
    dim: usize,
    bases: Vec<ComplexMatrix>,
}

impl ControlledFamily {
    /// Validate shapes and unitarity of every basis.
    pub fn new(dim: usize, bases: Vec<ComplexMatrix>) -> Result<Self> {
        if dim == 0 || bases.is_empty() {
            return Err(Error::Invalid(
                "a controlled family needs dim >= 1 and at least one basis".into(),
            ));
        }
        for (i, b) in bases.iter().enumerate() {
            if b.rows() != dim || b.cols() != dim {
                return Err(Error::ShapeMismatch {
                    op: "family basis",
                    lrows: dim,
                    lcols: dim,
                    rrows: b.rows(),
                    rcols: b.cols(),
                });
            }
            let deviation = b.unitarity_deviation()?;
            if deviation > FAMILY_VALIDATION_TOL {
                return Err(Error::NonUnitaryBasis {
                    index: i,
                    deviation,
                });
            }
        }
        Ok(Self { dim, bases })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of bases in the family.
    pub fn count(&self) -> usize {
        self.bases.len()
    }

    pub fn basis(&self, a: usize) -> &ComplexMatrix {
        &self.bases[a]
    }

    pub fn bases(&self) -> &[ComplexMatrix] {
        &self.bases
    }

    /// The i-th vector of basis a, as amplitudes.
    pub fn vector(&self, a: usize, i: usize) -> Vec<Complex64> {
        self.bases[a].column_vec(i)
    }

    /// Family whose bases are the entrywise complex conjugates; the mirror
    /// image of the family about a vertical axis.
    pub fn conjugate(&self) -> ControlledFamily {
        ControlledFamily {
            dim: self.dim,
            bases: self.bases.iter().map(|b| b.conj()).collect(),
        }
    }

    /// The controlled measurement cell: classical indices (basis, outcome),
    /// one quantum wire in, component `<a_i|` (conjugated variant `<a-bar_i|`).
    pub fn measurement_cell(
        &self,
        basis_name: &str,
        outcome_name: &str,
        conjugated: bool,
    ) -> Result<IndexedTensor> {
        let spec = [(basis_name, self.count()), (outcome_name, self.dim)];
        IndexedTensor::from_fn(&spec, 1, self.dim, |assign| {
            let col = self.bases[assign[0]].column_vec(assign[1]);
            let bra: Vec<Complex64> = if conjugated {
                col
            } else {
                col.iter().map(|z| z.conj()).collect()
            };
            ComplexMatrix::row(&bra)
        })
    }

    /// The controlled preparation cell, the dagger of the measurement cell.
    pub fn encode_cell(
        &self,
        basis_name: &str,
        outcome_name: &str,
        conjugated: bool,
    ) -> Result<IndexedTensor> {
        Ok(self
            .measurement_cell(basis_name, outcome_name, conjugated)?
            .dagger())
    }
}

/// Validated constructor, mirroring the module-level operation name.
pub fn make_family(dim: usize, bases: Vec<ComplexMatrix>) -> Result<ControlledFamily> {
    ControlledFamily::new(dim, bases)
}

/// Worst deviation of |<a_i|b_j>|^2 from 1/m over all vector pairs.
pub fn unbiased_deviation(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    if a.rows() != b.rows() || a.cols() != b.cols() || a.rows() != a.cols() {
        return Err(Error::ShapeMismatch {
            op: "unbiased_deviation",
            lrows: a.rows(),
            lcols: a.cols(),
            rrows: b.rows(),
            rcols: b.cols(),
        });
    }
    let m = a.rows();
    let overlaps = a.dagger().matmul(b)?;
    let target = 1.0 / m as f64;
    let mut worst = 0.0f64;
    for i in 0..m {
        for j in 0..m {
            worst = worst.max((overlaps.get(i, j).norm_sqr() - target).abs());
        }
    }
    Ok(worst)
}

/// Two bases are unbiased when every squared overlap equals 1/m.
pub fn is_unbiased_pair(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Result<bool> {
    Ok(unbiased_deviation(a, b)? <= tol)
}

/// Which characterization of complementarity a report came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Direct,
    Doubled,
    Alpha,
    Reflected,
    Controlled4,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Direct,
        Method::Doubled,
        Method::Alpha,
        Method::Reflected,
        Method::Controlled4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Doubled => "doubled",
            Method::Alpha => "alpha",
            Method::Reflected => "reflected",
            Method::Controlled4 => "controlled4",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Method::Direct),
            "doubled" => Ok(Method::Doubled),
            "alpha" => Ok(Method::Alpha),
            "reflected" => Ok(Method::Reflected),
            "controlled4" => Ok(Method::Controlled4),
            other => Err(Error::Invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Verdict of one complementarity check.
#[derive(Clone, Debug)]
pub struct ComplementarityReport {
    pub method: Method,
    pub passed: bool,
    pub extracted_phase: Option<PhaseCell>,
    pub worst_violation: f64,
    pub witness: Option<Assignment>,
}

/// Pairwise unbiasedness of all distinct bases.
pub fn is_complementary_direct(f: &ControlledFamily, tol: f64) -> ComplementarityReport {
    let mut worst = 0.0f64;
    let mut witness = None;
    for a in 0..f.count() {
        for b in 0..f.count() {
            if a == b {
                continue;
            }
            let dev = unbiased_deviation(f.basis(a), f.basis(b)).expect("validated bases");
            if dev > worst {
                worst = dev;
                witness = Some(vec![("a".to_string(), a), ("b".to_string(), b)]);
            }
        }
    }
    ComplementarityReport {
        method: Method::Direct,
        passed: worst <= tol,
        extracted_phase: None,
        worst_violation: worst,
        witness: if worst <= tol { None } else { witness },
    }
}

/// Measure in basis a, copy the result, encode it back in basis a, then
/// measure in basis b: a tensor over (a, b, i, j) mapping the quantum wire
/// to the scalar outcome, with component `<b_j|a_i><a_i|`.
pub fn build_doubled_lhs(f: &ControlledFamily) -> Result<IndexedTensor> {
    let measure = f.measurement_cell("a", "i", false)?;
    let encode = f.encode_cell("a2", "i2", false)?;
    let remeasure = f.measurement_cell("b", "j", false)?;
    measure
        .compose_quantum(&encode, &[("a", "a2"), ("i", "i2")])?
        .compose_quantum(&remeasure, &[])?
        .permute_to(&["a", "b", "i", "j"])
}

/// Right-hand template of the doubled equation: measure in basis a with the
/// second outcome created uniformly, scaled by 1/sqrt(m).
pub fn build_doubled_template(f: &ControlledFamily) -> Result<IndexedTensor> {
    let scale = 1.0 / (f.dim() as f64).sqrt();
    f.measurement_cell("a", "i", false)?
        .add_uniform_index("b", f.count())?
        .add_uniform_index("j", f.dim())?
        .permute_to(&["a", "b", "i", "j"])
        .map(|t| t.tensor_scale(c(scale, 0.0)))
}

fn phase_report(
    method: Method,
    lhs: &IndexedTensor,
    template: &IndexedTensor,
    tol: f64,
) -> Result<ComplementarityReport> {
    let ext = extract_phase(lhs, template, |assign| assign[0] != assign[1], tol)?;
    Ok(ComplementarityReport {
        method,
        passed: ext.passed(),
        worst_violation: ext.worst_residual.max(ext.worst_unit_deviation),
        witness: if ext.passed() {
            None
        } else {
            ext.worst_assignment.clone()
        },
        extracted_phase: Some(ext.phase),
    })
}

/// The defining equation of a complementary family: the doubled composite
/// must be proportional to the uniform template on the different-value
/// support, with a unit-modulus controlled phase.
pub fn check_doubled(f: &ControlledFamily, tol: f64) -> Result<ComplementarityReport> {
    let lhs = build_doubled_lhs(f)?;
    let template = build_doubled_template(f)?;
    phase_report(Method::Doubled, &lhs, &template, tol)
}

/// The 2-cell alpha: encode outcome i in basis a, measure in basis b,
/// recorded as a scalar per (a, b, i, j).
pub fn build_alpha(f: &ControlledFamily) -> Result<IndexedTensor> {
    let encode = f.encode_cell("a", "i", false)?;
    let measure = f.measurement_cell("b", "j", false)?;
    encode
        .compose_quantum(&measure, &[])?
        .permute_to(&["a", "b", "i", "j"])
}

/// Complementarity through unitarity of alpha: on the different-value
/// support every component of sqrt(m) * alpha must have unit modulus, which
/// is 2-cell unitarity of the connectivity-diagonal alpha.
pub fn check_alpha_unitary(f: &ControlledFamily, tol: f64) -> Result<ComplementarityReport> {
    let alpha = build_alpha(f)?;
    let root_m = (f.dim() as f64).sqrt();
    let mut worst = 0.0f64;
    let mut witness = None;
    for assign in alpha.assignments() {
        if assign[0] == assign[1] {
            continue;
        }
        let dev = (root_m * alpha.component(&assign).get(0, 0).norm() - 1.0).abs();
        if dev > worst {
            worst = dev;
            witness = Some(
                alpha
                    .index_spec()
                    .iter()
                    .map(|(n, _)| n.clone())
                    .zip(assign.iter().copied())
                    .collect(),
            );
        }
    }
    Ok(ComplementarityReport {
        method: Method::Alpha,
        passed: worst <= tol,
        extracted_phase: None,
        worst_violation: worst,
        witness: if worst <= tol { None } else { witness },
    })
}

/// The horizontally reflected equation, built from the conjugate cells and
/// carrying the printed factor 1/sqrt(m); its phase is the dagger of the
/// phase of the unreflected equation.
pub fn check_reflected(f: &ControlledFamily, tol: f64) -> Result<ComplementarityReport> {
    let g = f.conjugate();
    let lhs = build_doubled_lhs(&g)?;
    let template = build_doubled_template(&g)?;
    phase_report(Method::Reflected, &lhs, &template, tol)
}

/// Left side of the four-vertex equation: two parallel encode-measure wires,
/// one of them the dual (conjugated) wire, over indices (a, b, k, j).
pub fn build_controlled4_lhs(f: &ControlledFamily) -> Result<IndexedTensor> {
    let wire = build_alpha(f)?.rename_index("i", "k")?;
    let dual = wire
        .conj()
        .rename_index("a", "a2")?
        .rename_index("b", "b2")?
        .rename_index("k", "k2")?
        .rename_index("j", "j2")?;
    wire.compose_quantum(&dual, &[("a", "a2"), ("b", "b2"), ("k", "k2"), ("j", "j2")])
}

/// Four-vertex formulation: the doubled pair of wires equals 1/m times the
/// disconnected spiders on the different-value support.
pub fn check_controlled4(f: &ControlledFamily, tol: f64) -> Result<ComplementarityReport> {
    let lhs = build_controlled4_lhs(f)?.apply_pd("a", "b")?;
    let m = f.dim();
    let uniform = IndexedTensor::scalar_from_fn(
        &[("a", f.count()), ("b", f.count()), ("k", m), ("j", m)],
        |_| c(1.0 / m as f64, 0.0),
    )?
    .apply_pd("a", "b")?;
    let rep = tensors_equal(&lhs, &uniform, tol)?;
    Ok(ComplementarityReport {
        method: Method::Controlled4,
        passed: rep.equal,
        extracted_phase: None,
        worst_violation: rep.worst_deviation,
        witness: if rep.equal { None } else { rep.witness },
    })
}

/// Run one characterization.
pub fn check_method(
    f: &ControlledFamily,
    method: Method,
    tol: f64,
) -> Result<ComplementarityReport> {
    match method {
        Method::Direct => Ok(is_complementary_direct(f, tol)),
        Method::Doubled => check_doubled(f, tol),
        Method::Alpha => check_alpha_unitary(f, tol),
        Method::Reflected => check_reflected(f, tol),
        Method::Controlled4 => check_controlled4(f, tol),
    }
}

/// Deterministic non-complementary counterexample: rotate vector 0 of basis
/// `1 mod count` towards vector 1 by `angle` inside their 2-plane, then
/// re-orthonormalize that basis by Gram-Schmidt.
pub fn perturbed_family(f: &ControlledFamily, angle: f64) -> Result<ControlledFamily> {
    let which = 1 % f.count();
    let m = f.dim();
    let mut cols: Vec<Vec<Complex64>> = (0..m).map(|i| f.vector(which, i)).collect();
    if m >= 2 {
        let (ca, sa) = (angle.cos(), angle.sin());
        let rotated: Vec<Complex64> = cols[0]
            .iter()
            .zip(&cols[1])
            .map(|(u, v)| u * ca + v * sa)
            .collect();
        cols[0] = rotated;
        // Gram-Schmidt the remaining vectors against the rotated one
        for i in 1..m {
            for j in 0..i {
                let overlap: Complex64 = cols[j]
                    .iter()
                    .zip(&cols[i])
                    .map(|(u, v)| u.conj() * v)
                    .sum();
                let proj: Vec<Complex64> = cols[j].iter().map(|u| u * overlap).collect();
                cols[i] = cols[i].iter().zip(&proj).map(|(v, p)| v - p).collect();
            }
            let norm: f64 = cols[i].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            cols[i] = cols[i].iter().map(|z| z / norm).collect();
        }
    }
    let mut basis = ComplexMatrix::zeros(m, m);
    for (i, col) in cols.iter().enumerate() {
        for (r, z) in col.iter().enumerate() {
            basis.set(r, i, *z);
        }
    }
    let mut bases = f.bases.clone();
    bases[which] = basis;
    ControlledFamily::new(m, bases)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{fourier, hadamard2};

    pub(crate) fn zxy() -> ControlledFamily {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let y = ComplexMatrix::new(2, 2, vec![c(s, 0.0), c(s, 0.0), c(0.0, s), c(0.0, -s)])
            .unwrap();
        ControlledFamily::new(2, vec![ComplexMatrix::identity(2), hadamard2(), y]).unwrap()
    }

    fn zz() -> ControlledFamily {
        ControlledFamily::new(
            2,
            vec![ComplexMatrix::identity(2), ComplexMatrix::identity(2)],
        )
        .unwrap()
    }

    fn mub3() -> ControlledFamily {
        crate::gf::mub_family(3).unwrap()
    }

    #[test]
    fn make_family_validation() {
        assert!(ControlledFamily::new(2, vec![ComplexMatrix::identity(2)]).is_ok());
        assert!(ControlledFamily::new(2, vec![ComplexMatrix::identity(2), hadamard2()]).is_ok());
        let diag = ComplexMatrix::new(
            2,
            2,
            vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(2.0, 0.0)],
        )
        .unwrap();
        assert!(matches!(
            ControlledFamily::new(2, vec![diag]),
            Err(Error::NonUnitaryBasis { index: 0, .. })
        ));
    }

    #[test]
    fn conjugate_family_cases() {
        let real = ControlledFamily::new(2, vec![hadamard2()]).unwrap();
        assert_eq!(real.conjugate(), real);
        let f = zxy();
        assert_eq!(f.conjugate().conjugate(), f);
        // circular basis: conjugation flips each vector's phases entrywise
        let y = f.basis(2).clone();
        let fbar = f.conjugate();
        let ybar = fbar.basis(2);
        for r in 0..2 {
            for col in 0..2 {
                assert_eq!(ybar.get(r, col), y.get(r, col).conj());
            }
        }
    }

    #[test]
    fn measurement_cell_components() {
        let id_family = ControlledFamily::new(2, vec![ComplexMatrix::identity(2)]).unwrap();
        let cell = id_family.measurement_cell("a", "i", false).unwrap();
        for i in 0..2 {
            let comp = cell.component(&[0, i]);
            for col in 0..2 {
                let want = if col == i { 1.0 } else { 0.0 };
                assert_eq!(comp.get(0, col), c(want, 0.0));
            }
        }
        let h_family = ControlledFamily::new(2, vec![hadamard2()]).unwrap();
        let cell = h_family.measurement_cell("a", "i", false).unwrap();
        let comp = cell.component(&[0, 0]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((comp.get(0, 0) - c(s, 0.0)).norm() < 1e-15);
        assert!((comp.get(0, 1) - c(s, 0.0)).norm() < 1e-15);

        // conjugated cell carries the conjugated bras
        let f = zxy();
        let plain = f.measurement_cell("a", "i", false).unwrap();
        let conj = f.measurement_cell("a", "i", true).unwrap();
        for assign in plain.assignments() {
            for col in 0..2 {
                assert_eq!(
                    conj.component(&assign).get(0, col),
                    plain.component(&assign).get(0, col).conj()
                );
            }
        }
    }

    #[test]
    fn measure_then_encode_with_closed_outcome_is_identity() {
        // the unitarity equation: sum_i |a_i><a_i| = id for every basis
        let f = zxy();
        let measure = f.measurement_cell("a", "i", false).unwrap();
        let encode = f.encode_cell("a2", "i2", false).unwrap();
        let composite = measure
            .compose_quantum(&encode, &[("a", "a2"), ("i", "i2")])
            .unwrap()
            .close_index("i")
            .unwrap();
        for a in 0..f.count() {
            let got = composite.component(&[a]);
            assert!(got.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
        }
    }

    #[test]
    fn encode_then_measure_is_outcome_delta() {
        let f = zxy();
        let encode = f.encode_cell("a", "i", false).unwrap();
        let measure = f.measurement_cell("a2", "j", false).unwrap();
        let composite = encode.compose_quantum(&measure, &[("a", "a2")]).unwrap();
        for assign in composite.assignments() {
            let (i, j) = (assign[1], assign[2]);
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((composite.component(&assign).get(0, 0) - c(want, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn unbiased_pairs() {
        let id2 = ComplexMatrix::identity(2);
        assert!(is_unbiased_pair(&id2, &hadamard2(), 1e-12).unwrap());
        assert!(!is_unbiased_pair(&hadamard2(), &hadamard2(), 1e-9).unwrap());
        let id3 = ComplexMatrix::identity(3);
        assert!(is_unbiased_pair(&id3, &fourier(3), 1e-12).unwrap());
        assert!(is_unbiased_pair(&id3, &hadamard2(), 1e-9).is_err());
    }

    #[test]
    fn direct_check_cases() {
        assert!(is_complementary_direct(&zxy(), 1e-9).passed);
        let rep = is_complementary_direct(&zz(), 1e-9);
        assert!(!rep.passed);
        assert_eq!(
            rep.witness.unwrap(),
            vec![("a".to_string(), 0), ("b".to_string(), 1)]
        );
        // singleton family is vacuously complementary
        let single = ControlledFamily::new(2, vec![hadamard2()]).unwrap();
        assert!(is_complementary_direct(&single, 1e-9).passed);
    }

    #[test]
    fn doubled_equation_verdicts() {
        let rep = check_doubled(&zxy(), 1e-9).unwrap();
        assert!(rep.passed, "violation {}", rep.worst_violation);
        let phi = rep.extracted_phase.unwrap();
        // unit modulus everywhere on the a != b support
        for assign in phi.assignments() {
            if assign[0] != assign[1] {
                assert!((phi.value(&assign).norm() - 1.0).abs() < 1e-9);
            }
        }

        assert!(!check_doubled(&zz(), 1e-9).unwrap().passed);
        assert!(check_doubled(&mub3(), 1e-9).unwrap().passed);
    }

    #[test]
    fn extracted_phase_matches_overlaps() {
        // phi(a,b,i,j) = sqrt(m) <b_j|a_i> on the support
        let f = zxy();
        let rep = check_doubled(&f, 1e-9).unwrap();
        let phi = rep.extracted_phase.unwrap();
        let root_m = (f.dim() as f64).sqrt();
        for a in 0..3 {
            for b in 0..3 {
                if a == b {
                    continue;
                }
                for i in 0..2 {
                    for j in 0..2 {
                        let overlap: Complex64 = f
                            .vector(b, j)
                            .iter()
                            .zip(&f.vector(a, i))
                            .map(|(bv, av)| bv.conj() * av)
                            .sum();
                        let want = overlap * root_m;
                        assert!((phi.value(&[a, b, i, j]) - want).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn alpha_components_and_unitarity() {
        let f = zxy();
        let alpha = build_alpha(&f).unwrap();
        // same basis: delta pattern
        for a in 0..3 {
            for i in 0..2 {
                for j in 0..2 {
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!(
                        (alpha.component(&[a, a, i, j]).get(0, 0) - c(want, 0.0)).norm() < 1e-12
                    );
                }
            }
        }
        // distinct bases: every component has modulus 1/sqrt(2)
        for assign in alpha.assignments() {
            if assign[0] != assign[1] {
                let got = alpha.component(&assign).get(0, 0).norm();
                assert!((got - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
            }
        }
        assert!(check_alpha_unitary(&f, 1e-9).unwrap().passed);
        assert!(check_alpha_unitary(&mub3(), 1e-9).unwrap().passed);

        // repeated basis: alpha blocks are 0/1 valued, not unitary after scaling
        let azz = build_alpha(&zz()).unwrap();
        for assign in azz.assignments() {
            let v = azz.component(&assign).get(0, 0);
            assert!(v == Complex64::ZERO || v == Complex64::ONE);
        }
        assert!(!check_alpha_unitary(&zz(), 1e-9).unwrap().passed);

        let bad = perturbed_family(&zxy(), 0.1).unwrap();
        assert!(!check_alpha_unitary(&bad, 1e-9).unwrap().passed);
    }

    #[test]
    fn reflected_equation_and_phase_dagger() {
        let f = zxy();
        let rep = check_reflected(&f, 1e-9).unwrap();
        assert!(rep.passed);
        // the reflected phase is the conjugate of the unreflected one
        let phi = check_doubled(&f, 1e-9).unwrap().extracted_phase.unwrap();
        let phi_r = rep.extracted_phase.unwrap();
        for assign in phi.assignments() {
            if assign[0] != assign[1] {
                assert!((phi_r.value(&assign) - phi.value(&assign).conj()).norm() < 1e-9);
            }
        }

        // substituting the conjugate phase satisfies the reflected equation
        // as a literal tensor identity on the different-value support
        let g = f.conjugate();
        let lhs = build_doubled_lhs(&g).unwrap().apply_pd("a", "b").unwrap();
        let template = build_doubled_template(&g).unwrap();
        let spec: Vec<(&str, usize)> = template
            .index_spec()
            .iter()
            .map(|(n, s)| (n.as_str(), *s))
            .collect();
        let rhs = IndexedTensor::from_fn(&spec, 1, 2, |assign| {
            template
                .component(assign)
                .scale(phi.value(assign).conj())
        })
        .unwrap()
        .apply_pd("a", "b")
        .unwrap();
        assert!(tensors_equal(&lhs, &rhs, 1e-9).unwrap().equal);

        assert!(!check_reflected(&zz(), 1e-9).unwrap().passed);
    }

    #[test]
    fn controlled4_equation() {
        assert!(check_controlled4(&zxy(), 1e-9).unwrap().passed);
        // a bare unbiased pair also satisfies the four-vertex equation
        let zx = ControlledFamily::new(2, vec![ComplexMatrix::identity(2), hadamard2()]).unwrap();
        assert!(check_controlled4(&zx, 1e-9).unwrap().passed);
        assert!(!check_controlled4(&zz(), 1e-9).unwrap().passed);
    }

    #[test]
    fn all_methods_agree_on_small_corpus() {
        let families = [
            zxy(),
            mub3(),
            zz(),
            ControlledFamily::new(2, vec![ComplexMatrix::identity(2), hadamard2()]).unwrap(),
            perturbed_family(&zxy(), 0.1).unwrap(),
        ];
        for f in &families {
            let verdicts: Vec<bool> = Method::ALL
                .iter()
                .map(|m| check_method(f, *m, 1e-9).unwrap().passed)
                .collect();
            assert!(
                verdicts.iter().all(|v| *v == verdicts[0]),
                "disagreement: {verdicts:?}"
            );
        }
    }

    #[test]
    fn perturbed_family_is_valid_but_not_complementary() {
        let bad = perturbed_family(&zxy(), 0.1).unwrap();
        for b in bad.bases() {
            assert!(b.is_unitary(1e-10).unwrap());
        }
        assert!(!is_complementary_direct(&bad, 1e-9).passed);
        // deterministic: same angle gives the same family
        let again = perturbed_family(&zxy(), 0.1).unwrap();
        assert_eq!(bad, again);
    }

    #[test]
    fn doubled_lhs_against_formula_oracle() {
        // component at (a,b,i,j) must equal <b_j|a_i> <a_i| entrywise
        let f = zxy();
        let lhs = build_doubled_lhs(&f).unwrap();
        let want = IndexedTensor::from_fn(
            &[("a", 3), ("b", 3), ("i", 2), ("j", 2)],
            1,
            2,
            |assign| {
                let (a, b, i, j) = (assign[0], assign[1], assign[2], assign[3]);
                let overlap: Complex64 = f
                    .vector(b, j)
                    .iter()
                    .zip(&f.vector(a, i))
                    .map(|(bv, av)| bv.conj() * av)
                    .sum();
                let bra: Vec<Complex64> =
                    f.vector(a, i).iter().map(|z| z.conj() * overlap).collect();
                ComplexMatrix::row(&bra)
            },
        )
        .unwrap();
        assert!(tensors_equal(&lhs, &want, 1e-12).unwrap().equal);
    }
}
