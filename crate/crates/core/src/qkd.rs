//! The BB84 and E91 key-distribution equations and both directions of the
//! equivalence with complementarity.
//!
//! Both protocols evaluate to a scalar tensor over five classical indices:
//! the shared Alice/Bob basis s, Eve's basis e, Alice's bit k, Eve's result
//! m and Bob's result r. On the same-value support (s = e) the equation
//! reduces to the correlated spider pattern for every family; on the
//! different-value support it demands proportionality to the uniform
//! pattern with scalar 1/m and a unit-modulus phase psi.

use crate::diagrams::{extract_phase, tensors_equal, Assignment, IndexedTensor, PhaseCell};
use crate::error::{Error, Result};
use crate::families::ControlledFamily;
use crate::numerics::{c, Complex64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkdProtocol {
    Bb84,
    E91,
}

impl QkdProtocol {
    pub fn name(&self) -> &'static str {
        match self {
            QkdProtocol::Bb84 => "bb84",
            QkdProtocol::E91 => "e91",
        }
    }
}

impl std::str::FromStr for QkdProtocol {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bb84" => Ok(QkdProtocol::Bb84),
            "e91" => Ok(QkdProtocol::E91),
            other => Err(Error::Invalid(format!("unknown protocol `{other}`"))),
        }
    }
}

/// Verdict of one key-distribution check.
#[derive(Clone, Debug)]
pub struct QkdReport {
    pub protocol: QkdProtocol,
    /// Same-value support equals the correlated spider pattern. This holds
    /// for every controlled family; a failure indicates an implementation
    /// bug, not a property of the family.
    pub ps_ok: bool,
    /// Different-value support is proportional to the uniform pattern.
    pub pd_proportional: bool,
    pub psi: Option<PhaseCell>,
    pub psi_unit_modulus: bool,
    pub passed: bool,
    pub worst_violation: f64,
    pub witness: Option<Assignment>,
}

const QKD_ORDER: [&str; 5] = ["s", "e", "k", "m", "r"];

/// Alice encodes her bit k in basis s, Eve measures in basis e (result m)
/// and re-encodes it, Bob measures in basis s (result r). Scalar component
/// `<e_m|s_k><s_r|e_m>` over (s, e, k, m, r).
pub fn build_bb84_lhs(f: &ControlledFamily) -> Result<IndexedTensor> {
    let alice_prep = f.encode_cell("s", "k", false)?;
    let eve_measure = f.measurement_cell("e", "m", false)?;
    let eve_prep = f.encode_cell("e2", "m2", false)?;
    let bob_measure = f.measurement_cell("s2", "r", false)?;
    let first_leg = alice_prep.compose_quantum(&eve_measure, &[])?;
    let second_leg = eve_prep.compose_quantum(&bob_measure, &[])?;
    first_leg
        .compose_quantum(&second_leg, &[("e", "e2"), ("m", "m2"), ("s", "s2")])?
        .permute_to(&QKD_ORDER)
}

/// As BB84 with Alice's branch replaced by the entangled pair followed by
/// her controlled measurement on the kept leg. The bent wire makes Alice's
/// vertex the mirrored (conjugate) measurement, so the composite evaluates
/// to exactly the BB84 tensor for every family.
pub fn build_e91_lhs(f: &ControlledFamily) -> Result<IndexedTensor> {
    let m = f.dim();
    let pair = IndexedTensor::cup(m);
    // Alice measures the first wire of the pair
    let alice = f.measurement_cell("s", "k", true)?.quantum_kron_right(m);
    let to_eve = pair.compose_quantum(&alice, &[])?;
    let eve_measure = f.measurement_cell("e", "m", false)?;
    let eve_prep = f.encode_cell("e2", "m2", false)?;
    let bob_measure = f.measurement_cell("s2", "r", false)?;
    let second_leg = eve_prep.compose_quantum(&bob_measure, &[])?;
    to_eve
        .compose_quantum(&eve_measure, &[])?
        .compose_quantum(&second_leg, &[("e", "e2"), ("m", "m2"), ("s", "s2")])?
        .permute_to(&QKD_ORDER)
}

fn qkd_spec(f: &ControlledFamily) -> [(String, usize); 5] {
    let n = f.count();
    let m = f.dim();
    [
        ("s".to_string(), n),
        ("e".to_string(), n),
        ("k".to_string(), m),
        ("m".to_string(), m),
        ("r".to_string(), m),
    ]
}

fn check_psi_spec(f: &ControlledFamily, psi: &PhaseCell) -> Result<()> {
    let want = qkd_spec(f);
    let got = psi.index_spec();
    if got.len() != want.len() || got.iter().zip(&want).any(|(g, w)| g.1 != w.1) {
        return Err(Error::IndexSpecMismatch {
            op: "psi",
            detail: format!("expected sizes {want:?}, got {got:?}"),
        });
    }
    Ok(())
}

/// The correlated same-value pattern: one when s = e and k = m = r.
pub fn build_ps_pattern(f: &ControlledFamily) -> Result<IndexedTensor> {
    let spec = qkd_spec(f);
    let refs: Vec<(&str, usize)> = spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    IndexedTensor::scalar_from_fn(&refs, |a| {
        if a[0] == a[1] && a[2] == a[3] && a[3] == a[4] {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

/// The uniform different-value template carrying the scalar 1/m.
pub fn build_pd_template(f: &ControlledFamily) -> Result<IndexedTensor> {
    let spec = qkd_spec(f);
    let refs: Vec<(&str, usize)> = spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let v = c(1.0 / f.dim() as f64, 0.0);
    IndexedTensor::scalar_from_fn(&refs, |_| v)
}

/// Right-hand side of the key-distribution equation for a given phase:
/// (1/m) psi on the different-value support plus the correlated pattern on
/// the same-value support.
pub fn build_bb84_rhs(f: &ControlledFamily, psi: &PhaseCell) -> Result<IndexedTensor> {
    check_psi_spec(f, psi)?;
    let spec = qkd_spec(f);
    let refs: Vec<(&str, usize)> = spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    let inv_m = 1.0 / f.dim() as f64;
    IndexedTensor::scalar_from_fn(&refs, |a| {
        if a[0] != a[1] {
            psi.value(a) * inv_m
        } else if a[2] == a[3] && a[3] == a[4] {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    })
}

fn check_protocol(
    f: &ControlledFamily,
    protocol: QkdProtocol,
    lhs: &IndexedTensor,
    tol: f64,
) -> Result<QkdReport> {
    // same-value support: must equal the correlated pattern for any family
    let ps_lhs = lhs.apply_ps("s", "e")?;
    let ps_pattern = build_ps_pattern(f)?.apply_ps("s", "e")?;
    let ps = tensors_equal(&ps_lhs, &ps_pattern, tol)?;

    // different-value support: extract the phase against the 1/m template
    let template = build_pd_template(f)?;
    let ext = extract_phase(lhs, &template, |a| a[0] != a[1], tol)?;

    let passed = ps.equal && ext.proportional && ext.all_unit_modulus;
    let worst_pd = ext.worst_residual.max(ext.worst_unit_deviation);
    let worst_violation = ps.worst_deviation.max(worst_pd);
    let witness = if passed {
        None
    } else if !ps.equal && ps.worst_deviation >= worst_pd {
        ps.witness
    } else {
        ext.worst_assignment.clone()
    };
    Ok(QkdReport {
        protocol,
        ps_ok: ps.equal,
        pd_proportional: ext.proportional,
        psi: Some(ext.phase),
        psi_unit_modulus: ext.all_unit_modulus,
        passed,
        worst_violation,
        witness,
    })
}

/// Check the BB84 equation; passes exactly for complementary families.
pub fn check_bb84(f: &ControlledFamily, tol: f64) -> Result<QkdReport> {
    let lhs = build_bb84_lhs(f)?;
    check_protocol(f, QkdProtocol::Bb84, &lhs, tol)
}

/// Check the E91 equation; agrees with the BB84 verdict on every family.
pub fn check_e91(f: &ControlledFamily, tol: f64) -> Result<QkdReport> {
    let lhs = build_e91_lhs(f)?;
    check_protocol(f, QkdProtocol::E91, &lhs, tol)
}

/// Assemble the key-distribution phase from the complementarity phase:
/// psi(s,e,k,m,r) = phi(s,e,k,m) * conj(phi(s,e,r,m)). Unit modulus is
/// inherited from phi.
pub fn psi_from_phi(f: &ControlledFamily, phi: &PhaseCell) -> Result<PhaseCell> {
    let got = phi.index_spec();
    let n = f.count();
    let m = f.dim();
    let want = [n, n, m, m];
    if got.len() != 4 || got.iter().zip(&want).any(|(g, w)| g.1 != *w) {
        return Err(Error::IndexSpecMismatch {
            op: "psi_from_phi",
            detail: format!("expected index sizes {want:?}, got {got:?}"),
        });
    }
    let spec = qkd_spec(f);
    let refs: Vec<(&str, usize)> = spec.iter().map(|(n, s)| (n.as_str(), *s)).collect();
    PhaseCell::from_fn(&refs, |a| {
        let (s, e, k, mm, r) = (a[0], a[1], a[2], a[3], a[4]);
        phi.value(&[s, e, k, mm]) * phi.value(&[s, e, r, mm]).conj()
    })
}

/// Outcome of the alpha-dagger-alpha identity check.
#[derive(Clone, Debug)]
pub struct AlphaIdentityReport {
    pub holds: bool,
    pub worst_violation: f64,
    pub witness: Option<Assignment>,
}

/// Given a phase from a passing key-distribution check, the normalized
/// composite alpha-dagger-alpha equals the identity pattern on the
/// different-value support: psi(a,b,i,j,i) = 1 for all a != b.
pub fn check_alpha_identity(
    f: &ControlledFamily,
    psi: &PhaseCell,
    tol: f64,
) -> Result<AlphaIdentityReport> {
    check_psi_spec(f, psi)?;
    let n = f.count();
    let m = f.dim();
    let spec = [("a", n), ("b", n), ("i", m), ("j", m)];
    let via_psi =
        IndexedTensor::scalar_from_fn(&spec, |a| psi.value(&[a[0], a[1], a[2], a[3], a[2]]))?
            .apply_pd("a", "b")?;
    let identity_pattern =
        IndexedTensor::scalar_from_fn(&spec, |_| Complex64::ONE)?.apply_pd("a", "b")?;
    let rep = tensors_equal(&via_psi, &identity_pattern, tol)?;
    Ok(AlphaIdentityReport {
        holds: rep.equal,
        worst_violation: rep.worst_deviation,
        witness: if rep.equal { None } else { rep.witness },
    })
}
