//! Bent certification: per-point Walsh verdicts, dual extraction,
//! regularity classification, self-duality, and the structural identities
//! every generalized bent function must satisfy at runtime.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::cyclotomic::{recognize_bent_value_with, CycInt};
use crate::domain::DomainSpec;
use crate::error::{Error, Result};
use crate::gfunction::GFunction;
use crate::walsh::{dft_stages, walsh_full_fast, Direction, WalshSpectrum};
use std::sync::Arc;

/// The unit ξ in the bent Walsh shape W(a) = ε(a)·ξ·p^{n/2}·zeta^{f*(a)}:
/// 1 unless p = 3 mod 4 and n is odd, in which case it is √-1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XiCase {
    One,
    I,
}

impl XiCase {
    pub fn for_params(p: u64, n: usize) -> XiCase {
        if p % 4 == 3 && n % 2 == 1 {
            XiCase::I
        } else {
            XiCase::One
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            XiCase::One => "xi=1",
            XiCase::I => "xi=i",
        }
    }
}

/// A unit in {±1, ±i}: the value of μ_f for weakly regular functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MuUnit {
    pub sign: i8,
    pub imaginary: bool,
}

impl MuUnit {
    pub fn new(sign: i8, imaginary: bool) -> MuUnit {
        debug_assert!(sign == 1 || sign == -1);
        MuUnit { sign, imaginary }
    }

    pub fn one() -> MuUnit {
        MuUnit::new(1, false)
    }

    /// (±1)^{-1} = ±1, (±i)^{-1} = ∓i.
    pub fn inverse(&self) -> MuUnit {
        if self.imaginary {
            MuUnit::new(-self.sign, true)
        } else {
            *self
        }
    }

    pub fn as_str(&self) -> &'static str {
        match (self.sign, self.imaginary) {
            (1, false) => "+1",
            (-1, false) => "-1",
            (1, true) => "+i",
            (-1, true) => "-i",
            _ => unreachable!(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Regularity {
    /// μ_f = 1 everywhere.
    Regular,
    /// μ_f constant but not 1.
    WeaklyRegular(MuUnit),
    /// ε_f takes both signs.
    NonWeaklyRegular,
}

/// The outcome of analyzing one function: per-point signs and dual values
/// when bent, the failing points when not.
#[derive(Debug, Clone)]
pub struct BentCertificate {
    pub p: u64,
    pub k: u32,
    pub n: usize,
    pub spec_string: String,
    pub is_gbent: bool,
    pub xi: XiCase,
    /// ε_f(a) in {±1}; 0 at points where recognition failed.
    pub epsilon: Vec<i8>,
    /// f*(a); 0 at points where recognition failed (see `failures`).
    pub dual_values: Vec<u64>,
    /// Present iff gbent.
    pub regularity: Option<Regularity>,
    /// Points whose Walsh value is not of bent shape.
    pub failures: Vec<u64>,
}

impl BentCertificate {
    pub fn mu(&self) -> Option<MuUnit> {
        match self.regularity {
            Some(Regularity::Regular) => Some(MuUnit::one()),
            Some(Regularity::WeaklyRegular(u)) => Some(u),
            _ => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let regularity = match &self.regularity {
            Some(Regularity::Regular) => Value::from("regular"),
            Some(Regularity::WeaklyRegular(_)) => Value::from("weakly_regular"),
            Some(Regularity::NonWeaklyRegular) => Value::from("non_weakly_regular"),
            None => Value::Null,
        };
        json!({
            "p": self.p,
            "k": self.k,
            "n": self.n,
            "spec": self.spec_string,
            "is_gbent": self.is_gbent,
            "xi_case": self.xi.as_str(),
            "regularity": regularity,
            "mu": self.mu().map(|u| u.as_str()),
            "dual_table": self.dual_values,
            "epsilon_table": self.epsilon,
            "failures": self.failures,
        })
    }
}

/// Runs the fast transform and recognizes every point. Failures do not
/// raise; they are recorded in the certificate.
pub fn analyze(f: &GFunction) -> BentCertificate {
    analyze_with_spectrum(f).0
}

/// As [`analyze`], also handing back the spectrum for callers that need it.
pub fn analyze_with_spectrum(f: &GFunction) -> (BentCertificate, WalshSpectrum) {
    let spectrum = walsh_full_fast(f);
    let cert = certificate_from_spectrum(f, &spectrum);
    (cert, spectrum)
}

fn certificate_from_spectrum(f: &GFunction, spectrum: &WalshSpectrum) -> BentCertificate {
    let spec = f.spec();
    let p = spec.p();
    let n = spec.n();
    let k = f.k();
    let xi = XiCase::for_params(p, n);
    let gauss = if n % 2 == 1 { Some(CycInt::gauss_sum(p, k)) } else { None };
    let verdicts: Vec<Option<(i8, u64)>> = spectrum
        .values()
        .par_iter()
        .map(|w| recognize_bent_value_with(w, n, gauss.as_ref()))
        .collect();
    let mut epsilon = vec![0i8; verdicts.len()];
    let mut dual_values = vec![0u64; verdicts.len()];
    let mut failures = Vec::new();
    for (a, v) in verdicts.iter().enumerate() {
        match v {
            Some((eps, c)) => {
                epsilon[a] = *eps;
                dual_values[a] = *c;
            }
            None => failures.push(a as u64),
        }
    }
    let is_gbent = failures.is_empty();
    let regularity = if is_gbent {
        if epsilon.iter().all(|&e| e == epsilon[0]) {
            let mu = MuUnit::new(epsilon[0], xi == XiCase::I);
            if mu == MuUnit::one() {
                Some(Regularity::Regular)
            } else {
                Some(Regularity::WeaklyRegular(mu))
            }
        } else {
            Some(Regularity::NonWeaklyRegular)
        }
    } else {
        None
    };
    BentCertificate {
        p,
        k,
        n,
        spec_string: spec.spec_string(),
        is_gbent,
        xi,
        epsilon,
        dual_values,
        regularity,
        failures,
    }
}

/// The dual f* as a function table. Errors when f is not generalized bent.
pub fn dual(f: &GFunction) -> Result<GFunction> {
    let cert = analyze(f);
    dual_from_certificate(f, &cert)
}

pub fn dual_from_certificate(f: &GFunction, cert: &BentCertificate) -> Result<GFunction> {
    if !cert.is_gbent {
        return Err(Error::NotGbent { failures: cert.failures.len() });
    }
    GFunction::new(f.spec().clone(), f.k(), cert.dual_values.clone())
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelfDuality {
    SelfDual,
    /// Bent, but f* differs from f; the first differing point is recorded.
    DiffersAt(u64),
    NotGbent,
}

impl SelfDuality {
    pub fn is_self_dual(&self) -> bool {
        matches!(self, SelfDuality::SelfDual)
    }
}

pub fn is_self_dual(f: &GFunction) -> SelfDuality {
    let cert = analyze(f);
    self_duality_from_certificate(f, &cert)
}

pub fn self_duality_from_certificate(f: &GFunction, cert: &BentCertificate) -> SelfDuality {
    if !cert.is_gbent {
        return SelfDuality::NotGbent;
    }
    match f.values().iter().zip(&cert.dual_values).position(|(a, b)| a != b) {
        None => SelfDuality::SelfDual,
        Some(x) => SelfDuality::DiffersAt(x as u64),
    }
}

/// Result of a pointwise structural check.
#[derive(Debug, Clone)]
pub struct CheckReport {
    pub holds: bool,
    pub checked: u64,
    pub violations: Vec<u64>,
}

impl CheckReport {
    fn from_violations(checked: u64, violations: Vec<u64>) -> CheckReport {
        CheckReport { holds: violations.is_empty(), checked, violations }
    }

    pub fn to_json(&self) -> Value {
        json!({ "holds": self.holds, "checked": self.checked, "violations": self.violations })
    }
}

/// Verifies f**(-x) = f(x) at every point, for f whose dual is again
/// generalized bent. A violation falsifies the implementation, not the
/// identity.
pub fn check_theorem3(f: &GFunction) -> Result<CheckReport> {
    let cert = analyze(f);
    if !cert.is_gbent {
        return Err(Error::Inapplicable("function is not generalized bent".into()));
    }
    let d = dual_from_certificate(f, &cert)?;
    let cert2 = analyze(&d);
    if !cert2.is_gbent {
        return Err(Error::Inapplicable("dual is not generalized bent".into()));
    }
    let spec = f.spec();
    let violations: Vec<u64> = (0..spec.size())
        .filter(|&x| cert2.dual_values[spec.negate_index(x) as usize] != f.value(x))
        .collect();
    Ok(CheckReport::from_violations(spec.size(), violations))
}

/// For even functions (f(x) = f(-x)): both ε_f and f* must be even too.
pub fn check_eq14(f: &GFunction) -> Result<CheckReport> {
    if !f.is_even() {
        return Err(Error::Inapplicable("f(x) = f(-x) does not hold".into()));
    }
    let cert = analyze(f);
    if !cert.is_gbent {
        return Err(Error::Inapplicable("function is not generalized bent".into()));
    }
    let spec = f.spec();
    let violations: Vec<u64> = (0..spec.size())
        .filter(|&a| {
            let na = spec.negate_index(a) as usize;
            cert.epsilon[a as usize] != cert.epsilon[na]
                || cert.dual_values[a as usize] != cert.dual_values[na]
        })
        .collect();
    Ok(CheckReport::from_violations(spec.size(), violations))
}

/// The sign relation at 0 for even gbent functions with gbent dual:
/// ε_{f*}(0) = ε_f(0) when ξ = 1, and ε_{f*}(0) = -ε_f(0) when ξ = i.
#[derive(Debug, Clone)]
pub struct Prop1Report {
    pub xi: XiCase,
    pub eps_f_at_zero: i8,
    pub eps_dual_at_zero: i8,
    pub holds: bool,
}

pub fn check_prop1(f: &GFunction) -> Result<Prop1Report> {
    if !f.is_even() {
        return Err(Error::Inapplicable("f(x) = f(-x) does not hold".into()));
    }
    let cert = analyze(f);
    if !cert.is_gbent {
        return Err(Error::Inapplicable("function is not generalized bent".into()));
    }
    let d = dual_from_certificate(f, &cert)?;
    let cert2 = analyze(&d);
    if !cert2.is_gbent {
        return Err(Error::Inapplicable("dual is not generalized bent".into()));
    }
    let eps_f_at_zero = cert.epsilon[0];
    let eps_dual_at_zero = cert2.epsilon[0];
    let holds = match cert.xi {
        XiCase::One => eps_dual_at_zero == eps_f_at_zero,
        XiCase::I => eps_dual_at_zero == -eps_f_at_zero,
    };
    Ok(Prop1Report { xi: cert.xi, eps_f_at_zero, eps_dual_at_zero, holds })
}

/// The exact inversion identity behind the dual: for every x,
/// ξ·Σ_a ε(a)·zeta_{p^k}^{f*(a)}·zeta_p^{<a,x>} = p^{n/2}·zeta_{p^k}^{f(x)}.
/// Even n is checked directly; odd n is first multiplied through by the
/// Gauss sum so both sides stay inside the ring.
pub fn eq6_identity_holds(f: &GFunction, cert: &BentCertificate) -> bool {
    assert!(cert.is_gbent, "identity only applies to gbent functions");
    let spec = f.spec();
    let p = spec.p();
    let k = f.k();
    let n = spec.n();
    let perm = spec.dual_permutation();
    let mut buf = vec![CycInt::zero(p, k); spec.size() as usize];
    for a in 0..spec.size() as usize {
        let mut v = CycInt::zero(p, k);
        v.add_root(cert.dual_values[a], cert.epsilon[a] as i64);
        buf[perm[a] as usize] = v;
    }
    let s = dft_stages(spec, buf, Direction::Backward);
    if n % 2 == 0 {
        let scale = BigInt::from(p).pow((n / 2) as u32);
        (0..spec.size() as usize).into_par_iter().all(|x| {
            s[x] == CycInt::root(p, k, f.value(x as u64)).scale(scale.clone())
        })
    } else {
        let gauss = CycInt::gauss_sum(p, k);
        let scale = BigInt::from(p).pow(((n + 1) / 2) as u32);
        (0..spec.size() as usize).into_par_iter().all(|x| {
            let lhs = gauss.mul(&s[x]).expect("same ring");
            lhs == CycInt::root(p, k, f.value(x as u64)).scale(scale.clone())
        })
    }
}

/// Everything found by an exhaustive self-dual search.
#[derive(Debug, Clone)]
pub struct SelfDualSearch {
    pub examined: u128,
    pub witnesses: Vec<Vec<u64>>,
}

impl SelfDualSearch {
    pub fn to_json(&self) -> Value {
        json!({
            "examined": self.examined.to_string(),
            "witness_count": self.witnesses.len(),
            "witnesses": self.witnesses,
        })
    }
}

/// Enumerates every value table V_n -> Z_{p^k} in lexicographic order and
/// returns all self-dual generalized bent functions. Refuses when the
/// function count exceeds `budget`.
pub fn search_self_dual(spec: &Arc<DomainSpec>, k: u32, budget: u128) -> Result<SelfDualSearch> {
    let p = spec.p();
    let modulus = p.pow(k);
    let size = spec.size() as usize;
    let required = (modulus as u128)
        .checked_pow(size as u32)
        .ok_or(Error::Budget { required: u128::MAX, budget })?;
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    let mut table = vec![0u64; size];
    let mut witnesses = Vec::new();
    let mut examined: u128 = 0;
    loop {
        examined += 1;
        let f = GFunction::new(spec.clone(), k, table.clone())?;
        let cert = analyze(&f);
        if cert.is_gbent && self_duality_from_certificate(&f, &cert).is_self_dual() {
            witnesses.push(table.clone());
        }
        // odometer, last entry fastest
        let mut pos = size;
        loop {
            if pos == 0 {
                return Ok(SelfDualSearch { examined, witnesses });
            }
            pos -= 1;
            table[pos] += 1;
            if table[pos] < modulus {
                break;
            }
            table[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Block;
    use crate::field::ExtField;

    fn dot1(p: u64) -> Arc<DomainSpec> {
        DomainSpec::new(p, vec![Block::Dot(1)]).unwrap()
    }

    fn field_domain(p: u64, poly: Vec<u64>) -> (Arc<ExtField>, Arc<DomainSpec>) {
        let f = Arc::new(ExtField::new(p, poly).unwrap());
        let s = DomainSpec::new(p, vec![Block::Field(f.clone())]).unwrap();
        (f, s)
    }

    fn quadratic(field: &Arc<ExtField>, spec: &Arc<DomainSpec>, alpha: &crate::field::FieldElem) -> GFunction {
        GFunction::build(spec, 1, |i| {
            let x = field.elem_from_index(i);
            field.trace(&field.mul(alpha, &field.square(&x)))
        })
        .unwrap()
    }

    #[test]
    fn quadratic_f25_regular_and_weakly_regular() {
        let (field, spec) = field_domain(5, vec![2, 4, 1]);
        // mu = (-1)^{m-1} eps^m eta(alpha) with m = 2, p = 1 mod 4:
        // alpha = z (non-square): mu = +1 -> regular
        let f = quadratic(&field, &spec, &field.generator());
        let cert = analyze(&f);
        assert!(cert.is_gbent);
        assert_eq!(cert.xi, XiCase::One);
        assert_eq!(cert.regularity, Some(Regularity::Regular));
        assert!(eq6_identity_holds(&f, &cert));
        // alpha = z^2 (square): mu = -1 -> weakly regular, not regular
        let g = quadratic(&field, &spec, &field.gen_pow(2));
        let cert_g = analyze(&g);
        assert_eq!(
            cert_g.regularity,
            Some(Regularity::WeaklyRegular(MuUnit::new(-1, false)))
        );
    }

    #[test]
    fn quadratic_f27_imaginary_mu_and_dual_inverse() {
        // p = 3, m = 3 odd: xi = i. mu = (-1)^2 i^3 eta(1) = -i for alpha = 1.
        let (field, spec) = field_domain(3, vec![1, 2, 0, 1]);
        let f = quadratic(&field, &spec, &field.one());
        let cert = analyze(&f);
        assert!(cert.is_gbent);
        assert_eq!(cert.xi, XiCase::I);
        assert_eq!(cert.regularity, Some(Regularity::WeaklyRegular(MuUnit::new(-1, true))));
        assert!(eq6_identity_holds(&f, &cert));
        // dual of a weakly regular function has mu^{-1}
        let d = dual_from_certificate(&f, &cert).unwrap();
        let cert_d = analyze(&d);
        assert_eq!(cert_d.mu(), Some(MuUnit::new(-1, true).inverse()));
    }

    #[test]
    fn self_dual_quadratic_mod_25() {
        // f(x) = 5x^2 over F_5 with k = 2 is self-dual gbent.
        let spec = dot1(5);
        let f = GFunction::build(&spec, 2, |x| 5 * (x * x % 5)).unwrap();
        assert!(is_self_dual(&f).is_self_dual());
        // and x^2 itself at k = 1: dual(x^2) = -x^2/4 = x^2 mod 5
        let g = GFunction::build(&spec, 1, |x| x * x % 5).unwrap();
        assert!(is_self_dual(&g).is_self_dual());
    }

    #[test]
    fn non_bent_function_gets_failure_points() {
        let spec = dot1(3);
        let f = GFunction::build(&spec, 1, |_| 0).unwrap();
        let cert = analyze(&f);
        assert!(!cert.is_gbent);
        assert!(!cert.failures.is_empty());
        assert_eq!(cert.regularity, None);
        assert!(matches!(dual(&f), Err(Error::NotGbent { .. })));
        assert_eq!(is_self_dual(&f), SelfDuality::NotGbent);
    }

    #[test]
    fn theorem3_on_quadratics() {
        let (field, spec) = field_domain(3, vec![1, 2, 0, 1]);
        let f = quadratic(&field, &spec, &field.generator());
        let report = check_theorem3(&f).unwrap();
        assert!(report.holds, "violations at {:?}", report.violations);
    }

    #[test]
    fn eq14_on_even_functions() {
        let (field, spec) = field_domain(3, vec![1, 2, 0, 1]);
        let f = quadratic(&field, &spec, &field.one());
        assert!(check_eq14(&f).unwrap().holds);
        // a function with a linear term is not even: inapplicable
        let spec2 = dot1(5);
        let g = GFunction::build(&spec2, 1, |x| (x * x + x) % 5).unwrap();
        assert!(matches!(check_eq14(&g), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn prop1_sign_relation() {
        // p = 5 (xi = 1): equality of signs at zero
        let (field5, spec5) = field_domain(5, vec![2, 4, 1]);
        let f = quadratic(&field5, &spec5, &field5.generator());
        let r = check_prop1(&f).unwrap();
        assert_eq!(r.xi, XiCase::One);
        assert!(r.holds);
        // p = 3, n odd (xi = i): opposite signs at zero
        let (field3, spec3) = field_domain(3, vec![1, 2, 0, 1]);
        let g = quadratic(&field3, &spec3, &field3.generator());
        let r = check_prop1(&g).unwrap();
        assert_eq!(r.xi, XiCase::I);
        assert!(r.holds);
    }

    #[test]
    fn exhaustive_search_small() {
        // no self-dual bent functions among all 27 maps F_3 -> F_3
        let spec = dot1(3);
        let s = search_self_dual(&spec, 1, 1 << 20).unwrap();
        assert_eq!(s.examined, 27);
        assert!(s.witnesses.is_empty());
        // budget refusal
        assert!(matches!(
            search_self_dual(&spec, 2, 10),
            Err(Error::Budget { required: 729, .. })
        ));
        // p = 5: x^2 shows up among the self-dual witnesses
        let spec5 = dot1(5);
        let s5 = search_self_dual(&spec5, 1, 5_000).unwrap();
        assert_eq!(s5.examined, 3125);
        assert!(s5.witnesses.contains(&vec![0, 1, 4, 4, 1]));
    }
}
