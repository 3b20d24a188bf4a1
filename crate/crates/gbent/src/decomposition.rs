//! Component families of generalized functions: for k >= 2 and a selector
//! F: F_p^{k-1} -> F_p, the p-ary component g_{f,F} = f_0 + F(f_1, ..., f_{k-1})
//! built from the digit decomposition. A function is generalized bent exactly
//! when every component is bent, its dual decomposes as
//! f* = f_0*·p^{k-1} + λ, and the component duals are f_0* + F(λ_1, ..., λ_{k-1}).
//!
//! Selector tables are indexed by the tail value Σ_{i>=1} f_i·p^{k-1-i}, so
//! the tuple (f_1(x), ..., f_{k-1}(x)) is looked up at f(x) mod p^{k-1}.
//! Enumeration over all p^{p^{k-1}} selectors is guarded by an explicit
//! budget; only tiny (p, k) are enumerable and the refusal names the count.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::analysis::{analyze, dual_from_certificate};
use crate::cyclotomic::CycInt;
use crate::error::{Error, Result};
use crate::gfunction::GFunction;
use crate::walsh::walsh_full_fast;

/// g_{f,F} = f_0 + F(f_1, ..., f_{k-1}) as a k = 1 function on the same
/// domain. The selector is a full table over F_p^{k-1}, indexed by tail
/// value.
pub fn component_function(f: &GFunction, selector: &[u64]) -> Result<GFunction> {
    let p = f.p();
    if f.k() < 2 {
        return Err(Error::Domain("component functions need k >= 2".into()));
    }
    let arity = p.pow(f.k() - 1);
    if selector.len() as u64 != arity {
        return Err(Error::Domain(format!(
            "selector table has {} entries, expected p^(k-1) = {arity}",
            selector.len()
        )));
    }
    if selector.iter().any(|&v| v >= p) {
        return Err(Error::Domain("selector values must lie in [0, p)".into()));
    }
    let d = f.decompose();
    let values = (0..f.spec().size() as usize)
        .map(|x| (d.digits[0][x] + selector[d.tail[x] as usize]) % p)
        .collect();
    GFunction::new(f.spec().clone(), 1, values)
}

/// All selector tables F_p^{k-1} -> F_p in lexicographic order. The count is
/// p^{p^{k-1}}; callers must budget-check first.
fn enumerate_selectors(p: u64, k: u32) -> Vec<Vec<u64>> {
    let arity = p.pow(k - 1) as usize;
    let mut cur = vec![0u64; arity];
    let mut out = Vec::new();
    loop {
        out.push(cur.clone());
        let mut pos = arity;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            cur[pos] += 1;
            if cur[pos] < p {
                break;
            }
            cur[pos] = 0;
        }
    }
}

fn selector_budget(p: u64, k: u32, budget: u128) -> Result<u128> {
    let arity = p.pow(k - 1);
    let required = (p as u128)
        .checked_pow(arity as u32)
        .ok_or(Error::Budget { required: u128::MAX, budget })?;
    if required > budget {
        return Err(Error::Budget { required, budget });
    }
    Ok(required)
}

/// Outcome of enumerating all components of one function.
#[derive(Debug, Clone)]
pub struct Lemma1Report {
    /// False when k = 1 (nothing to decompose).
    pub applicable: bool,
    pub f_is_gbent: bool,
    pub selectors_checked: u64,
    /// A selector whose component is not bent, when one exists.
    pub non_bent_selector: Option<Vec<u64>>,
    /// f gbent <=> every component bent, as observed.
    pub consistent: bool,
}

impl Lemma1Report {
    pub fn to_json(&self) -> Value {
        json!({
            "applicable": self.applicable,
            "f_is_gbent": self.f_is_gbent,
            "selectors_checked": self.selectors_checked,
            "non_bent_selector": self.non_bent_selector,
            "consistent": self.consistent,
        })
    }
}

/// Verifies, by full enumeration of selectors, that f is generalized bent
/// exactly when every component g_{f,F} is bent.
pub fn check_lemma1(f: &GFunction, budget: u128) -> Result<Lemma1Report> {
    if f.k() == 1 {
        return Ok(Lemma1Report {
            applicable: false,
            f_is_gbent: analyze(f).is_gbent,
            selectors_checked: 0,
            non_bent_selector: None,
            consistent: true,
        });
    }
    selector_budget(f.p(), f.k(), budget)?;
    let f_is_gbent = analyze(f).is_gbent;
    let selectors = enumerate_selectors(f.p(), f.k());
    let non_bent: Option<Vec<u64>> = selectors
        .par_iter()
        .find_map_any(|sel| {
            let g = component_function(f, sel).expect("selector arity by construction");
            if analyze(&g).is_gbent {
                None
            } else {
                Some(sel.clone())
            }
        });
    let consistent = f_is_gbent == non_bent.is_none();
    Ok(Lemma1Report {
        applicable: true,
        f_is_gbent,
        selectors_checked: selectors.len() as u64,
        non_bent_selector: non_bent,
        consistent,
    })
}

/// The dual's digit tail λ with f* = f_0*·p^{k-1} + λ, recovered from the
/// level structure of the partial character sums and cross-checked against
/// the extracted dual.
#[derive(Debug, Clone)]
pub struct DualDecomposition {
    /// λ(a) in Z_{p^{k-1}} per point.
    pub lambda: Vec<u64>,
    /// λ_1, ..., λ_{k-1}: base-p digits of λ, most significant first.
    pub digits: Vec<Vec<u64>>,
}

/// For each a, the partial sums Σ_{x: tail(x) = v} zeta_p^{f_0(x) - <a,x>}
/// must vanish at every level except one, which carries the whole of
/// W_{f_0}(a); that level is λ(a). Costs p^n per point — a validation tool,
/// not a hot path.
pub fn extract_lambda(f: &GFunction) -> Result<DualDecomposition> {
    let spec = f.spec();
    let p = spec.p();
    let k = f.k();
    if k < 2 {
        return Err(Error::Domain("lambda extraction needs k >= 2".into()));
    }
    let cert = analyze(f);
    if !cert.is_gbent {
        return Err(Error::NotGbent { failures: cert.failures.len() });
    }
    let d = f.decompose();
    let f0 = GFunction::new(spec.clone(), 1, d.digits[0].clone())?;
    let w0 = walsh_full_fast(&f0);
    let levels = p.pow(k - 1) as usize;
    let size = spec.size() as usize;
    let x_digits: Vec<Vec<u64>> = (0..size as u64).map(|x| spec.index_digits(x)).collect();
    let tail_mod = p.pow(k - 1);

    let lambda: Vec<u64> = (0..size as u64)
        .into_par_iter()
        .map(|a| {
            let t = spec.index_digits(spec.dual_index(a));
            let mut sums = vec![CycInt::zero(p, 1); levels];
            for x in 0..size {
                let ip: u64 = t.iter().zip(&x_digits[x]).map(|(u, v)| u * v).sum::<u64>() % p;
                let e = (d.digits[0][x] + p - ip) % p;
                sums[d.tail[x] as usize].add_root(e, 1);
            }
            let nonzero: Vec<usize> = (0..levels).filter(|&v| !sums[v].is_zero()).collect();
            match nonzero.as_slice() {
                [v] if sums[*v] == *w0.value(a) => Ok(*v as u64),
                _ => Err(Error::Domain(format!(
                    "level sums at point {a} violate the decomposition invariant; \
                     the input was not generalized bent"
                ))),
            }
        })
        .collect::<Result<Vec<u64>>>()?;

    // λ must be the dual's tail digit for digit
    for (a, &l) in lambda.iter().enumerate() {
        if cert.dual_values[a] % tail_mod != l {
            return Err(Error::Domain(format!(
                "lambda at point {a} disagrees with the extracted dual"
            )));
        }
    }

    let mut digits = vec![vec![0u64; size]; (k - 1) as usize];
    for (a, &l) in lambda.iter().enumerate() {
        let mut rem = l;
        for i in (0..(k - 1) as usize).rev() {
            digits[i][a] = rem % p;
            rem /= p;
        }
    }
    Ok(DualDecomposition { lambda, digits })
}

/// Outcome of the component-level dual/self-duality equivalences.
#[derive(Debug, Clone)]
pub struct Theorem6Report {
    pub selectors_checked: u64,
    pub dual_is_gbent: bool,
    /// A selector F with g*_{f,F} = f_0* + F(λ_1, ...) not bent, if any.
    pub non_bent_dual_selector: Option<Vec<u64>>,
    pub f_is_self_dual: bool,
    /// A selector whose component is not self-dual, if any.
    pub non_self_dual_selector: Option<Vec<u64>>,
    /// dual(g_{f,F}) from analysis equals f_0* + F(λ...) for every selector.
    pub closed_form_duals_match: bool,
    pub part1_consistent: bool,
    pub part2_consistent: bool,
}

impl Theorem6Report {
    pub fn consistent(&self) -> bool {
        self.part1_consistent && self.part2_consistent && self.closed_form_duals_match
    }

    pub fn to_json(&self) -> Value {
        json!({
            "selectors_checked": self.selectors_checked,
            "dual_is_gbent": self.dual_is_gbent,
            "non_bent_dual_selector": self.non_bent_dual_selector,
            "f_is_self_dual": self.f_is_self_dual,
            "non_self_dual_selector": self.non_self_dual_selector,
            "closed_form_duals_match": self.closed_form_duals_match,
            "part1_consistent": self.part1_consistent,
            "part2_consistent": self.part2_consistent,
        })
    }
}

/// Enumerates all selectors and verifies both component-level equivalences:
/// f* gbent <=> every g*_{f,F} bent, and f self-dual <=> every g_{f,F}
/// self-dual.
pub fn check_theorem6(f: &GFunction, budget: u128) -> Result<Theorem6Report> {
    let p = f.p();
    let k = f.k();
    if k < 2 {
        return Err(Error::Inapplicable("theorem 6 check needs k >= 2".into()));
    }
    selector_budget(p, k, budget)?;
    let cert = analyze(f);
    if !cert.is_gbent {
        return Err(Error::NotGbent { failures: cert.failures.len() });
    }
    let dual_f = dual_from_certificate(f, &cert)?;
    let dual_is_gbent = analyze(&dual_f).is_gbent;
    let f_is_self_dual = f.values() == cert.dual_values;

    let dd = extract_lambda(f)?;
    let d = f.decompose();
    let f0 = GFunction::new(f.spec().clone(), 1, d.digits[0].clone())?;
    let f0_cert = analyze(&f0);
    debug_assert!(f0_cert.is_gbent, "f gbent forces its top digit to be bent");
    let f0_dual = &f0_cert.dual_values;

    let selectors = enumerate_selectors(p, k);
    let size = f.spec().size() as usize;

    struct SelectorVerdict {
        non_bent_dual: Option<Vec<u64>>,
        non_self_dual: Option<Vec<u64>>,
        closed_form_mismatch: bool,
    }

    let verdict = selectors
        .par_iter()
        .map(|sel| {
            // closed-form dual of the component: f_0* + F(λ_1, ..., λ_{k-1})
            let gstar_values: Vec<u64> =
                (0..size).map(|x| (f0_dual[x] + sel[dd.lambda[x] as usize]) % p).collect();
            let gstar = GFunction::new(f.spec().clone(), 1, gstar_values).expect("valid table");
            let gstar_bent = analyze(&gstar).is_gbent;

            let g = component_function(f, sel).expect("selector arity by construction");
            let g_cert = analyze(&g);
            debug_assert!(g_cert.is_gbent);
            let closed_form_mismatch = g_cert.dual_values != *gstar.values();
            let self_dual = g_cert.dual_values == *g.values();
            SelectorVerdict {
                non_bent_dual: (!gstar_bent).then(|| sel.clone()),
                non_self_dual: (!self_dual).then(|| sel.clone()),
                closed_form_mismatch,
            }
        })
        .reduce(
            || SelectorVerdict { non_bent_dual: None, non_self_dual: None, closed_form_mismatch: false },
            |a, b| SelectorVerdict {
                non_bent_dual: a.non_bent_dual.or(b.non_bent_dual),
                non_self_dual: a.non_self_dual.or(b.non_self_dual),
                closed_form_mismatch: a.closed_form_mismatch || b.closed_form_mismatch,
            },
        );

    let part1_consistent = dual_is_gbent == verdict.non_bent_dual.is_none();
    let part2_consistent = f_is_self_dual == verdict.non_self_dual.is_none();
    Ok(Theorem6Report {
        selectors_checked: selectors.len() as u64,
        dual_is_gbent,
        non_bent_dual_selector: verdict.non_bent_dual,
        f_is_self_dual,
        non_self_dual_selector: verdict.non_self_dual,
        closed_form_duals_match: !verdict.closed_form_mismatch,
        part1_consistent,
        part2_consistent,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{Block, DomainSpec};
    use std::sync::Arc;

    fn dot2(p: u64) -> Arc<DomainSpec> {
        DomainSpec::new(p, vec![Block::Dot(1), Block::Dot(1)]).unwrap()
    }

    /// 5(x1^2 + x2^2) + 2x1 + x2 over F_5 x F_5, k = 2 (generalized bent).
    fn gbent_25() -> GFunction {
        GFunction::build(&dot2(5), 2, |idx| {
            let x1 = idx / 5;
            let x2 = idx % 5;
            5 * ((x1 * x1 + x2 * x2) % 5) + (2 * x1 + x2) % 5
        })
        .unwrap()
    }

    #[test]
    fn zero_selector_gives_top_digit() {
        let f = gbent_25();
        let g = component_function(&f, &[0; 25][..5]).unwrap();
        assert_eq!(g.values(), &f.decompose().digits[0][..]);
    }

    #[test]
    fn projection_selector_adds_one_digit() {
        let spec = dot2(3);
        let f = GFunction::build(&spec, 3, |i| (i * 5 + 2) % 27).unwrap();
        let d = f.decompose();
        // selector projecting onto digit 1 (of digits 1, 2): tail = d1*p + d2
        let p = 3u64;
        let proj1: Vec<u64> = (0..9).map(|t| t / p).collect();
        let g = component_function(&f, &proj1).unwrap();
        for x in 0..spec.size() as usize {
            assert_eq!(g.values()[x], (d.digits[0][x] + d.digits[1][x]) % p);
        }
    }

    #[test]
    fn selector_arity_is_enforced() {
        let f = gbent_25();
        assert!(component_function(&f, &[0, 1, 2]).is_err());
        let k1 = GFunction::build(&dot2(3), 1, |i| i % 3).unwrap();
        assert!(component_function(&k1, &[0, 1, 2]).is_err());
    }

    #[test]
    fn lemma1_on_generalized_bent() {
        let f = gbent_25();
        let r = check_lemma1(&f, 1 << 20).unwrap();
        assert!(r.applicable);
        assert!(r.f_is_gbent);
        assert_eq!(r.selectors_checked, 3125);
        assert!(r.non_bent_selector.is_none());
        assert!(r.consistent);
    }

    #[test]
    fn lemma1_on_non_bent_finds_witness() {
        let spec = dot2(3);
        // top digit x1 is linear, hence not bent, hence f is not gbent
        let f = GFunction::build(&spec, 2, |i| 3 * (i / 3)).unwrap();
        assert!(!analyze(&f).is_gbent);
        let r = check_lemma1(&f, 1 << 20).unwrap();
        assert!(!r.f_is_gbent);
        assert!(r.non_bent_selector.is_some());
        assert!(r.consistent);
    }

    #[test]
    fn lemma1_k1_is_inapplicable() {
        let f = GFunction::build(&dot2(3), 1, |i| i % 3).unwrap();
        let r = check_lemma1(&f, 1 << 20).unwrap();
        assert!(!r.applicable);
    }

    #[test]
    fn budget_refusal_names_count() {
        let f = gbent_25();
        match check_lemma1(&f, 100) {
            Err(Error::Budget { required, budget }) => {
                assert_eq!(required, 3125);
                assert_eq!(budget, 100);
            }
            other => panic!("expected budget refusal, got {other:?}"),
        }
    }

    #[test]
    fn lambda_of_embedded_function_is_zero() {
        let spec = dot2(5);
        let f0 = GFunction::build(&spec, 1, |i| {
            let x1 = i / 5;
            let x2 = i % 5;
            (x1 * x1 + x2 * x2) % 5
        })
        .unwrap();
        let f = f0.embed_bent(2).unwrap();
        let dd = extract_lambda(&f).unwrap();
        assert!(dd.lambda.iter().all(|&l| l == 0));
    }

    #[test]
    fn lambda_matches_dual_tail() {
        let f = gbent_25();
        let dd = extract_lambda(&f).unwrap();
        let cert = analyze(&f);
        for a in 0..25usize {
            assert_eq!(dd.lambda[a], cert.dual_values[a] % 5);
        }
        assert_eq!(dd.digits.len(), 1);
        assert_eq!(dd.digits[0], dd.lambda);
    }

    #[test]
    fn theorem6_self_dual_components_iff_self_dual() {
        // 5x^2 over F_5 embeds a self-dual bent function: every component
        // of the k = 2 version must be self-dual.
        let spec = DomainSpec::new(5, vec![Block::Dot(1)]).unwrap();
        let f = GFunction::build(&spec, 2, |x| 5 * (x * x % 5)).unwrap();
        let r = check_theorem6(&f, 1 << 20).unwrap();
        assert!(r.f_is_self_dual);
        assert!(r.non_self_dual_selector.is_none());
        assert!(r.dual_is_gbent);
        assert!(r.non_bent_dual_selector.is_none());
        assert!(r.consistent());

        // the 25-point function is gbent but not self-dual: a witness exists
        let g = gbent_25();
        let r = check_theorem6(&g, 1 << 20).unwrap();
        assert!(!r.f_is_self_dual);
        assert!(r.non_self_dual_selector.is_some());
        assert!(r.consistent());
    }
}
