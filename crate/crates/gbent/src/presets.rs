//! The named instances exercised by the verification suite, the CLI, and
//! the Python bindings: concrete parameter sets over small fields whose
//! analysis verdicts are pinned by the test suite.

use std::sync::Arc;

use crate::constructions::{Lemma4Params, SelfDualCase, Thm1Params};
use crate::domain::{Block, DomainSpec};
use crate::error::Result;
use crate::field::ExtField;
use crate::gfunction::GFunction;

/// F_{5^2} with z^2 + 4z + 2 = 0, z primitive.
pub fn field_25() -> Arc<ExtField> {
    Arc::new(ExtField::new(5, vec![2, 4, 1]).expect("fixed polynomial"))
}

/// F_{3^5} with z^5 + 2z + 1 = 0, z primitive.
pub fn field_243() -> Arc<ExtField> {
    Arc::new(ExtField::new(3, vec![1, 2, 0, 0, 0, 1]).expect("fixed polynomial"))
}

/// F_{3^3} with z^3 + 2z + 1 = 0, z primitive.
pub fn field_27() -> Arc<ExtField> {
    Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).expect("fixed polynomial"))
}

/// F_{7^2} with z^2 + 6z + 3 = 0, z primitive.
pub fn field_49() -> Arc<ExtField> {
    Arc::new(ExtField::new(7, vec![3, 6, 1]).expect("fixed polynomial"))
}

/// F_5 presented with generator z = 2 (a primitive root mod 5).
pub fn field_5() -> Arc<ExtField> {
    Arc::new(ExtField::new(5, vec![3, 1]).expect("fixed polynomial"))
}

/// Two-parameter instance over F_{5^2}, k = 3, alpha = beta = z,
/// g(x) = x^3 mod 125. Generalized bent, non-weakly regular, dual not
/// generalized bent.
pub fn example1() -> Thm1Params {
    let field = field_25();
    let z = field.generator();
    Thm1Params {
        field,
        k: 3,
        alpha: z.clone(),
        beta: z,
        g: (0..5u64).map(|x| x * x * x % 125).collect(),
    }
}

/// Two-parameter instance over F_{3^5}, k = 2, alpha = z^10, beta = z^47,
/// g(x) = x. Generalized bent, non-weakly regular, dual generalized bent.
pub fn example2() -> Thm1Params {
    let field = field_243();
    let alpha = field.gen_pow(10);
    let beta = field.gen_pow(47);
    Thm1Params { field, k: 2, alpha, beta, g: vec![0, 1, 2] }
}

/// The decomposition showcase: same shape as [`example2`] but with
/// alpha = z^47, beta = z^10. Its dual is not generalized bent while the
/// top digit's dual is bent.
pub fn example5() -> Thm1Params {
    let field = field_243();
    let alpha = field.gen_pow(47);
    let beta = field.gen_pow(10);
    Thm1Params { field, k: 2, alpha, beta, g: vec![0, 1, 2] }
}

/// Self-dual construction over F_5^3 (k = 2): alpha = beta = 2, a = 1,
/// f_i = 5x^2 except f_1 = 20x^2, h(x) = x^4, g(y) = 2y^2 mod 25.
pub fn example3() -> Result<(SelfDualCase, Lemma4Params)> {
    let field = field_5();
    let r_spec = DomainSpec::new(5, vec![Block::Dot(1)])?;
    let f_plain = GFunction::build(&r_spec, 2, |x| 5 * (x * x % 5))?;
    let f_scaled = GFunction::build(&r_spec, 2, |x| 20 * (x * x % 5) % 25)?;
    let f_family = vec![
        f_plain.clone(),
        f_scaled,
        f_plain.clone(),
        f_plain.clone(),
        f_plain,
    ];
    let params = Lemma4Params {
        field: field.clone(),
        k: 2,
        a: field.one(),
        alpha: field.scalar(2),
        beta: field.scalar(2),
        f_family,
        h: (0..5u64).map(|x| (x * x % 5) * (x * x % 5) % 5).collect(),
        g: (0..5u64).map(|y| 2 * y * y % 25).collect(),
    };
    Ok((SelfDualCase::Case3, params))
}

/// Self-dual, non-quadratic instance over F_{7^2}^3 (n = 6, k = 1):
/// alpha = beta = z^12, a = z, quadratic self-dual family, h(x) = Tr(x^2),
/// g = 0.
pub fn example4() -> Result<(SelfDualCase, Lemma4Params)> {
    let field = field_49();
    let r_spec = DomainSpec::new(7, vec![Block::Field(field.clone())])?;
    let quad = |c: u64, add: u64| -> Result<GFunction> {
        let coeff = field.scalar_mul(c, &field.gen_pow(12));
        GFunction::build(&r_spec, 1, |i| {
            let x = field.elem_from_index(i);
            (field.trace(&field.mul(&coeff, &field.square(&x))) + add) % 7
        })
    };
    let f0 = quad(4, 0)?;
    let f1 = quad(3, 1)?;
    let f2 = quad(3, 2)?;
    let f3 = quad(3, 3)?;
    let f_family = vec![f0, f1.clone(), f2.clone(), f3.clone(), f3, f2, f1];
    let h = (0..field.order())
        .map(|e| {
            let x = field.elem_from_index(e);
            field.trace(&field.square(&x))
        })
        .collect();
    let params = Lemma4Params {
        field: field.clone(),
        k: 1,
        a: field.generator(),
        alpha: field.gen_pow(12),
        beta: field.gen_pow(12),
        f_family,
        h,
        g: vec![0; 7],
    };
    Ok((SelfDualCase::Case2, params))
}

/// 5(x1^2 + x2^2) + 2x1 + x2 on F_5 x F_5 into Z_25: generalized bent but
/// not self-dual, while its top digit x1^2 + x2^2 is self-dual bent.
pub fn example6() -> Result<GFunction> {
    let spec = DomainSpec::new(5, vec![Block::Dot(1), Block::Dot(1)])?;
    GFunction::build(&spec, 2, |idx| {
        let x1 = idx / 5;
        let x2 = idx % 5;
        5 * ((x1 * x1 + x2 * x2) % 5) + (2 * x1 + x2) % 5
    })
}

/// The expected dual of [`example6`]: 5(x1^2 + x2^2) + x1 + 3x2.
pub fn example6_expected_dual() -> Result<GFunction> {
    let spec = DomainSpec::new(5, vec![Block::Dot(1), Block::Dot(1)])?;
    GFunction::build(&spec, 2, |idx| {
        let x1 = idx / 5;
        let x2 = idx % 5;
        5 * ((x1 * x1 + x2 * x2) % 5) + (x1 + 3 * x2) % 5
    })
}

/// Tr(x^22 + x^8) over F_{3^3}: bent and non-weakly regular, and, despite
/// an earlier claim in the literature, not self-dual.
pub fn g3() -> Result<GFunction> {
    let field = field_27();
    let spec = DomainSpec::new(3, vec![Block::Field(field.clone())])?;
    GFunction::build(&spec, 1, |i| {
        let x = field.elem_from_index(i);
        field.trace(&field.add(&field.pow(&x, 22), &field.pow(&x, 8)))
    })
}

/// The classic selector pair g_0 = y1·y2, g_1 = y1·y2 - y2 on F_p x F_p,
/// which satisfies the indirect-sum family condition.
pub fn mm_selector_pair(p: u64) -> Result<Vec<GFunction>> {
    let spec = DomainSpec::new(p, vec![Block::Dot(1), Block::Dot(1)])?;
    let g0 = GFunction::build(&spec, 1, |idx| idx / p * (idx % p) % p)?;
    let g1 = GFunction::build(&spec, 1, |idx| {
        let y1 = idx / p;
        let y2 = idx % p;
        (y1 * y2 % p + p - y2) % p
    })?;
    Ok(vec![g0, g1])
}
