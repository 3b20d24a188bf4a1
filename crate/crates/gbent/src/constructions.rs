//! Builders for the bent-function families the toolkit certifies, each
//! paired with its closed-form dual where one exists, and validators for
//! the builders' hypotheses. Division expressions (x^2/(4γ), β/2, -a^2/4α)
//! go through field inverses; every divisor is nonzero under the validated
//! hypotheses and each builder asserts this per evaluation.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::analysis::{analyze, dual_from_certificate, MuUnit, Regularity};
use crate::cyclotomic::CycInt;
use crate::domain::{Block, DomainSpec};
use crate::error::{Error, Result};
use crate::field::{ExtField, FieldElem};
use crate::gfunction::GFunction;

fn check_table(table: &[u64], len: u64, max_exclusive: u64, name: &str) -> Result<()> {
    if table.len() as u64 != len {
        return Err(Error::Construction(format!(
            "{name} table has {} entries, expected {len}",
            table.len()
        )));
    }
    if table.iter().any(|&v| v >= max_exclusive) {
        return Err(Error::Construction(format!(
            "{name} table entries must lie in [0, {max_exclusive})"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Quadratic bent functions Tr(alpha x^2)

/// A quadratic bent function with its closed-form dual Tr(-a^2/(4·alpha))
/// and the constant unit mu = (-1)^{m-1}·eps^m·eta(alpha).
pub struct QuadraticBent {
    pub f: GFunction,
    pub dual: GFunction,
    pub mu: MuUnit,
}

pub fn quadratic_bent(field: &Arc<ExtField>, alpha: &FieldElem) -> Result<QuadraticBent> {
    if field.is_zero(alpha) {
        return Err(Error::Construction("quadratic coefficient alpha must be nonzero".into()));
    }
    let spec = DomainSpec::new(field.p(), vec![Block::Field(field.clone())])?;
    let f = GFunction::build(&spec, 1, |i| {
        let x = field.elem_from_index(i);
        field.trace(&field.mul(alpha, &field.square(&x)))
    })?;
    let inv_4a = field.inv(&field.scalar_mul(4, alpha))?;
    let dual = GFunction::build(&spec, 1, |i| {
        let a = field.elem_from_index(i);
        field.trace(&field.neg(&field.mul(&field.square(&a), &inv_4a)))
    })?;
    let mu = quadratic_mu(field.p(), field.degree(), field.quad_character(alpha)?);
    Ok(QuadraticBent { f, dual, mu })
}

/// mu = (-1)^{m-1}·eps^m·eta, with eps = 1 for p = 1 mod 4 and eps = i
/// otherwise.
fn quadratic_mu(p: u64, m: usize, eta: i8) -> MuUnit {
    let mut sign: i8 = if (m - 1) % 2 == 0 { 1 } else { -1 };
    let mut imaginary = false;
    if p % 4 == 3 {
        match m % 4 {
            0 => {}
            1 => imaginary = true,
            2 => sign = -sign,
            3 => {
                sign = -sign;
                imaginary = true;
            }
            _ => unreachable!(),
        }
    }
    MuUnit::new(sign * eta, imaginary)
}

// ---------------------------------------------------------------------------
// Maiorana-McFarland p^{k-1}·z1·z2 + g(z2) on F_p x F_p

pub fn mm_gbent(p: u64, k: u32, g: &[u64]) -> Result<GFunction> {
    let modulus = p
        .checked_pow(k)
        .ok_or_else(|| Error::Construction(format!("p^{k} out of range")))?;
    check_table(g, p, modulus, "g")?;
    let spec = DomainSpec::new(p, vec![Block::Dot(1), Block::Dot(1)])?;
    let shift = p.pow(k - 1);
    GFunction::build(&spec, k, |i| {
        let z1 = i / p;
        let z2 = i % p;
        (shift * (z1 * z2 % p) + g[z2 as usize]) % modulus
    })
}

// ---------------------------------------------------------------------------
// The two-parameter construction on F_{p^m} x F_p x F_p

/// Parameters of the construction F(x, y1, y2) =
/// p^{k-1}·(Tr(x^2) + (y1 + Tr(alpha x^2))·(y2 + Tr(beta x^2))) + g(y2 + Tr(beta x^2)),
/// subject to 1 + i·alpha + j·beta != 0 for every i, j in F_p.
pub struct Thm1Params {
    pub field: Arc<ExtField>,
    pub k: u32,
    pub alpha: FieldElem,
    pub beta: FieldElem,
    /// g: F_p -> Z_{p^k}, full table.
    pub g: Vec<u64>,
}

impl Thm1Params {
    pub fn validate(&self) -> Result<()> {
        let f = &self.field;
        if f.degree() < 2 {
            return Err(Error::Construction("construction needs extension degree m >= 2".into()));
        }
        if f.is_zero(&self.alpha) || f.is_zero(&self.beta) {
            return Err(Error::Construction("alpha and beta must be nonzero".into()));
        }
        let modulus = f
            .p()
            .checked_pow(self.k)
            .ok_or_else(|| Error::Construction(format!("p^{} out of range", self.k)))?;
        check_table(&self.g, f.p(), modulus, "g")?;
        for i in 0..f.p() {
            for j in 0..f.p() {
                let v = f.add(
                    &f.one(),
                    &f.add(&f.scalar_mul(i, &self.alpha), &f.scalar_mul(j, &self.beta)),
                );
                if f.is_zero(&v) {
                    return Err(Error::Construction(format!(
                        "1 + i·alpha + j·beta vanishes at (i, j) = ({i}, {j})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn domain(&self) -> Result<Arc<DomainSpec>> {
        DomainSpec::new(
            self.field.p(),
            vec![Block::Field(self.field.clone()), Block::Dot(1), Block::Dot(1)],
        )
    }

    /// Tr(x^2), Tr(alpha x^2), Tr(beta x^2) for every x, by element index.
    fn trace_tables(&self) -> Vec<(u64, u64, u64)> {
        let f = &self.field;
        (0..f.order())
            .map(|i| {
                let x2 = f.square(&f.elem_from_index(i));
                (
                    f.trace(&x2),
                    f.trace(&f.mul(&self.alpha, &x2)),
                    f.trace(&f.mul(&self.beta, &x2)),
                )
            })
            .collect()
    }
}

pub fn build_thm1(params: &Thm1Params) -> Result<GFunction> {
    params.validate()?;
    let spec = params.domain()?;
    let p = params.field.p();
    let shift = p.pow(params.k - 1);
    let modulus = p.pow(params.k);
    let tr = params.trace_tables();
    GFunction::build(&spec, params.k, |idx| {
        let x = (idx / (p * p)) as usize;
        let y1 = (idx / p) % p;
        let y2 = idx % p;
        let (t0, ta, tb) = tr[x];
        let u1 = (y1 + ta) % p;
        let u2 = (y2 + tb) % p;
        let quad = (t0 + u1 * u2) % p;
        (shift * quad + params.g[u2 as usize]) % modulus
    })
}

/// The closed-form dual F*(x, y1, y2) =
/// p^{k-1}·(Tr(-x^2 / (4·(1 + y1·alpha + y2·beta))) - y1·y2) + g(y1).
/// Note the argument swap: the g-term takes y1.
pub fn thm1_dual_closed_form(params: &Thm1Params) -> Result<GFunction> {
    params.validate()?;
    let spec = params.domain()?;
    let field = &params.field;
    let p = field.p();
    let shift = p.pow(params.k - 1);
    let modulus = p.pow(params.k);
    // gamma inverses for all (y1, y2); nonzero by the validated hypothesis
    let mut inv_4gamma = Vec::with_capacity((p * p) as usize);
    for y1 in 0..p {
        for y2 in 0..p {
            let gamma = field.add(
                &field.one(),
                &field.add(&field.scalar_mul(y1, &params.alpha), &field.scalar_mul(y2, &params.beta)),
            );
            assert!(!field.is_zero(&gamma), "validated hypothesis excludes gamma = 0");
            inv_4gamma.push(field.inv(&field.scalar_mul(4, &gamma))?);
        }
    }
    GFunction::build(&spec, params.k, |idx| {
        let x = field.elem_from_index(idx / (p * p));
        let y1 = (idx / p) % p;
        let y2 = idx % p;
        let inv = &inv_4gamma[(y1 * p + y2) as usize];
        let tr = field.trace(&field.neg(&field.mul(&field.square(&x), inv)));
        let quad = (tr + p - (y1 * y2) % p) % p;
        (shift * quad + params.g[y1 as usize]) % modulus
    })
}

/// The p x p sign matrix eta(1 + i·alpha + j·beta) and the two predicates
/// the construction's verdicts hinge on.
pub struct EtaPattern {
    pub matrix: Vec<Vec<i8>>,
}

impl EtaPattern {
    /// All +1: F is weakly regular.
    pub fn all_ones(&self) -> bool {
        self.matrix.iter().all(|row| row.iter().all(|&s| s == 1))
    }

    /// eta(1 + i·alpha + j·beta) = eta(1 + i·alpha) for all j.
    pub fn rows_constant(&self) -> bool {
        self.matrix.iter().all(|row| row.iter().all(|&s| s == row[0]))
    }

    /// Rows constant and not all rows equal: the sufficient condition for a
    /// non-weakly regular dual that is still generalized bent.
    pub fn rows_constant_with_sign_variation(&self) -> bool {
        self.rows_constant() && self.matrix.iter().any(|row| row[0] != self.matrix[0][0])
    }
}

pub fn eta_pattern(params: &Thm1Params) -> Result<EtaPattern> {
    params.validate()?;
    let f = &params.field;
    let p = f.p();
    let matrix = (0..p)
        .map(|i| {
            (0..p)
                .map(|j| {
                    let v = f.add(
                        &f.one(),
                        &f.add(&f.scalar_mul(i, &params.alpha), &f.scalar_mul(j, &params.beta)),
                    );
                    f.quad_character(&v).expect("gamma nonzero by hypothesis")
                })
                .collect()
        })
        .collect();
    Ok(EtaPattern { matrix })
}

/// The exact character-sum criterion for the dual to be generalized bent:
/// |Σ_{y1,y2} eta(1+y1·alpha+y2·beta)·zeta_{p^k}^{g(y1)}·zeta_p^{-y1y2+b1y1+b2y2}| = p
/// for every b1, b2.
pub fn thm1_condition7(params: &Thm1Params) -> Result<bool> {
    let pattern = eta_pattern(params)?;
    let p = params.field.p();
    let k = params.k;
    let shift = p.pow(k - 1);
    let modulus = p.pow(k);
    let target = CycInt::from_int(p, k, BigInt::from(p * p));
    for b1 in 0..p {
        for b2 in 0..p {
            let mut acc = CycInt::zero(p, k);
            for y1 in 0..p {
                for y2 in 0..p {
                    let lin = ((p - (y1 * y2) % p) + b1 * y1 + b2 * y2) % p;
                    let e = (params.g[y1 as usize] + shift * lin) % modulus;
                    acc.add_root(e, pattern.matrix[y1 as usize][y2 as usize] as i64);
                }
            }
            if acc.mag_sq() != target {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Indirect sums

/// Checks that bent selector blocks g_0, ..., g_t combine into bent
/// functions for every affine combination G_j = (1 - Σj_s)·g_0 + Σ j_s·g_s,
/// that G_j's dual is the same combination of the duals, and that the unit
/// mu is one constant u across all j. Returns u.
pub fn validate_family(blocks: &[GFunction]) -> Result<MuUnit> {
    if blocks.len() < 2 {
        return Err(Error::Construction("a selector family needs t >= 1, i.e. two blocks".into()));
    }
    let spec = blocks[0].spec().clone();
    let p = spec.p();
    let t = blocks.len() - 1;
    for (s, g) in blocks.iter().enumerate() {
        if g.k() != 1 {
            return Err(Error::Construction(format!("family member g_{s} must have k = 1")));
        }
        if *g.spec() != spec {
            return Err(Error::Construction(format!("family member g_{s} lives on a different domain")));
        }
    }
    let duals: Vec<GFunction> = blocks
        .iter()
        .enumerate()
        .map(|(s, g)| {
            let cert = analyze(g);
            if !cert.is_gbent {
                return Err(Error::Construction(format!("family member g_{s} is not bent")));
            }
            dual_from_certificate(g, &cert)
        })
        .collect::<Result<Vec<_>>>()?;

    let mut u: Option<MuUnit> = None;
    let combos = p.pow(t as u32);
    for (combo, j_tuple) in
        (0..combos).map(|c| (c, tuple_from_index(c, p, t)))
    {
        let jsum: u64 = j_tuple.iter().sum::<u64>() % p;
        let c0 = (1 + p - jsum % p) % p;
        let size = spec.size() as usize;
        let mut table = vec![0u64; size];
        let mut dual_table = vec![0u64; size];
        for x in 0..size {
            let mut v = c0 * blocks[0].values()[x];
            let mut dv = c0 * duals[0].values()[x];
            for (s, &js) in j_tuple.iter().enumerate() {
                v += js * blocks[s + 1].values()[x];
                dv += js * duals[s + 1].values()[x];
            }
            table[x] = v % p;
            dual_table[x] = dv % p;
        }
        let gj = GFunction::new(spec.clone(), 1, table)?;
        let cert = analyze(&gj);
        if !cert.is_gbent {
            return Err(Error::Construction(format!(
                "affine combination j = {j_tuple:?} (index {combo}) is not bent"
            )));
        }
        if cert.dual_values != dual_table {
            return Err(Error::Construction(format!(
                "dual of combination j = {j_tuple:?} is not the matching combination of duals"
            )));
        }
        let mu = match cert.regularity {
            Some(Regularity::Regular) => MuUnit::one(),
            Some(Regularity::WeaklyRegular(m)) => m,
            _ => {
                return Err(Error::Construction(format!(
                    "combination j = {j_tuple:?} is bent but not weakly regular"
                )))
            }
        };
        match u {
            None => u = Some(mu),
            Some(prev) if prev == mu => {}
            Some(prev) => {
                return Err(Error::Construction(format!(
                    "unit mu varies across combinations: {} vs {} at j = {j_tuple:?}",
                    prev.as_str(),
                    mu.as_str()
                )))
            }
        }
    }
    Ok(u.expect("at least one combination"))
}

/// Tuple (i_1, ..., i_t) of the base-p numeral with i_1 most significant.
fn tuple_from_index(idx: u64, p: u64, t: usize) -> Vec<u64> {
    let mut out = vec![0u64; t];
    let mut rem = idx;
    for s in (0..t).rev() {
        out[s] = rem % p;
        rem /= p;
    }
    out
}

/// Partial-spread style selector blocks g_s(y1, y2) = Tr(alpha_s·G(y1/y2))
/// on F_{p^m} x F_{p^m} (with y1/y2 read as y1·y2^{q-2}, so 0 at y2 = 0).
/// Requires m >= t+1, alphas linearly independent over F_p, and G a
/// permutation fixing 0. The returned blocks satisfy the family condition
/// and their pairwise differences sweep out all of F_p^t.
pub fn psap_blocks(
    field: &Arc<ExtField>,
    t: usize,
    alphas: &[FieldElem],
    perm: &[u64],
) -> Result<Vec<GFunction>> {
    if alphas.len() != t + 1 {
        return Err(Error::Construction(format!(
            "need t+1 = {} coefficients, got {}",
            t + 1,
            alphas.len()
        )));
    }
    if field.degree() < t + 1 {
        return Err(Error::Construction(format!(
            "field degree {} is below t+1 = {}",
            field.degree(),
            t + 1
        )));
    }
    if rank_mod_p(alphas, field) != t + 1 {
        return Err(Error::Construction(
            "alpha_0, ..., alpha_t are linearly dependent over F_p".into(),
        ));
    }
    let q = field.order();
    check_table(perm, q, q, "permutation")?;
    if perm[0] != 0 {
        return Err(Error::Construction("permutation must fix 0".into()));
    }
    let mut seen = vec![false; q as usize];
    for &v in perm {
        if std::mem::replace(&mut seen[v as usize], true) {
            return Err(Error::Construction("permutation table is not a bijection".into()));
        }
    }

    let spec =
        DomainSpec::new(field.p(), vec![Block::Field(field.clone()), Block::Field(field.clone())])?;
    // ratio r(y1, y2) = y1·y2^{q-2}, then the permutation, by element index
    let ratio_perm: Vec<u64> = {
        let mut out = vec![0u64; (q * q) as usize];
        for y1 in 0..q {
            let e1 = field.elem_from_index(y1);
            for y2 in 0..q {
                let r = if y2 == 0 {
                    field.zero()
                } else {
                    field.mul(&e1, &field.inv(&field.elem_from_index(y2)).expect("nonzero"))
                };
                out[(y1 * q + y2) as usize] = perm[field.elem_index(&r) as usize];
            }
        }
        out
    };
    let blocks: Vec<GFunction> = alphas
        .iter()
        .map(|alpha| {
            GFunction::build(&spec, 1, |idx| {
                let g_of_r = field.elem_from_index(ratio_perm[idx as usize]);
                field.trace(&field.mul(alpha, &g_of_r))
            })
        })
        .collect::<Result<Vec<_>>>()?;

    // the difference map (g_0 - g_1, ..., g_0 - g_t) must cover F_p^t
    let p = field.p();
    let mut hit = vec![false; p.pow(t as u32) as usize];
    for y in 0..spec.size() {
        let g0 = blocks[0].value(y);
        let mut idx = 0u64;
        for s in 1..=t {
            idx = idx * p + (g0 + p - blocks[s].value(y)) % p;
        }
        hit[idx as usize] = true;
    }
    if !hit.iter().all(|&h| h) {
        return Err(Error::Construction(
            "selector image does not cover F_p^t; parameters are invalid".into(),
        ));
    }
    Ok(blocks)
}

fn rank_mod_p(elems: &[FieldElem], field: &ExtField) -> usize {
    let p = field.p();
    let mut rows: Vec<Vec<u64>> = elems.iter().map(|e| e.coords().to_vec()).collect();
    let cols = field.degree();
    let mut rank = 0;
    for c in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][c] % p != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        let inv = crate::field::pow_mod(rows[rank][c], p - 2, p);
        for r in 0..rows.len() {
            if r == rank || rows[r][c] == 0 {
                continue;
            }
            let f = rows[r][c] * inv % p;
            for j in 0..cols {
                rows[r][j] = (rows[r][j] + (p - f) * rows[rank][j] % p) % p;
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

/// An indirect sum: the function family f_i (i in F_p^t) on V_r spliced
/// along bent selector blocks g_0, ..., g_t on V_m, plus an arbitrary
/// outer table g: F_p^t -> Z_{p^k}.
pub struct IndirectSumFamily {
    pub t: usize,
    /// f_i indexed by the tuple numeral (i_1 most significant); p^t entries.
    pub f_family: Vec<GFunction>,
    /// g_0, ..., g_t, validated via [`validate_family`].
    pub g_blocks: Vec<GFunction>,
    /// g: F_p^t -> Z_{p^k}, same tuple indexing.
    pub g: Vec<u64>,
}

/// The built function, its closed-form dual, and the family unit u that
/// scales every Walsh value.
pub struct IndirectSum {
    pub f: GFunction,
    pub dual_closed_form: GFunction,
    pub u: MuUnit,
}

/// F(x, y) = f_{(g_0-g_1, ..., g_0-g_t)(y)}(x) + p^{k-1}·g_0(y) + g(...),
/// with the closed-form dual obtained by replacing every g_s by its dual
/// and every f_i by its dual.
pub fn build_indirect_sum(fam: &IndirectSumFamily) -> Result<IndirectSum> {
    let u = validate_family(&fam.g_blocks)?;
    if fam.g_blocks.len() != fam.t + 1 {
        return Err(Error::Construction(format!(
            "expected t+1 = {} selector blocks, got {}",
            fam.t + 1,
            fam.g_blocks.len()
        )));
    }
    let combos = fam.g_blocks[0].p().pow(fam.t as u32);
    if fam.f_family.len() as u64 != combos {
        return Err(Error::Construction(format!(
            "family needs p^t = {combos} functions, got {}",
            fam.f_family.len()
        )));
    }
    let f_spec = fam.f_family[0].spec().clone();
    let k = fam.f_family[0].k();
    let p = f_spec.p();
    let modulus = p.pow(k);
    check_table(&fam.g, combos, modulus, "g")?;
    for (i, fi) in fam.f_family.iter().enumerate() {
        if *fi.spec() != f_spec || fi.k() != k {
            return Err(Error::Construction(format!(
                "family member f_{i} differs in domain or k"
            )));
        }
    }
    let f_duals: Vec<GFunction> = fam
        .f_family
        .iter()
        .enumerate()
        .map(|(i, fi)| {
            let cert = analyze(fi);
            if !cert.is_gbent {
                return Err(Error::Construction(format!("family member f_{i} is not generalized bent")));
            }
            dual_from_certificate(fi, &cert)
        })
        .collect::<Result<Vec<_>>>()?;
    let g_duals: Vec<GFunction> = fam
        .g_blocks
        .iter()
        .map(extract_dual)
        .collect::<Result<Vec<_>>>()?;

    let g_spec = fam.g_blocks[0].spec().clone();
    let mut blocks = f_spec.blocks().to_vec();
    blocks.extend(g_spec.blocks().iter().cloned());
    let spec = DomainSpec::new(p, blocks)?;
    let shift = p.pow(k - 1);
    let y_size = g_spec.size();

    let selector = |tables: &[GFunction], y: u64| -> u64 {
        let g0 = tables[0].value(y);
        let mut idx = 0u64;
        for s in 1..=fam.t {
            idx = idx * p + (g0 + p - tables[s].value(y)) % p;
        }
        idx
    };

    let f = GFunction::build(&spec, k, |idx| {
        let x = idx / y_size;
        let y = idx % y_size;
        let sel = selector(&fam.g_blocks, y) as usize;
        (fam.f_family[sel].value(x) + shift * fam.g_blocks[0].value(y) + fam.g[sel]) % modulus
    })?;
    let dual_closed_form = GFunction::build(&spec, k, |idx| {
        let x = idx / y_size;
        let y = idx % y_size;
        let sel = selector(&g_duals, y) as usize;
        (f_duals[sel].value(x) + shift * g_duals[0].value(y) + fam.g[sel]) % modulus
    })?;
    Ok(IndirectSum { f, dual_closed_form, u })
}

fn extract_dual(g: &GFunction) -> Result<GFunction> {
    let cert = analyze(g);
    dual_from_certificate(g, &cert)
}

// ---------------------------------------------------------------------------
// Self-dual secondary construction

/// Parameters shared by the square-diagonal selector construction:
/// F(x, y1, y2) = f_{h(a·alpha·y1 + a·y2)}(x) + p^{k-1}·Tr((beta/2)(y1^2+y2^2))
/// + g(h(a·alpha·y1 + a·y2)) on V_r x F_{p^m} x F_{p^m}, where alpha and
/// beta are square roots of -1.
pub struct Lemma4Params {
    pub field: Arc<ExtField>,
    pub k: u32,
    pub a: FieldElem,
    pub alpha: FieldElem,
    pub beta: FieldElem,
    /// f_i for i in F_p, all generalized bent on a common V_r.
    pub f_family: Vec<GFunction>,
    /// h: F_{p^m} -> F_p by element index.
    pub h: Vec<u64>,
    /// g: F_p -> Z_{p^k}.
    pub g: Vec<u64>,
}

impl Lemma4Params {
    fn validate_shapes(&self) -> Result<()> {
        let field = &self.field;
        let p = field.p();
        if field.is_zero(&self.a) {
            return Err(Error::Construction("a must be nonzero".into()));
        }
        let minus_one = field.scalar(p - 1);
        if field.square(&self.alpha) != minus_one || field.square(&self.beta) != minus_one {
            return Err(Error::Construction(
                "alpha and beta must be square roots of -1 (requires 4 | p^m - 1)".into(),
            ));
        }
        let modulus = p
            .checked_pow(self.k)
            .ok_or_else(|| Error::Construction(format!("p^{} out of range", self.k)))?;
        check_table(&self.h, field.order(), p, "h")?;
        check_table(&self.g, p, modulus, "g")?;
        if self.f_family.len() as u64 != p {
            return Err(Error::Construction(format!(
                "family needs p = {p} functions, got {}",
                self.f_family.len()
            )));
        }
        let spec = self.f_family[0].spec();
        for (i, f) in self.f_family.iter().enumerate() {
            if f.spec() != spec || f.k() != self.k {
                return Err(Error::Construction(format!(
                    "family member f_{i} differs in domain or k"
                )));
            }
        }
        Ok(())
    }

    fn domain(&self) -> Result<Arc<DomainSpec>> {
        let mut blocks = self.f_family[0].spec().blocks().to_vec();
        blocks.push(Block::Field(self.field.clone()));
        blocks.push(Block::Field(self.field.clone()));
        DomainSpec::new(self.field.p(), blocks)
    }

    /// h evaluated on the selector argument a·alpha·y1 + a·y2 and on the
    /// dual-side argument -beta·(a·alpha·y1 + a·y2), for every (y1, y2).
    fn selector_tables(&self) -> (Vec<u64>, Vec<u64>) {
        let field = &self.field;
        let q = field.order();
        let a_alpha = field.mul(&self.a, &self.alpha);
        let neg_beta = field.neg(&self.beta);
        let mut fwd = Vec::with_capacity((q * q) as usize);
        let mut bwd = Vec::with_capacity((q * q) as usize);
        for y1 in 0..q {
            let e1 = field.elem_from_index(y1);
            let part = field.mul(&a_alpha, &e1);
            for y2 in 0..q {
                let e2 = field.elem_from_index(y2);
                let arg = field.add(&part, &field.mul(&self.a, &e2));
                fwd.push(self.h[field.elem_index(&arg) as usize]);
                bwd.push(self.h[field.elem_index(&field.mul(&neg_beta, &arg)) as usize]);
            }
        }
        (fwd, bwd)
    }

    fn g0_table(&self) -> Result<Vec<u64>> {
        let field = &self.field;
        let q = field.order();
        let half_beta = field.mul(&self.beta, &field.inv(&field.scalar(2))?);
        let mut out = Vec::with_capacity((q * q) as usize);
        for y1 in 0..q {
            let s1 = field.square(&field.elem_from_index(y1));
            for y2 in 0..q {
                let s2 = field.square(&field.elem_from_index(y2));
                out.push(field.trace(&field.mul(&half_beta, &field.add(&s1, &s2))));
            }
        }
        Ok(out)
    }
}

/// Builds the function and its closed-form dual
/// F*(x, y1, y2) = f*_{h(-beta(...))}(x) + p^{k-1}·g_0 + g(h(-beta(...))),
/// for arbitrary generalized bent f_i and arbitrary h, g.
pub fn build_lemma4(params: &Lemma4Params) -> Result<(GFunction, GFunction)> {
    params.validate_shapes()?;
    let f_duals: Vec<GFunction> = params
        .f_family
        .iter()
        .enumerate()
        .map(|(i, fi)| {
            let cert = analyze(fi);
            if !cert.is_gbent {
                return Err(Error::Construction(format!("family member f_{i} is not generalized bent")));
            }
            dual_from_certificate(fi, &cert)
        })
        .collect::<Result<Vec<_>>>()?;
    build_lemma4_with_duals(params, &f_duals)
}

fn build_lemma4_with_duals(
    params: &Lemma4Params,
    f_duals: &[GFunction],
) -> Result<(GFunction, GFunction)> {
    let spec = params.domain()?;
    let p = params.field.p();
    let k = params.k;
    let shift = p.pow(k - 1);
    let modulus = p.pow(k);
    let (fwd, bwd) = params.selector_tables();
    let g0 = params.g0_table()?;
    let y_size = params.field.order() * params.field.order();
    let f = GFunction::build(&spec, k, |idx| {
        let x = idx / y_size;
        let y = (idx % y_size) as usize;
        let w = fwd[y] as usize;
        (params.f_family[w].value(x) + shift * g0[y] + params.g[w]) % modulus
    })?;
    let dual = GFunction::build(&spec, k, |idx| {
        let x = idx / y_size;
        let y = (idx % y_size) as usize;
        let w = bwd[y] as usize;
        (f_duals[w].value(x) + shift * g0[y] + params.g[w]) % modulus
    })?;
    Ok((f, dual))
}

/// The three hypothesis sets under which the construction is self-dual.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfDualCase {
    /// p = 1 mod 4, h = Tr, f and g constant on multiply-by-beta orbits.
    Case1,
    /// p = 1 mod 4 or m even, h = Tr(x^2), f and g even in the index.
    Case2,
    /// p = 1 mod 4 or m even, h = Tr(x^4), no symmetry needed.
    Case3,
}

/// Validates the chosen case's conditions (naming the violated one), then
/// builds the function together with its closed-form dual. Under the case
/// conditions the two tables coincide, which the analysis-side tests
/// confirm independently.
pub fn build_selfdual(
    case: SelfDualCase,
    params: &Lemma4Params,
) -> Result<(GFunction, GFunction)> {
    params.validate_shapes()?;
    let field = &params.field;
    let p = field.p();
    let m = field.degree();

    match case {
        SelfDualCase::Case1 => {
            if p % 4 != 1 {
                return Err(Error::Construction("case 1 requires p = 1 mod 4".into()));
            }
        }
        SelfDualCase::Case2 | SelfDualCase::Case3 => {
            if p % 4 != 1 && m % 2 != 0 {
                return Err(Error::Construction(
                    "cases 2 and 3 require p = 1 mod 4 or even extension degree".into(),
                ));
            }
        }
    }

    // h must be the stated trace power map
    let exponent = match case {
        SelfDualCase::Case1 => 1u64,
        SelfDualCase::Case2 => 2,
        SelfDualCase::Case3 => 4,
    };
    for e in 0..field.order() {
        let x = field.elem_from_index(e);
        if params.h[e as usize] != field.trace(&field.pow(&x, exponent)) {
            return Err(Error::Construction(format!(
                "h must equal Tr(x^{exponent}) for this case (differs at index {e})"
            )));
        }
    }

    match case {
        SelfDualCase::Case1 => {
            // beta lies in the prime subfield; read off its scalar value
            if params.beta.coords()[1..].iter().any(|&c| c != 0) {
                return Err(Error::Construction(
                    "case 1 requires beta in the prime subfield".into(),
                ));
            }
            let b = params.beta.coords()[0];
            for i in 0..p {
                let j = i * b % p;
                if params.f_family[i as usize] != params.f_family[j as usize] {
                    return Err(Error::Construction(format!(
                        "case 1 requires f_{i} = f_{j} (multiply-by-beta orbit)"
                    )));
                }
                if params.g[i as usize] != params.g[j as usize] {
                    return Err(Error::Construction(format!(
                        "case 1 requires g({i}) = g({j}) (multiply-by-beta orbit)"
                    )));
                }
            }
        }
        SelfDualCase::Case2 => {
            for i in 0..p {
                let j = (p - i) % p;
                if params.f_family[i as usize] != params.f_family[j as usize] {
                    return Err(Error::Construction(format!(
                        "case 2 requires f_{i} = f_{j}"
                    )));
                }
                if params.g[i as usize] != params.g[j as usize] {
                    return Err(Error::Construction(format!(
                        "case 2 requires g({i}) = g({j})"
                    )));
                }
            }
        }
        SelfDualCase::Case3 => {}
    }

    // every family member must be self-dual generalized bent
    let mut verified: Vec<usize> = Vec::new();
    for (i, fi) in params.f_family.iter().enumerate() {
        if verified.iter().any(|&j| params.f_family[j] == *fi) {
            continue;
        }
        let cert = analyze(fi);
        if !cert.is_gbent {
            return Err(Error::Construction(format!("family member f_{i} is not generalized bent")));
        }
        if cert.dual_values != *fi.values() {
            return Err(Error::Construction(format!("family member f_{i} is not self-dual")));
        }
        verified.push(i);
    }

    // self-dual family members are their own duals
    build_lemma4_with_duals(params, &params.f_family)
}
