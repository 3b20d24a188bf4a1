//! Exact Walsh transforms of generalized p-ary functions.
//!
//! `walsh_naive` is the reference oracle: the plain character sum
//! W_f(a) = Σ_x zeta_{p^k}^{f(x)} · zeta_p^{-<a,x>}. `walsh_full_fast`
//! computes the same spectrum through n radix-p decimation stages; each
//! butterfly output y_t = Σ_s x_s·zeta_p^{-st} costs p monomial
//! multiplications, and a monomial multiplication is only a coefficient
//! re-indexing with sign fixups. Trace-form blocks are routed through the
//! domain's dual-coordinate permutation after the stages, so a single
//! dot-coordinate butterfly serves every inner product.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;

use crate::cyclotomic::CycInt;
use crate::domain::{DomainSpec, Point};
use crate::error::{Error, Result};
use crate::gfunction::GFunction;

/// A full table of Walsh values, indexed like the domain.
#[derive(Debug, Clone, PartialEq)]
pub struct WalshSpectrum {
    spec: Arc<DomainSpec>,
    k: u32,
    values: Vec<CycInt>,
}

impl WalshSpectrum {
    pub fn new(spec: Arc<DomainSpec>, k: u32, values: Vec<CycInt>) -> Result<WalshSpectrum> {
        if values.len() as u64 != spec.size() {
            return Err(Error::Domain("spectrum length does not match domain".into()));
        }
        let p = spec.p();
        if values.iter().any(|v| v.p() != p || v.k() != k) {
            return Err(Error::Domain("spectrum entries live in the wrong ring".into()));
        }
        Ok(WalshSpectrum { spec, k, values })
    }

    pub fn spec(&self) -> &Arc<DomainSpec> {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn values(&self) -> &[CycInt] {
        &self.values
    }

    pub fn value(&self, a: u64) -> &CycInt {
        &self.values[a as usize]
    }

    /// Exact Parseval check: Σ_a |W(a)|^2 = p^{2n}.
    pub fn parseval_holds(&self) -> bool {
        let p = self.p();
        let k = self.k;
        let total = self
            .values
            .par_iter()
            .map(|w| w.mag_sq())
            .reduce(|| CycInt::zero(p, k), |a, b| a.add(&b).expect("same ring"));
        total == CycInt::from_int(p, k, BigInt::from(p).pow(2 * self.spec.n() as u32))
    }

    /// Debug dump: one line per point, index then the coefficient table.
    pub fn dump<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        for (idx, v) in self.values.iter().enumerate() {
            write!(w, "{idx}")?;
            for c in v.coeffs() {
                write!(w, " {c}")?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// W_f(a) by direct summation: the oracle everything else is checked
/// against.
pub fn walsh_naive(f: &GFunction, a: &Point) -> CycInt {
    let spec = f.spec();
    let p = spec.p();
    let k = f.k();
    let shift = p.pow(k - 1);
    let mut acc = CycInt::zero(p, k);
    for x in 0..spec.size() {
        let ip = spec.inner_product(a, &spec.decode(x));
        let e = f.value(x) + ((p - ip) % p) * shift;
        acc.add_root(e, 1);
    }
    acc
}

/// The naive transform at every point; quadratic in the domain size.
pub fn walsh_naive_full(f: &GFunction) -> WalshSpectrum {
    let spec = f.spec();
    let points: Vec<Point> = (0..spec.size()).map(|a| spec.decode(a)).collect();
    let values: Vec<CycInt> = points.par_iter().map(|a| walsh_naive(f, a)).collect();
    WalshSpectrum::new(spec.clone(), f.k(), values).expect("shape by construction")
}

#[derive(Clone, Copy, PartialEq)]
pub(crate) enum Direction {
    /// kernel zeta_p^{-st} (the Walsh transform)
    Forward,
    /// kernel zeta_p^{+st} (the inverse transform, unscaled)
    Backward,
}

/// Applies the n radix-p stages to an arbitrary CycInt table indexed by the
/// base-p digits of the canonical enumeration. No permutation, no scaling.
pub(crate) fn dft_stages(spec: &DomainSpec, mut buf: Vec<CycInt>, dir: Direction) -> Vec<CycInt> {
    let p = spec.p();
    let size = spec.size();
    let k = buf.first().map(|c| c.k()).unwrap_or(1);
    // twiddle[s][t] = exponent of zeta_p pairing input digit s with output digit t
    let twiddle: Vec<Vec<u64>> = (0..p)
        .map(|s| {
            (0..p)
                .map(|t| match dir {
                    Direction::Forward => (p - (s * t) % p) % p,
                    Direction::Backward => (s * t) % p,
                })
                .collect()
        })
        .collect();
    let mut w = 1u64;
    for _ in 0..spec.n() {
        let out: Vec<CycInt> = (0..size)
            .into_par_iter()
            .map(|idx| {
                let t = (idx / w) % p;
                let base = idx - t * w;
                let mut acc = CycInt::zero(p, k);
                for s in 0..p {
                    acc.add_zp_shifted(
                        &buf[(base + s * w) as usize],
                        twiddle[s as usize][t as usize],
                    );
                }
                acc
            })
            .collect();
        buf = out;
        w *= p;
    }
    buf
}

/// The exact Walsh spectrum of `f` through the fast transform. Agrees with
/// [`walsh_naive`] at every point.
pub fn walsh_full_fast(f: &GFunction) -> WalshSpectrum {
    let spec = f.spec();
    let p = spec.p();
    let k = f.k();
    let buf: Vec<CycInt> =
        (0..spec.size()).into_par_iter().map(|x| CycInt::root(p, k, f.value(x))).collect();
    let out = dft_stages(spec, buf, Direction::Forward);
    // route each output slot to the point whose dual coordinates name it
    let perm = spec.dual_permutation();
    let mut slots: Vec<Option<CycInt>> = out.into_iter().map(Some).collect();
    let values: Vec<CycInt> = perm
        .iter()
        .map(|&slot| slots[slot as usize].take().expect("permutation is a bijection"))
        .collect();
    WalshSpectrum::new(spec.clone(), k, values).expect("shape by construction")
}

/// Recovers f from its spectrum: p^{-n} Σ_a W(a)·zeta_p^{<a,x>} must be a
/// single root of unity at every point; anything else means the table is
/// not the spectrum of a generalized p-ary function.
pub fn inverse_walsh(w: &WalshSpectrum) -> Result<GFunction> {
    let spec = w.spec().clone();
    let p = spec.p();
    let k = w.k();
    let perm = spec.dual_permutation();
    let mut buf = vec![CycInt::zero(p, k); spec.size() as usize];
    for (a, &slot) in perm.iter().enumerate() {
        buf[slot as usize] = w.values[a].clone();
    }
    let out = dft_stages(&spec, buf, Direction::Backward);
    let scale = BigInt::from(p).pow(spec.n() as u32);
    let values = out
        .into_par_iter()
        .enumerate()
        .map(|(x, v)| {
            let reduced = v.div_exact_int(&scale).ok_or_else(|| {
                Error::InvalidSpectrum(format!("value at point {x} is not divisible by p^n"))
            })?;
            let (c, e) = reduced.as_signed_monomial().ok_or_else(|| {
                Error::InvalidSpectrum(format!("value at point {x} is not a root of unity"))
            })?;
            if !c.is_one() {
                return Err(Error::InvalidSpectrum(format!(
                    "value at point {x} has coefficient {c}, expected 1"
                )));
            }
            Ok(e)
        })
        .collect::<Result<Vec<u64>>>()?;
    GFunction::new(spec, k, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Block;
    use crate::field::ExtField;

    fn dot(p: u64, m: usize) -> Arc<DomainSpec> {
        DomainSpec::new(p, vec![Block::Dot(m)]).unwrap()
    }

    fn random_function(spec: &Arc<DomainSpec>, k: u32, seed: u64) -> GFunction {
        let modulus = spec.p().pow(k);
        let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(12345);
        GFunction::build(spec, k, |_| {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state % modulus
        })
        .unwrap()
    }

    #[test]
    fn zero_function_spectrum() {
        let spec = dot(3, 1);
        let f = GFunction::build(&spec, 1, |_| 0).unwrap();
        let w = walsh_full_fast(&f);
        assert_eq!(*w.value(0), CycInt::from_int(3, 1, 3));
        assert!(w.value(1).is_zero());
        assert!(w.value(2).is_zero());
        let naive = walsh_naive(&f, &spec.decode(0));
        assert_eq!(naive, *w.value(0));
    }

    #[test]
    fn quadratic_closed_form_f25() {
        // f(x) = Tr(z x^2) on F_25: W(a) = (-1)^{m-1} eps^m eta(z) p^{m/2}
        // zeta_p^{Tr(-a^2/(4z))} with m = 2, p = 1 mod 4, eta(z) = -1:
        // W(a) = 5 zeta_5^{Tr(-a^2/(4z))}
        let field = Arc::new(ExtField::new(5, vec![2, 4, 1]).unwrap());
        let spec = DomainSpec::new(5, vec![Block::Field(field.clone())]).unwrap();
        let z = field.generator();
        let f = GFunction::build(&spec, 1, |i| {
            let x = field.elem_from_index(i);
            field.trace(&field.mul(&z, &field.square(&x)))
        })
        .unwrap();
        let w = walsh_full_fast(&f);
        let inv_4z = field.inv(&field.scalar_mul(4, &z)).unwrap();
        for a_idx in 0..spec.size() {
            let a = field.elem_from_index(a_idx);
            let dual_exp = field.trace(&field.neg(&field.mul(&field.square(&a), &inv_4z)));
            let expect = CycInt::root(5, 1, dual_exp).scale(5);
            assert_eq!(*w.value(a_idx), expect, "a = {a_idx}");
            assert_eq!(walsh_naive(&f, &spec.decode(a_idx)), expect);
        }
        assert!(w.parseval_holds());
    }

    #[test]
    fn maiorana_mcfarland_closed_form() {
        // p^{k-1} z1 z2 + g(z2) on F_p x F_p: W(b1,b2) = p zeta^{-p^{k-1} b1 b2 + g(b1)}
        let p = 3u64;
        let k = 2u32;
        let g = [0u64, 4, 7];
        let spec = DomainSpec::new(p, vec![Block::Dot(1), Block::Dot(1)]).unwrap();
        let f = GFunction::build(&spec, k, |i| {
            let z1 = i / p;
            let z2 = i % p;
            (p * (z1 * z2 % p) + g[z2 as usize]) % 9
        })
        .unwrap();
        let w = walsh_full_fast(&f);
        for b1 in 0..p {
            for b2 in 0..p {
                let e = (g[b1 as usize] + p * ((p - b1 * b2 % p) % p)) % 9;
                let expect = CycInt::root(p, k, e).scale(p as i64);
                assert_eq!(*w.value(b1 * p + b2), expect);
            }
        }
        assert!(w.parseval_holds());
    }

    #[test]
    fn fast_equals_naive_mixed_domains() {
        let f27 = Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).unwrap());
        let f9 = Arc::new(ExtField::new(3, vec![2, 2, 1]).unwrap());
        let specs: Vec<Arc<DomainSpec>> = vec![
            dot(3, 2),
            DomainSpec::new(3, vec![Block::Field(f27)]).unwrap(),
            DomainSpec::new(3, vec![Block::Field(f9), Block::Dot(1)]).unwrap(),
            dot(5, 2),
        ];
        for (i, spec) in specs.iter().enumerate() {
            for k in [1u32, 2] {
                let f = random_function(spec, k, (i as u64 + 1) * 17 + k as u64);
                let fast = walsh_full_fast(&f);
                let naive = walsh_naive_full(&f);
                assert_eq!(fast.values(), naive.values(), "spec {i} k {k}");
                assert!(fast.parseval_holds());
            }
        }
    }

    #[test]
    fn inverse_transform_roundtrip() {
        let spec = dot(3, 3);
        for seed in 0..5 {
            let f = random_function(&spec, 2, seed);
            let w = walsh_full_fast(&f);
            let back = inverse_walsh(&w).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn corrupted_spectrum_is_rejected() {
        let spec = dot(3, 2);
        let f = random_function(&spec, 1, 99);
        let w = walsh_full_fast(&f);
        let mut vals = w.values().to_vec();
        vals[4] = CycInt::zero(3, 1);
        let bad = WalshSpectrum::new(spec, 1, vals).unwrap();
        assert!(inverse_walsh(&bad).is_err());
    }

    #[test]
    fn shift_by_linear_form_translates_spectrum() {
        // f'(x) = f(x) + p^{k-1} <b, x> has W_{f'}(a) = W_f(a - b)
        let spec = dot(3, 2);
        let k = 2u32;
        let f = random_function(&spec, k, 7);
        let w = walsh_full_fast(&f);
        for b in 0..spec.size() {
            let pb = spec.decode(b);
            let shifted = GFunction::build(&spec, k, |x| {
                (f.value(x) + 3 * spec.inner_product(&pb, &spec.decode(x))) % 9
            })
            .unwrap();
            let ws = walsh_full_fast(&shifted);
            for a in 0..spec.size() {
                let src = spec.add_index(a, spec.negate_index(b));
                assert_eq!(ws.value(a), w.value(src), "a={a} b={b}");
            }
        }
    }
}
