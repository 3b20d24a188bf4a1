//! Product domains V_n: ordered blocks of plain dot-product coordinates
//! (`dot:m`) and trace-form field blocks (`field:m:poly=...`), with one
//! canonical enumeration so that value-table files are portable.
//!
//! Canonical enumeration: the last block varies fastest. Inside `dot:m` the
//! coordinates (x_1, ..., x_m) enumerate with x_m fastest; inside `field:m`
//! the element sum c_u z^u has block index sum c_u p^u, so the p scalars of
//! the prime subfield come first. Equivalently, a point index is the base-p
//! numeral formed by all scalar coordinates, and the inner product pairs
//! those digits against the trace-dual digits of the other argument.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::field::{ExtField, FieldElem};

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    /// F_p^m with the usual dot product.
    Dot(usize),
    /// F_{p^m} with the trace form <a, x> = Tr(ax).
    Field(Arc<ExtField>),
}

impl Block {
    pub fn dimension(&self) -> usize {
        match self {
            Block::Dot(m) => *m,
            Block::Field(f) => f.degree(),
        }
    }
}

/// One component of a point, matching the block shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    Dot(Vec<u64>),
    Field(FieldElem),
}

/// A point of V_n, stored blockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub comps: Vec<Component>,
}

impl Point {
    pub fn field_comp(&self, b: usize) -> &FieldElem {
        match &self.comps[b] {
            Component::Field(x) => x,
            Component::Dot(_) => panic!("block {b} is a dot block"),
        }
    }

    pub fn dot_comp(&self, b: usize) -> &[u64] {
        match &self.comps[b] {
            Component::Dot(v) => v,
            Component::Field(_) => panic!("block {b} is a field block"),
        }
    }
}

/// The shape of V_n. Immutable after construction; safe to share.
pub struct DomainSpec {
    p: u64,
    blocks: Vec<Block>,
    n: usize,
    size: u64,
    /// Mixed-radix weight of each block (the size of everything after it).
    block_weights: Vec<u64>,
    dual_perm: OnceLock<Arc<Vec<u32>>>,
}

impl fmt::Debug for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DomainSpec(p={}, {})", self.p, self.spec_string())
    }
}

impl PartialEq for DomainSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.blocks == other.blocks
    }
}

impl DomainSpec {
    pub fn new(p: u64, blocks: Vec<Block>) -> Result<Arc<DomainSpec>> {
        if blocks.is_empty() {
            return Err(Error::Domain("domain needs at least one block".into()));
        }
        let mut n = 0usize;
        for b in &blocks {
            match b {
                Block::Dot(m) => {
                    if *m == 0 {
                        return Err(Error::Domain("dot block must have m >= 1".into()));
                    }
                    n += m;
                }
                Block::Field(f) => {
                    if f.p() != p {
                        return Err(Error::Domain(format!(
                            "field block has characteristic {}, domain has {p}",
                            f.p()
                        )));
                    }
                    n += f.degree();
                }
            }
        }
        let size = p
            .checked_pow(n as u32)
            .filter(|&s| s <= (1 << 31))
            .ok_or_else(|| Error::Domain(format!("domain size p^{n} out of supported range")))?;
        let mut block_weights = vec![1u64; blocks.len()];
        for i in (0..blocks.len().saturating_sub(1)).rev() {
            block_weights[i] = block_weights[i + 1] * p.pow(blocks[i + 1].dimension() as u32);
        }
        Ok(Arc::new(DomainSpec {
            p,
            blocks,
            n,
            size,
            block_weights,
            dual_perm: OnceLock::new(),
        }))
    }

    /// Parses the per-block text syntax, comma separated: `dot:m` or
    /// `field:m:poly=c0,c1,...,1` (constant term first, monic).
    pub fn parse(p: u64, text: &str) -> Result<Arc<DomainSpec>> {
        let tokens: Vec<&str> = text.split(',').map(str::trim).collect();
        let mut blocks = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let t = tokens[i];
            if let Some(ms) = t.strip_prefix("dot:") {
                let m: usize = ms
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad dot block {t:?}")))?;
                blocks.push(Block::Dot(m));
                i += 1;
            } else if let Some(rest) = t.strip_prefix("field:") {
                let (ms, first) = rest
                    .split_once(":poly=")
                    .ok_or_else(|| Error::Domain(format!("bad field block {t:?}")))?;
                let m: usize = ms
                    .parse()
                    .map_err(|_| Error::Domain(format!("bad field degree in {t:?}")))?;
                // the polynomial's coefficients continue through the next m tokens
                let mut coeffs = vec![first.to_string()];
                for _ in 0..m {
                    i += 1;
                    let tok = tokens.get(i).ok_or_else(|| {
                        Error::Domain(format!("field:{m} block needs {} coefficients", m + 1))
                    })?;
                    coeffs.push(tok.to_string());
                }
                let field = ExtField::parse(p, &coeffs.join(","))?;
                if field.degree() != m {
                    return Err(Error::Domain(format!(
                        "field block declares degree {m} but polynomial has degree {}",
                        field.degree()
                    )));
                }
                blocks.push(Block::Field(Arc::new(field)));
                i += 1;
            } else {
                return Err(Error::Domain(format!("unrecognized block {t:?}")));
            }
        }
        DomainSpec::new(p, blocks)
    }

    /// Canonical text form; inverse of [`Self::parse`].
    pub fn spec_string(&self) -> String {
        self.blocks
            .iter()
            .map(|b| match b {
                Block::Dot(m) => format!("dot:{m}"),
                Block::Field(f) => format!("field:{}:poly={}", f.degree(), f.min_poly_string()),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Total dimension n over F_p.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of points p^n.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_index(&self, idx: u64, b: usize) -> u64 {
        let w = self.block_weights[b];
        let span = self.p.pow(self.blocks[b].dimension() as u32);
        (idx / w) % span
    }

    pub fn decode(&self, idx: u64) -> Point {
        debug_assert!(idx < self.size);
        let comps = self
            .blocks
            .iter()
            .enumerate()
            .map(|(b, block)| {
                let bi = self.block_index(idx, b);
                match block {
                    Block::Dot(m) => {
                        // x_m is the least significant digit
                        let mut v = vec![0u64; *m];
                        let mut rem = bi;
                        for u in (0..*m).rev() {
                            v[u] = rem % self.p;
                            rem /= self.p;
                        }
                        Component::Dot(v)
                    }
                    Block::Field(f) => Component::Field(f.elem_from_index(bi)),
                }
            })
            .collect();
        Point { comps }
    }

    pub fn encode(&self, pt: &Point) -> u64 {
        let mut idx = 0u64;
        for (b, (block, comp)) in self.blocks.iter().zip(&pt.comps).enumerate() {
            let bi = match (block, comp) {
                (Block::Dot(m), Component::Dot(v)) => {
                    assert_eq!(v.len(), *m, "dot component shape mismatch");
                    v.iter().fold(0u64, |acc, &c| acc * self.p + c % self.p)
                }
                (Block::Field(f), Component::Field(x)) => f.elem_index(x),
                _ => panic!("component {b} does not match block shape"),
            };
            idx += bi * self.block_weights[b];
        }
        idx
    }

    pub fn zero_point(&self) -> Point {
        self.decode(0)
    }

    /// Componentwise sum; in every block this is digitwise addition mod p.
    pub fn add_index(&self, a: u64, b: u64) -> u64 {
        let mut out = 0u64;
        let mut wa = a;
        let mut wb = b;
        let mut w = 1u64;
        for _ in 0..self.n {
            out += ((wa % self.p + wb % self.p) % self.p) * w;
            wa /= self.p;
            wb /= self.p;
            w *= self.p;
        }
        out
    }

    /// Componentwise additive inverse.
    pub fn negate_index(&self, a: u64) -> u64 {
        let mut out = 0u64;
        let mut wa = a;
        let mut w = 1u64;
        for _ in 0..self.n {
            out += ((self.p - wa % self.p) % self.p) * w;
            wa /= self.p;
            w *= self.p;
        }
        out
    }

    pub fn negate(&self, pt: &Point) -> Point {
        let comps = pt
            .comps
            .iter()
            .zip(&self.blocks)
            .map(|(c, b)| match (c, b) {
                (Component::Dot(v), _) => {
                    Component::Dot(v.iter().map(|&x| (self.p - x % self.p) % self.p).collect())
                }
                (Component::Field(x), Block::Field(f)) => Component::Field(f.neg(x)),
                _ => panic!("component does not match block shape"),
            })
            .collect();
        Point { comps }
    }

    /// The nondegenerate inner product: dot products on dot blocks, Tr(a·x)
    /// on field blocks, summed mod p.
    pub fn inner_product(&self, a: &Point, x: &Point) -> u64 {
        assert_eq!(a.comps.len(), self.blocks.len(), "point shape mismatch");
        assert_eq!(x.comps.len(), self.blocks.len(), "point shape mismatch");
        let mut acc = 0u64;
        for ((block, ca), cx) in self.blocks.iter().zip(&a.comps).zip(&x.comps) {
            match (block, ca, cx) {
                (Block::Dot(m), Component::Dot(va), Component::Dot(vx)) => {
                    assert_eq!(va.len(), *m);
                    assert_eq!(vx.len(), *m);
                    for (u, v) in va.iter().zip(vx) {
                        acc = (acc + u * v) % self.p;
                    }
                }
                (Block::Field(f), Component::Field(ea), Component::Field(ex)) => {
                    acc = (acc + f.trace(&f.mul(ea, ex))) % self.p;
                }
                _ => panic!("component does not match block shape"),
            }
        }
        acc
    }

    pub fn inner_product_idx(&self, a: u64, x: u64) -> u64 {
        self.inner_product(&self.decode(a), &self.decode(x))
    }

    /// Digit-level linear map A* sending a to coordinates t(a) with
    /// <a, x> = Σ_d t(a)_d · digit_d(x) mod p; the identity on dot blocks,
    /// the trace-Gram matrix on field blocks. This is what lets a single
    /// dot-coordinate butterfly serve every inner product.
    pub fn dual_index(&self, a: u64) -> u64 {
        let mut out = 0u64;
        for (b, block) in self.blocks.iter().enumerate() {
            let bi = self.block_index(a, b);
            let dual_bi = match block {
                Block::Dot(_) => bi,
                Block::Field(f) => {
                    let t = f.dual_coords(&f.elem_from_index(bi));
                    // same weights as the canonical field-block index
                    t.iter().rev().fold(0u64, |acc, &d| acc * self.p + d)
                }
            };
            out += dual_bi * self.block_weights[b];
        }
        out
    }

    /// Inverse of [`Self::dual_index`].
    pub fn dual_index_inverse(&self, t: u64) -> u64 {
        let mut out = 0u64;
        for (b, block) in self.blocks.iter().enumerate() {
            let bi = self.block_index(t, b);
            let primal_bi = match block {
                Block::Dot(_) => bi,
                Block::Field(f) => {
                    let mut digits = vec![0u64; f.degree()];
                    let mut rem = bi;
                    for d in digits.iter_mut() {
                        *d = rem % self.p;
                        rem /= self.p;
                    }
                    f.elem_index(&f.elem_from_dual_coords(&digits))
                }
            };
            out += primal_bi * self.block_weights[b];
        }
        out
    }

    /// The full permutation a -> dual_index(a), computed once and cached.
    pub fn dual_permutation(&self) -> Arc<Vec<u32>> {
        self.dual_perm
            .get_or_init(|| {
                Arc::new((0..self.size).map(|a| self.dual_index(a) as u32).collect())
            })
            .clone()
    }

    /// Base-p digits of an index, least significant first (n of them).
    pub fn index_digits(&self, idx: u64) -> Vec<u64> {
        let mut digits = vec![0u64; self.n];
        let mut rem = idx;
        for d in digits.iter_mut() {
            *d = rem % self.p;
            rem /= self.p;
        }
        digits
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f25() -> Arc<ExtField> {
        Arc::new(ExtField::new(5, vec![2, 4, 1]).unwrap())
    }

    fn f49() -> Arc<ExtField> {
        Arc::new(ExtField::new(7, vec![3, 6, 1]).unwrap())
    }

    #[test]
    fn parse_and_roundtrip_spec_string() {
        let s = DomainSpec::parse(5, "field:2:poly=2,4,1,dot:1,dot:1").unwrap();
        assert_eq!(s.n(), 4);
        assert_eq!(s.size(), 625);
        assert_eq!(s.spec_string(), "field:2:poly=2,4,1,dot:1,dot:1");
        let again = DomainSpec::parse(5, &s.spec_string()).unwrap();
        assert_eq!(*s, *again);
        assert!(DomainSpec::parse(5, "grid:3").is_err());
        assert!(DomainSpec::parse(5, "field:2:poly=2,4").is_err());
    }

    #[test]
    fn dot_inner_product() {
        let s = DomainSpec::new(5, vec![Block::Dot(2)]).unwrap();
        let a = Point { comps: vec![Component::Dot(vec![1, 2])] };
        let x = Point { comps: vec![Component::Dot(vec![3, 4])] };
        assert_eq!(s.inner_product(&a, &x), 1); // 3 + 8 = 11 = 1 mod 5
        let zero = s.zero_point();
        assert_eq!(s.inner_product(&zero, &x), 0);
        assert_eq!(s.inner_product(&a, &x), s.inner_product(&x, &a));
    }

    #[test]
    fn trace_inner_product() {
        let s = DomainSpec::new(5, vec![Block::Field(f25())]).unwrap();
        let f = f25();
        let z = Point { comps: vec![Component::Field(f.generator())] };
        // <z, z> = Tr(z^2) = Tr(z + 3) = 1 + 3*2 = 7 = 2 mod 5
        assert_eq!(s.inner_product(&z, &z), 2);
    }

    #[test]
    fn negate_examples() {
        let s = DomainSpec::new(5, vec![Block::Dot(2)]).unwrap();
        let a = Point { comps: vec![Component::Dot(vec![1, 2])] };
        assert_eq!(s.negate(&a), Point { comps: vec![Component::Dot(vec![4, 3])] });
        assert_eq!(s.negate(&s.zero_point()), s.zero_point());
        for idx in 0..s.size() {
            assert_eq!(s.negate_index(s.negate_index(idx)), idx);
            assert_eq!(s.encode(&s.negate(&s.decode(idx))), s.negate_index(idx));
        }
    }

    #[test]
    fn index_roundtrip_mixed() {
        let field = Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).unwrap());
        let s = DomainSpec::new(3, vec![Block::Field(field), Block::Dot(2)]).unwrap();
        assert_eq!(s.size(), 3u64.pow(5));
        for idx in 0..s.size() {
            assert_eq!(s.encode(&s.decode(idx)), idx);
        }
    }

    #[test]
    fn add_index_matches_componentwise() {
        let field = Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).unwrap());
        let s = DomainSpec::new(3, vec![Block::Dot(1), Block::Field(field)]).unwrap();
        for a in (0..s.size()).step_by(7) {
            for b in (0..s.size()).step_by(11) {
                let pa = s.decode(a);
                let pb = s.decode(b);
                let sum = s.add_index(a, b);
                // field addition is coordinatewise, dot addition likewise
                let expect_field = {
                    let fa = pa.field_comp(1);
                    let fb = pb.field_comp(1);
                    match &s.blocks()[1] {
                        Block::Field(f) => f.add(fa, fb),
                        _ => unreachable!(),
                    }
                };
                let ps = s.decode(sum);
                assert_eq!(ps.field_comp(1), &expect_field);
                assert_eq!(ps.dot_comp(0)[0], (pa.dot_comp(0)[0] + pb.dot_comp(0)[0]) % 3);
            }
        }
    }

    #[test]
    fn nondegenerate_and_symmetric_small() {
        let field = Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).unwrap());
        let s = DomainSpec::new(3, vec![Block::Field(field), Block::Dot(1)]).unwrap();
        let pts: Vec<Point> = (0..s.size()).map(|i| s.decode(i)).collect();
        for (ai, a) in pts.iter().enumerate() {
            if ai != 0 {
                assert!(
                    pts.iter().any(|x| s.inner_product(a, x) != 0),
                    "inner product degenerate at {ai}"
                );
            }
            for x in pts.iter().step_by(13) {
                assert_eq!(s.inner_product(a, x), s.inner_product(x, a));
            }
        }
    }

    #[test]
    fn dual_index_linearizes_inner_product() {
        // <a, x> must equal the digit dot product of dual(a) and x.
        let field = Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).unwrap());
        let s = DomainSpec::new(3, vec![Block::Field(field), Block::Dot(1)]).unwrap();
        for a in 0..s.size() {
            let t = s.dual_index(a);
            assert_eq!(s.dual_index_inverse(t), a);
            let td = s.index_digits(t);
            for x in (0..s.size()).step_by(5) {
                let xd = s.index_digits(x);
                let dot: u64 = td.iter().zip(&xd).map(|(u, v)| u * v).sum::<u64>() % 3;
                assert_eq!(dot, s.inner_product_idx(a, x), "a={a} x={x}");
            }
        }
    }

    #[test]
    fn dual_basis_delta_f25() {
        let f = f25();
        let duals = f.dual_basis();
        for u in 0..2 {
            for (v, d) in duals.iter().enumerate() {
                assert_eq!(f.trace(&f.mul(&f.gen_pow(u as u64), d)), u64::from(u == v));
            }
        }
    }

    #[test]
    fn example4_domain_randomized_oracle() {
        // three F_49 trace blocks: dual-coordinate dot product vs direct traces
        let s = DomainSpec::new(
            7,
            vec![Block::Field(f49()), Block::Field(f49()), Block::Field(f49())],
        )
        .unwrap();
        let mut state = 0x9E3779B97F4A7C15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..1000 {
            let a = next() % s.size();
            let x = next() % s.size();
            let td = s.index_digits(s.dual_index(a));
            let xd = s.index_digits(x);
            let dot: u64 = td.iter().zip(&xd).map(|(u, v)| u * v).sum::<u64>() % 7;
            assert_eq!(dot, s.inner_product_idx(a, x));
        }
    }
}
