//! Value tables of generalized p-ary functions f: V_n -> Z_{p^k}, their
//! base-p digit decomposition, and the portable table file format.
//!
//! Digit convention: f(x) = Σ_{i=0}^{k-1} f_i(x)·p^{k-1-i}, so f_0 is the
//! most significant digit and the tail Σ_{i>=1} f_i·p^{k-1-i} is the value
//! mod p^{k-1}. The file format documents this to keep powers straight.

use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::domain::DomainSpec;
use crate::error::{Error, Result};

/// A generalized p-ary function as a full value table in canonical
/// enumeration order. Immutable after construction.
#[derive(Debug, Clone)]
pub struct GFunction {
    k: u32,
    spec: Arc<DomainSpec>,
    values: Vec<u64>,
    decomp: OnceLock<Arc<Decomposition>>,
}

impl PartialEq for GFunction {
    fn eq(&self, other: &Self) -> bool {
        self.k == other.k && *self.spec == *other.spec && self.values == other.values
    }
}

/// Base-p digits of a value table, most significant digit first, plus the
/// tail function into Z_{p^{k-1}}.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    /// digits[i] is the table of f_i: V_n -> F_p.
    pub digits: Vec<Vec<u64>>,
    /// tail[x] = f(x) mod p^{k-1}; all zero when k = 1.
    pub tail: Vec<u64>,
}

impl GFunction {
    pub fn new(spec: Arc<DomainSpec>, k: u32, values: Vec<u64>) -> Result<GFunction> {
        if k == 0 {
            return Err(Error::Domain("k must be at least 1".into()));
        }
        let modulus = spec
            .p()
            .checked_pow(k)
            .ok_or_else(|| Error::Domain(format!("p^{k} out of range")))?;
        if values.len() as u64 != spec.size() {
            return Err(Error::Domain(format!(
                "table has {} entries, domain has {}",
                values.len(),
                spec.size()
            )));
        }
        if values.iter().any(|&v| v >= modulus) {
            return Err(Error::Domain(format!("table entries must be reduced mod p^{k}")));
        }
        Ok(GFunction { k, spec, values, decomp: OnceLock::new() })
    }

    /// Builds a table by evaluating `f` at every canonical index.
    pub fn build(
        spec: &Arc<DomainSpec>,
        k: u32,
        mut f: impl FnMut(u64) -> u64,
    ) -> Result<GFunction> {
        let modulus = spec.p().pow(k);
        let values = (0..spec.size()).map(|i| f(i) % modulus).collect();
        GFunction::new(spec.clone(), k, values)
    }

    pub fn p(&self) -> u64 {
        self.spec.p()
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    /// p^k.
    pub fn modulus(&self) -> u64 {
        self.p().pow(self.k)
    }

    pub fn spec(&self) -> &Arc<DomainSpec> {
        &self.spec
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }

    pub fn value(&self, idx: u64) -> u64 {
        self.values[idx as usize]
    }

    /// Whether f(x) = f(-x) everywhere.
    pub fn is_even(&self) -> bool {
        (0..self.spec.size()).all(|x| self.values[x as usize] == self.values[self.spec.negate_index(x) as usize])
    }

    /// The base-p digit decomposition, computed once and cached.
    pub fn decompose(&self) -> Arc<Decomposition> {
        self.decomp
            .get_or_init(|| {
                let p = self.p();
                let k = self.k as usize;
                let tail_mod = p.pow(self.k - 1);
                let mut digits = vec![vec![0u64; self.values.len()]; k];
                let mut tail = vec![0u64; self.values.len()];
                for (x, &v) in self.values.iter().enumerate() {
                    let mut rem = v;
                    // least significant digit is f_{k-1}
                    for i in (0..k).rev() {
                        digits[i][x] = rem % p;
                        rem /= p;
                    }
                    tail[x] = v % tail_mod;
                }
                Arc::new(Decomposition { digits, tail })
            })
            .clone()
    }

    /// Scales a p-ary (k = 1) function by p^{k_target - 1}, the standard
    /// embedding that turns a bent function into a generalized bent one.
    pub fn embed_bent(&self, k_target: u32) -> Result<GFunction> {
        if self.k != 1 {
            return Err(Error::Domain("embed_bent expects a k = 1 input".into()));
        }
        let scale = self.p().pow(k_target - 1);
        let values = self.values.iter().map(|&v| v * scale).collect();
        GFunction::new(self.spec.clone(), k_target, values)
    }

    // ------------------------------------------------------------------
    // File format: line 1 "p k", line 2 the domain string, then p^n
    // whitespace-separated integers in canonical enumeration order.

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{} {}", self.p(), self.k)?;
        writeln!(w, "{}", self.spec.spec_string())?;
        let mut line = String::with_capacity(self.values.len() * 3);
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                line.push(' ');
            }
            line.push_str(&v.to_string());
        }
        writeln!(w, "{line}")?;
        Ok(())
    }

    pub fn write_file<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_to(std::io::BufWriter::new(f))
    }

    pub fn read_from<R: Read>(r: R) -> Result<GFunction> {
        let mut lines = BufReader::new(r).lines();
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty file".into() })?
            .map_err(Error::Io)?;
        let mut it = header.split_whitespace();
        let p: u64 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, msg: "expected \"p k\"".into() })?;
        let k: u32 = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| Error::Parse { line: 1, msg: "expected \"p k\"".into() })?;
        if it.next().is_some() {
            return Err(Error::Parse { line: 1, msg: "trailing tokens after \"p k\"".into() });
        }
        let spec_line = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 2, msg: "missing domain line".into() })?
            .map_err(Error::Io)?;
        let spec = DomainSpec::parse(p, &spec_line)
            .map_err(|e| Error::Parse { line: 2, msg: e.to_string() })?;
        let mut values = Vec::with_capacity(spec.size() as usize);
        let mut line_no = 2;
        for l in lines {
            line_no += 1;
            let l = l.map_err(Error::Io)?;
            for tok in l.split_whitespace() {
                let v: u64 = tok.parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad value {tok:?}"),
                })?;
                values.push(v);
            }
        }
        if values.len() as u64 != spec.size() {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected {} values, found {}", spec.size(), values.len()),
            });
        }
        GFunction::new(spec, k, values).map_err(|e| Error::Parse { line: line_no, msg: e.to_string() })
    }

    pub fn read_file<P: AsRef<Path>>(path: P) -> Result<GFunction> {
        GFunction::read_from(std::fs::File::open(path)?)
    }
}

/// Rebuilds a function from its digit tables (most significant first).
pub fn compose(spec: Arc<DomainSpec>, digits: &[Vec<u64>]) -> Result<GFunction> {
    if digits.is_empty() {
        return Err(Error::Domain("compose needs at least one digit table".into()));
    }
    let k = digits.len() as u32;
    let p = spec.p();
    let size = spec.size() as usize;
    for d in digits {
        if d.len() != size {
            return Err(Error::Domain("digit table length mismatch".into()));
        }
        if d.iter().any(|&v| v >= p) {
            return Err(Error::Domain("digit values must lie in [0, p)".into()));
        }
    }
    let values = (0..size)
        .map(|x| digits.iter().fold(0u64, |acc, d| acc * p + d[x]))
        .collect();
    GFunction::new(spec, k, values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Block;
    use crate::field::ExtField;
    use proptest::prelude::*;

    fn dot2(p: u64) -> Arc<DomainSpec> {
        DomainSpec::new(p, vec![Block::Dot(1), Block::Dot(1)]).unwrap()
    }

    /// Table over F_5 x F_5 for 5(x1^2+x2^2) + 2x1 + x2 mod 25.
    fn example6_like() -> GFunction {
        let spec = dot2(5);
        GFunction::build(&spec, 2, |idx| {
            let x1 = idx / 5;
            let x2 = idx % 5;
            5 * ((x1 * x1 + x2 * x2) % 5) + (2 * x1 + x2) % 5
        })
        .unwrap()
    }

    #[test]
    fn digit_order_is_most_significant_first() {
        let spec = dot2(5);
        let f = GFunction::new(spec, 2, vec![7; 25]).unwrap();
        let d = f.decompose();
        assert_eq!(d.digits[0][3], 1); // 7 = 5*1 + 2
        assert_eq!(d.digits[1][3], 2);
        assert_eq!(d.tail[3], 2);
    }

    #[test]
    fn k1_decomposition_is_identity() {
        let spec = dot2(3);
        let f = GFunction::build(&spec, 1, |i| i % 3).unwrap();
        let d = f.decompose();
        assert_eq!(d.digits.len(), 1);
        assert_eq!(d.digits[0], f.values().to_vec());
        assert!(d.tail.iter().all(|&t| t == 0));
    }

    #[test]
    fn example6_digit_at_point() {
        let f = example6_like();
        // point (x1, x2) = (1, 0) has index 5
        let d = f.decompose();
        assert_eq!(d.digits[1][5], 2);
        assert_eq!(d.digits[0][5], 1);
    }

    #[test]
    fn embed_scales_by_power() {
        let spec = dot2(3);
        let one = GFunction::build(&spec, 1, |_| 1).unwrap();
        let e = one.embed_bent(2).unwrap();
        assert!(e.values().iter().all(|&v| v == 3));
        assert_eq!(one.embed_bent(1).unwrap(), one);
        assert!(e.embed_bent(2).is_err());
    }

    #[test]
    fn file_roundtrip_is_bit_exact() {
        let field = Arc::new(ExtField::new(3, vec![1, 2, 0, 1]).unwrap());
        let spec = DomainSpec::new(3, vec![Block::Field(field), Block::Dot(1)]).unwrap();
        let f = GFunction::build(&spec, 2, |i| (i * 7 + 3) % 9).unwrap();
        let mut buf = Vec::new();
        f.write_to(&mut buf).unwrap();
        let g = GFunction::read_from(&buf[..]).unwrap();
        assert_eq!(f, g);
        let mut buf2 = Vec::new();
        g.write_to(&mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn read_rejects_malformed_input() {
        let good = {
            let mut b = Vec::new();
            example6_like().write_to(&mut b).unwrap();
            b
        };
        // truncate the value line
        let text = String::from_utf8(good).unwrap();
        let truncated = text.rsplit_once(' ').unwrap().0.to_string();
        let err = GFunction::read_from(truncated.as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));

        let err = GFunction::read_from(&b"5\ndot:1\n0 1 2 3 4\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));

        // value out of range for p^k
        let err = GFunction::read_from(&b"3 1\ndot:1\n0 1 3\n"[..]).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn compose_inverts_decompose(
            pk in prop_oneof![Just((3u64, 2u32)), Just((5, 2)), Just((5, 3))],
            seed in 0u64..10_000,
        ) {
            let (p, k) = pk;
            let spec = dot2(p);
            let modulus = p.pow(k);
            let mut state = seed.wrapping_mul(0x2545F4914F6CDD1D).wrapping_add(1);
            let f = GFunction::build(&spec, k, |_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                state % modulus
            }).unwrap();
            let d = f.decompose();
            let g = compose(spec, &d.digits).unwrap();
            prop_assert_eq!(f, g);
        }
    }
}
