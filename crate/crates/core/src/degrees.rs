//! ℤ₂ⁿ degrees and the commutation sign rule.
//!
//! A degree is a length-`n` vector of parities. Two homogeneous elements of
//! degrees `a` and `b` commute up to the sign `(-1)^⟨a,b⟩`, where `⟨·,·⟩` is
//! the standard scalar product mod 2.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported `n`.
pub const MAX_N: usize = 16;

/// An element of ℤ₂ⁿ.
///
/// Component `i` (0-based) is stored at bit `n - 1 - i`, so comparing the
/// packed integers is the lexicographic order on the bit vectors.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Degree {
    n: u8,
    mask: u32,
}

impl Degree {
    pub fn zero(n: usize) -> Result<Self> {
        check_n(n)?;
        Ok(Degree { n: n as u8, mask: 0 })
    }

    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        check_n(bits.len())?;
        let n = bits.len();
        let mut mask = 0u32;
        for (i, &b) in bits.iter().enumerate() {
            match b {
                0 => {}
                1 => mask |= 1 << (n - 1 - i),
                other => {
                    return Err(Error::Signature(format!(
                        "degree component must be 0 or 1, got {other}"
                    )))
                }
            }
        }
        Ok(Degree { n: n as u8, mask })
    }

    pub(crate) fn from_mask(n: usize, mask: u32) -> Self {
        debug_assert!(n <= MAX_N && mask >> n == 0);
        Degree { n: n as u8, mask }
    }

    pub fn n(&self) -> usize {
        self.n as usize
    }

    pub fn mask(&self) -> u32 {
        self.mask
    }

    pub fn bits(&self) -> Vec<u8> {
        let n = self.n();
        (0..n).map(|i| ((self.mask >> (n - 1 - i)) & 1) as u8).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.mask == 0
    }

    /// Odd degrees anticommute with themselves, so their generators square to zero.
    pub fn is_odd(&self) -> bool {
        self.mask.count_ones() % 2 == 1
    }

    pub fn is_even(&self) -> bool {
        !self.is_odd()
    }

    pub fn add(&self, other: &Degree) -> Result<Degree> {
        self.same_n(other)?;
        Ok(Degree { n: self.n, mask: self.mask ^ other.mask })
    }

    /// `⟨self, other⟩ mod 2`.
    pub fn scalar_product_parity(&self, other: &Degree) -> Result<u8> {
        self.same_n(other)?;
        Ok(self.parity_with(other))
    }

    /// Unchecked variant for callers that already share a signature.
    #[inline]
    pub(crate) fn parity_with(&self, other: &Degree) -> u8 {
        ((self.mask & other.mask).count_ones() & 1) as u8
    }

    fn same_n(&self, other: &Degree) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Signature(format!(
                "degree length mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

fn check_n(n: usize) -> Result<()> {
    if n > MAX_N {
        return Err(Error::Signature(format!("n = {n} exceeds the supported maximum {MAX_N}")));
    }
    Ok(())
}

pub fn degree_add(a: &Degree, b: &Degree) -> Result<Degree> {
    a.add(b)
}

pub fn scalar_product_parity(a: &Degree, b: &Degree) -> Result<u8> {
    a.scalar_product_parity(b)
}

/// The `2ⁿ − 1` nonzero degrees in lexicographic order; entry `i` is γ_{i+1}.
pub fn enumerate_nonzero_degrees(n: usize) -> Result<Vec<Degree>> {
    check_n(n)?;
    Ok((1u32..(1u32 << n)).map(|mask| Degree::from_mask(n, mask)).collect())
}

impl fmt::Debug for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, b) in self.bits().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Degree {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.bits().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Degree {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        Degree::from_bits(&bits).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(bits: &[u8]) -> Degree {
        Degree::from_bits(bits).unwrap()
    }

    #[test]
    fn addition_examples() {
        assert_eq!(degree_add(&d(&[0, 1]), &d(&[1, 1])).unwrap(), d(&[1, 0]));
        assert_eq!(degree_add(&d(&[1, 0]), &d(&[1, 0])).unwrap(), d(&[0, 0]));
        assert_eq!(degree_add(&d(&[0, 0]), &d(&[1, 1])).unwrap(), d(&[1, 1]));
    }

    #[test]
    fn sign_rule_examples() {
        // ξ:(0,1), θ:(1,0), z:(1,1)
        assert_eq!(scalar_product_parity(&d(&[0, 1]), &d(&[1, 0])).unwrap(), 0);
        assert_eq!(scalar_product_parity(&d(&[0, 1]), &d(&[1, 1])).unwrap(), 1);
        for m in 0..4u32 {
            let x = Degree::from_mask(2, m);
            assert_eq!(scalar_product_parity(&d(&[0, 0]), &x).unwrap(), 0);
        }
    }

    #[test]
    fn length_mismatch_is_signature_error() {
        assert!(matches!(degree_add(&d(&[0, 1]), &d(&[1])), Err(Error::Signature(_))));
        assert!(matches!(
            scalar_product_parity(&d(&[0, 1]), &d(&[1, 0, 0])),
            Err(Error::Signature(_))
        ));
        assert!(Degree::from_bits(&[2]).is_err());
        assert!(enumerate_nonzero_degrees(17).is_err());
    }

    #[test]
    fn enumeration() {
        assert_eq!(enumerate_nonzero_degrees(2).unwrap(), vec![d(&[0, 1]), d(&[1, 0]), d(&[1, 1])]);
        assert_eq!(enumerate_nonzero_degrees(1).unwrap(), vec![d(&[1])]);
        assert!(enumerate_nonzero_degrees(0).unwrap().is_empty());

        // independent oracle: all bit vectors, sorted as vectors
        let mut all: Vec<Vec<u8>> = (0..8u32)
            .map(|m| (0..3).map(|i| ((m >> i) & 1) as u8).collect())
            .collect();
        all.sort();
        all.remove(0);
        let got: Vec<Vec<u8>> = enumerate_nonzero_degrees(3).unwrap().iter().map(|x| x.bits()).collect();
        assert_eq!(got, all);
        assert_eq!(&got[..3], &[vec![0, 0, 1], vec![0, 1, 0], vec![0, 1, 1]]);
    }

    #[test]
    fn group_and_bilinearity_exhaustive() {
        for n in 0..=4usize {
            let all: Vec<Degree> = (0..1u32 << n).map(|m| Degree::from_mask(n, m)).collect();
            let zero = Degree::zero(n).unwrap();
            for a in &all {
                assert_eq!(a.add(&zero).unwrap(), *a);
                assert!(a.add(a).unwrap().is_zero());
                for b in &all {
                    assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                    for c in &all {
                        assert_eq!(
                            a.add(b).unwrap().add(c).unwrap(),
                            a.add(&b.add(c).unwrap()).unwrap()
                        );
                        let lhs = a.add(b).unwrap().scalar_product_parity(c).unwrap();
                        let rhs = a.scalar_product_parity(c).unwrap() ^ b.scalar_product_parity(c).unwrap();
                        assert_eq!(lhs, rhs);
                    }
                }
            }
            let list = enumerate_nonzero_degrees(n).unwrap();
            assert_eq!(list.len(), (1 << n) - 1);
            assert!(list.windows(2).all(|w| w[0].bits() < w[1].bits()));
        }
    }

    #[test]
    fn json_form() {
        let x = d(&[0, 1]);
        assert_eq!(serde_json::to_string(&x).unwrap(), "[0,1]");
        let back: Degree = serde_json::from_str("[0,1]").unwrap();
        assert_eq!(back, x);
    }
}
