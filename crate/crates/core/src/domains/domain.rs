use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::galgebra::GrassmannAlgebra;
use crate::gseries::{GeneratorSignature, Rational};

/// Base region of a domain: all of `ℝ^p` or a rational box.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Region {
    AllSpace,
    Box(Vec<(Rational, Rational)>),
}

/// Half-width of the window sampled when a region is all of `ℝ^p`.
const ALL_SPACE_WINDOW: i64 = 4;

impl Region {
    pub fn contains(&self, point: &[Rational]) -> bool {
        match self {
            Region::AllSpace => true,
            Region::Box(b) => b.len() == point.len() && b.iter().zip(point).all(|((l, u), x)| l <= x && x <= u),
        }
    }

    pub fn intersect(&self, other: &Region) -> Option<Region> {
        match (self, other) {
            (Region::AllSpace, r) | (r, Region::AllSpace) => Some(r.clone()),
            (Region::Box(a), Region::Box(b)) => {
                let mut out = Vec::with_capacity(a.len());
                for ((l1, u1), (l2, u2)) in a.iter().zip(b) {
                    let l = l1.max(l2).clone();
                    let u = u1.min(u2).clone();
                    if l >= u {
                        return None;
                    }
                    out.push((l, u));
                }
                Some(Region::Box(out))
            }
        }
    }

    /// Whether `other` lies inside `self`.
    pub fn includes(&self, other: &Region) -> bool {
        match (self, other) {
            (Region::AllSpace, _) => true,
            (Region::Box(_), Region::AllSpace) => false,
            (Region::Box(a), Region::Box(b)) => a.iter().zip(b).all(|((l1, u1), (l2, u2))| l1 <= l2 && u2 <= u1),
        }
    }

    fn bounds(&self, dims: usize) -> Vec<(Rational, Rational)> {
        match self {
            Region::AllSpace => {
                vec![(Rational::from_integer((-ALL_SPACE_WINDOW).into()), Rational::from_integer(ALL_SPACE_WINDOW.into())); dims]
            }
            Region::Box(b) => b.clone(),
        }
    }

    pub fn center(&self, dims: usize) -> Vec<Rational> {
        match self {
            Region::AllSpace => vec![Rational::zero(); dims],
            Region::Box(b) => b.iter().map(|(l, u)| (l + u) / Rational::from_integer(2.into())).collect(),
        }
    }

    /// Deterministic base-condition grid: `m^dims` Chebyshev-like nodes
    /// (rounded to denominator 1000) plus the box corners. Points are
    /// `sampled, not proven` evidence of range inclusion.
    pub fn sample_grid(&self, dims: usize, m: usize) -> Vec<Vec<Rational>> {
        let bounds = self.bounds(dims);
        let m = m.max(1);
        let nodes: Vec<Rational> = (0..m)
            .map(|k| {
                let t = (1.0 - (std::f64::consts::PI * (2 * k + 1) as f64 / (2 * m) as f64).cos()) / 2.0;
                Rational::new(BigInt::from((t * 1000.0).round() as i64), BigInt::from(1000))
            })
            .collect();
        let axes: Vec<Vec<Rational>> = bounds
            .iter()
            .map(|(l, u)| nodes.iter().map(|t| l + (u - l) * t).collect())
            .collect();
        let mut points = cartesian(&axes);
        let corner_axes: Vec<Vec<Rational>> = bounds.iter().map(|(l, u)| vec![l.clone(), u.clone()]).collect();
        points.extend(cartesian(&corner_axes));
        points
    }

    /// `side` distinct interior points per axis, in a product grid.
    pub fn interior_grid(&self, dims: usize, side: usize) -> Vec<Vec<Rational>> {
        let axes: Vec<Vec<Rational>> = match self {
            Region::AllSpace => vec![(0..side as i64).map(|k| Rational::from_integer(k.into())).collect(); dims],
            Region::Box(b) => b
                .iter()
                .map(|(l, u)| {
                    (0..side)
                        .map(|k| l + (u - l) * Rational::new(BigInt::from(k + 1), BigInt::from(side + 1)))
                        .collect()
                })
                .collect(),
        };
        cartesian(&axes)
    }
}

pub(crate) fn cartesian(axes: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut out = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for v in axis {
                let mut p = prefix.clone();
                p.push(v.clone());
                next.push(p);
            }
        }
        out = next;
    }
    out
}

pub(crate) fn point_strings(point: &[Rational]) -> Vec<String> {
    point.iter().map(|x| x.to_string()).collect()
}

/// A ℤ₂ⁿ-domain `𝒰^{p|q}`: `p` degree-zero coordinates over a base region
/// and formal coordinates counted per nonzero degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Domain {
    p: usize,
    formal: Arc<GeneratorSignature>,
    region: Region,
}

impl Domain {
    pub fn new(n: usize, p: usize, q: &[usize], region: Region) -> Result<Self> {
        let formal = Arc::new(GeneratorSignature::new(n, q)?);
        if let Region::Box(b) = &region {
            if b.len() != p {
                return Err(Error::Signature(format!("box has {} sides but p = {p}", b.len())));
            }
            if let Some((l, u)) = b.iter().find(|(l, u)| l >= u) {
                return Err(Error::Range {
                    message: format!("box side [{l}, {u}] has empty interior"),
                    witness: vec![],
                });
            }
        }
        Ok(Domain { p, formal, region })
    }

    pub fn all_space(n: usize, p: usize, q: &[usize]) -> Result<Self> {
        Self::new(n, p, q, Region::AllSpace)
    }

    pub fn n(&self) -> usize {
        self.formal.n()
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn q(&self) -> &[usize] {
        self.formal.q()
    }

    /// Number of formal coordinates `|q|`.
    pub fn formal_count(&self) -> usize {
        self.formal.num_generators()
    }

    pub fn coordinate_count(&self) -> usize {
        self.p + self.formal_count()
    }

    pub fn formal_signature(&self) -> &Arc<GeneratorSignature> {
        &self.formal
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    pub fn with_region(&self, region: Region) -> Result<Self> {
        Domain::new(self.n(), self.p, self.q(), region)
    }

    /// Same coordinates (`n`, `p`, `q`), regions ignored.
    pub fn same_shape(&self, other: &Domain) -> bool {
        self.p == other.p && self.formal == other.formal
    }

    /// The ℤ₂ⁿ-point `ℝ^{0|q}` of this domain's formal coordinates as an algebra.
    pub fn formal_algebra(&self, truncation: usize) -> GrassmannAlgebra {
        GrassmannAlgebra::from_signature(self.formal.clone(), truncation)
    }

    /// Degree of target coordinate `i` when this domain is a target: zero for
    /// the even coordinates, the formal coordinate's degree after.
    pub fn coordinate_degree(&self, i: usize) -> crate::degrees::Degree {
        if i < self.p {
            self.formal.zero_degree()
        } else {
            self.formal.generator_degree(i - self.p)
        }
    }

    /// `y1..yp` for even coordinates, `eta1..` for formal ones.
    pub fn coordinate_name(&self, i: usize) -> String {
        if i < self.p {
            format!("y{}", i + 1)
        } else {
            format!("eta{}", i - self.p + 1)
        }
    }

    pub fn coordinate_index(&self, name: &str) -> Result<usize> {
        let parse = |rest: &str| rest.parse::<usize>().ok().filter(|&k| k >= 1);
        let idx = if let Some(k) = name.strip_prefix("eta").and_then(parse) {
            (k <= self.formal_count()).then(|| self.p + k - 1)
        } else if let Some(k) = name.strip_prefix('y').and_then(parse) {
            (k <= self.p).then(|| k - 1)
        } else {
            None
        };
        idx.ok_or_else(|| Error::Spec(format!("unknown coordinate '{name}'")))
    }

    /// Concatenated coordinates; formal coordinates of each degree class list
    /// `self`'s first.
    pub fn product(&self, other: &Domain) -> Result<Domain> {
        if self.n() != other.n() {
            return Err(Error::Signature("product of domains needs equal n".into()));
        }
        let q: Vec<usize> = self.q().iter().zip(other.q()).map(|(a, b)| a + b).collect();
        let region = match (&self.region, &other.region) {
            (Region::AllSpace, Region::AllSpace) => Region::AllSpace,
            (a, b) => {
                let mut sides = a.bounds(self.p);
                sides.extend(b.bounds(other.p));
                if (matches!(a, Region::AllSpace) && self.p > 0) || (matches!(b, Region::AllSpace) && other.p > 0) {
                    return Err(Error::Structure("product of a box with all of R^p is not a box".into()));
                }
                Region::Box(sides)
            }
        };
        Domain::new(self.n(), self.p + other.p, &q, region)
    }

    /// Index of `other`'s formal coordinate `j` inside `self.product(other)`,
    /// or of `self`'s when `second` is false.
    pub(crate) fn product_formal_index(&self, other: &Domain, second: bool, j: usize) -> usize {
        let sig = if second { &other.formal } else { &self.formal };
        let class = sig.group_of(j);
        let within = j - sig.group_start(class);
        let start: usize = (0..class).map(|c| self.q()[c] + other.q()[c]).sum();
        start + if second { self.q()[class] } else { 0 } + within
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gseries::{int, rat};

    #[test]
    fn regions() {
        let b = Region::Box(vec![(int(0), int(2))]);
        assert!(b.contains(&[int(1)]));
        assert!(!b.contains(&[rat(5, 2)]));
        let c = Region::Box(vec![(int(1), int(3))]);
        assert_eq!(b.intersect(&c), Some(Region::Box(vec![(int(1), int(2))])));
        assert_eq!(b.intersect(&Region::Box(vec![(int(2), int(3))])), None);
        let grid = b.sample_grid(1, 4);
        assert_eq!(grid.len(), 6);
        assert!(grid.iter().all(|p| b.contains(p)));
        assert_eq!(b.interior_grid(1, 3), vec![vec![rat(1, 2)], vec![int(1)], vec![rat(3, 2)]]);
    }

    #[test]
    fn domains_and_names() {
        let d = Domain::new(2, 1, &[1, 0, 2], Region::AllSpace).unwrap();
        assert_eq!(d.coordinate_count(), 4);
        assert_eq!(d.coordinate_name(0), "y1");
        assert_eq!(d.coordinate_name(3), "eta3");
        assert_eq!(d.coordinate_index("eta2").unwrap(), 2);
        assert!(d.coordinate_index("y2").is_err());
        assert!(Domain::new(1, 1, &[1], Region::Box(vec![(int(1), int(1))])).is_err());
        assert!(Domain::new(1, 2, &[1], Region::Box(vec![(int(0), int(1))])).is_err());

        let e = Domain::new(2, 2, &[0, 1, 1], Region::AllSpace).unwrap();
        let prod = d.product(&e).unwrap();
        assert_eq!(prod.p(), 3);
        assert_eq!(prod.q(), &[1, 1, 3]);
        // d's class-3 coordinates come first, then e's
        assert_eq!(d.product_formal_index(&e, false, 1), 2);
        assert_eq!(d.product_formal_index(&e, true, 0), 1);
        assert_eq!(d.product_formal_index(&e, true, 1), 4);
    }
}
