//! Coordinate-realized finite-dimensional normed spaces.
//!
//! Every space is `R^n` with one of a small family of norms. Primal vectors are
//! plain `&[f64]` slices; elements of the dual space are wrapped in
//! [`Covector`] so that gradients are never silently confused with points.
//! The dual norm of each family is evaluated in closed form:
//!
//! | primal            | dual                      |
//! |-------------------|---------------------------|
//! | euclidean         | euclidean                 |
//! | weighted (w)      | weighted (1/w)            |
//! | lp, 1 < p < inf   | lq, 1/p + 1/q = 1         |
//! | linf              | l1                        |
//! | l1                | linf                      |
//!
//! Only the Euclidean and weighted Euclidean kinds carry an inner product, so
//! only they admit a Riesz map.

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};

/// An element of the dual space, measured in the dual norm.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Covector(pub Vec<f64>);

impl Covector {
    pub fn zeros(dim: usize) -> Self {
        Covector(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `self - other`, componentwise.
    pub fn sub(&self, other: &Covector) -> Covector {
        Covector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Covector {
        Covector(self.0.iter().map(|a| a * s).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0.0)
    }
}

impl From<Vec<f64>> for Covector {
    fn from(v: Vec<f64>) -> Self {
        Covector(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NormKind {
    Euclidean,
    /// `sqrt(sum w_i v_i^2)` with strictly positive weights.
    Weighted(Vec<f64>),
    /// `1 < p < inf`, `p != 2`.
    Lp(f64),
    Linf,
    L1,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormedSpace {
    dim: usize,
    kind: NormKind,
}

impl NormedSpace {
    pub fn new(dim: usize, kind: NormKind) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        let kind = match kind {
            NormKind::Weighted(w) => {
                check_dim(dim, w.len())?;
                if w.iter().any(|&wi| !(wi > 0.0 && wi.is_finite())) {
                    return Err(Error::InvalidSpace(
                        "weights must be positive and finite".into(),
                    ));
                }
                NormKind::Weighted(w)
            }
            NormKind::Lp(p) => return Self::lp(dim, p),
            other => other,
        };
        Ok(NormedSpace { dim, kind })
    }

    pub fn euclidean(dim: usize) -> Result<Self> {
        Self::new(dim, NormKind::Euclidean)
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        Self::new(weights.len(), NormKind::Weighted(weights))
    }

    pub fn linf(dim: usize) -> Result<Self> {
        Self::new(dim, NormKind::Linf)
    }

    pub fn l1(dim: usize) -> Result<Self> {
        Self::new(dim, NormKind::L1)
    }

    /// The `l^p` norm. `p = 1`, `p = 2` and `p = inf` map onto the dedicated
    /// `L1`, `Euclidean` and `Linf` kinds.
    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSpace("dimension must be positive".into()));
        }
        let kind = if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidSpace(format!("p = {p} is not in [1, inf]")));
        } else if p == 1.0 {
            NormKind::L1
        } else if p == 2.0 {
            NormKind::Euclidean
        } else if p.is_infinite() {
            NormKind::Linf
        } else {
            NormKind::Lp(p)
        };
        Ok(NormedSpace { dim, kind })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn is_hilbert(&self) -> bool {
        matches!(self.kind, NormKind::Euclidean | NormKind::Weighted(_))
    }

    /// Short human-readable label, e.g. `linf` or `lp(3)`.
    pub fn label(&self) -> String {
        match &self.kind {
            NormKind::Euclidean => "euclidean".into(),
            NormKind::Weighted(_) => "weighted".into(),
            NormKind::Lp(p) => format!("lp({p})"),
            NormKind::Linf => "linf".into(),
            NormKind::L1 => "l1".into(),
        }
    }

    pub fn norm(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        Ok(self.norm_unchecked(v))
    }

    pub fn dual_norm(&self, phi: &Covector) -> Result<f64> {
        check_dim(self.dim, phi.dim())?;
        Ok(self.dual_norm_unchecked(phi.as_slice()))
    }

    pub(crate) fn norm_unchecked(&self, v: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Euclidean => l2(v),
            NormKind::Weighted(w) => v
                .iter()
                .zip(w)
                .map(|(x, wi)| wi * x * x)
                .sum::<f64>()
                .sqrt(),
            NormKind::Lp(p) => lp_norm(v, *p),
            NormKind::Linf => linf(v),
            NormKind::L1 => l1(v),
        }
    }

    pub(crate) fn dual_norm_unchecked(&self, phi: &[f64]) -> f64 {
        match &self.kind {
            NormKind::Euclidean => l2(phi),
            NormKind::Weighted(w) => phi
                .iter()
                .zip(w)
                .map(|(x, wi)| x * x / wi)
                .sum::<f64>()
                .sqrt(),
            NormKind::Lp(p) => lp_norm(phi, conjugate_exponent(*p)),
            NormKind::Linf => l1(phi),
            NormKind::L1 => linf(phi),
        }
    }

    /// Inner product of two primal vectors; Hilbert kinds only.
    pub fn inner(&self, u: &[f64], v: &[f64]) -> Result<f64> {
        let r = self.riesz(u)?;
        pairing(&r, v)
    }

    /// The Riesz isomorphism `H -> H*`.
    pub fn riesz(&self, v: &[f64]) -> Result<Covector> {
        check_dim(self.dim, v.len())?;
        match &self.kind {
            NormKind::Euclidean => Ok(Covector(v.to_vec())),
            NormKind::Weighted(w) => Ok(Covector(v.iter().zip(w).map(|(x, wi)| wi * x).collect())),
            _ => Err(Error::RieszUndefined(self.label())),
        }
    }

    /// A vector `z` with `norm(z) = target_norm` on which `phi` attains its
    /// dual norm, i.e. `pairing(phi, z) = dual_norm(phi) * target_norm`.
    pub fn norming_vector(&self, phi: &Covector, target_norm: f64) -> Result<Vec<f64>> {
        check_dim(self.dim, phi.dim())?;
        if phi.is_zero() {
            return Err(Error::ZeroCovector);
        }
        if !(target_norm > 0.0 && target_norm.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "target norm must be positive, got {target_norm}"
            )));
        }
        let phi = phi.as_slice();
        let direction: Vec<f64> = match &self.kind {
            NormKind::Euclidean => phi.to_vec(),
            NormKind::Weighted(w) => phi.iter().zip(w).map(|(x, wi)| x / wi).collect(),
            NormKind::Lp(p) => {
                let q = conjugate_exponent(*p);
                let m = linf(phi);
                phi.iter()
                    .map(|&x| (x / m).abs().powf(q - 1.0).copysign(x))
                    .collect()
            }
            NormKind::Linf => phi
                .iter()
                .map(|&x| if x == 0.0 { 0.0 } else { x.signum() })
                .collect(),
            NormKind::L1 => {
                // first coordinate of maximal modulus
                let (k, _) = phi.iter().enumerate().fold((0, -1.0), |acc, (i, &x)| {
                    if x.abs() > acc.1 {
                        (i, x.abs())
                    } else {
                        acc
                    }
                });
                let mut e = vec![0.0; self.dim];
                e[k] = phi[k].signum();
                e
            }
        };
        let n = self.norm_unchecked(&direction);
        Ok(direction.iter().map(|d| d * (target_norm / n)).collect())
    }

    /// `norm(a+b)^2 + norm(a-b)^2 - 2 norm(a)^2 - 2 norm(b)^2`; identically
    /// zero exactly when the norm comes from an inner product.
    pub fn parallelogram_defect(&self, a: &[f64], b: &[f64]) -> Result<f64> {
        check_dim(self.dim, a.len())?;
        check_dim(self.dim, b.len())?;
        let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + y).collect();
        let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
        let sq = |v: &[f64]| {
            let n = self.norm_unchecked(v);
            n * n
        };
        Ok(sq(&sum) + sq(&diff) - 2.0 * sq(a) - 2.0 * sq(b))
    }

    /// `norm(e_i)` of the dual norm, i.e. the extent of the primal unit ball
    /// along coordinate `i`.
    pub(crate) fn coordinate_extent(&self, i: usize) -> f64 {
        match &self.kind {
            NormKind::Weighted(w) => 1.0 / w[i].sqrt(),
            _ => 1.0,
        }
    }
}

/// The bilinear pairing `sum phi_i v_i`.
pub fn pairing(phi: &Covector, v: &[f64]) -> Result<f64> {
    check_dim(phi.dim(), v.len())?;
    Ok(dot(phi.as_slice(), v))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn conjugate_exponent(p: f64) -> f64 {
    p / (p - 1.0)
}

fn l2(v: &[f64]) -> f64 {
    let m = linf(v);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

fn l1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn lp_norm(v: &[f64], p: f64) -> f64 {
    let m = linf(v);
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v
        .iter()
        .map(|x| (x.abs() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// Serializable space descriptor:
/// `{"dim": n, "norm": "euclidean" | "weighted" | "lp" | "linf" | "l1", "weights": [...], "p": number}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceDescriptor {
    pub dim: usize,
    pub norm: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
}

impl SpaceDescriptor {
    pub fn build(&self) -> Result<NormedSpace> {
        match self.norm.as_str() {
            "euclidean" => NormedSpace::euclidean(self.dim),
            "weighted" => {
                let w = self
                    .weights
                    .clone()
                    .ok_or_else(|| Error::InvalidSpace("weighted norm needs `weights`".into()))?;
                check_dim(self.dim, w.len())?;
                NormedSpace::weighted(w)
            }
            "lp" => {
                let p = self
                    .p
                    .ok_or_else(|| Error::InvalidSpace("lp norm needs `p`".into()))?;
                NormedSpace::lp(self.dim, p)
            }
            "linf" => NormedSpace::linf(self.dim),
            "l1" => NormedSpace::l1(self.dim),
            other => Err(Error::InvalidSpace(format!("unknown norm `{other}`"))),
        }
    }
}

impl From<&NormedSpace> for SpaceDescriptor {
    fn from(s: &NormedSpace) -> Self {
        let (norm, weights, p) = match &s.kind {
            NormKind::Euclidean => ("euclidean", None, None),
            NormKind::Weighted(w) => ("weighted", Some(w.clone()), None),
            NormKind::Lp(p) => ("lp", None, Some(*p)),
            NormKind::Linf => ("linf", None, None),
            NormKind::L1 => ("l1", None, None),
        };
        SpaceDescriptor {
            dim: s.dim,
            norm: norm.into(),
            weights,
            p,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn norms_of_small_vectors() {
        assert_eq!(NormedSpace::euclidean(2).unwrap().norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(NormedSpace::linf(2).unwrap().norm(&[1.0, -2.0]).unwrap(), 2.0);
        assert_eq!(NormedSpace::l1(2).unwrap().norm(&[1.0, -2.0]).unwrap(), 3.0);
    }

    #[test]
    fn norm_rejects_wrong_length() {
        let s = NormedSpace::euclidean(3).unwrap();
        assert_eq!(
            s.norm(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn dual_of_linf_is_l1() {
        let s = NormedSpace::linf(2).unwrap();
        let (x1, x2) = (0.7, -1.9);
        let d = s.dual_norm(&Covector(vec![x1, -x2])).unwrap();
        assert!(close(d, x1.abs() + x2.abs(), 1e-15));
        assert_eq!(
            NormedSpace::euclidean(2).unwrap().dual_norm(&Covector(vec![3.0, 4.0])).unwrap(),
            5.0
        );
        assert_eq!(
            NormedSpace::l1(2).unwrap().dual_norm(&Covector(vec![1.0, -2.0])).unwrap(),
            2.0
        );
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(pairing(&Covector(vec![1.0, 2.0]), &[3.0, 4.0]).unwrap(), 11.0);
        assert_eq!(pairing(&Covector::zeros(2), &[3.0, -4.0]).unwrap(), 0.0);
        assert_eq!(pairing(&Covector(vec![1.0, 0.0]), &[0.0, 1.0]).unwrap(), 0.0);
        assert!(pairing(&Covector(vec![1.0]), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn riesz_examples() {
        let e = NormedSpace::euclidean(2).unwrap();
        assert_eq!(e.riesz(&[1.0, 2.0]).unwrap(), Covector(vec![1.0, 2.0]));
        let w = NormedSpace::weighted(vec![2.0, 3.0]).unwrap();
        assert_eq!(w.riesz(&[1.0, 1.0]).unwrap(), Covector(vec![2.0, 3.0]));
        let l = NormedSpace::linf(2).unwrap();
        assert!(matches!(l.riesz(&[1.0, 1.0]), Err(Error::RieszUndefined(_))));
    }

    #[test]
    fn norming_vector_examples() {
        let e = NormedSpace::euclidean(2).unwrap();
        let z = e.norming_vector(&Covector(vec![3.0, 4.0]), 1.0).unwrap();
        assert!(close(z[0], 0.6, 1e-15) && close(z[1], 0.8, 1e-15));

        let l = NormedSpace::linf(2).unwrap();
        let phi = Covector(vec![1.0, -1.0]);
        let z = l.norming_vector(&phi, 1.0).unwrap();
        assert_eq!(z, vec![1.0, -1.0]);
        assert_eq!(pairing(&phi, &z).unwrap(), 2.0);
        assert_eq!(l.dual_norm(&phi).unwrap(), 2.0);

        // candidates ±2 e_1, ±2 e_2 give pairings ±2, ±6; the best is -2 e_2
        let o = NormedSpace::l1(2).unwrap();
        let phi = Covector(vec![1.0, -3.0]);
        let z = o.norming_vector(&phi, 2.0).unwrap();
        assert_eq!(z, vec![0.0, -2.0]);
        assert_eq!(pairing(&phi, &z).unwrap(), 6.0);
    }

    #[test]
    fn norming_vector_rejects_zero() {
        let e = NormedSpace::euclidean(2).unwrap();
        assert_eq!(e.norming_vector(&Covector::zeros(2), 1.0), Err(Error::ZeroCovector));
    }

    #[test]
    fn parallelogram_examples() {
        let e = NormedSpace::euclidean(2).unwrap();
        assert!(e.parallelogram_defect(&[0.3, -1.2], &[2.5, 0.7]).unwrap().abs() < 1e-12);
        // ||(1,1)||^2 + ||(1,-1)||^2 - 2 - 2 = 1 + 1 - 4
        let l = NormedSpace::linf(2).unwrap();
        assert_eq!(l.parallelogram_defect(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), -2.0);
        assert_eq!(l.parallelogram_defect(&[0.0, 0.0], &[0.4, 7.0]).unwrap(), 0.0);
    }

    #[test]
    fn lp_tags_normalize() {
        assert_eq!(NormedSpace::lp(2, 1.0).unwrap().kind(), &NormKind::L1);
        assert_eq!(NormedSpace::lp(2, 2.0).unwrap().kind(), &NormKind::Euclidean);
        assert_eq!(NormedSpace::lp(2, f64::INFINITY).unwrap().kind(), &NormKind::Linf);
        assert!(NormedSpace::lp(2, 0.5).is_err());
        assert!(!NormedSpace::lp(2, 3.0).unwrap().is_hilbert());
    }

    #[test]
    fn weighted_dual_uses_inverse_weights() {
        let w = NormedSpace::weighted(vec![4.0, 1.0]).unwrap();
        // ||phi||_* = sqrt(phi_1^2/4 + phi_2^2)
        assert!(close(w.dual_norm(&Covector(vec![2.0, 0.0])).unwrap(), 1.0, 1e-15));
        assert!(close(w.norm(&[1.0, 0.0]).unwrap(), 2.0, 1e-15));
    }

    #[test]
    fn descriptor_roundtrip() {
        let d = SpaceDescriptor {
            dim: 3,
            norm: "lp".into(),
            weights: None,
            p: Some(3.0),
        };
        let s = d.build().unwrap();
        assert_eq!(SpaceDescriptor::from(&s), d);
        let bad = SpaceDescriptor { dim: 2, norm: "weighted".into(), weights: None, p: None };
        assert!(bad.build().is_err());
    }
}
