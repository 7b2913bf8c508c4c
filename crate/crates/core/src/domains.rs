//! Open convex subsets of a coordinate space, their inner shrinks and
//! deterministic pair samplers.
//!
//! The inner shrink of `O` by `rho` is the set of points whose whole closed
//! `rho`-ball (in the ambient norm) lies in `O`. It is computed analytically
//! for each domain kind through a signed slack: the slack is positive exactly
//! when the shrunk ball is strictly inside.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::spaces::{dot, Covector, NormedSpace};

/// Half-width of the box `[-w, w]^n` from which unbounded domains are sampled.
pub const UNBOUNDED_SAMPLING_HALF_WIDTH: f64 = 5.0;

/// Attempts per point before the sampler declares the shrunk domain infeasible.
pub const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

/// The open half-space `{x : <normal, x> < offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Halfspace {
    pub normal: Covector,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DomainKind {
    WholeSpace,
    OpenBall { center: Vec<f64>, radius: f64 },
    OpenBox { lower: Vec<f64>, upper: Vec<f64> },
    Halfspaces(Vec<Halfspace>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexDomain {
    kind: DomainKind,
    ambient: NormedSpace,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplePair {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl SamplePair {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Self {
        SamplePair { x, y }
    }

    pub fn swapped(&self) -> Self {
        SamplePair {
            x: self.y.clone(),
            y: self.x.clone(),
        }
    }
}

impl ConvexDomain {
    pub fn new(ambient: NormedSpace, kind: DomainKind) -> Result<Self> {
        let n = ambient.dim();
        match &kind {
            DomainKind::WholeSpace => {}
            DomainKind::OpenBall { center, radius } => {
                check_dim(n, center.len())?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return Err(Error::InvalidDomain(format!("ball radius {radius} must be positive")));
                }
            }
            DomainKind::OpenBox { lower, upper } => {
                check_dim(n, lower.len())?;
                check_dim(n, upper.len())?;
                if lower.iter().zip(upper).any(|(l, u)| !(l < u)) {
                    return Err(Error::InvalidDomain("box needs lower < upper in every coordinate".into()));
                }
            }
            DomainKind::Halfspaces(hs) => {
                for h in hs {
                    check_dim(n, h.normal.dim())?;
                    if h.normal.is_zero() {
                        return Err(Error::InvalidDomain("half-space normal must be nonzero".into()));
                    }
                }
            }
        }
        Ok(ConvexDomain { kind, ambient })
    }

    pub fn whole_space(ambient: NormedSpace) -> Self {
        ConvexDomain {
            kind: DomainKind::WholeSpace,
            ambient,
        }
    }

    pub fn open_ball(ambient: NormedSpace, center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::new(ambient, DomainKind::OpenBall { center, radius })
    }

    pub fn open_box(ambient: NormedSpace, lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Self::new(ambient, DomainKind::OpenBox { lower, upper })
    }

    pub fn halfspaces(ambient: NormedSpace, hs: Vec<Halfspace>) -> Result<Self> {
        Self::new(ambient, DomainKind::Halfspaces(hs))
    }

    pub fn kind(&self) -> &DomainKind {
        &self.kind
    }

    pub fn ambient(&self) -> &NormedSpace {
        &self.ambient
    }

    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn is_whole_space(&self) -> bool {
        matches!(self.kind, DomainKind::WholeSpace)
    }

    fn is_bounded(&self) -> bool {
        matches!(self.kind, DomainKind::OpenBall { .. } | DomainKind::OpenBox { .. })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.contains_shrunk(x, 0.0)
    }

    /// Whether the closed `rho`-ball around `x` lies inside the open domain.
    pub fn contains_shrunk(&self, x: &[f64], rho: f64) -> bool {
        self.shrink_slack(x, rho) > 0.0
    }

    /// Signed distance-like slack of `x` with respect to the shrunk domain:
    /// positive iff the closed `rho`-ball around `x` is inside, `+inf` for the
    /// whole space, `-inf` on dimension mismatch.
    pub fn shrink_slack(&self, x: &[f64], rho: f64) -> f64 {
        if x.len() != self.dim() || x.iter().any(|v| !v.is_finite()) {
            return f64::NEG_INFINITY;
        }
        let rho = rho.max(0.0);
        match &self.kind {
            DomainKind::WholeSpace => f64::INFINITY,
            DomainKind::OpenBall { center, radius } => {
                let d: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                radius - self.ambient.norm_unchecked(&d) - rho
            }
            DomainKind::OpenBox { lower, upper } => (0..x.len())
                .map(|i| {
                    let ext = rho * self.ambient.coordinate_extent(i);
                    (x[i] - ext - lower[i]).min(upper[i] - x[i] - ext)
                })
                .fold(f64::INFINITY, f64::min),
            DomainKind::Halfspaces(hs) => hs
                .iter()
                .map(|h| {
                    let reach = rho * self.ambient.dual_norm_unchecked(h.normal.as_slice());
                    h.offset - dot(h.normal.as_slice(), x) - reach
                })
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Region the sampler draws from: the shrunk domain, intersected with the
    /// sampling box for unbounded kinds.
    fn sample_region_contains(&self, z: &[f64], rho: f64) -> bool {
        if !self.contains_shrunk(z, rho) {
            return false;
        }
        self.is_bounded()
            || z.iter()
                .all(|v| v.abs() < UNBOUNDED_SAMPLING_HALF_WIDTH)
    }

    /// Deterministic list of `count` pairs with both points in the `rho`
    /// shrink of the domain. Pair `i` depends only on `(seed, i)`, so a
    /// longer list always extends a shorter one.
    pub fn sample_pairs(&self, rho: f64, count: usize, seed: u64) -> Result<Vec<SamplePair>> {
        if count < 1 {
            return Err(Error::InvalidParameter("pair count must be at least 1".into()));
        }
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(Error::InvalidParameter(format!("rho = {rho} must be nonnegative")));
        }
        (0..count).map(|i| self.pair_at(rho, seed, i as u64)).collect()
    }

    /// The `index`-th pair of the sampler stream for `seed`.
    ///
    /// Indices cycle through four strata: two of independent uniform pairs,
    /// one of near-boundary pairs and one of collinear pairs whose difference
    /// points along a coordinate axis, a sign vector or a random direction.
    pub fn pair_at(&self, rho: f64, seed: u64, index: u64) -> Result<SamplePair> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index);
        match index % 4 {
            0 | 1 => {
                let x = self.sample_point(&mut rng, rho)?;
                let y = self.sample_point(&mut rng, rho)?;
                Ok(SamplePair { x, y })
            }
            2 => {
                let anchor = self.sample_point(&mut rng, rho)?;
                let p = self.sample_point(&mut rng, rho)?;
                let q = self.sample_point(&mut rng, rho)?;
                let x = self.push_to_boundary(&mut rng, &anchor, p, rho);
                let y = self.push_to_boundary(&mut rng, &anchor, q, rho);
                Ok(SamplePair { x, y })
            }
            _ => {
                let x = self.sample_point(&mut rng, rho)?;
                let d = self.structured_direction(&mut rng);
                let t_max = self.ray_extent(&x, &d, rho);
                let u: f64 = 1.0 - rng.gen::<f64>();
                let t = t_max * u * u;
                let y: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a + t * b).collect();
                if self.sample_region_contains(&y, rho) {
                    Ok(SamplePair { x, y })
                } else {
                    Ok(SamplePair { y: x.clone(), x })
                }
            }
        }
    }

    fn sample_point(&self, rng: &mut ChaCha8Rng, rho: f64) -> Result<Vec<f64>> {
        let n = self.dim();
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let z = match &self.kind {
                DomainKind::WholeSpace | DomainKind::Halfspaces(_) => {
                    let w = UNBOUNDED_SAMPLING_HALF_WIDTH;
                    (0..n).map(|_| open_uniform(rng, -w, w)).collect()
                }
                DomainKind::OpenBall { center, radius } => {
                    let room = radius - rho;
                    if room <= 0.0 {
                        break;
                    }
                    let u = self.random_unit_direction(rng);
                    let s = room * rng.gen::<f64>().powf(1.0 / n as f64);
                    center.iter().zip(&u).map(|(c, d)| c + s * d).collect()
                }
                DomainKind::OpenBox { lower, upper } => {
                    let mut z = Vec::with_capacity(n);
                    for i in 0..n {
                        let ext = rho * self.ambient.coordinate_extent(i);
                        let (lo, hi) = (lower[i] + ext, upper[i] - ext);
                        if lo >= hi {
                            break;
                        }
                        z.push(open_uniform(rng, lo, hi));
                    }
                    if z.len() < n {
                        break;
                    }
                    z
                }
            };
            if self.sample_region_contains(&z, rho) {
                return Ok(z);
            }
        }
        Err(Error::InfeasibleShrink {
            rho,
            attempts: MAX_PLACEMENT_ATTEMPTS,
        })
    }

    /// Uniform direction in the coordinate cube, rescaled to unit ambient norm.
    fn random_unit_direction(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        loop {
            let v: Vec<f64> = (0..self.dim()).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let nv = self.ambient.norm_unchecked(&v);
            if nv > 1e-3 {
                return v.iter().map(|a| a / nv).collect();
            }
        }
    }

    fn structured_direction(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        let n = self.dim();
        let v: Vec<f64> = match rng.gen_range(0..3) {
            0 => {
                let k = rng.gen_range(0..n);
                let mut e = vec![0.0; n];
                e[k] = if rng.gen::<bool>() { 1.0 } else { -1.0 };
                e
            }
            1 => (0..n)
                .map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 })
                .collect(),
            _ => return self.random_unit_direction(rng),
        };
        let nv = self.ambient.norm_unchecked(&v);
        v.iter().map(|a| a / nv).collect()
    }

    /// Largest `t >= 0` (up to bisection accuracy) with `x + t d` in the
    /// sample region; `x` itself must be in the region.
    fn ray_extent(&self, x: &[f64], d: &[f64], rho: f64) -> f64 {
        let at = |t: f64| -> Vec<f64> { x.iter().zip(d).map(|(a, b)| a + t * b).collect() };
        let (mut lo, mut hi) = (0.0, 1.0);
        let mut doublings = 0;
        while self.sample_region_contains(&at(hi), rho) {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > 60 {
                return lo;
            }
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.sample_region_contains(&at(mid), rho) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    /// Moves `p` outward along the ray from `anchor` until it sits just inside
    /// the boundary of the sample region.
    fn push_to_boundary(&self, rng: &mut ChaCha8Rng, anchor: &[f64], p: Vec<f64>, rho: f64) -> Vec<f64> {
        let d: Vec<f64> = p.iter().zip(anchor).map(|(a, b)| a - b).collect();
        if d.iter().all(|v| v.abs() < 1e-12) {
            return p;
        }
        let t_star = self.ray_extent(anchor, &d, rho).max(1.0);
        let t = 1.0 + (t_star - 1.0) * (1.0 - 1e-3 * rng.gen::<f64>());
        let z: Vec<f64> = anchor.iter().zip(&d).map(|(a, b)| a + t * b).collect();
        if self.sample_region_contains(&z, rho) {
            z
        } else {
            p
        }
    }
}

fn open_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    loop {
        let v = lo + (hi - lo) * rng.gen::<f64>();
        if v > lo && v < hi {
            return v;
        }
    }
}

/// Equally spaced points `x_0 = x, ..., x_n = y` on the segment `[x, y]`.
pub fn segment_points(x: &[f64], y: &[f64], n: usize) -> Result<Vec<Vec<f64>>> {
    if n < 1 {
        return Err(Error::InvalidParameter("segment needs n >= 1".into()));
    }
    check_dim(x.len(), y.len())?;
    Ok((0..=n)
        .map(|i| {
            if i == n {
                return y.to_vec();
            }
            let t = i as f64 / n as f64;
            x.iter().zip(y).map(|(a, b)| a + t * (b - a)).collect()
        })
        .collect())
}

/// Domain descriptor in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DomainDescriptor {
    All,
    Ball {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<Vec<f64>>,
        radius: f64,
    },
    Box {
        lower: Vec<f64>,
        upper: Vec<f64>,
    },
    Halfspaces {
        halfspaces: Vec<Halfspace>,
    },
}

impl Default for DomainDescriptor {
    fn default() -> Self {
        DomainDescriptor::All
    }
}

impl DomainDescriptor {
    pub fn build(&self, ambient: NormedSpace) -> Result<ConvexDomain> {
        match self {
            DomainDescriptor::All => Ok(ConvexDomain::whole_space(ambient)),
            DomainDescriptor::Ball { center, radius } => {
                let c = center.clone().unwrap_or_else(|| vec![0.0; ambient.dim()]);
                ConvexDomain::open_ball(ambient, c, *radius)
            }
            DomainDescriptor::Box { lower, upper } => {
                ConvexDomain::open_box(ambient, lower.clone(), upper.clone())
            }
            DomainDescriptor::Halfspaces { halfspaces } => {
                ConvexDomain::halfspaces(ambient, halfspaces.clone())
            }
        }
    }
}

impl From<&ConvexDomain> for DomainDescriptor {
    fn from(d: &ConvexDomain) -> Self {
        match &d.kind {
            DomainKind::WholeSpace => DomainDescriptor::All,
            DomainKind::OpenBall { center, radius } => DomainDescriptor::Ball {
                center: Some(center.clone()),
                radius: *radius,
            },
            DomainKind::OpenBox { lower, upper } => DomainDescriptor::Box {
                lower: lower.clone(),
                upper: upper.clone(),
            },
            DomainKind::Halfspaces(hs) => DomainDescriptor::Halfspaces {
                halfspaces: hs.clone(),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e2() -> NormedSpace {
        NormedSpace::euclidean(2).unwrap()
    }

    #[test]
    fn contains_examples() {
        let all = ConvexDomain::whole_space(e2());
        assert!(all.contains(&[1e9, -3.0]));
        let ball = ConvexDomain::open_ball(e2(), vec![0.0, 0.0], 1.0).unwrap();
        assert!(!ball.contains(&[1.0, 0.0]));
        assert!(ball.contains(&[0.99, 0.0]));
        let b = ConvexDomain::open_box(e2(), vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(b.contains(&[0.5, 0.5]));
        assert!(!b.contains(&[0.0, 0.5]));
    }

    #[test]
    fn contains_shrunk_examples() {
        let ball = ConvexDomain::open_ball(e2(), vec![0.0, 0.0], 1.0).unwrap();
        assert!(ball.contains_shrunk(&[0.0, 0.0], 0.5));
        assert!(!ball.contains_shrunk(&[0.6, 0.0], 0.5));
        // the radial perturbation h = (0.5, 0) already leaves the ball
        assert!(!ball.contains(&[1.1, 0.0]));
        let all = ConvexDomain::whole_space(e2());
        assert!(all.contains_shrunk(&[3.0, 4.0], 1e6));
    }

    #[test]
    fn halfspace_margin_uses_dual_norm() {
        // {x : x1 + x2 < 1} under linf: the rho-ball reaches 2 rho along the normal
        let l = NormedSpace::linf(2).unwrap();
        let d = ConvexDomain::halfspaces(
            l,
            vec![Halfspace { normal: Covector(vec![1.0, 1.0]), offset: 1.0 }],
        )
        .unwrap();
        assert!(d.contains_shrunk(&[0.0, 0.0], 0.49));
        assert!(!d.contains_shrunk(&[0.0, 0.0], 0.5));
    }

    #[test]
    fn sampler_is_reproducible() {
        let all = ConvexDomain::whole_space(e2());
        let a = all.sample_pairs(0.0, 10, 7).unwrap();
        let b = all.sample_pairs(0.0, 10, 7).unwrap();
        assert_eq!(a.len(), 10);
        assert_eq!(a, b);
        let longer = all.sample_pairs(0.0, 25, 7).unwrap();
        assert_eq!(&longer[..10], &a[..]);
    }

    #[test]
    fn sampler_respects_shrink() {
        let ball = ConvexDomain::open_ball(e2(), vec![0.0, 0.0], 1.0).unwrap();
        for p in ball.sample_pairs(0.9, 5, 3).unwrap() {
            assert!(e2().norm(&p.x).unwrap() < 0.1);
            assert!(e2().norm(&p.y).unwrap() < 0.1);
        }
    }

    #[test]
    fn sampler_reports_infeasible_shrink() {
        let b = ConvexDomain::open_box(e2(), vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        assert!(matches!(
            b.sample_pairs(2.0, 3, 1),
            Err(Error::InfeasibleShrink { .. })
        ));
        assert!(b.sample_pairs(0.0, 0, 1).is_err());
    }

    #[test]
    fn segment_examples() {
        let pts = segment_points(&[0.0, 0.0], &[1.0, 0.0], 2).unwrap();
        assert_eq!(pts, vec![vec![0.0, 0.0], vec![0.5, 0.0], vec![1.0, 0.0]]);
        let same = segment_points(&[0.3, 0.1], &[0.3, 0.1], 4).unwrap();
        assert_eq!(same.len(), 5);
        assert!(same.iter().all(|p| p == &vec![0.3, 0.1]));
        let pts = segment_points(&[0.0, 0.0], &[3.0, 3.0], 3).unwrap();
        let step = 18f64.sqrt() / 3.0;
        for w in pts.windows(2) {
            let d = [w[1][0] - w[0][0], w[1][1] - w[0][1]];
            assert!((e2().norm(&d).unwrap() - step).abs() <= 1e-12 * step);
        }
        assert!(segment_points(&[0.0], &[1.0], 0).is_err());
    }

    #[test]
    fn descriptor_builds() {
        let json = r#"{"kind":"box","lower":[0,0],"upper":[1,2]}"#;
        let d: DomainDescriptor = serde_json::from_str(json).unwrap();
        let dom = d.build(e2()).unwrap();
        assert!(dom.contains(&[0.5, 1.5]));
        assert_eq!(DomainDescriptor::from(&dom), d);
        let all: DomainDescriptor = serde_json::from_str(r#"{"kind":"all"}"#).unwrap();
        assert!(all.build(e2()).unwrap().is_whole_space());
    }
}
