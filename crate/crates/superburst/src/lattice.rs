//! Geometry of ordered emitter arrays: site coordinates, pair separations and
//! neighbor adjacency for chains, rings, hypercubes and hyperrectangles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boundary condition of the array.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    Open,
    Periodic,
}

/// An ordered array of emitters: `extents[k]` sites along axis `k`, either
/// open boundaries (any dimension) or a periodic 1D ring.
///
/// Sites are indexed row-major over the extents (last axis fastest), so site
/// layouts — and every matrix built from them — are reproducible bit-for-bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub dimension: usize,
    pub extents: Vec<usize>,
    pub boundary: Boundary,
    /// Lattice constant (dimensionless, default 1). Separations are reported
    /// in absolute units `spacing * distance`.
    pub spacing: f64,
}

/// A pair of distinct sites with its Euclidean separation and graph distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct SitePair {
    pub i: usize,
    pub j: usize,
    pub separation: f64,
    pub graph_distance: usize,
}

impl LatticeSpec {
    pub fn new(extents: Vec<usize>, boundary: Boundary, spacing: f64) -> Result<Self> {
        if extents.is_empty() {
            return Err(Error::InvalidLattice("need at least one extent".into()));
        }
        if extents.iter().any(|&n| n == 0) {
            return Err(Error::InvalidLattice("every extent must be >= 1".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::InvalidLattice(format!(
                "spacing must be positive, got {spacing}"
            )));
        }
        if boundary == Boundary::Periodic {
            if extents.len() != 1 {
                return Err(Error::InvalidLattice(
                    "periodic boundaries are only supported in 1D (ring)".into(),
                ));
            }
            if extents[0] < 3 {
                return Err(Error::InvalidLattice(
                    "periodic ring needs at least 3 sites (neighbor pairs would duplicate)"
                        .into(),
                ));
            }
        }
        Ok(LatticeSpec {
            dimension: extents.len(),
            extents,
            boundary,
            spacing,
        })
    }

    /// Open 1D chain of `n` sites.
    pub fn chain(n: usize) -> Result<Self> {
        Self::new(vec![n], Boundary::Open, 1.0)
    }

    /// Periodic 1D ring of `n` sites (`n >= 3`).
    pub fn ring(n: usize) -> Result<Self> {
        Self::new(vec![n], Boundary::Periodic, 1.0)
    }

    /// Open hypercube: `n` sites along each of `d` axes.
    pub fn hypercube(d: usize, n: usize) -> Result<Self> {
        Self::new(vec![n; d], Boundary::Open, 1.0)
    }

    /// Open hyperrectangle with the given extents.
    pub fn hyperrectangle(extents: Vec<usize>) -> Result<Self> {
        Self::new(extents, Boundary::Open, 1.0)
    }

    /// Total number of sites N.
    pub fn n_sites(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_ring(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    fn check_index(&self, index: usize) -> Result<()> {
        let n = self.n_sites();
        if index >= n {
            Err(Error::IndexOutOfRange { index, n })
        } else {
            Ok(())
        }
    }

    /// Row-major unflattening of a site index into integer coordinates.
    pub fn site_coordinates(&self, index: usize) -> Result<Vec<usize>> {
        self.check_index(index)?;
        let mut coords = vec![0usize; self.dimension];
        let mut rest = index;
        for axis in (0..self.dimension).rev() {
            coords[axis] = rest % self.extents[axis];
            rest /= self.extents[axis];
        }
        Ok(coords)
    }

    /// Euclidean separation of two sites in absolute units. On a ring this is
    /// the path distance along the ring (hop count times spacing), matching
    /// the exponent convention of circulant coupling matrices.
    pub fn pair_separation(&self, i: usize, j: usize) -> Result<f64> {
        self.check_index(i)?;
        self.check_index(j)?;
        match self.boundary {
            Boundary::Periodic => {
                let n = self.n_sites();
                let diff = i.abs_diff(j);
                Ok(self.spacing * diff.min(n - diff) as f64)
            }
            Boundary::Open => {
                let a = self.site_coordinates(i)?;
                let b = self.site_coordinates(j)?;
                let sq: f64 = a
                    .iter()
                    .zip(&b)
                    .map(|(&x, &y)| {
                        let d = x.abs_diff(y) as f64;
                        d * d
                    })
                    .sum();
                Ok(self.spacing * sq.sqrt())
            }
        }
    }

    /// Graph distance (hop count on the lattice graph): L1 distance for open
    /// boundaries, ring path distance for periodic.
    pub fn graph_distance(&self, i: usize, j: usize) -> Result<usize> {
        self.check_index(i)?;
        self.check_index(j)?;
        match self.boundary {
            Boundary::Periodic => {
                let n = self.n_sites();
                let diff = i.abs_diff(j);
                Ok(diff.min(n - diff))
            }
            Boundary::Open => {
                let a = self.site_coordinates(i)?;
                let b = self.site_coordinates(j)?;
                Ok(a.iter().zip(&b).map(|(&x, &y)| x.abs_diff(y)).sum())
            }
        }
    }

    fn pair(&self, i: usize, j: usize) -> SitePair {
        SitePair {
            i,
            j,
            separation: self.pair_separation(i, j).expect("valid indices"),
            graph_distance: self.graph_distance(i, j).expect("valid indices"),
        }
    }

    /// Pairs at graph distance `order`, each listed once with `i < j`.
    ///
    /// Order 1 is axis-aligned adjacency; order 2 is supported on rings only
    /// (distance-2 hops used by next-nearest-neighbor couplings).
    pub fn neighbor_pairs(&self, order: usize) -> Result<Vec<SitePair>> {
        match order {
            1 => Ok(self.adjacent_pairs()),
            2 => {
                if !self.is_ring() {
                    return Err(Error::Unsupported(
                        "order-2 neighbor pairs are only defined on a periodic ring".into(),
                    ));
                }
                let n = self.n_sites();
                Ok((0..n).map(|i| self.pair(i, (i + 2) % n)).collect())
            }
            _ => Err(Error::Unsupported(format!(
                "neighbor order {order} not supported (expected 1 or 2)"
            ))),
        }
    }

    fn adjacent_pairs(&self) -> Vec<SitePair> {
        let n = self.n_sites();
        if self.is_ring() {
            return (0..n).map(|i| self.pair(i, (i + 1) % n)).collect();
        }
        // Open: step +1 along each axis from every site that is not on the
        // trailing face of that axis.
        let mut strides = vec![1usize; self.dimension];
        for axis in (0..self.dimension.saturating_sub(1)).rev() {
            strides[axis] = strides[axis + 1] * self.extents[axis + 1];
        }
        let mut pairs = Vec::new();
        for i in 0..n {
            let coords = self.site_coordinates(i).expect("valid index");
            for axis in 0..self.dimension {
                if coords[axis] + 1 < self.extents[axis] {
                    pairs.push(self.pair(i, i + strides[axis]));
                }
            }
        }
        pairs
    }

    /// Multiplicity histogram of ordered pair separations: for each distinct
    /// displacement class, the separation (absolute units) and the number of
    /// ordered pairs `(i, j)`, `i != j`, realizing it. Enables O(N) evaluation
    /// of pair sums `sum_{i != j} f(r_ij)` on lattices far too large to store.
    pub fn separation_histogram(&self) -> Vec<(f64, u64)> {
        if self.is_ring() {
            let n = self.n_sites() as u64;
            let half = (self.n_sites() - 1) / 2;
            let mut classes: Vec<(f64, u64)> = (1..=half)
                .map(|k| (self.spacing * k as f64, 2 * n))
                .collect();
            if self.n_sites() % 2 == 0 {
                classes.push((self.spacing * (self.n_sites() / 2) as f64, n));
            }
            return classes;
        }
        // Open: displacement classes are componentwise absolute offsets.
        // count(delta) = prod_k (n_k - delta_k) * 2^{#nonzero components}.
        let mut classes = Vec::new();
        let mut delta = vec![0usize; self.dimension];
        loop {
            if delta.iter().any(|&d| d > 0) {
                let mut count = 1u64;
                let mut sq = 0.0f64;
                let mut nonzero = 0u32;
                for (d, n) in delta.iter().zip(&self.extents) {
                    count *= (n - d) as u64;
                    sq += (*d as f64) * (*d as f64);
                    if *d > 0 {
                        nonzero += 1;
                    }
                }
                classes.push((self.spacing * sq.sqrt(), count << nonzero));
            }
            // odometer increment over 0..extents[k]-1
            let mut axis = self.dimension;
            loop {
                if axis == 0 {
                    return classes;
                }
                axis -= 1;
                delta[axis] += 1;
                if delta[axis] < self.extents[axis] {
                    break;
                }
                delta[axis] = 0;
            }
        }
    }
}

impl fmt::Display for LatticeSpec {
    /// Canonical descriptor, e.g. `1:9:periodic`, `2:10x10`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.dimension)?;
        for (k, n) in self.extents.iter().enumerate() {
            if k > 0 {
                write!(f, "x")?;
            }
            write!(f, "{n}")?;
        }
        if self.is_ring() {
            write!(f, ":periodic")?;
        }
        Ok(())
    }
}

impl FromStr for LatticeSpec {
    type Err = Error;

    /// Parses `D:n1xn2x...[:periodic]`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(':');
        let dim_tok = parts.next().filter(|t| !t.is_empty()).ok_or_else(|| {
            Error::Parse(format!("lattice descriptor '{s}': missing dimension"))
        })?;
        let dim: usize = dim_tok
            .parse()
            .map_err(|_| Error::Parse(format!("lattice descriptor '{s}': bad dimension '{dim_tok}'")))?;
        let ext_tok = parts
            .next()
            .ok_or_else(|| Error::Parse(format!("lattice descriptor '{s}': missing extents")))?;
        let extents: Vec<usize> = ext_tok
            .split('x')
            .map(|t| {
                t.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("lattice descriptor '{s}': bad extent '{t}'"))
                })
            })
            .collect::<Result<_>>()?;
        let boundary = match parts.next() {
            None => Boundary::Open,
            Some("periodic") => Boundary::Periodic,
            Some(other) => {
                return Err(Error::Parse(format!(
                    "lattice descriptor '{s}': unknown boundary '{other}'"
                )))
            }
        };
        if parts.next().is_some() {
            return Err(Error::Parse(format!(
                "lattice descriptor '{s}': trailing tokens"
            )));
        }
        if extents.len() != dim {
            return Err(Error::Parse(format!(
                "lattice descriptor '{s}': dimension {dim} does not match {} extents",
                extents.len()
            )));
        }
        LatticeSpec::new(extents, boundary, 1.0)
    }
}
