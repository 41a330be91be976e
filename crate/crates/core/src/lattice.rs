//! Square-lattice geometry.
//!
//! Sites are numbered row-major: `index = y * width + x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

/// Site identifier in `0..width * height`.
pub type SiteId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LatticeConfig {
    pub width: usize,
    pub height: usize,
    pub boundary: Boundary,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        Self { width: 15, height: 15, boundary: Boundary::Open }
    }
}

impl LatticeConfig {
    pub fn new(width: usize, height: usize, boundary: Boundary) -> Result<Self> {
        let config = Self { width, height, boundary };
        config.validate()?;
        Ok(config)
    }

    /// Unchecked constructor for small clusters (any side ≥ 1), used by the
    /// exact many-body reference.
    pub fn cluster(width: usize, height: usize, boundary: Boundary) -> Self {
        assert!(width >= 1 && height >= 1, "cluster sides must be positive");
        Self { width, height, boundary }
    }

    pub fn square(side: usize) -> Result<Self> {
        Self::new(side, side, Boundary::Open)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::Domain(format!("lattice must be at least 2x2, got {}x{}", self.width, self.height)));
        }
        Ok(())
    }

    pub fn num_sites(&self) -> usize {
        self.width * self.height
    }

    /// Coordinates `(x, y)` → site index.
    pub fn site_index(&self, x: i64, y: i64) -> Result<SiteId> {
        if x < 0 || y < 0 || x as usize >= self.width || y as usize >= self.height {
            return Err(Error::Domain(format!(
                "coordinates ({x}, {y}) outside {}x{} lattice",
                self.width, self.height
            )));
        }
        Ok(y as usize * self.width + x as usize)
    }

    pub fn site_coords(&self, i: SiteId) -> Result<(usize, usize)> {
        self.check_site(i)?;
        Ok((i % self.width, i / self.width))
    }

    pub fn check_site(&self, i: SiteId) -> Result<()> {
        if i >= self.num_sites() {
            return Err(Error::Domain(format!("site {i} out of range for {} sites", self.num_sites())));
        }
        Ok(())
    }

    /// Center site; for even dimensions the lower-left of the central plaquette.
    pub fn center(&self) -> SiteId {
        ((self.height - 1) / 2) * self.width + (self.width - 1) / 2
    }

    /// Nearest neighbors in the order +x, −x, +y, −y (missing ones skipped
    /// under open boundaries).
    ///
    /// With periodic boundaries and a side of length 2 the two bonds along
    /// that axis land on the same site, which is then listed twice; the
    /// hopping matrix accumulates both.
    pub fn neighbors(&self, i: SiteId) -> Result<Vec<SiteId>> {
        let (x, y) = self.site_coords(i)?;
        let (w, h) = (self.width, self.height);
        let mut out = Vec::with_capacity(4);
        match self.boundary {
            Boundary::Open => {
                if x + 1 < w {
                    out.push(i + 1);
                }
                if x > 0 {
                    out.push(i - 1);
                }
                if y + 1 < h {
                    out.push(i + w);
                }
                if y > 0 {
                    out.push(i - w);
                }
            }
            Boundary::Periodic => {
                out.push(y * w + (x + 1) % w);
                out.push(y * w + (x + w - 1) % w);
                out.push(((y + 1) % h) * w + x);
                out.push(((y + h - 1) % h) * w + x);
            }
        }
        Ok(out)
    }

    /// Site displaced by `(dx, dy)` from `i`, wrapping under periodic
    /// boundaries.
    pub fn offset(&self, i: SiteId, dx: i64, dy: i64) -> Result<SiteId> {
        let (x, y) = self.site_coords(i)?;
        let (mut nx, mut ny) = (x as i64 + dx, y as i64 + dy);
        if self.boundary == Boundary::Periodic {
            nx = nx.rem_euclid(self.width as i64);
            ny = ny.rem_euclid(self.height as i64);
        }
        self.site_index(nx, ny)
    }

    /// Manhattan distance between two sites (minimum image when periodic).
    pub fn manhattan(&self, a: SiteId, b: SiteId) -> Result<usize> {
        let (ax, ay) = self.site_coords(a)?;
        let (bx, by) = self.site_coords(b)?;
        let dx = ax.abs_diff(bx);
        let dy = ay.abs_diff(by);
        Ok(match self.boundary {
            Boundary::Open => dx + dy,
            Boundary::Periodic => dx.min(self.width - dx) + dy.min(self.height - dy),
        })
    }

    /// Number of undirected bonds.
    pub fn num_bonds(&self) -> usize {
        let (w, h) = (self.width, self.height);
        match self.boundary {
            Boundary::Open => (w - 1) * h + w * (h - 1),
            Boundary::Periodic => 2 * w * h,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_examples() {
        let l = LatticeConfig::square(15).unwrap();
        assert_eq!(l.site_index(7, 7).unwrap(), 112);
        assert_eq!(l.center(), 112);
        assert_eq!(l.site_index(0, 0).unwrap(), 0);
        let l = LatticeConfig::new(2, 3, Boundary::Open).unwrap();
        assert_eq!(l.site_index(1, 2).unwrap(), 5);
        assert!(l.site_index(2, 0).is_err());
        assert!(l.site_index(-1, 0).is_err());
    }

    #[test]
    fn rejects_degenerate_sizes() {
        assert!(LatticeConfig::new(1, 5, Boundary::Open).is_err());
    }

    #[test]
    fn neighbor_examples() {
        let l = LatticeConfig::square(15).unwrap();
        let mut n = l.neighbors(112).unwrap();
        n.sort();
        assert_eq!(n, vec![97, 111, 113, 127]);
        let mut n = l.neighbors(0).unwrap();
        n.sort();
        assert_eq!(n, vec![1, 15]);
        let l = LatticeConfig::new(3, 3, Boundary::Periodic).unwrap();
        let mut n = l.neighbors(0).unwrap();
        n.sort();
        assert_eq!(n, vec![1, 2, 3, 6]);
    }

    #[test]
    fn neighbor_relation_is_symmetric_and_counts_bonds() {
        for boundary in [Boundary::Open, Boundary::Periodic] {
            for (w, h) in [(2, 2), (3, 4), (5, 5), (15, 15)] {
                let l = LatticeConfig::new(w, h, boundary).unwrap();
                let mut total = 0;
                for i in 0..l.num_sites() {
                    let ni = l.neighbors(i).unwrap();
                    total += ni.len();
                    for &j in &ni {
                        let nj = l.neighbors(j).unwrap();
                        assert_eq!(ni.iter().filter(|&&k| k == j).count(), nj.iter().filter(|&&k| k == i).count());
                    }
                    if boundary == Boundary::Periodic {
                        assert_eq!(ni.len(), 4);
                    }
                }
                assert_eq!(total, 2 * l.num_bonds());
            }
        }
        let l = LatticeConfig::square(7).unwrap();
        assert_eq!(l.num_bonds(), 2 * 7 * 6);
    }

    #[test]
    fn coords_roundtrip() {
        let l = LatticeConfig::new(4, 6, Boundary::Open).unwrap();
        for y in 0..6 {
            for x in 0..4 {
                let i = l.site_index(x, y).unwrap();
                assert_eq!(l.site_coords(i).unwrap(), (x as usize, y as usize));
            }
        }
    }

    #[test]
    fn offsets_and_distances() {
        let l = LatticeConfig::square(15).unwrap();
        assert_eq!(l.offset(112, 3, 0).unwrap(), 115);
        assert!(l.offset(0, -1, 0).is_err());
        let p = LatticeConfig::new(5, 5, Boundary::Periodic).unwrap();
        assert_eq!(p.offset(0, -1, 0).unwrap(), 4);
        assert_eq!(p.manhattan(0, 4).unwrap(), 1);
        assert_eq!(l.manhattan(0, 112).unwrap(), 14);
    }
}
