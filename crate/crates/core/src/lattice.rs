//! Periodic hypercubic lattices and Ising spin configurations.
//!
//! Sites are indexed row-major over coordinates with axis 0 slowest, so site
//! `i` of an `L^d` lattice has coordinates `c_k = (i / L^(d-1-k)) % L`. The
//! neighbor list of every site is `[-axis0, +axis0, -axis1, +axis1, ...]`.
//!
//! `L = 2` is accepted for tests only: both neighbors along an axis are then
//! the same site, so every bond appears twice.

use std::sync::Arc;

use crate::error::{argument, Result};

#[derive(Debug)]
struct GeometryInner {
    dim: usize,
    size: usize,
    sites: usize,
    neighbors: Vec<u32>,
}

/// A `d`-dimensional periodic hypercubic lattice with `N = L^d` sites.
///
/// Cloning is cheap; the neighbor table is shared.
#[derive(Debug, Clone)]
pub struct LatticeGeometry {
    inner: Arc<GeometryInner>,
}

impl PartialEq for LatticeGeometry {
    fn eq(&self, other: &Self) -> bool {
        self.dim() == other.dim() && self.size() == other.size()
    }
}

impl Eq for LatticeGeometry {}

impl LatticeGeometry {
    pub fn new(dim: usize, size: usize) -> Result<Self> {
        if dim == 0 {
            return Err(argument("lattice dimension must be at least 1"));
        }
        if size < 2 {
            return Err(argument(format!("linear size must be at least 2, got {size}")));
        }
        let sites = (0..dim)
            .try_fold(1usize, |acc, _| acc.checked_mul(size))
            .filter(|&n| n <= u32::MAX as usize)
            .ok_or_else(|| argument(format!("lattice {size}^{dim} is too large")))?;

        let mut strides = vec![1usize; dim];
        for k in (0..dim - 1).rev() {
            strides[k] = strides[k + 1] * size;
        }
        let mut neighbors = Vec::with_capacity(sites * 2 * dim);
        for site in 0..sites {
            for &stride in &strides {
                let c = (site / stride) % size;
                let base = site - c * stride;
                let down = (c + size - 1) % size;
                let up = (c + 1) % size;
                neighbors.push((base + down * stride) as u32);
                neighbors.push((base + up * stride) as u32);
            }
        }
        Ok(Self {
            inner: Arc::new(GeometryInner {
                dim,
                size,
                sites,
                neighbors,
            }),
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    #[inline]
    pub fn size(&self) -> usize {
        self.inner.size
    }

    /// Number of sites `N = L^d`.
    #[inline]
    pub fn sites(&self) -> usize {
        self.inner.sites
    }

    /// Neighbors per site, `2d`.
    #[inline]
    pub fn coordination(&self) -> usize {
        2 * self.inner.dim
    }

    /// Number of bonds with periodic boundaries, `d * N`.
    pub fn bonds(&self) -> usize {
        self.inner.dim * self.inner.sites
    }

    /// Checked neighbor lookup.
    pub fn neighbor_indices(&self, site: usize) -> Result<&[u32]> {
        if site >= self.sites() {
            return Err(argument(format!(
                "site {site} out of range for lattice with {} sites",
                self.sites()
            )));
        }
        Ok(self.neighbors_of(site))
    }

    /// Unchecked-by-contract neighbor lookup for hot loops (still bounds-checked by the slice).
    #[inline]
    pub(crate) fn neighbors_of(&self, site: usize) -> &[u32] {
        let z = self.coordination();
        &self.inner.neighbors[site * z..(site + 1) * z]
    }

    /// Forward neighbor of `site` along `axis`; each bond is `(i, forward(i, axis))`.
    #[inline]
    pub(crate) fn forward(&self, site: usize, axis: usize) -> usize {
        self.inner.neighbors[site * self.coordination() + 2 * axis + 1] as usize
    }

    /// Coordinates of a site, axis 0 first.
    pub fn coordinates(&self, site: usize) -> Vec<usize> {
        let mut c = vec![0; self.dim()];
        let mut rest = site;
        for k in (0..self.dim()).rev() {
            c[k] = rest % self.size();
            rest /= self.size();
        }
        c
    }

    pub fn site_at(&self, coords: &[usize]) -> usize {
        coords.iter().fold(0, |acc, &c| acc * self.size() + c % self.size())
    }
}

/// A ±1 microstate on a lattice. Spins are stored as `i8`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpinConfiguration {
    geometry: LatticeGeometry,
    spins: Vec<i8>,
}

impl SpinConfiguration {
    pub fn uniform(geometry: LatticeGeometry, value: i8) -> Result<Self> {
        if value != 1 && value != -1 {
            return Err(argument(format!("spin value must be ±1, got {value}")));
        }
        let spins = vec![value; geometry.sites()];
        Ok(Self { geometry, spins })
    }

    pub fn from_spins(geometry: LatticeGeometry, spins: Vec<i8>) -> Result<Self> {
        if spins.len() != geometry.sites() {
            return Err(argument(format!(
                "expected {} spins, got {}",
                geometry.sites(),
                spins.len()
            )));
        }
        if let Some(bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(argument(format!("spin value must be ±1, got {bad}")));
        }
        Ok(Self { geometry, spins })
    }

    /// Independent fair coin per site (infinite-temperature state).
    pub fn random<R: rand::Rng + ?Sized>(geometry: LatticeGeometry, rng: &mut R) -> Self {
        let spins = (0..geometry.sites())
            .map(|_| if rng.random::<bool>() { 1 } else { -1 })
            .collect();
        Self { geometry, spins }
    }

    pub fn geometry(&self) -> &LatticeGeometry {
        &self.geometry
    }

    pub fn spins(&self) -> &[i8] {
        &self.spins
    }

    #[inline]
    pub fn spin(&self, site: usize) -> i8 {
        self.spins[site]
    }

    #[inline]
    pub fn flip(&mut self, site: usize) {
        self.spins[site] = -self.spins[site];
    }

    pub fn flip_all(&mut self) {
        self.spins.iter_mut().for_each(|s| *s = -*s);
    }

    /// `M = Σ_i s_i`.
    pub fn total_magnetization(&self) -> i64 {
        self.spins.iter().map(|&s| s as i64).sum()
    }

    /// `Σ_<ij> s_i s_j` over the `dN` bonds, each counted once.
    pub fn bond_sum(&self) -> i64 {
        let g = &self.geometry;
        (0..g.sites())
            .map(|i| {
                let si = self.spins[i] as i64;
                (0..g.dim())
                    .map(|axis| si * self.spins[g.forward(i, axis)] as i64)
                    .sum::<i64>()
            })
            .sum()
    }

    /// `H_crit = -J Σ_<ij> s_i s_j`.
    pub fn bond_energy(&self, coupling: f64) -> f64 {
        -coupling * self.bond_sum() as f64
    }

    /// Sum of the `2d` neighboring spins.
    pub fn local_field_sum(&self, site: usize) -> Result<i32> {
        self.geometry.neighbor_indices(site)?;
        Ok(self.local_field_sum_unchecked(site))
    }

    #[inline]
    pub(crate) fn local_field_sum_unchecked(&self, site: usize) -> i32 {
        self.geometry
            .neighbors_of(site)
            .iter()
            .map(|&j| self.spins[j as usize] as i32)
            .sum()
    }

    /// Configuration translated by `shift` (periodically, per axis).
    pub fn translated(&self, shift: &[usize]) -> Result<Self> {
        let g = &self.geometry;
        if shift.len() != g.dim() {
            return Err(argument("translation must have one entry per axis"));
        }
        let mut spins = vec![0i8; g.sites()];
        for (i, &s) in self.spins.iter().enumerate() {
            let c: Vec<usize> = g
                .coordinates(i)
                .iter()
                .zip(shift)
                .map(|(&c, &d)| c + d)
                .collect();
            spins[g.site_at(&c)] = s;
        }
        Ok(Self {
            geometry: g.clone(),
            spins,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use proptest::prelude::*;

    fn geom(d: usize, l: usize) -> LatticeGeometry {
        LatticeGeometry::new(d, l).unwrap()
    }

    /// Neighbors by explicit coordinate arithmetic, independent of the table.
    fn oracle_neighbors(d: usize, l: usize, site: usize) -> Vec<usize> {
        let mut coords = vec![0usize; d];
        let mut rest = site;
        for k in (0..d).rev() {
            coords[k] = rest % l;
            rest /= l;
        }
        let to_index = |c: &[usize]| c.iter().fold(0, |acc, &x| acc * l + x);
        let mut out = Vec::new();
        for k in 0..d {
            for step in [l - 1, 1] {
                let mut c = coords.clone();
                c[k] = (c[k] + step) % l;
                out.push(to_index(&c));
            }
        }
        out
    }

    fn as_usize(v: &[u32]) -> Vec<usize> {
        v.iter().map(|&x| x as usize).collect()
    }

    #[test]
    fn ring_wraps() {
        assert_eq!(as_usize(geom(1, 4).neighbor_indices(0).unwrap()), vec![3, 1]);
    }

    #[test]
    fn square_center_site() {
        assert_eq!(as_usize(geom(2, 3).neighbor_indices(4).unwrap()), vec![1, 7, 3, 5]);
    }

    #[test]
    fn cubic_neighbors_match_coordinate_oracle() {
        let g = geom(3, 4);
        for site in 0..g.sites() {
            assert_eq!(as_usize(g.neighbor_indices(site).unwrap()), oracle_neighbors(3, 4, site));
        }
        assert_eq!(as_usize(g.neighbor_indices(0).unwrap()), vec![48, 16, 12, 4, 3, 1]);
    }

    #[test]
    fn out_of_range_site_is_rejected() {
        let g = geom(2, 3);
        assert!(g.neighbor_indices(9).is_err());
        let c = SpinConfiguration::uniform(g, 1).unwrap();
        assert!(c.local_field_sum(9).is_err());
    }

    #[test]
    fn invalid_geometry_and_spins() {
        assert!(LatticeGeometry::new(0, 4).is_err());
        assert!(LatticeGeometry::new(2, 1).is_err());
        assert!(SpinConfiguration::from_spins(geom(1, 3), vec![1, 0, 1]).is_err());
        assert!(SpinConfiguration::from_spins(geom(1, 3), vec![1, 1]).is_err());
    }

    #[test]
    fn neighbor_relation_is_symmetric_and_complete() {
        for (d, l) in [(1, 5), (2, 3), (2, 4), (3, 3), (4, 3)] {
            let g = geom(d, l);
            assert_eq!(g.sites(), l.pow(d as u32));
            for i in 0..g.sites() {
                let nb = g.neighbor_indices(i).unwrap();
                assert_eq!(nb.len(), 2 * d);
                let mut uniq = as_usize(nb);
                uniq.sort_unstable();
                uniq.dedup();
                assert_eq!(uniq.len(), 2 * d, "duplicate neighbors for L >= 3");
                for &j in nb {
                    assert!(g.neighbor_indices(j as usize).unwrap().contains(&(i as u32)));
                }
            }
        }
    }

    #[test]
    fn magnetization_examples() {
        let up = SpinConfiguration::uniform(geom(2, 4), 1).unwrap();
        assert_eq!(up.total_magnetization(), 16);
        let half: Vec<i8> = (0..16).map(|i| if i < 8 { 1 } else { -1 }).collect();
        let c = SpinConfiguration::from_spins(geom(2, 4), half).unwrap();
        assert_eq!(c.total_magnetization(), 0);
    }

    #[test]
    fn energy_examples() {
        let up = SpinConfiguration::uniform(geom(3, 4), 1).unwrap();
        assert_eq!(up.bond_energy(1.0), -192.0);
        let g = geom(2, 4);
        let checker: Vec<i8> = (0..16)
            .map(|i| {
                let c = g.coordinates(i);
                if (c[0] + c[1]).is_multiple_of(2) { 1 } else { -1 }
            })
            .collect();
        let c = SpinConfiguration::from_spins(g, checker).unwrap();
        assert_eq!(c.bond_energy(1.0), 32.0);
        assert_eq!(c.bond_energy(2.5), 80.0);
    }

    #[test]
    fn local_field_examples() {
        let up = SpinConfiguration::uniform(geom(2, 5), 1).unwrap();
        assert_eq!(up.local_field_sum(7).unwrap(), 4);
        let down = SpinConfiguration::uniform(geom(3, 3), -1).unwrap();
        assert_eq!(down.local_field_sum(13).unwrap(), -6);
    }

    /// Enumerate every bond from coordinates, without the neighbor table.
    fn oracle_bond_sum(c: &SpinConfiguration) -> i64 {
        let g = c.geometry();
        let (d, l) = (g.dim(), g.size());
        let mut total = 0i64;
        for i in 0..g.sites() {
            let nb = oracle_neighbors(d, l, i);
            for k in 0..d {
                total += c.spin(i) as i64 * c.spin(nb[2 * k + 1]) as i64;
            }
        }
        total
    }

    #[test]
    fn observables_match_oracles_on_random_states() {
        let mut r = rng::stream(11, 0);
        for (d, l) in [(1, 7), (2, 5), (3, 4), (4, 3)] {
            let c = SpinConfiguration::random(geom(d, l), &mut r);
            let m: i64 = c.spins().iter().map(|&s| s as i64).sum();
            assert_eq!(c.total_magnetization(), m);
            assert_eq!(c.bond_sum(), oracle_bond_sum(&c));
            for i in 0..c.geometry().sites() {
                let s: i32 = oracle_neighbors(d, l, i).iter().map(|&j| c.spin(j) as i32).sum();
                assert_eq!(c.local_field_sum(i).unwrap(), s);
            }
        }
    }

    #[test]
    fn size_two_counts_each_bond_twice() {
        let c = SpinConfiguration::uniform(geom(2, 2), 1).unwrap();
        assert_eq!(c.bond_sum(), 8);
        assert_eq!(c.local_field_sum(0).unwrap(), 4);
    }

    proptest! {
        #[test]
        fn single_flip_energy_change(seed in any::<u64>(), d in 1usize..=4, l in 2usize..=5) {
            let g = geom(d, l);
            let mut r = rng::stream(seed, 0);
            let c = SpinConfiguration::random(g.clone(), &mut r);
            let e0 = c.bond_energy(1.3);
            for i in 0..g.sites() {
                let mut f = c.clone();
                f.flip(i);
                let expected = 2.0 * 1.3 * c.spin(i) as f64 * c.local_field_sum(i).unwrap() as f64;
                prop_assert!((f.bond_energy(1.3) - e0 - expected).abs() < 1e-9);
            }
        }

        #[test]
        fn global_flip_and_translation(seed in any::<u64>(), d in 1usize..=3, l in 3usize..=5) {
            let g = geom(d, l);
            let mut r = rng::stream(seed, 1);
            let c = SpinConfiguration::random(g.clone(), &mut r);
            let mut f = c.clone();
            f.flip_all();
            prop_assert_eq!(f.bond_sum(), c.bond_sum());
            prop_assert_eq!(f.total_magnetization(), -c.total_magnetization());
            let shift: Vec<usize> = (0..d).map(|k| (seed as usize >> (4 * k)) % l).collect();
            let t = c.translated(&shift).unwrap();
            prop_assert_eq!(t.bond_sum(), c.bond_sum());
            let m = c.total_magnetization();
            prop_assert!(m.abs() <= g.sites() as i64);
            prop_assert_eq!((m - g.sites() as i64).rem_euclid(2), 0);
        }
    }
}
