//! Size-zone and distance-zone matrices.
//!
//! A zone is a 26-connected set of ROI voxels sharing one grey level. The
//! distance of a zone is the smallest, over its voxels, Chebyshev distance to
//! the nearest position outside the ROI; positions outside the grid count as
//! outside, so voxels on the ROI border have distance 1.

use std::collections::VecDeque;

use super::emphasis::{emphasis_features, LevelTable};
use super::roi::{neighbour_offsets, DiscretizedRoi};

pub const GLSZM_NAMES: [&str; 16] = [
    "small_zone_emphasis",
    "large_zone_emphasis",
    "low_grey_level_zone_emphasis",
    "high_grey_level_zone_emphasis",
    "small_zone_low_grey_level_emphasis",
    "small_zone_high_grey_level_emphasis",
    "large_zone_low_grey_level_emphasis",
    "large_zone_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "zone_size_non_uniformity",
    "zone_size_non_uniformity_normalised",
    "zone_percentage",
    "grey_level_variance",
    "zone_size_variance",
    "zone_size_entropy",
];

pub const GLDZM_NAMES: [&str; 16] = [
    "small_distance_emphasis",
    "large_distance_emphasis",
    "low_grey_level_zone_emphasis",
    "high_grey_level_zone_emphasis",
    "small_distance_low_grey_level_emphasis",
    "small_distance_high_grey_level_emphasis",
    "large_distance_low_grey_level_emphasis",
    "large_distance_high_grey_level_emphasis",
    "grey_level_non_uniformity",
    "grey_level_non_uniformity_normalised",
    "zone_distance_non_uniformity",
    "zone_distance_non_uniformity_normalised",
    "zone_percentage",
    "grey_level_variance",
    "zone_distance_variance",
    "zone_distance_entropy",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZoneMetric {
    Size,
    Distance,
}

/// One zone: grey level, voxel count and border distance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Zone {
    pub level: u32,
    pub size: u32,
    pub distance: u32,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Chebyshev distance to the nearest non-ROI position, per ROI voxel
/// (parallel to `droi.voxels()`).
pub fn border_distances(droi: &DiscretizedRoi) -> Vec<u32> {
    let g = droi.grid();
    let offsets = neighbour_offsets();
    let mut dist = vec![u32::MAX; g.len()];
    let mut queue = VecDeque::new();
    for &v in droi.voxels() {
        let c = g.coords(v);
        let on_border = offsets
            .iter()
            .any(|&d| g.offset_index(c, d).is_none_or(|i| droi.level_at(i) == 0));
        if on_border {
            dist[v] = 1;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        let c = g.coords(v);
        for &d in &offsets {
            if let Some(i) = g.offset_index(c, d) {
                if droi.level_at(i) > 0 && dist[i] == u32::MAX {
                    dist[i] = dist[v] + 1;
                    queue.push_back(i);
                }
            }
        }
    }
    droi.voxels().iter().map(|&v| dist[v]).collect()
}

/// All zones, ordered by their lowest flat voxel index.
pub fn zones(droi: &DiscretizedRoi) -> Vec<Zone> {
    let g = droi.grid();
    let n = droi.len();
    let mut slot = vec![usize::MAX; g.len()];
    for (k, &v) in droi.voxels().iter().enumerate() {
        slot[v] = k;
    }
    let mut parent: Vec<usize> = (0..n).collect();
    let offsets = neighbour_offsets();
    for (k, (&v, &level)) in droi.voxels().iter().zip(droi.bins()).enumerate() {
        let c = g.coords(v);
        for &d in &offsets {
            if let Some(i) = g.offset_index(c, d) {
                if i > v && droi.level_at(i) == level {
                    let (a, b) = (find(&mut parent, k), find(&mut parent, slot[i]));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
    }
    let dist = border_distances(droi);
    let mut zone_of = vec![usize::MAX; n];
    let mut out: Vec<Zone> = Vec::new();
    for k in 0..n {
        let r = find(&mut parent, k);
        if zone_of[r] == usize::MAX {
            zone_of[r] = out.len();
            out.push(Zone {
                level: droi.bins()[k],
                size: 0,
                distance: u32::MAX,
            });
        }
        let z = &mut out[zone_of[r]];
        z.size += 1;
        z.distance = z.distance.min(dist[k]);
    }
    out
}

pub fn zone_table(zs: &[Zone], metric: ZoneMetric) -> LevelTable {
    let mut t = LevelTable::default();
    for z in zs {
        let j = match metric {
            ZoneMetric::Size => z.size,
            ZoneMetric::Distance => z.distance,
        };
        t.add(z.level, j, 1.0);
    }
    t
}

pub fn zone_features(droi: &DiscretizedRoi, metric: ZoneMetric) -> [f64; 16] {
    emphasis_features(&zone_table(&zones(droi), metric), droi.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiomics::roi::{build_roi, discretize_fbn};
    use crate::volume::{Grid, Mask, Volume};

    fn droi(dims: [usize; 3], vals: Vec<f32>, mask: impl FnMut(usize, usize, usize) -> bool) -> DiscretizedRoi {
        let g = Grid::unit(dims).unwrap();
        let v = Volume::new(g.clone(), vals).unwrap();
        let m = Mask::from_fn(g, mask).unwrap();
        discretize_fbn(&build_roi(&v, &m).unwrap(), 8).unwrap()
    }

    #[test]
    fn constant_roi_single_zone() {
        let d = droi([4, 3, 2], vec![1.0; 24], |_, _, _| true);
        let zs = zones(&d);
        assert_eq!(zs.len(), 1);
        assert_eq!(zs[0].size, 24);
        let f = zone_features(&d, ZoneMetric::Size);
        assert_eq!(f[12], 1.0 / 24.0);
    }

    #[test]
    fn two_blobs() {
        let d = droi([5, 1, 1], vec![1.0; 5], |x, _, _| x != 2);
        assert_eq!(zones(&d).len(), 2);
        // diagonal contact joins under 26-connectivity
        let d = droi([2, 2, 1], vec![1.0; 4], |x, y, _| x == y);
        assert_eq!(zones(&d).len(), 1);
    }

    #[test]
    fn single_voxel() {
        let d = droi([3, 3, 3], vec![0.5; 27], |x, y, z| (x, y, z) == (1, 1, 1));
        let zs = zones(&d);
        assert_eq!(zs, vec![Zone { level: 1, size: 1, distance: 1 }]);
        let f = zone_features(&d, ZoneMetric::Distance);
        for v in &f[..8] {
            assert_eq!(*v, 1.0);
        }
    }

    #[test]
    fn distance_map_cube() {
        let d = droi([5, 5, 5], vec![0.0; 125], |_, _, _| true);
        let dist = border_distances(&d);
        let centre = d.voxels().iter().position(|&v| v == 62).unwrap();
        assert_eq!(dist[centre], 3);
        assert_eq!(*dist.iter().min().unwrap(), 1);
    }
}
