//! Brute-force reference implementations used as test oracles.
//!
//! Everything here is written from the feature definitions with the most
//! direct algorithm available (exhaustive pair scans, explicit line walks,
//! flood fills, exhaustive distance searches, direct convolutions). None of
//! it shares code with the library.

#![allow(dead_code)]

use std::collections::BTreeMap;

/// A volume and mask as plain arrays, x fastest.
#[derive(Debug, Clone)]
pub struct Case {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl Case {
    pub fn idx(&self, x: usize, y: usize, z: usize) -> usize {
        x + self.dims[0] * (y + self.dims[1] * z)
    }

    pub fn xyz(&self, i: usize) -> [i64; 3] {
        let [nx, ny, _] = self.dims;
        [(i % nx) as i64, ((i / nx) % ny) as i64, (i / (nx * ny)) as i64]
    }

    fn at(&self, p: [i64; 3]) -> Option<usize> {
        let ok = (0..3).all(|a| p[a] >= 0 && (p[a] as usize) < self.dims[a]);
        ok.then(|| self.idx(p[0] as usize, p[1] as usize, p[2] as usize))
    }

    fn roi(&self) -> Vec<usize> {
        (0..self.values.len()).filter(|&i| self.mask[i]).collect()
    }

    /// Fixed-bin-number grey levels (1-based) for ROI voxels; 0 elsewhere.
    pub fn levels(&self, ng: u32) -> Vec<u32> {
        let roi = self.roi();
        let lo = roi.iter().map(|&i| self.values[i]).fold(f64::INFINITY, f64::min);
        let hi = roi.iter().map(|&i| self.values[i]).fold(f64::NEG_INFINITY, f64::max);
        let mut out = vec![0u32; self.values.len()];
        for &i in &roi {
            out[i] = if hi > lo {
                let b = (ng as f64 * (self.values[i] - lo) / (hi - lo)).floor() as i64 + 1;
                b.clamp(1, ng as i64) as u32
            } else {
                1
            };
        }
        out
    }
}

/// The 13 unique directions of the 26-neighbourhood (one of each +/- pair).
pub fn directions() -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dz in -1..=1i64 {
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                let d = [dx, dy, dz];
                // keep the lexicographically positive representative
                let first = d.iter().find(|&&c| c != 0);
                if first == Some(&1) && !out.contains(&d) {
                    out.push(d);
                }
            }
        }
    }
    out
}

pub fn neighbours() -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dz in -1..=1i64 {
        for dy in -1..=1i64 {
            for dx in -1..=1i64 {
                if (dx, dy, dz) != (0, 0, 0) {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

fn add(p: [i64; 3], d: [i64; 3]) -> [i64; 3] {
    [p[0] + d[0], p[1] + d[1], p[2] + d[2]]
}

fn log2(x: f64) -> f64 {
    x.ln() / std::f64::consts::LN_2
}

// ---------------------------------------------------------------- first order

fn quantile(values: &[f64], q: f64) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (s.len() - 1) as f64;
    let k = pos.floor() as usize;
    if k + 1 >= s.len() {
        return s[s.len() - 1];
    }
    s[k] * (1.0 - (pos - k as f64)) + s[k + 1] * (pos - k as f64)
}

fn first_order(v: &[f64]) -> Vec<f64> {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let moment = |k: i32| v.iter().map(|x| (x - mean).powi(k)).sum::<f64>() / n;
    let var = moment(2);
    let (skew, kurt) = if var == 0.0 {
        (0.0, 0.0)
    } else {
        (moment(3) / var.powf(1.5), moment(4) / (var * var) - 3.0)
    };
    let min = v.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let med = quantile(v, 0.5);
    let (p10, p90, p25, p75) = (quantile(v, 0.1), quantile(v, 0.9), quantile(v, 0.25), quantile(v, 0.75));
    let mad = v.iter().map(|x| (x - mean).abs()).sum::<f64>() / n;
    let mid: Vec<f64> = v.iter().cloned().filter(|x| *x >= p10 && *x <= p90).collect();
    let rmad = if mid.is_empty() {
        0.0
    } else {
        let m = mid.iter().sum::<f64>() / mid.len() as f64;
        mid.iter().map(|x| (x - m).abs()).sum::<f64>() / mid.len() as f64
    };
    let medad = v.iter().map(|x| (x - med).abs()).sum::<f64>() / n;
    let cov = if var == 0.0 || mean == 0.0 { 0.0 } else { var.sqrt() / mean };
    let qcod = if p75 + p25 == 0.0 { 0.0 } else { (p75 - p25) / (p75 + p25) };
    let energy: f64 = v.iter().map(|x| x * x).sum();
    vec![
        mean, var, skew, kurt, med, min, p10, p90, max, p75 - p25, max - min, mad, rmad, medad, cov, qcod, energy,
        (energy / n).sqrt(),
    ]
}

/// Mean over all grid voxels within the 1 cm³ sphere (centre distance in mm).
fn sphere_mean(c: &Case, centre: usize) -> f64 {
    let r = (3.0 / (4.0 * std::f64::consts::PI)).cbrt() * 10.0;
    let p = c.xyz(centre);
    let (mut s, mut n) = (0.0, 0.0);
    for j in 0..c.values.len() {
        let q = c.xyz(j);
        let d2: f64 = (0..3).map(|a| ((q[a] - p[a]) as f64 * c.spacing[a]).powi(2)).sum();
        if d2 <= r * r {
            s += c.values[j];
            n += 1.0;
        }
    }
    s / n
}

pub fn local_intensity(c: &Case) -> Vec<f64> {
    let roi = c.roi();
    let max = roi.iter().map(|&i| c.values[i]).fold(f64::NEG_INFINITY, f64::max);
    let local = roi
        .iter()
        .filter(|&&i| c.values[i] == max)
        .map(|&i| sphere_mean(c, i))
        .fold(f64::NEG_INFINITY, f64::max);
    let global = roi.iter().map(|&i| sphere_mean(c, i)).fold(f64::NEG_INFINITY, f64::max);
    vec![local, global]
}

pub fn intensity_stats(c: &Case) -> Vec<f64> {
    first_order(&c.roi().iter().map(|&i| c.values[i]).collect::<Vec<_>>())
}

pub fn intensity_histogram(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let x: Vec<f64> = c.roi().iter().map(|&i| lv[i] as f64).collect();
    let s = first_order(&x);
    let n = x.len() as f64;
    let count = |g: u32| x.iter().filter(|&&v| v == g as f64).count() as f64;
    let hist: Vec<f64> = (0..=ng).map(count).collect();
    let mode = (1..=ng).rev().max_by(|&a, &b| hist[a as usize].partial_cmp(&hist[b as usize]).unwrap()).unwrap();
    // max_by returns the last maximum; iterating in reverse makes that the lowest level
    let entropy: f64 = hist[1..].iter().filter(|&&h| h > 0.0).map(|&h| -(h / n) * log2(h / n)).sum();
    let uniformity: f64 = hist[1..].iter().map(|&h| (h / n) * (h / n)).sum();
    let grad: Vec<f64> = (1..=ng as usize)
        .map(|g| {
            if g == 1 {
                hist[2] - hist[1]
            } else if g == ng as usize {
                hist[g] - hist[g - 1]
            } else {
                0.5 * (hist[g + 1] - hist[g - 1])
            }
        })
        .collect();
    let mut gmax = (f64::NEG_INFINITY, 0);
    let mut gmin = (f64::INFINITY, 0);
    for (k, &g) in grad.iter().enumerate() {
        if g > gmax.0 {
            gmax = (g, k + 1);
        }
        if g < gmin.0 {
            gmin = (g, k + 1);
        }
    }
    let mut out = s[..9].to_vec();
    out.push(mode as f64);
    out.extend_from_slice(&s[9..16]);
    out.extend([entropy, uniformity, gmax.0, gmax.1 as f64, gmin.0, gmin.1 as f64]);
    out
}

pub fn ivh(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let x: Vec<u32> = c.roi().iter().map(|&i| lv[i]).collect();
    let lo = *x.iter().min().unwrap();
    let hi = *x.iter().max().unwrap();
    if lo == hi {
        return vec![1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
    }
    let n = x.len() as f64;
    let span = (hi - lo) as f64;
    let frac_at_least = |l: u32| x.iter().filter(|&&v| v >= l).count() as f64 / n;
    let gamma = |l: u32| (l - lo) as f64 / span;
    let v_at = |t: f64| (lo..=hi).find(|&l| gamma(l) >= t).map_or(0.0, frac_at_least);
    let i_at = |t: f64| gamma((lo..=hi + 1).find(|&l| frac_at_least(l) <= t).unwrap());
    // area under the volume curve equals the mean intensity fraction
    let auc = x.iter().map(|&l| gamma(l)).sum::<f64>() / n;
    let (v10, v90, i10, i90) = (v_at(0.1), v_at(0.9), i_at(0.1), i_at(0.9));
    vec![v10, v90, i10, i90, v10 - v90, i10 - i90, auc]
}

// ---------------------------------------------------------------- GLCM

fn glcm_one(m: &[Vec<f64>]) -> Vec<f64> {
    let ng = m.len();
    let total: f64 = m.iter().flatten().sum();
    let p: Vec<Vec<f64>> = m.iter().map(|r| r.iter().map(|c| c / total).collect()).collect();
    let l = |k: usize| (k + 1) as f64;
    let px: Vec<f64> = (0..ng).map(|i| (0..ng).map(|j| p[i][j]).sum()).collect();
    let py: Vec<f64> = (0..ng).map(|j| (0..ng).map(|i| p[i][j]).sum()).collect();
    let mux: f64 = (0..ng).map(|i| l(i) * px[i]).sum();
    let muy: f64 = (0..ng).map(|j| l(j) * py[j]).sum();
    let sx = (0..ng).map(|i| (l(i) - mux).powi(2) * px[i]).sum::<f64>().sqrt();
    let sy = (0..ng).map(|j| (l(j) - muy).powi(2) * py[j]).sum::<f64>().sqrt();
    let sum = |f: &dyn Fn(f64, f64, f64) -> f64| -> f64 {
        let mut s = 0.0;
        for i in 0..ng {
            for j in 0..ng {
                if p[i][j] > 0.0 {
                    s += f(l(i), l(j), p[i][j]);
                }
            }
        }
        s
    };
    let pd = |k: usize| sum(&|a, b, v| if (a - b).abs() as usize == k { v } else { 0.0 });
    let ps = |k: usize| sum(&|a, b, v| if (a + b) as usize == k { v } else { 0.0 });
    let ent = |v: f64| if v > 0.0 { -v * log2(v) } else { 0.0 };
    let da: f64 = (0..ng).map(|k| k as f64 * pd(k)).sum();
    let dv: f64 = (0..ng).map(|k| (k as f64 - da).powi(2) * pd(k)).sum();
    let de: f64 = (0..ng).map(|k| ent(pd(k))).sum();
    let sa: f64 = (2..=2 * ng).map(|k| k as f64 * ps(k)).sum();
    let sv: f64 = (2..=2 * ng).map(|k| (k as f64 - sa).powi(2) * ps(k)).sum();
    let se: f64 = (2..=2 * ng).map(|k| ent(ps(k))).sum();
    let hxy = sum(&|_, _, v| -v * log2(v));
    let hxy1 = sum(&|a, b, v| -v * log2(px[a as usize - 1] * py[b as usize - 1]));
    let mut hxy2 = 0.0;
    for i in 0..ng {
        for j in 0..ng {
            hxy2 += ent(px[i] * py[j]);
        }
    }
    let hx: f64 = px.iter().map(|&v| ent(v)).sum();
    let hy: f64 = py.iter().map(|&v| ent(v)).sum();
    let ngf = ng as f64;
    vec![
        p.iter().flatten().cloned().fold(0.0, f64::max),
        mux,
        sum(&|a, _, v| (a - mux).powi(2) * v),
        hxy,
        da,
        dv,
        de,
        sa,
        sv,
        se,
        sum(&|_, _, v| v * v),
        sum(&|a, b, v| (a - b).powi(2) * v),
        sum(&|a, b, v| (a - b).abs() * v),
        sum(&|a, b, v| v / (1.0 + (a - b).abs())),
        sum(&|a, b, v| v / (1.0 + (a - b).abs() / ngf)),
        sum(&|a, b, v| v / (1.0 + (a - b).powi(2))),
        sum(&|a, b, v| v / (1.0 + (a - b).powi(2) / (ngf * ngf))),
        sum(&|a, b, v| if a != b { v / (a - b).powi(2) } else { 0.0 }),
        if sx * sy > 0.0 {
            sum(&|a, b, v| (a - mux) * (b - muy) * v) / (sx * sy)
        } else {
            1.0
        },
        sum(&|a, b, v| a * b * v),
        sum(&|a, b, v| (a + b - mux - muy).powi(2) * v),
        sum(&|a, b, v| (a + b - mux - muy).powi(3) * v),
        sum(&|a, b, v| (a + b - mux - muy).powi(4) * v),
        if hx.max(hy) > 0.0 { (hxy - hxy1) / hx.max(hy) } else { 0.0 },
        (1.0 - (-2.0 * (hxy2 - hxy)).exp()).max(0.0).sqrt(),
    ]
}

pub fn glcm(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let roi = c.roi();
    let n = ng as usize;
    let mut per_dir = Vec::new();
    for d in directions() {
        let mut m = vec![vec![0.0; n]; n];
        // every ordered ROI pair separated by +d or -d
        for &u in &roi {
            for &v in &roi {
                let (pu, pv) = (c.xyz(u), c.xyz(v));
                let diff = [pv[0] - pu[0], pv[1] - pu[1], pv[2] - pu[2]];
                if diff == d || diff == [-d[0], -d[1], -d[2]] {
                    m[lv[u] as usize - 1][lv[v] as usize - 1] += 1.0;
                }
            }
        }
        per_dir.push(m);
    }
    let used: Vec<&Vec<Vec<f64>>> = per_dir.iter().filter(|m| m.iter().flatten().sum::<f64>() > 0.0).collect();
    if used.is_empty() {
        let lo = roi.iter().map(|&i| lv[i]).min().unwrap() as usize;
        let mut m = vec![vec![0.0; n]; n];
        m[lo - 1][lo - 1] = 1.0;
        let f = glcm_one(&m);
        return [f.clone(), f].concat();
    }
    let mut avg = vec![0.0; 25];
    for m in &used {
        for (a, v) in avg.iter_mut().zip(glcm_one(m)) {
            *a += v / used.len() as f64;
        }
    }
    let mut merged = vec![vec![0.0; n]; n];
    for m in &per_dir {
        for i in 0..n {
            for j in 0..n {
                merged[i][j] += m[i][j];
            }
        }
    }
    [avg, glcm_one(&merged)].concat()
}

// ---------------------------------------------------------------- size/length tables

/// Emphasis features of a `(level, j) -> count` table.
fn emphasis(t: &BTreeMap<(u32, u32), f64>, nv: f64) -> Vec<f64> {
    let ns: f64 = t.values().sum();
    let f = |g: &dyn Fn(f64, f64) -> f64| t.iter().map(|(&(i, j), &c)| c * g(i as f64, j as f64)).sum::<f64>() / ns;
    let mut rows: BTreeMap<u32, f64> = BTreeMap::new();
    let mut cols: BTreeMap<u32, f64> = BTreeMap::new();
    for (&(i, j), &c) in t {
        *rows.entry(i).or_default() += c;
        *cols.entry(j).or_default() += c;
    }
    let gnu: f64 = rows.values().map(|r| r * r).sum();
    let jnu: f64 = cols.values().map(|r| r * r).sum();
    let mi = f(&|i, _| i);
    let mj = f(&|_, j| j);
    vec![
        f(&|_, j| 1.0 / (j * j)),
        f(&|_, j| j * j),
        f(&|i, _| 1.0 / (i * i)),
        f(&|i, _| i * i),
        f(&|i, j| 1.0 / (i * i * j * j)),
        f(&|i, j| i * i / (j * j)),
        f(&|i, j| j * j / (i * i)),
        f(&|i, j| i * i * j * j),
        gnu / ns,
        gnu / (ns * ns),
        jnu / ns,
        jnu / (ns * ns),
        ns / nv,
        f(&|i, _| (i - mi).powi(2)),
        f(&|_, j| (j - mj).powi(2)),
        t.values().map(|&c| -(c / ns) * log2(c / ns)).sum(),
    ]
}

/// Runs found by walking every grid line parallel to `d` from its first voxel.
fn runs(c: &Case, lv: &[u32], d: [i64; 3]) -> BTreeMap<(u32, u32), f64> {
    let mut t = BTreeMap::new();
    for start in 0..c.values.len() {
        let p = c.xyz(start);
        if c.at(add(p, [-d[0], -d[1], -d[2]])).is_some() {
            continue;
        }
        let mut line = Vec::new();
        let mut q = p;
        while let Some(i) = c.at(q) {
            line.push(lv[i]);
            q = add(q, d);
        }
        let mut k = 0;
        while k < line.len() {
            let mut e = k;
            while e + 1 < line.len() && line[e + 1] == line[k] {
                e += 1;
            }
            if line[k] > 0 {
                *t.entry((line[k], (e - k + 1) as u32)).or_insert(0.0) += 1.0;
            }
            k = e + 1;
        }
    }
    t
}

pub fn glrlm(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let nv = c.roi().len() as f64;
    let tables: Vec<_> = directions().into_iter().map(|d| runs(c, &lv, d)).collect();
    let mut avg = vec![0.0; 16];
    let mut merged = BTreeMap::new();
    for t in &tables {
        for (a, v) in avg.iter_mut().zip(emphasis(t, nv)) {
            *a += v / 13.0;
        }
        for (&k, &v) in t {
            *merged.entry(k).or_insert(0.0) += v;
        }
    }
    [avg, emphasis(&merged, nv * 13.0)].concat()
}

/// 26-connected zones by explicit flood fill: `(level, size, member voxels)`.
fn flood_zones(c: &Case, lv: &[u32]) -> Vec<(u32, Vec<usize>)> {
    let mut seen = vec![false; lv.len()];
    let mut out = Vec::new();
    for s in 0..lv.len() {
        if lv[s] == 0 || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut stack = vec![s];
        let mut members = Vec::new();
        while let Some(u) = stack.pop() {
            members.push(u);
            for d in neighbours() {
                if let Some(w) = c.at(add(c.xyz(u), d)) {
                    if !seen[w] && lv[w] == lv[s] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        out.push((lv[s], members));
    }
    out
}

/// Chebyshev distance to the nearest position outside the ROI, searching
/// the grid padded by one voxel on every side.
fn border_distance(c: &Case, i: usize) -> u32 {
    let p = c.xyz(i);
    let mut best = i64::MAX;
    for z in -1..=c.dims[2] as i64 {
        for y in -1..=c.dims[1] as i64 {
            for x in -1..=c.dims[0] as i64 {
                let inside = c.at([x, y, z]).is_some_and(|j| c.mask[j]);
                if !inside {
                    let d = (x - p[0]).abs().max((y - p[1]).abs()).max((z - p[2]).abs());
                    best = best.min(d);
                }
            }
        }
    }
    best as u32
}

pub fn glszm(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let mut t = BTreeMap::new();
    for (level, m) in flood_zones(c, &lv) {
        *t.entry((level, m.len() as u32)).or_insert(0.0) += 1.0;
    }
    emphasis(&t, c.roi().len() as f64)
}

pub fn gldzm(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let mut t = BTreeMap::new();
    for (level, m) in flood_zones(c, &lv) {
        let d = m.iter().map(|&i| border_distance(c, i)).min().unwrap();
        *t.entry((level, d)).or_insert(0.0) += 1.0;
    }
    emphasis(&t, c.roi().len() as f64)
}

// ---------------------------------------------------------------- neighbourhood

pub fn ngtdm(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let n = ng as usize;
    let (mut cnt, mut s) = (vec![0.0; n + 1], vec![0.0; n + 1]);
    for i in c.roi() {
        let nb: Vec<f64> = neighbours()
            .into_iter()
            .filter_map(|d| c.at(add(c.xyz(i), d)))
            .filter(|&j| lv[j] > 0)
            .map(|j| lv[j] as f64)
            .collect();
        if !nb.is_empty() {
            let a = nb.iter().sum::<f64>() / nb.len() as f64;
            cnt[lv[i] as usize] += 1.0;
            s[lv[i] as usize] += (lv[i] as f64 - a).abs();
        }
    }
    let nvc: f64 = cnt.iter().sum();
    if nvc == 0.0 {
        return vec![1e6, 0.0, 0.0, 0.0, 0.0];
    }
    let p: Vec<f64> = cnt.iter().map(|x| x / nvc).collect();
    let lv_present: Vec<usize> = (1..=n).filter(|&i| p[i] > 0.0).collect();
    let ngp = lv_present.len() as f64;
    let ps: f64 = (1..=n).map(|i| p[i] * s[i]).sum();
    let st: f64 = s.iter().sum();
    let pairs = || lv_present.iter().flat_map(|&i| lv_present.iter().map(move |&j| (i, j)));
    let coarse = if ps > 0.0 { 1.0 / ps } else { 1e6 };
    let contrast = if ngp > 1.0 {
        pairs().map(|(i, j)| p[i] * p[j] * ((i as f64) - (j as f64)).powi(2)).sum::<f64>() / (ngp * (ngp - 1.0)) * st
            / nvc
    } else {
        0.0
    };
    let bden: f64 = pairs().map(|(i, j)| (i as f64 * p[i] - j as f64 * p[j]).abs()).sum();
    let busy = if bden > 0.0 { ps / bden } else { 0.0 };
    let complexity = pairs()
        .map(|(i, j)| ((i as f64) - (j as f64)).abs() * (p[i] * s[i] + p[j] * s[j]) / (p[i] + p[j]))
        .sum::<f64>()
        / nvc;
    let strength = if st > 0.0 {
        pairs().map(|(i, j)| (p[i] + p[j]) * ((i as f64) - (j as f64)).powi(2)).sum::<f64>() / st
    } else {
        0.0
    };
    vec![coarse, contrast, busy, complexity, strength]
}

pub fn ngldm(c: &Case, ng: u32) -> Vec<f64> {
    let lv = c.levels(ng);
    let mut t = BTreeMap::new();
    for i in c.roi() {
        let k = neighbours()
            .into_iter()
            .filter(|&d| c.at(add(c.xyz(i), d)).is_some_and(|j| lv[j] == lv[i]))
            .count();
        *t.entry((lv[i], k as u32 + 1)).or_insert(0.0) += 1.0;
    }
    let ns: f64 = t.values().sum();
    let mut out = emphasis(&t, c.roi().len() as f64);
    out.push(t.values().map(|v| (v / ns).powi(2)).sum());
    out
}

/// All 186 values in catalogue order.
pub fn all_features(c: &Case, ng: u32) -> Vec<f64> {
    [
        local_intensity(c),
        intensity_stats(c),
        intensity_histogram(c, ng),
        ivh(c, ng),
        glcm(c, ng),
        glrlm(c, ng),
        glszm(c, ng),
        gldzm(c, ng),
        ngtdm(c, ng),
        ngldm(c, ng),
    ]
    .concat()
}

// ---------------------------------------------------------------- quality

/// SSIM by direct 3D convolution with the full separable-product Gaussian
/// window and clamped borders.
pub fn naive_ssim(a: &[f64], b: &[f64], dims: [usize; 3], radius: i64, sigma: f64, l: f64) -> f64 {
    let w1: Vec<f64> = (-radius..=radius).map(|o| (-(o * o) as f64 / (2.0 * sigma * sigma)).exp()).collect();
    let norm: f64 = w1.iter().sum();
    let w1: Vec<f64> = w1.iter().map(|w| w / norm).collect();
    let (c1, c2) = ((0.01 * l).powi(2), (0.03 * l).powi(2));
    let clamp = |v: i64, n: usize| v.clamp(0, n as i64 - 1) as usize;
    let idx = |x: usize, y: usize, z: usize| x + dims[0] * (y + dims[1] * z);
    let mut total = 0.0;
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let (mut ma, mut mb, mut aa, mut bb, mut ab) = (0.0, 0.0, 0.0, 0.0, 0.0);
                for dz in -radius..=radius {
                    for dy in -radius..=radius {
                        for dx in -radius..=radius {
                            let w = w1[(dx + radius) as usize] * w1[(dy + radius) as usize] * w1[(dz + radius) as usize];
                            let j = idx(
                                clamp(x as i64 + dx, dims[0]),
                                clamp(y as i64 + dy, dims[1]),
                                clamp(z as i64 + dz, dims[2]),
                            );
                            ma += w * a[j];
                            mb += w * b[j];
                            aa += w * a[j] * a[j];
                            bb += w * b[j] * b[j];
                            ab += w * a[j] * b[j];
                        }
                    }
                }
                let (va, vb, cab) = (aa - ma * ma, bb - mb * mb, ab - ma * mb);
                total += ((2.0 * ma * mb + c1) * (2.0 * cab + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            }
        }
    }
    total / a.len() as f64
}

// ---------------------------------------------------------------- statistics

/// Two-sided Student-t p-value by composite Simpson integration of the density.
pub fn t_two_sided_simpson(t: f64, df: f64) -> f64 {
    let lg = |x: f64| ln_gamma(x);
    let c = (lg((df + 1.0) / 2.0) - lg(df / 2.0)).exp() / (df * std::f64::consts::PI).sqrt();
    let pdf = |x: f64| c * (1.0 + x * x / df).powf(-(df + 1.0) / 2.0);
    let t = t.abs();
    let n = 20_000;
    let h = t / n as f64;
    let mut s = pdf(0.0) + pdf(t);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * pdf(k as f64 * h);
    }
    let central = s * h / 3.0;
    1.0 - 2.0 * central
}

/// Lanczos log-gamma (g = 7, n = 9).
pub fn ln_gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (k, g) in G.iter().enumerate().skip(1) {
        a += g / (x + k as f64);
    }
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + a.ln()
}

/// Spearman rho as Pearson correlation of average ranks, with ranks found by
/// counting (O(n²)).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let rank = |v: &[f64]| -> Vec<f64> {
        v.iter()
            .map(|&a| {
                let less = v.iter().filter(|&&b| b < a).count() as f64;
                let eq = v.iter().filter(|&&b| b == a).count() as f64;
                less + (eq + 1.0) / 2.0
            })
            .collect()
    };
    let (rx, ry) = (rank(x), rank(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

/// Mann-Whitney AUC by counting all positive/negative pairs.
pub fn pairwise_auc(scores: &[f64], y: &[u8]) -> f64 {
    let (mut wins, mut pairs) = (0.0, 0.0);
    for (i, &si) in scores.iter().enumerate() {
        for (j, &sj) in scores.iter().enumerate() {
            if y[i] == 1 && y[j] == 0 {
                pairs += 1.0;
                wins += if si > sj {
                    1.0
                } else if si == sj {
                    0.5
                } else {
                    0.0
                };
            }
        }
    }
    wins / pairs
}
