//! First-order families: intensity statistics, intensity histogram and the
//! intensity-volume histogram.

use super::roi::{DiscretizedRoi, Roi};

pub const INTENSITY_STATS_NAMES: [&str; 18] = [
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "median",
    "minimum",
    "p10",
    "p90",
    "maximum",
    "interquartile_range",
    "range",
    "mean_absolute_deviation",
    "robust_mean_absolute_deviation",
    "median_absolute_deviation",
    "coefficient_of_variation",
    "quartile_coefficient_of_dispersion",
    "energy",
    "root_mean_square",
];

pub const INTENSITY_HISTOGRAM_NAMES: [&str; 23] = [
    "mean",
    "variance",
    "skewness",
    "kurtosis",
    "median",
    "minimum",
    "p10",
    "p90",
    "maximum",
    "mode",
    "interquartile_range",
    "range",
    "mean_absolute_deviation",
    "robust_mean_absolute_deviation",
    "median_absolute_deviation",
    "coefficient_of_variation",
    "quartile_coefficient_of_dispersion",
    "entropy",
    "uniformity",
    "max_histogram_gradient",
    "max_histogram_gradient_grey_level",
    "min_histogram_gradient",
    "min_histogram_gradient_grey_level",
];

pub const IVH_NAMES: [&str; 7] = [
    "v10",
    "v90",
    "i10",
    "i90",
    "v10_minus_v90",
    "i10_minus_i90",
    "area_under_curve",
];

/// Sample percentile with linear interpolation between order statistics
/// (`h = (n - 1) q`).
pub fn percentile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// The 18 intensity statistics of a non-empty sample, in [`INTENSITY_STATS_NAMES`] order.
pub fn intensity_stats(values: &[f64]) -> [f64; 18] {
    let n = values.len() as f64;
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);

    let mu = mean(values);
    let (mut m2, mut m3, mut m4, mut energy, mut mad) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for &x in values {
        let d = x - mu;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        energy += x * x;
        mad += d.abs();
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    mad /= n;
    let (skewness, kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };

    let median = percentile(&sorted, 0.5);
    let p10 = percentile(&sorted, 0.1);
    let p90 = percentile(&sorted, 0.9);
    let p25 = percentile(&sorted, 0.25);
    let p75 = percentile(&sorted, 0.75);
    let minimum = sorted[0];
    let maximum = sorted[sorted.len() - 1];

    let central: Vec<f64> = values.iter().copied().filter(|&x| x >= p10 && x <= p90).collect();
    let robust_mad = if central.is_empty() {
        0.0
    } else {
        let c = mean(&central);
        central.iter().map(|x| (x - c).abs()).sum::<f64>() / central.len() as f64
    };
    let median_ad = values.iter().map(|x| (x - median).abs()).sum::<f64>() / n;
    let cov = if m2 > 0.0 && mu != 0.0 { m2.sqrt() / mu } else { 0.0 };
    let qcod = if p75 + p25 != 0.0 {
        (p75 - p25) / (p75 + p25)
    } else {
        0.0
    };

    [
        mu,
        m2,
        skewness,
        kurtosis,
        median,
        minimum,
        p10,
        p90,
        maximum,
        p75 - p25,
        maximum - minimum,
        mad,
        robust_mad,
        median_ad,
        cov,
        qcod,
        energy,
        (energy / n).sqrt(),
    ]
}

pub fn intensity_stats_features(roi: &Roi<'_>) -> [f64; 18] {
    intensity_stats(roi.intensities())
}

pub fn intensity_histogram_features(droi: &DiscretizedRoi) -> [f64; 23] {
    let levels: Vec<f64> = droi.bins().iter().map(|&b| b as f64).collect();
    let s = intensity_stats(&levels);
    let n = levels.len() as f64;
    let hist = droi.histogram();
    let ng = droi.n_bins() as usize;

    let mut mode = 1;
    for g in 1..=ng {
        if hist[g] > hist[mode] {
            mode = g;
        }
    }
    let (mut entropy, mut uniformity) = (0.0, 0.0);
    for &c in &hist[1..] {
        if c > 0 {
            let p = c as f64 / n;
            entropy -= p * p.log2();
            uniformity += p * p;
        }
    }
    // gradient of the count histogram over levels 1..=Ng
    let h = |g: usize| hist[g] as f64;
    let gradient = |g: usize| -> f64 {
        if g == 1 {
            h(2) - h(1)
        } else if g == ng {
            h(ng) - h(ng - 1)
        } else {
            (h(g + 1) - h(g - 1)) / 2.0
        }
    };
    let (mut gmax, mut gmax_at, mut gmin, mut gmin_at) = (f64::NEG_INFINITY, 1, f64::INFINITY, 1);
    for g in 1..=ng {
        let v = gradient(g);
        if v > gmax {
            gmax = v;
            gmax_at = g;
        }
        if v < gmin {
            gmin = v;
            gmin_at = g;
        }
    }

    [
        s[0],
        s[1],
        s[2],
        s[3],
        s[4],
        s[5],
        s[6],
        s[7],
        s[8],
        mode as f64,
        s[9],
        s[10],
        s[11],
        s[12],
        s[13],
        s[14],
        s[15],
        entropy,
        uniformity,
        gmax,
        gmax_at as f64,
        gmin,
        gmin_at as f64,
    ]
}

/// Intensity-volume histogram on the discretized axis.
///
/// Levels `lo..=hi` (observed range) get intensity fraction
/// `γ = (level - lo) / (hi - lo)`; `ν(level)` is the fraction of ROI voxels
/// at or above the level.
///
/// * `V_x` is `ν` at the lowest level with `γ ≥ x%`.
/// * `I_x` is `γ` of the lowest level with `ν ≤ x%`; when even the top level
///   holds more than `x%` of the volume the next level up is used
///   (`γ = 1 + 1/(hi - lo)`).
/// * the area under the curve integrates the step function
///   `V(γ) = fraction of voxels with intensity fraction ≥ γ` over `[0, 1]`,
///   which equals the mean intensity fraction.
///
/// A single-level ROI yields `V = 1`, `I = 1` and area 1.
pub fn ivh_features(droi: &DiscretizedRoi) -> [f64; 7] {
    let lo = droi.min_level() as usize;
    let hi = droi.max_level() as usize;
    if lo == hi {
        return [1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 1.0];
    }
    let n = droi.len() as f64;
    let hist = droi.histogram();
    let span = (hi - lo) as f64;
    let gamma = |level: usize| (level - lo) as f64 / span;
    // nu[k] = fraction with level >= lo + k
    let mut nu = vec![0.0; hi - lo + 2];
    let mut above = 0u64;
    for level in (lo..=hi).rev() {
        above += hist[level];
        nu[level - lo] = above as f64 / n;
    }

    let volume_at = |frac: f64| -> f64 {
        (lo..=hi)
            .find(|&l| gamma(l) >= frac)
            .map_or(0.0, |l| nu[l - lo])
    };
    let intensity_at = |frac: f64| -> f64 {
        (lo..=hi + 1)
            .find(|&l| nu[l - lo] <= frac)
            .map_or(1.0 + 1.0 / span, gamma)
    };

    let v10 = volume_at(0.10);
    let v90 = volume_at(0.90);
    let i10 = intensity_at(0.10);
    let i90 = intensity_at(0.90);
    let auc = (lo + 1..=hi).map(|l| nu[l - lo]).sum::<f64>() / span;
    [v10, v90, i10, i90, v10 - v90, i10 - i90, auc]
}
