//! Stability of the standard under resampling and under injected outliers.
//!
//! All randomness comes from a single ChaCha8 generator seeded with
//! `seed_from_u64`. Draws happen in a fixed order (bootstrap rounds first,
//! `n` index draws per round, then outlier coordinates), so a report is a
//! pure function of its inputs and seed.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::{SerializeMap, SerializeStruct};
use serde::{Serialize, Serializer};

use crate::builders::{euclidean_relation, PointCloud};
use crate::error::{Error, Result};
use crate::relation::RelationMatrix;
use crate::scoring::{aggregated_scores, rank_table, standard, TiePolicy};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn standard_of(relation: &RelationMatrix) -> usize {
    standard(&aggregated_scores(&rank_table(relation, TiePolicy::IndexOrder)))
}

/// How often each object was the standard of a bootstrap resample.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BootstrapReport {
    bootstraps: usize,
    seed: u64,
    labels: Vec<String>,
    counts: Vec<usize>,
}

impl BootstrapReport {
    pub fn bootstraps(&self) -> usize {
        self.bootstraps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Rounds won by each original object; sums to the bootstrap count.
    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn frequency(&self, x: usize) -> f64 {
        self.counts[x] as f64 / self.bootstraps as f64
    }

    /// Most frequent standard, smallest index on ties.
    pub fn mode_object(&self) -> usize {
        let best = self.counts.iter().copied().max().unwrap_or(0);
        self.counts.iter().position(|&c| c == best).unwrap_or(0)
    }

    pub fn mode_frequency(&self) -> f64 {
        self.frequency(self.mode_object())
    }

    pub fn never_selected_fraction(&self) -> f64 {
        self.counts.iter().filter(|&&c| c == 0).count() as f64 / self.counts.len() as f64
    }

    /// Objects by descending frequency, ties by index.
    pub fn ranked(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.counts.len()).collect();
        idx.sort_by(|&a, &b| self.counts[b].cmp(&self.counts[a]).then(a.cmp(&b)));
        idx
    }

    /// Up to `m` most frequent standards, only counting objects selected at
    /// least once.
    pub fn top(&self, m: usize) -> Vec<usize> {
        self.ranked()
            .into_iter()
            .filter(|&x| self.counts[x] > 0)
            .take(m)
            .collect()
    }
}

struct Frequencies<'a>(&'a BootstrapReport);

impl Serialize for Frequencies<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let report = self.0;
        let mut map = s.serialize_map(Some(report.counts.len()))?;
        for x in report.ranked() {
            map.serialize_entry(&report.labels[x], &report.frequency(x))?;
        }
        map.end()
    }
}

impl Serialize for BootstrapReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("BootstrapReport", 6)?;
        st.serialize_field("B", &self.bootstraps)?;
        st.serialize_field("seed", &self.seed)?;
        st.serialize_field("frequency", &Frequencies(self))?;
        st.serialize_field("mode_object", &self.labels[self.mode_object()])?;
        st.serialize_field("mode_frequency", &self.mode_frequency())?;
        st.serialize_field("never_selected_fraction", &self.never_selected_fraction())?;
        st.end()
    }
}

/// Resamples `relation` `bootstraps` times and records which original
/// object wins each round.
///
/// A resample draws `n` indices uniformly with replacement. Draws are
/// ordered by original index (then draw position) before the induced
/// relation is scored, so index-order ties and the smallest-index standard
/// rule both resolve by original index.
pub fn bootstrap_standards(relation: &RelationMatrix, bootstraps: usize, seed: u64) -> Result<BootstrapReport> {
    let mut rng = rng_from_seed(seed);
    bootstrap_with(relation, bootstraps, seed, &mut rng)
}

fn bootstrap_with(
    relation: &RelationMatrix,
    bootstraps: usize,
    seed: u64,
    rng: &mut ChaCha8Rng,
) -> Result<BootstrapReport> {
    if bootstraps == 0 {
        return Err(Error::Domain("bootstrap count must be at least 1".into()));
    }
    let n = relation.len();
    let mut counts = vec![0usize; n];
    let mut draws = Vec::with_capacity(n);
    for _ in 0..bootstraps {
        draws.clear();
        draws.extend((0..n).map(|_| rng.gen_range(0..n)));
        draws.sort(); // stable: equal originals keep draw order
        let winner = standard_of(&relation.induced(&draws));
        counts[draws[winner]] += 1;
    }
    Ok(BootstrapReport {
        bootstraps,
        seed,
        labels: relation.labels().to_vec(),
        counts,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutlierMode {
    /// Every outlier is drawn independently.
    #[default]
    Spread,
    /// One outlier is drawn and then repeated.
    Duplicate,
}

impl fmt::Display for OutlierMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OutlierMode::Spread => "spread",
            OutlierMode::Duplicate => "duplicate",
        })
    }
}

impl FromStr for OutlierMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "spread" => Ok(OutlierMode::Spread),
            "duplicate" => Ok(OutlierMode::Duplicate),
            _ => Err(format!("unknown outlier mode {s:?} (expected spread or duplicate)")),
        }
    }
}

/// Which candidates count as far enough from the data.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Exclusion {
    /// Accept candidates outside the exclusion rectangle.
    #[default]
    OutsideRectangle,
    /// Accept only candidates outside the rectangle's x-range and outside
    /// its y-range.
    BothCoordinates,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Rect {
    pub fn scaled(&self, factor: f64) -> Rect {
        Rect {
            x_min: self.x_min * factor,
            x_max: self.x_max * factor,
            y_min: self.y_min * factor,
            y_max: self.y_max * factor,
        }
    }

    fn inside_x(&self, x: f64) -> bool {
        self.x_min < x && x < self.x_max
    }

    fn inside_y(&self, y: f64) -> bool {
        self.y_min < y && y < self.y_max
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutlierConfig {
    /// Domain of the clean data.
    pub domain: Rect,
    /// Outliers are drawn from the domain scaled by this factor...
    pub outlier_scale: f64,
    /// ...away from the domain scaled by this one.
    pub exclusion_scale: f64,
    pub exclusion: Exclusion,
    /// Outliers added per step; `None` means 1% of `n`, rounded up.
    pub step: Option<usize>,
    /// Stop after this many outliers, as a percentage of `n`.
    pub cap_percent: f64,
    /// Bootstrap rounds used to find the reference standards.
    pub bootstraps: usize,
}

impl Default for OutlierConfig {
    fn default() -> Self {
        Self {
            domain: Rect {
                x_min: -10.0,
                x_max: 40.0,
                y_min: -15.0,
                y_max: 15.0,
            },
            outlier_scale: 1000.0,
            exclusion_scale: 100.0,
            exclusion: Exclusion::OutsideRectangle,
            step: None,
            cap_percent: 300.0,
            bootstraps: 200,
        }
    }
}

impl OutlierConfig {
    fn accepts(&self, x: f64, y: f64) -> bool {
        let zone = self.domain.scaled(self.exclusion_scale);
        match self.exclusion {
            Exclusion::OutsideRectangle => !(zone.inside_x(x) && zone.inside_y(y)),
            Exclusion::BothCoordinates => !zone.inside_x(x) && !zone.inside_y(y),
        }
    }

    /// Draws one outlier by rejection sampling.
    pub fn sample_outlier(&self, rng: &mut impl Rng) -> [f64; 2] {
        let outer = self.domain.scaled(self.outlier_scale);
        loop {
            let x = rng.gen_range(outer.x_min..=outer.x_max);
            let y = rng.gen_range(outer.y_min..=outer.y_max);
            if self.accepts(x, y) {
                return [x, y];
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutlierReport {
    pub mode: OutlierMode,
    pub n: usize,
    /// Most frequent bootstrap standards of the clean data.
    pub initial_top3: Vec<usize>,
    /// Largest outlier count, in percent of `n`, at which the standard was
    /// still one of the reference standards.
    pub tolerance_percent: f64,
    /// `(outlier count, standard)` after each step, starting from the clean
    /// data. Indices `>= n` are outliers.
    pub trajectory: Vec<(usize, usize)>,
    labels: Vec<String>,
}

impl OutlierReport {
    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }
}

impl Serialize for OutlierReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let top: Vec<&str> = self.initial_top3.iter().map(|&x| self.label(x)).collect();
        let steps: Vec<(usize, &str)> = self.trajectory.iter().map(|&(c, x)| (c, self.label(x))).collect();
        let mut st = s.serialize_struct("OutlierReport", 4)?;
        st.serialize_field("mode", &self.mode)?;
        st.serialize_field("initial_top3", &top)?;
        st.serialize_field("tolerance_percent", &self.tolerance_percent)?;
        st.serialize_field("trajectory", &steps)?;
        st.end()
    }
}

/// Adds far-away outliers to a planar point cloud in steps until its
/// standard is no longer among the three most frequent bootstrap standards
/// of the clean data, or until the configured cap.
pub fn outlier_experiment(
    points: &PointCloud,
    mode: OutlierMode,
    seed: u64,
    config: &OutlierConfig,
) -> Result<OutlierReport> {
    if points.dim() != 2 {
        return Err(Error::Domain(format!(
            "outlier experiments need 2-D points, got dimension {}",
            points.dim()
        )));
    }
    let n = points.len();
    let mut rng = rng_from_seed(seed);
    let clean = euclidean_relation(points)?;
    let reference = bootstrap_with(&clean, config.bootstraps, seed, &mut rng)?.top(3);

    let step = config.step.unwrap_or(n.div_ceil(100)).max(1);
    let cap = (config.cap_percent * n as f64 / 100.0).floor() as usize;

    let mut cloud = points.clone();
    let mut trajectory = vec![(0, standard_of(&clean))];
    let mut tolerated = if reference.contains(&trajectory[0].1) {
        Some(0)
    } else {
        None
    };
    let fixed = match mode {
        OutlierMode::Duplicate => Some(config.sample_outlier(&mut rng)),
        OutlierMode::Spread => None,
    };

    let mut added = 0;
    while tolerated == Some(added) && added + step <= cap {
        for _ in 0..step {
            let p = fixed.unwrap_or_else(|| config.sample_outlier(&mut rng));
            cloud.push(format!("outlier-{added}"), &p)?;
            added += 1;
        }
        let s = standard_of(&euclidean_relation(&cloud)?);
        trajectory.push((added, s));
        if reference.contains(&s) {
            tolerated = Some(added);
        }
    }

    Ok(OutlierReport {
        mode,
        n,
        initial_top3: reference,
        tolerance_percent: tolerated.map_or(0.0, |t| 100.0 * t as f64 / n as f64),
        trajectory,
        labels: cloud.labels().to_vec(),
    })
}
