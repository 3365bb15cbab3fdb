//! Relations built from raw data: point clouds, binary images and
//! publication records.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::network::Adjacency;
use crate::relation::{check_unique, index_labels, RelationMatrix};

/// `n` labeled points of a common dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    labels: Vec<String>,
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(labels: Vec<String>, points: &[Vec<f64>]) -> Result<Self> {
        if labels.len() != points.len() {
            return Err(Error::Domain(format!(
                "{} labels for {} points",
                labels.len(),
                points.len()
            )));
        }
        check_unique(&labels)?;
        let dim = points.first().map_or(0, Vec::len);
        if dim == 0 && !points.is_empty() {
            return Err(Error::Domain("points have no coordinates".into()));
        }
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::Domain(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::Domain(format!("point {i} has a non-finite coordinate")));
            }
            coords.extend_from_slice(p);
        }
        Ok(Self { labels, dim, coords })
    }

    pub fn unlabeled(points: &[Vec<f64>]) -> Result<Self> {
        Self::new(index_labels(points.len()), points)
    }

    /// Points on the real line, labeled by index.
    pub fn on_line(xs: &[f64]) -> Result<Self> {
        let points: Vec<Vec<f64>> = xs.iter().map(|&x| vec![x]).collect();
        Self::unlabeled(&points)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// Appends a point with the given label.
    pub fn push(&mut self, label: String, point: &[f64]) -> Result<()> {
        if point.len() != self.dim {
            return Err(Error::Domain(format!(
                "point has dimension {}, expected {}",
                point.len(),
                self.dim
            )));
        }
        if self.labels.contains(&label) {
            return Err(Error::DuplicateLabel(label));
        }
        self.labels.push(label);
        self.coords.extend_from_slice(point);
        Ok(())
    }
}

/// Reads a points CSV: one point per line, with a leading label column
/// when `labeled` is set.
pub fn load_points(path: &Path, labeled: bool) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text, path, labeled)
}

pub fn parse_points(text: &str, origin: &Path, labeled: bool) -> Result<PointCloud> {
    let mut labels = Vec::new();
    let mut points = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut cells = line.split(',').map(str::trim);
        if labeled {
            labels.push(cells.next().unwrap_or_default().to_owned());
        }
        let point = cells
            .map(|c| {
                c.parse::<f64>()
                    .map_err(|_| Error::parse(origin, i + 1, format!("not a number: {c:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        points.push(point);
    }
    if points.is_empty() {
        return Err(Error::parse(origin, 1, "no points"));
    }
    if !labeled {
        labels = index_labels(points.len());
    }
    PointCloud::new(labels, &points)
}

/// Pairwise Euclidean distances.
pub fn euclidean_relation(points: &PointCloud) -> Result<RelationMatrix> {
    RelationMatrix::from_fn(points.labels.clone(), |i, j| {
        if i == j {
            return 0.0;
        }
        points
            .point(i)
            .iter()
            .zip(points.point(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    })
}

/// Euclidean relation of points on a line, labeled by index.
pub fn euclidean_line(xs: &[f64]) -> RelationMatrix {
    euclidean_relation(&PointCloud::on_line(xs).expect("finite coordinates")).expect("valid distances")
}

/// A binary image reduced to its foreground pixels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BinaryImage {
    label: String,
    width: u32,
    height: u32,
    foreground: Vec<(u32, u32)>,
}

impl BinaryImage {
    /// `foreground` holds `(row, column)` pairs.
    pub fn new(label: impl Into<String>, width: u32, height: u32, mut foreground: Vec<(u32, u32)>) -> Result<Self> {
        let label = label.into();
        if let Some(&(r, c)) = foreground.iter().find(|&&(r, c)| r >= height || c >= width) {
            return Err(Error::Domain(format!(
                "image {label:?}: pixel ({r}, {c}) outside {width}x{height}"
            )));
        }
        foreground.sort_unstable();
        foreground.dedup();
        Ok(Self {
            label,
            width,
            height,
            foreground,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn foreground(&self) -> &[(u32, u32)] {
        &self.foreground
    }
}

/// Parses a plain (`P1`) portable bitmap. `#` starts a comment that runs to
/// the end of the line; pixel digits may or may not be separated.
pub fn parse_pbm(text: &str, label: &str, origin: &Path) -> Result<BinaryImage> {
    let mut tokens = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let content = line.split('#').next().unwrap_or_default();
        tokens.extend(content.split_whitespace().map(|t| (i + 1, t)));
    }
    let mut tokens = tokens.into_iter();
    match tokens.next() {
        Some((_, "P1")) => {}
        Some((line, t)) => return Err(Error::parse(origin, line, format!("expected P1 magic, found {t:?}"))),
        None => return Err(Error::parse(origin, 1, "empty image file")),
    }
    let mut dimension = |what: &str| -> Result<u32> {
        let (line, t) = tokens
            .next()
            .ok_or_else(|| Error::parse(origin, 1, format!("missing {what}")))?;
        t.parse()
            .map_err(|_| Error::parse(origin, line, format!("bad {what} {t:?}")))
    };
    let width = dimension("width")?;
    let height = dimension("height")?;

    let mut foreground = Vec::new();
    let mut count = 0u64;
    let total = u64::from(width) * u64::from(height);
    for (line, t) in tokens {
        for ch in t.chars() {
            if count >= total {
                return Err(Error::parse(origin, line, "more pixels than width x height"));
            }
            match ch {
                '0' => {}
                '1' => foreground.push(((count / u64::from(width)) as u32, (count % u64::from(width)) as u32)),
                _ => return Err(Error::parse(origin, line, format!("bad pixel {ch:?}"))),
            }
            count += 1;
        }
    }
    if count != total {
        return Err(Error::parse(
            origin,
            text.lines().count().max(1),
            format!("expected {total} pixels, found {count}"),
        ));
    }
    BinaryImage::new(label, width, height, foreground)
}

/// Reads a `P1` bitmap; the label is the file stem.
pub fn load_pbm(path: &Path) -> Result<BinaryImage> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_pbm(&text, &label, path)
}

/// Directed Hausdorff distance: the farthest any foreground pixel of `from`
/// lies from the foreground of `to`.
pub fn directed_hausdorff(from: &BinaryImage, to: &BinaryImage) -> f64 {
    let worst = from
        .foreground
        .iter()
        .map(|&(r, c)| {
            to.foreground
                .iter()
                .map(|&(r2, c2)| {
                    let dr = i64::from(r) - i64::from(r2);
                    let dc = i64::from(c) - i64::from(c2);
                    dr * dr + dc * dc
                })
                .min()
                .unwrap_or(i64::MAX)
        })
        .max()
        .unwrap_or(0);
    // squared distances are exact integers; one rounding at the end
    (worst as f64).sqrt()
}

/// Asymmetric Hausdorff relation over `images`, in the given order.
pub fn hausdorff_relation(images: &[BinaryImage]) -> Result<RelationMatrix> {
    if let Some(img) = images.iter().find(|img| img.foreground.is_empty()) {
        return Err(Error::EmptyImage(img.label.clone()));
    }
    let labels = images.iter().map(|img| img.label.clone()).collect();
    RelationMatrix::from_fn(labels, |i, j| {
        if i == j {
            0.0
        } else {
            directed_hausdorff(&images[i], &images[j])
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Deserialize)]
pub struct PublicationRecord {
    pub id: String,
    pub authors: Vec<String>,
}

/// Reads one JSON publication record per line. Blank lines are skipped.
pub fn load_publications(path: &Path) -> Result<Vec<PublicationRecord>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::parse(path, i + 1, e.to_string())))
        .collect()
}

/// Co-authorship relation over the authors of a publication list.
#[derive(Clone, Debug, PartialEq)]
pub struct CoauthorRelation {
    pub relation: RelationMatrix,
    /// Authors sharing at least one publication.
    pub adjacency: Adjacency,
    n: usize,
    affinity: Vec<u64>,
}

impl CoauthorRelation {
    pub fn labels(&self) -> &[String] {
        self.relation.labels()
    }

    /// Raw affinity from `from` to `to`, before conversion to a cost.
    pub fn affinity(&self, from: usize, to: usize) -> u64 {
        self.affinity[from * self.n + to]
    }

    pub fn affinity_rows(&self) -> impl Iterator<Item = &[u64]> {
        self.affinity.chunks(self.n)
    }
}

/// Builds the co-authorship relation.
///
/// The affinity from A to B sums, over the publications A and B share, the
/// number of authors of the publication times A's total publication count.
/// Costs reflect affinities (`1 + max - affinity`) so that stronger ties
/// rank first; authors without a shared publication get `2 + max`. Authors
/// are indexed by first appearance.
pub fn coauthor_relation(pubs: &[PublicationRecord]) -> Result<CoauthorRelation> {
    if pubs.is_empty() {
        return Err(Error::Domain("no publication records".into()));
    }
    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut members: Vec<Vec<usize>> = Vec::with_capacity(pubs.len());
    for p in pubs {
        if p.authors.is_empty() {
            return Err(Error::Domain(format!("publication {:?} has no authors", p.id)));
        }
        let mut ids = Vec::with_capacity(p.authors.len());
        for a in &p.authors {
            let id = *index.entry(a.as_str()).or_insert_with(|| {
                labels.push(a.clone());
                labels.len() - 1
            });
            if ids.contains(&id) {
                return Err(Error::Domain(format!(
                    "publication {:?} lists author {a:?} twice",
                    p.id
                )));
            }
            ids.push(id);
        }
        members.push(ids);
    }

    let n = labels.len();
    let mut pub_count = vec![0u64; n];
    for ids in &members {
        for &a in ids {
            pub_count[a] += 1;
        }
    }
    let mut affinity = vec![0u64; n * n];
    for ids in &members {
        let size = ids.len() as u64;
        for &a in ids {
            for &b in ids.iter().filter(|&&b| b != a) {
                affinity[a * n + b] += size * pub_count[a];
            }
        }
    }

    let max = affinity.iter().copied().max().unwrap_or(0);
    let relation = RelationMatrix::from_fn(labels, |a, b| {
        let aff = affinity[a * n + b];
        if a == b {
            0.0
        } else if aff > 0 {
            (1 + max - aff) as f64
        } else {
            (2 + max) as f64
        }
    })?;
    let adjacency = Adjacency::new(
        (0..n)
            .map(|a| (0..n).filter(|&b| affinity[a * n + b] > 0).collect())
            .collect(),
    )?;
    Ok(CoauthorRelation {
        relation,
        adjacency,
        n,
        affinity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::validate_relation;

    fn rows(m: &RelationMatrix) -> Vec<Vec<f64>> {
        m.rows().map(<[f64]>::to_vec).collect()
    }

    #[test]
    fn line_distances() {
        let m = euclidean_line(&[0.0, 1.0, 3.0]);
        assert_eq!(
            rows(&m),
            vec![vec![0.0, 1.0, 3.0], vec![1.0, 0.0, 2.0], vec![3.0, 2.0, 0.0]]
        );
    }

    #[test]
    fn three_four_five() {
        let pc = PointCloud::unlabeled(&[vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let m = euclidean_relation(&pc).unwrap();
        assert_eq!(m.get(0, 1), 5.0);
        assert!(m.is_symmetric());
        assert_eq!(rows(&euclidean_line(&[7.0])), vec![vec![0.0]]);
    }

    #[test]
    fn dimension_mismatch() {
        let err = PointCloud::unlabeled(&[vec![0.0, 0.0], vec![1.0]]).unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn points_csv() {
        let pc = parse_points("a,0,0\nb,3,4\n", Path::new("p.csv"), true).unwrap();
        assert_eq!(pc.labels(), ["a", "b"]);
        assert_eq!(pc.point(1), [3.0, 4.0]);
        let pc = parse_points("1.5\n2\n", Path::new("p.csv"), false).unwrap();
        assert_eq!(pc.labels(), ["0", "1"]);
    }

    fn image(label: &str, pixels: &[(u32, u32)]) -> BinaryImage {
        BinaryImage::new(label, 8, 8, pixels.to_vec()).unwrap()
    }

    #[test]
    fn hausdorff_identity_and_subset() {
        let a = image("a", &[(1, 1), (2, 2)]);
        let b = image("b", &[(1, 1), (2, 2), (6, 6)]);
        let m = hausdorff_relation(&[a.clone(), a.clone().with_label("a2"), b]).unwrap();
        assert_eq!(m.get(0, 1), 0.0);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.get(0, 2), 0.0);
        assert_eq!(m.get(2, 0), 32f64.sqrt());
        assert!(!m.is_symmetric());
    }

    #[test]
    fn hausdorff_single_pixels() {
        let m = hausdorff_relation(&[image("a", &[(0, 0)]), image("b", &[(3, 4)])]).unwrap();
        assert_eq!(m.get(0, 1), 5.0);
        assert_eq!(m.get(1, 0), 5.0);
    }

    #[test]
    fn hausdorff_empty_image() {
        let err = hausdorff_relation(&[image("a", &[(0, 0)]), image("blank", &[])]).unwrap_err();
        assert!(matches!(err, Error::EmptyImage(l) if l == "blank"));
    }

    #[test]
    fn pbm_parsing() {
        let text = "P1\n# a comment\n3 2\n0 1 0\n001\n";
        let img = parse_pbm(text, "x", Path::new("x.pbm")).unwrap();
        assert_eq!((img.width(), img.height()), (3, 2));
        assert_eq!(img.foreground(), [(0, 1), (1, 2)]);
        assert!(parse_pbm("P4\n1 1\n1\n", "x", Path::new("x.pbm")).is_err());
        assert!(parse_pbm("P1\n2 2\n1 0 1\n", "x", Path::new("x.pbm")).is_err());
        assert!(parse_pbm("P1\n1 1\n2\n", "x", Path::new("x.pbm")).is_err());
    }

    fn record(id: &str, authors: &[&str]) -> PublicationRecord {
        PublicationRecord {
            id: id.into(),
            authors: authors.iter().map(|a| a.to_string()).collect(),
        }
    }

    #[test]
    fn coauthor_affinity_examples() {
        // Alice: 5 publications, Bob: 4, one shared 3-author paper.
        let mut pubs = vec![record("shared", &["alice", "bob", "carol"])];
        pubs.extend((0..4).map(|i| record(&format!("a{i}"), &["alice"])));
        pubs.extend((0..3).map(|i| record(&format!("b{i}"), &["bob"])));
        pubs.push(record("solo", &["dave"]));
        let co = coauthor_relation(&pubs).unwrap();
        let (alice, bob, dave) = (0, 1, 3);
        assert_eq!(co.affinity(alice, bob), 15);
        assert_eq!(co.affinity(bob, alice), 12);
        assert_eq!(co.adjacency.neighbors(alice), [1, 2]);
        assert!(co.adjacency.neighbors(dave).is_empty());
        let max = co.affinity_rows().flatten().copied().max().unwrap() as f64;
        assert_eq!(co.relation.get(alice, dave), 2.0 + max);
        assert_eq!(co.relation.get(alice, bob), 1.0 + max - 15.0);
        let rows = rows(&co.relation);
        assert!(validate_relation(&rows).unwrap().valid);
    }

    #[test]
    fn coauthor_rejects_repeated_author() {
        assert!(coauthor_relation(&[record("p", &["a", "a"])]).is_err());
        assert!(coauthor_relation(&[]).is_err());
    }

    impl BinaryImage {
        fn with_label(mut self, label: &str) -> Self {
            self.label = label.into();
            self
        }
    }
}
