//! The affine plane AG(2,q) with its parallel classes.
//!
//! Non-vertical lines `y = m·x + b` are grouped by slope `m`, one class per
//! slope in field-enumeration order; the vertical lines `x = c` form the last
//! class. Line `(m, b)` has index `enc(m)·q + enc(b)`, vertical line `x = c`
//! has index `q² + enc(c)`. Point `(x, y)` carries label `enc(x)·q + enc(y) + 1`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{FieldElement, FieldError, FieldSpec};

/// Largest plane order accepted.
pub const MAX_PLANE_ORDER: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("plane order must be at least 2 (got {0})")]
    Degenerate(usize),
    #[error("plane order {0} exceeds the cap of {MAX_PLANE_ORDER}")]
    TooLarge(usize),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("points must be distinct (got {0} twice)")]
    SamePoint(usize),
    #[error("point label {label} out of range 1..={max}")]
    PointOutOfRange { label: usize, max: usize },
    #[error("line index {index} out of range 0..{count}")]
    LineOutOfRange { index: usize, count: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Point {
    pub label: usize,
    /// Field-enumeration indices of the coordinates.
    pub x: usize,
    pub y: usize,
}

#[derive(Debug, Clone)]
pub struct AffinePlane {
    q: usize,
    points: Vec<Point>,
    /// Each line as a sorted list of point labels.
    lines: Vec<Vec<usize>>,
    /// Parallel classes as lists of line indices.
    classes: Vec<Vec<usize>>,
    class_of_line: Vec<usize>,
    /// Row-major (q²)×(q²) table indexed by zero-based labels; `usize::MAX` on the diagonal.
    through: Vec<usize>,
}

/// Serialized form of a plane.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneDocument {
    pub q: usize,
    pub points: Vec<Point>,
    pub lines: Vec<Vec<usize>>,
    pub classes: Vec<Vec<usize>>,
}

impl AffinePlane {
    pub fn build(q: usize) -> Result<Self, PlaneError> {
        if q < 2 {
            return Err(PlaneError::Degenerate(q));
        }
        if q > MAX_PLANE_ORDER {
            return Err(PlaneError::TooLarge(q));
        }
        let spec = FieldSpec::with_order(q as u64)?;
        let elems = FieldElement::enumerate(&spec);
        let label = |x: &FieldElement, y: &FieldElement| x.index() * q + y.index() + 1;

        let points = (0..q * q)
            .map(|i| Point {
                label: i + 1,
                x: i / q,
                y: i % q,
            })
            .collect();

        let mut lines = Vec::with_capacity(q * q + q);
        let mut classes = Vec::with_capacity(q + 1);
        for m in &elems {
            let mut class = Vec::with_capacity(q);
            for b in &elems {
                let mut line: Vec<usize> = elems
                    .iter()
                    .map(|x| {
                        let y = m.mul(x)?.add(b)?;
                        Ok(label(x, &y))
                    })
                    .collect::<Result<_, FieldError>>()?;
                line.sort_unstable();
                class.push(lines.len());
                lines.push(line);
            }
            classes.push(class);
        }
        let mut vertical = Vec::with_capacity(q);
        for c in &elems {
            let line: Vec<usize> = elems.iter().map(|y| label(c, y)).collect();
            vertical.push(lines.len());
            lines.push(line);
        }
        classes.push(vertical);

        let mut class_of_line = vec![0; lines.len()];
        for (ci, class) in classes.iter().enumerate() {
            for &l in class {
                class_of_line[l] = ci;
            }
        }

        let n = q * q;
        let mut through = vec![usize::MAX; n * n];
        for (li, line) in lines.iter().enumerate() {
            for &a in line {
                for &b in line {
                    if a != b {
                        through[(a - 1) * n + (b - 1)] = li;
                    }
                }
            }
        }

        Ok(AffinePlane {
            q,
            points,
            lines,
            classes,
            class_of_line,
            through,
        })
    }

    pub fn order(&self) -> usize {
        self.q
    }

    pub fn num_points(&self) -> usize {
        self.q * self.q
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn lines(&self) -> &[Vec<usize>] {
        &self.lines
    }

    pub fn line(&self, index: usize) -> &[usize] {
        &self.lines[index]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    fn check_label(&self, label: usize) -> Result<(), PlaneError> {
        let max = self.num_points();
        if label == 0 || label > max {
            Err(PlaneError::PointOutOfRange { label, max })
        } else {
            Ok(())
        }
    }

    /// Index of the unique line through two distinct points.
    pub fn line_through(&self, a: usize, b: usize) -> Result<usize, PlaneError> {
        self.check_label(a)?;
        self.check_label(b)?;
        if a == b {
            return Err(PlaneError::SamePoint(a));
        }
        Ok(self.line_through_unchecked(a, b))
    }

    /// Table lookup without range checks; labels must be valid and distinct.
    #[inline]
    pub fn line_through_unchecked(&self, a: usize, b: usize) -> usize {
        self.through[(a - 1) * self.num_points() + (b - 1)]
    }

    /// Zero-based index of the parallel class containing a line.
    pub fn class_of(&self, line: usize) -> Result<usize, PlaneError> {
        self.class_of_line
            .get(line)
            .copied()
            .ok_or(PlaneError::LineOutOfRange {
                index: line,
                count: self.lines.len(),
            })
    }

    /// The line of class `class` passing through `point`.
    pub fn line_in_class_through(&self, class: usize, point: usize) -> Option<usize> {
        self.classes
            .get(class)?
            .iter()
            .copied()
            .find(|&l| self.lines[l].binary_search(&point).is_ok())
    }

    pub fn to_document(&self) -> PlaneDocument {
        PlaneDocument {
            q: self.q,
            points: self.points.clone(),
            lines: self.lines.clone(),
            classes: self.classes.clone(),
        }
    }
}

/// Outcome of checking the five defining properties of an affine plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub point_count: bool,
    pub line_size: bool,
    pub unique_line: bool,
    pub line_count: bool,
    pub parallel_classes: bool,
}

impl AxiomReport {
    pub fn all(&self) -> bool {
        self.point_count
            && self.line_size
            && self.unique_line
            && self.line_count
            && self.parallel_classes
    }
}

/// Exhaustive check of the axioms on the raw incidence data (does not use the lookup table).
pub fn check_axioms(
    q: usize,
    lines: &[Vec<usize>],
    classes: &[Vec<usize>],
    num_points: usize,
) -> AxiomReport {
    let n = num_points;
    let point_count = n == q * q;
    let line_size = lines.iter().all(|l| l.len() == q);
    let mut pair_hits = vec![0u32; n * n];
    for line in lines {
        for &a in line {
            for &b in line {
                if a != b && a >= 1 && b >= 1 && a <= n && b <= n {
                    pair_hits[(a - 1) * n + (b - 1)] += 1;
                }
            }
        }
    }
    let unique_line = (0..n).all(|a| (0..n).all(|b| a == b || pair_hits[a * n + b] == 1));
    let line_count = lines.len() == q * q + q;

    let mut seen_line = vec![0u32; lines.len()];
    let mut parallel_classes = classes.len() == q + 1;
    for class in classes {
        let mut covered = vec![0u32; n + 1];
        for &l in class {
            match lines.get(l) {
                Some(line) => {
                    seen_line[l] += 1;
                    for &p in line {
                        if p <= n {
                            covered[p] += 1;
                        }
                    }
                }
                None => parallel_classes = false,
            }
        }
        parallel_classes &= covered[1..].iter().all(|&c| c == 1);
    }
    parallel_classes &= seen_line.iter().all(|&c| c == 1);

    AxiomReport {
        point_count,
        line_size,
        unique_line,
        line_count,
        parallel_classes,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_planes_have_the_right_shape() {
        for (q, lines, classes) in [(2, 6, 3), (3, 12, 4), (4, 20, 5)] {
            let plane = AffinePlane::build(q).unwrap();
            assert_eq!(plane.num_points(), q * q);
            assert_eq!(plane.lines().len(), lines);
            assert_eq!(plane.classes().len(), classes);
            let doc = plane.to_document();
            assert!(check_axioms(q, &doc.lines, &doc.classes, doc.points.len()).all());
        }
    }

    #[test]
    fn q2_classes_are_perfect_matchings() {
        let plane = AffinePlane::build(2).unwrap();
        for class in plane.classes() {
            let mut pts: Vec<usize> = class.iter().flat_map(|&l| plane.line(l).to_vec()).collect();
            pts.sort_unstable();
            assert_eq!(pts, vec![1, 2, 3, 4]);
        }
        let mut lines = std::collections::HashSet::new();
        for a in 1..=4 {
            for b in a + 1..=4 {
                lines.insert(plane.line_through(a, b).unwrap());
            }
        }
        assert_eq!(lines.len(), 6);
    }

    #[test]
    fn q3_lookup_examples() {
        let plane = AffinePlane::build(3).unwrap();
        let l = plane.line_through(1, 2).unwrap();
        assert_eq!(plane.line(l), &[1, 2, 3]);
        let c = plane.class_of(l).unwrap();
        let l456 = plane.line_through(4, 5).unwrap();
        let l789 = plane.line_through(7, 9).unwrap();
        assert_eq!(plane.line(l456), &[4, 5, 6]);
        assert_eq!(plane.class_of(l456).unwrap(), c);
        assert_eq!(plane.class_of(l789).unwrap(), c);
        let l147 = plane.line_through(1, 4).unwrap();
        assert_eq!(plane.line(l147), &[1, 4, 7]);
        assert_ne!(plane.class_of(l147).unwrap(), c);
    }

    #[test]
    fn errors() {
        assert_eq!(
            AffinePlane::build(1).unwrap_err(),
            PlaneError::Degenerate(1)
        );
        assert!(matches!(AffinePlane::build(6), Err(PlaneError::Field(_))));
        assert_eq!(
            AffinePlane::build(17).unwrap_err(),
            PlaneError::TooLarge(17)
        );
        let plane = AffinePlane::build(3).unwrap();
        assert_eq!(plane.line_through(2, 2), Err(PlaneError::SamePoint(2)));
        assert!(matches!(
            plane.line_through(0, 2),
            Err(PlaneError::PointOutOfRange { .. })
        ));
        assert!(matches!(
            plane.line_through(1, 10),
            Err(PlaneError::PointOutOfRange { .. })
        ));
        assert!(matches!(
            plane.class_of(12),
            Err(PlaneError::LineOutOfRange { .. })
        ));
    }

    #[test]
    fn intersection_pattern_and_double_count() {
        for q in [2usize, 3, 4, 5, 7, 8, 9] {
            let plane = AffinePlane::build(q).unwrap();
            let total: usize = plane.lines().iter().map(Vec::len).sum();
            assert_eq!(total, q * q * q + q * q);
            assert_eq!(total, (q + 1) * q * q);
            for (i, a) in plane.lines().iter().enumerate() {
                for (j, b) in plane.lines().iter().enumerate().skip(i + 1) {
                    let common = a.iter().filter(|p| b.binary_search(p).is_ok()).count();
                    let same_class = plane.class_of(i).unwrap() == plane.class_of(j).unwrap();
                    assert_eq!(common, if same_class { 0 } else { 1 });
                }
            }
        }
    }

    #[test]
    fn corrupted_incidence_fails_axioms() {
        let plane = AffinePlane::build(3).unwrap();
        let mut doc = plane.to_document();
        doc.lines[0].swap_remove(0);
        let report = check_axioms(3, &doc.lines, &doc.classes, 9);
        assert!(!report.line_size);
        assert!(!report.unique_line);
        assert!(!report.all());
    }
}
