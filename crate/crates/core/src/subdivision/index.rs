use std::collections::HashMap;

use crate::geometry::ModelPoint;

const CELL: f64 = 1e-7;

/// Tolerance-aware dictionary of canonical model points.
///
/// Points closer than `tol` (and on the same face) share an id. Callers must
/// canonicalize glued boundary points before insertion.
#[derive(Debug)]
pub(crate) struct PointIndex {
    tol: f64,
    cells: HashMap<(usize, i64, i64), Vec<usize>>,
    points: Vec<ModelPoint>,
}

impl PointIndex {
    pub fn new(tol: f64) -> Self {
        PointIndex {
            tol,
            cells: HashMap::new(),
            points: Vec::new(),
        }
    }

    fn cell(p: &ModelPoint) -> (usize, i64, i64) {
        (
            p.face,
            (p.coords[0] / CELL).floor() as i64,
            (p.coords[1] / CELL).floor() as i64,
        )
    }

    pub fn find(&self, p: &ModelPoint) -> Option<usize> {
        let (f, cx, cy) = Self::cell(p);
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(ids) = self.cells.get(&(f, cx + dx, cy + dy)) {
                    for &id in ids {
                        let q = &self.points[id];
                        if (q.coords[0] - p.coords[0]).abs() <= self.tol
                            && (q.coords[1] - p.coords[1]).abs() <= self.tol
                        {
                            return Some(id);
                        }
                    }
                }
            }
        }
        None
    }

    /// Returns `(id, newly_inserted)`.
    pub fn insert(&mut self, p: ModelPoint) -> (usize, bool) {
        if let Some(id) = self.find(&p) {
            return (id, false);
        }
        let id = self.points.len();
        self.cells.entry(Self::cell(&p)).or_default().push(id);
        self.points.push(p);
        (id, true)
    }

    pub fn into_points(self) -> Vec<ModelPoint> {
        self.points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn merges_within_tolerance_across_cells() {
        let mut idx = PointIndex::new(1e-9);
        let a = ModelPoint::new(0, [0.3, 0.3]);
        // straddles a cell boundary
        let b = ModelPoint::new(0, [0.3 + 5e-10, 0.3 - 5e-10]);
        let c = ModelPoint::new(1, [0.3, 0.3]);
        assert_eq!(idx.insert(a), (0, true));
        assert_eq!(idx.insert(b), (0, false));
        assert_eq!(idx.insert(c), (1, true));
        assert_eq!(idx.into_points().len(), 2);
    }
}
