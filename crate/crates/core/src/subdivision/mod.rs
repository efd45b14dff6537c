//! Two-tile subdivision rules and their level-n cell decompositions.
//!
//! A rule consists of two 0-tiles (the white and the black face, glued along
//! their common boundary curve) and `2 * degree` 1-tiles. Each 1-tile lies in
//! one face (its *location*) and is sent by the map homeomorphically onto one
//! face (its *color*). The inverse branch is a [`StarChart`] from the image face
//! onto the 1-tile. Both faces share one convex model polygon and are glued by
//! the identity on its boundary, which is the invariant curve.

pub mod builtin;
pub mod chart;
pub mod complex;
pub(crate) mod index;
pub mod rulefile;
pub mod svg;

use serde::{Deserialize, Serialize};

pub use chart::{Star, StarChart};
pub use complex::{bouquet, flower, refine, refine_with_budget, BouquetSeed, CellDecomposition};
pub use svg::{render_svg, SvgOptions};

use crate::error::{Error, Result};
use crate::geometry::ModelPoint;
use crate::plane::{self, P2};
use index::PointIndex;

/// Identification tolerance for vertices and edges, in model units.
pub(crate) const MATCH_TOL: f64 = 1e-9;
/// Tolerance for "on the boundary curve" tests.
pub(crate) const CURVE_TOL: f64 = 1e-11;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

impl Color {
    /// Face index: 0 for white, 1 for black.
    pub fn face(self) -> usize {
        match self {
            Color::White => 0,
            Color::Black => 1,
        }
    }

    pub fn from_face(face: usize) -> Color {
        if face == 0 {
            Color::White
        } else {
            Color::Black
        }
    }

    pub fn other(self) -> Color {
        match self {
            Color::White => Color::Black,
            Color::Black => Color::White,
        }
    }
}

impl std::str::FromStr for Color {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "white" | "w" | "front" | "0" => Ok(Color::White),
            "black" | "b" | "back" | "1" => Ok(Color::Black),
            other => Err(Error::InvalidRule(format!("unknown color `{other}`"))),
        }
    }
}

impl std::fmt::Display for Color {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Color::White => "white",
            Color::Black => "black",
        })
    }
}

/// A 0-tile: one side of the sphere.
#[derive(Clone, Debug)]
pub struct Face {
    pub color: Color,
    pub star: Star,
}

/// Input description of a 1-tile.
///
/// `corners[k]` is the point sent to 0-vertex `k`; `mids[k]` is the point on
/// side `k` (from corner `k` to corner `k+1`) sent to the midpoint of 0-edge `k`.
#[derive(Clone, Debug)]
pub struct OneTileSpec {
    pub label: String,
    pub location: Color,
    pub color: Color,
    pub corners: Vec<P2>,
    pub mids: Option<Vec<P2>>,
    pub center: Option<P2>,
}

#[derive(Clone, Debug)]
pub struct OneTile {
    pub id: usize,
    pub label: String,
    /// Face the tile lies in.
    pub location: Color,
    /// Face the tile is mapped onto.
    pub color: Color,
    /// +1 when the chart preserves planar orientation.
    pub orientation: i8,
    pub star: Star,
    pub chart: StarChart,
    /// 1-vertex ids, indexed by the 0-vertex each corner maps to.
    pub corners: Vec<usize>,
    /// 1-edge ids, indexed by the 0-edge each side maps onto.
    pub sides: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RuleVertex {
    pub id: usize,
    pub label: String,
    pub point: ModelPoint,
    pub tiles: Vec<usize>,
    pub local_degree: usize,
}

/// A 1-edge with its two `(tile, side)` incidences: the gluing involution.
#[derive(Clone, Debug, Serialize)]
pub struct RuleEdge {
    pub id: usize,
    pub endpoints: [usize; 2],
    pub incidences: [(usize, usize); 2],
    pub zero_edge: usize,
}

#[derive(Clone, Debug)]
pub struct SubdivisionRule {
    pub name: String,
    pub degree: usize,
    /// Number of postcritical points, equal to the number of 0-vertices.
    pub post_count: usize,
    pub faces: [Face; 2],
    pub vertex_labels: Vec<String>,
    pub one_tiles: Vec<OneTile>,
    pub one_vertices: Vec<RuleVertex>,
    pub one_edges: Vec<RuleEdge>,
    /// Default expansion factor for the visual quasi-metric.
    pub lambda: f64,
    tiles_by_face: [Vec<usize>; 2],
}

impl SubdivisionRule {
    /// Builds and validates a rule.
    ///
    /// `polygon` is the common convex model polygon of both faces, listed
    /// counterclockwise starting at 0-vertex 0. `point_labels` names 1-vertices by
    /// position; unnamed vertices get `v<id>`.
    pub fn from_specs(
        name: &str,
        polygon: Vec<P2>,
        vertex_labels: Vec<String>,
        specs: Vec<OneTileSpec>,
        lambda: f64,
        point_labels: &[(ModelPoint, &str)],
    ) -> Result<Self> {
        let m = polygon.len();
        if m < 2 {
            return Err(Error::InvalidRule("model polygon needs at least 2 corners".into()));
        }
        if vertex_labels.len() != m {
            return Err(Error::InvalidRule(format!(
                "{} vertex labels for an {m}-gon",
                vertex_labels.len()
            )));
        }
        if plane::signed_area(&polygon) <= 0.0 {
            return Err(Error::InvalidRule(
                "model polygon must be listed counterclockwise".into(),
            ));
        }
        if !(lambda > 1.0) {
            return Err(Error::InvalidRule(format!("lambda must exceed 1, got {lambda}")));
        }
        if specs.is_empty() || !specs.len().is_multiple_of(2) {
            return Err(Error::InvalidRule(format!(
                "need an even, nonzero number of 1-tiles, got {}",
                specs.len()
            )));
        }
        let degree = specs.len() / 2;
        let face_star = Star::of_polygon(&polygon);
        let faces = [
            Face {
                color: Color::White,
                star: face_star.clone(),
            },
            Face {
                color: Color::Black,
                star: face_star.clone(),
            },
        ];

        let mut tiles = Vec::with_capacity(specs.len());
        for (id, spec) in specs.into_iter().enumerate() {
            if spec.corners.len() != m {
                return Err(Error::InvalidRule(format!(
                    "tile {} has {} corners, expected {m}",
                    spec.label,
                    spec.corners.len()
                )));
            }
            let mids = match spec.mids {
                Some(mids) if mids.len() == m => mids,
                Some(mids) => {
                    return Err(Error::InvalidRule(format!(
                        "tile {} has {} side points, expected {m}",
                        spec.label,
                        mids.len()
                    )))
                }
                None => (0..m)
                    .map(|k| plane::midpoint(spec.corners[k], spec.corners[(k + 1) % m]))
                    .collect(),
            };
            let star = Star {
                center: spec.center.unwrap_or_else(|| plane::centroid(&spec.corners)),
                corners: spec.corners,
                mids,
            };
            let chart = StarChart::new(&face_star, &star)
                .map_err(|e| Error::InvalidRule(format!("tile {}: {e}", spec.label)))?;
            tiles.push(OneTile {
                id,
                label: spec.label,
                location: spec.location,
                color: spec.color,
                orientation: chart.orientation(),
                star,
                chart,
                corners: Vec::new(),
                sides: Vec::new(),
            });
        }

        let mut rule = SubdivisionRule {
            name: name.to_string(),
            degree,
            post_count: m,
            faces,
            vertex_labels,
            one_tiles: tiles,
            one_vertices: Vec::new(),
            one_edges: Vec::new(),
            lambda,
            tiles_by_face: [Vec::new(), Vec::new()],
        };
        for t in &rule.one_tiles {
            rule.tiles_by_face[t.location.face()].push(t.id);
        }
        rule.build_incidence(point_labels)?;
        rule.validate()?;
        Ok(rule)
    }

    fn build_incidence(&mut self, point_labels: &[(ModelPoint, &str)]) -> Result<()> {
        let m = self.post_count;
        let mut vidx = PointIndex::new(MATCH_TOL);
        let mut eidx = PointIndex::new(MATCH_TOL);
        let mut vtiles: Vec<Vec<usize>> = Vec::new();
        let mut eincs: Vec<Vec<(usize, usize)>> = Vec::new();
        for ti in 0..self.one_tiles.len() {
            let face = self.one_tiles[ti].location.face();
            let mut corners = Vec::with_capacity(m);
            let mut sides = Vec::with_capacity(m);
            for k in 0..m {
                let p = self.canonical(ModelPoint::new(face, self.one_tiles[ti].star.corners[k]));
                let (id, new) = vidx.insert(p);
                if new {
                    vtiles.push(Vec::new());
                }
                vtiles[id].push(ti);
                corners.push(id);
                let q = self.canonical(ModelPoint::new(face, self.one_tiles[ti].star.mids[k]));
                let (eid, new) = eidx.insert(q);
                if new {
                    eincs.push(Vec::new());
                }
                eincs[eid].push((ti, k));
                sides.push(eid);
            }
            self.one_tiles[ti].corners = corners;
            self.one_tiles[ti].sides = sides;
        }
        let points = vidx.into_points();
        self.one_vertices = points
            .into_iter()
            .enumerate()
            .map(|(id, point)| {
                let label = point_labels
                    .iter()
                    .find(|(p, _)| {
                        let c = self.canonical(*p);
                        c.face == point.face && plane::dist(c.coords, point.coords) <= MATCH_TOL
                    })
                    .map(|(_, l)| l.to_string())
                    .unwrap_or_else(|| format!("v{id}"));
                let mut tiles = vtiles[id].clone();
                tiles.sort_unstable();
                tiles.dedup();
                RuleVertex {
                    id,
                    label,
                    point,
                    local_degree: tiles.len() / 2,
                    tiles,
                }
            })
            .collect();

        let mut edges = Vec::with_capacity(eincs.len());
        for (id, inc) in eincs.into_iter().enumerate() {
            if inc.len() != 2 {
                return Err(Error::InvalidRule(format!(
                    "1-edge {id} has {} incident tile sides; edges must glue in pairs",
                    inc.len()
                )));
            }
            let (t0, k0) = inc[0];
            let (t1, k1) = inc[1];
            if k0 != k1 {
                return Err(Error::InvalidRule(format!(
                    "1-edge {id} maps to 0-edge {k0} from tile {t0} but to 0-edge {k1} from tile {t1}"
                )));
            }
            let e0 = self.side_endpoints(t0, k0);
            let e1 = self.side_endpoints(t1, k1);
            if e0 != e1 {
                return Err(Error::InvalidRule(format!(
                    "1-edge {id}: tiles {t0} and {t1} disagree on its endpoints"
                )));
            }
            edges.push(RuleEdge {
                id,
                endpoints: e0,
                incidences: [inc[0], inc[1]],
                zero_edge: k0,
            });
        }
        self.one_edges = edges;
        Ok(())
    }

    fn side_endpoints(&self, tile: usize, k: usize) -> [usize; 2] {
        let c = &self.one_tiles[tile].corners;
        [c[k], c[(k + 1) % self.post_count]]
    }

    /// Checks the structural invariants of a two-tile subdivision rule.
    pub fn validate(&self) -> Result<()> {
        let m = self.post_count;
        let deg = self.degree;
        if self.one_tiles.len() != 2 * deg {
            return Err(Error::InvalidRule("tile count is not 2 * degree".into()));
        }
        for color in [Color::White, Color::Black] {
            let n = self.one_tiles.iter().filter(|t| t.color == color).count();
            if n != deg {
                return Err(Error::InvalidRule(format!(
                    "{n} tiles map onto the {color} face, expected degree {deg}"
                )));
            }
        }
        for t in &self.one_tiles {
            // Both faces use the same planar coordinates, so the black face is seen
            // mirrored from outside: planar orientation is preserved exactly when a
            // tile maps onto its own face.
            let expect = if t.location == t.color { 1 } else { -1 };
            if t.orientation != expect {
                return Err(Error::InvalidRule(format!(
                    "tile {} has inconsistent orientation for location {} and color {}",
                    t.label, t.location, t.color
                )));
            }
            let r = t.chart.contraction_ratio();
            if !(r < 1.0) {
                return Err(Error::InvalidRule(format!(
                    "chart of tile {} is not a contraction (ratio {r})",
                    t.label
                )));
            }
        }
        // Coverage: tile areas fill each face and tile centers are not shared.
        for face in 0..2 {
            let area: f64 = self.tiles_by_face[face]
                .iter()
                .map(|&i| self.one_tiles[i].star.area())
                .sum();
            let face_area = self.faces[face].star.area();
            if (area - face_area).abs() > 1e-9 * face_area.max(1.0) {
                return Err(Error::InvalidRule(format!(
                    "tiles on the {} face cover area {area}, face area is {face_area}",
                    Color::from_face(face)
                )));
            }
            for &i in &self.tiles_by_face[face] {
                let c = self.one_tiles[i].star.center;
                if !self.faces[face].star.contains(c, 0.0) {
                    return Err(Error::InvalidRule(format!(
                        "tile {} lies outside its face",
                        self.one_tiles[i].label
                    )));
                }
                for &j in &self.tiles_by_face[face] {
                    if i != j && self.one_tiles[j].star.contains(c, -1e-12)
                        && plane::boundary_distance(&self.one_tiles[j].star.boundary(), c) > 1e-9
                    {
                        return Err(Error::InvalidRule(format!(
                            "tiles {} and {} overlap",
                            self.one_tiles[i].label, self.one_tiles[j].label
                        )));
                    }
                }
            }
        }
        // The 0-vertices must be 1-vertices, and the 1-skeleton must be a sphere.
        for (k, corner) in self.faces[0].star.corners.iter().enumerate() {
            let p = self.canonical(ModelPoint::new(0, *corner));
            if !self
                .one_vertices
                .iter()
                .any(|v| v.point.face == p.face && plane::dist(v.point.coords, p.coords) <= MATCH_TOL)
            {
                return Err(Error::InvalidRule(format!(
                    "0-vertex {} is not a 1-vertex",
                    self.vertex_labels[k]
                )));
            }
        }
        let euler = self.one_vertices.len() as i64 - self.one_edges.len() as i64
            + self.one_tiles.len() as i64;
        if euler != 2 {
            return Err(Error::InvalidRule(format!(
                "Euler characteristic of the 1-skeleton is {euler}, expected 2"
            )));
        }
        if self.one_edges.len() != m * deg {
            return Err(Error::InvalidRule(format!(
                "{} 1-edges, expected m * degree = {}",
                self.one_edges.len(),
                m * deg
            )));
        }
        for v in &self.one_vertices {
            if v.tiles.len() % 2 != 0 {
                return Err(Error::InvalidRule(format!(
                    "vertex {} meets an odd number of tiles",
                    v.label
                )));
            }
        }
        // Colors alternate across every 1-edge.
        for e in &self.one_edges {
            let (a, b) = (e.incidences[0].0, e.incidences[1].0);
            if self.one_tiles[a].color == self.one_tiles[b].color {
                return Err(Error::InvalidRule(format!(
                    "tiles {} and {} share an edge but have the same color",
                    self.one_tiles[a].label, self.one_tiles[b].label
                )));
            }
        }
        Ok(())
    }

    /// 1-tile ids located in `face`, ascending.
    pub fn tiles_in(&self, face: usize) -> &[usize] {
        &self.tiles_by_face[face]
    }

    pub fn polygon(&self) -> &[P2] {
        &self.faces[0].star.corners
    }

    /// True when `p` lies on the invariant curve (the common face boundary).
    pub fn on_curve(&self, p: P2) -> bool {
        plane::boundary_distance(self.polygon(), p) <= CURVE_TOL
    }

    /// Canonical representative: points on the glued boundary move to face 0.
    pub fn canonical(&self, p: ModelPoint) -> ModelPoint {
        if p.face != 0 && self.on_curve(p.coords) {
            ModelPoint::new(0, p.coords)
        } else {
            p
        }
    }

    /// Critical 1-vertices (local degree above one).
    pub fn critical_vertices(&self) -> Vec<&RuleVertex> {
        self.one_vertices.iter().filter(|v| v.local_degree > 1).collect()
    }

    pub fn tile_count(&self, n: u32) -> u128 {
        2 * (self.degree as u128).pow(n)
    }

    pub fn edge_count(&self, n: u32) -> u128 {
        self.post_count as u128 * (self.degree as u128).pow(n)
    }

    pub fn tile_by_label(&self, label: &str) -> Option<&OneTile> {
        self.one_tiles.iter().find(|t| t.label == label)
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<&RuleVertex> {
        self.one_vertices.iter().find(|v| v.label == label)
    }
}

/// Loads one of the built-in rules: `pillow_lattes`, `barycentric` or `flap`.
pub fn load_builtin(name: &str) -> Result<SubdivisionRule> {
    match name {
        "pillow_lattes" | "pillow" => builtin::pillow_lattes(),
        "barycentric" => builtin::barycentric(),
        "flap" => builtin::flap(),
        other => Err(Error::NotFound(format!(
            "built-in rule `{other}` (known: pillow_lattes, barycentric, flap)"
        ))),
    }
}

/// Loads a built-in by name, or a rule file when `name_or_path` is a path.
pub fn load_rule(name_or_path: &str) -> Result<SubdivisionRule> {
    match load_builtin(name_or_path) {
        Err(Error::NotFound(msg)) => {
            let path = std::path::Path::new(name_or_path);
            if path.exists() {
                rulefile::load(path)
            } else {
                Err(Error::NotFound(msg))
            }
        }
        other => other,
    }
}
