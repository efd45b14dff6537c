//! Level-`n` cell decompositions, flowers and bouquets.

use std::collections::HashMap;

use serde::Serialize;

use super::index::PointIndex;
use super::{Color, Star, SubdivisionRule, MATCH_TOL};
use crate::error::{Error, Result};
use crate::geometry::{self, ModelPoint};
use crate::plane;
use crate::symbolic::TileWord;

/// Default cap on `tiles + edges + vertices` of a refinement.
pub const CELL_BUDGET: u128 = 2_000_000;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct TileRecord {
    pub id: usize,
    /// Face the tile is mapped onto by `f^n`.
    pub color: Color,
    /// Face the tile lies in.
    pub face: usize,
    pub address: TileWord,
    pub star: Star,
    /// Vertex ids by the 0-vertex each corner maps to.
    pub corners: Vec<usize>,
    /// Edge ids by the 0-edge each side maps onto.
    pub sides: Vec<usize>,
    /// Edge ids counterclockwise as seen from outside the sphere.
    pub boundary: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EdgeRecord {
    pub id: usize,
    pub endpoints: [usize; 2],
    pub tiles: [usize; 2],
    pub midpoint: ModelPoint,
}

#[derive(Clone, Debug, Serialize)]
pub struct VertexRecord {
    pub id: usize,
    pub point: ModelPoint,
    pub tiles: Vec<usize>,
    /// Local degree of `f^n` at the vertex.
    pub local_degree: usize,
}

/// Image ids of each cell under the map, into the level `n - 1` complex.
#[derive(Clone, Debug, Serialize)]
pub struct MapAction {
    pub tiles: Vec<usize>,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CellDecomposition {
    pub version: u32,
    pub rule: String,
    pub level: usize,
    pub post_count: usize,
    pub tiles: Vec<TileRecord>,
    pub edges: Vec<EdgeRecord>,
    pub vertices: Vec<VertexRecord>,
    pub map_action: Option<MapAction>,
    #[serde(skip)]
    by_address: HashMap<TileWord, usize>,
}

impl CellDecomposition {
    pub fn tile_of(&self, address: &TileWord) -> Option<usize> {
        self.by_address.get(address).copied()
    }

    /// Tile ids containing `x`, ascending.
    pub fn tiles_containing(&self, rule: &SubdivisionRule, x: &ModelPoint) -> Vec<usize> {
        let mut out: Vec<usize> = if self.level == 0 {
            let x = rule.canonical(*x);
            if x.face == 0 && rule.on_curve(x.coords) {
                vec![0, 1]
            } else {
                vec![x.face]
            }
        } else {
            geometry::point_to_addresses_all(rule, x, self.level)
                .iter()
                .filter_map(|w| self.tile_of(w))
                .collect()
        };
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

struct Level {
    words: Vec<Vec<u16>>,
    stars: Vec<Star>,
    faces: Vec<usize>,
    colors: Vec<Color>,
    corners: Vec<Vec<usize>>,
    sides: Vec<Vec<usize>>,
    vertex_points: Vec<ModelPoint>,
    vertex_tiles: Vec<Vec<usize>>,
    edge_points: Vec<ModelPoint>,
    edge_incidences: Vec<Vec<(usize, usize)>>,
}

impl Level {
    fn base(rule: &SubdivisionRule) -> Result<Self> {
        let stars = vec![rule.faces[0].star.clone(), rule.faces[1].star.clone()];
        Level::index(
            rule,
            vec![Vec::new(), Vec::new()],
            stars,
            vec![0, 1],
            vec![Color::White, Color::Black],
        )
    }

    fn refine(&self, rule: &SubdivisionRule) -> Result<Self> {
        let cap = self.words.len() * rule.degree;
        let mut words = Vec::with_capacity(cap);
        let mut stars = Vec::with_capacity(cap);
        let mut faces = Vec::with_capacity(cap);
        let mut colors = Vec::with_capacity(cap);
        for t in &rule.one_tiles {
            for j in 0..self.words.len() {
                if self.faces[j] != t.color.face() {
                    continue;
                }
                let mut w = Vec::with_capacity(self.words[j].len() + 1);
                w.push(t.id as u16);
                w.extend_from_slice(&self.words[j]);
                words.push(w);
                stars.push(self.stars[j].map(|p| t.chart.apply(p)));
                faces.push(t.location.face());
                colors.push(self.colors[j]);
            }
        }
        Level::index(rule, words, stars, faces, colors)
    }

    fn index(
        rule: &SubdivisionRule,
        words: Vec<Vec<u16>>,
        stars: Vec<Star>,
        faces: Vec<usize>,
        colors: Vec<Color>,
    ) -> Result<Self> {
        let m = rule.post_count;
        let mut vidx = PointIndex::new(MATCH_TOL);
        let mut eidx = PointIndex::new(MATCH_TOL);
        let mut vertex_tiles: Vec<Vec<usize>> = Vec::new();
        let mut edge_incidences: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut corners = Vec::with_capacity(words.len());
        let mut sides = Vec::with_capacity(words.len());
        for (t, star) in stars.iter().enumerate() {
            let mut cs = Vec::with_capacity(m);
            let mut ss = Vec::with_capacity(m);
            for k in 0..m {
                let (v, new) = vidx.insert(rule.canonical(ModelPoint::new(faces[t], star.corners[k])));
                if new {
                    vertex_tiles.push(Vec::new());
                }
                if !vertex_tiles[v].contains(&t) {
                    vertex_tiles[v].push(t);
                }
                cs.push(v);
                let (e, new) = eidx.insert(rule.canonical(ModelPoint::new(faces[t], star.mids[k])));
                if new {
                    edge_incidences.push(Vec::new());
                }
                edge_incidences[e].push((t, k));
                ss.push(e);
            }
            corners.push(cs);
            sides.push(ss);
        }
        for (e, inc) in edge_incidences.iter().enumerate() {
            if inc.len() != 2 {
                return Err(Error::Contract(format!(
                    "edge {e} has {} incident tiles at level {}",
                    inc.len(),
                    words.first().map_or(0, Vec::len)
                )));
            }
        }
        Ok(Level {
            words,
            stars,
            faces,
            colors,
            corners,
            sides,
            vertex_points: vidx.into_points(),
            vertex_tiles,
            edge_points: eidx.into_points(),
            edge_incidences,
        })
    }

    fn tile_count(&self) -> usize {
        self.words.len()
    }
}

/// Level-`n` cell decomposition with the default budget.
pub fn refine(rule: &SubdivisionRule, n: usize) -> Result<CellDecomposition> {
    refine_with_budget(rule, n, CELL_BUDGET)
}

pub fn refine_with_budget(rule: &SubdivisionRule, n: usize, budget: u128) -> Result<CellDecomposition> {
    let deg_n = (rule.degree as u128).saturating_pow(n as u32);
    let needed = deg_n.saturating_mul(2 + 2 * rule.post_count as u128);
    if needed > budget {
        return Err(Error::Budget {
            what: "cells",
            needed,
            budget,
        });
    }
    let mut prev: Option<Level> = None;
    let mut cur = Level::base(rule)?;
    for _ in 0..n {
        let next = cur.refine(rule)?;
        prev = Some(std::mem::replace(&mut cur, next));
    }
    assemble(rule, n, cur, prev.as_ref())
}

fn assemble(
    rule: &SubdivisionRule,
    n: usize,
    cur: Level,
    prev: Option<&Level>,
) -> Result<CellDecomposition> {
    let m = rule.post_count;
    let map_action = prev.map(|p| {
        // tiles were generated as (1-tile, previous tile) pairs in order
        let mut tiles = Vec::with_capacity(cur.tile_count());
        for t in &rule.one_tiles {
            for j in 0..p.tile_count() {
                if p.faces[j] == t.color.face() {
                    tiles.push(j);
                }
            }
        }
        let vertices = cur
            .vertex_tiles
            .iter()
            .enumerate()
            .map(|(v, ts)| {
                let t = ts[0];
                let k = cur.corners[t].iter().position(|&c| c == v).unwrap();
                p.corners[tiles[t]][k]
            })
            .collect();
        let edges = cur
            .edge_incidences
            .iter()
            .map(|inc| {
                let (t, k) = inc[0];
                p.sides[tiles[t]][k]
            })
            .collect();
        MapAction {
            tiles,
            edges,
            vertices,
        }
    });

    // Sampled stars of deep tiles under bent charts can fold even though the
    // tiles themselves cannot, so the planar test is only meaningful when every
    // chart is affine or the stars are first-level images.
    let planar_check = m > 2 && (n <= 1 || rule.one_tiles.iter().all(|t| t.chart.is_affine()));
    let mut tiles = Vec::with_capacity(cur.tile_count());
    let mut by_address = HashMap::with_capacity(cur.tile_count());
    for t in 0..cur.tile_count() {
        let color = cur.colors[t];
        let expected = if color == Color::White { 1.0 } else { -1.0 };
        let planar = plane::signed_area(&cur.stars[t].boundary()).signum();
        let outside = if cur.faces[t] == 0 { planar } else { -planar };
        if planar_check && outside != expected {
            return Err(Error::Contract(format!(
                "tile {t} at level {n} has inconsistent orientation"
            )));
        }
        let mut boundary = cur.sides[t].clone();
        if color == Color::Black {
            boundary.reverse();
        }
        let address = TileWord::new(cur.words[t].clone());
        if n > 0 {
            by_address.insert(address.clone(), t);
        }
        tiles.push(TileRecord {
            id: t,
            color,
            face: cur.faces[t],
            address,
            star: cur.stars[t].clone(),
            corners: cur.corners[t].clone(),
            sides: cur.sides[t].clone(),
            boundary,
        });
    }
    let edges = cur
        .edge_incidences
        .iter()
        .enumerate()
        .map(|(e, inc)| {
            let (t, k) = inc[0];
            EdgeRecord {
                id: e,
                endpoints: [cur.corners[t][k], cur.corners[t][(k + 1) % m]],
                tiles: [inc[0].0, inc[1].0],
                midpoint: cur.edge_points[e],
            }
        })
        .collect();
    let vertices = cur
        .vertex_tiles
        .iter()
        .enumerate()
        .map(|(v, ts)| {
            let mut ts = ts.clone();
            ts.sort_unstable();
            VertexRecord {
                id: v,
                point: cur.vertex_points[v],
                local_degree: ts.len() / 2,
                tiles: ts,
            }
        })
        .collect();
    Ok(CellDecomposition {
        version: SCHEMA_VERSION,
        rule: rule.name.clone(),
        level: n,
        post_count: m,
        tiles,
        edges,
        vertices,
        map_action,
        by_address,
    })
}

/// Tiles incident to vertex `v`.
pub fn flower(decomp: &CellDecomposition, v: usize) -> Result<Vec<usize>> {
    decomp
        .vertices
        .get(v)
        .map(|r| r.tiles.clone())
        .ok_or_else(|| Error::NotFound(format!("vertex {v} at level {}", decomp.level)))
}

#[derive(Clone, Copy, Debug)]
pub enum BouquetSeed {
    Point(ModelPoint),
    Tile(usize),
}

/// Tiles meeting some tile that contains the seed.
pub fn bouquet(rule: &SubdivisionRule, decomp: &CellDecomposition, seed: BouquetSeed) -> Result<Vec<usize>> {
    let seeds = match seed {
        BouquetSeed::Tile(t) if t < decomp.tiles.len() => vec![t],
        BouquetSeed::Tile(t) => {
            return Err(Error::NotFound(format!("tile {t} at level {}", decomp.level)))
        }
        BouquetSeed::Point(x) => decomp.tiles_containing(rule, &x),
    };
    if seeds.is_empty() {
        return Err(Error::NotFound("no tile contains the point".into()));
    }
    let mut out: Vec<usize> = seeds
        .iter()
        .flat_map(|&t| decomp.tiles[t].corners.iter())
        .flat_map(|&v| decomp.vertices[v].tiles.iter().copied())
        .collect();
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subdivision::load_builtin;

    #[test]
    fn pillow_counts() {
        let rule = load_builtin("pillow_lattes").unwrap();
        for (n, t, e) in [(0, 2, 4), (1, 8, 16), (2, 32, 64), (3, 128, 256)] {
            let d = refine(&rule, n).unwrap();
            assert_eq!((d.tiles.len(), d.edges.len()), (t, e), "level {n}");
            assert!(d.vertices.len() <= e);
        }
    }

    #[test]
    fn level_zero_is_the_bicolored_sphere() {
        for name in ["pillow_lattes", "barycentric", "flap"] {
            let rule = load_builtin(name).unwrap();
            let d = refine(&rule, 0).unwrap();
            assert_eq!(d.tiles.len(), 2);
            assert_eq!(d.edges.len(), rule.post_count);
            assert_eq!(d.vertices.len(), rule.post_count);
            assert!(d.vertices.iter().all(|v| v.tiles == [0, 1]));
            assert!(d.map_action.is_none());
        }
    }

    #[test]
    fn map_action_preserves_kind_and_color() {
        let rule = load_builtin("flap").unwrap();
        let d2 = refine(&rule, 2).unwrap();
        let d1 = refine(&rule, 1).unwrap();
        let act = d2.map_action.as_ref().unwrap();
        for t in &d2.tiles {
            let img = &d1.tiles[act.tiles[t.id]];
            assert_eq!(img.address, t.address.shift());
            assert_eq!(img.color, t.color);
            for k in 0..rule.post_count {
                assert_eq!(act.vertices[t.corners[k]], img.corners[k]);
                assert_eq!(act.edges[t.sides[k]], img.sides[k]);
            }
        }
    }

    #[test]
    fn budget_error() {
        let rule = load_builtin("barycentric").unwrap();
        assert!(matches!(refine_with_budget(&rule, 4, 1000), Err(Error::Budget { .. })));
    }

    #[test]
    fn bouquet_of_interior_point_is_a_block() {
        let rule = load_builtin("pillow_lattes").unwrap();
        let d = refine(&rule, 2).unwrap();
        let b = bouquet(&rule, &d, BouquetSeed::Point(ModelPoint::new(0, [0.375, 0.375]))).unwrap();
        assert_eq!(b.len(), 9);
        let d0 = refine(&rule, 0).unwrap();
        assert_eq!(bouquet(&rule, &d0, BouquetSeed::Tile(0)).unwrap(), [0, 1]);
    }
}
