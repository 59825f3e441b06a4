use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use super::network::ChannelEnd;
use super::Point;
use crate::error::{Error, Result};

/// Tag carried by a boundary edge of a triangular mesh.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum BoundaryTag {
    Wall,
    Transparent,
    /// Uses the boundary condition of the named network node.
    Node(String),
    /// Couples to the given end of a 1D channel.
    Coupling { channel: String, end: ChannelEnd },
}

impl BoundaryTag {
    pub fn parse(s: &str) -> Option<BoundaryTag> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            ["wall"] => Some(BoundaryTag::Wall),
            ["transparent"] => Some(BoundaryTag::Transparent),
            ["node", id] if !id.is_empty() => Some(BoundaryTag::Node((*id).to_string())),
            ["coupling", ch, end] if !ch.is_empty() => {
                ChannelEnd::parse(end).map(|end| BoundaryTag::Coupling { channel: (*ch).to_string(), end })
            }
            _ => None,
        }
    }
}

impl std::fmt::Display for BoundaryTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundaryTag::Wall => write!(f, "wall"),
            BoundaryTag::Transparent => write!(f, "transparent"),
            BoundaryTag::Node(id) => write!(f, "node:{id}"),
            BoundaryTag::Coupling { channel, end } => write!(f, "coupling:{channel}:{}", end.as_str()),
        }
    }
}

/// An edge with its adjacent triangles. `left` traverses `a -> b`
/// counter-clockwise; `right` is `None` on the boundary.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshEdge {
    pub a: usize,
    pub b: usize,
    pub left: usize,
    pub right: Option<usize>,
    pub tag: Option<BoundaryTag>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<[usize; 3]>,
    pub edges: Vec<MeshEdge>,
    /// Edge indices of each triangle, opposite-vertex order not implied.
    pub triangle_edges: Vec<[usize; 3]>,
}

impl TriMesh {
    /// Build adjacency and validate. Boundary edges not listed in `boundary` become walls.
    pub fn new(vertices: Vec<Point>, triangles: Vec<[usize; 3]>, boundary: Vec<(usize, usize, BoundaryTag)>) -> Result<TriMesh> {
        let nv = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::MeshParse { line: 0, message: format!("triangle {t} references a missing vertex") });
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::InconsistentOrientation { triangle: t, message: "repeated vertex".into() });
            }
            let [a, b, c] = tri.map(|i| vertices[i]);
            let area2 = (b - a).cross(c - a);
            if !(area2 > 0.0) {
                return Err(Error::InconsistentOrientation {
                    triangle: t,
                    message: format!("vertices are not counter-clockwise (signed area {})", 0.5 * area2),
                });
            }
        }

        let mut count: HashMap<(usize, usize), usize> = HashMap::new();
        for tri in &triangles {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        let mut bad: Vec<_> = count.iter().filter(|(_, &c)| c > 2).map(|(&k, _)| k).collect();
        bad.sort();
        if let Some(&(a, b)) = bad.first() {
            return Err(Error::NonManifoldEdge { a, b });
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let key = (tri[k], tri[(k + 1) % 3]);
                if directed.insert(key, t).is_some() {
                    return Err(Error::InconsistentOrientation {
                        triangle: t,
                        message: format!("edge ({}, {}) traversed in the same direction twice", key.0, key.1),
                    });
                }
            }
        }

        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut index: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangle_edges = vec![[0usize; 3]; triangles.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                let e = match index.get(&key) {
                    Some(&e) => {
                        edges[e].right = Some(t);
                        e
                    }
                    None => {
                        edges.push(MeshEdge { a, b, left: t, right: None, tag: None });
                        index.insert(key, edges.len() - 1);
                        edges.len() - 1
                    }
                };
                triangle_edges[t][k] = e;
            }
        }

        for (a, b, tag) in boundary {
            let key = (a.min(b), a.max(b));
            match index.get(&key) {
                Some(&e) if edges[e].right.is_none() => edges[e].tag = Some(tag),
                Some(_) => {
                    return Err(Error::MeshParse { line: 0, message: format!("boundary tag on interior edge ({a}, {b})") })
                }
                None => return Err(Error::MeshParse { line: 0, message: format!("boundary tag on missing edge ({a}, {b})") }),
            }
        }
        for e in edges.iter_mut() {
            if e.right.is_none() && e.tag.is_none() {
                e.tag = Some(BoundaryTag::Wall);
            }
        }
        Ok(TriMesh { vertices, triangles, edges, triangle_edges })
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.vertices[i])
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * (b - a).cross(c - a)
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.triangle_points(t);
        Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
    }

    pub fn boundary_edge_count(&self) -> usize {
        self.edges.iter().filter(|e| e.right.is_none()).count()
    }

    pub fn interior_edge_count(&self) -> usize {
        self.edges.len() - self.boundary_edge_count()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.area(t)).sum()
    }

    /// Serialize in the plain-text mesh format.
    pub fn to_text(&self) -> String {
        let boundary: Vec<&MeshEdge> = self.edges.iter().filter(|e| e.right.is_none()).collect();
        let mut s = String::new();
        let _ = writeln!(s, "{} {} {}", self.vertices.len(), self.triangles.len(), boundary.len());
        for v in &self.vertices {
            let _ = writeln!(s, "{:?} {:?}", v.x, v.y);
        }
        for t in &self.triangles {
            let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
        }
        for e in boundary {
            let tag = e.tag.clone().unwrap_or(BoundaryTag::Wall);
            let _ = writeln!(s, "{} {} {}", e.a, e.b, tag);
        }
        s
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::MeshParse { line, message: message.into() }
}

/// Parse the plain-text format: a `nv nt nb` header, `x y` vertex lines,
/// 0-based counter-clockwise `i j k` triangles and `i j tag` boundary lines.
/// Blank lines and `#` comments are ignored.
pub fn parse_trimesh(text: &str) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (hl, header) = lines.next().ok_or_else(|| parse_error(1, "empty mesh file"))?;
    let counts: Vec<usize> = header
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| parse_error(hl, format!("bad count '{t}'"))))
        .collect::<Result<_>>()?;
    if counts.len() != 3 {
        return Err(parse_error(hl, "header must be 'nv nt nb'"));
    }
    let (nv, nt, nb) = (counts[0], counts[1], counts[2]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_error(0, "unexpected end of file in vertex block"))?;
        let v: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|_| parse_error(ln, format!("bad coordinate '{t}'"))))
            .collect::<Result<_>>()?;
        if v.len() != 2 || !v.iter().all(|c| c.is_finite()) {
            return Err(parse_error(ln, "vertex line must be 'x y'"));
        }
        vertices.push(Point::new(v[0], v[1]));
    }

    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (ln, l) = lines.next().ok_or_else(|| parse_error(0, "unexpected end of file in triangle block"))?;
        let v: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| parse_error(ln, format!("bad index '{t}'"))))
            .collect::<Result<_>>()?;
        if v.len() != 3 {
            return Err(parse_error(ln, "triangle line must be 'i j k'"));
        }
        if v.iter().any(|&i| i >= nv) {
            return Err(parse_error(ln, "vertex index out of range"));
        }
        triangles.push([v[0], v[1], v[2]]);
    }

    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, l) = lines.next().ok_or_else(|| parse_error(0, "unexpected end of file in boundary block"))?;
        let parts: Vec<&str> = l.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_error(ln, "boundary line must be 'i j tag'"));
        }
        let a = parts[0].parse::<usize>().map_err(|_| parse_error(ln, "bad index"))?;
        let b = parts[1].parse::<usize>().map_err(|_| parse_error(ln, "bad index"))?;
        let tag = BoundaryTag::parse(parts[2]).ok_or_else(|| parse_error(ln, format!("unknown tag '{}'", parts[2])))?;
        boundary.push((a, b, tag));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_error(ln, "trailing content after boundary block"));
    }
    TriMesh::new(vertices, triangles, boundary)
}

pub fn load_trimesh(path: &Path) -> Result<TriMesh> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_trimesh(&text)
}
