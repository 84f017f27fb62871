//! Edge-colored complete bipartite graphs and their color-class structure.
//!
//! A coloring of K_{n,n} is stored as an n-by-n matrix of color indices:
//! cell (u, w) is the color of the edge between vertex u of side one and
//! vertex w of side two. Single-index contexts address side-two vertex w
//! as n + w.

use crate::bits::Bits;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Cell marker for edges not yet assigned a color during search.
pub const UNASSIGNED: u8 = u8::MAX;

// ==== errors ====

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MatrixError {
    #[error("side must be at least 1")]
    ZeroSide,
    #[error("color count must be 2 or 3, got {0}")]
    BadColorCount(usize),
    #[error("color {color} out of range for {colors} colors")]
    ColorOutOfRange { color: u8, colors: u8 },
    #[error("matrix has unassigned cells")]
    Incomplete,
}

/// Parse failure for either external matrix format, with position info.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: header must be two integers \"n colors\"")]
    Header { line: usize },
    #[error("line {line}: side must be at least 1")]
    Side { line: usize },
    #[error("line {line}: color count must be 2 or 3")]
    Colors { line: usize },
    #[error("line {line}: row has {got} cells, expected {expected}")]
    RowLength {
        line: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}, column {column}: invalid cell {found:?} (colors are 0..{colors})")]
    Cell {
        line: usize,
        column: usize,
        found: char,
        colors: u8,
    },
    #[error("matrix ends after {got} of {expected} rows")]
    MissingRows { expected: usize, got: usize },
    #[error("line {line}: unexpected content after matrix rows")]
    TrailingContent { line: usize },
    #[error("json: {0}")]
    JsonSyntax(String),
    #[error("json: {0}")]
    JsonValue(String),
}

// ==== color matrix ====

/// An edge coloring of K_{n,n} with 2 or 3 colors.
///
/// Cells hold a color index below `colors`, or [`UNASSIGNED`] inside
/// search partials. The external formats only carry complete matrices.
#[derive(Clone, PartialEq, Eq)]
pub struct ColorMatrix {
    n: usize,
    colors: u8,
    cells: Vec<u8>,
}

impl ColorMatrix {
    pub fn new_unassigned(n: usize, colors: usize) -> Result<Self, MatrixError> {
        if n == 0 {
            return Err(MatrixError::ZeroSide);
        }
        if !(2..=3).contains(&colors) {
            return Err(MatrixError::BadColorCount(colors));
        }
        Ok(ColorMatrix {
            n,
            colors: colors as u8,
            cells: vec![UNASSIGNED; n * n],
        })
    }

    /// A complete matrix with every cell set to `color`.
    pub fn filled(n: usize, colors: usize, color: u8) -> Result<Self, MatrixError> {
        let mut m = Self::new_unassigned(n, colors)?;
        if color >= m.colors {
            return Err(MatrixError::ColorOutOfRange {
                color,
                colors: m.colors,
            });
        }
        m.cells.fill(color);
        Ok(m)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn colors(&self) -> u8 {
        self.colors
    }

    #[inline]
    pub fn get(&self, u: usize, w: usize) -> Option<u8> {
        let c = self.cells[u * self.n + w];
        (c != UNASSIGNED).then_some(c)
    }

    #[inline]
    pub fn set(&mut self, u: usize, w: usize, color: u8) {
        debug_assert!(color < self.colors);
        self.cells[u * self.n + w] = color;
    }

    #[inline]
    pub fn unset(&mut self, u: usize, w: usize) {
        self.cells[u * self.n + w] = UNASSIGNED;
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(|&c| c != UNASSIGNED)
    }

    pub fn assigned_count(&self) -> usize {
        self.cells.iter().filter(|&&c| c != UNASSIGNED).count()
    }

    /// Relabels colors: every cell c becomes `map[c]`. `map` must be a
    /// permutation of 0..colors.
    pub fn relabeled(&self, map: &[u8]) -> ColorMatrix {
        debug_assert_eq!(map.len(), self.colors as usize);
        let mut out = self.clone();
        for cell in &mut out.cells {
            if *cell != UNASSIGNED {
                *cell = map[*cell as usize];
            }
        }
        out
    }

    // ==== text format: "n colors" header, then n rows of digit cells ====

    pub fn to_text(&self) -> Result<String, MatrixError> {
        if !self.is_complete() {
            return Err(MatrixError::Incomplete);
        }
        let mut s = format!("{} {}\n", self.n, self.colors);
        for u in 0..self.n {
            for w in 0..self.n {
                let c = self.cells[u * self.n + w];
                s.push((b'0' + c) as char);
            }
            s.push('\n');
        }
        Ok(s)
    }

    pub fn from_text(input: &str) -> Result<Self, ParseError> {
        let mut lines = input.lines().enumerate();
        let (idx, header) = lines.next().ok_or(ParseError::Header { line: 1 })?;
        let header_line = idx + 1;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::Header { line: header_line });
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| ParseError::Header { line: header_line })?;
        let colors: u8 = fields[1]
            .parse()
            .map_err(|_| ParseError::Header { line: header_line })?;
        if n == 0 {
            return Err(ParseError::Side { line: header_line });
        }
        if !(2..=3).contains(&colors) {
            return Err(ParseError::Colors { line: header_line });
        }

        let mut m = ColorMatrix::new_unassigned(n, colors as usize).expect("validated header");
        let mut rows_read = 0;
        for (idx, row) in &mut lines {
            let line = idx + 1;
            let row = row.trim_end();
            if rows_read == n {
                if row.is_empty() {
                    continue;
                }
                return Err(ParseError::TrailingContent { line });
            }
            if row.chars().count() != n {
                return Err(ParseError::RowLength {
                    line,
                    expected: n,
                    got: row.chars().count(),
                });
            }
            for (col, ch) in row.chars().enumerate() {
                let digit = ch.to_digit(10).filter(|&d| d < colors as u32);
                match digit {
                    Some(d) => m.set(rows_read, col, d as u8),
                    None => {
                        return Err(ParseError::Cell {
                            line,
                            column: col + 1,
                            found: ch,
                            colors,
                        })
                    }
                }
            }
            rows_read += 1;
        }
        if rows_read < n {
            return Err(ParseError::MissingRows {
                expected: n,
                got: rows_read,
            });
        }
        Ok(m)
    }

    // ==== json format: {"n":N,"colors":C,"matrix":[[..],..]} ====

    pub fn to_json(&self) -> Result<String, MatrixError> {
        if !self.is_complete() {
            return Err(MatrixError::Incomplete);
        }
        let raw = RawMatrix {
            n: self.n,
            colors: self.colors,
            matrix: (0..self.n)
                .map(|u| self.cells[u * self.n..(u + 1) * self.n].to_vec())
                .collect(),
        };
        Ok(serde_json::to_string(&raw).expect("plain struct serializes"))
    }

    pub fn from_json(input: &str) -> Result<Self, ParseError> {
        let raw: RawMatrix =
            serde_json::from_str(input).map_err(|e| ParseError::JsonSyntax(e.to_string()))?;
        if raw.n == 0 {
            return Err(ParseError::JsonValue("side must be at least 1".into()));
        }
        if !(2..=3).contains(&raw.colors) {
            return Err(ParseError::JsonValue(format!(
                "color count must be 2 or 3, got {}",
                raw.colors
            )));
        }
        if raw.matrix.len() != raw.n {
            return Err(ParseError::JsonValue(format!(
                "matrix has {} rows, expected {}",
                raw.matrix.len(),
                raw.n
            )));
        }
        let mut m = ColorMatrix::new_unassigned(raw.n, raw.colors as usize).expect("validated");
        for (u, row) in raw.matrix.iter().enumerate() {
            if row.len() != raw.n {
                return Err(ParseError::JsonValue(format!(
                    "matrix row {} has {} cells, expected {}",
                    u,
                    row.len(),
                    raw.n
                )));
            }
            for (w, &c) in row.iter().enumerate() {
                if c >= raw.colors {
                    return Err(ParseError::JsonValue(format!(
                        "cell ({u},{w}) has color {c}, out of range for {} colors",
                        raw.colors
                    )));
                }
                m.set(u, w, c);
            }
        }
        Ok(m)
    }
}

impl std::fmt::Debug for ColorMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(
            f,
            "ColorMatrix {}x{} ({} colors)",
            self.n, self.n, self.colors
        )?;
        for u in 0..self.n {
            for w in 0..self.n {
                match self.get(u, w) {
                    Some(c) => write!(f, "{c}")?,
                    None => write!(f, ".")?,
                }
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct RawMatrix {
    n: usize,
    colors: u8,
    matrix: Vec<Vec<u8>>,
}

// ==== color classes ====

/// The bipartite graph formed by the edges of one color.
///
/// Adjacency is bit-packed per vertex: `side1_adj[u]` holds the side-two
/// neighbors of u, `side2_adj[w]` the side-one neighbors of w.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorClassGraph {
    n: usize,
    color: u8,
    side1_adj: Vec<Bits>,
    side2_adj: Vec<Bits>,
}

impl ColorClassGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn color(&self) -> u8 {
        self.color
    }

    pub fn side1_adj(&self, u: usize) -> &Bits {
        &self.side1_adj[u]
    }

    pub fn side2_adj(&self, w: usize) -> &Bits {
        &self.side2_adj[w]
    }

    pub fn side1_rows(&self) -> &[Bits] {
        &self.side1_adj
    }

    pub fn side2_rows(&self) -> &[Bits] {
        &self.side2_adj
    }

    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.side1_adj[u].get(w)
    }

    pub fn edge_count(&self) -> usize {
        self.side1_adj.iter().map(Bits::count).sum()
    }
}

/// Extracts the subgraph of edges whose cell equals `color`.
/// Unassigned cells contribute no edge, so a partial matrix yields the
/// class of its assigned prefix.
pub fn build_color_class(m: &ColorMatrix, color: u8) -> Result<ColorClassGraph, MatrixError> {
    if color >= m.colors() {
        return Err(MatrixError::ColorOutOfRange {
            color,
            colors: m.colors(),
        });
    }
    let n = m.n();
    let mut side1_adj = vec![Bits::new(n); n];
    let mut side2_adj = vec![Bits::new(n); n];
    for (u, row) in side1_adj.iter_mut().enumerate() {
        for (w, col) in side2_adj.iter_mut().enumerate() {
            if m.get(u, w) == Some(color) {
                row.set(w);
                col.set(u);
            }
        }
    }
    Ok(ColorClassGraph {
        n,
        color,
        side1_adj,
        side2_adj,
    })
}

// ==== connected components ====

/// One connected component of a color class. Vertex lists are sorted
/// ascending; every component contains at least one vertex per side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub v1: Vec<usize>,
    pub v2: Vec<usize>,
}

impl Component {
    pub fn vertex_count(&self) -> usize {
        self.v1.len() + self.v2.len()
    }

    /// All vertices in the single 0..2n index space, sorted.
    pub fn global_vertices(&self, n: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.v1.clone();
        out.extend(self.v2.iter().map(|&w| n + w));
        out
    }
}

/// Components labeled 0.. in ascending order of smallest contained
/// side-one vertex. `component_id` maps each of the 2n vertices to its
/// label, or None for vertices with no edge of this color.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentDecomposition {
    pub component_id: Vec<Option<usize>>,
    pub components: Vec<Component>,
}

/// Breadth-first decomposition. Iterative, so deep components cannot
/// overflow the stack; labels are deterministic for a given graph.
pub fn components(g: &ColorClassGraph) -> ComponentDecomposition {
    let n = g.n();
    let mut component_id: Vec<Option<usize>> = vec![None; 2 * n];
    let mut comps = Vec::new();
    let mut queue = std::collections::VecDeque::new();

    for start in 0..n {
        if component_id[start].is_some() || g.side1_adj(start).is_empty() {
            continue;
        }
        let label = comps.len();
        let mut v1 = Vec::new();
        let mut v2 = Vec::new();
        component_id[start] = Some(label);
        queue.push_back(start);
        while let Some(v) = queue.pop_front() {
            if v < n {
                v1.push(v);
                for w in g.side1_adj(v).ones() {
                    if component_id[n + w].is_none() {
                        component_id[n + w] = Some(label);
                        queue.push_back(n + w);
                    }
                }
            } else {
                let w = v - n;
                v2.push(w);
                for u in g.side2_adj(w).ones() {
                    if component_id[u].is_none() {
                        component_id[u] = Some(label);
                        queue.push_back(u);
                    }
                }
            }
        }
        v1.sort_unstable();
        v2.sort_unstable();
        comps.push(Component { v1, v2 });
    }
    ComponentDecomposition {
        component_id,
        components: comps,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn strip_23() -> ColorMatrix {
        // Side 3, row 0 color 0, rows 1-2 color 1.
        let mut m = ColorMatrix::new_unassigned(3, 2).unwrap();
        for w in 0..3 {
            m.set(0, w, 0);
            m.set(1, w, 1);
            m.set(2, w, 1);
        }
        m
    }

    #[test]
    fn constant_coloring_classes() {
        let m = ColorMatrix::filled(2, 2, 0).unwrap();
        let g0 = build_color_class(&m, 0).unwrap();
        let g1 = build_color_class(&m, 1).unwrap();
        assert_eq!(g0.edge_count(), 4);
        assert_eq!(g1.edge_count(), 0);
        assert!(g0.has_edge(1, 0));
        assert!(!g1.has_edge(1, 0));
    }

    #[test]
    fn star_class_from_strip() {
        let g = build_color_class(&strip_23(), 0).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(g.side1_adj(0).count(), 3);
        assert!(g.side1_adj(1).is_empty());
        let d = components(&g);
        assert_eq!(d.components.len(), 1);
        assert_eq!(d.components[0].v1, vec![0]);
        assert_eq!(d.components[0].v2, vec![0, 1, 2]);
    }

    #[test]
    fn color_out_of_range() {
        let m = ColorMatrix::filled(2, 2, 0).unwrap();
        assert_eq!(
            build_color_class(&m, 2),
            Err(MatrixError::ColorOutOfRange {
                color: 2,
                colors: 2
            })
        );
    }

    #[test]
    fn two_disjoint_edges_with_isolated_vertices() {
        let mut m = ColorMatrix::filled(3, 2, 1).unwrap();
        m.set(0, 0, 0);
        m.set(1, 1, 0);
        let d = components(&build_color_class(&m, 0).unwrap());
        assert_eq!(d.components.len(), 2);
        assert_eq!(d.components[0].v1, vec![0]);
        assert_eq!(d.components[0].v2, vec![0]);
        assert_eq!(d.components[1].v1, vec![1]);
        assert_eq!(d.components[1].v2, vec![1]);
        assert_eq!(d.component_id[2], None);
        assert_eq!(d.component_id[3 + 2], None);
        assert_eq!(d.component_id[0], Some(0));
        assert_eq!(d.component_id[3 + 1], Some(1));
    }

    #[test]
    fn empty_class_has_no_components() {
        let m = ColorMatrix::filled(4, 3, 2).unwrap();
        let d = components(&build_color_class(&m, 0).unwrap());
        assert!(d.components.is_empty());
        assert!(d.component_id.iter().all(Option::is_none));
    }

    #[test]
    fn text_round_trip() {
        let m = strip_23();
        let text = m.to_text().unwrap();
        assert_eq!(text, "3 2\n000\n111\n111\n");
        assert_eq!(ColorMatrix::from_text(&text).unwrap(), m);
    }

    #[test]
    fn json_round_trip() {
        let m = strip_23();
        let json = m.to_json().unwrap();
        assert_eq!(
            json,
            r#"{"n":3,"colors":2,"matrix":[[0,0,0],[1,1,1],[1,1,1]]}"#
        );
        assert_eq!(ColorMatrix::from_json(&json).unwrap(), m);
    }

    #[test]
    fn text_parse_errors_carry_position() {
        assert_eq!(
            ColorMatrix::from_text("banana\n"),
            Err(ParseError::Header { line: 1 })
        );
        assert_eq!(
            ColorMatrix::from_text("0 2\n"),
            Err(ParseError::Side { line: 1 })
        );
        assert_eq!(
            ColorMatrix::from_text("2 5\n"),
            Err(ParseError::Colors { line: 1 })
        );
        assert_eq!(
            ColorMatrix::from_text("2 2\n001\n00\n"),
            Err(ParseError::RowLength {
                line: 2,
                expected: 2,
                got: 3
            })
        );
        assert_eq!(
            ColorMatrix::from_text("2 2\n01\n02\n"),
            Err(ParseError::Cell {
                line: 3,
                column: 2,
                found: '2',
                colors: 2
            })
        );
        assert_eq!(
            ColorMatrix::from_text("3 2\n010\n101\n"),
            Err(ParseError::MissingRows {
                expected: 3,
                got: 2
            })
        );
        assert_eq!(
            ColorMatrix::from_text("2 2\n01\n10\n\n11\n"),
            Err(ParseError::TrailingContent { line: 5 })
        );
    }

    #[test]
    fn json_parse_errors() {
        assert!(matches!(
            ColorMatrix::from_json("{"),
            Err(ParseError::JsonSyntax(_))
        ));
        let bad_color = r#"{"n":2,"colors":2,"matrix":[[0,2],[0,0]]}"#;
        assert!(matches!(
            ColorMatrix::from_json(bad_color),
            Err(ParseError::JsonValue(_))
        ));
        let bad_row = r#"{"n":2,"colors":2,"matrix":[[0,1]]}"#;
        assert!(matches!(
            ColorMatrix::from_json(bad_row),
            Err(ParseError::JsonValue(_))
        ));
    }

    #[test]
    fn incomplete_matrix_refuses_serialization() {
        let m = ColorMatrix::new_unassigned(2, 2).unwrap();
        assert_eq!(m.to_text(), Err(MatrixError::Incomplete));
        assert_eq!(m.to_json(), Err(MatrixError::Incomplete));
    }

    fn arb_matrix() -> impl Strategy<Value = ColorMatrix> {
        (1usize..=6, 2usize..=3).prop_flat_map(|(n, colors)| {
            proptest::collection::vec(0u8..colors as u8, n * n).prop_map(move |cells| {
                let mut m = ColorMatrix::new_unassigned(n, colors).unwrap();
                for u in 0..n {
                    for w in 0..n {
                        m.set(u, w, cells[u * n + w]);
                    }
                }
                m
            })
        })
    }

    proptest! {
        // Every edge lies in exactly the class of its own color, and
        // adjacency stays symmetric across the two side views.
        #[test]
        fn classes_partition_edges(m in arb_matrix()) {
            let classes: Vec<ColorClassGraph> = (0..m.colors())
                .map(|c| build_color_class(&m, c).unwrap())
                .collect();
            let mut total = 0;
            for g in &classes {
                total += g.edge_count();
                for u in 0..m.n() {
                    for w in g.side1_adj(u).ones() {
                        prop_assert!(g.side2_adj(w).get(u));
                        prop_assert_eq!(m.get(u, w), Some(g.color()));
                    }
                }
            }
            prop_assert_eq!(total, m.n() * m.n());
        }

        // Component vertex lists and the id map agree, and labels run in
        // ascending order of smallest side-one vertex.
        #[test]
        fn component_accounting(m in arb_matrix()) {
            for c in 0..m.colors() {
                let g = build_color_class(&m, c).unwrap();
                let d = components(&g);
                let mut seen = 0;
                for (label, comp) in d.components.iter().enumerate() {
                    prop_assert!(!comp.v1.is_empty() && !comp.v2.is_empty());
                    for &u in &comp.v1 {
                        prop_assert_eq!(d.component_id[u], Some(label));
                    }
                    for &w in &comp.v2 {
                        prop_assert_eq!(d.component_id[m.n() + w], Some(label));
                    }
                    seen += comp.vertex_count();
                }
                let labeled = d.component_id.iter().filter(|id| id.is_some()).count();
                prop_assert_eq!(seen, labeled);
                let firsts: Vec<usize> = d.components.iter().map(|c| c.v1[0]).collect();
                prop_assert!(firsts.windows(2).all(|p| p[0] < p[1]));
                for u in 0..m.n() {
                    prop_assert_eq!(d.component_id[u].is_none(), g.side1_adj(u).is_empty());
                }
            }
        }

        // Both external formats reproduce the matrix bit-exactly.
        #[test]
        fn formats_round_trip(m in arb_matrix()) {
            let text = m.to_text().unwrap();
            prop_assert_eq!(&ColorMatrix::from_text(&text).unwrap(), &m);
            let json = m.to_json().unwrap();
            prop_assert_eq!(&ColorMatrix::from_json(&json).unwrap(), &m);
        }
    }
}
