//! Construction of `X_{f,q}` and its named families, structure checks and
//! export to DIMACS, edge-list and JSON.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bits::{words_for, BitSet};
use crate::ff::{FfError, Field, FieldElement, FieldSpec};
use crate::poly::{self, compose, parse_poly, primitive_kernel, BivarPoly, ComposeVariant, PolyError, UniPoly};

/// Largest vertex count accepted; the bit matrix takes `q^2 / 8` bytes.
pub const MAX_VERTICES: u32 = 65_536;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("f does not induce an undirected graph: f({u},{v}) is a square but f({v},{u}) is not")]
    DirectedPolynomial { u: u32, v: u32 },
    #[error("Paley graphs need q = 1 mod 4 (q = {q})")]
    PaleyCongruence { q: u32 },
    #[error("f must have degree exactly 1 in x and in y")]
    NotBidegree11,
    #[error("f = d + ax + by + cxy has ab - cd = 0")]
    KernelCriterionFailed,
    #[error("coefficients a and b must be nonzero")]
    ZeroCoefficient,
    #[error("q = {q} exceeds the limit of {max} vertices")]
    TooLarge { q: u32, max: u32 },
    #[error("r is a square")]
    RIsSquare,
    #[error("the defining polynomial is not homogeneous of odd degree")]
    NotHomogeneousOdd,
    #[error("graph has no defining polynomial")]
    MissingProvenance,
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Custom,
    Paley,
    PaleySum,
    #[serde(rename = "dio")]
    Diophantine,
    #[serde(rename = "gendio")]
    GenDio { a: u32, b: u32 },
    #[serde(rename = "H_d")]
    Hd { d: u32, variant: ComposeVariant },
    Complement,
}

impl Family {
    pub fn tag(&self) -> &'static str {
        match self {
            Family::Custom => "custom",
            Family::Paley => "paley",
            Family::PaleySum => "paley_sum",
            Family::Diophantine => "dio",
            Family::GenDio { .. } => "gendio",
            Family::Hd { .. } => "H_d",
            Family::Complement => "complement",
        }
    }
}

/// Where a graph came from.
#[derive(Clone, Debug)]
pub struct Provenance {
    pub field: Field,
    pub poly: BivarPoly,
    /// Canonical rendering of `poly`.
    pub f: String,
    pub family: Family,
}

impl Provenance {
    pub fn spec(&self) -> &FieldSpec {
        self.field.spec()
    }
}

/// A simple graph on `{0, .., q-1}` stored as a symmetric bit matrix.
#[derive(Clone, Debug)]
pub struct GraphInstance {
    n: usize,
    row_words: usize,
    adj: Vec<u64>,
    degrees: Vec<u32>,
    provenance: Option<Provenance>,
    zero_pairs: usize,
}

impl GraphInstance {
    /// Builds a graph from adjacency rows. Panics unless the rows describe a
    /// symmetric loopless matrix.
    pub fn from_rows(rows: Vec<BitSet>) -> GraphInstance {
        let n = rows.len();
        let row_words = words_for(n);
        let mut adj = Vec::with_capacity(n * row_words);
        for (u, r) in rows.iter().enumerate() {
            assert_eq!(r.universe(), n);
            assert!(!r.contains(u), "loop at {u}");
            adj.extend_from_slice(r.words());
        }
        let g = GraphInstance::assemble(n, adj, None, 0);
        for u in 0..n {
            for v in g.neighbors(u).iter() {
                assert!(g.has_edge(v, u), "asymmetric at ({u},{v})");
            }
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> GraphInstance {
        let mut rows = vec![BitSet::new(n); n];
        for &(u, v) in edges {
            assert_ne!(u, v);
            rows[u].insert(v);
            rows[v].insert(u);
        }
        GraphInstance::from_rows(rows)
    }

    fn assemble(n: usize, adj: Vec<u64>, provenance: Option<Provenance>, zero_pairs: usize) -> GraphInstance {
        let row_words = words_for(n);
        let degrees = adj
            .chunks(row_words.max(1))
            .take(n)
            .map(|r| r.iter().map(|w| w.count_ones()).sum())
            .collect();
        GraphInstance {
            n,
            row_words,
            adj,
            degrees,
            provenance,
            zero_pairs,
        }
    }

    /// Number of vertices.
    #[inline]
    pub fn q(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn row(&self, u: usize) -> &[u64] {
        &self.adj[u * self.row_words..(u + 1) * self.row_words]
    }

    pub fn row_words(&self) -> usize {
        self.row_words
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        (self.row(u)[v >> 6] >> (v & 63)) & 1 == 1
    }

    pub fn neighbors(&self, u: usize) -> BitSet {
        BitSet::from_words(self.n, self.row(u).to_vec())
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn edge_count(&self) -> usize {
        self.degrees.iter().map(|&d| d as usize).sum::<usize>() / 2
    }

    /// Edges `(u, v)` with `u < v`, ascending.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.neighbors(u)
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
                .collect::<Vec<_>>()
        })
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Unordered pairs `u != v` with `f(u, v) = 0` (these count as edges).
    pub fn zero_pairs(&self) -> usize {
        self.zero_pairs
    }

    /// Canonical polynomial string, empty when the graph has no provenance.
    pub fn f_string(&self) -> &str {
        self.provenance.as_ref().map(|p| p.f.as_str()).unwrap_or("")
    }

    /// The complement graph (no loops).
    pub fn complement(&self) -> GraphInstance {
        let full = BitSet::full(self.n);
        let mut adj = Vec::with_capacity(self.adj.len());
        for u in 0..self.n {
            let mut row = self.neighbors(u).complement();
            row.intersect_with(&full);
            row.remove(u);
            adj.extend_from_slice(row.words());
        }
        let provenance = self.provenance.as_ref().map(|p| Provenance {
            family: Family::Complement,
            ..p.clone()
        });
        GraphInstance::assemble(self.n, adj, provenance, 0)
    }

    /// Whether the vertices form a clique.
    pub fn is_clique(&self, vertices: &[usize]) -> bool {
        vertices.iter().enumerate().all(|(i, &u)| {
            vertices[i + 1..].iter().all(|&v| u != v && self.has_edge(u, v))
        })
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        vertices
            .iter()
            .enumerate()
            .all(|(i, &u)| vertices[i + 1..].iter().all(|&v| !self.has_edge(u, v)))
    }
}

/// Builds `X_{f,q}`: `u != v` adjacent iff `f(u, v)` is a square (zero included).
pub fn build_graph(f: &BivarPoly, field: &Field) -> Result<GraphInstance, GraphError> {
    build_with_family(f, field, Family::Custom)
}

fn build_with_family(f: &BivarPoly, field: &Field, family: Family) -> Result<GraphInstance, GraphError> {
    let q = field.q();
    if q > MAX_VERTICES {
        return Err(GraphError::TooLarge { q, max: MAX_VERTICES });
    }
    let n = q as usize;
    let row_words = words_for(n);
    let rows: Vec<(Vec<u64>, usize)> = (0..q)
        .into_par_iter()
        .map(|u| {
            let ue = FieldElement::from_raw(u);
            let row_poly = f.specialize_x(field, ue);
            let mut words = vec![0u64; row_words];
            let mut zeros = 0;
            for v in 0..q {
                if v == u {
                    continue;
                }
                let val = row_poly.eval(field, FieldElement::from_raw(v));
                if v > u && val.is_zero() {
                    zeros += 1;
                }
                if field.is_square(val) {
                    words[(v >> 6) as usize] |= 1u64 << (v & 63);
                }
            }
            (words, zeros)
        })
        .collect();
    let zero_pairs = rows.iter().map(|r| r.1).sum();
    let mut adj = Vec::with_capacity(n * row_words);
    for (w, _) in rows {
        adj.extend(w);
    }
    let bit = |u: usize, v: usize| (adj[u * row_words + (v >> 6)] >> (v & 63)) & 1 == 1;
    let asym = (0..n).into_par_iter().find_map_first(|u| {
        (u + 1..n).find_map(|v| match (bit(u, v), bit(v, u)) {
            (true, false) => Some((u, v)),
            (false, true) => Some((v, u)),
            _ => None,
        })
    });
    if let Some((u, v)) = asym {
        return Err(GraphError::DirectedPolynomial { u: u as u32, v: v as u32 });
    }
    let provenance = Provenance {
        field: field.clone(),
        poly: f.clone(),
        f: f.render(field),
        family,
    };
    Ok(GraphInstance::assemble(n, adj, Some(provenance), zero_pairs))
}

fn named(src: &str, field: &Field) -> BivarPoly {
    parse_poly(src, field).expect("built-in polynomial parses")
}

/// Paley graph, `f = x - y`.
pub fn paley(field: &Field) -> Result<GraphInstance, GraphError> {
    if field.q() % 4 != 1 {
        return Err(GraphError::PaleyCongruence { q: field.q() });
    }
    build_with_family(&named("x-y", field), field, Family::Paley)
}

/// Paley sum graph, `f = x + y`.
pub fn paley_sum(field: &Field) -> Result<GraphInstance, GraphError> {
    build_with_family(&named("x+y", field), field, Family::PaleySum)
}

/// Diophantine graph, `f = xy + 1`.
pub fn diophantine(field: &Field) -> Result<GraphInstance, GraphError> {
    build_with_family(&named("x*y+1", field), field, Family::Diophantine)
}

/// Generalized Diophantine graph, `f = a xy + b` with `a, b != 0`.
pub fn gen_dio(a: FieldElement, b: FieldElement, field: &Field) -> Result<GraphInstance, GraphError> {
    if a.is_zero() || b.is_zero() {
        return Err(GraphError::ZeroCoefficient);
    }
    let f = BivarPoly::from_terms(field, [((1, 1), a), ((0, 0), b)]);
    build_with_family(
        &f,
        field,
        Family::GenDio {
            a: a.index(),
            b: b.index(),
        },
    )
}

/// Checks the bidegree-(1,1) criterion `ab - cd != 0` for `f = d + ax + by + cxy`.
pub fn check_bidegree_11(f: &BivarPoly, field: &Field) -> Result<(), GraphError> {
    if f.deg_x() != 1 || f.deg_y() != 1 || f.degree() > 2 {
        return Err(GraphError::NotBidegree11);
    }
    let d0 = f.coeff(0, 0);
    let a = f.coeff(1, 0);
    let b = f.coeff(0, 1);
    let c = f.coeff(1, 1);
    if field.sub(field.mul(a, b), field.mul(c, d0)).is_zero() {
        return Err(GraphError::KernelCriterionFailed);
    }
    Ok(())
}

/// Member of `H_d`: the graph of `f(g(x), g(y))` or `g(x)g(y)f(g(x), g(y))`
/// for bidegree-(1,1) admissible `f`.
pub fn family_member(
    f: &BivarPoly,
    g: &UniPoly,
    variant: ComposeVariant,
    field: &Field,
) -> Result<GraphInstance, GraphError> {
    check_bidegree_11(f, field)?;
    let h = compose(f, g, variant, field)?;
    let d = g.degree().unwrap_or(0) as u32;
    build_with_family(&h, field, Family::Hd { d, variant })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StructureKind {
    Complete,
    Empty,
    CompleteBipartite,
    TwoCliques,
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureClass {
    pub class: StructureKind,
    pub removed_vertices: Vec<u32>,
    pub removed_edge_budget: usize,
    /// Edges actually deleted (pairs with `f(u, v) = 0` among kept vertices).
    pub removed_edges: usize,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Fill {
    All,
    NoEdges,
    Mixed,
}

/// Searches for a witness that `G` becomes complete, empty, complete
/// bipartite or two disjoint cliques after deleting at most `2d` vertices and
/// `dq` edges. Candidate vertices are the zeros of the kernel factors `F(x)`
/// and `G(y)`; the residual is split by the quadratic character of `F(u)` and
/// `G(u)`. A `None` class means no witness was found.
pub fn classify_structure(g: &GraphInstance, d: u32) -> StructureClass {
    let n = g.q();
    let budget = d as usize * n;
    let none = StructureClass {
        class: StructureKind::None,
        removed_vertices: Vec::new(),
        removed_edge_budget: budget,
        removed_edges: 0,
    };
    let Some(prov) = g.provenance() else {
        return none;
    };
    let field = &prov.field;
    let Ok(kernel) = primitive_kernel(&prov.poly, field) else {
        return none;
    };
    let removed: Vec<u32> = field
        .elements()
        .filter(|&u| kernel.fx.eval(field, u).is_zero() || kernel.gy.eval(field, u).is_zero())
        .map(|u| u.index())
        .collect();
    if removed.len() > 2 * d as usize {
        return none;
    }
    let kept: Vec<FieldElement> = field
        .elements()
        .filter(|u| removed.binary_search(&u.index()).is_err())
        .collect();

    // Residual adjacency: nonzero square values only.
    let mut removed_edges = 0;
    let mut residual = |u: FieldElement, v: FieldElement| {
        let val = prov.poly.eval(field, u, v);
        if val.is_zero() {
            if g.has_edge(u.index() as usize, v.index() as usize) {
                removed_edges += 1;
            }
            false
        } else {
            field.is_square(val)
        }
    };

    let key = |u: FieldElement| {
        (
            field.chi(kernel.fx.eval(field, u)),
            field.chi(kernel.gy.eval(field, u)),
        )
    };
    let mut keys: Vec<(i8, i8)> = kept.iter().map(|&u| key(u)).collect();
    keys.sort();
    keys.dedup();
    let block_of = |u: FieldElement| keys.binary_search(&key(u)).unwrap();
    let k = keys.len();
    let mut fill = vec![vec![None::<Fill>; k]; k];
    for (i, &u) in kept.iter().enumerate() {
        for &v in &kept[i + 1..] {
            let (a, b) = (block_of(u), block_of(v));
            let (a, b) = (a.min(b), a.max(b));
            let e = residual(u, v);
            let cell = &mut fill[a][b];
            *cell = Some(match (*cell, e) {
                (None, true) => Fill::All,
                (None, false) => Fill::NoEdges,
                (Some(Fill::All), true) => Fill::All,
                (Some(Fill::NoEdges), false) => Fill::NoEdges,
                _ => Fill::Mixed,
            });
        }
    }
    if removed_edges > budget {
        return none;
    }
    let cells: Vec<Fill> = fill.iter().flatten().flatten().copied().collect();
    let uniform = |want: Fill| cells.iter().all(|&c| c == want);
    let class = if uniform(Fill::All) {
        StructureKind::Complete
    } else if uniform(Fill::NoEdges) {
        StructureKind::Empty
    } else if k == 2 {
        let inside = [fill[0][0], fill[1][1]];
        let cross = fill[0][1];
        let inside_is = |want: Fill| inside.iter().all(|c| c.is_none_or(|c| c == want));
        match cross {
            Some(Fill::NoEdges) if inside_is(Fill::All) => StructureKind::TwoCliques,
            Some(Fill::All) if inside_is(Fill::NoEdges) => StructureKind::CompleteBipartite,
            _ => StructureKind::None,
        }
    } else {
        StructureKind::None
    };
    if class == StructureKind::None {
        return none;
    }
    StructureClass {
        class,
        removed_vertices: removed,
        removed_edge_budget: budget,
        removed_edges,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScalingReport {
    /// Every checked pair flips adjacency under `v -> r v`.
    pub complementary: bool,
    /// Pairs skipped because `f(u, v) = 0`.
    pub exempted_pairs: usize,
    pub checked_pairs: usize,
}

pub(crate) fn odd_homogeneous(g: &GraphInstance) -> Result<&Provenance, GraphError> {
    let prov = g.provenance().ok_or(GraphError::MissingProvenance)?;
    match prov.poly.homogeneous_degree() {
        Some(d) if d % 2 == 1 => Ok(prov),
        _ => Err(GraphError::NotHomogeneousOdd),
    }
}

/// For `f` homogeneous of odd degree and `r` a non-square, `v -> r v` should
/// map edges to non-edges (pairs with `f(u, v) = 0` are exempt).
pub fn is_self_complementary_via_scaling(
    g: &GraphInstance,
    r: FieldElement,
) -> Result<ScalingReport, GraphError> {
    let prov = odd_homogeneous(g)?;
    let field = &prov.field;
    if field.is_square(r) {
        return Err(GraphError::RIsSquare);
    }
    let mut exempted = 0;
    let mut checked = 0;
    let mut ok = true;
    for u in field.elements() {
        let row = prov.poly.specialize_x(field, u);
        let ru = field.mul(r, u).index() as usize;
        for v in field.elements().skip(u.index() as usize + 1) {
            if row.eval(field, v).is_zero() {
                exempted += 1;
                continue;
            }
            checked += 1;
            let rv = field.mul(r, v).index() as usize;
            if g.has_edge(u.index() as usize, v.index() as usize) == g.has_edge(ru, rv) {
                ok = false;
            }
        }
    }
    Ok(ScalingReport {
        complementary: ok,
        exempted_pairs: exempted,
        checked_pairs: checked,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dimacs,
    EdgeList,
    Json,
}

#[derive(Serialize)]
struct JsonGraph<'a> {
    q: usize,
    f: &'a str,
    edges: Vec<[usize; 2]>,
}

/// Writes the graph. DIMACS uses 1-based vertices; edge lists and JSON use
/// 0-based indices. Edges are `u < v` in ascending order.
pub fn export<W: Write>(g: &GraphInstance, format: ExportFormat, mut sink: W) -> Result<(), GraphError> {
    match format {
        ExportFormat::Dimacs => {
            writeln!(sink, "p edge {} {}", g.q(), g.edge_count())?;
            for (u, v) in g.edges() {
                writeln!(sink, "e {} {}", u + 1, v + 1)?;
            }
        }
        ExportFormat::EdgeList => {
            for (u, v) in g.edges() {
                writeln!(sink, "{u} {v}")?;
            }
        }
        ExportFormat::Json => {
            let doc = JsonGraph {
                q: g.q(),
                f: g.f_string(),
                edges: g.edges().map(|(u, v)| [u, v]).collect(),
            };
            serde_json::to_writer(&mut sink, &doc).map_err(std::io::Error::from)?;
            writeln!(sink)?;
        }
    }
    sink.flush()?;
    Ok(())
}

/// Convenience: parse `expr` and build its graph.
pub fn build_from_expr(expr: &str, field: &Field) -> Result<GraphInstance, GraphError> {
    let f = poly::parse_poly(expr, field)?;
    build_graph(&f, field)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    fn dimacs(g: &GraphInstance) -> String {
        let mut out = Vec::new();
        export(g, ExportFormat::Dimacs, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn diophantine_f5() {
        let f5 = field(5);
        let g = diophantine(&f5).unwrap();
        assert_eq!(g.edge_count(), 7);
        let mut degs = g.degrees().to_vec();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(degs, vec![4, 3, 3, 2, 2]);
        assert_eq!(g.degrees()[0], 4);
        assert!(dimacs(&g).starts_with("p edge 5 7\n"));
    }

    #[test]
    fn paley_f5_is_the_five_cycle() {
        let f5 = field(5);
        let g = paley(&f5).unwrap();
        assert_eq!(
            dimacs(&g),
            "p edge 5 5\ne 1 2\ne 1 5\ne 2 3\ne 3 4\ne 4 5\n"
        );
    }

    #[test]
    fn directed_and_congruence_errors() {
        let f7 = field(7);
        match build_from_expr("x-y", &f7) {
            Err(GraphError::DirectedPolynomial { u, v }) => assert_eq!((u, v), (1, 0)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(paley(&f7), Err(GraphError::PaleyCongruence { q: 7 })));
        assert!(matches!(
            gen_dio(FieldElement::ZERO, FieldElement::ONE, &f7),
            Err(GraphError::ZeroCoefficient)
        ));
    }

    #[test]
    fn paley_f13_regular() {
        let g = paley(&field(13)).unwrap();
        assert!(g.degrees().iter().all(|&d| d == 6));
        assert_eq!(g.edge_count(), 39);
        for q in [9u64, 17, 25, 29, 49] {
            let g = paley(&field(q)).unwrap();
            assert!(g.degrees().iter().all(|&d| d as u64 == (q - 1) / 2), "q={q}");
        }
    }

    #[test]
    fn paley_sum_degrees_stay_near_half() {
        // No closed form is asserted; degrees stay within one of (q-1)/2.
        for q in [13u64, 17, 27, 49, 101] {
            let g = paley_sum(&field(q)).unwrap();
            let half = (q as i64 - 1) / 2;
            for &d in g.degrees() {
                assert!((d as i64 - half).abs() <= 1, "q={q} degree {d}");
            }
        }
    }

    #[test]
    fn family_member_examples() {
        let f13 = field(13);
        let f = parse_poly("x*y+1", &f13).unwrap();
        let g = UniPoly::parse("x^2", &f13).unwrap();
        let h = family_member(&f, &g, ComposeVariant::Plain, &f13).unwrap();
        let direct = build_from_expr("x^2*y^2+1", &f13).unwrap();
        assert_eq!(dimacs(&h), dimacs(&direct));
        assert_eq!(h.provenance().unwrap().family, Family::Hd { d: 2, variant: ComposeVariant::Plain });

        let bad = parse_poly("1+x+y+x*y", &f13).unwrap();
        assert!(matches!(
            family_member(&bad, &g, ComposeVariant::Plain, &f13),
            Err(GraphError::KernelCriterionFailed)
        ));
        let not11 = parse_poly("x^2+y", &f13).unwrap();
        assert!(matches!(
            family_member(&not11, &g, ComposeVariant::Plain, &f13),
            Err(GraphError::NotBidegree11)
        ));

        let f = parse_poly("x+y", &f13).unwrap();
        let tilde = family_member(&f, &UniPoly::x(), ComposeVariant::Tilde, &f13).unwrap();
        let direct = build_from_expr("x*y*(x+y)", &f13).unwrap();
        assert_eq!(dimacs(&tilde), dimacs(&direct));
    }

    #[test]
    fn classify_examples() {
        let f13 = field(13);
        let complete = build_from_expr("(x-y)^2", &f13).unwrap();
        let c = classify_structure(&complete, 2);
        assert_eq!(c.class, StructureKind::Complete);
        assert!(c.removed_vertices.is_empty());

        let two = build_from_expr("(x+1)*(y+1)", &f13).unwrap();
        let c = classify_structure(&two, 2);
        assert_eq!(c.class, StructureKind::TwoCliques);
        assert_eq!(c.removed_vertices, vec![12]);

        let bip = build_from_expr("2*(x+1)*(y+1)", &f13).unwrap();
        let c = classify_structure(&bip, 2);
        assert_eq!(c.class, StructureKind::CompleteBipartite);

        let empty = build_from_expr("2*(x-y)^2", &f13).unwrap();
        assert_eq!(classify_structure(&empty, 2).class, StructureKind::Empty);

        let p13 = paley(&f13).unwrap();
        assert_eq!(classify_structure(&p13, 1).class, StructureKind::None);
        assert_eq!(classify_structure(&diophantine(&f13).unwrap(), 2).class, StructureKind::None);
    }

    #[test]
    fn classify_square_kernel_with_zero_edges() {
        // f = x (x-y)^2 y over F_13 is symmetric; H = (x-y)^2 is a square.
        let f13 = field(13);
        let g = build_from_expr("x*y*(x-y)^2", &f13).unwrap();
        let c = classify_structure(&g, 4);
        assert_eq!(c.removed_vertices, vec![0]);
        assert!(c.removed_edges <= c.removed_edge_budget);
        assert!(matches!(c.class, StructureKind::TwoCliques | StructureKind::CompleteBipartite));
    }

    #[test]
    fn x2_y_plus_x2_is_directed() {
        let f13 = field(13);
        assert!(matches!(
            build_from_expr("x^2*y+x^2", &f13),
            Err(GraphError::DirectedPolynomial { .. })
        ));
    }

    #[test]
    fn scaling_complementarity() {
        let f13 = field(13);
        let g = paley(&f13).unwrap();
        let r = is_self_complementary_via_scaling(&g, f13.from_int(2)).unwrap();
        assert!(r.complementary);
        assert_eq!(r.exempted_pairs, 0);
        assert!(matches!(
            is_self_complementary_via_scaling(&g, f13.from_int(4)),
            Err(GraphError::RIsSquare)
        ));
        let f9 = field(9);
        let g9 = paley(&f9).unwrap();
        let t = f9.generator().unwrap();
        // t^2 = -1 and -1 is a square in F_9, so t itself is a square.
        assert!(matches!(is_self_complementary_via_scaling(&g9, t), Err(GraphError::RIsSquare)));
        let one_plus_t = f9.add(t, FieldElement::ONE);
        let r = is_self_complementary_via_scaling(&g9, one_plus_t).unwrap();
        assert!(r.complementary);
        assert_eq!(r.checked_pairs, 36);
        assert!(matches!(
            is_self_complementary_via_scaling(&diophantine(&f13).unwrap(), f13.from_int(2)),
            Err(GraphError::NotHomogeneousOdd)
        ));
    }

    #[test]
    fn non_square_scaling_negates_adjacency() {
        for q in [13u64, 25, 27, 49] {
            let fld = field(q);
            let r = fld.least_non_square();
            for src in ["x*y+1", "x+y", "x*y*(x+y)+2"] {
                let f = parse_poly(src, &fld).unwrap();
                let a = build_graph(&f, &fld).unwrap();
                let b = build_graph(&f.scale(&fld, r), &fld).unwrap();
                for u in 0..a.q() {
                    for v in u + 1..a.q() {
                        let val = f.eval(&fld, FieldElement::from_raw(u as u32), FieldElement::from_raw(v as u32));
                        if !val.is_zero() {
                            assert_ne!(a.has_edge(u, v), b.has_edge(u, v));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn square_multiple_gives_same_graph() {
        for q in [13u64, 27, 49] {
            let fld = field(q);
            let f = parse_poly("x*y+1", &fld).unwrap();
            let base = dimacs(&build_graph(&f, &fld).unwrap());
            for s in fld.elements().skip(1).step_by(3) {
                let g = build_graph(&f.scale(&fld, fld.mul(s, s)), &fld).unwrap();
                assert_eq!(dimacs(&g), base);
            }
        }
    }

    #[test]
    fn subfield_is_a_clique() {
        for q in [9u64, 25, 49] {
            let fld = field(q);
            let sub = fld.half_subfield().unwrap();
            let verts: Vec<usize> = sub.iter().map(|a| a.index() as usize).collect();
            for src in ["x-y", "x*y+1", "x+y", "x^3+y^3+x*y"] {
                let f = parse_poly(src, &fld).unwrap();
                assert!(f.coefficients_in(&sub));
                let g = build_graph(&f, &fld).unwrap();
                assert!(g.is_clique(&verts), "q={q} f={src}");
            }
        }
    }

    #[test]
    fn export_formats() {
        let f5 = field(5);
        let g = paley(&f5).unwrap();
        let mut out = Vec::new();
        export(&g, ExportFormat::EdgeList, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "0 1\n0 4\n1 2\n2 3\n3 4\n");
        let mut out = Vec::new();
        export(&g, ExportFormat::Json, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "{\"q\":5,\"f\":\"x+4*y\",\"edges\":[[0,1],[0,4],[1,2],[2,3],[3,4]]}\n"
        );
        let empty = build_from_expr("2", &f5).unwrap();
        assert_eq!(dimacs(&empty), "p edge 5 0\n");
        assert_eq!(dimacs(&paley(&f5).unwrap()), dimacs(&g));
    }

    #[test]
    fn complement_round_trip() {
        let g = diophantine(&field(13)).unwrap();
        let c = g.complement();
        assert_eq!(c.edge_count() + g.edge_count(), 13 * 12 / 2);
        assert_eq!(dimacs(&c.complement()), dimacs(&g));
    }
}
