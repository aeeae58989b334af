//! Exact clique and independence numbers, and the Ramsey-side calculators.

use serde::Serialize;
use thiserror::Error;

use crate::bits::BitSet;
use crate::ff::FieldElement;
use crate::graph::{odd_homogeneous, GraphError, GraphInstance};

/// Default node budget for branch and bound.
pub const DEFAULT_BUDGET: u64 = 50_000_000;

#[derive(Debug, Error)]
pub enum ExtremalError {
    #[error("{name} = {value} is outside its domain {domain}")]
    Domain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("no sign change for theta = {theta}: lhs(lo) = {lhs_lo}, lhs(hi) = {lhs_hi}")]
    NoBracket { theta: f64, lhs_lo: f64, lhs_hi: f64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CliqueResult {
    pub omega: usize,
    /// Sorted vertex indices.
    pub witness: Vec<u32>,
    pub nodes_explored: u64,
    pub exact: bool,
}

/// Graph relabelled so that index order is descending degree, ties by index.
struct Ordered {
    perm: Vec<usize>,
    rows: Vec<BitSet>,
}

impl Ordered {
    fn new(g: &GraphInstance) -> Ordered {
        let n = g.q();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.sort_by_key(|&v| (std::cmp::Reverse(g.degrees()[v]), v));
        let mut pos = vec![0; n];
        for (i, &v) in perm.iter().enumerate() {
            pos[v] = i;
        }
        let rows = perm
            .iter()
            .map(|&v| BitSet::from_indices(n, g.neighbors(v).iter().map(|w| pos[w])))
            .collect();
        Ordered { perm, rows }
    }
}

/// Greedy sequential colouring of `p` in index order. Returns vertices with
/// their colour, colours nondecreasing.
fn color_sort(rows: &[BitSet], p: &BitSet) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(p.count());
    let mut uncolored = p.clone();
    let mut color = 0;
    while !uncolored.is_empty() {
        color += 1;
        let mut avail = uncolored.clone();
        while let Some(v) = avail.first() {
            avail.remove(v);
            uncolored.remove(v);
            let not_adj = rows[v].complement();
            avail.intersect_with(&not_adj);
            out.push((v, color));
        }
    }
    out
}

struct Search<'a> {
    rows: &'a [BitSet],
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
}

impl Search<'_> {
    fn expand(&mut self, r: &mut Vec<usize>, mut p: BitSet) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let colored = color_sort(self.rows, &p);
        for &(v, color) in colored.iter().rev() {
            if r.len() + color <= self.best.len() || self.aborted {
                return;
            }
            r.push(v);
            let mut next = p.clone();
            next.intersect_with(&self.rows[v]);
            if next.is_empty() {
                if r.len() > self.best.len() {
                    self.best = r.clone();
                }
            } else {
                self.expand(r, next);
            }
            r.pop();
            p.remove(v);
        }
    }
}

/// Lexicographically first clique of size `k` in original index order.
fn lex_first_clique(g: &GraphInstance, k: usize, budget: u64, nodes: &mut u64) -> Option<Vec<usize>> {
    let rows: Vec<BitSet> = (0..g.q()).map(|v| g.neighbors(v)).collect();
    fn go(
        rows: &[BitSet],
        r: &mut Vec<usize>,
        p: BitSet,
        k: usize,
        budget: u64,
        nodes: &mut u64,
    ) -> Option<bool> {
        if r.len() == k {
            return Some(true);
        }
        *nodes += 1;
        if *nodes > budget {
            return None;
        }
        let bound = color_sort(rows, &p).last().map(|c| c.1).unwrap_or(0);
        if r.len() + bound < k {
            return Some(false);
        }
        let mut p = p;
        while let Some(v) = p.first() {
            if r.len() + p.count() < k {
                return Some(false);
            }
            p.remove(v);
            r.push(v);
            let mut next = p.clone();
            next.intersect_with(&rows[v]);
            if go(rows, r, next, k, budget, nodes)? {
                return Some(true);
            }
            r.pop();
        }
        Some(false)
    }
    let mut r = Vec::new();
    match go(&rows, &mut r, BitSet::full(g.q()), k, budget, nodes) {
        Some(true) => Some(r),
        _ => None,
    }
}

/// Maximum clique by branch and bound with greedy-colouring bounds. The
/// witness is the lexicographically first maximum clique when the budget
/// allows finding it.
pub fn max_clique(g: &GraphInstance, budget: u64) -> CliqueResult {
    let n = g.q();
    if n == 0 {
        return CliqueResult {
            omega: 0,
            witness: Vec::new(),
            nodes_explored: 0,
            exact: true,
        };
    }
    let ord = Ordered::new(g);
    let mut search = Search {
        rows: &ord.rows,
        best: vec![0],
        nodes: 0,
        budget,
        aborted: false,
    };
    search.expand(&mut Vec::new(), BitSet::full(n));
    let omega = search.best.len();
    let mut nodes = search.nodes;
    let exact = !search.aborted;
    let mut witness: Vec<usize> = search.best.iter().map(|&i| ord.perm[i]).collect();
    witness.sort_unstable();
    if exact {
        if let Some(w) = lex_first_clique(g, omega, budget.saturating_sub(nodes), &mut nodes) {
            witness = w;
        }
    }
    assert!(g.is_clique(&witness), "clique witness failed verification");
    CliqueResult {
        omega,
        witness: witness.into_iter().map(|v| v as u32).collect(),
        nodes_explored: nodes,
        exact,
    }
}

/// Independence number, as the clique number of the complement.
pub fn independence_number(g: &GraphInstance, budget: u64) -> CliqueResult {
    let r = max_clique(&g.complement(), budget);
    let w: Vec<usize> = r.witness.iter().map(|&v| v as usize).collect();
    assert!(g.is_independent(&w));
    r
}

fn rho_raw(l: f64) -> f64 {
    (-0.25 * l + 0.03 * l * l + 0.08 * l * l * l) * (-l).exp()
}

/// `rho(l) = (-0.25 l + 0.03 l^2 + 0.08 l^3) e^{-l}` on `[0, 1]`.
pub fn rho(lambda: f64) -> Result<f64, ExtremalError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(ExtremalError::Domain {
            name: "lambda",
            value: lambda,
            domain: "[0, 1]",
        });
    }
    Ok(rho_raw(lambda))
}

/// Binary entropy (nats) plus the `rho` correction at `x/(1-x)`, scaled by `1-x`.
pub fn rate_function(x: f64) -> Result<f64, ExtremalError> {
    if !(x > 0.0 && x < 1.0) {
        return Err(ExtremalError::Domain {
            name: "x",
            value: x,
            domain: "(0, 1)",
        });
    }
    let entropy = -x * x.ln() - (1.0 - x) * (1.0 - x).ln();
    Ok(entropy + rho_raw(x / (1.0 - x)) * (1.0 - x))
}

/// Left side of the equation defining `ell(theta)`.
pub fn ell_lhs(ell: f64, theta: f64) -> f64 {
    let a = ell + 1.0 - theta;
    ell * (2.0 + (1.0 - theta) / ell).log2() + a * (1.0 + ell / a).log2() + a / std::f64::consts::LN_2 * rho_raw(ell / a)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LowerBoundPlan {
    pub q: u64,
    pub c: f64,
    pub m: u64,
    pub r: u64,
    pub s: u64,
    /// `2 (1 - theta + ell) log2 q`, main term only.
    pub bound: f64,
    /// `(1 - theta + ell) log2 q`.
    pub per_side: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub theta: f64,
    pub ell: f64,
    /// `2^{1/(1 - theta + ell)}`.
    pub base: f64,
    pub residual: f64,
    pub plan: Option<LowerBoundPlan>,
}

const ELL_LO: f64 = 1e-9;
const ELL_HI: f64 = 1.0;

/// Solves for `ell` by bisection on `[1e-9, 1]`.
pub fn solve_ell(theta: f64) -> Result<BoundReport, ExtremalError> {
    if !(0.5..1.0).contains(&theta) {
        return Err(ExtremalError::Domain {
            name: "theta",
            value: theta,
            domain: "[1/2, 1)",
        });
    }
    let (lhs_lo, lhs_hi) = (ell_lhs(ELL_LO, theta), ell_lhs(ELL_HI, theta));
    if !(lhs_lo < theta && theta < lhs_hi) {
        return Err(ExtremalError::NoBracket { theta, lhs_lo, lhs_hi });
    }
    let (mut lo, mut hi) = (ELL_LO, ELL_HI);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ell_lhs(mid, theta) < theta {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let ell = 0.5 * (lo + hi);
    Ok(BoundReport {
        theta,
        ell,
        base: 2f64.powf(1.0 / (1.0 - theta + ell)),
        residual: (ell_lhs(ell, theta) - theta).abs(),
        plan: None,
    })
}

/// Parameters `m`, `r`, `s` for the lower-bound construction at `q`.
pub fn lower_bound_plan(q: u64, theta: f64, c: f64) -> Result<BoundReport, ExtremalError> {
    if q < 3 {
        return Err(ExtremalError::Domain {
            name: "q",
            value: q as f64,
            domain: "q >= 3",
        });
    }
    if !(c > 0.0) {
        return Err(ExtremalError::Domain {
            name: "C",
            value: c,
            domain: "C > 0",
        });
    }
    let mut report = solve_ell(theta)?;
    let n = q as f64;
    let m = (n.powf(1.0 - theta) / (5.0 * c) + 0.8).log2().floor().max(0.0) as u64;
    let r = (report.ell * n.log2()).floor().max(0.0) as u64;
    let per_side = (1.0 - theta + report.ell) * n.log2();
    report.plan = Some(LowerBoundPlan {
        q,
        c,
        m,
        r,
        s: r + m,
        bound: 2.0 * per_side,
        per_side,
    });
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RamseyBound {
    pub k: u64,
    pub l: u64,
    /// Natural log of the main term.
    pub ln_value: f64,
    pub log10_value: f64,
    /// `exp(ln_value)`, infinite when it overflows.
    pub value: f64,
}

/// `exp(rho(l/k) k) C(k+l, l)`, main term only, computed in log space.
pub fn ramsey_upper(k: u64, l: u64) -> Result<RamseyBound, ExtremalError> {
    if l < 1 || l > k {
        return Err(ExtremalError::Domain {
            name: "l",
            value: l as f64,
            domain: "1 <= l <= k",
        });
    }
    let ln_binom: f64 = (1..=l).map(|i| ((k + i) as f64 / i as f64).ln()).sum();
    let ln_value = rho_raw(l as f64 / k as f64) * k as f64 + ln_binom;
    Ok(RamseyBound {
        k,
        l,
        ln_value,
        log10_value: ln_value / std::f64::consts::LN_10,
        value: ln_value.exp(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TransferReport {
    pub holds: bool,
    pub omega: usize,
    pub alpha: usize,
    pub independent_set: Vec<u32>,
    pub image: Vec<u32>,
}

/// For odd homogeneous `f` and non-square `r`, maps a maximum independent
/// set `I` to `rI` and checks that it is a clique.
pub fn verify_homogeneous_transfer(
    g: &GraphInstance,
    r: FieldElement,
    budget: u64,
) -> Result<TransferReport, ExtremalError> {
    let prov = odd_homogeneous(g)?;
    let field = &prov.field;
    if field.is_square(r) {
        return Err(GraphError::RIsSquare.into());
    }
    let alpha = independence_number(g, budget);
    let mut image: Vec<u32> = alpha
        .witness
        .iter()
        .map(|&v| field.mul(r, FieldElement::from_raw(v)).index())
        .collect();
    image.sort_unstable();
    let as_usize: Vec<usize> = image.iter().map(|&v| v as usize).collect();
    let omega = max_clique(g, budget);
    Ok(TransferReport {
        holds: g.is_clique(&as_usize) && omega.omega >= alpha.omega,
        omega: omega.omega,
        alpha: alpha.omega,
        independent_set: alpha.witness,
        image,
    })
}

/// Clique number by enumerating every subset; `q <= 24`.
pub fn clique_number_by_subsets(g: &GraphInstance) -> usize {
    let n = g.q();
    assert!(n <= 24, "subset enumeration limited to 24 vertices");
    let rows: Vec<u32> = (0..n).map(|u| g.row(u).first().copied().unwrap_or(0) as u32).collect();
    let mut is_clique = vec![false; 1 << n];
    is_clique[0] = true;
    let mut best = 0;
    for mask in 1u32..(1 << n) {
        let v = mask.trailing_zeros() as usize;
        let rest = mask & (mask - 1);
        let ok = is_clique[rest as usize] && rows[v] & rest == rest;
        is_clique[mask as usize] = ok;
        if ok {
            best = best.max(mask.count_ones() as usize);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::Field;
    use crate::graph::{build_from_expr, diophantine, paley};

    fn field(q: u64) -> Field {
        Field::of_order(q).unwrap()
    }

    #[test]
    fn paley_subfield_cliques() {
        let r = max_clique(&paley(&field(9)).unwrap(), DEFAULT_BUDGET);
        assert_eq!(r.omega, 3);
        assert_eq!(r.witness, vec![0, 1, 2]);
        assert!(r.exact);
        assert_eq!(max_clique(&paley(&field(25)).unwrap(), DEFAULT_BUDGET).omega, 5);
        assert_eq!(max_clique(&paley(&field(49)).unwrap(), DEFAULT_BUDGET).omega, 7);
    }

    #[test]
    fn small_examples() {
        let d5 = max_clique(&diophantine(&field(5)).unwrap(), DEFAULT_BUDGET);
        assert_eq!((d5.omega, d5.witness.clone()), (3, vec![0, 1, 3]));
        let p13 = paley(&field(13)).unwrap();
        assert_eq!(independence_number(&p13, DEFAULT_BUDGET).omega, 3);
        assert_eq!(clique_number_by_subsets(&p13), 3);
        let k5 = build_from_expr("(x-y)^2", &field(5)).unwrap();
        assert_eq!(independence_number(&k5, DEFAULT_BUDGET).omega, 1);
        let e7 = build_from_expr("3", &field(7)).unwrap();
        assert_eq!(e7.edge_count(), 0);
        assert_eq!(independence_number(&e7, DEFAULT_BUDGET).omega, 7);
        assert_eq!(max_clique(&e7, DEFAULT_BUDGET).omega, 1);
    }

    #[test]
    fn matches_subset_enumeration() {
        for q in [5u64, 7, 9, 11, 13, 17, 19, 23] {
            let fld = field(q);
            for src in ["x*y+1", "x+y", "x*y+2", "x^2*y^2+1", "x*y*(x+y)+1"] {
                let g = build_from_expr(src, &fld).unwrap();
                assert_eq!(max_clique(&g, DEFAULT_BUDGET).omega, clique_number_by_subsets(&g), "q={q} {src}");
                let c = g.complement();
                assert_eq!(independence_number(&g, DEFAULT_BUDGET).omega, clique_number_by_subsets(&c));
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_flagged() {
        let g = paley(&field(101)).unwrap();
        let r = max_clique(&g, 3);
        assert!(!r.exact);
        assert!(r.omega >= 1);
    }

    #[test]
    fn calculators() {
        assert_eq!(rho(0.0).unwrap(), 0.0);
        assert!((rho(1.0).unwrap() + 0.14 * (-1f64).exp()).abs() < 1e-15);
        assert!(rho(1.5).is_err());
        assert!((rate_function(0.5).unwrap() - 0.667396).abs() < 1e-6);
        assert!(rate_function(1e-12).unwrap().abs() < 1e-9);
        assert!(rate_function(0.0).is_err());

        let r = solve_ell(0.75).unwrap();
        assert!((r.ell - 0.3031).abs() < 5e-4);
        assert!((r.base - 3.501).abs() < 5e-3);
        let r = solve_ell(0.5).unwrap();
        assert!((r.ell - 0.1436).abs() < 5e-4);
        assert!((r.base - 2.936).abs() < 5e-3);
        let r6 = solve_ell(0.6).unwrap();
        assert!(r6.residual <= 1e-9);
        assert!((r6.ell - 0.199448).abs() < 1e-6);
        assert!(solve_ell(1.0).is_err());

        let a = ramsey_upper(1, 1).unwrap();
        assert!((a.value - 1.900).abs() < 1e-3);
        let b = ramsey_upper(2, 1).unwrap();
        assert!((b.value - 2.633).abs() < 1e-3);
        assert!(ramsey_upper(1, 2).is_err());
        let big = ramsey_upper(10_000, 10_000).unwrap();
        assert!(big.ln_value.is_finite() && big.value.is_infinite());
        for l in 1..20u64 {
            for k in l..60 {
                assert!(ramsey_upper(k + 1, l).unwrap().ln_value >= ramsey_upper(k, l).unwrap().ln_value);
            }
        }
    }

    #[test]
    fn plans() {
        let p = lower_bound_plan(101, 0.5, 1.0).unwrap().plan.unwrap();
        assert_eq!(p.m, 1);
        assert!((p.per_side - 4.285).abs() < 2e-3);
        assert_eq!(p.r, (0.143666f64 * 101f64.log2()).floor() as u64);
        let p3 = lower_bound_plan(3, 0.5, 1.0).unwrap().plan.unwrap();
        assert_eq!(p3.m, 0);
    }

    #[test]
    fn transfer() {
        let f13 = field(13);
        let t = verify_homogeneous_transfer(&paley(&f13).unwrap(), f13.from_int(2), DEFAULT_BUDGET).unwrap();
        assert!(t.holds);
        assert_eq!((t.omega, t.alpha), (3, 3));
        let f9 = field(9);
        let r = f9.add(f9.generator().unwrap(), FieldElement::ONE);
        assert!(verify_homogeneous_transfer(&paley(&f9).unwrap(), r, DEFAULT_BUDGET).unwrap().holds);
        assert!(matches!(
            verify_homogeneous_transfer(&diophantine(&f13).unwrap(), f13.from_int(2), DEFAULT_BUDGET),
            Err(ExtremalError::Graph(GraphError::NotHomogeneousOdd))
        ));
    }
}
