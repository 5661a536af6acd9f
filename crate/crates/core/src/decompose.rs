//! Writing even subcomplexes as mod-2 sums of basis spheres.
//!
//! Three routes produce the coefficient set:
//!
//! * **cone** (simplex): each k-cell `σ` of the cycle avoiding vertex 1 is
//!   the private face of `∂({1} ∪ σ)`, so the coefficients can be read off.
//! * **peel** (cube): walk the levels from the top down, picking every sphere
//!   whose private face `s × {1}` is still present; what remains lives on the
//!   seed coordinates and is either empty or the seed sphere.
//! * **solve**: Gaussian elimination against the basis matrix, used as the
//!   independent check of the other two.
//!
//! The module also holds the torus search in `Q_4` and the ordering search
//! behind the robust / connected-sum experiments.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use itertools::Itertools;
use rand::Rng;
use serde::Serialize;

use crate::bases::{cube_basis, simplex_basis, SphereBasis};
use crate::cells::{enumerate_cells, Ambient, Cell, Coord, Family};
use crate::complex::{CellComplex, Chain};
use crate::error::{domain, Error, Result};
use crate::gf2::BitVec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Cone,
    Peel,
    Solve,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionResult {
    /// Ascending indices into the basis.
    pub basis_indices: Vec<usize>,
    /// Input plus the sum of the indexed elements; empty on success.
    pub residual: Chain,
    pub method: Method,
}

impl DecompositionResult {
    pub fn is_success(&self) -> bool {
        self.residual.is_empty()
    }
}

impl Serialize for DecompositionResult {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            indices: &'a [usize],
            method: Method,
            residual: Vec<String>,
        }
        Repr {
            indices: &self.basis_indices,
            method: self.method,
            residual: self
                .residual
                .cells()
                .iter()
                .map(ToString::to_string)
                .collect(),
        }
        .serialize(serializer)
    }
}

fn check_matches(z: &Chain, basis: &SphereBasis, family: Option<Family>) -> Result<()> {
    if z.ambient() != basis.ambient() || z.k() != basis.k() as i32 {
        return domain(format!(
            "{}-chain of {:?} does not live in the {}-skeleton basis of {:?}",
            z.k(),
            z.ambient(),
            basis.k(),
            basis.ambient()
        ));
    }
    if let Some(f) = family {
        if basis.ambient().family() != f {
            return domain(format!("expected a {f} basis"));
        }
    }
    Ok(())
}

/// Sums `z` with the chosen elements in one pass.
fn residual_of(z: &Chain, basis: &SphereBasis, indices: &[usize]) -> Result<Chain> {
    let mut cells: Vec<Cell> = z.cells().to_vec();
    for &i in indices {
        cells.extend_from_slice(basis.elements()[i].chain.cells());
    }
    Chain::from_cells(z.ambient(), z.k(), cells)
}

/// Closed-form coefficients for a cycle of `Δ_n`: the cone from vertex 1.
pub fn simplex_decompose(z: &Chain, basis: &SphereBasis) -> Result<DecompositionResult> {
    check_matches(z, basis, Some(Family::Simplex))?;
    z.ensure_cycle()?;
    let by_face = basis.private_face_index();
    let mut indices: Vec<usize> = z
        .cells()
        .iter()
        .filter(|c| !c.as_simplex().expect("simplex chain").contains_vertex(1))
        .map(|c| by_face[c])
        .collect();
    indices.sort_unstable();
    let residual = residual_of(z, basis, &indices)?;
    if !residual.is_empty() {
        return Err(Error::Inconsistent(format!(
            "cone sum left {} cells behind",
            residual.len()
        )));
    }
    Ok(DecompositionResult {
        basis_indices: indices,
        residual,
        method: Method::Cone,
    })
}

/// Level-by-level peel for a cycle of `Q_n`.
pub fn cube_decompose(z: &Chain, basis: &SphereBasis) -> Result<DecompositionResult> {
    check_matches(z, basis, Some(Family::Cube))?;
    z.ensure_cycle()?;
    let mut by_level: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, e) in basis.elements().iter().enumerate() {
        by_level.entry(e.level).or_default().push(i);
    }
    let mut residual = z.clone();
    let mut chosen: Vec<usize> = Vec::new();
    for (_, members) in by_level.iter().rev() {
        let picked: Vec<usize> = members
            .iter()
            .copied()
            .filter(|&i| residual.contains(&basis.elements()[i].private_face))
            .collect();
        if !picked.is_empty() {
            residual = residual_of(&residual, basis, &picked)?;
            chosen.extend(picked);
        }
    }
    if !residual.is_empty() {
        return Err(Error::Inconsistent(format!(
            "peel left {} cells behind, starting with {}",
            residual.len(),
            residual.cells()[0]
        )));
    }
    chosen.sort_unstable();
    Ok(DecompositionResult {
        basis_indices: chosen,
        residual,
        method: Method::Peel,
    })
}

/// Closed-form decomposition for the basis family (cone or peel).
pub fn decompose(z: &Chain, basis: &SphereBasis) -> Result<DecompositionResult> {
    match basis.ambient().family() {
        Family::Simplex => simplex_decompose(z, basis),
        Family::Cube => cube_decompose(z, basis),
    }
}

/// Decomposition by linear solve. Chains outside the span come back with a
/// nonempty residual and the partial combination that produced it.
pub fn oracle_decompose(z: &Chain, basis: &SphereBasis) -> Result<DecompositionResult> {
    check_matches(z, basis, None)?;
    let rows = enumerate_cells(&basis.ambient(), basis.k())?;
    let b = BitVec::from_indices(
        rows.len(),
        z.cells()
            .iter()
            .map(|c| rows.binary_search(c).expect("ambient k-cell")),
    );
    let (x, r) = basis.matrix()?.reduce(&b)?;
    let residual = Chain::from_cells(z.ambient(), z.k(), r.ones().map(|i| rows[i].clone()))?;
    Ok(DecompositionResult {
        basis_indices: x.ones().collect(),
        residual,
        method: Method::Solve,
    })
}

/// Random subset of `0..len`, each index kept with probability 1/2.
pub fn random_indices<R: Rng>(rng: &mut R, len: usize) -> Vec<usize> {
    (0..len).filter(|_| rng.gen_bool(0.5)).collect()
}

// ---------------------------------------------------------------------------
// torus in Q_4
// ---------------------------------------------------------------------------

/// Surface invariants of a 2-chain of a cube.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceCheck {
    /// Every edge of the closure lies in exactly two squares.
    pub closed_surface: bool,
    pub connected: bool,
    pub euler: i64,
    pub betti: Vec<usize>,
}

impl SurfaceCheck {
    pub fn of(z: &Chain) -> Self {
        let closure = CellComplex::closure(z);
        SurfaceCheck {
            closed_surface: !z.is_empty() && edge_degrees(z).values().all(|&d| d == 2),
            connected: closure.is_connected(),
            euler: closure.euler_characteristic(),
            betti: closure.betti_numbers(),
        }
    }

    /// Closed, connected, `χ = 0`, Z₂ Betti `(1, 2, 1)`. Z₂ data cannot
    /// tell a torus from a Klein bottle.
    pub fn is_torus_like(&self) -> bool {
        self.closed_surface && self.connected && self.euler == 0 && self.betti == [1, 2, 1]
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorusCandidate {
    pub excluded: (usize, usize),
    /// The two excluded spheres share no square.
    pub disjoint: bool,
    #[serde(flatten)]
    pub check: SurfaceCheck,
}

#[derive(Clone, Debug)]
pub struct TorusSurface {
    /// Summed basis indices, ascending.
    pub indices: Vec<usize>,
    pub chain: Chain,
    pub decomposition: DecompositionResult,
    pub check: SurfaceCheck,
}

#[derive(Clone, Debug)]
pub struct TorusReport {
    /// One entry per exclusion pair, in lexicographic pair order.
    pub candidates: Vec<TorusCandidate>,
    /// The first five-sphere sum passing every surface test.
    pub five_sum: Option<TorusSurface>,
    /// The first torus-like sum over all subsets, by size then
    /// lexicographic order.
    pub smallest: Option<TorusSurface>,
}

impl TorusReport {
    pub fn surface(&self) -> Option<&TorusSurface> {
        self.five_sum.as_ref().or(self.smallest.as_ref())
    }
}

/// Squares of `z` through each edge of its closure.
fn edge_degrees(z: &Chain) -> BTreeMap<Cell, usize> {
    let mut deg: BTreeMap<Cell, usize> = BTreeMap::new();
    for e in CellComplex::closure(z).cells(1) {
        deg.insert(e.clone(), 0);
    }
    for sq in z.cells() {
        for e in sq.facets() {
            *deg.get_mut(&e).expect("facet in closure") += 1;
        }
    }
    deg
}

fn torus_surface(basis: &SphereBasis, indices: Vec<usize>) -> Result<Option<TorusSurface>> {
    let z = basis.sum(&indices)?;
    let check = SurfaceCheck::of(&z);
    if !check.is_torus_like() {
        return Ok(None);
    }
    let decomposition = cube_decompose(&z, basis)?;
    Ok(Some(TorusSurface {
        indices,
        chain: z,
        decomposition,
        check,
    }))
}

/// Searches the 21 ways of dropping two of the seven spheres of `B(4,2)`
/// for a torus-like five-sphere sum, then every subset of the seven for the
/// smallest torus-like sum.
///
/// The seven spheres bound seven of the eight facets of `Q_4`, so a
/// five-sphere sum bounds the three remaining facets and is always a
/// 2-sphere. The candidates record this; the subset search finds the
/// Clifford-type torus as a four-sphere sum.
pub fn torus_build() -> Result<TorusReport> {
    let basis = cube_basis(4, 2)?;
    let m = basis.len();
    let mut candidates = Vec::new();
    let mut five_sum = None;
    for a in 0..m {
        for b in a + 1..m {
            let keep: Vec<usize> = (0..m).filter(|&i| i != a && i != b).collect();
            let z = basis.sum(&keep)?;
            let cand = TorusCandidate {
                excluded: (a, b),
                disjoint: basis.elements()[a]
                    .chain
                    .intersection(&basis.elements()[b].chain)
                    .is_empty(),
                check: SurfaceCheck::of(&z),
            };
            if five_sum.is_none() && cand.check.is_torus_like() {
                five_sum = torus_surface(&basis, keep)?;
            }
            candidates.push(cand);
        }
    }
    let mut smallest = None;
    'sizes: for size in 1..=m {
        for keep in (0..m).combinations(size) {
            if let Some(t) = torus_surface(&basis, keep)? {
                smallest = Some(t);
                break 'sizes;
            }
        }
    }
    Ok(TorusReport {
        candidates,
        five_sum,
        smallest,
    })
}

/// OFF-style text for a 2-chain of a cube: vertices as 0/1 tuples, one
/// quadrilateral per square with its corners in cyclic order.
pub fn off_text(z: &Chain) -> Result<String> {
    let ambient = z.ambient();
    if ambient.family() != Family::Cube || z.k() != 2 {
        return domain("OFF export needs a 2-chain of a cube");
    }
    let closure = CellComplex::closure(z);
    let verts = closure.cells(0);
    let n = ambient.n();
    let mut out = String::new();
    match n {
        3 => out.push_str("OFF\n"),
        4 => out.push_str("4OFF\n"),
        _ => {
            let _ = writeln!(out, "nOFF\n{n}");
        }
    }
    let _ = writeln!(
        out,
        "{} {} {}",
        verts.len(),
        z.len(),
        closure.cells(1).len()
    );
    for v in verts {
        let coords = v
            .as_cube()
            .and_then(|c| c.vertex_coords())
            .expect("cube vertex");
        let line: Vec<String> = coords.iter().map(u8::to_string).collect();
        let _ = writeln!(out, "{}", line.join(" "));
    }
    for sq in z.cells() {
        let c = sq.as_cube().expect("cube square");
        let free: Vec<usize> = (0..n).filter(|&i| c.word()[i] == Coord::Free).collect();
        let corner = |x: Coord, y: Coord| {
            let v = Cell::Cube(c.with_coord(free[0], x).with_coord(free[1], y));
            verts.binary_search(&v).expect("corner in closure")
        };
        let (o, l) = (Coord::Zero, Coord::One);
        let _ = writeln!(
            out,
            "4 {} {} {} {}",
            corner(o, o),
            corner(l, o),
            corner(l, l),
            corner(o, l)
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// robust / connected-sum orderings
// ---------------------------------------------------------------------------

/// True when `x` passes the intersection test for dimension `k`.
///
/// `k = 1`: `x` is a simple path with at least one edge.
/// `k >= 2`: `x` is pure of dimension `k`, connected, collapsible by greedy
/// free-face collapse, with vanishing Z₂ Betti numbers in positive degrees.
/// The `k >= 2` test is a conservative stand-in for "is a k-ball".
pub fn ball_proxy(x: &CellComplex, k: usize) -> bool {
    if x.dim() != k as i32 || !x.is_pure() || !x.is_connected() {
        return false;
    }
    if k == 1 {
        let verts = x.cells(0);
        let edges = x.cells(1);
        let mut degree = vec![0usize; verts.len()];
        for e in edges {
            for v in e.facets() {
                degree[verts.binary_search(&v).expect("closed complex")] += 1;
            }
        }
        return edges.len() + 1 == verts.len() && degree.iter().all(|&d| d <= 2);
    }
    x.is_collapsible() && x.betti_numbers().iter().skip(1).all(|&b| b == 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "order", rename_all = "lowercase")]
pub enum OrderOutcome {
    Found(Vec<usize>),
    /// The search space was exhausted.
    None,
    /// The node budget ran out first.
    Inconclusive,
}

struct OrderSearch<'a> {
    basis: &'a SphereBasis,
    closures: Vec<CellComplex>,
    k: usize,
    budget: usize,
    nodes: usize,
}

impl OrderSearch<'_> {
    fn extend(
        &mut self,
        partial: &Chain,
        order: &mut Vec<usize>,
        remaining: &mut Vec<usize>,
    ) -> Option<bool> {
        if remaining.is_empty() {
            return Some(true);
        }
        let partial_closure = CellComplex::closure(partial);
        for slot in 0..remaining.len() {
            self.nodes += 1;
            if self.nodes > self.budget {
                return None;
            }
            let i = remaining[slot];
            if !order.is_empty() {
                let meet = self.closures[i].intersection(&partial_closure);
                if !ball_proxy(&meet, self.k) {
                    continue;
                }
            }
            let next = partial
                .add(&self.basis.elements()[i].chain)
                .expect("same skeleton");
            assert!(next.is_cycle(), "partial sum of cycles must be a cycle");
            remaining.remove(slot);
            order.push(i);
            match self.extend(&next, order, remaining) {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            order.pop();
            remaining.insert(slot, i);
        }
        Some(false)
    }
}

/// Looks for an ordering of `indices` in which every new summand meets the
/// running sum in a region passing [`ball_proxy`]. Depth-first with
/// backtracking, candidates tried in ascending index order; `budget` caps the
/// number of candidate tests.
pub fn connected_sum_order(
    z: &Chain,
    indices: &[usize],
    basis: &SphereBasis,
    budget: usize,
) -> Result<OrderOutcome> {
    check_matches(z, basis, None)?;
    if &basis.sum(indices)? != z {
        return domain("the indexed elements do not sum to the chain");
    }
    let mut remaining: Vec<usize> = indices.to_vec();
    remaining.sort_unstable();
    remaining.dedup();
    let closures = (0..basis.len())
        .map(|i| {
            if remaining.binary_search(&i).is_ok() {
                CellComplex::closure(&basis.elements()[i].chain)
            } else {
                CellComplex::closure(&Chain::empty(basis.ambient(), basis.k() as i32))
            }
        })
        .collect();
    let mut search = OrderSearch {
        basis,
        closures,
        k: basis.k(),
        budget,
        nodes: 0,
    };
    let mut order = Vec::new();
    let start = Chain::empty(basis.ambient(), basis.k() as i32);
    Ok(match search.extend(&start, &mut order, &mut remaining) {
        Some(true) => OrderOutcome::Found(order),
        Some(false) => OrderOutcome::None,
        None => OrderOutcome::Inconclusive,
    })
}

/// Every simple cycle of the complete graph on `1..=vertices`, as 1-chains
/// of `Δ_{vertices-1}`.
pub fn complete_graph_cycles(vertices: usize) -> Result<Vec<Chain>> {
    let ambient = Ambient::simplex(vertices.saturating_sub(1))?;
    let mut out = Vec::new();
    let mut path: Vec<u32> = Vec::new();
    for start in 1..=vertices as u32 {
        path.clear();
        path.push(start);
        cycles_from(
            start,
            vertices as u32,
            &mut path,
            &mut vec![false; vertices + 1],
            &ambient,
            &mut out,
        )?;
    }
    Ok(out)
}

fn cycles_from(
    start: u32,
    top: u32,
    path: &mut Vec<u32>,
    used: &mut Vec<bool>,
    ambient: &Ambient,
    out: &mut Vec<Chain>,
) -> Result<()> {
    // each cycle is emitted once: smallest vertex first, second < last
    if path.len() >= 3 && path[1] < *path.last().expect("nonempty") {
        let mut cycle = path.clone();
        cycle.push(start);
        let edges = cycle
            .windows(2)
            .map(|w| ambient.parse_cell(&format!("{{{},{}}}", w[0].min(w[1]), w[0].max(w[1]))))
            .collect::<Result<Vec<_>>>()?;
        out.push(Chain::from_cells(*ambient, 1, edges)?);
    }
    for v in start + 1..=top {
        if used[v as usize] {
            continue;
        }
        used[v as usize] = true;
        path.push(v);
        cycles_from(start, top, path, used, ambient, out)?;
        path.pop();
        used[v as usize] = false;
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RobustReport {
    pub n: usize,
    pub cycles: usize,
    pub verified: usize,
    pub failed: usize,
    pub inconclusive: usize,
}

/// Default cap on `n` for [`robust_check_all`].
pub const ROBUST_MAX_N: usize = 5;

/// Runs the ordering search on every cycle of `K_{n+1}` decomposed over
/// `B'(n,1)`.
pub fn robust_check_all(n: usize, max_n: usize, budget: usize) -> Result<RobustReport> {
    if n > max_n {
        return domain(format!(
            "robust check refused for n = {n}: bound is {max_n}"
        ));
    }
    let basis = simplex_basis(n, 1)?;
    let mut report = RobustReport {
        n,
        cycles: 0,
        verified: 0,
        failed: 0,
        inconclusive: 0,
    };
    for z in complete_graph_cycles(n + 1)? {
        report.cycles += 1;
        let dec = simplex_decompose(&z, &basis)?;
        match connected_sum_order(&z, &dec.basis_indices, &basis, budget)? {
            OrderOutcome::Found(_) => report.verified += 1,
            OrderOutcome::None => report.failed += 1,
            OrderOutcome::Inconclusive => report.inconclusive += 1,
        }
    }
    Ok(report)
}

/// Experimental ordering search on random cycles for any `(family, n, k)`.
/// The `k >= 2` intersection test is a proxy, so the counts are evidence
/// only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OrderSurvey {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    pub samples: usize,
    pub found: usize,
    pub none: usize,
    pub inconclusive: usize,
}

pub fn connected_sum_survey<R: Rng>(
    family: Family,
    n: usize,
    k: usize,
    samples: usize,
    budget: usize,
    rng: &mut R,
) -> Result<OrderSurvey> {
    let basis = crate::bases::basis(family, n, k)?;
    let mut survey = OrderSurvey {
        family,
        n,
        k,
        samples,
        found: 0,
        none: 0,
        inconclusive: 0,
    };
    for _ in 0..samples {
        let idx = random_indices(rng, basis.len());
        let z = basis.sum(&idx)?;
        match connected_sum_order(&z, &idx, &basis, budget)? {
            OrderOutcome::Found(_) => survey.found += 1,
            OrderOutcome::None => survey.none += 1,
            OrderOutcome::Inconclusive => survey.inconclusive += 1,
        }
    }
    Ok(survey)
}
