//! Z₂ chains, boundary operators, Betti numbers and face-closed complexes.

use std::collections::{BTreeSet, HashMap};
use std::sync::{Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::cells::{enumerate_cells, Ambient, Cell, Family};
use crate::error::{domain, Error, Result};
use crate::gf2::Gf2Matrix;

/// A set of same-dimension cells; addition is symmetric difference.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Chain {
    ambient: Ambient,
    k: i32,
    cells: Vec<Cell>,
}

/// Merges two sorted, duplicate-free slices into their symmetric difference.
fn symmetric_difference(a: &[Cell], b: &[Cell]) -> Vec<Cell> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j].clone());
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Sorts and keeps each cell with odd multiplicity exactly once.
fn reduce_mod2(mut cells: Vec<Cell>) -> Vec<Cell> {
    cells.sort_unstable();
    let mut out: Vec<Cell> = Vec::with_capacity(cells.len());
    let mut iter = cells.into_iter().peekable();
    while let Some(c) = iter.next() {
        let mut odd = true;
        while iter.peek() == Some(&c) {
            iter.next();
            odd = !odd;
        }
        if odd {
            out.push(c);
        }
    }
    out
}

impl Chain {
    pub fn empty(ambient: Ambient, k: i32) -> Self {
        Self {
            ambient,
            k,
            cells: Vec::new(),
        }
    }

    /// The mod-2 sum of `cells`; a cell listed twice cancels.
    pub fn from_cells(
        ambient: Ambient,
        k: i32,
        cells: impl IntoIterator<Item = Cell>,
    ) -> Result<Self> {
        let cells: Vec<Cell> = cells.into_iter().collect();
        for c in &cells {
            ambient.validate(c)?;
            if c.dim() != k {
                return domain(format!(
                    "cell {c} has dimension {}, chain dimension is {k}",
                    c.dim()
                ));
            }
        }
        Ok(Self {
            ambient,
            k,
            cells: reduce_mod2(cells),
        })
    }

    /// Every `k`-cell of the ambient.
    pub fn full_skeleton(ambient: Ambient, k: usize) -> Result<Self> {
        Ok(Self {
            ambient,
            k: k as i32,
            cells: enumerate_cells(&ambient, k)?,
        })
    }

    /// Parses codec strings in the ambient's codec.
    pub fn parse(ambient: Ambient, k: i32, texts: &[&str]) -> Result<Self> {
        let cells = texts
            .iter()
            .map(|t| ambient.parse_cell(t))
            .collect::<Result<Vec<_>>>()?;
        Self::from_cells(ambient, k, cells)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        self.cells.binary_search(cell).is_ok()
    }

    fn check_compatible(&self, other: &Chain) -> Result<()> {
        if self.ambient != other.ambient || self.k != other.k {
            return domain(format!(
                "cannot add a {}-chain of {:?} to a {}-chain of {:?}",
                other.k, other.ambient, self.k, self.ambient
            ));
        }
        Ok(())
    }

    pub fn add(&self, other: &Chain) -> Result<Chain> {
        self.check_compatible(other)?;
        Ok(Self {
            ambient: self.ambient,
            k: self.k,
            cells: symmetric_difference(&self.cells, &other.cells),
        })
    }

    pub fn add_assign(&mut self, other: &Chain) -> Result<()> {
        self.check_compatible(other)?;
        self.cells = symmetric_difference(&self.cells, &other.cells);
        Ok(())
    }

    /// Cells present in both chains.
    pub fn intersection(&self, other: &Chain) -> Chain {
        let cells = self
            .cells
            .iter()
            .filter(|c| other.contains(c))
            .cloned()
            .collect();
        Self {
            ambient: self.ambient,
            k: self.k,
            cells,
        }
    }

    /// The mod-2 sum of the facets of every member cell. A 0-chain maps to
    /// the empty cell with multiplicity equal to its parity.
    pub fn boundary(&self) -> Chain {
        if self.k < 0 {
            return Chain::empty(self.ambient, self.k - 1);
        }
        let faces: Vec<Cell> = self.cells.iter().flat_map(Cell::facets).collect();
        Chain {
            ambient: self.ambient,
            k: self.k - 1,
            cells: reduce_mod2(faces),
        }
    }

    /// True when every `(k-1)`-face of the chain is covered an even number of
    /// times, i.e. the chain is an even complex.
    pub fn is_cycle(&self) -> bool {
        self.boundary().is_empty()
    }

    /// Rejects non-cycles, naming the first odd-degree face.
    pub fn ensure_cycle(&self) -> Result<()> {
        match self.boundary().cells.first() {
            None => Ok(()),
            Some(face) => Err(Error::NotACycle {
                face: face.to_string(),
            }),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ChainRepr {
    family: Family,
    n: usize,
    k: i32,
    cells: Vec<String>,
}

impl Serialize for Chain {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        ChainRepr {
            family: self.ambient.family(),
            n: self.ambient.n(),
            k: self.k,
            cells: self.cells.iter().map(ToString::to_string).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Chain {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let repr = ChainRepr::deserialize(deserializer)?;
        let build = || -> Result<Chain> {
            let ambient = Ambient::new(repr.family, repr.n)?;
            let texts: Vec<&str> = repr.cells.iter().map(String::as_str).collect();
            Chain::parse(ambient, repr.k, &texts)
        };
        build().map_err(serde::de::Error::custom)
    }
}

/// The `k`-skeleton of an ambient polytope.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct SkeletonSpec {
    ambient: Ambient,
    k: usize,
}

impl SkeletonSpec {
    pub fn new(ambient: Ambient, k: usize) -> Result<Self> {
        if k > ambient.n() {
            return domain(format!(
                "skeleton dimension {k} exceeds n = {}",
                ambient.n()
            ));
        }
        Ok(Self { ambient, k })
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

fn index_in(sorted: &[Cell], cell: &Cell) -> usize {
    sorted
        .binary_search(cell)
        .expect("face of a member cell must be enumerated")
}

/// Matrix of `∂_l` with rows and columns ordered by `rows` and `cols`.
fn boundary_matrix_between(rows: &[Cell], cols: &[Cell]) -> Gf2Matrix {
    Gf2Matrix::from_columns(
        rows.len(),
        cols.iter().map(|c| {
            c.facets()
                .into_iter()
                .map(|f| index_in(rows, &f))
                .collect::<Vec<_>>()
        }),
    )
}

/// `∂_l : C_l → C_{l-1}` of the whole ambient, `1 <= l <= n`, in canonical
/// cell order on both sides.
pub fn boundary_matrix(ambient: &Ambient, l: usize) -> Result<Gf2Matrix> {
    if l == 0 || l > ambient.n() {
        return domain(format!(
            "boundary operator index {l} outside 1..={}",
            ambient.n()
        ));
    }
    let rows = enumerate_cells(ambient, l - 1)?;
    let cols = enumerate_cells(ambient, l)?;
    Ok(boundary_matrix_between(&rows, &cols))
}

fn rank_cache() -> &'static Mutex<HashMap<(Ambient, usize), usize>> {
    static CACHE: OnceLock<Mutex<HashMap<(Ambient, usize), usize>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Rank of `∂_l` of the ambient; `∂_0` is taken as zero (unreduced homology).
pub fn boundary_rank(ambient: &Ambient, l: usize) -> Result<usize> {
    if l == 0 {
        return Ok(0);
    }
    if let Some(&r) = rank_cache()
        .lock()
        .expect("rank cache poisoned")
        .get(&(*ambient, l))
    {
        return Ok(r);
    }
    let r = boundary_matrix(ambient, l)?.rank();
    rank_cache()
        .lock()
        .expect("rank cache poisoned")
        .insert((*ambient, l), r);
    Ok(r)
}

/// Z₂ Betti number `b_l` of the skeleton.
pub fn betti(spec: &SkeletonSpec, l: usize) -> Result<usize> {
    if l > spec.k {
        return domain(format!("homology degree {l} outside 0..={}", spec.k));
    }
    let ambient = spec.ambient;
    let cycles = ambient.cell_count(l) as usize - boundary_rank(&ambient, l)?;
    let boundaries = if l < spec.k {
        boundary_rank(&ambient, l + 1)?
    } else {
        0
    };
    Ok(cycles - boundaries)
}

/// A face-closed set of nonempty cells, grouped by dimension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellComplex {
    ambient: Ambient,
    by_dim: Vec<Vec<Cell>>,
}

impl CellComplex {
    /// Builds a complex from `cells`, rejecting sets that are not face-closed.
    pub fn from_cells(ambient: Ambient, cells: impl IntoIterator<Item = Cell>) -> Result<Self> {
        let set: BTreeSet<Cell> = cells.into_iter().filter(|c| *c != Cell::Empty).collect();
        for c in &set {
            ambient.validate(c)?;
            for f in c.facets() {
                if f != Cell::Empty && !set.contains(&f) {
                    return Err(Error::NotClosed {
                        missing: f.to_string(),
                    });
                }
            }
        }
        Ok(Self::from_closed_set(ambient, set))
    }

    fn from_closed_set(ambient: Ambient, set: BTreeSet<Cell>) -> Self {
        let top = set.iter().map(Cell::dim).max().unwrap_or(-1);
        let mut by_dim = vec![Vec::new(); (top + 1) as usize];
        for c in set {
            by_dim[c.dim() as usize].push(c);
        }
        Self { ambient, by_dim }
    }

    /// All faces of all cells of `z`.
    pub fn closure(z: &Chain) -> Self {
        let mut set = BTreeSet::new();
        let mut frontier: Vec<Cell> = z.cells().to_vec();
        while let Some(c) = frontier.pop() {
            if c == Cell::Empty || !set.insert(c.clone()) {
                continue;
            }
            frontier.extend(c.facets());
        }
        Self::from_closed_set(z.ambient(), set)
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    /// Highest cell dimension, `-1` for the empty complex.
    pub fn dim(&self) -> i32 {
        self.by_dim.len() as i32 - 1
    }

    pub fn cells(&self, j: usize) -> &[Cell] {
        self.by_dim.get(j).map_or(&[], Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn contains(&self, cell: &Cell) -> bool {
        cell.dim() >= 0 && self.cells(cell.dim() as usize).binary_search(cell).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Cell> {
        self.by_dim.iter().flatten()
    }

    pub fn intersection(&self, other: &CellComplex) -> CellComplex {
        let set = self.iter().filter(|c| other.contains(c)).cloned().collect();
        Self::from_closed_set(self.ambient, set)
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.by_dim
            .iter()
            .enumerate()
            .map(|(j, cells)| {
                if j % 2 == 0 {
                    cells.len() as i64
                } else {
                    -(cells.len() as i64)
                }
            })
            .sum()
    }

    /// Z₂ Betti numbers `b_0..=b_dim` (unreduced).
    pub fn betti_numbers(&self) -> Vec<usize> {
        let top = self.by_dim.len();
        let ranks: Vec<usize> = (0..=top)
            .map(|l| {
                if l == 0 || l >= top {
                    0
                } else {
                    boundary_matrix_between(&self.by_dim[l - 1], &self.by_dim[l]).rank()
                }
            })
            .collect();
        (0..top)
            .map(|l| self.by_dim[l].len() - ranks[l] - ranks[l + 1])
            .collect()
    }

    /// Connected through shared vertices (via the 1-skeleton).
    pub fn is_connected(&self) -> bool {
        let verts = self.cells(0);
        if verts.is_empty() {
            return false;
        }
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in self.cells(1) {
            let ends: Vec<usize> = e.facets().iter().map(|v| index_in(verts, v)).collect();
            let (a, b) = (find(&mut parent, ends[0]), find(&mut parent, ends[1]));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (1..verts.len()).all(|v| find(&mut parent, v) == root)
    }

    /// Every maximal cell has the top dimension.
    pub fn is_pure(&self) -> bool {
        let top = self.dim();
        if top <= 0 {
            return true;
        }
        let covered: BTreeSet<Cell> = self
            .iter()
            .filter(|c| c.dim() > 0)
            .flat_map(Cell::facets)
            .collect();
        self.iter().all(|c| c.dim() == top || covered.contains(c))
    }

    /// Greedy elementary collapses (remove a free face together with its
    /// unique coface, smallest free face first). True when a single vertex
    /// remains.
    pub fn is_collapsible(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let mut alive: BTreeSet<Cell> = self.iter().cloned().collect();
        let mut cofaces: HashMap<Cell, Vec<Cell>> = HashMap::new();
        for c in self.iter() {
            for f in c.facets() {
                if f != Cell::Empty {
                    cofaces.entry(f).or_default().push(c.clone());
                }
            }
        }
        let live_cofaces = |alive: &BTreeSet<Cell>, c: &Cell| -> Vec<Cell> {
            cofaces.get(c).map_or_else(Vec::new, |cs| {
                cs.iter().filter(|x| alive.contains(*x)).cloned().collect()
            })
        };
        loop {
            let pair = alive.iter().find_map(|sigma| {
                let up = live_cofaces(&alive, sigma);
                match up.as_slice() {
                    [tau] if live_cofaces(&alive, tau).is_empty() => {
                        Some((sigma.clone(), tau.clone()))
                    }
                    _ => None,
                }
            });
            match pair {
                Some((sigma, tau)) => {
                    alive.remove(&sigma);
                    alive.remove(&tau);
                }
                None => break,
            }
        }
        alive.len() == 1
    }
}

/// Euler characteristic of a face-closed cell set; errors name a missing face.
pub fn euler_characteristic(
    ambient: Ambient,
    cells: impl IntoIterator<Item = Cell>,
) -> Result<i64> {
    Ok(CellComplex::from_cells(ambient, cells)?.euler_characteristic())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: usize) -> Ambient {
        Ambient::cube(n).unwrap()
    }

    fn d(n: usize) -> Ambient {
        Ambient::simplex(n).unwrap()
    }

    #[test]
    fn boundary_of_square() {
        let z = Chain::parse(q(3), 2, &["**0"]).unwrap();
        let b = z.boundary();
        let texts: Vec<String> = b.cells().iter().map(ToString::to_string).collect();
        assert_eq!(texts, ["0*0", "1*0", "*00", "*10"]);
    }

    #[test]
    fn boundary_of_cube_boundary_vanishes() {
        let q3 = q(3);
        let shell = Chain::from_cells(q3, 2, q3.parse_cell("***").unwrap().facets()).unwrap();
        assert_eq!(shell.len(), 6);
        assert!(shell.is_cycle());
        assert!(Chain::full_skeleton(q3, 2).unwrap().is_cycle());
    }

    #[test]
    fn boundary_of_vertices_reports_parity() {
        let one = Chain::parse(q(2), 0, &["00"]).unwrap();
        assert_eq!(one.boundary().cells(), &[Cell::Empty]);
        let two = Chain::parse(q(2), 0, &["00", "11"]).unwrap();
        assert!(two.boundary().is_empty());
    }

    #[test]
    fn cube_shell_is_cycle_single_square_is_not() {
        let q4 = q(4);
        let shell = Chain::from_cells(q4, 3, q4.parse_cell("****").unwrap().facets()).unwrap();
        assert_eq!(shell.len(), 8);
        assert!(shell.is_cycle());
        let sq = Chain::parse(q(3), 2, &["**0"]).unwrap();
        assert!(!sq.is_cycle());
        assert!(matches!(sq.ensure_cycle(), Err(Error::NotACycle { .. })));
    }

    #[test]
    fn from_cells_cancels_pairs_and_checks_dimension() {
        let c = Chain::parse(q(3), 2, &["**0", "*0*", "**0"]).unwrap();
        assert_eq!(c.len(), 1);
        assert!(Chain::parse(q(3), 2, &["*00"]).is_err());
        let other = Chain::parse(q(3), 1, &["*00"]).unwrap();
        assert!(c.add(&other).is_err());
    }

    #[test]
    fn betti_examples() {
        let spec = |a, k| SkeletonSpec::new(a, k).unwrap();
        assert_eq!(betti(&spec(q(4), 2), 2).unwrap(), 7);
        assert_eq!(betti(&spec(q(5), 2), 2).unwrap(), 31);
        assert_eq!(betti(&spec(d(4), 2), 2).unwrap(), 4);
        assert_eq!(betti(&spec(q(4), 2), 0).unwrap(), 1);
        assert_eq!(betti(&spec(q(4), 2), 1).unwrap(), 0);
        assert!(betti(&spec(q(4), 2), 3).is_err());
        assert!(SkeletonSpec::new(q(3), 4).is_err());
    }

    #[test]
    fn betti_agrees_with_kernel_dimension() {
        for (a, k) in [(q(4), 2), (q(5), 3), (d(5), 2), (d(6), 3)] {
            let kernel = boundary_matrix(&a, k).unwrap().kernel_basis().len();
            assert_eq!(betti(&SkeletonSpec::new(a, k).unwrap(), k).unwrap(), kernel);
        }
    }

    #[test]
    fn q3_edge_incidence_rank() {
        let m = boundary_matrix(&q(3), 1).unwrap();
        assert_eq!((m.rows(), m.cols()), (8, 12));
        assert_eq!(m.rank(), 7);
    }

    #[test]
    fn closure_examples() {
        let sq = Chain::parse(q(3), 2, &["**0"]).unwrap();
        let cl = CellComplex::closure(&sq);
        assert_eq!(
            (cl.cells(0).len(), cl.cells(1).len(), cl.cells(2).len()),
            (4, 4, 1)
        );
        assert!(CellComplex::closure(&Chain::empty(q(3), 2)).is_empty());

        let shell = Chain::full_skeleton(q(3), 2).unwrap();
        let cl = CellComplex::closure(&shell);
        assert_eq!(cl.len(), 26);
        assert_eq!(cl.euler_characteristic(), 2);
        assert_eq!(cl.betti_numbers(), vec![1, 0, 1]);
        assert!(cl.is_pure());
        assert!(cl.is_connected());
        assert!(!cl.is_collapsible());
    }

    #[test]
    fn euler_of_solid_simplex_and_missing_faces() {
        let d3 = d(3);
        let all: Vec<Cell> = (0..=3)
            .flat_map(|j| enumerate_cells(&d3, j).unwrap())
            .collect();
        assert_eq!(euler_characteristic(d3, all.clone()).unwrap(), 1);
        let solid = CellComplex::from_cells(d3, all).unwrap();
        assert!(solid.is_collapsible());
        assert_eq!(solid.betti_numbers(), vec![1, 0, 0, 0]);

        let broken = vec![
            d3.parse_cell("{1,2}").unwrap(),
            d3.parse_cell("{1}").unwrap(),
        ];
        match euler_characteristic(d3, broken) {
            Err(Error::NotClosed { missing }) => assert_eq!(missing, "{2}"),
            other => panic!("expected NotClosed, got {other:?}"),
        }
    }

    #[test]
    fn purity_detects_dangling_edges() {
        let q2 = q(2);
        let mut cells: Vec<Cell> = CellComplex::closure(&Chain::parse(q2, 2, &["**"]).unwrap())
            .iter()
            .cloned()
            .collect();
        assert!(CellComplex::from_cells(q2, cells.clone())
            .unwrap()
            .is_pure());
        let q3 = q(3);
        cells = CellComplex::closure(&Chain::parse(q3, 2, &["**0"]).unwrap())
            .iter()
            .cloned()
            .collect();
        cells.extend(
            CellComplex::closure(&Chain::parse(q3, 1, &["00*"]).unwrap())
                .iter()
                .cloned(),
        );
        let c = CellComplex::from_cells(q3, cells).unwrap();
        assert!(!c.is_pure());
        assert!(c.is_collapsible());
    }

    fn random_chain(rng: &mut ChaCha8Rng, a: Ambient, k: usize) -> Chain {
        let cells = enumerate_cells(&a, k).unwrap();
        Chain::from_cells(a, k as i32, cells.into_iter().filter(|_| rng.gen_bool(0.5))).unwrap()
    }

    #[test]
    fn boundary_squared_vanishes_on_random_chains() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = rng.gen_range(1..=6);
            let k = rng.gen_range(1..=n);
            let family = if rng.gen_bool(0.5) {
                Family::Cube
            } else {
                Family::Simplex
            };
            let z = random_chain(&mut rng, Ambient::new(family, n).unwrap(), k);
            assert!(z.boundary().boundary().is_empty());
        }
    }

    #[test]
    fn boundary_is_linear_and_cycles_add() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = q(4);
        for _ in 0..50 {
            let x = random_chain(&mut rng, a, 2);
            let y = random_chain(&mut rng, a, 2);
            assert_eq!(
                x.add(&y).unwrap().boundary(),
                x.boundary().add(&y.boundary()).unwrap()
            );
            let (bx, by) = (x.boundary(), y.boundary());
            assert!(bx.add(&by).unwrap().is_cycle());
        }
    }

    #[test]
    fn skeleton_evenness_parity() {
        for n in 2..=7 {
            for k in 1..n {
                for a in [q(n), d(n)] {
                    let full = Chain::full_skeleton(a, k).unwrap();
                    assert_eq!(full.is_cycle(), (n - k) % 2 == 1, "{a:?} k={k}");
                }
            }
        }
    }

    #[test]
    fn chain_json_round_trip() {
        let z = Chain::parse(d(4), 1, &["{1,2}", "{2,5}"]).unwrap();
        let json = serde_json::to_string(&z).unwrap();
        assert_eq!(
            json,
            r#"{"family":"simplex","n":4,"k":1,"cells":["{1,2}","{2,5}"]}"#
        );
        let back: Chain = serde_json::from_str(&json).unwrap();
        assert_eq!(back, z);
        assert!(
            serde_json::from_str::<Chain>(r#"{"family":"cube","n":3,"k":1,"cells":["*0"]}"#)
                .is_err()
        );
    }
}
