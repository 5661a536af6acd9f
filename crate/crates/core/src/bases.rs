//! The canonical sphere bases of the even k-subcomplexes of `Q_n` and `Δ_n`.
//!
//! Cube: the seed sphere is `∂Q_{k+1}` on the first `k+1` coordinates with
//! every later coordinate fixed at 0. Going from `Q_{L-1}` to `Q_L`, each
//! k-cell `s` of `Q_{L-1}` contributes the sphere `∂(s × [0,1])` extruded
//! along coordinate `L`. Its private face is the far copy `s × {1}`, which no
//! element of a lower level touches.
//!
//! Simplex: one sphere `∂({1} ∪ τ)` per (k+1)-set `τ` avoiding vertex 1, with
//! private face `τ`.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

use itertools::Itertools;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::cells::{enumerate_cells, Ambient, Cell, Coord, Family, SimplexCell};
use crate::complex::{Chain, SkeletonSpec};
use crate::error::{domain, Error, Result};
use crate::gf2::Gf2Matrix;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereBasisElement {
    /// The (k+1)-cell whose boundary is the sphere.
    pub generator: Cell,
    pub chain: Chain,
    /// Cube: number of coordinates in use when the sphere is attached
    /// (`k+1` for the seed, `L` for spheres extruded along coordinate `L`).
    /// Simplex: always 0.
    pub level: usize,
    /// A k-cell of this sphere that no earlier element contains.
    pub private_face: Cell,
}

impl SphereBasisElement {
    fn new(ambient: Ambient, generator: Cell, level: usize, private_face: Cell) -> Self {
        let k = generator.dim() - 1;
        let chain = Chain::from_cells(ambient, k, generator.facets())
            .expect("facets of an ambient cell are valid");
        debug_assert!(chain.contains(&private_face));
        Self {
            generator,
            chain,
            level,
            private_face,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SphereBasis {
    spec: SkeletonSpec,
    elements: Vec<SphereBasisElement>,
}

fn check_range(n: usize, k: usize) -> Result<()> {
    if k < 1 || k + 1 > n {
        return domain(format!(
            "sphere bases need 1 <= k <= n-1, got n = {n}, k = {k}"
        ));
    }
    Ok(())
}

/// `B(n,k)`: the recursively attached cube sphere basis.
pub fn cube_basis(n: usize, k: usize) -> Result<SphereBasis> {
    check_range(n, k)?;
    let ambient = Ambient::cube(n)?;
    let mut elements = Vec::new();

    let mut seed_word = vec![Coord::Free; k + 1];
    seed_word.resize(n, Coord::Zero);
    let seed = Cell::Cube(crate::cells::CubeCell::new(seed_word));
    let seed_private = seed.facets().into_iter().next().expect("a cube has facets");
    elements.push(SphereBasisElement::new(ambient, seed, k + 1, seed_private));

    for level in k + 2..=n {
        let axis = level - 1;
        for s in enumerate_cells(&Ambient::cube(level - 1)?, k)? {
            let s = s
                .as_cube()
                .expect("cube enumeration yields cube cells")
                .embed(n);
            let generator = Cell::Cube(s.with_coord(axis, Coord::Free));
            let private_face = Cell::Cube(s.with_coord(axis, Coord::One));
            elements.push(SphereBasisElement::new(
                ambient,
                generator,
                level,
                private_face,
            ));
        }
    }
    Ok(SphereBasis {
        spec: SkeletonSpec::new(ambient, k)?,
        elements,
    })
}

/// `B'(n,k)`: boundaries of the (k+1)-simplices through vertex 1.
pub fn simplex_basis(n: usize, k: usize) -> Result<SphereBasis> {
    check_range(n, k)?;
    let ambient = Ambient::simplex(n)?;
    let elements = (2..=n as u32 + 1)
        .combinations(k + 1)
        .map(|tau| {
            let private_face = SimplexCell::new(tau).expect("combinations are ascending");
            let generator = private_face
                .with_vertex(1)
                .expect("vertex 1 is absent from tau");
            SphereBasisElement::new(
                ambient,
                Cell::Simplex(generator),
                0,
                Cell::Simplex(private_face),
            )
        })
        .collect();
    Ok(SphereBasis {
        spec: SkeletonSpec::new(ambient, k)?,
        elements,
    })
}

pub fn basis(family: Family, n: usize, k: usize) -> Result<SphereBasis> {
    match family {
        Family::Cube => cube_basis(n, k),
        Family::Simplex => simplex_basis(n, k),
    }
}

impl SphereBasis {
    pub fn spec(&self) -> SkeletonSpec {
        self.spec
    }

    pub fn ambient(&self) -> Ambient {
        self.spec.ambient()
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    pub fn elements(&self) -> &[SphereBasisElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// A copy with element `index` removed.
    pub fn without(&self, index: usize) -> SphereBasis {
        let mut out = self.clone();
        out.elements.remove(index);
        out
    }

    /// True when the element chains together cover every k-cell of the ambient.
    pub fn coverage_check(&self) -> bool {
        let all = match enumerate_cells(&self.ambient(), self.k()) {
            Ok(cells) => cells,
            Err(_) => return false,
        };
        let mut seen = vec![false; all.len()];
        for e in &self.elements {
            for c in e.chain.cells() {
                if let Ok(i) = all.binary_search(c) {
                    seen[i] = true;
                }
            }
        }
        seen.into_iter().all(|b| b)
    }

    /// Column `j` is element `j`'s chain over the canonical k-cells.
    pub fn matrix(&self) -> Result<Gf2Matrix> {
        let rows = enumerate_cells(&self.ambient(), self.k())?;
        Ok(Gf2Matrix::from_columns(
            rows.len(),
            self.elements.iter().map(|e| {
                e.chain
                    .cells()
                    .iter()
                    .map(|c| rows.binary_search(c).expect("k-cell of the ambient"))
                    .collect::<Vec<_>>()
            }),
        ))
    }

    pub fn private_face_index(&self) -> HashMap<Cell, usize> {
        self.elements
            .iter()
            .enumerate()
            .map(|(i, e)| (e.private_face.clone(), i))
            .collect()
    }

    /// Mod-2 sum of the chosen elements.
    pub fn sum<'a>(&self, indices: impl IntoIterator<Item = &'a usize>) -> Result<Chain> {
        let mut acc = Chain::empty(self.ambient(), self.k() as i32);
        for &i in indices {
            let e = self.elements.get(i).ok_or_else(|| {
                Error::Domain(format!("basis index {i} out of range 0..{}", self.len()))
            })?;
            acc.add_assign(&e.chain)?;
        }
        Ok(acc)
    }

    /// Element counts per level.
    pub fn level_census(&self) -> BTreeMap<usize, usize> {
        let mut census = BTreeMap::new();
        for e in &self.elements {
            *census.entry(e.level).or_insert(0) += 1;
        }
        census
    }

    /// Canonical JSON text; identical bases give identical bytes.
    pub fn to_json(&self) -> Result<String> {
        let file = BasisFile {
            family: self.ambient().family(),
            n: self.ambient().n(),
            k: self.k(),
            elements: self
                .elements
                .iter()
                .map(|e| ElementRepr {
                    generator: e.generator.clone(),
                    level: e.level,
                    private_face: e.private_face.clone(),
                    cells: e.chain.cells().to_vec(),
                })
                .collect(),
        };
        Ok(serde_json::to_string(&file)?)
    }

    pub fn from_json(text: &str) -> Result<SphereBasis> {
        let file: BasisFile = serde_json::from_str(text)?;
        let ambient = Ambient::new(file.family, file.n)?;
        let spec = SkeletonSpec::new(ambient, file.k)?;
        let mut elements = Vec::with_capacity(file.elements.len());
        for e in file.elements {
            ambient.validate(&e.generator)?;
            if e.generator.dim() != file.k as i32 + 1 {
                return domain(format!(
                    "generator {} is not a {}-cell",
                    e.generator,
                    file.k + 1
                ));
            }
            let element = SphereBasisElement::new(ambient, e.generator, e.level, e.private_face);
            let stored = Chain::from_cells(ambient, file.k as i32, e.cells)?;
            if stored != element.chain {
                return domain(format!(
                    "stored cells of {} differ from its boundary",
                    element.generator
                ));
            }
            if !element.chain.contains(&element.private_face) {
                return domain(format!(
                    "private face {} not on sphere {}",
                    element.private_face, element.generator
                ));
            }
            elements.push(element);
        }
        Ok(SphereBasis { spec, elements })
    }

    /// Hex SHA-256 of [`SphereBasis::to_json`].
    pub fn content_hash(&self) -> Result<String> {
        Ok(hash_hex(self.to_json()?.as_bytes()))
    }

    /// Writes the JSON file and a `.sha256` sidecar next to it.
    pub fn save(&self, path: &Path) -> Result<()> {
        let json = self.to_json()?;
        fs::write(path, &json)?;
        fs::write(sidecar(path), format!("{}\n", hash_hex(json.as_bytes())))?;
        Ok(())
    }

    /// Reads a basis file, checking it against its `.sha256` sidecar.
    pub fn load(path: &Path) -> Result<SphereBasis> {
        let json = fs::read_to_string(path)?;
        let expected = fs::read_to_string(sidecar(path))?.trim().to_string();
        let found = hash_hex(json.as_bytes());
        if expected != found {
            return Err(Error::HashMismatch {
                path: path.display().to_string(),
                expected,
                found,
            });
        }
        Self::from_json(&json)
    }
}

fn hash_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".sha256");
    PathBuf::from(s)
}

/// File name used for cached bases inside a cache directory.
pub fn cache_file_name(family: Family, n: usize, k: usize) -> String {
    format!("{family}-n{n}-k{k}.json")
}

/// Loads `(family, n, k)` from `dir` when a valid cached copy exists,
/// otherwise builds it and stores it there. A corrupt cache entry is rebuilt.
pub fn load_or_build(dir: &Path, family: Family, n: usize, k: usize) -> Result<SphereBasis> {
    let path = dir.join(cache_file_name(family, n, k));
    if path.exists() {
        if let Ok(b) = SphereBasis::load(&path) {
            if b.ambient().family() == family && b.ambient().n() == n && b.k() == k {
                return Ok(b);
            }
        }
    }
    let b = basis(family, n, k)?;
    fs::create_dir_all(dir)?;
    b.save(&path)?;
    Ok(b)
}

#[derive(Serialize, Deserialize)]
struct ElementRepr {
    generator: Cell,
    level: usize,
    private_face: Cell,
    cells: Vec<Cell>,
}

#[derive(Serialize, Deserialize)]
struct BasisFile {
    family: Family,
    n: usize,
    k: usize,
    elements: Vec<ElementRepr>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::binomial_u128;

    #[test]
    fn cube_examples() {
        let b = cube_basis(3, 2).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b.elements()[0].generator.to_string(), "***");
        assert_eq!(b.elements()[0].chain.len(), 6);
        assert_eq!(cube_basis(4, 2).unwrap().len(), 7);
        assert_eq!(cube_basis(5, 2).unwrap().len(), 31);
        assert_eq!(cube_basis(5, 1).unwrap().len(), 49);
    }

    #[test]
    fn simplex_examples() {
        assert_eq!(simplex_basis(4, 2).unwrap().len(), 4);
        let b = simplex_basis(5, 1).unwrap();
        assert_eq!(b.len(), 10);
        assert!(b
            .elements()
            .iter()
            .all(|e| e.generator.as_simplex().unwrap().contains_vertex(1)));
        for n in 2..8 {
            let top = simplex_basis(n, n - 1).unwrap();
            assert_eq!(top.len(), 1);
            assert_eq!(top.elements()[0].chain.len(), n + 1);
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(cube_basis(3, 3).is_err());
        assert!(cube_basis(3, 0).is_err());
        assert!(simplex_basis(4, 4).is_err());
        assert!(simplex_basis(1, 1).is_err());
    }

    #[test]
    fn element_shapes() {
        for e in cube_basis(5, 2).unwrap().elements() {
            assert_eq!(e.chain.len(), 2 * 3);
            assert!(e.chain.is_cycle());
            assert!(e.chain.contains(&e.private_face));
        }
        for e in simplex_basis(6, 3).unwrap().elements() {
            assert_eq!(e.chain.len(), 3 + 2);
            assert!(e.chain.is_cycle());
            assert!(!e.private_face.as_simplex().unwrap().contains_vertex(1));
        }
    }

    #[test]
    fn intro_example_structure() {
        let b = cube_basis(5, 2).unwrap();
        let census = b.level_census();
        assert_eq!(census.get(&3), Some(&1));
        assert_eq!(census.get(&4), Some(&6));
        assert_eq!(census.get(&5), Some(&24));
        assert_eq!(b.elements()[0].generator.to_string(), "***00");
        // the six cubes erected over the faces of Q(1,2,3) keep x5 = 0
        for e in &b.elements()[1..7] {
            let w = e.generator.to_string();
            assert_eq!(&w[3..], "*0");
        }
    }

    #[test]
    fn level_census_matches_binomial_count() {
        for n in 3..=7 {
            for k in 1..n {
                let census = cube_basis(n, k).unwrap().level_census();
                assert_eq!(census[&(k + 1)], 1);
                for level in k + 2..=n {
                    let expected = binomial_u128(level - 1, k) << (level - 1 - k);
                    assert_eq!(
                        census[&level] as u128, expected,
                        "n={n} k={k} level={level}"
                    );
                }
            }
        }
    }

    #[test]
    fn private_faces_are_unseen_before() {
        for b in [
            cube_basis(6, 2).unwrap(),
            cube_basis(5, 3).unwrap(),
            simplex_basis(7, 3).unwrap(),
        ] {
            let mut seen = std::collections::HashSet::new();
            for e in b.elements() {
                assert!(!seen.contains(&e.private_face), "{} reused", e.private_face);
                seen.extend(e.chain.cells().iter().cloned());
            }
        }
    }

    #[test]
    fn coverage_examples() {
        let b = cube_basis(4, 2).unwrap();
        assert!(b.coverage_check());
        assert!(simplex_basis(4, 2).unwrap().coverage_check());
        let trimmed = b.without(6);
        assert!(!trimmed.coverage_check());
    }

    #[test]
    fn independence_by_rank() {
        for b in [cube_basis(5, 2).unwrap(), simplex_basis(6, 2).unwrap()] {
            assert_eq!(b.matrix().unwrap().rank(), b.len());
        }
    }

    #[test]
    fn json_round_trip_and_hash() {
        let b = cube_basis(4, 2).unwrap();
        let json = b.to_json().unwrap();
        assert_eq!(json, cube_basis(4, 2).unwrap().to_json().unwrap());
        assert!(json.starts_with(r#"{"family":"cube","n":4,"k":2,"elements":[{"generator":"***0","level":3,"private_face":"0**0""#));
        assert_eq!(SphereBasis::from_json(&json).unwrap(), b);

        let s = simplex_basis(4, 2).unwrap();
        assert!(s.to_json().unwrap().contains(r#""generator":[1,2,3,4]"#));
        assert_eq!(SphereBasis::from_json(&s.to_json().unwrap()).unwrap(), s);
        assert_eq!(b.content_hash().unwrap().len(), 64);
    }

    #[test]
    fn save_load_and_tamper_detection() {
        let dir = tempfile::tempdir().unwrap();
        let b = load_or_build(dir.path(), Family::Cube, 4, 2).unwrap();
        let path = dir.path().join(cache_file_name(Family::Cube, 4, 2));
        assert_eq!(SphereBasis::load(&path).unwrap(), b);

        let text = fs::read_to_string(&path)
            .unwrap()
            .replace("\"level\":4", "\"level\":5");
        fs::write(&path, text).unwrap();
        assert!(matches!(
            SphereBasis::load(&path),
            Err(Error::HashMismatch { .. })
        ));
        // the cache rebuilds a corrupt entry
        assert_eq!(load_or_build(dir.path(), Family::Cube, 4, 2).unwrap(), b);
        assert!(SphereBasis::load(&path).is_ok());
    }
}
