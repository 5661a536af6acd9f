//! Faces of the n-simplex and the n-cube.
//!
//! A face of `Q_n` is a word of length `n` over `{0, 1, *}`: a `*` marks a
//! free coordinate, `0`/`1` a fixed one. A face of `Δ_n` is a nonempty
//! ascending set of vertex labels drawn from `1..=n+1`. Both families also
//! share a single empty cell of dimension `-1`.
//!
//! Canonical order is the derived `Ord`: words compare lexicographically with
//! `0 < 1 < *`, vertex sets compare as ascending vectors.

use std::fmt;

use itertools::Itertools;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{domain, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Simplex,
    Cube,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Simplex => f.write_str("simplex"),
            Family::Cube => f.write_str("cube"),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simplex" => Ok(Family::Simplex),
            "cube" => Ok(Family::Cube),
            other => domain(format!("unknown family {other:?}")),
        }
    }
}

/// The ambient polytope: `Δ_n` or `Q_n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Ambient {
    family: Family,
    n: usize,
}

impl Ambient {
    pub fn new(family: Family, n: usize) -> Result<Self> {
        if n == 0 {
            return domain("ambient dimension must be at least 1");
        }
        Ok(Self { family, n })
    }

    pub fn simplex(n: usize) -> Result<Self> {
        Self::new(Family::Simplex, n)
    }

    pub fn cube(n: usize) -> Result<Self> {
        Self::new(Family::Cube, n)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Checks that `cell` is a face of this polytope.
    pub fn validate(&self, cell: &Cell) -> Result<()> {
        match (self.family, cell) {
            (_, Cell::Empty) => Ok(()),
            (Family::Cube, Cell::Cube(c)) if c.len() == self.n => Ok(()),
            (Family::Cube, Cell::Cube(c)) => domain(format!(
                "cube cell {c} has length {}, ambient Q_{} needs {}",
                c.len(),
                self.n,
                self.n
            )),
            (Family::Simplex, Cell::Simplex(s)) => match s.vertices().last() {
                Some(&v) if v as usize > self.n + 1 => domain(format!(
                    "vertex {v} of {s} outside 1..={} of Δ_{}",
                    self.n + 1,
                    self.n
                )),
                _ => Ok(()),
            },
            (family, cell) => domain(format!("cell {cell} is not a {family} cell")),
        }
    }

    /// Parses a cell in this ambient's codec.
    pub fn parse_cell(&self, text: &str) -> Result<Cell> {
        let cell = match self.family {
            Family::Cube => parse_cube(text, Some(self.n))?,
            Family::Simplex => parse_simplex(text, Some(self.n))?,
        };
        Ok(cell)
    }

    /// Number of `j`-cells of the polytope.
    pub fn cell_count(&self, j: usize) -> u128 {
        match self.family {
            Family::Cube => {
                if j > self.n {
                    0
                } else {
                    binomial_u128(self.n, j) << (self.n - j)
                }
            }
            Family::Simplex => binomial_u128(self.n + 1, j + 1),
        }
    }
}

pub(crate) fn binomial_u128(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// One coordinate of a cube word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Coord {
    Zero,
    One,
    Free,
}

impl Coord {
    fn symbol(self) -> char {
        match self {
            Coord::Zero => '0',
            Coord::One => '1',
            Coord::Free => '*',
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CubeCell {
    word: Box<[Coord]>,
}

impl CubeCell {
    pub fn new(word: impl Into<Box<[Coord]>>) -> Self {
        Self { word: word.into() }
    }

    pub fn word(&self) -> &[Coord] {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.word.iter().filter(|&&c| c == Coord::Free).count()
    }

    /// Returns a copy with coordinate `i` (0-based) replaced.
    pub fn with_coord(&self, i: usize, c: Coord) -> Self {
        let mut word = self.word.to_vec();
        word[i] = c;
        Self::new(word)
    }

    /// Pads the word with fixed-0 coordinates up to length `n`.
    pub fn embed(&self, n: usize) -> Self {
        let mut word = self.word.to_vec();
        word.resize(n.max(word.len()), Coord::Zero);
        Self::new(word)
    }

    /// For a vertex, its 0/1 coordinates.
    pub fn vertex_coords(&self) -> Option<Vec<u8>> {
        self.word
            .iter()
            .map(|c| match c {
                Coord::Zero => Some(0),
                Coord::One => Some(1),
                Coord::Free => None,
            })
            .collect()
    }

    fn faces(&self, j: usize) -> Vec<CubeCell> {
        let d = self.dim();
        let mut out = Vec::new();
        let mut word = self.word.to_vec();
        cube_faces_rec(&self.word, 0, d - j, &mut word, &mut out);
        out
    }
}

// Walks the word left to right; at each free slot either keep it or fix it
// to 0/1 while fixes remain. Emits in canonical order.
fn cube_faces_rec(
    src: &[Coord],
    pos: usize,
    to_fix: usize,
    word: &mut Vec<Coord>,
    out: &mut Vec<CubeCell>,
) {
    if pos == src.len() {
        if to_fix == 0 {
            out.push(CubeCell::new(word.clone()));
        }
        return;
    }
    if src[pos] != Coord::Free {
        cube_faces_rec(src, pos + 1, to_fix, word, out);
        return;
    }
    let free_after = src[pos + 1..].iter().filter(|&&c| c == Coord::Free).count();
    if to_fix > 0 {
        for c in [Coord::Zero, Coord::One] {
            word[pos] = c;
            cube_faces_rec(src, pos + 1, to_fix - 1, word, out);
        }
    }
    if free_after >= to_fix {
        word[pos] = Coord::Free;
        cube_faces_rec(src, pos + 1, to_fix, word, out);
    }
}

impl fmt::Display for CubeCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.word.iter() {
            write!(f, "{}", c.symbol())?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexCell {
    vertices: Box<[u32]>,
}

impl SimplexCell {
    /// Builds a cell from a strictly ascending, nonempty set of labels `>= 1`.
    pub fn new(vertices: impl Into<Box<[u32]>>) -> Result<Self> {
        let vertices = vertices.into();
        if vertices.is_empty() {
            return domain("simplex cell needs at least one vertex");
        }
        if vertices[0] == 0 {
            return domain("simplex vertices are labelled from 1");
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return domain(format!(
                "simplex vertices {vertices:?} are not strictly ascending"
            ));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn contains_vertex(&self, v: u32) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    /// The join with vertex `v`, or `None` if `v` is already present.
    pub fn with_vertex(&self, v: u32) -> Option<Self> {
        match self.vertices.binary_search(&v) {
            Ok(_) => None,
            Err(at) => {
                let mut vs = self.vertices.to_vec();
                vs.insert(at, v);
                Some(Self {
                    vertices: vs.into(),
                })
            }
        }
    }

    pub fn without_vertex(&self, v: u32) -> Option<Cell> {
        let at = self.vertices.binary_search(&v).ok()?;
        if self.vertices.len() == 1 {
            return Some(Cell::Empty);
        }
        let mut vs = self.vertices.to_vec();
        vs.remove(at);
        Some(Cell::Simplex(Self {
            vertices: vs.into(),
        }))
    }
}

impl fmt::Display for SimplexCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.vertices.iter().join(","))
    }
}

/// A face of `Δ_n` or `Q_n`, or the empty cell.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cell {
    Empty,
    Cube(CubeCell),
    Simplex(SimplexCell),
}

impl Cell {
    pub fn dim(&self) -> i32 {
        match self {
            Cell::Empty => -1,
            Cell::Cube(c) => c.dim() as i32,
            Cell::Simplex(s) => s.dim() as i32,
        }
    }

    pub fn as_cube(&self) -> Option<&CubeCell> {
        match self {
            Cell::Cube(c) => Some(c),
            _ => None,
        }
    }

    pub fn as_simplex(&self) -> Option<&SimplexCell> {
        match self {
            Cell::Simplex(s) => Some(s),
            _ => None,
        }
    }

    /// All `j`-dimensional faces in canonical order, `-1 <= j <= dim`.
    pub fn faces(&self, j: i32) -> Result<Vec<Cell>> {
        let d = self.dim();
        if j < -1 || j > d {
            return domain(format!("face dimension {j} outside -1..={d} for {self}"));
        }
        if j == -1 {
            return Ok(vec![Cell::Empty]);
        }
        let j = j as usize;
        Ok(match self {
            Cell::Empty => unreachable!("dim -1 handled above"),
            Cell::Cube(c) => c.faces(j).into_iter().map(Cell::Cube).collect(),
            Cell::Simplex(s) => s
                .vertices
                .iter()
                .copied()
                .combinations(j + 1)
                .map(|vs| {
                    Cell::Simplex(SimplexCell {
                        vertices: vs.into(),
                    })
                })
                .collect(),
        })
    }

    /// The codimension-one faces (`dim - 1`), in canonical order.
    pub fn facets(&self) -> Vec<Cell> {
        match self {
            Cell::Empty => Vec::new(),
            _ => self
                .faces(self.dim() - 1)
                .expect("dim - 1 is always in range"),
        }
    }

    /// True when `self` is a face of `other` (including equality).
    pub fn is_face_of(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Empty, _) => true,
            (Cell::Cube(a), Cell::Cube(b)) => {
                a.len() == b.len()
                    && a.word
                        .iter()
                        .zip(b.word.iter())
                        .all(|(x, y)| *y == Coord::Free || x == y)
            }
            (Cell::Simplex(a), Cell::Simplex(b)) => {
                a.vertices.iter().all(|v| b.contains_vertex(*v))
            }
            _ => false,
        }
    }

    /// The `(dim+1)`-cells of `ambient` having `self` as a facet.
    pub fn cofaces(&self, ambient: &Ambient) -> Result<Vec<Cell>> {
        ambient.validate(self)?;
        if self.dim() + 1 > ambient.n() as i32 {
            return domain(format!(
                "{self} has no cofaces in an ambient of dimension {}",
                ambient.n()
            ));
        }
        let mut out: Vec<Cell> = match (self, ambient.family()) {
            (Cell::Empty, _) => enumerate_cells(ambient, 0)?,
            (Cell::Cube(c), _) => c
                .word
                .iter()
                .enumerate()
                .filter(|(_, &x)| x != Coord::Free)
                .map(|(i, _)| Cell::Cube(c.with_coord(i, Coord::Free)))
                .collect(),
            (Cell::Simplex(s), _) => (1..=ambient.n() as u32 + 1)
                .filter_map(|v| s.with_vertex(v))
                .map(Cell::Simplex)
                .collect(),
        };
        out.sort();
        Ok(out)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Empty => f.write_str("{}"),
            Cell::Cube(c) => c.fmt(f),
            Cell::Simplex(s) => s.fmt(f),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Cell::Simplex(s) => s.vertices.serialize(serializer),
            other => serializer.collect_str(other),
        }
    }
}

impl<'de> Deserialize<'de> for Cell {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Vertices(Vec<u32>),
        }
        let parsed = match Repr::deserialize(deserializer)? {
            Repr::Text(t) if t.trim_start().starts_with('{') => parse_simplex(&t, None),
            Repr::Text(t) => parse_cube(&t, None),
            Repr::Vertices(vs) if vs.is_empty() => Ok(Cell::Empty),
            Repr::Vertices(vs) => SimplexCell::new(vs).map(Cell::Simplex),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

fn parse_error<T>(position: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse {
        position,
        message: message.into(),
    })
}

/// Parses a cube word; positions in errors are 1-based character offsets.
fn parse_cube(text: &str, n: Option<usize>) -> Result<Cell> {
    if text.trim() == "{}" {
        return Ok(Cell::Empty);
    }
    let mut word = Vec::with_capacity(text.len());
    for (i, ch) in text.chars().enumerate() {
        let c = match ch {
            '0' => Coord::Zero,
            '1' => Coord::One,
            '*' => Coord::Free,
            other => {
                return parse_error(i + 1, format!("unexpected {other:?}, expected 0, 1 or *"))
            }
        };
        if let Some(n) = n {
            if i >= n {
                return parse_error(i + 1, format!("word longer than n = {n}"));
            }
        }
        word.push(c);
    }
    if word.is_empty() {
        return parse_error(1, "empty cube word");
    }
    if let Some(n) = n {
        if word.len() < n {
            return parse_error(word.len() + 1, format!("word shorter than n = {n}"));
        }
    }
    Ok(Cell::Cube(CubeCell::new(word)))
}

/// Parses `{i1,i2,...}`; whitespace around labels is ignored.
fn parse_simplex(text: &str, n: Option<usize>) -> Result<Cell> {
    let chars: Vec<char> = text.chars().collect();
    let open = chars.iter().position(|c| !c.is_whitespace()).unwrap_or(0);
    if chars.get(open) != Some(&'{') {
        return parse_error(open + 1, "expected '{'");
    }
    let close = chars.iter().rposition(|c| !c.is_whitespace()).unwrap_or(0);
    if close <= open || chars[close] != '}' {
        return parse_error(close + 1, "expected '}'");
    }
    let body: String = chars[open + 1..close].iter().collect();
    if body.trim().is_empty() {
        return Ok(Cell::Empty);
    }
    let mut vertices: Vec<u32> = Vec::new();
    let mut offset = open + 1;
    for part in body.split(',') {
        let lead = part.chars().take_while(|c| c.is_whitespace()).count();
        let pos = offset + lead + 1;
        let label = part.trim();
        let v: u32 = match label.parse() {
            Ok(v) => v,
            Err(_) => return parse_error(pos, format!("expected a vertex label, found {label:?}")),
        };
        if v == 0 {
            return parse_error(pos, "vertex labels start at 1");
        }
        if let Some(n) = n {
            if v as usize > n + 1 {
                return parse_error(pos, format!("vertex {v} outside 1..={}", n + 1));
            }
        }
        if vertices.last().is_some_and(|&prev| prev >= v) {
            return parse_error(pos, format!("vertex {v} breaks strictly ascending order"));
        }
        vertices.push(v);
        offset += part.chars().count() + 1;
    }
    Ok(Cell::Simplex(SimplexCell {
        vertices: vertices.into(),
    }))
}

/// All `j`-cells of the ambient in canonical order.
pub fn enumerate_cells(ambient: &Ambient, j: usize) -> Result<Vec<Cell>> {
    let n = ambient.n();
    if j > n {
        return domain(format!("cell dimension {j} outside 0..={n}"));
    }
    Ok(match ambient.family() {
        Family::Cube => {
            let mut out = Vec::with_capacity(ambient.cell_count(j) as usize);
            let mut word = vec![Coord::Zero; n];
            enumerate_words(0, j, &mut word, &mut out);
            out
        }
        Family::Simplex => (1..=n as u32 + 1)
            .combinations(j + 1)
            .map(|vs| {
                Cell::Simplex(SimplexCell {
                    vertices: vs.into(),
                })
            })
            .collect(),
    })
}

fn enumerate_words(pos: usize, stars: usize, word: &mut Vec<Coord>, out: &mut Vec<Cell>) {
    let remaining = word.len() - pos;
    if remaining == 0 {
        out.push(Cell::Cube(CubeCell::new(word.clone())));
        return;
    }
    if remaining > stars {
        for c in [Coord::Zero, Coord::One] {
            word[pos] = c;
            enumerate_words(pos + 1, stars, word, out);
        }
    }
    if stars > 0 {
        word[pos] = Coord::Free;
        enumerate_words(pos + 1, stars - 1, word, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube(text: &str) -> Cell {
        parse_cube(text, None).unwrap()
    }

    fn texts(cells: &[Cell]) -> Vec<String> {
        cells.iter().map(|c| c.to_string()).collect()
    }

    #[test]
    fn codec_examples() {
        let q3 = Ambient::cube(3).unwrap();
        let c = q3.parse_cell("**0").unwrap();
        assert_eq!(c.dim(), 2);
        assert_eq!(c.to_string(), "**0");

        let d4 = Ambient::simplex(4).unwrap();
        let s = d4.parse_cell("{1,3,5}").unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.to_string(), "{1,3,5}");
        assert_eq!(d4.parse_cell(" { 1, 3 ,5 } ").unwrap(), s);

        match q3.parse_cell("0*2") {
            Err(Error::Parse { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn codec_errors_name_position() {
        let q3 = Ambient::cube(3).unwrap();
        let d4 = Ambient::simplex(4).unwrap();
        let pos = |r: Result<Cell>| match r {
            Err(Error::Parse { position, .. }) => position,
            other => panic!("expected parse error, got {other:?}"),
        };
        assert_eq!(pos(q3.parse_cell("0*")), 3);
        assert_eq!(pos(q3.parse_cell("0*01")), 4);
        assert_eq!(pos(d4.parse_cell("{1,6}")), 4);
        assert_eq!(pos(d4.parse_cell("{1,3,2}")), 6);
        assert_eq!(pos(d4.parse_cell("{1,x}")), 4);
        assert_eq!(pos(d4.parse_cell("1,2}")), 1);
        assert_eq!(pos(d4.parse_cell("{1,2")), 4);
    }

    #[test]
    fn cube_faces_examples() {
        let got = cube("**0").faces(1).unwrap();
        assert_eq!(texts(&got), ["0*0", "1*0", "*00", "*10"]);
        let verts = cube("***").faces(0).unwrap();
        assert_eq!(verts.len(), 8);
        assert!(verts.iter().all(|v| v.dim() == 0));
        assert_eq!(cube("**0").faces(-1).unwrap(), vec![Cell::Empty]);
        assert!(cube("**0").faces(3).is_err());
        assert!(cube("**0").faces(-2).is_err());
    }

    #[test]
    fn simplex_faces_example() {
        let d = Ambient::simplex(3).unwrap();
        let s = d.parse_cell("{1,2,3}").unwrap();
        assert_eq!(texts(&s.faces(1).unwrap()), ["{1,2}", "{1,3}", "{2,3}"]);
    }

    #[test]
    fn coface_examples() {
        let q3 = Ambient::cube(3).unwrap();
        let got = cube("*00").cofaces(&q3).unwrap();
        assert_eq!(texts(&got), ["*0*", "**0"]);

        let d3 = Ambient::simplex(3).unwrap();
        let e = d3.parse_cell("{1,2}").unwrap();
        assert_eq!(texts(&e.cofaces(&d3).unwrap()), ["{1,2,3}", "{1,2,4}"]);

        let q4 = Ambient::cube(4).unwrap();
        assert_eq!(cube("0000").cofaces(&q4).unwrap().len(), 4);

        // not a face of Q_4
        assert!(cube("000").cofaces(&q4).is_err());
        assert!(cube("****").cofaces(&q4).is_err());
    }

    #[test]
    fn enumeration_examples() {
        let count = |a: Ambient, j| enumerate_cells(&a, j).unwrap().len();
        assert_eq!(count(Ambient::cube(3).unwrap(), 1), 12);
        assert_eq!(count(Ambient::cube(5).unwrap(), 2), 80);
        assert_eq!(count(Ambient::simplex(4).unwrap(), 2), 10);
        assert!(enumerate_cells(&Ambient::cube(3).unwrap(), 4).is_err());
    }

    #[test]
    fn enumeration_is_sorted_and_matches_counts() {
        for n in 1..=10 {
            for family in [Family::Cube, Family::Simplex] {
                let a = Ambient::new(family, n).unwrap();
                for j in 0..=n {
                    let cells = enumerate_cells(&a, j).unwrap();
                    assert_eq!(cells.len() as u128, a.cell_count(j), "{family} n={n} j={j}");
                    assert!(cells.windows(2).all(|w| w[0] < w[1]));
                }
            }
        }
    }

    #[test]
    fn canonical_order_puts_star_last() {
        assert!(cube("0*") < cube("1*"));
        assert!(cube("1*") < cube("*0"));
    }

    #[test]
    fn json_representation() {
        let d = Ambient::simplex(4).unwrap();
        let s = d.parse_cell("{1,3,5}").unwrap();
        assert_eq!(serde_json::to_string(&s).unwrap(), "[1,3,5]");
        assert_eq!(serde_json::to_string(&cube("*01")).unwrap(), "\"*01\"");
        let back: Cell = serde_json::from_str("[1,3,5]").unwrap();
        assert_eq!(back, s);
        let back: Cell = serde_json::from_str("\"*01\"").unwrap();
        assert_eq!(back, cube("*01"));
        assert!(serde_json::from_str::<Cell>("[3,1]").is_err());
    }

    #[test]
    fn ambient_rejects_zero_dimension() {
        assert!(Ambient::cube(0).is_err());
    }
}
