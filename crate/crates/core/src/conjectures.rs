//! Z₂ check of the cellular-spanning-tree conjecture for the generator
//! families `C(n,k)` (cube) and `C'(n,k)` (simplex).
//!
//! A family `T` of `(k+1)`-cells is a Z₂ spanning tree of the
//! `(k+1)`-skeleton when the boundaries of `T` are independent and span the
//! image of `∂_{k+1}`. The integer version also needs torsion conditions,
//! which are not checked here.

use num_traits::ToPrimitive;
use serde::Serialize;

use crate::bases::basis;
use crate::cells::{enumerate_cells, Ambient, Family};
use crate::complex::boundary_rank;
use crate::counting;
use crate::error::{domain, Result};
use crate::gf2::Gf2Matrix;

pub const TREE_LABEL: &str = "Z₂ spanning tree";
pub const TREE_NOTE: &str = "integer homology and torsion conditions are not checked";

pub const MAX_N_CUBE: usize = 8;
pub const MAX_N_SIMPLEX: usize = 10;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TreeCheckReport {
    pub family: Family,
    pub n: usize,
    pub k: usize,
    /// `|T|`.
    pub facet_count: usize,
    /// Rank of `∂_{k+1}` on the whole `(k+1)`-skeleton.
    pub boundary_rank: usize,
    /// Rank of `∂_{k+1}` restricted to the columns of `T`.
    pub t_rank: usize,
    pub independent: bool,
    /// `|T|` agrees with `s(n,k)` (cube) or `C(n,k+1)` (simplex).
    pub count_formula_matches: bool,
    pub verdict: bool,
    pub label: &'static str,
    pub note: &'static str,
}

/// Builds `T` from the basis generators and compares the rank of its
/// boundary columns with the full rank of `∂_{k+1}`.
pub fn spanning_tree_check(family: Family, n: usize, k: usize) -> Result<TreeCheckReport> {
    let limit = match family {
        Family::Cube => MAX_N_CUBE,
        Family::Simplex => MAX_N_SIMPLEX,
    };
    if n > limit {
        return domain(format!(
            "spanning-tree check refused for {family} n = {n}: bound is {limit}"
        ));
    }
    let b = basis(family, n, k)?;
    let ambient = Ambient::new(family, n)?;
    let rows = enumerate_cells(&ambient, k)?;
    // boundary columns straight from the generators, not from the stored chains
    let columns = b.elements().iter().map(|e| {
        e.generator
            .facets()
            .into_iter()
            .map(|f| rows.binary_search(&f).expect("k-face of ambient"))
    });
    let t = Gf2Matrix::from_columns(rows.len(), columns);
    let facet_count = b.len();
    let t_rank = t.rank();
    let full = boundary_rank(&ambient, k + 1)?;
    let expected = match family {
        Family::Cube => counting::s(n, k)?,
        Family::Simplex => counting::simplex_basis_card(n, k)?,
    };
    let independent = t_rank == facet_count;
    Ok(TreeCheckReport {
        family,
        n,
        k,
        facet_count,
        boundary_rank: full,
        t_rank,
        independent,
        count_formula_matches: expected.to_usize() == Some(facet_count),
        verdict: independent && facet_count == full,
        label: TREE_LABEL,
        note: TREE_NOTE,
    })
}

/// One report per `(n,k)` with `2 <= n <= nmax`, `1 <= k <= min(kmax, n-1)`.
pub fn spanning_tree_sweep(
    family: Family,
    nmax: usize,
    kmax: usize,
) -> Result<Vec<TreeCheckReport>> {
    let mut out = Vec::new();
    for n in 2..=nmax {
        for k in 1..=kmax.min(n - 1) {
            out.push(spanning_tree_check(family, n, k)?);
        }
    }
    Ok(out)
}
