//! Exact evaluation of the closed-form counts and the identities between them.
//!
//! | name | value |
//! |------|-------|
//! | `s(n,k)` | `Σ_{j=k}^{n-1} C(j,k) 2^{j-k}`, the size of the cube basis |
//! | `m(n,k)` | `(-1)^{k+1} + Σ_{j=0}^{k} (-1)^{k-j} C(n,j) 2^{n-j}`, Euler–Poincaré count for `Q_n^k` |
//! | `m'(n,k)` | `Σ_{j=-1}^{k} (-1)^{k-j} C(n+1,j+1)`, Euler–Poincaré count for `Δ_n^k` |
//! | `C(n,k+1)` | size of the simplex basis |
//! | `bw(n,k)` | `Σ_{i=k}^{n} C(n,i) C(i-1,k-1)` |
//! | `gr(n,k)` | `Σ_{i=k}^{n} (-1)^{k+i} 2^{n-i} C(n,i)` |
//!
//! All arithmetic is arbitrary precision.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{domain, Error, Result};

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

fn pow2(e: usize) -> BigInt {
    BigInt::one() << e
}

fn sign(e: usize) -> BigInt {
    if e.is_multiple_of(2) {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// `s` evaluated on any `n, k >= 0`; empty sums give 0.
pub fn s_formula(n: usize, k: usize) -> BigInt {
    (k..n).map(|j| binomial(j, k) * pow2(j - k)).sum()
}

/// `m` evaluated on any `n, k >= 0` with `k <= n`.
pub fn m_formula(n: usize, k: usize) -> BigInt {
    let tail: BigInt = (0..=k)
        .map(|j| sign(k - j) * binomial(n, j) * pow2(n - j))
        .sum();
    sign(k + 1) + tail
}

fn m_prime_formula(n: usize, k: usize) -> BigInt {
    // j runs from -1; shift by one so that i = j + 1 runs over 0..=k+1
    (0..=k + 1)
        .map(|i| sign(k + 1 - i) * binomial(n + 1, i))
        .sum()
}

fn basis_range(n: usize, k: usize) -> Result<()> {
    if k < 1 || k + 1 > n {
        return domain(format!("need 1 <= k <= n-1, got n = {n}, k = {k}"));
    }
    Ok(())
}

fn bw_range(n: usize, k: usize) -> Result<()> {
    if k < 3 || k > n {
        return domain(format!("need 3 <= k <= n, got n = {n}, k = {k}"));
    }
    Ok(())
}

pub fn s(n: usize, k: usize) -> Result<BigInt> {
    basis_range(n, k)?;
    Ok(s_formula(n, k))
}

pub fn m(n: usize, k: usize) -> Result<BigInt> {
    basis_range(n, k)?;
    Ok(m_formula(n, k))
}

pub fn m_prime(n: usize, k: usize) -> Result<BigInt> {
    basis_range(n, k)?;
    Ok(m_prime_formula(n, k))
}

/// Size of the simplex basis, `C(n, k+1)`.
pub fn simplex_basis_card(n: usize, k: usize) -> Result<BigInt> {
    basis_range(n, k)?;
    Ok(binomial(n, k + 1))
}

pub fn bw(n: usize, k: usize) -> Result<BigInt> {
    bw_range(n, k)?;
    Ok((k..=n)
        .map(|i| binomial(n, i) * binomial(i - 1, k - 1))
        .sum())
}

pub fn gr(n: usize, k: usize) -> Result<BigInt> {
    bw_range(n, k)?;
    Ok((k..=n)
        .map(|i| sign(k + i) * pow2(n - i) * binomial(n, i))
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum CountFn {
    S,
    M,
    MPrime,
    BasisCardSimplex,
    Bw,
    Gr,
}

impl CountFn {
    pub const ALL: [CountFn; 6] = [
        CountFn::S,
        CountFn::M,
        CountFn::MPrime,
        CountFn::BasisCardSimplex,
        CountFn::Bw,
        CountFn::Gr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CountFn::S => "s",
            CountFn::M => "m",
            CountFn::MPrime => "mprime",
            CountFn::BasisCardSimplex => "simplexcard",
            CountFn::Bw => "bw",
            CountFn::Gr => "gr",
        }
    }

    pub fn eval(self, n: usize, k: usize) -> Result<BigInt> {
        match self {
            CountFn::S => s(n, k),
            CountFn::M => m(n, k),
            CountFn::MPrime => m_prime(n, k),
            CountFn::BasisCardSimplex => simplex_basis_card(n, k),
            CountFn::Bw => bw(n, k),
            CountFn::Gr => gr(n, k),
        }
    }

    /// Smallest admissible `k`.
    pub fn min_k(self) -> usize {
        match self {
            CountFn::Bw | CountFn::Gr => 3,
            _ => 1,
        }
    }

    /// Smallest admissible `n` for a given `k`.
    pub fn min_n(self, k: usize) -> usize {
        match self {
            CountFn::Bw | CountFn::Gr => k,
            _ => k + 1,
        }
    }
}

impl fmt::Display for CountFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CountFn {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        match text {
            "s" => Ok(CountFn::S),
            "m" => Ok(CountFn::M),
            "mprime" | "m'" | "m_prime" => Ok(CountFn::MPrime),
            "simplexcard" => Ok(CountFn::BasisCardSimplex),
            "bw" => Ok(CountFn::Bw),
            "gr" => Ok(CountFn::Gr),
            other => domain(format!("unknown count function {other:?}")),
        }
    }
}

/// Outcome of checking an identity over a range of `(n, k)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub name: String,
    pub checked: usize,
    /// First `(n, k)` where the identity fails, scanning `n` then `k` upward.
    pub failure: Option<(usize, usize)>,
}

impl IdentityReport {
    pub fn holds(&self) -> bool {
        self.failure.is_none()
    }
}

fn sweep<F>(name: &str, pairs: impl Iterator<Item = (usize, usize)>, mut holds: F) -> IdentityReport
where
    F: FnMut(usize, usize) -> bool,
{
    let mut checked = 0;
    for (n, k) in pairs {
        checked += 1;
        if !holds(n, k) {
            return IdentityReport {
                name: name.to_string(),
                checked,
                failure: Some((n, k)),
            };
        }
    }
    IdentityReport {
        name: name.to_string(),
        checked,
        failure: None,
    }
}

fn basis_pairs(nmax: usize) -> impl Iterator<Item = (usize, usize)> {
    (2..=nmax).flat_map(|n| (1..n).map(move |k| (n, k)))
}

/// Checks `T(n,k) = 2 T(n-1,k) + T(n-1,k-1)` for `1 <= k <= n-1`, `n <= nmax`,
/// using `table` for every term (including `k = 0` and `k = n-1` boundary
/// terms of row `n-1`).
pub fn recursion_check_with<F>(name: &str, nmax: usize, table: F) -> IdentityReport
where
    F: Fn(usize, usize) -> BigInt,
{
    sweep(name, basis_pairs(nmax), |n, k| {
        table(n, k) == 2 * table(n - 1, k) + table(n - 1, k - 1)
    })
}

/// Recursion check for `s` or `m`; boundary terms come from each function's
/// own defining formula evaluated at `k = 0` (both give `2^n - 1`) and at
/// `k = n` (both give 0).
pub fn recursion_check(t: CountFn, nmax: usize) -> Result<IdentityReport> {
    match t {
        CountFn::S => Ok(recursion_check_with("recursion s", nmax, s_formula)),
        CountFn::M => Ok(recursion_check_with("recursion m", nmax, m_formula)),
        other => domain(format!(
            "recursion check is defined for s and m, not {other}"
        )),
    }
}

/// All identity sweeps: cube and simplex counts up to `nmax`, and the
/// `bw`/`gr` family up to `nmax_bw`.
pub fn verify_identities(nmax: usize, nmax_bw: usize) -> Vec<IdentityReport> {
    let bw_pairs = move || (3..=nmax_bw).flat_map(|n| (3..=n).map(move |k| (n, k)));
    vec![
        sweep("s = m", basis_pairs(nmax), |n, k| {
            s_formula(n, k) == m_formula(n, k)
        }),
        sweep("m' = C(n,k+1)", basis_pairs(nmax), |n, k| {
            m_prime_formula(n, k) == binomial(n, k + 1)
        }),
        recursion_check_with("recursion s", nmax, s_formula),
        recursion_check_with("recursion m", nmax, m_formula),
        sweep("gr = bw", bw_pairs(), |n, k| gr(n, k).ok() == bw(n, k).ok()),
        sweep("bw(n,3) = s(n,2)", (3..=nmax_bw).map(|n| (n, 3)), |n, _| {
            bw(n, 3).ok() == s(n, 2).ok()
        }),
        sweep("bw(n,4) = s(n,3)", (4..=nmax_bw).map(|n| (n, 4)), |n, _| {
            bw(n, 4).ok() == s(n, 3).ok()
        }),
    ]
}

/// `f(n,k)` for `n = min_n(k) ..= nmax`.
pub fn sequence(f: CountFn, k: usize, nmax: usize) -> Result<Vec<BigInt>> {
    if k < f.min_k() {
        return domain(format!("{f} needs k >= {}", f.min_k()));
    }
    (f.min_n(k)..=nmax).map(|n| f.eval(n, k)).collect()
}
