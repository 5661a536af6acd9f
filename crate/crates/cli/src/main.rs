use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use spherebasis::bases::{self, SphereBasis};
use spherebasis::complex::betti;
use spherebasis::conjectures::{spanning_tree_check, spanning_tree_sweep};
use spherebasis::counting::{self, CountFn};
use spherebasis::decompose;
use spherebasis::{enumerate_cells, Ambient, Chain, Error, Family, SkeletonSpec};

#[derive(Parser)]
#[command(
    name = "spherebasis",
    version,
    about = "Sphere bases for even subcomplexes of the simplex and the cube over Z2"
)]
struct Cli {
    /// Emit JSON lines instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Write the basis or surface artifact to this file.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
    /// Basis cache directory.
    #[arg(long, global = true, value_name = "DIR")]
    cache: Option<PathBuf>,
    #[command(subcommand)]
    verb: Verb,
}

#[derive(Args, Clone, Copy)]
struct Skeleton {
    #[arg(long)]
    family: Family,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    k: usize,
}

#[derive(Subcommand)]
enum Verb {
    /// List the j-cells of the ambient polytope in canonical order.
    Cells {
        #[arg(long)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        dim: usize,
    },
    /// Z2 Betti numbers of the k-skeleton.
    Betti(Skeleton),
    /// Build the sphere basis of the k-skeleton.
    Basis(Skeleton),
    /// Decompose a k-cycle into basis spheres and check it against the solver.
    Decompose {
        #[command(flatten)]
        skeleton: Skeleton,
        /// Sum a random subset of the basis instead of reading cells.
        #[arg(long, conflicts_with = "cells")]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cells of the cycle, e.g. "{1,2}" or "01*".
        cells: Vec<String>,
    },
    /// Tabulate a count function.
    Counts {
        #[arg(long = "fn", value_name = "NAME")]
        function: CountFn,
        #[arg(long)]
        nmax: usize,
        /// Only this k; default is every admissible k.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Check the count identities over a range.
    Identities {
        #[arg(long, default_value_t = 25)]
        nmax: usize,
        /// Range for the bw/gr identities; defaults to min(nmax, 20).
        #[arg(long)]
        nmax_bw: Option<usize>,
    },
    /// Search B(4,2) for a torus-like sum; --out writes the surface as OFF.
    Torus,
    /// Connected-sum ordering search: every cycle of K_{n+1} for k = 1, or
    /// a random sample otherwise.
    Robust {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value = "simplex")]
        family: Family,
        #[arg(long, default_value_t = decompose::ROBUST_MAX_N)]
        max_n: usize,
        #[arg(long, default_value_t = 1_000_000)]
        budget: usize,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Z2 spanning-tree check of the generator family.
    Treecheck {
        #[arg(long)]
        family: Family,
        #[arg(long, required_unless_present = "nmax")]
        n: Option<usize>,
        #[arg(long, required_unless_present = "kmax")]
        k: Option<usize>,
        /// Sweep 2..=nmax instead of a single n.
        #[arg(long, requires = "kmax")]
        nmax: Option<usize>,
        #[arg(long, requires = "nmax")]
        kmax: Option<usize>,
    },
}

struct Printer {
    json: bool,
    out: io::StdoutLock<'static>,
}

impl Printer {
    fn record(&mut self, value: &Value, human: impl FnOnce() -> String) -> io::Result<()> {
        if self.json {
            writeln!(self.out, "{value}")
        } else {
            writeln!(self.out, "{}", human())
        }
    }

    fn human(&mut self, line: &str) -> io::Result<()> {
        if !self.json {
            writeln!(self.out, "{line}")?;
        }
        Ok(())
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("plain data serializes")
}

fn cell_strings(z: &Chain) -> Vec<String> {
    z.cells().iter().map(ToString::to_string).collect()
}

fn load_basis(cache: Option<&Path>, s: Skeleton) -> spherebasis::Result<SphereBasis> {
    match cache {
        Some(dir) => bases::load_or_build(dir, s.family, s.n, s.k),
        None => bases::basis(s.family, s.n, s.k),
    }
}

fn run(cli: Cli) -> spherebasis::Result<u8> {
    let mut p = Printer {
        json: cli.json,
        out: io::stdout().lock(),
    };
    let cache = cli.cache.as_deref();
    match cli.verb {
        Verb::Cells { family, n, dim } => {
            let ambient = Ambient::new(family, n)?;
            for c in enumerate_cells(&ambient, dim)? {
                p.record(
                    &json!({"family": family, "n": n, "dim": dim, "cell": c.to_string()}),
                    || c.to_string(),
                )?;
            }
        }
        Verb::Betti(s) => {
            let spec = SkeletonSpec::new(Ambient::new(s.family, s.n)?, s.k)?;
            for l in 0..=s.k {
                let b = betti(&spec, l)?;
                p.record(
                    &json!({"family": s.family, "n": s.n, "k": s.k, "l": l, "betti": b}),
                    || format!("b_{l} = {b}"),
                )?;
            }
        }
        Verb::Basis(s) => {
            let basis = load_basis(cache, s)?;
            p.human(&format!(
                "{} basis n={} k={}: {} spheres",
                s.family,
                s.n,
                s.k,
                basis.len()
            ))?;
            for (i, e) in basis.elements().iter().enumerate() {
                let v = json!({
                    "index": i,
                    "generator": e.generator.to_string(),
                    "level": e.level,
                    "private_face": e.private_face.to_string(),
                    "cells": cell_strings(&e.chain),
                });
                p.record(&v, || {
                    format!(
                        "{i:>5}  L{:<3} {:<14} private {}",
                        e.level, e.generator, e.private_face
                    )
                })?;
            }
            if let Some(path) = &cli.out {
                basis.save(path)?;
                p.human(&format!(
                    "wrote {} (sha256 {})",
                    path.display(),
                    basis.content_hash()?
                ))?;
            }
        }
        Verb::Decompose {
            skeleton,
            random,
            seed,
            cells,
        } => {
            let basis = load_basis(cache, skeleton)?;
            let z = if random {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                basis.sum(&decompose::random_indices(&mut rng, basis.len()))?
            } else {
                let texts: Vec<&str> = cells.iter().map(String::as_str).collect();
                Chain::parse(basis.ambient(), skeleton.k as i32, &texts)?
            };
            let oracle = decompose::oracle_decompose(&z, &basis)?;
            let (closed, code) = match decompose::decompose(&z, &basis) {
                Ok(d) => {
                    let agree = d.basis_indices == oracle.basis_indices && oracle.is_success();
                    (Some(d), if agree { 0 } else { 1 })
                }
                Err(Error::NotACycle { face }) => {
                    p.human(&format!("not a cycle: face {face} has odd degree"))?;
                    (None, 1)
                }
                Err(e) => return Err(e),
            };
            let v = json!({
                "seed": seed,
                "input": cell_strings(&z),
                "decomposition": closed.as_ref().map(to_value),
                "oracle": to_value(&oracle),
                "agree": code == 0,
            });
            p.record(&v, || {
                let mut lines = vec![format!("seed {seed}; input has {} cells", z.len())];
                if let Some(d) = &closed {
                    lines.push(format!("{:?}: {:?}", d.method, d.basis_indices));
                }
                lines.push(format!(
                    "solve: {:?}, residual {} cells",
                    oracle.basis_indices,
                    oracle.residual.len()
                ));
                lines.push(format!("agree: {}", code == 0));
                lines.join("\n")
            })?;
            return Ok(code);
        }
        Verb::Counts { function, nmax, k } => {
            let ks: Vec<usize> = match k {
                Some(k) => vec![k],
                None => (function.min_k()..nmax).collect(),
            };
            for k in ks {
                let values = counting::sequence(function, k, nmax)?;
                if values.is_empty() {
                    continue;
                }
                let text: Vec<String> = values.iter().map(ToString::to_string).collect();
                let v = json!({"fn": function.name(), "k": k, "n_start": function.min_n(k), "values": text});
                p.record(&v, || {
                    format!(
                        "{function} k={k} n>={}: {}",
                        function.min_n(k),
                        text.join(" ")
                    )
                })?;
            }
        }
        Verb::Identities { nmax, nmax_bw } => {
            let reports = counting::verify_identities(nmax, nmax_bw.unwrap_or(nmax.min(20)));
            let mut code = 0;
            for r in &reports {
                if !r.holds() {
                    code = 1;
                }
                p.record(&to_value(r), || match r.failure {
                    None => format!("holds  {:<18} ({} cases)", r.name, r.checked),
                    Some((n, k)) => format!("FAILS  {:<18} at n={n} k={k}", r.name),
                })?;
            }
            return Ok(code);
        }
        Verb::Torus => {
            let report = decompose::torus_build()?;
            for c in &report.candidates {
                p.record(&to_value(c), || {
                    format!(
                        "exclude {:?}{}: chi {} betti {:?}",
                        c.excluded,
                        if c.disjoint { " (disjoint)" } else { "" },
                        c.check.euler,
                        c.check.betti
                    )
                })?;
            }
            for (label, t) in [
                ("five_sum", &report.five_sum),
                ("smallest", &report.smallest),
            ] {
                let v = json!({
                    "search": label,
                    "found": t.is_some(),
                    "indices": t.as_ref().map(|t| t.indices.clone()),
                    "squares": t.as_ref().map(|t| t.chain.len()),
                    "check": t.as_ref().map(|t| to_value(&t.check)),
                });
                p.record(&v, || match t {
                    Some(t) => format!(
                        "{label}: indices {:?}, {} squares, chi {}, betti {:?} (Z2 data: torus or Klein bottle)",
                        t.indices,
                        t.chain.len(),
                        t.check.euler,
                        t.check.betti
                    ),
                    None => format!("{label}: no torus-like sum"),
                })?;
            }
            if let (Some(path), Some(t)) = (&cli.out, report.surface()) {
                std::fs::write(path, decompose::off_text(&t.chain)?)?;
                p.human(&format!("wrote {}", path.display()))?;
            }
            return Ok(if report.five_sum.is_some() { 0 } else { 1 });
        }
        Verb::Robust {
            n,
            k,
            family,
            max_n,
            budget,
            samples,
            seed,
        } => {
            if k == 1 && family == Family::Simplex {
                let r = decompose::robust_check_all(n, max_n, budget)?;
                p.record(&to_value(&r), || {
                    format!(
                        "K_{}: {} cycles, {} ordered, {} without ordering, {} inconclusive",
                        n + 1,
                        r.cycles,
                        r.verified,
                        r.failed,
                        r.inconclusive
                    )
                })?;
                return Ok(if r.verified == r.cycles { 0 } else { 1 });
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = decompose::connected_sum_survey(family, n, k, samples, budget, &mut rng)?;
            let mut v = to_value(&s);
            v["seed"] = json!(seed);
            v["experimental"] = json!(true);
            p.record(&v, || {
                format!(
                    "{family} n={n} k={k} seed {seed}: {} of {} samples ordered, {} not, {} inconclusive (experimental)",
                    s.found, s.samples, s.none, s.inconclusive
                )
            })?;
        }
        Verb::Treecheck {
            family,
            n,
            k,
            nmax,
            kmax,
        } => {
            let reports = match (nmax, kmax, n, k) {
                (Some(nmax), Some(kmax), _, _) => spanning_tree_sweep(family, nmax, kmax)?,
                (_, _, Some(n), Some(k)) => vec![spanning_tree_check(family, n, k)?],
                _ => {
                    return Err(Error::Domain(
                        "give --n and --k, or --nmax and --kmax".into(),
                    ))
                }
            };
            let mut code = 0;
            for r in &reports {
                if !r.verdict {
                    code = 1;
                }
                p.record(&to_value(r), || {
                    format!(
                        "{} n={} k={}: |T| = {}, rank = {}, {}: {} ({})",
                        r.family,
                        r.n,
                        r.k,
                        r.facet_count,
                        r.boundary_rank,
                        r.label,
                        r.verdict,
                        r.note
                    )
                })?;
            }
            return Ok(code);
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Domain(_) | Error::Parse { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
