//! Command-line front end: JSON in, JSON out, exact arithmetic in between.
//!
//! Exit codes: 0 success, 2 validation failure (a witness is printed in the
//! run report), 3 schema or parse error. Output files are written atomically
//! and are byte-identical across runs for identical inputs and seed.

mod svg;

use clap::{Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::time::Instant;
use tropgeo::geometry::{PolytopalSet, Polytope};
use tropgeo::json::*;
use tropgeo::lattices::BilinearForm;
use tropgeo::linalg::{QVec, ZMat};
use tropgeo::num::{format_q, parse_q, Z};
use tropgeo::plc::{CellRef, PlDomain};

#[derive(Parser)]
#[command(
    name = "tropgeo",
    version,
    about = "Exact tropical and convex geometry toolkit"
)]
struct Cli {
    /// Seed for all randomized constructions (perturbation retries)
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,
    /// Run the module invariant suite on the produced object before writing
    #[arg(long, global = true)]
    verify: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Corner locus of a tropical polynomial inside a window polytope
    Tropicalize {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        window: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Valuation of the supremum norm of a polynomial over a polytope
    Supval {
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        polytope: PathBuf,
    },
    /// Voronoi model function of a lattice under a positive definite form
    VoronoiModel {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Perturbed decomposition generic against a polytope family Σ
    GenericDecomposition {
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long)]
        form: PathBuf,
        #[arg(long)]
        sigma: PathBuf,
        #[arg(long, default_value_t = 3)]
        mmax: u32,
        #[arg(long)]
        out: PathBuf,
    },
    /// Dual complex of a piecewise-linear convex function
    DualComplex {
        #[arg(long)]
        plf: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Toric degree of a PL function at a vertex
    Degree {
        #[arg(long)]
        plf: PathBuf,
        /// JSON file with the vertex coordinates as an array of "p/q"
        #[arg(long)]
        vertex: PathBuf,
        #[arg(long)]
        d: usize,
    },
    /// Validation predicates; exit 2 with a witness on failure
    Check {
        #[command(subcommand)]
        what: CheckCommand,
    },
    /// Canonical piecewise Haar measures
    Measure {
        #[command(subcommand)]
        what: MeasureCommand,
    },
    /// Mixed volume of d polytopes in R^d
    MixedVolume { inputs: Vec<PathBuf> },
    /// Atoms of a tropical cycle covering
    Atoms {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Build and validate a skeleton; report the dimension bound
    Skeleton {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
    },
    /// Static SVG figure of a 2D object
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_parser = ["hypersurface", "complex", "set", "measure"])]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Smith normal form of an integer matrix (debugging aid)
    Snf {
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Index of an integer matrix image inside a target lattice
    Index {
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long)]
        target: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Transversality of a (periodic) complex against a pure-d set
    Transversal {
        #[arg(long)]
        complex: PathBuf,
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Pure dimensionality of a polytopal set
    PureDim {
        #[arg(long)]
        set: PathBuf,
        #[arg(long)]
        dim: usize,
    },
    /// Concavity of a polytopal set at sample points
    Concave {
        #[arg(long)]
        set: PathBuf,
        /// JSON array of points (arrays of "p/q")
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        window: Option<PathBuf>,
    },
    /// Cocycle transformation law of a periodic PL function
    Cocycle {
        #[arg(long)]
        plf: PathBuf,
        #[arg(long)]
        form: PathBuf,
    },
}

#[derive(Subcommand)]
enum MeasureCommand {
    /// Measure on a tropical cycle from its covering simplices
    Cycle {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, num_args = 1..)]
        forms: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measure on a skeleton from per-stratum affine maps
    Skeleton {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        lattice: PathBuf,
        #[arg(long, num_args = 1..)]
        forms: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Serialize)]
struct RunReport {
    verb: String,
    inputs: Vec<FileDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    output: Option<FileDigest>,
    elapsed_ms: u128,
    verified: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<serde_json::Value>,
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

fn digest(path: &Path) -> std::io::Result<FileDigest> {
    let bytes = std::fs::read(path)?;
    let mut h = Sha256::new();
    h.update(&bytes);
    Ok(FileDigest {
        path: path.display().to_string(),
        sha256: hex::encode(h.finalize()),
    })
}

/// Failures carry the exit code: 2 = validation, 3 = schema.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn schema(msg: impl Into<String>) -> Failure {
        Failure {
            code: 3,
            message: msg.into(),
        }
    }
    fn validation(msg: impl Into<String>) -> Failure {
        Failure {
            code: 2,
            message: msg.into(),
        }
    }
}

impl From<tropgeo::Error> for Failure {
    fn from(e: tropgeo::Error) -> Failure {
        match e {
            tropgeo::Error::BadInput(m) => Failure::schema(m),
            tropgeo::Error::DimensionMismatch(a, b) => {
                Failure::schema(format!("dimension mismatch: {a} vs {b}"))
            }
            other => Failure::validation(other.to_string()),
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let bytes =
        std::fs::read(path).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))?;
    serde_json::from_slice(&bytes).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))
}

/// Atomic write: temporary file in the same directory, then rename.
fn write_atomic(path: &Path, contents: &str) -> Result<(), Failure> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| Failure::schema(format!("{}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path).map_err(|e| Failure::schema(format!("{}: {e}", path.display())))?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Failure::schema(e.to_string()))?;
    text.push('\n');
    write_atomic(path, &text)
}

fn read_point(path: &Path) -> Result<QVec, Failure> {
    let raw: Vec<String> = read_json(path)?;
    raw.iter()
        .map(|s| parse_q(s).map_err(Failure::schema))
        .collect()
}

fn read_points(path: &Path) -> Result<Vec<QVec>, Failure> {
    let raw: Vec<Vec<String>> = read_json(path)?;
    raw.iter()
        .map(|p| {
            p.iter()
                .map(|s| parse_q(s).map_err(Failure::schema))
                .collect()
        })
        .collect()
}

fn main() {
    let cli = Cli::parse();
    let started = Instant::now();
    let mut verified: Vec<String> = Vec::new();
    let mut inputs: Vec<PathBuf> = Vec::new();
    let mut output: Option<PathBuf> = None;
    let verb = verb_name(&cli.command);

    let result = run(&cli, &mut inputs, &mut output, &mut verified);
    let (code, payload) = match result {
        Ok(value) => (0, value),
        Err(f) => (f.code, Some(serde_json::json!({ "error": f.message }))),
    };
    let report = RunReport {
        verb,
        inputs: inputs.iter().filter_map(|p| digest(p).ok()).collect(),
        output: output.as_ref().and_then(|p| digest(p).ok()),
        elapsed_ms: started.elapsed().as_millis(),
        verified,
        result: payload,
    };
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("report serializes")
    );
    std::process::exit(code);
}

fn verb_name(c: &Command) -> String {
    match c {
        Command::Tropicalize { .. } => "tropicalize",
        Command::Supval { .. } => "supval",
        Command::VoronoiModel { .. } => "voronoi-model",
        Command::GenericDecomposition { .. } => "generic-decomposition",
        Command::DualComplex { .. } => "dual-complex",
        Command::Degree { .. } => "degree",
        Command::Check { .. } => "check",
        Command::Measure { .. } => "measure",
        Command::MixedVolume { .. } => "mixed-volume",
        Command::Atoms { .. } => "atoms",
        Command::Skeleton { .. } => "skeleton",
        Command::Plot { .. } => "plot",
        Command::Snf { .. } => "snf",
        Command::Index { .. } => "index",
    }
    .to_string()
}

fn run(
    cli: &Cli,
    inputs: &mut Vec<PathBuf>,
    output: &mut Option<PathBuf>,
    verified: &mut Vec<String>,
) -> Result<Option<serde_json::Value>, Failure> {
    match &cli.command {
        Command::Tropicalize { poly, window, out } => {
            inputs.extend([poly.clone(), window.clone()]);
            let f = read_json::<TropicalPolynomialJson>(poly)?.to_polynomial()?;
            let w = read_json::<PolytopeJson>(window)?.to_polytope()?;
            let h = tropgeo::tropical::tropical_hypersurface(&f, &w)?;
            if cli.verify {
                verify_hypersurface(&f, &h, verified)?;
            }
            write_json(out, &HypersurfaceJson::from_hypersurface(&h))?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({
                "cells": h.complex().cells().len(),
                "top_cells": h.complex().cells().iter().filter(|c| c.dim() + 1 == f.dim()).count(),
            })))
        }
        Command::Supval { poly, polytope } => {
            inputs.extend([poly.clone(), polytope.clone()]);
            let f = read_json::<TropicalPolynomialJson>(poly)?.to_polynomial()?;
            let p = read_json::<PolytopeJson>(polytope)?.to_polytope()?;
            let (v, at) = f.sup_valuation(&p);
            Ok(Some(serde_json::json!({
                "sup_valuation": format_q(&v),
                "attained_at": at.iter().map(format_q).collect::<Vec<_>>(),
            })))
        }
        Command::VoronoiModel { lattice, form, out } => {
            inputs.extend([lattice.clone(), form.clone()]);
            let lat = read_json::<LatticeJson>(lattice)?.to_lattice()?;
            let b = read_json::<FormJson>(form)?.to_form()?;
            let (pc, g) = tropgeo::plc::voronoi_model_function(&lat, &b, None)?;
            if cli.verify {
                if !g.ample_check()? {
                    return Err(Failure::validation("voronoi function is not ample"));
                }
                verified.push("ample_check".into());
                let data = tropgeo::plc::CocycleData::from_form(lat.clone(), b.clone(), None)?;
                if !tropgeo::plc::check_cocycle(&g, &data)? {
                    return Err(Failure::validation("cocycle law violated"));
                }
                verified.push("check_cocycle".into());
            }
            write_json(out, &PlFunctionJson::from_function(&g))?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({
                "cell_classes": pc.classes().len(),
                "vertex_classes": pc.open_face_class_count(pc.ambient()),
            })))
        }
        Command::GenericDecomposition {
            lattice,
            form,
            sigma,
            mmax,
            out,
        } => {
            inputs.extend([lattice.clone(), form.clone(), sigma.clone()]);
            let lat = read_json::<LatticeJson>(lattice)?.to_lattice()?;
            let b = read_json::<FormJson>(form)?.to_form()?;
            let sig = read_json::<PolytopalSetJson>(sigma)?.to_set()?;
            let (pc, g) =
                tropgeo::plc::perturb_to_generic(&lat, &b, sig.members(), *mmax, cli.seed)?;
            if cli.verify {
                for m in 1..=*mmax {
                    if tropgeo::plc::is_generic(&pc, sig.members(), m)?.is_some() {
                        return Err(Failure::validation(format!("not generic at m = {m}")));
                    }
                }
                verified.push(format!("is_generic m = 1..{mmax}"));
                // genericity implies transversality against the top members
                if let Some(d) = sig.max_dim() {
                    let tops: Vec<Polytope> = sig
                        .members()
                        .iter()
                        .filter(|p| p.dim() == d)
                        .cloned()
                        .collect();
                    let top_set = PolytopalSet::new(pc.ambient(), tops).map_err(Failure::from)?;
                    if tropgeo::complexes::is_transversal_periodic(&pc, &top_set, d)?.is_some() {
                        return Err(Failure::validation("generic but not transversal"));
                    }
                    verified.push("is_transversal".into());
                }
            }
            write_json(out, &PlFunctionJson::from_function(&g))?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({
                "cell_classes": pc.classes().len(),
            })))
        }
        Command::DualComplex { plf, out } => {
            inputs.push(plf.clone());
            let f = read_json::<PlFunctionJson>(plf)?.to_function()?;
            let dc = tropgeo::plc::dual_complex_of(&f)?;
            if cli.verify {
                verify_dual_complex(&f, verified)?;
            }
            write_json(out, &DualComplexJson::from_dual(&dc))?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({ "dual_cells": dc.cells.len() })))
        }
        Command::Degree { plf, vertex, d } => {
            inputs.extend([plf.clone(), vertex.clone()]);
            let f = read_json::<PlFunctionJson>(plf)?.to_function()?;
            let v = read_point(vertex)?;
            let deg = f.degree_at_vertex(&v, *d)?;
            Ok(Some(serde_json::json!({ "degree": format_q(&deg) })))
        }
        Command::Check { what } => run_check(what, inputs),
        Command::Measure { what } => run_measure(cli, what, inputs, output, verified),
        Command::MixedVolume { inputs: files } => {
            inputs.extend(files.iter().cloned());
            let ps: Result<Vec<Polytope>, Failure> = files
                .iter()
                .map(|p| {
                    read_json::<PolytopeJson>(p)?
                        .to_polytope()
                        .map_err(Failure::from)
                })
                .collect();
            let v = tropgeo::measure::mixed_volume(&ps?)?;
            Ok(Some(serde_json::json!({ "mixed_volume": format_q(&v) })))
        }
        Command::Atoms { input, out } => {
            inputs.push(input.clone());
            let cycle = read_json::<CycleJson>(input)?.to_cycle()?;
            let atoms = tropgeo::measure::atoms(&cycle)?;
            if cli.verify {
                if atoms.iter().any(|a| a.j_set.is_empty()) {
                    return Err(Failure::validation("atom with empty J-set"));
                }
                verified.push("nonempty J-sets".into());
            }
            let out_doc: Vec<serde_json::Value> = atoms
                .iter()
                .map(|a| {
                    serde_json::json!({
                        "j_set": a.j_set,
                        "pieces": a.pieces.iter().map(PolytopeJson::from_polytope).collect::<Vec<_>>(),
                        "volume": format_q(&a.volume()),
                    })
                })
                .collect();
            write_json(out, &out_doc)?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({ "atoms": atoms.len() })))
        }
        Command::Skeleton { input, lattice } => {
            inputs.extend([input.clone(), lattice.clone()]);
            let (skel, raw_maps) = read_json::<SkeletonJson>(input)?.to_skeleton_and_maps()?;
            let lat = read_json::<LatticeJson>(lattice)?.to_lattice()?;
            let maps = tropgeo::measure::skeleton_affine_map(&skel, raw_maps, &lat)?;
            let (bound, witness) = tropgeo::measure::dimension_bound(&skel, &maps);
            Ok(Some(serde_json::json!({
                "strata": skel.strata().len(),
                "dimension_bound": bound,
                "witness_stratum": witness,
                "witness_components": skel.strata()[witness].components.len(),
            })))
        }
        Command::Plot { input, kind, out } => {
            inputs.push(input.clone());
            let svg_text = match kind.as_str() {
                "hypersurface" => {
                    let doc: HypersurfaceJson = read_json(input)?;
                    let cells: Result<Vec<Polytope>, Failure> = doc
                        .cells
                        .iter()
                        .map(|c| c.to_polytope().map_err(Failure::from))
                        .collect();
                    svg::plot_cells(&cells?)?
                }
                "complex" => {
                    let doc: ComplexJson = read_json(input)?;
                    let cells: Result<Vec<Polytope>, Failure> = doc
                        .cells
                        .iter()
                        .map(|c| c.to_polytope().map_err(Failure::from))
                        .collect();
                    svg::plot_cells(&cells?)?
                }
                "set" => {
                    let doc: PolytopalSetJson = read_json(input)?;
                    svg::plot_set(&doc.to_set()?)?
                }
                "measure" => {
                    let doc: MeasureJson = read_json(input)?;
                    svg::plot_measure(&doc.to_measure()?)?
                }
                other => return Err(Failure::schema(format!("unknown plot kind {other}"))),
            };
            write_atomic(out, &svg_text)?;
            *output = Some(out.clone());
            Ok(None)
        }
        Command::Snf { matrix } => {
            inputs.push(matrix.clone());
            let doc: serde_json::Value = read_json(matrix)?;
            let m = zmat_from_value(&doc)?;
            let (u, d, v) = tropgeo::linalg::smith_normal_form(&m);
            Ok(Some(serde_json::json!({
                "U": zmat_to_value(&u),
                "D": zmat_to_value(&d),
                "V": zmat_to_value(&v),
            })))
        }
        Command::Index { matrix, target } => {
            inputs.push(matrix.clone());
            let doc: serde_json::Value = read_json(matrix)?;
            let m = zmat_from_value(&doc)?;
            let lat = match target {
                Some(p) => {
                    inputs.push(p.clone());
                    read_json::<LatticeJson>(p)?.to_lattice()?
                }
                None => tropgeo::lattices::Lattice::standard(m.rows),
            };
            let idx = tropgeo::lattices::index_of_image(&m, &lat)?;
            Ok(Some(serde_json::json!({ "index": idx.to_string() })))
        }
    }
}

fn run_check(
    what: &CheckCommand,
    inputs: &mut Vec<PathBuf>,
) -> Result<Option<serde_json::Value>, Failure> {
    match what {
        CheckCommand::Transversal { complex, set, dim } => {
            inputs.extend([complex.clone(), set.clone()]);
            let cx: ComplexJson = read_json(complex)?;
            let s = read_json::<PolytopalSetJson>(set)?.to_set()?;
            let witness = if cx.lattice_basis.is_some() {
                let pc = cx.to_periodic()?;
                tropgeo::complexes::is_transversal_periodic(&pc, &s, *dim)?
            } else {
                let w = cx.to_window()?;
                tropgeo::complexes::is_transversal_window(&w, &s, *dim)?
            };
            match witness {
                None => Ok(Some(serde_json::json!({ "transversal": true }))),
                Some(cell) => Err(Failure::validation(format!(
                    "not transversal; witness cell with vertices {:?}",
                    PolytopeJson::from_polytope(&cell).vertices
                ))),
            }
        }
        CheckCommand::PureDim { set, dim } => {
            inputs.push(set.clone());
            let s = read_json::<PolytopalSetJson>(set)?.to_set()?;
            let (ok, witnesses) = s.check_pure_dimension(*dim);
            if ok {
                Ok(Some(serde_json::json!({ "pure_dimension": dim })))
            } else {
                Err(Failure::validation(format!(
                    "not pure of dimension {dim}; offending member dims {witnesses:?}"
                )))
            }
        }
        CheckCommand::Concave {
            set,
            samples,
            window,
        } => {
            inputs.extend([set.clone(), samples.clone()]);
            let s = read_json::<PolytopalSetJson>(set)?.to_set()?;
            let pts = read_points(samples)?;
            let w = match window {
                Some(p) => {
                    inputs.push(p.clone());
                    Some(read_json::<PolytopeJson>(p)?.to_polytope()?)
                }
                None => None,
            };
            let report = tropgeo::tropical::check_total_concavity(&s, &pts, w.as_ref())?;
            if report.all_concave {
                Ok(Some(serde_json::json!({
                    "concave_at": report.results.len(),
                    "excluded_boundary": report.excluded_boundary.len(),
                })))
            } else {
                let bad: Vec<Vec<String>> = report
                    .results
                    .iter()
                    .filter(|(_, v)| !v)
                    .map(|(u, _)| u.iter().map(format_q).collect())
                    .collect();
                Err(Failure::validation(format!("not concave at {bad:?}")))
            }
        }
        CheckCommand::Cocycle { plf, form } => {
            inputs.extend([plf.clone(), form.clone()]);
            let f = read_json::<PlFunctionJson>(plf)?.to_function()?;
            let b = read_json::<FormJson>(form)?.to_form()?;
            let PlDomain::Periodic(pc) = f.domain() else {
                return Err(Failure::schema("cocycle checks need a periodic function"));
            };
            let data = tropgeo::plc::CocycleData::from_form(pc.lattice().clone(), b, None)?;
            if tropgeo::plc::check_cocycle(&f, &data)? {
                Ok(Some(serde_json::json!({ "cocycle": true })))
            } else {
                Err(Failure::validation("cocycle law violated"))
            }
        }
    }
}

fn run_measure(
    cli: &Cli,
    what: &MeasureCommand,
    inputs: &mut Vec<PathBuf>,
    output: &mut Option<PathBuf>,
    verified: &mut Vec<String>,
) -> Result<Option<serde_json::Value>, Failure> {
    match what {
        MeasureCommand::Cycle { input, forms, out } => {
            inputs.push(input.clone());
            inputs.extend(forms.iter().cloned());
            let cycle = read_json::<CycleJson>(input)?.to_cycle()?;
            let bs: Result<Vec<BilinearForm>, Failure> = forms
                .iter()
                .map(|p| read_json::<FormJson>(p)?.to_form().map_err(Failure::from))
                .collect();
            let bs = bs?;
            let mu = tropgeo::measure::canonical_measure(&cycle, &bs)?;
            if cli.verify {
                if !mu.is_strictly_positive() {
                    return Err(Failure::validation("nonpositive density"));
                }
                verified.push("strict positivity".into());
                verify_basis_invariance(&cycle, &bs, cli.seed)?;
                verified.push("basis invariance (3 unimodular charts/atom)".into());
            }
            write_json(out, &MeasureJson::from_measure(&mu))?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({
                "pieces": mu.pieces.len(),
                "total_mass": format_q(&mu.total_mass()),
            })))
        }
        MeasureCommand::Skeleton {
            input,
            lattice,
            forms,
            out,
        } => {
            inputs.extend([input.clone(), lattice.clone()]);
            inputs.extend(forms.iter().cloned());
            let (skel, raw_maps) = read_json::<SkeletonJson>(input)?.to_skeleton_and_maps()?;
            let lat = read_json::<LatticeJson>(lattice)?.to_lattice()?;
            let maps = tropgeo::measure::skeleton_affine_map(&skel, raw_maps, &lat)?;
            let bs: Result<Vec<BilinearForm>, Failure> = forms
                .iter()
                .map(|p| read_json::<FormJson>(p)?.to_form().map_err(Failure::from))
                .collect();
            let mu = tropgeo::measure::skeleton_measure(&skel, &maps, &lat, &bs?)?;
            if cli.verify {
                verified.push("support restricted to non-degenerate simplices".into());
            }
            write_json(out, &MeasureJson::from_measure(&mu))?;
            *output = Some(out.clone());
            Ok(Some(serde_json::json!({
                "pieces": mu.pieces.len(),
                "total_mass": format_q(&mu.total_mass()),
            })))
        }
    }
}

fn verify_hypersurface(
    f: &tropgeo::tropical::TropicalPolynomial,
    h: &tropgeo::tropical::TropicalHypersurface,
    verified: &mut Vec<String>,
) -> Result<(), Failure> {
    // pure dimension n-1 unless empty
    if !h.is_empty() {
        let (ok, _) = h.support().check_pure_dimension(f.dim() - 1);
        if !ok {
            return Err(Failure::validation("hypersurface not pure dimensional"));
        }
        verified.push("pure dimension".into());
        let samples = tropgeo::tropical::auto_samples(h);
        let report =
            tropgeo::tropical::check_total_concavity(&h.support(), &samples, Some(h.window()))?;
        if !report.all_concave {
            return Err(Failure::validation("hypersurface not totally concave"));
        }
        verified.push("total concavity at interior samples".into());
    }
    // corner-locus membership oracle on a rational grid
    let (lo, hi) = h.window().bounding_box();
    let quarter = tropgeo::num::qr(1, 4);
    let mut u = lo.clone();
    let mut checked = 0usize;
    'outer: loop {
        let tied = f.val_function(&u).1.len() >= 2;
        if h.contains(&u) != tied {
            return Err(Failure::validation(format!(
                "grid oracle mismatch at {:?}",
                u.iter().map(format_q).collect::<Vec<_>>()
            )));
        }
        checked += 1;
        for i in 0..u.len() {
            u[i] += &quarter;
            if u[i] <= hi[i] {
                continue 'outer;
            }
            u[i] = lo[i].clone();
        }
        break;
    }
    verified.push(format!("grid oracle ({checked} points)"));
    Ok(())
}

fn verify_dual_complex(
    f: &tropgeo::plc::PlConvexFunction,
    verified: &mut Vec<String>,
) -> Result<(), Failure> {
    match f.domain() {
        PlDomain::Periodic(pc) => {
            for (i, c) in pc.classes().iter().enumerate() {
                if c.dim() != 0 {
                    continue;
                }
                let hull = f.dual_cell(&CellRef::Class(i))?;
                let ineq = f.dual_vertex_cell_by_inequalities(&CellRef::Class(i))?;
                if hull != ineq {
                    return Err(Failure::validation(format!(
                        "vertex class {i}: dual cell routes disagree"
                    )));
                }
            }
        }
        PlDomain::Window(cx) => {
            for c in cx.cells().iter().filter(|c| c.dim() == 0) {
                let hull = f.dual_cell(&CellRef::Window(c.clone()))?;
                let ineq = f.dual_vertex_cell_by_inequalities(&CellRef::Window(c.clone()))?;
                if hull != ineq {
                    return Err(Failure::validation("dual cell routes disagree"));
                }
            }
        }
    }
    verified.push("vertex dual cross-validation".into());
    Ok(())
}

fn verify_basis_invariance(
    cycle: &tropgeo::measure::TropicalCycle,
    forms: &[BilinearForm],
    seed: u64,
) -> Result<(), Failure> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let atoms = tropgeo::measure::atoms(cycle)?;
    let d = cycle.dim();
    for atom in &atoms {
        let base = tropgeo::measure::atom_density(cycle, atom, forms, &atom.chart_basis)?;
        for _ in 0..3 {
            let t = random_unimodular(&mut rng, d);
            let chart = atom.chart_basis.mul(&t.to_q());
            let alt = tropgeo::measure::atom_density(cycle, atom, forms, &chart)?;
            if alt != base {
                return Err(Failure::validation("density depends on the chart basis"));
            }
        }
    }
    Ok(())
}

fn random_unimodular(rng: &mut rand_chacha::ChaCha8Rng, d: usize) -> ZMat {
    use rand::Rng;
    // product of random elementary matrices: always determinant ±1
    let mut m = ZMat::identity(d);
    for _ in 0..(3 * d) {
        if d > 1 {
            let i = rng.gen_range(0..d);
            let mut j = rng.gen_range(0..d);
            while j == i {
                j = rng.gen_range(0..d);
            }
            let c: i64 = rng.gen_range(-2..=2);
            let mut e = ZMat::identity(d);
            e[(i, j)] = Z::from(c);
            m = m.mul(&e);
        } else {
            let mut e = ZMat::identity(1);
            if rng.gen_bool(0.5) {
                e[(0, 0)] = Z::from(-1);
            }
            m = m.mul(&e);
        }
    }
    m
}

fn zmat_from_value(v: &serde_json::Value) -> Result<ZMat, Failure> {
    let rows = v
        .get("matrix")
        .and_then(|m| m.as_array())
        .ok_or_else(|| Failure::schema("expected {\"matrix\": [[ints]]}"))?;
    let mut out: Vec<Vec<Z>> = Vec::new();
    for r in rows {
        let r = r
            .as_array()
            .ok_or_else(|| Failure::schema("matrix rows must be arrays"))?;
        out.push(
            r.iter()
                .map(|x| {
                    x.as_i64()
                        .map(Z::from)
                        .ok_or_else(|| Failure::schema("matrix entries must be integers"))
                })
                .collect::<Result<Vec<Z>, Failure>>()?,
        );
    }
    Ok(ZMat::from_rows(out))
}

fn zmat_to_value(m: &ZMat) -> serde_json::Value {
    let rows: Vec<Vec<String>> = (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m[(i, j)].to_string()).collect())
        .collect();
    serde_json::json!(rows)
}
