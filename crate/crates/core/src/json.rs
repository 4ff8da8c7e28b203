//! Serde schemas for every file format the CLI reads and writes. Rationals
//! are always "p/q" strings, never floats; re-parsing an emitted document
//! reproduces the in-memory value exactly.

use crate::geometry::{Halfspace, PolytopalSet, Polytope};
use crate::lattices::{AffineMap, BilinearForm, Lattice};
use crate::linalg::{QMat, QVec, ZMat};
use crate::measure::{
    CycleSimplex, MeasurePiece, PiecewiseHaarMeasure, Skeleton, Stratum, TropicalCycle,
};
use crate::num::{format_q, parse_q, Q, Z};
use crate::plc::{Piece, PlConvexFunction, PlDomain};
use crate::tropical::{TropicalHypersurface, TropicalPolynomial};
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

fn bad(msg: impl Into<String>) -> Error {
    Error::BadInput(msg.into())
}

fn q_to_string(x: &Q) -> String {
    format_q(x)
}

fn q_from_string(s: &str) -> Result<Q> {
    parse_q(s).map_err(bad)
}

fn vec_to_strings(v: &[Q]) -> Vec<String> {
    v.iter().map(q_to_string).collect()
}

fn vec_from_strings(v: &[String]) -> Result<QVec> {
    v.iter().map(|s| q_from_string(s)).collect()
}

fn mat_to_strings(m: &QMat) -> Vec<Vec<String>> {
    (0..m.rows).map(|i| vec_to_strings(&m.row(i))).collect()
}

fn mat_from_strings(rows: &[Vec<String>]) -> Result<QMat> {
    let parsed: Result<Vec<QVec>> = rows.iter().map(|r| vec_from_strings(r)).collect();
    Ok(QMat::from_rows(parsed?))
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HalfspaceJson {
    pub normal: Vec<i64>,
    pub offset: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PolytopeJson {
    pub ambient_dim: usize,
    pub vertices: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub halfspaces: Vec<HalfspaceJson>,
}

impl PolytopeJson {
    pub fn from_polytope(p: &Polytope) -> PolytopeJson {
        // halfspaces are redundant data (vertices determine the polytope);
        // omit them rather than truncate if a normal overflows the schema
        let halfspaces = p
            .facets()
            .iter()
            .map(|h| {
                let normal: Option<Vec<i64>> = h.normal.iter().map(|z| z.try_into().ok()).collect();
                normal.map(|normal| HalfspaceJson {
                    normal,
                    offset: q_to_string(&h.offset),
                })
            })
            .collect::<Option<Vec<_>>>()
            .unwrap_or_default();
        PolytopeJson {
            ambient_dim: p.ambient(),
            vertices: p.vertices().iter().map(|v| vec_to_strings(v)).collect(),
            halfspaces,
        }
    }

    /// Rebuild from the vertices; emitted halfspaces are redundant data and
    /// are cross-checked when present.
    pub fn to_polytope(&self) -> Result<Polytope> {
        let pts: Result<Vec<QVec>> = self.vertices.iter().map(|v| vec_from_strings(v)).collect();
        let p = Polytope::from_points(self.ambient_dim, &pts?)?;
        for h in &self.halfspaces {
            let normal: QVec = h.normal.iter().map(|&x| crate::num::qi(x)).collect();
            let offset = q_from_string(&h.offset)?;
            let hs =
                Halfspace::new(&normal, &offset).ok_or_else(|| bad("zero normal in halfspace"))?;
            if !p.vertices().iter().all(|v| hs.satisfied_by(v)) {
                return Err(bad("halfspace does not contain the vertex set"));
            }
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolytopalSetJson {
    pub ambient_dim: usize,
    pub members: Vec<PolytopeJson>,
}

impl PolytopalSetJson {
    pub fn from_set(s: &PolytopalSet) -> PolytopalSetJson {
        PolytopalSetJson {
            ambient_dim: s.ambient(),
            members: s
                .members()
                .iter()
                .map(PolytopeJson::from_polytope)
                .collect(),
        }
    }

    pub fn to_set(&self) -> Result<PolytopalSet> {
        let members: Result<Vec<Polytope>> = self.members.iter().map(|m| m.to_polytope()).collect();
        PolytopalSet::new(self.ambient_dim, members?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub ambient_dim: usize,
    pub cells: Vec<PolytopeJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice_basis: Option<Vec<Vec<String>>>,
}

impl ComplexJson {
    pub fn from_window(cx: &crate::complexes::PolytopalComplex) -> ComplexJson {
        ComplexJson {
            ambient_dim: cx.ambient(),
            cells: cx.cells().iter().map(PolytopeJson::from_polytope).collect(),
            lattice_basis: None,
        }
    }

    pub fn from_periodic(pc: &crate::complexes::PeriodicComplex) -> ComplexJson {
        ComplexJson {
            ambient_dim: pc.ambient(),
            cells: pc
                .classes()
                .iter()
                .map(PolytopeJson::from_polytope)
                .collect(),
            lattice_basis: Some(mat_to_strings(pc.lattice().basis_matrix())),
        }
    }

    pub fn to_window(&self) -> Result<crate::complexes::PolytopalComplex> {
        let cells: Result<Vec<Polytope>> = self.cells.iter().map(|c| c.to_polytope()).collect();
        crate::complexes::PolytopalComplex::build(self.ambient_dim, &cells?)
    }

    pub fn to_periodic(&self) -> Result<crate::complexes::PeriodicComplex> {
        let basis = self
            .lattice_basis
            .as_ref()
            .ok_or_else(|| bad("periodic complex needs lattice_basis"))?;
        let lattice = lattice_from_rows(basis, self.ambient_dim)?;
        let n = self.ambient_dim;
        let cells: Result<Vec<Polytope>> = self.cells.iter().map(|c| c.to_polytope()).collect();
        let tops: Vec<Polytope> = cells?.into_iter().filter(|c| c.dim() == n).collect();
        crate::complexes::PeriodicComplex::from_top_cells(lattice, &tops)
    }
}

fn lattice_from_rows(rows: &[Vec<String>], ambient: usize) -> Result<Lattice> {
    let m = mat_from_strings(rows)?;
    if m.rows != ambient {
        return Err(bad(format!(
            "lattice basis has {} rows, ambient dimension is {ambient}",
            m.rows
        )));
    }
    Ok(Lattice::from_generators(ambient, &m.cols_vec()))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeJson {
    /// columns generate the lattice
    pub basis: Vec<Vec<String>>,
}

impl LatticeJson {
    pub fn from_lattice(l: &Lattice) -> LatticeJson {
        LatticeJson {
            basis: mat_to_strings(l.basis_matrix()),
        }
    }

    pub fn to_lattice(&self) -> Result<Lattice> {
        let m = mat_from_strings(&self.basis)?;
        Ok(Lattice::from_generators(m.rows, &m.cols_vec()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormJson {
    pub form: Vec<Vec<String>>,
}

impl FormJson {
    pub fn from_form(b: &BilinearForm) -> FormJson {
        FormJson {
            form: mat_to_strings(b.matrix()),
        }
    }

    pub fn to_form(&self) -> Result<BilinearForm> {
        BilinearForm::new(mat_from_strings(&self.form)?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TropicalTermJson {
    pub exp: Vec<i64>,
    pub val: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TropicalPolynomialJson {
    pub dim: usize,
    pub terms: Vec<TropicalTermJson>,
}

impl TropicalPolynomialJson {
    pub fn from_polynomial(f: &TropicalPolynomial) -> TropicalPolynomialJson {
        TropicalPolynomialJson {
            dim: f.dim(),
            terms: f
                .terms()
                .iter()
                .map(|(m, v)| TropicalTermJson {
                    exp: m.iter().map(|z| z.try_into().unwrap_or_default()).collect(),
                    val: q_to_string(v),
                })
                .collect(),
        }
    }

    pub fn to_polynomial(&self) -> Result<TropicalPolynomial> {
        let terms: Result<Vec<(Vec<Z>, Q)>> = self
            .terms
            .iter()
            .map(|t| {
                Ok((
                    t.exp.iter().map(|&x| Z::from(x)).collect(),
                    q_from_string(&t.val)?,
                ))
            })
            .collect();
        TropicalPolynomial::new(self.dim, terms?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypersurfaceJson {
    pub window: PolytopeJson,
    pub cells: Vec<PolytopeJson>,
    /// minimizing term indices per cell
    pub minimizers: Vec<Vec<usize>>,
    /// lattice weight per cell; null for cells of codimension != 1
    pub weights: Vec<Option<i64>>,
}

impl HypersurfaceJson {
    pub fn from_hypersurface(h: &TropicalHypersurface) -> HypersurfaceJson {
        HypersurfaceJson {
            window: PolytopeJson::from_polytope(h.window()),
            cells: h
                .complex()
                .cells()
                .iter()
                .map(PolytopeJson::from_polytope)
                .collect(),
            minimizers: h.minimizers().to_vec(),
            weights: h
                .weights()
                .iter()
                .map(|w| w.as_ref().map(|z| z.try_into().unwrap_or_default()))
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlPieceJson {
    pub cell: usize,
    pub peg: Vec<String>,
    pub c: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PlFunctionJson {
    pub complex: ComplexJson,
    /// for periodic domains the cell ids refer to the instance list below
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub instances: Option<Vec<PolytopeJson>>,
    pub pieces: Vec<PlPieceJson>,
}

impl PlFunctionJson {
    pub fn from_function(f: &PlConvexFunction) -> PlFunctionJson {
        match f.domain() {
            PlDomain::Window(cx) => PlFunctionJson {
                complex: ComplexJson::from_window(cx),
                instances: None,
                pieces: f
                    .pieces()
                    .iter()
                    .map(|(i, p)| PlPieceJson {
                        cell: *i,
                        peg: vec_to_strings(&p.peg),
                        c: q_to_string(&p.constant),
                    })
                    .collect(),
            },
            PlDomain::Periodic(pc) => PlFunctionJson {
                complex: ComplexJson::from_periodic(pc),
                instances: Some(
                    pc.cover()
                        .iter()
                        .map(|ci| PolytopeJson::from_polytope(&ci.poly))
                        .collect(),
                ),
                pieces: f
                    .pieces()
                    .iter()
                    .map(|(i, p)| PlPieceJson {
                        cell: *i,
                        peg: vec_to_strings(&p.peg),
                        c: q_to_string(&p.constant),
                    })
                    .collect(),
            },
        }
    }

    pub fn to_function(&self) -> Result<PlConvexFunction> {
        let pieces: Result<Vec<(usize, Piece)>> = self
            .pieces
            .iter()
            .map(|p| {
                Ok((
                    p.cell,
                    Piece {
                        peg: vec_from_strings(&p.peg)?,
                        constant: q_from_string(&p.c)?,
                    },
                ))
            })
            .collect();
        let pieces = pieces?;
        if self.complex.lattice_basis.is_some() {
            let pc = self.complex.to_periodic()?;
            // the stored instance ids refer to the rebuilt (deterministic)
            // cover; validate the count so mismatched files fail loudly
            if let Some(insts) = &self.instances {
                if insts.len() != pc.cover().len() {
                    return Err(bad("instance list does not match the rebuilt cover"));
                }
            }
            PlConvexFunction::new(PlDomain::Periodic(pc), pieces)
        } else {
            let cx = self.complex.to_window()?;
            PlConvexFunction::new(PlDomain::Window(cx), pieces)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleSimplexJson {
    #[serde(rename = "M")]
    pub linear: Vec<Vec<i64>>,
    pub t: Vec<String>,
    pub vpi: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CycleJson {
    pub n: usize,
    pub lattice: LatticeJson,
    pub degree: i64,
    pub simplices: Vec<CycleSimplexJson>,
}

impl CycleJson {
    pub fn to_cycle(&self) -> Result<TropicalCycle> {
        let lattice = self.lattice.to_lattice()?;
        let simplices: Result<Vec<CycleSimplex>> = self
            .simplices
            .iter()
            .map(|s| {
                let rows: Vec<Vec<Z>> = s
                    .linear
                    .iter()
                    .map(|r| r.iter().map(|&x| Z::from(x)).collect())
                    .collect();
                Ok(CycleSimplex {
                    map: AffineMap::new(ZMat::from_rows(rows), vec_from_strings(&s.t)?)?,
                    vpi: q_from_string(&s.vpi)?,
                })
            })
            .collect();
        TropicalCycle::new(self.n, lattice, Z::from(self.degree), simplices?)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StratumJson {
    pub components: Vec<usize>,
    pub vpi: String,
    #[serde(default)]
    pub closure_of: Vec<usize>,
    #[serde(rename = "M")]
    pub linear: Vec<Vec<i64>>,
    pub t: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SkeletonJson {
    pub strata: Vec<StratumJson>,
}

impl SkeletonJson {
    pub fn to_skeleton_and_maps(&self) -> Result<(Skeleton, Vec<AffineMap>)> {
        let strata: Result<Vec<Stratum>> = self
            .strata
            .iter()
            .map(|s| {
                Ok(Stratum {
                    components: s.components.clone(),
                    vpi: q_from_string(&s.vpi)?,
                    closure_of: s.closure_of.clone(),
                })
            })
            .collect();
        let skel = Skeleton::build(strata?)?;
        let maps: Result<Vec<AffineMap>> = self
            .strata
            .iter()
            .map(|s| {
                let rows: Vec<Vec<Z>> = s
                    .linear
                    .iter()
                    .map(|r| r.iter().map(|&x| Z::from(x)).collect())
                    .collect();
                AffineMap::new(ZMat::from_rows(rows), vec_from_strings(&s.t)?)
            })
            .collect();
        Ok((skel, maps?))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualCellJson {
    pub source: usize,
    pub source_dim: usize,
    pub dual: PolytopeJson,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DualComplexJson {
    pub cells: Vec<DualCellJson>,
}

impl DualComplexJson {
    pub fn from_dual(dc: &crate::plc::DualComplex) -> DualComplexJson {
        DualComplexJson {
            cells: dc
                .cells
                .iter()
                .map(|(source, source_dim, dual)| DualCellJson {
                    source: *source,
                    source_dim: *source_dim,
                    dual: PolytopeJson::from_polytope(dual),
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasurePieceJson {
    pub support: PolytopeJson,
    pub density: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_point: Option<Vec<String>>,
    pub label: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeasureJson {
    pub pieces: Vec<MeasurePieceJson>,
    pub total_mass: String,
}

impl MeasureJson {
    pub fn from_measure(mu: &PiecewiseHaarMeasure) -> MeasureJson {
        MeasureJson {
            pieces: mu
                .pieces
                .iter()
                .map(|p| MeasurePieceJson {
                    support: PolytopeJson::from_polytope(&p.support),
                    density: q_to_string(&p.density),
                    basis: p.chart.as_ref().map(|(m, _)| mat_to_strings(m)),
                    base_point: p.chart.as_ref().map(|(_, b)| vec_to_strings(b)),
                    label: p.label.clone(),
                })
                .collect(),
            total_mass: q_to_string(&mu.total_mass()),
        }
    }

    pub fn to_measure(&self) -> Result<PiecewiseHaarMeasure> {
        let pieces: Result<Vec<MeasurePiece>> = self
            .pieces
            .iter()
            .map(|p| {
                let chart = match (&p.basis, &p.base_point) {
                    (Some(b), Some(bp)) => Some((mat_from_strings(b)?, vec_from_strings(bp)?)),
                    _ => None,
                };
                Ok(MeasurePiece {
                    support: p.support.to_polytope()?,
                    density: q_from_string(&p.density)?,
                    chart,
                    label: p.label.clone(),
                })
            })
            .collect();
        Ok(PiecewiseHaarMeasure { pieces: pieces? })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{qi, qr};

    #[test]
    fn polytope_round_trip() {
        let p = Polytope::from_points(
            2,
            &[
                vec![qi(0), qi(0)],
                vec![qi(1), qi(0)],
                vec![qr(1, 2), qr(3, 4)],
            ],
        )
        .unwrap();
        let j = PolytopeJson::from_polytope(&p);
        let text = serde_json::to_string(&j).unwrap();
        let back: PolytopeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_polytope().unwrap(), p);
    }

    #[test]
    fn polynomial_round_trip() {
        let f = crate::tropical::tropical_line();
        let j = TropicalPolynomialJson::from_polynomial(&f);
        let text = serde_json::to_string(&j).unwrap();
        let back: TropicalPolynomialJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_polynomial().unwrap(), f);
    }

    #[test]
    fn malformed_rational_rejected() {
        let doc = r#"{"dim":1,"terms":[{"exp":[0],"val":"1/0"}]}"#;
        let parsed: TropicalPolynomialJson = serde_json::from_str(doc).unwrap();
        assert!(parsed.to_polynomial().is_err());
    }

    #[test]
    fn pl_function_round_trip_periodic() {
        let lat = Lattice::standard(1);
        let b = BilinearForm::new(QMat::identity(1)).unwrap();
        let (_, g) = crate::plc::voronoi_model_function(&lat, &b, None).unwrap();
        let j = PlFunctionJson::from_function(&g);
        let text = serde_json::to_string(&j).unwrap();
        let back: PlFunctionJson = serde_json::from_str(&text).unwrap();
        let g2 = back.to_function().unwrap();
        assert_eq!(
            g2.evaluate(&[qr(1, 8)]).unwrap(),
            g.evaluate(&[qr(1, 8)]).unwrap()
        );
        assert!(g2.ample_check().unwrap());
    }

    #[test]
    fn measure_round_trip() {
        let cycle = crate::measure::TropicalCycle::new(
            1,
            Lattice::standard(1),
            Z::from(1),
            vec![crate::measure::CycleSimplex {
                map: AffineMap::new(ZMat::from_rows(vec![vec![Z::from(1)]]), vec![qi(0)]).unwrap(),
                vpi: qi(1),
            }],
        )
        .unwrap();
        let b = BilinearForm::new(QMat::from_rows(vec![vec![qi(2)]])).unwrap();
        let mu = crate::measure::canonical_measure(&cycle, &[b]).unwrap();
        let j = MeasureJson::from_measure(&mu);
        let text = serde_json::to_string_pretty(&j).unwrap();
        let back: MeasureJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_measure().unwrap().total_mass(), mu.total_mass());
        assert_eq!(j.total_mass, "2");
    }
}
