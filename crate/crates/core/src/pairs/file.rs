use std::path::Path;

use num::rational::BigRational;
use serde::{Deserialize, Serialize};

use super::{validate_pair, Invariant, PairSpec};
use crate::error::{Error, Result};
use crate::polyalg::{fmt_ratio, parse_ratio, LieElement, MultiPoly, Scalar, VarSet};

const FORMAT: u32 = 1;

type Cx = [String; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairFile {
    format: u32,
    #[serde(default)]
    name: String,
    n: usize,
    d: usize,
    bracket: Vec<Vec<Vec<String>>>,
    #[serde(rename = "A")]
    a: Vec<String>,
    k_basis: Vec<LieFile>,
    #[serde(rename = "kA_basis")]
    ka_basis: Vec<usize>,
    torus_indices: Vec<usize>,
    invariants: Vec<InvariantFile>,
    hw_generators: Vec<PolyFile>,
    weights: Vec<Vec<i64>>,
    inner_product: InnerFile,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LieFile {
    name: String,
    v: Vec<Vec<Cx>>,
    z: Vec<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InvariantFile {
    name: String,
    bidegree: [u32; 2],
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolyFile {
    #[serde(default)]
    name: String,
    terms: Vec<TermFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    exp: Vec<u32>,
    coeff: Cx,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InnerFile {
    v: Vec<Vec<Cx>>,
    z: Vec<Vec<String>>,
}

fn ratios_out(m: &[Vec<BigRational>]) -> Vec<Vec<String>> {
    m.iter().map(|r| r.iter().map(fmt_ratio).collect()).collect()
}

fn ratios_in(m: &[Vec<String>]) -> Result<Vec<Vec<BigRational>>> {
    m.iter().map(|r| r.iter().map(|s| parse_ratio(s)).collect()).collect()
}

fn scalars_out(m: &[Vec<Scalar>]) -> Vec<Vec<Cx>> {
    m.iter().map(|r| r.iter().map(Scalar::to_pair_strings).collect()).collect()
}

fn scalars_in(m: &[Vec<Cx>]) -> Result<Vec<Vec<Scalar>>> {
    m.iter().map(|r| r.iter().map(|[a, b]| Scalar::from_pair_strings(a, b)).collect()).collect()
}

fn poly_out(p: &MultiPoly) -> Vec<TermFile> {
    p.terms().map(|(e, c)| TermFile { exp: e.clone(), coeff: c.to_pair_strings() }).collect()
}

fn poly_in(vs: VarSet, terms: &[TermFile]) -> Result<MultiPoly> {
    let parsed = terms
        .iter()
        .map(|t| Ok((t.exp.clone(), Scalar::from_pair_strings(&t.coeff[0], &t.coeff[1])?)))
        .collect::<Result<Vec<_>>>()?;
    MultiPoly::from_terms(vs, parsed).map_err(|e| Error::Schema(e.to_string()))
}

/// Serializes a pair to the versioned JSON format (pretty-printed).
pub fn pair_to_json(p: &PairSpec) -> String {
    let file = PairFile {
        format: FORMAT,
        name: p.name.clone(),
        n: p.n,
        d: p.d,
        bracket: p.bracket.iter().map(|s| ratios_out(s)).collect(),
        a: p.a.iter().map(fmt_ratio).collect(),
        k_basis: p
            .k_basis
            .iter()
            .map(|z| LieFile { name: z.name.clone(), v: scalars_out(&z.vmat), z: ratios_out(&z.zmat) })
            .collect(),
        ka_basis: p.ka_indices.clone(),
        torus_indices: p.torus_indices.clone(),
        invariants: p
            .invariants
            .iter()
            .map(|inv| InvariantFile { name: inv.name.clone(), bidegree: [inv.s, inv.z], terms: poly_out(&inv.poly) })
            .collect(),
        hw_generators: p
            .hw_generators
            .iter()
            .enumerate()
            .map(|(i, h)| PolyFile { name: format!("h{}", i + 1), terms: poly_out(h) })
            .collect(),
        weights: p.weights.clone(),
        inner_product: InnerFile { v: scalars_out(&p.inner_v), z: ratios_out(&p.inner_z) },
    };
    serde_json::to_string_pretty(&file).expect("pair serialization cannot fail")
}

/// Parses and shape-checks a pair without running the semantic validation.
pub fn pair_from_json(text: &str) -> Result<PairSpec> {
    let f: PairFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    if f.format != FORMAT {
        return Err(Error::Schema(format!("unsupported format {}, expected {FORMAT}", f.format)));
    }
    let vs = VarSet::phase(f.n, f.d);
    let k_basis = f
        .k_basis
        .iter()
        .map(|z| Ok(LieElement::new(z.name.clone(), scalars_in(&z.v)?, ratios_in(&z.z)?)))
        .collect::<Result<Vec<_>>>()?;
    let invariants = f
        .invariants
        .iter()
        .map(|inv| Ok(Invariant::new(inv.name.clone(), poly_in(vs, &inv.terms)?, inv.bidegree[0], inv.bidegree[1])))
        .collect::<Result<Vec<_>>>()?;
    let hw_generators = f.hw_generators.iter().map(|h| poly_in(vs, &h.terms)).collect::<Result<Vec<_>>>()?;
    let pair = PairSpec {
        name: f.name,
        n: f.n,
        d: f.d,
        bracket: f.bracket.iter().map(|s| ratios_in(s)).collect::<Result<_>>()?,
        a: f.a.iter().map(|s| parse_ratio(s)).collect::<Result<_>>()?,
        k_basis,
        ka_indices: f.ka_basis,
        torus_indices: f.torus_indices,
        invariants,
        hw_generators,
        weights: f.weights,
        inner_v: scalars_in(&f.inner_product.v)?,
        inner_z: ratios_in(&f.inner_product.z)?,
    };
    pair.check_shape()?;
    Ok(pair)
}

pub fn load_pair_unchecked(path: impl AsRef<Path>) -> Result<PairSpec> {
    pair_from_json(&std::fs::read_to_string(path)?)
}

/// Loads a pair file and rejects it unless every validation check passes.
pub fn load_pair(path: impl AsRef<Path>) -> Result<PairSpec> {
    let pair = load_pair_unchecked(path)?;
    let report = validate_pair(&pair);
    match report.first_failure() {
        None => Ok(pair),
        Some(c) => Err(Error::Validation(format!("{}: {}", c.name, c.witness.clone().unwrap_or_default()))),
    }
}

pub fn save_pair(p: &PairSpec, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, pair_to_json(p))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairs::builtin_u2su2;

    #[test]
    fn round_trip() {
        let p = builtin_u2su2();
        let back = pair_from_json(&pair_to_json(&p)).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn schema_errors() {
        assert!(matches!(pair_from_json("{}"), Err(Error::Schema(_))));
        let text = pair_to_json(&builtin_u2su2()).replace("\"format\": 1", "\"format\": 2");
        assert!(matches!(pair_from_json(&text), Err(Error::Schema(_))));
    }
}
