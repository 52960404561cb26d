//! String ids for generators, norming sequences, variance profiles and
//! models.
//!
//! | kind    | ids |
//! |---------|-----|
//! | phi     | `phi2`, `power:q=Q`, `cosh`, `logbar`, `csv:PATH` |
//! | norming | `lil:r=R`, `const:c=C`, `csv:PATH` |
//! | sigma   | `model`, `powerlaw:gamma=G[:m=one\|log\|invlog]`, `csv:PATH` |
//! | model   | `chaos:d=D`, `weightedA:beta=B[:weibull=R]`, `powerlaw:gamma=G` |

use std::fs::File;
use std::path::Path;

use serde::Serialize;

use crate::bound::{NormingSequence, SigmaProfile, SlowlyVarying};
use crate::error::{Error, Result};
use crate::models::{MartingaleModel, Noise};
use crate::phi::PhiFunction;

pub const PHI_IDS: &str = "phi2, power:q=<q>, cosh, logbar, csv:<path>";
pub const NORMING_IDS: &str = "lil:r=<r>, const:c=<c>, csv:<path>";
pub const SIGMA_IDS: &str = "model, powerlaw:gamma=<g>[:m=one|log|invlog], csv:<path>";
pub const MODEL_IDS: &str = "chaos:d=<d>, weightedA:beta=<b>[:weibull=<r>], powerlaw:gamma=<g>";

/// `name:k1=v1:k2=v2` split into the name and its parameters.
struct Spec<'a> {
    id: &'a str,
    name: &'a str,
    params: Vec<(&'a str, &'a str)>,
}

impl<'a> Spec<'a> {
    fn parse(id: &'a str, registry: &str, kind: &str) -> Result<Self> {
        let id = id.trim();
        let mut parts = id.split(':');
        let name = parts.next().unwrap_or_default();
        let params = parts
            .map(|p| {
                p.split_once('=').ok_or_else(|| {
                    Error::Parse(format!("{kind} id {id:?}: parameter {p:?} is not key=value; {kind} registry: {registry}"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Spec { id, name, params })
    }

    fn get(&self, key: &str) -> Option<&'a str> {
        self.params.iter().find(|(k, _)| *k == key).map(|(_, v)| *v)
    }

    fn number(&self, key: &str) -> Result<f64> {
        let raw = self
            .get(key)
            .ok_or_else(|| Error::Parse(format!("id {:?} is missing parameter {key}", self.id)))?;
        raw.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("id {:?}: {key}={raw:?} is not a number", self.id)))
    }

    fn only(&self, keys: &[&str]) -> Result<()> {
        match self.params.iter().find(|(k, _)| !keys.contains(k)) {
            Some((k, _)) => Err(Error::Parse(format!("id {:?}: unknown parameter {k:?}", self.id))),
            None => Ok(()),
        }
    }
}

fn open(path: &str) -> Result<File> {
    File::open(Path::new(path)).map_err(|e| Error::Parse(format!("cannot open {path:?}: {e}")))
}

fn unknown(kind: &str, id: &str, registry: &str) -> Error {
    Error::Domain(format!("unknown {kind} id {id:?}; {kind} registry: {registry}"))
}

pub fn parse_phi(id: &str) -> Result<PhiFunction> {
    if let Some(path) = id.trim().strip_prefix("csv:") {
        return PhiFunction::from_csv(format!("csv:{path}"), open(path)?);
    }
    let spec = Spec::parse(id, PHI_IDS, "phi")?;
    match spec.name {
        "phi2" => spec.only(&[]).map(|_| PhiFunction::quadratic()),
        "power" => {
            spec.only(&["q"])?;
            PhiFunction::power(spec.number("q")?)
        }
        "cosh" => spec.only(&[]).map(|_| PhiFunction::cosh()),
        "logbar" => spec.only(&[]).map(|_| PhiFunction::log_barrier()),
        _ => Err(unknown("phi", id, PHI_IDS)),
    }
}

/// First column of a CSV file with a header row.
fn read_column(path: &str) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(open(path)?);
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let field = rec.get(0).unwrap_or("").trim();
        out.push(
            field
                .parse()
                .map_err(|_| Error::Parse(format!("{path}: row {}: bad number {field:?}", i + 1)))?,
        );
    }
    Ok(out)
}

pub fn parse_norming(id: &str) -> Result<NormingSequence> {
    if let Some(path) = id.trim().strip_prefix("csv:") {
        return NormingSequence::table(read_column(path)?);
    }
    let spec = Spec::parse(id, NORMING_IDS, "norming")?;
    match spec.name {
        "lil" => {
            spec.only(&["r"])?;
            NormingSequence::iterated_log(spec.number("r")?)
        }
        "const" => {
            spec.only(&["c"])?;
            NormingSequence::constant(spec.number("c")?)
        }
        _ => Err(unknown("norming", id, NORMING_IDS)),
    }
}

/// `None` for `model` (use the model's exact profile).
pub fn parse_sigma(id: &str) -> Result<Option<SigmaProfile>> {
    if let Some(path) = id.trim().strip_prefix("csv:") {
        return SigmaProfile::table(read_column(path)?).map(Some);
    }
    let spec = Spec::parse(id, SIGMA_IDS, "sigma")?;
    match spec.name {
        "model" => spec.only(&[]).map(|_| None),
        "powerlaw" => {
            spec.only(&["gamma", "m"])?;
            let slow = match spec.get("m").unwrap_or("one") {
                "one" => SlowlyVarying::One,
                "log" => SlowlyVarying::Log,
                "invlog" => SlowlyVarying::InvLog,
                other => return Err(Error::Parse(format!("sigma id {id:?}: unknown m={other:?}"))),
            };
            SigmaProfile::power_law(spec.number("gamma")?, slow).map(Some)
        }
        _ => Err(unknown("sigma", id, SIGMA_IDS)),
    }
}

pub fn parse_model(id: &str) -> Result<MartingaleModel> {
    let spec = Spec::parse(id, MODEL_IDS, "model")?;
    match spec.name {
        "chaos" => {
            spec.only(&["d"])?;
            let d = spec.number("d")?;
            if d.fract() != 0.0 || !(1.0..=64.0).contains(&d) {
                return Err(Error::Domain(format!("chaos degree must be an integer in 1..=64, got {d}")));
            }
            MartingaleModel::chaos(d as u32)
        }
        "weightedA" => {
            spec.only(&["beta", "weibull"])?;
            let noise = match spec.get("weibull") {
                Some(_) => Noise::Weibull {
                    shape: spec.number("weibull")?,
                },
                None => Noise::Rademacher,
            };
            MartingaleModel::weighted_iid(spec.number("beta")?, noise)
        }
        "powerlaw" => {
            spec.only(&["gamma"])?;
            MartingaleModel::power_law(spec.number("gamma")?)
        }
        _ => Err(unknown("model", id, MODEL_IDS)),
    }
}

/// One row of the registry listing.
#[derive(Debug, Clone, Serialize)]
pub struct RegistryEntry {
    pub kind: &'static str,
    pub id: &'static str,
    pub description: &'static str,
}

pub fn listing() -> Vec<RegistryEntry> {
    let e = |kind, id, description| RegistryEntry { kind, id, description };
    vec![
        e("model", "chaos:d=<d>", "degree-d Rademacher chaos, sigma(n)^2 = C(n, d)"),
        e("model", "weightedA:beta=<b>", "sum of 2^-k xi(k), Rademacher xi with sd beta"),
        e("model", "weightedA:beta=<b>:weibull=<r>", "same with symmetric Weibull-tail noise of shape r"),
        e("model", "powerlaw:gamma=<g>", "Rademacher sum with sigma(n) = n^gamma"),
        e("phi", "phi2", "lambda^2 / 2"),
        e("phi", "power:q=<q>", "|lambda|^q / q, q > 1"),
        e("phi", "cosh", "cosh(lambda) - 1"),
        e("phi", "logbar", "-ln(1 - lambda^2) / 2 on (-1, 1)"),
        e("phi", "csv:<path>", "table of (lambda, phi) rows, convex interpolation"),
        e("norming", "lil:r=<r>", "(ln ln(n + 3))^(1/r)"),
        e("norming", "const:c=<c>", "constant c"),
        e("norming", "csv:<path>", "table of v(n), n = 1, 2, ..."),
        e("sigma", "model", "exact profile of the chosen model"),
        e("sigma", "powerlaw:gamma=<g>[:m=one|log|invlog]", "n^gamma M(n)"),
        e("sigma", "csv:<path>", "table of sigma(n), n = 1, 2, ..."),
    ]
}
