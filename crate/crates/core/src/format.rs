//! JSON files: instances, verdicts and certificates. Every number is an
//! exact string; surds are `{"p", "q", "r"}` objects.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::certify::{Certificate, Conclusion, Step};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, ExtSurd, FracLin, Surd};
use crate::pfl::Pfl;
use crate::solver::{Constraint, Instance, Literal, Variable, Verdict};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawInt {
    Number(i64),
    Text(String),
}

impl RawInt {
    fn parse(&self) -> Result<BigInt> {
        match self {
            RawInt::Number(v) => Ok(BigInt::from(*v)),
            RawInt::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("malformed integer {s:?}"))),
        }
    }

    fn write(v: &BigInt) -> RawInt {
        match v.to_i64() {
            Some(x) if x.unsigned_abs() < (1 << 53) => RawInt::Number(x),
            _ => RawInt::Text(v.to_string()),
        }
    }
}

/// A rational string, `"inf"`/`"-inf"`, or a surd object.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum RawNumber {
    Text(String),
    Surd { p: String, q: String, r: RawInt },
}

impl RawNumber {
    fn ext(&self) -> Result<ExtSurd> {
        match self {
            RawNumber::Text(s) if s.trim() == "inf" => Ok(ExtSurd::PosInf),
            RawNumber::Text(s) if s.trim() == "-inf" => Ok(ExtSurd::NegInf),
            _ => self.surd().map(ExtSurd::Finite),
        }
    }

    fn surd(&self) -> Result<Surd> {
        match self {
            RawNumber::Text(s) => Ok(Surd::rational(parse_rational(s)?)),
            RawNumber::Surd { p, q, r } => Surd::new(parse_rational(p)?, parse_rational(q)?, r.parse()?),
        }
    }

    fn write(s: &Surd) -> RawNumber {
        if s.is_rational() {
            return RawNumber::Text(format_rational(s.p()));
        }
        RawNumber::Surd {
            p: format_rational(s.p()),
            q: format_rational(s.q()),
            r: RawInt::write(s.r()),
        }
    }

    fn write_ext(s: &ExtSurd) -> RawNumber {
        match s {
            ExtSurd::Finite(s) => Self::write(s),
            ExtSurd::PosInf => RawNumber::Text("inf".into()),
            ExtSurd::NegInf => RawNumber::Text("-inf".into()),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPiece {
    piece: [RawInt; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    upto: Option<RawNumber>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVariable {
    name: String,
    range: [RawNumber; 2],
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    lesser: String,
    greater: String,
    f: Vec<RawPiece>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    variables: Vec<RawVariable>,
    constraints: Vec<RawConstraint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metadata: Option<Value>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
enum RawStep {
    Constraint { index: usize, dual: bool },
    Compose { outer: usize, inner: usize },
    Min { of: Vec<usize> },
    RangeBound { literal: String },
    Hypothesis { literal: String, value: RawNumber },
    Apply { function: usize, bound: usize, value: RawNumber },
    LoopClose { function: usize, bound: usize, entry: RawNumber, fixed_point: RawNumber },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum RawConclusion {
    RangeViolation { bound: usize, literal: String, value: RawNumber, min: RawNumber },
    CrossViolation { variable: String, c: RawNumber, upper: usize, lower: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCertificate {
    steps: Vec<RawStep>,
    conclusion: RawConclusion,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "status", deny_unknown_fields)]
enum RawVerdict {
    #[serde(rename = "SAT")]
    Sat { witness: BTreeMap<String, RawNumber> },
    #[serde(rename = "UNSAT")]
    Unsat { certificate: RawCertificate },
}

fn json_error(e: serde_json::Error) -> Error {
    Error::Parse(e.to_string())
}

fn pfl_from_raw(pieces: &[RawPiece]) -> Result<Pfl> {
    if pieces.is_empty() {
        return Err(Error::Parse("function with no pieces".into()));
    }
    let mut maps = Vec::with_capacity(pieces.len());
    let mut breaks = Vec::with_capacity(pieces.len() - 1);
    for (i, p) in pieces.iter().enumerate() {
        let [a, b, c, d] = &p.piece;
        maps.push(FracLin::new(a.parse()?, b.parse()?, c.parse()?, d.parse()?)?);
        match (&p.upto, i + 1 == pieces.len()) {
            (Some(u), false) => breaks.push(u.surd()?),
            (None, true) => {}
            (Some(_), true) => return Err(Error::Parse("last piece has an upper break".into())),
            (None, false) => return Err(Error::Parse(format!("piece {i} lacks its upper break"))),
        }
    }
    Pfl::new(breaks, maps)
}

fn pfl_to_raw(f: &Pfl) -> Vec<RawPiece> {
    f.pieces()
        .iter()
        .enumerate()
        .map(|(i, p)| RawPiece {
            piece: p.coeffs().map(RawInt::write),
            upto: f.breaks().get(i).map(RawNumber::write),
        })
        .collect()
}

struct Names<'a>(&'a Instance);

impl Names<'_> {
    fn literal(&self, s: &str) -> Result<Literal> {
        let (neg, name) = match s.trim().strip_prefix('-') {
            Some(rest) => (true, rest.trim()),
            None => (false, s.trim()),
        };
        let v = self
            .0
            .var_index(name)
            .ok_or_else(|| Error::Parse(format!("unknown variable {name:?}")))?;
        Ok(if neg { Literal::neg(v) } else { Literal::pos(v) })
    }

    fn variable(&self, s: &str) -> Result<usize> {
        self.0
            .var_index(s)
            .ok_or_else(|| Error::Parse(format!("unknown variable {s:?}")))
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let raw: RawInstance = serde_json::from_str(text).map_err(json_error)?;
    let variables = raw
        .variables
        .iter()
        .map(|v| {
            Ok(Variable {
                name: v.name.clone(),
                lo: v.range[0].surd()?,
                hi: v.range[1].surd()?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut inst = Instance {
        variables,
        constraints: Vec::new(),
        metadata: raw.metadata,
    };
    let mut constraints = Vec::with_capacity(raw.constraints.len());
    for (i, c) in raw.constraints.iter().enumerate() {
        let names = Names(&inst);
        let at = |e: Error| Error::Parse(format!("constraint {i}: {e}"));
        constraints.push(Constraint {
            lesser: names.literal(&c.lesser).map_err(at)?,
            greater: names.literal(&c.greater).map_err(at)?,
            f: pfl_from_raw(&c.f).map_err(at)?,
        });
    }
    inst.constraints = constraints;
    inst.validate()?;
    Ok(inst)
}

fn raw_instance(inst: &Instance) -> RawInstance {
    RawInstance {
        variables: inst
            .variables
            .iter()
            .map(|v| RawVariable {
                name: v.name.clone(),
                range: [RawNumber::write(&v.lo), RawNumber::write(&v.hi)],
            })
            .collect(),
        constraints: inst
            .constraints
            .iter()
            .map(|c| RawConstraint {
                lesser: inst.literal_name(c.lesser),
                greater: inst.literal_name(c.greater),
                f: pfl_to_raw(&c.f),
            })
            .collect(),
        metadata: inst.metadata.clone(),
    }
}

pub fn write_instance(inst: &Instance) -> String {
    serde_json::to_string_pretty(&raw_instance(inst)).expect("serializable")
}

fn raw_certificate(inst: &Instance, cert: &Certificate) -> RawCertificate {
    let name = |l: Literal| inst.literal_name(l);
    let steps = cert
        .steps
        .iter()
        .map(|s| match s {
            Step::Constraint { index, dual } => RawStep::Constraint {
                index: *index,
                dual: *dual,
            },
            Step::Compose { outer, inner } => RawStep::Compose {
                outer: *outer,
                inner: *inner,
            },
            Step::Min { of } => RawStep::Min { of: of.clone() },
            Step::RangeBound { literal } => RawStep::RangeBound { literal: name(*literal) },
            Step::Hypothesis { literal, value } => RawStep::Hypothesis {
                literal: name(*literal),
                value: RawNumber::write(value),
            },
            Step::Apply {
                function,
                bound,
                value,
            } => RawStep::Apply {
                function: *function,
                bound: *bound,
                value: RawNumber::write_ext(value),
            },
            Step::LoopClose {
                function,
                bound,
                entry,
                fixed_point,
            } => RawStep::LoopClose {
                function: *function,
                bound: *bound,
                entry: RawNumber::write_ext(entry),
                fixed_point: RawNumber::write_ext(fixed_point),
            },
        })
        .collect();
    let conclusion = match &cert.conclusion {
        Conclusion::RangeViolation {
            bound,
            literal,
            value,
            min,
        } => RawConclusion::RangeViolation {
            bound: *bound,
            literal: name(*literal),
            value: RawNumber::write_ext(value),
            min: RawNumber::write(min),
        },
        Conclusion::CrossViolation {
            variable,
            c,
            upper,
            lower,
        } => RawConclusion::CrossViolation {
            variable: inst.variables[*variable].name.clone(),
            c: RawNumber::write(c),
            upper: *upper,
            lower: *lower,
        },
    };
    RawCertificate { steps, conclusion }
}

fn certificate_from_raw(inst: &Instance, raw: &RawCertificate) -> Result<Certificate> {
    let names = Names(inst);
    let steps = raw
        .steps
        .iter()
        .map(|s| {
            Ok(match s {
                RawStep::Constraint { index, dual } => Step::Constraint {
                    index: *index,
                    dual: *dual,
                },
                RawStep::Compose { outer, inner } => Step::Compose {
                    outer: *outer,
                    inner: *inner,
                },
                RawStep::Min { of } => Step::Min { of: of.clone() },
                RawStep::RangeBound { literal } => Step::RangeBound {
                    literal: names.literal(literal)?,
                },
                RawStep::Hypothesis { literal, value } => Step::Hypothesis {
                    literal: names.literal(literal)?,
                    value: value.surd()?,
                },
                RawStep::Apply {
                    function,
                    bound,
                    value,
                } => Step::Apply {
                    function: *function,
                    bound: *bound,
                    value: value.ext()?,
                },
                RawStep::LoopClose {
                    function,
                    bound,
                    entry,
                    fixed_point,
                } => Step::LoopClose {
                    function: *function,
                    bound: *bound,
                    entry: entry.ext()?,
                    fixed_point: fixed_point.ext()?,
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let conclusion = match &raw.conclusion {
        RawConclusion::RangeViolation {
            bound,
            literal,
            value,
            min,
        } => Conclusion::RangeViolation {
            bound: *bound,
            literal: names.literal(literal)?,
            value: value.ext()?,
            min: min.surd()?,
        },
        RawConclusion::CrossViolation {
            variable,
            c,
            upper,
            lower,
        } => Conclusion::CrossViolation {
            variable: names.variable(variable)?,
            c: c.surd()?,
            upper: *upper,
            lower: *lower,
        },
    };
    Ok(Certificate { steps, conclusion })
}

pub fn write_certificate(inst: &Instance, cert: &Certificate) -> String {
    serde_json::to_string_pretty(&raw_certificate(inst, cert)).expect("serializable")
}

pub fn parse_certificate(inst: &Instance, text: &str) -> Result<Certificate> {
    let raw: RawCertificate = serde_json::from_str(text).map_err(json_error)?;
    certificate_from_raw(inst, &raw)
}

pub fn write_verdict(inst: &Instance, v: &Verdict) -> String {
    let raw = match v {
        Verdict::Sat(w) => RawVerdict::Sat {
            witness: inst
                .variables
                .iter()
                .zip(w)
                .map(|(v, x)| (v.name.clone(), RawNumber::write(x)))
                .collect(),
        },
        Verdict::Unsat(c) => RawVerdict::Unsat {
            certificate: raw_certificate(inst, c),
        },
    };
    serde_json::to_string_pretty(&raw).expect("serializable")
}

/// Reads a verdict for `inst`. A witness must name every variable once.
pub fn parse_verdict(inst: &Instance, text: &str) -> Result<Verdict> {
    let raw: RawVerdict = serde_json::from_str(text).map_err(json_error)?;
    match raw {
        RawVerdict::Sat { witness } => {
            let mut values = vec![None; inst.var_count()];
            for (name, x) in &witness {
                let v = Names(inst).variable(name)?;
                values[v] = Some(x.surd()?);
            }
            let values = values
                .into_iter()
                .enumerate()
                .map(|(i, x)| x.ok_or_else(|| Error::Parse(format!("no value for {}", inst.variables[i].name))))
                .collect::<Result<Vec<_>>>()?;
            Ok(Verdict::Sat(values))
        }
        RawVerdict::Unsat { certificate } => Ok(Verdict::Unsat(certificate_from_raw(inst, &certificate)?)),
    }
}
