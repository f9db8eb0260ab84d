//! Shared plumbing: function parsing, protocol construction and bound
//! attachment.

use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fracsim::boolfn::BooleanFunction;
use fracsim::bounds::{lower_bound_sheet, thm44_upper};
use fracsim::codes::BaseResource;
use fracsim::frac::{BiasReport, BlockProtocol, FracPr, Protocol, XorRacPr};
use fracsim::prbox::FpRrac;
use fracsim::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProtocolKind {
    /// block protocol over the masked-majority one-bit code
    RacSr,
    /// block protocol over the one-qubit code
    QracSr,
    /// block protocol over the entanglement-assisted code
    Earac,
    /// blockwise covering code with a derandomized table
    FracPr,
    /// single covering code, parity decoding
    XorPr,
    /// PR-box pyramid, bias 1
    Prrac,
}

impl ProtocolKind {
    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "rac-sr" => Ok(ProtocolKind::RacSr),
            "qrac-sr" => Ok(ProtocolKind::QracSr),
            "earac" => Ok(ProtocolKind::Earac),
            "frac-pr" => Ok(ProtocolKind::FracPr),
            "xor-pr" => Ok(ProtocolKind::XorPr),
            "prrac" => Ok(ProtocolKind::Prrac),
            other => Err(Error::Parse(format!("unknown protocol {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::RacSr => "rac-sr",
            ProtocolKind::QracSr => "qrac-sr",
            ProtocolKind::Earac => "earac",
            ProtocolKind::FracPr => "frac-pr",
            ProtocolKind::XorPr => "xor-pr",
            ProtocolKind::Prrac => "prrac",
        }
    }

    /// Which lower-bound row this protocol is compared against.
    fn bound_resource(self) -> Option<&'static str> {
        match self {
            ProtocolKind::RacSr => Some("rac-sr"),
            ProtocolKind::QracSr => Some("qrac-sr"),
            ProtocolKind::Earac => Some("earac"),
            ProtocolKind::FracPr | ProtocolKind::XorPr => Some("rac-pr"),
            ProtocolKind::Prrac => None,
        }
    }
}

/// Accepts xor/maj/and/or/dictI, with an optional arity suffix (maj3,
/// xor2). The suffix wins over the --k flag.
pub fn parse_function(spec: &str, k_flag: Option<usize>) -> Result<(BooleanFunction, String)> {
    let spec = spec.trim().to_ascii_lowercase();
    let split = spec
        .find(|c: char| c.is_ascii_digit())
        .unwrap_or(spec.len());
    let (base, digits) = spec.split_at(split);
    let suffix: Option<usize> = if digits.is_empty() {
        None
    } else {
        Some(
            digits
                .parse()
                .map_err(|_| Error::Parse(format!("bad arity suffix in {spec}")))?,
        )
    };
    if base == "dict" {
        let i = suffix.ok_or_else(|| Error::Parse("dict needs a coordinate, e.g. dict1".into()))?;
        let k = k_flag.ok_or_else(|| Error::Parse("dict needs --k".into()))?;
        return Ok((BooleanFunction::dictator(k, i)?, format!("dict{i}")));
    }
    let k = suffix
        .or(k_flag)
        .ok_or_else(|| Error::Parse(format!("arity for {base} missing: use --k or a suffix")))?;
    let f = match base {
        "xor" => BooleanFunction::xor(k)?,
        "maj" => BooleanFunction::maj(k)?,
        "and" => BooleanFunction::and(k)?,
        "or" => BooleanFunction::or(k)?,
        other => return Err(Error::Parse(format!("unknown function {other}"))),
    };
    Ok((f, format!("{base}{k}")))
}

pub struct BuiltProtocol {
    pub protocol: Box<dyn Protocol>,
    pub m: Option<usize>,
    pub l: Option<usize>,
}

/// Derandomization tables get their own RNG stream, far away from the
/// per-trial counters used by Monte Carlo estimation.
const DERANDOMIZE_STREAM: u64 = u64::MAX;

#[allow(clippy::too_many_arguments)]
pub fn build_protocol(
    kind: ProtocolKind,
    n: usize,
    m: usize,
    l: usize,
    f: &BooleanFunction,
    radius: usize,
    target: f64,
    slack: f64,
    seed: u64,
) -> Result<BuiltProtocol> {
    let mut table_rng = ChaCha8Rng::seed_from_u64(seed);
    table_rng.set_stream(DERANDOMIZE_STREAM);
    let (protocol, m_meta, l_meta): (Box<dyn Protocol>, Option<usize>, Option<usize>) = match kind {
        ProtocolKind::RacSr => (
            Box::new(BlockProtocol::new(BaseResource::RacSr, n, m, f.clone())?),
            Some(m),
            None,
        ),
        ProtocolKind::QracSr => (
            Box::new(BlockProtocol::new(BaseResource::QracSr, n, m, f.clone())?),
            Some(m),
            None,
        ),
        ProtocolKind::Earac => (
            Box::new(BlockProtocol::new(BaseResource::Earac, n, m, f.clone())?),
            Some(m),
            None,
        ),
        ProtocolKind::FracPr => {
            let p = FracPr::new(n, l, radius, f.clone(), target, slack, &mut table_rng)?;
            let bits = p.message_bits().ceil() as usize;
            (Box::new(p), Some(bits), Some(l))
        }
        ProtocolKind::XorPr => {
            let p = XorRacPr::new(n, radius, f.arity(), target, slack, &mut table_rng)?;
            let bits = p.message_bits().ceil() as usize;
            (Box::new(p), Some(bits), Some(1))
        }
        ProtocolKind::Prrac => (Box::new(FpRrac::new(n, f.clone())?), Some(1), None),
    };
    Ok(BuiltProtocol {
        protocol,
        m: m_meta,
        l: l_meta,
    })
}

/// Fills stab_lower / thm44_upper on the report. Returns true when every
/// attached bound is vacuous.
pub fn attach_bounds(
    report: &mut BiasReport,
    kind: ProtocolKind,
    f: &BooleanFunction,
    n: usize,
    m: usize,
    l: usize,
    eta: f64,
) -> bool {
    let upper = thm44_upper(f, n, m, eta).ok();
    report.thm44_upper = upper;
    let mut lower_vacuous = true;
    if let Some(resource) = kind.bound_resource() {
        if let Ok(rows) = lower_bound_sheet(f, n, m, f.arity(), l) {
            if let Some(row) = rows.into_iter().find(|r| r.resource == resource) {
                report.stab_lower = Some(row.bias);
                lower_vacuous = row.vacuous;
            }
        }
    } else {
        // no comparable bound row; nothing vacuous about that
        return false;
    }
    lower_vacuous && upper.is_none_or(|v| v >= 1.0)
}
