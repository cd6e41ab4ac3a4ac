use anyhow::{bail, Context, Result};
use drep_core::comm::FreeCdga;
use drep_core::presentation::{parse_any, Builtin, DgaPresentation, GeneratorCensus, ParsedPresentation};
use sha2::{Digest, Sha256};

/// What an input argument resolved to.
pub enum Source {
    Free(DgaPresentation),
    Commutative(FreeCdga),
    /// A built-in known only through its generator census.
    Census(Builtin),
}

pub struct Input {
    /// The argument as given.
    pub label: String,
    pub source: Source,
    /// Hash of the canonical rendering; comments and spacing do not affect it.
    pub digest: String,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Resolves `builtin:<name>` or a file path. Built-ins are materialized up to
/// `max_weight`.
pub fn load(spec: &str, max_weight: u32) -> Result<Input> {
    let (source, canonical) = if let Some(name) = spec.strip_prefix("builtin:") {
        let b = Builtin::parse(name)?;
        if matches!(b, Builtin::Truncated(m) if m > 1) {
            let canonical = format!("census {}\n", b.name());
            (Source::Census(b), canonical)
        } else {
            let p = b.presentation(max_weight)?;
            let canonical = format!("builtin {}\n{}", b.name(), p.render());
            (Source::Free(p), canonical)
        }
    } else {
        let text = std::fs::read_to_string(spec).with_context(|| format!("cannot read `{spec}`"))?;
        match parse_any(&text).with_context(|| format!("in `{spec}`"))? {
            ParsedPresentation::Free(p) => {
                let canonical = p.render();
                (Source::Free(p), canonical)
            }
            ParsedPresentation::Commutative(c) => {
                let canonical = c.render();
                (Source::Commutative(c), canonical)
            }
        }
    };
    Ok(Input {
        label: spec.to_string(),
        source,
        digest: sha256_hex(canonical.as_bytes()),
    })
}

impl Input {
    pub fn free(&self) -> Result<&DgaPresentation> {
        match &self.source {
            Source::Free(p) => Ok(p),
            Source::Commutative(_) => bail!(
                "`{}` is commutative; this command needs a free presentation",
                self.label
            ),
            Source::Census(b) => bail!("built-in `{}` carries a generator census only", b.name()),
        }
    }

    pub fn census(&self, order: u32) -> Result<GeneratorCensus> {
        match &self.source {
            Source::Free(p) => Ok(p.weight_census()),
            Source::Census(b) => Ok(b.census(order)?),
            Source::Commutative(_) => bail!(
                "`{}` is commutative; a generator census needs a free presentation",
                self.label
            ),
        }
    }

    /// The `m` of `k[x]/(x^{m+1})` when the input is that algebra.
    pub fn truncation(&self) -> Option<u32> {
        let name = self.label.strip_prefix("builtin:")?;
        match Builtin::parse(name).ok()? {
            Builtin::Truncated(m) => Some(m),
            Builtin::DualNumbers => Some(1),
            _ => None,
        }
    }
}
