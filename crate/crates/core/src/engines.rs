//! Word-problem oracles chosen by name, as accepted on the command line.

use crate::amalgam::CyclicAmalgam;
use crate::error::{Error, Result};
use crate::ice::{tower_for_presentation, IceOracle};
use crate::oracle::{
    detect_builtin, DirectProductOracle, DovetailOracle, FiniteOracle, FreeOracle, KleinOracle, MappedOracle,
    SubprocessOracle, WordOracle,
};
use crate::presentation::Presentation;

/// Coset limit for the finite engine.
pub const FINITE_MAX_COSETS: usize = 200_000;

/// Budget per query for the semi-decision engine.
pub const DOVETAIL_QUERY_BUDGET: u64 = 100_000;

pub const BUILTIN_NAMES: [&str; 9] = ["auto", "free", "product", "klein", "finite", "ice", "pinched", "dovetail", "abelian"];

/// Resolves `builtin:NAME` or `cmd:PROGRAM [ARGS...]` for presentation `p`.
pub fn oracle_from(spec: &str, p: &Presentation) -> Result<Box<dyn WordOracle>> {
    if let Some(cmd) = spec.strip_prefix("cmd:") {
        let mut parts = cmd.split_whitespace();
        let program = parts.next().ok_or_else(|| Error::Invalid("empty oracle command".into()))?;
        let args: Vec<String> = parts.map(str::to_string).collect();
        return Ok(Box::new(SubprocessOracle::spawn(program, &args, p.generators().to_vec())?));
    }
    let name = spec.strip_prefix("builtin:").unwrap_or(spec);
    let unfit = || Error::Invalid(format!("oracle `{name}` does not fit this presentation"));
    Ok(match name {
        "free" if p.relators().is_empty() => Box::new(FreeOracle::new(p.rank())),
        "free" => return Err(unfit()),
        "product" | "abelian" => Box::new(DirectProductOracle::from_presentation(p).map_err(|_| unfit())?),
        "klein" => Box::new(KleinOracle::from_presentation(p).map_err(|_| unfit())?),
        "finite" => Box::new(FiniteOracle::from_presentation(p, FINITE_MAX_COSETS)?),
        "ice" => ice_oracle(p).ok_or_else(unfit)?,
        "pinched" => pinched_oracle(p).ok_or_else(unfit)?,
        "dovetail" => Box::new(DovetailOracle::new(p.clone(), DOVETAIL_QUERY_BUDGET)),
        "auto" => detect_builtin(p, FINITE_MAX_COSETS)
            .or_else(|| ice_oracle(p))
            .or_else(|| pinched_oracle(p))
            .ok_or_else(|| Error::Invalid("no built-in oracle fits; pass one explicitly".into()))?,
        _ => return Err(Error::Invalid(format!("unknown oracle `{spec}`"))),
    })
}

fn ice_oracle(p: &Presentation) -> Option<Box<dyn WordOracle>> {
    let (tower, images) = tower_for_presentation(p)?;
    Some(Box::new(MappedOracle::new(Box::new(IceOracle::new(tower)), images)))
}

fn pinched_oracle(p: &Presentation) -> Option<Box<dyn WordOracle>> {
    let (amalgam, images) = CyclicAmalgam::from_presentation(p)?;
    Some(Box::new(MappedOracle::new(Box::new(amalgam), images)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Mode;

    #[test]
    fn resolves_by_name() {
        let klein: Presentation = "< a, b | b a b^-1 a >".parse().unwrap();
        let o = oracle_from("builtin:klein", &klein).unwrap();
        assert!(o.is_trivial(&klein.parse_word("b a b^-1 a").unwrap()).unwrap());
        assert!(oracle_from("builtin:free", &klein).is_err());
        assert!(oracle_from("builtin:nope", &klein).is_err());
        let t: Presentation = "< a, b, t | [a,t] >".parse().unwrap();
        let o = oracle_from("builtin:auto", &t).unwrap();
        assert_eq!(o.mode(), Mode::Total);
        assert!(!o.is_trivial(&t.parse_word("[b,t]").unwrap()).unwrap());
        assert!(o.is_trivial(&t.parse_word("[a^2,t]").unwrap()).unwrap());
        let d = oracle_from("builtin:dovetail", &t).unwrap();
        assert_eq!(d.mode(), Mode::SemiDecision);
    }
}
