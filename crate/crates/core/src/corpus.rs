//! Ground-truth recognition corpus, shared by the `corpus` command and the
//! acceptance suite.

use crate::engines::oracle_from;
use crate::error::Result;
use crate::presentation::Presentation;
use crate::recognize::{recognize_limit, refute_sentence, Recognition, Sentence, Verdict};

/// Bound at which produced witnesses are re-refuted.
pub const WITNESS_REFUTE_BOUND: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Expected {
    Limit,
    NotLimit,
    /// A limit group the search may fail to place within budget.
    LimitOrUnknown,
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub presentation: &'static str,
    pub oracle: &'static str,
    pub expected: Expected,
}

pub fn entries() -> Vec<Entry> {
    let e = |name, presentation, oracle, expected| Entry { name, presentation, oracle, expected };
    vec![
        e("F1", "< a | >", "builtin:free", Expected::Limit),
        e("F2", "< a, b | >", "builtin:free", Expected::Limit),
        e("Z^2", "< a, b | [a,b] >", "builtin:product", Expected::Limit),
        e("Z^3", "< a, b, c | [a,b], [a,c], [b,c] >", "builtin:product", Expected::Limit),
        e("ICE <a,b,t|[a,t]>", "< a, b, t | [a,t] >", "builtin:ice", Expected::Limit),
        e("<a|a^2>", "< a | a^2 >", "builtin:finite", Expected::NotLimit),
        e("F2 x Z", "< a, b, c | [a,c], [b,c] >", "builtin:product", Expected::NotLimit),
        e("Klein bottle", "< a, b | b a b^-1 a >", "builtin:klein", Expected::NotLimit),
        e("genus 2", "< a, b, c, d | [a,b] [c,d] >", "builtin:pinched", Expected::LimitOrUnknown),
    ]
}

/// Outcome of one corpus run, with its evidence re-checked.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub recognition: Recognition,
    /// The verdict's witness chain or witness re-verified.
    pub evidence_ok: bool,
    /// A produced witness survives refutation at [`WITNESS_REFUTE_BOUND`].
    pub refute_ok: bool,
    pub pass: bool,
}

pub fn run(entry: &Entry, budget: u64) -> Result<Outcome> {
    let p: Presentation = entry.presentation.parse()?;
    let wp = oracle_from(entry.oracle, &p)?;
    let recognition = recognize_limit(&p, wp.as_ref(), budget)?;
    let (evidence_ok, refute_ok) = match &recognition.verdict {
        Verdict::Limit(chain) => (chain.verify(&p)?, true),
        Verdict::NotLimit(w) => {
            let refuted = refute_sentence(&Sentence::for_witness(&p, w), WITNESS_REFUTE_BOUND).is_some();
            (w.verify(wp.as_ref())?, !refuted)
        }
        Verdict::Unknown => (true, true),
    };
    let verdict_ok = matches!(
        (&recognition.verdict, entry.expected),
        (Verdict::Limit(_), Expected::Limit | Expected::LimitOrUnknown)
            | (Verdict::NotLimit(_), Expected::NotLimit)
            | (Verdict::Unknown, Expected::LimitOrUnknown)
    );
    Ok(Outcome { recognition, evidence_ok, refute_ok, pass: verdict_ok && evidence_ok && refute_ok })
}
