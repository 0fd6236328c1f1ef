//! Reproduction of the first-order `3 × 7` example with two third-order
//! cocanceling potentials that are not related by any `Q ∈ GL(U)`.

use serde_json::{json, Value};

use crate::dsl::{builtin, BuiltinParams};
use crate::error::Result;
use crate::operator::{cocanceling_check, constant_rank_check, OperatorSymbol, RankReport, RankVerdict};
use crate::potential::{potentials_of_order, symbol_isomorphism, PotentialSearch};

#[derive(Clone, Debug)]
pub struct AppendixReport {
    pub rank: RankReport,
    pub searches: Vec<PotentialSearch>,
    pub annihilates_b1: bool,
    pub annihilates_b2: bool,
    pub b1_cocanceling: bool,
    pub b2_cocanceling: bool,
    pub iso_b1_b2: bool,
    pub iso_b2_b1: bool,
}

impl AppendixReport {
    pub fn rank_ok(&self) -> bool {
        self.rank.generic_rank == 3
            && self.rank.tail_vanishes
            && self.rank.drop_points.is_empty()
            && self.rank.verdict == RankVerdict::VerifiedProbabilistic
    }

    pub fn no_low_order_potential(&self) -> bool {
        self.searches.iter().all(|s| !s.potential_exists && s.min_probe_rank <= 3)
    }

    pub fn exact(&self) -> bool {
        self.annihilates_b1 && self.annihilates_b2
    }

    pub fn cocanceling(&self) -> bool {
        self.b1_cocanceling && self.b2_cocanceling
    }

    pub fn no_isomorphism(&self) -> bool {
        !self.iso_b1_b2 && !self.iso_b2_b1
    }

    /// The five verdicts, in order.
    pub fn verdicts(&self) -> [(&'static str, bool); 5] {
        [
            ("constant rank 3", self.rank_ok()),
            ("no potential of order <= 2", self.no_low_order_potential()),
            ("A B1 = A B2 = 0", self.exact()),
            ("B1, B2 cocanceling", self.cocanceling()),
            ("no isomorphism between B1 and B2", self.no_isomorphism()),
        ]
    }

    pub fn all_hold(&self) -> bool {
        self.verdicts().iter().all(|(_, ok)| *ok)
    }

    pub fn to_json(&self) -> Value {
        let searches: Vec<Value> = self
            .searches
            .iter()
            .map(|s| {
                json!({
                    "order": s.kappa,
                    "solution_space_dim": s.solution_space_dim,
                    "max_generic_rank": s.max_generic_rank,
                    "min_probe_rank": s.min_probe_rank,
                    "expected_rank": s.expected_rank,
                    "potential_exists": s.potential_exists,
                })
            })
            .collect();
        json!({
            "rank": self.rank.to_json(),
            "searches": searches,
            "annihilates_b1": self.annihilates_b1,
            "annihilates_b2": self.annihilates_b2,
            "b1_cocanceling": self.b1_cocanceling,
            "b2_cocanceling": self.b2_cocanceling,
            "isomorphism_b1_to_b2": self.iso_b1_b2,
            "isomorphism_b2_to_b1": self.iso_b2_b1,
            "verdicts": self.verdicts().iter().map(|(k, v)| json!({"claim": k, "holds": v})).collect::<Vec<_>>(),
        })
    }
}

fn load(name: &str) -> Result<OperatorSymbol> {
    Ok(builtin(name, &BuiltinParams::default())?.0)
}

pub fn reproduce_appendix(samples: usize, seed: u64) -> Result<AppendixReport> {
    let a = load("appendix_A")?;
    let b1 = load("appendix_B1")?;
    let b2 = load("appendix_B2")?;
    let rank = constant_rank_check(&a, samples, seed)?;
    let searches = [1, 2].iter().map(|&k| potentials_of_order(&a, k, seed, None)).collect::<Result<Vec<_>>>()?;
    Ok(AppendixReport {
        rank,
        searches,
        annihilates_b1: a.symbol().try_mul(b1.symbol())?.is_zero(),
        annihilates_b2: a.symbol().try_mul(b2.symbol())?.is_zero(),
        b1_cocanceling: cocanceling_check(&b1)?.cocanceling,
        b2_cocanceling: cocanceling_check(&b2)?.cocanceling,
        iso_b1_b2: symbol_isomorphism(&b1, &b2, seed)?.is_some(),
        iso_b2_b1: symbol_isomorphism(&b2, &b1, seed)?.is_some(),
    })
}
