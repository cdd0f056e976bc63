//! Serializable summaries for one parameter set.

use serde::Serialize;

use crate::allocation::{fair_allocation, verify_axioms, AxiomReport, FairAllocation};
use crate::error::{Error, Result};
use crate::game::{
    build_game, cooperation_beneficial, core_contains, core_is_empty_two_user, core_nonempty_lp,
    cstar_contains, is_superadditive, Game, MAX_LP_TRANSMITTERS,
};
use crate::model::{ChannelParams, Gains, GameKind};
use crate::oracle::{brute_force_superadditivity, MAX_BRUTE_FORCE_TRANSMITTERS};
use crate::region::{degraded_region_contains_at_power, two_user_region_contains, PowerAllocation};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoalitionEntry {
    /// One-based member list, e.g. `{1,2}`.
    pub coalition: String,
    pub bitmask: u32,
    pub value_bits: f64,
}

fn value_table(game: &Game) -> Vec<CoalitionEntry> {
    game.table()
        .map(|(c, v)| CoalitionEntry {
            coalition: c.to_string(),
            bitmask: c.bits(),
            value_bits: v,
        })
        .collect()
}

/// Fair allocation together with the game table and axiom residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AllocationReport {
    pub kind: GameKind,
    pub params: ChannelParams,
    pub values: Vec<CoalitionEntry>,
    pub allocation: FairAllocation,
    pub axioms: AxiomReport,
}

impl AllocationReport {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn allocation_report(params: &ChannelParams, eps: f64) -> Result<AllocationReport> {
    let game = build_game(params)?;
    let allocation = fair_allocation(game.params())?;
    let axioms = verify_axioms(game.params(), &allocation, eps)?;
    Ok(AllocationReport {
        kind: game.kind(),
        params: game.params().clone(),
        values: value_table(&game),
        allocation,
        axioms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckOutcome {
    fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Runs the structural checks on one instance: superadditivity (tabulated
/// and re-scanned), core non-emptiness, the fair allocation with its
/// axioms, and core and region membership of that allocation.
pub fn verify_instance(params: &ChannelParams, eps: f64) -> Result<Vec<CheckOutcome>> {
    let game = build_game(params)?;
    let params = game.params();
    let n = game.num_transmitters();
    let mut out = Vec::new();

    let sa = is_superadditive(&game, eps);
    let detail = match sa.violation {
        Some(v) => format!(
            "v({}) + v({}) exceeds v({}) by {:.3e}",
            v.first,
            v.second,
            v.first.union(v.second),
            v.excess
        ),
        None => "all disjoint pairs".into(),
    };
    out.push(CheckOutcome::new("superadditivity", sa.holds, detail));

    if n <= MAX_BRUTE_FORCE_TRANSMITTERS {
        let direct = brute_force_superadditivity(params)?;
        out.push(CheckOutcome::new(
            "superadditivity re-scan agrees",
            direct.holds == sa.holds,
            format!("direct re-scan holds = {}", direct.holds),
        ));
    }

    let core_nonempty = if n <= MAX_LP_TRANSMITTERS {
        core_nonempty_lp(&game)?.is_some()
    } else {
        cooperation_beneficial(&game)
    };
    let mut detail = String::from("feasibility of the core inequalities");
    if let Gains::TwoUser(..) = params.gains {
        if params.lambda == 0.0 {
            match core_is_empty_two_user(params) {
                Ok(empty) if empty == core_nonempty => {
                    return Err(Error::DomainViolation(
                        "closed-form emptiness criterion disagrees with the linear program".into(),
                    ))
                }
                Ok(_) => detail.push_str(", confirmed by the closed-form criterion"),
                Err(Error::ZeroGrandValue) => {}
                Err(e) => return Err(e),
            }
        }
    }
    out.push(CheckOutcome::new("core non-empty", core_nonempty, detail));

    let allocation = match fair_allocation(params) {
        Ok(a) => a,
        Err(e) if e.is_not_covered() => {
            out.push(CheckOutcome::new(
                "fair allocation",
                false,
                format!("not covered: {e}"),
            ));
            return Ok(out);
        }
        Err(e) => return Err(e),
    };
    let rates = allocation
        .rates
        .as_slice()
        .iter()
        .map(|r| format!("{r:.6}"))
        .collect::<Vec<_>>()
        .join(", ");
    out.push(CheckOutcome::new(
        "fair allocation",
        true,
        format!("({rates})"),
    ));

    let axioms = verify_axioms(params, &allocation, eps)?;
    out.push(CheckOutcome::new(
        "efficiency",
        axioms.efficiency.passed,
        format!("residual {:.3e}", axioms.efficiency.residual),
    ));
    out.push(CheckOutcome::new(
        "symmetry",
        axioms.symmetry.passed,
        format!("residual {:.3e}", axioms.symmetry.residual),
    ));
    out.push(CheckOutcome::new(
        "envy-freeness",
        axioms.envy_freeness.passed,
        format!("residual {:.3e}", axioms.envy_freeness.residual),
    ));
    if let Some(identity) = axioms.value_identity {
        out.push(CheckOutcome::new(
            "reduced-power value identity",
            identity.passed,
            format!("residual {:.3e}", identity.residual),
        ));
    }

    let membership = core_contains(&game, &allocation.rates, eps)?;
    let detail = match membership.violated.first() {
        Some(c) => format!("coalition {c} is short"),
        None => "every coalition receives at least its value".into(),
    };
    out.push(CheckOutcome::new(
        "allocation in core",
        membership.contains,
        detail,
    ));

    match params.kind() {
        GameKind::Degraded => {
            out.push(CheckOutcome::new(
                "allocation in achievable core subset",
                cstar_contains(&game, &allocation.rates, eps)?,
                "subset sum-rate bounds",
            ));
            let full = PowerAllocation::full(params);
            out.push(CheckOutcome::new(
                "allocation achievable",
                degraded_region_contains_at_power(params, &allocation.rates, &full, eps)?,
                "full-power region constraints",
            ));
        }
        GameKind::TwoUser => out.push(CheckOutcome::new(
            "allocation achievable",
            two_user_region_contains(params, &allocation.rates, eps)?,
            "single-rate and sum-rate bounds",
        )),
    }
    Ok(out)
}
