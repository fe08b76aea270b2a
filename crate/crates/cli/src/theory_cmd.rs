//! The `theory` subcommand: closed-form tables with no simulation.

use crate::cli::TheoryQuery;
use anyhow::{anyhow, Result};
use rdb_core::scheme::SchemeTag;
use rdb_core::theory::{
    cone_nonempty_probability, cone_probability, exceedance_bracket, multibeam_csi_ratio,
    multibeam_rate_bracket, per_user_rate_bracket_fixed_per_user,
    per_user_rate_bracket_fixed_total, perfect_csi_asymptote, single_beam_csi_ratio,
    single_beam_rate_bracket, theoretical_fro, AsymptoticRatio, BoundBracket,
};

fn print_bracket(name: &str, b: &BoundBracket) {
    println!("{name}");
    println!("  lower = {}  (exponent {})", b.lower, b.exponent_lower);
    println!("  upper = {}  (exponent {})", b.upper, b.exponent_upper);
}

fn ratio_cell(r: &AsymptoticRatio) -> String {
    if r.is_vanishing() {
        format!("{} (vanishing rate)", r.value())
    } else {
        r.value().to_string()
    }
}

pub fn cmd_theory(query: &TheoryQuery) -> Result<()> {
    match query {
        TheoryQuery::Fro { q } => {
            if q.is_empty() {
                return Err(anyhow!("--q requires at least one value"));
            }
            println!(
                "{:>8}  {:>12}  {:>12}  {:>12}",
                "q", "single-beam", "multi-single", "multi-multi"
            );
            for &qi in q {
                let g1 = theoretical_fro(SchemeTag::SingleBeam, qi)?;
                let gs = theoretical_fro(SchemeTag::MultiBeamSingleUser, qi)?;
                let gm = theoretical_fro(SchemeTag::MultiBeamMultiUser, qi)?;
                println!("{qi:>8}  {g1:>12}  {gs:>12}  {gm:>12}");
            }
        }
        TheoryQuery::Lemma1 { m, p } => {
            let b = exceedance_bracket(*m, *p)?;
            print_bracket(&format!("Pr{{Z > M^{p}}} bracket at M = {m}"), &b);
        }
        TheoryQuery::Thm1 { m, q, eps } => {
            let b = single_beam_rate_bracket(*m, *q, *eps)?;
            print_bracket(
                &format!("single-beam rate bracket at M = {m}, q = {q}, eps = {eps}"),
                &b,
            );
        }
        TheoryQuery::Thm3 { m, q, ell, eps } => {
            let b = multibeam_rate_bracket(*m, *q, *ell, *eps)?;
            print_bracket(
                &format!("multi-beam single-user rate bracket at M = {m}, q = {q}, l = {ell}, eps = {eps}"),
                &b,
            );
        }
        TheoryQuery::Thm4 { m, q, ell, eps } => {
            let b = per_user_rate_bracket_fixed_total(*m, *q, *ell, *eps)?;
            print_bracket(
                &format!("per-user rate bracket (fixed total power) at M = {m}, q = {q}, l = {ell}, eps = {eps}"),
                &b,
            );
        }
        TheoryQuery::Thm5 { m, q, ell, eps } => {
            let b = per_user_rate_bracket_fixed_per_user(*m, *q, *ell, *eps)?;
            print_bracket(
                &format!("per-user rate bracket (fixed per-user power) at M = {m}, q = {q}, l = {ell}, eps = {eps}"),
                &b,
            );
        }
        TheoryQuery::Ratio { q, ell } => {
            if q.is_empty() {
                return Err(anyhow!("--q requires at least one value"));
            }
            match ell {
                None => {
                    println!("{:>8}  limit of rate / perfect-CSI rate", "q");
                    for &qi in q {
                        println!("{qi:>8}  {}", ratio_cell(&single_beam_csi_ratio(qi)?));
                    }
                }
                Some(l) => {
                    println!("{:>8}  limit at beam exponent l = {l}", "q");
                    for &qi in q {
                        println!("{qi:>8}  {}", ratio_cell(&multibeam_csi_ratio(qi, *l)?));
                    }
                }
            }
        }
        TheoryQuery::Cone { m, eta2, k } => {
            if !(*eta2 > 0.0 && *eta2 < 1.0) {
                return Err(anyhow!("--eta2 must lie in (0, 1), got {eta2}"));
            }
            let eta = eta2.sqrt();
            let single = cone_probability(*m, eta)?;
            println!("Pr{{vector in cone}}      = {single}");
            if let Some(k) = k {
                let nonempty = cone_nonempty_probability(*m, *k, eta)?;
                println!("Pr{{cone nonempty, K={k}}} = {nonempty}");
            }
        }
        TheoryQuery::Csi { m, k } => {
            let v = perfect_csi_asymptote(*m, *k)?;
            println!("log M + log log K = {v}");
        }
    }
    Ok(())
}
