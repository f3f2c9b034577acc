use super::extension::SymExtension;
use super::herm::{coord_image, HermEqualities};
use super::{CriteriaError, CriteriaOptions, Criterion, CriterionVerdict};
use crate::hermlin::{permute_systems, ComplexMatrix};
use crate::qstate::BipartiteState;
use crate::sdpsolve::{LmiBuilder, LmiMargin};

/// Feasibility margin of a PPT `k`-symmetric extension of `rho`, taken on
/// the party with the smaller dimension (on `B` when they are equal).
///
/// The margin is the largest `t` with every partial-transpose cut `⪰ t·1`;
/// for `k ≥ 2` the extension itself also carries the shift. At `k = 1` it
/// equals the minimum eigenvalue of `ρ^{T_B}`.
pub fn dps_margin(
    rho: &BipartiteState,
    k: usize,
    opts: &CriteriaOptions,
) -> Result<CriterionVerdict, CriteriaError> {
    Ok(dps_margin_detailed(rho, k, opts)?.0)
}

pub fn dps_margin_detailed(
    rho: &BipartiteState,
    k: usize,
    opts: &CriteriaOptions,
) -> Result<(CriterionVerdict, LmiMargin), CriteriaError> {
    if k == 0 {
        return Err(CriteriaError::InvalidArgument("DPS level must be at least 1".into()));
    }
    let (dx, dy, target) = if rho.d_a() < rho.d_b() {
        let swapped = permute_systems(rho.rho(), &[rho.d_a(), rho.d_b()], &[1, 0])?;
        (rho.d_b(), rho.d_a(), swapped)
    } else {
        (rho.d_a(), rho.d_b(), rho.rho().clone())
    };
    let m = SymExtension::var_count(dx, dy, k) + 1;
    opts.guard(24 * m * m)?;
    let (lmi, _) = build_extension_lmi(dx, dy, k, &target);
    opts.guard(lmi.estimated_bytes())?;
    let out = lmi.solve(&opts.solver)?;
    Ok((CriterionVerdict::new(Criterion::Dps { k }, out.margin), out))
}

fn build_extension_lmi(dx: usize, dy: usize, k: usize, target: &ComplexMatrix) -> (LmiBuilder, SymExtension) {
    let mut lmi = LmiBuilder::new();
    let ext = SymExtension::new(&mut lmi, dx, dy, k);
    if k >= 2 {
        ext.add_e_block(&mut lmi, true);
    }
    ext.add_cut_blocks(&mut lmi);
    let mut eqs = HermEqualities::default();
    for &(v, c) in &ext.var.vars {
        let img = coord_image(c, &mut |p, q| ext.marginal_unit(p, q));
        eqs.add_image(v, &img, 1.0);
    }
    eqs.emit(&mut lmi, target);
    (lmi, ext)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::ppt_check;
    use crate::qstate::{maximally_entangled, noisy_state, sample_hs, RngStream};

    #[test]
    fn level_one_equals_ppt_margin() {
        let mut g = RngStream::new(11, 0).generator();
        for _ in 0..3 {
            let s = sample_hs(2, &mut g).unwrap();
            let dps = dps_margin(&s, 1, &CriteriaOptions::default()).unwrap();
            let ppt = ppt_check(&s).margin;
            assert!((dps.margin - ppt).abs() < 1e-7, "{} vs {ppt}", dps.margin);
        }
    }

    #[test]
    fn level_two_rejects_entangled_and_accepts_noise() {
        let opts = CriteriaOptions::default();
        let bell = noisy_state(&maximally_entangled(2), 0.2).unwrap();
        assert!(dps_margin(&bell, 2, &opts).unwrap().outside());
        let mixed = BipartiteState::maximally_mixed(2, 2);
        let v = dps_margin(&mixed, 2, &opts);
        assert!(v.as_ref().unwrap().inside(), "{v:?}");
    }
}
