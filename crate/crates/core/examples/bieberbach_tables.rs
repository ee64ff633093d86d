//! Admissible alpha on the orientable flat 3-manifolds, for every spin structure.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use flowspin::bieberbach::{admissible_alphas, invariant_xi, lift_generators, BieberbachGroup, GroupName};

fn main() -> flowspin::error::Result<()> {
    for name in GroupName::ALL {
        let group = BieberbachGroup::standard(name, &BTreeMap::new())?;
        let fixed = invariant_xi(&group);
        if fixed.dim() == 0 {
            println!("{name}: no invariant flow direction");
            continue;
        }
        let xi = *fixed.basis.last().unwrap();
        let n = name.delta_count();
        for code in 0..(1u32 << n) {
            let delta: Vec<u8> = (0..n).map(|i| ((code >> i) & 1) as u8).collect();
            let lift = lift_generators(&group, &delta)?;
            let alphas = admissible_alphas(&group, &lift, &xi, -6.0 * PI, 6.0 * PI)?;
            let shown: Vec<String> = alphas.iter().map(|a| format!("{}", (a.alpha / PI * 1e9).round() / 1e9)).collect();
            println!("{name} delta = {delta:?}: alpha/pi in {{{}}}", shown.join(", "));
        }
    }
    Ok(())
}
