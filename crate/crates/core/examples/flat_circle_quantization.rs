//! Flat solutions on S^1(L) x R^2 and the quantization of alpha by the spin structure.

use std::f64::consts::PI;

use flowspin::clifford::CliffordRep;
use flowspin::frame::{ChartRecipe, FlowGeometry, FrameManifold};
use flowspin::linalg::{c, CVector};
use flowspin::spin::TksParams;
use flowspin::tks::{circle_alpha_set, flat_solution, tks_residual};

fn main() -> flowspin::error::Result<()> {
    let rep = CliffordRep::new(3)?;
    let flat = FrameManifold::chart("flat", ChartRecipe::Flat { xi: vec![1.0, 0.0, 0.0] })?;
    let geo = FlowGeometry::new(&flat)?;
    let psi0 = CVector::from_vec(vec![c(1.0), c(0.5)]);
    let length = 3.0;
    for delta in [0u8, 1] {
        let alphas = circle_alpha_set(length, delta, -2.0 * PI, 2.0 * PI)?;
        println!("L = {length}, delta = {delta}:");
        for a in alphas {
            let psi = flat_solution(&rep, c(a), &[1.0, 0.0, 0.0], &psi0, &psi0)?;
            let r = tks_residual(&geo, &rep, &psi, TksParams::real(a, 0.0))?.max();
            let v0 = psi.value_at(&[0.2, 0.1, 0.0]);
            let v1 = psi.value_at(&[0.2 + length, 0.1, 0.0]);
            let sign = if delta == 1 { -1.0 } else { 1.0 };
            println!("  alpha = {a:>9.5}  residual {r:.1e}  deck defect {:.1e}", (v1 - v0 * c(sign)).norm());
        }
    }
    Ok(())
}
