//! Turn (alpha, 0) solutions in the extremal eigenbundles into Killing spinors.

use flowspin::clifford::CliffordRep;
use flowspin::deform::{sasaki_killing_bridge, Eigenbundle};
use flowspin::frame::FlowGeometry;
use flowspin::spin::{SpinorField, TksParams};
use flowspin::tks::solve_homogeneous;
use flowspin::zoo::{build, ZooParams};

fn main() -> flowspin::error::Result<()> {
    let rep = CliffordRep::new(3)?;
    for (t, alpha) in [(1.0, -1.0), (0.5, -2.0), (2.0, -0.5)] {
        let entry = build("berger_s3", &ZooParams::from([("t".to_string(), t)]))?;
        let geo = FlowGeometry::new(&entry.manifold)?;
        let kernel = solve_homogeneous(&geo, &rep, TksParams::real(alpha, 0.0))?;
        let projectors = rep.omega_eigenprojectors(&geo.point(0).omega(), 1)?;
        for (which, r) in [(Eigenbundle::Bottom, 0), (Eigenbundle::Top, 1)] {
            let Some(psi) = kernel.fields().into_iter().map(|f| f.map(&projectors[r])).find(|f| match f {
                SpinorField::Jet { value, .. } | SpinorField::Constant(value) => value.norm() > 1e-6,
                SpinorField::Chart { .. } => false,
            }) else {
                continue;
            };
            let report = sasaki_killing_bridge(&geo, &rep, &psi, alpha, which, 1)?;
            println!(
                "Berger t = {t}, alpha = {alpha}, {which:?}: deform by {}, Killing number {}, residual {:.1e}",
                report.t, report.killing_number, report.killing_residual
            );
        }
    }
    Ok(())
}
