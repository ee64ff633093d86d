//! Solve on the Heisenberg group and run every identity on each solution.

use flowspin::clifford::CliffordRep;
use flowspin::frame::FlowGeometry;
use flowspin::identities::{dim3_identities, dim3_minimal_identities, eta_einstein_equiv_3d, thm_main_residuals};
use flowspin::spin::TksParams;
use flowspin::tks::solve_homogeneous;
use flowspin::zoo::{build, ZooParams};

fn main() -> flowspin::error::Result<()> {
    let entry = build("heisenberg", &ZooParams::new())?;
    let geo = FlowGeometry::new(&entry.manifold)?;
    let rep = CliffordRep::new(3)?;
    let p = TksParams::real(0.0, 0.0);
    let kernel = solve_homogeneous(&geo, &rep, p)?;
    println!("heisenberg, (alpha, beta) = (0, 0): {} solutions", kernel.dim());
    for (k, psi) in kernel.fields().iter().enumerate() {
        for (name, r) in [
            ("theorem", thm_main_residuals(&geo, &rep, psi, p)?),
            ("dim3", dim3_identities(&geo, &rep, psi, p)?),
            ("minimal", dim3_minimal_identities(&geo, &rep, psi, p)?),
        ] {
            println!("  solution {k} {name:<8} max residual {:.2e}", r.max());
        }
    }
    println!("{:?}", eta_einstein_equiv_3d(&geo)?);
    Ok(())
}
