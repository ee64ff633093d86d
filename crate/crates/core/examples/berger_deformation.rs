//! Carry the round-sphere solutions to Berger spheres.

use flowspin::clifford::CliffordRep;
use flowspin::deform::transport_tks;
use flowspin::frame::FlowGeometry;
use flowspin::spin::TksParams;
use flowspin::tks::solve_homogeneous;
use flowspin::zoo::round_s3;

fn main() -> flowspin::error::Result<()> {
    let mf = round_s3()?;
    let geo = FlowGeometry::new(&mf)?;
    let rep = CliffordRep::new(3)?;
    for (a, b) in [(0.0, 1.0), (0.0, -1.0), (-1.0, 0.0)] {
        let p = TksParams::real(a, b);
        for t in [0.5, 2.0, 3.0] {
            let mut worst: f64 = 0.0;
            let mut moved_p = p;
            for psi in solve_homogeneous(&geo, &rep, p)?.fields() {
                let moved = transport_tks(&geo, &rep, &psi, p, t)?;
                worst = worst.max(moved.residual);
                moved_p = moved.params;
            }
            println!(
                "({a:>4}, {b:>4}) at t = {t}: ({:.6}, {:.6}), residual {worst:.1e}",
                moved_p.alpha.re, moved_p.beta.re
            );
        }
    }
    Ok(())
}
