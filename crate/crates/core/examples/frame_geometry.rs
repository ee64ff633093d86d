//! Derived tensors of the catalog flows: O'Neill tensor, mean curvature, Ricci.

use flowspin::frame::FlowGeometry;
use flowspin::zoo::{build, list_catalog, ZooParams};

fn main() -> flowspin::error::Result<()> {
    for item in list_catalog() {
        let entry = build(item.name, &ZooParams::new())?;
        let geo = FlowGeometry::new(&entry.manifold)?;
        let pt = geo.point(0);
        let curv = pt.curvature();
        println!("{} ({})", item.name, item.kind);
        println!("  |h|^2 = {:.6}, |kappa| = {:.6}, b = {:?}", pt.h_norm_sq(), pt.kappa.norm(), pt.b());
        println!("  scal = {:.6}", curv.scal);
        println!("  Ric =\n{:.6}", curv.ricci);
    }
    Ok(())
}
