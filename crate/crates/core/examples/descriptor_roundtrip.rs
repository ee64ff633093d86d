//! Write a descriptor, read it back and compare the derived tensors.

use flowspin::deform::derived_tensor_distance;
use flowspin::descriptor::Descriptor;
use flowspin::zoo::{build, ZooParams};

fn main() -> flowspin::error::Result<()> {
    let params = ZooParams::from([("t".to_string(), 2.0)]);
    let entry = build("berger_s3", &params)?;
    let text = Descriptor::from_entry(&entry, &params)?.to_json();
    println!("{} bytes of JSON", text.len());
    let back = Descriptor::parse(&text)?;
    assert_eq!(back.to_json(), text);
    let d = derived_tensor_distance(&entry.manifold, &back.to_manifold()?)?;
    println!("derived tensor distance after reload: {d:e}");

    let broken = text.replacen("\"dim\": 3", "\"dim\": \"3\"", 1);
    match Descriptor::parse(&broken) {
        Err(e) => println!("malformed copy: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
