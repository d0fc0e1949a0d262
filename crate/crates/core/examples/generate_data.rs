//! Writes every bundled generator system to `data/<stem>.json`.
//!
//! Usage: `cargo run --example generate_data -- [output_dir]`

use std::path::PathBuf;

fn main() -> growthlab::Result<()> {
    let dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| PathBuf::from("data"));
    std::fs::create_dir_all(&dir)?;
    for (stem, system) in growthlab::bundled::all()? {
        let path = dir.join(format!("{stem}.json"));
        system.save(&path)?;
        println!("{} ({} generators, n = {}, d = {})", path.display(), system.len(), system.n(), system.d());
    }
    Ok(())
}
