//! Regenerate every figure dataset into `figures/`.
//!
//! Each CSV carries `#` header comments echoing the parameters that
//! produced it, so any file can be reproduced from its own header alone.
//! Running this example twice yields byte-identical files.
//!
//! ```text
//! cargo run --example figure_datasets
//! ```

use airquery::figures::{generate, FigureParams, ALL_FIGURES};

fn main() {
    let params = FigureParams::defaults();
    let dir = std::path::Path::new("figures");
    for &kind in ALL_FIGURES {
        let doc = generate(kind, &params).unwrap();
        let path = dir.join(format!("{}.csv", kind.name()));
        doc.write_to(&path).unwrap();
        println!("wrote {} ({} rows)", path.display(), doc.row_count());
    }
}
