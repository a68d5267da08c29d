//! Dense and sparse Hamming packings.
use scolb::packing::{build_dense_packing, build_sparse_packing, cardinality_bound, verify_packing, PackingKind};

fn main() -> scolb::Result<()> {
    for dim in [8, 16, 32, 64] {
        let set = build_dense_packing(dim, 42)?;
        let report = verify_packing(&set);
        println!(
            "dense d={dim:>3}: {} vertices (bound {}), min distance {:?}, ok={}",
            set.len(),
            cardinality_bound(dim, PackingKind::Dense),
            report.min_pairwise,
            report.ok
        );
    }
    let set = build_sparse_packing(64, 4, 42)?;
    let report = verify_packing(&set);
    println!("sparse d=64 k=4: {} vertices, min distance {:?}", set.len(), report.min_pairwise);
    println!("first vertex: {:?}", set.vertices()[0]);
    Ok(())
}
