//! Builds a small complex, prints its boundary operators and checks that a
//! removed triangle opens one hole.

use hodge_landmarks::complex::build_complex;
use hodge_landmarks::topology::{betti_numbers, harmonic_dimension};

fn main() -> hodge_landmarks::error::Result<()> {
    // a square split along its diagonal, plus a dangling edge
    let sc = build_complex(5, &[[0, 1, 2], [0, 2, 3]], &[[3, 4]])?;
    println!("{} vertices, {} edges, {} triangles", sc.n_vertices(), sc.n_edges(), sc.n_triangles());
    for (i, e) in sc.edges().iter().enumerate() {
        println!("edge {i}: {e:?}");
    }

    println!("B1 =\n{}", sc.boundary_1().to_dense());
    println!("B2 =\n{}", sc.boundary_2().to_dense());
    let b1b2 = sc.boundary_1().matmul(sc.boundary_2());
    println!("nonzeros in B1 B2: {}", b1b2.triplets().filter(|t| t.2 != 0.0).count());

    for removed in [vec![], vec![0], vec![0, 1]] {
        let pc = sc.punctured(removed.iter().copied())?;
        let (b0, b1) = betti_numbers(&pc)?;
        let dim = harmonic_dimension(&pc.hodge_laplacian_1())?;
        println!("removed {removed:?}: betti ({b0}, {b1}), dim ker L1 = {dim}");
    }
    Ok(())
}
