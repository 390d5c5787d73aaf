//! Splits a random edge flow on a Delaunay complex with two holes into its
//! gradient, curl and harmonic parts.

use hodge_landmarks::datagen::delaunay_complex;
use hodge_landmarks::sparse::{dot, norm2};
use hodge_landmarks::topology::hodge_decomposition;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> hodge_landmarks::error::Result<()> {
    let full = delaunay_complex(60, 7)?;
    // drop two triangles to get a complex with two holes
    let kept: Vec<[usize; 3]> = full.triangles().iter().copied().skip(2).collect();
    let sc = hodge_landmarks::complex::build_complex(full.n_vertices(), &kept, &full.bare_edges())?;
    let sc = sc.with_coords(full.coords().unwrap().to_vec())?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let f: Vec<f64> = (0..sc.n_edges()).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let parts = hodge_decomposition(&sc, &f, 1e-12)?;

    println!("|f|        = {:.6}", norm2(&f));
    println!("|gradient| = {:.6}", norm2(&parts.gradient));
    println!("|curl|     = {:.6}", norm2(&parts.curl));
    println!("|harmonic| = {:.6}", norm2(&parts.harmonic));
    println!("<g, c> = {:.2e}", dot(&parts.gradient, &parts.curl));
    println!("<g, h> = {:.2e}", dot(&parts.gradient, &parts.harmonic));
    println!("<c, h> = {:.2e}", dot(&parts.curl, &parts.harmonic));
    let div = sc.boundary_1().mul_vec(&parts.harmonic);
    let curl = sc.boundary_2().mul_vec_transpose(&parts.harmonic);
    println!("harmonic part: |B1 h| = {:.2e}, |B2^T h| = {:.2e}", norm2(&div), norm2(&curl));
    Ok(())
}
