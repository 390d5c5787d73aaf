//! Embeds a trajectory as an edge flow and smooths it with curl diffusion.
//! Divergence is unchanged; curl energy decays.

use hodge_landmarks::datagen::paths::edge_lengths;
use hodge_landmarks::datagen::{delaunay_complex, shortest_path};
use hodge_landmarks::flow::{default_tau, diffuse, flow_embed, flow_matrix, Trajectory};
use hodge_landmarks::sparse::norm2;

fn main() -> hodge_landmarks::error::Result<()> {
    let sc = delaunay_complex(200, 3)?;
    let adj = sc.vertex_adjacency();
    let path = shortest_path(&adj, &edge_lengths(&sc)?, 0, sc.n_vertices() - 1)?;
    let t = Trajectory::new(path);
    println!("trajectory with {} steps", t.n_steps());

    let f = flow_embed(&t, &sc)?;
    let fm = flow_matrix(std::slice::from_ref(&t), &sc)?;
    let div0 = sc.boundary_1().mul_vec(&f);
    println!("{:>8} {:>12} {:>12} {:>12}", "tau", "|f|", "|B2^T f|", "|div change|");
    for scale in [0.0, 0.5, 2.0, 8.0] {
        let tau = default_tau(&sc, scale);
        let d = diffuse(&fm, &sc, tau)?;
        let g = d.column(0);
        let div = sc.boundary_1().mul_vec(g);
        let change: Vec<f64> = div.iter().zip(&div0).map(|(a, b)| a - b).collect();
        let curl = norm2(&sc.boundary_2().mul_vec_transpose(g));
        println!("{tau:>8.4} {:>12.6} {curl:>12.6} {:>12.2e}", norm2(g), norm2(&change));
    }
    Ok(())
}
