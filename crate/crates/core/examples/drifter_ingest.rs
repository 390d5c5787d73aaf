//! Drifter-style point tracks snapped onto a hex-grid triangulation. An
//! island stays in the complex unless the land mask is applied; then each of
//! its triangles becomes a hole while its edges stay walkable.

use hodge_landmarks::grid::{ingest_points, BBox, GridSpec};
use hodge_landmarks::io::parse_tracks;
use hodge_landmarks::topology::betti_numbers;

fn main() -> hodge_landmarks::error::Result<()> {
    let mut csv = String::from("id,timestamp,lon,lat\n");
    for (id, lat0) in [("north", 1.2), ("south", -1.3), ("loop", 0.0)] {
        for i in 0..40 {
            let s = i as f64 / 39.0;
            let (lon, lat) = if id == "loop" {
                let a = s * std::f64::consts::TAU;
                (45.0 + 1.6 * a.cos(), 1.6 * a.sin())
            } else {
                (42.0 + 6.0 * s, lat0 + 0.3 * (4.0 * s).sin())
            };
            csv += &format!("{id},{i},{lon},{lat}\n");
        }
    }
    csv += "still,0,44.0,0.3\nstill,1,44.01,0.31\n";
    let tracks = parse_tracks(&csv)?;

    let mut spec = GridSpec::new(BBox { min_lon: 41.5, min_lat: -2.5, max_lon: 48.5, max_lat: 2.5 }, 0.9);
    spec.land_mask = vec![vec![[44.3, -0.7], [45.7, -0.7], [45.7, 0.7], [44.3, 0.7]]];
    for apply in [false, true] {
        spec.apply_land_mask = apply;
        let res = ingest_points(&tracks, &spec)?;
        let sc = &res.grid.complex;
        let betti = betti_numbers(&sc.punctured([])?)?;
        println!(
            "land mask applied: {apply}; {} vertices, {} triangles, betti {betti:?}",
            sc.n_vertices(),
            sc.n_triangles()
        );
        for (id, t) in res.track_ids.iter().zip(&res.trajectories) {
            println!("  {id}: {} steps", t.n_steps());
        }
        for (id, why) in &res.dropped_tracks {
            println!("  dropped {id}: {why}");
        }
    }
    Ok(())
}
